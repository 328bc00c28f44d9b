use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::binpack::{PackingInstance, ProblemKind};
use crate::rounding::RoundingInstance;

/// A number written either as a JSON number or as a decimal string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Decimal {
    Num(f64),
    Text(#[serde(with = "text")] f64),
}

mod text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(serde::de::Error::custom)
    }
}

fn values(v: &[Decimal]) -> Vec<f64> {
    v.iter()
        .map(|d| match d {
            Decimal::Num(x) | Decimal::Text(x) => *x,
        })
        .collect()
}

/// On-disk packing instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: String,
    #[serde(default)]
    sizes: Vec<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rejection_costs: Option<Vec<Decimal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<Decimal>>,
    #[serde(default)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl InstanceFile {
    pub fn from_instance(
        inst: &PackingInstance,
        metadata: serde_json::Map<String, serde_json::Value>,
    ) -> Self {
        let wrap = |v: &[f64]| v.iter().map(|&x| Decimal::Num(x)).collect::<Vec<_>>();
        Self {
            kind: inst.kind().to_string(),
            sizes: wrap(inst.sizes()),
            rejection_costs: inst.rejection_costs().map(wrap),
            positions: inst.positions().map(wrap),
            metadata,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedInstance {
    Packing {
        instance: PackingInstance,
        /// `permutation[k]` is the input index of sorted item `k`.
        permutation: Vec<usize>,
        notices: Vec<String>,
        metadata: serde_json::Map<String, serde_json::Value>,
    },
    Rounding(RoundingInstance),
}

fn parse_error(e: &serde_json::Error) -> HarnessError {
    HarnessError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses either a packing instance (`kind` bp, bpr or train) or a rounding
/// instance (`kind` rounding). Sizes are sorted non-increasing, stably.
pub fn parse_instance(text: &str) -> Result<LoadedInstance, HarnessError> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
    let kind = raw
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| HarnessError::Validation("missing string field 'kind'".into()))?;
    if kind == "rounding" {
        let mut obj = raw.as_object().cloned().unwrap_or_default();
        obj.remove("kind");
        obj.remove("metadata");
        let inst: RoundingInstance = serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        return Ok(LoadedInstance::Rounding(inst));
    }
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
    let kind: ProblemKind = kind.parse()?;
    let sizes = values(&file.sizes);
    let rc = file.rejection_costs.as_deref().map(values);
    let pos = file.positions.as_deref().map(values);
    match kind {
        ProblemKind::Bp if rc.is_some() || pos.is_some() => {
            return Err(HarnessError::Validation(
                "bp instances take sizes only".into(),
            ))
        }
        ProblemKind::Bpr if rc.is_none() => {
            return Err(HarnessError::Validation(
                "bpr instance without rejection_costs".into(),
            ))
        }
        ProblemKind::Train if pos.is_none() => {
            return Err(HarnessError::Validation(
                "train instance without positions".into(),
            ))
        }
        _ => {}
    }
    for (name, v) in [("rejection_costs", &rc), ("positions", &pos)] {
        if let Some(v) = v {
            if v.len() != sizes.len() {
                return Err(HarnessError::Validation(format!(
                    "{} {name} for {} sizes",
                    v.len(),
                    sizes.len()
                )));
            }
        }
    }
    if let Some(x) = sizes.iter().find(|x| x.is_nan()) {
        return Err(HarnessError::Validation(format!("size {x}")));
    }
    let mut permutation: Vec<usize> = (0..sizes.len()).collect();
    permutation.sort_by(|&a, &b| sizes[b].total_cmp(&sizes[a]));
    let mut notices = Vec::new();
    if permutation.iter().enumerate().any(|(k, &p)| k != p) {
        notices.push("sizes were not sorted non-increasing; items reordered".to_string());
    }
    let pick = |v: &[f64]| permutation.iter().map(|&p| v[p]).collect::<Vec<_>>();
    let instance = PackingInstance::new(
        pick(&sizes),
        rc.as_deref().map(pick),
        pos.as_deref().map(pick),
    )?;
    Ok(LoadedInstance::Packing {
        instance,
        permutation,
        notices,
        metadata: file.metadata,
    })
}

pub fn load_instance(path: &Path) -> Result<LoadedInstance, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_instance(&text)
}

pub fn write_instance(
    path: &Path,
    inst: &PackingInstance,
    metadata: serde_json::Map<String, serde_json::Value>,
) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(&InstanceFile::from_instance(inst, metadata))
        .expect("instance serializes");
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bpr() {
        let LoadedInstance::Packing { instance, .. } =
            parse_instance(r#"{"kind":"bpr","sizes":[0.5],"rejection_costs":[0.2],"metadata":{}}"#)
                .unwrap()
        else {
            panic!()
        };
        assert_eq!(instance.n(), 1);
    }

    #[test]
    fn unsorted_is_sorted() {
        let LoadedInstance::Packing {
            instance,
            permutation,
            notices,
            ..
        } = parse_instance(
            r#"{"kind":"bpr","sizes":[0.2,"0.5",0.2],"rejection_costs":[0.1,0.9,0.3]}"#,
        )
        .unwrap()
        else {
            panic!()
        };
        assert_eq!(instance.sizes(), &[0.5, 0.2, 0.2]);
        assert_eq!(permutation, vec![1, 0, 2]);
        assert_eq!(instance.rejection_costs().unwrap(), &[0.9, 0.1, 0.3]);
        assert_eq!(notices.len(), 1);
    }

    #[test]
    fn bad_rejection_cost() {
        let e =
            parse_instance(r#"{"kind":"bpr","sizes":[0.5],"rejection_costs":[1.5]}"#).unwrap_err();
        assert!(matches!(e, HarnessError::Validation(_)));
    }

    #[test]
    fn syntax_error_has_line() {
        let e = parse_instance("{\n\"kind\": \"bp\",\n\"sizes\": [0.5,,]\n}").unwrap_err();
        assert!(matches!(e, HarnessError::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn rounding_file() {
        let text =
            r#"{"kind":"rounding","a":[[1,0]],"delta":[1],"x":[0.5,0.5],"metadata":{"note":"x"}}"#;
        assert!(matches!(
            parse_instance(text).unwrap(),
            LoadedInstance::Rounding(_)
        ));
    }
}
