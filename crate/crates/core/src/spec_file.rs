//! JSON tree specs, shared by the library fixtures and the command line.
//!
//! Two shapes are accepted:
//!
//! ```json
//! {"family": "t2", "params": {"alpha": 0.5}, "depth": 12}
//! {"vertices": ["r", "a", "b"], "edges": [[0, 1], [0, 2]], "weights": [1.0, 0.5], "finite": false}
//! ```
//!
//! `weights` runs parallel to `edges` (default all ones). `finite` marks
//! childless vertices as genuine leaves. Unknown keys are rejected.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gallery::{make, Family, GallerySpec};
use crate::ops::TruncatedShift;
use crate::tree::DirectedTree;

#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitTree {
    pub labels: Vec<Option<String>>,
    pub edges: Vec<(usize, usize)>,
    pub weights: Option<Vec<f64>>,
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftSpec {
    Gallery(GallerySpec),
    Explicit(ExplicitTree),
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Spec(format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

impl ShiftSpec {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Spec("tree spec must be a JSON object".into()))?;
        if obj.contains_key("family") {
            reject_unknown(obj, &["family", "params", "depth"])?;
            let family: Family = serde_json::from_value(json!({
                "family": obj["family"],
                "params": obj.get("params").cloned().unwrap_or_else(|| json!({})),
            }))
            .map_err(|e| Error::Spec(e.to_string()))?;
            let depth =
                match obj.get("depth") {
                    None | Some(Value::Null) => None,
                    Some(d) => Some(d.as_u64().ok_or_else(|| {
                        Error::Spec("`depth` must be a nonnegative integer".into())
                    })? as usize),
                };
            return Ok(ShiftSpec::Gallery(GallerySpec::new(family, depth)));
        }
        if obj.contains_key("vertices") || obj.contains_key("edges") {
            reject_unknown(obj, &["vertices", "edges", "weights", "finite"])?;
            let labels = obj
                .get("vertices")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Spec("`vertices` must be a list of labels".into()))?
                .iter()
                .map(|v| match v {
                    Value::Null => Ok(None),
                    Value::String(s) => Ok(Some(s.clone())),
                    Value::Number(n) => Ok(Some(n.to_string())),
                    other => Err(Error::Spec(format!("bad vertex label {other}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let edges: Vec<(usize, usize)> =
                serde_json::from_value(obj.get("edges").cloned().unwrap_or_else(|| json!([])))
                    .map_err(|e| Error::Spec(format!("`edges`: {e}")))?;
            let weights: Option<Vec<f64>> = match obj.get("weights") {
                None | Some(Value::Null) => None,
                Some(w) => Some(
                    serde_json::from_value(w.clone())
                        .map_err(|e| Error::Spec(format!("`weights`: {e}")))?,
                ),
            };
            let finite = match obj.get("finite") {
                None => false,
                Some(f) => f
                    .as_bool()
                    .ok_or_else(|| Error::Spec("`finite` must be a boolean".into()))?,
            };
            if let Some(w) = &weights {
                if w.len() != edges.len() {
                    return Err(Error::Spec(format!(
                        "{} weights for {} edges",
                        w.len(),
                        edges.len()
                    )));
                }
            }
            return Ok(ShiftSpec::Explicit(ExplicitTree {
                labels,
                edges,
                weights,
                finite,
            }));
        }
        Err(Error::Spec(
            "tree spec needs either `family` or `vertices`/`edges`".into(),
        ))
    }

    pub fn to_json(&self) -> Value {
        match self {
            ShiftSpec::Gallery(g) => {
                let mut v = serde_json::to_value(&g.family).expect("family serializes");
                if let Some(d) = g.depth {
                    v["depth"] = json!(d);
                }
                v
            }
            ShiftSpec::Explicit(e) => {
                let mut v = json!({
                    "vertices": e.labels,
                    "edges": e.edges,
                    "finite": e.finite,
                });
                if let Some(w) = &e.weights {
                    v["weights"] = json!(w);
                }
                v
            }
        }
    }

    pub fn build_tree(&self) -> Result<DirectedTree> {
        Ok(self.build_shift()?.tree().clone())
    }

    pub fn build_shift(&self) -> Result<TruncatedShift> {
        match self {
            ShiftSpec::Gallery(g) => make(g),
            ShiftSpec::Explicit(e) => {
                let n = e.labels.len();
                let built = DirectedTree::from_edges(n, &e.edges, e.labels.clone(), e.finite)?;
                let mut lambda = vec![0.0; n];
                for (k, &(_, child)) in e.edges.iter().enumerate() {
                    let w = e.weights.as_ref().map_or(1.0, |w| w[k]);
                    lambda[built.id_of_input[child].0] = w;
                }
                TruncatedShift::from_weights(built.tree, lambda)
            }
        }
    }
}

pub fn build_tree(spec: &ShiftSpec) -> Result<DirectedTree> {
    spec.build_tree()
}

pub fn build_shift(spec: &ShiftSpec) -> Result<TruncatedShift> {
    spec.build_shift()
}
