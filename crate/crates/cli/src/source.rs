use std::fmt;
use std::fs;

use anyhow::Result;
use serde_json::{json, Value};
use treeshift::{Branching, Family, GallerySpec, ShiftSpec, TruncatedShift};

use crate::args::SourceArgs;

/// Bad flags or a malformed tree spec; mapped to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// A loaded shift with the settings every experiment shares.
pub struct Ctx {
    pub spec: ShiftSpec,
    pub shift: TruncatedShift,
    pub seed: u64,
    pub tol: Option<f64>,
}

impl Ctx {
    pub fn load(args: &SourceArgs) -> Result<Self> {
        let spec = match (&args.tree, &args.family) {
            (Some(path), None) => {
                for (flag, given) in [
                    ("--depth", args.depth.is_some()),
                    ("--alpha", args.alpha.is_some()),
                    ("--arms", args.arms.is_some()),
                ] {
                    if given {
                        return Err(usage(format!("{flag} cannot be combined with --tree")));
                    }
                }
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                ShiftSpec::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
            }
            (None, Some(name)) => ShiftSpec::Gallery(family_spec(name, args)?),
            _ => return Err(usage("exactly one of --tree and --family is required")),
        };
        let shift = spec.build_shift().map_err(|e| usage(e.to_string()))?;
        if let Some(t) = args.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(usage(format!(
                    "--tol must be a nonnegative number, got {t}"
                )));
            }
        }
        Ok(Self {
            spec,
            shift,
            seed: args.seed,
            tol: args.tol,
        })
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn family(&self) -> Option<&Family> {
        match &self.spec {
            ShiftSpec::Gallery(g) => Some(&g.family),
            ShiftSpec::Explicit(_) => None,
        }
    }

    /// Echo of the inputs: the tree spec, the seed and experiment parameters.
    pub fn inputs(&self, params: Value) -> Value {
        json!({
            "tree": self.spec.to_json(),
            "seed": self.seed,
            "params": params,
        })
    }
}

fn family_spec(name: &str, args: &SourceArgs) -> Result<GallerySpec> {
    let only = |flag: &str, given: bool, families: &[&str]| -> Result<()> {
        if given && !families.contains(&name) {
            return Err(usage(format!("{flag} does not apply to family {name}")));
        }
        Ok(())
    };
    only("--alpha", args.alpha.is_some(), &["t2"])?;
    only("--arms", args.arms.is_some(), &["broom", "broom_leaf"])?;
    let arms = args.arms.unwrap_or(5);
    let family = match name {
        "unilateral" => Family::Unilateral { weight: 1.0 },
        "mad" => Family::Mad {},
        "broom" => Family::Broom {
            arms,
            weights: None,
        },
        "broom_leaf" => Family::BroomLeaf {
            arms,
            weights: None,
            omega_weight: 1.0,
        },
        "t2" => Family::T2 {
            alpha: args.alpha.ok_or_else(|| usage("family t2 needs --alpha"))?,
        },
        "t2_zero" => Family::T2Zero {},
        "random" => Family::Random {
            seed: args.seed,
            branching: Branching::default(),
            weight_range: (0.5, 2.0),
        },
        "random_balanced" => Family::RandomBalanced {
            seed: args.seed,
            branching: Branching::default(),
            generation_norms: None,
        },
        other => return Err(usage(format!("unknown family `{other}`"))),
    };
    Ok(GallerySpec::new(family, args.depth))
}
