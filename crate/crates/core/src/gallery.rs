//! Named shift families: the worked examples (chain with `n/(n−1)` weights,
//! brooms, the two-ray tree and its zero-weight variant), seeded random trees,
//! certified-balanced random trees, and path utilities.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiplier::{gamma_apply, Symbol, SymbolRule};
use crate::ops::TruncatedShift;
use crate::tree::{DirectedTree, PathSelector, VertexId};
use crate::vector::TreeVector;
use crate::wold::peel;

/// Refuse to build trees larger than this.
pub const MAX_VERTICES: usize = 2_000_000;

fn one() -> f64 {
    1.0
}

fn five() -> usize {
    5
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branching {
    pub min: usize,
    pub max: usize,
}

impl Default for Branching {
    fn default() -> Self {
        Self { min: 1, max: 3 }
    }
}

impl Branching {
    fn validate(&self) -> Result<()> {
        if self.min == 0 || self.max < self.min {
            return Err(Error::InvalidParams(format!(
                "branching needs 1 <= min <= max, got min {} max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        rng.gen_range(self.min..=self.max)
    }
}

fn default_weight_range() -> (f64, f64) {
    (0.5, 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "family",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum Family {
    /// Single chain, every weight equal.
    Unilateral {
        #[serde(default = "one")]
        weight: f64,
    },
    /// Chain with `λ_1 = 1`, `λ_n = n/(n−1)` for `n ≥ 2`, so `λ_{0|n} = n`.
    Mad {},
    /// Root with `arms` leaf children. Default weights `λ_n = 1/n`.
    Broom {
        #[serde(default = "five")]
        arms: usize,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// A broom whose first arm carries one extra leaf `ω`.
    BroomLeaf {
        #[serde(default = "five")]
        arms: usize,
        #[serde(default)]
        weights: Option<Vec<f64>>,
        #[serde(default = "one")]
        omega_weight: f64,
    },
    /// Two rays from the root; upper weights 1, lower weights `alpha`.
    T2 { alpha: f64 },
    /// Two rays with `λ_{(i,2)} = 0`, upper weights 1, lower weights 2.
    T2Zero {},
    /// Seeded random tree, weights log-uniform on `weight_range`.
    Random {
        seed: u64,
        #[serde(default)]
        branching: Branching,
        #[serde(default = "default_weight_range")]
        weight_range: (f64, f64),
    },
    /// Seeded random tree with `Σ_{v ∈ Chi(u)} λ_v² = generation_norms[|u|]²`.
    RandomBalanced {
        seed: u64,
        #[serde(default)]
        branching: Branching,
        #[serde(default)]
        generation_norms: Option<Vec<f64>>,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Unilateral { .. } => "unilateral",
            Family::Mad {} => "mad",
            Family::Broom { .. } => "broom",
            Family::BroomLeaf { .. } => "broom_leaf",
            Family::T2 { .. } => "t2",
            Family::T2Zero {} => "t2_zero",
            Family::Random { .. } => "random",
            Family::RandomBalanced { .. } => "random_balanced",
        }
    }

    /// Depth fixed by the family itself (the finite brooms).
    pub fn intrinsic_depth(&self) -> Option<usize> {
        match self {
            Family::Broom { .. } => Some(1),
            Family::BroomLeaf { .. } => Some(2),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GallerySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl GallerySpec {
    pub fn new(family: Family, depth: Option<usize>) -> Self {
        Self { family, depth }
    }

    /// Resolved truncation depth.
    pub fn resolved_depth(&self) -> Result<usize> {
        match (self.family.intrinsic_depth(), self.depth) {
            (Some(d), None) => Ok(d),
            (Some(d), Some(given)) if given == d => Ok(d),
            (Some(d), Some(given)) => Err(Error::InvalidParams(format!(
                "family {} has depth {d}, got {given}",
                self.family.name()
            ))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidParams(format!(
                "family {} needs a depth",
                self.family.name()
            ))),
        }
    }
}

struct Assembly {
    edges: Vec<(usize, usize)>,
    // weight of the edge into each input vertex
    weights: Vec<f64>,
    labels: Vec<Option<String>>,
}

impl Assembly {
    fn root(label: Option<String>) -> Self {
        Self {
            edges: Vec::new(),
            weights: vec![0.0],
            labels: vec![label],
        }
    }

    fn push(&mut self, parent: usize, weight: f64, label: Option<String>) -> Result<usize> {
        let id = self.weights.len();
        if id >= MAX_VERTICES {
            return Err(Error::InvalidParams(format!(
                "tree would exceed {MAX_VERTICES} vertices"
            )));
        }
        self.edges.push((parent, id));
        self.weights.push(weight);
        self.labels.push(label);
        Ok(id)
    }

    fn finish(self, finite: bool, sup_depth_hint: Option<usize>) -> Result<TruncatedShift> {
        let n = self.weights.len();
        let built = DirectedTree::from_edges(n, &self.edges, self.labels, finite)?;
        let mut lambda = vec![0.0; n];
        for (input, id) in built.id_of_input.iter().enumerate() {
            lambda[id.0] = self.weights[input];
        }
        let s = TruncatedShift::from_weights(built.tree, lambda)?;
        Ok(match sup_depth_hint {
            Some(h) => s.with_sup_depth_hint(h),
            None => s,
        })
    }
}

fn check_weight(name: &str, w: f64, strict: bool) -> Result<()> {
    if !w.is_finite() || w < 0.0 || (strict && w == 0.0) {
        return Err(Error::InvalidParams(format!("{name} = {w} is not allowed")));
    }
    Ok(())
}

fn arm_weights(arms: usize, weights: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    if arms == 0 {
        return Err(Error::InvalidParams(
            "a broom needs at least one arm".into(),
        ));
    }
    let w = match weights {
        Some(w) if w.len() != arms => {
            return Err(Error::InvalidParams(format!(
                "{} arm weights for {arms} arms",
                w.len()
            )))
        }
        Some(w) => w.clone(),
        None => (1..=arms).map(|n| 1.0 / n as f64).collect(),
    };
    for &x in &w {
        check_weight("arm weight", x, true)?;
    }
    Ok(w)
}

fn chain(depth: usize, weight: impl Fn(usize) -> f64, labels: bool) -> Result<Assembly> {
    let label = |k: usize| labels.then(|| k.to_string());
    let mut a = Assembly::root(label(0));
    for k in 1..=depth {
        a.push(k - 1, weight(k), label(k))?;
    }
    Ok(a)
}

/// Two rays: `(0,0)` then `(1,j)` and `(2,j)` for `1 ≤ j ≤ depth`.
fn two_rays(depth: usize, weight: impl Fn(usize, usize) -> f64) -> Result<Assembly> {
    let mut a = Assembly::root(Some("(0,0)".into()));
    let mut tips = [0usize, 0usize];
    for j in 1..=depth {
        for i in 1..=2 {
            tips[i - 1] = a.push(tips[i - 1], weight(i, j), Some(format!("({i},{j})")))?;
        }
    }
    Ok(a)
}

fn random_tree(
    depth: usize,
    branching: &Branching,
    rng: &mut ChaCha8Rng,
    mut child_weights: impl FnMut(usize, usize, &mut ChaCha8Rng) -> Vec<f64>,
) -> Result<Assembly> {
    let mut a = Assembly::root(None);
    let mut frontier = vec![0usize];
    for gen in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let k = branching.sample(rng);
            for w in child_weights(gen, k, rng) {
                next.push(a.push(u, w, None)?);
            }
        }
        frontier = next;
    }
    Ok(a)
}

/// Builds the truncated shift for a gallery spec. Random families are
/// deterministic in their seed.
pub fn make(spec: &GallerySpec) -> Result<TruncatedShift> {
    let depth = spec.resolved_depth()?;
    match &spec.family {
        Family::Unilateral { weight } => {
            check_weight("weight", *weight, false)?;
            chain(depth, |_| *weight, false)?.finish(false, Some(0))
        }
        Family::Mad {} => chain(
            depth,
            |n| {
                if n == 1 {
                    1.0
                } else {
                    n as f64 / (n - 1) as f64
                }
            },
            true,
        )?
        .finish(false, Some(1)),
        Family::Broom { arms, weights } => {
            let w = arm_weights(*arms, weights)?;
            let mut a = Assembly::root(Some("0".into()));
            for (n, &x) in w.iter().enumerate() {
                a.push(0, x, Some((n + 1).to_string()))?;
            }
            a.finish(true, None)
        }
        Family::BroomLeaf {
            arms,
            weights,
            omega_weight,
        } => {
            let w = arm_weights(*arms, weights)?;
            check_weight("omega_weight", *omega_weight, true)?;
            let mut a = Assembly::root(Some("0".into()));
            for (n, &x) in w.iter().enumerate() {
                a.push(0, x, Some((n + 1).to_string()))?;
            }
            a.push(1, *omega_weight, Some("ω".into()))?;
            a.finish(true, None)
        }
        Family::T2 { alpha } => {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidParams(format!(
                    "alpha = {alpha} is not in (0, 1)"
                )));
            }
            two_rays(depth, |i, _| if i == 1 { 1.0 } else { *alpha })?.finish(false, Some(0))
        }
        Family::T2Zero {} => {
            if depth < 3 {
                return Err(Error::InvalidParams(format!(
                    "t2_zero needs depth >= 3, got {depth}"
                )));
            }
            two_rays(depth, |i, j| match (i, j) {
                (_, 2) => 0.0,
                (1, _) => 1.0,
                _ => 2.0,
            })?
            .finish(false, Some(2))
        }
        Family::Random {
            seed,
            branching,
            weight_range: (lo, hi),
        } => {
            branching.validate()?;
            if !(*lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "weight range [{lo}, {hi}] must satisfy 0 < lo <= hi"
                )));
            }
            let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            random_tree(depth, branching, &mut rng, |_, k, rng| {
                (0..k)
                    .map(|_| {
                        if ln_lo == ln_hi {
                            *lo
                        } else {
                            rng.gen_range(ln_lo..ln_hi).exp()
                        }
                    })
                    .collect()
            })?
            .finish(false, None)
        }
        Family::RandomBalanced {
            seed,
            branching,
            generation_norms,
        } => random_balanced(*seed, branching, depth, generation_norms.as_deref()),
    }
}

/// Random tree whose interior vertices at depth `n` all satisfy
/// `Σ_{v ∈ Chi(u)} λ_v² = generation_norms[n]²`: the squared norm is split over
/// the children by a uniform sample from the simplex. `None` means all ones.
pub fn random_balanced(
    seed: u64,
    branching: &Branching,
    depth: usize,
    generation_norms: Option<&[f64]>,
) -> Result<TruncatedShift> {
    branching.validate()?;
    let ones = vec![1.0; depth];
    let norms = generation_norms.unwrap_or(&ones);
    if norms.len() < depth {
        return Err(Error::InvalidParams(format!(
            "{} generation norms for depth {depth}",
            norms.len()
        )));
    }
    for &x in norms {
        check_weight("generation norm", x, true)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree(depth, branching, &mut rng, |gen, k, rng| {
        let share = loop {
            // normalized exponentials are uniform on the simplex
            let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
            let total: f64 = e.iter().sum();
            if e.iter().all(|&x| x > 0.0) && total.is_finite() {
                break e.into_iter().map(|x| x / total).collect::<Vec<_>>();
            }
        };
        share.into_iter().map(|p| norms[gen] * p.sqrt()).collect()
    })?
    .finish(false, None)
}

/// Weights `μ_k = λ_{v_{k+1}}` of the classical shift obtained by compressing
/// to a path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalWeights {
    pub mu: Vec<f64>,
}

impl ClassicalWeights {
    /// The classical weighted shift on a chain with these weights.
    pub fn to_shift(&self) -> Result<TruncatedShift> {
        let mu = &self.mu;
        chain(mu.len(), |k| mu[k - 1], false)?.finish(false, None)
    }
}

fn check_full_path(s: &TruncatedShift, p: &PathSelector) -> Result<()> {
    let tree = s.tree();
    p.validate(tree)?;
    let end = tree.depth(p.end());
    if !tree.is_finite() && end < tree.max_depth() {
        return Err(Error::InvalidPath(format!(
            "path stops at depth {end}, above the truncation depth {}",
            tree.max_depth()
        )));
    }
    Ok(())
}

pub fn path_restriction(s: &TruncatedShift, p: &PathSelector) -> Result<ClassicalWeights> {
    check_full_path(s, p)?;
    Ok(ClassicalWeights {
        mu: p.vertices[1..].iter().map(|&v| s.lambda(v)).collect(),
    })
}

/// `inf { λ_{root|v}^{1/|v|} : v on the path, max(n,1) ≤ |v| ≤ D }`, a
/// finite-horizon stand-in for the path radius (a liminf).
pub fn path_radius_estimate(s: &TruncatedShift, p: &PathSelector, n: usize) -> Result<f64> {
    check_full_path(s, p)?;
    let end = s.tree().depth(p.end());
    if n > end {
        return Err(Error::HorizonExceeded {
            vertex: VertexId::ROOT,
            power: n,
            reach: n,
            max_depth: end,
        });
    }
    let mut prod = 1.0;
    let mut best = f64::INFINITY;
    for (k, &v) in p.vertices.iter().enumerate().skip(1) {
        prod *= s.lambda(v);
        if k >= n {
            best = best.min(prod.powf(1.0 / k as f64));
        }
    }
    Ok(best)
}

/// `γ_j = −1/((j+1) α^j (1+α²))`.
pub fn two_ray_expected_gamma(j: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} is not in (0, 1)"
        )));
    }
    Ok(-1.0 / ((j + 1) as f64 * alpha.powi(j as i32) * (1.0 + alpha * alpha)))
}

/// Vertex `(i, j)` of a two-ray tree (`(0,0)` is the root).
pub fn t2_vertex(tree: &DirectedTree, i: usize, j: usize) -> Result<VertexId> {
    tree.find_label(&format!("({i},{j})"))
        .ok_or_else(|| Error::InvalidParams(format!("no vertex ({i},{j}) in this tree")))
}

/// `f((2,j)) = 1/j`, zero elsewhere.
pub fn two_ray_harmonic_vector(s: &TruncatedShift) -> Result<TreeVector> {
    let tree = s.tree();
    let entries = (1..=tree.max_depth())
        .map(|j| Ok((t2_vertex(tree, 2, j)?, Complex64::new(1.0 / j as f64, 0.0))))
        .collect::<Result<Vec<_>>>()?;
    TreeVector::from_entries(tree, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoRayRow {
    pub j: usize,
    /// Coefficient of `α e_(1,1) − e_(2,1)` in the peeled component `f_j`.
    pub gamma_peeled: f64,
    pub gamma_expected: f64,
    /// `|γ_j|·α`, the mass the partial sum leaves at `(1, j+1)`.
    pub tail_magnitude: f64,
    /// `|γ_j α|²`.
    pub tail_sq_direct: f64,
    /// `1/((j+1) α^j (1+α²))`, the closed form quoted for the same quantity.
    pub tail_sq_quoted: f64,
}

/// Peels `f((2,j)) = 1/j` on the two-ray tree and reads off `γ_j` for
/// `0 ≤ j < depth`.
pub fn two_ray_peel_report(alpha: f64, depth: usize) -> Result<Vec<TwoRayRow>> {
    let s = make(&GallerySpec::new(Family::T2 { alpha }, Some(depth)))?;
    let tree = s.tree();
    let f = two_ray_harmonic_vector(&s)?;
    let w = peel(&s, &f, depth)?;
    let direction = TreeVector::from_entries(
        tree,
        [
            (t2_vertex(tree, 1, 1)?, Complex64::new(alpha, 0.0)),
            (t2_vertex(tree, 2, 1)?, Complex64::new(-1.0, 0.0)),
        ],
    )?;
    let dn2 = direction.norm_sqr();
    (0..depth)
        .map(|j| {
            let gamma = w.components[j].inner(&direction)?.re / dn2;
            let tail = gamma.abs() * alpha;
            Ok(TwoRayRow {
                j,
                gamma_peeled: gamma,
                gamma_expected: two_ray_expected_gamma(j, alpha)?,
                tail_magnitude: tail,
                tail_sq_direct: tail * tail,
                tail_sq_quoted: 1.0
                    / ((j + 1) as f64 * alpha.powi(j as i32) * (1.0 + alpha * alpha)),
            })
        })
        .collect()
}

/// `Σ_{k=1}^{K} |(Γ_φ̂ e_0)(k)|²` with `φ̂(k) = k^{−3/2}`, evaluated through
/// [`gamma_apply`] on a chain shift (the `n/(n−1)` chain gives `Σ 1/k`).
pub fn mad_divergence_partial_sum(s: &TruncatedShift, k_max: usize) -> Result<f64> {
    let tree = s.tree();
    if k_max == 0 {
        return Err(Error::InvalidParams("K must be at least 1".into()));
    }
    if k_max > tree.max_depth() {
        return Err(Error::HorizonExceeded {
            vertex: VertexId::ROOT,
            power: k_max,
            reach: k_max,
            max_depth: tree.max_depth(),
        });
    }
    let phi = Symbol::rule(SymbolRule::PowerLaw { exponent: -1.5 }, k_max);
    let image = gamma_apply(s, &phi, &TreeVector::basis(tree, VertexId::ROOT)?)?;
    Ok(image
        .iter()
        .filter(|(v, _)| (1..=k_max).contains(&tree.depth(*v)))
        .map(|(_, c)| c.norm_sqr())
        .sum())
}
