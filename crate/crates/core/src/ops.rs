//! The weighted shift `(S f)(v) = λ_v · f(par v)` on a truncated tree.
//!
//! Mass shifted out of the boundary generation is dropped, which makes the
//! truncated operator an honest finite matrix: [`TruncatedShift::apply_adjoint`]
//! is its exact matrix adjoint.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{DirectedTree, VertexId};
use crate::vector::TreeVector;

/// Nonnegative weights `λ_v` for every non-root vertex.
#[derive(Clone, Debug)]
pub struct WeightSystem {
    lambda: Vec<f64>,
    positive: bool,
    column_bound: f64,
}

impl WeightSystem {
    /// `lambda[v]` is the weight of the edge into `v`; the root entry is ignored.
    pub fn new(tree: &DirectedTree, mut lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != tree.n_vertices() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} vertices",
                lambda.len(),
                tree.n_vertices()
            )));
        }
        lambda[0] = 0.0;
        for v in tree.vertices().skip(1) {
            let w = lambda[v.0];
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "weight {w} at vertex {}",
                    tree.display(v)
                )));
            }
        }
        let positive = lambda[1..].iter().all(|&w| w > 0.0);
        let column_bound = tree
            .vertices()
            .map(|u| {
                tree.children(u)
                    .iter()
                    .map(|c| lambda[c.0].powi(2))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        Ok(Self {
            lambda,
            positive,
            column_bound,
        })
    }

    #[inline]
    pub fn weight(&self, v: VertexId) -> f64 {
        self.lambda[v.0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    /// All non-root weights strictly positive.
    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// `sup_u Σ_{v ∈ Chi(u)} λ_v²`, i.e. `‖S‖²` on the truncation.
    pub fn column_norm_bound(&self) -> f64 {
        self.column_bound
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormSup {
    pub value: f64,
    pub argmax: VertexId,
    /// Columns cut off by the truncation might exceed `value`.
    pub may_grow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InjectivityReport {
    /// Every interior column `S e_u` is nonzero.
    pub injective: bool,
    /// Interior vertex with the smallest column norm, and that norm.
    pub argmin: VertexId,
    pub min_column_norm: f64,
    /// The tree has genuine leaves (a childless interior vertex, or a finite
    /// boundary). A weighted shift on a tree with leaves is never injective,
    /// even when the interior scan passes.
    pub has_leaves: bool,
}

impl InjectivityReport {
    pub fn witness(&self) -> Option<(VertexId, f64)> {
        (!self.injective).then_some((self.argmin, self.min_column_norm))
    }

    /// Injective on the full (untruncated) tree as far as the truncation can tell.
    pub fn injective_without_leaves(&self) -> bool {
        self.injective && !self.has_leaves
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedShift {
    tree: DirectedTree,
    weights: WeightSystem,
    // power_sq[u][n] = ‖Sⁿ e_u‖², n = 0..=D-|u|
    power_sq: Vec<Vec<f64>>,
    sup_depth_hint: Option<usize>,
}

impl TruncatedShift {
    pub fn new(tree: DirectedTree, weights: WeightSystem) -> Result<Self> {
        if weights.as_slice().len() != tree.n_vertices() {
            return Err(Error::TreeMismatch);
        }
        let d = tree.max_depth();
        let mut power_sq: Vec<Vec<f64>> = vec![Vec::new(); tree.n_vertices()];
        // Children carry larger ids, so a reverse sweep sees them first.
        for u in (0..tree.n_vertices()).rev() {
            let horizon = d - tree.depth(VertexId(u));
            let mut row = vec![0.0; horizon + 1];
            row[0] = 1.0;
            for &c in tree.children(VertexId(u)) {
                let w2 = weights.weight(c).powi(2);
                for (n, slot) in row.iter_mut().enumerate().skip(1) {
                    *slot += w2 * power_sq[c.0][n - 1];
                }
            }
            power_sq[u] = row;
        }
        Ok(Self {
            tree,
            weights,
            power_sq,
            sup_depth_hint: None,
        })
    }

    pub fn from_weights(tree: DirectedTree, lambda: Vec<f64>) -> Result<Self> {
        let weights = WeightSystem::new(&tree, lambda)?;
        Self::new(tree, weights)
    }

    /// Declares that on the untruncated tree, `sup_u ‖Sⁿ e_u‖` is attained at
    /// a vertex of depth at most `depth` for every `n`.
    pub fn with_sup_depth_hint(mut self, depth: usize) -> Self {
        self.sup_depth_hint = Some(depth);
        self
    }

    pub fn tree(&self) -> &DirectedTree {
        &self.tree
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    #[inline]
    pub fn lambda(&self, v: VertexId) -> f64 {
        self.weights.weight(v)
    }

    pub fn max_depth(&self) -> usize {
        self.tree.max_depth()
    }

    /// Largest `n` for which `Sⁿ e_u` is free of truncation effects.
    pub fn horizon(&self, u: VertexId) -> Option<usize> {
        (!self.tree.is_finite()).then(|| self.tree.max_depth() - self.tree.depth(u))
    }

    fn check_horizon(&self, u: VertexId, n: usize) -> Result<()> {
        match self.horizon(u) {
            Some(h) if n > h => Err(Error::HorizonExceeded {
                vertex: u,
                power: n,
                reach: self.tree.depth(u) + n,
                max_depth: self.tree.max_depth(),
            }),
            _ => Ok(()),
        }
    }

    /// `λ_{u|v}`: 1 when `u = v`, else the weight product along the path `u → v`.
    pub fn lambda_path(&self, u: VertexId, v: VertexId) -> Result<f64> {
        self.tree.check(u)?;
        self.tree.check(v)?;
        if !self.tree.is_descendant(u, v) {
            return Err(Error::NotDescendant { u, v });
        }
        let mut prod = 1.0;
        let mut cur = v;
        while cur != u {
            prod *= self.lambda(cur);
            cur = self.tree.parent(cur).unwrap();
        }
        Ok(prod)
    }

    pub fn apply_shift(&self, f: &TreeVector) -> Result<TreeVector> {
        self.apply_shift_leaky(f).map(|(out, _)| out)
    }

    /// Applies `S` and also returns the norm of the input mass sitting on the
    /// boundary generation, whose image the truncation drops. Always zero on
    /// finite trees.
    pub fn apply_shift_leaky(&self, f: &TreeVector) -> Result<(TreeVector, f64)> {
        f.ensure_on(&self.tree)?;
        let d = self.tree.max_depth();
        let mut out = f.zeros_like();
        let mut leak = 0.0;
        for (u, c) in f.iter() {
            if !self.tree.is_finite() && self.tree.depth(u) == d {
                leak += c.norm_sqr();
            }
            for &v in self.tree.children(u) {
                out.add_at(v, c * self.lambda(v));
            }
        }
        out.prune();
        Ok((out, leak.sqrt()))
    }

    /// `(S* f)(u) = Σ_{v ∈ Chi(u)} λ_v f(v)`.
    pub fn apply_adjoint(&self, f: &TreeVector) -> Result<TreeVector> {
        f.ensure_on(&self.tree)?;
        let mut out = f.zeros_like();
        for (v, c) in f.iter() {
            if let Some(p) = self.tree.parent(v) {
                out.add_at(p, c * self.lambda(v));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn apply_shift_pow(&self, f: &TreeVector, n: usize) -> Result<TreeVector> {
        let mut out = f.clone();
        for _ in 0..n {
            out = self.apply_shift(&out)?;
        }
        out.ensure_on(&self.tree)?;
        Ok(out)
    }

    pub fn apply_adjoint_pow(&self, f: &TreeVector, n: usize) -> Result<TreeVector> {
        let mut out = f.clone();
        for _ in 0..n {
            out = self.apply_adjoint(&out)?;
        }
        out.ensure_on(&self.tree)?;
        Ok(out)
    }

    /// `‖Sⁿ e_u‖²` from the cached table.
    pub fn power_norm_sqr(&self, u: VertexId, n: usize) -> Result<f64> {
        self.tree.check(u)?;
        self.check_horizon(u, n)?;
        Ok(self.power_sq[u.0].get(n).copied().unwrap_or(0.0))
    }

    /// `‖Sⁿ e_u‖`; errors when `Sⁿ e_u` would reach past the truncation.
    pub fn power_norm(&self, u: VertexId, n: usize) -> Result<f64> {
        self.power_norm_sqr(u, n).map(f64::sqrt)
    }

    /// `‖S e_u‖`, defined for every vertex (zero on the boundary of a
    /// truncated tree, where it is a truncation artifact).
    pub fn column_norm(&self, u: VertexId) -> f64 {
        self.power_sq[u.0].get(1).copied().unwrap_or(0.0).sqrt()
    }

    /// `‖Sⁿ‖` as the largest column norm `‖Sⁿ e_u‖`. Columns of `Sⁿ` have
    /// pairwise disjoint supports, so this is the operator norm of the
    /// truncated power restricted to columns within the horizon.
    pub fn operator_norm_power(&self, n: usize) -> Result<NormSup> {
        let d = self.tree.max_depth();
        if !self.tree.is_finite() && n > d {
            return Err(Error::HorizonExceeded {
                vertex: VertexId::ROOT,
                power: n,
                reach: n,
                max_depth: d,
            });
        }
        let mut best = (f64::NEG_INFINITY, VertexId::ROOT);
        for u in self.tree.vertices() {
            if self.check_horizon(u, n).is_err() {
                continue;
            }
            let val = self.power_norm(u, n)?;
            if val > best.0 {
                best = (val, u);
            }
        }
        let may_grow = if self.tree.is_finite() || n == 0 {
            false
        } else {
            match self.sup_depth_hint {
                Some(h) => h + n > d,
                None => true,
            }
        };
        Ok(NormSup {
            value: best.0,
            argmax: best.1,
            may_grow,
        })
    }

    /// `‖Sⁿ‖^{1/n}`. By Gelfand's formula this tends to the spectral radius;
    /// at finite `n` it is only an upper-bound-flavoured surrogate.
    pub fn spectral_radius_estimate(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParams(
                "spectral radius estimate needs n >= 1".into(),
            ));
        }
        Ok(self.operator_norm_power(n)?.value.powf(1.0 / n as f64))
    }

    /// Scans interior columns `‖S e_u‖` for zeros.
    pub fn injectivity(&self) -> InjectivityReport {
        let mut argmin = VertexId::ROOT;
        let mut min = f64::INFINITY;
        let mut has_leaves = self.tree.is_finite();
        for u in self.tree.vertices().filter(|&u| self.tree.is_interior(u)) {
            let c = self.column_norm(u);
            if c < min {
                min = c;
                argmin = u;
            }
            if self.tree.children(u).is_empty() {
                has_leaves = true;
            }
        }
        if !min.is_finite() {
            // single-vertex tree: no interior
            min = 0.0;
        }
        InjectivityReport {
            injective: min > 0.0,
            argmin,
            min_column_norm: min,
            has_leaves,
        }
    }

    /// Diagonal left inverse `(S*S)⁻¹ S*` on interior vertices; boundary and
    /// zero-column vertices are sent to zero.
    pub fn apply_left_inverse(&self, f: &TreeVector) -> Result<TreeVector> {
        let mut out = self.apply_adjoint(f)?;
        let entries: Vec<_> = out.iter().collect();
        for (u, c) in entries {
            let n2 = self.power_sq[u.0].get(1).copied().unwrap_or(0.0);
            if n2 > 0.0 {
                out.set(u, c / n2);
            } else {
                out.set(u, Complex64::default());
            }
        }
        Ok(out)
    }
}
