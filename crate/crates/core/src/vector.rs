use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tree::{DirectedTree, VertexId};

/// Sparse element of `ℓ²(V)` on a specific tree. Absent keys are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeVector {
    tree: u64,
    dim: usize,
    coeffs: BTreeMap<usize, Complex64>,
}

impl TreeVector {
    pub fn zeros(tree: &DirectedTree) -> Self {
        Self {
            tree: tree.fingerprint(),
            dim: tree.n_vertices(),
            coeffs: BTreeMap::new(),
        }
    }

    /// `e_v`.
    pub fn basis(tree: &DirectedTree, v: VertexId) -> Result<Self> {
        tree.check(v)?;
        let mut out = Self::zeros(tree);
        out.coeffs.insert(v.0, Complex64::new(1.0, 0.0));
        Ok(out)
    }

    pub fn from_fn(tree: &DirectedTree, mut f: impl FnMut(VertexId) -> Complex64) -> Self {
        let mut out = Self::zeros(tree);
        for v in tree.vertices() {
            let c = f(v);
            if c != Complex64::default() {
                out.coeffs.insert(v.0, c);
            }
        }
        out
    }

    pub fn from_dense(tree: &DirectedTree, values: &[Complex64]) -> Result<Self> {
        if values.len() != tree.n_vertices() {
            return Err(Error::TreeMismatch);
        }
        Ok(Self::from_fn(tree, |v| values[v.0]))
    }

    pub fn from_entries(
        tree: &DirectedTree,
        entries: impl IntoIterator<Item = (VertexId, Complex64)>,
    ) -> Result<Self> {
        let mut out = Self::zeros(tree);
        for (v, c) in entries {
            tree.check(v)?;
            out.add_at(v, c);
        }
        out.prune();
        Ok(out)
    }

    /// Same shape and tree, no entries.
    pub fn zeros_like(&self) -> Self {
        Self {
            tree: self.tree,
            dim: self.dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn is_on(&self, tree: &DirectedTree) -> bool {
        self.tree == tree.fingerprint() && self.dim == tree.n_vertices()
    }

    pub fn ensure_on(&self, tree: &DirectedTree) -> Result<()> {
        if self.is_on(tree) {
            Ok(())
        } else {
            Err(Error::TreeMismatch)
        }
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.tree == other.tree && self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::TreeMismatch)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, v: VertexId) -> Complex64 {
        self.coeffs.get(&v.0).copied().unwrap_or_default()
    }

    pub fn set(&mut self, v: VertexId, c: Complex64) {
        debug_assert!(v.0 < self.dim);
        if c == Complex64::default() {
            self.coeffs.remove(&v.0);
        } else {
            self.coeffs.insert(v.0, c);
        }
    }

    pub fn add_at(&mut self, v: VertexId, c: Complex64) {
        debug_assert!(v.0 < self.dim);
        *self.coeffs.entry(v.0).or_default() += c;
    }

    /// Drops stored exact zeros.
    pub fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != Complex64::default());
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (VertexId(k), c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == Complex64::default())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = Σ self(v)·conj(other(v))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same(other)?;
        let (small, large, flip) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex64::default();
        for (k, a) in &small.coeffs {
            if let Some(b) = large.coeffs.get(k) {
                acc += if flip { b * a.conj() } else { a * b.conj() };
            }
        }
        Ok(acc)
    }

    /// `self + alpha·other`.
    pub fn axpy(&self, alpha: Complex64, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.coeffs {
            *out.coeffs.entry(k).or_default() += alpha * c;
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        let mut out = self.zeros_like();
        for (&k, &c) in &self.coeffs {
            out.coeffs.insert(k, alpha * c);
        }
        out.prune();
        out
    }

    /// Pointwise product with the indicator of `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(VertexId) -> bool) -> Self {
        let mut out = self.zeros_like();
        for (&k, &c) in &self.coeffs {
            if keep(VertexId(k)) {
                out.coeffs.insert(k, c);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim];
        for (&k, &c) in &self.coeffs {
            out[k] = c;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
