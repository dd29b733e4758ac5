//! `ker S*`, its generation-blocked orthonormal basis, the Wold-type peeling
//! `f = Σ Sⁿ fₙ` with `fₙ ∈ ker S*`, balance predicates and the Gram /
//! principal-angle diagnostics for the factors `Sⁿ(ker S*)`.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ops::TruncatedShift;
use crate::tol::Tolerance;
use crate::tree::VertexId;
use crate::vector::TreeVector;

/// Relative drop threshold used by [`orthonormalize`] inside kernel blocks.
const BLOCK_RANK_TOL: f64 = 1e-12;

/// Default rank threshold for image spans.
pub const IMAGE_RANK_TOL: f64 = 1e-10;

/// Default principal-angle threshold: cosines `≥ 1 − tol` count as shared directions.
pub const INTERSECTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelBlock {
    /// `None` for the singleton root block `{e_root}`.
    pub parent: Option<VertexId>,
    /// Depth of the block's support.
    pub generation: usize,
    /// Indices into [`KernelBasis::vectors`].
    pub range: Range<usize>,
}

/// Orthonormal basis of `ker S*`, one block per parent vertex.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    vectors: Vec<TreeVector>,
    generation: Vec<usize>,
    blocks: Vec<KernelBlock>,
    interior_only: bool,
}

impl KernelBasis {
    pub fn vectors(&self) -> &[TreeVector] {
        &self.vectors
    }

    pub fn blocks(&self) -> &[KernelBlock] {
        &self.blocks
    }

    pub fn total_dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn generation_of(&self, i: usize) -> usize {
        self.generation[i]
    }

    pub fn interior_only(&self) -> bool {
        self.interior_only
    }

    pub fn block_of_parent(&self, parent: Option<VertexId>) -> Option<&KernelBlock> {
        self.blocks.iter().find(|b| b.parent == parent)
    }

    /// `⟨f, g_i⟩` for every basis vector.
    pub fn coefficients(&self, f: &TreeVector) -> Result<Vec<Complex64>> {
        self.vectors.iter().map(|g| f.inner(g)).collect()
    }

    /// Orthogonal projection onto the span of the basis.
    pub fn project(&self, f: &TreeVector) -> Result<TreeVector> {
        let mut out = f.zeros_like();
        for g in &self.vectors {
            let c = f.inner(g)?;
            if c != Complex64::default() {
                out = out.axpy(c, g)?;
            }
        }
        Ok(out)
    }
}

/// Blocked orthonormal basis of `ker S* = span{e_root} ⊕ ⨁_u {f on Chi(u) : Σ λ_v f(v) = 0}`.
///
/// With `interior_only` on an infinite-tree truncation, blocks living on the
/// boundary generation are left out: their images under `S` are cut off.
pub fn kernel_basis(s: &TruncatedShift, interior_only: bool) -> KernelBasis {
    let tree = s.tree();
    let d = tree.max_depth();
    let skip_boundary = interior_only && !tree.is_finite();
    let mut vectors = vec![TreeVector::basis(tree, VertexId::ROOT).unwrap()];
    let mut generation = vec![0];
    let mut blocks = vec![KernelBlock {
        parent: None,
        generation: 0,
        range: 0..1,
    }];
    for u in tree.vertices() {
        let children = tree.children(u);
        let gen = tree.depth(u) + 1;
        if children.is_empty() || (skip_boundary && gen >= d) {
            continue;
        }
        let lam2: f64 = children.iter().map(|&c| s.lambda(c).powi(2)).sum();
        let candidates: Vec<TreeVector> = if lam2 == 0.0 {
            children
                .iter()
                .map(|&c| TreeVector::basis(tree, c).unwrap())
                .collect()
        } else {
            children
                .iter()
                .map(|&ci| {
                    let scale = s.lambda(ci) / lam2;
                    TreeVector::from_entries(
                        tree,
                        children.iter().map(|&c| {
                            let delta = if c == ci { 1.0 } else { 0.0 };
                            (c, Complex64::new(delta - scale * s.lambda(c), 0.0))
                        }),
                    )
                    .unwrap()
                })
                .collect()
        };
        // candidates are projections of unit vectors, so norms are judged against 1
        let block = orthonormalize_with_floor(&candidates, BLOCK_RANK_TOL, 1.0);
        if block.is_empty() {
            continue;
        }
        let start = vectors.len();
        generation.extend(std::iter::repeat_n(gen, block.len()));
        vectors.extend(block);
        blocks.push(KernelBlock {
            parent: Some(u),
            generation: gen,
            range: start..vectors.len(),
        });
    }
    KernelBasis {
        vectors,
        generation,
        blocks,
        interior_only,
    }
}

/// Projection onto `ker S*` (interior blocks).
pub fn project_kernel(s: &TruncatedShift, f: &TreeVector) -> Result<TreeVector> {
    f.ensure_on(s.tree())?;
    kernel_basis(s, true).project(f)
}

/// Modified Gram–Schmidt with one reorthogonalization pass. A vector is
/// dropped when what survives is at most `rank_tol` times the largest input norm.
pub fn orthonormalize(vectors: &[TreeVector], rank_tol: f64) -> Vec<TreeVector> {
    let scale = vectors.iter().map(TreeVector::norm).fold(0.0, f64::max);
    orthonormalize_with_floor(vectors, rank_tol, scale)
}

fn orthonormalize_with_floor(vectors: &[TreeVector], rank_tol: f64, floor: f64) -> Vec<TreeVector> {
    let mut out: Vec<TreeVector> = Vec::new();
    for v in vectors {
        let original = v.norm().max(floor);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = w.inner(q).unwrap();
                if c != Complex64::default() {
                    w = w.axpy(-c, q).unwrap();
                }
            }
        }
        let nw = w.norm();
        if nw > rank_tol * original {
            out.push(w.scale(Complex64::new(1.0 / nw, 0.0)));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct WoldComponents {
    /// `f_0, …, f_H`, each in `ker S*`.
    pub components: Vec<TreeVector>,
    /// What the horizon and the truncation could not place.
    pub residual: TreeVector,
    pub horizon: usize,
}

impl WoldComponents {
    pub fn new(components: Vec<TreeVector>, residual: TreeVector) -> Self {
        let horizon = components.len().saturating_sub(1);
        Self {
            components,
            residual,
            horizon,
        }
    }
}

fn ensure_peelable(s: &TruncatedShift, horizon: usize) -> Result<()> {
    let tree = s.tree();
    let report = s.injectivity();
    if !report.injective {
        return Err(Error::NonInjective {
            vertex: report.argmin,
            norm: report.min_column_norm,
        });
    }
    if report.has_leaves {
        let leaf = tree
            .vertices()
            .find(|&u| tree.children(u).is_empty())
            .unwrap_or(VertexId::ROOT);
        return Err(Error::NonInjective {
            vertex: leaf,
            norm: 0.0,
        });
    }
    if horizon > tree.max_depth() {
        return Err(Error::HorizonExceeded {
            vertex: VertexId::ROOT,
            power: horizon,
            reach: horizon,
            max_depth: tree.max_depth(),
        });
    }
    Ok(())
}

/// Peels `f` into `f_0 + S f_1 + … + S^H f_H + residual`, `f_n ∈ ker S*`.
///
/// `f_n = P r_n`, `r_{n+1} = S⁺(r_n − f_n)` with `S⁺ = (S*S)⁻¹S*` diagonal.
/// Whatever `S r_{n+1}` fails to reproduce of `r_n − f_n` is carried into the
/// residual as `Sⁿ(leak)`, together with `S^H(r_H − f_H)`.
pub fn peel(s: &TruncatedShift, f: &TreeVector, horizon: usize) -> Result<WoldComponents> {
    peel_with(s, &kernel_basis(s, true), f, horizon)
}

pub fn peel_with(
    s: &TruncatedShift,
    basis: &KernelBasis,
    f: &TreeVector,
    horizon: usize,
) -> Result<WoldComponents> {
    f.ensure_on(s.tree())?;
    ensure_peelable(s, horizon)?;
    let mut components = Vec::with_capacity(horizon + 1);
    let mut residual = f.zeros_like();
    let mut r = f.clone();
    for n in 0..=horizon {
        let fn_ = basis.project(&r)?;
        let d = r.sub(&fn_)?;
        components.push(fn_);
        if n == horizon {
            residual = residual.add(&s.apply_shift_pow(&d, n)?)?;
            break;
        }
        let next = s.apply_left_inverse(&d)?;
        let leak = d.sub(&s.apply_shift(&next)?)?;
        if !leak.is_zero() {
            residual = residual.add(&s.apply_shift_pow(&leak, n)?)?;
        }
        r = next;
    }
    Ok(WoldComponents::new(components, residual))
}

/// `f_0 + S(f_1 + S(f_2 + …)) + residual`.
pub fn reconstruct(s: &TruncatedShift, c: &WoldComponents) -> Result<TreeVector> {
    let tree = s.tree();
    c.residual.ensure_on(tree)?;
    let mut acc = TreeVector::zeros(tree);
    for f in c.components.iter().rev() {
        f.ensure_on(tree)?;
        acc = f.add(&s.apply_shift(&acc)?)?;
    }
    acc.add(&c.residual)
}

/// A pair of vertices whose norms should agree and do not.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceWitness {
    pub u: VertexId,
    pub v: VertexId,
    pub power: usize,
    pub norm_u: f64,
    pub norm_v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceReport {
    pub holds: bool,
    pub witness: Option<BalanceWitness>,
}

impl BalanceReport {
    fn from_witness(witness: Option<BalanceWitness>) -> Self {
        Self {
            holds: witness.is_none(),
            witness,
        }
    }
}

const BALANCE_TOL: f64 = 1e-10;

fn largest_power(s: &TruncatedShift, u: VertexId, max_n: usize) -> usize {
    match s.horizon(u) {
        Some(h) => h.min(max_n),
        None => max_n,
    }
}

fn power_norm_or_zero(s: &TruncatedShift, u: VertexId, n: usize) -> f64 {
    // finite trees: powers past the leaves are zero
    s.power_norm(u, n).unwrap_or(0.0)
}

/// `‖S e_u‖` constant on each generation (interior vertices).
pub fn is_balanced(s: &TruncatedShift) -> BalanceReport {
    generation_power_witness(s, 1)
}

/// `‖Sⁿ e_u‖` constant on each generation for `1 ≤ n ≤ max_n`, wherever `Sⁿ e_u`
/// stays inside the truncation.
pub fn generation_power_witness(s: &TruncatedShift, max_n: usize) -> BalanceReport {
    let tree = s.tree();
    let tol = Tolerance::relative(BALANCE_TOL);
    for gen in 0..tree.max_depth() {
        let mut members = tree.generation(gen);
        let Some(first) = members.next() else {
            continue;
        };
        let reach = largest_power(s, first, max_n);
        for v in members {
            for n in 1..=reach {
                let a = power_norm_or_zero(s, first, n);
                let b = power_norm_or_zero(s, v, n);
                if !tol.close(a, b) {
                    return BalanceReport::from_witness(Some(BalanceWitness {
                        u: first,
                        v,
                        power: n,
                        norm_u: a,
                        norm_v: b,
                    }));
                }
            }
        }
    }
    BalanceReport::from_witness(None)
}

/// Siblings share `‖Sⁿ e_u‖` for `1 ≤ n ≤ max_n` within both horizons.
pub fn is_locally_power_balanced(s: &TruncatedShift, max_n: usize) -> BalanceReport {
    let tree = s.tree();
    let tol = Tolerance::relative(BALANCE_TOL);
    for u in tree.vertices() {
        let children = tree.children(u);
        let Some((&first, rest)) = children.split_first() else {
            continue;
        };
        let reach = largest_power(s, first, max_n);
        for &v in rest {
            for n in 1..=reach {
                let a = power_norm_or_zero(s, first, n);
                let b = power_norm_or_zero(s, v, n);
                if !tol.close(a, b) {
                    return BalanceReport::from_witness(Some(BalanceWitness {
                        u: first,
                        v,
                        power: n,
                        norm_u: a,
                        norm_v: b,
                    }));
                }
            }
        }
    }
    BalanceReport::from_witness(None)
}

/// `⟨Sⁿ g, Sᵐ h⟩`.
pub fn wold_pairing(
    s: &TruncatedShift,
    n: usize,
    g: &TreeVector,
    m: usize,
    h: &TreeVector,
) -> Result<Complex64> {
    s.apply_shift_pow(g, n)?.inner(&s.apply_shift_pow(h, m)?)
}

/// Sparse Gram matrix `G[i][j] = ⟨Sⁿ g_i, Sᵐ g_j⟩` over the basis vectors whose
/// images stay inside the truncation.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub n: usize,
    pub m: usize,
    /// Basis indices labelling rows and columns.
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl GramMatrix {
    /// Entry at (row position, column position).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|G[i][j] − δ_{ij}|` when rows and columns share the basis labels.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(i, j), &c) in &self.entries {
            let target = if self.rows[i] == self.cols[j] {
                1.0
            } else {
                0.0
            };
            worst = worst.max((c - target).norm());
        }
        for (i, &r) in self.rows.iter().enumerate() {
            if let Some(j) = self.cols.iter().position(|&c| c == r) {
                if !self.entries.contains_key(&(i, j)) {
                    worst = worst.max(1.0);
                }
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows.len(), self.cols.len(), |i, j| self.get(i, j))
    }
}

fn check_power(s: &TruncatedShift, n: usize) -> Result<()> {
    let tree = s.tree();
    if !tree.is_finite() && n > tree.max_depth() {
        return Err(Error::HorizonExceeded {
            vertex: VertexId::ROOT,
            power: n,
            reach: n,
            max_depth: tree.max_depth(),
        });
    }
    Ok(())
}

fn within_horizon(s: &TruncatedShift, basis: &KernelBasis, n: usize) -> Vec<usize> {
    let tree = s.tree();
    (0..basis.total_dim())
        .filter(|&i| tree.is_finite() || basis.generation_of(i) + n <= tree.max_depth())
        .collect()
}

pub fn wold_gram(
    s: &TruncatedShift,
    n: usize,
    m: usize,
    basis: &KernelBasis,
) -> Result<GramMatrix> {
    check_power(s, n)?;
    check_power(s, m)?;
    let rows = within_horizon(s, basis, n);
    let cols = within_horizon(s, basis, m);
    // vertex -> (column position, value of Sᵐ h_j there)
    let mut by_vertex: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
    for (j, &b) in cols.iter().enumerate() {
        for (v, c) in s.apply_shift_pow(&basis.vectors()[b], m)?.iter() {
            by_vertex.entry(v.0).or_default().push((j, c));
        }
    }
    let mut entries = BTreeMap::new();
    for (i, &a) in rows.iter().enumerate() {
        let image = s.apply_shift_pow(&basis.vectors()[a], n)?;
        for (v, c) in image.iter() {
            if let Some(list) = by_vertex.get(&v.0) {
                for &(j, d) in list {
                    *entries.entry((i, j)).or_insert_with(Complex64::default) += c * d.conj();
                }
            }
        }
    }
    entries.retain(|_, c| *c != Complex64::default());
    Ok(GramMatrix {
        n,
        m,
        rows,
        cols,
        entries,
    })
}

/// Orthonormal basis of `Sⁿ(ker S*)` restricted to basis vectors within the
/// horizon, grouped by target generation (different generations are orthogonal).
fn image_groups(
    s: &TruncatedShift,
    n: usize,
    basis: &KernelBasis,
) -> Result<BTreeMap<usize, Vec<TreeVector>>> {
    check_power(s, n)?;
    let mut raw: BTreeMap<usize, Vec<TreeVector>> = BTreeMap::new();
    for i in within_horizon(s, basis, n) {
        let image = s.apply_shift_pow(&basis.vectors()[i], n)?;
        raw.entry(basis.generation_of(i) + n)
            .or_default()
            .push(image);
    }
    Ok(raw
        .into_iter()
        .map(|(g, vs)| (g, orthonormalize(&vs, IMAGE_RANK_TOL)))
        .filter(|(_, q)| !q.is_empty())
        .collect())
}

/// Numerical dimension of `Sⁿ(ker S*)`.
pub fn image_dim(s: &TruncatedShift, n: usize, basis: &KernelBasis) -> Result<usize> {
    Ok(image_groups(s, n, basis)?.values().map(Vec::len).sum())
}

/// Number of principal angles between `Sⁿ(ker S*)` and `Sᵐ(ker S*)` whose
/// cosine is at least `1 − tol`.
pub fn image_intersection_dim(
    s: &TruncatedShift,
    n: usize,
    m: usize,
    basis: &KernelBasis,
    tol: f64,
) -> Result<usize> {
    if n == m {
        return Err(Error::InvalidParams(
            "intersection of a factor with itself".into(),
        ));
    }
    let a = image_groups(s, n, basis)?;
    let b = image_groups(s, m, basis)?;
    let mut dim = 0;
    for (g, qa) in &a {
        let Some(qb) = b.get(g) else { continue };
        let cross = DMatrix::from_fn(qa.len(), qb.len(), |i, j| qa[i].inner(&qb[j]).unwrap());
        dim += cross
            .singular_values()
            .iter()
            .filter(|&&c| c >= 1.0 - tol)
            .count();
    }
    Ok(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::DirectedTree;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shift(n: usize, edges: &[(usize, usize)], lambda: Vec<f64>, finite: bool) -> TruncatedShift {
        let tree = DirectedTree::from_edges(n, edges, vec![None; n], finite)
            .unwrap()
            .tree;
        TruncatedShift::from_weights(tree, lambda).unwrap()
    }

    /// Two rays of length 3, upper weights 1, lower weights `alpha`.
    fn two_rays(alpha: f64) -> TruncatedShift {
        let edges = [(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (4, 6)];
        shift(
            7,
            &edges,
            vec![0.0, 1.0, alpha, 1.0, alpha, 1.0, alpha],
            false,
        )
    }

    #[test]
    fn chain_kernel_is_root_only() {
        let s = shift(
            4,
            &[(0, 1), (1, 2), (2, 3)],
            vec![0.0, 1.0, 1.0, 1.0],
            false,
        );
        let b = kernel_basis(&s, true);
        assert_eq!(b.total_dim(), 1);
        assert_eq!(
            b.vectors()[0],
            TreeVector::basis(s.tree(), VertexId(0)).unwrap()
        );
    }

    #[test]
    fn two_ray_kernel_direction() {
        let alpha = 0.5;
        let s = two_rays(alpha);
        let b = kernel_basis(&s, true);
        assert_eq!(b.total_dim(), 2);
        let g = &b.vectors()[1];
        let norm = (1.0 + alpha * alpha).sqrt();
        assert!((g.get(VertexId(1)) - c(alpha / norm)).norm() < 1e-15);
        assert!((g.get(VertexId(2)) - c(-1.0 / norm)).norm() < 1e-15);
        // projection of e_(2,1)
        let p = b
            .project(&TreeVector::basis(s.tree(), VertexId(2)).unwrap())
            .unwrap();
        assert!((p.get(VertexId(1)) - c(-0.8 * alpha)).norm() < 1e-15);
        assert!((p.get(VertexId(2)) - c(0.8)).norm() < 1e-15);
    }

    #[test]
    fn zero_weights_give_full_block() {
        let s = shift(4, &[(0, 1), (0, 2), (0, 3)], vec![0.0, 0.0, 0.0, 0.0], true);
        let b = kernel_basis(&s, true);
        assert_eq!(b.total_dim(), 4);
        let s = shift(4, &[(0, 1), (0, 2), (0, 3)], vec![0.0, 1.0, 0.0, 2.0], true);
        let b = kernel_basis(&s, true);
        assert_eq!(b.total_dim(), 3);
        for g in b.vectors() {
            assert!(s.apply_adjoint(g).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn interior_only_drops_boundary_blocks() {
        let edges = [(0, 1), (1, 2), (1, 3)];
        let s = shift(4, &edges, vec![0.0, 1.0, 1.0, 2.0], false);
        assert_eq!(kernel_basis(&s, true).total_dim(), 1);
        assert_eq!(kernel_basis(&s, false).total_dim(), 2);
    }

    #[test]
    fn peel_root_and_round_trip() {
        let s = two_rays(0.5);
        let t = s.tree();
        let e0 = TreeVector::basis(t, VertexId(0)).unwrap();
        let w = peel(&s, &e0, 3).unwrap();
        assert_eq!(w.components.len(), 4);
        assert_eq!(w.components[0], e0);
        assert!(w.components[1..].iter().all(TreeVector::is_zero));
        assert!(w.residual.is_zero());

        let f = TreeVector::from_fn(t, |v| Complex64::new(v.0 as f64 - 2.0, 0.5));
        let w = peel(&s, &f, 3).unwrap();
        let back = reconstruct(&s, &w).unwrap();
        assert!(back.sub(&f).unwrap().norm() < 1e-12);
        for comp in &w.components {
            assert!(s.apply_adjoint(comp).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn peel_refuses_non_injective_and_deep_horizons() {
        let s = shift(3, &[(0, 1), (1, 2)], vec![0.0, 0.0, 1.0], false);
        let f = TreeVector::zeros(s.tree());
        assert!(matches!(peel(&s, &f, 1), Err(Error::NonInjective { .. })));
        let s = two_rays(0.5);
        let f = TreeVector::zeros(s.tree());
        assert!(matches!(
            peel(&s, &f, 4),
            Err(Error::HorizonExceeded { .. })
        ));
        let broom = shift(3, &[(0, 1), (0, 2)], vec![0.0, 1.0, 1.0], true);
        let f = TreeVector::zeros(broom.tree());
        assert!(matches!(
            peel(&broom, &f, 1),
            Err(Error::NonInjective { .. })
        ));
    }

    #[test]
    fn balance_predicates() {
        let s = two_rays(0.5);
        let r = is_balanced(&s);
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!((w.u, w.v), (VertexId(1), VertexId(2)));
        assert_eq!((w.norm_u, w.norm_v), (1.0, 0.5));
        assert!(!is_locally_power_balanced(&s, 3).holds);
        let s = two_rays(1.0);
        assert!(is_balanced(&s).holds);
        assert!(is_locally_power_balanced(&s, 3).holds);
    }

    #[test]
    fn two_ray_pairing_value() {
        let alpha = 0.5;
        let s = two_rays(alpha);
        let t = s.tree();
        let e0 = TreeVector::basis(t, VertexId(0)).unwrap();
        let g =
            TreeVector::from_entries(t, [(VertexId(1), c(alpha)), (VertexId(2), c(-1.0))]).unwrap();
        let p = wold_pairing(&s, 2, &e0, 1, &g).unwrap();
        assert!((p - c(alpha - alpha.powi(3))).norm() < 1e-15);
        let basis = kernel_basis(&s, true);
        let g0 = wold_gram(&s, 0, 0, &basis).unwrap();
        assert!(g0.max_deviation_from_identity() < 1e-15);
        let g21 = wold_gram(&s, 2, 1, &basis).unwrap();
        let scaled = (alpha - alpha.powi(3)) / (1.0 + alpha * alpha).sqrt();
        assert!((g21.max_abs_entry() - scaled).abs() < 1e-15);
    }

    #[test]
    fn broom_and_leaf_images() {
        let broom = shift(
            4,
            &[(0, 1), (0, 2), (0, 3)],
            vec![0.0, 1.0, 0.5, 0.25],
            true,
        );
        let b = kernel_basis(&broom, true);
        assert_eq!(image_dim(&broom, 1, &b).unwrap(), 1);
        assert_eq!(image_dim(&broom, 2, &b).unwrap(), 0);
        assert_eq!(
            image_intersection_dim(&broom, 1, 2, &b, INTERSECTION_TOL).unwrap(),
            0
        );
        let leafy = shift(
            5,
            &[(0, 1), (0, 2), (0, 3), (1, 4)],
            vec![0.0, 1.0, 0.5, 0.25, 2.0],
            true,
        );
        let b = kernel_basis(&leafy, true);
        assert_eq!(image_dim(&leafy, 1, &b).unwrap(), 2);
        assert_eq!(image_dim(&leafy, 2, &b).unwrap(), 1);
        assert_eq!(image_dim(&leafy, 3, &b).unwrap(), 0);
        assert_eq!(
            image_intersection_dim(&leafy, 1, 2, &b, INTERSECTION_TOL).unwrap(),
            1
        );
        assert!(image_intersection_dim(&leafy, 1, 1, &b, INTERSECTION_TOL).is_err());
    }

    #[test]
    fn orthonormalize_drops_dependent_vectors() {
        let s = two_rays(0.5);
        let t = s.tree();
        let a = TreeVector::basis(t, VertexId(1)).unwrap();
        let b = a.scale(c(3.0));
        let z = TreeVector::zeros(t);
        let q = orthonormalize(&[a, b, z], 1e-12);
        assert_eq!(q.len(), 1);
    }
}
