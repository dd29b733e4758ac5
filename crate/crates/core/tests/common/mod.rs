#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::{
    make, Branching, Complex64, Family, GallerySpec, Symbol, TreeVector, TrigPoly, TruncatedShift,
    VertexId,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_shift(seed: u64, depth: usize, max_branching: usize) -> TruncatedShift {
    make(&GallerySpec::new(
        Family::Random {
            seed,
            branching: Branching {
                min: 1,
                max: max_branching,
            },
            weight_range: (0.5, 2.0),
        },
        Some(depth),
    ))
    .unwrap()
}

pub fn gallery(family: Family, depth: Option<usize>) -> TruncatedShift {
    make(&GallerySpec::new(family, depth)).unwrap()
}

pub fn t2(alpha: f64, depth: usize) -> TruncatedShift {
    gallery(Family::T2 { alpha }, Some(depth))
}

pub fn mad(depth: usize) -> TruncatedShift {
    gallery(Family::Mad {}, Some(depth))
}

pub fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(s: &TruncatedShift, rng: &mut ChaCha8Rng) -> TreeVector {
    TreeVector::from_fn(s.tree(), |_| complex(rng))
}

pub fn unit_vector(s: &TruncatedShift, rng: &mut ChaCha8Rng) -> TreeVector {
    let f = random_vector(s, rng);
    let n = f.norm();
    f.scale(Complex64::new(1.0 / n, 0.0))
}

/// Random vector supported on generations `< D`.
pub fn interior_vector(s: &TruncatedShift, rng: &mut ChaCha8Rng) -> TreeVector {
    let d = s.max_depth();
    let t = s.tree();
    TreeVector::from_fn(t, |v| {
        if t.depth(v) < d {
            complex(rng)
        } else {
            Complex64::default()
        }
    })
}

pub fn random_symbol(rng: &mut ChaCha8Rng, k_max: usize) -> Symbol {
    Symbol::from_coeffs((0..=k_max).map(|_| complex(rng)).collect())
}

pub fn random_trig(rng: &mut ChaCha8Rng, degree: usize) -> TrigPoly {
    let d = degree as i64;
    TrigPoly::new((-d..=d).map(|k| (k, complex(rng))))
}

pub fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `S` written out entry by entry: `S[v][u] = λ_v` when `u` is the parent of `v`.
pub fn dense_shift(s: &TruncatedShift) -> DMatrix<Complex64> {
    let t = s.tree();
    let n = t.n_vertices();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        if let Some(u) = t.parent(VertexId(v)) {
            m[(v, u.0)] = Complex64::new(s.weights().as_slice()[v], 0.0);
        }
    }
    m
}

/// `Σ_k φ̂(k) Sᵏ` by dense matrix powers.
pub fn dense_multiplier(s: &TruncatedShift, phi: &Symbol) -> DMatrix<Complex64> {
    let sm = dense_shift(s);
    let n = sm.nrows();
    let mut power = DMatrix::<Complex64>::identity(n, n);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..=phi.degree() {
        out += &power * phi.value(k);
        power = &sm * &power;
    }
    out
}

pub fn dense(f: &TreeVector) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_vec(f.to_dense())
}

pub fn max_abs_diff(a: &TreeVector, b: &nalgebra::DVector<Complex64>) -> f64 {
    a.to_dense()
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
