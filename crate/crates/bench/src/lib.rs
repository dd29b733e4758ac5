//! Fixtures shared by the benchmarks.

use treeshift::{make, Branching, Complex64, Family, GallerySpec, TreeVector, TruncatedShift};

/// Seeded random shift with branching 1..=3.
pub fn random_shift(seed: u64, depth: usize) -> TruncatedShift {
    make(&GallerySpec::new(
        Family::Random {
            seed,
            branching: Branching { min: 1, max: 3 },
            weight_range: (0.5, 2.0),
        },
        Some(depth),
    ))
    .expect("random fixture builds")
}

/// Deterministic dense vector, zero on the boundary generation.
pub fn interior_ramp(s: &TruncatedShift) -> TreeVector {
    let t = s.tree();
    let d = s.max_depth();
    TreeVector::from_fn(t, |v| {
        if t.depth(v) < d {
            let i = v.index() as f64;
            Complex64::new((0.37 * i).sin(), (0.11 * i).cos())
        } else {
            Complex64::default()
        }
    })
}
