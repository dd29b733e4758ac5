//! Bounded weighted shifts on depth-truncated rooted directed trees.
//!
//! A tree is truncated at a generation depth `D`; the shift
//! `(S f)(v) = λ_v f(par v)` then becomes an exact finite matrix whose adjoint
//! is `(S* f)(u) = Σ_{v ∈ Chi(u)} λ_v f(v)`. On top of that the crate provides
//! multiplication operators `M_φ̂ = Σ φ̂(k) Sᵏ`, Fejér approximation, circle
//! integrals, the Wold-type decomposition over `ker S*`, and a gallery of
//! named shifts.

pub mod error;
pub mod gallery;
pub mod multiplier;
pub mod ops;
pub mod spec_file;
pub mod tol;
pub mod tree;
pub mod vector;
pub mod wold;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use gallery::{
    mad_divergence_partial_sum, make, path_radius_estimate, path_restriction, random_balanced,
    t2_vertex, two_ray_expected_gamma, two_ray_harmonic_vector, two_ray_peel_report, Branching,
    ClassicalWeights, Family, GallerySpec, TwoRayRow,
};
pub use multiplier::{
    circle_pair_integral, circle_pair_integral_with_nodes, default_quadrature_nodes, fejer_symbol,
    gamma_adjoint_apply, gamma_apply, hadamard, mult_column, multiplier_norm_lower_bound,
    rotate_symbol, rotate_vector, sot_error_profile, ErrorProfile, ErrorRow, Symbol, SymbolKind,
    SymbolRule, TrigPoly,
};
pub use ops::{InjectivityReport, NormSup, TruncatedShift, WeightSystem};
pub use spec_file::{build_shift, build_tree, ExplicitTree, ShiftSpec};
pub use tol::Tolerance;
pub use tree::{BuiltTree, DirectedTree, PathSelector, VertexId};
pub use vector::TreeVector;
pub use wold::{
    generation_power_witness, image_dim, image_intersection_dim, is_balanced,
    is_locally_power_balanced, kernel_basis, orthonormalize, peel, peel_with, project_kernel,
    reconstruct, wold_gram, wold_pairing, BalanceReport, BalanceWitness, GramMatrix, KernelBasis,
    KernelBlock, WoldComponents,
};
