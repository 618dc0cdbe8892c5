//! Twisted leafwise Hodge theory on finite-dimensional bigraded models of
//! foliated manifolds.
//!
//! Linear algebra is generic over [`Scalar`]: exact Gaussian rationals or
//! complex floats.

pub mod complex;
pub mod diamond;
pub mod error;
mod float;
pub mod gaussian;
pub mod hodge;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod morphism;
pub mod report;
pub mod scalar;
pub mod star;
pub mod twist;

pub use complex::{BigradedComplex, Diagnostic, LeafwiseForm};
pub use error::Error;
pub use gaussian::GaussianRational;
pub use diamond::{equality_classes, render_diamond};
pub use hodge::{betti, betti_table, harmonic_basis, hodge_decompose, hodge_diamond, HodgeDecomposition, HodgeDiamond};
pub use matrix::Matrix;
pub use models::fcx::{load_model, load_model_with, save_model, FcxModel, LoadMode, LoadedModel};
pub use models::tensor::{build_tensor_model, LeafComplex, TensorModel, TensorModelSpec};
pub use models::torus::{build_torus_model, TorusModel, TorusModelSpec};
pub use morphism::{
    compose, conjugated_twist, induced_map, is_leafwise_exact, leafwise_exactness, verify_homotopy_factor,
    verify_intertwiner, verify_morphism, ComplexMorphism, MorphismKind,
};
pub use report::{IdentityRecord, Report};
pub use num_complex::Complex;
pub use scalar::{Backend, Scalar};
pub use star::{
    check_diamond_symmetries, check_harmonic_transport, check_laplacian_conjugations, check_sign_identities,
    check_transverse_conjugation, Orientation, StarOperators,
};
pub use twist::{make_twist, TwistData, TwistedComplex};

/// Exact scalar: Gaussian rationals `a + bi`, `a, b` in Q.
pub type Exact = GaussianRational;
/// Double precision complex scalar.
pub type Float = Complex<f64>;
/// Single precision complex scalar.
pub type Float32 = Complex<f32>;

pub type ExactMatrix = Matrix<Exact>;
pub type FloatMatrix = Matrix<Float>;
pub type ExactComplex = BigradedComplex<Exact>;
pub type FloatComplex = BigradedComplex<Float>;
pub type ExactTwisted = TwistedComplex<Exact>;
pub type FloatTwisted = TwistedComplex<Float>;
