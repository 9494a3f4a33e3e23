//! Chart-level tensor calculus driven by forward-mode jets.
//!
//! Fields are programs over an abstract scalar ring ([`ring::Ring`]); running
//! the same program over [`jet::Jet2`] inputs yields exact first and second
//! coordinate derivatives, which feed Christoffel symbols, the Riemann and
//! Ricci tensors, curvature-operator spectra, Lie derivatives, brackets,
//! exterior derivatives and pullback residuals — everything needed to
//! machine-check metric identities on explicit charts.
//!
//! Everything is pure and `Send + Sync`: a field and a point determine the
//! result, so point batches can be fanned out across threads freely.

pub mod error;
pub mod field;
pub mod jet;
pub mod ops;
pub mod ring;
pub mod testing;

pub use error::{CalcError, Result};
pub use field::{
    contract_field, d_field, lie_field, lincomb_field, AffineVectorField, Chart, ChartMap,
    ConstField, FieldEval, FieldExpr, FirstJets, IdentityMap, Point, QuadraticScalarField,
    TensorFieldSpec, Valence,
};
pub use jet::{jet1_vars, jet2_vars, Jet1, Jet2};
pub use ops::{
    christoffel, contract, curvature_operator, exterior_derivative, generalized_sym_eigenvalues,
    invert_metric, lie_bracket, lie_derivative, nijenhuis_sup, pullback_residual, ricci_scalar,
    riemann, sup_norm, sup_slice, sym_product, CurvatureOperator, Tensor3, Tensor4,
};
pub use ring::Ring;
