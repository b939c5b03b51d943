pub mod cartan;
pub mod contact;
pub mod embeddings;
pub mod error;
pub mod field;
pub mod invariants;
pub mod forms;
pub mod linalg;
pub mod poisson;
pub mod restricted;
pub mod suite;
pub mod tori;
pub mod truncpoly;
pub mod witt;

pub use error::{Error, Result};
pub use field::{fp_arith, FpOp, FpScalar, PrimeField};
pub use forms::{cartan_form, exterior_d, DiffForm, FormKind};
pub use linalg::{Echelon, Matrix};
pub use truncpoly::{monomial_basis, MultiIndex, Substitution, TruncPoly};
pub use witt::{witt_dim, Derivation};
pub use restricted::{PClosure, PPolynomial, RestrictedAlgebra, WittRealization};
pub use cartan::{build_family, Family, FamilyBuild, SubalgebraBasis};
pub use poisson::{hamiltonian_map, poisson_bracket, CenterKind, Poisson};
pub use contact::Contact;
pub use tori::{agt2_torus, weight_decomposition, weyl_substitution, Ambient, ThetaFrame, Torus, WeightDecomposition};
