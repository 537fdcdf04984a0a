//! Polynomial arithmetic: homogeneous forms, restriction to lines,
//! resultants, root extraction and interpolation.

pub mod interpolate;
pub mod json;
pub mod multi;
pub mod resultant;
pub mod roots;
pub mod scalar;
pub mod univariate;

pub use interpolate::{interpolate_vanishing_form, VanishingFit};
pub use multi::{monomial_count, monomials, ExactForm, Exponent, Form, HomogeneousForm, Poly};
pub use resultant::{determinant, resultant, sylvester_matrix};
pub use roots::{roots_with_multiplicities, roots_with_multiplicities_exact, RootCluster, RootDivisor};
pub use scalar::{rational, Rational, Scalar, C64};
pub use univariate::UPoly;
