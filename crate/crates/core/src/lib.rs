//! Cyclotomic zeta functions of invertible polynomials, their roots and
//! Berglund–Hübsch duality checks.

pub mod cyclo;
pub mod duality;
pub mod error;
pub mod geomroot;
pub mod intmat;
pub mod invpoly;
pub mod report;
pub mod zeta;

pub use cyclo::{root_steps, CyclotomicFunction};
pub use error::{Error, Result};
pub use invpoly::{
    parse_polynomial, Atom, AtomicDecomposition, InvertiblePolynomial, ParseOptions, WeightSystem,
};
