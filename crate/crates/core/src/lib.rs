pub mod bkp;
pub mod coord;
pub mod diffpoly;
pub mod equivalence;
pub mod error;
pub mod kp;
pub mod linsys;
pub mod psdo;
pub mod reconstruct;

pub use coord::{CoordinateMap, EpsRule};
pub use diffpoly::{DiffPoly, Family, JetVariable, Monomial, Rational};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/diffpoly.md")]
    mod diffpoly {}
    #[doc = include_str!("../../../book/src/psdo.md")]
    mod psdo {}
    #[doc = include_str!("../../../book/src/hierarchies.md")]
    mod hierarchies {}
    #[doc = include_str!("../../../book/src/normal-coordinates.md")]
    mod normal_coordinates {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/equivalence.md")]
    mod equivalence {}
}
