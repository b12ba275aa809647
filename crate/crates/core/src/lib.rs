//! A laboratory for harmonic analysis over finite fields: Fourier,
//! extension and restriction operators on quadratic surfaces in `F_p^d`,
//! additive energy and incidences, quadratic form theory, Bochner-Riesz
//! geometry and the Kakeya maximal operator, together with a registry of
//! reproducible checks driven from the `fflab` binary.
//!
//! ```
//! use fflab::field::PrimeField;
//! use fflab::surfaces::{surface_measure_inverse_ft, Surface};
//!
//! let f = PrimeField::new(5).unwrap();
//! let s = Surface::hyperbolic_paraboloid(&f, 3).unwrap();
//! let k = surface_measure_inverse_ft(&s);
//! assert!((k.get(&[0, 0, 0]).re - 1.0).abs() < 1e-12);
//! ```

pub mod combinatorics;
pub mod error;
pub mod field;
pub mod fourier;
pub mod harness;
pub mod kakeya;
pub mod linalg;
pub mod qforms;
pub mod surfaces;

pub use error::{Error, Result};
pub use field::{FFunction, FFVector, Measure, PrimeField};
pub use surfaces::{Surface, SurfaceFunction};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod overview {}
    #[doc = include_str!("../../../book/src/fields.md")]
    pub mod fields {}
    #[doc = include_str!("../../../book/src/surfaces.md")]
    pub mod surfaces {}
    #[doc = include_str!("../../../book/src/energy.md")]
    pub mod energy {}
    #[doc = include_str!("../../../book/src/qforms.md")]
    pub mod qforms {}
    #[doc = include_str!("../../../book/src/kakeya.md")]
    pub mod kakeya {}
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
}
