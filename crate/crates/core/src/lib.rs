//! Gamma-power moment sequences `s_n = [Γ(an+b)/Γ(b)]^c`, the densities
//! `e_c(a,b)` of the product-convolution semigroup they generate, and the
//! Gumbel convolution roots `g_c(a,b)` on the real line.
//!
//! ```
//! use gammasg::{density, moment, SemigroupParams};
//!
//! let p = SemigroupParams::new(1.0, 1.0, 2.0)?;
//! assert_eq!(moment(&p, 3)?, 36.0);
//! assert!(density(&p, 1.0)?.value > 0.0);
//! # Ok::<(), gammasg::Error>(())
//! ```
//!
//! The guide in `book/` walks through every module; its code blocks are
//! compiled and run as doc-tests of this crate.

// `!(x > 0.0)` is how NaN is rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes and series coefficients are kept as published.
#![allow(clippy::excessive_precision)]

pub mod asympt;
pub mod density;
pub mod error;
pub mod gumbel;
pub mod moments;
pub mod quad;
pub mod semigroup;
pub mod specfun;
pub mod verify;

pub use density::{density, density_ln, DensityValue, Method, SemigroupParams};
pub use error::{Error, Result};
pub use moments::{classify, moment};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/gumbel.md")]
    mod gumbel {}
    #[doc = include_str!("../../../book/src/semigroup.md")]
    mod semigroup {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
