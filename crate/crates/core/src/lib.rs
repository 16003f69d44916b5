//! Form factors of monodromy-matrix entries in GL(3)-invariant integrable
//! models, evaluated through determinant representations on on-shell Bethe
//! states, together with a brute-force SU(3) spin-chain oracle that checks
//! them.
//!
//! Layers, bottom up:
//!
//! - [`kernel`]: the rational functions `g, f, h, t` and set products.
//! - [`linalg`]: dense complex matrices with LU.
//! - [`model`]: `r1`, `r3`, eigenvalues, Bethe equations, Gaudin matrix.
//! - [`solver`]: damped Newton for (twisted) Bethe roots.
//! - [`formfactor`]: the determinant formulas and the identities behind them.
//! - [`oracle`]: explicit `3^L` Hilbert space for the inhomogeneous chain.

pub mod error;
pub mod formfactor;
pub mod kernel;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use formfactor::{form_factor, norm_squared, FFKind};
pub use kernel::{Func, Kernel};
pub use linalg::DenseComplexMatrix;
pub use model::{BetheState, ModelFunctions, RootConfig, Twist};
pub use num_complex::Complex64;
