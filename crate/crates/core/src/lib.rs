//! Numerics for Dirichlet-type spaces `D_α` on the unit bidisc.
//!
//! A function `f(z, w) = Σ a_{k,l} z^k w^l` lies in `D_α`, `α = (α₁, α₂)`, when
//! `‖f‖²_α = Σ |a_{k,l}|² (k+1)^{α₁} (l+1)^{α₂}` is finite. Everything here
//! works on truncated coefficient grids; claims about infinite series are
//! checked as trends over growing truncations (see [`harness`]).

pub mod error;
pub mod harness;
pub mod integral;
pub mod io;
pub mod multiplier;
pub mod quadrature;
pub mod series;
pub mod space;
pub mod special;

pub use error::{Error, Result};
pub use series::{generate, tensor_product, FamilyId, NamedFamily, TruncatedSeries, UnivariateSeries, C64};
pub use space::{compare, inner_product, norm, weight_at, FunctionalNormResult, PartialOrderResult, WeightVector};
