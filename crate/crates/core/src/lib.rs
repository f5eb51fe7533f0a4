//! Exact fractional-part correlations, Möbius/Mertens sieves and the
//! Möbius-weighted series built from them.
//!
//! * [`arithmetic`]: linear sieve for μ, M, ω and J₂, plus the `MUV1` cache.
//! * [`exact`]: breakpoint integration of E_X({nx}{mx}) and floor moments.
//! * [`series`]: sine-series partial sums and the off-diagonal double sum S(N).
//! * [`tails`]: truncated Mertens tail integrals and finite Abel summation.
//! * [`cli`] / [`verify`]: CSV emitters and the acceptance suite.
//!
//! Loops over N are data-parallel through rayon when the default `parallel`
//! feature is on; see [`exec`] for the deterministic reduction they share.

pub mod arithmetic;
pub mod cli;
pub mod error;
pub mod exact;
pub mod exec;
pub mod format;
pub mod oracle;
pub mod series;
pub mod tails;
pub mod verify;

pub use arithmetic::{build_tables, MoebiusTable, PartialSum};
pub use error::{Error, Result};
pub use exact::{CorrelationValue, Method, Rational};
pub use exec::Execution;
pub use series::{SeriesPoint, SeriesValue};
pub use tails::TailReport;
