//! Exact enumeration and asymptotics for k-noncrossing diagrams.
//!
//! Every generating function is a [`series::TruncatedSeries`] or
//! [`marked::MarkedSeries`] over exact rationals and is checked against the
//! brute-force enumerator in [`diagram`].

pub mod arcstats;
pub mod asymptotics;
pub mod cache;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod intpoly;
pub mod marked;
pub mod matchings;
pub mod rational;
pub mod recurrence;
pub mod series;
pub mod shapes;
pub mod structures;

pub use error::{Error, Result};
pub use rational::Rational;
pub use series::TruncatedSeries;
