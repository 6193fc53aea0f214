//! Exact construction and verification of the quantum integrals of the
//! deformed elliptic Calogero–Moser system.

pub mod cmbuild;
pub mod combinat;
pub mod error;
pub mod json;
pub mod ring;
pub mod opalg;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use opalg::{DiffOp, MultiIndex};
pub use ring::{CoeffPoly, GenKind, Monomial, PairGen, Rational, Ring};
