//! Exact classical umbral calculus.
//!
//! Umbrae are atoms carrying a truncated moment sequence and its exponential
//! generating function; [`umbra::Workspace::eval`] is the evaluation
//! functional. The auxiliary umbrae of [`ops`] (point products and powers,
//! inverses, Bell, partition and composition umbrae) are each built twice,
//! from closed-form moments and from series arithmetic, and must agree.

pub mod combinatorics;
pub mod error;
pub mod identities;
pub mod inversion;
pub mod ops;
pub mod poly;
pub mod random;
pub mod series;
pub mod umbra;

pub use error::{Error, Result};
pub use ops::DotLeft;
pub use poly::{Poly, Rational};
pub use series::{Series, DEFAULT_ORDER};
pub use umbra::{Atom, AtomId, AtomKind, UmbralExpr, Workspace, WorkspaceFile};
