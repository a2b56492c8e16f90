//! Exact computations for wall-crossing of framed twisted quiver sheaves.
//!
//! The crate is organised bottom-up:
//!
//! - [`quiver`]: quivers, double quivers, the truncated path algebra and
//!   reduction modulo the moment-map ideal;
//! - [`rep`]: finite-dimensional representations, the three-term complex and
//!   `Hom`/`Ext^1` dimensions;
//! - [`class`]: numerical classes, twist data and the antisymmetric Euler form;
//! - [`stability`]: slopes, critical values, chambers and the
//!   Harder-Narasimhan index sets;
//! - [`hall`]: a free truncated model of the Hall algebra in which the
//!   wall-crossing identities are checked symbolically;
//! - [`wallcross`]: the Lie algebra on classes and transport of invariants
//!   across walls.
//!
//! All arithmetic is over exact rationals.

pub mod class;
pub mod error;
pub mod hall;
pub mod linalg;
pub mod quiver;
pub mod rational;
pub mod rep;
pub mod stability;
pub mod wallcross;

pub use class::{CurveTwistData, EulerContext, EulerValue, FramingContext, NumericalClass, VertexCharge};
pub use error::{Error, Result};
pub use hall::{GeneratorKind, HallElement, HallGenerator};
pub use linalg::Matrix;
pub use quiver::{AlgebraElement, DoubleQuiver, FramedQuiverShape, IdealReducer, Path, Quiver};
pub use rational::Rational;
pub use rep::{HomComplex, Representation};
pub use stability::{ChamberDecomposition, Side, Slope, SupportSet};
pub use wallcross::{InvariantTable, LieAlgebra, LieElement};
