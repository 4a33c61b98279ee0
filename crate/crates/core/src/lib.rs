//! Randomized online strategies for multislope ski rental.
//!
//! A player holds one of `k + 1` slopes `(b_i, r_i)` and may move to a
//! cheaper-rent slope by paying the difference in buy cost; the game stops
//! at a time chosen by an adversary. This crate builds and checks three
//! strategies:
//!
//! * [`decompose`]: stack of classical rent-or-buy strategies, ratio at
//!   most `e/(e-1)`.
//! * [`optimal`]: tight piecewise-exponential profile at the smallest
//!   feasible ratio, found by bisection.
//! * [`nonadditive`]: randomized doubling when every slope change pays the
//!   full buy price.
//!
//! [`sim`] evaluates profiles exactly and by Monte-Carlo. Everything is
//! generic over [`Scalar`] (`f32` or `f64`); the aliases below fix the
//! precision.

// `!(x > y)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decompose;
pub mod error;
pub mod instance;
pub mod nonadditive;
pub mod optimal;
pub mod profile;
mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use instance::{Instance, Slope};
pub use profile::{Profile, Ratio, Segment};
pub use scalar::Scalar;

pub type InstanceF32 = Instance<f32>;
pub type InstanceF64 = Instance<f64>;
pub type SlopeF32 = Slope<f32>;
pub type SlopeF64 = Slope<f64>;
pub type ProfileF32 = Profile<f32>;
pub type ProfileF64 = Profile<f64>;
pub type SegmentF32 = Segment<f32>;
pub type SegmentF64 = Segment<f64>;
pub type NonAdditiveInstanceF32 = nonadditive::NonAdditiveInstance<f32>;
pub type NonAdditiveInstanceF64 = nonadditive::NonAdditiveInstance<f64>;
pub type SimReportF32 = sim::SimReport<f32>;
pub type SimReportF64 = sim::SimReport<f64>;
