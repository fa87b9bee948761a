//! Constructive density results for affine (wavelet) systems.
//!
//! Everything works on the frequency side. A target function is given as a
//! piecewise-constant [`freqfn::StepFn`] on exact rational boxes or as a
//! cell-constant [`freqfn::GridFn`]; the constructions return generators whose
//! affine systems are frames ([`frames`]), Riesz bases supported on wavelet sets
//! ([`waveletset`]) or orthonormal systems ([`orthosys`]), together with a report
//! of every inequality that was checked on the way.
//!
//! The set geometry underneath ([`boxcalc`]) is exact: half-open boxes with
//! arbitrary precision rational corners.

pub mod boxcalc;
pub mod cli;
pub mod error;
pub mod frames;
pub mod freqfn;
pub mod grammian;
pub mod linalg;
pub mod orthosys;
pub mod rational;
pub mod report;
pub mod waveletset;

pub use error::{Error, Result};
pub use rational::Rat;
