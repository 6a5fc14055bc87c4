//! Scale-free online learning through isotuning.
//!
//! The crate is organised bottom-up:
//!
//! * [`iso`]: the iso operator, isotuning accumulators, online correction,
//!   the null-update test and brute-force hindsight oracles.
//! * [`geometry`]: norms, regularizers, Bregman divergences, projections and
//!   the closed-form FTRL / mirror-descent minimizers.
//! * [`learners`]: isoGD, AOGD, isoFTRL, isoMD, isoProd, isoML-Prod,
//!   isoHedge, isoSoft-Bayes and a sequential-rate GD baseline, each with a
//!   regret certificate.
//! * [`harness`]: deterministic loss streams, comparators, run evaluation and
//!   the verification suites.
//!
//! A typical run builds a learner from a [`learners::LearnerSpec`], feeds it
//! one loss vector per round and asks the resulting
//! [`learners::BoundCertificate`] for the regret bound:
//!
//! ```
//! use isotune_core::learners::{Algorithm, LearnerSpec};
//!
//! let spec = LearnerSpec::new(Algorithm::IsoHedge, 2);
//! let mut learner = spec.build().unwrap();
//! learner.step(&[1.0, 0.0]).unwrap();
//! assert_eq!(learner.prediction(), &[0.5, 0.5]);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod harness;
pub mod iso;
pub mod learners;
pub mod numeric;

pub use geometry::{Domain, Norm, Regularizer};
pub use iso::{IsotuningState, MonotoneFn};
pub use learners::{Algorithm, BoundCertificate, Learner, LearnerSpec, StepOutcome};
