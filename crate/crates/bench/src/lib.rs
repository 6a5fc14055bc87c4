//! Shared inputs for the criterion benches.

use isotune_core::harness::{LossStream, StreamData, StreamKind};
use isotune_core::learners::{Algorithm, LearnerSpec};

/// `t` rounds of uniform losses over `n` coordinates, fixed seed.
pub fn uniform_losses(n: usize, t: usize) -> Vec<Vec<f64>> {
    match LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 1.0 }, n, t, 42).generate() {
        Ok(StreamData::Vectors(v)) => v,
        _ => unreachable!("uniform streams are vector streams"),
    }
}

/// Feeds every row to a fresh learner; returns the final first coordinate
/// so the work is observable.
pub fn run_learner(spec: &LearnerSpec, rows: &[Vec<f64>]) -> f64 {
    let mut l = spec.build().expect("bench spec is valid");
    for r in rows {
        l.step(r).expect("finite losses");
    }
    l.prediction()[0]
}

/// The learners benched at every size.
pub fn bench_algorithms() -> [Algorithm; 8] {
    [
        Algorithm::IsoGd,
        Algorithm::Aogd,
        Algorithm::IsoFtrl,
        Algorithm::IsoMd,
        Algorithm::IsoProd,
        Algorithm::IsoMlProd,
        Algorithm::IsoHedge,
        Algorithm::IsoSoftBayes,
    ]
}
