//! End-to-end runs through the harness.

use isotune_core::harness::stream::write_replay;
use isotune_core::harness::suites::certificate_variants;
use isotune_core::harness::{evaluate_run, LossStream, RunOptions, RunSpec, StreamKind};
use isotune_core::learners::{Algorithm, LearnerSpec};

fn opts() -> RunOptions {
    RunOptions { per_round: true, ..RunOptions::default() }
}

#[test]
fn zero_losses_give_zero_regret_and_bounds() {
    for (name, learner) in certificate_variants(3) {
        if learner.algorithm == Algorithm::IsoSoftBayes {
            continue; // all-equal losses map to unit prices; covered below
        }
        let stream = LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 0.0 }, 3, 200, 1);
        let rec = evaluate_run(&RunSpec { learner, stream }, opts()).unwrap();
        assert_eq!(rec.regret(), 0.0, "{name}");
        if learner_is_seqopt(&name) {
            // The eps-regularized rate keeps a D^2 eps / 2 term.
            assert!(rec.bound() > 0.0);
        } else {
            assert_eq!(rec.bound(), 0.0, "{name}");
        }
        assert!(rec.violations.is_empty(), "{name}: {:?}", rec.violations);
    }
}

fn learner_is_seqopt(name: &str) -> bool {
    name.starts_with("seqopt")
}

#[test]
fn unit_prices_leave_softbayes_at_its_offset() {
    let stream = LossStream::new(StreamKind::IidUniform { lo: 0.0, hi: 0.0 }, 3, 200, 1);
    let rec = evaluate_run(&RunSpec { learner: LearnerSpec::new(Algorithm::IsoSoftBayes, 3), stream }, opts()).unwrap();
    assert!(rec.regret().abs() < 1e-9);
    assert!(rec.final_prediction.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-12));
}

#[test]
fn hedge_concentrates_on_a_dominant_expert() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dominant.csv");
    let mut rng = isotune_core::harness::StreamRng::new(9);
    let rows: Vec<Vec<f64>> = (0..10_000)
        .map(|_| (0..4).map(|i| if i == 0 { 0.2 * rng.uniform() } else { 0.5 + 0.5 * rng.uniform() }).collect())
        .collect();
    write_replay(&path, &rows).unwrap();
    let stream = LossStream::new(StreamKind::Replay { path: path.clone() }, 4, 10_000, 0);
    let rec = evaluate_run(&RunSpec { learner: LearnerSpec::new(Algorithm::IsoHedge, 4), stream }, opts()).unwrap();
    assert!(rec.final_prediction[0] >= 0.9, "{:?}", rec.final_prediction);
    assert!(rec.regret() <= rec.bound());
    assert!(rec.violations.is_empty());
}

#[test]
fn per_round_rows_agree_with_the_summary() {
    for (name, learner) in certificate_variants(2) {
        let stream = LossStream::new(StreamKind::IidGaussian { sigma: 3.0 }, 2, 500, 4);
        let rec = evaluate_run(&RunSpec { learner, stream }, opts()).unwrap();
        assert_eq!(rec.rows.len(), 500, "{name}");
        let last = rec.rows.last().unwrap();
        let r = rec.regret();
        assert!((last.cum_regret - r).abs() <= 1e-9 * r.abs().max(1.0), "{name}: {} vs {r}", last.cum_regret);
        let total: f64 = rec.rows.iter().map(|row| row.loss).sum();
        assert!((total - rec.learner_loss).abs() <= 1e-9 * total.abs().max(1.0), "{name}");
        assert!(rec.rows.windows(2).all(|w| w[0].delta_total <= w[1].delta_total), "{name}");
    }
}

#[test]
fn runs_are_reproducible() {
    let spec = RunSpec {
        learner: LearnerSpec::new(Algorithm::IsoMlProd, 5),
        stream: LossStream::new(StreamKind::default_scale_jump(), 5, 3000, 17),
    };
    let a = evaluate_run(&spec, opts()).unwrap();
    let b = evaluate_run(&spec, opts()).unwrap();
    assert_eq!(a.final_prediction, b.final_prediction);
    assert_eq!(a.regret().to_bits(), b.regret().to_bits());
    let other = RunSpec { stream: LossStream::new(StreamKind::default_scale_jump(), 5, 3000, 18), ..spec };
    assert_ne!(evaluate_run(&other, opts()).unwrap().final_prediction, a.final_prediction);
}

#[test]
fn plateau_converges_to_the_minimizer() {
    let learner = LearnerSpec::new(Algorithm::IsoGd, 1).with_q(1.0).with_x1(vec![-10.0]);
    let stream = LossStream::new(StreamKind::PlateauExp { x_star: 3.0 }, 1, 2000, 0);
    let rec = evaluate_run(&RunSpec { learner, stream }, opts()).unwrap();
    assert!((rec.final_prediction[0] - 3.0).abs() < 0.1, "{:?}", rec.final_prediction);
    assert!(rec.regret() <= rec.bound() + 1e-9);
}

#[test]
fn dimension_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.csv");
    write_replay(&path, &[vec![1.0, 2.0]]).unwrap();
    let stream = LossStream::new(StreamKind::Replay { path }, 0, 0, 0);
    let err = evaluate_run(&RunSpec { learner: LearnerSpec::new(Algorithm::IsoHedge, 3), stream }, opts()).unwrap_err();
    assert!(!err.is_numeric());
}
