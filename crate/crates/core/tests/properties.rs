//! Property tests for the isotuning machinery and the learners.
//!
//! Regret is recomputed here from raw losses against every simplex corner
//! or box corner, independently of the harness.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use isotune_core::geometry::lemmas::{scalar_lemma_check, Lemma};
use isotune_core::geometry::{bregman, ftrl_argmin, md_argmin, Domain, Norm, Regularizer};
use isotune_core::harness::suites::path_distance;
use isotune_core::iso::{isotuning_sequence, online_correction, sqrt_bound, MonotoneFn};
use isotune_core::learners::{
    bound_value, generic_bound, Algorithm, Aogd, IsoMlProd, Learner, LearnerSpec, SeqOptGd,
};
use isotune_core::numeric::SumSq;

/// Loss vectors with per-round magnitudes spread over many decades.
fn wild_losses(n: usize, max_t: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        (prop::collection::vec(-1.0f64..1.0, n), -30i32..30).prop_map(|(v, e)| {
            let s = 10f64.powi(e);
            v.into_iter().map(|x| x * s).collect::<Vec<f64>>()
        }),
        1..max_t,
    )
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn run(spec: &LearnerSpec, rows: &[Vec<f64>]) -> (Box<dyn Learner>, Vec<Vec<f64>>, f64) {
    let mut l = spec.build().unwrap();
    let mut played = Vec::new();
    let mut loss = 0.0;
    for r in rows {
        played.push(l.prediction().to_vec());
        loss += l.step(r).unwrap().round_loss;
    }
    (l, played, loss)
}

fn corners(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect()
}

fn box_corners(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { 1.0 } else { -1.0 }).collect()).collect()
}

fn assert_sound(spec: &LearnerSpec, rows: &[Vec<f64>], comparators: &[Vec<f64>]) {
    let (l, played, loss) = run(spec, rows);
    let cert = l.certificate();
    for x in comparators {
        let regret = loss - rows.iter().map(|r| dot(x, r)).sum::<f64>();
        let info = l.comparator_info(x).unwrap();
        let b = bound_value(&cert, &info).unwrap();
        let scale = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let slack = 1e-6 * b.abs() + 1e-9 * scale;
        prop_assert_sound(regret, b, slack, spec.algorithm);
        let nr = |t: usize| dot(&played[t - 1], &rows[t - 1]) - dot(x, &rows[t - 1]);
        let g = generic_bound(&cert, &info, &nr).unwrap();
        prop_assert_sound(regret, g, 1e-6 * g.abs() + 1e-9 * scale, spec.algorithm);
    }
}

fn prop_assert_sound(regret: f64, bound: f64, slack: f64, a: Algorithm) {
    assert!(regret <= bound + slack, "{a}: regret {regret:e} exceeds bound {bound:e}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn sqrt_sandwich_holds(a in prop::collection::vec(0.0f64..10.0, 1..200)) {
        let gs: Vec<MonotoneFn> = a.iter().map(|&v| MonotoneFn::reciprocal(v)).collect();
        let x = *isotuning_sequence(&gs).unwrap().last().unwrap();
        let (lo, hi) = sqrt_bound(&a);
        prop_assert!(lo * (1.0 - 1e-12) <= x && x <= hi * (1.0 + 1e-12), "{lo} <= {x} <= {hi}");
    }

    #[test]
    fn isotuning_sequence_is_monotone(a in prop::collection::vec(0.0f64..1e3, 1..100)) {
        let gs: Vec<MonotoneFn> = a.iter().map(|&v| MonotoneFn::reciprocal(v)).collect();
        let xs = isotuning_sequence(&gs).unwrap();
        prop_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn correction_stays_on_the_simplex(
        x in prop::collection::vec(0.0f64..1.0, 4),
        prev in 0.0f64..10.0,
        delta in 0.0f64..10.0,
    ) {
        let s: f64 = x.iter().sum::<f64>() + 1e-12;
        let mut x: Vec<f64> = x.iter().map(|v| (v + 1e-12 / 4.0) / s).collect();
        online_correction(&mut x, &[0.25; 4], prev, delta);
        prop_assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(x.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn lemmas_hold_at_random_points(u in 0.0f64..1.0) {
        for lemma in Lemma::ALL {
            let (lo, hi) = lemma.grid_range();
            prop_assert!(scalar_lemma_check(lemma, lo + (hi - lo) * u).unwrap());
        }
    }

    #[test]
    fn bregman_is_non_negative(x in prop::collection::vec(0.01f64..1.0, 3), y in prop::collection::vec(0.01f64..1.0, 3)) {
        let norm = |v: &[f64]| { let s: f64 = v.iter().sum(); v.iter().map(|a| a / s).collect::<Vec<_>>() };
        let (x, y) = (norm(&x), norm(&y));
        prop_assert!(bregman(&Regularizer::Entropic, &x, &y).unwrap() >= 0.0);
        prop_assert!(bregman(&Regularizer::quadratic(3), &x, &y).unwrap() >= 0.0);
    }

    #[test]
    fn minimizers_stay_feasible(l in prop::collection::vec(-1e6f64..1e6, 3), inv_eta in 1e-6f64..1e6) {
        let bx = Domain::unit_box(3);
        let quad = Regularizer::quadratic(3);
        prop_assert!(bx.contains(&ftrl_argmin(&quad, &bx, &l, inv_eta).unwrap(), 1e-12));
        prop_assert!(bx.contains(&md_argmin(&quad, &bx, &[0.5, 0.0, -0.5], &l, inv_eta).unwrap(), 1e-12));
        let sx = Domain::Simplex { dim: 3 };
        prop_assert!(sx.contains(&ftrl_argmin(&Regularizer::Entropic, &sx, &l, inv_eta).unwrap(), 1e-12));
        let p = bx.project(&l).unwrap();
        prop_assert_eq!(bx.project(&p).unwrap(), p);
    }

    #[test]
    fn expert_certificates_are_sound(rows in wild_losses(3, 120)) {
        for a in [Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoHedge, Algorithm::IsoFtrl, Algorithm::IsoMd] {
            let spec = LearnerSpec::new(a, 3);
            let mut comps = corners(3);
            comps.push(vec![1.0 / 3.0; 3]);
            assert_sound(&spec, &rows, &comps);
        }
    }

    #[test]
    fn gradient_certificates_are_sound(rows in wild_losses(2, 120)) {
        let box2 = Domain::unit_box(2);
        for spec in [
            LearnerSpec::new(Algorithm::IsoGd, 2).with_domain(box2.clone()),
            LearnerSpec::new(Algorithm::IsoGd, 2),
            LearnerSpec::new(Algorithm::Aogd, 2),
            LearnerSpec::new(Algorithm::SeqOptGd, 2),
            LearnerSpec::new(Algorithm::IsoFtrl, 2).with_domain(box2.clone()),
            LearnerSpec::new(Algorithm::IsoMd, 2).with_domain(box2.clone()),
        ] {
            let mut comps = box_corners(2);
            comps.push(vec![0.0, 0.0]);
            assert_sound(&spec, &rows, &comps);
        }
    }

    #[test]
    fn simplex_learners_stay_normalized(rows in wild_losses(4, 150)) {
        for a in [Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoHedge, Algorithm::IsoFtrl, Algorithm::IsoMd] {
            let mut l = LearnerSpec::new(a, 4).build().unwrap();
            for r in &rows {
                l.step(r).unwrap();
                let x = l.prediction();
                prop_assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-9, "{a}: {x:?}");
                prop_assert!(x.iter().all(|v| *v >= 0.0));
            }
        }
    }

    #[test]
    fn mlprod_mass_and_factors(rows in wild_losses(4, 150)) {
        let mut m = IsoMlProd::new(4, 4f64.ln()).unwrap();
        for r in &rows {
            m.step(r).unwrap();
            let mass: f64 = m.weights().iter().sum();
            let cap = 4.0 + m.c_sums().iter().sum::<f64>();
            prop_assert!(mass <= cap * (1.0 + 1e-12));
        }
        prop_assert!(m.min_factor() >= 0.5);
    }

    #[test]
    fn scale_invariance(rows in wild_losses(3, 80), e in -250i32..250) {
        let c = 10f64.powi(e);
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
        for a in [Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoHedge, Algorithm::IsoFtrl] {
            let spec = LearnerSpec::new(a, 3);
            let path = |rs: &[Vec<f64>]| {
                let mut l = spec.build().unwrap();
                rs.iter().map(|r| { l.step(r).unwrap(); l.prediction().to_vec() }).collect::<Vec<_>>()
            };
            let d = path_distance(&path(&rows), &path(&scaled));
            prop_assert!(d <= 1e-6, "{a}: {d:e} at c = {c:e}");
        }
    }

    #[test]
    fn translation_invariance(rows in wild_losses(3, 80), shifts in prop::collection::vec(-5.0f64..5.0, 80)) {
        // Shifts comparable to the losses, so rounding stays relative.
        let moved: Vec<Vec<f64>> = rows.iter().zip(&shifts).map(|(r, s)| {
            let m = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            r.iter().map(|v| v + s * m).collect()
        }).collect();
        for a in [Algorithm::IsoProd, Algorithm::IsoMlProd, Algorithm::IsoHedge] {
            let spec = LearnerSpec::new(a, 3);
            let path = |rs: &[Vec<f64>]| {
                let mut l = spec.build().unwrap();
                rs.iter().map(|r| { l.step(r).unwrap(); l.prediction().to_vec() }).collect::<Vec<_>>()
            };
            let d = path_distance(&path(&rows), &path(&moved));
            prop_assert!(d <= 1e-9, "{a}: {d:e}");
        }
    }

    #[test]
    fn dual_norm_invariants(rows in wild_losses(3, 150)) {
        for spec in [
            LearnerSpec::new(Algorithm::IsoFtrl, 3),
            LearnerSpec::new(Algorithm::IsoMd, 3),
            LearnerSpec::new(Algorithm::IsoGd, 3),
            LearnerSpec::new(Algorithm::IsoMd, 3).with_domain(Domain::unit_box(3)),
        ] {
            let norm = spec.regularizer().norm();
            let q = spec.q();
            let mut l = spec.build().unwrap();
            let x1 = l.anchor().to_vec();
            let mut prior = SumSq::new();
            let mut max_dual: f64 = 0.0;
            for (k, r) in rows.iter().enumerate() {
                let o = l.step(r).unwrap();
                let dual = norm.dual_value(r);
                if o.was_null {
                    prop_assert!(dual >= prior.sqrt(), "null dominance");
                }
                prior.add(dual);
                max_dual = max_dual.max(dual);
                let d = o.delta_total;
                prop_assert!(prior.sqrt_scaled(q / 2.0) <= d * (1.0 + 1e-12));
                prop_assert!(d <= (prior.sqrt_scaled(q) + (q / 2.0).sqrt() * max_dual) * (1.0 + 1e-12));
                if spec.algorithm != Algorithm::IsoFtrl {
                    let travel = norm.distance(l.prediction(), &x1);
                    prop_assert!(travel <= (2.0 * q * (k + 1) as f64).sqrt() * (1.0 + 1e-9) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn aogd_isotuning_identity(rows in wild_losses(2, 100), alpha in 0.0f64..0.1) {
        let mut a = Aogd::new(Domain::unit_box(2), 8.0, vec![0.0, 0.0]).unwrap();
        for r in &rows {
            let o = a.step_with_alpha(r, alpha).unwrap();
            // The difference cancels when gradients are tiny next to alpha.
            let identity = 8.0 * (a.inv_eta() - a.alpha_sum());
            prop_assert!((o.delta_total - identity).abs() <= 1e-9 * 8.0 * a.inv_eta() + 1e-300);
        }
    }

    #[test]
    fn seqopt_rate_is_non_decreasing(rows in wild_losses(2, 100)) {
        let mut s = SeqOptGd::new(Domain::unit_box(2), 1.0, 1.0, vec![0.0, 0.0]).unwrap();
        let mut last = s.inv_eta();
        for r in &rows {
            s.step(r).unwrap();
            prop_assert!(s.inv_eta() >= last);
            last = s.inv_eta();
        }
    }

    #[test]
    fn softbayes_weights_stay_positive(prices in prop::collection::vec(prop::collection::vec(0.0f64..3.0, 3), 1..150)) {
        let mut sb = LearnerSpec::new(Algorithm::IsoSoftBayes, 3).build().unwrap();
        for p in &prices {
            if p.iter().all(|v| *v == 0.0) { continue; }
            sb.step(p).unwrap();
            prop_assert!(sb.prediction().iter().all(|v| *v > 0.0));
            prop_assert!((sb.prediction().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn norms_pair_up() {
    let v = [3.0, -4.0];
    assert_abs_diff_eq!(Norm::L1.value(&v), 7.0);
    assert_abs_diff_eq!(Norm::L1.dual_value(&v), 4.0);
    assert_abs_diff_eq!(Norm::L2.dual_value(&v), 5.0);
}
