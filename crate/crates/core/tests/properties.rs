use std::collections::BTreeSet;

use ermrates::classcat::{restrictions, ConceptClass, LabeledExample};
use ermrates::curves::{estimate_curve, Learner, LearnerRule};
use ermrates::dims::{compute_report, eluder_dim, littlestone_dim, star_max, vc_dim, verify_witness, ReportOptions};
use ermrates::distros::{check_schedule, on_member, slow_schedule, RateTable, Rational};
use ermrates::erm::{compression_set, version_space};
use proptest::prelude::*;

fn class_strategy(max_pts: usize, max_rows: usize) -> impl Strategy<Value = ConceptClass> {
    (1..=max_pts).prop_flat_map(move |n| {
        prop::collection::vec(prop::collection::vec(0u8..2, n), 1..=max_rows)
            .prop_map(move |rows| ConceptClass::explicit((0..n).collect(), &rows).unwrap())
    })
}

/// A class, a member index, positive weights per point and a sample drawn from them.
fn instance() -> impl Strategy<Value = (ConceptClass, usize, Vec<u32>, Vec<usize>)> {
    class_strategy(6, 12).prop_flat_map(|c| {
        let n = c.domain.len();
        let h = c.len();
        (Just(c), 0..h, prop::collection::vec(1u32..8, n), prop::collection::vec(0..n, 0..12))
    })
}

fn sample_of(c: &ConceptClass, h: usize, pts: &[usize]) -> Vec<LabeledExample> {
    pts.iter().map(|&p| LabeledExample::new(p, c.hypotheses[h].at(p))).collect()
}

fn dist_of(c: &ConceptClass, h: usize, w: &[u32]) -> ermrates::distros::RealizableDistribution {
    let total: u32 = w.iter().sum();
    let masses = w.iter().enumerate().map(|(p, &x)| (p, Rational::new(x.into(), total.into()))).collect();
    on_member(c, h, masses).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restrictions_project_and_are_bounded(c in class_strategy(7, 20), mask in 0u32..128) {
        let n = c.domain.len();
        let big: Vec<usize> = (0..n).collect();
        let small: Vec<usize> = (0..n).filter(|&p| mask >> p & 1 == 1).collect();
        let rb = restrictions(&c, &big).unwrap();
        let rs = restrictions(&c, &small).unwrap();
        prop_assert!(rs.len() <= c.len());
        prop_assert!(rs.len() as u64 <= 1u64 << small.len());
        let idx: Vec<usize> = small.iter().map(|p| big.iter().position(|q| q == p).unwrap()).collect();
        let projected: BTreeSet<Vec<bool>> = rb.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect();
        prop_assert_eq!(projected, rs);
    }

    #[test]
    fn version_space_shrinks((c, h, _w, pts) in instance(), extra in prop::collection::vec(0usize..6, 0..4)) {
        let s = sample_of(&c, h, &pts);
        let mut t = s.clone();
        t.extend(extra.iter().filter(|&&p| p < c.domain.len()).map(|&p| LabeledExample::new(p, c.hypotheses[h].at(p))));
        let vs = version_space(&c, &s).unwrap().members;
        let vt = version_space(&c, &t).unwrap().members;
        prop_assert!(vt.iter().all(|m| vs.contains(m)));
        prop_assert!(vt.contains(&h));
    }

    #[test]
    fn compression_is_sound((c, h, _w, pts) in instance()) {
        let s = sample_of(&c, h, &pts);
        let cs = compression_set(&c, &s, 1 << 20).unwrap();
        prop_assert!(cs.exact);
        let sub: Vec<_> = cs.subset.iter().map(|&i| s[i]).collect();
        prop_assert_eq!(version_space(&c, &sub).unwrap().members, version_space(&c, &s).unwrap().members);
        // a compression set is a star set centered at the target
        let star = star_max(&c, Some(&ermrates::dims::Center::Hyp(h)), c.domain.len()).unwrap().value;
        prop_assert!(cs.subset.len() <= star);
    }

    #[test]
    fn worst_dominates_best((c, h, w, _pts) in instance(), n in 0usize..10, seed in any::<u64>()) {
        let d = dist_of(&c, h, &w);
        let worst = Learner::new(&c, &d, LearnerRule::Worst).unwrap();
        let best = Learner::new(&c, &d, LearnerRule::Best).unwrap();
        for t in 0..20 {
            prop_assert!(worst.trial(n, seed, t).error >= best.trial(n, seed, t).error);
        }
    }

    #[test]
    fn curves_are_deterministic((c, h, w, _pts) in instance(), seed in any::<u64>()) {
        let d = dist_of(&c, h, &w);
        let l = Learner::new(&c, &d, LearnerRule::Worst).unwrap();
        let grid = [1, 2, 4, 8];
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_curve(&l, &grid, 64, seed).unwrap());
        let b = four.install(|| estimate_curve(&l, &grid, 64, seed).unwrap());
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dimension_chain_and_monotonicity(c in class_strategy(6, 16), keep in prop::collection::vec(any::<bool>(), 16)) {
        let n = c.domain.len();
        let vc = vc_dim(&c, n).unwrap().value;
        let ld = littlestone_dim(&c, n).unwrap().value;
        let el = eluder_dim(&c, n).unwrap().value;
        let sg = star_max(&c, None, n).unwrap().value;
        prop_assert!(vc <= ld && ld <= el);
        prop_assert!(vc <= sg);
        prop_assert!(el < c.len().max(1));
        let rows: Vec<Vec<u8>> = c.hypotheses.iter().zip(&keep).filter(|(_, &k)| k)
            .map(|(h, _)| (0..n).map(|p| h.at(p) as u8).collect()).collect();
        if !rows.is_empty() {
            let sub = ConceptClass::explicit((0..n).collect(), &rows).unwrap();
            prop_assert!(vc_dim(&sub, n).unwrap().value <= vc);
            prop_assert!(littlestone_dim(&sub, n).unwrap().value <= ld);
            prop_assert!(eluder_dim(&sub, n).unwrap().value <= el);
            prop_assert!(star_max(&sub, None, n).unwrap().value <= sg);
        }
    }

    #[test]
    fn report_witnesses_verify(c in class_strategy(6, 12)) {
        let opts = ReportOptions { se_blocks: 2, vce_blocks: 2, d_variants: vec![1], ..ReportOptions::default() };
        let r = compute_report(&c, &opts).unwrap();
        for w in &r.witnesses {
            prop_assert!(verify_witness(&c, w).is_ok(), "{:?}", verify_witness(&c, w));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_schedules_pass_checks(a in 0.05f64..1.0, t_max in 1usize..5) {
        let rate = RateTable::from_fn("power", 1 << 16, |n| (n as f64).powf(-a));
        if let Ok(s) = slow_schedule(&rate, t_max) {
            prop_assert!(check_schedule(&s, &rate).is_empty());
            prop_assert!(s.n.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
