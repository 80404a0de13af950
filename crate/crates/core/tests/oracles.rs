mod common;

use common::*;
use ermrates::classcat::{catalog, ConceptClass};
use ermrates::curves::{coupon_expectation, estimate_curve, Learner, LearnerRule};
use ermrates::dims::{eluder_dim, littlestone_dim, star_max, vc_dim, Center};
use ermrates::distros::{geometric_eluder, uniform_singleton};

fn small_catalog() -> Vec<ConceptClass> {
    [
        ("thresholds-N", vec![("m", 8)]),
        ("singletons-N", vec![("m", 7)]),
        ("halfspaces-circle", vec![("n", 6)]),
        ("powerset", vec![("n", 4)]),
        ("ex-B5-blocks", vec![("i_max", 2)]),
        ("ex-B7", vec![("k_max", 3)]),
        ("ex-B8", vec![("k_max", 3)]),
        ("ex-B9", vec![("k_max", 3)]),
        ("ex-B10", vec![("k_max", 3)]),
        ("ex-C2", vec![("d", 2), ("k_max", 3)]),
        ("ex-C5", vec![("d", 2), ("k_max", 3)]),
        ("ex-C6", vec![("d", 2), ("k_max", 3)]),
    ]
    .iter()
    .map(|(id, p)| catalog(id, p).unwrap())
    .collect()
}

#[test]
fn dimensions_match_brute_force() {
    for c in small_catalog() {
        let r = rows(&c);
        let n = c.domain.len();
        assert_eq!(vc_dim(&c, n).unwrap().value, naive_vc(&r, n), "{}", c.name);
        assert_eq!(star_max(&c, None, n).unwrap().value, naive_star_global(&r, n), "{}", c.name);
        for (ctr, lab) in [(Center::AllZero, false), (Center::AllOne, true)] {
            let got = star_max(&c, Some(&ctr), n).unwrap().value;
            assert_eq!(got, naive_star_centered(&r, n, &vec![lab; n]), "{}", c.name);
        }
        assert_eq!(eluder_dim(&c, n).unwrap().value, naive_eluder(&r, n), "{}", c.name);
        assert_eq!(littlestone_dim(&c, n).unwrap().value, naive_littlestone(&r, n), "{}", c.name);
    }
}

#[test]
fn coupon_chain_matches_inclusion_exclusion() {
    for (m, n) in [(4, 0), (4, 3), (4, 9), (16, 40), (64, 16), (64, 300)] {
        let a = coupon_expectation(m, n);
        let b = coupon_inclusion_exclusion(m, n);
        assert!((a - b).abs() <= 1e-12 * b.max(1e-300), "m={m} n={n}: {a} vs {b}");
    }
}

#[test]
fn monte_carlo_matches_enumeration() {
    let cases: Vec<(ConceptClass, ermrates::distros::RealizableDistribution)> = vec![
        {
            let t = catalog("thresholds-N", &[("m", 5)]).unwrap();
            let d = geometric_eluder(&t, &eluder_dim(&t, 10).unwrap().witness).unwrap();
            (t, d)
        },
        (catalog("singletons-N", &[("m", 4)]).unwrap(), uniform_singleton(4).unwrap()),
    ];
    for (c, d) in cases {
        let atoms: Vec<(usize, bool, f64)> =
            d.support.iter().map(|a| (c.domain.position(a.point).unwrap(), a.label, a.p)).collect();
        let l = Learner::new(&c, &d, LearnerRule::Worst).unwrap();
        let grid = [1, 2, 4, 6];
        let curve = estimate_curve(&l, &grid, 20_000, 11).unwrap();
        for (i, &n) in grid.iter().enumerate() {
            let exact = enumerate_worst(&rows(&c), &atoms, n);
            let tol = 3.0 * curve.stderr[i] + 1e-12;
            assert!((curve.mean[i] - exact).abs() <= tol, "{} n={n}: {} vs {exact}", c.name, curve.mean[i]);
        }
    }
}
