mod common;

use std::collections::BTreeSet;

use aniso_core::engine::{closure_counting, closure_generic, DEFAULT_RULE_CAP};
use aniso_core::lattice::neighborhood_offsets;
use aniso_core::{closure, make_nr_family, percolates, step, Geometry, UpdateFamily};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn counting_closure_matches_sweep_oracle() {
    let mut rng = rng(11);
    for _ in 0..600 {
        let d = rng.random_range(1..=3);
        let a = random_exponents(&mut rng, d, 3);
        let sum: usize = a.iter().sum();
        let r = rng.random_range(1..=2 * sum);
        let side = match d {
            1 => 12,
            2 => 7,
            _ => 4,
        };
        let dims: Vec<usize> = (0..d).map(|_| rng.random_range(1..=side)).collect();
        let torus = rng.random_bool(0.3);
        let geom = if torus { Geometry::Torus } else { Geometry::Cube };
        let density = rng.random_range(0.05..0.6);
        let a_set = random_set(&mut rng, &dims, density);
        let want = closure_nr(&a_set, &dims, &a, r, torus);
        let got = closure_counting(&to_config(&a_set, &dims, geom), &spec(&a, r));
        assert_eq!(to_set(&got), want, "a={a:?} r={r} dims={dims:?} torus={torus}");
    }
}

#[test]
fn explicit_and_counting_routes_agree() {
    let mut rng = rng(12);
    for _ in 0..300 {
        let d = rng.random_range(1..=2);
        let a = random_exponents(&mut rng, d, 2);
        let sum: usize = a.iter().sum();
        let r = rng.random_range(1..=2 * sum);
        let s = spec(&a, r);
        let explicit = make_nr_family(&s, DEFAULT_RULE_CAP);
        assert!(!explicit.is_implicit());
        let dims: Vec<usize> = (0..d).map(|_| rng.random_range(1..=6)).collect();
        let a_set = random_set(&mut rng, &dims, 0.3);
        let cfg = to_config(&a_set, &dims, Geometry::Cube);
        let via_rules = closure_generic(&cfg, &explicit);
        assert_eq!(via_rules, closure_counting(&cfg, &s));
        assert_eq!(closure(&cfg, &explicit), via_rules);
    }
}

#[test]
fn non_nr_family_matches_rule_oracle() {
    // Oriented two-rule family in d = 2.
    let rules = vec![vec![vec![-1, 0], vec![0, -1]], vec![vec![1, 1], vec![2, 0]]];
    let fam = UpdateFamily::explicit(rules.clone()).unwrap();
    let mut rng = rng(13);
    for _ in 0..200 {
        let dims = vec![rng.random_range(1..=7), rng.random_range(1..=7)];
        let torus = rng.random_bool(0.5);
        let geom = if torus { Geometry::Torus } else { Geometry::Cube };
        let a_set = random_set(&mut rng, &dims, 0.25);
        let want = closure_rules(&a_set, &dims, &rules, torus);
        assert_eq!(to_set(&closure(&to_config(&a_set, &dims, geom), &fam)), want);
    }
}

#[test]
fn offsets_match_direct_construction() {
    for a in [vec![1], vec![1, 2], vec![1, 2, 4], vec![3, 3]] {
        let s = spec(&a, 1);
        let got: BTreeSet<Vec<i64>> = neighborhood_offsets(&s).into_iter().collect();
        let want: BTreeSet<Vec<i64>> = offsets(&a).into_iter().collect();
        assert_eq!(got, want);
        assert_eq!(got.len(), s.neighborhood_size());
    }
}

#[test]
fn implicit_family_above_cap() {
    let s = spec(&[1, 2, 4], 7);
    let fam = make_nr_family(&s, DEFAULT_RULE_CAP);
    assert!(fam.is_implicit());
    assert_eq!(fam.rule_count(), 3432);
}

fn arb_instance() -> impl Strategy<Value = (Vec<usize>, usize, Vec<usize>, Vec<bool>, bool)> {
    (1usize..=3)
        .prop_flat_map(|d| {
            (
                proptest::collection::vec(1usize..=3, d),
                proptest::collection::vec(1usize..=5, d),
                any::<bool>(),
            )
        })
        .prop_flat_map(|(mut a, dims, torus)| {
            a.sort();
            let sum: usize = a.iter().sum();
            let n: usize = dims.iter().product();
            (
                Just(a),
                1..=2 * sum,
                Just(dims),
                proptest::collection::vec(any::<bool>(), n),
                Just(torus),
            )
        })
}

fn build(dims: &[usize], bits: &[bool], torus: bool) -> aniso_core::Configuration {
    let pts = all_points(dims);
    let set: BTreeSet<Pt> = pts.into_iter().zip(bits).filter(|(_, &b)| b).map(|(p, _)| p).collect();
    to_config(&set, dims, if torus { Geometry::Torus } else { Geometry::Cube })
}

proptest! {
    #[test]
    fn closure_is_extensive_idempotent_and_a_fixed_point((a, r, dims, bits, torus) in arb_instance()) {
        let s = spec(&a, r);
        let fam = UpdateFamily::counting(&s);
        let cfg = build(&dims, &bits, torus);
        let c = closure(&cfg, &fam);
        prop_assert!(cfg.is_subset_of(&c));
        prop_assert_eq!(&closure(&c, &fam), &c);
        prop_assert_eq!(&step(&c, &fam), &c);
        prop_assert_eq!(percolates(&cfg, &fam), c.is_full());
    }

    #[test]
    fn closure_is_monotone((a, r, dims, bits, torus) in arb_instance(), extra in proptest::collection::vec(any::<bool>(), 125)) {
        let s = spec(&a, r);
        let small = build(&dims, &bits, torus);
        let more: Vec<bool> = bits.iter().zip(extra.iter().cycle()).map(|(x, y)| *x || *y).collect();
        let big = build(&dims, &more, torus);
        prop_assert!(closure_counting(&small, &s).is_subset_of(&closure_counting(&big, &s)));
    }

    #[test]
    fn lower_threshold_infects_more((a, r, dims, bits, torus) in arb_instance()) {
        prop_assume!(r > 1);
        let cfg = build(&dims, &bits, torus);
        let hi = closure_counting(&cfg, &spec(&a, r));
        let lo = closure_counting(&cfg, &spec(&a, r - 1));
        prop_assert!(hi.is_subset_of(&lo));
    }
}
