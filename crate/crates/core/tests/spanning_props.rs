mod common;

use std::collections::BTreeSet;

use aniso_core::spanning::{
    al_witness, components_process, components_process_traced, is_internally_filled, is_internally_spanned,
    strong_components, witness_from_trace, MergeOrder, Witness, WitnessMode,
};
use aniso_core::{make_nr_family, Block, Error, Geometry, StrongGraphParam, UpdateFamily};
use common::*;
use rand::Rng;

fn all_subsets(dims: &[usize]) -> impl Iterator<Item = BTreeSet<Pt>> {
    let pts = all_points(dims);
    let n = pts.len();
    (0u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| pts[i].clone()).collect())
}

#[test]
fn process_union_is_closure_on_every_subset_of_3x3() {
    let dims = [3, 3];
    for (a, r) in [(vec![1, 1], 2), (vec![1, 2], 3), (vec![1, 2], 4), (vec![2, 2], 3)] {
        let s = spec(&a, r);
        let fam = UpdateFamily::counting(&s);
        let t = StrongGraphParam::for_spec(&s);
        for set in all_subsets(&dims) {
            let cfg = to_config(&set, &dims, Geometry::Cube);
            let coll = components_process(&cfg, &fam, t).unwrap();
            let union: BTreeSet<Pt> = coll.union().into_iter().collect();
            assert_eq!(union, closure_nr(&set, &dims, &a, r, false));
            let total: usize = coll.sets().iter().map(Vec::len).sum();
            assert_eq!(total, union.len(), "sets overlap");
        }
    }
}

#[test]
fn process_union_is_closure_in_three_dimensions() {
    let mut rng = rng(21);
    for _ in 0..150 {
        let a = random_exponents(&mut rng, 3, 2);
        let sum: usize = a.iter().sum();
        let r = rng.random_range(a[2] + 1..=sum);
        let dims: Vec<usize> = (0..3).map(|_| rng.random_range(2..=6)).collect();
        let set = random_set(&mut rng, &dims, 0.15);
        let s = spec(&a, r);
        let cfg = to_config(&set, &dims, Geometry::Cube);
        let coll = components_process(&cfg, &UpdateFamily::counting(&s), StrongGraphParam::for_spec(&s)).unwrap();
        let union: BTreeSet<Pt> = coll.union().into_iter().collect();
        assert_eq!(union, closure_nr(&set, &dims, &a, r, false), "a={a:?} r={r}");
    }
}

#[test]
fn final_sets_are_strongly_connected_and_separated() {
    let mut rng = rng(22);
    for _ in 0..200 {
        let dims = [rng.random_range(3..=12), rng.random_range(3..=12)];
        let set = random_set(&mut rng, &dims, 0.12);
        let s = spec(&[1, 2], 3);
        let t = StrongGraphParam::for_spec(&s);
        let coll = components_process(&to_config(&set, &dims, Geometry::Cube), &UpdateFamily::counting(&s), t).unwrap();
        let sets = coll.sets();
        for x in sets {
            assert_eq!(components(x, 4).len(), 1);
        }
        for (i, x) in sets.iter().enumerate() {
            for y in &sets[i + 1..] {
                let mut both = x.clone();
                both.extend(y.iter().cloned());
                assert!(components(&both, 4).len() > 1, "mergeable pair left over");
            }
        }
    }
}

#[test]
fn merge_order_does_not_change_the_final_union() {
    let mut rng = rng(23);
    for _ in 0..150 {
        let dims = [rng.random_range(3..=10), rng.random_range(3..=10)];
        let set = random_set(&mut rng, &dims, 0.15);
        let s = spec(&[1, 1], 2);
        let fam = UpdateFamily::counting(&s);
        let t = StrongGraphParam::for_spec(&s);
        let cfg = to_config(&set, &dims, Geometry::Cube);
        let canon = components_process_traced(&cfg, &fam, t, MergeOrder::Canonical).unwrap();
        let seed = rng.random();
        let shuffled = components_process_traced(&cfg, &fam, t, MergeOrder::Random(seed)).unwrap();
        let u1: BTreeSet<Pt> = canon.collection.union().into_iter().collect();
        let u2: BTreeSet<Pt> = shuffled.collection.union().into_iter().collect();
        assert_eq!(u1, u2);
        assert_eq!(canon.closure_diam(), shuffled.closure_diam());
    }
}

#[test]
fn merged_diameter_is_subadditive() {
    let mut rng = rng(24);
    for _ in 0..200 {
        let d = rng.random_range(2..=3);
        let a = random_exponents(&mut rng, d, 2);
        let sum: usize = a.iter().sum();
        let r = rng.random_range(a[d - 1] + 1..=sum);
        let dims: Vec<usize> = (0..d).map(|_| rng.random_range(3..=if d == 2 { 14 } else { 6 })).collect();
        let set = random_set(&mut rng, &dims, 0.2);
        let s = spec(&a, r);
        let t = StrongGraphParam::for_spec(&s);
        let trace = components_process_traced(
            &to_config(&set, &dims, Geometry::Cube),
            &UpdateFamily::counting(&s),
            t,
            MergeOrder::Canonical,
        )
        .unwrap();
        for c in trace.merges() {
            let (d1, d2) = c.parents.unwrap();
            assert!(c.diam <= d1 + d2 + t.threshold(), "{} > {d1} + {d2} + {}", c.diam, t.threshold());
        }
    }
}

#[test]
fn strong_components_match_quadratic_bfs() {
    let mut rng = rng(25);
    for _ in 0..300 {
        let d = rng.random_range(1..=3);
        let dims: Vec<usize> = (0..d).map(|_| rng.random_range(1..=9)).collect();
        let sites: Vec<Pt> = random_set(&mut rng, &dims, 0.1).into_iter().collect();
        let t = rng.random_range(1..=4);
        let got = strong_components(&sites, StrongGraphParam::new(t).unwrap()).unwrap();
        let mut got_sorted: Vec<Vec<Pt>> = got
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        got_sorted.sort();
        assert_eq!(got_sorted, components(&sites, t as i64));
    }
}

#[test]
fn internally_filled_implies_internally_spanned() {
    let mut rng = rng(26);
    let s = spec(&[1, 2], 3);
    let fam = UpdateFamily::counting(&s);
    let t = StrongGraphParam::for_spec(&s);
    let mut filled_seen = 0;
    for _ in 0..400 {
        let dims = [8, 8];
        let set = random_set(&mut rng, &dims, 0.35);
        let cfg = to_config(&set, &dims, Geometry::Cube);
        let lo: Vec<i64> = (0..2).map(|_| rng.random_range(1..=8)).collect();
        let hi: Vec<i64> = lo.iter().map(|&l| rng.random_range(l..=8)).collect();
        let block = Block::new(lo, hi).unwrap();
        if is_internally_filled(&block, &cfg, &fam).unwrap() {
            filled_seen += 1;
            assert!(is_internally_spanned(&block, &cfg, &fam, t).unwrap());
        }
    }
    assert!(filled_seen > 20, "too few filled blocks sampled: {filled_seen}");
}

#[test]
fn block_witnesses_are_in_range_and_internally_spanned() {
    let mut rng = rng(27);
    let mut checked = 0;
    for _ in 0..120 {
        let (a, r) = if rng.random_bool(0.5) { (vec![1, 1], 2) } else { (vec![1, 2], 3) };
        let dims = [rng.random_range(4..=14), rng.random_range(4..=14)];
        let set = random_set(&mut rng, &dims, 0.12);
        let s = spec(&a, r);
        let fam = make_nr_family(&s, 1024);
        let t = StrongGraphParam::for_spec(&s);
        let cfg = to_config(&set, &dims, Geometry::Cube);
        let closed = closure_nr(&set, &dims, &a, r, false);
        let dm = diam(&closed.iter().cloned().collect::<Vec<_>>(), t.threshold() as i64);
        let trace = components_process_traced(&cfg, &fam, t, MergeOrder::Canonical).unwrap();
        assert_eq!(trace.closure_diam(), dm);
        for k in 1..=dm {
            let w = witness_from_trace(&trace, k, WitnessMode::Block).unwrap();
            let Witness::Block { block, diam } = &w else { panic!("mode mismatch") };
            assert_eq!(block.long(), *diam);
            assert!(k <= *diam && *diam <= t.threshold() * k, "k={k} diam={diam}");
            assert!(is_internally_spanned(block, &cfg, &fam, t).unwrap());
            checked += 1;
        }
        assert!(matches!(
            al_witness(&cfg, &fam, t, dm + 1, WitnessMode::Block),
            Err(Error::NoWitness { .. })
        ));
    }
    assert!(checked > 100);
}

#[test]
fn slab_witnesses_meet_their_bounds() {
    let mut rng = rng(28);
    for _ in 0..80 {
        let a = vec![1, 1, 2];
        let s = spec(&a, 3);
        let fam = UpdateFamily::counting(&s);
        let t = StrongGraphParam::for_spec(&s);
        let dims = [6, 6, 6];
        let set = random_set(&mut rng, &dims, 0.12);
        let cfg = to_config(&set, &dims, Geometry::Cube);
        let trace = components_process_traced(&cfg, &fam, t, MergeOrder::Canonical).unwrap();
        let dm = trace.closure_diam();
        for k in 1..=dm {
            for l in 1..=dm {
                let Witness::Slab { block, width_diam, height } =
                    witness_from_trace(&trace, k, WitnessMode::Slab { width: l }).unwrap()
                else {
                    panic!("mode mismatch")
                };
                let tt = t.threshold();
                assert!(width_diam >= l || height >= k);
                assert!(width_diam <= tt * l && height <= tt * k, "w={width_diam} h={height} l={l} k={k}");
                assert!(is_internally_spanned(&block, &cfg, &fam, t).unwrap());
            }
        }
    }
}

#[test]
fn supercritical_family_is_rejected() {
    let s = spec(&[1, 2], 2);
    let cfg = to_config(&BTreeSet::from([vec![1, 1]]), &[3, 3], Geometry::Cube);
    let err = components_process(&cfg, &UpdateFamily::counting(&s), StrongGraphParam::for_spec(&s));
    assert!(matches!(err, Err(Error::SupercriticalFamily { .. })));
}
