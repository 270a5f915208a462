use std::collections::BTreeMap;

use super::estimators::percolation_successes;
use super::stats::TrialEstimate;
use crate::error::{Error, Result};
use crate::lattice::{Geometry, NeighborhoodSpec};

/// Knobs of the critical-length search.
#[derive(Debug, Clone, PartialEq)]
pub struct LcSearch {
    /// Trials per batch; every probe runs at least one batch.
    pub trials_per_probe: u64,
    /// A probe stops adding batches once it has this many trials.
    pub max_trials_per_probe: u64,
    /// Doubling gives up past this length.
    pub max_length: usize,
    pub geometry: Geometry,
}

impl LcSearch {
    pub fn new(trials_per_probe: u64) -> Self {
        Self {
            trials_per_probe,
            max_trials_per_probe: 4 * trials_per_probe,
            max_length: 1 << 16,
            geometry: Geometry::Cube,
        }
    }
}

/// One length probed during the search.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub length: usize,
    pub estimate: TrialEstimate,
    /// `estimate ≥ 1/2`.
    pub above: bool,
    /// The interval excludes 1/2.
    pub resolved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcResult {
    /// Smallest probed `L` judged to percolate with probability ≥ 1/2.
    pub lc: usize,
    /// `(lo, hi)` with `lo` judged below and `hi = lc` judged above;
    /// `lo = 0` when `L = 1` is already above.
    pub bracket: (usize, usize),
    /// Probes in increasing length.
    pub probes: Vec<Probe>,
    /// Some probe hit its trial budget with the interval still covering 1/2.
    pub unresolved: bool,
    /// Two probes with disjoint intervals disagree with monotonicity in `L`.
    pub nonmonotone: bool,
}

struct Prober<'a> {
    spec: &'a NeighborhoodSpec,
    p: f64,
    seed: u64,
    search: &'a LcSearch,
    probes: BTreeMap<usize, Probe>,
}

impl Prober<'_> {
    /// Sequential test at length `l`: add batches until the Wilson interval
    /// excludes 1/2 or the budget is spent.
    fn probe(&mut self, l: usize) -> Result<bool> {
        if let Some(pr) = self.probes.get(&l) {
            return Ok(pr.above);
        }
        let batch = self.search.trials_per_probe;
        let (mut hits, mut done) = (0u64, 0u64);
        let estimate = loop {
            hits += percolation_successes(
                self.spec,
                self.search.geometry,
                l,
                self.p,
                done..done + batch,
                self.seed,
            )?;
            done += batch;
            let e = TrialEstimate::from_counts(hits, done, self.seed);
            if !e.covers(0.5) || done >= self.search.max_trials_per_probe {
                break e;
            }
        };
        let above = estimate.estimate >= 0.5;
        let resolved = !estimate.covers(0.5);
        self.probes.insert(
            l,
            Probe {
                length: l,
                estimate,
                above,
                resolved,
            },
        );
        Ok(above)
    }
}

/// `L̂_c = min{L : ℙ_p(⟨A⟩ = [L]^d) ≥ 1/2}`, by doubling then bisection.
///
/// Every probe uses the same seed, so probes at different lengths share
/// trial streams.
pub fn critical_length(spec: &NeighborhoodSpec, p: f64, search: &LcSearch, seed: u64) -> Result<LcResult> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1)")));
    }
    if search.trials_per_probe == 0 || search.max_trials_per_probe < search.trials_per_probe {
        return Err(Error::InvalidParameter(
            "need 1 ≤ trials_per_probe ≤ max_trials_per_probe".into(),
        ));
    }
    let mut prober = Prober {
        spec,
        p,
        seed,
        search,
        probes: BTreeMap::new(),
    };

    let (mut lo, mut hi) = (0usize, 1usize);
    while !prober.probe(hi)? {
        lo = hi;
        hi *= 2;
        if hi > search.max_length {
            return Err(Error::NumericDomain(format!(
                "no crossing of 1/2 up to L = {} at p = {p}",
                search.max_length
            )));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if prober.probe(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let probes: Vec<Probe> = prober.probes.into_values().collect();
    let unresolved = probes.iter().any(|pr| !pr.resolved);
    let nonmonotone = probes.iter().enumerate().any(|(i, a)| {
        probes[i + 1..]
            .iter()
            .any(|b| b.estimate.ci_high < a.estimate.ci_low)
    });
    Ok(LcResult {
        lc: hi,
        bracket: (lo, hi),
        probes,
        unresolved,
        nonmonotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: &[usize], r: usize) -> NeighborhoodSpec {
        NeighborhoodSpec::new(a.to_vec(), r).unwrap()
    }

    #[test]
    fn high_density_gives_unit_length() {
        for (a, r) in [(vec![1, 1], 2), (vec![1, 2], 3), (vec![1, 1, 1], 3)] {
            let res = critical_length(&spec(&a, r), 0.6, &LcSearch::new(400), 1).unwrap();
            assert_eq!(res.lc, 1);
            assert_eq!(res.bracket, (0, 1));
        }
    }

    #[test]
    fn bracket_is_consistent_with_probes() {
        let res = critical_length(&spec(&[1, 1], 2), 0.3, &LcSearch::new(300), 9).unwrap();
        assert!(res.lc >= 3);
        let (lo, hi) = res.bracket;
        assert_eq!(hi, res.lc);
        assert_eq!(lo + 1, hi);
        let at = |l| res.probes.iter().find(|p| p.length == l).unwrap();
        assert!(at(hi).above);
        assert!(!at(lo).above);
        assert!(res.probes.windows(2).all(|w| w[0].length < w[1].length));
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = spec(&[1, 1], 2);
        assert!(critical_length(&s, 0.0, &LcSearch::new(10), 0).is_err());
        assert!(critical_length(&s, 1.0, &LcSearch::new(10), 0).is_err());
        assert!(critical_length(&s, 0.5, &LcSearch::new(0), 0).is_err());
        let tiny = LcSearch {
            max_length: 2,
            ..LcSearch::new(50)
        };
        assert!(critical_length(&s, 0.05, &tiny, 0).is_err());
    }
}
