use std::ops::Range;

use rayon::prelude::*;

use super::rng::{sample_bernoulli, trial_rng};
use super::stats::TrialEstimate;
use crate::engine::{closure_counting_in_place, ClosureWorkspace};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Geometry, NeighborhoodSpec};
use crate::spanning::{InfectedComponents, StrongGraphParam};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_positive(name: &str, x: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::InvalidParameter(format!("{name} must be ≥ 1")));
    }
    Ok(())
}

/// Per-thread scratch: one configuration buffer plus closure workspace.
struct Worker {
    config: Configuration,
    ws: ClosureWorkspace,
}

impl Worker {
    fn new(shape: &Configuration) -> Self {
        Self {
            config: shape.clone(),
            ws: ClosureWorkspace::new(),
        }
    }

    /// Samples trial `t` into the buffer and closes it.
    fn sample_and_close(&mut self, spec: &NeighborhoodSpec, p: f64, seed: u64, t: u64, seed_block: Option<&[usize]>) {
        sample_bernoulli(&mut self.config, p, &mut trial_rng(seed, t));
        if let Some(sides) = seed_block {
            infect_lower_block(&mut self.config, sides);
        }
        closure_counting_in_place(&mut self.config, spec, &mut self.ws);
    }
}

fn infect_lower_block(config: &mut Configuration, sides: &[usize]) {
    let d = sides.len();
    let mut site = vec![1i64; d];
    loop {
        let idx = config.index_of(&site).expect("seed block inside domain");
        config.infect(idx);
        let Some(j) = (0..d).rev().find(|&j| (site[j] as usize) < sides[j]) else { break };
        site[j] += 1;
        for x in &mut site[j + 1..] {
            *x = 1;
        }
    }
}

/// Runs trials `range` in parallel and sums the per-trial outputs.
fn run_trials<T, F>(shape: &Configuration, range: Range<u64>, f: F) -> T
where
    T: Send + std::iter::Sum<T>,
    F: Fn(&mut Worker, u64) -> T + Sync + Send,
{
    range
        .into_par_iter()
        .map_init(|| Worker::new(shape), |w, t| f(w, t))
        .sum()
}

/// Number of percolating trials among `trials` on `[L]^d`.
pub fn percolation_successes(
    spec: &NeighborhoodSpec,
    geometry: Geometry,
    length: usize,
    p: f64,
    trials: Range<u64>,
    seed: u64,
) -> Result<u64> {
    check_probability(p)?;
    let shape = Configuration::cube(spec.dim(), length, geometry)?;
    Ok(run_trials(&shape, trials, |w, t| {
        w.sample_and_close(spec, p, seed, t, None);
        w.config.is_full() as u64
    }))
}

/// `ℙ_p(⟨A⟩ = [L]^d)` with a 95% Wilson interval.
pub fn percolation_probability(
    spec: &NeighborhoodSpec,
    geometry: Geometry,
    length: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialEstimate> {
    check_positive("trials", trials)?;
    let hits = percolation_successes(spec, geometry, length, p, 0..trials, seed)?;
    Ok(TrialEstimate::from_counts(hits, trials, seed))
}

/// `ℙ_p(diam(⟨A⟩) ≥ threshold)` on the cube `[L]^d`, strong graph `t = 2a_d`.
pub fn diam_tail_probability(
    spec: &NeighborhoodSpec,
    length: usize,
    p: f64,
    threshold: usize,
    trials: u64,
    seed: u64,
) -> Result<TrialEstimate> {
    check_probability(p)?;
    check_positive("trials", trials)?;
    check_positive("threshold", threshold as u64)?;
    let shape = Configuration::cube(spec.dim(), length, Geometry::Cube)?;
    let param = StrongGraphParam::for_spec(spec);
    let hits = run_trials(&shape, 0..trials, |w, t| {
        w.sample_and_close(spec, p, seed, t, None);
        (InfectedComponents::new(&w.config, param).diam() >= threshold) as u64
    });
    Ok(TrialEstimate::from_counts(hits, trials, seed))
}

/// Fraction of trials in which the lower-corner block with sides
/// `seed_block` together with a Bernoulli(`p`) sample elsewhere fills
/// `[L]^d`.
pub fn seeded_growth(
    spec: &NeighborhoodSpec,
    length: usize,
    seed_block: &[usize],
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialEstimate> {
    check_probability(p)?;
    check_positive("trials", trials)?;
    if seed_block.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: seed_block.len(),
        });
    }
    if seed_block.iter().any(|&s| s == 0 || s > length) {
        return Err(Error::OutOfBounds(format!(
            "seed block {seed_block:?} does not fit in [{length}]^{}",
            spec.dim()
        )));
    }
    let shape = Configuration::cube(spec.dim(), length, Geometry::Cube)?;
    let hits = run_trials(&shape, 0..trials, |w, t| {
        w.sample_and_close(spec, p, seed, t, Some(seed_block));
        w.config.is_full() as u64
    });
    Ok(TrialEstimate::from_counts(hits, trials, seed))
}

/// Statistics of the strong component `𝒦` of the centre site.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Empirical `𝔼|𝒦|`, with `|𝒦| = 0` when the centre stays healthy.
    pub mean_size: f64,
    /// Empirical `ℙ(diam 𝒦 ≥ cutoff)`.
    pub diam_tail: f64,
    pub cutoff: f64,
    /// Empirical `𝔼(|𝒦| | diam 𝒦 ≤ cutoff)`; `None` if no trial qualifies.
    pub conditional_mean_size: Option<f64>,
    /// Empirical `𝔼(|𝒦|·1{diam 𝒦 ≤ cutoff})`.
    pub restricted_mean_size: f64,
    pub conditioned_trials: u64,
    /// Trials in which the centre is infected in the closure.
    pub center_infected: u64,
    pub trials: u64,
    pub seed: u64,
}

/// `(⌊N/2⌋, …, ⌊N/2⌋)`, 1-based, clamped to the domain for `N = 1`.
pub fn center_site(d: usize, n: usize) -> Vec<i64> {
    vec![(n / 2).max(1) as i64; d]
}

#[derive(Default)]
struct ClusterSums {
    size: u64,
    tail: u64,
    infected: u64,
    conditioned: u64,
    conditioned_size: u64,
}

impl std::iter::Sum for ClusterSums {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ClusterSums::default(), |a, b| ClusterSums {
            size: a.size + b.size,
            tail: a.tail + b.tail,
            infected: a.infected + b.infected,
            conditioned: a.conditioned + b.conditioned,
            conditioned_size: a.conditioned_size + b.conditioned_size,
        })
    }
}

/// Centre-cluster statistics on `[N]^{d'}` for the `d'`-dimensional family
/// `spec`, strong graph `t = 2a_{d'}`.
pub fn center_cluster_stats(
    spec: &NeighborhoodSpec,
    n: usize,
    p: f64,
    cutoff: f64,
    trials: u64,
    seed: u64,
) -> Result<ClusterStats> {
    check_probability(p)?;
    check_positive("trials", trials)?;
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let shape = Configuration::cube(spec.dim(), n, Geometry::Cube)?;
    let center = shape
        .index_of(&center_site(spec.dim(), n))
        .expect("centre inside domain");
    let param = StrongGraphParam::for_spec(spec);
    let sums: ClusterSums = run_trials(&shape, 0..trials, |w, t| {
        w.sample_and_close(spec, p, seed, t, None);
        let (size, diam) = if w.config.is_full() {
            (w.config.len() as u64, n)
        } else if w.config.is_infected(center) {
            let comps = InfectedComponents::new(&w.config, param);
            let k = comps.component_of(center).expect("centre infected");
            (k.size as u64, k.long())
        } else {
            (0, 0)
        };
        let small = diam as f64 <= cutoff;
        ClusterSums {
            size,
            tail: (diam as f64 >= cutoff) as u64,
            infected: (size > 0) as u64,
            conditioned: small as u64,
            conditioned_size: if small { size } else { 0 },
        }
    });
    let n_trials = trials as f64;
    Ok(ClusterStats {
        mean_size: sums.size as f64 / n_trials,
        diam_tail: sums.tail as f64 / n_trials,
        cutoff,
        conditional_mean_size: (sums.conditioned > 0)
            .then(|| sums.conditioned_size as f64 / sums.conditioned as f64),
        restricted_mean_size: sums.conditioned_size as f64 / n_trials,
        conditioned_trials: sums.conditioned,
        center_infected: sums.infected,
        trials,
        seed,
    })
}
