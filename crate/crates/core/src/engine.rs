//! Bootstrap closure dynamics.
//!
//! One synchronous step infects every healthy site `x` such that `x + X` is
//! fully infected for some rule `X` of the family. The closure `⟨A⟩` is the
//! least fixed point above `A`. Two closure routes share the same contract:
//!
//! * [`closure_generic`] iterates [`step`] until nothing changes. It works for
//!   any [`UpdateFamily`] and serves as the oracle.
//! * [`closure_counting`] keeps a per-site count of infected neighbours and a
//!   FIFO frontier. It applies to `𝒩ᵣ` families, where "some `r`-subset of
//!   `N` is infected" is the same as "at least `r` neighbours are infected".
//!
//! Offsets are counted per offset, not per distinct site, so on a small
//! torus where two offsets land on the same site both routes still agree.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{neighborhood_offsets, Configuration, Geometry, NeighborhoodSpec, Offset};

/// Largest number of rules [`make_nr_family`] materializes by default.
pub const DEFAULT_RULE_CAP: u128 = 1024;

pub type Rule = Vec<Offset>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Explicit(Vec<Rule>),
    /// All `r`-subsets of the neighbourhood of `origin`, never enumerated.
    Counting,
}

/// A finite family of finite rules, each a set of nonzero offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateFamily {
    dim: usize,
    repr: Repr,
    origin: Option<NeighborhoodSpec>,
}

/// `C(n, k)` in 128-bit arithmetic, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn k_subsets(items: &[Offset], k: usize) -> Vec<Rule> {
    fn go(items: &[Offset], k: usize, start: usize, cur: &mut Vec<Offset>, out: &mut Vec<Rule>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=items.len() - (k - cur.len()) {
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

impl UpdateFamily {
    /// A family given by explicit rules. Duplicate offsets within a rule and
    /// duplicate rules are merged.
    pub fn explicit(rules: Vec<Rule>) -> Result<Self> {
        let dim = rules
            .first()
            .and_then(|r| r.first())
            .map(|o| o.len())
            .ok_or_else(|| Error::InvalidFamily("family must contain a nonempty rule".into()))?;
        if dim == 0 {
            return Err(Error::InvalidFamily("offsets must have dimension ≥ 1".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(rules.len());
        for rule in rules {
            if rule.is_empty() {
                return Err(Error::InvalidFamily("rules must be nonempty".into()));
            }
            let set: BTreeSet<Offset> = rule.into_iter().collect();
            for o in &set {
                if o.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: o.len(),
                    });
                }
                if o.iter().all(|&x| x == 0) {
                    return Err(Error::InvalidFamily("rules may not contain the zero vector".into()));
                }
            }
            let rule: Rule = set.into_iter().collect();
            if seen.insert(rule.clone()) {
                out.push(rule);
            }
        }
        Ok(Self {
            dim,
            repr: Repr::Explicit(out),
            origin: None,
        })
    }

    /// `𝒩ᵣ` in implicit (threshold) form.
    pub fn counting(spec: &NeighborhoodSpec) -> Self {
        Self {
            dim: spec.dim(),
            repr: Repr::Counting,
            origin: Some(spec.clone()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The `𝒩ᵣ` parameters this family was built from, if any.
    pub fn nr_spec(&self) -> Option<&NeighborhoodSpec> {
        self.origin.as_ref()
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self.repr, Repr::Counting)
    }

    /// Explicit rules, when materialized.
    pub fn rules(&self) -> Option<&[Rule]> {
        match &self.repr {
            Repr::Explicit(r) => Some(r),
            Repr::Counting => None,
        }
    }

    pub fn rule_count(&self) -> u128 {
        match (&self.repr, &self.origin) {
            (Repr::Explicit(r), _) => r.len() as u128,
            (Repr::Counting, Some(s)) => binomial(s.neighborhood_size(), s.threshold()),
            (Repr::Counting, None) => unreachable!("counting families carry their spec"),
        }
    }

    /// Explicit rule list; errors when it would exceed `cap` rules.
    pub fn materialize(&self, cap: u128) -> Result<Vec<Rule>> {
        match (&self.repr, &self.origin) {
            (Repr::Explicit(r), _) => Ok(r.clone()),
            (Repr::Counting, Some(spec)) => {
                let rules = self.rule_count();
                if rules > cap {
                    return Err(Error::FamilyTooLarge { rules, cap });
                }
                Ok(k_subsets(&neighborhood_offsets(spec), spec.threshold()))
            }
            (Repr::Counting, None) => unreachable!("counting families carry their spec"),
        }
    }
}

/// The family of all `r`-subsets of the `𝒩` neighbourhood. Materialized
/// explicitly when `C(|N|, r) ≤ cap`, otherwise kept in threshold form.
pub fn make_nr_family(spec: &NeighborhoodSpec, cap: u128) -> UpdateFamily {
    let counting = UpdateFamily::counting(spec);
    match counting.materialize(cap) {
        Ok(rules) => UpdateFamily {
            dim: spec.dim(),
            repr: Repr::Explicit(rules),
            origin: Some(spec.clone()),
        },
        Err(_) => counting,
    }
}

fn check_dims(config: &Configuration, family: &UpdateFamily) {
    assert_eq!(
        config.dim(),
        family.dim(),
        "family dimension must match configuration dimension"
    );
}

/// Index of `coords + offset`, honouring the boundary semantics.
#[inline]
fn shifted_index(config: &Configuration, coords: &[i64], offset: &[i64]) -> Option<usize> {
    let dims = config.dims();
    let strides = config.strides();
    let mut idx = 0usize;
    for j in 0..coords.len() {
        let l = dims[j] as i64;
        let mut c = coords[j] + offset[j];
        if c < 1 || c > l {
            match config.geometry() {
                Geometry::Cube => return None,
                Geometry::Torus => c = (c - 1).rem_euclid(l) + 1,
            }
        }
        idx += (c - 1) as usize * strides[j];
    }
    Some(idx)
}

/// Whether the healthy site at `coords` becomes infected in one step.
fn fires(config: &Configuration, family: &UpdateFamily, offsets: &[Offset], coords: &[i64]) -> bool {
    let infected = |o: &Offset| shifted_index(config, coords, o).is_some_and(|i| config.is_infected(i));
    match &family.repr {
        Repr::Explicit(rules) => rules.iter().any(|rule| rule.iter().all(infected)),
        Repr::Counting => {
            let r = family.origin.as_ref().expect("counting spec").threshold();
            offsets.iter().filter(|o| infected(o)).count() >= r
        }
    }
}

/// One synchronous update. Infected sites stay infected.
///
/// Panics if the family and configuration dimensions differ.
pub fn step(config: &Configuration, family: &UpdateFamily) -> Configuration {
    check_dims(config, family);
    let offsets = match &family.origin {
        Some(spec) if family.is_implicit() => neighborhood_offsets(spec),
        _ => Vec::new(),
    };
    let mut next = config.clone();
    let mut coords = vec![0i64; config.dim()];
    for idx in 0..config.len() {
        if config.is_infected(idx) {
            continue;
        }
        config.write_coords(idx, &mut coords);
        if fires(config, family, &offsets, &coords) {
            next.infect(idx);
        }
    }
    next
}

/// Closure by iterating [`step`] to a fixed point.
pub fn closure_generic(config: &Configuration, family: &UpdateFamily) -> Configuration {
    let mut cur = config.clone();
    loop {
        let next = step(&cur, family);
        if next.infected_count() == cur.infected_count() {
            return next;
        }
        cur = next;
    }
}

/// Reusable buffers for [`closure_counting_in_place`].
#[derive(Debug, Default)]
pub struct ClosureWorkspace {
    counts: Vec<u16>,
    queue: Vec<u32>,
    coords: Vec<i64>,
}

impl ClosureWorkspace {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Counting closure of an `𝒩ᵣ` family, in place.
///
/// Every infected site is dequeued once and bumps the counters of its
/// healthy neighbours; a counter reaching `r` infects and enqueues the site.
/// Work is `O(|N|)` per infected site.
pub fn closure_counting_in_place(
    config: &mut Configuration,
    spec: &NeighborhoodSpec,
    ws: &mut ClosureWorkspace,
) {
    assert_eq!(config.dim(), spec.dim(), "spec dimension must match configuration");
    let n = config.len();
    let r = spec.threshold();
    assert!(spec.neighborhood_size() < u16::MAX as usize, "neighbourhood too large");
    let r = r as u16;
    let steps: Vec<(usize, i64)> = spec.axis_steps();
    let dims: Vec<i64> = config.dims().iter().map(|&l| l as i64).collect();
    let strides: Vec<i64> = config.strides().iter().map(|&s| s as i64).collect();
    let torus = config.geometry() == Geometry::Torus;

    ws.counts.clear();
    ws.counts.resize(n, 0);
    ws.queue.clear();
    ws.queue.extend(config.infected_indices().map(|i| i as u32));
    ws.coords.clear();
    ws.coords.resize(config.dim(), 0);

    let mut head = 0;
    while head < ws.queue.len() {
        let x = ws.queue[head] as usize;
        head += 1;
        config.write_coords(x, &mut ws.coords);
        for &(axis, m) in &steps {
            let c = ws.coords[axis] + m;
            let l = dims[axis];
            let delta = if (1..=l).contains(&c) {
                m
            } else if torus {
                (c - 1).rem_euclid(l) + 1 - ws.coords[axis]
            } else {
                continue;
            };
            let y = (x as i64 + delta * strides[axis]) as usize;
            if config.is_infected(y) {
                continue;
            }
            let cnt = &mut ws.counts[y];
            *cnt += 1;
            if *cnt >= r {
                config.infect(y);
                ws.queue.push(y as u32);
            }
        }
    }
}

/// Counting closure of an `𝒩ᵣ` family.
pub fn closure_counting(config: &Configuration, spec: &NeighborhoodSpec) -> Configuration {
    let mut out = config.clone();
    closure_counting_in_place(&mut out, spec, &mut ClosureWorkspace::new());
    out
}

/// `⟨A⟩`: counting route for `𝒩ᵣ` families, generic route otherwise.
///
/// Panics if the family and configuration dimensions differ.
pub fn closure(config: &Configuration, family: &UpdateFamily) -> Configuration {
    check_dims(config, family);
    match family.nr_spec() {
        Some(spec) => closure_counting(config, spec),
        None => closure_generic(config, family),
    }
}

/// Whether `⟨A⟩` is the whole domain.
pub fn percolates(config: &Configuration, family: &UpdateFamily) -> bool {
    closure(config, family).is_full()
}
