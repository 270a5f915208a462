//! Strong connectivity, diameters and spanning.
//!
//! Two sites are strongly adjacent when `‖u − v‖_∞ ≤ t`; for the
//! `d`-dimensional process `t = 2a_d`. `diam(T)` is the largest `long` of a
//! strongly connected subset of `T`, which is attained on a strong
//! component. Distances never wrap, even on the torus.
//!
//! Strong components are found by bucketing points into cells of side `t`.
//! All points of one cell are pairwise adjacent, so cells are the nodes of a
//! union-find and only neighbouring cells (cell coordinates differing by at
//! most one) need a point-pair check.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{closure, closure_counting_in_place, closure_generic, ClosureWorkspace, UpdateFamily};
use crate::error::{Error, Result};
use crate::families::{classify_nr, CriticalityLabel};
use crate::lattice::{bounding_block, Block, Configuration, Geometry, NeighborhoodSpec, Site};

/// Adjacency radius `t` of the strong graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrongGraphParam(usize);

impl StrongGraphParam {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("strong graph threshold must be ≥ 1".into()));
        }
        Ok(Self(t))
    }

    /// `t = 2a_d`.
    pub fn for_spec(spec: &NeighborhoodSpec) -> Self {
        Self(2 * spec.max_exponent())
    }

    pub fn threshold(&self) -> usize {
        self.0
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }
}

/// Strong-component labels for `n` points stored flat (`coords[i*d..(i+1)*d]`).
/// Labels are numbered by first appearance in point order.
fn label_components(d: usize, coords: &[i64], t: usize) -> (Vec<u32>, usize) {
    let n = coords.len() / d;
    if n == 0 {
        return (Vec::new(), 0);
    }
    let t = t as i64;
    let mut lo = coords[..d].to_vec();
    let mut hi = coords[..d].to_vec();
    for p in coords.chunks_exact(d) {
        for j in 0..d {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    let cell_dims: Vec<u128> = (0..d).map(|j| ((hi[j] - lo[j]) / t + 1) as u128).collect();
    let volume = cell_dims.iter().try_fold(1u128, |acc, &c| acc.checked_mul(c));
    let cell_of = |p: &[i64]| -> Vec<i64> { (0..d).map(|j| (p[j] - lo[j]) / t).collect() };
    let key_of = |c: &[i64]| -> u128 {
        let mut k = 0u128;
        for j in 0..d {
            k = k * cell_dims[j] + c[j] as u128;
        }
        k
    };

    // Group points by cell: `order` lists point ids cell by cell.
    let mut keys: Vec<u128> = coords.chunks_exact(d).map(|p| key_of(&cell_of(p))).collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&i| keys[i as usize]);
    let mut group_keys: Vec<u128> = Vec::new();
    let mut group_start: Vec<usize> = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let k = keys[i as usize];
        if group_keys.last() != Some(&k) {
            group_keys.push(k);
            group_start.push(pos);
        }
    }
    group_start.push(n);
    let groups = group_keys.len();

    // Dense cell → group lookup when the cell box is small; binary search otherwise.
    let dense: Option<Vec<u32>> = match volume {
        Some(v) if v <= (4 * n as u128).max(1 << 16) => {
            let mut table = vec![u32::MAX; v as usize];
            for (g, &k) in group_keys.iter().enumerate() {
                table[k as usize] = g as u32;
            }
            Some(table)
        }
        _ => None,
    };
    let lookup = |k: u128| -> Option<usize> {
        match &dense {
            Some(table) => match table[k as usize] {
                u32::MAX => None,
                g => Some(g as usize),
            },
            None => group_keys.binary_search(&k).ok(),
        }
    };

    // Half of the 3^d − 1 neighbouring cell offsets (lexicographically positive).
    let mut deltas: Vec<Vec<i64>> = Vec::new();
    let mut delta = vec![-1i64; d];
    loop {
        if let Some(first) = delta.iter().position(|&x| x != 0) {
            if delta[first] > 0 {
                deltas.push(delta.clone());
            }
        }
        let Some(j) = (0..d).rev().find(|&j| delta[j] < 1) else { break };
        delta[j] += 1;
        for x in &mut delta[j + 1..] {
            *x = -1;
        }
    }

    let point = |i: u32| &coords[i as usize * d..(i as usize + 1) * d];
    let mut ds = DisjointSet::new(groups);
    let mut cell = vec![0i64; d];
    let mut other = vec![0i64; d];
    for g in 0..groups {
        let first = point(order[group_start[g]]);
        for j in 0..d {
            cell[j] = (first[j] - lo[j]) / t;
        }
        for delta in &deltas {
            let mut inside = true;
            for j in 0..d {
                other[j] = cell[j] + delta[j];
                if other[j] < 0 || other[j] as u128 >= cell_dims[j] {
                    inside = false;
                    break;
                }
            }
            if !inside {
                continue;
            }
            let Some(h) = lookup(key_of(&other)) else { continue };
            if ds.find(g as u32) == ds.find(h as u32) {
                continue;
            }
            let touching = order[group_start[g]..group_start[g + 1]].iter().any(|&a| {
                let pa = point(a);
                order[group_start[h]..group_start[h + 1]].iter().any(|&b| {
                    let pb = point(b);
                    (0..d).all(|j| (pa[j] - pb[j]).abs() <= t)
                })
            });
            if touching {
                ds.union(g as u32, h as u32);
            }
        }
    }

    // Point → group, then canonical relabelling.
    for (g, w) in group_start.windows(2).enumerate() {
        for &i in &order[w[0]..w[1]] {
            keys[i as usize] = g as u128;
        }
    }
    let mut relabel: HashMap<u32, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for &key in &keys {
        let root = ds.find(key as u32);
        let next = relabel.len() as u32;
        labels.push(*relabel.entry(root).or_insert(next));
    }
    let count = relabel.len();
    (labels, count)
}

fn flatten_sites(sites: &BTreeSet<Site>) -> Result<(usize, Vec<i64>)> {
    let Some(first) = sites.first() else {
        return Ok((0, Vec::new()));
    };
    let d = first.len();
    let mut flat = Vec::with_capacity(sites.len() * d);
    for s in sites {
        if s.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.len(),
            });
        }
        flat.extend_from_slice(s);
    }
    Ok((d, flat))
}

/// Partition of `sites` into maximal strongly connected sets. Each component
/// is sorted lexicographically; components are ordered by their least site.
/// Repeated sites are merged.
pub fn strong_components(sites: &[Site], param: StrongGraphParam) -> Result<Vec<Vec<Site>>> {
    let set: BTreeSet<Site> = sites.iter().cloned().collect();
    let (d, flat) = flatten_sites(&set)?;
    if set.is_empty() {
        return Ok(Vec::new());
    }
    let (labels, count) = label_components(d, &flat, param.0);
    let mut out = vec![Vec::new(); count];
    for (site, &l) in set.into_iter().zip(&labels) {
        out[l as usize].push(site);
    }
    Ok(out)
}

/// `diam(S)`: the largest `long` of a strong component; 0 for the empty set.
pub fn diam(sites: &[Site], param: StrongGraphParam) -> Result<usize> {
    let comps = strong_components(sites, param)?;
    comps
        .iter()
        .map(|c| bounding_block(c).map(|b| b.long()))
        .try_fold(0, |m, l| l.map(|l| m.max(l)))
}

/// Size and bounding block of one strong component of a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSummary {
    pub size: usize,
    pub block: Block,
}

impl ComponentSummary {
    pub fn long(&self) -> usize {
        self.block.long()
    }
}

/// Strong components of the infected sites of a configuration.
#[derive(Debug, Clone)]
pub struct InfectedComponents {
    indices: Vec<usize>,
    labels: Vec<u32>,
    summaries: Vec<ComponentSummary>,
}

impl InfectedComponents {
    pub fn new(config: &Configuration, param: StrongGraphParam) -> Self {
        let d = config.dim();
        let indices: Vec<usize> = config.infected_indices().collect();
        let mut flat = vec![0i64; indices.len() * d];
        for (k, &idx) in indices.iter().enumerate() {
            config.write_coords(idx, &mut flat[k * d..(k + 1) * d]);
        }
        let (labels, count) = label_components(d, &flat, param.0);
        let mut blocks: Vec<Option<Block>> = vec![None; count];
        let mut sizes = vec![0usize; count];
        for (k, &l) in labels.iter().enumerate() {
            let p = &flat[k * d..(k + 1) * d];
            sizes[l as usize] += 1;
            match &mut blocks[l as usize] {
                Some(b) => b.extend(p),
                slot => *slot = Some(Block::new(p.to_vec(), p.to_vec()).expect("point block")),
            }
        }
        let summaries = blocks
            .into_iter()
            .zip(sizes)
            .map(|(b, size)| ComponentSummary {
                size,
                block: b.expect("nonempty component"),
            })
            .collect();
        Self {
            indices,
            labels,
            summaries,
        }
    }

    /// Components ordered by least site.
    pub fn summaries(&self) -> &[ComponentSummary] {
        &self.summaries
    }

    /// The component containing site `idx`, if it is infected.
    pub fn component_of(&self, idx: usize) -> Option<&ComponentSummary> {
        let k = self.indices.binary_search(&idx).ok()?;
        Some(&self.summaries[self.labels[k] as usize])
    }

    pub fn diam(&self) -> usize {
        self.summaries.iter().map(|s| s.long()).max().unwrap_or(0)
    }
}

fn check_block(block: &Block, config: &Configuration) -> Result<()> {
    if block.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            expected: config.dim(),
            found: block.dim(),
        });
    }
    if !config.domain_block().contains_block(block) {
        return Err(Error::OutOfBounds(format!(
            "block {block} not inside domain {:?}",
            config.dims()
        )));
    }
    Ok(())
}

/// `I•(R)`: the closure of `A ∩ R`, run with `R` as the whole domain, is `R`.
pub fn is_internally_filled(block: &Block, config: &Configuration, family: &UpdateFamily) -> Result<bool> {
    check_block(block, config)?;
    Ok(closure(&config.restrict(block)?, family).is_full())
}

/// `I×(R)`: some strong component of the closure of `A ∩ R` inside `R` has
/// `R` as its bounding block.
pub fn is_internally_spanned(
    block: &Block,
    config: &Configuration,
    family: &UpdateFamily,
    param: StrongGraphParam,
) -> Result<bool> {
    check_block(block, config)?;
    let local = closure(&config.restrict(block)?, family);
    let whole = local.domain_block();
    Ok(InfectedComponents::new(&local, param)
        .summaries()
        .iter()
        .any(|s| s.block == whole))
}

/// Final collection `𝓡′` of the components process: pairwise disjoint,
/// strongly connected sets whose union is `⟨A⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentCollection {
    sets: Vec<Vec<Site>>,
}

impl ComponentCollection {
    /// Sets sorted internally, ordered by least site.
    pub fn sets(&self) -> &[Vec<Site>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Union of all sets, sorted.
    pub fn union(&self) -> Vec<Site> {
        let mut all: Vec<Site> = self.sets.iter().flatten().cloned().collect();
        all.sort();
        all
    }
}

/// How the next pair to merge is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeOrder {
    /// Lowest `(least site of the union, least site of the other set)` first.
    #[default]
    Canonical,
    /// Uniformly random among mergeable pairs, from this seed.
    Random(u64),
}

/// A set created by the process: an initial singleton or a merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CreatedSet {
    pub block: Block,
    /// `diam` of the set, equal to `long` since every created set is
    /// strongly connected.
    pub diam: usize,
    /// `(diam S₁, diam S₂)` of the merged parents; `None` for singletons.
    pub parents: Option<(usize, usize)>,
}

/// Full record of one run of the components process.
#[derive(Debug, Clone)]
pub struct ProcessTrace {
    pub collection: ComponentCollection,
    /// Every set in creation order: the singletons of `A` (lexicographic),
    /// then one entry per merge.
    pub created: Vec<CreatedSet>,
    pub threshold: usize,
}

impl ProcessTrace {
    /// `diam(⟨A⟩)`, read off the final sets.
    pub fn closure_diam(&self) -> usize {
        self.collection
            .sets
            .iter()
            .map(|s| bounding_block(s).map(|b| b.long()).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn merges(&self) -> impl Iterator<Item = &CreatedSet> {
        self.created.iter().filter(|c| c.parents.is_some())
    }
}

struct Entry {
    sites: Vec<usize>,
    min: usize,
    alive: bool,
    block: Block,
}

/// Closure of `seeds` in the ambient domain of `shape`, touching only sites
/// near the growing set.
fn sparse_closure(shape: &Configuration, spec: &NeighborhoodSpec, seeds: &[usize]) -> Vec<usize> {
    let d = shape.dim();
    let dims: Vec<i64> = shape.dims().iter().map(|&l| l as i64).collect();
    let strides: Vec<i64> = shape.strides().iter().map(|&s| s as i64).collect();
    let torus = shape.geometry() == Geometry::Torus;
    let steps = spec.axis_steps();
    let r = spec.threshold();
    let mut infected: HashSet<usize> = seeds.iter().copied().collect();
    let mut counts: HashMap<usize, usize> = HashMap::new();
    let mut queue: Vec<usize> = seeds.to_vec();
    let mut coords = vec![0i64; d];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        shape.write_coords(x, &mut coords);
        for &(axis, m) in &steps {
            let c = coords[axis] + m;
            let l = dims[axis];
            let delta = if (1..=l).contains(&c) {
                m
            } else if torus {
                (c - 1).rem_euclid(l) + 1 - coords[axis]
            } else {
                continue;
            };
            let y = (x as i64 + delta * strides[axis]) as usize;
            if infected.contains(&y) {
                continue;
            }
            let cnt = counts.entry(y).or_insert(0);
            *cnt += 1;
            if *cnt >= r {
                infected.insert(y);
                queue.push(y);
            }
        }
    }
    let mut out: Vec<usize> = infected.into_iter().collect();
    out.sort_unstable();
    out
}

struct Process<'a> {
    shape: &'a Configuration,
    family: &'a UpdateFamily,
    t: i64,
    box_deltas: Vec<Vec<i64>>,
    entries: Vec<Entry>,
    owners: HashMap<usize, Vec<u32>>,
    adjacency: Vec<Vec<u32>>,
    pairs: BTreeSet<(usize, usize, u32, u32)>,
    created: Vec<CreatedSet>,
}

impl<'a> Process<'a> {
    fn new(shape: &'a Configuration, family: &'a UpdateFamily, t: usize) -> Self {
        let d = shape.dim();
        let t = t as i64;
        let mut box_deltas = Vec::new();
        let mut delta = vec![-t; d];
        loop {
            box_deltas.push(delta.clone());
            let Some(j) = (0..d).rev().find(|&j| delta[j] < t) else { break };
            delta[j] += 1;
            for x in &mut delta[j + 1..] {
                *x = -t;
            }
        }
        Self {
            shape,
            family,
            t,
            box_deltas,
            entries: Vec::new(),
            owners: HashMap::new(),
            adjacency: Vec::new(),
            pairs: BTreeSet::new(),
            created: Vec::new(),
        }
    }

    fn block_of(&self, sites: &[usize]) -> Block {
        let mut it = sites.iter().map(|&i| self.shape.site_of(i));
        let first = it.next().expect("nonempty set");
        let mut b = Block::new(first.clone(), first).expect("point block");
        for s in it {
            b.extend(&s);
        }
        b
    }

    /// Alive sets owning a site within distance `t` of `x`.
    fn sets_near(&self, x: usize, out: &mut HashSet<u32>) {
        let d = self.shape.dim();
        let base = self.shape.site_of(x);
        let mut y = vec![0i64; d];
        for delta in &self.box_deltas {
            for j in 0..d {
                y[j] = base[j] + delta[j];
            }
            if let Some(idx) = self.shape.index_of(&y) {
                if let Some(ids) = self.owners.get(&idx) {
                    out.extend(ids.iter().copied().filter(|&id| self.entries[id as usize].alive));
                }
            }
        }
    }

    fn add_set(&mut self, sites: Vec<usize>, parents: Option<(u32, u32)>) -> u32 {
        let id = self.entries.len() as u32;
        let block = self.block_of(&sites);
        for &x in &sites {
            self.owners.entry(x).or_default().push(id);
        }
        let parent_diams = parents.map(|(a, b)| {
            (
                self.entries[a as usize].block.long(),
                self.entries[b as usize].block.long(),
            )
        });
        self.created.push(CreatedSet {
            block: block.clone(),
            diam: block.long(),
            parents: parent_diams,
        });
        self.entries.push(Entry {
            min: sites[0],
            sites,
            alive: true,
            block,
        });
        self.adjacency.push(Vec::new());
        id
    }

    fn link(&mut self, a: u32, b: u32) {
        self.adjacency[a as usize].push(b);
        self.adjacency[b as usize].push(a);
        let (ma, mb) = (self.entries[a as usize].min, self.entries[b as usize].min);
        let key = if (ma, a) <= (mb, b) { (ma, mb, a, b) } else { (mb, ma, b, a) };
        self.pairs.insert(key);
    }

    fn next_pair(&mut self, rng: Option<&mut ChaCha8Rng>) -> Option<(u32, u32)> {
        let alive = |e: &Vec<Entry>, k: &(usize, usize, u32, u32)| e[k.2 as usize].alive && e[k.3 as usize].alive;
        match rng {
            None => {
                while let Some(k) = self.pairs.pop_first() {
                    if alive(&self.entries, &k) {
                        return Some((k.2, k.3));
                    }
                }
                None
            }
            Some(rng) => {
                let entries = &self.entries;
                self.pairs.retain(|k| alive(entries, k));
                if self.pairs.is_empty() {
                    return None;
                }
                let k = *self.pairs.iter().nth(rng.random_range(0..self.pairs.len())).expect("in range");
                self.pairs.remove(&k);
                Some((k.2, k.3))
            }
        }
    }

    fn merged_closure(&self, a: u32, b: u32) -> Vec<usize> {
        let mut seeds: Vec<usize> = self.entries[a as usize].sites.clone();
        seeds.extend_from_slice(&self.entries[b as usize].sites);
        seeds.sort_unstable();
        seeds.dedup();
        match self.family.nr_spec() {
            Some(spec) => sparse_closure(self.shape, spec, &seeds),
            None => {
                let mut c = Configuration::new(self.shape.dims().to_vec(), self.shape.geometry())
                    .expect("valid shape");
                for &x in &seeds {
                    c.infect(x);
                }
                closure_generic(&c, self.family).infected_indices().collect()
            }
        }
    }

    fn run(mut self, seeds: &[usize], order: MergeOrder) -> ProcessTrace {
        for &x in seeds {
            self.add_set(vec![x], None);
        }
        for id in 0..self.entries.len() as u32 {
            let mut near = HashSet::new();
            self.sets_near(self.entries[id as usize].min, &mut near);
            for other in near {
                if other > id {
                    self.link(id, other);
                }
            }
        }

        let mut rng = match order {
            MergeOrder::Canonical => None,
            MergeOrder::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        while let Some((a, b)) = self.next_pair(rng.as_mut()) {
            let sites = self.merged_closure(a, b);
            let old: HashSet<usize> = self.entries[a as usize]
                .sites
                .iter()
                .chain(&self.entries[b as usize].sites)
                .copied()
                .collect();
            self.entries[a as usize].alive = false;
            self.entries[b as usize].alive = false;
            let fresh: Vec<usize> = sites.iter().copied().filter(|x| !old.contains(x)).collect();
            let id = self.add_set(sites, Some((a, b)));

            let mut near: HashSet<u32> = self.adjacency[a as usize]
                .iter()
                .chain(&self.adjacency[b as usize])
                .copied()
                .filter(|&o| self.entries[o as usize].alive)
                .collect();
            for x in fresh {
                self.sets_near(x, &mut near);
            }
            near.remove(&id);
            for other in near {
                self.link(id, other);
            }
        }

        let mut finals: Vec<&Entry> = self.entries.iter().filter(|e| e.alive).collect();
        finals.sort_by_key(|e| e.min);
        let sets = finals
            .into_iter()
            .map(|e| e.sites.iter().map(|&i| self.shape.site_of(i)).collect())
            .collect();
        ProcessTrace {
            collection: ComponentCollection { sets },
            created: self.created,
            threshold: self.t as usize,
        }
    }
}

fn check_not_supercritical(family: &UpdateFamily) -> Result<()> {
    if let Some(spec) = family.nr_spec() {
        if classify_nr(spec) == CriticalityLabel::Supercritical {
            return Err(Error::SupercriticalFamily {
                r: spec.threshold(),
                a_max: spec.max_exponent(),
            });
        }
    }
    Ok(())
}

/// Components process with an explicit merge order, keeping the full trace.
///
/// Starting from the singletons of `A`, repeatedly pick two sets whose
/// union is strongly connected and replace them by the closure of the union,
/// taken in the ambient domain. Stops when no such pair remains.
pub fn components_process_traced(
    config: &Configuration,
    family: &UpdateFamily,
    param: StrongGraphParam,
    order: MergeOrder,
) -> Result<ProcessTrace> {
    if config.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            expected: config.dim(),
            found: family.dim(),
        });
    }
    check_not_supercritical(family)?;
    let seeds: Vec<usize> = config.infected_indices().collect();
    Ok(Process::new(config, family, param.0).run(&seeds, order))
}

/// Final collection of the components process, canonical merge order.
pub fn components_process(
    config: &Configuration,
    family: &UpdateFamily,
    param: StrongGraphParam,
) -> Result<ComponentCollection> {
    components_process_traced(config, family, param, MergeOrder::Canonical).map(|t| t.collection)
}

/// Which Aizenman–Lebowitz statement to extract a witness for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessMode {
    /// A block `R` with `k ≤ diam(R) ≤ t·k`.
    Block,
    /// A block `W × [h]`, `h` along the last axis, with `diam(W) ≤ t·l`,
    /// `h ≤ t·k` and `diam(W) ≥ l` or `h ≥ k`.
    Slab { width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Block { block: Block, diam: usize },
    Slab { block: Block, width_diam: usize, height: usize },
}

impl Witness {
    pub fn block(&self) -> &Block {
        match self {
            Witness::Block { block, .. } | Witness::Slab { block, .. } => block,
        }
    }
}

/// Bounding block of the first set of the components process that reaches
/// scale `k` (and, in slab mode, width `l`).
pub fn al_witness(
    config: &Configuration,
    family: &UpdateFamily,
    param: StrongGraphParam,
    k: usize,
    mode: WitnessMode,
) -> Result<Witness> {
    let trace = components_process_traced(config, family, param, MergeOrder::Canonical)?;
    witness_from_trace(&trace, k, mode)
}

/// Witness extraction from an existing trace.
pub fn witness_from_trace(trace: &ProcessTrace, k: usize, mode: WitnessMode) -> Result<Witness> {
    if k == 0 {
        return Err(Error::InvalidParameter("scale k must be ≥ 1".into()));
    }
    let diam = trace.closure_diam();
    match mode {
        WitnessMode::Block => {
            if k > diam {
                return Err(Error::NoWitness { k, diam });
            }
            let set = trace
                .created
                .iter()
                .find(|c| c.diam >= k)
                .ok_or(Error::NoWitness { k, diam })?;
            Ok(Witness::Block {
                block: set.block.clone(),
                diam: set.diam,
            })
        }
        WitnessMode::Slab { width } => {
            if width == 0 {
                return Err(Error::InvalidParameter("slab width l must be ≥ 1".into()));
            }
            if k > diam && width > diam {
                return Err(Error::NoWitness { k, diam });
            }
            let split = |b: &Block| {
                let sides = b.sidelengths();
                let (w, h) = sides.split_at(sides.len() - 1);
                (w.iter().copied().max().unwrap_or(0), h[0])
            };
            trace
                .created
                .iter()
                .map(|c| (c, split(&c.block)))
                .find(|(_, (w, h))| *w >= width || *h >= k)
                .map(|(c, (w, h))| Witness::Slab {
                    block: c.block.clone(),
                    width_diam: w,
                    height: h,
                })
                .ok_or(Error::NoWitness { k, diam })
        }
    }
}

/// `diam(⟨A⟩)` for an `𝒩ᵣ` configuration, using `t = 2a_d`.
pub fn closure_diam(config: &Configuration, spec: &NeighborhoodSpec, ws: &mut ClosureWorkspace) -> usize {
    let mut c = config.clone();
    closure_counting_in_place(&mut c, spec, ws);
    InfectedComponents::new(&c, StrongGraphParam::for_spec(spec)).diam()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{make_nr_family, DEFAULT_RULE_CAP};

    fn spec(a: &[usize], r: usize) -> NeighborhoodSpec {
        NeighborhoodSpec::new(a.to_vec(), r).unwrap()
    }

    fn t(x: usize) -> StrongGraphParam {
        StrongGraphParam::new(x).unwrap()
    }

    fn cfg(dims: &[usize], sites: &[Site]) -> Configuration {
        Configuration::from_sites(dims.to_vec(), Geometry::Cube, sites).unwrap()
    }

    #[test]
    fn strong_component_examples() {
        assert!(strong_components(&[], t(2)).unwrap().is_empty());
        assert_eq!(
            strong_components(&[vec![1, 1], vec![3, 3]], t(2)).unwrap(),
            vec![vec![vec![1, 1], vec![3, 3]]]
        );
        assert_eq!(
            strong_components(&[vec![4, 4], vec![1, 1]], t(2)).unwrap(),
            vec![vec![vec![1, 1]], vec![vec![4, 4]]]
        );
        assert!(StrongGraphParam::new(0).is_err());
    }

    #[test]
    fn diam_examples() {
        assert_eq!(diam(&[], t(2)).unwrap(), 0);
        assert_eq!(diam(&[vec![1, 1], vec![3, 3]], t(2)).unwrap(), 3);
        assert_eq!(diam(&[vec![1, 1], vec![4, 4]], t(2)).unwrap(), 1);
    }

    #[test]
    fn filled_and_spanned_examples() {
        let f = make_nr_family(&spec(&[1, 1], 2), DEFAULT_RULE_CAP);
        let full = Configuration::full(vec![3, 3], Geometry::Cube).unwrap();
        let r33 = Block::domain(&[3, 3]);
        assert!(is_internally_filled(&r33, &full, &f).unwrap());

        let a = cfg(&[2, 2], &[vec![1, 1], vec![2, 2]]);
        assert!(is_internally_filled(&Block::domain(&[2, 2]), &a, &f).unwrap());

        let corners = cfg(&[3, 3], &[vec![1, 1], vec![3, 3]]);
        assert!(!is_internally_filled(&r33, &corners, &f).unwrap());
        assert!(is_internally_spanned(&r33, &corners, &f, t(2)).unwrap());

        let single = cfg(&[3, 3], &[vec![1, 1]]);
        assert!(!is_internally_spanned(&r33, &single, &f, t(2)).unwrap());
        let point = Block::new(vec![1, 1], vec![1, 1]).unwrap();
        assert!(is_internally_spanned(&point, &single, &f, t(2)).unwrap());

        let outside = Block::new(vec![2, 2], vec![4, 4]).unwrap();
        assert!(matches!(
            is_internally_filled(&outside, &single, &f),
            Err(Error::OutOfBounds(_))
        ));
        assert!(is_internally_spanned(&outside, &single, &f, t(2)).is_err());
    }

    #[test]
    fn components_process_examples() {
        let f = UpdateFamily::counting(&spec(&[1, 1], 2));
        let empty = cfg(&[5, 5], &[]);
        assert!(components_process(&empty, &f, t(2)).unwrap().is_empty());

        let two = cfg(&[5, 5], &[vec![1, 1], vec![3, 3]]);
        let trace = components_process_traced(&two, &f, t(2), MergeOrder::Canonical).unwrap();
        assert_eq!(trace.collection.sets(), &[vec![vec![1, 1], vec![3, 3]]]);
        assert_eq!(trace.merges().count(), 1);

        let diag = cfg(&[3, 3], &[vec![1, 1], vec![2, 2], vec![3, 3]]);
        let coll = components_process(&diag, &f, t(2)).unwrap();
        assert_eq!(coll.len(), 1);
        assert_eq!(coll.union(), Configuration::full(vec![3, 3], Geometry::Cube).unwrap().infected_sites());
    }

    #[test]
    fn components_process_rejects_supercritical() {
        let f = UpdateFamily::counting(&spec(&[1, 2], 2));
        let a = cfg(&[4, 4], &[vec![1, 1]]);
        assert_eq!(
            components_process(&a, &f, t(4)),
            Err(Error::SupercriticalFamily { r: 2, a_max: 2 })
        );
    }

    #[test]
    fn witness_on_diagonal() {
        let f = UpdateFamily::counting(&spec(&[1, 1], 2));
        let sites: Vec<Site> = (1..=8).map(|i| vec![i, i]).collect();
        let a = cfg(&[8, 8], &sites);
        for k in 1..=8 {
            let w = al_witness(&a, &f, t(2), k, WitnessMode::Block).unwrap();
            let Witness::Block { block, diam } = &w else { panic!() };
            assert!(k <= *diam && *diam <= 2 * k, "k={k} diam={diam}");
            assert!(is_internally_spanned(block, &a, &f, t(2)).unwrap());
        }
        assert_eq!(
            al_witness(&a, &f, t(2), 9, WitnessMode::Block),
            Err(Error::NoWitness { k: 9, diam: 8 })
        );
        let w = al_witness(&a, &f, t(2), 4, WitnessMode::Block).unwrap();
        assert!((4..=8).contains(&w.block().long()));
    }

    #[test]
    fn slab_witness_bounds() {
        let f = UpdateFamily::counting(&spec(&[1, 1], 2));
        let sites: Vec<Site> = (1..=6).map(|i| vec![i, 2 * i - 1]).collect();
        let a = cfg(&[7, 12], &sites);
        for k in 1..=4 {
            for l in 1..=4 {
                let w = al_witness(&a, &f, t(2), k, WitnessMode::Slab { width: l }).unwrap();
                let Witness::Slab { width_diam, height, .. } = w else { panic!() };
                assert!(width_diam <= 2 * l && height <= 2 * k);
                assert!(width_diam >= l || height >= k);
            }
        }
    }

    #[test]
    fn infected_components_on_config() {
        let c = cfg(&[6, 6], &[vec![1, 1], vec![3, 3], vec![6, 6], vec![6, 1]]);
        let comps = InfectedComponents::new(&c, t(2));
        assert_eq!(comps.summaries().len(), 3);
        assert_eq!(comps.diam(), 3);
        let idx = c.index_of(&[3, 3]).unwrap();
        assert_eq!(comps.component_of(idx).unwrap().size, 2);
        assert!(comps.component_of(c.index_of(&[2, 2]).unwrap()).is_none());
    }

    fn brute_components(sites: &[Site], t: i64) -> Vec<Vec<Site>> {
        let set: Vec<Site> = sites.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let n = set.len();
        let mut ds = DisjointSet::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if set[i].iter().zip(&set[j]).all(|(a, b)| (a - b).abs() <= t) {
                    ds.union(i as u32, j as u32);
                }
            }
        }
        let mut groups: Vec<Vec<Site>> = Vec::new();
        let mut root_slot: HashMap<u32, usize> = HashMap::new();
        for (i, s) in set.into_iter().enumerate() {
            let r = ds.find(i as u32);
            let slot = *root_slot.entry(r).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[slot].push(s);
        }
        groups
    }

    /// Maximum of `long` over every strongly connected subset, by enumeration.
    fn brute_diam(sites: &[Site], t: i64) -> usize {
        let set: Vec<Site> = sites.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let n = set.len();
        let mut best = 0;
        for mask in 1u32..(1 << n) {
            let sub: Vec<Site> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| set[i].clone()).collect();
            if brute_components(&sub, t).len() == 1 {
                best = best.max(bounding_block(&sub).unwrap().long());
            }
        }
        best
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sites(d: usize, max_len: usize) -> impl Strategy<Value = Vec<Site>> {
            prop::collection::vec(prop::collection::vec(1i64..12, d), 0..max_len)
        }

        proptest! {
            #[test]
            fn components_match_pairwise_union_find(s in sites(2, 40), tt in 1usize..4) {
                prop_assert_eq!(strong_components(&s, t(tt)).unwrap(), brute_components(&s, tt as i64));
            }

            #[test]
            fn components_match_in_3d(s in sites(3, 40), tt in 1usize..4) {
                prop_assert_eq!(strong_components(&s, t(tt)).unwrap(), brute_components(&s, tt as i64));
            }

            #[test]
            fn diam_matches_subset_enumeration(s in sites(2, 12), tt in 1usize..3) {
                prop_assert_eq!(diam(&s, t(tt)).unwrap(), brute_diam(&s, tt as i64));
            }

            #[test]
            fn config_components_match_site_components(s in sites(2, 30), tt in 1usize..4) {
                let c = cfg(&[11, 11], &s);
                let comps = InfectedComponents::new(&c, t(tt));
                let expected = strong_components(&c.infected_sites(), t(tt)).unwrap();
                prop_assert_eq!(comps.summaries().len(), expected.len());
                for (sum, comp) in comps.summaries().iter().zip(&expected) {
                    prop_assert_eq!(sum.size, comp.len());
                    prop_assert_eq!(&sum.block, &bounding_block(comp).unwrap());
                }
            }
        }
    }
}
