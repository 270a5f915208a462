//! Geometry of the discrete cube `[L]^d`.
//!
//! Sites are 1-based coordinate vectors, mirroring `[L] = {1, …, L}`.
//! Internally a [`Configuration`] stores one bit per site in row-major order
//! with axis 0 most significant, so the linear index order of sites equals
//! the lexicographic order of their coordinates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A lattice site, 1-based.
pub type Site = Vec<i64>;

/// A lattice offset (difference of two sites).
pub type Offset = Vec<i64>;

/// The exponents `a₁ ≤ … ≤ a_d` and threshold `r` of an `𝒩ᵣ^{a₁,…,a_d}` model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NeighborhoodSpec {
    a: Vec<usize>,
    r: usize,
}

impl NeighborhoodSpec {
    pub fn new(a: Vec<usize>, r: usize) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidSpec("dimension must be at least 1".into()));
        }
        if a.contains(&0) {
            return Err(Error::InvalidSpec(format!("exponents must be positive, got {a:?}")));
        }
        if a.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpec(format!("exponents must be nondecreasing, got {a:?}")));
        }
        let size = 2 * a.iter().sum::<usize>();
        if r == 0 || r > size {
            return Err(Error::InvalidSpec(format!(
                "threshold r = {r} outside 1..={size} for exponents {a:?}"
            )));
        }
        Ok(Self { a, r })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn exponents(&self) -> &[usize] {
        &self.a
    }

    pub fn threshold(&self) -> usize {
        self.r
    }

    /// `a_d`, the largest exponent.
    pub fn max_exponent(&self) -> usize {
        *self.a.last().expect("nonempty")
    }

    /// `a₁ + … + a_d`.
    pub fn exponent_sum(&self) -> usize {
        self.a.iter().sum()
    }

    /// `|N| = 2·Σaᵢ`.
    pub fn neighborhood_size(&self) -> usize {
        2 * self.exponent_sum()
    }

    /// Same exponents with a different threshold.
    pub fn with_threshold(&self, r: usize) -> Result<Self> {
        Self::new(self.a.clone(), r)
    }

    /// The `(axis, signed step)` pairs of the neighbourhood, in canonical order.
    pub fn axis_steps(&self) -> Vec<(usize, i64)> {
        let mut steps = Vec::with_capacity(self.neighborhood_size());
        for (axis, &aj) in self.a.iter().enumerate() {
            for m in 1..=aj as i64 {
                steps.push((axis, m));
                steps.push((axis, -m));
            }
        }
        steps
    }
}

impl fmt::Display for NeighborhoodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "N_{}^{{{}}}", self.r, a.join(","))
    }
}

/// All offsets `±m·e_j`, `1 ≤ m ≤ a_j`, axis-major and then by magnitude
/// with `+` before `−`. The result has `2·Σa_j` entries.
pub fn neighborhood_offsets(spec: &NeighborhoodSpec) -> Vec<Offset> {
    let d = spec.dim();
    spec.axis_steps()
        .into_iter()
        .map(|(axis, m)| {
            let mut v = vec![0; d];
            v[axis] = m;
            v
        })
        .collect()
}

/// Axis-aligned rectangular block `[lo₁, hi₁] × … × [lo_d, hi_d]`, inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Block {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidBlock(format!(
                "corner dimensions differ or are empty: {} vs {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InvalidBlock(format!("lo {lo:?} not ≤ hi {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// The block `[1, L₁] × … × [1, L_d]`.
    pub fn domain(dims: &[usize]) -> Self {
        Self {
            lo: vec![1; dims.len()],
            hi: dims.iter().map(|&l| l as i64).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    /// Side lengths counted in sites.
    pub fn sidelengths(&self) -> Vec<usize> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .collect()
    }

    /// Largest sidelength.
    pub fn long(&self) -> usize {
        self.sidelengths().into_iter().max().unwrap_or(0)
    }

    pub fn volume(&self) -> usize {
        self.sidelengths().into_iter().product()
    }

    pub fn contains(&self, site: &[i64]) -> bool {
        site.len() == self.dim()
            && site
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn contains_block(&self, other: &Block) -> bool {
        other.dim() == self.dim()
            && (0..self.dim()).all(|j| self.lo[j] <= other.lo[j] && other.hi[j] <= self.hi[j])
    }

    pub(crate) fn extend(&mut self, site: &[i64]) {
        for (j, &x) in site.iter().enumerate() {
            self.lo[j] = self.lo[j].min(x);
            self.hi[j] = self.hi[j].max(x);
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| format!("[{l},{h}]"))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Smallest block containing every site of `sites`.
pub fn bounding_block<S: AsRef<[i64]>>(sites: &[S]) -> Result<Block> {
    let (first, rest) = sites.split_first().ok_or(Error::EmptySiteSet)?;
    let first = first.as_ref();
    let mut block = Block {
        lo: first.to_vec(),
        hi: first.to_vec(),
    };
    for s in rest {
        let s = s.as_ref();
        if s.len() != block.dim() {
            return Err(Error::DimensionMismatch {
                expected: block.dim(),
                found: s.len(),
            });
        }
        block.extend(s);
    }
    Ok(block)
}

/// `long(S)`: the largest sidelength of the bounding block of `sites`.
pub fn long<S: AsRef<[i64]>>(sites: &[S]) -> Result<usize> {
    bounding_block(sites).map(|b| b.long())
}

/// Boundary semantics of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Geometry {
    /// `[L]^d`; sites outside the box count as permanently healthy.
    #[default]
    Cube,
    /// `ℤ^d_L`; coordinates wrap.
    Torus,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Cube => "cube",
            Geometry::Torus => "torus",
        })
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cube" => Ok(Geometry::Cube),
            "torus" => Ok(Geometry::Torus),
            other => Err(Error::InvalidParameter(format!(
                "unknown geometry {other:?} (expected cube or torus)"
            ))),
        }
    }
}

/// Infected/healthy state of every site of a box, one bit per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    dims: Vec<usize>,
    strides: Vec<usize>,
    geometry: Geometry,
    len: usize,
    bits: Vec<u64>,
    infected: usize,
}

impl Configuration {
    /// All-healthy configuration.
    pub fn new(dims: Vec<usize>, geometry: Geometry) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidConfiguration("dimension must be at least 1".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidConfiguration(format!(
                "sidelengths must be positive, got {dims:?}"
            )));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &l| acc.checked_mul(l))
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidConfiguration(format!("domain {dims:?} too large")))?;
        let mut strides = vec![1; dims.len()];
        for j in (0..dims.len() - 1).rev() {
            strides[j] = strides[j + 1] * dims[j + 1];
        }
        Ok(Self {
            dims,
            strides,
            geometry,
            len,
            bits: vec![0; len.div_ceil(64)],
            infected: 0,
        })
    }

    /// `[L]^d` (or the torus of side `L`), all healthy.
    pub fn cube(d: usize, l: usize, geometry: Geometry) -> Result<Self> {
        Self::new(vec![l; d], geometry)
    }

    pub fn full(dims: Vec<usize>, geometry: Geometry) -> Result<Self> {
        let mut c = Self::new(dims, geometry)?;
        c.fill_all();
        Ok(c)
    }

    pub fn from_sites<S: AsRef<[i64]>>(
        dims: Vec<usize>,
        geometry: Geometry,
        sites: &[S],
    ) -> Result<Self> {
        let mut c = Self::new(dims, geometry)?;
        for s in sites {
            let idx = c.checked_index(s.as_ref())?;
            c.infect(idx);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Number of sites in the domain.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.infected == 0
    }

    pub fn is_full(&self) -> bool {
        self.infected == self.len
    }

    pub fn infected_count(&self) -> usize {
        self.infected
    }

    pub fn domain_block(&self) -> Block {
        Block::domain(&self.dims)
    }

    /// Linear index of a 1-based site, or `None` when outside the box.
    pub fn index_of(&self, site: &[i64]) -> Option<usize> {
        if site.len() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for (j, &x) in site.iter().enumerate() {
            if x < 1 || x > self.dims[j] as i64 {
                return None;
            }
            idx += (x - 1) as usize * self.strides[j];
        }
        Some(idx)
    }

    pub(crate) fn checked_index(&self, site: &[i64]) -> Result<usize> {
        if site.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: site.len(),
            });
        }
        self.index_of(site).ok_or_else(|| {
            Error::OutOfBounds(format!("site {site:?} outside domain {:?}", self.dims))
        })
    }

    /// 1-based coordinates of a linear index.
    pub fn site_of(&self, idx: usize) -> Site {
        let mut out = vec![0; self.dim()];
        self.write_coords(idx, &mut out);
        out
    }

    /// Writes 1-based coordinates of `idx` into `out`.
    #[inline]
    pub(crate) fn write_coords(&self, mut idx: usize, out: &mut [i64]) {
        for (j, &s) in self.strides.iter().enumerate() {
            out[j] = (idx / s) as i64 + 1;
            idx %= s;
        }
    }

    #[inline]
    pub fn is_infected(&self, idx: usize) -> bool {
        (self.bits[idx >> 6] >> (idx & 63)) & 1 == 1
    }

    pub fn is_infected_at(&self, site: &[i64]) -> bool {
        self.index_of(site).is_some_and(|i| self.is_infected(i))
    }

    /// Marks `idx` infected; returns whether it was healthy before.
    #[inline]
    pub fn infect(&mut self, idx: usize) -> bool {
        let word = &mut self.bits[idx >> 6];
        let mask = 1u64 << (idx & 63);
        if *word & mask == 0 {
            *word |= mask;
            self.infected += 1;
            true
        } else {
            false
        }
    }

    pub fn infect_site(&mut self, site: &[i64]) -> Result<bool> {
        let idx = self.checked_index(site)?;
        Ok(self.infect(idx))
    }

    pub fn fill_all(&mut self) {
        self.bits.iter_mut().for_each(|w| *w = u64::MAX);
        let tail = self.len % 64;
        if tail != 0 {
            *self.bits.last_mut().expect("nonempty") = (1u64 << tail) - 1;
        }
        self.infected = self.len;
    }

    pub fn clear(&mut self) {
        self.bits.iter_mut().for_each(|w| *w = 0);
        self.infected = 0;
    }

    /// Overwrites word `w` of the bit array; bits beyond the domain are masked off.
    #[inline]
    pub(crate) fn set_word(&mut self, w: usize, value: u64) {
        let value = if w == self.bits.len() - 1 && !self.len.is_multiple_of(64) {
            value & ((1u64 << (self.len % 64)) - 1)
        } else {
            value
        };
        let old = self.bits[w];
        self.infected = self.infected + value.count_ones() as usize - old.count_ones() as usize;
        self.bits[w] = value;
    }

    /// Linear indices of infected sites, increasing.
    pub fn infected_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    /// Infected sites in lexicographic order.
    pub fn infected_sites(&self) -> Vec<Site> {
        self.infected_indices().map(|i| self.site_of(i)).collect()
    }

    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.dims == other.dims && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Site-wise union; domains must agree.
    pub fn union(&self, other: &Configuration) -> Result<Configuration> {
        if self.dims != other.dims {
            return Err(Error::InvalidConfiguration(format!(
                "domains differ: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let mut out = self.clone();
        for (w, &b) in other.bits.iter().enumerate() {
            let v = out.bits[w] | b;
            out.set_word(w, v);
        }
        Ok(out)
    }

    /// The sub-configuration on `block`, as a cube-geometry domain of its own.
    pub fn restrict(&self, block: &Block) -> Result<Configuration> {
        if block.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: block.dim(),
            });
        }
        if !self.domain_block().contains_block(block) {
            return Err(Error::OutOfBounds(format!(
                "block {block} not inside domain {:?}",
                self.dims
            )));
        }
        let mut sub = Configuration::new(block.sidelengths(), Geometry::Cube)?;
        let mut local = vec![0i64; self.dim()];
        for idx in self.infected_indices() {
            let site = self.site_of(idx);
            if block.contains(&site) {
                for j in 0..site.len() {
                    local[j] = site[j] - block.lo()[j] + 1;
                }
                let li = sub.index_of(&local).expect("inside block");
                sub.infect(li);
            }
        }
        Ok(sub)
    }

    /// Cyclic shift by `shift` (meaningful on the torus; defined for any box).
    pub fn shifted(&self, shift: &[i64]) -> Result<Configuration> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: shift.len(),
            });
        }
        let mut out = Configuration::new(self.dims.clone(), self.geometry)?;
        let mut site = vec![0i64; self.dim()];
        for idx in self.infected_indices() {
            self.write_coords(idx, &mut site);
            for j in 0..site.len() {
                let l = self.dims[j] as i64;
                site[j] = (site[j] - 1 + shift[j]).rem_euclid(l) + 1;
            }
            let ni = out.index_of(&site).expect("wrapped");
            out.infect(ni);
        }
        Ok(out)
    }
}
