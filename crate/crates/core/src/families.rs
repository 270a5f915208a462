//! Stable directions and the supercritical / critical / subcritical
//! classification of update families.
//!
//! A direction `u` is stable when no rule lies in the open half-space
//! `{x : ⟨x, u⟩ < 0}`. Only rational directions are decided here, with exact
//! integer arithmetic; the spherical stable set of an `𝒩ᵣ` family is
//! described symbolically by [`stable_set_descriptor`].

use std::fmt;

use crate::engine::UpdateFamily;
use crate::error::{Error, Result};
use crate::lattice::{neighborhood_offsets, NeighborhoodSpec};

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A rational direction, stored as a primitive integer vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction(Vec<i64>);

impl Direction {
    pub fn new(v: Vec<i64>) -> Result<Self> {
        let g = v.iter().fold(0, |g, &x| gcd(g, x));
        if g == 0 {
            return Err(Error::ZeroDirection);
        }
        Ok(Self(v.into_iter().map(|x| x / g).collect()))
    }

    /// `±e_axis`.
    pub fn axis(d: usize, axis: usize, positive: bool) -> Self {
        let mut v = vec![0; d];
        v[axis] = if positive { 1 } else { -1 };
        Self(v)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    fn dot(&self, x: &[i64]) -> i128 {
        self.0
            .iter()
            .zip(x)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }
}

/// Whether every offset of `rule` satisfies `⟨x, v⟩ < 0`.
pub fn is_rule_in_halfspace(rule: &[Vec<i64>], dir: &Direction) -> bool {
    rule.iter().all(|x| dir.dot(x) < 0)
}

/// Whether no rule of `family` lies in the open half-space of `dir`.
///
/// For threshold-form `𝒩ᵣ` families a rule fits in the half-space exactly
/// when at least `r` neighbourhood offsets have negative inner product.
pub fn is_stable_direction(family: &UpdateFamily, dir: &Direction) -> bool {
    assert_eq!(family.dim(), dir.dim(), "direction dimension must match the family");
    match family.rules() {
        Some(rules) => !rules.iter().any(|r| is_rule_in_halfspace(r, dir)),
        None => {
            let spec = family.nr_spec().expect("implicit families carry their spec");
            let negative = neighborhood_offsets(spec)
                .iter()
                .filter(|x| dir.dot(x) < 0)
                .count();
            negative < spec.threshold()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalityLabel {
    Supercritical,
    Critical,
    Subcritical,
}

impl fmt::Display for CriticalityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CriticalityLabel::Supercritical => "supercritical",
            CriticalityLabel::Critical => "critical",
            CriticalityLabel::Subcritical => "subcritical",
        })
    }
}

/// Supercritical iff `r ≤ a_d`, critical iff `a_d < r ≤ Σaᵢ`, subcritical
/// iff `r > Σaᵢ`.
pub fn classify_nr(spec: &NeighborhoodSpec) -> CriticalityLabel {
    let r = spec.threshold();
    if r <= spec.max_exponent() {
        CriticalityLabel::Supercritical
    } else if r <= spec.exponent_sum() {
        CriticalityLabel::Critical
    } else {
        CriticalityLabel::Subcritical
    }
}

/// Symbolic stable set of an `𝒩ᵣ` family, as a union of
/// great circles `S¹_{i,k}` (through `eᵢ` and `e_k`), axis pairs `{±eᵢ}` and
/// great spheres `S^{d−2}ᵢ` (orthogonal to `eᵢ`). Axes are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StableSetDescriptor {
    Covered {
        circles: Vec<(usize, usize)>,
        axes: Vec<usize>,
        orthogonal_spheres: Vec<usize>,
        /// Two listed range boundaries coincide for these exponents, so at
        /// least one listed case is empty and the first match was taken.
        coincident_boundaries: bool,
    },
    /// `r` lies in none of the listed ranges.
    NotCovered,
}

impl StableSetDescriptor {
    /// Whether the described set contains the direction `dir`.
    /// `None` for [`StableSetDescriptor::NotCovered`].
    pub fn contains(&self, dir: &Direction) -> Option<bool> {
        let StableSetDescriptor::Covered {
            circles,
            axes,
            orthogonal_spheres,
            ..
        } = self
        else {
            return None;
        };
        let v = dir.as_slice();
        let support: Vec<usize> = (0..v.len()).filter(|&j| v[j] != 0).collect();
        let on_axis = support.len() == 1 && axes.contains(&support[0]);
        let on_circle = circles
            .iter()
            .any(|&(i, k)| support.iter().all(|&j| j == i || j == k));
        let on_sphere = orthogonal_spheres.iter().any(|&i| v[i] == 0);
        Some(on_axis || on_circle || on_sphere)
    }
}

impl fmt::Display for StableSetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StableSetDescriptor::NotCovered => f.write_str("not-covered"),
            StableSetDescriptor::Covered {
                circles,
                axes,
                orthogonal_spheres,
                coincident_boundaries,
            } => {
                let mut parts: Vec<String> = Vec::new();
                parts.extend(circles.iter().map(|(i, k)| format!("S1_{}{}", i + 1, k + 1)));
                parts.extend(axes.iter().map(|i| format!("+-e{}", i + 1)));
                parts.extend(orthogonal_spheres.iter().map(|i| format!("Sperp_{}", i + 1)));
                write!(f, "{}", parts.join("|"))?;
                if *coincident_boundaries {
                    f.write_str(";tie")?;
                }
                Ok(())
            }
        }
    }
}

/// Matches `r` against the listed cases, in order, first match wins:
///
/// | range of `r`                        | stable set                              |
/// |-------------------------------------|-----------------------------------------|
/// | `a_d < r ≤ a₁+a₂`                   | `{±e₁, …, ±e_d}`                        |
/// | `a₁+a₂ < r ≤ a₁+a₃` (d ≥ 3)         | `S¹₁₂ ∪ {±e₃, …, ±e_d}`                 |
/// | `a₁+a₃ < r ≤ a₂+a₃` (d ≥ 3)         | `S¹₁₂ ∪ S¹₁₃ ∪ {±e₄, …, ±e_d}`          |
/// | `a₂+…+a_d < r ≤ a₁+…+a_d`           | `S^{d−2}₁ ∪ … ∪ S^{d−2}_d`              |
///
/// Only `r` in the critical window `a_d < r ≤ Σaᵢ` is matched; any other
/// `r`, one falling between listed ranges, or a matched case that differs
/// from the true stable set (possible when exponents tie) yields
/// [`StableSetDescriptor::NotCovered`].
pub fn stable_set_descriptor(spec: &NeighborhoodSpec) -> StableSetDescriptor {
    let a = spec.exponents();
    let d = a.len();
    let r = spec.threshold();
    let ad = spec.max_exponent();
    let total = spec.exponent_sum();
    let s_d = total - a[0];

    // (lo, hi, circles, axes, spheres)
    type Case = (usize, usize, Vec<(usize, usize)>, Vec<usize>, Vec<usize>);
    let mut cases: Vec<Case> = Vec::new();
    if d >= 2 {
        cases.push((ad, a[0] + a[1], vec![], (0..d).collect(), vec![]));
    }
    if d >= 3 {
        cases.push((a[0] + a[1], a[0] + a[2], vec![(0, 1)], (2..d).collect(), vec![]));
        cases.push((a[0] + a[2], a[1] + a[2], vec![(0, 1), (0, 2)], (3..d).collect(), vec![]));
    }
    if d >= 2 {
        cases.push((s_d, total, vec![], vec![], (0..d).collect()));
    }

    let coincident = cases.iter().any(|c| c.0 >= c.1);
    // Every listed case lives inside the critical window a_d < r ≤ Σaᵢ.
    if r <= ad {
        return StableSetDescriptor::NotCovered;
    }
    let Some((_, _, circles, axes, orthogonal_spheres)) = cases.into_iter().find(|c| c.0 < r && r <= c.1) else {
        return StableSetDescriptor::NotCovered;
    };
    let desc = StableSetDescriptor::Covered {
        circles,
        axes,
        orthogonal_spheres,
        coincident_boundaries: coincident,
    };
    if matches_exact_stable_set(&desc, a, r) {
        desc
    } else {
        StableSetDescriptor::NotCovered
    }
}

/// Stability of `u` under `𝒩ᵣ` depends only on its support `S`: `u` is
/// stable iff `Σ_{j∈S} a_j < r`. Both sides are unions of coordinate
/// spheres, so one representative per support decides equality.
fn matches_exact_stable_set(desc: &StableSetDescriptor, a: &[usize], r: usize) -> bool {
    let d = a.len();
    (1u32..(1 << d)).all(|mask| {
        let v: Vec<i64> = (0..d).map(|j| (mask >> j & 1) as i64).collect();
        let weight: usize = (0..d).filter(|&j| mask >> j & 1 == 1).map(|j| a[j]).sum();
        let dir = Direction::new(v).expect("nonzero mask");
        desc.contains(&dir) == Some(weight < r)
    })
}
