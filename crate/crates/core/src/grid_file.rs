//! Text grid files.
//!
//! ```text
//! d L1 … Ld geometry
//! a1 … ad r
//! x1 … xd        (one infected site per line, 1-based)
//! ```
//!
//! Parsing tolerates arbitrary whitespace, blank lines, repeated sites and
//! any site order. [`GridFile::to_text`] emits the canonical form: single
//! spaces, sites in lexicographic order, trailing newline.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Geometry, NeighborhoodSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridFile {
    pub spec: NeighborhoodSpec,
    pub config: Configuration,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::GridParse {
        line,
        msg: msg.into(),
    }
}

fn parse_ints<T: std::str::FromStr>(line_no: usize, tokens: &[&str]) -> Result<Vec<T>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| parse_err(line_no, format!("expected an integer, found {t:?}")))
        })
        .collect()
}

impl GridFile {
    pub fn new(spec: NeighborhoodSpec, config: Configuration) -> Result<Self> {
        if spec.dim() != config.dim() {
            return Err(Error::DimensionMismatch {
                expected: config.dim(),
                found: spec.dim(),
            });
        }
        Ok(Self { spec, config })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, toks)| !toks.is_empty());

        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header line"))?;
        let d: usize = header[0]
            .parse()
            .map_err(|_| parse_err(hl, format!("bad dimension {:?}", header[0])))?;
        if d == 0 || header.len() != d + 2 {
            return Err(parse_err(
                hl,
                format!("header must be `d L1 … Ld geometry`, got {} fields", header.len()),
            ));
        }
        let dims: Vec<usize> = parse_ints(hl, &header[1..=d])?;
        let geometry: Geometry = header[d + 1].parse().map_err(|e: Error| parse_err(hl, e.to_string()))?;

        let (sl, spec_toks) = lines
            .next()
            .ok_or_else(|| parse_err(hl + 1, "missing neighbourhood line `a1 … ad r`"))?;
        if spec_toks.len() != d + 1 {
            return Err(parse_err(
                sl,
                format!("expected {} fields `a1 … ad r`, got {}", d + 1, spec_toks.len()),
            ));
        }
        let nums: Vec<usize> = parse_ints(sl, &spec_toks)?;
        let spec = NeighborhoodSpec::new(nums[..d].to_vec(), nums[d])
            .map_err(|e| parse_err(sl, e.to_string()))?;

        let mut config =
            Configuration::new(dims, geometry).map_err(|e| parse_err(hl, e.to_string()))?;
        for (ln, toks) in lines {
            if toks.len() != d {
                return Err(parse_err(ln, format!("expected {d} coordinates, got {}", toks.len())));
            }
            let site: Vec<i64> = parse_ints(ln, &toks)?;
            config
                .infect_site(&site)
                .map_err(|e| parse_err(ln, e.to_string()))?;
        }
        Ok(Self { spec, config })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let dims: Vec<String> = self.config.dims().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{} {} {}", self.config.dim(), dims.join(" "), self.config.geometry());
        let a: Vec<String> = self.spec.exponents().iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{} {}", a.join(" "), self.spec.threshold());
        let mut site = vec![0i64; self.config.dim()];
        for idx in self.config.infected_indices() {
            self.config.write_coords(idx, &mut site);
            let coords: Vec<String> = site.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", coords.join(" "));
        }
        out
    }
}
