//! Number formatting, CSV rows and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use aniso_core::experiments::TrialEstimate;
use aniso_core::{Geometry, NeighborhoodSpec};

use crate::settings::Settings;

pub const MANIFEST: &str = "manifest.txt";

/// Six significant digits; scientific notation outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999995 → 10.00000).
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn join_usize(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// `a1,…,ad` header columns.
pub fn a_columns(d: usize) -> String {
    (1..=d).map(|j| format!("a{j}")).collect::<Vec<_>>().join(",")
}

/// `family,d,a1..ad,r` cells.
pub fn family_cells(spec: &NeighborhoodSpec) -> String {
    format!("{},{},{},{}", family_name(spec), spec.dim(), join_usize(spec.exponents()), spec.threshold())
}

/// `N_r^a1-..-ad`, free of commas so it fits a CSV cell.
pub fn family_name(spec: &NeighborhoodSpec) -> String {
    let a: Vec<String> = spec.exponents().iter().map(usize::to_string).collect();
    format!("N_{}^{}", spec.threshold(), a.join("-"))
}

pub fn estimate_header(d: usize) -> String {
    format!(
        "family,d,{},r,geometry,L,p,trials,estimate,ci_low,ci_high,seed",
        a_columns(d)
    )
}

pub fn estimate_row(spec: &NeighborhoodSpec, geometry: Geometry, l: usize, p: f64, e: &TrialEstimate) -> String {
    format!(
        "{},{geometry},{l},{},{},{},{},{},{}",
        family_cells(spec),
        sig6(p),
        e.trials,
        sig6(e.estimate),
        sig6(e.ci_low),
        sig6(e.ci_high),
        e.seed
    )
}

/// Writes `lines` with a trailing newline.
pub fn write_lines(dir: &Path, name: &str, lines: &[String]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Manifest: comment lines for provenance, then the settings, so the
/// file can be passed back through `--config`.
pub fn write_manifest(dir: &Path, command: &str, settings: &Settings, wall: Duration, files: &[PathBuf]) -> Result<()> {
    let mut text = format!(
        "# aniso {}\n# wall_time_s = {:.3}\n# stream_rule = {}\n",
        env!("CARGO_PKG_VERSION"),
        wall.as_secs_f64(),
        aniso_core::experiments::STREAM_RULE
    );
    for f in files {
        if let Some(name) = f.file_name() {
            text.push_str(&format!("# output = {}\n", name.to_string_lossy()));
        }
    }
    text.push_str(&format!("command = {command}\n"));
    text.push_str(&settings.to_text());
    let path = dir.join(MANIFEST);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.4038318), "0.403832");
        assert_eq!(sig6(0.5), "0.500000");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(123.4567), "123.457");
        assert_eq!(sig6(9.9999995), "10.0000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(0.00001234567), "1.23457e-5");
        assert_eq!(sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn family_cells_have_one_column_per_exponent() {
        let s = NeighborhoodSpec::new(vec![1, 2, 4], 5).unwrap();
        assert_eq!(family_cells(&s), "N_5^1-2-4,3,1,2,4,5");
        assert_eq!(
            estimate_header(3),
            "family,d,a1,a2,a3,r,geometry,L,p,trials,estimate,ci_low,ci_high,seed"
        );
    }
}
