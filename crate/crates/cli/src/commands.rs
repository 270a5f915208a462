//! One function per subcommand. Each reads its settings, runs the core
//! operation and writes data files into the output directory.

use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use aniso_core::engine::{closure, make_nr_family, DEFAULT_RULE_CAP};
use aniso_core::experiments::{
    center_cluster_stats, compare_models, critical_length, diam_tail_probability, lambda, scaling_fit, seeded_growth,
    FitReport, LcSearch, ScalingPoint,
};
use aniso_core::families::stable_set_descriptor;
use aniso_core::grid_file::GridFile;
use aniso_core::spanning::{is_internally_spanned, witness_from_trace, components_process_traced, MergeOrder, WitnessMode};
use aniso_core::{classify_nr, NeighborhoodSpec, StrongGraphParam};

use crate::output::*;
use crate::settings::{Settings, UsageError};

/// Settings accepted by `command`, besides `command` itself.
pub fn allowed_keys(command: &str) -> &'static [&'static str] {
    match command {
        "classify" => &["a", "r", "d"],
        "closure" => &["grid"],
        "lc-scan" => &["a", "r", "d", "p", "trials", "max-trials", "max-length", "geometry", "seed"],
        "cluster-stats" => &["a", "r", "d", "n", "p", "trials", "cutoff", "eps", "seed"],
        "growth" => &["a", "r", "d", "l", "block", "p", "trials", "seed"],
        "al-check" => &["grid", "k", "mode", "width"],
        "diam-tail" => &["a", "r", "d", "l", "p", "k", "trials", "seed"],
        "fit" => &["a", "r", "d", "points", "p", "lc", "model"],
        _ => &[],
    }
}

fn is_randomized(command: &str) -> bool {
    matches!(command, "lc-scan" | "cluster-stats" | "growth" | "diam-tail")
}

/// Seed from the settings, or a fresh one written back so the manifest
/// records it.
fn resolve_seed(settings: &mut Settings) -> Result<u64> {
    if let Some(seed) = settings.get::<u64>("seed")? {
        return Ok(seed);
    }
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0),
    );
    let seed = h.finish();
    settings.set("seed", seed.to_string());
    Ok(seed)
}

/// Runs `command`; returns the data files written and a stdout summary.
pub fn run(command: &str, settings: &mut Settings, out: &Path) -> Result<(Vec<PathBuf>, String)> {
    settings.check_keys(allowed_keys(command))?;
    let seed = if is_randomized(command) { Some(resolve_seed(settings)?) } else { None };
    let s = &*settings;
    match command {
        "classify" => classify(s, out),
        "closure" => closure_cmd(s, out),
        "lc-scan" => lc_scan(s, out, seed.unwrap()),
        "cluster-stats" => cluster_stats(s, out, seed.unwrap()),
        "growth" => growth(s, out, seed.unwrap()),
        "al-check" => al_check(s, out),
        "diam-tail" => diam_tail(s, out, seed.unwrap()),
        "fit" => fit(s, out),
        other => Err(UsageError(format!("unknown command {other:?}")).into()),
    }
}

fn classify(s: &Settings, out: &Path) -> Result<(Vec<PathBuf>, String)> {
    let spec = s.spec()?;
    let label = classify_nr(&spec);
    let desc = stable_set_descriptor(&spec);
    let line = format!("{label} {} {desc}", spec.neighborhood_size());
    let file = write_lines(
        out,
        "classify.txt",
        &[
            format!("family = {}", family_name(&spec)),
            format!("label = {label}"),
            format!("neighborhood_size = {}", spec.neighborhood_size()),
            format!("descriptor = {desc}"),
        ],
    )?;
    Ok((vec![file], line))
}

fn read_grid(s: &Settings) -> Result<GridFile> {
    let path: String = s.require("grid")?;
    let text = fs::read_to_string(&path).with_context(|| format!("reading grid file {path}"))?;
    Ok(GridFile::parse(&text)?)
}

fn closure_cmd(s: &Settings, out: &Path) -> Result<(Vec<PathBuf>, String)> {
    let grid = read_grid(s)?;
    let family = make_nr_family(&grid.spec, DEFAULT_RULE_CAP);
    let closed = closure(&grid.config, &family);
    let line = format!(
        "infected {} -> {} of {}{}",
        grid.config.infected_count(),
        closed.infected_count(),
        closed.len(),
        if closed.is_full() { " (full)" } else { "" }
    );
    let result = GridFile::new(grid.spec, closed)?;
    let path = out.join("closure.grid");
    fs::write(&path, result.to_text()).with_context(|| format!("writing {}", path.display()))?;
    Ok((vec![path], line))
}

fn lc_scan(s: &Settings, out: &Path, seed: u64) -> Result<(Vec<PathBuf>, String)> {
    let spec = s.spec()?;
    let ps = s.p_list()?;
    let trials = s.positive("trials", Some(400))?;
    let mut search = LcSearch::new(trials);
    search.max_trials_per_probe = s.positive("max-trials", Some(4 * trials))?;
    if search.max_trials_per_probe < trials {
        return Err(UsageError("max-trials must be ≥ trials".into()).into());
    }
    search.max_length = s.positive("max-length", Some(search.max_length as u64))? as usize;
    search.geometry = s.geometry()?;
    let d = spec.dim();
    let mut lc_rows = vec![format!(
        "family,d,{},r,geometry,p,lc,bracket_lo,bracket_hi,probes,unresolved,nonmonotone,trials,max_trials,seed",
        a_columns(d)
    )];
    let mut probe_rows = vec![estimate_header(d)];
    let mut summary = Vec::new();
    for &p in &ps {
        let res = critical_length(&spec, p, &search, seed)?;
        lc_rows.push(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            family_cells(&spec),
            search.geometry,
            sig6(p),
            res.lc,
            res.bracket.0,
            res.bracket.1,
            res.probes.len(),
            res.unresolved,
            res.nonmonotone,
            trials,
            search.max_trials_per_probe,
            seed
        ));
        for pr in &res.probes {
            probe_rows.push(estimate_row(&spec, search.geometry, pr.length, p, &pr.estimate));
        }
        summary.push(format!("p={} lc={}", sig6(p), res.lc));
    }
    let files = vec![
        write_lines(out, "lc.csv", &lc_rows)?,
        write_lines(out, "probes.csv", &probe_rows)?,
    ];
    Ok((files, summary.join("\n")))
}

fn cluster_stats(s: &Settings, out: &Path, seed: u64) -> Result<(Vec<PathBuf>, String)> {
    let spec = s.spec()?;
    let n = s.positive("n", None)? as usize;
    let ps = s.p_list()?;
    let trials = s.positive("trials", Some(1000))?;
    let eps: f64 = s.get_or("eps", 0.1)?;
    let fixed_cutoff: Option<f64> = s.get("cutoff")?;
    let i = spec.threshold().checked_sub(spec.max_exponent()).filter(|&i| i >= 1);
    let d = spec.dim();
    let mut rows = vec![format!(
        "family,d,{},r,geometry,N,p,trials,mean_size,restricted_mean_size,conditional_mean_size,conditioned_trials,\
         diam_tail,cutoff,center_infected,sqrt_p,restricted_within_bound,seed",
        a_columns(d)
    )];
    let mut summary = Vec::new();
    for &p in &ps {
        let cutoff = match (fixed_cutoff, i) {
            (Some(c), _) => c,
            (None, Some(i)) => p.powf(-(i as f64) - eps),
            (None, None) => {
                return Err(UsageError("cutoff is required when r ≤ a_max".into()).into());
            }
        };
        let st = center_cluster_stats(&spec, n, p, cutoff, trials, seed)?;
        let bound = p.sqrt();
        let ok = st.restricted_mean_size <= bound;
        rows.push(format!(
            "{},cube,{n},{},{trials},{},{},{},{},{},{},{},{},{ok},{seed}",
            family_cells(&spec),
            sig6(p),
            sig6(st.mean_size),
            sig6(st.restricted_mean_size),
            st.conditional_mean_size.map_or("nan".into(), sig6),
            st.conditioned_trials,
            sig6(st.diam_tail),
            sig6(cutoff),
            st.center_infected,
            sig6(bound),
        ));
        summary.push(format!(
            "p={} mean={} restricted_mean={} sqrt_p={} {}",
            sig6(p),
            sig6(st.mean_size),
            sig6(st.restricted_mean_size),
            sig6(bound),
            if ok { "pass" } else { "fail" }
        ));
    }
    Ok((vec![write_lines(out, "cluster.csv", &rows)?], summary.join("\n")))
}

fn growth(s: &Settings, out: &Path, seed: u64) -> Result<(Vec<PathBuf>, String)> {
    let spec = s.spec()?;
    let l = s.positive("l", None)? as usize;
    let block: Vec<usize> = s.require_list("block")?;
    let ps = s.p_list()?;
    let trials = s.positive("trials", Some(200))?;
    let mut rows = vec![estimate_header(spec.dim())];
    let mut summary = Vec::new();
    for &p in &ps {
        let e = seeded_growth(&spec, l, &block, p, trials, seed)?;
        rows.push(estimate_row(&spec, aniso_core::Geometry::Cube, l, p, &e));
        summary.push(format!("p={} fill={}", sig6(p), sig6(e.estimate)));
    }
    Ok((vec![write_lines(out, "growth.csv", &rows)?], summary.join("\n")))
}

fn diam_tail(s: &Settings, out: &Path, seed: u64) -> Result<(Vec<PathBuf>, String)> {
    let spec = s.spec()?;
    let l = s.positive("l", None)? as usize;
    let k = s.positive("k", None)? as usize;
    let ps = s.p_list()?;
    let trials = s.positive("trials", Some(1000))?;
    let mut rows = vec![estimate_header(spec.dim())];
    let mut summary = Vec::new();
    for &p in &ps {
        let e = diam_tail_probability(&spec, l, p, k, trials, seed)?;
        rows.push(estimate_row(&spec, aniso_core::Geometry::Cube, l, p, &e));
        summary.push(format!("p={} P(diam>={k})={}", sig6(p), sig6(e.estimate)));
    }
    Ok((vec![write_lines(out, "diam_tail.csv", &rows)?], summary.join("\n")))
}

fn al_check(s: &Settings, out: &Path) -> Result<(Vec<PathBuf>, String)> {
    let grid = read_grid(s)?;
    let family = make_nr_family(&grid.spec, DEFAULT_RULE_CAP);
    let param = StrongGraphParam::for_spec(&grid.spec);
    let mode = match s.get_or::<String>("mode", "block".into())?.as_str() {
        "block" => WitnessMode::Block,
        "slab" => WitnessMode::Slab {
            width: s.positive("width", None)? as usize,
        },
        other => return Err(UsageError(format!("mode must be block or slab, got {other:?}")).into()),
    };
    let trace = components_process_traced(&grid.config, &family, param, MergeOrder::Canonical)?;
    let diam = trace.closure_diam();
    let ks: Vec<usize> = match s.list::<usize>("k")? {
        Some(ks) => ks,
        None => (1..=diam).collect(),
    };
    let d = grid.spec.dim();
    let lo_cols: Vec<String> = (1..=d).map(|j| format!("lo{j}")).collect();
    let hi_cols: Vec<String> = (1..=d).map(|j| format!("hi{j}")).collect();
    let mut rows = vec![format!("k,{},{},diam", lo_cols.join(","), hi_cols.join(","))];
    for &k in &ks {
        if k == 0 {
            return Err(UsageError("k must be ≥ 1".into()).into());
        }
        let w = witness_from_trace(&trace, k, mode)?;
        let block = w.block();
        if !is_internally_spanned(block, &grid.config, &family, param)? {
            bail!("witness {block} for k = {k} is not internally spanned");
        }
        let ints = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        rows.push(format!("{k},{},{},{}", ints(block.lo()), ints(block.hi()), block.long()));
    }
    let file = write_lines(out, "al.csv", &rows)?;
    Ok((vec![file], format!("diam {diam}, {} witnesses verified", ks.len())))
}

/// `(p, lc)` columns of a CSV with a header row.
fn read_points(path: &str) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading points file {path}"))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().context("points file is empty")?.split(',').map(str::trim).collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| UsageError(format!("points file has no `{name}` column")))
    };
    let (ip, il) = (col("p")?, col("lc")?);
    lines
        .enumerate()
        .map(|(n, line)| {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |i: usize| -> Result<f64> {
                let cell = cells.get(i).with_context(|| format!("points row {}: too few cells", n + 2))?;
                cell.parse().with_context(|| format!("points row {}: bad number {cell:?}", n + 2))
            };
            Ok((get(ip)?, get(il)?))
        })
        .collect()
}

fn fit_lines(prefix: &str, f: &FitReport) -> Vec<String> {
    let list = |v: &[f64]| v.iter().map(|x| sig6(*x)).collect::<Vec<_>>().join(",");
    vec![
        format!("{prefix}.slope = {}", sig6(f.slope)),
        format!("{prefix}.intercept = {}", sig6(f.intercept)),
        format!("{prefix}.rss = {}", sig6(f.rss)),
        format!("{prefix}.log_lc_rss = {}", sig6(f.log_lc_rss)),
        format!("{prefix}.residuals = {}", list(&f.residuals)),
        format!("{prefix}.ratios = {}", list(&f.ratios)),
        format!("{prefix}.ratio_spread = {}", sig6(f.ratio_spread)),
    ]
}

fn fit(s: &Settings, out: &Path) -> Result<(Vec<PathBuf>, String)> {
    let spec: NeighborhoodSpec = s.spec()?;
    if spec.dim() < 2 {
        return Err(UsageError("fit needs a family with d ≥ 2".into()).into());
    }
    let (a1, a2) = (spec.exponents()[0], spec.exponents()[1]);
    let i = spec
        .threshold()
        .checked_sub(spec.max_exponent())
        .filter(|&i| i >= 1)
        .ok_or_else(|| UsageError("fit needs r > a_max".into()))? as u32;
    let pairs: Vec<(f64, f64)> = match s.raw("points") {
        Some(path) => read_points(path)?,
        None => {
            let ps: Vec<f64> = s.require_list("p")?;
            let lcs: Vec<f64> = s.require_list("lc")?;
            if ps.len() != lcs.len() {
                return Err(UsageError("p and lc lists differ in length".into()).into());
            }
            ps.into_iter().zip(lcs).collect()
        }
    };
    let points = pairs
        .iter()
        .map(|&(p, lc)| ScalingPoint::new(p, lc, lambda(p, i, a1, a2)?))
        .collect::<aniso_core::Result<Vec<_>>>()?;
    let model: String = s.get_or("model", "both".into())?;
    let mut lines = vec![
        format!("family = {}", family_name(&spec)),
        format!("points = {}", points.len()),
        format!("lambda_index = {i}"),
    ];
    let summary = match model.as_str() {
        "both" => {
            let cmp = compare_models(&points)?;
            lines.extend(fit_lines("pure_power", &cmp.pure_power));
            lines.extend(fit_lines("power_log2", &cmp.power_log2));
            lines.push(format!("preferred = {}", cmp.preferred));
            format!(
                "exponent={} spread={} preferred={}",
                sig6(cmp.pure_power.slope),
                sig6(cmp.power_log2.ratio_spread),
                cmp.preferred
            )
        }
        name => {
            let m = name.parse().map_err(|e: aniso_core::Error| UsageError(e.to_string()))?;
            let f = scaling_fit(&points, m)?;
            lines.extend(fit_lines(name, &f));
            format!("slope={} spread={}", sig6(f.slope), sig6(f.ratio_spread))
        }
    };
    Ok((vec![write_lines(out, "fit.txt", &lines)?], summary))
}
