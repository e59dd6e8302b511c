//! Subcommand implementations. Each returns an [`Outcome`] whose exit code
//! follows the stable contract: 0 success, 1 validation failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use jmfield_core::assumptions::{check_assumptions, AssumptionReport, SampleSpec};
use jmfield_core::field::{adaptive_certify, simulate_replicate};
use jmfield_core::mixing::bounds::{
    beta_lower, beta_upper_1d, beta_upper_enclosed, beta_upper_quadrant, bound_curve, series_poly_bound,
    series_superexp_bound, BoundCurve, BoundGeometry, SeriesOptions,
};
use jmfield_core::mixing::{
    covariance_decay, estimate_alpha_event, estimate_coupling_delta, verify_cone_intersection, CouplingGeometry,
    EventGapEstimate, ProbeGrid,
};
use jmfield_core::stats;
use jmfield_core::{BirthMeasure, ConeMeasure, GrowthModel, Point, Sequential};
use serde::Serialize;
use serde_json::json;

use crate::config::{Geometry, MixingMode, RunConfig};
use crate::error::CliError;
use crate::exec::RayonExecutor;
use crate::format::FieldFile;
use crate::image::{label_png_bytes, pgm_bytes, Plane};
use crate::output::{num, opt_num, write_file, write_json, Table};

/// Below this many certified replicates the CDF comparison is flagged.
pub const MIN_CERTIFIED: usize = 100;

/// Everything a subcommand needs: resolved config, its hash, output directory
/// and worker pool.
pub struct Context {
    pub config: RunConfig,
    pub hash: String,
    pub out_dir: PathBuf,
    pub exec: RayonExecutor,
}

impl Context {
    pub fn new(config: RunConfig, out_dir: PathBuf, threads: usize) -> Result<Self, CliError> {
        let hash = config.hash();
        Ok(Context { config, hash, out_dir, exec: RayonExecutor::new(threads)? })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    /// Human-readable summary for stdout.
    pub message: String,
    /// Non-fatal warnings for stderr.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn ok(files: Vec<PathBuf>, message: String) -> Self {
        Outcome { exit_code: 0, files, message, warnings: Vec::new() }
    }
}

// ---------------------------------------------------------------- check

pub fn format_report(report: &AssumptionReport) -> String {
    let mut s = String::new();
    for r in &report.results {
        let status = match (r.applicable, r.passed) {
            (false, _) => "n/a ",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let _ = writeln!(
            s,
            "assumption {:<2} {status}  {}  (checks {}, worst residual {}, threshold {})",
            r.id.label(),
            r.id.description(),
            r.checks,
            num(r.worst_residual),
            num(r.threshold)
        );
        if r.applicable && !r.passed {
            if let Some(w) = &r.witness {
                let _ = writeln!(s, "    witness: {}", serde_json::to_string(w).expect("witness serializes"));
            }
        }
        if !r.applicable && !r.note.is_empty() {
            let _ = writeln!(s, "    note: {}", r.note);
        }
    }
    let verdict = if report.all_passed() { "all applicable assumptions hold" } else { "assumption failures found" };
    let _ = writeln!(s, "{verdict} ({} sampled triples, tolerance {})", report.sampled_triples(), num(report.tolerance));
    s
}

pub fn cmd_check(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let model = cfg.model()?;
    let spec = SampleSpec {
        germs: cfg.check.germs,
        points: cfg.check.points,
        times: cfg.check.times,
        seed: cfg.seed,
        tolerance: cfg.check.tolerance,
    };
    let report = check_assumptions(&model, &spec);
    let path = ctx.path("check.json");
    write_json(&path, &json!({ "config_hash": ctx.hash, "config": cfg, "report": report }))?;
    Ok(Outcome {
        exit_code: if report.all_passed() { 0 } else { 1 },
        files: vec![path],
        message: format_report(&report),
        warnings: Vec::new(),
    })
}

// ---------------------------------------------------------------- simulate

fn write_images(file: &FieldFile, stem: &Path, slice: Option<u32>) -> Result<Vec<PathBuf>, CliError> {
    let plane = Plane::of(file, slice);
    let pgm = stem.with_file_name(format!("{}_time.pgm", file_stem(stem)));
    write_file(&pgm, &pgm_bytes(file, &plane))?;
    let png = stem.with_file_name(format!("{}_labels.png", file_stem(stem)));
    let bytes = label_png_bytes(file, &plane).map_err(|e| CliError::Invalid(format!("png encoding: {e}")))?;
    write_file(&png, &bytes)?;
    Ok(vec![pgm, png])
}

fn file_stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "field".into())
}

pub fn cmd_simulate(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let model = cfg.model()?;
    let measure = cfg.measure()?;
    let res = cfg.resolution_vec()?;
    let field = adaptive_certify(
        &model,
        &measure,
        cfg.window_radius,
        &res,
        cfg.seed,
        cfg.simulate.replicate,
        cfg.max_doublings,
        &ctx.exec,
    )?;
    let file = FieldFile::from_grid(&field);
    let field_path = ctx.path("field.jmf");
    write_file(&field_path, &file.to_bytes())?;
    let cone = ConeMeasure::new(model.clone(), measure);
    let sidecar = json!({
        "format": "JMF1",
        "field_file": "field.jmf",
        "config_hash": ctx.hash,
        "config": cfg,
        "dimension": file.dim,
        "resolution": file.resolution,
        "window": { "lo": file.lo, "hi": file.hi, "radius": field.window_radius },
        "seed": field.seed,
        "replicate": field.replicate,
        "certified": field.certified,
        "origin_value": field.origin_value,
        "germ_count": field.germ_count,
        "doublings": field.doublings,
        "truncation": {
            "certification_radius": field.truncation.certification_radius,
            "horizon": field.truncation.horizon,
            "radius": field.truncation.radius,
            "uncertified_probability_bound": cone.survival(field.truncation.certification_radius),
        },
        "speed_bound": model.speed_bound()?,
        "shape_ratio": model.shape_ratio(),
    });
    let sidecar_path = ctx.path("field.json");
    write_json(&sidecar_path, &sidecar)?;
    let mut files = vec![field_path.clone(), sidecar_path];
    if cfg.simulate.images {
        files.extend(write_images(&file, &field_path, cfg.simulate.slice)?);
    }
    let message = format!(
        "simulated {} cells from {} germs; certified={} (doublings {})\n",
        file.cells(),
        field.germ_count,
        field.certified,
        field.doublings
    );
    Ok(Outcome::ok(files, message))
}

// ---------------------------------------------------------------- render

/// Images for an existing field file, written next to `out_dir/<input stem>`.
pub fn cmd_render(input: &Path, out_dir: &Path, slice: Option<u32>) -> Result<Outcome, CliError> {
    let bytes = std::fs::read(input).map_err(|e| CliError::io(input, e))?;
    let file = FieldFile::from_bytes(&bytes)
        .map_err(|e| CliError::Parse { path: input.to_path_buf(), message: e.to_string() })?;
    let stem = out_dir.join(input.file_name().unwrap_or_else(|| "field.jmf".as_ref()));
    let files = write_images(&file, &stem, slice)?;
    Ok(Outcome::ok(files, format!("rendered {}\n", input.display())))
}

// ---------------------------------------------------------------- cdf

/// Certified values of xi(0): replicates are drawn in index order until
/// `target` are certified or `cap` attempts are spent.
pub fn certified_origin_values(
    model: &GrowthModel,
    measure: &BirthMeasure,
    radius: f64,
    seed: u64,
    target: usize,
    cap: usize,
    exec: &RayonExecutor,
) -> Result<(Vec<f64>, usize), CliError> {
    use jmfield_core::Executor;
    let ones = vec![1u32; model.dim()];
    let mut values = Vec::with_capacity(target);
    let mut attempted = 0usize;
    while values.len() < target && attempted < cap {
        let batch = (target - values.len()).min(cap - attempted);
        let start = attempted;
        let runs = exec.map(batch, |j| {
            simulate_replicate(model, measure, radius, &ones, seed, (start + j) as u64, &Sequential)
                .map(|f| if f.certified { f.origin_value } else { None })
        });
        for r in runs {
            if let Some(v) = r? {
                values.push(v);
            }
        }
        attempted += batch;
    }
    Ok((values, attempted))
}

pub fn cmd_cdf(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let model = cfg.model()?;
    let measure = cfg.measure()?;
    let cone = ConeMeasure::new(model.clone(), measure.clone());
    let target = cfg.replicates;
    let cap = target.saturating_mul(cfg.cdf.attempt_factor.max(1));
    let (values, attempted) =
        certified_origin_values(&model, &measure, cfg.window_radius, cfg.seed, target, cap, &ctx.exec)?;
    let n = values.len();
    let ks = if n > 0 { stats::ks_statistic(&values, |t| 1.0 - cone.survival(t)) } else { f64::NAN };
    let critical = if n > 0 { stats::ks_critical(n, 0.05) } else { f64::NAN };

    let grid = match &cfg.cdf.t_grid {
        Some(g) => g.clone(),
        None => {
            let t_max = match cfg.cdf.t_max {
                Some(t) => t,
                None => cone.quantile(1e-3)?,
            };
            let k = cfg.cdf.t_points.max(2);
            (0..k).map(|i| t_max * i as f64 / (k - 1) as f64).collect()
        }
    };
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(CliError::Invalid("cdf t grid values must be finite and nonnegative".into()));
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut table = Table::new(&["t", "F", "survival", "empirical_survival", "ks_stat"]);
    for &t in &grid {
        let above = n - sorted.partition_point(|&v| v <= t);
        let emp = if n > 0 { above as f64 / n as f64 } else { f64::NAN };
        table.push(vec![num(t), num(cone.eval(t)), num(cone.survival(t)), num(emp), num(ks)]);
    }
    let csv_path = ctx.path("cdf.csv");
    table.write(&csv_path, &ctx.hash)?;

    let mut warnings = Vec::new();
    if n < MIN_CERTIFIED {
        warnings.push(format!("only {n} certified replicates (fewer than {MIN_CERTIFIED}); KS comparison is unreliable"));
    }
    let json_path = ctx.path("cdf.json");
    write_json(
        &json_path,
        &json!({
            "config_hash": ctx.hash,
            "config": cfg,
            "requested": target,
            "attempted": attempted,
            "certified": n,
            "ks_stat": ks,
            "ks_critical_95": critical,
            "below_critical": ks < critical,
            "warning": warnings.first(),
        }),
    )?;
    let message = format!(
        "{n} certified of {attempted} attempted; KS = {} (95% critical {})\n",
        num(ks),
        num(critical)
    );
    Ok(Outcome { exit_code: 0, files: vec![csv_path, json_path], message, warnings })
}

// ---------------------------------------------------------------- bounds

fn default_geometry(dim: usize, g: Option<Geometry>) -> Result<Geometry, CliError> {
    let g = g.unwrap_or(if dim == 1 { Geometry::HalfLines } else { Geometry::Quadrant });
    if g == Geometry::HalfLines && dim != 1 {
        return Err(CliError::Invalid("halflines geometry requires dimension 1".into()));
    }
    Ok(g)
}

/// User tau, or tau = 1 for d = 1 when the sampled cone-intersection check passes.
fn resolve_tau(
    model: &GrowthModel,
    measure: &BirthMeasure,
    tau: Option<f64>,
    seed: u64,
) -> (Option<f64>, &'static str) {
    if let Some(t) = tau {
        return (Some(t), "config");
    }
    if model.dim() == 1 {
        let report = verify_cone_intersection(model, measure, 1.0, &[0.5, 1.0, 2.0, 4.0, 8.0], 400, seed);
        if report.passed {
            return (Some(1.0), "default, cone intersection verified");
        }
    }
    (None, "none")
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Sampled check of `exp(-F(C k)) <= gamma (C k)^-(d + delta)` for k = 1..=1000.
fn poly_hypothesis(cone: &ConeMeasure, gamma: f64, delta: f64, c: f64, dim: usize) -> bool {
    (1..=1000).all(|k| {
        let t = c * k as f64;
        (-cone.eval(t)).exp() <= gamma * t.powf(-(dim as f64 + delta)) * (1.0 + 1e-12)
    })
}

/// Sampled check of `F(C k) >= gamma (C k)^delta - c` for k = 1..=1000.
fn superexp_hypothesis(cone: &ConeMeasure, gamma: f64, delta: f64, c_shift: f64, c: f64) -> bool {
    (1..=1000).all(|k| {
        let t = c * k as f64;
        cone.eval(t) >= gamma * t.powf(delta) - c_shift - 1e-12 * (1.0 + cone.eval(t))
    })
}

#[derive(Serialize)]
struct BoundsReport<'a> {
    config_hash: &'a str,
    tau_source: &'a str,
    curve: &'a BoundCurve,
}

pub fn cmd_bounds(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let b = &cfg.bounds;
    let model = cfg.model()?;
    let measure = cfg.measure()?;
    let dim = model.dim();
    let cone = ConeMeasure::new(model.clone(), measure.clone());
    let geometry = match default_geometry(dim, b.geometry)? {
        Geometry::HalfLines => BoundGeometry::HalfLines,
        Geometry::Quadrant => BoundGeometry::Quadrant,
        Geometry::Enclosed => BoundGeometry::Enclosed { a: b.inner },
    };
    let r_grid = match &b.r_grid {
        Some(g) => g.clone(),
        None => log_grid(b.r_min, b.r_max, b.r_points),
    };
    let (tau, tau_source) = resolve_tau(&model, &measure, b.tau, cfg.seed);
    let opts = SeriesOptions { tail_tol: b.tail_tol, max_terms: b.max_terms };
    let curve = bound_curve(&cone, geometry, &r_grid, tau, opts)?;

    let mut table = Table::new(&[
        "r",
        "upper",
        "lower",
        "coupling_estimate",
        "ci",
        "H",
        "R",
        "C",
        "series",
        "series_terms",
        "series_tail",
        "series_converged",
        "poly_closed_form",
        "poly_hypothesis",
        "superexp_closed_form",
        "superexp_hypothesis",
        "note",
    ]);
    for p in &curve.points {
        let mut row = vec![num(p.r), num(p.upper), opt_num(p.lower), String::new(), String::new()];
        match (p.constants, p.series) {
            (Some(k), Some(s)) => {
                row.extend([num(k.h), num(k.big_r), num(k.c), num(s.value()), s.terms.to_string()]);
                row.extend([num(s.tail_bound), s.converged.to_string()]);
                match &b.poly {
                    Some(ps) => {
                        row.push(num(series_poly_bound(ps.gamma, ps.delta, k.c, dim)?));
                        row.push(poly_hypothesis(&cone, ps.gamma, ps.delta, k.c, dim).to_string());
                    }
                    None => row.extend([String::new(), String::new()]),
                }
                match &b.superexp {
                    Some(se) => {
                        row.push(num(series_superexp_bound(se.gamma, se.delta, se.c, k.c, dim)?.value));
                        row.push(superexp_hypothesis(&cone, se.gamma, se.delta, se.c, k.c).to_string());
                    }
                    None => row.extend([String::new(), String::new()]),
                }
            }
            _ => row.extend(std::iter::repeat_n(String::new(), 11)),
        }
        let note = if p.upper == 0.0 {
            "underflow: bound below f64 range"
        } else if p.series.is_some_and(|s| !s.converged) {
            "series unconverged"
        } else {
            ""
        };
        row.push(note.to_string());
        table.push(row);
    }
    let csv_path = ctx.path("bounds.csv");
    table.write(&csv_path, &ctx.hash)?;
    let json_path = ctx.path("bounds.json");
    write_json(&json_path, &BoundsReport { config_hash: &ctx.hash, tau_source, curve: &curve })?;
    let message = format!("{} bound points written (tau: {tau_source})\n", curve.points.len());
    Ok(Outcome::ok(vec![csv_path, json_path], message))
}

// ---------------------------------------------------------------- mixing

const EVENT_HEADER: [&str; 12] = [
    "lag",
    "p_a",
    "p_b",
    "p_ab",
    "gap",
    "sigma",
    "exact_p_a",
    "exact_p_ab",
    "exact_gap",
    "beta_lower_estimate",
    "half_beta_upper",
    "replicates",
];

fn event_row(cone: &ConeMeasure, e: &EventGapEstimate) -> Result<Vec<String>, CliError> {
    let lag = e.h.norm();
    let half_upper = if cone.model().dim() == 1 && lag > 0.0 { Some(0.5 * beta_upper_1d(cone, lag)?) } else { None };
    Ok(vec![
        num(lag),
        num(e.p_a),
        num(e.p_b),
        num(e.p_ab),
        num(e.gap),
        num(e.sigma),
        num(e.exact_p_a),
        opt_num(e.exact_p_ab),
        opt_num(e.exact_gap),
        num(e.beta_lower_estimate),
        opt_num(half_upper),
        e.replicates.to_string(),
    ])
}

pub fn cmd_mixing(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = &ctx.config;
    let mx = &cfg.mixing;
    let model = cfg.model()?;
    let measure = cfg.measure()?;
    let dim = model.dim();
    let cone = ConeMeasure::new(model.clone(), measure.clone());
    let csv_path = ctx.path("mixing.csv");
    let json_path = ctx.path("mixing.json");
    let message;
    match mx.mode {
        MixingMode::Coupling => {
            let geometry = default_geometry(dim, mx.geometry)?;
            let (tau, tau_source) = resolve_tau(&model, &measure, mx.tau, cfg.seed);
            let opts = SeriesOptions { tail_tol: cfg.bounds.tail_tol, max_terms: cfg.bounds.max_terms };
            let mut table = Table::new(&[
                "r",
                "upper",
                "lower",
                "coupling_estimate",
                "ci",
                "delta1",
                "sigma1",
                "delta2",
                "sigma2",
                "used",
                "dropped",
                "eta_correlation",
            ]);
            let mut reports = Vec::new();
            for &r in &mx.r {
                if !(r.is_finite() && r > 0.0) {
                    return Err(CliError::Invalid("mixing.r values must be positive and finite".into()));
                }
                let (g, upper) = match geometry {
                    Geometry::HalfLines => (CouplingGeometry::HalfLines { r }, beta_upper_1d(&cone, r)?),
                    Geometry::Quadrant => {
                        (CouplingGeometry::Quadrant { r }, beta_upper_quadrant(&cone, dim, r, opts)?.value)
                    }
                    Geometry::Enclosed => {
                        let a = mx.inner;
                        let b = 4.0 * r / (dim as f64).sqrt() + 2.0 * a;
                        (CouplingGeometry::Enclosed { a, b }, beta_upper_enclosed(&cone, dim, a, b, opts)?.value)
                    }
                };
                let probes = ProbeGrid::for_geometry(&g, dim, mx.probes_per_region, mx.probe_extent.unwrap_or(r));
                let rep = estimate_coupling_delta(&model, &measure, g, &probes, cfg.replicates, cfg.seed, &ctx.exec)?;
                let lower = match tau {
                    Some(t) => Some(beta_lower(&cone, t, r)?),
                    None => None,
                };
                table.push(vec![
                    num(r),
                    num(upper),
                    opt_num(lower),
                    num(rep.bound),
                    num(3.0 * rep.sigma_bound),
                    num(rep.delta1),
                    num(rep.sigma1),
                    num(rep.delta2),
                    num(rep.sigma2),
                    rep.used.to_string(),
                    rep.dropped.to_string(),
                    num(rep.eta_correlation),
                ]);
                reports.push(json!({ "upper": upper, "lower": lower, "report": rep }));
            }
            table.write(&csv_path, &ctx.hash)?;
            write_json(
                &json_path,
                &json!({ "config_hash": ctx.hash, "mode": "coupling", "tau_source": tau_source, "results": reports }),
            )?;
            message = format!("coupling estimates for {} band widths (ci = 3 sigma)\n", mx.r.len());
        }
        MixingMode::Alpha => {
            let h = match &mx.lag {
                Some(l) => Point::from_slice(l)?,
                None => Point::axis(0, 1.0),
            };
            let e = estimate_alpha_event(&model, &measure, mx.threshold, h, cfg.replicates, cfg.seed, &ctx.exec)?;
            let mut table = Table::new(&EVENT_HEADER);
            table.push(event_row(&cone, &e)?);
            table.write(&csv_path, &ctx.hash)?;
            write_json(&json_path, &json!({ "config_hash": ctx.hash, "mode": "alpha", "estimate": e }))?;
            message = format!("gap = {} +/- {} (1 sigma)\n", num(e.gap), num(e.sigma));
        }
        MixingMode::Covariance => {
            let curve = covariance_decay(&model, &measure, mx.threshold, &mx.lags, cfg.replicates, cfg.seed, &ctx.exec)?;
            let mut table = Table::new(&EVENT_HEADER);
            for e in &curve.entries {
                table.push(event_row(&cone, e)?);
            }
            table.write(&csv_path, &ctx.hash)?;
            write_json(&json_path, &json!({ "config_hash": ctx.hash, "mode": "covariance", "curve": curve }))?;
            message = format!(
                "decay over {} lags: kendall tau {}, decreasing={}\n",
                curve.lags.len(),
                num(curve.kendall_tau),
                curve.decreasing
            );
        }
    }
    Ok(Outcome::ok(vec![csv_path, json_path], message))
}
