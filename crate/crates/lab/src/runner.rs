//! Runs a validated [`ExperimentConfig`] and writes its series, tables and
//! manifest into `<output root>/<experiment name>/`.

use std::path::{Path, PathBuf};

use echolab_core::analysis::{
    decay_onset, deviation_d, deviation_d_log, detect_td, detect_threshold, fit_exponential, saturation_check,
    scaling_collapse, Detection, Normalization, TdOptions,
};
use echolab_core::classical::{action_diffusion, sawtooth_lyapunov, ActionHistogram, ActionSampling, Lambda1Series};
use echolab_core::ising::{breakdown_estimate, limit_log_echo_density, uniform_times, IsingQuench, LAMBDA_C};
use echolab_core::maps::{EnsembleSpec, KickedModel, ModelKind};
use echolab_core::semiclassics::{fgr_rate, lyapunov_prediction, lyapunov_prediction_fitted};
use echolab_core::torus::TorusGrid;
use echolab_core::EchoSeries;
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, Prediction};
use crate::drivers;
use crate::ed;
use crate::error::{LabError, LabResult};
use crate::io::{format_float, read_series, write_series, write_table, Table};
use crate::manifest::{num, provenance_lines, sha256_file, Manifest, RunRecord, MANIFEST_FILE};
use crate::report;

/// Environment variable naming the default output root.
pub const OUTPUT_DIR_ENV: &str = "ECHOLAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "echolab-out";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_root: PathBuf,
    pub force: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

/// Output root: explicit flag, then the config's `output_dir`, then
/// `$ECHOLAB_OUTPUT_DIR`, then `./echolab-out`.
pub fn resolve_output_root(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

/// Writes files into one experiment directory and registers them on runs.
struct Sink {
    dir: PathBuf,
    header: Vec<(String, String)>,
}

impl Sink {
    /// File `<prefix>_<run id>.csv`, or `<run id>.csv` for an empty prefix.
    fn file_name(prefix: &str, rec: &RunRecord) -> String {
        if prefix.is_empty() {
            format!("{}.csv", rec.id)
        } else {
            format!("{prefix}_{}.csv", rec.id)
        }
    }

    fn series(&self, rec: &mut RunRecord, role: &str, prefix: &str, s: &EchoSeries) -> LabResult<()> {
        let file = Self::file_name(prefix, rec);
        let mut header = self.header.clone();
        header.push(("run".into(), rec.id.clone()));
        write_series(&self.dir.join(&file), s, &header)?;
        self.register(rec, role, file)
    }

    fn table(&self, rec: &mut RunRecord, role: &str, prefix: &str, mut t: Table) -> LabResult<()> {
        let file = Self::file_name(prefix, rec);
        let mut header = self.header.clone();
        header.push(("run".into(), rec.id.clone()));
        header.append(&mut t.meta);
        t.meta = header;
        write_table(&self.dir.join(&file), &t)?;
        self.register(rec, role, file)
    }

    fn register(&self, rec: &mut RunRecord, role: &str, file: String) -> LabResult<()> {
        let hash = sha256_file(&self.dir.join(&file))?;
        rec.sha256.insert(file.clone(), hash);
        rec.files.insert(role.into(), file);
        Ok(())
    }
}

fn tag(x: f64) -> String {
    format_float(x)
}

pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> LabResult<RunOutcome> {
    cfg.validate()?;
    let dir = opts.out_root.join(&cfg.name);
    let manifest_path = dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        if !opts.force {
            return Err(LabError::Collision(manifest_path));
        }
        if let Ok(old) = Manifest::read(&manifest_path) {
            for file in old.runs.iter().flat_map(|r| r.files.values()) {
                let _ = std::fs::remove_file(dir.join(file));
            }
        }
    }
    std::fs::create_dir_all(&dir)?;
    let sink = Sink {
        dir: dir.clone(),
        header: provenance_lines(cfg),
    };
    let mut manifest = Manifest::new(cfg);
    info!("running {} ({}) into {}", cfg.name, cfg.kind.name(), dir.display());
    match cfg.kind {
        ExperimentKind::KickedEcho => kicked_echo(cfg, &sink, &mut manifest)?,
        ExperimentKind::Scan if cfg.ising_pairs().is_empty() => kicked_scan(cfg, &sink, &mut manifest)?,
        ExperimentKind::Scan => ising_scan(cfg, &sink, &mut manifest)?,
        ExperimentKind::IsingEcho => ising_echo(cfg, &sink, &mut manifest)?,
        ExperimentKind::ClassicalOracle => classical_oracle(cfg, &sink, &mut manifest)?,
        ExperimentKind::Fit => fit_inputs(cfg, &mut manifest)?,
        ExperimentKind::Report => {
            let input = cfg.inputs.manifest.as_deref().expect("validated");
            let out = report::report(input, &dir)?;
            let mut rec = RunRecord::new("report");
            for f in out.files {
                let name = f
                    .strip_prefix(&dir)
                    .unwrap_or(&f)
                    .to_string_lossy()
                    .into_owned();
                sink.register(&mut rec, &name.clone(), name)?;
            }
            rec.result("rows", out.rows);
            manifest.runs.push(rec);
        }
    }
    manifest.write(&manifest_path)?;
    Ok(RunOutcome { dir, manifest })
}

/// Classical inputs shared by every run at one kick strength.
struct KickedContext {
    r: Option<f64>,
    lambda1: Option<Lambda1Series>,
}

fn kicked_context(cfg: &ExperimentConfig, kind: ModelKind, k: f64) -> LabResult<KickedContext> {
    let c = &cfg.classical;
    let mut ctx = KickedContext { r: None, lambda1: None };
    match cfg.analysis.prediction {
        Prediction::None => {}
        Prediction::Fgr => {
            ctx.r = Some(match cfg.analysis.r {
                Some(r) => r,
                None => {
                    let corr = drivers::potential_correlation(kind, k, c.l_max, c.n_traj, c.length, cfg.seed())?;
                    let r = action_diffusion(&corr).r;
                    info!("{} K={k}: R = {r:.5} from {} trajectories", kind.name(), c.n_traj);
                    r
                }
            })
        }
        Prediction::Lyapunov => {
            let steps = c.lambda1_steps.max(cfg.time.t_max);
            ctx.lambda1 = Some(drivers::lambda1(kind, k, c.lambda1_traj, steps, c.tangent()?, cfg.seed())?);
        }
    }
    Ok(ctx)
}

fn echo_run(cfg: &ExperimentConfig, model: KickedModel, sigma: f64, n: usize) -> LabResult<(RunRecord, EchoSeries)> {
    let id = format!("{}_K{}_s{}_N{n}", model.kind.name(), tag(model.k), tag(sigma));
    let rec = RunRecord::new(id)
        .param("model", model.kind.name())
        .param("K", model.k)
        .param("sigma", sigma)
        .param("N", n);
    let grid = TorusGrid::new(n)?;
    let ens = EnsembleSpec {
        n_states: cfg.ensemble.n_states,
        seed: cfg.seed(),
        xi: cfg.ensemble.xi,
    };
    let series = drivers::ensemble_echo(model, sigma, grid, &ens, cfg.time.t_max)?;
    Ok((rec, series))
}

/// Fit, prediction and deviation for one kicked-map series; returns the
/// prediction curve when one was requested.
fn analyze_kicked(
    cfg: &ExperimentConfig,
    series: &EchoSeries,
    n: usize,
    sigma: f64,
    ctx: &KickedContext,
    rec: &mut RunRecord,
) -> LabResult<Option<EchoSeries>> {
    let a = &cfg.analysis;
    let t_max = cfg.time.t_max as f64;
    let t_on = decay_onset(series, a.onset_level, a.onset_min);
    rec.number("t_on", t_on.unwrap_or(f64::NAN));
    let fgr = ctx.r.map(|r| fgr_rate(sigma, r));
    let t_n = fgr.filter(|r| *r > 0.0).map(|rate| (n as f64).ln() / rate);
    if let Some(t_n) = t_n {
        rec.number("t_n", t_n);
    }
    let window = match (a.window, t_on) {
        (Some([s, e]), _) => Some((s, e)),
        (None, Some(t0)) => Some(match (a.window_length, t_n) {
            (Some(len), _) => (t0, t0 + len),
            (None, Some(t_n)) => (t0, a.tn_fraction * t_n),
            (None, None) => (t0, t_max),
        }),
        (None, None) => None,
    };
    let Some((w0, w1)) = window else {
        warn!("{}: echo never drops to {}; no fit window", rec.id, a.onset_level);
        return Ok(None);
    };
    rec.number("window_start", w0);
    rec.number("window_end", w1);
    match fit_exponential(series, w0, w1) {
        Ok(fit) => {
            rec.number("fit_rate", fit.rate);
            rec.number("fit_rms", fit.rms_residual);
            rec.result("fit_points", fit.n_points);
        }
        Err(e) => {
            warn!("{}: fit failed: {e}", rec.id);
            rec.result("fit_error", e.to_string());
        }
    }
    let prediction = match a.prediction {
        Prediction::None => None,
        Prediction::Fgr => {
            let (r, rate) = (ctx.r.expect("context has R"), fgr.expect("context has R"));
            rec.number("R", r);
            rec.number("predicted_rate", rate);
            let m0 = series.interpolate(w0)?;
            let m: Vec<f64> = series.times.iter().map(|t| m0 * (-rate * (t - w0)).exp()).collect();
            let pred = EchoSeries::exact(series.times.clone(), m)?
                .with_meta("regime", "fgr")
                .with_meta("R", r)
                .with_meta("rate", rate)
                .with_meta("anchor_t", w0);
            let opts = TdOptions {
                delta_ln: a.delta_ln,
                w_sustain: a.w_sustain,
                start: w0,
            };
            let t_d = detect_td(series, &pred.times, &pred.m, &opts)?;
            rec.result("t_d", t_d.value().map_or(serde_json::Value::Null, num));
            if let Detection::Detected(td) = t_d {
                second_stage(series, n, (w0, td), a.stage_floor, rec);
            }
            if let Some(t_n) = t_n.filter(|t| 2.0 * t < t_max) {
                let sat = saturation_check(series, n, 2.0 * t_n, t_max)?;
                rec.number("saturation_ratio", sat.ratio);
            }
            Some(pred)
        }
        Prediction::Lyapunov => {
            let l1 = ctx.lambda1.as_ref().expect("context has Λ₁");
            let curve = match a.anchor_window {
                Some([s, e]) => lyapunov_prediction_fitted(l1, &series.times, series, (s, e))?,
                None => lyapunov_prediction(l1, &series.times, (w0, series.interpolate(w0)?))?,
            };
            let slope = (l1.exponent_at(w1)? - l1.exponent_at(w0)?) / (w1 - w0);
            rec.number("predicted_rate", slope);
            let pred = curve.to_series()?;
            match deviation_d(series, &pred, w0, w1, Normalization::None) {
                Ok(d) => {
                    rec.number("D", d.d);
                    rec.number("D_mean_offset", d.mean_offset);
                }
                Err(e) => rec.result("D_error", e.to_string()),
            }
            rec.number("max_ratio", max_ratio(series, &pred, w0, w1));
            if let Some([s, _]) = a.anchor_window {
                let point = lyapunov_prediction(l1, &series.times, (s, series.interpolate(s)?))?.to_series()?;
                rec.number("max_ratio_point_anchor", max_ratio(series, &point, w0, w1));
            }
            Some(pred)
        }
    };
    Ok(prediction)
}

/// Largest `max(M_e/M_p, M_p/M_e)` over exact points in `[start, end]`.
pub fn max_ratio(exact: &EchoSeries, pred: &EchoSeries, start: f64, end: f64) -> f64 {
    exact
        .times
        .iter()
        .zip(&exact.m)
        .filter(|(t, _)| **t >= start && **t <= end)
        .filter_map(|(&t, &m)| pred.interpolate(t).ok().map(|p| (m / p).max(p / m)))
        .fold(f64::NAN, f64::max)
}

/// Rate over `[t_d, t_s]`, where `t_s` is the first time the echo is within
/// twice its saturation value `1/N`.
fn second_stage(series: &EchoSeries, n: usize, (t_on, t_d): (f64, f64), stage_floor: f64, rec: &mut RunRecord) {
    // stop before the approach to the 1/N plateau bends the log-slope
    let floor = stage_floor / n as f64;
    let t_s = series
        .times
        .iter()
        .zip(&series.m)
        .find(|(t, m)| **t > t_d && **m <= floor)
        .map_or(*series.times.last().unwrap_or(&t_d), |(t, _)| *t);
    rec.number("second_stage_end", t_s);
    match fit_exponential(series, t_on, t_d) {
        Ok(fit) => rec.number("first_stage_rate", fit.rate),
        Err(e) => rec.result("first_stage_error", e.to_string()),
    }
    match fit_exponential(series, t_d, t_s) {
        Ok(fit) => rec.number("second_stage_rate", fit.rate),
        Err(e) => rec.result("second_stage_error", e.to_string()),
    }
}

fn kicked_echo(cfg: &ExperimentConfig, sink: &Sink, manifest: &mut Manifest) -> LabResult<()> {
    let kind = cfg.model_kind()?;
    for k in cfg.k_values() {
        let model = KickedModel::new(kind, k)?;
        let ctx = kicked_context(cfg, kind, k)?;
        for &sigma in &cfg.sweep.sigma {
            for &n in &cfg.sweep.n {
                let (mut rec, series) = echo_run(cfg, model, sigma, n)?;
                let pred = analyze_kicked(cfg, &series, n, sigma, &ctx, &mut rec)?;
                sink.series(&mut rec, "echo", "echo", &series)?;
                if let Some(p) = pred {
                    sink.series(&mut rec, "prediction", "pred", &p)?;
                }
                info!("{}: {:?}", rec.id, rec.results);
                manifest.runs.push(rec);
            }
        }
    }
    Ok(())
}

fn kicked_scan(cfg: &ExperimentConfig, sink: &Sink, manifest: &mut Manifest) -> LabResult<()> {
    let kind = cfg.model_kind()?;
    let rule = cfg.analysis.threshold()?;
    let mut summary = Table::new(&["K", "sigma", "N_c"]);
    for k in cfg.k_values() {
        let model = KickedModel::new(kind, k)?;
        let ctx = kicked_context(cfg, kind, k)?;
        for &sigma in &cfg.sweep.sigma {
            let mut points = Vec::new();
            for &n in &cfg.sweep.n {
                let (mut rec, series) = echo_run(cfg, model, sigma, n)?;
                let pred = analyze_kicked(cfg, &series, n, sigma, &ctx, &mut rec)?;
                sink.series(&mut rec, "echo", "echo", &series)?;
                if let Some(p) = pred {
                    sink.series(&mut rec, "prediction", "pred", &p)?;
                }
                match rec.result_f64("D") {
                    Some(d) => points.push((n as f64, d)),
                    None => warn!("{}: no deviation value; left out of the scan", rec.id),
                }
                manifest.runs.push(rec);
            }
            let id = format!("scan_{}_K{}_s{}", kind.name(), tag(k), tag(sigma));
            let mut rec = RunRecord::new(id)
                .param("model", kind.name())
                .param("K", k)
                .param("sigma", sigma);
            let n_c = scan_table(sink, &mut rec, "N", &points, rule)?;
            summary.rows.push(vec![k, sigma, n_c.unwrap_or(f64::NAN)]);
            manifest.runs.push(rec);
        }
    }
    let mut rec = RunRecord::new("scan_summary");
    sink.table(&mut rec, "summary", "", summary)?;
    manifest.runs.push(rec);
    Ok(())
}

/// Writes `(control, D)` and records the detected breakdown point.
fn scan_table(
    sink: &Sink,
    rec: &mut RunRecord,
    control: &str,
    points: &[(f64, f64)],
    rule: echolab_core::analysis::ThresholdRule,
) -> LabResult<Option<f64>> {
    let mut t = Table::new(&[control, "D"]);
    t.rows = points.iter().map(|(c, d)| vec![*c, *d]).collect();
    sink.table(rec, "scan", "", t)?;
    if points.len() < 3 {
        rec.result("detect_error", "fewer than 3 scan points");
        return Ok(None);
    }
    let res = detect_threshold(points, rule)?;
    rec.number("threshold", res.threshold);
    let found = res.detected.value();
    rec.result("detected", found.map_or(serde_json::Value::Null, num));
    Ok(found)
}

/// `N_p` grid for a scan at distance `δ = |λ − λ_c|`: even sizes at
/// log-spaced values of `N_p·δ`.
pub fn ising_scan_grid(cfg: &ExperimentConfig, delta: f64) -> Vec<usize> {
    if !cfg.sweep.n_p.is_empty() {
        let mut v = cfg.sweep.n_p.clone();
        v.sort_unstable();
        v.dedup();
        return v;
    }
    let c = &cfg.ising;
    let pts = c.control_points.max(2);
    let mut v: Vec<usize> = (0..pts)
        .map(|i| {
            let x = c.control_min * (c.control_max / c.control_min).powf(i as f64 / (pts - 1) as f64);
            ((x / delta / 2.0).round() as usize * 2).max(4)
        })
        .collect();
    v.dedup();
    v
}

/// `D` of `ln M/N_p` against the large-`N_p` limit on `[0, 1/(4δ)]`.
pub fn ising_deviation(n_p: usize, lambda0: f64, lambda: f64, points: usize) -> LabResult<f64> {
    let delta = (lambda - LAMBDA_C).abs();
    let tw = 1.0 / (4.0 * delta);
    let times = uniform_times(tw / points as f64, points);
    let lim: Vec<f64> = times.iter().map(|&t| limit_log_echo_density(lambda0, lambda, t)).collect();
    let q = IsingQuench::new(n_p, lambda0, lambda)?;
    let le: Vec<f64> = echolab_core::ising::ising_log_echo(&q, &times)
        .iter()
        .map(|x| x / n_p as f64)
        .collect();
    Ok(deviation_d_log(&times, &le, &times, &lim, 0.0, tw, Normalization::None)?.d)
}

fn ising_scan(cfg: &ExperimentConfig, sink: &Sink, manifest: &mut Manifest) -> LabResult<()> {
    let rule = cfg.analysis.threshold()?;
    let from_delta = cfg.sweep.pairs.len();
    let mut summary = Table::new(&["lambda0", "lambda", "N_d", "estimate"]);
    for (i, (l0, l)) in cfg.ising_pairs().into_iter().enumerate() {
        let delta = (l - LAMBDA_C).abs();
        let grid = ising_scan_grid(cfg, delta);
        let points = grid
            .par_iter()
            .map(|&n| Ok((n as f64, ising_deviation(n, l0, l, cfg.ising.window_points)?)))
            .collect::<LabResult<Vec<_>>>()?;
        let id = format!("scan_ising_l0{}_l{}", tag(l0), tag(l));
        let mut rec = RunRecord::new(id).param("lambda0", l0).param("lambda", l);
        // pairs built from δλ follow λ₀ = λ_c − δλ, λ = λ₀ − δλ
        let estimate = if i >= from_delta {
            let dl = LAMBDA_C - l0;
            rec = rec.param("delta_lambda", dl);
            let e = breakdown_estimate(dl)?;
            rec.number("estimate", e);
            e
        } else {
            f64::NAN
        };
        rec.number("window_end", 1.0 / (4.0 * delta));
        let n_d = scan_table(sink, &mut rec, "N_p", &points, rule)?;
        summary.rows.push(vec![l0, l, n_d.unwrap_or(f64::NAN), estimate]);
        manifest.runs.push(rec);
    }
    let mut rec = RunRecord::new("scan_summary");
    sink.table(&mut rec, "summary", "", summary)?;
    manifest.runs.push(rec);
    Ok(())
}

fn ising_echo(cfg: &ExperimentConfig, sink: &Sink, manifest: &mut Manifest) -> LabResult<()> {
    for (l0, l) in cfg.ising_pairs() {
        let n_max = *cfg.sweep.n_p.iter().max().expect("validated");
        let dt = match cfg.time.dt {
            Some(dt) => dt,
            None => IsingQuench::new(n_max, l0, l)?.default_time_step(),
        };
        let times = uniform_times(dt, cfg.time.steps);
        let series = drivers::ising_echoes(&cfg.sweep.n_p, l0, l, &times)?;
        let pair_id = format!("ising_l0{}_l{}", tag(l0), tag(l));

        let lim: Vec<f64> = times.par_iter().map(|&t| limit_log_echo_density(l0, l, t)).collect();
        let mut limit = Table::new(&["t", "ln_M_per_spin"]);
        limit.rows = times.iter().zip(&lim).map(|(t, v)| vec![*t, *v]).collect();
        let mut lim_rec = RunRecord::new(format!("{pair_id}_limit"))
            .param("lambda0", l0)
            .param("lambda", l);
        sink.table(&mut lim_rec, "limit", "", limit)?;

        let delta = (l - LAMBDA_C).abs();
        let (w0, w1) = match cfg.analysis.window {
            Some([a, b]) => (a, b),
            None => (2.0 * dt, 1.0 / (8.0 * delta)),
        };
        let in_range = times.last().is_some_and(|&t| t >= w1);
        let mut recs = Vec::new();
        for (s, &n_p) in series.iter().zip(&cfg.sweep.n_p) {
            let mut rec = RunRecord::new(format!("{pair_id}_Np{n_p}"))
                .param("lambda0", l0)
                .param("lambda", l)
                .param("N_p", n_p);
            if in_range {
                let ln: Vec<f64> = s.ln_m().iter().map(|x| x / n_p as f64).collect();
                let d = deviation_d_log(&times, &ln, &times, &lim, w0, w1, Normalization::None)?;
                rec.number("D_limit", d.d);
                let inside: Vec<f64> = times
                    .iter()
                    .zip(&ln)
                    .filter(|(t, _)| **t >= w0 && **t <= w1)
                    .map(|(_, v)| *v)
                    .collect();
                rec.number("window_mean_ln_m_per_spin", inside.iter().sum::<f64>() / inside.len() as f64);
            }
            if cfg.ising.ed_check && n_p <= ed::MAX_SPINS {
                let m = ed::survival_probability(n_p, l0, l, &times)?;
                let worst = m
                    .iter()
                    .zip(&s.m)
                    .map(|(a, b)| (a.ln() - b.ln()).abs())
                    .fold(0.0, f64::max);
                rec.number("ed_max_abs_dln", worst);
                let ed_series = EchoSeries::exact(times.clone(), m)?.with_meta("method", "exact-diagonalization");
                sink.series(&mut rec, "ed", "ed", &ed_series)?;
            }
            sink.series(&mut rec, "echo", "echo", s)?;
            recs.push(rec);
        }

        let mut coll = RunRecord::new(format!("{pair_id}_collapse"))
            .param("lambda0", l0)
            .param("lambda", l);
        coll.number("window_start", w0);
        coll.number("window_end", w1);
        let large: Vec<(usize, &EchoSeries)> = cfg
            .sweep
            .n_p
            .iter()
            .copied()
            .zip(&series)
            .filter(|(n, _)| *n >= cfg.ising.collapse_min_n_p)
            .collect();
        if in_range && large.len() >= 2 {
            let spread = scaling_collapse(&large, w0, w1)?;
            coll.number("collapse_spread", spread);
            let means: Vec<f64> = recs
                .iter()
                .filter(|r| r.param_f64("N_p").is_some_and(|n| n as usize >= cfg.ising.collapse_min_n_p))
                .filter_map(|r| r.result_f64("window_mean_ln_m_per_spin"))
                .collect();
            let mean = means.iter().sum::<f64>() / means.len() as f64;
            coll.number("collapse_relative", spread / mean.abs());
            for (rec, (&n_p, s)) in recs.iter_mut().zip(cfg.sweep.n_p.iter().zip(&series)) {
                if n_p < cfg.ising.collapse_min_n_p {
                    let mut set = large.clone();
                    set.push((n_p, s));
                    let with = scaling_collapse(&set, w0, w1)?;
                    rec.number("collapse_with_reference", with);
                    rec.number("collapse_growth", with / spread);
                }
            }
        } else {
            warn!("{pair_id}: collapse needs two chains of at least {} spins covering the window", cfg.ising.collapse_min_n_p);
        }
        manifest.runs.push(lim_rec);
        manifest.runs.extend(recs);
        manifest.runs.push(coll);
    }
    Ok(())
}

fn classical_oracle(cfg: &ExperimentConfig, sink: &Sink, manifest: &mut Manifest) -> LabResult<()> {
    let kind = cfg.model_kind()?;
    let c = &cfg.classical;
    let seed = cfg.seed();
    for k in cfg.k_values() {
        KickedModel::new(kind, k)?;
        let mut rec = RunRecord::new(format!("{}_K{}", kind.name(), tag(k)))
            .param("model", kind.name())
            .param("K", k);

        let corr = drivers::potential_correlation(kind, k, c.l_max, c.n_traj, c.length, seed)?;
        let diff = action_diffusion(&corr);
        rec.number("C0", corr.c[0]);
        rec.number("R", diff.r);
        rec.number("R_stderr", diff.stderr);
        rec.result("tail_not_decayed", diff.tail_not_decayed);
        let mut t = Table::new(&["l", "C", "stderr"]);
        t.rows = (0..corr.c.len()).map(|l| vec![l as f64, corr.c[l], corr.stderr[l]]).collect();
        sink.table(&mut rec, "correlation", "correlation", t)?;

        let lyap = drivers::lyapunov_exponent(kind, k, c.lyapunov_traj, c.lyapunov_steps, seed)?;
        rec.number("lambda_L", lyap.value);
        rec.number("lambda_L_stderr", lyap.stderr);
        rec.result("lambda_L_weak", lyap.weak);
        if kind == ModelKind::Sawtooth {
            rec.number("lambda_L_exact", sawtooth_lyapunov(k));
            rec.number("C0_exact", std::f64::consts::PI.powi(4) / 45.0);
        }

        let l1 = drivers::lambda1(kind, k, c.lambda1_traj, c.lambda1_steps, c.tangent()?, seed)?;
        rec.number("lambda1_last", *l1.values.last().expect("t_max ≥ 1"));
        let mut t = Table::new(&["t", "lambda1"]);
        t.rows = l1.times.iter().zip(&l1.values).map(|(a, b)| vec![*a, *b]).collect();
        sink.table(&mut rec, "lambda1", "lambda1", t)?;

        if c.action_samples > 0 {
            let grid = TorusGrid::new(c.action_n)?;
            let hbar = grid.hbar();
            let sampling = ActionSampling::Pooled { xi: hbar.sqrt() };
            let samples = drivers::action_difference_samples(
                kind,
                k,
                c.action_sigma,
                hbar,
                &sampling,
                c.action_t_max,
                c.action_samples,
                seed,
            )?;
            let rate = fgr_rate(c.action_sigma, diff.r);
            let mut t = Table::new(&["t", "M_sc", "M_fgr"]);
            let mut worst: f64 = 0.0;
            for (step, s) in samples.iter().enumerate() {
                let hist = ActionHistogram::from_samples(s, hbar)?;
                let m_sc = echolab_core::classical::semiclassical_echo_from_distribution(&hist, hbar)?;
                let m_fgr = (-rate * step as f64).exp();
                if step > 0 {
                    worst = worst.max((m_sc.ln() - m_fgr.ln()).abs() / m_fgr.ln().abs());
                }
                t.rows.push(vec![step as f64, m_sc, m_fgr]);
            }
            rec.number("action_max_log_rel_error", worst);
            sink.table(&mut rec, "action_echo", "action_echo", t)?;
        }
        manifest.runs.push(rec);
    }
    Ok(())
}

fn fit_inputs(cfg: &ExperimentConfig, manifest: &mut Manifest) -> LabResult<()> {
    let a = &cfg.analysis;
    for path in &cfg.inputs.series {
        let series = read_series(path)?;
        let mut rec = RunRecord::new(path.display().to_string()).param("input", path.display().to_string());
        let window = match a.window {
            Some([s, e]) => Some((s, e)),
            None => decay_onset(&series, a.onset_level, a.onset_min).map(|t0| {
                let end = a.window_length.map_or(*series.times.last().unwrap_or(&t0), |len| t0 + len);
                (t0, end)
            }),
        };
        let Some((s, e)) = window else {
            rec.result("fit_error", "no fit window");
            manifest.runs.push(rec);
            continue;
        };
        let fit = fit_exponential(&series, s, e)?;
        rec.number("window_start", s);
        rec.number("window_end", e);
        rec.number("fit_rate", fit.rate);
        rec.number("fit_intercept", fit.intercept);
        rec.number("fit_rms", fit.rms_residual);
        rec.result("fit_points", fit.n_points);
        manifest.runs.push(rec);
    }
    Ok(())
}

/// Path of the manifest of experiment `name` under `root`.
pub fn manifest_path(root: &Path, name: &str) -> PathBuf {
    root.join(name).join(MANIFEST_FILE)
}
