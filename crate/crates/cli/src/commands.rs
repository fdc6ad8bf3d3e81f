//! Subcommand implementations. Each one resolves its inputs (a scenario file
//! or a figure preset), computes, and writes CSV/report/SVG files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use decaylab::amplitude::{series, SeriesResult, TwoMassState};
use decaylab::analysis::{extract_period, scaling_ratio, FitReport};
use decaylab::asymptotics::{self, dilation_map, limits, long_time, short_time, Regime};
use decaylab::report::KvBlock;
use decaylab::{Execution, QuadConfig};

use crate::error::{CliError, Result};
use crate::plot::{self, Line};
use crate::presets::{self, Curve, PlotKind, Preset};
use crate::scenario::Scenario;
use crate::verify::{self, CheckKind};

#[derive(Debug, Parser)]
#[command(name = "decaylab", version, about = "Survival amplitudes of unstable states in moving frames")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Use the curves of a built-in figure preset instead of a scenario file.
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=9))]
    pub figure: Option<u8>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Verification threshold for `verify`, `period` and `scaling-check`;
    /// quadrature relative tolerance for every other command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Comma-separated momenta in units of the scale mass; replaces the scenario's.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub momenta: Option<Vec<f64>>,
    /// Evaluate grid points on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complex amplitude and probability per momentum.
    Amplitude,
    /// Probability and its direct/interference decomposition per momentum.
    Probability,
    /// Long- and short-time laws with predictor columns.
    Asymptote {
        /// Add the ultrarelativistic approximations.
        #[arg(long)]
        ultra: bool,
    },
    /// Long-time regime and coefficients.
    Classify,
    /// Run a built-in check; exits 1 unless every verdict passes.
    Verify {
        #[arg(value_enum)]
        check: CheckKind,
    },
    /// Oscillation period extracted from the scenario grid.
    Period,
    /// `P_p(τ)/P₀(τ/χ)` on the scenario grid.
    ScalingCheck,
    /// Regenerate the data and plot of a figure preset.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=9))]
        fig: u8,
    },
    /// Plot CSV files to SVG.
    Plot {
        /// CSV files, one line each.
        #[arg(long = "csv", required = true, num_args = 1..)]
        csv: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "linear")]
        kind: KindArg,
        /// Ordinate column; defaults by kind.
        #[arg(long)]
        column: Option<String>,
        /// Dashed overlay column, drawn when present.
        #[arg(long)]
        overlay: Option<String>,
        #[arg(long, default_value = "plot")]
        title: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    Linear,
    Quadratic,
    Loglog,
    Detrended,
    Ratio,
}

impl From<KindArg> for PlotKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Linear => PlotKind::Linear,
            KindArg::Quadratic => PlotKind::QuadraticAbscissa,
            KindArg::Loglog => PlotKind::LogLog,
            KindArg::Detrended => PlotKind::Detrended,
            KindArg::Ratio => PlotKind::Ratio,
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub stdout: String,
}

struct Job {
    scenario: Scenario,
    state: TwoMassState,
    momenta: Vec<f64>,
    cfg: QuadConfig,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn jobs(&self, tol_is_quad: bool) -> Result<Vec<Job>> {
        let scenarios = match (&self.scenario, self.figure) {
            (Some(_), Some(_)) => return Err(CliError::Input("give either --scenario or --figure, not both".into())),
            (Some(path), None) => vec![Scenario::load(path)?],
            (None, Some(f)) => {
                let p = presets::preset(f)?;
                p.curves.iter().map(|c| p.scenario(c)).collect::<Result<_>>()?
            }
            (None, None) => return Err(CliError::Input("missing --scenario <path> (or --figure <1..9>)".into())),
        };
        scenarios
            .into_iter()
            .map(|mut s| {
                if let Some(m) = &self.momenta {
                    s.momenta = m.clone();
                }
                if tol_is_quad {
                    if let Some(t) = self.tol {
                        s.quad.get_or_insert_with(Default::default).rel_tol = Some(t);
                    }
                }
                s.validate()?;
                Ok(Job { state: s.state()?, momenta: s.momenta.clone(), cfg: s.quad_config(), scenario: s })
            })
            .collect()
    }
}

fn p_tag(p: f64) -> String {
    format!("p{p}")
}

fn write(out: &mut Outcome, path: PathBuf, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    out.files.push(path);
    Ok(())
}

/// `outputs.<kind>` from the scenario when set (suffixed per momentum when
/// there are several), else `<out>/<name>_<tag>.<ext>`.
fn target(common: &Common, job: &Job, configured: Option<&Path>, tag: &str, ext: &str) -> PathBuf {
    match configured {
        Some(p) if job.momenta.len() == 1 => p.to_path_buf(),
        Some(p) => {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let ext = p.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| ext.into());
            p.with_file_name(format!("{stem}_{tag}.{ext}"))
        }
        None => common.out.join(format!("{}_{tag}.{ext}", job.scenario.name)),
    }
}

fn csv_target(common: &Common, job: &Job, tag: &str) -> PathBuf {
    let configured = job.scenario.outputs.as_ref().and_then(|o| o.csv.as_deref());
    target(common, job, configured, tag, "csv")
}

fn report_target(common: &Common, job: &Job, tag: &str) -> PathBuf {
    let configured = job.scenario.outputs.as_ref().and_then(|o| o.report.as_deref());
    target(common, job, configured, tag, "txt")
}

fn header(job: &Job, command: &str) -> KvBlock {
    let mut b = KvBlock::new();
    b.push("command", command)
        .push("scenario", &job.scenario.name)
        .push("scenario_sha256", job.scenario.provenance_hash())
        .push("version", env!("CARGO_PKG_VERSION"))
        .real("rel_tol", job.cfg.rel_tol);
    b
}

fn compute(job: &Job, p: f64, exec: Execution) -> Result<SeriesResult> {
    Ok(series(&job.state, p, &job.scenario.grid.values()?, &job.cfg, exec)?)
}

/// `tau,prob,direct_1,direct_2,interference`.
pub fn probability_csv(s: &SeriesResult, weights: [f64; 2]) -> String {
    let [w1, w2] = weights;
    let mut out = String::from("tau,prob,direct_1,direct_2,interference\n");
    for i in 0..s.len() {
        let [a1, a2] = s.components[i];
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.tau[i],
            s.prob[i],
            w1 * w1 * a1.norm_sqr(),
            w2 * w2 * a2.norm_sqr(),
            2.0 * w1 * w2 * (a1 * a2.conj()).re
        );
    }
    out
}

pub fn ratio_csv(tau: &[f64], ratio: &[f64]) -> String {
    let mut out = String::from("tau,ratio\n");
    for (t, r) in tau.iter().zip(ratio) {
        let _ = writeln!(out, "{t:.16e},{r:.16e}");
    }
    out
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    let exec = c.exec();
    let mut out = Outcome::default();
    match &cli.command {
        Command::Amplitude | Command::Probability => {
            let amp = matches!(cli.command, Command::Amplitude);
            for job in c.jobs(true)? {
                let mut lines = Vec::new();
                for &p in &job.momenta {
                    let s = compute(&job, p, exec)?;
                    let text = if amp { s.to_csv() } else { probability_csv(&s, job.scenario.weights()) };
                    let tag = if amp { p_tag(p) } else { format!("{}_prob", p_tag(p)) };
                    write(&mut out, csv_target(c, &job, &tag), &text)?;
                    lines.extend(plot::lines_from_csv(&text, &format!("p={p}"), PlotKind::Linear, "prob", None)?);
                }
                if let Some(path) = job.scenario.outputs.as_ref().and_then(|o| o.plot.clone()) {
                    write(&mut out, path, &plot::render(&job.scenario.name, PlotKind::Linear, &lines)?)?;
                }
            }
        }
        Command::Asymptote { ultra } => {
            for job in c.jobs(true)? {
                for &p in &job.momenta {
                    let model = long_time(&job.state, p)?;
                    let mut rep = header(&job, "asymptote");
                    rep.extend("", &model.report());
                    rep.extend("short_time.", &short_time(&job.state, p, &job.cfg)?.report());
                    if *ultra {
                        match limits(&job.state, p)?.ultrarelativistic {
                            Some(u) => rep.extend("ultra.", &u.report()),
                            None => rep.push("ultra", "undefined at p = 0"),
                        };
                    }
                    let s = compute(&job, p, exec)?;
                    let tag = format!("{}_asymptote", p_tag(p));
                    write(&mut out, csv_target(c, &job, &tag), &asymptotics::join_csv(&s, &model))?;
                    write(&mut out, report_target(c, &job, &tag), &rep.to_string())?;
                    out.stdout.push_str(&rep.to_string());
                }
            }
        }
        Command::Classify => {
            for job in c.jobs(true)? {
                for &p in &job.momenta {
                    let mut rep = header(&job, "classify");
                    rep.extend("", &long_time(&job.state, p)?.report());
                    out.stdout.push_str(&rep.to_string());
                }
            }
        }
        Command::Verify { check } => {
            let mut failed = Vec::new();
            for job in c.jobs(false)? {
                let report = verify::run(*check, &job.state, &job.momenta, &job.cfg, exec, c.tol)?;
                let name = format!("verify_{}", check_name(*check));
                let rep = full_report(&job, &name, &report);
                write(&mut out, report_target(c, &job, &name), &rep)?;
                out.stdout.push_str(&rep);
                if !report.passed() {
                    failed.push(format!("{}: {}", job.scenario.name, verify::failures(&report)));
                }
            }
            if !failed.is_empty() {
                return Err(CliError::VerificationFailed(failed.join(" | ")));
            }
        }
        Command::Period => {
            let mut failed = Vec::new();
            for job in c.jobs(false)? {
                for &p in &job.momenta {
                    let model = long_time(&job.state, p)?;
                    let mut rep = header(&job, "period");
                    rep.real("p", p).push("regime", model.regime).real("period_predicted", model.period);
                    if model.regime != Regime::DampedOscillation {
                        rep.push("period_measured", "none (no oscillating regime)");
                    } else {
                        let est = extract_period(&compute(&job, p, exec)?, model.osc_exponent)?;
                        let dev = (est.period / model.period - 1.0).abs();
                        rep.real("period_measured", est.period)
                            .real("period_ci", est.ci)
                            .push("crossings", est.crossings)
                            .real("relative_deviation", dev);
                        if let Some(t) = c.tol {
                            rep.push("verdict", if dev <= t { "pass" } else { "fail" });
                            if dev > t {
                                failed.push(format!("{} p={p}: deviation {dev:e} > {t:e}", job.scenario.name));
                            }
                        }
                    }
                    write(&mut out, report_target(c, &job, &format!("{}_period", p_tag(p))), &rep.to_string())?;
                    out.stdout.push_str(&rep.to_string());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::VerificationFailed(failed.join("; ")));
            }
        }
        Command::ScalingCheck => {
            let mut failed = Vec::new();
            for job in c.jobs(false)? {
                for &p in &job.momenta {
                    let model = long_time(&job.state, p)?;
                    let chi = dilation_map(&model, p, 0.0)?.chi_pk;
                    let taus = job.scenario.grid.values()?;
                    let r = scaling_ratio(&job.state, p, chi, &taus, &job.cfg, exec)?;
                    let dev = r.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
                    let tag = format!("{}_scaling", p_tag(p));
                    let mut rep = header(&job, "scaling-check");
                    rep.real("p", p).real("chi", chi).real("max_deviation", dev);
                    if let Some(t) = c.tol {
                        rep.push("verdict", if dev <= t { "pass" } else { "fail" });
                        if dev > t {
                            failed.push(format!("{} p={p}: deviation {dev:e} > {t:e}", job.scenario.name));
                        }
                    }
                    write(&mut out, csv_target(c, &job, &tag), &ratio_csv(&taus, &r))?;
                    write(&mut out, report_target(c, &job, &tag), &rep.to_string())?;
                    out.stdout.push_str(&rep.to_string());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::VerificationFailed(failed.join("; ")));
            }
        }
        Command::Figure { fig } => figure(c, *fig, exec, &mut out)?,
        Command::Plot { csv, kind, column, overlay, title } => {
            let kind = PlotKind::from(*kind);
            let col = column.clone().unwrap_or_else(|| plot::default_column(kind).to_string());
            let mut lines = Vec::new();
            for path in csv {
                let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                lines.extend(plot::lines_from_csv(&text, &label, kind, &col, overlay.as_deref())?);
            }
            let svg = plot::render(title, kind, &lines)?;
            write(&mut out, c.out.join(format!("{}.svg", sanitize(title))), &svg)?;
        }
    }
    Ok(out)
}

fn check_name(k: CheckKind) -> &'static str {
    match k {
        CheckKind::ShortTime => "short-time",
        CheckKind::Slope => "slope",
        CheckKind::Period => "period",
        CheckKind::Scaling => "scaling",
        CheckKind::Identity => "identity",
    }
}

fn full_report(job: &Job, command: &str, r: &FitReport) -> String {
    let mut b = header(job, command);
    b.extend("", &r.report());
    b.to_string()
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

fn curve_label(c: &Curve) -> String {
    format!("({}) α={},{} ξ0={},{} p={}", c.label, c.alpha[0], c.alpha[1], c.xi0[0], c.xi0[1], c.p)
}

/// Data for one preset curve in the column layout its plot kind reads.
pub fn figure_csv(preset: &Preset, curve: &Curve, cfg: &QuadConfig, exec: Execution) -> Result<String> {
    let state = curve.state()?;
    let taus = preset.grid()?.values()?;
    Ok(match preset.kind {
        PlotKind::Linear | PlotKind::QuadraticAbscissa => series(&state, curve.p, &taus, cfg, exec)?.to_csv(),
        PlotKind::LogLog => {
            let s = series(&state, curve.p, &taus, cfg, exec)?;
            asymptotics::join_csv(&s, &long_time(&state, curve.p)?)
        }
        PlotKind::Detrended => {
            decaylab::analysis::join_csv(&series(&state, curve.p, &taus, cfg, exec)?, curve.detrend_exponent())
        }
        PlotKind::Ratio => {
            ratio_csv(&taus, &scaling_ratio(&state, curve.p, curve.dilation_factor()?, &taus, cfg, exec)?)
        }
    })
}

fn figure(c: &Common, fig: u8, exec: Execution, out: &mut Outcome) -> Result<()> {
    let preset = presets::preset(fig)?;
    let mut cfg = presets::preset_quad();
    if let Some(t) = c.tol {
        cfg.rel_tol = t;
    }
    let momenta = c.momenta.clone();
    let mut lines: Vec<Line> = Vec::new();
    let mut rep = KvBlock::new();
    rep.push("figure", fig).real("range_start", preset.range.0).real("range_stop", preset.range.1);
    rep.push("points", preset.grid()?.points).real("rel_tol", cfg.rel_tol);
    if let Some(n) = preset.note {
        rep.push("note", n);
    }
    let overlay = (preset.kind == PlotKind::LogLog).then_some("asym_total");
    for curve in &preset.curves {
        let curves: Vec<Curve> = match &momenta {
            Some(ms) => ms.iter().map(|&p| Curve { p, ..*curve }).collect(),
            None => vec![*curve],
        };
        for (i, cv) in curves.iter().enumerate() {
            let text = figure_csv(&preset, cv, &cfg, exec)?;
            let suffix = if curves.len() > 1 { format!("{}{}", cv.label, i + 1) } else { cv.label.to_string() };
            write(out, c.out.join(format!("fig{fig}_{suffix}.csv")), &text)?;
            rep.push(format!("curve_{suffix}"), curve_label(cv));
            lines.extend(plot::lines_from_csv(
                &text,
                &curve_label(cv),
                preset.kind,
                plot::default_column(preset.kind),
                overlay,
            )?);
        }
    }
    let svg = plot::render(&format!("figure {fig}"), preset.kind, &lines)?;
    write(out, c.out.join(format!("fig{fig}.svg")), &svg)?;
    write(out, c.out.join(format!("fig{fig}.txt")), &rep.to_string())?;
    Ok(())
}
