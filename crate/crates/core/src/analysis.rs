//! Empirical decay features of computed series: log-log slopes, oscillation
//! periods and dilation ratios, plus a self-describing report of verdicts.

use std::fmt::{self, Write as _};

use crate::amplitude::{self, SeriesResult, TwoMassState, SERIES_COLUMNS};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::quadrature::QuadConfig;
use crate::report::KvBlock;

pub const MIN_FIT_POINTS: usize = 8;
/// Local maxima needed for an envelope fit.
pub const MIN_ENVELOPE_PEAKS: usize = 3;
pub const MIN_CROSSINGS: usize = 4;
/// Denominators below this make a ratio meaningless.
pub const RATIO_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMode {
    /// Least squares through every positive point.
    Raw,
    /// Least squares through the local maxima of `τ^e · P`, which track the
    /// upper envelope when an oscillation rides on the power law.
    Envelope { detrend_exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    /// Two standard errors of the slope.
    pub slope_ci: f64,
    /// `ln 𝔓` of the fitted line.
    pub intercept: f64,
    pub points_used: usize,
    pub excluded_nonpositive: usize,
}

impl PowerLawFit {
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

fn window_points(series: &SeriesResult, window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidGrid(format!("bad window [{lo}, {hi}]")));
    }
    if series.is_empty() || lo < series.tau[0] || hi > series.tau[series.len() - 1] {
        return Err(Error::InvalidGrid(format!("window [{lo}, {hi}] not inside the series grid")));
    }
    Ok(series.tau.iter().zip(&series.prob).filter(|(t, _)| **t >= lo && **t <= hi).map(|(t, p)| (*t, *p)).collect())
}

// Ordinary least squares y = a + b x; returns (a, b, stderr(b)).
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let se = if xs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    (a, b, se)
}

/// Straight line through `(ln τ, ln P)` on `window`.
pub fn fit_powerlaw(series: &SeriesResult, window: (f64, f64), mode: FitMode) -> Result<PowerLawFit> {
    let pts = window_points(series, window)?;
    let excluded = pts.len() - pts.iter().filter(|(_, p)| *p > 0.0).count();
    let mut pts: Vec<(f64, f64)> = pts.into_iter().filter(|(_, p)| *p > 0.0).collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { found: pts.len(), required: MIN_FIT_POINTS });
    }
    if let FitMode::Envelope { detrend_exponent } = mode {
        let y: Vec<f64> = pts.iter().map(|(t, p)| t.powf(detrend_exponent) * p).collect();
        pts =
            (1..pts.len().saturating_sub(1)).filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1]).map(|i| pts[i]).collect();
        if pts.len() < MIN_ENVELOPE_PEAKS {
            return Err(Error::InsufficientPoints { found: pts.len(), required: MIN_ENVELOPE_PEAKS });
        }
    }
    let xs: Vec<f64> = pts.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, p)| p.ln()).collect();
    let (a, b, se) = linear_fit(&xs, &ys);
    Ok(PowerLawFit {
        slope: b,
        slope_ci: 2.0 * se,
        intercept: a,
        points_used: pts.len(),
        excluded_nonpositive: excluded,
    })
}

/// Prefactor with the exponent held fixed: geometric mean of `τ^n · P` over
/// the window. Far less sensitive to slow corrections than a free intercept,
/// which is extrapolated all the way to `ln τ = 0`.
pub fn prefactor_fixed_exponent(series: &SeriesResult, window: (f64, f64), exponent: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = window_points(series, window)?.into_iter().filter(|(_, p)| *p > 0.0).collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { found: pts.len(), required: MIN_FIT_POINTS });
    }
    let mean = pts.iter().map(|(t, p)| exponent * t.ln() + p.ln()).sum::<f64>() / pts.len() as f64;
    Ok(mean.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Two standard errors of the period, from the spread of crossing spacings.
    pub ci: f64,
    pub crossings: usize,
}

// Zero crossings of y(t) by linear interpolation.
fn crossings(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 1..t.len() {
        let (a, b) = (y[i - 1], y[i]);
        if a == 0.0 && i > 1 {
            continue;
        }
        if a == 0.0 {
            out.push(t[i - 1]);
        } else if a * b < 0.0 {
            out.push(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
        }
    }
    out
}

fn spacing_stats(c: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = if d.len() > 1 { d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Period of the oscillation riding on `τ^{−e}`.
///
/// The series is multiplied by `τ^e`; a global linear trend is removed, then a
/// centered running mean one period wide is subtracted (refined from the
/// current period estimate) and zero crossings of the remainder are located.
/// Period = twice the mean crossing spacing.
pub fn extract_period(series: &SeriesResult, detrend_exponent: f64) -> Result<PeriodEstimate> {
    let n = series.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { found: n, required: MIN_FIT_POINTS });
    }
    let t = &series.tau;
    let y: Vec<f64> = t.iter().zip(&series.prob).map(|(t, p)| t.powf(detrend_exponent) * p).collect();
    let (a, b, _) = linear_fit(t, &y);
    let r: Vec<f64> = t.iter().zip(&y).map(|(t, y)| y - a - b * t).collect();
    let mut c = crossings(t, &r);
    if c.len() < MIN_CROSSINGS {
        return Err(Error::NoOscillation { crossings: c.len() });
    }

    for _ in 0..3 {
        let period = 2.0 * spacing_stats(&c).0;
        let half = 0.5 * period;
        // running mean over [t − T/2, t + T/2], interior points only
        let mut nt = Vec::new();
        let mut nr = Vec::new();
        let (mut lo, mut hi) = (0usize, 0usize);
        let mut sum = 0.0;
        for i in 0..n {
            if t[i] - half < t[0] || t[i] + half > t[n - 1] {
                continue;
            }
            while hi < n && t[hi] <= t[i] + half {
                sum += y[hi];
                hi += 1;
            }
            while t[lo] < t[i] - half {
                sum -= y[lo];
                lo += 1;
            }
            nt.push(t[i]);
            nr.push(y[i] - sum / (hi - lo) as f64);
        }
        let nc = crossings(&nt, &nr);
        if nc.len() < MIN_CROSSINGS {
            break;
        }
        c = nc;
    }
    let (mean, sd) = spacing_stats(&c);
    let spacings = (c.len() - 1) as f64;
    Ok(PeriodEstimate { period: 2.0 * mean, ci: 4.0 * sd / spacings.sqrt(), crossings: c.len() })
}

/// `P_p(τ)/P₀(τ/χ)` on `taus`.
pub fn scaling_ratio(
    state: &TwoMassState,
    p: f64,
    chi: f64,
    taus: &[f64],
    cfg: &QuadConfig,
    exec: Execution,
) -> Result<Vec<f64>> {
    if !(chi.is_finite() && chi >= 1.0) {
        return Err(Error::InvalidParameter(format!("scaling factor must be >= 1, got {chi}")));
    }
    par::try_map(exec, taus, |&t| {
        let num = amplitude::prob_two(state, p, t, cfg)?;
        let den = if p == 0.0 && chi == 1.0 { num } else { amplitude::prob_two(state, 0.0, t / chi, cfg)? };
        if den.is_nan() || den.abs() < RATIO_GUARD {
            return Err(Error::DivisionGuard { tau: t, value: den });
        }
        Ok(num / den)
    })
}

/// `τ^e · P` per point.
pub fn detrended(series: &SeriesResult, exponent: f64) -> Vec<f64> {
    series.tau.iter().zip(&series.prob).map(|(t, p)| t.powf(exponent) * p).collect()
}

/// Upper envelope of `values`: linear interpolation through local maxima,
/// NaN outside the first and last maximum.
pub fn upper_envelope(tau: &[f64], values: &[f64]) -> Vec<f64> {
    let peaks: Vec<usize> = (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect();
    tau.iter()
        .map(|&t| {
            let k = peaks.partition_point(|&i| tau[i] <= t);
            if k == 0 || peaks.is_empty() {
                return f64::NAN;
            }
            let i = peaks[k - 1];
            if tau[i] == t {
                return values[i];
            }
            match peaks.get(k) {
                Some(&j) => values[i] + (values[j] - values[i]) * (t - tau[i]) / (tau[j] - tau[i]),
                None => f64::NAN,
            }
        })
        .collect()
}

/// Series CSV with `detrended` and `envelope` columns appended.
pub fn join_csv(series: &SeriesResult, exponent: f64) -> String {
    let d = detrended(series, exponent);
    let env = upper_envelope(&series.tau, &d);
    let mut s = SERIES_COLUMNS.join(",");
    s.push_str(",detrended,envelope\n");
    for i in 0..series.len() {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            series.tau[i], series.amp[i].re, series.amp[i].im, series.prob[i], d[i], env[i]
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One measured quantity against its expectation and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub deviation: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl Check {
    /// Passes when `|measured − expected| <= threshold`.
    pub fn absolute(name: impl Into<String>, measured: f64, expected: f64, threshold: f64) -> Self {
        let deviation = (measured - expected).abs();
        Self::judged(name, measured, expected, deviation, threshold)
    }

    /// Passes when `|measured/expected − 1| <= threshold`.
    pub fn relative(name: impl Into<String>, measured: f64, expected: f64, threshold: f64) -> Self {
        let deviation = (measured / expected - 1.0).abs();
        Self::judged(name, measured, expected, deviation, threshold)
    }

    fn judged(name: impl Into<String>, measured: f64, expected: f64, deviation: f64, threshold: f64) -> Self {
        let verdict = if !deviation.is_finite() {
            Verdict::Inconclusive
        } else if deviation <= threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self { name: name.into(), measured, expected, deviation, threshold, verdict, note: String::new() }
    }

    pub fn inconclusive(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            expected: f64::NAN,
            deviation: f64::NAN,
            threshold: f64::NAN,
            verdict: Verdict::Inconclusive,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitReport {
    pub fitted_slope: Option<f64>,
    pub slope_ci: Option<f64>,
    pub fitted_period: Option<f64>,
    pub period_ci: Option<f64>,
    pub scaling_ratio_series: Vec<f64>,
    pub checks: Vec<Check>,
}

impl FitReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }

    pub fn report(&self) -> KvBlock {
        let mut b = KvBlock::new();
        let opt = |b: &mut KvBlock, k: &str, v: Option<f64>| {
            if let Some(v) = v {
                b.real(k, v);
            }
        };
        opt(&mut b, "fitted_slope", self.fitted_slope);
        opt(&mut b, "slope_ci", self.slope_ci);
        opt(&mut b, "fitted_period", self.fitted_period);
        opt(&mut b, "period_ci", self.period_ci);
        if !self.scaling_ratio_series.is_empty() {
            let dev = self.scaling_ratio_series.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
            b.push("scaling_ratio_points", self.scaling_ratio_series.len());
            b.real("scaling_ratio_max_deviation", dev);
        }
        for c in &self.checks {
            let k = &c.name;
            b.push(format!("{k}.verdict"), c.verdict)
                .real(format!("{k}.measured"), c.measured)
                .real(format!("{k}.expected"), c.expected)
                .real(format!("{k}.deviation"), c.deviation)
                .real(format!("{k}.threshold"), c.threshold);
            if !c.note.is_empty() {
                b.push(format!("{k}.note"), &c.note);
            }
        }
        b.push("overall", if self.passed() { Verdict::Pass } else { Verdict::Fail });
        b
    }
}
