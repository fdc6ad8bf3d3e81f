//! Built-in figure presets: two toy densities with equal weights
//! (`l₁ = l₂ = 1/√2`), one curve per parameter set.

use std::f64::consts::E;

use decaylab::amplitude::TwoMassState;
use decaylab::asymptotics::{dilation_map, long_time};
use decaylab::mdd::{make_toy_mdd, ToyMddParams};
use decaylab::QuadConfig;

use crate::error::{CliError, Result};
use crate::scenario::{GridSpacing, GridSpec, MassSpec, Scenario};

/// Minimum grid points per expected oscillation period.
pub const POINTS_PER_PERIOD: f64 = 40.0;
pub const MIN_POINTS: usize = 401;
/// Quadrature tolerance pinned for every preset.
pub const PRESET_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// `P` against `τ`.
    Linear,
    /// `1 − P` against `τ²`.
    QuadraticAbscissa,
    /// `|ln P|` against `ln τ`.
    LogLog,
    /// `τ^{2+α₁+α₂} P` against `τ`.
    Detrended,
    /// `P_p(τ)/P₀(τ/χ)` against `τ`.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    pub label: char,
    pub alpha: [f64; 2],
    pub xi0: [f64; 2],
    pub p: f64,
}

impl Curve {
    const fn new(label: char, alpha: [f64; 2], xi0: [f64; 2], p: f64) -> Self {
        Self { label, alpha, xi0, p }
    }

    pub fn state(&self) -> Result<TwoMassState> {
        let m = |j: usize| make_toy_mdd(ToyMddParams { alpha: self.alpha[j], xi0: self.xi0[j] });
        Ok(TwoMassState::new(m(0)?, m(1)?, 0.5, 0.5)?)
    }

    /// Oscillation period of the interference term, infinite for equal bounds.
    pub fn period(&self) -> Result<f64> {
        Ok(long_time(&self.state()?, self.p)?.period)
    }

    /// `χ_{p,k}` of the component with the smaller exponent.
    pub fn dilation_factor(&self) -> Result<f64> {
        let m = long_time(&self.state()?, self.p)?;
        Ok(dilation_map(&m, self.p, 0.0)?.chi_pk)
    }

    pub fn detrend_exponent(&self) -> f64 {
        2.0 + self.alpha[0] + self.alpha[1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub fig: u8,
    pub range: (f64, f64),
    pub kind: PlotKind,
    pub curves: Vec<Curve>,
    pub note: Option<&'static str>,
}

const A02: [f64; 2] = [0.0, 2.0];
const A12: [f64; 2] = [1.0, 2.0];
const A11: [f64; 2] = [1.0, 1.0];
const A22: [f64; 2] = [2.0, 2.0];
const X12: [f64; 2] = [1.0, 2.0];
const X11: [f64; 2] = [1.0, 1.0];
const X22: [f64; 2] = [2.0, 2.0];

pub fn preset(fig: u8) -> Result<Preset> {
    use PlotKind::*;
    let c = Curve::new;
    let (range, kind, curves, note) = match fig {
        1 => (
            (0.0, 10.0),
            Linear,
            vec![c('a', A02, X12, 0.0), c('b', A02, X12, 1.0), c('c', A02, X12, 2.0), c('d', A12, X12, 2.0)],
            None,
        ),
        2 => (
            (0.0, 8.0),
            Linear,
            vec![c('a', A12, X11, 0.0), c('b', A12, X11, 1.0), c('c', A12, X22, 0.0), c('d', A12, X22, 2.0)],
            None,
        ),
        3 => (
            (0.0, 2.0),
            QuadraticAbscissa,
            vec![c('a', A12, X12, 2.0), c('b', A02, X12, 2.0), c('c', A02, X12, 1.0), c('d', A02, X12, 0.0)],
            None,
        ),
        4 => (
            (0.0, 2.0),
            QuadraticAbscissa,
            vec![c('a', A12, X22, 2.0), c('b', A12, X22, 0.0), c('c', A12, X11, 1.0), c('d', A12, X11, 0.0)],
            None,
        ),
        5 => (
            (10.0, 40.0),
            Linear,
            vec![c('a', A12, X12, 2.0), c('b', A02, X12, 0.0), c('c', A02, X12, 1.0), c('d', A02, X12, 2.0)],
            None,
        ),
        6 => (
            (E.powi(-1), E.powi(5)),
            LogLog,
            vec![c('a', A02, X12, 2.0), c('b', A02, X12, 1.0), c('c', A02, X12, 0.0), c('d', A12, X12, 2.0)],
            None,
        ),
        7 => (
            (E.powi(-1), E.powi(3)),
            LogLog,
            vec![c('a', A12, X22, 2.0), c('b', A12, X22, 0.0), c('c', A12, X11, 1.0), c('d', A12, X11, 0.0)],
            None,
        ),
        8 => (
            (10.0, 50.0),
            Detrended,
            vec![c('a', A11, X12, 0.0), c('b', A11, X12, 1.0), c('c', A11, X12, 2.0), c('d', A22, X12, 0.0)],
            None,
        ),
        9 => (
            (5.0, 35.0),
            Ratio,
            vec![c('a', A12, X11, 1.0), c('b', A12, X22, 2.0), c('c', A12, X12, 1.0)],
            Some("the published caption lists the third parameter set twice; it is included once"),
        ),
        _ => return Err(CliError::Input(format!("no figure preset {fig}; expected 1..9"))),
    };
    Ok(Preset { fig, range, kind, curves, note })
}

pub fn all_presets() -> Vec<Preset> {
    (1..=9).map(|f| preset(f).expect("presets 1..9 exist")).collect()
}

impl Preset {
    pub fn spacing(&self) -> GridSpacing {
        match self.kind {
            PlotKind::LogLog => GridSpacing::Log,
            _ => GridSpacing::Linear,
        }
    }

    /// Grid with at least [`POINTS_PER_PERIOD`] samples per interference
    /// period of the fastest curve (measured at the late end for log grids).
    pub fn grid(&self) -> Result<GridSpec> {
        let (start, stop) = self.range;
        let mut t_min = f64::INFINITY;
        for c in &self.curves {
            t_min = t_min.min(c.period()?);
        }
        let step = t_min / POINTS_PER_PERIOD;
        let needed = match self.spacing() {
            GridSpacing::Linear => (stop - start) / step,
            GridSpacing::Log => (stop / start).ln() * stop / step,
        };
        let points = if needed.is_finite() { (needed.ceil() as usize + 1).max(MIN_POINTS) } else { MIN_POINTS };
        Ok(GridSpec { start, stop, points, spacing: self.spacing() })
    }

    pub fn scenario(&self, curve: &Curve) -> Result<Scenario> {
        Ok(Scenario {
            name: format!("fig-{}-{}", self.fig, curve.label),
            masses: vec![MassSpec::toy(curve.alpha[0], curve.xi0[0]), MassSpec::toy(curve.alpha[1], curve.xi0[1])],
            weights: Some([0.5, 0.5]),
            momenta: vec![curve.p],
            grid: self.grid()?,
            quad: Some(crate::scenario::QuadOverrides { rel_tol: Some(PRESET_REL_TOL), ..Default::default() }),
            outputs: None,
        })
    }

    pub fn curve(&self, label: char) -> Option<&Curve> {
        self.curves.iter().find(|c| c.label == label)
    }
}

/// Quadrature configuration used for every preset.
pub fn preset_quad() -> QuadConfig {
    QuadConfig { rel_tol: PRESET_REL_TOL, ..QuadConfig::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_resolve_oscillations() {
        for p in all_presets() {
            let g = p.grid().unwrap();
            let v = g.values().unwrap();
            let t_min = p.curves.iter().map(|c| c.period().unwrap()).fold(f64::INFINITY, f64::min);
            let max_step = v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            assert!(
                max_step <= t_min / POINTS_PER_PERIOD * (1.0 + 1e-9)
                    || g.points == MIN_POINTS && max_step <= t_min / 40.0 + 1e-12
                    || t_min.is_infinite(),
                "fig {}: step {max_step} vs period {t_min}",
                p.fig
            );
        }
    }

    #[test]
    fn unknown_figure() {
        assert!(preset(0).is_err());
        assert!(preset(10).is_err());
    }

    #[test]
    fn scenarios_validate() {
        for p in all_presets() {
            for c in &p.curves {
                let s = p.scenario(c).unwrap();
                s.validate().unwrap();
                assert_eq!(s.quad_config().rel_tol, 1e-10);
            }
        }
    }
}
