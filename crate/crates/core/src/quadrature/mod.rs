//! Oscillatory integrals `∫_{ξ₀}^{ξ_max} Ω(ξ) e^{−iη(ξ)τ} dξ`, `η = √(ρ² + ξ²)`.
//!
//! The support is split at `ξ₀ + 1`. For non-integer `α` the endpoint piece is
//! integrated in `s` with `ξ = ξ₀ + d·s^m`, which turns the `(ξ − ξ₀)^α`
//! branch point into a smooth power of `s`. Initial panels are capped at a few
//! oscillation wavelengths so the adaptive loop starts from a resolved grid.

mod gk;
mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mdd::MddSpec;

pub use oracle::{oracle_integrate, simpson, MIN_ORACLE_PANELS};

/// Exponent of the endpoint substitution `ξ = ξ₀ + d·s^m` for non-integer α.
const ENDPOINT_POWER: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMode {
    Adaptive,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel budget of the adaptive integrator.
    pub max_subdivisions: usize,
    /// A density tail below this fraction of its peak is truncated.
    pub tail_threshold: f64,
    pub mode: QuadMode,
    /// Simpson subintervals for [`QuadMode::Oracle`].
    pub oracle_panels: usize,
    /// Oscillation wavelengths allowed per initial panel.
    pub oscillations_per_panel: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 65_536,
            tail_threshold: 1e-16,
            mode: QuadMode::Adaptive,
            oracle_panels: 1 << 16,
            oscillations_per_panel: 4.0,
        }
    }
}

impl QuadConfig {
    pub fn oracle() -> Self {
        Self { mode: QuadMode::Oracle, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.rel_tol) || !pos(self.abs_tol) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::InvalidConfig(format!("max_subdivisions must be >= 16, got {}", self.max_subdivisions)));
        }
        if !(pos(self.tail_threshold) && self.tail_threshold < 1.0) {
            return Err(Error::InvalidConfig("tail_threshold must lie in (0, 1)".into()));
        }
        if self.oracle_panels < MIN_ORACLE_PANELS || !self.oracle_panels.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!("oracle_panels must be even and >= {MIN_ORACLE_PANELS}")));
        }
        if !pos(self.oscillations_per_panel) {
            return Err(Error::InvalidConfig("oscillations_per_panel must be positive".into()));
        }
        Ok(())
    }
}

/// `Ω(ξ) e^{−iη(ξ)τ}` for one density at reduced momentum `ρ` and time `τ`.
#[derive(Debug, Clone, Copy)]
pub struct OscIntegrand<'a> {
    mdd: &'a MddSpec,
    rho: f64,
    tau: f64,
    conjugate: bool,
}

impl<'a> OscIntegrand<'a> {
    pub fn new(mdd: &'a MddSpec, rho: f64, tau: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be >= 0, got {rho}")));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
        }
        Ok(Self { mdd, rho, tau, conjugate: false })
    }

    /// Same integrand with the kernel `e^{+iητ}`.
    pub fn conjugated(self) -> Self {
        Self { conjugate: !self.conjugate, ..self }
    }

    pub fn mdd(&self) -> &'a MddSpec {
        self.mdd
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kernel(&self, xi: f64) -> Complex64 {
        let phase = self.rho.hypot(xi) * self.tau;
        let (s, c) = phase.sin_cos();
        if self.conjugate {
            Complex64::new(c, s)
        } else {
            Complex64::new(c, -s)
        }
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        self.kernel(xi) * self.mdd.omega(xi)
    }
}

/// Integral value with its error estimate and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

pub fn integrate(ig: &OscIntegrand<'_>, cfg: &QuadConfig) -> Result<Complex64> {
    integrate_with_error(ig, cfg).map(|e| e.value)
}

/// Dispatches on `cfg.mode`. A run that exhausts the panel budget returns
/// [`Error::ToleranceNotMet`] carrying its best estimate.
pub fn integrate_with_error(ig: &OscIntegrand<'_>, cfg: &QuadConfig) -> Result<Estimate> {
    cfg.validate()?;
    match cfg.mode {
        QuadMode::Oracle => oracle_integrate(ig, cfg.oracle_panels),
        QuadMode::Adaptive => {
            let out = run_adaptive(ig.mdd, cfg, ig.rho, ig.tau, &|xi| ig.kernel(xi));
            if out.converged {
                Ok(Estimate { value: out.value, error: out.error, panels: out.panels, evaluations: out.evaluations })
            } else {
                Err(Error::ToleranceNotMet { estimate: out.value, error: out.error, target: out.target })
            }
        }
    }
}

/// `∫ Ω(ξ) k(ξ) dξ` for a smooth, non-oscillating real kernel.
pub(crate) fn integrate_weighted(mdd: &MddSpec, cfg: &QuadConfig, k: impl Fn(f64) -> f64) -> Result<f64> {
    cfg.validate()?;
    let kernel = |xi: f64| Complex64::new(k(xi), 0.0);
    let out = run_adaptive(mdd, cfg, 0.0, 0.0, &kernel);
    if out.converged {
        Ok(out.value.re)
    } else {
        Err(Error::ToleranceNotMet { estimate: out.value, error: out.error, target: out.target })
    }
}

fn run_adaptive(mdd: &MddSpec, cfg: &QuadConfig, rho: f64, tau: f64, kernel: &dyn Fn(f64) -> Complex64) -> gk::Outcome {
    let xi0 = mdd.xi0();
    let xi_max = mdd.xi_max();
    let split = (xi0 + 1.0).min(xi_max);
    let d = split - xi0;
    let m = if mdd.alpha().fract() == 0.0 { 1 } else { ENDPOINT_POWER };
    let knots: Vec<f64> = mdd.regular().breakpoints();

    let budget = cfg.max_subdivisions / 2;
    let cond = 1.0 + tau * rho.hypot(xi_max);
    let near = panel_grid(xi0, split, rho, tau, cfg.oscillations_per_panel, &knots, budget);
    let near_s: Vec<f64> = near.iter().map(|&xi| ((xi - xi0) / d).max(0.0).powf(1.0 / m as f64).min(1.0)).collect();
    let endpoint = gk::Segment {
        f: Box::new(move |s: f64| {
            let sm1 = s.powi(m - 1);
            let u = d * sm1 * s;
            kernel(xi0 + u) * (mdd.omega_offset(u) * d * m as f64 * sm1)
        }),
        breaks: near_s,
        cond,
    };
    let mut segments = vec![endpoint];
    if xi_max > split {
        let far = panel_grid(split, xi_max, rho, tau, cfg.oscillations_per_panel, &knots, budget);
        segments.push(gk::Segment {
            f: Box::new(move |xi: f64| kernel(xi) * mdd.omega_offset(xi - xi0)),
            breaks: far,
            cond,
        });
    }
    gk::adaptive(&segments, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions)
}

// Uniform initial panels on [a, b] no wider than `c` local wavelengths of
// `e^{−iητ}`, plus any knots of the regular part that fall inside.
fn panel_grid(a: f64, b: f64, rho: f64, tau: f64, c: f64, knots: &[f64], budget: usize) -> Vec<f64> {
    // dη/dξ = ξ/η grows with ξ, so the right end has the shortest wavelength.
    let slope = b / rho.hypot(b);
    let n = ((tau * slope * (b - a)) / (2.0 * PI * c)).ceil().clamp(1.0, budget.max(1) as f64) as usize;
    let mut grid: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    grid[n] = b;
    grid.extend(knots.iter().copied().filter(|&k| k > a && k < b));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdd::{make_toy_mdd, ToyMddParams};
    use approx::assert_relative_eq;

    fn toy(alpha: f64, xi0: f64) -> MddSpec {
        make_toy_mdd(ToyMddParams { alpha, xi0 }).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn golden_amplitudes() {
        let cfg = QuadConfig::default();
        let cases = [
            (toy(0.0, 1.0), 0.0, 1.0, Complex64::new(0.187_637_310_945_417, -0.933_946_554_200_236)),
            (toy(0.0, 1.0), 0.0, 40.0, Complex64::new(-0.038_141_080_402_465_1, 0.032_451_286_383_508_4)),
            (toy(2.0, 2.0), 2.0, 10.0, Complex64::new(0.137_474_007_652_041, -0.015_166_641_089_349_9)),
        ];
        for (s, rho, tau, want) in cases {
            let got = integrate(&OscIntegrand::new(&s, rho, tau).unwrap(), &cfg).unwrap();
            assert!(close(got, want, 1e-10), "rho={rho} tau={tau}: {got} vs {want}");
        }
    }

    #[test]
    fn unit_mass_at_tau_zero() {
        let cfg = QuadConfig::default();
        for s in [toy(0.0, 1.0), toy(1.0, 1.0), toy(2.0, 2.0), toy(0.5, 1.5), toy(1.37, 0.4)] {
            let v = integrate(&OscIntegrand::new(&s, 0.0, 0.0).unwrap(), &cfg).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-10);
            assert!(v.im.abs() < 1e-14);
        }
    }

    #[test]
    fn fractional_alpha_normalization_uses_substitution() {
        // Toy weight is exact, so unit mass checks the endpoint branch point.
        let cfg = QuadConfig::default();
        for &alpha in &[0.1, 0.5, 1.5, 2.25, 3.7] {
            let s = toy(alpha, 1.0);
            let v = integrate(&OscIntegrand::new(&s, 1.0, 0.0).unwrap(), &cfg).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let cfg = QuadConfig::default();
        let s = toy(1.0, 1.0);
        for &tau in &[0.5, 3.0, 17.0] {
            let ig = OscIntegrand::new(&s, 1.0, tau).unwrap();
            let a = integrate(&ig, &cfg).unwrap();
            let b = integrate(&ig.conjugated(), &cfg).unwrap();
            assert!(close(a, b.conj(), 1e-12));
        }
    }

    #[test]
    fn oracle_agrees_with_adaptive() {
        let s = toy(2.0, 2.0);
        let ig = OscIntegrand::new(&s, 2.0, 10.0).unwrap();
        let a = integrate(&ig, &QuadConfig::default()).unwrap();
        let o = integrate(&ig, &QuadConfig::oracle()).unwrap();
        assert!(close(a, o, 1e-10), "{a} vs {o}");
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let s = toy(2.0, 2.0);
        let ig = OscIntegrand::new(&s, 2.0, 10.0).unwrap();
        let s1 = simpson(&ig, 1024);
        let s2 = simpson(&ig, 2048);
        let s4 = simpson(&ig, 4096);
        let ratio = (s2 - s1).norm() / (s4 - s2).norm();
        assert!(ratio > 15.0 && ratio < 17.0, "ratio {ratio}");
    }

    #[test]
    fn large_tau_stays_within_budget() {
        let cfg = QuadConfig::default();
        let s = toy(1.0, 1.0);
        let est = integrate_with_error(&OscIntegrand::new(&s, 2.0, 1000.0).unwrap(), &cfg).unwrap();
        assert!(est.panels < cfg.max_subdivisions);
        // leading asymptote: |A| ≈ c₀ (χ/τ)², c₀ = 4, χ = √5
        let lead = 4.0 * 5.0 / 1e6;
        assert!((est.value.norm() / lead - 1.0).abs() < 0.05);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let cfg = QuadConfig { rel_tol: 1e-15, abs_tol: 1e-300, max_subdivisions: 16, ..QuadConfig::default() };
        let s = toy(0.5, 1.0);
        let err = integrate(&OscIntegrand::new(&s, 0.0, 200.0).unwrap(), &cfg).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }), "{err:?}");
    }

    #[test]
    fn invalid_inputs() {
        let s = toy(0.0, 1.0);
        assert!(OscIntegrand::new(&s, -1.0, 1.0).is_err());
        assert!(OscIntegrand::new(&s, 0.0, f64::NAN).is_err());
        assert!(OscIntegrand::new(&s, 0.0, -1.0).is_err());
        let bad = QuadConfig { oracle_panels: 100, ..QuadConfig::default() };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad = QuadConfig { rel_tol: 0.0, ..QuadConfig::default() };
        assert!(bad.validate().is_err());
    }
}
