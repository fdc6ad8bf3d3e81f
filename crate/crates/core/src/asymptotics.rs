//! Closed-form short- and long-time laws.
//!
//! Long-time behaviour of one density with endpoint constant `c₀` and exponent
//! `α`, at momentum `p`:
//!
//! ```text
//! A_p(τ) ≈ c₀ e^{−i((π/2)(1+α) + E t)} (χ/τ)^{1+α},   χ = √(1 + p²/μ₀²),
//! ```
//!
//! valid for `t ≫ 1/m_s`. The two-mass probability keeps both direct power
//! laws and the interference term
//! `2 w₁w₂ c₀₁c₀₂ χ₁^{1+α₁} χ₂^{1+α₂} τ^{−(2+α₁+α₂)} cos((π/2)(α₂−α₁) + ϖ t)`,
//! `ϖ = μ₂χ₂ − μ₁χ₁`; the regime only records which term dominates.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::amplitude::{SeriesResult, TwoMassState, SERIES_COLUMNS};
use crate::error::{Error, Result};
use crate::mdd::{self, MddSpec, MomentOrder};
use crate::quadrature::QuadConfig;
use crate::report::KvBlock;

/// Relative tolerance under which two exponents or two lower bounds count as
/// equal when classifying the regime.
pub const EQUALITY_TOL: f64 = 1e-12;

pub fn chi_factor(mu0: f64, p: f64) -> Result<f64> {
    if !(mu0.is_finite() && mu0 > 0.0) {
        return Err(Error::InvalidParameter(format!("mu0 must be > 0, got {mu0}")));
    }
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::InvalidParameter(format!("momentum must be >= 0, got {p}")));
    }
    Ok((p / mu0).hypot(1.0))
}

/// `ϖ_p = √(μ₂² + p²) − √(μ₁² + p²)`, written without cancellation.
pub fn varpi(mu1: f64, mu2: f64, p: f64) -> f64 {
    (mu2 - mu1) * (mu2 + mu1) / (mu1.hypot(p) + mu2.hypot(p))
}

/// `2π/|ϖ|`, infinite when the frequency vanishes.
pub fn period_from_varpi(varpi: f64) -> f64 {
    if varpi == 0.0 {
        f64::INFINITY
    } else {
        2.0 * PI / varpi.abs()
    }
}

/// `T_p/T₀ = (μ₁χ_{p,1} + μ₂χ_{p,2}) / (μ₁ + μ₂)`, the μ-weighted mean of the
/// scaling factors.
pub fn period_ratio_rest(mu: [f64; 2], p: f64) -> Result<f64> {
    let chi = [chi_factor(mu[0], p)?, chi_factor(mu[1], p)?];
    Ok((mu[0] * chi[0] + mu[1] * chi[1]) / (mu[0] + mu[1]))
}

/// `T_p/T_{p′} = Σⱼ μⱼχ_{p,j} / Σⱼ μⱼχ_{p′,j}`.
pub fn period_ratio(mu: [f64; 2], p: f64, p_prime: f64) -> Result<f64> {
    Ok(period_ratio_rest(mu, p)? / period_ratio_rest(mu, p_prime)?)
}

/// Short-time coefficients of one density: `A ≈ 1 − i a₀τ − a₁τ² + i a₂τ³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ACoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl ACoeffs {
    pub fn compute(mdd: &MddSpec, p: f64, cfg: &QuadConfig) -> Result<Self> {
        Ok(Self {
            a0: mdd::moment(mdd, p, MomentOrder::Half, cfg)?,
            a1: 0.5 * mdd::moment(mdd, p, MomentOrder::One, cfg)?,
            a2: mdd::moment(mdd, p, MomentOrder::ThreeHalves, cfg)? / 6.0,
        })
    }

    /// `π₀ = 2a₁ − a₀²`, the energy variance.
    pub fn pi0(&self) -> f64 {
        2.0 * self.a1 - self.a0 * self.a0
    }

    pub fn amplitude(&self, tau: f64) -> Complex64 {
        Complex64::new(1.0 - self.a1 * tau * tau, -self.a0 * tau + self.a2 * tau.powi(3))
    }
}

/// Short-time law of a two-mass state: `P ≈ 1 − π̄₀ t²`, `π̄₀ = 2ā₁ − ā₀²`.
///
/// Coefficients are in units of `m_s^k` of each component; the weighted means
/// are taken in physical units so that differing scale masses still combine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortTime {
    pub momentum: f64,
    pub a_bar0: f64,
    pub a_bar1: f64,
    pub pi_bar0: f64,
    pub coeffs: [ACoeffs; 2],
    scale_mass: [f64; 2],
    weights: [f64; 2],
}

impl ShortTime {
    pub fn probability(&self, t: f64) -> f64 {
        1.0 - self.pi_bar0 * t * t
    }

    /// Cubic amplitude `Σⱼ wⱼ (1 − i a₀τⱼ − a₁τⱼ² + i a₂τⱼ³)`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        (0..2).map(|j| self.coeffs[j].amplitude(self.scale_mass[j] * t) * self.weights[j]).sum()
    }

    pub fn report(&self) -> KvBlock {
        let mut b = KvBlock::new();
        b.real("p", self.momentum)
            .real("a_bar0", self.a_bar0)
            .real("a_bar1", self.a_bar1)
            .real("pi_bar0", self.pi_bar0);
        for (j, c) in self.coeffs.iter().enumerate() {
            b.real(format!("a0_{}", j + 1), c.a0)
                .real(format!("a1_{}", j + 1), c.a1)
                .real(format!("a2_{}", j + 1), c.a2);
        }
        b
    }
}

pub fn short_time(state: &TwoMassState, p: f64, cfg: &QuadConfig) -> Result<ShortTime> {
    let w = state.weights();
    let ms = [state.mdd(0).scale_mass(), state.mdd(1).scale_mass()];
    let coeffs = [ACoeffs::compute(state.mdd(0), p, cfg)?, ACoeffs::compute(state.mdd(1), p, cfg)?];
    let a_bar0 = w[0] * ms[0] * coeffs[0].a0 + w[1] * ms[1] * coeffs[1].a0;
    let a_bar1 = w[0] * ms[0].powi(2) * coeffs[0].a1 + w[1] * ms[1].powi(2) * coeffs[1].a1;
    Ok(ShortTime {
        momentum: p,
        a_bar0,
        a_bar1,
        pi_bar0: 2.0 * a_bar1 - a_bar0 * a_bar0,
        coeffs,
        scale_mass: ms,
        weights: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `α₁ < α₂`: power law `τ^{−2(1+α₁)}` of the lighter-exponent component.
    PowerLawDistinctAlpha,
    /// `α₁ = α₂`, `μ₁ = μ₂`: the components decay coherently, no oscillation.
    PowerLawEqualAlphaEqualBound,
    /// `α₁ = α₂`, `μ₁ ≠ μ₂`: power law modulated by oscillations at `|ϖ|`.
    DampedOscillation,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PowerLawDistinctAlpha => "power-law-distinct-alpha",
            Regime::PowerLawEqualAlphaEqualBound => "power-law-equal-alpha-equal-bound",
            Regime::DampedOscillation => "damped-oscillation",
        })
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQUALITY_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn classify(alpha: [f64; 2], mu0: [f64; 2]) -> Regime {
    if !nearly_equal(alpha[0], alpha[1]) {
        Regime::PowerLawDistinctAlpha
    } else if nearly_equal(mu0[0], mu0[1]) {
        Regime::PowerLawEqualAlphaEqualBound
    } else {
        Regime::DampedOscillation
    }
}

/// Long-time model of a two-mass state at one momentum.
///
/// All per-component arrays are in internal order (`α₁ ≤ α₂`);
/// `permutation[i]` is the user-facing index of internal component `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticModel {
    pub momentum: f64,
    pub regime: Regime,
    pub permutation: [usize; 2],
    pub weights: [f64; 2],
    pub alpha: [f64; 2],
    pub mu0: [f64; 2],
    pub scale_mass: [f64; 2],
    pub c0: [f64; 2],
    pub chi: [f64; 2],
    /// Dominant power-law prefactor for the regime.
    pub p_pl: f64,
    /// `w₁w₂c₀₁c₀₂ χ₁^{1+α₁} χ₂^{1+α₂}`.
    pub p_osc: f64,
    pub varpi: f64,
    pub period: f64,
    pub pl_exponent: f64,
    pub osc_exponent: f64,
    pub phase_offset: f64,
}

pub fn long_time(state: &TwoMassState, p: f64) -> Result<AsymptoticModel> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::InvalidParameter(format!("momentum must be >= 0, got {p}")));
    }
    let w = state.weights();
    let perm = if state.mdd(0).alpha() > state.mdd(1).alpha() { [1, 0] } else { [0, 1] };
    let m = [state.mdd(perm[0]), state.mdd(perm[1])];
    let weights = [w[perm[0]], w[perm[1]]];
    let alpha = [m[0].alpha(), m[1].alpha()];
    let mu0 = [m[0].mu0(), m[1].mu0()];
    let c0 = [mdd::endpoint_constant(m[0]), mdd::endpoint_constant(m[1])];
    let chi = [chi_factor(mu0[0], p)?, chi_factor(mu0[1], p)?];
    let regime = classify(alpha, mu0);

    let direct = |j: usize| (weights[j] * c0[j]).powi(2) * chi[j].powf(2.0 * (1.0 + alpha[j]));
    let p_pl = match regime {
        Regime::PowerLawDistinctAlpha => direct(0),
        Regime::DampedOscillation => direct(0) + direct(1),
        Regime::PowerLawEqualAlphaEqualBound => {
            (weights[0] * c0[0] + weights[1] * c0[1]).powi(2) * chi[0].powf(2.0 * (1.0 + alpha[0]))
        }
    };
    let p_osc = weights[0] * weights[1] * c0[0] * c0[1] * chi[0].powf(1.0 + alpha[0]) * chi[1].powf(1.0 + alpha[1]);
    let varpi = varpi(mu0[0], mu0[1], p);
    Ok(AsymptoticModel {
        momentum: p,
        regime,
        permutation: perm,
        weights,
        alpha,
        mu0,
        scale_mass: [m[0].scale_mass(), m[1].scale_mass()],
        c0,
        chi,
        p_pl,
        p_osc,
        varpi,
        period: period_from_varpi(varpi),
        pl_exponent: 2.0 * (1.0 + alpha[0]),
        osc_exponent: 2.0 + alpha[0] + alpha[1],
        phase_offset: FRAC_PI_2 * (alpha[1] - alpha[0]),
    })
}

impl AsymptoticModel {
    fn tau(&self, j: usize, t: f64) -> f64 {
        self.scale_mass[j] * t
    }

    fn direct_term(&self, j: usize, t: f64) -> f64 {
        let e = 1.0 + self.alpha[j];
        (self.weights[j] * self.c0[j]).powi(2) * (self.chi[j] / self.tau(j, t)).powf(2.0 * e)
    }

    fn cross_amplitude(&self, t: f64) -> f64 {
        2.0 * self.p_osc * self.tau(0, t).powf(-(1.0 + self.alpha[0])) * self.tau(1, t).powf(-(1.0 + self.alpha[1]))
    }

    /// Both direct power-law terms.
    pub fn pl(&self, t: f64) -> f64 {
        self.direct_term(0, t) + self.direct_term(1, t)
    }

    /// Interference term.
    pub fn osc(&self, t: f64) -> f64 {
        self.cross_amplitude(t) * (self.phase_offset + self.varpi * t).cos()
    }

    pub fn total(&self, t: f64) -> f64 {
        self.pl(t) + self.osc(t)
    }

    /// Lower and upper envelope of [`total`](Self::total) over one oscillation.
    pub fn envelope(&self, t: f64) -> (f64, f64) {
        let (pl, amp) = (self.pl(t), self.cross_amplitude(t).abs());
        (pl - amp, pl + amp)
    }

    /// Dominant term alone: `p_pl · τ^{−pl_exponent}`.
    pub fn dominant(&self, t: f64) -> f64 {
        self.p_pl * self.tau(0, t).powf(-self.pl_exponent)
    }

    /// User-facing index of the component with the smaller exponent.
    pub fn dominant_index(&self) -> usize {
        self.permutation[0]
    }

    pub fn report(&self) -> KvBlock {
        let mut b = KvBlock::new();
        b.real("p", self.momentum).push("regime", self.regime);
        // per-component entries use the caller's labels
        for i in 0..2 {
            let u = self.permutation[i] + 1;
            b.real(format!("alpha_{u}"), self.alpha[i])
                .real(format!("mu0_{u}"), self.mu0[i])
                .real(format!("weight_{u}"), self.weights[i])
                .real(format!("c0_{u}"), self.c0[i])
                .real(format!("chi_{u}"), self.chi[i]);
        }
        b.push("dominant_component", self.dominant_index() + 1)
            .real("p_pl", self.p_pl)
            .real("p_osc", self.p_osc)
            .real("pl_exponent", self.pl_exponent)
            .real("osc_exponent", self.osc_exponent)
            .real("phase_offset", self.phase_offset)
            .real("varpi", self.varpi)
            .real("frequency", self.varpi.abs())
            .real("period", self.period);
        if let Ok(r) = period_ratio_rest(self.mu0, self.momentum) {
            b.real("period_ratio_rest", r);
        }
        b
    }
}

pub const ASYMPTOTE_COLUMNS: [&str; 3] = ["asym_pl", "asym_osc", "asym_total"];

/// Series CSV with the predictor columns appended. Rows with `τ = 0` carry
/// non-finite predictor values by construction.
pub fn join_csv(series: &SeriesResult, model: &AsymptoticModel) -> String {
    let mut s = SERIES_COLUMNS.join(",");
    s.push(',');
    s.push_str(&ASYMPTOTE_COLUMNS.join(","));
    s.push('\n');
    for i in 0..series.len() {
        let t = series.tau[i];
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t,
            series.amp[i].re,
            series.amp[i].im,
            series.prob[i],
            model.pl(t),
            model.osc(t),
            model.total(t)
        );
    }
    s
}

/// Ultrarelativistic approximations, `χⱼ ≈ p/μⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UltraFactors {
    pub momentum: f64,
    pub chi: [f64; 2],
    pub p_pl: f64,
    pub p_osc: f64,
    /// `ϖ ≈ (μ₂² − μ₁²)/(2p)`.
    pub varpi: f64,
    pub period: f64,
    /// `T_p/T₀ ≈ 2p/(μ₁ + μ₂)`.
    pub period_ratio_rest: f64,
}

impl UltraFactors {
    pub fn report(&self) -> KvBlock {
        let mut b = KvBlock::new();
        b.real("p", self.momentum)
            .real("chi_1", self.chi[0])
            .real("chi_2", self.chi[1])
            .real("p_pl", self.p_pl)
            .real("p_osc", self.p_osc)
            .real("varpi", self.varpi)
            .real("period", self.period)
            .real("period_ratio_rest", self.period_ratio_rest);
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Limits {
    /// The model in the rest frame (`p = 0`).
    pub nonrelativistic: AsymptoticModel,
    /// Present for `p > 0`; arrays in the same internal order as the model.
    pub ultrarelativistic: Option<UltraFactors>,
}

pub fn limits(state: &TwoMassState, p: f64) -> Result<Limits> {
    let rest = long_time(state, 0.0)?;
    let at_p = long_time(state, p)?;
    let ultra = (p > 0.0).then(|| {
        let m = &at_p;
        let chi = [p / m.mu0[0], p / m.mu0[1]];
        let direct = |j: usize| (m.weights[j] * m.c0[j]).powi(2) * chi[j].powf(2.0 * (1.0 + m.alpha[j]));
        let p_pl = match m.regime {
            Regime::PowerLawDistinctAlpha => direct(0),
            Regime::DampedOscillation => direct(0) + direct(1),
            Regime::PowerLawEqualAlphaEqualBound => {
                (m.weights[0] * m.c0[0] + m.weights[1] * m.c0[1]).powi(2) * chi[0].powf(2.0 * (1.0 + m.alpha[0]))
            }
        };
        let p_osc = m.weights[0]
            * m.weights[1]
            * m.c0[0]
            * m.c0[1]
            * chi[0].powf(1.0 + m.alpha[0])
            * chi[1].powf(1.0 + m.alpha[1]);
        let varpi = (m.mu0[1] - m.mu0[0]) * (m.mu0[1] + m.mu0[0]) / (2.0 * p);
        UltraFactors {
            momentum: p,
            chi,
            p_pl,
            p_osc,
            varpi,
            period: period_from_varpi(varpi),
            period_ratio_rest: 2.0 * p / (m.mu0[0] + m.mu0[1]),
        }
    });
    Ok(Limits { nonrelativistic: rest, ultrarelativistic: ultra })
}

/// Scaling factors relating frames with momenta `p` and `p′`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationMap {
    /// User-facing index of the component that sets the long-time law.
    pub k: usize,
    pub chi_pk: f64,
    pub chi_pprime_k: f64,
    /// `χ_{p,k}/χ_{p′,k}`.
    pub chi_ratio: f64,
    pub period_ratio_rest: f64,
    pub period_ratio: f64,
}

/// `P_p(t) ≈ P₀(t/χ_{p,k})` at long times, and `P_p(t) ≈ P_{p′}(t χ_{p′,k}/χ_{p,k})`.
/// Undefined when equal exponents with distinct bounds make the state oscillate.
pub fn dilation_map(model: &AsymptoticModel, p: f64, p_prime: f64) -> Result<DilationMap> {
    if model.regime == Regime::DampedOscillation {
        return Err(Error::RegimeMismatch(
            "equal exponents with distinct lower bounds: no single dilation factor".into(),
        ));
    }
    let chi_pk = chi_factor(model.mu0[0], p)?;
    let chi_pprime_k = chi_factor(model.mu0[0], p_prime)?;
    Ok(DilationMap {
        k: model.dominant_index(),
        chi_pk,
        chi_pprime_k,
        chi_ratio: chi_pk / chi_pprime_k,
        period_ratio_rest: period_ratio_rest(model.mu0, p)?,
        period_ratio: period_ratio(model.mu0, p, p_prime)?,
    })
}

/// `c₀ e^{−i((π/2)(1+α) + E t)} (χ/τ)^{1+α}` with `E = √(μ₀² + p²)`, `τ = m_s t`.
pub fn long_time_amplitude(mdd: &MddSpec, p: f64, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("time must be > 0, got {t}")));
    }
    let chi = chi_factor(mdd.mu0(), p)?;
    let e = 1.0 + mdd.alpha();
    let energy = mdd.mu0().hypot(p);
    let modulus = mdd::endpoint_constant(mdd) * (chi / (mdd.scale_mass() * t)).powf(e);
    Ok(Complex64::from_polar(modulus, -(FRAC_PI_2 * e + energy * t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitude::{amp_single, prob_two};
    use crate::mdd::{make_toy_mdd, ToyMddParams};
    use approx::assert_relative_eq;

    fn toy(alpha: f64, xi0: f64) -> MddSpec {
        make_toy_mdd(ToyMddParams { alpha, xi0 }).unwrap()
    }

    fn pair(a: (f64, f64), b: (f64, f64)) -> TwoMassState {
        TwoMassState::new(toy(a.0, a.1), toy(b.0, b.1), 0.5, 0.5).unwrap()
    }

    #[test]
    fn chi_examples() {
        assert_eq!(chi_factor(3.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(chi_factor(1.0, 2.0).unwrap(), 5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(chi_factor(2.0, 2.0).unwrap(), 2f64.sqrt(), max_relative = 1e-15);
        assert!(chi_factor(0.0, 1.0).is_err());
        assert!(chi_factor(-1.0, 1.0).is_err());
    }

    #[test]
    fn short_time_examples() {
        let cfg = QuadConfig::default();
        let s = TwoMassState::degenerate(toy(0.0, 1.0), toy(0.0, 1.0), 1.0).unwrap();
        let st = short_time(&s, 0.0, &cfg).unwrap();
        assert_relative_eq!(st.coeffs[0].a1, 1.0, max_relative = 1e-10);
        assert_relative_eq!(st.pi_bar0, 0.098_535_292_595_117_6, max_relative = 1e-8);
        // identical components reduce to the single-mass value
        let s = pair((0.0, 1.0), (0.0, 1.0));
        assert_relative_eq!(short_time(&s, 0.0, &cfg).unwrap().pi_bar0, st.pi_bar0, max_relative = 1e-12);
    }

    #[test]
    fn short_time_golden_mixtures() {
        let cfg = QuadConfig::default();
        let s = pair((0.0, 1.0), (2.0, 2.0));
        for (p, want) in [(0.0, 0.487_995_281_593_267), (1.0, 0.380_575_435_467_955), (2.0, 0.237_427_405_483_019)] {
            assert_relative_eq!(short_time(&s, p, &cfg).unwrap().pi_bar0, want, max_relative = 1e-9);
        }
        let s = pair((1.0, 1.0), (2.0, 2.0));
        assert_relative_eq!(short_time(&s, 2.0, &cfg).unwrap().pi_bar0, 0.177_763_433_318_582, max_relative = 1e-9);
    }

    #[test]
    fn short_time_amplitude_matches_numerics() {
        let cfg = QuadConfig::default();
        let s = pair((0.0, 1.0), (2.0, 2.0));
        let st = short_time(&s, 1.0, &cfg).unwrap();
        let t = 0.01;
        let num = crate::amplitude::amp_two(&s, 1.0, t, &cfg).unwrap();
        // next term is O(τ⁴)
        assert!((num - st.amplitude(t)).norm() < 1e-7);
    }

    #[test]
    fn fig6_prefactor_is_one() {
        let m = long_time(&pair((0.0, 1.0), (2.0, 2.0)), 0.0).unwrap();
        assert_eq!(m.regime, Regime::PowerLawDistinctAlpha);
        assert_relative_eq!(m.p_pl, 1.0, max_relative = 1e-13);
        assert_eq!(m.pl_exponent, 2.0);
        assert_eq!(m.osc_exponent, 4.0);
        assert_relative_eq!(m.phase_offset, PI, max_relative = 1e-15);
    }

    #[test]
    fn equal_alpha_period_example() {
        let m = long_time(&pair((1.0, 1.0), (1.0, 2.0)), 2.0).unwrap();
        assert_eq!(m.regime, Regime::DampedOscillation);
        assert_relative_eq!(m.varpi, 8f64.sqrt() - 5f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(m.varpi, 0.592_359, epsilon = 1e-6);
        assert_relative_eq!(m.period, 10.6070, epsilon = 1e-4);
        assert_relative_eq!(m.period * m.varpi.abs(), 2.0 * PI, max_relative = 1e-15);
        let m1 = long_time(&pair((1.0, 1.0), (1.0, 2.0)), 1.0).unwrap();
        assert_relative_eq!(m1.period, 7.6451, epsilon = 1e-4);
    }

    #[test]
    fn equal_bound_uses_coherent_prefactor() {
        let s = pair((1.0, 1.5), (1.0, 1.5));
        let m = long_time(&s, 1.0).unwrap();
        assert_eq!(m.regime, Regime::PowerLawEqualAlphaEqualBound);
        let expect = (0.5 * m.c0[0] + 0.5 * m.c0[1]).powi(2) * m.chi[0].powi(4);
        assert_relative_eq!(m.p_pl, expect, max_relative = 1e-14);
        assert!(m.period.is_infinite());
        for t in [10.0, 50.0] {
            assert_relative_eq!(m.total(t), m.dominant(t), max_relative = 1e-12);
        }
    }

    #[test]
    fn relabeling_preserves_user_indices() {
        let a = long_time(&pair((2.0, 2.0), (0.0, 1.0)), 1.0).unwrap();
        let b = long_time(&pair((0.0, 1.0), (2.0, 2.0)), 1.0).unwrap();
        assert_eq!(a.permutation, [1, 0]);
        assert_eq!(a.dominant_index(), 1);
        assert_eq!(b.dominant_index(), 0);
        assert_eq!(a.alpha, b.alpha);
        for t in [5.0, 20.0, 80.0] {
            assert_relative_eq!(a.total(t), b.total(t), max_relative = 1e-14);
        }
        assert_eq!(a.report().get("alpha_2"), b.report().get("alpha_1"));
    }

    #[test]
    fn classifier_covers_all_combinations() {
        use Regime::*;
        let cases = [
            ([0.0, 1.0], [1.0, 2.0], PowerLawDistinctAlpha),
            ([0.0, 1.0], [2.0, 1.0], PowerLawDistinctAlpha),
            ([0.0, 1.0], [1.0, 1.0], PowerLawDistinctAlpha),
            ([1.0, 0.0], [1.0, 2.0], PowerLawDistinctAlpha),
            ([1.0, 0.0], [2.0, 1.0], PowerLawDistinctAlpha),
            ([1.0, 0.0], [1.0, 1.0], PowerLawDistinctAlpha),
            ([1.0, 1.0], [1.0, 2.0], DampedOscillation),
            ([1.0, 1.0], [2.0, 1.0], DampedOscillation),
            ([1.0, 1.0], [1.0, 1.0], PowerLawEqualAlphaEqualBound),
        ];
        for (a, m, r) in cases {
            assert_eq!(classify(a, m), r, "{a:?} {m:?}");
        }
    }

    #[test]
    fn limits_examples() {
        let s = pair((1.0, 1.0), (1.0, 2.0));
        let l = limits(&s, 100.0).unwrap();
        assert_relative_eq!(l.nonrelativistic.period, 2.0 * PI, max_relative = 1e-14);
        assert!(l.nonrelativistic.chi.iter().all(|&c| c == 1.0));
        let u = l.ultrarelativistic.unwrap();
        let chi = chi_factor(1.0, 100.0).unwrap();
        assert!((chi - u.chi[0]).abs() / chi < 1e-4);
        assert!(limits(&s, 0.0).unwrap().ultrarelativistic.is_none());
        let tp = long_time(&s, 100.0).unwrap().period;
        assert!(tp / l.nonrelativistic.period > 50.0);
    }

    #[test]
    fn ultrarelativistic_prefactors_follow_first_order_bound() {
        // χ = (p/μ)√(1 + μ²/p²), so a power χ^n is approximated to relative
        // error ≈ n μ²/(2p²).
        let s = pair((1.0, 1.0), (2.0, 2.0));
        let p = 100.0;
        let exact = long_time(&s, p).unwrap();
        let u = limits(&s, p).unwrap().ultrarelativistic.unwrap();
        let n_pl = 2.0 * (1.0 + exact.alpha[0]);
        let bound = |n: f64, mu: f64| 1.01 * n * mu * mu / (2.0 * p * p);
        assert!((u.p_pl - exact.p_pl).abs() / exact.p_pl <= bound(n_pl, exact.mu0[0]));
        let n_osc = 2.0 + exact.alpha[0] + exact.alpha[1];
        assert!((u.p_osc - exact.p_osc).abs() / exact.p_osc <= bound(n_osc, exact.mu0[1]));
        assert!((u.varpi - exact.varpi).abs() / exact.varpi.abs() <= bound(1.0, exact.mu0[1]));
    }

    #[test]
    fn dilation_examples() {
        let s = pair((0.0, 1.0), (2.0, 2.0));
        let m = long_time(&s, 2.0).unwrap();
        let d = dilation_map(&m, 2.0, 0.0).unwrap();
        assert_eq!(d.k, 0);
        assert_relative_eq!(d.chi_pk, 5f64.sqrt(), max_relative = 1e-15);
        let d0 = dilation_map(&m, 0.0, 0.0).unwrap();
        assert_eq!((d0.chi_ratio, d0.period_ratio_rest, d0.period_ratio), (1.0, 1.0, 1.0));
        let osc = long_time(&pair((1.0, 1.0), (1.0, 2.0)), 2.0).unwrap();
        assert!(matches!(dilation_map(&osc, 2.0, 0.0), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn period_ratio_identity_example() {
        let r = period_ratio_rest([1.0, 2.0], 2.0).unwrap();
        assert_relative_eq!(r, (5f64.sqrt() + 2.0 * 2f64.sqrt()) / 3.0, max_relative = 1e-15);
        assert_relative_eq!(r, 1.688_17, epsilon = 1e-5);
        assert!((r - varpi(1.0, 2.0, 0.0) / varpi(1.0, 2.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn long_time_amplitude_examples() {
        let cfg = QuadConfig::default();
        let m = toy(0.0, 1.0);
        let lt = long_time_amplitude(&m, 0.0, 50.0).unwrap();
        assert_relative_eq!(lt.norm(), 2.0 / 50.0, max_relative = 1e-14);
        let num = amp_single(&m, 0.0, 50.0, &cfg).unwrap();
        assert!((num - lt).norm() / lt.norm() < 0.05);
        assert!(long_time_amplitude(&m, 0.0, 0.0).is_err());

        // phase difference of the two components
        let (a, b) = (toy(1.0, 1.0), toy(2.0, 2.0));
        let t = 13.0;
        let z = long_time_amplitude(&a, 1.5, t).unwrap() * long_time_amplitude(&b, 1.5, t).unwrap().conj();
        let want = FRAC_PI_2 * (2.0 - 1.0) + varpi(1.0, 2.0, 1.5) * t;
        let diff = (z.arg() - want).rem_euclid(2.0 * PI);
        assert!(diff < 1e-12 || 2.0 * PI - diff < 1e-12);
    }

    #[test]
    fn dominance_ordering_at_late_times() {
        let m = long_time(&pair((0.0, 1.0), (2.0, 2.0)), 1.0).unwrap();
        for t in [1e3, 1e4] {
            let d1 = (m.weights[0] * m.c0[0]).powi(2) * (m.chi[0] / t).powf(2.0);
            let d2 = m.pl(t) - d1;
            assert!(d1 > m.osc(t).abs() && d1 > d2);
        }
    }

    #[test]
    fn numerics_follow_predictor_distinct_alpha() {
        let cfg = QuadConfig::default();
        let s = pair((0.0, 1.0), (2.0, 2.0));
        for p in [0.0, 2.0] {
            let m = long_time(&s, p).unwrap();
            for t in [50.0, 75.0, 100.0] {
                let num = prob_two(&s, p, t, &cfg).unwrap();
                assert!((num / m.total(t) - 1.0).abs() < 0.1, "p={p} t={t}");
            }
        }
    }

    #[test]
    fn report_lists_period_and_chi() {
        let m = long_time(&pair((1.0, 1.0), (1.0, 2.0)), 2.0).unwrap();
        let r = m.report();
        assert!((r.get_f64("period").unwrap() - 10.6070).abs() < 1e-4);
        assert_eq!(r.get("regime"), Some("damped-oscillation"));
        let m0 = long_time(&pair((1.0, 1.0), (1.0, 2.0)), 0.0).unwrap().report();
        assert_eq!(m0.get_f64("chi_1"), Some(1.0));
        assert_eq!(m0.get_f64("chi_2"), Some(1.0));
    }
}
