//! Survival amplitudes of a state that superposes two mass distributions.
//!
//! For one density the amplitude at momentum `p` and time `t` is
//! `A(τ) = ∫ Ω(ξ) e^{−iη(ξ)τ} dξ` with `ρ = p/m_s` and `τ = m_s t`. The two
//! components are taken as orthogonal, so the mixture amplitude is the
//! weighted sum and the probability has two direct terms and one interference
//! term.

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mdd::MddSpec;
use crate::par::{self, Execution};
use crate::quadrature::{self, OscIntegrand, QuadConfig, QuadMode};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Two orthogonal mass components with probabilities `w₁ + w₂ = 1`.
#[derive(Debug, Clone)]
pub struct TwoMassState {
    mdd: [MddSpec; 2],
    weights: [f64; 2],
}

impl TwoMassState {
    /// Both weights must lie strictly inside (0, 1) and sum to one.
    pub fn new(mdd1: MddSpec, mdd2: MddSpec, w1: f64, w2: f64) -> Result<Self> {
        for w in [w1, w2] {
            if !(w.is_finite() && w > 0.0 && w < 1.0) {
                return Err(Error::InvalidParameter(format!("weight {w} outside (0, 1)")));
            }
        }
        if (w1 + w2 - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidParameter(format!("weights sum to {}, not 1", w1 + w2)));
        }
        Ok(Self { mdd: [mdd1, mdd2], weights: [w1, w2] })
    }

    /// From mixing amplitudes `l₁, l₂` with `|l₁|² + |l₂|² = 1`.
    pub fn from_mixing(mdd1: MddSpec, mdd2: MddSpec, l1: f64, l2: f64) -> Result<Self> {
        Self::new(mdd1, mdd2, l1 * l1, l2 * l2)
    }

    /// Allows a vanishing weight, collapsing the state onto one component.
    pub fn degenerate(mdd1: MddSpec, mdd2: MddSpec, w1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) {
            return Err(Error::InvalidParameter(format!("weight {w1} outside [0, 1]")));
        }
        Ok(Self { mdd: [mdd1, mdd2], weights: [w1, 1.0 - w1] })
    }

    pub fn mdd(&self, j: usize) -> &MddSpec {
        &self.mdd[j]
    }

    pub fn mdds(&self) -> &[MddSpec; 2] {
        &self.mdd
    }

    pub fn weights(&self) -> [f64; 2] {
        self.weights
    }

    /// Same state with the components swapped.
    pub fn swapped(&self) -> Self {
        Self { mdd: [self.mdd[1].clone(), self.mdd[0].clone()], weights: [self.weights[1], self.weights[0]] }
    }
}

fn check_pt(p: f64, t: f64) -> Result<()> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::InvalidParameter(format!("momentum must be >= 0, got {p}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Survival amplitude of one component.
pub fn amp_single(mdd: &MddSpec, p: f64, t: f64, cfg: &QuadConfig) -> Result<Complex64> {
    check_pt(p, t)?;
    let ms = mdd.scale_mass();
    quadrature::integrate(&OscIntegrand::new(mdd, p / ms, ms * t)?, cfg)
}

pub fn amp_components(state: &TwoMassState, p: f64, t: f64, cfg: &QuadConfig) -> Result<[Complex64; 2]> {
    Ok([amp_single(&state.mdd[0], p, t, cfg)?, amp_single(&state.mdd[1], p, t, cfg)?])
}

pub fn amp_two(state: &TwoMassState, p: f64, t: f64, cfg: &QuadConfig) -> Result<Complex64> {
    let [a1, a2] = amp_components(state, p, t, cfg)?;
    let [w1, w2] = state.weights;
    Ok(a1 * w1 + a2 * w2)
}

/// `w₁²|A₁|² + w₂²|A₂|² + 2w₁w₂ Re(A₁A₂*)`.
pub fn prob_from_components(weights: [f64; 2], amps: [Complex64; 2]) -> f64 {
    let [w1, w2] = weights;
    let [a1, a2] = amps;
    w1 * w1 * a1.norm_sqr() + w2 * w2 * a2.norm_sqr() + 2.0 * w1 * w2 * (a1 * a2.conj()).re
}

pub fn prob_two(state: &TwoMassState, p: f64, t: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(prob_from_components(state.weights, amp_components(state, p, t, cfg)?))
}

/// How a series was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub momentum: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub mode: QuadMode,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub tau: Vec<f64>,
    pub amp: Vec<Complex64>,
    pub components: Vec<[Complex64; 2]>,
    pub prob: Vec<f64>,
    pub provenance: Provenance,
}

pub const SERIES_COLUMNS: [&str; 4] = ["tau", "re_amp", "im_amp", "prob"];

impl SeriesResult {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = SERIES_COLUMNS.join(",");
        s.push('\n');
        for i in 0..self.len() {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.tau[i], self.amp[i].re, self.amp[i].im, self.prob[i]
            );
        }
        s
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Amplitude and probability on a time grid, evaluated point by point.
pub fn series(state: &TwoMassState, p: f64, taus: &[f64], cfg: &QuadConfig, exec: Execution) -> Result<SeriesResult> {
    cfg.validate()?;
    let comps = par::try_map(exec, taus, |&t| amp_components(state, p, t, cfg))?;
    let [w1, w2] = state.weights;
    Ok(SeriesResult {
        tau: taus.to_vec(),
        amp: comps.iter().map(|c| c[0] * w1 + c[1] * w2).collect(),
        prob: comps.iter().map(|&c| prob_from_components(state.weights, c)).collect(),
        components: comps,
        provenance: Provenance {
            momentum: p,
            rel_tol: cfg.rel_tol,
            abs_tol: cfg.abs_tol,
            mode: cfg.mode,
            execution: exec,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdd::{make_toy_mdd, ToyMddParams};
    use approx::assert_relative_eq;

    fn toy(alpha: f64, xi0: f64) -> MddSpec {
        make_toy_mdd(ToyMddParams { alpha, xi0 }).unwrap()
    }

    fn fig1() -> TwoMassState {
        TwoMassState::new(toy(0.0, 1.0), toy(2.0, 2.0), 0.5, 0.5).unwrap()
    }

    #[test]
    fn golden_two_mass_values() {
        let cfg = QuadConfig::default();
        let s = fig1();
        let a = amp_two(&s, 2.0, 5.0, &cfg).unwrap();
        let want = Complex64::new(0.087_841_523_449_688_8, 0.313_129_397_614_352);
        assert!((a - want).norm() < 1e-10 * want.norm(), "{a}");
        assert_relative_eq!(prob_two(&s, 2.0, 5.0, &cfg).unwrap(), 0.105_766_152_892_289, max_relative = 1e-9);
        let a = amp_two(&s, 2.0, 3.0, &cfg).unwrap();
        let want = Complex64::new(-0.110_767_781_854_338, -0.201_157_794_407_724);
        assert!((a - want).norm() < 1e-10 * want.norm(), "{a}");
    }

    #[test]
    fn probability_is_one_at_zero_time() {
        let cfg = QuadConfig::default();
        for p in [0.0, 1.0, 2.0] {
            assert_relative_eq!(prob_two(&fig1(), p, 0.0, &cfg).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn three_term_form_matches_modulus() {
        let cfg = QuadConfig::default();
        let s = fig1();
        for t in [0.3, 2.0, 7.5, 31.0] {
            let a = amp_two(&s, 1.0, t, &cfg).unwrap();
            let p = prob_two(&s, 1.0, t, &cfg).unwrap();
            assert_relative_eq!(p, a.norm_sqr(), epsilon = 1e-14, max_relative = 1e-10);
        }
    }

    #[test]
    fn degenerate_weight_reduces_to_single() {
        let cfg = QuadConfig::default();
        let s = TwoMassState::degenerate(toy(0.0, 1.0), toy(2.0, 2.0), 1.0).unwrap();
        let single = amp_single(s.mdd(0), 1.0, 4.0, &cfg).unwrap();
        let p = prob_two(&s, 1.0, 4.0, &cfg).unwrap();
        assert_relative_eq!(p, single.norm_sqr(), max_relative = 1e-12);
    }

    #[test]
    fn weights_are_validated() {
        assert!(TwoMassState::new(toy(0.0, 1.0), toy(0.0, 2.0), 0.6, 0.6).is_err());
        assert!(TwoMassState::new(toy(0.0, 1.0), toy(0.0, 2.0), 1.0, 0.0).is_err());
        let l = std::f64::consts::FRAC_1_SQRT_2;
        assert!(TwoMassState::from_mixing(toy(0.0, 1.0), toy(0.0, 2.0), l, l).is_ok());
    }

    #[test]
    fn series_modes_agree_and_csv_has_header() {
        let cfg = QuadConfig::default();
        let taus: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let a = series(&fig1(), 1.0, &taus, &cfg, Execution::Sequential).unwrap();
        let b = series(&fig1(), 1.0, &taus, &cfg, Execution::Parallel).unwrap();
        assert_eq!(a.prob, b.prob);
        let csv = a.to_csv();
        assert!(csv.starts_with("tau,re_amp,im_amp,prob\n"));
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn negative_inputs_rejected() {
        let cfg = QuadConfig::default();
        assert!(amp_single(&toy(0.0, 1.0), -1.0, 1.0, &cfg).is_err());
        assert!(amp_single(&toy(0.0, 1.0), 1.0, -1.0, &cfg).is_err());
    }
}
