//! Numerics against the closed-form long-time laws on the standard two-mass
//! configurations (toy densities, equal weights).

use decaylab::amplitude::{series, TwoMassState};
use decaylab::analysis::{extract_period, fit_powerlaw, prefactor_fixed_exponent, FitMode};
use decaylab::asymptotics::{dilation_map, long_time, Regime};
use decaylab::grid::resolved_grid;
use decaylab::mdd::{make_toy_mdd, ToyMddParams};
use decaylab::{Execution, QuadConfig};

fn state(a: (f64, f64), b: (f64, f64)) -> TwoMassState {
    let m = |(alpha, xi0)| make_toy_mdd(ToyMddParams { alpha, xi0 }).unwrap();
    TwoMassState::new(m(a), m(b), 0.5, 0.5).unwrap()
}

#[test]
fn scaled_probability_tracks_predictor() {
    // τ^e·P against the predictor on [50, 100]; oscillating cases are held to
    // the predictor's envelope over one period, widened by 10%.
    let cases = [
        ((0.0, 1.0), (2.0, 2.0)),
        ((1.0, 1.0), (2.0, 2.0)),
        ((1.0, 1.0), (2.0, 1.0)),
        ((1.0, 2.0), (2.0, 2.0)),
        ((1.0, 1.0), (1.0, 2.0)),
    ];
    let cfg = QuadConfig::default();
    for (a, b) in cases {
        let s = state(a, b);
        for p in [0.0, 1.0, 2.0] {
            let m = long_time(&s, p).unwrap();
            let dt = if m.period.is_finite() { m.period / 40.0 } else { 0.5 };
            let taus = resolved_grid(50.0, 100.0, dt, 20).unwrap();
            let ser = series(&s, p, &taus, &cfg, Execution::default()).unwrap();
            for (t, prob) in ser.tau.iter().zip(&ser.prob) {
                let (lo, hi) = m.envelope(*t);
                let half = 0.5 * m.period.min(50.0);
                let (elo, ehi) = [t - half, t + half]
                    .iter()
                    .map(|&u| m.envelope(u))
                    .fold((lo, hi), |(l, h), (a, b)| (l.min(a), h.max(b)));
                let mut lower = 0.9 * elo;
                let upper = 1.1 * ehi;
                if m.regime == Regime::PowerLawDistinctAlpha {
                    lower = 0.9 * m.pl(*t) - 1.1 * (m.pl(*t) - elo);
                }
                assert!(*prob >= lower && *prob <= upper, "{a:?} {b:?} p={p} t={t}: {prob} outside [{lower}, {upper}]");
            }
        }
    }
}

#[test]
fn distinct_alpha_slope_and_prefactor() {
    let cfg = QuadConfig::default();
    let s = state((0.0, 1.0), (2.0, 2.0));
    for p in [0.0, 1.0, 2.0] {
        let m = long_time(&s, p).unwrap();
        let taus = resolved_grid(30.0, 100.0, m.period / 40.0, 40).unwrap();
        let ser = series(&s, p, &taus, &cfg, Execution::default()).unwrap();
        let fit = fit_powerlaw(&ser, (30.0, 100.0), FitMode::Raw).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.05, "p={p}: slope {}", fit.slope);
        let pref = prefactor_fixed_exponent(&ser, (30.0, 100.0), m.pl_exponent).unwrap();
        assert!((pref / m.p_pl - 1.0).abs() < 0.1, "p={p}: {pref} vs {}", m.p_pl);
    }
}

#[test]
fn equal_alpha_period_unit_momentum_steps() {
    let cfg = QuadConfig::default();
    let s = state((1.0, 1.0), (1.0, 2.0));
    for p in [0.0, 2.0] {
        let m = long_time(&s, p).unwrap();
        let taus = resolved_grid(10.0, 50.0, m.period / 40.0, 40).unwrap();
        let ser = series(&s, p, &taus, &cfg, Execution::default()).unwrap();
        let est = extract_period(&ser, m.osc_exponent).unwrap();
        assert!((est.period / m.period - 1.0).abs() < 0.01, "p={p}: {} vs {}", est.period, m.period);
    }
}

#[test]
fn dilation_factor_of_the_dominant_component() {
    let s = state((2.0, 2.0), (1.0, 1.0));
    let m = long_time(&s, 1.0).unwrap();
    let d = dilation_map(&m, 1.0, 0.0).unwrap();
    assert_eq!(d.k, 1);
    assert!((d.chi_pk - 2f64.sqrt()).abs() < 1e-15);
    let d2 = dilation_map(&long_time(&s, 2.0).unwrap(), 2.0, 1.0).unwrap();
    assert!(d2.chi_ratio > 1.0 && d2.period_ratio > 1.0);
}
