//! Reference integrator: composite Simpson on a uniform grid with one
//! Richardson step. Deliberately naive and independent of the adaptive path;
//! used only to cross-check it.

use num_complex::Complex64;

use super::{Estimate, OscIntegrand};
use crate::error::{Error, Result};

pub const MIN_ORACLE_PANELS: usize = 1024;

/// Composite Simpson rule with `n` (even) subintervals over the full support.
pub fn simpson(ig: &OscIntegrand<'_>, n: usize) -> Complex64 {
    let a = ig.mdd().xi0();
    let b = ig.mdd().xi_max();
    let h = (b - a) / n as f64;
    let mut s = ig.eval(a) + ig.eval(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += ig.eval(a + i as f64 * h) * w;
    }
    s * (h / 3.0)
}

/// `R = S₂ₙ + (S₂ₙ − Sₙ)/15`, with `|S₂ₙ − Sₙ|/15` as the error estimate.
pub fn oracle_integrate(ig: &OscIntegrand<'_>, n_panels: usize) -> Result<Estimate> {
    if n_panels < MIN_ORACLE_PANELS || !n_panels.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "oracle needs an even panel count >= {MIN_ORACLE_PANELS}, got {n_panels}"
        )));
    }
    let coarse = simpson(ig, n_panels);
    let fine = simpson(ig, 2 * n_panels);
    let diff = (fine - coarse) / 15.0;
    Ok(Estimate { value: fine + diff, error: diff.norm(), panels: 2 * n_panels, evaluations: 3 * n_panels + 2 })
}
