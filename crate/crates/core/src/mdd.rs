//! Mass distribution densities in dimensionless form.
//!
//! A density is stored through its auxiliary function on `ξ = m / m_s`,
//!
//! ```text
//! Ω(ξ) = w · (ξ − ξ₀)^α · R(ξ),   ξ ≥ ξ₀ > 0,
//! ```
//!
//! where `R` is the regular part (positive at `ξ₀`) and `w` the normalization
//! weight. `Ω₀ = w·R` is the regular factor whose endpoint value fixes every
//! long-time law, so each regular part declares `R(ξ₀)` explicitly instead of
//! having it extrapolated.
//!
//! Caller obligation: the long-time laws assume the regular part is smooth
//! enough near `ξ₀` (derivatives up to order ⌊α⌋ + 4 summable). This is not
//! checked for user-supplied regular parts.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{self, OscIntegrand, QuadConfig};

/// Largest ξ₀ accepted for the toy family; `e^{ξ₀²}` in the weight overflows
/// beyond this.
pub const TOY_XI0_MAX: f64 = 25.0;

/// Parameters of the toy family `Ω(ξ) = w · ξ · (ξ² − ξ₀²)^α · e^{−ξ²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyMddParams {
    pub alpha: f64,
    pub xi0: f64,
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant through knots.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParameter("tabulated regular part needs at least two knots".into()));
        }
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k.1).collect();
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("knots must be finite".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("knot abscissae must be strictly increasing".into()));
        }

        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = d[0];
            slopes[1] = d[0];
        } else {
            for k in 1..n - 1 {
                if d[k - 1] * d[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], d[0], d[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn first(&self) -> (f64, f64) {
        (self.xs[0], self.ys[0])
    }

    pub fn last_x(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Zero outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return 0.0;
        }
        let k = match self.xs.partition_point(|&xk| xk <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

// Three-point end derivative with the usual shape-preserving limits.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// User-supplied regular part.
pub type RegularFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Regular factor `R(ξ)` of the auxiliary function (before the weight).
#[derive(Clone)]
pub enum RegularPart {
    /// `R(ξ) = ξ (ξ + ξ₀)^α e^{−ξ²}`.
    Toy {
        alpha: f64,
        xi0: f64,
    },
    /// Monotone-cubic interpolation of `Ω₀` knots; zero past the last knot.
    Tabulated(MonotoneCubic),
    Custom {
        f: RegularFn,
        at_endpoint: f64,
    },
}

impl fmt::Debug for RegularPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegularPart::Toy { alpha, xi0 } => f.debug_struct("Toy").field("alpha", alpha).field("xi0", xi0).finish(),
            RegularPart::Tabulated(t) => f.debug_tuple("Tabulated").field(t).finish(),
            RegularPart::Custom { at_endpoint, .. } => {
                f.debug_struct("Custom").field("at_endpoint", at_endpoint).finish_non_exhaustive()
            }
        }
    }
}

impl RegularPart {
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            RegularPart::Toy { alpha, xi0 } => xi * (xi + xi0).powf(*alpha) * (-xi * xi).exp(),
            RegularPart::Tabulated(t) => t.eval(xi),
            RegularPart::Custom { f, .. } => f(xi),
        }
    }

    /// Declared value at the spectrum's lower bound.
    pub fn at_endpoint(&self) -> f64 {
        match self {
            RegularPart::Toy { alpha, xi0 } => xi0 * (2.0 * xi0).powf(*alpha) * (-xi0 * xi0).exp(),
            RegularPart::Tabulated(t) => t.first().1,
            RegularPart::Custom { at_endpoint, .. } => *at_endpoint,
        }
    }

    /// Interior points where the regular part is only piecewise smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            RegularPart::Tabulated(t) => {
                let xs: Vec<f64> = t.knots().map(|k| k.0).collect();
                if xs.len() > 2 && xs.len() <= 4096 {
                    xs[1..xs.len() - 1].to_vec()
                } else {
                    Vec::new()
                }
            }
            _ => Vec::new(),
        }
    }
}

/// One mass state's distribution density.
///
/// Immutable after construction; cloning is cheap (the custom evaluator is
/// reference counted).
#[derive(Debug, Clone)]
pub struct MddSpec {
    alpha: f64,
    xi0: f64,
    scale_mass: f64,
    regular: RegularPart,
    weight: f64,
    xi_max: f64,
}

impl MddSpec {
    /// Raw constructor; the result is normalized only if `weight` already is.
    pub fn new(alpha: f64, xi0: f64, regular: RegularPart, weight: f64) -> Result<Self> {
        check_alpha_xi0(alpha, xi0)?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidParameter(format!("weight must be positive, got {weight}")));
        }
        let r0 = regular.at_endpoint();
        if !(r0.is_finite() && r0 > 0.0) {
            return Err(Error::InvalidParameter(format!("regular part must be positive at xi0, got {r0}")));
        }
        let mut spec = Self { alpha, xi0, scale_mass: 1.0, regular, weight, xi_max: f64::NAN };
        spec.xi_max = spec.tail_cutoff(QuadConfig::default().tail_threshold)?;
        Ok(spec)
    }

    /// Tabulated `Ω₀` knots; the first knot sits at `ξ₀`. Normalized with `cfg`.
    pub fn tabulated(alpha: f64, knots: &[(f64, f64)], cfg: &QuadConfig) -> Result<Self> {
        let interp = MonotoneCubic::new(knots)?;
        if knots.iter().any(|k| k.1 < 0.0) {
            return Err(Error::InvalidParameter("tabulated values must be nonnegative".into()));
        }
        let xi0 = interp.first().0;
        let spec = Self::new(alpha, xi0, RegularPart::Tabulated(interp), 1.0)?;
        normalize(&spec, cfg)
    }

    /// User-supplied regular part with its declared endpoint value. Normalized
    /// with `cfg`.
    pub fn custom(alpha: f64, xi0: f64, f: RegularFn, at_endpoint: f64, cfg: &QuadConfig) -> Result<Self> {
        let spec = Self::new(alpha, xi0, RegularPart::Custom { f, at_endpoint }, 1.0)?;
        normalize(&spec, cfg)
    }

    pub fn with_scale_mass(mut self, scale_mass: f64) -> Result<Self> {
        if !(scale_mass.is_finite() && scale_mass > 0.0) {
            return Err(Error::InvalidParameter(format!("scale mass must be positive, got {scale_mass}")));
        }
        self.scale_mass = scale_mass;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// Lower bound of the mass spectrum, `μ₀ = ξ₀ m_s`.
    pub fn mu0(&self) -> f64 {
        self.xi0 * self.scale_mass
    }

    pub fn scale_mass(&self) -> f64 {
        self.scale_mass
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn regular(&self) -> &RegularPart {
        &self.regular
    }

    /// Upper end of the truncated support.
    pub fn xi_max(&self) -> f64 {
        self.xi_max
    }

    pub fn is_toy(&self) -> bool {
        matches!(self.regular, RegularPart::Toy { .. })
    }

    /// `Ω(ξ)`, zero below `ξ₀`.
    pub fn omega(&self, xi: f64) -> f64 {
        if xi < self.xi0 {
            return 0.0;
        }
        self.omega_offset(xi - self.xi0)
    }

    /// `Ω(ξ₀ + u)` evaluated from the offset directly, so the endpoint power
    /// never sees a cancelled difference.
    pub fn omega_offset(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        self.weight * u.powf(self.alpha) * self.regular.eval(self.xi0 + u)
    }

    /// `Ω₀(ξ) = w R(ξ)`.
    pub fn omega_regular(&self, xi: f64) -> f64 {
        self.weight * self.regular.eval(xi)
    }

    /// Truncation point: toy densities use `max(8, ξ₀ + 8)`, tabulated ones
    /// their last knot; anything else grows the window until `Ω` has fallen
    /// below `threshold · max Ω`.
    pub fn tail_cutoff(&self, threshold: f64) -> Result<f64> {
        match &self.regular {
            RegularPart::Toy { .. } => Ok(f64::max(8.0, self.xi0 + 8.0)),
            RegularPart::Tabulated(t) => Ok(t.last_x()),
            RegularPart::Custom { .. } => {
                const SAMPLES: usize = 512;
                let mut span = 8.0;
                for _ in 0..12 {
                    let max = (0..=SAMPLES)
                        .map(|k| self.omega_offset(span * k as f64 / SAMPLES as f64).abs())
                        .fold(0.0, f64::max);
                    if !max.is_finite() {
                        return Err(Error::DivergentIntegral(format!(
                            "density is not finite on [{}, {}]",
                            self.xi0,
                            self.xi0 + span
                        )));
                    }
                    // last eighth of the window must already be negligible
                    let tail_ok = (0..=16).all(|k| {
                        let u = span * (7.0 / 8.0 + k as f64 / 128.0);
                        self.omega_offset(u).abs() <= threshold * max
                    });
                    if tail_ok {
                        return Ok(self.xi0 + span);
                    }
                    span *= 2.0;
                }
                Err(Error::DivergentIntegral(format!(
                    "tail above {threshold:e} of the peak beyond xi = {}",
                    self.xi0 + span
                )))
            }
        }
    }
}

fn check_alpha_xi0(alpha: f64, xi0: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be >= 0, got {alpha}")));
    }
    if !(xi0.is_finite() && xi0 > 0.0) {
        return Err(Error::InvalidParameter(format!("xi0 must be > 0, got {xi0}")));
    }
    Ok(())
}

/// Closed-form normalized member of the toy family.
///
/// Substituting `u = ξ²` gives `∫ ξ (ξ² − ξ₀²)^α e^{−ξ²} dξ = ½ Γ(1+α) e^{−ξ₀²}`,
/// hence `w = 2 e^{ξ₀²} / Γ(1+α)`.
pub fn make_toy_mdd(params: ToyMddParams) -> Result<MddSpec> {
    let ToyMddParams { alpha, xi0 } = params;
    check_alpha_xi0(alpha, xi0)?;
    if xi0 > TOY_XI0_MAX {
        return Err(Error::InvalidParameter(format!("toy family requires xi0 <= {TOY_XI0_MAX}, got {xi0}")));
    }
    let weight = 2.0 * (xi0 * xi0).exp() / gamma(1.0 + alpha);
    MddSpec::new(alpha, xi0, RegularPart::Toy { alpha, xi0 }, weight)
}

/// Rescales the weight so that `∫ Ω dξ = 1`.
pub fn normalize(spec: &MddSpec, cfg: &QuadConfig) -> Result<MddSpec> {
    cfg.validate()?;
    let mut out = spec.clone();
    out.xi_max = spec.tail_cutoff(cfg.tail_threshold)?;
    let mass = quadrature::integrate(&OscIntegrand::new(&out, 0.0, 0.0)?, cfg)?.re;
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::DivergentIntegral(format!("density carries no finite positive mass (integral = {mass})")));
    }
    out.weight /= mass;
    Ok(out)
}

/// `c₀ = Γ(1+α) Ω₀(ξ₀)`; for the toy family this is `2ξ₀ (2ξ₀)^α`.
pub fn endpoint_constant(spec: &MddSpec) -> f64 {
    gamma(1.0 + spec.alpha) * spec.weight * spec.regular.at_endpoint()
}

/// Exponent `k` of `(p² + m²)^k` in a moment integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    Half,
    One,
    ThreeHalves,
}

impl MomentOrder {
    pub fn exponent(self) -> f64 {
        match self {
            MomentOrder::Half => 0.5,
            MomentOrder::One => 1.0,
            MomentOrder::ThreeHalves => 1.5,
        }
    }
}

/// `∫ Ω(ξ) (ρ² + ξ²)^k dξ` with `ρ = p / m_s`, in units of `m_s^{2k}`.
///
/// The short-time coefficients are `a₀ = M(½)`, `a₁ = M(1)/2`, `a₂ = M(3/2)/6`.
pub fn moment(spec: &MddSpec, p: f64, order: MomentOrder, cfg: &QuadConfig) -> Result<f64> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::InvalidParameter(format!("momentum must be >= 0, got {p}")));
    }
    let rho = p / spec.scale_mass;
    let k = order.exponent();
    let est = quadrature::integrate_weighted(spec, cfg, |xi| (rho * rho + xi * xi).powf(k)).map_err(|e| match e {
        Error::ToleranceNotMet { error, target, .. } => {
            Error::NonconvergentMoment(format!("order {k}: error {error:e} above target {target:e}"))
        }
        other => other,
    })?;
    if !est.is_finite() {
        return Err(Error::NonconvergentMoment(format!("order {k}: non-finite value")));
    }
    Ok(est)
}
