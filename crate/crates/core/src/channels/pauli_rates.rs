use std::fmt;
use std::sync::Arc;

use crate::error::{arg, Error, Result};
use crate::qstate::C64;

use super::damping::{c1, c1_complex, c1_dot_complex, gamma_ad, ADParams};

/// Quadrature tolerance for rates without a closed-form integral.
pub const QUAD_TOL: f64 = 1e-10;

/// A time-dependent decay rate γ(t).
#[derive(Clone)]
pub enum Rate {
    Constant(f64),
    /// γ(t) = amplitude · tanh(ω t).
    Tanh {
        amplitude: f64,
        omega: f64,
    },
    /// γ(t) = amplitude · tan(ω t), defined for ω t < π/2.
    Tan {
        amplitude: f64,
        omega: f64,
    },
    /// The amplitude-damping rate of a Lorentzian reservoir.
    AmplitudeDamping(ADParams),
    /// Any other real function; integrated numerically.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Constant(g) => write!(f, "Constant({g})"),
            Rate::Tanh { amplitude, omega } => write!(f, "Tanh({amplitude}, {omega})"),
            Rate::Tan { amplitude, omega } => write!(f, "Tan({amplitude}, {omega})"),
            Rate::AmplitudeDamping(p) => write!(f, "AmplitudeDamping({p:?})"),
            Rate::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Rate {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Rate::Custom(Arc::new(f))
    }

    /// Largest time (exclusive) where the rate is finite.
    pub fn horizon(&self) -> f64 {
        match self {
            Rate::Tan { omega, .. } if *omega != 0.0 => std::f64::consts::FRAC_PI_2 / omega.abs(),
            _ => f64::INFINITY,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t.is_finite() && t >= 0.0) {
            return arg(format!("time must be finite and nonnegative, got {t}"));
        }
        if t >= self.horizon() {
            return arg(format!(
                "t = {t} is beyond the rate's domain (t < {})",
                self.horizon()
            ));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let v = match self {
            Rate::Constant(g) => *g,
            Rate::Tanh { amplitude, omega } => amplitude * (omega * t).tanh(),
            Rate::Tan { amplitude, omega } => amplitude * (omega * t).tan(),
            Rate::AmplitudeDamping(p) => gamma_ad(t, p)?,
            Rate::Custom(f) => f(t),
        };
        if !v.is_finite() {
            return arg(format!("rate is not finite at t = {t}"));
        }
        Ok(v)
    }

    /// Analytic continuation to complex time; `None` for custom rates.
    pub fn eval_complex(&self, z: C64) -> Option<C64> {
        match self {
            Rate::Constant(g) => Some(C64::new(*g, 0.0)),
            Rate::Tanh { amplitude, omega } => Some((z * *omega).tanh() * *amplitude),
            Rate::Tan { amplitude, omega } => Some((z * *omega).tan() * *amplitude),
            Rate::AmplitudeDamping(p) => Some(c1_dot_complex(z, p) / c1_complex(z, p) * -2.0),
            Rate::Custom(_) => None,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Rate::Custom(_))
    }

    /// Γ(t) = ∫₀ᵗ γ(τ) dτ.
    pub fn integral(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let v = match self {
            Rate::Constant(g) => g * t,
            Rate::Tanh { amplitude, omega } => {
                if *omega == 0.0 {
                    0.0
                } else {
                    amplitude / omega * ln_cosh(omega * t)
                }
            }
            Rate::Tan { amplitude, omega } => {
                if *omega == 0.0 {
                    0.0
                } else {
                    -amplitude / omega * (omega * t).cos().ln()
                }
            }
            Rate::AmplitudeDamping(p) => {
                let c = c1(t, p)?;
                if c.abs() < super::damping::C1_SINGULAR {
                    return Err(Error::Singularity { t, c1: c });
                }
                -2.0 * c.abs().ln()
            }
            Rate::Custom(f) => adaptive_simpson(f.as_ref(), 0.0, t, QUAD_TOL)?,
        };
        Ok(v)
    }
}

/// ln cosh x without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if !delta.is_finite() {
            return Err(Error::Integration("rate is not integrable".into()));
        }
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Rates (γx, γy, γz) of a Pauli-diagonal time-local master equation.
#[derive(Debug, Clone)]
pub struct PauliRates {
    pub gamma_x: Rate,
    pub gamma_y: Rate,
    pub gamma_z: Rate,
}

impl PauliRates {
    pub fn new(gamma_x: Rate, gamma_y: Rate, gamma_z: Rate) -> Self {
        Self {
            gamma_x,
            gamma_y,
            gamma_z,
        }
    }

    /// γx = γy = λ/2, γz = −ω tanh(ωt)/2: negative at every t > 0.
    pub fn eternal(lambda: f64, omega: f64) -> Self {
        Self::new(
            Rate::Constant(lambda / 2.0),
            Rate::Constant(lambda / 2.0),
            Rate::Tanh {
                amplitude: -omega / 2.0,
                omega,
            },
        )
    }

    /// γx = γy = λ/2, γz = ω tan(ωt)/2, defined for t < π/(2ω).
    pub fn tan_channel(lambda: f64, omega: f64) -> Self {
        Self::new(
            Rate::Constant(lambda / 2.0),
            Rate::Constant(lambda / 2.0),
            Rate::Tan {
                amplitude: omega / 2.0,
                omega,
            },
        )
    }

    pub fn rates(&self) -> [&Rate; 3] {
        [&self.gamma_x, &self.gamma_y, &self.gamma_z]
    }

    pub fn horizon(&self) -> f64 {
        self.rates()
            .iter()
            .map(|r| r.horizon())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Map eigenvalues (λx, λy, λz) with λj = exp(−Γk − Γl).
pub fn pauli_eigenvalues(rates: &PauliRates, t: f64) -> Result<[f64; 3]> {
    let gx = rates.gamma_x.integral(t)?;
    let gy = rates.gamma_y.integral(t)?;
    let gz = rates.gamma_z.integral(t)?;
    Ok([(-gy - gz).exp(), (-gx - gz).exp(), (-gx - gy).exp()])
}

/// Pauli probabilities (p0, px, py, pz) of the channel with the given
/// eigenvalues. Unclamped: negative entries signal a non-CP map.
pub fn probabilities_from_eigenvalues(l: [f64; 3]) -> [f64; 4] {
    let [x, y, z] = l;
    [
        (1.0 + x + y + z) / 4.0,
        (1.0 + x - y - z) / 4.0,
        (1.0 - x + y - z) / 4.0,
        (1.0 - x - y + z) / 4.0,
    ]
}

/// Pauli-channel probabilities of the dynamical map at time `t`.
pub fn pauli_rates_to_probabilities(rates: &PauliRates, t: f64) -> Result<[f64; 4]> {
    let mut p = probabilities_from_eigenvalues(pauli_eigenvalues(rates, t)?);
    if let Some(bad) = p.iter().find(|v| **v < -1e-6) {
        return Err(Error::Model {
            t,
            detail: format!("Pauli probability {bad:.3e} < 0"),
        });
    }
    for v in &mut p {
        *v = v.max(0.0);
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok(p)
}
