use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::qstate::{sigma_minus, CMatrix, C64, ONE, ZERO};

use super::KrausChannel;

/// Below this |c1| the decay rate is reported as singular.
pub const C1_SINGULAR: f64 = 1e-12;

/// Spontaneous decay into a Lorentzian reservoir: coupling `gamma0`,
/// spectral width `lambda`. `omega0` is carried for bookkeeping and does
/// not enter the on-resonance dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADParams {
    pub gamma0: f64,
    pub lambda: f64,
    #[serde(default)]
    pub omega0: f64,
}

impl ADParams {
    pub fn new(gamma0: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            gamma0,
            lambda,
            omega0: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with coupling ratio `R = γ0/λ`.
    pub fn from_ratio(r: f64, lambda: f64) -> Result<Self> {
        Self::new(r * lambda, lambda)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0.is_finite() && self.gamma0 > 0.0) {
            return arg(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return arg(format!("lambda must be positive, got {}", self.lambda));
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.gamma0 / self.lambda
    }

    fn s(&self) -> C64 {
        C64::new(1.0 - 2.0 * self.ratio(), 0.0).sqrt()
    }
}

/// `sinh(x s)/s`, continuous at s = 0.
fn sinhc(x: C64, s: C64) -> C64 {
    if s == ZERO {
        x
    } else {
        (x * s).sinh() / s
    }
}

/// Excited-state amplitude c1(z), analytically continued to complex time.
pub fn c1_complex(z: C64, p: &ADParams) -> C64 {
    let s = p.s();
    let x = z * (p.lambda / 2.0);
    (-x).exp() * ((x * s).cosh() + sinhc(x, s))
}

/// dc1/dz.
pub fn c1_dot_complex(z: C64, p: &ADParams) -> C64 {
    let s = p.s();
    let x = z * (p.lambda / 2.0);
    -(-x).exp() * sinhc(x, s) * (p.ratio() * p.lambda)
}

/// Real c1(t) for t ≥ 0.
pub fn c1(t: f64, p: &ADParams) -> Result<f64> {
    p.validate()?;
    if !(t.is_finite() && t >= 0.0) {
        return arg(format!("time must be finite and nonnegative, got {t}"));
    }
    Ok(c1_complex(C64::new(t, 0.0), p).re.clamp(-1.0, 1.0))
}

/// Time-local decay rate γ(t) = −2 Re(ċ1/c1).
pub fn gamma_ad(t: f64, p: &ADParams) -> Result<f64> {
    let c = c1(t, p)?;
    if c.abs() < C1_SINGULAR {
        return Err(Error::Singularity { t, c1: c });
    }
    let dc = c1_dot_complex(C64::new(t, 0.0), p).re;
    Ok(-2.0 * dc / c)
}

/// Kraus form `K0 = |0⟩⟨0| + c1|1⟩⟨1|`, `K1 = √(1−c1²)|0⟩⟨1|`
/// (|1⟩ excited).
pub fn amplitude_damping_channel(t: f64, p: &ADParams) -> Result<KrausChannel> {
    let c = c1(t, p)?;
    let k0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, C64::new(c, 0.0)]);
    let k1 = sigma_minus().scale((1.0 - c * c).max(0.0).sqrt());
    KrausChannel::new(2, vec![k0, k1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{DensityMatrix, PureState};
    use std::f64::consts::PI;

    fn bisect(p: &ADParams, mut lo: f64, mut hi: f64) -> f64 {
        let f = |t: f64| c1(t, p).unwrap();
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn c1_starts_at_one() {
        for r in [0.1, 0.5, 2.0, 100.0] {
            let p = ADParams::from_ratio(r, 1.0).unwrap();
            assert!((c1(0.0, &p).unwrap() - 1.0).abs() < 1e-15);
            assert!(gamma_ad(0.0, &p).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn critical_ratio_uses_limit() {
        let p = ADParams::from_ratio(0.5, 2.0).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let x: f64 = t; // λt/2 with λ = 2
            let expect = (-x).exp() * (1.0 + x);
            assert!((c1(t, &p).unwrap() - expect).abs() < 1e-15);
        }
        // continuity from both sides
        let below = ADParams::from_ratio(0.5 - 1e-9, 2.0).unwrap();
        let above = ADParams::from_ratio(0.5 + 1e-9, 2.0).unwrap();
        let mid = c1(1.3, &p).unwrap();
        assert!((c1(1.3, &below).unwrap() - mid).abs() < 1e-8);
        assert!((c1(1.3, &above).unwrap() - mid).abs() < 1e-8);
    }

    #[test]
    fn strong_coupling_closed_form() {
        // R > 1/2: c1 = e^{−λt/2}[cos(λtd/2) + sin(λtd/2)/d], d = √(2R−1)
        let p = ADParams::from_ratio(5.0, 1.0).unwrap();
        let d = 3.0f64;
        for t in [0.1, 0.7, 2.5] {
            let x: f64 = t / 2.0;
            let expect = (-x).exp() * ((x * d).cos() + (x * d).sin() / d);
            assert!((c1(t, &p).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = ADParams::from_ratio(3.0, 0.7).unwrap();
        let h = 1e-6;
        for t in [0.2, 1.1, 3.0] {
            let fd = (c1(t + h, &p).unwrap() - c1(t - h, &p).unwrap()) / (2.0 * h);
            assert!((c1_dot_complex(C64::new(t, 0.0), &p).re - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn excited_population_is_c1_squared() {
        let p = ADParams::from_ratio(2.0, 1.0).unwrap();
        let excited = DensityMatrix::basis(1, 1).unwrap();
        for t in [0.0, 0.5, 1.5, 4.0] {
            let out = amplitude_damping_channel(t, &p)
                .unwrap()
                .apply(&excited)
                .unwrap();
            let c = c1(t, &p).unwrap();
            assert!((out.diagonal()[1] - c * c).abs() < 1e-15);
        }
    }

    #[test]
    fn first_zero_at_large_ratio() {
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        // first zero of cos(dt/2) + sin(dt/2)/d lies just past π/d
        let d = 199f64.sqrt();
        let t0 = bisect(&p, 0.9 * PI / d, 2.0 * PI / d);
        let out = amplitude_damping_channel(t0, &p)
            .unwrap()
            .apply(&PureState::one().density())
            .unwrap();
        assert!(out.diagonal()[1] < 1e-20);
        assert!(matches!(gamma_ad(t0, &p), Err(Error::Singularity { .. })));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ADParams::new(-1.0, 1.0).is_err());
        assert!(ADParams::new(1.0, 0.0).is_err());
        let p = ADParams::from_ratio(1.0, 1.0).unwrap();
        assert!(c1(-0.1, &p).is_err());
        assert!(amplitude_damping_channel(f64::NAN, &p).is_err());
    }
}
