//! Fixed-step RK4 for time-local master equations
//! `ρ' = −i[H, ρ] + Σ γk(t) (Vk ρ Vk† − ½{Vk†Vk, ρ})`.
//!
//! Rates such as the amplitude-damping γ(t) have poles on the real axis
//! (at zeros of c1), so marching along real time blows up there. When all
//! rates are analytic each grid interval is instead traversed along a
//! parabolic arc in the upper half of the complex-time plane; the endpoints
//! are real, so the states reported on the grid are the physical ones.

use crate::error::{arg, Error, Result};
use crate::qstate::{max_abs, CMatrix, DensityMatrix, C64, I};

use super::Rate;

/// Trace drift allowed at every reported grid point.
pub const TRACE_TOL: f64 = 1e-8;

/// Hard cap on RK4 steps per grid interval.
const MAX_STEPS_PER_INTERVAL: usize = 5_000_000;

/// Samples used to bound the rates along an interval.
const RATE_SAMPLES: usize = 65;

/// Step size scale: `h ≤ STEP_SCALE / max|γ|`.
const STEP_SCALE: f64 = 1e-3;

/// Relative height of the complex-time detour.
const DETOUR_HEIGHT: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct JumpTerm {
    pub operator: CMatrix,
    pub rate: Rate,
}

#[derive(Debug, Clone)]
pub struct Generator {
    pub hamiltonian: CMatrix,
    pub jumps: Vec<JumpTerm>,
}

struct Prepared {
    v: CMatrix,
    v_dag: CMatrix,
    half_vdv: CMatrix,
}

impl Generator {
    pub fn new(hamiltonian: CMatrix, jumps: Vec<JumpTerm>) -> Result<Self> {
        let d = hamiltonian.nrows();
        if hamiltonian.ncols() != d {
            return arg("Hamiltonian must be square");
        }
        if max_abs(&(&hamiltonian - hamiltonian.adjoint())) > 1e-12 {
            return arg("Hamiltonian must be Hermitian");
        }
        if let Some(j) = jumps.iter().find(|j| j.operator.shape() != (d, d)) {
            return arg(format!(
                "jump operator is {}x{}, expected {d}x{d}",
                j.operator.nrows(),
                j.operator.ncols()
            ));
        }
        Ok(Self { hamiltonian, jumps })
    }

    /// Dissipator-only generator with zero Hamiltonian.
    pub fn dissipative(dim: usize, jumps: Vec<JumpTerm>) -> Result<Self> {
        Self::new(CMatrix::zeros(dim, dim), jumps)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }

    fn analytic(&self) -> bool {
        self.jumps.iter().all(|j| j.rate.is_analytic())
    }

    fn rates_at(&self, z: C64, analytic: bool) -> Result<Vec<C64>> {
        self.jumps
            .iter()
            .map(|j| {
                let g = if analytic {
                    j.rate.eval_complex(z).expect("analytic rate")
                } else {
                    C64::new(j.rate.eval(z.re)?, 0.0)
                };
                if g.re.is_finite() && g.im.is_finite() {
                    Ok(g)
                } else {
                    Err(Error::Integration(format!("rate is not finite at t = {z}")))
                }
            })
            .collect()
    }

    fn prepare(&self) -> Vec<Prepared> {
        self.jumps
            .iter()
            .map(|j| {
                let v_dag = j.operator.adjoint();
                let half_vdv = (&v_dag * &j.operator).scale(0.5);
                Prepared {
                    v: j.operator.clone(),
                    v_dag,
                    half_vdv,
                }
            })
            .collect()
    }
}

fn derivative(h: &CMatrix, ops: &[Prepared], rates: &[C64], rho: &CMatrix) -> CMatrix {
    let mut out = (h * rho - rho * h) * (-I);
    for (op, g) in ops.iter().zip(rates) {
        let jump = &op.v * rho * &op.v_dag - &op.half_vdv * rho - rho * &op.half_vdv;
        out += jump * *g;
    }
    out
}

/// Point on the integration path for parameter `s ∈ [a, b]`.
fn path(s: f64, a: f64, b: f64, detour: bool) -> C64 {
    if !detour {
        return C64::new(s, 0.0);
    }
    let l = b - a;
    C64::new(s, DETOUR_HEIGHT * l * 4.0 * (s - a) * (b - s) / (l * l))
}

/// Integrate from t = 0 and report the state at each grid time.
pub fn integrate_master_equation(
    generator: &Generator,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch {
            expected: generator.dim(),
            found: rho0.dim(),
        });
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.first().is_some_and(|t| *t < 0.0) {
        return arg("time grid must be finite and start at t ≥ 0");
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return arg("time grid must be strictly increasing");
    }
    let detour = generator.analytic();
    let ops = generator.prepare();
    let h = &generator.hamiltonian;
    let h_norm = max_abs(h) * generator.dim() as f64;

    let mut rho = rho0.matrix().clone();
    let mut out = Vec::with_capacity(t_grid.len());
    let mut t = 0.0;
    for &target in t_grid {
        if target > t {
            rho = integrate_interval(generator, &ops, h, h_norm, rho, t, target, detour)?;
            t = target;
        }
        let state = DensityMatrix::from_approximate(rho.clone(), TRACE_TOL)
            .map_err(|e| Error::Integration(format!("at t = {target}: {e}")))?;
        out.push(state);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn integrate_interval(
    generator: &Generator,
    ops: &[Prepared],
    h: &CMatrix,
    h_norm: f64,
    mut rho: CMatrix,
    a: f64,
    b: f64,
    detour: bool,
) -> Result<CMatrix> {
    let l = b - a;
    let mut scale = h_norm;
    for k in 0..RATE_SAMPLES {
        let s = a + l * k as f64 / (RATE_SAMPLES - 1) as f64;
        for g in generator.rates_at(path(s, a, b, detour), detour)? {
            scale = scale.max(g.norm());
        }
    }
    let step = if scale > 0.0 {
        l.min(STEP_SCALE / scale)
    } else {
        l
    };
    let n = (l / step).ceil();
    if !n.is_finite() || n as usize > MAX_STEPS_PER_INTERVAL {
        return Err(Error::Integration(format!(
            "step underflow on [{a}, {b}] (rate scale {scale:.3e})"
        )));
    }
    let n = (n as usize).max(1);
    let mut z0 = path(a, a, b, detour);
    for k in 1..=n {
        let s1 = if k == n {
            b
        } else {
            a + l * k as f64 / n as f64
        };
        let z1 = path(s1, a, b, detour);
        let dz = z1 - z0;
        let zm = z0 + dz * 0.5;
        let g0 = generator.rates_at(z0, detour)?;
        let gm = generator.rates_at(zm, detour)?;
        let g1 = generator.rates_at(z1, detour)?;
        let k1 = derivative(h, ops, &g0, &rho);
        let k2 = derivative(h, ops, &gm, &(&rho + &k1 * (dz * 0.5)));
        let k3 = derivative(h, ops, &gm, &(&rho + &k2 * (dz * 0.5)));
        let k4 = derivative(h, ops, &g1, &(&rho + &k3 * dz));
        rho += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (dz / 6.0);
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integration(format!(
                "non-finite state near t = {z1}"
            )));
        }
        z0 = z1;
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping_channel, c1, ADParams};
    use crate::qstate::{pauli_z, sigma_minus, trace_distance, PureState};

    #[test]
    fn frozen_dynamics() {
        let g = Generator::dissipative(
            2,
            vec![JumpTerm {
                operator: sigma_minus(),
                rate: Rate::Constant(0.0),
            }],
        )
        .unwrap();
        let rho0 = PureState::plus().density();
        let out = integrate_master_equation(&g, &rho0, &[0.0, 0.5, 3.0]).unwrap();
        for s in out {
            assert!(max_abs(&(s.matrix() - rho0.matrix())) < 1e-14);
        }
    }

    #[test]
    fn constant_decay_is_exponential() {
        let gamma = 0.8;
        let g = Generator::dissipative(
            2,
            vec![JumpTerm {
                operator: sigma_minus(),
                rate: Rate::Constant(gamma),
            }],
        )
        .unwrap();
        let grid: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
        let out = integrate_master_equation(&g, &PureState::one().density(), &grid).unwrap();
        for (t, s) in grid.iter().zip(&out) {
            assert!((s.diagonal()[1] - (-gamma * t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn hamiltonian_rotation() {
        // H = ω σz / 2 rotates ⟨σx⟩ as cos(ωt)
        let w = 1.3;
        let g = Generator::new(pauli_z().scale(w / 2.0), vec![]).unwrap();
        let out = integrate_master_equation(&g, &PureState::plus().density(), &[1.0, 2.0]).unwrap();
        for (t, s) in [1.0f64, 2.0].iter().zip(&out) {
            let sx = s.bloch_vector().unwrap()[0];
            assert!((sx - (w * t).cos()).abs() < 1e-9);
        }
    }

    #[test]
    fn passes_through_rate_singularities() {
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        let g = Generator::dissipative(
            2,
            vec![JumpTerm {
                operator: sigma_minus(),
                rate: Rate::AmplitudeDamping(p),
            }],
        )
        .unwrap();
        let grid: Vec<f64> = (1..=12).map(|k| 0.1 * k as f64 + 0.013).collect();
        let rho0 = PureState::plus().density();
        let out = integrate_master_equation(&g, &rho0, &grid).unwrap();
        let mut checked = 0;
        for (t, s) in grid.iter().zip(&out) {
            if c1(*t, &p).unwrap().abs() > 0.05 {
                let exact = amplitude_damping_channel(*t, &p)
                    .unwrap()
                    .apply(&rho0)
                    .unwrap();
                assert!(trace_distance(s, &exact).unwrap() < 1e-6, "t = {t}");
                checked += 1;
            }
        }
        assert!(checked > 6);
    }

    #[test]
    fn custom_rates_use_real_time() {
        let g = Generator::dissipative(
            2,
            vec![JumpTerm {
                operator: sigma_minus(),
                rate: Rate::custom(|t| 2.0 * t),
            }],
        )
        .unwrap();
        let out = integrate_master_equation(&g, &PureState::one().density(), &[1.5]).unwrap();
        assert!((out[0].diagonal()[1] - (-2.25f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_grids() {
        let g = Generator::dissipative(2, vec![]).unwrap();
        let rho = PureState::zero().density();
        assert!(integrate_master_equation(&g, &rho, &[0.0, 1.0, 0.5]).is_err());
        assert!(integrate_master_equation(&g, &rho, &[-1.0]).is_err());
        assert!(Generator::new(sigma_minus(), vec![]).is_err());
    }
}
