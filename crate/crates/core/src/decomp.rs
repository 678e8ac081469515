//! Circuit builders for the simulated channels, plus the angle algebra
//! that maps channel parameters to gate angles.
//!
//! Every builder keeps the system on the lowest qubit indices and starts
//! its ancillae in |0⟩, so `circuit_to_channel(c, system, |0…0⟩)` gives the
//! map the circuit implements.

use serde::{Deserialize, Serialize};

use crate::channels::{c1, ADParams};
use crate::circuit::{Circuit, Gate, Prep};
use crate::error::{arg, Error, Result};

/// Qubit layout of the reservoir-engineering circuits.
pub mod pump_layout {
    pub const S1: usize = 0;
    pub const S2: usize = 1;
    pub const A_ZZ: usize = 2;
    pub const A_XX: usize = 3;
}

use pump_layout::{A_XX, A_ZZ, S1, S2};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return arg(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// Controlled-rotation angle realising a flip with probability `p`.
pub fn pump_angle(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(2.0 * p.sqrt().asin())
}

fn zz_body(theta: f64) -> Vec<Gate> {
    vec![
        Gate::cnot(S1, S2),
        Gate::cnot(S2, A_ZZ),
        Gate::cry(A_ZZ, S2, theta),
        Gate::cnot(S2, A_ZZ),
        Gate::cnot(S1, S2),
    ]
}

fn xx_body(theta: f64) -> Vec<Gate> {
    vec![
        Gate::cnot(S1, S2),
        Gate::h(S1),
        Gate::cnot(S1, A_XX),
        Gate::cry(A_XX, S1, theta),
        Gate::cnot(S1, A_XX),
        // the flip above acts as σz on s1; this moves it onto s2
        Gate::cz(A_XX, S2),
        Gate::z(S2),
        Gate::h(S1),
        Gate::cnot(S1, S2),
    ]
}

/// ZZ pump on (s1, s2) with its ancilla flipped to |1⟩ first.
pub fn build_pump_zz_circuit(p: f64) -> Result<Circuit> {
    let theta = pump_angle(p)?;
    let mut c = Circuit::new(4);
    c.push(Gate::x(A_ZZ)).extend(zz_body(theta));
    Ok(c)
}

pub fn build_pump_xx_circuit(p: f64) -> Result<Circuit> {
    let theta = pump_angle(p)?;
    let mut c = Circuit::new(4);
    c.push(Gate::x(A_XX)).extend(xx_body(theta));
    Ok(c)
}

/// XX pump after ZZ pump, with the back-to-back CNOT(s1→s2) pair removed.
pub fn build_composed_pump_circuit(p: f64) -> Result<Circuit> {
    let theta = pump_angle(p)?;
    let mut zz = zz_body(theta);
    let mut xx = xx_body(theta);
    zz.pop();
    xx.remove(0);
    let mut c = Circuit::new(4);
    c.push(Gate::x(A_ZZ))
        .push(Gate::x(A_XX))
        .extend(zz)
        .extend(xx);
    Ok(c)
}

/// One collision: phase kick exp(±i gτ σz) on the system, sign set by the
/// ancilla's Z value.
fn collision(system: usize, ancilla: usize, g_tau: f64) -> [Gate; 3] {
    [
        Gate::cnot(ancilla, system),
        Gate::rz(system, -2.0 * g_tau),
        Gate::cnot(ancilla, system),
    ]
}

/// Collisional dephasing of a system (qubit 0) prepared in |+⟩, followed
/// by a Hadamard so that Z-basis counts give ⟨σx⟩.
///
/// Correlated: three ancillae in a GHZ state, the system colliding
/// alternately with the first two. Separable: `n` ancillae in |+⟩, one per
/// collision.
pub fn build_collisional_circuit(n: u32, g_tau: f64, correlated: bool) -> Result<Circuit> {
    if n == 0 {
        return arg("at least one collision is required");
    }
    if !g_tau.is_finite() {
        return arg("g·τ must be finite");
    }
    let n = n as usize;
    let mut c = if correlated {
        let mut c = Circuit::new(4);
        c.push(Gate::h(1))
            .push(Gate::cnot(1, 2))
            .push(Gate::cnot(2, 3));
        for k in 0..n {
            c.extend(collision(0, 1 + k % 2, g_tau));
        }
        c
    } else {
        let mut c = Circuit::new(n + 1);
        c.extend((1..=n).map(Gate::h));
        for k in 1..=n {
            c.extend(collision(0, k, g_tau));
        }
        c
    };
    c.push(Gate::h(0));
    let mut prep = vec![Prep::Zero; c.num_qubits];
    prep[0] = Prep::Plus;
    Ok(c.with_prep(prep))
}

/// Two-qubit correlator measured on (system, witness).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessBasis {
    XX,
    YY,
    ZZ,
}

impl WitnessBasis {
    pub const ALL: [WitnessBasis; 3] = [WitnessBasis::XX, WitnessBasis::YY, WitnessBasis::ZZ];

    pub fn label(self) -> &'static str {
        match self {
            WitnessBasis::XX => "XX",
            WitnessBasis::YY => "YY",
            WitnessBasis::ZZ => "ZZ",
        }
    }
}

/// Amplitude damping of the system (qubit 0) through an environment qubit
/// (qubit 1). The controlled rotation angle is 2 arccos c1(t).
///
/// Without the witness the system starts excited. With it, qubit 2 is a
/// memory maximally entangled with the system and the final gates rotate
/// both into the requested correlator basis.
pub fn build_amplitude_damping_circuit(
    t: f64,
    params: &ADParams,
    with_witness: bool,
    witness_basis: WitnessBasis,
) -> Result<Circuit> {
    let theta = c1(t, params)?.clamp(-1.0, 1.0).acos();
    let gadget = [Gate::cry(0, 1, 2.0 * theta), Gate::cnot(1, 0)];
    if !with_witness {
        let mut c = Circuit::new(2);
        c.extend(gadget);
        return Ok(c.with_prep(vec![Prep::One, Prep::Zero]));
    }
    let mut c = Circuit::new(3);
    c.push(Gate::h(2)).push(Gate::cnot(2, 0)).extend(gadget);
    match witness_basis {
        WitnessBasis::XX => {
            c.push(Gate::h(0)).push(Gate::h(2));
        }
        WitnessBasis::YY => {
            c.extend([Gate::sdg(0), Gate::h(0), Gate::sdg(2), Gate::h(2)]);
        }
        WitnessBasis::ZZ => {}
    }
    Ok(c)
}

/// Ancilla rotation θ(p) = ½ arccos(1 − 2p) for the depolarizing circuit.
pub fn depolarizing_angle(p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(0.5 * (1.0 - 2.0 * p).acos())
}

/// Depolarizing parameter induced by ancilla rotation θ: each ancilla
/// reads 1 with probability q = sin²(θ/2), each Pauli fires with
/// probability q(1 − q) = sin²θ / 4.
pub fn depolarizing_error_probability(theta: f64) -> f64 {
    theta.sin().powi(2)
}

/// System on qubit 0; three ancillae rotated by RY(θ(p)) control X, Y and
/// Z on it.
pub fn build_depolarizing_circuit(p: f64) -> Result<Circuit> {
    let theta = depolarizing_angle(p)?;
    let mut c = Circuit::new(4);
    c.extend((1..=3).map(|q| Gate::ry(q, theta)));
    c.push(Gate::cnot(1, 0))
        .push(Gate::cy(2, 0))
        .push(Gate::cz(3, 0));
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl PauliAngles {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self {
            theta1,
            theta2,
            theta3,
        }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.theta1, self.theta2, self.theta3]
    }

    /// Ancilla amplitudes of |00⟩, |01⟩, |10⟩, |11⟩ in the labelling of the
    /// two-ancilla preparation (first label bit controls X, second Y).
    pub fn amplitudes(&self) -> [f64; 4] {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        [
            c1 * c2 * c3 + s1 * s2 * s3,
            c1 * c2 * s3 - s1 * s2 * c3,
            c1 * s2 * c3 - s1 * c2 * s3,
            s1 * c2 * c3 + c1 * s2 * s3,
        ]
    }

    /// Pauli probabilities (p0, px, py, pz) of the induced channel.
    pub fn probabilities(&self) -> [f64; 4] {
        // label |01⟩ fires only CY, |10⟩ only CNOT, |11⟩ both (Y·X ∝ Z)
        let a = self.amplitudes();
        [a[0].powi(2), a[2].powi(2), a[1].powi(2), a[3].powi(2)]
    }

    /// max |pᵢ − pᵢ(θ)| against a target probability vector.
    pub fn residual(&self, p: &[f64; 4]) -> f64 {
        self.probabilities()
            .iter()
            .zip(p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Forward residual accepted by [`solve_pauli_angles`].
pub const PAULI_RESIDUAL_TOL: f64 = 1e-9;

const NEWTON_STARTS: usize = 25;
const NEWTON_ITERS: usize = 200;

fn halton(index: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, index);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Residuals and Jacobian of (A01, A10, A11) − target.
fn system(th: &[f64; 3], target: &[f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let (s1, c1) = th[0].sin_cos();
    let (s2, c2) = th[1].sin_cos();
    let (s3, c3) = th[2].sin_cos();
    let f = [
        c1 * c2 * s3 - s1 * s2 * c3 - target[0],
        c1 * s2 * c3 - s1 * c2 * s3 - target[1],
        s1 * c2 * c3 + c1 * s2 * s3 - target[2],
    ];
    let j = [
        [
            -s1 * c2 * s3 - c1 * s2 * c3,
            -c1 * s2 * s3 - s1 * c2 * c3,
            c1 * c2 * c3 + s1 * s2 * s3,
        ],
        [
            -s1 * s2 * c3 - c1 * c2 * s3,
            c1 * c2 * c3 + s1 * s2 * s3,
            -c1 * s2 * s3 - s1 * c2 * c3,
        ],
        [
            c1 * c2 * c3 - s1 * s2 * s3,
            -s1 * s2 * c3 + c1 * c2 * s3,
            -s1 * c2 * s3 + c1 * s2 * c3,
        ],
    ];
    (f, j)
}

fn norm2(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Levenberg–Marquardt-damped Newton iteration.
fn newton(start: [f64; 3], target: &[f64; 3]) -> [f64; 3] {
    use nalgebra::{Matrix3, Vector3};
    let mut th = start;
    let (mut f, mut j) = system(&th, target);
    let mut cost = norm2(&f);
    let mut mu = 1e-6;
    for _ in 0..NEWTON_ITERS {
        if cost < 1e-28 {
            break;
        }
        let jm = Matrix3::from_fn(|r, c| j[r][c]);
        let fv = Vector3::from(f);
        let jtj = jm.transpose() * jm;
        let g = jm.transpose() * fv;
        let mut improved = false;
        for _ in 0..30 {
            let a = jtj + Matrix3::identity() * mu;
            let Some(step) = a.lu().solve(&(-g)) else {
                mu *= 10.0;
                continue;
            };
            let cand = [th[0] + step[0], th[1] + step[1], th[2] + step[2]];
            let (fc, jc) = system(&cand, target);
            let cc = norm2(&fc);
            if cc < cost {
                th = cand;
                f = fc;
                j = jc;
                cost = cc;
                mu = (mu * 0.1).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    th
}

fn wrap(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y - two_pi
    } else {
        y
    }
}

/// Angles whose two-ancilla circuit induces the Pauli channel with
/// probabilities (p0, px, py, pz).
///
/// Each sign assignment of the square-root amplitudes is tried from a
/// fixed quasi-random grid of starts; among the solutions passing the
/// forward check the one with the smallest wrapped norm is returned.
pub fn solve_pauli_angles(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<PauliAngles> {
    let p = [p0, p1, p2, p3];
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return arg(format!("probabilities must be nonnegative, got {p:?}"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return arg(format!("probabilities sum to {total}"));
    }
    // amplitude targets for labels 01, 10, 11
    let mag = [p2.sqrt(), p1.sqrt(), p3.sqrt()];
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut best: Option<(f64, PauliAngles)> = None;
    let mut best_residual = f64::INFINITY;
    for signs in 0..8u32 {
        let target: [f64; 3] =
            std::array::from_fn(|k| if signs >> k & 1 == 1 { -mag[k] } else { mag[k] });
        if signs != 0 && (0..3).any(|k| signs >> k & 1 == 1 && mag[k] == 0.0) {
            continue;
        }
        for i in 0..NEWTON_STARTS {
            let start = [
                half_pi * halton(i + 1, 2),
                half_pi * halton(i + 1, 3),
                half_pi * halton(i + 1, 5),
            ];
            let th = newton(start, &target).map(wrap);
            let angles = PauliAngles::new(th[0], th[1], th[2]);
            let res = angles.residual(&p);
            best_residual = best_residual.min(res);
            if res <= PAULI_RESIDUAL_TOL {
                let norm = norm2(&th);
                if best.as_ref().is_none_or(|(n, _)| norm < *n - 1e-12) {
                    best = Some((norm, angles));
                }
            }
        }
    }
    best.map(|(_, a)| a).ok_or(Error::Solver { best_residual })
}

/// System on qubit 0, ancillae on qubits 1 and 2. The preparation puts
/// label amplitude |xy⟩ on (qubit 1 = y, qubit 2 = x); qubit 2 then
/// controls X and qubit 1 controls Y on the system.
pub fn build_pauli_circuit(angles: &PauliAngles) -> Result<Circuit> {
    if angles.as_array().iter().any(|a| !a.is_finite()) {
        return arg("Pauli angles must be finite");
    }
    let mut c = Circuit::new(3);
    c.extend([
        Gate::ry(1, 2.0 * angles.theta1),
        Gate::ry(2, 2.0 * angles.theta2),
        Gate::cnot(1, 2),
        Gate::z(1),
        Gate::cz(2, 1),
        Gate::ry(1, 2.0 * angles.theta3),
        Gate::cnot(2, 0),
        Gate::cy(1, 0),
    ]);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        amplitude_damping_channel, choi, choi_distance, depolarizing, pauli_channel, pump_xx,
        pump_zz, ChoiMatrix,
    };
    use crate::circuit::{circuit_to_channel, run_exact};
    use crate::qstate::{overlap, Bell, PureState};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn induced(c: &Circuit, system: &[usize]) -> ChoiMatrix {
        let anc = c.num_qubits - system.len();
        circuit_to_channel(c, system, &PureState::basis(anc, 0).unwrap()).unwrap()
    }

    #[test]
    fn pumps_match_kraus_form() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            let zz = induced(&build_pump_zz_circuit(p).unwrap(), &[0, 1]);
            assert!(choi_distance(&zz, &choi(&pump_zz(p).unwrap())).unwrap() < 1e-9);
            let xx = induced(&build_pump_xx_circuit(p).unwrap(), &[0, 1]);
            assert!(choi_distance(&xx, &choi(&pump_xx(p).unwrap())).unwrap() < 1e-9);
            let both = induced(&build_composed_pump_circuit(p).unwrap(), &[0, 1]);
            let expect = pump_xx(p).unwrap().compose(&pump_zz(p).unwrap()).unwrap();
            assert!(choi_distance(&both, &choi(&expect)).unwrap() < 1e-9);
        }
    }

    #[test]
    fn composed_pump_is_shorter() {
        let n = build_composed_pump_circuit(0.5).unwrap().gates.len();
        let m = build_pump_zz_circuit(0.5).unwrap().gates.len()
            + build_pump_xx_circuit(0.5).unwrap().gates.len();
        assert!(n < m);
        assert!(build_pump_zz_circuit(1.2).is_err());
    }

    #[test]
    fn composed_pump_reaches_singlet_from_every_basis_state() {
        let c = build_composed_pump_circuit(1.0).unwrap();
        let mut total = 0.0;
        for idx in 0..4 {
            let sys = PureState::basis(2, idx).unwrap().density();
            let rho = sys.tensor(&PureState::basis(2, 0).unwrap().density());
            let out = run_exact(&c, &rho).unwrap();
            let reduced = crate::qstate::partial_trace(&out, &[0, 1]).unwrap();
            total += overlap(&reduced, &PureState::bell(Bell::PsiMinus)).unwrap() / 4.0;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    fn sigma_x_from_circuit(c: &Circuit) -> f64 {
        let out = run_exact(c, &c.initial_state()).unwrap();
        crate::qstate::partial_trace(&out, &[0])
            .unwrap()
            .bloch_vector()
            .unwrap()[2]
    }

    #[test]
    fn collisional_circuits() {
        let g = PI / 6.0;
        for n in 1..=6u32 {
            let v = sigma_x_from_circuit(&build_collisional_circuit(n, g, true).unwrap());
            assert!(
                (v - (2.0 * f64::from(n) * g).cos()).abs() < 1e-12,
                "n = {n}"
            );
        }
        let v = sigma_x_from_circuit(&build_collisional_circuit(2, g, false).unwrap());
        assert!((v - 0.25).abs() < 1e-12);
        let a = sigma_x_from_circuit(&build_collisional_circuit(1, g, true).unwrap());
        let b = sigma_x_from_circuit(&build_collisional_circuit(1, g, false).unwrap());
        assert!((a - 0.5).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);
        assert!(build_collisional_circuit(0, g, true).is_err());
    }

    #[test]
    fn damping_circuit_matches_channel() {
        for r in [0.2, 100.0] {
            let p = ADParams::from_ratio(r, 1.0).unwrap();
            for k in 0..12 {
                let t = 0.37 * f64::from(k);
                let c = build_amplitude_damping_circuit(t, &p, false, WitnessBasis::ZZ).unwrap();
                let expect = choi(&amplitude_damping_channel(t, &p).unwrap());
                assert!(choi_distance(&induced(&c, &[0]), &expect).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn damping_circuit_at_zero_time_keeps_excitation() {
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        let c = build_amplitude_damping_circuit(0.0, &p, false, WitnessBasis::ZZ).unwrap();
        let out = run_exact(&c, &c.initial_state()).unwrap();
        let sys = crate::qstate::partial_trace(&out, &[0]).unwrap();
        assert!((sys.diagonal()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn witness_circuit_at_zero_time_measures_bell_correlators() {
        let p = ADParams::from_ratio(0.2, 1.0).unwrap();
        // ⟨XX⟩ = 1, ⟨YY⟩ = −1, ⟨ZZ⟩ = 1 on |φ+⟩
        for (basis, expect) in [
            (WitnessBasis::XX, 1.0),
            (WitnessBasis::YY, -1.0),
            (WitnessBasis::ZZ, 1.0),
        ] {
            let c = build_amplitude_damping_circuit(0.0, &p, true, basis).unwrap();
            let out = run_exact(&c, &c.initial_state()).unwrap();
            let two = crate::qstate::partial_trace(&out, &[0, 2]).unwrap();
            let d = two.diagonal();
            let parity = d[0] - d[1] - d[2] + d[3];
            assert!((parity - expect).abs() < 1e-12, "{basis:?}");
        }
    }

    #[test]
    fn depolarizing_angles_round_trip() {
        assert_eq!(depolarizing_angle(0.0).unwrap(), 0.0);
        assert!((depolarizing_angle(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        for k in 0..=20 {
            let p = f64::from(k) / 20.0;
            let back = depolarizing_error_probability(depolarizing_angle(p).unwrap());
            assert!((back - p).abs() < 1e-12);
        }
        assert!(depolarizing_angle(-0.1).is_err());
    }

    #[test]
    fn depolarizing_circuit_matches_channel() {
        for p in [0.0, 0.1, 0.4, 0.75, 1.0] {
            let got = induced(&build_depolarizing_circuit(p).unwrap(), &[0]);
            let expect = choi(&depolarizing(p).unwrap());
            assert!(choi_distance(&got, &expect).unwrap() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn pauli_preparation_realises_the_ancilla_state() {
        let angles = PauliAngles::new(0.3, -1.1, 0.8);
        let mut prep = build_pauli_circuit(&angles).unwrap();
        prep.gates.truncate(6);
        let out = run_exact(&prep, &prep.initial_state()).unwrap();
        // pure state on qubits (1, 2); recover real amplitudes up to global sign
        let anc = crate::qstate::partial_trace(&out, &[1, 2]).unwrap();
        let a = angles.amplitudes();
        for (label, amp) in a.iter().enumerate() {
            let (x, y) = (label >> 1, label & 1);
            let phys = y << 1 | x; // qubit 1 is the high bit
            for (label2, amp2) in a.iter().enumerate() {
                let (x2, y2) = (label2 >> 1, label2 & 1);
                let phys2 = y2 << 1 | x2;
                let m = anc.matrix()[(phys, phys2)];
                assert!((m.re - amp * amp2).abs() < 1e-12 && m.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_circuit_examples() {
        let id = induced(
            &build_pauli_circuit(&PauliAngles::new(0.0, 0.0, 0.0)).unwrap(),
            &[0],
        );
        let expect = choi(&pauli_channel(1.0, 0.0, 0.0, 0.0).unwrap());
        assert!(choi_distance(&id, &expect).unwrap() < 1e-12);
        let z = induced(
            &build_pauli_circuit(&PauliAngles::new(FRAC_PI_2, 0.0, 0.0)).unwrap(),
            &[0],
        );
        let expect = choi(&pauli_channel(0.0, 0.0, 0.0, 1.0).unwrap());
        assert!(choi_distance(&z, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn pauli_circuit_matches_probability_table() {
        let angles = PauliAngles::new(0.4, 1.3, -0.7);
        let [a, b, c, d] = angles.probabilities();
        let got = induced(&build_pauli_circuit(&angles).unwrap(), &[0]);
        let expect = choi(&pauli_channel(a, b, c, d).unwrap());
        assert!(choi_distance(&got, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn solver_examples() {
        let a = solve_pauli_angles(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(a.as_array().iter().all(|x| x.abs() < 1e-9));
        let z = solve_pauli_angles(0.0, 0.0, 0.0, 1.0).unwrap();
        assert!(z.residual(&[0.0, 0.0, 0.0, 1.0]) <= PAULI_RESIDUAL_TOL);
        let p = 0.4;
        let target = [1.0 - 0.75 * p, p / 4.0, p / 4.0, p / 4.0];
        let d = solve_pauli_angles(target[0], target[1], target[2], target[3]).unwrap();
        assert!(d.residual(&target) <= PAULI_RESIDUAL_TOL);
        let got = induced(&build_pauli_circuit(&d).unwrap(), &[0]);
        let expect = choi(&depolarizing(p).unwrap());
        assert!(choi_distance(&got, &expect).unwrap() < 1e-9);
        assert!(solve_pauli_angles(0.5, 0.5, 0.5, -0.5).is_err());
    }

    #[test]
    fn halton_is_low_discrepancy() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() < 1e-15);
    }
}
