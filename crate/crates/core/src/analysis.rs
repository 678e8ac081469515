//! Derived quantities: the entanglement-fidelity witness, amplitude-damping
//! quantum capacity, extractable work, and revival detection on time series.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channels::{choi, ChoiMatrix, KrausChannel};
use crate::error::{arg, Error, Result};
use crate::qstate::{
    mutual_information, partial_trace, pauli_x, pauli_y, pauli_z, tensor, vn_entropy, Bell,
    DensityMatrix, PureState,
};

/// A labelled series `value(t)` on strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: String,
}

impl TimeSeries {
    pub fn new(label: impl Into<String>, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return arg("series times must be strictly increasing");
        }
        Ok(Self {
            times,
            values,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Header of the series CSV format.
pub const CSV_HEADER: &str = "t,value,label";

/// Fixed 15-significant-digit rendering used in every CSV.
pub fn format_value(v: f64) -> String {
    format!("{v:.14e}")
}

/// All series stacked into one `t,value,label` CSV, in the given order.
pub fn series_to_csv(series: &[TimeSeries]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for ts in series {
        for (t, v) in ts.times.iter().zip(&ts.values) {
            let _ = writeln!(s, "{},{},{}", format_value(*t), format_value(*v), ts.label);
        }
    }
    s
}

/// Inverse of [`series_to_csv`]; series come back in order of first
/// appearance.
pub fn series_from_csv(text: &str) -> Result<Vec<TimeSeries>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["t", "value", "label"] {
        return arg(format!("expected header `{CSV_HEADER}`"));
    }
    let mut out: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Argument(format!("bad numeric field in {rec:?}")))
        };
        let (t, v) = (parse(0)?, parse(1)?);
        let label = rec.get(2).unwrap_or_default().to_string();
        match out.iter_mut().find(|(l, _, _)| *l == label) {
            Some((_, ts, vs)) => {
                ts.push(t);
                vs.push(v);
            }
            None => out.push((label, vec![t], vec![v])),
        }
    }
    out.into_iter()
        .map(|(l, t, v)| TimeSeries::new(l, t, v))
        .collect()
}

/// ⟨φ⁺|(𝕀⊗Φ)(|φ⁺⟩⟨φ⁺|)|φ⁺⟩ for a single-qubit map.
///
/// Evaluated both by projection and through the correlators
/// (1 + ⟨XX⟩ − ⟨YY⟩ + ⟨ZZ⟩)/4; the projection is returned.
pub fn witness_f(map: &ChoiMatrix) -> Result<f64> {
    if map.system_dim() != 2 {
        return arg("the witness is defined for single-qubit channels");
    }
    let state = map.matrix().scale(0.5);
    let phi = PureState::bell(Bell::PhiPlus);
    let v = phi.amplitudes();
    let direct = (v.adjoint() * &state * v)[(0, 0)].re;
    let corr = |a, b| (&state * tensor(&a, &b)).trace().re;
    let local = (1.0 + corr(pauli_x(), pauli_x()) - corr(pauli_y(), pauli_y())
        + corr(pauli_z(), pauli_z()))
        / 4.0;
    debug_assert!((direct - local).abs() < 1e-10, "{direct} vs {local}");
    Ok(direct)
}

pub fn witness_f_kraus(channel: &KrausChannel) -> Result<f64> {
    witness_f(&choi(channel))
}

/// Witness from measured correlators on (system, memory).
pub fn witness_from_correlators(xx: f64, yy: f64, zz: f64) -> f64 {
    (1.0 + xx - yy + zz) / 4.0
}

/// −x log₂x − (1−x) log₂(1−x).
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return arg(format!("binary entropy argument {x} outside [0, 1]"));
    }
    let h = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(h(x) + h(1.0 - x))
}

const GOLDEN_TOL: f64 = 1e-10;

fn capacity_objective(eta: f64, p: f64) -> f64 {
    let h = |x: f64| binary_entropy(x.clamp(0.0, 1.0)).unwrap_or(0.0);
    h(eta * p) - h((1.0 - eta) * p)
}

/// Quantum capacity of the amplitude-damping channel with transmissivity
/// η = |c1|²: zero for η ≤ ½, otherwise max_p H₂(ηp) − H₂((1−η)p).
pub fn channel_capacity_ad(eta: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&eta) {
        return arg(format!("transmissivity {eta} outside [0, 1]"));
    }
    let eta = eta.clamp(0.0, 1.0);
    if eta <= 0.5 {
        return Ok(0.0);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (capacity_objective(eta, c), capacity_objective(eta, d));
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = capacity_objective(eta, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = capacity_objective(eta, d);
        }
    }
    let best = [a, 0.5 * (a + b), b, 1.0]
        .into_iter()
        .map(|p| capacity_objective(eta, p))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best.clamp(0.0, 1.0))
}

/// Transmissivity estimated from measured excited populations, as the ratio
/// of the population at t to that at t = 0.
pub fn transmissivity_from_populations(excited_t: f64, excited_0: f64) -> Result<f64> {
    if excited_0.is_nan() || excited_0 <= 0.0 {
        return arg("initial excited population must be positive");
    }
    Ok((excited_t / excited_0).clamp(0.0, 1.0))
}

/// Extractable work in units of kT ln 2: 1 − S(ρ_S) + I(S:M), with S on
/// qubit 0 and the memory M on qubit 1.
pub fn work_bits(rho_sm: &DensityMatrix) -> Result<f64> {
    if rho_sm.num_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho_sm.dim(),
        });
    }
    let s = vn_entropy(&partial_trace(rho_sm, &[0])?);
    Ok(1.0 - s + mutual_information(rho_sm, &[0])?)
}

pub fn extractable_work(rho_sm: &DensityMatrix, kt: f64) -> Result<f64> {
    Ok(work_bits(rho_sm)? * kt * std::f64::consts::LN_2)
}

/// A rise of the series after it has already decreased.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Revival {
    /// Index i with value[i+1] > value[i] + tol.
    pub index: usize,
    pub rise: f64,
}

pub fn detect_revivals(series: &TimeSeries, tol: f64) -> Result<Vec<Revival>> {
    let v = &series.values;
    if v.len() < 3 {
        return arg("revival detection needs at least three points");
    }
    let mut decreased = false;
    let mut out = Vec::new();
    for i in 0..v.len() - 1 {
        let step = v[i + 1] - v[i];
        if decreased && step > tol {
            out.push(Revival {
                index: i,
                rise: step,
            });
        }
        if step < 0.0 {
            decreased = true;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{amplitude_damping_channel, c1, depolarizing, ADParams};
    use crate::qstate::DensityMatrix;

    #[test]
    fn witness_examples() {
        let id = KrausChannel::identity(2).unwrap();
        assert!((witness_f_kraus(&id).unwrap() - 1.0).abs() < 1e-15);
        assert!((witness_f_kraus(&depolarizing(1.0).unwrap()).unwrap() - 0.25).abs() < 1e-15);
        let two = choi(&KrausChannel::identity(4).unwrap());
        assert!(witness_f(&two).is_err());
    }

    #[test]
    fn witness_matches_correlators() {
        assert_eq!(witness_from_correlators(1.0, -1.0, 1.0), 1.0);
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        let ch = amplitude_damping_channel(0.3, &p).unwrap();
        let c = c1(0.3, &p).unwrap();
        // XX = −YY = c1, ZZ = c1² for damping of |φ+⟩ memory-system pair
        let expect = witness_from_correlators(c, -c, c * c);
        assert!((witness_f_kraus(&ch).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
    }

    fn grid_capacity(eta: f64, points: usize) -> f64 {
        (0..=points)
            .map(|k| capacity_objective(eta, k as f64 / points as f64))
            .fold(0.0, f64::max)
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(channel_capacity_ad(0.5).unwrap(), 0.0);
        assert_eq!(channel_capacity_ad(0.2).unwrap(), 0.0);
        assert!((channel_capacity_ad(1.0).unwrap() - 1.0).abs() < 1e-15);
        let q = channel_capacity_ad(0.75).unwrap();
        assert!((q - grid_capacity(0.75, 1_000_000)).abs() < 1e-8);
        assert!(channel_capacity_ad(1.1).is_err());
    }

    #[test]
    fn capacity_is_monotone_in_transmissivity() {
        let mut prev = 0.0;
        for k in 500..=1000 {
            let q = channel_capacity_ad(f64::from(k) / 1000.0).unwrap();
            assert!(q >= prev - 1e-9);
            prev = q;
        }
    }

    #[test]
    fn work_examples() {
        let bell = PureState::bell(Bell::PhiPlus).density();
        assert!((work_bits(&bell).unwrap() - 2.0).abs() < 1e-10);
        let prod = DensityMatrix::maximally_mixed(1).tensor(&PureState::zero().density());
        assert!(work_bits(&prod).unwrap().abs() < 1e-12);
        assert!(
            (extractable_work(&bell, 2.0).unwrap() - 4.0 * std::f64::consts::LN_2).abs() < 1e-10
        );
        let pure = PureState::zero()
            .density()
            .tensor(&PureState::zero().density());
        assert!((work_bits(&pure).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn revival_examples() {
        let down = TimeSeries::new("d", vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.1]).unwrap();
        assert!(detect_revivals(&down, 1e-6).unwrap().is_empty());
        let bump = TimeSeries::new("b", vec![0.0, 1.0, 2.0], vec![1.0, 0.2, 0.6]).unwrap();
        let r = detect_revivals(&bump, 0.01).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].index, 1);
        assert!((r[0].rise - 0.4).abs() < 1e-15);
        let short = TimeSeries::new("s", vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert!(detect_revivals(&short, 0.0).is_err());
    }

    #[test]
    fn damping_witness_revives_only_at_strong_coupling() {
        let grid: Vec<f64> = (0..=300).map(|k| 0.02 * f64::from(k)).collect();
        for (r, revives) in [(0.2, false), (100.0, true)] {
            let p = ADParams::from_ratio(r, 1.0).unwrap();
            let w: Vec<f64> = grid
                .iter()
                .map(|&t| witness_f_kraus(&amplitude_damping_channel(t, &p).unwrap()).unwrap())
                .collect();
            let ts = TimeSeries::new("f", grid.clone(), w).unwrap();
            assert_eq!(
                !detect_revivals(&ts, 1e-6).unwrap().is_empty(),
                revives,
                "R = {r}"
            );
        }
    }

    #[test]
    fn csv_round_trip() {
        let a = TimeSeries::new(
            "pop",
            vec![0.0, 0.1, 1.0 / 3.0],
            vec![1.0, -2.5e-7, 0.123_456_789_012_345],
        )
        .unwrap();
        let b = TimeSeries::new("witness", vec![0.0], vec![0.25]).unwrap();
        let text = series_to_csv(&[a.clone(), b.clone()]);
        assert!(text.starts_with("t,value,label\n"));
        let back = series_from_csv(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(series_to_csv(&back), text);
        assert_eq!(back[1], b);
        assert!(series_from_csv("a,b\n1,2\n").is_err());
    }
}
