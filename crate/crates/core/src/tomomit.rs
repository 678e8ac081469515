//! Readout calibration, constrained readout mitigation and Pauli-basis
//! state tomography with a maximum-likelihood projection.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuit::{
    bitstring, run_noisy, sample_counts, Circuit, Confusion, Counts, Gate, NoiseModel,
};
use crate::error::{arg, Error, Result};
use crate::qstate::{
    hermitian_eigen, hermitian_part, partial_trace, paulis, tensor_all, CMatrix, DensityMatrix, C64,
};

/// Readout response `A[i][j] = P(read i | prepared j)` over n-bit strings.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationMatrix {
    n_qubits: usize,
    matrix: DMatrix<f64>,
}

impl CalibrationMatrix {
    pub fn new(n_qubits: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let d = 1usize << n_qubits;
        if matrix.shape() != (d, d) {
            return arg(format!(
                "calibration matrix must be {d}x{d}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if matrix.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return arg("calibration entries must be finite and nonnegative");
        }
        for (j, col) in matrix.column_iter().enumerate() {
            let s: f64 = col.sum();
            if (s - 1.0).abs() > 1e-10 {
                return arg(format!("calibration column {j} sums to {s}"));
            }
        }
        Ok(Self { n_qubits, matrix })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self {
            n_qubits,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Infinite-shot calibration of independent per-qubit confusions
    /// (qubit 0 is the most significant factor).
    pub fn exact(readout: &[Confusion]) -> Result<Self> {
        if readout.is_empty() {
            return arg("at least one qubit is required");
        }
        readout.iter().try_for_each(Confusion::validate)?;
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for c in readout {
            let f = DMatrix::from_fn(2, 2, |i, j| c.0[i][j]);
            m = m.kronecker(&f);
        }
        Self::new(readout.len(), m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Dense CSV, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in self.matrix.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(text.as_bytes());
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Argument(format!("bad calibration entry {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let d = rows.len();
        if d == 0 || !d.is_power_of_two() || rows.iter().any(|r| r.len() != d) {
            return arg("calibration CSV must be a square 2ⁿ×2ⁿ table");
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::new(
            d.trailing_zeros() as usize,
            DMatrix::from_row_slice(d, d, &flat),
        )
    }
}

/// splitmix64 finaliser, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Empirical calibration: prepare every basis state with X gates (subject
/// to gate noise), then sample through the readout model.
pub fn measure_calibration(
    noise: &NoiseModel,
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<CalibrationMatrix> {
    if shots == 0 {
        return arg("shots must be positive");
    }
    if n_qubits == 0 {
        return arg("at least one qubit is required");
    }
    noise.validate()?;
    let d = 1usize << n_qubits;
    let readout = noise.readout_for(n_qubits);
    let ground = DensityMatrix::basis(n_qubits, 0)?;
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut prep = Circuit::new(n_qubits);
        for q in 0..n_qubits {
            if (j >> (n_qubits - 1 - q)) & 1 == 1 {
                prep.push(Gate::x(q));
            }
        }
        let rho = run_noisy(&prep, &ground, noise)?;
        let counts = sample_counts(&rho, shots, Some(&readout), mix_seed(seed, j as u64))?;
        for (i, p) in counts.probabilities(n_qubits).into_iter().enumerate() {
            m[(i, j)] = p;
        }
    }
    CalibrationMatrix::new(n_qubits, m)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut shift = 0.0;
    for (k, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            shift = t;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mitigated {
    pub probabilities: Vec<f64>,
    /// ‖A x − y‖₂ at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

const PGD_MAX_ITERS: usize = 100_000;
const PGD_TOL: f64 = 1e-12;

/// Simplex-constrained least squares `min ‖A x − y‖₂`, x ≥ 0, Σx = 1.
pub fn mitigate_distribution(y: &[f64], cal: &CalibrationMatrix) -> Result<Mitigated> {
    let a = &cal.matrix;
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: y.len(),
        });
    }
    let yv = DVector::from_column_slice(y);
    let sigma = a.clone().singular_values().max();
    let step = 1.0 / (sigma * sigma);
    let ata = a.transpose() * a;
    let aty = a.transpose() * &yv;
    let mut x = DVector::from_vec(project_simplex(y));
    let mut converged = false;
    let mut iterations = 0;
    while iterations < PGD_MAX_ITERS {
        iterations += 1;
        let grad = &ata * &x - &aty;
        let cand: Vec<f64> = (&x - grad * step).iter().copied().collect();
        let next = DVector::from_vec(project_simplex(&cand));
        let change = (&next - &x).amax();
        x = next;
        if change < PGD_TOL {
            converged = true;
            break;
        }
    }
    let residual = (a * &x - yv).norm();
    Ok(Mitigated {
        probabilities: x.iter().copied().collect(),
        residual,
        iterations,
        converged,
    })
}

pub fn mitigate_counts(counts: &Counts, cal: &CalibrationMatrix) -> Result<Mitigated> {
    let width = counts.num_bits();
    if width != cal.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: cal.n_qubits,
            found: width,
        });
    }
    mitigate_distribution(&counts.probabilities(width), cal)
}

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Index into [`paulis`] (I, X, Y, Z).
    fn pauli_index(self) -> usize {
        match self {
            Basis::X => 1,
            Basis::Y => 2,
            Basis::Z => 3,
        }
    }

    /// Gates mapping this basis onto Z (outcome 0 ↔ eigenvalue +1).
    pub fn rotation(self, q: usize) -> Vec<Gate> {
        match self {
            Basis::X => vec![Gate::h(q)],
            Basis::Y => vec![Gate::sdg(q), Gate::h(q)],
            Basis::Z => Vec::new(),
        }
    }
}

/// All 3ⁿ settings, first qubit varying slowest.
pub fn all_settings(n: usize) -> Vec<Vec<Basis>> {
    (0..3usize.pow(n as u32))
        .map(|mut k| {
            let mut s = vec![Basis::Z; n];
            for slot in s.iter_mut().rev() {
                *slot = Basis::ALL[k % 3];
                k /= 3;
            }
            s
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyRecord {
    pub bases: Vec<Basis>,
    pub counts: Counts,
}

/// Rotate `qubits` of `state` into `bases` (rotation gates see the
/// single-qubit gate noise), discard the rest, and sample with readout error.
pub fn measure_in_bases(
    state: &DensityMatrix,
    qubits: &[usize],
    bases: &[Basis],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Counts> {
    if qubits.len() != bases.len() {
        return arg("one basis per measured qubit is required");
    }
    let mut rot = Circuit::new(state.num_qubits());
    for (&q, b) in qubits.iter().zip(bases) {
        rot.extend(b.rotation(q));
    }
    let rotated = run_noisy(&rot, state, noise)?;
    let reduced =
        if qubits.len() == state.num_qubits() && qubits.iter().enumerate().all(|(i, &q)| i == q) {
            rotated
        } else {
            reorder_reduced(&rotated, qubits)?
        };
    let readout = noise.readout_for(qubits.len());
    sample_counts(&reduced, shots, Some(&readout), seed)
}

/// Reduced state on `qubits`, in the listed order.
fn reorder_reduced(state: &DensityMatrix, qubits: &[usize]) -> Result<DensityMatrix> {
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qubits.len() {
        return arg("measured qubits must be distinct");
    }
    let reduced = partial_trace(state, &sorted)?;
    if sorted == qubits {
        return Ok(reduced);
    }
    let k = qubits.len();
    let d = 1usize << k;
    // position of each requested qubit inside the sorted reduced register
    let pos: Vec<usize> = qubits
        .iter()
        .map(|q| sorted.iter().position(|s| s == q).unwrap_or(0))
        .collect();
    let remap = |i: usize| {
        (0..k).fold(0usize, |acc, j| {
            let bit = (i >> (k - 1 - j)) & 1;
            acc | bit << (k - 1 - pos[j])
        })
    };
    let m = reduced.matrix();
    DensityMatrix::from_numeric(CMatrix::from_fn(d, d, |i, j| m[(remap(i), remap(j))]))
}

/// Full 3ⁿ-setting tomography data for `qubits` of `state`.
pub fn tomography_records(
    state: &DensityMatrix,
    qubits: &[usize],
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Vec<TomographyRecord>> {
    all_settings(qubits.len())
        .into_iter()
        .enumerate()
        .map(|(k, bases)| {
            let counts = measure_in_bases(
                state,
                qubits,
                &bases,
                noise,
                shots,
                mix_seed(seed, k as u64),
            )?;
            Ok(TomographyRecord { bases, counts })
        })
        .collect()
}

/// Linear-inversion estimate `(1/2ⁿ) Σ_s ⟨σ_s⟩ σ_s`, each Pauli string
/// averaged over every setting that measures it. With a calibration, each
/// setting's distribution is mitigated first.
pub fn linear_inversion(
    records: &[TomographyRecord],
    cal: Option<&CalibrationMatrix>,
) -> Result<CMatrix> {
    let n = records
        .first()
        .map(|r| r.bases.len())
        .ok_or_else(|| Error::Argument("no tomography records".into()))?;
    if n == 0 || records.iter().any(|r| r.bases.len() != n) {
        return arg("records must all cover the same nonzero number of qubits");
    }
    for s in all_settings(n) {
        if !records.iter().any(|r| r.bases == s) {
            return arg(format!("missing measurement setting {s:?}"));
        }
    }
    let dists = records
        .iter()
        .map(|r| {
            if r.counts.num_bits() != n {
                return arg("counts width does not match the basis setting");
            }
            match cal {
                Some(c) => Ok(mitigate_counts(&r.counts, c)?.probabilities),
                None => Ok(r.counts.probabilities(n)),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let d = 1usize << n;
    let ps = paulis();
    let mut rho = CMatrix::zeros(d, d);
    for string in 0..4usize.pow(n as u32) {
        // digits: 0 = I, 1 = X, 2 = Y, 3 = Z; first qubit most significant
        let digits: Vec<usize> = (0..n)
            .map(|j| string / 4usize.pow((n - 1 - j) as u32) % 4)
            .collect();
        let expectation = if string == 0 {
            1.0
        } else {
            let mut total = 0.0;
            let mut hits = 0usize;
            for (rec, dist) in records.iter().zip(&dists) {
                let matches = digits
                    .iter()
                    .zip(&rec.bases)
                    .all(|(&dg, b)| dg == 0 || dg == b.pauli_index());
                if !matches {
                    continue;
                }
                hits += 1;
                total += dist
                    .iter()
                    .enumerate()
                    .map(|(x, p)| {
                        let parity = (0..n)
                            .filter(|&j| digits[j] != 0 && (x >> (n - 1 - j)) & 1 == 1)
                            .count();
                        if parity % 2 == 0 {
                            *p
                        } else {
                            -*p
                        }
                    })
                    .sum::<f64>();
            }
            total / hits as f64
        };
        let op = tensor_all(&digits.iter().map(|&k| ps[k].clone()).collect::<Vec<_>>());
        rho += op * C64::new(expectation / d as f64, 0.0);
    }
    Ok(rho)
}

/// Closest unit-trace PSD matrix in 2-norm: negative eigenvalues are
/// zeroed from the bottom up, their weight spread evenly over the rest.
pub fn mle_project(m: &CMatrix) -> Result<DensityMatrix> {
    if m.nrows() != m.ncols() || m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return arg("matrix must be square and finite");
    }
    let h = hermitian_part(m);
    let tr = h.trace().re;
    if tr.abs() < 1e-300 {
        return arg("matrix has zero trace");
    }
    let (vals, vecs) = hermitian_eigen(&h.unscale(tr));
    // descending order
    let mut mu: Vec<f64> = vals.iter().rev().copied().collect();
    let d = mu.len();
    let mut i = d;
    let mut spill = 0.0;
    while i > 0 && mu[i - 1] + spill / (i as f64) < 0.0 {
        spill += mu[i - 1];
        mu[i - 1] = 0.0;
        i -= 1;
    }
    for v in mu.iter_mut().take(i) {
        *v += spill / i as f64;
    }
    let mut out = CMatrix::zeros(d, d);
    for (k, &lam) in mu.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let col = vecs.column(d - 1 - k);
        out += col * col.adjoint() * C64::new(lam, 0.0);
    }
    DensityMatrix::from_numeric(out)
}

/// Linear inversion followed by the maximum-likelihood projection.
pub fn tomography(
    records: &[TomographyRecord],
    cal: Option<&CalibrationMatrix>,
) -> Result<DensityMatrix> {
    mle_project(&linear_inversion(records, cal)?)
}

/// Records as CSV rows `setting,bitstring,count`.
pub fn records_to_csv(records: &[TomographyRecord]) -> String {
    let mut s = String::from("setting,bitstring,count\n");
    for r in records {
        let label: String = r
            .bases
            .iter()
            .map(|b| match b {
                Basis::X => 'X',
                Basis::Y => 'Y',
                Basis::Z => 'Z',
            })
            .collect();
        for (k, v) in &r.counts.table {
            let _ = writeln!(s, "{label},{k},{v}");
        }
    }
    s
}

/// Exact outcome distribution for a setting, used by infinite-shot tests.
pub fn exact_distribution(state: &DensityMatrix, bases: &[Basis]) -> Result<Vec<f64>> {
    let n = state.num_qubits();
    if bases.len() != n {
        return arg("one basis per qubit is required");
    }
    let mut rot = Circuit::new(n);
    for (q, b) in bases.iter().enumerate() {
        rot.extend(b.rotation(q));
    }
    Ok(run_noisy(&rot, state, &NoiseModel::ideal())?.diagonal())
}

/// Counts whose frequencies are the given distribution scaled to `shots`
/// (rounded); convenient for building synthetic records.
pub fn counts_from_distribution(p: &[f64], shots: u64) -> Result<Counts> {
    let n = p.len().trailing_zeros() as usize;
    if !p.len().is_power_of_two() {
        return arg("distribution length must be a power of two");
    }
    let mut table = std::collections::BTreeMap::new();
    let mut assigned = 0u64;
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    for &i in &order {
        let c = (p[i].max(0.0) * shots as f64).round() as u64;
        if c > 0 {
            table.insert(bitstring(i, n), c);
            assigned += c;
        }
    }
    // absorb rounding into the most likely outcome
    let top = bitstring(order[0], n);
    let entry = table.entry(top).or_insert(0);
    if assigned > shots {
        *entry -= assigned - shots;
    } else {
        *entry += shots - assigned;
    }
    table.retain(|_, v| *v > 0);
    Counts::new(shots, table)
}
