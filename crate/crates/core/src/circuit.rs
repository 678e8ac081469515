//! Circuit representation, exact and noisy density-matrix execution,
//! terminal measurement sampling and extraction of the channel a circuit
//! induces on a subset of its qubits.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::ChoiMatrix;
use crate::error::{arg, Error, Result};
use crate::qstate::{
    c, identity, pauli_x, pauli_y, pauli_z, paulis, reduce_matrix, scatter_bits, tensor, CMatrix,
    CVector, DensityMatrix, PureState, I, ONE, ZERO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    RX,
    RY,
    RZ,
    CNOT,
    CY,
    CZ,
    CRY,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CNOT | GateKind::CY | GateKind::CZ | GateKind::CRY => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRY
        )
    }
}

/// A gate on an ordered list of qubits (control first for controlled kinds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Gate {
    fn fixed(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            angle: None,
        }
    }

    fn rotation(kind: GateKind, qubits: Vec<usize>, angle: f64) -> Self {
        Self {
            kind,
            qubits,
            angle: Some(angle),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::fixed(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(GateKind::Z, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::fixed(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::fixed(GateKind::Sdg, vec![q])
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RX, vec![q], angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RY, vec![q], angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::RZ, vec![q], angle)
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CNOT, vec![control, target])
    }
    pub fn cy(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CY, vec![control, target])
    }
    pub fn cz(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CZ, vec![control, target])
    }
    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Self::rotation(GateKind::CRY, vec![control, target], angle)
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.qubits.len() != self.kind.arity() {
            return arg(format!(
                "{:?} expects {} qubit(s), got {}",
                self.kind,
                self.kind.arity(),
                self.qubits.len()
            ));
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= num_qubits) {
            return arg(format!(
                "{:?} addresses qubit {q} of {num_qubits}",
                self.kind
            ));
        }
        if self.qubits.len() == 2 && self.qubits[0] == self.qubits[1] {
            return arg(format!("{:?} control and target coincide", self.kind));
        }
        match (self.kind.is_rotation(), self.angle) {
            (true, Some(a)) if a.is_finite() => Ok(()),
            (true, _) => arg(format!("{:?} needs a finite angle", self.kind)),
            (false, None) => Ok(()),
            (false, Some(_)) => arg(format!("{:?} takes no angle", self.kind)),
        }
    }

    /// Unitary on the gate's own qubits (control is the more significant bit).
    pub fn matrix(&self) -> CMatrix {
        let angle = self.angle.unwrap_or(0.0);
        match self.kind {
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
            }
            GateKind::X => pauli_x(),
            GateKind::Y => pauli_y(),
            GateKind::Z => pauli_z(),
            GateKind::S => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I]),
            GateKind::Sdg => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -I]),
            GateKind::RX => rx(angle),
            GateKind::RY => ry(angle),
            GateKind::RZ => rz(angle),
            GateKind::CNOT => controlled(&pauli_x()),
            GateKind::CY => controlled(&pauli_y()),
            GateKind::CZ => controlled(&pauli_z()),
            GateKind::CRY => controlled(&ry(angle)),
        }
    }
}

fn rx(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)])
}

fn ry(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

fn rz(theta: f64) -> CMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    CMatrix::from_row_slice(2, 2, &[c(co, -s), ZERO, ZERO, c(co, s)])
}

fn controlled(u: &CMatrix) -> CMatrix {
    let mut m = identity(4);
    m.view_mut((2, 2), (2, 2)).copy_from(u);
    m
}

/// Per-qubit preparation label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Prep {
    #[default]
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "+")]
    Plus,
}

impl Prep {
    pub fn state(self) -> PureState {
        match self {
            Prep::Zero => PureState::zero(),
            Prep::One => PureState::one(),
            Prep::Plus => PureState::plus(),
        }
    }
}

/// An ordered gate list over `num_qubits` qubits. `prep` holds optional
/// per-qubit preparation labels (missing entries mean |0⟩).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    #[serde(default)]
    pub prep: Vec<Prep>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            prep: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> &mut Self {
        self.gates.extend(gates);
        self
    }

    pub fn with_prep(mut self, prep: Vec<Prep>) -> Self {
        self.prep = prep;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 {
            return arg("circuit needs at least one qubit");
        }
        if self.prep.len() > self.num_qubits {
            return arg("more preparation labels than qubits");
        }
        self.gates
            .iter()
            .try_for_each(|g| g.validate(self.num_qubits))
    }

    /// Product state described by the preparation labels.
    pub fn initial_state(&self) -> DensityMatrix {
        let factors: Vec<PureState> = (0..self.num_qubits)
            .map(|q| self.prep.get(q).copied().unwrap_or_default().state())
            .collect();
        PureState::product(&factors).density()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Circuit = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    /// Same gates relabelled onto a larger register.
    pub(crate) fn embedded(&self, num_qubits: usize, map: impl Fn(usize) -> usize) -> Circuit {
        Circuit {
            num_qubits,
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    kind: g.kind,
                    qubits: g.qubits.iter().map(|&q| map(q)).collect(),
                    angle: g.angle,
                })
                .collect(),
            prep: Vec::new(),
        }
    }
}

/// Left-multiply `m` by `op` acting on `targets` of an `n`-qubit register.
pub(crate) fn apply_left(m: &mut CMatrix, op: &CMatrix, targets: &[usize], n: usize) {
    let k = targets.len();
    let dk = 1usize << k;
    let offsets: Vec<usize> = (0..dk).map(|j| scatter_bits(j, targets, n)).collect();
    let others: Vec<usize> = (0..n).filter(|q| !targets.contains(q)).collect();
    let bases: Vec<usize> = (0..1usize << others.len())
        .map(|b| scatter_bits(b, &others, n))
        .collect();
    let mut buf = vec![ZERO; dk];
    for col in 0..m.ncols() {
        let mut column = m.column_mut(col);
        for &base in &bases {
            for (j, &off) in offsets.iter().enumerate() {
                buf[j] = column[base | off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (j, b) in buf.iter().enumerate() {
                    acc += op[(r, j)] * b;
                }
                column[base | off] = acc;
            }
        }
    }
}

/// ρ → A ρ A† for Hermitian ρ, with A local to `targets`.
pub(crate) fn conjugate(rho: &CMatrix, op: &CMatrix, targets: &[usize], n: usize) -> CMatrix {
    let mut left = rho.clone();
    apply_left(&mut left, op, targets, n);
    let mut out = left.adjoint();
    apply_left(&mut out, op, targets, n);
    out
}

fn check_dims(circuit: &Circuit, initial: &DensityMatrix) -> Result<()> {
    circuit.validate()?;
    if initial.num_qubits() != circuit.num_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << circuit.num_qubits,
            found: initial.dim(),
        });
    }
    Ok(())
}

fn evolve_exact(circuit: &Circuit, rho: CMatrix) -> CMatrix {
    circuit.gates.iter().fold(rho, |acc, g| {
        conjugate(&acc, &g.matrix(), &g.qubits, circuit.num_qubits)
    })
}

/// Noiseless execution: ρ → UρU† gate by gate.
pub fn run_exact(circuit: &Circuit, initial: &DensityMatrix) -> Result<DensityMatrix> {
    check_dims(circuit, initial)?;
    DensityMatrix::from_numeric(evolve_exact(circuit, initial.matrix().clone()))
}

/// Column-stochastic readout confusion matrix, `0[i][j]` = P(read i | true j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Confusion(pub [[f64; 2]; 2]);

impl Confusion {
    pub const IDEAL: Confusion = Confusion([[1.0, 0.0], [0.0, 1.0]]);

    /// P(read 1 | true 0) = `flip0`, P(read 0 | true 1) = `flip1`.
    pub fn from_flips(flip0: f64, flip1: f64) -> Self {
        Confusion([[1.0 - flip0, flip1], [flip0, 1.0 - flip1]])
    }

    pub fn validate(&self) -> Result<()> {
        let [r0, r1] = self.0;
        for (j, (p0, p1)) in r0.into_iter().zip(r1).enumerate() {
            if p0 < 0.0 || p1 < 0.0 || !(p0 + p1).is_finite() {
                return arg("confusion matrix entries must be finite and nonnegative");
            }
            if (p0 + p1 - 1.0).abs() > 1e-12 {
                return arg(format!("confusion column {j} does not sum to 1"));
            }
        }
        Ok(())
    }

    pub fn p_read_one(&self, true_bit: usize) -> f64 {
        self.0[1][true_bit]
    }
}

/// Gate-level depolarizing noise plus per-qubit readout confusion.
///
/// `readout[k % len]` applies to the k-th measured qubit; an empty list
/// means perfect readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eps1: f64,
    pub eps2: f64,
    #[serde(default)]
    pub readout: Vec<Confusion>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            eps1: 0.001,
            eps2: 0.01,
            readout: vec![Confusion::from_flips(0.02, 0.04)],
        }
    }
}

impl NoiseModel {
    pub fn ideal() -> Self {
        Self {
            eps1: 0.0,
            eps2: 0.0,
            readout: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, e) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(0.0..=1.0).contains(&e) {
                return arg(format!("{name} = {e} outside [0, 1]"));
            }
        }
        self.readout.iter().try_for_each(Confusion::validate)
    }

    /// Confusion matrices for `n` measured qubits.
    pub fn readout_for(&self, n: usize) -> Vec<Confusion> {
        if self.readout.is_empty() {
            return vec![Confusion::IDEAL; n];
        }
        (0..n)
            .map(|k| self.readout[k % self.readout.len()])
            .collect()
    }
}

fn depolarize_one(rho: &CMatrix, p: f64, q: usize, n: usize) -> CMatrix {
    let mut out = rho.scale(1.0 - p);
    for s in &paulis()[1..] {
        out += conjugate(rho, s, &[q], n).scale(p / 4.0);
    }
    // The identity term of the Kraus sum contributes p/4 ρ.
    out + rho.scale(p / 4.0)
}

fn depolarize_two(rho: &CMatrix, p: f64, qubits: &[usize], n: usize) -> CMatrix {
    let ps = paulis();
    let mut out = rho.scale(1.0 - p);
    for a in 0..4 {
        for b in 0..4 {
            if a == 0 && b == 0 {
                continue;
            }
            let op = tensor(&ps[a], &ps[b]);
            out += conjugate(rho, &op, qubits, n).scale(p / 15.0);
        }
    }
    out
}

/// Density-matrix averaged execution with depolarizing noise after every gate.
pub fn run_noisy(
    circuit: &Circuit,
    initial: &DensityMatrix,
    noise: &NoiseModel,
) -> Result<DensityMatrix> {
    check_dims(circuit, initial)?;
    noise.validate()?;
    let n = circuit.num_qubits;
    let mut rho = initial.matrix().clone();
    for g in &circuit.gates {
        rho = conjugate(&rho, &g.matrix(), &g.qubits, n);
        rho = match g.qubits.len() {
            1 if noise.eps1 > 0.0 => depolarize_one(&rho, noise.eps1, g.qubits[0], n),
            2 if noise.eps2 > 0.0 => depolarize_two(&rho, noise.eps2, &g.qubits, n),
            _ => rho,
        };
    }
    DensityMatrix::from_numeric(rho)
}

/// Measurement record: bitstring (qubit 0 leftmost) → occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub table: BTreeMap<String, u64>,
}

impl Counts {
    pub fn new(shots: u64, table: BTreeMap<String, u64>) -> Result<Self> {
        let total: u64 = table.values().sum();
        if total != shots {
            return arg(format!("counts sum to {total}, expected {shots}"));
        }
        if shots == 0 {
            return arg("shots must be positive");
        }
        let width = table.keys().next().map(String::len);
        if table
            .keys()
            .any(|k| Some(k.len()) != width || k.chars().any(|ch| ch != '0' && ch != '1'))
        {
            return arg("bitstrings must be equal-length strings of 0/1");
        }
        Ok(Self { shots, table })
    }

    pub fn num_bits(&self) -> usize {
        self.table.keys().next().map_or(0, String::len)
    }

    pub fn get(&self, bitstring: &str) -> u64 {
        self.table.get(bitstring).copied().unwrap_or(0)
    }

    /// Empirical distribution over the 2ⁿ outcomes indexed by basis index.
    pub fn probabilities(&self, num_bits: usize) -> Vec<f64> {
        let mut p = vec![0.0; 1 << num_bits];
        for (k, &v) in &self.table {
            if let Ok(idx) = usize::from_str_radix(k, 2) {
                if idx < p.len() {
                    p[idx] += v as f64 / self.shots as f64;
                }
            }
        }
        p
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,count\n");
        for (k, v) in &self.table {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut table = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let count: u64 = rec
                .get(1)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Argument("bad count field".into()))?;
            let key = rec.get(0).unwrap_or_default().trim().to_string();
            *table.entry(key).or_insert(0) += count;
        }
        let shots = table.values().sum();
        Self::new(shots, table)
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .table
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect();
        write!(f, "{{{}}} / {}", parts.join(", "), self.shots)
    }
}

pub fn bitstring(index: usize, width: usize) -> String {
    (0..width)
        .map(|pos| {
            if (index >> (width - 1 - pos)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Draw `shots` computational-basis outcomes from diag(ρ), optionally
/// passing each bit through its readout confusion matrix.
pub fn sample_counts(
    rho: &DensityMatrix,
    shots: u64,
    readout: Option<&[Confusion]>,
    seed: u64,
) -> Result<Counts> {
    if shots == 0 {
        return arg("shots must be positive");
    }
    let n = rho.num_qubits();
    if let Some(r) = readout {
        if r.is_empty() {
            return arg("empty readout list");
        }
        r.iter().try_for_each(Confusion::validate)?;
    }
    let probs: Vec<f64> = rho.diagonal().iter().map(|p| p.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let mut idx = cdf.partition_point(|&v| v <= u).min(probs.len() - 1);
        while probs[idx] == 0.0 && idx > 0 {
            idx -= 1;
        }
        if let Some(r) = readout {
            let mut read = 0usize;
            for q in 0..n {
                let bit = (idx >> (n - 1 - q)) & 1;
                let flip_to_one = rng.random::<f64>() < r[q % r.len()].p_read_one(bit);
                read |= usize::from(flip_to_one) << (n - 1 - q);
            }
            idx = read;
        }
        hist[idx] += 1;
    }
    let table = hist
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(i, &v)| (bitstring(i, n), v))
        .collect();
    Counts::new(shots, table)
}

/// Choi matrix of the map a circuit induces on `system_qubits`, with the
/// remaining qubits (in register order) prepared in `ancilla_prep`.
///
/// A reference copy of the system is prepended to the register, the
/// maximally entangled state between reference and system is propagated
/// noiselessly, and the ancillae are traced out. The result is scaled so
/// that its trace equals the system dimension.
pub fn circuit_to_channel(
    circuit: &Circuit,
    system_qubits: &[usize],
    ancilla_prep: &PureState,
) -> Result<ChoiMatrix> {
    circuit.validate()?;
    let n = circuit.num_qubits;
    let k = system_qubits.len();
    if k == 0 {
        return arg("at least one system qubit is required");
    }
    for (i, &q) in system_qubits.iter().enumerate() {
        if q >= n {
            return arg(format!("system qubit {q} out of range"));
        }
        if system_qubits[..i].contains(&q) {
            return arg(format!("system qubit {q} listed twice"));
        }
    }
    let ancillae: Vec<usize> = (0..n).filter(|q| !system_qubits.contains(q)).collect();
    if ancilla_prep.num_qubits() != ancillae.len() {
        return arg(format!(
            "ancilla preparation has {} qubits, circuit has {} ancillae",
            ancilla_prep.num_qubits(),
            ancillae.len()
        ));
    }

    // Register layout: reference qubits 0..k, then the circuit qubits.
    let total = n + k;
    let sys_pos: Vec<usize> = system_qubits.iter().map(|&q| q + k).collect();
    let anc_pos: Vec<usize> = ancillae.iter().map(|&q| q + k).collect();
    let ref_pos: Vec<usize> = (0..k).collect();
    let dk = 1usize << k;
    let norm = 1.0 / (dk as f64).sqrt();
    let mut psi = CVector::zeros(1 << total);
    for i in 0..dk {
        let base = scatter_bits(i, &ref_pos, total) | scatter_bits(i, &sys_pos, total);
        for (a, amp) in ancilla_prep.amplitudes().iter().enumerate() {
            if *amp != ZERO {
                psi[base | scatter_bits(a, &anc_pos, total)] += amp * norm;
            }
        }
    }
    let start = &psi * psi.adjoint();
    let evolved = evolve_exact(&circuit.embedded(total, |q| q + k), start);
    let mut keep = ref_pos;
    keep.extend(&sys_pos);
    let reduced = reduce_matrix(&evolved, total, &keep);
    ChoiMatrix::new(dk, reduced.scale(dk as f64))
}
