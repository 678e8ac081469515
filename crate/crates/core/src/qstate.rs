//! Dense complex linear algebra and quantum-state primitives.
//!
//! Qubit ordering is fixed across the crate: qubit 0 is the most significant
//! bit of a computational-basis index, so `tensor(a, b)` places `a` on qubit 0.
//! All logarithms are base 2.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{arg, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Hermiticity tolerance (max elementwise |M - M†|).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// The four single-qubit Paulis in the order 𝕀, σx, σy, σz.
pub fn paulis() -> [CMatrix; 4] {
    [identity(2), pauli_x(), pauli_y(), pauli_z()]
}

/// Lowering operator |0⟩⟨1| (|1⟩ is the excited state).
pub fn sigma_minus() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO])
}

pub fn sigma_plus() -> CMatrix {
    sigma_minus().adjoint()
}

/// Kronecker product; `a` acts on the more significant qubits.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all(factors: &[CMatrix]) -> CMatrix {
    factors.iter().fold(identity(1), |acc, f| acc.kronecker(f))
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return arg(format!("dimension {dim} is not a power of two"));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted
/// ascending and the columns of the returned matrix are the eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_map(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&v| c(f(v), 0.0)),
    ));
    &vecs * d * vecs.adjoint()
}

/// A valid density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validate `matrix` against the density-matrix invariants.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::check(&matrix)?;
        Ok(Self { matrix })
    }

    fn check(m: &CMatrix) -> Result<()> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        qubits_for_dim(m.nrows())?;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = max_abs(&(m - m.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = hermitian_eigenvalues(m)[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Symmetrize `m` before validation, absorbing round-off in the
    /// anti-Hermitian part left over by long gate sequences.
    pub(crate) fn from_numeric(m: CMatrix) -> Result<Self> {
        Self::new(hermitian_part(&m))
    }

    /// Wrap the output of an approximate propagator. The trace must hold to
    /// `trace_tol`; round-off below that is removed by renormalizing, and
    /// eigenvalues pushed slightly negative are clipped to zero.
    pub(crate) fn from_approximate(m: CMatrix, trace_tol: f64) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let mut h = hermitian_part(&m);
        let tr = h.trace().re;
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::InvalidState(format!("trace drifted to {tr}")));
        }
        h.unscale_mut(tr);
        if hermitian_eigenvalues(&h)[0] < -PSD_TOL {
            h = hermitian_map(&h, |v| v.max(0.0));
            let tr = h.trace().re;
            h.unscale_mut(tr);
        }
        Self::from_numeric(h)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = &psi.amplitudes;
        Self {
            matrix: v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        Self {
            matrix: identity(d).scale(1.0 / d as f64),
        }
    }

    /// Projector onto computational-basis state `index`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(num_qubits, index)?))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    /// Real part of Tr(ρ O).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        (&self.matrix * op).trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Populations of the computational basis states.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of a single-qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        Ok([
            self.expectation(&pauli_x()),
            self.expectation(&pauli_y()),
            self.expectation(&pauli_z()),
        ])
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi+",
            Bell::PhiMinus => "phi-",
            Bell::PsiPlus => "psi+",
            Bell::PsiMinus => "psi-",
        }
    }
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        qubits_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return arg("cannot normalize a zero or non-finite vector");
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let d = 1usize << num_qubits;
        if index >= d {
            return arg(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            ));
        }
        let mut v = CVector::zeros(d);
        v[index] = ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn zero() -> Self {
        Self::basis(1, 0).expect("valid index")
    }

    pub fn one() -> Self {
        Self::basis(1, 1).expect("valid index")
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amplitudes: CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]),
        }
    }

    pub fn bell(kind: Bell) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match kind {
            Bell::PhiPlus => [h, 0.0, 0.0, h],
            Bell::PhiMinus => [h, 0.0, 0.0, -h],
            Bell::PsiPlus => [0.0, h, h, 0.0],
            Bell::PsiMinus => [0.0, h, -h, 0.0],
        };
        Self {
            amplitudes: CVector::from_iterator(4, amps.iter().map(|&a| c(a, 0.0))),
        }
    }

    /// (|0…0⟩ + |1…1⟩)/√2 on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        if n == 0 {
            return arg("GHZ state needs at least one qubit");
        }
        let d = 1usize << n;
        let mut v = CVector::zeros(d);
        v[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        v[d - 1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn product(factors: &[PureState]) -> Self {
        let amplitudes = factors
            .iter()
            .fold(CVector::from_element(1, ONE), |acc, f| {
                acc.kronecker(&f.amplitudes)
            });
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

fn check_qubit_list(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (k, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return arg(format!(
                "qubit index {q} out of range for {num_qubits} qubits"
            ));
        }
        if qubits[..k].contains(&q) {
            return arg(format!("qubit index {q} repeated"));
        }
    }
    Ok(())
}

/// Basis index on `n` qubits whose bits at positions `qubits` (in order,
/// first = most significant of `value`) are taken from `value`.
#[inline]
pub(crate) fn scatter_bits(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    let mut out = 0;
    for (pos, &q) in qubits.iter().enumerate() {
        let bit = (value >> (k - 1 - pos)) & 1;
        out |= bit << (n - 1 - q);
    }
    out
}

/// Reduce a 2ⁿ×2ⁿ operator to the qubits in `keep`, in the order given.
pub(crate) fn reduce_matrix(m: &CMatrix, num_qubits: usize, keep: &[usize]) -> CMatrix {
    let traced: Vec<usize> = (0..num_qubits).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let de = 1usize << traced.len();
    let env_offsets: Vec<usize> = (0..de)
        .map(|e| scatter_bits(e, &traced, num_qubits))
        .collect();
    let keep_offsets: Vec<usize> = (0..dk).map(|i| scatter_bits(i, keep, num_qubits)).collect();
    CMatrix::from_fn(dk, dk, |i, j| {
        let (bi, bj) = (keep_offsets[i], keep_offsets[j]);
        env_offsets.iter().map(|&e| m[(bi | e, bj | e)]).sum()
    })
}

/// Partial trace keeping the listed qubits; the result orders them as in the
/// original register regardless of the order of `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if keep.is_empty() {
        return arg("partial trace needs at least one kept qubit");
    }
    check_qubit_list(keep, n)?;
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    DensityMatrix::from_numeric(reduce_matrix(rho.matrix(), n, &sorted))
}

/// ⟨ψ|ρ|ψ⟩.
pub fn overlap(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: psi.dim(),
        });
    }
    let v = psi.amplitudes();
    let val = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    Ok(val.clamp(0.0, 1.0))
}

/// Shannon entropy in bits of a list of eigenvalues, clamped to [0, 1].
pub(crate) fn spectral_entropy(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn vn_entropy(rho: &DensityMatrix) -> f64 {
    spectral_entropy(&hermitian_eigenvalues(rho.matrix()))
}

/// S(A) + S(B) - S(AB) where A is `subsystem` and B the remaining qubits.
pub fn mutual_information(rho: &DensityMatrix, subsystem: &[usize]) -> Result<f64> {
    let n = rho.num_qubits();
    check_qubit_list(subsystem, n)?;
    let rest: Vec<usize> = (0..n).filter(|q| !subsystem.contains(q)).collect();
    if subsystem.is_empty() || rest.is_empty() {
        return arg("mutual information needs a proper bipartition");
    }
    let sa = vn_entropy(&partial_trace(rho, subsystem)?);
    let sb = vn_entropy(&partial_trace(rho, &rest)?);
    let i = sa + sb - vn_entropy(rho);
    Ok(if i.abs() < 1e-10 { 0.0 } else { i })
}

/// ½‖a − b‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(trace_norm_hermitian(&(a.matrix() - b.matrix())) / 2.0)
}

pub(crate) fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

/// Uhlmann fidelity (Tr√(√a b √a))².
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let sqrt_a = hermitian_map(a.matrix(), |v| v.max(0.0).sqrt());
    let inner = &sqrt_a * b.matrix() * &sqrt_a;
    let root_trace: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && max_abs(&(a - b)) <= tol
    }

    fn real_diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| c(v, 0.0)),
        ))
    }

    #[test]
    fn tensor_identity_and_zz() {
        assert!(approx_eq(
            &tensor(&identity(2), &identity(2)),
            &identity(4),
            0.0
        ));
        let zz = tensor(&pauli_z(), &pauli_z());
        assert!(approx_eq(&zz, &real_diag(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn tensor_matches_elementwise_definition() {
        let (a, b) = (pauli_x(), pauli_z());
        let k = tensor(&a, &b);
        for r in 0..4 {
            for col in 0..4 {
                let expected = a[(r / 2, col / 2)] * b[(r % 2, col % 2)];
                assert_eq!(k[(r, col)], expected);
            }
        }
        // antidiagonal blocks with entries 1, -1, 1, -1
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
        assert_eq!(k[(2, 0)], ONE);
        assert_eq!(k[(3, 1)], -ONE);
    }

    #[test]
    fn partial_trace_of_bell_is_mixed() {
        let rho = PureState::bell(Bell::PhiPlus).density();
        let red = partial_trace(&rho, &[0]).unwrap();
        assert!(approx_eq(red.matrix(), &identity(2).scale(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_of_ghz_leaves_classical_correlation() {
        let rho = PureState::ghz(3).unwrap().density();
        let red = partial_trace(&rho, &[0, 1]).unwrap();
        assert!(approx_eq(
            red.matrix(),
            &real_diag(&[0.5, 0.0, 0.0, 0.5]),
            1e-15
        ));
    }

    #[test]
    fn partial_trace_keeps_register_order() {
        let a = PureState::zero().density();
        let b = PureState::one().density();
        let ab = a.tensor(&b);
        let red = partial_trace(&ab, &[1, 0]).unwrap();
        assert!(approx_eq(red.matrix(), ab.matrix(), 0.0));
        let second = partial_trace(&ab, &[1]).unwrap();
        assert!(approx_eq(second.matrix(), b.matrix(), 0.0));
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(partial_trace(&rho, &[2]), Err(Error::Argument(_))));
        assert!(matches!(
            partial_trace(&rho, &[0, 0]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn overlap_examples() {
        let psi_m = PureState::bell(Bell::PsiMinus);
        assert!((overlap(&psi_m.density(), &psi_m).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        for b in Bell::ALL {
            assert!((overlap(&mixed, &PureState::bell(b)).unwrap() - 0.25).abs() < 1e-15);
        }
        let half = DensityMatrix::new(
            (PureState::bell(Bell::PsiPlus).density().into_matrix()
                + PureState::bell(Bell::PsiMinus).density().into_matrix())
            .scale(0.5),
        )
        .unwrap();
        assert!((overlap(&half, &psi_m).unwrap() - 0.5).abs() < 1e-15);
        assert!(overlap(&half, &PureState::zero()).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert!(vn_entropy(&PureState::plus().density()).abs() < 1e-12);
        assert!((vn_entropy(&DensityMatrix::maximally_mixed(1)) - 1.0).abs() < 1e-12);
        let rho = DensityMatrix::new(real_diag(&[0.75, 0.25])).unwrap();
        let h = -0.25f64 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!((vn_entropy(&rho) - h).abs() < 1e-12);
        assert!((h - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn mutual_information_examples() {
        let bell = PureState::bell(Bell::PhiPlus).density();
        assert!((mutual_information(&bell, &[0]).unwrap() - 2.0).abs() < 1e-10);
        let prod = PureState::plus()
            .density()
            .tensor(&DensityMatrix::maximally_mixed(1));
        assert_eq!(mutual_information(&prod, &[0]).unwrap(), 0.0);
        let classical = DensityMatrix::new(real_diag(&[0.5, 0.0, 0.0, 0.5])).unwrap();
        assert!((mutual_information(&classical, &[0]).unwrap() - 1.0).abs() < 1e-10);
        assert!(mutual_information(&bell, &[0, 1]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::zero().density();
        let one = PureState::one().density();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(1);
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_of_pure_states_is_squared_overlap() {
        let plus = PureState::plus().density();
        let zero = PureState::zero().density();
        assert!((fidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-10);
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn density_validation_rejects_invalid() {
        assert!(DensityMatrix::new(real_diag(&[1.2, -0.2])).is_err());
        assert!(DensityMatrix::new(real_diag(&[0.6, 0.6])).is_err());
        let mut m = real_diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(real_diag(&[0.5, 0.25, 0.25])).is_err());
    }
}
