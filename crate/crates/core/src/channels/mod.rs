//! Analytic CPTP channels in Kraus and Choi form, the time-local master
//! equation integrator, and CP/P-divisibility diagnostics.
//!
//! Choi convention: `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` (input factor first), so
//! `Tr J = d` and tracing out the output factor gives the identity for a
//! trace-preserving map. Superoperators use column-stacking,
//! `vec(ρ)[i + d·j] = ρ[i, j]`.

mod damping;
mod divisibility;
mod maps;
mod master;
mod pauli_rates;

pub use damping::{amplitude_damping_channel, c1, c1_complex, c1_dot_complex, gamma_ad, ADParams};
pub use divisibility::{
    cp_divisibility_scan, p_divisibility_scan_pauli, Divisibility, IntervalReport, COND_LIMIT,
};
pub use maps::{
    collisional_correlated, collisional_separable, dephasing, depolarizing, pauli_channel, pump_xx,
    pump_zz, unitary_channel,
};
pub use master::{integrate_master_equation, Generator, JumpTerm};
pub use pauli_rates::{
    pauli_eigenvalues, pauli_rates_to_probabilities, probabilities_from_eigenvalues, PauliRates,
    Rate,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::conjugate;
use crate::error::{arg, Error, Result};
use crate::qstate::{
    hermitian_eigenvalues, identity, max_abs, qubits_for_dim, trace_norm_hermitian, CMatrix,
    DensityMatrix, C64, ZERO,
};

/// Completeness tolerance for Kraus lists.
pub const KRAUS_TOL: f64 = 1e-10;

/// A channel in operator-sum form.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// Builds a channel and checks Σ K†K = 𝕀. Operators that are exactly
    /// zero are dropped.
    pub fn new(dim: usize, operators: Vec<CMatrix>) -> Result<Self> {
        qubits_for_dim(dim)?;
        if let Some(k) = operators.iter().find(|k| k.shape() != (dim, dim)) {
            return arg(format!(
                "Kraus operator is {}x{}, expected {dim}x{dim}",
                k.nrows(),
                k.ncols()
            ));
        }
        let operators: Vec<CMatrix> = operators
            .into_iter()
            .filter(|k| k.iter().any(|z| *z != ZERO))
            .collect();
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let dev = max_abs(&(sum - identity(dim)));
        if dev > KRAUS_TOL || !dev.is_finite() {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { dim, operators })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(dim, vec![identity(dim)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        DensityMatrix::from_numeric(self.apply_matrix(rho.matrix()))
    }

    /// Apply the channel to the listed qubits of a larger register.
    pub fn apply_on(&self, rho: &DensityMatrix, qubits: &[usize]) -> Result<DensityMatrix> {
        let n = rho.num_qubits();
        if 1usize << qubits.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: 1 << qubits.len(),
            });
        }
        if qubits.iter().any(|&q| q >= n) {
            return arg("target qubit out of range");
        }
        let mut out = CMatrix::zeros(rho.dim(), rho.dim());
        for k in &self.operators {
            out += conjugate(rho.matrix(), k, qubits, n);
        }
        DensityMatrix::from_numeric(out)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &KrausChannel) -> Result<KrausChannel> {
        if self.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: first.dim,
            });
        }
        let ops = self
            .operators
            .iter()
            .flat_map(|a| first.operators.iter().map(move |b| a * b))
            .collect();
        KrausChannel::new(self.dim, ops)
    }

    pub fn choi(&self) -> ChoiMatrix {
        choi(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&KrausJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: KrausJson = serde_json::from_str(text)?;
        let ops = raw
            .operators
            .iter()
            .map(|rows| {
                let flat: Vec<C64> = rows.iter().map(|&[re, im]| C64::new(re, im)).collect();
                if flat.len() != raw.dim * raw.dim {
                    return arg("Kraus operator has wrong number of entries");
                }
                Ok(CMatrix::from_row_slice(raw.dim, raw.dim, &flat))
            })
            .collect::<Result<Vec<_>>>()?;
        KrausChannel::new(raw.dim, ops)
    }
}

/// Serialized Kraus list: each operator is row-major `[re, im]` pairs.
#[derive(Debug, Serialize, Deserialize)]
struct KrausJson {
    dim: usize,
    operators: Vec<Vec<[f64; 2]>>,
}

impl From<&KrausChannel> for KrausJson {
    fn from(ch: &KrausChannel) -> Self {
        let operators = ch
            .operators
            .iter()
            .map(|k| {
                let mut flat = Vec::with_capacity(k.len());
                for r in 0..k.nrows() {
                    for c in 0..k.ncols() {
                        let z = k[(r, c)];
                        flat.push([z.re, z.im]);
                    }
                }
                flat
            })
            .collect();
        KrausJson {
            dim: ch.dim,
            operators,
        }
    }
}

/// A linear map on `system_dim`-dimensional operators in Choi form.
///
/// Construction only checks the shape; whether the map is CPTP is a
/// separate question answered by [`is_cptp`] (intermediate maps of
/// non-divisible dynamics are not).
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    system_dim: usize,
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn new(system_dim: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = system_dim * system_dim;
        if matrix.shape() != (d2, d2) {
            return arg(format!(
                "Choi matrix must be {d2}x{d2}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return arg("Choi matrix has non-finite entries");
        }
        Ok(Self { system_dim, matrix })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Φ(ρ)[a,b] = Σ_ij ρ[i,j] J[(i,a),(j,b)].
    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let d = self.system_dim;
        CMatrix::from_fn(d, d, |a, b| {
            let mut acc = ZERO;
            for i in 0..d {
                for j in 0..d {
                    acc += rho[(i, j)] * self.matrix[(i * d + a, j * d + b)];
                }
            }
            acc
        })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: rho.dim(),
            });
        }
        DensityMatrix::from_numeric(self.apply_matrix(rho.matrix()))
    }

    /// Column-stacking superoperator of the same map.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.system_dim;
        let mut s = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        s[(a + d * b, i + d * j)] = self.matrix[(i * d + a, j * d + b)];
                    }
                }
            }
        }
        s
    }

    pub fn from_superoperator(system_dim: usize, s: &CMatrix) -> Result<Self> {
        let d = system_dim;
        if s.shape() != (d * d, d * d) {
            return arg("superoperator has wrong shape");
        }
        let mut j = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for jj in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        j[(i * d + a, jj * d + b)] = s[(a + d * b, i + d * jj)];
                    }
                }
            }
        }
        Self::new(d, j)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ChoiMatrix) -> Result<ChoiMatrix> {
        if self.system_dim != first.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found: first.system_dim,
            });
        }
        Self::from_superoperator(
            self.system_dim,
            &(self.superoperator() * first.superoperator()),
        )
    }

    /// Tr over the output factor; equals 𝕀 for trace-preserving maps.
    pub fn output_trace(&self) -> CMatrix {
        let d = self.system_dim;
        CMatrix::from_fn(d, d, |i, j| {
            (0..d).map(|a| self.matrix[(i * d + a, j * d + a)]).sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)[0]
    }
}

/// Choi matrix via the action on the (unnormalized) maximally entangled state.
pub fn choi(channel: &KrausChannel) -> ChoiMatrix {
    let d = channel.dim;
    let mut j = CMatrix::zeros(d * d, d * d);
    for k in &channel.operators {
        // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
        let v = DMatrix::from_fn(d * d, 1, |row, _| k[(row % d, row / d)]);
        j += &v * v.adjoint();
    }
    ChoiMatrix {
        system_dim: d,
        matrix: j,
    }
}

/// PSD within `tol` and trace preserving within `tol`.
pub fn is_cptp(choi: &ChoiMatrix, tol: f64) -> bool {
    let herm = max_abs(&(choi.matrix() - choi.matrix().adjoint()));
    if herm > tol {
        return false;
    }
    let tp = max_abs(&(choi.output_trace() - identity(choi.system_dim)));
    tp <= tol && choi.min_eigenvalue() >= -tol
}

/// Trace distance between the normalized Choi states.
pub fn choi_distance(a: &ChoiMatrix, b: &ChoiMatrix) -> Result<f64> {
    if a.system_dim != b.system_dim {
        return Err(Error::DimensionMismatch {
            expected: a.system_dim,
            found: b.system_dim,
        });
    }
    let diff = (a.matrix() - b.matrix()).unscale(a.system_dim as f64);
    Ok(trace_norm_hermitian(&diff) / 2.0)
}
