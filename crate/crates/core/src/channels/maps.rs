use crate::error::{arg, Result};
use crate::qstate::{identity, pauli_x, pauli_y, pauli_z, tensor, CMatrix};

use super::KrausChannel;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return arg(format!("{name} = {p} outside [0, 1]"));
    }
    Ok(())
}

/// Pump from the +1 to the −1 eigenspace of `stabilizer`, flipping with
/// `flip` (which anticommutes with the stabilizer).
fn stabilizer_pump(p: f64, stabilizer: &CMatrix, flip: &CMatrix) -> Result<KrausChannel> {
    check_probability("p", p)?;
    let id = identity(4);
    let plus = (&id + stabilizer).scale(0.5);
    let minus = (&id - stabilizer).scale(0.5);
    let e1 = (flip * &plus).scale(p.sqrt());
    let e2 = minus + plus.scale((1.0 - p).sqrt());
    KrausChannel::new(4, vec![e1, e2])
}

/// ZZ pump: `E1 = √p (𝕀⊗σx) P₊`, `E2 = P₋ + √(1−p) P₊` with P± the
/// projectors onto the ±1 eigenspaces of σz⊗σz.
pub fn pump_zz(p: f64) -> Result<KrausChannel> {
    stabilizer_pump(
        p,
        &tensor(&pauli_z(), &pauli_z()),
        &tensor(&identity(2), &pauli_x()),
    )
}

/// XX pump: as [`pump_zz`] with σz⊗σz → σx⊗σx and the flip 𝕀⊗σz.
pub fn pump_xx(p: f64) -> Result<KrausChannel> {
    stabilizer_pump(
        p,
        &tensor(&pauli_x(), &pauli_x()),
        &tensor(&identity(2), &pauli_z()),
    )
}

/// ρ → w ρ + (1 − w) σz ρ σz.
pub fn dephasing(w: f64) -> Result<KrausChannel> {
    check_probability("identity weight", w)?;
    KrausChannel::new(
        2,
        vec![
            identity(2).scale(w.sqrt()),
            pauli_z().scale((1.0 - w).sqrt()),
        ],
    )
}

/// Dephasing after `n` collisions with classically correlated ancillae:
/// identity weight cos²(n·gτ).
pub fn collisional_correlated(n: u32, g_tau: f64) -> Result<KrausChannel> {
    if !g_tau.is_finite() {
        return arg("g·τ must be finite");
    }
    let w = (f64::from(n) * g_tau).cos().powi(2);
    dephasing(w.clamp(0.0, 1.0))
}

/// Dephasing after `n` collisions with ancillae in |+⟩: identity weight
/// (1 + cosⁿ(2gτ))/2.
pub fn collisional_separable(n: u32, g_tau: f64) -> Result<KrausChannel> {
    if !g_tau.is_finite() {
        return arg("g·τ must be finite");
    }
    let w = 0.5 * (1.0 + (2.0 * g_tau).cos().powi(n as i32));
    dephasing(w.clamp(0.0, 1.0))
}

/// `(1 − 3p/4) ρ + p/4 Σ σᵢ ρ σᵢ`.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability("p", p)?;
    pauli_channel(1.0 - 0.75 * p, p / 4.0, p / 4.0, p / 4.0)
}

/// `Σ pᵢ σᵢ ρ σᵢ` with σ₀ = 𝕀, σ₁ = σx, σ₂ = σy, σ₃ = σz.
pub fn pauli_channel(p0: f64, p1: f64, p2: f64, p3: f64) -> Result<KrausChannel> {
    let ps = [p0, p1, p2, p3];
    if ps.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return arg(format!(
            "Pauli probabilities must be nonnegative, got {ps:?}"
        ));
    }
    let total: f64 = ps.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return arg(format!("Pauli probabilities sum to {total}"));
    }
    let ops = [identity(2), pauli_x(), pauli_y(), pauli_z()];
    KrausChannel::new(
        2,
        ps.iter().zip(ops).map(|(p, s)| s.scale(p.sqrt())).collect(),
    )
}

pub fn unitary_channel(u: &CMatrix) -> Result<KrausChannel> {
    KrausChannel::new(u.nrows(), vec![u.clone()])
}
