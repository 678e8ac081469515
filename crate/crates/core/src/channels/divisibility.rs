use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::qstate::{hermitian_eigenvalues, hermitian_part};

use super::ChoiMatrix;

/// Intervals whose earlier map has a larger superoperator condition
/// number are reported as indeterminate.
pub const COND_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Divisibility {
    Cp,
    NonCp,
    Indeterminate,
}

/// Result for the intermediate map Φ_{end,start} = Φ_end ∘ Φ_start⁻¹.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalReport {
    pub start: f64,
    pub end: f64,
    /// Condition number of Φ_start as a superoperator.
    pub condition: f64,
    /// Smallest eigenvalue of the intermediate Choi matrix, when computed.
    pub min_eigenvalue: Option<f64>,
    pub status: Divisibility,
}

impl IntervalReport {
    pub fn is_flagged(&self) -> bool {
        self.status == Divisibility::NonCp
    }
}

/// Test complete positivity of every intermediate map on consecutive grid
/// points.
pub fn cp_divisibility_scan<F>(family: F, t_grid: &[f64], tol: f64) -> Result<Vec<IntervalReport>>
where
    F: Fn(f64) -> Result<ChoiMatrix>,
{
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return arg("time grid must be strictly increasing");
    }
    let maps = t_grid
        .iter()
        .map(|&t| family(t))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(maps.len().saturating_sub(1));
    for (w, m) in t_grid.windows(2).zip(maps.windows(2)) {
        let (earlier, later) = (&m[0], &m[1]);
        if earlier.system_dim() != later.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: earlier.system_dim(),
                found: later.system_dim(),
            });
        }
        let s_early = earlier.superoperator();
        let sv = s_early.clone().singular_values();
        let (max, min) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| {
            (hi.max(v), lo.min(v))
        });
        let condition = if min > 0.0 { max / min } else { f64::INFINITY };
        let inverse = if condition <= COND_LIMIT {
            s_early.try_inverse()
        } else {
            None
        };
        let report = match inverse {
            Some(inv) => {
                let inter = ChoiMatrix::from_superoperator(
                    earlier.system_dim(),
                    &(later.superoperator() * inv),
                )?;
                let min_eig = hermitian_eigenvalues(&hermitian_part(inter.matrix()))[0];
                IntervalReport {
                    start: w[0],
                    end: w[1],
                    condition,
                    min_eigenvalue: Some(min_eig),
                    status: if min_eig < -tol {
                        Divisibility::NonCp
                    } else {
                        Divisibility::Cp
                    },
                }
            }
            None => IntervalReport {
                start: w[0],
                end: w[1],
                condition,
                min_eigenvalue: None,
                status: Divisibility::Indeterminate,
            },
        };
        out.push(report);
    }
    Ok(out)
}

/// Intervals on which some Pauli-map eigenvalue grows in magnitude; any such
/// growth breaks P-divisibility of a Pauli-diagonal family.
pub fn p_divisibility_scan_pauli(
    t_grid: &[f64],
    eigenvalues: &[[f64; 3]],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if t_grid.len() != eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: t_grid.len(),
            found: eigenvalues.len(),
        });
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return arg("time grid must be strictly increasing");
    }
    Ok(t_grid
        .windows(2)
        .zip(eigenvalues.windows(2))
        .filter(|(_, l)| (0..3).any(|j| l[1][j].abs() > l[0][j].abs() + tol))
        .map(|(w, _)| (w[0], w[1]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        amplitude_damping_channel, c1, choi, collisional_correlated, collisional_separable,
        gamma_ad, pauli_channel, pauli_eigenvalues, pauli_rates_to_probabilities, ADParams,
        PauliRates,
    };
    use std::f64::consts::PI;

    fn ad_family(p: ADParams) -> impl Fn(f64) -> Result<ChoiMatrix> {
        move |t| Ok(choi(&amplitude_damping_channel(t, &p)?))
    }

    #[test]
    fn markovian_damping_is_cp_divisible() {
        let p = ADParams::from_ratio(0.2, 1.0).unwrap();
        let grid: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let scan = cp_divisibility_scan(ad_family(p), &grid, 1e-8).unwrap();
        for r in &scan {
            assert_eq!(r.status, Divisibility::Cp, "{r:?}");
            assert!(r.min_eigenvalue.unwrap() >= -1e-8);
        }
    }

    #[test]
    fn strong_coupling_damping_agrees_with_rate_sign() {
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..=120).map(|k| 0.01 * k as f64).collect();
        let scan = cp_divisibility_scan(ad_family(p), &grid, 1e-10).unwrap();
        assert!(scan.iter().any(IntervalReport::is_flagged));
        for r in scan
            .iter()
            .filter(|r| r.status != Divisibility::Indeterminate)
        {
            // the intermediate map is CP iff |c1| does not grow
            let grows = c1(r.end, &p).unwrap().abs() > c1(r.start, &p).unwrap().abs();
            assert_eq!(r.is_flagged(), grows, "{r:?}");
            let nonnegative_rate = (0..=8)
                .map(|k| r.start + (r.end - r.start) * f64::from(k) / 8.0)
                .all(|t| gamma_ad(t, &p).is_ok_and(|g| g >= 0.0));
            if nonnegative_rate {
                assert_eq!(r.status, Divisibility::Cp, "{r:?}");
            }
        }
    }

    #[test]
    fn exact_zero_is_indeterminate() {
        let p = ADParams::from_ratio(100.0, 1.0).unwrap();
        let d = 199f64.sqrt();
        // c1 has a zero where tan(d t/2) = −d; evaluate the family there
        let t0 = 2.0 * (PI - d.atan()) / d;
        assert!(c1(t0, &p).unwrap().abs() < 1e-12);
        let scan = cp_divisibility_scan(ad_family(p), &[t0, t0 + 0.01], 1e-10).unwrap();
        assert_eq!(scan[0].status, Divisibility::Indeterminate);
    }

    #[test]
    fn eternal_channel_flags_every_later_interval() {
        let rates = PauliRates::eternal(1.0, 0.5);
        let family = |t: f64| {
            let [a, b, c, d] = pauli_rates_to_probabilities(&rates, t)?;
            Ok(choi(&pauli_channel(a, b, c, d)?))
        };
        let grid: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        let scan = cp_divisibility_scan(family, &grid, 1e-10).unwrap();
        assert_eq!(scan[0].status, Divisibility::Cp);
        assert!(scan[1..].iter().all(IntervalReport::is_flagged));
    }

    fn dephasing_eigs(w: f64) -> [f64; 3] {
        let l = 2.0 * w - 1.0;
        [l, l, 1.0]
    }

    #[test]
    fn correlated_collisions_alternate() {
        let g = PI / 6.0;
        let grid: Vec<f64> = (0..=12).map(f64::from).collect();
        let eigs: Vec<[f64; 3]> = (0..=12u32)
            .map(|n| {
                let w = (f64::from(n) * g).cos().powi(2);
                let ch = collisional_correlated(n, g).unwrap();
                let out = ch.apply_matrix(&crate::qstate::pauli_x());
                assert!((out[(0, 1)].re - (2.0 * w - 1.0)).abs() < 1e-14);
                dephasing_eigs(w)
            })
            .collect();
        let flagged = p_divisibility_scan_pauli(&grid, &eigs, 1e-10).unwrap();
        // |cos(2nπ/6)| grows on intervals whose end lies in (π/4, π/2] mod π/2
        for (s, t) in &flagged {
            let x = (t * g) % (PI / 2.0);
            assert!(x > PI / 4.0 || x.abs() < 1e-12, "[{s}, {t}]");
        }
        assert_eq!(
            flagged,
            vec![(2.0, 3.0), (5.0, 6.0), (8.0, 9.0), (11.0, 12.0)]
        );
    }

    #[test]
    fn separable_collisions_never_flag() {
        let g = PI / 6.0;
        let grid: Vec<f64> = (0..=12).map(f64::from).collect();
        let eigs: Vec<[f64; 3]> = (0..=12u32)
            .map(|n| {
                let _ = collisional_separable(n, g).unwrap();
                dephasing_eigs(0.5 * (1.0 + (2.0 * g).cos().powi(n as i32)))
            })
            .collect();
        assert!(p_divisibility_scan_pauli(&grid, &eigs, 1e-10)
            .unwrap()
            .is_empty());
        let constant = vec![[0.5, 0.5, 0.5]; grid.len()];
        assert!(p_divisibility_scan_pauli(&grid, &constant, 1e-10)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn eternal_channel_is_p_divisible() {
        let rates = PauliRates::eternal(1.0, 0.5);
        let grid: Vec<f64> = (0..=30).map(|k| 0.1 * k as f64).collect();
        let eigs: Vec<[f64; 3]> = grid
            .iter()
            .map(|&t| pauli_eigenvalues(&rates, t).unwrap())
            .collect();
        assert!(p_divisibility_scan_pauli(&grid, &eigs, 1e-12)
            .unwrap()
            .is_empty());
    }
}
