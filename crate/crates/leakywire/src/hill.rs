//! Floquet spectra of one-dimensional Hill operators.
//!
//! The comparison operator on the curve is `S_theta = -d^2/ds^2 -
//! gamma(s)^2/4` on `(0, L)` with the quasi-periodic domain `u(L) =
//! e^{i theta} u(0)`, `u'(L) = e^{i theta} u'(0)`. The perturbed
//! comparison operators `U^+-` carry a constant kinetic prefactor and the
//! potentials `V_+-` built from the curvature sup norms.
//!
//! Discretization: Galerkin in the quasi-periodic plane-wave basis
//! `e^{i (2 pi k + theta) s / L} / sqrt(L)`. The kinetic part is diagonal,
//! the potential enters through its Fourier coefficients (computed by FFT
//! on a `4 * n_modes` grid), giving a Hermitian Toeplitz block. The
//! Hermitian eigenproblem is solved through the real doubling embedding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::CurvatureProfile;
use crate::error::{Error, Result};
use crate::linalg::fourier::{coeff, fourier_coefficients};
use crate::linalg::HermMat;

/// Periodic potential of a Hill operator.
#[derive(Debug, Clone)]
pub enum Potential {
    Zero { period: f64 },
    /// `constant - weight * gamma(s)^2`
    CurvatureSq {
        profile: CurvatureProfile,
        constant: f64,
        weight: f64,
    },
    /// `constant + sum_k cos[k-1] cos(2 pi k x / P) + sin[k-1] sin(2 pi k x / P)`
    TrigPoly {
        period: f64,
        constant: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

impl Potential {
    pub fn curvature_squared(profile: &CurvatureProfile) -> Result<Self> {
        let _ = profile.period().ok_or_else(|| Error::InvalidParameter {
            name: "profile".into(),
            message: "Hill potential requires a periodic profile".into(),
        })?;
        Ok(Potential::CurvatureSq {
            profile: profile.clone(),
            constant: 0.0,
            weight: 0.25,
        })
    }

    /// Mathieu-type potential `2 alpha cos(2 pi x / period)`.
    pub fn mathieu(period: f64, alpha: f64) -> Self {
        Potential::TrigPoly {
            period,
            constant: 0.0,
            cos: vec![2.0 * alpha],
            sin: Vec::new(),
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Potential::Zero { period } => *period,
            Potential::CurvatureSq { profile, .. } => profile.period().unwrap(),
            Potential::TrigPoly { period, .. } => *period,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Zero { .. } => 0.0,
            Potential::CurvatureSq {
                profile,
                constant,
                weight,
            } => {
                let g = profile.gamma(x);
                constant - weight * g * g
            }
            Potential::TrigPoly {
                period,
                constant,
                cos,
                sin,
            } => {
                let w = 2.0 * std::f64::consts::PI / period;
                let mut acc = *constant;
                for (k, a) in cos.iter().enumerate() {
                    acc += a * ((k + 1) as f64 * w * x).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    acc += b * ((k + 1) as f64 * w * x).sin();
                }
                acc
            }
        }
    }

    /// Shift the potential by a constant.
    pub fn shifted(&self, c: f64) -> Potential {
        let mut out = self.clone();
        match &mut out {
            Potential::Zero { period } => {
                return Potential::TrigPoly {
                    period: *period,
                    constant: c,
                    cos: Vec::new(),
                    sin: Vec::new(),
                }
            }
            Potential::CurvatureSq { constant, .. } => *constant += c,
            Potential::TrigPoly { constant, .. } => *constant += c,
        }
        out
    }
}

/// Hill operator `-prefactor d^2/ds^2 + V(s)` with quasimomentum `theta`.
#[derive(Debug, Clone)]
pub struct HillOperatorSpec {
    pub potential: Potential,
    pub kinetic_prefactor: f64,
    pub theta: f64,
    pub period: f64,
}

impl HillOperatorSpec {
    pub fn new(potential: Potential, theta: f64) -> Self {
        let period = potential.period();
        HillOperatorSpec {
            potential,
            kinetic_prefactor: 1.0,
            theta,
            period,
        }
    }

    /// The comparison operator `S_theta` of the given curvature profile.
    pub fn s_operator(profile: &CurvatureProfile, theta: f64) -> Result<Self> {
        Ok(HillOperatorSpec::new(
            Potential::curvature_squared(profile)?,
            theta,
        ))
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }
}

/// Potentials and prefactors of the comparison operators `U^+_{a,theta}`
/// and `U^-_{a,theta}` (both returned at `theta = 0`, reposition with
/// [`HillOperatorSpec::with_theta`]).
///
/// Requires `0 < a < 1/(2 gamma_+)`; for a straight curve any `a > 0`
/// works and both operators coincide with `S_theta`.
pub fn comparison_operators(
    profile: &CurvatureProfile,
    a: f64,
) -> Result<(HillOperatorSpec, HillOperatorSpec)> {
    let _ = profile.period().ok_or_else(|| Error::InvalidParameter {
        name: "profile".into(),
        message: "comparison operators require a periodic profile".into(),
    })?;
    let (g0, g1, g2) = profile.sup_norms();
    if !(a > 0.0) || (g0 > 0.0 && a >= 0.5 / g0) {
        return Err(Error::InvalidParameter {
            name: "a".into(),
            message: format!("halfwidth must satisfy 0 < a < 1/(2 gamma_+) = {}", 0.5 / g0),
        });
    }
    let dm = 1.0 - a * g0;
    let dp = 1.0 + a * g0;
    let c_plus = 0.5 * dm.powi(-3) * a * g2 - 1.25 * dp.powi(-4) * a * a * g1 * g1;
    let c_minus = -0.5 * dm.powi(-3) * a * g2 - 1.25 * dm.powi(-4) * a * a * g1 * g1;
    let plus = HillOperatorSpec {
        potential: Potential::CurvatureSq {
            profile: profile.clone(),
            constant: c_plus,
            weight: 0.25 * dp.powi(-2),
        },
        kinetic_prefactor: dm.powi(-2),
        theta: 0.0,
        period: profile.period().unwrap(),
    };
    let minus = HillOperatorSpec {
        potential: Potential::CurvatureSq {
            profile: profile.clone(),
            constant: c_minus,
            weight: 0.25 * dm.powi(-2),
        },
        kinetic_prefactor: dp.powi(-2),
        theta: 0.0,
        period: profile.period().unwrap(),
    };
    Ok((plus, minus))
}

/// Galerkin matrix of the Hill operator in the quasi-periodic plane-wave
/// basis, size `2 n_modes + 1`.
pub fn assemble_hill(spec: &HillOperatorSpec, n_modes: usize) -> Result<HermMat> {
    if n_modes < 8 {
        return Err(Error::InvalidParameter {
            name: "n_modes".into(),
            message: "need n_modes >= 8".into(),
        });
    }
    let l = spec.period;
    let size = 2 * n_modes + 1;
    let nsamp = 4 * n_modes;
    let samples: Vec<f64> = (0..nsamp)
        .map(|k| spec.potential.eval(k as f64 * l / nsamp as f64))
        .collect();
    let coeffs = fourier_coefficients(&samples);
    // smoothness check: the coefficients the matrix actually uses must have
    // decayed by the edge of the resolved range
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let tail = (0..4)
        .map(|i| coeff(&coeffs, (2 * n_modes - i) as i64).norm())
        .fold(0.0f64, f64::max);
    if scale > 0.0 && tail > 1e-6 * scale {
        return Err(Error::Quadrature(format!(
            "potential Fourier coefficients have not decayed at the basis edge \
             (tail {tail:.3e} vs scale {scale:.3e}); increase n_modes"
        )));
    }

    let mut h = HermMat::zeros(size);
    let two_pi = 2.0 * std::f64::consts::PI;
    for p in 0..size {
        let k = p as f64 - n_modes as f64;
        let freq = (two_pi * k + spec.theta) / l;
        let kinetic = spec.kinetic_prefactor * freq * freq;
        for q in 0..size {
            let d = p as i64 - q as i64;
            let mut v = coeff(&coeffs, d);
            if p == q {
                v += kinetic;
                v.im = 0.0;
            }
            h.set(p, q, v);
        }
    }
    Ok(h)
}

/// Lowest `count` eigenvalues of the Hill operator, ascending with
/// multiplicity.
pub fn floquet_eigenvalues(
    spec: &HillOperatorSpec,
    n_modes: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let h = assemble_hill(spec, n_modes)?;
    if count > h.n {
        return Err(Error::InvalidParameter {
            name: "count".into(),
            message: format!("requested {count} eigenvalues from a basis of {}", h.n),
        });
    }
    let mut vals = h.eigenvalues()?;
    vals.truncate(count);
    Ok(vals)
}

/// Floquet eigenvalue table over the quasimomentum grid.
///
/// The grid is uniform on `[0, 2 pi)` with the exact `theta = pi` column
/// inserted when the uniform grid misses it; the periodic and antiperiodic
/// edge columns are stored separately as well.
#[derive(Debug, Clone, Serialize)]
pub struct FloquetBandTable {
    pub theta: Vec<f64>,
    /// `mu[i][j]`: j-th eigenvalue at `theta[i]`
    pub mu: Vec<Vec<f64>>,
    /// `mu_j(0)`
    pub edge_periodic: Vec<f64>,
    /// `mu_j(pi)`
    pub edge_antiperiodic: Vec<f64>,
}

impl FloquetBandTable {
    pub fn band_count(&self) -> usize {
        self.edge_periodic.len()
    }
}

/// Compute the band table of `S_theta` for the profile.
pub fn band_table(
    profile: &CurvatureProfile,
    theta_count: usize,
    bands: usize,
    n_modes: usize,
) -> Result<FloquetBandTable> {
    let spec0 = HillOperatorSpec::s_operator(profile, 0.0)?;
    band_table_of(&spec0, theta_count, bands, n_modes)
}

/// Band table of an arbitrary Hill operator spec (its `theta` is ignored).
pub fn band_table_of(
    spec: &HillOperatorSpec,
    theta_count: usize,
    bands: usize,
    n_modes: usize,
) -> Result<FloquetBandTable> {
    if theta_count < 2 {
        return Err(Error::InvalidParameter {
            name: "theta_count".into(),
            message: "need at least 2 grid points".into(),
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let pi = std::f64::consts::PI;
    let mut thetas: Vec<f64> = (0..theta_count)
        .map(|i| i as f64 * two_pi / theta_count as f64)
        .collect();
    if !thetas.iter().any(|&t| t == pi) {
        thetas.push(pi);
    }
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let columns: Result<Vec<Vec<f64>>> = thetas
        .par_iter()
        .map(|&t| floquet_eigenvalues(&spec.clone().with_theta(t), n_modes, bands))
        .collect();
    let mu = columns?;

    let idx0 = thetas.iter().position(|&t| t == 0.0).unwrap();
    let idx_pi = thetas.iter().position(|&t| t == pi).unwrap();
    let table = FloquetBandTable {
        edge_periodic: mu[idx0].clone(),
        edge_antiperiodic: mu[idx_pi].clone(),
        theta: thetas,
        mu,
    };
    validate_table(&table)?;
    Ok(table)
}

/// Enforce the band-table invariants: ascending columns, the
/// `mu_j(theta) = mu_j(2 pi - theta)` symmetry of a real potential, and
/// the edge interlacing of Hill theory.
fn validate_table(table: &FloquetBandTable) -> Result<()> {
    let scale = table
        .mu
        .iter()
        .flatten()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let sym_tol = 1e-9 * scale;
    let inter_tol = 1e-7 * scale;
    let two_pi = 2.0 * std::f64::consts::PI;

    for (i, col) in table.mu.iter().enumerate() {
        for j in 1..col.len() {
            if col[j] < col[j - 1] {
                return Err(Error::BandTableInvariant(format!(
                    "column at theta = {} not sorted",
                    table.theta[i]
                )));
            }
        }
        let mirrored = two_pi - table.theta[i];
        if let Some(k) = table
            .theta
            .iter()
            .position(|&t| (t - mirrored).abs() < 1e-12)
        {
            for j in 0..col.len() {
                if (col[j] - table.mu[k][j]).abs() > sym_tol {
                    return Err(Error::BandTableInvariant(format!(
                        "theta symmetry violated at theta = {} band {}: {} vs {}",
                        table.theta[i], j, col[j], table.mu[k][j]
                    )));
                }
            }
        }
    }

    // interlacing mu_1(0) < mu_1(pi) <= mu_2(pi) < mu_2(0) <= mu_3(0) < ...
    let kappa = &table.edge_periodic;
    let nu = &table.edge_antiperiodic;
    let bands = kappa.len();
    for j in 1..=bands {
        let (lo, hi) = if j % 2 == 1 {
            (kappa[j - 1], nu[j - 1])
        } else {
            (nu[j - 1], kappa[j - 1])
        };
        if lo > hi + inter_tol {
            return Err(Error::BandTableInvariant(format!(
                "edge interlacing violated in band {j}: {lo} > {hi}"
            )));
        }
        if j < bands {
            let (glo, ghi) = if j % 2 == 1 {
                (nu[j - 1], nu[j])
            } else {
                (kappa[j - 1], kappa[j])
            };
            if glo > ghi + inter_tol {
                return Err(Error::BandTableInvariant(format!(
                    "edge interlacing violated in gap {j}: {glo} > {ghi}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_matrix_is_diagonal() {
        let spec = HillOperatorSpec::new(
            Potential::Zero { period: 2.0 * PI },
            0.0,
        );
        let h = assemble_hill(&spec, 8).unwrap();
        let mut diag: Vec<f64> = (0..h.n).map(|p| h.get(p, p).re).collect();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(&diag[..5], &[0.0, 1.0, 1.0, 4.0, 4.0]);
        for p in 0..h.n {
            for q in 0..h.n {
                if p != q {
                    assert!(h.get(p, q).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn free_spectrum_periodic_and_antiperiodic() {
        let pot = Potential::Zero { period: 2.0 * PI };
        let vals0 =
            floquet_eigenvalues(&HillOperatorSpec::new(pot.clone(), 0.0), 16, 5).unwrap();
        for (v, e) in vals0.iter().zip([0.0, 1.0, 1.0, 4.0, 4.0]) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
        let vals_pi =
            floquet_eigenvalues(&HillOperatorSpec::new(pot, PI), 16, 4).unwrap();
        for (v, e) in vals_pi.iter().zip([0.25, 0.25, 2.25, 2.25]) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
    }

    #[test]
    fn constant_potential_shifts_matrix() {
        let free = HillOperatorSpec::new(Potential::Zero { period: 1.0 }, 0.7);
        let shifted = HillOperatorSpec::new(
            Potential::TrigPoly {
                period: 1.0,
                constant: 3.25,
                cos: Vec::new(),
                sin: Vec::new(),
            },
            0.7,
        );
        let a = assemble_hill(&free, 8).unwrap();
        let b = assemble_hill(&shifted, 8).unwrap();
        for p in 0..a.n {
            for q in 0..a.n {
                let want = if p == q {
                    a.get(p, q) + Complex64::new(3.25, 0.0)
                } else {
                    a.get(p, q)
                };
                assert!((b.get(p, q) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn single_harmonic_off_diagonal() {
        let alpha = 0.4;
        let spec = HillOperatorSpec::new(Potential::mathieu(1.0, alpha), 0.0);
        let h = assemble_hill(&spec, 8).unwrap();
        for p in 0..h.n {
            for q in 0..h.n {
                let d = (p as i64 - q as i64).abs();
                let v = h.get(p, q);
                if d == 1 {
                    assert!((v.re - alpha).abs() < 1e-13 && v.im.abs() < 1e-13);
                } else if d > 1 {
                    assert!(v.norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn comparison_operators_small_a_limit() {
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        let (plus, minus) = comparison_operators(&p, 1e-9).unwrap();
        assert!((plus.kinetic_prefactor - 1.0).abs() < 1e-8);
        assert!((minus.kinetic_prefactor - 1.0).abs() < 1e-8);
        for s in [0.0, 0.3, 0.6] {
            let g = p.gamma(s);
            assert!((plus.potential.eval(s) + 0.25 * g * g).abs() < 1e-7);
            assert!((minus.potential.eval(s) + 0.25 * g * g).abs() < 1e-7);
        }
    }

    #[test]
    fn comparison_operators_hand_evaluated() {
        // gamma = 0.5 sin(2 pi s): gamma_+ = 0.5, gamma'_+ = pi,
        // gamma''_+ = 2 pi^2
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        let a = 0.1;
        let (plus, minus) = comparison_operators(&p, a).unwrap();
        let (g0, g1, g2) = (0.5, PI, 2.0 * PI * PI);
        let dm = 1.0 - a * g0;
        let dp = 1.0 + a * g0;
        assert!((plus.kinetic_prefactor - dm.powi(-2)).abs() < 1e-12);
        assert!((minus.kinetic_prefactor - dp.powi(-2)).abs() < 1e-12);
        for s in [0.0, 0.25] {
            let g = p.gamma(s);
            let vp = 0.5 * dm.powi(-3) * a * g2 - 1.25 * dp.powi(-4) * a * a * g1 * g1
                - 0.25 * dp.powi(-2) * g * g;
            let vm = -0.5 * dm.powi(-3) * a * g2
                - 1.25 * dm.powi(-4) * a * a * g1 * g1
                - 0.25 * dm.powi(-2) * g * g;
            assert!((plus.potential.eval(s) - vp).abs() < 1e-9, "V+ at {s}");
            assert!((minus.potential.eval(s) - vm).abs() < 1e-9, "V- at {s}");
        }
    }

    #[test]
    fn comparison_operators_reject_large_a() {
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        assert!(comparison_operators(&p, 1.0).is_err());
    }

    #[test]
    fn band_table_free_bands() {
        let p = CurvatureProfile::zero(1.0);
        let table = band_table(&p, 9, 4, 16).unwrap();
        // free bands: [ ((j-1) pi / L)^2, (j pi / L)^2 ]
        for j in 1..=4usize {
            let (lo, hi) = if j % 2 == 1 {
                (table.edge_periodic[j - 1], table.edge_antiperiodic[j - 1])
            } else {
                (table.edge_antiperiodic[j - 1], table.edge_periodic[j - 1])
            };
            let elo = ((j as f64 - 1.0) * PI).powi(2);
            let ehi = (j as f64 * PI).powi(2);
            assert!((lo - elo).abs() < 1e-9, "band {j} lower edge");
            assert!((hi - ehi).abs() < 1e-9, "band {j} upper edge");
        }
    }

    #[test]
    fn band_table_theta_symmetry() {
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        // validate_table enforces the symmetry internally
        let table = band_table(&p, 15, 6, 32).unwrap();
        assert_eq!(table.theta.len(), 16); // pi not on the odd grid, inserted
        let even = band_table(&p, 16, 6, 32).unwrap();
        assert_eq!(even.theta.len(), 16); // pi already on the grid
    }
}
