//! Gap-opening machinery for the Hill operator: Fourier certificates, the
//! Mathieu gap inequality, and band/gap bookkeeping from the Floquet edge
//! eigenvalues.
//!
//! The arithmetic certificate: if the potential has a dominating n-th
//! Fourier harmonic of amplitude `rho = sqrt(a_n^2 + b_n^2)` with
//! `0 < rho < 12 pi^2 n^2 / P^2` and the remainder beyond the constant and
//! the n-th harmonic stays below `rho / 4` in sup norm, the n-th gap is
//! open. No eigenvalue solve is involved; the certificate is checked
//! against actual Floquet edges by the tests.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::hill::{floquet_eigenvalues, FloquetBandTable, HillOperatorSpec, Potential};

/// Truncated Fourier expansion of a periodic potential, with the raw
/// samples kept for sup-norm residuals.
#[derive(Debug, Clone)]
pub struct FourierDecomposition {
    pub period: f64,
    /// sine coefficients `a_j`, index 0 is harmonic 1
    pub a: Vec<f64>,
    /// cosine coefficients `b_j`, index 0 is the mean
    pub b: Vec<f64>,
    samples: Vec<f64>,
}

impl FourierDecomposition {
    /// `rho_n = sqrt(a_n^2 + b_n^2)` for harmonic `n >= 1`.
    pub fn amplitude(&self, n: usize) -> f64 {
        let a = if n >= 1 { self.a.get(n - 1).copied().unwrap_or(0.0) } else { 0.0 };
        let b = self.b.get(n).copied().unwrap_or(0.0);
        (a * a + b * b).sqrt()
    }

    /// Sup norm over the sample grid of
    /// `V - b_0 - a_n sin(2 pi n x / P) - b_n cos(2 pi n x / P)`.
    pub fn residual_sup(&self, n: usize) -> f64 {
        let an = if n >= 1 { self.a.get(n - 1).copied().unwrap_or(0.0) } else { 0.0 };
        let bn = self.b.get(n).copied().unwrap_or(0.0);
        let b0 = self.b[0];
        let w = 2.0 * std::f64::consts::PI * n as f64 / self.period;
        let nsamp = self.samples.len();
        let mut sup = 0.0f64;
        for (k, &v) in self.samples.iter().enumerate() {
            let x = k as f64 * self.period / nsamp as f64;
            let r = v - b0 - an * (w * x).sin() - bn * (w * x).cos();
            sup = sup.max(r.abs());
        }
        sup
    }

    /// Mean of `V^2` over the period (sample average), for Parseval checks.
    pub fn mean_square(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }

    pub fn sup_scale(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn max_index(&self) -> usize {
        self.a.len()
    }
}

/// Fourier coefficients of `v` by FFT on at least `max(4096, 8 max_index)`
/// equispaced samples.
pub fn fourier_decompose<F: Fn(f64) -> f64>(
    v: F,
    period: f64,
    max_index: usize,
) -> FourierDecomposition {
    let nsamp = 4096usize.max(8 * max_index.max(1));
    let samples: Vec<f64> = (0..nsamp)
        .map(|k| v(k as f64 * period / nsamp as f64))
        .collect();
    let coeffs = crate::linalg::fourier::fourier_coefficients(&samples);
    let mut a = Vec::with_capacity(max_index);
    let mut b = Vec::with_capacity(max_index + 1);
    b.push(coeffs[0].re);
    for j in 1..=max_index {
        let c = crate::linalg::fourier::coeff(&coeffs, j as i64);
        b.push(2.0 * c.re);
        a.push(-2.0 * c.im);
    }
    FourierDecomposition {
        period,
        a,
        b,
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GapVerdict {
    CriterionHolds,
    AmplitudeZero,
    AmplitudeTooLarge,
    ResidualTooLarge,
}

/// Arithmetic gap certificate for one harmonic index.
#[derive(Debug, Clone, Serialize)]
pub struct GapCertificate {
    pub index: usize,
    pub amplitude: f64,
    pub upper_bound: f64,
    pub residual_sup: f64,
    pub verdict: GapVerdict,
}

/// Check the sufficient gap-opening condition at harmonic `n`.
pub fn check_gap_criterion(decomp: &FourierDecomposition, n: usize) -> GapCertificate {
    assert!(n >= 1 && n <= decomp.max_index(), "index out of range");
    let rho = decomp.amplitude(n);
    let bound = 12.0 * std::f64::consts::PI.powi(2) * (n * n) as f64 / decomp.period.powi(2);
    let residual = decomp.residual_sup(n);
    let zero_tol = 1e-12 * (decomp.sup_scale() + 1e-300);
    let verdict = if rho <= zero_tol {
        GapVerdict::AmplitudeZero
    } else if rho >= bound {
        GapVerdict::AmplitudeTooLarge
    } else if residual >= 0.25 * rho {
        GapVerdict::ResidualTooLarge
    } else {
        GapVerdict::CriterionHolds
    };
    GapCertificate {
        index: n,
        amplitude: rho,
        upper_bound: bound,
        residual_sup: residual,
        verdict,
    }
}

/// Periodic (`kappa_j`) and antiperiodic (`nu_j`) eigenvalues of
/// `-d^2/dx^2 + V` on one period.
pub fn periodic_antiperiodic_eigenvalues(
    potential: &Potential,
    count: usize,
    n_modes: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let kappa = floquet_eigenvalues(
        &HillOperatorSpec::new(potential.clone(), 0.0),
        n_modes,
        count,
    )?;
    let nu = floquet_eigenvalues(
        &HillOperatorSpec::new(potential.clone(), std::f64::consts::PI),
        n_modes,
        count,
    )?;
    Ok((kappa, nu))
}

/// One row of the Mathieu gap verification.
#[derive(Debug, Clone, Serialize)]
pub struct MathieuGapRow {
    pub alpha: f64,
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Verify `m_2(alpha) - m_1(alpha) >= |alpha|` for the antiperiodic Mathieu
/// operator `-d^2/dx^2 + 2 alpha cos(2 pi x / a)`; requires
/// `|alpha| < 6 pi^2 / a^2` for every grid point.
pub fn mathieu_gap_check(
    alpha_grid: &[f64],
    period: f64,
    n_modes: usize,
) -> Result<Vec<MathieuGapRow>> {
    let limit = 6.0 * std::f64::consts::PI.powi(2) / (period * period);
    for &alpha in alpha_grid {
        if alpha.abs() >= limit {
            return Err(crate::error::Error::PreconditionFailed(format!(
                "|alpha| = {} must be below 6 pi^2 / a^2 = {limit}",
                alpha.abs()
            )));
        }
    }
    alpha_grid
        .par_iter()
        .map(|&alpha| {
            let pot = Potential::mathieu(period, alpha);
            let nu = floquet_eigenvalues(
                &HillOperatorSpec::new(pot, std::f64::consts::PI),
                n_modes,
                2,
            )?;
            let gap = nu[1] - nu[0];
            Ok(MathieuGapRow {
                alpha,
                gap,
                bound: alpha.abs(),
                pass: gap >= alpha.abs() - 1e-6,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct BandRow {
    pub j: usize,
    #[serde(rename = "B")]
    pub length: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub j: usize,
    #[serde(rename = "G")]
    pub length: f64,
}

/// Band/gap lengths from the Floquet edge eigenvalues, with the
/// first-open-gap search.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub bands: Vec<BandRow>,
    pub gaps: Vec<GapRow>,
    /// least index with `G_m > gap_tolerance`, if any in the searched range
    pub first_open_gap: Option<usize>,
    /// gaps were searched for j = 1..=searched_range; absence of an open
    /// gap in the range is not a claim of non-existence
    pub searched_range: usize,
    pub gap_tolerance: f64,
    /// worst deviation between grid extrema and the edge columns
    pub edge_consistency: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub criterion: Vec<GapCertificate>,
}

/// Assemble the gap report. Band edges come from the exact `theta = 0` and
/// `theta = pi` columns; the extrema over the full grid are only compared
/// against them as a consistency diagnostic.
pub fn gap_report(table: &FloquetBandTable, gap_tolerance: Option<f64>) -> GapReport {
    let kappa = &table.edge_periodic;
    let nu = &table.edge_antiperiodic;
    let bands_n = kappa.len();
    let scale = kappa
        .iter()
        .chain(nu.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = gap_tolerance.unwrap_or(1e-8 * (1.0 + scale));

    let mut bands = Vec::with_capacity(bands_n);
    let mut gaps = Vec::with_capacity(bands_n.saturating_sub(1));
    let mut edge_consistency = 0.0f64;
    for j in 1..=bands_n {
        let (lo, hi) = if j % 2 == 1 {
            (kappa[j - 1], nu[j - 1])
        } else {
            (nu[j - 1], kappa[j - 1])
        };
        let grid_min = table
            .mu
            .iter()
            .map(|col| col[j - 1])
            .fold(f64::INFINITY, f64::min);
        let grid_max = table
            .mu
            .iter()
            .map(|col| col[j - 1])
            .fold(f64::NEG_INFINITY, f64::max);
        edge_consistency = edge_consistency
            .max((grid_min - lo).abs())
            .max((grid_max - hi).abs());
        bands.push(BandRow {
            j,
            length: hi - lo,
            lo,
            hi,
        });
        if j < bands_n {
            let g = if j % 2 == 1 {
                nu[j] - nu[j - 1]
            } else {
                kappa[j] - kappa[j - 1]
            };
            gaps.push(GapRow { j, length: g });
        }
    }
    let first_open_gap = gaps.iter().find(|g| g.length > tol).map(|g| g.j);
    GapReport {
        bands,
        gaps,
        first_open_gap,
        searched_range: bands_n.saturating_sub(1),
        gap_tolerance: tol,
        edge_consistency,
        criterion: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurvatureProfile;
    use crate::hill::band_table;
    use std::f64::consts::PI;

    #[test]
    fn decompose_single_cosine() {
        let alpha = 0.7;
        let d = fourier_decompose(|x| 2.0 * alpha * (2.0 * PI * x / 1.5).cos(), 1.5, 4);
        assert!((d.b[1] - 2.0 * alpha).abs() < 1e-12);
        assert!(d.b[0].abs() < 1e-12);
        assert!(d.a.iter().all(|v| v.abs() < 1e-12));
        assert!((d.b[2]).abs() < 1e-12);
        assert!(d.residual_sup(1) < 1e-12);
    }

    #[test]
    fn decompose_constant() {
        let d = fourier_decompose(|_| 4.25, 2.0, 3);
        assert!((d.b[0] - 4.25).abs() < 1e-12);
        assert!(d.a.iter().all(|v| v.abs() < 1e-12));
        assert!(d.b[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn decompose_curvature_squared() {
        // gamma = 0.5 sin(2 pi s): gamma^2/4 = 1/32 - (1/32) cos(4 pi s)
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        let d = fourier_decompose(
            |s| {
                let g = p.gamma(s);
                0.25 * g * g
            },
            1.0,
            4,
        );
        assert!((d.b[0] - 1.0 / 32.0).abs() < 1e-13);
        assert!((d.b[2] + 1.0 / 32.0).abs() < 1e-13);
        assert!(d.amplitude(1) < 1e-13);
        assert!((d.amplitude(2) - 1.0 / 32.0).abs() < 1e-13);
    }

    #[test]
    fn parseval_consistency() {
        let d = fourier_decompose(
            |x| 0.3 + 1.2 * (2.0 * PI * x).cos() + 0.4 * (6.0 * PI * x).sin(),
            1.0,
            8,
        );
        let sum = d.b[0] * d.b[0]
            + 0.5
                * (1..=8)
                    .map(|n| d.amplitude(n) * d.amplitude(n))
                    .sum::<f64>();
        assert!((sum - d.mean_square()).abs() < 1e-12);
    }

    #[test]
    fn criterion_verdicts() {
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        let d = fourier_decompose(
            |s| {
                let g = p.gamma(s);
                0.25 * g * g
            },
            1.0,
            4,
        );
        let c2 = check_gap_criterion(&d, 2);
        assert_eq!(c2.verdict, GapVerdict::CriterionHolds);
        assert!((c2.amplitude - 1.0 / 32.0).abs() < 1e-12);
        assert!((c2.upper_bound - 48.0 * PI * PI).abs() < 1e-9);
        let c1 = check_gap_criterion(&d, 1);
        assert_eq!(c1.verdict, GapVerdict::AmplitudeZero);
    }

    #[test]
    fn criterion_residual_too_large() {
        // two comparable harmonics at n and 2n
        let d = fourier_decompose(
            |x| (2.0 * PI * x).cos() + (4.0 * PI * x).cos(),
            1.0,
            4,
        );
        let c = check_gap_criterion(&d, 1);
        assert_eq!(c.verdict, GapVerdict::ResidualTooLarge);
        assert!((c.residual_sup - 1.0).abs() < 1e-10);
    }

    #[test]
    fn shifted_potential_shifts_eigenvalues() {
        let base = Potential::Zero { period: 2.0 * PI };
        let (k0, n0) = periodic_antiperiodic_eigenvalues(&base, 4, 16).unwrap();
        let (k5, n5) =
            periodic_antiperiodic_eigenvalues(&base.shifted(5.0), 4, 16).unwrap();
        for j in 0..4 {
            assert!((k5[j] - k0[j] - 5.0).abs() < 1e-11);
            assert!((n5[j] - n0[j] - 5.0).abs() < 1e-11);
        }
    }

    #[test]
    fn mathieu_gap_alpha_zero_degenerate() {
        let rows = mathieu_gap_check(&[0.0], PI, 32).unwrap();
        let free_edge = (PI / PI_PERIOD).powi(2);
        assert!((rows[0].gap).abs() < 1e-10);
        assert!(rows[0].pass);
        // degenerate free antiperiodic edge at (pi/a)^2
        const PI_PERIOD: f64 = PI;
        let nu = periodic_antiperiodic_eigenvalues(
            &Potential::Zero { period: PI },
            2,
            32,
        )
        .unwrap()
        .1;
        assert!((nu[0] - free_edge).abs() < 1e-10);
        assert!((nu[1] - free_edge).abs() < 1e-10);
    }

    #[test]
    fn mathieu_gap_unit_alpha() {
        let rows = mathieu_gap_check(&[1.0], PI, 64).unwrap();
        assert!(rows[0].pass);
        assert!(rows[0].gap >= 1.0 - 1e-6 && rows[0].gap <= 2.0);
    }

    #[test]
    fn free_operator_has_no_gaps() {
        let p = CurvatureProfile::zero(1.0);
        let table = band_table(&p, 9, 6, 32).unwrap();
        let report = gap_report(&table, None);
        assert!(report.first_open_gap.is_none());
        for g in &report.gaps {
            assert!(g.length.abs() < 1e-9);
        }
    }

    #[test]
    fn first_open_gap_matches_harmonic() {
        // gamma = 0.5 sin(2 pi s): the potential's only harmonic is n = 2,
        // the certificate holds there, and the n = 2 gap opens
        let p = CurvatureProfile::sine(1.0, 0.5, 1);
        let table = band_table(&p, 9, 6, 64).unwrap();
        let report = gap_report(&table, None);
        assert_eq!(report.first_open_gap, Some(2));
        assert!(report.gaps[1].length > 1e-6);
        assert!(report.gaps[0].length.abs() < 1e-8);
        assert!(report.edge_consistency < 1e-7);
    }
}
