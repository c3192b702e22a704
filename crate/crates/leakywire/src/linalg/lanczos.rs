//! Lanczos iteration with full reorthogonalization for the lowest part of
//! the spectrum of a large sparse symmetric matrix.
//!
//! Degenerate and near-degenerate eigenvalues are handled by two devices:
//!
//! * deflation restarts: converged eigenvectors are projected out of every
//!   subsequent Krylov space, so each restart converges to the smallest
//!   eigenvalue not yet found;
//! * an optional `partner` map: for matrices that commute with an
//!   orthogonal antisymmetric structure map (the real doubling of a
//!   Hermitian matrix commutes with multiplication by i), the partner of a
//!   converged eigenvector is a second, exactly orthogonal eigenvector for
//!   the same eigenvalue and is accepted for free.
//!
//! Ritz pairs are refined by an explicit Rayleigh-Ritz projection before
//! acceptance, so clustered eigenvalues are resolved from the converged
//! subspace rather than from the (slowly splitting) Krylov process itself.

use crate::error::{Error, Result};
use crate::linalg::dense::{sym_eigen, tql2, SymMat};
use crate::linalg::sparse::SparseSym;

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Krylov steps per restart.
    pub max_steps: usize,
    /// Restart budget (includes the verification run).
    pub max_restarts: usize,
    /// Absolute residual tolerance on ||A y - theta y||.
    pub residual_tol: f64,
    /// Seed for the deterministic start vectors.
    pub seed: u64,
    /// Convergence is probed every this many steps.
    pub check_every: usize,
    /// After `count` pairs are found, run one more deflated restart from a
    /// random vector and require that nothing new converges below the
    /// current top value. Warm-started solves may turn this off.
    pub require_verification: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_steps: 600,
            max_restarts: 12,
            residual_tol: 1e-8,
            seed: 0x5eed,
            check_every: 40,
            require_verification: true,
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn seeded_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut state = seed | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state.wrapping_mul(0x2545f4914f6cdd1d) >> 11) as f64 / (1u64 << 53) as f64;
            2.0 * u - 1.0
        })
        .collect()
}

/// Two-pass classical Gram-Schmidt of `w` against a set of vectors.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], extra: &[(f64, Vec<f64>)]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
        for (_, q) in extra {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

/// Eigen-decomposition of the Lanczos tridiagonal (alphas on the diagonal,
/// betas below). Returns ascending values and the rotation matrix.
fn tridiag_eigen(alphas: &[f64], betas: &[f64]) -> Result<(Vec<f64>, SymMat)> {
    let m = alphas.len();
    let mut d = alphas.to_vec();
    let mut e = vec![0.0; m];
    for i in 1..m {
        e[i] = betas[i - 1];
    }
    let mut z = SymMat::from_fn(m, |i, j| if i == j { 1.0 } else { 0.0 });
    tql2(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = SymMat::zeros(m);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..m {
            vecs.set(k, new_col, z.get(k, old_col));
        }
    }
    Ok((vals, vecs))
}

struct RunResult {
    /// Refined Ritz pairs (value, vector, residual), ascending in value.
    pairs: Vec<(f64, Vec<f64>, f64)>,
    /// Smallest raw Ritz value of the run (deflated operator).
    bottom_ritz: f64,
}

fn lanczos_run(
    a: &SparseSym,
    start: Vec<f64>,
    deflate: &[(f64, Vec<f64>)],
    need: usize,
    opts: &LanczosOptions,
) -> Result<RunResult> {
    let n = a.n;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v0 = start;
    orthogonalize(&mut v0, &[], deflate);
    let nv = norm(&v0);
    if nv < 1e-10 {
        v0 = seeded_vector(n, opts.seed ^ 0xabcd_1234);
        orthogonalize(&mut v0, &[], deflate);
    }
    let nv = norm(&v0);
    for x in v0.iter_mut() {
        *x /= nv;
    }
    basis.push(v0);

    let scale = a.inf_norm().max(1.0);
    let breakdown = 1e-14 * scale;
    let mut w = vec![0.0; n];

    for j in 0..opts.max_steps {
        a.matvec(&basis[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        let alpha = dot(&w, &basis[j]);
        axpy(-alpha, &basis[j], &mut w);
        orthogonalize(&mut w, &basis, deflate);
        alphas.push(alpha);
        let beta = norm(&w);
        if beta <= breakdown {
            break;
        }
        betas.push(beta);
        let mut vnext = w.clone();
        for x in vnext.iter_mut() {
            *x /= beta;
        }
        basis.push(vnext);

        let m = alphas.len();
        if m % opts.check_every == 0 && m >= 2 * need.max(1) {
            let (_tvals, tvecs) = tridiag_eigen(&alphas, &betas[..m - 1])?;
            let kk = need.min(m);
            let all_tight = (0..kk)
                .all(|i| beta * tvecs.get(m - 1, i).abs() <= 0.5 * opts.residual_tol);
            if all_tight {
                break;
            }
        }
    }

    let m = alphas.len();
    let (tvals, tvecs) = tridiag_eigen(&alphas, &betas[..m.saturating_sub(1).min(betas.len())])?;
    let bottom_ritz = tvals[0];

    let last_beta = if basis.len() > m { *betas.last().unwrap() } else { 0.0 };
    // candidate selection: bottom Ritz pairs whose a-posteriori bound is
    // anywhere near the tolerance
    let r = (need + 3).min(m);
    let mut selected: Vec<usize> = Vec::new();
    for i in 0..r {
        let bound = last_beta * tvecs.get(m - 1, i).abs();
        if bound <= 10.0 * opts.residual_tol || i == 0 {
            selected.push(i);
        }
    }
    if selected.is_empty() {
        return Ok(RunResult {
            pairs: Vec::new(),
            bottom_ritz,
        });
    }

    // form Y = V * S on the selected columns
    let mut ys: Vec<Vec<f64>> = Vec::with_capacity(selected.len());
    for &i in &selected {
        let mut y = vec![0.0; n];
        for (k, v) in basis.iter().take(m).enumerate() {
            axpy(tvecs.get(k, i), v, &mut y);
        }
        ys.push(y);
    }
    // modified Gram-Schmidt among the candidates (they are orthonormal up
    // to rounding; drop any column that collapses)
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for mut y in ys {
        for q in &kept {
            let c = dot(&y, q);
            axpy(-c, q, &mut y);
        }
        for (_, q) in deflate {
            let c = dot(&y, q);
            axpy(-c, q, &mut y);
        }
        let ny = norm(&y);
        if ny > 1e-8 {
            for x in y.iter_mut() {
                *x /= ny;
            }
            kept.push(y);
        }
    }
    if kept.is_empty() {
        return Ok(RunResult {
            pairs: Vec::new(),
            bottom_ritz,
        });
    }

    // Rayleigh-Ritz refinement on span(kept)
    let r = kept.len();
    let mut ay: Vec<Vec<f64>> = Vec::with_capacity(r);
    for y in &kept {
        let mut t = vec![0.0; n];
        a.matvec(y, &mut t);
        ay.push(t);
    }
    let b = SymMat::from_fn(r, |i, j| 0.5 * (dot(&kept[i], &ay[j]) + dot(&kept[j], &ay[i])));
    let (mu, wrot) = sym_eigen(&b)?;
    let mut pairs = Vec::with_capacity(r);
    for c in 0..r {
        let mut z = vec![0.0; n];
        let mut az = vec![0.0; n];
        for k in 0..r {
            let coeff = wrot.get(k, c);
            axpy(coeff, &kept[k], &mut z);
            axpy(coeff, &ay[k], &mut az);
        }
        let mut res = 0.0f64;
        for i in 0..n {
            let d = az[i] - mu[c] * z[i];
            res += d * d;
        }
        pairs.push((mu[c], z, res.sqrt()));
    }
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    Ok(RunResult { pairs, bottom_ritz })
}

/// Lowest `count` eigenpairs of `a`, ascending, each with residual
/// `||A y - theta y|| <= residual_tol`.
///
/// `partner`: optional structure map commuting with `a` (antisymmetric,
/// orthogonal); used to complete degenerate pairs without extra iterations.
/// `warm_starts`: approximate eigenvectors (e.g. prolongated from a coarser
/// grid) consumed one per restart before falling back to random vectors.
pub fn lowest_eigenpairs(
    a: &SparseSym,
    count: usize,
    opts: &LanczosOptions,
    partner: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    warm_starts: &[Vec<f64>],
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = a.n;
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > n {
        return Err(Error::InvalidParameter {
            name: "count".into(),
            message: format!("requested {count} eigenpairs of a {n}-dimensional operator"),
        });
    }
    let mut converged: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut warm_iter = warm_starts.iter();
    let mut verified = false;
    let mut steps = opts.max_steps;

    for restart in 0..opts.max_restarts {
        if converged.len() >= count && (!opts.require_verification || verified) {
            break;
        }
        let (start, is_warm) = match warm_iter.next() {
            Some(w) => (w.clone(), true),
            None => (
                seeded_vector(n, opts.seed.wrapping_add(0x9e3779b9 * (restart as u64 + 1))),
                false,
            ),
        };
        let run_opts = LanczosOptions {
            max_steps: steps,
            ..opts.clone()
        };
        let need = count.saturating_sub(converged.len()).max(1) + 1;
        let result = lanczos_run(a, start, &converged, need, &run_opts)?;

        let top_before = converged.get(count - 1).map(|p| p.0);
        let margin = 10.0 * opts.residual_tol
            + 1e-12 * top_before.map(|t| t.abs()).unwrap_or(0.0).max(1.0);
        let mut new_in_window = false;
        let mut accepted_any = false;
        for (theta, y, res) in result.pairs {
            if res > opts.residual_tol {
                continue;
            }
            accepted_any = true;
            match top_before {
                Some(t) if theta > t + margin => {}
                _ => new_in_window = true,
            }
            converged.push((theta, y));
            if let Some(pmap) = partner {
                let mut yp = pmap(&converged.last().unwrap().1);
                for (_, q) in &converged {
                    let c = dot(&yp, q);
                    axpy(-c, q, &mut yp);
                }
                let np = norm(&yp);
                if np > 1e-6 {
                    for x in yp.iter_mut() {
                        *x /= np;
                    }
                    let mut ap = vec![0.0; n];
                    a.matvec(&yp, &mut ap);
                    let mut res2 = 0.0f64;
                    for i in 0..n {
                        let d = ap[i] - theta * yp[i];
                        res2 += d * d;
                    }
                    if res2.sqrt() <= 2.0 * opts.residual_tol {
                        converged.push((theta, yp));
                    }
                }
            }
        }
        converged.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        // keep a small buffer above the window for deflation; anything
        // larger may be rediscovered harmlessly
        converged.truncate(count + 4);

        if converged.len() >= count && !is_warm && !new_in_window {
            // completeness check: a random-start deflated run converged
            // nothing at or below the current top of the window, and its
            // smallest Ritz value sits above it
            let top = converged[count - 1].0;
            if result.bottom_ritz >= top - margin {
                verified = true;
            } else {
                steps = (steps * 3 / 2).min(4 * opts.max_steps);
            }
        }
        if !accepted_any && !is_warm && converged.len() < count {
            steps = (steps * 3 / 2).min(4 * opts.max_steps);
        }
    }

    if converged.len() < count {
        return Err(Error::EigenFailure(format!(
            "Lanczos converged only {} of {} requested eigenpairs (n = {}, ||A|| <= {:.3e}, tol = {:.3e})",
            converged.len(),
            count,
            n,
            a.inf_norm(),
            opts.residual_tol
        )));
    }
    converged.truncate(count);
    Ok(converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSym {
        let h = 1.0 / (n as f64 + 1.0);
        let mut trips = Vec::new();
        for i in 0..n {
            trips.push((i as u32, i as u32, 2.0 / (h * h)));
            if i + 1 < n {
                trips.push((i as u32, i as u32 + 1, -1.0 / (h * h)));
                trips.push((i as u32 + 1, i as u32, -1.0 / (h * h)));
            }
        }
        SparseSym::from_triplets(n, trips)
    }

    #[test]
    fn dirichlet_laplacian_lowest() {
        let n = 400;
        let h = 1.0 / (n as f64 + 1.0);
        let a = laplacian_1d(n);
        let opts = LanczosOptions {
            residual_tol: 1e-7 * a.inf_norm(),
            ..Default::default()
        };
        let pairs = lowest_eigenpairs(&a, 4, &opts, None, &[]).unwrap();
        for (k, (val, _)) in pairs.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = 4.0 / (h * h) * (kk * std::f64::consts::PI * h / 2.0).sin().powi(2);
            assert!(
                (val - exact).abs() < 1e-8 * exact,
                "k={k}: {val} vs {exact}"
            );
        }
    }

    #[test]
    fn degenerate_pairs_found_via_restarts() {
        // block diagonal with two identical Laplacian blocks: every
        // eigenvalue has multiplicity two
        let n = 120;
        let h = 1.0 / (n as f64 + 1.0);
        let mut trips = Vec::new();
        for blk in 0..2u32 {
            let off = blk * n as u32;
            for i in 0..n as u32 {
                trips.push((off + i, off + i, 2.0 / (h * h)));
                if i + 1 < n as u32 {
                    trips.push((off + i, off + i + 1, -1.0 / (h * h)));
                    trips.push((off + i + 1, off + i, -1.0 / (h * h)));
                }
            }
        }
        let a = SparseSym::from_triplets(2 * n, trips);
        let opts = LanczosOptions {
            residual_tol: 1e-8 * a.inf_norm(),
            ..Default::default()
        };
        let pairs = lowest_eigenpairs(&a, 4, &opts, None, &[]).unwrap();
        let e1 = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        let e2 = 4.0 / (h * h) * (std::f64::consts::PI * h).sin().powi(2);
        assert!((pairs[0].0 - e1).abs() < 1e-7 * e1);
        assert!((pairs[1].0 - e1).abs() < 1e-7 * e1, "missed the degenerate copy");
        assert!((pairs[2].0 - e2).abs() < 1e-7 * e2);
        assert!((pairs[3].0 - e2).abs() < 1e-7 * e2);
    }
}
