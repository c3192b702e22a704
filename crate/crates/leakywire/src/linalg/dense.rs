//! Dense symmetric/Hermitian eigensolver.
//!
//! The kernel is the classical pair of EISPACK routines: Householder
//! reduction to tridiagonal form (`tred2`) followed by the implicit-shift
//! QL iteration (`tql2`). Hermitian matrices are solved through the real
//! doubling embedding, so one real-symmetric kernel serves every module.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense real matrix, row-major. Used both for symmetric inputs and for the
/// orthogonal eigenvector matrix (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct SymMat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(n: usize) -> Self {
        SymMat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut m = SymMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }
}

#[inline]
fn pythag(a: f64, b: f64) -> f64 {
    let absa = a.abs();
    let absb = b.abs();
    if absa > absb {
        let r = absb / absa;
        absa * (1.0 + r * r).sqrt()
    } else if absb == 0.0 {
        0.0
    } else {
        let r = absa / absb;
        absb * (1.0 + r * r).sqrt()
    }
}

/// Householder reduction of a real symmetric matrix to tridiagonal form.
/// On exit `d` holds the diagonal and `e[1..]` the subdiagonal (`e[0] = 0`).
/// When `with_vectors` is set, `a` is overwritten with the accumulated
/// orthogonal transformation, otherwise its contents are scratch.
fn tred2(a: &mut SymMat, d: &mut [f64], e: &mut [f64], with_vectors: bool) {
    let n = a.n;
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let mut scale = 0.0;
            for k in 0..=l {
                scale += a.get(i, k).abs();
            }
            if scale == 0.0 {
                e[i] = a.get(i, l);
            } else {
                for k in 0..=l {
                    let v = a.get(i, k) / scale;
                    a.set(i, k, v);
                    h += v * v;
                }
                let f = a.get(i, l);
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a.set(i, l, f - g);
                let mut f_acc = 0.0;
                for j in 0..=l {
                    if with_vectors {
                        a.set(j, i, a.get(i, j) / h);
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a.get(j, k) * a.get(i, k);
                    }
                    for k in (j + 1)..=l {
                        g += a.get(k, j) * a.get(i, k);
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a.get(i, j);
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let v = a.get(j, k) - (f * e[k] + g * a.get(i, k));
                        a.set(j, k, v);
                    }
                }
            }
        } else {
            e[i] = a.get(i, l);
        }
        d[i] = h;
    }
    if with_vectors {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if with_vectors {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a.get(i, k) * a.get(k, j);
                    }
                    for k in 0..i {
                        let v = a.get(k, j) - g * a.get(k, i);
                        a.set(k, j, v);
                    }
                }
            }
            d[i] = a.get(i, i);
            a.set(i, i, 1.0);
            for j in 0..i {
                a.set(j, i, 0.0);
                a.set(i, j, 0.0);
            }
        } else {
            d[i] = a.get(i, i);
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `d` carries the diagonal, `e[1..]` the subdiagonal on entry (as produced
/// by [`tred2`]); on exit `d` holds the (unsorted) eigenvalues. When `z` is
/// provided its columns are rotated along, turning the tridiagonalizing
/// transform into the full eigenvector matrix.
pub(crate) fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut SymMat>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenFailure(format!(
                    "QL iteration did not converge at index {l} (n = {n}, last off-diagonal = {:.3e})",
                    e[l]
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = pythag(g, 1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    let nn = zm.n;
                    for k in 0..nn {
                        f = zm.get(k, i + 1);
                        let zki = zm.get(k, i);
                        zm.set(k, i + 1, s * zki + c * f);
                        zm.set(k, i, c * zki - s * f);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a dense real symmetric matrix, ascending.
pub fn sym_eigenvalues(mat: &SymMat) -> Result<Vec<f64>> {
    let mut a = mat.clone();
    let n = a.n;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, &mut d, &mut e, false);
    tql2(&mut d, &mut e, None)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Eigenvalues and eigenvectors of a dense real symmetric matrix.
/// Eigenvalues ascending; column `j` of the returned matrix is the
/// eigenvector for eigenvalue `j`.
pub fn sym_eigen(mat: &SymMat) -> Result<(Vec<f64>, SymMat)> {
    let mut a = mat.clone();
    let n = a.n;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut a, &mut d, &mut e, true);
    tql2(&mut d, &mut e, Some(&mut a))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vecs = SymMat::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            vecs.set(k, new_col, a.get(k, old_col));
        }
    }
    Ok((vals, vecs))
}

/// Dense complex Hermitian matrix, row-major.
#[derive(Debug, Clone)]
pub struct HermMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl HermMat {
    pub fn zeros(n: usize) -> Self {
        HermMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    /// Real doubling `[[A, -B], [B, A]]` of `H = A + iB`. Every eigenvalue
    /// of `H` appears exactly twice in the embedding.
    pub fn real_doubling(&self) -> SymMat {
        let n = self.n;
        let mut m = SymMat::zeros(2 * n);
        for i in 0..n {
            for j in 0..n {
                let v = self.get(i, j);
                m.set(i, j, v.re);
                m.set(n + i, n + j, v.re);
                m.set(i, n + j, -v.im);
                m.set(n + i, j, v.im);
            }
        }
        m
    }

    /// All `n` eigenvalues, ascending with multiplicity. Solved through the
    /// doubled real matrix; the duplicated pairs are collapsed and checked
    /// to agree to `1e-10 * scale`.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let doubled = self.real_doubling();
        let all = sym_eigenvalues(&doubled)?;
        collapse_pairs(&all)
    }
}

/// Collapse the exact eigenvalue doubling of the real embedding: sorted
/// values come in adjacent pairs; keep one of each and verify the pairing.
pub(crate) fn collapse_pairs(sorted: &[f64]) -> Result<Vec<f64>> {
    let scale = sorted.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;
    let mut out = Vec::with_capacity(sorted.len() / 2);
    let mut i = 0;
    while i + 1 < sorted.len() {
        if (sorted[i + 1] - sorted[i]).abs() > tol {
            return Err(Error::EigenFailure(format!(
                "doubled spectrum failed to pair at index {i}: {} vs {} (tol {tol:.3e})",
                sorted[i],
                sorted[i + 1]
            )));
        }
        out.push(0.5 * (sorted[i] + sorted[i + 1]));
        i += 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(n: usize, entries: &[f64]) -> SymMat {
        SymMat {
            n,
            data: entries.to_vec(),
        }
    }

    #[test]
    fn two_by_two_analytic() {
        let m = mat(2, &[2.0, 1.0, 1.0, 2.0]);
        let vals = sym_eigenvalues(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix() {
        let m = SymMat::from_fn(5, |i, j| if i == j { (i as f64) - 2.0 } else { 0.0 });
        let vals = sym_eigenvalues(&m).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!((v - (k as f64 - 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn random_symmetric_residuals_and_trace() {
        // deterministic pseudo-random symmetric matrix
        let n = 24;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = SymMat::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = next();
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let (vals, vecs) = sym_eigen(&m).unwrap();
        let sum: f64 = vals.iter().sum();
        assert!((sum - trace).abs() < 1e-12 * n as f64);
        // residuals ||A v - lambda v||
        for j in 0..n {
            let mut res = 0.0f64;
            let mut norm = 0.0f64;
            for i in 0..n {
                let mut av = 0.0;
                for k in 0..n {
                    av += m.get(i, k) * vecs.get(k, j);
                }
                let r = av - vals[j] * vecs.get(i, j);
                res += r * r;
                norm += vecs.get(i, j) * vecs.get(i, j);
            }
            assert!((norm - 1.0).abs() < 1e-10);
            assert!(res.sqrt() < 1e-12 * n as f64);
        }
    }

    #[test]
    fn hermitian_doubling_pairs() {
        // H = [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let mut h = HermMat::zeros(2);
        h.set(0, 0, Complex64::new(1.0, 0.0));
        h.set(1, 1, Complex64::new(1.0, 0.0));
        h.set(0, 1, Complex64::new(0.0, 1.0));
        h.set(1, 0, Complex64::new(0.0, -1.0));
        let vals = h.eigenvalues().unwrap();
        assert_eq!(vals.len(), 2);
        assert!(vals[0].abs() < 1e-13);
        assert!((vals[1] - 2.0).abs() < 1e-13);
    }
}
