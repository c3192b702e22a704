//! Sturm-sequence counting and bisection for symmetric tridiagonal
//! matrices, including the quasi-periodic variant with a real corner
//! coupling between the first and last node.

const PIVMIN: f64 = 1e-290;

#[inline]
fn guard(d: f64) -> f64 {
    if d.abs() < PIVMIN {
        if d < 0.0 {
            -PIVMIN
        } else {
            PIVMIN
        }
    } else {
        d
    }
}

/// Number of eigenvalues strictly below `x` (LDL^T pivot sign count).
/// `off[i]` couples nodes `i` and `i+1`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n.max(1));
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..n {
        let mut piv = diag[i] - x;
        if i > 0 {
            piv -= off[i - 1] * off[i - 1] / d;
        }
        if piv < 0.0 {
            count += 1;
        }
        d = guard(piv);
    }
    count
}

/// Sturm count for a tridiagonal matrix with an extra real entry `corner`
/// at positions (0, n-1) and (n-1, 0). The fill-in produced by eliminating
/// the corner stays confined to the last row/column and is tracked exactly.
pub fn sturm_count_periodic(diag: &[f64], off: &[f64], corner: f64, x: f64) -> usize {
    let n = diag.len();
    assert!(n >= 3, "periodic Sturm count needs n >= 3");
    let mut count = 0;
    let mut d = diag[0] - x;
    let mut g = corner; // current entry (row, n-1)
    let mut last = diag[n - 1] - x;
    for i in 0..(n - 1) {
        if d < 0.0 {
            count += 1;
        }
        let dg = guard(d);
        if i == n - 2 {
            // the coupling of the penultimate row to the last one is the
            // tridiagonal entry merged with the accumulated fill
            let c = off[n - 2] + g;
            last -= c * c / dg;
        } else {
            let b = off[i];
            last -= g * g / dg;
            let g_next = -b * g / dg;
            d = diag[i + 1] - x - b * b / dg;
            g = g_next;
        }
    }
    if last < 0.0 {
        count += 1;
    }
    count
}

/// Gershgorin bounds for the tridiagonal (+ optional corner) matrix.
fn gershgorin(diag: &[f64], off: &[f64], corner: f64) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        if i == 0 || i == n - 1 {
            r += corner.abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

fn bisect<F: Fn(f64) -> usize>(count: &F, k: usize, mut lo: f64, mut hi: f64) -> f64 {
    // smallest x with count(x) >= k + 1
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Lowest `count` eigenvalues of the tridiagonal matrix, ascending.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    let (lo, hi) = gershgorin(diag, off, 0.0);
    let f = |x: f64| sturm_count(diag, off, x);
    (0..count.min(diag.len()))
        .map(|k| bisect(&f, k, lo, hi))
        .collect()
}

/// Lowest `count` eigenvalues of the tridiagonal-plus-corner matrix.
pub fn lowest_eigenvalues_periodic(diag: &[f64], off: &[f64], corner: f64, count: usize) -> Vec<f64> {
    let (lo, hi) = gershgorin(diag, off, corner);
    let f = |x: f64| sturm_count_periodic(diag, off, corner, x);
    (0..count.min(diag.len()))
        .map(|k| bisect(&f, k, lo, hi))
        .collect()
}

/// All eigenvalues strictly below `bound`, ascending.
pub fn eigenvalues_below(diag: &[f64], off: &[f64], bound: f64) -> Vec<f64> {
    let n_below = sturm_count(diag, off, bound);
    lowest_eigenvalues(diag, off, n_below)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{sym_eigenvalues, SymMat};

    #[test]
    fn free_laplacian_eigenvalues() {
        // -u'' on (0,1), Dirichlet, n interior points: exact discrete
        // eigenvalues (4/h^2) sin^2(k pi h / 2).
        let n = 200;
        let h = 1.0 / (n as f64 + 1.0);
        let diag = vec![2.0 / (h * h); n];
        let off = vec![-1.0 / (h * h); n - 1];
        let vals = lowest_eigenvalues(&diag, &off, 3);
        for (k, v) in vals.iter().enumerate() {
            let kk = (k + 1) as f64;
            let exact = 4.0 / (h * h) * (kk * std::f64::consts::PI * h / 2.0).sin().powi(2);
            assert!((v - exact).abs() < 1e-9 * exact.max(1.0), "k={k}");
        }
    }

    #[test]
    fn periodic_count_matches_dense() {
        let n = 12;
        let mut state = 0xdeadbeefu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let diag: Vec<f64> = (0..n).map(|_| next() * 4.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|_| next()).collect();
        let corner = next();
        let mut m = SymMat::zeros(n);
        for i in 0..n {
            m.set(i, i, diag[i]);
        }
        for i in 0..n - 1 {
            m.set(i, i + 1, off[i]);
            m.set(i + 1, i, off[i]);
        }
        m.set(0, n - 1, corner);
        m.set(n - 1, 0, corner);
        let dense = sym_eigenvalues(&m).unwrap();
        for x in [-3.0, -1.0, -0.2, 0.0, 0.4, 1.5, 3.0] {
            let expected = dense.iter().filter(|&&v| v < x).count();
            assert_eq!(
                sturm_count_periodic(&diag, &off, corner, x),
                expected,
                "x = {x}"
            );
        }
        let lowest = lowest_eigenvalues_periodic(&diag, &off, corner, 4);
        for k in 0..4 {
            assert!((lowest[k] - dense[k]).abs() < 1e-10);
        }
    }
}
