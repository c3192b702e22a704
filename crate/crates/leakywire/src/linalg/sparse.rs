//! Sparse symmetric matrices in CSR form.

/// Sparse real symmetric matrix. Both triangles are stored so that the
/// matrix-vector product is a single row sweep.
#[derive(Debug, Clone)]
pub struct SparseSym {
    pub n: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl SparseSym {
    /// Build from triplets; duplicate (i, j) entries are summed. The caller
    /// is responsible for supplying a symmetric pattern.
    pub fn from_triplets(n: usize, mut trips: Vec<(u32, u32, f64)>) -> Self {
        trips.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col = Vec::with_capacity(trips.len());
        let mut val = Vec::with_capacity(trips.len());
        let mut iter = trips.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if i2 == i && j2 == j {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                row_ptr[i as usize + 1] += 1;
                col.push(j);
                val.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n,
            row_ptr,
            col,
            val,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.val[k] * x[self.col[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// Maximum absolute row sum; an upper bound for the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n {
            let s: f64 = (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(|k| self.val[k].abs())
                .sum();
            best = best.max(s);
        }
        best
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_with_duplicates() {
        let trips = vec![
            (0, 0, 1.0),
            (0, 0, 1.0),
            (0, 1, 2.0),
            (1, 0, 2.0),
            (1, 1, 3.0),
        ];
        let m = SparseSym::from_triplets(2, trips);
        let mut y = vec![0.0; 2];
        m.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![4.0, 5.0]);
        assert_eq!(m.nnz(), 4);
    }
}
