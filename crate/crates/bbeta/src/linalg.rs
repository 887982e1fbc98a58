//! Minimal dense linear algebra for the small systems this crate needs
//! (design-matrix rank checks and (p+q+2)-dimensional information matrices).

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self {
            rows: r,
            cols: c,
            data,
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Numerical rank via Gaussian elimination with partial pivoting.
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..m.cols {
            let (best_row, best_val) = (pivot_row..m.rows)
                .map(|r| (r, m.get(r, col).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap_or((pivot_row, 0.0));
            if best_val <= tol {
                continue;
            }
            m.swap_rows(pivot_row, best_row);
            let pivot = m.get(pivot_row, col);
            for r in (pivot_row + 1)..m.rows {
                let factor = m.get(r, col) / pivot;
                for c in col..m.cols {
                    let v = m.get(r, c) - factor * m.get(pivot_row, c);
                    m.set(r, c, v);
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Invert a square matrix in place via Gauss–Jordan with partial pivoting.
/// Returns `None` when a pivot falls below `tol`.
pub fn invert(matrix: &Matrix, tol: f64) -> Option<Matrix> {
    assert_eq!(matrix.rows, matrix.cols, "inversion needs a square matrix");
    let n = matrix.rows;
    let mut a = matrix.clone();
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        inv.set(i, i, 1.0);
    }

    for col in 0..n {
        let (best, best_val) = (col..n)
            .map(|r| (r, a.get(r, col).abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if best_val <= tol || !best_val.is_finite() {
            return None;
        }
        a.swap_rows(col, best);
        inv.swap_rows(col, best);

        let pivot = a.get(col, col);
        for c in 0..n {
            a.set(col, c, a.get(col, c) / pivot);
            inv.set(col, c, inv.get(col, c) / pivot);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a.get(r, col);
            if factor == 0.0 {
                continue;
            }
            for c in 0..n {
                let av = a.get(r, c) - factor * a.get(col, c);
                a.set(r, c, av);
                let iv = inv.get(r, c) - factor * inv.get(col, c);
                inv.set(r, c, iv);
            }
        }
    }
    Some(inv)
}
