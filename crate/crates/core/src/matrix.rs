//! Minimal dense complex matrix used for correlation blocks and response tables.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn scale(&mut self, s: Complex64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        m.scale(s);
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest |A_ij − conj(A_ji)| relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "hermitian_defect on a non-square matrix");
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }

    /// Whether the Hermitian part has no eigenvalue below `-rel_tol · |trace|`.
    ///
    /// Decided by attempting a Cholesky factorisation of `A + rel_tol·|tr A|·I`,
    /// which succeeds exactly when that shifted matrix is positive definite.
    pub fn is_positive_semidefinite(&self, rel_tol: f64) -> bool {
        assert_eq!(self.rows, self.cols, "PSD test on a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return true;
        }
        let shift = rel_tol * self.trace().re.abs().max(f64::MIN_POSITIVE);
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = 0.5 * (self[(j, j)].re + self[(j, j)].re) + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let a = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                let mut s = a;
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    /// self += w · Σ_r conj(a_r) ⊗ b_r over the rows `r` of `a` and `b`,
    /// i.e. `self[i][j] += w Σ_r conj(a[r][i]) b[r][j]`.
    pub fn accumulate_cross(&mut self, a: &CMatrix, b: &CMatrix, w: f64) {
        assert_eq!(a.rows, b.rows);
        assert_eq!(self.rows, a.cols);
        assert_eq!(self.cols, b.cols);
        for r in 0..a.rows {
            let ar = a.row(r);
            let br = b.row(r);
            for (i, av) in ar.iter().enumerate() {
                if av.re == 0.0 && av.im == 0.0 {
                    continue;
                }
                let c = av.conj() * w;
                let out = self.row_mut(i);
                for (o, bv) in out.iter_mut().zip(br) {
                    *o += c * bv;
                }
            }
        }
    }
}

impl CMatrix {
    /// Block variant of [`CMatrix::accumulate_cross`]: `a` and `b` cover the
    /// output columns starting at `row_off` and `col_off` respectively.
    pub fn accumulate_cross_block(&mut self, a: &CMatrix, b: &CMatrix, w: f64, row_off: usize, col_off: usize) {
        assert_eq!(a.rows, b.rows);
        assert!(row_off + a.cols <= self.rows);
        assert!(col_off + b.cols <= self.cols);
        for r in 0..a.rows {
            let ar = a.row(r);
            // skip a leading run of zeros in b (triangular responses)
            let start = b.row(r).iter().position(|v| v.re != 0.0 || v.im != 0.0).unwrap_or(b.cols);
            let br = &b.row(r)[start..];
            for (i, av) in ar.iter().enumerate() {
                if av.re == 0.0 && av.im == 0.0 {
                    continue;
                }
                let c = av.conj() * w;
                let out = &mut self.row_mut(row_off + i)[col_off + start..col_off + b.cols];
                for (o, bv) in out.iter_mut().zip(br) {
                    *o += c * bv;
                }
            }
        }
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Copy of the leading `rows × cols` block, zero-padded where `self` is smaller.
    pub fn resized(&self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
