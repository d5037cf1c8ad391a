use super::scalar::{working_epsilon, Scalar};
use crate::error::{Error, Result};

/// Row-major dense matrix of scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let data: Vec<Scalar> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), nrows * cols, "ragged rows");
        DenseMatrix {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn max_abs(&self) -> Scalar {
        super::scalar::max_abs(&self.data)
    }

    /// Coefficients `[p_0, …, p_{m-1}]` of `det(wI − M) = w^m + p_{m-1}w^{m-1} + … + p_0`,
    /// by the Faddeev–LeVerrier recursion.
    pub fn char_poly(&self) -> Vec<Scalar> {
        assert_eq!(self.rows, self.cols, "char_poly needs a square matrix");
        let m = self.rows;
        let mut coeffs = vec![Scalar::zero(); m];
        let mut aux = DenseMatrix::identity(m);
        for k in 1..=m {
            let am = self.mul(&aux);
            let c = -am.trace() / k as i64;
            coeffs[m - k] = c.clone();
            aux = am;
            for i in 0..m {
                let idx = i * m + i;
                aux.data[idx] += &c;
            }
        }
        coeffs
    }
}

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    r: DenseMatrix,
    reflectors: Vec<(Vec<Scalar>, Scalar)>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(mut a: DenseMatrix) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::with_capacity(m.min(n));
        for k in 0..m.min(n) {
            let mut best = k;
            let mut best_norm = Scalar::from_i64(-1);
            for j in k..n {
                let norm: Scalar = (k..m).map(|i| a.get(i, j).square()).sum();
                if norm > best_norm {
                    best_norm = norm;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    a.data.swap(i * n + k, i * n + best);
                }
                perm.swap(k, best);
            }
            let norm = best_norm.sqrt();
            let mut v: Vec<Scalar> = (k..m).map(|i| a.get(i, k).clone()).collect();
            if norm.is_zero() {
                reflectors.push((v, Scalar::zero()));
                continue;
            }
            let alpha = if v[0].is_sign_negative() { norm } else { -norm };
            v[0] -= &alpha;
            let vnorm2: Scalar = v.iter().map(Scalar::square).sum();
            if vnorm2.is_zero() {
                reflectors.push((v, Scalar::zero()));
                continue;
            }
            let beta = Scalar::from_i64(2) / &vnorm2;
            for j in k..n {
                let dot: Scalar = v.iter().enumerate().map(|(t, vi)| vi * a.get(k + t, j)).sum();
                let f = &beta * dot;
                for (t, vi) in v.iter().enumerate() {
                    let idx = (k + t) * n + j;
                    a.data[idx] -= &f * vi;
                }
            }
            a.set(k, k, alpha);
            for i in k + 1..m {
                a.set(i, k, Scalar::zero());
            }
            reflectors.push((v, beta));
        }
        PivotedQr {
            r: a,
            reflectors,
            perm,
        }
    }

    /// Diagonal of R in pivot order; magnitudes are non-increasing.
    pub fn r_diag(&self) -> Vec<Scalar> {
        (0..self.r.rows.min(self.r.cols))
            .map(|k| self.r.get(k, k).abs())
            .collect()
    }

    /// Numerical rank: pivots with `|R_kk| > rel_tol * |R_00|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let diag = self.r_diag();
        let Some(first) = diag.first() else { return 0 };
        if first.is_zero() {
            return 0;
        }
        let threshold = first * rel_tol;
        diag.iter().take_while(|d| **d > threshold).count()
    }

    fn default_rel_tol(&self) -> f64 {
        let dim = self.r.rows.max(self.r.cols) as f64;
        (working_epsilon() * dim * 64.0).to_f64()
    }

    fn apply_qt(&self, b: &[Scalar]) -> Vec<Scalar> {
        let mut y = b.to_vec();
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            if beta.is_zero() {
                continue;
            }
            let dot: Scalar = v.iter().enumerate().map(|(t, vi)| vi * &y[k + t]).sum();
            let f = beta * dot;
            for (t, vi) in v.iter().enumerate() {
                y[k + t] -= &f * vi;
            }
        }
        y
    }

    /// Basic least-squares solution of `A x ≈ b`. Pivots below the rank
    /// threshold get zero weight; `rel_tol = 0` picks a precision-based default.
    pub fn solve(&self, b: &[Scalar], rel_tol: f64) -> Result<Vec<Scalar>> {
        if b.len() != self.r.rows {
            return Err(Error::Domain(format!(
                "right-hand side has {} rows, matrix has {}",
                b.len(),
                self.r.rows
            )));
        }
        let tol = if rel_tol > 0.0 { rel_tol } else { self.default_rel_tol() };
        let rank = self.rank(tol);
        let y = self.apply_qt(b);
        let n = self.r.cols;
        let mut z = vec![Scalar::zero(); n];
        for k in (0..rank).rev() {
            let mut acc = y[k].clone();
            for (j, zj) in z.iter().enumerate().take(rank).skip(k + 1) {
                acc -= self.r.get(k, j) * zj;
            }
            z[k] = (acc / self.r.get(k, k)).finite()?;
        }
        let mut x = vec![Scalar::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k].clone();
        }
        Ok(x)
    }

    /// A null vector of the matrix when its numerical rank is `cols - 1`.
    pub fn null_vector(&self, rel_tol: f64) -> Result<Vec<Scalar>> {
        let n = self.r.cols;
        let rank = self.rank(rel_tol);
        if rank + 1 != n {
            return Err(Error::RankDeficient {
                expected: 1,
                found: n - rank,
            });
        }
        let mut z = vec![Scalar::zero(); n];
        z[rank] = Scalar::one();
        for k in (0..rank).rev() {
            let mut acc = -self.r.get(k, rank);
            for (j, zj) in z.iter().enumerate().take(rank).skip(k + 1) {
                acc -= self.r.get(k, j) * zj;
            }
            z[k] = (acc / self.r.get(k, k)).finite()?;
        }
        let mut x = vec![Scalar::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k].clone();
        }
        Ok(x)
    }
}
