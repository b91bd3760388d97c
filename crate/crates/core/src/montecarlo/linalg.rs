//! Small dense complex linear algebra: Gram matrices, Cholesky solves and a
//! cyclic Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 40;
const HERMITIAN_TOL: f64 = 1e-12;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
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

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        out
    }

    /// `A†A`, filled as an exactly Hermitian matrix.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..self.rows {
                    acc += self[(r, i)].conj() * self[(r, j)];
                }
                if i == j {
                    acc.im = 0.0;
                }
                g[(i, j)] = acc;
                g[(j, i)] = acc.conj();
            }
        }
        g
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Lower Cholesky factor `L` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Fails when a pivot drops below `1e-14` of the largest diagonal entry;
    /// the message carries the squared pivot ratio as a condition estimate.
    pub fn new(a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Domain("Cholesky needs a square matrix".into()));
        }
        let n = a.rows;
        let scale = (0..n).map(|i| a[(i, i)].re).fold(0.0, f64::max);
        let mut l = CMatrix::zeros(n, n);
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d.is_finite() && d > 1e-14 * scale) {
                let largest = pivots.iter().cloned().fold(d.abs(), f64::max);
                let smallest = pivots.iter().cloned().fold(d.abs(), f64::min);
                return Err(Error::Numeric(format!(
                    "matrix is singular to working precision: pivot {j} is {d:e}, \
                     pivot ratio {:e}",
                    smallest / largest
                )));
            }
            pivots.push(d);
            let djj = d.sqrt();
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &CMatrix {
        &self.l
    }

    /// Solves `L y = b`.
    #[allow(clippy::needless_range_loop)]
    pub fn forward(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves `A x = b`.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.rows;
        let mut x = self.forward(b);
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// `[A⁻¹]_{ii} = ‖L⁻¹ e_i‖²`.
    pub fn inverse_diagonal_entry(&self, i: usize) -> f64 {
        let n = self.l.rows;
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[i] = Complex64::new(1.0, 0.0);
        self.forward(&e).iter().map(|z| z.norm_sqr()).sum()
    }

    /// Whole diagonal of `A⁻¹`.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let n = self.l.rows;
        // Columns of L⁻¹, accumulated row by row of the triangular inverse.
        let mut linv = CMatrix::zeros(n, n);
        for j in 0..n {
            linv[(j, j)] = Complex64::new(1.0, 0.0) / self.l[(j, j)];
            for i in j + 1..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in j..i {
                    s -= self.l[(i, k)] * linv[(k, j)];
                }
                linv[(i, j)] = s / self.l[(i, i)];
            }
        }
        (0..n).map(|j| (j..n).map(|i| linv[(i, j)].norm_sqr()).sum()).collect()
    }
}

/// Eigendecomposition `W = U·diag(values)·U†`; column `j` of `U` is the
/// eigenvector of `values[j]`, with values ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    pub sweeps: usize,
}

/// Cyclic Jacobi with complex rotations. Stops once the off-diagonal
/// Frobenius norm is below `1e-13` of the full norm.
pub fn hermitian_eig(w: &CMatrix) -> Result<HermitianEigen> {
    if !w.is_square() {
        return Err(Error::Domain(format!("eigensolver needs a square matrix, got {}x{}", w.rows, w.cols)));
    }
    let n = w.rows;
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in i..n {
            if (w[(i, j)] - w[(j, i)].conj()).norm() > HERMITIAN_TOL * scale.max(1.0) {
                return Err(Error::Domain(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    let mut a = w.clone();
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut u = CMatrix::identity(n);
    let total: f64 = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let off = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL * total {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric(format!(
                "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut u, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    Ok(HermitianEigen { values, vectors, sweeps })
}

/// Annihilates `a[p][q]` with `J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]`,
/// `φ = arg a[p][q]`, and applies `a ← J†aJ`, `u ← uJ`.
fn rotate(a: &mut CMatrix, u: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let n = a.rows;
    let phase = apq / g;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let jpq = phase * s;
    let jqp = -phase.conj() * s;

    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c + akq * jqp;
        a[(k, q)] = akp * jpq + akq * c;
        let (ukp, ukq) = (u[(k, p)], u[(k, q)]);
        u[(k, p)] = ukp * c + ukq * jqp;
        u[(k, q)] = ukp * jpq + ukq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c + aqk * jqp.conj();
        a[(q, k)] = apk * jpq.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}
