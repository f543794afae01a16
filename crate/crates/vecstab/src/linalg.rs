//! Dense linear algebra for small matrices.
//!
//! Everything here targets the sizes this crate actually meets: comparison
//! matrices up to a few dozen rows and SDP blocks up to a few hundred.
//! Eigenvalues of general real matrices come from Householder reduction to
//! Hessenberg form followed by the Francis double-shift QR iteration, the
//! classic EISPACK `orthes`/`hqr` pair. Symmetric eigenproblems use cyclic
//! Jacobi rotations. The slice-level kernels at the bottom are shared with
//! the SDP solver's hot loop.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("linear system is singular or near-singular (pivot {0:.3e})")]
    Singular(f64),
    #[error("eigenvalue iteration exceeded {0} steps")]
    EigenNoConvergence(usize),
    #[error("solution residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Mat, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch(
                "ragged row lengths".to_string(),
            ));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "inner dimensions must agree");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = self.clone();
        for a in &mut out.data {
            *a *= s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn to_rows_vec(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Eigenvalues of a square real matrix, sorted by real part then imaginary
/// part, both ascending. The QR iteration is capped at `100 * n` steps.
pub fn eigenvalues(a: &Mat) -> Result<Vec<Complex64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eigs = hqr(&mut h, 100 * n)?;
    eigs.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    Ok(eigs)
}

/// Largest real part over the spectrum.
pub fn max_re(eigs: &[Complex64]) -> f64 {
    eigs.iter().fold(f64::NEG_INFINITY, |m, e| m.max(e.re))
}

/// Householder reduction to upper Hessenberg form (eigenvalues only, the
/// orthogonal transform is not accumulated).
fn hessenberg(a: &mut Mat) {
    let n = a.rows;
    let mut ort = vec![0.0; n];
    for m in 1..n.saturating_sub(1) {
        let scale: f64 = (m..n).map(|i| a.get(i, m - 1).abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..n).rev() {
            ort[i] = a.get(i, m - 1) / scale;
            h += ort[i] * ort[i];
        }
        let g = -h.sqrt().copysign(ort[m]);
        h -= ort[m] * g;
        ort[m] -= g;
        // apply I - u u^T / h from the left, then the right
        for j in m..n {
            let mut f = 0.0;
            for i in (m..n).rev() {
                f += ort[i] * a.get(i, j);
            }
            f /= h;
            for i in m..n {
                let v = a.get(i, j) - f * ort[i];
                a.set(i, j, v);
            }
        }
        for i in 0..n {
            let mut f = 0.0;
            for j in (m..n).rev() {
                f += ort[j] * a.get(i, j);
            }
            f /= h;
            for j in m..n {
                let v = a.get(i, j) - f * ort[j];
                a.set(i, j, v);
            }
        }
        a.set(m, m - 1, scale * g);
        for i in m + 1..n {
            a.set(i, m - 1, 0.0);
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, following the
/// EISPACK `hqr` routine. Destroys `hm`.
fn hqr(hm: &mut Mat, cap: usize) -> Result<Vec<Complex64>, LinalgError> {
    let n = hm.rows as isize;
    let nc = hm.cols;
    let hdat = &mut hm.data;
    macro_rules! h {
        ($i:expr, $j:expr) => {
            hdat[($i) as usize * nc + ($j) as usize]
        };
    }
    let mut wr = vec![0.0f64; n as usize];
    let mut wi = vec![0.0f64; n as usize];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in (i - 1).max(0)..n {
            anorm += h!(i, j).abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n as usize]);
    }
    let mut total = 0usize;
    let mut t = 0.0;
    let mut nn = n - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // find a negligible subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let mut s = h!(l - 1, l - 1).abs() + h!(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h!(l, l - 1).abs() <= f64::EPSILON * s {
                    break;
                }
                l -= 1;
            }
            let mut x = h!(nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                nn -= 1;
                break;
            }
            let mut y = h!(nn - 1, nn - 1);
            let mut w = h!(nn, nn - 1) * h!(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    wr[(nn - 1) as usize] = x + z;
                    wr[nn as usize] = if z != 0.0 { x - w / z } else { x + z };
                } else {
                    wr[(nn - 1) as usize] = x + p;
                    wr[nn as usize] = x + p;
                    wi[(nn - 1) as usize] = z;
                    wi[nn as usize] = -z;
                }
                nn -= 2;
                break;
            }
            if total >= cap {
                return Err(LinalgError::EigenNoConvergence(cap));
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nn {
                    h!(i, i) -= x;
                }
                let s = h!(nn, nn - 1).abs() + h!(nn - 1, nn - 2).abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            its += 1;
            total += 1;
            // look for two consecutive small subdiagonals
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0f64, 0.0f64, 0.0f64);
            while m >= l {
                let z = h!(m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h!(m + 1, m) + h!(m, m + 1);
                q = h!(m + 1, m + 1) - z - rr - ss;
                r = h!(m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h!(m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (h!(m - 1, m - 1).abs() + z.abs() + h!(m + 1, m + 1).abs());
                if u <= f64::EPSILON * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h!(i, i - 2) = 0.0;
                if i > m + 2 {
                    h!(i, i - 3) = 0.0;
                }
            }
            // double QR sweep over rows l..nn
            for k in m..nn {
                if k != m {
                    p = h!(k, k - 1);
                    q = h!(k + 1, k - 1);
                    r = if k != nn - 1 { h!(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h!(k, k - 1) = -h!(k, k - 1);
                    }
                } else {
                    h!(k, k - 1) = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = h!(k, j) + q * h!(k + 1, j);
                    if k != nn - 1 {
                        pp += r * h!(k + 2, j);
                        h!(k + 2, j) -= pp * z;
                    }
                    h!(k + 1, j) -= pp * y;
                    h!(k, j) -= pp * x;
                }
                let iupper = nn.min(k + 3);
                for i in l..=iupper {
                    let mut pp = x * h!(i, k) + y * h!(i, k + 1);
                    if k != nn - 1 {
                        pp += z * h!(i, k + 2);
                        h!(i, k + 2) -= pp * r;
                    }
                    h!(i, k + 1) -= pp * q;
                    h!(i, k) -= pp;
                }
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}

/// Solves `A^T P + P A = -Q` for symmetric `P` through the Kronecker-product
/// linear system. Fails if the spectrum of `A` makes the equation singular or
/// the residual exceeds `1e-10 * (1 + max|Q|)`.
pub fn solve_lyapunov(a: &Mat, q: &Mat) -> Result<Mat, LinalgError> {
    if !a.is_square() || !q.is_square() || a.rows != q.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "Lyapunov equation needs square matrices of equal size, got {}x{} and {}x{}",
            a.rows, a.cols, q.rows, q.cols
        )));
    }
    let n = a.rows;
    let mut big = Mat::zeros(n * n, n * n);
    let mut rhs = vec![0.0; n * n];
    // unknown P is row-stacked; (A^T P)_{ij} couples P_{kj}, (P A)_{ij} couples P_{ik}
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            rhs[r] = -q.get(i, j);
            for k in 0..n {
                let s1 = k * n + j;
                big.set(r, s1, big.get(r, s1) + a.get(k, i));
                let s2 = i * n + k;
                big.set(r, s2, big.get(r, s2) + a.get(k, j));
            }
        }
    }
    let x = solve_linear(&big, &rhs)?;
    let mut p = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (x[i * n + j] + x[j * n + i]);
            p.set(i, j, v);
        }
    }
    // residual check guards against near-resonant spectra that LU let through
    let residual = a
        .transpose()
        .matmul(&p)
        .add(&p.matmul(a))
        .add(q)
        .max_abs();
    let tol = 1e-10 * (1.0 + q.max_abs());
    if residual > tol {
        return Err(LinalgError::ResidualTooLarge { residual, tol });
    }
    Ok(p)
}

/// Solves `A x = b` by LU with partial pivoting plus one step of iterative
/// refinement. The result is rejected if its residual exceeds
/// `1e-9 * max(1, |b|_inf)`.
pub fn solve_linear(a: &Mat, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if !a.is_square() || a.rows != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "solve needs square A matching b, got {}x{} and {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let (lu, perm) = lu_factor(a)?;
    let mut x = lu_substitute(&lu, &perm, b);
    // one refinement pass costs n^2 and tightens poorly scaled systems
    let mut r = b.to_vec();
    let ax = a.matvec(&x);
    for (ri, v) in r.iter_mut().zip(ax) {
        *ri -= v;
    }
    let dx = lu_substitute(&lu, &perm, &r);
    for (xi, d) in x.iter_mut().zip(dx) {
        *xi += d;
    }
    let resid = a
        .matvec(&x)
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (ax, bi)| m.max((ax - bi).abs()));
    let tol = 1e-9 * b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if resid > tol {
        return Err(LinalgError::ResidualTooLarge { residual: resid, tol });
    }
    Ok(x)
}

fn lu_factor(a: &Mat) -> Result<(Mat, Vec<usize>), LinalgError> {
    let n = a.rows;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs().max(1e-300);
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivotval = 0.0;
        for i in k..n {
            let v = lu.get(i, k).abs();
            if v > pivotval {
                pivotval = v;
                pivot_row = i;
            }
        }
        if pivotval <= scale * 1e-15 * n as f64 {
            return Err(LinalgError::Singular(pivotval));
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = lu.get(k, j);
                lu.set(k, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
            perm.swap(k, pivot_row);
        }
        let inv = 1.0 / lu.get(k, k);
        for i in k + 1..n {
            let f = lu.get(i, k) * inv;
            lu.set(i, k, f);
            if f == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = lu.get(i, j) - f * lu.get(k, j);
                lu.set(i, j, v);
            }
        }
    }
    Ok((lu, perm))
}

fn lu_substitute(lu: &Mat, perm: &[usize], b: &[f64]) -> Vec<f64> {
    let n = lu.rows;
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 1..n {
        let mut s = x[i];
        for j in 0..i {
            s -= lu.get(i, j) * x[j];
        }
        x[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= lu.get(i, j) * x[j];
        }
        x[i] = s / lu.get(i, i);
    }
    x
}

/// Cholesky factor `L` (lower triangular) of a symmetric positive definite
/// matrix. Fails with the offending pivot if the matrix is not PD.
pub fn cholesky(a: &Mat) -> Result<Mat, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(
            "cholesky needs a square matrix".to_string(),
        ));
    }
    let n = a.rows;
    let mut l = a.clone();
    chol_in_place(n, &mut l.data).map_err(|(index, pivot)| LinalgError::NotPositiveDefinite {
        index,
        pivot,
    })?;
    for i in 0..n {
        for j in i + 1..n {
            l.set(i, j, 0.0);
        }
    }
    Ok(l)
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix by cyclic
/// Jacobi rotations. Values are sorted descending; column `k` of the returned
/// matrix is the eigenvector for value `k`.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    assert!(a.is_square(), "sym_eigen needs a square matrix");
    let n = a.rows;
    let mut work = a.data.clone();
    let mut vecs = vec![0.0; n * n];
    let vals = jacobi_eigen(n, &mut work, Some(&mut vecs));
    // sort descending, permuting vector columns alongside
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Mat::zeros(n, n);
    for (newc, &oldc) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs.set(r, newc, vecs[r * n + oldc]);
        }
    }
    (sorted_vals, sorted_vecs)
}

// ---------------------------------------------------------------------------
// slice-level kernels (row-major n x n), shared with the SDP solver

/// In-place Cholesky; on success the lower triangle holds `L` (upper triangle
/// is left stale). Errors with `(index, pivot)` on a non-positive pivot.
pub(crate) fn chol_in_place(n: usize, a: &mut [f64]) -> Result<(), (usize, f64)> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err((j, d));
        }
        let dj = d.sqrt();
        a[j * n + j] = dj;
        let inv = 1.0 / dj;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                s -= a[ri + k] * a[rj + k];
            }
            a[ri + j] = s * inv;
        }
    }
    Ok(())
}

/// Solves `(L L^T) x = b` in place given the Cholesky factor.
pub(crate) fn chol_solve(n: usize, l: &[f64], x: &mut [f64]) {
    for i in 0..n {
        let mut s = x[i];
        let ri = i * n;
        for j in 0..i {
            s -= l[ri + j] * x[j];
        }
        x[i] = s / l[ri + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= l[j * n + i] * x[j];
        }
        x[i] = s / l[i * n + i];
    }
}

/// Cyclic Jacobi eigensolver. `a` is destroyed; eigenvalues are returned
/// unsorted. When `vectors` is given it receives the orthogonal matrix with
/// eigenvector `k` in column `k`.
pub(crate) fn jacobi_eigen(n: usize, a: &mut [f64], vectors: Option<&mut [f64]>) -> Vec<f64> {
    let mut v = vectors;
    if let Some(vs) = v.as_deref_mut() {
        vs.fill(0.0);
        for i in 0..n {
            vs[i * n + i] = 1.0;
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let fro: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = 1e-14 * (1.0 + fro);
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if let Some(vs) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = vs[k * n + p];
                        let vkq = vs[k * n + q];
                        vs[k * n + p] = c * vkp - s * vkq;
                        vs[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Smallest eigenvalue of a symmetric matrix given as a flat slice.
pub(crate) fn min_eigenvalue_sym(n: usize, a: &[f64]) -> f64 {
    let mut work = a.to_vec();
    jacobi_eigen(n, &mut work, None)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn mat(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Independent largest-eigenvalue oracle for Metzler matrices: `s` exceeds
    /// the dominant eigenvalue exactly when `sI - M` is a nonsingular M-matrix,
    /// i.e. all leading principal minors are positive. Bisection on that
    /// predicate needs no QR iteration at all.
    fn metzler_max_eig_oracle(m: &Mat) -> f64 {
        let n = m.rows();
        let minors_positive = |s: f64| -> bool {
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, if i == j { s - m.get(i, j) } else { -m.get(i, j) });
                }
            }
            // Gaussian elimination without pivoting: all pivots positive iff
            // all leading principal minors are positive
            for k in 0..n {
                let p = a.get(k, k);
                if p <= 0.0 || !p.is_finite() {
                    return false;
                }
                for i in k + 1..n {
                    let f = a.get(i, k) / p;
                    for j in k..n {
                        let v = a.get(i, j) - f * a.get(k, j);
                        a.set(i, j, v);
                    }
                }
            }
            true
        };
        let mut lo = (0..n).map(|i| m.get(i, i)).fold(f64::NEG_INFINITY, f64::max);
        let mut hi = (0..n)
            .map(|i| m.row(i).iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        hi += 1e-9;
        lo -= 1e-9;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if minors_positive(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn sorted_re_im(eigs: &[Complex64]) -> Vec<(f64, f64)> {
        eigs.iter().map(|e| (e.re, e.im)).collect()
    }

    #[test]
    fn known_real_spectrum() {
        let a = mat(&[&[0.0, 1.0], &[-2.0, -3.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!((e[0].re + 2.0).abs() < 1e-12 && e[0].im.abs() < 1e-12);
        assert!((e[1].re + 1.0).abs() < 1e-12 && e[1].im.abs() < 1e-12);
    }

    #[test]
    fn known_complex_spectrum() {
        let a = mat(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!(e[0].re.abs() < 1e-12 && (e[0].im + 1.0).abs() < 1e-12);
        assert!(e[1].re.abs() < 1e-12 && (e[1].im - 1.0).abs() < 1e-12);
        assert!((max_re(&e)).abs() < 1e-12);
    }

    #[test]
    fn companion_matrix_spectrum() {
        // characteristic polynomial (x-1)(x-2)(x-3)
        let a = mat(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[6.0, -11.0, 6.0]]);
        let e = eigenvalues(&a).unwrap();
        for (got, want) in e.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got.re - want).abs() < 1e-9, "got {got} want {want}");
            assert!(got.im.abs() < 1e-9);
        }
    }

    #[test]
    fn defective_and_identity_spectra() {
        let a = mat(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let e = eigenvalues(&a).unwrap();
        assert!((e[0].re - 2.0).abs() < 1e-9 && (e[1].re - 2.0).abs() < 1e-9);
        let e4 = eigenvalues(&Mat::identity(4)).unwrap();
        assert!(e4.iter().all(|v| (v.re - 1.0).abs() < 1e-12 && v.im == 0.0));
    }

    #[test]
    fn transpose_has_same_spectrum() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 8;
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, rng.gen_range(-2.0..2.0));
                }
            }
            let ea = sorted_re_im(&eigenvalues(&a).unwrap());
            let et = sorted_re_im(&eigenvalues(&a.transpose()).unwrap());
            for (x, y) in ea.iter().zip(&et) {
                assert!((x.0 - y.0).abs() < 1e-8 && (x.1 - y.1).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 9;
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, rng.gen_range(-3.0..3.0));
                }
            }
            let e = eigenvalues(&a).unwrap();
            let sum: Complex64 = e.iter().sum();
            assert!((sum.re - a.trace()).abs() < 1e-8);
            assert!(sum.im.abs() < 1e-8);
        }
    }

    #[test]
    fn metzler_dominant_eigenvalue_matches_minor_bisection() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..20 {
            let n = 9;
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        a.set(i, j, rng.gen_range(-4.0..0.5));
                    } else if rng.gen_bool(0.4) {
                        a.set(i, j, rng.gen_range(0.0..0.8));
                    }
                }
            }
            let e = eigenvalues(&a).unwrap();
            let oracle = metzler_max_eig_oracle(&a);
            assert!(
                (max_re(&e) - oracle).abs() < 1e-7,
                "qr {} vs oracle {}",
                max_re(&e),
                oracle
            );
        }
    }

    #[test]
    fn lyapunov_closed_form_diagonal() {
        let a = mat(&[&[-1.0, 0.0], &[0.0, -2.0]]);
        let p = solve_lyapunov(&a, &Mat::identity(2)).unwrap();
        assert!((p.get(0, 0) - 0.5).abs() < 1e-12);
        assert!((p.get(1, 1) - 0.25).abs() < 1e-12);
        assert!(p.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_solution_is_spd_for_hurwitz_systems() {
        // Van der Pol subsystem Jacobians [[0,1],[-1,mu]] for damping mu < 0
        for mu in [-1.2, -2.0, -2.9] {
            let a = mat(&[&[0.0, 1.0], &[-1.0, mu]]);
            let p = solve_lyapunov(&a, &Mat::identity(2)).unwrap();
            cholesky(&p).expect("P must be positive definite");
            let res = a.transpose().matmul(&p).add(&p.matmul(&a)).add(&Mat::identity(2));
            assert!(res.max_abs() < 1e-10);
        }
    }

    #[test]
    fn lyapunov_rejects_resonant_spectrum() {
        // eigenvalues +-i make lambda_i + lambda_j = 0
        let a = mat(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(solve_lyapunov(&a, &Mat::identity(2)).is_err());
    }

    #[test]
    fn cholesky_known_factor() {
        let a = mat(&[&[4.0, 2.0], &[2.0, 3.0]]);
        let l = cholesky(&a).unwrap();
        assert!((l.get(0, 0) - 2.0).abs() < 1e-12);
        assert!((l.get(1, 0) - 1.0).abs() < 1e-12);
        assert!((l.get(1, 1) - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(l.get(0, 1) == 0.0);
        let back = l.matmul(&l.transpose());
        assert!(back.sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 1.0]]);
        match cholesky(&a) {
            Err(LinalgError::NotPositiveDefinite { index, pivot }) => {
                assert_eq!(index, 1);
                assert!(pivot < 0.0);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn solve_linear_residual_bound() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let n = 12;
            let mut a = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, rng.gen_range(-1.0..1.0));
                }
                a.set(i, i, a.get(i, i) + 4.0); // keep it well conditioned
            }
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let resid = a
                .matvec(&x)
                .iter()
                .zip(&b)
                .fold(0.0f64, |m, (ax, bi)| m.max((ax - bi).abs()));
            let binf = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(resid <= 1e-9 * binf);
        }
    }

    #[test]
    fn solve_linear_rejects_singular() {
        let a = mat(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            solve_linear(&a, &[1.0, 1.0]),
            Err(LinalgError::Singular(_))
        ));
    }

    #[test]
    fn sym_eigen_matches_closed_form_2x2() {
        // the quadratic form matrix of 0.595 x^2 + 0.227 xy + 0.520 y^2
        let (a, b, c) = (0.595, 0.1135, 0.520);
        let m = mat(&[&[a, b], &[b, c]]);
        let (vals, vecs) = sym_eigen(&m);
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        let hi = 0.5 * (a + c + disc);
        let lo = 0.5 * (a + c - disc);
        assert!((vals[0] - hi).abs() < 1e-12);
        assert!((vals[1] - lo).abs() < 1e-12);
        for k in 0..2 {
            let v = [vecs.get(0, k), vecs.get(1, k)];
            let av = [m.get(0, 0) * v[0] + m.get(0, 1) * v[1], m.get(1, 0) * v[0] + m.get(1, 1) * v[1]];
            assert!((av[0] - vals[k] * v[0]).abs() < 1e-10);
            assert!((av[1] - vals[k] * v[1]).abs() < 1e-10);
            assert!((v[0] * v[0] + v[1] * v[1] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sym_eigen_reconstructs_matrix() {
        let mut rng = StdRng::seed_from_u64(3);
        let n = 10;
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let (vals, vecs) = sym_eigen(&m);
        // V diag(vals) V^T == M
        let mut rebuilt = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += vecs.get(i, k) * vals[k] * vecs.get(j, k);
                }
                rebuilt.set(i, j, s);
            }
        }
        assert!(rebuilt.sub(&m).max_abs() < 1e-9);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }
}
