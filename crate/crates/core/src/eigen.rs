//! Real symmetric eigensolvers.
//!
//! * [`symmetric_eigenvalues`]: full spectrum via Householder
//!   tridiagonalisation followed by implicit QL with Wilkinson shifts.
//! * [`jacobi_eigen`]: eigenpairs of small matrices (Davidson subspace).
//! * [`davidson_lowest`]: lowest eigenpair of a large operator that is only
//!   available through matrix–vector products and its diagonal.

#![allow(clippy::needless_range_loop)]

use thiserror::Error;

use crate::scalar::{cast, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not square: {len} entries for dimension {n}")]
    Shape { len: usize, n: usize },
    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),
}

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self, EigenError> {
        if data.len() != n * n {
            return Err(EigenError::Shape { len: data.len(), n });
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// All eigenvalues of a symmetric matrix, ascending.
///
/// Only the lower triangle is read.
pub fn symmetric_eigenvalues<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>, EigenError> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if j <= i { m.get(i, j) } else { m.get(j, i) })
                .collect()
        })
        .collect();
    let (mut d, mut e) = tridiagonalize(&mut a);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder reduction to tridiagonal form. Returns the diagonal and the
/// sub-diagonal (`e[i]` couples rows `i-1` and `i`, `e[0] = 0`).
fn tridiagonalize<T: Real>(a: &mut [Vec<T>]) -> (Vec<T>, Vec<T>) {
    let n = a.len();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let scale = (0..=l).fold(T::zero(), |s, k| s + a[i][k].abs());
            if scale == T::zero() {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] = a[i][k] / scale;
                    h = h + a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h = h - f * g;
                a[i][l] = f - g;
                let mut f = T::zero();
                for j in 0..=l {
                    let mut g = T::zero();
                    for k in 0..=j {
                        g = g + a[j][k] * a[i][k];
                    }
                    for k in (j + 1)..=l {
                        g = g + a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    f = f + e[j] * a[i][j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] = a[j][k] - (f * e[k] + g * a[i][k]);
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    e[0] = T::zero();
    for i in 0..n {
        d[i] = a[i][i];
    }
    (d, e)
}

/// Implicit QL on a symmetric tridiagonal matrix; eigenvalues land in `d`.
fn tridiagonal_ql<T: Real>(d: &mut [T], e: &mut [T]) -> Result<(), EigenError> {
    const MAX_SWEEPS: usize = 60;
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = cast::<T>(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(EigenError::NoConvergence(MAX_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Cyclic Jacobi rotations. Returns eigenvalues ascending and the matching
/// eigenvectors as columns (`vectors[k]` is the k-th eigenvector).
pub fn jacobi_eigen<T: Real>(m: &SymmetricMatrix<T>) -> Result<(Vec<T>, Vec<Vec<T>>), EigenError> {
    const MAX_SWEEPS: usize = 100;
    let n = m.dim();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    let two = cast::<T>(2.0);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: T = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        let scale = cast::<T>(n as f64) * T::epsilon();
        if off <= scale * scale * (diag + off) || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let small = T::epsilon() * (a[p][p].abs() + a[q][q].abs());
                if a[p][q].abs() <= small * cast(0.01) {
                    a[p][q] = T::zero();
                    a[q][p] = T::zero();
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
                let sign = if theta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        return Err(EigenError::NoConvergence(MAX_SWEEPS));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("finite"));
    let values = order.iter().map(|&k| a[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    Ok((values, vectors))
}

/// A symmetric operator known through products and its diagonal.
pub trait SymmetricOperator<T>: Sync {
    fn dim(&self) -> usize;
    fn diagonal(&self) -> Vec<T>;
    /// `y = A x`
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Real> SymmetricOperator<T> for SymmetricMatrix<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.data[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(x)
                .map(|(a, b)| *a * *b)
                .sum();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DavidsonOptions {
    /// Stop once the residual norm falls below this.
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    /// Subspace size that triggers a restart from the current Ritz vector.
    pub max_subspace: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            residual_tolerance: 1e-8,
            max_iterations: 500,
            max_subspace: 40,
        }
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Lowest eigenpair by Davidson iteration with a diagonal preconditioner.
///
/// The start vector is the unit vector on the smallest diagonal element
/// (lowest index on ties), so the result is deterministic.
pub fn davidson_lowest<T: Real, A: SymmetricOperator<T> + ?Sized>(
    op: &A,
    opts: DavidsonOptions,
) -> Result<(T, Vec<T>), EigenError> {
    let n = op.dim();
    let diag = op.diagonal();
    if n == 0 {
        return Err(EigenError::Shape { len: 0, n: 0 });
    }
    let start = (0..n)
        .min_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite diagonal"))
        .expect("non-empty");
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut images: Vec<Vec<T>> = Vec::new();
    let mut first = vec![T::zero(); n];
    first[start] = T::one();
    let mut pending = Some(first);
    let tol = cast::<T>(opts.residual_tolerance);
    let denominator_floor = cast::<T>(1e-8);

    for _ in 0..opts.max_iterations {
        if let Some(v) = pending.take() {
            let mut w = vec![T::zero(); n];
            op.apply(&v, &mut w);
            basis.push(v);
            images.push(w);
        }
        let k = basis.len();
        let mut projected = SymmetricMatrix::zeros(k);
        for i in 0..k {
            for j in 0..=i {
                let g = dot(&basis[i], &images[j]);
                projected.set(i, j, g);
                projected.set(j, i, g);
            }
        }
        let (values, vectors) = jacobi_eigen(&projected)?;
        let theta = values[0];
        let coeffs = &vectors[0];
        let mut x = vec![T::zero(); n];
        let mut ax = vec![T::zero(); n];
        for (c, (b, w)) in coeffs.iter().zip(basis.iter().zip(&images)) {
            for i in 0..n {
                x[i] = x[i] + *c * b[i];
                ax[i] = ax[i] + *c * w[i];
            }
        }
        let residual: Vec<T> = ax.iter().zip(&x).map(|(a, b)| *a - theta * *b).collect();
        let rnorm = dot(&residual, &residual).sqrt();
        if rnorm < tol || basis.len() >= n {
            return Ok((theta, x));
        }
        let mut t: Vec<T> = residual
            .iter()
            .zip(&diag)
            .map(|(r, d)| {
                let denom = theta - *d;
                let denom = if denom.abs() < denominator_floor {
                    denominator_floor.copysign(denom)
                } else {
                    denom
                };
                *r / denom
            })
            .collect();
        if basis.len() >= opts.max_subspace {
            let norm = dot(&x, &x).sqrt();
            let x: Vec<T> = x.iter().map(|v| *v / norm).collect();
            let ax: Vec<T> = ax.iter().map(|v| *v / norm).collect();
            basis = vec![x];
            images = vec![ax];
        }
        // two passes of Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &t);
                for i in 0..n {
                    t[i] = t[i] - proj * b[i];
                }
            }
        }
        let norm = dot(&t, &t).sqrt();
        if norm <= T::epsilon().sqrt() * tol {
            return Ok((theta, x));
        }
        pending = Some(t.iter().map(|v| *v / norm).collect());
    }
    Err(EigenError::NoConvergence(opts.max_iterations))
}
