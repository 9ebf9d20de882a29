use super::csr::{norm2, CsrMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Incomplete LU factorization with zero fill on the pattern of `A`.
#[derive(Clone, Debug)]
pub struct Ilu0<T> {
    lu: CsrMatrix<T>,
    values: Vec<T>,
    diag: Vec<usize>,
}

impl<T: Real> Ilu0<T> {
    pub fn new(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.n_rows();
        let rp = a.row_ptr();
        let ci = a.col_idx();
        let mut values = a.values().to_vec();
        let mut diag = vec![usize::MAX; n];
        for i in 0..n {
            for k in rp[i]..rp[i + 1] {
                if ci[k] == i {
                    diag[i] = k;
                }
            }
            if diag[i] == usize::MAX {
                return Err(Error::SingularMatrix {
                    pivot: i,
                    magnitude: 0.0,
                });
            }
        }
        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            for k in rp[i]..rp[i + 1] {
                pos[ci[k]] = k;
            }
            for kk in rp[i]..rp[i + 1] {
                let k = ci[kk];
                if k >= i {
                    break;
                }
                let piv = values[diag[k]];
                if piv == T::zero() {
                    return Err(Error::SingularMatrix {
                        pivot: k,
                        magnitude: 0.0,
                    });
                }
                let lik = values[kk] / piv;
                values[kk] = lik;
                for jj in (diag[k] + 1)..rp[k + 1] {
                    let p = pos[ci[jj]];
                    if p != usize::MAX {
                        let u = values[jj];
                        values[p] -= lik * u;
                    }
                }
            }
            for k in rp[i]..rp[i + 1] {
                pos[ci[k]] = usize::MAX;
            }
        }
        Ok(Self {
            lu: a.clone(),
            values,
            diag,
        })
    }

    /// `z = (LU)^{-1} v`.
    pub fn apply(&self, v: &[T], z: &mut [T]) {
        let n = v.len();
        let rp = self.lu.row_ptr();
        let ci = self.lu.col_idx();
        for i in 0..n {
            let mut s = v[i];
            for k in rp[i]..self.diag[i] {
                s -= self.values[k] * z[ci[k]];
            }
            z[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (self.diag[i] + 1)..rp[i + 1] {
                s -= self.values[k] * z[ci[k]];
            }
            z[i] = s / self.values[self.diag[i]];
        }
    }
}

/// Restarted GMRES with right preconditioning, so the monitored residual is the true one.
#[derive(Clone, Debug)]
pub struct Gmres<T> {
    pub restart: usize,
    pub max_iterations: usize,
    pub tolerance: T,
}

#[derive(Clone, Copy, Debug)]
pub struct GmresStats<T> {
    pub iterations: usize,
    pub relative_residual: T,
}

impl<T: Real> Gmres<T> {
    pub fn solve(
        &self,
        a: &CsrMatrix<T>,
        precond: &Ilu0<T>,
        b: &[T],
        x0: Option<&[T]>,
    ) -> Result<(Vec<T>, GmresStats<T>)> {
        let n = b.len();
        let bnorm = norm2(b);
        let mut x = x0.map_or_else(|| vec![T::zero(); n], |v| v.to_vec());
        if bnorm == T::zero() {
            return Ok((
                vec![T::zero(); n],
                GmresStats {
                    iterations: 0,
                    relative_residual: T::zero(),
                },
            ));
        }
        let m = self.restart.max(1);
        let mut total = 0;
        let mut r = vec![T::zero(); n];
        let mut w = vec![T::zero(); n];
        let mut z = vec![T::zero(); n];
        loop {
            a.mul_vec_into(&x, &mut r);
            for i in 0..n {
                r[i] = b[i] - r[i];
            }
            let beta = norm2(&r);
            let mut rel = beta / bnorm;
            if rel <= self.tolerance {
                return Ok((
                    x,
                    GmresStats {
                        iterations: total,
                        relative_residual: rel,
                    },
                ));
            }
            if total >= self.max_iterations {
                return Err(Error::NoConvergence {
                    iterations: total,
                    residual: rel.to_f64_lossy(),
                });
            }
            let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
            basis.push(r.iter().map(|&v| v / beta).collect());
            let mut hess = vec![vec![T::zero(); m]; m + 1];
            let mut cs = vec![T::zero(); m];
            let mut sn = vec![T::zero(); m];
            let mut g = vec![T::zero(); m + 1];
            g[0] = beta;
            let mut used = 0;
            for j in 0..m {
                precond.apply(&basis[j], &mut z);
                a.mul_vec_into(&z, &mut w);
                for i in 0..=j {
                    let hij: T = w.iter().zip(&basis[i]).map(|(&a, &b)| a * b).sum();
                    hess[i][j] = hij;
                    for (wk, &vk) in w.iter_mut().zip(&basis[i]) {
                        *wk -= hij * vk;
                    }
                }
                let hnext = norm2(&w);
                hess[j + 1][j] = hnext;
                for i in 0..j {
                    let t = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
                    hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
                    hess[i][j] = t;
                }
                let denom = (hess[j][j] * hess[j][j] + hnext * hnext).sqrt();
                cs[j] = hess[j][j] / denom;
                sn[j] = hnext / denom;
                hess[j][j] = denom;
                hess[j + 1][j] = T::zero();
                g[j + 1] = -sn[j] * g[j];
                g[j] = cs[j] * g[j];
                used = j + 1;
                total += 1;
                rel = g[j + 1].abs() / bnorm;
                if rel <= self.tolerance || total >= self.max_iterations || hnext == T::zero() {
                    break;
                }
                basis.push(w.iter().map(|&v| v / hnext).collect());
            }
            // back substitution for the Krylov coefficients
            let mut y = vec![T::zero(); used];
            for i in (0..used).rev() {
                let mut s = g[i];
                for k in (i + 1)..used {
                    s -= hess[i][k] * y[k];
                }
                y[i] = s / hess[i][i];
            }
            let mut update = vec![T::zero(); n];
            for (k, yk) in y.iter().enumerate() {
                for (u, &v) in update.iter_mut().zip(&basis[k]) {
                    *u += *yk * v;
                }
            }
            precond.apply(&update, &mut z);
            for i in 0..n {
                x[i] += z[i];
            }
        }
    }
}
