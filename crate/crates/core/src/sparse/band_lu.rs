use super::csr::{norm2, CsrMatrix};
use super::ordering::{bandwidth, invert, reverse_cuthill_mckee};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting of a reverse Cuthill-McKee
/// permuted sparse matrix, held in LAPACK-style column-major band storage.
///
/// With half bandwidth `b` after reordering, `L` keeps `b` sub-diagonals
/// and `U` up to `2b` super-diagonals (row interchanges widen it).
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<T>,
    pivots: Vec<usize>,
    perm: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.n_rows();
        if n != a.n_cols() {
            return Err(Error::InvalidInput("band LU needs a square matrix".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let inv = invert(&perm);
        let bw = bandwidth(a, &perm);
        let (kl, ku) = (bw, bw);
        let ldab = 2 * kl + ku + 1;
        let mut lu = BandLu {
            n,
            kl,
            ku,
            ldab,
            data: vec![T::zero(); ldab * n],
            pivots: vec![0; n],
            perm,
        };
        let mut amax = T::zero();
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                *lu.at_mut(inv[i], inv[j]) = v;
                amax = amax.max(v.abs());
            }
        }
        let tiny = amax * T::epsilon() * T::from_count(n.max(1)) * T::lit(1e-6);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = lu.at(k, k).abs();
            for i in (k + 1)..=last {
                let v = lu.at(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) || !best.is_finite() {
                return Err(Error::SingularMatrix {
                    pivot: k,
                    magnitude: best.to_f64_lossy(),
                });
            }
            lu.pivots[k] = p;
            let jlast = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=jlast {
                    let a_kj = lu.at(k, j);
                    let a_pj = lu.at(p, j);
                    *lu.at_mut(k, j) = a_pj;
                    *lu.at_mut(p, j) = a_kj;
                }
            }
            let inv_piv = T::one() / lu.at(k, k);
            for i in (k + 1)..=last {
                *lu.at_mut(i, k) *= inv_piv;
            }
            for j in (k + 1)..=jlast {
                let t = lu.at(k, j);
                if t == T::zero() {
                    continue;
                }
                let (col_k, mut col_j) = lu.two_columns(k, j);
                for i in (k + 1)..=last {
                    col_j[i] -= col_k[i] * t;
                }
            }
        }
        Ok(lu)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            let yk = y[k];
            if yk != T::zero() {
                for i in (k + 1)..=(k + kl).min(n.saturating_sub(1)) {
                    y[i] -= self.at(i, k) * yk;
                }
            }
        }
        for k in (0..n).rev() {
            y[k] /= self.at(k, k);
            let yk = y[k];
            if yk != T::zero() {
                for i in k.saturating_sub(kl + ku)..k {
                    y[i] -= self.at(i, k) * yk;
                }
            }
        }
        let mut x = vec![T::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// Solve followed by iterative refinement steps while the residual improves.
    pub fn solve_refined(&self, a: &CsrMatrix<T>, b: &[T], tol: T, max_steps: usize) -> (Vec<T>, T) {
        let bnorm = norm2(b);
        let mut x = self.solve(b);
        let mut res = relative_residual(a, &x, b, bnorm);
        for _ in 0..max_steps {
            if res <= tol {
                break;
            }
            let ax = a.mul_vec(&x);
            let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
            let dx = self.solve(&r);
            let cand: Vec<T> = x.iter().zip(&dx).map(|(&a, &d)| a + d).collect();
            let cres = relative_residual(a, &cand, b, bnorm);
            if cres < res {
                x = cand;
                res = cres;
            } else {
                break;
            }
        }
        (x, res)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    /// Mutable views of columns `k < j`, indexed by row.
    fn two_columns(&mut self, k: usize, j: usize) -> (RowView<'_, T>, RowViewMut<'_, T>) {
        let off = self.kl + self.ku;
        let (head, tail) = self.data.split_at_mut(j * self.ldab);
        let col_k = &head[k * self.ldab..(k + 1) * self.ldab];
        let col_j = &mut tail[..self.ldab];
        (
            RowView {
                data: col_k,
                base: off as isize - k as isize,
            },
            RowViewMut {
                data: col_j,
                base: off as isize - j as isize,
            },
        )
    }
}

struct RowView<'a, T> {
    data: &'a [T],
    base: isize,
}

struct RowViewMut<'a, T> {
    data: &'a mut [T],
    base: isize,
}

impl<T> std::ops::Index<usize> for RowView<'_, T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.data[(self.base + i as isize) as usize]
    }
}

impl<T> std::ops::Index<usize> for RowViewMut<'_, T> {
    type Output = T;
    #[inline]
    fn index(&self, i: usize) -> &T {
        &self.data[(self.base + i as isize) as usize]
    }
}

impl<T> std::ops::IndexMut<usize> for RowViewMut<'_, T> {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.data[(self.base + i as isize) as usize]
    }
}

pub(crate) fn relative_residual<T: Real>(a: &CsrMatrix<T>, x: &[T], b: &[T], bnorm: T) -> T {
    let ax = a.mul_vec(x);
    let r = ax
        .iter()
        .zip(b)
        .map(|(&ai, &bi)| (ai - bi) * (ai - bi))
        .sum::<T>()
        .sqrt();
    if bnorm == T::zero() {
        r
    } else {
        r / bnorm
    }
}
