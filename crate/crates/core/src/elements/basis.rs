use crate::error::{Error, Result};
use crate::scalar::{congruence, mat_t_vec, zero3, zero33, Mat3, Point, Real};

/// Highest polynomial degree the node bookkeeping supports.
pub const MAX_DEGREE: usize = 4;

/// Nodal Lagrange basis of degree `p` on the reference simplex.
///
/// Nodes sit on the lattice `alpha / p` with `|alpha| = p` in barycentric
/// coordinates; shape functions are products of univariate Lagrange factors
/// in each barycentric coordinate.
#[derive(Clone, Debug)]
pub struct LagrangeBasis<T> {
    dim: usize,
    degree: usize,
    /// Barycentric multi-index of each node (`dim + 1` used entries).
    multi: Vec<[usize; 4]>,
    nodes: Vec<Point<T>>,
}

/// Values, reference gradients and reference Hessians of every shape function at one point.
#[derive(Clone, Debug)]
pub struct ShapeEval<T> {
    pub values: Vec<T>,
    pub grads: Vec<Point<T>>,
    pub hessians: Vec<Mat3<T>>,
}

pub fn make_basis<T: Real>(dim: usize, degree: usize) -> Result<LagrangeBasis<T>> {
    if !(1..=3).contains(&dim) || degree == 0 || degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree { dim, degree });
    }
    let mut multi = Vec::new();
    let mut alpha = [0usize; 4];
    enumerate(0, dim + 1, degree, &mut alpha, &mut multi);
    let p = T::from_count(degree);
    let nodes = multi
        .iter()
        .map(|a| {
            let mut xi = zero3();
            for j in 0..dim {
                xi[j] = T::from_count(a[j + 1]) / p;
            }
            xi
        })
        .collect();
    Ok(LagrangeBasis {
        dim,
        degree,
        multi,
        nodes,
    })
}

fn enumerate(pos: usize, len: usize, left: usize, alpha: &mut [usize; 4], out: &mut Vec<[usize; 4]>) {
    if pos == len - 1 {
        alpha[pos] = left;
        out.push(*alpha);
        return;
    }
    for a in (0..=left).rev() {
        alpha[pos] = a;
        enumerate(pos + 1, len, left - a, alpha, out);
    }
    alpha[pos] = 0;
}

impl<T: Real> LagrangeBasis<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.multi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multi.is_empty()
    }

    /// Reference coordinates of the nodes.
    pub fn nodes(&self) -> &[Point<T>] {
        &self.nodes
    }

    /// Barycentric multi-indices of the nodes.
    pub fn multi_indices(&self) -> &[[usize; 4]] {
        &self.multi
    }

    pub fn values(&self, xi: &Point<T>) -> Vec<T> {
        let lam = self.barycentric(xi);
        self.multi
            .iter()
            .map(|a| {
                (0..=self.dim)
                    .map(|i| self.factor(a[i], lam[i]).0)
                    .fold(T::one(), |acc, v| acc * v)
            })
            .collect()
    }

    pub fn evaluate(&self, xi: &Point<T>) -> ShapeEval<T> {
        let d = self.dim;
        let lam = self.barycentric(xi);
        let n = self.len();
        let mut values = Vec::with_capacity(n);
        let mut grads = Vec::with_capacity(n);
        let mut hessians = Vec::with_capacity(n);
        for a in &self.multi {
            let mut f = [(T::one(), T::zero(), T::zero()); 4];
            for i in 0..=d {
                f[i] = self.factor(a[i], lam[i]);
            }
            let prod_except = |skip: &[usize]| -> T {
                (0..=d)
                    .filter(|i| !skip.contains(i))
                    .map(|i| f[i].0)
                    .fold(T::one(), |acc, v| acc * v)
            };
            values.push(prod_except(&[]));
            // derivatives with respect to barycentric coordinates
            let mut dl = [T::zero(); 4];
            let mut hl = [[T::zero(); 4]; 4];
            for p in 0..=d {
                dl[p] = f[p].1 * prod_except(&[p]);
                hl[p][p] = f[p].2 * prod_except(&[p]);
                for q in (p + 1)..=d {
                    let v = f[p].1 * f[q].1 * prod_except(&[p, q]);
                    hl[p][q] = v;
                    hl[q][p] = v;
                }
            }
            let mut g = zero3();
            let mut h = zero33();
            for j in 0..d {
                g[j] = dl[j + 1] - dl[0];
                for k in 0..d {
                    h[j][k] = hl[j + 1][k + 1] - hl[0][k + 1] - hl[j + 1][0] + hl[0][0];
                }
            }
            grads.push(g);
            hessians.push(h);
        }
        ShapeEval {
            values,
            grads,
            hessians,
        }
    }

    /// Tabulates the basis at a fixed set of reference points.
    pub fn tabulate(&self, points: &[Point<T>]) -> ReferenceTable<T> {
        ReferenceTable {
            n_basis: self.len(),
            evals: points.iter().map(|xi| self.evaluate(xi)).collect(),
        }
    }

    fn barycentric(&self, xi: &Point<T>) -> [T; 4] {
        let mut lam = [T::zero(); 4];
        let mut s = T::zero();
        for j in 0..self.dim {
            lam[j + 1] = xi[j];
            s += xi[j];
        }
        lam[0] = T::one() - s;
        lam
    }

    /// `prod_{j<m} (p*lam - j)/(j+1)` with first and second derivatives.
    fn factor(&self, m: usize, lam: T) -> (T, T, T) {
        let p = T::from_count(self.degree);
        let (mut v, mut d1, mut d2) = (T::one(), T::zero(), T::zero());
        for j in 0..m {
            let denom = T::from_count(j + 1);
            let g = (p * lam - T::from_count(j)) / denom;
            let gp = p / denom;
            d2 = d2 * g + T::lit(2.0) * d1 * gp;
            d1 = d1 * g + v * gp;
            v = v * g;
        }
        (v, d1, d2)
    }
}

/// Basis evaluations cached at the points of a quadrature rule.
#[derive(Clone, Debug)]
pub struct ReferenceTable<T> {
    pub n_basis: usize,
    pub evals: Vec<ShapeEval<T>>,
}

/// `J^{-T} g` given `inv = J^{-1}`.
#[inline]
pub fn push_forward_gradient<T: Real>(inv: &Mat3<T>, g: &Point<T>, dim: usize) -> Point<T> {
    mat_t_vec(inv, g, dim)
}

/// `J^{-T} H J^{-1}` given `inv = J^{-1}`.
#[inline]
pub fn push_forward_hessian<T: Real>(inv: &Mat3<T>, h: &Mat3<T>, dim: usize) -> Mat3<T> {
    congruence(inv, h, dim)
}

#[inline]
pub fn laplacian<T: Real>(h: &Mat3<T>, dim: usize) -> T {
    (0..dim).map(|i| h[i][i]).sum()
}
