//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use phifem::assembly::assemble_parts;
use phifem::discretization::Shapes;
use phifem::levelset::{interpolate_levelset, LevelSetFunction};
use phifem::mesh::Mesh;
use phifem::{Discretization, Point};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::BTreeMap;

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `int_T lambda^alpha = |T| d! alpha! / (|alpha| + d)!`.
pub fn barycentric_monomial_integral(volume: f64, dim: usize, alpha: &[usize]) -> f64 {
    let s: usize = alpha.iter().sum();
    volume * factorial(dim) * alpha.iter().map(|&a| factorial(a)).product::<f64>() / factorial(s + dim)
}

/// Polynomial in barycentric coordinates.
#[derive(Clone, Debug, Default)]
pub struct BaryPoly(pub BTreeMap<[usize; 4], f64>);

impl BaryPoly {
    pub fn constant(c: f64) -> Self {
        let mut m = BTreeMap::new();
        m.insert([0; 4], c);
        BaryPoly(m)
    }

    /// `a * lambda_i + b`.
    pub fn affine(i: usize, a: f64, b: f64) -> Self {
        let mut m = BTreeMap::new();
        let mut e = [0; 4];
        e[i] = 1;
        m.insert(e, a);
        *m.entry([0; 4]).or_insert(0.0) += b;
        BaryPoly(m)
    }

    pub fn mul(&self, o: &BaryPoly) -> BaryPoly {
        let mut m = BTreeMap::new();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &o.0 {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                *m.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        BaryPoly(m)
    }

    pub fn derivative(&self, i: usize) -> BaryPoly {
        let mut m = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[i] > 0 {
                let mut f = *e;
                f[i] -= 1;
                *m.entry(f).or_insert(0.0) += c * e[i] as f64;
            }
        }
        BaryPoly(m)
    }

    pub fn integrate(&self, volume: f64, dim: usize) -> f64 {
        self.0
            .iter()
            .map(|(e, c)| c * barycentric_monomial_integral(volume, dim, &e[..=dim]))
            .sum()
    }
}

/// Equispaced Lagrange function of degree `k` attached to barycentric multi-index `a`.
pub fn lagrange_poly(a: &[usize; 4], k: usize, dim: usize) -> BaryPoly {
    let mut p = BaryPoly::constant(1.0);
    for i in 0..=dim {
        for m in 0..a[i] {
            let s = 1.0 / (m as f64 + 1.0);
            p = p.mul(&BaryPoly::affine(i, k as f64 * s, -(m as f64) * s));
        }
    }
    p
}

/// Gradients of the barycentric coordinates of a simplex, from inverting the vertex matrix.
pub fn barycentric_gradients(verts: &[Point<f64>], dim: usize) -> (Vec<[f64; 3]>, f64) {
    let n = dim + 1;
    // rows [1, x_k]; lambda_i(v_k) = delta_ik means V C = I
    let mut a = vec![vec![0.0; 2 * n]; n];
    for k in 0..n {
        a[k][0] = 1.0;
        for j in 0..dim {
            a[k][j + 1] = verts[k][j];
        }
        a[k][n + k] = 1.0;
    }
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        let piv = a[c][c];
        for v in a[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(row_c) {
                    *x -= f * y;
                }
            }
        }
    }
    // C = V^{-1}; column i holds the coefficients of lambda_i
    let grads = (0..n)
        .map(|i| {
            let mut g = [0.0; 3];
            for j in 0..dim {
                g[j] = a[j + 1][n + i];
            }
            g
        })
        .collect();
    (grads, det.abs() / factorial(dim))
}

/// Standard P_k mass and stiffness matrices on every active cell, assembled densely.
pub fn standard_fem_matrices(disc: &Discretization<f64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = disc.dim();
    let k = disc.k();
    let n = disc.n_dofs();
    let mut mass = vec![vec![0.0; n]; n];
    let mut stiff = vec![vec![0.0; n]; n];
    let polys: Vec<BaryPoly> = disc
        .basis()
        .multi_indices()
        .iter()
        .map(|a| lagrange_poly(a, k, d))
        .collect();
    let derivs: Vec<Vec<BaryPoly>> = polys
        .iter()
        .map(|p| (0..=d).map(|i| p.derivative(i)).collect())
        .collect();
    for &c in disc.active_cells() {
        let verts: Vec<Point<f64>> = disc.mesh().cell(c).iter().map(|&v| *disc.mesh().vertex(v)).collect();
        let (g, vol) = barycentric_gradients(&verts, d);
        let dofs = disc.dofmap().cell_dofs(c);
        for (a, &ia) in dofs.iter().enumerate() {
            for (b, &ib) in dofs.iter().enumerate() {
                mass[ia][ib] += polys[a].mul(&polys[b]).integrate(vol, d);
                let mut s = 0.0;
                for i in 0..=d {
                    for j in 0..=d {
                        let gij: f64 = (0..d).map(|x| g[i][x] * g[j][x]).sum();
                        if gij != 0.0 {
                            s += gij * derivs[a][i].mul(&derivs[b][j]).integrate(vol, d);
                        }
                    }
                }
                stiff[ia][ib] += s;
            }
        }
    }
    (mass, stiff)
}

/// Largest entrywise gap between a sparse and a dense matrix, relative to the dense max norm.
pub fn relative_gap(a: &phifem::sparse::CsrMatrix<f64>, dense: &[Vec<f64>]) -> f64 {
    let scale = dense
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut gap = 0.0f64;
    for (i, row) in dense.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            gap = gap.max((a.get(i, j) - v).abs());
        }
    }
    gap / scale
}

/// Box with the constant level set -1: every cell active, none cut.
pub fn constant_minus_one(mesh: Mesh<f64>, k: usize) -> Discretization<f64> {
    let phi = LevelSetFunction::new("minus one", |_: &Point<f64>| -1.0);
    let ls = interpolate_levelset(&phi, &mesh, 1).unwrap();
    Discretization::with_levelset(mesh, ls, k, Default::default()).unwrap()
}

/// Smallest `x^T C x / |x|^2` over `samples` random vectors, `C = K + B + G + L_s`.
pub fn coercivity_witness(disc: &Discretization<f64>, sigma: f64, samples: usize, seed: u64) -> f64 {
    let parts = assemble_parts(disc, sigma).unwrap();
    let c = parts.coercive_part().unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let x: Vec<f64> = (0..disc.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nrm: f64 = x.iter().map(|v| v * v).sum();
        worst = worst.min(c.quadratic_form(&x) / nrm);
    }
    worst
}

/// Random reference point with every barycentric coordinate at least `margin`.
pub fn interior_point(rng: &mut StdRng, dim: usize, margin: f64) -> Point<f64> {
    let mut lam: Vec<f64> = (0..=dim).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = lam.iter().sum();
    let free = 1.0 - margin * (dim + 1) as f64;
    for l in lam.iter_mut() {
        *l = margin + free * *l / s;
    }
    let mut xi = [0.0; 3];
    xi[..dim].copy_from_slice(&lam[1..]);
    xi
}

/// Worst relative mismatch between the product-rule gradient and Laplacian of
/// `phi_h N_j` and central differences, over `points` random interior points of `cells`.
pub fn product_rule_mismatch(disc: &Discretization<f64>, cells: &[usize], points: usize, seed: u64) -> f64 {
    let d = disc.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut sh = Shapes::default();
    let mut sp = Shapes::default();
    for &c in cells {
        let geo = disc.mesh().cell_geometry(c);
        let delta = 1e-3 * geo.diameter;
        let value_at = |x: &Point<f64>, j: usize, sp: &mut Shapes<f64>| {
            let pd = disc.eval_at_reference(c, &geo.to_reference(x, d), sp);
            pd.phi * sp.values[j]
        };
        for _ in 0..points {
            let xi = interior_point(&mut rng, d, 0.1);
            let pd = disc.eval_at_reference(c, &xi, &mut sh);
            let data: Vec<_> = (0..sh.values.len()).map(|j| disc.product(&pd, &sh, j)).collect();
            let gscale = data
                .iter()
                .flat_map(|(_, g, _)| g[..d].iter().map(|v| v.abs()))
                .fold(0.0f64, f64::max);
            let lscale = data.iter().map(|(_, _, l)| l.abs()).fold(0.0f64, f64::max);
            for (j, (u, g, lap)) in data.iter().enumerate() {
                // fourth-order central differences
                let mut fd_lap = 0.0;
                for a in 0..d {
                    let shifted = |m: f64, sp: &mut Shapes<f64>| {
                        let mut x = pd.x;
                        x[a] += m * delta;
                        value_at(&x, j, sp)
                    };
                    let (p1, m1) = (shifted(1.0, &mut sp), shifted(-1.0, &mut sp));
                    let (p2, m2) = (shifted(2.0, &mut sp), shifted(-2.0, &mut sp));
                    let fd_grad = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * delta);
                    worst = worst.max((fd_grad - g[a]).abs() / gscale);
                    fd_lap += (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * u) / (12.0 * delta * delta);
                }
                worst = worst.max((fd_lap - lap).abs() / lscale);
            }
        }
    }
    worst
}

/// Worst relative quadrature error over barycentric monomials of total degree up to the rule's exactness.
pub fn quadrature_mismatch(dim: usize, exactness: usize) -> f64 {
    let rule = phifem::elements::make_quadrature::<f64>(dim, exactness).unwrap();
    let vol = 1.0 / factorial(dim);
    let mut worst = 0.0f64;
    let mut visit = |alpha: [usize; 4]| {
        let exact = barycentric_monomial_integral(vol, dim, &alpha[..=dim]);
        let approx: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(xi, w)| {
                let l0 = 1.0 - xi[..dim].iter().sum::<f64>();
                let mut v = l0.powi(alpha[0] as i32);
                for i in 0..dim {
                    v *= xi[i].powi(alpha[i + 1] as i32);
                }
                w * v
            })
            .sum();
        worst = worst.max((approx - exact).abs() / exact);
    };
    for a in 0..=exactness {
        for b in 0..=exactness - a {
            if dim == 2 {
                visit([exactness - a - b, a, b, 0]);
            } else {
                for c in 0..=exactness - a - b {
                    visit([exactness - a - b - c, a, b, c]);
                }
            }
        }
    }
    worst
}
