use crate::error::{Error, Result};
use crate::scalar::{zero3, Point, Real};

/// Quadrature on the reference simplex of dimension 1, 2 or 3.
///
/// Reference simplices are `[0, 1]`, the unit right triangle (area 1/2) and
/// the unit right tetrahedron (volume 1/6). Weights sum to that measure.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    pub dim: usize,
    pub points: Vec<Point<T>>,
    pub weights: Vec<T>,
    pub exactness: usize,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Highest total degree served by the collapsed-coordinate construction.
const MAX_EXACTNESS: usize = 40;

/// Rule integrating every polynomial of total degree `exactness` exactly.
///
/// Degrees 0 to 2 use the classical symmetric rules with positive weights;
/// higher degrees use conical products of Gauss-Legendre rules in collapsed
/// coordinates, whose weights are products of positive factors.
pub fn make_quadrature<T: Real>(dim: usize, exactness: usize) -> Result<QuadratureRule<T>> {
    if !(1..=3).contains(&dim) || exactness > MAX_EXACTNESS {
        return Err(Error::QuadratureUnavailable { dim, exactness });
    }
    let (points, weights) = match (dim, exactness) {
        (1, _) => {
            let (x, w) = gauss_legendre_unit::<T>(exactness / 2 + 1);
            (x.into_iter().map(|x| [x, T::zero(), T::zero()]).collect(), w)
        }
        (2, 0..=1) => {
            let third = T::one() / T::lit(3.0);
            (vec![[third, third, T::zero()]], vec![T::lit(0.5)])
        }
        (2, 2) => {
            let a = T::one() / T::lit(6.0);
            let b = T::lit(2.0) / T::lit(3.0);
            (
                vec![[a, a, T::zero()], [b, a, T::zero()], [a, b, T::zero()]],
                vec![a; 3],
            )
        }
        (3, 0..=1) => {
            let q = T::lit(0.25);
            (vec![[q, q, q]], vec![T::one() / T::lit(6.0)])
        }
        (3, 2) => {
            let five = T::lit(5.0);
            let a = (five - five.sqrt()) / T::lit(20.0);
            let b = (five + T::lit(3.0) * five.sqrt()) / T::lit(20.0);
            (
                vec![[a, a, a], [b, a, a], [a, b, a], [a, a, b]],
                vec![T::one() / T::lit(24.0); 4],
            )
        }
        (2, deg) => collapsed_triangle(deg),
        (3, deg) => collapsed_tetrahedron(deg),
        _ => unreachable!(),
    };
    Ok(QuadratureRule {
        dim,
        points,
        weights,
        exactness,
    })
}

fn collapsed_triangle<T: Real>(deg: usize) -> (Vec<Point<T>>, Vec<T>) {
    // x = a (1 - b), y = b, dx dy = (1 - b) da db
    let (xa, wa) = gauss_legendre_unit::<T>(deg / 2 + 1);
    let (xb, wb) = gauss_legendre_unit::<T>((deg + 1) / 2 + 1);
    let mut pts = Vec::with_capacity(xa.len() * xb.len());
    let mut wts = Vec::with_capacity(xa.len() * xb.len());
    for (&b, &wbb) in xb.iter().zip(&wb) {
        for (&a, &waa) in xa.iter().zip(&wa) {
            let mut p = zero3();
            p[0] = a * (T::one() - b);
            p[1] = b;
            pts.push(p);
            wts.push(waa * wbb * (T::one() - b));
        }
    }
    (pts, wts)
}

fn collapsed_tetrahedron<T: Real>(deg: usize) -> (Vec<Point<T>>, Vec<T>) {
    // x = a (1-b)(1-c), y = b (1-c), z = c, jacobian (1-b)(1-c)^2
    let (xa, wa) = gauss_legendre_unit::<T>(deg / 2 + 1);
    let (xb, wb) = gauss_legendre_unit::<T>((deg + 1) / 2 + 1);
    let (xc, wc) = gauss_legendre_unit::<T>((deg + 2) / 2 + 1);
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (&c, &wcc) in xc.iter().zip(&wc) {
        for (&b, &wbb) in xb.iter().zip(&wb) {
            for (&a, &waa) in xa.iter().zip(&wa) {
                let omc = T::one() - c;
                let omb = T::one() - b;
                pts.push([a * omb * omc, b * omc, c]);
                wts.push(waa * wbb * wcc * omb * omc * omc);
            }
        }
    }
    (pts, wts)
}

/// Gauss-Legendre nodes and weights on `[0, 1]` with `m` points.
pub fn gauss_legendre_unit<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut xs = vec![T::zero(); m];
    let mut ws = vec![T::zero(); m];
    let mf = T::from_count(m);
    let half = T::lit(0.5);
    for i in 0..(m + 1) / 2 {
        // Newton from the Chebyshev-like initial guess on [-1, 1]
        let guess = T::PI() * (T::from_count(i) + T::lit(0.75)) / (mf + half);
        let mut x = guess.cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        // map to [0, 1], ascending
        xs[i] = half * (T::one() - x);
        xs[m - 1 - i] = half * (T::one() + x);
        ws[i] = half * w;
        ws[m - 1 - i] = half * w;
    }
    (xs, ws)
}

fn legendre<T: Real>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if m == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=m {
        let kf = T::from_count(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let mf = T::from_count(m);
    let d = mf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}
