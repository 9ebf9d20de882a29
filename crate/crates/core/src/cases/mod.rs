//! Built-in test configurations and user-defined cases.

mod expr;

pub use expr::Expr;

use crate::error::{Error, Result};
use crate::levelset::LevelSetFunction;
use crate::mesh::BoxDomain;
use crate::scalar::{Point, Real};
use crate::solver::DtRule;
use serde::Deserialize;
use std::fmt;
use std::sync::Arc;

pub type SpaceTimeField<T> = Arc<dyn Fn(&Point<T>, T) -> T + Send + Sync>;
pub type SpaceTimeGradient<T> = Arc<dyn Fn(&Point<T>, T) -> Point<T> + Send + Sync>;

#[derive(Clone)]
pub struct ExactSolution<T> {
    pub value: SpaceTimeField<T>,
    pub gradient: SpaceTimeGradient<T>,
}

#[derive(Clone)]
pub struct TestCase<T> {
    pub name: String,
    pub levelset: LevelSetFunction<T>,
    pub source: SpaceTimeField<T>,
    pub initial: Arc<dyn Fn(&Point<T>) -> T + Send + Sync>,
    pub exact: Option<ExactSolution<T>>,
    pub domain: BoxDomain<T>,
    pub sigma: T,
    pub final_time: T,
    pub dt_rule: DtRule,
}

impl<T: Real> TestCase<T> {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
}

impl<T> fmt::Debug for TestCase<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestCase")
            .field("name", &self.name)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

/// Disk of radius 1 with `u = cos(pi r^2 / 2) exp(x) sin(t)`.
pub fn circle_case<T: Real>() -> TestCase<T> {
    let pi = T::PI();
    let half_pi = pi / T::lit(2.0);
    let value = move |x: &Point<T>, t: T| {
        let q = half_pi * (x[0] * x[0] + x[1] * x[1]);
        q.cos() * x[0].exp() * t.sin()
    };
    let gradient = move |x: &Point<T>, t: T| {
        let q = half_pi * (x[0] * x[0] + x[1] * x[1]);
        let s = t.sin() * x[0].exp();
        [
            s * (q.cos() - pi * x[0] * q.sin()),
            -s * pi * x[1] * q.sin(),
            T::zero(),
        ]
    };
    let source = move |x: &Point<T>, t: T| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let q = half_pi * r2;
        let ex = x[0].exp();
        let lap = (T::one() - pi * pi * r2) * q.cos() - T::lit(2.0) * pi * (T::one() + x[0]) * q.sin();
        ex * (q.cos() * t.cos() - t.sin() * lap)
    };
    let levelset = LevelSetFunction::new("circle", |x: &Point<T>| -T::one() + x[0] * x[0] + x[1] * x[1])
        .with_gradient(|x: &Point<T>| [T::lit(2.0) * x[0], T::lit(2.0) * x[1], T::zero()]);
    TestCase {
        name: "circle".into(),
        levelset,
        source: Arc::new(source),
        initial: Arc::new(|_| T::zero()),
        exact: Some(ExactSolution {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }),
        domain: BoxDomain::centered(2, T::lit(1.5)).expect("valid box"),
        sigma: T::one(),
        final_time: T::one(),
        dt_rule: DtRule::H,
    }
}

pub const POPCORN_R0: f64 = 0.6;
pub const POPCORN_A: f64 = 1.5;
pub const POPCORN_WIDTH: f64 = 0.3;
pub const POPCORN_SOURCE_CENTER: [f64; 3] = [0.2, 0.3, -0.1];

/// The twelve bump centers of the popcorn level set.
pub fn popcorn_centers() -> [[f64; 3]; 12] {
    let r0 = POPCORN_R0;
    let s = r0 / 5f64.sqrt();
    let pi = std::f64::consts::PI;
    let mut c = [[0.0; 3]; 12];
    for (k, ck) in c.iter_mut().enumerate().take(5) {
        let a = 2.0 * k as f64 * pi / 5.0;
        *ck = [2.0 * s * a.cos(), 2.0 * s * a.sin(), s];
    }
    for (k, ck) in c.iter_mut().enumerate().skip(5).take(5) {
        let a = (2.0 * (k as f64 - 5.0) - 1.0) * pi / 5.0;
        *ck = [2.0 * s * a.cos(), 2.0 * s * a.sin(), -s];
    }
    c[10] = [0.0, 0.0, r0];
    c[11] = [0.0, 0.0, -r0];
    c
}

pub fn popcorn_case<T: Real>() -> TestCase<T> {
    let centers: Vec<Point<T>> = popcorn_centers()
        .iter()
        .map(|c| [T::lit(c[0]), T::lit(c[1]), T::lit(c[2])])
        .collect();
    let r0 = T::lit(POPCORN_R0);
    let a = T::lit(POPCORN_A);
    let s2 = T::lit(POPCORN_WIDTH * POPCORN_WIDTH);
    let phi = move |x: &Point<T>| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        let bumps: T = centers
            .iter()
            .map(|c| {
                let d2 = (x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2);
                (-d2 / s2).exp()
            })
            .sum();
        r2 - r0 * r0 - a * bumps
    };
    let mu = POPCORN_SOURCE_CENTER.map(T::lit);
    let source = move |x: &Point<T>, _t: T| {
        let d2 = (x[0] - mu[0]).powi(2) + (x[1] - mu[1]).powi(2) + (x[2] - mu[2]).powi(2);
        (-d2 / (T::lit(2.0) * s2)).exp()
    };
    TestCase {
        name: "popcorn".into(),
        levelset: LevelSetFunction::new("popcorn", phi),
        source: Arc::new(source),
        initial: Arc::new(|_| T::zero()),
        exact: None,
        domain: BoxDomain::centered(3, T::lit(1.5)).expect("valid box"),
        sigma: T::one(),
        final_time: T::one(),
        dt_rule: DtRule::H,
    }
}

pub fn builtin_case<T: Real>(name: &str) -> Result<TestCase<T>> {
    match name {
        "circle" => Ok(circle_case()),
        "popcorn" => Ok(popcorn_case()),
        _ => Err(Error::InvalidInput(format!(
            "unknown case '{name}' (built-in cases: circle, popcorn)"
        ))),
    }
}

/// TOML description of a custom case.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub name: String,
    pub dim: usize,
    pub phi: String,
    pub f: String,
    #[serde(default = "zero_expr")]
    pub u0: String,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub exact: Option<String>,
    pub exact_grad: Option<Vec<String>>,
    pub sigma: Option<f64>,
    pub final_time: Option<f64>,
    pub dt_rule: Option<String>,
}

fn zero_expr() -> String {
    "0".into()
}

impl CaseConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("case file: {e}")))
    }

    /// Parses every expression and checks dimensions; all problems are reported together.
    pub fn build<T: Real>(&self) -> Result<TestCase<T>> {
        let mut errors = Vec::new();
        let mut parse = |label: &str, s: &str| match Expr::parse(s) {
            Ok(e) => Some(e),
            Err(e) => {
                errors.push(format!("{label}: {e}"));
                None
            }
        };
        let phi = parse("phi", &self.phi);
        let f = parse("f", &self.f);
        let u0 = parse("u0", &self.u0);
        let exact = self.exact.as_ref().map(|s| parse("exact", s));
        let grad: Option<Vec<Option<Expr>>> = self.exact_grad.as_ref().map(|g| {
            g.iter()
                .enumerate()
                .map(|(i, s)| parse(&format!("exact_grad[{i}]"), s))
                .collect()
        });
        if self.dim != 2 && self.dim != 3 {
            errors.push(format!("dim must be 2 or 3, got {}", self.dim));
        }
        if let Some(p) = &phi {
            if p.depends_on_time() {
                errors.push("phi must not depend on t".into());
            }
        }
        if let Some(p) = &u0 {
            if p.depends_on_time() {
                errors.push("u0 must not depend on t".into());
            }
        }
        match (&self.exact, &self.exact_grad) {
            (Some(_), None) => errors.push("exact requires exact_grad".into()),
            (None, Some(_)) => errors.push("exact_grad given without exact".into()),
            (_, Some(g)) if g.len() != self.dim => {
                errors.push(format!("exact_grad needs {} components, got {}", self.dim, g.len()))
            }
            _ => {}
        }
        let lower = self.lower.clone().unwrap_or_else(|| vec![-1.5; self.dim]);
        let upper = self.upper.clone().unwrap_or_else(|| vec![1.5; self.dim]);
        let domain = match BoxDomain::new(
            &lower.iter().map(|&v| T::lit(v)).collect::<Vec<_>>(),
            &upper.iter().map(|&v| T::lit(v)).collect::<Vec<_>>(),
        ) {
            Ok(d) if d.dim() == self.dim => Some(d),
            Ok(_) => {
                errors.push("box corners do not match dim".into());
                None
            }
            Err(e) => {
                errors.push(format!("box: {e}"));
                None
            }
        };
        let dt_rule = match self.dt_rule.as_deref().map(str::parse::<DtRule>) {
            None => Some(DtRule::H),
            Some(Ok(r)) => Some(r),
            Some(Err(e)) => {
                errors.push(e.to_string());
                None
            }
        };
        if let Some(s) = self.sigma {
            if !(s > 0.0) {
                errors.push(format!("sigma must be positive, got {s}"));
            }
        }
        if let Some(t) = self.final_time {
            if !(t > 0.0) {
                errors.push(format!("final_time must be positive, got {t}"));
            }
        }
        if !errors.is_empty() {
            return Err(Error::InvalidConfig(errors));
        }
        let (phi, f, u0) = (phi.unwrap(), f.unwrap(), u0.unwrap());
        let vars = |x: &Point<T>, t: T| [x[0], x[1], x[2], t];
        let exact = match (exact.flatten(), grad) {
            (Some(e), Some(g)) => {
                let g: Vec<Expr> = g.into_iter().map(Option::unwrap).collect();
                Some(ExactSolution {
                    value: Arc::new(move |x: &Point<T>, t: T| e.eval(&vars(x, t))),
                    gradient: Arc::new(move |x: &Point<T>, t: T| {
                        let mut out = [T::zero(); 3];
                        for (o, gi) in out.iter_mut().zip(&g) {
                            *o = gi.eval(&vars(x, t));
                        }
                        out
                    }),
                })
            }
            _ => None,
        };
        Ok(TestCase {
            name: self.name.clone(),
            levelset: LevelSetFunction::new(self.name.clone(), move |x: &Point<T>| phi.eval(&vars(x, T::zero()))),
            source: Arc::new(move |x: &Point<T>, t: T| f.eval(&vars(x, t))),
            initial: Arc::new(move |x: &Point<T>| u0.eval(&vars(x, T::zero()))),
            exact,
            domain: domain.unwrap(),
            sigma: T::lit(self.sigma.unwrap_or(1.0)),
            final_time: T::lit(self.final_time.unwrap_or(1.0)),
            dt_rule: dt_rule.unwrap(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn circle_values() {
        let c = circle_case::<f64>();
        let u = c.exact.as_ref().unwrap();
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!(((u.value)(&[0.0, 0.0, 0.0], half_pi) - 1.0).abs() < 1e-15);
        for k in 0..360 {
            let a = (k as f64).to_radians();
            let v = (u.value)(&[a.cos(), a.sin(), 0.0], 0.7);
            assert!(v.abs() < 1e-15, "{v}");
            assert!((c.levelset.eval(&[a.cos(), a.sin(), 0.0])).abs() < 1e-15);
        }
        assert_eq!((u.value)(&[0.3, -0.2, 0.0], 0.0), 0.0);
    }

    #[test]
    fn circle_source_matches_finite_differences() {
        let c = circle_case::<f64>();
        let u = c.exact.as_ref().unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let e = 1e-4;
        for _ in 0..5 {
            let x = [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2), 0.0];
            let t = rng.gen_range(0.1..1.0);
            let val = |p: [f64; 3], s: f64| (u.value)(&p, s);
            let dt = (val(x, t + e) - val(x, t - e)) / (2.0 * e);
            let mut lap = 0.0;
            let mut grad = [0.0; 2];
            for a in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[a] += e;
                xm[a] -= e;
                lap += (val(xp, t) - 2.0 * val(x, t) + val(xm, t)) / (e * e);
                grad[a] = (val(xp, t) - val(xm, t)) / (2.0 * e);
            }
            let f = (c.source)(&x, t);
            let fd = dt - lap;
            assert!((f - fd).abs() <= 1e-6 * fd.abs().max(1.0), "{f} vs {fd}");
            let g = (u.gradient)(&x, t);
            for a in 0..2 {
                assert!((g[a] - grad[a]).abs() <= 1e-6 * grad[a].abs().max(1.0));
            }
        }
    }

    #[test]
    fn popcorn_geometry() {
        let c = popcorn_case::<f64>();
        let r0 = POPCORN_R0;
        assert!(c.levelset.eval(&[0.0, 0.0, 0.0]) < 0.0);
        assert!(c.levelset.eval(&[0.0, 0.0, r0]) < 0.0);
        for corner in [[1.5, 1.5, 1.5], [-1.5, 1.5, -1.5], [-1.5, -1.5, -1.5]] {
            assert!(c.levelset.eval(&corner) > 0.0);
        }
        let k0 = popcorn_centers()[0];
        let s = r0 / 5f64.sqrt();
        assert!((k0[0] - 2.0 * s).abs() < 1e-15 && k0[1].abs() < 1e-15 && (k0[2] - s).abs() < 1e-15);
        // all off-pole centers sit on the sphere of radius r0
        for cen in popcorn_centers() {
            let r = (cen[0] * cen[0] + cen[1] * cen[1] + cen[2] * cen[2]).sqrt();
            assert!((r - r0).abs() < 1e-14);
        }
        assert_eq!((c.source)(&POPCORN_SOURCE_CENTER, 0.4), 1.0);
        assert!(c.exact.is_none());
    }

    #[test]
    fn custom_case_from_toml() {
        let text = r#"
            name = "square-ish"
            dim = 2
            phi = "x^2 + y^2 - 0.5"
            f = "1"
            exact = "t * (x^2 + y^2 - 0.5)"
            exact_grad = ["2*t*x", "2*t*y"]
        "#;
        let c: TestCase<f64> = CaseConfig::from_toml(text).unwrap().build().unwrap();
        assert_eq!(c.dim(), 2);
        assert!((c.levelset.eval(&[0.5, 0.5, 0.0])).abs() < 1e-15);
        let g = (c.exact.as_ref().unwrap().gradient)(&[1.0, 2.0, 0.0], 0.5);
        assert_eq!(g, [1.0, 2.0, 0.0]);
        assert_eq!((c.initial)(&[0.1, 0.2, 0.0]), 0.0);
    }

    #[test]
    fn custom_case_reports_all_problems() {
        let text = r#"
            name = "broken"
            dim = 4
            phi = "x + t"
            f = "sin("
            exact = "x"
        "#;
        match CaseConfig::from_toml(text).unwrap().build::<f64>() {
            Err(Error::InvalidConfig(v)) => assert!(v.len() >= 4, "{v:?}"),
            other => panic!("{other:?}"),
        }
        assert!(CaseConfig::from_toml("name = 1").is_err());
        assert!(builtin_case::<f64>("square").is_err());
    }
}
