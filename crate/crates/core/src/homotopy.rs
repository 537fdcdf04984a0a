//! Total-degree homotopy continuation for square polynomial systems.
//!
//! `H(x, t) = (1 - t) gamma g(x) + t f(x)` with start system
//! `g_i = x_i^{d_i} - 1` and a random complex `gamma`, tracked from t = 0 to
//! t = 1 by an RK4 predictor and a Newton corrector with adaptive steps.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::poly::{Poly, C64};

#[derive(Clone, Debug)]
pub struct PolySystem {
    eqs: Vec<Poly<C64>>,
    jac: Vec<Vec<Poly<C64>>>,
    degrees: Vec<u32>,
}

impl PolySystem {
    pub fn new(eqs: Vec<Poly<C64>>) -> Result<Self> {
        let n = eqs.len();
        if n == 0 || eqs.iter().any(|e| e.nvars() != n) {
            return Err(Error::InvalidInput("homotopy needs n equations in n unknowns".into()));
        }
        let degrees = eqs.iter().map(|e| e.total_degree().ok_or(Error::ZeroPolynomial)).collect::<Result<Vec<_>>>()?;
        if degrees.contains(&0) {
            return Err(Error::InvalidInput("constant equation in homotopy system".into()));
        }
        let jac = eqs.iter().map(|e| e.gradient()).collect();
        Ok(PolySystem { eqs, jac, degrees })
    }

    pub fn len(&self) -> usize {
        self.eqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    pub fn bezout_number(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).product()
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        self.eqs.iter().map(|e| e.eval(x)).collect()
    }

    pub fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| self.jac[i][j].eval(x))
    }

    /// Largest relative residual over the equations.
    pub fn residual(&self, x: &[C64]) -> f64 {
        self.eqs.iter().map(|e| e.relative_residual(x)).fold(0.0, f64::max)
    }

    /// Newton refinement on the target system.
    pub fn refine(&self, x: &[C64], iters: usize) -> Vec<C64> {
        let mut x = x.to_vec();
        for _ in 0..iters {
            let f = self.eval(&x);
            let Some(dx) = linalg::solve(&self.jacobian(&x), &f) else { break };
            let cand: Vec<C64> = x.iter().zip(&dx).map(|(a, b)| a - b).collect();
            if self.residual(&cand) > self.residual(&x) {
                break;
            }
            let small = linalg::norm(&dx) <= 1e-15 * (1.0 + linalg::norm(&x));
            x = cand;
            if small {
                break;
            }
        }
        x
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrackOptions {
    pub max_steps: usize,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Corrector acceptance, relative to `1 + |x|`.
    pub newton_tol: f64,
    /// Paths whose norm exceeds this are declared divergent.
    pub divergence: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { max_steps: 20_000, initial_step: 0.01, max_step: 0.05, min_step: 1e-13, newton_tol: 1e-9, divergence: 1e8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStatus {
    /// Reached t = 1 at a nonsingular solution.
    Regular,
    /// Reached t = 1 (or stalled just before) at an ill-conditioned point.
    Singular,
    Diverged,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathEnd {
    pub x: Vec<C64>,
    pub status: PathStatus,
    pub t: f64,
    pub steps: usize,
    /// Inverse condition number of the target Jacobian at the endpoint.
    pub inverse_condition: f64,
    pub residual: f64,
}

struct Homotopy<'a> {
    target: &'a PolySystem,
    gamma: C64,
}

impl Homotopy<'_> {
    fn start_eval(&self, x: &[C64]) -> Vec<C64> {
        x.iter().zip(&self.target.degrees).map(|(xi, &d)| xi.powu(d) - 1.0).collect()
    }

    fn start_jac_diag(&self, x: &[C64]) -> Vec<C64> {
        x.iter().zip(&self.target.degrees).map(|(xi, &d)| xi.powu(d - 1) * d as f64).collect()
    }

    fn h(&self, x: &[C64], t: f64) -> Vec<C64> {
        let g = self.start_eval(x);
        let f = self.target.eval(x);
        g.iter().zip(&f).map(|(gi, fi)| self.gamma * gi * (1.0 - t) + fi * t).collect()
    }

    fn hx(&self, x: &[C64], t: f64) -> DMatrix<C64> {
        let mut j = self.target.jacobian(x) * C64::new(t, 0.0);
        for (i, d) in self.start_jac_diag(x).iter().enumerate() {
            j[(i, i)] += self.gamma * d * (1.0 - t);
        }
        j
    }

    /// dx/dt along the path.
    fn velocity(&self, x: &[C64], t: f64) -> Option<Vec<C64>> {
        let g = self.start_eval(x);
        let f = self.target.eval(x);
        let ht: Vec<C64> = g.iter().zip(&f).map(|(gi, fi)| -(fi - self.gamma * gi)).collect();
        linalg::solve(&self.hx(x, t), &ht)
    }

    fn correct(&self, x: &[C64], t: f64, tol: f64) -> Option<Vec<C64>> {
        let mut x = x.to_vec();
        let mut last = f64::INFINITY;
        for _ in 0..4 {
            let dx = linalg::solve(&self.hx(&x, t), &self.h(&x, t))?;
            let nd = linalg::norm(&dx);
            if !nd.is_finite() || nd > 0.5 * last {
                return None;
            }
            for (a, b) in x.iter_mut().zip(&dx) {
                *a -= b;
            }
            if nd <= tol * (1.0 + linalg::norm(&x)) {
                return Some(x);
            }
            last = nd;
        }
        None
    }

    fn track(&self, start: Vec<C64>, opts: &TrackOptions) -> PathEnd {
        let add = |x: &[C64], k: &[C64], s: f64| -> Vec<C64> { x.iter().zip(k).map(|(a, b)| a + b * s).collect() };
        let mut x = start;
        let mut t = 0.0;
        let mut h = opts.initial_step;
        let mut streak = 0;
        let mut steps = 0;
        let mut status = PathStatus::Failed;
        while steps < opts.max_steps {
            if t >= 1.0 {
                status = PathStatus::Regular;
                break;
            }
            steps += 1;
            let hh = h.min(1.0 - t);
            let pred = (|| {
                let k1 = self.velocity(&x, t)?;
                let k2 = self.velocity(&add(&x, &k1, hh / 2.0), t + hh / 2.0)?;
                let k3 = self.velocity(&add(&x, &k2, hh / 2.0), t + hh / 2.0)?;
                let k4 = self.velocity(&add(&x, &k3, hh), t + hh)?;
                Some((0..x.len()).map(|i| x[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (hh / 6.0)).collect::<Vec<C64>>())
            })();
            let tn = if 1.0 - t - hh < 1e-15 { 1.0 } else { t + hh };
            match pred.and_then(|p| self.correct(&p, tn, opts.newton_tol)) {
                Some(xn) => {
                    x = xn;
                    t = tn;
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(opts.max_step);
                        streak = 0;
                    }
                    if linalg::norm(&x) > opts.divergence {
                        status = PathStatus::Diverged;
                        break;
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                    if h < opts.min_step {
                        break;
                    }
                }
            }
        }
        if t >= 1.0 {
            status = PathStatus::Regular;
        }
        if status == PathStatus::Regular {
            x = self.target.refine(&x, 3);
        }
        let inverse_condition = linalg::inverse_condition(&self.target.jacobian(&x));
        if status != PathStatus::Diverged && inverse_condition < 1e-7 && t > 0.999 {
            status = PathStatus::Singular;
        }
        let residual = self.target.residual(&x);
        PathEnd { x, status, t, steps, inverse_condition, residual }
    }
}

/// Tracks all Bezout-many paths of the total-degree homotopy.
pub fn solve_total_degree(target: &PolySystem, seed: u64, opts: &TrackOptions) -> Vec<PathEnd> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x686f_6d6f);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let hom = Homotopy { target, gamma: C64::from_polar(1.0, theta) };
    start_solutions(&target.degrees).into_iter().map(|s| hom.track(s, opts)).collect()
}

fn start_solutions(degrees: &[u32]) -> Vec<Vec<C64>> {
    let mut out = vec![Vec::new()];
    for &d in degrees {
        let roots: Vec<C64> = (0..d).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)).collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                roots.iter().map(move |r| {
                    let mut v = prefix.clone();
                    v.push(*r);
                    v
                })
            })
            .collect();
    }
    out
}

/// Affine chart `y -> base + sum y_i dirs[i]` of projective space.
#[derive(Clone, Debug)]
pub struct AffineChart {
    pub base: Vec<C64>,
    pub dirs: Vec<Vec<C64>>,
}

impl AffineChart {
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> AffineChart {
        let v = |rng: &mut R| -> Vec<C64> { (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect() };
        let base = v(rng);
        let dirs = (1..n).map(|_| v(rng)).collect();
        AffineChart { base, dirs }
    }

    /// Coordinate polynomials of the chart, in `n - 1` affine unknowns.
    pub fn coordinate_polys(&self) -> Vec<Poly<C64>> {
        (0..self.base.len()).map(|i| Poly::affine(&self.dirs.iter().map(|d| d[i]).collect::<Vec<_>>(), self.base[i])).collect()
    }

    pub fn point(&self, y: &[C64]) -> Vec<C64> {
        let mut x = self.base.clone();
        for (yi, d) in y.iter().zip(&self.dirs) {
            for (xk, dk) in x.iter_mut().zip(d) {
                *xk += yi * dk;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn circle_and_line() {
        // x^2 + y^2 = 1, x - y = 0: solutions (+-1/sqrt2, +-1/sqrt2).
        let x2 = Poly::from_terms(2, [(vec![2, 0], c(1.0, 0.0)), (vec![0, 2], c(1.0, 0.0)), (vec![0, 0], c(-1.0, 0.0))]);
        let l = Poly::from_terms(2, [(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(-1.0, 0.0))]);
        let sys = PolySystem::new(vec![x2, l]).unwrap();
        assert_eq!(sys.bezout_number(), 2);
        let ends = solve_total_degree(&sys, 1, &TrackOptions::default());
        let mut xs: Vec<f64> = ends.iter().filter(|e| e.status == PathStatus::Regular).map(|e| e.x[0].re).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(xs.len(), 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((xs[0] + s).abs() < 1e-12 && (xs[1] - s).abs() < 1e-12);
    }

    #[test]
    fn bezout_count_for_generic_dense_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut eqs = Vec::new();
        for d in [3u32, 2, 2] {
            let mut p = Poly::zero(3);
            for e in crate::poly::monomials(4, d) {
                p.add_term(e[1..].to_vec(), c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
            eqs.push(p);
        }
        let sys = PolySystem::new(eqs).unwrap();
        let ends = solve_total_degree(&sys, 2, &TrackOptions::default());
        assert_eq!(ends.len(), 12);
        let good: Vec<&PathEnd> = ends.iter().filter(|e| e.status == PathStatus::Regular).collect();
        assert_eq!(good.len(), 12);
        for (i, a) in good.iter().enumerate() {
            assert!(a.residual < 1e-12);
            for b in &good[..i] {
                let d: Vec<C64> = a.x.iter().zip(&b.x).map(|(u, v)| u - v).collect();
                assert!(linalg::norm(&d) > 1e-6, "path jumping");
            }
        }
    }

    #[test]
    fn double_root_is_flagged_singular() {
        // (x - 1)^2 = 0 together with y = 0.
        let p = Poly::from_terms(2, [(vec![2, 0], c(1.0, 0.0)), (vec![1, 0], c(-2.0, 0.0)), (vec![0, 0], c(1.0, 0.0))]);
        let l = Poly::var(2, 1);
        let sys = PolySystem::new(vec![p, l]).unwrap();
        for e in solve_total_degree(&sys, 3, &TrackOptions::default()) {
            assert_ne!(e.status, PathStatus::Regular);
            assert!((e.x[0] - 1.0).norm() < 1e-3);
        }
    }
}
