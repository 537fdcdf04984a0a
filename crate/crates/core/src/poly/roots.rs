//! Complex roots of univariate polynomials with multiplicity clustering.
//!
//! Roots come from the eigenvalues of a scaled companion matrix. Nearby
//! roots are merged into one cluster when they lie within `eps_cluster`
//! (relative), or when the merged centroid passes the Taylor test: the
//! first `k` Taylor coefficients at the centroid vanish to `eps_cert`
//! relative to their own scale. The second rule is what recovers triple and
//! quadruple roots, whose float images spread like `eps^(1/k)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::scalar::{Rational, C64};
use super::univariate::UPoly;
use crate::error::{Error, Result};
use crate::linalg;

/// Largest relative distance at which the Taylor test is attempted.
const MERGE_RADIUS: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootCluster {
    pub value: C64,
    pub multiplicity: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDivisor {
    pub roots: Vec<RootCluster>,
    pub degree_at_infinity: usize,
}

impl RootDivisor {
    pub fn degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum::<usize>() + self.degree_at_infinity
    }

    pub fn max_residual(&self) -> f64 {
        self.roots.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn is_certified(&self, eps_cert: f64) -> bool {
        self.max_residual() <= eps_cert
    }

    /// Cluster whose value is within `tol` (relative) of `t`.
    pub fn find(&self, t: C64, tol: f64) -> Option<&RootCluster> {
        self.roots.iter().find(|r| (r.value - t).norm() <= tol * (1.0 + t.norm()))
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.roots.iter().map(|r| r.multiplicity).collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }
}

/// Relative size of the first `k` Taylor coefficients of `p` at `c`. The
/// scale is the absolute-value polynomial expanded at `max(|c|, 1)`, so a
/// root near 0 is not measured against its own vanishing coefficients.
///
/// Roots outside the unit disc are measured on the reversed polynomial at
/// `1/c`, the chart of the binary form in which they are well conditioned.
pub fn taylor_residual(p: &UPoly<C64>, c: C64, k: usize) -> f64 {
    if c.norm() > 1.0 {
        return chart_residual(&reversed(p), c.inv(), k);
    }
    chart_residual(p, c, k)
}

fn reversed(p: &UPoly<C64>) -> UPoly<C64> {
    UPoly::new(p.coeffs().iter().rev().copied().collect())
}

fn chart_residual(p: &UPoly<C64>, c: C64, k: usize) -> f64 {
    let b = p.taylor_at(c);
    let abs: Vec<f64> = p.coeffs().iter().map(|x| x.norm()).collect();
    let babs = UPoly::new(abs.iter().map(|&a| C64::new(a, 0.0)).collect()).taylor_at(C64::new(c.norm().max(1.0), 0.0));
    (0..k.min(b.len()))
        .map(|j| {
            let s = babs[j].re;
            if s == 0.0 {
                0.0
            } else {
                b[j].norm() / s
            }
        })
        .fold(0.0, f64::max)
}

/// All complex roots with multiplicities. Leading coefficients below
/// `eps_cert` times the coefficient norm count as roots at infinity.
pub fn roots_with_multiplicities(p: &UPoly<C64>, eps_cluster: f64, eps_cert: f64) -> Result<RootDivisor> {
    let norm = p.l1_norm();
    if norm == 0.0 || p.coeffs().is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    let c = p.coeffs();
    let mut top = c.len() - 1;
    while top > 0 && c[top].norm() <= eps_cert * norm {
        top -= 1;
    }
    let degree_at_infinity = c.len() - 1 - top;
    let mut low = 0;
    while low < top && c[low].norm() == 0.0 {
        low += 1;
    }
    let trimmed = UPoly::new(c[low..=top].to_vec());
    let mut roots = vec![C64::new(0.0, 0.0); low];
    roots.extend(companion_roots(&trimmed)?);
    let full = UPoly::new(c[..=top].to_vec());
    let mut clusters = cluster(&full, roots, eps_cluster, eps_cert);
    for cl in clusters.iter_mut() {
        if cl.multiplicity == 1 {
            cl.value = newton_polish(&full, cl.value);
        }
        cl.residual = taylor_residual(&full, cl.value, cl.multiplicity);
    }
    clusters.sort_by(|a, b| a.value.re.partial_cmp(&b.value.re).unwrap().then(a.value.im.partial_cmp(&b.value.im).unwrap()));
    Ok(RootDivisor { roots: clusters, degree_at_infinity })
}

/// Exact-mode variant: multiplicities come from an exact square-free
/// decomposition over the rationals, so they are never a tolerance call.
pub fn roots_with_multiplicities_exact(p: &UPoly<Rational>) -> Result<RootDivisor> {
    let p = p.trim();
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut roots = Vec::new();
    for (k, factor) in square_free_decomposition(&p).into_iter().enumerate() {
        let f = factor.to_c64();
        if f.coeffs().len() <= 1 {
            continue;
        }
        for r in companion_roots(&f)? {
            let r = newton_polish(&f, r);
            roots.push(RootCluster { value: r, multiplicity: k + 1, residual: taylor_residual(&f, r, 1) });
        }
    }
    roots.sort_by(|a, b| a.value.re.partial_cmp(&b.value.re).unwrap().then(a.value.im.partial_cmp(&b.value.im).unwrap()));
    Ok(RootDivisor { roots, degree_at_infinity: 0 })
}

/// Yun's algorithm: returns `[f_1, f_2, ...]` with `p = c * prod f_i^i`.
pub fn square_free_decomposition(p: &UPoly<Rational>) -> Vec<UPoly<Rational>> {
    let p = monic(&p.trim());
    let dp = p.derivative().trim();
    let mut out = Vec::new();
    if dp.is_zero() {
        return out;
    }
    let mut a = gcd(&p, &dp);
    let mut b = p.div_rem(&a).0;
    let mut c = dp.div_rem(&a).0;
    let mut d = c.sub(&b.derivative()).trim();
    loop {
        a = gcd(&b, &d);
        out.push(a.clone());
        b = b.div_rem(&a).0;
        if b.degree().unwrap_or(0) == 0 {
            break;
        }
        c = d.div_rem(&a).0;
        d = c.sub(&b.derivative()).trim();
    }
    out
}

pub fn gcd(a: &UPoly<Rational>, b: &UPoly<Rational>) -> UPoly<Rational> {
    let mut x = a.trim();
    let mut y = b.trim();
    while !y.is_zero() {
        let r = x.div_rem(&y).1;
        x = y;
        y = r;
    }
    if x.is_zero() {
        x
    } else {
        monic(&x)
    }
}

fn monic(p: &UPoly<Rational>) -> UPoly<Rational> {
    let p = p.trim();
    match p.degree() {
        Some(d) => {
            let lead = p.coeffs()[d].clone();
            p.scale(&(<Rational as num_traits::One>::one() / lead))
        }
        None => p,
    }
}

/// Eigenvalues of the companion matrix after rescaling `t = sigma s`.
pub fn companion_roots(p: &UPoly<C64>) -> Result<Vec<C64>> {
    let c = p.coeffs();
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }
    let lead = c[n];
    let sigma = if c[0].norm() > 0.0 { (c[0].norm() / lead.norm()).powf(1.0 / n as f64) } else { 1.0 };
    let sigma = if sigma.is_finite() && sigma > 0.0 { sigma } else { 1.0 };
    // q(s) = p(sigma s) / (lead sigma^n), monic.
    let mut q = vec![C64::new(0.0, 0.0); n];
    for (k, qk) in q.iter_mut().enumerate() {
        *qk = c[k] * sigma.powi(k as i32 - n as i32) / lead;
    }
    let mut qp = q.clone();
    qp.push(C64::new(1.0, 0.0));
    let qp = UPoly::new(qp);
    // Highly symmetric inputs (t^n + 1) can stall the shifted QR sweep; a
    // Taylor shift of the variable breaks the symmetry.
    for shift in [C64::new(0.0, 0.0), C64::new(0.137, 0.291), C64::new(-0.413, 0.062)] {
        let b = if shift.norm() == 0.0 { qp.coeffs().to_vec() } else { qp.taylor_at(shift) };
        let m = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -b[i]
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        if let Some(ev) = linalg::eigenvalues(m) {
            return Ok(ev.into_iter().map(|s| (s + shift) * sigma).collect());
        }
    }
    Err(Error::NonConvergence("companion eigenvalues".into()))
}

fn newton_polish(p: &UPoly<C64>, r: C64) -> C64 {
    if r.norm() > 1.0 {
        return newton_polish_chart(&reversed(p), r.inv()).inv();
    }
    newton_polish_chart(p, r)
}

fn newton_polish_chart(p: &UPoly<C64>, mut r: C64) -> C64 {
    let dp = p.derivative();
    let mut best = (p.eval(&r).norm(), r);
    for _ in 0..4 {
        let d = dp.eval(&r);
        if d.norm() == 0.0 {
            break;
        }
        r -= p.eval(&r) / d;
        let v = p.eval(&r).norm();
        if v < best.0 {
            best = (v, r);
        } else {
            break;
        }
    }
    best.1
}

fn cluster(p: &UPoly<C64>, roots: Vec<C64>, eps_cluster: f64, eps_cert: f64) -> Vec<RootCluster> {
    let mut groups: Vec<Vec<C64>> = roots.into_iter().map(|r| vec![r]).collect();
    let centroid = |g: &Vec<C64>| g.iter().sum::<C64>() / g.len() as f64;
    loop {
        let cents: Vec<C64> = groups.iter().map(centroid).collect();
        let mut pairs = Vec::new();
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let scale = 1.0f64.max(cents[i].norm()).max(cents[j].norm());
                let d = (cents[i] - cents[j]).norm() / scale;
                if d <= MERGE_RADIUS {
                    pairs.push((d, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged = false;
        for (d, i, j) in pairs {
            let mut g = groups[i].clone();
            g.extend(groups[j].iter().copied());
            let c = centroid(&g);
            if d <= eps_cluster || taylor_residual(p, c, g.len()) <= eps_cert {
                groups[i] = g;
                groups.remove(j);
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }
    groups.iter().map(|g| RootCluster { value: centroid(g), multiplicity: g.len(), residual: 0.0 }).collect()
}
