//! Sparse multivariate polynomials and homogeneous forms.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::{Rational, Scalar, C64};
use super::univariate::UPoly;
use crate::error::{Error, Result};

/// Exponent vector of a monomial.
pub type Exponent = Vec<u32>;

/// Sparse polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    nvars: usize,
    terms: BTreeMap<Exponent, S>,
}

impl<S: Scalar> Poly<S> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, S::one());
        p
    }

    /// Linear polynomial `sum coeffs[i] * x_i + c0`.
    pub fn affine(coeffs: &[S], c0: S) -> Self {
        let n = coeffs.len();
        let mut p = Self::constant(n, c0);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, S)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal variable count");
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: S) {
        debug_assert_eq!(e.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == k).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, S::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.nvars);
        let maxd = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<S>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(maxd + 1);
                v.push(S::one());
                for k in 1..=maxd {
                    v.push(v[k - 1].clone() * xi.clone());
                }
                v
            })
            .collect();
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m = m * powers[i][k as usize].clone();
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Evaluates at a complex point regardless of the coefficient field.
    pub fn eval_c64(&self, x: &[C64]) -> C64 {
        self.eval_with_abs(x).0
    }

    /// Returns the value and `sum |c| |x^e|`, the natural scale for a
    /// relative residual.
    pub fn eval_with_abs(&self, x: &[C64]) -> (C64, f64) {
        assert_eq!(x.len(), self.nvars);
        let mut acc = C64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (e, c) in &self.terms {
            let mut m = c.to_c64();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= x[i].powu(k);
                }
            }
            abs += m.norm();
            acc += m;
        }
        (acc, abs)
    }

    /// `|p(x)| / sum |c||x^e|`; zero when the scale vanishes.
    pub fn relative_residual(&self, x: &[C64]) -> f64 {
        let (v, s) = self.eval_with_abs(x);
        if s == 0.0 {
            0.0
        } else {
            v.norm() / s
        }
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c.clone() * S::from_i64(e[i] as i64));
            }
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Substitutes `x_i -> subs[i]`; all substitutes share one variable set.
    pub fn compose(&self, subs: &[Poly<S>]) -> Poly<S> {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map(|p| p.nvars).unwrap_or(0);
        let maxd = self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        let powers: Vec<Vec<Poly<S>>> = subs
            .iter()
            .map(|p| {
                let mut v = vec![Poly::constant(m, S::one())];
                for k in 1..=maxd {
                    let next = &v[k - 1] * p;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &powers[i][k as usize];
                }
            }
            out = out + t;
        }
        out
    }

    /// Coefficients with respect to `var`, lowest power first; each
    /// coefficient keeps the full variable set with `var` exponent zero.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly<S>> {
        let d = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let k = f[var] as usize;
            f[var] = 0;
            out[k].add_term(f, c.clone());
        }
        out
    }

    /// Drops variable `var`, which must not occur.
    pub fn remove_var(&self, var: usize) -> Poly<S> {
        let mut out = Poly::zero(self.nvars - 1);
        for (e, c) in &self.terms {
            assert_eq!(e[var], 0, "variable still occurs");
            let mut f = e.clone();
            f.remove(var);
            out.add_term(f, c.clone());
        }
        out
    }

    /// Univariate view of a one-variable polynomial.
    pub fn to_upoly(&self) -> UPoly<S> {
        assert_eq!(self.nvars, 1);
        let d = self.total_degree().unwrap_or(0) as usize;
        let mut c = vec![S::zero(); d + 1];
        for (e, v) in &self.terms {
            c[e[0] as usize] = v.clone();
        }
        UPoly::new(c)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }

    pub fn to_c64(&self) -> Poly<C64> {
        self.map(|c| c.to_c64())
    }

    /// Sum of coefficient magnitudes.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).sum()
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Removes float coefficients below `tol` times the largest one.
    pub fn chop(&self, tol: f64) -> Self {
        let m = self.max_coeff();
        Poly { nvars: self.nvars, terms: self.terms.iter().filter(|(_, c)| c.magnitude() > tol * m).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(mut self, rhs: Poly<S>) -> Poly<S> {
        assert_eq!(self.nvars, rhs.nvars);
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: Poly<S>) -> Poly<S> {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly { nvars: self.nvars, terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<S: Scalar> Mul for &Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &Poly<S>) -> Poly<S> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: Poly<S>) -> Poly<S> {
        &self * &rhs
    }
}

/// Homogeneous polynomial of fixed degree in `nvars` projective coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousForm<S> {
    degree: u32,
    poly: Poly<S>,
}

pub type Form = HomogeneousForm<C64>;
pub type ExactForm = HomogeneousForm<Rational>;

impl<S: Scalar> HomogeneousForm<S> {
    pub fn new(degree: u32, poly: Poly<S>) -> Result<Self> {
        for e in poly.terms.keys() {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidInput(format!("monomial {:?} does not have degree {}", e, degree)));
            }
        }
        Ok(HomogeneousForm { degree, poly })
    }

    /// Infers the degree from the terms; the zero polynomial is rejected.
    pub fn from_poly(poly: Poly<S>) -> Result<Self> {
        let d = poly.total_degree().ok_or_else(|| Error::InvalidInput("zero polynomial has no degree".into()))?;
        Self::new(d, poly)
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogeneousForm { degree, poly: Poly::zero(nvars) }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, S)>>(nvars: usize, degree: u32, terms: I) -> Result<Self> {
        Self::new(degree, Poly::from_terms(nvars, terms))
    }

    pub fn linear(coeffs: &[S]) -> Self {
        HomogeneousForm { degree: 1, poly: Poly::affine(coeffs, S::zero()) }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars
    }

    pub fn poly(&self) -> &Poly<S> {
        &self.poly
    }

    pub fn into_poly(self) -> Poly<S> {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval(&self, x: &[S]) -> S {
        self.poly.eval(x)
    }

    pub fn eval_c64(&self, x: &[C64]) -> C64 {
        self.poly.eval_c64(x)
    }

    /// Normwise backward error `|f(x)| / (|f|_1 |x|_inf^d)`. Unlike the
    /// termwise scale it does not collapse at coordinate points, where a
    /// single rounding-level coefficient would otherwise read as residual 1.
    pub fn relative_residual(&self, x: &[C64]) -> f64 {
        let v = self.poly.eval_c64(x).norm();
        let xmax = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let s = self.l1_norm() * xmax.powi(self.degree as i32);
        if s == 0.0 {
            0.0
        } else {
            v / s
        }
    }

    pub fn partial(&self, i: usize) -> HomogeneousForm<S> {
        HomogeneousForm { degree: self.degree.saturating_sub(1), poly: self.poly.partial(i) }
    }

    pub fn gradient(&self) -> Vec<HomogeneousForm<S>> {
        (0..self.nvars()).map(|i| self.partial(i)).collect()
    }

    /// Directional derivative `sum v_i dF/dx_i`.
    pub fn polar(&self, v: &[S]) -> HomogeneousForm<S> {
        let mut poly = Poly::zero(self.nvars());
        for (i, vi) in v.iter().enumerate() {
            poly = poly + self.poly.partial(i).scale(vi);
        }
        HomogeneousForm { degree: self.degree.saturating_sub(1), poly }
    }

    pub fn mul(&self, other: &HomogeneousForm<S>) -> HomogeneousForm<S> {
        HomogeneousForm { degree: self.degree + other.degree, poly: &self.poly * &other.poly }
    }

    pub fn add(&self, other: &HomogeneousForm<S>) -> Result<HomogeneousForm<S>> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidInput("adding forms of different degree".into()));
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        Ok(HomogeneousForm { degree, poly: self.poly.clone() + other.poly.clone() })
    }

    pub fn scale(&self, c: &S) -> HomogeneousForm<S> {
        HomogeneousForm { degree: self.degree, poly: self.poly.scale(c) }
    }

    /// Pulls the form back along the linear map `u -> sum_j u_j columns[j]`.
    pub fn compose_linear(&self, columns: &[Vec<S>]) -> HomogeneousForm<S> {
        let k = columns.len();
        let subs: Vec<Poly<S>> = (0..self.nvars())
            .map(|i| {
                let coeffs: Vec<S> = columns.iter().map(|c| c[i].clone()).collect();
                Poly::affine(&coeffs, S::zero())
            })
            .collect();
        let poly = if self.is_zero() { Poly::zero(k) } else { self.poly.compose(&subs) };
        HomogeneousForm { degree: self.degree, poly }
    }

    /// `t -> F(base + t * direction)`, padded to length `degree + 1`.
    pub fn restrict_to_line(&self, base: &[S], direction: &[S]) -> Result<UPoly<S>> {
        let n = self.nvars();
        if base.len() != n || direction.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: base.len().max(direction.len()) });
        }
        let subs: Vec<Poly<S>> = (0..n).map(|i| Poly::affine(&[direction[i].clone()], base[i].clone())).collect();
        let g = self.poly.compose(&subs);
        let mut c = vec![S::zero(); self.degree as usize + 1];
        for (e, v) in g.terms() {
            c[e[0] as usize] = v.clone();
        }
        Ok(UPoly::new(c))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HomogeneousForm<T> {
        HomogeneousForm { degree: self.degree, poly: self.poly.map(f) }
    }

    pub fn to_c64(&self) -> Form {
        self.map(|c| c.to_c64())
    }

    pub fn l1_norm(&self) -> f64 {
        self.poly.l1_norm()
    }
}

/// Number of monomials of degree `d` in `n` variables.
pub fn monomial_count(n: usize, d: u32) -> usize {
    binomial(n as u64 - 1 + d as u64, d as u64) as usize
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All exponent vectors of total degree `d` in `n` variables, in
/// lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if n == 1 {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n - 1, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::rational;

    fn fermat() -> ExactForm {
        let terms = (0..4).map(|i| {
            let mut e = vec![0; 4];
            e[i] = 4;
            (e, rational(1, 1))
        });
        HomogeneousForm::from_terms(4, 4, terms).unwrap()
    }

    #[test]
    fn fermat_restricted_to_coordinate_line() {
        let one = rational(1, 1);
        let zero = rational(0, 1);
        let g = fermat().restrict_to_line(&[one.clone(), zero.clone(), zero.clone(), zero.clone()], &[zero.clone(), one.clone(), zero.clone(), zero]).unwrap();
        assert_eq!(g.coeffs(), &[one.clone(), rational(0, 1), rational(0, 1), rational(0, 1), one][..]);
    }

    #[test]
    fn fermat_contains_zeta_line() {
        let z = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let o = C64::new(1.0, 0.0);
        let n = C64::new(0.0, 0.0);
        let g = fermat().to_c64().restrict_to_line(&[z, o, n, n], &[n, n, z, o]).unwrap();
        assert!(g.coeffs().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn rejects_inhomogeneous_terms() {
        let p = Poly::from_terms(2, vec![(vec![2, 0], rational(1, 1)), (vec![1, 0], rational(1, 1))]);
        assert!(HomogeneousForm::new(2, p).is_err());
    }

    #[test]
    fn dimension_mismatch_on_restriction() {
        let f = fermat();
        let one = rational(1, 1);
        assert!(f.restrict_to_line(std::slice::from_ref(&one), std::slice::from_ref(&one)).is_err());
    }

    #[test]
    fn euler_relation_exact() {
        // sum x_i dF/dx_i = deg * F
        let f = fermat();
        let x: Vec<Rational> = vec![rational(2, 3), rational(-1, 5), rational(7, 2), rational(1, 1)];
        let grad = f.gradient();
        let lhs = grad.iter().zip(&x).fold(rational(0, 1), |acc, (g, xi)| acc + g.eval(&x) * xi.clone());
        assert_eq!(lhs, f.eval(&x) * rational(4, 1));
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials(4, 4).len(), 35);
        assert_eq!(monomial_count(4, 4), 35);
        assert_eq!(monomial_count(3, 6), 28);
        assert_eq!(monomials(3, 2)[0], vec![2, 0, 0]);
    }
}
