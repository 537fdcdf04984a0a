//! Dense univariate polynomials, lowest degree first.

use super::scalar::{Scalar, C64};

/// Coefficients `c[0] + c[1] t + ...`. The vector is not trimmed: a
/// restriction of a degree-d form keeps length d + 1 so the degree drop
/// (roots at infinity) stays visible.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UPoly<S> {
    pub fn new(coeffs: Vec<S>) -> Self {
        UPoly { coeffs }
    }

    /// Monic product `prod (t - r)`.
    pub fn from_roots(roots: &[S]) -> Self {
        let mut p = UPoly::new(vec![S::one()]);
        for r in roots {
            p = p.mul(&UPoly::new(vec![-r.clone(), S::one()]));
        }
        p
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Length minus one, including leading zeros.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Degree after dropping exact zeros; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn trim(&self) -> Self {
        match self.degree() {
            Some(d) => UPoly::new(self.coeffs[..=d].to_vec()),
            None => UPoly::new(Vec::new()),
        }
    }

    pub fn eval(&self, t: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return UPoly::new(vec![S::zero()]);
        }
        UPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * S::from_i64(k as i64)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UPoly::new(Vec::new());
        }
        let mut c = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &Vec<S>, i: usize| v.get(i).cloned().unwrap_or_else(S::zero);
        UPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&other.coeffs, i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, c: &S) -> Self {
        UPoly::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(UPoly::new(vec![S::one()]), |acc, _| acc.mul(self))
    }

    /// Euclidean division; the divisor must be nonzero. Exact for rationals.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.trim();
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.trim().coeffs;
        if rem.len() <= dd {
            return (UPoly::new(vec![S::zero()]), UPoly::new(rem));
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot).trim(), UPoly::new(rem).trim())
    }

    pub fn to_c64(&self) -> UPoly<C64> {
        UPoly::new(self.coeffs.iter().map(|c| c.to_c64()).collect())
    }
}

impl UPoly<C64> {
    /// Value and `sum |c_k| |t|^k`.
    pub fn eval_with_abs(&self, t: C64) -> (C64, f64) {
        let mut v = C64::new(0.0, 0.0);
        let mut a = 0.0;
        let tn = t.norm();
        for c in self.coeffs.iter().rev() {
            v = v * t + c;
            a = a * tn + c.norm();
        }
        (v, a)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Taylor coefficients at `c`: `p(c + h) = sum b_j h^j`.
    pub fn taylor_at(&self, c: C64) -> Vec<C64> {
        // Repeated synthetic division.
        let mut a = self.coeffs.clone();
        let n = a.len();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let hi = a[j + 1];
                a[j] += c * hi;
            }
            out.push(a[k]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::{rational, Rational};

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = UPoly::new(vec![C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 0.0), C64::new(3.0, 1.0)]);
        let c = C64::new(0.5, -0.25);
        let b = p.taylor_at(c);
        assert!((b[0] - p.eval(&c)).norm() < 1e-14);
        assert!((b[1] - p.derivative().eval(&c)).norm() < 1e-14);
        assert!((b[2] * 2.0 - p.derivative().derivative().eval(&c)).norm() < 1e-13);
        assert!((b[3] - C64::new(3.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn exact_division() {
        let a: UPoly<Rational> = UPoly::from_roots(&[rational(1, 2), rational(-3, 1), rational(2, 7)]);
        let b: UPoly<Rational> = UPoly::from_roots(&[rational(-3, 1)]);
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, UPoly::from_roots(&[rational(1, 2), rational(2, 7)]));
    }
}
