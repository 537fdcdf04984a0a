//! Sylvester resultants over polynomial coefficient rings.

use std::collections::HashMap;

use super::multi::Poly;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Determinant by cofactor expansion along rows, memoised on the set of
/// remaining columns. Zero entries are skipped, which keeps Sylvester
/// matrices cheap. Works over any commutative ring given a zero element.
pub fn determinant<T>(m: &[Vec<T>], zero: &T, is_zero: impl Fn(&T) -> bool + Copy) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let n = m.len();
    assert!(n <= 62, "determinant expansion limited to 62 rows");
    if n == 0 {
        panic!("empty matrix");
    }
    let mut memo: HashMap<(usize, u64), T> = HashMap::new();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    minor(m, 0, full, zero, is_zero, &mut memo)
}

fn minor<T>(m: &[Vec<T>], row: usize, cols: u64, zero: &T, is_zero: impl Fn(&T) -> bool + Copy, memo: &mut HashMap<(usize, u64), T>) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let n = m.len();
    if row == n {
        unreachable!()
    }
    if row == n - 1 {
        let j = cols.trailing_zeros() as usize;
        return m[row][j].clone();
    }
    if let Some(v) = memo.get(&(row, cols)) {
        return v.clone();
    }
    let mut acc = zero.clone();
    let mut sign_pos = true;
    for j in 0..n {
        if cols & (1 << j) == 0 {
            continue;
        }
        let entry = &m[row][j];
        if !is_zero(entry) {
            let sub = minor(m, row + 1, cols & !(1 << j), zero, is_zero, memo);
            let term = entry.clone() * sub;
            acc = if sign_pos { acc + term } else { acc - term };
        }
        sign_pos = !sign_pos;
    }
    memo.insert((row, cols), acc.clone());
    acc
}

/// Sylvester matrix of `f = sum f_i x^i` (degree m) and `g` (degree n).
pub fn sylvester_matrix<T: Clone>(f: &[T], g: &[T], zero: &T) -> Vec<Vec<T>> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![zero.clone(); size];
        for (k, c) in f.iter().rev().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![zero.clone(); size];
        for (k, c) in g.iter().rev().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    rows
}

/// Resultant of `f` and `g` with respect to variable `var`. The result
/// keeps the full variable set (with `var` absent). Degrees in `var` are
/// taken from the polynomials themselves, so the result vanishes where the
/// two share a root or where both leading coefficients vanish.
pub fn resultant<S: Scalar>(f: &Poly<S>, g: &Poly<S>, var: usize) -> Result<Poly<S>> {
    let n = f.nvars();
    if g.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.nvars() });
    }
    let df = f.degree_in(var).unwrap_or(0);
    let dg = g.degree_in(var).unwrap_or(0);
    if df == 0 && dg == 0 {
        return Err(Error::InvalidInput("both polynomials are constant in the eliminated variable".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(Poly::zero(n));
    }
    let fc = f.coefficients_in(var);
    let gc = g.coefficients_in(var);
    if df == 0 {
        return Ok(fc[0].pow(dg));
    }
    if dg == 0 {
        return Ok(gc[0].pow(df));
    }
    let zero = Poly::zero(n);
    let m = sylvester_matrix(&fc, &gc, &zero);
    Ok(determinant(&m, &zero, |p: &Poly<S>| p.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::scalar::{rational, Rational};

    fn var(n: usize, i: usize) -> Poly<Rational> {
        Poly::var(n, i)
    }

    #[test]
    fn res_t_squared_with_shift() {
        // Res_t(t^2, t - c) = c^2; variables (t, c)
        let t = var(2, 0);
        let c = var(2, 1);
        let f = t.pow(2);
        let g = t - c.clone();
        let r = resultant(&f, &g, 0).unwrap();
        assert_eq!(r, c.pow(2));
    }

    #[test]
    fn res_linear_linear() {
        // vars (t, a, b, c, d): Res(a t + b, c t + d) = a d - b c
        let v: Vec<Poly<Rational>> = (0..5).map(|i| var(5, i)).collect();
        let f = &v[1] * &v[0] + v[2].clone();
        let g = &v[3] * &v[0] + v[4].clone();
        let r = resultant(&f, &g, 0).unwrap();
        assert_eq!(r, &v[1] * &v[4] - &v[2] * &v[3]);
    }

    #[test]
    fn constant_inputs_rejected() {
        let c = Poly::constant(1, rational(3, 1));
        assert!(resultant(&c, &c, 0).is_err());
    }

    #[test]
    fn numeric_determinant() {
        let m = vec![
            vec![rational(2, 1), rational(1, 1), rational(0, 1)],
            vec![rational(1, 1), rational(3, 1), rational(1, 1)],
            vec![rational(0, 1), rational(1, 1), rational(4, 1)],
        ];
        let d = determinant(&m, &rational(0, 1), |x: &Rational| num_traits::Zero::is_zero(x));
        assert_eq!(d, rational(18, 1));
    }
}
