//! Forms vanishing on a point cloud, via the numerical kernel of the
//! monomial evaluation matrix.

use serde::Serialize;

use super::multi::{monomials, Form, HomogeneousForm, Poly};
use super::scalar::C64;
use crate::error::{Error, Result};
use crate::linalg::{self, SvdSplit};

#[derive(Clone, Debug, Serialize)]
pub struct VanishingFit {
    pub form: Form,
    /// Fewer points than monomials: a kernel exists for dimension reasons.
    pub underdetermined: bool,
    /// sigma_min / sigma_max of the evaluation matrix.
    pub singular_ratio: f64,
    /// Largest relative residual of the fitted form on the input points.
    pub max_residual: f64,
}

pub fn interpolate_vanishing_form(points: &[Vec<C64>], degree: u32, eps_rank: f64) -> Result<Option<VanishingFit>> {
    let first = points.first().ok_or_else(|| Error::InvalidInput("empty point list".into()))?;
    let n = first.len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: points.iter().map(|p| p.len()).find(|&l| l != n).unwrap() });
    }
    let mons = monomials(n, degree);
    let rows: Vec<Vec<C64>> = points
        .iter()
        .map(|p| {
            let u = linalg::unit(p);
            mons.iter().map(|e| e.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (i, &k)| acc * u[i].powu(k))).collect()
        })
        .collect();
    let underdetermined = points.len() < mons.len();
    let svd = SvdSplit::new(&rows, mons.len());
    let smax = svd.singular_values[0];
    let smin = *svd.singular_values.last().unwrap();
    let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    if !underdetermined && ratio > eps_rank {
        return Ok(None);
    }
    let kernel = svd.right_vectors.last().unwrap();
    // Normalise so the largest coefficient is 1.
    let big = kernel.iter().copied().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
    let terms = mons.iter().cloned().zip(kernel.iter().map(|c| c / big));
    let form = HomogeneousForm::new(degree, Poly::from_terms(n, terms).chop(1e-14))?;
    let max_residual = points.iter().map(|p| form.relative_residual(&linalg::unit(p))).fold(0.0, f64::max);
    if !underdetermined && max_residual > eps_rank.sqrt() {
        return Ok(None);
    }
    Ok(Some(VanishingFit { form, underdetermined, singular_ratio: ratio, max_residual }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn conic_through_seven_points() {
        // x^2 + y^2 - z^2 = 0
        let pts: Vec<Vec<C64>> = [0.0f64, 0.7, 1.9, 3.1, 4.4, 5.2, 5.9].iter().map(|&a| pt(&[a.cos(), a.sin(), 1.0])).collect();
        let fit = interpolate_vanishing_form(&pts, 2, 1e-9).unwrap().unwrap();
        assert!(!fit.underdetermined);
        let f = &fit.form;
        let c = |e: [u32; 3]| f.poly().coeff(&e);
        let ratio_y = c([0, 2, 0]) / c([2, 0, 0]);
        let ratio_z = c([0, 0, 2]) / c([2, 0, 0]);
        assert!((ratio_y - 1.0).norm() < 1e-10);
        assert!((ratio_z + 1.0).norm() < 1e-10);
        assert!(c([1, 1, 0]).norm() < 1e-10);
    }

    #[test]
    fn no_line_through_three_general_points() {
        let pts = vec![pt(&[1.0, 0.0, 0.0]), pt(&[0.0, 1.0, 0.0]), pt(&[1.0, 2.0, 3.0])];
        assert!(interpolate_vanishing_form(&pts, 1, 1e-9).unwrap().is_none());
    }

    #[test]
    fn empty_is_error() {
        assert!(interpolate_vanishing_form(&[], 1, 1e-9).is_err());
    }
}
