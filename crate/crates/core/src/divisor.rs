//! Intersection divisors of lines with a surface.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::ProjectivePoint;
use crate::linalg;
use crate::poly::{roots_with_multiplicities, Form, C64};

#[derive(Clone, Debug, Serialize)]
pub struct DivisorPoint {
    pub point: ProjectivePoint,
    pub multiplicity: usize,
    pub residual: f64,
}

/// A zero-cycle on a line or curve, given by points with multiplicities.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IntersectionDivisor {
    pub points: Vec<DivisorPoint>,
}

impl IntersectionDivisor {
    pub fn degree(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn find(&self, p: &ProjectivePoint, tol: f64) -> Option<&DivisorPoint> {
        self.points.iter().filter(|d| d.point.same_as(p, tol)).min_by(|a, b| a.point.distance(p).partial_cmp(&b.point.distance(p)).unwrap())
    }

    pub fn multiplicity_at(&self, p: &ProjectivePoint, tol: f64) -> usize {
        self.points.iter().filter(|d| d.point.same_as(p, tol)).map(|d| d.multiplicity).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// True when the divisor is exactly `sum m_i p_i`.
    pub fn equals(&self, expected: &[(ProjectivePoint, usize)], tol: f64) -> bool {
        let total: usize = expected.iter().map(|e| e.1).sum();
        total == self.degree() && expected.iter().all(|(p, m)| self.multiplicity_at(p, tol) == *m)
    }

    /// Points other than those listed, with their multiplicities.
    pub fn residual_part(&self, known: &[&ProjectivePoint], tol: f64) -> Vec<&DivisorPoint> {
        self.points.iter().filter(|d| !known.iter().any(|k| d.point.same_as(k, tol))).collect()
    }
}

/// Divisor cut on the line `ab` by `f = 0`.
///
/// The line is parametrised as `a + t (b + omega a)`, so a different
/// `omega` gives an independent frame for re-certification; the point at
/// infinity of the parameter is `b + omega a`.
pub fn line_divisor(f: &Form, a: &ProjectivePoint, b: &ProjectivePoint, omega: C64, tol: &Tolerances) -> Result<IntersectionDivisor> {
    if a.len() != f.nvars() || b.len() != f.nvars() {
        return Err(Error::DimensionMismatch { expected: f.nvars(), found: a.len().min(b.len()) });
    }
    if a.distance(b) <= tol.eps_rank {
        return Err(Error::Degenerate("line through coincident points".into()));
    }
    let ah = a.unit();
    let d = linalg::axpy(omega, &ah, &b.unit());
    let g = f.restrict_to_line(&ah, &d)?;
    let scale = f.l1_norm() * (1.0 + linalg::norm(&d)).powi(f.degree() as i32);
    if g.coeffs().iter().all(|c| c.norm() <= tol.eps_cert * scale) {
        return Err(Error::LineOnSurface);
    }
    let roots = roots_with_multiplicities(&g, tol.eps_cluster, tol.eps_cert)?;
    let mut points: Vec<DivisorPoint> = roots
        .roots
        .iter()
        .map(|r| DivisorPoint {
            point: ProjectivePoint::new(linalg::axpy(r.value, &d, &ah)).expect("nonzero").normalized(),
            multiplicity: r.multiplicity,
            residual: r.residual,
        })
        .collect();
    if roots.degree_at_infinity > 0 {
        let top = g.coeffs()[g.coeffs().len() - roots.degree_at_infinity..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        points.push(DivisorPoint {
            point: ProjectivePoint::new(d).expect("nonzero").normalized(),
            multiplicity: roots.degree_at_infinity,
            residual: top / g.l1_norm(),
        });
    }
    Ok(IntersectionDivisor { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::SurfaceModel;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn fermat_coordinate_line() {
        // x^4 + y^4 = 0 along z = w = 0: four simple points.
        let f = SurfaceModel::fermat_quartic().first().clone();
        let a = ProjectivePoint::real(&[1.0, 0.0, 0.0, 0.0]);
        let b = ProjectivePoint::real(&[0.0, 1.0, 0.0, 0.0]);
        for omega in [C64::new(0.0, 0.0), C64::new(0.3, -0.7)] {
            let d = line_divisor(&f, &a, &b, omega, &tol()).unwrap();
            assert_eq!(d.degree(), 4);
            assert_eq!(d.points.len(), 4);
            for p in &d.points {
                assert!(f.relative_residual(&p.point.unit()) < 1e-12);
            }
        }
    }

    #[test]
    fn line_on_fermat_is_reported() {
        let z = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let f = SurfaceModel::fermat_quartic().first().clone();
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let a = ProjectivePoint::new(vec![one, z, o, o]).unwrap();
        let b = ProjectivePoint::new(vec![o, o, one, z]).unwrap();
        assert!(matches!(line_divisor(&f, &a, &b, C64::new(0.0, 0.0), &tol()), Err(Error::LineOnSurface)));
    }

    #[test]
    fn point_at_infinity_is_kept() {
        // x^3 y along (t, 1, 0, 0): a triple root at t = 0 and a simple
        // root at infinity.
        let f = Form::from_terms(4, 4, [(vec![3, 1, 0, 0], C64::new(1.0, 0.0))]).unwrap();
        let a = ProjectivePoint::real(&[1.0, 0.0, 0.0, 0.0]);
        let b = ProjectivePoint::real(&[0.0, 1.0, 0.0, 0.0]);
        let d = line_divisor(&f, &b, &a, C64::new(0.0, 0.0), &tol()).unwrap();
        assert_eq!(d.degree(), 4);
        assert_eq!(d.multiplicity_at(&a, 1e-6), 1);
        assert_eq!(d.multiplicity_at(&b, 1e-6), 3);
        assert!(d.equals(&[(a.clone(), 1), (b.clone(), 3)], 1e-6));
    }
}
