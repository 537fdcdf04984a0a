//! Projective-linear geometry: points, spans, tangent spaces and
//! coordinate frames on linear subspaces.

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, SvdSplit};
use crate::poly::json::FormJson;
use crate::poly::{Form, HomogeneousForm, Scalar, C64};
use crate::surfaces::SurfaceModel;

/// A point of projective space, stored with its homogeneous coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint {
    coords: Vec<C64>,
}

impl ProjectivePoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() || coords.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidInput("projective point with all coordinates zero".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn real(coords: &[f64]) -> Self {
        Self::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect()).expect("nonzero real point")
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Scaled so that the largest-magnitude coordinate equals 1.
    pub fn normalized(&self) -> ProjectivePoint {
        let mut k = 0;
        for (i, c) in self.coords.iter().enumerate() {
            if c.norm() > self.coords[k].norm() {
                k = i;
            }
        }
        let s = self.coords[k];
        ProjectivePoint { coords: self.coords.iter().map(|c| c / s).collect() }
    }

    /// Unit-norm representative.
    pub fn unit(&self) -> Vec<C64> {
        linalg::unit(&self.coords)
    }

    pub fn scaled(&self, s: C64) -> ProjectivePoint {
        ProjectivePoint { coords: linalg::scaled(&self.coords, s) }
    }

    /// Fubini-Study distance as the sine of the angle between the lines.
    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        let a = self.unit();
        let b = other.unit();
        let c = linalg::hdot(&a, &b).norm();
        (1.0 - (c * c).min(1.0)).max(0.0).sqrt()
    }

    pub fn same_as(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.len() == other.len() && self.distance(other) <= tol
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = self.coords.iter().map(|c| [c.re, c.im]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        let coords = raw.iter().map(parse_coord).collect::<std::result::Result<Vec<_>, String>>().map_err(D::Error::custom)?;
        ProjectivePoint::new(coords).map_err(D::Error::custom)
    }
}

fn parse_coord(v: &serde_json::Value) -> std::result::Result<C64, String> {
    use serde_json::Value;
    let num = |v: &Value| -> std::result::Result<f64, String> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| format!("bad number {}", n)),
            Value::String(s) => {
                crate::poly::scalar::parse_rational(s).map(|r| r.to_c64().re).or_else(|| s.parse::<f64>().ok()).ok_or_else(|| format!("bad coordinate {:?}", s))
            }
            other => Err(format!("bad coordinate {}", other)),
        }
    };
    match v {
        Value::Array(a) if a.len() == 2 => Ok(C64::new(num(&a[0])?, num(&a[1])?)),
        other => Ok(C64::new(num(other)?, 0.0)),
    }
}

/// A projective linear subspace with a spanning basis and cutting forms.
#[derive(Clone, Debug)]
pub struct LinearSubspace {
    pub basis: Vec<ProjectivePoint>,
    /// Linear forms (coefficient vectors) vanishing on the subspace.
    pub forms: Vec<Vec<C64>>,
    /// Set when the spanning list was linearly dependent.
    pub degenerate: bool,
}

impl LinearSubspace {
    pub fn dim(&self) -> isize {
        self.basis.len() as isize - 1
    }

    pub fn ambient_len(&self) -> usize {
        self.basis.first().map(|p| p.len()).unwrap_or(0)
    }

    /// Largest relative value of a cutting form at `p`.
    pub fn residual(&self, p: &ProjectivePoint) -> f64 {
        let u = p.unit();
        self.forms.iter().map(|f| linalg::dot(f, &u).norm() / linalg::norm(f)).fold(0.0, f64::max)
    }

    pub fn contains(&self, p: &ProjectivePoint, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    pub fn cutting_forms(&self) -> Vec<Form> {
        self.forms.iter().map(|f| HomogeneousForm::linear(f)).collect()
    }

    /// Same subspace, tested by mutual containment of bases.
    pub fn same_as(&self, other: &LinearSubspace, tol: f64) -> bool {
        self.dim() == other.dim() && self.basis.iter().all(|p| other.contains(p, tol)) && other.basis.iter().all(|p| self.contains(p, tol))
    }
}

impl Serialize for LinearSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            basis: &'a [ProjectivePoint],
            forms: Vec<FormJson>,
            #[serde(skip_serializing_if = "std::ops::Not::not")]
            degenerate: bool,
        }
        Repr { basis: &self.basis, forms: self.forms.iter().map(|f| FormJson::from_float(&HomogeneousForm::linear(f))).collect(), degenerate: self.degenerate }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            basis: Vec<ProjectivePoint>,
            #[serde(default)]
            forms: Vec<FormJson>,
            #[serde(default)]
            degenerate: bool,
        }
        let r = Repr::deserialize(d)?;
        let n = r.basis.first().map(|p| p.len()).unwrap_or(0);
        let mut forms = Vec::new();
        for f in r.forms {
            let f = f.parse().map_err(D::Error::custom)?.to_c64();
            if f.degree() != 1 || f.nvars() != n {
                return Err(D::Error::custom("cutting forms must be linear in the ambient variables"));
            }
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (e, c) in f.poly().terms() {
                let i = e.iter().position(|&k| k == 1).unwrap();
                v[i] = *c;
            }
            forms.push(v);
        }
        Ok(LinearSubspace { basis: r.basis, forms, degenerate: r.degenerate })
    }
}

/// Span of a nonempty list of points. A dependent list is not an error:
/// the subspace is returned with `degenerate` set.
pub fn span(points: &[ProjectivePoint], eps_rank: f64) -> Result<LinearSubspace> {
    let n = points.first().ok_or_else(|| Error::InvalidInput("span of empty list".into()))?.len();
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: points.iter().map(|p| p.len()).find(|&l| l != n).unwrap() });
    }
    let rows: Vec<Vec<C64>> = points.iter().map(|p| p.unit()).collect();
    let svd = SvdSplit::new(&rows, n);
    let rank = svd.rank(eps_rank).max(1);
    let degenerate = rank < points.len();
    let basis = if degenerate {
        svd.row_space(rank).into_iter().map(|v| ProjectivePoint::new(v).expect("unit vector")).collect()
    } else {
        points.iter().map(|p| p.normalized()).collect()
    };
    Ok(LinearSubspace { basis, forms: svd.null_space(rank), degenerate })
}

/// Subspace cut out by linear forms.
pub fn cut(forms: &[Vec<C64>], n: usize, eps_rank: f64) -> Result<LinearSubspace> {
    if forms.iter().any(|f| f.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: forms.iter().map(|f| f.len()).find(|&l| l != n).unwrap() });
    }
    let rows: Vec<Vec<C64>> = forms.iter().map(|f| linalg::unit(f)).collect();
    let svd = SvdSplit::new(&rows, n);
    let rank = svd.rank(eps_rank);
    let basis: Vec<ProjectivePoint> = svd.null_space(rank).into_iter().map(|v| ProjectivePoint::new(v).expect("unit vector")).collect();
    if basis.is_empty() {
        return Err(Error::Degenerate("forms cut out the empty set".into()));
    }
    Ok(LinearSubspace { basis, forms: svd.row_space(rank), degenerate: rank < forms.len() })
}

/// Tangent space of the surface at `p`: one cutting form for a quartic in
/// P^3, two for a (2,3) complete intersection in P^4.
pub fn tangent_space(surface: &SurfaceModel, p: &ProjectivePoint, tol: &Tolerances) -> Result<LinearSubspace> {
    surface.check_on_surface(p, tol)?;
    let report = surface.is_smooth_at(p, tol)?;
    if !report.smooth {
        return Err(Error::SingularPoint { ratio: report.gradient_ratio });
    }
    let grads = surface.gradients(p)?;
    let n = p.len();
    let rows: Vec<Vec<C64>> = grads.iter().map(|g| linalg::unit(g)).collect();
    let svd = SvdSplit::new(&rows, n);
    let rank = svd.rank(tol.eps_rank);
    let basis = svd.null_space(rank).into_iter().map(|v| ProjectivePoint::new(v).expect("unit vector")).collect();
    Ok(LinearSubspace { basis, forms: grads, degenerate: false })
}

/// Linear parametrisation `u -> sum u_j columns[j]` of a subspace, chosen
/// by complete pivoting on the cutting forms: the free coordinates are
/// copied and the pivot coordinates solved for.
#[derive(Clone, Debug, Serialize)]
pub struct Frame {
    pub columns: Vec<Vec<C64>>,
    pub free: Vec<usize>,
}

impl Frame {
    pub fn for_subspace(sub: &LinearSubspace, eps_rank: f64) -> Result<Frame> {
        let n = sub.ambient_len();
        let forms: Vec<Vec<C64>> = sub.forms.iter().map(|f| linalg::unit(f)).collect();
        let c = forms.len();
        // Complete pivoting to pick independent pivot columns.
        let mut a = forms.clone();
        let mut pivots = Vec::new();
        let mut used_rows = vec![false; c];
        for _ in 0..c {
            let mut best = (0.0, 0, 0);
            for (i, row) in a.iter().enumerate() {
                if used_rows[i] {
                    continue;
                }
                for (j, v) in row.iter().enumerate() {
                    if !pivots.contains(&j) && v.norm() > best.0 {
                        best = (v.norm(), i, j);
                    }
                }
            }
            if best.0 <= eps_rank {
                break;
            }
            let (_, pi, pj) = best;
            used_rows[pi] = true;
            pivots.push(pj);
            let prow = a[pi].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != pi && !used_rows[i] {
                    let f = row[pj] / prow[pj];
                    for (x, y) in row.iter_mut().zip(&prow) {
                        *x -= f * y;
                    }
                }
            }
        }
        let rank = pivots.len();
        let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
        if rank == 0 {
            let columns = (0..n).map(|j| (0..n).map(|i| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()).collect();
            return Ok(Frame { columns, free });
        }
        // Independent rows of the original forms matching the pivots.
        let rows: Vec<&Vec<C64>> = forms.iter().enumerate().filter(|(i, _)| used_rows[*i]).map(|(_, r)| r).collect();
        let ap = DMatrix::from_fn(rank, rank, |i, j| rows[i][pivots[j]]);
        let mut columns = Vec::with_capacity(free.len());
        for &fj in &free {
            let rhs: Vec<C64> = rows.iter().map(|r| -r[fj]).collect();
            let xp = linalg::solve(&ap, &rhs).ok_or_else(|| Error::Degenerate("singular pivot block".into()))?;
            let mut col = vec![C64::new(0.0, 0.0); n];
            col[fj] = C64::new(1.0, 0.0);
            for (k, &pj) in pivots.iter().enumerate() {
                col[pj] = xp[k];
            }
            columns.push(col);
        }
        Ok(Frame { columns, free })
    }

    /// Frame from explicit basis vectors; `pullback` then solves a least
    /// squares problem instead of reading coordinates.
    pub fn from_basis(basis: &[Vec<C64>]) -> Frame {
        Frame { columns: basis.to_vec(), free: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn map(&self, u: &[C64]) -> ProjectivePoint {
        let n = self.columns[0].len();
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (uj, col) in u.iter().zip(&self.columns) {
            for (xi, ci) in x.iter_mut().zip(col) {
                *xi += uj * ci;
            }
        }
        ProjectivePoint::new(x).expect("frame maps nonzero vectors to nonzero vectors")
    }

    pub fn pullback(&self, p: &ProjectivePoint) -> ProjectivePoint {
        if !self.free.is_empty() && self.free.len() == self.columns.len() {
            let u: Vec<C64> = self.free.iter().map(|&j| p.coords()[j]).collect();
            if linalg::norm(&u) > 1e-12 * linalg::norm(p.coords()) {
                return ProjectivePoint::new(u).expect("nonzero");
            }
        }
        let n = self.columns[0].len();
        let a = DMatrix::from_fn(n, self.columns.len(), |i, j| self.columns[j][i]);
        ProjectivePoint::new(linalg::lstsq(&a, p.coords(), 1e-13)).expect("point in frame span")
    }

    pub fn pull_form(&self, f: &Form) -> Form {
        f.compose_linear(&self.columns)
    }

    /// Pulls a linear form (coefficient vector) back to frame coordinates.
    pub fn pull_linear(&self, f: &[C64]) -> Vec<C64> {
        self.columns.iter().map(|c| linalg::dot(f, c)).collect()
    }
}

/// Frame of a 2-dimensional subspace, mapping P^2 into it.
pub fn plane_coordinates(h: &LinearSubspace, eps_rank: f64) -> Result<Frame> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: h.dim().max(0) as usize });
    }
    let f = Frame::for_subspace(h, eps_rank)?;
    if f.dim() != 3 {
        return Err(Error::Degenerate("cutting forms do not match the plane dimension".into()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rational, HomogeneousForm};

    #[test]
    fn span_of_two_coordinate_points() {
        let l = span(&[ProjectivePoint::real(&[1.0, 0.0, 0.0, 0.0]), ProjectivePoint::real(&[0.0, 1.0, 0.0, 0.0])], 1e-9).unwrap();
        assert_eq!(l.dim(), 1);
        assert!(!l.degenerate);
        assert_eq!(l.forms.len(), 2);
        // The cutting forms involve only z and w.
        for f in &l.forms {
            assert!(f[0].norm() < 1e-14 && f[1].norm() < 1e-14);
        }
        assert!(l.contains(&ProjectivePoint::real(&[3.0, -2.0, 0.0, 0.0]), 1e-12));
        assert!(!l.contains(&ProjectivePoint::real(&[0.0, 0.0, 1.0, 0.0]), 1e-6));
    }

    #[test]
    fn collinear_triple_is_flagged() {
        let l = span(
            &[ProjectivePoint::real(&[1.0, 0.0, 0.0, 0.0]), ProjectivePoint::real(&[0.0, 1.0, 0.0, 0.0]), ProjectivePoint::real(&[1.0, 1.0, 0.0, 0.0])],
            1e-9,
        )
        .unwrap();
        assert!(l.degenerate);
        assert_eq!(l.dim(), 1);
    }

    #[test]
    fn span_is_idempotent() {
        let pts = vec![
            ProjectivePoint::real(&[1.0, 2.0, 0.5, -1.0]),
            ProjectivePoint::new(vec![C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)]).unwrap(),
            ProjectivePoint::real(&[0.3, 0.0, 1.0, 1.0]),
        ];
        let s = span(&pts, 1e-9).unwrap();
        let t = span(&s.basis, 1e-9).unwrap();
        assert!(s.same_as(&t, 1e-10));
    }

    #[test]
    fn hyperplane_w_zero_frame_is_inclusion() {
        let h = cut(&[vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]], 4, 1e-9).unwrap();
        let f = plane_coordinates(&h, 1e-9).unwrap();
        assert_eq!(f.free, vec![0, 1, 2]);
        let x = f.map(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(4.0, 0.0)]);
        assert!(x.coords()[3].norm() < 1e-14);
        assert!((x.coords()[0] - 2.0).norm() < 1e-14);
        // x^4+y^4+z^4+w^4 restricted to w = 0
        let fermat = HomogeneousForm::from_terms(
            4,
            4,
            (0..4).map(|i| {
                let mut e = vec![0; 4];
                e[i] = 4;
                (e, rational(1, 1))
            }),
        )
        .unwrap()
        .to_c64();
        let g = f.pull_form(&fermat);
        assert_eq!(g.nvars(), 3);
        assert_eq!(g.poly().num_terms(), 3);
        assert_eq!(g.poly().coeff(&[0, 0, 4]), C64::new(1.0, 0.0));
    }

    #[test]
    fn wrong_dimension_rejected() {
        let l = span(&[ProjectivePoint::real(&[1.0, 0.0, 0.0, 0.0]), ProjectivePoint::real(&[0.0, 1.0, 0.0, 0.0])], 1e-9).unwrap();
        assert!(plane_coordinates(&l, 1e-9).is_err());
    }

    #[test]
    fn point_json_accepts_mixed_coordinates() {
        let p: ProjectivePoint = serde_json::from_str(r#"[1, "1/2", [0.0, -1.5]]"#).unwrap();
        assert_eq!(p.coords()[1], C64::new(0.5, 0.0));
        assert_eq!(p.coords()[2], C64::new(0.0, -1.5));
        assert!(serde_json::from_str::<ProjectivePoint>("[0, 0]").is_err());
    }
}
