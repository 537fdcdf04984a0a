//! Torsion pairs on curve sections: expected-dimension bookkeeping, the
//! Brill-Noether bound, and certified witnesses `n (p - p') ~ 0` for
//! n = 2, 3, 4 given by explicit rational functions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::corr_j::{ContactPair, RECHECK_OMEGA};
use crate::corr_t::{plane_curve_intersection_in_frames, ContactTriple};
use crate::divisor::{line_divisor, DivisorPoint, IntersectionDivisor};
use crate::error::{Error, Result};
use crate::geom::{self, Frame, LinearSubspace, ProjectivePoint};
use crate::linalg::{self, SvdSplit};
use crate::poly::roots::companion_roots;
use crate::poly::{roots_with_multiplicities, sylvester_matrix, Form, HomogeneousForm, UPoly, C64};
use crate::surfaces::{random_vec, SurfaceKind, SurfaceModel};

/// Dimension count for `Z'_n(L)`: the Hurwitz space of degree-n covers
/// with a total ramification pair, the two-pointed curves in `|L|`, and
/// the two-pointed moduli space they map to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionLedger {
    pub g: i64,
    #[serde(rename = "dim_Hn")]
    pub dim_hn: i64,
    #[serde(rename = "dim_CxC")]
    pub dim_cxc: i64,
    #[serde(rename = "dim_Mg2")]
    pub dim_m_g2: i64,
    #[serde(rename = "expected")]
    pub expected_dim: i64,
}

pub fn expected_dim_zprime(g: i64) -> Result<DimensionLedger> {
    if g < 3 {
        return Err(Error::InvalidInput(format!("genus must be at least 3, got {}", g)));
    }
    let (dim_hn, dim_cxc, dim_m_g2) = (2 * g - 1, g + 2, 3 * g - 1);
    Ok(DimensionLedger { g, dim_hn, dim_cxc, dim_m_g2, expected_dim: dim_hn + dim_cxc - dim_m_g2 })
}

/// Dimension count for the locus `Y_pq` of curves through a fixed pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct YLedger {
    pub g: i64,
    #[serde(rename = "dim_Hn")]
    pub dim_hn: i64,
    /// `dim |L| = g`.
    pub dim_linear_system: i64,
    #[serde(rename = "dim_Mg2")]
    pub dim_m_g2: i64,
    #[serde(rename = "expected")]
    pub expected_dim: i64,
}

pub fn expected_dim_y(g: i64) -> Result<YLedger> {
    if g < 3 {
        return Err(Error::InvalidInput(format!("genus must be at least 3, got {}", g)));
    }
    let (dim_hn, dim_linear_system, dim_m_g2) = (2 * g - 1, g, 3 * g - 1);
    Ok(YLedger { g, dim_hn, dim_linear_system, dim_m_g2, expected_dim: dim_hn + dim_linear_system - dim_m_g2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BrillNoether {
    pub g: i64,
    pub n: i64,
    pub rho: i64,
    pub exists: bool,
}

/// `rho = g - 2(g - n + 1)`; a general curve of genus g has a `g^1_n`
/// iff `rho >= 0`.
pub fn bn_g1n_exists(g: i64, n: i64) -> BrillNoether {
    let rho = g - 2 * (g - n + 1);
    BrillNoether { g, n, rho, exists: rho >= 0 }
}

/// A branch point of the double line, `None` for the point at infinity
/// of the parameter.
#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub t: Option<C64>,
    pub multiplicity: usize,
}

/// The curve carrying the torsion pair, with the coordinates its function
/// is written in.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionCurve {
    /// `w^2 = g6(t)` over the line `base + t direction` of the plane.
    DoubleLine { line: LinearSubspace, base: Vec<C64>, direction: Vec<C64>, sextic: Vec<C64>, branch: Vec<BranchPoint> },
    /// `X ∩ H` for a plane `H` of P^3, as a ternary quartic in `frame`.
    PlaneQuartic { plane: LinearSubspace, frame: Frame, quartic: Form },
    /// `X ∩ H` for a hyperplane `H` of P^4, as a (2,3) curve in `frame`.
    SpaceSextic { hyperplane: LinearSubspace, frame: Frame, quadric: Form, cubic: Form, shared_line_residual: f64 },
}

impl SectionCurve {
    pub fn degree(&self) -> usize {
        match self {
            SectionCurve::DoubleLine { .. } => 6,
            SectionCurve::PlaneQuartic { .. } => 4,
            SectionCurve::SpaceSextic { .. } => 6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RationalFunction {
    /// Ratio of two linear forms in the frame of the section curve.
    LinearRatio { numerator: Form, denominator: Form },
    /// `(t - t_numerator) / (t - t_denominator)` on the double line.
    ParameterShift { t_numerator: C64, t_denominator: C64 },
}

/// Discriminant of the restriction to a random pencil of lines; a smooth
/// plane curve of degree d has exactly `d(d-1)` simple roots.
#[derive(Clone, Debug, Serialize)]
pub struct PencilScreen {
    pub expected_degree: usize,
    pub multiplicities: Vec<usize>,
    pub at_infinity: usize,
    /// Largest coefficient above the expected degree, relative to the
    /// largest coefficient (aliasing check of the interpolation).
    pub excess_coefficient: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessScreen {
    pub passed: bool,
    /// Normalised gradient ratios at the certificate's own points.
    pub point_ratios: Vec<f64>,
    pub samples: usize,
    pub sample_min_ratio: f64,
    pub pencil: Option<PencilScreen>,
    /// n = 2 only: the line is tangent to the sextic at p or q.
    pub nodal_fiber: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionCertificate {
    pub n: usize,
    pub curve: SectionCurve,
    pub p: ProjectivePoint,
    pub p_prime: ProjectivePoint,
    pub function: RationalFunction,
    pub div_num: IntersectionDivisor,
    pub div_den: IntersectionDivisor,
    pub smoothness: SmoothnessScreen,
    pub residual: f64,
}

impl TorsionCertificate {
    /// Degree of the function: the degree of its zero divisor.
    pub fn function_degree(&self) -> usize {
        match self.curve {
            SectionCurve::DoubleLine { .. } => 2,
            _ => self.curve.degree(),
        }
    }

    /// Both divisors have the degree of the function; for n = 2 the branch
    /// points also account for the full sextic.
    pub fn degree_conserved(&self) -> bool {
        let d = self.function_degree();
        let branch_ok = match &self.curve {
            SectionCurve::DoubleLine { branch, .. } => branch.iter().map(|b| b.multiplicity).sum::<usize>() == 6,
            _ => true,
        };
        self.div_num.degree() == d && self.div_den.degree() == d && branch_ok
    }

    /// `div_num - div_den = n p - n p'` as formal sums.
    pub fn difference_is_torsion_pair(&self, tol: f64) -> bool {
        let mut pts: Vec<(ProjectivePoint, i64)> = Vec::new();
        let mut add = |p: &ProjectivePoint, m: i64| match pts.iter_mut().find(|(q, _)| q.same_as(p, tol)) {
            Some(e) => e.1 += m,
            None => pts.push((p.clone(), m)),
        };
        for d in &self.div_num.points {
            add(&d.point, d.multiplicity as i64);
        }
        for d in &self.div_den.points {
            add(&d.point, -(d.multiplicity as i64));
        }
        let n = self.n as i64;
        pts.iter().all(|(q, m)| {
            if q.same_as(&self.p, tol) {
                *m == n
            } else if q.same_as(&self.p_prime, tol) {
                *m == -n
            } else {
                *m == 0
            }
        }) && pts.iter().any(|(q, m)| q.same_as(&self.p, tol) && *m == n)
            && pts.iter().any(|(q, m)| q.same_as(&self.p_prime, tol) && *m == -n)
    }
}

/// Screen floor for normalised gradient ratios.
fn screen_floor(tol: &Tolerances) -> f64 {
    tol.eps_cluster
}

/// `|grad f(u)| / (sum_i |d_i f|_1 |u|_inf^(d-1))`.
fn gradient_ratio(f: &Form, u: &[C64]) -> f64 {
    let row = normalized_gradient(f, u);
    linalg::norm(&row)
}

fn normalized_gradient(f: &Form, u: &[C64]) -> Vec<C64> {
    let grads = f.gradient();
    let umax = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale: f64 = grads.iter().map(|g| g.l1_norm()).sum::<f64>() * umax.powi(f.degree() as i32 - 1);
    grads.iter().map(|g| g.eval_c64(u) / scale.max(f64::MIN_POSITIVE)).collect()
}

/// Smallest singular value of the stacked normalised gradients.
fn jacobian_ratio(forms: &[Form], u: &[C64]) -> f64 {
    let rows: Vec<Vec<C64>> = forms.iter().map(|f| normalized_gradient(f, u)).collect();
    SvdSplit::new(&rows, u.len()).singular_values[forms.len() - 1]
}

/// Linear form of the line through two points of P^2.
fn line_form(a: &[C64], b: &[C64]) -> Vec<C64> {
    linalg::unit(&[a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])
}

/// Points of a plane curve cut by random lines.
fn plane_curve_samples(c: &Form, lines: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<C64>>> {
    let mut out = Vec::new();
    for _ in 0..lines {
        let a = random_vec(rng, 3);
        let d = random_vec(rng, 3);
        let g = c.restrict_to_line(&a, &d)?;
        for t in companion_roots(&g.trim())? {
            out.push(linalg::unit(&linalg::axpy(t, &d, &a)));
        }
    }
    Ok(out)
}

fn numeric_determinant(m: &[Vec<C64>]) -> C64 {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j]).determinant()
}

/// Discriminant of `c` along the pencil of lines through a random point,
/// interpolated on the unit circle.
pub fn pencil_discriminant(c: &Form, seed: u64, tol: &Tolerances) -> Result<PencilScreen> {
    let d = c.degree() as usize;
    if c.nvars() != 3 || d < 2 {
        return Err(Error::InvalidInput("pencil screen needs a plane curve of degree at least 2".into()));
    }
    let expected = d * (d - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7065_6e63);
    let o = linalg::unit(&random_vec(&mut rng, 3));
    let a = linalg::unit(&random_vec(&mut rng, 3));
    let b = linalg::unit(&random_vec(&mut rng, 3));
    let n = (expected + 1).next_power_of_two();
    let zero = C64::new(0.0, 0.0);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let lam = C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
        let m = linalg::axpy(lam, &b, &a);
        let g = c.restrict_to_line(&o, &m)?;
        let lead = g.coeffs()[d];
        if lead.norm() == 0.0 {
            return Err(Error::Degenerate("pencil point on the curve".into()));
        }
        let dg = g.derivative();
        let res = numeric_determinant(&sylvester_matrix(g.coeffs(), &dg.coeffs()[..d], &zero));
        values.push(res / lead);
    }
    let coeffs: Vec<C64> = (0..n)
        .map(|j| values.iter().enumerate().map(|(k, v)| v * C64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / n as f64)).sum::<C64>() / n as f64)
        .collect();
    let big = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return Err(Error::Degenerate("pencil discriminant vanishes identically".into()));
    }
    let excess = coeffs[expected + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max) / big;
    let roots = roots_with_multiplicities(&UPoly::new(coeffs[..=expected].to_vec()), tol.eps_cluster, tol.eps_cert)?;
    Ok(PencilScreen { expected_degree: expected, multiplicities: roots.multiplicities(), at_infinity: roots.degree_at_infinity, excess_coefficient: excess })
}

impl PencilScreen {
    pub fn all_simple(&self) -> bool {
        self.at_infinity <= 1 && self.multiplicities.iter().all(|&m| m == 1) && self.multiplicities.len() + self.at_infinity == self.expected_degree
    }
}

fn plane_quartic_screen(c: &Form, special: &[Vec<C64>], seed: u64, tol: &Tolerances) -> Result<SmoothnessScreen> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x736d_6f6f);
    let point_ratios: Vec<f64> = special.iter().map(|u| gradient_ratio(c, u)).collect();
    let samples = plane_curve_samples(c, 12, &mut rng)?;
    let sample_min_ratio = samples.iter().map(|u| gradient_ratio(c, u)).fold(f64::INFINITY, f64::min);
    let pencil = pencil_discriminant(c, seed, tol)?;
    let floor = screen_floor(tol);
    let passed = point_ratios.iter().all(|&r| r > floor) && sample_min_ratio > floor && pencil.all_simple();
    Ok(SmoothnessScreen { passed, point_ratios, samples: samples.len(), sample_min_ratio, pencil: Some(pencil), nodal_fiber: false })
}

fn unit3(seed: u64, n: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6672_6573);
    (0..n).map(|_| random_vec(&mut rng, n)).collect()
}

/// Frame of `h` through a random invertible change of its basis.
fn fresh_frame(h: &LinearSubspace, seed: u64) -> Frame {
    let k = h.basis.len();
    let mix = unit3(seed, k);
    let basis: Vec<Vec<C64>> = mix
        .iter()
        .map(|row| {
            let mut v = vec![C64::new(0.0, 0.0); h.ambient_len()];
            for (c, b) in row.iter().zip(&h.basis) {
                v = linalg::axpy(*c, &b.unit(), &v);
            }
            v
        })
        .collect();
    Frame::from_basis(&basis)
}

fn lift(div: &IntersectionDivisor, frame: &Frame, x: &SurfaceModel) -> Result<IntersectionDivisor> {
    let mut points = Vec::with_capacity(div.points.len());
    for d in &div.points {
        let point = frame.map(d.point.coords()).normalized();
        let residual = d.residual.max(x.residual(&point)?);
        points.push(DivisorPoint { point, multiplicity: d.multiplicity, residual });
    }
    Ok(IntersectionDivisor { points })
}

fn section_divisor_j(
    x: &SurfaceModel,
    frame: &Frame,
    c: &Form,
    a: &ProjectivePoint,
    b: &ProjectivePoint,
    omega: C64,
    tol: &Tolerances,
) -> Result<IntersectionDivisor> {
    let local = line_divisor(c, &frame.pullback(a), &frame.pullback(b), omega, tol)?;
    lift(&local, frame, x)
}

/// n = 3 from two contact pairs sharing q: on the plane quartic
/// `C = X ∩ span(p, p', q)` the ratio of the lines `pq` and `p'q` has
/// divisor `3p + q - 3p' - q`.
pub fn z3_from_pairs(x: &SurfaceModel, pair1: &ContactPair, pair2: &ContactPair, tol: &Tolerances) -> Result<TorsionCertificate> {
    if x.kind() != SurfaceKind::QuarticP3 {
        return Err(Error::InvalidInput("n = 3 certificates live on quartic surfaces".into()));
    }
    let m = tol.point_match();
    if !pair1.q.same_as(&pair2.q, m) {
        return Err(Error::Precondition("pairs do not share q".into()));
    }
    if pair1.p.same_as(&pair2.p, m) {
        return Err(Error::Precondition("pairs coincide".into()));
    }
    let (p, pp, q) = (&pair1.p, &pair2.p, &pair1.q);
    let plane = geom::span(&[p.clone(), pp.clone(), q.clone()], tol.eps_rank)?;
    if plane.degenerate || plane.dim() != 2 {
        return Err(Error::Degenerate("p, p' and q are collinear".into()));
    }
    let frame = geom::plane_coordinates(&plane, tol.eps_rank)?;
    let c = frame.pull_form(x.first());
    let (pu, ppu, qu) = (frame.pullback(p).unit(), frame.pullback(pp).unit(), frame.pullback(q).unit());
    let div_num = section_divisor_j(x, &frame, &c, p, q, C64::new(0.0, 0.0), tol)?;
    let div_den = section_divisor_j(x, &frame, &c, pp, q, C64::new(0.0, 0.0), tol)?;
    if !div_num.equals(&[(p.clone(), 3), (q.clone(), 1)], m) {
        return Err(Error::CertificateFailed("line pq does not cut 3p + q on the section".into()));
    }
    if !div_den.equals(&[(pp.clone(), 3), (q.clone(), 1)], m) {
        return Err(Error::CertificateFailed("line p'q does not cut 3p' + q on the section".into()));
    }
    let smoothness = plane_quartic_screen(&c, &[pu.clone(), ppu.clone(), qu.clone()], 3, tol)?;
    if !smoothness.passed {
        return Err(Error::Degenerate(format!(
            "section quartic fails the smoothness screen (point ratios {:?}, sample min {:e})",
            smoothness.point_ratios, smoothness.sample_min_ratio
        )));
    }
    let residual = div_num.max_residual().max(div_den.max_residual());
    Ok(TorsionCertificate {
        n: 3,
        curve: SectionCurve::PlaneQuartic { plane, frame, quartic: c },
        p: p.clone(),
        p_prime: pp.clone(),
        function: RationalFunction::LinearRatio {
            numerator: HomogeneousForm::linear(&line_form(&pu, &qu)),
            denominator: HomogeneousForm::linear(&line_form(&ppu, &qu)),
        },
        div_num,
        div_den,
        smoothness,
        residual,
    })
}

/// Divisor cut on the (2,3) curve `{a = b = 0}` of P^3 by the plane
/// `lambda = 0`, lifted through `h_frame` to P^4.
fn section_divisor_t(x: &SurfaceModel, h_frame: &Frame, a: &Form, b: &Form, lambda: &[C64], frames: &[u64], tol: &Tolerances) -> Result<IntersectionDivisor> {
    let plane = geom::cut(&[lambda.to_vec()], 4, tol.eps_rank)?;
    let pf = geom::plane_coordinates(&plane, tol.eps_rank)?;
    let local = plane_curve_intersection_in_frames(&pf.pull_form(a), &pf.pull_form(b), frames, tol)?;
    let composed = Frame::from_basis(&pf.columns.iter().map(|c| h_frame.map(c).coords().to_vec()).collect::<Vec<_>>());
    lift(&local, &composed, x)
}

/// Linear form on `frame` coordinates vanishing on the given points.
fn form_through(frame: &Frame, pts: &[&ProjectivePoint]) -> Vec<C64> {
    let rows: Vec<Vec<C64>> = pts.iter().map(|p| frame.pullback(p).unit()).collect();
    let svd = SvdSplit::new(&rows, frame.dim());
    linalg::unit(svd.right_vectors.last().expect("nonempty frame"))
}

fn space_sextic_samples(a: &Form, b: &Form, planes: usize, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Vec<Vec<C64>>> {
    let mut out = Vec::new();
    for _ in 0..planes {
        let plane = geom::cut(&[random_vec(rng, 4)], 4, tol.eps_rank)?;
        let pf = geom::plane_coordinates(&plane, tol.eps_rank)?;
        let div = plane_curve_intersection_in_frames(&pf.pull_form(a), &pf.pull_form(b), &[1, 2, 3], tol)?;
        out.extend(div.points.iter().map(|d| pf.map(d.point.coords()).unit()));
    }
    Ok(out)
}

/// n = 4 from two contact triples sharing `{q, r}`: the tangent planes
/// span a hyperplane H, and on `C = X ∩ H` the ratio of the forms cutting
/// `T_pX` and `T_p'X` has divisor `4p + q + r - 4p' - q - r`.
///
/// H contains both tangent planes, so it is tangent to X at p and p' and
/// C is singular there. The screen reports this (point ratios listed as
/// p, p', q, r) instead of rejecting the certificate.
pub fn z4_from_triples(x: &SurfaceModel, t1: &ContactTriple, t2: &ContactTriple, tol: &Tolerances) -> Result<TorsionCertificate> {
    if x.kind() != SurfaceKind::CompleteIntersection23P4 {
        return Err(Error::InvalidInput("n = 4 certificates live on (2,3) complete intersections".into()));
    }
    let m = tol.point_match();
    let same_pair = (t1.q.same_as(&t2.q, m) && t1.r.same_as(&t2.r, m)) || (t1.q.same_as(&t2.r, m) && t1.r.same_as(&t2.q, m));
    if !same_pair {
        return Err(Error::Precondition("triples do not share {q, r}".into()));
    }
    if t1.p.same_as(&t2.p, m) {
        return Err(Error::Precondition("triples coincide".into()));
    }
    let (p, pp, q, r) = (&t1.p, &t2.p, &t1.q, &t1.r);
    let shared_line_residual = [&t1.plane, &t2.plane].iter().flat_map(|pl| [pl.residual(q), pl.residual(r)]).fold(0.0, f64::max);
    if shared_line_residual > tol.eps_cert {
        return Err(Error::Precondition(format!("tangent planes do not share the qr line (residual {:e})", shared_line_residual)));
    }
    let gens: Vec<ProjectivePoint> = t1.plane.basis.iter().chain(&t2.plane.basis).cloned().collect();
    let hyperplane = geom::span(&gens, tol.eps_rank)?;
    match hyperplane.dim() {
        3 => {}
        2 => return Err(Error::Degenerate("tangent planes coincide".into())),
        _ => return Err(Error::Precondition("tangent planes do not share a line".into())),
    }
    let frame = Frame::for_subspace(&hyperplane, tol.eps_rank)?;
    let (a, b) = (x.first(), x.cubic().expect("complete intersection has a cubic"));
    let (ah, bh) = (frame.pull_form(a), frame.pull_form(b));
    let lam = form_through(&frame, &[p, q, r]);
    let lam_p = form_through(&frame, &[pp, q, r]);
    let div_num = section_divisor_t(x, &frame, &ah, &bh, &lam, &[1, 2], tol)?;
    let div_den = section_divisor_t(x, &frame, &ah, &bh, &lam_p, &[1, 2], tol)?;
    if !div_num.equals(&[(p.clone(), 4), (q.clone(), 1), (r.clone(), 1)], m) {
        return Err(Error::CertificateFailed("T_pX does not cut 4p + q + r on the section".into()));
    }
    if !div_den.equals(&[(pp.clone(), 4), (q.clone(), 1), (r.clone(), 1)], m) {
        return Err(Error::CertificateFailed("T_p'X does not cut 4p' + q + r on the section".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a34);
    let forms = [ah.clone(), bh.clone()];
    let point_ratios: Vec<f64> = [p, pp, q, r].iter().map(|s| jacobian_ratio(&forms, &frame.pullback(s).unit())).collect();
    let samples = space_sextic_samples(&ah, &bh, 4, &mut rng, tol)?;
    let sample_min_ratio = samples.iter().map(|u| jacobian_ratio(&forms, u)).fold(f64::INFINITY, f64::min);
    let floor = screen_floor(tol);
    let passed = point_ratios.iter().all(|&v| v > floor) && sample_min_ratio > floor;
    let smoothness = SmoothnessScreen { passed, point_ratios, samples: samples.len(), sample_min_ratio, pencil: None, nodal_fiber: false };
    let residual = div_num.max_residual().max(div_den.max_residual());
    Ok(TorsionCertificate {
        n: 4,
        curve: SectionCurve::SpaceSextic { hyperplane, frame, quadric: ah, cubic: bh, shared_line_residual },
        p: p.clone(),
        p_prime: pp.clone(),
        function: RationalFunction::LinearRatio { numerator: HomogeneousForm::linear(&lam), denominator: HomogeneousForm::linear(&lam_p) },
        div_num,
        div_den,
        smoothness,
        residual,
    })
}

struct DoubleLineSolve {
    base: Vec<C64>,
    direction: Vec<C64>,
    sextic: UPoly<C64>,
    branch: Vec<BranchPoint>,
    branch_points: Vec<(ProjectivePoint, usize)>,
    mult_p: usize,
    mult_q: usize,
    residual: f64,
}

/// The line `(1 - t) p + t sigma q` of the plane, with `t_p = 0` and
/// `t_q = 1`; `sigma` changes the parametrisation for re-certification.
fn double_line(f6: &Form, pb: &[C64], qb: &[C64], sigma: C64, tol: &Tolerances) -> Result<DoubleLineSolve> {
    let base = linalg::unit(pb);
    let direction = linalg::axpy(C64::new(-1.0, 0.0), &base, &linalg::scaled(&linalg::unit(qb), sigma));
    let g = f6.restrict_to_line(&base, &direction)?;
    let scale = f6.l1_norm() * (1.0 + linalg::norm(&direction)).powi(6);
    if g.coeffs().iter().all(|c| c.norm() <= tol.eps_cert * scale) {
        return Err(Error::Degenerate("line lies in the branch sextic".into()));
    }
    let roots = roots_with_multiplicities(&g, tol.eps_cluster, tol.eps_cert)?;
    let near = |t: C64| {
        roots
            .roots
            .iter()
            .filter(|rc| (rc.value - t).norm() <= tol.point_match())
            .min_by(|a, b| (a.value - t).norm().partial_cmp(&(b.value - t).norm()).unwrap())
    };
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let (Some(rp), Some(rq)) = (near(zero), near(one)) else {
        return Err(Error::CertificateFailed("restricted sextic does not vanish at t_p and t_q".into()));
    };
    let mut branch: Vec<BranchPoint> = roots.roots.iter().map(|rc| BranchPoint { t: Some(rc.value), multiplicity: rc.multiplicity }).collect();
    let mut branch_points: Vec<(ProjectivePoint, usize)> = roots
        .roots
        .iter()
        .map(|rc| (ProjectivePoint::new(linalg::axpy(rc.value, &direction, &base)).expect("nonzero").normalized(), rc.multiplicity))
        .collect();
    if roots.degree_at_infinity > 0 {
        branch.push(BranchPoint { t: None, multiplicity: roots.degree_at_infinity });
        branch_points.push((ProjectivePoint::new(direction.clone()).expect("nonzero").normalized(), roots.degree_at_infinity));
    }
    Ok(DoubleLineSolve {
        base,
        direction,
        sextic: g,
        branch,
        branch_points,
        mult_p: rp.multiplicity,
        mult_q: rq.multiplicity,
        residual: rp.residual.max(rq.residual),
    })
}

fn base_image(p: &ProjectivePoint) -> Result<ProjectivePoint> {
    ProjectivePoint::new(p.coords()[..3].to_vec()).map_err(|_| Error::InvalidInput("point has zero base coordinates".into()))
}

/// n = 2 on the double sextic: for p, q over the branch curve the line
/// through their images meets it in 6 branch points, and
/// `(t - t_p) / (t - t_q)` on the genus-2 double cover has divisor
/// `2p - 2q`.
pub fn z2_certificate(x: &SurfaceModel, p: &ProjectivePoint, q: &ProjectivePoint, tol: &Tolerances) -> Result<TorsionCertificate> {
    if x.kind() != SurfaceKind::DoubleSexticCover {
        return Err(Error::InvalidInput("n = 2 certificates live on double sextic covers".into()));
    }
    if p.len() != 4 || q.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: p.len().min(q.len()) });
    }
    let f6 = x.first();
    let (pb, qb) = (base_image(p)?, base_image(q)?);
    for (name, b) in [("p", &pb), ("q", &qb)] {
        let res = f6.relative_residual(&b.unit());
        if res > tol.eps_cert {
            return Err(Error::Precondition(format!("image of {} is not on the branch sextic (residual {:e})", name, res)));
        }
    }
    if pb.same_as(&qb, tol.point_match()) {
        return Err(Error::Precondition("images of p and q coincide".into()));
    }
    let solve = double_line(f6, pb.coords(), qb.coords(), C64::new(1.0, 0.0), tol)?;
    let total: usize = solve.branch.iter().map(|b| b.multiplicity).sum();
    if total != 6 {
        return Err(Error::CertificateFailed(format!("branch divisor has degree {}", total)));
    }
    let ramified = |pt: &ProjectivePoint| -> ProjectivePoint {
        let mut c = pt.coords()[..3].to_vec();
        c.push(C64::new(0.0, 0.0));
        ProjectivePoint::new(c).expect("nonzero base")
    };
    let (pr, qr) = (ramified(p), ramified(q));
    let residual = solve.residual.max(x.residual(&pr)?).max(x.residual(&qr)?);
    let div_num = IntersectionDivisor { points: vec![DivisorPoint { point: pr.clone(), multiplicity: 2, residual }] };
    let div_den = IntersectionDivisor { points: vec![DivisorPoint { point: qr.clone(), multiplicity: 2, residual }] };
    let nodal_fiber = solve.mult_p > 1 || solve.mult_q > 1;
    let smoothness = SmoothnessScreen {
        passed: solve.branch.iter().all(|b| b.multiplicity == 1),
        point_ratios: vec![],
        samples: 0,
        sample_min_ratio: f64::INFINITY,
        pencil: None,
        nodal_fiber,
    };
    let line = geom::span(&[pb.clone(), qb.clone()], tol.eps_rank)?;
    Ok(TorsionCertificate {
        n: 2,
        curve: SectionCurve::DoubleLine { line, base: solve.base, direction: solve.direction, sextic: solve.sextic.coeffs().to_vec(), branch: solve.branch },
        p: pr,
        p_prime: qr,
        function: RationalFunction::ParameterShift { t_numerator: C64::new(0.0, 0.0), t_denominator: C64::new(1.0, 0.0) },
        div_num,
        div_den,
        smoothness,
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RecertReport {
    pub matches: bool,
    pub max_deviation: f64,
    pub div_num: IntersectionDivisor,
    pub div_den: IntersectionDivisor,
}

/// Point-for-point agreement: same multiplicities, positions within `tol`.
fn compare(a: &IntersectionDivisor, b: &IntersectionDivisor, tol: f64) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    let mut ok = a.points.len() == b.points.len();
    for d in &a.points {
        match b
            .points
            .iter()
            .filter(|e| e.multiplicity == d.multiplicity)
            .min_by(|s, t| s.point.distance(&d.point).partial_cmp(&t.point.distance(&d.point)).unwrap())
        {
            Some(e) => {
                let dist = e.point.distance(&d.point);
                worst = worst.max(dist);
                ok &= dist <= tol;
            }
            None => ok = false,
        }
    }
    (ok, worst)
}

/// Re-extracts both divisors of a certificate from scratch: a fresh frame
/// of the section, a fresh line parametrisation and a new root solve.
pub fn recertify_certificate(x: &SurfaceModel, cert: &TorsionCertificate, seed: u64, tol: &Tolerances) -> Result<RecertReport> {
    let (div_num, div_den) = match &cert.curve {
        SectionCurve::PlaneQuartic { plane, .. } => {
            let frame = fresh_frame(plane, seed);
            let c = frame.pull_form(x.first());
            let q = cert
                .div_num
                .residual_part(&[&cert.p], tol.point_match())
                .first()
                .map(|d| d.point.clone())
                .ok_or_else(|| Error::CertificateFailed("no residual point".into()))?;
            (section_divisor_j(x, &frame, &c, &cert.p, &q, RECHECK_OMEGA, tol)?, section_divisor_j(x, &frame, &c, &cert.p_prime, &q, RECHECK_OMEGA, tol)?)
        }
        SectionCurve::SpaceSextic { hyperplane, .. } => {
            let frame = fresh_frame(hyperplane, seed);
            let (ah, bh) = (frame.pull_form(x.first()), frame.pull_form(x.cubic().expect("cubic")));
            let rest: Vec<&ProjectivePoint> = cert.div_num.residual_part(&[&cert.p], tol.point_match()).iter().map(|d| &d.point).collect();
            if rest.len() != 2 {
                return Err(Error::CertificateFailed("certificate lost its residual points".into()));
            }
            let lam = form_through(&frame, &[&cert.p, rest[0], rest[1]]);
            let lam_p = form_through(&frame, &[&cert.p_prime, rest[0], rest[1]]);
            (section_divisor_t(x, &frame, &ah, &bh, &lam, &[41, 43, 47], tol)?, section_divisor_t(x, &frame, &ah, &bh, &lam_p, &[41, 43, 47], tol)?)
        }
        SectionCurve::DoubleLine { .. } => {
            let (pb, qb) = (base_image(&cert.p)?, base_image(&cert.p_prime)?);
            let sigma = C64::from_polar(1.0, 0.3 + seed as f64 * 0.7);
            let fresh = double_line(x.first(), pb.coords(), qb.coords(), sigma, tol)?;
            let before = double_line(x.first(), pb.coords(), qb.coords(), C64::new(1.0, 0.0), tol)?;
            let as_div = |s: &DoubleLineSolve| IntersectionDivisor {
                points: s.branch_points.iter().map(|(pt, m)| DivisorPoint { point: pt.clone(), multiplicity: *m, residual: s.residual }).collect(),
            };
            let (ok, dev) = compare(&as_div(&fresh), &as_div(&before), tol.eps_cluster);
            let ok = ok && fresh.mult_p == before.mult_p && fresh.mult_q == before.mult_q;
            let num = IntersectionDivisor { points: vec![DivisorPoint { point: cert.p.clone(), multiplicity: 2, residual: fresh.residual }] };
            let den = IntersectionDivisor { points: vec![DivisorPoint { point: cert.p_prime.clone(), multiplicity: 2, residual: fresh.residual }] };
            return Ok(RecertReport { matches: ok, max_deviation: dev, div_num: num, div_den: den });
        }
    };
    let (ok1, d1) = compare(&div_num, &cert.div_num, tol.eps_cluster);
    let (ok2, d2) = compare(&div_den, &cert.div_den, tol.eps_cluster);
    Ok(RecertReport { matches: ok1 && ok2, max_deviation: d1.max(d2), div_num, div_den })
}

/// Two ramification points of a double sextic over distinct points of a
/// random line, for building n = 2 instances.
pub fn sample_ramification_pair(x: &SurfaceModel, seed: u64, tol: &Tolerances) -> Result<(ProjectivePoint, ProjectivePoint)> {
    let p = x.sample_ramification_point(seed, tol)?;
    let mut k = 1u64;
    loop {
        let q = x.sample_ramification_point(seed.wrapping_add(k * 7919), tol)?;
        if !base_image(&q)?.same_as(&base_image(&p)?, 1e-3) {
            return Ok((p, q));
        }
        k += 1;
        if k > 16 {
            return Err(Error::NonConvergence("no second ramification point".into()));
        }
    }
}

/// A random line tangent to the branch sextic at a point `p`, and another
/// branch point on it: exercises the nodal-fiber path of n = 2.
pub fn sample_tangent_configuration(x: &SurfaceModel, seed: u64, tol: &Tolerances) -> Result<(ProjectivePoint, ProjectivePoint)> {
    let f6 = x.first();
    let p = x.sample_ramification_point(seed, tol)?;
    let pb = base_image(&p)?.unit();
    let grad: Vec<C64> = f6.gradient().iter().map(|g| g.eval_c64(&pb)).collect();
    // The tangent line is {grad . x = 0}; grad x w lies on it for any w.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7461_6e67);
    let dir = line_form(&grad, &random_vec(&mut rng, 3));
    let g = f6.restrict_to_line(&pb, &dir)?;
    let roots = roots_with_multiplicities(&g, tol.eps_cluster, tol.eps_cert)?;
    let far = roots
        .roots
        .iter()
        .filter(|rc| rc.value.norm() > 1e-3 && rc.multiplicity == 1)
        .min_by(|a, b| a.value.norm().partial_cmp(&b.value.norm()).unwrap())
        .ok_or_else(|| Error::NonConvergence("tangent line meets the sextic only at p".into()))?;
    let mut qc = linalg::axpy(far.value, &dir, &pb);
    qc.push(C64::new(0.0, 0.0));
    let q = ProjectivePoint::new(qc)?;
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ledger_values() {
        let l = expected_dim_zprime(3).unwrap();
        assert_eq!((l.dim_hn, l.dim_cxc, l.dim_m_g2, l.expected_dim), (5, 5, 8, 2));
        let l = expected_dim_zprime(4).unwrap();
        assert_eq!((l.dim_hn, l.dim_cxc, l.dim_m_g2, l.expected_dim), (7, 6, 11, 2));
        let l = expected_dim_zprime(20).unwrap();
        assert_eq!((l.dim_hn, l.dim_cxc, l.dim_m_g2, l.expected_dim), (39, 22, 59, 2));
        assert!(expected_dim_zprime(2).is_err());
        for g in [3, 4, 11] {
            assert_eq!(expected_dim_y(g).unwrap().expected_dim, 0);
        }
        assert!(expected_dim_y(1).is_err());
    }

    #[test]
    fn ledger_json_keys() {
        let s = serde_json::to_string(&expected_dim_zprime(3).unwrap()).unwrap();
        assert_eq!(s, r#"{"g":3,"dim_Hn":5,"dim_CxC":5,"dim_Mg2":8,"expected":2}"#);
    }

    #[test]
    fn brill_noether_examples() {
        assert_eq!(bn_g1n_exists(3, 3), BrillNoether { g: 3, n: 3, rho: 1, exists: true });
        assert_eq!(bn_g1n_exists(4, 4), BrillNoether { g: 4, n: 4, rho: 2, exists: true });
        assert_eq!(bn_g1n_exists(7, 4), BrillNoether { g: 7, n: 4, rho: -1, exists: false });
    }

    #[test]
    fn pencil_screen_smooth_and_nodal() {
        // Fermat quartic: smooth, class 12.
        let fermat = HomogeneousForm::from_terms(
            3,
            4,
            (0..3).map(|i| {
                let mut e = vec![0; 3];
                e[i] = 4;
                (e, C64::new(1.0, 0.0))
            }),
        )
        .unwrap();
        let s = pencil_discriminant(&fermat, 1, &tol()).unwrap();
        assert!(s.all_simple(), "{:?}", s);
        assert!(s.excess_coefficient < 1e-10);
        // (x^2 + y^2 - z^2)(x^2 + 2y^2 - 3z^2) has 4 nodes.
        let c1 =
            HomogeneousForm::from_terms(3, 2, [(vec![2, 0, 0], C64::new(1.0, 0.0)), (vec![0, 2, 0], C64::new(1.0, 0.0)), (vec![0, 0, 2], C64::new(-1.0, 0.0))])
                .unwrap();
        let c2 =
            HomogeneousForm::from_terms(3, 2, [(vec![2, 0, 0], C64::new(1.0, 0.0)), (vec![0, 2, 0], C64::new(2.0, 0.0)), (vec![0, 0, 2], C64::new(-3.0, 0.0))])
                .unwrap();
        let s = pencil_discriminant(&c1.mul(&c2), 1, &tol()).unwrap();
        assert!(!s.all_simple(), "{:?}", s);
    }

    #[test]
    fn z2_on_random_double_sextic() {
        let x = SurfaceModel::random_double_sextic(4);
        let (p, q) = sample_ramification_pair(&x, 1, &tol()).unwrap();
        let cert = z2_certificate(&x, &p, &q, &tol()).unwrap();
        assert!(cert.degree_conserved());
        assert!(cert.difference_is_torsion_pair(tol().point_match()));
        assert!(cert.smoothness.passed);
        assert!(!cert.smoothness.nodal_fiber);
        assert!(recertify_certificate(&x, &cert, 2, &tol()).unwrap().matches);
        assert!(matches!(z2_certificate(&x, &p, &p, &tol()), Err(Error::Precondition(_))));
    }

    #[test]
    fn z2_tangent_line_sets_nodal_flag() {
        let x = SurfaceModel::random_double_sextic(6);
        let (p, q) = sample_tangent_configuration(&x, 3, &tol()).unwrap();
        let cert = z2_certificate(&x, &p, &q, &tol()).unwrap();
        assert!(cert.smoothness.nodal_fiber);
        assert!(cert.degree_conserved());
        assert!(cert.difference_is_torsion_pair(tol().point_match()));
    }

    #[test]
    fn z3_from_shared_q_pairs() {
        let t = tol();
        let x = SurfaceModel::random_quartic(11);
        let q = x.sample_point(0, &t).unwrap();
        let fib = crate::corr_j::j_fiber_second(&x, &q, &crate::corr_j::SolverOptions::default(), &t).unwrap();
        assert!(fib.pairs.len() >= 2);
        let (a, b) = (&fib.pairs[0].pair, &fib.pairs[1].pair);
        let cert = z3_from_pairs(&x, a, b, &t).unwrap();
        assert!(cert.degree_conserved());
        assert!(cert.difference_is_torsion_pair(t.point_match()));
        assert!(cert.smoothness.passed);
        assert!(cert.residual < t.eps_cert);
        let re = recertify_certificate(&x, &cert, 9, &t).unwrap();
        assert!(re.matches, "{:e}", re.max_deviation);
        assert!(matches!(z3_from_pairs(&x, a, a, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn z4_on_constructed_surface() {
        let t = tol();
        let (x, c) = SurfaceModel::ci23_with_shared_tangent_line(0);
        let t1 = crate::corr_t::t_fiber_first(&x, &c.p, &t).unwrap().triple.unwrap();
        let t2 = crate::corr_t::t_fiber_first(&x, &c.p_prime, &t).unwrap().triple.unwrap();
        let cert = z4_from_triples(&x, &t1, &t2, &t).unwrap();
        assert_eq!(cert.div_num.degree(), 6);
        assert!(cert.degree_conserved());
        assert!(cert.difference_is_torsion_pair(t.point_match()));
        assert!(cert.residual < 1e-6);
        // Tangent to X at p and p', smooth at q and r and along samples.
        let pr = &cert.smoothness.point_ratios;
        assert!(pr[0] < 1e-10 && pr[1] < 1e-10, "{:?}", pr);
        assert!(pr[2] > 1e-6 && pr[3] > 1e-6 && cert.smoothness.sample_min_ratio > 1e-6);
        assert!(!cert.smoothness.passed);
        let re = recertify_certificate(&x, &cert, 5, &t).unwrap();
        assert!(re.matches, "{:e}", re.max_deviation);
        assert!(matches!(z4_from_triples(&x, &t1, &t1, &t), Err(Error::Precondition(_))));
    }
}
