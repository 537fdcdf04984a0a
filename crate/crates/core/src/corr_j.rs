//! The contact correspondence J on a quartic surface: pairs (p, q) such
//! that some line meets the surface in `3p + q`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::divisor::{line_divisor, IntersectionDivisor};
use crate::error::{Error, Result};
use crate::geom::{self, LinearSubspace, ProjectivePoint};
use crate::homotopy::{solve_total_degree, AffineChart, PathStatus, PolySystem, TrackOptions};
use crate::linalg::{self, SvdSplit};
use crate::poly::{interpolate_vanishing_form, monomial_count, resultant, Form, Poly, C64};
use crate::surfaces::{PlaneCurve, SurfaceKind, SurfaceModel};

/// Frame parameter used for contact certificates; re-certification uses
/// `RECHECK_OMEGA` so the two root solves share nothing but the line.
pub const CERT_OMEGA: C64 = C64::new(0.0, 0.0);
pub const RECHECK_OMEGA: C64 = C64::new(0.618, -0.377);

#[derive(Clone, Debug, Serialize)]
pub struct ContactPair {
    pub p: ProjectivePoint,
    pub q: ProjectivePoint,
    pub line: LinearSubspace,
    pub divisor: IntersectionDivisor,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeType {
    Node,
    Cusp,
    Higher,
}

/// Tangent cone of the plane quartic `T_pX ∩ X` at `p`.
#[derive(Clone, Debug, Serialize)]
pub struct TangentConeReport {
    pub node_type: NodeType,
    /// Directions of the cone lines, as points of P^3.
    pub directions: Vec<ProjectivePoint>,
    /// `|b^2 - 4ac| / (|a| + |b| + |c|)^2` for the quadratic part.
    pub discriminant: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JDegeneracy {
    /// The two cone lines coincide.
    Cusp,
    /// The quadratic part vanishes: p is a triple point of `T_pX ∩ X`.
    TriplePoint,
    /// A cone line has contact 4 at p.
    Hyperflex,
    /// The two residual points coincide.
    CoincidentResidual,
    /// A constructed pair failed its divisor certificate.
    CertificateMismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerateReport {
    pub kind: JDegeneracy,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct JFiberFirst {
    pub p: ProjectivePoint,
    pub pairs: Vec<ContactPair>,
    pub cone: TangentConeReport,
    pub degenerate: Vec<DegenerateReport>,
}

impl JFiberFirst {
    /// Two certified pairs with distinct residual points.
    pub fn is_generic(&self, tol: &Tolerances) -> bool {
        self.degenerate.is_empty() && self.pairs.len() == 2 && !self.pairs[0].q.same_as(&self.pairs[1].q, tol.point_match())
    }
}

fn quartic(x: &SurfaceModel) -> Result<&Form> {
    if x.kind() != SurfaceKind::QuarticP3 {
        return Err(Error::InvalidInput("J is defined on quartic surfaces".into()));
    }
    Ok(x.first())
}

/// Certifies that the line through `p` and `q` cuts `3p + q`.
pub fn certify_contact(f: &Form, p: &ProjectivePoint, q: &ProjectivePoint, omega: C64, tol: &Tolerances) -> Result<ContactPair> {
    if p.same_as(q, tol.point_match()) {
        return Err(Error::Degenerate("p and q coincide".into()));
    }
    let divisor = line_divisor(f, p, q, omega, tol)?;
    let ok = divisor.equals(&[(p.clone(), 3), (q.clone(), 1)], tol.point_match());
    let residual = divisor.max_residual();
    if !ok || residual > tol.eps_cert {
        return Err(Error::CertificateFailed(format!(
            "line divisor has multiplicities {:?} (residual {:e}), expected 3p + q",
            divisor.points.iter().map(|d| d.multiplicity).collect::<Vec<_>>(),
            residual
        )));
    }
    let line = geom::span(&[p.clone(), q.clone()], tol.eps_rank)?;
    Ok(ContactPair { p: p.clone(), q: q.clone(), line, divisor, residual })
}

/// Re-extracts the divisor of a pair in a fresh parametrisation.
pub fn recertify(x: &SurfaceModel, pair: &ContactPair, tol: &Tolerances) -> Result<ContactPair> {
    certify_contact(quartic(x)?, &pair.p, &pair.q, RECHECK_OMEGA, tol)
}

/// Orthonormal pair spanning `T_pX` modulo `p`.
fn tangent_directions(f: &Form, u: &[C64], tol: &Tolerances) -> Result<[Vec<C64>; 2]> {
    let grad: Vec<C64> = f.gradient().iter().map(|d| d.eval_c64(u)).collect();
    let rows = vec![linalg::unit(&grad), u.iter().map(|c| c.conj()).collect()];
    let svd = SvdSplit::new(&rows, 4);
    if svd.rank(tol.eps_rank) < 2 {
        return Err(Error::SingularPoint { ratio: svd.singular_values[1] });
    }
    let ns = svd.null_space(2);
    Ok([ns[0].clone(), ns[1].clone()])
}

/// Roots `(s1 : s2)` of the binary quadric `a s1^2 + b s1 s2 + c s2^2`.
fn binary_quadric_roots(a: C64, b: C64, c: C64) -> Vec<[C64; 2]> {
    let one = C64::new(1.0, 0.0);
    let disc = (b * b - a * c * 4.0).sqrt();
    let (lead, other, swap) = if a.norm() >= c.norm() { (a, c, false) } else { (c, a, true) };
    // Stable quadratic formula for lead x^2 + b x + other = 0.
    let sgn = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let qv = -(b + disc * sgn) / 2.0;
    let mut xs = Vec::new();
    if qv.norm() > 0.0 {
        xs.push(qv / lead);
        xs.push(other / qv);
    } else {
        xs.push(C64::new(0.0, 0.0));
        xs.push(C64::new(0.0, 0.0));
    }
    xs.into_iter().map(|x| if swap { [one, x] } else { [x, one] }).collect()
}

/// The fiber of the first projection over `p`: the residual points of the
/// two lines of the tangent cone of `T_pX ∩ X` at `p`.
pub fn j_fiber_first(x: &SurfaceModel, p: &ProjectivePoint, tol: &Tolerances) -> Result<JFiberFirst> {
    let f = quartic(x)?;
    geom::tangent_space(x, p, tol)?;
    let u = p.unit();
    let [d1, d2] = tangent_directions(f, &u, tol)?;
    // Local expansion G(s) = F(u + s1 d1 + s2 d2).
    let subs: Vec<Poly<C64>> = (0..4).map(|i| Poly::affine(&[d1[i], d2[i]], u[i])).collect();
    let g = f.poly().compose(&subs);
    let parts: Vec<Poly<C64>> = (0..=4).map(|k| g.homogeneous_part(k)).collect();
    let reference = parts[2..].iter().map(|q| q.max_coeff()).fold(0.0, f64::max);
    if reference == 0.0 {
        return Err(Error::Degenerate("tangent plane section vanishes identically".into()));
    }
    let g2 = &parts[2];
    let (a, b, c) = (g2.coeff(&[2, 0]), g2.coeff(&[1, 1]), g2.coeff(&[0, 2]));
    let size = a.norm() + b.norm() + c.norm();
    let mut degenerate = Vec::new();
    let at = |s: &[C64; 2]| ProjectivePoint::new(linalg::axpy(s[0], &d1, &linalg::scaled(&d2, s[1]))).expect("independent directions");

    if size <= tol.eps_cert * reference {
        degenerate.push(DegenerateReport { kind: JDegeneracy::TriplePoint, detail: format!("quadratic part {:e} relative", size / reference) });
        let cone = TangentConeReport { node_type: NodeType::Higher, directions: Vec::new(), discriminant: 0.0 };
        return Ok(JFiberFirst { p: p.clone(), pairs: Vec::new(), cone, degenerate });
    }
    let discriminant = (b * b - a * c * 4.0).norm() / (size * size);
    let mut dirs = binary_quadric_roots(a, b, c);
    let node_type = if discriminant <= tol.eps_cert {
        // Double cone line: average of the two computed roots.
        let s = if a.norm() >= c.norm() { [-b / (a * 2.0), C64::new(1.0, 0.0)] } else { [C64::new(1.0, 0.0), -b / (c * 2.0)] };
        dirs = vec![s];
        degenerate.push(DegenerateReport { kind: JDegeneracy::Cusp, detail: format!("cone discriminant {:e}", discriminant) });
        NodeType::Cusp
    } else {
        NodeType::Node
    };
    let directions: Vec<ProjectivePoint> = dirs.iter().map(|s| at(s).normalized()).collect();

    let mut pairs = Vec::new();
    for s in &dirs {
        let sn = linalg::unit(s);
        let g3 = parts[3].eval(&sn);
        let g4 = parts[4].eval(&sn);
        let s3 = parts[3].eval_with_abs(&sn).1.max(f64::MIN_POSITIVE);
        let s4 = parts[4].eval_with_abs(&sn).1.max(f64::MIN_POSITIVE);
        if g3.norm() <= tol.eps_cert * s3 && g4.norm() <= tol.eps_cert * s4 {
            return Err(Error::LineOnSurface);
        }
        if g3.norm() <= tol.eps_cert * s3 {
            degenerate.push(DegenerateReport { kind: JDegeneracy::Hyperflex, detail: format!("cubic term {:e} relative", g3.norm() / s3) });
            continue;
        }
        // F(u + t d) = t^3 (G3 + G4 t) along the cone line d.
        let d = linalg::axpy(sn[0], &d1, &linalg::scaled(&d2, sn[1]));
        let q = ProjectivePoint::new(linalg::axpy(-g3, &d, &linalg::scaled(&u, g4)))?.normalized();
        match certify_contact(f, p, &q, CERT_OMEGA, tol) {
            Ok(pair) => pairs.push(pair),
            Err(Error::LineOnSurface) => return Err(Error::LineOnSurface),
            Err(e) => degenerate.push(DegenerateReport { kind: JDegeneracy::CertificateMismatch, detail: e.to_string() }),
        }
    }
    if pairs.len() == 2 && pairs[0].q.same_as(&pairs[1].q, tol.point_match()) {
        degenerate.push(DegenerateReport { kind: JDegeneracy::CoincidentResidual, detail: "q1 = q2".into() });
    }
    let cone = TangentConeReport { node_type, directions, discriminant };
    Ok(JFiberFirst { p: p.clone(), pairs, cone, degenerate })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverOptions {
    /// Number of independent homotopy runs (fresh chart and gamma each);
    /// the search stops early once two runs agree.
    pub max_runs: usize,
    pub seed: u64,
    pub track: TrackOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_runs: 4, seed: 0, track: TrackOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberPoint {
    pub pair: ContactPair,
    pub multiplicity: usize,
    /// Relative value of the degree-10 residual-cubic discriminant at the
    /// direction of `p` from `q`.
    pub discriminant_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedCandidate {
    pub point: ProjectivePoint,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PathSummary {
    pub regular: usize,
    pub singular: usize,
    pub diverged: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct JFiberSecond {
    pub q: ProjectivePoint,
    pub pairs: Vec<FiberPoint>,
    pub count_with_multiplicity: usize,
    pub bezout_number: usize,
    pub runs: usize,
    /// True when two independent runs produced the same certified set.
    pub confirmed: bool,
    pub paths: Vec<PathSummary>,
    pub rejected: Vec<RejectedCandidate>,
}

/// The fiber of the second projection over `q`: all `p` whose line to `q`
/// has contact 3 at `p`.
///
/// Solves `{F(p) = 0, dF(p).q = 0, q^T HessF(p) q = 0}` on P^3 by
/// homotopy continuation in a random chart. The point `q` itself is an
/// excess solution; every candidate is filtered by the contact certificate.
pub fn j_fiber_second(x: &SurfaceModel, q: &ProjectivePoint, opts: &SolverOptions, tol: &Tolerances) -> Result<JFiberSecond> {
    let f = quartic(x)?;
    geom::tangent_space(x, q, tol)?;
    let qu = q.unit();
    let polar1 = f.polar(&qu);
    let polar2 = polar1.polar(&qu);
    let disc = residual_cubic_discriminant(f, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x6a32);

    let mut accepted: Vec<FiberPoint> = Vec::new();
    let mut previous: Option<Vec<ProjectivePoint>> = None;
    let mut confirmed = false;
    let mut paths = Vec::new();
    let mut rejected = Vec::new();
    let mut runs = 0;
    let mut bezout = 0;
    for run in 0..opts.max_runs.max(1) {
        runs += 1;
        let chart = AffineChart::random(&mut rng, 4);
        let coords = chart.coordinate_polys();
        let sys = PolySystem::new(vec![f.poly().compose(&coords), polar1.poly().compose(&coords), polar2.poly().compose(&coords)])?;
        bezout = sys.bezout_number();
        let ends = solve_total_degree(&sys, opts.seed.wrapping_add(run as u64 * 7919), &opts.track);
        let mut summary = PathSummary::default();
        let mut found: Vec<FiberPoint> = Vec::new();
        for e in &ends {
            match e.status {
                PathStatus::Regular => summary.regular += 1,
                PathStatus::Singular => summary.singular += 1,
                PathStatus::Diverged => summary.diverged += 1,
                PathStatus::Failed => summary.failed += 1,
            }
            if matches!(e.status, PathStatus::Diverged | PathStatus::Failed) {
                continue;
            }
            let Ok(p) = ProjectivePoint::new(chart.point(&e.x)) else { continue };
            let p = p.normalized();
            if p.same_as(q, 1e-3) {
                continue;
            }
            if let Some(fp) = found.iter_mut().find(|fp| fp.pair.p.same_as(&p, tol.point_match())) {
                if e.status == PathStatus::Singular {
                    fp.multiplicity += 1;
                }
                continue;
            }
            match certify_contact(f, &p, q, CERT_OMEGA, tol) {
                Ok(pair) => {
                    let direction = direction_of(q, &pair.p);
                    let discriminant_residual = disc.relative_residual(&direction);
                    found.push(FiberPoint { pair, multiplicity: 1, discriminant_residual });
                }
                Err(err) => {
                    if !rejected.iter().any(|r: &RejectedCandidate| r.point.same_as(&p, tol.point_match())) {
                        rejected.push(RejectedCandidate { point: p, reason: err.to_string() });
                    }
                }
            }
        }
        paths.push(summary);
        let points: Vec<ProjectivePoint> = found.iter().map(|fp| fp.pair.p.clone()).collect();
        for fp in found {
            if !accepted.iter().any(|a| a.pair.p.same_as(&fp.pair.p, tol.point_match())) {
                accepted.push(fp);
            }
        }
        if let Some(prev) = &previous {
            let same = prev.len() == points.len() && prev.iter().all(|a| points.iter().any(|b| a.same_as(b, tol.point_match())));
            if same && accepted.len() == points.len() {
                confirmed = true;
                break;
            }
        }
        previous = Some(points);
    }
    accepted.sort_by(|a, b| cmp_points(&a.pair.p, &b.pair.p));
    rejected.retain(|r| !accepted.iter().any(|a| a.pair.p.same_as(&r.point, tol.point_match())));
    let count_with_multiplicity = accepted.iter().map(|a| a.multiplicity).sum();
    Ok(JFiberSecond { q: q.clone(), pairs: accepted, count_with_multiplicity, bezout_number: bezout, runs, confirmed, paths, rejected })
}

fn cmp_points(a: &ProjectivePoint, b: &ProjectivePoint) -> std::cmp::Ordering {
    for (x, y) in a.coords().iter().zip(b.coords()) {
        let o = x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap());
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Index of the largest coordinate of `q`; directions from `q` live in the
/// coordinate plane `x_k = 0`, which does not contain `q`.
fn direction_pivot(q: &ProjectivePoint) -> usize {
    let c = q.coords();
    (0..c.len()).max_by(|&i, &j| c[i].norm().partial_cmp(&c[j].norm()).unwrap()).unwrap()
}

/// Direction of the line `qp` in the frame plane, as 3 coordinates.
pub fn direction_of(q: &ProjectivePoint, p: &ProjectivePoint) -> Vec<C64> {
    let k = direction_pivot(q);
    let qc = q.coords();
    let pc = p.coords();
    let d: Vec<C64> = pc.iter().zip(qc).map(|(a, b)| a - b * (pc[k] / qc[k])).collect();
    (0..d.len()).filter(|&i| i != k).map(|i| d[i]).collect()
}

/// Coefficients `a_1..a_4` of `F(q + t d) = t (a_1 + a_2 t + a_3 t^2 + a_4 t^3)`
/// as forms in the three direction coordinates.
pub fn residual_cubic_coefficients(f: &Form, q: &ProjectivePoint) -> Vec<Poly<C64>> {
    let k = direction_pivot(q);
    let qu = q.coords();
    // Variables (t, d_0, d_1, d_2).
    let mut subs = Vec::with_capacity(4);
    let mut j = 0;
    for (i, &qi) in qu.iter().enumerate() {
        let mut p = Poly::constant(4, qi);
        if i != k {
            j += 1;
            let mut e = vec![0; 4];
            e[0] = 1;
            e[j] = 1;
            p.add_term(e, C64::new(1.0, 0.0));
        }
        subs.push(p);
    }
    let g = f.poly().compose(&subs);
    g.coefficients_in(0).into_iter().map(|c| c.remove_var(0)).skip(1).collect()
}

/// `Res_t(c_d, c_d')` for the residual cubic `c_d`, a form of degree 14 in
/// the direction coordinates; it equals `-a_4` times the discriminant.
pub fn residual_cubic_resultant(f: &Form, q: &ProjectivePoint) -> Result<Form> {
    let a = residual_cubic_coefficients(f, q);
    // Reassemble c_d(t) with t as variable 0 of four.
    let lift = |p: &Poly<C64>, power: u32| -> Poly<C64> { Poly::from_terms(4, p.terms().map(|(e, c)| (vec![power, e[0], e[1], e[2]], *c))) };
    let mut cubic = Poly::zero(4);
    let mut deriv = Poly::zero(4);
    for (j, aj) in a.iter().enumerate() {
        cubic = cubic + lift(aj, j as u32);
        if j > 0 {
            deriv = deriv + lift(&aj.scale(&C64::new(j as f64, 0.0)), j as u32 - 1);
        }
    }
    let r = resultant(&cubic, &deriv, 0)?.remove_var(0);
    Form::from_poly(r)
}

/// Discriminant of the residual cubic: a degree-10 form in the direction
/// coordinates vanishing on every direction with a double root, in
/// particular on every triple-contact direction.
pub fn residual_cubic_discriminant(f: &Form, q: &ProjectivePoint) -> Result<Form> {
    let a = residual_cubic_coefficients(f, q);
    let (a1, a2, a3, a4) = (&a[0], &a[1], &a[2], &a[3]);
    let k = |c: f64| C64::new(c, 0.0);
    let d = (&(&(a4 * a3) * a2) * a1).scale(&k(18.0)) - (&a3.pow(3) * a1).scale(&k(4.0)) + &a3.pow(2) * &a2.pow(2)
        - (a4 * &a2.pow(3)).scale(&k(4.0))
        - (&a4.pow(2) * &a1.pow(2)).scale(&k(27.0));
    Form::from_poly(d)
}

/// Intersection number `(a H' + b E).(a' H' + b' E)` on the blowup of a
/// surface with `H^2 = h2` at a point (`E^2 = -1`, `H'.E = 0`).
pub fn blowup_intersection(c1: (i64, i64), c2: (i64, i64), h2: i64) -> i64 {
    c1.0 * c2.0 * h2 - c1.1 * c2.1
}

#[derive(Clone, Debug, Serialize)]
pub struct FittedForm {
    pub degree: u32,
    pub form: Form,
    pub underdetermined: bool,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct JPushReport {
    pub inputs_used: usize,
    pub skipped: usize,
    pub images: Vec<ProjectivePoint>,
    /// Largest residual of the input curve's equations at each image.
    pub curve_residuals: Vec<f64>,
    pub fitted: Option<FittedForm>,
    pub same_curve: bool,
}

/// Pushes sampled points of a curve through J and fits the image.
pub fn j_push_curve(x: &SurfaceModel, curve: &PlaneCurve, samples: &[ProjectivePoint], m: usize, tol: &Tolerances) -> Result<JPushReport> {
    quartic(x)?;
    if m > samples.len() {
        return Err(Error::InvalidInput(format!("M = {} exceeds the {} samples", m, samples.len())));
    }
    let mut images = Vec::new();
    let mut skipped = 0;
    for p in &samples[..m] {
        match j_fiber_first(x, p, tol) {
            Ok(fib) if !fib.pairs.is_empty() => images.extend(fib.pairs.into_iter().map(|pair| pair.q)),
            Ok(_) => skipped += 1,
            Err(Error::NotOnSurface { residual }) => return Err(Error::NotOnSurface { residual }),
            Err(_) => skipped += 1,
        }
    }
    let curve_residuals: Vec<f64> = images.iter().map(|q| curve.residual(q)).collect();
    let same_curve = !images.is_empty() && curve_residuals.iter().all(|&r| r <= tol.eps_cert);
    let mut fitted = None;
    if !images.is_empty() {
        let coords: Vec<Vec<C64>> = images.iter().map(|q| q.coords().to_vec()).collect();
        let mut d = 1;
        while monomial_count(4, d) <= images.len() && d <= 8 {
            if let Some(fit) = interpolate_vanishing_form(&coords, d, tol.eps_rank)? {
                fitted = Some(FittedForm { degree: d, form: fit.form, underdetermined: fit.underdetermined, max_residual: fit.max_residual });
                break;
            }
            d += 1;
        }
    }
    Ok(JPushReport { inputs_used: m, skipped, images, curve_residuals, fitted, same_curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rational, ExactForm, HomogeneousForm};
    use crate::surfaces::random_rational_form;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn blowup_numbers() {
        assert_eq!(blowup_intersection((3, -2), (4, -5), 4), 38);
        assert_eq!(blowup_intersection((1, 0), (1, 0), 4), 4);
        assert_eq!(blowup_intersection((0, 1), (0, 1), 4), -1);
        assert_eq!(blowup_intersection((1, 0), (0, 1), 4), 0);
    }

    #[test]
    fn generic_point_has_two_pairs() {
        let x = SurfaceModel::random_quartic(1);
        for seed in 0..5 {
            let p = x.sample_point(seed, &tol()).unwrap();
            let fib = j_fiber_first(&x, &p, &tol()).unwrap();
            assert!(fib.is_generic(&tol()), "{:?}", fib.degenerate);
            assert_eq!(fib.cone.node_type, NodeType::Node);
            for pair in &fib.pairs {
                assert_eq!(pair.divisor.degree(), 4);
                assert!(pair.residual < 1e-8);
                let again = recertify(&x, pair, &tol()).unwrap();
                assert!(again.divisor.equals(&[(pair.p.clone(), 3), (pair.q.clone(), 1)], 1e-6));
            }
        }
    }

    #[test]
    fn quadric_roots_are_roots() {
        let (a, b, c) = (C64::new(1.0, 2.0), C64::new(-0.5, 0.1), C64::new(3.0, -1.0));
        for s in binary_quadric_roots(a, b, c) {
            let v = a * s[0] * s[0] + b * s[0] * s[1] + c * s[1] * s[1];
            assert!(v.norm() < 1e-12);
        }
        for s in binary_quadric_roots(C64::new(1e-9, 0.0), b, c) {
            let v = C64::new(1e-9, 0.0) * s[0] * s[0] + b * s[0] * s[1] + c * s[1] * s[1];
            assert!(v.norm() < 1e-12 * (1.0 + s[0].norm_sqr()));
        }
    }

    /// `w^3 x + w^2 (x l + y^2) + w c3 + c4` with `c3, c4` free of `w` has
    /// tangent plane `x = 0` at (0:0:0:1), and the quadratic part of the
    /// section there is `y^2`.
    fn cuspidal_quartic(seed: u64) -> SurfaceModel {
        let lift = |f: ExactForm| {
            HomogeneousForm::new(f.degree(), Poly::from_terms(4, f.poly().terms().map(|(e, c)| (vec![e[0], e[1], e[2], 0], c.clone())))).unwrap()
        };
        let c3 = lift(random_rational_form(seed, 3, 3));
        let c4 = lift(random_rational_form(seed + 1, 3, 4));
        let l = random_rational_form(seed + 2, 4, 1);
        let var = |i: usize| {
            let mut c = vec![rational(0, 1); 4];
            c[i] = rational(1, 1);
            HomogeneousForm::linear(&c)
        };
        let (xx, yy, ww) = (var(0), var(1), var(3));
        let w2 = ww.mul(&ww);
        let terms: Vec<ExactForm> = vec![w2.mul(&ww).mul(&xx), w2.mul(&xx.mul(&l).add(&yy.mul(&yy)).unwrap()), ww.mul(&c3), c4];
        let f = terms.iter().skip(1).fold(terms[0].clone(), |acc, t| acc.add(t).unwrap());
        SurfaceModel::new_exact(SurfaceKind::QuarticP3, vec![f]).unwrap()
    }

    #[test]
    fn cusp_is_reported() {
        let x = cuspidal_quartic(3);
        let p = ProjectivePoint::real(&[0.0, 0.0, 0.0, 1.0]);
        let fib = j_fiber_first(&x, &p, &tol()).unwrap();
        assert_eq!(fib.cone.node_type, NodeType::Cusp);
        assert_eq!(fib.cone.directions.len(), 1);
        assert!(fib.degenerate.iter().any(|d| d.kind == JDegeneracy::Cusp));
        assert!(fib.pairs.len() <= 1);
    }

    #[test]
    fn fermat_line_point_raises() {
        let x = SurfaceModel::fermat_quartic();
        let z = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
        let t = C64::new(0.7, 0.0);
        let p = ProjectivePoint::new(vec![z, C64::new(1.0, 0.0), z * t, t]).unwrap();
        assert!(x.residual(&p).unwrap() < 1e-14);
        assert!(matches!(j_fiber_first(&x, &p, &tol()), Err(Error::LineOnSurface)));
    }

    #[test]
    fn singular_point_rejected() {
        let x = cuspidal_quartic(5);
        // Replace the linear term to make the vertex singular: cone x^4+y^4+z^4.
        let cone = SurfaceModel::new_exact(
            SurfaceKind::QuarticP3,
            vec![HomogeneousForm::from_terms(
                4,
                4,
                (0..3).map(|i| {
                    let mut e = vec![0; 4];
                    e[i] = 4;
                    (e, rational(1, 1))
                }),
            )
            .unwrap()],
        )
        .unwrap();
        let v = ProjectivePoint::real(&[0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(j_fiber_first(&cone, &v, &tol()), Err(Error::SingularPoint { .. })));
        assert!(j_fiber_first(&x, &v, &tol()).is_ok());
    }

    #[test]
    fn scale_invariant_fiber() {
        let x = SurfaceModel::random_quartic(4);
        let p = x.sample_point(2, &tol()).unwrap();
        let a = j_fiber_first(&x, &p, &tol()).unwrap();
        let b = j_fiber_first(&x, &p.scaled(C64::new(-3.5, 12.0)), &tol()).unwrap();
        assert_eq!(a.pairs.len(), b.pairs.len());
        for pa in &a.pairs {
            assert!(b.pairs.iter().any(|pb| pb.q.same_as(&pa.q, 1e-8)));
        }
    }

    #[test]
    fn discriminant_form_has_degree_ten() {
        let x = SurfaceModel::random_quartic(6);
        let q = x.sample_point(0, &tol()).unwrap();
        let d = residual_cubic_discriminant(x.first(), &q).unwrap();
        assert_eq!(d.degree(), 10);
        assert_eq!(d.nvars(), 3);
        let r = residual_cubic_resultant(x.first(), &q).unwrap();
        assert_eq!(r.degree(), 14);
        let a4 = &residual_cubic_coefficients(x.first(), &q)[3];
        for v in [[0.3, -1.2, 0.5], [1.0, 0.1, 2.0]] {
            let v: Vec<C64> = v.iter().map(|&t| C64::new(t, 0.2 * t)).collect();
            let lhs = r.eval_c64(&v);
            let rhs = a4.eval(&v) * d.eval_c64(&v);
            assert!((lhs + rhs).norm() <= 1e-9 * lhs.norm());
        }
    }
}
