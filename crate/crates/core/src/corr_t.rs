//! The contact correspondence T on a (2,3) complete intersection in P^4:
//! triples (p, q, r) with `X . T_pX = 4p + q + r`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::corr_j::{PathSummary, RejectedCandidate};
use crate::divisor::{DivisorPoint, IntersectionDivisor};
use crate::error::{Error, Result};
use crate::geom::{self, Frame, LinearSubspace, ProjectivePoint};
use crate::homotopy::{solve_total_degree, AffineChart, PathStatus, PolySystem, TrackOptions};
use crate::linalg::SvdSplit;
use crate::poly::roots::companion_roots;
use crate::poly::{resultant, roots_with_multiplicities, Form, Poly, UPoly, C64};
use crate::surfaces::{SurfaceKind, SurfaceModel};

fn random_unitary(seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x756e_6974);
    let m = DMatrix::from_fn(3, 3, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let q = m.qr().q();
    (0..3).map(|j| (0..3).map(|i| q[(i, j)]).collect()).collect()
}

enum FrameOutcome {
    Done(IntersectionDivisor),
    ZeroResultant,
    NotGeneric,
}

/// Intersection divisor of two plane curves, with multiplicities summing
/// to `d1 d2`.
///
/// In random unitary coordinates the resultant in the last variable is a
/// binary form of degree `d1 d2`; each of its root clusters lies under a
/// single intersection point, whose local intersection number is the
/// cluster size.
pub fn plane_curve_intersection(c1: &Form, c2: &Form, tol: &Tolerances) -> Result<IntersectionDivisor> {
    plane_curve_intersection_in_frames(c1, c2, &[1, 2], tol)
}

/// Same as [`plane_curve_intersection`] with caller-chosen frame seeds, for
/// re-certification in fresh coordinates.
pub fn plane_curve_intersection_in_frames(c1: &Form, c2: &Form, frame_seeds: &[u64], tol: &Tolerances) -> Result<IntersectionDivisor> {
    if c1.nvars() != 3 || c2.nvars() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: c1.nvars().max(c2.nvars()) });
    }
    if c1.is_zero() || c2.is_zero() || c1.degree() == 0 || c2.degree() == 0 {
        return Err(Error::ZeroPolynomial);
    }
    let mut zero_frames = 0;
    for &seed in frame_seeds {
        match intersect_in_frame(c1, c2, &random_unitary(seed), tol)? {
            FrameOutcome::Done(d) => return Ok(d),
            FrameOutcome::ZeroResultant => zero_frames += 1,
            FrameOutcome::NotGeneric => {}
        }
    }
    if zero_frames == frame_seeds.len() {
        return Err(Error::CommonComponent);
    }
    Err(Error::Degenerate("resultant degenerated in every tried frame".into()))
}

fn intersect_in_frame(c1: &Form, c2: &Form, cols: &[Vec<C64>], tol: &Tolerances) -> Result<FrameOutcome> {
    let g1 = c1.compose_linear(cols);
    let g2 = c2.compose_linear(cols);
    let (d1, d2) = (c1.degree(), c2.degree());
    let total = (d1 * d2) as usize;
    let r = resultant(g1.poly(), g2.poly(), 2)?;
    let scale = g1.l1_norm().powi(d2 as i32) * g2.l1_norm().powi(d1 as i32);
    if r.max_coeff() <= tol.eps_cert * scale {
        return Ok(FrameOutcome::ZeroResultant);
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); total + 1];
    for (e, c) in r.terms() {
        coeffs[e[0] as usize] += *c;
    }
    let roots = roots_with_multiplicities(&UPoly::new(coeffs), tol.eps_cluster, tol.eps_cert)?;
    let mut bases: Vec<([C64; 2], usize, f64)> = roots.roots.iter().map(|rc| ([rc.value, C64::new(1.0, 0.0)], rc.multiplicity, rc.residual)).collect();
    if roots.degree_at_infinity > 0 {
        bases.push(([C64::new(1.0, 0.0), C64::new(0.0, 0.0)], roots.degree_at_infinity, 0.0));
    }
    let to_ambient = |y: &[C64]| -> Vec<C64> { (0..3).map(|i| (0..3).map(|j| y[j] * cols[j][i]).sum()).collect() };
    let mut points = Vec::new();
    for (base, m, rres) in bases {
        let h1 = fiber_poly(&g1, base);
        let h2 = fiber_poly(&g2, base);
        let mut cands = Vec::new();
        for h in [&h1, &h2] {
            let ht = h.trim();
            if ht.degree().unwrap_or(0) > 0 {
                cands.extend(companion_roots(&ht)?);
            }
        }
        // Scored on the plane point itself, so a root of one fiber
        // polynomial far out along y2 cannot pass on a relative technicality.
        let score = |y2: C64| -> f64 {
            let u = crate::linalg::unit(&[base[0], base[1], y2]);
            g1.relative_residual(&u).max(g2.relative_residual(&u))
        };
        let mut scored: Vec<(f64, C64)> = cands.into_iter().map(|y| (score(y), y)).collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let Some(&(best_score, best)) = scored.first() else { return Ok(FrameOutcome::NotGeneric) };
        // Two distinct common points over one base point: not a generic frame.
        let loose = tol.eps_cert.sqrt();
        if scored.iter().any(|&(s, y)| s <= loose.min(best_score.max(tol.eps_cert) * 1e3) && (y - best).norm() > 1e-3 * (1.0 + best.norm())) {
            return Ok(FrameOutcome::NotGeneric);
        }
        let point = ProjectivePoint::new(to_ambient(&[base[0], base[1], best]))?.normalized();
        let u = point.unit();
        let residual = rres.max(c1.relative_residual(&u)).max(c2.relative_residual(&u));
        points.push(DivisorPoint { point, multiplicity: m, residual });
    }
    let div = IntersectionDivisor { points };
    if div.degree() != total {
        return Ok(FrameOutcome::NotGeneric);
    }
    Ok(FrameOutcome::Done(div))
}

/// `y2 -> g(b0, b1, y2)`.
fn fiber_poly(g: &Form, base: [C64; 2]) -> UPoly<C64> {
    let mut c = vec![C64::new(0.0, 0.0); g.degree() as usize + 1];
    for (e, v) in g.poly().terms() {
        c[e[2] as usize] += v * base[0].powu(e[0]) * base[1].powu(e[1]);
    }
    UPoly::new(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactTriple {
    pub p: ProjectivePoint,
    pub q: ProjectivePoint,
    pub r: ProjectivePoint,
    pub plane: LinearSubspace,
    pub divisor: IntersectionDivisor,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TDegeneracy {
    /// The conic section of A is a double line.
    ConicCusp,
    /// The cubic section of B has a cusp at p.
    CubicCusp,
    /// The cubic section of B has a triple point at p.
    CubicTriplePoint,
    /// Conic and cubic share a tangent line at p.
    SharedTangent,
    /// q = r.
    ResidualDoublePoint,
    /// The intersection multiplicity at p is not 4.
    MultiplicityMismatch,
    /// p, q, r do not span a plane.
    Collinear,
    /// The divisor did not pass the residual threshold.
    CertificateMismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct TDegenerateReport {
    pub kind: TDegeneracy,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TFiberFirst {
    pub p: ProjectivePoint,
    pub plane: LinearSubspace,
    /// Full intersection of the conic and cubic sections, in P^4.
    pub intersection: IntersectionDivisor,
    pub total_degree: usize,
    pub triple: Option<ContactTriple>,
    pub degenerate: Vec<TDegenerateReport>,
}

fn ci23(x: &SurfaceModel) -> Result<(&Form, &Form)> {
    match x.kind() {
        SurfaceKind::CompleteIntersection23P4 => Ok((x.first(), x.cubic().expect("complete intersection has a cubic"))),
        _ => Err(Error::InvalidInput("T is defined on (2,3) complete intersections".into())),
    }
}

/// Quadratic part `(a, b, c)` of a plane form at `u`, in an orthonormal
/// frame `d1, d2` of the complement of `u`.
fn quadratic_part(g: &Form, u: &[C64], d: &[Vec<C64>]) -> (C64, C64, C64) {
    let subs: Vec<Poly<C64>> = (0..3).map(|i| Poly::affine(&[d[0][i], d[1][i]], u[i])).collect();
    let q = g.poly().compose(&subs).homogeneous_part(2);
    (q.coeff(&[2, 0]), q.coeff(&[1, 1]), q.coeff(&[0, 2]))
}

fn relative_discriminant((a, b, c): (C64, C64, C64)) -> f64 {
    let s = a.norm() + b.norm() + c.norm();
    if s == 0.0 {
        0.0
    } else {
        (b * b - a * c * 4.0).norm() / (s * s)
    }
}

/// Relative resultant of two binary quadrics: zero iff they share a root.
fn quadric_pair_resultant((a, b, c): (C64, C64, C64), (e, f, g): (C64, C64, C64)) -> f64 {
    let r = (a * g - e * c) * (a * g - e * c) - (a * f - e * b) * (b * g - f * c);
    let s1 = a.norm() + b.norm() + c.norm();
    let s2 = e.norm() + f.norm() + g.norm();
    r.norm() / (s1 * s1 * s2 * s2)
}

/// The fiber of the first projection over `p`: the residual points q, r of
/// the tangent plane section.
pub fn t_fiber_first(x: &SurfaceModel, p: &ProjectivePoint, tol: &Tolerances) -> Result<TFiberFirst> {
    t_fiber_first_in_frames(x, p, &[1, 2], tol)
}

pub fn t_fiber_first_in_frames(x: &SurfaceModel, p: &ProjectivePoint, frame_seeds: &[u64], tol: &Tolerances) -> Result<TFiberFirst> {
    let (a, b) = ci23(x)?;
    let plane = geom::tangent_space(x, p, tol)?;
    let frame = geom::plane_coordinates(&plane, tol.eps_rank)?;
    let ap = frame.pull_form(a);
    let bp = frame.pull_form(b);
    if ap.max_coeff_relative(a) <= tol.eps_cert {
        return Err(Error::Degenerate("tangent plane lies in the quadric".into()));
    }
    if bp.max_coeff_relative(b) <= tol.eps_cert {
        return Err(Error::Degenerate("tangent plane lies in the cubic".into()));
    }
    let pu = frame.pullback(p).unit();
    let ortho = SvdSplit::new(&[pu.iter().map(|c| c.conj()).collect()], 3).null_space(1);
    let qa = quadratic_part(&ap, &pu, &ortho);
    let qb = quadratic_part(&bp, &pu, &ortho);
    let mut degenerate = Vec::new();
    let push = |v: &mut Vec<TDegenerateReport>, kind, detail: String| v.push(TDegenerateReport { kind, detail });
    let sb = qb.0.norm() + qb.1.norm() + qb.2.norm();
    if sb <= tol.eps_cert * bp.l1_norm() {
        push(&mut degenerate, TDegeneracy::CubicTriplePoint, "quadratic part of the cubic vanishes".into());
    } else if relative_discriminant(qb) <= tol.eps_cert {
        push(&mut degenerate, TDegeneracy::CubicCusp, format!("discriminant {:e}", relative_discriminant(qb)));
    }
    if relative_discriminant(qa) <= tol.eps_cert {
        push(&mut degenerate, TDegeneracy::ConicCusp, format!("discriminant {:e}", relative_discriminant(qa)));
    }
    if degenerate.is_empty() && quadric_pair_resultant(qa, qb) <= tol.eps_cert {
        push(&mut degenerate, TDegeneracy::SharedTangent, format!("cone resultant {:e}", quadric_pair_resultant(qa, qb)));
    }

    let local = plane_curve_intersection_in_frames(&ap, &bp, frame_seeds, tol)?;
    let total_degree = local.degree();
    let intersection = IntersectionDivisor {
        points: local
            .points
            .iter()
            .map(|d| DivisorPoint { point: frame.map(d.point.coords()).normalized(), multiplicity: d.multiplicity, residual: d.residual })
            .collect(),
    };
    let mut triple = None;
    let m = intersection.multiplicity_at(p, tol.point_match());
    let rest = intersection.residual_part(&[p], tol.point_match());
    if m != 4 {
        push(&mut degenerate, TDegeneracy::MultiplicityMismatch, format!("multiplicity {} at p", m));
    } else if rest.len() != 2 {
        push(
            &mut degenerate,
            TDegeneracy::ResidualDoublePoint,
            format!("residual multiplicities {:?}", rest.iter().map(|d| d.multiplicity).collect::<Vec<_>>()),
        );
    } else if degenerate.is_empty() {
        let (q, r) = (rest[0].point.clone(), rest[1].point.clone());
        let span = geom::span(&[p.clone(), q.clone(), r.clone()], tol.eps_rank)?;
        let residual = intersection.max_residual();
        if span.degenerate {
            push(&mut degenerate, TDegeneracy::Collinear, "p, q, r are collinear".into());
        } else if residual > tol.eps_cert {
            push(&mut degenerate, TDegeneracy::CertificateMismatch, format!("residual {:e}", residual));
        } else {
            triple = Some(ContactTriple { p: p.clone(), q, r, plane: plane.clone(), divisor: intersection.clone(), residual });
        }
    }
    Ok(TFiberFirst { p: p.clone(), plane, intersection, total_degree, triple, degenerate })
}

/// Re-derives the divisor of a triple in fresh plane coordinates.
pub fn recertify_triple(x: &SurfaceModel, t: &ContactTriple, tol: &Tolerances) -> Result<ContactTriple> {
    let fib = t_fiber_first_in_frames(x, &t.p, &[17, 29, 31], tol)?;
    let again = fib.triple.ok_or_else(|| Error::CertificateFailed(format!("{:?}", fib.degenerate.first().map(|d| d.kind))))?;
    let same = (again.q.same_as(&t.q, tol.point_match()) && again.r.same_as(&t.r, tol.point_match()))
        || (again.q.same_as(&t.r, tol.point_match()) && again.r.same_as(&t.q, tol.point_match()));
    if !same {
        return Err(Error::CertificateFailed("residual points moved under a frame change".into()));
    }
    Ok(again)
}

trait RelativeSize {
    fn max_coeff_relative(&self, parent: &Form) -> f64;
}

impl RelativeSize for Form {
    fn max_coeff_relative(&self, parent: &Form) -> f64 {
        self.poly().max_coeff() / parent.l1_norm().max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TSearchReport {
    pub q: ProjectivePoint,
    pub r: ProjectivePoint,
    pub triples: Vec<ContactTriple>,
    pub paths_tracked: usize,
    pub runs: usize,
    pub paths: Vec<PathSummary>,
    pub rejected: Vec<RejectedCandidate>,
}

/// Searches for points `p` with `q, r ∈ T_pX`, certified through
/// [`t_fiber_first`]. `budget` caps the number of tracked paths. The
/// result is not guaranteed complete.
pub fn t_fiber_second_search(x: &SurfaceModel, q: &ProjectivePoint, r: &ProjectivePoint, budget: usize, seed: u64, tol: &Tolerances) -> Result<TSearchReport> {
    let (a, b) = ci23(x)?;
    x.check_on_surface(q, tol)?;
    x.check_on_surface(r, tol)?;
    if q.same_as(r, tol.point_match()) {
        return Err(Error::Precondition("q and r coincide".into()));
    }
    let (qu, ru) = (q.unit(), r.unit());
    let aq = a.polar(&qu);
    let ar = a.polar(&ru);
    let bq = b.polar(&qu);
    let br = b.polar(&ru);
    let conditions = [aq.clone(), ar.clone(), bq.clone(), br.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7473_6561);
    let mut triples: Vec<ContactTriple> = Vec::new();
    let mut rejected: Vec<RejectedCandidate> = Vec::new();
    let mut paths = Vec::new();
    let mut tracked = 0;
    let mut runs = 0;
    let mut agree = 0;
    while tracked < budget {
        runs += 1;
        let chart = AffineChart::random(&mut rng, 5);
        let coords = chart.coordinate_polys();
        let mix = |f: &Form, g: &Form, rng: &mut ChaCha8Rng| -> Poly<C64> {
            let s = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let t = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            f.poly().scale(&s) + g.poly().scale(&t)
        };
        let lin = mix(&aq, &ar, &mut rng).compose(&coords);
        let quad = mix(&bq, &br, &mut rng).compose(&coords);
        let sys = PolySystem::new(vec![a.poly().compose(&coords), b.poly().compose(&coords), lin, quad])?;
        let ends = solve_total_degree(&sys, seed.wrapping_add(runs as u64 * 104_729), &TrackOptions::default());
        tracked += ends.len();
        let before = triples.len();
        let mut summary = PathSummary::default();
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
            if triples.iter().any(|t| t.p.same_as(&p, tol.point_match())) || rejected.iter().any(|t| t.point.same_as(&p, tol.point_match())) {
                continue;
            }
            let pu = p.unit();
            let worst = conditions.iter().map(|c| c.relative_residual(&pu)).fold(0.0, f64::max);
            if worst > tol.eps_cert.sqrt() {
                continue;
            }
            match t_fiber_first(x, &p, tol) {
                Ok(fib) => match fib.triple {
                    Some(t)
                        if (t.q.same_as(q, tol.point_match()) && t.r.same_as(r, tol.point_match()))
                            || (t.q.same_as(r, tol.point_match()) && t.r.same_as(q, tol.point_match())) =>
                    {
                        triples.push(t)
                    }
                    Some(_) => rejected.push(RejectedCandidate { point: p, reason: "tangent section has other residual points".into() }),
                    None => rejected
                        .push(RejectedCandidate { point: p, reason: format!("degenerate: {:?}", fib.degenerate.iter().map(|d| d.kind).collect::<Vec<_>>()) }),
                },
                Err(err) => rejected.push(RejectedCandidate { point: p, reason: err.to_string() }),
            }
        }
        paths.push(summary);
        // Two consecutive runs without anything new: stop early.
        if triples.len() == before && runs > 1 {
            agree += 1;
            if agree >= 2 {
                break;
            }
        } else {
            agree = 0;
        }
    }
    triples.sort_by(|s, t| s.p.coords()[0].re.partial_cmp(&t.p.coords()[0].re).unwrap());
    Ok(TSearchReport { q: q.clone(), r: r.clone(), triples, paths_tracked: tracked, runs, paths, rejected })
}

/// Frame of the plane section, exposed for certificate re-use.
pub fn tangent_plane_frame(x: &SurfaceModel, p: &ProjectivePoint, tol: &Tolerances) -> Result<(LinearSubspace, Frame)> {
    let plane = geom::tangent_space(x, p, tol)?;
    let frame = geom::plane_coordinates(&plane, tol.eps_rank)?;
    Ok((plane, frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::poly::HomogeneousForm;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn form(terms: &[(&[u32], f64)], d: u32) -> Form {
        HomogeneousForm::from_terms(3, d, terms.iter().map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0)))).unwrap()
    }

    #[test]
    fn two_conics_meet_in_four_points() {
        // x^2 + y^2 - z^2 and x^2 - 2 y^2 + z^2 / 3.
        let c1 = form(&[(&[2, 0, 0], 1.0), (&[0, 2, 0], 1.0), (&[0, 0, 2], -1.0)], 2);
        let c2 = form(&[(&[2, 0, 0], 1.0), (&[0, 2, 0], -2.0), (&[0, 0, 2], 1.0 / 3.0)], 2);
        let d = plane_curve_intersection(&c1, &c2, &tol()).unwrap();
        assert_eq!(d.degree(), 4);
        assert_eq!(d.points.len(), 4);
        for p in &d.points {
            assert_eq!(p.multiplicity, 1);
            assert!(c1.relative_residual(&p.point.unit()) < 1e-12);
            assert!(c2.relative_residual(&p.point.unit()) < 1e-12);
        }
    }

    #[test]
    fn nodal_conic_and_cubic_meet_four_times_at_node() {
        // Conic xy, cubic (x - y)(x + 2y) z + x^3 + y^3: both nodal at (0:0:1).
        let c1 = form(&[(&[1, 1, 0], 1.0)], 2);
        let c2 = form(&[(&[2, 0, 1], 1.0), (&[1, 1, 1], 1.0), (&[0, 2, 1], -2.0), (&[3, 0, 0], 1.0), (&[0, 3, 0], 1.0)], 3);
        let d = plane_curve_intersection(&c1, &c2, &tol()).unwrap();
        assert_eq!(d.degree(), 6);
        let node = ProjectivePoint::real(&[0.0, 0.0, 1.0]);
        assert_eq!(d.multiplicity_at(&node, 1e-6), 4);
        // Residual points: on x = 0 the cubic is y^2 (y - 2z); on y = 0 it is x^2 (x + z).
        assert_eq!(d.multiplicity_at(&ProjectivePoint::real(&[0.0, 2.0, 1.0]), 1e-6), 1);
        assert_eq!(d.multiplicity_at(&ProjectivePoint::real(&[-1.0, 0.0, 1.0]), 1e-6), 1);
    }

    #[test]
    fn common_component_detected() {
        let c1 = form(&[(&[2, 0, 0], 1.0), (&[0, 2, 0], 1.0), (&[0, 0, 2], -1.0)], 2);
        let l = form(&[(&[1, 0, 0], 1.0), (&[0, 0, 1], 2.0)], 1);
        let c2 = c1.mul(&l);
        assert!(matches!(plane_curve_intersection(&c1, &c2, &tol()), Err(Error::CommonComponent)));
    }

    #[test]
    fn generic_tangent_section() {
        let x = SurfaceModel::random_ci23(1);
        for seed in 0..4 {
            let p = x.sample_point(seed, &tol()).unwrap();
            let fib = t_fiber_first(&x, &p, &tol()).unwrap();
            assert_eq!(fib.total_degree, 6);
            let t = fib.triple.expect("generic point gives a contact triple");
            assert!(t.divisor.equals(&[(p.clone(), 4), (t.q.clone(), 1), (t.r.clone(), 1)], 1e-6));
            assert!(!t.q.same_as(&t.r, 1e-6));
            let again = recertify_triple(&x, &t, &tol()).unwrap();
            assert_eq!(again.divisor.degree(), 6);
        }
    }

    /// Residual points from the line pair of the conic: along each line
    /// `p + t e` the cubic is `t^2 (Q(e) + t C(e))`, so the second point is
    /// at `t = -Q(e) / C(e)`.
    #[test]
    fn residual_points_match_line_pair_oracle() {
        let x = SurfaceModel::random_ci23(2);
        let p = x.sample_point(3, &tol()).unwrap();
        let fib = t_fiber_first(&x, &p, &tol()).unwrap();
        let t = fib.triple.unwrap();
        let (_, frame) = tangent_plane_frame(&x, &p, &tol()).unwrap();
        let ap = frame.pull_form(x.first());
        let bp = frame.pull_form(x.cubic().unwrap());
        let pu = frame.pullback(&p).unit();
        let ortho = SvdSplit::new(&[pu.iter().map(|c| c.conj()).collect()], 3).null_space(1);
        let (a, b, c) = quadratic_part(&ap, &pu, &ortho);
        let disc = (b * b - a * c * 4.0).sqrt();
        for s in [(-b + disc) / (a * 2.0), (-b - disc) / (a * 2.0)] {
            let e: Vec<C64> = (0..3).map(|i| ortho[0][i] * s + ortho[1][i]).collect();
            let g = bp.restrict_to_line(&pu, &e).unwrap();
            let tt = -g.coeffs()[2] / g.coeffs()[3];
            let point = frame.map(&linalg::axpy(tt, &e, &pu));
            assert!(point.same_as(&t.q, 1e-6) || point.same_as(&t.r, 1e-6));
        }
    }
}
