//! The three explicit K3 models, point sampling and smoothness checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geom::{self, Frame, LinearSubspace, ProjectivePoint};
use crate::linalg::{self, SvdSplit};
use crate::poly::json::FormJson;
use crate::poly::roots::companion_roots;
use crate::poly::{monomials, rational, ExactForm, Form, HomogeneousForm, Poly, Rational, Scalar, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    #[serde(rename = "quartic_p3")]
    QuarticP3,
    #[serde(rename = "ci23_p4")]
    CompleteIntersection23P4,
    #[serde(rename = "double_sextic")]
    DoubleSexticCover,
}

impl SurfaceKind {
    /// (number of variables, degree) of each defining form.
    fn signature(self) -> &'static [(usize, u32)] {
        match self {
            SurfaceKind::QuarticP3 => &[(4, 4)],
            SurfaceKind::CompleteIntersection23P4 => &[(5, 2), (5, 3)],
            SurfaceKind::DoubleSexticCover => &[(3, 6)],
        }
    }

    /// Length of a point's coordinate vector. Double-cover points are
    /// `(x, y, z, w)` with `w` of weight 3.
    pub fn point_len(self) -> usize {
        match self {
            SurfaceKind::QuarticP3 | SurfaceKind::DoubleSexticCover => 4,
            SurfaceKind::CompleteIntersection23P4 => 5,
        }
    }
}

/// A K3 surface given by explicit equations.
#[derive(Clone, Debug)]
pub struct SurfaceModel {
    kind: SurfaceKind,
    forms: Vec<Form>,
    exact: Option<Vec<ExactForm>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub model: SurfaceKind,
    pub forms: Vec<FormJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub smooth: bool,
    /// Smallest singular value of the scale-normalised Jacobian.
    pub gradient_ratio: f64,
}

impl SurfaceModel {
    pub fn new(kind: SurfaceKind, forms: Vec<Form>) -> Result<Self> {
        Self::check_signature(kind, forms.iter().map(|f| (f.nvars(), f.degree())))?;
        Ok(SurfaceModel { kind, forms, exact: None })
    }

    pub fn new_exact(kind: SurfaceKind, forms: Vec<ExactForm>) -> Result<Self> {
        Self::check_signature(kind, forms.iter().map(|f| (f.nvars(), f.degree())))?;
        Ok(SurfaceModel { kind, forms: forms.iter().map(|f| f.to_c64()).collect(), exact: Some(forms) })
    }

    fn check_signature(kind: SurfaceKind, sig: impl Iterator<Item = (usize, u32)>) -> Result<()> {
        let got: Vec<(usize, u32)> = sig.collect();
        if got != kind.signature() {
            return Err(Error::InvalidInput(format!("{:?} needs forms {:?}, got {:?}", kind, kind.signature(), got)));
        }
        Ok(())
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn exact_forms(&self) -> Option<&[ExactForm]> {
        self.exact.as_deref()
    }

    /// The quartic F, the quadric A, or the sextic f6.
    pub fn first(&self) -> &Form {
        &self.forms[0]
    }

    /// The cubic B of a complete intersection.
    pub fn cubic(&self) -> Option<&Form> {
        match self.kind {
            SurfaceKind::CompleteIntersection23P4 => Some(&self.forms[1]),
            _ => None,
        }
    }

    pub fn to_json(&self) -> SurfaceJson {
        let forms = match &self.exact {
            Some(ex) => ex.iter().map(FormJson::from_exact).collect(),
            None => self.forms.iter().map(FormJson::from_float).collect(),
        };
        SurfaceJson { model: self.kind, forms }
    }

    pub fn from_json(j: &SurfaceJson) -> Result<Self> {
        let parsed = j.forms.iter().map(|f| f.parse()).collect::<Result<Vec<_>>>()?;
        if parsed.iter().all(|f| f.exact().is_some()) {
            Self::new_exact(j.model, parsed.iter().map(|f| f.exact().unwrap().clone()).collect())
        } else {
            Self::new(j.model, parsed.iter().map(|f| f.to_c64()).collect())
        }
    }

    /// Random surface with independent rational coefficients of height at most 100.
    pub fn random(kind: SurfaceKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4b33_636f_7272);
        let forms = kind.signature().iter().map(|&(n, d)| random_exact_form(&mut rng, n, d, 100)).collect();
        Self::new_exact(kind, forms).expect("signature matches")
    }

    pub fn random_quartic(seed: u64) -> Self {
        Self::random(SurfaceKind::QuarticP3, seed)
    }

    pub fn random_ci23(seed: u64) -> Self {
        Self::random(SurfaceKind::CompleteIntersection23P4, seed)
    }

    pub fn random_double_sextic(seed: u64) -> Self {
        Self::random(SurfaceKind::DoubleSexticCover, seed)
    }

    /// x^4 + y^4 + z^4 + w^4.
    pub fn fermat_quartic() -> Self {
        let terms = (0..4).map(|i| {
            let mut e = vec![0; 4];
            e[i] = 4;
            (e, rational(1, 1))
        });
        Self::new_exact(SurfaceKind::QuarticP3, vec![HomogeneousForm::from_terms(4, 4, terms).unwrap()]).unwrap()
    }

    /// A quartic `w G3 + q2 Q2` containing the conic `{w = 0, q2 = 0}`,
    /// with `q2` a ternary quadric in x, y, z.
    pub fn quartic_with_conic(seed: u64) -> (Self, PlaneCurve) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x63_6f6e_6963);
        let g3 = random_exact_form(&mut rng, 4, 3, 100);
        let q2_ternary = random_exact_form(&mut rng, 3, 2, 100);
        let q2 = HomogeneousForm::new(2, Poly::from_terms(4, q2_ternary.poly().terms().map(|(e, c)| (vec![e[0], e[1], e[2], 0], c.clone())))).unwrap();
        let big_q2 = random_exact_form(&mut rng, 4, 2, 100);
        let w = HomogeneousForm::linear(&[rational(0, 1), rational(0, 1), rational(0, 1), rational(1, 1)]);
        let f = w.mul(&g3).add(&q2.mul(&big_q2)).unwrap();
        let surface = Self::new_exact(SurfaceKind::QuarticP3, vec![f]).unwrap();
        let curve = PlaneCurve { plane: vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)], extra: vec![q2.to_c64()] };
        (surface, curve)
    }

    /// A (2,3) complete intersection on which two tangent plane sections
    /// share their residual points: `X . T_pX = 4p + q + r` and
    /// `X . T_p'X = 4p' + q + r`, with the planes meeting in the line qr.
    ///
    /// The quadric restricts to the line pair `pq . pr` on `span(p, q, r)`
    /// (and likewise for p'), the cubic is nodal at p and p' on the two
    /// planes and passes through q, r. All conditions are linear in the
    /// coefficients, so a random exact member of the solution space is
    /// drawn.
    pub fn ci23_with_shared_tangent_line(seed: u64) -> (Self, SharedTangentLine) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7368_6172_6564);
        let pt = |rng: &mut ChaCha8Rng| -> Vec<Rational> { (0..5).map(|_| rational(rng.random_range(-4..=4), 1)).collect() };
        let (p, pp, q, r) = (pt(&mut rng), pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let polar_row = |d: u32, u: &[Rational], v: &[Rational]| -> Vec<Rational> {
            monomials(5, d)
                .iter()
                .map(|e| {
                    let m = HomogeneousForm::from_terms(5, d, [(e.clone(), rational(1, 1))]).unwrap();
                    (0..5).map(|i| m.partial(i).eval(u) * v[i].clone()).fold(rational(0, 1), |a, b| a + b)
                })
                .collect()
        };
        let value_row = |d: u32, u: &[Rational]| -> Vec<Rational> {
            monomials(5, d).iter().map(|e| HomogeneousForm::from_terms(5, d, [(e.clone(), rational(1, 1))]).unwrap().eval(u)).collect()
        };
        let mut quad_rows = Vec::new();
        for u in [&p, &pp, &q, &r] {
            quad_rows.push(value_row(2, u));
        }
        for u in [&p, &pp] {
            quad_rows.push(polar_row(2, u, &q));
            quad_rows.push(polar_row(2, u, &r));
        }
        let mut cubic_rows = Vec::new();
        for u in [&p, &pp, &q, &r] {
            cubic_rows.push(value_row(3, u));
        }
        for u in [&p, &pp] {
            cubic_rows.push(polar_row(3, u, &q));
            cubic_rows.push(polar_row(3, u, &r));
        }
        let mut draw = |rows: &[Vec<Rational>], d: u32| -> ExactForm {
            let kernel = rational_kernel(rows);
            let mut coeffs = vec![rational(0, 1); rows[0].len()];
            for k in &kernel {
                let c = rational(rng.random_range(-9..=9), 1);
                for (a, b) in coeffs.iter_mut().zip(k) {
                    *a = a.clone() + c.clone() * b.clone();
                }
            }
            HomogeneousForm::from_terms(5, d, monomials(5, d).into_iter().zip(coeffs)).unwrap()
        };
        let a = draw(&quad_rows, 2);
        let b = draw(&cubic_rows, 3);
        let surface = Self::new_exact(SurfaceKind::CompleteIntersection23P4, vec![a, b]).expect("signature matches");
        let to_point = |v: &[Rational]| ProjectivePoint::new(v.iter().map(|c| c.to_c64()).collect()).expect("nonzero integer point").normalized();
        let config = SharedTangentLine { p: to_point(&p), p_prime: to_point(&pp), q: to_point(&q), r: to_point(&r) };
        (surface, config)
    }

    /// Largest relative residual of the defining equations at `p`.
    pub fn residual(&self, p: &ProjectivePoint) -> Result<f64> {
        if p.len() != self.kind.point_len() {
            return Err(Error::DimensionMismatch { expected: self.kind.point_len(), found: p.len() });
        }
        let x = p.coords();
        Ok(match self.kind {
            SurfaceKind::DoubleSexticCover => {
                let (v, s) = self.forms[0].poly().eval_with_abs(&x[..3]);
                let w2 = x[3] * x[3];
                let scale = s + w2.norm();
                if scale == 0.0 {
                    0.0
                } else {
                    (w2 - v).norm() / scale
                }
            }
            _ => {
                let u = p.unit();
                self.forms.iter().map(|f| f.relative_residual(&u)).fold(0.0, f64::max)
            }
        })
    }

    pub fn check_on_surface(&self, p: &ProjectivePoint, tol: &Tolerances) -> Result<()> {
        let r = self.residual(p)?;
        if r > tol.eps_cert {
            return Err(Error::NotOnSurface { residual: r });
        }
        Ok(())
    }

    /// Gradients of the defining forms at `p` (unit-normalised for the
    /// projective models; weighted gradient of `w^2 - f6` for the cover).
    pub fn gradients(&self, p: &ProjectivePoint) -> Result<Vec<Vec<C64>>> {
        if p.len() != self.kind.point_len() {
            return Err(Error::DimensionMismatch { expected: self.kind.point_len(), found: p.len() });
        }
        Ok(match self.kind {
            SurfaceKind::DoubleSexticCover => {
                let x = p.coords();
                let mut g: Vec<C64> = self.forms[0].gradient().iter().map(|d| -d.eval_c64(&x[..3])).collect();
                g.push(x[3] * 2.0);
                vec![g]
            }
            _ => {
                let u = p.unit();
                self.forms.iter().map(|f| f.gradient().iter().map(|d| d.eval_c64(&u)).collect()).collect()
            }
        })
    }

    /// Full-rank test of the Jacobian, normalised by the size of the terms.
    pub fn is_smooth_at(&self, p: &ProjectivePoint, tol: &Tolerances) -> Result<SmoothnessReport> {
        self.check_on_surface(p, tol)?;
        let rows: Vec<Vec<C64>> = match self.kind {
            SurfaceKind::DoubleSexticCover => {
                let x = p.coords();
                let grads = self.forms[0].gradient();
                let mut scale = 0.0;
                let mut g: Vec<C64> = grads
                    .iter()
                    .map(|d| {
                        let (v, s) = d.poly().eval_with_abs(&x[..3]);
                        scale += s;
                        -v
                    })
                    .collect();
                g.push(x[3] * 2.0);
                scale += 2.0 * x[3].norm();
                vec![g.iter().map(|c| c / scale.max(f64::MIN_POSITIVE)).collect()]
            }
            _ => {
                let u = p.unit();
                self.forms
                    .iter()
                    .map(|f| {
                        let grads = f.gradient();
                        let vals: Vec<(C64, f64)> = grads.iter().map(|d| d.poly().eval_with_abs(&u)).collect();
                        let scale: f64 = vals.iter().map(|v| v.1).sum::<f64>().max(f64::MIN_POSITIVE);
                        vals.iter().map(|v| v.0 / scale).collect()
                    })
                    .collect()
            }
        };
        let n = rows[0].len();
        let svd = SvdSplit::new(&rows, n);
        let ratio = svd.singular_values[rows.len() - 1];
        Ok(SmoothnessReport { smooth: ratio > tol.eps_rank, gradient_ratio: ratio })
    }

    /// A random point of the surface, deterministic in `seed`.
    pub fn sample_point(&self, seed: u64, tol: &Tolerances) -> Result<ProjectivePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0x73616d70);
        let mut last = f64::NAN;
        for _ in 0..32 {
            let cand = match self.kind {
                SurfaceKind::QuarticP3 => self.sample_quartic(&mut rng),
                SurfaceKind::CompleteIntersection23P4 => self.sample_ci23(&mut rng),
                SurfaceKind::DoubleSexticCover => self.sample_double_cover(&mut rng),
            };
            if let Some(p) = cand {
                let r = self.residual(&p)?;
                if r <= tol.eps_cert {
                    return Ok(p);
                }
                last = r;
            }
        }
        Err(Error::NonConvergence(format!("no sample point passed the residual check (last residual {:e})", last)))
    }

    fn sample_quartic(&self, rng: &mut ChaCha8Rng) -> Option<ProjectivePoint> {
        let a = random_vec(rng, 4);
        let b = random_vec(rng, 4);
        let g = self.forms[0].restrict_to_line(&a, &b).ok()?;
        let roots = companion_roots(&g).ok()?;
        if roots.is_empty() {
            return None;
        }
        let t = roots[rng.random_range(0..roots.len())];
        let p = ProjectivePoint::new(linalg::axpy(t, &b, &a)).ok()?;
        Some(polish_on_variety(&self.forms, &p, 3).normalized())
    }

    fn sample_ci23(&self, rng: &mut ChaCha8Rng) -> Option<ProjectivePoint> {
        let frame = Frame::from_basis(&[random_vec(rng, 5), random_vec(rng, 5), random_vec(rng, 5)]);
        let a = frame.pull_form(&self.forms[0]);
        let b = frame.pull_form(&self.forms[1]);
        // A point on the conic a = 0 from a random line.
        let o = random_vec(rng, 3);
        let v = random_vec(rng, 3);
        let q = a.restrict_to_line(&o, &v).ok()?;
        let s = *companion_roots(&q).ok()?.first()?;
        let c0 = linalg::axpy(s, &v, &o);
        // Lines through c0 with direction e(l) = v1 + l v2 meet the conic
        // again at beta(l) c0 - alpha(l) e(l).
        let v1 = random_vec(rng, 3);
        let v2 = random_vec(rng, 3);
        let grad: Vec<C64> = a.gradient().iter().map(|d| d.eval_c64(&c0)).collect();
        let alpha = Poly::affine(&[linalg::dot(&grad, &v2)], linalg::dot(&grad, &v1));
        let e: Vec<Poly<C64>> = (0..3).map(|i| Poly::affine(&[v2[i]], v1[i])).collect();
        let beta = a.poly().compose(&e);
        let param: Vec<Poly<C64>> = (0..3).map(|i| beta.scale(&c0[i]) - &alpha * &e[i]).collect();
        let sextic = b.poly().compose(&param).to_upoly();
        let roots = companion_roots(&sextic.trim()).ok()?;
        if roots.is_empty() {
            return None;
        }
        let l = roots[rng.random_range(0..roots.len())];
        let u: Vec<C64> = param.iter().map(|p| p.eval(&[l])).collect();
        let u = ProjectivePoint::new(u).ok()?;
        let p = frame.map(u.coords());
        Some(polish_on_variety(&self.forms, &p, 3).normalized())
    }

    fn sample_double_cover(&self, rng: &mut ChaCha8Rng) -> Option<ProjectivePoint> {
        let base = random_vec(rng, 3);
        let v = self.forms[0].eval_c64(&base);
        let mut w = v.sqrt();
        if rng.random_bool(0.5) {
            w = -w;
        }
        let mut c = base;
        c.push(w);
        Some(normalize_weighted(&ProjectivePoint::new(c).ok()?))
    }

    /// Points of the ramification curve `w = 0, f6 = 0` of a double cover.
    pub fn sample_ramification_point(&self, seed: u64, tol: &Tolerances) -> Result<ProjectivePoint> {
        if self.kind != SurfaceKind::DoubleSexticCover {
            return Err(Error::InvalidInput("ramification points exist only on the double cover".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7261_6d69);
        for _ in 0..32 {
            let a = random_vec(&mut rng, 3);
            let b = random_vec(&mut rng, 3);
            let g = self.forms[0].restrict_to_line(&a, &b)?;
            let roots = companion_roots(&g)?;
            let t = roots[rng.random_range(0..roots.len())];
            let base = ProjectivePoint::new(linalg::axpy(t, &b, &a))?;
            let base = polish_on_variety(&self.forms, &base, 3);
            let mut c = base.coords().to_vec();
            c.push(C64::new(0.0, 0.0));
            let p = normalize_weighted(&ProjectivePoint::new(c)?);
            if self.residual(&p)? <= tol.eps_cert {
                return Ok(p);
            }
        }
        Err(Error::NonConvergence("ramification sampling".into()))
    }

    /// Heuristic search for a line on a quartic. `None` does not prove the
    /// quartic is line-free.
    pub fn line_on_surface_witness(&self, trials: usize, seed: u64, tol: &Tolerances) -> Result<LineWitness> {
        if self.kind != SurfaceKind::QuarticP3 {
            return Err(Error::InvalidInput("line search is defined for quartic surfaces".into()));
        }
        let f = &self.forms[0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c69_6e65);
        let mut tried = 0;
        let charts = (trials / 25).max(1);
        for _ in 0..charts {
            let m: Vec<Vec<C64>> = (0..4).map(|_| random_vec(&mut rng, 4)).collect();
            let chart = LineChart::new(f, &m);
            for _ in 0..25.min(trials - tried) {
                tried += 1;
                let start = random_vec(&mut rng, 4);
                if let Some(z) = chart.solve(&start) {
                    let (u, v) = chart.line_points(&z);
                    let line = geom::span(&[u.clone(), v.clone()], tol.eps_rank)?;
                    let residual = line_restriction_residual(f, &u, &v);
                    if residual <= tol.eps_cert && !line.degenerate {
                        return Ok(LineWitness { line: Some(line), residual, trials: tried });
                    }
                }
                if tried >= trials {
                    break;
                }
            }
            if tried >= trials {
                break;
            }
        }
        Ok(LineWitness { line: None, residual: f64::NAN, trials: tried })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LineWitness {
    pub line: Option<LinearSubspace>,
    /// Relative size of the restriction of F to the line.
    pub residual: f64,
    pub trials: usize,
}

/// Largest coefficient of `t -> F(u + t v)` relative to the natural scale.
pub fn line_restriction_residual(f: &Form, u: &ProjectivePoint, v: &ProjectivePoint) -> f64 {
    let a = u.unit();
    let b = v.unit();
    let g = f.restrict_to_line(&a, &b).expect("matching dimension");
    let scale = f.l1_norm() * 2f64.powi(f.degree() as i32);
    g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

/// Lines `span(M(1,0,a,b), M(0,1,c,e))` in a random chart, with the five
/// coefficients of the restricted binary quartic as polynomials in (a,b,c,e).
struct LineChart {
    m: Vec<Vec<C64>>,
    eqs: Vec<Poly<C64>>,
    jac: Vec<Vec<Poly<C64>>>,
    scale: f64,
}

impl LineChart {
    fn new(f: &Form, m: &[Vec<C64>]) -> LineChart {
        // Variables: s, t, a, b, c, e.
        let zero = C64::new(0.0, 0.0);
        let subs: Vec<Poly<C64>> = (0..4)
            .map(|i| {
                let mut p = Poly::zero(6);
                p.add_term(vec![1, 0, 0, 0, 0, 0], m[0][i]);
                p.add_term(vec![1, 0, 1, 0, 0, 0], m[2][i]);
                p.add_term(vec![1, 0, 0, 1, 0, 0], m[3][i]);
                p.add_term(vec![0, 1, 0, 0, 0, 0], m[1][i]);
                p.add_term(vec![0, 1, 0, 0, 1, 0], m[2][i]);
                p.add_term(vec![0, 1, 0, 0, 0, 1], m[3][i]);
                p.add_term(vec![0; 6], zero);
                p
            })
            .collect();
        let g = f.poly().compose(&subs);
        let d = f.degree();
        let mut eqs = vec![Poly::zero(4); d as usize + 1];
        for (e, c) in g.terms() {
            eqs[e[1] as usize].add_term(e[2..].to_vec(), *c);
        }
        let jac = eqs.iter().map(|q| q.gradient()).collect();
        LineChart { m: m.to_vec(), eqs, jac, scale: f.l1_norm() }
    }

    /// Levenberg-Marquardt on the overdetermined system.
    fn solve(&self, start: &[C64]) -> Option<Vec<C64>> {
        let mut z = start.to_vec();
        let resid = |z: &[C64]| -> Vec<C64> { self.eqs.iter().map(|q| q.eval(z)).collect() };
        let mut r = resid(&z);
        let mut mu = 1e-3;
        for _ in 0..80 {
            let rn = linalg::norm(&r);
            let zscale = 1.0f64.max(linalg::norm(&z)).powi(4) * self.scale;
            if rn <= 1e-14 * zscale {
                return Some(z);
            }
            let j = DMatrix::from_fn(self.eqs.len(), 4, |i, k| self.jac[i][k].eval(&z));
            let jh = j.adjoint();
            let mut normal = &jh * &j;
            let diag_max = (0..4).map(|k| normal[(k, k)].norm()).fold(0.0, f64::max).max(1e-300);
            for k in 0..4 {
                normal[(k, k)] += C64::new(mu * diag_max, 0.0);
            }
            let rhs = -(&jh * nalgebra::DVector::from_column_slice(&r));
            let step = linalg::solve(&normal, rhs.as_slice())?;
            let cand: Vec<C64> = z.iter().zip(&step).map(|(a, b)| a + b).collect();
            let rc = resid(&cand);
            if linalg::norm(&rc) < rn {
                z = cand;
                r = rc;
                mu = (mu / 5.0).max(1e-15);
            } else {
                mu *= 4.0;
                if mu > 1e8 {
                    return None;
                }
            }
            if linalg::norm(&z) > 1e6 {
                return None;
            }
        }
        None
    }

    fn line_points(&self, z: &[C64]) -> (ProjectivePoint, ProjectivePoint) {
        let col = |w: [C64; 4]| -> ProjectivePoint {
            let v: Vec<C64> = (0..4).map(|i| (0..4).map(|k| w[k] * self.m[k][i]).sum()).collect();
            ProjectivePoint::new(v).expect("chart basis is invertible").normalized()
        };
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        (col([one, zero, z[0], z[1]]), col([zero, one, z[2], z[3]]))
    }
}

/// A curve on a quartic: the plane `{plane . x = 0}` intersected with the
/// extra forms (or with the surface when there are none).
#[derive(Clone, Debug)]
pub struct PlaneCurve {
    pub plane: Vec<C64>,
    pub extra: Vec<Form>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    /// The first form must be linear: the plane of the curve.
    pub forms: Vec<FormJson>,
}

impl PlaneCurve {
    pub fn from_json(j: &CurveJson) -> Result<Self> {
        let mut forms = j.forms.iter().map(|f| f.parse().map(|a| a.to_c64())).collect::<Result<Vec<_>>>()?;
        if forms.is_empty() || forms[0].degree() != 1 {
            return Err(Error::InvalidInput("curve needs a linear plane form first".into()));
        }
        let plane_form = forms.remove(0);
        let n = plane_form.nvars();
        let mut plane = vec![C64::new(0.0, 0.0); n];
        for (e, c) in plane_form.poly().terms() {
            plane[e.iter().position(|&k| k == 1).unwrap()] = *c;
        }
        Ok(PlaneCurve { plane, extra: forms })
    }

    pub fn to_json(&self) -> CurveJson {
        let mut forms = vec![FormJson::from_float(&HomogeneousForm::linear(&self.plane))];
        forms.extend(self.extra.iter().map(FormJson::from_float));
        CurveJson { forms }
    }

    /// All defining forms including the plane.
    pub fn defining_forms(&self) -> Vec<Form> {
        let mut v = vec![HomogeneousForm::linear(&self.plane)];
        v.extend(self.extra.iter().cloned());
        v
    }

    pub fn residual(&self, p: &ProjectivePoint) -> f64 {
        let u = p.unit();
        let plane = linalg::dot(&self.plane, &u).norm() / linalg::norm(&self.plane);
        self.extra.iter().map(|f| f.relative_residual(&u)).fold(plane, f64::max)
    }

    /// `count` points on the curve, each a root of the curve's equation on
    /// a random line of its plane.
    pub fn sample(&self, surface: &SurfaceModel, count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<ProjectivePoint>> {
        let n = self.plane.len();
        let h = geom::cut(std::slice::from_ref(&self.plane), n, tol.eps_rank)?;
        let frame = Frame::for_subspace(&h, tol.eps_rank)?;
        let eq = match self.extra.first() {
            Some(f) => frame.pull_form(f),
            None => frame.pull_form(surface.first()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6375_7276);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > 20 * count + 20 {
                return Err(Error::NonConvergence("curve sampling".into()));
            }
            let a = random_vec(&mut rng, frame.dim());
            let b = random_vec(&mut rng, frame.dim());
            let g = eq.restrict_to_line(&a, &b)?;
            for t in companion_roots(&g)? {
                if out.len() >= count {
                    break;
                }
                let u = linalg::axpy(t, &b, &a);
                let p = frame.map(&u);
                let mut forms = self.defining_forms();
                forms.push(surface.first().clone());
                let p = polish_on_variety(&forms, &p, 2).normalized();
                if surface.residual(&p)? <= tol.eps_cert && self.residual(&p) <= tol.eps_cert {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

/// The built-in configuration of [`SurfaceModel::ci23_with_shared_tangent_line`].
#[derive(Clone, Debug, Serialize)]
pub struct SharedTangentLine {
    pub p: ProjectivePoint,
    pub p_prime: ProjectivePoint,
    pub q: ProjectivePoint,
    pub r: ProjectivePoint,
}

/// Basis of the right kernel of a rational matrix, by exact row reduction.
fn rational_kernel(rows: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = rows[0].len();
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(k) = (row..a.len()).find(|&i| !num_traits::Zero::is_zero(&a[i][col])) else { continue };
        a.swap(row, k);
        let inv = rational(1, 1) / a[row][col].clone();
        for x in a[row].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..a.len() {
            if i != row && !num_traits::Zero::is_zero(&a[i][col]) {
                let f = a[i][col].clone();
                let pivot_row = a[row].clone();
                for (x, v) in a[i].iter_mut().zip(&pivot_row).take(n) {
                    *x = x.clone() - v.clone() * f.clone();
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![rational(0, 1); n];
            v[free] = rational(1, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][free].clone();
            }
            v
        })
        .collect()
}

/// `L^2 / 2 + 1` for an even positive self-intersection.
pub fn genus_of_polarization(l_squared: i64) -> Result<i64> {
    if l_squared <= 0 || l_squared % 2 != 0 {
        return Err(Error::InvalidInput(format!("L^2 must be even and positive, got {}", l_squared)));
    }
    Ok(l_squared / 2 + 1)
}

/// Scales `(x, y, z; w)` by `lambda` on the base and `lambda^3` on `w` so
/// the largest base coordinate is 1.
pub fn normalize_weighted(p: &ProjectivePoint) -> ProjectivePoint {
    let c = p.coords();
    let mut k = 0;
    for i in 0..3 {
        if c[i].norm() > c[k].norm() {
            k = i;
        }
    }
    let s = c[k];
    let mut v: Vec<C64> = c[..3].iter().map(|x| x / s).collect();
    v.push(c[3] / (s * s * s));
    ProjectivePoint::new(v).expect("base coordinates nonzero")
}

/// Minimum-norm Gauss-Newton steps towards the common zero set of `forms`.
pub fn polish_on_variety(forms: &[Form], p: &ProjectivePoint, iters: usize) -> ProjectivePoint {
    let mut x = p.unit();
    let n = x.len();
    for _ in 0..iters {
        let f: Vec<C64> = forms.iter().map(|g| -g.eval_c64(&x)).collect();
        let j = DMatrix::from_fn(forms.len(), n, |i, k| forms[i].partial(k).eval_c64(&x));
        let dx = linalg::lstsq(&j, &f, 1e-12);
        let cand = linalg::unit(&x.iter().zip(&dx).map(|(a, b)| a + b).collect::<Vec<_>>());
        let before: f64 = forms.iter().map(|g| g.relative_residual(&x)).fold(0.0, f64::max);
        let after: f64 = forms.iter().map(|g| g.relative_residual(&cand)).fold(0.0, f64::max);
        if after < before {
            x = cand;
        } else {
            break;
        }
    }
    ProjectivePoint::new(x).expect("unit vector")
}

pub(crate) fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub(crate) fn random_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| random_c64(rng)).collect()
}

fn random_exact_form<R: Rng>(rng: &mut R, n: usize, d: u32, height: i64) -> ExactForm {
    let terms = monomials(n, d).into_iter().map(|e| {
        let mut num = 0;
        while num == 0 {
            num = rng.random_range(-height..=height);
        }
        let den = rng.random_range(1..=height);
        (e, rational(num, den))
    });
    HomogeneousForm::from_terms(n, d, terms).unwrap()
}

/// Exact rational form with random coefficients, exposed for tests.
pub fn random_rational_form(seed: u64, n: usize, d: u32) -> ExactForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_exact_form(&mut rng, n, d, 100)
}
