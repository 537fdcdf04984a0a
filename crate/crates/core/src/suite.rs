//! End-to-end experiment suites with machine-readable pass/fail reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{RunConfig, Tolerances};
use crate::corr_j::{j_fiber_first, j_fiber_second, j_push_curve, recertify, SolverOptions};
use crate::corr_t::{t_fiber_first, t_fiber_second_search, ContactTriple};
use crate::error::{Error, Result};
use crate::surfaces::SurfaceModel;
use crate::torsion::{
    expected_dim_y, expected_dim_zprime, recertify_certificate, sample_ramification_pair, z2_certificate, z3_from_pairs, z4_from_triples, SectionCurve,
    TorsionCertificate,
};

pub const SUITES: &[&str] = &["j38", "z3", "z4", "z2", "dims", "push-conic"];

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub metrics: Value,
    pub cases: Vec<CaseReport>,
}

pub fn run_suite(name: &str, config: &RunConfig) -> Result<SuiteReport> {
    let tol = &config.tolerances;
    let seed = config.seed;
    match name {
        "dims" => Ok(suite_dims()),
        "j38" => suite_j38(seed, tol),
        "z3" => suite_z3(seed, tol),
        "z4" => suite_z4(seed, tol),
        "z2" => suite_z2(seed, tol),
        "push-conic" => suite_push_conic(seed, tol),
        other => Err(Error::InvalidInput(format!("unknown suite '{}' (known: {})", other, SUITES.join(", ")))),
    }
}

fn case(label: String, passed: bool, detail: Value) -> CaseReport {
    CaseReport { label, passed, detail }
}

fn suite_dims() -> SuiteReport {
    let mut failures = Vec::new();
    for g in 3..=100 {
        let z = expected_dim_zprime(g).map(|l| l.expected_dim);
        let y = expected_dim_y(g).map(|l| l.expected_dim);
        if !matches!((z, y), (Ok(2), Ok(0))) {
            failures.push(g);
        }
    }
    let passed = failures.is_empty();
    SuiteReport { name: "dims".into(), passed, metrics: json!({ "genera_checked": 98, "failures": failures }), cases: vec![] }
}

/// Shared-q fibers on two random quartics, three sampled q each.
fn suite_j38(seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    let mut counts = Vec::new();
    for s in [seed + 11, seed + 12] {
        let x = SurfaceModel::random_quartic(s);
        for k in 0..3 {
            let q = x.sample_point(k, tol)?;
            let fib = j_fiber_second(&x, &q, &SolverOptions { seed: s * 31 + k, ..SolverOptions::default() }, tol)?;
            let recert_ok = fib.pairs.iter().all(|fp| recertify(&x, &fp.pair, tol).is_ok());
            let round_trip = fib
                .pairs
                .iter()
                .all(|fp| j_fiber_first(&x, &fp.pair.p, tol).map(|f| f.pairs.iter().any(|pr| pr.q.same_as(&q, tol.point_match()))).unwrap_or(false));
            counts.push(fib.count_with_multiplicity);
            let passed = fib.count_with_multiplicity == 38 && recert_ok && round_trip;
            cases.push(case(
                format!("surface {} q {}", s, k),
                passed,
                json!({ "count_with_multiplicity": fib.count_with_multiplicity, "confirmed": fib.confirmed, "recertified": recert_ok, "round_trip": round_trip, "runs": fib.runs }),
            ));
        }
    }
    let passed = cases.iter().all(|c| c.passed);
    Ok(SuiteReport { name: "j38".into(), passed, metrics: json!({ "expected": 38, "counts": counts }), cases })
}

/// Re-extraction plus the invariants every certificate must satisfy.
pub fn certificate_checks(x: &SurfaceModel, cert: &TorsionCertificate, recert_seed: u64, tol: &Tolerances) -> Value {
    let re = recertify_certificate(x, cert, recert_seed, tol);
    let (matches, deviation) = match &re {
        Ok(r) => (r.matches, r.max_deviation),
        Err(_) => (false, f64::INFINITY),
    };
    json!({
        "n": cert.n,
        "degree_num": cert.div_num.degree(),
        "degree_den": cert.div_den.degree(),
        "degree_conserved": cert.degree_conserved(),
        "torsion_identity": cert.difference_is_torsion_pair(tol.point_match()),
        "residual": cert.residual,
        "smooth_screen": cert.smoothness.passed,
        "recertified": matches,
        "recert_deviation": deviation,
    })
}

fn checks_pass(v: &Value) -> bool {
    v["degree_conserved"] == true && v["torsion_identity"] == true && v["recertified"] == true
}

/// n = 3 certificates from shared-q pairs until ten are collected.
fn suite_z3(seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    let mut valid = 0;
    'outer: for s in [seed + 11, seed + 12] {
        let x = SurfaceModel::random_quartic(s);
        for k in 0..3 {
            let q = x.sample_point(k, tol)?;
            let fib = j_fiber_second(&x, &q, &SolverOptions { seed: s * 31 + k, ..SolverOptions::default() }, tol)?;
            for i in 0..fib.pairs.len() {
                for j in i + 1..fib.pairs.len() {
                    let label = format!("surface {} q {} pairs {},{}", s, k, i, j);
                    match z3_from_pairs(&x, &fib.pairs[i].pair, &fib.pairs[j].pair, tol) {
                        Ok(cert) => {
                            let checks = certificate_checks(&x, &cert, 7, tol);
                            let ok = checks_pass(&checks) && cert.smoothness.passed && cert.residual < tol.eps_cert;
                            valid += ok as usize;
                            cases.push(case(label, ok, checks));
                        }
                        Err(e) => cases.push(case(label, false, json!({ "error": e.to_string() }))),
                    }
                    if valid >= 10 {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(SuiteReport { name: "z3".into(), passed: valid >= 10, metrics: json!({ "valid": valid, "required": 10 }), cases })
}

/// Triples sharing `(q, r)` with the triple at `p`, found by the search.
pub fn z4_partners(x: &SurfaceModel, t: &ContactTriple, budget: usize, seed: u64, tol: &Tolerances) -> Result<Vec<ContactTriple>> {
    let found = t_fiber_second_search(x, &t.q, &t.r, budget, seed, tol)?;
    Ok(found.triples.into_iter().filter(|s| !s.p.same_as(&t.p, tol.point_match())).collect())
}

fn z4_checks(x: &SurfaceModel, cert: &TorsionCertificate, tol: &Tolerances) -> (bool, Value) {
    let mut checks = certificate_checks(x, cert, 7, tol);
    let shared = match cert.curve {
        SectionCurve::SpaceSextic { shared_line_residual, .. } => shared_line_residual,
        _ => f64::INFINITY,
    };
    checks["shared_line_residual"] = json!(shared);
    let ok = checks_pass(&checks) && cert.div_num.degree() == 6 && cert.div_den.degree() == 6 && cert.residual < 1e-6 && shared <= tol.eps_cert;
    (ok, checks)
}

/// n = 4 certificates through `t_fiber_first` and `t_fiber_second_search`.
///
/// On a random (2,3) surface the search over the `(q, r)` of a sampled
/// point only returns that point, so the certificates come from surfaces
/// built to contain a shared tangent line; the random-surface attempt is
/// reported alongside.
fn suite_z4(seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    let mut valid = 0;
    for s in seed..seed + 3 {
        let (x, config) = SurfaceModel::ci23_with_shared_tangent_line(s);
        let label = format!("constructed {}", s);
        let Some(t1) = t_fiber_first(&x, &config.p, tol)?.triple else {
            cases.push(case(label, false, json!({ "error": "no contact triple at p" })));
            continue;
        };
        let partners = z4_partners(&x, &t1, 120, s, tol)?;
        let Some(t2) = partners.first() else {
            cases.push(case(label, false, json!({ "error": "search found no second point" })));
            continue;
        };
        match z4_from_triples(&x, &t1, t2, tol) {
            Ok(cert) => {
                let (ok, checks) = z4_checks(&x, &cert, tol);
                valid += ok as usize;
                cases.push(case(label, ok, checks));
            }
            Err(e) => cases.push(case(label, false, json!({ "error": e.to_string() }))),
        }
    }
    let x = SurfaceModel::random_ci23(seed + 2);
    let mut generic_partners = 0;
    for k in 0..3 {
        let p = x.sample_point(k, tol)?;
        if let Some(t1) = t_fiber_first(&x, &p, tol)?.triple {
            generic_partners += z4_partners(&x, &t1, 120, k, tol)?.len();
        }
    }
    Ok(SuiteReport {
        name: "z4".into(),
        passed: valid >= 3,
        metrics: json!({ "valid": valid, "required": 3, "random_surface_partners": generic_partners }),
        cases,
    })
}

fn suite_z2(seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut cases = Vec::new();
    for k in 0..20u64 {
        let x = SurfaceModel::random_double_sextic(seed + 100 + k);
        let (p, q) = sample_ramification_pair(&x, k, tol)?;
        let label = format!("draw {}", k);
        let cert = match z2_certificate(&x, &p, &q, tol) {
            Ok(c) => c,
            Err(e) => {
                cases.push(case(label, false, json!({ "error": e.to_string() })));
                continue;
            }
        };
        let branch_total: usize = match &cert.curve {
            SectionCurve::DoubleLine { branch, .. } => branch.iter().map(|b| b.multiplicity).sum(),
            _ => 0,
        };
        let mut checks = certificate_checks(&x, &cert, k, tol);
        checks["branch_total"] = json!(branch_total);
        let same = matches!(z2_certificate(&x, &p, &p, tol), Err(Error::Precondition(_)));
        let off = x.sample_point(k + 1000, tol)?;
        let off_sextic = matches!(z2_certificate(&x, &off, &q, tol), Err(Error::Precondition(_)));
        checks["error_on_equal"] = json!(same);
        checks["error_off_sextic"] = json!(off_sextic);
        let ok = checks_pass(&checks) && branch_total == 6 && same && off_sextic;
        cases.push(case(label, ok, checks));
    }
    let passed = cases.iter().all(|c| c.passed);
    Ok(SuiteReport { name: "z2".into(), passed, metrics: json!({ "draws": 20 }), cases })
}

fn suite_push_conic(seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let (x, conic) = SurfaceModel::quartic_with_conic(seed);
    let samples = conic.sample(&x, 50, seed, tol)?;
    let report = j_push_curve(&x, &conic, &samples, 50, tol)?;
    let off = report.curve_residuals.iter().filter(|&&r| r > 1e-4).count();
    let all_off = !report.images.is_empty() && off == report.images.len();
    let passed = all_off && !report.same_curve && report.skipped == 0;
    Ok(SuiteReport {
        name: "push-conic".into(),
        passed,
        metrics: json!({
            "inputs": report.inputs_used,
            "skipped": report.skipped,
            "images": report.images.len(),
            "off_conic": off,
            "min_conic_residual": report.curve_residuals.iter().cloned().fold(f64::INFINITY, f64::min),
            "same_curve": report.same_curve,
            "fitted_degree": report.fitted.as_ref().map(|f| f.degree),
        }),
        cases: vec![],
    })
}
