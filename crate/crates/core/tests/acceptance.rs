//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::time::Instant;

use k3corr::config::{RunConfig, Tolerances};
use k3corr::corr_j::{blowup_intersection, j_fiber_first, JFiberFirst};
use k3corr::corr_t::t_fiber_first;
use k3corr::geom::ProjectivePoint;
use k3corr::poly::{rational, Rational, C64};
use k3corr::suite::run_suite;
use k3corr::surfaces::{random_rational_form, SurfaceModel};
use k3corr::torsion::{expected_dim_y, expected_dim_zprime};
use k3corr::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn tol() -> Tolerances {
    Tolerances::default()
}

fn dims() -> Outcome {
    let bad: Vec<i64> = (3..=100)
        .filter(|&g| !(matches!(expected_dim_zprime(g), Ok(l) if l.expected_dim == 2) && matches!(expected_dim_y(g), Ok(l) if l.expected_dim == 0)))
        .collect();
    (bad.is_empty(), format!("3 <= g <= 100, failures {:?}", bad))
}

fn blowup() -> Outcome {
    let v = blowup_intersection((3, -2), (4, -5), 4);
    let basics = blowup_intersection((1, 0), (1, 0), 4) == 4 && blowup_intersection((0, 1), (0, 1), 4) == -1 && blowup_intersection((1, 0), (0, 1), 4) == 0;
    (v == 38 && basics, format!("(3H'-2E).(4H'-5E) = {}", v))
}

/// Every pair certified as 3p + q below the threshold.
fn pairs_certified(fib: &JFiberFirst, t: &Tolerances) -> bool {
    fib.pairs.iter().all(|c| c.residual < 1e-8 && c.divisor.equals(&[(fib.p.clone(), 3), (c.q.clone(), 1)], t.point_match()))
}

fn j_first_degree() -> Outcome {
    let t = tol();
    let mut report = Vec::new();
    let mut ok = true;
    for seed in [1, 2] {
        let x = SurfaceModel::random_quartic(seed);
        let (mut generic, mut classified, mut silent, mut bad_cert) = (0, 0, 0, 0);
        for k in 0..100 {
            let p = match x.sample_point(1000 + k, &t) {
                Ok(p) => p,
                Err(_) => {
                    silent += 1;
                    continue;
                }
            };
            match j_fiber_first(&x, &p, &t) {
                Ok(fib) => {
                    if !pairs_certified(&fib, &t) {
                        bad_cert += 1;
                    }
                    if fib.is_generic(&t) {
                        generic += 1;
                    } else if fib.degenerate.is_empty() {
                        silent += 1;
                    } else {
                        classified += 1;
                    }
                }
                Err(_) => classified += 1,
            }
        }
        ok &= generic >= 95 && silent == 0 && bad_cert == 0;
        report.push(format!("surface {}: {} generic, {} classified, {} unclassified, {} bad certificates", seed, generic, classified, silent, bad_cert));
    }
    (ok, report.join("; "))
}

fn suite(name: &str) -> Outcome {
    match run_suite(name, &RunConfig::default()) {
        Ok(r) => (r.passed, format!("suite {} metrics {}", name, r.metrics)),
        Err(e) => (false, format!("suite {} error: {}", name, e)),
    }
}

fn t_fiber() -> Outcome {
    let t = tol();
    let x = SurfaceModel::random_ci23(1);
    let (mut good, mut classified, mut silent, mut wrong_degree) = (0, 0, 0, 0);
    for k in 0..50 {
        let Ok(p) = x.sample_point(2000 + k, &t) else {
            silent += 1;
            continue;
        };
        match t_fiber_first(&x, &p, &t) {
            Ok(fib) => {
                if fib.total_degree != 6 {
                    wrong_degree += 1;
                }
                match &fib.triple {
                    Some(tr) if tr.divisor.equals(&[(p.clone(), 4), (tr.q.clone(), 1), (tr.r.clone(), 1)], t.point_match()) => good += 1,
                    _ if !fib.degenerate.is_empty() => classified += 1,
                    _ => silent += 1,
                }
            }
            Err(_) => classified += 1,
        }
    }
    let ok = good >= 45 && silent == 0 && wrong_degree == 0;
    (ok, format!("{} triples 4p+q+r, {} classified, {} unclassified, {} runs with total degree != 6", good, classified, silent, wrong_degree))
}

fn fermat() -> Outcome {
    let t = tol();
    let x = SurfaceModel::fermat_quartic();
    let z = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
    let s = C64::new(0.7, -0.2);
    let p = ProjectivePoint::new(vec![z, C64::new(1.0, 0.0), z * s, s]).expect("nonzero");
    let raised = matches!(j_fiber_first(&x, &p, &t), Err(Error::LineOnSurface));
    let witness = x.line_on_surface_witness(200, 1, &t);
    let found = matches!(&witness, Ok(w) if w.line.is_some() && w.residual < 1e-10);
    (raised && found, format!("line-on-surface error raised: {}, certified line found: {}", raised, found))
}

/// Random nonzero complex scale factor.
fn scale(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(10f64.powf(rng.random_range(-3.0..3.0)), rng.random_range(0.0..std::f64::consts::TAU))
}

fn properties() -> Outcome {
    let t = tol();
    let m = t.point_match();
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    // Scale invariance of verdicts.
    let quartic = SurfaceModel::random_quartic(3);
    let ci = SurfaceModel::random_ci23(3);
    let mut scale_failures = 0;
    let mut degree_failures = 0;
    for k in 0..100u64 {
        let c = scale(&mut rng);
        if k % 2 == 0 {
            let p = quartic.sample_point(k, &t).expect("sample");
            let (a, b) = (j_fiber_first(&quartic, &p, &t), j_fiber_first(&quartic, &p.scaled(c), &t));
            let same = match (&a, &b) {
                (Ok(a), Ok(b)) => {
                    a.is_generic(&t) == b.is_generic(&t)
                        && a.pairs.len() == b.pairs.len()
                        && a.pairs.iter().all(|pa| b.pairs.iter().any(|pb| pb.q.same_as(&pa.q, m)))
                }
                (Err(_), Err(_)) => true,
                _ => false,
            };
            scale_failures += !same as usize;
            for fib in [a, b].iter().flatten() {
                degree_failures += fib.pairs.iter().filter(|c| c.divisor.degree() != 4).count();
            }
        } else {
            let p = ci.sample_point(k, &t).expect("sample");
            let (a, b) = (t_fiber_first(&ci, &p, &t), t_fiber_first(&ci, &p.scaled(c), &t));
            let same = match (&a, &b) {
                (Ok(a), Ok(b)) => match (&a.triple, &b.triple) {
                    (Some(x), Some(y)) => (x.q.same_as(&y.q, m) && x.r.same_as(&y.r, m)) || (x.q.same_as(&y.r, m) && x.r.same_as(&y.q, m)),
                    (None, None) => true,
                    _ => false,
                },
                (Err(_), Err(_)) => true,
                _ => false,
            };
            scale_failures += !same as usize;
            for fib in [a, b].iter().flatten() {
                degree_failures += (fib.intersection.degree() != 6) as usize;
                degree_failures += fib.triple.iter().filter(|tr| tr.divisor.degree() != 6).count();
            }
        }
    }

    // Exact restriction versus evaluation.
    let mut exact_failures = 0;
    let small = |rng: &mut ChaCha8Rng| rational(rng.random_range(-20..=20), rng.random_range(1..=7));
    for k in 0..1000u64 {
        let (n, d) = if k % 2 == 0 { (4, 4) } else { (3, 6) };
        let f = random_rational_form(k, n, d);
        let base: Vec<Rational> = (0..n).map(|_| small(&mut rng)).collect();
        let dir: Vec<Rational> = (0..n).map(|_| small(&mut rng)).collect();
        let s = small(&mut rng);
        let g = f.restrict_to_line(&base, &dir).expect("restriction");
        let pt: Vec<Rational> = base.iter().zip(&dir).map(|(b, v)| b + &s * v).collect();
        exact_failures += (g.eval(&s) != f.eval(&pt) || g.nominal_degree() != d as usize) as usize;
    }

    let ok = scale_failures == 0 && degree_failures == 0 && exact_failures == 0;
    (
        ok,
        format!(
            "scale-invariance failures {}/100, degree-conservation failures {}, exact restriction mismatches {}/1000",
            scale_failures, degree_failures, exact_failures
        ),
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 expected dimensions", Box::new(dims)),
        ("2 blowup arithmetic", Box::new(blowup)),
        ("3 first projection of J has degree 2", Box::new(j_first_degree)),
        ("4 second projection of J has degree 38", Box::new(|| suite("j38"))),
        ("5 Z3 certificates", Box::new(|| suite("z3"))),
        ("6 T fiber 4p+q+r", Box::new(t_fiber)),
        ("7 Z4 certificates", Box::new(|| suite("z4"))),
        ("8 Z2 on double sextics", Box::new(|| suite("z2"))),
        ("9 J-push of a conic", Box::new(|| suite("push-conic"))),
        ("10 degeneracy honesty on Fermat", Box::new(fermat)),
        ("11 property suites", Box::new(properties)),
    ];
    let mut failed = Vec::new();
    for (name, run) in &criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        println!("{} criterion {} ({:.2}s): {}", if ok { "PASS" } else { "FAIL" }, name, start.elapsed().as_secs_f64(), detail);
        if !ok {
            failed.push(*name);
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
