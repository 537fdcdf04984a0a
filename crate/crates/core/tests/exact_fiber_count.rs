//! Exact count of the fiber of the second projection of J over a point.
//!
//! With q = (0:0:0:1) on X, lines through q have directions (x:y:1) and
//! F(s x, s y, s, 1) = s (a1 + a2 s + a3 s^2 + a4 s^3). The line meets X
//! with contact 3 away from q exactly when the residual cubic has a triple
//! root, i.e. G1 = a3^2 - 3 a4 a2 and G2 = a2^2 - 3 a3 a1 both vanish.
//! These curves meet in 24 points, six of which are the transversal
//! spurious points a3 = a2 = 0, so the fiber has 18 points.

use k3corr::config::Tolerances;
use k3corr::corr_j::{j_fiber_second, SolverOptions};
use k3corr::geom::ProjectivePoint;
use k3corr::poly::{monomials, rational, resultant, roots_with_multiplicities_exact, HomogeneousForm, Poly, Rational, UPoly};
use k3corr::surfaces::{SurfaceKind, SurfaceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Univariate polynomial in x from a polynomial in (x, y, s) free of y, s.
fn in_x(p: &Poly<Rational>) -> UPoly<Rational> {
    p.remove_var(2).remove_var(1).to_upoly()
}

/// Integer quartic with small coefficients and no w^4 term.
fn quartic_through_q(seed: u64) -> HomogeneousForm<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = monomials(4, 4).into_iter().filter(|e| e.as_slice() != [0, 0, 0, 4]).map(|e| (e, rational(rng.random_range(-5..=5), 1)));
    HomogeneousForm::from_terms(4, 4, terms).unwrap()
}

#[test]
fn fiber_over_q_has_eighteen_points() {
    let f = quartic_through_q(5);
    let (x, y, s) = (Poly::var(3, 0), Poly::var(3, 1), Poly::var(3, 2));
    let subs = vec![&x * &s, &y * &s, s.clone(), Poly::constant(3, rational(1, 1))];
    let a = f.poly().compose(&subs).coefficients_in(2);
    assert_eq!(a.len(), 5);
    assert!(a[0].is_zero());
    let three = rational(3, 1);
    let g1 = &a[3] * &a[3] - (&a[4] * &a[2]).scale(&three);
    let g2 = &a[2] * &a[2] - (&a[3] * &a[1]).scale(&three);

    let full = in_x(&resultant(&g1, &g2, 1).unwrap()).trim();
    let spurious = in_x(&resultant(&a[3], &a[2], 1).unwrap()).trim();
    assert_eq!(full.degree(), Some(24));
    assert_eq!(spurious.degree(), Some(6));
    let (genuine, rem) = full.div_rem(&spurious);
    assert!(rem.trim().is_zero(), "spurious factor must divide the resultant");
    assert_eq!(genuine.degree(), Some(18));
    // The genuine factor is square-free and shares no root with the spurious one.
    let roots = roots_with_multiplicities_exact(&genuine).unwrap();
    assert_eq!(roots.roots.len(), 18);
    assert!(roots.roots.iter().all(|c| c.multiplicity == 1));
    let (_, rem) = genuine.div_rem(&spurious);
    assert!(!rem.trim().is_zero());

    // The numerical solver certifies exactly the points over these roots.
    let surface = SurfaceModel::new_exact(SurfaceKind::QuarticP3, vec![f]).unwrap();
    let tol = Tolerances::default();
    let q = ProjectivePoint::real(&[0.0, 0.0, 0.0, 1.0]);
    let fib = j_fiber_second(&surface, &q, &SolverOptions::default(), &tol).unwrap();
    assert_eq!(fib.count_with_multiplicity, 18);
    let mut hit = [false; 18];
    for fp in &fib.pairs {
        let c = fp.pair.p.coords();
        let ratio = c[0] / c[2];
        let (k, d) = roots
            .roots
            .iter()
            .enumerate()
            .map(|(k, r)| (k, (r.value - ratio).norm() / (1.0 + ratio.norm())))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert!(d < 1e-6, "fiber point off the exact roots (distance {:e})", d);
        hit[k] = true;
    }
    assert!(hit.iter().all(|&h| h));
}
