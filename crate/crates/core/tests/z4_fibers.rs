//! Fibers of (p, q, r) -> (q, r) on generic and constructed (2,3) surfaces.

use k3corr::config::Tolerances;
use k3corr::corr_t::{t_fiber_first, t_fiber_second_search};
use k3corr::suite::z4_partners;
use k3corr::surfaces::SurfaceModel;

#[test]
fn generic_surface_fiber_is_the_point_itself() {
    let tol = Tolerances::default();
    let x = SurfaceModel::random_ci23(2);
    for k in 0..3 {
        let p = x.sample_point(k, &tol).unwrap();
        let t = t_fiber_first(&x, &p, &tol).unwrap().triple.expect("generic point has a contact triple");
        let found = t_fiber_second_search(&x, &t.q, &t.r, 36, k, &tol).unwrap();
        assert!(found.triples.iter().any(|s| s.p.same_as(&p, tol.point_match())), "search must recover p");
        assert!(z4_partners(&x, &t, 36, k, &tol).unwrap().is_empty());
    }
}

#[test]
fn constructed_surface_fiber_has_both_points() {
    let tol = Tolerances::default();
    let (x, c) = SurfaceModel::ci23_with_shared_tangent_line(1);
    let t = t_fiber_first(&x, &c.p, &tol).unwrap().triple.expect("contact triple at p");
    let partners = z4_partners(&x, &t, 120, 1, &tol).unwrap();
    assert!(partners.iter().any(|s| s.p.same_as(&c.p_prime, tol.point_match())));
}
