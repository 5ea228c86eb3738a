//! Resolvent estimates, projections and the extension F.

use degennes::holomorphic::grid;
use degennes::linalg::spectral_norm;
use degennes::{
    assemble, band_table, contour_for, estimate_r0, extend_mu, ground_energy, resolvent_difference, resolvent_norm,
    riesz_projection, weighted_resolvent_norm, Complex64, ContourSpec, Discretization, Error, Family, OperatorSpec,
};

fn disc() -> Discretization {
    Discretization::collocation(64)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r0() -> f64 {
    let band = band_table(Family::DeGennes, &grid(-2.0, 4.0, 0.1), 2, &disc()).unwrap();
    let r0 = estimate_r0(&band).unwrap();
    assert!(band.mu.iter().all(|row| row[1] - row[0] >= 4.0 * r0));
    r0
}

#[test]
fn resolvent_norm_is_inverse_distance_for_real_parameters() {
    let r0 = r0();
    let op = assemble(&OperatorSpec::de_gennes(0.76), &disc()).unwrap();
    let mu = ground_energy(&OperatorSpec::de_gennes(0.76), &disc()).unwrap();
    let n = resolvent_norm(&op, c(mu + 1.5 * r0, 0.0)).unwrap();
    assert!((n - 2.0 / (3.0 * r0)).abs() < 1e-10, "{n}");
    let on_circle = resolvent_norm(&op, c(mu, 1.5 * r0)).unwrap();
    assert!(on_circle <= 1.0 / r0 + 1e-8);
}

#[test]
fn weighted_norm_examples() {
    let r0 = r0();
    let xi = 0.76;
    let mu = ground_energy(&OperatorSpec::de_gennes(xi), &disc()).unwrap();
    for d in [disc(), Discretization::collocation(96)] {
        let op = assemble(&OperatorSpec::de_gennes(xi), &d).unwrap();
        for k in 0..8 {
            let z = c(mu, 0.0) + Complex64::from_polar(1.5 * r0, k as f64 * 0.785);
            assert!(weighted_resolvent_norm(&op, z).unwrap() <= r0.powf(-0.5) + 1e-8);
        }
    }
    // far below the spectrum the distance is 10 + μ₁
    let op = assemble(&OperatorSpec::de_gennes(xi), &disc()).unwrap();
    let w = weighted_resolvent_norm(&op, c(-10.0, 0.0)).unwrap();
    assert!(w <= (10.0 + mu).powf(-0.5));
}

#[test]
fn resolvent_difference_scales_and_reflects() {
    let z = c(1.2, 0.3);
    let a = resolvent_difference(c(0.76, 0.08), z, &disc()).unwrap();
    let b = resolvent_difference(c(0.76, 0.04), z, &disc()).unwrap();
    assert!((a / b - 2.0).abs() < 0.2, "{}", a / b);
    let conj = resolvent_difference(c(0.76, -0.08), z.conj(), &disc()).unwrap();
    assert!((a - conj).abs() < 1e-10 * a);
}

#[test]
fn projection_near_the_minimum() {
    let r0 = r0();
    let xi = c(0.76, 0.1);
    let contour = contour_for(xi, r0, 32, &disc()).unwrap();
    let p = riesz_projection(xi, &contour, &disc()).unwrap();
    assert!((p.trace - 1.0).norm() < 1e-6);
    assert!(p.idempotency_defect < 1e-6);
    assert!(p.overlap.norm() >= 0.5);
    let p_re = riesz_projection(c(0.76, 0.0), &contour, &disc()).unwrap();
    assert!(spectral_norm(&(&p.matrix - &p_re.matrix)) < 1.0);
}

#[test]
fn extension_examples() {
    let r0 = r0();
    let on_axis = c(1.3, 0.0);
    let r = extend_mu(on_axis, &disc(), &contour_for(on_axis, r0, 32, &disc()).unwrap()).unwrap();
    assert!(r.f.im.abs() < 1e-8 && (r.f.re - r.mu_at_re).abs() < 1e-8);

    let xi = c(0.76, 0.1);
    let contour = contour_for(xi, r0, 32, &disc()).unwrap();
    let up = extend_mu(xi, &disc(), &contour).unwrap();
    let down = extend_mu(xi.conj(), &disc(), &contour).unwrap();
    assert!(up.lower_bound_slack >= -1e-8);
    assert!((up.f - down.f.conj()).norm() < 1e-10);
    assert!(up.eigen_residual < 1e-8);
    assert!((up.f - up.f_direct).norm() < 1e-8);
}

#[test]
fn contour_that_misses_the_branch_is_reported() {
    let r0 = r0();
    let xi = c(0.76, 0.0);
    // below the spectrum: nothing enclosed
    let empty = ContourSpec::new(-3.0, r0, 32).unwrap();
    let err = extend_mu(xi, &disc(), &empty).unwrap_err();
    assert!(matches!(err, Error::RankNotOne { rank: 0 }), "{err}");
    // around the second level: rank one but orthogonal to the ground branch
    let mu2 = degennes::eigs(&assemble(&OperatorSpec::de_gennes(xi.re), &disc()).unwrap(), 2)
        .unwrap()
        .real_eigenvalue(2)
        .unwrap();
    let second = ContourSpec::new(mu2, r0, 32).unwrap();
    let err = extend_mu(xi, &disc(), &second).unwrap_err();
    assert!(matches!(err, Error::StripExceeded { .. }), "{err}");
}

#[test]
fn quadrature_converges_spectrally() {
    let r0 = r0();
    let xi = c(1.5, 0.2);
    let mu = ground_energy(&OperatorSpec::de_gennes(xi.re), &disc()).unwrap();
    let f = |m| extend_mu(xi, &disc(), &ContourSpec::new(mu, r0, m).unwrap()).unwrap();
    let (a, b, c16) = (f(32), f(64), f(16));
    assert!((a.f - b.f).norm() < 1e-9);
    assert!(a.idempotency_defect < c16.idempotency_defect);
}
