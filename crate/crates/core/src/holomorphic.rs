//! Holomorphic extension of the de Gennes function by Riesz projections.
//!
//! For ξ in a strip around the real axis, the ground branch is isolated by a
//! circle Γ_ξ of radius `1.5·r₀` around `μ(Re ξ)`, where `r₀ = c₁/4` is read
//! off a band table. The projection
//!
//! ```text
//! P_ξ = (1/2πi) ∮_Γ (z − L_ξ)⁻¹ dz
//! ```
//!
//! is approximated with the trapezoid rule on the circle. With `ψ₀` the real
//! ground state of `L_{Re ξ}`, the extension is the bilinear quotient
//!
//! ```text
//! F(ξ) = ∫ L_ξ(Pψ₀)·Pψ₀ dt / ∫ (Pψ₀)² dt.
//! ```
//!
//! All pairings are bilinear (no conjugation). Matrices live in the
//! L²-orthonormal coordinates of [`StandardForm`], so the Euclidean 2-norm is
//! the discrete L² operator norm.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, RVector};
use crate::operator::{assemble, AssembledOperator, Discretization, Family, OperatorSpec, StandardForm};
use crate::spectrum::{band_table, BandTable};

/// The circle Γ_ξ and the trapezoid rule on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub center: f64,
    pub radius: f64,
    pub n_nodes: usize,
    pub r0: f64,
}

impl ContourSpec {
    /// Circle of radius `1.5·r0` around `center`.
    pub fn new(center: f64, r0: f64, n_nodes: usize) -> Result<Self> {
        Self::with_radius(center, r0, 1.5 * r0, n_nodes)
    }

    pub fn with_radius(center: f64, r0: f64, radius: f64, n_nodes: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::Config(format!("r0 must be positive, got {r0}")));
        }
        if !(radius > r0 && radius < 2.0 * r0) {
            return Err(Error::Config(format!(
                "contour radius {radius} must lie strictly inside the annulus ({r0}, {})",
                2.0 * r0
            )));
        }
        if n_nodes < 8 || !n_nodes.is_multiple_of(2) {
            return Err(Error::Config(format!("need an even number >= 8 of contour nodes, got {n_nodes}")));
        }
        Ok(Self {
            center,
            radius,
            n_nodes,
            r0,
        })
    }

    /// Nodes `z_j` and weights `w_j` with `(1/2πi)∮ f dz ≈ Σ w_j f(z_j)`.
    pub fn nodes(&self) -> Vec<(Complex64, Complex64)> {
        let m = self.n_nodes as f64;
        (0..self.n_nodes)
            .map(|j| {
                let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m);
                (self.center + e * self.radius, e * (self.radius / m))
            })
            .collect()
    }

    pub fn point(&self, angle: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, angle)
    }
}

/// Quadrature approximation of the Riesz projection `P_ξ`.
#[derive(Debug, Clone)]
pub struct RieszProjection {
    pub xi: Complex64,
    pub matrix: CMatrix,
    pub trace: Complex64,
    /// Nearest integer to the real part of the trace.
    pub rank: i64,
    /// `‖P² − P‖₂`.
    pub idempotency_defect: f64,
    /// Real, L²-normalized ground state of `L_{Re ξ}` (positive mean).
    pub psi0: RVector,
    /// `μ(Re ξ)` on the same discretization.
    pub mu_re: f64,
    /// `∫ (P ψ₀)²`, bilinear.
    pub overlap: Complex64,
    pub contour: ContourSpec,
}

impl RieszProjection {
    pub fn projected_reference(&self) -> CVector {
        &self.matrix * self.psi0.map(|x| Complex64::new(x, 0.0))
    }

    /// `|∫(P_ξψ₀)² − ∫(P_{Re ξ}ψ₀)²|` with `∫(P_{Re ξ}ψ₀)² = ‖ψ₀‖² = 1`.
    pub fn overlap_deviation(&self) -> f64 {
        (self.overlap - 1.0).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionMethod {
    ProjectionQuotient,
    DirectEigenvalue,
}

/// The extension at one point of the strip.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionResult {
    pub xi: Complex64,
    /// Authoritative value: the bilinear projection quotient.
    pub f: Complex64,
    /// Eigenvalue of the discretized `L_ξ` closest to the contour center.
    pub f_direct: Complex64,
    pub mu_at_re: f64,
    /// `Re F − μ(Re ξ) + (Im ξ)²`.
    pub lower_bound_slack: f64,
    pub rank_diag: Complex64,
    pub idempotency_defect: f64,
    pub overlap: Complex64,
    /// `‖(A(ξ) − F)v‖/‖v‖` for `v = P_ξψ₀`.
    pub eigen_residual: f64,
    pub method: ExtensionMethod,
}

fn standard(xi: Complex64, disc: &Discretization) -> Result<StandardForm> {
    assemble(&OperatorSpec::de_gennes(xi), disc)?.standard_form()
}

fn shifted(sf: &StandardForm, z: Complex64) -> CMatrix {
    let n = sf.dim();
    &sf.matrix - CMatrix::identity(n, n) * z
}

fn inverse(m: CMatrix, z: Complex64) -> Result<CMatrix> {
    let scale = linalg::frobenius(&m).max(1.0);
    let inv = m.lu().try_inverse().ok_or(Error::Contour { z })?;
    if inv.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) || linalg::frobenius(&inv) * scale > 1e15 {
        return Err(Error::Contour { z });
    }
    Ok(inv)
}

/// `r₀ = min(c₁/4, 1)` from the first gap of a band table.
pub fn estimate_r0(band: &BandTable) -> Result<f64> {
    if band.k_max() < 2 {
        return Err(Error::Certification("need the second band to bound the first gap".into()));
    }
    let gap = band.gaps[0];
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::Certification(format!("first gap {gap} is not positive")));
    }
    Ok((gap / 4.0).min(1.0))
}

/// `‖(A − z)⁻¹‖₂` for the discretized operator at `spec.xi`.
pub fn resolvent_norm(op: &AssembledOperator, z: Complex64) -> Result<f64> {
    let sf = op.standard_form()?;
    let shifted = shifted(&sf, z);
    let smin = linalg::min_singular_value(&shifted);
    let floor = Tolerances::default().near_singular * linalg::spectral_norm(&sf.matrix).max(1.0);
    if smin <= floor {
        return Err(Error::NearSingular { z, distance: smin });
    }
    Ok(1.0 / smin)
}

/// `‖(g(t) − Re ξ)(A − z)⁻¹‖₂`.
pub fn weighted_resolvent_norm(op: &AssembledOperator, z: Complex64) -> Result<f64> {
    let sf = op.standard_form()?;
    let shifted = shifted(&sf, z);
    let smin = linalg::min_singular_value(&shifted);
    let floor = Tolerances::default().near_singular * linalg::spectral_norm(&sf.matrix).max(1.0);
    if smin <= floor {
        return Err(Error::NearSingular { z, distance: smin });
    }
    let w = linalg::to_complex(&sf.weight(op.spec.xi.re));
    Ok(linalg::spectral_norm(&(w * inverse(shifted, z)?)))
}

/// `‖(A(ξ) − z)⁻¹ − (A(Re ξ) − z)⁻¹‖₂` for the de Gennes operator.
pub fn resolvent_difference(xi: Complex64, z: Complex64, disc: &Discretization) -> Result<f64> {
    let full = standard(xi, disc)?;
    let real = standard(Complex64::new(xi.re, 0.0), disc)?;
    let a = inverse(shifted(&full, z), z)?;
    let b = inverse(shifted(&real, z), z)?;
    Ok(linalg::spectral_norm(&(a - b)))
}

/// Contour around `μ(Re ξ)` computed on `disc`.
pub fn contour_for(xi: Complex64, r0: f64, n_nodes: usize, disc: &Discretization) -> Result<ContourSpec> {
    let mu = crate::spectrum::ground_energy(&OperatorSpec::de_gennes(xi.re), disc)?;
    ContourSpec::new(mu, r0, n_nodes)
}

/// Real, normalized ground state of the real-parameter operator and its eigenvalue.
fn reference_state(re: f64, disc: &Discretization) -> Result<(RVector, f64)> {
    let sf = standard(Complex64::new(re, 0.0), disc)?;
    let eig = sf.real_part().symmetric_eigen();
    let imin = eig.eigenvalues.imin();
    let mut v = eig.eigenvectors.column(imin).into_owned();
    v /= v.norm();
    if sf.integral.dot(&v) < 0.0 {
        v.neg_mut();
    }
    Ok((v, eig.eigenvalues[imin]))
}

pub fn riesz_projection(xi: Complex64, contour: &ContourSpec, disc: &Discretization) -> Result<RieszProjection> {
    riesz_projection_with(xi, contour, disc, &Tolerances::default())
}

pub fn riesz_projection_with(
    xi: Complex64,
    contour: &ContourSpec,
    disc: &Discretization,
    tol: &Tolerances,
) -> Result<RieszProjection> {
    let sf = standard(xi, disc)?;
    let n = sf.dim();
    let mut p = CMatrix::zeros(n, n);
    for (z, w) in contour.nodes() {
        let r = inverse(shifted(&sf, z), z)?;
        // (z − A)⁻¹ = −(A − z)⁻¹
        p -= r * w;
    }
    let trace = p.trace();
    let rank = trace.re.round() as i64;
    if (trace - rank as f64).norm() > tol.rank_ambiguity {
        return Err(Error::RankAmbiguity { trace });
    }
    let idempotency_defect = linalg::spectral_norm(&(&p * &p - &p));
    let (psi0, mu_re) = reference_state(xi.re, disc)?;
    let v = &p * psi0.map(|x| Complex64::new(x, 0.0));
    let overlap = linalg::bilinear(&v, &v);
    Ok(RieszProjection {
        xi,
        matrix: p,
        trace,
        rank,
        idempotency_defect,
        psi0,
        mu_re,
        overlap,
        contour: *contour,
    })
}

pub fn extend_mu(xi: Complex64, disc: &Discretization, contour: &ContourSpec) -> Result<ExtensionResult> {
    extend_mu_with(xi, disc, contour, &Tolerances::default())
}

pub fn extend_mu_with(
    xi: Complex64,
    disc: &Discretization,
    contour: &ContourSpec,
    tol: &Tolerances,
) -> Result<ExtensionResult> {
    let proj = riesz_projection_with(xi, contour, disc, tol)?;
    if proj.rank != 1 {
        return Err(Error::RankNotOne { rank: proj.rank });
    }
    if proj.overlap.norm() < tol.overlap_min {
        return Err(Error::StripExceeded {
            overlap: proj.overlap,
            threshold: tol.overlap_min,
        });
    }
    let sf = standard(xi, disc)?;
    let v = proj.projected_reference();
    let av = &sf.matrix * &v;
    let f = linalg::bilinear(&av, &v) / linalg::bilinear(&v, &v);
    let eigen_residual = (&av - &v * f).norm() / v.norm();

    let center = Complex64::new(contour.center, 0.0);
    let f_direct = linalg::complex_eigenvalues(&sf.matrix)?
        .into_iter()
        .min_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()))
        .expect("nonempty spectrum");
    let difference = (f - f_direct).norm();
    if difference > tol.quotient_direct {
        return Err(Error::Disagreement {
            quotient: f,
            direct: f_direct,
            difference,
        });
    }
    Ok(ExtensionResult {
        xi,
        f,
        f_direct,
        mu_at_re: proj.mu_re,
        lower_bound_slack: f.re - proj.mu_re + xi.im * xi.im,
        rank_diag: proj.trace,
        idempotency_defect: proj.idempotency_defect,
        overlap: proj.overlap,
        eigen_residual,
        method: ExtensionMethod::ProjectionQuotient,
    })
}

/// Parameters of a rectangular sweep over the strip.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub re_from: f64,
    pub re_to: f64,
    pub re_step: f64,
    /// Strip half-width ε.
    pub eps: f64,
    pub im_step: f64,
    pub disc: Discretization,
    pub n_nodes: usize,
    pub tolerances: Tolerances,
}

impl SweepConfig {
    pub fn new(re_from: f64, re_to: f64, re_step: f64, eps: f64, im_step: f64, disc: Discretization) -> Self {
        let tolerances = Tolerances::default();
        Self {
            re_from,
            re_to,
            re_step,
            eps,
            im_step,
            disc,
            n_nodes: tolerances.contour_nodes,
            tolerances,
        }
    }

    pub fn re_grid(&self) -> Vec<f64> {
        grid(self.re_from, self.re_to, self.re_step)
    }

    /// Imaginary levels `−ε..=ε`, symmetric, including 0.
    pub fn im_grid(&self) -> Vec<f64> {
        let m = (self.eps / self.im_step + 1e-9).floor() as i64;
        (-m..=m).map(|j| j as f64 * self.im_step).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.re_step > 0.0 && self.im_step > 0.0 && self.re_from <= self.re_to) {
            return Err(Error::Config("sweep needs positive steps and re_from <= re_to".into()));
        }
        if self.eps.is_nan() || self.eps < 0.0 || self.eps > self.tolerances.max_strip_half_width {
            return Err(Error::Config(format!(
                "strip half-width {} outside [0, {}]",
                self.eps, self.tolerances.max_strip_half_width
            )));
        }
        if self.re_grid().len() < 2 {
            return Err(Error::Config("sweep needs at least two real grid points".into()));
        }
        Ok(())
    }
}

/// Points `from, from + step, …` up to `to` (inclusive, rounded).
pub fn grid(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| from + i as f64 * step).collect()
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub re_index: usize,
    pub im_index: usize,
    pub xi: Complex64,
    pub outcome: std::result::Result<ExtensionResult, Error>,
    /// `Θ₀ − (Im ξ)²`; the coercivity argument needs it positive.
    pub coercivity_margin: f64,
}

impl SweepPoint {
    /// The extension exists and the projection is accurate: trace and
    /// idempotency defect both within `tol`.
    pub fn certified(&self, tol: f64) -> bool {
        self.outcome
            .as_ref()
            .is_ok_and(|r| (r.rank_diag - 1.0).norm() <= tol && r.idempotency_defect <= tol)
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub re_grid: Vec<f64>,
    pub im_grid: Vec<f64>,
    pub band: BandTable,
    pub r0: f64,
    /// Row-major over (re, im).
    pub points: Vec<SweepPoint>,
    /// Largest level ε′ such that every point with |Im ξ| ≤ ε′ is certified.
    pub certified_eps: Option<f64>,
    pub worst_slack: f64,
    /// Largest `|½(∂_x + i∂_y)F|` by centered differences on interior points.
    pub cauchy_riemann_max: f64,
    /// Twice the truncation error expected of centered differences.
    pub cauchy_riemann_tol: f64,
    /// Points where `Θ₀ − (Im ξ)² ≤ 0`.
    pub coercivity_failures: usize,
}

impl SweepResult {
    pub fn failures(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|p| p.outcome.is_err())
    }

    /// Points that failed or whose projection misses the configured accuracy.
    pub fn uncertified(&self) -> impl Iterator<Item = &SweepPoint> {
        let tol = self.config.tolerances.projection_defect;
        self.points.iter().filter(move |p| !p.certified(tol))
    }

    pub fn get(&self, re_index: usize, im_index: usize) -> &SweepPoint {
        &self.points[re_index * self.im_grid.len() + im_index]
    }

    /// All points succeeded, slacks are non-negative to `slack_tol`, and the
    /// Cauchy–Riemann residual is within tolerance.
    pub fn passed(&self, slack_tol: f64) -> bool {
        self.uncertified().next().is_none()
            && self.worst_slack >= -slack_tol
            && self.cauchy_riemann_max <= self.cauchy_riemann_tol
    }
}

/// Extension on a rectangular grid of the strip. Per-point failures are
/// collected, not fatal.
pub fn strip_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let re_grid = config.re_grid();
    let im_grid = config.im_grid();
    let band = band_table(Family::DeGennes, &re_grid, 2, &config.disc)?;
    let r0 = estimate_r0(&band)?;
    let theta0 = band.theta0;
    let tol = &config.tolerances;

    let jobs: Vec<(usize, usize)> = (0..re_grid.len())
        .flat_map(|i| (0..im_grid.len()).map(move |j| (i, j)))
        .collect();
    let points: Vec<SweepPoint> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let xi = Complex64::new(re_grid[i], im_grid[j]);
            let outcome = ContourSpec::new(band.mu[i][0], r0, config.n_nodes)
                .and_then(|c| extend_mu_with(xi, &config.disc, &c, tol))
                .map_err(|e| e.at(xi));
            SweepPoint {
                re_index: i,
                im_index: j,
                xi,
                outcome,
                coercivity_margin: theta0 - im_grid[j] * im_grid[j],
            }
        })
        .collect();

    let mut levels: Vec<f64> = im_grid.iter().map(|y| y.abs()).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut certified_eps = None;
    for level in levels {
        let ok = points
            .iter()
            .filter(|p| (p.xi.im.abs() - level).abs() < 1e-12)
            .all(|p| p.certified(tol.projection_defect));
        if !ok {
            break;
        }
        certified_eps = Some(level);
    }

    let worst_slack = points
        .iter()
        .filter_map(|p| p.outcome.as_ref().ok())
        .map(|r| r.lower_bound_slack)
        .fold(f64::INFINITY, f64::min);

    let nim = im_grid.len();
    let value = |i: usize, j: usize| points[i * nim + j].outcome.as_ref().ok().map(|r| r.f);
    let mut cauchy_riemann_max: f64 = 0.0;
    for i in 1..re_grid.len().saturating_sub(1) {
        for j in 1..nim.saturating_sub(1) {
            if let (Some(e), Some(w), Some(n), Some(s)) =
                (value(i + 1, j), value(i - 1, j), value(i, j + 1), value(i, j - 1))
            {
                let r = cauchy_riemann_residual(e, w, n, s, config.re_step, config.im_step);
                cauchy_riemann_max = cauchy_riemann_max.max(r);
            }
        }
    }
    // Centered differences leave (hx² + hy²)|F‴|/12 even for holomorphic F;
    // the tolerance allows twice that, with |F‴| read off third differences
    // along the real direction.
    let (hx, hy) = (config.re_step, config.im_step);
    let mut third: f64 = 0.0;
    for i in 2..re_grid.len().saturating_sub(2) {
        for j in 0..nim {
            if let (Some(a), Some(b), Some(c), Some(d)) =
                (value(i + 2, j), value(i + 1, j), value(i - 1, j), value(i - 2, j))
            {
                third = third.max(((a - 2.0 * b + 2.0 * c - d) / (2.0 * hx.powi(3))).norm());
            }
        }
    }
    let cauchy_riemann_tol = if third > 0.0 {
        (hx * hx + hy * hy) * third / 6.0 + tol.cauchy_riemann_floor
    } else {
        tol.cauchy_riemann(hx.max(hy))
    };
    let coercivity_failures = points.iter().filter(|p| p.coercivity_margin <= 0.0).count();
    Ok(SweepResult {
        config: config.clone(),
        re_grid,
        im_grid,
        r0,
        points,
        certified_eps,
        worst_slack,
        cauchy_riemann_max,
        cauchy_riemann_tol,
        coercivity_failures,
        band,
    })
}

/// `|½(D_x F + i D_y F)|` from centered differences: east/west values at
/// `ξ ± hx`, north/south at `ξ ± i·hy`.
pub fn cauchy_riemann_residual(
    east: Complex64,
    west: Complex64,
    north: Complex64,
    south: Complex64,
    hx: f64,
    hy: f64,
) -> f64 {
    let dx = (east - west) / (2.0 * hx);
    let dy = (north - south) / (2.0 * hy);
    (0.5 * (dx + Complex64::i() * dy)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> Discretization {
        Discretization::collocation(40)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contour_validation() {
        assert!(ContourSpec::new(1.0, 0.5, 32).is_ok());
        assert!(ContourSpec::new(1.0, 0.5, 7).is_err());
        assert!(ContourSpec::new(1.0, 0.5, 9).is_err());
        assert!(ContourSpec::new(1.0, -0.5, 32).is_err());
        assert!(ContourSpec::with_radius(1.0, 0.5, 1.0, 32).is_err());
    }

    #[test]
    fn trapezoid_weights_integrate_one_over_z() {
        let c = ContourSpec::new(0.0, 1.0, 16).unwrap();
        let sum: Complex64 = c.nodes().iter().map(|(z, w)| w / z).sum();
        assert!((sum - 1.0).norm() < 1e-14);
        let zero: Complex64 = c.nodes().iter().map(|(_, w)| *w).sum();
        assert!(zero.norm() < 1e-14);
    }

    #[test]
    fn r0_needs_two_bands() {
        let band = band_table(Family::DeGennes, &[0.0, 1.0], 1, &disc()).unwrap();
        assert!(matches!(estimate_r0(&band), Err(Error::Certification(_))));
        let band = band_table(Family::DeGennes, &[0.0, 1.0], 2, &disc()).unwrap();
        let r0 = estimate_r0(&band).unwrap();
        assert!(band.mu.iter().all(|row| row[1] - row[0] >= 4.0 * r0));
    }

    #[test]
    fn real_parameter_projection_is_the_ground_state_projector() {
        let contour = contour_for(c(0.5, 0.0), 0.4, 32, &disc()).unwrap();
        let p = riesz_projection(c(0.5, 0.0), &contour, &disc()).unwrap();
        let psi = p.psi0.map(|x| c(x, 0.0));
        let expected = &psi * psi.transpose();
        assert!(linalg::spectral_norm(&(&p.matrix - expected)) < 1e-8);
        assert_eq!(p.rank, 1);
    }

    #[test]
    fn resolvent_difference_vanishes_on_the_axis() {
        assert_eq!(resolvent_difference(c(0.7, 0.0), c(1.3, 0.2), &disc()).unwrap(), 0.0);
    }

    #[test]
    fn near_singular_resolvent_is_reported() {
        let disc = disc();
        let mu = crate::spectrum::ground_energy(&OperatorSpec::de_gennes(0.0), &disc).unwrap();
        let op = assemble(&OperatorSpec::de_gennes(0.0), &disc).unwrap();
        let err = resolvent_norm(&op, c(mu, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NearSingular { .. }));
    }

    #[test]
    fn extension_on_the_axis_is_real() {
        let contour = contour_for(c(1.0, 0.0), 0.4, 32, &disc()).unwrap();
        let r = extend_mu(c(1.0, 0.0), &disc(), &contour).unwrap();
        assert!(r.f.im.abs() < 1e-10);
        assert!((r.f.re - r.mu_at_re).abs() < 1e-10);
    }

    #[test]
    fn grids() {
        assert_eq!(grid(-2.0, 4.0, 0.05).len(), 121);
        let cfg = SweepConfig::new(0.0, 1.0, 0.5, 0.25, 0.05, disc());
        assert_eq!(cfg.im_grid().len(), 11);
        assert_eq!(cfg.im_grid()[5], 0.0);
    }
}
