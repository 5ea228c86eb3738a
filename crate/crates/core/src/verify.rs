//! Verification suite behind `degennes check`.
//!
//! Each check records what was measured, the threshold it was held to and
//! whether it passed. Random sample points come from a seeded generator, so
//! a given [`SuiteConfig`] always produces the same report.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::holomorphic::{estimate_r0, grid, resolvent_difference, resolvent_norm, weighted_resolvent_norm};
use crate::operator::{assemble, dilation_check, real_part_form_min, Discretization, Family, OperatorSpec};
use crate::spectrum::{
    asymptotics_minus, asymptotics_plus, band_table, deviations_decrease, eigs, find_theta0, ground_energy,
};

/// `2^{2/3}·|a′₁|`, with `a′₁ ≈ −1.0187929716` the first zero of Ai′.
pub const NU1_REFERENCE: f64 = 1.617_233_034_931_004;

/// How a measured value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            threshold,
            passed: measured <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            threshold,
            passed: measured >= threshold,
        }
    }

    /// A yes/no property reported as 1 or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::at_least(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }
}

/// Inputs of the suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Discretization of the main computations (dense, usually collocation).
    pub disc: Discretization,
    /// Tridiagonal finite-difference grid for the dual-scheme comparisons.
    pub fd_reference: Discretization,
    pub seed: u64,
    /// Number of random points in the resolvent and coercivity checks.
    pub samples: usize,
    pub n_nodes: usize,
    /// Real range and half-width of the strip the samples are drawn from.
    pub re_range: (f64, f64),
    pub eps: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            disc: Discretization::collocation(96),
            fd_reference: Discretization::finite_difference(20_000),
            seed: 20_240_601,
            samples: 20,
            n_nodes: 32,
            re_range: (-2.0, 4.0),
            eps: 0.25,
        }
    }
}

/// Resolvent estimates at one point `z ∈ Γ_ξ` for the operator at `Re ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventSample {
    pub xi: Complex64,
    pub z: Complex64,
    pub r0: f64,
    /// Distance from `z` to the discrete spectrum.
    pub distance: f64,
    pub norm: f64,
    pub weighted: f64,
}

impl ResolventSample {
    /// `|‖R(z)‖·dist(z, sp) − 1|`; zero for a normal matrix.
    pub fn l2_defect(&self) -> f64 {
        (self.norm * self.distance - 1.0).abs()
    }

    /// Excess of the weighted norm over `r₀^{-1/2}`.
    pub fn h1_excess(&self) -> f64 {
        self.weighted - self.r0.powf(-0.5)
    }

    /// Excess over the energy estimate that keeps the shift:
    /// `‖(t − Re ξ)v‖² ≤ Re⟨u, v⟩ + Re z‖v‖² ≤ (1/d + max(Re z, 0)/d²)‖u‖²`.
    pub fn energy_excess(&self) -> f64 {
        let d = self.distance;
        self.weighted - (1.0 / d + self.z.re.max(0.0) / (d * d)).sqrt()
    }
}

/// First-gap radius over the strip's real range.
pub fn strip_r0(re_range: (f64, f64), disc: &Discretization) -> Result<f64> {
    let band = band_table(Family::DeGennes, &grid(re_range.0, re_range.1, 0.1), 2, disc)?;
    estimate_r0(&band)
}

/// Random strip points `ξ` with random `z ∈ Γ_ξ`.
pub fn random_strip_points(seed: u64, count: usize, re_range: (f64, f64), eps: f64) -> Vec<(Complex64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let re = rng.random_range(re_range.0..=re_range.1);
            let im = rng.random_range(-eps..=eps);
            let angle = rng.random_range(0.0..2.0 * PI);
            (Complex64::new(re, im), angle)
        })
        .collect()
}

pub fn resolvent_samples(cfg: &SuiteConfig, r0: f64) -> Result<Vec<ResolventSample>> {
    random_strip_points(cfg.seed, cfg.samples, cfg.re_range, cfg.eps)
        .into_par_iter()
        .map(|(xi, angle)| {
            let op = assemble(&OperatorSpec::de_gennes(xi.re), &cfg.disc)?;
            let spectrum = op.standard_form()?.real_part().symmetric_eigenvalues();
            let center = spectrum.min();
            let z = Complex64::new(center, 0.0) + Complex64::from_polar(1.5 * r0, angle);
            let distance = spectrum
                .iter()
                .map(|&l| (z - l).norm())
                .fold(f64::INFINITY, f64::min);
            Ok(ResolventSample {
                xi,
                z,
                r0,
                distance,
                norm: resolvent_norm(&op, z)?,
                weighted: weighted_resolvent_norm(&op, z)?,
            })
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Largest resolvent difference over the contour nodes, per `Im ξ`, and
/// the fitted log–log slope.
pub fn resolvent_difference_scaling(
    re: f64,
    ims: &[f64],
    r0: f64,
    n_nodes: usize,
    disc: &Discretization,
) -> Result<(Vec<f64>, f64)> {
    let mu = ground_energy(&OperatorSpec::de_gennes(re), disc)?;
    let nodes: Vec<Complex64> = (0..n_nodes)
        .map(|k| Complex64::new(mu, 0.0) + Complex64::from_polar(1.5 * r0, 2.0 * PI * k as f64 / n_nodes as f64))
        .collect();
    let norms: Vec<f64> = ims
        .par_iter()
        .map(|&im| {
            let xi = Complex64::new(re, im);
            nodes
                .iter()
                .map(|&z| resolvent_difference(xi, z, disc))
                .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
        })
        .collect::<Result<_>>()?;
    let slope = log_log_slope(ims, &norms);
    Ok((norms, slope))
}

/// Smallest `min Re q_ξ − (Θ₀ − (Im ξ)²)` over random strip points.
pub fn coercivity_margin(cfg: &SuiteConfig, theta0: f64) -> Result<f64> {
    let pts = random_strip_points(cfg.seed.wrapping_add(1), cfg.samples, cfg.re_range, cfg.eps);
    let margins: Vec<f64> = pts
        .into_par_iter()
        .map(|(xi, _)| Ok(real_part_form_min(&OperatorSpec::de_gennes(xi), &cfg.disc)? - (theta0 - xi.im * xi.im)))
        .collect::<Result<_>>()?;
    Ok(margins.into_iter().fold(f64::INFINITY, f64::min))
}

/// Lowest two Montgomery eigenvalues at ξ = 0 on both schemes.
pub fn montgomery_pair(n: u32, disc: &Discretization) -> Result<(f64, f64)> {
    let op = assemble(&OperatorSpec::montgomery(n, 0.0), disc)?;
    let s = eigs(&op, 2)?;
    Ok((s.real_eigenvalue(1)?, s.real_eigenvalue(2)?))
}

fn named<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Certification(format!("{name}: {e}")))
}

/// Runs every check. Numerical failures abort the run; failed thresholds
/// are reported in the returned list.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let disc = &cfg.disc;

    let r0 = named("r0", strip_r0(cfg.re_range, disc))?;
    out.push(Check::at_least("r0_positive", r0, f64::MIN_POSITIVE));

    let samples = named("resolvent", resolvent_samples(cfg, r0))?;
    let max_of = |f: &dyn Fn(&ResolventSample) -> f64| samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::at_most("resolvent_l2_equality", max_of(&|s| s.l2_defect()), 1e-8));
    out.push(Check::at_most("resolvent_l2_bound", max_of(&|s| s.norm - 1.0 / r0), 1e-8));
    out.push(Check::at_most("resolvent_h1_bound", max_of(&|s| s.h1_excess()), 1e-8));
    out.push(Check::at_most("resolvent_h1_energy_estimate", max_of(&|s| s.energy_excess()), 1e-8));

    let ims = [0.02, 0.04, 0.08, 0.16];
    let (_, slope) = named("slope", resolvent_difference_scaling(0.76, &ims, r0, cfg.n_nodes, disc))?;
    out.push(Check::at_most("resolvent_difference_slope_error", (slope - 1.0).abs(), 0.2));

    let theta = named("theta0", find_theta0(disc, (0.0, 2.0), 1e-8))?;
    out.push(Check::at_most("theta0_feynman_hellmann", theta.feynman_hellmann_residual(), 1e-5));
    let theta_fd = named("theta0 (reference)", find_theta0(&cfg.fd_reference, (0.0, 2.0), 1e-8))?;
    out.push(Check::at_most("theta0_scheme_agreement", (theta.theta0 - theta_fd.theta0).abs(), 1e-6));
    out.push(Check::at_least("coercivity_margin", named("coercivity", coercivity_margin(cfg, theta.theta0))?, -1e-6));

    let gap_band = named("gap", band_table(Family::DeGennes, &grid(-10.0, 10.0, 0.1), 2, disc))?;
    out.push(Check::at_least("gap_certificate", gap_band.gaps[0], 0.1));

    let plus1 = named("plus", asymptotics_plus(1, &[2.0, 4.0, 6.0, 8.0], disc))?;
    let plus2 = named("plus", asymptotics_plus(2, &[2.0, 4.0, 6.0, 8.0], disc))?;
    out.push(Check::at_most("plus_mu1_at_6", plus1[2].deviation.abs(), 1e-6));
    out.push(Check::at_most("plus_mu2_at_8", plus2[3].deviation.abs(), 1e-6));
    out.push(Check::holds(
        "plus_monotone",
        deviations_decrease(&plus1, 1e-10) && deviations_decrease(&plus2, 1e-10),
    ));

    let minus = named("minus", asymptotics_minus(1, &[10.0, 15.0, 20.0], disc))?;
    out.push(Check::at_most("airy_nu1_reference", (minus.nu - NU1_REFERENCE).abs(), 1e-6));
    out.push(Check::at_most("minus_ratio_at_15", minus.rows[1].error.abs(), 0.05));
    out.push(Check::holds(
        "minus_error_decreases",
        minus.rows[2].error.abs() < minus.rows[0].error.abs(),
    ));
    let minus2 = named("minus", asymptotics_minus(2, &[15.0], disc))?;
    out.push(Check::at_most("minus_ratio2_at_15_relative", (minus2.rows[0].error / minus2.nu).abs(), 0.05));

    for (alpha, k) in [(2.0, 1), (5.0, 1), (10.0, 1), (10.0, 2)] {
        let (direct, rescaled) = named("dilation", dilation_check(alpha, k, disc))?;
        out.push(Check::at_most(
            format!("dilation_alpha{alpha}_k{k}"),
            (direct - rescaled).abs(),
            1e-5,
        ));
    }

    let (m1, m2) = named("montgomery", montgomery_pair(1, disc))?;
    let (f1, _) = named("montgomery (reference)", montgomery_pair(1, &cfg.fd_reference))?;
    out.push(Check::at_least("montgomery1_positive", m1, f64::MIN_POSITIVE));
    out.push(Check::at_least("montgomery1_simple_gap", m2 - m1, 1e-7));
    out.push(Check::at_most("montgomery1_scheme_agreement", (m1 - f1).abs(), 1e-6));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [0.1, 0.2, 0.4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((log_log_slope(&x, &y) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn seeded_points_repeat_and_stay_in_the_strip() {
        let a = random_strip_points(7, 20, (-2.0, 4.0), 0.25);
        assert_eq!(a, random_strip_points(7, 20, (-2.0, 4.0), 0.25));
        assert!(a.iter().all(|(xi, _)| xi.re >= -2.0 && xi.re <= 4.0 && xi.im.abs() <= 0.25));
    }

    #[test]
    fn check_relations() {
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_least("b", 0.5, 1.0).passed);
        assert!(!Check::holds("c", false).passed);
    }
}
