//! Default numerical tolerances, kept in one place.

/// Tolerances and default knobs used across the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Eigenpairs with a larger relative residual are discarded.
    pub residual: f64,
    /// Eigenvectors with more squared mass on the last few nodes are discarded.
    pub tail_mass: f64,
    /// Number of trailing nodes inspected by the tail-mass guard.
    pub tail_nodes: usize,
    /// Bracket width (in ξ) at which the Θ₀ search stops.
    pub theta0_xi_tol: f64,
    /// Sample spacing of the final parabolic step of the Θ₀ search.
    pub theta0_parabola_step: f64,
    pub contour_nodes: usize,
    /// Allowed distance of the projection trace from the nearest integer.
    pub rank_ambiguity: f64,
    /// Allowed |trace P − 1| and ‖P² − P‖ at a certified point.
    pub projection_defect: f64,
    /// Minimum |∫(Pψ₀)²| relative to ‖ψ₀‖².
    pub overlap_min: f64,
    /// Allowed |F_quotient − F_direct|.
    pub quotient_direct: f64,
    /// Cauchy–Riemann tolerance at spacing 0.01; scales with h².
    pub cauchy_riemann_at_0_01: f64,
    /// Absolute allowance added to the truncation model of the sweep's
    /// Cauchy–Riemann tolerance (rounding of F divided by the spacing).
    pub cauchy_riemann_floor: f64,
    /// Largest strip half-width accepted by the sweep.
    pub max_strip_half_width: f64,
    /// Relative smallest singular value below which a shifted matrix counts as singular.
    pub near_singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            tail_mass: 1e-6,
            tail_nodes: 5,
            theta0_xi_tol: 1e-8,
            theta0_parabola_step: 1e-3,
            contour_nodes: 32,
            rank_ambiguity: 0.1,
            projection_defect: 1e-6,
            overlap_min: 0.5,
            quotient_direct: 1e-8,
            cauchy_riemann_at_0_01: 1e-5,
            cauchy_riemann_floor: 1e-8,
            max_strip_half_width: 0.3,
            near_singular: 1e-13,
        }
    }
}

impl Tolerances {
    /// Cauchy–Riemann tolerance for centered differences of spacing `h`.
    pub fn cauchy_riemann(&self, h: f64) -> f64 {
        self.cauchy_riemann_at_0_01 * (h / 0.01).powi(2)
    }
}
