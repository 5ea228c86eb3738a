//! Eigenvalues, band functions, the minimum Θ₀ and the two asymptotic regimes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::operator::{assemble, AssembledOperator, Discretization, Family, OperatorSpec};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    ByRealPart,
    ByProjectionMatch,
}

/// Leading eigenpairs of a discretized operator. Eigenvectors are columns in
/// the L²-orthonormal coordinates of [`AssembledOperator::standard_form`]
/// (for finite differences: the weight-scaled grid values).
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: CMatrix,
    pub residual_norms: Vec<f64>,
    pub tail_masses: Vec<f64>,
    pub ordering: Ordering,
    /// Branches dropped by the retention guard (counted from the first failure).
    pub discarded: usize,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The k-th (1-based) eigenvalue, which must be real to solver tolerance.
    pub fn real_eigenvalue(&self, k: usize) -> Result<f64> {
        let lam = self.eigenvalues.get(k.wrapping_sub(1)).ok_or_else(|| Error::Eigensolver {
            detail: format!("branch {k} not retained ({} available, {} discarded)", self.len(), self.discarded),
            condition: f64::NAN,
        })?;
        if lam.im.abs() > 1e-8 * lam.re.abs().max(1.0) {
            return Err(Error::Eigensolver {
                detail: format!("branch {k} is not real: {lam}"),
                condition: f64::NAN,
            });
        }
        Ok(lam.re)
    }

    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k - 1).into_owned()
    }
}

/// The `k_max` lowest eigenpairs (by real part).
pub fn eigs(op: &AssembledOperator, k_max: usize) -> Result<SpectrumResult> {
    eigs_with(op, k_max, &Tolerances::default())
}

pub fn eigs_with(op: &AssembledOperator, k_max: usize, tol: &Tolerances) -> Result<SpectrumResult> {
    let n = op.dim();
    if k_max == 0 || k_max > n / 4 {
        return Err(Error::Config(format!("k_max must lie in 1..={} for {n} points, got {k_max}", n / 4)));
    }
    let mut out = if let Some(tri) = op.real_tridiagonal() {
        let values = tri.lowest_eigenvalues(k_max);
        let scale = tri.inf_norm();
        let mut vectors = CMatrix::zeros(n, k_max);
        let mut residuals = Vec::with_capacity(k_max);
        let mut tails = Vec::with_capacity(k_max);
        for (j, &lam) in values.iter().enumerate() {
            let mut v = tri.eigenvector(lam);
            let (integral, tail) = op.fd_functionals(&v).expect("tridiagonal operator");
            if integral < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let av = tri.apply(&v);
            let res = av.iter().zip(&v).map(|(a, x)| (a - lam * x).powi(2)).sum::<f64>().sqrt();
            residuals.push(res);
            tails.push(tail);
            for (i, x) in v.into_iter().enumerate() {
                vectors[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Raw {
            values: values.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            vectors,
            residuals,
            tails,
            floor: residual_floor(tol, scale),
        }
    } else {
        let sf = op.standard_form()?;
        let scale = inf_norm(&sf.matrix);
        if op.is_real() {
            let eig = sf.real_part().symmetric_eigen();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let mut vectors = CMatrix::zeros(n, k_max);
            let mut values = Vec::with_capacity(k_max);
            for (j, &idx) in order.iter().take(k_max).enumerate() {
                let mut v = eig.eigenvectors.column(idx).into_owned();
                if sf.integral.dot(&v) < 0.0 {
                    v.neg_mut();
                }
                values.push(Complex64::new(eig.eigenvalues[idx], 0.0));
                for i in 0..n {
                    vectors[(i, j)] = Complex64::new(v[i], 0.0);
                }
            }
            Raw::finish(values, vectors, &sf.matrix, &sf.tail, tol, scale)
        } else {
            let mut values = linalg::complex_eigenvalues(&sf.matrix)?;
            values.sort_by(|a, b| a.re.total_cmp(&b.re));
            values.truncate(k_max);
            let mut vectors = CMatrix::zeros(n, k_max);
            for (j, &lam) in values.iter().enumerate() {
                let v = linalg::inverse_iteration(&sf.matrix, lam)?;
                vectors.set_column(j, &v);
            }
            Raw::finish(values, vectors, &sf.matrix, &sf.tail, tol, scale)
        }
    };
    let keep = (0..k_max)
        .position(|j| out.residuals[j] > out.floor || out.tails[j] > tol.tail_mass)
        .unwrap_or(k_max);
    out.values.truncate(keep);
    out.residuals.truncate(keep);
    out.tails.truncate(keep);
    Ok(SpectrumResult {
        eigenvalues: out.values,
        eigenvectors: out.vectors.columns(0, keep).into_owned(),
        residual_norms: out.residuals,
        tail_masses: out.tails,
        ordering: Ordering::ByRealPart,
        discarded: k_max - keep,
    })
}

/// Residual threshold: the configured tolerance, raised to the backward-error
/// floor of a matrix with entries of size `scale`.
fn residual_floor(tol: &Tolerances, scale: f64) -> f64 {
    tol.residual.max(64.0 * f64::EPSILON * scale)
}

fn inf_norm(m: &CMatrix) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Intermediate results before the retention guard.
struct Raw {
    values: Vec<Complex64>,
    vectors: CMatrix,
    residuals: Vec<f64>,
    tails: Vec<f64>,
    floor: f64,
}

impl Raw {
    fn finish(
        values: Vec<Complex64>,
        vectors: CMatrix,
        matrix: &CMatrix,
        tail: &linalg::RMatrix,
        tol: &Tolerances,
        scale: f64,
    ) -> Self {
        let floor = residual_floor(tol, scale);
        let tail_c = linalg::to_complex(tail);
        let mut residuals = Vec::with_capacity(values.len());
        let mut tails = Vec::with_capacity(values.len());
        for (j, &lam) in values.iter().enumerate() {
            let v = vectors.column(j);
            let r = (matrix * v - v * lam).norm() / v.norm();
            residuals.push(r);
            tails.push(((v.adjoint() * &tail_c * v)[(0, 0)].re / v.norm_squared()).abs());
        }
        Raw {
            values,
            vectors,
            residuals,
            tails,
            floor,
        }
    }
}

/// Lowest eigenvalue only, for real parameters (fast paths, no eigenvectors).
pub fn ground_energy(spec: &OperatorSpec, disc: &Discretization) -> Result<f64> {
    let op = assemble(spec, disc)?;
    if let Some(tri) = op.real_tridiagonal() {
        return Ok(tri.lowest_eigenvalues(1)[0]);
    }
    if op.is_real() {
        return Ok(op.standard_form()?.real_part().symmetric_eigenvalues().min());
    }
    Ok(eigs(&op, 1)?.eigenvalues[0].re)
}

/// Band functions sampled on a real grid.
#[derive(Debug, Clone)]
pub struct BandTable {
    pub family: Family,
    pub xi_grid: Vec<f64>,
    /// `mu[i][k-1] = μ_k(xi_grid[i])`.
    pub mu: Vec<Vec<f64>>,
    /// `gaps[k-1] = min_i μ_{k+1} − μ_k`.
    pub gaps: Vec<f64>,
    pub theta0: f64,
    pub xi0: f64,
    /// Whether (θ₀, ξ₀) come from the interior refinement or are a grid value.
    pub theta0_refined: bool,
}

impl BandTable {
    pub fn k_max(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn band(&self, k: usize) -> Vec<f64> {
        self.mu.iter().map(|row| row[k - 1]).collect()
    }
}

pub fn band_table(family: Family, xi_grid: &[f64], k_max: usize, disc: &Discretization) -> Result<BandTable> {
    if xi_grid.is_empty() {
        return Err(Error::Config("empty ξ grid".into()));
    }
    if xi_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("ξ grid must be strictly increasing".into()));
    }
    let mu: Vec<Vec<f64>> = xi_grid
        .par_iter()
        .map(|&xi| {
            let spec = OperatorSpec { family, xi: xi.into() };
            let op = assemble(&spec, disc).map_err(|e| e.at(xi))?;
            let s = eigs(&op, k_max).map_err(|e| e.at(xi))?;
            (1..=k_max).map(|k| s.real_eigenvalue(k).map_err(|e| e.at(xi))).collect()
        })
        .collect::<Result<_>>()?;
    let gaps = (0..k_max - 1)
        .map(|k| mu.iter().map(|row| row[k + 1] - row[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let (imin, _) = mu
        .iter()
        .enumerate()
        .min_by(|a, b| a.1[0].total_cmp(&b.1[0]))
        .expect("nonempty grid");
    let (mut xi0, mut theta0, mut refined) = (xi_grid[imin], mu[imin][0], false);
    if family == Family::DeGennes && imin > 0 && imin + 1 < xi_grid.len() {
        let t = find_theta0(disc, (xi_grid[imin - 1], xi_grid[imin + 1]), Tolerances::default().theta0_xi_tol)?;
        xi0 = t.xi0;
        theta0 = t.theta0;
        refined = true;
    }
    Ok(BandTable {
        family,
        xi_grid: xi_grid.to_vec(),
        mu,
        gaps,
        theta0,
        xi0,
        theta0_refined: refined,
    })
}

/// Location and value of the minimum of the de Gennes function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theta0 {
    pub xi0: f64,
    pub theta0: f64,
    pub evaluations: usize,
}

impl Theta0 {
    /// `|Θ₀ − ξ₀²|`, which vanishes because `μ'(ξ₀) = (ξ₀² − μ(ξ₀))ψ(0)²`.
    pub fn feynman_hellmann_residual(&self) -> f64 {
        (self.theta0 - self.xi0 * self.xi0).abs()
    }
}

/// Golden-section search for the minimum of `ξ ↦ μ₁(ξ)` on `interval`,
/// followed by a symmetric three-point parabolic step.
pub fn find_theta0(disc: &Discretization, interval: (f64, f64), tol: f64) -> Result<Theta0> {
    find_theta0_with(disc, interval, tol, &Tolerances::default())
}

pub fn find_theta0_with(
    disc: &Discretization,
    interval: (f64, f64),
    tol: f64,
    tolerances: &Tolerances,
) -> Result<Theta0> {
    let (lo, hi) = interval;
    if lo.is_nan() || hi.is_nan() || lo >= hi || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("bad search interval [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut evaluations = 0;
    let mut mu = |xi: f64| -> Result<f64> {
        evaluations += 1;
        ground_energy(&OperatorSpec::de_gennes(xi), disc).map_err(|e| e.at(xi))
    };
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (mu(a)?, mu(b)?);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (mu(c)?, mu(d)?);
    if fc.min(fd) >= fa.min(fb) {
        return Err(Error::Bracketing { lo, hi });
    }
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = mu(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = mu(d)?;
        }
    }
    let (mut x, mut fx) = if fc < fd { (c, fc) } else { (d, fd) };

    let h = tolerances.theta0_parabola_step;
    if x - h > lo && x + h < hi {
        let (fm, fp) = (mu(x - h)?, mu(x + h)?);
        let curvature = fp - 2.0 * fx + fm;
        if curvature > 0.0 {
            let step = h * (fp - fm) / (2.0 * curvature);
            if step.abs() <= h {
                let xn = x - step;
                let fxn = mu(xn)?;
                if fxn <= fx.max(fm.min(fp)) {
                    x = xn;
                    fx = fxn;
                }
            }
        }
    }
    if x - lo <= tol || hi - x <= tol {
        return Err(Error::Bracketing { lo, hi });
    }
    Ok(Theta0 {
        xi0: x,
        theta0: fx,
        evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlusRow {
    pub xi: f64,
    pub mu: f64,
    /// `μ_k(ξ) − (2k − 1)`.
    pub deviation: f64,
}

/// Deviation of `μ_k(ξ)` from its limit `2k − 1` as ξ → +∞.
pub fn asymptotics_plus(k: usize, xi_list: &[f64], disc: &Discretization) -> Result<Vec<PlusRow>> {
    if k == 0 {
        return Err(Error::Config("band index starts at 1".into()));
    }
    if xi_list.iter().any(|&x| x < 0.0) || xi_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("ξ list must be increasing and non-negative".into()));
    }
    let limit = (2 * k - 1) as f64;
    xi_list
        .par_iter()
        .map(|&xi| {
            let op = assemble(&OperatorSpec::de_gennes(xi), disc)?;
            let mu = eigs(&op, k)?.real_eigenvalue(k).map_err(|e| e.at(xi))?;
            Ok(PlusRow {
                xi,
                mu,
                deviation: mu - limit,
            })
        })
        .collect()
}

/// Whether `|deviation|` decreases strictly along the rows, treating pairs
/// that are both at or below `floor` (the resolution of the computed values)
/// as converged.
pub fn deviations_decrease(rows: &[PlusRow], floor: f64) -> bool {
    rows.windows(2).all(|w| {
        let (a, b) = (w[0].deviation.abs(), w[1].deviation.abs());
        b < a || a.max(b) <= floor
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinusRow {
    pub alpha: f64,
    pub mu: f64,
    /// `(μ_k(−α) − α²)/α^{2/3}`.
    pub ratio: f64,
    /// `ratio − ν_k`.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct MinusReport {
    pub k: usize,
    /// k-th eigenvalue of the Airy comparison operator.
    pub nu: f64,
    pub rows: Vec<MinusRow>,
    pub warnings: Vec<String>,
}

/// Rescaled band function `(μ_k(−α) − α²)/α^{2/3}` against its limit `ν_k`.
pub fn asymptotics_minus(k: usize, alpha_list: &[f64], disc: &Discretization) -> Result<MinusReport> {
    if k == 0 {
        return Err(Error::Config("band index starts at 1".into()));
    }
    if alpha_list.iter().any(|&a| a < 2.0) || alpha_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("α list must be increasing with α >= 2".into()));
    }
    let airy = assemble(&OperatorSpec::airy_comparison(), disc)?;
    let nu = eigs(&airy, k)?.real_eigenvalue(k)?;
    let results: Vec<(MinusRow, Vec<String>)> = alpha_list
        .par_iter()
        .map(|&alpha| {
            let op = assemble(&OperatorSpec::de_gennes(-alpha), disc)?;
            let s = eigs(&op, k)?;
            let mu = s.real_eigenvalue(k).map_err(|e| e.at(-alpha))?;
            let ratio = (mu - alpha * alpha) / alpha.powf(2.0 / 3.0);
            let mut warnings = Vec::new();
            // boundary layer of width (2α)^{-1/3} at t = 0
            let layer = (2.0 * alpha).powf(-1.0 / 3.0);
            if op.disc.scheme == crate::operator::Scheme::FiniteDifference2 && op.mean_spacing > 0.05 * layer {
                warnings.push(format!(
                    "alpha = {alpha}: grid spacing {:.3e} is coarse against the boundary layer {layer:.3e}",
                    op.mean_spacing
                ));
            }
            if s.tail_masses[k - 1] > 1e-12 {
                warnings.push(format!(
                    "alpha = {alpha}: eigenvector mass {:.3e} near the truncation point T = {}",
                    s.tail_masses[k - 1], op.truncation
                ));
            }
            Ok((
                MinusRow {
                    alpha,
                    mu,
                    ratio,
                    error: ratio - nu,
                },
                warnings,
            ))
        })
        .collect::<Result<_>>()?;
    let (rows, warnings): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(MinusReport {
        k,
        nu,
        rows,
        warnings: warnings.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_point_gives_odd_oscillator_levels() {
        let op = assemble(&OperatorSpec::de_gennes(0.0), &Discretization::collocation(80)).unwrap();
        let s = eigs(&op, 3).unwrap();
        for (k, lam) in s.real_eigenvalues().iter().enumerate() {
            let exact = 4.0 * (k as f64 + 1.0) - 3.0;
            assert!((lam - exact).abs() < 1e-9, "k={} {lam}", k + 1);
        }
        assert!(s.residual_norms.iter().all(|&r| r < 1e-8));
        assert_eq!(s.ordering, Ordering::ByRealPart);
    }

    #[test]
    fn k_max_guard() {
        let op = assemble(&OperatorSpec::de_gennes(0.0), &Discretization::collocation(16)).unwrap();
        assert!(matches!(eigs(&op, 5), Err(Error::Config(_))));
        assert!(matches!(eigs(&op, 0), Err(Error::Config(_))));
        assert!(eigs(&op, 4).is_ok());
    }

    #[test]
    fn polluted_branch_is_discarded() {
        // truncation at T = 3 leaves far too much mass at the Dirichlet end
        let disc = Discretization::collocation(40).with_truncation(3.0);
        let op = assemble(&OperatorSpec::de_gennes(2.5), &disc).unwrap();
        let s = eigs(&op, 2).unwrap();
        assert!(s.discarded > 0);
        assert!(s.real_eigenvalue(2).is_err());
    }

    #[test]
    fn complex_parameter_eigenpairs_have_small_residuals() {
        let op = assemble(&OperatorSpec::de_gennes(Complex64::new(0.8, 0.2)), &Discretization::collocation(48)).unwrap();
        let s = eigs(&op, 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.residual_norms.iter().all(|&r| r < 1e-8), "{:?}", s.residual_norms);
        assert!(s.eigenvalues.windows(2).all(|w| w[0].re <= w[1].re));
    }

    #[test]
    fn fd_and_dense_paths_agree() {
        let disc = Discretization::finite_difference(400);
        let op = assemble(&OperatorSpec::de_gennes(0.3), &disc).unwrap();
        let tri = eigs(&op, 2).unwrap();
        let dense = op.standard_form().unwrap().real_part().symmetric_eigenvalues();
        let mut dense: Vec<f64> = dense.iter().copied().collect();
        dense.sort_by(f64::total_cmp);
        for (lam, d) in tri.eigenvalues.iter().zip(&dense) {
            assert!((lam.re - d).abs() < 1e-9);
        }
    }

    #[test]
    fn band_table_rejects_bad_grids() {
        let disc = Discretization::collocation(32);
        assert!(band_table(Family::DeGennes, &[], 2, &disc).is_err());
        assert!(band_table(Family::DeGennes, &[1.0, 0.0], 2, &disc).is_err());
    }

    #[test]
    fn theta0_bracketing_error() {
        let disc = Discretization::collocation(48);
        let err = find_theta0(&disc, (2.0, 3.0), 1e-6).unwrap_err();
        assert!(matches!(err, Error::Bracketing { .. }));
    }

    #[test]
    fn decreasing_with_floor() {
        let row = |xi, d| PlusRow { xi, mu: 0.0, deviation: d };
        assert!(deviations_decrease(&[row(1.0, -0.1), row(2.0, 1e-3), row(3.0, 1e-14), row(4.0, 2e-14)], 1e-12));
        assert!(!deviations_decrease(&[row(1.0, 1e-3), row(2.0, 1e-2)], 1e-12));
    }
}
