//! Subcommand implementations. Each returns a [`Report`] and whether its
//! verification criteria held.

use degennes::holomorphic::grid;
use degennes::spectrum::deviations_decrease;
use degennes::verify::{run_suite, SuiteConfig};
use degennes::{
    asymptotics_minus, asymptotics_plus, band_table, find_theta0, strip_sweep, Discretization, Error, Family, Scheme,
    SweepConfig,
};

use crate::args::{Command, Global, SchemeArg, Side};
use crate::output::{Cell, Report};

/// Outcome of a subcommand that produced output.
pub struct Outcome {
    pub report: Report,
    /// False when a verification criterion failed (exit code 3).
    pub verified: bool,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Self { report, verified: true }
    }
}

fn scheme_of(arg: SchemeArg) -> Scheme {
    match arg {
        SchemeArg::Fd => Scheme::FiniteDifference2,
        SchemeArg::Colloc => Scheme::Collocation,
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::FiniteDifference2 => "fd",
        Scheme::Collocation => "colloc",
    }
}

/// Default resolution per command and scheme. Finite differences are
/// tridiagonal on the real axis, so they get fine grids there; commands
/// that need dense complex matrices use modest sizes.
pub fn default_points(command: &Command, scheme: Scheme) -> usize {
    let dense = matches!(command, Command::Extend { .. } | Command::Check { .. });
    match (scheme, dense) {
        (Scheme::Collocation, true) if matches!(command, Command::Extend { .. }) => 64,
        (Scheme::Collocation, _) => 96,
        (Scheme::FiniteDifference2, true) => 200,
        (Scheme::FiniteDifference2, false) => 20_000,
    }
}

fn discretization(global: &Global, command: &Command, scheme: Scheme, n_points: Option<usize>) -> Discretization {
    let n = n_points.unwrap_or_else(|| default_points(command, scheme));
    let disc = Discretization {
        scheme,
        truncation: degennes::Truncation::Auto,
        n_points: n,
    };
    match global.truncation.0 {
        Some(t) => disc.with_truncation(t),
        None => disc,
    }
}

fn describe(report: &mut Report, command: &str, disc: &Discretization) {
    report
        .meta("command", command)
        .meta("scheme", scheme_name(disc.scheme))
        .meta("n_points", disc.n_points);
    match disc.truncation {
        degennes::Truncation::Auto => report.meta("truncation", "auto"),
        degennes::Truncation::Fixed(t) => report.meta("truncation", t),
    };
}

fn check_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0 && from <= to) {
        return Err(Error::Config(format!(
            "grid needs finite from <= to and a positive step, got {from}, {to}, {step}"
        )));
    }
    Ok(grid(from, to, step))
}

fn band_report(family: Family, xi: &[f64], k: usize, disc: &Discretization, name: &str) -> Result<Report, Error> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let table = band_table(family, xi, k, disc)?;
    let mut columns = vec!["xi".to_string()];
    columns.extend((1..=k).map(|i| format!("mu_{i}")));
    columns.extend((1..k).map(|i| format!("gap_{i}")));
    let mut report = Report::new(columns);
    describe(&mut report, name, disc);
    report.meta("k", k);
    for (x, mu) in table.xi_grid.iter().zip(&table.mu) {
        let mut row = vec![Cell::Num(*x)];
        row.extend(mu.iter().map(|&m| Cell::Num(m)));
        row.extend(mu.windows(2).map(|w| Cell::Num(w[1] - w[0])));
        report.row(row);
    }
    for (i, g) in table.gaps.iter().enumerate() {
        report.summary(&format!("min_gap_{}", i + 1), *g);
    }
    if family == Family::DeGennes {
        report
            .summary("theta0", table.theta0)
            .summary("xi0", table.xi0)
            .summary("theta0_refined", table.theta0_refined);
        if k >= 2 {
            report.summary("r0", degennes::estimate_r0(&table)?);
        }
    }
    Ok(report)
}

fn parse_points(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse `{s}` as a number")))
        })
        .collect()
}

/// Short machine-readable tag for a per-point failure.
pub fn status_token(e: &Error) -> &'static str {
    match e {
        Error::AtParameter { source, .. } => status_token(source),
        Error::RankNotOne { .. } => "rank_not_one",
        Error::RankAmbiguity { .. } => "rank_ambiguous",
        Error::StripExceeded { .. } => "strip_exceeded",
        Error::Disagreement { .. } => "quotient_direct_mismatch",
        Error::Contour { .. } | Error::NearSingular { .. } => "near_singular",
        _ => "numerical_failure",
    }
}

pub fn run(global: &Global, command: &Command) -> Result<Outcome, Error> {
    let scheme = scheme_of(global.scheme);
    let disc = discretization(global, command, scheme, global.n_points);
    disc.validate()?;
    match command {
        Command::Band { from, to, step, k } => {
            let xi = check_grid(*from, *to, *step)?;
            Ok(Outcome::ok(band_report(Family::DeGennes, &xi, *k, &disc, "band")?))
        }
        Command::Montgomery { n, from, to, step, k } => {
            let xi = check_grid(*from, *to, *step)?;
            let mut report = band_report(Family::Montgomery(*n), &xi, *k, &disc, "montgomery")?;
            report.meta("n", *n);
            Ok(Outcome::ok(report))
        }
        Command::Theta0 { from, to, tol } => {
            let other = match scheme {
                Scheme::Collocation => Scheme::FiniteDifference2,
                Scheme::FiniteDifference2 => Scheme::Collocation,
            };
            let reference = discretization(global, command, other, None);
            let main = find_theta0(&disc, (*from, *to), *tol)?;
            let check = find_theta0(&reference, (*from, *to), *tol)?;
            let mut report = Report::new(
                ["theta0", "xi0", "feynman_hellmann_residual", "scheme_agreement"]
                    .map(String::from)
                    .to_vec(),
            );
            describe(&mut report, "theta0", &disc);
            report
                .meta("reference_scheme", scheme_name(reference.scheme))
                .meta("reference_n_points", reference.n_points);
            report.row(vec![
                main.theta0.into(),
                main.xi0.into(),
                main.feynman_hellmann_residual().into(),
                (main.theta0 - check.theta0).abs().into(),
            ]);
            report
                .summary("reference_theta0", check.theta0)
                .summary("evaluations", main.evaluations);
            Ok(Outcome::ok(report))
        }
        Command::Extend {
            re_from,
            re_to,
            re_step,
            eps,
            im_step,
            max_eps,
        } => {
            let mut cfg = SweepConfig::new(*re_from, *re_to, *re_step, *eps, *im_step, disc);
            cfg.n_nodes = global.contour_nodes;
            cfg.tolerances.contour_nodes = global.contour_nodes;
            cfg.tolerances.max_strip_half_width = *max_eps;
            let sweep = strip_sweep(&cfg)?;
            let columns = [
                "xi_re", "xi_im", "F_re", "F_im", "slack", "trace_re", "residual", "status",
            ];
            let mut report = Report::new(columns.map(String::from).to_vec());
            describe(&mut report, "extend", &disc);
            report.meta("contour_nodes", global.contour_nodes).meta("eps", *eps);
            let defect_tol = cfg.tolerances.projection_defect;
            for p in &sweep.points {
                let row = match &p.outcome {
                    Ok(r) => vec![
                        p.xi.re.into(),
                        p.xi.im.into(),
                        r.f.re.into(),
                        r.f.im.into(),
                        r.lower_bound_slack.into(),
                        r.rank_diag.re.into(),
                        r.eigen_residual.into(),
                        if p.certified(defect_tol) { "ok" } else { "inexact_projection" }.into(),
                    ],
                    Err(e) => {
                        let mut row = vec![Cell::Num(p.xi.re), Cell::Num(p.xi.im)];
                        row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 5));
                        row.push(status_token(e).into());
                        row
                    }
                };
                report.row(row);
            }
            let failures = sweep.uncertified().count();
            let slack_tol = 1e-8;
            let verified = sweep.passed(slack_tol);
            report
                .summary("certified_eps", sweep.certified_eps.map_or(Cell::Text("none".into()), Cell::Num))
                .summary("worst_slack", sweep.worst_slack)
                .summary("cauchy_riemann_max", sweep.cauchy_riemann_max)
                .summary("cauchy_riemann_tol", sweep.cauchy_riemann_tol)
                .summary("r0", sweep.r0)
                .summary("theta0", sweep.band.theta0)
                .summary("failed_points", failures)
                .summary("coercivity_failures", sweep.coercivity_failures)
                .summary("passed", verified);
            if sweep.coercivity_failures > 0 {
                eprintln!(
                    "note: {} points have (Im xi)^2 >= theta0, where the coercivity bound gives no invertibility",
                    sweep.coercivity_failures
                );
            }
            Ok(Outcome { report, verified })
        }
        Command::Check { seed, samples } => {
            if *samples == 0 {
                return Err(Error::Config("samples must be positive".into()));
            }
            let cfg = SuiteConfig {
                disc,
                seed: *seed,
                samples: *samples,
                n_nodes: global.contour_nodes,
                ..SuiteConfig::default()
            };
            let checks = run_suite(&cfg)?;
            let mut report = Report::new(
                ["name", "measured", "relation", "threshold", "passed"]
                    .map(String::from)
                    .to_vec(),
            );
            describe(&mut report, "check", &disc);
            report.meta("seed", seed.to_string()).meta("samples", *samples);
            for c in &checks {
                report.row(vec![
                    c.name.clone().into(),
                    c.measured.into(),
                    c.relation.symbol().into(),
                    c.threshold.into(),
                    c.passed.into(),
                ]);
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            report.summary("checks", checks.len()).summary("failed", failed);
            Ok(Outcome {
                report,
                verified: failed == 0,
            })
        }
        Command::Asymptotics { side, k, points } => match side {
            Side::Plus => {
                let xi = match points {
                    Some(p) => parse_points(p)?,
                    None => vec![2.0, 4.0, 6.0, 8.0],
                };
                let rows = asymptotics_plus(*k, &xi, &disc)?;
                let mut report = Report::new(["xi", "mu", "deviation"].map(String::from).to_vec());
                describe(&mut report, "asymptotics", &disc);
                report.meta("side", "plus").meta("k", *k);
                for r in &rows {
                    report.row(vec![r.xi.into(), r.mu.into(), r.deviation.into()]);
                }
                report.summary("limit", (2 * k - 1) as f64);
                report.summary("monotone", deviations_decrease(&rows, 1e-10));
                Ok(Outcome::ok(report))
            }
            Side::Minus => {
                let alpha = match points {
                    Some(p) => parse_points(p)?,
                    None => vec![10.0, 15.0, 20.0],
                };
                let minus = asymptotics_minus(*k, &alpha, &disc)?;
                let mut report = Report::new(["alpha", "mu", "ratio", "error"].map(String::from).to_vec());
                describe(&mut report, "asymptotics", &disc);
                report.meta("side", "minus").meta("k", *k);
                for r in &minus.rows {
                    report.row(vec![r.alpha.into(), r.mu.into(), r.ratio.into(), r.error.into()]);
                }
                for w in &minus.warnings {
                    eprintln!("warning: {w}");
                }
                report.summary("nu", minus.nu).summary("warnings", minus.warnings.len());
                Ok(Outcome::ok(report))
            }
        },
    }
}
