use qdeform_core::{
    alpha_divergence, alpha_from_q, build_pmf, clt_residuals, density_sup_distance, estimate_c_q,
    fit_q_gaussian, ldp_convergence_series, q_divergence, rate_function, scaled_density, stirling_leading,
    stirling_residual, DeformationParameter, NormMeta, ProbVector, QBinomialSpec, QFactorialTable,
};

use crate::args::{CltArgs, CollapseArgs, Command, DivergenceArgs, LdpArgs, PmfArgs, StirlingArgs};
use crate::error::CliError;
use crate::report::{Report, Summary};

type Result<T> = std::result::Result<T, CliError>;

const PMF_COLUMNS: [&str; 5] = ["k", "x_k", "qlog_weight", "prob", "scaled_density"];
const STIRLING_COLUMNS: [&str; 6] = ["n", "exact", "leading", "refined", "err_leading", "err_refined"];
const DIVERGENCE_COLUMNS: [&str; 5] = ["q", "alpha", "D_q", "D_alpha", "rate"];
const LDP_COLUMNS: [&str; 4] = ["n", "scaled_stat", "target", "abs_err"];
const CLT_COLUMNS: [&str; 3] = ["k", "x_k", "residual"];
const COLLAPSE_COLUMNS: [&str; 6] = ["series_id", "x", "g", "fit_beta", "fit_amplitude", "sup_error"];

/// Command name and parameters, known before any computation runs.
pub fn describe(command: &Command) -> Summary {
    match command {
        Command::Pmf(a) => {
            let mut s = Summary::new("pmf");
            s.float_param("q", a.q).param("n", a.n).float_param("r", a.r).param("mode", a.mode.name());
            s
        }
        Command::Stirling(a) => {
            let mut s = Summary::new("stirling");
            s.float_param("q", a.q).param("n_list", join(&a.n_list)).param("n_ref", a.n_ref);
            s
        }
        Command::Divergence(a) => {
            let mut s = Summary::new("divergence");
            s.float_param("q", a.q).float_param("x", a.x).float_param("r", a.r);
            s
        }
        Command::Ldp(a) => {
            let mut s = Summary::new("ldp");
            s.float_param("q", a.q)
                .float_param("r", a.r)
                .float_param("x", a.x)
                .param("n_list", join(&a.n_list))
                .param("mode", a.mode.name())
                .param("statistic", a.statistic.name());
            s
        }
        Command::Clt(a) => {
            let mut s = Summary::new("clt");
            s.float_param("q", a.q)
                .float_param("r", a.r)
                .param("n", a.n)
                .float_param("window", a.window)
                .param("mode", a.mode.name());
            s
        }
        Command::Collapse(a) => {
            let mut s = Summary::new("collapse");
            s.float_param("q", a.q)
                .float_param("r", a.r)
                .param("n_list", join(&a.n_list))
                .float_param("window", a.window)
                .param("mode", a.mode.name());
            s
        }
        Command::Report(_) => Summary::new("report"),
    }
}

pub fn run(command: &Command, summary: Summary) -> Result<Report> {
    match command {
        Command::Pmf(a) => pmf(a, summary),
        Command::Stirling(a) => stirling(a, summary),
        Command::Divergence(a) => divergence(a, summary),
        Command::Ldp(a) => ldp(a, summary),
        Command::Clt(a) => clt(a, summary),
        Command::Collapse(a) => collapse(a, summary),
        Command::Report(_) => unreachable!("report is handled without computation"),
    }
}

fn join(ns: &[usize]) -> String {
    ns.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn param(q: f64) -> Result<DeformationParameter> {
    Ok(DeformationParameter::new(q)?)
}

fn check_n_list(ns: &[usize], min: usize) -> Result<()> {
    if ns.is_empty() {
        return Err(CliError::usage("--n-list", "needs at least one size"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::usage("--n-list", "sizes must be unique and increasing"));
    }
    if ns[0] < min {
        return Err(CliError::usage("--n-list", format!("sizes must be at least {min}")));
    }
    Ok(())
}

fn check_unit(flag: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(CliError::usage(flag, format!("{v} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

fn pmf(a: &PmfArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    let spec = QBinomialSpec::new(p, a.n, a.r, a.mode.into())?;
    let table = QFactorialTable::new(p, a.n);
    let pmf = build_pmf(&spec, &table)?;
    let mut report = Report::new(summary, &PMF_COLUMNS);
    for k in 0..=a.n {
        report.push(vec![
            k.into(),
            pmf.grid[k].into(),
            pmf.qlog_weights[k].into(),
            pmf.probs[k].into(),
            (pmf.sigma_q * pmf.probs[k]).into(),
        ]);
    }
    let norm = match pmf.norm_meta {
        NormMeta::Exact { t } => t,
        NormMeta::Shift { shift } => shift,
    };
    report
        .summary
        .metric("peak_index", pmf.peak_index as f64)
        .metric("peak_probability", pmf.peak_probability())
        .metric("sigma_q", pmf.sigma_q)
        .metric("normalization", norm);
    Ok(report)
}

fn stirling(a: &StirlingArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    check_n_list(&a.n_list, 1)?;
    if a.n_ref < 1000 {
        return Err(CliError::usage("--n-ref", "must be at least 1000"));
    }
    let max_n = (*a.n_list.last().unwrap()).max(2 * a.n_ref);
    let table = QFactorialTable::new(p, max_n);
    let c = estimate_c_q(&table, a.n_ref)?;
    let mut report = Report::new(summary, &STIRLING_COLUMNS);
    let mut points = Vec::new();
    for &n in &a.n_list {
        let exact = table.q_ln_factorial(n)?;
        let leading = stirling_leading(p, n)?;
        let residual = stirling_residual(&table, n, &c)?;
        report.push(vec![
            n.into(),
            exact.into(),
            leading.into(),
            (exact - residual).into(),
            (exact - leading).abs().into(),
            residual.abs().into(),
        ]);
        points.push((n, residual.abs()));
    }
    let slope = qdeform_core::residual_decay_slope(&points).unwrap_or(f64::NAN);
    report
        .summary
        .metric("c_q", c.c_q)
        .metric("residual_bound", c.residual_bound)
        .metric("refined_slope", slope);
    Ok(report)
}

fn divergence(a: &DivergenceArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    check_unit("--x", a.x)?;
    check_unit("--r", a.r)?;
    let px = ProbVector::binary(a.x)?;
    let pr = ProbVector::binary(a.r)?;
    let alpha = alpha_from_q(a.q);
    let d_q = q_divergence(p, &px, &pr)?;
    let d_alpha = alpha_divergence(alpha, &px, &pr)?;
    let rate = rate_function(p, a.x, a.r)?;
    let mut report = Report::new(summary, &DIVERGENCE_COLUMNS);
    report.push(vec![a.q.into(), alpha.into(), d_q.into(), d_alpha.into(), rate.into()]);
    report
        .summary
        .metric("D_q", d_q)
        .metric("D_alpha", d_alpha)
        .metric("rate", rate);
    Ok(report)
}

fn ldp(a: &LdpArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    check_unit("--x", a.x)?;
    check_unit("--r", a.r)?;
    check_n_list(&a.n_list, 2)?;
    let series = ldp_convergence_series(p, a.r, a.x, &a.n_list, a.mode.into(), a.statistic.into())?;
    let mut report = Report::new(summary, &LDP_COLUMNS);
    for e in &series.entries {
        let err = (e.scaled_stat - series.target).abs();
        report.push(vec![e.n.into(), e.scaled_stat.into(), series.target.into(), err.into()]);
    }
    let last = series.entries.last().expect("size list is non-empty");
    let err = (last.scaled_stat - series.target).abs();
    report
        .summary
        .metric("target", series.target)
        .metric("final_stat", last.scaled_stat)
        .metric("final_abs_err", err)
        .metric("final_rel_err", err / series.target.abs());
    Ok(report)
}

fn clt(a: &CltArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    let spec = QBinomialSpec::new(p, a.n, a.r, a.mode.into())?;
    let table = QFactorialTable::new(p, a.n);
    let pmf = build_pmf(&spec, &table)?;
    let res = clt_residuals(&pmf, a.window)?;
    let mut report = Report::new(summary, &CLT_COLUMNS);
    for c in &res.residuals {
        report.push(vec![c.k.into(), c.x_k.into(), c.residual.into()]);
    }
    let expected = -1.0 / ((a.n as f64).powf(a.q) * a.r * (1.0 - a.r));
    report
        .summary
        .metric("max_abs_residual", res.max_abs_residual)
        .metric("points", res.residuals.len() as f64)
        .metric("curvature", pmf.qlog_curvature().unwrap_or(f64::NAN))
        .metric("curvature_expected", expected);
    Ok(report)
}

fn collapse(a: &CollapseArgs, summary: Summary) -> Result<Report> {
    let p = param(a.q)?;
    check_n_list(&a.n_list, 2)?;
    if a.window.is_nan() || a.window <= 0.0 {
        return Err(CliError::usage("--window", "must be positive"));
    }
    let table = QFactorialTable::new(p, *a.n_list.last().unwrap());
    let mut report = Report::new(summary, &COLLAPSE_COLUMNS);
    let mut series = Vec::new();
    for &n in &a.n_list {
        let spec = QBinomialSpec::new(p, n, a.r, a.mode.into())?;
        let pmf = build_pmf(&spec, &table).map_err(|e| e.at_size(n))?;
        let density = scaled_density(&pmf);
        let fit = fit_q_gaussian(&density, p, a.window).map_err(|e| e.at_size(n))?;
        for pt in density.iter().filter(|pt| pt.x.abs() <= a.window) {
            report.push(vec![
                n.into(),
                pt.x.into(),
                pt.g.into(),
                fit.beta.into(),
                fit.amplitude.into(),
                fit.sup_error.into(),
            ]);
        }
        report
            .summary
            .metric(&format!("beta_{n}"), fit.beta)
            .metric(&format!("amplitude_{n}"), fit.amplitude);
        series.push((density, fit));
    }
    if let [(first, fit_first), .., (last, fit_last)] = series.as_slice() {
        let peak = last
            .iter()
            .filter(|pt| pt.x.abs() <= a.window)
            .map(|pt| pt.g)
            .fold(0.0, f64::max);
        report
            .summary
            .metric("beta_rel_diff", (fit_first.beta - fit_last.beta).abs() / fit_last.beta)
            .metric("sup_distance_rel", density_sup_distance(first, last, a.window) / peak);
    }
    Ok(report)
}
