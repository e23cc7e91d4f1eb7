//! Cauchy-integral series and their convergence against direct values.

use clap::Args;
use specwell::perturbation::{convergence_report, radius_limit, series_coefficients, SeriesCenter};

use super::{candidates, perturbation_error, required, Context, Outcome, COMMON_KEYS};
use crate::config::{family, Center, ComplexList, Model, Num, ParityArg};
use crate::error::{invalid, CliError};
use crate::report::{ColumnKind, Report, Table};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long)]
    pub parity: Option<ParityArg>,
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long)]
    pub center: Option<Center>,
    /// Number of coefficients.
    #[arg(long, short = 'K')]
    pub order: Option<usize>,
    /// Contour radius; defaults to a safe margin past the sheet's branch points.
    #[arg(long)]
    pub radius: Option<Num>,
    /// Points `re,im;...` at which partial sums are compared with direct values.
    #[arg(long, allow_hyphen_values = true)]
    pub eval: Option<ComplexList>,
}

const KEYS: [&str; 7] = [
    "model", "parity", "level", "center", "order", "radius", "eval",
];
const MAX_ORDER: usize = 400;

pub fn run(args: SeriesArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.file
        .check_keys(&[&KEYS[..], &COMMON_KEYS[..]].concat())?;
    let model = ctx.file.pick(args.model, "model")?.unwrap_or(Model::Well);
    let parity = ctx
        .file
        .pick(args.parity, "parity")?
        .unwrap_or(ParityArg::Even);
    let fam = family(model, parity);
    let level = required(ctx.file.pick(args.level, "level")?, "level")?;
    let center = ctx
        .file
        .pick(args.center, "center")?
        .unwrap_or(Center::Infinity)
        .center();
    let order = ctx.file.pick(args.order, "order")?.unwrap_or(30);
    if order == 0 || order > MAX_ORDER {
        return Err(invalid(format!("--order must lie in 1..={MAX_ORDER}")));
    }
    let radius = ctx.file.pick(args.radius, "radius")?.map(|Num(r)| r);
    if radius.is_some_and(|r| r <= 0.0) {
        return Err(invalid("--radius must be positive"));
    }
    let evals = ctx
        .file
        .pick(args.eval, "eval")?
        .map_or_else(Vec::new, |ComplexList(v)| v);
    if evals.iter().any(|p| p.norm() == 0.0) && center == SeriesCenter::Infinity {
        return Err(invalid(
            "evaluation points must be nonzero for a series about infinity",
        ));
    }

    let limit = radius_limit(fam, level, center).map_err(|e| perturbation_error(e, &[]))?;
    let reach = evals
        .iter()
        .map(|p| p.norm())
        .fold(radius.unwrap_or(2.0 * limit), f64::max);
    let known = candidates(fam, reach)?;
    let exp = series_coefficients(fam, level, order, radius, center)
        .map_err(|e| perturbation_error(e, &known))?;
    let rows = convergence_report(&exp, &evals).map_err(|e| perturbation_error(e, &known))?;

    let mut report = Report::new("series");
    report.meta("model", model.to_string());
    if model == Model::Well {
        report.meta("parity", parity.to_string());
    }
    report.meta("level", level);
    report.meta("center", center.name());
    report.meta("order", order);
    report.meta("contour_radius", exp.contour_radius);
    report.meta("nodes", exp.nodes);
    report.meta("tol", ctx.tol);

    let mut coeffs = Table::new(
        "coefficients",
        &[("n", ColumnKind::Scalar), ("a", ColumnKind::Complex)],
    );
    for (k, a) in exp.coefficients.iter().enumerate() {
        coeffs.push(vec![k.into(), (*a).into()]);
    }
    report.tables.push(coeffs);
    if !rows.is_empty() {
        let names: Vec<String> = (1..=rows.len()).map(|j| format!("err_p{j}")).collect();
        let mut cols = vec![("terms", ColumnKind::Scalar)];
        cols.extend(names.iter().map(|n| (n.as_str(), ColumnKind::Scalar)));
        let mut errs = Table::new("errors", &cols);
        for n in 0..order {
            let mut row = vec![(n + 1).into()];
            row.extend(rows.iter().map(|r| r.errors[n].into()));
            errs.push(row);
        }
        report.tables.push(errs);
    }

    report.note("leading_term", exp.leading_term);
    report.note("quadrature_constant", exp.quadrature_constant);
    report.note("closure_mismatch", exp.closure_mismatch);
    report.note("radius_limit", limit);
    report.note("estimated_radius", exp.estimated_radius);
    for (j, r) in rows.iter().enumerate() {
        let p = j + 1;
        report.note(&format!("p{p}"), r.point);
        report.note(&format!("p{p}_direct"), r.direct);
        report.note(&format!("p{p}_final_error"), r.final_error());
        report.note(
            &format!("p{p}_observed_ratio"),
            r.observed_ratio.unwrap_or(f64::NAN),
        );
        report.note(&format!("p{p}_expected_ratio"), r.expected_ratio);
        report.note(&format!("p{p}_diverging"), r.diverging);
    }

    let mut plot = Plot::new(
        &format!("Series for level {level} about {}", center.name()),
        "terms",
        "relative error",
    );
    plot.log_y = true;
    for (j, r) in rows.iter().enumerate() {
        let pts = r
            .errors
            .iter()
            .enumerate()
            .map(|(n, e)| ((n + 1) as f64, *e))
            .collect();
        plot.series.push(Series::new(
            format!("p{} = {:.4} {:+.4}i", j + 1, r.point.re, r.point.im),
            Style::Line,
            pts,
        ));
    }
    if rows.is_empty() {
        let pts = exp
            .coefficients
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64, a.norm()))
            .collect();
        plot.y_label = "|a_n|".into();
        plot.series.push(Series::new("|a_n|", Style::Markers, pts));
    }
    Ok(Outcome { report, plot })
}
