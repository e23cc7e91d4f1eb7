//! Real bound levels at one coupling value.

use std::f64::consts::{FRAC_PI_2, PI};

use clap::Args;
use specwell::deltabarrier::delta_spectrum;
use specwell::quantization::{condition_residual, level_count, real_spectrum};
use specwell::{Complex64, Parity};

use super::{quantization_error, required, Context, Outcome, COMMON_KEYS};
use crate::config::{Model, Num};
use crate::error::{invalid, numeric, CliError};
use crate::report::{ColumnKind, Report, Table};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub model: Option<Model>,
    /// Well strength (positive).
    #[arg(long)]
    pub lambda: Option<Num>,
    /// Delta-barrier coupling.
    #[arg(long)]
    pub g: Option<Num>,
    /// Number of delta-barrier levels per parity.
    #[arg(long)]
    pub levels: Option<usize>,
}

const KEYS: [&str; 4] = ["model", "lambda", "g", "levels"];
const MAX_LEVELS: usize = 10_000;

pub fn run(args: SpectrumArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.file
        .check_keys(&[&KEYS[..], &COMMON_KEYS[..]].concat())?;
    let model = ctx.file.pick(args.model, "model")?.unwrap_or(Model::Well);
    match model {
        Model::Well => {
            if args.g.is_some() {
                return Err(invalid("--g applies to the delta model"));
            }
            let Num(lambda) = required(ctx.file.pick(args.lambda, "lambda")?, "lambda")?;
            well(lambda, ctx.tol)
        }
        Model::Delta => {
            if args.lambda.is_some() {
                return Err(invalid("--lambda applies to the well model"));
            }
            let Num(g) = required(ctx.file.pick(args.g, "g")?, "g")?;
            let n = ctx.file.pick(args.levels, "levels")?.unwrap_or(5);
            if n == 0 || n > MAX_LEVELS {
                return Err(invalid(format!("--levels must lie in 1..={MAX_LEVELS}")));
            }
            delta(g, n, ctx.tol)
        }
    }
}

fn well(lambda: f64, tol: f64) -> Result<Outcome, CliError> {
    if lambda <= 0.0 || lambda > 1e6 {
        return Err(invalid(format!(
            "--lambda must lie in (0, 1e6], got {lambda}"
        )));
    }
    let table = real_spectrum(lambda).map_err(quantization_error)?;
    let mut report = Report::new("spectrum");
    report.meta("model", "well");
    report.meta("lambda", lambda);
    report.meta("tol", tol);
    let mut t = Table::new(
        "levels",
        &[
            ("index", ColumnKind::Scalar),
            ("parity", ColumnKind::Scalar),
            ("phi", ColumnKind::Scalar),
            ("energy", ColumnKind::Scalar),
            ("sign", ColumnKind::Scalar),
            ("residual", ColumnKind::Scalar),
        ],
    );
    let mut worst: f64 = 0.0;
    for lvl in &table.levels {
        let r = condition_residual(
            lvl.parity,
            Complex64::new(lvl.phi, 0.0),
            Complex64::new(lvl.sign * lambda, 0.0),
        )
        .norm()
            / (1.0 + lambda);
        worst = worst.max(r);
        t.push(vec![
            lvl.index.into(),
            lvl.parity.name().into(),
            lvl.phi.into(),
            lvl.energy.into(),
            lvl.sign.into(),
            r.into(),
        ]);
    }
    if worst > tol {
        return Err(numeric(format!(
            "level residual {worst:e} exceeds tolerance {tol:e}"
        )));
    }
    report.tables.push(t);
    report.note("count", table.levels.len());
    report.note("expected_count", level_count(lambda));
    report.note("max_residual", worst);

    // Intersections of |cos φ| / |sin φ| arcs with the line φ/λ.
    let arcs = table.levels.len();
    let mut plot = Plot::new(
        &format!("Bound levels at lambda = {lambda}"),
        "phi",
        "value",
    );
    plot.y_range = Some((0.0, 1.1));
    for m in 1..=arcs {
        let parity = if m % 2 == 1 {
            Parity::Even
        } else {
            Parity::Odd
        };
        let (a, b) = ((m - 1) as f64 * FRAC_PI_2, m as f64 * FRAC_PI_2);
        let pts = (0..=60)
            .map(|j| {
                let phi = a + (b - a) * j as f64 / 60.0;
                let v = match parity {
                    Parity::Even => phi.cos().abs(),
                    Parity::Odd => phi.sin().abs(),
                };
                (phi, v)
            })
            .collect();
        let label = if m <= 2 {
            format!("|{}| arcs", if m == 1 { "cos" } else { "sin" })
        } else {
            String::new()
        };
        let style = if m % 2 == 1 {
            Style::Line
        } else {
            Style::Dashed
        };
        plot.series
            .push(Series::new(label, style, pts).colored(1 - m % 2));
    }
    let end = arcs as f64 * FRAC_PI_2;
    plot.series.push(
        Series::new(
            "phi / lambda",
            Style::Line,
            vec![(0.0, 0.0), (end, end / lambda)],
        )
        .colored(3),
    );
    plot.series.push(
        Series::new(
            "levels",
            Style::Markers,
            table
                .levels
                .iter()
                .map(|l| (l.phi, l.phi / lambda))
                .collect(),
        )
        .colored(4),
    );
    Ok(Outcome { report, plot })
}

fn delta(g: f64, n: usize, tol: f64) -> Result<Outcome, CliError> {
    let spec = delta_spectrum(g, n).map_err(numeric)?;
    let mut report = Report::new("spectrum");
    report.meta("model", "delta");
    report.meta("g", g);
    report.meta("levels", n);
    report.meta("tol", tol);
    let mut even = Table::new(
        "even",
        &[
            ("index", ColumnKind::Scalar),
            ("k", ColumnKind::Complex),
            ("energy", ColumnKind::Complex),
            ("residual", ColumnKind::Scalar),
        ],
    );
    let mut worst: f64 = 0.0;
    for lvl in &spec.even {
        let r = lvl.scaled_residual();
        worst = worst.max(r);
        even.push(vec![
            lvl.index.into(),
            lvl.k.into(),
            lvl.energy.into(),
            r.into(),
        ]);
    }
    if worst > tol {
        return Err(numeric(format!(
            "level residual {worst:e} exceeds tolerance {tol:e}"
        )));
    }
    let mut odd = Table::new(
        "odd",
        &[
            ("index", ColumnKind::Scalar),
            ("k", ColumnKind::Scalar),
            ("energy", ColumnKind::Scalar),
        ],
    );
    for &(l, k) in &spec.odd {
        odd.push(vec![l.into(), k.into(), (k * k).into()]);
    }
    report.tables.push(even);
    report.tables.push(odd);
    report.note("max_residual", worst);

    // −k cot k against the horizontal line g; real k only.
    let kmax = n as f64 * PI;
    let mut plot = Plot::new(&format!("Even levels at g = {g}"), "k", "-k cot k");
    let span = 3.0 * (g.abs() + 5.0);
    plot.y_range = Some((-span, span));
    for l in 0..n {
        let (a, b) = (l as f64 * PI + 1e-3, (l + 1) as f64 * PI - 1e-3);
        let pts = (0..=120)
            .map(|j| {
                let k = a + (b - a) * j as f64 / 120.0;
                (k, -k / k.tan())
            })
            .collect();
        plot.series
            .push(Series::new(if l == 0 { "-k cot k" } else { "" }, Style::Line, pts).colored(0));
    }
    plot.series
        .push(Series::new("g", Style::Dashed, vec![(0.0, g), (kmax, g)]).colored(3));
    plot.series.push(
        Series::new(
            "levels",
            Style::Markers,
            spec.even
                .iter()
                .filter(|l| l.k.im.abs() < 1e-12)
                .map(|l| (l.k.re, g))
                .collect(),
        )
        .colored(4),
    );
    Ok(Outcome { report, plot })
}
