//! Branch-point tables.

use clap::Args;
use specwell::branchpoints::{
    delta_branchpoints, even_pseudothresholds, ground_branch_lambda, odd_pseudothresholds,
};
use specwell::quantization::{log_branch_of_phase, stationary_residual};
use specwell::{BranchKind, BranchPoint, Complex64, Parity};

use super::{branch_error, Context, Outcome, COMMON_KEYS};
use crate::config::{Model, ParityArg};
use crate::error::{invalid, numeric, CliError};
use crate::report::{ColumnKind, Report, Table};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Args)]
pub struct BranchPointArgs {
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long)]
    pub parity: Option<ParityArg>,
    /// Highest branch-point index to list.
    #[arg(long)]
    pub n: Option<usize>,
}

type Residual = Box<dyn Fn(&BranchPoint) -> f64>;

const KEYS: [&str; 3] = ["model", "parity", "n"];
const MAX_N: usize = 2000;

fn kind_name(k: BranchKind) -> &'static str {
    match k {
        BranchKind::SquareRoot => "square-root",
        BranchKind::InternalSquareRoot => "internal-square-root",
        BranchKind::Logarithmic => "logarithmic",
    }
}

/// Scaled residual of the stationary condition at a well branch point.
fn well_residual(parity: Parity, bp: &BranchPoint) -> f64 {
    let b = if bp.internal.im.abs() > 0.0 && bp.internal.re == 0.0 {
        0
    } else {
        log_branch_of_phase(bp.internal)
    };
    let sigma = bp.generator;
    let log = sigma.ln() + Complex64::new(0.0, 2.0 * std::f64::consts::PI * b as f64);
    stationary_residual(parity, sigma, b).norm()
        / (1.0 + (1.0 + sigma.norm_sqr()) * (1.0 + log.norm()))
}

/// `|sin 2k − 2k| / |2k|`, zero at `k = 0`.
fn delta_residual(k: Complex64) -> f64 {
    if k.norm() == 0.0 {
        return 0.0;
    }
    let z = k * 2.0;
    (z.sin() - z).norm() / z.norm()
}

pub fn run(args: BranchPointArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.file
        .check_keys(&[&KEYS[..], &COMMON_KEYS[..]].concat())?;
    let model = ctx.file.pick(args.model, "model")?.unwrap_or(Model::Well);
    let parity = ctx
        .file
        .pick(args.parity, "parity")?
        .unwrap_or(ParityArg::Even);
    let n = ctx.file.pick(args.n, "n")?.unwrap_or(5);
    if n == 0 || n > MAX_N {
        return Err(invalid(format!("--n must lie in 1..={MAX_N}")));
    }

    let (rows, residual): (Vec<BranchPoint>, Residual) = match (model, parity) {
        (Model::Well, ParityArg::Even) => {
            let mut rows = ground_branch_lambda().map_err(branch_error)?.to_vec();
            if n >= 2 {
                rows.extend(even_pseudothresholds(n).map_err(branch_error)?);
            }
            (rows, Box::new(|b| well_residual(Parity::Even, b)))
        }
        (Model::Well, ParityArg::Odd) => (
            odd_pseudothresholds(n - 1).map_err(branch_error)?,
            Box::new(|b| well_residual(Parity::Odd, b)),
        ),
        (Model::Delta, _) => (
            delta_branchpoints(n).map_err(branch_error)?,
            Box::new(|b| delta_residual(b.generator)),
        ),
    };

    let mut report = Report::new("branch-points");
    report.meta("model", model.to_string());
    if model == Model::Well {
        report.meta("parity", parity.to_string());
    }
    report.meta("n", n);
    report.meta("tol", ctx.tol);
    let generator = if model == Model::Delta { "k" } else { "sigma" };
    let location = if model == Model::Delta { "g" } else { "lambda" };
    let mut t = Table::new(
        "branch_points",
        &[
            ("index", ColumnKind::Scalar),
            ("kind", ColumnKind::Scalar),
            (generator, ColumnKind::Complex),
            (location, ColumnKind::Complex),
            ("residual", ColumnKind::Scalar),
        ],
    );
    let mut worst: f64 = 0.0;
    for bp in &rows {
        let r = residual(bp);
        worst = worst.max(r);
        t.push(vec![
            bp.index.into(),
            kind_name(bp.kind).into(),
            bp.generator.into(),
            bp.location.into(),
            r.into(),
        ]);
    }
    if worst > ctx.tol {
        return Err(numeric(format!(
            "branch-point residual {worst:e} exceeds tolerance {:e}",
            ctx.tol
        )));
    }
    report.tables.push(t);
    report.note("max_residual", worst);
    match model {
        Model::Well => {
            report.note(
                "origin",
                "logarithmic branch point at 0 on every sheet but the ground one",
            );
            if parity == ParityArg::Even {
                report.note(
                    "mirror",
                    "each real entry also occurs at minus its location",
                );
            }
        }
        Model::Delta => report.note(
            "conjugates",
            "each complex entry also occurs at its conjugate",
        ),
    }

    let mut plot = Plot::new(
        "Branch points",
        &format!("Re {location}"),
        &format!("Im {location}"),
    );
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|b| (b.location.re, b.location.im))
        .collect();
    if model == Model::Delta {
        pts.extend(
            rows.iter()
                .filter(|b| b.location.im != 0.0)
                .map(|b| (b.location.re, -b.location.im)),
        );
    }
    plot.series.push(Series::new(location, Style::Markers, pts));
    Ok(Outcome { report, plot })
}
