//! Continuation of one level along a user path.

use clap::Args;
use specwell::continuation::{
    continue_level, default_chart, ContinuationSettings, DeltaEnergy, DeltaMomentum, EvenPhase,
    OddEnergy, OddPhase,
};
use specwell::{Chart, Complex64, Family, LevelId, ParamPath};

use super::{candidates, continuation_error, required, Context, Outcome, COMMON_KEYS};
use crate::config::{family, ChartArg, ComplexList, Model, Num, ParityArg};
use crate::error::{invalid, CliError};
use crate::report::{ColumnKind, Report, Table};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Args)]
pub struct ContinueArgs {
    #[arg(long)]
    pub model: Option<Model>,
    #[arg(long)]
    pub parity: Option<ParityArg>,
    /// Level to start on, numbered as in the real spectrum.
    #[arg(long)]
    pub level: Option<usize>,
    /// Waypoints `re,im;re,im;...`; a path ending where it starts is closed.
    #[arg(long, allow_hyphen_values = true)]
    pub path: Option<ComplexList>,
    /// Coordinate the level is continued in.
    #[arg(long)]
    pub chart: Option<ChartArg>,
    /// |p| of the real start point when the path starts off the real axis.
    #[arg(long)]
    pub anchor: Option<Num>,
}

const KEYS: [&str; 6] = ["model", "parity", "level", "path", "chart", "anchor"];

fn chart_for(arg: ChartArg) -> &'static dyn Chart {
    match arg {
        ChartArg::EvenPhase => &EvenPhase,
        ChartArg::OddPhase => &OddPhase,
        ChartArg::OddEnergy => &OddEnergy,
        ChartArg::DeltaEnergy => &DeltaEnergy,
        ChartArg::DeltaMomentum => &DeltaMomentum,
    }
}

fn is_real(p: Complex64) -> bool {
    p.im.abs() <= 1e-14 * (1.0 + p.re.abs())
}

fn label(id: Option<LevelId>) -> String {
    id.map_or_else(|| "none".to_owned(), |l| l.to_string())
}

pub fn run(args: ContinueArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.file
        .check_keys(&[&KEYS[..], &COMMON_KEYS[..]].concat())?;
    let model = ctx.file.pick(args.model, "model")?.unwrap_or(Model::Well);
    let parity = ctx
        .file
        .pick(args.parity, "parity")?
        .unwrap_or(ParityArg::Even);
    let fam = family(model, parity);
    let level = required(ctx.file.pick(args.level, "level")?, "level")?;
    if level == 0 {
        return Err(invalid("--level counts from 1"));
    }
    let ComplexList(waypoints) = required(ctx.file.pick(args.path, "path")?, "path")?;
    if waypoints.len() < 2 {
        return Err(invalid("--path needs at least two waypoints"));
    }
    let chart = match ctx.file.pick(args.chart, "chart")? {
        Some(c) => chart_for(c),
        None => default_chart(fam),
    };
    if chart.family() != fam {
        return Err(invalid(format!(
            "chart {} does not belong to the {} family",
            chart.name(),
            fam.name()
        )));
    }
    let default_anchor = match fam {
        Family::DeltaBarrier => 3.0,
        _ => 20.0,
    };
    let anchor_mag = ctx
        .file
        .pick(args.anchor, "anchor")?
        .map_or(default_anchor, |Num(v)| v);
    if anchor_mag <= 0.0 {
        return Err(invalid("--anchor must be positive"));
    }

    let reach = waypoints
        .iter()
        .map(|w| w.norm())
        .fold(anchor_mag, f64::max);
    let known = candidates(fam, reach)?;
    let mut points = waypoints.clone();
    let p0 = points[0];
    let start = if is_real(p0) && p0.re != 0.0 {
        let a = chart
            .anchor(level, p0.re.abs())
            .map_err(|e| continuation_error(e, &known))?;
        if (a.param - p0).norm() > 1e-12 * (1.0 + p0.norm()) {
            return Err(invalid(format!(
                "level {level} is real at parameter {} in this chart, not at {}; start there or off the real axis",
                a.param.re, p0.re
            )));
        }
        points[0] = a.param;
        a
    } else {
        let a = chart
            .anchor(level, anchor_mag)
            .map_err(|e| continuation_error(e, &known))?;
        points.insert(0, a.param);
        a
    };
    let prepended = points.len() != waypoints.len();
    let closes = (points[0] - *points.last().unwrap()).norm() <= 1e-12 * (1.0 + points[0].norm());
    let path = if closes {
        ParamPath::closed(points)
    } else {
        ParamPath::open(points)
    }
    .map_err(|e| invalid(e.to_string()))?;
    path.check_clearance(&known)
        .map_err(|e| continuation_error(e.into(), &known))?;
    let settings = ContinuationSettings {
        accept_tol: ctx.tol,
        ..ContinuationSettings::default()
    };
    let track = continue_level(chart, start.param, start.internal, &path, &settings)
        .map_err(|e| continuation_error(e, &known))?;

    let first = track.first();
    let last = track.last();
    let start_id = chart.identify(first.param.re, first.internal);
    let end_id = is_real(last.param)
        .then(|| chart.identify(last.param.re, last.internal))
        .flatten();
    let mut report = Report::new("continue");
    report.meta("model", model.to_string());
    if model == Model::Well {
        report.meta("parity", parity.to_string());
    }
    report.meta("level", level);
    report.meta("chart", chart.name());
    report.meta("closed", closes);
    report.meta("anchor_prepended", prepended);
    report.meta("tol", ctx.tol);
    let mut t = Table::new(
        "track",
        &[
            ("param", ColumnKind::Complex),
            ("internal", ColumnKind::Complex),
            ("energy", ColumnKind::Complex),
        ],
    );
    for s in &track.samples {
        t.push(vec![s.param.into(), s.internal.into(), s.energy.into()]);
    }
    report.tables.push(t);
    report.note("samples", track.samples.len());
    report.note("start_level", label(start_id));
    report.note("end_level", label(end_id));
    report.note("permuted", end_id.is_some() && end_id != start_id);
    report.note("end_energy", last.energy);
    report.note("log_branch", track.log_branch);

    let plot = Plot::new(&format!("Level {level} along the path"), "Re E", "Im E")
        .with(Series::new(
            "E",
            Style::Line,
            track
                .samples
                .iter()
                .map(|s| (s.energy.re, s.energy.im))
                .collect(),
        ))
        .with(Series::new(
            "start / end",
            Style::Markers,
            vec![
                (first.energy.re, first.energy.im),
                (last.energy.re, last.energy.im),
            ],
        ));
    Ok(Outcome { report, plot })
}
