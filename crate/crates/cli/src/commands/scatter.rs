//! Pole trajectories and transmission profiles.

use std::f64::consts::PI;

use clap::Args;
use specwell::scattering::{coefficients, pair_kinematics, pole_sweep, MIN_SWEEP_SAMPLES};
use specwell::Complex64;

use super::{required, scattering_error, Context, Outcome, COMMON_KEYS};
use crate::config::{IndexList, ParityArg, RealSpan, ScatterMode};
use crate::error::{invalid, numeric, CliError};
use crate::report::{ColumnKind, Report, Table};
use crate::svg::{Plot, Series, Style};

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long)]
    pub mode: Option<ScatterMode>,
    /// `lo:hi` for pole sweeps, a single value for profiles.
    #[arg(long)]
    pub lambda: Option<RealSpan>,
    #[arg(long)]
    pub parity: Option<ParityArg>,
    /// Momentum range `lo:hi` of a profile (endpoints excluded).
    #[arg(long)]
    pub k: Option<RealSpan>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Phase strips to follow, comma separated.
    #[arg(long)]
    pub strips: Option<IndexList>,
}

const KEYS: [&str; 6] = ["mode", "lambda", "parity", "k", "samples", "strips"];
const MAX_SAMPLES: usize = 100_000;
const UNITARITY_TOL: f64 = 1e-12;

pub fn run(args: ScatterArgs, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.file
        .check_keys(&[&KEYS[..], &COMMON_KEYS[..]].concat())?;
    let mode = ctx
        .file
        .pick(args.mode, "mode")?
        .unwrap_or(ScatterMode::Poles);
    let lambda = required(ctx.file.pick(args.lambda, "lambda")?, "lambda")?;
    let samples = ctx.file.pick(args.samples, "samples")?;
    if samples.is_some_and(|s| s > MAX_SAMPLES) {
        return Err(invalid(format!("--samples must not exceed {MAX_SAMPLES}")));
    }
    match mode {
        ScatterMode::Poles => {
            let RealSpan::Range(lo, hi) = lambda else {
                return Err(invalid("pole sweeps need a range --lambda lo:hi"));
            };
            let parity = ctx
                .file
                .pick(args.parity, "parity")?
                .unwrap_or(ParityArg::Even);
            let strips = ctx
                .file
                .pick(args.strips, "strips")?
                .map_or_else(|| vec![1], |IndexList(v)| v);
            if strips.is_empty() || strips.iter().any(|&s| s > 200) {
                return Err(invalid("--strips must list indices up to 200"));
            }
            if parity == ParityArg::Odd && strips.contains(&0) {
                return Err(invalid("odd strips count from 1"));
            }
            poles(parity, lo, hi, samples.unwrap_or(500), &strips, ctx)
        }
        ScatterMode::Profile => {
            let RealSpan::Value(lam) = lambda else {
                return Err(invalid("profiles need a single --lambda value"));
            };
            if args.parity.is_some() || args.strips.is_some() {
                return Err(invalid("--parity and --strips apply to pole sweeps"));
            }
            let (lo, hi) = match ctx
                .file
                .pick(args.k, "k")?
                .unwrap_or(RealSpan::Range(0.0, 10.0))
            {
                RealSpan::Range(a, b) => (a, b),
                RealSpan::Value(_) => return Err(invalid("--k must be a range lo:hi")),
            };
            if lo < 0.0 {
                return Err(invalid("--k must be non-negative"));
            }
            let n = samples.unwrap_or(200);
            if n == 0 {
                return Err(invalid("--samples must be positive"));
            }
            profile(lam, lo, hi, n, ctx)
        }
    }
}

fn poles(
    parity: ParityArg,
    lo: f64,
    hi: f64,
    samples: usize,
    strips: &[usize],
    ctx: &Context,
) -> Result<Outcome, CliError> {
    if lo <= 0.0 || samples < MIN_SWEEP_SAMPLES {
        return Err(invalid(format!(
            "sweeps need lambda > 0 and at least {MIN_SWEEP_SAMPLES} samples"
        )));
    }
    let tracks = pole_sweep(parity.parity(), lo, hi, samples, strips).map_err(scattering_error)?;
    let mut report = Report::new("scatter");
    report.meta("mode", "poles");
    report.meta("parity", parity.to_string());
    report.meta("lambda_lo", lo);
    report.meta("lambda_hi", hi);
    report.meta("samples", samples);
    report.meta(
        "strips",
        strips
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(" "),
    );
    report.meta("tol", ctx.tol);
    let mut t = Table::new(
        "poles",
        &[
            ("strip", ColumnKind::Scalar),
            ("track", ColumnKind::Scalar),
            ("lambda", ColumnKind::Scalar),
            ("phi", ColumnKind::Complex),
            ("k", ColumnKind::Complex),
            ("class", ColumnKind::Scalar),
        ],
    );
    let mut plot = Plot::new("Pole trajectories", "Re k", "Im k");
    for (i, tr) in tracks.iter().enumerate() {
        for s in &tr.samples {
            t.push(vec![
                tr.strip.into(),
                i.into(),
                s.lambda.into(),
                s.phi.into(),
                s.k.into(),
                s.class.name().into(),
            ]);
        }
        let name = format!("strip {} track {i}", tr.strip);
        plot.series.push(Series::new(
            name,
            Style::Line,
            tr.samples.iter().map(|s| (s.k.re, s.k.im)).collect(),
        ));
    }
    report.tables.push(t);
    report.note("tracks", tracks.len());
    for (i, tr) in tracks.iter().enumerate() {
        report.note(&format!("track{i}_final_level"), tr.level_index);
    }
    for &strip in strips {
        let pair: Vec<_> = tracks.iter().filter(|t| t.strip == strip).collect();
        if pair.len() != 2 {
            continue;
        }
        match pair_kinematics(pair[0], pair[1]) {
            Some(k) => {
                report.note(&format!("strip{strip}_merge_lambda"), k.merge_lambda);
                report.note(&format!("strip{strip}_merge_k"), k.merge_k);
                report.note(&format!("strip{strip}_symmetry_defect"), k.symmetry_defect);
                report.note(&format!("strip{strip}_crossings"), k.crossings);
                report.note(
                    &format!("strip{strip}_crossing_lambda"),
                    k.crossing_lambda.unwrap_or(f64::NAN),
                );
            }
            None => report.note(&format!("strip{strip}_merge_lambda"), "none in range"),
        }
    }
    Ok(Outcome { report, plot })
}

fn profile(lambda: f64, lo: f64, hi: f64, n: usize, ctx: &Context) -> Result<Outcome, CliError> {
    let lam = Complex64::new(lambda, 0.0);
    let mut report = Report::new("scatter");
    report.meta("mode", "profile");
    report.meta("lambda", lambda);
    report.meta("k_lo", lo);
    report.meta("k_hi", hi);
    report.meta("samples", n);
    report.meta("tol", ctx.tol);
    let mut t = Table::new(
        "profile",
        &[
            ("k", ColumnKind::Scalar),
            ("kprime", ColumnKind::Scalar),
            ("t", ColumnKind::Complex),
            ("r", ColumnKind::Complex),
            ("t2", ColumnKind::Scalar),
            ("r2", ColumnKind::Scalar),
            ("unitarity", ColumnKind::Scalar),
        ],
    );
    let mut worst: f64 = 0.0;
    let mut curve = Vec::with_capacity(n);
    for i in 0..n {
        let k = lo + (hi - lo) * (i + 1) as f64 / (n + 1) as f64;
        let s = coefficients(Complex64::new(k, 0.0), lam).map_err(scattering_error)?;
        let (t2, r2) = (s.t.norm_sqr(), s.r.norm_sqr());
        worst = worst.max(s.unitarity_defect());
        t.push(vec![
            k.into(),
            s.kprime.re.into(),
            s.t.into(),
            s.r.into(),
            t2.into(),
            r2.into(),
            (t2 + r2).into(),
        ]);
        curve.push((k, t2));
    }
    if worst > UNITARITY_TOL {
        return Err(numeric(format!(
            "unitarity defect {worst:e} exceeds {UNITARITY_TOL:e}"
        )));
    }
    report.tables.push(t);
    report.note("max_unitarity_defect", worst);
    // Full transmission wherever k' is a multiple of π.
    let resonances: Vec<f64> = (1..)
        .map(|m| m as f64 * PI)
        .map(|kp: f64| kp * kp - lambda * lambda)
        .take_while(|k2| k2.sqrt() < hi || *k2 < 0.0)
        .filter(|k2| *k2 > 0.0 && k2.sqrt() > lo)
        .map(f64::sqrt)
        .collect();
    report.note(
        "resonances",
        resonances
            .iter()
            .map(|k| format!("{k:.16e}"))
            .collect::<Vec<_>>()
            .join(" "),
    );

    let mut plot = Plot::new(&format!("Transmission at lambda = {lambda}"), "k", "|T|^2");
    plot.y_range = Some((0.0, 1.05));
    plot.series.push(Series::new("|T|^2", Style::Line, curve));
    plot.series.push(Series::new(
        "k' in pi Z",
        Style::Markers,
        resonances.iter().map(|&k| (k, 1.0)).collect(),
    ));
    Ok(Outcome { report, plot })
}
