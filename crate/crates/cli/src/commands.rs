use std::fs;

use serde::Serialize;

use beamsquint::codebook_design::{
    design_no_squint, max_antennas, max_fractional_bandwidth, AntennaBound, BeamwidthRule,
    Codebook, CodebookDesigner, DesignOutcome,
};
use beamsquint::codebook_io;
use beamsquint::pattern::pattern_table;
use beamsquint::squint_model::{BandSpec, GainThreshold, OracleGrid};
use beamsquint::verification::{
    sweep_size_vs_b, sweep_size_vs_n, verify_codebook, SeriesBound, SweepOutcome, SweepTable,
    VerifyOptions,
};
use beamsquint::{ArrayGeometry, Execution, PsiAngle};

use crate::args::{
    BandArgs, BoundsArgs, DesignArgs, Format, OutputArgs, PatternArgs, SweepBArgs, SweepNArgs,
    TargetArgs, VerifyArgs,
};
use crate::CliError;

type CliResult<T> = Result<T, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn resolve_band(args: &BandArgs) -> CliResult<Option<BandSpec>> {
    match (args.fractional_bandwidth, args.carrier_ghz, args.bandwidth_ghz) {
        (None, None, None) => Ok(None),
        (Some(b), None, None) => Ok(Some(BandSpec::new(b)?)),
        (None, Some(fc), Some(bw)) => Ok(Some(BandSpec::from_carrier(fc * 1e9, bw * 1e9)?)),
        (Some(_), _, _) => Err(config(
            "give either --fractional-bandwidth or --carrier-ghz with --bandwidth-ghz, not both",
        )),
        _ => Err(config("--carrier-ghz and --bandwidth-ghz must be given together")),
    }
}

fn require_band(args: &BandArgs) -> CliResult<BandSpec> {
    resolve_band(args)?.ok_or_else(|| {
        config("a band is required: --fractional-bandwidth or --carrier-ghz with --bandwidth-ghz")
    })
}

fn resolve_psi_m(target: &TargetArgs) -> CliResult<f64> {
    let psi_m = match target.max_angle_deg {
        Some(deg) => PsiAngle::from_degrees(deg)?.value(),
        None => target.psi_max,
    };
    if !(psi_m > 0.0 && psi_m <= 1.0) {
        return Err(config(format!("psi_max must lie in (0, 1], got {psi_m}")));
    }
    Ok(psi_m)
}

fn emit(output: &OutputArgs, content: &[u8]) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(content)
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> CliResult<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    writer.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("finite values serialize");
    text.push('\n');
    text.into_bytes()
}

pub fn pattern(args: PatternArgs) -> CliResult<()> {
    let geom = ArrayGeometry::new(args.antennas, args.spacing_ratio)?;
    let psi0 = match (args.focus_psi, args.focus_deg) {
        (Some(psi), _) => PsiAngle::new(psi)?.value(),
        (None, Some(deg)) => PsiAngle::from_degrees(deg)?.value(),
        (None, None) => return Err(config("--focus-deg or --focus-psi is required")),
    };
    let xis = if !args.xi.is_empty() {
        args.xi.clone()
    } else if !args.freqs_ghz.is_empty() {
        let carrier = args
            .carrier_ghz
            .filter(|c| *c > 0.0)
            .ok_or_else(|| config("--freqs-ghz needs a positive --carrier-ghz"))?;
        args.freqs_ghz.iter().map(|f| f / carrier).collect()
    } else {
        vec![1.0]
    };
    let rows = pattern_table(
        &geom,
        psi0,
        &xis,
        args.psi_step,
        args.psi_max,
        Execution::default(),
    )?;
    let bytes = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows)?,
        Format::Json => to_json(&rows),
    };
    emit(&args.output, &bytes)
}

#[derive(Serialize)]
struct BeamRow {
    index: usize,
    psi0: f64,
    theta0_deg: f64,
    lo: f64,
    hi: f64,
}

pub fn design(args: DesignArgs) -> CliResult<()> {
    if args.spacing_ratio != 0.5 {
        return Err(config(format!(
            "codebook design needs --spacing-ratio 0.5, got {}",
            args.spacing_ratio
        )));
    }
    let band = require_band(&args.band)?;
    let psi_m = resolve_psi_m(&args.target)?;
    let threshold = GainThreshold::from_db_below_max(args.threshold_db)?;
    // 1.772/N only describes the half-power width.
    let rule = if args.exact_beamwidth || !threshold.is_half_power() {
        BeamwidthRule::Exact
    } else {
        BeamwidthRule::Nominal
    };

    let codebook = if band.fractional_bandwidth() == 0.0 && rule == BeamwidthRule::Nominal {
        design_no_squint(args.antennas, psi_m)?
    } else {
        let outcome = CodebookDesigner::new(args.antennas, psi_m)?
            .band(band)
            .threshold(threshold)
            .beamwidth_rule(rule)
            .design()?;
        match outcome {
            DesignOutcome::Feasible(c) => c,
            DesignOutcome::Infeasible(info) => return Err(CliError::Infeasible(info.to_string())),
        }
    };

    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut text = codebook_io::to_json(&codebook);
            text.push('\n');
            text.into_bytes()
        }
        Format::Csv => to_csv(codebook.beams().iter().map(|b| BeamRow {
            index: b.index,
            psi0: b.psi0,
            theta0_deg: beamsquint::array_model::psi_to_degrees(b.psi0),
            lo: b.coverage.lo,
            hi: b.coverage.hi,
        }))?,
    };
    emit(&args.output, &bytes)?;
    eprintln!("{}", summary(&codebook));
    Ok(())
}

fn summary(codebook: &Codebook) -> String {
    format!(
        "size={} parity={} N={} b={:.6} psi_m={}",
        codebook.size(),
        codebook.parity(),
        codebook.n_antennas(),
        codebook.band().fractional_bandwidth(),
        codebook.psi_m()
    )
}

pub fn verify(args: VerifyArgs) -> CliResult<()> {
    if args.output.format == Some(Format::Csv) {
        return Err(config("verify reports are JSON only"));
    }
    let text = fs::read_to_string(&args.codebook)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.codebook.display())))?;
    let codebook = codebook_io::from_json(&text)?;
    let defaults = OracleGrid::default();
    let options = VerifyOptions {
        grid: OracleGrid {
            psi_step: args.grid.psi_step.unwrap_or(defaults.psi_step),
            xi_points: args.grid.xi_points.unwrap_or(defaults.xi_points),
        },
        slack_db: args.slack_db,
        band: resolve_band(&args.band)?,
        execution: Execution::default(),
    };
    let report = verify_codebook(&codebook, &options)?;
    emit(&args.output, &to_json(&report))?;
    if report.pass {
        eprintln!("verify: pass worst_gain_db={:.4}", report.worst_gain_db);
        Ok(())
    } else {
        Err(CliError::VerifyFailed(format!(
            "worst_gain_db={:.4} at psi={:.6} gaps={}",
            report.worst_gain_db,
            report.worst_psi,
            report.gaps.len()
        )))
    }
}

#[derive(Serialize)]
struct SweepRow {
    axis: String,
    value_or_status: String,
    bound: String,
}

fn sweep_rows(table: &SweepTable) -> Vec<SweepRow> {
    table
        .series
        .iter()
        .flat_map(|series| {
            let bound = match series.bound {
                SeriesBound::FractionalBandwidth(b) => b.to_string(),
                SeriesBound::Antennas(n) => n.to_string(),
            };
            series.points.iter().map(move |p| SweepRow {
                axis: p.axis_value.to_string(),
                value_or_status: match p.outcome {
                    SweepOutcome::Size(s) => s.to_string(),
                    SweepOutcome::Infeasible => "INFEASIBLE".to_string(),
                },
                bound: bound.clone(),
            })
        })
        .collect()
}

fn emit_sweep(table: &SweepTable, output: &OutputArgs) -> CliResult<()> {
    let bytes = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(sweep_rows(table))?,
        Format::Json => to_json(table),
    };
    emit(output, &bytes)
}

pub fn sweep_b(args: SweepBArgs) -> CliResult<()> {
    let psi_m = resolve_psi_m(&args.target)?;
    let grid = match (args.b_grid.is_empty(), args.b_max, args.b_step) {
        (false, _, _) => args.b_grid.clone(),
        (true, Some(max), Some(step)) if step > 0.0 && max >= 0.0 => {
            let count = (max / step + 1e-9).floor() as usize;
            (0..=count).map(|k| k as f64 * step).collect()
        }
        (true, Some(_), Some(step)) => {
            return Err(config(format!("--b-step must be positive, got {step}")))
        }
        _ => return Err(config("give --b-grid or --b-max with --b-step")),
    };
    let table = sweep_size_vs_b(&args.antennas, &grid, psi_m, Execution::default())?;
    emit_sweep(&table, &args.output)
}

pub fn sweep_n(args: SweepNArgs) -> CliResult<()> {
    let psi_m = resolve_psi_m(&args.target)?;
    if args.n_min < 2 || args.n_max < args.n_min {
        return Err(config(format!(
            "antenna range must satisfy 2 <= n_min <= n_max, got {}..{}",
            args.n_min, args.n_max
        )));
    }
    let table = sweep_size_vs_n(
        &args.fractional_bandwidth,
        args.n_min..=args.n_max,
        psi_m,
        Execution::default(),
    )?;
    emit_sweep(&table, &args.output)
}

#[derive(Serialize)]
struct BoundsReport {
    psi_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_antennas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_fractional_bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fractional_bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_antennas: Option<AntennaBound>,
}

#[derive(Serialize)]
struct BoundRow {
    quantity: &'static str,
    value: String,
}

pub fn bounds(args: BoundsArgs) -> CliResult<()> {
    let psi_m = resolve_psi_m(&args.target)?;
    let band = resolve_band(&args.band)?;
    if args.antennas.is_none() && band.is_none() {
        return Err(config("give --antennas and/or a band"));
    }
    let report = BoundsReport {
        psi_m,
        n_antennas: args.antennas,
        max_fractional_bandwidth: args
            .antennas
            .map(|n| max_fractional_bandwidth(n, psi_m))
            .transpose()?,
        fractional_bandwidth: band.map(|b| b.fractional_bandwidth()),
        max_antennas: band.map(|b| max_antennas(&b, psi_m)).transpose()?,
    };
    let bytes = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut rows = vec![BoundRow {
                quantity: "psi_m",
                value: psi_m.to_string(),
            }];
            if let Some(b) = report.max_fractional_bandwidth {
                rows.push(BoundRow {
                    quantity: "max_fractional_bandwidth",
                    value: b.to_string(),
                });
            }
            if let Some(n) = report.max_antennas {
                rows.push(BoundRow {
                    quantity: "max_antennas",
                    value: n.to_string(),
                });
            }
            to_csv(rows)?
        }
    };
    emit(&args.output, &bytes)
}
