//! `quasiherm sweep`: phase-diagram tables.

use quasiherm_core::{sweep_with_tolerances, ParamGrid, SweepRow};

use crate::args::{FamilyArg, SweepArgs};
use crate::error::CliError;
use crate::{emit, CommandOutput, EXIT_CERTIFIED};

const MAX_POINTS: usize = 1_000_000;

/// Parses `START:STOP:STEP` (inclusive of `STOP` up to rounding) or a
/// single value.
pub fn parse_range(name: &str, spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::InvalidGrid(format!("--{name} {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad("not a finite number"))
    };
    match parts.as_slice() {
        [v] => Ok(vec![parse(v)?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step == 0.0 {
                return Err(bad("step is zero"));
            }
            let span = (stop - start) / step;
            if span < -1e-9 {
                return Err(bad("step points away from stop"));
            }
            let count = (span + 1e-9).floor() + 1.0;
            if count > MAX_POINTS as f64 {
                return Err(bad("too many points"));
            }
            Ok((0..count as usize).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(bad("expected START:STOP:STEP or a single value")),
    }
}

fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    parse_range("n", spec)?
        .into_iter()
        .map(|x| {
            if x.fract() == 0.0 && x >= 0.0 {
                Ok(x as usize)
            } else {
                Err(CliError::InvalidGrid(format!("--n {spec:?}: sizes must be whole numbers")))
            }
        })
        .collect()
}

fn required<'a>(value: &'a Option<String>, name: &str) -> Result<&'a str, CliError> {
    value
        .as_deref()
        .ok_or_else(|| CliError::InvalidGrid(format!("--{name} is required for this family")))
}

pub fn grid_from_args(args: &SweepArgs) -> Result<ParamGrid, CliError> {
    Ok(match args.family {
        FamilyArg::Pt2 => ParamGrid::Pt2Cell {
            a: parse_range("a", required(&args.a, "a")?)?,
            b: parse_range("b", required(&args.b, "b")?)?,
        },
        FamilyArg::Chain => ParamGrid::GainLossChain {
            n: parse_sizes(required(&args.n, "n")?)?,
            gamma: parse_range("gamma", required(&args.gamma, "gamma")?)?,
            coupling: parse_range("coupling", &args.coupling)?,
        },
    })
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_csv(rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::InvalidArgument(e.to_string());
    if let Some(first) = rows.first() {
        let mut header: Vec<&str> = first.spec.param_names().to_vec();
        header.extend(["verdict", "max_im_E", "min_theta_eig"]);
        w.write_record(&header).map_err(csv_err)?;
    }
    for row in rows {
        let mut record: Vec<String> = match row.spec {
            quasiherm_core::ModelSpec::GainLossChain { n, gamma, coupling } => {
                vec![n.to_string(), num(gamma), num(coupling)]
            }
            spec => spec.param_values().into_iter().map(num).collect(),
        };
        record.push(row.verdict.label().to_string());
        record.push(row.max_imag_eigenvalue.map(num).unwrap_or_default());
        record.push(row.min_theta_eigenvalue.map(num).unwrap_or_default());
        w.write_record(&record).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::InvalidArgument(e.to_string()))
}

pub fn run_sweep(args: &SweepArgs) -> Result<Vec<u8>, CliError> {
    let grid = grid_from_args(args)?;
    let rows = sweep_with_tolerances(&grid, &args.tol.tolerances())?;
    render_csv(&rows)
}

pub fn cmd_sweep(args: &SweepArgs) -> CommandOutput {
    match run_sweep(args) {
        Ok(csv) => emit(csv, args.out.as_deref(), EXIT_CERTIFIED),
        Err(e) => CommandOutput::failure(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("a", "0:1.5:0.5").unwrap(), vec![0.0, 0.5, 1.0, 1.5]);
        assert_eq!(parse_range("a", "0.7").unwrap(), vec![0.7]);
        assert_eq!(parse_range("a", "1:0:-0.5").unwrap(), vec![1.0, 0.5, 0.0]);
        assert_eq!(parse_range("a", "0:1:0.1").unwrap().len(), 11);
        for bad in ["0:1:0", "0:1:-1", "x", "0:1", "0:inf:1"] {
            assert!(matches!(parse_range("a", bad), Err(CliError::InvalidGrid(_))), "{bad}");
        }
        assert!(parse_sizes("2:6:2").unwrap() == vec![2, 4, 6]);
        assert!(parse_sizes("2.5").is_err());
    }
}
