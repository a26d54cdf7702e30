//! `quasiherm evolve`: norm and expectation-value trajectories as CSV.

use std::fmt::Write as _;

use quasiherm_core::{
    analyze, evolve_heisenberg, evolve_schrodinger, s_inner, uniform_grid, ComplexMatrix, MetricOperator, Verdict,
};

use crate::analyze::load_system;
use crate::args::{EvolveArgs, Picture};
use crate::error::CliError;
use crate::io::{read_operator, read_state, Loaded};
use crate::{emit, CommandOutput, EXIT_BROKEN, EXIT_CERTIFIED};

pub struct EvolveTable {
    pub csv: Vec<u8>,
    pub broken: bool,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn run_evolve(args: &EvolveArgs) -> Result<Option<EvolveTable>, CliError> {
    if !(args.t_max.is_finite() && args.t_max > 0.0) {
        return Err(CliError::InvalidArgument(format!("--t-max must be positive, got {}", args.t_max)));
    }
    if args.steps == 0 {
        return Err(CliError::InvalidArgument("--steps must be at least 1".into()));
    }
    let loaded = load_system(&args.inputs)?;
    let h = &loaded.hamiltonian.value;
    let n = h.dim();
    let analysis = analyze(h, &loaded.pseudometric, &args.tol.tolerances())?;
    let broken = analysis.verdict() == Verdict::Broken;
    if broken && !args.force {
        return Ok(None);
    }
    let theta = match &analysis.certified {
        Some(c) => c.metric.clone(),
        None => MetricOperator::identity(n),
    };

    let state = read_state(&args.state)?;
    if state.value.len() != n {
        return Err(CliError::DimensionMismatch {
            what: "state",
            expected: n,
            found: state.value.len(),
        });
    }
    let observables: Vec<Loaded<ComplexMatrix>> = args
        .observable
        .iter()
        .map(|p| read_operator(p))
        .collect::<Result<_, _>>()?;
    for o in &observables {
        if o.value.dim() != n {
            return Err(CliError::DimensionMismatch {
                what: "observable",
                expected: n,
                found: o.value.dim(),
            });
        }
    }

    let s0 = s_inner(&state.value, &state.value, &theta)?.re.sqrt();
    if s0.is_nan() || s0 <= 0.0 {
        return Err(quasiherm_core::DynamicsError::ZeroState.into());
    }
    let psi0 = state.value.unscale(s0);
    let grid = uniform_grid(args.t_max, args.steps + 1);
    let traj = evolve_schrodinger(h, &psi0, &grid, &theta)?;

    // expectations[k][j] for grid node k and observable j
    let mut expectations = vec![Vec::with_capacity(observables.len()); grid.len()];
    for o in &observables {
        match args.picture {
            Picture::Schrodinger => {
                for (k, psi) in traj.states.iter().enumerate() {
                    expectations[k].push(s_inner(psi, &o.value.mul_vec(psi), &theta)?);
                }
            }
            Picture::Heisenberg => {
                let ops = evolve_heisenberg(h, &o.value, &grid)?;
                for (k, x) in ops.operators.iter().enumerate() {
                    expectations[k].push(s_inner(&psi0, &x.mul_vec(&psi0), &theta)?);
                }
            }
        }
    }

    let mut header = String::new();
    let _ = writeln!(header, "# quasiherm evolve");
    for d in &loaded.digests {
        let _ = write!(header, "# {} {}", d.role, d.source);
        if let Some(s) = &d.sha256 {
            let _ = write!(header, " sha256={s}");
        }
        header.push('\n');
    }
    let _ = writeln!(header, "# state {} sha256={}", state.path, state.sha256);
    for o in &observables {
        let _ = writeln!(header, "# observable {} sha256={}", o.path, o.sha256);
    }
    let picture = match args.picture {
        Picture::Schrodinger => "schrodinger",
        Picture::Heisenberg => "heisenberg",
    };
    let _ = writeln!(header, "# picture {picture}");
    match &analysis.certified {
        Some(c) => {
            let _ = writeln!(
                header,
                "# metric pc-normalized spectral metric, quasi_hermiticity_residual={}, condition_number={}",
                num(c.metric.quasi_h_residual.unwrap_or(f64::NAN)),
                num(c.metric.condition_number())
            );
        }
        None => {
            let _ = writeln!(header, "# metric identity (flat bookkeeping, uncertified)");
            let _ = writeln!(
                header,
                "# WARNING: broken phase; no positive metric exists and norms are not conserved (growth_rate={})",
                num(traj.growth_rate)
            );
        }
    }
    let _ = writeln!(header, "# initial state normalized to unit metric norm (input norm {})", num(s0));

    let mut w = csv::Writer::from_writer(header.into_bytes());
    let mut columns = vec!["t".to_string(), "s_norm".into(), "f_norm".into()];
    for (j, o) in observables.iter().enumerate() {
        let name = o.label.clone().unwrap_or_else(|| format!("obs{j}"));
        columns.push(format!("re_{name}"));
        columns.push(format!("im_{name}"));
    }
    let csv_err = |e: csv::Error| CliError::InvalidArgument(e.to_string());
    w.write_record(&columns).map_err(csv_err)?;
    for k in 0..grid.len() {
        let mut row = vec![num(grid[k]), num(traj.s_norms[k]), num(traj.f_norms[k])];
        for z in &expectations[k] {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    let csv = w.into_inner().map_err(|e| CliError::InvalidArgument(e.to_string()))?;
    Ok(Some(EvolveTable { csv, broken }))
}

pub fn cmd_evolve(args: &EvolveArgs) -> CommandOutput {
    match run_evolve(args) {
        Err(e) => CommandOutput::failure(&e),
        Ok(None) => CommandOutput {
            exit_code: EXIT_BROKEN,
            stdout: Vec::new(),
            stderr: "broken phase: metric::BrokenPhase; rerun with --force to evolve with the flat metric\n".into(),
        },
        Ok(Some(t)) => {
            let code = if t.broken { EXIT_BROKEN } else { EXIT_CERTIFIED };
            let mut out = emit(t.csv, args.out.as_deref(), code);
            if t.broken {
                out.stderr.push_str("warning: broken phase evolved with the flat metric\n");
            }
            out
        }
    }
}
