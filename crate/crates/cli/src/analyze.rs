//! `quasiherm analyze`: the full certificate report.

use std::fmt::Write as _;
use std::path::Path;

use quasiherm_core::krein::{PROPORTIONALITY_TOL, PSEUDO_HERMITICITY_TOL};
use quasiherm_core::metric::{INVOLUTIVITY_TOL, METRIC_HERMITICITY_TOL};
use quasiherm_core::{analyze, biortho_residual, Analysis, ComplexMatrix, Pseudometric, Tolerances, Verdict};
use serde::Serialize;

use crate::args::{AnalyzeArgs, OperatorInputs, ReportFormat};
use crate::error::CliError;
use crate::io::{read_operator, Loaded};
use crate::{emit, CommandOutput, EXIT_BROKEN, EXIT_CERTIFIED};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub source: String,
    pub sha256: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub real: bool,
    pub kappa: Option<[f64; 2]>,
    pub partner: Option<usize>,
    pub proportionality_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: &'static str,
    pub value: f64,
    /// Threshold the value was checked against, when one is enforced.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub inputs: Vec<InputDigest>,
    pub dim: usize,
    pub verdict: &'static str,
    /// `certified`, or the qualified reason no metric exists.
    pub metric_status: String,
    pub eigenvalues: Vec<EigenRow>,
    pub certificates: Vec<Certificate>,
    pub pc_signs: Option<Vec<i8>>,
    pub hermitized_spectrum: Option<Vec<f64>>,
}

/// Hamiltonian, pseudometric and their digests.
pub struct LoadedSystem {
    pub hamiltonian: Loaded<ComplexMatrix>,
    pub pseudometric: Pseudometric,
    pub digests: Vec<InputDigest>,
}

pub fn load_system(inputs: &OperatorInputs) -> Result<LoadedSystem, CliError> {
    let hamiltonian = read_operator(&inputs.hamiltonian)?;
    let dim = hamiltonian.value.dim();
    let mut digests = vec![InputDigest {
        role: "hamiltonian".into(),
        source: hamiltonian.path.clone(),
        sha256: Some(hamiltonian.sha256.clone()),
        label: hamiltonian.label.clone(),
    }];
    let pseudometric = match inputs.pseudometric.as_str() {
        "exchange" | "identity" => {
            digests.push(InputDigest {
                role: "pseudometric".into(),
                source: inputs.pseudometric.clone(),
                sha256: None,
                label: None,
            });
            if inputs.pseudometric == "exchange" {
                Pseudometric::exchange(dim)
            } else {
                Pseudometric::identity(dim)
            }
        }
        path => {
            let p = read_operator(Path::new(path))?;
            if p.value.dim() != dim {
                return Err(CliError::DimensionMismatch {
                    what: "pseudometric",
                    expected: dim,
                    found: p.value.dim(),
                });
            }
            digests.push(InputDigest {
                role: "pseudometric".into(),
                source: p.path.clone(),
                sha256: Some(p.sha256.clone()),
                label: p.label.clone(),
            });
            Pseudometric::new(p.value)?
        }
    };
    Ok(LoadedSystem {
        hamiltonian,
        pseudometric,
        digests,
    })
}

pub fn build_report(analysis: &Analysis, digests: Vec<InputDigest>, tol: &Tolerances) -> Result<RunReport, CliError> {
    let h = &analysis.hamiltonian;
    let sys = &analysis.system;
    let cls = &analysis.classification;
    let eigenvalues = sys
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, e)| EigenRow {
            index: k,
            re: e.re,
            im: e.im,
            real: cls.real_flags[k],
            kappa: cls.proportionality_constants[k].map(|z| [z.re, z.im]),
            partner: cls.pairing[k],
            proportionality_residual: cls.proportionality_residuals[k],
        })
        .collect();

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let mut certificates = vec![
        Certificate {
            name: "pseudo_hermiticity_residual",
            value: analysis.pseudo_hermiticity_residual,
            bound: Some(PSEUDO_HERMITICITY_TOL),
        },
        Certificate {
            name: "eigen_residual",
            value: biortho_residual(h, sys)?,
            bound: Some(tol.eig_for(h.dim()) * h.frobenius_norm()),
        },
        Certificate {
            name: "biorthogonality_residual",
            value: sys.gram_residual,
            bound: None,
        },
        Certificate {
            name: "conjugate_pairing_residual",
            value: max(&sys.pairing_residuals),
            bound: None,
        },
        Certificate {
            name: "proportionality_residual",
            value: max(&cls.proportionality_residuals),
            bound: Some(PROPORTIONALITY_TOL),
        },
    ];

    let (metric_status, pc_signs, hermitized_spectrum) = match &analysis.certified {
        None => ("metric::BrokenPhase".to_string(), None, None),
        Some(c) => {
            let m = &c.metric;
            certificates.extend([
                Certificate {
                    name: "pc_normalization_residual",
                    value: c.normalization.involutivity_residual,
                    bound: Some(INVOLUTIVITY_TOL),
                },
                Certificate {
                    name: "metric_hermiticity_residual",
                    value: m.hermiticity_residual,
                    bound: Some(METRIC_HERMITICITY_TOL),
                },
                Certificate {
                    name: "quasi_hermiticity_residual",
                    value: m.quasi_h_residual.unwrap_or(f64::NAN),
                    bound: Some(tol.cert),
                },
                Certificate {
                    name: "metric_min_eigenvalue",
                    value: m.min_eigenvalue,
                    bound: None,
                },
                Certificate {
                    name: "metric_max_eigenvalue",
                    value: m.max_eigenvalue,
                    bound: None,
                },
                Certificate {
                    name: "c_involutivity_residual",
                    value: c.c_operator.involutivity_residual,
                    bound: Some(INVOLUTIVITY_TOL),
                },
                Certificate {
                    name: "c_commutator_residual",
                    value: c.c_commutator_residual,
                    bound: None,
                },
                Certificate {
                    name: "dyson_factorization_residual",
                    value: c.dyson.factorization_residual,
                    bound: None,
                },
                Certificate {
                    name: "dyson_inverse_residual",
                    value: c.dyson.inverse_residual,
                    bound: None,
                },
                Certificate {
                    name: "dyson_condition_number",
                    value: c.dyson.condition_number,
                    bound: None,
                },
                Certificate {
                    name: "hermitization_residual",
                    value: c.hermitized.hermiticity_residual,
                    bound: Some(c.hermitized.tolerance),
                },
                Certificate {
                    name: "isospectrality_residual",
                    value: c.isospectrality_residual,
                    bound: None,
                },
            ]);
            (
                "certified".to_string(),
                Some(c.normalization.signs.clone()),
                Some(c.hermitized_spectrum.clone()),
            )
        }
    };

    Ok(RunReport {
        command: "analyze",
        inputs: digests,
        dim: h.dim(),
        verdict: analysis.verdict().as_str(),
        metric_status,
        eigenvalues,
        certificates,
        pc_signs,
        hermitized_spectrum,
    })
}

pub fn run_analyze(args: &AnalyzeArgs) -> Result<(Analysis, RunReport), CliError> {
    let loaded = load_system(&args.inputs)?;
    let tol = args.tol.tolerances();
    let analysis = analyze(&loaded.hamiltonian.value, &loaded.pseudometric, &tol)?;
    let report = build_report(&analysis, loaded.digests, &tol)?;
    Ok((analysis, report))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn render_text(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "quasiherm {}", r.command);
    for i in &r.inputs {
        let _ = write!(s, "input {:<12} {}", i.role, i.source);
        if let Some(d) = &i.sha256 {
            let _ = write!(s, "  sha256={d}");
        }
        if let Some(l) = &i.label {
            let _ = write!(s, "  label={l:?}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "dimension {}", r.dim);
    let _ = writeln!(s, "verdict {}", r.verdict);
    let _ = writeln!(s, "metric {}", r.metric_status);

    let _ = writeln!(s, "\neigenvalues");
    let _ = writeln!(
        s,
        "  {:>5}  {:>24}  {:>24}  {:>5}  {:>24}  {:>24}  {:>7}  {:>24}",
        "index", "re", "im", "real", "kappa_re", "kappa_im", "partner", "proportionality"
    );
    for e in &r.eigenvalues {
        let (kr, ki) = e.kappa.map_or(("-".into(), "-".into()), |[a, b]| (num(a), num(b)));
        let partner = e.partner.map_or("-".to_string(), |p| p.to_string());
        let _ = writeln!(
            s,
            "  {:>5}  {:>24}  {:>24}  {:>5}  {:>24}  {:>24}  {:>7}  {:>24}",
            e.index,
            num(e.re),
            num(e.im),
            e.real,
            kr,
            ki,
            partner,
            num(e.proportionality_residual)
        );
    }

    let _ = writeln!(s, "\ncertificates");
    for c in &r.certificates {
        match c.bound {
            Some(b) => {
                let _ = writeln!(s, "  {:<30} {:>24}  (bound {})", c.name, num(c.value), num(b));
            }
            None => {
                let _ = writeln!(s, "  {:<30} {:>24}", c.name, num(c.value));
            }
        }
    }
    if let Some(signs) = &r.pc_signs {
        let list: Vec<String> = signs.iter().map(|x| format!("{x:+}")).collect();
        let _ = writeln!(s, "\nc_operator_signs {}", list.join(" "));
    }
    if let Some(spec) = &r.hermitized_spectrum {
        let _ = writeln!(s, "\nhermitized spectrum");
        for v in spec {
            let _ = writeln!(s, "  {}", num(*v));
        }
    }
    s
}

pub fn render(r: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(r),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("reports always serialize");
            s.push('\n');
            s
        }
    }
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> CommandOutput {
    let (analysis, report) = match run_analyze(args) {
        Ok(v) => v,
        Err(e) => return CommandOutput::failure(&e),
    };
    let code = match analysis.verdict() {
        Verdict::Unbroken => EXIT_CERTIFIED,
        Verdict::Broken => EXIT_BROKEN,
    };
    emit(render(&report, args.format).into_bytes(), args.out.as_deref(), code)
}
