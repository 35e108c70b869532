//! Command-line surface: analyze single states, sweep family parameters,
//! reproduce the bundled reference tables and the fidelity-entropy curve,
//! export the named constants, and run the verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qchannel::closedform::{family_cf, named_constants, FamilyClosedForm, FamilyKind};
use qchannel::metrics::{analyze, MetricsReport};
use qchannel::states::{make_state, DensityMatrix, FamilySpec};
use qchannel::tables::{self, fmt_sig9, SweepTable};
use qchannel::verify::{self, format_check, Level};
use qchannel::Error;

#[derive(Parser)]
#[command(
    name = "qchannel",
    about = "Two-qubit mixed entangled states as teleportation resources",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Werner,
    Mems,
    Wd,
    New,
}

impl FamilyArg {
    fn kind(self) -> FamilyKind {
        match self {
            FamilyArg::Werner => FamilyKind::Werner,
            FamilyArg::Mems => FamilyKind::Mems,
            FamilyArg::Wd => FamilyKind::Wd,
            FamilyArg::New => FamilyKind::New,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Args)]
struct OutputArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyParams {
    /// State family to build.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Werner / Werner-derivative singlet fraction.
    #[arg(long)]
    fw: Option<f64>,
    /// Werner-derivative unitary parameter.
    #[arg(long)]
    a: Option<f64>,
    /// MEMS concurrence.
    #[arg(long)]
    c: Option<f64>,
    /// GHZ/W mixing weight.
    #[arg(long)]
    p: Option<f64>,
    /// Pick the family member by its linear entropy instead of its natural
    /// parameter (Werner derivative still needs --a).
    #[arg(long)]
    slin: Option<f64>,
}

impl FamilyParams {
    fn spec(&self) -> Result<FamilySpec, (u8, String)> {
        let family = self.family.ok_or((2, "--family is required".to_string()))?;
        let usage = |msg: &str| (2u8, msg.to_string());
        let invalid = |e: &Error| (exit_code_for(e), e.to_string());
        let fw_or_slin = |natural: Option<f64>| match (natural, self.slin) {
            (Some(f_w), _) => Ok(f_w),
            (None, Some(s)) => {
                if !(0.0..=8.0 / 9.0).contains(&s) {
                    return Err(usage("--slin must lie in [0, 8/9]"));
                }
                Ok(qchannel::closedform::werner_fw_from_entropy(s))
            }
            (None, None) => Err(usage("--fw or --slin is required")),
        };
        Ok(match family {
            FamilyArg::Werner => FamilySpec::Werner {
                f_w: fw_or_slin(self.fw)?,
            },
            FamilyArg::Mems => FamilySpec::Mems {
                c: match (self.c, self.slin) {
                    (Some(c), _) => c,
                    (None, Some(s)) => {
                        qchannel::closedform::mems_c_from_entropy(s).map_err(|e| invalid(&e))?
                    }
                    (None, None) => return Err(usage("--c or --slin is required")),
                },
            },
            FamilyArg::Wd => FamilySpec::WernerDerivative {
                f_w: fw_or_slin(self.fw)?,
                a: self.a.ok_or_else(|| usage("--a is required"))?,
            },
            FamilyArg::New => FamilySpec::NmemsNew {
                p: match (self.p, self.slin) {
                    (Some(p), _) => p,
                    (None, Some(s)) => {
                        qchannel::closedform::new_p_from_entropy(s).map_err(|e| invalid(&e))?
                    }
                    (None, None) => return Err(usage("--p or --slin is required")),
                },
            },
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one state: merged definitional and closed-form report.
    Analyze {
        #[command(flatten)]
        params: FamilyParams,
        /// Analyze a matrix file ({dim, entries: [[re, im], ...]}) instead
        /// of a built-in family.
        #[arg(long, conflicts_with = "family")]
        matrix: Option<PathBuf>,
        /// Also run the sampling/hill-climbing/simulation oracles with this
        /// many samples.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for the sampling oracles.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reference comparison of the two non-maximally entangled channels.
    Table1 {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reference four-family fidelity comparison at fixed mixedness.
    Table2 {
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Werner and MEMS fidelity versus linear entropy.
    Fig1 {
        /// Sampling step in linear entropy, in (0, 0.1].
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep a family parameter, reporting both pipelines per row.
    Sweep {
        /// State family to sweep.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Fixed singlet fraction (Werner-derivative sweeps only).
        #[arg(long)]
        fw: Option<f64>,
        /// Parameter step.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export the named interval endpoints and thresholds.
    Constants {
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the cross-pipeline verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Exit 2: unusable input (flags, unreadable file, malformed JSON).
/// Exit 3: well-formed input that violates a validity invariant.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::MissingParam { .. } => 2,
        _ => 3,
    }
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), String> {
    match &output.out {
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
    }
}

#[derive(serde::Serialize)]
struct OracleReport {
    samples: usize,
    seed: u64,
    fef_sampled: f64,
    chsh_max: f64,
    fidelity_2design: f64,
    haar_fidelity: f64,
}

#[derive(serde::Serialize)]
struct AnalyzeReport {
    input: serde_json::Value,
    definitional: MetricsReport,
    closed_form: Option<FamilyClosedForm>,
    oracles: Option<OracleReport>,
}

fn analyze_command(
    params: &FamilyParams,
    matrix: &Option<PathBuf>,
    samples: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<String, (u8, String)> {
    let (input, rho, closed): (serde_json::Value, DensityMatrix, Option<FamilyClosedForm>) =
        match matrix {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| (2, format!("{}: {e}", path.display())))?;
                let rho = DensityMatrix::from_json(&text)
                    .map_err(|e| (exit_code_for(&e), e.to_string()))?;
                (
                    serde_json::json!({ "matrix": path.display().to_string() }),
                    rho,
                    None,
                )
            }
            None => {
                let spec = params.spec()?;
                let rho = make_state(spec).map_err(|e| (exit_code_for(&e), e.to_string()))?;
                let cf = family_cf(spec).map_err(|e| (exit_code_for(&e), e.to_string()))?;
                (
                    serde_json::to_value(spec).expect("spec serializes"),
                    rho,
                    Some(cf),
                )
            }
        };
    let report = analyze(&rho).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let oracles = match samples {
        Some(n) if n >= 1 => Some(OracleReport {
            samples: n,
            seed,
            fef_sampled: qchannel::metrics::fef_sampling_oracle(&rho, n, seed),
            chsh_max: qchannel::metrics::chsh_max_oracle(&rho, 24)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?,
            fidelity_2design: qchannel::telesim::average_fidelity_2design(&rho),
            haar_fidelity: qchannel::telesim::haar_average_fidelity(&rho, n, seed),
        }),
        Some(_) => return Err((2, "--samples must be at least 1".to_string())),
        None => None,
    };
    let merged = AnalyzeReport {
        input,
        definitional: report,
        closed_form: closed,
        oracles,
    };
    match format {
        Format::Json => Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&merged).expect("report serializes")
        )),
        Format::Csv => {
            let mut out = String::new();
            out.push_str("# column s_lin..chsh_violated: definitional\n");
            let mut header = String::from(
                "s_lin,concurrence,fef,n_value,m_value,f_opt,f_opt_raw,useful,chsh_violated",
            );
            let mut row = format!(
                "{},{},{},{},{},{},{},{},{}",
                fmt_sig9(report.s_lin),
                fmt_sig9(report.concurrence),
                fmt_sig9(report.fef),
                fmt_sig9(report.n_value),
                fmt_sig9(report.m_value),
                fmt_sig9(report.f_opt),
                fmt_sig9(report.f_opt_raw),
                report.useful,
                report.chsh_violated
            );
            if let Some(o) = &merged.oracles {
                out.push_str(
                    "# column fef_sampled,chsh_max,fidelity_2design,haar_fidelity: simulator\n",
                );
                header.push_str(",fef_sampled,chsh_max,fidelity_2design,haar_fidelity");
                row.push_str(&format!(
                    ",{},{},{},{}",
                    fmt_sig9(o.fef_sampled),
                    fmt_sig9(o.chsh_max),
                    fmt_sig9(o.fidelity_2design),
                    fmt_sig9(o.haar_fidelity)
                ));
            }
            out.push_str(&header);
            out.push('\n');
            out.push_str(&row);
            out.push('\n');
            Ok(out)
        }
    }
}

fn render_table(table: SweepTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => format!("{}\n", table.to_json()),
    }
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze {
            params,
            matrix,
            samples,
            seed,
            format,
            output,
        } => {
            let text = analyze_command(&params, &matrix, samples, seed, format)?;
            write_output(&output, &text).map_err(|e| (1, e))
        }
        Command::Table1 { format, output } => {
            let t = tables::table1().map_err(|e| (exit_code_for(&e), e.to_string()))?;
            write_output(&output, &render_table(t, format)).map_err(|e| (1, e))
        }
        Command::Table2 { format, output } => {
            let t = tables::table2().map_err(|e| (exit_code_for(&e), e.to_string()))?;
            write_output(&output, &render_table(t, format)).map_err(|e| (1, e))
        }
        Command::Fig1 {
            step,
            format,
            output,
        } => {
            let t = tables::fig1(step).map_err(|e| (exit_code_for(&e), e.to_string()))?;
            write_output(&output, &render_table(t, format)).map_err(|e| (1, e))
        }
        Command::Sweep {
            family,
            fw,
            step,
            format,
            output,
        } => {
            let t = tables::sweep(family.kind(), fw, step)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            write_output(&output, &render_table(t, format)).map_err(|e| (1, e))
        }
        Command::Constants { format, output } => {
            let constants = named_constants();
            let text = match format {
                Format::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&constants).expect("constants serialize")
                ),
                Format::Csv => {
                    let mut out = String::from("name,value,description\n");
                    for c in &constants {
                        out.push_str(&format!(
                            "{},{},\"{}\"\n",
                            c.name,
                            fmt_sig9(c.value),
                            c.description
                        ));
                    }
                    out
                }
            };
            write_output(&output, &text).map_err(|e| (1, e))
        }
        Command::Verify { level, output } => {
            let level = match level {
                VerifyLevel::Quick => Level::Quick,
                VerifyLevel::Full => Level::Full,
            };
            let checks = verify::run(level);
            let mut text = String::new();
            for c in &checks {
                text.push_str(&format_check(c));
                text.push('\n');
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            text.push_str(&format!(
                "{} checks, {} failed\n",
                checks.len(),
                failed.len()
            ));
            write_output(&output, &text).map_err(|e| (1, e))?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err((1, format!("failed invariants: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
