//! `stokes`: command-line front end to stokes-core.
//!
//! Exit codes: 0 on success or a passing check, 1 when a check fails
//! (validation violations, oracle contradictions), 2 on operational or
//! domain errors.

mod commands;
mod input;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stokes_core::json::parse_rational;
use stokes_core::oracle::GridSpec;
use stokes_core::stokesdata::to_json_with_report;
use stokes_core::StokesData;

#[derive(Parser)]
#[command(name = "stokes", version, about = "Exact Stokes data computations")]
struct Cli {
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

/// Sampling grid of the numerical oracle.
#[derive(Args)]
struct GridArgs {
    /// Radial decades 1..=N sampled toward the puncture.
    #[arg(long, global = true, env = "STOKES_ORACLE_DECADES", default_value_t = 6)]
    grid_decades: u32,
    #[arg(long, global = true, env = "STOKES_ORACLE_ANGLES", default_value_t = 64)]
    grid_angles: usize,
    #[arg(long, global = true, env = "STOKES_ORACLE_T", default_value_t = 64)]
    grid_t: usize,
    #[arg(long, global = true, env = "STOKES_ORACLE_THRESHOLD", default_value = "1000")]
    grid_threshold: String,
    #[arg(long, global = true, env = "STOKES_ORACLE_MARGIN", default_value = "1/16")]
    grid_margin: String,
}

impl GridArgs {
    fn spec(&self) -> anyhow::Result<GridSpec> {
        let g = GridSpec {
            radial_decades: (1..=self.grid_decades).collect(),
            angular_samples: self.grid_angles,
            t_samples: self.grid_t,
            growth_threshold: parse_rational(&self.grid_threshold)?,
            confidence_margin: parse_rational(&self.grid_margin)?,
        };
        g.check()?;
        Ok(g)
    }
}

#[derive(Args)]
struct Randomness {
    /// Seed of the randomized averaging.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Averaging attempts before giving up.
    #[arg(long, default_value_t = 32)]
    retries: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Check every invariant of a Stokes data document.
    Validate {
        #[arg(long)]
        input: String,
    },
    /// Allowed entries of Hom between exponential sums on an arc, or the
    /// sector and Stokes masks of a datum.
    Hom {
        #[arg(long, conflicts_with_all = ["field", "source", "target", "arc"])]
        input: Option<String>,
        #[arg(long, requires_all = ["source", "target", "arc"])]
        field: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        source: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        arc: Option<String>,
    },
    /// Exact dominance of phi against psi on an arc.
    Compare {
        #[arg(long, default_value = "rationals")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        #[arg(long, allow_hyphen_values = true)]
        arc: String,
    },
    /// Directions in [0, 1) where Re(phi - psi) changes sign.
    StokesDirections {
        #[arg(long, default_value = "rationals")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
    /// Local and glued monodromies with their characteristic polynomials.
    Monodromy {
        #[arg(long)]
        input: String,
    },
    /// The dual conjugate datum over the same field.
    Conjugate {
        #[arg(long)]
        input: String,
    },
    /// Apply the field automorphism sending the generator to IMAGE.
    GaloisConjugate {
        #[arg(long)]
        input: String,
        /// Power-basis coordinates of the generator's image.
        #[arg(long, allow_hyphen_values = true)]
        image: String,
    },
    /// Descend along a G-structure to a subfield.
    Descend {
        #[arg(long)]
        input: String,
        #[arg(long)]
        gstructure: String,
        #[arg(long)]
        subfield: String,
        #[command(flatten)]
        rand: Randomness,
    },
    /// Carry a lattice to the standard one by an allowed automorphism.
    NormalizeLattice {
        #[arg(long)]
        input: String,
    },
    /// Real form along complex conjugation.
    RealForm {
        #[arg(long)]
        input: String,
        /// Isomorphism from the datum onto its conjugate.
        #[arg(long)]
        psi: String,
        #[command(flatten)]
        rand: Randomness,
    },
    /// Cross-check exact comparisons against the numerical oracle.
    OracleCheck {
        #[arg(long, conflicts_with_all = ["phi", "psi", "arc"])]
        input: Option<String>,
        #[arg(long, default_value = "rationals")]
        field: String,
        #[arg(long, allow_hyphen_values = true, requires_all = ["psi", "arc"])]
        phi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        arc: Option<String>,
        /// Also compare forbidden Hom entries against section dimensions.
        #[arg(long)]
        sections: bool,
    },
    /// Extend scalars to a larger field.
    Extend {
        #[arg(long)]
        input: String,
        #[arg(long)]
        field: String,
    },
}

/// Result of a command in both renderings.
pub struct Output {
    pub exit: i32,
    pub human: String,
    pub body: Body,
}

pub enum Body {
    /// A datum document carrying a report block.
    Datum(Box<StokesData>, Value),
    Report(Value),
}

impl Output {
    pub fn report(human: String, report: Value) -> Output {
        Output { exit: 0, human, body: Body::Report(report) }
    }

    pub fn datum(human: String, d: StokesData, report: Value) -> Output {
        Output { exit: 0, human, body: Body::Datum(Box::new(d), report) }
    }

    pub fn exit(mut self, code: i32) -> Output {
        self.exit = code;
        self
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Hom { .. } => "hom",
        Command::Compare { .. } => "compare",
        Command::StokesDirections { .. } => "stokes-directions",
        Command::Monodromy { .. } => "monodromy",
        Command::Conjugate { .. } => "conjugate",
        Command::GaloisConjugate { .. } => "galois-conjugate",
        Command::Descend { .. } => "descend",
        Command::NormalizeLattice { .. } => "normalize-lattice",
        Command::RealForm { .. } => "real-form",
        Command::OracleCheck { .. } => "oracle-check",
        Command::Extend { .. } => "extend",
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<stokes_core::Error>() {
        Some(e) => e.kind(),
        None if e.downcast_ref::<std::io::Error>().is_some() => "Io",
        None => "Usage",
    }
}

fn main() {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let result = commands::run(cli.command, &cli.grid);
    let code = match result {
        Ok(out) => {
            match (cli.format, out.body) {
                (Format::Human, _) => print!("{}", out.human),
                (Format::Structured, Body::Datum(d, mut report)) => {
                    if let Value::Object(m) = &mut report {
                        m.insert("command".into(), json!(name));
                    }
                    println!("{}", to_json_with_report(&d, report));
                }
                (Format::Structured, Body::Report(report)) => {
                    let doc = json!({"format": "stokes-report/1", "command": name, "report": report});
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
                }
            }
            out.exit
        }
        Err(e) => {
            let kind = error_kind(&e);
            let message = format!("{e:#}");
            match cli.format {
                Format::Human => eprintln!("error[{kind}]: {message}"),
                Format::Structured => {
                    let doc = json!({"error": {"kind": kind, "message": message}});
                    println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
                }
            }
            2
        }
    };
    std::process::exit(code);
}
