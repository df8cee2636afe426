use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use markovforge::classifier::{classify, ClassificationReport};
use markovforge::format::SpectrumFile;
use markovforge::graph::{self, ExportFormat};
use markovforge::numerics::{BetaValue, EntropyTarget, PrecisionPolicy};
use markovforge::oracle::{growth_rate, PathCountTable};
use markovforge::spectrum::{build_spectrum, delete_loop, LoopSpectrum};
use markovforge::verify::verify;
use markovforge::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID_BETA: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_NO_DELETABLE_LOOP: u8 = 4;
const EXIT_VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "markovforge", version, about = "Loop graphs of given entropy and period, with certified classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct PrecisionArg {
    /// Working precision in bits
    #[arg(long, env = "MARKOVFORGE_PRECISION", default_value_t = 256)]
    precision: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Build the spectrum of a base β (or of entropy h and period p, with β = e^{hp})
    Build {
        #[arg(long, conflicts_with_all = ["entropy", "period"], required_unless_present = "entropy")]
        beta: Option<String>,
        /// Entropy target: a decimal, a fraction, or ln2 / ln3 / ...
        #[arg(long)]
        entropy: Option<String>,
        #[arg(long, requires = "entropy", default_value_t = 1)]
        period: u32,
        #[arg(long, default_value_t = 64)]
        max_n: usize,
        #[command(flatten)]
        precision: PrecisionArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Delete one loop, giving a transient graph of the same entropy
    TransientVariant {
        file: PathBuf,
        /// Loop length to delete, or "auto" for the shortest one of length >= 2
        #[arg(long, default_value = "auto")]
        n0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the classification report as JSON
    Classify {
        file: PathBuf,
        /// Rebuilds from β when it differs from the precision stored in the file
        #[arg(long, env = "MARKOVFORGE_PRECISION")]
        precision: Option<u32>,
        /// Also report the entropy in bits
        #[arg(long)]
        bits: bool,
    },
    /// Certified entropy plus path-count growth estimates
    Entropy {
        file: PathBuf,
        /// Loop lengths used for the counts (default: the file's truncation)
        #[arg(long)]
        max_n: Option<usize>,
        /// Write n,f,p,growth_estimate rows here
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        bits: bool,
        #[command(flatten)]
        precision: PrecisionArg,
    },
    /// Multiply every loop length by p
    Lift {
        file: PathBuf,
        #[arg(long)]
        period: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the realized truncation as DOT or JSON
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Truncation (default: the largest that fits the vertex limit)
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite; exits 5 listing failures
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        oracle_depth: usize,
        #[command(flatten)]
        precision: PrecisionArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

enum Failure {
    Lib(Error),
    Io(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotGreaterThanOne(_) => EXIT_INVALID_BETA,
        Error::PrecisionExhausted(_) | Error::FloorUndecidable { .. } => EXIT_PRECISION,
        Error::NoDeletableLoop(_) => EXIT_NO_DELETABLE_LOOP,
        _ => EXIT_FAILURE,
    }
}

fn read_file(path: &Path) -> std::result::Result<SpectrumFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(SpectrumFile::from_json(&text)?)
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

/// Rebuild a constructed spectrum at another precision, replaying deletions and additions.
fn rebuild(s: &LoopSpectrum, bits: u32) -> markovforge::Result<LoopSpectrum> {
    let Some(meta) = s.meta() else {
        return Ok(s.clone());
    };
    if meta.precision_bits == bits {
        return Ok(s.clone());
    }
    let mut t = build_spectrum(&meta.beta, s.max_n(), &PrecisionPolicy::starting_at(bits))?;
    if let Some(n0) = s.deleted_loop() {
        t = delete_loop(&t, Some(n0))?;
    }
    for &n in s.added_loops() {
        t = t.add_loop(n)?;
    }
    Ok(t)
}

/// Classify at the file's own precision unless `bits` overrides it; `fallback_bits` is
/// used for spectra that carry no precision.
fn report_for(
    file: &SpectrumFile,
    bits: Option<u32>,
    fallback_bits: u32,
) -> std::result::Result<ClassificationReport, Failure> {
    let mut s = file.to_spectrum()?;
    if let Some(b) = bits {
        s = rebuild(&s, b)?;
    }
    let bits = bits.unwrap_or(s.meta().map_or(fallback_bits, |m| m.precision_bits));
    Ok(classify(&s, bits)?.lifted(file.period_lift))
}

fn with_bits(mut v: serde_json::Value, r: &ClassificationReport, bits: bool) -> serde_json::Value {
    if bits {
        v["entropy_bits"] = r
            .entropy_bits()
            .map_or(serde_json::Value::Null, |h| markovforge::classifier::interval_json(&h));
    }
    v
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Build {
            beta,
            entropy,
            period,
            max_n,
            precision,
            out,
        } => {
            let (beta, target, lift) = match (beta, entropy) {
                (Some(b), _) => (b.parse::<BetaValue>()?, None, 1),
                (None, Some(h)) => {
                    let t: EntropyTarget = h.parse()?;
                    (t.beta_for_period(period)?, Some(t.to_string()), period as usize)
                }
                (None, None) => unreachable!("clap requires one of --beta / --entropy"),
            };
            let s = build_spectrum(&beta, max_n, &PrecisionPolicy::starting_at(precision.precision))?;
            emit(out.as_deref(), &SpectrumFile::from_spectrum(&s, target, lift).to_json())
        }
        Command::TransientVariant { file, n0, out } => {
            let f = read_file(&file)?;
            let n0 = match n0.as_str() {
                "auto" => None,
                v => Some(
                    v.parse::<usize>()
                        .map_err(|_| Error::InvalidArgument(format!("--n0 {v:?}: expected auto or an integer")))?,
                ),
            };
            let t = delete_loop(&f.to_spectrum()?, n0)?;
            let g = SpectrumFile::from_spectrum(&t, f.entropy_target.clone(), f.period_lift);
            emit(out.as_deref(), &g.to_json())
        }
        Command::Classify { file, precision, bits } => {
            let f = read_file(&file)?;
            let r = report_for(&f, precision, 256)?;
            let v = with_bits(r.to_json(), &r, bits);
            emit(None, &(serde_json::to_string_pretty(&v).expect("json") + "\n"))
        }
        Command::Entropy {
            file,
            max_n,
            csv,
            bits,
            precision,
        } => {
            let f = read_file(&file)?;
            let s = f.to_spectrum()?;
            let r = report_for(&f, None, precision.precision)?;
            let n = max_n.unwrap_or(s.max_n());
            let depth = n * f.period_lift;
            let counts = PathCountTable::from_spectrum(&s, f.period_lift, depth)?;
            let window = (depth / f.period_lift / 4).max(1);
            let growth = growth_rate(&counts.p, window).ok();
            let mut v = json!({
                "entropy": r.entropy.as_ref().map(markovforge::classifier::interval_json),
                "period_lift": f.period_lift,
                "count_depth": depth,
                "growth_estimate": growth.as_ref().map(|g| format!("{:.15}", g.last().to_f64())),
                "growth_estimate_certified": false,
            });
            v = with_bits(v, &r, bits);
            if let Some(path) = csv {
                emit(Some(&path), &counts.to_csv())?;
            }
            emit(None, &(serde_json::to_string_pretty(&v).expect("json") + "\n"))
        }
        Command::Lift { file, period, out } => {
            if period == 0 {
                return Err(Error::InvalidArgument("--period must be at least 1".into()).into());
            }
            let mut f = read_file(&file)?;
            f.to_spectrum()?;
            f.period_lift *= period;
            emit(out.as_deref(), &f.to_json())
        }
        Command::Export {
            file,
            format,
            max_n,
            out,
        } => {
            let f = read_file(&file)?;
            let s = f.to_spectrum()?;
            let n = match max_n {
                Some(n) => n,
                None => graph::largest_realizable(&s, f.period_lift, graph::MAX_VERTICES).max(1),
            };
            let g = graph::lift_period(&graph::realize(&s, n)?, f.period_lift)?;
            let fmt = match format {
                Format::Dot => ExportFormat::Dot,
                Format::Json => ExportFormat::Json,
            };
            emit(out.as_deref(), &graph::export(&g, fmt))
        }
        Command::Verify {
            file,
            oracle_depth,
            precision,
        } => {
            let f = read_file(&file)?;
            let s = f.to_spectrum()?;
            let report = verify(&s, f.period_lift, oracle_depth, precision.precision)?;
            let mut text = format!("oracle depth used: {}\n", report.depth_used);
            for c in &report.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                text.push_str(&format!("{mark} {}: {}\n", c.name, c.detail));
            }
            emit(None, &text)?;
            if report.passed() {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                Err(Failure::Verify(names.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Failure::Verify(names)) => {
            eprintln!("verify failed: {names}");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_taxonomy() {
        assert_eq!(exit_code(&Error::NotGreaterThanOne("1".into())), 2);
        assert_eq!(exit_code(&Error::PrecisionExhausted("x".into())), 3);
        let undecided = Error::FloorUndecidable {
            lo: "1".into(),
            hi: "2".into(),
            precision_bits: 4096,
        };
        assert_eq!(exit_code(&undecided), 3);
        assert_eq!(exit_code(&Error::NoDeletableLoop("x".into())), 4);
        assert_eq!(exit_code(&Error::TailUnavailable), 1);
    }
}
