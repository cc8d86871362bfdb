//! Command-line driver: runs verification batteries against explicit matrix
//! groups over a chosen prime and streams one machine-readable certificate
//! per check.
//!
//! Exit codes: 0 all requested checks pass; 1 some check failed or was
//! refused; 2 usage error; 3 inadmissible prime; 4 materialization bound
//! exceeded.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pimax::cert::Certificate;
use pimax::checks::{replay_certificate, run_check, CheckId, CheckOptions, ReplayOutcome};
use pimax::ff::admissible_prime;
use pimax::pi::PrimeSet;
use pimax::submax::Session;
use pimax::Error;

#[derive(Parser)]
#[command(name = "pimax", version, about = "verification batteries for π-maximal and π-submaximal subgroup computations in explicit matrix groups over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named check (or `all`) and emit certificates.
    Verify {
        /// presentation | character | irreducibility | aut-l | normalizer-gl
        /// | aut-g | suzuki | wh-sweep | lemma22 | lemma23 | lemma42 |
        /// example1 | example2 | all
        check: String,
        /// Odd prime with x²+x+2 split over F_p (p ≡ 1,2,4 mod 7)
        #[arg(long, default_value_t = 11)]
        p: u64,
        /// Comma-separated prime set π
        #[arg(long, default_value = "2,3")]
        pi: String,
        /// Cap on materialized element sets
        #[arg(long, default_value_t = 8_000_000)]
        max_materialize: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the certificate stream to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// example1 only: re-run the construction over all 168 outer
        /// automorphism choices
        #[arg(long)]
        all_outer: bool,
        /// Re-check the witnesses of a previously emitted certificate file
        /// instead of recomputing
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            check,
            p,
            pi,
            max_materialize,
            format,
            out,
            threads,
            all_outer,
            replay,
        } => {
            let Some(requested) = parse_checks(&check) else {
                eprintln!("unknown check: {check}");
                return ExitCode::from(2);
            };
            let pi = match PrimeSet::parse(&pi) {
                Ok(pi) => pi,
                Err(e) => {
                    eprintln!("bad π: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(n) = threads {
                // ignore the error when a pool already exists (tests)
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            let mut writer: Box<dyn Write> = match &out {
                Some(path) => match File::create(path) {
                    Ok(f) => Box::new(f),
                    Err(e) => {
                        eprintln!("cannot open {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                },
                None => Box::new(std::io::stdout()),
            };

            if let Some(file) = replay {
                return run_replay(&file, &requested, &mut writer);
            }

            if !admissible_prime(p) {
                eprintln!(
                    "prime {p} is not admissible: need an odd prime coprime to 168 with \
                     x²+x+2 split over F_p (p ≡ 1, 2 or 4 mod 7)"
                );
                return ExitCode::from(3);
            }
            let session = Session::new(p, max_materialize);
            let opts = CheckOptions { pi, all_outer };
            let mut all_pass = true;
            for id in requested {
                match run_check(&session, id, &opts) {
                    Ok(cert) => {
                        all_pass &= cert.passed();
                        let line = match format {
                            Format::Json => cert.to_json_line(),
                            Format::Text => cert.to_text_line(),
                        };
                        if writeln!(writer, "{line}").is_err() {
                            return ExitCode::from(2);
                        }
                    }
                    Err(Error::InadmissiblePrime(p)) => {
                        eprintln!("prime {p} is not admissible");
                        return ExitCode::from(3);
                    }
                    Err(e @ Error::ClosureOverflow { .. }) => {
                        eprintln!("{e}");
                        return ExitCode::from(4);
                    }
                    Err(e) => {
                        eprintln!("{id:?} aborted: {e}", id = id.as_str());
                        return ExitCode::from(1);
                    }
                }
            }
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn parse_checks(text: &str) -> Option<Vec<CheckId>> {
    if text == "all" {
        return Some(CheckId::ALL.to_vec());
    }
    CheckId::parse(text).map(|id| vec![id])
}

fn run_replay(file: &PathBuf, requested: &[CheckId], writer: &mut dyn Write) -> ExitCode {
    let reader = match File::open(file) {
        Ok(f) => BufReader::new(f),
        Err(e) => {
            eprintln!("cannot open {}: {e}", file.display());
            return ExitCode::from(2);
        }
    };
    let wanted: Vec<&str> = requested.iter().map(|c| c.as_str()).collect();
    let mut all_ok = true;
    for line in reader.lines() {
        let Ok(line) = line else {
            all_ok = false;
            break;
        };
        if line.trim().is_empty() {
            continue;
        }
        let cert = match Certificate::from_json_line(&line) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("bad certificate line: {e}");
                all_ok = false;
                continue;
            }
        };
        if !wanted.contains(&cert.check_id.as_str()) {
            continue;
        }
        let outcome = match replay_certificate(&cert) {
            Ok(o) => o,
            Err(e) => ReplayOutcome::Mismatch(e.to_string()),
        };
        let text = match &outcome {
            ReplayOutcome::Verified => "VERIFIED".to_string(),
            ReplayOutcome::Skipped(why) => format!("SKIPPED ({why})"),
            ReplayOutcome::Mismatch(why) => {
                all_ok = false;
                format!("MISMATCH ({why})")
            }
        };
        if writeln!(writer, "replay {} @ p={}: {}", cert.check_id, cert.parameters.p, text)
            .is_err()
        {
            return ExitCode::from(2);
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
