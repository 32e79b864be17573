//! `wcf` — command-line front end for the weak coin-flipping toolkit.
//!
//! Exit codes: 0 success, 2 validation failure, 3 verification rejection,
//! 4 resource limit.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wcf_core::cert::{build_certificate, verify_certificate};
use wcf_core::cheat::{ascend, gap_report};
use wcf_core::protocol::{simulate_honest_run, CoinOutcome, ProtocolParams, Side};
use wcf_core::tree::{bounds, eval_constraint_fast, eval_side_fast};
use wcf_core::tune::{optimize_bias, sweep_reciprocal, sweep_reciprocal_odd, TuneConfig};
use wcf_core::Error;

mod docs;
mod output;

use output::{sig12, Format};

#[derive(Parser)]
#[command(
    name = "wcf",
    version,
    about = "Weak coin-flipping protocols: cheating bounds, certificates, strategy search, tuning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WeightArgs {
    /// Number of messages n
    #[arg(long)]
    n: usize,
    /// Comma-separated weights a_1,...,a_n
    #[arg(long, value_name = "LIST", conflicts_with = "a_file")]
    a: Option<String>,
    /// File with whitespace/comma-separated weights
    #[arg(long, value_name = "PATH")]
    a_file: Option<PathBuf>,
    /// Target honest probability of Bob winning
    #[arg(long, default_value_t = 0.5)]
    c: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the emission to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::A => Side::Alice,
            SideArg::B => Side::Bob,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Parity {
    Even,
    Odd,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate alpha, beta, the honest constraint and the bias bound
    Bounds {
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimize the certified bias over the weights (fairness held exactly)
    Optimize {
        /// Number of messages n
        #[arg(long)]
        n: usize,
        /// Independent starts per continuation rung
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on objective evaluations
        #[arg(long, default_value_t = 2_000_000)]
        max_evals: usize,
        /// Simplex convergence tolerance
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Target honest probability of Bob winning
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate the reciprocal families a_k = 1/k (even) or 1/(k+1) (odd)
    Sweep {
        /// Largest n to evaluate
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Parity::Even)]
        parity: Parity,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build and verify a dual certificate
    VerifyCert {
        #[command(flatten)]
        weights: WeightArgs,
        /// Which party's bound to certify
        #[arg(long, value_enum)]
        side: SideArg,
        /// Export the full certificate document as JSON
        #[arg(long, value_name = "PATH")]
        export: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample honest protocol executions
    Simulate {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        /// Base seed; run i uses seed + i
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hill-climb a cheating strategy and report it against the dual bound
    Cheat {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, value_enum)]
        side: SideArg,
        /// Cheater's ancilla qubits
        #[arg(long, default_value_t = 2)]
        ancilla: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Lower/upper sandwich on both sides' cheating probabilities
    Gap {
        #[command(flatten)]
        weights: WeightArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::ShapeMismatch(_) | Error::DegenerateProtocol(_) => 2,
        Error::DegenerateCertificate(_)
        | Error::SupportViolation { .. }
        | Error::PreconditionViolated { .. } => 3,
        Error::ResourceLimit { .. } => 4,
    }
}

fn parse_weights(args: &WeightArgs) -> Result<ProtocolParams, Error> {
    let raw = if let Some(list) = &args.a {
        list.clone()
    } else if let Some(path) = &args.a_file {
        fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?
    } else {
        return Err(Error::invalid("provide the weights with --a or --a-file"));
    };
    let mut a = Vec::new();
    for token in raw.split([',', ' ', '\t', '\n', '\r']).filter(|t| !t.is_empty()) {
        let value: f64 = token
            .parse()
            .map_err(|_| Error::invalid(format!("malformed weight token '{token}'")))?;
        a.push(value);
    }
    if a.len() != args.n {
        return Err(Error::invalid(format!(
            "expected {} weights for --n {}, got {}",
            args.n,
            args.n,
            a.len()
        )));
    }
    ProtocolParams::with_honest_prob(a, args.c)
}

fn emit(output: &OutputArgs, text: String) -> Result<(), Error> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Bounds { weights, output } => {
            let p = parse_weights(&weights)?;
            let r = bounds(&p);
            let doc = docs::BoundsDoc {
                n: p.n(),
                alpha: r.alpha,
                beta: r.beta,
                constraint: r.constraint,
                bias_bound: r.bias_bound,
            };
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => output::to_json(&doc)?,
                Format::Csv => {
                    let mut s = String::from("n,alpha,beta,constraint,bias_bound\n");
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        doc.n,
                        sig12(doc.alpha),
                        sig12(doc.beta),
                        sig12(doc.constraint),
                        sig12(doc.bias_bound)
                    ));
                    s
                }
            };
            emit(&output, text)
        }
        Command::Optimize { n, restarts, seed, max_evals, tol, c, output } => {
            let cfg = TuneConfig { n, restarts, max_evals, seed, tol, c };
            let r = optimize_bias(&cfg)?;
            let doc = docs::OptimizeDoc {
                n,
                seed,
                restarts,
                evals: r.evals,
                a: r.params.weights().to_vec(),
                alpha: r.alpha,
                beta: r.beta,
                bias: r.bias,
                constraint_residual: eval_constraint_fast(&r.params) - c,
                alpha_beta_residual: (r.alpha - r.beta).abs(),
            };
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => output::to_json(&doc)?,
                Format::Csv => {
                    let mut s = String::from("n,alpha,beta,bias,evals,a\n");
                    let joined: Vec<String> = doc.a.iter().map(|&x| sig12(x)).collect();
                    s.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        doc.n,
                        sig12(doc.alpha),
                        sig12(doc.beta),
                        sig12(doc.bias),
                        doc.evals,
                        joined.join(";")
                    ));
                    s
                }
            };
            emit(&output, text)
        }
        Command::Sweep { n_max, parity, output } => {
            let rows = match parity {
                Parity::Even => sweep_reciprocal(n_max)?,
                Parity::Odd => sweep_reciprocal_odd(n_max)?,
            };
            let format = output.format.unwrap_or(Format::Csv);
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("n,alpha,beta\n");
                    for row in &rows {
                        s.push_str(&format!(
                            "{},{},{}\n",
                            row.n,
                            sig12(row.alpha),
                            sig12(row.beta)
                        ));
                    }
                    s
                }
                Format::Json => {
                    let doc: Vec<docs::SweepRowDoc> = rows
                        .iter()
                        .map(|r| docs::SweepRowDoc { n: r.n, alpha: r.alpha, beta: r.beta })
                        .collect();
                    output::to_json(&doc)?
                }
            };
            emit(&output, text)
        }
        Command::VerifyCert { weights, side, export, output } => {
            let p = parse_weights(&weights)?;
            let side = Side::from(side);
            let cert = build_certificate(&p, side)?;
            let report = verify_certificate(&cert)?;
            if let Some(path) = &export {
                let doc = docs::certificate_doc(&cert, &report);
                fs::write(path, output::to_json(&doc)?)
                    .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
            }
            let doc = docs::ReportDoc {
                n: p.n(),
                side: side.letter(),
                bound: cert.bound(),
                k: cert.k(),
                domination_margin: report.domination_margin,
                balance_residual: report.balance_residual,
                tree_match_residual: report.tree_match_residual,
                psd_min_eig: report.psd_min_eig,
                accepted: report.accepted(),
            };
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => output::to_json(&doc)?,
                Format::Csv => {
                    let mut s = String::from(
                        "n,side,bound,K,domination_margin,balance_residual,tree_match_residual,accepted\n",
                    );
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        doc.n,
                        doc.side,
                        sig12(doc.bound),
                        sig12(doc.k),
                        sig12(doc.domination_margin),
                        sig12(doc.balance_residual),
                        sig12(doc.tree_match_residual),
                        doc.accepted
                    ));
                    s
                }
            };
            emit(&output, text)?;
            if doc.accepted {
                Ok(())
            } else {
                Err(Error::DegenerateCertificate(format!(
                    "certificate rejected: margin {}, balance {}, tree {}",
                    doc.domination_margin, doc.balance_residual, doc.tree_match_residual
                )))
            }
        }
        Command::Simulate { weights, runs, seed, output } => {
            let p = parse_weights(&weights)?;
            if runs == 0 {
                return Err(Error::invalid("--runs must be positive"));
            }
            let mut bob = 0usize;
            let mut failures = 0usize;
            let mut disagreements = 0usize;
            for i in 0..runs {
                let t = simulate_honest_run(&p, seed.wrapping_add(i as u64))?;
                if t.bob_outcome == CoinOutcome::BobWins {
                    bob += 1;
                }
                if !t.verification_passed {
                    failures += 1;
                }
                if t.alice_outcome != t.bob_outcome {
                    disagreements += 1;
                }
            }
            let doc = docs::SimulateDoc {
                n: p.n(),
                runs,
                seed,
                bob_win_frequency: bob as f64 / runs as f64,
                verification_failures: failures,
                outcome_disagreements: disagreements,
                constraint: eval_constraint_fast(&p),
            };
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => output::to_json(&doc)?,
                Format::Csv => {
                    let mut s = String::from(
                        "n,runs,seed,bob_win_frequency,verification_failures,outcome_disagreements,constraint\n",
                    );
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        doc.n,
                        doc.runs,
                        doc.seed,
                        sig12(doc.bob_win_frequency),
                        doc.verification_failures,
                        doc.outcome_disagreements,
                        sig12(doc.constraint)
                    ));
                    s
                }
            };
            emit(&output, text)
        }
        Command::Cheat { weights, side, ancilla, iters, seed, output } => {
            let p = parse_weights(&weights)?;
            let side = Side::from(side);
            let r = ascend(&p, side, ancilla, iters, seed)?;
            let upper = eval_side_fast(&p, side);
            let doc = docs::CheatDoc {
                n: p.n(),
                side: side.letter(),
                ancilla,
                iters,
                seed,
                value: r.value,
                upper_bound: upper,
                gap_to_bound: upper - r.value,
            };
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => output::to_json(&doc)?,
                Format::Csv => {
                    let mut s = String::from(
                        "n,side,ancilla,iters,seed,value,upper_bound,gap_to_bound\n",
                    );
                    s.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        doc.n,
                        doc.side,
                        doc.ancilla,
                        doc.iters,
                        doc.seed,
                        sig12(doc.value),
                        sig12(doc.upper_bound),
                        sig12(doc.gap_to_bound)
                    ));
                    s
                }
            };
            emit(&output, text)
        }
        Command::Gap { weights, seed, output } => {
            let p = parse_weights(&weights)?;
            let rows = gap_report(&p, seed)?;
            let format = output.format.unwrap_or(Format::Json);
            let text = match format {
                Format::Json => {
                    let doc: Vec<docs::GapRowDoc> = rows
                        .iter()
                        .map(|r| docs::GapRowDoc {
                            side: r.side.letter(),
                            lower: r.lower,
                            upper: r.upper,
                            gap: r.gap,
                        })
                        .collect();
                    output::to_json(&doc)?
                }
                Format::Csv => {
                    let mut s = String::from("side,lower,upper,gap\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{},{}\n",
                            r.side.letter(),
                            sig12(r.lower),
                            sig12(r.upper),
                            sig12(r.gap)
                        ));
                    }
                    s
                }
            };
            emit(&output, text)
        }
    }
}
