use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use serde_json::json;

use thuetape::codec::{compute_constants, decode_number, encode_number, BitString};
use thuetape::crossing::{
    full_verification, local_summary, pump_cut, record_trace, splice, trace_from_json,
    trace_to_json, Split,
};
use thuetape::experiment::{run_experiment, Family};
use thuetape::langs::{builtin_system, generate_midbit_system, parse_bits, PUBLISHED_MIDBIT_TOTAL};
use thuetape::machine::{MachineProgram, RunOptions};
use thuetape::rewrite::{parse_system, ChurchRosser, ThueSystem, Word};

#[derive(Parser)]
#[command(
    name = "thuetape",
    version,
    about = "Reduction machines for Church-Rosser Thue systems"
)]
struct Cli {
    /// System file, or the name of a built-in system (DYCK, AA, BITDYCK, PAIRS, MIDBIT5, MIDBIT).
    #[arg(long, global = true)]
    system: Option<String>,
    /// Emit JSON instead of plain lines.
    #[arg(long, global = true)]
    json: bool,
    /// Check machine invariants at every step.
    #[arg(long, global = true)]
    audit: bool,
    /// Seed for anything randomized. Every subcommand is deterministic given it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the Church-Rosser property via critical pairs.
    Check,
    /// Leftmost normal form of a word by rewriting.
    Reduce {
        #[arg(long)]
        input: String,
    },
    /// Run the reduction machine on an input.
    Run {
        #[arg(long)]
        input: String,
        /// Also write the crossing-sequence trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Record a (possibly partial) trace.
    Trace {
        #[arg(long)]
        input: String,
        /// Stop after this many steps.
        #[arg(long)]
        stop: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full and local verification of a trace file.
    Verify {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Cut the squares between two equal crossing sequences.
    Pump {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replace v in one split by v′ of another with the same residue.
    Splice(SpliceArgs),
    /// Depletion constants for a level alpha.
    Constants {
        #[arg(long)]
        alpha: String,
    },
    /// Prefix-free code of a natural number.
    EncodeNum { r: u64 },
    /// Decode a prefix-free code.
    DecodeNum { bits: String },
    /// Generate the MIDBIT system.
    GenMidbit {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        counts: bool,
    },
    /// Depletion and record experiment on palpower or fourthpower inputs.
    Experiment(ExperimentArgs),
    /// Print the redex automaton as tab-separated text.
    DumpDfa,
}

#[derive(Args)]
struct SpliceArgs {
    #[arg(long)]
    input: String,
    #[arg(long)]
    u: usize,
    #[arg(long)]
    v: usize,
    #[arg(long)]
    time: u64,
    /// Donor input; defaults to the first.
    #[arg(long)]
    with_input: Option<String>,
    #[arg(long)]
    with_u: usize,
    #[arg(long)]
    with_v: usize,
    #[arg(long)]
    with_time: u64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    w: String,
    #[arg(long)]
    i: usize,
    #[arg(long, default_value = "1/7")]
    alpha: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_system(cli: &Cli) -> Result<ThueSystem> {
    let source = cli
        .system
        .as_deref()
        .ok_or_else(|| anyhow!("--system is required"))?;
    let path = Path::new(source);
    if path.exists() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {source}"))?;
        return parse_system(&text).with_context(|| format!("parsing {source}"));
    }
    builtin_system(source).ok_or_else(|| anyhow!("no such file or built-in system: {source}"))
}

fn parse_input(sys: &ThueSystem, text: &str) -> Result<Word> {
    sys.alphabet().parse_word(text).context("parsing --input")
}

fn parse_alpha(text: &str) -> Result<Rational64> {
    let (p, q) = text.split_once('/').unwrap_or((text, "1"));
    let p: i64 = p.trim().parse().context("alpha numerator")?;
    let q: i64 = q.trim().parse().context("alpha denominator")?;
    if q == 0 {
        bail!("alpha denominator is zero");
    }
    Ok(Rational64::new(p, q))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_trace(prog: &MachineProgram, path: &Path) -> Result<thuetape::crossing::TraceData> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(trace_from_json(prog, &text)?)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Check => {
            let sys = load_system(cli)?;
            let verdict = sys.is_church_rosser();
            if cli.json {
                let mut out =
                    json!({ "church_rosser": verdict.is_yes(), "rules": sys.rules().len() });
                if let ChurchRosser::No { witness, .. } = &verdict {
                    let a = sys.alphabet();
                    out["witness"] = json!({
                        "peak": a.render(&witness.peak),
                        "left": a.render(&witness.left),
                        "right": a.render(&witness.right),
                        "kind": witness.kind.to_string(),
                    });
                }
                println!("{out}");
            } else if let ChurchRosser::No { witness, .. } = &verdict {
                let a = sys.alphabet();
                println!("church-rosser: no");
                println!(
                    "witness: {} => {} | {} ({})",
                    a.render(&witness.peak),
                    a.render(&witness.left),
                    a.render(&witness.right),
                    witness.kind
                );
            } else {
                println!("church-rosser: yes");
            }
            Ok(verdict.is_yes())
        }
        Command::Reduce { input } => {
            let sys = load_system(cli)?;
            let x = parse_input(&sys, input)?;
            let nf = sys.normal_form_leftmost(&sys.wrap(&x));
            let accepted = nf == sys.t3();
            let rendered = sys.alphabet().render(&nf);
            if cli.json {
                println!(
                    "{}",
                    json!({ "normal_form": rendered, "accepted": accepted })
                );
            } else {
                println!("{rendered}");
            }
            Ok(accepted)
        }
        Command::Run { input, trace } => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let x = parse_input(&sys, input)?;
            let opts = RunOptions {
                fuel: None,
                audit: cli.audit,
            };
            let result = prog.run(&x, opts)?;
            if let Some(path) = trace {
                let t = record_trace(&prog, &x, None)?;
                fs::write(path, trace_to_json(&prog, &t))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let nf = sys.alphabet().render(&result.h_image);
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "accepted": result.accepted,
                        "normal_form": nf,
                        "steps": result.steps,
                        "reductions": result.reduce_count,
                    })
                );
            } else {
                println!("{nf}");
                println!(
                    "{}",
                    if result.accepted {
                        "accepted"
                    } else {
                        "rejected"
                    }
                );
            }
            Ok(result.accepted)
        }
        Command::Trace { input, stop, out } => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let x = parse_input(&sys, input)?;
            let t = record_trace(&prog, &x, *stop)?;
            write_or_print(out.as_deref(), &trace_to_json(&prog, &t))?;
            Ok(true)
        }
        Command::Verify { trace } => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let t = read_trace(&prog, trace)?;
            let full = full_verification(&prog, &t);
            let local = local_summary(&prog, &t);
            let agree = full.consistent == local.compatible;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "full": full.consistent,
                        "local": local.compatible,
                        "end_square": full.end_square,
                        "end_squares_local": local.end_squares,
                        "reason": full.reason,
                    })
                );
            } else {
                println!(
                    "full: {}",
                    if full.consistent {
                        "consistent"
                    } else {
                        "inconsistent"
                    }
                );
                println!(
                    "local: {}",
                    if local.compatible {
                        "compatible"
                    } else {
                        "incompatible"
                    }
                );
                if let Some(k) = full.end_square {
                    println!("end square: {k}");
                }
                if let Some(r) = &full.reason {
                    println!("reason: {r}");
                }
            }
            if !agree {
                bail!("full and local verification disagree");
            }
            Ok(full.consistent)
        }
        Command::Pump { trace, i, j, out } => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let t = read_trace(&prog, trace)?;
            let cut = pump_cut(&prog, &t, *i, *j)?;
            write_or_print(out.as_deref(), &trace_to_json(&prog, &cut))?;
            Ok(true)
        }
        Command::Splice(args) => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let first = Split {
                input: parse_input(&sys, &args.input)?,
                u_len: args.u,
                v_len: args.v,
                time: args.time,
            };
            let donor = args.with_input.as_deref().unwrap_or(&args.input);
            let second = Split {
                input: parse_input(&sys, donor)?,
                u_len: args.with_u,
                v_len: args.with_v,
                time: args.with_time,
            };
            let outcome = splice(&prog, &first, &second)?;
            let a = sys.alphabet();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "spliced_input": a.render(&outcome.input),
                        "original_normal_form": a.render(&outcome.original_normal_form),
                        "spliced_normal_form": a.render(&outcome.spliced_normal_form),
                        "same_reduct": outcome.same_reduct(),
                    })
                );
            } else {
                println!("spliced input: {}", a.render(&outcome.input));
                println!("original: {}", a.render(&outcome.original_normal_form));
                println!("spliced: {}", a.render(&outcome.spliced_normal_form));
            }
            Ok(outcome.same_reduct())
        }
        Command::Constants { alpha } => {
            let sys = load_system(cli)?;
            let alpha = parse_alpha(alpha)?;
            let p = compute_constants(alpha, sys.alphabet().len(), sys.max_redex_len())?;
            let prog = MachineProgram::from_system(&sys);
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "A": p.a, "beta": p.beta.to_string(), "L": p.l,
                        "H": p.h, "K": p.k, "d": p.d, "Q": prog.state_bits(),
                    })
                );
            } else {
                println!(
                    "A={} beta={} L={} H={} K={} d={} Q={}",
                    p.a,
                    p.beta,
                    p.l,
                    p.h,
                    p.k,
                    p.d,
                    prog.state_bits()
                );
            }
            Ok(true)
        }
        Command::EncodeNum { r } => {
            println!("{}", encode_number(*r));
            Ok(true)
        }
        Command::DecodeNum { bits } => {
            let bits: BitString = bits.parse()?;
            let (r, rest) = decode_number(&bits)?;
            if !rest.is_empty() {
                bail!("{} trailing bits after the code", rest.len());
            }
            println!("{r}");
            Ok(true)
        }
        Command::GenMidbit { out, counts } => {
            let generated = generate_midbit_system();
            if let Some(path) = out {
                fs::write(path, generated.system.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if *counts {
                let g = &generated.groups;
                if cli.json {
                    let groups: serde_json::Map<String, serde_json::Value> = g
                        .groups
                        .iter()
                        .map(|(n, c)| (n.to_string(), json!(c)))
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "groups": groups,
                            "bitstring_rules": g.bitstring_rules(),
                            "total": g.total(),
                            "published_total": PUBLISHED_MIDBIT_TOTAL,
                            "delta": g.delta_from_published(),
                        })
                    );
                } else {
                    for (name, count) in &g.groups {
                        println!("{name}\t{count}");
                    }
                    println!("bitstring rules\t{}", g.bitstring_rules());
                    println!("total\t{}", g.total());
                    if g.delta_from_published() != 0 {
                        println!(
                            "note: total differs from the published {} by {:+}",
                            PUBLISHED_MIDBIT_TOTAL,
                            g.delta_from_published()
                        );
                    }
                }
            }
            if out.is_none() && !*counts {
                print!("{}", generated.system.to_text());
            }
            Ok(true)
        }
        Command::Experiment(args) => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            let w =
                parse_bits(&args.w).ok_or_else(|| anyhow!("--w must be a nonempty bitstring"))?;
            let alpha = parse_alpha(&args.alpha)?;
            let report = run_experiment(&prog, args.family, &w, args.i, alpha)?;
            let text = serde_json::to_string_pretty(&report)?;
            write_or_print(args.report.as_deref(), &text)?;
            Ok(true)
        }
        Command::DumpDfa => {
            let sys = load_system(cli)?;
            let prog = MachineProgram::from_system(&sys);
            print!("{}", prog.dfa().dump(&sys));
            Ok(true)
        }
    }
}
