//! Command-line surface for the exact IET toolkit: IET algebra, relation
//! certificates, q-rational approximation, the Arnoux-Yoccoz sweep, and
//! AIET ping-pong checks.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails, 2 on
//! malformed input.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use ietkit::aiet::{pingpong_check, standard_pingpong_pair, Aiet};
use ietkit::iet::Iet;
use ietkit::neighborhoods::{alpha_q, x_q, y_q, z_q, IntervalSet};
use ietkit::rational::{ay_sweep, nearest_q_rational, order, SweepRow};
use ietkit::relation::{all_pass, certify_relation, verify_certificate, Certificate};
use ietkit::scalar::Scalar;
use ietkit::word::{Letter, Word};

#[derive(Parser)]
#[command(name = "ietkit", version, about = "Exact interval exchange toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// IET algebra on JSON files
    Iet {
        #[command(subcommand)]
        command: IetCommand,
    },
    /// Certify and verify nontrivial relations
    Relation {
        #[command(subcommand)]
        command: RelationCommand,
    },
    /// q-rational approximation and orders
    Rational {
        #[command(subcommand)]
        command: RationalCommand,
    },
    /// Arnoux-Yoccoz computations
    Ay {
        #[command(subcommand)]
        command: AyCommand,
    },
    /// Affine IET ping-pong checks
    Aiet {
        #[command(subcommand)]
        command: AietCommand,
    },
}

#[derive(Subcommand)]
enum IetCommand {
    /// Print the structure maps: lengths, permutation, breakpoints,
    /// translations, discontinuities, support
    Info {
        file: PathBuf,
        /// Also print decimal approximations
        #[arg(long)]
        decimal: bool,
    },
    /// Evaluate the map at a point (rational like "3/10")
    Eval { file: PathBuf, x: String },
    /// Compose two maps: a.json applied after b.json
    Compose { a: PathBuf, b: PathBuf },
    /// Raise a map to an integer power
    Power { file: PathBuf, m: i64 },
    /// Print X_q, Y_q, Z_q and alpha_q
    Xq {
        file: PathBuf,
        q: u64,
        #[arg(long)]
        decimal: bool,
    },
}

#[derive(Subcommand)]
enum RelationCommand {
    /// Build a relation certificate for (S, T0, q)
    Certify {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t0: PathBuf,
        #[arg(long)]
        q: u64,
        /// Output file for the certificate (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run every exact check of a stored certificate
    Verify { cert: PathBuf },
}

#[derive(Subcommand)]
enum RationalCommand {
    /// Closest q-rational IET with the same permutation
    Nearest {
        #[arg(long)]
        iet: PathBuf,
        #[arg(long)]
        q: u64,
    },
    /// Order of a q-rational IET (lcm of its grid cycles)
    Order {
        #[arg(long)]
        iet: PathBuf,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand)]
enum AyCommand {
    /// Sweep q over a range against the Arnoux-Yoccoz map
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    qmin: u64,
    #[arg(long)]
    qmax: u64,
    /// CSV output path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the three scatter plots (q vs delta, order, bound)
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AietCommand {
    /// Ping-pong freeness check
    Pingpong {
        /// Verify the built-in instance
        #[arg(long, conflicts_with = "check")]
        standard: bool,
        /// Verify an instance from a JSON file {f, g, v, w, x, y}
        #[arg(long)]
        check: Option<PathBuf>,
        /// Additionally evaluate this many random reduced words
        #[arg(long, default_value_t = 0)]
        words: u64,
        /// Seed for the random word sample
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Input errors exit with 2, failed mathematical checks with 1.
enum CliError {
    BadInput(String),
    Failed(String),
}

impl CliError {
    fn bad(e: impl std::fmt::Display) -> Self {
        CliError::BadInput(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

fn write_output(path: &Option<PathBuf>, content: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, content).map_err(CliError::bad),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn scalar_list(points: &[Scalar], decimal: bool) -> String {
    points
        .iter()
        .map(|p| {
            if decimal {
                format!("{p} ({})", p.decimal_string(12))
            } else {
                p.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_point(x: &str) -> Result<Scalar, CliError> {
    if x.trim_start().starts_with('{') {
        serde_json::from_str(x).map_err(CliError::bad)
    } else {
        x.parse().map_err(CliError::bad)
    }
}

fn cmd_iet(cmd: IetCommand) -> CliResult {
    match cmd {
        IetCommand::Info { file, decimal } => {
            let t: Iet = read_json(&file)?;
            println!("intervals: {}", t.n());
            println!("lengths:   {}", scalar_list(t.lengths(), decimal));
            println!(
                "perm:      {:?}",
                t.permutation().one_based()
            );
            println!("beta:      {}", scalar_list(t.breakpoints(), decimal));
            println!("omega:     {}", scalar_list(t.translations(), decimal));
            println!(
                "delta:     {}",
                scalar_list(t.discontinuities().points(), decimal)
            );
            let support = t.support();
            let parts: Vec<String> = support
                .intervals()
                .iter()
                .map(|(lo, hi)| format!("[{lo}, {hi})"))
                .collect();
            println!("support:   {}", if parts.is_empty() { "empty".into() } else { parts.join(" u ") });
            Ok(())
        }
        IetCommand::Eval { file, x } => {
            let t: Iet = read_json(&file)?;
            let x = parse_point(&x)?;
            let y = t.evaluate(&x).map_err(CliError::bad)?;
            println!("{}", serde_json::to_string(&y).map_err(CliError::bad)?);
            Ok(())
        }
        IetCommand::Compose { a, b } => {
            let s: Iet = read_json(&a)?;
            let t: Iet = read_json(&b)?;
            let c = s.compose(&t);
            println!("{}", serde_json::to_string(&c).map_err(CliError::bad)?);
            Ok(())
        }
        IetCommand::Power { file, m } => {
            let t: Iet = read_json(&file)?;
            let p = t.power(m);
            println!("{}", serde_json::to_string(&p).map_err(CliError::bad)?);
            Ok(())
        }
        IetCommand::Xq { file, q, decimal } => {
            let t: Iet = read_json(&file)?;
            if q == 0 {
                return Err(CliError::BadInput("q must be positive".into()));
            }
            println!("X_q: {}", scalar_list(x_q(&t, q).points(), decimal));
            println!("Y_q: {}", scalar_list(y_q(&t, q).points(), decimal));
            println!("Z_q: {}", scalar_list(z_q(&t, q).points(), decimal));
            let alpha = alpha_q(&t, q);
            if decimal {
                println!("alpha_q: {alpha} ({})", alpha.decimal_string(12));
            } else {
                println!("alpha_q: {alpha}");
            }
            Ok(())
        }
    }
}

fn print_checks(cert_checks: &[ietkit::relation::Check]) {
    for c in cert_checks {
        println!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
    }
}

fn cmd_relation(cmd: RelationCommand) -> CliResult {
    match cmd {
        RelationCommand::Certify { s, t0, q, out } => {
            let s: Iet = read_json(&s)?;
            let t0: Iet = read_json(&t0)?;
            let cert = certify_relation(&s, &t0, q)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            print_checks(&cert.checks);
            println!("word: {}", cert.word);
            let json = serde_json::to_string_pretty(&cert).map_err(CliError::bad)?;
            match out {
                Some(p) => {
                    fs::write(&p, json).map_err(CliError::bad)?;
                    println!("certificate written to {}", p.display());
                }
                None => println!("{json}"),
            }
            Ok(())
        }
        RelationCommand::Verify { cert } => {
            let cert: Certificate = read_json(&cert)?;
            let checks = verify_certificate(&cert);
            print_checks(&checks);
            if all_pass(&checks) {
                println!("certificate valid");
                Ok(())
            } else {
                Err(CliError::Failed("certificate verification failed".into()))
            }
        }
    }
}

fn cmd_rational(cmd: RationalCommand) -> CliResult {
    match cmd {
        RationalCommand::Nearest { iet, q } => {
            let s: Iet = read_json(&iet)?;
            let (t0, delta) = nearest_q_rational(&s, q).map_err(CliError::bad)?;
            #[derive(Serialize)]
            struct Out {
                t0: Iet,
                delta: Scalar,
                delta_decimal: String,
            }
            let out = Out {
                delta_decimal: delta.decimal_string(30),
                t0,
                delta,
            };
            println!("{}", serde_json::to_string_pretty(&out).map_err(CliError::bad)?);
            Ok(())
        }
        RationalCommand::Order { iet, q } => {
            let t: Iet = read_json(&iet)?;
            let o = order(&t, q).map_err(|e| CliError::Failed(e.to_string()))?;
            println!("{o}");
            Ok(())
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let rows = ay_sweep(args.qmin, args.qmax).map_err(CliError::bad)?;
    let mut csv = String::from(SweepRow::csv_header());
    csv.push('\n');
    for row in &rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    write_output(&args.out, &csv)?;
    if let Some(dir) = &args.svg {
        fs::create_dir_all(dir).map_err(CliError::bad)?;
        let q: Vec<f64> = rows.iter().map(|r| r.q as f64).collect();
        let charts: [(&str, &str, Vec<f64>); 3] = [
            ("delta", "distance to the closest q-rational IET",
             rows.iter().map(|r| r.delta.to_f64()).collect()),
            ("order", "order of the closest q-rational IET",
             rows.iter().map(|r| r.order.to_string().parse().unwrap_or(f64::NAN)).collect()),
            ("bound", "bound 40q(o+2)delta",
             rows.iter().map(|r| r.bound.to_f64()).collect()),
        ];
        for (name, title, ys) in charts {
            let pts: Vec<(f64, f64)> = q.iter().copied().zip(ys).collect();
            let doc = svg::scatter(&pts, title, "q", name);
            fs::write(dir.join(format!("{name}.svg")), doc).map_err(CliError::bad)?;
        }
        println!("plots written to {}", dir.display());
    }
    Ok(())
}

/// File format for `aiet pingpong --check`: the two maps and the four
/// trapping sets, with interval endpoints as rational strings.
#[derive(Deserialize)]
struct PingpongFile {
    f: Aiet,
    g: Aiet,
    v: Vec<[String; 2]>,
    w: Vec<[String; 2]>,
    x: Vec<[String; 2]>,
    y: Vec<[String; 2]>,
}

fn parse_set(raw: &[[String; 2]]) -> Result<IntervalSet, CliError> {
    let mut intervals = Vec::with_capacity(raw.len());
    for [lo, hi] in raw {
        intervals.push((
            lo.parse::<Scalar>().map_err(CliError::bad)?,
            hi.parse::<Scalar>().map_err(CliError::bad)?,
        ));
    }
    Ok(IntervalSet::from_intervals(intervals))
}

fn random_reduced_word(rng: &mut ChaCha8Rng, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let mut blocks: Vec<(Letter, i64)> = Vec::with_capacity(len);
    let mut last: Option<(Letter, i64)> = None;
    for _ in 0..len {
        loop {
            let letter = if rng.gen_bool(0.5) { Letter::R } else { Letter::T };
            let exp: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            // avoid immediate cancellation so the word stays reduced at
            // exactly the sampled length
            if last != Some((letter, -exp)) {
                blocks.push((letter, exp));
                last = Some((letter, exp));
                break;
            }
        }
    }
    Word::from_blocks(blocks)
}

fn evaluate_aiet_word(word: &Word, f: &Aiet, g: &Aiet) -> Aiet {
    let mut acc = Aiet::identity();
    for &(letter, exp) in word.blocks() {
        let base = match letter {
            Letter::R => f,
            Letter::T => g,
        };
        acc = acc.compose(&base.power(exp));
    }
    acc
}

fn cmd_aiet(cmd: AietCommand) -> CliResult {
    let AietCommand::Pingpong {
        standard,
        check,
        words,
        seed,
    } = cmd;
    let (f, g, v, w, x, y) = if standard {
        standard_pingpong_pair()
    } else if let Some(path) = check {
        let file: PingpongFile = read_json(&path)?;
        (
            file.f,
            file.g,
            parse_set(&file.v)?,
            parse_set(&file.w)?,
            parse_set(&file.x)?,
            parse_set(&file.y)?,
        )
    } else {
        return Err(CliError::BadInput(
            "need --standard or --check FILE".into(),
        ));
    };
    if !pingpong_check(&f, &g, &v, &w, &x, &y) {
        return Err(CliError::Failed("ping-pong conditions do not hold".into()));
    }
    println!("ping-pong conditions hold: <f, g> is free of rank 2");
    if words > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..words {
            let word = random_reduced_word(&mut rng, 8);
            let evaluated = evaluate_aiet_word(&word, &f, &g);
            if evaluated.is_identity() {
                return Err(CliError::Failed(format!(
                    "nonempty reduced word {word} evaluated to the identity"
                )));
            }
            println!("nonidentity: {word}");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Iet { command } => cmd_iet(command),
        Command::Relation { command } => cmd_relation(command),
        Command::Rational { command } => cmd_rational(command),
        Command::Ay { command } => match command {
            AyCommand::Sweep(args) => cmd_sweep(args),
        },
        Command::Aiet { command } => cmd_aiet(command),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
