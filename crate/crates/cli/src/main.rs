use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use ecgray::bitcore::{BitString, RandomSource};
use ecgray::codes::{Codec, SharedCodec};
use ecgray::dphist::{Dataset, HistParams, PrivateHistogram};
use ecgray::eval::{
    exact_code_distance, exact_failure_prob, mc_failure_prob, tail_experiment, TailBoundParams,
    TailConfig, EXACT_MAX_BLOCK_LEN,
};
use ecgray::linear::{
    count_codewords, count_codewords_brute_force, expander_build, random_generator, ExpanderConfig,
    FlipSchedule, GeneratorMatrix,
};
use ecgray::registry::{CodecRegistry, Descriptor};
use ecgray::Error;

/// Error-correcting Gray codes: encode, decode, simulate noise, and build
/// private histogram sketches.
#[derive(Parser, Debug)]
#[command(name = "ecgray", version)]
struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, env = "ECGRAY_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the codeword of a value.
    Encode {
        /// Inline descriptor such as `gray:inner=pairtriple`, or `@file`.
        #[arg(long)]
        codec: String,
        #[arg(long)]
        value: u64,
    },
    /// Print the value decoded from a 0/1 word.
    Decode {
        #[arg(long)]
        codec: String,
        #[arg(long)]
        input: String,
    },
    /// Tail experiment over the binary symmetric channel.
    Simulate(SimulateArgs),
    /// Worst-case decoding failure probability.
    Failure {
        #[arg(long)]
        codec: String,
        #[arg(long)]
        p: f64,
        /// Sample this many channel uses per message instead of enumerating.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Block length, message count and distances of a code.
    Info {
        #[arg(long)]
        codec: String,
    },
    /// Total adjacent distance of a linear code up to message t.
    CountCodewords(CountArgs),
    /// Sample a regular parity-check code and export its matrices.
    Expander(ExpanderArgs),
    /// Private histogram sketches.
    #[command(subcommand)]
    Hist(HistCommand),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    codec: String,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    /// Channel uses per grid message; defaults to trials / 10.
    #[arg(long)]
    grid_trials: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
    t: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// Matrix file: `n d` on the first line, then n rows of 0/1.
    #[arg(long, conflicts_with = "rows")]
    matrix: Option<PathBuf>,
    /// Rows inline, separated by `/`.
    #[arg(long)]
    rows: Option<String>,
    #[arg(long, default_value_t = 0)]
    t: u64,
    /// Also print the brute-force sum.
    #[arg(long)]
    verify: bool,
    /// Cross-check this many random matrices (n <= 10, d <= 32) instead.
    #[arg(long, conflicts_with_all = ["matrix", "rows"])]
    random: Option<u32>,
}

#[derive(Args, Debug)]
struct ExpanderArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 7)]
    dv: usize,
    #[arg(long, default_value_t = 8)]
    dc: usize,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long)]
    greedy: bool,
    /// Parity checks, one row of 0/1 per check, `checks d` header.
    #[arg(long)]
    parity_out: Option<PathBuf>,
    #[arg(long)]
    generator_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum HistCommand {
    /// Build a sketch from `element,count` lines.
    Build {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        universe: u64,
        /// Dataset size bound; defaults to the input's size.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// No randomized response and injective hashing. Not private.
        #[arg(long)]
        debug_exact: bool,
    },
    /// Estimate counts of elements.
    Query {
        #[arg(long)]
        sketch: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        element: Vec<u64>,
    },
    /// Print a sketch as JSON.
    Dump {
        #[arg(long)]
        sketch: PathBuf,
    },
}

enum Failure {
    Domain(Error),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn codec(arg: &str) -> Result<SharedCodec, Error> {
    CodecRegistry::with_builtins().build_arg(arg)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// For Gray codes over a small inner code, the tail bound parameters with
/// the inner failure probability computed exactly.
fn gray_bound(arg: &str, p: f64) -> Result<Option<(TailBoundParams, u64)>, Error> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    let d = Descriptor::parse_file_text(&text)?;
    if d.kind != "gray" {
        return Ok(None);
    }
    let inner = CodecRegistry::with_builtins().build(d.require("inner")?)?;
    let ip = inner.params();
    if ip.block_len > EXACT_MAX_BLOCK_LEN {
        return Ok(None);
    }
    let failure = exact_failure_prob(inner.as_ref(), p)?;
    let step = 2 * (ip.block_len + ip.distance) as u64;
    Ok(Some((
        TailBoundParams::new(p, ip.block_len, ip.distance, failure)?,
        step,
    )))
}

fn simulate(a: &SimulateArgs, seed: u64) -> CmdResult {
    let code = codec(&a.codec)?;
    let mut cfg = TailConfig::new(a.p, a.trials, seed);
    cfg.t_values = a.t.clone();
    if let Some(g) = a.grid_trials {
        cfg.grid_trials = g;
    }
    let bound = gray_bound(&a.codec, a.p)?;
    cfg.grid_step = bound
        .map(|(_, g)| g)
        .unwrap_or(code.params().block_len as u64);
    let report = tail_experiment(code.as_ref(), &cfg, bound.map(|(b, _)| b))?;
    let text = match a.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    write_or_print(a.out.as_deref(), &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Acceptance(
            "empirical tail exceeds the bound".into(),
        ))
    }
}

fn count(a: &CountArgs, seed: u64) -> CmdResult {
    if let Some(n) = a.random {
        let root = RandomSource::new(seed);
        let mut agree = 0;
        for i in 0..n as u64 {
            let mut r = root.split_indexed("count-random", i);
            let k = r.random_range(1..=10usize);
            let d = r.random_range(k..=32usize);
            let t = r.random_range(0..1u64 << k);
            let g = random_generator(k, d, &mut r)?;
            if count_codewords(t, &g) == count_codewords_brute_force(t, &g)? {
                agree += 1;
            }
        }
        println!("{agree}/{n} agree");
        return if agree == n {
            Ok(())
        } else {
            Err(Failure::Acceptance(format!("{} disagreements", n - agree)))
        };
    }
    let g = match (&a.matrix, &a.rows) {
        (Some(path), _) => GeneratorMatrix::parse(&fs::read_to_string(path)?)?,
        (None, Some(rows)) => {
            GeneratorMatrix::from_rows_text(&rows.split('/').collect::<Vec<_>>())?
        }
        (None, None) => {
            return Err(Error::InvalidParameter("give --matrix, --rows or --random".into()).into())
        }
    };
    let fast = count_codewords(a.t, &g);
    println!("{fast}");
    if a.verify {
        let slow = count_codewords_brute_force(a.t, &g)?;
        println!("{slow}");
        if slow != fast {
            return Err(Failure::Acceptance(format!("brute force gives {slow}")));
        }
    }
    Ok(())
}

fn expander(a: &ExpanderArgs, seed: u64) -> CmdResult {
    let mut cfg = ExpanderConfig::new(a.d, a.dv, a.dc, a.alpha, seed);
    if a.greedy {
        cfg.schedule = FlipSchedule::GreatestGain;
    }
    let code = expander_build(&cfg)?;
    let g = code.codec().generator();
    println!(
        "d={} checks={} k={} attempts={} descriptor={}",
        a.d,
        code.parity().checks().len(),
        g.message_bits(),
        code.attempts(),
        code.codec().descriptor()
    );
    if let Some(path) = &a.parity_out {
        fs::write(path, code.parity().to_text())?;
    }
    if let Some(path) = &a.generator_out {
        fs::write(path, g.to_text())?;
    }
    Ok(())
}

fn hist(cmd: &HistCommand, seed: u64) -> CmdResult {
    match cmd {
        HistCommand::Build {
            eps,
            universe,
            n,
            input,
            out,
            debug_exact,
        } => {
            let data = Dataset::parse_csv(&fs::read_to_string(input)?)?;
            let n = n.unwrap_or(data.size()).max(1);
            let params = if *debug_exact {
                HistParams::debug_exact(*universe, n, *eps)?
            } else {
                HistParams::new(*universe, n, *eps)?
            };
            let h = PrivateHistogram::build(&data, &params, seed)?;
            fs::write(out, h.to_bytes())?;
            println!(
                "wrote {} ({} table bits, {} heavy entries)",
                out.display(),
                h.dprime() as u64 * params.s,
                h.heavy().len()
            );
            Ok(())
        }
        HistCommand::Query { sketch, element } => {
            let h = PrivateHistogram::from_bytes(&fs::read(sketch)?)?;
            for &e in element {
                println!("{e},{}", h.estimate(e)?);
            }
            Ok(())
        }
        HistCommand::Dump { sketch } => {
            let h = PrivateHistogram::from_bytes(&fs::read(sketch)?)?;
            print!("{}", h.to_debug_json());
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Encode { codec: c, value } => {
            println!("{}", codec(c)?.encode(*value)?);
        }
        Command::Decode { codec: c, input } => {
            let word: BitString = input.trim().parse()?;
            println!("{}", codec(c)?.decode(&word)?);
        }
        Command::Simulate(a) => simulate(a, cli.seed)?,
        Command::Failure {
            codec: c,
            p,
            trials,
        } => {
            let code = codec(c)?;
            match trials {
                None => println!("{}", exact_failure_prob(code.as_ref(), *p)?),
                Some(t) => {
                    let est = mc_failure_prob(code.as_ref(), *p, *t, &RandomSource::new(cli.seed))?;
                    println!(
                        "{},{},{}",
                        est.estimate.value, est.estimate.stderr, est.worst_message
                    );
                }
            }
        }
        Command::Info { codec: c } => {
            let code = codec(c)?;
            let p = code.params();
            println!("descriptor={}", code.descriptor());
            println!("messages={}", p.messages);
            println!("block_len={}", p.block_len);
            println!("declared_distance={}", p.distance);
            if let Ok(d) = exact_code_distance(code.as_ref()) {
                println!("exact_distance={d}");
            }
        }
        Command::CountCodewords(a) => count(a, cli.seed)?,
        Command::Expander(a) => expander(a, cli.seed)?,
        Command::Hist(h) => hist(h, cli.seed)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    eprintln!("# config: seed={} {:?}", cli.seed, cli.command);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
