use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use projrot::harness::{
    geometric_ladder, run_bench, run_convergence, run_integrate, write_convergence, BenchOptions,
    ConvergenceOptions, HarnessError, IntegrateOptions, RateProfile,
};
use projrot::{Scheme, StepperConfig, UnitQuaternion};

const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "projrot", version, about = "Attitude propagation in affine patches of RP³")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one rate profile and write a per-step CSV report.
    Integrate(IntegrateArgs),
    /// Fit error-vs-dt slopes over a geometric step-size ladder.
    Convergence(ConvergenceArgs),
    /// Time the patch and quaternion right-hand sides.
    Bench(BenchArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// constant:X,Y,Z | sinusoid:AX,AY,AZ:FREQ:PHASE | tumble:SEED:BW:RMS | csv:PATH
    #[arg(long, default_value = "constant:0.3,-0.2,0.5")]
    profile: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    t1: f64,
    #[arg(long, default_value_t = 2.0)]
    switch_threshold: f64,
    /// Quaternion schemes renormalize every N steps; 0 never renormalizes.
    #[arg(long, default_value_t = 1)]
    renormalize_every: u32,
    /// Initial attitude as a scalar-first quaternion S,X,Y,Z.
    #[arg(long, default_value = "1,0,0,0", allow_negative_numbers = true)]
    q0: String,
    /// Seed for tumble profiles written without one (tumble:BW:RMS).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IntegrateArgs {
    #[arg(long, default_value = "patch-euler")]
    scheme: Scheme,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Schemes to study, comma-separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "patch-euler,patch-rk4,quat-euler,quat-rk4"
    )]
    scheme: Vec<Scheme>,
    /// Largest step size of the ladder.
    #[arg(long, default_value_t = 1e-2)]
    dt: f64,
    #[arg(long, default_value_t = 3)]
    rungs: usize,
    /// Ratio between consecutive rungs.
    #[arg(long, default_value_t = 0.5)]
    ratio: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 10_000_000)]
    calls: u64,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("write failed: {e}"))
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::Usage(format!("--out {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn parse_q0(s: &str) -> Result<UnitQuaternion, Failure> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts.as_deref() {
        Ok([a, b, c, d]) => UnitQuaternion::new([*a, *b, *c, *d])
            .map_err(|e| Failure::Usage(format!("--q0: {e}"))),
        _ => Err(Failure::Usage(format!("--q0: expected S,X,Y,Z, got `{s}`"))),
    }
}

fn parse_profile(common: &CommonArgs) -> Result<RateProfile, Failure> {
    RateProfile::parse(&common.profile, common.seed)
        .map_err(|e| Failure::Usage(format!("--profile: {e}")))
}

fn integrate(args: IntegrateArgs) -> Result<(), Failure> {
    let c = &args.common;
    let config = StepperConfig::new(args.scheme, args.dt)
        .with_switch_threshold(c.switch_threshold)
        .with_renormalize_every(c.renormalize_every);
    config
        .validate()
        .map_err(|e| Failure::Usage(format!("--dt/--switch-threshold: {e}")))?;
    if !(c.t1 >= c.t0) {
        return Err(Failure::Usage(format!("--t1 ({}) is before --t0 ({})", c.t1, c.t0)));
    }
    let opts = IntegrateOptions {
        profile: parse_profile(c)?,
        config,
        t0: c.t0,
        t1: c.t1,
        q0: parse_q0(&c.q0)?,
    };
    let report = run_integrate(&opts)?;
    let mut out = output(&c.out)?;
    report.write_csv(&mut out)?;
    out.flush()?;
    let s = &report.summary;
    eprintln!(
        "scheme={} steps={} switches={} final_geo_err={:.6e} ns_per_rhs={:.3}",
        s.scheme,
        s.steps,
        s.total_switches,
        s.final_geo_err,
        s.seconds_per_rhs() * 1e9
    );
    Ok(())
}

fn convergence(args: ConvergenceArgs) -> Result<(), Failure> {
    let c = &args.common;
    if args.rungs < 3 {
        return Err(Failure::Usage(format!("--rungs must be at least 3, got {}", args.rungs)));
    }
    if !(args.ratio > 0.0 && args.ratio < 1.0) {
        return Err(Failure::Usage(format!("--ratio must lie in (0, 1), got {}", args.ratio)));
    }
    if !(args.dt > 0.0) {
        return Err(Failure::Usage(format!("--dt must be positive, got {}", args.dt)));
    }
    let opts = ConvergenceOptions {
        schemes: args.scheme,
        profile: parse_profile(c)?,
        t0: c.t0,
        t1: c.t1,
        dts: geometric_ladder(args.dt, args.ratio, args.rungs),
        q0: parse_q0(&c.q0)?,
        switch_threshold: c.switch_threshold,
        renormalize_every: c.renormalize_every,
    };
    let series = run_convergence(&opts)?;
    let mut out = output(&c.out)?;
    write_convergence(&series, &mut out)?;
    out.flush()?;
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let report = run_bench(&BenchOptions {
        calls: args.calls,
        repeats: args.repeats,
        seed: args.seed,
    });
    let mut out = output(&args.out)?;
    report.write_table(&mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Integrate(a) => integrate(a),
        Command::Convergence(a) => convergence(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
