//! The `flipdist` command line.
//!
//! Machine-readable output (`key=value` lines, flip lines, CSV) goes to
//! stdout; diagnostics go to stderr. Exit status 0 means YES / success, 1
//! means NO / mismatch, 2 means a usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flipdag::{build_dag, FlipSequence};
use crate::instances::{
    format_flip_list, gen_convex, gen_random_points, initial_triangulation, parse_flip_list, random_walk_triangulation,
    Instance, InstanceError,
};
use crate::oracle::{bfs_distance, graph_stats};
use crate::solver::{solve_upto, SearchOptions, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Yes = 0,
    No = 1,
    Error = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser, Debug)]
#[command(name = "flipdist", version, about = "Flip distance between triangulations of a point set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance on stdout.
    Gen(GenArgs),
    /// Run the parameterized search on an instance.
    Solve(SolveArgs),
    /// Breadth-first ground truth, or flip-graph statistics.
    Oracle(OracleArgs),
    /// Cross-check solver against oracle, or replay a flip list.
    Verify(VerifyArgs),
    /// Time the search on random-walk instances; CSV on stdout.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PointMode {
    Convex,
    Random,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    mode: PointMode,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random flips applied to the start triangulation to obtain the end.
    #[arg(long, default_value_t = 0)]
    walk: usize,
    #[arg(long)]
    k: Option<usize>,
    /// Coordinate range for random points.
    #[arg(long, default_value_t = 1000)]
    bound: i64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 10)]
    max_k: usize,
    /// Decide whether the distance equals the instance's `k`.
    #[arg(long)]
    decide: bool,
    /// Print the per-iteration action trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Write the dependency DAG of the witness in Graphviz format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    cap: usize,
    /// Print flip-graph statistics as CSV.
    #[arg(long)]
    stats: bool,
    /// Convex polygon size for `--stats`.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum VerifyMode {
    Cross,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    mode: Option<VerifyMode>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    max_k: usize,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Flip list to replay against the instance's start triangulation.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

type CmdResult = Result<ExitStatus, String>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::Error.code() } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, &mut io),
        Command::Solve(a) => cmd_solve(&a, &mut io),
        Command::Oracle(a) => cmd_oracle(&a, &mut io),
        Command::Verify(a) => cmd_verify(&a, &mut io),
        Command::Bench(a) => cmd_bench(&a, &mut io),
    };
    match result {
        Ok(status) => status.code(),
        Err(msg) => {
            let _ = writeln!(io.err, "error: {msg}");
            ExitStatus::Error.code()
        }
    }
}

fn io_err(e: std::io::Error) -> String {
    e.to_string()
}

fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Instance::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn gen_points(mode: PointMode, n: usize, seed: u64, bound: i64) -> Result<crate::PointSet, InstanceError> {
    match mode {
        PointMode::Convex => gen_convex(n),
        PointMode::Random => gen_random_points(n, seed, bound),
    }
}

fn cmd_gen(a: &GenArgs, io: &mut Io) -> CmdResult {
    let points = Arc::new(gen_points(a.mode, a.n, a.seed, a.bound).map_err(|e| e.to_string())?);
    let start = initial_triangulation(points);
    let end = random_walk_triangulation(&start, a.walk, a.seed).map_err(|e| e.to_string())?;
    let inst = Instance::new(start, end, a.k).map_err(|e| e.to_string())?;
    io.out.write_all(inst.serialize().as_bytes()).map_err(io_err)?;
    Ok(ExitStatus::Yes)
}

fn write_witness(io: &mut Io, w: &Witness, trace: bool) -> Result<(), String> {
    if trace {
        for (i, it) in w.iterations.iter().enumerate() {
            writeln!(io.out, "iteration={} {}", i + 1, it).map_err(io_err)?;
        }
    }
    io.out.write_all(format_flip_list(&w.flips).as_bytes()).map_err(io_err)
}

fn cmd_solve(a: &SolveArgs, io: &mut Io) -> CmdResult {
    let inst = load_instance(&a.input)?;
    let opts = SearchOptions { workers: a.workers.max(1) };
    let max_k = if a.decide {
        inst.k.ok_or_else(|| format!("{}: --decide needs a `k` line in the instance", a.input.display()))?
    } else {
        a.max_k
    };
    let found = solve_upto(&inst.t_start, &inst.t_end, max_k, opts).map_err(|e| e.to_string())?;
    if let (Some(path), Some((_, w))) = (&a.dot, &found) {
        let dag = build_dag(&FlipSequence::new(inst.t_start.clone(), w.flips.clone())).map_err(|e| e.to_string())?;
        std::fs::write(path, dag.to_dot()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if a.decide {
        let yes = found.as_ref().is_some_and(|(d, _)| *d == max_k);
        writeln!(io.out, "decision={}", if yes { "YES" } else { "NO" }).map_err(io_err)?;
        if let Some((d, w)) = &found {
            if !yes {
                writeln!(io.err, "distance {d} is below k = {max_k}").map_err(io_err)?;
            } else {
                write_witness(io, w, a.trace)?;
            }
        }
        return Ok(if yes { ExitStatus::Yes } else { ExitStatus::No });
    }
    match found {
        Some((d, w)) => {
            writeln!(io.out, "distance={d}").map_err(io_err)?;
            write_witness(io, &w, a.trace)?;
            Ok(ExitStatus::Yes)
        }
        None => {
            writeln!(io.out, "distance=>{max_k}").map_err(io_err)?;
            Ok(ExitStatus::No)
        }
    }
}

fn cmd_oracle(a: &OracleArgs, io: &mut Io) -> CmdResult {
    if a.stats {
        let seed = match (&a.input, a.n) {
            (Some(path), None) => load_instance(path)?.t_start,
            (None, Some(n)) => initial_triangulation(Arc::new(gen_convex(n).map_err(|e| e.to_string())?)),
            _ => return Err("--stats needs exactly one of --n or --in".into()),
        };
        io.out.write_all(graph_stats(&seed).to_csv().as_bytes()).map_err(io_err)?;
        return Ok(ExitStatus::Yes);
    }
    let path = a.input.as_ref().ok_or("--in is required unless --stats is given")?;
    let inst = load_instance(path)?;
    match bfs_distance(&inst.t_start, &inst.t_end, a.cap).map_err(|e| e.to_string())? {
        Some(r) => {
            writeln!(io.out, "distance={}", r.distance).map_err(io_err)?;
            io.out.write_all(format_flip_list(&r.witness.flips).as_bytes()).map_err(io_err)?;
            Ok(ExitStatus::Yes)
        }
        None => {
            writeln!(io.out, "distance=>{}", a.cap).map_err(io_err)?;
            Ok(ExitStatus::No)
        }
    }
}

/// Random point set plus a random walk of random length up to `max_k`.
fn cross_instance(n: usize, max_k: usize, rng: &mut ChaCha8Rng) -> Result<Instance, String> {
    let point_seed: u64 = rng.gen();
    let steps = rng.gen_range(0..=max_k);
    let points = Arc::new(gen_random_points(n, point_seed, 1000).map_err(|e| e.to_string())?);
    let start = initial_triangulation(points);
    let end = match random_walk_triangulation(&start, steps, point_seed) {
        Ok(t) => t,
        Err(InstanceError::NoFlippableEdge) => start.clone(),
        Err(e) => return Err(e.to_string()),
    };
    Instance::new(start, end, None).map_err(|e| e.to_string())
}

fn cmd_verify(a: &VerifyArgs, io: &mut Io) -> CmdResult {
    match (a.mode, &a.input, &a.replay) {
        (Some(VerifyMode::Cross), None, None) => {
            let n = a.n.ok_or("--mode cross needs --n")?;
            if n < 3 {
                return Err(format!("n = {n} is out of range"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let (mut ok, mut fail) = (0usize, 0usize);
            for trial in 0..a.trials {
                let inst = cross_instance(n, a.max_k, &mut rng)?;
                let solver = solve_upto(&inst.t_start, &inst.t_end, a.max_k, SearchOptions::default()).map_err(|e| e.to_string())?;
                let oracle = bfs_distance(&inst.t_start, &inst.t_end, a.max_k).map_err(|e| e.to_string())?;
                let witness_ok = solver.as_ref().is_none_or(|(d, w)| {
                    let seq = FlipSequence::new(inst.t_start.clone(), w.flips.clone());
                    w.flips.len() == *d && seq.replay().is_ok_and(|t| t == inst.t_end)
                });
                let agree = solver.as_ref().map(|(d, _)| *d) == oracle.as_ref().map(|r| r.distance);
                if agree && witness_ok {
                    ok += 1;
                } else {
                    fail += 1;
                    writeln!(
                        io.err,
                        "mismatch in trial {trial}: solver={:?} oracle={:?} witness_ok={witness_ok}\n{}",
                        solver.map(|(d, _)| d),
                        oracle.map(|r| r.distance),
                        inst.serialize()
                    )
                    .map_err(io_err)?;
                }
            }
            writeln!(io.out, "ok={ok} fail={fail}").map_err(io_err)?;
            Ok(if fail == 0 { ExitStatus::Yes } else { ExitStatus::No })
        }
        (None, Some(input), Some(replay)) => {
            let inst = load_instance(input)?;
            let text = std::fs::read_to_string(replay).map_err(|e| format!("{}: {e}", replay.display()))?;
            let flips = match parse_flip_list(&text) {
                Ok(f) => f,
                Err(e) => {
                    writeln!(io.out, "replay=unreadable").map_err(io_err)?;
                    writeln!(io.err, "{}: {e}", replay.display()).map_err(io_err)?;
                    return Ok(ExitStatus::No);
                }
            };
            let count = flips.len();
            match FlipSequence::new(inst.t_start.clone(), flips).replay() {
                Err(crate::flipdag::FlipDagError::InvalidAt(i)) => {
                    writeln!(io.out, "replay=invalid at={i}").map_err(io_err)?;
                    Ok(ExitStatus::No)
                }
                Ok(t) => {
                    let matched = t == inst.t_end;
                    writeln!(io.out, "replay=ok flips={count} endpoint_match={matched}").map_err(io_err)?;
                    if !matched {
                        let missing = t.necessary_edges(&inst.t_end).map_err(|e| e.to_string())?;
                        let listed: Vec<String> = missing.iter().map(|e| e.to_string()).collect();
                        writeln!(io.err, "edges not in the end triangulation: {}", listed.join(" ")).map_err(io_err)?;
                    }
                    Ok(if matched { ExitStatus::Yes } else { ExitStatus::No })
                }
            }
        }
        _ => Err("use either `--mode cross --n N` or `--in FILE --replay SEQFILE`".into()),
    }
}

fn cmd_bench(a: &BenchArgs, io: &mut Io) -> CmdResult {
    if a.n < 4 || a.trials == 0 {
        return Err("bench needs --n >= 4 and --trials >= 1".into());
    }
    let opts = SearchOptions { workers: a.workers.max(1) };
    writeln!(io.out, "k,trials,median_ms,max_ms,solved").map_err(io_err)?;
    for k in 1..=a.kmax {
        let mut times = Vec::with_capacity(a.trials);
        let mut solved = 0;
        for trial in 0..a.trials {
            let seed = a.seed.wrapping_mul(1_000_003).wrapping_add((k * 10_007 + trial) as u64);
            let points = Arc::new(gen_random_points(a.n, seed, 1000).map_err(|e| e.to_string())?);
            let start = initial_triangulation(points);
            let end = random_walk_triangulation(&start, k, seed).map_err(|e| e.to_string())?;
            let t0 = Instant::now();
            let found = solve_upto(&start, &end, k, opts).map_err(|e| e.to_string())?;
            times.push(t0.elapsed().as_secs_f64() * 1e3);
            solved += usize::from(found.is_some());
        }
        times.sort_by(|x, y| x.total_cmp(y));
        let median = if times.len() % 2 == 1 {
            times[times.len() / 2]
        } else {
            (times[times.len() / 2 - 1] + times[times.len() / 2]) / 2.0
        };
        let max = times.last().copied().unwrap_or(0.0);
        writeln!(io.out, "{k},{},{median:.3},{max:.3},{solved}", a.trials).map_err(io_err)?;
    }
    Ok(ExitStatus::Yes)
}
