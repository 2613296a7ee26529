//! Command-line front end: argument parsing, subcommand routing and SVG
//! rendering of instances and witnesses.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use dispersal_core::generators::{
    gen_appending_frame, gen_colocated, gen_crosscompose, gen_gridtiling, gen_random, gridtiling_witness,
    parse_gridtiling,
};
use dispersal_core::geometry::{Disk, Point, Variant};
use dispersal_core::instance_io::{
    parse_appending, parse_instance, parse_witness, validate_witness, write_appending, write_instance,
    write_instance_with_comments, write_witness, Instance, Mode, Verdict, Witness,
};
use dispersal_core::kernel::{full_kernel, kernelize, KernelOutcome};
use dispersal_core::numerics::Rational;
use dispersal_core::solver::{oracle, solve, Answer, SolverConfig};
use dispersal_core::udg::{approx_vc, build_graph, VertexCover};

pub use render::{render_svg, Palette, RenderOptions};

/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 64;

/// Largest lattice block `kernelize` expands into explicit disks.
pub const EXPAND_CAP: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "dispersal", about = "Decide, kernelize, generate and draw disk dispersal instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance. Exit code 0 = yes, 1 = no, 2 = unknown.
    Solve(SolveArgs),
    /// Decide a small instance by exhaustive grid search.
    Oracle(OracleArgs),
    /// Reduce an instance to a kernel; the report is written as comment lines.
    Kernelize(KernelizeArgs),
    /// Check a witness. Exit code 0 = accept, 1 = reject, 2 = indeterminate or error.
    Validate(ValidateArgs),
    /// Build instances.
    #[command(subcommand)]
    Generate(Generate),
    /// Draw an instance, optionally with a witness, as SVG.
    Render(RenderArgs),
    /// Print the unit-disk intersection graph as an edge list.
    Graph(GraphArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Finest grid resolution for refutations.
    #[arg(long, default_value = "1/16")]
    delta: Rational,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    time_budget: f64,
    /// Write the witness of a yes answer here.
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Run the grid oracle instead of the solver.
    #[arg(long)]
    oracle: bool,
    /// Largest moved-set to try.
    #[arg(long)]
    max_set_size: Option<u64>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, default_value = "1/16")]
    delta: Rational,
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelizeArgs {
    instance: PathBuf,
    /// Also shrink coordinates (full kernel).
    #[arg(long)]
    shrink: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    instance: PathBuf,
    witness: PathBuf,
    /// Relax every comparison by this epsilon instead of deciding exactly.
    #[arg(long)]
    tolerant: Option<Rational>,
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Disks on the quarter grid of a square, seeded.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        side: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value = "1")]
        d2: Rational,
        #[arg(long, default_value = "euclidean")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// `m` disks stacked at the origin.
    Colocated {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        d2: Rational,
        #[arg(long, default_value = "euclidean")]
        variant: Variant,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Disk Appending frame of side `a`.
    Appending {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        kappa: u64,
        /// Interior disk centre `x,y`; repeatable.
        #[arg(long = "interior", value_name = "X,Y")]
        interior: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// OR-composition of Disk Appending instances.
    Crosscompose {
        #[arg(required = true)]
        parts: Vec<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduction instance for a grid tiling file.
    Gridtiling {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Canonical witness for a grid tiling solution.
    GridtilingWitness {
        input: PathBuf,
        /// Row choices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        rows: Vec<usize>,
        /// Column choices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        cols: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RenderArgs {
    instance: PathBuf,
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Pixels per unit.
    #[arg(long, default_value = "20")]
    scale: Rational,
    /// Draw moved disks at their targets only.
    #[arg(long)]
    hide_moves: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    instance: PathBuf,
    /// Append a 2-approximate vertex cover as a comment line.
    #[arg(long)]
    cover: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses `argv` (program name first), runs the subcommand and returns its exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn run(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Solve(a) => run_solve(a),
        Command::Oracle(a) => {
            let inst = read_instance(&a.instance)?;
            let ans = oracle(&inst, &a.delta).map_err(|e| e.to_string())?;
            report_answer(&ans, a.witness.as_deref())
        }
        Command::Kernelize(a) => run_kernelize(a),
        Command::Validate(a) => run_validate(a),
        Command::Generate(g) => run_generate(g),
        Command::Render(a) => {
            let inst = read_instance(&a.instance)?;
            let w = a.witness.as_deref().map(read_witness).transpose()?;
            if !a.scale.is_positive() {
                return Err("scale must be positive".into());
            }
            let opts = RenderOptions { scale: a.scale, show_moves: !a.hide_moves, ..RenderOptions::default() };
            emit(a.output.as_deref(), &render_svg(&inst, w.as_ref(), &opts))?;
            Ok(0)
        }
        Command::Graph(a) => run_graph(a),
    }
}

fn run_solve(a: SolveArgs) -> Result<i32, String> {
    let inst = read_instance(&a.instance)?;
    let ans = if a.oracle {
        oracle(&inst, &a.delta).map_err(|e| e.to_string())?
    } else {
        if !(a.time_budget.is_finite() && a.time_budget >= 0.0) {
            return Err("time budget must be a non-negative number of seconds".into());
        }
        let cfg = SolverConfig {
            delta: a.delta,
            time_budget: Duration::from_secs_f64(a.time_budget),
            max_set_size: a.max_set_size,
            jobs: a.jobs.max(1),
            ..SolverConfig::default()
        };
        solve(&inst, &cfg)
    };
    report_answer(&ans, a.witness.as_deref())
}

fn report_answer(ans: &Answer, witness: Option<&Path>) -> Result<i32, String> {
    println!("{}", ans.label());
    match ans {
        Answer::Yes(w) => {
            if let Some(p) = witness {
                emit(Some(p), &write_witness(w))?;
            }
            Ok(0)
        }
        Answer::No(log) => {
            for line in log {
                println!("# {line}");
            }
            Ok(1)
        }
        Answer::Unknown(why) => {
            println!("# {why}");
            Ok(2)
        }
    }
}

fn run_kernelize(a: KernelizeArgs) -> Result<i32, String> {
    let inst = read_instance(&a.instance)?;
    let inst = if inst.blocks.is_empty() {
        inst
    } else {
        inst.expand_blocks(EXPAND_CAP)
            .ok_or_else(|| format!("lattice blocks exceed {EXPAND_CAP} disks; refusing to expand"))?
    };
    let text = if a.shrink {
        let fk = full_kernel(&inst).map_err(|e| e.to_string())?;
        let mut lines = fk.report.map(|r| r.comment_lines()).unwrap_or_else(|| vec!["trivially no".into()]);
        lines.push(format!("parts: {}", fk.parts.len()));
        lines.push(format!("m: {}", fk.m));
        write_instance_with_comments(&fk.instance, &lines)
    } else {
        match kernelize(&inst).map_err(|e| e.to_string())? {
            KernelOutcome::Reduced(k, r) => write_instance_with_comments(&k, &r.comment_lines()),
            KernelOutcome::TriviallyNo => {
                let no = dispersal_core::kernel::canonical_no_instance(&inst);
                write_instance_with_comments(&no, &["trivially no".into()])
            }
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(0)
}

fn run_validate(a: ValidateArgs) -> Result<i32, String> {
    let inst = read_instance(&a.instance)?;
    let w = read_witness(&a.witness)?;
    let mode = a.tolerant.map_or(Mode::Exact, Mode::Tolerant);
    match validate_witness(&inst, &w, &mode) {
        Ok(v) => {
            println!("{v}");
            Ok(if matches!(v, Verdict::Reject(_)) { 1 } else { 0 })
        }
        Err(e) => {
            println!("indeterminate: {e}");
            Ok(2)
        }
    }
}

fn run_generate(g: Generate) -> Result<i32, String> {
    let (text, output) = match g {
        Generate::Random { n, side, k, d2, variant, seed, output } => {
            (write_instance(&gen_random(n, side, k, d2, variant, seed)), output)
        }
        Generate::Colocated { m, k, d2, variant, output } => {
            (write_instance(&gen_colocated(m, k, d2, variant)), output)
        }
        Generate::Appending { a, kappa, interior, output } => {
            let disks = interior.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;
            let inst = gen_appending_frame(a, kappa, &disks).map_err(|e| e.to_string())?;
            (write_appending(&inst), output)
        }
        Generate::Crosscompose { parts, output } => {
            let parts = parts
                .iter()
                .map(|p| parse_appending(&read(p)?).map_err(|e| format!("{}: {e}", p.display())))
                .collect::<Result<Vec<_>, _>>()?;
            let comp = gen_crosscompose(&parts).map_err(|e| e.to_string())?;
            (write_instance_with_comments(&comp.instance, &comp.report.comment_lines()), output)
        }
        Generate::Gridtiling { input, output } => {
            let gt = parse_gridtiling(&read(&input)?).map_err(|e| e.to_string())?;
            (write_instance(&gen_gridtiling(&gt)), output)
        }
        Generate::GridtilingWitness { input, rows, cols, output } => {
            let gt = parse_gridtiling(&read(&input)?).map_err(|e| e.to_string())?;
            let inst = gen_gridtiling(&gt);
            let w = gridtiling_witness(&gt, &inst, &rows, &cols).map_err(|e| e.to_string())?;
            (write_witness(&w), output)
        }
    };
    emit(output.as_deref(), &text)?;
    Ok(0)
}

fn run_graph(a: GraphArgs) -> Result<i32, String> {
    let inst = read_instance(&a.instance)?;
    let g =
        build_graph(&inst.disks).map_err(|e| format!("cannot decide whether disks {} and {} intersect", e.0, e.1))?;
    let mut out = format!("# vertices: {}\n# edges: {}\n", g.vertex_count(), g.edges().len());
    if a.cover {
        if let VertexCover::Cover(cover) = approx_vc(&g, u64::MAX) {
            let list: Vec<String> = cover.iter().map(|i| i.to_string()).collect();
            let within = cover.len() as u64 <= 2 * inst.k;
            out.push_str(&format!("# cover: {}\n# within 2k: {within}\n", list.join(" ")));
        }
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    emit(a.output.as_deref(), &out)?;
    Ok(0)
}

fn parse_pair(s: &str) -> Result<Disk, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let x: Rational = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: Rational = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Disk::new(Point::rational(x, y)))
}

fn read(p: &Path) -> Result<String, String> {
    fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn read_instance(p: &Path) -> Result<Instance, String> {
    parse_instance(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

fn read_witness(p: &Path) -> Result<Witness, String> {
    parse_witness(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
