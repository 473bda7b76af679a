use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cfl_core::harness::{
    aggregate, cdf_rows, cmd_adversary, cmd_gen, cmd_run, cmd_sweep, default_probe, parse_roster,
    read_records, write_aggregates, write_cdf, write_records, AlgorithmSpec, Cell, ExperimentRecord,
    SweepConfig,
};
use cfl_core::{CflError, Result};

/// Benchmark harness for online optimization with a long-term demand constraint.
#[derive(Parser)]
#[command(name = "cfl-bench", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CFL_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Master seed.
    #[arg(long, env = "CFL_SEED", default_value_t = 42)]
    seed: u64,

    /// Output directory.
    #[arg(long, env = "CFL_OUT", default_value = "results")]
    out: PathBuf,

    /// 100 instances per cell instead of 1000.
    #[arg(long, env = "CFL_QUICK")]
    quick: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instances of one cell as JSON files.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Cell as `d=5,ul=250,beta=50,sigma=50`.
        #[arg(long, env = "CFL_CELLS", default_value = "")]
        cells: String,
        /// Number of instances (default: 1000, or 100 with --quick).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run a roster over instance files and write records.csv.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "CFL_ALGS", default_value = "alg1")]
        algs: String,
        #[arg(long, env = "CFL_EPS", value_delimiter = ',', default_value = "2,5,10")]
        eps: Vec<f64>,
        #[arg(long, env = "CFL_XI", value_delimiter = ',')]
        xi: Vec<f64>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run a preset or explicit grid; writes records, aggregates and CDF points.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Preset name, or `;`-separated cells like `d=5,beta=10;d=7`.
        #[arg(long, env = "CFL_CELLS", default_value = "default")]
        cells: String,
        /// Overrides the preset roster.
        #[arg(long, env = "CFL_ALGS")]
        algs: Option<String>,
        #[arg(long, env = "CFL_EPS", value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        /// Overrides the preset advice levels.
        #[arg(long, env = "CFL_XI", value_delimiter = ',')]
        xi: Option<Vec<f64>>,
    },
    /// Probe one player against the adaptive adversary over a level grid.
    Adversary {
        #[command(flatten)]
        common: Common,
        #[arg(long, env = "CFL_ALGS", default_value = "alg1")]
        algs: String,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        w_steps: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 250.0)]
        upper: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Recompute aggregates and CDF points from a records CSV.
    Report {
        records: PathBuf,
        #[arg(long, env = "CFL_OUT", default_value = "results")]
        out: PathBuf,
    },
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn emit_tables(stdout: &mut dyn Write, out: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let agg = aggregate(records)?;
    write_aggregates(create(out, "aggregates.csv")?, &agg)?;
    write_cdf(create(out, "cdf.csv")?, &cdf_rows(records))?;
    for row in &agg {
        let eps = row.epsilon.map_or(String::new(), |e| format!(":eps={e}"));
        let xi = row.xi.map_or(String::new(), |x| format!(" xi={x}"));
        writeln!(
            stdout,
            "d={} U={} beta={} sigma={}{xi} {}{eps}: n={} mean={:.4} p95={:.4}",
            row.d, row.upper, row.beta_nominal, row.sigma, row.algorithm, row.count, row.mean_cr, row.p95_cr
        )?;
    }
    Ok(())
}

fn parse_cells(text: &str) -> Result<Vec<Cell>> {
    text.split(';').map(str::parse).collect()
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CflError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Gen { common, cells, count } => {
            let cell: Cell = cells.parse()?;
            let n = count.unwrap_or(if common.quick { 100 } else { 1000 });
            let files = cmd_gen(cell, common.seed, n, &common.out)?;
            writeln!(stdout, "wrote {} instances to {}", files.len(), common.out.display())?;
        }
        Command::Run { common, algs, eps, xi, files } => {
            let roster = parse_roster(&algs, &eps)?;
            let records = cmd_run(&files, &roster, &xi)?;
            write_records(create(&common.out, "records.csv")?, &records)?;
            emit_tables(stdout, &common.out, &records)?;
        }
        Command::Sweep { common, cells, algs, eps, xi } => {
            let mut cfg = if cells.contains('=') {
                SweepConfig {
                    cells: parse_cells(&cells)?,
                    ..SweepConfig::preset("default", common.seed, common.quick)?
                }
            } else {
                SweepConfig::preset(&cells, common.seed, common.quick)?
            };
            if let Some(eps) = eps {
                cfg.eps_list = eps;
            }
            if let Some(xi) = xi {
                cfg.xi_list = xi;
            }
            if let Some(algs) = algs {
                cfg.roster = parse_roster(&algs, &cfg.eps_list)?;
            }
            let records = cmd_sweep(&cfg)?;
            write_records(create(&common.out, "records.csv")?, &records)?;
            emit_tables(stdout, &common.out, &records)?;
        }
        Command::Adversary { common, algs, points, m, w_steps, d, upper, beta } => {
            let spec: AlgorithmSpec = algs.parse()?;
            let base = cfl_core::instances::AdversaryConfig { d, upper, beta, m, w_steps, ..default_probe() };
            let rep = cmd_adversary(spec, &base, points)?;
            let mut w = csv::Writer::from_writer(create(&common.out, "adversary.csv")?);
            writeln!(stdout, "{:>6} {:>12} {:>10}", "level", "y", "ratio")?;
            for row in &rep.rows {
                writeln!(stdout, "{:>6} {:>12.4} {:>10.4}", row.level, row.y, row.ratio)?;
                w.serialize(row)?;
            }
            w.flush()?;
            writeln!(stdout, "{}: max ratio {:.6}, alpha {:.6}", rep.algorithm, rep.max_ratio, rep.alpha)?;
        }
        Command::Report { records, out } => {
            let recs = read_records(File::open(&records)?)?;
            emit_tables(stdout, &out, &recs)?;
        }
    }
    stdout.flush()?;
    Ok(())
}

/// 3 for numeric or feasibility failures, 2 for everything else.
fn exit_code(e: &CflError) -> u8 {
    match e {
        CflError::Numeric { .. } | CflError::Infeasible(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse(), &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
