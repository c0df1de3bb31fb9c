//! Command-line front end: instance generation, feasibility checks with
//! witness traces, oracle cross-validation, bound tables, and Monte Carlo
//! experiments.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cuckoo_inference::{
    bad_item_bound, bad_path_root_bound, brute_force_feasible, census_to_csv, cross_validate,
    edge_probability, edge_probability_cap, emit_instance, failure_bound, parse_instance,
    path_length_census, place_all, run_sweep, sample_instance, summaries_to_csv, BoundParams,
    CapacityRule, CellConfig, ExperimentConfig, InferenceGraph, Instance, NodeId, Placement, Seed,
    Side, BRUTE_FORCE_CAP,
};

#[derive(Parser)]
#[command(
    name = "cuckoo",
    about = "Two-table cuckoo hashing placement: feasibility, witnesses, bounds, experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum RuleArg {
    /// m = ceil((1+eps) * n)
    Classic,
    /// m = ceil((1+eps) * d^2 * n)
    Dsq,
}

impl From<RuleArg> for CapacityRule {
    fn from(r: RuleArg) -> CapacityRule {
        match r {
            RuleArg::Classic => CapacityRule::Classic,
            RuleArg::Dsq => CapacityRule::DimensionSquared,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Item counts, comma separated
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Load slacks epsilon, comma separated
    #[arg(long = "eps", value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    /// Dimensions, comma separated
    #[arg(long = "d", value_delimiter = ',', default_value = "1")]
    d: Vec<usize>,
    /// Instances per cell
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores); affects speed only
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Table sizing rule
    #[arg(long = "capacity-rule", value_enum, default_value_t = RuleArg::Classic)]
    capacity_rule: RuleArg,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GridArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_grid: self.n.clone(),
            epsilon_grid: self.eps.clone(),
            d_grid: self.d.clone(),
            trials: self.trials,
            seed: Seed(self.seed),
            rule: self.capacity_rule.into(),
            workers: self.workers,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random instance and emit it in the canonical text format
    Gen {
        /// Number of items
        #[arg(long)]
        n: usize,
        /// Slots per table (derived from --eps when omitted)
        #[arg(long)]
        m: Option<u32>,
        /// Dimension
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Load slack, used with --capacity-rule when --m is omitted
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long = "capacity-rule", value_enum, default_value_t = RuleArg::Classic)]
        capacity_rule: RuleArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trial index within the seed's stream
        #[arg(long, default_value_t = 0)]
        trial: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a legal placement exists for an instance
    Check {
        /// Instance file ("-" or omitted: stdin)
        file: Option<PathBuf>,
        /// On infeasible instances, print witness traces for a bad item
        #[arg(long)]
        explain: bool,
    },
    /// Construct and print a legal placement
    Place {
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate all feasibility deciders on an instance
    Oracle { file: Option<PathBuf> },
    /// Print the closed-form bounds for one parameter set
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Slots per table (derived from the rule when omitted)
        #[arg(long)]
        m: Option<u32>,
        #[arg(long = "capacity-rule", value_enum, default_value_t = RuleArg::Classic)]
        capacity_rule: RuleArg,
    },
    /// Monte Carlo sweep over a parameter grid, CSV per cell
    Experiment {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Witness-path length histograms over a parameter grid, CSV per length
    Census {
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn read_instance(file: &Option<PathBuf>) -> Result<Instance> {
    let text = match file {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p)
            .with_context(|| format!("reading instance file {}", p.display()))?,
        _ => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .context("reading instance from stdin")?;
            buf
        }
    };
    Ok(parse_instance(&text)?)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(p) => {
            fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

/// Opens the output for writing before any computation starts, so an
/// unwritable path fails fast instead of after a long sweep.
fn open_output_early(out: &Option<PathBuf>) -> Result<Option<fs::File>> {
    match out {
        Some(p) => Ok(Some(fs::File::create(p).with_context(|| {
            format!("cannot open output path {}", p.display())
        })?)),
        None => Ok(None),
    }
}

fn placement_text(p: &Placement) -> String {
    let mut s = String::new();
    for item in 0..p.len() {
        s.push_str(&format!("{} {}\n", item, p.side(item)));
    }
    s
}

fn explain_infeasible(inst: &Instance) {
    let g = InferenceGraph::build(inst);
    let bad_item = (0..inst.n()).find(|&i| g.is_bad_item(i));
    let Some(item) = bad_item else {
        println!("no bad item found (unexpected for an infeasible instance)");
        return;
    };
    println!("item {item} cannot be stored on either table:");
    for side in Side::BOTH {
        let v = NodeId::new(item, side);
        match g.find_basic_bad_path(v) {
            Some(report) => print!("{report}"),
            None => println!(
                "  {v} is unsatisfiable (reaches both copies of some item), but every \
                 witness path reuses a forced bridge item, so no basic trace exists"
            ),
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen {
            n,
            m,
            d,
            eps,
            capacity_rule,
            seed,
            trial,
            out,
        } => {
            let m = match (m, eps) {
                (Some(m), _) => m,
                (None, Some(eps)) => CapacityRule::from(capacity_rule).table_size(n, eps, d),
                (None, None) => bail!("either --m or --eps must be given"),
            };
            let inst = sample_instance(n, m, d, Seed(seed), trial)?;
            write_output(&out, &emit_instance(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { file, explain } => {
            let inst = read_instance(&file)?;
            match place_all(&inst) {
                Some(_) => {
                    println!("feasible");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("infeasible");
                    if explain {
                        explain_infeasible(&inst);
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Place { file, out } => {
            let inst = read_instance(&file)?;
            match place_all(&inst) {
                Some(p) => {
                    write_output(&out, &placement_text(&p))?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    eprintln!("infeasible: no legal placement exists");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Oracle { file } => {
            let inst = read_instance(&file)?;
            let report = cross_validate(&inst);
            let feasible = report.placement_found;
            println!("{report}");
            println!("verdict: {}", if feasible { "feasible" } else { "infeasible" });
            if feasible {
                let witness = if inst.n() <= BRUTE_FORCE_CAP {
                    brute_force_feasible(&inst)?.witness
                } else {
                    place_all(&inst)
                };
                if let Some(w) = witness {
                    print!("witness:\n{}", placement_text(&w));
                }
            }
            if report.agree() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
        Command::Bounds {
            n,
            eps,
            d,
            m,
            capacity_rule,
        } => {
            let rule = CapacityRule::from(capacity_rule);
            let params = match m {
                Some(m) => BoundParams::new(n, m, eps, d, rule)?,
                None => BoundParams::from_rule(n, eps, d, rule)?,
            };
            let cell = CellConfig {
                n,
                epsilon: eps,
                d,
                rule,
            };
            println!("n                    {n}");
            println!("m                    {}", params.m);
            println!("d                    {d}");
            println!("epsilon              {eps}");
            println!(
                "capacity rule        {:?} (m for this rule: {})",
                rule,
                cell.table_size()
            );
            println!("bad-path root bound  {:.6e}", bad_path_root_bound(&params));
            println!("bad-item bound       {:.6e}", bad_item_bound(&params));
            println!("failure bound        {:.6e}", failure_bound(&params));
            println!("edge probability     {:.6e}", edge_probability(d, params.m));
            println!("edge prob cap d^2/m  {:.6e}", edge_probability_cap(d, params.m));
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment { grid } => {
            let mut file = open_output_early(&grid.out)?;
            let config = grid.config();
            let rows = run_sweep(&config)?;
            let csv = summaries_to_csv(&rows);
            match &mut file {
                Some(f) => f.write_all(csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Census { grid } => {
            let mut file = open_output_early(&grid.out)?;
            let config = grid.config();
            let rows = path_length_census(&config)?;
            let csv = census_to_csv(&rows);
            match &mut file {
                Some(f) => f.write_all(csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
