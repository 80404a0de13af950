use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ermrates::curves::LearnerRule;
use ermrates::dims::{Center, ReportOptions, SearchBudget};
use ermrates_cli::bundles::{cmd_reproduce, BundleConfig};
use ermrates_cli::specs::{parse_class, parse_dist, parse_grid};
use ermrates_cli::{cmd_classify, cmd_curve, cmd_dims, cmd_schedule, with_threads, CliError, DEFAULT_SEED, DEFAULT_TRIALS};

#[derive(Parser)]
#[command(name = "ermrates", version, about = "Universal learning rates of ERM on finite truncations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Master seed for all randomness.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DimArgs {
    /// Largest value searched for each dimension.
    #[arg(long, default_value_t = 8)]
    cap: usize,
    /// Centers: all0, all1, hyp:I, or labels:ID=Y;ID=Y.
    #[arg(long = "center", default_values_t = ["all0".to_string(), "all1".to_string()])]
    centers: Vec<String>,
    #[arg(long, default_value_t = 4)]
    se_blocks: usize,
    #[arg(long, default_value_t = 4)]
    vce_blocks: usize,
    /// Extra constant block sizes for the prefix searches.
    #[arg(long = "d-variant")]
    d_variants: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    branching_cap: usize,
    #[arg(long, default_value_t = 1_000_000)]
    node_cap: u64,
}

impl DimArgs {
    fn options(&self) -> Result<ReportOptions, CliError> {
        let centers = self
            .centers
            .iter()
            .map(|c| Center::parse(c).map_err(|e| CliError::BadInput(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(ReportOptions {
            cap: self.cap,
            centers,
            se_blocks: self.se_blocks,
            vce_blocks: self.vce_blocks,
            d_variants: self.d_variants.clone(),
            budget: SearchBudget { branching_cap: self.branching_cap, node_cap: self.node_cap },
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension report for a class.
    Dims {
        /// Class spec: JSON file or `id:k=v,..`.
        class: String,
        #[command(flatten)]
        dims: DimArgs,
    },
    /// Monte Carlo learning curve with a rate fit.
    Curve {
        class: String,
        /// Distribution spec: JSON file or constructor such as `geometric`.
        #[arg(long)]
        dist: String,
        /// worst, best, threshold-maxplus1 or b5-min-consistent-block.
        #[arg(long, default_value = "worst")]
        rule: String,
        /// `n1,n2,..` or `2^a..2^b`.
        #[arg(long, default_value = "2^4..2^14")]
        grid: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Rate category from reports on increasing truncations of one family.
    Classify {
        #[arg(required = true)]
        classes: Vec<String>,
        #[command(flatten)]
        dims: DimArgs,
    },
    /// Greedy slow-rate schedule with its condition checks.
    Schedule {
        /// inv-n, inv-sqrt-n or inv-log-n.
        #[arg(long, default_value = "inv-sqrt-n")]
        rate: String,
        #[arg(long, default_value_t = 4)]
        t_max: usize,
        #[arg(long, default_value_t = 1 << 20)]
        n_max: usize,
    },
    /// Writes the bundle of one worked example.
    Reproduce {
        id: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (seed, out) = (cli.seed, cli.out);
    with_threads(cli.threads, move || match cli.cmd {
        Cmd::Dims { class, dims } => {
            let r = cmd_dims(&parse_class(&class)?, &dims.options()?, &out)?;
            println!("{}: vc={} star={} eluder={} littlestone={}", r.class, r.vc, r.star_global, r.eluder, r.littlestone);
            Ok(())
        }
        Cmd::Curve { class, dist, rule, grid, trials } => {
            let c = parse_class(&class)?;
            let d = parse_dist(&dist, &c)?;
            let rule = LearnerRule::parse(&rule).map_err(|e| CliError::BadInput(e.to_string()))?;
            let r = cmd_curve(&c, &d, rule, &parse_grid(&grid)?, trials, seed, &out)?;
            println!("fit: {:?}", r.fit.category);
            Ok(())
        }
        Cmd::Classify { classes, dims } => {
            let cs = classes.iter().map(|s| parse_class(s)).collect::<Result<Vec<_>, _>>()?;
            let r = cmd_classify(&cs, &dims.options()?, &out)?;
            println!("{:?} ({})", r.classification.category, r.classification.label);
            Ok(())
        }
        Cmd::Schedule { rate, t_max, n_max } => {
            let r = cmd_schedule(&rate, t_max, n_max, &out)?;
            println!("n={:?} k={:?} conditions {}", r.schedule.n, r.schedule.k, if r.pass { "hold" } else { "fail" });
            Ok(())
        }
        Cmd::Reproduce { id, trials } => {
            let s = cmd_reproduce(&id, BundleConfig { trials, seed }, &out)?;
            print!("{}", s.text());
            Ok(())
        }
    })?
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ermrates: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
