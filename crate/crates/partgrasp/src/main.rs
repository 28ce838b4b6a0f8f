use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use partgrasp::bench::{run_bench, BenchConfig};
use partgrasp::config::Config;
use partgrasp::plan::{candidate_json_lines, dual_json_lines, run_baseline_dual, run_dual, run_single};
use partgrasp::records::{to_json_line, GraspRecord};
use partgrasp::scene_io::{load_scene, save_scene};
use partgrasp_core::{gen_object, ObjectKind};

#[derive(Parser)]
#[command(name = "partgrasp", version, about = "Part-guided grasp planning for single and dual parallel-jaw arms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic object scene (JSON plus PLY).
    GenScene {
        /// Object kind: mug, knife, bottle, pan, pot, basin, keyboard or laptop.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Surface points per square metre; defaults per object kind.
        #[arg(long)]
        density: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan one grasp on a part.
    PlanSingle {
        #[command(flatten)]
        common: PlanArgs,
    },
    /// Plan a two-arm grasp pair on a part.
    PlanDual {
        #[command(flatten)]
        common: PlanArgs,
        #[command(flatten)]
        dual: DualArgs,
    },
    /// Plan a two-arm grasp pair on farthest-point/nearest-neighbour regions.
    BaselineDual {
        #[command(flatten)]
        common: PlanArgs,
        #[command(flatten)]
        dual: DualArgs,
        /// Points per region.
        #[arg(long, default_value_t = 100)]
        knn: usize,
    },
    /// Run the benchmark and write a CSV table.
    Bench {
        /// Benchmark TOML file.
        #[arg(long)]
        config: PathBuf,
        /// CSV report path.
        #[arg(long)]
        out: PathBuf,
        /// Fill the runtime column.
        #[arg(long)]
        timing: bool,
        /// Also write one JSON line per trial.
        #[arg(long)]
        trials_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PlanArgs {
    /// Scene JSON file; its PLY cloud is read from the same directory.
    #[arg(long)]
    scene: PathBuf,
    /// Target part label; `*` for the whole object.
    #[arg(long, default_value = "*")]
    part: String,
    /// TOML file with [energy], [gripper], [sampler] and [dual] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sampled candidates per arm.
    #[arg(long)]
    candidates: Option<usize>,
    /// Langevin steps per noise level.
    #[arg(long)]
    steps: Option<usize>,
    /// Sampler seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file of JSON lines; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every sampled candidate as JSON lines.
    #[arg(long)]
    dump_candidates: Option<PathBuf>,
}

#[derive(Args)]
struct DualArgs {
    /// Energy filter threshold; the configured percentile if absent.
    #[arg(long)]
    delta: Option<f64>,
    /// Minimum force-closure quality of the selected pair.
    #[arg(long)]
    fc_threshold: Option<f64>,
    /// Friction coefficient.
    #[arg(long)]
    mu: Option<f64>,
}

impl PlanArgs {
    fn config(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(n) = self.candidates {
            cfg.sampler.num_candidates = n;
        }
        if let Some(s) = self.steps {
            cfg.sampler.steps_per_level = s;
        }
        if let Some(s) = self.seed {
            cfg.sampler.seed = s;
        }
        Ok(cfg)
    }
}

impl DualArgs {
    fn apply(&self, cfg: &mut Config) {
        if let Some(d) = self.delta {
            cfg.dual.delta = Some(d);
        }
        if let Some(t) = self.fc_threshold {
            cfg.dual.fc_threshold = t;
        }
        if let Some(m) = self.mu {
            cfg.dual.mu = m;
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenScene { kind, scale, density, seed, out } => {
            let k = ObjectKind::parse(&kind).with_context(|| format!("unknown object kind `{kind}`"))?;
            let scene = gen_object(k, scale, density.unwrap_or_else(|| k.default_density()), seed)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let json = save_scene(&out, k.as_str(), &scene)?;
            println!("{}", json.display());
        }
        Command::PlanSingle { common } => {
            let cfg = common.config()?;
            let scene = load_scene(&common.scene)?;
            let outcome = run_single(&scene, &common.part, true, &cfg.energy()?, &cfg.sampler()?, &cfg.gripper()?)?;
            if let Some(p) = &common.dump_candidates {
                let mut text = String::new();
                for c in &outcome.plan.candidates {
                    text += &to_json_line(&GraspRecord::from_candidate(c))?;
                }
                write_out(Some(p), &text)?;
            }
            write_out(common.out.as_deref(), &outcome.to_json_lines()?)?;
        }
        Command::PlanDual { common, dual } => {
            let mut cfg = common.config()?;
            dual.apply(&mut cfg);
            let scene = load_scene(&common.scene)?;
            let plan = run_dual(&scene, &common.part, &cfg.energy()?, &cfg.sampler()?, &cfg.dual()?, &cfg.gripper()?)?;
            if let Some(p) = &common.dump_candidates {
                write_out(Some(p), &candidate_json_lines(&plan)?)?;
            }
            write_out(common.out.as_deref(), &dual_json_lines(&plan)?)?;
        }
        Command::BaselineDual { common, dual, knn } => {
            let mut cfg = common.config()?;
            dual.apply(&mut cfg);
            let scene = load_scene(&common.scene)?;
            let plan = run_baseline_dual(&scene, knn, &cfg.energy()?, &cfg.sampler()?, &cfg.dual()?, &cfg.gripper()?)?;
            if let Some(p) = &common.dump_candidates {
                write_out(Some(p), &candidate_json_lines(&plan)?)?;
            }
            write_out(common.out.as_deref(), &dual_json_lines(&plan)?)?;
        }
        Command::Bench { config, out, timing, trials_out } => {
            let cfg = BenchConfig::load(&config)?;
            let report = run_bench(&cfg, timing)?;
            write_out(Some(&out), &report.to_csv()?)?;
            if let Some(p) = trials_out {
                write_out(Some(&p), &report.trials_json_lines()?)?;
            }
            print!("{}", report.to_table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
