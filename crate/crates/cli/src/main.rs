mod store;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use spindse::compiler::compile;
use spindse::design_space::{ArchId, Architecture, DesignSpace};
use spindse::esp::{estimate, NoiseConfig};
use spindse::harness::{
    brute_force, compare, load_circuit, load_noise, load_space, run_experiment, termination_for,
    ExperimentManifest, TargetSpec,
};
use spindse::optimize::{run, CircuitObjective, EspScale, Evaluator, OptimizerConfig};

#[derive(Parser)]
#[command(
    name = "spindse",
    version,
    about = "Design-space exploration for spin-qubit architectures"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Rule file; the shipped rules by default.
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// Variable domain file; the canonical domains by default.
    #[arg(long, global = true)]
    domains: Option<PathBuf>,
    /// Noise configuration file.
    #[arg(long, global = true)]
    noise: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Sub-domain restriction `var=v1,v2`, repeatable.
    #[arg(long, global = true)]
    restrict: Vec<String>,
    #[arg(long, global = true, default_value_t = 40.0)]
    tc_minutes: f64,
    /// Stop after this fraction of the valid space has been evaluated.
    /// Defaults to 0.234 when no target is set.
    #[arg(long, global = true)]
    tc_call_fraction: Option<f64>,
    /// Target log ESP, or `oracle` for the brute-force maximum.
    #[arg(long, global = true, value_parser = TargetSpec::parse)]
    tc_target_logesp: Option<TargetSpec>,
    #[arg(long, global = true)]
    tc_max_iterations: Option<u64>,
    /// Score on 1/(1+|log ESP|) instead of ESP.
    #[arg(long, global = true)]
    normalized_log: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Count, or list, the valid architectures.
    Enumerate {
        #[arg(long)]
        list: bool,
    },
    /// Compile one circuit for one architecture and print the cycles.
    Compile {
        circuit: PathBuf,
        #[command(flatten)]
        arch: ArchArg,
        /// Print JSON instead of the cycle listing.
        #[arg(long)]
        json: bool,
    },
    /// Print the ESP breakdown of one circuit on one architecture.
    Evaluate {
        circuit: PathBuf,
        #[command(flatten)]
        arch: ArchArg,
    },
    /// Score every valid architecture.
    BruteForce { circuits: Vec<PathBuf> },
    /// Run optimizer presets.
    Optimize {
        circuit: PathBuf,
        /// Preset such as `GA[100,0.2]`; repeatable.
        #[arg(long, required = true)]
        preset: Vec<String>,
        /// Runs per preset, with seeds `seed`, `seed+1`, ...
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
    },
    /// Aggregate brute-force tables and run records under --out.
    Compare,
    /// Best architecture per circuit and the universal recommendation.
    Report,
    /// Run a full experiment from a TOML manifest.
    Experiment {
        #[arg(long)]
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct ArchArg {
    /// `var=value` pairs over the fully parallel architecture.
    #[arg(long, conflicts_with = "id")]
    arch: Option<String>,
    /// Architecture id.
    #[arg(long)]
    id: Option<u32>,
}

impl Global {
    fn space(&self) -> Result<DesignSpace> {
        Ok(load_space(
            self.rules.as_deref(),
            self.domains.as_deref(),
            &self.restrict,
        )?)
    }

    fn noise(&self) -> Result<NoiseConfig> {
        Ok(load_noise(self.noise.as_deref())?)
    }

    fn scale(&self) -> EspScale {
        if self.normalized_log {
            EspScale::NormalizedLog
        } else {
            EspScale::Probability
        }
    }
}

fn resolve_arch(arg: &ArchArg, space: &DesignSpace) -> Result<Architecture> {
    let arch = match (&arg.arch, arg.id) {
        (_, Some(id)) => Architecture::from_id(ArchId(id))
            .with_context(|| format!("architecture id {id} out of range"))?,
        (Some(text), None) => {
            Architecture::parse_assignments(Architecture::fully_parallel(), text)?
        }
        (None, None) => Architecture::fully_parallel(),
    };
    let check = space.rules().validate(&arch);
    if !check.valid {
        bail!("architecture {arch} violates {}", check.violated.join(", "));
    }
    Ok(arch)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate { list } => {
            let space = g.space()?;
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            if *list {
                for arch in space.enumerate() {
                    writeln!(out, "{}\t{arch}", arch.id())?;
                }
            }
            writeln!(out, "{}", space.valid_count())?;
            out.flush()?;
        }
        Command::Compile {
            circuit,
            arch,
            json,
        } => {
            let space = g.space()?;
            let c = load_circuit(circuit)?;
            let a = resolve_arch(arch, &space)?;
            let compiled = compile(&c, &a, &g.noise()?)?;
            if *json {
                println!("{}", serde_json::to_string_pretty(&compiled)?);
            } else {
                std::io::stdout()
                    .lock()
                    .write_all(compiled.dump().as_bytes())?;
            }
        }
        Command::Evaluate { circuit, arch } => {
            let space = g.space()?;
            let noise = g.noise()?;
            let c = load_circuit(circuit)?;
            let a = resolve_arch(arch, &space)?;
            let b = estimate(&compile(&c, &a, &noise)?, &noise);
            println!("{}", serde_json::to_string_pretty(&b)?);
        }
        Command::BruteForce { circuits } => {
            if circuits.is_empty() {
                bail!("no circuit given");
            }
            let space = g.space()?;
            let noise = g.noise()?;
            for path in circuits {
                let c = load_circuit(path)?;
                let bf = brute_force(&c, &space, &noise);
                if bf.table.failures > 0 {
                    eprintln!(
                        "warning: {}: {} architectures failed to compile and are excluded",
                        c.name, bf.table.failures
                    );
                }
                let written = store::write_brute(&g.out, &bf)?;
                println!(
                    "{}\t{} architectures\tbest {}\tlog ESP {}\t{:.3} s\t{}",
                    c.name,
                    bf.table.valid_count,
                    bf.table.best_id.map_or("-".into(), |i| i.to_string()),
                    bf.table.best_log_esp,
                    bf.wall_time,
                    written.display()
                );
            }
        }
        Command::Optimize {
            circuit,
            preset,
            repetitions,
        } => optimize(g, circuit, preset, *repetitions)?,
        Command::Compare => {
            let brutes = store::read_all_brutes(&g.out)?;
            store::ensure_nonempty(&brutes, "brute-force tables", &g.out)?;
            let runs = store::read_all_runs(&g.out)?;
            store::ensure_nonempty(&runs, "run records", &g.out)?;
            let report = compare(&runs, &brutes, g.space()?.rules());
            for p in store::write_report(&g.out, &report, &runs)? {
                println!("{}", p.display());
            }
        }
        Command::Report => {
            let brutes = store::read_all_brutes(&g.out)?;
            store::ensure_nonempty(&brutes, "brute-force tables", &g.out)?;
            let report = compare(&[], &brutes, g.space()?.rules());
            for row in &report.best_rows {
                println!("{}\t{}\t{}", row.circuit, row.arch, row.log_esp);
            }
            if let Some(u) = &report.universal {
                println!("universal\t{u}");
            }
            let path = g.out.join("report").join("best.csv");
            fs::create_dir_all(path.parent().expect("has parent"))?;
            store::write_best_csv(&path, &report)?;
        }
        Command::Experiment { manifest } => experiment(manifest)?,
    }
    Ok(())
}

fn optimize(g: &Global, circuit: &Path, presets: &[String], repetitions: usize) -> Result<()> {
    let space = g.space()?;
    let noise = g.noise()?;
    let c = load_circuit(circuit)?;
    let configs = presets
        .iter()
        .map(|p| Ok(p.parse::<OptimizerConfig>()?.with_scale(g.scale())))
        .collect::<Result<Vec<_>>>()?;
    let target = match &g.tc_target_logesp {
        None => None,
        Some(TargetSpec::Value(v)) => Some(*v),
        Some(_) => {
            // reuse a stored table for this circuit when there is one
            let summary = store::brute_dir(&g.out).join(format!("{}.json", c.name));
            let bf = if summary.exists() {
                store::read_brute(&summary, false)?
            } else {
                let bf = brute_force(&c, &space, &noise);
                store::write_brute(&g.out, &bf)?;
                bf
            };
            Some(bf.table.best_log_esp)
        }
    };
    let tc = termination_for(
        Some(g.tc_minutes),
        g.tc_call_fraction,
        target,
        g.tc_max_iterations,
    );
    let objective = CircuitObjective::new(c.clone(), noise);
    let jobs: Vec<(OptimizerConfig, u64)> = configs
        .iter()
        .flat_map(|cfg| (0..repetitions as u64).map(move |i| (*cfg, i)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|(cfg, i)| {
            let mut eval = Evaluator::new(&objective, cfg.scale);
            run(cfg, &space, &mut eval, &tc, g.seed + i, &c.name)
        })
        .collect::<Result<Vec<_>, _>>()?;
    for out in &outcomes {
        let path = store::write_run(&g.out, out)?;
        let r = &out.record;
        println!(
            "{}\tseed {}\t{:?}\tbest log ESP {}\t{} calls\t{:.3} s\t{}",
            r.optimizer,
            r.seed,
            r.stop,
            r.best_log_esp,
            r.unique_calls,
            out.timing.wall_time,
            path.display()
        );
    }
    Ok(())
}

fn experiment(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: ExperimentManifest =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let results = run_experiment(&manifest, base)?;
    let out = if manifest.out.is_absolute() {
        manifest.out.clone()
    } else {
        base.join(&manifest.out)
    };
    for bf in &results.brutes {
        store::write_brute(&out, bf)?;
    }
    for r in &results.runs {
        store::write_run(&out, r)?;
    }
    for p in store::write_report(&out, &results.report, &results.runs)? {
        println!("{}", p.display());
    }
    for s in &results.report.summaries {
        println!(
            "{}\t{}\treached {}/{}\tcalls mean {:.2} worst {:.2}\ttime mean {:.2} worst {:.2}",
            s.circuit,
            s.preset,
            s.reached,
            s.runs,
            s.mean_relative_calls,
            s.worst_relative_calls,
            s.mean_relative_time,
            s.worst_relative_time
        );
    }
    Ok(())
}
