use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morphogrid::devo::{grow, GrowthConfig, Organism};
use morphogrid::flags::{make_target, regression_image, GrayImage, ModelVariant, PgmFormat, TargetKind};
use morphogrid::harness::{
    load_genome, parse_grid, run_batch_with, self_healing_experiment, snapshot_growth, write_outputs, Disturbance,
    HarnessError, RunConfig,
};
use morphogrid::neat::Genome;

#[derive(Parser)]
#[command(name = "morphogrid", version, about = "Evolve grid organisms that grow into flag patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one evolution and write its curve, champion and manifest.
    Evolve(RunArgs),
    /// Run several independent evolutions and summarize them.
    Batch {
        #[command(flatten)]
        run: RunArgs,
        /// Number of runs (run r is seeded with seed + r).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Disturb a grown champion repeatedly and report how it recovers.
    Heal {
        /// Champion genome file written by evolve or batch.
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, value_parser = grid, default_value = "16x16")]
        grid: (usize, usize),
        /// Standard deviation of the Gaussian disturbance.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Replace the state with uniform noise instead of adding Gaussian noise.
        #[arg(long)]
        random_init: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write phenotype and chemical graymaps at chosen growth steps.
    Snapshot {
        /// Champion genome file written by evolve or batch.
        #[arg(long)]
        genome: PathBuf,
        #[arg(long, value_parser = grid, default_value = "16x16")]
        grid: (usize, usize),
        /// Comma-separated steps, e.g. 0,1,2,5,10,50.
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,4,8,16,32,64")]
        iterations: Vec<usize>,
        #[arg(long, default_value = "snapshots")]
        out: PathBuf,
    },
    /// Emit a target pattern as a graymap (to stdout without --out).
    Target {
        /// 2bands, 3bands, disc or halfdiscs.
        #[arg(long)]
        kind: TargetKind,
        /// N or WxH.
        #[arg(long, value_parser = size, default_value = "32")]
        size: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
        /// Binary P5 instead of text P2.
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Sectioned key = value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// 2bands, 3bands, disc or halfdiscs.
    #[arg(long)]
    target: Option<TargetKind>,
    /// 1-ffwd, 1-recurr, 2-ffwd, 2-recurr or regression.
    #[arg(long)]
    variant: Option<ModelVariant>,
    /// Grid size as WxH.
    #[arg(long, value_parser = grid)]
    grid: Option<(usize, usize)>,
    /// Population size.
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn grid(s: &str) -> Result<(usize, usize), String> {
    parse_grid(s)
}

fn size(s: &str) -> Result<(usize, usize), String> {
    match s.parse::<usize>() {
        Ok(n) => Ok((n, n)),
        Err(_) => parse_grid(s),
    }
}

impl RunArgs {
    /// Desk preset, then the config file, then flags.
    fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut cfg = RunConfig::desk(
            self.variant.unwrap_or(ModelVariant::ALL[0]),
            self.target.unwrap_or(TargetKind::TwoBands),
        );
        if let Some(path) = &self.config {
            cfg.apply(&std::fs::read_to_string(path)?)?;
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(t) = self.target {
            cfg.target = t;
        }
        if let Some((w, h)) = self.grid {
            (cfg.width, cfg.height) = (w, h);
        }
        let generations = cfg.neat.generations();
        if let Some(p) = self.pop {
            cfg.neat.pop_size = p;
            cfg.neat = cfg.neat.with_generations(generations);
        }
        if let Some(g) = self.generations {
            cfg.neat = cfg.neat.with_generations(g);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn evolve(mut cfg: RunConfig) -> Result<(), HarnessError> {
    cfg.validate()?;
    let out = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    cfg.out_dir = Some(out.clone());
    eprintln!(
        "{} on {} {}x{}: pop {}, {} generations, {} run(s) from seed {}",
        cfg.variant,
        cfg.target,
        cfg.width,
        cfg.height,
        cfg.neat.pop_size,
        cfg.neat.generations(),
        cfg.runs,
        cfg.seed
    );
    let batch = run_batch_with(&cfg, |r| {
        eprintln!("run {} (seed {}): best fitness {:.6}", r.run_index, r.seed, r.best_fitness);
    })?;
    write_outputs(&cfg, &batch, &out)?;
    let target = make_target(cfg.target, cfg.width, cfg.height)?;
    target.save_pgm(out.join("target.pgm"), PgmFormat::Plain)?;
    for r in &batch.runs {
        if let Some(image) = render(&r.best_genome, cfg.variant, cfg.width, cfg.height, &cfg.growth)? {
            image.save_pgm(out.join(format!("phenotype{}.pgm", r.run_index)), PgmFormat::Plain)?;
        }
    }
    if batch.runs.len() > 1 {
        let s = batch.summary();
        println!(
            "best fitness over {} runs: min {:.6} q1 {:.6} median {:.6} q3 {:.6} max {:.6}",
            batch.runs.len(),
            s.min,
            s.q1,
            s.median,
            s.q3,
            s.max
        );
    } else {
        println!("best fitness {:.6}", batch.runs[0].best_fitness);
    }
    println!("outputs in {}", out.display());
    Ok(())
}

/// Phenotype of `genome`, or `None` if its growth does not stabilize.
fn render(
    genome: &Genome,
    variant: ModelVariant,
    width: usize,
    height: usize,
    gcfg: &GrowthConfig,
) -> Result<Option<GrayImage>, HarnessError> {
    Ok(match variant {
        ModelVariant::Regression => Some(regression_image(genome, width, height)?),
        ModelVariant::Developmental { chemicals, .. } => {
            grow(Organism::new(genome, width, height, chemicals)?, gcfg).phenotype
        }
    })
}

fn variant_of(genome: &Genome, path: &Path) -> Result<ModelVariant, HarnessError> {
    ModelVariant::of_genome(genome).ok_or_else(|| {
        HarnessError::Config(format!("{} does not match any model variant", path.display()))
    })
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Evolve(args) => {
            let mut cfg = args.resolve()?;
            cfg.runs = 1;
            evolve(cfg)
        }
        Command::Batch { run, runs } => {
            let mut cfg = run.resolve()?;
            if let Some(n) = runs {
                cfg.runs = n;
            }
            evolve(cfg)
        }
        Command::Heal { genome, grid: (w, h), sigma, trials, random_init, seed } => {
            let champion = load_genome(&genome)?;
            let variant = variant_of(&champion, &genome)?;
            let disturbance = if random_init { Disturbance::Randomize } else { Disturbance::Gaussian { sigma } };
            let report = self_healing_experiment(&champion, variant, w, h, &GrowthConfig::default(), trials, disturbance, seed)?;
            println!("original phenotype stabilizes in {} steps", report.original_iterations);
            for (k, t) in report.trials.iter().enumerate() {
                println!("trial {k:3}: {:?} after {} steps, similarity {:.6}", t.recovery, t.iterations, t.similarity);
            }
            println!(
                "exact {:.1}%  close {:.1}%  diverged {:.1}%  mean regrowth {:.1} steps",
                100.0 * report.exact_fraction(),
                100.0 * report.close_fraction(),
                100.0 * report.diverged_fraction(),
                report.mean_recovery_iterations()
            );
            Ok(())
        }
        Command::Snapshot { genome, grid: (w, h), iterations, out } => {
            let champion = load_genome(&genome)?;
            let variant = variant_of(&champion, &genome)?;
            let set = snapshot_growth(&champion, variant, w, h, &GrowthConfig::default(), &iterations, &out)?;
            let files: usize = set.snapshots.iter().map(|s| s.files.len()).sum();
            println!("wrote {files} graymaps to {}; growth stops after {} steps", out.display(), set.growth_iterations);
            Ok(())
        }
        Command::Target { kind, size: (w, h), out, raw } => {
            let image = make_target(kind, w, h)?;
            let format = if raw { PgmFormat::Raw } else { PgmFormat::Plain };
            match out {
                Some(path) => image.save_pgm(path, format)?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    image.write_pgm(&mut stdout, format)?;
                    stdout.flush()?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
