//! Acceptance suite. Prints one `PASS` or `FAIL` line per criterion and a
//! count of failing criteria. With `ACCEPTANCE_STRICT=1` any failure also
//! makes the process exit non-zero.
//!
//! The evolutionary criteria run real desk-scale experiments (16x16 grid,
//! population 150, 150 generations); expect around half an hour on one core.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use morphogrid::devo::{grow, GrowthConfig, Organism};
use morphogrid::flags::{evaluate, make_target, GrayImage, ModelVariant, TargetKind};
use morphogrid::harness::{
    export_run_csv, run_batch_with, run_neat, save_genome, self_healing_experiment, Disturbance, FiveNumber,
    RunConfig, RunRecord,
};
use morphogrid::neat::{ConnGene, Genome, IoShape, NeatConfig};
use morphogrid::neuro::Topology;

struct Suite {
    failures: usize,
}

impl Suite {
    fn report(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn batch(variant: ModelVariant, target: TargetKind, runs: usize, label: &str) -> Vec<RunRecord> {
    let mut cfg = RunConfig::desk(variant, target);
    cfg.runs = runs;
    let start = Instant::now();
    let b = run_batch_with(&cfg, |r| {
        println!(
            "  [{label}] run {} seed {}: best {:.6}, final mean edges {:.1}, {:.0}s elapsed",
            r.run_index,
            r.seed,
            r.best_fitness,
            r.generations.last().unwrap().mean_genome_edges,
            start.elapsed().as_secs_f64()
        )
    })
    .expect("desk configuration is valid");
    b.runs
}

fn median(values: &[f64]) -> f64 {
    FiveNumber::of(values).unwrap().median
}

// 1. XOR -------------------------------------------------------------------

const XOR: [([f64; 2], f64); 4] = [([0.0, 0.0], 0.0), ([0.0, 1.0], 1.0), ([1.0, 0.0], 1.0), ([1.0, 1.0], 0.0)];

fn xor_outputs(g: &Genome) -> [f64; 4] {
    let wiring = g.compile().unwrap();
    let mut state = vec![0.0; wiring.num_neurons()];
    XOR.map(|([a, b], _)| {
        wiring.forward_in_place(&mut state, &[a, b, 1.0]);
        state[wiring.output_ids()[0]]
    })
}

fn xor_validation(s: &mut Suite) {
    let neat = NeatConfig { pop_size: 150, p_add_node: 0.03, p_add_link: 0.05, ..NeatConfig::default() }
        .with_generations(100);
    let fitness = |g: &Genome| 4.0 - xor_outputs(g).iter().zip(XOR).map(|(o, (_, t))| (o - t).powi(2)).sum::<f64>();
    let solves = |g: &Genome, _: f64| xor_outputs(g).iter().zip(XOR).all(|(o, (_, t))| (*o > 0.5) == (t > 0.5));
    let start = Instant::now();
    let mut solved = 0;
    let mut generations = Vec::new();
    for seed in 0..20 {
        let run = run_neat(&neat, IoShape::new(2, 1), Topology::Feedforward, seed, fitness, solves);
        if let Some(g) = run.solved_at {
            assert!(solves(&run.champion, 0.0));
            solved += 1;
            generations.push(g as f64);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let rate = solved as f64 / 20.0;
    let mean_gen = generations.iter().sum::<f64>() / generations.len().max(1) as f64;
    s.report(
        "1 (XOR validation)",
        rate >= 0.9 && secs <= 60.0,
        format!("{solved}/20 runs solved (need >= 90%), mean solving generation {mean_gen:.1}, {secs:.1}s (limit 60s)"),
    );
}

// 2. Whole-system oracle ---------------------------------------------------

fn oracle_equivalence(s: &mut Suite) {
    let mut worst: f64 = 0.0;
    let mut genomes = 0;
    for chemicals in [1, 2] {
        for k in 0..10 {
            let g = common::random_recurrent_genome(chemicals, 1000 + k);
            worst = worst.max(common::max_trajectory_gap(&g, 3, 3, chemicals, 50));
            genomes += 1;
        }
    }
    s.report(
        "2 (whole-system oracle)",
        worst <= 1e-12,
        format!("{genomes} recurrent genomes (10 per M in {{1,2}}), 3x3, 50 steps: max gap {worst:.3e} (limit 1e-12)"),
    );
}

// 3. Analytic growth trace -------------------------------------------------

fn zero_weight_genome(chemicals: usize) -> Genome {
    let io = IoShape::new(4 * chemicals, chemicals + 1);
    let mut conns = Vec::new();
    for from in 0..=io.n_inputs as u32 {
        for o in 0..io.n_outputs {
            conns.push(ConnGene { innovation: conns.len() as u64, from, to: io.output_id(o), weight: 0.0, enabled: true });
        }
    }
    Genome::from_genes(io, Topology::Feedforward, &[], conns).unwrap()
}

fn analytic_trace(s: &mut Suite) {
    // Oracle: E(0) = 0, every activation is sigmoid(0) = 0.5 from t = 1, so
    // E is constant from t = 1 and 8 equal differences complete at t = 9.
    // The phenotype is round(127.5) = 128 everywhere, and against 2bands
    // half the pixels are off by 128/255 and half by 127/255.
    let expected = 1.0 - (128.0f64.powi(2) + 127.0f64.powi(2)) / (2.0 * 255.0f64.powi(2));
    let mut ok = (expected - 0.749996).abs() <= 1e-6;
    let mut notes = Vec::new();
    for (w, h, m) in [(32, 32, 1), (16, 16, 2), (5, 9, 1), (1, 1, 2)] {
        let r = grow(Organism::new(&zero_weight_genome(m), w, h, m).unwrap(), &GrowthConfig::default());
        let uniform = r.phenotype.as_ref() == Some(&GrayImage::filled(w, h, 128).unwrap());
        ok &= r.converged && r.iterations_used == 9 && uniform;
        notes.push(format!("{w}x{h}/M={m}: t={}", r.iterations_used));
    }
    let target = make_target(TargetKind::TwoBands, 32, 32).unwrap();
    let fitness = evaluate(&zero_weight_genome(1), ModelVariant::ALL[0], &target, &GrowthConfig::default()).unwrap();
    ok &= (fitness - 0.749996).abs() <= 1e-6 && (fitness - expected).abs() <= 1e-12;
    s.report(
        "3 (analytic growth trace)",
        ok,
        format!("{}; level 128; fitness {fitness:.9} vs 0.749996 +- 1e-6", notes.join(", ")),
    );
}

// 4, 6, 7, 8, 9 on the desk 2bands champions -------------------------------

fn desk_two_bands(s: &mut Suite, runs: &[RunRecord]) {
    let fitness: Vec<f64> = runs.iter().map(|r| r.best_fitness).collect();
    let f = FiveNumber::of(&fitness).unwrap();
    s.report(
        "4 (desk 2bands, 1-ffwd)",
        f.median >= 0.95,
        format!(
            "5 seeds: min {:.5} q1 {:.5} median {:.5} q3 {:.5} max {:.5} (need median >= 0.95)",
            f.min, f.q1, f.median, f.q3, f.max
        ),
    );
}

fn fixed_point_persistence(s: &mut Suite, runs: &[RunRecord]) {
    let gcfg = GrowthConfig::default();
    let mut checked = 0;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for r in runs {
        let grown = grow(Organism::new(&r.best_genome, 16, 16, 1).unwrap(), &gcfg);
        let Some(phenotype) = grown.phenotype else { continue };
        checked += 1;
        let mut org = grown.final_state;
        for _ in 0..100 {
            let before = org.activations().to_vec();
            org.grid_step();
            let drift = before.iter().zip(org.activations()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(drift);
            ok &= org.phenotype() == phenotype;
        }
    }
    ok &= worst <= 1e-9 && checked > 0;
    s.report(
        "6 (fixed-point persistence)",
        ok,
        format!("{checked} converged champions, 100 extra steps: phenotype unchanged = {ok}, max drift {worst:.3e} (limit 1e-9)"),
    );
}

fn self_healing(s: &mut Suite, ffwd: &[RunRecord], recurrent: &[RunRecord]) {
    let gcfg = GrowthConfig::default();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut ffwd_count = 0;
    for (label, runs, min_exact, min_combined) in [("ffwd", ffwd, 0.8, 0.0), ("recurr", recurrent, 0.0, 0.75)] {
        for r in runs {
            let heal = |d| self_healing_experiment(&r.best_genome, r.variant, 16, 16, &gcfg, 20, d, 500 + r.seed);
            let gauss = match heal(Disturbance::Gaussian { sigma: 1.0 }) {
                Ok(report) => report,
                Err(e) => {
                    ok = false;
                    lines.push(format!("{label} seed {}: {e}", r.seed));
                    continue;
                }
            };
            let random = self_healing_experiment(&r.best_genome, r.variant, 16, 16, &gcfg, 1, Disturbance::Randomize, 900 + r.seed)
                .expect("champion converged above");
            let (exact, close) = (gauss.exact_fraction(), gauss.close_fraction());
            let random_sim = random.trials[0].similarity;
            let random_ok = random.trials[0].converged && random_sim >= 0.99;
            // Diagnostic only: regrowths that hit the cap while already showing the original image.
            let capped_identical = gauss.trials.iter().filter(|t| !t.converged && t.similarity == 1.0).count();
            ok &= exact >= min_exact && exact + close >= min_combined && random_ok;
            if label == "ffwd" {
                ffwd_count += 1;
            }
            lines.push(format!(
                "{label} seed {}: grows in {} steps, exact {:.0}% close {:.0}%, capped with identical image {}/20, random init similarity {:.4}",
                r.seed,
                gauss.original_iterations,
                100.0 * exact,
                100.0 * close,
                capped_identical,
                random_sim
            ));
        }
    }
    ok &= ffwd_count >= 3 && !recurrent.is_empty();
    for l in &lines {
        println!("  {l}");
    }
    s.report(
        "7 (self-healing, sigma = 1)",
        ok,
        format!(
            "{ffwd_count} ffwd champions need >= 80% exact; {} recurrent need exact+close >= 75%; every random-init regrowth needs similarity >= 0.99",
            recurrent.len()
        ),
    );
}

fn no_bloat(s: &mut Suite, all: &[&RunRecord]) {
    let finals: Vec<f64> = all.iter().map(|r| r.generations.last().unwrap().mean_genome_edges).collect();
    let worst = finals.iter().copied().fold(0.0, f64::max);
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;
    let note = if worst <= 60.0 { "all within the 60-edge target" } else { "above the 60-edge target on some runs" };
    s.report(
        "8 (no bloat)",
        worst <= 100.0,
        format!("{} desk runs: final mean enabled edges average {mean:.1}, largest {worst:.1}; {note} (hard limit 100)", finals.len()),
    );
}

fn determinism(s: &mut Suite, first: &RunRecord) {
    let cfg = RunConfig::desk(ModelVariant::ALL[0], TargetKind::TwoBands);
    let again = morphogrid::harness::run_evolution(&cfg, 0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = |r: &RunRecord, tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let genome = dir.path().join(format!("{tag}.genome"));
        export_run_csv(r, &csv).unwrap();
        save_genome(&r.best_genome, &genome).unwrap();
        (std::fs::read(csv).unwrap(), std::fs::read(genome).unwrap())
    };
    let (csv_a, genome_a) = files(first, "a");
    let (csv_b, genome_b) = files(&again, "b");
    s.report(
        "9 (determinism)",
        csv_a == csv_b && genome_a == genome_b,
        format!(
            "seed {} repeated: CSV identical = {} ({} bytes), champion identical = {} ({} bytes)",
            first.seed,
            csv_a == csv_b,
            csv_a.len(),
            genome_a == genome_b,
            genome_a.len()
        ),
    );
}

// 5. Regression reference --------------------------------------------------

fn regression_dominance(s: &mut Suite, regression: &[RunRecord], developmental: &[RunRecord]) {
    let reg: Vec<f64> = regression.iter().map(|r| r.best_fitness).collect();
    let dev: Vec<f64> = developmental.iter().map(|r| r.best_fitness).collect();
    let (mr, md) = (median(&reg), median(&dev));
    s.report(
        "5 (regression reference on 3bands)",
        mr >= md && mr >= 0.97,
        format!("regression median {mr:.5} vs 1-ffwd median {md:.5} (need regression >= 1-ffwd and >= 0.97)"),
    );
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut suite = Suite { failures: 0 };

    xor_validation(&mut suite);
    oracle_equivalence(&mut suite);
    analytic_trace(&mut suite);

    let two_bands = batch(ModelVariant::ALL[0], TargetKind::TwoBands, 5, "1-ffwd 2bands");
    desk_two_bands(&mut suite, &two_bands);
    fixed_point_persistence(&mut suite, &two_bands);

    let regression = batch(ModelVariant::Regression, TargetKind::ThreeBands, 5, "regression 3bands");
    let ffwd_three = batch(ModelVariant::ALL[0], TargetKind::ThreeBands, 5, "1-ffwd 3bands");
    regression_dominance(&mut suite, &regression, &ffwd_three);

    let recurrent = batch(ModelVariant::ALL[1], TargetKind::TwoBands, 2, "1-recurr 2bands");
    self_healing(&mut suite, &two_bands, &recurrent);

    let all: Vec<&RunRecord> = two_bands.iter().chain(&regression).chain(&ffwd_three).chain(&recurrent).collect();
    no_bloat(&mut suite, &all);
    determinism(&mut suite, &two_bands[0]);

    println!(
        "acceptance: {} failing criteria, {:.0}s total",
        suite.failures,
        start.elapsed().as_secs_f64()
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if suite.failures == 0 || !strict {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
