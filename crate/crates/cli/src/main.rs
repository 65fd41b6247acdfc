use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use so3round::groups::{FiniteSubgroup, GroupKind};
use so3round::kazhdan::{correct, perturb_hom, NearHom};
use so3round::lemma51::{lemma51_experiment, Lemma51Config, Stratum};
use so3round::net::{covering_check, load, save, Net, NetConfig, StopRule};
use so3round::report::{self, ExperimentConfig, Table};
use so3round::rng::stream;
use so3round::roundgroup::{
    assoc_rate, cancellativity_profile, energy_estimate, energy_exhaustive, fiber_packing_bound,
    proximal_check, EnergyMode,
};
use so3round::so3::haar_sample;
use so3round::words::{
    commutator_word, commutator_word_length, genericity_scan, verify_word_on_group, w_star_word,
    Word,
};

#[derive(Parser)]
#[command(
    name = "so3round",
    version,
    about = "Rounded multiplication on nets of SO(3)"
)]
struct Cli {
    /// Worker thread cap (0 = all cores).
    #[arg(long, global = true, env = "SO3ROUND_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or check a δ-separated net.
    #[command(subcommand)]
    Net(NetCommand),
    /// Associativity rate of the rounded product.
    Assoc(AssocArgs),
    /// Fiber sizes of `y ↦ x ∘ y`.
    Cancel(SampleArgs),
    /// Multiplicative energy of the rounded or true product.
    Energy(EnergyArgs),
    /// Centralizer-distance ratio over stratified samples.
    Lemma51(Lemma51Args),
    /// Commutator words and word maps.
    #[command(subcommand)]
    Words(WordsCommand),
    /// Correct a perturbed homomorphism of a finite group.
    Kazhdan(KazhdanArgs),
    /// Nearest-neighbour index throughput against a linear scan.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum NetCommand {
    Build(NetBuildArgs),
    Check(NetCheckArgs),
}

#[derive(Args)]
struct NetBuildArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed consecutive-rejection budget instead of the adaptive rule.
    #[arg(long)]
    stop: Option<u64>,
    /// Skip the saturation sweep.
    #[arg(long)]
    no_saturate: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NetCheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// Random pairs for the proximal bound `d(x ∘ y, xy) ≤ δ` (0 skips).
    #[arg(long, default_value_t = 0)]
    pairs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    net: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct AssocArgs {
    #[command(flatten)]
    common: SampleArgs,
    /// Enumerate every triple when the net is small enough.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Table,
    Metric,
}

#[derive(Args)]
struct EnergyArgs {
    #[command(flatten)]
    common: SampleArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Table)]
    mode: ModeArg,
    /// Tolerance for metric mode (defaults to δ).
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct Lemma51Args {
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stratum width multiplier in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum WordsCommand {
    /// Letter counts of the commutator tower.
    Lengths {
        #[arg(long, default_value_t = 8)]
        max_s: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Largest word-map norm over pairs of group elements.
    Verify {
        /// `wstar` or `w1` … `w8`.
        #[arg(long, default_value = "wstar")]
        word: String,
        #[arg(long)]
        group: GroupKind,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        exhaustive: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Empirical distribution of the eight-variable word on Haar tuples.
    Generic {
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,0.5")]
        etas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct KazhdanArgs {
    #[arg(long)]
    group: GroupKind,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Net file; without it a net is built from `--delta`.
    #[arg(long)]
    net: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 10_000)]
    queries: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn emit(table: &Table, config: ExperimentConfig, csv: &Option<PathBuf>) -> so3round::Result<()> {
    let config = config.output(csv.clone());
    match csv {
        Some(path) => table.write(&config, path),
        None => {
            print!("{}", table.render(&config));
            Ok(())
        }
    }
}

fn load_net(path: &Path) -> so3round::Result<Net> {
    load(path).map_err(|e| match e {
        so3round::Error::Io(io) => {
            so3round::Error::InvalidInput(format!("{}: {io}", path.display()))
        }
        other => other,
    })
}

fn run(cli: Cli) -> so3round::Result<()> {
    match cli.command {
        Command::Net(NetCommand::Build(a)) => {
            let config = NetConfig {
                delta: a.delta,
                seed: a.seed,
                stop: a.stop.map(StopRule::Fixed).unwrap_or_default(),
                saturate: !a.no_saturate,
            };
            let start = Instant::now();
            let net = Net::build(&config)?;
            let elapsed = start.elapsed();
            save(&net, &a.out)?;
            println!(
                "built {} points at delta {} in {:.2}s -> {}",
                net.len(),
                net.delta(),
                elapsed.as_secs_f64(),
                a.out.display()
            );
        }
        Command::Net(NetCommand::Check(a)) => {
            let net = load_net(&a.input)?;
            let cover = covering_check(&net, a.samples, a.seed)?;
            let cfg = ExperimentConfig::new("net check")
                .param("in", a.input.display())
                .param("samples", a.samples)
                .param("pairs", a.pairs)
                .param("seed", a.seed);
            let mut table =
                report::cover_table(net.delta(), net.len(), &cover, net.min_pairwise_distance());
            if a.pairs > 0 {
                let p = proximal_check(&net, a.pairs, a.seed)?;
                table
                    .columns
                    .extend(["pairs", "proximal_violations", "max_product_gap"].map(String::from));
                table.rows[0].extend([
                    p.pairs.to_string(),
                    p.violations.to_string(),
                    report::num(p.max_distance),
                ]);
            }
            emit(&table, cfg, &a.csv)?;
            if !cover.pass {
                return Err(so3round::Error::Integrity(format!(
                    "covering gap {} exceeds delta {}",
                    cover.max_gap,
                    net.delta()
                )));
            }
        }
        Command::Assoc(a) => {
            let c = &a.common;
            let net = load_net(&c.net)?;
            let stats = assoc_rate(&net, c.trials, c.seed, a.exhaustive)?;
            let cfg = ExperimentConfig::new("assoc")
                .param("net", c.net.display())
                .param("trials", c.trials)
                .param("seed", c.seed)
                .param("exhaustive", a.exhaustive);
            emit(
                &report::op_stats_table(net.delta(), net.len(), &stats),
                cfg,
                &c.csv,
            )?;
        }
        Command::Cancel(c) => {
            let net = load_net(&c.net)?;
            let profile = cancellativity_profile(&net, c.trials, c.seed)?;
            let cfg = ExperimentConfig::new("cancel")
                .param("net", c.net.display())
                .param("trials", c.trials)
                .param("seed", c.seed)
                .param("max_fiber", profile.max)
                .param("packing_bound", fiber_packing_bound(net.delta())?);
            emit(&report::fiber_table(&profile), cfg, &c.csv)?;
        }
        Command::Energy(a) => {
            let c = &a.common;
            let net = load_net(&c.net)?;
            let mode = match a.mode {
                ModeArg::Table => EnergyMode::Table,
                ModeArg::Metric => EnergyMode::Metric {
                    eta: a.eta.unwrap_or(net.delta()),
                },
            };
            let mut cfg = ExperimentConfig::new("energy")
                .param("net", c.net.display())
                .param("trials", c.trials)
                .param("seed", c.seed);
            let stats = energy_estimate(&net, c.trials, c.seed, mode)?;
            if a.exhaustive {
                cfg = cfg.param(
                    "exhaustive_rate",
                    report::num(energy_exhaustive(&net, mode)?),
                );
            }
            emit(
                &report::energy_table(net.delta(), net.len(), &stats),
                cfg,
                &c.csv,
            )?;
        }
        Command::Lemma51(a) => {
            let config = Lemma51Config {
                samples: a.samples,
                seed: a.seed,
                scale: a.scale,
            };
            let rep = lemma51_experiment(&config)?;
            let mut cfg = ExperimentConfig::new("lemma51")
                .param("samples", a.samples)
                .param("seed", a.seed)
                .param("scale", a.scale);
            for s in Stratum::ALL {
                let m = rep.max_ratio(s).map(report::num).unwrap_or_default();
                cfg = cfg.param(&format!("max_ratio.{}", s.name()), m);
            }
            let overall = rep.overall_max().map(report::num).unwrap_or_default();
            cfg = cfg.param("max_ratio", &overall);
            emit(&report::lemma51_table(&rep), cfg, &a.csv)?;
            if a.csv.is_some() {
                println!("max ratio {overall}");
            }
        }
        Command::Words(WordsCommand::Lengths { max_s, csv }) => {
            let mut t = Table::new(&["s", "length", "expected"]);
            for s in 1..=max_s {
                let w = commutator_word(s)?;
                t.push(vec![
                    s.to_string(),
                    w.len().to_string(),
                    commutator_word_length(s).to_string(),
                ]);
            }
            emit(
                &t,
                ExperimentConfig::new("words lengths").param("max_s", max_s),
                &csv,
            )?;
        }
        Command::Words(WordsCommand::Verify {
            word,
            group,
            exhaustive,
            csv,
        }) => {
            let w = parse_word(&word)?;
            let g = FiniteSubgroup::new(group)?;
            let v = verify_word_on_group(&w, &g, exhaustive)?;
            let cfg = ExperimentConfig::new("words verify")
                .param("word", &word)
                .param("group", group)
                .param("exhaustive", exhaustive);
            emit(&report::word_check_table(&word, &[(&g, v)]), cfg, &csv)?;
        }
        Command::Words(WordsCommand::Generic {
            s,
            samples,
            etas,
            seed,
            csv,
        }) => {
            let table = genericity_scan(s, &etas, samples, seed)?;
            let etas_text: Vec<String> = etas.iter().map(|e| report::num(*e)).collect();
            let cfg = ExperimentConfig::new("words generic")
                .param("s", s)
                .param("samples", samples)
                .param("etas", etas_text.join(";"))
                .param("seed", seed);
            emit(&report::genericity_csv(&table), cfg, &csv)?;
        }
        Command::Kazhdan(a) => {
            let group = Arc::new(FiniteSubgroup::new(a.group)?);
            let phi = perturb_hom(&NearHom::inclusion(group), a.delta, a.seed)?;
            let out = correct(&phi, a.tol, a.max_iter)?;
            let cfg = ExperimentConfig::new("kazhdan")
                .param("group", a.group)
                .param("delta", report::num(a.delta))
                .param("seed", a.seed)
                .param("tol", report::num(a.tol))
                .param("max_iter", a.max_iter)
                .param("converged", out.converged)
                .param("sup_dist", report::num(out.sup_dist))
                .param("non_decreasing_steps", out.non_decreasing.len());
            emit(&report::kazhdan_table(&out), cfg, &a.csv)?;
            if !out.converged {
                return Err(so3round::Error::State(format!(
                    "no convergence after {} iterations; final defect {}",
                    a.max_iter,
                    out.phi.defect()
                )));
            }
        }
        Command::Bench(a) => bench(&a)?,
    }
    Ok(())
}

fn parse_word(name: &str) -> so3round::Result<Word> {
    if name == "wstar" {
        return Ok(w_star_word());
    }
    match name.strip_prefix('w').and_then(|s| s.parse::<u32>().ok()) {
        Some(s) => commutator_word(s),
        None => Err(so3round::Error::InvalidInput(format!(
            "unknown word {name:?}; use wstar or w1..w8"
        ))),
    }
}

fn bench(a: &BenchArgs) -> so3round::Result<()> {
    let start = Instant::now();
    let net = match &a.net {
        Some(p) => load_net(p)?,
        None => Net::build(&NetConfig::new(a.delta, a.seed))?,
    };
    let setup = start.elapsed().as_secs_f64();
    let mut rng = stream(a.seed, 1);
    let queries: Vec<_> = (0..a.queries).map(|_| haar_sample(&mut rng)).collect();

    let t = Instant::now();
    let fast: Vec<_> = queries
        .iter()
        .map(|g| net.nn_query(g))
        .collect::<so3round::Result<_>>()?;
    let fast_time = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let slow: Vec<_> = queries
        .iter()
        .map(|g| net.nn_query_linear(g))
        .collect::<so3round::Result<_>>()?;
    let slow_time = t.elapsed().as_secs_f64();

    let mismatches = fast.iter().zip(&slow).filter(|(x, y)| x.0 != y.0).count();
    let rate = |secs: f64| a.queries as f64 / secs.max(1e-12);
    println!("points {}", net.len());
    println!(
        "{} {:.3}s",
        if a.net.is_some() { "load" } else { "build" },
        setup
    );
    println!("index  {:.0} queries/s", rate(fast_time));
    println!("linear {:.0} queries/s", rate(slow_time));
    println!("speedup {:.1}x", slow_time / fast_time.max(1e-12));
    println!("mismatches {mismatches} of {}", a.queries);
    if mismatches > 0 {
        return Err(so3round::Error::Integrity(format!(
            "{mismatches} index answers differ from the linear scan"
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
