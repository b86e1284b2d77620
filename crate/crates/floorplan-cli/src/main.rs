//! Command-line front end: pack, sa, train, compare, render.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use floorplan_core::anneal::{auto_temperature, sa_run, SAConfig};
use floorplan_core::cost;
use floorplan_core::io::{
    apply_fixed, gen_lattice, parse_yal, render_svg, write_results, FixedConfig, Method, RunRecord,
};
use floorplan_core::model::{random_sequence_pair, ProblemInstance, SequencePair};
use floorplan_core::packer::pack;
use floorplan_core::rl::{
    instance_fingerprint, rl_init, train_from, GlobalRewardSign, PolicyNet, RLConfig, SavedNet,
};

#[derive(Parser)]
#[command(name = "floorplan", about = "Sequence-pair floorplacement with SA and an RL initializer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack one sequence pair and report its cost
    Pack(PackArgs),
    /// Simulated annealing from a random initialization
    Sa(SaArgs),
    /// Train the RL initializer
    Train(TrainArgs),
    /// Paired RL-init vs random-init comparison
    Compare(CompareArgs),
    /// Render a packing to SVG
    Render(PackArgs),
}

#[derive(Args, Clone, Default)]
struct InstanceArgs {
    /// Lattice side length (n^2 unit blocks)
    #[arg(long, conflicts_with = "yal")]
    lattice: Option<usize>,
    /// YAL benchmark file
    #[arg(long)]
    yal: Option<PathBuf>,
    /// Fixed-block configuration (JSON [{"name", "x", "y"}])
    #[arg(long)]
    fixed: Option<PathBuf>,
    /// Experiment spec JSON; explicit flags override its fields
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SaFlags {
    #[arg(long, default_value_t = 5000)]
    sa_steps: usize,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_min: Option<f64>,
    /// Derive temperatures from a sampled move-delta distribution
    /// (the default when --t-max/--t-min are not given)
    #[arg(long)]
    auto_temp: bool,
}

#[derive(Args)]
struct PackArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Load the sequence pair from JSON instead of sampling it
    #[arg(long)]
    sp_file: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SaArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sa: SaFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sa: SaFlags,
    #[arg(long, default_value_t = 10)]
    epochs: usize,
    #[arg(long, default_value_t = 200)]
    r_steps: usize,
    #[arg(long, default_value_t = 5000)]
    s_steps: usize,
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    #[arg(long, default_value_t = 0.95)]
    lambda: f64,
    #[arg(long, default_value_t = 0.2)]
    clip: f64,
    #[arg(long, default_value_t = 3e-4)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_sign, default_value = "improvement")]
    global_reward_sign: GlobalRewardSign,
    /// Continue training a previously saved network
    #[arg(long)]
    resume: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    sa: SaFlags,
    /// Trained network from `floorplan train`
    #[arg(long)]
    network: PathBuf,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 200)]
    r_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Act greedily instead of sampling during evaluation rollouts
    #[arg(long)]
    greedy_eval: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn parse_sign(s: &str) -> std::result::Result<GlobalRewardSign, String> {
    match s {
        "improvement" => Ok(GlobalRewardSign::Improvement),
        "literal" => Ok(GlobalRewardSign::Literal),
        other => Err(format!("expected 'improvement' or 'literal', got '{other}'")),
    }
}

/// On-disk experiment description; every field optional so specs can stay
/// minimal. Explicit CLI flags win over spec fields.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct ExperimentSpec {
    lattice: Option<usize>,
    yal: Option<PathBuf>,
    fixed: Option<PathBuf>,
    sa_steps: Option<usize>,
    t_max: Option<f64>,
    t_min: Option<f64>,
    rl: Option<RLConfig>,
    runs: Option<usize>,
    out: Option<PathBuf>,
}

fn load_spec(args: &InstanceArgs) -> Result<ExperimentSpec> {
    match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading spec {}", path.display()))?;
            Ok(serde_json::from_str(&text)?)
        }
        None => Ok(ExperimentSpec::default()),
    }
}

fn build_instance(args: &InstanceArgs, spec: &ExperimentSpec) -> Result<ProblemInstance> {
    let lattice = args.lattice.or(spec.lattice);
    let yal = args.yal.clone().or_else(|| spec.yal.clone());
    let mut instance = match (lattice, yal) {
        (Some(n), None) => gen_lattice(n)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading YAL file {}", path.display()))?;
            parse_yal(&text)?
        }
        (Some(_), Some(_)) => bail!("choose one of --lattice and --yal"),
        (None, None) => bail!("an instance is required: --lattice N or --yal PATH"),
    };
    if let Some(path) = args.fixed.clone().or_else(|| spec.fixed.clone()) {
        let cfg = FixedConfig::load(&path)?;
        instance = apply_fixed(&instance, &cfg)?;
    }
    instance.validate()?;
    Ok(instance)
}

fn resolve_sa(
    flags: &SaFlags,
    spec: &ExperimentSpec,
    instance: &ProblemInstance,
    seed: u64,
) -> Result<SAConfig> {
    let steps = spec.sa_steps.unwrap_or(flags.sa_steps);
    let t_max = flags.t_max.or(spec.t_max);
    let t_min = flags.t_min.or(spec.t_min);
    let (t_max, t_min) = match (t_max, t_min) {
        (Some(hi), Some(lo)) if !flags.auto_temp => (hi, lo),
        _ => {
            let init = random_sequence_pair(instance, seed);
            let (hi, lo, warned) = auto_temperature(instance, &init, 0.5, 1e-3, 200, seed)?;
            if warned {
                eprintln!("warning: all sampled moves were cost-neutral, using fallback temperatures");
            }
            (hi, lo)
        }
    };
    Ok(SAConfig::new(steps, t_max, t_min, seed))
}

/// Lattice costs are wirelength in um; YAL instances are area-weighted
/// and reported in mm^2.
fn report_unit(instance: &ProblemInstance) -> (&'static str, f64) {
    if instance.weights.w_area > 0.0 {
        ("mm^2", 1e-6)
    } else {
        ("um", 1.0)
    }
}

fn load_sp(path: &Path) -> Result<SequencePair> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading sequence pair {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn cmd_pack(args: &PackArgs, render_only: bool) -> Result<()> {
    let spec = load_spec(&args.instance)?;
    let instance = build_instance(&args.instance, &spec)?;
    let sp = match &args.sp_file {
        Some(path) => load_sp(path)?,
        None => random_sequence_pair(&instance, args.seed),
    };
    let packing = pack(&instance, &sp)?;
    let breakdown = cost::cost(&instance, &packing)?;
    let out = spec.out.clone().unwrap_or_else(|| args.out.clone());
    std::fs::create_dir_all(&out)?;
    let svg_path = out.join(format!("{}_packing.svg", instance.name));
    render_svg(&instance, &packing, &breakdown, &svg_path)?;
    if !render_only {
        let (unit, scale) = report_unit(&instance);
        println!("instance: {}", instance.name);
        println!("area: {:.3} um^2", breakdown.area);
        println!("wirelength: {:.3} um", breakdown.wirelength);
        println!("total cost: {:.6} {unit}", breakdown.total * scale);
    }
    println!("wrote {}", svg_path.display());
    Ok(())
}

fn cmd_sa(args: &SaArgs) -> Result<()> {
    let spec = load_spec(&args.instance)?;
    let instance = build_instance(&args.instance, &spec)?;
    let sa_cfg = resolve_sa(&args.sa, &spec, &instance, args.seed)?;
    let init = random_sequence_pair(&instance, args.seed);
    let started = Instant::now();
    let result = sa_run(&instance, &init, &sa_cfg)?;
    let seconds = started.elapsed().as_secs_f64();

    let out = spec.out.clone().unwrap_or_else(|| args.out.clone());
    std::fs::create_dir_all(&out)?;
    let record = RunRecord {
        instance: instance.name.clone(),
        method: Method::RandomInit,
        seed: args.seed,
        sa_steps: sa_cfg.steps,
        final_cost: result.best_cost,
        trace: result.trace.iter().map(|&(s, _, b)| (s, b)).collect(),
        seconds,
    };
    write_results(&[record], out.join("sa_run"))?;

    let mut trace_csv = String::from("step,current,best\n");
    for (step, current, best) in &result.trace {
        trace_csv.push_str(&format!("{step},{current},{best}\n"));
    }
    std::fs::write(out.join("sa_trace.csv"), trace_csv)?;

    let packing = pack(&instance, &result.best)?;
    render_svg(&instance, &packing, &result.best_cost, &out.join(format!("{}_sa.svg", instance.name)))?;

    let (unit, scale) = report_unit(&instance);
    println!(
        "SA finished: {} steps, best cost {:.6} {unit} ({} accepted moves, {seconds:.2}s)",
        sa_cfg.steps,
        result.best_cost.total * scale,
        result.accepted_moves
    );
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let spec = load_spec(&args.instance)?;
    let instance = build_instance(&args.instance, &spec)?;
    let sa_cfg = resolve_sa(&args.sa, &spec, &instance, args.seed)?;

    let mut rl_cfg = spec.rl.clone().unwrap_or_default();
    rl_cfg.epochs = args.epochs;
    rl_cfg.r_steps = args.r_steps;
    rl_cfg.s_steps = args.s_steps;
    rl_cfg.gamma = args.gamma;
    rl_cfg.gae_lambda = args.lambda;
    rl_cfg.clip_eps = args.clip;
    rl_cfg.learning_rate = args.lr;
    rl_cfg.seed = args.seed;
    rl_cfg.global_reward_sign = args.global_reward_sign;

    let (net, start_epoch) = match &args.resume {
        Some(path) => {
            let saved = SavedNet::load(path)?;
            saved.check_compatible(&instance)?;
            (saved.net, saved.epochs_trained)
        }
        None => (PolicyNet::new(instance.num_free(), rl_cfg.hidden, rl_cfg.seed), 0),
    };

    let (net, report) = train_from(&instance, net, start_epoch, &rl_cfg, &sa_cfg)?;

    let out = spec.out.clone().unwrap_or_else(|| args.out.clone());
    std::fs::create_dir_all(&out)?;
    let saved = SavedNet {
        n_free: net.n_free,
        fingerprint: instance_fingerprint(&instance),
        net,
        config: serde_json::to_value(&rl_cfg)?,
        epochs_trained: start_epoch + rl_cfg.epochs,
    };
    let net_path = out.join(format!("{}_net.json", instance.name));
    saved.save(&net_path)?;
    let report_path = out.join(format!("{}_train_report.json", instance.name));
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    for rec in &report.epochs {
        println!(
            "epoch {:>3}: init {:.1} -> post-SA {:.1}  r_g {:+.2}  entropy {:.3}  ({:.1}s)",
            rec.epoch, rec.init_cost, rec.post_sa_cost, rec.global_reward, rec.entropy, rec.seconds
        );
    }
    println!("wrote {} and {}", net_path.display(), report_path.display());
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let spec = load_spec(&args.instance)?;
    let instance = build_instance(&args.instance, &spec)?;
    let saved = SavedNet::load(&args.network)?;
    saved.check_compatible(&instance)?;
    let runs = spec.runs.unwrap_or(args.runs);
    if runs < 1 {
        bail!("--runs must be >= 1");
    }

    let base_sa = resolve_sa(&args.sa, &spec, &instance, args.seed)?;
    let mut records = Vec::with_capacity(runs * 2);
    let mut sign_count = 0usize;
    for i in 0..runs {
        let run_seed = args.seed.wrapping_add(i as u64);
        // both arms share the SA seed and step budget; the random arm is
        // the learned arm's own reset pair so each pair shares its draw
        let sa_cfg = SAConfig { seed: run_seed.wrapping_mul(2654435761).wrapping_add(17), ..base_sa.clone() };

        let rl_sp = rl_init(&instance, &saved.net, args.r_steps, run_seed, args.greedy_eval)?;
        let started = Instant::now();
        let rl_res = sa_run(&instance, &rl_sp, &sa_cfg)?;
        let rl_secs = started.elapsed().as_secs_f64();

        let rand_sp = rl_init(&instance, &saved.net, 0, run_seed, args.greedy_eval)?;
        let started = Instant::now();
        let rand_res = sa_run(&instance, &rand_sp, &sa_cfg)?;
        let rand_secs = started.elapsed().as_secs_f64();

        if rl_res.best_cost.total < rand_res.best_cost.total {
            sign_count += 1;
        }
        records.push(RunRecord {
            instance: instance.name.clone(),
            method: Method::RlInit,
            seed: run_seed,
            sa_steps: sa_cfg.steps,
            final_cost: rl_res.best_cost,
            trace: rl_res.trace.iter().map(|&(s, _, b)| (s, b)).collect(),
            seconds: rl_secs,
        });
        records.push(RunRecord {
            instance: instance.name.clone(),
            method: Method::RandomInit,
            seed: run_seed,
            sa_steps: sa_cfg.steps,
            final_cost: rand_res.best_cost,
            trace: rand_res.trace.iter().map(|&(s, _, b)| (s, b)).collect(),
            seconds: rand_secs,
        });
    }

    let out = spec.out.clone().unwrap_or_else(|| args.out.clone());
    std::fs::create_dir_all(&out)?;
    write_results(&records, out.join("compare"))?;

    let (unit, scale) = report_unit(&instance);
    let arm = |m: Method| -> Vec<f64> {
        records.iter().filter(|r| r.method == m).map(|r| r.final_cost.total * scale).collect()
    };
    let rl_costs = arm(Method::RlInit);
    let rand_costs = arm(Method::RandomInit);
    let (rl_mean, rl_std) = (mean(&rl_costs), std_dev(&rl_costs));
    let (rand_mean, rand_std) = (mean(&rand_costs), std_dev(&rand_costs));

    // Table-shaped summary: one row per instance with both arms
    let table = format!(
        "instance,unit,runs,rl_init_mean,rl_init_std,random_init_mean,random_init_std,rl_wins\n{},{unit},{runs},{rl_mean},{rl_std},{rand_mean},{rand_std},{sign_count}\n",
        instance.name
    );
    std::fs::write(out.join("table.csv"), table)?;

    println!("paired comparison over {runs} runs ({unit}):");
    println!("  RL init:     mean {rl_mean:.4}  std {rl_std:.4}");
    println!("  random init: mean {rand_mean:.4}  std {rand_std:.4}");
    println!("  RL arm wins {sign_count}/{runs}");
    Ok(())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pack(args) => cmd_pack(args, false),
        Command::Render(args) => cmd_pack(args, true),
        Command::Sa(args) => cmd_sa(args),
        Command::Train(args) => cmd_train(args),
        Command::Compare(args) => cmd_compare(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
