use clap::{Args, Parser, Subcommand};
use cspace::bench::{
    export_cspace_image, render_collision_table, render_planning_table, render_sweep_table,
    run_collision_benchmark, run_obstacle_sweep, run_planning_benchmark, write_collision_csvs,
    write_planning_csvs, write_sweep_csvs, BenchError, CheckerKind, ScenarioConfig,
};
use cspace::fastron::{train, Dataset, FastronModel, TrainParams};
use cspace::geometry::{grid_ground_truth, in_collision, load_scene};
use cspace::kernels::{KernelKind, KernelSpec};
use cspace::kinematics::{load_robot, Configuration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "cspace", version, about = "Proxy collision checking benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV / image / model files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the config's robot file.
    #[arg(long)]
    robot: Option<PathBuf>,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Moving-obstacle correctness benchmark; writes metrics.csv.
    CollisionBench(RunArgs),
    /// Query-time curve over obstacle counts; writes sweep.csv.
    ObstacleSweep(RunArgs),
    /// Planner comparison with verify-and-repair; writes planning.csv.
    PlanningBench(RunArgs),
    /// Grid-truth C-space image with model overlay; writes cspace.ppm.
    CspaceImage(RunArgs),
    /// Train the configured proxy models and save them to the output dir.
    Train(RunArgs),
    /// Query a saved model (and the oracle) at one configuration.
    Query(QueryArgs),
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Joint values, comma-separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    joints: Vec<f64>,
    /// Model file; defaults to `<out>/model_fastron_fk.json`.
    #[arg(long)]
    model: Option<PathBuf>,
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig, BenchError> {
    let mut config = ScenarioConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(robot) = &args.robot {
        config.robot = robot.clone();
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    config.validate()?;
    std::fs::create_dir_all(&args.out)?;
    Ok(config)
}

fn proxy_spec(kind: CheckerKind, robot: &cspace::kinematics::RobotModel) -> Option<KernelSpec> {
    let kernel = match kind {
        CheckerKind::FastronFk => KernelKind::FkWorkspace,
        CheckerKind::FastronRq => KernelKind::RqJointSpace,
        CheckerKind::OracleGjk => return None,
    };
    Some(KernelSpec::new(kernel, KernelSpec::default_gamma(kernel, robot)).expect("gamma > 0"))
}

fn train_models(config: &ScenarioConfig) -> Result<Vec<(CheckerKind, FastronModel)>, BenchError> {
    let robot = Arc::new(load_robot(&config.robot)?);
    let scene = load_scene(&config.scene)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cspace::derive_seed(config.seed, "train-cli", 0));
    let mut configs = Vec::new();
    let mut labels = Vec::new();
    while configs.len() < config.dataset_size {
        let q = robot.sample_uniform(&mut rng);
        if configs.contains(&q) {
            continue;
        }
        labels.push(in_collision(&robot, &q, &scene)?);
        configs.push(q);
    }
    let dataset = Dataset::new(configs, labels)?;
    let params = TrainParams::from(config.train);
    let mut out = Vec::new();
    for &kind in &config.checkers {
        let Some(spec) = proxy_spec(kind, &robot) else { continue };
        let report = train(&dataset, &params, spec, &robot, None)?;
        if !report.converged {
            eprintln!("note: {kind} training hit the iteration cap without full convergence");
        }
        out.push((kind, report.model));
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<(), BenchError> {
    match cmd {
        Cmd::CollisionBench(args) => {
            let config = load_config(&args)?;
            let report = run_collision_benchmark(&config)?;
            write_collision_csvs(&report, &args.out)?;
            print!("{}", render_collision_table(&report));
        }
        Cmd::ObstacleSweep(args) => {
            let config = load_config(&args)?;
            let counts: Vec<usize> = if config.obstacle_counts.is_empty() {
                vec![1, 5, 10, 25, 50]
            } else {
                config.obstacle_counts.clone()
            };
            let report = run_obstacle_sweep(&config, &counts)?;
            write_sweep_csvs(&report, &args.out)?;
            print!("{}", render_sweep_table(&report));
        }
        Cmd::PlanningBench(args) => {
            let config = load_config(&args)?;
            let report = run_planning_benchmark(&config)?;
            write_planning_csvs(&report, &args.out)?;
            print!("{}", render_planning_table(&report));
        }
        Cmd::CspaceImage(args) => {
            let config = load_config(&args)?;
            let robot = load_robot(&config.robot)?;
            let scene = load_scene(&config.scene)?;
            let resolution = config
                .grid_resolution
                .clone()
                .unwrap_or_else(|| vec![100; robot.dof()]);
            let grid = grid_ground_truth(&robot, &scene, &resolution)?;
            let models = train_models(&config)?;
            let model = models.first().map(|(_, m)| m);
            let path = args.out.join("cspace.ppm");
            let stats = export_cspace_image(&grid, model, &path)?;
            println!(
                "wrote {} ({}x{}, mismatch fraction {:.4}, {} support pixels)",
                path.display(),
                stats.width,
                stats.height,
                stats.mismatch_fraction,
                stats.support_pixels
            );
        }
        Cmd::Train(args) => {
            let config = load_config(&args)?;
            for (kind, model) in train_models(&config)? {
                let path = args.out.join(format!("model_{kind}.json"));
                model.save(&path)?;
                println!("wrote {} (|S| = {})", path.display(), model.support_count());
            }
        }
        Cmd::Query(args) => {
            let config = load_config(&args.run)?;
            let robot = Arc::new(load_robot(&config.robot)?);
            let scene = load_scene(&config.scene)?;
            let model_path = args
                .model
                .unwrap_or_else(|| args.run.out.join("model_fastron_fk.json"));
            let model = FastronModel::load(&model_path, robot.clone())?;
            let q = Configuration(args.joints);
            let (label, score) = model.query(&q)?;
            let truth = in_collision(&robot, &q, &scene)?;
            let name = |l: f64| if l > 0.0 { "in-collision" } else { "free" };
            println!("proxy:  {} (score {score:.6})", name(label));
            println!("oracle: {}", name(truth));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
