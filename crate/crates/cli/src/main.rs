//! `cellplan`: run scenarios, benchmark suites and plot results.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a planner run that ended
//! Failed, Timeout or Unreachable.

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cellplan::bench::{
    compare, export_run, load_suite, read_trajectory_csv, run_scenario, CompareOptions, Scenario, ScenarioFile,
};
use cellplan::geometry::Point3;
use cellplan::run::{Outcome, RunMetrics, Trajectory};
use cellplan::world::{load_map_2d, load_obstacles_3d, parse_obstacles_csv, KnowledgeMode, SensorConfig, WorldConfig};

use plot::{render_svg, Layer, PlotInput, PlotSpec};

#[derive(Debug, Parser)]
#[command(
    name = "cellplan",
    version,
    about = "Receding-horizon Cell A* planning and baselines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the planners of one scenario file and export each run.
    Plan(PlanArgs),
    /// Run every scenario in a directory and write a comparison table.
    Bench(BenchArgs),
    /// Render a map and a trajectory as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct OutDir {
    /// Output directory.
    #[arg(long, short, env = "CELLPLAN_OUT", default_value = "out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PlanArgs {
    scenario: PathBuf,
    #[command(flatten)]
    out: OutDir,
    /// Only this goal (0-based index into `task.goals`).
    #[arg(long)]
    goal_index: Option<usize>,
    /// Only planners with this label or kind.
    #[arg(long)]
    planner: Vec<String>,
    #[command(flatten)]
    overrides: Overrides,
}

/// Replace Cell A* parameters from the scenario file.
#[derive(Debug, Args, Default)]
struct Overrides {
    #[arg(long)]
    w1: Option<f64>,
    #[arg(long)]
    w2: Option<f64>,
    #[arg(long)]
    cellsize_min: Option<usize>,
    #[arg(long)]
    cellsize_max: Option<usize>,
    #[arg(long)]
    gridsize: Option<f64>,
    #[arg(long)]
    bigstep: Option<f64>,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) {
        let Some(c) = s.planner.cell.as_mut() else {
            return;
        };
        if let Some(v) = self.w1 {
            c.w1 = v;
        }
        if let Some(v) = self.w2 {
            c.w2 = v;
        }
        if let Some(v) = self.cellsize_min {
            c.cellsize_min = v;
        }
        if let Some(v) = self.cellsize_max {
            c.cellsize_max = v;
        }
        if let Some(v) = self.gridsize {
            c.gridsize = v;
        }
        if let Some(v) = self.bigstep {
            c.bigstep = v;
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    suite: PathBuf,
    #[command(flatten)]
    out: OutDir,
    /// Only planners with this label or kind; repeatable.
    #[arg(long)]
    planner: Vec<String>,
    /// Time each run this many times and keep the fastest.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Trajectory CSV (`t,x,y,z`); without it only the map is drawn.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Text map (`.map`) or obstacle point CSV (`.csv`).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    map: Option<PathBuf>,
    /// Take the world, start and goal from a scenario file instead.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Goal of the scenario file to mark.
    #[arg(long, default_value_t = 0, requires = "scenario")]
    goal_index: usize,
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    #[arg(long, default_value_t = 0.0)]
    inflation: f64,
    /// Goal marker as `x,y` or `x,y,z`.
    #[arg(long, value_parser = parse_point)]
    goal: Option<Point3<f64>>,
    /// Replay a sensor of this range along the trajectory to show what was revealed.
    #[arg(long)]
    sensor_range: Option<f64>,
    /// Metrics JSON whose steps give the search-cell overlays.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Draw search cells for this many leading steps.
    #[arg(long, default_value_t = 0)]
    cells: usize,
    /// Pixels per meter.
    #[arg(long, default_value_t = 10.0)]
    scale: f64,
    #[arg(long, default_value_t = 10.0)]
    margin: f64,
    #[arg(long, requires = "height")]
    width: Option<u32>,
    #[arg(long, requires = "width")]
    height: Option<u32>,
    /// Layers to draw; defaults to everything except cells (added by --cells).
    #[arg(long, value_enum, value_delimiter = ',')]
    layers: Vec<Layer>,
    /// Output SVG file.
    #[arg(long, short)]
    out: PathBuf,
}

fn parse_point(s: &str) -> Result<Point3<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        [x, y] => Ok(Point3::planar(*x, *y)),
        [x, y, z] => Ok(Point3::new(*x, *y, *z)),
        _ => Err("expected x,y or x,y,z".into()),
    }
}

fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

fn run_name(s: &Scenario) -> String {
    format!("{}-{}-g{}", slug(&s.name), slug(s.planner.label()), s.goal_index)
}

fn cmd_plan(args: &PlanArgs) -> Result<u8> {
    let (file, base) = ScenarioFile::load(&args.scenario)?;
    let mut scenarios = file.expand(&base)?;
    scenarios.retain(|s| {
        args.goal_index.is_none_or(|g| g == s.goal_index)
            && (args.planner.is_empty()
                || args
                    .planner
                    .iter()
                    .any(|p| p == s.planner.label() || p == s.planner.kind.as_str()))
    });
    if scenarios.is_empty() {
        bail!(
            "no (goal, planner) pair of {} matches the filters",
            args.scenario.display()
        );
    }
    let mut code = 0;
    for mut s in scenarios {
        args.overrides.apply(&mut s);
        let run = run_scenario(&s).with_context(|| format!("{} ({})", args.scenario.display(), run_name(&s)))?;
        let name = run_name(&s);
        let paths = export_run(&run.metrics, &run.trajectory, &args.out.out, &name)?;
        let m = &run.metrics;
        println!(
            "{name}: {} length {:.2} m, {} steps, {} nodes (max {}/step), {:.4} s -> {}{}",
            m.outcome,
            m.path_length,
            m.nodes_evaluated_per_step.len(),
            m.nodes_evaluated_total,
            m.max_nodes_per_step(),
            m.wall_time,
            paths.trajectory.display(),
            m.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default()
        );
        if m.outcome != Outcome::Success {
            code = 2;
        }
    }
    Ok(code)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8> {
    let scenarios = load_suite(&args.suite)?;
    let options = CompareOptions {
        planners: args.planner.clone(),
        repeats: args.repeats,
    };
    let table = compare(&scenarios, &options);
    if table.is_empty() {
        bail!("no scenario in {} matches the planner filter", args.suite.display());
    }
    let dir = &args.out.out;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join("comparison.csv");
    std::fs::write(&csv_path, table.to_csv()?).with_context(|| format!("writing {}", csv_path.display()))?;
    let text = table.to_text();
    let txt_path = dir.join("comparison.txt");
    std::fs::write(&txt_path, &text).with_context(|| format!("writing {}", txt_path.display()))?;
    print!("{text}");
    let errors = table.error_count();
    if errors > 0 {
        eprintln!("error: {errors} run(s) could not be completed; see the detail column");
        return Ok(1);
    }
    Ok(0)
}

fn world_from_map(path: &Path, args: &PlotArgs) -> Result<cellplan::world::OccupancyWorld<f64>> {
    let mode = if args.sensor_range.is_some() {
        KnowledgeMode::SemiKnown
    } else {
        KnowledgeMode::FullyKnown
    };
    let config = WorldConfig {
        resolution: args.resolution,
        inflation_radius: args.inflation,
        mode,
        bounds: None,
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let world = if path.extension().is_some_and(|e| e == "csv") {
        let points = parse_obstacles_csv(&text).with_context(|| path.display().to_string())?;
        load_obstacles_3d(&points, config).with_context(|| path.display().to_string())?
    } else {
        load_map_2d(&text, config).with_context(|| path.display().to_string())?
    };
    Ok(world)
}

fn cmd_plot(args: &PlotArgs) -> Result<u8> {
    let trajectory = match &args.trajectory {
        Some(p) => read_trajectory_csv(p)?,
        None => Trajectory::new(),
    };
    let (mut world, mut start, mut goal, mut sensor) = (None, None, args.goal, None);
    if let Some(path) = &args.scenario {
        let (file, base) = ScenarioFile::load(path)?;
        let s = file
            .expand(&base)?
            .into_iter()
            .find(|s| s.goal_index == args.goal_index)
            .with_context(|| format!("{} has no goal {}", path.display(), args.goal_index))?;
        world = Some(s.build_world()?);
        start = Some(s.start);
        goal = goal.or(Some(s.goal));
        sensor = s.sensor()?;
    } else if let Some(path) = &args.map {
        world = Some(world_from_map(path, args)?);
    }
    let mut world = world.expect("clap requires --map or --scenario");
    if let Some(r) = args.sensor_range {
        sensor = Some(SensorConfig::new(r)?);
    }
    if let (Some(sensor), KnowledgeMode::SemiKnown) = (&sensor, world.mode()) {
        for p in &trajectory.points {
            world.reveal(p, sensor);
        }
    }
    let start = start.or_else(|| trajectory.points.first().copied());
    let steps = match &args.metrics {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let m: RunMetrics = serde_json::from_str(&text).with_context(|| p.display().to_string())?;
            m.steps
        }
        None => Vec::new(),
    };
    let mut spec = PlotSpec {
        scale: args.scale,
        margin: args.margin,
        canvas: args.width.zip(args.height),
        cell_steps: args.cells,
        ..PlotSpec::default()
    };
    if !args.layers.is_empty() {
        spec.layers = args.layers.iter().copied().collect();
    } else if args.cells > 0 {
        spec.layers.insert(Layer::Cells);
    }
    let input = PlotInput {
        world: &world,
        trajectory: &trajectory,
        start,
        goal,
        steps: &steps,
    };
    let svg = render_svg(&input, &spec)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
