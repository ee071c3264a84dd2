//! Scenario files: TOML with a versioned schema id, unknown keys rejected.
//!
//! One file describes a world, a start, one or more goals and one or more
//! planners; [`ScenarioFile::expand`] turns it into one [`Scenario`] per
//! (goal, planner) pair.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::HybridAStarParams;
use crate::cell_astar::ackermann::AckermannSampler;
use crate::cell_astar::PlanParams;
use crate::error::BenchError;
use crate::fixtures::random_grid;
use crate::geometry::{Aabb, Point3};
use crate::world::{
    load_map_2d, load_obstacles_3d, parse_obstacles_csv, KnowledgeMode, OccupancyWorld, SensorConfig, WorldConfig,
};

pub const SCENARIO_SCHEMA: &str = "cellplan.scenario/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    pub name: String,
    /// Free text; fixture files say which experiment they emulate.
    #[serde(default)]
    pub note: Option<String>,
    pub world: WorldSpec,
    pub task: TaskSpec,
    #[serde(rename = "planner")]
    pub planners: Vec<PlannerSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSpec {
    /// Text map (`#`/`.`), relative to the scenario file.
    #[serde(default)]
    pub map: Option<PathBuf>,
    /// Obstacle point CSV (`x,y,z`), relative to the scenario file.
    #[serde(default)]
    pub obstacles: Option<PathBuf>,
    /// Seeded random grid; start and goal cells are kept free.
    #[serde(default)]
    pub generated: Option<GeneratedGrid>,
    #[serde(default = "one")]
    pub resolution: f64,
    #[serde(default)]
    pub inflation: f64,
    #[serde(default = "fully_known")]
    pub knowledge: KnowledgeMode,
    /// Required in semi-known mode.
    #[serde(default)]
    pub sensor_range: Option<f64>,
    /// Arena corners for obstacle-point worlds.
    #[serde(default)]
    pub bounds: Option<[[f64; 3]; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedGrid {
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    /// `[x, y]` or `[x, y, z]`, meters.
    pub start: Vec<f64>,
    pub goals: Vec<Vec<f64>>,
    /// Initial heading for car-like planners, degrees from the x-axis.
    #[serde(default)]
    pub heading_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    CellAstar,
    CellAstarCar,
    HybridAstar,
    DstarLite,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::CellAstar => "cell-astar",
            PlannerKind::CellAstarCar => "cell-astar-car",
            PlannerKind::HybridAstar => "hybrid-astar",
            PlannerKind::DstarLite => "dstar-lite",
        }
    }
}

/// Edge costs D* Lite accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostKind {
    #[default]
    F64,
    /// `a + b sqrt(2)` with integer counts, compared exactly.
    Exact,
}

/// Which planner to run and its parameter blocks. `cell` is required by
/// both Cell A* kinds, `car` by the car-like one, `hybrid` by Hybrid A*.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSpec {
    pub kind: PlannerKind,
    /// Row label in reports; defaults to the kind.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub cell: Option<PlanParams<f64>>,
    #[serde(default)]
    pub car: Option<AckermannSampler<f64>>,
    #[serde(default)]
    pub hybrid: Option<HybridAStarParams<f64>>,
    #[serde(default)]
    pub cost: CostKind,
}

impl PlannerSpec {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.kind.as_str())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let need = |present: bool, field: &'static str| {
            if present {
                Ok(())
            } else {
                Err(BenchError::Schema {
                    field: format!("planner.{field}"),
                    reason: format!("required by kind `{}`", self.kind.as_str()),
                })
            }
        };
        match self.kind {
            PlannerKind::CellAstar => need(self.cell.is_some(), "cell")?,
            PlannerKind::CellAstarCar => {
                need(self.cell.is_some(), "cell")?;
                need(self.car.is_some(), "car")?;
            }
            PlannerKind::HybridAstar => need(self.hybrid.is_some(), "hybrid")?,
            PlannerKind::DstarLite => {}
        }
        if let Some(p) = &self.cell {
            p.validate()?;
        }
        if let Some(s) = &self.car {
            s.validate()?;
        }
        if let Some(h) = &self.hybrid {
            h.validate()?;
        }
        Ok(())
    }
}

/// One run: a world, a start, a goal and a planner.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub world: WorldSpec,
    /// Directory relative paths in `world` are resolved against.
    pub base_dir: PathBuf,
    pub start: Point3<f64>,
    pub heading: f64,
    pub goal: Point3<f64>,
    pub goal_index: usize,
    pub planner: PlannerSpec,
}

fn one() -> f64 {
    1.0
}

fn fully_known() -> KnowledgeMode {
    KnowledgeMode::FullyKnown
}

fn point(v: &[f64], field: &str) -> Result<Point3<f64>, BenchError> {
    let bad = |reason: &str| BenchError::Schema {
        field: field.to_string(),
        reason: reason.to_string(),
    };
    let p = match v {
        [x, y] => Point3::planar(*x, *y),
        [x, y, z] => Point3::new(*x, *y, *z),
        _ => return Err(bad("expected 2 or 3 coordinates")),
    };
    if !p.is_finite() {
        return Err(bad("coordinates must be finite"));
    }
    Ok(p)
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, BenchError> {
        // Check the schema id first so a version mismatch is reported as such
        // rather than as whatever field changed between versions.
        let raw: toml::Table = toml::from_str(text)?;
        match raw.get("schema").and_then(|v| v.as_str()) {
            Some(SCENARIO_SCHEMA) => {}
            Some(other) => {
                return Err(BenchError::Schema {
                    field: "schema".into(),
                    reason: format!("expected `{SCENARIO_SCHEMA}`, found `{other}`"),
                })
            }
            None => {
                return Err(BenchError::Schema {
                    field: "schema".into(),
                    reason: format!("missing; expected `{SCENARIO_SCHEMA}`"),
                })
            }
        }
        let file: ScenarioFile = toml::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let file = Self::parse(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((file, base))
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let schema = |field: &str, reason: &str| BenchError::Schema {
            field: field.to_string(),
            reason: reason.to_string(),
        };
        let w = &self.world;
        let sources = [w.map.is_some(), w.obstacles.is_some(), w.generated.is_some()];
        if sources.iter().filter(|&&b| b).count() != 1 {
            return Err(schema(
                "world",
                "exactly one of `map`, `obstacles`, `generated` is required",
            ));
        }
        if !(w.resolution > 0.0 && w.resolution.is_finite()) {
            return Err(schema("world.resolution", "must be positive"));
        }
        if !(w.inflation >= 0.0 && w.inflation.is_finite()) {
            return Err(schema("world.inflation", "must be non-negative"));
        }
        if w.knowledge == KnowledgeMode::SemiKnown {
            match w.sensor_range {
                Some(r) if r > 0.0 && r.is_finite() => {}
                _ => {
                    return Err(schema(
                        "world.sensor_range",
                        "a positive range is required in semi-known mode",
                    ))
                }
            }
        }
        if let Some(g) = &w.generated {
            if g.width == 0 || g.height == 0 {
                return Err(schema("world.generated", "width and height must be positive"));
            }
            if !(0.0..=1.0).contains(&g.density) {
                return Err(schema("world.generated.density", "must lie in [0, 1]"));
            }
        }
        point(&self.task.start, "task.start")?;
        if self.task.goals.is_empty() {
            return Err(schema("task.goals", "at least one goal is required"));
        }
        for g in &self.task.goals {
            point(g, "task.goals")?;
        }
        if self.planners.is_empty() {
            return Err(schema("planner", "at least one planner is required"));
        }
        for p in &self.planners {
            p.validate()?;
        }
        Ok(())
    }

    /// One scenario per (goal, planner), goals outermost.
    pub fn expand(&self, base_dir: &Path) -> Result<Vec<Scenario>, BenchError> {
        let start = point(&self.task.start, "task.start")?;
        let mut out = Vec::new();
        for (goal_index, g) in self.task.goals.iter().enumerate() {
            let goal = point(g, "task.goals")?;
            for planner in &self.planners {
                out.push(Scenario {
                    name: self.name.clone(),
                    world: self.world.clone(),
                    base_dir: base_dir.to_path_buf(),
                    start,
                    heading: self.task.heading_deg.to_radians(),
                    goal,
                    goal_index,
                    planner: planner.clone(),
                });
            }
        }
        Ok(out)
    }
}

impl Scenario {
    /// Builds a fresh world for this run.
    pub fn build_world(&self) -> Result<OccupancyWorld<f64>, BenchError> {
        let w = &self.world;
        let config = WorldConfig {
            resolution: w.resolution,
            inflation_radius: w.inflation,
            mode: w.knowledge,
            bounds: w
                .bounds
                .map(|[a, b]| Aabb::new(Point3::new(a[0], a[1], a[2]), Point3::new(b[0], b[1], b[2]))),
        };
        let world = if let Some(rel) = &w.map {
            let path = self.base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))?;
            load_map_2d(&text, config).map_err(|e| BenchError::Format {
                path: path.clone(),
                source: e,
            })?
        } else if let Some(rel) = &w.obstacles {
            let path = self.base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))?;
            let records = parse_obstacles_csv(&text).map_err(|e| BenchError::Format {
                path: path.clone(),
                source: e,
            })?;
            load_obstacles_3d(&records, config).map_err(|e| BenchError::Format { path, source: e })?
        } else {
            let g = w.generated.expect("validated world source");
            let cell = |p: &Point3<f64>| {
                let c = |v: f64, n: usize| ((v / w.resolution).round().max(0.0) as usize).min(n - 1);
                (c(p.x, g.width), c(p.y, g.height))
            };
            let cells = random_grid(
                g.width,
                g.height,
                g.density,
                g.seed,
                &[cell(&self.start), cell(&self.goal)],
            );
            OccupancyWorld::from_grid(g.width, g.height, cells, config)?
        };
        Ok(world)
    }

    pub fn sensor(&self) -> Result<Option<SensorConfig<f64>>, BenchError> {
        match self.world.knowledge {
            KnowledgeMode::FullyKnown => Ok(None),
            KnowledgeMode::SemiKnown => {
                let range = self.world.sensor_range.unwrap_or(0.0);
                Ok(Some(SensorConfig::new(range)?))
            }
        }
    }
}

/// Loads every `*.toml` in `dir`, sorted by file name, and expands them.
pub fn load_suite(dir: &Path) -> Result<Vec<Scenario>, BenchError> {
    let entries = std::fs::read_dir(dir).map_err(|e| BenchError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| BenchError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "toml") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(BenchError::EmptySuite(dir.to_path_buf()));
    }
    let mut out = Vec::new();
    for f in files {
        let (file, base) = ScenarioFile::load(&f)?;
        out.extend(file.expand(&base)?);
    }
    Ok(out)
}
