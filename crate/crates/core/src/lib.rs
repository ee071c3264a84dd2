//! Receding-horizon grid planning with Cell A*, plus the baselines it is
//! compared against and a small benchmark harness.
//!
//! Every kernel is generic over the scalar type ([`scalar::Real`], implemented
//! for `f32` and `f64`). The aliases below fix it to `f64`, which is what the
//! harness and the command-line tool use.
//!
//! ```
//! use cellplan::{plan, Params, Point, World, WorldConfig};
//!
//! let mut world = World::from_grid(20, 20, vec![false; 400], WorldConfig::default()).unwrap();
//! let goal = Point::planar(15.0, 12.0);
//! let run = plan(&mut world, &Point::planar(1.0, 1.0), &goal, &Params::with_gridsize(1.0), None).unwrap();
//! assert_eq!(run.metrics.outcome, cellplan::Outcome::Success);
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod cell_astar;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod oracle;
pub mod run;
pub mod scalar;
pub mod world;

pub use cell_astar::ackermann::{plan_ackermann, AckermannState};
pub use cell_astar::{plan, PlanError};
pub use error::{BenchError, FormatError, ParamError};
pub use run::{Outcome, RunMetrics, StepMode, StepRecord};
pub use world::{KnowledgeMode, WorldConfig};

pub type Point = geometry::Point3<f64>;
pub type World = world::OccupancyWorld<f64>;
pub type Params = cell_astar::PlanParams<f64>;
pub type Sampler = cell_astar::ackermann::AckermannSampler<f64>;
pub type HybridParams = baselines::HybridAStarParams<f64>;
pub type Trajectory = run::Trajectory<f64>;
pub type PlanRun = run::PlanRun<f64>;
