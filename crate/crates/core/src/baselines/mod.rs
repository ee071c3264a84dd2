//! Comparison planners: budget-limited local Hybrid A* and D* Lite, plus a
//! Dijkstra oracle.

pub mod cost;
pub mod dstar;
pub mod grid;
pub mod hybrid;

pub use cost::{Ext, OctileCost, PathCost};
pub use dstar::{dstar_lite_plan, DStarLite, GridPlan};
pub use grid::{dijkstra_oracle, octile, Cell, GridGraph};
pub use hybrid::{hybrid_astar_plan, HybridAStarParams, Motion};
