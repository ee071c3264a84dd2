use serde::Serialize;

use super::runner::{run_scenario, ScenarioRun};
use super::scenario::Scenario;
use crate::error::BenchError;

/// Which runs to keep and how often to time them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareOptions {
    /// Planner labels or kinds to keep; empty keeps all.
    pub planners: Vec<String>,
    /// Each run is repeated this many times and the fastest time reported.
    /// Everything except the time is deterministic, so the other columns
    /// come from the first repetition.
    pub repeats: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            planners: Vec::new(),
            repeats: 1,
        }
    }
}

impl CompareOptions {
    pub fn keeps(&self, scenario: &Scenario) -> bool {
        self.planners.is_empty()
            || self
                .planners
                .iter()
                .any(|p| p == scenario.planner.label() || p == scenario.planner.kind.as_str())
    }
}

/// One (scenario, goal, planner) run. `outcome` is `error` when the run
/// could not be carried out at all; `detail` then holds the message.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub scenario: String,
    pub planner: String,
    pub goal: String,
    pub time_s: f64,
    pub path_length_m: f64,
    pub path_nodes: usize,
    pub avg_nodes_per_step: f64,
    pub max_nodes_per_step: usize,
    pub total_nodes: usize,
    pub steps: usize,
    pub audit_hits: usize,
    pub outcome: String,
    pub detail: String,
}

fn goal_label(s: &Scenario) -> String {
    let g = s.goal;
    if g.z == 0.0 {
        format!("({}, {})", g.x, g.y)
    } else {
        format!("({}, {}, {})", g.x, g.y, g.z)
    }
}

impl ComparisonRow {
    fn from_run(scenario: &Scenario, run: &ScenarioRun, time_s: f64) -> Self {
        let m = &run.metrics;
        Self {
            scenario: run.scenario.clone(),
            planner: run.planner.clone(),
            goal: goal_label(scenario),
            time_s,
            path_length_m: m.path_length,
            path_nodes: m.path_nodes,
            avg_nodes_per_step: m.average_nodes_per_step(),
            max_nodes_per_step: m.max_nodes_per_step(),
            total_nodes: m.nodes_evaluated_total,
            steps: m.nodes_evaluated_per_step.len(),
            audit_hits: run.audit_hits,
            outcome: m.outcome.as_str().to_string(),
            detail: m.detail.clone().unwrap_or_default(),
        }
    }

    fn from_error(scenario: &Scenario, e: &BenchError) -> Self {
        Self {
            scenario: scenario.name.clone(),
            planner: scenario.planner.label().to_string(),
            goal: goal_label(scenario),
            time_s: 0.0,
            path_length_m: 0.0,
            path_nodes: 0,
            avg_nodes_per_step: 0.0,
            max_nodes_per_step: 0,
            total_nodes: 0,
            steps: 0,
            audit_hits: 0,
            outcome: "error".to_string(),
            detail: e.to_string(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.outcome == "error"
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

/// Runs every kept scenario in order. A run that errors becomes an `error`
/// row; the table is always complete.
pub fn compare(scenarios: &[Scenario], options: &CompareOptions) -> ComparisonTable {
    let mut rows = Vec::new();
    for s in scenarios.iter().filter(|s| options.keeps(s)) {
        let first = match run_scenario(s) {
            Ok(run) => run,
            Err(e) => {
                rows.push(ComparisonRow::from_error(s, &e));
                continue;
            }
        };
        let mut best = first.metrics.wall_time;
        for _ in 1..options.repeats.max(1) {
            if let Ok(again) = run_scenario(s) {
                best = best.min(again.metrics.wall_time);
            }
        }
        rows.push(ComparisonRow::from_run(s, &first, best));
    }
    ComparisonTable { rows }
}

const HEADERS: [&str; 13] = [
    "scenario",
    "planner",
    "goal",
    "time_s",
    "path_length_m",
    "path_nodes",
    "avg_nodes_per_step",
    "max_nodes_per_step",
    "total_nodes",
    "steps",
    "audit_hits",
    "outcome",
    "detail",
];

impl ComparisonTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn error_count(&self) -> usize {
        self.rows.iter().filter(|r| r.is_error()).count()
    }

    /// Sum of `time_s` over the rows of one planner.
    pub fn total_time(&self, planner: &str) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.planner == planner)
            .map(|r| r.time_s)
            .sum()
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(HEADERS)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Mismatch(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned plain-text table; numbers right-aligned, the rest left.
    pub fn to_text(&self) -> String {
        let cells: Vec<[String; 13]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.scenario.clone(),
                    r.planner.clone(),
                    r.goal.clone(),
                    format!("{:.4}", r.time_s),
                    format!("{:.2}", r.path_length_m),
                    r.path_nodes.to_string(),
                    format!("{:.1}", r.avg_nodes_per_step),
                    r.max_nodes_per_step.to_string(),
                    r.total_nodes.to_string(),
                    r.steps.to_string(),
                    r.audit_hits.to_string(),
                    r.outcome.clone(),
                    r.detail.clone(),
                ]
            })
            .collect();
        let mut width: Vec<usize> = HEADERS.iter().map(|h| h.len()).collect();
        for row in &cells {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let numeric = |i: usize| (3..=10).contains(&i);
        let line = |row: &[String]| {
            let parts: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if numeric(i) {
                        format!("{c:>w$}", w = width[i])
                    } else {
                        format!("{c:<w$}", w = width[i])
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let header: Vec<String> = HEADERS.iter().map(|h| h.to_string()).collect();
        let mut out = line(&header);
        out.push('\n');
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}
