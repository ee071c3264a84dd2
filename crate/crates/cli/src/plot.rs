//! SVG rendering of a world, an executed trajectory and the search cells of
//! the first few steps.
//!
//! Output is a pure function of the inputs: elements are emitted in a fixed
//! order, ids are derived from the panel and element index, and every
//! coordinate is printed with two decimals.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use anyhow::{bail, ensure, Result};
use cellplan::geometry::Point3;
use cellplan::run::{StepRecord, Trajectory};
use cellplan::world::{Dimensionality, OccupancyWorld};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Layer {
    Obstacles,
    Revealed,
    Trajectory,
    Markers,
    Cells,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    /// Pixels per meter.
    pub scale: f64,
    /// Blank border around each panel, pixels.
    pub margin: f64,
    /// Fixed canvas size; derived from the world extent when `None`.
    /// Content outside a fixed canvas is clipped by the viewer.
    pub canvas: Option<(u32, u32)>,
    pub layers: BTreeSet<Layer>,
    /// Search-cell overlays are drawn for this many leading steps.
    pub cell_steps: usize,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            scale: 10.0,
            margin: 10.0,
            canvas: None,
            layers: [Layer::Obstacles, Layer::Revealed, Layer::Trajectory, Layer::Markers]
                .into_iter()
                .collect(),
            cell_steps: 0,
        }
    }
}

impl PlotSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.scale > 0.0 && self.scale.is_finite(),
            "plot scale must be positive"
        );
        ensure!(
            self.margin >= 0.0 && self.margin.is_finite(),
            "plot margin must be non-negative"
        );
        if let Some((w, h)) = self.canvas {
            ensure!(w > 0 && h > 0, "canvas width and height must be positive");
        }
        ensure!(!self.layers.is_empty(), "at least one layer must be drawn");
        Ok(())
    }
}

pub struct PlotInput<'a> {
    pub world: &'a OccupancyWorld<f64>,
    pub trajectory: &'a Trajectory<f64>,
    pub start: Option<Point3<f64>>,
    pub goal: Option<Point3<f64>>,
    pub steps: &'a [StepRecord],
}

/// Which coordinates a panel shows: (horizontal, vertical) axis indices.
#[derive(Clone, Copy)]
struct Panel {
    name: &'static str,
    axes: (usize, usize),
    /// Top edge of the panel on the canvas.
    top: f64,
}

struct Frame {
    min: [f64; 3],
    max: [f64; 3],
    scale: f64,
    margin: f64,
}

impl Frame {
    fn px(&self, panel: &Panel, p: &Point3<f64>) -> (f64, f64) {
        let (u, v) = panel.axes;
        let x = self.margin + (p.axis(u) - self.min[u]) * self.scale;
        // SVG y grows downwards; world y (or z) grows upwards.
        let y = panel.top + self.margin + (self.max[v] - p.axis(v)) * self.scale;
        (x, y)
    }

    fn panel_height(&self, axis: usize) -> f64 {
        (self.max[axis] - self.min[axis]) * self.scale + 2.0 * self.margin
    }
}

fn extent(input: &PlotInput<'_>) -> ([f64; 3], [f64; 3]) {
    let world = input.world;
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    let mut grow = |p: &Point3<f64>, pad: f64| {
        for i in 0..3 {
            min[i] = min[i].min(p.axis(i) - pad);
            max[i] = max[i].max(p.axis(i) + pad);
        }
    };
    let res = world.resolution();
    if let Some((w, h)) = world.grid_dims() {
        grow(&world.cell_center(0, 0), res / 2.0);
        grow(&world.cell_center(w - 1, h - 1), res / 2.0);
    } else if let Some(b) = world.bounds() {
        grow(&b.min, 0.0);
        grow(&b.max, 0.0);
    } else {
        let pad = world.inflation_radius() + res;
        for p in world.obstacle_points() {
            grow(p, pad);
        }
    }
    for p in input.trajectory.points.iter().chain(&input.start).chain(&input.goal) {
        grow(p, res / 2.0);
    }
    if min[0] > max[0] {
        // Nothing to show: a unit square around the origin.
        min = [0.0; 3];
        max = [1.0; 3];
    }
    if world.dimensionality() == Dimensionality::Two {
        min[2] = 0.0;
        max[2] = 0.0;
    }
    (min, max)
}

fn check_dimensions(input: &PlotInput<'_>) -> Result<()> {
    if input.world.dimensionality() == Dimensionality::Three {
        return Ok(());
    }
    let flat = |p: &Point3<f64>| p.z == 0.0;
    if let Some(i) = input.trajectory.points.iter().position(|p| !flat(p)) {
        bail!(
            "trajectory is 3-D (waypoint {i} has z = {}) but the map is 2-D",
            input.trajectory.points[i].z
        );
    }
    for (name, p) in [("start", &input.start), ("goal", &input.goal)] {
        if let Some(p) = p.filter(|p| !flat(p)) {
            bail!("{name} has z = {} but the map is 2-D", p.z);
        }
    }
    Ok(())
}

pub fn render_svg(input: &PlotInput<'_>, spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    check_dimensions(input)?;
    let (min, max) = extent(input);
    let frame = Frame {
        min,
        max,
        scale: spec.scale,
        margin: spec.margin,
    };
    let mut panels = vec![Panel {
        name: "top",
        axes: (0, 1),
        top: 0.0,
    }];
    if input.world.dimensionality() == Dimensionality::Three {
        panels.push(Panel {
            name: "side",
            axes: (0, 2),
            top: frame.panel_height(1),
        });
    }
    let natural_w = (max[0] - min[0]) * spec.scale + 2.0 * spec.margin;
    let natural_h: f64 = panels.iter().map(|p| frame.panel_height(p.axes.1)).sum();
    let (width, height) = match spec.canvas {
        Some((w, h)) => (f64::from(w), f64::from(h)),
        None => (natural_w.ceil(), natural_h.ceil()),
    };

    let mut svg = String::new();
    let w = &mut svg;
    line(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    line(
        w,
        &format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
        ),
    );
    line(
        w,
        &format!(r#"<rect id="background" x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#),
    );
    for panel in &panels {
        line(w, &format!(r#"<g id="{}">"#, panel.name));
        let ph = frame.panel_height(panel.axes.1);
        line(
            w,
            &format!(
                r##"<rect id="{}-frame" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888888" stroke-width="1"/>"##,
                panel.name,
                spec.margin,
                panel.top + spec.margin,
                natural_w - 2.0 * spec.margin,
                ph - 2.0 * spec.margin
            ),
        );
        if spec.layers.contains(&Layer::Obstacles) {
            obstacles(w, input, &frame, panel, false);
        }
        if spec.layers.contains(&Layer::Revealed) {
            obstacles(w, input, &frame, panel, true);
        }
        if spec.layers.contains(&Layer::Cells) {
            cells(w, input, &frame, panel, spec.cell_steps);
        }
        if spec.layers.contains(&Layer::Trajectory) && !input.trajectory.is_empty() {
            let pts: Vec<String> = input
                .trajectory
                .points
                .iter()
                .map(|p| {
                    let (x, y) = frame.px(panel, p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            line(
                w,
                &format!(
                    r##"<polyline id="{}-trajectory" points="{}" fill="none" stroke="#1f5fbf" stroke-width="2"/>"##,
                    panel.name,
                    pts.join(" ")
                ),
            );
        }
        if spec.layers.contains(&Layer::Markers) {
            if let Some(s) = input.start {
                let (x, y) = frame.px(panel, &s);
                line(
                    w,
                    &format!(
                        r##"<circle id="{}-start" cx="{x:.2}" cy="{y:.2}" r="5" fill="#2a9d3c"/>"##,
                        panel.name
                    ),
                );
            }
            if let Some(g) = input.goal {
                let (x, y) = frame.px(panel, &g);
                line(
                    w,
                    &format!(
                        r##"<circle id="{}-goal" cx="{x:.2}" cy="{y:.2}" r="5" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
                        panel.name
                    ),
                );
            }
        }
        line(w, "</g>");
    }
    line(w, "</svg>");
    Ok(svg)
}

fn line(out: &mut String, s: &str) {
    out.push_str(s);
    out.push('\n');
}

/// True obstacles in light grey, or (with `revealed`) the known subset in
/// dark grey drawn over them.
fn obstacles(out: &mut String, input: &PlotInput<'_>, frame: &Frame, panel: &Panel, revealed: bool) {
    let world = input.world;
    let (id, fill) = if revealed {
        ("revealed", "#333333")
    } else {
        ("obstacles", "#bbbbbb")
    };
    writeln!(out, r#"<g id="{}-{id}" fill="{fill}">"#, panel.name).unwrap();
    let res = world.resolution();
    if let Some((gw, gh)) = world.grid_dims() {
        let occupied = |x, y| {
            if revealed {
                world.cell_known_occupied(x, y)
            } else {
                world.cell_occupied(x, y)
            }
        };
        // One rectangle per horizontal run of occupied cells.
        for y in 0..gh {
            let mut x = 0;
            while x < gw {
                if !occupied(x, y) {
                    x += 1;
                    continue;
                }
                let x0 = x;
                while x < gw && occupied(x, y) {
                    x += 1;
                }
                let corner = world.cell_center(x0, y);
                let corner = Point3::planar(corner.x - res / 2.0, corner.y + res / 2.0);
                let (px, py) = frame.px(panel, &corner);
                let wpx = (x - x0) as f64 * res * frame.scale;
                let hpx = res * frame.scale;
                writeln!(
                    out,
                    r#"<rect x="{px:.2}" y="{py:.2}" width="{wpx:.2}" height="{hpx:.2}"/>"#
                )
                .unwrap();
            }
        }
    } else {
        let r = (world.inflation_radius().max(res / 2.0) * frame.scale).max(1.0);
        let mut seen = HashSet::new();
        for (i, p) in world.obstacle_points().iter().enumerate() {
            if revealed && !world.point_known(i) {
                continue;
            }
            let (x, y) = frame.px(panel, p);
            // Points stacked along the hidden axis land on the same spot.
            if seen.insert(((x * 100.0).round() as i64, (y * 100.0).round() as i64)) {
                writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}"/>"#).unwrap();
            }
        }
    }
    out.push_str("</g>\n");
}

fn cells(out: &mut String, input: &PlotInput<'_>, frame: &Frame, panel: &Panel, count: usize) {
    for (i, step) in input.steps.iter().take(count).enumerate() {
        let c = Point3::new(step.center[0], step.center[1], step.center[2]);
        let half = (step.cellsize.saturating_sub(1)) as f64 / 2.0 * step.spacing;
        let corner = Point3::new(c.x - half, c.y + half, c.z + half);
        let (x, y) = frame.px(panel, &corner);
        let side = 2.0 * half * frame.scale;
        writeln!(
            out,
            r##"<rect id="{}-cell-{i}" x="{x:.2}" y="{y:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="#e67e22" stroke-width="1"/>"##,
            panel.name
        )
        .unwrap();
    }
}
