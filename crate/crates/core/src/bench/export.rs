use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{BenchError, FormatError};
use crate::geometry::Point3;
use crate::run::{RunMetrics, Trajectory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportPaths {
    pub trajectory: PathBuf,
    pub metrics: PathBuf,
}

/// `t,x,y,z` with `t` the waypoint index. Floats use the shortest
/// representation that reads back exactly.
pub fn trajectory_csv(trajectory: &Trajectory<f64>) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (i, p) in trajectory.points.iter().enumerate() {
        writeln!(out, "{i},{},{},{}", p.x, p.y, p.z).expect("writing to a String");
    }
    out
}

/// Reads a file written by [`trajectory_csv`]. Extra columns are ignored.
pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory<f64>, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    let bad = |index: usize, reason: String| BenchError::Format {
        path: path.to_path_buf(),
        source: FormatError::BadRecord { index, reason },
    };
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(cx), Some(cy), Some(cz)) = (col("x"), col("y"), col("z")) else {
        return Err(bad(0, "header must name x, y and z columns".into()));
    };
    let mut traj = Trajectory::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let get = |c: usize| -> Result<f64, BenchError> {
            let v = rec.get(c).unwrap_or("").trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(i + 1, format!("`{v}` is not a finite number")))
        };
        traj.points.push(Point3::new(get(cx)?, get(cy)?, get(cz)?));
    }
    Ok(traj)
}

/// Writes `<name>.trajectory.csv` and `<name>.metrics.json` into `dir`,
/// creating it if needed. Both files are byte-identical across reruns of
/// the same scenario; wall time is left out of the JSON for that reason.
pub fn export_run(
    metrics: &RunMetrics,
    trajectory: &Trajectory<f64>,
    dir: &Path,
    name: &str,
) -> Result<ExportPaths, BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    let paths = ExportPaths {
        trajectory: dir.join(format!("{name}.trajectory.csv")),
        metrics: dir.join(format!("{name}.metrics.json")),
    };
    std::fs::write(&paths.trajectory, trajectory_csv(trajectory)).map_err(|e| BenchError::io(&paths.trajectory, e))?;
    let mut json = serde_json::to_string_pretty(metrics)?;
    json.push('\n');
    std::fs::write(&paths.metrics, json).map_err(|e| BenchError::io(&paths.metrics, e))?;
    Ok(paths)
}
