//! Text map and obstacle CSV formats.
//!
//! Map files are rows of `#` (occupied) and `.` (free); lines starting with
//! `;` are comments and are kept so a load/save cycle reproduces the file.
//! Obstacle files are CSV with the header `x,y,z`, one point per row, meters.

use crate::error::FormatError;
use crate::geometry::Point3;
use crate::scalar::Real;

use super::{OccupancyWorld, WorldConfig};

pub fn load_map_2d<T: Real>(text: &str, config: WorldConfig<T>) -> Result<OccupancyWorld<T>, FormatError> {
    let mut comments = Vec::new();
    let mut rows: Vec<&str> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with(';') {
            comments.push((line_no, line.to_string()));
        } else {
            rows.push(line);
        }
    }
    let width = rows.first().map(|r| r.chars().count()).unwrap_or(0);
    if rows.is_empty() || width == 0 {
        return Err(FormatError::Empty);
    }
    let mut cells = Vec::with_capacity(width * rows.len());
    for (r, row) in rows.iter().enumerate() {
        let found = row.chars().count();
        if found != width {
            return Err(FormatError::Ragged {
                row: r,
                expected: width,
                found,
            });
        }
        for (c, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push(true),
                '.' => cells.push(false),
                _ => return Err(FormatError::BadChar { row: r, col: c, ch }),
            }
        }
    }
    let mut world = OccupancyWorld::from_grid(width, rows.len(), cells, config)?;
    world.set_comments(comments);
    Ok(world)
}

/// Serializes the TRUE obstacles of a grid world, comments restored in place.
pub fn save_map_2d<T: Real>(world: &OccupancyWorld<T>) -> String {
    let Some((w, h)) = world.grid_dims() else {
        return String::new();
    };
    let mut out = String::with_capacity((w + 1) * h);
    let mut comments = world.comments().iter().peekable();
    let mut line_no = 0;
    let mut row = 0;
    while row < h || comments.peek().is_some() {
        if let Some((n, text)) = comments.peek() {
            if *n == line_no || row >= h {
                out.push_str(text);
                out.push('\n');
                comments.next();
                line_no += 1;
                continue;
            }
        }
        for x in 0..w {
            out.push(if world.cell_occupied(x, row) { '#' } else { '.' });
        }
        out.push('\n');
        row += 1;
        line_no += 1;
    }
    out
}

pub fn parse_obstacles_csv(text: &str) -> Result<Vec<Point3<f64>>, FormatError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.len() != 3 || &headers[0] != "x" || &headers[1] != "y" || &headers[2] != "z" {
        return Err(FormatError::BadRecord {
            index: 0,
            reason: format!(
                "expected header x,y,z, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut points = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 3 {
            return Err(FormatError::BadRecord {
                index,
                reason: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let mut v = [0.0f64; 3];
        for (k, field) in record.iter().enumerate() {
            v[k] = field.parse().map_err(|_| FormatError::BadRecord {
                index,
                reason: format!("field {k} is not a number: {field:?}"),
            })?;
        }
        points.push(Point3::new(v[0], v[1], v[2]));
    }
    Ok(points)
}

/// Builds a 3-D world from obstacle records; non-finite coordinates are
/// rejected with the offending record index.
pub fn load_obstacles_3d<T: Real>(
    records: &[Point3<f64>],
    config: WorldConfig<T>,
) -> Result<OccupancyWorld<T>, FormatError> {
    if let Some(index) = records.iter().position(|p| !p.is_finite()) {
        return Err(FormatError::BadRecord {
            index,
            reason: "coordinate is NaN or infinite".into(),
        });
    }
    let points = records.iter().map(|p| p.cast::<T>()).collect();
    Ok(OccupancyWorld::from_points(points, config)?)
}

pub fn save_obstacles_3d<T: Real>(world: &OccupancyWorld<T>) -> String {
    let mut out = String::from("x,y,z\n");
    for p in world.obstacle_points() {
        out.push_str(&format!("{},{},{}\n", p.x.as_f64(), p.y.as_f64(), p.z.as_f64()));
    }
    out
}
