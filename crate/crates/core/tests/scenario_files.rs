//! The checked-in scenario suite: map files match their generators and
//! every scenario file parses.
//!
//! `CELLPLAN_REGEN=1 cargo test -p cellplan --test scenario_files` rewrites
//! the generated map files.

use std::path::{Path, PathBuf};

use cellplan::bench::{load_suite, ScenarioFile};
use cellplan::fixtures::{block_map, dead_corner, trap_arena, tree_cluster_points, wall_points};
use cellplan::geometry::Point3;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn points_csv(points: &[Point3<f64>]) -> String {
    let mut out = String::from("x,y,z\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.x, p.y, p.z));
    }
    out
}

fn generated() -> Vec<(&'static str, &'static str, String)> {
    vec![
        (
            "trap_arena.map",
            "; 50 x 70 arena with a U-shaped pocket opening south below (15, 50).",
            trap_arena().to_text(),
        ),
        (
            "dead_corner.map",
            "; 30 x 30 arena with a three-sided box around (14, 17) opening south.",
            dead_corner().to_text(),
        ),
        (
            "block_map.map",
            "; 60 x 70 staggered 4 x 4 blocks with a few bars.",
            block_map().to_text(),
        ),
        ("wall.csv", "", points_csv(&wall_points())),
        ("tree_clusters.csv", "", points_csv(&tree_cluster_points())),
    ]
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(';'))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn map_files_match_their_generators() {
    let maps = scenarios_dir().join("maps");
    let regen = std::env::var_os("CELLPLAN_REGEN").is_some();
    for (name, comment, body) in generated() {
        let path = maps.join(name);
        if regen {
            std::fs::create_dir_all(&maps).unwrap();
            let text = if comment.is_empty() {
                body.clone()
            } else {
                format!("{comment}\n{body}")
            };
            std::fs::write(&path, text).unwrap();
        }
        let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(
            strip_comments(&on_disk) == body,
            "{} is out of date; rerun with CELLPLAN_REGEN=1",
            path.display()
        );
    }
}

#[test]
fn every_shipped_scenario_parses() {
    let root = scenarios_dir();
    let mut dirs = vec![root.clone()];
    for entry in std::fs::read_dir(&root).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() && p.file_name().is_some_and(|n| n != "maps") {
            dirs.push(p);
        }
    }
    let mut files = 0;
    for dir in dirs {
        for s in load_suite(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())) {
            s.build_world().unwrap_or_else(|e| panic!("{}: {e}", s.name));
            files += 1;
        }
    }
    assert!(files >= 10, "only {files} runs found");
}

#[test]
fn documented_example_parses() {
    let doc = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats.md")).unwrap();
    let start = doc.find("```toml\n").expect("a toml block") + "```toml\n".len();
    let end = start + doc[start..].find("```").unwrap();
    ScenarioFile::parse(&doc[start..end]).unwrap();
}
