use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn cellplan(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellplan"))
        .args(args)
        .env("CELLPLAN_OUT", out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_smoke_succeeds_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = scenarios().join("smoke.toml");
    let o = cellplan(&["plan", path_str(&smoke)], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["smoke-cell-astar-g0", "smoke-dstar-lite-g0"] {
        let csv = std::fs::read_to_string(dir.path().join(format!("{name}.trajectory.csv"))).unwrap();
        assert!(csv.starts_with("t,x,y,z\n0,1,1,0\n"), "{csv}");
        assert!(dir.path().join(format!("{name}.metrics.json")).exists());
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().count(), 2);
    assert!(stdout.contains("smoke-cell-astar-g0: success"));
}

#[test]
fn plan_output_flag_beats_the_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let smoke = scenarios().join("smoke.toml");
    let o = cellplan(
        &[
            "plan",
            path_str(&smoke),
            "--planner",
            "dstar-lite",
            "-o",
            path_str(flag_dir.path()),
        ],
        env_dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(flag_dir.path().join("smoke-dstar-lite-g0.metrics.json").exists());
    assert!(!env_dir.path().join("smoke-dstar-lite-g0.metrics.json").exists());
    assert!(!flag_dir.path().join("smoke-cell-astar-g0.metrics.json").exists());
}

#[test]
fn plan_missing_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = cellplan(&["plan", "no/such/file.toml"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no/such/file.toml"));
}

#[test]
fn plan_schema_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenarios().join("smoke.toml")).unwrap();
    let cases = [
        (text.replace("cellplan.scenario/1", "cellplan.scenario/0"), "schema"),
        (text.replace("max_steps = 100", "max_steps = 100\nspeed = 2"), "speed"),
        (
            text.replace("kind = \"dstar-lite\"", "kind = \"hybrid-astar\""),
            "planner.hybrid",
        ),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.toml"));
        std::fs::write(&path, body).unwrap();
        let o = cellplan(&["plan", path_str(&path)], dir.path());
        assert_eq!(code(&o), 1);
        assert!(stderr(&o).contains(field), "{field}: {}", stderr(&o));
    }
}

#[test]
fn plan_overrides_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = scenarios().join("smoke.toml");
    let o = cellplan(&["plan", path_str(&smoke), "--cellsize-max", "4"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("cellsize_max"), "{}", stderr(&o));
    let o = cellplan(
        &["plan", path_str(&smoke), "--planner", "cell-astar", "--w2", "0"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn plan_trapped_hybrid_exits_2_with_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let trap = scenarios().join("trap_hybrid.toml");
    let o = cellplan(&["plan", path_str(&trap)], dir.path());
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let json = std::fs::read_to_string(dir.path().join("trap-hybrid-hybrid-astar-g0.metrics.json")).unwrap();
    assert!(json.contains("\"outcome\": \"failed\""), "{json}");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&cellplan(&[], dir.path())), 1);
    assert_eq!(code(&cellplan(&["plan"], dir.path())), 1);
    assert_eq!(code(&cellplan(&["bench", "x", "--repeats", "many"], dir.path())), 1);
    assert_eq!(code(&cellplan(&["--help"], dir.path())), 0);
}

#[test]
fn bench_two_by_two_gives_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite");
    std::fs::create_dir(&suite).unwrap();
    let smoke = std::fs::read_to_string(scenarios().join("smoke.toml")).unwrap();
    std::fs::write(suite.join("a.toml"), &smoke).unwrap();
    std::fs::write(
        suite.join("b.toml"),
        smoke.replace("name = \"smoke\"", "name = \"other\""),
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = cellplan(&["bench", path_str(&suite), "-o", path_str(&out)], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(out.join("comparison.txt").exists());
}

#[test]
fn bench_planner_filter_applies() {
    let dir = tempfile::tempdir().unwrap();
    let suite_dir = scenarios().join("car_trap");
    let o = cellplan(
        &["bench", path_str(&suite_dir), "--planner", "hybrid-astar"],
        dir.path(),
    );
    // Failed runs still count as completed.
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.contains(",hybrid-astar,")));
    assert!(csv.contains(",failed,"));
}

#[test]
fn bench_empty_suite_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = cellplan(&["bench", path_str(&empty)], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no scenario files"));
}

#[test]
fn bench_grid_suite_favours_cell_astar_on_time() {
    let dir = tempfile::tempdir().unwrap();
    let suite_dir = scenarios().join("grid_blocks");
    let o = cellplan(&["bench", path_str(&suite_dir), "--repeats", "5"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let mut total = std::collections::HashMap::<String, f64>::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        // The quoted goal label holds a comma, so count columns from the end.
        let time: f64 = cols[cols.len() - 10].parse().unwrap();
        *total.entry(cols[1].to_string()).or_default() += time;
    }
    assert!(total["cell-astar"] < total["dstar-lite"], "{total:?}");
}

fn attr(svg: &str, id: &str, name: &str) -> f64 {
    let el = svg
        .lines()
        .find(|l| l.contains(&format!("id=\"{id}\"")))
        .unwrap_or_else(|| panic!("no {id}"));
    let key = format!(" {name}=\"");
    let rest = &el[el.find(&key).unwrap() + key.len()..];
    rest[..rest.find('"').unwrap()].parse().unwrap()
}

#[test]
fn plot_smoke_run_marks_start_and_goal() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = scenarios().join("smoke.toml");
    let o = cellplan(&["plan", path_str(&smoke), "--planner", "cell-astar"], dir.path());
    assert_eq!(code(&o), 0);
    let traj = dir.path().join("smoke-cell-astar-g0.trajectory.csv");
    let metrics = dir.path().join("smoke-cell-astar-g0.metrics.json");
    let svg_path = dir.path().join("plot.svg");
    let args = [
        "plot",
        "--scenario",
        path_str(&smoke),
        "--trajectory",
        path_str(&traj),
        "--metrics",
        path_str(&metrics),
        "--cells",
        "2",
        "-o",
        path_str(&svg_path),
    ];
    let o = cellplan(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    // 20 x 20 cells of 1 m span [-0.5, 19.5]; 10 px/m, 10 px margin, y flipped.
    let px = |x: f64| 10.0 + (x + 0.5) * 10.0;
    let py = |y: f64| 10.0 + (19.5 - y) * 10.0;
    assert_eq!(attr(&svg, "top-start", "cx"), px(1.0));
    assert_eq!(attr(&svg, "top-start", "cy"), py(1.0));
    assert_eq!(attr(&svg, "top-goal", "cx"), px(15.0));
    assert_eq!(attr(&svg, "top-goal", "cy"), py(12.0));
    assert!(svg.contains("id=\"top-trajectory\""));
    assert!(svg.contains("id=\"top-cell-1\""));

    let again = dir.path().join("again.svg");
    let mut args2 = args;
    args2[10] = path_str(&again);
    assert_eq!(code(&cellplan(&args2, dir.path())), 0);
    assert_eq!(std::fs::read(&svg_path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn plot_without_trajectory_draws_the_map_only() {
    let dir = tempfile::tempdir().unwrap();
    let map = scenarios().join("maps/dead_corner.map");
    let svg_path = dir.path().join("map.svg");
    let o = cellplan(
        &["plot", "--map", path_str(&map), "-o", path_str(&svg_path)],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.contains("id=\"top-obstacles\""));
    assert!(!svg.contains("polyline"));
    assert!(!svg.contains("id=\"side"));
}

#[test]
fn plot_three_d_run_has_two_panels() {
    let dir = tempfile::tempdir().unwrap();
    let wall = scenarios().join("drone/wall.toml");
    assert_eq!(code(&cellplan(&["plan", path_str(&wall)], dir.path())), 0);
    let traj = dir.path().join("drone-wall-cell-astar-g0.trajectory.csv");
    let svg_path = dir.path().join("wall.svg");
    let args = [
        "plot",
        "--scenario",
        path_str(&wall),
        "--trajectory",
        path_str(&traj),
        "-o",
        path_str(&svg_path),
    ];
    let o = cellplan(&args, dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    for id in ["top-trajectory", "side-trajectory", "top-revealed", "side-goal"] {
        assert!(svg.contains(&format!("id=\"{id}\"")), "{id}");
    }
}

#[test]
fn plot_dimension_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.csv");
    std::fs::write(&traj, "t,x,y,z\n0,1,1,2.5\n").unwrap();
    let map = scenarios().join("maps/dead_corner.map");
    let svg_path = dir.path().join("x.svg");
    let args = [
        "plot",
        "--map",
        path_str(&map),
        "--trajectory",
        path_str(&traj),
        "-o",
        path_str(&svg_path),
    ];
    let o = cellplan(&args, dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("2-D"), "{}", stderr(&o));
    assert!(!svg_path.exists());
}
