use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use pentapod_core::error::Error;
use pentapod_core::ratparam::solve_a;
use pentapod_core::reference::{caption_architecture, fixed_orientation_pose, published_architecture};
use pentapod_core::{extract_f, Configuration, SingularityModel};
use serde_json::Value;
use tempfile::TempDir;

const BASE_PUBLISHED: &str = "[[0, 0, 0], [1, 0, 0], [-4, -3, 0], [3, 7, -6], [9, -5, 4]]";
const BASE_CAPTION: &str = "[[0, 0, 0], [5, 0, 0], [-4, -3, 0], [3, 7, -6], [9, -5, 4]]";
const OFFSETS: &str = "[0, 2, 4, 5, 10]";

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pentapod-sing")
}

fn config(base: &str, orientation: &str, position: &str, extra: &str) -> String {
    format!(
        r#"{{"architecture": {{"base": {base}, "r": {OFFSETS}}},
            "pose": {{"orientation": {orientation}, "position": {position}}}{extra}}}"#
    )
}

fn reference_config(extra: &str) -> String {
    config(BASE_PUBLISHED, r#"["3/5", "4/5", 0]"#, "[2, 3, 4]", extra)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], cfg: &Path) -> Output {
    Command::new(bin()).args(args).arg("--config").arg(cfg).env_remove("PENTAPOD_PRECISION").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Rows of a CSV table keyed by the header.
fn csv(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect()).collect()
}

fn field(row: &[(String, String)], key: &str) -> String {
    row.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1.clone()
}

fn float(row: &[(String, String)], key: &str) -> f64 {
    field(row, key).parse().unwrap()
}

fn caption_model() -> &'static SingularityModel {
    static MODEL: OnceLock<SingularityModel> = OnceLock::new();
    MODEL.get_or_init(|| extract_f(&caption_architecture()).unwrap())
}

fn pose_json(c: &Configuration) -> (String, String) {
    let fmt = |x: &[f64; 3]| format!("[{:e}, {:e}, {:e}]", x[0], x[1], x[2]);
    (fmt(&c.orientation), fmt(&c.position))
}

#[test]
fn check_verdicts() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", &reference_config(""));
    let rows = csv(&stdout(&run(&["check"], &g)));
    assert_eq!(field(&rows[0], "verdict"), "nonsingular");
    assert!(float(&rows[0], "sigma_ratio") > 1e-3);

    let (i, p) = pose_json(&fixed_orientation_pose(0));
    let o = write(&dir, "o.json", &config(BASE_PUBLISHED, &i, &p, ""));
    let rows = csv(&stdout(&run(&["check"], &o)));
    assert_eq!(field(&rows[0], "verdict"), "singular");
    assert!(float(&rows[0], "f_normalized") < 1e-9);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("truncated.json", "{\"architecture\": ".to_string()),
        ("unknown.json", reference_config(r#", "colour": "red""#)),
        ("norm.json", config(BASE_PUBLISHED, "[0.7, 0.8, 0]", "[2, 3, 4]", "")),
        ("rational.json", config(BASE_PUBLISHED, r#"["3/0", "4/5", 0]"#, "[2, 3, 4]", "")),
        ("mode.json", reference_config(r#", "mode": "sideways""#)),
        ("format.json", reference_config(r#", "format": "xml""#)),
        (
            "legs.json",
            config("[[0, 0, 0], [1, 0, 0], [1, 0, 0], [3, 7, -6], [9, -5, 4]]", "[1, 0, 0]", "[0, 0, 0]", "")
                .replace(OFFSETS, "[0, 2, 2, 5, 10]"),
        ),
    ];
    for (name, text) in cases {
        let out = run(&["check"], &write(&dir, name, &text));
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let missing = run(&["check"], &dir.path().join("absent.json"));
    assert_eq!(missing.status.code(), Some(2));
    let no_pose =
        write(&dir, "nopose.json", &format!(r#"{{"architecture": {{"base": {BASE_PUBLISHED}, "r": {OFFSETS}}}}}"#));
    assert_eq!(run(&["dist"], &no_pose).status.code(), Some(2));
    let g = write(&dir, "g.json", &reference_config(""));
    let bad_precision =
        Command::new(bin()).args(["dist", "--config"]).arg(&g).env("PENTAPOD_PRECISION", "many").output().unwrap();
    assert_eq!(bad_precision.status.code(), Some(2));
}

#[test]
fn near_unit_orientation_warns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n.json", &config(BASE_PUBLISHED, "[0.6000002, 0.8, 0]", "[2, 3, 4]", ""));
    let out = run(&["check"], &cfg);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("normalized"));
}

#[test]
fn fixed_orientation_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", &reference_config(r#", "mode": "fixed-orientation""#));
    let rows = csv(&stdout(&run(&["dist"], &cfg)));
    assert_eq!(rows.len(), 4);
    assert!((float(&rows[0], "distance") - 3.941223289).abs() < 1e-6);
    for row in &rows {
        assert!(!field(row, "lambda1").is_empty());
        assert!(field(row, "lambda2").is_empty() && field(row, "mu").is_empty());
        assert!(float(row, "residual") < 1e-10);
    }
}

#[test]
fn fixed_position_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", &reference_config(""));
    let rows = csv(&stdout(&run(&["dist", "--mode", "fixed-position"], &cfg)));
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!((float(row, "px"), float(row, "py"), float(row, "pz")), (2.0, 3.0, 4.0));
        assert!(field(row, "mu").is_empty());
    }
}

#[test]
fn general_and_equiform_tables() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", &reference_config(r#", "starts": 400"#));
    let rows = csv(&stdout(&run(&["dist", "--mode", "general"], &cfg)));
    assert_eq!(rows.len(), 16);
    assert!((float(&rows[0], "distance") - 1.479192394).abs() < 1e-6);
    assert!(rows.windows(2).all(|w| float(&w[0], "distance") <= float(&w[1], "distance")));

    let rows = csv(&stdout(&run(&["dist", "--mode", "equiform"], &cfg)));
    assert_eq!(rows.len(), 6);
    assert!((float(&rows[0], "distance") - 1.4517670618).abs() < 1e-6);
    assert!((float(&rows[0], "mu") - 0.9148471097).abs() < 1e-6);
    assert!(field(&rows[0], "lambda1").is_empty());
}

#[test]
fn output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", &reference_config(r#", "starts": 80, "seed": 3, "format": "json""#));
    let a = stdout(&run(&["dist"], &cfg));
    let b = stdout(&run(&["dist"], &cfg));
    assert_eq!(a, b);
    let file = dir.path().join("out.json");
    let out = run(&["dist", "--out", file.to_str().unwrap()], &cfg);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&file).unwrap(), a);
    let doc: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["mode"], "general");
    assert_eq!(doc["seed"], 3);
    let first = &doc["rows"][0];
    let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["index", "u", "v", "w", "px", "py", "pz", "lambda1", "lambda2", "mu", "distance", "residual"]);
    assert!(first["mu"].is_null());
}

#[test]
fn command_line_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "g.json", &reference_config(r#", "mode": "general", "format": "json""#));
    let text = stdout(&run(&["dist", "--mode", "fixed-orientation", "--format", "csv"], &cfg));
    assert!(text.starts_with("index,u,v,w,px,py,pz,lambda1,lambda2,mu,distance,residual\n"));
    assert_eq!(csv(&text).len(), 4);
}

#[test]
fn param_records_and_exclusions() {
    // bisect the coefficient of `a` in t_1 until the exclusion is hit exactly
    let model = caption_model();
    let coefficient = |t1: f64| solve_a(model, &[t1, 0.3, 0.7, -0.4]).map(|s| s.coefficient);
    let (c0, c1) = (coefficient(0.0).unwrap(), coefficient(1.0).unwrap());
    let root = -c0 / (c1 - c0);
    let (mut lo, mut hi) = (root - 1.0, root + 1.0);
    let clo = coefficient(lo).unwrap();
    let mut excluded = None;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match coefficient(mid) {
            Err(Error::LineOnQuadric { .. }) => {
                excluded = Some(mid);
                break;
            }
            Ok(c) if c * clo > 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    let t1 = excluded.expect("exclusion found");

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &config(BASE_CAPTION, "[0.6, 0.8, 0]", "[2, 3, 4]", ""));
    let tagged = format!("{t1:e},0.3,0.7,-0.4");
    let rows = csv(&stdout(&run(&["param", "--t", "0,0,0,0", "--t", &tagged, "--t", "1,-1/2,1/4,3"], &cfg)));
    assert_eq!(rows.len(), 3);
    assert_eq!(field(&rows[0], "status"), "ok");
    assert_eq!(float(&rows[0], "w"), -1.0);
    assert_eq!(field(&rows[1], "status"), "line-on-quadric");
    assert!(field(&rows[1], "a").is_empty() && field(&rows[1], "px").is_empty());
    assert_eq!(field(&rows[2], "status"), "ok");
    let c = Configuration::new(
        [float(&rows[2], "u"), float(&rows[2], "v"), float(&rows[2], "w")],
        [float(&rows[2], "px"), float(&rows[2], "py"), float(&rows[2], "pz")],
    );
    assert!(model.normalized_value(&c.coordinates()) < 1e-8);
}

#[test]
fn param_grid_from_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        &config(BASE_CAPTION, "[0.6, 0.8, 0]", "[2, 3, 4]", r#", "param": {"grid": 25, "range": "5/2"}"#),
    );
    let rows = csv(&stdout(&run(&["param"], &cfg)));
    assert_eq!(rows.len(), 25);
    for row in &rows {
        assert_eq!(field(row, "status"), "ok");
        assert!((1..=4).all(|k| float(row, &format!("t{k}")).abs() <= 2.5));
    }
    let rows = csv(&stdout(&run(&["param", "--grid", "7"], &cfg)));
    assert_eq!(rows.len(), 7);
}

#[test]
fn param_inverse_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &config(BASE_CAPTION, "[0.6, 0.8, 0]", "[2, 3, 4]", ""));
    let rows = csv(&stdout(&run(&["param", "--t", "0.5,-1.25,0.75,2"], &cfg)));
    let (i, p) = (
        format!("[{}, {}, {}]", field(&rows[0], "u"), field(&rows[0], "v"), field(&rows[0], "w")),
        format!("[{}, {}, {}]", field(&rows[0], "px"), field(&rows[0], "py"), field(&rows[0], "pz")),
    );
    // ten printed digits leave F at about 1e-10; loosen the membership test accordingly
    let inv = write(&dir, "inv.json", &config(BASE_CAPTION, &i, &p, ""));
    let rows = csv(&stdout(&run(&["param", "--inverse", "--tol", "1e-7"], &inv)));
    for (k, t) in [0.5, -1.25, 0.75, 2.0].iter().enumerate() {
        assert!((float(&rows[0], &format!("t{}", k + 1)) - t).abs() < 1e-6);
    }
    // a regular pose is a solver-side failure
    let out = run(&["param", "--inverse"], &cfg);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not singular"));
}

#[test]
fn mesh_samples_lie_on_the_variety() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &config(BASE_CAPTION, "[0.6, 0.8, 0]", "[2, 3, 4]", r#", "box": 6"#));
    let path = dir.path().join("mesh.json");
    let out = run(&["mesh", "--resolution", "16", "--curve-resolution", "40", "--out", path.to_str().unwrap()], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let model = caption_model();
    let point = |v: &Value| -> [f64; 3] { std::array::from_fn(|k| v[k].as_f64().unwrap()) };

    let vertices: Vec<[f64; 3]> = doc["quadric"]["vertices"].as_array().unwrap().iter().map(point).collect();
    let triangles = doc["quadric"]["triangles"].as_array().unwrap();
    assert!(!vertices.is_empty() && !triangles.is_empty());
    for v in &vertices {
        assert!(v.iter().zip([2.0, 3.0, 4.0]).all(|(x, c)| (x - c).abs() <= 6.0 + 1e-9));
        let c = Configuration::new([0.6, 0.8, 0.0], *v);
        assert!(model.normalized_value(&c.coordinates()) < 1e-8, "{v:?}");
    }
    assert!(triangles
        .iter()
        .flat_map(|t| t.as_array().unwrap())
        .all(|i| (i.as_u64().unwrap() as usize) < vertices.len()));

    let lines = doc["curve"]["polylines"].as_array().unwrap();
    assert!(!lines.is_empty());
    for line in lines {
        for v in line["points"].as_array().unwrap().iter().map(point) {
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
            let c = Configuration::new(v, [2.0, 3.0, 4.0]);
            assert!(model.normalized_value(&c.coordinates()) < 1e-8, "{v:?}");
        }
    }
}

#[test]
fn published_and_caption_instances_differ() {
    // the same pose is singular for one architecture only
    let dir = TempDir::new().unwrap();
    let (i, p) = pose_json(&fixed_orientation_pose(1));
    let published = write(&dir, "p.json", &config(BASE_PUBLISHED, &i, &p, ""));
    let caption = write(&dir, "c.json", &config(BASE_CAPTION, &i, &p, ""));
    assert_eq!(field(&csv(&stdout(&run(&["check"], &published)))[0], "verdict"), "singular");
    assert_eq!(field(&csv(&stdout(&run(&["check"], &caption)))[0], "verdict"), "nonsingular");
    assert!(extract_f(&published_architecture()).is_ok());
}
