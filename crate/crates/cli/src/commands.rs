use anyhow::anyhow;
use pentapod_core::distance::solve;
use pentapod_core::pentapod::{is_singular, DEFAULT_SIGMA_TOL};
use pentapod_core::ratparam::{halton_grid, param_inverse, param_point, sample};
use pentapod_core::{extract_f, Architecture, Configuration, Error, Mode, SingularityModel, SolverOptions};
use serde_json::{json, Value};

use crate::config::{Format, JobConfig, ParamSource};
use crate::mesh::{mesh_quadric, trace_sphere_curve};
use crate::output::{num, nums, opt, to_json_text, Table};

/// Exit status 2 for configuration problems, 3 for solver failures.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Solver(e) => e,
        }
    }
}

pub trait Classify<T> {
    fn config(self) -> std::result::Result<T, Failure>;
    fn solver(self) -> std::result::Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for std::result::Result<T, E> {
    fn config(self) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }

    fn solver(self) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure::Solver(e.into()))
    }
}

pub type Outcome = std::result::Result<String, Failure>;

pub const PRECISION_VAR: &str = "PENTAPOD_PRECISION";
pub const DEFAULT_PARAM_TOL: f64 = 1e-9;
pub const DEFAULT_MESH_BOX: f64 = 10.0;
pub const DEFAULT_RESOLUTION: usize = 32;
pub const DEFAULT_CURVE_RESOLUTION: usize = 90;

fn model(arch: &Architecture) -> std::result::Result<SingularityModel, Failure> {
    extract_f(arch).solver()
}

fn render(table: &Table, format: Format, header: Option<Value>) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut doc = header.unwrap_or_else(|| json!({}));
            doc["rows"] = table.to_json();
            to_json_text(&doc)
        }
    }
}

pub fn check(cfg: &JobConfig, format: Format, tol: Option<f64>) -> Outcome {
    let pose = cfg.pose().config()?;
    let model = model(&cfg.architecture)?;
    let tol = tol.unwrap_or(DEFAULT_SIGMA_TOL);
    let x = pose.coordinates();
    let rank = is_singular(&cfg.architecture, pose, tol);
    let mut table = Table::new(&["f", "f_normalized", "sigma_min", "sigma_max", "sigma_ratio", "tol", "verdict"]);
    table.push(vec![
        num(model.value(&x)),
        num(model.normalized_value(&x)),
        num(rank.sigma_min),
        num(rank.sigma_max),
        num(rank.ratio()),
        num(tol),
        Value::from(if rank.singular { "singular" } else { "nonsingular" }),
    ]);
    Ok(render(&table, format, None))
}

const PARAM_COLUMNS: [&str; 13] = ["index", "t1", "t2", "t3", "t4", "a", "u", "v", "w", "px", "py", "pz", "status"];

fn param_row(
    index: usize,
    t: &[f64; 4],
    point: pentapod_core::Result<(f64, Configuration)>,
) -> std::result::Result<Vec<Value>, Failure> {
    let mut row = vec![Value::from(index)];
    row.extend(t.iter().map(|x| num(*x)));
    match point {
        Ok((a, xi)) => {
            row.push(num(a));
            row.extend(xi.coordinates().iter().map(|x| num(*x)));
            row.push(Value::from("ok"));
        }
        Err(e @ (Error::NorthPole | Error::LineOnQuadric { .. })) => {
            row.extend(std::iter::repeat_n(Value::Null, 7));
            let tag = if matches!(e, Error::NorthPole) { "north-pole" } else { "line-on-quadric" };
            row.push(Value::from(tag));
        }
        Err(e) => return Err(Failure::Solver(e.into())),
    }
    Ok(row)
}

pub fn param(cfg: &JobConfig, format: Format, source: ParamSource, inverse: bool, tol: Option<f64>) -> Outcome {
    let model = model(&cfg.architecture)?;
    let mut table = Table::new(&PARAM_COLUMNS);
    if inverse {
        let pose = cfg.pose().config()?;
        let t = param_inverse(&model, pose, tol.unwrap_or(DEFAULT_PARAM_TOL)).solver()?;
        let a = param_point(&model, &t).solver()?.a;
        table.push(param_row(1, &t, Ok((a, pose.clone())))?);
        return Ok(render(&table, format, Some(json!({ "inverse": true }))));
    }
    let grid = match &source {
        ParamSource::Values(v) => v.clone(),
        ParamSource::Grid { n, range } => halton_grid(*n, *range),
    };
    let points = sample(&model, &grid);
    let mut excluded = 0;
    for (k, (t, p)) in grid.iter().zip(points).enumerate() {
        if p.is_err() {
            excluded += 1;
        }
        table.push(param_row(k + 1, t, p.map(|p| (p.a, p.xi)))?);
    }
    if excluded > 0 {
        log::warn!("{excluded} of {} parameter values hit an exclusion set", grid.len());
    }
    let header = match source {
        ParamSource::Values(_) => json!({ "source": "values" }),
        ParamSource::Grid { n, range } => json!({ "source": "halton", "n": n, "range": num(range) }),
    };
    Ok(render(&table, format, Some(header)))
}

const DIST_COLUMNS: [&str; 12] =
    ["index", "u", "v", "w", "px", "py", "pz", "lambda1", "lambda2", "mu", "distance", "residual"];

pub fn precision_bits() -> std::result::Result<u32, Failure> {
    match std::env::var(PRECISION_VAR) {
        Err(_) => Ok(SolverOptions::default().precision_bits),
        Ok(text) => {
            let bits: u32 =
                text.trim().parse().map_err(|_| anyhow!("{PRECISION_VAR}=`{text}` is not a bit count")).config()?;
            if !(53..=4096).contains(&bits) {
                return Err(Failure::Config(anyhow!("{PRECISION_VAR} must lie in 53..=4096, got {bits}")));
            }
            Ok(bits)
        }
    }
}

pub fn dist(cfg: &JobConfig, format: Format, mode: Mode, opts: &SolverOptions) -> Outcome {
    let pose = cfg.pose().config()?;
    let model = model(&cfg.architecture)?;
    let set = solve(&model, &cfg.architecture, pose, mode, opts).solver()?;
    let mut table = Table::new(&DIST_COLUMNS);
    for (k, p) in set.points.iter().enumerate() {
        let mut row = vec![Value::from(k + 1)];
        row.extend(p.pose.coordinates().iter().map(|x| num(*x)));
        row.extend([opt(p.lambda1), opt(p.lambda2), opt(p.mu), num(p.distance), num(p.residual)]);
        table.push(row);
    }
    let header = json!({
        "mode": mode.name(),
        "seed": opts.seed,
        "starts": opts.starts,
        "univariate_degree": set.univariate_degree,
        "complex_count": set.complex_count,
        "warnings": set.warnings,
    });
    Ok(render(&table, format, Some(header)))
}

pub fn mesh(cfg: &JobConfig, resolution: usize, curve_resolution: usize) -> Outcome {
    let pose = cfg.pose().config()?;
    if resolution == 0 || curve_resolution < 2 {
        return Err(Failure::Config(anyhow!("mesh resolutions must be at least 1 and 2")));
    }
    let model = model(&cfg.architecture)?;
    let omega = model.orientation_quadric(&pose.orientation).solver()?;
    let cone = model.position_cone(&pose.position).solver()?;
    let half = cfg.box_half_width.unwrap_or(DEFAULT_MESH_BOX);
    let surface = mesh_quadric(&omega, pose.position, half, resolution);
    let curve = trace_sphere_curve(&cone, curve_resolution);
    let doc = json!({
        "quadric": {
            "orientation": nums(&pose.orientation),
            "center": nums(&pose.position),
            "half_width": num(half),
            "resolution": resolution,
            "vertices": surface.vertices.iter().map(|v| nums(v)).collect::<Vec<_>>(),
            "triangles": surface.triangles,
        },
        "curve": {
            "position": nums(&pose.position),
            "resolution": curve_resolution,
            "polylines": curve.iter().map(|l| json!({
                "closed": l.closed,
                "points": l.points.iter().map(|p| nums(p)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        },
    });
    Ok(to_json_text(&doc))
}
