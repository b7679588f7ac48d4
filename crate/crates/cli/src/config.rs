//! Job configuration: a JSON document with exact numeric entries.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use pentapod_core::polyalg::{parse_rational, rational_from_decimal_f64, rint, Scalar};
use pentapod_core::{Architecture, Configuration, Mode};
use serde::Deserialize;

/// Largest deviation of `‖i‖` from one that is silently repaired.
pub const NORMALIZE_LIMIT: f64 = 1e-6;

/// A decimal literal or a `"p/q"` string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn exact(&self) -> Result<num_rational::BigRational> {
        match self {
            Number::Float(v) if v.is_finite() => Ok(rational_from_decimal_f64(*v)),
            Number::Float(v) => bail!("non-finite number {v}"),
            Number::Text(s) => parse_rational(s).map_err(|e| anyhow!("not a rational number: `{}`", e.0)),
        }
    }

    fn value(&self) -> Result<f64> {
        Ok(self.exact()?.to_f64())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArchitecture {
    base: [[Number; 3]; 5],
    r: [Number; 5],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPose {
    orientation: [Number; 3],
    position: [Number; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParam {
    t: Option<Vec<[Number; 4]>>,
    grid: Option<usize>,
    range: Option<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMesh {
    resolution: Option<usize>,
    curve_resolution: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    architecture: RawArchitecture,
    pose: Option<RawPose>,
    mode: Option<String>,
    tol: Option<Number>,
    seed: Option<u64>,
    starts: Option<usize>,
    #[serde(rename = "box")]
    box_half_width: Option<Number>,
    format: Option<String>,
    param: Option<RawParam>,
    mesh: Option<RawMesh>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => bail!("unknown format `{s}` (expected csv or json)"),
        }
    }
}

/// How `param` picks its parameter values.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSource {
    Values(Vec<[f64; 4]>),
    Grid { n: usize, range: f64 },
}

#[derive(Debug, Clone)]
pub struct JobConfig {
    pub architecture: Architecture,
    pub pose: Option<Configuration>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub box_half_width: Option<f64>,
    pub format: Option<Format>,
    pub param: Option<ParamSource>,
    pub resolution: Option<usize>,
    pub curve_resolution: Option<usize>,
    pub warnings: Vec<String>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).context("malformed config")?;
        let mut warnings = Vec::new();

        let base = raw.architecture.base.iter().enumerate().map(|(j, a)| {
            let row: Result<Vec<_>> = a.iter().map(Number::exact).collect();
            row.with_context(|| format!("architecture.base[{j}]"))
        });
        let base: Vec<Vec<_>> = base.collect::<Result<_>>()?;
        let r: Vec<_> =
            raw.architecture.r.iter().map(Number::exact).collect::<Result<_>>().context("architecture.r")?;
        let base: [[_; 3]; 5] = std::array::from_fn(|j| std::array::from_fn(|k| base[j][k].clone()));
        let r: [_; 5] = std::array::from_fn(|j| r[j].clone());
        let architecture = Architecture::new(base, r).context("architecture")?;

        let pose = raw.pose.map(|p| read_pose(&p, &mut warnings)).transpose()?;
        let mode = raw.mode.map(|m| Mode::from_str(&m).map_err(|e| anyhow!(e))).transpose()?;
        let tol = raw.tol.map(|t| t.value()).transpose().context("tol")?;
        if let Some(t) = tol {
            if t <= 0.0 {
                bail!("tol must be positive, got {t}");
            }
        }
        if raw.starts == Some(0) {
            bail!("starts must be at least 1");
        }
        let box_half_width = raw.box_half_width.map(|b| b.value()).transpose().context("box")?;
        if let Some(b) = box_half_width {
            if b <= 0.0 {
                bail!("box must be positive, got {b}");
            }
        }
        let format = raw.format.map(|f| f.parse()).transpose()?;
        let param = raw.param.map(read_param).transpose().context("param")?;
        let (resolution, curve_resolution) = match raw.mesh {
            Some(m) => (m.resolution, m.curve_resolution),
            None => (None, None),
        };
        Ok(Self {
            architecture,
            pose,
            mode,
            tol,
            seed: raw.seed,
            starts: raw.starts,
            box_half_width,
            format,
            param,
            resolution,
            curve_resolution,
            warnings,
        })
    }

    pub fn pose(&self) -> Result<&Configuration> {
        self.pose.as_ref().ok_or_else(|| anyhow!("config has no pose"))
    }
}

fn read_pose(raw: &RawPose, warnings: &mut Vec<String>) -> Result<Configuration> {
    let i: Vec<_> = raw.orientation.iter().map(Number::exact).collect::<Result<_>>().context("pose.orientation")?;
    let p: Vec<f64> = raw.position.iter().map(Number::value).collect::<Result<_>>().context("pose.position")?;
    let norm2 = i.iter().fold(rint(0), |acc, x| acc + x * x);
    let mut orientation = [i[0].to_f64(), i[1].to_f64(), i[2].to_f64()];
    if norm2 != rint(1) {
        let norm = norm2.to_f64().sqrt();
        if (norm - 1.0).abs() >= NORMALIZE_LIMIT {
            bail!("pose.orientation has norm {norm}, expected 1");
        }
        orientation = orientation.map(|x| x / norm);
        warnings.push(format!("pose.orientation had norm {norm:.12}; normalized to unit length"));
    }
    Ok(Configuration::new(orientation, [p[0], p[1], p[2]]))
}

fn read_param(raw: RawParam) -> Result<ParamSource> {
    match (raw.t, raw.grid) {
        (Some(_), Some(_)) => bail!("give either t or grid, not both"),
        (Some(t), None) => {
            let values = t
                .iter()
                .map(|row| {
                    let v: Vec<f64> = row.iter().map(Number::value).collect::<Result<_>>()?;
                    Ok([v[0], v[1], v[2], v[3]])
                })
                .collect::<Result<_>>()?;
            Ok(ParamSource::Values(values))
        }
        (None, grid) => {
            let range = raw.range.map(|r| r.value()).transpose()?.unwrap_or(10.0);
            Ok(ParamSource::Grid { n: grid.unwrap_or(100), range })
        }
    }
}

/// Parses `"t1,t2,t3,t4"` from the command line.
pub fn parse_t(text: &str) -> Result<[f64; 4]> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| parse_rational(s).map(|q| q.to_f64()).map_err(|e| anyhow!("not a rational number: `{}`", e.0)))
        .collect::<Result<_>>()?;
    v.try_into().map_err(|v: Vec<f64>| anyhow!("expected four comma-separated values, got {}", v.len()))
}
