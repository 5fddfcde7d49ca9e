//! Scan specifications and their TOML form.
//!
//! ```toml
//! subcommand = "chained"
//! tolerance = 1e-10
//!
//! [grid]
//! n = { start = 2, stop = 64, count = 63 }
//! theta = [3.141592653589793]
//!
//! [options]
//! model = "quantum"
//!
//! [output]
//! path = "chained.csv"
//! format = "csv"
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::kernels::kernel;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Interf,
    Unitarity,
    Franson,
    Chained,
    Extensions,
    Sample,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Interf => "interf",
            Subcommand::Unitarity => "unitarity",
            Subcommand::Franson => "franson",
            Subcommand::Chained => "chained",
            Subcommand::Extensions => "extensions",
            Subcommand::Sample => "sample",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Values of one scanned parameter: an explicit list or `count` evenly
/// spaced points from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => {
                    let step = (stop - start) / (count - 1) as f64;
                    let mut v: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
                    v[count - 1] = stop;
                    v
                }
            },
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Values(v) => v.len(),
            Grid::Range { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            Grid::Values(v) => v.serialize(serializer),
            Grid::Range { start, stop, count } => {
                let mut s = serializer.serialize_struct("Range", 3)?;
                s.serialize_field("start", start)?;
                s.serialize_field("stop", stop)?;
                s.serialize_field("count", count)?;
                s.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct GridVisitor;

        impl<'de> Visitor<'de> for GridVisitor {
            type Value = Grid;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a list of numbers or a table {start, stop, count}")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Grid, E> {
                Ok(Grid::Values(vec![v]))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Grid, E> {
                Ok(Grid::Values(vec![v as f64]))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Grid, E> {
                Ok(Grid::Values(vec![v as f64]))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Grid, A::Error> {
                let mut values = Vec::new();
                while let Some(v) = seq.next_element::<f64>()? {
                    values.push(v);
                }
                Ok(Grid::Values(values))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Grid, A::Error> {
                let (mut start, mut stop, mut count) = (None, None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "start" => start = Some(map.next_value::<f64>()?),
                        "stop" => stop = Some(map.next_value::<f64>()?),
                        "count" => count = Some(map.next_value::<usize>()?),
                        other => return Err(de::Error::unknown_field(other, &["start", "stop", "count"])),
                    }
                }
                Ok(Grid::Range {
                    start: start.ok_or_else(|| de::Error::missing_field("start"))?,
                    stop: stop.ok_or_else(|| de::Error::missing_field("stop"))?,
                    count: count.ok_or_else(|| de::Error::missing_field("count"))?,
                })
            }
        }

        deserializer.deserialize_any(GridVisitor)
    }
}

/// A non-numeric switch such as the correlation model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OptionValue {
    Bool(bool),
    Number(f64),
    Text(String),
}

impl OptionValue {
    /// `true`/`false`, then a number, then free text.
    pub fn parse(s: &str) -> Self {
        match s {
            "true" => OptionValue::Bool(true),
            "false" => OptionValue::Bool(false),
            _ => s.parse().map(OptionValue::Number).unwrap_or_else(|_| OptionValue::Text(s.to_string())),
        }
    }
}

impl fmt::Display for OptionValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptionValue::Bool(b) => write!(f, "{b}"),
            OptionValue::Number(x) => write!(f, "{x}"),
            OptionValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub subcommand: Subcommand,
    #[serde(default)]
    pub grid: IndexMap<String, Grid>,
    #[serde(default)]
    pub options: IndexMap<String, OptionValue>,
    #[serde(default)]
    pub output: Output,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl ScanSpec {
    pub fn new(subcommand: Subcommand) -> Self {
        ScanSpec {
            subcommand,
            grid: IndexMap::new(),
            options: IndexMap::new(),
            output: Output::default(),
            seed: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn to_toml(&self) -> Result<String, toml::ser::Error> {
        toml::to_string(self)
    }

    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        let spec: ScanSpec = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks everything that can be checked before running a row.
    pub fn validate(&self) -> Result<(), SpecError> {
        let field = |field: String, message: String| Err(SpecError::Field { field, message });
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return field("tolerance".into(), format!("must be positive and finite, got {}", self.tolerance));
        }
        if self.subcommand == Subcommand::Sample && self.seed.is_none() {
            return field("seed".into(), "required for `sample`".into());
        }
        let k = kernel(self.subcommand, &self.options)
            .map_err(|(key, message)| SpecError::Field { field: format!("options.{key}"), message })?;
        for (name, grid) in &self.grid {
            let Some(param) = k.params.iter().find(|p| p.name == name) else {
                let known: Vec<&str> = k.params.iter().map(|p| p.name).collect();
                return field(
                    format!("grid.{name}"),
                    format!("unknown parameter for `{}`; expected one of: {}", self.subcommand, known.join(", ")),
                );
            };
            if grid.is_empty() {
                return field(format!("grid.{name}"), "grid must be nonempty".into());
            }
            if let Grid::Range { start, stop, .. } = grid {
                if !start.is_finite() || !stop.is_finite() {
                    return field(format!("grid.{name}"), "range bounds must be finite".into());
                }
            }
            for v in grid.points() {
                if v.is_nan() {
                    return field(format!("grid.{name}"), "values must be numbers".into());
                }
                if param.integer && !(v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64) {
                    return field(format!("grid.{name}"), format!("must hold non-negative integers, got {v}"));
                }
            }
        }
        for p in k.params.iter().filter(|p| p.default.is_none()) {
            if !self.grid.contains_key(p.name) {
                return field(format!("grid.{}", p.name), "required parameter has no values".into());
            }
        }
        Ok(())
    }

    /// Grid points in row order: the first declared parameter varies
    /// slowest.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self.grid.values().map(Grid::points).collect();
        let mut rows = vec![Vec::new()];
        for axis in &axes {
            rows = rows
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut r = prefix.clone();
                        r.push(v);
                        r
                    })
                })
                .collect();
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid scan specification: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {message}")]
    Field { field: String, message: String },
}

pub fn load_config(path: &Path) -> Result<ScanSpec, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::Io { path: path.display().to_string(), message: e.to_string() })?;
    ScanSpec::from_toml(&text)
}

/// Numbers with an optional `pi` factor: `0.5`, `pi`, `-2pi`, `pi/4`,
/// `3pi/2`.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let den: f64 = den.trim().parse().ok()?;
        return parse_number(num).map(|n| n / den);
    }
    if let Some(coef) = s.strip_suffix("pi") {
        let c = match coef.trim().trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse().ok()?,
        };
        return Some(c * std::f64::consts::PI);
    }
    s.parse().ok()
}

/// `start:stop:count` or a comma-separated list.
pub fn parse_grid(s: &str) -> Option<Grid> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        return Some(Grid::Range {
            start: parse_number(parts[0])?,
            stop: parse_number(parts[1])?,
            count: parts[2].trim().parse().ok()?,
        });
    }
    s.split(',').map(parse_number).collect::<Option<Vec<_>>>().map(Grid::Values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = ScanSpec::from_toml("subcommand = \"chained\"\n[grid]\nn = [2, 3]\n").unwrap();
        assert_eq!(s.tolerance, DEFAULT_TOLERANCE);
        assert_eq!(s.output.format, Format::Csv);
        assert_eq!(s.output.path, None);
        assert_eq!(s.seed, None);
        assert_eq!(s.rows(), vec![vec![2.0], vec![3.0]]);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = ScanSpec::from_toml("subcommand = \"chained\"\nsped = 3\n[grid]\nn = [2]\n").unwrap_err();
        assert!(e.to_string().contains("sped"), "{e}");
        let e =
            ScanSpec::from_toml("subcommand = \"chained\"\n[grid]\nn = {start = 2, stop = 3, cnt = 2}\n").unwrap_err();
        assert!(e.to_string().contains("cnt"), "{e}");
        let e = ScanSpec::from_toml("subcommand = \"chained\"\n[grid]\nn = [2]\nm = [1]\n").unwrap_err();
        assert!(e.to_string().contains("grid.m"), "{e}");
    }

    #[test]
    fn empty_grid_is_rejected() {
        let e = ScanSpec::from_toml("subcommand = \"chained\"\n[grid]\nn = []\n").unwrap_err();
        assert_eq!(e, SpecError::Field { field: "grid.n".into(), message: "grid must be nonempty".into() });
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = ScanSpec::from_toml("subcommand = \"chained\"\n[grid\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }

    #[test]
    fn sample_requires_seed() {
        let e = ScanSpec::from_toml("subcommand = \"sample\"\n").unwrap_err();
        assert!(matches!(e, SpecError::Field { ref field, .. } if field == "seed"));
    }

    #[test]
    fn range_points() {
        let g = Grid::Range { start: 0.0, stop: 2.0 * PI, count: 101 };
        let p = g.points();
        assert_eq!(p.len(), 101);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[100], 2.0 * PI);
    }

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("pi"), Some(PI));
        assert_eq!(parse_number("-pi"), Some(-PI));
        assert_eq!(parse_number("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_number("3pi/2"), Some(3.0 * PI / 2.0));
        assert_eq!(parse_number("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("x"), None);
        assert_eq!(parse_grid("0:2pi:5").unwrap().len(), 5);
        assert_eq!(parse_grid("2,3,4"), Some(Grid::Values(vec![2.0, 3.0, 4.0])));
    }

    #[test]
    fn row_order_is_first_parameter_slowest() {
        let s = ScanSpec::from_toml("subcommand = \"chained\"\n[grid]\nn = [2, 3]\ntheta = [0.0, 1.0]\n").unwrap();
        assert_eq!(s.rows(), vec![vec![2.0, 0.0], vec![2.0, 1.0], vec![3.0, 0.0], vec![3.0, 1.0]]);
    }
}
