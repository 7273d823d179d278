//! Plot-ready tables written as `#`-commented CSV or as JSON with the same content.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::config::{Format, RunConfig};
use super::CliError;

const ECHO_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

/// A named check with its measured value and limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value < limit,
        }
    }

    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }

    fn line(&self) -> String {
        format!(
            "{} = {:e} (limit {:e}) {}",
            self.name,
            self.value,
            self.limit,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// File stem.
    pub name: String,
    pub metadata: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match &r[idx] {
                Cell::Num(v) => Some(*v),
                Cell::Int(v) => Some(*v as f64),
                _ => None,
            })
            .collect()
    }

    pub fn render(&self, config: &RunConfig) -> Result<String, CliError> {
        let echo = serde_json::to_string(config).map_err(|e| CliError::Parse(e.to_string()))?;
        match config.format {
            Format::Csv => {
                let mut out = String::new();
                writeln!(out, "{ECHO_PREFIX}{echo}").unwrap();
                for (k, v) in &self.metadata {
                    writeln!(out, "# {k}: {}", v.csv()).unwrap();
                }
                writeln!(out, "{}", self.columns.join(",")).unwrap();
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(",")).unwrap();
                }
                for check in &self.checks {
                    writeln!(out, "# check: {}", check.line()).unwrap();
                }
                Ok(out)
            }
            Format::Json => {
                let metadata: Map<String, Value> = self
                    .metadata
                    .iter()
                    .map(|(k, v)| (k.clone(), v.json()))
                    .collect();
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let checks: Vec<Value> = self
                    .checks
                    .iter()
                    .map(|c| json!({"name": c.name, "value": c.value, "limit": c.limit, "passed": c.passed}))
                    .collect();
                let doc = json!({
                    "config": config,
                    "metadata": metadata,
                    "columns": self.columns,
                    "rows": rows,
                    "checks": checks,
                });
                let mut text = serde_json::to_string_pretty(&doc)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
        }
    }

    pub fn write(&self, dir: &Path, config: &RunConfig) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.{}", self.name, config.format.extension()));
        std::fs::write(&path, self.render(config)?)?;
        Ok(path)
    }
}

/// Recover the run configuration echoed at the top of an output file.
pub fn read_config_echo(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_echo(&text)
}

pub fn parse_config_echo(text: &str) -> Result<RunConfig, CliError> {
    let bad = |e: serde_json::Error| CliError::Parse(format!("config echo: {e}"));
    if let Some(line) = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix(ECHO_PREFIX))
    {
        return serde_json::from_str(line).map_err(bad);
    }
    let doc: Value = serde_json::from_str(text).map_err(bad)?;
    let config = doc
        .get("config")
        .cloned()
        .ok_or_else(|| CliError::Parse("no config echo found".into()))?;
    serde_json::from_value(config).map_err(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{CommandConfig, OscillatorInput, TemperatureInput};

    fn table() -> Table {
        let mut t = Table::new("demo", &["x", "p", "label"]);
        t.meta("theta", 0.5);
        t.push(vec![Cell::Num(-1.5), Cell::Num(1e-300), "a".into()]);
        t.push(vec![Cell::Num(0.1), Cell::Int(3), "b".into()]);
        t.checks.push(Check::below("max_dev", 1e-11, 1e-10));
        t
    }

    fn config(format: Format) -> RunConfig {
        RunConfig::new(
            CommandConfig::VarianceTable,
            OscillatorInput::Reduced { alpha: 1.0 },
            TemperatureInput::Theta(vec![0.5]),
            format,
        )
    }

    #[test]
    fn csv_layout() {
        let text = table().render(&config(Format::Csv)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# config: {"));
        assert_eq!(lines[1], "# theta: 5e-1");
        assert_eq!(lines[2], "x,p,label");
        assert_eq!(lines[3], "-1.5e0,1e-300,a");
        assert_eq!(lines[5], "# check: max_dev = 1e-11 (limit 1e-10) PASS");
        assert_eq!(parse_config_echo(&text).unwrap(), config(Format::Csv));
    }

    #[test]
    fn json_layout() {
        let text = table().render(&config(Format::Json)).unwrap();
        let doc: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["columns"][2], "label");
        assert_eq!(doc["rows"][0][1], 1e-300);
        assert_eq!(doc["checks"][0]["passed"], true);
        assert_eq!(parse_config_echo(&text).unwrap(), config(Format::Json));
    }

    #[test]
    fn numbers_round_trip_through_csv() {
        for v in [0.1, 1.0 / 3.0, 6.565_176e-1, f64::MIN_POSITIVE, 12345.678] {
            let s = Cell::Num(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
