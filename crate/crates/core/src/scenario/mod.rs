//! Scenario files: named operations with parameters, golden-number
//! assertions and CSV/SVG artifacts.
//!
//! ```text
//! [run]
//! out_dir = out
//! seed = 1
//!
//! [scenario portraits]
//! operation = sos
//! kparam = 0.4, 1.1, 4.0
//! assert.rotational[0.4] = >= 1
//! ```

pub mod catalog;
pub mod config;
mod ops;

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{ChaosError, Result};

pub use catalog::{catalog, catalog_entry, listing, CatalogEntry};
pub use config::{parse_config, ConfigFile, Entry, Params, Section};
pub use ops::OPERATIONS;

/// Golden-number check on one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `|v − expected| ≤ tol`.
    Within { expected: f64, tol: f64 },
    /// `|v − expected| ≤ rel·|expected|`.
    Relative { expected: f64, rel: f64 },
    AtLeast(f64),
    AtMost(f64),
    Above(f64),
    Below(f64),
    Equals(f64),
}

impl Check {
    /// `V +- T`, `V +- P%`, `>= V`, `<= V`, `> V`, `< V` or `== V`.
    pub fn parse(s: &str, line: usize) -> Result<Self> {
        let s = s.trim();
        let num = |x: &str| config::parse_f64(x, line);
        for (op, make) in [
            (">=", Check::AtLeast as fn(f64) -> Check),
            ("<=", Check::AtMost),
            ("==", Check::Equals),
            (">", Check::Above),
            ("<", Check::Below),
        ] {
            if let Some(rest) = s.strip_prefix(op) {
                return Ok(make(num(rest)?));
            }
        }
        let split = s.split_once("+-").or_else(|| s.split_once('±'));
        match split {
            Some((v, t)) => {
                let expected = num(v)?;
                let t = t.trim();
                match t.strip_suffix('%') {
                    Some(pct) => Ok(Check::Relative {
                        expected,
                        rel: num(pct)? / 100.0,
                    }),
                    None => Ok(Check::Within { expected, tol: num(t)? }),
                }
            }
            None => Err(ChaosError::Config {
                line,
                message: format!("cannot read assertion `{s}`"),
            }),
        }
    }

    pub fn passes(&self, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match *self {
            Check::Within { expected, tol } => (v - expected).abs() <= tol,
            Check::Relative { expected, rel } => (v - expected).abs() <= rel * expected.abs(),
            Check::AtLeast(x) => v >= x,
            Check::AtMost(x) => v <= x,
            Check::Above(x) => v > x,
            Check::Below(x) => v < x,
            Check::Equals(x) => v == x,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Check::Within { expected, tol } => format!("{expected} ± {tol:e}"),
            Check::Relative { expected, rel } => format!("{expected} ± {}%", rel * 100.0),
            Check::AtLeast(x) => format!(">= {x}"),
            Check::AtMost(x) => format!("<= {x}"),
            Check::Above(x) => format!("> {x}"),
            Check::Below(x) => format!("< {x}"),
            Check::Equals(x) => format!("== {x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub metric: String,
    pub check: Check,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub operation: String,
    pub anchor: Option<String>,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    spec: ops::OpSpec,
}

impl Scenario {
    fn from_section(section: &Section, default_seed: u64) -> Result<Self> {
        let name = section.name.clone().ok_or_else(|| ChaosError::Config {
            line: section.line,
            message: "scenario section needs a name: [scenario NAME]".into(),
        })?;
        let p = Params::new(section);
        let operation = p.opt_str("operation").ok_or_else(|| ChaosError::Config {
            line: section.line,
            message: format!("scenario `{name}` has no operation"),
        })?;
        let anchor = p.opt_str("anchor");
        let seed = p.u64_or("seed", default_seed)?;
        let mut assertions = Vec::new();
        for e in p.prefixed("assert.") {
            assertions.push(Assertion {
                metric: e.key["assert.".len()..].to_string(),
                check: Check::parse(&e.value, e.line)?,
                line: e.line,
            });
        }
        let spec = ops::OpSpec::parse(&operation, &p, section.line)?;
        p.finish()?;
        Ok(Self {
            name,
            operation,
            anchor,
            seed,
            assertions,
            spec,
        })
    }
}

/// Settings from the optional `[run]` section.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSettings {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub assert: bool,
}

/// Validate a parsed file into run settings and scenarios.
pub fn load(cfg: &ConfigFile) -> Result<(RunSettings, Vec<Scenario>)> {
    let mut settings = RunSettings::default();
    let mut seen_run = false;
    for s in cfg.sections.iter().filter(|s| s.kind == "run") {
        if seen_run {
            return Err(ChaosError::Config {
                line: s.line,
                message: "more than one [run] section".into(),
            });
        }
        seen_run = true;
        let p = Params::new(s);
        settings.out_dir = p.opt_str("out_dir").map(PathBuf::from);
        settings.seed = match p.opt_str("seed") {
            Some(_) => Some(p.u64_or("seed", 0)?),
            None => None,
        };
        settings.assert = match p.str_or("assert", "false").as_str() {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            other => {
                return Err(ChaosError::Config {
                    line: s.line,
                    message: format!("`assert` takes true or false, got `{other}`"),
                })
            }
        };
        p.finish()?;
    }
    let mut scenarios: Vec<Scenario> = Vec::new();
    for s in &cfg.sections {
        match s.kind.as_str() {
            "run" => {}
            "scenario" => {
                let sc = Scenario::from_section(s, settings.seed.unwrap_or(1))?;
                if scenarios.iter().any(|o| o.name == sc.name) {
                    return Err(ChaosError::Config {
                        line: s.line,
                        message: format!("duplicate scenario `{}`", sc.name),
                    });
                }
                scenarios.push(sc);
            }
            other => {
                return Err(ChaosError::Config {
                    line: s.line,
                    message: format!("unknown section kind `{other}`"),
                })
            }
        }
    }
    Ok((settings, scenarios))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub metric: String,
    pub check: Check,
    pub value: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub name: String,
    pub operation: String,
    pub metrics: Vec<Metric>,
    /// Empty unless assertions were enabled.
    pub checks: Vec<CheckOutcome>,
    /// In-memory artifacts, written by [`run_all`] when an output directory is set.
    pub artifacts: Vec<Artifact>,
}

impl ScenarioReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Summary table: one row per metric, with the check when there is one.
    pub fn table(&self) -> String {
        let mut out = format!("== {} ({})\n", self.name, self.operation);
        let width = self.metrics.iter().map(|m| m.name.len()).max().unwrap_or(0).max(6);
        for m in &self.metrics {
            let check = self.checks.iter().find(|c| c.metric == m.name);
            let tail = match check {
                Some(c) => format!("  [{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.check.describe()),
                None => String::new(),
            };
            out += &format!("  {:<width$}  {:>24.12e}{}\n", m.name, m.value, tail);
        }
        for c in self.checks.iter().filter(|c| c.value.is_none()) {
            out += &format!("  {:<width$}  {:>24}  [FAIL] {}\n", c.metric, "missing", c.check.describe());
        }
        out
    }
}

/// Run one scenario in memory.
pub fn run_scenario(s: &Scenario, assert: bool) -> Result<ScenarioReport> {
    let outcome = s.spec.run(s.seed)?;
    let checks = if assert {
        s.assertions
            .iter()
            .map(|a| {
                let value = outcome.metrics.iter().find(|m| m.name == a.metric).map(|m| m.value);
                CheckOutcome {
                    metric: a.metric.clone(),
                    check: a.check,
                    value,
                    passed: value.map(|v| a.check.passes(v)).unwrap_or(false),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(ScenarioReport {
        name: s.name.clone(),
        operation: s.operation.clone(),
        metrics: outcome.metrics,
        checks,
        artifacts: outcome.artifacts,
    })
}

/// Run every scenario, then write artifacts under `out_dir/<scenario>/`.
/// On any failure the files written by this call are removed.
pub fn run_all(scenarios: &[Scenario], out_dir: Option<&Path>, assert: bool) -> Result<Vec<ScenarioReport>> {
    let mut reports = Vec::with_capacity(scenarios.len());
    for s in scenarios {
        reports.push(run_scenario(s, assert)?);
    }
    if let Some(dir) = out_dir {
        let mut written: Vec<PathBuf> = Vec::new();
        let mut created: Vec<PathBuf> = Vec::new();
        if let Err(e) = write_artifacts(&reports, dir, &mut written, &mut created) {
            for f in written.iter().rev() {
                let _ = fs::remove_file(f);
            }
            for d in created.iter().rev() {
                let _ = fs::remove_dir(d);
            }
            return Err(e);
        }
    }
    Ok(reports)
}

fn write_artifacts(
    reports: &[ScenarioReport],
    dir: &Path,
    written: &mut Vec<PathBuf>,
    created: &mut Vec<PathBuf>,
) -> Result<()> {
    for r in reports.iter().filter(|r| !r.artifacts.is_empty()) {
        let sub = dir.join(&r.name);
        let mut missing = Vec::new();
        let mut cur = sub.as_path();
        while !cur.exists() {
            missing.push(cur.to_path_buf());
            match cur.parent() {
                Some(p) if !p.as_os_str().is_empty() => cur = p,
                _ => break,
            }
        }
        fs::create_dir_all(&sub)?;
        created.extend(missing.into_iter().rev());
        for a in &r.artifacts {
            let path = sub.join(&a.file);
            fs::write(&path, &a.contents)?;
            written.push(path);
        }
    }
    Ok(())
}

/// Parse and run a scenario file. CLI values override the `[run]` section.
pub fn run_text(text: &str, out_dir: Option<&Path>, seed: Option<u64>, assert: bool) -> Result<Vec<ScenarioReport>> {
    let cfg = parse_config(text)?;
    let (settings, mut scenarios) = load(&cfg)?;
    if let Some(seed) = seed {
        for s in &mut scenarios {
            s.seed = seed;
        }
    }
    let dir = out_dir.map(Path::to_path_buf).or(settings.out_dir);
    run_all(&scenarios, dir.as_deref(), assert || settings.assert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_grammar() {
        assert_eq!(
            Check::parse("3.5 +- 1e-4", 1).unwrap(),
            Check::Within { expected: 3.5, tol: 1e-4 }
        );
        assert_eq!(
            Check::parse("68.35 +- 0.5%", 1).unwrap(),
            Check::Relative { expected: 68.35, rel: 0.005 }
        );
        assert_eq!(Check::parse(">= 2", 1).unwrap(), Check::AtLeast(2.0));
        assert_eq!(Check::parse("< 0.5", 1).unwrap(), Check::Below(0.5));
        assert_eq!(Check::parse("== 16", 1).unwrap(), Check::Equals(16.0));
        assert!(Check::parse("about 3", 7).is_err());
        assert!(!Check::AtLeast(1.0).passes(f64::NAN));
    }

    #[test]
    fn empty_file_runs_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let reports = run_text("# nothing\n[run]\nseed = 4\n", Some(&out), None, true).unwrap();
        assert!(reports.is_empty());
        assert!(!out.exists());
    }

    #[test]
    fn scenario_needs_known_operation() {
        let cfg = parse_config("[scenario x]\noperation = teleport\n").unwrap();
        assert!(matches!(load(&cfg), Err(ChaosError::Config { line: 1, .. })));
        let cfg = parse_config("[scenario x]\noperation = airy\npoints = -5\ncolour = red\n").unwrap();
        assert!(matches!(load(&cfg), Err(ChaosError::Config { line: 4, .. })));
    }
}
