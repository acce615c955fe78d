//! Run configuration: a flat `key=value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use crossratio_core::suites::SuiteError;
use crossratio_core::{SpaceSpec, SuiteName};

use crate::CliError;

pub const DEFAULT_SAMPLES: u64 = 1000;
pub const DEFAULT_SEED: u64 = 0;

const TOL_PREFIX: &str = "tol.";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub space: SpaceSpec,
    pub suite: SuiteName,
    pub samples: u64,
    pub seed: u64,
    /// Overrides keyed by suite name; only the selected suite's entry is used.
    pub tolerances: BTreeMap<String, f64>,
    pub report: Option<PathBuf>,
    pub format: Format,
}

/// Unvalidated settings in file order, later entries winning.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got {line:?}", i + 1)))?;
            out.set(key.trim(), value.trim())?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let known = matches!(key, "space" | "suite" | "samples" | "seed" | "report" | "format")
            || key.strip_prefix(TOL_PREFIX).is_some_and(|n| !n.is_empty());
        if !known {
            return Err(CliError::Usage(format!("unknown setting {key:?}")));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Later settings take precedence.
    pub fn overlay(mut self, other: Settings) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn space(&self) -> Result<SpaceSpec, CliError> {
        let s = self.get("space").ok_or_else(|| CliError::Usage("missing --space".into()))?;
        Ok(s.parse()?)
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let suite: SuiteName = self.get("suite").ok_or_else(|| CliError::Usage("missing --suite".into()))?.parse()?;
        let space = self.space()?;
        let samples = self.number("samples", DEFAULT_SAMPLES)?;
        if samples == 0 {
            return Err(SuiteError::NoSamples.into());
        }
        let mut tolerances = BTreeMap::new();
        for (key, value) in &self.0 {
            let Some(name) = key.strip_prefix(TOL_PREFIX) else {
                continue;
            };
            name.parse::<SuiteName>()?;
            let tol: f64 = value.parse().map_err(|_| bad_value(key, value))?;
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(bad_value(key, value));
            }
            tolerances.insert(name.to_string(), tol);
        }
        let format = match self.get("format") {
            None => Format::default(),
            Some(f) => f.parse().map_err(|_| bad_value("format", f))?,
        };
        Ok(RunConfig {
            space,
            suite,
            samples,
            seed: self.number("seed", DEFAULT_SEED)?,
            tolerances,
            report: self.get("report").map(PathBuf::from),
            format,
        })
    }

    fn number(&self, key: &str, default: u64) -> Result<u64, CliError> {
        self.get(key).map_or(Ok(default), |v| v.parse().map_err(|_| bad_value(key, v)))
    }
}

fn bad_value(key: &str, value: &str) -> CliError {
    CliError::Usage(format!("bad value {value:?} for {key}"))
}

impl RunConfig {
    pub fn tolerance(&self) -> Option<f64> {
        self.tolerances.get(self.suite.as_str()).copied()
    }
}

/// Pull `--tol.<name> <value>` and `--tol.<name>=<value>` out of the argument
/// list, since their names are open-ended. Everything after `--` is left alone.
pub fn split_tolerance_flags(args: Vec<OsString>) -> Result<(Vec<OsString>, Settings), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = Settings::default();
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--" {
            rest.push(arg);
            rest.extend(iter);
            break;
        }
        let Some(flag) = arg.to_str().and_then(|s| s.strip_prefix("--")).filter(|s| s.starts_with(TOL_PREFIX)) else {
            rest.push(arg);
            continue;
        };
        let (key, value) = match flag.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = iter.next().ok_or_else(|| CliError::Usage(format!("--{flag} needs a value")))?;
                let v = v.into_string().map_err(|_| CliError::Usage(format!("--{flag}: value is not UTF-8")))?;
                (flag.to_string(), v)
            }
        };
        tols.set(&key, &value)?;
    }
    Ok((rest, tols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn file_values_are_overridden_by_flags() {
        let file = Settings::parse("# run\nspace = tree:3\nsuite=ptolemy\nsamples=10\ntol.ptolemy=1e-3\n").unwrap();
        let mut flags = Settings::default();
        flags.set("samples", "20").unwrap();
        flags.set("tol.ptolemy", "0.5").unwrap();
        let cfg = file.overlay(flags).resolve().unwrap();
        assert_eq!(cfg.samples, 20);
        assert_eq!(cfg.tolerance(), Some(0.5));
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.format, Format::Json);
    }

    #[test]
    fn tolerance_flags_are_split_out() {
        let (rest, tols) =
            split_tolerance_flags(args(&["x", "--tol.chi", "1e-6", "--seed", "3", "--tol.midpoint=2e-7"])).unwrap();
        assert_eq!(rest, args(&["x", "--seed", "3"]));
        assert_eq!(tols.get("tol.chi"), Some("1e-6"));
        assert_eq!(tols.get("tol.midpoint"), Some("2e-7"));
        assert!(split_tolerance_flags(args(&["x", "--tol.chi"])).is_err());
    }

    #[test]
    fn bad_settings_are_usage_errors() {
        assert!(Settings::parse("colour=blue").is_err());
        assert!(Settings::parse("space tree:3").is_err());
        let base = "space=tree:3\nsuite=ptolemy\n";
        for extra in ["samples=0", "samples=-1", "seed=x", "format=xml", "tol.nope=1", "tol.chi=-1", "suite=nope"] {
            let s = Settings::parse(&format!("{base}{extra}")).unwrap();
            assert!(s.resolve().is_err(), "{extra}");
        }
    }
}
