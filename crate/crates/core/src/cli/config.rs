//! Run configuration: defaults, a flat `key = value` file, the seed
//! environment variable and command-line flags, merged in that order of
//! increasing precedence (the environment seed only fills a missing seed).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use crate::env::{ModelParams, DEFAULT_MAX_SEARCH_HEIGHT};
use crate::error::{Error, Result};
use crate::joint::DEFAULT_T_CAP;

pub const SEED_ENV: &str = "DRAINAGE_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeMode {
    Pairs,
    Box,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub d: usize,
    pub p: f64,
    pub seed: u64,
    pub max_search_height: u32,
    pub n_replicates: u64,
    pub height: i64,
    pub t_cap: i64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub overwrite: bool,
    /// Pair offsets for `coalesce`.
    pub x: Vec<i64>,
    pub t_min: i64,
    pub t_max: i64,
    pub t_points: usize,
    /// Gap pairs for `triple`.
    pub gaps: Vec<(i64, i64)>,
    /// Diffusive index for `scaling` and `eta`; 0 skips the endpoint sample.
    pub n_scale: u32,
    pub t: f64,
    pub epsilon: Vec<f64>,
    pub start_gap: i64,
    pub renewals: usize,
    pub spacing: i64,
    pub half_width: i64,
    pub mode: TreeMode,
    pub all_open: bool,
    pub m_max: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 2,
            p: 0.5,
            seed: 0,
            max_search_height: DEFAULT_MAX_SEARCH_HEIGHT,
            n_replicates: 1000,
            height: 100,
            t_cap: DEFAULT_T_CAP,
            format: Format::Csv,
            out: None,
            threads: None,
            overwrite: false,
            x: vec![1, 2, 4, 8],
            t_min: 100,
            t_max: 10_000,
            t_points: 9,
            gaps: vec![(1, 1), (2, 2), (4, 4), (8, 8)],
            n_scale: 0,
            t: 1.0,
            epsilon: vec![0.5, 0.25],
            start_gap: 1,
            renewals: 100,
            spacing: 10,
            half_width: 25,
            mode: TreeMode::Pairs,
            all_open: false,
            m_max: 8,
        }
    }
}

/// Every key accepted in a config file or as a flag.
pub const KEYS: &[&str] = &[
    "d", "p", "seed", "max_search_height", "n_replicates", "height", "t_cap", "format", "out", "threads",
    "overwrite", "x", "t_min", "t_max", "t_points", "gaps", "n_scale", "t", "epsilon", "start_gap", "renewals",
    "spacing", "half_width", "mode", "all_open", "m_max",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: Display,
{
    v.trim().parse().map_err(|e: T::Err| Error::invalid(key, format!("cannot parse {v:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => Err(Error::invalid(key, format!("expected a boolean, got {other:?}"))),
    }
}

/// Parses the flat `key = value` format; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid("config", format!("line {} is not key=value", i + 1)))?;
        let k = k.trim().replace('-', "_");
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::invalid("config", format!("unknown key {k:?} on line {}", i + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

impl RunConfig {
    /// Merges `file` then `flags` over the defaults; `env_seed` is used
    /// only when neither sets a seed.
    pub fn resolve(
        file: &BTreeMap<String, String>,
        flags: &BTreeMap<String, String>,
        env_seed: Option<&str>,
    ) -> Result<Self> {
        let mut merged = file.clone();
        for (k, v) in flags {
            merged.insert(k.clone(), v.clone());
        }
        if !merged.contains_key("seed") {
            if let Some(s) = env_seed {
                merged.insert("seed".into(), s.to_string());
            }
        }
        let mut c = RunConfig::default();
        for (k, v) in &merged {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "d" => self.d = parse(key, v)?,
            "p" => self.p = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "max_search_height" => self.max_search_height = parse(key, v)?,
            "n_replicates" => self.n_replicates = parse(key, v)?,
            "height" => self.height = parse(key, v)?,
            "t_cap" => self.t_cap = parse(key, v)?,
            "format" => {
                self.format = match v.trim() {
                    "csv" => Format::Csv,
                    "json" | "jsonl" => Format::Json,
                    other => return Err(Error::invalid(key, format!("expected csv or json, got {other:?}"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(v.trim())),
            "threads" => self.threads = Some(parse(key, v)?),
            "overwrite" => self.overwrite = parse_bool(key, v)?,
            "x" => self.x = parse_list(key, v)?,
            "t_min" => self.t_min = parse(key, v)?,
            "t_max" => self.t_max = parse(key, v)?,
            "t_points" => self.t_points = parse(key, v)?,
            "gaps" => {
                self.gaps = v
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| {
                        let (a, b) = s
                            .split_once('x')
                            .ok_or_else(|| Error::invalid(key, format!("expected AxB, got {s:?}")))?;
                        Ok((parse(key, a)?, parse(key, b)?))
                    })
                    .collect::<Result<_>>()?
            }
            "n_scale" => self.n_scale = parse(key, v)?,
            "t" => self.t = parse(key, v)?,
            "epsilon" => self.epsilon = parse_list(key, v)?,
            "start_gap" => self.start_gap = parse(key, v)?,
            "renewals" => self.renewals = parse(key, v)?,
            "spacing" => self.spacing = parse(key, v)?,
            "half_width" => self.half_width = parse(key, v)?,
            "mode" => {
                self.mode = match v.trim() {
                    "pairs" => TreeMode::Pairs,
                    "box" => TreeMode::Box,
                    other => return Err(Error::invalid(key, format!("expected pairs or box, got {other:?}"))),
                }
            }
            "all_open" => self.all_open = parse_bool(key, v)?,
            "m_max" => self.m_max = parse(key, v)?,
            other => return Err(Error::invalid("config", format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let positive = |key: &str, ok: bool| if ok { Ok(()) } else { Err(Error::invalid(key, "must be positive")) };
        positive("n_replicates", self.n_replicates > 0)?;
        positive("height", self.height > 0)?;
        positive("t_cap", self.t_cap > 0)?;
        positive("threads", self.threads.is_none_or(|t| t > 0))?;
        positive("t_min", self.t_min > 0)?;
        positive("t", self.t > 0.0)?;
        positive("renewals", self.renewals > 0)?;
        if self.t_max < self.t_min {
            return Err(Error::invalid("t_max", "must be at least t_min"));
        }
        if self.t_points < 2 {
            return Err(Error::invalid("t_points", "need at least two grid points"));
        }
        if self.x.iter().any(|&x| x < 1) || self.x.is_empty() {
            return Err(Error::invalid("x", "offsets must be positive"));
        }
        if self.gaps.iter().any(|&(a, b)| a < 1 || b < 1) || self.gaps.is_empty() {
            return Err(Error::invalid("gaps", "gaps must be positive"));
        }
        if self.epsilon.iter().any(|&e| e.is_nan() || e < 0.0) || self.epsilon.is_empty() {
            return Err(Error::invalid("epsilon", "must be non-negative"));
        }
        if self.start_gap < 1 {
            return Err(Error::invalid("start_gap", "must be positive"));
        }
        if self.spacing < 0 || self.half_width < 0 {
            return Err(Error::invalid("spacing", "extents must be non-negative"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::with_search_height(self.d, self.p, self.seed, self.max_search_height)
    }

    /// `key=value` pairs describing the run, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("d".into(), self.d.to_string()),
            ("p".into(), self.p.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("max_search_height".into(), self.max_search_height.to_string()),
            ("n_replicates".into(), self.n_replicates.to_string()),
            ("height".into(), self.height.to_string()),
            ("t_cap".into(), self.t_cap.to_string()),
            ("x".into(), list(&self.x)),
            ("t_min".into(), self.t_min.to_string()),
            ("t_max".into(), self.t_max.to_string()),
            ("t_points".into(), self.t_points.to_string()),
            (
                "gaps".into(),
                self.gaps.iter().map(|(a, b)| format!("{a}x{b}")).collect::<Vec<_>>().join(","),
            ),
            ("n_scale".into(), self.n_scale.to_string()),
            ("t".into(), self.t.to_string()),
            ("epsilon".into(), self.epsilon.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")),
            ("start_gap".into(), self.start_gap.to_string()),
            ("renewals".into(), self.renewals.to_string()),
            ("spacing".into(), self.spacing.to_string()),
            ("half_width".into(), self.half_width.to_string()),
            ("mode".into(), format!("{:?}", self.mode).to_lowercase()),
            ("all_open".into(), self.all_open.to_string()),
            ("m_max".into(), self.m_max.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file_and_env_fills_seed() {
        let file = parse_config_file("p = 0.3\n# note\nheight=50\nseed = 4\n").unwrap();
        let c = RunConfig::resolve(&file, &map(&[("p", "0.7")]), Some("99")).unwrap();
        assert_eq!((c.p, c.height, c.seed), (0.7, 50, 4));
        let c = RunConfig::resolve(&map(&[]), &map(&[]), Some("99")).unwrap();
        assert_eq!(c.seed, 99);
    }

    #[test]
    fn bad_values_name_their_field() {
        let err = RunConfig::resolve(&map(&[]), &map(&[("p", "1.5")]), None).unwrap_err();
        assert!(err.to_string().contains("invalid p"), "{err}");
        let err = RunConfig::resolve(&map(&[]), &map(&[("height", "abc")]), None).unwrap_err();
        assert!(err.to_string().contains("invalid height"), "{err}");
        assert!(parse_config_file("bogus = 1").is_err());
    }

    #[test]
    fn lists_parse() {
        let c = RunConfig::resolve(&map(&[("gaps", "1x2,3x4"), ("x", "1,5")]), &map(&[]), None).unwrap();
        assert_eq!(c.gaps, vec![(1, 2), (3, 4)]);
        assert_eq!(c.x, vec![1, 5]);
    }
}
