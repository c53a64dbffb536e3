//! Sectioned `key = value` configuration files.
//!
//! ```text
//! # comment
//! [scenario]
//! id = spall
//!
//! [geometry]
//! length = 0.1   # m
//! ```
//!
//! Every value is a plain number in SI units (or a word for `id` and
//! `bending_initiation`). Unknown sections and keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenarios::config::{CohesiveConfig, LoadingConfig, ScenarioConfig, ScenarioId, SolverConfig};

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("scenario", &["id"]),
    ("geometry", &["length", "radius"]),
    ("material", &["youngs_modulus", "density"]),
    ("cohesive", &["sigma_c", "g_c", "alpha", "bending_initiation"]),
    ("penalty", &["beta_p", "beta_t"]),
    ("mesh", &["h"]),
    ("solver", &["load_steps", "tol_rel", "tol_abs", "max_iters", "dt", "t_end", "safety"]),
    ("loading", &["moment", "displacement", "perturbation", "sigma_f", "load_rate", "kappa0"]),
];

struct Entry {
    value: String,
    line: usize,
}

/// Raw entries keyed by `section.key`, plus the line of each section header.
struct Document {
    entries: BTreeMap<String, Entry>,
    sections: BTreeMap<String, usize>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut doc = Document { entries: BTreeMap::new(), sections: BTreeMap::new() };
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::config(line, format!("malformed section header `{body}`")))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(line, format!("unknown section [{name}]")));
                }
                if doc.sections.insert(name.to_string(), line).is_some() {
                    return Err(Error::config(line, format!("duplicate section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let sec = section.as_deref().ok_or_else(|| Error::config(line, "key outside of any section"))?;
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::config(line, format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let allowed = SCHEMA.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(Error::config(line, format!("unknown key `{key}` in [{sec}]")));
            }
            if value.is_empty() {
                return Err(Error::config(line, format!("empty value for `{key}`")));
            }
            let full = format!("{sec}.{key}");
            if doc.entries.contains_key(&full) {
                return Err(Error::config(line, format!("duplicate key `{key}` in [{sec}]")));
            }
            doc.entries.insert(full, Entry { value: value.to_string(), line });
        }
        Ok(doc)
    }

    fn has_section(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    fn end_line(&self, section: &str) -> usize {
        self.sections.get(section).copied().unwrap_or(0)
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => parse_number(&e.value)
                .map(Some)
                .ok_or_else(|| Error::config(e.line, format!("`{key}` is not a number: `{}`", e.value))),
        }
    }

    fn required(&self, key: &str) -> Result<f64> {
        let section = key.split('.').next().unwrap_or("");
        self.number(key)?.ok_or_else(|| Error::config(self.end_line(section), format!("missing key `{key}`")))
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<usize>().map(Some).map_err(|_| {
                Error::config(e.line, format!("`{key}` must be a non-negative integer, got `{}`", e.value))
            }),
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => match e.value.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                other => Err(Error::config(e.line, format!("`{key}` must be true or false, got `{other}`"))),
            },
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|e| e.line).unwrap_or(0)
    }
}

/// Plain decimal or scientific notation; no units, separators or `inf`/`nan`.
pub(crate) fn parse_number(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        && s.chars().any(|c| c.is_ascii_digit());
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses and validates a configuration held in memory.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let doc = Document::parse(text)?;
    if !doc.has_section("scenario") {
        return Err(Error::config(0, "missing [scenario]"));
    }
    let id_entry = doc
        .entries
        .get("scenario.id")
        .ok_or_else(|| Error::config(doc.end_line("scenario"), "missing key `scenario.id`"))?;
    let id: ScenarioId = id_entry.value.parse().map_err(|m: String| Error::config(id_entry.line, m))?;

    let cohesive = if doc.has_section("cohesive") {
        Some(CohesiveConfig {
            sigma_c: doc.required("cohesive.sigma_c")?,
            g_c: doc.required("cohesive.g_c")?,
            alpha: doc.required("cohesive.alpha")?,
            bending_initiation: doc.flag("cohesive.bending_initiation")?.unwrap_or(true),
        })
    } else {
        None
    };
    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        load_steps: doc.count("solver.load_steps")?,
        tol_rel: doc.number("solver.tol_rel")?.unwrap_or(defaults.tol_rel),
        tol_abs: doc.number("solver.tol_abs")?,
        max_iters: doc.count("solver.max_iters")?.unwrap_or(defaults.max_iters),
        dt: doc.number("solver.dt")?,
        t_end: doc.number("solver.t_end")?,
        safety: doc.number("solver.safety")?.unwrap_or(defaults.safety),
    };
    let loading = LoadingConfig {
        moment: doc.number("loading.moment")?,
        displacement: doc.number("loading.displacement")?,
        perturbation: doc.number("loading.perturbation")?,
        sigma_f: doc.number("loading.sigma_f")?,
        load_rate: doc.number("loading.load_rate")?,
        kappa0: doc.number("loading.kappa0")?,
    };
    let config = ScenarioConfig {
        id,
        length: doc.required("geometry.length")?,
        radius: doc.required("geometry.radius")?,
        youngs_modulus: doc.required("material.youngs_modulus")?,
        density: doc.number("material.density")?,
        cohesive,
        beta_p: doc.required("penalty.beta_p")?,
        beta_t: doc.required("penalty.beta_t")?,
        mesh_size: doc.required("mesh.h")?,
        solver,
        loading,
    };
    config.validate().map_err(|e| match e {
        // attach the offending line where the message names a key
        Error::Config { line: 0, message } => {
            let line = SCHEMA
                .iter()
                .flat_map(|(s, keys)| keys.iter().map(move |k| format!("{s}.{k}")))
                .find(|k| message.contains(k.as_str()))
                .map(|k| doc.line_of(&k))
                .or_else(|| {
                    ["beta_p", "beta_t"]
                        .iter()
                        .find(|k| message.contains(*k))
                        .map(|k| doc.line_of(&format!("penalty.{k}")))
                })
                .unwrap_or(0);
            Error::Config { line, message }
        }
        other => other,
    })?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

/// Writes `config` in the format read by [`parse_config_str`].
pub fn serialize_config(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    let mut section = |name: &str, entries: &[(&str, Option<String>)]| {
        let present: Vec<_> = entries.iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect();
        if present.is_empty() {
            return;
        }
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "[{name}]");
        for (k, v) in present {
            let _ = writeln!(out, "{k} = {v}");
        }
    };
    let num = |v: f64| Some(format!("{v:e}"));
    let opt = |v: Option<f64>| v.map(|v| format!("{v:e}"));
    section("scenario", &[("id", Some(config.id.name().to_string()))]);
    section("geometry", &[("length", num(config.length)), ("radius", num(config.radius))]);
    section("material", &[("youngs_modulus", num(config.youngs_modulus)), ("density", opt(config.density))]);
    if let Some(c) = &config.cohesive {
        section(
            "cohesive",
            &[
                ("sigma_c", num(c.sigma_c)),
                ("g_c", num(c.g_c)),
                ("alpha", num(c.alpha)),
                ("bending_initiation", Some(c.bending_initiation.to_string())),
            ],
        );
    }
    section("penalty", &[("beta_p", num(config.beta_p)), ("beta_t", num(config.beta_t))]);
    section("mesh", &[("h", num(config.mesh_size))]);
    let s = &config.solver;
    section(
        "solver",
        &[
            ("load_steps", s.load_steps.map(|v| v.to_string())),
            ("tol_rel", num(s.tol_rel)),
            ("tol_abs", opt(s.tol_abs)),
            ("max_iters", Some(s.max_iters.to_string())),
            ("dt", opt(s.dt)),
            ("t_end", opt(s.t_end)),
            ("safety", num(s.safety)),
        ],
    );
    let l = &config.loading;
    section(
        "loading",
        &[
            ("moment", opt(l.moment)),
            ("displacement", opt(l.displacement)),
            ("perturbation", opt(l.perturbation)),
            ("sigma_f", opt(l.sigma_f)),
            ("load_rate", opt(l.load_rate)),
            ("kappa0", opt(l.kappa0)),
        ],
    );
    out
}
