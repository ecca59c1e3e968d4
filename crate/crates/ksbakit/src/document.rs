//! JSON configuration files.

use crate::arith::{parse_rational, Rational};
use crate::config::{CurveConfig, Fiber};
use crate::contraction::ContractionSet;
use crate::fundgroup::Bridge;
use crate::obstruction::Step;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{0}")]
    Json(String),
    #[error("{at}: {msg}")]
    Invalid { at: String, msg: String },
}

fn invalid(at: impl Into<String>, msg: impl Into<String>) -> ParseError {
    ParseError::Invalid { at: at.into(), msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub name: String,
    pub self_int: i64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub genus: i64,
}

fn is_zero(x: &i64) -> bool {
    *x == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidenceEntry {
    pub a: String,
    pub b: String,
    pub mult: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub curve: String,
    pub mult: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberEntry {
    pub name: String,
    pub components: Vec<ComponentEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetEntry {
    pub name: String,
    pub curves: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeEntry {
    pub curve: String,
    pub ends: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kz_squared: i64,
    pub curves: Vec<CurveEntry>,
    #[serde(default)]
    pub incidences: Vec<IncidenceEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fibers: Vec<FiberEntry>,
    #[serde(default)]
    pub contractions: Vec<SetEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bridges: Vec<BridgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Vec<Step>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// A validated configuration file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub config: CurveConfig,
    pub sets: Vec<ContractionSet>,
    pub bridges: Vec<Bridge>,
    pub pullback: Option<Vec<(String, Rational)>>,
    pub derivation: Option<Vec<Step>>,
    pub notes: Vec<String>,
}

pub fn parse_config(text: &str) -> Result<Problem, ParseError> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    from_file(&file)
}

pub fn from_file(file: &ConfigFile) -> Result<Problem, ParseError> {
    let mut config = CurveConfig::new(file.kz_squared);
    for (i, c) in file.curves.iter().enumerate() {
        if c.genus < 0 {
            return Err(invalid(format!("curves[{i}]"), "negative genus"));
        }
        config.add_curve(&c.name, c.self_int, c.genus).map_err(|e| invalid(format!("curves[{i}]"), e.to_string()))?;
    }
    let names: BTreeSet<String> = file.curves.iter().map(|c| c.name.clone()).collect();
    let known = |at: String, n: &str| -> Result<(), ParseError> {
        if names.contains(n) {
            Ok(())
        } else {
            Err(invalid(at, format!("unknown curve {n:?}")))
        }
    };
    let mut seen = BTreeSet::new();
    for (i, e) in file.incidences.iter().enumerate() {
        let at = format!("incidences[{i}]");
        known(at.clone(), &e.a)?;
        known(at.clone(), &e.b)?;
        if e.a == e.b {
            return Err(invalid(at, "self-pair"));
        }
        if e.mult < 0 {
            return Err(invalid(at, "negative multiplicity"));
        }
        let key = if e.a < e.b { (e.a.clone(), e.b.clone()) } else { (e.b.clone(), e.a.clone()) };
        if !seen.insert(key) {
            return Err(invalid(at, format!("pair {}-{} listed twice", e.a, e.b)));
        }
    }
    for e in &file.incidences {
        config.set_incidence(&e.a, &e.b, e.mult).expect("validated");
    }
    for (i, f) in file.fibers.iter().enumerate() {
        let mut comps = Vec::new();
        for (j, c) in f.components.iter().enumerate() {
            known(format!("fibers[{i}].components[{j}]"), &c.curve)?;
            if c.mult < 1 {
                return Err(invalid(format!("fibers[{i}].components[{j}]"), "multiplicity below 1"));
            }
            comps.push((c.curve.clone(), c.mult));
        }
        config.fibers.push(Fiber { name: f.name.clone(), components: comps });
    }
    let mut sets = Vec::new();
    for (i, s) in file.contractions.iter().enumerate() {
        for c in s.curves.iter().chain(s.center.iter()) {
            known(format!("contractions[{i}]"), c)?;
        }
        if s.curves.is_empty() {
            return Err(invalid(format!("contractions[{i}]"), "empty set"));
        }
        sets.push(ContractionSet { name: s.name.clone(), curves: s.curves.clone(), center: s.center.clone() });
    }
    let bridges = file
        .bridges
        .iter()
        .enumerate()
        .map(|(i, b)| {
            for e in &b.ends {
                known(format!("bridges[{i}]"), e)?;
            }
            Ok(Bridge { curve: b.curve.clone(), ends: b.ends.clone() })
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    let pullback = match &file.pullback {
        None => None,
        Some(m) => {
            let mut v = Vec::new();
            for (k, q) in m {
                known(format!("pullback.{k}"), k)?;
                let r = parse_rational(q).map_err(|e| invalid(format!("pullback.{k}"), e.to_string()))?;
                v.push((k.clone(), r));
            }
            Some(v)
        }
    };
    Ok(Problem { config, sets, bridges, pullback, derivation: file.derivation.clone(), notes: file.notes.clone() })
}

/// Serializes back to the file schema.
pub fn to_file(p: &Problem) -> ConfigFile {
    let c = &p.config;
    ConfigFile {
        kz_squared: c.kz_squared,
        curves: c
            .curves()
            .iter()
            .map(|x| CurveEntry { name: x.name.clone(), self_int: x.self_int, genus: x.genus })
            .collect(),
        incidences: c.incidences().map(|(a, b, m)| IncidenceEntry { a: a.into(), b: b.into(), mult: m }).collect(),
        fibers: c
            .fibers
            .iter()
            .map(|f| FiberEntry {
                name: f.name.clone(),
                components: f.components.iter().map(|(n, m)| ComponentEntry { curve: n.clone(), mult: *m }).collect(),
            })
            .collect(),
        contractions: p
            .sets
            .iter()
            .map(|s| SetEntry { name: s.name.clone(), curves: s.curves.clone(), center: s.center.clone() })
            .collect(),
        bridges: p.bridges.iter().map(|b| BridgeEntry { curve: b.curve.clone(), ends: b.ends.clone() }).collect(),
        pullback: p
            .pullback
            .as_ref()
            .map(|v| v.iter().map(|(k, q)| (k.clone(), crate::arith::format_rational(q))).collect()),
        derivation: p.derivation.clone(),
        notes: p.notes.clone(),
    }
}

pub fn to_json(p: &Problem) -> String {
    serde_json::to_string_pretty(&to_file(p)).expect("serializable")
}
