//! Syntactic checker for derivations that the log tangent H^2 vanishes,
//! built from the fibration seed, blow-up, (-1)-curve and ADE lemmas.

use crate::arith::is_negative_definite;
use crate::config::{BlowUpSpec, CurveConfig};
use crate::contraction::{is_tree, ContractionSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFiber {
    pub curves: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub snc_reduced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Step {
    SeedFibration {
        fibers: Vec<SeedFiber>,
        nodes: Vec<String>,
    },
    AddBlowupCurve(String),
    AddMinusOneCurve {
        curve: String,
        /// D-curves met at several distinct transverse points.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        transverse: Vec<String>,
    },
    DeleteMinusOneCurve(String),
    AddAde(Vec<Vec<String>>),
}

impl Step {
    fn curves(&self) -> Vec<&String> {
        match self {
            Step::SeedFibration { fibers, nodes } => {
                fibers.iter().flat_map(|f| f.curves.iter()).chain(nodes.iter()).collect()
            }
            Step::AddBlowupCurve(c) | Step::DeleteMinusOneCurve(c) => vec![c],
            Step::AddMinusOneCurve { curve, transverse } => std::iter::once(curve).chain(transverse).collect(),
            Step::AddAde(sets) => sets.iter().flatten().collect(),
        }
    }

    fn label(&self) -> String {
        match self {
            Step::SeedFibration { fibers, nodes } => {
                let f: Vec<String> = fibers.iter().map(|f| f.curves.join("+")).collect();
                format!("seed {} at {}", f.join(" / "), nodes.join(","))
            }
            Step::AddBlowupCurve(c) => format!("blow up {c}"),
            Step::AddMinusOneCurve { curve, .. } => format!("add (-1)-curve {curve}"),
            Step::DeleteMinusOneCurve(c) => format!("delete (-1)-curve {c}"),
            Step::AddAde(sets) => {
                let s: Vec<String> = sets.iter().map(|s| s.join(",")).collect();
                format!("add ADE {{{}}}", s.join("}, {"))
            }
        }
    }
}

pub type DerivationScript = Vec<Step>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    FibrationSeed,
    BlowUp,
    MinusOneCurve,
    AdeDisjoint,
    Coverage,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::FibrationSeed => "fibration-seed",
            Lemma::BlowUp => "blow-up",
            Lemma::MinusOneCurve => "minus-one-curve",
            Lemma::AdeDisjoint => "ade-disjoint",
            Lemma::Coverage => "coverage",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("step {step}: unknown curve {curve:?}")]
    UnknownCurve { step: usize, curve: String },
    #[error("empty derivation")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationVerdict {
    Valid { log: Vec<String> },
    Invalid { step: usize, lemma: Lemma, reason: String },
}

impl DerivationVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DerivationVerdict::Valid { .. })
    }
}

impl fmt::Display for DerivationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationVerdict::Valid { .. } => write!(f, "valid"),
            DerivationVerdict::Invalid { step, lemma, reason } => {
                write!(f, "invalid at step {step} [{lemma}]: {reason}")
            }
        }
    }
}

struct Fail(usize, Lemma, String);

fn fail<T>(step: usize, lemma: Lemma, reason: String) -> Result<T, Fail> {
    Err(Fail(step, lemma, reason))
}

pub fn check_derivation(
    config: &CurveConfig,
    script: &[Step],
    sets: &[ContractionSet],
) -> Result<DerivationVerdict, ObstructionError> {
    if script.is_empty() {
        return Err(ObstructionError::Empty);
    }
    for (i, s) in script.iter().enumerate() {
        if let Some(c) = s.curves().into_iter().find(|c| !config.has(c)) {
            return Err(ObstructionError::UnknownCurve { step: i, curve: c.clone() });
        }
    }
    Ok(match replay(config, script, sets) {
        Ok(log) => DerivationVerdict::Valid { log },
        Err(Fail(step, lemma, reason)) => DerivationVerdict::Invalid { step, lemma, reason },
    })
}

fn replay(config: &CurveConfig, script: &[Step], sets: &[ContractionSet]) -> Result<Vec<String>, Fail> {
    // blow-ups in script order, with the step that performs each
    let mut order: Vec<(String, usize)> = Vec::new();
    for (i, s) in script.iter().enumerate() {
        let new: Vec<&String> = match s {
            Step::SeedFibration { nodes, .. } => nodes.iter().collect(),
            Step::AddBlowupCurve(c) => vec![c],
            _ => vec![],
        };
        for g in new {
            if order.iter().any(|(h, _)| h == g) {
                return fail(i, Lemma::BlowUp, format!("{g} is blown up twice"));
            }
            order.push((g.clone(), i));
        }
    }
    // undo them to reach the elliptic surface
    let mut state = config.clone();
    let mut centers: BTreeMap<String, BlowUpSpec> = BTreeMap::new();
    for (g, i) in order.iter().rev() {
        match state.blow_down(g) {
            Ok((smaller, spec)) => {
                state = smaller;
                centers.insert(g.clone(), spec);
            }
            Err(e) => return fail(*i, Lemma::BlowUp, format!("cannot undo {g}: {e}")),
        }
    }
    let mut log = vec![format!("minimal model: {} curves, K^2 = {}", state.curves().len(), state.kz_squared)];
    let mut d: Vec<String> = Vec::new();
    for (i, step) in script.iter().enumerate() {
        let in_d = |d: &Vec<String>, c: &str| d.iter().any(|x| x == c);
        match step {
            Step::SeedFibration { fibers, nodes } => {
                if i != 0 {
                    return fail(i, Lemma::FibrationSeed, "the fibration seed must be the first step".into());
                }
                seed(&state, fibers, nodes, &centers)?;
                for f in fibers {
                    d.extend(f.curves.iter().cloned());
                }
                for g in nodes {
                    state = state.blow_up(&centers[g]).map_err(|e| Fail(i, Lemma::BlowUp, e.to_string()))?;
                    d.push(g.clone());
                }
            }
            _ if i == 0 => {
                return fail(0, Lemma::FibrationSeed, "derivation does not start from a fibration seed".into())
            }
            Step::AddBlowupCurve(g) => {
                state = state.blow_up(&centers[g]).map_err(|e| Fail(i, Lemma::BlowUp, e.to_string()))?;
                d.push(g.clone());
            }
            Step::AddMinusOneCurve { curve, transverse } => {
                if in_d(&d, curve) {
                    return fail(i, Lemma::MinusOneCurve, format!("{curve} is already in D"));
                }
                minus_one(&state, curve, &d, transverse).map_err(|r| Fail(i, Lemma::MinusOneCurve, r))?;
                d.push(curve.clone());
            }
            Step::DeleteMinusOneCurve(curve) => {
                if !in_d(&d, curve) {
                    return fail(i, Lemma::MinusOneCurve, format!("{curve} is not in D"));
                }
                d.retain(|x| x != curve);
                minus_one(&state, curve, &d, &[]).map_err(|r| Fail(i, Lemma::MinusOneCurve, r))?;
            }
            Step::AddAde(ade) => {
                ade_sets(&state, ade, &d).map_err(|r| Fail(i, Lemma::AdeDisjoint, r))?;
                d.extend(ade.iter().flatten().cloned());
            }
        }
        log.push(format!("{}: {} (|D| = {})", i, step.label(), d.len()));
    }
    if let Some(diff) = state.surface_difference(config) {
        return fail(script.len() - 1, Lemma::BlowUp, format!("replay does not reproduce the configuration: {diff}"));
    }
    for s in sets {
        if let Some(c) = s.members().into_iter().find(|c| !d.contains(c)) {
            return fail(script.len() - 1, Lemma::Coverage, format!("{c} of set {} never enters D", s.name));
        }
    }
    Ok(log)
}

fn seed(
    y: &CurveConfig,
    fibers: &[SeedFiber],
    nodes: &[String],
    centers: &BTreeMap<String, BlowUpSpec>,
) -> Result<(), Fail> {
    let bad = |r: String| Fail(0, Lemma::FibrationSeed, r);
    if y.kz_squared != 0 {
        return Err(bad(format!("undoing the blow-ups leaves K^2 = {}, not 0", y.kz_squared)));
    }
    if fibers.is_empty() || fibers.len() > 2 {
        return Err(bad(format!("{} seed fibers; one or two are allowed", fibers.len())));
    }
    if fibers.len() == 2 {
        let (a, b) = (&fibers[0].curves, &fibers[1].curves);
        if a.iter().any(|x| b.contains(x) || b.iter().any(|z| y.incidence(x, z) > 0)) {
            return Err(bad("seed fibers meet".into()));
        }
    }
    let mut needs_node = Vec::new();
    for f in fibers {
        let cs = &f.curves;
        let curve = |c: &String| y.curve(c).expect("checked");
        if f.snc_reduced {
            if cs.iter().any(|c| curve(c).genus != 0) || !is_tree(y, cs) {
                return Err(bad(format!("{} is not a simple normal crossings tree", cs.join("+"))));
            }
            continue;
        }
        let ok = match cs.len() {
            0 => false,
            1 => curve(&cs[0]).self_int == 0 && curve(&cs[0]).genus == 1,
            n => {
                cs.iter().all(|c| curve(c).self_int == -2 && curve(c).genus == 0)
                    && if n == 2 {
                        y.incidence(&cs[0], &cs[1]) == 2
                    } else {
                        (0..n).all(|i| cs.iter().filter(|d| y.incidence(&cs[i], d) == 1).count() == 2)
                            && cs.iter().all(|c| cs.iter().all(|d| y.incidence(c, d) <= 1))
                            && is_cycle(y, cs)
                    }
            }
        };
        if !ok {
            return Err(bad(format!("{} is not a fiber of type I_n", cs.join("+"))));
        }
        needs_node.push(cs);
    }
    let mut used = vec![0; needs_node.len()];
    for g in nodes {
        let c = &centers[g].center;
        let hit = needs_node.iter().position(|cs| {
            let on: Vec<&(String, i64)> = c.iter().filter(|(x, _)| cs.contains(x)).collect();
            match (cs.len(), on.as_slice()) {
                (1, [(_, 2)]) => true,
                (n, [(a, 1), (b, 1)]) if n > 1 => y.incidence(a, b) > 0,
                _ => false,
            }
        });
        match hit {
            Some(k) => used[k] += 1,
            None => return Err(bad(format!("{g} is not the blow-up of a node of a seed fiber"))),
        }
    }
    if used.iter().any(|&u| u != 1) {
        return Err(bad("each nodal seed fiber needs exactly one blown-up node".into()));
    }
    Ok(())
}

fn is_cycle(y: &CurveConfig, cs: &[String]) -> bool {
    let mut seen = vec![cs[0].clone()];
    loop {
        let last = seen.last().unwrap().clone();
        match cs.iter().find(|c| !seen.contains(c) && y.incidence(&last, c) > 0) {
            Some(n) => seen.push(n.clone()),
            None => return seen.len() == cs.len(),
        }
    }
}

fn minus_one(state: &CurveConfig, curve: &str, d: &[String], transverse: &[String]) -> Result<(), String> {
    let c = state.curve(curve).map_err(|e| e.to_string())?;
    if c.self_int != -1 || c.genus != 0 {
        return Err(format!("{curve} has self-intersection {} and genus {}", c.self_int, c.genus));
    }
    for x in d {
        let m = state.incidence(curve, x);
        if m > 1 && !transverse.contains(x) {
            return Err(format!("{curve} meets {x} with multiplicity {m}"));
        }
    }
    Ok(())
}

fn ade_sets(state: &CurveConfig, sets: &[Vec<String>], d: &[String]) -> Result<(), String> {
    for (k, s) in sets.iter().enumerate() {
        for c in s {
            let cv = state.curve(c).map_err(|e| e.to_string())?;
            if cv.self_int != -2 || cv.genus != 0 {
                return Err(format!("{c} is not a smooth rational (-2)-curve"));
            }
            if d.contains(c) {
                return Err(format!("{c} is already in D"));
            }
            if let Some(x) = d.iter().find(|x| state.incidence(c, x) > 0) {
                return Err(format!("{c} meets {x} in D"));
            }
            for other in &sets[k + 1..] {
                if other.iter().any(|o| o == c || state.incidence(c, o) > 0) {
                    return Err(format!("ADE sets are not disjoint at {c}"));
                }
            }
        }
        let m = state.intersection_matrix(s).map_err(|e| e.to_string())?;
        if !is_tree(state, s) || !is_negative_definite(&m).unwrap_or(false) {
            return Err(format!("{} is not an ADE configuration", s.join(",")));
        }
    }
    Ok(())
}
