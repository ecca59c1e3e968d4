//! Contractions of Wahl/QEq/ADE configurations and canonical data of the
//! contracted surface.

use crate::arith::{int_det, is_negative_definite, rat_int, rat_solve, Rational};
use crate::chains::{qeq_classify, wahl_params, Chain, QeqStar, QeqType, WahlParams};
use crate::config::{ConfigError, CurveConfig};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("set {set:?}: curve {curve:?} has positive genus")]
    Irrational { set: String, curve: String },
    #[error("set {0:?} is not negative definite")]
    NotContractible(String),
    #[error("curve {curve:?} lies in both {a:?} and {b:?}")]
    Overlap { curve: String, a: String, b: String },
    #[error("set {set:?}: {reason}")]
    Shape { set: String, reason: String },
    #[error("no fiber named {0:?}")]
    UnknownFiber(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSet {
    pub name: String,
    /// Legs first for stars; the center is kept separately.
    pub curves: Vec<String>,
    pub center: Option<String>,
}

impl ContractionSet {
    pub fn chain(name: &str, curves: &[&str]) -> Self {
        ContractionSet { name: name.to_string(), curves: curves.iter().map(|s| s.to_string()).collect(), center: None }
    }

    pub fn star(name: &str, legs: &[&str], center: &str) -> Self {
        ContractionSet { center: Some(center.to_string()), ..Self::chain(name, legs) }
    }

    /// All curves, center last.
    pub fn members(&self) -> Vec<String> {
        let mut v = self.curves.clone();
        v.extend(self.center.clone());
        v
    }

    pub fn contains(&self, curve: &str) -> bool {
        self.curves.iter().any(|c| c == curve) || self.center.as_deref() == Some(curve)
    }
}

impl fmt::Display for ContractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.curves.join(","))?;
        if let Some(c) = &self.center {
            write!(f, ";{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// Curves in path order.
    Chain(Vec<String>),
    Star {
        center: String,
        legs: Vec<Vec<String>>,
    },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Wahl(WahlParams),
    Qeq(QeqType),
    Ade,
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Wahl(w) => write!(f, "Wahl{w}"),
            Classification::Qeq(t) => write!(f, "QEq {t}"),
            Classification::Ade => write!(f, "ADE"),
            Classification::Other => write!(f, "other"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contractibility {
    Contractible { classification: Classification, weights: String },
    NotContractible(String),
}

/// Graph of a set: adjacency inside the set with multiplicities.
fn set_edges(config: &CurveConfig, members: &[String]) -> Vec<(usize, usize, i64)> {
    let mut e = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let m = config.incidence(&members[i], &members[j]);
            if m > 0 {
                e.push((i, j, m));
            }
        }
    }
    e
}

/// True when the set's dual graph is a tree with transverse single edges.
pub fn is_tree(config: &CurveConfig, members: &[String]) -> bool {
    let n = members.len();
    let edges = set_edges(config, members);
    if n == 0 || edges.len() != n - 1 || edges.iter().any(|e| e.2 != 1) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        for &(a, b, _) in &edges {
            if a == v {
                stack.push(b);
            } else if b == v {
                stack.push(a);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn path_from(config: &CurveConfig, start: &str, pool: &[String]) -> Vec<String> {
    let mut path = vec![start.to_string()];
    loop {
        let last = path.last().unwrap().clone();
        let next = pool.iter().find(|c| !path.contains(c) && config.incidence(&last, c) > 0).cloned();
        match next {
            Some(n) => path.push(n),
            None => return path,
        }
    }
}

pub fn shape(config: &CurveConfig, set: &ContractionSet) -> Shape {
    let members = set.members();
    if !is_tree(config, &members) {
        return Shape::Other;
    }
    let degree = |c: &str| members.iter().filter(|d| config.incidence(c, d) > 0).count();
    match &set.center {
        None => {
            if members.iter().any(|c| degree(c) > 2) {
                return Shape::Other;
            }
            // keep the listed orientation
            let ends: Vec<&String> = members.iter().filter(|c| degree(c) <= 1).collect();
            let start = if ends.iter().any(|e| *e == &members[0]) { &members[0] } else { ends[0] };
            Shape::Chain(path_from(config, start, &members))
        }
        Some(center) => {
            let legs_pool: Vec<String> = set.curves.clone();
            let mut legs = Vec::new();
            for c in &legs_pool {
                if config.incidence(center, c) > 0 {
                    let pool: Vec<String> = legs_pool.clone();
                    legs.push(path_from(config, c, &pool));
                }
            }
            if legs.iter().map(|l| l.len()).sum::<usize>() != legs_pool.len()
                || legs.iter().flatten().any(|c| degree(c) > 2 && c != center)
            {
                return Shape::Other;
            }
            Shape::Star { center: center.clone(), legs }
        }
    }
}

fn weight(config: &CurveConfig, c: &str) -> Result<u64, ContractionError> {
    Ok((-config.curve(c)?.self_int).max(0) as u64)
}

fn weights_string(config: &CurveConfig, set: &ContractionSet) -> Result<String, ContractionError> {
    let w = |cs: &[String]| -> Result<Vec<String>, ContractionError> {
        cs.iter().map(|c| Ok(weight(config, c)?.to_string())).collect()
    };
    let mut s = format!("[{}", w(&set.curves)?.join(","));
    if let Some(c) = &set.center {
        s += &format!(";{}", weight(config, c)?);
    }
    Ok(s + "]")
}

fn check_members(config: &CurveConfig, set: &ContractionSet) -> Result<(), ContractionError> {
    for c in set.members() {
        if config.curve(&c)?.genus > 0 {
            return Err(ContractionError::Irrational { set: set.name.clone(), curve: c });
        }
    }
    Ok(())
}

pub fn check_contractible(config: &CurveConfig, set: &ContractionSet) -> Result<Contractibility, ContractionError> {
    check_members(config, set)?;
    let members = set.members();
    let m = config.intersection_matrix(&members)?;
    if !is_negative_definite(&m).map_err(|e| ContractionError::Internal(e.to_string()))? {
        return Ok(Contractibility::NotContractible("intersection matrix is not negative definite".into()));
    }
    let all_minus_two = members.iter().all(|c| config.curve(c).map(|x| x.self_int) == Ok(-2));
    let classification = match shape(config, set) {
        _ if all_minus_two && is_tree(config, &members) => Classification::Ade,
        Shape::Chain(path) => {
            let w: Vec<u64> = path.iter().map(|c| weight(config, c)).collect::<Result<_, _>>()?;
            match Chain::new(w).ok().and_then(|c| wahl_params(&c)) {
                Some(p) => Classification::Wahl(p),
                None => Classification::Other,
            }
        }
        Shape::Star { center, legs } if legs.len() == 3 && legs.iter().all(|l| l.len() == 1) => {
            let star = QeqStar {
                legs: [weight(config, &legs[0][0])?, weight(config, &legs[1][0])?, weight(config, &legs[2][0])?],
                center: weight(config, &center)?,
            };
            qeq_classify(&star).map_or(Classification::Other, Classification::Qeq)
        }
        _ => Classification::Other,
    };
    Ok(Contractibility::Contractible { classification, weights: weights_string(config, set)? })
}

fn require_contractible(config: &CurveConfig, set: &ContractionSet) -> Result<(), ContractionError> {
    match check_contractible(config, set)? {
        Contractibility::Contractible { .. } => Ok(()),
        Contractibility::NotContractible(_) => Err(ContractionError::NotContractible(set.name.clone())),
    }
}

/// Solves sum_i d_i (E_i.E_j) = 2 + E_j^2 over the set.
pub fn discrepancies(config: &CurveConfig, set: &ContractionSet) -> Result<Vec<(String, Rational)>, ContractionError> {
    require_contractible(config, set)?;
    let members = set.members();
    let m = config.intersection_matrix(&members)?;
    let b: Vec<Rational> =
        members.iter().map(|c| Ok(rat_int(2 + config.curve(c)?.self_int))).collect::<Result<_, ContractionError>>()?;
    let d = rat_solve(&m.to_rational_rows(), &b).map_err(|e| ContractionError::Internal(e.to_string()))?;
    Ok(members.into_iter().zip(d).collect())
}

fn check_disjoint(sets: &[ContractionSet]) -> Result<(), ContractionError> {
    let mut owner: BTreeMap<String, &str> = BTreeMap::new();
    for s in sets {
        for c in s.members() {
            if let Some(prev) = owner.insert(c.clone(), &s.name) {
                return Err(ContractionError::Overlap { curve: c, a: prev.to_string(), b: s.name.clone() });
            }
        }
    }
    Ok(())
}

/// K_X^2 = K_Z^2 + sum of set sizes.
pub fn k_squared(config: &CurveConfig, sets: &[ContractionSet]) -> Result<i64, ContractionError> {
    check_disjoint(sets)?;
    for s in sets {
        require_contractible(config, s)?;
    }
    Ok(config.kz_squared + sets.iter().map(|s| s.members().len() as i64).sum::<i64>())
}

/// f*(K_X) = K_Z + sum d_i E_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackClass {
    pub coefficients: Vec<(String, Rational)>,
    pub square: Rational,
}

impl PullbackClass {
    pub fn coefficient(&self, curve: &str) -> Option<&Rational> {
        self.coefficients.iter().find(|(c, _)| c == curve).map(|(_, d)| d)
    }

    /// (f*K).C for any configuration curve.
    pub fn dot(&self, config: &CurveConfig, curve: &str) -> Result<Rational, ContractionError> {
        let mut v = rat_int(config.canonical_degree(curve)?);
        for (e, d) in &self.coefficients {
            v += d * rat_int(config.dot(e, curve)?);
        }
        Ok(v)
    }
}

pub fn pullback_class(config: &CurveConfig, sets: &[ContractionSet]) -> Result<PullbackClass, ContractionError> {
    let k2 = k_squared(config, sets)?;
    let mut coefficients = Vec::new();
    for s in sets {
        coefficients.extend(discrepancies(config, s)?);
    }
    // full expansion K_Z^2 + 2 sum d_i K.E_i + sum d_i d_j E_i.E_j
    let mut square = rat_int(config.kz_squared);
    for (e, d) in &coefficients {
        square += rat_int(2) * d * rat_int(config.canonical_degree(e)?);
        for (f, g) in &coefficients {
            square += d * g * rat_int(config.dot(e, f)?);
        }
    }
    if square != rat_int(k2) {
        return Err(ContractionError::Internal(format!("(f*K)^2 = {square} but K_X^2 = {k2}")));
    }
    let class = PullbackClass { coefficients, square };
    for s in sets {
        for e in s.members() {
            let v = class.dot(config, &e)?;
            if !v.is_zero() {
                return Err(ContractionError::Internal(format!("(f*K).{e} = {v}")));
            }
        }
    }
    Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefReport {
    /// (curve, (f*K).C, contracted?) in configuration order.
    pub values: Vec<(String, Rational, bool)>,
    pub negatives: Vec<String>,
    pub zeros: Vec<String>,
    pub k_squared: i64,
    pub class: PullbackClass,
}

pub fn nef_report(config: &CurveConfig, sets: &[ContractionSet]) -> Result<NefReport, ContractionError> {
    let class = pullback_class(config, sets)?;
    let contracted: BTreeSet<String> = sets.iter().flat_map(|s| s.members()).collect();
    let mut values = Vec::new();
    let (mut negatives, mut zeros) = (Vec::new(), Vec::new());
    for c in config.names() {
        let v = class.dot(config, &c)?;
        let inside = contracted.contains(&c);
        if v.is_negative() {
            negatives.push(c.clone());
        } else if v.is_zero() && !inside {
            zeros.push(c.clone());
        }
        values.push((c, v, inside));
    }
    Ok(NefReport { values, negatives, zeros, k_squared: k_squared(config, sets)?, class })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AmpleVerdict {
    Ample,
    NefNotAmple(Vec<String>),
    NotNef { witness: String, value: Rational },
    Inconclusive(String),
}

impl fmt::Display for AmpleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmpleVerdict::Ample => write!(f, "ample"),
            AmpleVerdict::NefNotAmple(z) => write!(f, "nef, not ample (zero curves: {})", z.join(",")),
            AmpleVerdict::NotNef { witness, value } => write!(f, "not nef ({witness}: {value})"),
            AmpleVerdict::Inconclusive(r) => write!(f, "inconclusive: {r}"),
        }
    }
}

/// Certificate in the style "nef on the configuration, no zero curves, and
/// an effective representative whose support contains a whole fiber".
/// `support` is an effective Q-divisor claimed to represent f*(K_X); it is
/// accepted only if it has the same intersection number as f*(K_X) with
/// every configuration curve.
pub fn ample_certificate(
    config: &CurveConfig,
    sets: &[ContractionSet],
    fiber_name: &str,
    support: Option<&[(String, Rational)]>,
) -> Result<AmpleVerdict, ContractionError> {
    let fiber = config.fiber(fiber_name).ok_or_else(|| ContractionError::UnknownFiber(fiber_name.to_string()))?;
    let report = nef_report(config, sets)?;
    if let Some(w) = report.negatives.first() {
        let value = report.values.iter().find(|v| &v.0 == w).unwrap().1.clone();
        return Ok(AmpleVerdict::NotNef { witness: w.clone(), value });
    }
    if !report.zeros.is_empty() {
        return Ok(AmpleVerdict::NefNotAmple(report.zeros));
    }
    if report.k_squared <= 0 {
        return Ok(AmpleVerdict::Inconclusive(format!("K_X^2 = {} is not positive", report.k_squared)));
    }
    for (c, _) in &fiber.components {
        let mut v = 0;
        for (d, m) in &fiber.components {
            v += m * config.dot(c, d)?;
        }
        if v != 0 {
            return Ok(AmpleVerdict::Inconclusive(format!(
                "fiber {fiber_name:?} meets its component {c} with degree {v}"
            )));
        }
    }
    let Some(support) = support else {
        return Ok(AmpleVerdict::Inconclusive("no effective representative recorded".into()));
    };
    if let Some((c, q)) = support.iter().find(|(_, q)| q.is_negative()) {
        return Ok(AmpleVerdict::Inconclusive(format!("representative is not effective at {c} ({q})")));
    }
    for (c, v, _) in &report.values {
        let mut s = Rational::zero();
        for (d, q) in support {
            s += q * Rational::from_integer(BigInt::from(config.dot(d, c)?));
        }
        if &s != v {
            return Ok(AmpleVerdict::Inconclusive(format!("representative gives {s} on {c}, expected {v}")));
        }
    }
    for (c, _) in &fiber.components {
        if !support.iter().any(|(d, q)| d == c && q.is_positive()) {
            return Ok(AmpleVerdict::Inconclusive(format!("fiber component {c} is not in the support")));
        }
    }
    Ok(AmpleVerdict::Ample)
}

/// |det| of the set's intersection matrix.
pub fn set_determinant(config: &CurveConfig, set: &ContractionSet) -> Result<BigInt, ContractionError> {
    let m = config.intersection_matrix(&set.members())?;
    Ok(int_det(&m).map_err(|e| ContractionError::Internal(e.to_string()))?.abs())
}
