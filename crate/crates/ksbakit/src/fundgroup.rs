//! Link groups of contracted configurations and the loop-trivialization
//! deduction engine.

use crate::arith::{int_det, is_negative_definite, smith_normal_form, IntMatrix};
use crate::config::{ConfigError, CurveConfig};
use crate::contraction::{is_tree, shape, ContractionSet, Shape};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("set {0:?} is not negative definite")]
    NotDefinite(String),
    #[error("set {0:?} is not a tree of transverse curves")]
    NotTree(String),
    #[error("bridge {curve:?}: {reason}")]
    Bridge { curve: String, reason: String },
}

/// Word letters are (generator index, exponent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Vec<(usize, i64)>>,
}

impl Presentation {
    pub fn word_string(&self, w: &[(usize, i64)]) -> String {
        w.iter()
            .map(|&(g, e)| match e {
                1 => self.generators[g].clone(),
                _ => format!("{}^{}", self.generators[g], e),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn relator_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relators.len(), self.generators.len());
        for (i, r) in self.relators.iter().enumerate() {
            for &(g, e) in r {
                let v = m.get(i, g) + BigInt::from(e);
                m.set(i, g, v);
            }
        }
        m
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_string(r)).collect();
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

/// One relator per curve (neighbors times own loop to the self-intersection)
/// and a commutator for every edge.
pub fn mumford_presentation(config: &CurveConfig, set: &ContractionSet) -> Result<Presentation, GroupError> {
    let members = set.members();
    if !is_tree(config, &members) {
        return Err(GroupError::NotTree(set.name.clone()));
    }
    let mut relators = Vec::new();
    for (i, c) in members.iter().enumerate() {
        let mut w: Vec<(usize, i64)> =
            (0..members.len()).filter(|&j| config.incidence(c, &members[j]) > 0).map(|j| (j, 1)).collect();
        w.push((i, config.curve(c)?.self_int));
        relators.push(w);
    }
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if config.incidence(&members[i], &members[j]) > 0 {
                relators.push(vec![(i, 1), (j, 1), (i, -1), (j, -1)]);
            }
        }
    }
    Ok(Presentation { generators: members, relators })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abelianization {
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl Abelianization {
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }
}

impl fmt::Display for Abelianization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        f.write_str(&parts.join(" + "))
    }
}

pub fn abelianization(p: &Presentation) -> Abelianization {
    let m = p.relator_matrix();
    let n = p.generators.len();
    if m.rows() == 0 {
        return Abelianization { torsion: vec![], free_rank: n };
    }
    let d = smith_normal_form(&m);
    let rank = d.iter().filter(|x| !x.is_zero()).count();
    Abelianization { torsion: d.into_iter().filter(|x| x > &BigInt::one()).collect(), free_rank: n - rank }
}

pub fn link_order(config: &CurveConfig, set: &ContractionSet) -> Result<BigInt, GroupError> {
    let m = config.intersection_matrix(&set.members())?;
    if !is_negative_definite(&m).unwrap_or(false) {
        return Err(GroupError::NotDefinite(set.name.clone()));
    }
    Ok(int_det(&m).expect("square").abs())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridge {
    pub curve: String,
    pub ends: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pi1Verdict {
    Trivial,
    Inconclusive(Vec<(String, Option<BigInt>)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trivialization {
    pub verdict: Pi1Verdict,
    pub log: Vec<String>,
}

/// Per-generator state: union-find classes of homotopic loops, each with
/// an order divisor (None = nothing known).
struct FactBase {
    names: Vec<String>,
    parent: Vec<usize>,
    fact: Vec<Option<BigInt>>,
    log: Vec<String>,
}

impl FactBase {
    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn is_trivial(&mut self, i: usize) -> bool {
        let r = self.find(i);
        self.fact[r].as_ref().is_some_and(|k| k.is_one())
    }

    fn add_fact(&mut self, i: usize, k: BigInt, why: &str) -> bool {
        let r = self.find(i);
        let new = match &self.fact[r] {
            Some(old) => old.gcd(&k),
            None => k,
        };
        if self.fact[r].as_ref() == Some(&new) {
            return false;
        }
        self.log.push(format!("{}: order divides {new} ({why})", self.names[i]));
        self.fact[r] = Some(new);
        true
    }

    fn union(&mut self, a: usize, b: usize, why: &str) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.log.push(format!("{} ~ {} ({why})", self.names[a], self.names[b]));
        let merged = match (self.fact[ra].take(), self.fact[rb].take()) {
            (Some(x), Some(y)) => {
                let g = x.gcd(&y);
                self.log.push(format!("gcd({x},{y}) = {g}"));
                Some(g)
            }
            (x, y) => x.or(y),
        };
        self.parent[rb] = ra;
        self.fact[ra] = merged;
        true
    }
}

fn validate_bridge(config: &CurveConfig, sets: &[ContractionSet], b: &Bridge) -> Result<bool, GroupError> {
    let err = |reason: String| GroupError::Bridge { curve: b.curve.clone(), reason };
    let owner = |c: &str| sets.iter().position(|s| s.contains(c));
    for e in &b.ends {
        if owner(e).is_none() {
            return Err(err(format!("end {e:?} is not in a contracted set")));
        }
    }
    if owner(&b.curve).is_some() {
        return Err(err("the bridge itself is contracted".into()));
    }
    if !config.has(&b.curve) {
        // declared from outside the configuration (e.g. a section)
        return Ok(false);
    }
    let [a, c] = &b.ends;
    if a == c {
        let m = config.incidence(&b.curve, a);
        if m != 2 {
            return Err(err(format!("meets {a:?} with multiplicity {m}, expected 2")));
        }
    } else {
        for e in [a, c] {
            let m = config.incidence(&b.curve, e);
            if m != 1 {
                return Err(err(format!("meets {e:?} with multiplicity {m}, expected 1")));
            }
        }
    }
    for s in sets {
        let expected: i64 = if a == c {
            if s.contains(a) {
                2
            } else {
                0
            }
        } else {
            b.ends.iter().filter(|e| s.contains(e)).count() as i64
        };
        let total: i64 = s.members().iter().map(|m| config.incidence(&b.curve, m)).sum();
        if total != expected {
            return Err(err(format!("meets set {:?} {total} times, expected {expected}", s.name)));
        }
    }
    Ok(true)
}

pub fn trivialize(
    config: &CurveConfig,
    sets: &[ContractionSet],
    bridges: &[Bridge],
) -> Result<Trivialization, GroupError> {
    let mut names = Vec::new();
    let mut relators: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut chains: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    let mut seeds = Vec::new();
    for s in sets {
        let p = mumford_presentation(config, s)?;
        let base = names.len();
        names.extend(p.generators.iter().cloned());
        let n = p.generators.len();
        // commutators carry no order information
        for r in p.relators.into_iter().take(n) {
            relators.push(r.into_iter().map(|(g, e)| (g + base, e)).collect());
        }
        if let Shape::Chain(path) = shape(config, s) {
            let order = link_order(config, s)?;
            let idx = |c: &String| base + s.members().iter().position(|m| m == c).unwrap();
            let ends = (idx(&path[0]), idx(path.last().unwrap()));
            seeds.push((ends.0, order.clone(), s.name.clone()));
            if ends.1 != ends.0 {
                seeds.push((ends.1, order, s.name.clone()));
            }
            chains.push(((base..base + n).collect(), ends.0, ends.1));
        }
    }
    let mut fb = FactBase {
        parent: (0..names.len()).collect(),
        fact: vec![None; names.len()],
        names: names.clone(),
        log: Vec::new(),
    };
    for (g, k, set) in seeds {
        fb.add_fact(g, k, &format!("chain end of {set}"));
    }
    let index = |c: &str| names.iter().position(|n| n == c).unwrap();
    for b in bridges {
        let internal = validate_bridge(config, sets, b)?;
        let tag = if internal { b.curve.clone() } else { format!("{}, declared", b.curve) };
        let (a, c) = (index(&b.ends[0]), index(&b.ends[1]));
        if a == c {
            fb.add_fact(a, BigInt::from(2), &format!("{tag} meets it twice"));
        } else {
            fb.union(a, c, &tag);
        }
    }
    loop {
        let mut changed = false;
        for r in &relators {
            changed |= apply_relator(&mut fb, r);
        }
        for (members, e0, e1) in &chains {
            if fb.is_trivial(*e0) || fb.is_trivial(*e1) {
                let end = if fb.is_trivial(*e0) { *e0 } else { *e1 };
                for &m in members {
                    if !fb.is_trivial(m) {
                        let why = format!("chain generated by {}", fb.names[end]);
                        changed |= fb.add_fact(m, BigInt::one(), &why);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut remaining = Vec::new();
    for i in 0..names.len() {
        if !fb.is_trivial(i) {
            let r = fb.find(i);
            remaining.push((names[i].clone(), fb.fact[r].clone()));
        }
    }
    let verdict = if remaining.is_empty() { Pi1Verdict::Trivial } else { Pi1Verdict::Inconclusive(remaining) };
    Ok(Trivialization { verdict, log: fb.log })
}

/// Substitutes known facts into one relator, treating homotopic loops as
/// equal: classes whose known order divides their total exponent drop out.
fn apply_relator(fb: &mut FactBase, r: &[(usize, i64)]) -> bool {
    let mut exps: BTreeMap<usize, (usize, i64)> = BTreeMap::new();
    for &(g, e) in r {
        let root = fb.find(g);
        exps.entry(root).or_insert((g, 0)).1 += e;
    }
    let open: Vec<(usize, usize, i64)> = exps
        .iter()
        .filter(|(root, (_, e))| match &fb.fact[**root] {
            Some(k) => !(BigInt::from(*e) % k).is_zero(),
            None => *e != 0,
        })
        .map(|(root, (g, e))| (*root, *g, *e))
        .collect();
    let rel = fb.names[r.last().unwrap().0].clone();
    match open.as_slice() {
        [(_, g, e)] => fb.add_fact(*g, BigInt::from(*e).abs(), &format!("relation at {rel}")),
        [(r1, g1, a), (r2, g2, b)] => {
            let mut changed = false;
            for (ra, ga, x, rb, y) in [(r1, g1, a, r2, b), (r2, g2, b, r1, a)] {
                let _ = ra;
                if let Some(k) = fb.fact[*rb].clone() {
                    let bound = BigInt::from(*x).abs() * &k / k.gcd(&BigInt::from(*y));
                    changed |= fb.add_fact(*ga, bound, &format!("relation at {rel}"));
                }
            }
            changed
        }
        _ => false,
    }
}
