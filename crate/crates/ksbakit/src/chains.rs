//! Hirzebruch-Jung strings, Wahl chains and the three QEq stars.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error("empty chain")]
    Empty,
    #[error("chain entry {0} is below 2")]
    SmallEntry(i64),
    #[error("cannot parse chain {0:?}")]
    Parse(String),
    #[error("need p > q >= 1 with gcd(p,q) = 1, got {p}/{q}")]
    BadFraction { p: BigInt, q: BigInt },
    #[error("chain entry {0} does not fit in 64 bits")]
    EntryTooLarge(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain(Vec<u64>);

impl Chain {
    pub fn new(entries: Vec<u64>) -> Result<Self, ChainError> {
        if entries.is_empty() {
            return Err(ChainError::Empty);
        }
        if let Some(&e) = entries.iter().find(|&&e| e < 2) {
            return Err(ChainError::SmallEntry(e as i64));
        }
        Ok(Chain(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Chain {
    type Err = ChainError;
    /// Accepts "3,5,2" or "[3,5,2]".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut v = Vec::new();
        for part in t.split(',') {
            let x: i64 = part.trim().parse().map_err(|_| ChainError::Parse(s.to_string()))?;
            if x < 2 {
                return Err(ChainError::SmallEntry(x));
            }
            v.push(x as u64);
        }
        Chain::new(v)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

pub fn hj_expand(p: &BigInt, q: &BigInt) -> Result<Chain, ChainError> {
    let bad = || ChainError::BadFraction { p: p.clone(), q: q.clone() };
    if !(q >= &BigInt::one() && p > q) || !p.gcd(q).is_one() {
        return Err(bad());
    }
    let (mut p, mut q) = (p.clone(), q.clone());
    let mut out = Vec::new();
    while !q.is_zero() {
        let e = p.div_ceil(&q);
        let r = &e * &q - &p;
        out.push(e.to_u64().ok_or_else(|| ChainError::EntryTooLarge(e.clone()))?);
        p = q;
        q = r;
    }
    Chain::new(out)
}

pub fn hj_expand_u64(p: u64, q: u64) -> Result<Chain, ChainError> {
    hj_expand(&BigInt::from(p), &BigInt::from(q))
}

/// Returns (p, q) with p/q = e1 - 1/(e2 - ...).
pub fn hj_eval(c: &Chain) -> (BigInt, BigInt) {
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    for &e in c.0.iter().rev() {
        let np = BigInt::from(e) * &p - &q;
        q = p;
        p = np;
    }
    (p, q)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WahlParams {
    pub n: BigInt,
    pub a: BigInt,
}

impl fmt::Display for WahlParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.a)
    }
}

pub fn wahl_params(c: &Chain) -> Option<WahlParams> {
    let (p, q) = hj_eval(c);
    let n = p.sqrt();
    if &n * &n != p {
        return None;
    }
    let (a, r) = (&q + 1u32).div_rem(&n);
    if !r.is_zero() || !a.is_positive() || a >= n || !n.gcd(&a).is_one() {
        return None;
    }
    let b = &n - &a;
    Some(WahlParams { a: a.min(b), n })
}

/// All chains reachable from [4] by the two Wahl extension rules.
pub fn wahl_generate(max_length: usize) -> BTreeSet<Chain> {
    let mut out = BTreeSet::new();
    if max_length == 0 {
        return out;
    }
    let mut frontier = vec![Chain(vec![4])];
    while let Some(c) = frontier.pop() {
        if c.len() > max_length || !out.insert(c.clone()) {
            continue;
        }
        let e = &c.0;
        let mut left = e.clone();
        left[0] += 1;
        left.push(2);
        let mut right = vec![2];
        right.extend_from_slice(e);
        *right.last_mut().unwrap() += 1;
        frontier.push(Chain(left));
        frontier.push(Chain(right));
    }
    out
}

pub fn chain_dual(c: &Chain) -> Chain {
    Chain(c.0.iter().rev().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QeqStar {
    pub legs: [u64; 3],
    pub center: u64,
}

impl FromStr for QeqStar {
    type Err = ChainError;
    /// Accepts "3,3,3;4" with optional brackets.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ChainError::Parse(s.to_string());
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (legs, center) = t.split_once(';').ok_or_else(err)?;
        let legs: Vec<u64> = legs.split(',').map(|x| x.trim().parse().map_err(|_| err())).collect::<Result<_, _>>()?;
        let legs: [u64; 3] = legs.try_into().map_err(|_| err())?;
        let center = center.trim().parse().map_err(|_| err())?;
        Ok(QeqStar { legs, center })
    }
}

impl fmt::Display for QeqStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.legs;
        write!(f, "[{a},{b},{c};{}]", self.center)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QeqType {
    Z3,
    Z4,
    Z6,
}

impl fmt::Display for QeqType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QeqType::Z3 => "Z3",
            QeqType::Z4 => "Z4",
            QeqType::Z6 => "Z6",
        };
        f.write_str(s)
    }
}

pub fn qeq_classify(s: &QeqStar) -> Option<QeqType> {
    let mut legs = s.legs;
    legs.sort_unstable();
    match (legs, s.center) {
        ([3, 3, 3], 4) => Some(QeqType::Z3),
        ([2, 4, 4], 3) => Some(QeqType::Z4),
        ([2, 3, 6], 2) => Some(QeqType::Z6),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(s: &str) -> Chain {
        s.parse().unwrap()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(hj_expand_u64(25, 9).unwrap(), ch("3,5,2"));
        assert_eq!(hj_expand_u64(4, 1).unwrap(), ch("4"));
        assert_eq!(hj_expand_u64(49, 20).unwrap(), ch("3,2,6,2"));
        assert!(hj_expand_u64(4, 2).is_err());
        assert!(hj_expand_u64(3, 3).is_err());
        let big = (BigInt::one() << 80) + 1;
        assert!(matches!(hj_expand(&big, &BigInt::from(3)), Err(ChainError::EntryTooLarge(_))));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(hj_eval(&ch("4")), (4.into(), 1.into()));
        assert_eq!(hj_eval(&ch("2,7,2,2,3")), (81.into(), 44.into()));
        let (p, _) = hj_eval(&ch("5,2,9,2,2,2,2,4,2,2,2"));
        assert_eq!(p, BigInt::from(58 * 58));
    }

    #[test]
    fn wahl_examples() {
        let w = |n: i64, a: i64| Some(WahlParams { n: n.into(), a: a.into() });
        assert_eq!(wahl_params(&ch("4")), w(2, 1));
        assert_eq!(wahl_params(&ch("3,3")), None);
        assert_eq!(wahl_params(&ch("2,7,2,2,3")), w(9, 4));
    }

    #[test]
    fn generator_small() {
        let g1: Vec<Chain> = wahl_generate(1).into_iter().collect();
        assert_eq!(g1, vec![ch("4")]);
        let g2 = wahl_generate(2);
        assert_eq!(g2, [ch("4"), ch("5,2"), ch("2,5")].into_iter().collect());
        assert!(wahl_generate(6).iter().all(|c| wahl_params(c).is_some()));
    }

    #[test]
    fn dual_examples() {
        assert_eq!(chain_dual(&ch("4")), ch("4"));
        assert_eq!(chain_dual(&ch("2,6,2,3")), ch("3,2,6,2"));
        let (p, q) = hj_eval(&ch("3,2,6,2"));
        let (_, q2) = hj_eval(&chain_dual(&ch("3,2,6,2")));
        assert_eq!((p.clone(), q.clone(), q2.clone()), (49.into(), 20.into(), 27.into()));
        assert!(((q * q2) % p).is_one());
    }

    #[test]
    fn qeq_examples() {
        let s = |t: &str| t.parse::<QeqStar>().unwrap();
        assert_eq!(qeq_classify(&s("3,3,3;4")), Some(QeqType::Z3));
        assert_eq!(qeq_classify(&s("[2,3,6;2]")), Some(QeqType::Z6));
        assert_eq!(qeq_classify(&s("4,4,2;3")), Some(QeqType::Z4));
        assert_eq!(qeq_classify(&s("3,3,4;4")), None);
    }

    #[test]
    fn chain_parse_rejects() {
        assert!("1,4".parse::<Chain>().is_err());
        assert!("".parse::<Chain>().is_err());
        assert_eq!(ch("[3,5,2]").to_string(), "[3,5,2]");
    }
}
