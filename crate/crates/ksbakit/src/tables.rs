//! Verification of Wahl-singularity tables.

use crate::chains::{chain_dual, hj_eval, hj_expand, Chain};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tmmr {
    Rat,
    #[serde(rename = "Dol(2,3)")]
    Dol23,
    GenType1,
    GenType2,
    GenType3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub n: u64,
    pub a: u64,
    pub chain: Vec<u64>,
    pub tmmr: Tmmr,
    pub reference: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub k_squared: u8,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Erratum {
    pub k_squared: u8,
    pub n: u64,
    pub a: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrataFile {
    pub errata: Vec<Erratum>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowResult {
    pub k_squared: u8,
    /// 1-based row number within its table.
    pub row: usize,
    pub n: u64,
    pub a: u64,
    pub chain: String,
    pub pass: bool,
    pub reason: Option<String>,
}

impl fmt::Display for RowResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "pass" } else { "FAIL" };
        write!(f, "K^2={} row {} ({},{}) {} {}", self.k_squared, self.row, self.n, self.a, self.chain, status)?;
        if let Some(r) = &self.reason {
            write!(f, ": {r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableReport {
    pub rows: Vec<RowResult>,
}

impl TableReport {
    pub fn failures(&self) -> impl Iterator<Item = &RowResult> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

pub fn parse_tables(text: &str) -> Result<TableFile, String> {
    let file: TableFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    for t in &file.tables {
        if !(1..=4).contains(&t.k_squared) {
            return Err(format!("table with K^2 = {} out of range", t.k_squared));
        }
        for (i, r) in t.rows.iter().enumerate() {
            if Chain::new(r.chain.clone()).is_err() {
                return Err(format!("K^2={} row {}: invalid chain", t.k_squared, i + 1));
            }
        }
    }
    Ok(file)
}

pub fn verify_row(k_squared: u8, index: usize, r: &TableRow) -> RowResult {
    let chain = Chain::new(r.chain.clone()).expect("validated");
    let mut res =
        RowResult { k_squared, row: index + 1, n: r.n, a: r.a, chain: chain.to_string(), pass: false, reason: None };
    let n = BigInt::from(r.n);
    let a = BigInt::from(r.a);
    if r.a == 0 || r.a >= r.n || !n.gcd(&a).is_one() {
        res.reason = Some(format!("({},{}) is not a valid pair", r.n, r.a));
        return res;
    }
    let p = &n * &n;
    let mut expansions = Vec::new();
    for a in [a.clone(), &n - &a] {
        let q = &n * &a - 1u32;
        match hj_expand(&p, &q) {
            Ok(e) => {
                if e == chain || chain_dual(&e) == chain {
                    res.pass = true;
                    return res;
                }
                expansions.push(e.to_string());
            }
            Err(e) => expansions.push(e.to_string()),
        }
    }
    let (cp, cq) = hj_eval(&chain);
    res.reason =
        Some(format!("expected {} (or reversed); listed chain evaluates to {cp}/{cq}", expansions.join(" or ")));
    res
}

pub fn verify_tables(file: &TableFile) -> TableReport {
    let rows = file
        .tables
        .iter()
        .flat_map(|t| t.rows.iter().enumerate().map(move |(i, r)| verify_row(t.k_squared, i, r)))
        .collect();
    TableReport { rows }
}

/// Failures not listed in the allowlist.
pub fn unexpected_failures<'a>(report: &'a TableReport, errata: &[Erratum]) -> Vec<&'a RowResult> {
    report
        .failures()
        .filter(|r| !errata.iter().any(|e| e.k_squared == r.k_squared && e.n == r.n && e.a == r.a))
        .collect()
}
