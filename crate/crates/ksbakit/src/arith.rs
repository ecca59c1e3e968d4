//! Exact rational and integer linear algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular system: row {row} is dependent on earlier rows")]
    Singular { row: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch")]
    Dimension,
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses "p/q", "p" or "-p/q".
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let bad = || ArithError::BadRational(s.to_string());
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, ArithError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(ArithError::Dimension);
        }
        let data = rows.iter().flat_map(|x| x.iter().cloned().map(Into::into)).collect();
        Ok(IntMatrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| Rational::from_integer(x.clone())).collect()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", row.join(","))?;
        }
        write!(f, "]")
    }
}

/// Runs Bareiss elimination without pivoting and returns the leading
/// principal minors, stopping at the first zero one.
fn bareiss_minors(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.rows;
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let p = a.get(k, k).clone();
        minors.push(p.clone());
        if p.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&p * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
        }
        prev = p;
    }
    minors
}

/// Fraction-free determinant.
pub fn int_det(m: &IntMatrix) -> Result<BigInt, ArithError> {
    if !m.is_square() {
        return Err(ArithError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        let p = a.get(k, k).clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&p * a.get(i, j) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, k, BigInt::zero());
        }
        prev = p;
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Invariant factors d1 | d2 | ... of length min(rows, cols); zeros last.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let (r, c) = (a.rows, a.cols);
    let n = r.min(c);
    for t in 0..n {
        loop {
            // smallest nonzero entry in the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let v = a.get(i, j);
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(&a, n);
            };
            a.swap_rows(t, pi);
            a.swap_cols(t, pj);
            let p = a.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..r {
                let q = a.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    for j in t..c {
                        let v = a.get(i, j) - &q * a.get(t, j);
                        a.set(i, j, v);
                    }
                }
                dirty |= !a.get(i, t).is_zero();
            }
            for j in t + 1..c {
                let q = a.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    for i in t..r {
                        let v = a.get(i, j) - &q * a.get(i, t);
                        a.set(i, j, v);
                    }
                }
                dirty |= !a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // pivot must divide the rest of the block
            let bad =
                (t + 1..r).flat_map(|i| (t + 1..c).map(move |j| (i, j))).find(|&(i, j)| !(a.get(i, j) % &p).is_zero());
            match bad {
                Some((i, _)) => {
                    for j in t..c {
                        let v = a.get(t, j) + a.get(i, j);
                        a.set(t, j, v);
                    }
                }
                None => break,
            }
        }
    }
    finish_snf(&a, n)
}

fn finish_snf(a: &IntMatrix, n: usize) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = (0..n).map(|i| a.get(i, i).abs()).collect();
    // zeros last; nonzero part is already a divisibility chain
    let nz: Vec<BigInt> = d.iter().filter(|x| !x.is_zero()).cloned().collect();
    let zeros = d.len() - nz.len();
    d = nz;
    d.extend(std::iter::repeat_n(BigInt::zero(), zeros));
    d
}

/// Exact solve of m x = b.
pub fn rat_solve(m: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, ArithError> {
    let n = m.len();
    if b.len() != n {
        return Err(ArithError::Dimension);
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(ArithError::NotSquare { rows: n, cols: m.first().map_or(0, |r| r.len()) });
    }
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut origin: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Err(ArithError::Singular { row: origin[k] });
        };
        a.swap(k, p);
        origin.swap(k, p);
        let piv = a[k][k].clone();
        for x in a[k].iter_mut() {
            *x /= &piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..=n {
                    let v = &a[k][j] * &f;
                    a[i][j] -= v;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n].clone()).collect())
}

/// Sylvester test on leading principal minors.
pub fn is_negative_definite(m: &IntMatrix) -> Result<bool, ArithError> {
    if !m.is_symmetric() {
        return Err(ArithError::NotSymmetric);
    }
    let minors = bareiss_minors(m);
    if minors.len() < m.rows() {
        return Ok(false);
    }
    Ok(minors.iter().enumerate().all(|(k, d)| if k % 2 == 0 { d.is_negative() } else { d.is_positive() }))
}
