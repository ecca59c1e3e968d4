//! Property suites shared by the test targets.

use ksbakit::arith::{int_det, is_negative_definite, smith_normal_form, IntMatrix};
use ksbakit::chains::{hj_eval, hj_expand_u64, wahl_generate, wahl_params, Chain};
use ksbakit::config::{BlowUpSpec, CurveConfig};
use ksbakit::contraction::ContractionSet;
use ksbakit::fundgroup::{abelianization, link_order, mumford_presentation};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

const BUDGET: Duration = Duration::from_secs(10);

/// Runs a suite and returns its wall time; panics past the budget.
pub fn timed(f: impl FnOnce()) -> Duration {
    let t = Instant::now();
    f();
    let e = t.elapsed();
    assert!(e < BUDGET, "took {e:?}");
    e
}

pub fn hj_round_trip_up_to_500() -> Duration {
    timed(|| {
        let mut count = 0;
        for p in 2u64..=500 {
            for q in 1..p {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let c = hj_expand_u64(p, q).unwrap();
                assert!(c.entries().iter().all(|&e| e >= 2));
                assert_eq!(hj_eval(&c), (BigInt::from(p), BigInt::from(q)), "{p}/{q}");
                count += 1;
            }
        }
        assert_eq!(count, 76115);
    })
}

fn all_chains(max_entry: u64, max_len: usize) -> Vec<Chain> {
    let mut out = vec![];
    let mut layer: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = vec![];
        for c in &layer {
            for e in 2..=max_entry {
                let mut d = c.clone();
                d.push(e);
                out.push(Chain::new(d.clone()).unwrap());
                next.push(d);
            }
        }
        layer = next;
    }
    out
}

pub fn wahl_generator_matches_recognizer() -> Duration {
    timed(|| {
        let generated = wahl_generate(5);
        let mut recognized = 0;
        for c in all_chains(9, 5) {
            let is_wahl = wahl_params(&c).is_some();
            assert_eq!(is_wahl, generated.contains(&c), "{c}");
            if is_wahl {
                recognized += 1;
                // independent check straight from the definition
                let w = wahl_params(&c).unwrap();
                let (p, q) = hj_eval(&c);
                assert_eq!(p, &w.n * &w.n);
                assert!(q == &w.n * &w.a - 1 || q == &w.n * (&w.n - &w.a) - 1, "{c}");
            }
        }
        let small = generated.iter().filter(|c| c.entries().iter().all(|&e| e <= 9)).count();
        assert_eq!(recognized, small);
    })
}

fn random_config(rng: &mut StdRng) -> CurveConfig {
    let n = rng.gen_range(1..=5);
    let mut c = CurveConfig::new(rng.gen_range(-5..=9));
    for i in 0..n {
        let genus = if rng.gen_bool(0.3) { rng.gen_range(1..=2) } else { 0 };
        c.add_curve(&format!("C{i}"), rng.gen_range(-6..=4), genus).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.4) {
                c.set_incidence(&format!("C{i}"), &format!("C{j}"), rng.gen_range(1..=3)).unwrap();
            }
        }
    }
    c
}

fn random_center(rng: &mut StdRng, c: &CurveConfig) -> Vec<(String, i64)> {
    let names = c.names();
    match rng.gen_range(0..4) {
        0 => vec![],
        1 => {
            let a = &names[rng.gen_range(0..names.len())];
            let m = if c.curve(a).unwrap().genus > 0 && rng.gen_bool(0.5) { 2 } else { 1 };
            vec![(a.clone(), m)]
        }
        _ => {
            let pairs: Vec<(String, String)> =
                c.incidences().filter(|(_, _, m)| *m > 0).map(|(a, b, _)| (a.to_string(), b.to_string())).collect();
            if pairs.is_empty() {
                vec![(names[0].clone(), 1)]
            } else {
                let (a, b) = pairs[rng.gen_range(0..pairs.len())].clone();
                vec![(a, 1), (b, 1)]
            }
        }
    }
}

/// The blow-up lattice: strict transforms are pullbacks minus m E.
fn check_lattice(before: &CurveConfig, after: &CurveConfig, spec: &BlowUpSpec) {
    let mult = |x: &str| spec.center.iter().find(|(c, _)| c == x).map_or(0, |(_, m)| *m);
    for a in before.names() {
        for b in before.names() {
            assert_eq!(after.dot(&a, &b).unwrap(), before.dot(&a, &b).unwrap() - mult(&a) * mult(&b), "{a}.{b}");
        }
        assert_eq!(after.dot(&a, &spec.new_name).unwrap(), mult(&a));
        let m = mult(&a);
        assert_eq!(after.curve(&a).unwrap().genus, before.curve(&a).unwrap().genus - m * (m - 1) / 2);
        // adjunction degree of K on the strict transform
        assert_eq!(after.canonical_degree(&a).unwrap(), before.canonical_degree(&a).unwrap() + m);
    }
    assert_eq!(after.dot(&spec.new_name, &spec.new_name).unwrap(), -1);
    assert_eq!(after.kz_squared, before.kz_squared - 1);
}

pub fn blow_up_blow_down_round_trip() -> Duration {
    timed(|| {
        let mut rng = StdRng::seed_from_u64(7);
        for trial in 0..1000 {
            let start = random_config(&mut rng);
            let mut states = vec![start.clone()];
            let mut specs = vec![];
            for k in 0..rng.gen_range(1..=3) {
                let cur = states.last().unwrap();
                let spec = BlowUpSpec { center: random_center(&mut rng, cur), new_name: format!("X{k}") };
                let next = cur.blow_up(&spec).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
                check_lattice(cur, &next, &spec);
                states.push(next);
                specs.push(spec);
            }
            for (k, spec) in specs.iter().enumerate().rev() {
                let (down, center) = states[k + 1].blow_down(&spec.new_name).unwrap();
                assert_eq!(down, states[k], "trial {trial}");
                let mut want = spec.center.clone();
                let mut got = center.center.clone();
                want.sort();
                got.sort();
                assert_eq!(got, want, "trial {trial}");
            }
        }
    })
}

fn random_tree(rng: &mut StdRng) -> (CurveConfig, ContractionSet) {
    let n = rng.gen_range(1..=6);
    let mut c = CurveConfig::new(0);
    let names: Vec<String> = (0..n).map(|i| format!("T{i}")).collect();
    for x in &names {
        c.add_curve(x, -rng.gen_range(2..=8), 0).unwrap();
    }
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        c.set_incidence(&names[i], &names[parent], 1).unwrap();
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    (c, ContractionSet::chain("T", &refs))
}

pub fn abelianization_order_is_determinant_on_trees() -> Duration {
    timed(|| {
        let mut rng = StdRng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 2000 {
            let (c, s) = random_tree(&mut rng);
            let m = c.intersection_matrix(&s.members()).unwrap();
            if !is_negative_definite(&m).unwrap() {
                continue;
            }
            let ab = abelianization(&mumford_presentation(&c, &s).unwrap());
            assert_eq!(ab.order().unwrap(), int_det(&m).unwrap().abs());
            assert_eq!(ab.order().unwrap(), link_order(&c, &s).unwrap());
            checked += 1;
        }
    })
}

pub fn link_order_is_the_chain_numerator() -> Duration {
    timed(|| {
        for ch in all_chains(7, 4) {
            let names: Vec<String> = (0..ch.len()).map(|i| format!("A{i}")).collect();
            let mut c = CurveConfig::new(0);
            for (x, e) in names.iter().zip(ch.entries()) {
                c.add_curve(x, -(*e as i64), 0).unwrap();
            }
            for w in names.windows(2) {
                c.set_incidence(&w[0], &w[1], 1).unwrap();
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let s = ContractionSet::chain("A", &refs);
            assert_eq!(link_order(&c, &s).unwrap(), hj_eval(&ch).0, "{ch}");
        }
    })
}

fn random_matrix(rng: &mut StdRng, n: usize, symmetric: bool) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if symmetric && j < i {
                let v = m.get(j, i).clone();
                m.set(i, j, v);
            } else {
                m.set(i, j, BigInt::from(rng.gen_range(-6..=6)));
            }
        }
    }
    m
}

/// Cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    let mut total = BigInt::from(0);
    for j in 0..m.len() {
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn smith_form_product_is_determinant() -> Duration {
    timed(|| {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let m = random_matrix(&mut rng, n, false);
            let det = cofactor_det(&rows(&m));
            assert_eq!(int_det(&m).unwrap(), det);
            let d = smith_normal_form(&m);
            let prod: BigInt = d.iter().product();
            assert_eq!(prod, det.abs());
            for w in d.windows(2) {
                assert!(w[1].is_zero_or_multiple(&w[0]), "{d:?}");
            }
        }
    })
}

trait Divides {
    fn is_zero_or_multiple(&self, of: &BigInt) -> bool;
}

impl Divides for BigInt {
    fn is_zero_or_multiple(&self, of: &BigInt) -> bool {
        use num_traits::Zero;
        self.is_zero() || (!of.is_zero() && (self % of).is_zero())
    }
}

pub fn negative_definiteness_against_all_principal_minors() -> Duration {
    timed(|| {
        let mut rng = StdRng::seed_from_u64(5);
        let mut definite = 0;
        for _ in 0..3000 {
            let n = rng.gen_range(1..=4);
            let mut m = random_matrix(&mut rng, n, true);
            for i in 0..n {
                let v = BigInt::from(-rng.gen_range(1..=8));
                m.set(i, i, v);
            }
            let r = rows(&m);
            // every principal minor of size k has sign (-1)^k
            let oracle = (1u32..(1 << n)).all(|mask| {
                let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let sub: Vec<Vec<BigInt>> =
                    idx.iter().map(|&i| idx.iter().map(|&j| r[i][j].clone()).collect()).collect();
                let d = cofactor_det(&sub);
                if idx.len().is_multiple_of(2) {
                    d.is_positive()
                } else {
                    d.is_negative()
                }
            });
            assert_eq!(is_negative_definite(&m).unwrap(), oracle, "{m}");
            definite += oracle as usize;
        }
        assert!(definite > 100);
    })
}
