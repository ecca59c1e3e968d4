//! One line per acceptance criterion. Exits nonzero only when a criterion
//! fails in a way not already accounted for in the known-deviation list.

mod common;

use common::{data_path, load, suites, EXAMPLES};
use ksbakit::chains::QeqStar;
use ksbakit::config::CurveConfig;
use ksbakit::contraction::{ample_certificate, k_squared, pullback_class, AmpleVerdict, ContractionSet};
use ksbakit::fundgroup::{abelianization, link_order, mumford_presentation, trivialize, Pi1Verdict};
use ksbakit::obstruction::{check_derivation, DerivationVerdict, Lemma, Step};
use ksbakit::tables::{parse_tables, verify_tables};
use ksbakit::Rational;
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::time::Instant;

enum Outcome {
    Pass(String),
    /// Fails exactly as recorded for the bundled inputs.
    KnownFail(String),
    Fail(String),
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let text = std::fs::read_to_string(data_path("tables.json")).unwrap();
    let report = verify_tables(&parse_tables(&text).unwrap());
    let elapsed = t.elapsed();
    let failed: BTreeSet<(u8, u64, u64)> = report.failures().map(|r| (r.k_squared, r.n, r.a)).collect();
    let expected: BTreeSet<_> = [(1, 19, 8), (2, 14, 5)].into();
    let detail = format!("{} rows, failing {:?}, {:?}", report.rows.len(), failed, elapsed);
    if elapsed.as_secs_f64() >= 1.0 {
        return Outcome::Fail(format!("too slow: {detail}"));
    }
    if failed == expected {
        return Outcome::Pass(detail);
    }
    // The K^2=3 row (113,25) lists the chain of (103,25).
    let mut known = expected.clone();
    known.insert((3, 113, 25));
    if failed == known {
        Outcome::KnownFail(format!("{detail}; (113,25) lists the chain of (103,25)"))
    } else {
        Outcome::Fail(detail)
    }
}

const SUMS: [(&str, i64, &[usize], i64); 6] = [
    ("s31", -10, &[1, 1, 4, 5], 1),
    ("s32", -9, &[2, 4, 4], 1),
    ("s33", -6, &[3, 4], 1),
    ("s41", -13, &[1, 2, 2, 6, 4], 2),
    ("s42", -9, &[2, 5, 4], 2),
    ("s43", -11, &[2, 7, 4], 2),
];

fn criterion_2() -> Outcome {
    let mut got = vec![];
    for (name, kz, sizes, kx) in SUMS {
        let p = load(name);
        let mut have: Vec<usize> = p.sets.iter().map(|s| s.members().len()).collect();
        let mut want = sizes.to_vec();
        have.sort();
        want.sort();
        let k = k_squared(&p.config, &p.sets).unwrap();
        if p.config.kz_squared != kz || have != want || k != kx {
            return Outcome::Fail(format!("{name}: K_Z^2 {} sizes {have:?} K_X^2 {k}", p.config.kz_squared));
        }
        got.push(k);
    }
    Outcome::Pass(format!("K_X^2 = {got:?}"))
}

fn criterion_3() -> Outcome {
    let zero = Rational::from_integer(0.into());
    for name in EXAMPLES {
        let p = load(name);
        let class = pullback_class(&p.config, &p.sets).unwrap();
        let k = k_squared(&p.config, &p.sets).unwrap();
        if class.square != Rational::from_integer(k.into()) {
            return Outcome::Fail(format!("{name}: (f*K)^2 = {} but K^2 = {k}", class.square));
        }
        for s in &p.sets {
            for c in s.members() {
                let d = class.dot(&p.config, &c).unwrap();
                if d != zero {
                    return Outcome::Fail(format!("{name}: (f*K).{c} = {d}"));
                }
            }
        }
    }
    Outcome::Pass("(f*K).E = 0 on every contracted curve and (f*K)^2 = K_X^2 on all six".into())
}

fn criterion_4() -> Outcome {
    let expected = |name: &str| {
        if name == "s41" {
            AmpleVerdict::NefNotAmple(vec!["G10".into()])
        } else {
            AmpleVerdict::Ample
        }
    };
    // With the stored pullback coefficients G4 and G5 are zero curves.
    let known = |name: &str| match name {
        "s31" => Some(AmpleVerdict::NefNotAmple(vec!["G4".into()])),
        "s32" => Some(AmpleVerdict::NefNotAmple(vec!["G5".into()])),
        _ => None,
    };
    let mut wrong = vec![];
    let mut unexplained = false;
    let mut summary = vec![];
    for name in EXAMPLES {
        let p = load(name);
        let v = ample_certificate(&p.config, &p.sets, "nodal", p.pullback.as_deref()).unwrap();
        summary.push(format!("{name}: {v}"));
        if v != expected(name) {
            unexplained |= known(name).as_ref() != Some(&v);
            wrong.push(format!("{name}: {v}"));
        }
    }
    match (wrong.is_empty(), unexplained) {
        (true, _) => Outcome::Pass(summary.join("; ")),
        (false, false) => Outcome::KnownFail(wrong.join("; ")),
        (false, true) => Outcome::Fail(wrong.join("; ")),
    }
}

fn star(s: &str) -> (CurveConfig, ContractionSet) {
    let q: QeqStar = s.parse().unwrap();
    let mut c = CurveConfig::new(0);
    c.add_curve("c", -(q.center as i64), 0).unwrap();
    for (i, w) in q.legs.iter().enumerate() {
        c.add_curve(&format!("l{i}"), -(*w as i64), 0).unwrap();
        c.set_incidence(&format!("l{i}"), "c", 1).unwrap();
    }
    (c, ContractionSet::star("Q", &["l0", "l1", "l2"], "c"))
}

fn criterion_5() -> Outcome {
    let mut notes = vec![];
    for (s, want) in [("3,3,3;4", 81), ("4,2,4;3", 64), ("2,3,6;2", 36)] {
        let (c, set) = star(s);
        let m = c.intersection_matrix(&set.members()).unwrap();
        let rows: Vec<Vec<BigInt>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let oracle = suites::cofactor_det(&rows);
        let ab = abelianization(&mumford_presentation(&c, &set).unwrap()).order();
        let want = BigInt::from(want);
        if ab.as_ref() != Some(&want) || oracle.magnitude() != want.magnitude() {
            return Outcome::Fail(format!("[{s}]: |H1| {ab:?}, cofactor det {oracle}"));
        }
        notes.push(format!("[{s}] {want}"));
    }
    let mut c = CurveConfig::new(0);
    for (x, w) in [("a", -6), ("b", -2), ("d", -2)] {
        c.add_curve(x, w, 0).unwrap();
    }
    c.set_incidence("a", "b", 1).unwrap();
    c.set_incidence("b", "d", 1).unwrap();
    let order = link_order(&c, &ContractionSet::chain("W", &["a", "b", "d"])).unwrap();
    if order != BigInt::from(16) {
        return Outcome::Fail(format!("[6,2,2] link order {order}"));
    }
    notes.push("[6,2,2] 16".into());
    for name in EXAMPLES {
        let p = load(name);
        let t = trivialize(&p.config, &p.sets, &p.bridges).unwrap();
        let again = trivialize(&p.config, &p.sets, &p.bridges).unwrap();
        if t.verdict != Pi1Verdict::Trivial || t.log.is_empty() || t != again {
            return Outcome::Fail(format!("{name}: {:?}", t.verdict));
        }
    }
    notes.push("trivial on all six".into());
    Outcome::Pass(notes.join(", "))
}

fn criterion_6() -> Outcome {
    let runs = [
        ("hj round trip", suites::hj_round_trip_up_to_500 as fn() -> std::time::Duration),
        ("wahl equivalence", suites::wahl_generator_matches_recognizer),
        ("blow-up round trip", suites::blow_up_blow_down_round_trip),
        ("abelianization vs det", suites::abelianization_order_is_determinant_on_trees),
    ];
    let mut times = vec![];
    for (name, f) in runs {
        match std::panic::catch_unwind(f) {
            Ok(t) => times.push(format!("{name} {:.2}s", t.as_secs_f64())),
            Err(_) => return Outcome::Fail(format!("{name} failed")),
        }
    }
    Outcome::Pass(times.join(", "))
}

fn criterion_7() -> Outcome {
    for name in EXAMPLES {
        let p = load(name);
        let v = check_derivation(&p.config, p.derivation.as_ref().unwrap(), &p.sets).unwrap();
        if !v.is_valid() {
            return Outcome::Fail(format!("{name}: {v}"));
        }
    }
    let p = load("s31");
    let base = p.derivation.clone().unwrap();
    let mut delete = base.clone();
    delete.insert(1, Step::DeleteMinusOneCurve("F".into()));
    let mut touching = base.clone();
    let ade = touching.remove(1);
    let e3 = touching.iter().position(|s| matches!(s, Step::AddMinusOneCurve { curve, .. } if curve == "E3")).unwrap();
    touching.insert(e3 + 1, ade);
    let mut notes = vec!["six scripts valid".to_string()];
    for (what, script, lemma) in
        [("delete non-(-1)", delete, Lemma::MinusOneCurve), ("ADE touching D", touching, Lemma::AdeDisjoint)]
    {
        match check_derivation(&p.config, &script, &p.sets).unwrap() {
            DerivationVerdict::Invalid { lemma: l, .. } if l == lemma => notes.push(format!("{what} rejected [{l}]")),
            other => return Outcome::Fail(format!("{what}: {other}")),
        }
    }
    Outcome::Pass(notes.join(", "))
}

fn main() {
    let criteria: [(u8, fn() -> Outcome); 7] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
    ];
    let mut unexpected = 0;
    for (n, f) in criteria {
        match f() {
            Outcome::Pass(d) => println!("criterion {n}: PASS  {d}"),
            Outcome::KnownFail(d) => println!("criterion {n}: FAIL  {d} (known)"),
            Outcome::Fail(d) => {
                println!("criterion {n}: FAIL  {d}");
                unexpected += 1;
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
