//! Dual-graph model of a curve configuration on a smooth surface.

use crate::arith::IntMatrix;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown curve {0:?}")]
    UnknownCurve(String),
    #[error("duplicate curve name {0:?}")]
    Duplicate(String),
    #[error("blow-up center: {0}")]
    BadCenter(String),
    #[error("{name:?} is not a smooth rational (-1)-curve (self-intersection {self_int}, genus {genus})")]
    NotExceptional { name: String, self_int: i64, genus: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub name: String,
    pub self_int: i64,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub name: String,
    pub components: Vec<(String, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpSpec {
    pub center: Vec<(String, i64)>,
    pub new_name: String,
}

impl BlowUpSpec {
    pub fn new(new_name: &str, center: &[(&str, i64)]) -> Self {
        BlowUpSpec { new_name: new_name.to_string(), center: center.iter().map(|(c, m)| (c.to_string(), *m)).collect() }
    }
}

impl fmt::Display for BlowUpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.center.iter().map(|(n, m)| format!("{n}:{m}")).collect();
        write!(f, "{} [{}]", self.new_name, c.join(","))
    }
}

fn pair(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CurveConfig {
    curves: Vec<Curve>,
    incidences: BTreeMap<(String, String), i64>,
    pub kz_squared: i64,
    pub fibers: Vec<Fiber>,
}

impl CurveConfig {
    pub fn new(kz_squared: i64) -> Self {
        CurveConfig { kz_squared, ..Default::default() }
    }

    pub fn add_curve(&mut self, name: &str, self_int: i64, genus: i64) -> Result<(), ConfigError> {
        if self.has(name) {
            return Err(ConfigError::Duplicate(name.to_string()));
        }
        self.curves.push(Curve { name: name.to_string(), self_int, genus });
        Ok(())
    }

    /// Sets the intersection number of two distinct curves; 0 removes it.
    pub fn set_incidence(&mut self, a: &str, b: &str, mult: i64) -> Result<(), ConfigError> {
        for n in [a, b] {
            if !self.has(n) {
                return Err(ConfigError::UnknownCurve(n.to_string()));
            }
        }
        if a == b {
            return Err(ConfigError::BadCenter(format!("self-pair on {a:?}")));
        }
        if mult == 0 {
            self.incidences.remove(&pair(a, b));
        } else {
            self.incidences.insert(pair(a, b), mult);
        }
        Ok(())
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    /// First difference in curves, incidences or K^2, ignoring curve order
    /// and fibers.
    pub fn surface_difference(&self, other: &CurveConfig) -> Option<String> {
        if self.kz_squared != other.kz_squared {
            return Some(format!("K^2 {} vs {}", self.kz_squared, other.kz_squared));
        }
        for c in &self.curves {
            match other.curve(&c.name) {
                Err(_) => return Some(format!("extra curve {}", c.name)),
                Ok(o) if o != c => {
                    return Some(format!(
                        "{}: ({}, genus {}) vs ({}, genus {})",
                        c.name, c.self_int, c.genus, o.self_int, o.genus
                    ))
                }
                Ok(_) => {}
            }
        }
        if let Some(c) = other.curves.iter().find(|c| !self.has(&c.name)) {
            return Some(format!("missing curve {}", c.name));
        }
        for key in self.incidences.keys().chain(other.incidences.keys()) {
            let (x, y) = (self.incidences.get(key), other.incidences.get(key));
            if x != y {
                return Some(format!("{}.{} = {} vs {}", key.0, key.1, x.unwrap_or(&0), y.unwrap_or(&0)));
            }
        }
        None
    }

    pub fn names(&self) -> Vec<String> {
        self.curves.iter().map(|c| c.name.clone()).collect()
    }

    pub fn has(&self, name: &str) -> bool {
        self.curves.iter().any(|c| c.name == name)
    }

    pub fn curve(&self, name: &str) -> Result<&Curve, ConfigError> {
        self.curves.iter().find(|c| c.name == name).ok_or_else(|| ConfigError::UnknownCurve(name.to_string()))
    }

    fn curve_mut(&mut self, name: &str) -> &mut Curve {
        self.curves.iter_mut().find(|c| c.name == name).expect("checked curve")
    }

    pub fn incidence(&self, a: &str, b: &str) -> i64 {
        if a == b {
            return 0;
        }
        self.incidences.get(&pair(a, b)).copied().unwrap_or(0)
    }

    pub fn incidences(&self) -> impl Iterator<Item = (&str, &str, i64)> {
        self.incidences.iter().map(|((a, b), m)| (a.as_str(), b.as_str(), *m))
    }

    /// Intersection number, with C.C the self-intersection.
    pub fn dot(&self, a: &str, b: &str) -> Result<i64, ConfigError> {
        if a == b {
            Ok(self.curve(a)?.self_int)
        } else {
            self.curve(a)?;
            self.curve(b)?;
            Ok(self.incidence(a, b))
        }
    }

    /// Curves meeting `name`, in configuration order.
    pub fn neighbors(&self, name: &str) -> Vec<(String, i64)> {
        self.curves
            .iter()
            .filter_map(|c| {
                let m = self.incidence(name, &c.name);
                (m > 0).then(|| (c.name.clone(), m))
            })
            .collect()
    }

    pub fn intersection_matrix<S: AsRef<str>>(&self, names: &[S]) -> Result<IntMatrix, ConfigError> {
        let n = names.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = self.dot(names[i].as_ref(), names[j].as_ref())?;
                m.set(i, j, v.into());
            }
        }
        Ok(m)
    }

    /// Adjunction: K.C = 2 p_a - 2 - C^2.
    pub fn canonical_degree(&self, name: &str) -> Result<i64, ConfigError> {
        let c = self.curve(name)?;
        Ok(2 * c.genus - 2 - c.self_int)
    }

    pub fn blow_up(&self, spec: &BlowUpSpec) -> Result<CurveConfig, ConfigError> {
        if self.has(&spec.new_name) {
            return Err(ConfigError::Duplicate(spec.new_name.clone()));
        }
        let mut out = self.clone();
        for (i, (c, m)) in spec.center.iter().enumerate() {
            let curve = self.curve(c)?;
            if *m < 1 {
                return Err(ConfigError::BadCenter(format!("multiplicity {m} on {c:?}")));
            }
            if spec.center[..i].iter().any(|(d, _)| d == c) {
                return Err(ConfigError::BadCenter(format!("{c:?} listed twice")));
            }
            let genus = curve.genus - m * (m - 1) / 2;
            if genus < 0 {
                return Err(ConfigError::BadCenter(format!("{c:?} cannot have a point of multiplicity {m}")));
            }
            let cm = out.curve_mut(c);
            cm.self_int -= m * m;
            cm.genus = genus;
        }
        for i in 0..spec.center.len() {
            for j in i + 1..spec.center.len() {
                let (a, ma) = &spec.center[i];
                let (b, mb) = &spec.center[j];
                let v = self.incidence(a, b) - ma * mb;
                if v < 0 {
                    return Err(ConfigError::BadCenter(format!(
                        "{a:?} and {b:?} do not meet with local multiplicity {}",
                        ma * mb
                    )));
                }
                out.set_incidence(a, b, v)?;
            }
        }
        out.add_curve(&spec.new_name, -1, 0)?;
        for (c, m) in &spec.center {
            out.set_incidence(c, &spec.new_name, *m)?;
        }
        out.kz_squared -= 1;
        Ok(out)
    }

    /// Contracts a smooth rational (-1)-curve, returning the smaller
    /// configuration and the blow-up that recovers this one.
    pub fn blow_down(&self, name: &str) -> Result<(CurveConfig, BlowUpSpec), ConfigError> {
        let c = self.curve(name)?;
        if c.self_int != -1 || c.genus != 0 {
            return Err(ConfigError::NotExceptional { name: name.to_string(), self_int: c.self_int, genus: c.genus });
        }
        let center = self.neighbors(name);
        let mut out = self.clone();
        for (d, m) in &center {
            let cm = out.curve_mut(d);
            cm.self_int += m * m;
            cm.genus += m * (m - 1) / 2;
        }
        for i in 0..center.len() {
            for j in i + 1..center.len() {
                let (a, ma) = &center[i];
                let (b, mb) = &center[j];
                let v = self.incidence(a, b) + ma * mb;
                out.set_incidence(a, b, v)?;
            }
        }
        out.incidences.retain(|(a, b), _| a != name && b != name);
        out.curves.retain(|c| c.name != name);
        for f in &mut out.fibers {
            f.components.retain(|(c, _)| c != name);
        }
        out.kz_squared += 1;
        Ok((out, BlowUpSpec { center, new_name: name.to_string() }))
    }

    pub fn fiber(&self, name: &str) -> Option<&Fiber> {
        self.fibers.iter().find(|f| f.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_curves() -> CurveConfig {
        let mut c = CurveConfig::new(0);
        c.add_curve("C", 0, 0).unwrap();
        c.add_curve("D", 0, 0).unwrap();
        c.set_incidence("C", "D", 1).unwrap();
        c
    }

    #[test]
    fn free_point() {
        let c = two_curves();
        let b = c.blow_up(&BlowUpSpec::new("E", &[])).unwrap();
        assert_eq!(b.kz_squared, -1);
        assert!(b.neighbors("E").is_empty());
        assert_eq!(b.blow_down("E").unwrap().0, c);
    }

    #[test]
    fn node_round_trip() {
        let c = two_curves();
        let b = c.blow_up(&BlowUpSpec::new("E", &[("C", 1), ("D", 1)])).unwrap();
        assert_eq!(b.curve("C").unwrap().self_int, -1);
        assert_eq!(b.curve("D").unwrap().self_int, -1);
        assert_eq!(b.incidence("C", "D"), 0);
        assert_eq!(b.incidence("C", "E"), 1);
        assert_eq!(b.incidence("D", "E"), 1);
        let (back, spec) = b.blow_down("E").unwrap();
        assert_eq!(back, c);
        assert_eq!(spec.center, vec![("C".to_string(), 1), ("D".to_string(), 1)]);
    }

    #[test]
    fn double_point_on_nodal_curve() {
        let mut c = CurveConfig::new(0);
        c.add_curve("F", 0, 1).unwrap();
        let b = c.blow_up(&BlowUpSpec::new("G", &[("F", 2)])).unwrap();
        assert_eq!(b.curve("F").unwrap(), &Curve { name: "F".into(), self_int: -4, genus: 0 });
        assert_eq!(b.incidence("F", "G"), 2);
        assert_eq!(b.blow_down("G").unwrap().0, c);
        // a smooth rational curve has no double point
        assert!(b.blow_up(&BlowUpSpec::new("H", &[("F", 2)])).is_err());
    }

    #[test]
    fn bad_centers() {
        let c = two_curves();
        let b = c.blow_up(&BlowUpSpec::new("E", &[("C", 1), ("D", 1)])).unwrap();
        assert!(b.blow_up(&BlowUpSpec::new("H", &[("C", 1), ("D", 1)])).is_err());
        assert!(c.blow_up(&BlowUpSpec::new("H", &[("X", 1)])).is_err());
        assert!(c.blow_up(&BlowUpSpec::new("C", &[])).is_err());
        assert!(matches!(c.blow_down("C"), Err(ConfigError::NotExceptional { .. })));
    }

    #[test]
    fn matrix_and_adjunction() {
        let mut c = CurveConfig::new(0);
        c.add_curve("A", -5, 0).unwrap();
        c.add_curve("B", -2, 0).unwrap();
        c.add_curve("F", 0, 1).unwrap();
        c.set_incidence("A", "B", 1).unwrap();
        let m = c.intersection_matrix(&["A", "B"]).unwrap();
        assert_eq!(m, IntMatrix::from_rows(&[vec![-5, 1], vec![1, -2]]).unwrap());
        assert!(m.is_symmetric());
        assert_eq!(c.canonical_degree("A").unwrap(), 3);
        assert_eq!(c.canonical_degree("F").unwrap(), 0);
        assert!(c.intersection_matrix(&["A", "Z"]).is_err());
    }
}
