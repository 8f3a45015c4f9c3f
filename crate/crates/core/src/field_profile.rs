//! Fields, places and integral ideals, described only through degree,
//! discriminant and per-place residue data.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::error::{Result, RtfError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FinitePlace {
    pub q: u64,
    pub label: String,
    #[serde(default)]
    pub d: u32,
}

impl FinitePlace {
    pub fn new(label: impl Into<String>, q: u64, d: u32) -> Result<Self> {
        if q < 2 || !is_prime_power(q) {
            return Err(RtfError::invalid(format!("residue cardinality {q} is not a prime power >= 2")));
        }
        Ok(FinitePlace {
            q,
            label: label.into(),
            d,
        })
    }

    /// The place of Q above the rational prime p.
    pub fn rational(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(RtfError::invalid(format!("{p} is not prime")));
        }
        Ok(FinitePlace {
            q: p,
            label: p.to_string(),
            d: 0,
        })
    }

    pub fn log_q(&self) -> f64 {
        (self.q as f64).ln()
    }
}

impl fmt::Display for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Debug, Clone, Deserialize)]
struct ProfileSpec {
    degree: u32,
    discriminant: u64,
    #[serde(default)]
    places: Vec<PlaceSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlaceSpec {
    label: String,
    q: u64,
    #[serde(default)]
    d: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    degree: u32,
    discriminant: u64,
    archimedean: Vec<String>,
    finite: BTreeMap<String, FinitePlace>,
    rational: bool,
}

impl FieldProfile {
    pub fn rational() -> Self {
        FieldProfile {
            degree: 1,
            discriminant: 1,
            archimedean: vec!["inf".into()],
            finite: BTreeMap::new(),
            rational: true,
        }
    }

    pub fn new(degree: u32, discriminant: u64, places: Vec<FinitePlace>) -> Result<Self> {
        if degree == 0 {
            return Err(RtfError::invalid("degree must be at least 1"));
        }
        if discriminant == 0 {
            return Err(RtfError::invalid("discriminant must be at least 1"));
        }
        let rational = degree == 1;
        if rational && discriminant != 1 {
            return Err(RtfError::invalid("a degree-1 field has discriminant 1"));
        }
        let mut finite = BTreeMap::new();
        for p in places {
            FinitePlace::new(p.label.clone(), p.q, p.d)?;
            if rational && (p.d != 0 || p.label != p.q.to_string() || !is_prime(p.q)) {
                return Err(RtfError::invalid(format!(
                    "place {} is not a rational prime with d = 0",
                    p.label
                )));
            }
            if finite.insert(p.label.clone(), p).is_some() {
                return Err(RtfError::invalid("duplicate place label"));
            }
        }
        let archimedean = if degree == 1 {
            vec!["inf".into()]
        } else {
            (0..degree).map(|i| format!("inf{i}")).collect()
        };
        Ok(FieldProfile {
            degree,
            discriminant,
            archimedean,
            finite,
            rational,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ProfileSpec =
            serde_json::from_str(text).map_err(|e| RtfError::parse(format!("profile: {e}")))?;
        let places = spec
            .places
            .into_iter()
            .map(|p| FinitePlace {
                q: p.q,
                label: p.label,
                d: p.d,
            })
            .collect();
        FieldProfile::new(spec.degree, spec.discriminant, places)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RtfError::parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let places: Vec<PlaceSpec> = self
            .finite
            .values()
            .map(|p| PlaceSpec {
                label: p.label.clone(),
                q: p.q,
                d: p.d,
            })
            .collect();
        serde_json::json!({
            "degree": self.degree,
            "discriminant": self.discriminant,
            "places": places,
        })
        .to_string()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn discriminant(&self) -> u64 {
        self.discriminant
    }

    pub fn is_rational(&self) -> bool {
        self.rational
    }

    pub fn archimedean_places(&self) -> &[String] {
        &self.archimedean
    }

    /// Looks a finite place up by label; over Q any prime label resolves.
    pub fn place(&self, label: &str) -> Result<FinitePlace> {
        if let Some(p) = self.finite.get(label) {
            return Ok(p.clone());
        }
        if self.rational {
            if let Ok(p) = label.trim().parse::<u64>() {
                return FinitePlace::rational(p);
            }
        }
        Err(RtfError::invalid(format!("unknown place {label}")))
    }

    /// Parses "1", "2^2*3" or, over Q, a plain integer such as "12".
    pub fn parse_level(&self, spec: &str) -> Result<LevelIdeal> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Err(RtfError::parse("empty level"));
        }
        if spec == "1" {
            return Ok(LevelIdeal::unit());
        }
        if self.rational && !spec.contains(['^', '*']) {
            if let Ok(n) = spec.parse::<u64>() {
                return LevelIdeal::from_integer(n);
            }
        }
        let mut factors = BTreeMap::new();
        for tok in spec.split('*') {
            let (label, e) = match tok.split_once('^') {
                Some((l, e)) => (
                    l.trim(),
                    e.trim()
                        .parse::<u32>()
                        .map_err(|_| RtfError::parse(format!("bad exponent in {tok}")))?,
                ),
                None => (tok.trim(), 1),
            };
            if e == 0 {
                continue;
            }
            let place = self.place(label).map_err(|e| RtfError::parse(e.to_string()))?;
            *factors.entry(place).or_insert(0) += e;
        }
        Ok(LevelIdeal { factors })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LevelIdeal {
    factors: BTreeMap<FinitePlace, u32>,
}

impl LevelIdeal {
    pub fn unit() -> Self {
        LevelIdeal::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (FinitePlace, u32)>>(pairs: I) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (p, e) in pairs {
            if e == 0 {
                return Err(RtfError::invalid(format!("zero exponent at {p}")));
            }
            *factors.entry(p).or_insert(0) += e;
        }
        Ok(LevelIdeal { factors })
    }

    pub fn from_integer(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(RtfError::invalid("the zero ideal is not a level"));
        }
        let pairs = factor_integer(n)
            .into_iter()
            .map(|(p, e)| (FinitePlace::rational(p).expect("factor is prime"), e))
            .collect::<Vec<_>>();
        Self::from_pairs(pairs)
    }

    pub fn prime_power(place: &FinitePlace, e: u32) -> Self {
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(place.clone(), e);
        }
        LevelIdeal { factors }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (&FinitePlace, u32)> {
        self.factors.iter().map(|(p, &e)| (p, e))
    }

    pub fn exponent(&self, place: &FinitePlace) -> u32 {
        self.factors.get(place).copied().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<FinitePlace> {
        self.factors.keys().cloned().collect()
    }

    /// S_k(n): the places where n has order exactly k.
    pub fn support_at_order(&self, k: u32) -> BTreeSet<FinitePlace> {
        self.factors
            .iter()
            .filter(|(_, &e)| e == k)
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn max_exponent(&self) -> u32 {
        self.factors.values().copied().max().unwrap_or(0)
    }

    pub fn norm(&self) -> Result<u64> {
        let mut n: u64 = 1;
        for (p, &e) in &self.factors {
            for _ in 0..e {
                n = n.checked_mul(p.q).ok_or(RtfError::NormOverflow)?;
            }
        }
        if n > 1 << 63 {
            return Err(RtfError::NormOverflow);
        }
        Ok(n)
    }

    pub fn log_norm(&self) -> f64 {
        self.factors
            .iter()
            .map(|(p, &e)| e as f64 * p.log_q())
            .sum()
    }

    pub fn norm_f64(&self) -> f64 {
        self.log_norm().exp()
    }

    pub fn mul(&self, other: &LevelIdeal) -> LevelIdeal {
        let mut factors = self.factors.clone();
        for (p, &e) in &other.factors {
            *factors.entry(p.clone()).or_insert(0) += e;
        }
        LevelIdeal { factors }
    }

    pub fn divides(&self, other: &LevelIdeal) -> bool {
        self.factors.iter().all(|(p, &e)| other.exponent(p) >= e)
    }

    /// other^{-1} self, if other divides self.
    pub fn quotient(&self, other: &LevelIdeal) -> Result<LevelIdeal> {
        if !other.divides(self) {
            return Err(RtfError::Divisibility(other.to_string(), self.to_string()));
        }
        let mut factors = BTreeMap::new();
        for (p, &e) in &self.factors {
            let r = e - other.exponent(p);
            if r > 0 {
                factors.insert(p.clone(), r);
            }
        }
        Ok(LevelIdeal { factors })
    }

    pub fn is_coprime_to(&self, other: &LevelIdeal) -> bool {
        self.factors.keys().all(|p| other.exponent(p) == 0)
    }

    /// All c with c^2 | n, unit ideal first, in lexicographic exponent order.
    pub fn square_divisor_conductors(&self) -> Vec<LevelIdeal> {
        let places: Vec<(&FinitePlace, u32)> =
            self.factors.iter().map(|(p, &e)| (p, e / 2)).collect();
        let mut out = vec![LevelIdeal::unit()];
        for (p, top) in places {
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for c in &out {
                for e in 0..=top {
                    let mut f = c.factors.clone();
                    if e > 0 {
                        f.insert(p.clone(), e);
                    }
                    next.push(LevelIdeal { factors: f });
                }
            }
            out = next;
        }
        out
    }

    pub fn square_divisor_count(&self) -> u64 {
        self.factors.values().map(|&e| 1 + (e / 2) as u64).product()
    }
}

impl fmt::Display for LevelIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, &e)| {
                if e == 1 {
                    p.label.clone()
                } else {
                    format!("{}^{}", p.label, e)
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn is_prime_power(n: u64) -> bool {
    match factor_integer(n).as_slice() {
        [(_, _)] => true,
        _ => false,
    }
}

/// Trial division, primes ascending.
pub fn factor_integer(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
