//! Dirichlet characters with exact root-of-unity values, Gauss sums, the
//! census Xi(n) over Q, and quadratic characters as local sign data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, RtfError};
use crate::field_profile::{factor_integer, FinitePlace, LevelIdeal};
use crate::numeric::special::{digamma_real, gamma_r, hurwitz_zeta, riemann_zeta};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let primes: Vec<u64> = factor_integer(phi).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| primes.iter().all(|&q| pow_mod(g, phi / q, p) != 1))
        .unwrap_or(1)
}

fn unit_root(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if (2 * num).is_multiple_of(den) {
        return if num == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
    }
    if (4 * num).is_multiple_of(den) {
        return if 4 * num / den == 1 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, -1.0)
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64)
}

/// One prime-power factor p^e of the modulus with its generators.
#[derive(Debug)]
struct Component {
    p: u64,
    e: u32,
    modulus: u64,
    /// orders of the generators: [phi] for odd p, [2, 2^{e-2}] or [2] for 2
    orders: Vec<u64>,
    /// discrete logs of every residue; empty entry marks non-units
    logs: Vec<Option<[u32; 2]>>,
}

impl Component {
    fn new(p: u64, e: u32) -> Self {
        let modulus = p.pow(e);
        let mut logs = vec![None; modulus as usize];
        let orders = if p == 2 {
            match e {
                1 => {
                    logs[1] = Some([0, 0]);
                    vec![]
                }
                2 => {
                    logs[1] = Some([0, 0]);
                    logs[3] = Some([1, 0]);
                    vec![2]
                }
                _ => {
                    let half = 1u64 << (e - 2);
                    for b in 0..2u32 {
                        let mut x = if b == 0 { 1 } else { modulus - 1 };
                        for c in 0..half {
                            logs[x as usize] = Some([b, c as u32]);
                            x = x * 5 % modulus;
                        }
                    }
                    vec![2, half]
                }
            }
        } else {
            let mut g = primitive_root(p);
            if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
                g += p;
            }
            let phi = modulus / p * (p - 1);
            let mut x = 1u64;
            for k in 0..phi {
                logs[x as usize] = Some([k as u32, 0]);
                x = x * g % modulus;
            }
            vec![phi]
        };
        Component {
            p,
            e,
            modulus,
            orders,
            logs,
        }
    }
}

#[derive(Debug)]
pub struct CharacterGroup {
    modulus: u64,
    components: Vec<Component>,
    /// slot i -> (component index, generator index)
    slots: Vec<(usize, usize)>,
    exponent: u64,
}

impl CharacterGroup {
    pub fn new(modulus: u64) -> Result<Arc<Self>> {
        if modulus == 0 {
            return Err(RtfError::invalid("modulus must be positive"));
        }
        if modulus > 50_000_000 {
            return Err(RtfError::invalid(format!("modulus {modulus} too large for table-based characters")));
        }
        let components: Vec<Component> = factor_integer(modulus)
            .into_iter()
            .map(|(p, e)| Component::new(p, e))
            .collect();
        let mut slots = Vec::new();
        let mut exponent = 1;
        for (ci, c) in components.iter().enumerate() {
            for (gi, &o) in c.orders.iter().enumerate() {
                slots.push((ci, gi));
                exponent = lcm(exponent, o);
            }
        }
        Ok(Arc::new(CharacterGroup {
            modulus,
            components,
            slots,
            exponent,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.slot_orders().iter().product()
    }

    pub fn slot_orders(&self) -> Vec<u64> {
        self.slots
            .iter()
            .map(|&(ci, gi)| self.components[ci].orders[gi])
            .collect()
    }

    /// Every character, exponent vectors in lexicographic order.
    pub fn characters(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        let orders = self.slot_orders();
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut cur = vec![0u64; orders.len()];
        loop {
            out.push(DirichletCharacter {
                group: Arc::clone(self),
                exponents: cur.clone(),
            });
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "CharacterSpec", into = "CharacterSpec")]
pub struct DirichletCharacter {
    group: Arc<CharacterGroup>,
    exponents: Vec<u64>,
}

impl TryFrom<CharacterSpec> for DirichletCharacter {
    type Error = RtfError;
    fn try_from(spec: CharacterSpec) -> Result<Self> {
        DirichletCharacter::new(spec.modulus, spec.exponents)
    }
}

impl From<DirichletCharacter> for CharacterSpec {
    fn from(c: DirichletCharacter) -> Self {
        CharacterSpec {
            modulus: c.modulus(),
            exponents: c.exponents,
        }
    }
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.exponents == other.exponents
    }
}
impl Eq for DirichletCharacter {}

impl fmt::Debug for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi(mod {}, {:?})", self.modulus(), self.exponents)
    }
}

impl DirichletCharacter {
    pub fn new(modulus: u64, exponents: Vec<u64>) -> Result<Self> {
        let group = CharacterGroup::new(modulus)?;
        Self::in_group(&group, exponents)
    }

    pub fn in_group(group: &Arc<CharacterGroup>, exponents: Vec<u64>) -> Result<Self> {
        let orders = group.slot_orders();
        if exponents.len() != orders.len() {
            return Err(RtfError::invalid(format!(
                "modulus {} needs {} exponents, got {}",
                group.modulus,
                orders.len(),
                exponents.len()
            )));
        }
        let exponents = exponents.iter().zip(&orders).map(|(a, o)| a % o).collect();
        Ok(DirichletCharacter {
            group: Arc::clone(group),
            exponents,
        })
    }

    pub fn trivial(modulus: u64) -> Result<Self> {
        let group = CharacterGroup::new(modulus)?;
        let n = group.slots.len();
        Self::in_group(&group, vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    /// chi(n) = exp(2 pi i k / E) with E the group exponent; None when
    /// gcd(n, m) > 1.
    pub fn value_index(&self, n: i64) -> Option<u64> {
        let g = &self.group;
        let e = g.exponent;
        let mut acc = 0u64;
        let mut slot = 0;
        for c in &g.components {
            let r = n.rem_euclid(c.modulus as i64) as usize;
            let logs = c.logs[r]?;
            for (gi, &o) in c.orders.iter().enumerate() {
                let a = self.exponents[slot];
                acc = (acc + a * logs[gi] as u64 % o * (e / o)) % e;
                slot += 1;
            }
        }
        Some(acc)
    }

    pub fn value(&self, n: i64) -> Complex64 {
        match self.value_index(n) {
            Some(k) => unit_root(k, self.group.exponent),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    pub fn is_even(&self) -> bool {
        self.value_index(-1) == Some(0)
    }

    pub fn parity(&self) -> i8 {
        if self.is_even() {
            1
        } else {
            -1
        }
    }

    pub fn order(&self) -> u64 {
        self.exponents
            .iter()
            .zip(self.group.slot_orders())
            .fold(1, |acc, (&a, o)| lcm(acc, o / gcd(a, o)))
    }

    pub fn conj(&self) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(self.group.slot_orders())
            .map(|(&a, o)| (o - a) % o)
            .collect();
        DirichletCharacter {
            group: Arc::clone(&self.group),
            exponents,
        }
    }

    /// Exponent f_p of p in the conductor, one entry per prime of m.
    pub fn conductor_exponents(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut slot = 0;
        for c in &self.group.components {
            let k = c.orders.len();
            let a = &self.exponents[slot..slot + k];
            slot += k;
            let f = if c.p == 2 {
                match c.e {
                    1 => 0,
                    2 => {
                        if a[0] == 1 {
                            2
                        } else {
                            0
                        }
                    }
                    _ => {
                        let ord5 = c.orders[1] / gcd(a[1], c.orders[1]);
                        if ord5 > 1 {
                            2 + ord5.trailing_zeros()
                        } else if a[0] == 1 {
                            2
                        } else {
                            0
                        }
                    }
                }
            } else if a[0] == 0 {
                0
            } else {
                let mut ord = c.orders[0] / gcd(a[0], c.orders[0]);
                let mut v = 0;
                while ord.is_multiple_of(c.p) {
                    ord /= c.p;
                    v += 1;
                }
                1 + v
            };
            out.push((c.p, f));
        }
        out
    }

    pub fn conductor(&self) -> u64 {
        self.conductor_exponents()
            .iter()
            .map(|&(p, f)| p.pow(f))
            .product()
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus()
    }

    /// tau(chi) = sum_{a mod m} chi(a) e^{2 pi i a / m}.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(RtfError::NonPrimitive(self.modulus()));
        }
        Ok(self.gauss_sum_unchecked())
    }

    fn gauss_sum_unchecked(&self) -> Complex64 {
        let m = self.modulus();
        if m == 1 {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..m {
            if let Some(k) = self.value_index(a as i64) {
                acc += unit_root(k, self.group.exponent) * unit_root(a, m);
            }
        }
        acc
    }

    /// The restriction to the p-part of the modulus, as a character mod p^e.
    pub fn component(&self, p: u64) -> Option<DirichletCharacter> {
        let mut slot = 0;
        for c in &self.group.components {
            let k = c.orders.len();
            if c.p == p {
                let ex = self.exponents[slot..slot + k].to_vec();
                return DirichletCharacter::new(c.modulus, ex).ok();
            }
            slot += k;
        }
        None
    }

    /// Adelic Gauss sum over Q for primitive chi with additive character
    /// x -> e^{-2 pi i {x}_p} at p and d^x u giving Z_p^x volume 1:
    /// G(omega_p) = (1 - 1/p)^{-1} p^{-f} omega_p(p)^{-f} conj(tau(chi_p)).
    pub fn adelic_gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(RtfError::NonPrimitive(self.modulus()));
        }
        let mut total = Complex64::new(1.0, 0.0);
        for (p, f) in self.conductor_exponents() {
            let local = self.component(p).expect("prime divides modulus");
            let mut omega_p = Complex64::new(1.0, 0.0);
            for (l, _) in self.conductor_exponents() {
                if l != p {
                    omega_p *= self.component(l).expect("prime divides modulus").value(p as i64);
                }
            }
            let pf = (p as f64).powi(f as i32);
            total *= local.gauss_sum_unchecked().conj() * omega_p.powi(f as i32).inv()
                / (pf * (1.0 - 1.0 / p as f64));
        }
        Ok(total)
    }

    /// L(s, chi) without gamma factor: m^{-s} sum_a chi(a) zeta(s, a/m).
    pub fn l_finite(&self, s: Complex64) -> Result<Complex64> {
        let m = self.modulus();
        if self.is_trivial() {
            let mut z = riemann_zeta(s)?;
            for (p, _) in factor_integer(m) {
                z *= 1.0 - (-s * (p as f64).ln()).exp();
            }
            return Ok(z);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..=m {
            if let Some(k) = self.value_index(a as i64) {
                acc += unit_root(k, self.group.exponent) * hurwitz_zeta(s, a as f64 / m as f64)?;
            }
        }
        Ok(acc * (-s * (m as f64).ln()).exp())
    }

    /// (m/pi)^{s/2} Gamma(s/2) L(s, chi) for even primitive chi; for the
    /// trivial character mod 1 this is the completed Riemann zeta.
    pub fn l_completed(&self, s: Complex64) -> Result<Complex64> {
        if !self.is_even() {
            return Err(RtfError::invalid("completed L is implemented for even characters"));
        }
        if !self.is_primitive() {
            return Err(RtfError::NonPrimitive(self.modulus()));
        }
        let m = self.modulus() as f64;
        Ok((s / 2.0 * m.ln()).exp() * gamma_r(s)? * self.l_finite(s)?)
    }
}

/// L_fin(1, chi) = -(1/m) sum_{a=1}^{m-1} chi(a) psi(a/m).
pub fn l_one(chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_trivial() {
        return Err(RtfError::TrivialCharacter);
    }
    if !chi.is_primitive() {
        return Err(RtfError::NonPrimitive(chi.modulus()));
    }
    let m = chi.modulus();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..m {
        if chi.value_index(a as i64).is_some() {
            acc += chi.value(a as i64) * digamma_real(a as f64 / m as f64)?;
        }
    }
    Ok(-acc / m as f64)
}

/// Completed value sqrt(m) L_fin(1, chi) for even chi.
pub fn l_one_completed(chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_even() {
        return Err(RtfError::invalid("completed L(1) needs an even character"));
    }
    Ok(l_one(chi)? * (chi.modulus() as f64).sqrt())
}

/// Even primitive characters of conductor c for every c with c^2 | n.
pub fn enumerate_xi(n: &LevelIdeal) -> Result<Vec<DirichletCharacter>> {
    let mut out = Vec::new();
    let mut conductors: Vec<u64> = n
        .square_divisor_conductors()
        .iter()
        .map(|c| c.norm())
        .collect::<Result<_>>()?;
    conductors.sort_unstable();
    for c in conductors {
        let group = CharacterGroup::new(c)?;
        out.extend(
            group
                .characters()
                .into_iter()
                .filter(|x| x.is_even() && x.is_primitive()),
        );
    }
    Ok(out)
}

pub fn x_of_n(n: &LevelIdeal) -> Result<u64> {
    Ok(enumerate_xi(n)?.len() as u64)
}

/// The unique even primitive quadratic character of conductor m, if any.
pub fn quadratic_character(m: u64) -> Result<DirichletCharacter> {
    let group = CharacterGroup::new(m)?;
    group
        .characters()
        .into_iter()
        .find(|c| c.order() == 2 && c.is_even() && c.is_primitive())
        .ok_or_else(|| RtfError::invalid(format!("no even primitive quadratic character mod {m}")))
}

/// Brute-force references that do not use the exponent bookkeeping.
pub mod brute {
    use super::*;

    pub fn value_table(chi: &DirichletCharacter) -> Vec<Option<u64>> {
        (0..chi.modulus() as i64).map(|n| chi.value_index(n)).collect()
    }

    pub fn conductor(chi: &DirichletCharacter) -> u64 {
        let m = chi.modulus();
        (1..=m)
            .filter(|d| m.is_multiple_of(*d))
            .find(|&d| {
                (1..m.max(2))
                    .filter(|&n| n % d == 1 % d && gcd(n, m) == 1)
                    .all(|n| chi.value_index(n as i64) == Some(0))
            })
            .unwrap_or(m)
    }

    pub fn is_even(chi: &DirichletCharacter) -> bool {
        chi.value(chi.modulus() as i64 - 1).re > 0.5
    }

    /// Xi(n) for n a positive integer, scanning c = 1.. with c^2 | n.
    pub fn xi(n: u64) -> Vec<(u64, Vec<Option<u64>>)> {
        let mut out = Vec::new();
        let mut c = 1u64;
        while c * c <= n {
            if n.is_multiple_of(c * c) {
                let group = CharacterGroup::new(c).expect("small modulus");
                for chi in group.characters() {
                    if conductor(&chi) == c && is_even(&chi) {
                        out.push((c, value_table(&chi)));
                    }
                }
            }
            c += 1;
        }
        out
    }

    /// sum_{n <= N} chi(n)/n averaged over one extra period.
    pub fn l_one_series(chi: &DirichletCharacter, n_terms: u64) -> Complex64 {
        let m = chi.modulus();
        let mut s = Complex64::new(0.0, 0.0);
        for n in 1..=n_terms {
            s += chi.value(n as i64) / n as f64;
        }
        let mut avg = Complex64::new(0.0, 0.0);
        let mut t = s;
        for j in 1..=m {
            let n = n_terms + j;
            t += chi.value(n as i64) / n as f64;
            avg += t;
        }
        avg / m as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SignSource {
    Trivial,
    Dirichlet(DirichletCharacter),
    Explicit,
}

/// A quadratic Hecke character seen through its conductor and the values
/// eta_v(uniformizer) at unramified places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticCharacterProfile {
    conductor: LevelIdeal,
    signs: BTreeMap<FinitePlace, i8>,
    archimedean_trivial: bool,
    source: SignSource,
}

impl QuadraticCharacterProfile {
    pub fn trivial() -> Self {
        QuadraticCharacterProfile {
            conductor: LevelIdeal::unit(),
            signs: BTreeMap::new(),
            archimedean_trivial: true,
            source: SignSource::Trivial,
        }
    }

    pub fn from_dirichlet(chi: DirichletCharacter) -> Result<Self> {
        if chi.order() > 2 {
            return Err(RtfError::invalid("character is not quadratic"));
        }
        if !chi.is_primitive() {
            return Err(RtfError::NonPrimitive(chi.modulus()));
        }
        if chi.is_trivial() {
            return Ok(Self::trivial());
        }
        Ok(QuadraticCharacterProfile {
            conductor: LevelIdeal::from_integer(chi.modulus())?,
            signs: BTreeMap::new(),
            archimedean_trivial: chi.is_even(),
            source: SignSource::Dirichlet(chi),
        })
    }

    pub fn explicit(conductor: LevelIdeal, signs: BTreeMap<FinitePlace, i8>) -> Result<Self> {
        for (p, &s) in &signs {
            if s != 1 && s != -1 {
                return Err(RtfError::invalid(format!("sign {s} at {p} is not +-1")));
            }
            if conductor.exponent(p) > 0 {
                return Err(RtfError::RamifiedOverlap(p.to_string()));
            }
        }
        Ok(QuadraticCharacterProfile {
            conductor,
            signs,
            archimedean_trivial: true,
            source: SignSource::Explicit,
        })
    }

    pub fn conductor(&self) -> &LevelIdeal {
        &self.conductor
    }

    pub fn archimedean_trivial(&self) -> bool {
        self.archimedean_trivial
    }

    pub fn is_trivial(&self) -> bool {
        self.source == SignSource::Trivial
    }

    pub fn dirichlet(&self) -> Option<&DirichletCharacter> {
        match &self.source {
            SignSource::Dirichlet(c) => Some(c),
            _ => None,
        }
    }

    /// eta_v(uniformizer) at an unramified place.
    pub fn sign(&self, place: &FinitePlace) -> Result<i8> {
        if self.conductor.exponent(place) > 0 {
            return Err(RtfError::RamifiedOverlap(place.to_string()));
        }
        if let Some(&s) = self.signs.get(place) {
            return Ok(s);
        }
        match &self.source {
            SignSource::Trivial => Ok(1),
            SignSource::Dirichlet(chi) => Ok(if chi.value(place.q as i64).re > 0.0 { 1 } else { -1 }),
            SignSource::Explicit => Err(RtfError::invalid(format!("no sign recorded at {place}"))),
        }
    }

    /// prod_v eta_v(uniformizer)^{ord_v n}.
    pub fn eta_tilde(&self, n: &LevelIdeal) -> Result<i8> {
        let mut s = 1i8;
        for (p, e) in n.factors() {
            if self.sign(p)? == -1 && e % 2 == 1 {
                s = -s;
            }
        }
        Ok(s)
    }

    /// Membership of n in J_{S, eta}; `s_finite` is the finite part of S.
    pub fn is_in_j(&self, n: &LevelIdeal, s_finite: &BTreeSet<FinitePlace>) -> bool {
        for (p, _) in n.factors() {
            if self.conductor.exponent(p) > 0 || s_finite.contains(p) {
                return false;
            }
            match self.sign(p) {
                Ok(-1) => {}
                _ => return false,
            }
        }
        matches!(self.eta_tilde(n), Ok(1))
    }
}
