//! Explicit constants of the relative trace formula: level constants,
//! Laurent data, the residual constants Y_j and their local building
//! blocks, and the kernels of the geometric side.

use num_complex::Complex64;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::characters::{DirichletCharacter, QuadraticCharacterProfile};
use crate::error::{Result, RtfError};
use crate::field_profile::{FieldProfile, FinitePlace, LevelIdeal};
use crate::local_factors::index_k0;
use crate::numeric::laurent::{pole_order, stencil_spread, taylor3_checked};
use crate::numeric::quadrature::QuadratureResult;
use crate::numeric::special::{digamma, gamma, gamma_r, ln_gamma, riemann_zeta, EULER_GAMMA};
use crate::numeric::sum::{pairwise_sum, stable_product};
use crate::spectral_measures::{lambda_s_pairing, PlaceTest, SpectralPlace};

pub const DEFAULT_RHO_CAP: u128 = 100_000;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sqrt_ratio(q: f64) -> f64 {
    ((q + 1.0) / (q - 1.0)).sqrt()
}

/// C(n) = prod_{S_2(n)} (1 - (q^2 - q)^{-1}) prod_{ord >= 3} (1 - q^{-2}).
pub fn c_level(n: &LevelIdeal) -> f64 {
    let factors: Vec<f64> = n
        .factors()
        .filter_map(|(p, e)| {
            let q = p.q as f64;
            match e {
                1 => None,
                2 => Some(1.0 - 1.0 / (q * q - q)),
                _ => Some(1.0 - 1.0 / (q * q)),
            }
        })
        .collect();
    stable_product(&factors)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaurentData {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
}

fn rational_character(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<Option<DirichletCharacter>> {
    if !profile.is_rational() {
        return Err(RtfError::invalid("Laurent data are implemented over Q only"));
    }
    if eta.is_trivial() {
        return Ok(None);
    }
    let chi = eta
        .dirichlet()
        .ok_or_else(|| RtfError::invalid("Laurent data need a Dirichlet character"))?;
    if !chi.is_even() {
        return Err(RtfError::invalid("eta must be trivial at the real place"));
    }
    Ok(Some(chi.clone()))
}

/// Completed L(s, eta) over Q; the completed Riemann zeta for trivial eta.
pub fn completed_l(eta: Option<&DirichletCharacter>, s: f64) -> Result<f64> {
    match eta {
        None => Ok((gamma_r(c(s))? * riemann_zeta(c(s))?).re),
        Some(chi) => Ok(chi.l_completed(c(s))?.re),
    }
}

fn laurent_stencil(eta: Option<DirichletCharacter>) -> impl Fn(f64) -> Result<f64> {
    move |t: f64| match &eta {
        None => Ok(t * completed_l(None, 1.0 + t)?),
        Some(chi) => completed_l(Some(chi), 1.0 + t),
    }
}

/// (R, C0, C1) of the completed L(s, eta) at s = 1.
pub fn laurent_at_1(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<LaurentData> {
    let chi = rational_character(eta, profile)?;
    let trivial = chi.is_none();
    let g = laurent_stencil(chi);
    if trivial {
        let [r, c0, c1] = taylor3_checked(&g, ["R", "C0", "C1"])?;
        Ok(LaurentData { r, c0, c1 })
    } else {
        let [c0, c1, _] = taylor3_checked(&g, ["C0", "C1", "C2"])?;
        Ok(LaurentData { r: 0.0, c0, c1 })
    }
}

/// Disagreement between the two stencil widths for (R, C0, C1).
pub fn laurent_spread(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<[f64; 3]> {
    let chi = rational_character(eta, profile)?;
    let trivial = chi.is_none();
    let s = stencil_spread(&laurent_stencil(chi))?;
    Ok(if trivial { s } else { [0.0, s[0], s[1]] })
}

/// C^eta(n, F) = C0 + R {(d/2)(gamma + 2 log 2 - log pi) + log(D_F N(n)^{1/2})}.
pub fn c_eta_big(n: &LevelIdeal, profile: &FieldProfile, laurent: &LaurentData) -> f64 {
    let d = profile.degree() as f64;
    let bracket = 0.5 * d * (EULER_GAMMA + 2.0 * 2f64.ln() - PI.ln())
        + (profile.discriminant() as f64).ln()
        + 0.5 * n.log_norm();
    laurent.c0 + laurent.r * bracket
}

/// A choice rho(v) in {0, ..., ord_v(n)} for every v | n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RhoAssignment {
    choice: BTreeMap<FinitePlace, u32>,
}

impl RhoAssignment {
    pub fn empty() -> Self {
        RhoAssignment { choice: BTreeMap::new() }
    }

    pub fn from_pairs<I: IntoIterator<Item = (FinitePlace, u32)>>(pairs: I) -> Self {
        RhoAssignment {
            choice: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, place: &FinitePlace) -> u32 {
        self.choice.get(place).copied().unwrap_or(0)
    }

    pub fn choices(&self) -> impl Iterator<Item = (&FinitePlace, u32)> {
        self.choice.iter().map(|(p, &k)| (p, k))
    }

    /// S_k(rho) = {v : rho(v) = k} for k >= 1.
    pub fn s_k(&self, k: u32) -> BTreeSet<FinitePlace> {
        self.choice
            .iter()
            .filter(|&(_, &j)| j == k && k >= 1)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// S(rho) with the block index k = rho(v) of each place.
    pub fn support(&self) -> Vec<(FinitePlace, u32)> {
        self.choice
            .iter()
            .filter(|&(_, &k)| k >= 1)
            .map(|(p, &k)| (p.clone(), k))
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.choice.values().all(|&k| k == 0)
    }
}

/// prod_{v | n} (ord_v(n) + 1).
pub fn rho_count(n: &LevelIdeal) -> u128 {
    n.factors().map(|(_, e)| e as u128 + 1).product()
}

pub fn enumerate_rho(n: &LevelIdeal) -> Result<Vec<RhoAssignment>> {
    enumerate_rho_capped(n, DEFAULT_RHO_CAP)
}

/// Assignments in lexicographic order of (place, choice).
pub fn enumerate_rho_capped(n: &LevelIdeal, cap: u128) -> Result<Vec<RhoAssignment>> {
    let count = rho_count(n);
    if count > cap {
        return Err(RtfError::CapExceeded { count, cap });
    }
    let places: Vec<(FinitePlace, u32)> = n.factors().map(|(p, e)| (p.clone(), e)).collect();
    let mut out = vec![RhoAssignment::empty()];
    for (p, e) in places {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for rho in &out {
            for k in 0..=e {
                let mut r = rho.clone();
                r.choice.insert(p.clone(), k);
                next.push(r);
            }
        }
        out = next;
    }
    Ok(out)
}

fn eta_signs(rho: &RhoAssignment, eta: &QuadraticCharacterProfile) -> Result<Vec<(f64, u32, f64)>> {
    rho.support()
        .into_iter()
        .map(|(p, k)| Ok((p.q as f64, k, eta.sign(&p)? as f64)))
        .collect()
}

/// f_{eta,rho}^{(0)}(e).
pub fn f_flat_section_at_e(rho: &RhoAssignment, eta: &QuadraticCharacterProfile) -> Result<f64> {
    let factors: Vec<f64> = eta_signs(rho, eta)?
        .into_iter()
        .map(|(q, k, e)| {
            if k == 1 {
                e * q.sqrt()
            } else {
                (1.0 - 1.0 / q) * e.powi(k as i32) * sqrt_ratio(q) * q.powf(k as f64 / 2.0)
            }
        })
        .collect();
    Ok(stable_product(&factors))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YBuildingBlock {
    pub q: u64,
    pub k: u32,
    pub sign: i8,
}

impl YBuildingBlock {
    pub fn new(q: u64, k: u32, sign: i8) -> Result<Self> {
        if k == 0 {
            return Err(RtfError::invalid("building blocks need k >= 1"));
        }
        if sign != 1 && sign != -1 {
            return Err(RtfError::invalid(format!("sign {sign} is not +-1")));
        }
        if q < 2 {
            return Err(RtfError::invalid(format!("q = {q}")));
        }
        Ok(YBuildingBlock { q, k, sign })
    }

    /// C_v = 1 for k = 1, ((q + 1)/(q - 1))^{1/2} for k >= 2.
    pub fn c_v(&self) -> f64 {
        if self.k == 1 {
            1.0
        } else {
            sqrt_ratio(self.q as f64)
        }
    }

    /// Y_v^eta(nu) = C_v {q + 1 + eta (q^{(1+nu)/2} + q^{(1-nu)/2})} q^{k nu/2}/(q - q^nu).
    pub fn y(&self, nu: Complex64) -> Result<Complex64> {
        let q = self.q as f64;
        let lq = q.ln();
        let pw = |z: Complex64| (z * lq).exp();
        let denom = q - pw(nu);
        if denom.norm() < 1e-14 * q {
            return Err(RtfError::Pole {
                what: "Y_v",
                at: format!("nu = {nu}"),
            });
        }
        let e = self.sign as f64;
        let brace = q + 1.0 + e * (pw((1.0 + nu) / 2.0) + pw((1.0 - nu) / 2.0));
        Ok(self.c_v() * brace * pw(self.k as f64 * nu / 2.0) / denom)
    }

    pub fn y_real(&self, nu: f64) -> Result<f64> {
        Ok(self.y(c(nu))?.re)
    }

    pub fn y_at_minus_one(&self) -> f64 {
        let q = self.q as f64;
        let e = self.sign as f64;
        self.c_v() * (1.0 + e) * (q + 1.0) * q.powf(-(self.k as f64) / 2.0) / (q - 1.0 / q)
    }

    /// (Y_v^eta)'(-1).
    pub fn y_prime(&self) -> f64 {
        let q = self.q as f64;
        let k = self.k as f64;
        let e = self.sign as f64;
        let lqk = k * q.ln();
        let num = -e * q * (q - 1.0).powi(2) + k * (1.0 + e) * q * (q * q - 1.0) + 2.0 * (1.0 + e) * q;
        let den = 2.0 * k * (q * q - 1.0) * (q - 1.0);
        self.c_v() * lqk * q.powf(-k / 2.0) * num / den
    }

    /// (Y_v^eta)''(-1).
    pub fn y_second(&self) -> f64 {
        let q = self.q as f64;
        let k = self.k as f64;
        let e = self.sign as f64;
        let l2 = (k * q.ln()).powi(2) * q.powf(-k / 2.0);
        let qq = q - 1.0 / q;
        let t1 = e * ((1.0 + q) * qq + (1.0 - q) * (k * qq + 2.0 / q)) / (4.0 * k * k * qq * qq);
        let t2 = e * (k * (q.powi(3) - q) + 2.0 * q) / (4.0 * k * k * (1.0 + q) * (1.0 - q * q));
        let s = q * q - 1.0;
        let t3 = (1.0 + e) * q / (k * k * s.powi(3) * (q - 1.0))
            * ((k * k / 4.0 * s + 1.0) * s * s + (k * s + 2.0) * s);
        self.c_v() * l2 * (t1 + t2 + t3)
    }
}

fn y_blocks(rho: &RhoAssignment, eta: &QuadraticCharacterProfile) -> Result<Vec<YBuildingBlock>> {
    rho.support()
        .into_iter()
        .map(|(p, k)| YBuildingBlock::new(p.q, k, eta.sign(&p)?))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PCoefficients {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Taylor coefficients at a point of prod_i g_i, from values, first and
/// second derivatives of the factors.
fn product_rule(vals: &[f64], d1: &[f64], d2: &[f64]) -> [f64; 3] {
    let n = vals.len();
    let without = |skip: &[usize]| -> f64 {
        let f: Vec<f64> = (0..n).filter(|i| !skip.contains(i)).map(|i| vals[i]).collect();
        stable_product(&f)
    };
    let p0 = without(&[]);
    let mut t1 = Vec::with_capacity(n);
    let mut t2 = Vec::with_capacity(n * n);
    for w in 0..n {
        t1.push(without(&[w]) * d1[w]);
        for x in 0..n {
            if x != w {
                t2.push(without(&[w, x]) * d1[w] * d1[x]);
            }
        }
        t2.push(without(&[w]) * d2[w]);
    }
    [p0, pairwise_sum(&t1), 0.5 * pairwise_sum(&t2)]
}

/// Over Q the different is trivial, so eta~(D_{F/Q}) = 1.
fn eta_tilde_different(profile: &FieldProfile) -> Result<f64> {
    if profile.is_rational() {
        Ok(1.0)
    } else {
        Err(RtfError::invalid("eta~ of the different is only known over Q"))
    }
}

/// (p0, p1, p2): Taylor coefficients at nu = -1 of eta~(D) prod_{S(rho)} Y_v^eta(nu).
pub fn p_coeffs(rho: &RhoAssignment, eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<PCoefficients> {
    let sgn = eta_tilde_different(profile)?;
    let blocks = y_blocks(rho, eta)?;
    let vals: Vec<f64> = blocks.iter().map(|b| b.y_at_minus_one()).collect();
    let d1: Vec<f64> = blocks.iter().map(|b| b.y_prime()).collect();
    let d2: Vec<f64> = blocks.iter().map(|b| b.y_second()).collect();
    let [p0, p1, p2] = product_rule(&vals, &d1, &d2);
    Ok(PCoefficients {
        p0: sgn * p0,
        p1: sgn * p1,
        p2: sgn * p2,
    })
}

/// The separately displayed product for p0, built on (1 - eta_v) and
/// (eta_v - 1)(eta_v q - 1).
pub fn p0_explicit(rho: &RhoAssignment, eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<f64> {
    let sgn = eta_tilde_different(profile)?;
    let factors: Vec<f64> = eta_signs(rho, eta)?
        .into_iter()
        .map(|(q, k, e)| {
            if k == 1 {
                (1.0 - e) * q / (q - 1.0) / q.sqrt()
            } else {
                (e - 1.0) * (e * q - 1.0) / (q - 1.0 / q) * sqrt_ratio(q) * q.powf(-(k as f64) / 2.0)
            }
        })
        .collect();
    Ok(sgn * stable_product(&factors))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DCoefficients {
    pub d_minus2: f64,
    pub d_minus1: f64,
    pub d0: f64,
    pub pole_order: u32,
}

impl DCoefficients {
    pub fn reconstruct(&self, nu: f64) -> f64 {
        let t = nu + 1.0;
        self.d_minus2 / (t * t) + self.d_minus1 / t + self.d0
    }
}

/// D_F^{nu/2} L((1+nu)/2, eta) L((1-nu)/2, eta)/zeta_F(1-nu), completed, over Q.
pub fn d_function(eta: &QuadraticCharacterProfile, profile: &FieldProfile, nu: f64) -> Result<f64> {
    let chi = rational_character(eta, profile)?;
    let l = |s: f64| completed_l(chi.as_ref(), s);
    Ok(l((1.0 + nu) / 2.0)? * l((1.0 - nu) / 2.0)? / completed_l(None, 1.0 - nu)?)
}

fn d_stencil<'a>(eta: &'a QuadraticCharacterProfile, profile: &'a FieldProfile) -> impl Fn(f64) -> Result<f64> + 'a {
    move |t: f64| Ok(t * t * d_function(eta, profile, -1.0 + t)?)
}

pub fn d_coeffs(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<DCoefficients> {
    let [d_minus2, d_minus1, d0] = taylor3_checked(&d_stencil(eta, profile), ["D_-2", "D_-1", "D_0"])?;
    let order = pole_order(&|t: f64| d_function(eta, profile, -1.0 + t), 1e-2)?;
    Ok(DCoefficients {
        d_minus2,
        d_minus1,
        d0,
        pole_order: order,
    })
}

pub fn d_spread(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<[f64; 3]> {
    stencil_spread(&d_stencil(eta, profile))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBlock {
    pub q: u64,
    pub k: u32,
}

impl BBlock {
    /// B_v(z).
    pub fn b(&self, z: f64) -> f64 {
        let q = self.q as f64;
        let pw = |x: f64| q.powf(x);
        if self.k == 1 {
            (pw(z) - 1.0) / q.sqrt() / (1.0 - 1.0 / q)
        } else {
            let k = self.k as f64;
            (pw(k * z) - pw((k - 1.0) * z - 1.0) - pw((k - 1.0) * z) + pw((k - 2.0) * z - 1.0))
                * sqrt_ratio(q)
                * pw(-k / 2.0)
                / (1.0 - 1.0 / (q * q))
        }
    }

    pub fn b_prime(&self) -> f64 {
        let q = self.q as f64;
        if self.k == 1 {
            q.ln() / q.sqrt() / (1.0 - 1.0 / q)
        } else {
            q.ln() * sqrt_ratio(q) * q.powf(-(self.k as f64) / 2.0) / (1.0 + 1.0 / q)
        }
    }

    pub fn b_second(&self) -> f64 {
        let q = self.q as f64;
        if self.k == 1 {
            q.ln().powi(2) / q.sqrt() / (1.0 - 1.0 / q)
        } else {
            let k = self.k as f64;
            (k * q.ln()).powi(2) * (2.0 * k - 1.0 - (2.0 * k - 3.0) / q) / (k * k) * sqrt_ratio(q) * q.powf(-k / 2.0)
                / (1.0 - 1.0 / (q * q))
        }
    }
}

/// B_{1,rho}^eta(1/2, 1).
pub fn b_half_one(rho: &RhoAssignment, eta: &QuadraticCharacterProfile) -> Result<f64> {
    let factors: Vec<f64> = eta_signs(rho, eta)?
        .into_iter()
        .map(|(q, k, e)| {
            if k == 1 {
                (e - 1.0) / q.sqrt() / (1.0 - 1.0 / q)
            } else {
                e.powi(k as i32) * (e - 1.0) * (e - 1.0 / q) / (1.0 - 1.0 / (q * q))
                    * sqrt_ratio(q)
                    * q.powf(-(k as f64) / 2.0)
            }
        })
        .collect();
    Ok(stable_product(&factors))
}

/// B_rho(z) = D_F^{-z} prod_{S(rho)} B_v(z).
pub fn b_rho(rho: &RhoAssignment, profile: &FieldProfile, z: f64) -> f64 {
    let mut f: Vec<f64> = rho
        .support()
        .into_iter()
        .map(|(p, k)| BBlock { q: p.q, k }.b(z))
        .collect();
    f.push((profile.discriminant() as f64).powf(-z));
    stable_product(&f)
}

/// [B_rho(0), B_rho'(0), B_rho''(0)].
pub fn b_rho_derivatives(rho: &RhoAssignment, profile: &FieldProfile) -> [f64; 3] {
    let blocks: Vec<BBlock> = rho.support().into_iter().map(|(p, k)| BBlock { q: p.q, k }).collect();
    let vals: Vec<f64> = blocks.iter().map(|b| b.b(0.0)).collect();
    let d1: Vec<f64> = blocks.iter().map(|b| b.b_prime()).collect();
    let d2: Vec<f64> = blocks.iter().map(|b| b.b_second()).collect();
    let [p0, p1, p2] = product_rule(&vals, &d1, &d2);
    let l = -(profile.discriminant() as f64).ln();
    [p0, l * p0 + p1, l * l * p0 + 2.0 * l * p1 + 2.0 * p2]
}

/// epsilon(-z, eta) over Q: (tau(eta)/sqrt m) m^{1/2 + z}; 1 for trivial eta.
pub fn epsilon_factor(eta: &QuadraticCharacterProfile, profile: &FieldProfile, z: f64) -> Result<f64> {
    match rational_character(eta, profile)? {
        None => Ok(1.0),
        Some(chi) => {
            let m = chi.modulus() as f64;
            Ok((chi.gauss_sum()? / m.sqrt()).re * m.powf(0.5 + z))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BSpecializations {
    pub b_half_one: f64,
    pub b_tilde: f64,
    pub b_tilde_prime: f64,
    pub b_tilde_second: f64,
}

/// B(1/2, 1) and B~(0) for eta; B~'(0), B~''(0) of the trivial-twist B~.
pub fn b_specializations(
    rho: &RhoAssignment,
    eta: &QuadraticCharacterProfile,
    profile: &FieldProfile,
) -> Result<BSpecializations> {
    let bh = b_half_one(rho, eta)?;
    let [_, d1, d2] = b_rho_derivatives(rho, profile);
    // epsilon(-z, 1) = 1 over Q, so B~^1 = B_rho
    if !profile.is_rational() {
        return Err(RtfError::invalid("epsilon factors are implemented over Q only"));
    }
    Ok(BSpecializations {
        b_half_one: bh,
        b_tilde: epsilon_factor(eta, profile, 0.0)? * bh,
        b_tilde_prime: d1,
        b_tilde_second: d2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YValues {
    #[serde(rename = "2")]
    pub y2: f64,
    #[serde(rename = "1")]
    pub y1: f64,
    #[serde(rename = "0")]
    pub y0: f64,
    #[serde(rename = "-1")]
    pub y_minus1: f64,
}

impl YValues {
    pub fn get(&self, j: i32) -> Result<f64> {
        match j {
            2 => Ok(self.y2),
            1 => Ok(self.y1),
            0 => Ok(self.y0),
            -1 => Ok(self.y_minus1),
            _ => Err(RtfError::invalid(format!("Y_j needs j in {{2, 1, 0, -1}}, got {j}"))),
        }
    }
}

/// Inputs shared by every rho in the Y_j sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YContext {
    pub zeta: LaurentData,
    pub eta: LaurentData,
    pub d: DCoefficients,
    pub gauss: f64,
    pub zeta_two: f64,
}

impl YContext {
    pub fn new(eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<Self> {
        let trivial = QuadraticCharacterProfile::trivial();
        let gauss = match rational_character(eta, profile)? {
            None => 1.0,
            Some(chi) => {
                let g = chi.adelic_gauss_sum()?;
                if g.im.abs() > 1e-12 * g.norm() {
                    return Err(RtfError::invalid("adelic Gauss sum of eta is not real"));
                }
                g.re
            }
        };
        Ok(YContext {
            zeta: laurent_at_1(&trivial, profile)?,
            eta: laurent_at_1(eta, profile)?,
            d: d_coeffs(eta, profile)?,
            gauss,
            zeta_two: completed_l(None, 2.0)?,
        })
    }
}

pub fn y_values(n: &LevelIdeal, eta: &QuadraticCharacterProfile, profile: &FieldProfile) -> Result<YValues> {
    let ctx = YContext::new(eta, profile)?;
    y_values_with(n, eta, profile, &ctx, DEFAULT_RHO_CAP)
}

pub fn y_j(n: &LevelIdeal, eta: &QuadraticCharacterProfile, profile: &FieldProfile, j: i32) -> Result<f64> {
    y_values(n, eta, profile)?.get(j)
}

pub fn y_values_with(
    n: &LevelIdeal,
    eta: &QuadraticCharacterProfile,
    profile: &FieldProfile,
    ctx: &YContext,
    cap: u128,
) -> Result<YValues> {
    let trivial = QuadraticCharacterProfile::trivial();
    let delta_eta = if eta.is_trivial() { 1.0 } else { 0.0 };
    let dm = (profile.discriminant() as f64).powf(-0.5);
    let d = ctx.d;
    let (r, c1_zeta, c0_eta) = (ctx.zeta.r, ctx.zeta.c1, ctx.eta.c0);
    let rhos = enumerate_rho_capped(n, cap)?;
    let mut t2 = Vec::with_capacity(rhos.len());
    let mut t1 = Vec::with_capacity(rhos.len());
    let mut t0 = Vec::with_capacity(rhos.len());
    let mut tm1 = Vec::with_capacity(rhos.len());
    for rho in &rhos {
        let empty = if rho.is_trivial() { 1.0 } else { 0.0 };
        let w_eta = dm * (f_flat_section_at_e(rho, eta)? + empty);
        let p = p_coeffs(rho, eta, profile)?;
        t2.push(w_eta * 0.5 * p.p0 * d.d_minus2);
        t1.push(w_eta * (d.d_minus1 * p.p0 + d.d_minus2 * p.p1));
        t0.push(w_eta * (d.d_minus2 * p.p2 + d.d_minus1 * p.p1 + d.d0 * p.p0));

        let w_one = f_flat_section_at_e(rho, &trivial)? + empty;
        let b1 = b_specializations(rho, &trivial, profile)?;
        let be = b_specializations(rho, eta, profile)?;
        let a = -0.5 * delta_eta * b1.b_tilde_second * r * r - 2.0 * delta_eta * b1.b_tilde * r * c1_zeta
            + be.b_tilde * c0_eta * c0_eta;
        tm1.push(ctx.gauss * dm / ctx.zeta_two * w_one * a);
    }
    Ok(YValues {
        y2: pairwise_sum(&t2),
        y1: pairwise_sum(&t1),
        y0: pairwise_sum(&t0),
        y_minus1: pairwise_sum(&tm1),
    })
}

/// A place of S with the sign of eta there (ignored at real places).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SPlace {
    pub q: Option<u64>,
    pub sign: i8,
}

impl SPlace {
    pub fn archimedean() -> Self {
        SPlace { q: None, sign: 1 }
    }

    pub fn finite(q: u64, sign: i8) -> Self {
        SPlace { q: Some(q), sign }
    }

    pub fn spectral(&self) -> SpectralPlace {
        match self.q {
            None => SpectralPlace::Archimedean,
            Some(q) => SpectralPlace::Finite { q },
        }
    }
}

fn check_s(places: &[SPlace], s: &[Complex64]) -> Result<()> {
    if places.len() != s.len() {
        return Err(RtfError::invalid(format!(
            "{} places but {} values of s",
            places.len(),
            s.len()
        )));
    }
    Ok(())
}

/// -(1/8) Gamma((s+1)/4)^2/Gamma((s+3)/4)^2.
pub fn upsilon_archimedean(s: Complex64) -> Result<Complex64> {
    let (a, b) = ((s + 1.0) / 4.0, (s + 3.0) / 4.0);
    gamma(a)?;
    gamma(b)?;
    Ok(-0.125 * (2.0 * (ln_gamma(a) - ln_gamma(b))).exp())
}

/// (1 - q^{(s+1)/2})^{-1} (1 - eta q^{-(s+1)/2})^{-1}.
pub fn upsilon_finite(s: Complex64, q: u64, sign: i8) -> Result<Complex64> {
    let x = ((s + 1.0) / 2.0 * (q as f64).ln()).exp();
    let a = 1.0 - x;
    let b = 1.0 - sign as f64 / x;
    if a.norm() < 1e-14 || b.norm() < 1e-14 {
        return Err(RtfError::Pole {
            what: "Upsilon",
            at: format!("s = {s}, q = {q}"),
        });
    }
    Ok((a * b).inv())
}

pub fn upsilon(places: &[SPlace], s: &[Complex64]) -> Result<Complex64> {
    check_s(places, s)?;
    let mut acc = c(1.0);
    for (p, &sv) in places.iter().zip(s) {
        acc *= match p.q {
            None => upsilon_archimedean(sv)?,
            Some(q) => upsilon_finite(sv, q, p.sign)?,
        };
    }
    Ok(acc)
}

/// The constant term kernel C_{S,a}^eta(s) of the geometric side.
pub fn geometric_c_term(
    places: &[SPlace],
    s: &[Complex64],
    a: &LevelIdeal,
    laurent: &LaurentData,
    profile: &FieldProfile,
) -> Result<Complex64> {
    check_s(places, s)?;
    if laurent.r == 0.0 {
        return Ok(c(laurent.c0));
    }
    let d = profile.degree() as f64;
    let mut bracket = c((profile.discriminant() as f64).ln() + a.log_norm()
        + 0.5 * d * (EULER_GAMMA + 2.0 * 2f64.ln() - PI.ln()));
    for (p, &sv) in places.iter().zip(s) {
        match p.q {
            None => {
                bracket += 0.5 * (digamma((sv + 1.0) / 4.0)? + digamma((sv + 3.0) / 4.0)?);
            }
            Some(q) => {
                let lq = (q as f64).ln();
                let den = 1.0 - ((sv + 1.0) / 2.0 * lq).exp();
                if den.norm() < 1e-14 {
                    return Err(RtfError::Pole {
                        what: "geometric C term",
                        at: format!("s = {sv}, q = {q}"),
                    });
                }
                bracket += lq / den;
            }
        }
    }
    Ok(laurent.c0 + laurent.r * bracket)
}

/// (C_{S,o}(s) + C_{S,n}(s))/2, the combination carried by J_u + J_ubar.
pub fn geometric_c_combined(
    places: &[SPlace],
    s: &[Complex64],
    n: &LevelIdeal,
    laurent: &LaurentData,
    profile: &FieldProfile,
) -> Result<Complex64> {
    let o = geometric_c_term(places, s, &LevelIdeal::unit(), laurent, profile)?;
    let m = geometric_c_term(places, s, n, laurent, profile)?;
    Ok(0.5 * (o + m))
}

/// A_{chi,rho}(nu) over Q with finite local Euler factors at S(rho).
pub fn a_factor_unramified(chi: &DirichletCharacter, rho: &RhoAssignment, nu: Complex64) -> Result<Complex64> {
    let m = chi.modulus();
    let f = chi.conductor() as f64;
    let mut acc = (-nu * f.ln()).exp();
    for (p, k) in rho.support() {
        if m.is_multiple_of(p.q) {
            return Err(RtfError::RamifiedOverlap(p.to_string()));
        }
        let lq = (p.q as f64).ln();
        let chi2 = chi.value(p.q as i64).powi(2);
        let num = 1.0 - chi2.conj() * (-(1.0 - nu) * lq).exp();
        let den = 1.0 - chi2 * (-(1.0 + nu) * lq).exp();
        if den.norm() < 1e-14 {
            return Err(RtfError::Pole {
                what: "A factor",
                at: format!("nu = {nu}, q = {}", p.q),
            });
        }
        acc *= (-(k as f64) * nu * lq).exp() * num / den;
    }
    Ok(acc)
}

/// C(n, S) = (-1)^{#S} D_F^{-1/2} [K_fin : K_0(n)]^{-1}.
pub fn c_n_s(n: &LevelIdeal, s_finite: &BTreeSet<FinitePlace>, profile: &FieldProfile) -> Result<f64> {
    if let Some(p) = s_finite.iter().find(|p| n.exponent(p) > 0) {
        return Err(RtfError::RamifiedOverlap(p.to_string()));
    }
    let size = profile.degree() as usize + s_finite.len();
    let sign = if size.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * (profile.discriminant() as f64).powf(-0.5) / index_k0(n))
}

/// C(n) <lambda_S^eta, f>.
pub fn level_weighted_rhs(
    n: &LevelIdeal,
    tests: &[PlaceTest<'_>],
    l1_eta: f64,
    profile: &FieldProfile,
    tol: f64,
) -> Result<QuadratureResult> {
    let pairing = lambda_s_pairing(tests, l1_eta, profile.discriminant() as f64, tol)?;
    let cn = c_level(n);
    Ok(QuadratureResult {
        value: cn * pairing.value,
        error_estimate: cn * pairing.error_estimate,
        subdivisions: pairing.subdivisions,
    })
}

/// Inclusion-exclusion over primes with exponent >= 2, in the closed form
/// 1 + sum_j (-1)^j sum prod_{S_2} (1 - 1/q)^{-1} / prod N(p)^2.
pub fn inclusion_exclusion_closed(n: &LevelIdeal) -> f64 {
    let high: Vec<(f64, u32)> = n.factors().filter(|&(_, e)| e >= 2).map(|(p, e)| (p.q as f64, e)).collect();
    let mut terms = Vec::new();
    for mask in 0u32..(1 << high.len()) {
        let mut t = 1.0;
        for (i, &(q, e)) in high.iter().enumerate() {
            if mask & (1 << i) != 0 {
                t *= -1.0 / (q * q);
                if e == 2 {
                    t /= 1.0 - 1.0 / q;
                }
            }
        }
        terms.push(t);
    }
    pairwise_sum(&terms)
}

/// The same sum from index ratios [K:K_0(n p^{-2})]/[K:K_0(n)] and the
/// weight (q+1)/(q-1) at places where p^2 exhausts n.
pub fn inclusion_exclusion_indices(n: &LevelIdeal) -> Result<f64> {
    let high: Vec<(FinitePlace, u32)> = n.factors().filter(|&(_, e)| e >= 2).map(|(p, e)| (p.clone(), e)).collect();
    let base = index_k0(n);
    let mut terms = Vec::new();
    for mask in 0u32..(1 << high.len()) {
        let mut divisor = LevelIdeal::unit();
        let mut weight = 1.0;
        let mut sign = 1.0;
        for (i, (p, e)) in high.iter().enumerate() {
            if mask & (1 << i) != 0 {
                divisor = divisor.mul(&LevelIdeal::prime_power(p, 2));
                sign = -sign;
                if *e == 2 {
                    let q = p.q as f64;
                    weight *= (q + 1.0) / (q - 1.0);
                }
            }
        }
        let m = n.quotient(&divisor)?;
        terms.push(sign * index_k0(&m) / base * weight);
    }
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::quadratic_character;
    use crate::numeric::laurent::taylor3;
    use approx::assert_relative_eq;

    fn p(n: u64) -> FinitePlace {
        FinitePlace::rational(n).unwrap()
    }

    fn ideal(n: u64) -> LevelIdeal {
        LevelIdeal::from_integer(n).unwrap()
    }

    fn chi5() -> QuadraticCharacterProfile {
        QuadraticCharacterProfile::from_dirichlet(quadratic_character(5).unwrap()).unwrap()
    }

    #[test]
    fn level_constant_examples() {
        assert_eq!(c_level(&ideal(30)), 1.0);
        assert_relative_eq!(c_level(&ideal(4)), 0.5, max_relative = 1e-15);
        assert_relative_eq!(c_level(&ideal(8)), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn inclusion_exclusion_telescopes() {
        for n in [1u64, 4, 8, 12, 16, 36, 72, 200, 2 * 2 * 9 * 125, 16 * 81 * 625, 16 * 3 * 49, 7 * 11 * 13] {
            let n = ideal(n);
            assert!((inclusion_exclusion_closed(&n) - c_level(&n)).abs() < 1e-12);
            assert!((inclusion_exclusion_indices(&n).unwrap() - c_level(&n)).abs() < 1e-12);
        }
    }

    #[test]
    fn laurent_of_zeta() {
        let prof = FieldProfile::rational();
        let l = laurent_at_1(&QuadraticCharacterProfile::trivial(), &prof).unwrap();
        assert!((l.r - 1.0).abs() < 1e-7);
        // constant term of the completed zeta: (gamma - log 4 pi)/2
        assert!((l.c0 - 0.5 * (EULER_GAMMA - (4.0 * PI).ln())).abs() < 1e-7);
        let spread = laurent_spread(&QuadraticCharacterProfile::trivial(), &prof).unwrap();
        assert!(spread.iter().all(|&s| s < 1e-8), "{spread:?}");
    }

    #[test]
    fn laurent_of_quadratic_character() {
        use crate::characters::l_one_completed;
        let prof = FieldProfile::rational();
        let l = laurent_at_1(&chi5(), &prof).unwrap();
        assert_eq!(l.r, 0.0);
        let direct = l_one_completed(&quadratic_character(5).unwrap()).unwrap().re;
        assert!((l.c0 - direct).abs() < 1e-9);
        let closed = 2.0 / 5f64.sqrt() * ((1.0 + 5f64.sqrt()) / 2.0).ln() * 5f64.sqrt();
        assert!((l.c0 - closed).abs() < 1e-9);
        let odd = QuadraticCharacterProfile::from_dirichlet(quadratic_character_odd()).unwrap();
        assert!(laurent_at_1(&odd, &prof).is_err());
    }

    fn quadratic_character_odd() -> DirichletCharacter {
        // mod 3
        DirichletCharacter::new(3, vec![1]).unwrap()
    }

    #[test]
    fn c_eta_big_examples() {
        let prof = FieldProfile::rational();
        let z = laurent_at_1(&QuadraticCharacterProfile::trivial(), &prof).unwrap();
        let at1 = c_eta_big(&LevelIdeal::unit(), &prof, &z);
        assert_relative_eq!(at1, z.c0 + z.r * 0.5 * (EULER_GAMMA + 2.0 * 2f64.ln() - PI.ln()), max_relative = 1e-14);
        assert!((at1 - (EULER_GAMMA - PI.ln())).abs() < 1e-7);
        let n = ideal(49);
        assert!((c_eta_big(&n, &prof, &z) - at1 - 0.5 * z.r * 49f64.ln()).abs() < 1e-12);
        let e = laurent_at_1(&chi5(), &prof).unwrap();
        assert_eq!(c_eta_big(&n, &prof, &e), e.c0);
    }

    #[test]
    fn rho_enumeration() {
        assert_eq!(enumerate_rho(&LevelIdeal::unit()).unwrap(), vec![RhoAssignment::empty()]);
        assert_eq!(enumerate_rho(&ideal(4)).unwrap().len(), 3);
        assert_eq!(enumerate_rho(&ideal(3 * 4)).unwrap().len(), 6);
        let big = ideal(2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29 * 31 * 37 * 41);
        assert!(matches!(enumerate_rho_capped(&big, 1000), Err(RtfError::CapExceeded { count: 8192, cap: 1000 })));
        let all = enumerate_rho(&ideal(8 * 9)).unwrap();
        let uniq: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(uniq.len(), 12);
    }

    #[test]
    fn flat_section_examples() {
        let triv = QuadraticCharacterProfile::trivial();
        assert_eq!(f_flat_section_at_e(&RhoAssignment::empty(), &triv).unwrap(), 1.0);
        let r = RhoAssignment::from_pairs([(p(2), 1)]);
        assert_relative_eq!(f_flat_section_at_e(&r, &chi5()).unwrap(), -2f64.sqrt(), max_relative = 1e-15);
        let r = RhoAssignment::from_pairs([(p(3), 2)]);
        assert_relative_eq!(f_flat_section_at_e(&r, &triv).unwrap(), 2.0 * 2f64.sqrt(), max_relative = 1e-14);
    }

    fn fd1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn fd2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
    }

    #[test]
    fn y_block_derivatives() {
        for q in [2u64, 3, 5, 7] {
            for k in 1..=5 {
                for sign in [1i8, -1] {
                    let b = YBuildingBlock::new(q, k, sign).unwrap();
                    let f = |nu: f64| b.y_real(nu).unwrap();
                    assert_relative_eq!(b.y_at_minus_one(), f(-1.0), max_relative = 1e-13, epsilon = 1e-15);
                    let d1 = fd1(&f, -1.0, 1e-4);
                    assert!(((b.y_prime() - d1) / b.y_prime()).abs() < 1e-6, "q={q} k={k} sign={sign}");
                    let d2 = fd2(&f, -1.0, 1e-4);
                    assert!(((b.y_second() - d2) / b.y_second()).abs() < 1e-5, "q={q} k={k} sign={sign}: {} vs {d2}", b.y_second());
                }
            }
        }
        let b = YBuildingBlock::new(3, 1, -1).unwrap();
        assert_eq!(b.y_at_minus_one(), 0.0);
        assert!(b.y(c(1.0)).is_err());
    }

    #[test]
    fn b_block_derivatives() {
        for q in [2u64, 3, 5, 7] {
            for k in 1..=5 {
                let b = BBlock { q, k };
                let f = |z: f64| b.b(z);
                assert!(f(0.0).abs() < 1e-15);
                assert!(((b.b_prime() - fd1(&f, 0.0, 1e-4)) / b.b_prime()).abs() < 1e-6);
                assert!(((b.b_second() - fd2(&f, 0.0, 1e-4)) / b.b_second()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn p_coefficients_match_numerical_taylor() {
        let prof = FieldProfile::rational();
        let triv = QuadraticCharacterProfile::trivial();
        assert_eq!(
            p_coeffs(&RhoAssignment::empty(), &triv, &prof).unwrap(),
            PCoefficients { p0: 1.0, p1: 0.0, p2: 0.0 }
        );
        for eta in [triv.clone(), chi5()] {
            for n in [4u64, 12, 2 * 9 * 7, 8 * 3 * 11, 16 * 27] {
                for rho in enumerate_rho(&ideal(n)).unwrap() {
                    let blocks = y_blocks(&rho, &eta).unwrap();
                    let g = |t: f64| -> Result<f64> {
                        let mut acc = 1.0;
                        for b in &blocks {
                            acc *= b.y_real(-1.0 + t)?;
                        }
                        Ok(acc)
                    };
                    let num = taylor3(&g, 1e-2).unwrap();
                    let pc = p_coeffs(&rho, &eta, &prof).unwrap();
                    for (a, b) in [pc.p0, pc.p1, pc.p2].iter().zip(num) {
                        assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-3), "{rho:?}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn explicit_p0_is_the_sign_flipped_product() {
        let prof = FieldProfile::rational();
        let eta = chi5();
        // chi_5 is +1 at 11 and -1 at 2, 3, 7
        let flip = QuadraticCharacterProfile::explicit(
            ideal(5),
            [(p(2), 1), (p(3), 1), (p(7), 1), (p(11), -1)].into_iter().collect(),
        )
        .unwrap();
        for rho in enumerate_rho(&ideal(8 * 9 * 7 * 121)).unwrap() {
            let a = p0_explicit(&rho, &eta, &prof).unwrap();
            let b = p_coeffs(&rho, &flip, &prof).unwrap().p0;
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn d_coefficients() {
        let prof = FieldProfile::rational();
        let triv = QuadraticCharacterProfile::trivial();
        let d = d_coeffs(&triv, &prof).unwrap();
        assert_eq!(d.pole_order, 2);
        assert!((d.d_minus2 - 24.0 / PI).abs() < 1e-7);
        let nu = -1.0 + 0.01;
        let direct = d_function(&triv, &prof, nu).unwrap();
        assert!(((d.reconstruct(nu) - direct) / direct).abs() < 1e-4);
        let e = d_coeffs(&chi5(), &prof).unwrap();
        assert_eq!(e.pole_order, 0);
        assert!(e.d_minus2.abs() < 1e-7 && e.d_minus1.abs() < 1e-7 && e.d0.is_finite());
        let l = laurent_at_1(&chi5(), &prof).unwrap();
        assert!((e.d0 - l.c0 * l.c0 / (PI / 6.0)).abs() < 1e-7);
    }

    #[test]
    fn b_specialization_examples() {
        let prof = FieldProfile::rational();
        let triv = QuadraticCharacterProfile::trivial();
        let e = b_specializations(&RhoAssignment::empty(), &triv, &prof).unwrap();
        assert_eq!((e.b_half_one, e.b_tilde), (1.0, 1.0));
        let eta = chi5();
        let r = RhoAssignment::from_pairs([(p(11), 1)]);
        assert_eq!(b_half_one(&r, &eta).unwrap(), 0.0);
        for n in [4u64, 18, 8 * 27] {
            for rho in enumerate_rho(&ideal(n)).unwrap() {
                let [b0, d1, d2] = b_rho_derivatives(&rho, &prof);
                assert!((b0 - b_half_one(&rho, &triv).unwrap()).abs() < 1e-15);
                let t = taylor3(&|z: f64| Ok(b_rho(&rho, &prof, z)), 5e-3).unwrap();
                assert!((t[1] - d1).abs() <= 1e-8 * d1.abs().max(1.0), "{rho:?}");
                assert!((2.0 * t[2] - d2).abs() <= 1e-8 * d2.abs().max(1.0), "{rho:?}");
            }
        }
        assert_relative_eq!(epsilon_factor(&eta, &prof, 0.0).unwrap(), 5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn y_values_at_unit_level() {
        let prof = FieldProfile::rational();
        let triv = QuadraticCharacterProfile::trivial();
        let ctx = YContext::new(&triv, &prof).unwrap();
        let y = y_values_with(&LevelIdeal::unit(), &triv, &prof, &ctx, DEFAULT_RHO_CAP).unwrap();
        assert_relative_eq!(y.y2, ctx.d.d_minus2, max_relative = 1e-14);
        assert!(y.get(3).is_err());
        for n in [4u64, 9, 12, 49 * 8] {
            let y = y_values_with(&ideal(n), &triv, &prof, &ctx, DEFAULT_RHO_CAP).unwrap();
            assert!([y.y2, y.y1, y.y0, y.y_minus1].iter().all(|v| v.is_finite()));
        }
        let eta = chi5();
        let ctx = YContext::new(&eta, &prof).unwrap();
        let y = y_values_with(&ideal(4 * 9), &eta, &prof, &ctx, DEFAULT_RHO_CAP).unwrap();
        assert!(y.y_minus1.is_finite());
        assert!(y_values_with(&ideal(5), &eta, &prof, &ctx, DEFAULT_RHO_CAP).is_err());
    }

    #[test]
    fn y_values_stay_polylogarithmic() {
        let prof = FieldProfile::rational();
        let triv = QuadraticCharacterProfile::trivial();
        let ctx = YContext::new(&triv, &prof).unwrap();
        let scale = ctx.d.d_minus2.abs() * 4.0;
        for n in [2u64, 101, 10_007, 999_983, 1 << 19, 3 * 7 * 13 * 17 * 23] {
            let id = ideal(n);
            let y = y_values_with(&id, &triv, &prof, &ctx, DEFAULT_RHO_CAP).unwrap();
            let envelope = scale * rho_count(&id) as f64 * (1.0 + id.log_norm()).powi(3);
            for v in [y.y2, y.y1, y.y0, y.y_minus1] {
                assert!(v.is_finite() && v.abs() <= envelope, "n = {n}: {v} vs {envelope}");
            }
        }
    }

    #[test]
    fn upsilon_examples() {
        assert!((upsilon_archimedean(c(1.0)).unwrap() + PI / 8.0).norm() < 1e-12);
        let s = Complex64::new(0.7, 2.0);
        let lq = 3f64.ln();
        let x = ((s + 1.0) / 2.0 * lq).exp();
        let one = ((1.0 - x.inv()) * (1.0 - x)).inv();
        assert!((upsilon_finite(s, 3, 1).unwrap() - one).norm() < 1e-14);
        for big in [1e3, 1e4] {
            let v = upsilon_archimedean(c(big)).unwrap().re * big;
            assert!((v + 0.5).abs() < 2.0 / big);
        }
        let places = [SPlace::archimedean(), SPlace::finite(3, -1)];
        let v = upsilon(&places, &[c(1.0), s]).unwrap();
        assert!((v - upsilon_archimedean(c(1.0)).unwrap() * upsilon_finite(s, 3, -1).unwrap()).norm() < 1e-14);
        assert!(upsilon(&places, &[c(1.0)]).is_err());
        assert!(upsilon_finite(c(-1.0), 3, 1).is_err());
    }

    #[test]
    fn geometric_c_term_examples() {
        let prof = FieldProfile::rational();
        let places = [SPlace::archimedean(), SPlace::finite(2, -1)];
        let l = laurent_at_1(&chi5(), &prof).unwrap();
        for s in [c(1.0), Complex64::new(2.5, 1.0)] {
            let v = geometric_c_term(&places, &[s, s], &ideal(49), &l, &prof).unwrap();
            assert_eq!(v, c(l.c0));
        }
        let z = laurent_at_1(&QuadraticCharacterProfile::trivial(), &prof).unwrap();
        let s = [Complex64::new(3.0, 0.5), Complex64::new(4.0, -1.0)];
        let n = ideal(3 * 3 * 7);
        let o = geometric_c_term(&places, &s, &LevelIdeal::unit(), &z, &prof).unwrap();
        let m = geometric_c_term(&places, &s, &n, &z, &prof).unwrap();
        assert!((m - o - z.r * 63f64.ln()).norm() < 1e-12);
        let comb = geometric_c_combined(&places, &s, &n, &z, &prof).unwrap();
        assert!((comb - o - 0.5 * z.r * 63f64.ln()).norm() < 1e-12);
    }

    #[test]
    fn a_factor_examples() {
        let one = DirichletCharacter::trivial(1).unwrap();
        let rho = RhoAssignment::from_pairs([(p(2), 1), (p(3), 2), (p(7), 0)]);
        assert_eq!(a_factor_unramified(&one, &RhoAssignment::empty(), c(0.3)).unwrap(), c(1.0));
        assert!((a_factor_unramified(&one, &rho, c(0.0)).unwrap() - 1.0).norm() < 1e-15);
        for nu in [c(0.3), Complex64::new(0.1, 2.0), c(-0.45)] {
            let a = a_factor_unramified(&one, &rho, nu).unwrap();
            let b = a_factor_unramified(&one, &rho, -nu).unwrap();
            assert!((a * b - 1.0).norm() < 1e-14);
        }
        let nu = 0.3f64;
        let mut expect = 1.0;
        for (q, k) in [(2.0f64, 1.0), (3.0, 2.0)] {
            expect *= q.powf(-k * nu) * (1.0 - q.powf(-1.0 + nu)) / (1.0 - q.powf(-1.0 - nu));
        }
        assert!((a_factor_unramified(&one, &rho, c(nu)).unwrap().re - expect).abs() < 1e-15);
        let chi = quadratic_character(5).unwrap();
        let a = a_factor_unramified(&chi, &rho, c(0.2)).unwrap();
        let b = a_factor_unramified(&chi, &rho, c(-0.2)).unwrap();
        assert!((a * b - 1.0).norm() < 1e-14);
    }

    #[test]
    fn c_n_s_examples() {
        let prof = FieldProfile::rational();
        let none = BTreeSet::new();
        assert_eq!(c_n_s(&LevelIdeal::unit(), &none, &prof).unwrap(), -1.0);
        assert_relative_eq!(c_n_s(&ideal(7), &none, &prof).unwrap(), -1.0 / 8.0, max_relative = 1e-15);
        let s: BTreeSet<_> = [p(3)].into_iter().collect();
        assert!(c_n_s(&ideal(7), &s, &prof).unwrap() > 0.0);
        assert!(matches!(c_n_s(&ideal(21), &s, &prof), Err(RtfError::RamifiedOverlap(_))));
    }

    #[test]
    fn level_weighted_rhs_examples() {
        let prof = FieldProfile::rational();
        let zero = |_: f64| 0.0;
        let bump = |y: f64| (-(y - 1.0).powi(2)).exp();
        fn t<'a>(f: &'a dyn Fn(f64) -> f64) -> [PlaceTest<'a>; 1] {
            [PlaceTest { place: SpectralPlace::Archimedean, sign: 1, support: (0.0, 4.0), f }]
        }
        assert_eq!(level_weighted_rhs(&ideal(12), &t(&zero), 1.0, &prof, 1e-10).unwrap().value, 0.0);
        let sq = level_weighted_rhs(&ideal(15), &t(&bump), 0.7, &prof, 1e-12).unwrap().value;
        let pairing = lambda_s_pairing(&t(&bump), 0.7, 1.0, 1e-12).unwrap().value;
        assert_eq!(sq, pairing);
        let half = level_weighted_rhs(&ideal(4 * 15), &t(&bump), 0.7, &prof, 1e-12).unwrap().value;
        assert_relative_eq!(half, 0.5 * sq, max_relative = 1e-14);
    }
}
