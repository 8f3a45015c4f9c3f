//! Local representations of GL(2) with trivial central character, their
//! L-factors, the period constants Q_k and the weights r(pi_v, eta_v, k).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::characters::QuadraticCharacterProfile;
use crate::error::{Result, RtfError};
use crate::field_profile::{FieldProfile, FinitePlace, LevelIdeal};
use crate::numeric::special::ln_gamma;

pub use crate::numeric::special::gamma_r;

const REAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Unramified principal series with Satake parameter (alpha, 1/alpha).
    Spherical { alpha: Complex64 },
    /// Twisted Steinberg sigma(chi|.|^{1/2}, chi|.|^{-1/2}); `sign` = chi(uniformizer).
    Special { sign: i8 },
    /// Conductor exponent c >= 2.
    HigherConductor { c: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalRepresentation {
    place: FinitePlace,
    variant: Variant,
}

impl LocalRepresentation {
    /// Satake parameter either unitary or alpha = q^{sigma/2}, 0 < |sigma| < 1.
    pub fn spherical(place: FinitePlace, alpha: Complex64) -> Result<Self> {
        let q = place.q as f64;
        let unitary = (alpha.norm() - 1.0).abs() < 1e-12;
        let complementary = alpha.im.abs() < REAL_TOL
            && alpha.re > 0.0
            && alpha.re.ln().abs() < 0.5 * q.ln()
            && alpha.re != 1.0;
        if !(unitary || complementary) {
            return Err(RtfError::Domain {
                what: "Satake parameter",
                value: format!("{alpha}"),
            });
        }
        Ok(LocalRepresentation {
            place,
            variant: Variant::Spherical { alpha },
        })
    }

    pub fn tempered(place: FinitePlace, theta: f64) -> Result<Self> {
        Self::spherical(place, Complex64::from_polar(1.0, theta))
    }

    pub fn complementary(place: FinitePlace, sigma: f64) -> Result<Self> {
        let a = (place.q as f64).powf(sigma / 2.0);
        Self::spherical(place, Complex64::new(a, 0.0))
    }

    pub fn special(place: FinitePlace, sign: i8) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return Err(RtfError::invalid(format!("special sign {sign} is not +-1")));
        }
        Ok(LocalRepresentation {
            place,
            variant: Variant::Special { sign },
        })
    }

    pub fn higher(place: FinitePlace, c: u32) -> Result<Self> {
        if c < 2 {
            return Err(RtfError::invalid(format!("conductor exponent {c} < 2")));
        }
        Ok(LocalRepresentation {
            place,
            variant: Variant::HigherConductor { c },
        })
    }

    pub fn place(&self) -> &FinitePlace {
        &self.place
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn conductor_exponent(&self) -> u32 {
        match self.variant {
            Variant::Spherical { .. } => 0,
            Variant::Special { .. } => 1,
            Variant::HigherConductor { c } => c,
        }
    }

    /// Q(pi_v) = (alpha + 1/alpha)/(q^{1/2} + q^{-1/2}); None unless spherical.
    pub fn q_value(&self) -> Option<f64> {
        match self.variant {
            Variant::Spherical { alpha } => {
                let q = self.place.q as f64;
                Some((alpha + alpha.inv()).re / (q.sqrt() + 1.0 / q.sqrt()))
            }
            _ => None,
        }
    }
}

/// Local character datum for the abelian L-factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalCharacter {
    Unramified(Complex64),
    Ramified,
}

/// (1 - chi(uniformizer) q^{-s})^{-1}, or 1 when ramified.
pub fn local_l_character(s: Complex64, chi: LocalCharacter, q: u64) -> Result<Complex64> {
    match chi {
        LocalCharacter::Ramified => Ok(Complex64::new(1.0, 0.0)),
        LocalCharacter::Unramified(c) => {
            let denom = 1.0 - c * (-s * (q as f64).ln()).exp();
            if denom.norm() < 1e-14 {
                return Err(RtfError::Pole {
                    what: "local abelian L-factor",
                    at: format!("s = {s}, q = {q}"),
                });
            }
            Ok(denom.inv())
        }
    }
}

/// L(s, pi(|.|^{nu/2}, |.|^{-nu/2})).
pub fn local_l_spherical(s: Complex64, nu: Complex64, q: u64) -> Result<Complex64> {
    let one = LocalCharacter::Unramified(Complex64::new(1.0, 0.0));
    Ok(local_l_character(s + nu / 2.0, one, q)? * local_l_character(s - nu / 2.0, one, q)?)
}

/// L(s, pi(|.|^{nu/2}, |.|^{-nu/2}) x eta_v) for unramified eta_v.
pub fn local_l_spherical_twisted(s: Complex64, nu: Complex64, q: u64, eta: i8) -> Result<Complex64> {
    let e = LocalCharacter::Unramified(Complex64::new(eta as f64, 0.0));
    Ok(local_l_character(s + nu / 2.0, e, q)? * local_l_character(s - nu / 2.0, e, q)?)
}

/// |Gamma(iy/2)|^{-2} = (y/2) sinh(pi y/2)/pi.
pub fn abs_gamma_iy_sq_inv(y: f64) -> f64 {
    0.5 * y * (0.5 * PI * y).sinh() / PI
}

/// The same quantity through the Lanczos kernel and
/// Gamma(iy/2) = Gamma(1 + iy/2)/(iy/2).
pub fn abs_gamma_iy_sq_inv_lanczos(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let lg = ln_gamma(Complex64::new(1.0, 0.5 * y)).re;
    0.25 * y * y * (-2.0 * lg).exp()
}

fn check_sign(eta: i8) -> Result<()> {
    if eta == 1 || eta == -1 {
        Ok(())
    } else {
        Err(RtfError::invalid(format!("eta sign {eta} is not +-1")))
    }
}

/// Q_{k,v}^{pi_v}(eta_v, 1).
pub fn q_k(pi: &LocalRepresentation, eta: i8, k: u32) -> Result<Complex64> {
    check_sign(eta)?;
    let e = eta as f64;
    let q = pi.place.q as f64;
    let one = Complex64::new(1.0, 0.0);
    if k == 0 {
        return Ok(one);
    }
    let v = match pi.variant {
        Variant::Spherical { alpha } => {
            if k == 1 {
                e - (alpha + alpha.inv()) / (q.sqrt() + 1.0 / q.sqrt())
            } else {
                let sq = q.sqrt();
                e.powi(k as i32 - 2) / q * (alpha * sq * e - 1.0) * (alpha.inv() * sq * e - 1.0)
            }
        }
        Variant::Special { sign } => {
            let chi = sign as f64;
            one * e.powi(k as i32 - 1) * (e - 1.0 / (q * chi))
        }
        Variant::HigherConductor { .. } => one * e.powi(k as i32),
    };
    Ok(v)
}

/// r(pi_v, eta_v, k), with r(., ., 0) = 1.
pub fn r_weight(pi: &LocalRepresentation, eta: i8, k: u32) -> Result<f64> {
    check_sign(eta)?;
    if k == 0 {
        return Ok(1.0);
    }
    let q = pi.place.q as f64;
    let kf = k as f64;
    let parity = if k.is_multiple_of(2) { 1.0 } else { 0.0 };
    let r = match (pi.variant, eta) {
        (Variant::HigherConductor { .. }, 1) => kf + 1.0,
        (Variant::HigherConductor { .. }, _) => parity,
        (Variant::Special { sign }, 1) => {
            let c = sign as f64 / q;
            1.0 + (1.0 - c) / (1.0 + c) * kf
        }
        (Variant::Special { .. }, _) => parity,
        (Variant::Spherical { .. }, 1) => {
            let qq = pi.q_value().expect("spherical");
            2.0 / (1.0 + qq) + (1.0 - qq) / (1.0 + qq) * (q + 1.0) / (q - 1.0) * (kf - 1.0)
        }
        (Variant::Spherical { .. }, _) => (q + 1.0) / (q - 1.0) * parity,
    };
    Ok(r)
}

/// w_n^eta(pi) = prod over S(n f_pi^{-1}) of r(pi_v, eta_v, ord_v(n f_pi^{-1})).
pub fn w_global(
    reps: &[LocalRepresentation],
    eta: &QuadraticCharacterProfile,
    n: &LevelIdeal,
    f_pi: &LevelIdeal,
) -> Result<f64> {
    let m = n.quotient(f_pi)?;
    let mut w = 1.0;
    for (place, k) in m.factors() {
        let pi = reps
            .iter()
            .find(|r| &r.place == place)
            .ok_or_else(|| RtfError::invalid(format!("no local representation at {place}")))?;
        if pi.conductor_exponent() != f_pi.exponent(place) {
            return Err(RtfError::invalid(format!(
                "representation at {place} has conductor exponent {} but f_pi has {}",
                pi.conductor_exponent(),
                f_pi.exponent(place)
            )));
        }
        w *= r_weight(pi, eta.sign(place)?, k)?;
    }
    Ok(w)
}

/// [K_fin : K_0(n)] = N(n) prod_{v | n} (1 + 1/q_v).
pub fn index_k0(n: &LevelIdeal) -> f64 {
    n.factors()
        .map(|(p, e)| {
            let q = p.q as f64;
            q.powi(e as i32 - 1) * (q + 1.0)
        })
        .product()
}

/// The index as an exact integer, prod q^{e-1}(q + 1).
pub fn index_k0_exact(n: &LevelIdeal) -> Result<u128> {
    let mut acc: u128 = 1;
    for (p, e) in n.factors() {
        let q = p.q as u128;
        let mut t = q + 1;
        for _ in 1..e {
            t = t.checked_mul(q).ok_or(RtfError::NormOverflow)?;
        }
        acc = acc.checked_mul(t).ok_or(RtfError::NormOverflow)?;
    }
    Ok(acc)
}

/// ||phi_new||^2 = 2 N(f) [K_fin : K_0(f)]^{-1} L^{S}(1, pi; Ad).
pub fn adjoint_norm_factor(f_pi: &LevelIdeal, l_ad_partial: f64) -> Result<f64> {
    if !(l_ad_partial > 0.0) {
        return Err(RtfError::invalid(format!("L(1, Ad) must be positive, got {l_ad_partial}")));
    }
    Ok(2.0 * f_pi.norm_f64() / index_k0(f_pi) * l_ad_partial)
}

/// Which component of X_v^{0+} a spectral parameter lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    Tempered,
    Complementary,
}

/// A spectral parameter nu_v at an archimedean (q = None) or finite place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub q: Option<u64>,
    pub nu: Complex64,
}

impl SpectralPoint {
    pub fn archimedean(nu: Complex64) -> Self {
        SpectralPoint { q: None, nu }
    }

    /// Reduces a finite-place parameter modulo 4 pi i/log q and nu -> -nu.
    pub fn finite(q: u64, nu: Complex64) -> Self {
        let period = 4.0 * PI / (q as f64).ln();
        let mut im = nu.im.rem_euclid(period);
        if im > period / 2.0 + 1e-12 {
            im -= period;
        }
        let mut nu = Complex64::new(nu.re, im);
        if nu.re < 0.0 || (nu.re == 0.0 && nu.im < 0.0) {
            nu = -nu;
            if nu.im < -1e-12 {
                nu.im += period;
            }
        }
        SpectralPoint { q: Some(q), nu }
    }

    pub fn classify(&self) -> Option<SpectralKind> {
        let (x, y) = (self.nu.re, self.nu.im);
        match self.q {
            None => {
                if x.abs() < REAL_TOL && y >= 0.0 {
                    Some(SpectralKind::Tempered)
                } else if y.abs() < REAL_TOL && x > 0.0 && x < 1.0 {
                    Some(SpectralKind::Complementary)
                } else {
                    None
                }
            }
            Some(q) => {
                let top = 2.0 * PI / (q as f64).ln();
                if x.abs() < REAL_TOL && y >= -REAL_TOL && y <= top + 1e-12 {
                    Some(SpectralKind::Tempered)
                } else if x > 0.0
                    && x < 1.0
                    && (y.abs() < 1e-12 || (y - top).abs() < 1e-12)
                {
                    Some(SpectralKind::Complementary)
                } else {
                    None
                }
            }
        }
    }

    /// x = q^{nu/2} + q^{-nu/2} at a finite place.
    pub fn hecke_eigenvalue(&self) -> Option<Complex64> {
        let q = self.q? as f64;
        let a = (self.nu / 2.0 * q.ln()).exp();
        Some(a + a.inv())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationSpec {
    pub place: String,
    pub variant: String,
    pub parameter: serde_json::Value,
}

impl RepresentationSpec {
    pub fn resolve(&self, profile: &FieldProfile) -> Result<LocalRepresentation> {
        let place = profile.place(&self.place)?;
        let bad = || RtfError::parse(format!("bad parameter for {} at {}", self.variant, self.place));
        match self.variant.as_str() {
            "spherical" => {
                let alpha = match &self.parameter {
                    serde_json::Value::Number(n) => Complex64::new(n.as_f64().ok_or_else(bad)?, 0.0),
                    serde_json::Value::Array(v) if v.len() == 2 => Complex64::new(
                        v[0].as_f64().ok_or_else(bad)?,
                        v[1].as_f64().ok_or_else(bad)?,
                    ),
                    _ => return Err(bad()),
                };
                LocalRepresentation::spherical(place, alpha)
            }
            "special" => LocalRepresentation::special(place, self.parameter.as_i64().ok_or_else(bad)? as i8),
            "higher" => LocalRepresentation::higher(place, self.parameter.as_u64().ok_or_else(bad)? as u32),
            other => Err(RtfError::parse(format!("unknown variant {other}"))),
        }
    }
}

impl From<&LocalRepresentation> for RepresentationSpec {
    fn from(r: &LocalRepresentation) -> Self {
        let (variant, parameter) = match r.variant {
            Variant::Spherical { alpha } => ("spherical", serde_json::json!([alpha.re, alpha.im])),
            Variant::Special { sign } => ("special", serde_json::json!(sign)),
            Variant::HigherConductor { c } => ("higher", serde_json::json!(c)),
        };
        RepresentationSpec {
            place: r.place.label.clone(),
            variant: variant.into(),
            parameter,
        }
    }
}

pub fn representations_from_json(text: &str, profile: &FieldProfile) -> Result<Vec<LocalRepresentation>> {
    let specs: Vec<RepresentationSpec> =
        serde_json::from_str(text).map_err(|e| RtfError::parse(format!("representations: {e}")))?;
    specs.iter().map(|s| s.resolve(profile)).collect()
}

pub fn representations_to_json(reps: &[LocalRepresentation]) -> String {
    let specs: Vec<RepresentationSpec> = reps.iter().map(RepresentationSpec::from).collect();
    serde_json::to_string(&specs).expect("plain data serializes")
}
