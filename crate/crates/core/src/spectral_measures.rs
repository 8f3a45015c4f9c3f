//! Sato-Tate and Plancherel-type measures, the local spectral measures
//! lambda_v, their masses and tabulated distribution functions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::error::{Result, RtfError};
use crate::field_profile::is_prime_power;
use crate::numeric::quadrature::{gk15, integrate, integrate_semicircle, QuadratureResult};
use crate::numeric::special::ln_gamma;

const EDGE_SLACK: f64 = 1e-12;

fn check_x(x: f64) -> Result<f64> {
    if !(x.abs() <= 2.0 + EDGE_SLACK) {
        return Err(RtfError::Domain {
            what: "Hecke eigenvalue x",
            value: format!("{x}"),
        });
    }
    Ok(x.clamp(-2.0, 2.0))
}

fn check_q(q: u64) -> Result<()> {
    if !is_prime_power(q) {
        return Err(RtfError::Domain {
            what: "residue field cardinality",
            value: q.to_string(),
        });
    }
    Ok(())
}

fn check_sign(sign: i8) -> Result<()> {
    if sign == 1 || sign == -1 {
        Ok(())
    } else {
        Err(RtfError::invalid(format!("sign {sign} is not +-1")))
    }
}

/// (2 pi)^{-1} sqrt(4 - x^2).
pub fn mu_st(x: f64) -> Result<f64> {
    let x = check_x(x)?;
    Ok((4.0 - x * x).max(0.0).sqrt() / (2.0 * PI))
}

/// Density of mu_q^eta against dx.
pub fn mu_p_eta(x: f64, q: u64, sign: i8) -> Result<f64> {
    check_q(q)?;
    check_sign(sign)?;
    let st = mu_st(x)?;
    let x = x.clamp(-2.0, 2.0);
    let qf = q as f64;
    let a = qf.sqrt() + 1.0 / qf.sqrt();
    Ok(if sign == 1 {
        (qf - 1.0) / ((a - x) * (a - x)) * st
    } else {
        (qf + 1.0) / (a * a - x * x) * st
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralPlace {
    Archimedean,
    Finite { q: u64 },
}

impl SpectralPlace {
    /// Right end of the window i[0, 2 pi/log q]; infinite at a real place.
    pub fn window(&self) -> f64 {
        match *self {
            SpectralPlace::Archimedean => f64::INFINITY,
            SpectralPlace::Finite { q } => 2.0 * PI / (q as f64).ln(),
        }
    }
}

fn ln_sinh(a: f64) -> f64 {
    a + (-(-2.0 * a).exp()).ln_1p() - 2f64.ln()
}

fn lambda_archimedean(y: f64) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    // |Gamma_R(1/2 + iy/2)|^4 (y/2) sinh(pi y/2) / (4 pi^2)
    let s = Complex64::new(0.25, 0.25 * y);
    let ln_gr = -0.5 * 0.5 * PI.ln() + ln_gamma(s).re;
    (4.0 * ln_gr + (0.5 * y).ln() + ln_sinh(0.5 * PI * y) - (4.0 * PI * PI).ln()).exp()
}

fn lambda_finite(y: f64, q: u64, sign: i8) -> f64 {
    let qf = q as f64;
    let lq = qf.ln();
    let x = 2.0 * (0.5 * y * lq).cos();
    let four_minus = 4.0 * (0.5 * y * lq).sin().powi(2);
    let e = sign as f64;
    let l1 = 1.0 + 1.0 / qf - x / qf.sqrt();
    let l2 = 1.0 + 1.0 / qf - e * x / qf.sqrt();
    (1.0 - e / qf) * lq / (4.0 * PI) * four_minus / (l1 * l2)
}

/// Density of lambda_v^{eta_v} at iy against dy.
pub fn lambda_v_density(y: f64, place: SpectralPlace, sign: i8) -> Result<f64> {
    check_sign(sign)?;
    let bad = || RtfError::Domain {
        what: "spectral coordinate y",
        value: format!("{y}"),
    };
    match place {
        SpectralPlace::Archimedean => {
            if sign != 1 {
                return Err(RtfError::invalid("eta must be trivial at archimedean places"));
            }
            if !(y >= 0.0) || !y.is_finite() {
                return Err(bad());
            }
            Ok(lambda_archimedean(y))
        }
        SpectralPlace::Finite { q } => {
            check_q(q)?;
            if !(y >= -EDGE_SLACK && y <= place.window() + EDGE_SLACK) {
                return Err(bad());
            }
            Ok(lambda_finite(y, q, sign))
        }
    }
}

/// Max |lambda(y) - mu(x(y)) |dx/dy|| over an interior grid of
/// y in (0, 2 pi/log q), with x(y) = q^{iy/2} + q^{-iy/2}.
pub fn pushforward_check(q: u64, sign: i8, grid_size: usize) -> Result<f64> {
    check_q(q)?;
    check_sign(sign)?;
    if grid_size == 0 {
        return Err(RtfError::invalid("empty grid"));
    }
    let lq = (q as f64).ln();
    let top = SpectralPlace::Finite { q }.window();
    let mut worst: f64 = 0.0;
    for j in 0..grid_size {
        let y = (j as f64 + 0.5) / grid_size as f64 * top;
        let x = 2.0 * (0.5 * y * lq).cos();
        let jac = lq * (0.5 * y * lq).sin().abs();
        let lhs = lambda_v_density(y, SpectralPlace::Finite { q }, sign)?;
        let rhs = mu_p_eta(x, q, sign)? * jac;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Mass of mu_q^eta pulled back along x = q^{iy} + q^{-iy}, which wraps
/// the window twice around [-2, 2], divided by the mass of lambda_v.
pub fn double_cover_ratio(q: u64, sign: i8, tol: f64) -> Result<f64> {
    check_q(q)?;
    check_sign(sign)?;
    let lq = (q as f64).ln();
    let top = SpectralPlace::Finite { q }.window();
    let wrapped = integrate(
        |y: f64| {
            let x = 2.0 * (y * lq).cos();
            mu_p_eta(x, q, sign).unwrap_or(0.0) * 2.0 * lq * (y * lq).sin().abs()
        },
        0.0,
        top,
        tol,
    )?;
    let single = integrate(|y: f64| lambda_finite(y, q, sign), 0.0, top, tol)?;
    Ok(wrapped.value / single.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    SatoTate,
    Plancherel { q: u64, sign: i8 },
    Lambda { place: SpectralPlace, sign: i8 },
}

impl Density {
    pub fn plancherel(q: u64, sign: i8) -> Result<Self> {
        check_q(q)?;
        check_sign(sign)?;
        Ok(Density::Plancherel { q, sign })
    }

    pub fn lambda(place: SpectralPlace, sign: i8) -> Result<Self> {
        check_sign(sign)?;
        match place {
            SpectralPlace::Finite { q } => check_q(q)?,
            SpectralPlace::Archimedean if sign != 1 => {
                return Err(RtfError::invalid("eta must be trivial at archimedean places"))
            }
            SpectralPlace::Archimedean => {}
        }
        Ok(Density::Lambda { place, sign })
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            Density::SatoTate | Density::Plancherel { .. } => (-2.0, 2.0),
            Density::Lambda { place, .. } => (0.0, place.window()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            Density::SatoTate => mu_st(x),
            Density::Plancherel { q, sign } => mu_p_eta(x, q, sign),
            Density::Lambda { place, sign } => lambda_v_density(x, place, sign),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Density::SatoTate => "mu_ST",
            Density::Plancherel { .. } => "mu_p_eta",
            Density::Lambda { .. } => "lambda_v",
        }
    }

    pub fn place_q(&self) -> u64 {
        match *self {
            Density::SatoTate | Density::Lambda { place: SpectralPlace::Archimedean, .. } => 0,
            Density::Plancherel { q, .. } | Density::Lambda { place: SpectralPlace::Finite { q }, .. } => q,
        }
    }

    pub fn sign(&self) -> i8 {
        match *self {
            Density::SatoTate => 1,
            Density::Plancherel { sign, .. } | Density::Lambda { sign, .. } => sign,
        }
    }

    fn is_semicircular(&self) -> bool {
        matches!(self, Density::SatoTate | Density::Plancherel { .. })
    }

    /// Integral over [a, b]; semicircular densities go through x = 2 cos t.
    pub fn integrate(&self, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
        let (lo, hi) = self.domain();
        if a < lo - EDGE_SLACK || b > hi + EDGE_SLACK || !b.is_finite() {
            return Err(RtfError::Domain {
                what: "integration window",
                value: format!("[{a}, {b}]"),
            });
        }
        if self.is_semicircular() {
            integrate_semicircle(|x| self.eval(x).unwrap_or(0.0), a.max(lo), b.min(hi), tol)
        } else {
            integrate(|x| self.eval(x).unwrap_or(0.0), a.max(lo), b.min(hi), tol)
        }
    }

    pub fn mass(&self, tol: f64) -> Result<QuadratureResult> {
        let (a, b) = self.domain();
        if !b.is_finite() {
            return Err(RtfError::Domain {
                what: "mass of an infinite measure",
                value: self.tag().into(),
            });
        }
        self.integrate(a, b, tol)
    }
}

/// One factor of the tensor product lambda_S^eta.
pub struct PlaceTest<'a> {
    pub place: SpectralPlace,
    pub sign: i8,
    pub support: (f64, f64),
    pub f: &'a dyn Fn(f64) -> f64,
}

/// <lambda_S^eta, f> = 4 D_F^{3/2} L(1, eta) prod_v int f_v dlambda_v.
pub fn lambda_s_pairing(tests: &[PlaceTest<'_>], l1_eta: f64, d_f: f64, tol: f64) -> Result<QuadratureResult> {
    let mut values = Vec::with_capacity(tests.len());
    let mut errors = Vec::with_capacity(tests.len());
    let mut subdivisions = 0;
    for t in tests {
        let density = Density::lambda(t.place, t.sign)?;
        let (a, b) = t.support;
        let (lo, hi) = density.domain();
        if !(a >= lo - EDGE_SLACK && b <= hi + EDGE_SLACK && a <= b && b.is_finite()) {
            return Err(RtfError::Domain {
                what: "test function support",
                value: format!("[{a}, {b}]"),
            });
        }
        let r = integrate(|y| (t.f)(y) * density.eval(y).unwrap_or(0.0), a.max(lo), b.min(hi), tol)?;
        values.push(r.value);
        errors.push(r.error_estimate);
        subdivisions += r.subdivisions;
    }
    let pref = 4.0 * d_f.powf(1.5) * l1_eta;
    let value: f64 = pref * values.iter().product::<f64>();
    let mut err = 0.0;
    for i in 0..values.len() {
        let others: f64 = values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.abs()).product();
        err += errors[i] * others;
    }
    Ok(QuadratureResult {
        value,
        error_estimate: pref.abs() * err,
        subdivisions,
    })
}

/// Distribution function on a fixed grid of cells in a smooth parameter t:
/// x = -2 cos t for semicircular densities, t = y otherwise.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    density: Density,
    t0: f64,
    step: f64,
    cum: Vec<f64>,
}

pub const DEFAULT_CELLS: usize = 2048;

impl TabulatedCdf {
    pub fn new(density: Density, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(RtfError::invalid("CDF table needs at least one cell"));
        }
        let (t0, t1) = if density.is_semicircular() {
            (0.0, PI)
        } else {
            let (a, b) = density.domain();
            if !b.is_finite() {
                return Err(RtfError::Domain {
                    what: "CDF of an infinite measure",
                    value: density.tag().into(),
                });
            }
            (a, b)
        };
        let step = (t1 - t0) / cells as f64;
        let mut table = TabulatedCdf {
            density,
            t0,
            step,
            cum: Vec::with_capacity(cells + 1),
        };
        let mut acc = 0.0;
        let mut comp = 0.0;
        table.cum.push(0.0);
        for i in 0..cells {
            let a = t0 + i as f64 * step;
            let piece = gk15(&|t| table.g(t), a, a + step).kronrod - comp;
            let next = acc + piece;
            comp = (next - acc) - piece;
            acc = next;
            table.cum.push(acc);
        }
        Ok(table)
    }

    pub fn density(&self) -> Density {
        self.density
    }

    fn g(&self, t: f64) -> f64 {
        if self.density.is_semicircular() {
            let x = -2.0 * t.cos();
            self.density.eval(x).unwrap_or(0.0) * 2.0 * t.sin()
        } else {
            self.density.eval(t).unwrap_or(0.0)
        }
    }

    fn to_t(&self, x: f64) -> f64 {
        if self.density.is_semicircular() {
            (-x / 2.0).clamp(-1.0, 1.0).acos()
        } else {
            x
        }
    }

    fn to_x(&self, t: f64) -> f64 {
        if self.density.is_semicircular() {
            -2.0 * t.cos()
        } else {
            t
        }
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().expect("nonempty table")
    }

    fn mass_to_t(&self, t: f64) -> f64 {
        let n = self.cum.len() - 1;
        let end = self.t0 + n as f64 * self.step;
        let t = t.clamp(self.t0, end);
        let i = (((t - self.t0) / self.step) as usize).min(n - 1);
        let a = self.t0 + i as f64 * self.step;
        if t == a {
            return self.cum[i];
        }
        self.cum[i] + gk15(&|s| self.g(s), a, t).kronrod
    }

    /// Unnormalized mass of the domain left of x.
    pub fn mass_below(&self, x: f64) -> f64 {
        let (lo, hi) = self.density.domain();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return self.total();
        }
        self.mass_to_t(self.to_t(x))
    }

    /// Probability distribution function, normalized by the tabulated total.
    pub fn cdf(&self, x: f64) -> f64 {
        (self.mass_below(x) / self.total()).clamp(0.0, 1.0)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(RtfError::Domain {
                what: "probability level",
                value: format!("{u}"),
            });
        }
        let target = u * self.total();
        let n = self.cum.len() - 1;
        let i = match self.cum.binary_search_by(|c| c.partial_cmp(&target).expect("finite")) {
            Ok(i) => return Ok(self.to_x(self.t0 + i as f64 * self.step)),
            Err(i) => i.clamp(1, n) - 1,
        };
        let mut lo = self.t0 + i as f64 * self.step;
        let mut hi = lo + self.step;
        let mut t = 0.5 * (lo + hi);
        for _ in 0..60 {
            let f = self.mass_to_t(t) - target;
            if f.abs() <= 1e-16 * self.total() {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.g(t);
            let newton = t - f / d;
            t = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(self.to_x(t))
    }

    /// Deterministic inverse-CDF sample.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}
