//! Complex gamma, digamma and Hurwitz zeta.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Result, RtfError};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// B_2, B_4, ..., B_30
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// log Gamma(z), continuous along horizontal lines; only `exp` of it is
/// branch independent.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(RtfError::Pole {
            what: "Gamma",
            at: format!("{z}"),
        });
    }
    Ok(ln_gamma(z).exp())
}

pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(RtfError::Pole {
            what: "digamma",
            at: format!("{z}"),
        });
    }
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, &b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        series += b / (2.0 * (k as f64 + 1.0)) * pow;
        pow *= inv2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}

pub fn digamma_real(x: f64) -> Result<f64> {
    Ok(digamma(Complex64::new(x, 0.0))?.re)
}

/// Hurwitz zeta(s, a) for a > 0 and s != 1 by Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(RtfError::Domain {
            what: "hurwitz_zeta parameter a",
            value: format!("{a}"),
        });
    }
    if (s - 1.0).norm() == 0.0 {
        return Err(RtfError::Pole {
            what: "Hurwitz zeta",
            at: "s = 1".into(),
        });
    }
    let n = 24 + s.norm().ceil() as usize;
    let mut head = Complex64::new(0.0, 0.0);
    for k in (0..n).rev() {
        head += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let x_s = (-s * lx).exp();
    let mut tail = x * x_s / (s - 1.0) + 0.5 * x_s;
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x_s / x;
    for (j, &b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        tail += term;
        if term.norm() < 1e-18 * (head.norm() + tail.norm()) {
            break;
        }
        let m = 2.0 * j as f64 + 2.0;
        rising *= (s + (m - 1.0)) * (s + m);
        fact *= (m + 1.0) * (m + 2.0);
        xpow /= x * x;
    }
    Ok(head + tail)
}

pub fn riemann_zeta(s: Complex64) -> Result<Complex64> {
    hurwitz_zeta(s, 1.0)
}

/// Gamma_R(s) = pi^{-s/2} Gamma(s/2).
pub fn gamma_r(s: Complex64) -> Result<Complex64> {
    let half = s / 2.0;
    if is_nonpositive_integer(half) {
        return Err(RtfError::Pole {
            what: "Gamma_R",
            at: format!("{s}"),
        });
    }
    Ok((-half * PI.ln() + ln_gamma(half)).exp())
}
