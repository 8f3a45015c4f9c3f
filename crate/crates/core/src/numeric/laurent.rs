//! Taylor coefficients from symmetric stencils.
//!
//! With E_j = (g(jh) + g(-jh))/2 and O_j = (g(jh) - g(-jh))/(2jh), both are
//! polynomials in u = (jh)^2. Extrapolating them to u = 0 over j = 1..4 gives
//! g(0), g'(0) and g''(0)/2 with truncation error O(h^8).

use crate::error::{Result, RtfError};

pub const WIDE: f64 = 1e-2;
pub const NARROW: f64 = 5e-3;
pub const AGREEMENT: f64 = 1e-7;

/// Values and first u-derivatives at u = 0 of the Lagrange weights on
/// nodes u_j = j^2 (the factor h^2 is applied by the caller).
fn weights() -> ([f64; 4], [f64; 4]) {
    let u = [1.0, 4.0, 9.0, 16.0];
    let mut at0 = [0.0; 4];
    let mut d0 = [0.0; 4];
    for j in 0..4 {
        let mut denom = 1.0;
        for m in 0..4 {
            if m != j {
                denom *= u[j] - u[m];
            }
        }
        let mut prod = 1.0;
        for m in 0..4 {
            if m != j {
                prod *= -u[m];
            }
        }
        at0[j] = prod / denom;
        let mut deriv = 0.0;
        for skip in 0..4 {
            if skip == j {
                continue;
            }
            let mut p = 1.0;
            for m in 0..4 {
                if m != j && m != skip {
                    p *= -u[m];
                }
            }
            deriv += p;
        }
        d0[j] = deriv / denom;
    }
    (at0, d0)
}

/// [g(0), g'(0), g''(0)/2] from a stencil of width h.
pub fn taylor3<G>(g: &G, h: f64) -> Result<[f64; 3]>
where
    G: Fn(f64) -> Result<f64>,
{
    let (at0, d0) = weights();
    let mut c0 = 0.0;
    let mut c1 = 0.0;
    let mut c2 = 0.0;
    for j in 0..4 {
        let t = (j + 1) as f64 * h;
        let gp = g(t)?;
        let gm = g(-t)?;
        let even = 0.5 * (gp + gm);
        let odd = (gp - gm) / (2.0 * t);
        c0 += at0[j] * even;
        c1 += at0[j] * odd;
        c2 += d0[j] * even / (h * h);
    }
    Ok([c0, c1, c2])
}

/// Runs the stencil at both widths and rejects disagreement.
pub fn taylor3_checked<G>(g: &G, names: [&'static str; 3]) -> Result<[f64; 3]>
where
    G: Fn(f64) -> Result<f64>,
{
    let wide = taylor3(g, WIDE)?;
    let narrow = taylor3(g, NARROW)?;
    for i in 0..3 {
        let diff = (wide[i] - narrow[i]).abs();
        if !(diff <= AGREEMENT) {
            return Err(RtfError::StencilDisagreement {
                quantity: names[i],
                difference: diff,
                limit: AGREEMENT,
            });
        }
    }
    Ok(wide)
}

/// Largest stencil disagreement, for reporting.
pub fn stencil_spread<G>(g: &G) -> Result<[f64; 3]>
where
    G: Fn(f64) -> Result<f64>,
{
    let wide = taylor3(g, WIDE)?;
    let narrow = taylor3(g, NARROW)?;
    Ok([
        (wide[0] - narrow[0]).abs(),
        (wide[1] - narrow[1]).abs(),
        (wide[2] - narrow[2]).abs(),
    ])
}

/// Pole order of f at 0 read off from |f(t)| ~ |t|^{-k} on both sides.
pub fn pole_order<F>(f: &F, h: f64) -> Result<u32>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut order = 0.0f64;
    for side in [1.0, -1.0] {
        let a = f(side * h)?.abs();
        let b = f(side * h / 16.0)?.abs();
        let k = (b / a).log2() / 4.0;
        order = order.max(k);
    }
    Ok(order.round().max(0.0) as u32)
}
