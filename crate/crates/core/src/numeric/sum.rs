//! Order-stable summation and products.

/// Fixed-tree pairwise summation; the association order depends only on the
/// slice length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Product of real factors. Long products are accumulated as sign and
/// log-magnitude.
pub fn stable_product(factors: &[f64]) -> f64 {
    if factors.len() <= 20 {
        return factors.iter().product();
    }
    let mut negative = false;
    let mut log_mag = 0.0;
    for &f in factors {
        if f == 0.0 {
            return 0.0;
        }
        negative ^= f < 0.0;
        log_mag += f.abs().ln();
    }
    let m = log_mag.exp();
    if negative {
        -m
    } else {
        m
    }
}
