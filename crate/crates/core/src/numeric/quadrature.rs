//! Adaptive Gauss-Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Result, RtfError};
use crate::numeric::sum::pairwise_sum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    #[serde(rename = "error")]
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub kronrod: f64,
    pub gauss: f64,
    pub abs: f64,
}

impl Panel {
    /// |K - G| floored by the round-off level of the panel.
    pub fn error(&self) -> f64 {
        (self.kronrod - self.gauss)
            .abs()
            .max(50.0 * f64::EPSILON * self.abs)
    }
}

pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        kronrod: k * h,
        gauss: g * h,
        abs: abs * h.abs(),
    }
}

struct Item {
    a: f64,
    b: f64,
    panel: Panel,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        self.panel
            .error()
            .total_cmp(&other.panel.error())
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_with_limit(f, a, b, tol, DEFAULT_LIMIT)
}

pub fn integrate_with_limit<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    limit: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(RtfError::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(RtfError::invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Item {
        a,
        b,
        panel: gk15(&f, a, b),
    });
    let mut subdivisions = 0;
    loop {
        let total_err: f64 = heap.iter().map(|it| it.panel.error()).sum();
        if total_err <= tol || subdivisions >= limit {
            let mut items = heap.into_vec();
            items.sort_by(|x, y| x.a.total_cmp(&y.a));
            let vals: Vec<f64> = items.iter().map(|it| it.panel.kronrod).collect();
            let errs: Vec<f64> = items.iter().map(|it| it.panel.error()).collect();
            let value = pairwise_sum(&vals);
            let error_estimate = pairwise_sum(&errs);
            if error_estimate <= tol {
                return Ok(QuadratureResult {
                    value,
                    error_estimate,
                    subdivisions,
                });
            }
            return Err(RtfError::NonConvergence {
                value,
                error_estimate,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(Item {
            a: worst.a,
            b: mid,
            panel: gk15(&f, worst.a, mid),
        });
        heap.push(Item {
            a: mid,
            b: worst.b,
            panel: gk15(&f, mid, worst.b),
        });
        subdivisions += 1;
    }
}

/// Integrates over [a, b] inside [-2, 2] after x = 2 cos(theta), which
/// removes square-root behaviour at x = +-2.
pub fn integrate_semicircle<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(-2.0..=2.0).contains(&a) || !(-2.0..=2.0).contains(&b) {
        return Err(RtfError::Domain {
            what: "semicircle integration limits",
            value: format!("[{a}, {b}]"),
        });
    }
    let ta = (b / 2.0).acos();
    let tb = (a / 2.0).acos();
    integrate(
        |t: f64| {
            let x = 2.0 * t.cos();
            f(x) * 2.0 * t.sin()
        },
        ta,
        tb,
        tol,
    )
}
