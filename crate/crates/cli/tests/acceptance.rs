use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rtflab_core::characters::{brute, enumerate_xi, l_one, l_one_completed, quadratic_character, CharacterGroup};
use rtflab_core::local_factors::{abs_gamma_iy_sq_inv_lanczos, r_weight, w_global};
use rtflab_core::numeric::special::{digamma_real, EULER_GAMMA};
use rtflab_core::rtf_constants::{
    c_level, d_coeffs, d_function, enumerate_rho, geometric_c_combined, geometric_c_term, laurent_at_1,
    laurent_spread, p_coeffs, upsilon_archimedean, BBlock, SPlace, YBuildingBlock,
};
use rtflab_core::spectral_measures::{double_cover_ratio, pushforward_check, DEFAULT_CELLS};
use rtflab_core::{
    Density, EmpiricalSample, FieldProfile, FinitePlace, LevelIdeal, LocalRepresentation, QuadraticCharacterProfile,
    SampleRow, TabulatedCdf,
};

const MASS_ST_TOL: f64 = 1e-10;
const MASS_PLANCHEREL_TOL: f64 = 1e-8;
const MASS_RUNTIME: Duration = Duration::from_secs(5);
const PUSHFORWARD_TOL: f64 = 1e-9;
const DOUBLE_COVER_TOL: f64 = 1e-9;
const GAMMA_TOL: f64 = 1e-10;
const DIGAMMA_TOL: f64 = 1e-12;
const FIRST_DERIVATIVE_TOL: f64 = 1e-6;
const SECOND_DERIVATIVE_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-4;
const TAYLOR_TOL: f64 = 1e-6;
const TAYLOR_STEP: f64 = 2e-3;
const COMBINATORIAL_TOL: f64 = 1e-12;
const INCLUSION_EXCLUSION_TOL: f64 = 1e-12;
const GAUSS_TOL: f64 = 1e-10;
const L_CHI5_TOL: f64 = 1e-9;
const STENCIL_TOL: f64 = 1e-7;
const RESIDUE_TOL: f64 = 1e-7;
const D_RECONSTRUCTION_TOL: f64 = 1e-4;
const UPSILON_TOL: f64 = 1e-12;
const C_TERM_TOL: f64 = 1e-10;
const KS_LIMIT: f64 = 0.01;
const CHECK_RUNTIME: Duration = Duration::from_secs(60);

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        summary: summary.into(),
    }
}

fn place(p: u64) -> FinitePlace {
    FinitePlace::rational(p).unwrap()
}

fn rel(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

// mass of mu_p^eta from (1/2pi) int sqrt(4 - x^2)/(A - x) dx = (A - sqrt(A^2 - 4))/2
fn poisson_mass(p: u64, sign: i8) -> f64 {
    let q = p as f64;
    let a = q.sqrt() + 1.0 / q.sqrt();
    let r = (a * a - 4.0).sqrt();
    if sign == 1 {
        (q - 1.0) * 0.5 * (a / r - 1.0)
    } else {
        (q + 1.0) * 0.5 * (a - r) / a
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let st = Density::SatoTate.integrate(-2.0, 2.0, 1e-12).unwrap();
    let st_err = (st.value - 1.0).abs();
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for p in [2u64, 3, 5, 7, 11] {
        for sign in [1i8, -1] {
            let r = Density::plancherel(p, sign).unwrap().integrate(-2.0, 2.0, 1e-12).unwrap();
            worst = worst.max((r.value - 1.0).abs());
            oracle = oracle.max((poisson_mass(p, sign) - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        st_err <= MASS_ST_TOL && worst <= MASS_PLANCHEREL_TOL && oracle <= MASS_PLANCHEREL_TOL && elapsed < MASS_RUNTIME,
        format!(
            "measure masses: |mu_ST - 1| = {st_err:.1e}, max |mu_p^eta - 1| = {worst:.1e}, Poisson oracle {oracle:.1e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ratio_dev: f64 = 0.0;
    for q in [2u64, 3, 5] {
        for sign in [1i8, -1] {
            worst = worst.max(pushforward_check(q, sign, 1000).unwrap());
            ratio_dev = ratio_dev.max((double_cover_ratio(q, sign, 1e-12).unwrap() - 2.0).abs());
        }
    }
    outcome(
        worst <= PUSHFORWARD_TOL && ratio_dev <= DOUBLE_COVER_TOL,
        format!("change of variables: max discrepancy {worst:.1e}, double cover |ratio - 2| = {ratio_dev:.1e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=2990 {
        let y = 0.1 + i as f64 * 0.01;
        // |Gamma(iy/2)|^2 = 2 pi/(y sinh(pi y/2))
        let closed = y * (PI * y / 2.0).sinh() / (2.0 * PI);
        worst = worst.max(rel(abs_gamma_iy_sq_inv_lanczos(y), closed, 0.0));
    }
    let d1 = (digamma_real(1.0).unwrap() + EULER_GAMMA).abs();
    let dh = (digamma_real(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs();
    outcome(
        worst <= GAMMA_TOL && d1 <= DIGAMMA_TOL && dh <= DIGAMMA_TOL,
        format!("gamma machinery: |Gamma(iy/2)|^-2 rel err {worst:.1e}, psi(1) {d1:.1e}, psi(1/2) {dh:.1e}"),
    )
}

fn fd1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn fd2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

fn richardson(d: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn criterion_4() -> Outcome {
    let mut first: f64 = 0.0;
    let mut second: f64 = 0.0;
    for q in [2u64, 3, 5, 7] {
        for k in 1..=5 {
            for sign in [1i8, -1] {
                let b = YBuildingBlock::new(q, k, sign).unwrap();
                let f = |nu: f64| b.y_real(nu).unwrap();
                first = first.max(rel(b.y_prime(), fd1(&f, -1.0, FD_STEP), 0.0));
                second = second.max(rel(b.y_second(), fd2(&f, -1.0, FD_STEP), 0.0));
            }
            let b = BBlock { q, k };
            let f = |z: f64| b.b(z);
            first = first.max(rel(b.b_prime(), fd1(&f, 0.0, FD_STEP), 0.0));
            second = second.max(rel(b.b_second(), fd2(&f, 0.0, FD_STEP), 0.0));
        }
    }
    let prof = FieldProfile::rational();
    let mut taylor: f64 = 0.0;
    let mut count = 0;
    let n = LevelIdeal::from_integer(8 * 9 * 49).unwrap();
    for mask in 0..8u32 {
        let signs = [2u64, 3, 7]
            .iter()
            .enumerate()
            .map(|(i, &p)| (place(p), if mask & (1 << i) != 0 { -1 } else { 1 }))
            .collect();
        let eta = QuadraticCharacterProfile::explicit(LevelIdeal::unit(), signs).unwrap();
        for rho in enumerate_rho(&n).unwrap() {
            let blocks: Vec<YBuildingBlock> = rho
                .support()
                .into_iter()
                .map(|(p, k)| YBuildingBlock::new(p.q, k, eta.sign(&p).unwrap()).unwrap())
                .collect();
            let g = |nu: f64| blocks.iter().map(|b| b.y_real(nu).unwrap()).product::<f64>();
            let p1 = richardson(&|h| fd1(&g, -1.0, h), TAYLOR_STEP);
            let p2 = 0.5 * richardson(&|h| fd2(&g, -1.0, h), TAYLOR_STEP);
            let pc = p_coeffs(&rho, &eta, &prof).unwrap();
            taylor = taylor
                .max(rel(pc.p0, g(-1.0), 1e-3))
                .max(rel(pc.p1, p1, 1e-3))
                .max(rel(pc.p2, p2, 1e-3));
            count += 1;
        }
    }
    outcome(
        first <= FIRST_DERIVATIVE_TOL && second <= SECOND_DERIVATIVE_TOL && taylor <= TAYLOR_TOL,
        format!(
            "derivative suite: first {first:.1e}, second {second:.1e}, p0/p1/p2 vs Taylor {taylor:.1e} over {count} (rho, eta)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let places = rng.random_range(1..=4usize);
        let tables: Vec<Vec<f64>> = (0..places)
            .map(|_| (0..=rng.random_range(0..=4usize)).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let mut total = 0.0;
        let count: usize = tables.iter().map(|t| t.len()).product();
        for mut code in 0..count {
            let mut term = 1.0;
            for t in &tables {
                term *= t[code % t.len()];
                code /= t.len();
            }
            total += term;
        }
        let product: f64 = tables.iter().map(|t| t.iter().sum::<f64>()).product();
        worst = worst.max((total - product).abs());
    }
    let mut negative = 0;
    let mut odd_bad = 0;
    let mut w_dev: f64 = 0.0;
    let trivial = QuadraticCharacterProfile::trivial();
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
        let mut reps = Vec::new();
        for i in 0..=20 {
            reps.push(LocalRepresentation::tempered(place(q), PI * i as f64 / 20.0).unwrap());
        }
        for i in 1..20 {
            reps.push(LocalRepresentation::complementary(place(q), i as f64 / 20.0).unwrap());
        }
        reps.push(LocalRepresentation::special(place(q), 1).unwrap());
        reps.push(LocalRepresentation::special(place(q), -1).unwrap());
        for c in 2..=5 {
            reps.push(LocalRepresentation::higher(place(q), c).unwrap());
        }
        for rep in &reps {
            for k in 0..=8 {
                for eta in [1i8, -1] {
                    let r = r_weight(rep, eta, k).unwrap();
                    negative += (r < 0.0) as usize;
                    if rep.conductor_exponent() >= 2 && eta == -1 && k >= 1 {
                        odd_bad += ((r == 0.0) != (k % 2 == 1)) as usize;
                    }
                }
            }
            let f = LevelIdeal::prime_power(&place(q), rep.conductor_exponent());
            w_dev = w_dev.max((w_global(std::slice::from_ref(rep), &trivial, &f, &f).unwrap() - 1.0).abs());
        }
    }
    outcome(
        worst <= COMBINATORIAL_TOL && negative == 0 && odd_bad == 0 && w_dev == 0.0,
        format!(
            "weight combinatorics: choice sum {worst:.1e}, negative r {negative}, odd-k violations {odd_bad}, |w(f_pi) - 1| {w_dev:.1e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let primes = [2u64, 3, 5, 7, 11];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for mask in 1u32..32 {
        let chosen: Vec<u64> = (0..5).filter(|i| mask & (1 << i) != 0).map(|i| primes[i]).collect();
        if chosen.len() > 3 {
            continue;
        }
        for code in 0..4u32.pow(chosen.len() as u32) {
            let exps: Vec<u32> = (0..chosen.len()).map(|i| (code / 4u32.pow(i as u32)) % 4 + 1).collect();
            let n = LevelIdeal::from_pairs(chosen.iter().zip(&exps).map(|(&p, &e)| (place(p), e))).unwrap();
            // 1 + sum_j (-1)^j sum_{i_1 < ... < i_j} prod (1 - 1/q)^{-[a = 2]} / prod q^2
            let high: Vec<(f64, u32)> =
                chosen.iter().zip(&exps).filter(|(_, &e)| e >= 2).map(|(&p, &e)| (p as f64, e)).collect();
            let mut total = 0.0;
            for sub in 0u32..(1 << high.len()) {
                let mut term = 1.0;
                for (i, &(q, e)) in high.iter().enumerate() {
                    if sub & (1 << i) != 0 {
                        term *= -1.0 / (q * q) / if e == 2 { 1.0 - 1.0 / q } else { 1.0 };
                    }
                }
                total += term;
            }
            worst = worst.max((total - c_level(&n)).abs());
            cases += 1;
        }
    }
    outcome(
        worst <= INCLUSION_EXCLUSION_TOL,
        format!("inclusion-exclusion: max |sum - C(n)| = {worst:.1e} over {cases} levels"),
    )
}

fn criterion_7() -> Outcome {
    let mut gauss: f64 = 0.0;
    for m in 1..=500u64 {
        for chi in CharacterGroup::new(m).unwrap().characters() {
            if !chi.is_primitive() {
                continue;
            }
            let mut tau = Complex64::new(0.0, 0.0);
            for a in 0..m {
                tau += chi.value(a as i64) * Complex64::from_polar(1.0, 2.0 * PI * a as f64 / m as f64);
            }
            gauss = gauss.max((tau.norm() - (m as f64).sqrt()).abs());
        }
    }
    let mut xi_bad = 0;
    let mut x_bound: f64 = 0.0;
    for n in 1..=200u64 {
        let id = LevelIdeal::from_integer(n).unwrap();
        let mut fast: Vec<(u64, Vec<Option<u64>>)> =
            enumerate_xi(&id).unwrap().iter().map(|c| (c.modulus(), brute::value_table(c))).collect();
        let mut slow = brute::xi(n);
        fast.sort();
        slow.sort();
        xi_bad += (fast != slow) as usize;
        let squares = (1..=n).filter(|c| n % (c * c) == 0).count() as f64;
        x_bound = x_bound.max(fast.len() as f64 / ((n as f64).sqrt() * squares));
    }
    let exact = 2.0 / 5f64.sqrt() * ((1.0 + 5f64.sqrt()) / 2.0).ln();
    let l5 = (l_one(&quadratic_character(5).unwrap()).unwrap().re - exact).abs();
    outcome(
        gauss <= GAUSS_TOL && xi_bad == 0 && x_bound <= 1.0 && l5 <= L_CHI5_TOL,
        format!(
            "characters: ||tau| - sqrt m| {gauss:.1e}, Xi mismatches {xi_bad}, max X(n)/bound {x_bound:.3}, L(1, chi_5) {l5:.1e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let prof = FieldProfile::rational();
    let trivial = QuadraticCharacterProfile::trivial();
    let mut spread: f64 = laurent_spread(&trivial, &prof).unwrap().into_iter().fold(0.0, f64::max);
    for m in [5u64, 8, 13] {
        let eta = QuadraticCharacterProfile::from_dirichlet(quadratic_character(m).unwrap()).unwrap();
        spread = laurent_spread(&eta, &prof).unwrap().into_iter().fold(spread, f64::max);
    }
    let residue = (laurent_at_1(&trivial, &prof).unwrap().r - 1.0).abs();
    let d = d_coeffs(&trivial, &prof).unwrap();
    let nu = -1.0 + 0.01;
    let recon = rel(d.reconstruct(nu), d_function(&trivial, &prof, nu).unwrap(), 0.0);
    let mut polar: f64 = 0.0;
    for m in [5u64, 8, 13] {
        let eta = QuadraticCharacterProfile::from_dirichlet(quadratic_character(m).unwrap()).unwrap();
        let d = d_coeffs(&eta, &prof).unwrap();
        polar = polar.max(d.d_minus2.abs()).max(d.d_minus1.abs());
    }
    outcome(
        spread <= STENCIL_TOL && residue <= RESIDUE_TOL && recon <= D_RECONSTRUCTION_TOL && polar <= STENCIL_TOL,
        format!(
            "Laurent extraction: stencil spread {spread:.1e}, |R - 1| {residue:.1e}, D reconstruction rel err {recon:.1e}, polar part for nontrivial eta {polar:.1e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let prof = FieldProfile::rational();
    let ups = (upsilon_archimedean(Complex64::new(1.0, 0.0)).unwrap() + PI / 8.0).norm();
    let places = [SPlace::archimedean(), SPlace::finite(3, -1)];
    let grid = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.5, 0.0),
        Complex64::new(0.5, 3.0),
        Complex64::new(7.0, -1.5),
    ];
    let mut constancy: f64 = 0.0;
    for m in [5u64, 8, 13] {
        let chi = quadratic_character(m).unwrap();
        let eta = QuadraticCharacterProfile::from_dirichlet(chi.clone()).unwrap();
        let l = laurent_at_1(&eta, &prof).unwrap();
        let target = l_one_completed(&chi).unwrap().re;
        for a in [1u64, 4, 49, 1001] {
            let a = LevelIdeal::from_integer(a).unwrap();
            for s in grid {
                let v = geometric_c_term(&places, &[s, s], &a, &l, &prof).unwrap();
                constancy = constancy.max((v - target).norm());
            }
        }
    }
    let z = laurent_at_1(&QuadraticCharacterProfile::trivial(), &prof).unwrap();
    let mut half_shift: f64 = 0.0;
    let mut full_shift: f64 = 0.0;
    for n in [2u64, 49, 1001, 720_720] {
        let n = LevelIdeal::from_integer(n).unwrap();
        for s in grid {
            let s = [s, s + 1.0];
            let o = geometric_c_term(&places, &s, &LevelIdeal::unit(), &z, &prof).unwrap();
            let at_n = geometric_c_term(&places, &s, &n, &z, &prof).unwrap();
            let comb = geometric_c_combined(&places, &s, &n, &z, &prof).unwrap();
            half_shift = half_shift.max((comb - o - 0.5 * z.r * n.log_norm()).norm());
            full_shift = full_shift.max((at_n - o - z.r * n.log_norm()).norm());
        }
    }
    outcome(
        ups <= UPSILON_TOL && constancy <= C_TERM_TOL && half_shift <= C_TERM_TOL && full_shift <= C_TERM_TOL,
        format!(
            "geometric kernels: Upsilon(1) + pi/8 = {ups:.1e}, nontrivial C term vs L(1, eta) {constancy:.1e}, combined shift vs R log N/2 {half_shift:.1e}, single-ideal shift vs R log N {full_shift:.1e}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_rtflab");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mu2plus.csv");
    let cdf = TabulatedCdf::new(Density::plancherel(2, 1).unwrap(), DEFAULT_CELLS).unwrap();
    let xs = cdf.sample(100_000, 20_240_601).unwrap();
    let sample = EmpiricalSample::from_rows(
        xs.into_iter()
            .map(|x| SampleRow {
                level_norm: 1,
                place_q: 2,
                x,
                weight: 1.0,
            })
            .collect(),
    );
    sample.write_csv(std::fs::File::create(&path).unwrap()).unwrap();
    let out = Command::new(bin)
        .args(["compare", "--measure", "mu_p_eta", "--q", "2", "--sign", "1", "--sample"])
        .arg(&path)
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    let ks = report["ks"].as_f64().unwrap_or(f64::INFINITY);
    let rows = report["rows"].as_u64().unwrap_or(0);

    let start = Instant::now();
    let check = Command::new(bin).arg("check").output().unwrap();
    let elapsed = start.elapsed();
    outcome(
        out.status.success() && rows == 100_000 && ks < KS_LIMIT && check.status.success() && elapsed < CHECK_RUNTIME,
        format!(
            "distribution comparison: KS {ks:.4} on {rows} samples, check exit {:?} in {:.1} s",
            check.status.code(),
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let o = std::panic::catch_unwind(c).unwrap_or_else(|_| outcome(false, "panicked"));
        println!("criterion {}: {} {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.summary);
        failed += (!o.pass) as usize;
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
