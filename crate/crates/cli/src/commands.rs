use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use rtflab_core::characters::{enumerate_xi, l_one, CharacterGroup};
use rtflab_core::checks::{run_all, CheckConfig};
use rtflab_core::empirical::compare;
use rtflab_core::local_factors::{q_k, r_weight};
use rtflab_core::rtf_constants::{
    c_eta_big, c_level, geometric_c_combined, geometric_c_term, upsilon, y_values_with, YContext, SPlace,
    DEFAULT_RHO_CAP,
};
use rtflab_core::spectral_measures::DEFAULT_CELLS;
use rtflab_core::{
    characters::quadratic_character, Density, DirichletCharacter, EmpiricalSample, FieldProfile, FinitePlace,
    LevelIdeal, LocalRepresentation, QuadraticCharacterProfile, SpectralPlace, TabulatedCdf,
};

use crate::{Cli, Command, Failure, Format, MeasureArgs, MeasureKind};

const DEFAULT_TOL: f64 = 1e-12;

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(cli: &Cli, text: &str) -> Outcome<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn tolerance(cli: &Cli) -> Outcome<f64> {
    match cli.tol {
        Some(t) if !(t > 0.0) => Err(usage(format!("--tol must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(DEFAULT_TOL),
    }
}

fn json_only(cli: &Cli, what: &str) -> Outcome<()> {
    if cli.format == Some(Format::Csv) {
        return Err(usage(format!("{what} has no CSV output; use --format json")));
    }
    Ok(())
}

fn density(m: &MeasureArgs) -> Outcome<Density> {
    Ok(match m.measure {
        MeasureKind::MuSt => Density::SatoTate,
        MeasureKind::MuPEta => {
            let q = m.q.ok_or_else(|| usage("mu_p_eta needs --q"))?;
            Density::plancherel(q, m.sign)?
        }
        MeasureKind::LambdaV => {
            let place = match m.q {
                None | Some(0) => SpectralPlace::Archimedean,
                Some(q) => SpectralPlace::Finite { q },
            };
            Density::lambda(place, m.sign)?
        }
    })
}

fn parse_complex(tok: &str) -> Outcome<Complex64> {
    let t = tok.trim().replace(' ', "");
    let bad = || usage(format!("cannot read {tok:?} as a complex number"));
    if let Some(body) = t.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .last();
        return match split {
            Some(i) => {
                let re = body[..i].parse::<f64>().map_err(|_| bad())?;
                let im_txt = &body[i..];
                let im = match im_txt {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().map_err(|_| bad())?,
                };
                Ok(Complex64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().map_err(|_| bad())?,
                };
                Ok(Complex64::new(0.0, im))
            }
        };
    }
    Ok(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0))
}

fn parse_eta(spec: &str) -> Outcome<QuadraticCharacterProfile> {
    match spec.trim() {
        "trivial" | "1" => Ok(QuadraticCharacterProfile::trivial()),
        s => {
            let m: u64 = s
                .parse()
                .map_err(|_| usage(format!("eta must be 'trivial' or a conductor, got {s:?}")))?;
            Ok(QuadraticCharacterProfile::from_dirichlet(quadratic_character(m)?)?)
        }
    }
}

fn parse_rep(spec: &str, place: FinitePlace) -> Outcome<LocalRepresentation> {
    let spec = spec.trim();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| usage(format!("bad number in {spec:?}")));
    if let Some(c) = spec.strip_prefix('c').filter(|_| !spec.contains(':')) {
        let c: u32 = c.parse().map_err(|_| usage(format!("bad conductor exponent in {spec:?}")))?;
        return Ok(LocalRepresentation::higher(place, c)?);
    }
    let (kind, arg) = spec.split_once(':').ok_or_else(|| usage(format!("unknown representation {spec:?}")))?;
    Ok(match kind {
        "special" => LocalRepresentation::special(place, num(arg)? as i8)?,
        "tempered" => LocalRepresentation::tempered(place, num(arg)?)?,
        "complementary" => LocalRepresentation::complementary(place, num(arg)?)?,
        _ => return Err(usage(format!("unknown representation {spec:?}"))),
    })
}

fn profile(cli: &Cli) -> Outcome<FieldProfile> {
    match &cli.profile {
        Some(path) => FieldProfile::load(path).map_err(|e| usage(e.to_string())),
        None => Ok(FieldProfile::rational()),
    }
}

fn rational_place(profile: &FieldProfile, q: u64) -> Outcome<FinitePlace> {
    if profile.is_rational() {
        Ok(FinitePlace::rational(q)?)
    } else {
        profile.place(&q.to_string()).map_err(|e| usage(e.to_string()))
    }
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let prof = profile(cli)?;
    match &cli.command {
        Command::Measure { m, points, ymax } => run_measure(cli, m, *points, *ymax),
        Command::Mass { m, a, b } => run_mass(cli, m, *a, *b),
        Command::Weights { rep, q, sign, k } => run_weights(cli, &prof, rep, *q, *sign, *k),
        Command::Constants { n, eta, s, s_grid } => run_constants(cli, &prof, n, eta, s, s_grid),
        Command::Characters {
            modulus,
            xi,
            primitive_only,
        } => run_characters(cli, *modulus, *xi, *primitive_only),
        Command::Check => run_check(cli),
        Command::Compare { sample, m, intervals } => run_compare(cli, sample, m, intervals),
    }
}

fn run_measure(cli: &Cli, m: &MeasureArgs, points: usize, ymax: f64) -> Outcome<()> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let d = density(m)?;
    let (lo, hi) = d.domain();
    let hi = if hi.is_finite() { hi } else { ymax };
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        rows.push((x, d.eval(x)?));
    }
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(x, v)| {
                    vec![x.to_string(), v.to_string(), d.tag().to_string(), d.place_q().to_string(), d.sign().to_string()]
                })
                .collect();
            csv_text(&["x_or_y", "density", "measure_tag", "place_q", "sign"], &body)
        }
        Format::Json => to_json(
            &rows
                .iter()
                .map(|&(x, v)| json!({"x_or_y": x, "density": v, "measure_tag": d.tag(), "place_q": d.place_q(), "sign": d.sign()}))
                .collect::<Vec<_>>(),
        ),
    };
    emit(cli, &text)
}

fn run_mass(cli: &Cli, m: &MeasureArgs, a: Option<f64>, b: Option<f64>) -> Outcome<()> {
    json_only(cli, "mass")?;
    let d = density(m)?;
    let tol = tolerance(cli)?;
    let (lo, hi) = d.domain();
    let (a, b) = (a.unwrap_or(lo), b.unwrap_or(hi));
    if !b.is_finite() {
        return Err(usage("the real place needs a finite --b"));
    }
    let r = d.integrate(a, b, tol)?;
    emit(cli, &to_json(&r))
}

fn run_weights(cli: &Cli, prof: &FieldProfile, rep: &str, q: u64, sign: i8, k: Option<u32>) -> Outcome<()> {
    let place = rational_place(prof, q)?;
    let pi = parse_rep(rep, place)?;
    let ks: Vec<u32> = match k {
        Some(k) => vec![k],
        None => (0..=8).collect(),
    };
    let mut rows = Vec::new();
    for k in ks {
        rows.push((k, r_weight(&pi, sign, k)?, q_k(&pi, sign, k)?));
    }
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(k, r, qk)| vec![k.to_string(), r.to_string(), qk.re.to_string(), qk.im.to_string()])
                .collect();
            csv_text(&["k", "r", "Q_k_re", "Q_k_im"], &body)
        }
        Format::Json => to_json(&json!({
            "rep": rep,
            "q": q,
            "sign": sign,
            "rows": rows.iter().map(|(k, r, qk)| json!({"k": k, "r": r, "Q_k": complex_json(*qk)})).collect::<Vec<_>>(),
        })),
    };
    emit(cli, &text)
}

fn run_constants(cli: &Cli, prof: &FieldProfile, n: &str, eta: &str, s: &str, s_grid: &str) -> Outcome<()> {
    json_only(cli, "constants")?;
    let n = prof.parse_level(n).map_err(|e| usage(e.to_string()))?;
    let eta = parse_eta(eta)?;
    let places: Vec<SPlace> = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| match t.trim() {
            "inf" => Ok(SPlace::archimedean()),
            q => {
                let q: u64 = q.parse().map_err(|_| usage(format!("bad place {q:?} in --s")))?;
                let p = rational_place(prof, q)?;
                if n.exponent(&p) > 0 {
                    return Err(usage(format!("place {q} of S divides n")));
                }
                Ok(SPlace::finite(q, eta.sign(&p)?))
            }
        })
        .collect::<Outcome<_>>()?;
    let grid: Vec<Complex64> = s_grid.split(',').map(parse_complex).collect::<Outcome<_>>()?;

    let ctx = YContext::new(&eta, prof)?;
    let y = y_values_with(&n, &eta, prof, &ctx, DEFAULT_RHO_CAP)?;
    let mut ups = Vec::new();
    let mut cts = Vec::new();
    for &sv in &grid {
        let sv_all = vec![sv; places.len()];
        ups.push(json!({"s": complex_json(sv), "value": complex_json(upsilon(&places, &sv_all)?)}));
        let at_n = geometric_c_term(&places, &sv_all, &n, &ctx.eta, prof)?;
        let comb = geometric_c_combined(&places, &sv_all, &n, &ctx.eta, prof)?;
        cts.push(json!({"s": complex_json(sv), "value": complex_json(at_n), "combined": complex_json(comb)}));
    }
    let out = json!({
        "n": n.to_string(),
        "log_norm": n.log_norm(),
        "eta_conductor": eta.conductor().to_string(),
        "C_level": c_level(&n),
        "C_eta_big": c_eta_big(&n, prof, &ctx.eta),
        "laurent": ctx.eta,
        "D": ctx.d,
        "Y": y,
        "upsilon_samples": ups,
        "C_term_samples": cts,
    });
    emit(cli, &to_json(&out))
}

fn character_row(chi: &DirichletCharacter) -> Outcome<Value> {
    let primitive = chi.is_primitive();
    let l1 = if primitive && !chi.is_trivial() { Some(complex_json(l_one(chi)?)) } else { None };
    Ok(json!({
        "modulus": chi.modulus(),
        "exponents": chi.exponents(),
        "order": chi.order(),
        "conductor": chi.conductor(),
        "parity": chi.parity(),
        "primitive": primitive,
        "gauss_sum_abs": chi.gauss_sum()?.norm(),
        "L1": l1,
    }))
}

fn run_characters(cli: &Cli, modulus: Option<u64>, xi: Option<u64>, primitive_only: bool) -> Outcome<()> {
    let chars: Vec<DirichletCharacter> = match (modulus, xi) {
        (Some(m), None) => CharacterGroup::new(m)?
            .characters()
            .into_iter()
            .filter(|c| !primitive_only || c.is_primitive())
            .collect(),
        (None, Some(n)) => enumerate_xi(&LevelIdeal::from_integer(n)?)?,
        _ => return Err(usage("characters needs exactly one of --modulus, --xi")),
    };
    let rows: Vec<Value> = chars.iter().map(character_row).collect::<Outcome<_>>()?;
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&json!({"count": rows.len(), "characters": rows})),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let exps: Vec<String> = r["exponents"]
                        .as_array()
                        .expect("array")
                        .iter()
                        .map(|e| e.to_string())
                        .collect();
                    vec![
                        r["modulus"].to_string(),
                        exps.join(" "),
                        r["order"].to_string(),
                        r["conductor"].to_string(),
                        r["parity"].to_string(),
                        r["primitive"].to_string(),
                        r["gauss_sum_abs"].to_string(),
                    ]
                })
                .collect();
            csv_text(&["modulus", "exponents", "order", "conductor", "parity", "primitive", "gauss_sum_abs"], &body)
        }
    };
    emit(cli, &text)
}

fn run_check(cli: &Cli) -> Outcome<()> {
    json_only(cli, "check")?;
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(usage(format!("--tol must be positive, got {t}")));
        }
    }
    let report = run_all(&CheckConfig { quadrature_tol: cli.tol });
    emit(cli, &to_json(&report))?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failures()
            .map(|c| format!("{} (observed {:e}, tolerance {:e})", c.check, c.observed, c.tolerance))
            .collect();
        Err(Failure::Check(names.join("; ")))
    }
}

fn run_compare(cli: &Cli, sample: &std::path::Path, m: &MeasureArgs, intervals: &[String]) -> Outcome<()> {
    json_only(cli, "compare")?;
    let d = density(m)?;
    let sample = EmpiricalSample::read_path(sample).map_err(|e| usage(e.to_string()))?;
    if sample.rows.is_empty() {
        return Err(usage(format!("sample has no admissible rows ({} rejected)", sample.rejected)));
    }
    let ivs: Vec<(f64, f64)> = intervals
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("interval {s:?} is not a:b")))?;
            let a = a.trim().parse::<f64>().map_err(|_| usage(format!("bad interval {s:?}")))?;
            let b = b.trim().parse::<f64>().map_err(|_| usage(format!("bad interval {s:?}")))?;
            Ok((a, b))
        })
        .collect::<Outcome<_>>()?;
    let cdf = TabulatedCdf::new(d, DEFAULT_CELLS)?;
    let report = compare(&sample, &cdf, &ivs)?;
    emit(cli, &to_json(&report))
}
