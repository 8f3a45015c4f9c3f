//! Empirical eigenvalue samples: CSV ingest and comparison against the
//! theoretical distribution functions.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::{Result, RtfError};
use crate::numeric::sum::pairwise_sum;
use crate::spectral_measures::TabulatedCdf;

pub const HEADER: [&str; 4] = ["level_norm", "place_q", "x", "weight"];

/// One observation. place_q = 0 marks an archimedean spectral value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub level_norm: u64,
    pub place_q: u64,
    pub x: f64,
    pub weight: f64,
}

impl SampleRow {
    fn is_admissible(&self) -> bool {
        let x_ok = if self.place_q == 0 {
            self.x.is_finite() && self.x >= 0.0
        } else {
            (-2.0..=2.0).contains(&self.x)
        };
        x_ok && self.level_norm >= 1 && self.weight.is_finite() && self.weight >= 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EmpiricalSample {
    pub rows: Vec<SampleRow>,
    pub rejected: usize,
}

impl EmpiricalSample {
    pub fn from_rows(rows: Vec<SampleRow>) -> Self {
        EmpiricalSample { rows, rejected: 0 }
    }

    /// Reads the mandatory header and keeps admissible rows; unparseable or
    /// out-of-domain rows are counted in `rejected`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| RtfError::parse(format!("CSV header: {e}")))?;
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(RtfError::parse(format!(
                "CSV header must be {}, found {}",
                HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut sample = EmpiricalSample::default();
        for record in rdr.deserialize::<SampleRow>() {
            match record {
                Ok(row) if row.is_admissible() => sample.rows.push(row),
                _ => sample.rejected += 1,
            }
        }
        Ok(sample)
    }

    pub fn read_path(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| RtfError::parse(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let err = |e: csv::Error| RtfError::invalid(format!("CSV write: {e}"));
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        w.write_record(HEADER).map_err(err)?;
        for row in &self.rows {
            w.serialize(row).map_err(err)?;
        }
        w.flush().map_err(|e| RtfError::invalid(format!("CSV write: {e}")))?;
        Ok(())
    }

    pub fn total_weight(&self) -> f64 {
        let w: Vec<f64> = self.rows.iter().map(|r| r.weight).collect();
        pairwise_sum(&w)
    }

    /// The common place_q of all rows.
    pub fn place_q(&self) -> Result<u64> {
        let first = self.rows.first().ok_or_else(|| RtfError::invalid("empty sample"))?.place_q;
        if let Some(r) = self.rows.iter().find(|r| r.place_q != first) {
            return Err(RtfError::invalid(format!(
                "sample mixes place_q = {first} and place_q = {}",
                r.place_q
            )));
        }
        Ok(first)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalReport {
    pub a: f64,
    pub b: f64,
    pub empirical: f64,
    pub theoretical: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub measure: String,
    pub place_q: u64,
    pub sign: i8,
    pub rows: usize,
    pub rejected: usize,
    pub total_weight: f64,
    pub theoretical_mass: f64,
    pub ks: f64,
    pub intervals: Vec<IntervalReport>,
}

/// Weighted empirical distribution function, as sorted atoms with
/// cumulative normalized weight.
struct Atoms {
    x: Vec<f64>,
    cum: Vec<f64>,
}

impl Atoms {
    fn new(sample: &EmpiricalSample) -> Result<Self> {
        let total = sample.total_weight();
        if !(total > 0.0) {
            return Err(RtfError::invalid("sample has no positive weight"));
        }
        let mut pts: Vec<(f64, f64)> = sample.rows.iter().map(|r| (r.x, r.weight)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut x = Vec::new();
        let mut w = Vec::new();
        for (xi, wi) in pts {
            if x.last() == Some(&xi) {
                *w.last_mut().expect("paired") += wi;
            } else {
                x.push(xi);
                w.push(wi);
            }
        }
        let mut cum = Vec::with_capacity(w.len());
        let mut acc = 0.0;
        let mut comp = 0.0;
        for wi in w {
            let y = wi / total - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            cum.push(acc.min(1.0));
        }
        Ok(Atoms { x, cum })
    }

    /// Mass of atoms in (-inf, x].
    fn at_or_below(&self, x: f64) -> f64 {
        let k = self.x.partition_point(|&a| a <= x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    fn strictly_below(&self, x: f64) -> f64 {
        let k = self.x.partition_point(|&a| a < x);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }
}

/// sup_x |F_emp(x) - F(x)| for a continuous F, attained at the jumps.
pub fn ks_distance(sample: &EmpiricalSample, cdf: &TabulatedCdf) -> Result<f64> {
    let atoms = Atoms::new(sample)?;
    let mut sup: f64 = 0.0;
    let mut before = 0.0;
    for (i, &x) in atoms.x.iter().enumerate() {
        let f = cdf.cdf(x);
        sup = sup.max((f - before).abs()).max((atoms.cum[i] - f).abs());
        before = atoms.cum[i];
    }
    Ok(sup)
}

/// Empirical and theoretical probability of [a, b]; an empty interval has
/// mass zero on both sides.
pub fn interval_discrepancy(sample: &EmpiricalSample, cdf: &TabulatedCdf, a: f64, b: f64) -> Result<IntervalReport> {
    if !(a < b) {
        return Ok(IntervalReport {
            a,
            b,
            empirical: 0.0,
            theoretical: 0.0,
            discrepancy: 0.0,
        });
    }
    let atoms = Atoms::new(sample)?;
    let empirical = atoms.at_or_below(b) - atoms.strictly_below(a);
    let theoretical = cdf.cdf(b) - cdf.cdf(a);
    Ok(IntervalReport {
        a,
        b,
        empirical,
        theoretical,
        discrepancy: (empirical - theoretical).abs(),
    })
}

pub fn compare(sample: &EmpiricalSample, cdf: &TabulatedCdf, intervals: &[(f64, f64)]) -> Result<ComparisonReport> {
    let density = cdf.density();
    let place_q = sample.place_q()?;
    if density.place_q() != 0 && density.place_q() != place_q {
        return Err(RtfError::invalid(format!(
            "sample is at place_q = {place_q} but the measure lives at q = {}",
            density.place_q()
        )));
    }
    Ok(ComparisonReport {
        measure: density.tag().to_string(),
        place_q,
        sign: density.sign(),
        rows: sample.rows.len(),
        rejected: sample.rejected,
        total_weight: sample.total_weight(),
        theoretical_mass: cdf.total(),
        ks: ks_distance(sample, cdf)?,
        intervals: intervals
            .iter()
            .map(|&(a, b)| interval_discrepancy(sample, cdf, a, b))
            .collect::<Result<_>>()?,
    })
}
