//! Synthetic data for the quasi-likelihood experiments.
//!
//! Each purpose draws from its own ChaCha20 stream keyed by the dataset seed:
//! stream 0 for `θ*`, 1 for the design, 2 for the errors and 3 for the starting
//! points. Changing `num_starts` therefore leaves `X`, `y` and `θ*` untouched.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{logistic, QLProblem, QuadratureConfig, Variance};
use crate::error::{Error, Result};
use crate::linalg::dot;

const STREAM_THETA: u64 = 0;
const STREAM_DESIGN: u64 = 1;
const STREAM_ERRORS: u64 = 2;
const STREAM_STARTS: u64 = 3;

/// Half-width of the box the starting points are drawn from.
pub const START_BOX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub n: usize,
    pub m: usize,
    pub variance: Variance,
    pub seed: u64,
    pub num_starts: usize,
}

impl DatasetSpec {
    pub fn new(n: usize, m: usize, variance: Variance, seed: u64) -> Self {
        Self {
            n,
            m,
            variance,
            seed,
            num_starts: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!(
                    "need at least 2 columns to normalize by sqrt(n - 1), got {}",
                    self.n
                ),
            });
        }
        if self.m == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "need at least one observation".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub m: usize,
    /// Row-major `m × n` design with a unit first column.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub theta_star: Vec<f64>,
    pub starts: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn problem(&self, variance: Variance, quadrature: QuadratureConfig) -> Result<QLProblem> {
        QLProblem::new(self.x.clone(), self.y.clone(), self.n, variance, quadrature)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Design rows before normalization and the intercept overwrite.
pub fn raw_design(spec: &DatasetSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut rng = stream(spec.seed, STREAM_DESIGN);
    Ok((0..spec.m * spec.n)
        .map(|_| rng.sample(StandardNormal))
        .collect())
}

/// Arcsine(0, 1) by inverse CDF, standardized to mean 0 and variance 1.
pub fn arcsine_error<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let s = (0.5 * PI * u).sin();
    (s * s - 0.5) / 0.125f64.sqrt()
}

pub fn generate_dataset(spec: &DatasetSpec) -> Result<Dataset> {
    spec.validate()?;
    let (n, m) = (spec.n, spec.m);

    let mut rng = stream(spec.seed, STREAM_THETA);
    let centre: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let theta_star: Vec<f64> = centre
        .iter()
        .map(|c| c + rng.sample::<f64, _>(StandardNormal))
        .collect();

    let scale = ((n - 1) as f64).sqrt();
    let mut x = raw_design(spec)?;
    for row in x.chunks_exact_mut(n) {
        row.iter_mut().for_each(|v| *v /= scale);
        row[0] = 1.0;
    }

    let mut rng = stream(spec.seed, STREAM_ERRORS);
    let y = x
        .chunks_exact(n)
        .map(|row| {
            let mu = logistic(dot(row, &theta_star));
            mu + spec.variance.eval(mu).sqrt() * arcsine_error(&mut rng)
        })
        .collect();

    let mut rng = stream(spec.seed, STREAM_STARTS);
    let starts = (0..spec.num_starts)
        .map(|_| {
            (0..n)
                .map(|_| rng.random_range(-START_BOX..=START_BOX))
                .collect()
        })
        .collect();

    Ok(Dataset {
        n,
        m,
        x,
        y,
        theta_star,
        starts,
    })
}

/// Writes a dataset as long-format CSV with header `section,row,col,value`.
///
/// Sections are `x` (row, col), `y` (row, 0), `theta_star` (0, col) and
/// `start` (start index, col). Values use shortest round-trip formatting.
pub fn write_dataset_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["section", "row", "col", "value"])?;
    let mut put = |section: &str, r: usize, c: usize, v: f64| {
        w.write_record([section, &r.to_string(), &c.to_string(), &v.to_string()])
    };
    for (i, row) in data.x.chunks_exact(data.n).enumerate() {
        for (j, v) in row.iter().enumerate() {
            put("x", i, j, *v)?;
        }
    }
    for (i, v) in data.y.iter().enumerate() {
        put("y", i, 0, *v)?;
    }
    for (j, v) in data.theta_star.iter().enumerate() {
        put("theta_star", 0, j, *v)?;
    }
    for (s, start) in data.starts.iter().enumerate() {
        for (j, v) in start.iter().enumerate() {
            put("start", s, j, *v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(input: R) -> Result<Dataset> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["section", "row", "col", "value"] {
        return Err(Error::SchemaMismatch(format!(
            "unexpected dataset header {header:?}"
        )));
    }
    let mut cells: Vec<(String, usize, usize, f64)> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |what: &str| Error::SchemaMismatch(format!("bad {what} in record {rec:?}"));
        let r = field(1).parse().map_err(|_| bad("row"))?;
        let c = field(2).parse().map_err(|_| bad("col"))?;
        let v = field(3).parse().map_err(|_| bad("value"))?;
        cells.push((field(0).to_string(), r, c, v));
    }
    let extent = |section: &str| {
        cells
            .iter()
            .filter(|c| c.0 == section)
            .fold(None, |acc: Option<(usize, usize)>, c| {
                Some(acc.map_or((c.1 + 1, c.2 + 1), |(r, k)| {
                    (r.max(c.1 + 1), k.max(c.2 + 1))
                }))
            })
    };
    let (m, n) = extent("x").ok_or_else(|| Error::SchemaMismatch("no x section".into()))?;
    let num_starts = extent("start").map_or(0, |(s, _)| s);
    let mut data = Dataset {
        n,
        m,
        x: vec![f64::NAN; m * n],
        y: vec![f64::NAN; m],
        theta_star: vec![f64::NAN; n],
        starts: vec![vec![f64::NAN; n]; num_starts],
    };
    for (section, r, c, v) in cells {
        let slot = match section.as_str() {
            "x" if r < m && c < n => &mut data.x[r * n + c],
            "y" if r < m && c == 0 => &mut data.y[r],
            "theta_star" if r == 0 && c < n => &mut data.theta_star[c],
            "start" if c < n => &mut data.starts[r][c],
            _ => {
                return Err(Error::SchemaMismatch(format!(
                    "cell ({section}, {r}, {c}) outside the dataset shape"
                )))
            }
        };
        *slot = v;
    }
    Ok(data)
}
