//! Correlation between per-release SEM counts and external release metrics.
//!
//! Significance comes from a permutation test: exact enumeration of all
//! n! orderings for small samples, a seeded Monte Carlo estimate otherwise.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for counting a permuted coefficient as at least as extreme.
const TIE_EPS: f64 = 1e-12;

pub const DEFAULT_MAX_EXACT_N: usize = 9;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 0x5e4d_a0d1_7000_0001;

/// Centered copy of `v` and its sum of squared deviations.
fn centered(v: &[f64]) -> (Vec<f64>, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|a| a - mean).collect();
    let ss = c.iter().map(|a| a * a).sum();
    (c, ss)
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidSeries(format!(
            "length mismatch ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidSeries(format!(
            "need at least 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite value".into()));
    }
    Ok(())
}

struct Prepared {
    xc: Vec<f64>,
    yc: Vec<f64>,
    denom: f64,
}

fn prepare(x: &[f64], y: &[f64]) -> Result<Prepared> {
    check(x, y)?;
    let (xc, sx) = centered(x);
    let (yc, sy) = centered(y);
    if sx == 0.0 || sy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(Prepared {
        xc,
        yc,
        denom: (sx * sy).sqrt(),
    })
}

impl Prepared {
    fn r_with(&self, y: &[f64]) -> f64 {
        let dot: f64 = self.xc.iter().zip(y).map(|(a, b)| a * b).sum();
        (dot / self.denom).clamp(-1.0, 1.0)
    }
}

/// Pearson product-moment correlation coefficient.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    let p = prepare(x, y)?;
    Ok(p.r_with(&p.yc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PermutationMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationConfig {
    pub max_exact_n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for PermutationConfig {
    fn default() -> Self {
        PermutationConfig {
            max_exact_n: DEFAULT_MAX_EXACT_N,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermutationTest {
    pub p: f64,
    pub method: PermutationMethod,
    /// Orderings evaluated (n! when exact).
    pub permutations: u64,
}

/// Two-sided permutation p-value of the Pearson coefficient with default
/// Monte Carlo settings.
pub fn permutation_p(x: &[f64], y: &[f64], max_exact_n: usize) -> Result<PermutationTest> {
    permutation_p_with(
        x,
        y,
        &PermutationConfig {
            max_exact_n,
            ..PermutationConfig::default()
        },
    )
}

pub fn permutation_p_with(
    x: &[f64],
    y: &[f64],
    cfg: &PermutationConfig,
) -> Result<PermutationTest> {
    let prep = prepare(x, y)?;
    let observed = prep.r_with(&prep.yc).abs() - TIE_EPS;
    let n = x.len();
    if n <= cfg.max_exact_n {
        // Heap's algorithm visits every ordering exactly once.
        let mut perm = prep.yc.clone();
        let mut c = vec![0usize; n];
        let mut hits: u64 = u64::from(prep.r_with(&perm).abs() >= observed);
        let mut total: u64 = 1;
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                total += 1;
                if prep.r_with(&perm).abs() >= observed {
                    hits += 1;
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        return Ok(PermutationTest {
            p: hits as f64 / total as f64,
            method: PermutationMethod::Exact,
            permutations: total,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut perm = prep.yc.clone();
    let mut hits: u64 = 0;
    for _ in 0..cfg.samples {
        perm.shuffle(&mut rng);
        if prep.r_with(&perm).abs() >= observed {
            hits += 1;
        }
    }
    // the observed ordering is counted once so p is never zero
    Ok(PermutationTest {
        p: (hits + 1) as f64 / (cfg.samples as u64 + 1) as f64,
        method: PermutationMethod::MonteCarlo,
        permutations: cfg.samples as u64,
    })
}

/// One metric column aligned with SEM counts per version pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub metric: String,
    pub labels: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Parses a metrics CSV with header `pair,<metric>...,y`. The usual form
/// is `pair,x,y`; every column between `pair` and `y` becomes a series.
/// Row numbers in errors count the header as row 1.
pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = rdr.records();
    let header = match rows.next() {
        Some(h) => h?,
        None => {
            return Err(Error::MetricsCsv {
                row: 1,
                reason: "missing header".into(),
            })
        }
    };
    let cols: Vec<String> = header.iter().map(str::to_owned).collect();
    if cols.len() < 3 || cols[0] != "pair" || cols[cols.len() - 1] != "y" {
        return Err(Error::MetricsCsv {
            row: 1,
            reason: "header must be `pair,<metric>...,y`".into(),
        });
    }
    let metrics = &cols[1..cols.len() - 1];
    let mut series: Vec<MetricSeries> = metrics
        .iter()
        .map(|m| MetricSeries {
            metric: m.clone(),
            labels: Vec::new(),
            x: Vec::new(),
            y: Vec::new(),
        })
        .collect();
    let mut seen = HashSet::new();
    for (idx, rec) in rows.enumerate() {
        let row = idx + 2;
        let rec = rec.map_err(|e| Error::MetricsCsv {
            row,
            reason: e.to_string(),
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != cols.len() {
            return Err(Error::MetricsCsv {
                row,
                reason: format!("expected {} fields, found {}", cols.len(), rec.len()),
            });
        }
        let label = rec[0].to_owned();
        if label.is_empty() || !seen.insert(label.clone()) {
            return Err(Error::MetricsCsv {
                row,
                reason: format!("empty or duplicate pair label `{label}`"),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::MetricsCsv {
                    row,
                    reason: format!("`{s}` is not a number"),
                })
        };
        let y = num(&rec[cols.len() - 1])?;
        for (k, s) in series.iter_mut().enumerate() {
            s.labels.push(label.clone());
            s.x.push(num(&rec[k + 1])?);
            s.y.push(y);
        }
    }
    let n = series.first().map_or(0, |s| s.x.len());
    if n < 3 {
        return Err(Error::MetricsCsv {
            row: n + 1,
            reason: format!("need at least 3 rows, found {n}"),
        });
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsResult {
    pub metric: String,
    pub r: f64,
    pub p: f64,
    pub n: usize,
    pub method: PermutationMethod,
}

pub fn analyze(series: &MetricSeries, cfg: &PermutationConfig) -> Result<StatsResult> {
    let r = pearson_r(&series.x, &series.y)?;
    let t = permutation_p_with(&series.x, &series.y, cfg)?;
    Ok(StatsResult {
        metric: series.metric.clone(),
        r,
        p: t.p,
        n: series.x.len(),
        method: t.method,
    })
}

/// Whitespace-separated `pair metric... y` table for external plotting.
pub fn gnuplot_data(series: &[MetricSeries]) -> String {
    let mut out = String::from("# pair");
    for s in series {
        out.push(' ');
        out.push_str(&s.metric);
    }
    out.push_str(" y\n");
    let Some(first) = series.first() else {
        return out;
    };
    for (i, label) in first.labels.iter().enumerate() {
        out.push_str(&format!("\"{}\"", label.replace('"', "'")));
        for s in series {
            out.push_str(&format!(" {}", s.x[i]));
        }
        out.push_str(&format!(" {}\n", first.y[i]));
    }
    out
}
