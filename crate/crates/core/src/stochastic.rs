//! Seeded Bernoulli experiments on `a_X(n) = sum_{k<=n} X_k 2^k`.
//!
//! Bits come from `ChaCha8Rng::seed_from_u64(seed)`; bit `k` is 1 iff
//! `gen_range(0..den) < num` for `p = num/den`, so a config reproduces the
//! same bits on every platform. Statistical bands used by callers are
//! artifact choices: the underlying results are limits with no finite-n rate.

use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{assemble, BitString, SignSequence};
use crate::charfn::moments_via_jets;
use crate::error::{domain, Result};
use crate::exact::{format_rational, rational_to_f64, Rational};
use crate::measure::{build_rep, MeasureRep};
use crate::variance_formula::variance_closed_form_f64;

/// Exponent of the correlation bound `n^(1/2 + eps)` with `eps = 0.1`.
pub const CORRELATION_EXPONENT: f64 = 0.6;
/// Largest supported jet order for moment experiments.
pub const MAX_MOMENT_ORDER: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(serialize_with = "ser_rational")]
    pub p: Rational,
    /// Index of the top bit: `a_X(n)` uses bits `0..=n`.
    pub n: usize,
    /// Number of consecutive seeds for multi-seed runs.
    pub samples: usize,
    pub max_moment_order: usize,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

impl ExperimentConfig {
    pub fn new(seed: u64, n: usize) -> Self {
        ExperimentConfig {
            seed,
            p: Rational::new(1.into(), 2.into()),
            n,
            samples: 1,
            max_moment_order: 6,
        }
    }

    pub fn with_p(mut self, p: Rational) -> Self {
        self.p = p;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_max_moment_order(mut self, k: usize) -> Self {
        self.max_moment_order = k;
        self
    }

    pub fn p_f64(&self) -> f64 {
        rational_to_f64(&self.p)
    }

    /// Configs for seeds `seed, seed + 1, ..., seed + samples - 1`.
    pub fn per_seed(&self) -> Vec<ExperimentConfig> {
        (0..self.samples.max(1) as u64)
            .map(|i| ExperimentConfig { seed: self.seed.wrapping_add(i), samples: 1, ..self.clone() })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub statistic: String,
    pub value: f64,
    pub target: f64,
    pub deviation: f64,
}

impl ExperimentRow {
    pub fn new(n: usize, statistic: impl Into<String>, value: f64, target: f64) -> Self {
        ExperimentRow { n, statistic: statistic.into(), value, target, deviation: (value - target).abs() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentMetadata {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub runtime_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub metadata: ExperimentMetadata,
}

impl ExperimentResult {
    fn new(experiment: &str, config: &ExperimentConfig, rows: Vec<ExperimentRow>, started: Instant) -> Self {
        ExperimentResult {
            rows,
            metadata: ExperimentMetadata {
                experiment: experiment.to_string(),
                config: config.clone(),
                runtime_ms: started.elapsed().as_millis(),
            },
        }
    }

    pub fn row(&self, statistic: &str) -> Option<&ExperimentRow> {
        self.rows.iter().find(|r| r.statistic == statistic)
    }

    pub fn value(&self, statistic: &str) -> Option<f64> {
        self.row(statistic).map(|r| r.value)
    }
}

/// Runs `f` once per seed in parallel; results come back in seed order.
pub fn run_seeds<F>(config: &ExperimentConfig, f: F) -> Result<Vec<ExperimentResult>>
where
    F: Fn(&ExperimentConfig) -> Result<ExperimentResult> + Sync + Send,
{
    config.per_seed().par_iter().map(f).collect()
}

fn p_parts(p: &Rational) -> Result<(u64, u64)> {
    if p < &Rational::zero() || p > &Rational::from_integer(1.into()) {
        return Err(domain(format!("bit bias {} outside [0, 1]", format_rational(p))));
    }
    let num = p.numer().to_u64().ok_or_else(|| domain("bias numerator does not fit in 64 bits"))?;
    let den = p.denom().to_u64().ok_or_else(|| domain("bias denominator does not fit in 64 bits"))?;
    Ok((num, den))
}

/// `X_0..=X_n`, each 1 with probability `p`.
pub fn gen_bits(config: &ExperimentConfig) -> Result<Vec<u8>> {
    let (num, den) = p_parts(&config.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok((0..=config.n).map(|_| (rng.gen_range(0..den) < num) as u8).collect())
}

/// `a_X(n)` for the config's seed.
pub fn sample_a(config: &ExperimentConfig) -> Result<BitString> {
    let bits = gen_bits(config)?;
    Ok(BitString::from_biguint(assemble(&bits, config.n)?))
}

/// Order-2 correlation measure: the largest `|sum_{k<M} b_{k+d1} b_{k+d2}|`
/// over `0 <= d1 < d2` and windows inside the sequence.
///
/// For each lag the windowed sums are differences of prefix sums, so the
/// best window is `max prefix - min prefix`; `O(len^2)` overall.
pub fn correlation_c2(signs: &SignSequence) -> Result<u64> {
    let b = signs.as_slice();
    if b.len() < 3 {
        return Err(domain(format!("correlation needs at least 3 signs, got {}", b.len())));
    }
    Ok((1..b.len())
        .into_par_iter()
        .map(|lag| {
            let (mut prefix, mut lo, mut hi) = (0i64, 0i64, 0i64);
            for (x, y) in b.iter().zip(&b[lag..]) {
                prefix += (x * y) as i64;
                lo = lo.min(prefix);
                hi = hi.max(prefix);
            }
            (hi - lo) as u64
        })
        .max()
        .unwrap_or(0))
}

/// Powers of two below `n`, then `n` itself, from 8 upward.
fn ladder(n: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(8usize), |&k| Some(k * 2)).take_while(|&k| k < n).collect();
    out.push(n);
    out
}

/// `2 Var(mu_{a_X(m)}) / m` along a ladder of `m <= n`, target `4p(1-p)`;
/// also reports `Var / m` against `2p(1-p)`.
pub fn generic_variance_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let bits = gen_bits(config)?;
    let p = config.p_f64();
    let target = 4.0 * p * (1.0 - p);
    let mut rows = Vec::new();
    for m in ladder(config.n) {
        let a = BitString::from_biguint(assemble(&bits, m)?);
        let var = if a.is_empty() { 0.0 } else { variance_closed_form_f64(&a)? };
        rows.push(ExperimentRow::new(m, "two_var_over_n", 2.0 * var / m as f64, target));
        rows.push(ExperimentRow::new(m, "var_over_n", var / m as f64, target / 2.0));
    }
    Ok(ExperimentResult::new("generic_variance", config, rows, started))
}

/// `(2k)! / (2^k k!)` for even orders, 0 for odd.
pub fn normal_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        (1..k).step_by(2).map(|j| j as f64).product()
    }
}

/// Renormalized moments `2^(k/2) m_k / n^(k/2)` of `mu_{a_X(n)}`, from
/// exact jet moments, against the normal moments.
pub fn clt_moments_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let order = config.max_moment_order;
    if order > MAX_MOMENT_ORDER {
        return Err(domain(format!("moment order {order} exceeds {MAX_MOMENT_ORDER}")));
    }
    if config.n == 0 {
        return Err(domain("moment experiment needs n >= 1"));
    }
    let a = sample_a(config)?;
    let moments = moments_via_jets(&a, order)?;
    let scale = 2.0 / config.n as f64;
    let rows = moments
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let value = if m.is_zero() { 0.0 } else { rational_to_f64(m) * scale.powi(k as i32 / 2) * scale.sqrt().powi(k as i32 % 2) };
            ExperimentRow::new(config.n, format!("m_tilde_{k}"), value, normal_moment(k))
        })
        .collect();
    Ok(ExperimentResult::new("clt_moments", config, rows, started))
}

/// Standard normal CDF via `erfc` (libm's port of the FreeBSD routine,
/// error below 1 ulp, far inside 1e-7).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact CDF of `mu_{a_X(n)}` at `x sqrt(n/2)` for every grid point, against
/// the normal CDF; the last row is the sup distance.
pub fn cdf_experiment(config: &ExperimentConfig, grid: &[f64]) -> Result<ExperimentResult> {
    let started = Instant::now();
    let a = sample_a(config)?;
    let rep: MeasureRep = build_rep(&a);
    let profile = rep.profile();
    let scale = (config.n as f64 / 2.0).sqrt();
    let top = profile.support_max();
    let mut rows: Vec<ExperimentRow> = grid
        .iter()
        .map(|&x| {
            let t = x * scale;
            let value = if t >= top as f64 { 1.0 } else { profile.mass_at_most(t.floor() as i64).to_f64() };
            ExperimentRow::new(config.n, format!("cdf({x})"), value, normal_cdf(x))
        })
        .collect();
    let sup = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    rows.push(ExperimentRow::new(config.n, "sup_distance", sup, 0.0));
    Ok(ExperimentResult::new("cdf", config, rows, started))
}

/// `C_{2,n}` of the sign sequence of `X_0..=X_n` against `n^0.6`.
pub fn correlation_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let bits = gen_bits(config)?;
    let c2 = correlation_c2(&SignSequence::from_bits(&bits))?;
    let bound = (config.n as f64).powf(CORRELATION_EXPONENT);
    let rows = vec![ExperimentRow::new(config.n, "c2", c2 as f64, bound)];
    Ok(ExperimentResult::new("correlation", config, rows, started))
}

/// Exact `c_a` for the sampled `a_X(n)`, against the accumulation value 1/2.
pub fn cusick_random_experiment(config: &ExperimentConfig) -> Result<(Rational, ExperimentResult)> {
    let started = Instant::now();
    let a = sample_a(config)?;
    let c = build_rep::<crate::exact::Dyadic>(&a).cusick_c().to_rational();
    let rows = vec![ExperimentRow::new(config.n, "cusick_c", rational_to_f64(&c), 0.5)];
    Ok((c, ExperimentResult::new("cusick_random", config, rows, started)))
}

/// Minimum of the exact `c_a` over `1 <= a < max_a`, with the smallest minimizer.
pub fn cusick_scan(max_a: u64) -> Result<(Rational, u64)> {
    if max_a < 2 {
        return Err(domain("cusick scan needs max_a >= 2"));
    }
    (1..max_a)
        .into_par_iter()
        .map(|a| (crate::measure::build_measure_u64(a).cusick_c().to_rational(), a))
        .reduce_with(|x, y| if (&y.0, y.1) < (&x.0, x.1) { y } else { x })
        .ok_or_else(|| domain("empty scan"))
}

/// Parses a bias `"num/den"`.
pub fn parse_p(s: &str) -> Result<Rational> {
    let p = crate::exact::parse_rational(s)?;
    p_parts(&p)?;
    Ok(p)
}
