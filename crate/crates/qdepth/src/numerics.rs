//! Deterministic random numbers, special functions, and the log-log slope
//! fit used by the Monte Carlo studies.
//!
//! The generator is SplitMix64 (Steele, Lea, Flood 2014): a 64-bit state
//! advanced by the golden-gamma increment and finalized with two xor-shift
//! multiplies. Streams are derived by seeding the state with
//! `master_seed XOR (stream_id * 0x9E3779B97F4A7C15)` passed through one
//! finalization round, so distinct stream ids decorrelate even for small
//! master seeds.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

/// A single deterministic random stream. Copy-cheap, consumed by value;
/// identical (seed, stream_id) pairs reproduce bit-identical sequences on
/// every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
    stream_id: u64,
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the stream for `(master_seed, stream_id)`.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    let mixed = master_seed ^ stream_id.wrapping_mul(GOLDEN_GAMMA);
    RngStream {
        state: splitmix_finalize(mixed),
        stream_id,
    }
}

impl RngStream {
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        splitmix_finalize(self.state)
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// `count` i.i.d. standard normal variates via the basic Box-Muller
/// transform; both outputs of each uniform pair are used, so the stream
/// advances by two uniforms per two variates.
pub fn std_normal(stream: &mut RngStream, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // u1 in (0,1] so the log is finite
        let u1 = 1.0 - stream.next_uniform();
        let u2 = stream.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        out.push(r * theta.cos());
        if out.len() < count {
            out.push(r * theta.sin());
        }
    }
    out
}

const MAX_ITER: usize = 500;
const EPS: f64 = 1e-16;

/// ln Gamma(x) for x > 0, Lanczos approximation (g = 7, n = 9).
fn ln_gamma(x: f64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
/// Lentz continued fraction for the complement otherwise.
fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // series expansion of P(a, x)
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..MAX_ITER {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        sum * (-x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
/// fraction; valid for x >= a + 1 (used only on that branch).
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Standard normal CDF. Phi(z) = erfc(-z / sqrt(2)) / 2 with erfc evaluated
/// through the incomplete gamma series / continued fraction (absolute error
/// well below 1e-10).
pub fn normal_cdf(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    if x >= 0.0 {
        0.5 + 0.5 * gamma_p(0.5, x * x)
    } else {
        0.5 - 0.5 * gamma_p(0.5, x * x)
    }
}

/// Chi-square CDF with `dof` degrees of freedom: P(dof/2, x/2).
pub fn chisq_cdf(x: f64, dof: u32) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidArgument("chisq_cdf: dof must be positive".into()));
    }
    if x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "chisq_cdf: x must be nonnegative, got {x}"
        )));
    }
    Ok(gamma_p(dof as f64 / 2.0, x / 2.0))
}

/// Ordinary least-squares slope of log(value) against log(size).
pub fn fit_loglog_slope(pairs: &[(usize, f64)]) -> Result<f64> {
    let distinct: std::collections::BTreeSet<usize> = pairs.iter().map(|p| p.0).collect();
    if distinct.len() < 2 {
        return Err(Error::InvalidArgument(
            "fit_loglog_slope: need at least 2 distinct sizes".into(),
        ));
    }
    for &(s, v) in pairs {
        if s == 0 || v <= 0.0 || !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "fit_loglog_slope: nonpositive entry (size={s}, value={v})"
            )));
        }
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// One-sample Kolmogorov-Smirnov distance of `values` against the CDF `f`.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], f: F) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let cdf = f(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    d
}
