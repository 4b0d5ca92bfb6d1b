//! The Q quality-index statistics, their normalized forms, the max/min
//! variants M and M*, and asymptotic p-values.

use crate::depth::{compute_depth, DataSet, DepthSpec, DepthVector};
use crate::error::{Error, Result};
use crate::numerics::{chisq_cdf, normal_cdf};

/// The two sample quality indices with the sample sizes that normalize them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPair {
    /// Q(F_m, G_n): mass of Y at least as deep as X, relative to X.
    pub q_fg: f64,
    /// Q(G_n, F_m): the reversed index, relative to Y.
    pub q_gf: f64,
    pub m: usize,
    pub n: usize,
}

/// Full output of one two-sample homogeneity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestReport {
    pub qpair: QPair,
    pub z_fg: f64,
    pub z_gf: f64,
    /// M = max(z_fg^2, z_gf^2); upper-tail chi-square(1) p-value.
    pub m_stat: f64,
    /// M* = normalized (1/2 - min(q_fg, q_gf)); two-sided normal p-value.
    pub m_star: f64,
    pub p_q_fg: f64,
    pub p_q_gf: f64,
    pub p_m: f64,
    pub p_m_star: f64,
    pub depth_spec: DepthSpec,
}

/// (1/(mn)) sum_i sum_j I[depths_x[i] <= depths_y[j]], computed by sorting
/// the y side and counting with binary searches; bitwise-equal to the
/// double loop because the comparisons are identical.
pub fn q_statistic(depths_x: &DepthVector, depths_y: &DepthVector) -> Result<f64> {
    if depths_x.is_empty() || depths_y.is_empty() {
        return Err(Error::EmptyInput("q_statistic: empty depth vector".into()));
    }
    let m = depths_x.len();
    let n = depths_y.len();
    let mut ys = depths_y.values().to_vec();
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut count = 0usize;
    for &x in depths_x.values() {
        // number of y with y >= x
        count += n - ys.partition_point(|&y| y < x);
    }
    Ok(count as f64 / (m as f64 * n as f64))
}

/// Both quality indices. The F_m-referenced depths use `spec.seed`; the
/// reversed, G_n-referenced depths use `spec.seed + 1` so the two distinct
/// reference distributions never share sampled directions.
pub fn q_pair(x: &DataSet, y: &DataSet, spec: &DepthSpec) -> Result<QPair> {
    let spec_f = *spec;
    let spec_g = spec.with_seed(spec.seed.wrapping_add(1));
    let dx_f = compute_depth(x, x, &spec_f)?;
    let dy_f = compute_depth(y, x, &spec_f)?;
    let dy_g = compute_depth(y, y, &spec_g)?;
    let dx_g = compute_depth(x, y, &spec_g)?;
    Ok(QPair {
        q_fg: q_statistic(&dx_f, &dy_f)?,
        q_gf: q_statistic(&dy_g, &dx_g)?,
        m: x.n_rows(),
        n: y.n_rows(),
    })
}

/// (q - 1/2) / sqrt((1/12)(1/m + 1/n)).
pub fn normalize(q: f64, m: usize, n: usize) -> f64 {
    let var = (1.0 / 12.0) * (1.0 / m as f64 + 1.0 / n as f64);
    (q - 0.5) / var.sqrt()
}

/// The maximum statistic M and the minimum statistic M*.
pub fn variant_stats(pair: &QPair) -> (f64, f64) {
    let z_fg = normalize(pair.q_fg, pair.m, pair.n);
    let z_gf = normalize(pair.q_gf, pair.m, pair.n);
    let m_stat = (z_fg * z_fg).max(z_gf * z_gf);
    let m_star = -normalize(pair.q_fg.min(pair.q_gf), pair.m, pair.n);
    (m_stat, m_star)
}

/// (p_q_fg, p_q_gf, p_m, p_m_star): two-sided normal for the Q statistics,
/// upper-tail chi-square(1) for M, two-sided normal for M* clamped to [0,1]
/// (M* can be negative in finite samples).
pub fn p_values(z_fg: f64, z_gf: f64, m_stat: f64, m_star: f64) -> Result<(f64, f64, f64, f64)> {
    let two_sided = |z: f64| 2.0 * (1.0 - normal_cdf(z.abs()));
    let p_m = 1.0 - chisq_cdf(m_stat, 1)?;
    let p_m_star = (2.0 * (1.0 - normal_cdf(m_star))).clamp(0.0, 1.0);
    Ok((two_sided(z_fg), two_sided(z_gf), p_m, p_m_star))
}

/// Run the full two-sample test: depths, Q pair, variants, p-values.
pub fn run_test(x: &DataSet, y: &DataSet, spec: &DepthSpec) -> Result<TestReport> {
    let qpair = q_pair(x, y, spec)?;
    let z_fg = normalize(qpair.q_fg, qpair.m, qpair.n);
    let z_gf = normalize(qpair.q_gf, qpair.m, qpair.n);
    let (m_stat, m_star) = variant_stats(&qpair);
    let (p_q_fg, p_q_gf, p_m, p_m_star) = p_values(z_fg, z_gf, m_stat, m_star)?;
    Ok(TestReport {
        qpair,
        z_fg,
        z_gf,
        m_stat,
        m_star,
        p_q_fg,
        p_q_gf,
        p_m,
        p_m_star,
        depth_spec: *spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::{euclidean_depth, DepthKind};
    use crate::numerics;

    // Build a DepthVector with prescribed values in (0, 1] by exploiting
    // that euclidean depth of x against sample {0} is 1/(1+x^2): invert it.
    fn depths(values: &[f64]) -> DepthVector {
        let sample = DataSet::from_univariate(&[0.0]).unwrap();
        let pts: Vec<f64> = values
            .iter()
            .map(|&d| (1.0 / d - 1.0).max(0.0).sqrt())
            .collect();
        let q = DataSet::from_univariate(&pts).unwrap();
        euclidean_depth(&q, &sample).unwrap()
    }

    #[test]
    fn q_statistic_hand_example() {
        // depths X: 0.5, 1, 0.5; depths Y: 1, 0.2
        let dx = depths(&[0.5, 1.0, 0.5]);
        let dy = depths(&[1.0, 0.2]);
        assert_eq!(q_statistic(&dx, &dy).unwrap(), 0.5);
    }

    #[test]
    fn q_statistic_extremes_and_errors() {
        let lo = depths(&[0.1, 0.2]);
        let hi = depths(&[0.3, 0.4, 0.5]);
        assert_eq!(q_statistic(&lo, &hi).unwrap(), 1.0);
        assert_eq!(q_statistic(&hi, &lo).unwrap(), 0.0);
    }

    #[test]
    fn q_statistic_matches_double_loop() {
        let mut s = numerics::derive_stream(31, 0);
        for _ in 0..50 {
            let m = 1 + (s.next_u64() % 12) as usize;
            let n = 1 + (s.next_u64() % 12) as usize;
            // duplicated values exercise the tie handling
            let dx = depths(
                &(0..m)
                    .map(|_| (1 + s.next_u64() % 8) as f64 / 8.0)
                    .collect::<Vec<_>>(),
            );
            let dy = depths(
                &(0..n)
                    .map(|_| (1 + s.next_u64() % 8) as f64 / 8.0)
                    .collect::<Vec<_>>(),
            );
            let fast = q_statistic(&dx, &dy).unwrap();
            let mut count = 0usize;
            for &a in dx.values() {
                for &b in dy.values() {
                    if a <= b {
                        count += 1;
                    }
                }
            }
            let slow = count as f64 / (m as f64 * n as f64);
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn self_identity() {
        // identical samples with all-distinct depths: q = (m+1)/(2m)
        for m in 2..=10usize {
            let vals: Vec<f64> = (0..m).map(|i| (i + 1) as f64 / (m + 1) as f64).collect();
            let d = depths(&vals);
            let q = q_statistic(&d, &d).unwrap();
            assert!((q - (m + 1) as f64 / (2 * m) as f64).abs() < 1e-15, "m={m}");
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(0.5, 17, 99), 0.0);
        let z = normalize(0.6, 30, 30);
        assert!((z - 0.1 * 180f64.sqrt()).abs() < 1e-12);
        assert!((normalize(0.4, 30, 30) + z).abs() < 1e-12);
    }

    #[test]
    fn variant_stats_examples() {
        let pair = QPair {
            q_fg: 0.5,
            q_gf: 0.5,
            m: 10,
            n: 10,
        };
        assert_eq!(variant_stats(&pair), (0.0, 0.0));

        let pair = QPair {
            q_fg: 0.6,
            q_gf: 0.45,
            m: 30,
            n: 30,
        };
        let (m_stat, m_star) = variant_stats(&pair);
        let z_fg = normalize(0.6, 30, 30);
        let z_gf = normalize(0.45, 30, 30);
        assert!((m_stat - z_fg * z_fg).abs() < 1e-12);
        assert!((m_star + z_gf).abs() < 1e-12); // min is q_gf < 1/2
        assert!((m_stat - z_fg.powi(2).max(z_gf.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn p_value_thresholds() {
        let (p, _, _, _) = p_values(1.96, 0.0, 0.0, 0.0).unwrap();
        assert!((p - 0.05).abs() < 5e-4);
        let (_, _, p_m, _) = p_values(0.0, 0.0, 1.96 * 1.96, 0.0).unwrap();
        assert!((p_m - 0.05).abs() < 5e-4);
        let (p0, _, _, _) = p_values(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(p0, 1.0);
        // negative m_star clamps to 1
        let (_, _, _, pms) = p_values(0.0, 0.0, 0.0, -2.0).unwrap();
        assert_eq!(pms, 1.0);
    }

    #[test]
    fn run_test_self_sample() {
        let mut s = numerics::derive_stream(41, 0);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| numerics::std_normal(&mut s, 2)).collect();
        let x = DataSet::new(rows).unwrap();
        let spec = DepthSpec::exact(DepthKind::Mahalanobis);
        let r = run_test(&x, &x, &spec).unwrap();
        let expect = normalize(31.0 / 60.0, 30, 30);
        assert!((r.z_fg - expect).abs() < 1e-12);
        assert!((r.z_gf - expect).abs() < 1e-12);
        assert!(r.p_q_fg > 0.4 && r.p_q_gf > 0.4 && r.p_m > 0.4 && r.p_m_star > 0.4);
        assert!((r.m_stat - r.z_fg.powi(2).max(r.z_gf.powi(2))).abs() < 1e-12);
    }

    #[test]
    fn monotone_relabeling_invariance() {
        let dx = depths(&[0.2, 0.5, 0.7]);
        let dy = depths(&[0.3, 0.6]);
        let q0 = q_statistic(&dx, &dy).unwrap();
        // strictly increasing transform t -> t^3 of every depth value
        let cube = |d: &DepthVector| {
            depths(&d.values().iter().map(|v| v.powi(3)).collect::<Vec<_>>())
        };
        let q1 = q_statistic(&cube(&dx), &cube(&dy)).unwrap();
        assert_eq!(q0, q1);
    }
}
