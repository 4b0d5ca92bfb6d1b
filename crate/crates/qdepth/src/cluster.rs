//! Fuzzy c-means clustering and the cluster-then-test pipeline.

use crate::depth::{DataSet, DepthSpec};
use crate::error::{Error, Result};
use crate::numerics;
use crate::qstat::{run_test, TestReport};

pub const DEFAULT_FUZZIFIER: f64 = 2.0;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 300;

/// Result of one fuzzy c-means run.
#[derive(Debug, Clone, PartialEq)]
pub struct FcmResult {
    /// c x d cluster centers.
    pub centers: Vec<Vec<f64>>,
    /// m x c membership matrix; rows sum to 1.
    pub memberships: Vec<Vec<f64>>,
    /// Objective value after each center/membership update; nonincreasing.
    pub objective_trace: Vec<f64>,
    /// Per-point argmax membership; ties go to the lowest cluster index.
    pub hard_labels: Vec<usize>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn objective(data: &DataSet, centers: &[Vec<f64>], memberships: &[Vec<f64>], fuzzifier: f64) -> f64 {
    let mut obj = 0.0;
    for (row, u) in data.rows().iter().zip(memberships) {
        for (center, &uik) in centers.iter().zip(u) {
            obj += uik.powf(fuzzifier) * sq_dist(row, center);
        }
    }
    obj
}

fn update_centers(data: &DataSet, memberships: &[Vec<f64>], c: usize, fuzzifier: f64) -> Vec<Vec<f64>> {
    let d = data.dim();
    let mut centers = vec![vec![0.0; d]; c];
    let mut weights = vec![0.0; c];
    for (row, u) in data.rows().iter().zip(memberships) {
        for k in 0..c {
            let w = u[k].powf(fuzzifier);
            weights[k] += w;
            for (acc, &v) in centers[k].iter_mut().zip(row) {
                *acc += w * v;
            }
        }
    }
    for k in 0..c {
        if weights[k] > 0.0 {
            for v in &mut centers[k] {
                *v /= weights[k];
            }
        }
    }
    centers
}

fn update_memberships(data: &DataSet, centers: &[Vec<f64>], fuzzifier: f64) -> Vec<Vec<f64>> {
    let c = centers.len();
    let power = 2.0 / (fuzzifier - 1.0);
    data.rows()
        .iter()
        .map(|row| {
            let dists: Vec<f64> = centers.iter().map(|v| sq_dist(row, v).sqrt()).collect();
            // a point coinciding with a center belongs there entirely
            // (ties split equally among the coinciding centers)
            if dists.contains(&0.0) {
                let zeros = dists.iter().filter(|&&t| t == 0.0).count() as f64;
                return dists
                    .iter()
                    .map(|&t| if t == 0.0 { 1.0 / zeros } else { 0.0 })
                    .collect();
            }
            (0..c)
                .map(|k| {
                    let denom: f64 = dists.iter().map(|&dj| (dists[k] / dj).powf(power)).sum();
                    1.0 / denom
                })
                .collect()
        })
        .collect()
}

/// Fuzzy c-means with the standard alternating updates. Memberships are
/// initialized i.i.d. uniform and row-normalized from `seed`; iteration
/// stops when the relative objective change is at most `tol` or after
/// `max_iter` sweeps.
pub fn fcm(
    data: &DataSet,
    c: usize,
    fuzzifier: f64,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<FcmResult> {
    if c == 0 || c > data.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "fcm: cluster count {c} must be in 1..=m ({})",
            data.n_rows()
        )));
    }
    if fuzzifier <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "fcm: fuzzifier must exceed 1, got {fuzzifier}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("fcm: max_iter must be >= 1".into()));
    }
    let mut stream = numerics::derive_stream(seed, 0);
    let mut memberships: Vec<Vec<f64>> = (0..data.n_rows())
        .map(|_| {
            let raw: Vec<f64> = (0..c).map(|_| stream.next_uniform()).collect();
            let total: f64 = raw.iter().sum();
            if total > 0.0 {
                raw.into_iter().map(|v| v / total).collect()
            } else {
                vec![1.0 / c as f64; c]
            }
        })
        .collect();
    let mut centers = update_centers(data, &memberships, c, fuzzifier);
    let mut objective_trace = vec![objective(data, &centers, &memberships, fuzzifier)];
    for _ in 0..max_iter {
        memberships = update_memberships(data, &centers, fuzzifier);
        centers = update_centers(data, &memberships, c, fuzzifier);
        let obj = objective(data, &centers, &memberships, fuzzifier);
        let prev = *objective_trace.last().expect("nonempty trace");
        objective_trace.push(obj);
        if (prev - obj).abs() <= tol * prev.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let hard_labels = memberships
        .iter()
        .map(|u| {
            let mut best = 0;
            for (k, &v) in u.iter().enumerate() {
                if v > u[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    Ok(FcmResult {
        centers,
        memberships,
        objective_trace,
        hard_labels,
    })
}

/// Hard-assign with fuzzy c-means, extract two clusters, and run the
/// two-sample homogeneity test between them.
pub fn cluster_then_test(
    data: &DataSet,
    c: usize,
    fuzzifier: f64,
    spec: &DepthSpec,
    pair: (usize, usize),
    seed: u64,
) -> Result<TestReport> {
    if pair.0 >= c || pair.1 >= c {
        return Err(Error::InvalidArgument(format!(
            "cluster indices {:?} out of range for c = {c}",
            pair
        )));
    }
    let result = fcm(data, c, fuzzifier, DEFAULT_TOL, DEFAULT_MAX_ITER, seed)?;
    let extract = |label: usize| -> Result<DataSet> {
        let rows: Vec<Vec<f64>> = data
            .rows()
            .iter()
            .zip(&result.hard_labels)
            .filter(|(_, &l)| l == label)
            .map(|(r, _)| r.clone())
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "cluster {label} is empty after hard assignment"
            )));
        }
        DataSet::new(rows)
    };
    let x = extract(pair.0)?;
    let y = extract(pair.1)?;
    run_test(&x, &y, spec)
}
