//! Projection depth 1/(1 + O) with outlyingness O the worst standardized
//! deviation |u'x - median| / MAD over projection directions; the single
//! coordinate direction in dimension 1, sampled unit directions otherwise.

use super::{check_same_dim, dot, sample_directions, DataSet, DepthFunction, DepthKind, DepthSpec, DepthVector};
use crate::error::{Error, Result};

pub(super) struct ProjectionDepth;

impl DepthFunction for ProjectionDepth {
    fn kind(&self) -> DepthKind {
        DepthKind::Projection
    }

    fn compute(
        &self,
        queries: &DataSet,
        sample: &DataSet,
        spec: &DepthSpec,
    ) -> Result<DepthVector> {
        check_same_dim(queries, sample)?;
        let dirs = if sample.dim() == 1 {
            vec![vec![1.0]]
        } else {
            sample_directions(spec.directions, sample.dim(), spec.seed)
        };
        // per-direction location/scale of the projected sample
        let mut stats = Vec::with_capacity(dirs.len());
        for (k, u) in dirs.iter().enumerate() {
            let proj: Vec<f64> = sample.rows().iter().map(|r| dot(u, r)).collect();
            let med = median(&proj);
            let mad = median(&proj.iter().map(|v| (v - med).abs()).collect::<Vec<_>>());
            if mad == 0.0 {
                return Err(Error::Numeric(format!(
                    "projection depth: zero MAD in direction {k}"
                )));
            }
            stats.push((med, mad));
        }
        let values = queries
            .rows()
            .iter()
            .map(|q| {
                let o = dirs
                    .iter()
                    .zip(&stats)
                    .map(|(u, &(med, mad))| (dot(u, q) - med).abs() / mad)
                    .fold(0.0f64, f64::max);
                1.0 / (1.0 + o)
            })
            .collect();
        Ok(DepthVector::new(values))
    }
}

/// Midpoint-of-central-order-statistics median.
fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
