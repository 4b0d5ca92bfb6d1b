//! Sample-version data depth functions.
//!
//! Every depth is a strategy behind the [`DepthFunction`] trait and is
//! registered by name; [`compute_depth`] dispatches on [`DepthSpec::kind`].
//! Euclidean, Mahalanobis and spatial depths are exact; halfspace is exact
//! in dimension 1 and 2 and direction-sampled above; projection depth is
//! direction-sampled except in dimension 1.

mod halfspace;
mod projection;

pub use halfspace::halfspace_depth_bruteforce_2d;

use crate::error::{Error, Result};
use crate::linalg;
use crate::numerics;

/// An m x d matrix of observations; rows are points.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl DataSet {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("data set has no rows".into()));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput("data set has zero columns".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} columns, expected {}",
                    i + 1,
                    r.len(),
                    dim
                )));
            }
            if let Some(v) = r.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry {v} in row {}",
                    i + 1
                )));
            }
        }
        Ok(DataSet { rows, dim })
    }

    /// 1-D data set from a flat slice.
    pub fn from_univariate(values: &[f64]) -> Result<Self> {
        DataSet::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DepthKind {
    Euclidean,
    Mahalanobis,
    Halfspace,
    Projection,
    Spatial,
}

impl DepthKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DepthKind::Euclidean => "euclidean",
            DepthKind::Mahalanobis => "mahalanobis",
            DepthKind::Halfspace => "halfspace",
            DepthKind::Projection => "projection",
            DepthKind::Spatial => "spatial",
        }
    }
}

impl std::str::FromStr for DepthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        registry()
            .iter()
            .map(|f| f.kind())
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown depth kind '{s}' (expected one of: {})",
                    registry()
                        .iter()
                        .map(|f| f.kind().as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }
}

/// Which depth to compute plus the approximation parameters used by the
/// direction-sampled depths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthSpec {
    pub kind: DepthKind,
    /// Direction count K for approximate halfspace / projection depth.
    pub directions: usize,
    pub seed: u64,
}

pub const DEFAULT_DIRECTIONS: usize = 500;

impl DepthSpec {
    pub fn new(kind: DepthKind, directions: usize, seed: u64) -> Result<Self> {
        if directions == 0 {
            return Err(Error::InvalidArgument("directions must be >= 1".into()));
        }
        Ok(DepthSpec {
            kind,
            directions,
            seed,
        })
    }

    pub fn exact(kind: DepthKind) -> Self {
        DepthSpec {
            kind,
            directions: DEFAULT_DIRECTIONS,
            seed: 0,
        }
    }

    /// Copy with a different master seed (used for the reversed statistic).
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Depth values, one per query point, each in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct DepthVector(Vec<f64>);

impl DepthVector {
    fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        DepthVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One depth-computation strategy.
pub trait DepthFunction: Sync {
    fn kind(&self) -> DepthKind;

    fn compute(&self, queries: &DataSet, sample: &DataSet, spec: &DepthSpec)
        -> Result<DepthVector>;
}

/// All registered depth strategies, in CLI listing order.
pub fn registry() -> &'static [&'static dyn DepthFunction] {
    static REGISTRY: [&dyn DepthFunction; 5] = [
        &EuclideanDepth,
        &MahalanobisDepth,
        &halfspace::HalfspaceDepth,
        &projection::ProjectionDepth,
        &SpatialDepth,
    ];
    &REGISTRY
}

pub fn depth_function(kind: DepthKind) -> &'static dyn DepthFunction {
    registry()
        .iter()
        .copied()
        .find(|f| f.kind() == kind)
        .expect("every DepthKind is registered")
}

/// Dispatch to the strategy named by `spec.kind`. Deterministic given
/// `spec.seed`.
pub fn compute_depth(queries: &DataSet, sample: &DataSet, spec: &DepthSpec) -> Result<DepthVector> {
    depth_function(spec.kind).compute(queries, sample, spec)
}

fn check_same_dim(queries: &DataSet, sample: &DataSet) -> Result<()> {
    if queries.dim() != sample.dim() {
        return Err(Error::DimensionMismatch(format!(
            "queries have dimension {}, sample has dimension {}",
            queries.dim(),
            sample.dim()
        )));
    }
    Ok(())
}

/// K unit directions: i.i.d. standard normal vectors normalized to the
/// sphere, drawn from the stream derived from `seed`. The first directions
/// of a longer draw are a prefix of a shorter one.
pub(crate) fn sample_directions(count: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut stream = numerics::derive_stream(seed, 0);
    let mut dirs = Vec::with_capacity(count);
    while dirs.len() < count {
        let v = numerics::std_normal(&mut stream, dim);
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-12 {
            dirs.push(v.into_iter().map(|t| t / norm).collect());
        }
    }
    dirs
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct EuclideanDepth;

/// 1/(1 + (x - mean)^2), univariate only.
impl DepthFunction for EuclideanDepth {
    fn kind(&self) -> DepthKind {
        DepthKind::Euclidean
    }

    fn compute(
        &self,
        queries: &DataSet,
        sample: &DataSet,
        _spec: &DepthSpec,
    ) -> Result<DepthVector> {
        check_same_dim(queries, sample)?;
        if sample.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "euclidean depth is univariate, got dimension {}",
                sample.dim()
            )));
        }
        let mean = sample.rows().iter().map(|r| r[0]).sum::<f64>() / sample.n_rows() as f64;
        Ok(DepthVector::new(
            queries
                .rows()
                .iter()
                .map(|r| {
                    let d = r[0] - mean;
                    1.0 / (1.0 + d * d)
                })
                .collect(),
        ))
    }
}

pub fn euclidean_depth(queries: &DataSet, sample: &DataSet) -> Result<DepthVector> {
    EuclideanDepth.compute(queries, sample, &DepthSpec::exact(DepthKind::Euclidean))
}

struct MahalanobisDepth;

/// 1/(1 + (x - mean)' Cov^{-1} (x - mean)) with sample mean and covariance
/// (divisor m - 1); the inverse goes through a Cholesky factor with one
/// ridge retry on failure.
impl DepthFunction for MahalanobisDepth {
    fn kind(&self) -> DepthKind {
        DepthKind::Mahalanobis
    }

    fn compute(
        &self,
        queries: &DataSet,
        sample: &DataSet,
        _spec: &DepthSpec,
    ) -> Result<DepthVector> {
        check_same_dim(queries, sample)?;
        if sample.n_rows() < sample.dim() + 1 {
            return Err(Error::InvalidArgument(format!(
                "mahalanobis depth needs at least d+1 = {} sample points, got {}",
                sample.dim() + 1,
                sample.n_rows()
            )));
        }
        let mu = linalg::column_means(sample.rows());
        let cov = linalg::covariance(sample.rows())?;
        let l = linalg::cholesky_regularized(&cov)?;
        Ok(DepthVector::new(
            queries
                .rows()
                .iter()
                .map(|r| {
                    let diff: Vec<f64> = r.iter().zip(&mu).map(|(x, m)| x - m).collect();
                    1.0 / (1.0 + linalg::quad_form_inv(&l, &diff))
                })
                .collect(),
        ))
    }
}

pub fn mahalanobis_depth(queries: &DataSet, sample: &DataSet) -> Result<DepthVector> {
    MahalanobisDepth.compute(queries, sample, &DepthSpec::exact(DepthKind::Mahalanobis))
}

struct SpatialDepth;

/// 1 - |average unit vector from sample points to the query|; a sample
/// point equal to the query contributes the zero vector while the divisor
/// stays m.
impl DepthFunction for SpatialDepth {
    fn kind(&self) -> DepthKind {
        DepthKind::Spatial
    }

    fn compute(
        &self,
        queries: &DataSet,
        sample: &DataSet,
        _spec: &DepthSpec,
    ) -> Result<DepthVector> {
        check_same_dim(queries, sample)?;
        let m = sample.n_rows() as f64;
        let d = sample.dim();
        let mut out = Vec::with_capacity(queries.n_rows());
        for q in queries.rows() {
            let mut acc = vec![0.0; d];
            for p in sample.rows() {
                let diff: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
                let norm = diff.iter().map(|t| t * t).sum::<f64>().sqrt();
                if norm > 0.0 {
                    for (a, t) in acc.iter_mut().zip(&diff) {
                        *a += t / norm;
                    }
                }
            }
            let avg_norm = acc.iter().map(|t| (t / m) * (t / m)).sum::<f64>().sqrt();
            // round-off can push 1 - |avg| a hair outside [0,1]
            out.push((1.0 - avg_norm).clamp(0.0, 1.0));
        }
        Ok(DepthVector::new(out))
    }
}

pub fn spatial_depth(queries: &DataSet, sample: &DataSet) -> Result<DepthVector> {
    SpatialDepth.compute(queries, sample, &DepthSpec::exact(DepthKind::Spatial))
}

pub fn halfspace_depth(queries: &DataSet, sample: &DataSet, spec: &DepthSpec) -> Result<DepthVector> {
    halfspace::HalfspaceDepth.compute(queries, sample, spec)
}

pub fn projection_depth(
    queries: &DataSet,
    sample: &DataSet,
    spec: &DepthSpec,
) -> Result<DepthVector> {
    projection::ProjectionDepth.compute(queries, sample, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[&[f64]]) -> DataSet {
        DataSet::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn dataset_validation() {
        assert!(DataSet::new(vec![]).is_err());
        assert!(DataSet::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(DataSet::new(vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn euclidean_examples() {
        let sample = DataSet::from_univariate(&[0.0, 2.0]).unwrap();
        let q = DataSet::from_univariate(&[1.0, 0.0, 1e6]).unwrap();
        let d = euclidean_depth(&q, &sample).unwrap();
        assert_eq!(d.values()[0], 1.0);
        assert_eq!(d.values()[1], 0.5);
        assert!(d.values()[2] <= 1e-11);
    }

    #[test]
    fn euclidean_rejects_multivariate() {
        let sample = ds(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(euclidean_depth(&sample, &sample).is_err());
    }

    #[test]
    fn mahalanobis_examples() {
        let sample = ds(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0], &[2.0, 2.0]]);
        let q = ds(&[&[1.0, 1.0], &[0.0, 0.0]]);
        let d = mahalanobis_depth(&q, &sample).unwrap();
        assert!((d.values()[0] - 1.0).abs() < 1e-12); // sample mean
        assert!((d.values()[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn mahalanobis_affine_invariance() {
        let mut s = numerics::derive_stream(11, 0);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| numerics::std_normal(&mut s, 3))
            .collect();
        let queries: Vec<Vec<f64>> = (0..10).map(|_| numerics::std_normal(&mut s, 3)).collect();
        let a = [[2.0, 0.5, 0.0], [0.0, 1.5, -0.3], [0.1, 0.0, 0.8]];
        let b = [5.0, -1.0, 2.0];
        let map = |r: &Vec<f64>| -> Vec<f64> {
            (0..3)
                .map(|i| (0..3).map(|j| a[i][j] * r[j]).sum::<f64>() + b[i])
                .collect()
        };
        let d0 = mahalanobis_depth(
            &DataSet::new(queries.clone()).unwrap(),
            &DataSet::new(rows.clone()).unwrap(),
        )
        .unwrap();
        let d1 = mahalanobis_depth(
            &DataSet::new(queries.iter().map(map).collect()).unwrap(),
            &DataSet::new(rows.iter().map(map).collect()).unwrap(),
        )
        .unwrap();
        for (x, y) in d0.values().iter().zip(d1.values()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn mahalanobis_ray_monotonicity() {
        let mut s = numerics::derive_stream(12, 0);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| numerics::std_normal(&mut s, 2)).collect();
        let sample = DataSet::new(rows).unwrap();
        let mu = linalg::column_means(sample.rows());
        let v = [0.6, -0.8];
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let t = 0.3 * k as f64;
            let q = DataSet::new(vec![vec![mu[0] + t * v[0], mu[1] + t * v[1]]]).unwrap();
            let d = mahalanobis_depth(&q, &sample).unwrap().values()[0];
            assert!(d <= prev + 1e-12);
            prev = d;
        }
    }

    #[test]
    fn spatial_examples() {
        let sample = DataSet::from_univariate(&[-1.0, 1.0]).unwrap();
        let q = DataSet::from_univariate(&[0.0, 2.0]).unwrap();
        let d = spatial_depth(&q, &sample).unwrap();
        assert_eq!(d.values()[0], 1.0);
        assert_eq!(d.values()[1], 0.0);
    }

    #[test]
    fn spatial_similarity_invariance() {
        let mut s = numerics::derive_stream(13, 0);
        let rows: Vec<Vec<f64>> = (0..25).map(|_| numerics::std_normal(&mut s, 2)).collect();
        let queries: Vec<Vec<f64>> = (0..8).map(|_| numerics::std_normal(&mut s, 2)).collect();
        // rotation by 0.7 rad, uniform scale 2.5, translation (3, -4)
        let (c, sn) = (0.7f64.cos(), 0.7f64.sin());
        let map = |r: &Vec<f64>| -> Vec<f64> {
            vec![
                2.5 * (c * r[0] - sn * r[1]) + 3.0,
                2.5 * (sn * r[0] + c * r[1]) - 4.0,
            ]
        };
        let d0 = spatial_depth(
            &DataSet::new(queries.clone()).unwrap(),
            &DataSet::new(rows.clone()).unwrap(),
        )
        .unwrap();
        let d1 = spatial_depth(
            &DataSet::new(queries.iter().map(map).collect()).unwrap(),
            &DataSet::new(rows.iter().map(map).collect()).unwrap(),
        )
        .unwrap();
        for (x, y) in d0.values().iter().zip(d1.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dispatch_matches_direct_and_is_deterministic() {
        let sample = DataSet::from_univariate(&[1.0, 2.0, 3.0]).unwrap();
        let spec = DepthSpec::exact(DepthKind::Euclidean);
        let a = compute_depth(&sample, &sample, &spec).unwrap();
        let b = euclidean_depth(&sample, &sample).unwrap();
        assert_eq!(a, b);

        let mut s = numerics::derive_stream(5, 0);
        let rows: Vec<Vec<f64>> = (0..20).map(|_| numerics::std_normal(&mut s, 3)).collect();
        let data = DataSet::new(rows).unwrap();
        let spec = DepthSpec::new(DepthKind::Halfspace, 64, 9).unwrap();
        let a = compute_depth(&data, &data, &spec).unwrap();
        let b = compute_depth(&data, &data, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn direction_prefix_property() {
        let a = sample_directions(50, 3, 7);
        let b = sample_directions(100, 3, 7);
        assert_eq!(&a[..], &b[..50]);
    }

    #[test]
    fn kind_parse_roundtrip() {
        for f in registry() {
            let k: DepthKind = f.kind().as_str().parse().unwrap();
            assert_eq!(k, f.kind());
        }
        assert!("simplicial".parse::<DepthKind>().is_err());
    }
}
