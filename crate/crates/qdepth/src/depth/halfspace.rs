//! Halfspace (Tukey) depth: minimum empirical mass of a closed halfspace
//! containing the query. Exact in dimension 1 (order statistics) and 2
//! (angular sweep over critical directions); direction-sampled for d >= 3.

use super::{check_same_dim, dot, sample_directions, DataSet, DepthFunction, DepthKind, DepthSpec, DepthVector};
use crate::error::{Error, Result};

pub(super) struct HalfspaceDepth;

impl DepthFunction for HalfspaceDepth {
    fn kind(&self) -> DepthKind {
        DepthKind::Halfspace
    }

    fn compute(
        &self,
        queries: &DataSet,
        sample: &DataSet,
        spec: &DepthSpec,
    ) -> Result<DepthVector> {
        check_same_dim(queries, sample)?;
        let values = match sample.dim() {
            1 => queries
                .rows()
                .iter()
                .map(|q| univariate(q[0], sample))
                .collect(),
            2 => queries
                .rows()
                .iter()
                .map(|q| exact_2d(q, sample))
                .collect(),
            _ => approximate(queries, sample, spec),
        };
        Ok(DepthVector::new(values))
    }
}

fn univariate(x: f64, sample: &DataSet) -> f64 {
    let m = sample.n_rows();
    let le = sample.rows().iter().filter(|r| r[0] <= x).count();
    let ge = sample.rows().iter().filter(|r| r[0] >= x).count();
    le.min(ge) as f64 / m as f64
}

/// Exact bivariate depth. For each critical direction (perpendicular to a
/// query-to-point vector) the closed-halfplane count is evaluated together
/// with its two one-sided limits, obtained by splitting the boundary points
/// into the two rays of the critical line. The minimum over the circle of
/// directions is attained at one of these limits.
fn exact_2d(q: &[f64], sample: &DataSet) -> f64 {
    let m = sample.n_rows();
    let mut coincident = 0usize;
    let mut diffs: Vec<(f64, f64)> = Vec::with_capacity(m);
    for p in sample.rows() {
        let dx = p[0] - q[0];
        let dy = p[1] - q[1];
        if dx == 0.0 && dy == 0.0 {
            coincident += 1;
        } else {
            diffs.push((dx, dy));
        }
    }
    if diffs.is_empty() {
        return 1.0;
    }
    let mut best = usize::MAX;
    for &(dx, dy) in &diffs {
        // boundary line through the query, direction (dx, dy)
        let u = (-dy, dx);
        let mut n_neg = 0usize;
        let mut n_pos = 0usize;
        let mut ray_fwd = 0usize; // boundary points along +(dx, dy)
        let mut ray_back = 0usize; // boundary points along -(dx, dy)
        for &(ex, ey) in &diffs {
            let s = u.0 * ex + u.1 * ey;
            if s < 0.0 {
                n_neg += 1;
            } else if s > 0.0 {
                n_pos += 1;
            } else if dx * ex + dy * ey > 0.0 {
                ray_fwd += 1;
            } else {
                ray_back += 1;
            }
        }
        let drop = ray_fwd.min(ray_back);
        best = best
            .min(n_neg + drop)
            .min(n_pos + drop);
    }
    (coincident + best) as f64 / m as f64
}

fn approximate(queries: &DataSet, sample: &DataSet, spec: &DepthSpec) -> Vec<f64> {
    let m = sample.n_rows();
    let dirs = sample_directions(spec.directions, sample.dim(), spec.seed);
    // sorted sample projections per direction, counts by binary search
    let sorted: Vec<Vec<f64>> = dirs
        .iter()
        .map(|u| {
            let mut p: Vec<f64> = sample.rows().iter().map(|r| dot(u, r)).collect();
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            p
        })
        .collect();
    queries
        .rows()
        .iter()
        .map(|q| {
            let mut best = m;
            for (u, proj) in dirs.iter().zip(&sorted) {
                let x = dot(u, q);
                let le = proj.partition_point(|&v| v <= x);
                let lt = proj.partition_point(|&v| v < x);
                best = best.min(le).min(m - lt);
            }
            best as f64 / m as f64
        })
        .collect()
}

/// O(m^2) brute-force oracle for the exact bivariate depth: evaluates the
/// closed-halfplane mass at every direction perpendicular to a
/// query-to-point vector and at small angular perturbations of each.
pub fn halfspace_depth_bruteforce_2d(query: &[f64], sample: &DataSet) -> Result<f64> {
    if sample.dim() != 2 || query.len() != 2 {
        return Err(Error::DimensionMismatch(
            "halfspace_depth_bruteforce_2d requires dimension 2".into(),
        ));
    }
    if sample.n_rows() > 500 {
        return Err(Error::InvalidArgument(format!(
            "brute-force oracle limited to 500 points, got {}",
            sample.n_rows()
        )));
    }
    let m = sample.n_rows();
    let diffs: Vec<(f64, f64)> = sample
        .rows()
        .iter()
        .map(|p| (p[0] - query[0], p[1] - query[1]))
        .collect();
    let mut best = m;
    let eps = 1e-7;
    for &(dx, dy) in &diffs {
        if dx == 0.0 && dy == 0.0 {
            continue;
        }
        let base = (-dy, dx);
        // unperturbed critical direction plus a small rotation either way
        for rot in [0.0, eps, -eps] {
            let (c, s) = (f64::cos(rot), f64::sin(rot));
            let u = (c * base.0 - s * base.1, s * base.0 + c * base.1);
            let le = diffs.iter().filter(|&&(ex, ey)| u.0 * ex + u.1 * ey <= 0.0).count();
            let ge = diffs.iter().filter(|&&(ex, ey)| u.0 * ex + u.1 * ey >= 0.0).count();
            best = best.min(le).min(ge);
        }
    }
    Ok(best as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::halfspace_depth;
    use crate::numerics;

    #[test]
    fn univariate_examples() {
        let sample = DataSet::from_univariate(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let q = DataSet::from_univariate(&[3.0, 0.0]).unwrap();
        let spec = DepthSpec::exact(DepthKind::Halfspace);
        let d = halfspace_depth(&q, &sample, &spec).unwrap();
        assert_eq!(d.values()[0], 0.6);
        assert_eq!(d.values()[1], 0.0);
    }

    #[test]
    fn centroid_of_triangle() {
        let sample = DataSet::new(vec![
            vec![0.0, 0.0],
            vec![3.0, 0.0],
            vec![0.0, 3.0],
        ])
        .unwrap();
        let q = DataSet::new(vec![vec![1.0, 1.0]]).unwrap();
        let spec = DepthSpec::exact(DepthKind::Halfspace);
        let d = halfspace_depth(&q, &sample, &spec).unwrap();
        assert!((d.values()[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_edge_cases() {
        let one = DataSet::new(vec![vec![2.0, 5.0]]).unwrap();
        assert_eq!(halfspace_depth_bruteforce_2d(&[2.0, 5.0], &one).unwrap(), 1.0);
        let sq = DataSet::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        assert_eq!(halfspace_depth_bruteforce_2d(&[10.0, 10.0], &sq).unwrap(), 0.0);
    }

    #[test]
    fn bruteforce_size_guard() {
        let rows: Vec<Vec<f64>> = (0..501).map(|i| vec![i as f64, 0.5 * i as f64]).collect();
        let big = DataSet::new(rows).unwrap();
        assert!(halfspace_depth_bruteforce_2d(&[0.0, 0.0], &big).is_err());
    }

    #[test]
    fn exact_2d_matches_bruteforce() {
        let spec = DepthSpec::exact(DepthKind::Halfspace);
        let mut s = numerics::derive_stream(99, 0);
        for _ in 0..200 {
            let m = 3 + (s.next_u64() % 18) as usize;
            let rows: Vec<Vec<f64>> =
                (0..m).map(|_| numerics::std_normal(&mut s, 2)).collect();
            let sample = DataSet::new(rows).unwrap();
            let q = numerics::std_normal(&mut s, 2);
            let queries = DataSet::new(vec![q.clone()]).unwrap();
            let fast = halfspace_depth(&queries, &sample, &spec).unwrap().values()[0];
            let slow = halfspace_depth_bruteforce_2d(&q, &sample).unwrap();
            assert_eq!(fast, slow, "q={q:?}");
        }
    }

    #[test]
    fn more_directions_never_increase_depth() {
        let mut s = numerics::derive_stream(17, 0);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| numerics::std_normal(&mut s, 4)).collect();
        let data = DataSet::new(rows).unwrap();
        let d1 = halfspace_depth(
            &data,
            &data,
            &DepthSpec::new(DepthKind::Halfspace, 100, 3).unwrap(),
        )
        .unwrap();
        let d2 = halfspace_depth(
            &data,
            &data,
            &DepthSpec::new(DepthKind::Halfspace, 400, 3).unwrap(),
        )
        .unwrap();
        for (a, b) in d1.values().iter().zip(d2.values()) {
            assert!(b <= a);
        }
    }
}
