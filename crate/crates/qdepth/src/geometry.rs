//! Convex-hull volume machinery for scale curves: exact in dimensions 1-2,
//! hit-or-miss Monte Carlo with a Gilbert (Frank-Wolfe) point-to-hull
//! distance membership test for d >= 3.

use crate::depth::{compute_depth, DataSet, DepthSpec};
use crate::error::{Error, Result};
use crate::numerics;

pub const HULL_TOL: f64 = 1e-9;
pub const HULL_MAX_ITER: usize = 10_000;
pub const DEFAULT_MC_SAMPLES: usize = 200_000;

/// Dispersion-vs-fraction curve: hull volume of the p-fraction deepest
/// points, for strictly increasing fractions p in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCurve {
    points: Vec<(f64, f64)>,
}

impl ScaleCurve {
    /// (fraction, volume) pairs in the order of the input fractions.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Monotone-chain convex hull, counterclockwise, collinear points excluded
/// from the vertex list. Degenerate inputs yield degenerate hulls (a
/// single point or a 2-vertex segment).
pub fn convex_hull_2d(points: &DataSet) -> Result<Vec<Vec<f64>>> {
    if points.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "convex_hull_2d requires dimension 2, got {}",
            points.dim()
        )));
    }
    let mut pts: Vec<(f64, f64)> = points.rows().iter().map(|r| (r[0], r[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(pts.into_iter().map(|(x, y)| vec![x, y]).collect());
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // all input points collinear: keep the two extreme points
        let (min, max) = (pts[0], pts[pts.len() - 1]);
        return Ok(vec![vec![min.0, min.1], vec![max.0, max.1]]);
    }
    Ok(lower.into_iter().map(|(x, y)| vec![x, y]).collect())
}

fn shoelace_area(vertices: &[Vec<f64>]) -> f64 {
    if vertices.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..vertices.len() {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % vertices.len()];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    twice.abs() / 2.0
}

/// Solve the small linear system A x = b by Gaussian elimination with
/// partial pivoting; returns None when the system is (near-)singular.
#[allow(clippy::needless_range_loop)]
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in (row + 1)..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Exact nearest point of `query` in the convex hull of the simplex
/// vertices: enumerate the faces (vertex subsets), project onto each
/// affine hull, keep the best projection with nonnegative barycentric
/// coordinates. Returns (nearest point, supporting vertex subset).
fn project_onto_simplex(query: &[f64], simplex: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = query.len();
    let n = simplex.len();
    let mut best: Option<(f64, Vec<f64>, Vec<Vec<f64>>)> = None;
    for mask in 1u32..(1 << n) {
        let subset: Vec<&Vec<f64>> = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| &simplex[i]).collect();
        let k = subset.len();
        // affine projection: x = w0 + sum_i mu_i (w_i - w0)
        let u: Vec<Vec<f64>> = subset[1..]
            .iter()
            .map(|w| (0..d).map(|t| w[t] - subset[0][t]).collect())
            .collect();
        let mut lambdas = vec![1.0];
        if k > 1 {
            let gram: Vec<Vec<f64>> = u
                .iter()
                .map(|ui| u.iter().map(|uj| dot(ui, uj)).collect())
                .collect();
            let rhs: Vec<f64> = u
                .iter()
                .map(|ui| (0..d).map(|t| (query[t] - subset[0][t]) * ui[t]).sum())
                .collect();
            let Some(mu) = solve_small(gram, rhs) else {
                continue;
            };
            let lead = 1.0 - mu.iter().sum::<f64>();
            lambdas = std::iter::once(lead).chain(mu).collect();
        }
        if lambdas.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let mut x = vec![0.0; d];
        for (l, w) in lambdas.iter().zip(&subset) {
            for t in 0..d {
                x[t] += l * w[t];
            }
        }
        let dist2: f64 = (0..d).map(|t| (x[t] - query[t]).powi(2)).sum();
        if best.as_ref().is_none_or(|(b, _, _)| dist2 < *b) {
            best = Some((dist2, x, subset.iter().map(|w| (*w).clone()).collect()));
        }
    }
    let (_, x, active) = best.expect("single-vertex subsets always project");
    (x, active)
}

/// Euclidean distance from `query` to the convex hull of `points` via the
/// Gilbert algorithm with a corrective simplex (the min-norm-point
/// refinement): keep a small set of support vertices, project the query
/// exactly onto their hull, and extend toward the best support vertex
/// until the duality gap (current distance minus the support-function
/// lower bound) is at most `tol`. Errors if the gap has not closed within
/// `max_iter` iterations.
pub fn distance_to_hull(
    query: &[f64],
    points: &DataSet,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if query.len() != points.dim() {
        return Err(Error::DimensionMismatch(format!(
            "query has dimension {}, points have {}",
            query.len(),
            points.dim()
        )));
    }
    let d = points.dim();
    let mut simplex: Vec<Vec<f64>> = vec![points.row(0).to_vec()];
    let mut w: Vec<f64> = simplex[0].clone();
    for _ in 0..max_iter {
        let grad: Vec<f64> = (0..d).map(|k| w[k] - query[k]).collect();
        let ub = grad.iter().map(|t| t * t).sum::<f64>().sqrt();
        if ub <= tol {
            return Ok(ub);
        }
        // support vertex minimizing <grad, p>
        let s = points
            .rows()
            .iter()
            .min_by(|a, b| dot(&grad, a).partial_cmp(&dot(&grad, b)).unwrap())
            .expect("nonempty data set");
        // lower bound on the distance: <grad/|grad|, s - query>
        let lb: f64 = (0..d).map(|k| grad[k] * (s[k] - query[k])).sum::<f64>() / ub;
        if ub - lb.max(0.0) <= tol {
            return Ok(ub);
        }
        if simplex.iter().any(|v| v == s) {
            // the best support is already spanned: the projection is as
            // good as the vertex set allows, so the gap is pure round-off
            return Ok(ub);
        }
        simplex.push(s.clone());
        let (x, active) = project_onto_simplex(query, &simplex);
        w = x;
        simplex = active;
    }
    Err(Error::Numeric(format!(
        "distance_to_hull did not converge in {max_iter} iterations"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Convex-hull volume: exact range (d = 1) or shoelace area of the
/// monotone-chain hull (d = 2); hit-or-miss Monte Carlo in the bounding
/// box with `distance_to_hull <= HULL_TOL` membership for d >= 3.
pub fn hull_volume(points: &DataSet, mc_samples: usize, seed: u64) -> Result<f64> {
    match points.dim() {
        1 => {
            let vals: Vec<f64> = points.rows().iter().map(|r| r[0]).collect();
            let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(max - min)
        }
        2 => Ok(shoelace_area(&convex_hull_2d(points)?)),
        d => {
            if mc_samples == 0 {
                return Err(Error::InvalidArgument(
                    "hull_volume: mc_samples must be >= 1".into(),
                ));
            }
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for r in points.rows() {
                for k in 0..d {
                    lo[k] = lo[k].min(r[k]);
                    hi[k] = hi[k].max(r[k]);
                }
            }
            let box_volume: f64 = (0..d).map(|k| hi[k] - lo[k]).product();
            if box_volume <= 0.0 {
                return Ok(0.0);
            }
            let mut stream = numerics::derive_stream(seed, 0);
            let mut hits = 0usize;
            let mut point = vec![0.0; d];
            for _ in 0..mc_samples {
                for k in 0..d {
                    point[k] = lo[k] + (hi[k] - lo[k]) * stream.next_uniform();
                }
                if distance_to_hull(&point, points, HULL_TOL, HULL_MAX_ITER)? <= HULL_TOL {
                    hits += 1;
                }
            }
            Ok(box_volume * hits as f64 / mc_samples as f64)
        }
    }
}

/// Scale curve: depth-sort the sample (descending, ties broken by original
/// row index), and for each fraction p record the hull volume of the
/// ceil(p * m) deepest points.
pub fn scale_curve(
    sample: &DataSet,
    spec: &DepthSpec,
    fractions: &[f64],
    mc_samples: usize,
    seed: u64,
) -> Result<ScaleCurve> {
    if fractions.is_empty() {
        return Err(Error::EmptyInput("scale_curve: no fractions".into()));
    }
    for w in fractions.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument(
                "scale_curve: fractions must be strictly increasing".into(),
            ));
        }
    }
    if fractions[0] <= 0.0 || *fractions.last().expect("nonempty") > 1.0 {
        return Err(Error::InvalidArgument(
            "scale_curve: fractions must lie in (0, 1]".into(),
        ));
    }
    let depths = compute_depth(sample, sample, spec)?;
    let mut order: Vec<usize> = (0..sample.n_rows()).collect();
    order.sort_by(|&i, &j| {
        depths.values()[j]
            .partial_cmp(&depths.values()[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let m = sample.n_rows();
    let mut points = Vec::with_capacity(fractions.len());
    for &p in fractions {
        let keep = ((p * m as f64).ceil() as usize).clamp(1, m);
        let subset =
            DataSet::new(order[..keep].iter().map(|&i| sample.row(i).to_vec()).collect())?;
        points.push((p, hull_volume(&subset, mc_samples, seed)?));
    }
    Ok(ScaleCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::DepthKind;

    fn ds(rows: &[[f64; 2]]) -> DataSet {
        DataSet::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn hull_square_plus_center() {
        let data = ds(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]]);
        let hull = convex_hull_2d(&data).unwrap();
        assert_eq!(hull.len(), 4);
        assert!((shoelace_area(&hull) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hull_collinear_degenerates_to_segment() {
        let data = ds(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let hull = convex_hull_2d(&data).unwrap();
        assert_eq!(hull.len(), 2);
        assert_eq!(shoelace_area(&hull), 0.0);
    }

    #[test]
    fn hull_disk_area_approaches_pi() {
        let mut s = numerics::derive_stream(3, 0);
        let mut rows = Vec::new();
        while rows.len() < 1000 {
            let x = 2.0 * s.next_uniform() - 1.0;
            let y = 2.0 * s.next_uniform() - 1.0;
            if x * x + y * y <= 1.0 {
                rows.push(vec![x, y]);
            }
        }
        let area = shoelace_area(&convex_hull_2d(&DataSet::new(rows).unwrap()).unwrap());
        assert!((2.9..=std::f64::consts::PI).contains(&area), "area={area}");
    }

    #[test]
    fn hull_area_rigid_motion_invariant() {
        let mut s = numerics::derive_stream(4, 0);
        let rows: Vec<Vec<f64>> = (0..60).map(|_| numerics::std_normal(&mut s, 2)).collect();
        let a0 = shoelace_area(&convex_hull_2d(&DataSet::new(rows.clone()).unwrap()).unwrap());
        let (c, sn) = (1.1f64.cos(), 1.1f64.sin());
        let moved: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![c * r[0] - sn * r[1] + 5.0, sn * r[0] + c * r[1] - 2.0])
            .collect();
        let a1 = shoelace_area(&convex_hull_2d(&DataSet::new(moved).unwrap()).unwrap());
        assert!((a0 - a1).abs() < 1e-9);
    }

    #[test]
    fn distance_examples() {
        let sq = ds(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        for v in sq.rows() {
            assert!(distance_to_hull(v, &sq, HULL_TOL, HULL_MAX_ITER).unwrap() <= 1e-4);
        }
        // interior convex combination
        assert!(distance_to_hull(&[0.25, 0.75], &sq, HULL_TOL, HULL_MAX_ITER).unwrap() <= 1e-4);
        // outside, facing an edge
        let d = distance_to_hull(&[2.0, 0.5], &sq, HULL_TOL, HULL_MAX_ITER).unwrap();
        assert!((d - 1.0).abs() < 1e-6, "d={d}");
    }

    #[test]
    fn volume_examples() {
        let sq = ds(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(hull_volume(&sq, 10, 0).unwrap(), 1.0);
        let line = DataSet::from_univariate(&[1.0, 2.0, 5.0]).unwrap();
        assert_eq!(hull_volume(&line, 10, 0).unwrap(), 4.0);
        let cube: Vec<Vec<f64>> = (0..8)
            .map(|i| vec![(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64])
            .collect();
        let v = hull_volume(&DataSet::new(cube).unwrap(), 200_000, 0).unwrap();
        assert!((v - 1.0).abs() <= 0.02, "v={v}");
    }

    #[test]
    fn membership_cross_validates_distance() {
        let mut s = numerics::derive_stream(8, 0);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| numerics::std_normal(&mut s, 3)).collect();
        let data = DataSet::new(rows).unwrap();
        for _ in 0..50 {
            let q = numerics::std_normal(&mut s, 3);
            let dist = distance_to_hull(&q, &data, HULL_TOL, HULL_MAX_ITER).unwrap();
            // hit-or-miss membership and the distance agree at the tolerance
            if dist > 1e-6 {
                assert!(dist > HULL_TOL);
            }
        }
    }

    #[test]
    fn scale_curve_monotone_and_validated() {
        let mut s = numerics::derive_stream(9, 0);
        let rows: Vec<Vec<f64>> = (0..50).map(|_| numerics::std_normal(&mut s, 2)).collect();
        let data = DataSet::new(rows).unwrap();
        let spec = DepthSpec::exact(DepthKind::Mahalanobis);
        let fractions = [0.2, 0.4, 0.6, 0.8, 1.0];
        let curve = scale_curve(&data, &spec, &fractions, 1000, 0).unwrap();
        let pts = curve.points();
        assert_eq!(pts.len(), 5);
        for w in pts.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        // p = 1 equals the full-sample hull volume
        assert_eq!(pts[4].1, hull_volume(&data, 1000, 0).unwrap());

        assert!(scale_curve(&data, &spec, &[], 10, 0).is_err());
        assert!(scale_curve(&data, &spec, &[0.5, 0.5], 10, 0).is_err());
        assert!(scale_curve(&data, &spec, &[0.0, 1.0], 10, 0).is_err());
        assert!(scale_curve(&data, &spec, &[0.5, 1.5], 10, 0).is_err());
    }
}
