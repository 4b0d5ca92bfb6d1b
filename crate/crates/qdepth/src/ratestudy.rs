//! Seeded Monte Carlo harness: simulate null data, aggregate remainder
//! magnitudes or statistic distributions across sample sizes, and fit
//! log-log slopes against the claimed asymptotic orders.

use crate::decomposition::{decompose, population_mahalanobis_depth, sum_product_variants, PopulationModel};
use crate::depth::{mahalanobis_depth, DataSet, DepthKind, DepthSpec};
use crate::error::{Error, Result};
use crate::numerics::{self, chisq_cdf, fit_loglog_slope, ks_distance, normal_cdf};
use crate::qstat::{normalize, q_pair, variant_stats};

/// Which per-replicate quantity a study measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyQuantity {
    /// |Q(F_m,G_n) + Q(G_n,F_m) - 1|
    SumDev,
    /// |Q(F_m,G_n) - 1/2|
    QDev,
    /// |R_mn| from the Hoeffding decomposition (Mahalanobis only).
    HoeffdingRemainder,
    /// |GKN_mn| remainder (Mahalanobis only).
    GknRemainder,
    /// max over a fixed grid of |D(x;F_m) - D(x;F)| (Mahalanobis only).
    SupDepthError,
    /// Distribution of z_fg: rejection rate at |z| > 1.96 and KS vs N(0,1).
    NullCalibration,
}

impl StudyQuantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            StudyQuantity::SumDev => "sum_dev",
            StudyQuantity::QDev => "q_dev",
            StudyQuantity::HoeffdingRemainder => "hoeffding_remainder",
            StudyQuantity::GknRemainder => "gkn_remainder",
            StudyQuantity::SupDepthError => "sup_depth_error",
            StudyQuantity::NullCalibration => "null_calibration",
        }
    }

    /// Quantities summarized by a fitted log-log slope.
    pub fn is_slope_quantity(&self) -> bool {
        !matches!(self, StudyQuantity::NullCalibration)
    }

    fn needs_analytic_oracle(&self) -> bool {
        matches!(
            self,
            StudyQuantity::HoeffdingRemainder
                | StudyQuantity::GknRemainder
                | StudyQuantity::SupDepthError
        )
    }
}

impl std::str::FromStr for StudyQuantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const ALL: [StudyQuantity; 6] = [
            StudyQuantity::SumDev,
            StudyQuantity::QDev,
            StudyQuantity::HoeffdingRemainder,
            StudyQuantity::GknRemainder,
            StudyQuantity::SupDepthError,
            StudyQuantity::NullCalibration,
        ];
        ALL.iter().copied().find(|q| q.as_str() == s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown study quantity '{s}' (expected one of: {})",
                ALL.map(|q| q.as_str()).join(", ")
            ))
        })
    }
}

/// Experiment descriptor: sizes are the values of m = n.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub depth: DepthSpec,
    pub quantity: StudyQuantity,
}

impl StudyConfig {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("study: dim must be >= 1".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("study: reps must be >= 1".into()));
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "study: sizes must be nonempty and strictly increasing".into(),
            ));
        }
        if self.quantity.is_slope_quantity() && self.sizes.len() < 3 {
            return Err(Error::InvalidArgument(
                "study: slope quantities need at least 3 sizes".into(),
            ));
        }
        if self.quantity.needs_analytic_oracle() && self.depth.kind != DepthKind::Mahalanobis {
            return Err(Error::InvalidArgument(format!(
                "study quantity {} requires mahalanobis depth (analytic oracle)",
                self.quantity.as_str()
            )));
        }
        Ok(())
    }
}

/// Extra outputs of a null-calibration study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullCalibration {
    /// Fraction of replicates with |z_fg| > 1.96 at the largest size.
    pub rejection_rate: f64,
    /// KS distance of the z_fg values against the standard normal.
    pub ks_z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub per_size_mean_abs: Vec<(usize, f64)>,
    /// Fitted log-log slope; absent for null-calibration studies.
    pub slope: Option<f64>,
    /// Present only for null-calibration studies.
    pub null_calibration: Option<NullCalibration>,
}

fn draw_pair(stream: &mut numerics::RngStream, size: usize, dim: usize) -> (DataSet, DataSet) {
    let x: Vec<Vec<f64>> = (0..size).map(|_| numerics::std_normal(stream, dim)).collect();
    let y: Vec<Vec<f64>> = (0..size).map(|_| numerics::std_normal(stream, dim)).collect();
    (
        DataSet::new(x).expect("generated data is valid"),
        DataSet::new(y).expect("generated data is valid"),
    )
}

/// Fixed 100-point evaluation grid for the sup-depth-error study, drawn
/// from the stream id one past the replicate range so it never collides.
fn evaluation_grid(config: &StudyConfig) -> DataSet {
    let id = (config.sizes.len() * config.reps) as u64;
    let mut stream = numerics::derive_stream(config.seed, id);
    let rows: Vec<Vec<f64>> = (0..100)
        .map(|_| numerics::std_normal(&mut stream, config.dim))
        .collect();
    DataSet::new(rows).expect("generated grid is valid")
}

/// Run the configured Monte Carlo study. Replicate (size_index, rep) uses
/// the stream with id `size_index * reps + rep`, so results are
/// deterministic and independent of execution order.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let model = PopulationModel::standard(config.dim)?;
    let grid = if config.quantity == StudyQuantity::SupDepthError {
        Some(evaluation_grid(config))
    } else {
        None
    };

    let mut per_size_mean_abs = Vec::with_capacity(config.sizes.len());
    let mut last_z_values: Vec<f64> = Vec::new();
    for (size_index, &size) in config.sizes.iter().enumerate() {
        let mut acc = 0.0;
        let mut z_values = Vec::new();
        for rep in 0..config.reps {
            let id = (size_index * config.reps + rep) as u64;
            let mut stream = numerics::derive_stream(config.seed, id);
            let value = match config.quantity {
                StudyQuantity::SumDev => {
                    let (x, y) = draw_pair(&mut stream, size, config.dim);
                    let pair = q_pair(&x, &y, &config.depth)?;
                    sum_product_variants(&pair).0.abs()
                }
                StudyQuantity::QDev => {
                    let (x, y) = draw_pair(&mut stream, size, config.dim);
                    let pair = q_pair(&x, &y, &config.depth)?;
                    (pair.q_fg - 0.5).abs()
                }
                StudyQuantity::HoeffdingRemainder => {
                    let (x, y) = draw_pair(&mut stream, size, config.dim);
                    decompose(&x, &y, &model)?.hoeffding_remainder.abs()
                }
                StudyQuantity::GknRemainder => {
                    let (x, y) = draw_pair(&mut stream, size, config.dim);
                    decompose(&x, &y, &model)?.gkn_remainder.abs()
                }
                StudyQuantity::SupDepthError => {
                    let grid = grid.as_ref().expect("grid prepared above");
                    let x: Vec<Vec<f64>> = (0..size)
                        .map(|_| numerics::std_normal(&mut stream, config.dim))
                        .collect();
                    let x = DataSet::new(x).expect("generated data is valid");
                    let sample = mahalanobis_depth(grid, &x)?;
                    let mut worst = 0.0f64;
                    for (g, &s) in grid.rows().iter().zip(sample.values()) {
                        let p = population_mahalanobis_depth(g, &model)?;
                        worst = worst.max((s - p).abs());
                    }
                    worst
                }
                StudyQuantity::NullCalibration => {
                    let (x, y) = draw_pair(&mut stream, size, config.dim);
                    let pair = q_pair(&x, &y, &config.depth)?;
                    let z = normalize(pair.q_fg, pair.m, pair.n);
                    z_values.push(z);
                    z.abs()
                }
            };
            acc += value;
        }
        per_size_mean_abs.push((size, acc / config.reps as f64));
        if config.quantity == StudyQuantity::NullCalibration {
            last_z_values = z_values;
        }
    }

    let slope = if config.quantity.is_slope_quantity() {
        Some(fit_loglog_slope(&per_size_mean_abs)?)
    } else {
        None
    };
    let null_calibration = if config.quantity == StudyQuantity::NullCalibration {
        let rejection_rate = last_z_values.iter().filter(|z| z.abs() > 1.96).count() as f64
            / last_z_values.len() as f64;
        let ks_z = ks_distance(&last_z_values, normal_cdf);
        Some(NullCalibration {
            rejection_rate,
            ks_z,
        })
    } else {
        None
    };
    Ok(StudyResult {
        per_size_mean_abs,
        slope,
        null_calibration,
    })
}

/// KS distances of the empirical laws of M and (M*)^2 against chi-square
/// with 1 degree of freedom, over `reps` replicates at the largest size.
/// With reps = 1 the one-sample distance is returned (degenerate but
/// well defined).
pub fn chi_square_attraction_check(config: &StudyConfig) -> Result<(f64, f64)> {
    if config.dim == 0 || config.reps == 0 || config.sizes.is_empty() {
        return Err(Error::InvalidArgument(
            "chi_square_attraction_check: invalid config".into(),
        ));
    }
    let exact = matches!(config.depth.kind, DepthKind::Mahalanobis)
        || (config.depth.kind == DepthKind::Euclidean && config.dim == 1);
    if !exact {
        return Err(Error::InvalidArgument(
            "chi_square_attraction_check requires an exact depth (mahalanobis, or euclidean with dim 1)"
                .into(),
        ));
    }
    let size = *config.sizes.last().expect("nonempty sizes");
    let size_index = config.sizes.len() - 1;
    let mut m_values = Vec::with_capacity(config.reps);
    let mut mstar_sq = Vec::with_capacity(config.reps);
    for rep in 0..config.reps {
        let id = (size_index * config.reps + rep) as u64;
        let mut stream = numerics::derive_stream(config.seed, id);
        let (x, y) = draw_pair(&mut stream, size, config.dim);
        let pair = q_pair(&x, &y, &config.depth)?;
        let (m_stat, m_star) = variant_stats(&pair);
        m_values.push(m_stat);
        mstar_sq.push(m_star * m_star);
    }
    let chi1 = |x: f64| chisq_cdf(x.max(0.0), 1).expect("valid chi-square argument");
    Ok((ks_distance(&m_values, chi1), ks_distance(&mstar_sq, chi1)))
}
