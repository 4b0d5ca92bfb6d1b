//! Command-line front end: CSV ingestion, command dispatch, JSON/CSV
//! emission, and the exit-code contract (0 success, 2 input error,
//! 3 numeric failure).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::cluster;
use crate::decomposition::{decompose, PopulationModel};
use crate::depth::{compute_depth, DataSet, DepthSpec, DEFAULT_DIRECTIONS};
use crate::error::{Error, Result};
use crate::geometry::{scale_curve, DEFAULT_MC_SAMPLES};
use crate::qstat::{run_test, TestReport};
use crate::ratestudy::{chi_square_attraction_check, run_study, StudyConfig, StudyQuantity};

#[derive(Parser)]
#[command(
    name = "qdepth",
    about = "Depth-based multivariate two-sample homogeneity testing",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DepthArgs {
    /// Depth function: euclidean, mahalanobis, halfspace, projection, spatial
    #[arg(long)]
    depth: String,
    /// Direction count K for approximate halfspace / projection depth
    #[arg(long, default_value_t = DEFAULT_DIRECTIONS)]
    directions: usize,
    /// Master seed for all randomized parts
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DepthArgs {
    fn spec(&self) -> Result<DepthSpec> {
        DepthSpec::new(self.depth.parse()?, self.directions, self.seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Two-sample homogeneity test; emits a TestReport as JSON
    Test {
        /// CSV with the first sample (reference of Q(F_m, G_n))
        #[arg(long)]
        x: PathBuf,
        /// CSV with the second sample
        #[arg(long)]
        y: PathBuf,
        #[command(flatten)]
        depth: DepthArgs,
        /// Skip the first row of each CSV
        #[arg(long)]
        header: bool,
        /// Human-readable summary on standard error
        #[arg(long)]
        verbose: bool,
    },
    /// Depth of query points with respect to a sample; one value per line
    Depth {
        /// CSV with the reference sample
        #[arg(long)]
        data: PathBuf,
        /// CSV with the query points
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        depth: DepthArgs,
        #[arg(long)]
        header: bool,
    },
    /// Monte Carlo rate / calibration study; emits a StudyResult as JSON
    RateStudy {
        /// Quantity: sum_dev, q_dev, hoeffding_remainder, gkn_remainder,
        /// sup_depth_error, null_calibration, or chi_square_attraction
        #[arg(long)]
        quantity: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Sample sizes m = n, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256, 512, 1024])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[command(flatten)]
        depth: DepthArgs,
        /// Also write a plot-ready CSV table (size, mean_abs) to this path
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Scale curve of a sample; emits CSV `p,volume`
    ScaleCurve {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        depth: DepthArgs,
        /// Fractions p in (0,1], comma separated, strictly increasing
        #[arg(long, value_delimiter = ',', default_values_t = [0.1f64, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0])]
        fractions: Vec<f64>,
        /// Hit-or-miss samples for d >= 3 hull volume
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        mc_samples: usize,
        #[arg(long)]
        header: bool,
    },
    /// Fuzzy c-means clustering; emits a JSON summary
    Fcm {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        clusters: usize,
        #[arg(long, default_value_t = cluster::DEFAULT_FUZZIFIER)]
        fuzzifier: f64,
        #[arg(long, default_value_t = cluster::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = cluster::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the m x c membership matrix as CSV
        #[arg(long)]
        memberships_out: Option<PathBuf>,
        /// Write the hard labels (one per line) as CSV
        #[arg(long)]
        labels_out: Option<PathBuf>,
        #[arg(long)]
        header: bool,
    },
    /// Decompositions of Q - 1/2 under a Gaussian model; emits JSON
    Decompose {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Model mean, comma separated (default: zero vector)
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        mean: Option<Vec<f64>>,
        /// CSV with the model covariance matrix (default: identity)
        #[arg(long)]
        cov: Option<PathBuf>,
        #[arg(long)]
        header: bool,
    },
}

/// Format a float with 9 significant digits, deterministically.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let scale = 10f64.powi(8 - exp);
    let rounded = (v * scale).round() / scale;
    let s = format!("{rounded}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        // keep JSON numbers recognizably floating point
        format!("{s}.0")
    }
}

/// Parse a CSV of reals into a DataSet, with row/column diagnostics.
pub fn parse_csv(path: &std::path::Path, has_header: bool) -> Result<DataSet> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let input_error = |message: String| Error::Input {
        path: path.display().to_string(),
        message,
    };
    let mut rows = Vec::new();
    let mut width: Option<usize> = None;
    for (line_no, line) in text.lines().enumerate() {
        if line_no == 0 && has_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                input_error(format!(
                    "non-numeric cell '{}' at row {}, column {}",
                    cell.trim(),
                    line_no + 1,
                    col + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(input_error(format!(
                    "non-finite value at row {}, column {}",
                    line_no + 1,
                    col + 1
                )));
            }
            row.push(v);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(input_error(format!(
                    "ragged row {}: {} columns, expected {w}",
                    line_no + 1,
                    row.len()
                )));
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(input_error("no data rows".into()));
    }
    DataSet::new(rows)
}

fn test_report_json(report: &TestReport) -> String {
    format!(
        "{{\"q_fg\":{},\"q_gf\":{},\"z_fg\":{},\"z_gf\":{},\"m_stat\":{},\"m_star\":{},\"p_q_fg\":{},\"p_q_gf\":{},\"p_m\":{},\"p_m_star\":{},\"depth\":\"{}\",\"m\":{},\"n\":{}}}",
        sig9(report.qpair.q_fg),
        sig9(report.qpair.q_gf),
        sig9(report.z_fg),
        sig9(report.z_gf),
        sig9(report.m_stat),
        sig9(report.m_star),
        sig9(report.p_q_fg),
        sig9(report.p_q_gf),
        sig9(report.p_m),
        sig9(report.p_m_star),
        report.depth_spec.kind.as_str(),
        report.qpair.m,
        report.qpair.n
    )
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run_command(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Test {
            x,
            y,
            depth,
            header,
            verbose,
        } => {
            let spec = depth.spec()?;
            let xs = parse_csv(&x, header)?;
            let ys = parse_csv(&y, header)?;
            let report = run_test(&xs, &ys, &spec)?;
            if verbose {
                eprintln!(
                    "test: depth={} directions={} seed={} m={} n={} d={}",
                    spec.kind.as_str(),
                    spec.directions,
                    spec.seed,
                    xs.n_rows(),
                    ys.n_rows(),
                    xs.dim()
                );
                eprintln!(
                    "  q_fg={:.6} q_gf={:.6} p(Q)={:.4} p(Q*)={:.4} p(M)={:.4} p(M*)={:.4}",
                    report.qpair.q_fg,
                    report.qpair.q_gf,
                    report.p_q_fg,
                    report.p_q_gf,
                    report.p_m,
                    report.p_m_star
                );
            }
            println!("{}", test_report_json(&report));
        }
        Command::Depth {
            data,
            points,
            depth,
            header,
        } => {
            let spec = depth.spec()?;
            let sample = parse_csv(&data, header)?;
            let queries = parse_csv(&points, header)?;
            let values = compute_depth(&queries, &sample, &spec)?;
            let mut out = String::new();
            for v in values.values() {
                out.push_str(&sig9(*v));
                out.push('\n');
            }
            print!("{out}");
        }
        Command::RateStudy {
            quantity,
            dim,
            sizes,
            reps,
            depth,
            csv_out,
        } => {
            let spec = depth.spec()?;
            if quantity == "chi_square_attraction" {
                let config = StudyConfig {
                    dim,
                    sizes,
                    reps,
                    seed: depth.seed,
                    depth: spec,
                    quantity: StudyQuantity::NullCalibration,
                };
                let (ks_m, ks_mstar_sq) = chi_square_attraction_check(&config)?;
                println!(
                    "{{\"quantity\":\"chi_square_attraction\",\"dim\":{dim},\"size\":{},\"reps\":{reps},\"seed\":{},\"depth\":\"{}\",\"ks_m\":{},\"ks_mstar_sq\":{}}}",
                    config.sizes.last().expect("validated nonempty"),
                    depth.seed,
                    spec.kind.as_str(),
                    sig9(ks_m),
                    sig9(ks_mstar_sq)
                );
                return Ok(());
            }
            let config = StudyConfig {
                dim,
                sizes,
                reps,
                seed: depth.seed,
                depth: spec,
                quantity: quantity.parse()?,
            };
            let result = run_study(&config)?;
            if let Some(path) = csv_out {
                let mut csv = String::from("size,mean_abs\n");
                for &(size, mean) in &result.per_size_mean_abs {
                    csv.push_str(&format!("{size},{}\n", sig9(mean)));
                }
                write_file(&path, &csv)?;
            }
            let per_size = result
                .per_size_mean_abs
                .iter()
                .map(|&(size, mean)| format!("[{size},{}]", sig9(mean)))
                .collect::<Vec<_>>()
                .join(",");
            let slope = result
                .slope
                .map(sig9)
                .unwrap_or_else(|| "null".to_string());
            let extra = result
                .null_calibration
                .map(|c| {
                    format!(
                        ",\"rejection_rate\":{},\"ks_z\":{}",
                        sig9(c.rejection_rate),
                        sig9(c.ks_z)
                    )
                })
                .unwrap_or_default();
            println!(
                "{{\"quantity\":\"{}\",\"dim\":{dim},\"reps\":{reps},\"seed\":{},\"depth\":\"{}\",\"per_size_mean_abs\":[{per_size}],\"slope\":{slope}{extra}}}",
                config.quantity.as_str(),
                depth.seed,
                config.depth.kind.as_str()
            );
        }
        Command::ScaleCurve {
            data,
            depth,
            fractions,
            mc_samples,
            header,
        } => {
            let spec = depth.spec()?;
            let sample = parse_csv(&data, header)?;
            let curve = scale_curve(&sample, &spec, &fractions, mc_samples, depth.seed)?;
            let mut out = String::from("p,volume\n");
            for &(p, v) in curve.points() {
                out.push_str(&format!("{},{}\n", sig9(p), sig9(v)));
            }
            print!("{out}");
        }
        Command::Fcm {
            data,
            clusters,
            fuzzifier,
            tol,
            max_iter,
            seed,
            memberships_out,
            labels_out,
            header,
        } => {
            let sample = parse_csv(&data, header)?;
            let result = cluster::fcm(&sample, clusters, fuzzifier, tol, max_iter, seed)?;
            if let Some(path) = memberships_out {
                let mut csv = String::new();
                for row in &result.memberships {
                    let line = row.iter().map(|v| sig9(*v)).collect::<Vec<_>>().join(",");
                    csv.push_str(&line);
                    csv.push('\n');
                }
                write_file(&path, &csv)?;
            }
            if let Some(path) = labels_out {
                let mut csv = String::new();
                for l in &result.hard_labels {
                    csv.push_str(&format!("{l}\n"));
                }
                write_file(&path, &csv)?;
            }
            let labels = result
                .hard_labels
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",");
            println!(
                "{{\"clusters\":{clusters},\"fuzzifier\":{},\"seed\":{seed},\"iterations\":{},\"objective\":{},\"labels\":[{labels}]}}",
                sig9(fuzzifier),
                result.objective_trace.len() - 1,
                sig9(*result.objective_trace.last().expect("nonempty trace"))
            );
        }
        Command::Decompose {
            x,
            y,
            mean,
            cov,
            header,
        } => {
            let xs = parse_csv(&x, header)?;
            let ys = parse_csv(&y, header)?;
            let dim = xs.dim();
            let model = match (mean, cov) {
                (None, None) => PopulationModel::standard(dim)?,
                (mean, cov) => {
                    let mean = mean.unwrap_or_else(|| vec![0.0; dim]);
                    let covariance = match cov {
                        Some(path) => parse_csv(&path, false)?.rows().to_vec(),
                        None => {
                            let mut id = vec![vec![0.0; dim]; dim];
                            for (i, row) in id.iter_mut().enumerate() {
                                row[i] = 1.0;
                            }
                            id
                        }
                    };
                    PopulationModel::new(mean, covariance)?
                }
            };
            let r = decompose(&xs, &ys, &model)?;
            println!(
                "{{\"q_minus_half\":{},\"main_fg_term\":{},\"main_x_term\":{},\"hoeffding_remainder\":{},\"gkn_main\":{},\"gkn_remainder\":{},\"m\":{},\"n\":{}}}",
                sig9(r.q_minus_half),
                sig9(r.main_fg_term),
                sig9(r.main_x_term),
                sig9(r.hoeffding_remainder),
                sig9(r.gkn_main),
                sig9(r.gkn_remainder),
                xs.n_rows(),
                ys.n_rows()
            );
        }
    }
    Ok(())
}

/// Entry point used by the binary: parse arguments, run, map errors to
/// the exit-code contract. Diagnostics go to standard error only.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
