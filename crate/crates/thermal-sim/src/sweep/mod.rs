//! Parameter sweeps: evaluate the analytic metrics and/or the Monte Carlo
//! emulation over a grid, write self-describing CSV files and gnuplot
//! scripts.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::empirical::{
    derive_point_seed, empirical_cmi_with_se, g2_auto, g2_cross, sample_quadratures, slice_bits,
    G2Estimate, DEFAULT_CMI_BATCHES,
};
use crate::error::{Error, Result};
use crate::network::{
    build_network, channel_output_cov, output_mode, post_splitter_cov, ProtocolParams,
};
use crate::oplog;
use crate::secrecy::{secrecy_verdict, Quadrature, SecrecyReport};

mod config;
mod csv;
mod presets;

pub use config::{default_params, resolve, Overrides, ResolvedRun, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use csv::{format_f64, read_csv, render_sweep_csv, write_csv, Cell};
pub use presets::{preset_sweeps, PRESET_NAMES};

/// Tolerance for the built-in cross-check between the transform pipeline and
/// the closed-form covariance at every analytic grid point.
pub const PIPELINE_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Analytic,
    Sampled,
    Both,
}

impl RunMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(RunMode::Analytic),
            "sampled" => Ok(RunMode::Sampled),
            "both" => Ok(RunMode::Both),
            other => Err(Error::Config(format!(
                "unknown mode {other:?}; valid values: analytic, sampled, both"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Analytic => "analytic",
            RunMode::Sampled => "sampled",
            RunMode::Both => "both",
        }
    }

    pub fn analytic(self) -> bool {
        matches!(self, RunMode::Analytic | RunMode::Both)
    }

    pub fn sampled(self) -> bool {
        matches!(self, RunMode::Sampled | RunMode::Both)
    }
}

/// A parameter a sweep may scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    Eta1,
    Eta2,
    Eta3,
    Eta4,
    Ve,
}

impl SweptParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweptParam::Eta1 => "eta1",
            SweptParam::Eta2 => "eta2",
            SweptParam::Eta3 => "eta3",
            SweptParam::Eta4 => "eta4",
            SweptParam::Ve => "ve",
        }
    }

    fn apply(self, params: &mut ProtocolParams, value: f64) {
        match self {
            SweptParam::Eta1 => params.eta1 = value,
            SweptParam::Eta2 => params.eta2 = value,
            SweptParam::Eta3 => params.eta3 = value,
            SweptParam::Eta4 => params.eta4 = value,
            SweptParam::Ve => params.v_e = value,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub param: SweptParam,
    pub values: Vec<f64>,
}

/// Uniform n-point grid over (0, 1]: k/n for k = 1..=n.
pub fn unit_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / n as f64).collect()
}

/// One sweep: a 1- or 2-dimensional grid around a base parameter point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub name: String,
    pub grids: Vec<GridSpec>,
    pub base: ProtocolParams,
    pub mode: RunMode,
    pub samples: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.grids.is_empty() || self.grids.len() > 2 {
            return Err(Error::Config(format!(
                "a sweep needs 1 or 2 swept parameters, got {}",
                self.grids.len()
            )));
        }
        for g in &self.grids {
            if g.values.is_empty() {
                return Err(Error::Config(format!("empty grid for {}", g.param.as_str())));
            }
        }
        if self.mode.sampled() && self.samples == 0 {
            return Err(Error::Config("sampled mode needs samples >= 1".into()));
        }
        // every grid point must produce valid parameters
        for point in self.points() {
            self.params_at(&point).validate().map_err(|e| {
                Error::Config(format!(
                    "sweep {:?} contains an invalid grid point {:?}: {e}",
                    self.name, point
                ))
            })?;
        }
        Ok(())
    }

    /// Cartesian product of the grids, row-major in grid order.
    fn points(&self) -> Vec<Vec<f64>> {
        match self.grids.len() {
            1 => self.grids[0].values.iter().map(|&v| vec![v]).collect(),
            2 => {
                let mut out =
                    Vec::with_capacity(self.grids[0].values.len() * self.grids[1].values.len());
                for &u in &self.grids[0].values {
                    for &v in &self.grids[1].values {
                        out.push(vec![u, v]);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    fn params_at(&self, point: &[f64]) -> ProtocolParams {
        let mut p = self.base.clone();
        for (g, &v) in self.grids.iter().zip(point) {
            g.param.apply(&mut p, v);
        }
        p
    }
}

/// Analytic cells of one result row.
#[derive(Debug, Clone)]
pub struct AnalyticCells {
    pub i_ab: f64,
    pub i_ab_given_e: f64,
    pub discord_b_given_a: f64,
    pub discord_quadrature: &'static str,
    pub physical: bool,
    pub verdict: &'static str,
}

/// Monte Carlo cells of one result row.
#[derive(Debug, Clone)]
pub struct SampledCells {
    pub cmi: f64,
    pub cmi_se: f64,
    pub g2_a: G2Estimate,
    pub g2_b: G2Estimate,
    pub g2_ab: G2Estimate,
}

#[derive(Debug, Clone)]
pub struct ResultRow {
    pub swept: Vec<f64>,
    pub analytic: Option<AnalyticCells>,
    pub sampled: Option<SampledCells>,
}

/// Evaluate the analytic metrics at one point, cross-checking the transform
/// pipeline against the closed-form covariance.
pub fn evaluate_analytic(params: &ProtocolParams) -> Result<AnalyticCells> {
    let net = build_network(params)?;
    for (stage, closed) in [
        (&net.post_splitter, post_splitter_cov(params)?),
        (&net.output, channel_output_cov(params)?),
    ] {
        let diff = (stage.cov() - closed.cov()).abs().max();
        if diff > PIPELINE_CHECK_TOL {
            return Err(Error::Domain {
                context: "evaluate_analytic",
                message: format!(
                    "transform pipeline and closed-form covariance disagree by {diff:.3e} at {params:?}"
                ),
            });
        }
    }
    let report = SecrecyReport::evaluate(&net)?;
    let verdict = secrecy_verdict(&report);
    Ok(AnalyticCells {
        i_ab: report.i_ab,
        i_ab_given_e: report.i_ab_given_e,
        discord_b_given_a: report.discord_b_given_a,
        discord_quadrature: match report.discord_quadrature {
            Quadrature::P => "p",
            _ => "x",
        },
        physical: report.physical,
        verdict: verdict.as_str(),
    })
}

/// Run the Monte Carlo emulation at one point: sample the (a, b, e) modes,
/// slice x-quadrature bits, and estimate CMI and intensity correlations.
pub fn evaluate_sampled(params: &ProtocolParams, n: usize, seed: u64) -> Result<SampledCells> {
    let net = build_network(params)?;
    let abe = net
        .output
        .reduce(&[output_mode::A, output_mode::B, output_mode::E])?;
    let batch = sample_quadratures(&abe, n, seed)?;
    let bits_a = slice_bits(batch.x(0), "a")?;
    let bits_b = slice_bits(batch.x(1), "b")?;
    let bits_e = slice_bits(batch.x(2), "e")?;
    let (cmi, cmi_se) = empirical_cmi_with_se(&bits_a, &bits_b, &bits_e, DEFAULT_CMI_BATCHES)?;
    let g2_a = g2_auto(batch.x(0), batch.p(0))?;
    let g2_b = g2_auto(batch.x(1), batch.p(1))?;
    let g2_ab = g2_cross(batch.x(0), batch.p(0), batch.x(1), batch.p(1))?;
    Ok(SampledCells {
        cmi,
        cmi_se,
        g2_a,
        g2_b,
        g2_ab,
    })
}

fn evaluate_point(spec: &SweepSpec, index: usize, point: &[f64]) -> Result<ResultRow> {
    let params = spec.params_at(point);
    let analytic = if spec.mode.analytic() {
        Some(evaluate_analytic(&params)?)
    } else {
        None
    };
    let sampled = if spec.mode.sampled() {
        let seed = derive_point_seed(spec.seed, index as u64);
        Some(evaluate_sampled(&params, spec.samples, seed)?)
    } else {
        None
    };
    Ok(ResultRow {
        swept: point.to_vec(),
        analytic,
        sampled,
    })
}

/// Evaluate every grid point of a sweep. Points run in parallel (bounded by
/// `jobs` when set); rows come back in deterministic grid order regardless
/// of completion order.
pub fn evaluate_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let points = spec.points();
    let eval = |(i, p): (usize, &Vec<f64>)| evaluate_point(spec, i, p);
    match spec.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| points.par_iter().enumerate().map(eval).collect())
        }
        None => points.par_iter().enumerate().map(eval).collect(),
    }
}

/// Paths written for one sweep.
#[derive(Debug, Clone)]
pub struct SweepArtifacts {
    pub name: String,
    pub csv_path: PathBuf,
    pub plot_path: PathBuf,
    pub n_rows: usize,
}

/// Run one sweep and persist its artifacts.
pub fn run_sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepArtifacts> {
    let rows = evaluate_sweep(spec)?;
    std::fs::create_dir_all(out_dir)?;
    let csv_path = out_dir.join(format!("{}.csv", spec.name));
    let plot_path = out_dir.join(format!("{}.gp", spec.name));
    csv::write_sweep_csv(&csv_path, spec, &rows)?;
    std::fs::write(&plot_path, plot_script(spec))?;
    Ok(SweepArtifacts {
        name: spec.name.clone(),
        csv_path,
        plot_path,
        n_rows: rows.len(),
    })
}

/// Run every sweep of a resolved configuration.
pub fn run(resolved: &ResolvedRun) -> Result<Vec<SweepArtifacts>> {
    oplog::record("sweep.run");
    resolved
        .sweeps
        .iter()
        .map(|s| run_sweep(s, &resolved.out_dir))
        .collect()
}

/// Column names of a sweep CSV, in order.
pub fn column_names(spec: &SweepSpec) -> Vec<String> {
    let mut cols: Vec<String> = spec
        .grids
        .iter()
        .map(|g| g.param.as_str().to_string())
        .collect();
    if spec.mode.analytic() {
        for c in [
            "i_ab",
            "i_ab_given_e",
            "discord_b_given_a",
            "discord_quadrature",
            "physical",
            "verdict",
        ] {
            cols.push(c.into());
        }
    }
    if spec.mode.sampled() {
        for c in [
            "cmi_empirical",
            "cmi_empirical_se",
            "g2_auto_a",
            "g2_auto_a_se",
            "g2_auto_b",
            "g2_auto_b_se",
            "g2_cross_ab",
            "g2_cross_ab_se",
        ] {
            cols.push(c.into());
        }
    }
    cols
}

fn plot_script(spec: &SweepSpec) -> String {
    let cols = column_names(spec);
    let col = |name: &str| cols.iter().position(|c| c == name).map(|i| i + 1);
    let csv = format!("{}.csv", spec.name);
    let mut s = String::new();
    s.push_str(&format!("# gnuplot script for sweep {:?}\n", spec.name));
    s.push_str("set datafile separator ','\n");
    s.push_str("set grid\n");
    if spec.grids.len() == 2 {
        let x = spec.grids[0].param.as_str();
        let y = spec.grids[1].param.as_str();
        let z = col("i_ab_given_e").or(col("cmi_empirical")).unwrap_or(3);
        s.push_str(&format!("set xlabel '{x}'\nset ylabel '{y}'\n"));
        s.push_str("set zlabel 'bits'\n");
        let n = spec.grids[0].values.len();
        let m = spec.grids[1].values.len();
        s.push_str(&format!("set dgrid3d {n},{m}\nset hidden3d\n"));
        s.push_str(&format!(
            "splot '{csv}' skip 1 using 1:2:{z} with lines title 'I(A:B|E)'\n"
        ));
    } else {
        let x = spec.grids[0].param.as_str();
        s.push_str(&format!("set xlabel '{x}'\nset ylabel 'bits'\nset key left top\n"));
        let mut series = Vec::new();
        if let Some(c) = col("i_ab_given_e") {
            series.push((c, "I(A:B|E)"));
        }
        if let Some(c) = col("discord_b_given_a") {
            series.push((c, "D(B|A)"));
        }
        if let Some(c) = col("cmi_empirical") {
            series.push((c, "empirical CMI"));
        }
        let clauses: Vec<String> = series
            .iter()
            .map(|(c, t)| format!("'{csv}' skip 1 using 1:{c} with lines lw 2 title '{t}'"))
            .collect();
        s.push_str(&format!("plot {}\n", clauses.join(", \\\n     ")));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec(mode: RunMode) -> SweepSpec {
        SweepSpec {
            name: "tiny".into(),
            grids: vec![GridSpec {
                param: SweptParam::Eta1,
                values: vec![0.25, 0.5, 1.0],
            }],
            base: ProtocolParams::thermal_from_occupancy(1309.0),
            mode,
            samples: 2_000,
            seed: 7,
            jobs: Some(2),
        }
    }

    #[test]
    fn analytic_sweep_rows_in_grid_order() {
        let rows = evaluate_sweep(&tiny_spec(RunMode::Analytic)).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].swept, vec![0.25]);
        assert_eq!(rows[2].swept, vec![1.0]);
        assert!(rows.iter().all(|r| r.analytic.is_some() && r.sampled.is_none()));
        // CMI grows with eta1 on this coarse grid too
        let cmi: Vec<f64> = rows
            .iter()
            .map(|r| r.analytic.as_ref().unwrap().i_ab_given_e)
            .collect();
        assert!(cmi[0] < cmi[1] && cmi[1] < cmi[2]);
    }

    #[test]
    fn both_mode_fills_all_cells() {
        let rows = evaluate_sweep(&tiny_spec(RunMode::Both)).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.analytic.is_some() && r.sampled.is_some()));
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let a = evaluate_sweep(&tiny_spec(RunMode::Sampled)).unwrap();
        let b = evaluate_sweep(&tiny_spec(RunMode::Sampled)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let (sx, sy) = (x.sampled.as_ref().unwrap(), y.sampled.as_ref().unwrap());
            assert_eq!(sx.cmi, sy.cmi);
            assert_eq!(sx.g2_ab.value, sy.g2_ab.value);
        }
    }

    #[test]
    fn surface_points_are_row_major() {
        let spec = SweepSpec {
            name: "surf".into(),
            grids: vec![
                GridSpec {
                    param: SweptParam::Eta1,
                    values: vec![0.2, 0.8],
                },
                GridSpec {
                    param: SweptParam::Eta2,
                    values: vec![0.3, 0.6],
                },
            ],
            base: ProtocolParams::thermal(101.0),
            mode: RunMode::Analytic,
            samples: 0,
            seed: 0,
            jobs: None,
        };
        let rows = evaluate_sweep(&spec).unwrap();
        let pts: Vec<Vec<f64>> = rows.iter().map(|r| r.swept.clone()).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.2, 0.3],
                vec![0.2, 0.6],
                vec![0.8, 0.3],
                vec![0.8, 0.6]
            ]
        );
    }

    #[test]
    fn invalid_grid_point_is_a_config_error() {
        let mut spec = tiny_spec(RunMode::Analytic);
        spec.grids[0].values.push(1.5);
        assert!(matches!(evaluate_sweep(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn unit_grid_spans_half_open_interval() {
        let g = unit_grid(50);
        assert_eq!(g.len(), 50);
        assert!(g[0] > 0.0);
        assert_eq!(g[49], 1.0);
    }
}
