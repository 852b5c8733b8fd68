use clap::ValueEnum;
use lagcheb::apps::{
    ifs_integral, ifs_lyapunov, lyapunov_matrices, BLASCHKE_GRADING, DEFAULT_SEARCH_POINTS, DEFAULT_SEARCH_RANGE,
};
use lagcheb::geometry::{contraction_search, linspace, ContractionReport};
use lagcheb::spectral::{convergence_table, eigendecompose, persistent_indices, SpectralData};
use lagcheb::transferop::{assemble_cheb, assemble_circle_graded};
use lagcheb::Error;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Config, Kind, SearchSpec};
use crate::error::{config_error, CliError};
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// λ_K of an ellipse system across n (default K = 2).
    CorrelationDecay,
    /// λ_K of a circle system across n.
    CircleSpectrum,
    /// Top Lyapunov exponent of random matrix products.
    Lyapunov,
    /// Integral of the observable against the IFS stationary measure.
    IfsIntegral,
    /// Lyapunov exponent of an IFS.
    IfsLyapunov,
    /// Chaos-game estimate of the IFS integral (orbit length n, seeded).
    IfsMonteCarlo,
    /// Best contraction ratio r/R over a grid of R.
    EllipseSearch,
}

impl Task {
    fn kinds(self) -> &'static [Kind] {
        match self {
            Task::CorrelationDecay => &[Kind::EllipseSystem],
            Task::CircleSpectrum => &[Kind::CircleSystem],
            Task::Lyapunov => &[Kind::RandomMatrices],
            Task::IfsIntegral | Task::IfsLyapunov | Task::IfsMonteCarlo => &[Kind::Ifs],
            Task::EllipseSearch => &[Kind::EllipseSystem, Kind::RandomMatrices, Kind::Ifs],
        }
    }

    pub fn needs_n(self) -> bool {
        self != Task::EllipseSearch
    }

    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_owned()
    }
}

/// Fully resolved run parameters (flags over config over defaults).
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub task: Task,
    pub ns: Vec<usize>,
    /// 1-based.
    pub eigen_index: usize,
    pub samples: usize,
    pub seed: u64,
    pub search: SearchSpec,
}

pub fn default_search() -> SearchSpec {
    SearchSpec {
        min: DEFAULT_SEARCH_RANGE.0,
        max: DEFAULT_SEARCH_RANGE.1,
        points: DEFAULT_SEARCH_POINTS,
    }
}

pub fn execute(config: &Config, run: &Run) -> Result<Table, CliError> {
    if !run.task.kinds().contains(&config.kind) {
        return Err(config_error(format!("task {} does not apply to kind {}", run.task.name(), config.kind)));
    }
    match run.task {
        Task::CorrelationDecay => correlation_decay(config, run),
        Task::CircleSpectrum => circle_spectrum(config, run),
        Task::Lyapunov => {
            let problem = config.random_matrices()?;
            let rows = per_n(&run.ns, |n| lyapunov_matrices(&problem, n).map(|e| Complex64::new(e.value, e.imaginary)))?;
            Ok(real_table(&["n", "lyapunov", "imaginary", "difference"], &run.ns, &rows))
        }
        Task::IfsIntegral => {
            let problem = config.ifs()?;
            let g = config.observable()?;
            let rows = per_n(&run.ns, |n| ifs_integral(&problem, &*g, n))?;
            Ok(real_table(&["n", "re", "im", "difference"], &run.ns, &rows))
        }
        Task::IfsLyapunov => {
            let problem = config.ifs()?;
            let rows = per_n(&run.ns, |n| ifs_lyapunov(&problem, n).map(|e| Complex64::new(e.value, e.imaginary)))?;
            Ok(real_table(&["n", "lyapunov", "imaginary", "difference"], &run.ns, &rows))
        }
        Task::IfsMonteCarlo => ifs_monte_carlo(config, run),
        Task::EllipseSearch => ellipse_search(config, run),
    }
}

fn per_n<F>(ns: &[usize], f: F) -> Result<Vec<Complex64>, CliError>
where
    F: Fn(usize) -> lagcheb::Result<Complex64> + Sync,
{
    Ok(ns.par_iter().map(|&n| f(n)).collect::<lagcheb::Result<Vec<_>>>()?)
}

/// Rows `n, re, im, |value − previous value|`.
fn real_table(columns: &[&'static str], ns: &[usize], values: &[Complex64]) -> Table {
    let rows = ns
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (&n, v))| {
            let diff = (i > 0).then(|| (v - values[i - 1]).norm());
            vec![Some(n as f64), Some(v.re), Some(v.im), diff]
        })
        .collect();
    Table::new(columns, rows)
}

const SPECTRUM_COLUMNS: [&str; 5] = ["n", "re", "im", "difference", "bound"];

fn correlation_decay(config: &Config, run: &Run) -> Result<Table, CliError> {
    let system = config.ellipse_system()?;
    if system.inner().is_some() {
        system.check_image_ellipse(run.samples)?;
    }
    let radii = system.inner().map(|r| (r, system.outer()));
    let table = convergence_table(|n| assemble_cheb(&system, n), &run.ns, run.eigen_index - 1, radii)?;
    let rows = table
        .iter()
        .map(|row| {
            vec![
                Some(row.n as f64),
                Some(row.eigenvalue.re),
                Some(row.eigenvalue.im),
                row.difference,
                row.bound,
            ]
        })
        .collect();
    Ok(Table::new(&SPECTRUM_COLUMNS, rows))
}

/// The K-th eigenvalue of the graded circle matrix at each `n`; with a
/// `persistence` tolerance, counting only eigenvalues also present at `n + 1`.
fn circle_spectrum(config: &Config, run: &Run) -> Result<Table, CliError> {
    let system = config.circle_system()?;
    let rho = config.grading.unwrap_or(BLASCHKE_GRADING);
    let index = run.eigen_index - 1;
    let spectrum = |n: usize| -> lagcheb::Result<SpectralData> { eigendecompose(&assemble_circle_graded(&system, n, rho)?) };
    let pick = |n: usize| -> lagcheb::Result<Complex64> {
        let data = spectrum(n)?;
        match config.persistence {
            None => data.eigenvalue(index),
            Some(tol) => {
                let kept = persistent_indices(&data, &spectrum(n + 1)?, tol)?;
                let i = *kept.get(index).ok_or(Error::InvalidIndex { index, len: kept.len() })?;
                data.eigenvalue(i)
            }
        }
    };
    let values = per_n(&run.ns, pick)?;
    let bound = |n: usize| match (config.inner, config.outer) {
        (Some(r), Some(big_r)) => Some((r / big_r).powi(n as i32)),
        _ => None,
    };
    let rows = run
        .ns
        .iter()
        .zip(&values)
        .enumerate()
        .map(|(i, (&n, v))| {
            let diff = (i > 0).then(|| (v - values[i - 1]).norm());
            vec![Some(n as f64), Some(v.re), Some(v.im), diff, bound(n)]
        })
        .collect();
    Ok(Table::new(&SPECTRUM_COLUMNS, rows))
}

fn ellipse_search(config: &Config, run: &Run) -> Result<Table, CliError> {
    let SearchSpec { min, max, points } = run.search;
    if !(min > 1.0 && max > min && max.is_finite() && points >= 2) {
        return Err(config_error(format!("search grid needs 1 < min < max and points ≥ 2, got {min}..{max} × {points}")));
    }
    let grid = linspace(min, max, points);
    let report: ContractionReport = match config.kind {
        Kind::RandomMatrices => config.random_matrices()?.admissible_contraction_search(&grid, run.samples)?,
        _ => contraction_search(&config.maps()?, config.foci()?, &grid, run.samples)?,
    };
    Ok(Table::new(
        &["outer", "inner", "ratio", "samples"],
        vec![vec![
            Some(report.outer),
            Some(report.inner),
            Some(report.ratio),
            Some(report.samples_per_boundary as f64),
        ]],
    ))
}

const BURN_IN: usize = 1000;

/// Orbit average of the observable along a random orbit of length `n`.
fn ifs_monte_carlo(config: &Config, run: &Run) -> Result<Table, CliError> {
    let problem = config.ifs()?;
    let g = config.observable()?;
    let choose = WeightedIndex::new(problem.probs()).map_err(|e| config_error(format!("probs: {e}")))?;
    let foci = problem.foci();
    let start = (foci.plus() + foci.minus()) * 0.5;
    let values: Vec<Complex64> = run
        .ns
        .par_iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
            let mut x = start;
            let mut total = Complex64::new(0.0, 0.0);
            for step in 0..BURN_IN + n {
                x = (problem.maps()[choose.sample(&mut rng)])(x);
                if step >= BURN_IN {
                    total += g(x);
                }
            }
            total / n as f64
        })
        .collect();
    Ok(real_table(&["n", "re", "im", "difference"], &run.ns, &values))
}
