//! Experiment orchestration: Monte Carlo vs Wick vs limit comparisons and
//! closed-form queries.

mod config;
mod query;
mod report;

pub use config::{
    Ensemble, EnsembleConfig, Experiment, ExperimentConfig, ExperimentSection, OutputConfig,
    RationalValue, ReportFormat,
};
pub use query::{run_query, Query, QueryResult};
pub use report::{write_atomic, ConvergenceReport, LimitRegime, ReportRow, CSV_COLUMNS};

use num_traits::Zero;

use crate::block_model::finite_partition;
use crate::families::limit_moment;
use crate::rational::Rational;
use crate::rmt::{estimate_moment, exact_moment_wick, EnsembleSpec, WICK_MAX_LEN, WICK_MAX_N};
use crate::{Execution, Result};

/// Which columns a run fills in besides the Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Columns {
    pub wick: bool,
    pub limit: bool,
}

impl Columns {
    pub const ALL: Columns = Columns { wick: true, limit: true };
    pub const MC_ONLY: Columns = Columns { wick: false, limit: false };
}

impl Ensemble {
    /// The ensemble at size `n`, blocks split by [`finite_partition`].
    pub fn at(&self, n: usize) -> Result<EnsembleSpec> {
        let dims = finite_partition(n, self.structure.d(), self.schedule)?;
        EnsembleSpec::new(
            self.kind,
            self.structure.clone().with_finite_dims(dims)?,
            self.profile.clone(),
            self.seed,
        )
    }

    pub fn limit(&self, x: &Experiment) -> Result<Rational> {
        limit_moment(&x.word, x.q, self.kind, self.structure.d(), &self.profile)
    }

    fn regime(&self, q: usize) -> LimitRegime {
        if self.structure.d()[q - 1].is_zero() {
            LimitRegime::OmittedCase
        } else {
            LimitRegime::Standard
        }
    }
}

/// One row per `n` in the experiment; a failure at one size is recorded in that
/// row's error column and the remaining sizes still run.
pub fn run_experiment(
    ensemble: &Ensemble,
    x: &Experiment,
    columns: Columns,
    exec: Execution,
) -> Result<ConvergenceReport> {
    let limit = if columns.limit { Some(ensemble.limit(x)?) } else { None };
    let mut rows = Vec::with_capacity(x.n_list.len());
    for &n in &x.n_list {
        let mut row = ReportRow {
            word: x.word.to_string(),
            q: x.q,
            n,
            trials: x.trials,
            mc_mean: None,
            mc_stderr: None,
            wick: None,
            limit: limit.clone(),
            limit_regime: ensemble.regime(x.q),
            error: None,
        };
        let outcome = (|| -> Result<()> {
            let spec = ensemble.at(n)?;
            let est = estimate_moment(&spec, &x.word, x.q, x.trials, exec)?;
            row.mc_mean = Some(est.mean);
            row.mc_stderr = Some(est.std_error);
            if columns.wick && x.word.len() <= WICK_MAX_LEN && n <= WICK_MAX_N {
                row.wick = Some(exact_moment_wick(&spec, &x.word, x.q)?);
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            row.error = Some(e.to_string());
        }
        rows.push(row);
    }
    Ok(ConvergenceReport { rows })
}

/// Monte Carlo, Wick and limit columns for the config's experiment.
pub fn run_compare(cfg: &ExperimentConfig, exec: Execution) -> Result<ConvergenceReport> {
    let ensemble = cfg.ensemble.resolve()?;
    let x = cfg.experiment()?;
    run_experiment(&ensemble, &x, Columns::ALL, exec)
}
