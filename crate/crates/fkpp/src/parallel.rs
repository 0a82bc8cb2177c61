//! Rayon drivers for the embarrassingly parallel parts.
//!
//! Work is split into fixed pieces (contour points, Monte Carlo chunks,
//! parameter points) and results are gathered in piece order, so output does
//! not depend on the thread count.

use fkpp_core::feynman_kac::{
    fk_chunk, ks_against_density, sample_chunk, FkProblem, KsReport, McEstimate, PathConfig, PathSample,
};
use fkpp_core::spectral::{evans_function, evans_winding_with, ContourSpec, EvansOptions, EvansResult, EvansSystem};
use fkpp_core::wave::{find_invading_front, FrontSearch, WaveProfile};
use fkpp_core::{ModelParams, Result};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// A pool with `threads` workers, or rayon's default when `None` or 0.
pub fn thread_pool(threads: Option<usize>) -> AppResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| AppError::Usage(format!("cannot start thread pool: {e}")))
}

/// Traces the Evans function with contour batches evaluated in parallel.
pub fn evans_winding_par<S>(system: &S, spec: &ContourSpec, opts: &EvansOptions) -> Result<EvansResult>
where
    S: EvansSystem + Sync + ?Sized,
{
    evans_winding_with(system, spec, |lambdas| lambdas.par_iter().map(|&l| evans_function(system, l, opts)).collect())
}

pub fn sample_first_passage_par(cfg: &PathConfig) -> Result<Vec<PathSample>> {
    cfg.validate()?;
    let chunks: Vec<Vec<PathSample>> = (0..cfg.chunk_count()).into_par_iter().map(|k| sample_chunk(cfg, k)).collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// KS test of sampled passage times against the density with drift `model_c`.
pub fn validate_hitting_density_par(cfg: &PathConfig, model_c: f64) -> Result<KsReport> {
    let samples = sample_first_passage_par(cfg)?;
    ks_against_density(&samples, cfg.x0, model_c)
}

pub fn fk_solve_par(t: f64, problem: &FkProblem<'_>, cfg: &PathConfig) -> Result<McEstimate> {
    let horizon = PathConfig { t_max: t, ..*cfg };
    horizon.validate()?;
    let chunks = (0..horizon.chunk_count())
        .into_par_iter()
        .map(|k| fk_chunk(t, problem, &horizon, k))
        .collect::<Result<Vec<_>>>()?;
    McEstimate::from_chunks(&chunks)
}

/// Invading fronts for several parameter points, in input order.
pub fn find_fronts_par(points: &[ModelParams], search: &FrontSearch) -> Vec<Result<WaveProfile>> {
    points.par_iter().map(|p| find_invading_front(p, search)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use fkpp_core::feynman_kac::{fk_solve, sample_first_passage};
    use fkpp_core::spectral::{evans_winding, PlantedSystem};

    #[test]
    fn parallel_matches_sequential() {
        let cfg = PathConfig::new(-0.5, 1.0, 1e-3, 10_000, 20.0, 17);
        let pool = thread_pool(Some(3)).unwrap();
        let par = pool.install(|| sample_first_passage_par(&cfg)).unwrap();
        assert_eq!(par, sample_first_passage(&cfg).unwrap());

        let one = |_: f64| 1.0;
        let problem = FkProblem { l: -1.0, m: 0.5, boundary_data: &one, initial_data: &one };
        let seq = fk_solve(0.7, &problem, &cfg).unwrap();
        let par = pool.install(|| fk_solve_par(0.7, &problem, &cfg)).unwrap();
        assert_eq!(seq, par);

        let spec = ContourSpec::new(4.0, 1e-2).unwrap();
        let opts = EvansOptions::default();
        let seq = evans_winding(&PlantedSystem, &spec, &opts).unwrap();
        let par = pool.install(|| evans_winding_par(&PlantedSystem, &spec, &opts)).unwrap();
        assert_eq!(seq.trace, par.trace);
        assert_eq!(par.winding, 1);
    }
}
