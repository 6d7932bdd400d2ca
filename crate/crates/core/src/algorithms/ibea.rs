use super::engine::Engine;
use super::nsga2::{generational, tournament};
use super::record::RunRecord;
use super::RunError;
use crate::moea::{ibea_fitness, ibea_select};

pub(super) fn run(engine: &mut Engine) -> Result<RunRecord, RunError> {
    let n = engine.cfg.population_size;
    let kappa = engine.cfg.kappa;
    generational(
        engine,
        |population, rng| {
            let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
            let fitness = ibea_fitness(&points, kappa)?;
            let better = |a: usize, b: usize| fitness[a].total_cmp(&fitness[b]);
            Ok((0..n).map(|_| (tournament(rng, n, better), tournament(rng, n, better))).collect())
        },
        |points, n| Ok(ibea_select(points, n, kappa)?),
    )
}
