use rand::Rng;

use super::engine::{maybe_reevaluate, Engine};
use super::nsga2::parent_rng;
use super::record::RunRecord;
use super::RunError;
use crate::moea::{neighborhoods, riesz_weights, scalarize, update_reference, ReferencePoint};

pub(super) fn run(engine: &mut Engine) -> Result<RunRecord, RunError> {
    let n = engine.cfg.population_size;
    let kind = engine.cfg.scalarization;
    let weights = riesz_weights::<f64>(n, engine.m())?;
    let hoods = neighborhoods(&weights, engine.cfg.neighborhood_size)?;
    let mut population = engine.initialize()?;
    let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
    let mut z = ReferencePoint::from_population(&points)?;
    engine.update_archive(&population);
    engine.record(0, &population)?;
    for t in 1..=engine.cfg.max_generations {
        population = maybe_reevaluate(engine, population, t)?;
        for ind in &population {
            z = update_reference(&z, &ind.objectives)?;
        }
        let mut rng = parent_rng(engine.cfg.run_seed, t);
        for i in 0..n {
            let b = &hoods[i];
            let x = rng.gen_range(0..b.len());
            let mut y = rng.gen_range(0..b.len() - 1);
            if y >= x {
                y += 1;
            }
            let child = engine.breed(&population, &[(b[x], b[y])], t, i)?.pop().expect("one offspring");
            let new = engine.evaluate(child, t, i)?;
            z = update_reference(&z, &new.objectives)?;
            for &j in b {
                let g_new = scalarize(kind, &new.objectives, &weights[j], &z)?;
                let g_old = scalarize(kind, &population[j].objectives, &weights[j], &z)?;
                if g_new < g_old {
                    population[j] = new.clone();
                }
            }
            engine.update_archive(std::slice::from_ref(&new));
        }
        engine.record(t, &population)?;
    }
    let final_set = engine.archive.clone();
    Ok(engine.finish(final_set))
}
