use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::{maybe_reevaluate, nondominated_members, Engine};
use super::record::{Individual, RunRecord};
use super::RunError;
use crate::moea::{nsga2_select, rank_and_crowding};
use crate::seed::{derive_seed, tag};

/// Binary tournament: `better(a, b)` decides, the lower index wins ties.
pub(super) fn tournament<R: Rng>(rng: &mut R, n: usize, better: impl Fn(usize, usize) -> Ordering) -> usize {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    match better(a, b) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => a.min(b),
    }
}

pub(super) fn parent_rng(run_seed: u64, generation: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(&[run_seed, tag::PARENTS, generation as u64]))
}

/// The shared generational skeleton of NSGA-II and IBEA: tournament parents,
/// N offspring, evaluate, environmental selection over P ∪ Q.
pub(super) fn generational(
    engine: &mut Engine,
    pick_pairs: impl Fn(&[Individual], &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>, RunError>,
    select: impl Fn(&[&[f64]], usize) -> Result<Vec<usize>, RunError>,
) -> Result<RunRecord, RunError> {
    let n = engine.cfg.population_size;
    let mut population = engine.initialize()?;
    engine.update_archive(&population);
    engine.record(0, &population)?;
    for t in 1..=engine.cfg.max_generations {
        population = maybe_reevaluate(engine, population, t)?;
        let mut rng = parent_rng(engine.cfg.run_seed, t);
        let pairs = pick_pairs(&population, &mut rng)?;
        let children = engine.breed(&population, &pairs, t, 0)?;
        let offspring = children
            .into_iter()
            .enumerate()
            .map(|(k, g)| engine.evaluate(g, t, k))
            .collect::<Result<Vec<_>, _>>()?;
        engine.update_archive(&offspring);
        let mut combined = population;
        combined.extend(offspring);
        let points: Vec<&[f64]> = combined.iter().map(|i| i.objectives.as_slice()).collect();
        let keep = select(&points, n)?;
        population = keep.into_iter().map(|i| combined[i].clone()).collect();
        engine.record(t, &population)?;
    }
    let final_set = nondominated_members(&population)?;
    Ok(engine.finish(final_set))
}

pub(super) fn run(engine: &mut Engine) -> Result<RunRecord, RunError> {
    let n = engine.cfg.population_size;
    generational(
        engine,
        |population, rng| {
            let points: Vec<&[f64]> = population.iter().map(|i| i.objectives.as_slice()).collect();
            let (rank, crowd) = rank_and_crowding(&points)?;
            let better = |a: usize, b: usize| rank[b].cmp(&rank[a]).then(crowd[a].total_cmp(&crowd[b]));
            Ok((0..n).map(|_| (tournament(rng, n, better), tournament(rng, n, better))).collect())
        },
        |points, n| Ok(nsga2_select(points, n)?),
    )
}
