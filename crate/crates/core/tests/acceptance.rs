//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if a gating criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{archive_key, brute_force_archive, synthetic_bench};
use rsbench_core::algorithms::*;
use rsbench_core::bench::*;
use rsbench_core::dataset::{Dataset, DatasetFormat, Item, ItemTable, PopularityPartition};
use rsbench_core::harness::{self, ExperimentSpec, RunSpec};
use rsbench_core::moea::*;
use rsbench_core::operators::OperatorTemplates;
use rsbench_core::provider::{MockProvider, Recorder};
use rsbench_core::ExactRatio;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

fn random_population(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<Vec<f64>> {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(2..=3);
    let grid = rng.gen_bool(0.5);
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| if grid { rng.gen_range(0..=5) as f64 / 5.0 } else { rng.gen::<f64>() })
                .collect()
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let p = random_population(&mut rng, 100);
        let mut fronts = nondominated_sort(&p).unwrap();
        fronts.iter_mut().for_each(|f| f.sort_unstable());
        // peel off points no remaining point dominates
        let mut left: Vec<usize> = (0..p.len()).collect();
        let mut oracle = Vec::new();
        while !left.is_empty() {
            let front: Vec<usize> =
                left.iter().copied().filter(|&i| !left.iter().any(|&j| dominates(&p[j], &p[i]))).collect();
            left.retain(|i| !front.contains(i));
            oracle.push(front);
        }
        mismatches += (fronts != oracle) as usize;
    }
    let t = start.elapsed();
    check(mismatches == 0 && t < Duration::from_secs(10), format!("1000 populations, {mismatches} mismatches, {t:.2?}"))
}

fn monte_carlo_hv(points: &[Vec<f64>], samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let m = points[0].len();
    let mut u = [0.0; 3];
    let mut hits = 0usize;
    for _ in 0..samples {
        for x in u.iter_mut().take(m) {
            *x = rng.gen::<f64>();
        }
        if points.iter().any(|p| p.iter().zip(&u[..m]).all(|(a, b)| a >= b)) {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

fn criterion_2() -> Verdict {
    let fixtures: [(&[[f64; 2]], f64); 4] = [
        (&[[1.0, 1.0]], 1.0),
        (&[[0.5, 1.0], [1.0, 0.5]], 0.75),
        (&[[0.2, 0.8], [0.5, 0.5], [0.8, 0.2]], 0.37),
        (&[[0.5, 0.5], [0.4, 0.4]], 0.25),
    ];
    let mut fixture_err: f64 = 0.0;
    for (pts, expected) in fixtures {
        fixture_err = fixture_err.max((hypervolume(pts, &[0.0, 0.0]).unwrap() - expected).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = random_population(&mut rng, 30);
        let exact = hypervolume(&p, &vec![0.0; p[0].len()]).unwrap();
        worst = worst.max((exact - monte_carlo_hv(&p, 1_000_000, &mut rng)).abs());
    }
    let t = start.elapsed();
    check(
        fixture_err <= 1e-12 && worst <= 1e-2 && t < Duration::from_secs(60),
        format!("fixtures max err {fixture_err:.1e}, 200 sets max |exact - MC| {worst:.2e}, {t:.2?}"),
    )
}

fn q(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn criterion_3() -> Verdict {
    // hand examples
    let s = |target: u64| EvalSample { session_context: vec![0], target, candidates: (1..=20).collect() };
    let identity = RankedList((1..=20).collect());
    let acc: ExactRatio = f_acc(&[identity.clone(), identity.clone()], &[s(3), s(15)], 10);
    let cats = ItemTable::new([
        Item { item_id: 1, title: String::new(), categories: ["A".to_string()].into(), interaction_count: 1 },
        Item { item_id: 2, title: String::new(), categories: ["A".to_string(), "B".to_string()].into(), interaction_count: 1 },
    ]);
    let div: ExactRatio = f_div(&[RankedList(vec![1, 2])], &cats, 2);
    let mut ok = acc == q(1, 2) && div == q(2, 3);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let labels = ["A", "B", "C", "D", "E", "F"];
    let mut mismatches = 0;
    for _ in 0..1000 {
        let n_items = rng.gen_range(25..60);
        let items: Vec<Item> = (1..=n_items as u64)
            .map(|id| {
                let k = rng.gen_range(1..=3);
                let categories = labels.choose_multiple(&mut rng, k).map(|c| c.to_string()).collect();
                Item { item_id: id, title: String::new(), categories, interaction_count: 1 }
            })
            .collect();
        let cold: BTreeSet<u64> = (1..=n_items as u64).filter(|_| rng.gen_bool(0.7)).collect();
        let hot: BTreeSet<u64> = (1..=n_items as u64).filter(|i| !cold.contains(i)).collect();
        let partition = PopularityPartition { hot, cold: cold.clone() };
        let table = ItemTable::new(items.clone());
        let n_samples = rng.gen_range(1..=12);
        let k = rng.gen_range(1..=20);
        let mut samples = Vec::new();
        let mut rankings = Vec::new();
        for _ in 0..n_samples {
            let ids: Vec<u64> = (1..=n_items as u64).collect();
            let candidates: Vec<u64> = ids.choose_multiple(&mut rng, 20).copied().collect();
            let target = candidates[rng.gen_range(0..20)];
            let mut ranking = candidates.clone();
            ranking.shuffle(&mut rng);
            samples.push(EvalSample { session_context: vec![], target, candidates });
            rankings.push(RankedList(ranking));
        }
        // direct transcriptions: sums of per-sample fractions over N
        let n = q(n_samples, 1);
        let mut acc_o = BigRational::zero();
        let mut div_o = BigRational::zero();
        let mut fair_o = BigRational::zero();
        for (r, s) in rankings.iter().zip(&samples) {
            let top = &r.0[..k.min(r.0.len())];
            if top.contains(&s.target) {
                acc_o += BigRational::one();
            }
            let sets: Vec<&BTreeSet<String>> = top.iter().map(|&i| &items[(i - 1) as usize].categories).collect();
            let union: BTreeSet<&String> = sets.iter().flat_map(|s| s.iter()).collect();
            let total: usize = sets.iter().map(|s| s.len()).sum();
            div_o += q(union.len(), total);
            fair_o += q(top.iter().filter(|i| cold.contains(i)).count(), k);
        }
        let got: [ExactRatio; 3] = [
            f_acc(&rankings, &samples, k),
            f_div(&rankings, &table, k),
            f_fair(&rankings, &partition, k),
        ];
        if got != [acc_o / &n, div_o / &n, fair_o / &n] {
            mismatches += 1;
        }
    }
    ok &= mismatches == 0;
    check(ok, format!("hand examples 1/2 and 2/3 exact, 1000 random traces with {mismatches} mismatches"))
}

fn criterion_4() -> Verdict {
    let mut snapshot = String::new();
    for i in instance_registry() {
        let objs: Vec<&str> = i.objectives.iter().map(|o| o.label()).collect();
        snapshot += &format!(
            "{} {} m={} batch={} K={} candidates={} {}\n",
            i.name,
            i.dataset.name(),
            i.m(),
            i.batch_size,
            i.k_cutoff,
            i.candidate_size,
            objs.join(",")
        );
    }
    let c = RunConfig::default();
    let spec = ExperimentSpec::default();
    snapshot += &format!(
        "pop={} gens={} T={} kappa={} temperature={} seeds={:?} split={} validation={} evals={}\n",
        c.population_size,
        c.max_generations,
        c.neighborhood_size,
        c.kappa,
        DEFAULT_TEMPERATURE,
        spec.seeds,
        spec.split_ratio,
        spec.report.validation_samples,
        c.expected_evaluations(),
    );
    let expected = "\
RSBench-1 ml-1m m=2 batch=10 K=10 candidates=20 F_acc,F_div
RSBench-2 games m=2 batch=10 K=10 candidates=20 F_acc,F_div
RSBench-3 bundle m=2 batch=10 K=10 candidates=20 F_acc,F_div
RSBench-4 ml-1m m=2 batch=10 K=10 candidates=20 F_acc,F_fair
RSBench-5 games m=2 batch=10 K=10 candidates=20 F_acc,F_fair
RSBench-6 bundle m=2 batch=10 K=10 candidates=20 F_acc,F_fair
RSBench-7 ml-1m m=3 batch=10 K=10 candidates=20 F_acc,F_div,F_fair
RSBench-8 games m=3 batch=10 K=10 candidates=20 F_acc,F_div,F_fair
RSBench-9 bundle m=3 batch=10 K=10 candidates=20 F_acc,F_div,F_fair
pop=10 gens=20 T=3 kappa=0.05 temperature=0.7 seeds=[0, 10, 42, 625, 2023] split=0.8 validation=200 evals=210
";
    let bench_temp = synthetic_bench(&[ObjectiveKind::Acc, ObjectiveKind::Div]).temperature;
    check(
        snapshot == expected && bench_temp == 0.7 && spec.runs.len() == 27,
        if snapshot == expected { "nine instances and run constants match".into() } else { format!("snapshot differs:\n{snapshot}") },
    )
}

/// Runs shared by criteria 5-7.
struct Runs {
    records: Vec<(Algorithm, u64, RunRecord)>,
}

fn run_spec_twice() -> Result<(Vec<(Algorithm, Duration, RunRecord, RunRecord)>, String), String> {
    let mut out = Vec::new();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut spec = ExperimentSpec::synthetic_demo();
    spec.seeds = vec![42];
    spec.runs = Algorithm::ALL.map(|a| RunSpec::new("synthetic-acc-div", a)).to_vec();
    let mut notes = Vec::new();
    for (k, dir) in dirs.iter().enumerate() {
        spec.output_dir = dir.path().to_path_buf();
        let summary = harness::cmd_run(&spec, &MockProvider::new()).map_err(|e| e.to_string())?;
        if !summary.failed.is_empty() {
            return Err(format!("{:?}", summary.failed));
        }
        if k == 0 {
            notes.push("record.jsonl written twice".to_string());
        }
    }
    for r in &spec.runs {
        let cell = |d: &tempfile::TempDir| harness::cell_dir(d.path(), &r.cell_name(), 42);
        let a = harness::load_record(&cell(&dirs[0])).map_err(|e| e.to_string())?;
        let b = harness::load_record(&cell(&dirs[1])).map_err(|e| e.to_string())?;
        let wall = Duration::from_millis(a.last().unwrap().elapsed_ms);
        out.push((r.algorithm, wall, a, b));
    }
    Ok((out, notes.join(", ")))
}

fn criterion_5(runs: &mut Runs) -> Verdict {
    let (pairs, _) = match run_spec_twice() {
        Ok(x) => x,
        Err(e) => return Verdict::Fail(e),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, wall, first, second) in pairs {
        let same = first.objective_log() == second.objective_log();
        let evals = first.evaluations();
        ok &= same && evals == 210 && wall < Duration::from_secs(60) && first.generations.len() == 21;
        parts.push(format!("{a}: {evals} evals, {wall:.2?}, identical={same}"));
        runs.records.push((a, 42, first));
    }
    check(ok, parts.join("; "))
}

fn criterion_6(runs: &mut Runs) -> Verdict {
    let bench = synthetic_bench(&[ObjectiveKind::Acc, ObjectiveKind::Div]);
    let mut ok = true;
    let mut parts = Vec::new();
    for a in Algorithm::ALL {
        let (mut init, mut fin, mut fin_pop) = (0.0, 0.0, 0.0);
        for seed in harness::DEFAULT_SEEDS {
            let r = run(&RunConfig::new(a, seed), &bench, &MockProvider::new()).unwrap();
            init += r.generations[0].population_hypervolume / 5.0;
            fin += r.last().unwrap().hypervolume / 5.0;
            fin_pop += r.last().unwrap().population_hypervolume / 5.0;
            runs.records.push((a, seed, r));
        }
        ok &= fin > init;
        parts.push(format!("{a}: {init:.4} -> archive {fin:.4} (population {fin_pop:.4})"));
    }
    check(ok, format!("mean HV over 5 seeds, {}", parts.join("; ")))
}

fn criterion_7(runs: &Runs) -> Verdict {
    let mut bad = Vec::new();
    for (a, seed, r) in &runs.records {
        let last = r.last().unwrap();
        let monotone = r.generations.windows(2).all(|w| w[1].hypervolume >= w[0].hypervolume);
        let all = r.all_evaluations().count();
        if archive_key(&last.archive) != brute_force_archive(r) || !monotone || all != 210 {
            bad.push(format!("{a}/{seed}"));
        }
    }
    check(bad.is_empty(), format!("{} runs x 210 evaluations checked, failures: {bad:?}", runs.records.len()))
}

fn eps(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| y - x).fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    while sets < 100 {
        let p = random_population(&mut rng, 20);
        if p.len() < 2 {
            continue;
        }
        sets += 1;
        let kappa = DEFAULT_KAPPA;
        let mut state = IbeaFitness::new(&p, kappa).unwrap();
        let c = (0..p.len())
            .flat_map(|i| (0..p.len()).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| eps(&p[i], &p[j]).abs())
            .fold(0.0, f64::max);
        if c == 0.0 {
            continue;
        }
        let mut alive: Vec<usize> = (0..p.len()).collect();
        while alive.len() > 1 {
            for &x in &alive {
                let full: f64 =
                    alive.iter().filter(|&&y| y != x).map(|&y| -(-eps(&p[y], &p[x]) / (kappa * c)).exp()).sum();
                // terms reach exp(1/kappa), so compare relative to magnitude
                worst = worst.max((full - state.fitness(x)).abs() / full.abs().max(1.0));
            }
            let w = state.worst().unwrap();
            state.remove(w);
            alive.retain(|&i| i != w);
        }
    }
    check(worst <= 1e-9, format!("100 sets, max relative |incremental - recomputed| = {worst:.2e}"))
}

fn criterion_9() -> Verdict {
    let w = riesz_weights::<f64>(10, 2).unwrap();
    let mut firsts: Vec<f64> = w.iter().map(|v| v[0]).collect();
    firsts.sort_by(f64::total_cmp);
    let dev = firsts.iter().enumerate().map(|(k, x)| (x - k as f64 / 9.0).abs()).fold(0.0, f64::max);
    let w3 = riesz_weights::<f64>(10, 3).unwrap();
    let simplex = w3.len() == 10
        && w3.iter().all(|v| v.len() == 3 && v.iter().all(|x| *x >= 0.0) && (v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let min_dist = |pts: &[Vec<f64>]| {
        let mut d = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                d = d.min(pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
            }
        }
        d
    };
    let ours = min_dist(&w3.iter().map(|v| v.to_vec()).collect::<Vec<_>>());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut random: Vec<f64> = (0..100)
        .map(|_| {
            let pts: Vec<Vec<f64>> = (0..10)
                .map(|_| {
                    let e: Vec<f64> = (0..3).map(|_| -rng.gen::<f64>().ln()).collect();
                    let s: f64 = e.iter().sum();
                    e.iter().map(|x| x / s).collect()
                })
                .collect();
            min_dist(&pts)
        })
        .collect();
    random.sort_by(f64::total_cmp);
    let median = random[50];
    check(
        dev <= 1e-3 && simplex && ours >= median,
        format!("m=2 max deviation {dev:.2e}; m=3 on simplex={simplex}, min distance {ours:.3} vs random median {median:.3}"),
    )
}

fn criterion_10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pieces = ["[", "]", " ", "\n", ",", "-", "0", "1", "7", "12", "20", "21", "99999999999", "[3]", "[ 4 ]", "[[", "]]", "ü", "item", "[-1]", "[1.5]", "#"];
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=25);
        let candidates: Vec<u64> = (0..n).map(|i| 500 + i as u64 * 3).collect();
        let sample = EvalSample { session_context: vec![1], target: candidates[0], candidates: candidates.clone() };
        let len = rng.gen_range(0..60);
        let text: String = (0..len).map(|_| *pieces.choose(&mut rng).unwrap()).collect();
        let out = catch_unwind(|| parse_ranking(&text, &sample));
        match out {
            Ok(r) => {
                let mut got = r.0.clone();
                got.sort_unstable();
                if got != candidates {
                    bad += 1;
                }
            }
            Err(_) => bad += 1,
        }
    }
    check(bad == 0, format!("10000 fuzzed responses, {bad} invalid"))
}

fn criterion_11() -> Verdict {
    let bench = synthetic_bench(&[ObjectiveKind::Acc, ObjectiveKind::Div]);
    let example = OperatorTemplates::default().example_prompt.trim().to_string();
    let stream = |ablation: Ablation| {
        let rec = Recorder::new(MockProvider::new());
        let cfg = RunConfig { ablation, ..RunConfig::new(Algorithm::Ibea, 0) };
        run(&cfg, &bench, &rec).unwrap();
        rec.requests()
    };
    let base = stream(Ablation::default());
    let wo_init = stream(Ablation { wo_init: true, wo_cm: false });
    let wo_cm = stream(Ablation { wo_init: false, wo_cm: true });
    let of = |r: &[rsbench_core::provider::ChatRequest], task: &str| {
        r.iter().filter(|q| q.user_text.starts_with(task)).map(|q| q.user_text.clone()).collect::<Vec<_>>()
    };
    let base_init = of(&base, "#TASK:INIT");
    let base_vary = of(&base, "#TASK:VARY");
    let init_ok = base_init.iter().all(|t| t.contains(&example))
        && of(&wo_init, "#TASK:INIT").iter().all(|t| !t.contains(&example))
        && !of(&wo_init, "#TASK:INIT").is_empty();
    let cm_vary = of(&wo_cm, "#TASK:VARY");
    let cm_ok = base_vary.iter().all(|t| t.contains("Prompt 2:") && !t.contains("following set"))
        && !cm_vary.is_empty()
        && cm_vary.iter().all(|t| t.contains("following set") && t.contains("Prompt 10:"));
    check(
        init_ok && cm_ok && base != wo_init && base != wo_cm,
        format!(
            "default {} INIT / {} VARY requests; wo_init INIT lacks example={init_ok}; wo_cm population-conditioned={cm_ok}",
            base_init.len(),
            base_vary.len()
        ),
    )
}

fn criterion_12() -> Verdict {
    let dir = std::env::var_os("RSBENCH_ML1M_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data/ml-1m"));
    let ratings = dir.join("ratings.dat");
    if !ratings.exists() {
        return Verdict::Skip(format!("{} not found; set RSBENCH_ML1M_DIR to check", ratings.display()));
    }
    let movies = dir.join("movies.dat");
    let report = match rsbench_core::dataset::parse_dataset(&ratings, DatasetFormat::RatingsDelimited, Some(&movies)) {
        Ok(r) => r,
        Err(e) => return Verdict::Skip(format!("ingest failed: {e}")),
    };
    let stats = Dataset::from_report("ml-1m", &report).stats().unwrap();
    let detail = format!(
        "items {} (reference 3416), sessions {}, avg length {:.3} (reference 6.85 ± 0.05)",
        stats.items, stats.sessions, stats.avg_session_length
    );
    if stats.items == 3416 && (stats.avg_session_length - 6.85).abs() <= 0.05 {
        Verdict::Pass(detail)
    } else {
        Verdict::Skip(format!("deviation logged, not gating: {detail}"))
    }
}

fn main() -> ExitCode {
    let mut runs = Runs { records: Vec::new() };
    let mut failed = 0;
    let mut guarded = |n: usize, f: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Verdict::Fail(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match verdict {
            Verdict::Pass(d) => println!("criterion {n:>2}: PASS  {d} [{t:.2?}]"),
            Verdict::Skip(d) => println!("criterion {n:>2}: SKIP  (non-gating) {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {d} [{t:.2?}]");
            }
        }
    };
    guarded(1, &mut criterion_1);
    guarded(2, &mut criterion_2);
    guarded(3, &mut criterion_3);
    guarded(4, &mut criterion_4);
    guarded(5, &mut || criterion_5(&mut runs));
    guarded(6, &mut || criterion_6(&mut runs));
    guarded(7, &mut || criterion_7(&runs));
    guarded(8, &mut criterion_8);
    guarded(9, &mut criterion_9);
    guarded(10, &mut criterion_10);
    guarded(11, &mut criterion_11);
    guarded(12, &mut criterion_12);
    if failed == 0 {
        println!("acceptance: all gating criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
