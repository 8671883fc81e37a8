//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion hard-fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepfit::anchored::{
    anchored_j_step, doubly_anchored_two_step, left_anchored_two_step, right_anchored_two_step,
    AnchorSpec,
};
use stepfit::generate::{generate, ShapeProfile, WeightProfile};
use stepfit::geom::{key_cmp, set_cost};
use stepfit::kstep::{equal_size_partition, find_big_partition};
use stepfit::one_center::weighted_one_center_with_stats;
use stepfit::oracle::{
    oracle_anchored, oracle_feasibility, oracle_k_step, oracle_k_step_constrained,
    oracle_one_center, LockedGroup, OracleConstraints,
};
use stepfit::{feasibility_test, k_step, CostModel, Point};

const SHAPES: [ShapeProfile; 3] = [
    ShapeProfile::Random,
    ShapeProfile::Staircase,
    ShapeProfile::Adversarial,
];
const WEIGHTS: [WeightProfile; 2] = [WeightProfile::Uniform, WeightProfile::Heavy];

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

struct Case {
    p: Vec<Point>,
    k: usize,
    model: CostModel,
    label: String,
}

/// Instances for the oracle-equivalence criteria: every shape, weight
/// profile and model, with n and k spread over their ranges.
fn cases(count: u64, n_max: usize, k_max: usize, models: &[CostModel]) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=n_max);
            let k = rng.gen_range(1..=k_max);
            let shape = SHAPES[i as usize % 3];
            let weights = WEIGHTS[(i as usize / 3) % 2];
            let model = models[(i as usize / 6) % models.len()];
            Case {
                p: generate(n, k, i, weights, shape),
                k,
                model,
                label: format!("seed {i} n {n} k {k} {shape:?} {weights:?} {model}"),
            }
        })
        .collect()
}

#[derive(PartialEq)]
enum Verdict {
    Pass,
    /// Reported but not a hard failure.
    Soft,
    Fail,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn judge(failures: &[String], checked: usize, what: &str) -> Outcome {
    let mut detail = format!("{}/{checked} {what}", checked - failures.len());
    if std::env::var("ACCEPT_DEBUG").is_ok() {
        for f in failures {
            eprintln!("{f}");
        }
    }
    if let Some(f) = failures.first() {
        detail += &format!("; first failure: {f}");
    }
    Outcome {
        verdict: if failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail,
    }
}

fn criterion_1(cases: &[Case]) -> Outcome {
    let mut bad = Vec::new();
    let mut fallbacks = 0;
    for c in cases {
        let r = k_step(&c.p, c.k, c.model).unwrap();
        let (_, o) = oracle_k_step(&c.p, c.k, c.model);
        fallbacks += r.diagnostics.fallbacks;
        if !rel_eq(r.cost, o, 1e-9) {
            bad.push(format!("{}: {} vs oracle {o}", c.label, r.cost));
        }
    }
    let mut out = judge(&bad, cases.len(), "instances match the oracle");
    out.detail += &format!(", {fallbacks} bisection fallbacks");
    if fallbacks > 0 && out.verdict == Verdict::Pass {
        out.verdict = Verdict::Soft;
    }
    out
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = Vec::new();
    let count = 1000;
    for i in 0..count {
        let n = rng.gen_range(1..=500);
        let model = [CostModel::Linear, CostModel::Squared][i % 2];
        let p = generate(n, 1, i as u64, WEIGHTS[i / 2 % 2], SHAPES[i / 4 % 3]);
        let run = weighted_one_center_with_stats(&p, model);
        let (_, o) = oracle_one_center(&p, model);
        if !rel_eq(run.cost, o, 1e-9) {
            bad.push(format!("instance {i} n {n}: {} vs oracle {o}", run.cost));
        }
    }
    judge(&bad, count, "one-center instances match the oracle")
}

fn criterion_3(cases: &[Case]) -> Outcome {
    let mut bad = Vec::new();
    let (mut prune_rounds, mut center_rounds) = (0, 0);
    for c in cases {
        let r = k_step(&c.p, c.k, c.model).unwrap();
        let d = &r.diagnostics;
        for rec in &d.prune_records {
            prune_rounds += 1;
            if rec.removed < rec.required() {
                bad.push(format!("{}: prune round {rec:?}", c.label));
            }
        }
        center_rounds += d.one_center_rounds;
        if d.violations > 0 {
            bad.push(format!("{}: {} violations", c.label, d.violations));
        }
        let run = weighted_one_center_with_stats(&c.p, c.model);
        for s in &run.rounds {
            center_rounds += 1;
            if s.removed < s.size / 6 {
                bad.push(format!("{}: one-center round {s:?}", c.label));
            }
        }
    }
    Outcome {
        verdict: if bad.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail: format!(
            "{} violations over {prune_rounds} prune rounds and {center_rounds} one-center rounds{}",
            bad.len(),
            bad.first().map_or(String::new(), |b| format!("; first: {b}"))
        ),
    }
}

fn criterion_4(cases: &[Case]) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for c in cases {
        let (_, d) = oracle_k_step(&c.p, c.k, c.model);
        if d <= 0.0 {
            continue;
        }
        checked += 1;
        if !feasibility_test(&c.p, d, c.k, c.model).feasible {
            bad.push(format!("{}: infeasible at D* = {d}", c.label));
        }
        let below = d * (1.0 - 1e-6) - 1e-12;
        if feasibility_test(&c.p, below, c.k, c.model).feasible {
            bad.push(format!("{}: feasible below D* = {d}", c.label));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..200 {
        let c = &cases[t * 7 % cases.len()];
        let (_, d) = oracle_k_step(&c.p, c.k, c.model);
        let k = rng.gen_range(1..=c.k + 1);
        // stay clear of the threshold so rounding cannot decide the answer
        let mut f: f64 = rng.gen_range(0.0..2.0);
        if (f - 1.0).abs() < 1e-3 {
            f = 1.5;
        }
        let dd = d * f + if d == 0.0 { f } else { 0.0 };
        checked += 1;
        let ours = feasibility_test(&c.p, dd, k, c.model).feasible;
        let theirs = oracle_feasibility(&c.p, dd, k, c.model);
        if ours != theirs {
            bad.push(format!(
                "{} at D = {dd}, k = {k}: {ours} vs oracle {theirs}",
                c.label
            ));
        }
    }
    judge(&bad, checked, "feasibility checks agree")
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    let count = 100;
    for i in 0..count {
        let n = rng.gen_range(1..=60);
        let k = rng.gen_range(1..=4);
        let model = [CostModel::Linear, CostModel::Squared][i % 2];
        let mut p = generate(n, k, 500 + i as u64, WEIGHTS[i / 2 % 2], SHAPES[i % 3]);
        p.sort_by(key_cmp);
        let scheme = equal_size_partition(&p, k);
        let k = scheme.k();
        let j = find_big_partition(&p, &scheme, k, model).unwrap();
        let ids: Vec<usize> = p[scheme.bucket(j - 1)].iter().map(|q| q.id).collect();
        let (_, best) = oracle_k_step(&p, k, model);
        // spanned: some optimal solution keeps the whole bucket in one segment
        let spanned = (1..=k).any(|s| {
            let cons = OracleConstraints {
                locked: vec![LockedGroup {
                    ids: ids.clone(),
                    segment: s,
                }],
                ..Default::default()
            };
            oracle_k_step_constrained(&p, k, model, &cons)
                .is_some_and(|(_, c)| c <= best * (1.0 + 1e-9))
        });
        if !spanned {
            bad.push(format!(
                "instance {i} n {n} k {k}: bucket {j} is not spanned"
            ));
        }
    }
    judge(&bad, count, "big buckets are spanned by an optimal segment")
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    let count = 300;
    for i in 0..count {
        let n = rng.gen_range(1..=60);
        let j = rng.gen_range(1..=4);
        let model = [CostModel::Linear, CostModel::Squared][i % 2];
        let p = generate(n, j, 900 + i as u64, WEIGHTS[i / 2 % 2], SHAPES[i % 3]);
        let a = rng.gen_range(-20.0..120.0);
        let b = rng.gen_range(-20.0..120.0);
        let tag = format!("instance {i} n {n} j {j} {model}");
        let check = |what: &str, got: f64, want: f64| {
            (!rel_eq(got, want, 1e-9)).then(|| format!("{tag} {what}: {got} vs oracle {want}"))
        };
        let (_, o) = oracle_anchored(&p, AnchorSpec::Both(a, b), 2, model);
        for maximal in [true, false] {
            let s = doubly_anchored_two_step(&p, a, b, model, maximal).unwrap();
            bad.extend(check("doubly", s.cost, o));
        }
        let (_, o) = oracle_anchored(&p, AnchorSpec::Left(a), 2, model);
        bad.extend(check(
            "left 2-step",
            left_anchored_two_step(&p, a, model).unwrap().1,
            o,
        ));
        let (_, o) = oracle_anchored(&p, AnchorSpec::Right(b), 2, model);
        bad.extend(check(
            "right 2-step",
            right_anchored_two_step(&p, b, model).unwrap().1,
            o,
        ));
        for spec in [AnchorSpec::Left(a), AnchorSpec::Right(b)] {
            let (f, c) = anchored_j_step(&p, spec, j, model).unwrap();
            let (_, o) = oracle_anchored(&p, spec, j, model);
            bad.extend(check("j-step", c, o));
            let pinned = match spec {
                AnchorSpec::Left(a) => f.segments()[0].y == a,
                _ => f.segments()[j - 1].y == b,
            };
            if !pinned || f.k() != j {
                bad.push(format!("{tag}: {spec:?} fit does not honour the anchor"));
            }
        }
    }
    judge(&bad, count, "instances match the anchored oracle")
}

fn criterion_7() -> Outcome {
    let mut bad = Vec::new();
    let count = 120;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..count {
        let n = rng.gen_range(1..=80);
        let k = rng.gen_range(1..=6);
        let model = [CostModel::Linear, CostModel::Squared][i % 2];
        let p = generate(n, k, 2000 + i as u64, WEIGHTS[i / 2 % 2], SHAPES[i % 3]);
        let tag = format!("instance {i} n {n} k {k} {model}");
        let cost = |q: &[Point], k: usize| k_step(q, k, model).unwrap().cost;

        let c: Vec<f64> = (1..=k + 1).map(|kk| cost(&p, kk)).collect();
        if c.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            bad.push(format!("{tag}: not monotone in k: {c:?}"));
        }

        let mut sorted = p.clone();
        sorted.sort_by(key_cmp);
        let runs = 1 + sorted.windows(2).filter(|w| w[0].y != w[1].y).count();
        for kk in [runs.saturating_sub(1).max(1), runs] {
            if (cost(&p, kk) == 0.0) != (kk >= runs) {
                bad.push(format!("{tag}: k = {kk} with {runs} runs"));
            }
        }

        let lambda = rng.gen_range(0.01..100.0);
        let scaled: Vec<Point> = p
            .iter()
            .map(|q| Point::new(q.x, q.y, q.w * lambda, q.id))
            .collect();
        if !rel_eq(cost(&scaled, k), lambda * c[k - 1], 1e-12) {
            bad.push(format!("{tag}: weight scaling by {lambda}"));
        }

        let shift = rng.gen_range(-1000.0..1000.0);
        let moved: Vec<Point> = p
            .iter()
            .map(|q| Point::new(q.x, q.y + shift, q.w, q.id))
            .collect();
        let base = k_step(&p, k, model).unwrap();
        let r = k_step(&moved, k, model).unwrap();
        let slack = 1e-9 * (1.0 + base.cost) + 1e-9 * shift.abs();
        let heights_ok = base
            .fit
            .segments()
            .iter()
            .zip(r.fit.segments())
            .all(|(s, t)| (t.y - s.y - shift).abs() <= 1e-9 * (1.0 + s.y.abs() + shift.abs()));
        let shifted_fit = stepfit::StepFunction::new(
            base.fit
                .segments()
                .iter()
                .map(|s| stepfit::Segment {
                    y: s.y + shift,
                    ..*s
                })
                .collect(),
        )
        .unwrap();
        let shifted_cost = set_cost(&moved, &shifted_fit, model).unwrap();
        if (r.cost - base.cost).abs() > slack
            || (shifted_cost - base.cost).abs() > slack
            || !heights_ok
        {
            bad.push(format!(
                "{tag}: translation by {shift}: {} vs {}",
                r.cost, base.cost
            ));
        }
    }
    judge(
        &bad,
        count,
        "instances satisfy monotonicity, zero-cost, scaling and translation",
    )
}

fn criterion_8() -> Outcome {
    let sizes = [100_000, 200_000, 400_000];
    let trials = 5;
    let mut medians = Vec::new();
    for &n in &sizes {
        let mut times: Vec<Duration> = (0..trials)
            .map(|t| {
                let p = generate(n, 3, 8000 + t, WeightProfile::Uniform, ShapeProfile::Random);
                let start = Instant::now();
                k_step(&p, 3, CostModel::Linear).unwrap();
                start.elapsed()
            })
            .collect();
        times.sort();
        medians.push(times[times.len() / 2].as_secs_f64());
    }
    let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0]).collect();
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let verdict = if worst <= 3.0 {
        Verdict::Pass
    } else if worst <= 6.0 {
        Verdict::Soft
    } else {
        Verdict::Fail
    };
    Outcome {
        verdict,
        detail: format!(
            "median seconds {:?}, ratios per doubling {:?}",
            medians
                .iter()
                .map(|m| (m * 1e3).round() / 1e3)
                .collect::<Vec<_>>(),
            ratios
                .iter()
                .map(|r| (r * 1e3).round() / 1e3)
                .collect::<Vec<_>>()
        ),
    }
}

fn criterion_9(cases: &[Case]) -> Outcome {
    let squared: Vec<&Case> = cases
        .iter()
        .filter(|c| c.model == CostModel::Squared)
        .collect();
    let mut bad = Vec::new();
    for c in &squared {
        let r = k_step(&c.p, c.k, CostModel::Squared).unwrap();
        let (_, o) = oracle_k_step(&c.p, c.k, CostModel::Squared);
        if !rel_eq(r.cost, o, 1e-9) {
            bad.push(format!("{}: {} vs oracle {o}", c.label, r.cost));
        }
        let root: Vec<Point> =
            c.p.iter()
                .map(|q| Point::new(q.x, q.y, q.w.sqrt(), q.id))
                .collect();
        let lin = k_step(&root, c.k, CostModel::Linear).unwrap().cost;
        if !rel_eq(r.cost, lin * lin, 1e-12) {
            bad.push(format!(
                "{}: {} vs squared linear {}",
                c.label,
                r.cost,
                lin * lin
            ));
        }
    }
    judge(
        &bad,
        squared.len(),
        "squared instances match the oracle and the √w reduction",
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let both = [CostModel::Linear, CostModel::Squared];
    let suite = cases(600, 160, 6, &both);
    let criteria: Vec<Criterion> = vec![
        ("1 oracle equivalence", Box::new(|| criterion_1(&suite))),
        ("2 one-center equivalence", Box::new(criterion_2)),
        ("3 pruning fraction", Box::new(|| criterion_3(&suite))),
        (
            "4 feasibility correctness",
            Box::new(|| criterion_4(&suite)),
        ),
        ("5 big-partition soundness", Box::new(criterion_5)),
        ("6 anchored solvers", Box::new(criterion_6)),
        ("7 structural invariants", Box::new(criterion_7)),
        ("8 linear scaling", Box::new(criterion_8)),
        ("9 squared model", Box::new(|| criterion_9(&suite))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let tag = match out.verdict {
            Verdict::Pass => "PASS",
            Verdict::Soft => "SOFT",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "{tag} criterion {name}: {} [{:.1}s]",
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
