//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dispersal_core::generators::{
    contained_count, gen_appending_frame, gen_colocated, gen_crosscompose, gen_gridtiling, gen_random,
    gridtiling_budget, gridtiling_witness, parse_gridtiling, GenError, GridTilingLayout,
};
use dispersal_core::geometry::{is_packing, Disk, Point, Variant};
use dispersal_core::instance_io::{validate_witness, Instance, LatticeBlock, Mode, Rect, Verdict};
use dispersal_core::kernel::{full_kernel, halo_partition, kernelize, shrink_parts, KernelOutcome};
use dispersal_core::numerics::Rational;
use dispersal_core::solver::{oracle, solve, Answer, SolverConfig};
use dispersal_core::udg::{approx_vc, build_graph, exact_min_cover, VertexCover};

type Check = fn() -> Result<String, String>;

const SAMPLE_TILING: &str = "3 2\n1 1: 1,1 1,2 2,1 3,3\n1 2: 2,2 2,3 3,2\n2 1: 1,1 1,3 2,2 3,1\n2 2: 2,3 3,1 3,3\n";

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig { time_budget: Duration::from_secs(5), ..SolverConfig::default() }
}

fn triple(k: u64, d2: &str) -> Instance {
    Instance::from_ints(Variant::Euclidean, k, q(d2), &[(0, 0), (1, 0), (2, 0)])
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn answers_agree(a: &Answer, b: &Answer) -> Option<bool> {
    match (a.verdict(), b.verdict()) {
        (Some(x), Some(y)) => Some(x == y),
        _ => None,
    }
}

struct Solved {
    inst: Instance,
    answer: Answer,
}

/// 200 seeded random instances with at most 25 disks, `k <= 3` and `d2 <= 9`.
fn corpus() -> &'static [Solved] {
    static CORPUS: OnceLock<Vec<Solved>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let d2s = ["1/4", "1", "2", "3", "4", "9"];
        (0..200u64)
            .map(|seed| {
                let n = 4 + (seed as usize * 7) % 22;
                let k = seed % 4;
                let side = 4 + 3 * (n as u64).isqrt();
                let variant = if seed % 2 == 0 { Variant::Euclidean } else { Variant::Rectilinear };
                let inst = gen_random(n, side, k, q(d2s[(seed / 4) as usize % d2s.len()]), variant, seed);
                let answer = solve(&inst, &cfg());
                Solved { inst, answer }
            })
            .collect()
    })
}

fn triple_family() -> Result<String, String> {
    let limit = Duration::from_secs(1);
    let mut parts = Vec::new();
    let start = Instant::now();
    let inst = triple(1, "3");
    let Answer::Yes(w) = solve(&inst, &cfg()) else { return Err("d2 = 3 is not yes".into()) };
    ensure(validate_witness(&inst, &w, &Mode::Exact) == Ok(Verdict::Accept), || "witness rejected".into())?;
    within(start, limit)?;
    parts.push(format!("d2=3 yes ({} move)", w.len()));

    let start = Instant::now();
    ensure(matches!(solve(&triple(1, "1"), &cfg()), Answer::No(_)), || "d2 = 1, k = 1 is not no".into())?;
    ensure(matches!(oracle(&triple(1, "1"), &q("1/16")), Ok(Answer::No(_))), || "oracle disagrees at d2 = 1".into())?;
    let two = triple(2, "1");
    let Answer::Yes(w) = solve(&two, &cfg()) else { return Err("d2 = 1, k = 2 is not yes".into()) };
    ensure(validate_witness(&two, &w, &Mode::Exact) == Ok(Verdict::Accept), || "k = 2 witness rejected".into())?;
    within(start, limit)?;
    parts.push("d2=1 no with k=1, yes with k=2".into());

    let start = Instant::now();
    ensure(matches!(solve(&triple(1, "1/4"), &cfg()), Answer::No(_)), || "d2 = 1/4 is not no".into())?;
    ensure(matches!(oracle(&triple(1, "1/4"), &q("1/16")), Ok(Answer::No(_))), || {
        "oracle disagrees at d2 = 1/4".into()
    })?;
    within(start, limit)?;
    parts.push("d2=1/4 no (oracle agrees)".into());
    Ok(parts.join("; "))
}

fn kernel_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let (mut determinate, mut total) = (0, 0);
    for (i, s) in corpus().iter().enumerate() {
        total += 1;
        let kernel = match kernelize(&s.inst).map_err(|e| e.to_string())? {
            KernelOutcome::Reduced(k, _) => solve(&k, &cfg()),
            KernelOutcome::TriviallyNo => Answer::No(vec!["trivially no".into()]),
        };
        let full = solve(&full_kernel(&s.inst).map_err(|e| e.to_string())?.instance, &cfg());
        match (answers_agree(&s.answer, &kernel), answers_agree(&s.answer, &full)) {
            (Some(true), Some(true)) => determinate += 1,
            (Some(false), _) | (_, Some(false)) => {
                return Err(format!(
                    "instance {i}: solve {} vs kernel {} vs full kernel {}",
                    s.answer.label(),
                    kernel.label(),
                    full.label()
                ))
            }
            _ => {}
        }
    }
    within(start, Duration::from_secs(600))?;
    ensure(determinate * 100 >= total * 95, || format!("only {determinate}/{total} determinate"))?;
    let yes = corpus().iter().filter(|s| s.answer.verdict() == Some(true)).count();
    Ok(format!("{determinate}/{total} determinate ({yes} yes), all agree"))
}

fn kernel_size_bound() -> Result<String, String> {
    let mut worst = (0usize, BigInt::from(0));
    let mut count = 0;
    for s in corpus() {
        if let KernelOutcome::Reduced(_, r) = kernelize(&s.inst).map_err(|e| e.to_string())? {
            count += 1;
            ensure(BigInt::from(r.kept.len()) <= r.size_bound, || {
                format!("kept {} > bound {}", r.kept.len(), r.size_bound)
            })?;
            if r.kept.len() > worst.0 {
                worst = (r.kept.len(), r.size_bound.clone());
            }
        }
    }
    Ok(format!("{count} kernels within bound; largest kept {} (bound {})", worst.0, worst.1))
}

fn shrinking() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut pairs = 0usize;
    for case in 0..100 {
        let d: i64 = rng.gen_range(0..4);
        let r = Rational::from(2 * d + 2);
        let mut centres = Vec::new();
        let clusters = rng.gen_range(2..6);
        for c in 0..clusters {
            let (cx, cy) = (rng.gen_range(-1000i64..1000) * 50, c as i64 * 10_000 + rng.gen_range(0..1000));
            for _ in 0..rng.gen_range(1..6) {
                let x = Rational::new(cx * 4 + rng.gen_range(-40i64..40), 4);
                let y = Rational::new(cy * 4 + rng.gen_range(-40i64..40), 4);
                centres.push((x, y));
            }
        }
        let disks: Vec<Disk> = centres.iter().map(|(x, y)| Disk::new(Point::rational(x.clone(), y.clone()))).collect();
        let inst = Instance::new(Variant::Euclidean, 0, Rational::from(d * d), disks);
        let parts = halo_partition(&inst, &Rational::from(d)).map_err(|e| e.to_string())?;
        ensure(parts.len() >= 2, || format!("case {case}: single part"))?;
        let out = shrink_parts(&centres, &parts, &r).centres;
        let mut part_of = vec![0; centres.len()];
        for (i, p) in parts.iter().enumerate() {
            for &v in p {
                part_of[v] = i;
            }
        }
        let sq = |p: &(Rational, Rational), s: &(Rational, Rational)| (&p.0 - &s.0).square() + (&p.1 - &s.1).square();
        for a in 0..centres.len() {
            for b in a + 1..centres.len() {
                pairs += 1;
                if part_of[a] == part_of[b] {
                    ensure(sq(&out[a], &out[b]) == sq(&centres[a], &centres[b]), || {
                        format!("case {case}: distance {a}-{b} changed")
                    })?;
                } else {
                    ensure(sq(&out[a], &out[b]) > r.square(), || format!("case {case}: parts too close at {a}-{b}"))?;
                }
            }
        }
    }
    Ok(format!("100 inputs, {pairs} pairs checked exactly"))
}

fn vertex_cover() -> Result<String, String> {
    let mut graphs = 0;
    let mut worst = (0usize, 1usize);
    let small =
        (0..300u64).map(|seed| gen_random(2 + seed as usize % 11, 6, 0, Rational::zero(), Variant::Euclidean, seed));
    for inst in corpus().iter().map(|s| s.inst.clone()).chain(small) {
        if inst.disks.len() > 12 {
            continue;
        }
        let g = build_graph(&inst.disks).map_err(|e| format!("{e:?}"))?;
        let VertexCover::Cover(cover) = approx_vc(&g, u64::MAX) else { return Err("unbounded cover refused".into()) };
        let opt = exact_min_cover(&g);
        ensure(g.is_cover(&cover), || "returned set is not a cover".into())?;
        ensure(cover.len() <= 2 * opt, || format!("cover {} > 2 * {opt}", cover.len()))?;
        if opt > 0 && cover.len() * worst.1 > worst.0 * opt {
            worst = (cover.len(), opt);
        }
        graphs += 1;
    }
    Ok(format!("{graphs} graphs; worst ratio {}/{}", worst.0, worst.1))
}

fn separation_claims() -> Result<String, String> {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (t, a, kappa) in [(3usize, 216u64, 2u64), (5, 240, 3)] {
        let frames = (0..t)
            .map(|i| gen_appending_frame(a, kappa, &[Disk::at(20 + 10 * i as i64, 30)]))
            .collect::<Result<Vec<_>, GenError>>()
            .map_err(|e| e.to_string())?;
        let comp = gen_crosscompose(&frames).map_err(|e| e.to_string())?;
        let r = &comp.report;
        ensure(r.holds(), || format!("({t},{a},{kappa}): {:?}", r.comment_lines()))?;
        ensure(comp.instance.k == 2 * kappa + 1, || format!("budget {}", comp.instance.k))?;
        ensure(comp.stack.len() as u64 == kappa + 2, || format!("|C| = {}", comp.stack.len()))?;
        parts.push(format!("({t},{a},{kappa}) d={} k={} |C|={}", r.d, comp.instance.k, comp.stack.len()));
    }
    within(start, Duration::from_secs(60))?;
    Ok(parts.join("; "))
}

fn grid_tiling() -> Result<String, String> {
    let start = Instant::now();
    let gt = parse_gridtiling(SAMPLE_TILING).map_err(|e| e.to_string())?;
    let layout = GridTilingLayout::build(&gt);
    let inst = gen_gridtiling(&gt);
    ensure(layout.l == 300 && layout.d == 5400, || format!("L = {}, d = {}", layout.l, layout.d))?;
    ensure(gridtiling_budget(2) == 58 && inst.k == 58, || format!("k = {}", inst.k))?;
    ensure(inst.d2 == Rational::from(5400 * 5400), || "d2 is not d^2".into())?;
    ensure(matches!(gridtiling_witness(&gt, &inst, &[2, 2], &[1, 3]), Err(GenError::NotInSets(_))), || {
        "rows (2,2) accepted although (2,1) is not in S(2,1)".into()
    })?;
    let w = gridtiling_witness(&gt, &inst, &[2, 3], &[1, 3]).map_err(|e| e.to_string())?;
    ensure(w.len() == 58, || format!("{} moves", w.len()))?;
    let v = validate_witness(&inst, &w, &Mode::Exact).map_err(|e| e.to_string())?;
    ensure(v == Verdict::Accept, || format!("validator: {v}"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("L=300 d=5400 k=58; rows (2,3) cols (1,3): 58 moves, exact accept ({} disks)", inst.disks.len()))
}

fn curated() -> Vec<Instance> {
    let mut out = Vec::new();
    for v in [Variant::Euclidean, Variant::Rectilinear] {
        for (k, d2) in [(1, "3"), (1, "1"), (2, "1"), (1, "1/4"), (1, "4"), (0, "9")] {
            out.push(Instance { variant: v, ..triple(k, d2) });
        }
        for (m, k) in [(2, 1), (3, 1), (3, 2)] {
            out.push(gen_colocated(m, k, Rational::from(4 * m as i64 * m as i64), v));
        }
    }
    let mut seed = 0;
    while out.len() < 50 {
        let v = if seed % 2 == 0 { Variant::Euclidean } else { Variant::Rectilinear };
        let d2 = ["1", "2", "4"][seed as usize % 3];
        out.push(gen_random(3 + seed as usize % 6, 4, 1 + seed % 2, q(d2), v, 1000 + seed));
        seed += 1;
    }
    out
}

fn oracle_agreement() -> Result<String, String> {
    let start = Instant::now();
    let (mut agree, mut undecided) = (0, 0);
    for (i, inst) in curated().iter().enumerate() {
        let a = solve(inst, &cfg());
        let b = oracle(inst, &q("1/4")).map_err(|e| e.to_string())?;
        match answers_agree(&a, &b) {
            Some(true) => agree += 1,
            Some(false) => return Err(format!("instance {i}: solve {} vs oracle {}", a.label(), b.label())),
            None => undecided += 1,
        }
    }
    within(start, Duration::from_secs(900))?;
    Ok(format!("50 instances: {agree} agree, {undecided} undecided by one side, 0 contradictions"))
}

fn variant_ordering() -> Result<String, String> {
    let mut revalidated = 0;
    let extra: Vec<Solved> = curated()
        .into_iter()
        .filter(|i| i.variant == Variant::Rectilinear)
        .map(|inst| Solved { answer: solve(&inst, &cfg()), inst })
        .collect();
    for s in corpus().iter().chain(&extra) {
        if let (Variant::Rectilinear, Answer::Yes(w)) = (s.inst.variant, &s.answer) {
            let euclid = Instance { variant: Variant::Euclidean, ..s.inst.clone() };
            let v = validate_witness(&euclid, w, &Mode::Exact).map_err(|e| e.to_string())?;
            ensure(v == Verdict::Accept, || format!("euclidean re-validation: {v}"))?;
            revalidated += 1;
        }
    }
    for m in 2..=5usize {
        for v in [Variant::Euclidean, Variant::Rectilinear] {
            let no = gen_colocated(m, m as u64 - 2, Rational::from(4 * (m * m) as i64), v);
            ensure(matches!(solve(&no, &cfg()), Answer::No(_)), || format!("m = {m}, {v}: k = m-2 not no"))?;
            let yes = gen_colocated(m, m as u64 - 1, Rational::from(4 * (m * m) as i64), v);
            let Answer::Yes(w) = solve(&yes, &cfg()) else { return Err(format!("m = {m}, {v}: k = m-1 not yes")) };
            ensure(validate_witness(&yes, &w, &Mode::Exact) == Ok(Verdict::Accept), || {
                "stack witness rejected".into()
            })?;
        }
    }
    Ok(format!("{revalidated} rectilinear witnesses re-validate as euclidean; stacks m=2..5 behave"))
}

fn packing_bound() -> Result<String, String> {
    let mut packings: Vec<Vec<(Rational, Rational)>> = Vec::new();
    let square = LatticeBlock::new(Rect::int(0, 0, 60, 60), Rational::from(2), Vec::new());
    packings.push(square.materialize(10_000).expect("small block").iter().map(centre).collect());
    // offset rows 7/4 apart keep neighbouring centres at distance sqrt(65)/4 > 2
    packings.push(
        (0..36i64)
            .flat_map(|j| (0..32i64).map(move |i| (Rational::from(2 * i + j % 2), Rational::new(7 * j, 4))))
            .collect(),
    );
    for i in 0..3 {
        let interior: Vec<Disk> = (0..20).map(|j| Disk::at(11 + 6 * j, 11 + 40 * i)).collect();
        let frame = gen_appending_frame(216, 2, &interior).map_err(|e| e.to_string())?;
        packings.push(frame.packing.iter().map(centre).collect());
    }
    for seed in 0..6 {
        let inst = gen_random(2000, 30, 0, Rational::zero(), Variant::Euclidean, seed);
        let mut kept: Vec<Disk> = Vec::new();
        for d in inst.disks {
            kept.push(d);
            if is_packing(&kept).is_err() {
                kept.pop();
            }
        }
        packings.push(kept.iter().map(centre).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut queries = 0;
    let mut fullest = (0usize, 1u64);
    for p in &packings {
        let disks: Vec<Disk> = p.iter().map(|(x, y)| Disk::new(Point::rational(x.clone(), y.clone()))).collect();
        ensure(is_packing(&disks).is_ok(), || "generated set is not a packing".into())?;
        let (lo, hi) = p.iter().fold((f64::MAX, f64::MIN), |(lo, hi), c| {
            (lo.min(c.0.to_f64().min(c.1.to_f64())), hi.max(c.0.to_f64().max(c.1.to_f64())))
        });
        let (lo, hi) = (lo as i64 * 8, hi as i64 * 8);
        for r in [3u64, 5, 10] {
            for _ in 0..100 {
                let qx = Rational::new(rng.gen_range(lo..=hi), 8);
                let qy = Rational::new(rng.gen_range(lo..=hi), 8);
                let c = contained_count(p, &(qx, qy), r);
                ensure(c as u64 <= r * r, || format!("{c} disks inside radius {r}"))?;
                if (c as u64) * fullest.1 * fullest.1 > fullest.0 as u64 * r * r {
                    fullest = (c, r);
                }
                queries += 1;
            }
        }
    }
    Ok(format!("{} packings, {queries} queries; fullest {} disks at r={}", packings.len(), fullest.0, fullest.1))
}

fn centre(d: &Disk) -> (Rational, Rational) {
    let (x, y) = d.center.as_rational().expect("generated centres are rational");
    (x.clone(), y.clone())
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 10] = [
        ("collinear triple", triple_family),
        ("kernel equivalence", kernel_equivalence),
        ("kernel size bound", kernel_size_bound),
        ("shrinking correctness", shrinking),
        ("vertex cover approximation", vertex_cover),
        ("cross-composition distance claims", separation_claims),
        ("grid tiling reduction", grid_tiling),
        ("oracle agreement", oracle_agreement),
        ("variant ordering", variant_ordering),
        ("packing bound", packing_bound),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
