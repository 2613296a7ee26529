//! Decision procedure: kernelize, enumerate candidate moved-sets (vertex covers
//! of the intersection graph), and decide the placement problem for each set.
//!
//! Placement is decided by three stages: exact tangency candidates, a numeric
//! penalty descent whose output is re-verified exactly, and a grid refutation
//! that proves infeasibility. Yes and No answers are always certified; anything
//! else is reported as Unknown.

mod candidates;
mod covers;
mod grid;
mod numeric;
mod oracle;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::geometry::{compare_to, dist2, within_move, Point, Variant};
use crate::instance_io::{validate_witness, HoleIndex, Instance, Mode, Verdict, Witness};
use crate::kernel::{kernelize, move_radius_upper, KernelOutcome};
use crate::numerics::{Comparison, Rational};
use crate::udg::{approx_vc, build_graph_with, EdgeRule, IntersectionGraph, VertexCover};

pub use covers::enumerate_candidate_sets;
pub use grid::GridOutcome;
pub use oracle::{oracle, OracleError, ORACLE_MAX_DISKS, ORACLE_MAX_K};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Largest moved-set considered; `None` means the instance budget.
    pub max_set_size: Option<u64>,
    /// Finest grid resolution used for refutation.
    pub delta: Rational,
    pub use_candidates: bool,
    pub use_numeric: bool,
    pub use_grid: bool,
    /// Search nodes allowed for exact candidate assignments per moved-set.
    pub candidate_node_cap: usize,
    pub numeric_starts: usize,
    pub time_budget: Duration,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    pub seed: u64,
    /// Upper limit on the number of moved-sets enumerated.
    pub max_candidate_sets: usize,
    pub kernelize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_set_size: None,
            delta: Rational::new(1, 16),
            use_candidates: true,
            use_numeric: true,
            use_grid: true,
            candidate_node_cap: 20_000,
            numeric_starts: 12,
            time_budget: Duration::from_secs(60),
            jobs: 1,
            seed: 0x5eed,
            max_candidate_sets: 200_000,
            kernelize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Yes(Witness),
    No(Vec<String>),
    Unknown(String),
}

impl Answer {
    pub fn verdict(&self) -> Option<bool> {
        match self {
            Answer::Yes(_) => Some(true),
            Answer::No(_) => Some(false),
            Answer::Unknown(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Answer::Yes(_) => "yes",
            Answer::No(_) => "no",
            Answer::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// New centres for the movables, in input order.
    Feasible(Vec<Point>),
    Infeasible(Rational),
    Unknown(String),
}

/// Placement subproblem: move every disk of `origins` by at most `d` so that
/// none overlaps another movable or a fixed disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub fixed: Vec<(Rational, Rational)>,
    pub origins: Vec<(Rational, Rational)>,
    pub d2: Rational,
    pub variant: Variant,
}

impl Problem {
    pub fn d_upper(&self) -> Rational {
        move_radius_upper(&self.d2)
    }

    /// Fixed disks that a movable can reach or touch, per movable.
    pub(crate) fn near_fixed(&self, slack: &Rational) -> Vec<Vec<usize>> {
        let reach = (self.d_upper() + Rational::from(2) + slack).square();
        self.origins
            .iter()
            .map(|o| {
                (0..self.fixed.len())
                    .filter(|&f| {
                        let c = &self.fixed[f];
                        (&c.0 - &o.0).square() + (&c.1 - &o.1).square() <= reach
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact check of a complete assignment.
    pub fn verify(&self, placed: &[Point]) -> bool {
        if placed.len() != self.origins.len() {
            return false;
        }
        let four = Rational::from(4);
        let apart =
            |a: &Point, b: &Point| matches!(compare_to(&dist2(a, b), &four), Comparison::Equal | Comparison::Greater);
        let near = self.near_fixed(&Rational::zero());
        for (i, p) in placed.iter().enumerate() {
            let o = Point::rational(self.origins[i].0.clone(), self.origins[i].1.clone());
            if within_move(&o, p, &self.d2, self.variant) != Ok(true) {
                return false;
            }
            for &f in &near[i] {
                let c = &self.fixed[f];
                if !apart(p, &Point::rational(c.0.clone(), c.1.clone())) {
                    return false;
                }
            }
            for q in &placed[..i] {
                if !apart(p, q) {
                    return false;
                }
            }
        }
        true
    }
}

pub(crate) struct Deadline(Instant);

impl Deadline {
    pub(crate) fn after(d: Duration) -> Self {
        Deadline(Instant::now() + d)
    }

    pub(crate) fn expired(&self) -> bool {
        Instant::now() >= self.0
    }
}

/// Grid resolutions tried by refutation, coarse to fine, ending at `finest`.
pub fn delta_schedule(finest: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut d = Rational::new(1, 2);
    while &d > finest {
        out.push(d.clone());
        d = d / Rational::from(2);
    }
    out.push(finest.clone());
    out
}

/// Constructive stages only: exact candidates, then numeric descent.
fn construct(p: &Problem, cfg: &SolverConfig, rank: usize, deadline: &Deadline) -> Option<Vec<Point>> {
    if p.origins.is_empty() {
        return Some(Vec::new());
    }
    if cfg.use_candidates {
        if let Some(sol) = candidates::search(p, cfg.candidate_node_cap, deadline) {
            return Some(sol);
        }
    }
    if cfg.use_numeric {
        let seed = cfg.seed ^ (rank as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        if let Some(sol) = numeric::penalty_descent(p, seed, cfg.numeric_starts) {
            return Some(sol);
        }
    }
    None
}

fn refute(p: &Problem, cfg: &SolverConfig, deadline: &Deadline) -> Feasibility {
    if !cfg.use_grid {
        return Feasibility::Unknown("grid refutation disabled".into());
    }
    let mut last = String::from("no grid resolution tried");
    for delta in delta_schedule(&cfg.delta) {
        match grid::refute(p, &delta, deadline) {
            GridOutcome::Infeasible => return Feasibility::Infeasible(delta),
            GridOutcome::ExactHit(sol) => return Feasibility::Feasible(sol),
            GridOutcome::RelaxedOnly => last = format!("relaxed grid solution at delta {delta}"),
            GridOutcome::TooLarge => return Feasibility::Unknown(format!("grid too large at delta {delta}")),
            GridOutcome::TimedOut => return Feasibility::Unknown("time budget exhausted".into()),
        }
    }
    Feasibility::Unknown(last)
}

/// Full three-stage decision for one placement problem.
pub fn feasibility(p: &Problem, cfg: &SolverConfig) -> Feasibility {
    let deadline = Deadline::after(cfg.time_budget);
    if let Some(sol) = construct(p, cfg, 0, &deadline) {
        return Feasibility::Feasible(sol);
    }
    refute(p, cfg, &deadline)
}

struct Prepared {
    /// Working instance (possibly kernelized) and the map back to input indices.
    work: Instance,
    back: Vec<usize>,
    forced: Vec<usize>,
    /// Lattice centres per working disk that a move could reach.
    obstacles: Vec<Vec<(Rational, Rational)>>,
}

const BLOCK_POINT_CAP: usize = 50_000;

fn block_obstacles(inst: &Instance, idx: usize, d_up: &Rational) -> Result<Vec<(Rational, Rational)>, String> {
    let Some((ox, oy)) = inst.disks[idx].center.as_rational() else {
        return Err(format!("disk {idx} has an irrational centre"));
    };
    let reach = d_up + Rational::from(2);
    let mut out = Vec::new();
    for block in &inst.blocks {
        let index = HoleIndex::new(block);
        let b = &block.bounds;
        let lo_i = ((ox - &reach - &b.x0) / &block.step).ceil().max(0.into());
        let hi_i = ((ox + &reach - &b.x0) / &block.step).floor().min(((&b.x1 - &b.x0) / &block.step).floor());
        let lo_j = ((oy - &reach - &b.y0) / &block.step).ceil().max(0.into());
        let hi_j = ((oy + &reach - &b.y0) / &block.step).floor().min(((&b.y1 - &b.y0) / &block.step).floor());
        if lo_i > hi_i || lo_j > hi_j {
            continue;
        }
        let count = (&hi_i - &lo_i + 1) * (&hi_j - &lo_j + 1);
        if count > BLOCK_POINT_CAP.into() {
            return Err("too many lattice disks within reach".into());
        }
        let (lo_i, hi_i, lo_j, hi_j): (i64, i64, i64, i64) =
            (lo_i.try_into().unwrap(), hi_i.try_into().unwrap(), lo_j.try_into().unwrap(), hi_j.try_into().unwrap());
        for j in lo_j..=hi_j {
            let y = &b.y0 + &block.step * Rational::from(j);
            for i in lo_i..=hi_i {
                let x = &b.x0 + &block.step * Rational::from(i);
                if !index.in_hole(&x, &y) {
                    out.push((x, y.clone()));
                }
            }
        }
    }
    Ok(out)
}

fn prepare(inst: &Instance, cfg: &SolverConfig) -> Result<Option<Prepared>, String> {
    if let Some(i) = inst.disks.iter().position(|d| d.center.as_rational().is_none()) {
        return Err(format!("disk {i} has an irrational centre"));
    }
    if inst.blocks.is_empty() {
        if cfg.kernelize {
            return match kernelize(inst).map_err(|e| e.to_string())? {
                KernelOutcome::TriviallyNo => Ok(None),
                KernelOutcome::Reduced(work, report) => {
                    let n = work.disks.len();
                    Ok(Some(Prepared { work, back: report.kept, forced: Vec::new(), obstacles: vec![Vec::new(); n] }))
                }
            };
        }
        let n = inst.disks.len();
        return Ok(Some(Prepared {
            work: inst.clone(),
            back: (0..n).collect(),
            forced: Vec::new(),
            obstacles: vec![Vec::new(); n],
        }));
    }
    let d_up = move_radius_upper(&inst.d2);
    let mut obstacles = Vec::with_capacity(inst.disks.len());
    let mut forced = Vec::new();
    let four = Rational::from(4);
    for i in 0..inst.disks.len() {
        let obs = block_obstacles(inst, i, &d_up)?;
        let (ox, oy) = inst.disks[i].center.as_rational().unwrap();
        if obs.iter().any(|(x, y)| (x - ox).square() + (y - oy).square() < four) {
            forced.push(i);
        }
        obstacles.push(obs);
    }
    let work = Instance { blocks: Vec::new(), ..inst.clone() };
    Ok(Some(Prepared { back: (0..inst.disks.len()).collect(), work, forced, obstacles }))
}

fn problem_for(prep: &Prepared, set: &[usize]) -> Problem {
    let inst = &prep.work;
    let centre = |i: usize| {
        let (x, y) = inst.disks[i].center.as_rational().unwrap();
        (x.clone(), y.clone())
    };
    let mut in_set = vec![false; inst.disks.len()];
    for &i in set {
        in_set[i] = true;
    }
    let mut fixed: Vec<(Rational, Rational)> = (0..inst.disks.len()).filter(|&i| !in_set[i]).map(centre).collect();
    let mut extra: Vec<(Rational, Rational)> = set.iter().flat_map(|&i| prep.obstacles[i].iter().cloned()).collect();
    extra.sort();
    extra.dedup();
    fixed.extend(extra);
    Problem { fixed, origins: set.iter().map(|&i| centre(i)).collect(), d2: inst.d2.clone(), variant: inst.variant }
}

fn witness_from(prep: &Prepared, set: &[usize], placed: &[Point]) -> Witness {
    let mut moves = BTreeMap::new();
    for (&i, p) in set.iter().zip(placed) {
        if &prep.work.disks[i].center != p {
            moves.insert(prep.back[i], p.clone());
        }
    }
    Witness { moves }
}

fn run_in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Decides the instance. Yes answers carry a witness that validates exactly
/// against `inst`; the first feasible moved-set in canonical order wins.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Answer {
    let deadline = Deadline::after(cfg.time_budget);
    let prep = match prepare(inst, cfg) {
        Err(e) => return Answer::Unknown(e),
        Ok(None) => return Answer::No(vec!["greedy matching exceeds the budget".into()]),
        Ok(Some(p)) => p,
    };
    let refs: Vec<&Point> = prep.work.disks.iter().map(|d| &d.center).collect();
    let g = match build_graph_with(&refs, &EdgeRule::unit(), true) {
        Ok(g) => g,
        Err(e) => return Answer::Unknown(e.to_string()),
    };
    if g.is_edgeless() && prep.forced.is_empty() {
        return Answer::Yes(Witness::empty());
    }
    if approx_vc(&g, inst.k) == VertexCover::ExceedsBudget {
        return Answer::No(vec!["greedy matching exceeds the budget".into()]);
    }
    let limit = cfg.max_set_size.map_or(inst.k, |m| m.min(inst.k));
    let sets = match covers::enumerate_with_forced(&g, limit, &prep.forced, cfg.max_candidate_sets) {
        Some(s) => s,
        None => return Answer::Unknown("too many candidate sets".into()),
    };
    if sets.is_empty() {
        return Answer::No(vec![format!("no vertex cover of size at most {limit}")]);
    }
    run_in_pool(cfg.jobs, || search_sets(inst, &prep, &g, &sets, cfg, &deadline))
}

fn search_sets(
    inst: &Instance,
    prep: &Prepared,
    _g: &IntersectionGraph,
    sets: &[Vec<usize>],
    cfg: &SolverConfig,
    deadline: &Deadline,
) -> Answer {
    let chunk = (cfg.jobs.max(1) * 4).max(8);
    let accept = |set: &[usize], placed: &[Point]| -> Option<Witness> {
        let w = witness_from(prep, set, placed);
        match validate_witness(inst, &w, &Mode::Exact) {
            Ok(Verdict::Accept) => Some(w),
            _ => None,
        }
    };
    for (c, block) in sets.chunks(chunk).enumerate() {
        if deadline.expired() {
            return Answer::Unknown("time budget exhausted".into());
        }
        let found: Vec<Option<Witness>> = block
            .par_iter()
            .enumerate()
            .map(|(i, set)| {
                let p = problem_for(prep, set);
                construct(&p, cfg, c * chunk + i, deadline).and_then(|sol| accept(set, &sol))
            })
            .collect();
        if let Some(w) = found.into_iter().flatten().next() {
            return Answer::Yes(w);
        }
    }
    let mut log = Vec::new();
    let mut unknown: Option<String> = None;
    for block in sets.chunks(chunk) {
        if deadline.expired() {
            return Answer::Unknown("time budget exhausted".into());
        }
        let results: Vec<Feasibility> =
            block.par_iter().map(|set| refute(&problem_for(prep, set), cfg, deadline)).collect();
        for (set, r) in block.iter().zip(results) {
            match r {
                Feasibility::Feasible(sol) => {
                    if let Some(w) = accept(set, &sol) {
                        return Answer::Yes(w);
                    }
                    unknown.get_or_insert_with(|| format!("unverified grid solution for set {set:?}"));
                }
                Feasibility::Infeasible(delta) => {
                    let ids: Vec<usize> = set.iter().map(|&i| prep.back[i]).collect();
                    log.push(format!("set {ids:?}: infeasible at delta {delta}"));
                }
                Feasibility::Unknown(why) => {
                    unknown.get_or_insert_with(|| format!("set {set:?}: {why}"));
                }
            }
        }
    }
    match unknown {
        Some(why) => Answer::Unknown(why),
        None => Answer::No(log),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::parse_witness;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn triple(d2: &str) -> Instance {
        Instance::from_ints(Variant::Euclidean, 1, q(d2), &[(0, 0), (1, 0), (2, 0)])
    }

    #[test]
    fn triple_family() {
        let cfg = SolverConfig::default();
        let inst = triple("3");
        let Answer::Yes(w) = solve(&inst, &cfg) else { panic!("expected yes") };
        assert_eq!(validate_witness(&inst, &w, &Mode::Exact), Ok(Verdict::Accept));
        // a unit move cannot free the central disk; two unit moves of the outer disks can
        assert!(matches!(solve(&triple("1"), &cfg), Answer::No(_)));
        let two = Instance { k: 2, ..triple("1") };
        let Answer::Yes(w) = solve(&two, &cfg) else { panic!("expected yes with k = 2") };
        assert_eq!(validate_witness(&two, &w, &Mode::Exact), Ok(Verdict::Accept));
        assert!(matches!(solve(&triple("1/4"), &cfg), Answer::No(_)));
    }

    #[test]
    fn trivial_no_cases() {
        let cfg = SolverConfig::default();
        let pair = Instance::from_ints(Variant::Euclidean, 0, q("5"), &[(0, 0), (1, 0)]);
        assert!(matches!(solve(&pair, &cfg), Answer::No(_)));
        let stack = Instance::from_ints(Variant::Euclidean, 2, q("1000000"), &[(0, 0); 4]);
        assert!(matches!(solve(&stack, &cfg), Answer::No(_)));
    }

    #[test]
    fn feasibility_examples() {
        let cfg = SolverConfig::default();
        let p = Problem {
            fixed: vec![(q("0"), q("0")), (q("2"), q("0"))],
            origins: vec![(q("1"), q("0"))],
            d2: q("3"),
            variant: Variant::Euclidean,
        };
        let Feasibility::Feasible(sol) = feasibility(&p, &cfg) else { panic!() };
        assert!(p.verify(&sol));
        let stuck = Problem { d2: q("0"), ..p.clone() };
        assert!(matches!(feasibility(&stuck, &cfg), Feasibility::Infeasible(_)));
        let empty = Problem { origins: vec![], ..p };
        assert_eq!(feasibility(&empty, &cfg), Feasibility::Feasible(vec![]));
    }

    #[test]
    fn rectilinear_witness_is_axis_parallel() {
        let inst = Instance::from_ints(Variant::Rectilinear, 1, q("4"), &[(0, 0), (1, 0), (2, 0)]);
        let Answer::Yes(w) = solve(&inst, &SolverConfig::default()) else { panic!() };
        assert_eq!(validate_witness(&inst, &w, &Mode::Exact), Ok(Verdict::Accept));
        let euclid = Instance { variant: Variant::Euclidean, ..inst };
        assert_eq!(validate_witness(&euclid, &w, &Mode::Exact), Ok(Verdict::Accept));
    }

    #[test]
    fn parallel_and_serial_agree() {
        let inst =
            Instance::from_ints(Variant::Euclidean, 2, q("2"), &[(0, 0), (1, 0), (2, 0), (3, 1), (5, 5), (6, 5)]);
        let serial = solve(&inst, &SolverConfig::default());
        let parallel = solve(&inst, &SolverConfig { jobs: 4, ..SolverConfig::default() });
        assert_eq!(serial, parallel);
    }

    #[test]
    fn blocks_are_obstacles() {
        let text = "DISKDISPERSAL v1\nvariant: euclidean\nk: 1\nd2: 3\ndisks: 3\n0 0\n1 0\n2 0\nblocks: 1\n-10 -10 30 30 step 2 holes 1\n-1 -1 3 1\n";
        let inst = crate::instance_io::parse_instance(text).unwrap();
        let answer = solve(&inst, &SolverConfig::default());
        if let Answer::Yes(w) = &answer {
            assert_eq!(validate_witness(&inst, w, &Mode::Exact), Ok(Verdict::Accept));
        }
        let bad = parse_witness("DISPERSALMOVES v1\nmoves: 1\n1 -> 1 0+1*sqrt(3)\n").unwrap();
        assert!(!validate_witness(&inst, &bad, &Mode::Exact).unwrap().is_accept());
        assert!(answer.verdict().is_some(), "{answer:?}");
    }
}
