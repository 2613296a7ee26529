//! Grid refutation. Each movable is restricted to a grid of spacing `delta`
//! anchored at its origin. Any true solution rounds to grid points that satisfy
//! every constraint relaxed by `e = delta * 99/70` (at least `delta * sqrt(2)`)
//! per moved endpoint, so an empty relaxed search proves infeasibility.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::geometry::{Point, Variant};
use crate::numerics::Rational;

use super::{Deadline, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridOutcome {
    /// No grid assignment satisfies the relaxed constraints.
    Infeasible,
    /// A grid assignment satisfies the exact constraints.
    ExactHit(Vec<Point>),
    /// Only relaxed grid assignments were found.
    RelaxedOnly,
    TooLarge,
    TimedOut,
}

const DOMAIN_CAP: i128 = 4_000_000;
const COORD_LIMIT: i128 = 1 << 60;

/// Slack per moved endpoint for grid spacing `delta`.
pub fn slack(delta: &Rational) -> Rational {
    delta * Rational::new(99, 70)
}

struct Scaled {
    s: BigInt,
}

impl Scaled {
    fn int(&self, v: &Rational) -> Option<i128> {
        let x = v * Rational::from_integer(self.s.clone());
        debug_assert!(x.is_integer());
        i128::try_from(x.floor()).ok().filter(|x| x.abs() < COORD_LIMIT)
    }

    fn floor(&self, v: &Rational) -> Option<i128> {
        i128::try_from((v * Rational::from_integer(self.s.clone())).floor()).ok()
    }

    fn ceil(&self, v: &Rational) -> Option<i128> {
        i128::try_from((v * Rational::from_integer(self.s.clone())).ceil()).ok()
    }
}

fn d2i(a: (i128, i128), b: (i128, i128)) -> i128 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    dx * dx + dy * dy
}

struct Search<'a> {
    origins: Vec<(i128, i128)>,
    order: Vec<usize>,
    near: Vec<Vec<(i128, i128)>>,
    relaxed_pair: Option<i128>,
    exact_sep: i128,
    d2: &'a Rational,
    s2: Rational,
    variant: Variant,
    nodes: u64,
    deadline: &'a Deadline,
}

enum Step {
    Exhausted,
    Found(Vec<(i128, i128)>),
    Relaxed,
    TimedOut,
}

impl Search<'_> {
    fn exact(&self, assign: &[(i128, i128)]) -> bool {
        for (i, &p) in assign.iter().enumerate() {
            let o = self.origins[i];
            let mv = Rational::from_integer(BigInt::from(d2i(p, o))) / &self.s2;
            if &mv > self.d2 {
                return false;
            }
            if self.variant == Variant::Rectilinear && p.0 != o.0 && p.1 != o.1 {
                return false;
            }
            if self.near[i].iter().any(|&f| d2i(p, f) < self.exact_sep) {
                return false;
            }
            if assign[..i].iter().any(|&q| d2i(p, q) < self.exact_sep) {
                return false;
            }
        }
        true
    }

    /// `doms[t]` is the remaining domain of movable `order[level + t]`.
    fn run(&mut self, level: usize, doms: &[Vec<(i128, i128)>], chosen: &mut Vec<(i128, i128)>) -> Step {
        if level == self.order.len() {
            let mut assign = vec![(0, 0); self.order.len()];
            for (t, &p) in chosen.iter().enumerate() {
                assign[self.order[t]] = p;
            }
            return if self.exact(&assign) { Step::Found(assign) } else { Step::Relaxed };
        }
        for &p in &doms[0] {
            self.nodes += 1;
            if self.nodes.is_multiple_of(4096) && self.deadline.expired() {
                return Step::TimedOut;
            }
            let mut rest: Vec<Vec<(i128, i128)>> = Vec::with_capacity(doms.len() - 1);
            let mut dead = false;
            for d in &doms[1..] {
                let kept: Vec<(i128, i128)> = match self.relaxed_pair {
                    Some(sep) => d.iter().copied().filter(|&q| d2i(p, q) >= sep).collect(),
                    None => d.clone(),
                };
                if kept.is_empty() {
                    dead = true;
                    break;
                }
                rest.push(kept);
            }
            if dead {
                continue;
            }
            chosen.push(p);
            match self.run(level + 1, &rest, chosen) {
                Step::Exhausted => {}
                other => return other,
            }
            chosen.pop();
        }
        Step::Exhausted
    }
}

pub(super) fn refute(p: &Problem, delta: &Rational, deadline: &Deadline) -> GridOutcome {
    if p.origins.is_empty() {
        return GridOutcome::ExactHit(Vec::new());
    }
    let mut s = delta.denom().clone();
    for (x, y) in p.fixed.iter().chain(&p.origins) {
        s = s.lcm(x.denom()).lcm(y.denom());
    }
    let sc = Scaled { s: s.clone() };
    let e = slack(delta);
    let two = Rational::from(2);
    let d_up = p.d_upper();
    let (Some(step), Some(reach)) = (sc.int(delta), sc.ceil(&(&d_up + &e))) else { return GridOutcome::TooLarge };
    let radius = reach / step;
    if (2 * radius + 1) * (2 * radius + 1) > DOMAIN_CAP {
        return GridOutcome::TooLarge;
    }
    let relaxed_fixed = if e < two { sc.floor(&(&two - &e)).map(|v| v * v) } else { Some(0) };
    let relaxed_pair = if &e * &two < two { sc.floor(&(&two - &e * &two)).map(|v| v * v) } else { Some(0) };
    let (Some(relaxed_fixed), Some(relaxed_pair)) = (relaxed_fixed, relaxed_pair) else { return GridOutcome::TooLarge };
    let Some(two_s) = sc.int(&two) else { return GridOutcome::TooLarge };
    let conv = |c: &(Rational, Rational)| Some((sc.int(&c.0)?, sc.int(&c.1)?));
    let Some(origins) = p.origins.iter().map(conv).collect::<Option<Vec<_>>>() else { return GridOutcome::TooLarge };
    let Some(fixed) = p.fixed.iter().map(conv).collect::<Option<Vec<_>>>() else { return GridOutcome::TooLarge };
    let touch = reach + two_s;
    let near: Vec<Vec<(i128, i128)>> =
        origins.iter().map(|&o| fixed.iter().copied().filter(|&f| d2i(o, f) <= touch * touch).collect()).collect();
    let mut domains = Vec::with_capacity(origins.len());
    for (m, &o) in origins.iter().enumerate() {
        let mut dom = Vec::new();
        for j in -radius..=radius {
            for i in -radius..=radius {
                if p.variant == Variant::Rectilinear && i != 0 && j != 0 {
                    continue;
                }
                let q = (o.0 + i * step, o.1 + j * step);
                if d2i(q, o) > reach * reach {
                    continue;
                }
                if near[m].iter().all(|&f| d2i(q, f) >= relaxed_fixed) {
                    dom.push(q);
                }
            }
        }
        if dom.is_empty() {
            return GridOutcome::Infeasible;
        }
        domains.push(dom);
    }
    let mut order: Vec<usize> = (0..origins.len()).collect();
    order.sort_by_key(|&m| (domains[m].len(), m));
    let mut search = Search {
        origins,
        order: order.clone(),
        near,
        relaxed_pair: (relaxed_pair > 0).then_some(relaxed_pair),
        exact_sep: two_s * two_s,
        d2: &p.d2,
        s2: Rational::from_integer(s.clone() * s.clone()),
        variant: p.variant,
        nodes: 0,
        deadline,
    };
    let doms: Vec<Vec<(i128, i128)>> = order.iter().map(|&m| std::mem::take(&mut domains[m])).collect();
    match search.run(0, &doms, &mut Vec::new()) {
        Step::Exhausted => GridOutcome::Infeasible,
        Step::Relaxed => GridOutcome::RelaxedOnly,
        Step::TimedOut => GridOutcome::TimedOut,
        Step::Found(assign) => {
            let sr = Rational::from_integer(s);
            let pts: Vec<Point> = assign
                .into_iter()
                .map(|(x, y)| {
                    Point::rational(Rational::from(BigInt::from(x)) / &sr, Rational::from(BigInt::from(y)) / &sr)
                })
                .collect();
            if p.verify(&pts) {
                GridOutcome::ExactHit(pts)
            } else {
                GridOutcome::RelaxedOnly
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn triple_middle(d2: &str) -> Problem {
        Problem {
            fixed: vec![(q("0"), q("0")), (q("2"), q("0"))],
            origins: vec![(q("1"), q("0"))],
            d2: q(d2),
            variant: Variant::Euclidean,
        }
    }

    #[test]
    fn slack_dominates_sqrt2() {
        let e = slack(&q("1"));
        assert!(e.square() >= q("2"));
    }

    #[test]
    fn refutes_short_moves() {
        let dl = Deadline::after(Duration::from_secs(10));
        assert_eq!(refute(&triple_middle("1/4"), &q("1/16"), &dl), GridOutcome::Infeasible);
        for delta in ["1/8", "1/16", "1/32"] {
            assert_eq!(refute(&triple_middle("1/4"), &q(delta), &dl), GridOutcome::Infeasible, "{delta}");
        }
    }

    #[test]
    fn finds_lattice_solution() {
        let dl = Deadline::after(Duration::from_secs(10));
        let p = Problem { origins: vec![(q("0"), q("0"))], fixed: vec![(q("1"), q("0"))], ..triple_middle("1") };
        assert!(matches!(refute(&p, &q("1/4"), &dl), GridOutcome::ExactHit(_) | GridOutcome::RelaxedOnly));
    }
}
