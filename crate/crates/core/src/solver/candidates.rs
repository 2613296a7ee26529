//! Exact tangency candidates and a depth-first assignment search over them.

use std::collections::HashSet;

use crate::geometry::{circle_circle_candidates, compare_to, dist2, within_move, Point, Variant};
use crate::numerics::{Comparison, QuadExt, Rational, Scalar};

use super::{Deadline, Problem};

fn d_scalar(d2: &Rational) -> Scalar {
    match d2.exact_sqrt() {
        Some(r) => Scalar::Rational(r),
        None => Scalar::quad(QuadExt::new(Rational::zero(), Rational::one(), d2.clone())),
    }
}

fn rp(c: &(Rational, Rational)) -> Point {
    Point::rational(c.0.clone(), c.1.clone())
}

/// Points `c ± (2, 0)` and `c ± (0, 2)`.
fn axis_neighbours(c: &Point, out: &mut Vec<Point>) {
    let two = Scalar::from(2);
    let zero = Scalar::zero();
    out.push(c.translate(&two, &zero));
    out.push(c.translate(&two.neg(), &zero));
    out.push(c.translate(&zero, &two));
    out.push(c.translate(&zero, &two.neg()));
}

/// Points on the horizontal and vertical lines through `o` at distance exactly 2 from `c`.
fn line_tangents(o: &(Rational, Rational), c: &(Rational, Rational), out: &mut Vec<Point>) {
    let four = Rational::from(4);
    let dy = &o.1 - &c.1;
    let rest = &four - dy.square();
    if !rest.is_negative() {
        for s in [1, -1] {
            let x = Scalar::quad(QuadExt::new(c.0.clone(), Rational::from(s), rest.clone()));
            out.push(Point::new(x, Scalar::Rational(o.1.clone())));
        }
    }
    let dx = &o.0 - &c.0;
    let rest = &four - dx.square();
    if !rest.is_negative() {
        for s in [1, -1] {
            let y = Scalar::quad(QuadExt::new(c.1.clone(), Rational::from(s), rest.clone()));
            out.push(Point::new(Scalar::Rational(o.0.clone()), y));
        }
    }
}

struct Ctx<'a> {
    p: &'a Problem,
    near: Vec<Vec<usize>>,
    statics: Vec<Vec<Point>>,
    nodes: usize,
    cap: usize,
    deadline: &'a Deadline,
}

fn apart(a: &Point, b: &Point) -> bool {
    matches!(compare_to(&dist2(a, b), &Rational::from(4)), Comparison::Equal | Comparison::Greater)
}

impl Ctx<'_> {
    fn admissible(&self, i: usize, pt: &Point, placed: &[Point]) -> bool {
        let o = rp(&self.p.origins[i]);
        within_move(&o, pt, &self.p.d2, self.p.variant) == Ok(true)
            && self.near[i].iter().all(|&f| apart(pt, &rp(&self.p.fixed[f])))
            && placed.iter().all(|q| apart(pt, q))
    }

    /// Candidates for movable `i` created by already placed movables.
    fn dynamic(&self, i: usize, placed: &[Point]) -> Vec<Point> {
        let o = &self.p.origins[i];
        let four = Rational::from(4);
        let mut out = Vec::new();
        for (j, q) in placed.iter().enumerate() {
            axis_neighbours(q, &mut out);
            let Some((qx, qy)) = q.as_rational() else { continue };
            let qc = (qx.clone(), qy.clone());
            if self.p.variant == Variant::Rectilinear {
                line_tangents(o, &qc, &mut out);
                continue;
            }
            let mut anchors: Vec<((Rational, Rational), Rational)> =
                self.near[i].iter().map(|&f| (self.p.fixed[f].clone(), four.clone())).collect();
            anchors.push((o.clone(), self.p.d2.clone()));
            for r in &placed[..j] {
                if let Some((rx, ry)) = r.as_rational() {
                    anchors.push(((rx.clone(), ry.clone()), four.clone()));
                }
            }
            for (c, r2) in anchors {
                if let Ok(pts) = circle_circle_candidates((&qc.0, &qc.1), &four, (&c.0, &c.1), &r2) {
                    out.extend(pts);
                }
            }
        }
        out
    }

    fn dfs(&mut self, i: usize, placed: &mut Vec<Point>) -> bool {
        if i == self.p.origins.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.cap || (self.nodes.is_multiple_of(256) && self.deadline.expired()) {
            return false;
        }
        let mut cands = self.statics[i].clone();
        cands.extend(order(self.dynamic(i, placed), &self.p.origins[i]));
        let mut seen = HashSet::new();
        for c in cands {
            if !seen.insert(format!("{c:?}")) || !self.admissible(i, &c, placed) {
                continue;
            }
            placed.push(c);
            if self.dfs(i + 1, placed) {
                return true;
            }
            placed.pop();
            if self.nodes > self.cap {
                return false;
            }
        }
        false
    }
}

/// Origin first, then by approximate move length, ties broken by text form.
fn order(mut pts: Vec<Point>, o: &(Rational, Rational)) -> Vec<Point> {
    let (ox, oy) = (o.0.to_f64(), o.1.to_f64());
    let mut keyed: Vec<(f64, String, Point)> = pts
        .drain(..)
        .map(|p| {
            let (x, y) = p.to_f64();
            ((x - ox).powi(2) + (y - oy).powi(2), format!("{p:?}"), p)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    keyed.dedup_by(|a, b| a.1 == b.1);
    keyed.into_iter().map(|(_, _, p)| p).collect()
}

fn static_candidates(p: &Problem, i: usize, near: &[usize]) -> Vec<Point> {
    let o = &p.origins[i];
    let op = rp(o);
    let four = Rational::from(4);
    let d = d_scalar(&p.d2);
    let zero = Scalar::zero();
    let mut out = vec![op.clone()];
    out.push(op.translate(&d, &zero));
    out.push(op.translate(&d.neg(), &zero));
    out.push(op.translate(&zero, &d));
    out.push(op.translate(&zero, &d.neg()));
    for &f in near {
        axis_neighbours(&rp(&p.fixed[f]), &mut out);
    }
    match p.variant {
        Variant::Rectilinear => {
            for &f in near {
                line_tangents(o, &p.fixed[f], &mut out);
            }
        }
        Variant::Euclidean => {
            for (a, &f) in near.iter().enumerate() {
                let c = &p.fixed[f];
                if let Ok(pts) = circle_circle_candidates((&c.0, &c.1), &four, (&o.0, &o.1), &p.d2) {
                    out.extend(pts);
                }
                for &g in &near[a + 1..] {
                    let e = &p.fixed[g];
                    if let Ok(pts) = circle_circle_candidates((&c.0, &c.1), &four, (&e.0, &e.1), &four) {
                        out.extend(pts);
                    }
                }
            }
        }
    }
    let mut ordered = order(out, o);
    // keep the origin in front so unmoved disks are tried first
    if let Some(pos) = ordered.iter().position(|q| q == &op) {
        let origin = ordered.remove(pos);
        ordered.insert(0, origin);
    }
    ordered
}

/// Searches assignments built from tangency candidates; `None` when the node
/// cap or the deadline is hit or no assignment exists among the candidates.
pub(super) fn search(p: &Problem, cap: usize, deadline: &Deadline) -> Option<Vec<Point>> {
    let near = p.near_fixed(&Rational::zero());
    let statics = (0..p.origins.len())
        .map(|i| {
            let cands = static_candidates(p, i, &near[i]);
            cands
                .into_iter()
                .filter(|c| {
                    within_move(&rp(&p.origins[i]), c, &p.d2, p.variant) == Ok(true)
                        && near[i].iter().all(|&f| apart(c, &rp(&p.fixed[f])))
                })
                .collect()
        })
        .collect();
    let mut ctx = Ctx { p, near, statics, nodes: 0, cap, deadline };
    let mut placed = Vec::new();
    if ctx.dfs(0, &mut placed) && p.verify(&placed) {
        Some(placed)
    } else {
        None
    }
}
