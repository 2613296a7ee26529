//! Brute-force reference decision for tiny instances: every subset of at most
//! `k` disks, every grid displacement of spacing `delta`. It shares no search
//! code with the solver.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::geometry::{Point, Variant};
use crate::instance_io::{Instance, Witness};
use crate::numerics::Rational;

use super::Answer;

pub const ORACLE_MAX_DISKS: usize = 12;
pub const ORACLE_MAX_K: u64 = 3;
const NODE_CAP: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle is limited to {ORACLE_MAX_DISKS} disks and k <= {ORACLE_MAX_K}; got {0} disks and k = {1}")]
    Guard(usize, u64),
    #[error("oracle needs rational centres")]
    NotRational,
    #[error("oracle needs delta > 0")]
    BadDelta,
}

struct Frame {
    /// Integer centres, scaled by `scale`.
    pts: Vec<(i64, i64)>,
    scale: BigInt,
    step: i64,
    /// Squared move bound, exact, as `num / den` in scaled units.
    mv_num: BigInt,
    mv_den: BigInt,
    /// Relaxed squared move bound (integer upper bound).
    mv_relaxed: i64,
    sep: i64,
    sep_fixed_relaxed: i64,
    sep_pair_relaxed: i64,
    reach: i64,
    variant: Variant,
}

fn sq(a: (i64, i64), b: (i64, i64)) -> i64 {
    let (x, y) = (a.0 - b.0, a.1 - b.1);
    x * x + y * y
}

fn build_frame(inst: &Instance, delta: &Rational) -> Option<Frame> {
    let mut scale = delta.denom().clone();
    let mut coords = Vec::new();
    for d in &inst.disks {
        let (x, y) = d.center.as_rational()?;
        scale = scale.lcm(x.denom()).lcm(y.denom());
        coords.push((x.clone(), y.clone()));
    }
    let sr = Rational::from_integer(scale.clone());
    let to_i = |v: &Rational| i64::try_from((v * &sr).floor()).ok();
    let pts = coords.iter().map(|(x, y)| Some((to_i(x)?, to_i(y)?))).collect::<Option<Vec<_>>>()?;
    let step = to_i(delta)?;
    // slack per moved endpoint: 3/2 * delta exceeds delta * sqrt(2)
    let e = delta * Rational::new(3, 2);
    let two = Rational::from(2);
    let floor_sq = |v: Rational| -> Option<i64> {
        if v.is_positive() {
            let f = i64::try_from((v * &sr).floor()).ok()?;
            f.checked_mul(f)
        } else {
            Some(0)
        }
    };
    let d2s = &inst.d2 * &sr * &sr;
    // (d + e)^2 <= d2 + 2 e sqrt(d2) + e^2 <= d2 + 2 e (d2 + 1)/2 + e^2
    let mv_relaxed_r = &inst.d2 + &e * (&inst.d2 + Rational::one()) + e.square();
    let mv_relaxed = i64::try_from((mv_relaxed_r * &sr * &sr).ceil()).ok()?;
    let reach = (mv_relaxed as f64).sqrt().ceil() as i64 + 1;
    Some(Frame {
        pts,
        step,
        mv_num: d2s.numer().clone(),
        mv_den: d2s.denom().clone(),
        mv_relaxed,
        sep: to_i(&two)?.checked_mul(to_i(&two)?)?,
        sep_fixed_relaxed: floor_sq(&two - &e)?,
        sep_pair_relaxed: floor_sq(&two - &e * &two)?,
        reach,
        variant: inst.variant,
        scale,
    })
}

impl Frame {
    fn move_exact(&self, o: (i64, i64), p: (i64, i64)) -> bool {
        if self.variant == Variant::Rectilinear && o.0 != p.0 && o.1 != p.1 {
            return false;
        }
        BigInt::from(sq(o, p)) * &self.mv_den <= self.mv_num
    }

    fn offsets(&self, o: (i64, i64)) -> Vec<(i64, i64)> {
        let r = self.reach / self.step.max(1);
        let mut out = Vec::new();
        for i in -r..=r {
            for j in -r..=r {
                if self.variant == Variant::Rectilinear && i != 0 && j != 0 {
                    continue;
                }
                let p = (o.0 + i * self.step, o.1 + j * self.step);
                if sq(o, p) <= self.mv_relaxed {
                    out.push(p);
                }
            }
        }
        out
    }
}

enum Found {
    Exact(Vec<(i64, i64)>),
    Relaxed,
    Nothing,
    Cap,
}

fn explore(
    f: &Frame,
    subset: &[usize],
    fixed: &[(i64, i64)],
    doms: &[Vec<(i64, i64)>],
    placed: &mut Vec<(i64, i64)>,
    nodes: &mut u64,
    relaxed_seen: &mut bool,
) -> Found {
    let depth = placed.len();
    if depth == subset.len() {
        let exact = placed.iter().enumerate().all(|(a, &p)| {
            f.move_exact(f.pts[subset[a]], p)
                && fixed.iter().all(|&q| sq(p, q) >= f.sep)
                && placed[..a].iter().all(|&q| sq(p, q) >= f.sep)
        });
        if exact {
            return Found::Exact(placed.clone());
        }
        *relaxed_seen = true;
        return Found::Relaxed;
    }
    for &p in &doms[depth] {
        *nodes += 1;
        if *nodes > NODE_CAP {
            return Found::Cap;
        }
        if placed.iter().any(|&q| sq(p, q) < f.sep_pair_relaxed) {
            continue;
        }
        placed.push(p);
        match explore(f, subset, fixed, doms, placed, nodes, relaxed_seen) {
            Found::Exact(v) => return Found::Exact(v),
            Found::Cap => return Found::Cap,
            Found::Relaxed | Found::Nothing => {}
        }
        placed.pop();
    }
    Found::Nothing
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for s in &level {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for v in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(v);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Exhaustive grid decision. Yes needs an exact grid solution; No needs every
/// subset to have no grid assignment even with the rounding slack.
pub fn oracle(inst: &Instance, delta: &Rational) -> Result<Answer, OracleError> {
    if !delta.is_positive() {
        return Err(OracleError::BadDelta);
    }
    let inst = if inst.blocks.is_empty() {
        inst.clone()
    } else {
        inst.expand_blocks(ORACLE_MAX_DISKS * 4).ok_or(OracleError::Guard(usize::MAX, inst.k))?
    };
    if inst.disks.len() > ORACLE_MAX_DISKS || inst.k > ORACLE_MAX_K {
        return Err(OracleError::Guard(inst.disks.len(), inst.k));
    }
    let f = build_frame(&inst, delta).ok_or(OracleError::NotRational)?;
    let n = f.pts.len();
    let mut nodes = 0u64;
    let mut relaxed_seen = false;
    for subset in subsets(n, (inst.k as usize).min(n)) {
        let fixed: Vec<(i64, i64)> = (0..n).filter(|i| !subset.contains(i)).map(|i| f.pts[i]).collect();
        if (0..fixed.len()).any(|a| (0..a).any(|b| sq(fixed[a], fixed[b]) < f.sep)) {
            continue;
        }
        let doms: Vec<Vec<(i64, i64)>> = subset
            .iter()
            .map(|&i| {
                f.offsets(f.pts[i])
                    .into_iter()
                    .filter(|&p| fixed.iter().all(|&q| sq(p, q) >= f.sep_fixed_relaxed))
                    .collect()
            })
            .collect();
        if doms.iter().any(Vec::is_empty) {
            continue;
        }
        match explore(&f, &subset, &fixed, &doms, &mut Vec::new(), &mut nodes, &mut relaxed_seen) {
            Found::Exact(pos) => {
                let sr = Rational::from_integer(f.scale.clone());
                let mut moves = BTreeMap::new();
                for (&i, &(x, y)) in subset.iter().zip(&pos) {
                    if (x, y) != f.pts[i] {
                        moves.insert(i, Point::rational(Rational::from(x) / &sr, Rational::from(y) / &sr));
                    }
                }
                return Ok(Answer::Yes(Witness { moves }));
            }
            Found::Cap => return Ok(Answer::Unknown("oracle node cap reached".into())),
            Found::Relaxed | Found::Nothing => {}
        }
    }
    if relaxed_seen {
        Ok(Answer::Unknown(format!("only relaxed grid solutions at delta {delta}")))
    } else {
        Ok(Answer::No(vec![format!("no relaxed grid solution at delta {delta}")]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::{validate_witness, Mode, Verdict};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn triple(d2: &str) -> Instance {
        Instance::from_ints(Variant::Euclidean, 1, q(d2), &[(0, 0), (1, 0), (2, 0)])
    }

    #[test]
    fn oracle_examples() {
        assert!(matches!(oracle(&triple("1"), &q("1/16")).unwrap(), Answer::No(_)));
        let two = Instance { k: 2, ..triple("1") };
        let Answer::Yes(w) = oracle(&two, &q("1/16")).unwrap() else { panic!() };
        assert_eq!(w.moves.get(&0), Some(&Point::int(-1, 0)));
        assert_eq!(w.moves.get(&2), Some(&Point::int(3, 0)));
        assert_eq!(validate_witness(&two, &w, &Mode::Exact), Ok(Verdict::Accept));
        assert!(matches!(oracle(&triple("1/4"), &q("1/16")).unwrap(), Answer::No(_)));
        let packing = Instance::from_ints(Variant::Euclidean, 0, q("1"), &[(0, 0), (2, 0)]);
        assert_eq!(oracle(&packing, &q("1/4")).unwrap(), Answer::Yes(Witness::empty()));
    }

    #[test]
    fn guard() {
        let big = Instance::from_ints(Variant::Euclidean, 1, q("1"), &[(0, 0); 13]);
        assert!(matches!(oracle(&big, &q("1/4")), Err(OracleError::Guard(13, 1))));
    }
}
