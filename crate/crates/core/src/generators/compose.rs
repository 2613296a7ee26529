//! Disk Appending frames and their OR-composition into a single dispersal
//! instance.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::geometry::{is_packing, Disk, PackingViolation, Point, Variant};
use crate::instance_io::{AppendingInstance, Instance, LatticeBlock, Rect};
use crate::numerics::{sqrt_lower_upper, Rational};

use super::GenError;

const MIN_SIDE: u64 = 216;

fn check_side(a: u64, kappa: u64) -> Result<(), GenError> {
    if !a.is_multiple_of(2) || a < MIN_SIDE.max(10 * kappa) {
        return Err(GenError::Precondition(format!(
            "side must be even and at least max(10*kappa, {MIN_SIDE}); got a = {a}, kappa = {kappa}"
        )));
    }
    Ok(())
}

/// Border centres `(2i-1, 1)`, `(2i-1, a-1)`, `(1, 2i-1)`, `(a-1, 2i-1)`, each
/// corner listed once.
fn border(a: i64) -> Vec<(i64, i64)> {
    let half = a / 2;
    let mut out = Vec::with_capacity(2 * a as usize);
    out.extend((1..=half).map(|i| (2 * i - 1, 1)));
    out.extend((1..=half).map(|i| (2 * i - 1, a - 1)));
    out.extend((2..half).map(|i| (1, 2 * i - 1)));
    out.extend((2..half).map(|i| (a - 1, 2 * i - 1)));
    out
}

fn check_packing(disks: &[Disk]) -> Result<(), GenError> {
    match is_packing(disks) {
        Ok(()) => Ok(()),
        Err(PackingViolation::Overlap(i, j)) => Err(GenError::Overlap(i, j)),
        Err(PackingViolation::Indeterminate(i, j)) => {
            Err(GenError::Precondition(format!("separation of disks {i} and {j} is undecidable")))
        }
    }
}

/// Square `[0, a]^2` with the odd-coordinate border ring plus `interior`.
/// Interior disks come after the border in the packing.
pub fn gen_appending_frame(a: u64, kappa: u64, interior: &[Disk]) -> Result<AppendingInstance, GenError> {
    check_side(a, kappa)?;
    let lo = Rational::one();
    let hi = Rational::from(a as i64 - 1);
    for (i, d) in interior.iter().enumerate() {
        let Some((x, y)) = d.center.as_rational() else {
            return Err(GenError::Precondition(format!("interior disk {i} is not rational")));
        };
        if x < &lo || x > &hi || y < &lo || y > &hi {
            return Err(GenError::Precondition(format!("interior disk {i} lies outside [1, {hi}]^2")));
        }
    }
    let mut packing: Vec<Disk> = border(a as i64).into_iter().map(|(x, y)| Disk::at(x, y)).collect();
    packing.extend(interior.iter().cloned());
    check_packing(&packing)?;
    Ok(AppendingInstance { a, kappa, packing })
}

/// Squared distances behind the four separation claims, measured between disk
/// centres: `l1` from the stack to the farthest interesting disk, `l2` from the
/// stack to the nearest square, `l3` from an interesting disk to the farthest
/// centre of its own square, `l4` from an interesting disk to the nearest centre
/// of another square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub d: Rational,
    pub s: BigInt,
    pub h: BigInt,
    pub l1_sq: Rational,
    pub l2_sq: Rational,
    pub l3_sq: Rational,
    pub l4_sq: Rational,
    pub l1_ok: bool,
    pub l2_ok: bool,
    pub l3_ok: bool,
    pub l4_ok: bool,
}

impl SeparationReport {
    pub fn holds(&self) -> bool {
        self.l1_ok && self.l2_ok && self.l3_ok && self.l4_ok
    }

    pub fn comment_lines(&self) -> Vec<String> {
        let tick = |b: bool| if b { "ok" } else { "FAILED" };
        vec![
            format!("d: {}", self.d),
            format!("s: {}", self.s),
            format!("h: {}", self.h),
            format!("l1^2: {} <= d^2 {}", self.l1_sq, tick(self.l1_ok)),
            format!("l2^2: {} > d^2 {}", self.l2_sq, tick(self.l2_ok)),
            format!("l3^2: {} <= d^2 {}", self.l3_sq, tick(self.l3_ok)),
            format!("l4^2: {} > d^2 {}", self.l4_sq, tick(self.l4_ok)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub instance: Instance,
    pub report: SeparationReport,
    /// Indices of the co-located stack.
    pub stack: Vec<usize>,
    /// Interesting disk indices per gadget, left to right.
    pub interesting: Vec<Vec<usize>>,
    /// Lower-left corner of every square.
    pub squares: Vec<(BigInt, BigInt)>,
}

type Pt = (BigInt, BigInt);

fn sq_dist(p: &Pt, q: &Pt) -> BigInt {
    let dx = &p.0 - &q.0;
    let dy = &p.1 - &q.1;
    &dx * &dx + &dy * &dy
}

/// Squared distance from `p` to the nearest point of `[x0, x1] x [y0, y1]`.
fn rect_near(p: &Pt, x0: &BigInt, x1: &BigInt, y0: &BigInt, y1: &BigInt) -> BigInt {
    let clamp = |v: &BigInt, lo: &BigInt, hi: &BigInt| v.clone().max(lo.clone()).min(hi.clone());
    sq_dist(p, &(clamp(&p.0, x0, x1), clamp(&p.1, y0, y1)))
}

fn rect_far(p: &Pt, x0: &BigInt, x1: &BigInt, y0: &BigInt, y1: &BigInt) -> BigInt {
    [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
        .into_iter()
        .map(|(x, y)| sq_dist(p, &(x.clone(), y.clone())))
        .max()
        .unwrap_or_default()
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn odd_ceil(v: BigInt) -> BigInt {
    if &v % 2 == BigInt::from(0) {
        v + 1
    } else {
        v
    }
}

/// OR-composition of `t` appending instances sharing side `a` and `kappa`.
///
/// Squares sit on the x-axis with gap `s`; gadget `i` sits above square `i` with
/// its interesting row at height `h`; the stack of `kappa + 2` disks sits `d/2`
/// above the bottom edge of the middle gadget. Everything else inside the
/// enclosing rectangle is odd-coordinate lattice fill.
pub fn gen_crosscompose(parts: &[AppendingInstance]) -> Result<Composition, GenError> {
    let t = parts.len();
    if t.is_multiple_of(2) {
        return Err(GenError::Precondition(format!("number of instances must be odd, got {t}")));
    }
    let (a, kappa) = (parts[0].a, parts[0].kappa);
    if parts.iter().any(|p| p.a != a || p.kappa != kappa) {
        return Err(GenError::Precondition("instances must share side and kappa".into()));
    }
    check_side(a, kappa)?;
    let need: BTreeSet<(Rational, Rational)> =
        border(a as i64).into_iter().map(|(x, y)| (Rational::from(x), Rational::from(y))).collect();
    for (i, p) in parts.iter().enumerate() {
        let have: BTreeSet<(Rational, Rational)> =
            p.packing.iter().filter_map(|d| d.center.as_rational().map(|(x, y)| (x.clone(), y.clone()))).collect();
        if !need.is_subset(&have) {
            return Err(GenError::Precondition(format!("instance {i} lacks border disks")));
        }
        check_packing(&p.packing)?;
    }

    let (ai, ki) = (a as i64, kappa as i64);
    let ab = big(ai);
    let d = Rational::new(9 * (t as i64) * (t as i64), 4) * Rational::from(ai * ai);
    let d_int = d.floor();
    let d2 = d.square();
    let one = BigInt::one();
    let (h_lo, _) =
        sqrt_lower_upper(&(&d2 - Rational::from(ai * ai)), &one).map_err(|e| GenError::Claim(e.to_string()))?;
    let mut h = h_lo.floor();
    if &h % 2 == BigInt::from(0) {
        h -= 1;
    }

    // horizontal padding columns around the core
    let columns = (ai - 2 * ki - 6) / 2;
    let pl = columns / 2;
    let core_lo = 2 * pl + 4;
    let core_hi = 2 * pl + 2 * ki + 2;

    let (_, s_hi) =
        sqrt_lower_upper(&(Rational::from(2 * ai) * &d), &one).map_err(|e| GenError::Claim(e.to_string()))?;
    let mut s = s_hi.ceil();
    let reach = core_lo.min(ai - core_hi) + 1;
    let vert = &h - &ab + 1;
    let rest = (d2.clone() - Rational::from(&vert * &vert)).max(Rational::zero());
    let (_, rest_hi) = sqrt_lower_upper(&rest, &one).map_err(|e| GenError::Claim(e.to_string()))?;
    let s_req = rest_hi.floor() + 1 - reach;
    if s_req > s {
        s = s_req;
    }
    if &s % 2 != BigInt::from(0) {
        s += 1;
    }

    let pitch = &ab + &s;
    let xs: Vec<BigInt> = (0..t).map(|i| &pitch * big(i as i64)).collect();
    let mid = &xs[(t - 1) / 2];
    let cx = odd_ceil(mid + big(ai / 2));
    let cy = odd_ceil((Rational::from(&h - 3) + &d / Rational::from(2)).ceil());
    let c: Pt = (cx.clone(), cy.clone());

    let mut disks = Vec::new();
    let mut interesting = Vec::with_capacity(t);
    let mut holes = Vec::new();
    let to_r = |v: &BigInt| Rational::from(v.clone());
    for (i, part) in parts.iter().enumerate() {
        let x0 = &xs[i];
        for dk in &part.packing {
            let (px, py) = dk.center.as_rational().expect("checked rational");
            disks.push(Disk::new(Point::rational(px + to_r(x0), py.clone())));
        }
        holes.push(Rect::new(to_r(x0), Rational::zero(), to_r(&(x0 + &ab)), Rational::from(ai)));
        let at = |x: i64, y: &BigInt| Disk::new(Point::rational(to_r(&(x0 + big(x))), to_r(y)));
        let rows = [&h - 2, h.clone(), &h + 2];
        for col in 0..pl {
            for y in &rows {
                disks.push(at(1 + 2 * col, y));
            }
        }
        let core = 2 * pl;
        for u in 0..ki + 3 {
            disks.push(at(core + 1 + 2 * u, &rows[0]));
            disks.push(at(core + 1 + 2 * u, &rows[2]));
        }
        disks.push(at(core + 1, &h));
        disks.push(at(core + 2 * ki + 5, &h));
        for col in 0..columns - pl {
            for y in &rows {
                disks.push(at(core + 2 * ki + 7 + 2 * col, y));
            }
        }
        let first = disks.len();
        for u in 0..ki {
            disks.push(at(core + 4 + 2 * u, &h));
        }
        interesting.push((first..disks.len()).collect());
        holes.push(Rect::new(to_r(x0), Rational::from(&h - 3), to_r(&(x0 + &ab)), Rational::from(&h + 3)));
    }
    let first = disks.len();
    for _ in 0..kappa + 2 {
        disks.push(Disk::new(Point::rational(to_r(&cx), to_r(&cy))));
    }
    let stack = (first..disks.len()).collect();
    holes.push(Rect::new(to_r(&(&cx - 1)), to_r(&(&cy - 1)), to_r(&(&cx + 1)), to_r(&(&cy + 1))));
    let right = &xs[t - 1] + &ab;
    let fill = LatticeBlock::new(
        Rect::new(Rational::one(), Rational::one(), to_r(&(&right - 1)), to_r(&cy)),
        Rational::from(2),
        holes,
    );

    // claim distances over centres
    let d_sq = &d_int * &d_int;
    let row = |i: usize, off: i64| -> Pt { (&xs[i] + big(off), h.clone()) };
    let region = |j: usize| (&xs[j] + 1, &xs[j] + &ab - 1, one.clone(), &ab - 1);
    let mut l1 = BigInt::from(0);
    let mut l2: Option<BigInt> = None;
    let mut l3 = BigInt::from(0);
    let mut l4: Option<BigInt> = None;
    for i in 0..t {
        let ends = [row(i, core_lo), row(i, core_hi)];
        for p in &ends {
            l1 = l1.max(sq_dist(&c, p));
            let (x0, x1, y0, y1) = region(i);
            l3 = l3.max(rect_far(p, &x0, &x1, &y0, &y1));
        }
        let (x0, x1, y0, y1) = region(i);
        let v = rect_near(&c, &x0, &x1, &y0, &y1);
        l2 = Some(l2.map_or(v.clone(), |w| w.min(v)));
        for j in (0..t).filter(|&j| j != i) {
            let (x0, x1, y0, y1) = region(j);
            for p in &ends {
                let v = rect_near(p, &x0, &x1, &y0, &y1);
                l4 = Some(l4.map_or(v.clone(), |w| w.min(v)));
            }
        }
    }
    // a single square has no neighbour; report the gap to a hypothetical one
    let l4 = l4.unwrap_or_else(|| {
        let g = &s + reach;
        &g * &g + &vert * &vert
    });
    let l2 = l2.unwrap_or_default();
    debug_assert!(d.is_integer());
    let report = SeparationReport {
        d: d.clone(),
        s: s.clone(),
        h: h.clone(),
        l1_ok: l1 <= d_sq,
        l2_ok: l2 > d_sq,
        l3_ok: l3 <= d_sq,
        l4_ok: l4 > d_sq,
        l1_sq: Rational::from(l1),
        l2_sq: Rational::from(l2),
        l3_sq: Rational::from(l3),
        l4_sq: Rational::from(l4),
    };
    if !report.holds() {
        return Err(GenError::Claim(report.comment_lines().join("; ")));
    }
    let mut instance = Instance::new(Variant::Euclidean, 2 * kappa + 1, d2, disks);
    instance.blocks.push(fill);
    let squares = xs.into_iter().map(|x| (x, BigInt::from(0))).collect();
    Ok(Composition { instance, report, stack, interesting, squares })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::{validate_witness, Mode, RejectReason, Verdict, Witness};

    #[test]
    fn frame_border() {
        let f = gen_appending_frame(216, 1, &[]).unwrap();
        assert_eq!(f.packing.len(), 428);
        assert!(matches!(gen_appending_frame(216, 1, &[Disk::at(1, 1)]), Err(GenError::Overlap(_, _))));
        assert!(gen_appending_frame(216, 0, &[Disk::at(100, 100)]).is_ok());
        assert!(gen_appending_frame(214, 0, &[]).is_err());
        assert!(gen_appending_frame(216, 22, &[]).is_err());
    }

    #[test]
    fn compose_three() {
        let frame = gen_appending_frame(216, 2, &[Disk::at(50, 50)]).unwrap();
        let comp = gen_crosscompose(&[frame.clone(), frame.clone(), frame]).unwrap();
        assert_eq!(comp.report.d, Rational::from(944_784));
        assert!(comp.report.holds());
        assert_eq!(comp.instance.k, 5);
        assert_eq!(comp.stack.len(), 4);
        let inst = &comp.instance;
        let centre = &inst.disks[comp.stack[0]].center;
        assert!(comp.stack.iter().all(|&i| &inst.disks[i].center == centre));

        // empty the middle square's gadget into its square, then drain the stack
        let g = 1;
        let x0 = &comp.squares[g].0;
        let mut moves = std::collections::BTreeMap::new();
        for (u, &i) in comp.interesting[g].iter().enumerate() {
            let x = Rational::from(x0 + BigInt::from(5 + 4 * u as i64));
            moves.insert(i, Point::rational(x, Rational::from(5)));
        }
        let y = inst.disks[comp.interesting[g][0]].center.y.clone();
        let (left, _) = inst.disks[comp.interesting[g][0]].center.as_rational().unwrap();
        for (u, &i) in comp.stack.iter().skip(1).enumerate() {
            let x = left - Rational::from(1) + Rational::from(2 * u as i64);
            moves.insert(i, Point::new(x.into(), y.clone()));
        }
        let w = Witness { moves };
        assert_eq!(validate_witness(inst, &w, &Mode::Exact), Ok(Verdict::Accept));
        assert!(matches!(
            validate_witness(inst, &Witness::empty(), &Mode::Exact),
            Ok(Verdict::Reject(RejectReason::Packing(_, _)))
        ));
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = gen_appending_frame(216, 1, &[]).unwrap();
        let b = gen_appending_frame(218, 1, &[]).unwrap();
        assert!(gen_crosscompose(&[a.clone(), b, a.clone()]).is_err());
        assert!(gen_crosscompose(&[a.clone(), a]).is_err());
    }
}
