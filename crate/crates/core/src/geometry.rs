//! Points, unit disks and the distance predicates built on them.
//!
//! Disks are open with radius 1, so two disks overlap iff their centres are
//! strictly closer than 2. Move budgets are closed: a move of length exactly `d`
//! is allowed. Distances are always handled squared.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::numerics::{compare, Comparison, QuadExt, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Variant {
    #[default]
    Euclidean,
    Rectilinear,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Euclidean => "euclidean",
            Variant::Rectilinear => "rectilinear",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Variant::Euclidean),
            "rectilinear" => Ok(Variant::Rectilinear),
            other => Err(format!("unknown variant `{other}`")),
        }
    }
}

/// A comparison that interval arithmetic could not settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("comparison could not be resolved at the precision cap")]
pub struct Indeterminate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("circles share a centre")]
    CoincidentCentres,
    #[error("irrational input where a rational one is required")]
    NotRational,
}

/// First offending pair found by [`is_packing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PackingViolation {
    #[error("disks {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("overlap of disks {0} and {1} could not be decided")]
    Indeterminate(usize, usize),
}

impl PackingViolation {
    pub fn pair(&self) -> (usize, usize) {
        match *self {
            PackingViolation::Overlap(i, j) | PackingViolation::Indeterminate(i, j) => (i, j),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Point { x, y }
    }

    pub fn rational(x: Rational, y: Rational) -> Self {
        Point { x: Scalar::Rational(x), y: Scalar::Rational(y) }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::rational(Rational::from(x), Rational::from(y))
    }

    pub fn origin() -> Self {
        Point::int(0, 0)
    }

    pub fn as_rational(&self) -> Option<(&Rational, &Rational)> {
        Some((self.x.as_rational()?, self.y.as_rational()?))
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact() && self.y.is_exact()
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> Point {
        Point { x: self.x.add(dx), y: self.y.add(dy) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.x, self.y)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Open unit disk.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Disk {
    pub center: Point,
}

impl Disk {
    pub fn new(center: Point) -> Self {
        Disk { center }
    }

    pub fn at(x: i64, y: i64) -> Self {
        Disk::new(Point::int(x, y))
    }
}

impl From<Point> for Disk {
    fn from(center: Point) -> Self {
        Disk { center }
    }
}

pub fn dist2(a: &Point, b: &Point) -> Scalar {
    if let (Some((ax, ay)), Some((bx, by))) = (a.as_rational(), b.as_rational()) {
        let dx = ax - bx;
        let dy = ay - by;
        return Scalar::Rational(dx.square() + dy.square());
    }
    let dx = a.x.sub(&b.x);
    let dy = a.y.sub(&b.y);
    dx.square().add(&dy.square())
}

/// Compares a scalar against a rational threshold.
pub fn compare_to(s: &Scalar, r: &Rational) -> Comparison {
    match s {
        Scalar::Rational(v) => Comparison::from_ordering(v.cmp(r)),
        _ => compare(s, &Scalar::Rational(r.clone())),
    }
}

fn four() -> Rational {
    Rational::from(4)
}

/// True iff the centres are strictly closer than 2.
pub fn overlap(a: &Disk, b: &Disk) -> Result<bool, Indeterminate> {
    match compare_to(&dist2(&a.center, &b.center), &four()) {
        Comparison::Less => Ok(true),
        Comparison::Equal | Comparison::Greater => Ok(false),
        Comparison::Indeterminate => Err(Indeterminate),
    }
}

/// Checks pairwise separation, reporting the lexicographically first bad pair.
pub fn is_packing(disks: &[Disk]) -> Result<(), PackingViolation> {
    let centres: Vec<&Point> = disks.iter().map(|d| &d.center).collect();
    first_conflict(&centres, &four()).map_or(Ok(()), Err)
}

/// True iff `dist2(a, b) < sep2`.
pub fn closer_than(a: &Point, b: &Point, sep2: &Rational) -> Result<bool, Indeterminate> {
    match compare_to(&dist2(a, b), sep2) {
        Comparison::Less => Ok(true),
        Comparison::Equal | Comparison::Greater => Ok(false),
        Comparison::Indeterminate => Err(Indeterminate),
    }
}

/// Lexicographically first pair with squared centre distance below `sep2`.
pub fn first_conflict(centres: &[&Point], sep2: &Rational) -> Option<PackingViolation> {
    let test = |i: usize, j: usize| match closer_than(centres[i], centres[j], sep2) {
        Ok(false) => None,
        Ok(true) => Some(PackingViolation::Overlap(i, j)),
        Err(Indeterminate) => Some(PackingViolation::Indeterminate(i, j)),
    };
    if centres.len() <= 64 {
        return (0..centres.len())
            .flat_map(|i| (i + 1..centres.len()).map(move |j| (i, j)))
            .find_map(|(i, j)| test(i, j));
    }
    let reach = sep2.to_f64().max(0.0).sqrt();
    let approx: Vec<(f64, f64)> = centres.iter().map(|p| p.to_f64()).collect();
    let cutoff = reach * (1.0 + 1e-9) + 1e-9;
    near_pairs(centres.iter().copied(), reach)
        .into_iter()
        .filter(|&(i, j)| {
            let (dx, dy) = (approx[i].0 - approx[j].0, approx[i].1 - approx[j].1);
            (dx * dx + dy * dy).sqrt() <= cutoff
        })
        .find_map(|(i, j)| test(i, j))
}

/// All index pairs `i < j` whose centres may lie closer than `reach`, found by
/// bucketing approximate coordinates. Every pair that is truly within `reach`
/// is included; extra pairs may appear. Output is sorted.
pub fn near_pairs<'a>(points: impl Iterator<Item = &'a Point>, reach: f64) -> Vec<(usize, usize)> {
    let cell = reach.max(1e-9);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut keys = Vec::new();
    for (i, p) in points.enumerate() {
        let (x, y) = p.to_f64();
        let key = ((x / cell).floor() as i64, (y / cell).floor() as i64);
        buckets.entry(key).or_default().push(i);
        keys.push(key);
    }
    let mut pairs = Vec::new();
    for (i, &(kx, ky)) in keys.iter().enumerate() {
        for dx in -2..=2 {
            for dy in -2..=2 {
                if let Some(members) = buckets.get(&(kx + dx, ky + dy)) {
                    pairs.extend(members.iter().filter(|&&j| j > i).map(|&j| (i, j)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Closed move-budget test.
pub fn within_move(origin: &Point, target: &Point, d2: &Rational, variant: Variant) -> Result<bool, Indeterminate> {
    let le = |c: Comparison| match c {
        Comparison::Less | Comparison::Equal => Ok(true),
        Comparison::Greater => Ok(false),
        Comparison::Indeterminate => Err(Indeterminate),
    };
    match variant {
        Variant::Euclidean => le(compare_to(&dist2(origin, target), d2)),
        Variant::Rectilinear => {
            let same_x = compare(&origin.x, &target.x);
            let same_y = compare(&origin.y, &target.y);
            if same_x == Comparison::Equal {
                let dy = origin.y.sub(&target.y);
                if le(compare_to(&dy.square(), d2))? {
                    return Ok(true);
                }
            }
            if same_y == Comparison::Equal {
                let dx = origin.x.sub(&target.x);
                if le(compare_to(&dx.square(), d2))? {
                    return Ok(true);
                }
            }
            if same_x == Comparison::Indeterminate || same_y == Comparison::Indeterminate {
                return Err(Indeterminate);
            }
            Ok(false)
        }
    }
}

/// Intersection points of the circle of squared radius `r1sq` around `c1` with
/// the circle of squared radius `r2sq` around `c2`. Both coordinates of each
/// point share one radicand.
pub fn circle_circle_candidates(
    c1: (&Rational, &Rational),
    r1sq: &Rational,
    c2: (&Rational, &Rational),
    r2sq: &Rational,
) -> Result<Vec<Point>, GeometryError> {
    let dx = c2.0 - c1.0;
    let dy = c2.1 - c1.1;
    let dd = dx.square() + dy.square();
    if dd.is_zero() {
        return Err(GeometryError::CoincidentCentres);
    }
    let a = (r1sq - r2sq + &dd) / (Rational::from(2) * &dd);
    let px = c1.0 + &a * &dx;
    let py = c1.1 + &a * &dy;
    let h2 = r1sq - a.square() * &dd;
    if h2.is_negative() {
        return Ok(Vec::new());
    }
    if h2.is_zero() {
        return Ok(vec![Point::rational(px, py)]);
    }
    let t = &h2 / &dd;
    let mk = |sx: &Rational, sy: &Rational| {
        Point::new(
            Scalar::quad(QuadExt::new(px.clone(), sx.clone(), t.clone())),
            Scalar::quad(QuadExt::new(py.clone(), sy.clone(), t.clone())),
        )
    };
    Ok(vec![mk(&-&dy, &dx), mk(&dy, &-&dx)])
}

/// Convenience wrapper over [`circle_circle_candidates`] for rational points.
pub fn circle_candidates_at(
    c1: &Point,
    r1sq: &Rational,
    c2: &Point,
    r2sq: &Rational,
) -> Result<Vec<Point>, GeometryError> {
    let a = c1.as_rational().ok_or(GeometryError::NotRational)?;
    let b = c2.as_rational().ok_or(GeometryError::NotRational)?;
    circle_circle_candidates(a, r1sq, b, r2sq)
}
