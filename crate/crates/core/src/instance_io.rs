//! Instances, witnesses, their text formats, and witness validation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{
    compare_to, dist2, first_conflict, within_move, Disk, Indeterminate, PackingViolation, Point, Variant,
};
use crate::numerics::{Comparison, Rational, Scalar};

pub const INSTANCE_HEADER: &str = "DISKDISPERSAL v1";
pub const WITNESS_HEADER: &str = "DISPERSALMOVES v1";
pub const APPENDING_HEADER: &str = "DISKAPPENDING v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x0: Rational,
    pub y0: Rational,
    pub x1: Rational,
    pub y1: Rational,
}

impl Rect {
    pub fn new(x0: Rational, y0: Rational, x1: Rational, y1: Rational) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn int(x0: i64, y0: i64, x1: i64, y1: i64) -> Self {
        Rect::new(x0.into(), y0.into(), x1.into(), y1.into())
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        &self.x0 <= x && x <= &self.x1 && &self.y0 <= y && y <= &self.y1
    }
}

/// Implicit fill: disks at `(x0 + i*step, y0 + j*step)` inside the rectangle
/// and outside every hole. Block disks never move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBlock {
    pub bounds: Rect,
    pub step: Rational,
    pub holes: Vec<Rect>,
}

impl LatticeBlock {
    pub fn new(bounds: Rect, step: Rational, holes: Vec<Rect>) -> Self {
        assert!(step.is_positive(), "lattice step must be positive");
        LatticeBlock { bounds, step, holes }
    }

    fn columns(&self) -> num_bigint::BigInt {
        ((&self.bounds.x1 - &self.bounds.x0) / &self.step).floor() + 1
    }

    fn rows(&self) -> num_bigint::BigInt {
        ((&self.bounds.y1 - &self.bounds.y0) / &self.step).floor() + 1
    }

    /// Number of grid points in the rectangle, ignoring holes.
    pub fn grid_size(&self) -> num_bigint::BigInt {
        self.columns() * self.rows()
    }

    pub fn in_hole(&self, x: &Rational, y: &Rational) -> bool {
        self.holes.iter().any(|h| h.contains(x, y))
    }

    /// Explicit disks of the block, in row-major order. `None` when the grid has
    /// more than `cap` points.
    pub fn materialize(&self, cap: usize) -> Option<Vec<Disk>> {
        if self.grid_size() > num_bigint::BigInt::from(cap) {
            return None;
        }
        let cols: i64 = self.columns().try_into().ok()?;
        let rows: i64 = self.rows().try_into().ok()?;
        let mut out = Vec::new();
        for j in 0..rows {
            let y = &self.bounds.y0 + &self.step * Rational::from(j);
            for i in 0..cols {
                let x = &self.bounds.x0 + &self.step * Rational::from(i);
                if !self.in_hole(&x, &y) {
                    out.push(Disk::new(Point::rational(x, y.clone())));
                }
            }
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub variant: Variant,
    pub k: u64,
    pub d2: Rational,
    pub disks: Vec<Disk>,
    pub blocks: Vec<LatticeBlock>,
}

impl Instance {
    pub fn new(variant: Variant, k: u64, d2: Rational, disks: Vec<Disk>) -> Self {
        Instance { variant, k, d2, disks, blocks: Vec::new() }
    }

    pub fn from_ints(variant: Variant, k: u64, d2: Rational, centres: &[(i64, i64)]) -> Self {
        Instance::new(variant, k, d2, centres.iter().map(|&(x, y)| Disk::at(x, y)).collect())
    }

    pub fn is_rational(&self) -> bool {
        self.disks.iter().all(|d| d.center.as_rational().is_some())
    }

    /// Copy with every block turned into explicit disks appended after the
    /// original ones. `None` when a block exceeds `cap` grid points.
    pub fn expand_blocks(&self, cap: usize) -> Option<Instance> {
        let mut disks = self.disks.clone();
        for b in &self.blocks {
            disks.extend(b.materialize(cap)?);
        }
        Some(Instance { disks, blocks: Vec::new(), ..self.clone() })
    }

    /// Copy with the witness moves applied.
    pub fn apply(&self, w: &Witness) -> Instance {
        let mut out = self.clone();
        for (&i, p) in &w.moves {
            if let Some(d) = out.disks.get_mut(i) {
                d.center = p.clone();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub moves: BTreeMap<usize, Point>,
}

impl Witness {
    pub fn empty() -> Self {
        Witness::default()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.moves.values().all(Point::is_exact)
    }
}

impl FromIterator<(usize, Point)> for Witness {
    fn from_iter<T: IntoIterator<Item = (usize, Point)>>(iter: T) -> Self {
        Witness { moves: iter.into_iter().collect() }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), last: 0 }
    }

    /// Next non-blank line with comments stripped, as `(line number, content)`.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                self.last = i + 1;
                return Some((i + 1, body));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        let last = self.last;
        self.next()
            .ok_or_else(|| ParseError { line: last + 1, message: format!("unexpected end of input, expected {what}") })
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str), ParseError> {
        let (line, body) = self.expect(key)?;
        let value = body
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| err(line, format!("expected `{key}: ...`")))?;
        Ok((line, value.trim()))
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.next() {
            None => Ok(()),
            Some((line, _)) => Err(err(line, "trailing content")),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

fn parse_count(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse::<usize>().map_err(|_| err(line, format!("expected a non-negative count, found `{s}`")))
}

fn parse_rational(line: usize, s: &str) -> Result<Rational, ParseError> {
    s.parse::<Rational>().map_err(|e| err(line, e.to_string()))
}

fn parse_scalar(line: usize, s: &str) -> Result<Scalar, ParseError> {
    s.parse::<Scalar>().map_err(|e| err(line, e.to_string()))
}

fn parse_point_tokens(line: usize, toks: &[&str]) -> Result<Point, ParseError> {
    match toks {
        [x, y] => Ok(Point::new(parse_scalar(line, x)?, parse_scalar(line, y)?)),
        _ => Err(err(line, "expected two coordinates")),
    }
}

fn parse_rect(line: usize, toks: &[&str]) -> Result<Rect, ParseError> {
    match toks {
        [a, b, c, d] => {
            let r = Rect::new(
                parse_rational(line, a)?,
                parse_rational(line, b)?,
                parse_rational(line, c)?,
                parse_rational(line, d)?,
            );
            if r.x0 > r.x1 || r.y0 > r.y1 {
                return Err(err(line, "rectangle corners out of order"));
            }
            Ok(r)
        }
        _ => Err(err(line, "expected four rectangle bounds")),
    }
}

fn parse_header(lines: &mut Lines, header: &str) -> Result<(), ParseError> {
    let (line, body) = lines.expect(header)?;
    if body.split_whitespace().collect::<Vec<_>>() != header.split_whitespace().collect::<Vec<_>>() {
        return Err(err(line, format!("expected header `{header}`")));
    }
    Ok(())
}

fn parse_disk_list(lines: &mut Lines, n: usize) -> Result<Vec<Disk>, ParseError> {
    (0..n)
        .map(|_| {
            let (line, body) = lines.expect("disk coordinates")?;
            let toks: Vec<&str> = body.split_whitespace().collect();
            parse_point_tokens(line, &toks).map(Disk::new)
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = Lines::new(text);
    parse_header(&mut lines, INSTANCE_HEADER)?;
    let (line, v) = lines.field("variant")?;
    let variant: Variant = v.parse().map_err(|e: String| err(line, e))?;
    let (line, v) = lines.field("k")?;
    let k = v.parse::<i64>().map_err(|_| err(line, format!("bad budget `{v}`")))?;
    if k < 0 {
        return Err(err(line, "budget k must be non-negative"));
    }
    let (line, v) = lines.field("d2")?;
    let d2 = parse_rational(line, v)?;
    if d2.is_negative() {
        return Err(err(line, "d2 must be non-negative"));
    }
    let (line, v) = lines.field("disks")?;
    let n = parse_count(line, v)?;
    let disks = parse_disk_list(&mut lines, n)?;
    let mut blocks = Vec::new();
    if let Some((line, body)) = lines.next() {
        let v = body.strip_prefix("blocks:").ok_or_else(|| err(line, "expected `blocks: ...`"))?.trim();
        for _ in 0..parse_count(line, v)? {
            let (line, body) = lines.expect("lattice block")?;
            let toks: Vec<&str> = body.split_whitespace().collect();
            let (bounds, step, h) = match toks.as_slice() {
                [a, b, c, d, "step", s, "holes", h] => {
                    (parse_rect(line, &[a, b, c, d])?, parse_rational(line, s)?, parse_count(line, h)?)
                }
                _ => return Err(err(line, "expected `x0 y0 x1 y1 step s holes h`")),
            };
            if !step.is_positive() {
                return Err(err(line, "lattice step must be positive"));
            }
            let holes = (0..h)
                .map(|_| {
                    let (line, body) = lines.expect("hole rectangle")?;
                    parse_rect(line, &body.split_whitespace().collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>, _>>()?;
            blocks.push(LatticeBlock::new(bounds, step, holes));
        }
        lines.finish()?;
    }
    Ok(Instance { variant, k: k as u64, d2, disks, blocks })
}

pub fn write_instance(inst: &Instance) -> String {
    write_instance_with_comments(inst, &[])
}

/// Canonical text, preceded by `# `-prefixed comment lines.
pub fn write_instance_with_comments(inst: &Instance, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{INSTANCE_HEADER}");
    let _ = writeln!(out, "variant: {}", inst.variant);
    let _ = writeln!(out, "k: {}", inst.k);
    let _ = writeln!(out, "d2: {}", inst.d2);
    let _ = writeln!(out, "disks: {}", inst.disks.len());
    for d in &inst.disks {
        let _ = writeln!(out, "{}", d.center);
    }
    let _ = writeln!(out, "blocks: {}", inst.blocks.len());
    for b in &inst.blocks {
        let r = &b.bounds;
        let _ = writeln!(out, "{} {} {} {} step {} holes {}", r.x0, r.y0, r.x1, r.y1, b.step, b.holes.len());
        for h in &b.holes {
            let _ = writeln!(out, "{} {} {} {}", h.x0, h.y0, h.x1, h.y1);
        }
    }
    out
}

pub fn parse_witness(text: &str) -> Result<Witness, ParseError> {
    let mut lines = Lines::new(text);
    parse_header(&mut lines, WITNESS_HEADER)?;
    let (line, v) = lines.field("moves")?;
    let n = parse_count(line, v)?;
    let mut moves = BTreeMap::new();
    for _ in 0..n {
        let (line, body) = lines.expect("move")?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        let (idx, target) = match toks.as_slice() {
            [i, "->", x, y] => (parse_count(line, i)?, parse_point_tokens(line, &[x, y])?),
            _ => return Err(err(line, "expected `i -> x y`")),
        };
        if moves.insert(idx, target).is_some() {
            return Err(err(line, format!("duplicate move for disk {idx}")));
        }
    }
    lines.finish()?;
    Ok(Witness { moves })
}

pub fn write_witness(w: &Witness) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{WITNESS_HEADER}");
    let _ = writeln!(out, "moves: {}", w.moves.len());
    for (i, p) in &w.moves {
        let _ = writeln!(out, "{i} -> {p}");
    }
    out
}

/// Disk Appending instance: a packing inside the square `[0, a]^2` to which
/// `kappa` further disks are to be added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendingInstance {
    pub a: u64,
    pub kappa: u64,
    pub packing: Vec<Disk>,
}

pub fn parse_appending(text: &str) -> Result<AppendingInstance, ParseError> {
    let mut lines = Lines::new(text);
    parse_header(&mut lines, APPENDING_HEADER)?;
    let (line, v) = lines.field("a")?;
    let a = parse_count(line, v)? as u64;
    let (line, v) = lines.field("kappa")?;
    let kappa = parse_count(line, v)? as u64;
    let (line, v) = lines.field("disks")?;
    let n = parse_count(line, v)?;
    let packing = parse_disk_list(&mut lines, n)?;
    lines.finish()?;
    Ok(AppendingInstance { a, kappa, packing })
}

pub fn write_appending(inst: &AppendingInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{APPENDING_HEADER}");
    let _ = writeln!(out, "a: {}", inst.a);
    let _ = writeln!(out, "kappa: {}", inst.kappa);
    let _ = writeln!(out, "disks: {}", inst.packing.len());
    for d in &inst.packing {
        let _ = writeln!(out, "{}", d.center);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Tolerant(Rational),
}

impl Mode {
    pub fn default_tolerant() -> Mode {
        Mode::Tolerant(default_epsilon())
    }

    fn slack(&self) -> Rational {
        match self {
            Mode::Exact => Rational::zero(),
            Mode::Tolerant(e) => e.clone(),
        }
    }
}

/// `10^-9`.
pub fn default_epsilon() -> Rational {
    Rational::new(1, 1_000_000_000)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Budget {
        moves: usize,
        k: u64,
    },
    MoveTooFar(usize),
    Packing(usize, usize),
    /// An explicit disk overlaps the lattice disk at the given centre of block `block`.
    Block {
        disk: usize,
        block: usize,
        x: Rational,
        y: Rational,
    },
    BlockSpacing(usize),
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::Budget { moves, k } => write!(f, "budget: {moves} moves exceed k = {k}"),
            RejectReason::MoveTooFar(i) => write!(f, "move: disk {i} moves too far"),
            RejectReason::Packing(i, j) => write!(f, "packing: disks {i} and {j} overlap"),
            RejectReason::Block { disk, block, x, y } => {
                write!(f, "packing: disk {disk} overlaps block {block} disk at ({x}, {y})")
            }
            RejectReason::BlockSpacing(b) => write!(f, "packing: block {b} has spacing below 2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    /// Accepted only after relaxing every constraint by the given epsilon.
    AcceptTolerant(Rational),
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        !matches!(self, Verdict::Reject(_))
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::AcceptTolerant(e) => write!(f, "accept({e})"),
            Verdict::Reject(r) => write!(f, "reject({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("move refers to disk {0}, but the instance has {1} disks")]
    IndexOutOfRange(usize, usize),
    #[error("approximate coordinates can only be validated in tolerant mode")]
    InexactWitness,
    #[error("indeterminate comparison: {0}")]
    Indeterminate(String),
}

pub fn validate_witness(inst: &Instance, w: &Witness, mode: &Mode) -> Result<Verdict, ValidationError> {
    let n = inst.disks.len();
    if let Some((&i, _)) = w.moves.iter().find(|(&i, _)| i >= n) {
        return Err(ValidationError::IndexOutOfRange(i, n));
    }
    if matches!(mode, Mode::Exact) && (!w.is_exact() || !inst.disks.iter().all(|d| d.center.is_exact())) {
        return Err(ValidationError::InexactWitness);
    }
    if w.len() as u64 > inst.k {
        return Ok(Verdict::Reject(RejectReason::Budget { moves: w.len(), k: inst.k }));
    }
    let eps = mode.slack();
    let move_bound = &inst.d2 + &eps;
    for (&i, target) in &w.moves {
        let ok = match mode {
            Mode::Exact => within_move(&inst.disks[i].center, target, &move_bound, inst.variant),
            Mode::Tolerant(_) => within_move_tolerant(&inst.disks[i].center, target, &inst.d2, &eps, inst.variant),
        }
        .map_err(|_| ValidationError::Indeterminate(format!("move of disk {i}")))?;
        if !ok {
            return Ok(Verdict::Reject(RejectReason::MoveTooFar(i)));
        }
    }
    let sep2 = Rational::from(4) - &eps;
    let finals: Vec<&Point> = (0..n).map(|i| w.moves.get(&i).unwrap_or(&inst.disks[i].center)).collect();
    match first_conflict(&finals, &sep2) {
        None => {}
        Some(PackingViolation::Overlap(i, j)) => return Ok(Verdict::Reject(RejectReason::Packing(i, j))),
        Some(PackingViolation::Indeterminate(i, j)) => {
            return Err(ValidationError::Indeterminate(format!("separation of disks {i} and {j}")))
        }
    }
    for (bi, block) in inst.blocks.iter().enumerate() {
        if block.step < Rational::from(2) && block.grid_size() > 1.into() {
            return Ok(Verdict::Reject(RejectReason::BlockSpacing(bi)));
        }
        let index = HoleIndex::new(block);
        for (i, p) in finals.iter().enumerate() {
            if let Some((x, y)) = block_conflict(block, &index, p, &sep2)
                .map_err(|_| ValidationError::Indeterminate(format!("disk {i} against block {bi}")))?
            {
                return Ok(Verdict::Reject(RejectReason::Block { disk: i, block: bi, x, y }));
            }
        }
    }
    Ok(match mode {
        Mode::Exact => Verdict::Accept,
        Mode::Tolerant(e) => Verdict::AcceptTolerant(e.clone()),
    })
}

fn within_move_tolerant(
    origin: &Point,
    target: &Point,
    d2: &Rational,
    eps: &Rational,
    variant: Variant,
) -> Result<bool, Indeterminate> {
    let le = |s: &Scalar, bound: &Rational| match compare_to(s, bound) {
        Comparison::Less | Comparison::Equal => Ok(true),
        Comparison::Greater => Ok(false),
        Comparison::Indeterminate => Err(Indeterminate),
    };
    let bound = d2 + eps;
    match variant {
        Variant::Euclidean => le(&dist2(origin, target), &bound),
        Variant::Rectilinear => {
            let dx2 = origin.x.sub(&target.x).square();
            let dy2 = origin.y.sub(&target.y).square();
            let vertical = le(&dx2, eps).and_then(|a| Ok(a && le(&dy2, &bound)?));
            let horizontal = le(&dy2, eps).and_then(|a| Ok(a && le(&dx2, &bound)?));
            match (vertical, horizontal) {
                (Ok(true), _) | (_, Ok(true)) => Ok(true),
                (Ok(false), Ok(false)) => Ok(false),
                _ => Err(Indeterminate),
            }
        }
    }
}

/// Bucket index over the holes of a block, keyed by approximate coordinates.
pub struct HoleIndex<'a> {
    block: &'a LatticeBlock,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    large: Vec<usize>,
}

impl<'a> HoleIndex<'a> {
    const MAX_CELLS: i64 = 4096;

    pub fn new(block: &'a LatticeBlock) -> Self {
        let cell = 32.0 * block.step.to_f64().max(1e-6);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let mut large = Vec::new();
        for (i, h) in block.holes.iter().enumerate() {
            let (cx0, cy0) = Self::key_of(cell, h.x0.to_f64(), h.y0.to_f64());
            let (cx1, cy1) = Self::key_of(cell, h.x1.to_f64(), h.y1.to_f64());
            if (cx1 - cx0 + 3) * (cy1 - cy0 + 3) > Self::MAX_CELLS {
                large.push(i);
                continue;
            }
            for cx in cx0 - 1..=cx1 + 1 {
                for cy in cy0 - 1..=cy1 + 1 {
                    buckets.entry((cx, cy)).or_default().push(i);
                }
            }
        }
        HoleIndex { block, cell, buckets, large }
    }

    fn key_of(cell: f64, x: f64, y: f64) -> (i64, i64) {
        ((x / cell).floor() as i64, (y / cell).floor() as i64)
    }

    pub fn in_hole(&self, x: &Rational, y: &Rational) -> bool {
        let key = Self::key_of(self.cell, x.to_f64(), y.to_f64());
        let holes = &self.block.holes;
        self.large.iter().any(|&i| holes[i].contains(x, y))
            || self.buckets.get(&key).is_some_and(|b| b.iter().any(|&i| holes[i].contains(x, y)))
    }
}

/// First lattice point of `block` (row-major) whose disk comes closer than
/// `sqrt(sep2)` to `p`.
pub fn block_conflict(
    block: &LatticeBlock,
    index: &HoleIndex,
    p: &Point,
    sep2: &Rational,
) -> Result<Option<(Rational, Rational)>, Indeterminate> {
    let reach = Rational::from(2);
    let (lo_i, hi_i) = lattice_range(&p.x, &block.bounds.x0, &block.bounds.x1, &block.step, &reach);
    let (lo_j, hi_j) = lattice_range(&p.y, &block.bounds.y0, &block.bounds.y1, &block.step, &reach);
    let mut j = lo_j;
    while j <= hi_j {
        let y = &block.bounds.y0 + &block.step * Rational::from(j);
        let mut i = lo_i;
        while i <= hi_i {
            let x = &block.bounds.x0 + &block.step * Rational::from(i);
            let q = Point::rational(x.clone(), y.clone());
            let close = match compare_to(&dist2(p, &q), sep2) {
                Comparison::Less => true,
                Comparison::Equal | Comparison::Greater => false,
                Comparison::Indeterminate => {
                    if index.in_hole(&x, &y) {
                        false
                    } else {
                        return Err(Indeterminate);
                    }
                }
            };
            if close && !index.in_hole(&x, &y) {
                return Ok(Some((x, y)));
            }
            i += 1;
        }
        j += 1;
    }
    Ok(None)
}

/// Inclusive index range of lattice coordinates within `reach` of `v`, clipped
/// to the block. Irrational values widen the range by one step on each side.
fn lattice_range(v: &Scalar, lo: &Rational, hi: &Rational, step: &Rational, reach: &Rational) -> (i64, i64) {
    let max_idx = ((hi - lo) / step).floor();
    let (a, b) = match v.as_rational() {
        Some(r) => (((r - reach - lo) / step).ceil(), ((r + reach - lo) / step).floor()),
        None => {
            let r = Rational::from_f64(v.to_f64()).unwrap_or_default();
            (((&r - reach - lo) / step).floor() - 1, ((&r + reach - lo) / step).ceil() + 1)
        }
    };
    let a = a.max(0.into());
    let b = b.min(max_idx);
    let clamp = |x: num_bigint::BigInt| i64::try_from(x).unwrap_or(i64::MAX);
    if a > b {
        return (1, 0);
    }
    (clamp(a), clamp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = "DISKDISPERSAL v1
variant: euclidean            # or: rectilinear
k: 1
d2: 3
disks: 3
0 0
1 0
2 0
blocks: 1
-10 -10 30 30 step 2 holes 1
-1 -1 3 1
";

    fn triple(k: u64, d2: i64) -> Instance {
        Instance::from_ints(Variant::Euclidean, k, d2.into(), &[(0, 0), (1, 0), (2, 0)])
    }

    fn sqrt3_witness() -> Witness {
        parse_witness("DISPERSALMOVES v1\nmoves: 1\n1 -> 1 0+1*sqrt(3)\n").unwrap()
    }

    #[test]
    fn parses_sample_format() {
        let inst = parse_instance(SAMPLE).unwrap();
        assert_eq!(inst.disks.len(), 3);
        assert_eq!(inst.blocks.len(), 1);
        assert_eq!(inst.blocks[0].holes, vec![Rect::int(-1, -1, 3, 1)]);
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn header_only_instance() {
        let inst = parse_instance("DISKDISPERSAL v1\nvariant: rectilinear\nk: 0\nd2: 0\ndisks: 0\n").unwrap();
        assert!(inst.disks.is_empty() && inst.blocks.is_empty());
    }

    #[test]
    fn negative_budget_reports_line() {
        let e = parse_instance("DISKDISPERSAL v1\nvariant: euclidean\nk: -1\nd2: 0\ndisks: 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_instance("DISKDISPERSAL v1\nvariant: euclidean\nk: 1\nd2: -1/2\ndisks: 0\n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let text = write_instance(&triple(1, 3));
        assert_eq!(write_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn witness_format() {
        assert_eq!(write_witness(&Witness::empty()), "DISPERSALMOVES v1\nmoves: 0\n");
        let w = sqrt3_witness();
        assert_eq!(parse_witness(&write_witness(&w)).unwrap(), w);
        let dup = parse_witness("DISPERSALMOVES v1\nmoves: 2\n1 -> 0 0\n1 -> 2 2\n").unwrap_err();
        assert_eq!(dup.line, 4);
    }

    #[test]
    fn triple_validation() {
        assert_eq!(validate_witness(&triple(1, 3), &sqrt3_witness(), &Mode::Exact), Ok(Verdict::Accept));
        assert_eq!(
            validate_witness(&triple(0, 3), &sqrt3_witness(), &Mode::Exact),
            Ok(Verdict::Reject(RejectReason::Budget { moves: 1, k: 0 }))
        );
        let pair = Instance::from_ints(Variant::Euclidean, 0, 0.into(), &[(0, 0), (1, 0)]);
        assert_eq!(
            validate_witness(&pair, &Witness::empty(), &Mode::Exact),
            Ok(Verdict::Reject(RejectReason::Packing(0, 1)))
        );
    }

    #[test]
    fn tilde_witness_needs_tolerant_mode() {
        let w = parse_witness("DISPERSALMOVES v1\nmoves: 1\n1 -> 1 1.7320508075688773~\n").unwrap();
        assert_eq!(validate_witness(&triple(1, 3), &w, &Mode::Exact), Err(ValidationError::InexactWitness));
        assert!(validate_witness(&triple(1, 3), &w, &Mode::default_tolerant()).unwrap().is_accept());
    }

    #[test]
    fn block_checks_match_materialization() {
        let inst = parse_instance(SAMPLE).unwrap();
        let flat = inst.expand_blocks(10_000).unwrap();
        assert_eq!(flat.disks.len(), 21 * 21 - 2 + 3);
        let good = sqrt3_witness();
        let v1 = validate_witness(&inst, &good, &Mode::Exact).unwrap();
        let v2 = validate_witness(&flat, &good, &Mode::Exact).unwrap();
        assert!(!v1.is_accept(), "(1, sqrt3) overlaps the lattice disk at (0, 2)");
        assert_eq!(v1.is_accept(), v2.is_accept());
        let lone = Instance { disks: vec![Disk::at(1, 0)], ..inst.clone() };
        assert!(validate_witness(&lone, &Witness::empty(), &Mode::Exact).unwrap().is_accept());
    }

    #[test]
    fn rectilinear_moves() {
        let inst = Instance::from_ints(Variant::Rectilinear, 1, 9.into(), &[(0, 0), (1, 0)]);
        let diag: Witness = [(1, Point::int(3, 2))].into_iter().collect();
        assert_eq!(validate_witness(&inst, &diag, &Mode::Exact), Ok(Verdict::Reject(RejectReason::MoveTooFar(1))));
        let axis: Witness = [(1, Point::int(1, 3))].into_iter().collect();
        assert_eq!(validate_witness(&inst, &axis, &Mode::Exact), Ok(Verdict::Accept));
    }
}
