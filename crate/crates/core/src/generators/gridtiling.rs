//! Grid Tiling reduction to the rectilinear variant.
//!
//! Every gadget is a tube: a 3 x L block of disks whose middle column holds,
//! bottom to top, `N1` padding disks, the interesting disks (or a co-located
//! stack, or free room), and enough padding to reach the top. Tubes have even
//! corner coordinates, so all their disks and the surrounding fill sit on odd
//! coordinates. In a "gapped" tube the interesting disks are separated from
//! the padding by a gap of 1 on both sides, which leaves room for one extra
//! disk once they all leave; parity `p = 1` adds a further gap of 1 below the
//! padding and above it, shifting the interesting disks up by one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::geometry::{Disk, Point, Variant};
use crate::instance_io::{Instance, LatticeBlock, Rect, Witness};
use crate::numerics::Rational;

use super::GenError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridTilingInstance {
    pub n: usize,
    pub kappa: usize,
    /// `S_{i,j}` for `1 <= i, j <= kappa`, pairs in `[n] x [n]`.
    pub sets: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>>,
}

impl GridTilingInstance {
    pub fn new(
        n: usize,
        kappa: usize,
        sets: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>>,
    ) -> Result<Self, GenError> {
        if n == 0 || kappa == 0 {
            return Err(GenError::Precondition("n and kappa must be positive".into()));
        }
        for i in 1..=kappa {
            for j in 1..=kappa {
                let s = sets.get(&(i, j)).filter(|s| !s.is_empty());
                let Some(s) = s else {
                    return Err(GenError::Precondition(format!("set ({i}, {j}) is missing or empty")));
                };
                if s.iter().any(|&(a, b)| a == 0 || b == 0 || a > n || b > n) {
                    return Err(GenError::Precondition(format!("set ({i}, {j}) has a pair outside [{n}]^2")));
                }
            }
        }
        if sets.keys().any(|&(i, j)| i == 0 || j == 0 || i > kappa || j > kappa) {
            return Err(GenError::Precondition("set index outside the grid".into()));
        }
        Ok(GridTilingInstance { n, kappa, sets })
    }

    /// Whether `rows` and `cols` (1-based values, one per row and column) solve the instance.
    pub fn is_solution(&self, rows: &[usize], cols: &[usize]) -> bool {
        rows.len() == self.kappa
            && cols.len() == self.kappa
            && (1..=self.kappa)
                .all(|i| (1..=self.kappa).all(|j| self.sets[&(i, j)].contains(&(rows[i - 1], cols[j - 1]))))
    }
}

/// Text form: `n kappa`, then one line `i j: a,b a,b ...` per cell.
pub fn parse_gridtiling(text: &str) -> Result<GridTilingInstance, GenError> {
    let err = |line: usize, message: String| GenError::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, head) = lines.next().ok_or_else(|| err(1, "missing header line".into()))?;
    let nums: Vec<usize> = head
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(line, format!("bad integer {t:?}"))))
        .collect::<Result<_, _>>()?;
    let [n, kappa] = nums[..] else {
        return Err(err(line, "expected `n kappa`".into()));
    };
    let mut sets = BTreeMap::new();
    for (line, l) in lines {
        let (cell, pairs) = l.split_once(':').ok_or_else(|| err(line, "expected `i j: pairs`".into()))?;
        let ij: Vec<usize> = cell
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(line, format!("bad integer {t:?}"))))
            .collect::<Result<_, _>>()?;
        let [i, j] = ij[..] else {
            return Err(err(line, "expected two cell indices".into()));
        };
        let mut set = BTreeSet::new();
        for p in pairs.split_whitespace() {
            let (a, b) = p.split_once(',').ok_or_else(|| err(line, format!("bad pair {p:?}")))?;
            let a = a.trim().parse().map_err(|_| err(line, format!("bad pair {p:?}")))?;
            let b = b.trim().parse().map_err(|_| err(line, format!("bad pair {p:?}")))?;
            set.insert((a, b));
        }
        if sets.insert((i, j), set).is_some() {
            return Err(err(line, format!("cell ({i}, {j}) listed twice")));
        }
    }
    GridTilingInstance::new(n, kappa, sets)
}

pub fn write_gridtiling(gt: &GridTilingInstance) -> String {
    let mut out = format!("{} {}\n", gt.n, gt.kappa);
    for ((i, j), set) in &gt.sets {
        let pairs: Vec<String> = set.iter().map(|(a, b)| format!("{a},{b}")).collect();
        let _ = writeln!(out, "{i} {j}: {}", pairs.join(" "));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Gadget {
    /// `(a, b, i, j)`; absent pairs are tubes without interesting disks.
    Pair(usize, usize, usize, usize),
    Row(usize, usize),
    RowStack(usize),
    Column(usize, usize),
    ColumnStack(usize),
    EmptyRow(usize, usize),
    EmptyRowSink(usize),
    EmptyColumn(usize, usize),
    EmptyColumnSink(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tube {
    pub x0: i64,
    pub y0: i64,
    pub parity: u8,
    /// Indices of interesting (or stacked) disks, bottom to top.
    pub interesting: Vec<usize>,
    /// Middle-column positions free for incoming disks once the interesting disks leave.
    pub slots: Vec<i64>,
}

impl Tube {
    pub fn mid(&self) -> i64 {
        self.x0 + 3
    }
}

enum Content {
    Full,
    Gapped { parity: u8, m: usize },
    Stack(usize),
    Room(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridTilingLayout {
    pub instance: Instance,
    pub l: i64,
    pub d: i64,
    pub n1: i64,
    pub tubes: BTreeMap<Gadget, Tube>,
}

fn counts(kappa: usize) -> impl Fn(&str, usize, usize) -> usize {
    let k = kappa;
    move |what, i, j| match what {
        "r" => 2 * k - i,
        "c" | "ec" => k - j + 2,
        "er" => k - i,
        "m" => 3 * k + 2 - i - 2 * j,
        _ => unreachable!(),
    }
}

/// Budget: sum of `2 r_i + 1`, `3 c_j + 3`, `er_i`, `2 ec_j` and `m_ij`.
pub fn gridtiling_budget(kappa: usize) -> u64 {
    let f = counts(kappa);
    let mut k = 0;
    for i in 1..=kappa {
        k += 2 * f("r", i, 0) + 1 + f("er", i, 0);
        k += 3 * f("c", 0, i) + 3 + 2 * f("ec", 0, i);
        for j in 1..=kappa {
            k += f("m", i, j);
        }
    }
    k as u64
}

fn col_parity(j: usize) -> u8 {
    if j % 2 == 1 {
        0
    } else {
        1
    }
}

struct Builder {
    l: i64,
    n1: i64,
    disks: Vec<Disk>,
    holes: Vec<Rect>,
    tubes: BTreeMap<Gadget, Tube>,
}

impl Builder {
    fn tube(&mut self, key: Gadget, x0: i64, y0: i64, content: Content) {
        let (l, n1) = (self.l, self.n1);
        let push = |disks: &mut Vec<Disk>, x: i64, y: i64| {
            disks.push(Disk::at(x, y));
            disks.len() - 1
        };
        for u in 0..l {
            push(&mut self.disks, x0 + 1, y0 + 1 + 2 * u);
            push(&mut self.disks, x0 + 5, y0 + 1 + 2 * u);
        }
        let mx = x0 + 3;
        push(&mut self.disks, mx, y0 + 1);
        push(&mut self.disks, mx, y0 + 2 * l - 1);
        let top = y0 + 2 * l - 3;
        let column = |from: i64, to: i64, disks: &mut Vec<Disk>| {
            let mut y = from;
            while y <= to {
                push(disks, mx, y);
                y += 2;
            }
        };
        let (parity, interesting, slots) = match content {
            Content::Full => {
                column(y0 + 3, top, &mut self.disks);
                (0, Vec::new(), Vec::new())
            }
            Content::Gapped { parity, m } => {
                let p = parity as i64;
                column(y0 + 3 + p, y0 + 1 + 2 * n1 + p, &mut self.disks);
                let base = y0 + 2 * n1 + 4 + p;
                let ids = (0..m as i64).map(|t| push(&mut self.disks, mx, base + 2 * t)).collect();
                let slots = (0..=m as i64).map(|t| base - 1 + 2 * t).collect();
                column(base + 2 * m as i64 + 1, top - p, &mut self.disks);
                (parity, ids, slots)
            }
            Content::Stack(count) => {
                column(y0 + 3, y0 + 1 + 2 * n1, &mut self.disks);
                let at = y0 + 3 + 2 * n1;
                let ids = (0..count).map(|_| push(&mut self.disks, mx, at)).collect();
                column(at + 2, top, &mut self.disks);
                (0, ids, Vec::new())
            }
            Content::Room(e) => {
                column(y0 + 3, y0 + 1 + 2 * n1, &mut self.disks);
                let at = y0 + 3 + 2 * n1;
                let slots = (0..e as i64).map(|t| at + 2 * t).collect();
                column(at + 2 * e as i64, top, &mut self.disks);
                (0, Vec::new(), slots)
            }
        };
        self.holes.push(Rect::int(x0, y0, x0 + 6, y0 + 2 * l));
        self.tubes.insert(key, Tube { x0, y0, parity, interesting, slots });
    }
}

impl GridTilingLayout {
    pub fn build(gt: &GridTilingInstance) -> Self {
        let (n, kappa) = (gt.n, gt.kappa);
        let f = counts(kappa);
        let ni = n as i64;
        let l = 100 * ni.max(kappa as i64);
        let d = 6 * ni * l;
        let h = 6 * ni * l - 12 * ni;
        let v = 2 * ni * l;
        let col_pitch = 6 * ni + h;
        let row_pitch = 2 * ni * l + v;
        let mut b = Builder { l, n1: l / 3, disks: Vec::new(), holes: Vec::new(), tubes: BTreeMap::new() };

        let row_top = |i: usize| -(i as i64 - 1) * row_pitch;
        let tube_y = |i: usize, a: usize| row_top(i) - 2 * l * a as i64;
        let col_x = |j: usize, bb: usize| (j as i64 - 1) * col_pitch + 6 * (bb as i64 - 1);

        for i in 1..=kappa {
            for j in 1..=kappa {
                let m = f("m", i, j);
                for a in 1..=n {
                    for bb in 1..=n {
                        let content = if gt.sets[&(i, j)].contains(&(a, bb)) {
                            Content::Gapped { parity: col_parity(j), m }
                        } else {
                            Content::Full
                        };
                        b.tube(Gadget::Pair(a, bb, i, j), col_x(j, bb), tube_y(i, a), content);
                    }
                }
            }
        }
        for i in 1..=kappa {
            let x0 = -8 - 6 * (i as i64 - 1);
            for a in 1..=n {
                b.tube(Gadget::Row(i, a), x0, tube_y(i, a), Content::Gapped { parity: 1, m: f("r", i, 0) });
            }
            b.tube(Gadget::RowStack(i), x0, row_top(i), Content::Stack(f("r", i, 0) + 2));
        }
        for j in 1..=kappa {
            let c = f("c", 0, j);
            for bb in 1..=n {
                b.tube(Gadget::Column(j, bb), col_x(j, bb), 2, Content::Gapped { parity: 1, m: c });
            }
            b.tube(Gadget::Column(j, n + 1), col_x(j, n + 1), 2, Content::Gapped { parity: 0, m: c + 1 });
            b.tube(Gadget::ColumnStack(j), col_x(j, n + 1), 2 + 2 * l, Content::Stack(c + 3));
        }
        let right = (kappa as i64 - 1) * col_pitch + 6 * ni;
        for i in 1..kappa {
            let x0 = right + 2 + 6 * (i as i64 - 1);
            let er = f("er", i, 0);
            for a in 1..=n {
                b.tube(
                    Gadget::EmptyRow(i, a),
                    x0,
                    tube_y(i, a),
                    Content::Gapped { parity: 1 - col_parity(kappa), m: er },
                );
            }
            b.tube(Gadget::EmptyRowSink(i), x0, tube_y(i, n) - 2 * l, Content::Room(er));
        }
        let bottom = row_top(kappa) - 2 * ni * l;
        for j in 1..=kappa {
            let ec = f("ec", 0, j);
            let y0 = bottom - 2 - 2 * l;
            for bb in 1..=n {
                b.tube(Gadget::EmptyColumn(j, bb), col_x(j, bb), y0, Content::Gapped { parity: 1, m: ec });
            }
            b.tube(Gadget::EmptyColumn(j, n + 1), col_x(j, n + 1), y0, Content::Gapped { parity: 0, m: ec });
            b.tube(Gadget::EmptyColumnSink(j), col_x(j, n + 1), y0 - 2 * l, Content::Room(ec));
        }

        let rects = &b.holes;
        let min_x = rects.iter().map(|r| r.x0.floor()).min().unwrap_or_default();
        let max_x = rects.iter().map(|r| r.x1.floor()).max().unwrap_or_default();
        let min_y = rects.iter().map(|r| r.y0.floor()).min().unwrap_or_default();
        let max_y = rects.iter().map(|r| r.y1.floor()).max().unwrap_or_default();
        let one = Rational::one();
        let fill = LatticeBlock::new(
            Rect::new(
                Rational::from(min_x) + &one,
                Rational::from(min_y) + &one,
                Rational::from(max_x) - &one,
                Rational::from(max_y) - &one,
            ),
            Rational::from(2),
            std::mem::take(&mut b.holes),
        );
        let d2 = Rational::from(d * d);
        let mut instance = Instance::new(Variant::Rectilinear, gridtiling_budget(kappa), d2, b.disks);
        instance.blocks.push(fill);
        GridTilingLayout { instance, l, d, n1: b.n1, tubes: b.tubes }
    }

    /// Indices of every co-located stack disk.
    pub fn stacked(&self) -> Vec<usize> {
        self.tubes
            .iter()
            .filter(|(k, _)| matches!(k, Gadget::RowStack(_) | Gadget::ColumnStack(_)))
            .flat_map(|(_, t)| t.interesting.iter().copied())
            .collect()
    }
}

/// The reduction instance for `gt`.
pub fn gen_gridtiling(gt: &GridTilingInstance) -> Instance {
    GridTilingLayout::build(gt).instance
}

struct Flows<'a> {
    layout: &'a GridTilingLayout,
    used: BTreeMap<Gadget, BTreeSet<usize>>,
    moves: BTreeMap<usize, Point>,
    pending: Vec<(Vec<usize>, Gadget)>,
}

impl Flows<'_> {
    fn tube(&self, g: Gadget) -> &Tube {
        &self.layout.tubes[&g]
    }

    /// Disks keep their height and land in the slot at the same height.
    fn horizontal(&mut self, ids: &[usize], to: Gadget) {
        let t = self.tube(to).clone();
        for &id in ids {
            let y = self.layout.instance.disks[id].center.as_rational().map(|(_, y)| y.floor()).unwrap_or_default();
            let y: i64 = y.try_into().expect("small coordinate");
            let slot = t.slots.iter().position(|&s| s == y).expect("horizontal flow lands on a slot");
            assert!(self.used.entry(to).or_default().insert(slot), "slot used twice");
            self.moves.insert(id, Point::int(t.mid(), y));
        }
    }

    /// Disks keep their column and fill the lowest free slots.
    fn vertical(&mut self, ids: &[usize], to: Gadget) {
        let t = self.tube(to).clone();
        let used = self.used.entry(to).or_default();
        let free: Vec<usize> = (0..t.slots.len()).filter(|s| !used.contains(s)).collect();
        assert!(free.len() >= ids.len(), "vertical flow has room");
        for (&id, &slot) in ids.iter().zip(&free) {
            used.insert(slot);
            self.moves.insert(id, Point::int(t.mid(), t.slots[slot]));
        }
    }
}

/// Canonical move set for a Grid Tiling solution: every interesting disk of the
/// chosen gadgets moves one step along the row/column flow.
pub fn gridtiling_witness(
    gt: &GridTilingInstance,
    inst: &Instance,
    rows: &[usize],
    cols: &[usize],
) -> Result<Witness, GenError> {
    if !gt.is_solution(rows, cols) {
        return Err(GenError::NotInSets(format!("rows {rows:?}, columns {cols:?}")));
    }
    let layout = GridTilingLayout::build(gt);
    if layout.instance.disks.len() != inst.disks.len() || layout.instance.k != inst.k {
        return Err(GenError::Precondition("instance was not generated from this grid tiling".into()));
    }
    let (n, kappa) = (gt.n, gt.kappa);
    let f = counts(kappa);
    let mut fl = Flows { layout: &layout, used: BTreeMap::new(), moves: BTreeMap::new(), pending: Vec::new() };
    let pair = |i: usize, j: usize| Gadget::Pair(rows[i - 1], cols[j - 1], i, j);

    for i in 1..=kappa {
        let a = rows[i - 1];
        let stack = fl.tube(Gadget::RowStack(i)).interesting[1..].to_vec();
        fl.pending.push((stack, Gadget::Row(i, a)));
        let ids = fl.tube(Gadget::Row(i, a)).interesting.clone();
        fl.horizontal(&ids, pair(i, 1));
    }
    for j in 1..=kappa {
        let b = cols[j - 1];
        let stack = fl.tube(Gadget::ColumnStack(j)).interesting[1..].to_vec();
        fl.pending.push((stack, Gadget::Column(j, n + 1)));
        let ids = fl.tube(Gadget::Column(j, n + 1)).interesting.clone();
        fl.horizontal(&ids, Gadget::Column(j, b));
        let ids = fl.tube(Gadget::Column(j, b)).interesting.clone();
        fl.pending.push((ids, pair(1, j)));
        let ids = fl.tube(Gadget::EmptyColumn(j, b)).interesting.clone();
        fl.horizontal(&ids, Gadget::EmptyColumn(j, n + 1));
        let ids = fl.tube(Gadget::EmptyColumn(j, n + 1)).interesting.clone();
        fl.pending.push((ids, Gadget::EmptyColumnSink(j)));
    }
    for i in 1..kappa {
        let ids = fl.tube(Gadget::EmptyRow(i, rows[i - 1])).interesting.clone();
        fl.pending.push((ids, Gadget::EmptyRowSink(i)));
    }
    for i in 1..=kappa {
        for j in 1..=kappa {
            let ids = fl.tube(pair(i, j)).interesting.clone();
            let across = 2 * kappa - i - j;
            debug_assert_eq!(ids.len(), f("m", i, j));
            if across > 0 {
                let to = if j < kappa { pair(i, j + 1) } else { Gadget::EmptyRow(i, rows[i - 1]) };
                fl.horizontal(&ids[..across], to);
            }
            let to = if i < kappa { pair(i + 1, j) } else { Gadget::EmptyColumn(j, cols[j - 1]) };
            fl.pending.push((ids[across..].to_vec(), to));
        }
    }
    for (ids, to) in std::mem::take(&mut fl.pending) {
        fl.vertical(&ids, to);
    }
    let w = Witness { moves: fl.moves };
    debug_assert_eq!(w.len() as u64, inst.k);
    Ok(w)
}
