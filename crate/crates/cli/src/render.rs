use std::fmt::Write as _;

use dispersal_core::geometry::Point;
use dispersal_core::instance_io::{Instance, Witness};
use dispersal_core::numerics::Rational;

/// Blocks with at most this many grid points also get their disks drawn.
const LATTICE_DRAW_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    pub fixed: &'static str,
    pub moved: &'static str,
    pub lattice: &'static str,
    pub arrow: &'static str,
}

impl Default for Palette {
    fn default() -> Self {
        Palette { fixed: "#4a6fa5", moved: "#d1495b", lattice: "#8d99ae", arrow: "#222222" }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    /// Pixels per unit; must be positive.
    pub scale: Rational,
    pub show_moves: bool,
    pub palette: Palette,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { scale: Rational::from(20), show_moves: true, palette: Palette::default() }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".into()
    } else {
        s.to_string()
    }
}

struct Bounds {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Bounds {
    fn empty() -> Self {
        Bounds { x0: f64::INFINITY, y0: f64::INFINITY, x1: f64::NEG_INFINITY, y1: f64::NEG_INFINITY }
    }

    fn add(&mut self, x: f64, y: f64, r: f64) {
        self.x0 = self.x0.min(x - r);
        self.y0 = self.y0.min(y - r);
        self.x1 = self.x1.max(x + r);
        self.y1 = self.y1.max(y + r);
    }
}

/// SVG drawing of `inst`. Fixed disks are solid; with `w` and `show_moves`,
/// each moved disk is drawn dashed at its origin, solid at its target, and
/// joined by an arrow. Lattice blocks are hatched rectangles.
pub fn render_svg(inst: &Instance, w: Option<&Witness>, opts: &RenderOptions) -> String {
    let pal = &opts.palette;
    let target = |i: usize| -> Option<&Point> { w.and_then(|w| w.moves.get(&i)) };
    let mut b = Bounds::empty();
    for (i, d) in inst.disks.iter().enumerate() {
        let (x, y) = d.center.to_f64();
        b.add(x, y, 1.0);
        if let Some(t) = target(i) {
            let (x, y) = t.to_f64();
            b.add(x, y, 1.0);
        }
    }
    for blk in &inst.blocks {
        b.add(blk.bounds.x0.to_f64(), blk.bounds.y0.to_f64(), 1.0);
        b.add(blk.bounds.x1.to_f64(), blk.bounds.y1.to_f64(), 1.0);
    }
    if !b.x0.is_finite() {
        b = Bounds { x0: -1.0, y0: -1.0, x1: 1.0, y1: 1.0 };
    }
    let pad = 0.5;
    let (vx, vy) = (b.x0 - pad, -(b.y1 + pad));
    let (vw, vh) = (b.x1 - b.x0 + 2.0 * pad, b.y1 - b.y0 + 2.0 * pad);
    let scale = opts.scale.to_f64();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(vw * scale),
        num(vh * scale),
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    let _ = writeln!(
        s,
        r#"<defs><pattern id="hatch" width="1" height="1" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><line x1="0" y1="0" x2="0" y2="1" stroke="{}" stroke-width="0.2"/></pattern><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M0 0L10 5L0 10z" fill="{}"/></marker></defs>"#,
        pal.lattice, pal.arrow
    );
    for (bi, blk) in inst.blocks.iter().enumerate() {
        let (x0, y0) = (blk.bounds.x0.to_f64(), blk.bounds.y0.to_f64());
        let (x1, y1) = (blk.bounds.x1.to_f64(), blk.bounds.y1.to_f64());
        let _ = writeln!(
            s,
            r#"<rect class="block" data-block="{bi}" x="{}" y="{}" width="{}" height="{}" fill="url(#hatch)" stroke="{}" stroke-width="0.1"/>"#,
            num(x0 - 1.0),
            num(-(y1 + 1.0)),
            num(x1 - x0 + 2.0),
            num(y1 - y0 + 2.0),
            pal.lattice
        );
        for h in &blk.holes {
            let _ = writeln!(
                s,
                r#"<rect class="hole" x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
                num(h.x0.to_f64()),
                num(-h.y1.to_f64()),
                num(h.x1.to_f64() - h.x0.to_f64()),
                num(h.y1.to_f64() - h.y0.to_f64())
            );
        }
        if let Some(disks) = blk.materialize(LATTICE_DRAW_LIMIT) {
            for d in disks {
                let (x, y) = d.center.to_f64();
                let _ = writeln!(
                    s,
                    r#"<circle class="lattice" cx="{}" cy="{}" r="1" fill="none" stroke="{}" stroke-width="0.05"/>"#,
                    num(x),
                    num(-y),
                    pal.lattice
                );
            }
        }
    }
    for (i, d) in inst.disks.iter().enumerate() {
        let (x, y) = d.center.to_f64();
        match target(i) {
            None => {
                let _ = writeln!(
                    s,
                    r#"<circle class="fixed" data-disk="{i}" cx="{}" cy="{}" r="1" fill="{}" fill-opacity="0.5" stroke="{}" stroke-width="0.05"/>"#,
                    num(x),
                    num(-y),
                    pal.fixed,
                    pal.fixed
                );
            }
            Some(t) => {
                let (tx, ty) = t.to_f64();
                if opts.show_moves {
                    let _ = writeln!(
                        s,
                        r#"<circle class="origin" data-disk="{i}" cx="{}" cy="{}" r="1" fill="none" stroke="{}" stroke-width="0.05" stroke-dasharray="0.2 0.1"/>"#,
                        num(x),
                        num(-y),
                        pal.moved
                    );
                    let _ = writeln!(
                        s,
                        r#"<line class="arrow" data-disk="{i}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="0.06" marker-end="url(#head)"/>"#,
                        num(x),
                        num(-y),
                        num(tx),
                        num(-ty),
                        pal.arrow
                    );
                }
                let _ = writeln!(
                    s,
                    r#"<circle class="moved" data-disk="{i}" cx="{}" cy="{}" r="1" fill="{}" fill-opacity="0.5" stroke="{}" stroke-width="0.05"/>"#,
                    num(tx),
                    num(-ty),
                    pal.moved,
                    pal.moved
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use dispersal_core::geometry::{Disk, Variant};
    use dispersal_core::instance_io::{LatticeBlock, Rect};
    use dispersal_core::numerics::Scalar;
    use std::collections::BTreeMap;

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!(r#"class="{class}""#)).count()
    }

    fn triple() -> (Instance, Witness) {
        let inst = Instance::from_ints(Variant::Euclidean, 1, Rational::from(3), &[(0, 0), (1, 0), (2, 0)]);
        let target = Point::new(Scalar::from(1), "0+1*sqrt(3)".parse().unwrap());
        (inst, Witness { moves: BTreeMap::from([(1, target)]) })
    }

    #[test]
    fn triple_elements() {
        let (inst, w) = triple();
        let svg = render_svg(&inst, Some(&w), &RenderOptions::default());
        assert_eq!(count(&svg, "fixed") + count(&svg, "moved"), 3);
        assert_eq!(count(&svg, "origin"), 1);
        assert_eq!(count(&svg, "arrow"), 1);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert!(svg.contains(r#"cy="-1.732050807569""#));
        let hidden = RenderOptions { show_moves: false, ..RenderOptions::default() };
        let svg = render_svg(&inst, Some(&w), &hidden);
        assert_eq!((count(&svg, "origin"), count(&svg, "arrow"), count(&svg, "moved")), (0, 0, 1));
    }

    #[test]
    fn deterministic() {
        let (inst, w) = triple();
        let a = render_svg(&inst, Some(&w), &RenderOptions::default());
        let b = render_svg(&inst.clone(), Some(&w.clone()), &RenderOptions::default());
        assert_eq!(a, b);
    }

    #[test]
    fn empty_canvas() {
        let inst = Instance::new(Variant::Euclidean, 0, Rational::zero(), Vec::new());
        let svg = render_svg(&inst, None, &RenderOptions::default());
        assert!(svg.starts_with("<svg ") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("<circle"));
        assert!(svg.contains(r#"viewBox="-1.5 -1.5 3 3""#));
    }

    #[test]
    fn one_block() {
        let mut inst = Instance::new(Variant::Euclidean, 0, Rational::zero(), vec![Disk::at(0, 0)]);
        inst.blocks.push(LatticeBlock::new(
            Rect::int(-100, -100, 100, 100),
            Rational::from(2),
            vec![Rect::int(-1, -1, 1, 1)],
        ));
        let svg = render_svg(&inst, None, &RenderOptions::default());
        assert_eq!(count(&svg, "block"), 1);
        assert_eq!(count(&svg, "lattice"), 0);
        assert_eq!(count(&svg, "fixed"), 1);

        inst.blocks[0] = LatticeBlock::new(Rect::int(4, 0, 8, 4), Rational::from(2), Vec::new());
        let svg = render_svg(&inst, None, &RenderOptions::default());
        assert_eq!((count(&svg, "block"), count(&svg, "lattice")), (1, 9));
    }

    #[test]
    fn number_format() {
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(2.5), "2.5");
        assert_eq!(num(3.0), "3");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
    }
}
