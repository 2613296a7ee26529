//! Multi-start penalty descent in floating point. Solutions are converted to
//! exact rationals and accepted only after exact verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, Variant};
use crate::numerics::Rational;

use super::Problem;

const MARGIN: f64 = 1e-6;
const ITERATIONS: usize = 400;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Freedom {
    Plane,
    AlongX,
    AlongY,
}

struct Model {
    origins: Vec<(f64, f64)>,
    /// Fixed centres near each movable.
    fixed: Vec<Vec<(f64, f64)>>,
    kinds: Vec<Freedom>,
    sep: f64,
    reach: f64,
}

impl Model {
    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.kinds.len());
        let mut at = 0;
        for k in &self.kinds {
            off.push(at);
            at += if *k == Freedom::Plane { 2 } else { 1 };
        }
        off
    }

    fn positions(&self, vars: &[f64], off: &[usize]) -> Vec<(f64, f64)> {
        self.kinds
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let (ox, oy) = self.origins[i];
                match k {
                    Freedom::Plane => (vars[off[i]], vars[off[i] + 1]),
                    Freedom::AlongX => (ox + vars[off[i]], oy),
                    Freedom::AlongY => (ox, oy + vars[off[i]]),
                }
            })
            .collect()
    }

    fn eval(&self, vars: &[f64], off: &[usize], grad: &mut [f64]) -> f64 {
        let pos = self.positions(vars, off);
        let mut gp = vec![(0.0f64, 0.0f64); pos.len()];
        let sep2 = self.sep * self.sep;
        let reach2 = self.reach * self.reach;
        let mut f = 0.0;
        for (i, &(x, y)) in pos.iter().enumerate() {
            for &(fx, fy) in &self.fixed[i] {
                let (dx, dy) = (x - fx, y - fy);
                let s = dx * dx + dy * dy;
                if s < sep2 {
                    let v = sep2 - s;
                    f += v * v;
                    gp[i].0 -= 4.0 * v * dx;
                    gp[i].1 -= 4.0 * v * dy;
                }
            }
            for j in 0..i {
                let (dx, dy) = (x - pos[j].0, y - pos[j].1);
                let s = dx * dx + dy * dy;
                if s < sep2 {
                    let v = sep2 - s;
                    f += v * v;
                    gp[i].0 -= 4.0 * v * dx;
                    gp[i].1 -= 4.0 * v * dy;
                    gp[j].0 += 4.0 * v * dx;
                    gp[j].1 += 4.0 * v * dy;
                }
            }
            let (dx, dy) = (x - self.origins[i].0, y - self.origins[i].1);
            let s = dx * dx + dy * dy;
            if s > reach2 {
                let v = s - reach2;
                f += v * v;
                gp[i].0 += 4.0 * v * dx;
                gp[i].1 += 4.0 * v * dy;
            }
        }
        for (i, k) in self.kinds.iter().enumerate() {
            match k {
                Freedom::Plane => {
                    grad[off[i]] = gp[i].0;
                    grad[off[i] + 1] = gp[i].1;
                }
                Freedom::AlongX => grad[off[i]] = gp[i].0,
                Freedom::AlongY => grad[off[i]] = gp[i].1,
            }
        }
        f
    }

    fn descend(&self, mut vars: Vec<f64>) -> Option<Vec<(f64, f64)>> {
        let off = self.offsets();
        let mut grad = vec![0.0; vars.len()];
        let mut trial_grad = vec![0.0; vars.len()];
        let mut f = self.eval(&vars, &off, &mut grad);
        let mut step = 1e-2;
        for _ in 0..ITERATIONS {
            if f == 0.0 {
                return Some(self.positions(&vars, &off));
            }
            let g2: f64 = grad.iter().map(|g| g * g).sum();
            if g2 == 0.0 || !g2.is_finite() {
                return None;
            }
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = vars.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
                let ft = self.eval(&trial, &off, &mut trial_grad);
                if ft <= f - 1e-4 * step * g2 {
                    vars = trial;
                    f = ft;
                    std::mem::swap(&mut grad, &mut trial_grad);
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        (f == 0.0).then(|| self.positions(&vars, &off))
    }
}

fn start_vars(model: &Model, rng: &mut ChaCha8Rng, jitter: bool) -> Vec<f64> {
    let mut vars = Vec::new();
    for (i, k) in model.kinds.iter().enumerate() {
        let (ox, oy) = model.origins[i];
        match k {
            Freedom::Plane => {
                let (dx, dy) = if jitter {
                    let r = model.reach * rng.gen::<f64>().sqrt();
                    let a = rng.gen::<f64>() * std::f64::consts::TAU;
                    (r * a.cos(), r * a.sin())
                } else {
                    (0.0, 0.0)
                };
                vars.push(ox + dx);
                vars.push(oy + dy);
            }
            _ => vars.push(if jitter { model.reach * (2.0 * rng.gen::<f64>() - 1.0) } else { 0.0 }),
        }
    }
    vars
}

pub(super) fn penalty_descent(p: &Problem, seed: u64, starts: usize) -> Option<Vec<Point>> {
    let d = p.d2.to_f64().sqrt();
    if d <= 2.0 * MARGIN || p.origins.is_empty() {
        return None;
    }
    let near = p.near_fixed(&Rational::zero());
    let to_f = |c: &(Rational, Rational)| (c.0.to_f64(), c.1.to_f64());
    let m = p.origins.len();
    let combos: Vec<Vec<Freedom>> = match p.variant {
        Variant::Euclidean => vec![vec![Freedom::Plane; m]],
        Variant::Rectilinear => {
            if m > 6 {
                return None;
            }
            (0..1u32 << m)
                .map(|mask| {
                    (0..m).map(|i| if mask >> i & 1 == 0 { Freedom::AlongX } else { Freedom::AlongY }).collect()
                })
                .collect()
        }
    };
    let per_combo = (starts / combos.len()).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for kinds in combos {
        let model = Model {
            origins: p.origins.iter().map(to_f).collect(),
            fixed: near.iter().map(|ids| ids.iter().map(|&f| to_f(&p.fixed[f])).collect()).collect(),
            kinds,
            sep: 2.0 + MARGIN,
            reach: d - MARGIN,
        };
        for s in 0..per_combo {
            let vars = start_vars(&model, &mut rng, s > 0);
            let Some(pos) = model.descend(vars) else { continue };
            let exact: Option<Vec<Point>> = pos
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| {
                    let (ox, oy) = &p.origins[i];
                    let x = if model.kinds[i] == Freedom::AlongY { ox.clone() } else { Rational::from_f64(x)? };
                    let y = if model.kinds[i] == Freedom::AlongX { oy.clone() } else { Rational::from_f64(y)? };
                    Some(Point::rational(x, y))
                })
                .collect();
            if let Some(pts) = exact {
                if p.verify(&pts) {
                    return Some(pts);
                }
            }
        }
    }
    None
}
