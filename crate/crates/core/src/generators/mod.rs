//! Instance builders: random and co-located families, Disk Appending frames,
//! the OR-composition of appending instances, and the grid-tiling reduction
//! together with its canonical witness.

mod compose;
mod gridtiling;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Disk, Point, Variant};
use crate::instance_io::Instance;
use crate::numerics::Rational;

pub use compose::{gen_appending_frame, gen_crosscompose, Composition, SeparationReport};
pub use gridtiling::{
    gen_gridtiling, gridtiling_budget, gridtiling_witness, parse_gridtiling, write_gridtiling, Gadget,
    GridTilingInstance, GridTilingLayout, Tube,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("disks {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("distance claim failed: {0}")]
    Claim(String),
    #[error("solution is not in the sets: {0}")]
    NotInSets(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// `n` disks with centres drawn uniformly from the quarter grid on `[0, side]^2`.
pub fn gen_random(n: usize, side: u64, k: u64, d2: Rational, variant: Variant, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = 4 * side as i64;
    let disks = (0..n)
        .map(|_| {
            let x = rng.gen_range(0..=top);
            let y = rng.gen_range(0..=top);
            Disk::new(Point::rational(Rational::new(x, 4), Rational::new(y, 4)))
        })
        .collect();
    Instance::new(variant, k, d2, disks)
}

/// `m` disks stacked at the origin.
pub fn gen_colocated(m: usize, k: u64, d2: Rational, variant: Variant) -> Instance {
    Instance::new(variant, k, d2, vec![Disk::at(0, 0); m])
}

/// Number of unit disks centred at `centres` that lie inside the closed disk of
/// radius `r` around `q`.
pub fn contained_count(centres: &[(Rational, Rational)], q: &(Rational, Rational), r: u64) -> usize {
    if r == 0 {
        return 0;
    }
    let lim = Rational::from(r as i64 - 1).square();
    centres.iter().filter(|c| (&c.0 - &q.0).square() + (&c.1 - &q.1).square() <= lim).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_packing;
    use crate::instance_io::{parse_instance, write_instance};

    #[test]
    fn random_is_seeded() {
        let a = gen_random(20, 10, 2, Rational::from(4), Variant::Euclidean, 7);
        let b = gen_random(20, 10, 2, Rational::from(4), Variant::Euclidean, 7);
        let c = gen_random(20, 10, 2, Rational::from(4), Variant::Euclidean, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.disks.iter().all(|d| {
            let (x, y) = d.center.as_rational().unwrap();
            (x * Rational::from(4)).is_integer() && !x.is_negative() && y <= &Rational::from(10)
        }));
        assert_eq!(parse_instance(&write_instance(&a)).unwrap(), a);
        assert!(gen_random(0, 10, 0, Rational::zero(), Variant::Euclidean, 1).disks.is_empty());
    }

    #[test]
    fn colocated_shape() {
        let inst = gen_colocated(4, 2, Rational::from(1_000_000), Variant::Rectilinear);
        assert_eq!(inst.disks.len(), 4);
        assert!(inst.disks.iter().all(|d| d.center == Point::origin()));
    }

    #[test]
    fn packing_bound_on_square_grid() {
        let grid: Vec<(Rational, Rational)> =
            (-20..=20).flat_map(|x| (-20..=20).map(move |y| (Rational::from(2 * x), Rational::from(2 * y)))).collect();
        let disks: Vec<Disk> = grid.iter().map(|(x, y)| Disk::new(Point::rational(x.clone(), y.clone()))).collect();
        assert!(is_packing(&disks).is_ok());
        for r in [3u64, 5, 10] {
            let c = contained_count(&grid, &(Rational::new(1, 3), Rational::new(-1, 2)), r);
            assert!(c as u64 <= r * r, "r = {r}: {c}");
        }
        assert_eq!(contained_count(&grid, &(Rational::zero(), Rational::zero()), 1), 1);
    }
}
