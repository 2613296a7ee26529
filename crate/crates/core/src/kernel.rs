//! Partial kernel (distance filtering around an approximate vertex cover),
//! coordinate shrinking, and the full kernel combining both.

use num_bigint::BigInt;
use thiserror::Error;

use crate::geometry::{Disk, Point};
use crate::instance_io::Instance;
use crate::numerics::{sqrt_lower_upper, Rational};
use crate::udg::{approx_vc, build_graph_with, components, EdgeRule, GraphError, VertexCover};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("lattice blocks must be expanded before kernelization")]
    BlocksPresent,
    #[error("disk {0} has an irrational centre")]
    NotRational(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    pub cover: Vec<usize>,
    pub threshold: Rational,
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub size_bound: BigInt,
    /// Largest `b + c` over the fractional parts `b/c` of all centre coordinates.
    pub n_stat: BigInt,
}

impl KernelReport {
    pub fn comment_lines(&self) -> Vec<String> {
        let list = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        vec![
            format!("cover: {}", list(&self.cover)),
            format!("threshold: {}", self.threshold),
            format!("kept: {}", list(&self.kept)),
            format!("removed: {}", list(&self.removed)),
            format!("size_bound: {}", self.size_bound),
            format!("N: {}", self.n_stat),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum KernelOutcome {
    Reduced(Instance, KernelReport),
    TriviallyNo,
}

/// `sqrt(d2)` when it is rational, otherwise a rational upper bound with
/// denominator `2^32`.
pub fn move_radius_upper(d2: &Rational) -> Rational {
    if let Some(r) = d2.exact_sqrt() {
        return r;
    }
    let bound = BigInt::from(1u64 << 32);
    sqrt_lower_upper(d2, &bound).map(|(_, hi)| hi).expect("d2 is non-negative")
}

/// `2k + 2k * ceil(((d + 2)(k + 1) + 2)^2)`.
pub fn size_bound(k: u64, d: &Rational) -> BigInt {
    let k_r = Rational::from(k as i64);
    let inner = (d + Rational::from(2)) * (&k_r + Rational::one()) + Rational::from(2);
    let two_k = BigInt::from(2u64 * k);
    &two_k + &two_k * inner.square().ceil()
}

fn rational_centres(inst: &Instance) -> Result<Vec<(Rational, Rational)>, KernelError> {
    if !inst.blocks.is_empty() {
        return Err(KernelError::BlocksPresent);
    }
    inst.disks
        .iter()
        .enumerate()
        .map(|(i, d)| d.center.as_rational().map(|(x, y)| (x.clone(), y.clone())).ok_or(KernelError::NotRational(i)))
        .collect()
}

fn sq_dist(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&a.0 - &b.0).square() + (&a.1 - &b.1).square()
}

/// Largest `b + c` with `b/c` the reduced fractional part of some coordinate.
pub fn n_statistic(centres: &[(Rational, Rational)]) -> BigInt {
    centres
        .iter()
        .flat_map(|(x, y)| [x, y])
        .map(|v| {
            let frac = v - Rational::from_integer(v.floor());
            frac.numer() + frac.denom()
        })
        .max()
        .unwrap_or_else(|| BigInt::from(1))
}

/// Drops every disk farther than `(d + 2)(k + 1)` from all disks of a greedy
/// vertex cover. Input order is preserved among kept disks.
pub fn kernelize(inst: &Instance) -> Result<KernelOutcome, KernelError> {
    let centres = rational_centres(inst)?;
    let refs: Vec<&Point> = inst.disks.iter().map(|d| &d.center).collect();
    let g = build_graph_with(&refs, &EdgeRule::unit(), true)?;
    let cover = match approx_vc(&g, inst.k) {
        VertexCover::ExceedsBudget => return Ok(KernelOutcome::TriviallyNo),
        VertexCover::Cover(c) => c,
    };
    let d = move_radius_upper(&inst.d2);
    let threshold = (&d + Rational::from(2)) * Rational::from(inst.k as i64 + 1);
    let t2 = threshold.square();
    let (kept, removed): (Vec<usize>, Vec<usize>) =
        (0..centres.len()).partition(|&i| cover.iter().any(|&u| sq_dist(&centres[i], &centres[u]) <= t2));
    let report = KernelReport {
        size_bound: size_bound(inst.k, &d),
        n_stat: n_statistic(&centres),
        cover,
        threshold,
        kept: kept.clone(),
        removed,
    };
    let disks = kept.iter().map(|&i| inst.disks[i].clone()).collect();
    Ok(KernelOutcome::Reduced(Instance { disks, ..inst.clone() }, report))
}

/// Groups disks whose radius-(d+1) halos are connected; two halos touching at a
/// single point count as connected, so distinct parts are more than `2d + 2` apart.
pub fn halo_partition(inst: &Instance, d: &Rational) -> Result<Vec<Vec<usize>>, KernelError> {
    rational_centres(inst)?;
    let refs: Vec<&Point> = inst.disks.iter().map(|d| &d.center).collect();
    let reach = Rational::from(2) * d + Rational::from(2);
    let rule = EdgeRule { threshold: reach.square(), inclusive: true };
    Ok(components(&build_graph_with(&refs, &rule, true)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shrunk {
    /// Image of every input centre, indexed like the input.
    pub centres: Vec<(Rational, Rational)>,
    /// Rational upper bound on the largest intra-part distance.
    pub m: Rational,
}

/// Translates part `i` (1-based) by `(-x_left + (i-1)(m+r), -y_bottom + (i-1)(m+r))`.
pub fn shrink_parts(centres: &[(Rational, Rational)], parts: &[Vec<usize>], r: &Rational) -> Shrunk {
    let max_d2 = parts
        .iter()
        .flat_map(|p| p.iter().flat_map(move |&a| p.iter().map(move |&b| (a, b))))
        .filter(|(a, b)| a < b)
        .map(|(a, b)| sq_dist(&centres[a], &centres[b]))
        .max()
        .unwrap_or_default();
    let m = move_radius_upper(&max_d2);
    let mut out = centres.to_vec();
    for (i, part) in parts.iter().enumerate() {
        let Some(x_left) = part.iter().map(|&v| &centres[v].0).min() else { continue };
        let y_bottom = part.iter().map(|&v| &centres[v].1).min().unwrap();
        let shift = Rational::from(i as i64) * (&m + r);
        for &v in part {
            out[v] = (&centres[v].0 - x_left + &shift, &centres[v].1 - y_bottom + &shift);
        }
    }
    Shrunk { centres: out, m }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullKernel {
    pub instance: Instance,
    /// `None` when kernelization alone decided the instance.
    pub report: Option<KernelReport>,
    pub parts: Vec<Vec<usize>>,
    pub m: Rational,
}

/// Two co-located disks with no budget: the smallest no-instance.
pub fn canonical_no_instance(like: &Instance) -> Instance {
    Instance::new(like.variant, 0, like.d2.clone(), vec![Disk::at(0, 0), Disk::at(0, 0)])
}

/// Kernelize, partition by halos, and shrink with `r = 2d + 2`.
pub fn full_kernel(inst: &Instance) -> Result<FullKernel, KernelError> {
    let (reduced, report) = match kernelize(inst)? {
        KernelOutcome::TriviallyNo => {
            return Ok(FullKernel {
                instance: canonical_no_instance(inst),
                report: None,
                parts: Vec::new(),
                m: Rational::zero(),
            })
        }
        KernelOutcome::Reduced(i, r) => (i, r),
    };
    let d = move_radius_upper(&inst.d2);
    let parts = halo_partition(&reduced, &d)?;
    let centres = rational_centres(&reduced)?;
    let r = Rational::from(2) * &d + Rational::from(2);
    let shrunk = shrink_parts(&centres, &parts, &r);
    let disks = shrunk.centres.into_iter().map(|(x, y)| Disk::new(Point::rational(x, y))).collect();
    Ok(FullKernel { instance: Instance { disks, ..reduced }, report: Some(report), parts, m: shrunk.m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Variant;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn inst(k: u64, d2: &str, c: &[(i64, i64)]) -> Instance {
        Instance::from_ints(Variant::Euclidean, k, q(d2), c)
    }

    #[test]
    fn kernelize_example() {
        let KernelOutcome::Reduced(out, rep) = kernelize(&inst(1, "1", &[(0, 0), (1, 0), (5, 0), (10, 0)])).unwrap()
        else {
            panic!("expected a kernel")
        };
        assert_eq!(rep.threshold, q("6"));
        assert_eq!(rep.cover, vec![0, 1]);
        assert_eq!((rep.kept, rep.removed), (vec![0, 1, 2], vec![3]));
        assert_eq!(out.disks.len(), 3);
    }

    #[test]
    fn kernelize_edge_cases() {
        let KernelOutcome::Reduced(out, _) = kernelize(&inst(2, "4", &[(0, 0), (5, 0)])).unwrap() else { panic!() };
        assert!(out.disks.is_empty());
        let all = inst(1, "1", &[(0, 0), (1, 0), (3, 0)]);
        let KernelOutcome::Reduced(out, _) = kernelize(&all).unwrap() else { panic!() };
        assert_eq!(out, all);
        assert_eq!(kernelize(&inst(0, "9", &[(0, 0), (1, 0)])).unwrap(), KernelOutcome::TriviallyNo);
    }

    #[test]
    fn size_bound_examples() {
        assert_eq!(size_bound(1, &q("1")), BigInt::from(130));
        assert_eq!(size_bound(0, &q("7")), BigInt::from(0));
    }

    #[test]
    fn shrink_examples() {
        let c = vec![(q("100"), q("100")), (q("500"), q("500"))];
        let s = shrink_parts(&c, &[vec![0], vec![1]], &q("4"));
        assert_eq!(s.m, q("0"));
        assert_eq!(s.centres, vec![(q("0"), q("0")), (q("4"), q("4"))]);
        let single = shrink_parts(&[(q("3"), q("9")), (q("5"), q("7"))], &[vec![0, 1]], &q("4"));
        assert_eq!(single.centres, vec![(q("0"), q("2")), (q("2"), q("0"))]);
    }

    #[test]
    fn halo_examples() {
        let d = q("1");
        assert_eq!(halo_partition(&inst(0, "1", &[(0, 0), (5, 0)]), &d).unwrap().len(), 2);
        assert_eq!(halo_partition(&inst(0, "1", &[(0, 0), (3, 0)]), &d).unwrap().len(), 1);
        assert_eq!(halo_partition(&inst(0, "1", &[(0, 0)]), &d).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn full_kernel_examples() {
        let triple = inst(1, "3", &[(0, 0), (1, 0), (2, 0)]);
        assert_eq!(full_kernel(&triple).unwrap().instance, triple);
        let two = inst(2, "1", &[(0, 0), (1, 0), (2, 0), (1000, 0), (1001, 0), (1002, 0)]);
        let fk = full_kernel(&two).unwrap();
        assert_eq!(fk.parts, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(fk.m, q("2"));
        let expect = inst(2, "1", &[(0, 0), (1, 0), (2, 0), (6, 6), (7, 6), (8, 6)]);
        assert_eq!(fk.instance, expect);
        assert_eq!(full_kernel(&inst(0, "1", &[])).unwrap().instance.disks.len(), 0);
        assert_eq!(full_kernel(&inst(0, "1", &[(0, 0), (0, 0)])).unwrap().instance.k, 0);
    }

    #[test]
    fn n_statistic_of_fractions() {
        assert_eq!(n_statistic(&[(q("7/3"), q("0"))]), BigInt::from(4));
        assert_eq!(n_statistic(&[(q("-1/2"), q("2"))]), BigInt::from(3));
    }
}
