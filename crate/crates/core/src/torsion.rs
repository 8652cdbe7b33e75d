//! Exact counts of `d`-torsion points on cosets and finite unions of cosets.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::snf::smith_normal_form;
use crate::torus::{CongruenceCoset, NormalizedCoset, TorusPoint};

/// Resource limits for the exponential parts of the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of components in one inclusion–exclusion.
    pub component_budget: usize,
    /// Maximum `d^N` for brute-force enumeration.
    pub enumeration_cap: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            component_budget: 12,
            enumeration_cap: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionCount {
    pub d: u64,
    pub value: BigInt,
}

/// `|{y ∈ (ℤ/d)^N : A·y ≡ c (mod d)}|`.
pub fn count_solutions_mod(a: &IntMatrix, c: &[BigInt], d: u64) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::ZeroModulus);
    }
    if c.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: c.len(),
        });
    }
    let dd = BigInt::from(d);
    let smith = smith_normal_form(a);
    let uc = smith.left.mul_int_vec(c)?;
    let (k, n) = (a.rows(), a.cols());
    let mut count = BigInt::one();
    for (i, target) in uc.iter().enumerate() {
        if i < n {
            let g = smith.diagonal[i].gcd(&dd);
            if !target.is_multiple_of(&g) {
                return Ok(BigInt::zero());
            }
            count *= g;
        } else if !target.is_multiple_of(&dd) {
            return Ok(BigInt::zero());
        }
    }
    Ok(count * num_traits::pow(dd, n.saturating_sub(k)))
}

/// `d·b` as integers, or `None` when some entry is not integral.
fn scaled_offset(coset: &CongruenceCoset, d: u64) -> Option<Vec<BigInt>> {
    let dd = BigRational::from_integer(BigInt::from(d));
    coset
        .offset()
        .iter()
        .map(|b| {
            let x = b * &dd;
            x.is_integer().then(|| x.to_integer())
        })
        .collect()
}

/// Number of `d`-torsion points of a coset.
pub fn coset_torsion_count(coset: &CongruenceCoset, d: u64) -> Result<TorsionCount> {
    if d == 0 {
        return Err(Error::ZeroModulus);
    }
    let value = match scaled_offset(coset, d) {
        None => BigInt::zero(),
        Some(c) => count_solutions_mod(coset.matrix(), &c, d)?,
    };
    Ok(TorsionCount { d, value })
}

/// Inclusion–exclusion terms for a union of cosets, reusable across `d`.
///
/// Every nonempty subset with a nonempty intersection contributes one signed
/// normalized coset. Subsets are walked depth first so that an empty
/// intersection prunes all of its supersets.
#[derive(Clone, Debug)]
pub struct PreparedUnion {
    ambient_dim: usize,
    terms: Vec<(bool, NormalizedCoset)>,
    max_dim: Option<usize>,
    components: usize,
}

impl PreparedUnion {
    pub fn new(ambient_dim: usize, components: &[CongruenceCoset], limits: &Limits) -> Result<Self> {
        if components.len() > limits.component_budget {
            return Err(Error::ComponentBudgetExceeded {
                components: components.len(),
                budget: limits.component_budget,
            });
        }
        for c in components {
            if c.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: c.ambient_dim(),
                });
            }
        }
        let mut terms = Vec::new();
        let mut stack: Vec<(usize, bool, NormalizedCoset)> = Vec::new();
        for (i, c) in components.iter().enumerate() {
            if let Some(nc) = c.normalize() {
                stack.push((i, true, nc));
            }
        }
        let max_dim = stack.iter().map(|(_, _, nc)| nc.dimension()).max();
        while let Some((last, positive, nc)) = stack.pop() {
            for (j, c) in components.iter().enumerate().skip(last + 1) {
                let both = nc.to_coset().intersect(c)?;
                if let Some(next) = both.normalize() {
                    stack.push((j, !positive, next));
                }
            }
            terms.push((positive, nc));
        }
        Ok(PreparedUnion {
            ambient_dim,
            terms,
            max_dim,
            components: components.len(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of inclusion–exclusion terms that survived pruning.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Largest dimension of a nonempty component, `None` for an empty union.
    pub fn max_dim(&self) -> Option<usize> {
        self.max_dim
    }

    pub fn count(&self, d: u64) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut total = BigInt::zero();
        for (positive, nc) in &self.terms {
            let c = nc.torsion_count(d);
            if *positive {
                total += c;
            } else {
                total -= c;
            }
        }
        debug_assert!(!total.is_negative());
        Ok(total)
    }

    /// `L` such that the count is a polynomial in `k` along `d = k·L`.
    pub fn period(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, nc)| acc.lcm(&nc.period()))
    }

    /// The signed normalized intersections, positive sign first in each pair.
    pub fn terms(&self) -> impl Iterator<Item = (bool, &NormalizedCoset)> {
        self.terms.iter().map(|(s, nc)| (*s, nc))
    }
}

/// `|S_d ∩ (C_1 ∪ … ∪ C_r)|` by inclusion–exclusion.
pub fn union_torsion_count(components: &[CongruenceCoset], d: u64, limits: &Limits) -> Result<BigInt> {
    let Some(first) = components.first() else {
        if d == 0 {
            return Err(Error::ZeroModulus);
        }
        return Ok(BigInt::zero());
    };
    PreparedUnion::new(first.ambient_dim(), components, limits)?.count(d)
}

fn check_cap(d: u64, dim: usize, limits: &Limits) -> Result<()> {
    if d == 0 {
        return Err(Error::ZeroModulus);
    }
    let total = u32::try_from(dim).ok().and_then(|e| d.checked_pow(e));
    match total {
        Some(t) if t <= limits.enumeration_cap => Ok(()),
        _ => Err(Error::CapExceeded {
            modulus: d,
            dim,
            cap: limits.enumeration_cap,
        }),
    }
}

/// The system `A·y ≡ d·b (mod d)` reduced to machine residues.
struct ResidueSystem {
    rows: Vec<Vec<u64>>,
    rhs: Vec<u64>,
    d: u64,
}

impl ResidueSystem {
    fn new(coset: &CongruenceCoset, d: u64) -> Option<Self> {
        let c = scaled_offset(coset, d)?;
        let dd = BigInt::from(d);
        let residue = |x: &BigInt| x.mod_floor(&dd).to_u64().expect("residue below d");
        let a = coset.matrix();
        Some(ResidueSystem {
            rows: (0..a.rows()).map(|i| a.row(i).iter().map(residue).collect()).collect(),
            rhs: c.iter().map(residue).collect(),
            d,
        })
    }

    fn holds(&self, y: &[u64]) -> bool {
        let d = u128::from(self.d);
        self.rows.iter().zip(&self.rhs).all(|(row, &r)| {
            let s = row
                .iter()
                .zip(y)
                .fold(0u128, |acc, (&a, &x)| (acc + u128::from(a) * u128::from(x)) % d);
            s == u128::from(r)
        })
    }
}

/// Odometer over `(ℤ/d)^N` in lexicographic order.
fn for_each_residue(dim: usize, d: u64, mut f: impl FnMut(&[u64])) {
    let mut y = alloc::vec![0u64; dim];
    loop {
        f(&y);
        let mut i = dim;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            y[i] += 1;
            if y[i] < d {
                break;
            }
            y[i] = 0;
        }
    }
}

/// All `d`-torsion points of a coset, lexicographic in the numerators.
pub fn enumerate_torsion(coset: &CongruenceCoset, d: u64, limits: &Limits) -> Result<Vec<TorusPoint>> {
    enumerate_union_torsion(coset.ambient_dim(), core::slice::from_ref(coset), d, limits)
}

/// All `d`-torsion points lying on at least one of the cosets.
pub fn enumerate_union_torsion(
    ambient_dim: usize,
    components: &[CongruenceCoset],
    d: u64,
    limits: &Limits,
) -> Result<Vec<TorusPoint>> {
    check_cap(d, ambient_dim, limits)?;
    for c in components {
        if c.ambient_dim() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: c.ambient_dim(),
            });
        }
    }
    let systems: Vec<ResidueSystem> = components.iter().filter_map(|c| ResidueSystem::new(c, d)).collect();
    let mut out = Vec::new();
    if systems.is_empty() {
        return Ok(out);
    }
    for_each_residue(ambient_dim, d, |y| {
        if systems.iter().any(|s| s.holds(y)) {
            out.push(TorusPoint::torsion(y, d));
        }
    });
    Ok(out)
}

/// Every point of `S_d = (1/d)ℤ^N / ℤ^N`.
pub fn all_torsion_points(dim: usize, d: u64, limits: &Limits) -> Result<Vec<TorusPoint>> {
    enumerate_torsion(&CongruenceCoset::full(dim), d, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn m(cols: usize, rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(cols, rows).unwrap()
    }

    #[test]
    fn solutions_mod_examples() {
        assert_eq!(count_solutions_mod(&IntMatrix::zeros(0, 2), &[], 5).unwrap(), big(25));
        assert_eq!(count_solutions_mod(&m(2, &[vec![0, 1]]), &[big(0)], 3).unwrap(), big(3));
        assert_eq!(count_solutions_mod(&m(2, &[vec![2, 0]]), &[big(1)], 4).unwrap(), big(0));
        assert_eq!(count_solutions_mod(&m(2, &[vec![2, 0]]), &[big(2)], 4).unwrap(), big(8));
        assert_eq!(
            count_solutions_mod(&m(2, &[vec![2, 0]]), &[], 4).unwrap_err(),
            Error::DimensionMismatch { expected: 1, found: 0 }
        );
        assert_eq!(
            count_solutions_mod(&m(1, &[vec![1]]), &[big(0)], 0).unwrap_err(),
            Error::ZeroModulus
        );
    }

    #[test]
    fn more_rows_than_columns() {
        // y ≡ 1, 2y ≡ 2, 3y ≡ 1 (mod 4): third row forces 3 ≡ 1
        let a = m(1, &[vec![1], vec![2], vec![3]]);
        assert_eq!(count_solutions_mod(&a, &[big(1), big(2), big(3)], 4).unwrap(), big(1));
        assert_eq!(count_solutions_mod(&a, &[big(1), big(2), big(1)], 4).unwrap(), big(0));
    }

    #[test]
    fn coset_counts() {
        let full = CongruenceCoset::full(2);
        assert_eq!(coset_torsion_count(&full, 5).unwrap().value, big(25));
        let pt = CongruenceCoset::point(&TorusPoint::from_ratios(&[(1, 3), (0, 1)]));
        assert_eq!(coset_torsion_count(&pt, 6).unwrap().value, big(1));
        assert_eq!(coset_torsion_count(&pt, 4).unwrap().value, big(0));
        let c = CongruenceCoset::from_rows(
            4,
            &[vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
            &[(1, 2), (0, 1), (0, 1)],
        )
        .unwrap();
        assert_eq!(coset_torsion_count(&c, 2).unwrap().value, big(2));
    }

    #[test]
    fn union_counts() {
        let lim = Limits::default();
        let l1 = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(0, 1)]).unwrap();
        let l2 = CongruenceCoset::from_rows(2, &[vec![0, 1]], &[(0, 1)]).unwrap();
        assert_eq!(union_torsion_count(std::slice::from_ref(&l1), 3, &lim).unwrap(), big(3));
        assert_eq!(union_torsion_count(&[l1, l2], 3, &lim).unwrap(), big(5));
        let pts: Vec<_> = [(1, 2), (1, 3), (2, 3), (0, 1)]
            .iter()
            .map(|&r| CongruenceCoset::point(&TorusPoint::from_ratios(&[r])))
            .collect();
        assert_eq!(union_torsion_count(&pts, 6, &lim).unwrap(), big(4));
        assert_eq!(union_torsion_count(&[], 6, &lim).unwrap(), big(0));
    }

    #[test]
    fn budget_enforced() {
        let lim = Limits {
            component_budget: 2,
            ..Limits::default()
        };
        let pts: Vec<_> = (0..3)
            .map(|i| CongruenceCoset::point(&TorusPoint::from_ratios(&[(i, 3)])))
            .collect();
        assert_eq!(
            union_torsion_count(&pts, 3, &lim).unwrap_err(),
            Error::ComponentBudgetExceeded {
                components: 3,
                budget: 2
            }
        );
    }

    #[test]
    fn duplicate_components_counted_once() {
        let lim = Limits::default();
        let c = CongruenceCoset::from_rows(2, &[vec![1, 1]], &[(1, 2)]).unwrap();
        let many = vec![c.clone(); 6];
        assert_eq!(
            union_torsion_count(&many, 4, &lim).unwrap(),
            coset_torsion_count(&c, 4).unwrap().value
        );
    }

    #[test]
    fn enumeration_examples() {
        let lim = Limits::default();
        assert_eq!(all_torsion_points(2, 2, &lim).unwrap().len(), 4);
        let c = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(1, 2)]).unwrap();
        let pts = enumerate_torsion(&c, 2, &lim).unwrap();
        assert_eq!(
            pts,
            vec![
                TorusPoint::from_ratios(&[(1, 2), (0, 1)]),
                TorusPoint::from_ratios(&[(1, 2), (1, 2)])
            ]
        );
        let small = Limits {
            enumeration_cap: 100,
            ..lim
        };
        assert_eq!(
            all_torsion_points(3, 5, &small).unwrap_err(),
            Error::CapExceeded {
                modulus: 5,
                dim: 3,
                cap: 100
            }
        );
        assert_eq!(all_torsion_points(0, 5, &lim).unwrap(), vec![TorusPoint::origin(0)]);
    }

    fn coset_in(n: usize) -> impl Strategy<Value = CongruenceCoset> {
        (0usize..=3).prop_flat_map(move |k| {
            (
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), k),
                proptest::collection::vec((0i64..6, 1i64..=6), k),
            )
                .prop_map(move |(rows, offs)| CongruenceCoset::from_rows(n, &rows, &offs).unwrap())
        })
    }

    fn union_case() -> impl Strategy<Value = (usize, Vec<CongruenceCoset>, u64)> {
        (1usize..=3).prop_flat_map(|n| (Just(n), proptest::collection::vec(coset_in(n), 0..=4), 1u64..=6))
    }

    proptest! {
        #[test]
        fn union_matches_enumeration((n, cs, d) in union_case()) {
            let lim = Limits::default();
            let brute = enumerate_union_torsion(n, &cs, d, &lim).unwrap();
            prop_assert_eq!(union_torsion_count(&cs, d, &lim).unwrap(), BigInt::from(brute.len()));
            for c in &cs {
                let count = coset_torsion_count(c, d).unwrap().value;
                prop_assert_eq!(count.clone(), BigInt::from(enumerate_torsion(c, d, &lim).unwrap().len()));
                if let Some(nc) = c.normalize() {
                    prop_assert_eq!(nc.torsion_count(d), count);
                }
            }
        }

        #[test]
        fn counts_grow_along_divisibility((_, cs, d) in union_case(), e in 1u64..=4) {
            let lim = Limits::default();
            let a = union_torsion_count(&cs, d, &lim).unwrap();
            let b = union_torsion_count(&cs, d * e, &lim).unwrap();
            prop_assert!(a <= b);
        }

        #[test]
        fn union_upper_bound((n, cs, d) in union_case()) {
            let lim = Limits::default();
            let prepared = PreparedUnion::new(n, &cs, &lim).unwrap();
            let count = prepared.count(d).unwrap();
            match prepared.max_dim() {
                None => prop_assert!(count.is_zero()),
                Some(dim) => {
                    let comps: BigInt = cs.iter()
                        .filter_map(|c| c.normalize())
                        .map(|nc| nc.component_count().clone())
                        .sum();
                    let bound = comps * num_traits::pow(BigInt::from(d), dim);
                    prop_assert!(count <= bound);
                }
            }
        }

        #[test]
        fn connected_lemma_law(c in coset_in(4), d in 1u64..=12) {
            if let Some(nc) = c.normalize() {
                if nc.is_connected() {
                    let count = nc.torsion_count(d);
                    let full = num_traits::pow(BigInt::from(d), nc.dimension());
                    let divides = BigInt::from(d).is_multiple_of(nc.witness().order());
                    prop_assert_eq!(count, if divides { full } else { BigInt::zero() });
                }
            }
        }

        #[test]
        fn counts_polynomial_along_period(c in coset_in(3), k in 1u64..=3) {
            if let Some(nc) = c.normalize() {
                let l = nc.period().to_u64().unwrap();
                let d = l * k;
                let expected = nc.component_count() * num_traits::pow(BigInt::from(d), nc.dimension());
                prop_assert_eq!(nc.torsion_count(d), expected);
            }
        }
    }
}
