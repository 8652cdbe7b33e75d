//! Rational points and closed cosets of the real torus `(ℝ/ℤ)^N`.
//!
//! A closed coset is carried as a congruence system `{x : A·x ≡ b (mod ℤ^k)}`.
//! The class is closed under intersection (stack the systems), which is what
//! the inclusion–exclusion counts in [`crate::torsion`] rely on.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::snf::{hermite_normal_form, smith_normal_form};

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// A rational point of `(ℝ/ℤ)^N`, stored with coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    coords: Vec<BigRational>,
    order: BigInt,
}

impl TorusPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        let coords: Vec<BigRational> = coords.iter().map(frac).collect();
        let order = coords.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        TorusPoint { coords, order }
    }

    pub fn origin(dim: usize) -> Self {
        TorusPoint {
            coords: alloc::vec![BigRational::zero(); dim],
            order: BigInt::one(),
        }
    }

    /// Point with coordinates `num_i / den_i`.
    pub fn from_ratios(ratios: &[(i64, i64)]) -> Self {
        Self::new(
            ratios
                .iter()
                .map(|&(n, d)| BigRational::new(n.into(), d.into()))
                .collect(),
        )
    }

    /// The `d`-torsion point `y / d`.
    pub fn torsion(numerators: &[u64], d: u64) -> Self {
        let d = BigInt::from(d);
        Self::new(
            numerators
                .iter()
                .map(|&y| BigRational::new(y.into(), d.clone()))
                .collect(),
        )
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Smallest positive `m` with `m·x ∈ ℤ^N`.
    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|c| -c).collect())
    }
}

/// `{x ∈ (ℝ/ℤ)^N : A·x ≡ b (mod ℤ^k)}` with `A` integral and `b` rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceCoset {
    ambient_dim: usize,
    matrix: IntMatrix,
    offset: Vec<BigRational>,
}

impl CongruenceCoset {
    pub fn new(ambient_dim: usize, matrix: IntMatrix, offset: Vec<BigRational>) -> Result<Self> {
        if matrix.cols() != ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: ambient_dim,
                found: matrix.cols(),
            });
        }
        if offset.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: offset.len(),
            });
        }
        Ok(CongruenceCoset {
            ambient_dim,
            matrix,
            offset,
        })
    }

    /// Convenience constructor from small integer rows and `(num, den)` offsets.
    pub fn from_rows(ambient_dim: usize, rows: &[Vec<i64>], offset: &[(i64, i64)]) -> Result<Self> {
        let matrix = IntMatrix::from_rows(ambient_dim, rows)?;
        let offset = offset
            .iter()
            .map(|&(n, d)| BigRational::new(n.into(), d.into()))
            .collect();
        Self::new(ambient_dim, matrix, offset)
    }

    /// The whole torus (no congruences).
    pub fn full(ambient_dim: usize) -> Self {
        CongruenceCoset {
            ambient_dim,
            matrix: IntMatrix::zeros(0, ambient_dim),
            offset: Vec::new(),
        }
    }

    /// The single point `p`.
    pub fn point(p: &TorusPoint) -> Self {
        CongruenceCoset {
            ambient_dim: p.dim(),
            matrix: IntMatrix::identity(p.dim()),
            offset: p.coords().to_vec(),
        }
    }

    /// The translate `p + T` of the closed subgroup `T = {x : A·x ≡ 0}`.
    pub fn translate_of(subgroup: &IntMatrix, p: &TorusPoint) -> Result<Self> {
        let offset = subgroup.mul_rat_vec(p.coords())?;
        Self::new(p.dim(), subgroup.clone(), offset)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[BigRational] {
        &self.offset
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.ambient_dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Stacked system; as a set this is the intersection.
    pub fn intersect(&self, other: &CongruenceCoset) -> Result<CongruenceCoset> {
        self.check_dim(other.ambient_dim)?;
        let matrix = self.matrix.stack(&other.matrix)?;
        let mut offset = self.offset.clone();
        offset.extend_from_slice(&other.offset);
        Ok(CongruenceCoset {
            ambient_dim: self.ambient_dim,
            matrix,
            offset,
        })
    }

    pub fn contains(&self, x: &TorusPoint) -> Result<bool> {
        self.check_dim(x.dim())?;
        // With L = order(x), y = L·x is integral and the test is
        // v·(A·y)_i ≡ L·u (mod L·v) for b_i = u/v.
        let l = x.order();
        let y: Vec<BigInt> = x.coords().iter().map(|c| c.numer() * (l / c.denom())).collect();
        let ay = self.matrix.mul_int_vec(&y)?;
        Ok(ay.iter().zip(&self.offset).all(|(a, b)| {
            let (u, v) = (b.numer(), b.denom());
            (a * v - l * u).is_multiple_of(&(l * v))
        }))
    }

    /// Image under `x ↦ −x`.
    pub fn negated(&self) -> CongruenceCoset {
        CongruenceCoset {
            ambient_dim: self.ambient_dim,
            matrix: self.matrix.clone(),
            offset: self.offset.iter().map(|b| frac(&-b)).collect(),
        }
    }

    /// Canonical form, or `None` when the system has no real solution.
    ///
    /// The row lattice of `A` is replaced by its Hermite basis `H` (the row
    /// lattice is the annihilator of the underlying subgroup, so it is an
    /// invariant of the set) and `b` is carried along and reduced mod ℤ.
    pub fn normalize(&self) -> Option<NormalizedCoset> {
        let hnf = hermite_normal_form(&self.matrix);
        let moved = hnf.transform.mul_rat_vec(&self.offset).expect("transform is k×k");
        if moved[hnf.rank..].iter().any(|b| !b.is_integer()) {
            return None;
        }
        let offset: Vec<BigRational> = moved[..hnf.rank].iter().map(frac).collect();
        Some(NormalizedCoset::from_canonical(self.ambient_dim, hnf.basis, offset))
    }

    /// Whether `self ⊆ other` as sets (an empty `self` is contained in anything).
    pub fn is_subset_of(&self, other: &CongruenceCoset) -> Result<bool> {
        let both = self.intersect(other)?;
        Ok(match (self.normalize(), both.normalize()) {
            (None, _) => true,
            (Some(a), Some(b)) => a == b,
            (Some(_), None) => false,
        })
    }
}

/// A nonempty coset in canonical form.
///
/// `matrix` is the Hermite basis of the annihilator lattice (full row rank
/// `r`), `offset` lies in `[0,1)^r`. The Smith data of `matrix` is cached for
/// torsion counting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalizedCoset {
    ambient_dim: usize,
    matrix: IntMatrix,
    offset: Vec<BigRational>,
    invariant_factors: Vec<BigInt>,
    /// `U·b` where `U·H·V = S`.
    smith_offset: Vec<BigRational>,
    component_count: BigInt,
    witness: TorusPoint,
}

impl NormalizedCoset {
    fn from_canonical(ambient_dim: usize, matrix: IntMatrix, offset: Vec<BigRational>) -> Self {
        let smith = smith_normal_form(&matrix);
        debug_assert_eq!(smith.rank, matrix.rows());
        let smith_offset = smith.left.mul_rat_vec(&offset).expect("U is r×r");
        let invariant_factors = smith.invariant_factors().to_vec();
        let mut y = alloc::vec![BigRational::zero(); ambient_dim];
        for (i, s) in invariant_factors.iter().enumerate() {
            y[i] = &smith_offset[i] / BigRational::from_integer(s.clone());
        }
        let witness = TorusPoint::new(smith.right.mul_rat_vec(&y).expect("V is N×N"));
        let component_count = invariant_factors.iter().product();
        NormalizedCoset {
            ambient_dim,
            matrix,
            offset,
            invariant_factors,
            smith_offset,
            component_count,
            witness,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    /// Real dimension `N − rank(A)`.
    pub fn dimension(&self) -> usize {
        self.ambient_dim - self.rank()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[BigRational] {
        &self.offset
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    /// Number of connected components (product of the invariant factors).
    pub fn component_count(&self) -> &BigInt {
        &self.component_count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count.is_one()
    }

    /// A point of the coset; for a connected coset its order is the least
    /// order of any point in the coset.
    pub fn witness(&self) -> &TorusPoint {
        &self.witness
    }

    pub fn to_coset(&self) -> CongruenceCoset {
        CongruenceCoset {
            ambient_dim: self.ambient_dim,
            matrix: self.matrix.clone(),
            offset: self.offset.clone(),
        }
    }

    /// Number of `d`-torsion points, from the cached diagonal system.
    ///
    /// Writing `x = y/d` the system becomes `s_i z_i ≡ d·(Ub)_i (mod d)` in
    /// Smith coordinates; each row has `gcd(s_i, d)` solutions when solvable
    /// and the `N − r` free coordinates contribute `d` each.
    pub fn torsion_count(&self, d: u64) -> BigInt {
        let dd = BigInt::from(d);
        let mut count = BigInt::one();
        for (s, ub) in self.invariant_factors.iter().zip(&self.smith_offset) {
            let target = ub * BigRational::from_integer(dd.clone());
            if !target.is_integer() {
                return BigInt::zero();
            }
            let g = s.gcd(&dd);
            if !target.to_integer().is_multiple_of(&g) {
                return BigInt::zero();
            }
            count *= g;
        }
        count * num_traits::pow(dd, self.dimension())
    }

    /// Least `L` such that the count at every multiple `k·L` is exactly
    /// `component_count · (kL)^dim`.
    pub fn period(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .zip(&self.smith_offset)
            .fold(BigInt::one(), |acc, (s, ub)| {
                let shifted = ub / BigRational::from_integer(s.clone());
                acc.lcm(s).lcm(shifted.denom())
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn points_reduce_into_unit_cube() {
        let p = TorusPoint::from_ratios(&[(-1, 3), (5, 2), (4, 1)]);
        assert_eq!(p.coords(), &[q(2, 3), q(1, 2), q(0, 1)]);
        assert_eq!(p.order(), &BigInt::from(6));
        assert!(TorusPoint::origin(3).is_origin());
        assert_eq!(p.neg().coords(), &[q(1, 3), q(1, 2), q(0, 1)]);
    }

    #[test]
    fn full_torus_normalizes_to_itself() {
        let c = CongruenceCoset::full(2).normalize().unwrap();
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.component_count(), &BigInt::one());
        assert_eq!(c.witness(), &TorusPoint::origin(2));
    }

    #[test]
    fn single_point_coset() {
        let c = CongruenceCoset::from_rows(2, &[vec![1, 0], vec![0, 1]], &[(1, 3), (0, 1)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(c.dimension(), 0);
        assert_eq!(c.component_count(), &BigInt::one());
        assert_eq!(c.witness(), &TorusPoint::from_ratios(&[(1, 3), (0, 1)]));
    }

    #[test]
    fn doubled_line_has_two_components() {
        // 2x₁ ≡ 1/2 → x₁ ∈ {1/4, 3/4}
        let raw = CongruenceCoset::from_rows(2, &[vec![2, 0]], &[(1, 2)]).unwrap();
        let c = raw.normalize().unwrap();
        assert_eq!(c.dimension(), 1);
        assert_eq!(c.component_count(), &BigInt::from(2));
        let w = c.witness();
        assert!(w.coords()[0] == q(1, 4) || w.coords()[0] == q(3, 4));
        assert!(raw.contains(w).unwrap());
        assert!(raw.contains(&TorusPoint::from_ratios(&[(1, 4), (2, 7)])).unwrap());
        assert!(raw.contains(&TorusPoint::from_ratios(&[(3, 4), (0, 1)])).unwrap());
        assert!(!raw.contains(&TorusPoint::from_ratios(&[(1, 2), (0, 1)])).unwrap());
    }

    #[test]
    fn offset_length_checked() {
        let err = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 0 });
        let err = CongruenceCoset::new(3, IntMatrix::zeros(0, 2), vec![]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn intersections() {
        let c = CongruenceCoset::from_rows(2, &[vec![1, 1]], &[(1, 5)]).unwrap();
        let full = CongruenceCoset::full(2);
        assert_eq!(c.intersect(&full).unwrap().normalize(), c.normalize());

        let x1 = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(0, 1)]).unwrap();
        let x2 = CongruenceCoset::from_rows(2, &[vec![0, 1]], &[(0, 1)]).unwrap();
        let origin = x1.intersect(&x2).unwrap().normalize().unwrap();
        assert_eq!(origin.dimension(), 0);
        assert!(origin.witness().is_origin());

        let third = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(1, 3)]).unwrap();
        assert!(third.intersect(&x1).unwrap().normalize().is_none());

        let other = CongruenceCoset::full(3);
        assert!(c.intersect(&other).is_err());
    }

    #[test]
    fn containment() {
        let full = CongruenceCoset::full(2);
        assert!(full.contains(&TorusPoint::from_ratios(&[(3, 7), (1, 9)])).unwrap());
        let pt = CongruenceCoset::point(&TorusPoint::from_ratios(&[(1, 3), (0, 1)]));
        assert!(pt.contains(&TorusPoint::from_ratios(&[(1, 3), (0, 1)])).unwrap());
        assert!(!pt.contains(&TorusPoint::from_ratios(&[(2, 3), (0, 1)])).unwrap());
        assert!(pt.contains(&TorusPoint::origin(3)).is_err());
    }

    #[test]
    fn subset_relation() {
        let line = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(0, 1)]).unwrap();
        let origin = CongruenceCoset::point(&TorusPoint::origin(2));
        assert!(origin.is_subset_of(&line).unwrap());
        assert!(!line.is_subset_of(&origin).unwrap());
        assert!(line.is_subset_of(&CongruenceCoset::full(2)).unwrap());
    }

    #[test]
    fn torsion_count_of_translated_line() {
        // x₁ ≡ 1/3: d-torsion exists iff 3 | d, then d points
        let c = CongruenceCoset::from_rows(2, &[vec![1, 0]], &[(1, 3)])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(c.torsion_count(3), BigInt::from(3));
        assert_eq!(c.torsion_count(6), BigInt::from(6));
        assert_eq!(c.torsion_count(4), BigInt::zero());
        assert_eq!(c.period(), BigInt::from(3));
    }

    pub(crate) fn coset_strategy(max_dim: usize) -> impl Strategy<Value = CongruenceCoset> {
        (1usize..=max_dim, 0usize..=3).prop_flat_map(|(n, k)| {
            (
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), k),
                proptest::collection::vec((0i64..6, 1i64..=6), k),
            )
                .prop_map(move |(rows, offs)| CongruenceCoset::from_rows(n, &rows, &offs).unwrap())
        })
    }

    fn point_strategy(n: usize) -> impl Strategy<Value = TorusPoint> {
        proptest::collection::vec((0i64..12, 1i64..=12), n).prop_map(|v| TorusPoint::from_ratios(&v))
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(c in coset_strategy(4)) {
            if let Some(nc) = c.normalize() {
                prop_assert_eq!(nc.to_coset().normalize(), Some(nc.clone()));
                prop_assert!(c.contains(nc.witness()).unwrap());
                let expected: BigInt = nc.invariant_factors().iter().filter(|s| !s.is_one()).product();
                prop_assert_eq!(nc.component_count(), &expected);
            }
        }

        #[test]
        fn intersection_membership_agrees(
            (c1, c2, x) in (1usize..=4).prop_flat_map(|n| {
                let c = (
                    proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), 0..=2),
                    proptest::collection::vec((0i64..6, 1i64..=6), 2),
                ).prop_map(move |(rows, offs)| {
                    CongruenceCoset::from_rows(n, &rows, &offs[..rows.len()]).unwrap()
                });
                (c.clone(), c, point_strategy(n))
            })
        ) {
            let both = c1.intersect(&c2).unwrap();
            prop_assert_eq!(both.contains(&x).unwrap(), c1.contains(&x).unwrap() && c2.contains(&x).unwrap());
            if let Some(nb) = both.normalize() {
                let d1 = c1.normalize().unwrap().dimension();
                let d2 = c2.normalize().unwrap().dimension();
                prop_assert!(nb.dimension() <= d1.min(d2));
            }
        }
    }
}
