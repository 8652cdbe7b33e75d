//! Smith and Hermite normal forms over ℤ with unimodular transforms.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

/// `left · A · right = diag(diagonal)` with `left`, `right` unimodular.
///
/// `diagonal` has length `min(rows, cols)`; the first `rank` entries are
/// positive and each divides the next, the rest are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The nonzero invariant factors.
    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.diagonal[..self.rank]
    }

    /// The diagonal as a `rows × cols` matrix.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut s = IntMatrix::zeros(self.left.rows(), self.right.cols());
        for (i, d) in self.diagonal.iter().enumerate() {
            s.set(i, i, d.clone());
        }
        s
    }
}

fn smallest_nonzero(a: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.rows() {
        for j in from..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(matrix: &IntMatrix) -> SmithForm {
    let (k, n) = (matrix.rows(), matrix.cols());
    let mut a = matrix.clone();
    let mut u = IntMatrix::identity(k);
    let mut v = IntMatrix::identity(n);
    let mut rank = 0;

    'outer: for t in 0..k.min(n) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&a, t) else {
                break 'outer;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = a.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..k {
                let q = a.get(i, t).div_floor(&pivot);
                if !q.is_zero() {
                    a.add_row_multiple(i, t, &-&q);
                    u.add_row_multiple(i, t, &-&q);
                }
                dirty |= !a.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = a.get(t, j).div_floor(&pivot);
                if !q.is_zero() {
                    a.add_col_multiple(j, t, &-&q);
                    v.add_col_multiple(j, t, &-&q);
                }
                dirty |= !a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }

            // Row and column are clear; the pivot must divide the remaining block.
            let offender = (t + 1..k).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }

    let diagonal = (0..k.min(n)).map(|i| a.get(i, i).clone()).collect();
    SmithForm {
        diagonal,
        left: u,
        right: v,
        rank,
    }
}

/// Row-style Hermite normal form: `transform · A = [basis; 0]`.
///
/// `basis` is the unique echelon basis of the row lattice of `A`: positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub basis: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn hermite_normal_form(matrix: &IntMatrix) -> HermiteForm {
    let (k, n) = (matrix.rows(), matrix.cols());
    let mut h = matrix.clone();
    let mut w = IntMatrix::identity(k);
    let mut r = 0;
    let mut pivots = Vec::new();

    for j in 0..n {
        if r == k {
            break;
        }
        loop {
            let best = (r..k)
                .filter(|&i| !h.get(i, j).is_zero())
                .min_by(|&x, &y| h.get(x, j).abs().cmp(&h.get(y, j).abs()));
            let Some(i) = best else { break };
            h.swap_rows(r, i);
            w.swap_rows(r, i);
            let pivot = h.get(r, j).clone();
            let mut done = true;
            for i in r + 1..k {
                let q = h.get(i, j).div_floor(&pivot);
                if !q.is_zero() {
                    h.add_row_multiple(i, r, &-&q);
                    w.add_row_multiple(i, r, &-&q);
                }
                done &= h.get(i, j).is_zero();
            }
            if done {
                break;
            }
        }
        if h.get(r, j).is_zero() {
            continue;
        }
        if h.get(r, j).is_negative() {
            h.negate_row(r);
            w.negate_row(r);
        }
        let pivot = h.get(r, j).clone();
        for i in 0..r {
            let q = h.get(i, j).div_floor(&pivot);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &-&q);
                w.add_row_multiple(i, r, &-&q);
            }
        }
        pivots.push(j);
        r += 1;
    }

    HermiteForm {
        basis: h.top_rows(r),
        transform: w,
        rank: r,
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn m(cols: usize, rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(cols, rows).unwrap()
    }

    fn check_smith(a: &IntMatrix) -> SmithForm {
        let s = smith_normal_form(a);
        let product = s.left.mul(a).unwrap().mul(&s.right).unwrap();
        assert_eq!(product, s.diagonal_matrix(), "U·A·V != S for {a:?}");
        assert_eq!(s.left.determinant().unwrap().abs(), BigInt::one());
        assert_eq!(s.right.determinant().unwrap().abs(), BigInt::one());
        for w in s.invariant_factors().windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        assert!(s.invariant_factors().iter().all(|x| x.is_positive()));
        assert!(s.diagonal[s.rank..].iter().all(Zero::is_zero));
        s
    }

    #[test]
    fn identity_is_its_own_smith_form() {
        let s = check_smith(&IntMatrix::identity(3));
        assert_eq!(s.diagonal, vec![BigInt::one(); 3]);
        assert_eq!(s.left, IntMatrix::identity(3));
        assert_eq!(s.right, IntMatrix::identity(3));
    }

    #[test]
    fn two_by_two_invariant_factors() {
        // gcd of entries 2, |det| = 8 → (2, 4)
        let s = check_smith(&m(2, &[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn degenerate_shapes() {
        let s = check_smith(&IntMatrix::zeros(0, 3));
        assert_eq!(s.rank, 0);
        let s = check_smith(&IntMatrix::zeros(2, 2));
        assert_eq!(s.rank, 0);
        let s = check_smith(&m(1, &[vec![4], vec![6]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2)]);
        let s = check_smith(&m(3, &[vec![2, 0, 0]]));
        assert_eq!(s.invariant_factors(), &[BigInt::from(2)]);
    }

    #[test]
    fn divisibility_needs_mixing() {
        // diag(2, 3) has Smith form diag(1, 6)
        let s = check_smith(&m(2, &[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn hermite_of_hermite_is_identity_transform() {
        let a = m(3, &[vec![4, 2, 6], vec![2, 2, 2], vec![6, 4, 8]]);
        let h = hermite_normal_form(&a);
        assert_eq!(h.rank, 2);
        let again = hermite_normal_form(&h.basis);
        assert_eq!(again.basis, h.basis);
        assert_eq!(again.transform, IntMatrix::identity(2));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (0usize..=4, 0usize..=4).prop_flat_map(|(k, n)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), k)
                .prop_map(move |rows| IntMatrix::from_rows(n, &rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn smith_round_trip(a in small_matrix()) {
            check_smith(&a);
        }

        #[test]
        fn hermite_is_canonical(a in small_matrix()) {
            let h = hermite_normal_form(&a);
            let wa = h.transform.mul(&a).unwrap();
            prop_assert_eq!(wa.top_rows(h.rank), h.basis.clone());
            for i in h.rank..a.rows() {
                prop_assert!(wa.is_zero_row(i));
            }
            prop_assert_eq!(h.transform.determinant().unwrap().abs(), BigInt::one());
            for (r, &j) in h.pivots.iter().enumerate() {
                let p = h.basis.get(r, j);
                prop_assert!(p.is_positive());
                for i in 0..r {
                    let x = h.basis.get(i, j);
                    prop_assert!(!x.is_negative() && x < p);
                }
            }
            // same lattice, different generators → same basis
            let shuffled = {
                let mut b = a.clone();
                if b.rows() >= 2 {
                    b.swap_rows(0, 1);
                    b.add_row_multiple(0, 1, &BigInt::from(3));
                }
                b
            };
            prop_assert_eq!(hermite_normal_form(&shuffled).basis, h.basis);
        }
    }
}
