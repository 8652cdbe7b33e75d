//! Invariants of the covers `X_d → X` pulled back from multiplication by `d`
//! on the Albanese torus.
//!
//! Every invariant is a sum of ranks over the `d`-torsion subgroup
//! `S_d ⊂ Pic⁰`, evaluated as `generic · d^{2g}` plus one union count per
//! jump threshold.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{RankFunction, VarietyModel};
use crate::torsion::{Limits, PreparedUnion};

/// A rank function ready for repeated evaluation over `S_d`.
#[derive(Clone, Debug)]
pub struct PreparedRank {
    ambient_dim: usize,
    generic: u64,
    /// `(v_j − v_{j−1}, union of strata with value ≥ v_j)`.
    levels: Vec<(u64, PreparedUnion)>,
}

impl PreparedRank {
    pub fn new(rf: &RankFunction, limits: &Limits) -> Result<Self> {
        let generic = rf.effective_generic();
        let mut levels = Vec::new();
        let mut prev = generic;
        for t in rf.thresholds() {
            let union = PreparedUnion::new(rf.ambient_dim(), &rf.level_set(t), limits)?;
            levels.push((t - prev, union));
            prev = t;
        }
        Ok(PreparedRank {
            ambient_dim: rf.ambient_dim(),
            generic,
            levels,
        })
    }

    /// `Σ_{α ∈ S_d} rank(α)`.
    pub fn sum_over_torsion(&self, d: u64) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut total = BigInt::from(self.generic) * num_traits::pow(BigInt::from(d), self.ambient_dim);
        for (step, union) in &self.levels {
            total += BigInt::from(*step) * union.count(d)?;
        }
        Ok(total)
    }

    /// `L` such that the sum is a polynomial in `k` along `d = k·L`.
    pub fn period(&self) -> BigInt {
        use num_integer::Integer;
        self.levels
            .iter()
            .fold(BigInt::one(), |acc, (_, u)| acc.lcm(&u.period()))
    }

    pub fn generic(&self) -> u64 {
        self.generic
    }
}

/// `h^i(X_d, F_d) = Σ_{α ∈ S_d} h^i(X, F ⊗ α)`.
pub fn sheaf_rank_on_cover(rf: &RankFunction, d: u64, limits: &Limits) -> Result<BigInt> {
    PreparedRank::new(rf, limits)?.sum_over_torsion(d)
}

fn alternate(q: usize, x: BigInt) -> BigInt {
    if q.is_multiple_of(2) {
        x
    } else {
        -x
    }
}

/// `χ(F) = Σ_i (−1)^i h^i(X, F ⊗ α)` for generic `α`.
pub fn euler_char(ranks: &[RankFunction]) -> BigInt {
    ranks
        .iter()
        .enumerate()
        .map(|(i, rf)| alternate(i, BigInt::from(rf.effective_generic())))
        .sum()
}

/// `χ(Ω^p)`.
pub fn chi_omega(model: &VarietyModel, p: usize) -> BigInt {
    (0..=model.n)
        .map(|q| alternate(q, BigInt::from(model.hodge(p, q).effective_generic())))
        .sum()
}

/// `χ_top = (−1)^n Σ_p (−1)^{n−p} χ(Ω^p)`.
pub fn chi_top(model: &VarietyModel) -> BigInt {
    (0..=model.n).map(|p| alternate(p, chi_omega(model, p))).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Invariant {
    Hodge { p: usize, q: usize },
    Betti(usize),
    Irregularity,
    Plurigenus(u32),
    Sheaf { name: String, degree: usize },
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::Hodge { p, q } => write!(f, "h{p}{q}"),
            Invariant::Betti(k) => write!(f, "b{k}"),
            Invariant::Irregularity => f.write_str("q"),
            Invariant::Plurigenus(m) => write!(f, "P{m}"),
            Invariant::Sheaf { name, degree } => write!(f, "h{degree}({name})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    /// The normalized sequence converges to the value.
    ExactLimit,
    /// The locus is proper, so the normalized sequence is squeezed to zero.
    UpperBoundZero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitValue {
    pub value: BigRational,
    pub kind: LimitKind,
}

impl LimitValue {
    fn from_generic(v: BigInt) -> Self {
        let kind = if v.is_zero() {
            LimitKind::UpperBoundZero
        } else {
            LimitKind::ExactLimit
        };
        LimitValue {
            value: BigRational::from_integer(v),
            kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInvariants {
    pub d: u64,
    pub deg: BigInt,
    /// `hodge[p][q] = h^{p,q}(X_d)`.
    pub hodge: Vec<Vec<BigInt>>,
    pub betti: Vec<BigInt>,
    pub q: BigInt,
    pub pluri: BTreeMap<u32, BigInt>,
    /// `χ(Ω^p_{X_d})`.
    pub chi_p: Vec<BigInt>,
    pub chi_top: BigInt,
}

/// A model with every rank function prepared for evaluation along the tower.
#[derive(Clone, Debug)]
pub struct Tower {
    model: VarietyModel,
    limits: Limits,
    hodge: Vec<PreparedRank>,
    sheaves: BTreeMap<String, Vec<PreparedRank>>,
    pluri: BTreeMap<u32, PreparedRank>,
}

impl Tower {
    pub fn new(model: &VarietyModel, limits: Limits) -> Result<Self> {
        let hodge = model
            .hodge
            .iter()
            .map(|rf| PreparedRank::new(rf, &limits))
            .collect::<Result<_>>()?;
        let mut sheaves = BTreeMap::new();
        for s in &model.sheaves {
            let ranks = s
                .ranks
                .iter()
                .map(|rf| PreparedRank::new(rf, &limits))
                .collect::<Result<_>>()?;
            sheaves.insert(s.name.clone(), ranks);
        }
        let mut pluri = BTreeMap::new();
        if let Some(data) = &model.pluri {
            for &m in data.values.keys() {
                let rf = data.rank_for(model.g, m)?;
                pluri.insert(m, PreparedRank::new(&rf, &limits)?);
            }
        }
        Ok(Tower {
            model: model.clone(),
            limits,
            hodge,
            sheaves,
            pluri,
        })
    }

    pub fn model(&self) -> &VarietyModel {
        &self.model
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// `deg φ_d = d^{2g}`.
    pub fn degree(&self, d: u64) -> BigInt {
        num_traits::pow(BigInt::from(d), self.model.ambient_dim())
    }

    pub fn prepared_hodge(&self, p: usize, q: usize) -> &PreparedRank {
        &self.hodge[p * (self.model.n + 1) + q]
    }

    pub fn hodge_number(&self, p: usize, q: usize, d: u64) -> Result<BigInt> {
        let n = self.model.n;
        if p > n || q > n {
            return Err(Error::BadParams(alloc::format!("(p, q) = ({p}, {q}) outside 0..={n}")));
        }
        self.prepared_hodge(p, q).sum_over_torsion(d)
    }

    pub fn hodge_grid(&self, d: u64) -> Result<Vec<Vec<BigInt>>> {
        let n = self.model.n;
        (0..=n)
            .map(|p| (0..=n).map(|q| self.hodge_number(p, q, d)).collect())
            .collect()
    }

    /// `b_k(X_d) = Σ_{p+q=k} h^{p,q}(X_d)`.
    pub fn betti(&self, k: usize, d: u64) -> Result<BigInt> {
        let n = self.model.n;
        if k > 2 * n {
            return Err(Error::BadParams(alloc::format!("b_{k} with n = {n}")));
        }
        let mut total = BigInt::zero();
        for p in k.saturating_sub(n)..=k.min(n) {
            total += self.hodge_number(p, k - p, d)?;
        }
        Ok(total)
    }

    /// `q(X_d) = h^1(X_d, O)`.
    pub fn irregularity(&self, d: u64) -> Result<BigInt> {
        if self.model.n == 0 {
            return Ok(BigInt::zero());
        }
        self.hodge_number(0, 1, d)
    }

    /// `P_m(X_d)`; `m = 1` is read from `h^{n,0}`.
    pub fn plurigenus(&self, m: u32, d: u64) -> Result<BigInt> {
        match m {
            0 => Err(Error::BadParams("plurigenus index must be positive".into())),
            1 => self.hodge_number(self.model.n, 0, d),
            _ => self
                .pluri
                .get(&m)
                .ok_or(Error::MissingPluriData { m })?
                .sum_over_torsion(d),
        }
    }

    fn prepared_sheaf(&self, name: &str, degree: usize) -> Result<&PreparedRank> {
        let ranks = self.sheaves.get(name).ok_or_else(|| Error::UnknownSheaf(name.into()))?;
        ranks
            .get(degree)
            .ok_or_else(|| Error::BadParams(alloc::format!("{name} has no degree {degree}")))
    }

    pub fn sheaf_rank(&self, name: &str, degree: usize, d: u64) -> Result<BigInt> {
        self.prepared_sheaf(name, degree)?.sum_over_torsion(d)
    }

    pub fn invariant(&self, sel: &Invariant, d: u64) -> Result<BigInt> {
        match sel {
            Invariant::Hodge { p, q } => self.hodge_number(*p, *q, d),
            Invariant::Betti(k) => self.betti(*k, d),
            Invariant::Irregularity => self.irregularity(d),
            Invariant::Plurigenus(m) => self.plurigenus(*m, d),
            Invariant::Sheaf { name, degree } => self.sheaf_rank(name, *degree, d),
        }
    }

    /// `invariant(X_d) / deg φ_d`.
    pub fn normalized(&self, sel: &Invariant, d: u64) -> Result<BigRational> {
        Ok(BigRational::new(self.invariant(sel, d)?, self.degree(d)))
    }

    pub fn normalized_sequence(&self, sel: &Invariant, ds: impl IntoIterator<Item = u64>) -> Result<Vec<BigRational>> {
        ds.into_iter().map(|d| self.normalized(sel, d)).collect()
    }

    /// `lim_d invariant(X_d) / deg φ_d`, read off the generic values.
    pub fn symbolic_limit(&self, sel: &Invariant) -> Result<LimitValue> {
        let n = self.model.n;
        let generic = match sel {
            Invariant::Hodge { p, q } => {
                if *p > n || *q > n {
                    return Err(Error::BadParams(alloc::format!("(p, q) = ({p}, {q}) outside 0..={n}")));
                }
                BigInt::from(self.prepared_hodge(*p, *q).generic())
            }
            Invariant::Betti(k) => {
                if *k > 2 * n {
                    return Err(Error::BadParams(alloc::format!("b_{k} with n = {n}")));
                }
                (k.saturating_sub(n)..=(*k).min(n))
                    .map(|p| BigInt::from(self.prepared_hodge(p, k - p).generic()))
                    .sum()
            }
            Invariant::Irregularity => {
                if n == 0 {
                    BigInt::zero()
                } else {
                    BigInt::from(self.prepared_hodge(0, 1).generic())
                }
            }
            Invariant::Plurigenus(m) => return self.pluri_limit(*m),
            Invariant::Sheaf { name, degree } => BigInt::from(self.prepared_sheaf(name, *degree)?.generic()),
        };
        Ok(LimitValue::from_generic(generic))
    }

    /// `P_m(X)` when `q(I) = 0`, otherwise zero.
    pub fn pluri_limit(&self, m: u32) -> Result<LimitValue> {
        match m {
            0 => Err(Error::BadParams("plurigenus index must be positive".into())),
            1 => self.symbolic_limit(&Invariant::Hodge { p: self.model.n, q: 0 }),
            _ => {
                let rank = self.pluri.get(&m).ok_or(Error::MissingPluriData { m })?;
                Ok(LimitValue::from_generic(BigInt::from(rank.generic())))
            }
        }
    }

    pub fn cover_invariants(&self, d: u64) -> Result<CoverInvariants> {
        let n = self.model.n;
        let hodge = self.hodge_grid(d)?;
        let betti = (0..=2 * n)
            .map(|k| (k.saturating_sub(n)..=k.min(n)).map(|p| hodge[p][k - p].clone()).sum())
            .collect();
        let chi_p: Vec<BigInt> = hodge
            .iter()
            .map(|row| row.iter().cloned().enumerate().map(|(q, h)| alternate(q, h)).sum())
            .collect();
        let chi_top = chi_p.iter().cloned().enumerate().map(|(p, c)| alternate(p, c)).sum();
        let q = if n == 0 { BigInt::zero() } else { hodge[0][1].clone() };
        let mut pluri = BTreeMap::new();
        for &m in self.pluri.keys() {
            pluri.insert(m, self.plurigenus(m, d)?);
        }
        Ok(CoverInvariants {
            d,
            deg: self.degree(d),
            hodge,
            betti,
            q,
            pluri,
            chi_p,
            chi_top,
        })
    }

    /// `Σ_q (−1)^q h^{p,q}(X_d) = d^{2g} χ(Ω^p)` for every `p`.
    pub fn chi_multiplicativity_check(&self, d: u64) -> Result<bool> {
        let deg = self.degree(d);
        for p in 0..=self.model.n {
            let mut lhs = BigInt::zero();
            for q in 0..=self.model.n {
                lhs += alternate(q, self.hodge_number(p, q, d)?);
            }
            if lhs != &deg * chi_omega(&self.model, p) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
