//! Decay bounds, divergence of irregularity and L²-Betti numbers along the
//! tower of Albanese covers.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{defect, is_weak_gnv, RankFunction};
use crate::tower::{chi_omega, chi_top, CoverInvariants, Invariant, LimitValue, PreparedRank, Tower};

/// `h^{p,q}(X_d)/d^{2g} ≤ B·d^{−e}` checked for one `(p, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundFit {
    pub p: usize,
    pub q: usize,
    /// `e = 2(|n − p − q| − N)`.
    pub exponent: i64,
    /// `sup_{d ≤ d_max} (h_d / d^{2g}) · d^e`.
    pub fitted_b: BigRational,
    /// Real dimension of `V^q(Ω^p)`, `None` when empty.
    pub locus_dim: Option<usize>,
    /// Degree in `k` of `h_{kL}`, measured by finite differences.
    pub growth_degree: Option<usize>,
    pub pass: bool,
    /// Whether the growth-degree route reaches the same verdict.
    pub routes_agree: bool,
}

fn exponent(n: usize, p: usize, q: usize, bound: i64) -> i64 {
    2 * ((n as i64 - p as i64 - q as i64).abs() - bound)
}

/// `d^e` for a possibly negative `e`.
fn rational_pow(d: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(d));
    let mag = num_traits::pow(base, e.unsigned_abs() as usize);
    if e >= 0 {
        mag
    } else {
        mag.recip()
    }
}

/// Degree of the polynomial `k ↦ sum_over_torsion(k·L)`, from `2g + 2`
/// samples.
fn growth_degree(rank: &PreparedRank, ambient_dim: usize) -> Option<usize> {
    let period = rank.period().to_u64()?;
    let samples = ambient_dim + 2;
    let mut diffs: Vec<BigInt> = (1..=samples as u64)
        .map(|k| rank.sum_over_torsion(k.checked_mul(period)?).ok())
        .collect::<Option<_>>()?;
    let mut degree = None;
    for order in 0..samples {
        if diffs.iter().any(|x| !x.is_zero()) {
            degree = Some(order);
        }
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    degree
}

pub fn fit_bound(tower: &Tower, p: usize, q: usize, bound: i64, d_max: u64) -> Result<BoundFit> {
    let model = tower.model();
    if d_max < 2 {
        return Err(Error::BadParams("d_max must be at least 2".into()));
    }
    if p > model.n || q > model.n {
        return Err(Error::BadParams(alloc::format!(
            "(p, q) = ({p}, {q}) outside 0..={}",
            model.n
        )));
    }
    let e = exponent(model.n, p, q, bound);
    let sel = Invariant::Hodge { p, q };
    let mut fitted_b = BigRational::zero();
    for d in 1..=d_max {
        let b_d = tower.normalized(&sel, d)? * rational_pow(d, e);
        if b_d > fitted_b {
            fitted_b = b_d;
        }
    }
    let allowed = 2 * model.g as i64 - e;
    let locus_dim = model.hodge(p, q).locus_dimension();
    let pass = locus_dim.is_none_or(|dim| dim as i64 <= allowed);
    let growth = growth_degree(tower.prepared_hodge(p, q), model.ambient_dim());
    let numeric_pass = growth.is_none_or(|deg| deg as i64 <= allowed);
    Ok(BoundFit {
        p,
        q,
        exponent: e,
        fitted_b,
        locus_dim,
        growth_degree: growth,
        pass,
        routes_agree: numeric_pass == pass,
    })
}

pub fn fit_grid(tower: &Tower, bound: i64, d_max: u64) -> Result<Vec<BoundFit>> {
    let n = tower.model().n;
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for p in 0..=n {
        for q in 0..=n {
            out.push(fit_bound(tower, p, q, bound, d_max)?);
        }
    }
    Ok(out)
}

/// First `(p, q)` whose locus is too large for the bound with defect `N`.
pub fn converse_defect_witness(model: &crate::model::VarietyModel, bound: i64) -> Option<(usize, usize)> {
    let g2 = 2 * model.g as i64;
    for p in 0..=model.n {
        for q in 0..=model.n {
            if let Some(dim) = model.hodge(p, q).locus_dimension() {
                if dim as i64 > g2 - exponent(model.n, p, q, bound) {
                    return Some((p, q));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divergence {
    Bounded,
    Divergent {
        /// Real dimension of the largest component of `V^1(O)`.
        real_dim: usize,
        /// Torsion order of that component.
        order: BigInt,
        /// `(d, q(X_d))` with `q(X_d) ≥ q(X) + d^{real_dim} − 1`.
        witnesses: Vec<(u64, BigInt)>,
    },
}

/// Bounded iff every component of `V^1(O)` is a point.
pub fn divergence_class(tower: &Tower) -> Result<Divergence> {
    let model = tower.model();
    if model.n == 0 {
        return Ok(Divergence::Bounded);
    }
    let rf = model.hodge(0, 1);
    let (real_dim, order) = if rf.is_full_locus() {
        (model.ambient_dim(), BigInt::one())
    } else {
        let best = rf
            .strata()
            .iter()
            .filter(|s| s.value > 0)
            .filter_map(|s| s.coset.normalize())
            .filter(|nc| nc.dimension() > 0)
            .max_by(|a, b| {
                a.dimension()
                    .cmp(&b.dimension())
                    .then_with(|| b.period().cmp(&a.period()))
            });
        match best {
            None => return Ok(Divergence::Bounded),
            Some(nc) => (nc.dimension(), nc.period()),
        }
    };
    let q0 = tower.irregularity(1)?;
    let mut witnesses = Vec::new();
    if let Some(step) = order.to_u64() {
        for k in 1..=10u64 {
            let Some(d) = step.checked_mul(k) else { break };
            let qd = tower.irregularity(d)?;
            let floor = &q0 + num_traits::pow(BigInt::from(d), real_dim) - 1;
            if qd >= floor {
                witnesses.push((d, qd));
            }
        }
    }
    Ok(Divergence::Divergent {
        real_dim,
        order,
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2Report {
    /// `h2[p][q] = lim h^{p,q}(X_d)/d^{2g}`.
    pub h2: Vec<Vec<BigRational>>,
    /// `b2[k] = Σ_{p+q=k} h2[p][q]`.
    pub b2: Vec<BigRational>,
    /// `p` with `χ(Ω^p) ≠ 0`.
    pub nonvanishing: Vec<usize>,
    pub weak_gnv: bool,
    pub chi_top: BigInt,
    /// `C` with `|b_n(X_d)/d^{2g} − b2[n]| ≤ C·d^{−gap}`.
    pub error_constant: BigInt,
    /// `2g −` largest jump dimension in middle degree (`None`: no jumps).
    pub error_gap: Option<usize>,
    pub caveat: Option<String>,
}

/// `Σ_s (value_s − generic)·#components(s)` over strata above the generic
/// value.
fn jump_mass(rf: &RankFunction) -> BigInt {
    let base = rf.effective_generic();
    rf.strata()
        .iter()
        .filter(|s| s.value > base)
        .filter_map(|s| Some((s.value - base, s.coset.normalize()?)))
        .map(|(step, nc)| BigInt::from(step) * nc.component_count())
        .sum()
}

pub fn l2_betti(tower: &Tower) -> Result<L2Report> {
    let model = tower.model();
    let n = model.n;
    let mut h2 = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let row = (0..=n)
            .map(|q| tower.symbolic_limit(&Invariant::Hodge { p, q }).map(|l| l.value))
            .collect::<Result<Vec<_>>>()?;
        h2.push(row);
    }
    let b2 = (0..=2 * n)
        .map(|k| (k.saturating_sub(n)..=k.min(n)).map(|p| h2[p][k - p].clone()).sum())
        .collect();
    let nonvanishing = (0..=n).filter(|&p| !chi_omega(model, p).is_zero()).collect();
    let weak_gnv = is_weak_gnv(model);
    let mut error_constant = BigInt::zero();
    let mut max_jump = None;
    for p in 0..=n {
        let rf = model.hodge(p, n - p);
        error_constant += jump_mass(rf);
        max_jump = max_jump.max(rf.jump_dimension());
    }
    let caveat = (!weak_gnv)
        .then(|| String::from("not weak generic Nakano: limits are per-(p,q) and b2 need not concentrate in degree n"));
    Ok(L2Report {
        h2,
        b2,
        nonvanishing,
        weak_gnv,
        chi_top: chi_top(model),
        error_constant,
        error_gap: max_jump.map(|d| model.ambient_dim() - d),
        caveat,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluriBound {
    pub m: u32,
    pub q_i: usize,
    /// `M` with `P_m(X_d)/d^{2g} ≤ M·d^{−2q(I)}`.
    pub constant: BigInt,
}

pub fn pluri_bound(tower: &Tower, m: u32) -> Result<PluriBound> {
    let model = tower.model();
    let pluri = model.pluri.as_ref().ok_or(Error::MissingPluriData { m })?;
    let rf = pluri.rank_for(model.g, m)?;
    let base = rf.effective_generic();
    let mut constant = BigInt::from(base);
    for s in rf.strata() {
        if s.value > base {
            if let Some(nc) = s.coset.normalize() {
                constant += BigInt::from(s.value) * nc.component_count();
            }
        }
    }
    Ok(PluriBound {
        m,
        q_i: pluri.q_i(model.g),
        constant,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub rows: Vec<CoverInvariants>,
    /// Row-major `(n+1)²` symbolic limits of normalized Hodge numbers.
    pub hodge_limits: Vec<LimitValue>,
    pub betti_limits: Vec<LimitValue>,
    pub defect: Option<i64>,
    pub defect_bound: i64,
    pub fits: Vec<BoundFit>,
    pub witness: Option<(usize, usize)>,
    pub divergence: Divergence,
    pub l2: L2Report,
}

impl TowerReport {
    pub fn all_pass(&self) -> bool {
        self.fits.iter().all(|f| f.pass)
    }
}

/// Full report; `defect_bound` defaults to the model's own defect.
pub fn tower_report(tower: &Tower, defect_bound: Option<i64>, d_max: u64) -> Result<TowerReport> {
    let model = tower.model();
    let delta = defect(model).ok();
    let bound = defect_bound.or(delta).ok_or(Error::MissingStratification)?;
    let rows = (1..=d_max).map(|d| tower.cover_invariants(d)).collect::<Result<_>>()?;
    let n = model.n;
    let mut hodge_limits = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            hodge_limits.push(tower.symbolic_limit(&Invariant::Hodge { p, q })?);
        }
    }
    let betti_limits = (0..=2 * n)
        .map(|k| tower.symbolic_limit(&Invariant::Betti(k)))
        .collect::<Result<_>>()?;
    Ok(TowerReport {
        rows,
        hodge_limits,
        betti_limits,
        defect: delta,
        defect_bound: bound,
        fits: fit_grid(tower, bound, d_max.max(2))?,
        witness: converse_defect_witness(model, bound),
        divergence: divergence_class(tower)?,
        l2: l2_betti(tower)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, names};
    use crate::torsion::Limits;

    fn tower(name: &str, params: &[i64]) -> Tower {
        Tower::new(&builtin(name, params).unwrap().model, Limits::default()).unwrap()
    }

    #[test]
    fn semismall_codim_two_passes() {
        let t = tower("blowup_abelian_codim", &[4, 2]);
        let fits = fit_grid(&t, 0, 4).unwrap();
        assert!(fits.iter().all(|f| f.pass && f.routes_agree), "{fits:?}");
        assert_eq!(converse_defect_witness(t.model(), 0), None);
    }

    #[test]
    fn curve_blowup_needs_defect_one() {
        let t = tower("blowup_abelian4_curve", &[2]);
        let f = fit_bound(&t, 1, 2, 0, 4).unwrap();
        assert!(!f.pass && f.routes_agree);
        assert_eq!(f.exponent, 2);
        assert_eq!(converse_defect_witness(t.model(), 0), Some((1, 2)));
        assert!(fit_grid(&t, 1, 4).unwrap().iter().all(|f| f.pass && f.routes_agree));
        assert_eq!(converse_defect_witness(t.model(), 1), None);
        assert!(fit_bound(&t, 1, 2, 0, 1).is_err());
    }

    #[test]
    fn abelian_never_has_a_witness() {
        let t = tower("abelian", &[3]);
        for bound in 0..4 {
            assert_eq!(converse_defect_witness(t.model(), bound), None);
        }
        assert_eq!(divergence_class(&t).unwrap(), Divergence::Bounded);
    }

    #[test]
    fn fibered_surface_diverges() {
        let t = tower("fibered_over_curve", &[2]);
        match divergence_class(&t).unwrap() {
            Divergence::Divergent {
                real_dim,
                order,
                witnesses,
            } => {
                assert_eq!(real_dim, 4);
                assert_eq!(order, BigInt::one());
                assert_eq!(witnesses.len(), 10);
                assert!(witnesses.windows(2).all(|w| w[0].1 < w[1].1));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            divergence_class(&tower("cartwright_steger_like", &[])).unwrap(),
            Divergence::Bounded
        );
    }

    #[test]
    fn l2_reports() {
        let r = l2_betti(&tower("abelian", &[2])).unwrap();
        assert!(r.b2.iter().all(Zero::is_zero));
        assert!(r.weak_gnv && r.caveat.is_none());

        let r = l2_betti(&tower("blowup_abelian4_curve", &[2])).unwrap();
        assert!(!r.weak_gnv && r.caveat.is_some());
        assert_eq!(r.h2[1][2], BigRational::one());
        assert_eq!(r.b2[3], BigRational::from_integer(2.into()));

        let r = l2_betti(&tower("cartwright_steger_like", &[])).unwrap();
        assert_eq!(r.b2[2], BigRational::from_integer(3.into()));
        assert_eq!(r.nonvanishing, alloc::vec![0, 1, 2]);
    }

    #[test]
    fn l2_euler_identity_on_catalog() {
        for name in names() {
            let r = l2_betti(&tower(name, &[])).unwrap();
            let alt: BigRational =
                r.b2.iter()
                    .enumerate()
                    .map(|(k, b)| if k % 2 == 0 { b.clone() } else { -b.clone() })
                    .sum();
            assert_eq!(alt, BigRational::from_integer(r.chi_top.clone()), "{name}");
        }
    }

    #[test]
    fn fit_routes_agree_on_catalog() {
        for name in names() {
            let t = tower(name, &[]);
            for bound in 0..=2 {
                for f in fit_grid(&t, bound, 3).unwrap() {
                    assert!(f.routes_agree, "{name} N={bound}: {f:?}");
                }
            }
        }
    }

    #[test]
    fn pluri_bounds() {
        let b = pluri_bound(&tower("fibered_over_curve", &[2]), 3).unwrap();
        assert_eq!((b.q_i, b.constant), (1, BigInt::from(5)));
        let b = pluri_bound(&tower("abelian", &[2]), 2).unwrap();
        assert_eq!((b.q_i, b.constant), (2, BigInt::one()));
    }

    #[test]
    fn report_defaults_to_model_defect() {
        let t = tower("blowup_abelian4_curve", &[2]);
        let r = tower_report(&t, None, 3).unwrap();
        assert_eq!(r.defect_bound, 1);
        assert!(r.all_pass());
        let r = tower_report(&t, Some(0), 3).unwrap();
        assert!(!r.all_pass());
        assert_eq!(r.witness, Some((1, 2)));
        assert_eq!(r.rows.len(), 3);
    }
}
