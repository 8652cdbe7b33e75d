//! Built-in models whose invariants can be derived independently.
//!
//! Coordinates on `Pic⁰` are chosen so that product decompositions of the
//! Albanese variety split the coordinate list: for `A = Y × Y'` the first
//! `2 dim Y` coordinates belong to `Pic⁰(Y)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::model::{ModelFlags, PluriData, PluriValue, RankFunction, SheafFamily, Stratum, VarietyModel};
use crate::torus::{CongruenceCoset, TorusPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub parameters: Vec<(String, i64)>,
    pub model: VarietyModel,
    pub oracle_notes: String,
}

/// Name, parameter names and default values.
pub const ENTRIES: &[(&str, &[&str], &[i64])] = &[
    ("abelian", &["g"], &[2]),
    ("nondeg_line_bundle", &["g", "p", "chi0"], &[2, 1, -3]),
    ("blowup_abelian_codim", &["g", "c"], &[4, 2]),
    ("blowup_abelian_curve", &["g", "g_C"], &[4, 2]),
    ("blowup_abelian4_curve", &["g_C"], &[2]),
    ("elliptic_surface_qI0", &["h", "k"], &[2, 1]),
    ("fibered_over_curve", &["h"], &[2]),
    ("cartwright_steger_like", &[], &[]),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _, _)| *n)
}

/// Builds a catalog entry; empty `params` selects the defaults.
pub fn builtin(name: &str, params: &[i64]) -> Result<CatalogEntry> {
    let (_, keys, defaults) = ENTRIES
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| Error::UnknownName(name.into()))?;
    let values = if params.is_empty() { defaults } else { params };
    if values.len() != keys.len() {
        return Err(Error::BadParams(format!(
            "{name} takes {} parameters ({}), got {}",
            keys.len(),
            keys.join(", "),
            values.len()
        )));
    }
    let (model, oracle_notes) = match (name, values) {
        ("abelian", &[g]) => abelian(positive(g, "g")?),
        ("nondeg_line_bundle", &[g, p, chi0]) => nondeg_line_bundle(positive(g, "g")?, nonneg(p, "p")?, chi0)?,
        ("blowup_abelian_codim", &[g, c]) => blowup_abelian_codim(positive(g, "g")?, positive(c, "c")?)?,
        ("blowup_abelian_curve", &[g, gc]) => blowup_abelian_curve(positive(g, "g")?, nonneg(gc, "g_C")?)?,
        ("blowup_abelian4_curve", &[gc]) => blowup_abelian_curve(4, nonneg(gc, "g_C")?)?,
        ("elliptic_surface_qI0", &[h, k]) => elliptic_surface(positive(h, "h")?, positive(k, "k")?)?,
        ("fibered_over_curve", &[h]) => fibered_over_curve(positive(h, "h")?)?,
        ("cartwright_steger_like", &[]) => cartwright_steger_like(),
        _ => unreachable!("parameter count checked above"),
    };
    Ok(CatalogEntry {
        name: name.into(),
        parameters: keys.iter().map(|k| k.to_string()).zip(values.iter().copied()).collect(),
        model,
        oracle_notes,
    })
}

fn positive(x: i64, what: &str) -> Result<usize> {
    match usize::try_from(x) {
        Ok(v) if (1..=16).contains(&v) => Ok(v),
        _ => Err(Error::BadParams(format!("{what} must lie in 1..=16, got {x}"))),
    }
}

fn nonneg(x: i64, what: &str) -> Result<usize> {
    match usize::try_from(x) {
        Ok(v) if v <= 64 => Ok(v),
        _ => Err(Error::BadParams(format!("{what} must lie in 0..=64, got {x}"))),
    }
}

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `binom(n, i)` with `0` for negative `i`.
fn binom_at(n: usize, i: isize) -> u64 {
    usize::try_from(i).map_or(0, |i| binom(n, i))
}

fn point_pluri(g: usize, ms: impl Iterator<Item = (u32, u64)>) -> PluriData {
    PluriData {
        q_z: 0,
        subtorus: None,
        translates: alloc::vec![TorusPoint::origin(2 * g)],
        values: ms
            .map(|(m, v)| {
                (
                    m,
                    PluriValue {
                        generic: v,
                        at_origin: None,
                    },
                )
            })
            .collect(),
    }
}

fn abelian_grid(g: usize) -> VarietyModel {
    VarietyModel::from_fn(g, g, |p, q| {
        RankFunction::origin_jump(2 * g, 0, binom(g, p) * binom(g, q))
    })
}

fn abelian(g: usize) -> (VarietyModel, String) {
    let model = abelian_grid(g)
        .with_defect_strata(&[(0, g)])
        .with_pluri(point_pluri(g, (2..=5).map(|m| (m, 1))))
        .with_flags(ModelFlags {
            semismall: true,
            serre_check: true,
        });
    let notes = format!(
        "Abelian variety of dimension {g}. Topologically trivial bundles have no cohomology \
         unless trivial, so h^(p,q) = C({g},p)C({g},q) at the origin only. Covers are abelian: \
         h^(p,q)(X_d) = C({g},p)C({g},q) and b_k(X_d) = C({},k) for all d. P_m = 1.",
        2 * g
    );
    (model, notes)
}

fn nondeg_line_bundle(g: usize, p: usize, chi0: i64) -> Result<(VarietyModel, String)> {
    if p > g {
        return Err(Error::BadParams(format!("index p = {p} exceeds g = {g}")));
    }
    let signed = if p.is_multiple_of(2) { chi0 } else { -chi0 };
    if signed <= 0 {
        return Err(Error::BadParams(format!("(-1)^p chi0 must be positive, got {signed}")));
    }
    let ranks = (0..=g)
        .map(|i| RankFunction::constant(2 * g, if i == p { signed as u64 } else { 0 }))
        .collect();
    let (base, _) = abelian(g);
    let model = base.with_sheaf(SheafFamily {
        name: "L".into(),
        ranks,
    });
    let notes = format!(
        "Non-degenerate line bundle L with index {p} on an abelian {g}-fold, chi(L) = {chi0}. \
         h^i(L ⊗ α) vanishes for i != {p} and equals (-1)^p chi(L) = {signed} for every α, \
         so h^{p}(L_d)/d^(2g) = {signed} exactly for every d."
    );
    Ok((model, notes))
}

/// Coordinates `x_1..x_{2m} ≡ 0`: the bundles trivial on the first factor.
fn first_factor_kernel(g: usize, m: usize) -> IntMatrix {
    let mut a = IntMatrix::zeros(2 * m, 2 * g);
    for i in 0..2 * m {
        a.set(i, i, 1.into());
    }
    a
}

fn blowup_abelian_codim(g: usize, c: usize) -> Result<(VarietyModel, String)> {
    if c >= g {
        return Err(Error::BadParams(format!(
            "codimension c = {c} must satisfy 1 <= c <= g - 1 = {}",
            g - 1
        )));
    }
    let m = g - c;
    let kernel = CongruenceCoset::new(
        2 * g,
        first_factor_kernel(g, m),
        alloc::vec![BigRational::zero(); 2 * m],
    )?;
    let origin = TorusPoint::origin(2 * g);
    let model = VarietyModel::from_fn(g, g, |p, q| {
        let y: u64 = (1..c)
            .map(|j| binom_at(m, p as isize - j as isize) * binom_at(m, q as isize - j as isize))
            .sum();
        let mut strata = Vec::new();
        if y > 0 {
            strata.push(Stratum::new(kernel.clone(), y));
        }
        strata.push(Stratum::at_point(&origin, binom(g, p) * binom(g, q) + y));
        RankFunction::new(2 * g, 0, strata).expect("strata on the dual torus")
    });
    let mut defect = alloc::vec![(0, g)];
    if c >= 2 {
        defect.push((c - 1, m));
    }
    let model = model
        .with_defect_strata(&defect)
        .with_pluri(point_pluri(g, (2..=5).map(|m| (m, 1))))
        .with_flags(ModelFlags {
            semismall: c <= 2,
            serre_check: true,
        });
    let notes = format!(
        "Blowup of A = Y x Y' (dim {g}) along Y x {{0}}, Y abelian of dimension {m}, codimension {c}. \
         H^k(X) = H^k(A) + sum_(j=1..c-1) H^(k-2j)(Y), twisted: the Y part survives exactly for α \
         trivial on Y, a subtorus of real dimension {}. Fibres over Y are P^(c-1), so \
         delta = max(0, c - 2) = {}.",
        2 * c,
        c.saturating_sub(2)
    );
    Ok((model, notes))
}

fn curve_generic(gc: usize, p: isize, q: isize) -> u64 {
    match (p, q) {
        (0, 1) | (1, 0) => gc.saturating_sub(1) as u64,
        _ => 0,
    }
}

fn curve_origin(gc: usize, p: isize, q: isize) -> u64 {
    match (p, q) {
        (0, 0) | (1, 1) => 1,
        (0, 1) | (1, 0) => gc as u64,
        _ => 0,
    }
}

fn blowup_abelian_curve(g: usize, gc: usize) -> Result<(VarietyModel, String)> {
    if g < 3 {
        return Err(Error::BadParams(format!(
            "a curve has codimension >= 2 only for g >= 3, got g = {g}"
        )));
    }
    let c = g - 1;
    let model = VarietyModel::from_fn(g, g, |p, q| {
        let (p, q) = (p as isize, q as isize);
        let generic: u64 = (1..c as isize).map(|j| curve_generic(gc, p - j, q - j)).sum();
        let jump: u64 = (1..c as isize).map(|j| curve_origin(gc, p - j, q - j)).sum();
        let origin = binom(g, p as usize) * binom(g, q as usize) + jump;
        RankFunction::origin_jump(2 * g, generic, origin)
    })
    .with_defect_strata(&[(0, g), (c - 1, 1)])
    .with_pluri(point_pluri(g, (2..=5).map(|m| (m, 1))))
    .with_flags(ModelFlags {
        semismall: g == 3,
        serre_check: true,
    });
    let notes = format!(
        "Blowup of an abelian {g}-fold along a smooth curve C of genus {gc} (codimension {c}). \
         H^k(X) = H^k(A) + sum_(j=1..{}) H^(k-2j)(C). The preimage C_d of C is an étale cover of \
         degree d^(2g), so g(C_d) = d^(2g)(g(C) - 1) + 1 and h^(p,q)(X_d) = h^(p,q)(A) + \
         sum_j h^(p-j,q-j)(C_d). chi_top = {}, delta = {}.",
        c - 1,
        (c as i64 - 1) * (2 - 2 * gc as i64),
        g - 3
    );
    Ok((model, notes))
}

fn elliptic_surface(h: usize, k: usize) -> Result<(VarietyModel, String)> {
    let n = 2 * h;
    let (h64, k64) = (h as u64, k as u64);
    let pg = h64 - 1 + k64;
    let table = [
        [(0, 1), (h64 - 1, h64), (pg, pg)],
        [
            (h64 - 1, h64),
            (10 * k64 + 2 * h64 - 2, 10 * k64 + 2 * h64),
            (h64 - 1, h64),
        ],
        [(pg, pg), (h64 - 1, h64), (0, 1)],
    ];
    let model = VarietyModel::from_fn(2, h, |p, q| {
        let (generic, origin) = table[p][q];
        RankFunction::origin_jump(n, generic, origin)
    })
    .with_defect_strata(&[(0, 1), (1, 1)]);
    let kappa = 2 * h64 - 2 + k64;
    let values: BTreeMap<u32, PluriValue> = (2..=5u32)
        .map(|m| {
            (
                m,
                PluriValue {
                    generic: u64::from(m) * kappa - h64 + 1,
                    at_origin: None,
                },
            )
        })
        .collect();
    let model = model
        .with_pluri(PluriData {
            q_z: h,
            subtorus: None,
            translates: Vec::new(),
            values,
        })
        .with_flags(ModelFlags {
            semismall: false,
            serre_check: true,
        });
    let notes = format!(
        "Non-isotrivial elliptic surface over a genus {h} curve with chi(O) = {k}; Alb(X) = J(base). \
         p_g = {pg}, h^(1,1) = 10k + 2h = {}, chi_top = 12k = {}. omega_X = pullback of a degree {kappa} \
         bundle, so P_m(X ⊗ α) = m*{kappa} - {h} + 1 on all of Pic0 and q(I) = 0: \
         P_m(X_d) = d^(2g) P_m(X). Twisted Omega^1 values are a chi-consistent assumption.",
        10 * k + 2 * h,
        12 * k
    );
    Ok((model, notes))
}

fn fibered_over_curve(h: usize) -> Result<(VarietyModel, String)> {
    let g = h + 1;
    // Pic0(C) is the first 2h coordinates; K = {γ = 0} kills the elliptic factor.
    let mut a = IntMatrix::zeros(2, 2 * g);
    a.set(0, 2 * h, 1.into());
    a.set(1, 2 * h + 1, 1.into());
    let kernel = CongruenceCoset::new(2 * g, a.clone(), alloc::vec![BigRational::zero(); 2])?;
    let origin = TorusPoint::origin(2 * g);
    let model = VarietyModel::from_fn(2, g, |p, q| {
        let (p, q) = (p as isize, q as isize);
        let mut on_kernel = 0;
        let mut at_origin = 0;
        for p2 in 0..=1 {
            for q2 in 0..=1 {
                on_kernel += curve_generic(h, p - p2, q - q2);
                at_origin += curve_origin(h, p - p2, q - q2);
            }
        }
        let mut strata = Vec::new();
        if on_kernel > 0 {
            strata.push(Stratum::new(kernel.clone(), on_kernel));
        }
        strata.push(Stratum::at_point(&origin, at_origin));
        RankFunction::new(2 * g, 0, strata).expect("strata on the dual torus")
    })
    .with_defect_strata(&[(0, 2)]);
    let values = (2..=5u32)
        .map(|m| {
            let v = (2 * u64::from(m) - 1) * (h as u64 - 1);
            (
                m,
                PluriValue {
                    generic: v,
                    at_origin: None,
                },
            )
        })
        .collect();
    let model = model
        .with_pluri(PluriData {
            q_z: h,
            subtorus: Some(a),
            translates: alloc::vec![origin],
            values,
        })
        .with_flags(ModelFlags {
            semismall: true,
            serre_check: true,
        });
    let notes = format!(
        "X = C x E with g(C) = {h}, so g = {g}. Kunneth: h^q(Omega^p ⊗ (β ⊠ γ)) vanishes unless γ = 0, \
         where it equals the C-part summed over the four E-classes. V^1(O) contains the subtorus \
         {{γ = 0}} of real dimension {}, so q(X_d) = (h-1) d^{} + (h+1) - (h-1) = {} d^{} + 2 diverges. \
         P_m = (2m-1)(h-1) on {{γ = 0}}, q(I) = 1.",
        2 * h,
        2 * h,
        h - 1,
        2 * h
    );
    Ok((model, notes))
}

fn cartwright_steger_like() -> (VarietyModel, String) {
    let table = [
        [(0, 1), (0, 1), (1, 1)],
        [(0, 1), (1, 3), (0, 1)],
        [(1, 1), (0, 1), (0, 1)],
    ];
    let model = VarietyModel::from_fn(2, 1, |p, q| {
        let (generic, origin) = table[p][q];
        RankFunction::origin_jump(2, generic, origin)
    })
    .with_defect_strata(&[(0, 1), (1, 1)])
    .with_pluri(PluriData {
        q_z: 1,
        subtorus: None,
        translates: Vec::new(),
        values: (2..=5u32)
            .map(|m| {
                (
                    m,
                    PluriValue {
                        generic: 1 + 9 * u64::from(m * (m - 1)) / 2,
                        at_origin: None,
                    },
                )
            })
            .collect(),
    })
    .with_flags(ModelFlags {
        semismall: false,
        serre_check: true,
    });
    let notes = "Jump-locus shadow of a ball quotient with q = p_g = 1, K^2 = 9, chi_top = 3: \
                 V^1(O) = {O}, so every abelian cover along the Albanese tower has q = 1. \
                 Generic twisted ranks are chi-consistent (chi(O) = 1, chi(Omega^1) = -1). \
                 P_m = 1 + 9m(m-1)/2 constant on Pic0 (q(I) = 0). The finite set V^1(O) beyond \
                 the origin is not modelled."
        .into();
    (model, notes)
}
