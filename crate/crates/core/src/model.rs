//! Declarative models of varieties: ranks of twisted cohomology over the dual
//! torus, the fibre-dimension stratification of the Albanese map and optional
//! plurigenus data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::torsion::{all_torsion_points, Limits};
use crate::torus::{CongruenceCoset, TorusPoint};

/// A coset on which the rank jumps to `value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub coset: CongruenceCoset,
    pub value: u64,
}

impl Stratum {
    pub fn new(coset: CongruenceCoset, value: u64) -> Self {
        Stratum { coset, value }
    }

    /// Stratum supported at a single point.
    pub fn at_point(p: &TorusPoint, value: u64) -> Self {
        Stratum::new(CongruenceCoset::point(p), value)
    }
}

/// `α ↦ h^i(X, F ⊗ α)` as a generic value raised on finitely many cosets.
///
/// The value at a point is the maximum of the generic value and the values of
/// the strata containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankFunction {
    ambient_dim: usize,
    generic: u64,
    strata: Vec<Stratum>,
}

impl RankFunction {
    pub fn new(ambient_dim: usize, generic: u64, strata: Vec<Stratum>) -> Result<Self> {
        for s in &strata {
            if s.coset.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: s.coset.ambient_dim(),
                });
            }
        }
        Ok(RankFunction {
            ambient_dim,
            generic,
            strata,
        })
    }

    pub fn constant(ambient_dim: usize, value: u64) -> Self {
        RankFunction {
            ambient_dim,
            generic: value,
            strata: Vec::new(),
        }
    }

    /// Generic value `generic` with a single jump to `value` at the origin.
    pub fn origin_jump(ambient_dim: usize, generic: u64, value: u64) -> Self {
        let mut strata = Vec::new();
        if value > generic {
            strata.push(Stratum::at_point(&TorusPoint::origin(ambient_dim), value));
        }
        RankFunction {
            ambient_dim,
            generic,
            strata,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The declared generic value.
    pub fn generic(&self) -> u64 {
        self.generic
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn rank_at(&self, alpha: &TorusPoint) -> Result<u64> {
        let mut best = self.generic;
        for s in &self.strata {
            if s.value > best && s.coset.contains(alpha)? {
                best = s.value;
            }
        }
        Ok(best)
    }

    /// Value off a proper closed subset: the declared generic value, raised by
    /// any stratum that fills the whole torus.
    pub fn effective_generic(&self) -> u64 {
        self.strata
            .iter()
            .filter(|s| s.coset.normalize().is_some_and(|nc| nc.dimension() == self.ambient_dim))
            .map(|s| s.value)
            .fold(self.generic, u64::max)
    }

    /// Distinct stratum values above the effective generic value, ascending.
    pub fn thresholds(&self) -> Vec<u64> {
        let base = self.effective_generic();
        let mut t: Vec<u64> = self.strata.iter().map(|s| s.value).filter(|&v| v > base).collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// Cosets whose union is `{α : rank(α) ≥ t}` for `t` above the effective
    /// generic value.
    pub fn level_set(&self, t: u64) -> Vec<CongruenceCoset> {
        self.strata
            .iter()
            .filter(|s| s.value >= t)
            .map(|s| s.coset.clone())
            .collect()
    }

    /// Cosets where the rank exceeds the effective generic value.
    pub fn jump_set(&self) -> Vec<CongruenceCoset> {
        self.level_set(self.effective_generic() + 1)
    }

    /// Whether `V = {α : rank(α) > 0}` is the whole torus.
    pub fn is_full_locus(&self) -> bool {
        self.effective_generic() > 0
    }

    /// Real dimension of `V = {α : rank(α) > 0}`, `None` when `V` is empty.
    pub fn locus_dimension(&self) -> Option<usize> {
        if self.is_full_locus() {
            return Some(self.ambient_dim);
        }
        self.strata
            .iter()
            .filter(|s| s.value > 0)
            .filter_map(|s| s.coset.normalize())
            .map(|nc| nc.dimension())
            .max()
    }

    /// Real dimension of the jump set above the effective generic value.
    pub fn jump_dimension(&self) -> Option<usize> {
        self.jump_set()
            .iter()
            .filter_map(CongruenceCoset::normalize)
            .map(|nc| nc.dimension())
            .max()
    }

    pub fn max_value(&self) -> u64 {
        self.strata.iter().map(|s| s.value).fold(self.generic, u64::max)
    }
}

/// `(l, dim V_l)` where `V_l` is the locus of Albanese fibres of dimension
/// at least `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DefectStratum {
    pub fiber_dim: usize,
    pub locus_dim: usize,
}

impl DefectStratum {
    pub fn new(fiber_dim: usize, locus_dim: usize) -> Self {
        DefectStratum { fiber_dim, locus_dim }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PluriValue {
    /// `h⁰(ω^m ⊗ α)` on the translates of the subtorus.
    pub generic: u64,
    /// Value at the origin when it jumps above `generic`.
    pub at_origin: Option<u64>,
}

/// `V⁰(ω^m)` as translates `α_j + Pic⁰(Z)` of a subtorus of complex dimension
/// `q_z`, with `h⁰` constant on them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluriData {
    pub q_z: usize,
    /// Homogeneous congruences cutting out the subtorus. `None` means the full
    /// torus when `q_z = g` and the origin when `q_z = 0`.
    pub subtorus: Option<IntMatrix>,
    pub translates: Vec<TorusPoint>,
    pub values: BTreeMap<u32, PluriValue>,
}

impl PluriData {
    /// `q(I) = g − q(Z)`.
    pub fn q_i(&self, g: usize) -> usize {
        g.saturating_sub(self.q_z)
    }

    fn subtorus_matrix(&self, g: usize) -> Result<IntMatrix> {
        match (&self.subtorus, self.q_z) {
            (Some(a), _) => Ok(a.clone()),
            (None, 0) => Ok(IntMatrix::identity(2 * g)),
            (None, q) if q == g => Ok(IntMatrix::zeros(0, 2 * g)),
            (None, q) => Err(Error::BadParams(format!(
                "plurigenus subtorus of dimension {q} needs explicit congruences"
            ))),
        }
    }

    /// The rank function of `α ↦ h⁰(ω^m ⊗ α)`.
    pub fn rank_for(&self, g: usize, m: u32) -> Result<RankFunction> {
        let value = self.values.get(&m).ok_or(Error::MissingPluriData { m })?;
        let n = 2 * g;
        let origin = TorusPoint::origin(n);
        let mut strata = Vec::new();
        let generic = if self.q_z == g && self.subtorus.is_none() {
            value.generic
        } else {
            let a = self.subtorus_matrix(g)?;
            for t in &self.translates {
                strata.push(Stratum::new(CongruenceCoset::translate_of(&a, t)?, value.generic));
            }
            0
        };
        if let Some(v) = value.at_origin {
            if v > value.generic {
                strata.push(Stratum::at_point(&origin, v));
            }
        }
        RankFunction::new(n, generic, strata)
    }
}

/// Extra coherent sheaf family: ranks of `h^i(X, F ⊗ α)` indexed by `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafFamily {
    pub name: String,
    pub ranks: Vec<RankFunction>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelFlags {
    pub semismall: bool,
    pub serre_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyModel {
    pub n: usize,
    pub g: usize,
    /// Row-major `(n+1)×(n+1)`; entry `(p, q)` is `α ↦ h^q(X, Ω^p ⊗ α)`.
    pub hodge: Vec<RankFunction>,
    pub defect_strata: Vec<DefectStratum>,
    pub pluri: Option<PluriData>,
    pub sheaves: Vec<SheafFamily>,
    pub flags: ModelFlags,
}

impl VarietyModel {
    pub fn new(n: usize, g: usize, hodge: Vec<RankFunction>) -> Result<Self> {
        if hodge.len() != (n + 1) * (n + 1) {
            return Err(Error::DimensionMismatch {
                expected: (n + 1) * (n + 1),
                found: hodge.len(),
            });
        }
        Ok(VarietyModel {
            n,
            g,
            hodge,
            defect_strata: Vec::new(),
            pluri: None,
            sheaves: Vec::new(),
            flags: ModelFlags::default(),
        })
    }

    /// Builds the grid from a function of `(p, q)`.
    pub fn from_fn(n: usize, g: usize, mut f: impl FnMut(usize, usize) -> RankFunction) -> Self {
        let mut hodge = Vec::with_capacity((n + 1) * (n + 1));
        for p in 0..=n {
            for q in 0..=n {
                hodge.push(f(p, q));
            }
        }
        VarietyModel::new(n, g, hodge).expect("grid has the right size")
    }

    pub fn with_defect_strata(mut self, strata: &[(usize, usize)]) -> Self {
        self.defect_strata = strata.iter().map(|&(l, d)| DefectStratum::new(l, d)).collect();
        self
    }

    pub fn with_pluri(mut self, pluri: PluriData) -> Self {
        self.pluri = Some(pluri);
        self
    }

    pub fn with_sheaf(mut self, sheaf: SheafFamily) -> Self {
        self.sheaves.push(sheaf);
        self
    }

    pub fn with_flags(mut self, flags: ModelFlags) -> Self {
        self.flags = flags;
        self
    }

    /// Real dimension `2g` of the dual torus.
    pub fn ambient_dim(&self) -> usize {
        2 * self.g
    }

    pub fn hodge(&self, p: usize, q: usize) -> &RankFunction {
        &self.hodge[p * (self.n + 1) + q]
    }

    pub fn hodge_mut(&mut self, p: usize, q: usize) -> &mut RankFunction {
        let n = self.n;
        &mut self.hodge[p * (n + 1) + q]
    }

    pub fn sheaf(&self, name: &str) -> Result<&SheafFamily> {
        self.sheaves
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSheaf(name.into()))
    }

    /// `h^{p,q}(X)`, the rank at the trivial bundle.
    pub fn hodge_number(&self, p: usize, q: usize) -> u64 {
        self.hodge(p, q)
            .rank_at(&TorusPoint::origin(self.ambient_dim()))
            .expect("grid entries live on the dual torus")
    }

    fn all_rank_functions(&self) -> impl Iterator<Item = (String, &RankFunction)> {
        let n = self.n;
        let grid = self
            .hodge
            .iter()
            .enumerate()
            .map(move |(i, rf)| (format!("hodge({},{})", i / (n + 1), i % (n + 1)), rf));
        let sheaves = self.sheaves.iter().flat_map(|s| {
            s.ranks
                .iter()
                .enumerate()
                .map(move |(i, rf)| (format!("{}[{}]", s.name, i), rf))
        });
        grid.chain(sheaves)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    /// For each `p`, the `q` with `V^q(Ω^p)` a proper subset of the torus.
    pub weak_gv_table: Vec<Vec<usize>>,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        !self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings.iter().filter(|f| f.severity == severity).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationOptions {
    /// Duality is sampled on `S_d` for `d` up to this order.
    pub serre_order: u64,
    pub limits: Limits,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            serre_order: 2,
            limits: Limits::default(),
        }
    }
}

struct Findings(Vec<Finding>);

impl Findings {
    fn push(&mut self, severity: Severity, message: String) {
        self.0.push(Finding { severity, message });
    }
}

pub fn validate_model(model: &VarietyModel, opts: &ValidationOptions) -> ValidationReport {
    let mut out = Findings(Vec::new());
    let n = model.n;
    let dim = model.ambient_dim();

    if model.hodge.len() != (n + 1) * (n + 1) {
        out.push(
            Severity::Error,
            format!(
                "hodge grid has {} entries, expected {}",
                model.hodge.len(),
                (n + 1) * (n + 1)
            ),
        );
        return ValidationReport {
            findings: out.0,
            weak_gv_table: Vec::new(),
        };
    }

    let mut shapes_ok = true;
    for (label, rf) in model.all_rank_functions() {
        shapes_ok &= check_rank_function(&label, rf, dim, &mut out);
    }

    check_defect(model, &mut out);

    if shapes_ok {
        let origin = TorusPoint::origin(dim);
        if model.hodge_number(0, 0) != 1 {
            out.push(
                Severity::Error,
                format!("h^0(O_X) = {}, expected 1", model.hodge_number(0, 0)),
            );
        }
        if n >= 1 && model.hodge_number(1, 0) as usize != model.g {
            out.push(
                Severity::Warning,
                format!("h^(1,0) = {} differs from g = {}", model.hodge_number(1, 0), model.g),
            );
        }
        if model.flags.semismall {
            for p in 0..=n {
                for q in 0..=n {
                    if p + q != n && model.hodge(p, q).is_full_locus() {
                        out.push(
                            Severity::Warning,
                            format!("semismall model has a full locus V^{q}(Omega^{p}) with n-p-q != 0"),
                        );
                    }
                }
            }
        }
        check_chi_balance(model, &origin, &mut out);
        if model.flags.serre_check {
            check_serre(model, opts, &mut out);
        }
    }

    if let Some(pluri) = &model.pluri {
        check_pluri(model, pluri, &mut out);
    }

    let weak_gv_table = if shapes_ok {
        (0..=n)
            .map(|p| (0..=n).filter(|&q| !model.hodge(p, q).is_full_locus()).collect())
            .collect()
    } else {
        Vec::new()
    };
    ValidationReport {
        findings: out.0,
        weak_gv_table,
    }
}

fn check_rank_function(label: &str, rf: &RankFunction, dim: usize, out: &mut Findings) -> bool {
    if rf.ambient_dim() != dim {
        out.push(
            Severity::Error,
            format!(
                "{label}: ambient dimension {} but the dual torus has {dim}",
                rf.ambient_dim()
            ),
        );
        return false;
    }
    let mut normalized = Vec::new();
    for (i, s) in rf.strata().iter().enumerate() {
        if s.value <= rf.generic() {
            out.push(
                Severity::Error,
                format!(
                    "{label}: stratum {i} has value {} not above the generic value {}",
                    s.value,
                    rf.generic()
                ),
            );
        }
        match s.coset.normalize() {
            None => out.push(Severity::Warning, format!("{label}: stratum {i} is empty")),
            Some(nc) => {
                if nc.dimension() % 2 == 1 {
                    out.push(
                        Severity::Warning,
                        format!("{label}: stratum {i} has odd real dimension {}", nc.dimension()),
                    );
                }
                if nc.dimension() == dim && rf.generic() == 0 {
                    out.push(
                        Severity::Warning,
                        format!("{label}: stratum {i} fills the torus; its value acts as the generic value"),
                    );
                }
                normalized.push((i, s));
            }
        }
    }
    for (a, (i, si)) in normalized.iter().enumerate() {
        for (j, sj) in normalized.iter().skip(a + 1) {
            if si.value == sj.value {
                continue;
            }
            let Ok(meet) = si.coset.intersect(&sj.coset) else {
                continue;
            };
            if meet.normalize().is_none() {
                continue;
            }
            let nested =
                si.coset.is_subset_of(&sj.coset).unwrap_or(false) || sj.coset.is_subset_of(&si.coset).unwrap_or(false);
            if !nested {
                out.push(
                    Severity::Info,
                    format!(
                        "{label}: strata {i} and {j} overlap with values {} and {}; the maximum is used",
                        si.value, sj.value
                    ),
                );
            }
        }
    }
    true
}

fn check_defect(model: &VarietyModel, out: &mut Findings) {
    if model.defect_strata.is_empty() {
        return;
    }
    match defect(model) {
        Err(e) => out.push(Severity::Error, format!("defect stratification: {e}")),
        Ok(delta) if delta < 0 => out.push(
            Severity::Error,
            format!("defect stratification gives delta = {delta} < 0"),
        ),
        Ok(delta) => {
            if model.flags.semismall && delta != 0 {
                out.push(
                    Severity::Error,
                    format!("model is flagged semismall but delta = {delta}"),
                );
            }
        }
    }
    let mut sorted = model.defect_strata.clone();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[1].locus_dim > w[0].locus_dim {
            out.push(
                Severity::Warning,
                format!(
                    "dim V_{} = {} exceeds dim V_{} = {}; the loci should be nested",
                    w[1].fiber_dim, w[1].locus_dim, w[0].fiber_dim, w[0].locus_dim
                ),
            );
        }
    }
    for s in &model.defect_strata {
        if s.locus_dim > model.g || s.fiber_dim > model.n {
            out.push(
                Severity::Warning,
                format!(
                    "defect stratum (l={}, dim={}) is out of range for n={}, g={}",
                    s.fiber_dim, s.locus_dim, model.n, model.g
                ),
            );
        }
    }
}

/// Alternating sums over `q` must be constant on the torus.
fn check_chi_balance(model: &VarietyModel, origin: &TorusPoint, out: &mut Findings) {
    for p in 0..=model.n {
        let generic = chi_generic(model, p);
        let mut probes = alloc::vec![origin.clone()];
        for q in 0..=model.n {
            for s in model.hodge(p, q).strata() {
                if let Some(nc) = s.coset.normalize() {
                    probes.push(nc.witness().clone());
                }
            }
        }
        for alpha in probes {
            let at = chi_at(model, p, &alpha);
            if at != generic {
                out.push(
                    Severity::Warning,
                    format!(
                        "chi(Omega^{p} ⊗ α) = {at} at {:?} but {generic} generically",
                        alpha.coords()
                    ),
                );
                break;
            }
        }
    }
}

fn chi_generic(model: &VarietyModel, p: usize) -> i128 {
    (0..=model.n)
        .map(|q| sign(q) * i128::from(model.hodge(p, q).effective_generic()))
        .sum()
}

fn chi_at(model: &VarietyModel, p: usize, alpha: &TorusPoint) -> i128 {
    (0..=model.n)
        .map(|q| sign(q) * i128::from(model.hodge(p, q).rank_at(alpha).unwrap_or(0)))
        .sum()
}

fn sign(q: usize) -> i128 {
    if q.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check_serre(model: &VarietyModel, opts: &ValidationOptions, out: &mut Findings) {
    let n = model.n;
    for d in 1..=opts.serre_order.max(1) {
        let points = match all_torsion_points(model.ambient_dim(), d, &opts.limits) {
            Ok(pts) => pts,
            Err(e) => {
                out.push(
                    Severity::Warning,
                    format!("Serre duality check skipped at d = {d}: {e}"),
                );
                return;
            }
        };
        for p in 0..=n {
            for q in 0..=n {
                let (rf, dual) = (model.hodge(p, q), model.hodge(n - p, n - q));
                let bad = points
                    .iter()
                    .find(|a| rf.rank_at(a).ok() != dual.rank_at(&a.neg()).ok());
                if let Some(a) = bad {
                    out.push(
                        Severity::Warning,
                        format!(
                            "h^{q}(Omega^{p} ⊗ α) and h^{}(Omega^{} ⊗ α^-1) differ at α = {:?}",
                            n - q,
                            n - p,
                            a.coords()
                        ),
                    );
                }
            }
        }
    }
}

fn check_pluri(model: &VarietyModel, pluri: &PluriData, out: &mut Findings) {
    if pluri.q_z > model.g {
        out.push(Severity::Error, format!("q(Z) = {} exceeds g = {}", pluri.q_z, model.g));
        return;
    }
    for (&m, v) in &pluri.values {
        if let Some(o) = v.at_origin {
            if o < v.generic {
                out.push(
                    Severity::Error,
                    format!(
                        "P_{m}: origin value {o} is below the value {} on the translates",
                        v.generic
                    ),
                );
            }
        }
        match pluri.rank_for(model.g, m) {
            Err(e) => out.push(Severity::Error, format!("P_{m}: {e}")),
            Ok(rf) => {
                let expected = 2 * pluri.q_z;
                if let Some(dim) = rf.locus_dimension() {
                    if dim != expected && !(pluri.translates.is_empty() && dim == 0) {
                        out.push(
                            Severity::Warning,
                            format!("P_{m}: locus has real dimension {dim}, expected 2 q(Z) = {expected}"),
                        );
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeakGv {
    Index(usize),
    NotWeakGv,
}

/// Weak GV classification of `Ω^p`: at most one `q` may have a full locus.
pub fn classify_weak_gv(model: &VarietyModel, p: usize) -> WeakGv {
    let full: Vec<usize> = (0..=model.n).filter(|&q| model.hodge(p, q).is_full_locus()).collect();
    match full.as_slice() {
        [] => WeakGv::Index(model.n - p),
        [q] => WeakGv::Index(*q),
        _ => WeakGv::NotWeakGv,
    }
}

/// `Ω^p` weak GV with index `n − p` for every `p`.
pub fn is_weak_gnv(model: &VarietyModel) -> bool {
    (0..=model.n).all(|p| classify_weak_gv(model, p) == WeakGv::Index(model.n - p))
}

/// `δ = max_l (2l − n + dim V_l)`.
pub fn defect(model: &VarietyModel) -> Result<i64> {
    if !model.defect_strata.iter().any(|s| s.fiber_dim == 0) {
        return Err(Error::MissingStratification);
    }
    let n = model.n as i64;
    Ok(model
        .defect_strata
        .iter()
        .map(|s| 2 * s.fiber_dim as i64 - n + s.locus_dim as i64)
        .max()
        .expect("nonempty"))
}

/// Total number of connected components over all nonempty strata.
pub fn component_total(rf: &RankFunction) -> BigInt {
    rf.strata()
        .iter()
        .filter_map(|s| s.coset.normalize())
        .map(|nc| nc.component_count().clone())
        .sum()
}
