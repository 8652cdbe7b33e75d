//! JSON model and locus files.
//!
//! Rationals are written as `"num/den"` strings so nothing is rounded.

use std::collections::BTreeMap;

use albtower_core::model::{DefectStratum, ModelFlags, PluriData, PluriValue, SheafFamily};
use albtower_core::{BigInt, BigRational, CongruenceCoset, IntMatrix, RankFunction, Stratum, TorusPoint, VarietyModel};
use anyhow::{anyhow, bail, ensure, Context, Result};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetRecord {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumRecord {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    pub b: Vec<String>,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HodgeRecord {
    pub p: usize,
    pub q: usize,
    pub generic: u64,
    #[serde(default)]
    pub strata: Vec<StratumRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankRecord {
    pub generic: u64,
    #[serde(default)]
    pub strata: Vec<StratumRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectRecord {
    pub fiber_dim: usize,
    pub locus_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluriValueRecord {
    pub generic: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_origin: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PluriRecord {
    pub q_z: usize,
    /// Integer rows cutting out `Pic⁰(Z)`; absent for the full torus or a point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subtorus: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub translates: Vec<Vec<String>>,
    /// Keyed by `m`.
    pub values: BTreeMap<u32, PluriValueRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafRecord {
    pub name: String,
    pub ranks: Vec<RankRecord>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsRecord {
    #[serde(default)]
    pub semismall: bool,
    #[serde(default)]
    pub serre_check: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    pub n: usize,
    pub g: usize,
    pub hodge: Vec<HodgeRecord>,
    #[serde(default)]
    pub defect_strata: Vec<DefectRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pluri: Option<PluriRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sheaves: Vec<SheafRecord>,
    #[serde(default)]
    pub flags: FlagsRecord,
}

/// A union of cosets, for `count --locus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocusFile {
    pub schema_version: u32,
    /// Real dimension `2g` of the torus.
    pub dim: usize,
    pub components: Vec<CosetRecord>,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|e| anyhow!("bad numerator in `{s}`: {e}"))?;
    let den: BigInt = den.parse().map_err(|e| anyhow!("bad denominator in `{s}`: {e}"))?;
    ensure!(den != BigInt::from(0), "zero denominator in `{s}`");
    Ok(BigRational::new(num, den))
}

pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| anyhow!("matrix entry {x} does not fit in 64 bits"))
}

fn matrix_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(small).collect()).collect()
}

fn coset_from(dim: usize, a: &[Vec<i64>], b: &[String]) -> Result<CongruenceCoset> {
    let matrix = IntMatrix::from_rows(dim, a)?;
    let offset = b.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
    Ok(CongruenceCoset::new(dim, matrix, offset)?)
}

fn coset_to(c: &CongruenceCoset) -> Result<(Vec<Vec<i64>>, Vec<String>)> {
    Ok((
        matrix_rows(c.matrix())?,
        c.offset().iter().map(format_rational).collect(),
    ))
}

fn rank_from(dim: usize, generic: u64, strata: &[StratumRecord]) -> Result<RankFunction> {
    let strata = strata
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let coset = coset_from(dim, &s.a, &s.b).with_context(|| format!("stratum {i}"))?;
            Ok(Stratum::new(coset, s.value))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RankFunction::new(dim, generic, strata)?)
}

fn strata_to(rf: &RankFunction) -> Result<Vec<StratumRecord>> {
    rf.strata()
        .iter()
        .map(|s| {
            let (a, b) = coset_to(&s.coset)?;
            Ok(StratumRecord { a, b, value: s.value })
        })
        .collect()
}

fn point_from(coords: &[String]) -> Result<TorusPoint> {
    Ok(TorusPoint::new(
        coords.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
    ))
}

impl ModelFile {
    pub fn from_model(model: &VarietyModel) -> Result<Self> {
        let n = model.n;
        let mut hodge = Vec::with_capacity((n + 1) * (n + 1));
        for p in 0..=n {
            for q in 0..=n {
                let rf = model.hodge(p, q);
                hodge.push(HodgeRecord {
                    p,
                    q,
                    generic: rf.generic(),
                    strata: strata_to(rf)?,
                });
            }
        }
        let pluri = match &model.pluri {
            None => None,
            Some(data) => Some(PluriRecord {
                q_z: data.q_z,
                subtorus: data.subtorus.as_ref().map(matrix_rows).transpose()?,
                translates: data
                    .translates
                    .iter()
                    .map(|t| t.coords().iter().map(format_rational).collect())
                    .collect(),
                values: data
                    .values
                    .iter()
                    .map(|(&m, v)| {
                        (
                            m,
                            PluriValueRecord {
                                generic: v.generic,
                                at_origin: v.at_origin,
                            },
                        )
                    })
                    .collect(),
            }),
        };
        let sheaves = model
            .sheaves
            .iter()
            .map(|s| {
                let ranks = s
                    .ranks
                    .iter()
                    .map(|rf| {
                        Ok(RankRecord {
                            generic: rf.generic(),
                            strata: strata_to(rf)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(SheafRecord {
                    name: s.name.clone(),
                    ranks,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ModelFile {
            schema_version: SCHEMA_VERSION,
            n,
            g: model.g,
            hodge,
            defect_strata: model
                .defect_strata
                .iter()
                .map(|s| DefectRecord {
                    fiber_dim: s.fiber_dim,
                    locus_dim: s.locus_dim,
                })
                .collect(),
            pluri,
            sheaves,
            flags: FlagsRecord {
                semismall: model.flags.semismall,
                serre_check: model.flags.serre_check,
            },
        })
    }

    pub fn to_model(&self) -> Result<VarietyModel> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            self.schema_version
        );
        let (n, dim) = (self.n, 2 * self.g);
        let mut grid: Vec<Option<RankFunction>> = vec![None; (n + 1) * (n + 1)];
        for h in &self.hodge {
            ensure!(h.p <= n && h.q <= n, "hodge entry ({}, {}) outside 0..={n}", h.p, h.q);
            let slot = &mut grid[h.p * (n + 1) + h.q];
            ensure!(slot.is_none(), "hodge entry ({}, {}) given twice", h.p, h.q);
            *slot = Some(rank_from(dim, h.generic, &h.strata).with_context(|| format!("hodge ({}, {})", h.p, h.q))?);
        }
        let hodge = grid
            .into_iter()
            .enumerate()
            .map(|(i, rf)| rf.ok_or_else(|| anyhow!("hodge entry ({}, {}) missing", i / (n + 1), i % (n + 1))))
            .collect::<Result<Vec<_>>>()?;
        let mut model = VarietyModel::new(n, self.g, hodge)?;
        model.defect_strata = self
            .defect_strata
            .iter()
            .map(|s| DefectStratum::new(s.fiber_dim, s.locus_dim))
            .collect();
        if let Some(p) = &self.pluri {
            let subtorus = p
                .subtorus
                .as_ref()
                .map(|rows| IntMatrix::from_rows(dim, rows))
                .transpose()?;
            let translates = p.translates.iter().map(|t| point_from(t)).collect::<Result<Vec<_>>>()?;
            for t in &translates {
                ensure!(
                    t.dim() == dim,
                    "pluri translate has {} coordinates, expected {dim}",
                    t.dim()
                );
            }
            let values = p
                .values
                .iter()
                .map(|(&m, v)| {
                    (
                        m,
                        PluriValue {
                            generic: v.generic,
                            at_origin: v.at_origin,
                        },
                    )
                })
                .collect();
            model.pluri = Some(PluriData {
                q_z: p.q_z,
                subtorus,
                translates,
                values,
            });
        }
        for s in &self.sheaves {
            let ranks = s
                .ranks
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    rank_from(dim, r.generic, &r.strata).with_context(|| format!("sheaf {} degree {i}", s.name))
                })
                .collect::<Result<_>>()?;
            model.sheaves.push(SheafFamily {
                name: s.name.clone(),
                ranks,
            });
        }
        model.flags = ModelFlags {
            semismall: self.flags.semismall,
            serre_check: self.flags.serre_check,
        };
        Ok(model)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl LocusFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: LocusFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            bail!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            );
        }
        Ok(file)
    }

    pub fn components(&self) -> Result<Vec<CongruenceCoset>> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| coset_from(self.dim, &c.a, &c.b).with_context(|| format!("component {i}")))
            .collect()
    }
}
