//! Text, CSV and JSON renderings of engine results.

use std::fmt::Write as _;
use std::io::Write;

use albtower_core::asymptotics::{tower_report, Divergence, TowerReport};
use albtower_core::torsion::PreparedUnion;
use albtower_core::{BigInt, BigRational, CongruenceCoset, Invariant, Limits, Tower};
use anyhow::Result;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::model_file::{format_rational, SCHEMA_VERSION};

/// Digits after the point in `_approx` columns.
pub const APPROX_PLACES: usize = 12;

/// `x` rounded half away from zero to `places` decimals, computed exactly.
pub fn decimal(x: &BigRational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let (whole, rem) = scaled.numer().div_rem(scaled.denom());
    let digits = if rem * 2 >= *scaled.denom() { whole + 1 } else { whole };
    let (int, frac) = digits.div_rem(&scale);
    let sign = if x.is_negative() && !digits.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0>places$}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub d: u64,
    pub tau: BigInt,
    /// `d^{dim}` for the largest component, `None` for an empty locus.
    pub reference: Option<BigInt>,
}

pub fn count_rows(dim: usize, components: &[CongruenceCoset], ds: &[u64], limits: &Limits) -> Result<Vec<CountRow>> {
    let union = PreparedUnion::new(dim, components, limits)?;
    let top = union.max_dim();
    ds.iter()
        .map(|&d| {
            Ok(CountRow {
                d,
                tau: union.count(d)?,
                reference: top.map(|k| num_traits::pow(BigInt::from(d), k)),
            })
        })
        .collect()
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

pub fn render_count(rows: &[CountRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.tau.to_string(),
                r.reference.as_ref().map_or_else(|| "-".into(), ToString::to_string),
            ]
        })
        .collect();
    table(&["d", "tau_d", "d^dim"], &body)
}

fn selectors(tower: &Tower, pluri: &[u32]) -> Vec<(String, Invariant)> {
    let n = tower.model().n;
    let mut out = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            out.push((format!("h_{p}_{q}"), Invariant::Hodge { p, q }));
        }
    }
    for k in 0..=2 * n {
        out.push((format!("b_{k}"), Invariant::Betti(k)));
    }
    out.push(("q".into(), Invariant::Irregularity));
    for &m in pluri {
        out.push((format!("P_{m}"), Invariant::Plurigenus(m)));
    }
    out
}

/// Plurigenus indices with data in the model, ascending.
pub fn available_pluri(tower: &Tower) -> Vec<u32> {
    tower
        .model()
        .pluri
        .as_ref()
        .map(|p| p.values.keys().copied().collect())
        .unwrap_or_default()
}

/// One row per `d = 1..=d_max`: exact invariants, exact normalized values and
/// their decimal approximations.
pub fn write_tower_csv(tower: &Tower, d_max: u64, pluri: &[u32], out: impl Write) -> Result<()> {
    let sel = selectors(tower, pluri);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["schema_version".to_string(), "d".into(), "deg".into()];
    header.extend(sel.iter().map(|(name, _)| name.clone()));
    header.push("chi_top".into());
    for (name, _) in &sel {
        header.push(format!("{name}_norm"));
        header.push(format!("{name}_norm_approx"));
    }
    w.write_record(&header)?;
    for d in 1..=d_max {
        let cover = tower.cover_invariants(d)?;
        let mut values = Vec::with_capacity(sel.len());
        for (_, s) in &sel {
            values.push(tower.invariant(s, d)?);
        }
        let mut record = vec![SCHEMA_VERSION.to_string(), d.to_string(), cover.deg.to_string()];
        record.extend(values.iter().map(ToString::to_string));
        record.push(cover.chi_top.to_string());
        for v in values {
            let norm = BigRational::new(v, cover.deg.clone());
            record.push(format_rational(&norm));
            record.push(decimal(&norm, APPROX_PLACES));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub struct CheckOutcome {
    pub report: TowerReport,
    pub human: String,
    pub json: Value,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.report.all_pass()
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".into(), ToString::to_string)
}

pub fn check(tower: &Tower, label: &str, defect_bound: Option<i64>, d_max: u64) -> Result<CheckOutcome> {
    let report = tower_report(tower, defect_bound, d_max)?;
    let model = tower.model();
    let pass = report.all_pass();

    let mut human = String::new();
    writeln!(human, "model     {label}")?;
    writeln!(human, "n, g      {}, {}", model.n, model.g)?;
    writeln!(human, "defect    {}", opt(&report.defect))?;
    writeln!(human, "bound N   {}", report.defect_bound)?;
    writeln!(human, "d_max     {d_max}")?;
    writeln!(human)?;
    let rows: Vec<Vec<String>> = report
        .fits
        .iter()
        .map(|f| {
            vec![
                f.p.to_string(),
                f.q.to_string(),
                f.exponent.to_string(),
                opt(&f.locus_dim),
                opt(&f.growth_degree),
                decimal(&f.fitted_b, 4),
                if f.pass { "pass" } else { "FAIL" }.into(),
                if f.routes_agree { "" } else { "routes disagree" }.into(),
            ]
        })
        .collect();
    human.push_str(&table(
        &["p", "q", "e", "locus", "growth", "B_fit", "verdict", ""],
        &rows,
    ));
    writeln!(human)?;
    let witness = report.witness.map(|(p, q)| format!("({p},{q})"));
    writeln!(
        human,
        "converse witness  {}",
        witness.clone().unwrap_or_else(|| "none".into())
    )?;
    let divergence = match &report.divergence {
        Divergence::Bounded => "Bounded".to_string(),
        Divergence::Divergent { real_dim, order, .. } => {
            format!("Divergent (real dim {real_dim}, torsion order {order})")
        }
    };
    writeln!(human, "q(X_d)            {divergence}")?;
    let l2 = &report.l2;
    let b2: Vec<String> = l2.b2.iter().map(ToString::to_string).collect();
    writeln!(human, "L2 Betti          [{}]", b2.join(", "))?;
    writeln!(human, "weak GNV          {}", if l2.weak_gnv { "yes" } else { "no" })?;
    writeln!(human, "chi_top           {}", l2.chi_top)?;
    match l2.error_gap {
        Some(gap) => writeln!(
            human,
            "middle error      |b_{}/deg - b2| <= {} d^-{gap}",
            model.n, l2.error_constant
        )?,
        None => writeln!(human, "middle error      0 (no jumps in middle degree)")?,
    }
    if let Some(c) = &l2.caveat {
        writeln!(human, "caveat            {c}")?;
    }
    writeln!(human, "result            {}", if pass { "PASS" } else { "FAIL" })?;

    let fits: Vec<Value> = report
        .fits
        .iter()
        .map(|f| {
            json!({
                "p": f.p,
                "q": f.q,
                "exponent": f.exponent,
                "fitted_b": format_rational(&f.fitted_b),
                "fitted_b_approx": decimal(&f.fitted_b, APPROX_PLACES),
                "locus_dim": f.locus_dim,
                "growth_degree": f.growth_degree,
                "pass": f.pass,
                "routes_agree": f.routes_agree,
            })
        })
        .collect();
    let divergence = match &report.divergence {
        Divergence::Bounded => json!({ "class": "Bounded" }),
        Divergence::Divergent {
            real_dim,
            order,
            witnesses,
        } => json!({
            "class": "Divergent",
            "real_dim": real_dim,
            "order": order.to_string(),
            "witnesses": witnesses.iter().map(|(d, q)| json!([d, q.to_string()])).collect::<Vec<_>>(),
        }),
    };
    let json = json!({
        "schema_version": SCHEMA_VERSION,
        "model": label,
        "n": model.n,
        "g": model.g,
        "defect": report.defect,
        "defect_bound": report.defect_bound,
        "d_max": d_max,
        "fits": fits,
        "witness": report.witness.map(|(p, q)| [p, q]),
        "divergence": divergence,
        "l2": {
            "h2": l2.h2.iter().map(|row| row.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "b2": l2.b2.iter().map(format_rational).collect::<Vec<_>>(),
            "nonvanishing": l2.nonvanishing,
            "weak_gnv": l2.weak_gnv,
            "chi_top": l2.chi_top.to_string(),
            "error_constant": l2.error_constant.to_string(),
            "error_gap": l2.error_gap,
            "caveat": l2.caveat,
        },
        "pass": pass,
    });
    Ok(CheckOutcome { report, human, json })
}
