use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use albtower::model_file::{LocusFile, ModelFile};
use albtower::report::{self, available_pluri};
use albtower::source::{self, Loaded, Rejected};
use albtower_core::catalog::{self, ENTRIES};
use albtower_core::model::ValidationOptions;
use albtower_core::{Limits, Tower};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "albtower",
    version,
    about = "Exact invariants of towers of abelian covers from jump-locus models"
)]
struct Cli {
    /// Maximum number of cosets in one inclusion-exclusion.
    #[arg(long, global = true, default_value_t = Limits::default().component_budget)]
    budget: usize,
    /// Maximum number of torsion points to enumerate by brute force.
    #[arg(long = "enum-cap", global = true, default_value_t = Limits::default().enumeration_cap)]
    enum_cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct ModelSource {
    /// Catalog entry, `name` or `name:a,b,...`.
    #[arg(long)]
    builtin: Option<String>,
    /// JSON model file.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = false, multiple = false)]
struct OptionalSource {
    /// Catalog entry, `name` or `name:a,b,...`.
    #[arg(long)]
    builtin: Option<String>,
    /// JSON model file.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Count torsion points of order dividing d on a jump locus.
    Count {
        #[command(flatten)]
        source: OptionalSource,
        /// Hodge index `p,q`: counts where h^q(Ω^p ⊗ α) exceeds its generic value.
        #[arg(long = "i", value_name = "P,Q", conflicts_with = "locus")]
        index: Option<String>,
        /// JSON locus file (union of cosets).
        #[arg(long)]
        locus: Option<PathBuf>,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
    },
    /// CSV of exact and normalized invariants of X_d for d = 1..=D.
    Tower {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long = "d-max", default_value_t = 4)]
        d_max: u64,
        /// Plurigenus indices to include (default: every m with data).
        #[arg(long, value_delimiter = ',')]
        pluri: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decay-bound grid, converse witness, irregularity growth and L2 report.
    Check {
        #[command(flatten)]
        source: ModelSource,
        /// Defect N in the decay exponent; defaults to the model's own defect.
        #[arg(long = "defect-bound", allow_hyphen_values = true)]
        defect_bound: Option<i64>,
        #[arg(long = "d-max", default_value_t = 4)]
        d_max: u64,
        #[arg(long, value_enum, default_value_t = Format::Both)]
        format: Format,
    },
    /// Validate a model and print every finding.
    Validate {
        #[command(flatten)]
        source: ModelSource,
        /// Serre duality is sampled on d-torsion for d up to this order.
        #[arg(long = "serre-order", default_value_t = 2)]
        serre_order: u64,
    },
    /// Write a model as a JSON model file.
    Export {
        #[command(flatten)]
        source: ModelSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List catalog entries with their parameters and defaults.
    CatalogList,
}

fn load(builtin: &Option<String>, model: &Option<PathBuf>) -> Result<Option<Loaded>> {
    match (builtin, model) {
        (Some(spec), _) => Loaded::builtin(spec).map(Some),
        (None, Some(path)) => Loaded::file(path).map(Some),
        (None, None) => Ok(None),
    }
}

fn load_required(src: &ModelSource) -> Result<Loaded> {
    Ok(load(&src.builtin, &src.model)?.expect("clap requires a model source"))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [p, q] => Ok((p.parse()?, q.parse()?)),
        _ => bail!("expected `p,q`, got `{s}`"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let limits = Limits {
        component_budget: cli.budget,
        enumeration_cap: cli.enum_cap,
    };
    let opts = ValidationOptions {
        limits,
        ..ValidationOptions::default()
    };
    match cli.command {
        Command::Count {
            source,
            index,
            locus,
            d,
        } => {
            let (dim, components, note) = match (index, locus) {
                (Some(idx), _) => {
                    let loaded =
                        load(&source.builtin, &source.model)?.context("--i needs a model (--builtin or --model)")?;
                    source::checked(&loaded.model, &opts)?;
                    let (p, q) = parse_pair(&idx)?;
                    let n = loaded.model.n;
                    if p > n || q > n {
                        bail!("(p, q) = ({p}, {q}) outside 0..={n}");
                    }
                    let rf = loaded.model.hodge(p, q);
                    let note = format!(
                        "{}: h^{q}(Omega^{p} + alpha) above generic value {}",
                        loaded.label,
                        rf.effective_generic()
                    );
                    (rf.ambient_dim(), rf.jump_set(), note)
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let file = LocusFile::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
                    (file.dim, file.components()?, format!("locus {}", path.display()))
                }
                (None, None) => bail!("count needs --i p,q or --locus FILE"),
            };
            let rows = report::count_rows(dim, &components, &d, &limits)?;
            println!("# {note}");
            print!("{}", report::render_count(&rows));
        }
        Command::Tower {
            source,
            d_max,
            pluri,
            out,
        } => {
            let loaded = load_required(&source)?;
            source::checked(&loaded.model, &opts)?;
            let tower = Tower::new(&loaded.model, limits)?;
            let pluri = if pluri.is_empty() {
                available_pluri(&tower)
            } else {
                pluri
            };
            let mut w = sink(&out)?;
            report::write_tower_csv(&tower, d_max, &pluri, &mut w)?;
            w.flush()?;
        }
        Command::Check {
            source,
            defect_bound,
            d_max,
            format,
        } => {
            let loaded = load_required(&source)?;
            source::checked(&loaded.model, &opts)?;
            let tower = Tower::new(&loaded.model, limits)?;
            let outcome = report::check(&tower, &loaded.label, defect_bound, d_max)?;
            let json = serde_json::to_string_pretty(&outcome.json)?;
            match format {
                Format::Human => print!("{}", outcome.human),
                Format::Json => println!("{json}"),
                Format::Both => {
                    print!("{}", outcome.human);
                    println!("\n--- json ---");
                    println!("{json}");
                }
            }
            if !outcome.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Validate { source, serre_order } => {
            let loaded = load_required(&source)?;
            let opts = ValidationOptions { serre_order, ..opts };
            let report = source::checked(&loaded.model, &opts)?;
            println!("{}: accepted", loaded.label);
            print!("{}", source::render_report(&report));
            let table: Vec<String> = report
                .weak_gv_table
                .iter()
                .enumerate()
                .map(|(p, qs)| format!("p={p}: {qs:?}"))
                .collect();
            println!("proper loci  {}", table.join("  "));
        }
        Command::Export { source, out } => {
            let loaded = load_required(&source)?;
            source::checked(&loaded.model, &opts)?;
            let text = ModelFile::from_model(&loaded.model)?.to_json()?;
            let mut w = sink(&out)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        Command::CatalogList => {
            for (name, keys, defaults) in ENTRIES {
                let params: Vec<String> = keys
                    .iter()
                    .zip(defaults.iter())
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                let entry = catalog::builtin(name, &[])?;
                println!("{name}({})", params.join(", "));
                println!("    n={} g={}  {}", entry.model.n, entry.model.g, entry.oracle_notes);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            if let Some(rejected) = err.downcast_ref::<Rejected>() {
                eprint!("{rejected}");
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(2)
        }
    }
}
