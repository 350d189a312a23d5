//! Command-line front end for the `hasse` library.
//!
//! Exit codes: 0 on success, 2 on bad input or I/O trouble, 3 when a
//! computed result contradicts a proven statement.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hasse::asymptotics::{self, Model};
use hasse::census::{self, CensusSpec};
use hasse::geometry;
use hasse::rigidity::{self, BoundReport};
use hasse::fields::make_field;
use hasse::{CountTable, Magnitude, QuadraticField, QuaternionAlgebraL, QuaternionAlgebraQ};

pub mod cache;

use cache::{cached_table, Cache};

pub const CACHE_ENV: &str = "HASSE_CACHE_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hasse::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache corrupted: {0}")]
    CacheCorrupt(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_invariant_violation() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hasse", version, about = "Counts of algebras over Q and quadratic fields, with asymptotics and rigidity checks")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of census shards run in parallel.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    shards: u32,
    /// Census cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Working precision in bits. Values are accepted from 64 up; the arithmetic is f64 throughout.
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(64..))]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact counts by discriminant.
    #[command(subcommand)]
    Census(CensusCmd),
    /// Asymptotic constants and count/prediction ratios.
    #[command(subcommand)]
    Predict(PredictCmd),
    /// Closed geodesics from real quadratic fields.
    #[command(subcommand)]
    Geodesics(GeodesicsCmd),
    /// Covolume formulas.
    #[command(subcommand)]
    Volumes(VolumesCmd),
    /// Totally geodesic surfaces.
    #[command(subcommand)]
    Surfaces(SurfacesCmd),
    /// Distinguishing experiments.
    #[command(subcommand)]
    Rigidity(RigidityCmd),
    /// Explicit bound calculators.
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

#[derive(Debug, Args)]
struct Thresholds {
    /// Thresholds, comma separated; `1e8` and `10^8` are accepted.
    #[arg(long = "x", required = true, value_delimiter = ',', value_parser = parse_count)]
    x: Vec<u64>,
}

#[derive(Debug, Subcommand)]
enum CensusCmd {
    Csa {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        x: Thresholds,
    },
    Division {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        x: Thresholds,
    },
    EmbedQuads {
        /// Ramification set such as `2,inf`.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        not_totally_complex: bool,
        #[command(flatten)]
        x: Thresholds,
    },
    QuatSubfields {
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        fields: Vec<i64>,
        #[command(flatten)]
        x: Thresholds,
    },
    FundDisc {
        #[command(flatten)]
        x: Thresholds,
    },
}

#[derive(Debug, Subcommand)]
enum PredictCmd {
    DeltaN {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        cutoff: u64,
    },
    EmbedConstant {
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        fields: Vec<i64>,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        cutoff: u64,
    },
    Report {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fields: Vec<i64>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        cutoff: u64,
        #[command(flatten)]
        x: Thresholds,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelKind {
    Division,
    Embed,
    Quads,
}

#[derive(Debug, Subcommand)]
enum GeodesicsCmd {
    FromField {
        #[arg(long)]
        delta: i64,
    },
    Census {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_parser = parse_count)]
        x: u64,
    },
}

#[derive(Debug, Subcommand)]
enum VolumesCmd {
    Coarea {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Kleinian {
        #[arg(long, allow_hyphen_values = true)]
        field: i64,
        /// Ramified places such as `5.1,5.2`.
        #[arg(long, default_value = "")]
        ram: String,
    },
    MinCf {
        /// Quadratic field supplying d_k, n_k = 2 and ζ_k(2).
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["dk", "nk", "zeta"])]
        field: Option<i64>,
        #[arg(long)]
        dk: Option<u64>,
        #[arg(long)]
        nk: Option<u32>,
        #[arg(long)]
        zeta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        norms: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        kb_index: u64,
    },
}

#[derive(Debug, Subcommand)]
enum SurfacesCmd {
    Census {
        #[arg(long, allow_hyphen_values = true)]
        field: i64,
        #[arg(long, default_value = "")]
        ram: String,
        #[arg(long, value_parser = parse_count)]
        x: u64,
        #[arg(long, default_value_t = 1.0)]
        volume: f64,
        #[arg(long = "const-C", default_value_t = 1.0)]
        const_big_c: f64,
    },
}

#[derive(Debug, Subcommand)]
enum RigidityCmd {
    Distinguish {
        #[arg(long, allow_hyphen_values = true)]
        b1: String,
        #[arg(long, allow_hyphen_values = true)]
        b2: String,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        delta_max: u64,
    },
    Scan {
        #[arg(long = "x", value_parser = parse_count)]
        x: u64,
        #[arg(long, default_value = "1e6", value_parser = parse_count)]
        delta_max: u64,
        #[arg(long)]
        not_totally_complex: bool,
    },
    LimitPair {
        #[arg(long)]
        m: u64,
    },
    Family {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        fields: Vec<i64>,
        #[arg(long)]
        count: usize,
    },
}

#[derive(Debug, Subcommand)]
enum BoundsCmd {
    Recognizing {
        #[arg(long, default_value_t = 1)]
        nk: u32,
        #[arg(long, default_value_t = 1)]
        dk: u64,
        #[arg(long = "x")]
        x: f64,
    },
    Gw {
        #[arg(long, default_value_t = 1)]
        nk: u32,
        #[arg(long)]
        b_omega: f64,
        #[arg(long = "x")]
        x: f64,
    },
    Chlr {
        #[arg(long)]
        volume: f64,
        #[arg(long)]
        dim: u32,
        #[arg(long = "const-c1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long = "const-c2", default_value_t = 1.0)]
        c2: f64,
        #[arg(long = "const-c3", default_value_t = 1.0)]
        c3: f64,
    },
    Mcreid {
        #[arg(long)]
        volume: f64,
        #[arg(long = "const-c", default_value_t = 1.0)]
        c: f64,
    },
    Brauer {
        #[arg(long, default_value_t = 1.0)]
        d_base: f64,
        #[arg(long = "const-C", default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        disc1: f64,
        #[arg(long)]
        disc2: f64,
    },
    Theta {
        #[arg(long = "x", value_parser = parse_count)]
        x: u64,
    },
}

/// Parses `12345`, `1e8` or `10^8`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let pow = |b: &str, e: &str| -> Option<u64> {
        let b: u64 = b.parse().ok()?;
        let e: u32 = e.parse().ok()?;
        b.checked_pow(e)
    };
    if let Some((b, e)) = s.split_once('^') {
        return pow(b, e).ok_or_else(|| format!("not a count: {s}"));
    }
    if let Some((m, e)) = s.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| format!("not a count: {s}"))?;
        return pow("10", e).and_then(|p| p.checked_mul(m)).ok_or_else(|| format!("not a count: {s}"));
    }
    Err(format!("not a count: {s}"))
}

/// A command's result, renderable either way.
struct Rendered {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    json: Value,
    default: Format,
}

impl Rendered {
    fn write(&self, format: Format, w: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.json).expect("json serializes");
                writeln!(w, "{text}")?;
            }
            Format::Csv => {
                let mut wr = csv::Writer::from_writer(Vec::new());
                wr.write_record(&self.header).map_err(csv_err)?;
                for r in &self.rows {
                    wr.write_record(r).map_err(csv_err)?;
                }
                let bytes = wr.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
                w.write_all(&bytes)?;
            }
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

struct Ctx {
    shards: usize,
    cache: Option<Cache>,
}

fn algebra(s: &str) -> CliResult<QuaternionAlgebraQ> {
    Ok(s.parse::<QuaternionAlgebraQ>()?)
}

fn field_list(ds: &[i64]) -> hasse::Result<Vec<QuadraticField>> {
    ds.iter().map(|&d| make_field(d)).collect()
}

fn fields(ds: &[i64]) -> CliResult<Vec<QuadraticField>> {
    Ok(field_list(ds)?)
}

fn table_output(t: &CountTable) -> Rendered {
    Rendered {
        header: vec!["x", "count"],
        rows: t.rows().map(|(x, c)| vec![x.to_string(), c.to_string()]).collect(),
        json: json!({
            "spec": t.spec,
            "rows": t.rows().map(|(x, c)| json!({"x": x.to_string(), "count": c.to_string()})).collect::<Vec<_>>(),
        }),
        default: Format::Csv,
    }
}

fn census_table(ctx: &Ctx, spec: CensusSpec, xs: &[u64]) -> CliResult<CountTable> {
    let shards = ctx.shards;
    let s = spec.clone();
    cached_table(ctx.cache.as_ref(), &spec, xs, move |xs| match &s {
        CensusSpec::Csa { m, n } => census::count_csa_table(*m, *n, xs, shards),
        CensusSpec::Division { n } => census::count_division_table(*n, xs, shards),
        CensusSpec::EmbeddingQuads { ram, not_totally_complex } => {
            census::count_embedding_quads_table(ram, xs, *not_totally_complex)
        }
        CensusSpec::QuatWithSubfields { fields } => {
            census::count_quat_with_subfields_table(&field_list(fields)?, xs)
        }
        CensusSpec::FundamentalDiscriminants => census::fundamental_discriminant_table(xs),
    })
}

fn magnitude_json(m: &Magnitude) -> Value {
    match (m.value(), m.log10_log10) {
        (Some(v), _) => json!(v),
        (None, Some(ll)) if m.log10.is_infinite() => json!({"log10_log10": ll}),
        (None, _) => json!({"log10": m.log10}),
    }
}

fn magnitude_cells(m: &Magnitude) -> [String; 2] {
    let v = m.value().map(|v| v.to_string()).unwrap_or_default();
    let l = if m.log10.is_finite() { m.log10.to_string() } else { format!("10^{}", m.log10_log10.unwrap_or(f64::NAN)) };
    [v, l]
}

fn bound_output(b: &BoundReport) -> Rendered {
    let [v, l] = magnitude_cells(&b.value);
    Rendered {
        header: vec!["bound", "value", "log10"],
        rows: vec![vec![b.bound_name.clone(), v, l]],
        json: json!({
            "bound_name": b.bound_name,
            "symbolic": b.symbolic,
            "inputs": b.inputs,
            "value": magnitude_json(&b.value),
        }),
        default: Format::Csv,
    }
}

fn constant_output(name: &str, c: &hasse::EulerProductValue) -> Rendered {
    Rendered {
        header: vec!["constant", "value", "cutoff", "tail_estimate"],
        rows: vec![vec![name.into(), c.value.to_string(), c.cutoff.to_string(), c.tail_estimate.to_string()]],
        json: json!({"constant": name, "value": c.value, "cutoff": c.cutoff, "tail_estimate": c.tail_estimate}),
        default: Format::Csv,
    }
}

fn geodesic_rows(data: &[hasse::GeodesicDatum]) -> Vec<Vec<String>> {
    data.iter().map(|g| vec![g.disc.to_string(), g.trace.to_string(), g.length.to_string()]).collect()
}

fn execute(cmd: Command, ctx: &Ctx) -> CliResult<Rendered> {
    Ok(match cmd {
        Command::Census(c) => {
            let (spec, xs) = match c {
                CensusCmd::Csa { m, n, x } => (CensusSpec::Csa { m, n }, x.x),
                CensusCmd::Division { n, x } => (CensusSpec::Division { n }, x.x),
                CensusCmd::EmbedQuads { b, not_totally_complex, x } => {
                    (CensusSpec::EmbeddingQuads { ram: algebra(&b)?, not_totally_complex }, x.x)
                }
                CensusCmd::QuatSubfields { fields: fs, x } => {
                    fields(&fs)?;
                    (CensusSpec::QuatWithSubfields { fields: fs }, x.x)
                }
                CensusCmd::FundDisc { x } => (CensusSpec::FundamentalDiscriminants, x.x),
            };
            table_output(&census_table(ctx, spec, &xs)?)
        }
        Command::Predict(p) => match p {
            PredictCmd::DeltaN { n, cutoff } => constant_output(&format!("delta_{n}"), &asymptotics::delta_n(n, cutoff)?),
            PredictCmd::EmbedConstant { fields: fs, cutoff } => {
                let c = asymptotics::embed_constant_general(&fields(&fs)?, cutoff)?;
                let names: Vec<String> = fs.iter().map(|d| d.to_string()).collect();
                constant_output(&format!("embed[{}]", names.join(";")), &c)
            }
            PredictCmd::Report { model, n, fields: fs, b, cutoff, x } => {
                let (model, spec) = match model {
                    ModelKind::Division => {
                        let n = n.ok_or_else(|| CliError::Usage("--n is required for the division model".into()))?;
                        (Model::Division { n }, CensusSpec::Division { n })
                    }
                    ModelKind::Embed => {
                        fields(&fs)?;
                        (Model::Embed { fields: fs.clone() }, CensusSpec::QuatWithSubfields { fields: fs })
                    }
                    ModelKind::Quads => {
                        let ram = algebra(b.as_deref().ok_or_else(|| CliError::Usage("--b is required for the quads model".into()))?)?;
                        (Model::Quads { ram: ram.clone() }, CensusSpec::EmbeddingQuads { ram, not_totally_complex: false })
                    }
                };
                let table = census_table(ctx, spec, &x.x)?;
                let rows = asymptotics::prediction_report(&table, &model, cutoff)?;
                Rendered {
                    header: vec!["x", "count", "predicted", "ratio"],
                    rows: rows
                        .iter()
                        .map(|r| vec![r.x.to_string(), r.count.to_string(), r.predicted.to_string(), r.ratio.to_string()])
                        .collect(),
                    json: json!({
                        "model": model,
                        "rows": rows.iter().map(|r| json!({
                            "x": r.x.to_string(), "count": r.count.to_string(), "predicted": r.predicted, "ratio": r.ratio,
                        })).collect::<Vec<_>>(),
                    }),
                    default: Format::Csv,
                }
            }
        },
        Command::Geodesics(g) => match g {
            GeodesicsCmd::FromField { delta } => {
                let d = geometry::geodesic_from_field(delta)?;
                Rendered {
                    header: vec!["delta", "trace", "length"],
                    rows: geodesic_rows(std::slice::from_ref(&d)),
                    json: serde_json::to_value(&d).expect("serializes"),
                    default: Format::Csv,
                }
            }
            GeodesicsCmd::Census { b, x } => {
                let c = geometry::geodesic_census(&algebra(&b)?, x)?;
                Rendered {
                    header: vec!["delta", "trace", "length"],
                    rows: geodesic_rows(&c.data),
                    json: json!({
                        "algebra": c.algebra,
                        "x": c.x.to_string(),
                        "count": c.data.len().to_string(),
                        "classes": c.classes.to_string(),
                        "max_length": c.max_length,
                        "length_bound": c.length_bound,
                        "geodesics": c.data,
                    }),
                    default: Format::Csv,
                }
            }
        },
        Command::Volumes(v) => {
            let (name, value, extra) = match v {
                VolumesCmd::Coarea { b } => {
                    let c = geometry::coarea_maximal_order(&algebra(&b)?)?;
                    ("coarea", c.value, Some(c.bound))
                }
                VolumesCmd::Kleinian { field, ram } => {
                    let bl = QuaternionAlgebraL::parse(make_field(field)?, &ram)?;
                    ("kleinian", geometry::covolume_kleinian(&bl)?, None)
                }
                VolumesCmd::MinCf { field, dk, nk, zeta, norms, kb_index } => {
                    let (dk, nk, zeta) = match field {
                        Some(d) => (make_field(d)?.d_l(), 2, hasse::arith::zeta_k_at_2(d)?),
                        None => match (dk, nk, zeta) {
                            (Some(a), Some(b), Some(c)) => (a, b, c),
                            _ => return Err(CliError::Usage("give --field or all of --dk, --nk, --zeta".into())),
                        },
                    };
                    ("min_cf", geometry::minimal_covolume_cf(dk, nk, zeta, &norms, kb_index)?, None)
                }
            };
            let bound = extra.map(|b| b.to_string()).unwrap_or_default();
            Rendered {
                header: vec!["volume", "value", "bound"],
                rows: vec![vec![name.into(), value.to_string(), bound]],
                json: json!({"volume": name, "value": value, "bound": extra}),
                default: Format::Csv,
            }
        }
        Command::Surfaces(SurfacesCmd::Census { field, ram, x, volume, const_big_c }) => {
            let bl = QuaternionAlgebraL::parse(make_field(field)?, &ram)?;
            let entries = geometry::surface_census(&bl, x, volume, const_big_c)?;
            Rendered {
                header: vec!["ram_set", "area"],
                rows: entries.iter().map(|e| vec![e.b0.to_string(), e.area.to_string()]).collect(),
                json: json!({
                    "field": field,
                    "ram": bl.to_string(),
                    "x": x.to_string(),
                    "count": entries.len().to_string(),
                    "surfaces": entries.iter().map(|e| json!({
                        "ram_set": e.b0, "area": e.area, "ggs_area_bound": magnitude_json(&e.ggs_area_bound),
                    })).collect::<Vec<_>>(),
                }),
                default: Format::Csv,
            }
        }
        Command::Rigidity(r) => match r {
            RigidityCmd::Distinguish { b1, b2, delta_max } => {
                let (a1, a2) = (algebra(&b1)?, algebra(&b2)?);
                let d = rigidity::distinguish_quaternions(&a1, &a2, delta_max)?;
                Rendered {
                    header: vec!["b1", "b2", "minimal_delta"],
                    rows: vec![vec![a1.to_string(), a2.to_string(), d.map(|d| d.to_string()).unwrap_or_default()]],
                    json: json!({"pair": [a1, a2], "minimal_delta": d}),
                    default: Format::Json,
                }
            }
            RigidityCmd::Scan { x, delta_max, not_totally_complex } => {
                let rep = rigidity::rigidity_scan(x, delta_max, not_totally_complex)?;
                let bound_log10 = rep.bound.value.log10;
                Rendered {
                    header: vec!["b1", "b2", "minimal_delta"],
                    rows: rep
                        .entries
                        .iter()
                        .map(|e| vec![e.pair[0].to_string(), e.pair[1].to_string(), e.minimal_delta.to_string()])
                        .collect(),
                    json: json!({
                        "x": x.to_string(),
                        "delta_max": delta_max.to_string(),
                        "algebras": rep.algebras,
                        "pairs": rep.entries.len(),
                        "max_minimal_delta": rep.max_minimal_delta,
                        "histogram": rep.histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
                        "bound_log10": bound_log10,
                        "entries": rep.entries.iter().map(|e| json!({
                            "pair": e.pair, "minimal_delta": e.minimal_delta, "bound_log10": bound_log10,
                        })).collect::<Vec<_>>(),
                    }),
                    default: Format::Json,
                }
            }
            RigidityCmd::LimitPair { m } => {
                let p = rigidity::limit_pair(m)?;
                Rendered {
                    header: vec!["m", "delta1", "delta2", "witness1", "witness2"],
                    rows: vec![vec![
                        m.to_string(),
                        p.disc1.to_string(),
                        p.disc2.to_string(),
                        p.witnesses[0].to_string(),
                        p.witnesses[1].to_string(),
                    ]],
                    json: json!({"m": m, "delta1": p.disc1, "delta2": p.disc2, "witnesses": p.witnesses}),
                    default: Format::Json,
                }
            }
            RigidityCmd::Family { b, fields: fs, count } => {
                let fam = rigidity::length_preserving_family(&algebra(&b)?, &fields(&fs)?, count)?;
                Rendered {
                    header: vec!["ram_set"],
                    rows: fam.iter().map(|a| vec![a.to_string()]).collect(),
                    json: json!({"family": fam}),
                    default: Format::Csv,
                }
            }
        },
        Command::Bounds(b) => match b {
            BoundsCmd::Recognizing { nk, dk, x } => bound_output(&rigidity::recognizing_bound(nk, dk, x)?),
            BoundsCmd::Gw { nk, b_omega, x } => bound_output(&rigidity::grunwald_wang_conductor_bound(nk, b_omega, x)?),
            BoundsCmd::Chlr { volume, dim, c1, c2, c3 } => bound_output(&rigidity::chlr_length_bound(volume, dim, c1, c2, c3)?),
            BoundsCmd::Mcreid { volume, c } => bound_output(&rigidity::mcreid_area_bound(volume, c)?),
            BoundsCmd::Brauer { d_base, c, disc1, disc2 } => {
                bound_output(&rigidity::brauer_rigidity_bound(d_base, c, disc1, disc2)?)
            }
            BoundsCmd::Theta { x } => {
                let t = rigidity::theta_bound_check(x)?;
                if t.violations > 0 {
                    return Err(hasse::Error::InvariantViolation(format!(
                        "theta exceeds 21x/log^3 x + x at {} integers",
                        t.violations
                    ))
                    .into());
                }
                Rendered {
                    header: vec!["x_max", "max_ratio", "x_at_max", "violations"],
                    rows: vec![vec![x.to_string(), t.max_ratio.to_string(), t.x_at_max.to_string(), t.violations.to_string()]],
                    json: serde_json::to_value(t).expect("serializes"),
                    default: Format::Csv,
                }
            }
        },
    })
}

/// Runs with the given arguments (program name first), writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let ctx = Ctx { shards: cli.shards as usize, cache: cli.cache_dir.map(Cache::new) };
    let result = execute(cli.command, &ctx).and_then(|r| {
        let format = cli.format.unwrap_or(r.default);
        match &cli.out {
            Some(path) => {
                let mut f = std::fs::File::create(path)?;
                r.write(format, &mut f)
            }
            None => r.write(format, out),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_parse() {
        assert_eq!(parse_count("100"), Ok(100));
        assert_eq!(parse_count("1e8"), Ok(100_000_000));
        assert_eq!(parse_count("10^12"), Ok(1_000_000_000_000));
        assert_eq!(parse_count("3E2"), Ok(300));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("10^40").is_err());
    }
}
