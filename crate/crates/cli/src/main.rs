//! Command-line front end for the homological algebra engine: reads JSON
//! documents describing operads, algebras, operad maps, chain complexes,
//! and simplicial objects, verifies them, and prints dimension and homology
//! tables as TSV or JSON.
//!
//! Exit codes: 0 success, 1 axiom or verification failure, 2 schema or
//! usage error, 3 hypothesis violation (a degree outside the trustworthy
//! window, or an operad without the shape a computation requires).

mod doc;
mod table;

use clap::{Args, Parser, Subcommand};
use qhom_core::bar::{bar, change_of_operads, quillen_homology, Bar, HomologySummary};
use qhom_core::error::Error as CoreError;
use qhom_core::operad::{
    ass_to_com_projection, check_operad, identity_operad_map, operad_as_right_module, Operad,
    OperadMap,
};
use qhom_core::simplicial::{check_simplicial_identities, dold_kan_check};
use std::collections::BTreeMap;
use std::process::ExitCode;
use table::Table;

pub enum CliError {
    /// axiom or verification failure, exit 1
    Axiom(String),
    /// malformed document or invocation, exit 2
    Schema(String),
    /// violated computation hypothesis, exit 3
    Window(String),
}

impl CliError {
    pub fn from_core(e: CoreError) -> Self {
        match &e {
            CoreError::TruncationWindow { .. } => CliError::Window(e.to_string()),
            CoreError::InvalidInput { .. } => CliError::Schema(e.to_string()),
            _ => CliError::Axiom(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Axiom(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Window(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Axiom(m) | CliError::Schema(m) | CliError::Window(m) => m,
        }
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

#[derive(Parser)]
#[command(
    name = "qhom",
    about = "Exact homology of algebras over operads in chain complexes of rationals",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OperadArgs {
    /// builtin operad (unit, com, ass) or path to an operad document
    #[arg(long)]
    operad: Option<String>,
    /// arity bound for builtin operads
    #[arg(long, default_value_t = 3)]
    max_arity: usize,
    /// weight bound for builtin operads; defaults to the arity bound
    #[arg(long)]
    max_weight: Option<u32>,
    /// planar mode: builtin operads without the symmetric group actions
    #[arg(long)]
    non_sigma: bool,
}

impl OperadArgs {
    fn build(&self) -> Result<Operad, CliError> {
        let spec = self
            .operad
            .as_deref()
            .ok_or_else(|| schema("--operad is required"))?;
        doc::operad_from_spec(spec, self.max_arity, self.max_weight, self.non_sigma)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// output format: tsv or json
    #[arg(long, default_value = "tsv")]
    format: String,
    /// also write the rendered table to this path
    #[arg(long)]
    out: Option<String>,
}

impl OutputArgs {
    fn emit(&self, t: &Table) -> Result<(), CliError> {
        if self.format != "tsv" && self.format != "json" {
            return Err(schema(format!(
                "unknown format {:?} (expected tsv or json)",
                self.format
            )));
        }
        let rendered = t.render(&self.format);
        print!("{rendered}");
        if let Some(path) = &self.out {
            std::fs::write(path, &rendered)
                .map_err(|e| schema(format!("cannot write {path}: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Args)]
struct CheckArgs {
    /// path to a document of any kind
    #[arg(long, conflicts_with = "operad")]
    input: Option<String>,
    #[command(flatten)]
    operad: OperadArgs,
    /// write the canonical document of the checked operad to this path
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct FreeArgs {
    #[command(flatten)]
    operad: OperadArgs,
    /// free:K, squarezero:K, self, or path to an algebra document
    #[arg(long, default_value = "free:1")]
    algebra: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BarArgs {
    #[command(flatten)]
    operad: OperadArgs,
    /// free:K, squarezero:K, self, or path to an algebra document
    #[arg(long, default_value = "free:1")]
    algebra: String,
    /// simplicial level bound
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct HomologyArgs {
    /// path to a chain complex document
    #[arg(long)]
    input: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct QhArgs {
    #[command(flatten)]
    operad: OperadArgs,
    /// free:K, squarezero:K, self, or path to an algebra document
    #[arg(long, default_value = "free:1")]
    algebra: String,
    /// simplicial level bound
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// report homology through this degree
    #[arg(long, default_value_t = 2)]
    max_degree: i64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ChangeArgs {
    /// proj (associative onto commutative), id, or path to a map document
    #[arg(long)]
    map: String,
    #[command(flatten)]
    operad: OperadArgs,
    /// algebra over the source operad
    #[arg(long, default_value = "free:1")]
    algebra: String,
    /// simplicial level bound
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// report homology through this degree
    #[arg(long, default_value_t = 2)]
    max_degree: i64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DoldKanArgs {
    /// path to a simplicial document
    #[arg(long)]
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every axiom of a document or a builtin operad
    Check(CheckArgs),
    /// Dimension table of an algebra over an operad
    Free(FreeArgs),
    /// Level dimension table of the bar resolution of an algebra
    Bar(BarArgs),
    /// Homology table of a chain complex document
    Homology(HomologyArgs),
    /// Operadic homology table of an algebra
    Qh(QhArgs),
    /// Homology of an algebra pushed along an operad map
    Change(ChangeArgs),
    /// Decompose a simplicial document into its normalized parts
    DoldKan(DoldKanArgs),
    /// Run the full acceptance suite
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    check_thread_env()?;
    match command {
        Command::Check(args) => cmd_check(&args),
        Command::Free(args) => cmd_free(&args),
        Command::Bar(args) => cmd_bar(&args),
        Command::Homology(args) => cmd_homology(&args),
        Command::Qh(args) => cmd_qh(&args),
        Command::Change(args) => cmd_change(&args),
        Command::DoldKan(args) => cmd_dold_kan(&args),
        Command::Selftest => cmd_selftest(),
    }
}

/// Every computation is exact and evaluated in a fixed order, so outputs
/// are identical for every accepted thread count.
fn check_thread_env() -> Result<(), CliError> {
    match std::env::var("QHOM_THREADS") {
        Ok(v) if v.parse::<usize>().map_or(true, |n| n == 0) => {
            Err(schema("QHOM_THREADS must be a positive integer"))
        }
        _ => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let mut checked: Option<Operad> = None;
    let report = if let Some(path) = &args.input {
        let v = doc::read_value(path)?;
        let kind = if v.get("builtin").is_some() {
            "operad"
        } else {
            v.get("kind").and_then(|k| k.as_str()).ok_or_else(|| {
                schema(format!("{path}: document needs a kind field or a builtin reference"))
            })?
        };
        match kind {
            "operad" => {
                let o = doc::operad_from_value(&v)?;
                let report = check_operad(&o).map_err(CliError::from_core)?;
                checked = Some(o);
                report
            }
            "complex" => {
                let d: doc::ComplexDoc = doc::read_doc(path)?;
                let body = doc::ComplexBody {
                    basis: d.basis,
                    differential: d.differential,
                };
                let cx = doc::build_complex(&body, "complex")?;
                format!(
                    "differential squares to zero: ok\nchain complex with total dimension {}",
                    cx.total_dim()
                )
            }
            "algebra" => {
                let d: doc::AlgebraDoc = doc::read_doc(path)?;
                let ov = d.operad.as_ref().ok_or_else(|| {
                    schema("an algebra document checked on its own must embed its operad")
                })?;
                let o = doc::operad_from_value(ov)?;
                check_operad(&o).map_err(CliError::from_core)?;
                let m = doc::algebra_from_doc(&d, &o)?;
                doc::check_algebra(&o, &m)?;
                format!(
                    "unit and associativity of the action: ok\nalgebra of dimension {} over an {}",
                    m.seq.total_dim(),
                    o.describe()
                )
            }
            "map" => {
                let d: doc::MapDoc = doc::read_doc(path)?;
                let (_, src, tgt) = doc::map_from_doc(&d)?;
                format!(
                    "compatibility with units, compositions, and symmetries: ok\noperad map from an {} to an {}",
                    src.describe(),
                    tgt.describe()
                )
            }
            "simplicial" => {
                let d: doc::SimplicialDoc = doc::read_doc(path)?;
                let x = doc::simplicial_from_doc(&d)?;
                check_simplicial_identities(&x).map_err(CliError::from_core)?;
                let dims: Vec<String> =
                    x.levels.iter().map(|l| l.total_dim().to_string()).collect();
                format!(
                    "simplicial identities: ok\nsimplicial object with level dimensions [{}]",
                    dims.join(", ")
                )
            }
            other => {
                return Err(schema(format!("{path}: unknown document kind {other:?}")));
            }
        }
    } else {
        let o = args.operad.build()?;
        let report = check_operad(&o).map_err(CliError::from_core)?;
        checked = Some(o);
        report
    };
    println!("{report}");
    if let Some(path) = &args.emit {
        let Some(o) = checked else {
            return Err(schema("--emit only applies to operads"));
        };
        let mut text = serde_json::to_string_pretty(&doc::emit_operad(&o))
            .expect("operad documents serialize");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| schema(format!("cannot write {path}: {e}")))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// dimension and homology tables
// ---------------------------------------------------------------------------

fn cmd_free(args: &FreeArgs) -> Result<(), CliError> {
    let o = args.operad.build()?;
    let m = doc::algebra_from_spec(&args.algebra, &o)?;
    let mut cells: BTreeMap<(u32, usize, i64), usize> = BTreeMap::new();
    for r in m.seq.arities().collect::<Vec<_>>() {
        let cx = m.seq.complex_at(r);
        for n in cx.degrees() {
            for w in cx.weights_at(n) {
                *cells.entry((w, r, n)).or_insert(0) += 1;
            }
        }
    }
    let mut t = Table::new(vec!["weight", "arity", "degree", "dim"]);
    for ((w, r, n), d) in cells {
        t.push(vec![w.to_string(), r.to_string(), n.to_string(), d.to_string()]);
    }
    args.output.emit(&t)
}

fn cmd_bar(args: &BarArgs) -> Result<(), CliError> {
    let o = args.operad.build()?;
    let y = doc::algebra_from_spec(&args.algebra, &o)?;
    let x = operad_as_right_module(&o);
    let b: Bar = bar(&x, &o, &y, args.levels).map_err(CliError::from_core)?;
    b.simplicial.check_identities().map_err(CliError::from_core)?;
    let mut cells: BTreeMap<(usize, u32, usize, i64), usize> = BTreeMap::new();
    for (l, seq) in b.levels.iter().enumerate() {
        for r in seq.arities().collect::<Vec<_>>() {
            let cx = seq.complex_at(r);
            for n in cx.degrees() {
                for w in cx.weights_at(n) {
                    *cells.entry((l, w, r, n)).or_insert(0) += 1;
                }
            }
        }
    }
    let mut t = Table::new(vec!["level", "weight", "arity", "degree", "dim"]);
    for ((l, w, r, n), d) in cells {
        t.push(vec![
            l.to_string(),
            w.to_string(),
            r.to_string(),
            n.to_string(),
            d.to_string(),
        ]);
    }
    args.output.emit(&t)
}

fn cmd_homology(args: &HomologyArgs) -> Result<(), CliError> {
    let d: doc::ComplexDoc = doc::read_doc(&args.input)?;
    if d.kind != "complex" {
        return Err(schema(format!("expected kind \"complex\", found {:?}", d.kind)));
    }
    let body = doc::ComplexBody {
        basis: d.basis,
        differential: d.differential,
    };
    let cx = doc::build_complex(&body, "complex")?;
    let mut t = Table::new(vec!["weight", "arity", "degree", "betti"]);
    for ((w, n), b) in cx.homology_by_weight() {
        if b > 0 {
            t.push(vec![w.to_string(), "0".into(), n.to_string(), b.to_string()]);
        }
    }
    args.output.emit(&t)
}

/// The full grid of weights `1..=w_max` and degrees `0..=d_max` in arity 0,
/// zeros included, merged with any nonzero entries outside the grid.
fn summary_table(summary: &HomologySummary, w_max: u32, d_max: i64) -> Table {
    let mut cells: BTreeMap<(u32, usize, i64), usize> = BTreeMap::new();
    for w in 1..=w_max {
        for n in 0..=d_max {
            cells.insert((w, 0, n), 0);
        }
    }
    for (&k, &v) in summary {
        if v > 0 {
            cells.insert(k, v);
        }
    }
    let mut t = Table::new(vec!["weight", "arity", "degree", "betti"]);
    for ((w, r, n), b) in cells {
        t.push(vec![w.to_string(), r.to_string(), n.to_string(), b.to_string()]);
    }
    t
}

fn weight_bound(o: &Operad) -> u32 {
    let policy = o.seq.policy;
    policy.max_weight.unwrap_or(policy.max_arity as u32)
}

/// The hypotheses under which the two-sided bar over the unit computes the
/// homology of an algebra; stated here so violations fail before any work.
fn require_reduced(o: &Operad) -> Result<(), CliError> {
    if o.seq.complex_at(0).total_dim() > 0 {
        return Err(CliError::Window(
            "the operad has nonzero operations in arity 0; this homology needs every \
             operation to take at least one input, so the arity-0 part must vanish"
                .into(),
        ));
    }
    if !o.augmentable {
        return Err(CliError::Window(
            "the arity-1 part of the operad is larger than the span of its unit; this \
             homology needs the unit to be the only unary operation"
                .into(),
        ));
    }
    Ok(())
}

fn cmd_qh(args: &QhArgs) -> Result<(), CliError> {
    let o = args.operad.build()?;
    require_reduced(&o)?;
    let y = doc::algebra_from_spec(&args.algebra, &o)?;
    let summary =
        quillen_homology(&o, &y, args.levels, args.max_degree).map_err(CliError::from_core)?;
    let t = summary_table(&summary, weight_bound(&o), args.max_degree);
    args.output.emit(&t)
}

fn cmd_change(args: &ChangeArgs) -> Result<(), CliError> {
    let (f, src, tgt): (OperadMap, Operad, Operad) = match args.map.as_str() {
        "proj" => {
            if args.operad.operad.is_some() {
                return Err(schema("--map proj determines both operads; drop --operad"));
            }
            let a = &args.operad;
            let src = doc::operad_from_spec("ass", a.max_arity, a.max_weight, a.non_sigma)?;
            let tgt = doc::operad_from_spec("com", a.max_arity, a.max_weight, a.non_sigma)?;
            let f = ass_to_com_projection(&src, &tgt).map_err(CliError::from_core)?;
            (f, src, tgt)
        }
        "id" => {
            let o = args.operad.build()?;
            let f = identity_operad_map(&o);
            (f, o.clone(), o)
        }
        path => {
            if args.operad.operad.is_some() {
                return Err(schema(
                    "a map document embeds its operads; drop --operad",
                ));
            }
            let d: doc::MapDoc = doc::read_doc(path)?;
            if d.kind != "map" {
                return Err(schema(format!("expected kind \"map\", found {:?}", d.kind)));
            }
            doc::map_from_doc(&d)?
        }
    };
    let y = doc::algebra_from_spec(&args.algebra, &src)?;
    let summary = change_of_operads(&f, &src, &tgt, &y, args.levels, args.max_degree)
        .map_err(CliError::from_core)?;
    let t = summary_table(&summary, weight_bound(&src), args.max_degree);
    args.output.emit(&t)
}

// ---------------------------------------------------------------------------
// dold-kan and selftest
// ---------------------------------------------------------------------------

fn cmd_dold_kan(args: &DoldKanArgs) -> Result<(), CliError> {
    let d: doc::SimplicialDoc = doc::read_doc(&args.input)?;
    if d.kind != "simplicial" {
        return Err(schema(format!(
            "expected kind \"simplicial\", found {:?}",
            d.kind
        )));
    }
    let x = doc::simplicial_from_doc(&d)?;
    let report = dold_kan_check(&x).map_err(CliError::from_core)?;
    println!("{report}");
    Ok(())
}

fn cmd_selftest() -> Result<(), CliError> {
    let reports = qhom_core::selftest::run_all();
    let mut failed = 0usize;
    for r in &reports {
        println!("{}", r.line());
        eprintln!("criterion {:2}: {:.1}s", r.number, r.seconds);
        if !r.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Axiom(format!("{failed} criteria failed")));
    }
    Ok(())
}
