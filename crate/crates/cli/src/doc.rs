//! The JSON document schema: chain complexes, operads, algebras, operad
//! maps, and simplicial objects, with sparse rational matrices throughout.
//!
//! Scalars are rationals written as strings ("3", "-1/2"). Bases list one
//! entry per generator with a name, a degree, and an optional weight; matrix
//! entries are quadruples [degree, row, col, coeff] with row and col indexed
//! within the degree. Action tables and composition tables address basis
//! elements by flat index: all degrees ascending, then position within the
//! degree, exactly the order the basis list itself uses.

use crate::CliError;
use qhom_core::chain::{ChainComplex, ChainMap, LevelBasis};
use qhom_core::error::Error as CoreError;
use qhom_core::linalg::Matrix;
use qhom_core::operad::{
    algebra_from_action, ass, check_left_module, com, forget_symmetry, free_algebra,
    operad_as_left_module, square_zero_algebra, unit_operad, verify_operad_map, ActionEntry,
    CompTable, LeftModule, Operad, OperadMap,
};
use qhom_core::simplicial::{
    constant, copower, FiniteSimplicialSetModel, SimplicialChainComplex,
};
use qhom_core::symseq::{AritySlot, SymSeq, SymSeqMap, TruncationPolicy};
use qhom_core::Q;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

pub fn parse_q(s: &str) -> Result<Q, CliError> {
    Q::from_str(s).map_err(|_| schema(format!("not a rational number: {s:?}")))
}

pub fn q_str(v: &Q) -> String {
    v.to_string()
}

// ---------------------------------------------------------------------------
// Schema types
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize, Clone)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
    #[serde(default)]
    pub weight: u32,
}

/// Sparse matrix entry: degree, row, column, coefficient.
pub type MatrixEntry = (i64, usize, usize, String);

#[derive(Serialize, Deserialize, Clone, Default)]
pub struct ComplexBody {
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<MatrixEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct CompositionTable {
    /// arity of the right factor
    pub other: usize,
    /// input position, 1-based
    pub slot: usize,
    /// flat entries: left index, right index, result index, coefficient
    pub entries: Vec<(usize, usize, usize, String)>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ArityEntry {
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<MatrixEntry>,
    /// one sparse matrix per adjacent transposition, degree-preserving
    #[serde(default)]
    pub transpositions: Vec<Vec<MatrixEntry>>,
    #[serde(default)]
    pub compositions: Vec<CompositionTable>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct BuiltinRef {
    pub builtin: String,
    pub max_arity: usize,
    #[serde(default)]
    pub max_weight: Option<u32>,
    #[serde(default)]
    pub non_sigma: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct OperadDoc {
    pub kind: String,
    #[serde(default)]
    pub non_sigma: bool,
    pub max_arity: usize,
    #[serde(default)]
    pub max_weight: Option<u32>,
    /// the unit of the arity-1 part as a sparse column: [index, coeff]
    pub unit: Vec<(usize, String)>,
    pub arity: BTreeMap<String, ArityEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ActionEntryDoc {
    pub arity: usize,
    /// flat index of the operation
    pub op: usize,
    /// flat indices of the inputs
    pub args: Vec<usize>,
    /// flat index of the value
    pub out: usize,
    pub coeff: String,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct AlgebraDoc {
    pub kind: String,
    #[serde(default)]
    pub operad: Option<serde_json::Value>,
    pub generators: ComplexBody,
    #[serde(default)]
    pub free: bool,
    #[serde(default)]
    pub action: Option<Vec<ActionEntryDoc>>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct MapDoc {
    pub kind: String,
    pub source: serde_json::Value,
    pub target: serde_json::Value,
    /// per-arity sparse matrices, keyed by arity
    pub arity: BTreeMap<String, Vec<MatrixEntry>>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct ComplexDoc {
    pub kind: String,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub differential: Vec<MatrixEntry>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct CopowerBody {
    pub complex: ComplexBody,
    /// "simplex:M" or "boundary:M"
    pub model: String,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct SimplicialDoc {
    pub kind: String,
    #[serde(default)]
    pub top_level: Option<usize>,
    #[serde(default)]
    pub constant: Option<ComplexBody>,
    #[serde(default)]
    pub copower: Option<CopowerBody>,
    #[serde(default)]
    pub levels: Option<Vec<ComplexBody>>,
    #[serde(default)]
    pub faces: Option<Vec<Vec<Vec<MatrixEntry>>>>,
    #[serde(default)]
    pub degens: Option<Vec<Vec<Vec<MatrixEntry>>>>,
}

// ---------------------------------------------------------------------------
// Chain complexes
// ---------------------------------------------------------------------------

/// Group a basis list by degree, preserving the listed order within each.
fn group_basis(basis: &[BasisEntry]) -> BTreeMap<i64, LevelBasis> {
    let mut levels: BTreeMap<i64, LevelBasis> = BTreeMap::new();
    for b in basis {
        let l = levels.entry(b.degree).or_default();
        l.names.push(b.name.clone());
        l.weights.push(b.weight);
    }
    levels
}

/// Sparse per-degree matrices for a degree-preserving map between the two
/// complexes, with index bounds checked against the levels.
fn degree_matrices(
    entries: &[MatrixEntry],
    src: &BTreeMap<i64, LevelBasis>,
    tgt: &BTreeMap<i64, LevelBasis>,
    shift: i64,
    ctx: &str,
) -> Result<BTreeMap<i64, Matrix>, CliError> {
    let mut triples: BTreeMap<i64, Vec<(usize, usize, Q)>> = BTreeMap::new();
    for (n, row, col, coeff) in entries {
        let cols = src.get(n).map_or(0, |l| l.dim());
        let rows = tgt.get(&(n + shift)).map_or(0, |l| l.dim());
        if *col >= cols || *row >= rows {
            return Err(schema(format!(
                "{ctx}: entry ({row}, {col}) at degree {n} is out of range"
            )));
        }
        triples
            .entry(*n)
            .or_default()
            .push((*row, *col, parse_q(coeff)?));
    }
    let mut out = BTreeMap::new();
    for (n, t) in triples {
        let cols = src[&n].dim();
        let rows = tgt[&(n + shift)].dim();
        out.insert(n, Matrix::from_triples(rows, cols, &t));
    }
    Ok(out)
}

pub fn build_complex(body: &ComplexBody, ctx: &str) -> Result<ChainComplex, CliError> {
    if body.basis.is_empty() {
        return Err(schema(format!("{ctx}: empty basis")));
    }
    let levels = group_basis(&body.basis);
    let diffs = degree_matrices(&body.differential, &levels, &levels, -1, ctx)?;
    ChainComplex::new(levels, diffs).map_err(CliError::from_core)
}

/// Flat index (all degrees ascending, then position) to (degree, position).
fn flat_decode(cx: &ChainComplex, flat: usize, ctx: &str) -> Result<(i64, usize), CliError> {
    let mut rest = flat;
    for n in cx.degrees() {
        let d = cx.dim(n);
        if rest < d {
            return Ok((n, rest));
        }
        rest -= d;
    }
    Err(schema(format!("{ctx}: flat index {flat} is out of range")))
}

// ---------------------------------------------------------------------------
// Operads
// ---------------------------------------------------------------------------

fn builtin_operad(r: &BuiltinRef) -> Result<Operad, CliError> {
    if r.max_arity == 0 {
        return Err(schema("max_arity must be positive"));
    }
    let policy =
        TruncationPolicy::arity_weight(r.max_arity, r.max_weight.unwrap_or(r.max_arity as u32));
    let build = |sym: Result<Operad, CoreError>| -> Result<Operad, CliError> {
        let o = sym.map_err(CliError::from_core)?;
        if r.non_sigma {
            forget_symmetry(&o).map_err(CliError::from_core)
        } else {
            Ok(o)
        }
    };
    match r.builtin.as_str() {
        "unit" => unit_operad(r.non_sigma, policy).map_err(CliError::from_core),
        "com" => build(com(policy)),
        "ass" => build(ass(policy)),
        other => Err(schema(format!(
            "unknown builtin operad {other:?} (expected unit, com, or ass)"
        ))),
    }
}

fn explicit_operad(doc: &OperadDoc) -> Result<Operad, CliError> {
    if doc.max_arity == 0 {
        return Err(schema("max_arity must be positive"));
    }
    let policy =
        TruncationPolicy::arity_weight(doc.max_arity, doc.max_weight.unwrap_or(doc.max_arity as u32));
    let mut slots: BTreeMap<usize, AritySlot> = BTreeMap::new();
    let mut comps: BTreeMap<(usize, usize, usize), Vec<(usize, usize, usize, Q)>> = BTreeMap::new();
    let mut raw: Vec<(usize, &CompositionTable)> = Vec::new();
    for (key, entry) in &doc.arity {
        let r: usize = key
            .parse()
            .map_err(|_| schema(format!("arity key {key:?} is not a number")))?;
        if r > doc.max_arity {
            return Err(schema(format!("arity {r} exceeds max_arity {}", doc.max_arity)));
        }
        let ctx = format!("arity {r}");
        let levels = group_basis(&entry.basis);
        if levels.is_empty() {
            return Err(schema(format!("{ctx}: empty basis")));
        }
        let diffs = degree_matrices(&entry.differential, &levels, &levels, -1, &ctx)?;
        let complex = ChainComplex::new(levels.clone(), diffs).map_err(CliError::from_core)?;
        let need = if doc.non_sigma { 0 } else { r.saturating_sub(1) };
        if entry.transpositions.len() != need {
            return Err(schema(format!(
                "{ctx}: expected {need} transposition matrices, found {}",
                entry.transpositions.len()
            )));
        }
        let mut gens = Vec::with_capacity(need);
        for (k, tr) in entry.transpositions.iter().enumerate() {
            let maps = degree_matrices(tr, &levels, &levels, 0, &format!("{ctx}, transposition {k}"))?;
            gens.push(ChainMap::from_comps(maps));
        }
        slots.insert(r, AritySlot { complex, gens });
        for ct in &entry.compositions {
            if ct.slot < 1 || ct.slot > r {
                return Err(schema(format!(
                    "{ctx}: composition slot {} is out of range 1..={r}",
                    ct.slot
                )));
            }
            raw.push((r, ct));
        }
    }
    // flat dimensions are known only after all entries are read
    let flat_dim =
        |r: usize| -> usize { slots.get(&r).map_or(0, |s| s.complex.total_dim()) };
    for (r, ct) in raw {
        let tgt = r + ct.other - 1;
        let mut rows = Vec::with_capacity(ct.entries.len());
        for (x, y, z, coeff) in &ct.entries {
            if *x >= flat_dim(r) || *y >= flat_dim(ct.other) || *z >= flat_dim(tgt) {
                return Err(schema(format!(
                    "composition ({r}, {}, {}): entry ({x}, {y}, {z}) is out of range",
                    ct.other, ct.slot
                )));
            }
            rows.push((*x, *y, *z, parse_q(coeff)?));
        }
        comps.insert((r, ct.other, ct.slot), rows);
    }
    let unit_dim = flat_dim(1);
    let mut unit = Vec::with_capacity(doc.unit.len());
    for (idx, coeff) in &doc.unit {
        if *idx >= unit_dim {
            return Err(schema(format!("unit index {idx} is out of range")));
        }
        unit.push((*idx, parse_q(coeff)?));
    }
    let seq = SymSeq::new(slots, doc.non_sigma, policy).map_err(CliError::from_core)?;
    Operad::new(seq, unit, CompTable { entries: comps }).map_err(CliError::from_core)
}

/// An operad from a command-line spec: a builtin name with the bound flags
/// applied, or a path to an operad document carrying its own bounds.
pub fn operad_from_spec(
    spec: &str,
    max_arity: usize,
    max_weight: Option<u32>,
    non_sigma: bool,
) -> Result<Operad, CliError> {
    match spec {
        "com" | "ass" | "unit" => builtin_operad(&BuiltinRef {
            builtin: spec.into(),
            max_arity,
            max_weight,
            non_sigma,
        }),
        path => operad_from_value(&read_value(path)?),
    }
}

/// An operad from a JSON value: either a builtin reference or a document.
pub fn operad_from_value(v: &serde_json::Value) -> Result<Operad, CliError> {
    if v.get("builtin").is_some() {
        let r: BuiltinRef =
            serde_json::from_value(v.clone()).map_err(|e| schema(format!("builtin reference: {e}")))?;
        builtin_operad(&r)
    } else {
        let doc: OperadDoc =
            serde_json::from_value(v.clone()).map_err(|e| schema(format!("operad document: {e}")))?;
        if doc.kind != "operad" {
            return Err(schema(format!("expected kind \"operad\", found {:?}", doc.kind)));
        }
        explicit_operad(&doc)
    }
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

/// Build the algebra a document describes over `o`; documents with an
/// embedded operad must resolve it first via [`AlgebraDoc::operad`].
pub fn algebra_from_doc(doc: &AlgebraDoc, o: &Operad) -> Result<LeftModule, CliError> {
    let z = build_complex(&doc.generators, "generators")?;
    match (&doc.free, &doc.action) {
        (true, None) => free_algebra(o, &z).map_err(CliError::from_core),
        (false, Some(entries)) => {
            let mut parsed = Vec::with_capacity(entries.len());
            for (k, e) in entries.iter().enumerate() {
                let ctx = format!("action entry {k}");
                let ocx = o.seq.complex_at(e.arity);
                let op = flat_decode(&ocx, e.op, &ctx)?;
                let args = e
                    .args
                    .iter()
                    .map(|&a| flat_decode(&z, a, &ctx))
                    .collect::<Result<Vec<_>, _>>()?;
                let out = flat_decode(&z, e.out, &ctx)?;
                parsed.push(ActionEntry {
                    op_arity: e.arity,
                    op,
                    args,
                    out,
                    coeff: parse_q(&e.coeff)?,
                });
            }
            algebra_from_action(o, &z, &parsed).map_err(CliError::from_core)
        }
        (true, Some(_)) => Err(schema("an algebra is either free or carries an action table, not both")),
        (false, None) => Err(schema("an algebra needs free: true or an action table")),
    }
}

/// An algebra from a command-line spec over a context operad: `free:K`,
/// `squarezero:K`, `self`, or a path to an algebra document without an
/// embedded operad.
pub fn algebra_from_spec(spec: &str, o: &Operad) -> Result<LeftModule, CliError> {
    let gens = |k: &str| -> Result<ChainComplex, CliError> {
        let k: usize = k
            .parse()
            .map_err(|_| schema(format!("generator count {k:?} is not a number")))?;
        if k == 0 {
            return Err(schema("generator count must be positive"));
        }
        let body = ComplexBody {
            basis: (0..k)
                .map(|i| BasisEntry {
                    name: format!("g{i}"),
                    degree: 0,
                    weight: 1,
                })
                .collect(),
            differential: Vec::new(),
        };
        build_complex(&body, "generators")
    };
    if let Some(k) = spec.strip_prefix("free:") {
        return free_algebra(o, &gens(k)?).map_err(CliError::from_core);
    }
    if let Some(k) = spec.strip_prefix("squarezero:") {
        return square_zero_algebra(o, &gens(k)?).map_err(CliError::from_core);
    }
    if spec == "self" {
        return Ok(operad_as_left_module(o));
    }
    let doc: AlgebraDoc = read_doc(spec)?;
    if doc.kind != "algebra" {
        return Err(schema(format!("expected kind \"algebra\", found {:?}", doc.kind)));
    }
    if doc.operad.is_some() {
        return Err(schema(
            "this algebra document embeds an operad; drop the command-line operad or the embedded one",
        ));
    }
    algebra_from_doc(&doc, o)
}

/// Full verification of an algebra against its operad.
pub fn check_algebra(o: &Operad, m: &LeftModule) -> Result<(), CliError> {
    check_left_module(o, m).map_err(CliError::from_core)
}

// ---------------------------------------------------------------------------
// Operad maps
// ---------------------------------------------------------------------------

pub fn map_from_doc(doc: &MapDoc) -> Result<(OperadMap, Operad, Operad), CliError> {
    let src = operad_from_value(&doc.source)?;
    let tgt = operad_from_value(&doc.target)?;
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (key, entries) in &doc.arity {
        let r: usize = key
            .parse()
            .map_err(|_| schema(format!("arity key {key:?} is not a number")))?;
        let sl = levels_of(&src.seq.complex_at(r));
        let tl = levels_of(&tgt.seq.complex_at(r));
        let maps = degree_matrices(entries, &sl, &tl, 0, &format!("map at arity {r}"))?;
        comps.insert(r, ChainMap::from_comps(maps));
    }
    let f = OperadMap {
        map: SymSeqMap::from_comps(comps),
    };
    verify_operad_map(&f, &src, &tgt).map_err(CliError::from_core)?;
    Ok((f, src, tgt))
}

fn levels_of(cx: &ChainComplex) -> BTreeMap<i64, LevelBasis> {
    cx.degrees()
        .map(|n| (n, cx.level(n).cloned().unwrap_or_default()))
        .collect()
}

// ---------------------------------------------------------------------------
// Simplicial objects
// ---------------------------------------------------------------------------

fn parse_model(spec: &str, top: usize) -> Result<FiniteSimplicialSetModel, CliError> {
    let (kind, m) = spec
        .split_once(':')
        .ok_or_else(|| schema(format!("model {spec:?} is not of the form simplex:M or boundary:M")))?;
    let m: usize = m
        .parse()
        .map_err(|_| schema(format!("model dimension {m:?} is not a number")))?;
    match kind {
        "simplex" => Ok(FiniteSimplicialSetModel::standard_simplex(m, top)),
        "boundary" => Ok(FiniteSimplicialSetModel::boundary_simplex(m, top)),
        other => Err(schema(format!("unknown model kind {other:?}"))),
    }
}

pub fn simplicial_from_doc(doc: &SimplicialDoc) -> Result<SimplicialChainComplex, CliError> {
    let given = [doc.constant.is_some(), doc.copower.is_some(), doc.levels.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given != 1 {
        return Err(schema(
            "a simplicial document carries exactly one of constant, copower, or levels",
        ));
    }
    if let Some(body) = &doc.constant {
        let top = doc
            .top_level
            .ok_or_else(|| schema("constant simplicial objects need top_level"))?;
        let z = build_complex(body, "constant")?;
        return Ok(constant(&z, top));
    }
    if let Some(cp) = &doc.copower {
        let top = doc
            .top_level
            .ok_or_else(|| schema("copowers need top_level"))?;
        let z = build_complex(&cp.complex, "copower")?;
        let model = parse_model(&cp.model, top)?;
        return copower(&z, &model).map_err(CliError::from_core);
    }
    let bodies = doc.levels.as_ref().unwrap();
    if bodies.is_empty() {
        return Err(schema("levels must be nonempty"));
    }
    let s = bodies.len() - 1;
    let levels: Vec<ChainComplex> = bodies
        .iter()
        .enumerate()
        .map(|(n, b)| build_complex(b, &format!("level {n}")))
        .collect::<Result<_, _>>()?;
    let faces_doc = doc.faces.as_ref().ok_or_else(|| schema("levels need faces"))?;
    let degens_doc = doc.degens.as_ref().ok_or_else(|| schema("levels need degens"))?;
    if faces_doc.len() != s + 1 || degens_doc.len() != s + 1 {
        return Err(schema("faces and degens carry one list per level"));
    }
    let mut faces = Vec::with_capacity(s + 1);
    let mut degens = Vec::with_capacity(s + 1);
    for n in 0..=s {
        let fneed = if n == 0 { 0 } else { n + 1 };
        if faces_doc[n].len() != fneed {
            return Err(schema(format!("level {n} needs {fneed} face maps")));
        }
        let dneed = if n == s { 0 } else { n + 1 };
        if degens_doc[n].len() != dneed {
            return Err(schema(format!("level {n} needs {dneed} degeneracy maps")));
        }
        let mut fr = Vec::with_capacity(fneed);
        for (i, entries) in faces_doc[n].iter().enumerate() {
            let maps = degree_matrices(
                entries,
                &levels_of(&levels[n]),
                &levels_of(&levels[n - 1]),
                0,
                &format!("face {i} at level {n}"),
            )?;
            fr.push(ChainMap::from_comps(maps));
        }
        faces.push(fr);
        let mut dg = Vec::with_capacity(dneed);
        for (j, entries) in degens_doc[n].iter().enumerate() {
            let maps = degree_matrices(
                entries,
                &levels_of(&levels[n]),
                &levels_of(&levels[n + 1]),
                0,
                &format!("degeneracy {j} at level {n}"),
            )?;
            dg.push(ChainMap::from_comps(maps));
        }
        degens.push(dg);
    }
    SimplicialChainComplex::new(levels, faces, degens).map_err(CliError::from_core)
}

// ---------------------------------------------------------------------------
// Reading documents and serializing operads
// ---------------------------------------------------------------------------

pub fn read_value(path: &str) -> Result<serde_json::Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| schema(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| schema(format!("{path}: {e}")))
}

pub fn read_doc<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let v = read_value(path)?;
    serde_json::from_value(v).map_err(|e| schema(format!("{path}: {e}")))
}

fn matrix_entries(m: &Matrix, degree: i64) -> Vec<MatrixEntry> {
    let mut out = Vec::new();
    for c in 0..m.cols {
        for (r, v) in m.col(c) {
            out.push((degree, *r, c, q_str(v)));
        }
    }
    out
}

/// The canonical document of an operad; parsing it back rebuilds the operad
/// exactly, so emission and parsing round-trip byte for byte.
pub fn emit_operad(o: &Operad) -> OperadDoc {
    let policy = o.seq.policy;
    let mut arity = BTreeMap::new();
    for r in 0..=policy.max_arity {
        let Some(slot) = o.seq.slot(r) else { continue };
        let cx = &slot.complex;
        let mut basis = Vec::new();
        let mut differential = Vec::new();
        for n in cx.degrees() {
            let l = cx.level(n).unwrap();
            for i in 0..l.dim() {
                basis.push(BasisEntry {
                    name: l.names[i].clone(),
                    degree: n,
                    weight: l.weights[i],
                });
            }
            differential.extend(matrix_entries(&cx.d(n), n));
        }
        let transpositions = slot
            .gens
            .iter()
            .map(|g| {
                let mut entries = Vec::new();
                for n in cx.degrees() {
                    entries.extend(matrix_entries(&g.comp(n, cx, cx), n));
                }
                entries
            })
            .collect();
        let compositions = o
            .comp
            .entries
            .iter()
            .filter(|((rr, _, _), _)| *rr == r)
            .map(|((_, s, i), rows)| CompositionTable {
                other: *s,
                slot: *i,
                entries: rows
                    .iter()
                    .map(|(x, y, z, c)| (*x, *y, *z, q_str(c)))
                    .collect(),
            })
            .collect();
        arity.insert(
            r.to_string(),
            ArityEntry {
                basis,
                differential,
                transpositions,
                compositions,
            },
        );
    }
    OperadDoc {
        kind: "operad".into(),
        non_sigma: o.seq.non_sigma,
        max_arity: policy.max_arity,
        max_weight: policy.max_weight,
        unit: o.unit.iter().map(|(i, c)| (*i, q_str(c))).collect(),
        arity,
    }
}
