//! Operads as monoids for the composition product, their algebras and
//! one-sided modules.
//!
//! An operad is presented by partial-composition tables `∘_i` on basis
//! elements; the monoid multiplication `m: O∘O -> O` is assembled from them
//! and every axiom (well-definedness on orbits, chain map, equivariance,
//! both unit triangles, associativity through `(O∘O)∘O`) is verified
//! exactly at construction. Nothing is trusted: a corrupted table fails
//! with a located witness.
//!
//! Composition of a full monomial `x ⊗ (y_1, ..., y_t)` is reduced to
//! iterated partial compositions. Arity-0 arguments are composed first so
//! that every intermediate arity stays within `max(t, r)` and therefore
//! inside the truncation bound; the deviation from the fixed reference
//! order (positions descending) is compensated by the Koszul sign of the
//! corresponding reordering of the arguments.

use crate::chain::{ChainComplex, ChainMap};
use crate::circle::{
    canonical_assoc, circle, circle_map, ev_map, right_unit_iso, transpose_map, unit_insert_left,
    unit_insert_right, Circle,
};
use crate::error::Error;
use crate::linalg::{Col, Matrix};
use crate::perm::{koszul_sign, Perm};
use crate::symseq::{complex_basis, AritySlot, MapSeq, SymSeq, SymSeqMap, TruncationPolicy};
use crate::{q, Q};
use num::Zero;
use std::collections::BTreeMap;

/// Partial-composition tables: `(r, s, i)` with `1 <= i <= r` maps to the
/// entries of `∘_i: O[r] ⊗ O[s] -> O[r+s-1]` as `(x, y, z, coefficient)`
/// on flattened basis indices (degree-major within each arity).
#[derive(Debug, Clone, Default)]
pub struct CompTable {
    pub entries: BTreeMap<(usize, usize, usize), Vec<(usize, usize, usize, Q)>>,
}

/// Flattened basis of one arity: position -> (degree, index within degree),
/// plus the inverse map.
#[derive(Debug, Clone, Default)]
struct Flat {
    fwd: Vec<(i64, usize)>,
    pos: BTreeMap<(i64, usize), usize>,
}

fn flatten(seq: &SymSeq) -> BTreeMap<usize, Flat> {
    let mut out = BTreeMap::new();
    for (&r, slot) in &seq.slots {
        let fwd = complex_basis(&slot.complex);
        let pos = fwd.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        out.insert(r, Flat { fwd, pos });
    }
    out
}

/// Lookup-friendly form of a composition table.
struct TableIndex {
    map: BTreeMap<(usize, usize, usize), BTreeMap<(usize, usize), Vec<(usize, Q)>>>,
}

impl TableIndex {
    fn new(table: &CompTable) -> Self {
        let mut map: BTreeMap<(usize, usize, usize), BTreeMap<(usize, usize), Vec<(usize, Q)>>> =
            BTreeMap::new();
        for (&key, entries) in &table.entries {
            let inner = map.entry(key).or_default();
            for &(x, y, z, ref c) in entries {
                inner.entry((x, y)).or_default().push((z, c.clone()));
            }
        }
        TableIndex { map }
    }

    /// One partial composition applied to a vector `cur` over `O[r]` and a
    /// single basis argument `yg` of arity `s`, at input `i` (1-based).
    fn apply(&self, cur: &[(usize, Q)], r: usize, s: usize, i: usize, yg: usize) -> Vec<(usize, Q)> {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        if let Some(inner) = self.map.get(&(r, s, i)) {
            for (xg, c) in cur {
                if let Some(zs) = inner.get(&(*xg, yg)) {
                    for (zg, cz) in zs {
                        let e = acc.entry(*zg).or_insert_with(|| q(0));
                        *e += c * cz;
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Full composition of one monomial `x ⊗ (y_0, ..., y_{t-1})` in the planar
/// arrangement, by iterated partial compositions: arity-0 arguments first
/// (highest position first), then the rest (highest current position first).
/// Returns the resulting vector over `O[r]` together with the Koszul sign
/// relating this processing order to the reference order (all positions
/// descending).
fn gamma_planar(
    tix: &TableIndex,
    t: usize,
    x_global: usize,
    args: &[(usize, usize)],
    degs: &[i64],
    max_arity: usize,
) -> (Vec<(usize, Q)>, Q) {
    let zeros: Vec<usize> = (0..t).rev().filter(|&l| args[l].0 == 0).collect();
    let positives: Vec<usize> = (0..t).rev().filter(|&l| args[l].0 > 0).collect();
    let order: Vec<usize> = zeros.iter().chain(positives.iter()).copied().collect();
    // Koszul sign: reference processing word is positions t-1, ..., 0
    let reference: Vec<usize> = (0..t).rev().collect();
    let tau: Vec<usize> = reference
        .iter()
        .map(|&l| order.iter().position(|&m| m == l).unwrap())
        .collect();
    let ref_degs: Vec<i64> = reference.iter().map(|&l| degs[l]).collect();
    let sign = koszul_sign(&Perm::from_word(tau), &ref_degs);

    let mut cur: Vec<(usize, Q)> = vec![(x_global, q(1))];
    let mut cur_ar = t;
    let mut pos: Vec<usize> = (1..=t).collect();
    for &l in &order {
        let (m, yg) = args[l];
        let i = pos[l];
        cur = tix.apply(&cur, cur_ar, m, i, yg);
        for l2 in 0..t {
            if pos[l2] > pos[l] {
                pos[l2] = pos[l2] + m - 1;
            }
        }
        cur_ar = cur_ar + m - 1;
        debug_assert!(cur_ar <= max_arity.max(t));
        if cur.is_empty() {
            break;
        }
    }
    (cur, sign)
}

/// The input-relabeling permutation for a non-planar slot assignment: the
/// planar composite lists inputs fiber by fiber; `correction(pi)` carries
/// that arrangement back to the actual input labels.
fn correction_perm(pi: &[usize], t: usize) -> Perm {
    let mut word: Vec<usize> = Vec::with_capacity(pi.len());
    for l in 0..t {
        for (v, &f) in pi.iter().enumerate() {
            if f == l {
                word.push(v);
            }
        }
    }
    // planar position j carries the actual input label word[j]
    Perm::from_word(word)
}

/// Ambient-level matrices of the assembled multiplication, keyed by
/// `(arity, degree)` over the ambient basis of `oo = circle(seq, seq)`.
fn assemble_mhat_amb(
    seq: &SymSeq,
    tix: &TableIndex,
    oo: &Circle,
) -> Result<BTreeMap<(usize, i64), Matrix>, Error> {
    let flat = flatten(seq);
    let mut out = BTreeMap::new();
    for r in oo.amb_arities() {
        let ambcx = oo.amb_complex(r).unwrap().clone();
        let tgt_cx = seq.complex_at(r);
        for n in ambcx.degrees() {
            let dim = ambcx.dim(n);
            let rows = tgt_cx.dim(n);
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for amb in 0..dim {
                let (t, p, x_idx, k) = oo.amb_decode(r, n, amb);
                let e = &oo.powers[&t].elems(r, n - p)[k];
                let mut args = Vec::with_capacity(t);
                let mut degs = Vec::with_capacity(t);
                let mut valid = true;
                for (l, &(dl, il)) in e.parts.iter().enumerate() {
                    let m = e.pi.iter().filter(|&&v| v == l).count();
                    match flat.get(&m).and_then(|f| f.pos.get(&(dl, il))) {
                        Some(&g) => args.push((m, g)),
                        None => {
                            valid = false;
                            break;
                        }
                    }
                    degs.push(dl);
                }
                if !valid {
                    cols.push(Vec::new());
                    continue;
                }
                let xg = flat[&t].pos[&(p, x_idx)];
                let (res, sign) =
                    gamma_planar(tix, t, xg, &args, &degs, seq.policy.max_arity);
                let sigma = if seq.non_sigma {
                    Perm::identity(r)
                } else {
                    correction_perm(&e.pi, t)
                };
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                if sigma.is_identity() {
                    for (zg, cz) in res {
                        let (dz, iz) = flat[&r].fwd[zg];
                        debug_assert_eq!(dz, n);
                        let _ = dz;
                        let en = col.entry(iz).or_insert_with(|| q(0));
                        *en += &sign * &cz;
                    }
                } else {
                    let am = seq.act(r, &sigma).comp(n, &tgt_cx, &tgt_cx);
                    for (zg, cz) in res {
                        let (dz, iz) = flat[&r].fwd[zg];
                        debug_assert_eq!(dz, n);
                        let _ = dz;
                        for (row, v) in am.col(iz) {
                            let en = col.entry(*row).or_insert_with(|| q(0));
                            *en += &sign * &cz * v;
                        }
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            out.insert((r, n), Matrix::from_cols(rows, cols));
        }
    }
    Ok(out)
}

/// Recover the partial-composition tables from an assembled multiplication:
/// `x ∘_i y = m([x ⊗ (1, ..., y, ..., 1)])` with `y` in the `i`-th slot.
fn derive_comp_table(
    seq: &SymSeq,
    unit: &Col,
    oo: &Circle,
    mhat: &SymSeqMap,
) -> Result<CompTable, Error> {
    let flat = flatten(seq);
    let n_max = seq.policy.max_arity;
    let mut entries: BTreeMap<(usize, usize, usize), Vec<(usize, usize, usize, Q)>> =
        BTreeMap::new();
    let arities: Vec<usize> = seq.arities().collect();
    for &r in &arities {
        for &s in &arities {
            if r + s == 0 || r + s - 1 > n_max || r == 0 {
                continue;
            }
            let tgt_r = r + s - 1;
            let tgt_cx = seq.complex_at(tgt_r);
            for i in 1..=r {
                // monotone slot assignment with the s-ary argument in slot i
                let mut pi: Vec<usize> = Vec::with_capacity(tgt_r);
                for v in 0..tgt_r {
                    let f = if v < i - 1 {
                        v
                    } else if v < i - 1 + s {
                        i - 1
                    } else {
                        v - s + 1
                    };
                    pi.push(f);
                }
                let mut rows: Vec<(usize, usize, usize, Q)> = Vec::new();
                for (xg, &(p, x_idx)) in flat[&r].fwd.iter().enumerate() {
                    for (yg, &(dy, y_idx)) in flat[&s].fwd.iter().enumerate() {
                        let nz = p + dy;
                        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                        // multilinear over the unit entries in the other slots
                        let mut combos: Vec<(Vec<(i64, usize)>, Q)> =
                            vec![(Vec::new(), q(1))];
                        for l in 0..r {
                            let mut next = Vec::new();
                            for (parts, c) in &combos {
                                if l == i - 1 {
                                    let mut p2 = parts.clone();
                                    p2.push((dy, y_idx));
                                    next.push((p2, c.clone()));
                                } else {
                                    for (u_idx, cu) in unit {
                                        let mut p2 = parts.clone();
                                        p2.push((0, *u_idx));
                                        next.push((p2, c * cu));
                                    }
                                }
                            }
                            combos = next;
                        }
                        for (parts, c) in combos {
                            let powidx = oo.powers[&r]
                                .lookup(tgt_r, dy, &pi, &parts)
                                .expect("power element for partial composition");
                            let amb = oo
                                .amb_index(tgt_r, nz, r, p, x_idx, powidx)
                                .expect("ambient block for partial composition");
                            let classes = oo.retract_basis(tgt_r, nz, amb);
                            let mm = mhat.comp(tgt_r).comp(
                                nz,
                                &oo.seq.complex_at(tgt_r),
                                &tgt_cx,
                            );
                            for (cls, v) in &classes {
                                for (row, mv) in mm.col(*cls) {
                                    let e = acc.entry(*row).or_insert_with(|| q(0));
                                    *e += &c * v * mv;
                                }
                            }
                        }
                        for (iz, v) in acc {
                            if v.is_zero() {
                                continue;
                            }
                            let zg = flat[&tgt_r].pos[&(nz, iz)];
                            rows.push((xg, yg, zg, v));
                        }
                    }
                }
                if !rows.is_empty() {
                    entries.insert((r, s, i), rows);
                }
            }
        }
    }
    Ok(CompTable { entries })
}

/// An operad: a symmetric sequence with a distinguished unit in arity 1 and
/// a fully verified monoid multiplication for the composition product.
#[derive(Debug, Clone)]
pub struct Operad {
    pub seq: SymSeq,
    /// the unit vector in `O[1]` at degree 0
    pub unit: Col,
    pub comp: CompTable,
    /// `O ∘ O`, cached for every structure computation
    pub self_circle: Circle,
    /// the multiplication `O ∘ O -> O`
    pub mhat: SymSeqMap,
    /// `O[0] = 0` and `O[1]` is spanned by the unit in degree 0
    pub augmentable: bool,
}

fn first_difference(a: &SymSeqMap, b: &SymSeqMap) -> Option<(usize, i64)> {
    let diff = a.add(&b.scale(&q(-1)));
    for (&r, cm) in &diff.comps {
        for (&n, m) in &cm.comps {
            if !m.is_zero() {
                return Some((r, n));
            }
        }
    }
    None
}

impl Operad {
    /// Build and fully verify an operad from its composition tables.
    pub fn new(seq: SymSeq, unit: Col, comp: CompTable) -> Result<Operad, Error> {
        validate_unit(&seq, &unit)?;
        validate_table(&seq, &comp)?;
        let tix = TableIndex::new(&comp);
        let self_circle = circle(&seq, &seq)?;
        let amb_mats = assemble_mhat_amb(&seq, &tix, &self_circle)?;
        // quotient-level multiplication, then well-definedness on orbits
        let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
        for (&r, slot) in &self_circle.seq.slots {
            let mut maps = BTreeMap::new();
            for n in slot.complex.degrees() {
                let sm = self_circle
                    .section_matrix(r, n)
                    .expect("section exists on nonzero levels");
                maps.insert(n, amb_mats[&(r, n)].mul(sm));
            }
            comps.insert(r, ChainMap::from_comps(maps));
        }
        let mhat = SymSeqMap::from_comps(comps);
        for (&(r, n), am) in &amb_mats {
            if am.is_zero() {
                continue;
            }
            let back = match self_circle.retraction_matrix(r, n) {
                Some(rm) => mhat
                    .comp(r)
                    .comp(n, &self_circle.seq.complex_at(r), &seq.complex_at(r))
                    .mul(rm),
                None => Matrix::zero(am.rows, am.cols),
            };
            if &back != am {
                return Err(Error::AxiomViolation {
                    check: "operad composition well-defined on orbits".into(),
                    witness: format!("arity {r}, degree {n}"),
                });
            }
        }
        Self::finish(seq, unit, comp, self_circle, mhat)
    }

    /// Build and fully verify an operad from an already-assembled
    /// multiplication (the tables are recovered from it).
    pub(crate) fn from_mhat(
        seq: SymSeq,
        unit: Col,
        self_circle: Circle,
        mhat: SymSeqMap,
    ) -> Result<Operad, Error> {
        validate_unit(&seq, &unit)?;
        let comp = derive_comp_table(&seq, &unit, &self_circle, &mhat)?;
        Self::finish(seq, unit, comp, self_circle, mhat)
    }

    fn finish(
        seq: SymSeq,
        unit: Col,
        comp: CompTable,
        self_circle: Circle,
        mhat: SymSeqMap,
    ) -> Result<Operad, Error> {
        mhat.verify(&self_circle.seq, &seq)?;
        let id = SymSeqMap::identity(&seq);
        // unit triangles
        let ins_l = unit_insert_left(&self_circle, &unit);
        let left = mhat.compose(&ins_l, &seq, &self_circle.seq, &seq);
        if let Some((r, n)) = first_difference(&left, &id) {
            return Err(Error::AxiomViolation {
                check: "operad unit law (unit composed outside)".into(),
                witness: format!("arity {r}, degree {n}"),
            });
        }
        let ins_r = unit_insert_right(&self_circle, &unit);
        let right = mhat.compose(&ins_r, &seq, &self_circle.seq, &seq);
        if let Some((r, n)) = first_difference(&right, &id) {
            return Err(Error::AxiomViolation {
                check: "operad unit law (units composed inside)".into(),
                witness: format!("arity {r}, degree {n}"),
            });
        }
        // associativity through (O∘O)∘O
        let oo_o = circle(&self_circle.seq, &seq)?;
        let o_oo = circle(&seq, &self_circle.seq)?;
        let iso = canonical_assoc(&self_circle, &oo_o, &self_circle, &o_oo)?;
        let collapse_left = circle_map(&oo_o, &self_circle, &mhat, &id)?;
        let p1 = mhat.compose(&collapse_left, &oo_o.seq, &self_circle.seq, &seq);
        let collapse_right = circle_map(&o_oo, &self_circle, &id, &mhat)?;
        let p2 = mhat
            .compose(&collapse_right, &o_oo.seq, &self_circle.seq, &seq)
            .compose(&iso.fwd, &oo_o.seq, &o_oo.seq, &seq);
        if let Some((r, n)) = first_difference(&p1, &p2) {
            return Err(Error::AxiomViolation {
                check: "operad associativity".into(),
                witness: format!("arity {r}, degree {n}"),
            });
        }
        let augmentable = seq.slot(0).is_none()
            && seq.dim(1, 0) == 1
            && seq.complex_at(1).total_dim() == 1
            && seq.complex_at(1).weights_at(0) == vec![0];
        Ok(Operad {
            seq,
            unit,
            comp,
            self_circle,
            mhat,
            augmentable,
        })
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.seq.policy
    }

    pub fn describe(&self) -> String {
        let dims: Vec<String> = self
            .seq
            .arities()
            .map(|r| format!("{}:{}", r, self.seq.complex_at(r).total_dim()))
            .collect();
        format!("operad with arity dimensions [{}]", dims.join(", "))
    }
}

fn validate_unit(seq: &SymSeq, unit: &Col) -> Result<(), Error> {
    let dim = seq.dim(1, 0);
    if unit.is_empty() || unit.iter().any(|(i, _)| *i >= dim) {
        return Err(Error::invalid(
            "operad unit",
            "the unit must be a nonzero vector in arity 1, degree 0",
        ));
    }
    let weights = seq.complex_at(1).weights_at(0);
    if unit.iter().any(|(i, _)| weights[*i] != 0) {
        return Err(Error::invalid(
            "operad unit",
            "the unit must have weight 0",
        ));
    }
    Ok(())
}

fn validate_table(seq: &SymSeq, comp: &CompTable) -> Result<(), Error> {
    let flat = flatten(seq);
    let dims: BTreeMap<usize, usize> = flat.iter().map(|(&r, f)| (r, f.fwd.len())).collect();
    for (&(r, s, i), entries) in &comp.entries {
        if i == 0 || i > r {
            return Err(Error::invalid(
                "composition table",
                format!("slot {i} out of range for arity {r}"),
            ));
        }
        if r + s == 0 || r + s - 1 > seq.policy.max_arity {
            return Err(Error::invalid(
                "composition table",
                format!("target arity {} exceeds the bound", r + s - 1),
            ));
        }
        let (dx, dy, dz) = (
            dims.get(&r).copied().unwrap_or(0),
            dims.get(&s).copied().unwrap_or(0),
            dims.get(&(r + s - 1)).copied().unwrap_or(0),
        );
        for &(x, y, z, ref c) in entries {
            if x >= dx || y >= dy || z >= dz {
                return Err(Error::invalid(
                    "composition table",
                    format!("index out of range in entry ({r}, {s}, {i})"),
                ));
            }
            if c.is_zero() {
                continue;
            }
            let (px, _) = flat[&r].fwd[x];
            let (py, _) = flat[&s].fwd[y];
            let (pz, _) = flat[&(r + s - 1)].fwd[z];
            if px + py != pz {
                return Err(Error::invalid(
                    "composition table",
                    format!(
                        "degree mismatch in entry ({r}, {s}, {i}): {px} + {py} != {pz}"
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// Re-verify every operad axiom and return a human-readable report.
pub fn check_operad(o: &Operad) -> Result<String, Error> {
    let rebuilt = Operad::new(o.seq.clone(), o.unit.clone(), o.comp.clone())?;
    let mut lines = vec![
        "composition well-defined on symmetry orbits: ok".to_string(),
        "multiplication is an equivariant chain map: ok".to_string(),
        "unit laws: ok".to_string(),
        "associativity through both bracketings: ok".to_string(),
    ];
    if rebuilt.augmentable {
        lines.push("augmentable (no constants, unit spans arity 1): yes".into());
    } else {
        lines.push("augmentable (no constants, unit spans arity 1): no".into());
    }
    lines.push(rebuilt.describe());
    Ok(lines.join("\n"))
}

// ---------------------------------------------------------------------------
// Operad maps and augmentations
// ---------------------------------------------------------------------------

/// A morphism of operads, stored as its underlying sequence map.
#[derive(Debug, Clone)]
pub struct OperadMap {
    pub map: SymSeqMap,
}

/// Verify that `f` preserves units and multiplications.
pub fn verify_operad_map(f: &OperadMap, src: &Operad, tgt: &Operad) -> Result<(), Error> {
    f.map.verify(&src.seq, &tgt.seq)?;
    let m1 = f.map.comp(1).comp(
        0,
        &src.seq.complex_at(1),
        &tgt.seq.complex_at(1),
    );
    let mut image: BTreeMap<usize, Q> = BTreeMap::new();
    for (i, c) in &src.unit {
        for (row, v) in m1.col(*i) {
            let e = image.entry(*row).or_insert_with(|| q(0));
            *e += c * v;
        }
    }
    let image: Col = image.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    if image != tgt.unit {
        return Err(Error::AxiomViolation {
            check: "operad map preserves the unit".into(),
            witness: "image of the source unit differs from the target unit".into(),
        });
    }
    let ff = circle_map(&src.self_circle, &tgt.self_circle, &f.map, &f.map)?;
    let lhs = f
        .map
        .compose(&src.mhat, &src.self_circle.seq, &src.seq, &tgt.seq);
    let rhs = tgt
        .mhat
        .compose(&ff, &src.self_circle.seq, &tgt.self_circle.seq, &tgt.seq);
    if let Some((r, n)) = first_difference(&lhs, &rhs) {
        return Err(Error::AxiomViolation {
            check: "operad map preserves composition".into(),
            witness: format!("arity {r}, degree {n}"),
        });
    }
    Ok(())
}

pub fn identity_operad_map(o: &Operad) -> OperadMap {
    OperadMap {
        map: SymSeqMap::identity(&o.seq),
    }
}

/// The augmentation `ε: O -> I`: identity on the unit span in arity 1, zero
/// elsewhere. Only available when the operad has no constants and its
/// arity-1 part is spanned by the unit.
pub fn augmentation(o: &Operad) -> Result<SymSeqMap, Error> {
    if !o.augmentable {
        return Err(Error::NotAugmentable {
            op: "augmentation".into(),
            operad: o.describe(),
        });
    }
    let (idx, c) = &o.unit[0];
    debug_assert_eq!(*idx, 0);
    let m = Matrix::from_triples(1, 1, &[(0, 0, q(1) / c)]);
    let cm = ChainMap::from_comps([(0, m)].into());
    Ok(SymSeqMap::from_comps([(1, cm)].into()))
}

/// The arity-wise projection from the associative to the commutative operad:
/// every permutation monomial maps to the single commutative generator.
pub fn ass_to_com_projection(src: &Operad, tgt: &Operad) -> Result<OperadMap, Error> {
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &src.seq.slots {
        let dim = slot.complex.dim(0);
        let rows = tgt.seq.dim(r, 0);
        let cols: Vec<Col> = (0..dim).map(|_| vec![(0usize, q(1))]).collect();
        let m = Matrix::from_cols(rows, cols);
        comps.insert(r, ChainMap::from_comps([(0, m)].into()));
    }
    let f = OperadMap {
        map: SymSeqMap::from_comps(comps),
    };
    verify_operad_map(&f, src, tgt)?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Modules and algebras
// ---------------------------------------------------------------------------

/// A left module over an operad; an algebra is the special case where the
/// underlying sequence is concentrated in arity 0.
#[derive(Debug, Clone)]
pub struct LeftModule {
    pub seq: SymSeq,
    /// `O ∘ Y`, cached
    pub circ: Circle,
    /// the action `O ∘ Y -> Y`
    pub action: SymSeqMap,
}

/// A right module over an operad.
#[derive(Debug, Clone)]
pub struct RightModule {
    pub seq: SymSeq,
    /// `Y ∘ O`, cached
    pub circ: Circle,
    /// the action `Y ∘ O -> Y`
    pub action: SymSeqMap,
}

/// Verify unit and associativity of a left action.
pub fn check_left_module(o: &Operad, m: &LeftModule) -> Result<(), Error> {
    m.action.verify(&m.circ.seq, &m.seq)?;
    let id_y = SymSeqMap::identity(&m.seq);
    let ins = unit_insert_left(&m.circ, &o.unit);
    let unit_path = m.action.compose(&ins, &m.seq, &m.circ.seq, &m.seq);
    if let Some((r, n)) = first_difference(&unit_path, &id_y) {
        return Err(Error::AxiomViolation {
            check: "left action unit law".into(),
            witness: format!("arity {r}, degree {n}"),
        });
    }
    let oo = &o.self_circle;
    let oo_y = circle(&oo.seq, &m.seq)?;
    let o_oy = circle(&o.seq, &m.circ.seq)?;
    let iso = canonical_assoc(oo, &oo_y, &m.circ, &o_oy)?;
    let collapse = circle_map(&oo_y, &m.circ, &o.mhat, &id_y)?;
    let p1 = m.action.compose(&collapse, &oo_y.seq, &m.circ.seq, &m.seq);
    let id_o = SymSeqMap::identity(&o.seq);
    let act_inner = circle_map(&o_oy, &m.circ, &id_o, &m.action)?;
    let p2 = m
        .action
        .compose(&act_inner, &o_oy.seq, &m.circ.seq, &m.seq)
        .compose(&iso.fwd, &oo_y.seq, &o_oy.seq, &m.seq);
    if let Some((r, n)) = first_difference(&p1, &p2) {
        return Err(Error::AxiomViolation {
            check: "left action associativity".into(),
            witness: format!("arity {r}, degree {n}"),
        });
    }
    Ok(())
}

/// Verify unit and associativity of a right action.
pub fn check_right_module(o: &Operad, m: &RightModule) -> Result<(), Error> {
    m.action.verify(&m.circ.seq, &m.seq)?;
    let id_y = SymSeqMap::identity(&m.seq);
    let ins = unit_insert_right(&m.circ, &o.unit);
    let unit_path = m.action.compose(&ins, &m.seq, &m.circ.seq, &m.seq);
    if let Some((r, n)) = first_difference(&unit_path, &id_y) {
        return Err(Error::AxiomViolation {
            check: "right action unit law".into(),
            witness: format!("arity {r}, degree {n}"),
        });
    }
    let oo = &o.self_circle;
    let yo_o = circle(&m.circ.seq, &o.seq)?;
    let y_oo = circle(&m.seq, &oo.seq)?;
    let iso = canonical_assoc(&m.circ, &yo_o, oo, &y_oo)?;
    let id_o = SymSeqMap::identity(&o.seq);
    let act_outer = circle_map(&yo_o, &m.circ, &m.action, &id_o)?;
    let p1 = m.action.compose(&act_outer, &yo_o.seq, &m.circ.seq, &m.seq);
    let collapse = circle_map(&y_oo, &m.circ, &id_y, &o.mhat)?;
    let p2 = m
        .action
        .compose(&collapse, &y_oo.seq, &m.circ.seq, &m.seq)
        .compose(&iso.bwd, &yo_o.seq, &y_oo.seq, &m.seq);
    if let Some((r, n)) = first_difference(&p1, &p2) {
        return Err(Error::AxiomViolation {
            check: "right action associativity".into(),
            witness: format!("arity {r}, degree {n}"),
        });
    }
    Ok(())
}

/// The free left module `O ∘ Y` with action `m ∘ id` through regrouping.
pub fn free_left_module(o: &Operad, y: &SymSeq) -> Result<LeftModule, Error> {
    let oy = circle(&o.seq, y)?;
    let oo = &o.self_circle;
    let oo_y = circle(&oo.seq, y)?;
    let o_oy = circle(&o.seq, &oy.seq)?;
    let iso = canonical_assoc(oo, &oo_y, &oy, &o_oy)?;
    let id_y = SymSeqMap::identity(y);
    let collapse = circle_map(&oo_y, &oy, &o.mhat, &id_y)?;
    let action = collapse
        .compose(&iso.bwd, &o_oy.seq, &oo_y.seq, &oy.seq);
    Ok(LeftModule {
        seq: oy.seq.clone(),
        circ: o_oy,
        action,
    })
}

/// The free algebra on a complex of generators, each of weight 1; the
/// weight bound of the operad's policy truncates the result.
pub fn free_algebra(o: &Operad, z: &ChainComplex) -> Result<LeftModule, Error> {
    require_weight_one(z, "free algebra generators")?;
    let zh = SymSeq::hat(z, o.seq.non_sigma, o.seq.policy)?;
    free_left_module(o, &zh)
}

fn require_weight_one(z: &ChainComplex, context: &str) -> Result<(), Error> {
    if z.weights().iter().any(|&w| w != 1) {
        return Err(Error::invalid(
            context,
            "generators must carry weight 1 (weights count tensor factors of generators)",
        ));
    }
    Ok(())
}

/// The square-zero algebra on a complex of weight-1 generators: the unit
/// acts as the identity and every operation of arity other than 1 acts by 0.
pub fn square_zero_algebra(o: &Operad, z: &ChainComplex) -> Result<LeftModule, Error> {
    if !o.augmentable {
        return Err(Error::invalid(
            "square-zero algebra",
            "requires an operad with no constants whose arity-1 part is spanned by the unit",
        ));
    }
    require_weight_one(z, "square-zero algebra generators")?;
    let zh = SymSeq::hat(z, o.seq.non_sigma, o.seq.policy)?;
    let circ = circle(&o.seq, &zh)?;
    let (u_idx, cu) = &o.unit[0];
    let inv = q(1) / cu;
    let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
    if let Some(slot) = circ.seq.slot(0) {
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let rows = zh.dim(0, n);
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb, c0) in circ.lift(0, n, j) {
                    let (t, p, i, k) = circ.amb_decode(0, n, amb);
                    if t != 1 || p != 0 || i != *u_idx {
                        continue;
                    }
                    let e = &circ.powers[&1].elems(0, n)[k];
                    let en = col.entry(e.parts[0].1).or_insert_with(|| q(0));
                    *en += &c0 * &inv;
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(rows, cols));
        }
    }
    let action = SymSeqMap::from_comps([(0, ChainMap::from_comps(maps))].into());
    Ok(LeftModule {
        seq: zh,
        circ,
        action,
    })
}

/// The operad acting on itself from the left by its multiplication.
pub fn operad_as_left_module(o: &Operad) -> LeftModule {
    LeftModule {
        seq: o.seq.clone(),
        circ: o.self_circle.clone(),
        action: o.mhat.clone(),
    }
}

/// The operad acting on itself from the right by its multiplication.
pub fn operad_as_right_module(o: &Operad) -> RightModule {
    RightModule {
        seq: o.seq.clone(),
        circ: o.self_circle.clone(),
        action: o.mhat.clone(),
    }
}

/// One multilinear action value `op(args) = coeff * out`, with basis
/// elements addressed as (degree, index within degree).
#[derive(Debug, Clone)]
pub struct ActionEntry {
    pub op_arity: usize,
    pub op: (i64, usize),
    pub args: Vec<(i64, usize)>,
    pub out: (i64, usize),
    pub coeff: Q,
}

/// Assemble an algebra structure on `z` from an explicit action table, then
/// verify the module axioms in full. Table values are read on the canonical
/// orbit representatives of `O ∘ Y`; pairs not listed act by zero.
pub fn algebra_from_action(
    o: &Operad,
    z: &ChainComplex,
    entries: &[ActionEntry],
) -> Result<LeftModule, Error> {
    let zh = SymSeq::hat(z, o.seq.non_sigma, o.seq.policy)?;
    let mut table: BTreeMap<(usize, (i64, usize), Vec<(i64, usize)>), Vec<((i64, usize), Q)>> =
        BTreeMap::new();
    for e in entries {
        if e.args.len() != e.op_arity {
            return Err(Error::invalid(
                "action table",
                format!(
                    "an operation of arity {} is applied to {} inputs",
                    e.op_arity,
                    e.args.len()
                ),
            ));
        }
        let ocx = o.seq.complex_at(e.op_arity);
        let op_level = ocx.level(e.op.0).filter(|l| e.op.1 < l.dim());
        let Some(op_level) = op_level else {
            return Err(Error::invalid(
                "action table",
                format!("no operation at arity {}, degree {}, index {}", e.op_arity, e.op.0, e.op.1),
            ));
        };
        let mut degree = e.op.0;
        let mut weight = op_level.weights[e.op.1];
        for a in &e.args {
            let Some(l) = z.level(a.0).filter(|l| a.1 < l.dim()) else {
                return Err(Error::invalid(
                    "action table",
                    format!("no algebra element at degree {}, index {}", a.0, a.1),
                ));
            };
            degree += a.0;
            weight += l.weights[a.1];
        }
        let Some(out_level) = z.level(e.out.0).filter(|l| e.out.1 < l.dim()) else {
            return Err(Error::invalid(
                "action table",
                format!("no algebra element at degree {}, index {}", e.out.0, e.out.1),
            ));
        };
        if e.out.0 != degree {
            return Err(Error::invalid(
                "action table",
                format!("value must live in degree {degree}, found degree {}", e.out.0),
            ));
        }
        if out_level.weights[e.out.1] != weight {
            return Err(Error::invalid(
                "action table",
                format!("value must carry weight {weight}"),
            ));
        }
        table
            .entry((e.op_arity, e.op, e.args.clone()))
            .or_default()
            .push((e.out, e.coeff.clone()));
    }
    let circ = circle(&o.seq, &zh)?;
    let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
    if let Some(slot) = circ.seq.slot(0) {
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let rows = zh.dim(0, n);
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb, c0) in circ.lift(0, n, j) {
                    let (t, p, i, k) = circ.amb_decode(0, n, amb);
                    let e = &circ.powers[&t].elems(0, n)[k];
                    if let Some(outs) = table.get(&(t, (p, i), e.parts.clone())) {
                        for ((_, oi), cf) in outs {
                            let en = col.entry(*oi).or_insert_with(|| q(0));
                            *en += &c0 * cf;
                        }
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(rows, cols));
        }
    }
    let action = SymSeqMap::from_comps([(0, ChainMap::from_comps(maps))].into());
    let m = LeftModule {
        seq: zh,
        circ,
        action,
    };
    check_left_module(o, &m)?;
    Ok(m)
}

/// Restrict a left module along an operad map `f: src -> tgt`: same
/// underlying sequence, action precomposed with `f`.
pub fn restrict_left_along(
    f: &SymSeqMap,
    src: &Operad,
    m: &LeftModule,
) -> Result<LeftModule, Error> {
    let circ = circle(&src.seq, &m.seq)?;
    let id_y = SymSeqMap::identity(&m.seq);
    let step = circle_map(&circ, &m.circ, f, &id_y)?;
    let action = m.action.compose(&step, &circ.seq, &m.circ.seq, &m.seq);
    Ok(LeftModule {
        seq: m.seq.clone(),
        circ,
        action,
    })
}

/// Restrict a right module along an operad map `f: src -> tgt`.
pub fn restrict_right_along(
    f: &SymSeqMap,
    src: &Operad,
    m: &RightModule,
) -> Result<RightModule, Error> {
    let circ = circle(&m.seq, &src.seq)?;
    let id_y = SymSeqMap::identity(&m.seq);
    let step = circle_map(&circ, &m.circ, &id_y, f)?;
    let action = m.action.compose(&step, &circ.seq, &m.circ.seq, &m.seq);
    Ok(RightModule {
        seq: m.seq.clone(),
        circ,
        action,
    })
}

/// The unit sequence as a right module over `o`, via the augmentation.
pub fn unit_as_right_module(o: &Operad) -> Result<RightModule, Error> {
    let eps = augmentation(o)?;
    let i_seq = SymSeq::unit(o.seq.non_sigma, o.seq.policy);
    let ii = circle(&i_seq, &i_seq)?;
    let (fwd, _) = right_unit_iso(&ii)?;
    let m_i = RightModule {
        seq: i_seq,
        circ: ii,
        action: fwd,
    };
    restrict_right_along(&eps, o, &m_i)
}

// ---------------------------------------------------------------------------
// Endomorphism operads and the adjoint description of actions
// ---------------------------------------------------------------------------

/// The endomorphism operad of a sequence without arity-0 part: underlying
/// `Map(y, y)`, multiplication transposed from double evaluation. For the
/// zero sequence this degenerates to the unit operad.
pub fn endomorphism_operad(y: &SymSeq) -> Result<Operad, Error> {
    if y.slot(0).is_some() {
        return Err(Error::UnboundedArityZero {
            context: "endomorphism operad of a sequence with arity-0 part".into(),
        });
    }
    if y.is_zero() {
        return unit_operad(y.non_sigma, y.policy);
    }
    let ms = MapSeq::new(y, y)?;
    let e_seq = ms.seq.clone();
    let ee = circle(&e_seq, &e_seq)?;
    let ey = circle(&e_seq, y)?;
    let ee_y = circle(&ee.seq, y)?;
    let e_ey = circle(&e_seq, &ey.seq)?;
    let iso = canonical_assoc(&ee, &ee_y, &ey, &e_ey)?;
    let ev1 = ev_map(&ms, y, &ey)?;
    let id_e = SymSeqMap::identity(&e_seq);
    let inner = circle_map(&e_ey, &ey, &id_e, &ev1)?;
    let total = ev1
        .compose(&inner, &e_ey.seq, &ey.seq, y)
        .compose(&iso.fwd, &ee_y.seq, &e_ey.seq, y);
    let mhat = transpose_map(&total, &ee_y, &ms, y)?;
    // unit: coordinates of the identity family
    let mut fam: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
    for (&r, slot) in &y.slots {
        for n in slot.complex.degrees() {
            fam.insert((r, n), Matrix::identity(slot.complex.dim(n)));
        }
    }
    let coords = ms
        .coordinates(1, 0, &fam)
        .ok_or_else(|| Error::AxiomViolation {
            check: "endomorphism operad unit".into(),
            witness: "identity map not expressible in the hom basis".into(),
        })?;
    let unit: Col = coords.col(0).clone();
    Operad::from_mhat(e_seq, unit, ee, mhat)
}

/// Cross-check a left action through its adjoint: transpose the action to a
/// sequence map `O -> Map(Y, Y)` and verify it is an operad map into the
/// endomorphism operad. Requires `Y` without arity-0 part.
pub fn check_module_adjoint(o: &Operad, m: &LeftModule) -> Result<(), Error> {
    let ms = MapSeq::new(&m.seq, &m.seq)?;
    let f = transpose_map(&m.action, &m.circ, &ms, &m.seq)?;
    let e_op = endomorphism_operad(&m.seq)?;
    verify_operad_map(&OperadMap { map: f }, o, &e_op)
}

// ---------------------------------------------------------------------------
// Builtin operads
// ---------------------------------------------------------------------------

/// The unit operad: one identity operation in arity 1.
pub fn unit_operad(non_sigma: bool, policy: TruncationPolicy) -> Result<Operad, Error> {
    let seq = SymSeq::unit(non_sigma, policy);
    let mut entries = BTreeMap::new();
    entries.insert((1, 1, 1), vec![(0, 0, 0, q(1))]);
    Operad::new(seq, vec![(0, q(1))], CompTable { entries })
}

/// The commutative operad, truncated at the policy's arity bound: one
/// basis operation `e_r` in every arity `1 <= r <= N` with the trivial
/// symmetry action; compositions landing above the bound vanish.
pub fn com(policy: TruncationPolicy) -> Result<Operad, Error> {
    let n_max = policy.max_arity;
    let mut slots: BTreeMap<usize, AritySlot> = BTreeMap::new();
    for r in 1..=n_max {
        let cx = ChainComplex::concentrated(&format!("e{r}"), 0, 0);
        let gens = (0..r.saturating_sub(1))
            .map(|_| ChainMap::identity(&cx))
            .collect();
        slots.insert(r, AritySlot { complex: cx, gens });
    }
    let seq = SymSeq::new(slots, false, policy)?;
    let mut entries = BTreeMap::new();
    for r in 1..=n_max {
        for s in 1..=n_max {
            if r + s - 1 > n_max {
                continue;
            }
            for i in 1..=r {
                entries.insert((r, s, i), vec![(0, 0, 0, q(1))]);
            }
        }
    }
    Operad::new(seq, vec![(0, q(1))], CompTable { entries })
}

fn perm_word_name(p: &Perm) -> String {
    let digits: String = p.as_slice().iter().map(|v| (v + 1).to_string()).collect();
    format!("w{digits}")
}

/// The associative operad, truncated at the policy's arity bound: the
/// multilinear monomials on `r` letters (one per permutation, acted on by
/// relabeling); substitution splices words.
pub fn ass(policy: TruncationPolicy) -> Result<Operad, Error> {
    let n_max = policy.max_arity;
    let mut slots: BTreeMap<usize, AritySlot> = BTreeMap::new();
    let mut perms: BTreeMap<usize, Vec<Perm>> = BTreeMap::new();
    let mut index: BTreeMap<usize, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    for r in 1..=n_max {
        let ps = Perm::enumerate(r);
        let mut pos = BTreeMap::new();
        for (k, p) in ps.iter().enumerate() {
            pos.insert(p.as_slice().to_vec(), k);
        }
        let names: Vec<String> = ps.iter().map(perm_word_name).collect();
        let cx = ChainComplex::new(
            [(0, crate::chain::LevelBasis::plain(names))].into(),
            BTreeMap::new(),
        )?;
        let mut gens = Vec::new();
        for s in 0..r.saturating_sub(1) {
            let tau = Perm::adjacent(r, s);
            let mut triples = Vec::new();
            for (k, p) in ps.iter().enumerate() {
                let relabeled: Vec<usize> = p.as_slice().iter().map(|&v| tau.apply(v)).collect();
                triples.push((pos[&relabeled], k, q(1)));
            }
            let m = Matrix::from_triples(ps.len(), ps.len(), &triples);
            gens.push(ChainMap::from_comps([(0, m)].into()));
        }
        slots.insert(r, AritySlot { complex: cx, gens });
        perms.insert(r, ps);
        index.insert(r, pos);
    }
    let seq = SymSeq::new(slots, false, policy)?;
    let mut entries: BTreeMap<(usize, usize, usize), Vec<(usize, usize, usize, Q)>> =
        BTreeMap::new();
    for r in 1..=n_max {
        for s in 1..=n_max {
            if r + s - 1 > n_max {
                continue;
            }
            for i in 1..=r {
                let mut rows = Vec::new();
                for (xk, x) in perms[&r].iter().enumerate() {
                    let wx = x.as_slice();
                    for (yk, y) in perms[&s].iter().enumerate() {
                        let wy = y.as_slice();
                        let mut w: Vec<usize> = Vec::with_capacity(r + s - 1);
                        for &v in wx {
                            if v + 1 == i {
                                for &u in wy {
                                    w.push(u + i - 1);
                                }
                            } else if v + 1 < i {
                                w.push(v);
                            } else {
                                w.push(v + s - 1);
                            }
                        }
                        rows.push((xk, yk, index[&(r + s - 1)][&w], q(1)));
                    }
                }
                entries.insert((r, s, i), rows);
            }
        }
    }
    Operad::new(seq, vec![(0, q(1))], CompTable { entries })
}

/// Truncate an operad to a smaller arity bound. The arities above the bound
/// form an operadic ideal only when there are no constants, so the arity-0
/// part must vanish.
pub fn truncate_operad(o: &Operad, n_max: usize) -> Result<Operad, Error> {
    if o.seq.slot(0).is_some() {
        return Err(Error::invalid(
            "operad truncation",
            "arities above the bound only form an ideal when the arity-0 part vanishes",
        ));
    }
    if n_max == 0 || n_max > o.seq.policy.max_arity {
        return Err(Error::invalid(
            "operad truncation",
            "the new bound must be positive and at most the current bound",
        ));
    }
    let policy = TruncationPolicy {
        max_arity: n_max,
        max_weight: o.seq.policy.max_weight,
    };
    let mut slots = BTreeMap::new();
    for (&r, slot) in &o.seq.slots {
        if r <= n_max {
            slots.insert(r, slot.clone());
        }
    }
    let seq = SymSeq::new(slots, o.seq.non_sigma, policy)?;
    let mut entries = BTreeMap::new();
    for (&(r, s, i), rows) in &o.comp.entries {
        if r <= n_max && s <= n_max && r + s - 1 <= n_max {
            entries.insert((r, s, i), rows.clone());
        }
    }
    Operad::new(seq, o.unit.clone(), CompTable { entries })
}

/// Forget the symmetry actions: same components and tables, re-verified as
/// a non-symmetric operad (planar trees instead of symmetric ones).
pub fn forget_symmetry(o: &Operad) -> Result<Operad, Error> {
    let mut slots = BTreeMap::new();
    for (&r, slot) in &o.seq.slots {
        slots.insert(
            r,
            AritySlot {
                complex: slot.complex.clone(),
                gens: Vec::new(),
            },
        );
    }
    let seq = SymSeq::new(slots, true, o.seq.policy)?;
    Operad::new(seq, o.unit.clone(), o.comp.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::LevelBasis;

    fn p3() -> TruncationPolicy {
        TruncationPolicy::arity(3)
    }

    fn p33() -> TruncationPolicy {
        TruncationPolicy::arity_weight(3, 3)
    }

    fn point(weight: u32) -> ChainComplex {
        ChainComplex::concentrated("v", 0, weight)
    }

    #[test]
    fn builtin_operads_construct() {
        unit_operad(false, p3()).unwrap();
        let c = com(p3()).unwrap();
        assert_eq!(c.seq.dims().values().sum::<usize>(), 3);
        assert!(c.augmentable);
        let a = ass(p3()).unwrap();
        assert_eq!(a.seq.dim(3, 0), 6);
        assert!(a.augmentable);
        // the arity-3 symmetry action is the regular representation: the
        // first adjacent transposition acts without fixed basis vectors
        let g = a.seq.act(3, &Perm::adjacent(3, 0));
        let m = g.comp(0, &a.seq.complex_at(3), &a.seq.complex_at(3));
        for k in 0..6 {
            assert!(m.get(k, k).is_zero());
        }
    }

    #[test]
    fn action_table_reproduces_the_square_zero_algebra() {
        let o = com(p33()).unwrap();
        let z = point(1);
        // the unit acts by the identity, everything else by zero
        let entries = vec![ActionEntry {
            op_arity: 1,
            op: (0, 0),
            args: vec![(0, 0)],
            out: (0, 0),
            coeff: q(1),
        }];
        let m = algebra_from_action(&o, &z, &entries).unwrap();
        let sq = square_zero_algebra(&o, &z).unwrap();
        assert!(m.action.equals(&sq.action));
    }

    #[test]
    fn action_table_rejects_graded_nonsense() {
        let o = com(p33()).unwrap();
        let z = point(1);
        // value in the wrong degree
        let entries = vec![ActionEntry {
            op_arity: 1,
            op: (0, 0),
            args: vec![(0, 0)],
            out: (1, 0),
            coeff: q(1),
        }];
        assert!(algebra_from_action(&o, &z, &entries).is_err());
        // the unit acting by a scalar other than one breaks the unit law
        let entries = vec![ActionEntry {
            op_arity: 1,
            op: (0, 0),
            args: vec![(0, 0)],
            out: (0, 0),
            coeff: q(2),
        }];
        let err = algebra_from_action(&o, &z, &entries).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { .. }), "{err}");
    }

    #[test]
    fn corrupted_composition_fails_with_witness() {
        // negate one entry of the commutative table: associativity breaks
        let good = com(TruncationPolicy::arity(4)).unwrap();
        let mut entries = good.comp.entries.clone();
        entries.get_mut(&(2, 2, 1)).unwrap()[0].3 = q(-1);
        let res = Operad::new(good.seq.clone(), good.unit.clone(), CompTable { entries });
        match res {
            Err(Error::AxiomViolation { check, witness }) => {
                assert!(check.contains("associativity") || check.contains("well-defined"));
                assert!(witness.contains("arity"));
            }
            other => panic!("expected an axiom violation, got {:?}", other.map(|o| o.describe())),
        }
    }

    #[test]
    fn free_algebra_dimensions() {
        for o in [com(p33()).unwrap(), ass(p33()).unwrap()] {
            let fa = free_algebra(&o, &point(1)).unwrap();
            let cx = fa.seq.complex_at(0);
            assert_eq!(cx.dim(0), 3);
            assert_eq!(cx.weights_at(0), vec![1, 2, 3]);
            check_left_module(&o, &fa).unwrap();
        }
    }

    #[test]
    fn free_module_over_unit_is_identity() {
        let i = unit_operad(false, p3()).unwrap();
        let y = {
            let cx = ChainComplex::new(
                [(0, LevelBasis::plain(vec!["a".into(), "b".into()]))].into(),
                BTreeMap::new(),
            )
            .unwrap();
            let swap = Matrix::from_triples(2, 2, &[(1, 0, q(1)), (0, 1, q(1))]);
            let slot = AritySlot {
                gens: vec![ChainMap::from_comps([(0, swap)].into())],
                complex: cx,
            };
            SymSeq::new([(2, slot)].into(), false, p3()).unwrap()
        };
        let fm = free_left_module(&i, &y).unwrap();
        assert_eq!(fm.seq.dims(), y.dims());
        check_left_module(&i, &fm).unwrap();
    }

    #[test]
    fn square_zero_passes_module_axioms() {
        for o in [com(p33()).unwrap(), ass(p33()).unwrap()] {
            let sz = square_zero_algebra(&o, &point(1)).unwrap();
            assert_eq!(sz.seq.total_dim(), 1);
            check_left_module(&o, &sz).unwrap();
        }
    }

    #[test]
    fn corrupted_module_action_fails() {
        let o = com(p33()).unwrap();
        let mut fa = free_algebra(&o, &point(1)).unwrap();
        // scale the weight-2 part of the action by 2: associativity breaks
        let mut cm = fa.action.comp(0);
        let m = cm.comps.get_mut(&0).unwrap();
        let weights = fa.seq.complex_at(0).weights_at(0);
        for c in 0..m.cols {
            let col = m.col(c).clone();
            let scaled: Vec<(usize, Q)> = col
                .into_iter()
                .map(|(r, v)| if weights[r] == 2 { (r, v * q(2)) } else { (r, v) })
                .collect();
            m.set_col(c, scaled);
        }
        fa.action = SymSeqMap::from_comps([(0, cm)].into());
        match check_left_module(&o, &fa) {
            Err(Error::AxiomViolation { check, .. }) => {
                assert!(check.contains("unit") || check.contains("associativity"));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn trivial_algebra_via_augmentation_is_square_zero() {
        let o = com(p33()).unwrap();
        let eps = augmentation(&o).unwrap();
        let i = unit_operad(false, p33()).unwrap();
        let zh = SymSeq::hat(&point(1), false, p33()).unwrap();
        // z as a module over the unit operad
        let iz = circle(&i.seq, &zh).unwrap();
        let (strip, _) = crate::circle::left_unit_iso(&iz).unwrap();
        let m_i = LeftModule {
            seq: zh.clone(),
            circ: iz,
            action: strip,
        };
        check_left_module(&i, &m_i).unwrap();
        let restricted = restrict_left_along(&eps, &o, &m_i).unwrap();
        check_left_module(&o, &restricted).unwrap();
        let sz = square_zero_algebra(&o, &point(1)).unwrap();
        assert!(restricted.action.equals(&sz.action));
    }

    #[test]
    fn operads_as_modules_over_themselves() {
        let o = com(p3()).unwrap();
        check_left_module(&o, &operad_as_left_module(&o)).unwrap();
        check_right_module(&o, &operad_as_right_module(&o)).unwrap();
        let a = ass(TruncationPolicy::arity(2)).unwrap();
        check_left_module(&a, &operad_as_left_module(&a)).unwrap();
        check_right_module(&a, &operad_as_right_module(&a)).unwrap();
    }

    #[test]
    fn unit_right_module_via_augmentation() {
        for o in [com(p3()).unwrap(), ass(p3()).unwrap()] {
            let m = unit_as_right_module(&o).unwrap();
            assert_eq!(m.seq.total_dim(), 1);
            check_right_module(&o, &m).unwrap();
        }
    }

    #[test]
    fn projection_to_commutative_is_an_operad_map() {
        let a = ass(p3()).unwrap();
        let c = com(p3()).unwrap();
        ass_to_com_projection(&a, &c).unwrap();
        // augmentations are operad maps to the unit operad
        let i = unit_operad(false, p3()).unwrap();
        for o in [&a, &c] {
            let f = OperadMap {
                map: augmentation(o).unwrap(),
            };
            verify_operad_map(&f, o, &i).unwrap();
        }
        // the identity is an operad map
        verify_operad_map(&identity_operad_map(&a), &a, &a).unwrap();
    }

    #[test]
    fn derived_table_round_trips() {
        let c = com(p3()).unwrap();
        let derived = derive_comp_table(&c.seq, &c.unit, &c.self_circle, &c.mhat).unwrap();
        assert_eq!(derived.entries, c.comp.entries);
        let a = ass(TruncationPolicy::arity(2)).unwrap();
        let derived = derive_comp_table(&a.seq, &a.unit, &a.self_circle, &a.mhat).unwrap();
        assert_eq!(derived.entries, a.comp.entries);
    }

    #[test]
    fn endomorphism_operads() {
        // of the unit sequence: one-dimensional in arity 1
        let i_seq = SymSeq::unit(false, p3());
        let e = endomorphism_operad(&i_seq).unwrap();
        assert_eq!(e.seq.dim(1, 0), 1);
        assert_eq!(e.seq.total_dim(), 1);
        // of the zero sequence: only the bookkeeping unit
        let z = SymSeq::zero(false, p3());
        let e = endomorphism_operad(&z).unwrap();
        assert_eq!(e.seq.total_dim(), 1);
    }

    #[test]
    fn action_transposes_to_an_operad_map() {
        let o = com(TruncationPolicy::arity(2)).unwrap();
        let m = operad_as_left_module(&o);
        check_module_adjoint(&o, &m).unwrap();
    }

    #[test]
    fn truncation_and_symmetry_forgetting() {
        let c4 = com(TruncationPolicy::arity(4)).unwrap();
        let c3 = truncate_operad(&c4, 3).unwrap();
        let fresh = com(p3()).unwrap();
        assert_eq!(c3.comp.entries, fresh.comp.entries);
        assert_eq!(c3.seq.dims(), fresh.seq.dims());

        // planar versions: same dimensions, no symmetry to divide by
        let pc = forget_symmetry(&fresh).unwrap();
        assert!(pc.seq.non_sigma);
        assert_eq!(pc.seq.dims(), fresh.seq.dims());
        let pa = forget_symmetry(&ass(p3()).unwrap()).unwrap();
        assert_eq!(pa.seq.dim(3, 0), 6);
        check_left_module(&pa, &operad_as_left_module(&pa)).unwrap();
    }

    #[test]
    fn check_report_mentions_axioms() {
        let c = com(p3()).unwrap();
        let report = check_operad(&c).unwrap();
        assert!(report.contains("associativity"));
        assert!(report.contains("unit laws"));
    }
}
