//! The composition product of symmetric sequences.
//!
//! For sequences `a`, `b` the composite `(a ∘ b)[r]` is built in two stages.
//! First the ambient complex `⊕_t a[t] ⊗ (b^{⊗̌t})[r]` is laid out in blocks
//! indexed by `(t, a-degree)`; then the diagonal action of `Σ_t` (the stored
//! action on `a[t]` tensored with the factor action on the power, including
//! Koszul signs) is divided out by the averaging projector. The section and
//! retraction of that projector are kept: all structure maps on composites,
//! and both directions of the associativity isomorphism, are computed on
//! ambient representatives and never by matrix inversion.
//!
//! Truncation soundness: when `b` has a nonzero arity-0 part, inner arities
//! can exceed any bound while regrouping a triple composite, so the product
//! is only formed when the truncation provably commutes with regrouping.
//! That holds when the outer factor is concentrated in arities `<= 1`, or
//! when `b` is concentrated in arity 0 with all weights positive and the
//! weight bound does not exceed the arity bound (then a composite of total
//! weight `w` involves at most `w` factors at every nesting depth).

use crate::chain::{ChainComplex, ChainMap, LevelBasis};
use crate::error::Error;
use crate::linalg::{Col, Matrix};
use crate::perm::{koszul_sign, Perm};
use crate::symseq::{
    par, projector_coinvariants, AritySlot, MapSeq, SymSeq, SymSeqMap, TensorPower,
};
use crate::{q, Q};
use num::Zero;
use std::collections::BTreeMap;

/// One ambient block: `a[t]_p ⊗ pow_t[r]_q` at `q = n - p`.
#[derive(Debug, Clone)]
pub(crate) struct AmbBlock {
    pub t: usize,
    pub p: i64,
    pub adim: usize,
    pub pdim: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct AmbLevel {
    pub blocks: Vec<AmbBlock>,
    pub dim: usize,
}

impl AmbLevel {
    fn block(&self, t: usize, p: i64) -> Option<&AmbBlock> {
        self.blocks.iter().find(|b| b.t == t && b.p == p)
    }

    fn decode(&self, idx: usize) -> (usize, i64, usize, usize) {
        let pos = self
            .blocks
            .partition_point(|b| b.offset <= idx)
            .checked_sub(1)
            .expect("ambient index below first block");
        let b = &self.blocks[pos];
        let rel = idx - b.offset;
        (b.t, b.p, rel / b.pdim, rel % b.pdim)
    }
}

/// A composition product, retaining everything needed to build maps out of
/// and into it on representatives.
#[derive(Debug, Clone)]
pub struct Circle {
    pub a: SymSeq,
    pub b: SymSeq,
    /// the composite sequence, with verified slot actions
    pub seq: SymSeq,
    /// tensor powers of `b`, one per arity of `a`
    pub powers: BTreeMap<usize, TensorPower>,
    amb: BTreeMap<usize, ChainComplex>,
    levels: BTreeMap<(usize, i64), AmbLevel>,
    section: BTreeMap<(usize, i64), Matrix>,
    retraction: BTreeMap<(usize, i64), Matrix>,
}

impl Circle {
    pub(crate) fn amb_complex(&self, r: usize) -> Option<&ChainComplex> {
        self.amb.get(&r)
    }

    pub(crate) fn amb_arities(&self) -> Vec<usize> {
        self.amb.keys().copied().collect()
    }

    pub(crate) fn amb_dim(&self, r: usize, n: i64) -> usize {
        self.levels.get(&(r, n)).map_or(0, |l| l.dim)
    }

    /// Ambient position of `a`-element `(t, p, i)` tensored with power
    /// element `k`; `None` when the block does not exist.
    pub(crate) fn amb_index(
        &self,
        r: usize,
        n: i64,
        t: usize,
        p: i64,
        i: usize,
        k: usize,
    ) -> Option<usize> {
        let lvl = self.levels.get(&(r, n))?;
        let b = lvl.block(t, p)?;
        debug_assert!(i < b.adim && k < b.pdim);
        Some(b.offset + i * b.pdim + k)
    }

    pub(crate) fn amb_decode(&self, r: usize, n: i64, idx: usize) -> (usize, i64, usize, usize) {
        self.levels[&(r, n)].decode(idx)
    }

    /// Section of the quotient: sparse column over the ambient basis.
    pub(crate) fn lift(&self, r: usize, n: i64, class: usize) -> Col {
        self.section
            .get(&(r, n))
            .map_or_else(Vec::new, |s| s.col(class).clone())
    }

    /// Retraction applied to one ambient basis vector.
    pub(crate) fn retract_basis(&self, r: usize, n: i64, amb: usize) -> Col {
        self.retraction
            .get(&(r, n))
            .map_or_else(Vec::new, |m| m.col(amb).clone())
    }

    pub(crate) fn section_matrix(&self, r: usize, n: i64) -> Option<&Matrix> {
        self.section.get(&(r, n))
    }

    pub(crate) fn retraction_matrix(&self, r: usize, n: i64) -> Option<&Matrix> {
        self.retraction.get(&(r, n))
    }
}

fn circle_precondition(a: &SymSeq, b: &SymSeq) -> Result<(), Error> {
    if b.slot(0).is_none() || a.arity_at_most_one() {
        return Ok(());
    }
    let weights_positive = b
        .slot(0)
        .map(|s| s.complex.weights().iter().all(|&w| w >= 1))
        .unwrap_or(true);
    let bounded = matches!(b.policy.max_weight, Some(w) if w as usize <= b.policy.max_arity);
    if b.arity_zero_only() && weights_positive && bounded {
        return Ok(());
    }
    Err(Error::UnboundedArityZero {
        context: "composition product".into(),
    })
}

/// The composition product `a ∘ b`.
pub fn circle(a: &SymSeq, b: &SymSeq) -> Result<Circle, Error> {
    a.policy.ensure_matches(&b.policy, "composition product")?;
    if a.non_sigma != b.non_sigma {
        return Err(Error::invalid(
            "composition product",
            "mixed symmetric and non-symmetric factors",
        ));
    }
    circle_precondition(a, b)?;
    let mut powers = BTreeMap::new();
    for t in a.arities() {
        powers.insert(t, TensorPower::new(b, t)?);
    }

    // ambient layout per (arity, degree), blocks ordered by (t, p)
    let mut levels: BTreeMap<(usize, i64), AmbLevel> = BTreeMap::new();
    for r in 0..=a.policy.max_arity {
        for (&t, aslot) in &a.slots {
            let pw = &powers[&t];
            let pslot = match pw.seq.slot(r) {
                Some(s) => s,
                None => continue,
            };
            for p in aslot.complex.degrees() {
                let adim = aslot.complex.dim(p);
                for qd in pslot.complex.degrees() {
                    let pdim = pslot.complex.dim(qd);
                    if adim == 0 || pdim == 0 {
                        continue;
                    }
                    let lvl = levels.entry((r, p + qd)).or_default();
                    lvl.blocks.push(AmbBlock {
                        t,
                        p,
                        adim,
                        pdim,
                        offset: lvl.dim,
                    });
                    lvl.dim += adim * pdim;
                }
            }
        }
    }

    // ambient complexes
    let arity_set: std::collections::BTreeSet<usize> = levels.keys().map(|&(r, _)| r).collect();
    let mut amb: BTreeMap<usize, ChainComplex> = BTreeMap::new();
    for &r in &arity_set {
        let mut bases = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        let degs: Vec<i64> = levels
            .keys()
            .filter(|&&(rr, _)| rr == r)
            .map(|&(_, n)| n)
            .collect();
        for &n in &degs {
            let lvl = &levels[&(r, n)];
            let mut names = Vec::with_capacity(lvl.dim);
            let mut weights = Vec::with_capacity(lvl.dim);
            for blk in &lvl.blocks {
                let wa = a.slot(blk.t).unwrap().complex.weights_at(blk.p);
                let wp = powers[&blk.t].seq.complex_at(r).weights_at(n - blk.p);
                for i in 0..blk.adim {
                    for k in 0..blk.pdim {
                        names.push(format!("g{}.{}.{}.{}", blk.t, blk.p, i, k));
                        weights.push(wa[i] + wp[k]);
                    }
                }
            }
            bases.insert(n, LevelBasis { names, weights });
        }
        for &n in &degs {
            let lvl = &levels[&(r, n)];
            let tgt = match levels.get(&(r, n - 1)) {
                Some(t) => t,
                None => continue,
            };
            let mut triples: Vec<(usize, usize, Q)> = Vec::new();
            for blk in &lvl.blocks {
                let acx = &a.slot(blk.t).unwrap().complex;
                let pcx = powers[&blk.t].seq.complex_at(r);
                let da = acx.d(blk.p);
                let qd = n - blk.p;
                if let Some(tb) = tgt.block(blk.t, blk.p - 1) {
                    for i in 0..blk.adim {
                        for (i2, v) in da.col(i) {
                            for k in 0..blk.pdim {
                                triples.push((
                                    tb.offset + i2 * tb.pdim + k,
                                    blk.offset + i * blk.pdim + k,
                                    v.clone(),
                                ));
                            }
                        }
                    }
                }
                let dp = pcx.d(qd);
                let sign = par(blk.p);
                if let Some(tb) = tgt.block(blk.t, blk.p) {
                    for k in 0..blk.pdim {
                        for (k2, v) in dp.col(k) {
                            for i in 0..blk.adim {
                                triples.push((
                                    tb.offset + i * tb.pdim + k2,
                                    blk.offset + i * blk.pdim + k,
                                    &sign * v,
                                ));
                            }
                        }
                    }
                }
            }
            if !triples.is_empty() {
                diffs.insert(n, Matrix::from_triples(tgt.dim, lvl.dim, &triples));
            }
        }
        amb.insert(r, ChainComplex::new(bases, diffs)?);
    }

    // diagonal actions, cached once per outer arity
    let mut diag: BTreeMap<usize, Vec<(ChainMap, SymSeqMap)>> = BTreeMap::new();
    if !a.non_sigma {
        for &t in a.slots.keys() {
            let entries = Perm::enumerate(t)
                .iter()
                .map(|s| (a.act(t, s), powers[&t].factor_act(s)))
                .collect();
            diag.insert(t, entries);
        }
    }

    // quotient by the averaging projector, arity by arity
    let mut slots: BTreeMap<usize, AritySlot> = BTreeMap::new();
    let mut section: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
    let mut retraction: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
    for &r in &arity_set {
        let acx = &amb[&r];
        let e = if a.non_sigma {
            ChainMap::identity(acx)
        } else {
            let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
            for n in acx.degrees() {
                let lvl = &levels[&(r, n)];
                let mut triples: Vec<(usize, usize, Q)> = Vec::new();
                for blk in &lvl.blocks {
                    let inv_count = q(1) / q(diag[&blk.t].len() as i64);
                    let a_cx = &a.slot(blk.t).unwrap().complex;
                    let p_cx = powers[&blk.t].seq.complex_at(r);
                    for (am, fm) in &diag[&blk.t] {
                        let ma = am.comp(blk.p, a_cx, a_cx);
                        let mf = fm.comp(r).comp(n - blk.p, &p_cx, &p_cx);
                        for i in 0..blk.adim {
                            for (i2, va) in ma.col(i) {
                                for k in 0..blk.pdim {
                                    for (k2, vf) in mf.col(k) {
                                        triples.push((
                                            blk.offset + i2 * blk.pdim + k2,
                                            blk.offset + i * blk.pdim + k,
                                            va * vf * &inv_count,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
                comps.insert(n, Matrix::from_triples(lvl.dim, lvl.dim, &triples));
            }
            ChainMap::from_comps(comps)
        };
        let data = projector_coinvariants(acx, &e, &a.policy)?;
        for (n, m) in &data.section {
            section.insert((r, *n), m.clone());
        }
        for (n, m) in &data.retraction {
            retraction.insert((r, *n), m.clone());
        }
        if data.complex.total_dim() == 0 {
            continue;
        }

        // slot action of the composite: id_a tensored with the power's slot
        // action, conjugated into the quotient
        let mut gens = Vec::new();
        if !a.non_sigma {
            for s in 0..r.saturating_sub(1) {
                let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
                for n in data.complex.degrees() {
                    let lvl = &levels[&(r, n)];
                    let mut triples: Vec<(usize, usize, Q)> = Vec::new();
                    for blk in &lvl.blocks {
                        let pslot = powers[&blk.t].seq.slot(r).unwrap();
                        let g = pslot.gens[s].comp(n - blk.p, &pslot.complex, &pslot.complex);
                        for i in 0..blk.adim {
                            for k in 0..blk.pdim {
                                for (k2, v) in g.col(k) {
                                    triples.push((
                                        blk.offset + i * blk.pdim + k2,
                                        blk.offset + i * blk.pdim + k,
                                        v.clone(),
                                    ));
                                }
                            }
                        }
                    }
                    let gm = Matrix::from_triples(lvl.dim, lvl.dim, &triples);
                    let (sm, rm) = (&section[&(r, n)], &retraction[&(r, n)]);
                    comps.insert(n, rm.mul(&gm).mul(sm));
                }
                gens.push(ChainMap::from_comps(comps));
            }
        }
        slots.insert(
            r,
            AritySlot {
                complex: data.complex,
                gens,
            },
        );
    }
    let seq = SymSeq::new(slots, a.non_sigma, a.policy)?;
    Ok(Circle {
        a: a.clone(),
        b: b.clone(),
        seq,
        powers,
        amb,
        levels,
        section,
        retraction,
    })
}

/// Matrices of a sequence map, keyed by `(arity, degree)`.
fn map_matrices(f: &SymSeqMap, src: &SymSeq, tgt: &SymSeq) -> BTreeMap<(usize, i64), Matrix> {
    let mut out = BTreeMap::new();
    for (&r, sslot) in &src.slots {
        let fm = f.comp(r);
        let tcx = tgt.complex_at(r);
        for n in sslot.complex.degrees() {
            out.insert((r, n), fm.comp(n, &sslot.complex, &tcx));
        }
    }
    out
}

/// Functoriality of the composition product: `f ∘ g` as a map of composites
/// `src.seq -> tgt.seq`, for degree-0 maps `f: src.a -> tgt.a` and
/// `g: src.b -> tgt.b`.
pub fn circle_map(
    src: &Circle,
    tgt: &Circle,
    f: &SymSeqMap,
    g: &SymSeqMap,
) -> Result<SymSeqMap, Error> {
    let fmats = map_matrices(f, &src.a, &tgt.a);
    let gmats = map_matrices(g, &src.b, &tgt.b);

    // multilinear expansion of g on a power block, cached per (t, r, q)
    let mut pow_cache: BTreeMap<(usize, usize, i64), Matrix> = BTreeMap::new();
    let mut pow_block = |t: usize, r: usize, qd: i64| -> Matrix {
        if let Some(m) = pow_cache.get(&(t, r, qd)) {
            return m.clone();
        }
        let spw = &src.powers[&t];
        let rows = tgt
            .powers
            .get(&t)
            .map_or(0, |p| p.seq.dim(r, qd));
        let elems = spw.elems(r, qd);
        let mut cols: Vec<Col> = Vec::with_capacity(elems.len());
        for e in elems {
            let mut acc: Vec<(Vec<(i64, usize)>, Q)> = vec![(e.parts.clone(), q(1))];
            for (j, &(dj, ij)) in e.parts.iter().enumerate() {
                let m = e.pi.iter().filter(|&&v| v == j).count();
                let gcol: Col = gmats
                    .get(&(m, dj))
                    .map_or_else(Vec::new, |mm| mm.col(ij).clone());
                let mut next = Vec::new();
                for (parts, coeff) in &acc {
                    for (row, v) in &gcol {
                        let mut p2 = parts.clone();
                        p2[j] = (dj, *row);
                        next.push((p2, coeff * v));
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            let mut col: Col = Vec::new();
            if let Some(tp) = tgt.powers.get(&t) {
                for (parts, coeff) in acc {
                    let k = tp
                        .lookup(r, qd, &e.pi, &parts)
                        .expect("image power element must exist");
                    col.push((k, coeff));
                }
            }
            col.sort_by_key(|e| e.0);
            // merge duplicates (cannot occur: distinct part tuples)
            cols.push(col);
        }
        let m = Matrix::from_cols(rows, cols);
        pow_cache.insert((t, r, qd), m.clone());
        m
    };

    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, sslot) in &src.seq.slots {
        let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
        for n in sslot.complex.degrees() {
            let slvl = &src.levels[&(r, n)];
            let tdim = tgt.amb_dim(r, n);
            let mut triples: Vec<(usize, usize, Q)> = Vec::new();
            for blk in &slvl.blocks {
                let fm = match fmats.get(&(blk.t, blk.p)) {
                    Some(m) => m,
                    None => continue,
                };
                if fm.is_zero() {
                    continue;
                }
                let pm = pow_block(blk.t, r, n - blk.p);
                if pm.is_zero() {
                    continue;
                }
                for i in 0..blk.adim {
                    for (i2, vf) in fm.col(i) {
                        for k in 0..blk.pdim {
                            for (k2, vp) in pm.col(k) {
                                let tidx = tgt
                                    .amb_index(r, n, blk.t, blk.p, *i2, *k2)
                                    .expect("target ambient block must exist");
                                triples.push((
                                    tidx,
                                    blk.offset + i * blk.pdim + k,
                                    vf * vp,
                                ));
                            }
                        }
                    }
                }
            }
            let ambm = Matrix::from_triples(tdim, slvl.dim, &triples);
            let sm = match src.section_matrix(r, n) {
                Some(m) => m,
                None => continue,
            };
            let prod = match tgt.retraction_matrix(r, n) {
                Some(rm) => rm.mul(&ambm).mul(sm),
                None => Matrix::zero(0, sm.cols),
            };
            if !prod.is_zero() {
                maps.insert(n, prod);
            }
        }
        let cm = ChainMap::from_comps(maps);
        if !cm.is_zero() {
            comps.insert(r, cm);
        }
    }
    Ok(SymSeqMap::from_comps(comps))
}

/// Both directions of the associativity isomorphism
/// `(a ∘ b) ∘ c  ≅  a ∘ (b ∘ c)`, verified to be mutually inverse chain maps.
pub struct AssocIso {
    /// `(a ∘ b) ∘ c -> a ∘ (b ∘ c)`
    pub fwd: SymSeqMap,
    /// `a ∘ (b ∘ c) -> (a ∘ b) ∘ c`
    pub bwd: SymSeqMap,
}

/// `ab = a ∘ b`, `ab_c = (a∘b) ∘ c` built on `ab.seq`, `bc = b ∘ c`,
/// `a_bc = a ∘ (bc.seq)`.
pub fn canonical_assoc(
    ab: &Circle,
    ab_c: &Circle,
    bc: &Circle,
    a_bc: &Circle,
) -> Result<AssocIso, Error> {
    // forward direction, on representatives
    let mut fwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &ab_c.seq.slots {
        let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let tdim = a_bc.seq.dim(r, n);
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb1, c0) in ab_c.lift(r, n, j) {
                    let (s, pu, u_idx, zk) = ab_c.amb_decode(r, n, amb1);
                    let zeta = &ab_c.powers[&s].elems(r, n - pu)[zk];
                    for (amb2, c1) in ab.lift(s, pu, u_idx) {
                        let (t, px, x_idx, yk) = ab.amb_decode(s, pu, amb2);
                        let ups = &ab.powers[&t].elems(s, pu - px)[yk];
                        let coeff = &c0 * &c1;
                        regroup_forward(
                            r, n, t, px, x_idx, ups, zeta, bc, a_bc, &coeff, &mut acc,
                        );
                    }
                }
                cols.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(tdim, cols));
        }
        fwd_comps.insert(r, ChainMap::from_comps(maps));
    }
    let fwd = SymSeqMap::from_comps(fwd_comps);

    // backward direction, on representatives
    let mut bwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &a_bc.seq.slots {
        let mut maps: BTreeMap<i64, Matrix> = BTreeMap::new();
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let tdim = ab_c.seq.dim(r, n);
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb1, c0) in a_bc.lift(r, n, j) {
                    let (t, px, x_idx, wk) = a_bc.amb_decode(r, n, amb1);
                    let omega = &a_bc.powers[&t].elems(r, n - px)[wk];
                    regroup_backward(r, n, t, px, x_idx, omega, ab, bc, ab_c, &c0, &mut acc);
                }
                cols.push(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(tdim, cols));
        }
        bwd_comps.insert(r, ChainMap::from_comps(maps));
    }
    let bwd = SymSeqMap::from_comps(bwd_comps);

    // exact verification: chain maps, mutually inverse
    for (&r, slot) in &ab_c.seq.slots {
        fwd.comp(r).verify(&slot.complex, &a_bc.seq.complex_at(r))?;
    }
    for (&r, slot) in &a_bc.seq.slots {
        bwd.comp(r).verify(&slot.complex, &ab_c.seq.complex_at(r))?;
    }
    let round1 = bwd.compose(&fwd, &ab_c.seq, &a_bc.seq, &ab_c.seq);
    if !round1.equals(&SymSeqMap::identity(&ab_c.seq)) {
        return Err(Error::AxiomViolation {
            check: "associativity isomorphism".into(),
            witness: "backward ∘ forward is not the identity".into(),
        });
    }
    let round2 = fwd.compose(&bwd, &a_bc.seq, &ab_c.seq, &a_bc.seq);
    if !round2.equals(&SymSeqMap::identity(&a_bc.seq)) {
        return Err(Error::AxiomViolation {
            check: "associativity isomorphism".into(),
            witness: "forward ∘ backward is not the identity".into(),
        });
    }
    Ok(AssocIso { fwd, bwd })
}

/// Regroup one ambient representative `x ⊗ (y_0..y_{t-1}) ⊗ (z_0..z_{s-1})`
/// of `(a∘b)∘c` into `a ∘ (b∘c)` and accumulate the retracted classes.
#[allow(clippy::too_many_arguments)]
fn regroup_forward(
    r: usize,
    n: i64,
    t: usize,
    px: i64,
    x_idx: usize,
    ups: &crate::symseq::PowElem,
    zeta: &crate::symseq::PowElem,
    bc: &Circle,
    a_bc: &Circle,
    coeff: &Q,
    acc: &mut BTreeMap<usize, Q>,
) {
    let s = ups.pi.len();
    // T_j: inner factors grouped under outer factor j, ascending
    let mut tlists: Vec<Vec<usize>> = vec![Vec::new(); t];
    for (l, &j2) in ups.pi.iter().enumerate() {
        tlists[j2].push(l);
    }
    // Koszul sign of the flat-to-nested reordering
    let mut degs_old: Vec<i64> = ups.parts.iter().map(|p| p.0).collect();
    degs_old.extend(zeta.parts.iter().map(|p| p.0));
    let mut tau = vec![0usize; t + s];
    let mut pos = 0usize;
    for (j2, tl) in tlists.iter().enumerate() {
        tau[j2] = pos;
        pos += 1;
        for &l in tl {
            tau[t + l] = pos;
            pos += 1;
        }
    }
    let sign = koszul_sign(&Perm::from_word(tau), &degs_old);

    // inner composites w_j, retracted one by one
    let mut factors: Vec<(Col, i64)> = Vec::with_capacity(t);
    for (j2, tl) in tlists.iter().enumerate() {
        let (dy, yi) = ups.parts[j2];
        let mj = tl.len();
        let inputs: Vec<usize> = (0..r).filter(|&v| ups.pi[zeta.pi[v]] == j2).collect();
        let rj = inputs.len();
        let pij: Vec<usize> = inputs
            .iter()
            .map(|&v| tl.iter().position(|&l| l == zeta.pi[v]).unwrap())
            .collect();
        let partsj: Vec<(i64, usize)> = tl.iter().map(|&l| zeta.parts[l]).collect();
        let qz: i64 = partsj.iter().map(|p| p.0).sum();
        let nj = dy + qz;
        let powidx = bc.powers[&mj]
            .lookup(rj, qz, &pij, &partsj)
            .expect("inner power element must exist");
        let amb = bc
            .amb_index(rj, nj, mj, dy, yi, powidx)
            .expect("inner ambient block must exist");
        factors.push((bc.retract_basis(rj, nj, amb), nj));
    }
    // outer slot assignment
    let pi_prime: Vec<usize> = (0..r).map(|v| ups.pi[zeta.pi[v]]).collect();

    // multilinear expansion over the retracted factors
    let mut combos: Vec<(Vec<(i64, usize)>, Q)> = vec![(Vec::new(), coeff * &sign)];
    for (col, nj) in &factors {
        let mut next = Vec::new();
        for (parts, cf) in &combos {
            for (cls, v) in col {
                let mut p2 = parts.clone();
                p2.push((*nj, *cls));
                next.push((p2, cf * v));
            }
        }
        combos = next;
        if combos.is_empty() {
            return;
        }
    }
    for (wparts, cf) in combos {
        let qw: i64 = wparts.iter().map(|p| p.0).sum();
        let powidx = a_bc.powers[&t]
            .lookup(r, qw, &pi_prime, &wparts)
            .expect("outer power element must exist");
        let amb = a_bc
            .amb_index(r, n, t, px, x_idx, powidx)
            .expect("outer ambient block must exist");
        for (cls, v) in bca_retract(a_bc, r, n, amb) {
            let e = acc.entry(cls).or_insert_with(|| q(0));
            *e += &cf * &v;
        }
    }
}

fn bca_retract(c: &Circle, r: usize, n: i64, amb: usize) -> Col {
    c.retract_basis(r, n, amb)
}

/// Regroup one ambient representative `x ⊗ (w_0..w_{t-1})` of `a ∘ (b∘c)`
/// into `(a∘b) ∘ c` and accumulate the retracted classes.
#[allow(clippy::too_many_arguments)]
fn regroup_backward(
    r: usize,
    n: i64,
    t: usize,
    px: i64,
    x_idx: usize,
    omega: &crate::symseq::PowElem,
    ab: &Circle,
    bc: &Circle,
    ab_c: &Circle,
    c0: &Q,
    acc: &mut BTreeMap<usize, Q>,
) {
    // fibers of the outer assignment: inputs consumed by each w_j
    let rjs: Vec<usize> = (0..t)
        .map(|j2| omega.pi.iter().filter(|&&v| v == j2).count())
        .collect();
    // lift every w_j to its own ambient representative
    let lifts: Vec<Col> = (0..t)
        .map(|j2| {
            let (nw, wc) = omega.parts[j2];
            bc.lift(rjs[j2], nw, wc)
        })
        .collect();
    if lifts.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; t];
    loop {
        let mut cw = c0.clone();
        let mut decs: Vec<(usize, i64, usize, usize)> = Vec::with_capacity(t);
        for j2 in 0..t {
            let (ambw, v) = &lifts[j2][idx[j2]];
            cw *= v;
            decs.push(bc.amb_decode(rjs[j2], omega.parts[j2].0, *ambw));
        }
        emit_backward(r, n, t, px, x_idx, omega, &decs, &rjs, ab, bc, ab_c, &cw, acc);
        // odometer
        let mut j = t;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < lifts[j].len() {
                break;
            }
            idx[j] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            return;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_backward(
    r: usize,
    n: i64,
    t: usize,
    px: i64,
    x_idx: usize,
    omega: &crate::symseq::PowElem,
    decs: &[(usize, i64, usize, usize)],
    rjs: &[usize],
    ab: &Circle,
    bc: &Circle,
    ab_c: &Circle,
    coeff: &Q,
    acc: &mut BTreeMap<usize, Q>,
) {
    let mjs: Vec<usize> = decs.iter().map(|d| d.0).collect();
    let s: usize = mjs.iter().sum();
    let offsets: Vec<usize> = mjs
        .iter()
        .scan(0usize, |st, &m| {
            let cur = *st;
            *st += m;
            Some(cur)
        })
        .collect();
    // outer data of a ∘ b: x with the concatenated y-factors
    let mut rho: Vec<usize> = Vec::with_capacity(s);
    let mut yparts: Vec<(i64, usize)> = Vec::with_capacity(t);
    let mut qy = 0i64;
    for (j2, &(mj, py, yi, _)) in decs.iter().enumerate() {
        rho.extend(std::iter::repeat(j2).take(mj));
        yparts.push((py, yi));
        qy += py;
    }
    let powidx_u = match ab.powers.get(&t).and_then(|p| p.lookup(s, qy, &rho, &yparts)) {
        Some(k) => k,
        None => return,
    };
    let amb_u = match ab.amb_index(s, px + qy, t, px, x_idx, powidx_u) {
        Some(a) => a,
        None => return,
    };
    let ucol = ab.retract_basis(s, px + qy, amb_u);
    if ucol.is_empty() {
        return;
    }
    // global inner assignment and concatenated z-parts
    let zetas: Vec<&crate::symseq::PowElem> = decs
        .iter()
        .enumerate()
        .map(|(j2, &(mj, py, _, zk))| &bc.powers[&mj].elems(rjs[j2], omega.parts[j2].0 - py)[zk])
        .collect();
    let mut pi_glob: Vec<usize> = Vec::with_capacity(r);
    let mut seen: Vec<usize> = vec![0; t];
    for &v in omega.pi.iter() {
        let v_loc = seen[v];
        seen[v] += 1;
        pi_glob.push(offsets[v] + zetas[v].pi[v_loc]);
    }
    let mut zparts: Vec<(i64, usize)> = Vec::new();
    let mut qz = 0i64;
    for z in &zetas {
        zparts.extend(z.parts.iter().copied());
        qz += z.parts.iter().map(|p| p.0).sum::<i64>();
    }
    // Koszul sign of the nested-to-flat reordering
    let mut degs_nested: Vec<i64> = Vec::with_capacity(t + s);
    let mut tau = Vec::with_capacity(t + s);
    for (j2, z) in zetas.iter().enumerate() {
        degs_nested.push(decs[j2].1);
        tau.push(j2);
        for (l, part) in z.parts.iter().enumerate() {
            degs_nested.push(part.0);
            tau.push(t + offsets[j2] + l);
        }
    }
    let sign = koszul_sign(&Perm::from_word(tau), &degs_nested);
    let powidx_z = match ab_c.powers.get(&s).and_then(|p| p.lookup(r, qz, &pi_glob, &zparts)) {
        Some(k) => k,
        None => return,
    };
    for (ucls, vu) in &ucol {
        let amb_z = match ab_c.amb_index(r, n, s, px + qy, *ucls, powidx_z) {
            Some(a) => a,
            None => continue,
        };
        for (cls, vz) in ab_c.retract_basis(r, n, amb_z) {
            let e = acc.entry(cls).or_insert_with(|| q(0));
            *e += coeff * &sign * vu * &vz;
        }
    }
}

// ---------------------------------------------------------------------------
// Unit isomorphisms and unit insertions
// ---------------------------------------------------------------------------

fn expect_unit_shape(u: &SymSeq, context: &str) -> Result<(), Error> {
    let ok = u.arities().collect::<Vec<_>>() == vec![1]
        && u.dim(1, 0) == 1
        && u.slot(1).unwrap().complex.total_dim() == 1;
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(context, "factor is not the unit sequence"))
    }
}

/// `I ∘ b ≅ b`: forward strips the unit, backward inserts it.
pub fn left_unit_iso(ci: &Circle) -> Result<(SymSeqMap, SymSeqMap), Error> {
    expect_unit_shape(&ci.a, "left unit")?;
    let b = &ci.b;
    let mut fwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    let mut bwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &ci.seq.slots {
        let mut fmaps = BTreeMap::new();
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let mut cols = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb, c0) in ci.lift(r, n, j) {
                    let (t, p, i, k) = ci.amb_decode(r, n, amb);
                    debug_assert!(t == 1 && p == 0 && i == 0);
                    let _ = (t, p, i);
                    let e = &ci.powers[&1].elems(r, n)[k];
                    col.entry(e.parts[0].1)
                        .and_modify(|v| *v += &c0)
                        .or_insert(c0);
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            fmaps.insert(n, Matrix::from_cols(b.dim(r, n), cols));
        }
        fwd_comps.insert(r, ChainMap::from_comps(fmaps));
    }
    for (&r, bslot) in &b.slots {
        let mut bmaps = BTreeMap::new();
        for n in bslot.complex.degrees() {
            let dim = bslot.complex.dim(n);
            let mut cols = Vec::with_capacity(dim);
            for idx in 0..dim {
                let powidx = ci.powers[&1]
                    .lookup(r, n, &vec![0; r], &[(n, idx)])
                    .expect("unit power element must exist");
                let amb = ci
                    .amb_index(r, n, 1, 0, 0, powidx)
                    .expect("unit ambient block must exist");
                cols.push(ci.retract_basis(r, n, amb));
            }
            bmaps.insert(n, Matrix::from_cols(ci.seq.dim(r, n), cols));
        }
        bwd_comps.insert(r, ChainMap::from_comps(bmaps));
    }
    let fwd = SymSeqMap::from_comps(fwd_comps);
    let bwd = SymSeqMap::from_comps(bwd_comps);
    verify_iso_pair(&fwd, &bwd, &ci.seq, b, "left unit")?;
    Ok((fwd, bwd))
}

/// `a ∘ I ≅ a`: forward reads the slot assignment as a permutation and acts
/// by its inverse, backward inserts identities in the identity arrangement.
pub fn right_unit_iso(ci: &Circle) -> Result<(SymSeqMap, SymSeqMap), Error> {
    expect_unit_shape(&ci.b, "right unit")?;
    let a = &ci.a;
    let mut fwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    let mut bwd_comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &ci.seq.slots {
        let acx = a.complex_at(r);
        let mut fmaps = BTreeMap::new();
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let mut cols = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb, c0) in ci.lift(r, n, j) {
                    let (t, p, i, k) = ci.amb_decode(r, n, amb);
                    debug_assert_eq!(t, r);
                    debug_assert_eq!(p, n);
                    let e = &ci.powers[&t].elems(r, n - p)[k];
                    let sigma = Perm::from_word(e.pi.clone());
                    let m = a.act(r, &sigma.inverse()).comp(n, &acx, &acx);
                    for (row, v) in m.col(i) {
                        let entry = col.entry(*row).or_insert_with(|| q(0));
                        *entry += &c0 * v;
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            fmaps.insert(n, Matrix::from_cols(acx.dim(n), cols));
        }
        fwd_comps.insert(r, ChainMap::from_comps(fmaps));
    }
    for (&r, aslot) in &a.slots {
        let mut bmaps = BTreeMap::new();
        let idpi: Vec<usize> = (0..r).collect();
        let parts: Vec<(i64, usize)> = vec![(0, 0); r];
        for p in aslot.complex.degrees() {
            let dim = aslot.complex.dim(p);
            let mut cols = Vec::with_capacity(dim);
            for idx in 0..dim {
                let powidx = ci.powers[&r]
                    .lookup(r, 0, &idpi, &parts)
                    .expect("identity power element must exist");
                let amb = ci
                    .amb_index(r, p, r, p, idx, powidx)
                    .expect("identity ambient block must exist");
                cols.push(ci.retract_basis(r, p, amb));
            }
            bmaps.insert(p, Matrix::from_cols(ci.seq.dim(r, p), cols));
        }
        bwd_comps.insert(r, ChainMap::from_comps(bmaps));
    }
    let fwd = SymSeqMap::from_comps(fwd_comps);
    let bwd = SymSeqMap::from_comps(bwd_comps);
    verify_iso_pair(&fwd, &bwd, &ci.seq, a, "right unit")?;
    Ok((fwd, bwd))
}

fn verify_iso_pair(
    fwd: &SymSeqMap,
    bwd: &SymSeqMap,
    src: &SymSeq,
    tgt: &SymSeq,
    context: &str,
) -> Result<(), Error> {
    for (&r, slot) in &src.slots {
        fwd.comp(r).verify(&slot.complex, &tgt.complex_at(r))?;
    }
    for (&r, slot) in &tgt.slots {
        bwd.comp(r).verify(&slot.complex, &src.complex_at(r))?;
    }
    let round1 = bwd.compose(fwd, src, tgt, src);
    let round2 = fwd.compose(bwd, tgt, src, tgt);
    if !round1.equals(&SymSeqMap::identity(src)) || !round2.equals(&SymSeqMap::identity(tgt)) {
        return Err(Error::AxiomViolation {
            check: format!("{context} isomorphism"),
            witness: "round trip is not the identity".into(),
        });
    }
    Ok(())
}

/// Unit insertion on the left: `m -> o ∘ m` sending `y` to `1 ⊗ y`, for
/// `ci = circle(o, m)` and the unit `1 ∈ o[1]` of degree 0 given as a vector.
pub fn unit_insert_left(ci: &Circle, unit: &Col) -> SymSeqMap {
    let m = &ci.b;
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, mslot) in &m.slots {
        let mut maps = BTreeMap::new();
        for n in mslot.complex.degrees() {
            let dim = mslot.complex.dim(n);
            let mut cols = Vec::with_capacity(dim);
            for idx in 0..dim {
                let powidx = ci.powers[&1]
                    .lookup(r, n, &vec![0; r], &[(n, idx)])
                    .expect("unit power element must exist");
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (u_idx, cu) in unit {
                    let amb = ci
                        .amb_index(r, n, 1, 0, *u_idx, powidx)
                        .expect("unit ambient block must exist");
                    for (cls, v) in ci.retract_basis(r, n, amb) {
                        let e = col.entry(cls).or_insert_with(|| q(0));
                        *e += cu * &v;
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(ci.seq.dim(r, n), cols));
        }
        comps.insert(r, ChainMap::from_comps(maps));
    }
    SymSeqMap::from_comps(comps)
}

/// Unit insertion on the right: `x -> x ∘ o` sending `x` to
/// `x ⊗ (1, ..., 1)` in the identity arrangement, for `ci = circle(x, o)`.
pub fn unit_insert_right(ci: &Circle, unit: &Col) -> SymSeqMap {
    let x = &ci.a;
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, xslot) in &x.slots {
        let idpi: Vec<usize> = (0..r).collect();
        // multilinear expansion of the r-fold unit insertion
        let mut units: Vec<(Vec<(i64, usize)>, Q)> = vec![(Vec::new(), q(1))];
        for _ in 0..r {
            let mut next = Vec::new();
            for (parts, c) in &units {
                for (u_idx, cu) in unit {
                    let mut p2 = parts.clone();
                    p2.push((0, *u_idx));
                    next.push((p2, c * cu));
                }
            }
            units = next;
        }
        let mut maps = BTreeMap::new();
        for p in xslot.complex.degrees() {
            let dim = xslot.complex.dim(p);
            let mut cols = Vec::with_capacity(dim);
            for idx in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (parts, cu) in &units {
                    let powidx = ci.powers[&r]
                        .lookup(r, 0, &idpi, parts)
                        .expect("identity power element must exist");
                    let amb = ci
                        .amb_index(r, p, r, p, idx, powidx)
                        .expect("identity ambient block must exist");
                    for (cls, v) in ci.retract_basis(r, p, amb) {
                        let e = col.entry(cls).or_insert_with(|| q(0));
                        *e += cu * &v;
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(p, Matrix::from_cols(ci.seq.dim(r, p), cols));
        }
        comps.insert(r, ChainMap::from_comps(maps));
    }
    SymSeqMap::from_comps(comps)
}

// ---------------------------------------------------------------------------
// Evaluation and transposition for mapping sequences
// ---------------------------------------------------------------------------

/// Evaluation `Map(b, c) ∘ b -> c` for `me = circle(ms.seq, b)`.
pub fn ev_map(ms: &MapSeq, c: &SymSeq, me: &Circle) -> Result<SymSeqMap, Error> {
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&r, slot) in &me.seq.slots {
        let mut maps = BTreeMap::new();
        for n in slot.complex.degrees() {
            let dim = slot.complex.dim(n);
            let mut cols = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                for (amb, c0) in me.lift(r, n, j) {
                    let (t, nf, f_idx, k) = me.amb_decode(r, n, amb);
                    let fam = &ms.basis[&(t, nf)][f_idx];
                    if let Some(mm) = fam.mats.get(&(r, n - nf)) {
                        for (row, v) in mm.col(k) {
                            let e = col.entry(*row).or_insert_with(|| q(0));
                            *e += &c0 * v;
                        }
                    }
                }
                cols.push(col.into_iter().filter(|(_, v)| !v.is_zero()).collect());
            }
            maps.insert(n, Matrix::from_cols(c.dim(r, n), cols));
        }
        comps.insert(r, ChainMap::from_comps(maps));
    }
    Ok(SymSeqMap::from_comps(comps))
}

/// Transpose of `f: a ∘ b -> c` along the adjunction: the map
/// `a -> Map(b, c)` sending `x` to `y⃗ ↦ f([x ⊗ y⃗])`. `me = circle(a, b)`.
pub fn transpose_map(
    f: &SymSeqMap,
    me: &Circle,
    ms: &MapSeq,
    c: &SymSeq,
) -> Result<SymSeqMap, Error> {
    let fmats = map_matrices(f, &me.seq, c);
    let mut comps: BTreeMap<usize, ChainMap> = BTreeMap::new();
    for (&t, aslot) in &me.a.slots {
        let mut maps = BTreeMap::new();
        for p in aslot.complex.degrees() {
            let dim = aslot.complex.dim(p);
            let tgt_dim = ms.seq.dim(t, p);
            let mut cols = Vec::with_capacity(dim);
            for i in 0..dim {
                // raw family: evaluate f on retracted representatives
                let mut fam: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
                if let Some(pw) = me.powers.get(&t) {
                    for (&r, pslot) in &pw.seq.slots {
                        for qd in pslot.complex.degrees() {
                            let pdim = pslot.complex.dim(qd);
                            let crows = c.dim(r, qd + p);
                            if crows == 0 {
                                continue;
                            }
                            let mut fcols: Vec<Col> = Vec::with_capacity(pdim);
                            for k in 0..pdim {
                                let mut col: BTreeMap<usize, Q> = BTreeMap::new();
                                if let Some(amb) = me.amb_index(r, p + qd, t, p, i, k) {
                                    let classes = me.retract_basis(r, p + qd, amb);
                                    if let Some(fm) = fmats.get(&(r, p + qd)) {
                                        for (cls, v) in &classes {
                                            for (row, fv) in fm.col(*cls) {
                                                let e =
                                                    col.entry(*row).or_insert_with(|| q(0));
                                                *e += v * fv;
                                            }
                                        }
                                    }
                                }
                                fcols.push(
                                    col.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
                                );
                            }
                            let m = Matrix::from_cols(crows, fcols);
                            if !m.is_zero() {
                                fam.insert((r, qd), m);
                            }
                        }
                    }
                }
                let coords = ms.coordinates(t, p, &fam).ok_or_else(|| Error::AxiomViolation {
                    check: "adjunction transpose".into(),
                    witness: format!(
                        "image family not expressible in the hom basis (arity {t}, degree {p})"
                    ),
                })?;
                cols.push(coords.col(0).clone());
            }
            maps.insert(p, Matrix::from_cols(tgt_dim, cols));
        }
        comps.insert(t, ChainMap::from_comps(maps));
    }
    Ok(SymSeqMap::from_comps(comps))
}

/// A sequence applied to a chain complex: `a ∘ ẑ`, concentrated in arity 0
/// and graded by weight.
pub fn apply_to_object(a: &SymSeq, z: &ChainComplex) -> Result<Circle, Error> {
    let zh = SymSeq::hat(z, a.non_sigma, a.policy)?;
    circle(a, &zh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::LevelBasis;
    use crate::symseq::{hom_dim, tensor_check, TruncationPolicy};

    fn policy3() -> TruncationPolicy {
        TruncationPolicy::arity(3)
    }

    fn trivial_slot(r: usize, degree: i64, weight: u32) -> AritySlot {
        let cx = ChainComplex::concentrated("e", degree, weight);
        let gens = (0..r.saturating_sub(1))
            .map(|_| ChainMap::identity(&cx))
            .collect();
        AritySlot { complex: cx, gens }
    }

    #[test]
    fn unit_composed_both_ways() {
        // I ∘ b ≅ b and b ∘ I ≅ b for a two-slot b with a differential
        let names0 = LevelBasis::plain(vec!["x".into()]);
        let names1 = LevelBasis::plain(vec!["y".into()]);
        let c2 = ChainComplex::new(
            [(0, names0), (1, names1)].into(),
            [(1, Matrix::identity(1))].into(),
        )
        .unwrap();
        let slot2 = AritySlot {
            gens: vec![ChainMap::identity(&c2)],
            complex: c2,
        };
        let b = SymSeq::new(
            [(1, trivial_slot(1, 0, 0)), (2, slot2)].into(),
            false,
            policy3(),
        )
        .unwrap();
        let i = SymSeq::unit(false, policy3());

        let ib = circle(&i, &b).unwrap();
        assert_eq!(ib.seq.dims(), b.dims());
        let (fwd, bwd) = left_unit_iso(&ib).unwrap();
        fwd.verify(&ib.seq, &b).unwrap();
        bwd.verify(&b, &ib.seq).unwrap();

        let bi = circle(&b, &i).unwrap();
        assert_eq!(bi.seq.dims(), b.dims());
        let (fwd, bwd) = right_unit_iso(&bi).unwrap();
        fwd.verify(&bi.seq, &b).unwrap();
        bwd.verify(&b, &bi.seq).unwrap();
    }

    #[test]
    fn composite_with_arity_two_outer() {
        // a concentrated in arity 2 (trivial action), b the unit-like arity-1
        // sequence of dimension 1: (a ∘ b)[2] has dimension 1: the two slot
        // assignments are identified by the diagonal Σ_2.
        let a = SymSeq::new([(2, trivial_slot(2, 0, 0))].into(), false, policy3()).unwrap();
        let b = SymSeq::unit(false, policy3());
        let ab = circle(&a, &b).unwrap();
        assert_eq!(ab.seq.dim(2, 0), 1);
        assert_eq!(ab.seq.total_dim(), 1);
    }

    #[test]
    fn arity_zero_weight_bookkeeping() {
        // a in arity 2 (degree 0), z a point of degree 1 and weight 1:
        // (a ∘ ẑ)[0] is one copy of z ⊗ z in weight 2. With an odd generator
        // the symmetric square vanishes ... here the diagonal swap acts with
        // Koszul sign -1 on the square of an odd class, so the quotient is 0.
        let a = SymSeq::new(
            [(2, trivial_slot(2, 0, 0))].into(),
            false,
            TruncationPolicy::arity_weight(2, 2),
        )
        .unwrap();
        let z = ChainComplex::concentrated("v", 1, 1);
        let ci = apply_to_object(&a, &z).unwrap();
        assert_eq!(ci.seq.total_dim(), 0);

        // even generator instead: the square survives in weight 2
        let z = ChainComplex::concentrated("v", 0, 1);
        let ci = apply_to_object(&a, &z).unwrap();
        assert_eq!(ci.seq.dim(0, 0), 1);
        assert_eq!(ci.seq.complex_at(0).weights_at(0), vec![2]);
    }

    #[test]
    fn unbounded_arity_zero_rejected() {
        // b mixes arity 0 with positive arity: the truncation cannot be
        // certified sound, so the product must refuse.
        let b = SymSeq::new(
            [(0, trivial_slot(0, 0, 1)), (2, trivial_slot(2, 0, 0))].into(),
            false,
            TruncationPolicy::arity_weight(3, 3),
        )
        .unwrap();
        let a = SymSeq::new(
            [(2, trivial_slot(2, 0, 0))].into(),
            false,
            TruncationPolicy::arity_weight(3, 3),
        )
        .unwrap();
        match circle(&a, &b) {
            Err(Error::UnboundedArityZero { .. }) => {}
            other => panic!("expected a truncation soundness error, got {:?}", other.map(|c| c.seq.dims())),
        }
    }

    #[test]
    fn associativity_on_small_sequences() {
        // three sequences concentrated in positive arities with free actions
        let mk = |top_arity: usize| {
            let mut slots = BTreeMap::new();
            slots.insert(1, trivial_slot(1, 0, 0));
            if top_arity >= 2 {
                let cx = ChainComplex::new(
                    [(0, LevelBasis::plain(vec!["u".into(), "v".into()]))].into(),
                    BTreeMap::new(),
                )
                .unwrap();
                let swap = Matrix::from_triples(2, 2, &[(1, 0, q(1)), (0, 1, q(1))]);
                let slot = AritySlot {
                    gens: vec![ChainMap::from_comps([(0, swap)].into())],
                    complex: cx,
                };
                slots.insert(2, slot);
            }
            SymSeq::new(slots, false, policy3()).unwrap()
        };
        let a = mk(2);
        let b = mk(2);
        let c = mk(2);
        let ab = circle(&a, &b).unwrap();
        let ab_c = circle(&ab.seq, &c).unwrap();
        let bc = circle(&b, &c).unwrap();
        let a_bc = circle(&a, &bc.seq).unwrap();
        assert_eq!(ab_c.seq.dims(), a_bc.seq.dims());
        let iso = canonical_assoc(&ab, &ab_c, &bc, &a_bc).unwrap();
        iso.fwd.verify(&ab_c.seq, &a_bc.seq).unwrap();
        iso.bwd.verify(&a_bc.seq, &ab_c.seq).unwrap();
    }

    #[test]
    fn triangle_identity() {
        // (id_a ∘ λ_b) ∘ assoc = ρ_a ∘ id_b on (a ∘ I) ∘ b
        let mut slots = BTreeMap::new();
        slots.insert(1, trivial_slot(1, 1, 0));
        slots.insert(2, trivial_slot(2, 0, 0));
        let a = SymSeq::new(slots, false, policy3()).unwrap();
        let b = {
            let mut slots = BTreeMap::new();
            slots.insert(1, trivial_slot(1, 0, 0));
            slots.insert(2, trivial_slot(2, 1, 0));
            SymSeq::new(slots, false, policy3()).unwrap()
        };
        let i = SymSeq::unit(false, policy3());
        let ai = circle(&a, &i).unwrap();
        let ai_b = circle(&ai.seq, &b).unwrap();
        let ib = circle(&i, &b).unwrap();
        let a_ib = circle(&a, &ib.seq).unwrap();
        let iso = canonical_assoc(&ai, &ai_b, &ib, &a_ib).unwrap();
        let (lambda, _) = left_unit_iso(&ib).unwrap();
        let (rho, _) = right_unit_iso(&ai).unwrap();
        let ab = circle(&a, &b).unwrap();
        // id_a ∘ λ : a ∘ (I ∘ b) -> a ∘ b
        let id_a = SymSeqMap::identity(&a);
        let top = circle_map(&a_ib, &ab, &id_a, &lambda).unwrap();
        let left = top.compose(&iso.fwd, &ai_b.seq, &a_ib.seq, &ab.seq);
        // ρ ∘ id_b : (a ∘ I) ∘ b -> a ∘ b
        let id_b = SymSeqMap::identity(&b);
        let right = circle_map(&ai_b, &ab, &rho, &id_b).unwrap();
        assert!(left.equals(&right));
    }

    #[test]
    fn adjunction_dimensions_match() {
        // dim hom(a ∘ b, c) = dim hom(a, Map(b, c)) on a small instance
        let a = SymSeq::new(
            [(1, trivial_slot(1, 0, 0)), (2, trivial_slot(2, 0, 0))].into(),
            false,
            policy3(),
        )
        .unwrap();
        let b = SymSeq::new(
            [(1, trivial_slot(1, 0, 0)), (2, trivial_slot(2, 0, 0))].into(),
            false,
            policy3(),
        )
        .unwrap();
        let c = tensor_check(&a, &b).unwrap();
        let ab = circle(&a, &b).unwrap();
        let ms = MapSeq::new(&b, &c).unwrap();
        assert_eq!(hom_dim(&ab.seq, &c), hom_dim(&a, &ms.seq));
    }

    #[test]
    fn transpose_of_evaluation_is_identity_shaped() {
        // transpose(ev) = id on Map(b, c)
        let b = SymSeq::unit(false, policy3());
        let c = SymSeq::new(
            [(1, trivial_slot(1, 0, 0)), (2, trivial_slot(2, 0, 0))].into(),
            false,
            policy3(),
        )
        .unwrap();
        let ms = MapSeq::new(&b, &c).unwrap();
        let me = circle(&ms.seq, &b).unwrap();
        let ev = ev_map(&ms, &c, &me).unwrap();
        ev.verify(&me.seq, &c).unwrap();
        let tr = transpose_map(&ev, &me, &ms, &c).unwrap();
        assert!(tr.equals(&SymSeqMap::identity(&ms.seq)));
    }
}
