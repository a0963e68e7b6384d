//! Two-sided bar constructions over an operad, their contractions, and the
//! invariants built on top of them: Quillen homology of algebras, base
//! change along operad maps, and resolutions of right modules.

use crate::chain::ChainComplex;
use crate::circle::{canonical_assoc, circle, circle_map, unit_insert_left, unit_insert_right, Circle};
use crate::error::Error;
use crate::linalg::rank;
use crate::operad::{
    operad_as_left_module, operad_as_right_module, restrict_right_along, unit_as_right_module,
    verify_operad_map, LeftModule, Operad, OperadMap, RightModule,
};
use crate::simplicial::{
    interval_words, pi0_with_projection, verify_simplicial_homotopy, SimplicialChainComplex,
    SimplicialSymSeq,
};
use crate::symseq::{chainmaps_differ, SymSeq, SymSeqMap};
use std::collections::{BTreeMap, BTreeSet};

/// Levelwise two-sided bar construction `[k] -> X . O^k . Y` for a right
/// module `X` and a left module `Y` over an operad `O`.  Faces merge
/// adjacent factors, degeneracies insert the operad unit.  Levels are
/// stored through a fixed bound `s`; degeneracies stop at level `s - 1`,
/// so the stored object is `s`-truncated.
pub struct Bar {
    /// per-arity simplicial chain complexes of the levels
    pub simplicial: SimplicialSymSeq,
    /// the level sequences `T_k = X . O^k . Y`, `k = 0..=s`
    pub levels: Vec<SymSeq>,
    /// `faces[k] = [d_0, ..., d_k]` for `k >= 1`; `faces[0]` is empty
    pub faces: Vec<Vec<SymSeqMap>>,
    /// `degens[k] = [s_0, ..., s_k]` for `k < s`; `degens[s]` is empty
    pub degens: Vec<Vec<SymSeqMap>>,
    pub(crate) t_circ: Vec<Circle>,
    /// `m_circ[j] = O . M_j`, whose composite is `M_{j+1}`
    pub(crate) m_circ: Vec<Circle>,
    pub(crate) x_seq: SymSeq,
    pub(crate) y_seq: SymSeq,
    pub(crate) x_action: SymSeqMap,
    pub(crate) y_action: SymSeqMap,
}

impl Bar {
    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Arity-wise realization with the common trustworthy window.
    pub fn realization(&self) -> Result<(BTreeMap<usize, ChainComplex>, i64), Error> {
        self.simplicial.realization()
    }
}

/// Wrap a map of inner towers `M_a -> M_b` into `O . -`, `times` times.
fn wrap_iter(
    m_circ: &[Circle],
    id_o: &SymSeqMap,
    phi: SymSeqMap,
    a: usize,
    b: usize,
    times: usize,
) -> Result<SymSeqMap, Error> {
    let mut cur = phi;
    for t in 0..times {
        cur = circle_map(&m_circ[a + t], &m_circ[b + t], id_o, &cur)?;
    }
    Ok(cur)
}

/// Build the bar construction with levels `0..=s`.
pub fn bar(x: &RightModule, o: &Operad, y: &LeftModule, s: usize) -> Result<Bar, Error> {
    if s == 0 {
        return Err(Error::invalid(
            "bar construction",
            "the level bound must be at least 1",
        ));
    }
    let id_x = SymSeqMap::identity(&x.seq);
    let id_o = SymSeqMap::identity(&o.seq);

    // inner tower M_0 = Y, M_{j+1} = O . M_j
    let mut m_seqs: Vec<SymSeq> = vec![y.seq.clone()];
    let mut m_circ: Vec<Circle> = Vec::with_capacity(s);
    for j in 0..s {
        let c = if j == 0 {
            y.circ.clone()
        } else {
            circle(&o.seq, &m_seqs[j])?
        };
        m_seqs.push(c.seq.clone());
        m_circ.push(c);
    }

    // levels T_k = X . M_k
    let mut t_circ: Vec<Circle> = Vec::with_capacity(s + 1);
    for m in m_seqs.iter() {
        t_circ.push(circle(&x.seq, m)?);
    }
    let levels: Vec<SymSeq> = t_circ.iter().map(|c| c.seq.clone()).collect();

    // merge targets for the leftmost face and the operadic faces
    let mut xo_m: Vec<Circle> = Vec::with_capacity(s);
    for m in m_seqs.iter().take(s) {
        xo_m.push(circle(&x.circ.seq, m)?);
    }
    let mut oo_m: Vec<Circle> = Vec::new();
    for m in m_seqs.iter().take(s.saturating_sub(1)) {
        oo_m.push(circle(&o.self_circle.seq, m)?);
    }

    // kappa[j] : M_{j+1} -> M_j merges the two outer operad layers,
    // alpha[j] : M_j -> M_{j-1} pushes the action of the innermost layer
    let mut kappa: Vec<Option<SymSeqMap>> = vec![None; s];
    for j in 1..s {
        let iso = canonical_assoc(&o.self_circle, &oo_m[j - 1], &m_circ[j - 1], &m_circ[j])?;
        let mul = circle_map(
            &oo_m[j - 1],
            &m_circ[j - 1],
            &o.mhat,
            &SymSeqMap::identity(&m_seqs[j - 1]),
        )?;
        kappa[j] = Some(mul.compose(&iso.bwd, &m_seqs[j + 1], &oo_m[j - 1].seq, &m_seqs[j]));
    }
    let mut alpha: Vec<Option<SymSeqMap>> = vec![None; s + 1];
    alpha[1] = Some(y.action.clone());
    for j in 2..=s {
        let prev = alpha[j - 1].clone().unwrap();
        alpha[j] = Some(circle_map(&m_circ[j - 1], &m_circ[j - 2], &id_o, &prev)?);
    }

    let mut faces: Vec<Vec<SymSeqMap>> = vec![Vec::new()];
    for k in 1..=s {
        let mut row = Vec::with_capacity(k + 1);
        let iso = canonical_assoc(&x.circ, &xo_m[k - 1], &m_circ[k - 1], &t_circ[k])?;
        let mul = circle_map(
            &xo_m[k - 1],
            &t_circ[k - 1],
            &x.action,
            &SymSeqMap::identity(&m_seqs[k - 1]),
        )?;
        row.push(mul.compose(&iso.bwd, &levels[k], &xo_m[k - 1].seq, &levels[k - 1]));
        for i in 1..k {
            let inner = wrap_iter(
                &m_circ,
                &id_o,
                kappa[k - i].clone().unwrap(),
                k - i + 1,
                k - i,
                i - 1,
            )?;
            row.push(circle_map(&t_circ[k], &t_circ[k - 1], &id_x, &inner)?);
        }
        row.push(circle_map(
            &t_circ[k],
            &t_circ[k - 1],
            &id_x,
            alpha[k].as_ref().unwrap(),
        )?);
        faces.push(row);
    }

    let mut degens: Vec<Vec<SymSeqMap>> = Vec::with_capacity(s + 1);
    for k in 0..s {
        let mut row = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let ins = unit_insert_left(&m_circ[k - j], &o.unit);
            let inner = wrap_iter(&m_circ, &id_o, ins, k - j, k - j + 1, j)?;
            row.push(circle_map(&t_circ[k], &t_circ[k + 1], &id_x, &inner)?);
        }
        degens.push(row);
    }
    degens.push(Vec::new());

    // per-arity simplicial chain complexes
    let mut arity_set: BTreeSet<usize> = BTreeSet::new();
    for c in &t_circ {
        arity_set.extend(c.seq.arities());
    }
    let mut arities = BTreeMap::new();
    for r in arity_set {
        let levels_r: Vec<ChainComplex> = t_circ.iter().map(|c| c.seq.complex_at(r)).collect();
        if levels_r.iter().all(|cx| cx.total_dim() == 0) {
            continue;
        }
        let faces_r = faces
            .iter()
            .map(|row| row.iter().map(|f| f.comp(r)).collect())
            .collect();
        let degens_r = degens
            .iter()
            .map(|row| row.iter().map(|f| f.comp(r)).collect())
            .collect();
        arities.insert(r, SimplicialChainComplex::new(levels_r, faces_r, degens_r)?);
    }

    Ok(Bar {
        simplicial: SimplicialSymSeq { arities },
        levels,
        faces,
        degens,
        t_circ,
        m_circ,
        x_seq: x.seq.clone(),
        y_seq: y.seq.clone(),
        x_action: x.action.clone(),
        y_action: y.action.clone(),
    })
}

/// Contraction data of a bar construction augmented over one of its two
/// outer factors: levelwise retractions onto the augmentation target,
/// coaugmentations back in, extra degeneracies, and the simplicial homotopy
/// they generate.  `front` marks an augmentation over `Y` (so `X = O`);
/// otherwise the augmentation is over `X` (and `Y = O`).
pub struct Contraction {
    /// levelwise retractions `T_k -> A`
    pub retraction: Vec<SymSeqMap>,
    /// levelwise coaugmentations `A -> T_k`
    pub inclusion: Vec<SymSeqMap>,
    /// extra degeneracies `T_k -> T_{k+1}`, `k < s`
    pub extra: Vec<SymSeqMap>,
    /// the augmentation `T_0 -> A` and its section
    pub augmentation: SymSeqMap,
    pub coaugmentation: SymSeqMap,
    /// simplicial homotopy indexed by monotone 0/1 words, one per level
    pub homotopy: BTreeMap<Vec<usize>, SymSeqMap>,
    /// the augmentation target `A`
    pub target: SymSeq,
    pub front: bool,
}

impl Contraction {
    /// Endpoint maps of the homotopy on each level: the all-zeros word acts
    /// as the first returned family, the all-ones word as the second.
    pub fn endpoints(&self, b: &Bar) -> (Vec<SymSeqMap>, Vec<SymSeqMap>) {
        let sr: Vec<SymSeqMap> = (0..b.levels.len())
            .map(|k| {
                self.inclusion[k].compose(
                    &self.retraction[k],
                    &b.levels[k],
                    &self.target,
                    &b.levels[k],
                )
            })
            .collect();
        let ids: Vec<SymSeqMap> = b.levels.iter().map(SymSeqMap::identity).collect();
        if self.front {
            (sr, ids)
        } else {
            (ids, sr)
        }
    }
}

/// Contraction of `B(O, O, Y)` onto `Y`: the extra degeneracy inserts the
/// operad unit in front of everything, the retraction iterates the leftmost
/// face and finishes with the action `O . Y -> Y`.
pub fn front_contraction(b: &Bar, o: &Operad) -> Result<Contraction, Error> {
    if b.x_seq.dims() != o.seq.dims() {
        return Err(Error::invalid(
            "bar contraction",
            "the left factor must be the operad acting on itself",
        ));
    }
    let s = b.top_level();
    let target = b.y_seq.clone();
    // T_k agrees with M_{k+1}, so the unit insertion into O . M_{k+1}
    // starts at T_k
    let extra: Vec<SymSeqMap> = (0..s)
        .map(|k| unit_insert_left(&b.t_circ[k + 1], &o.unit))
        .collect();
    let coaugmentation = unit_insert_left(&b.t_circ[0], &o.unit);
    let augmentation = b.y_action.clone();
    let mut retraction = vec![augmentation.clone()];
    for k in 1..=s {
        let prev = retraction[k - 1].clone();
        retraction.push(prev.compose(&b.faces[k][0], &b.levels[k], &b.levels[k - 1], &target));
    }
    let mut inclusion = vec![coaugmentation.clone()];
    for k in 1..=s {
        let prev = inclusion[k - 1].clone();
        inclusion.push(extra[k - 1].compose(&prev, &target, &b.levels[k - 1], &b.levels[k]));
    }
    let homotopy = homotopy_words(b, &extra, &retraction, &inclusion, &target, true);
    Ok(Contraction {
        retraction,
        inclusion,
        extra,
        augmentation,
        coaugmentation,
        homotopy,
        target,
        front: true,
    })
}

/// Contraction of `B(X, O, O)` onto `X`: the extra degeneracy inserts a
/// layer of units behind everything, the retraction iterates the topmost
/// face and finishes with the action `X . O -> X`.
pub fn back_contraction(b: &Bar, o: &Operad) -> Result<Contraction, Error> {
    if b.y_seq.dims() != o.seq.dims() {
        return Err(Error::invalid(
            "bar contraction",
            "the right factor must be the operad acting on itself",
        ));
    }
    let s = b.top_level();
    let target = b.x_seq.clone();
    let id_x = SymSeqMap::identity(&b.x_seq);
    let id_o = SymSeqMap::identity(&o.seq);
    let ins = unit_insert_right(&b.m_circ[0], &o.unit);
    let mut extra = Vec::with_capacity(s);
    for k in 0..s {
        let inner = wrap_iter(&b.m_circ, &id_o, ins.clone(), 0, 1, k)?;
        extra.push(circle_map(&b.t_circ[k], &b.t_circ[k + 1], &id_x, &inner)?);
    }
    let coaugmentation = unit_insert_right(&b.t_circ[0], &o.unit);
    let augmentation = b.x_action.clone();
    let mut retraction = vec![augmentation.clone()];
    for k in 1..=s {
        let prev = retraction[k - 1].clone();
        retraction.push(prev.compose(&b.faces[k][k], &b.levels[k], &b.levels[k - 1], &target));
    }
    let mut inclusion = vec![coaugmentation.clone()];
    for k in 1..=s {
        let prev = inclusion[k - 1].clone();
        inclusion.push(extra[k - 1].compose(&prev, &target, &b.levels[k - 1], &b.levels[k]));
    }
    let homotopy = homotopy_words(b, &extra, &retraction, &inclusion, &target, false);
    Ok(Contraction {
        retraction,
        inclusion,
        extra,
        augmentation,
        coaugmentation,
        homotopy,
        target,
        front: false,
    })
}

/// The homotopy on the word `w` applies as many faces from the augmented
/// side as `w` has letters pointing at the contracted endpoint, then climbs
/// back with extra degeneracies; the full word routes through the target.
fn homotopy_words(
    b: &Bar,
    extra: &[SymSeqMap],
    retraction: &[SymSeqMap],
    inclusion: &[SymSeqMap],
    target: &SymSeq,
    front: bool,
) -> BTreeMap<Vec<usize>, SymSeqMap> {
    let s = b.top_level();
    let mut homotopy = BTreeMap::new();
    for n in 0..=s {
        for w in interval_words(n) {
            let z = if front {
                w.iter().filter(|&&v| v == 0).count()
            } else {
                w.iter().filter(|&&v| v == 1).count()
            };
            let hm = if z == n + 1 {
                inclusion[n].compose(&retraction[n], &b.levels[n], target, &b.levels[n])
            } else {
                let mut cur = SymSeqMap::identity(&b.levels[n]);
                for step in 0..z {
                    let lvl = n - step;
                    let face = if front {
                        &b.faces[lvl][0]
                    } else {
                        &b.faces[lvl][lvl]
                    };
                    cur = face.compose(&cur, &b.levels[n], &b.levels[lvl], &b.levels[lvl - 1]);
                }
                for step in 0..z {
                    let lvl = n - z + step;
                    cur = extra[lvl].compose(&cur, &b.levels[n], &b.levels[lvl], &b.levels[lvl + 1]);
                }
                cur
            };
            homotopy.insert(w, hm);
        }
    }
    homotopy
}

fn relation_fail(name: &str, level: usize) -> Error {
    Error::AxiomViolation {
        check: "extra degeneracy relations".into(),
        witness: format!("{name} at level {level}"),
    }
}

/// Check the interaction of the extra degeneracies with the faces,
/// degeneracies, and the augmentation.
pub fn check_extra_degeneracy_relations(b: &Bar, c: &Contraction) -> Result<(), Error> {
    let s = b.top_level();
    for k in 0..s {
        let e_k = &c.extra[k];
        let idk = SymSeqMap::identity(&b.levels[k]);
        let absorb = if c.front {
            &b.faces[k + 1][0]
        } else {
            &b.faces[k + 1][k + 1]
        };
        if !absorb
            .compose(e_k, &b.levels[k], &b.levels[k + 1], &b.levels[k])
            .equals(&idk)
        {
            return Err(relation_fail("absorbing face is not the identity", k));
        }
        for i in 0..=k {
            let shifted = if c.front {
                &b.faces[k + 1][i + 1]
            } else {
                &b.faces[k + 1][i]
            };
            let lhs = shifted.compose(e_k, &b.levels[k], &b.levels[k + 1], &b.levels[k]);
            let rhs = if k == 0 {
                c.coaugmentation
                    .compose(&c.augmentation, &b.levels[0], &c.target, &b.levels[0])
            } else {
                c.extra[k - 1].compose(&b.faces[k][i], &b.levels[k], &b.levels[k - 1], &b.levels[k])
            };
            if !lhs.equals(&rhs) {
                return Err(relation_fail("face does not shift past the extra degeneracy", k));
            }
        }
        if k + 1 < s {
            for j in 0..=k {
                let shifted = if c.front {
                    &b.degens[k + 1][j + 1]
                } else {
                    &b.degens[k + 1][j]
                };
                let lhs = shifted.compose(e_k, &b.levels[k], &b.levels[k + 1], &b.levels[k + 2]);
                let rhs = c.extra[k + 1].compose(
                    &b.degens[k][j],
                    &b.levels[k],
                    &b.levels[k + 1],
                    &b.levels[k + 2],
                );
                if !lhs.equals(&rhs) {
                    return Err(relation_fail(
                        "degeneracy does not shift past the extra degeneracy",
                        k,
                    ));
                }
            }
            let doubled = if c.front {
                &b.degens[k + 1][0]
            } else {
                &b.degens[k + 1][k + 1]
            };
            let lhs = doubled.compose(e_k, &b.levels[k], &b.levels[k + 1], &b.levels[k + 2]);
            let rhs = c.extra[k + 1].compose(e_k, &b.levels[k], &b.levels[k + 1], &b.levels[k + 2]);
            if !lhs.equals(&rhs) {
                return Err(relation_fail("extra degeneracy does not double", k));
            }
        }
    }
    let round = c
        .augmentation
        .compose(&c.coaugmentation, &c.target, &b.levels[0], &c.target);
    if !round.equals(&SymSeqMap::identity(&c.target)) {
        return Err(relation_fail("augmentation does not split", 0));
    }
    Ok(())
}

/// Verify a contraction completely: the extra-degeneracy relations, the
/// simplicial homotopy between the two endpoint maps, and that the
/// augmentation identifies the path components with its target.
pub fn verify_contraction(b: &Bar, c: &Contraction) -> Result<String, Error> {
    check_extra_degeneracy_relations(b, c)?;
    let (f, g) = c.endpoints(b);
    let mut checked = 0usize;
    for (&r, xs) in &b.simplicial.arities {
        let fr: Vec<_> = f.iter().map(|m| m.comp(r)).collect();
        let gr: Vec<_> = g.iter().map(|m| m.comp(r)).collect();
        let hr: BTreeMap<Vec<usize>, _> = c
            .homotopy
            .iter()
            .map(|(w, m)| (w.clone(), m.comp(r)))
            .collect();
        if !verify_simplicial_homotopy(xs, xs, &fr, &gr, &hr)? {
            return Err(Error::AxiomViolation {
                check: "contracting homotopy".into(),
                witness: format!("arity {r}"),
            });
        }
        checked += 1;
    }
    for (&r, xs) in &b.simplicial.arities {
        let (pc, proj, section) = pi0_with_projection(xs)?;
        let tr = c.target.complex_at(r);
        let aug_r = c.augmentation.comp(r);
        let x0 = &xs.levels[0];
        let phi = aug_r.compose(&section, &pc, x0, &tr);
        phi.verify(&pc, &tr)?;
        let recomposed = phi.compose(&proj, x0, &pc, &tr);
        if let Some(qd) = chainmaps_differ(&recomposed, &aug_r, x0, &tr) {
            return Err(Error::AxiomViolation {
                check: "path components".into(),
                witness: format!("augmentation does not factor at arity {r}, degree {qd}"),
            });
        }
        let degrees: BTreeSet<i64> = pc.degrees().chain(tr.degrees()).collect();
        for qd in degrees {
            let m = phi.comp(qd, &pc, &tr);
            if m.rows != m.cols || rank(&m) != m.rows {
                return Err(Error::AxiomViolation {
                    check: "path components".into(),
                    witness: format!("not an isomorphism at arity {r}, degree {qd}"),
                });
            }
        }
    }
    Ok(format!(
        "extra degeneracy relations hold through level {}; contracting homotopy verified at {} arities; path components match the augmentation target",
        b.top_level(),
        checked
    ))
}

fn homology_matches(
    tot: &ChainComplex,
    target: &ChainComplex,
    max_degree: i64,
    arity: usize,
) -> Result<(), Error> {
    let ha = tot.homology_by_weight();
    let hb = target.homology_by_weight();
    let keys: BTreeSet<(u32, i64)> = ha.keys().chain(hb.keys()).copied().collect();
    for (w, n) in keys {
        if n > max_degree {
            continue;
        }
        let a = ha.get(&(w, n)).copied().unwrap_or(0);
        let b = hb.get(&(w, n)).copied().unwrap_or(0);
        if a != b {
            return Err(Error::AxiomViolation {
                check: "resolution homology".into(),
                witness: format!("arity {arity}, weight {w}, degree {n}: {a} against {b}"),
            });
        }
    }
    Ok(())
}

/// Verify a prebuilt resolution `B(O, O, Y)`: simplicial identities, extra
/// degeneracies, the contracting homotopy, path components, and agreement of
/// the realization homology with the homology of `Y` through `max_degree`.
pub fn resolution_check(b: &Bar, o: &Operad, max_degree: i64) -> Result<String, Error> {
    b.simplicial.check_identities()?;
    let c = front_contraction(b, o)?;
    let report = verify_contraction(b, &c)?;
    let (tots, window) = b.realization()?;
    if max_degree > window {
        return Err(Error::TruncationWindow {
            requested: max_degree,
            trustworthy: window,
        });
    }
    let mut arities: BTreeSet<usize> = tots.keys().copied().collect();
    arities.extend(b.y_seq.arities());
    let zero = ChainComplex::zero();
    for r in arities {
        let tot = tots.get(&r).unwrap_or(&zero);
        homology_matches(tot, &b.y_seq.complex_at(r), max_degree, r)?;
    }
    Ok(format!(
        "{report}; realization homology matches the algebra through degree {max_degree}"
    ))
}

/// Resolve the algebra `Y` by `B(O, O, Y)` and run `resolution_check`.
pub fn contraction_check(
    o: &Operad,
    y: &LeftModule,
    s: usize,
    max_degree: i64,
) -> Result<String, Error> {
    let x = operad_as_right_module(o);
    let b = bar(&x, o, y, s)?;
    resolution_check(&b, o, max_degree)
}

/// Betti numbers keyed by (weight, arity, degree); zero entries omitted.
pub type HomologySummary = BTreeMap<(u32, usize, i64), usize>;

/// Realization Betti numbers of a bar construction through `max_degree`,
/// refused when that degree falls outside the trustworthy window.
pub fn homology_summary(b: &Bar, max_degree: i64) -> Result<HomologySummary, Error> {
    let (tots, window) = b.realization()?;
    if max_degree > window {
        return Err(Error::TruncationWindow {
            requested: max_degree,
            trustworthy: window,
        });
    }
    let mut out = HomologySummary::new();
    for (r, tot) in &tots {
        for ((w, n), h) in tot.homology_by_weight() {
            if n <= max_degree && h > 0 {
                out.insert((w, *r, n), h);
            }
        }
    }
    Ok(out)
}

/// The bar construction `B(I, O, Y)` computing Quillen homology, with the
/// simplicial identities already verified.
pub fn quillen_bar(o: &Operad, y: &LeftModule, s: usize) -> Result<Bar, Error> {
    let x = unit_as_right_module(o)?;
    let b = bar(&x, o, y, s)?;
    b.simplicial.check_identities()?;
    Ok(b)
}

/// Quillen homology of the algebra `Y` over `O`: the realization homology
/// of `B(I, O, Y)`, reported through `max_degree` only when that degree is
/// inside the trustworthy window of the level bound `s`.
pub fn quillen_homology(
    o: &Operad,
    y: &LeftModule,
    s: usize,
    max_degree: i64,
) -> Result<HomologySummary, Error> {
    homology_summary(&quillen_bar(o, y, s)?, max_degree)
}

/// The bar construction `B(P, O, Y)` with `P` acting on the left through
/// `f: O -> P`, identities verified.
pub fn change_bar(
    f: &OperadMap,
    src: &Operad,
    tgt: &Operad,
    y: &LeftModule,
    s: usize,
) -> Result<Bar, Error> {
    verify_operad_map(f, src, tgt)?;
    let xt = operad_as_right_module(tgt);
    let x = restrict_right_along(&f.map, src, &xt)?;
    let b = bar(&x, src, y, s)?;
    b.simplicial.check_identities()?;
    Ok(b)
}

/// Homology of `Y` after base change along `f: O -> P`: the realization
/// homology of `B(P, O, Y)` with `P` acting through `f`.
pub fn change_of_operads(
    f: &OperadMap,
    src: &Operad,
    tgt: &Operad,
    y: &LeftModule,
    s: usize,
    max_degree: i64,
) -> Result<HomologySummary, Error> {
    homology_summary(&change_bar(f, src, tgt, y, s)?, max_degree)
}

/// Resolve the right module `X` by `B(X, O, O)` and verify the mirror
/// contraction onto `X`.
pub fn right_module_resolution(
    x: &RightModule,
    o: &Operad,
    s: usize,
) -> Result<(Bar, String), Error> {
    let y = operad_as_left_module(o);
    let b = bar(x, o, &y, s)?;
    b.simplicial.check_identities()?;
    let c = back_contraction(&b, o)?;
    let report = verify_contraction(&b, &c)?;
    Ok((b, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{
        ass, ass_to_com_projection, com, free_algebra, identity_operad_map, square_zero_algebra,
        unit_operad,
    };
    use crate::q;
    use crate::symseq::TruncationPolicy;

    fn point() -> ChainComplex {
        ChainComplex::concentrated("v", 0, 1)
    }

    fn pol(n: usize, w: u32) -> TruncationPolicy {
        TruncationPolicy::arity_weight(n, w)
    }

    #[test]
    fn bar_over_the_unit_operad_is_constant() {
        let o = unit_operad(false, pol(3, 3)).unwrap();
        let y = free_algebra(&o, &point()).unwrap();
        let x = operad_as_right_module(&o);
        let b = bar(&x, &o, &y, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(b.levels[k].dims(), y.seq.dims(), "level {k}");
        }
        b.simplicial.check_identities().unwrap();
        let report = contraction_check(&o, &y, 3, 1).unwrap();
        assert!(report.contains("path components"));
    }

    // weight-graded dimensions of Com(Z) for Z concentrated in degree 0,
    // weights 1..=4, with operations of at most four inputs
    fn com_step(z: [usize; 4]) -> [usize; 4] {
        let s2 = z[0] * (z[0] + 1) / 2;
        let s3 = z[0] * (z[0] + 1) * (z[0] + 2) / 6;
        let s4 = z[0] * (z[0] + 1) * (z[0] + 2) * (z[0] + 3) / 24;
        [
            z[0],
            z[1] + s2,
            z[2] + z[0] * z[1] + s3,
            z[3] + z[0] * z[2] + z[1] * (z[1] + 1) / 2 + s2 * z[1] + s4,
        ]
    }

    #[test]
    fn commutative_bar_level_dimensions() {
        // B(I, Com, Y): level k is Com^k applied to the one-point algebra
        let o = com(pol(3, 3)).unwrap();
        let y = square_zero_algebra(&o, &point()).unwrap();
        let x = unit_as_right_module(&o).unwrap();
        let b = bar(&x, &o, &y, 3).unwrap();
        let mut z = [1usize, 0, 0, 0];
        for k in 0..=3 {
            let cx = b.levels[k].complex_at(0);
            let ws = cx.weights_at(0);
            for wt in 1..=3u32 {
                let cnt = ws.iter().filter(|&&u| u == wt).count();
                assert_eq!(cnt, z[(wt - 1) as usize], "level {k} weight {wt}");
            }
            z = com_step(z);
        }

        // B(Com, Com, Y) at weight 4: one extra Com layer per level
        let o = com(pol(4, 4)).unwrap();
        let y = square_zero_algebra(&o, &point()).unwrap();
        let x = operad_as_right_module(&o);
        let b = bar(&x, &o, &y, 4).unwrap();
        let mut z = [1usize, 0, 0, 0];
        for k in 0..=4 {
            z = com_step(z);
            let cx = b.levels[k].complex_at(0);
            let cnt = cx.weights_at(0).iter().filter(|&&u| u == 4).count();
            assert_eq!(cnt, z[3], "level {k}");
            assert_eq!(z[3], [1usize, 5, 14, 30, 55][k], "frozen value at level {k}");
        }
    }

    #[test]
    fn contraction_over_small_operads() {
        for o in [com(pol(3, 3)).unwrap(), ass(pol(3, 3)).unwrap()] {
            let free = free_algebra(&o, &point()).unwrap();
            contraction_check(&o, &free, 3, 1).unwrap();
            let sq = square_zero_algebra(&o, &point()).unwrap();
            contraction_check(&o, &sq, 3, 1).unwrap();
        }
    }

    #[test]
    fn quillen_homology_of_free_and_square_zero_algebras() {
        let o = com(pol(3, 3)).unwrap();
        let yf = free_algebra(&o, &point()).unwrap();
        let t = quillen_homology(&o, &yf, 3, 1).unwrap();
        assert_eq!(t, HomologySummary::from([((1, 0, 0), 1)]));

        let ys = square_zero_algebra(&o, &point()).unwrap();
        let t = quillen_homology(&o, &ys, 3, 2).unwrap();
        assert_eq!(t, HomologySummary::from([((1, 0, 0), 1), ((2, 0, 1), 1)]));

        let o = ass(pol(3, 3)).unwrap();
        let ys = square_zero_algebra(&o, &point()).unwrap();
        let t = quillen_homology(&o, &ys, 3, 2).unwrap();
        assert_eq!(
            t,
            HomologySummary::from([((1, 0, 0), 1), ((2, 0, 1), 1), ((3, 0, 2), 1)])
        );
    }

    #[test]
    fn resolution_of_the_operad_by_itself() {
        let o = com(pol(3, 3)).unwrap();
        let x = operad_as_right_module(&o);
        let (b, report) = right_module_resolution(&x, &o, 3).unwrap();
        assert!(report.contains("contracting homotopy"));
        let (tots, window) = b.realization().unwrap();
        assert!(window >= 2);
        for (r, tot) in &tots {
            for (n, h) in tot.homology() {
                if n <= window {
                    assert_eq!(h, usize::from(n == 0), "arity {r} degree {n}");
                }
            }
        }

        // a corrupted degeneracy must break the simplicial identities
        let mut bad = b;
        let xs = bad.simplicial.arities.get_mut(&2).unwrap();
        xs.degens[1][0] = xs.degens[1][0].scale(&q(-1));
        assert!(matches!(
            bad.simplicial.check_identities(),
            Err(Error::SimplicialIdentity { .. })
        ));
    }

    #[test]
    fn change_along_projection_and_identity() {
        let src = ass(pol(3, 3)).unwrap();
        let tgt = com(pol(3, 3)).unwrap();
        let y = free_algebra(&src, &point()).unwrap();

        let f = ass_to_com_projection(&src, &tgt).unwrap();
        let t = change_of_operads(&f, &src, &tgt, &y, 3, 2).unwrap();
        assert_eq!(
            t,
            HomologySummary::from([((1, 0, 0), 1), ((2, 0, 0), 1), ((3, 0, 0), 1)])
        );

        let idm = identity_operad_map(&src);
        let t = change_of_operads(&idm, &src, &src, &y, 3, 2).unwrap();
        assert_eq!(
            t,
            HomologySummary::from([((1, 0, 0), 1), ((2, 0, 0), 1), ((3, 0, 0), 1)])
        );
    }
}
