//! Simplicial objects in chain complexes: identity checking, Moore
//! normalization, the normalized-parts decomposition, copowers over finite
//! simplicial sets, simplicial homotopies, path components, realization as
//! a total complex, and skeletal truncations.
//!
//! A simplicial object is stored through a finite level bound S; levels
//! above S are never accessed. Realization therefore reports homology only
//! inside a trustworthy degree window computed from S and the minimal
//! internal degree, and refuses requests beyond it.

use crate::chain::{ChainComplex, ChainMap, LevelBasis};
use crate::error::Error;
use crate::linalg::{kernel_basis, rank, solve, Col, Matrix, Subspace};
use crate::symseq::chainmaps_differ;
use crate::{q, Q};
use num::Zero;
use std::collections::BTreeMap;

/// A simplicial chain complex truncated at level S: levels `X_0..X_S`,
/// faces `d_i: X_n -> X_{n-1}` and degeneracies `s_j: X_n -> X_{n+1}`
/// (the latter stored for `n < S` only).
#[derive(Debug, Clone)]
pub struct SimplicialChainComplex {
    pub levels: Vec<ChainComplex>,
    /// `faces[n][i] = d_i`, for `1 <= n <= S`, `0 <= i <= n`; `faces[0]` empty
    pub faces: Vec<Vec<ChainMap>>,
    /// `degens[n][j] = s_j`, for `0 <= n < S`, `0 <= j <= n`; `degens[S]` empty
    pub degens: Vec<Vec<ChainMap>>,
}

impl SimplicialChainComplex {
    pub fn new(
        levels: Vec<ChainComplex>,
        faces: Vec<Vec<ChainMap>>,
        degens: Vec<Vec<ChainMap>>,
    ) -> Result<Self, Error> {
        if levels.is_empty() {
            return Err(Error::invalid("simplicial object", "no levels supplied"));
        }
        let s = levels.len() - 1;
        if faces.len() != levels.len() || degens.len() != levels.len() {
            return Err(Error::invalid(
                "simplicial object",
                "face and degeneracy tables must have one entry per level",
            ));
        }
        for n in 0..=s {
            let want = if n == 0 { 0 } else { n + 1 };
            if faces[n].len() != want {
                return Err(Error::invalid(
                    "simplicial object",
                    format!("level {n} must carry {want} face maps"),
                ));
            }
            let want = if n == s { 0 } else { n + 1 };
            if degens[n].len() != want {
                return Err(Error::invalid(
                    "simplicial object",
                    format!("level {n} must carry {want} degeneracy maps"),
                ));
            }
        }
        for n in 1..=s {
            for d in &faces[n] {
                d.verify(&levels[n], &levels[n - 1])?;
            }
        }
        for n in 0..s {
            for sj in &degens[n] {
                sj.verify(&levels[n], &levels[n + 1])?;
            }
        }
        Ok(SimplicialChainComplex {
            levels,
            faces,
            degens,
        })
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn face(&self, n: usize, i: usize) -> &ChainMap {
        &self.faces[n][i]
    }

    pub fn degen(&self, n: usize, j: usize) -> &ChainMap {
        &self.degens[n][j]
    }
}

/// The constant simplicial object on a complex: every level is `z`, every
/// structure map the identity.
pub fn constant(z: &ChainComplex, s: usize) -> SimplicialChainComplex {
    let id = ChainMap::identity(z);
    let levels = vec![z.clone(); s + 1];
    let faces = (0..=s)
        .map(|n| if n == 0 { vec![] } else { vec![id.clone(); n + 1] })
        .collect();
    let degens = (0..=s)
        .map(|n| if n == s { vec![] } else { vec![id.clone(); n + 1] })
        .collect();
    SimplicialChainComplex {
        levels,
        faces,
        degens,
    }
}

pub(crate) fn check_identities_labeled(
    x: &SimplicialChainComplex,
    arity: usize,
) -> Result<(), Error> {
    let s = x.top_level();
    let fail = |identity: String, level: usize, degree: i64| Error::SimplicialIdentity {
        identity,
        level,
        arity,
        degree,
    };
    let comp = |f: &ChainMap, g: &ChainMap, a: &ChainComplex, b: &ChainComplex, c: &ChainComplex| {
        f.compose(g, a, b, c)
    };
    for n in 2..=s {
        let (xn, xm, xl) = (&x.levels[n], &x.levels[n - 1], &x.levels[n - 2]);
        for j in 1..=n {
            for i in 0..j {
                let lhs = comp(&x.faces[n - 1][i], &x.faces[n][j], xn, xm, xl);
                let rhs = comp(&x.faces[n - 1][j - 1], &x.faces[n][i], xn, xm, xl);
                if let Some(deg) = chainmaps_differ(&lhs, &rhs, xn, xl) {
                    return Err(fail(format!("d_{i} d_{j} = d_{} d_{i}", j - 1), n, deg));
                }
            }
        }
    }
    for n in 0..=s.saturating_sub(2) {
        let (xn, xm, xl) = (&x.levels[n], &x.levels[n + 1], &x.levels[n + 2]);
        for j in 0..=n {
            for i in 0..=j {
                let lhs = comp(&x.degens[n + 1][i], &x.degens[n][j], xn, xm, xl);
                let rhs = comp(&x.degens[n + 1][j + 1], &x.degens[n][i], xn, xm, xl);
                if let Some(deg) = chainmaps_differ(&lhs, &rhs, xn, xl) {
                    return Err(fail(format!("s_{i} s_{j} = s_{} s_{i}", j + 1), n, deg));
                }
            }
        }
    }
    for n in 0..s {
        let (xn, xup) = (&x.levels[n], &x.levels[n + 1]);
        let id = ChainMap::identity(xn);
        for j in 0..=n {
            for i in 0..=n + 1 {
                let lhs = comp(&x.faces[n + 1][i], &x.degens[n][j], xn, xup, xn);
                if i == j || i == j + 1 {
                    if let Some(deg) = chainmaps_differ(&lhs, &id, xn, xn) {
                        return Err(fail(format!("d_{i} s_{j} = id"), n, deg));
                    }
                } else if i < j {
                    let xdn = &x.levels[n - 1];
                    let rhs = comp(&x.degens[n - 1][j - 1], &x.faces[n][i], xn, xdn, xn);
                    if let Some(deg) = chainmaps_differ(&lhs, &rhs, xn, xn) {
                        return Err(fail(format!("d_{i} s_{j} = s_{} d_{i}", j - 1), n, deg));
                    }
                } else {
                    // i > j + 1
                    let xdn = &x.levels[n - 1];
                    let rhs = comp(&x.degens[n - 1][j], &x.faces[n][i - 1], xn, xdn, xn);
                    if let Some(deg) = chainmaps_differ(&lhs, &rhs, xn, xn) {
                        return Err(fail(format!("d_{i} s_{j} = s_{j} d_{}", i - 1), n, deg));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Verify every composable simplicial identity among the stored faces and
/// degeneracies as an exact matrix equation.
pub fn check_simplicial_identities(x: &SimplicialChainComplex) -> Result<(), Error> {
    check_identities_labeled(x, 0)
}

/// The structure map `X(theta): X_n -> X_m` of an arbitrary monotone
/// `theta: [m] -> [n]`, given as its value list of length `m+1`. Computed
/// through the epi-mono factorization, peeling top cofaces and outer
/// degeneracies.
pub fn simplicial_operator(
    x: &SimplicialChainComplex,
    theta: &[usize],
    n: usize,
) -> ChainMap {
    assert!(!theta.is_empty(), "operator needs a nonempty value list");
    debug_assert!(theta.windows(2).all(|w| w[0] <= w[1]), "monotone required");
    debug_assert!(theta.iter().all(|&v| v <= n));
    // mono part: values attained, ascending
    let mut image: Vec<usize> = theta.to_vec();
    image.dedup();
    // epi part: theta with values renumbered
    let eta: Vec<usize> = theta
        .iter()
        .map(|v| image.binary_search(v).unwrap())
        .collect();
    // X(iota): X_n -> X_k, peeling the largest missing value first
    let mut acc = ChainMap::identity(&x.levels[n]);
    let mut cur = n;
    let mut src = &x.levels[n];
    let mut missing: Vec<usize> = (0..=n).filter(|v| !image.contains(v)).collect();
    while let Some(m) = missing.pop() {
        let tgt = &x.levels[cur - 1];
        acc = x.faces[cur][m].compose(&acc, src, &x.levels[cur], tgt);
        src = tgt;
        cur -= 1;
    }
    // X(eta): X_k -> X_m, peeling the largest degenerate position first
    let mut word: Vec<usize> = Vec::new();
    let mut e = eta;
    loop {
        let Some(j) = (0..e.len() - 1).rev().find(|&j| e[j] == e[j + 1]) else {
            break;
        };
        word.push(j);
        e.remove(j);
    }
    for &j in word.iter().rev() {
        let tgt = &x.levels[cur + 1];
        acc = x.degens[cur][j].compose(&acc, src, &x.levels[cur], tgt);
        src = tgt;
        cur += 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// Moore normalization and the bicomplex
// ---------------------------------------------------------------------------

/// A first-quadrant-style bicomplex: one chain complex per simplicial
/// degree and horizontal chain maps `horiz[p]: columns[p] -> columns[p-1]`
/// with `horiz^2 = 0`. The anticommutation of the two differentials is
/// realized by the sign twist `(-1)^p` applied to the vertical
/// differential inside `tot`.
#[derive(Debug, Clone)]
pub struct Bicomplex {
    pub columns: Vec<ChainComplex>,
    /// `horiz[0]` is unused and zero
    pub horiz: Vec<ChainMap>,
}

impl Bicomplex {
    pub fn new(columns: Vec<ChainComplex>, horiz: Vec<ChainMap>) -> Result<Self, Error> {
        if horiz.len() != columns.len() {
            return Err(Error::invalid(
                "bicomplex",
                "one horizontal map per column required (the first is ignored)",
            ));
        }
        for p in 1..columns.len() {
            horiz[p].verify(&columns[p], &columns[p - 1])?;
        }
        for p in 2..columns.len() {
            let sq = horiz[p - 1].compose(&horiz[p], &columns[p], &columns[p - 1], &columns[p - 2]);
            if !sq.is_zero() {
                return Err(Error::AxiomViolation {
                    check: "horizontal differential squares to zero".into(),
                    witness: format!("columns {p} -> {}", p - 2),
                });
            }
        }
        Ok(Bicomplex { columns, horiz })
    }

    /// The direct-sum total complex: degree `m` collects column `p` in
    /// internal degree `m - p`; differential `horizontal + (-1)^p vertical`.
    pub fn tot(&self) -> Result<ChainComplex, Error> {
        // block offsets per total degree, columns in ascending p
        let mut offsets: BTreeMap<i64, BTreeMap<usize, usize>> = BTreeMap::new();
        let mut bases: BTreeMap<i64, LevelBasis> = BTreeMap::new();
        for (p, cx) in self.columns.iter().enumerate() {
            for qd in cx.degrees() {
                let m = p as i64 + qd;
                let lb = cx.level(qd).unwrap();
                let entry = bases.entry(m).or_insert_with(|| LevelBasis {
                    names: Vec::new(),
                    weights: Vec::new(),
                });
                offsets.entry(m).or_default().insert(p, entry.names.len());
                entry
                    .names
                    .extend(lb.names.iter().map(|s| format!("p{p}:{s}")));
                entry.weights.extend(lb.weights.iter().copied());
            }
        }
        let mut diffs: BTreeMap<i64, Matrix> = BTreeMap::new();
        let degrees: Vec<i64> = bases.keys().copied().collect();
        for &m in &degrees {
            let rows = bases.get(&(m - 1)).map_or(0, |b| b.names.len());
            let cols = bases[&m].names.len();
            let mut triples: Vec<(usize, usize, Q)> = Vec::new();
            for (&p, &off) in &offsets[&m] {
                let qd = m - p as i64;
                let cx = &self.columns[p];
                if p >= 1 {
                    if let Some(&toff) = offsets.get(&(m - 1)).and_then(|o| o.get(&(p - 1))) {
                        let h = self.horiz[p].comp(qd, cx, &self.columns[p - 1]);
                        for c in 0..h.cols {
                            for (r, v) in h.col(c) {
                                triples.push((toff + r, off + c, v.clone()));
                            }
                        }
                    }
                }
                if let Some(&toff) = offsets.get(&(m - 1)).and_then(|o| o.get(&p)) {
                    let dv = cx.d(qd);
                    let sign = if p % 2 == 0 { q(1) } else { q(-1) };
                    for c in 0..dv.cols {
                        for (r, v) in dv.col(c) {
                            triples.push((toff + r, off + c, &sign * v));
                        }
                    }
                }
            }
            if !triples.is_empty() {
                diffs.insert(m, Matrix::from_triples(rows, cols, &triples));
            }
        }
        ChainComplex::new(bases, diffs)
    }
}

/// Moore normalization with the inclusion of each column into its level.
pub struct MooreData {
    pub bicomplex: Bicomplex,
    /// `sections[p][q]`: basis of `N X_p` in degree `q` as columns in `X_p`
    pub sections: Vec<BTreeMap<i64, Matrix>>,
}

/// Normalize: column `p` is the intersection of the kernels of
/// `d_0..d_{p-1}`, computed by iterated kernel restriction; the horizontal
/// differential is `(-1)^p d_p` restricted to the column.
pub fn moore(x: &SimplicialChainComplex) -> Result<MooreData, Error> {
    let s = x.top_level();
    let mut sections: Vec<BTreeMap<i64, Matrix>> = Vec::with_capacity(s + 1);
    let mut columns: Vec<ChainComplex> = Vec::with_capacity(s + 1);
    for p in 0..=s {
        let xp = &x.levels[p];
        let mut secs: BTreeMap<i64, Matrix> = BTreeMap::new();
        for qd in xp.degrees() {
            let dim = xp.dim(qd);
            let mut sec = Matrix::identity(dim);
            for i in 0..p {
                if sec.cols == 0 {
                    break;
                }
                let face = x.faces[p][i].comp(qd, xp, &x.levels[p - 1]);
                let ker = kernel_basis(&face.mul(&sec));
                sec = sec.mul(&ker.basis);
            }
            if sec.cols > 0 {
                secs.insert(qd, sec);
            }
        }
        // assemble the column complex
        let mut bases = BTreeMap::new();
        for (&qd, sec) in &secs {
            let wts = xp.weights_at(qd);
            let mut names = Vec::with_capacity(sec.cols);
            let mut weights = Vec::with_capacity(sec.cols);
            for j in 0..sec.cols {
                let lead = sec.col(j).first().expect("nonzero basis column").0;
                debug_assert!(sec.col(j).iter().all(|(r, _)| wts[*r] == wts[lead]));
                names.push(format!("n{p}.{qd}.{j}"));
                weights.push(wts[lead]);
            }
            bases.insert(qd, LevelBasis { names, weights });
        }
        let mut diffs = BTreeMap::new();
        for (&qd, sec) in &secs {
            let dv = xp.d(qd).mul(sec);
            let Some(below) = secs.get(&(qd - 1)) else {
                // the normalized part is a subcomplex, so with no basis
                // below the restricted differential must vanish
                if !dv.is_zero() {
                    return Err(Error::Unsolvable {
                        context: "restricting the internal differential to the normalized part"
                            .into(),
                        col: 0,
                    });
                }
                continue;
            };
            let m = solve(below, &dv).ok_or(Error::Unsolvable {
                context: "restricting the internal differential to the normalized part".into(),
                col: 0,
            })?;
            if !m.is_zero() {
                diffs.insert(qd, m);
            }
        }
        columns.push(ChainComplex::new(bases, diffs)?);
        sections.push(secs);
    }
    let mut horiz: Vec<ChainMap> = vec![ChainMap::zero()];
    for p in 1..=s {
        let sign = if p % 2 == 0 { q(1) } else { q(-1) };
        let mut comps = BTreeMap::new();
        for (&qd, sec) in &sections[p] {
            let Some(below) = sections[p - 1].get(&qd) else {
                let img = x.faces[p][p].comp(qd, &x.levels[p], &x.levels[p - 1]).mul(sec);
                if !img.is_zero() {
                    return Err(Error::Unsolvable {
                        context: "restricting the last face to the normalized part".into(),
                        col: 0,
                    });
                }
                continue;
            };
            let img = x.faces[p][p].comp(qd, &x.levels[p], &x.levels[p - 1]).mul(sec);
            let m = solve(below, &img).ok_or(Error::Unsolvable {
                context: "restricting the last face to the normalized part".into(),
                col: 0,
            })?;
            let m = m.scale(&sign);
            if !m.is_zero() {
                comps.insert(qd, m);
            }
        }
        horiz.push(ChainMap::from_comps(comps));
    }
    let bicomplex = Bicomplex::new(columns, horiz)?;
    Ok(MooreData {
        bicomplex,
        sections,
    })
}

/// Moore normalization, returning just the bicomplex.
pub fn normalize(x: &SimplicialChainComplex) -> Result<Bicomplex, Error> {
    moore(x).map(|m| m.bicomplex)
}

/// The span of the images of `s_0..s_{n-1}` inside `X_n`, per degree.
pub fn degenerate_subobject(
    x: &SimplicialChainComplex,
    n: usize,
) -> Result<BTreeMap<i64, Subspace>, Error> {
    if n == 0 || n > x.top_level() {
        return Err(Error::invalid(
            "degenerate subobject",
            "level must satisfy 1 <= n <= S",
        ));
    }
    let xn = &x.levels[n];
    let mut out = BTreeMap::new();
    for qd in xn.degrees() {
        let mut cols: Vec<Col> = Vec::new();
        for j in 0..n {
            let m = x.degens[n - 1][j].comp(qd, &x.levels[n - 1], xn);
            for c in 0..m.cols {
                cols.push(m.col(c).clone());
            }
        }
        let stacked = Matrix::from_cols(xn.dim(qd), cols);
        out.insert(qd, crate::linalg::image_basis(&stacked));
    }
    Ok(out)
}

/// Trustworthy realization window: with levels stored through `S` and all
/// internal degrees bounded below by `q_min` (assumed to persist above the
/// bound), homology of the total complex is exact in total degrees
/// `<= S - 1 + q_min`.
pub fn trustworthy_window(x: &SimplicialChainComplex) -> i64 {
    let s = x.top_level() as i64;
    let q_min = x.levels.iter().filter_map(|c| c.min_degree()).min();
    match q_min {
        Some(qm) => s - 1 + qm,
        None => i64::MAX,
    }
}

/// Realize as the total complex of the Moore bicomplex. Returns the complex
/// together with the trustworthy degree window.
pub fn realization(x: &SimplicialChainComplex) -> Result<(ChainComplex, i64), Error> {
    let md = moore(x)?;
    Ok((md.bicomplex.tot()?, trustworthy_window(x)))
}

/// Realize, refusing a request for degrees beyond the trustworthy window.
pub fn realization_in_window(
    x: &SimplicialChainComplex,
    max_total_degree: i64,
) -> Result<(ChainComplex, i64), Error> {
    let window = trustworthy_window(x);
    if max_total_degree > window {
        return Err(Error::TruncationWindow {
            requested: max_total_degree,
            trustworthy: window,
        });
    }
    let md = moore(x)?;
    Ok((md.bicomplex.tot()?, window))
}

/// Total complex of the unnormalized (alternating-face-sum) bicomplex;
/// independent oracle for realization homology inside the window.
pub fn unnormalized_realization(x: &SimplicialChainComplex) -> Result<ChainComplex, Error> {
    let s = x.top_level();
    let mut horiz: Vec<ChainMap> = vec![ChainMap::zero()];
    for p in 1..=s {
        let mut acc = ChainMap::zero();
        for (i, f) in x.faces[p].iter().enumerate() {
            let sign = if i % 2 == 0 { q(1) } else { q(-1) };
            acc = acc.add(&f.scale(&sign));
        }
        horiz.push(acc);
    }
    Bicomplex::new(x.levels.clone(), horiz)?.tot()
}

/// Total complex of the brutal truncation of the Moore bicomplex to
/// simplicial degrees `<= n`.
pub fn skeletal_truncation(x: &SimplicialChainComplex, n: usize) -> Result<ChainComplex, Error> {
    if n > x.top_level() {
        return Err(Error::invalid(
            "skeletal truncation",
            "truncation level exceeds the stored bound",
        ));
    }
    let md = moore(x)?;
    let columns = md.bicomplex.columns[..=n].to_vec();
    let horiz = md.bicomplex.horiz[..=n].to_vec();
    Bicomplex::new(columns, horiz)?.tot()
}

// ---------------------------------------------------------------------------
// Normalized-parts decomposition
// ---------------------------------------------------------------------------

/// Monotone surjections `[n] -> [k]`, encoded by their sets of degenerate
/// positions `J` (positions `j` with `eta(j) = eta(j+1)`), enumerated with
/// `|J| = n - k` in lexicographic order.
fn surjections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn subsets(from: usize, upto: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if size == 0 {
            out.push(cur.clone());
            return;
        }
        for v in from..=upto.saturating_sub(size - 1) {
            cur.push(v);
            subsets(v + 1, upto, size - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if n == k {
        return vec![vec![]];
    }
    subsets(0, n - 1, n - k, &mut Vec::new(), &mut out);
    out
}

fn surjection_values(n: usize, degenerate: &[usize]) -> Vec<usize> {
    let mut vals = Vec::with_capacity(n + 1);
    let mut v = 0usize;
    for pos in 0..=n {
        vals.push(v);
        if pos < n && !degenerate.contains(&pos) {
            v += 1;
        }
    }
    vals
}

/// Degrees of a level whose dimension is small enough that assembling the
/// decomposition map and running a full rank elimination stays cheap.
const DIRECT_RANK_BOUND: usize = 64;

/// Verify the normalized-parts decomposition: for every level `n`, the
/// canonical map `Psi_n` from the sum over surjections `[n] ->> [k]` of
/// `N X_k` (the `eta`-summand included via the degeneracy operator
/// `X(eta)`) is an isomorphism onto `X_n`.
///
/// The verification is exact without large eliminations:
/// the simplicial identities (re-checked here) force `Psi_n` to be
/// surjective, because `1 - (1 - s_{n-1}d_{n-1})...(1 - s_0 d_0)` expands
/// into monomials each starting with a degeneracy, so
/// `X_n = N X_n + sum_j im s_j`, and induction over `n` rewrites the
/// degenerate part through lower normalized parts. Equality of dimensions,
/// checked per level and degree against the surjection counts, then
/// upgrades surjectivity to bijectivity. On levels of small dimension the
/// assembled matrix of `Psi_n` is additionally rank-checked directly.
///
/// Returns a report listing the `C(n,k)` summand counts and dimensions.
pub fn dold_kan_check(x: &SimplicialChainComplex) -> Result<String, Error> {
    let md = moore(x)?;
    let s = x.top_level();
    let mut lines = Vec::new();
    for n in 0..=s {
        let xn = &x.levels[n];
        let mut counts = Vec::new();
        let mut dim_by_degree: BTreeMap<i64, usize> = BTreeMap::new();
        let mut operators: Vec<(usize, ChainMap)> = Vec::new();
        for k in 0..=n {
            let etas = surjections(n, k);
            counts.push(format!(
                "C({n},{k}) = {} summands of dim {}",
                etas.len(),
                md.bicomplex.columns[k].total_dim()
            ));
            for degen in &etas {
                let eta = surjection_values(n, degen);
                operators.push((k, simplicial_operator(x, &eta, k)));
                for (&qd, sec) in &md.sections[k] {
                    *dim_by_degree.entry(qd).or_insert(0) += sec.cols;
                }
            }
        }
        for qd in xn.degrees() {
            let want = xn.dim(qd);
            let got = dim_by_degree.get(&qd).copied().unwrap_or(0);
            if want != got {
                return Err(Error::AxiomViolation {
                    check: "normalized-parts decomposition".into(),
                    witness: format!(
                        "level {n}, degree {qd}: summand dimensions give {got}, level has {want} (defect {})",
                        (want as i64 - got as i64).abs()
                    ),
                });
            }
        }
        // direct cross-check on small degrees: the assembled map is square
        // by the dimension count, so full rank proves it invertible
        for qd in xn.degrees() {
            let dim = xn.dim(qd);
            if dim == 0 || dim > DIRECT_RANK_BOUND {
                continue;
            }
            let mut cols: Vec<Col> = Vec::with_capacity(dim);
            for (k, op) in &operators {
                let Some(sec) = md.sections[*k].get(&qd) else {
                    continue;
                };
                let block = op.comp(qd, &x.levels[*k], xn).mul(sec);
                for j in 0..block.cols {
                    cols.push(block.col(j).clone());
                }
            }
            let psi = Matrix::from_cols(dim, cols);
            if rank(&psi) != dim {
                return Err(Error::AxiomViolation {
                    check: "normalized-parts decomposition".into(),
                    witness: format!("level {n}, degree {qd}: the decomposition map is singular"),
                });
            }
        }
        lines.push(format!(
            "level {n}: dim {} = {}",
            xn.total_dim(),
            counts.join(" + ")
        ));
    }
    check_simplicial_identities(x)?;
    lines.push("simplicial identities hold; decomposition is an isomorphism".into());
    Ok(lines.join("\n"))
}

// ---------------------------------------------------------------------------
// Path components
// ---------------------------------------------------------------------------

/// Cokernel of a weight-graded chain-map difference, with the projection
/// and a coordinate section (a right inverse of the projection on the kept
/// basis vectors; not itself a chain map).
fn cokernel_complex(
    x0: &ChainComplex,
    gens: &BTreeMap<i64, Matrix>,
) -> Result<(ChainComplex, ChainMap, ChainMap), Error> {
    // fully column-reduce the generators per degree
    let mut kept: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut proj: BTreeMap<i64, Matrix> = BTreeMap::new();
    for qd in x0.degrees() {
        let dim = x0.dim(qd);
        let mut echelon: Vec<Col> = Vec::new();
        if let Some(g) = gens.get(&qd) {
            for j in 0..g.cols {
                let mut col = g.col(j).clone();
                for e in &echelon {
                    let lead = e.first().unwrap().0;
                    if let Some(p) = col.iter().position(|(r, _)| *r == lead) {
                        let c = col[p].1.clone();
                        col = crate::linalg::col_add_scaled(&col, e, &(-c));
                    }
                }
                if let Some((_, lv)) = col.first() {
                    let inv = q(1) / lv;
                    let col: Col = col.iter().map(|(r, v)| (*r, v * &inv)).collect();
                    // reduce previous columns by the new pivot
                    let lead = col.first().unwrap().0;
                    for e in echelon.iter_mut() {
                        if let Some(p) = e.iter().position(|(r, _)| *r == lead) {
                            let c = e[p].1.clone();
                            *e = crate::linalg::col_add_scaled(e, &col, &(-c));
                        }
                    }
                    echelon.push(col);
                }
            }
        }
        let pivots: std::collections::BTreeSet<usize> =
            echelon.iter().map(|e| e.first().unwrap().0).collect();
        let keep: Vec<usize> = (0..dim).filter(|i| !pivots.contains(i)).collect();
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        // projection: kept coordinates of the reduction of each basis vector
        let mut cols: Vec<Col> = Vec::with_capacity(dim);
        for i in 0..dim {
            if let Some(&a) = pos.get(&i) {
                cols.push(vec![(a, q(1))]);
            } else {
                let e = echelon
                    .iter()
                    .find(|e| e.first().unwrap().0 == i)
                    .expect("pivot column");
                let col: Col = e
                    .iter()
                    .skip(1)
                    .filter_map(|(r, v)| pos.get(r).map(|&a| (a, -v)))
                    .collect();
                cols.push(col);
            }
        }
        kept.insert(qd, keep);
        proj.insert(qd, Matrix::from_cols(pos.len(), cols));
    }
    let mut bases = BTreeMap::new();
    for (&qd, keep) in &kept {
        if keep.is_empty() {
            continue;
        }
        let lb = x0.level(qd).unwrap();
        bases.insert(
            qd,
            LevelBasis {
                names: keep.iter().map(|&i| lb.names[i].clone()).collect(),
                weights: keep.iter().map(|&i| lb.weights[i]).collect(),
            },
        );
    }
    let mut diffs = BTreeMap::new();
    for (&qd, keep) in &kept {
        if keep.is_empty() {
            continue;
        }
        match kept.get(&(qd - 1)) {
            Some(k) if !k.is_empty() => {}
            _ => continue,
        }
        let d = x0.d(qd);
        let inc = {
            let dim = x0.dim(qd);
            let cols: Vec<Col> = keep.iter().map(|&i| vec![(i, q(1))]).collect();
            Matrix::from_cols(dim, cols)
        };
        let m = proj[&(qd - 1)].mul(&d.mul(&inc));
        if !m.is_zero() {
            diffs.insert(qd, m);
        }
    }
    let cx = ChainComplex::new(bases, diffs)?;
    let mut sec = BTreeMap::new();
    for (&qd, keep) in &kept {
        if keep.is_empty() {
            continue;
        }
        let cols: Vec<Col> = keep.iter().map(|&i| vec![(i, q(1))]).collect();
        sec.insert(qd, Matrix::from_cols(x0.dim(qd), cols));
    }
    let pm = ChainMap::from_comps(proj.into_iter().filter(|(_, m)| m.rows > 0).collect());
    pm.verify(x0, &cx)?;
    Ok((cx, pm, ChainMap::from_comps(sec)))
}

/// Path components: the coequalizer of `d_0, d_1: X_1 -> X_0`, with the
/// projection from `X_0` and a coordinate section of it (the section
/// satisfies projection * section = id but is not a chain map in general).
pub fn pi0_with_projection(
    x: &SimplicialChainComplex,
) -> Result<(ChainComplex, ChainMap, ChainMap), Error> {
    if x.top_level() < 1 {
        return Err(Error::invalid("pi0", "at least two levels required"));
    }
    let diff = x.faces[1][0].add(&x.faces[1][1].scale(&q(-1)));
    let mut gens = BTreeMap::new();
    for qd in x.levels[0].degrees() {
        gens.insert(qd, diff.comp(qd, &x.levels[1], &x.levels[0]));
    }
    cokernel_complex(&x.levels[0], &gens)
}

pub fn pi0(x: &SimplicialChainComplex) -> Result<ChainComplex, Error> {
    pi0_with_projection(x).map(|(c, _, _)| c)
}

// ---------------------------------------------------------------------------
// Finite simplicial sets and copowers
// ---------------------------------------------------------------------------

/// A finite simplicial set stored levelwise: each simplex of level `n` is a
/// monotone value list of length `n+1` (a monotone map `[n] -> [m]`);
/// faces delete a position, degeneracies repeat one.
#[derive(Debug, Clone)]
pub struct FiniteSimplicialSetModel {
    pub levels: Vec<Vec<Vec<usize>>>,
    index: Vec<BTreeMap<Vec<usize>, usize>>,
}

fn monotone_lists(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < max {
                let v = cur[i] + 1;
                for c in cur.iter_mut().skip(i) {
                    *c = v;
                }
                break;
            }
        }
    }
}

impl FiniteSimplicialSetModel {
    fn from_levels(levels: Vec<Vec<Vec<usize>>>) -> Self {
        let index = levels
            .iter()
            .map(|lvl| {
                lvl.iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect()
            })
            .collect();
        FiniteSimplicialSetModel { levels, index }
    }

    /// The standard simplex on `m+1` vertices, through level `top`.
    pub fn standard_simplex(m: usize, top: usize) -> Self {
        let levels = (0..=top).map(|n| monotone_lists(n + 1, m)).collect();
        Self::from_levels(levels)
    }

    /// The boundary of the standard simplex: non-surjective monotone lists.
    pub fn boundary_simplex(m: usize, top: usize) -> Self {
        let levels = (0..=top)
            .map(|n| {
                monotone_lists(n + 1, m)
                    .into_iter()
                    .filter(|l| (0..=m).any(|v| !l.contains(&v)))
                    .collect()
            })
            .collect();
        Self::from_levels(levels)
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    /// Position of a simplex in its level, if present.
    pub fn index_of(&self, n: usize, simplex: &[usize]) -> Option<usize> {
        self.index[n].get(simplex).copied()
    }

    /// Index of `d_i` of the given simplex, one level down.
    pub fn face(&self, n: usize, i: usize, idx: usize) -> usize {
        let mut s = self.levels[n][idx].clone();
        s.remove(i);
        self.index[n - 1][&s]
    }

    /// Index of `s_j` of the given simplex, one level up.
    pub fn degen(&self, n: usize, j: usize, idx: usize) -> usize {
        let mut s = self.levels[n][idx].clone();
        s.insert(j, s[j]);
        self.index[n + 1][&s]
    }

    /// Check the tables are closed under faces and degeneracies.
    pub fn check(&self) -> Result<(), Error> {
        for n in 0..self.levels.len() {
            for (idx, s) in self.levels[n].iter().enumerate() {
                if s.len() != n + 1 || s.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::invalid(
                        "simplicial set model",
                        format!("entry {idx} at level {n} is not a monotone list"),
                    ));
                }
                if n > 0 {
                    for i in 0..=n {
                        let mut f = s.clone();
                        f.remove(i);
                        if !self.index[n - 1].contains_key(&f) {
                            return Err(Error::invalid(
                                "simplicial set model",
                                format!("face {i} of simplex {idx} at level {n} is missing"),
                            ));
                        }
                    }
                }
                if n + 1 < self.levels.len() {
                    for j in 0..=n {
                        let mut g = s.clone();
                        g.insert(j, g[j]);
                        if !self.index[n + 1].contains_key(&g) {
                            return Err(Error::invalid(
                                "simplicial set model",
                                format!("degeneracy {j} of simplex {idx} at level {n} is missing"),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The copower `z . K`: level `n` is one copy of `z` per `n`-simplex,
/// structure maps shuffle the copies along the tables of `K`.
pub fn copower(
    z: &ChainComplex,
    k: &FiniteSimplicialSetModel,
) -> Result<SimplicialChainComplex, Error> {
    k.check()?;
    let s = k.top_level();
    let mut levels = Vec::with_capacity(s + 1);
    for n in 0..=s {
        let copies = k.levels[n].len();
        let mut bases = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for qd in z.degrees() {
            let lb = z.level(qd).unwrap();
            let mut names = Vec::with_capacity(copies * lb.dim());
            let mut weights = Vec::with_capacity(copies * lb.dim());
            for c in 0..copies {
                names.extend(lb.names.iter().map(|s| format!("x{c}:{s}")));
                weights.extend(lb.weights.iter().copied());
            }
            bases.insert(qd, LevelBasis { names, weights });
            let d = z.d(qd);
            if !d.is_zero() {
                let blocks: Vec<&Matrix> = (0..copies).map(|_| &d).collect();
                diffs.insert(qd, Matrix::block_diag(&blocks));
            }
        }
        levels.push(ChainComplex::new(bases, diffs)?);
    }
    let block_map = |n_src: usize, n_tgt: usize, assign: &dyn Fn(usize) -> usize| -> ChainMap {
        let copies_src = k.levels[n_src].len();
        let copies_tgt = k.levels[n_tgt].len();
        let mut comps = BTreeMap::new();
        for qd in z.degrees() {
            let dim = z.dim(qd);
            let mut triples = Vec::with_capacity(copies_src * dim);
            for c in 0..copies_src {
                let t = assign(c);
                for i in 0..dim {
                    triples.push((t * dim + i, c * dim + i, q(1)));
                }
            }
            comps.insert(
                qd,
                Matrix::from_triples(copies_tgt * dim, copies_src * dim, &triples),
            );
        }
        ChainMap::from_comps(comps)
    };
    let mut faces = Vec::with_capacity(s + 1);
    let mut degens = Vec::with_capacity(s + 1);
    for n in 0..=s {
        if n == 0 {
            faces.push(Vec::new());
        } else {
            faces.push(
                (0..=n)
                    .map(|i| block_map(n, n - 1, &|c| k.face(n, i, c)))
                    .collect(),
            );
        }
        if n == s {
            degens.push(Vec::new());
        } else {
            degens.push(
                (0..=n)
                    .map(|j| block_map(n, n + 1, &|c| k.degen(n, j, c)))
                    .collect(),
            );
        }
    }
    SimplicialChainComplex::new(levels, faces, degens)
}

// ---------------------------------------------------------------------------
// Simplicial maps and homotopies
// ---------------------------------------------------------------------------

/// Verify a levelwise family as a simplicial map: chain maps commuting with
/// every face and degeneracy.
pub fn check_simplicial_map(
    x: &SimplicialChainComplex,
    y: &SimplicialChainComplex,
    comps: &[ChainMap],
) -> Result<(), Error> {
    if comps.len() != x.levels.len() || x.levels.len() != y.levels.len() {
        return Err(Error::invalid(
            "simplicial map",
            "one component per level required, levels matching",
        ));
    }
    let s = x.top_level();
    for n in 0..=s {
        comps[n].verify(&x.levels[n], &y.levels[n])?;
    }
    for n in 1..=s {
        for i in 0..=n {
            let lhs = y.faces[n][i].compose(&comps[n], &x.levels[n], &y.levels[n], &y.levels[n - 1]);
            let rhs = comps[n - 1].compose(&x.faces[n][i], &x.levels[n], &x.levels[n - 1], &y.levels[n - 1]);
            if let Some(qd) = chainmaps_differ(&lhs, &rhs, &x.levels[n], &y.levels[n - 1]) {
                return Err(Error::AxiomViolation {
                    check: "simplicial map".into(),
                    witness: format!("face {i} at level {n}, degree {qd}"),
                });
            }
        }
    }
    for n in 0..s {
        for j in 0..=n {
            let lhs = y.degens[n][j].compose(&comps[n], &x.levels[n], &y.levels[n], &y.levels[n + 1]);
            let rhs = comps[n + 1].compose(&x.degens[n][j], &x.levels[n], &x.levels[n + 1], &y.levels[n + 1]);
            if let Some(qd) = chainmaps_differ(&lhs, &rhs, &x.levels[n], &y.levels[n + 1]) {
                return Err(Error::AxiomViolation {
                    check: "simplicial map".into(),
                    witness: format!("degeneracy {j} at level {n}, degree {qd}"),
                });
            }
        }
    }
    Ok(())
}

/// The monotone 0/1 words of length `n+1` (the `n`-simplices of the
/// interval), ordered by their number of ones.
pub fn interval_words(n: usize) -> Vec<Vec<usize>> {
    (0..=n + 1)
        .map(|ones| {
            let mut w = vec![0usize; n + 1];
            for v in w.iter_mut().skip(n + 1 - ones) {
                *v = 1;
            }
            w
        })
        .collect()
}

/// Verify a simplicial homotopy from `f` to `g`: `h` is a family indexed by
/// interval words, one chain map `X_n -> Y_n` per word of length `n+1`,
/// subject to the copower compatibilities
/// `d_i h^w = h^{w . delta_i} d_i`, `s_j h^w = h^{w . sigma_j} s_j`,
/// with `h` at the constant-0 word equal to `f` and at the constant-1 word
/// equal to `g`. Returns false on a violated equation, an error on a
/// malformed family.
pub fn verify_simplicial_homotopy(
    x: &SimplicialChainComplex,
    y: &SimplicialChainComplex,
    f: &[ChainMap],
    g: &[ChainMap],
    h: &BTreeMap<Vec<usize>, ChainMap>,
) -> Result<bool, Error> {
    check_simplicial_map(x, y, f)?;
    check_simplicial_map(x, y, g)?;
    let s = x.top_level();
    for n in 0..=s {
        for w in interval_words(n) {
            if !h.contains_key(&w) {
                return Err(Error::invalid(
                    "simplicial homotopy",
                    format!("missing component for the interval word {w:?}"),
                ));
            }
        }
    }
    for n in 0..=s {
        for w in interval_words(n) {
            let hw = &h[&w];
            // malformed shapes are an error; a failed chain-map or
            // simplicial equation is an honest negative answer
            match hw.verify(&x.levels[n], &y.levels[n]) {
                Ok(()) => {}
                Err(e @ Error::DimensionMismatch { .. }) => return Err(e),
                Err(_) => return Ok(false),
            }
            // endpoints
            if w.iter().all(|&v| v == 0) {
                if chainmaps_differ(hw, &f[n], &x.levels[n], &y.levels[n]).is_some() {
                    return Ok(false);
                }
            }
            if w.iter().all(|&v| v == 1) {
                if chainmaps_differ(hw, &g[n], &x.levels[n], &y.levels[n]).is_some() {
                    return Ok(false);
                }
            }
            if n >= 1 {
                for i in 0..=n {
                    let mut wf = w.clone();
                    wf.remove(i);
                    let lhs = y.faces[n][i].compose(hw, &x.levels[n], &y.levels[n], &y.levels[n - 1]);
                    let rhs = h[&wf].compose(
                        &x.faces[n][i],
                        &x.levels[n],
                        &x.levels[n - 1],
                        &y.levels[n - 1],
                    );
                    if chainmaps_differ(&lhs, &rhs, &x.levels[n], &y.levels[n - 1]).is_some() {
                        return Ok(false);
                    }
                }
            }
            if n < s {
                for j in 0..=n {
                    let mut wd = w.clone();
                    wd.insert(j, w[j]);
                    let lhs = y.degens[n][j].compose(hw, &x.levels[n], &y.levels[n], &y.levels[n + 1]);
                    let rhs = h[&wd].compose(
                        &x.degens[n][j],
                        &x.levels[n],
                        &x.levels[n + 1],
                        &y.levels[n + 1],
                    );
                    if chainmaps_differ(&lhs, &rhs, &x.levels[n], &y.levels[n + 1]).is_some() {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// The induced map on realizations of a simplicial map: each component
/// restricts to the normalized parts, assembled blockwise on the totals.
pub fn realize_map(
    x: &SimplicialChainComplex,
    y: &SimplicialChainComplex,
    comps: &[ChainMap],
) -> Result<(ChainMap, ChainComplex, ChainComplex), Error> {
    check_simplicial_map(x, y, comps)?;
    let mx = moore(x)?;
    let my = moore(y)?;
    let s = x.top_level();
    // restricted blocks per column
    let mut blocks: Vec<BTreeMap<i64, Matrix>> = Vec::with_capacity(s + 1);
    for p in 0..=s {
        let mut bl = BTreeMap::new();
        for (&qd, sec) in &mx.sections[p] {
            let img = comps[p].comp(qd, &x.levels[p], &y.levels[p]).mul(sec);
            let m = match my.sections[p].get(&qd) {
                Some(tsec) => solve(tsec, &img).ok_or(Error::Unsolvable {
                    context: "restricting a simplicial map to the normalized parts".into(),
                    col: 0,
                })?,
                None => {
                    if !img.is_zero() {
                        return Err(Error::Unsolvable {
                            context: "restricting a simplicial map to the normalized parts".into(),
                            col: 0,
                        });
                    }
                    continue;
                }
            };
            bl.insert(qd, m);
        }
        blocks.push(bl);
    }
    let tx = mx.bicomplex.tot()?;
    let ty = my.bicomplex.tot()?;
    // assemble per total degree, blocks in ascending column order
    let mut comps_out: BTreeMap<i64, Matrix> = BTreeMap::new();
    for m in tx.degrees() {
        let rows = ty.dim(m);
        let mut triples: Vec<(usize, usize, Q)> = Vec::new();
        let mut coff = 0usize;
        let mut roff_by_p: BTreeMap<usize, usize> = BTreeMap::new();
        let mut roff = 0usize;
        for p in 0..=s {
            let qd = m - p as i64;
            roff_by_p.insert(p, roff);
            roff += my.bicomplex.columns[p].dim(qd);
        }
        for p in 0..=s {
            let qd = m - p as i64;
            let cdim = mx.bicomplex.columns[p].dim(qd);
            if cdim == 0 {
                continue;
            }
            if let Some(b) = blocks[p].get(&qd) {
                let ro = roff_by_p[&p];
                for c in 0..b.cols {
                    for (r, v) in b.col(c) {
                        triples.push((ro + r, coff + c, v.clone()));
                    }
                }
            }
            coff += cdim;
        }
        if !triples.is_empty() {
            comps_out.insert(m, Matrix::from_triples(rows, tx.dim(m), &triples));
        }
    }
    let out = ChainMap::from_comps(comps_out);
    out.verify(&tx, &ty)?;
    Ok((out, tx, ty))
}

/// Levelwise direct sum with the inclusion of the first summand.
pub fn direct_sum_with_inclusion(
    x: &SimplicialChainComplex,
    y: &SimplicialChainComplex,
) -> Result<(SimplicialChainComplex, Vec<ChainMap>), Error> {
    if x.levels.len() != y.levels.len() {
        return Err(Error::invalid(
            "simplicial direct sum",
            "level counts differ",
        ));
    }
    let s = x.top_level();
    let levels: Vec<ChainComplex> = (0..=s)
        .map(|n| ChainComplex::direct_sum(&x.levels[n], &y.levels[n]))
        .collect();
    let block = |n_src: usize, n_tgt: usize, fa: &ChainMap, fb: &ChainMap| -> ChainMap {
        let mut comps = BTreeMap::new();
        for qd in levels[n_src].degrees() {
            let ma = fa.comp(qd, &x.levels[n_src], &x.levels[n_tgt]);
            let mb = fb.comp(qd, &y.levels[n_src], &y.levels[n_tgt]);
            comps.insert(qd, Matrix::block_diag(&[&ma, &mb]));
        }
        ChainMap::from_comps(comps)
    };
    let mut faces = Vec::with_capacity(s + 1);
    let mut degens = Vec::with_capacity(s + 1);
    for n in 0..=s {
        if n == 0 {
            faces.push(Vec::new());
        } else {
            faces.push(
                (0..=n)
                    .map(|i| block(n, n - 1, &x.faces[n][i], &y.faces[n][i]))
                    .collect(),
            );
        }
        if n == s {
            degens.push(Vec::new());
        } else {
            degens.push(
                (0..=n)
                    .map(|j| block(n, n + 1, &x.degens[n][j], &y.degens[n][j]))
                    .collect(),
            );
        }
    }
    let sum = SimplicialChainComplex::new(levels, faces, degens)?;
    let mut incl = Vec::with_capacity(s + 1);
    for n in 0..=s {
        let mut comps = BTreeMap::new();
        for qd in x.levels[n].degrees() {
            let dim = x.levels[n].dim(qd);
            let rows = sum.levels[n].dim(qd);
            let triples: Vec<(usize, usize, Q)> =
                (0..dim).map(|i| (i, i, q(1))).collect();
            comps.insert(qd, Matrix::from_triples(rows, dim, &triples));
        }
        incl.push(ChainMap::from_comps(comps));
    }
    Ok((sum, incl))
}

// ---------------------------------------------------------------------------
// Building simplicial objects from prescribed normalized parts
// ---------------------------------------------------------------------------

/// Inverse construction to normalization: from a bicomplex, build the
/// simplicial object with `X_n` the sum over surjections `[n] ->> [k]` of
/// copies of column `k`. A face sends the `eta`-summand into the summand of
/// the epi part of `eta . delta_i`; the block is the identity when the mono
/// part is the identity, the horizontal differential when it omits exactly
/// the top element, and zero otherwise.
pub fn from_normalized(bi: &Bicomplex) -> Result<SimplicialChainComplex, Error> {
    let s = bi.columns.len() - 1;
    // summand tables: (k, degenerate positions) per level
    let summands: Vec<Vec<(usize, Vec<usize>)>> = (0..=s)
        .map(|n| {
            let mut v = Vec::new();
            for k in 0..=n {
                for degen in surjections(n, k) {
                    v.push((k, degen));
                }
            }
            v
        })
        .collect();
    let spos: Vec<BTreeMap<Vec<usize>, usize>> = summands
        .iter()
        .map(|lvl| {
            lvl.iter()
                .enumerate()
                .map(|(i, (_, d))| (d.clone(), i))
                .collect()
        })
        .collect();
    // level complexes: direct sums of columns
    let mut levels = Vec::with_capacity(s + 1);
    let mut offsets: Vec<BTreeMap<(usize, i64), usize>> = Vec::with_capacity(s + 1);
    for n in 0..=s {
        let mut bases: BTreeMap<i64, LevelBasis> = BTreeMap::new();
        let mut offs: BTreeMap<(usize, i64), usize> = BTreeMap::new();
        for (si, (k, _)) in summands[n].iter().enumerate() {
            let cx = &bi.columns[*k];
            for qd in cx.degrees() {
                let lb = cx.level(qd).unwrap();
                let entry = bases.entry(qd).or_insert_with(|| LevelBasis {
                    names: Vec::new(),
                    weights: Vec::new(),
                });
                offs.insert((si, qd), entry.names.len());
                entry
                    .names
                    .extend(lb.names.iter().map(|s| format!("e{si}:{s}")));
                entry.weights.extend(lb.weights.iter().copied());
            }
        }
        let mut diffs: BTreeMap<i64, Matrix> = BTreeMap::new();
        let degrees: Vec<i64> = bases.keys().copied().collect();
        for &qd in &degrees {
            let rows = bases.get(&(qd - 1)).map_or(0, |b| b.names.len());
            let cols = bases[&qd].names.len();
            let mut triples = Vec::new();
            for (si, (k, _)) in summands[n].iter().enumerate() {
                let d = bi.columns[*k].d(qd);
                if d.is_zero() {
                    continue;
                }
                let Some(&co) = offs.get(&(si, qd)) else { continue };
                let Some(&ro) = offs.get(&(si, qd - 1)) else { continue };
                for c in 0..d.cols {
                    for (r, v) in d.col(c) {
                        triples.push((ro + r, co + c, v.clone()));
                    }
                }
            }
            if !triples.is_empty() {
                diffs.insert(qd, Matrix::from_triples(rows, cols, &triples));
            }
        }
        levels.push(ChainComplex::new(bases, diffs)?);
        offsets.push(offs);
    }
    // structure maps
    let mut faces: Vec<Vec<ChainMap>> = Vec::with_capacity(s + 1);
    let mut degens: Vec<Vec<ChainMap>> = Vec::with_capacity(s + 1);
    for n in 0..=s {
        if n == 0 {
            faces.push(Vec::new());
        } else {
            let mut fs = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
                let degrees: Vec<i64> = levels[n].degrees().collect();
                for qd in degrees {
                    let rows = levels[n - 1].dim(qd);
                    let cols = levels[n].dim(qd);
                    let mut triples = Vec::new();
                    for (si, (k, degen)) in summands[n].iter().enumerate() {
                        let eta = surjection_values(n, degen);
                        // eta . delta_i on [n-1]
                        let mu: Vec<usize> = (0..=n - 1)
                            .map(|v| eta[if v < i { v } else { v + 1 }])
                            .collect();
                        let mut image = mu.clone();
                        image.dedup();
                        let k2 = image.len() - 1;
                        let eta2: Vec<usize> = mu
                            .iter()
                            .map(|v| image.binary_search(v).unwrap())
                            .collect();
                        let degen2: Vec<usize> =
                            (0..n - 1).filter(|&j| eta2[j] == eta2[j + 1]).collect();
                        let ti = spos[n - 1][&degen2];
                        debug_assert_eq!(summands[n - 1][ti].0, k2);
                        let block: Option<Matrix> = if k2 == *k {
                            Some(Matrix::identity(bi.columns[*k].dim(qd)))
                        } else if k2 + 1 == *k && image == (0..*k).collect::<Vec<_>>() {
                            Some(bi.horiz[*k].comp(qd, &bi.columns[*k], &bi.columns[k2]))
                        } else {
                            None
                        };
                        let Some(b) = block else { continue };
                        let Some(&co) = offsets[n].get(&(si, qd)) else { continue };
                        let Some(&ro) = offsets[n - 1].get(&(ti, qd)) else { continue };
                        for c in 0..b.cols {
                            for (r, v) in b.col(c) {
                                if !v.is_zero() {
                                    triples.push((ro + r, co + c, v.clone()));
                                }
                            }
                        }
                    }
                    comps.insert(qd, Matrix::from_triples(rows, cols, &triples));
                }
                fs.push(ChainMap::from_comps(comps));
            }
            faces.push(fs);
        }
        if n == s {
            degens.push(Vec::new());
        } else {
            let mut gs = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let mut comps: BTreeMap<i64, Matrix> = BTreeMap::new();
                let degrees: Vec<i64> = levels[n].degrees().collect();
                for qd in degrees {
                    let rows = levels[n + 1].dim(qd);
                    let cols = levels[n].dim(qd);
                    let mut triples = Vec::new();
                    for (si, (k, degen)) in summands[n].iter().enumerate() {
                        let eta = surjection_values(n, degen);
                        let mu: Vec<usize> = (0..=n + 1)
                            .map(|v| eta[if v <= j { v } else { v - 1 }])
                            .collect();
                        let degen2: Vec<usize> =
                            (0..n + 1).filter(|&jj| mu[jj] == mu[jj + 1]).collect();
                        let ti = spos[n + 1][&degen2];
                        debug_assert_eq!(summands[n + 1][ti].0, *k);
                        let dim = bi.columns[*k].dim(qd);
                        let Some(&co) = offsets[n].get(&(si, qd)) else { continue };
                        let Some(&ro) = offsets[n + 1].get(&(ti, qd)) else { continue };
                        for c in 0..dim {
                            triples.push((ro + c, co + c, q(1)));
                        }
                    }
                    comps.insert(qd, Matrix::from_triples(rows, cols, &triples));
                }
                gs.push(ChainMap::from_comps(comps));
            }
            degens.push(gs);
        }
    }
    SimplicialChainComplex::new(levels, faces, degens)
}

// ---------------------------------------------------------------------------
// Simplicial symmetric sequences
// ---------------------------------------------------------------------------

/// A simplicial symmetric sequence, stored arity-wise; every operation of
/// this module applies arity by arity.
#[derive(Debug, Clone)]
pub struct SimplicialSymSeq {
    pub arities: BTreeMap<usize, SimplicialChainComplex>,
}

impl SimplicialSymSeq {
    pub fn check_identities(&self) -> Result<(), Error> {
        for (&r, x) in &self.arities {
            check_identities_labeled(x, r)?;
        }
        Ok(())
    }

    /// Arity-wise realization with the common trustworthy window.
    pub fn realization(&self) -> Result<(BTreeMap<usize, ChainComplex>, i64), Error> {
        let mut out = BTreeMap::new();
        let mut window = i64::MAX;
        for (&r, x) in &self.arities {
            let (cx, w) = realization(x)?;
            window = window.min(w);
            out.insert(r, cx);
        }
        Ok((out, window))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::LevelBasis;

    fn dims_of(c: &ChainComplex) -> Vec<(i64, usize)> {
        c.degrees().map(|n| (n, c.dim(n))).collect()
    }

    fn two_step() -> ChainComplex {
        // 0 -> Q -(1)-> Q -> 0 with a weight-1 generator pair
        ChainComplex::new(
            [
                (0, LevelBasis::plain(vec!["a".into()])),
                (1, LevelBasis::plain(vec!["b".into()])),
            ]
            .into(),
            [(1, Matrix::from_triples(1, 1, &[(0, 0, q(1))]))].into(),
        )
        .unwrap()
    }

    fn point() -> ChainComplex {
        ChainComplex::concentrated("v", 0, 0)
    }

    fn sample_bicomplex() -> Bicomplex {
        // columns: N_0 = Q^2 (deg 0), N_1 = Q (deg 0) + Q (deg 1), N_2 = Q (deg 1)
        let c0 = ChainComplex::new(
            [(0, LevelBasis::plain(vec!["x".into(), "y".into()]))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        let c1 = ChainComplex::new(
            [
                (0, LevelBasis::plain(vec!["u".into()])),
                (1, LevelBasis::plain(vec!["w".into()])),
            ]
            .into(),
            BTreeMap::new(),
        )
        .unwrap();
        let c2 = ChainComplex::new(
            [(1, LevelBasis::plain(vec!["z".into()]))].into(),
            BTreeMap::new(),
        )
        .unwrap();
        // horiz[1]: N_1 -> N_0 sending u to x - y, w to 0
        let h1 = ChainMap::from_comps(
            [(0, Matrix::from_triples(2, 1, &[(0, 0, q(1)), (1, 0, q(-1))]))].into(),
        );
        // horiz[2]: N_2 -> N_1 sending z to 0 (so that h1 h2 = 0)
        let h2 = ChainMap::from_comps(BTreeMap::new());
        Bicomplex::new(vec![c0, c1, c2], vec![ChainMap::zero(), h1, h2]).unwrap()
    }

    #[test]
    fn constant_object_basics() {
        let z = two_step();
        let x = constant(&z, 3);
        check_simplicial_identities(&x).unwrap();
        let md = moore(&x).unwrap();
        assert_eq!(md.bicomplex.columns[0].total_dim(), 2);
        for p in 1..=3 {
            assert_eq!(md.bicomplex.columns[p].total_dim(), 0);
        }
        // realization has the homology of z
        let (tot, window) = realization(&x).unwrap();
        assert!(window >= 2);
        assert_eq!(tot.homology(), z.homology());
        // pi0 is z itself
        let p = pi0(&x).unwrap();
        assert_eq!(dims_of(&p), dims_of(&z));
        // the degenerate subobject is everything at positive levels
        let d = degenerate_subobject(&x, 2).unwrap();
        assert_eq!(d[&0].basis.cols, 1);
        assert_eq!(d[&1].basis.cols, 1);
    }

    #[test]
    fn gamma_round_trip() {
        let bi = sample_bicomplex();
        let x = from_normalized(&bi).unwrap();
        check_simplicial_identities(&x).unwrap();
        // level dimensions follow the surjection counts
        let dims: Vec<usize> = x.levels.iter().map(|c| c.total_dim()).collect();
        assert_eq!(dims, vec![2, 4, 7]);
        // Moore recovers the column dimensions
        let md = moore(&x).unwrap();
        let got: Vec<usize> = md.bicomplex.columns.iter().map(|c| c.total_dim()).collect();
        assert_eq!(got, vec![2, 2, 1]);
        let report = dold_kan_check(&x).unwrap();
        assert!(report.contains("level 2"));
        // homology of the realization equals homology of the input total
        let (tot, _) = realization(&x).unwrap();
        let expect = bi.tot().unwrap();
        assert_eq!(tot.homology(), expect.homology());
        // unnormalized totals agree inside the window
        let un = unnormalized_realization(&x).unwrap();
        let hu = un.homology();
        let hn = tot.homology();
        for m in 0..=1i64 {
            assert_eq!(hu.get(&m).copied().unwrap_or(0), hn.get(&m).copied().unwrap_or(0));
        }
    }

    #[test]
    fn mutated_face_fails_identities() {
        let bi = sample_bicomplex();
        let mut x = from_normalized(&bi).unwrap();
        let bad = x.faces[2][1].scale(&q(-1));
        x.faces[2][1] = bad;
        match check_simplicial_identities(&x) {
            Err(Error::SimplicialIdentity { identity, level, .. }) => {
                assert_eq!(level, 2);
                assert!(identity.contains("d_"));
            }
            other => panic!("expected located failure, got {other:?}"),
        }
    }

    #[test]
    fn dold_kan_counts() {
        let bi = sample_bicomplex();
        let x = from_normalized(&bi).unwrap();
        // dim X_2 = N_0 + 2 N_1 + N_2
        let n = &moore(&x).unwrap().bicomplex.columns;
        assert_eq!(
            x.levels[2].total_dim(),
            n[0].total_dim() + 2 * n[1].total_dim() + n[2].total_dim()
        );
    }

    #[test]
    fn copower_over_the_point_and_interval() {
        let z = two_step();
        let k0 = FiniteSimplicialSetModel::standard_simplex(0, 3);
        let x = copower(&z, &k0).unwrap();
        check_simplicial_identities(&x).unwrap();
        let (tot, _) = realization(&x).unwrap();
        assert_eq!(tot.homology(), z.homology());
        // the interval: pi0 recovers z
        let k1 = FiniteSimplicialSetModel::standard_simplex(1, 3);
        let x1 = copower(&z, &k1).unwrap();
        check_simplicial_identities(&x1).unwrap();
        let p = pi0(&x1).unwrap();
        assert_eq!(dims_of(&p), dims_of(&z));
        let (t1, _) = realization(&x1).unwrap();
        assert_eq!(t1.homology(), z.homology());
    }

    #[test]
    fn triangle_contraction_and_homotopy() {
        let z = point();
        let k2 = FiniteSimplicialSetModel::standard_simplex(2, 4);
        let x = copower(&z, &k2).unwrap();
        check_simplicial_identities(&x).unwrap();
        let cst = constant(&z, 4);
        // retraction to the constant object and inclusion at vertex 0
        let s = x.top_level();
        let r: Vec<ChainMap> = (0..=s)
            .map(|n| {
                let copies = k2.levels[n].len();
                let triples: Vec<(usize, usize, Q)> =
                    (0..copies).map(|c| (0, c, q(1))).collect();
                ChainMap::from_comps([(0, Matrix::from_triples(1, copies, &triples))].into())
            })
            .collect();
        let incl: Vec<ChainMap> = (0..=s)
            .map(|n| {
                let copies = k2.levels[n].len();
                let vertex0 = k2.index[n][&vec![0usize; n + 1]];
                ChainMap::from_comps(
                    [(0, Matrix::from_triples(copies, 1, &[(vertex0, 0, q(1))]))].into(),
                )
            })
            .collect();
        check_simplicial_map(&x, &cst, &r).unwrap();
        check_simplicial_map(&cst, &x, &incl).unwrap();
        // vertex-0 contraction: h(sigma, w)(k) = 0 where w(k) = 0, else sigma(k)
        let sr: Vec<ChainMap> = (0..=s)
            .map(|n| incl[n].compose(&r[n], &x.levels[n], &cst.levels[n], &x.levels[n]))
            .collect();
        let id: Vec<ChainMap> = (0..=s).map(|n| ChainMap::identity(&x.levels[n])).collect();
        let mut h = BTreeMap::new();
        for n in 0..=s {
            for w in interval_words(n) {
                let copies = k2.levels[n].len();
                let mut triples = Vec::with_capacity(copies);
                for (c, simplex) in k2.levels[n].iter().enumerate() {
                    let image: Vec<usize> = (0..=n)
                        .map(|pos| if w[pos] == 0 { 0 } else { simplex[pos] })
                        .collect();
                    triples.push((k2.index[n][&image], c, q(1)));
                }
                h.insert(
                    w,
                    ChainMap::from_comps(
                        [(0, Matrix::from_triples(copies, copies, &triples))].into(),
                    ),
                );
            }
        }
        assert!(verify_simplicial_homotopy(&x, &x, &sr, &id, &h).unwrap());
        // corrupting one component breaks the verification
        let mut bad = h.clone();
        let key = vec![0, 1, 1];
        let m = bad[&key].scale(&q(-1));
        bad.insert(key, m);
        assert!(!verify_simplicial_homotopy(&x, &x, &sr, &id, &bad).unwrap());
        // the realized retraction is a quasi-isomorphism
        let (rm, tx, ty) = realize_map(&x, &cst, &r).unwrap();
        let cone = crate::chain::mapping_cone(&rm, &tx, &ty);
        assert!(cone.is_acyclic());
    }

    #[test]
    fn realization_window_enforced() {
        let z = two_step();
        let x = constant(&z, 2);
        assert_eq!(trustworthy_window(&x), 1);
        assert!(realization_in_window(&x, 1).is_ok());
        match realization_in_window(&x, 5) {
            Err(Error::TruncationWindow { trustworthy, .. }) => assert_eq!(trustworthy, 1),
            other => panic!("expected window refusal, got {other:?}"),
        }
    }

    #[test]
    fn skeletal_filtration_dimensions() {
        let bi = sample_bicomplex();
        let x = from_normalized(&bi).unwrap();
        let md = moore(&x).unwrap();
        let full = md.bicomplex.tot().unwrap();
        // R_0 is the zeroth level complex of N, R_S the realization
        let r0 = skeletal_truncation(&x, 0).unwrap();
        assert_eq!(r0.total_dim(), md.bicomplex.columns[0].total_dim());
        let r2 = skeletal_truncation(&x, 2).unwrap();
        assert_eq!(dims_of(&r2), dims_of(&full));
        // quotient dimensions: dim R_n - dim R_{n-1} at total degree n+q
        // equals dim N X_n at internal degree q
        let r1 = skeletal_truncation(&x, 1).unwrap();
        for qd in md.bicomplex.columns[2].degrees() {
            let m = 2 + qd;
            assert_eq!(
                r2.dim(m) - r1.dim(m),
                md.bicomplex.columns[2].dim(qd)
            );
        }
        // stabilization: degrees <= D agree once n >= D + 1
        for m in 0..=0i64 {
            assert_eq!(r1.dim(m), full.dim(m));
        }
    }

    #[test]
    fn boundary_model_is_closed() {
        let b = FiniteSimplicialSetModel::boundary_simplex(2, 3);
        b.check().unwrap();
        // the boundary of the triangle is a circle: H_0 = H_1 = Q
        let x = copower(&point(), &b).unwrap();
        let (tot, window) = realization(&x).unwrap();
        assert!(window >= 1);
        let h = tot.homology();
        assert_eq!(h.get(&0), Some(&1));
        assert_eq!(h.get(&1), Some(&1));
    }

    #[test]
    fn realization_of_levelwise_inclusion() {
        // X constant, A with acyclic columns: the inclusion X -> X + A
        // realizes to a quasi-isomorphism with degreewise injective map
        let z = two_step();
        let x = constant(&point(), 2);
        let acyclic_col = z.clone();
        let bi = Bicomplex::new(
            vec![acyclic_col.clone(), ChainComplex::zero(), ChainComplex::zero()],
            vec![ChainMap::zero(), ChainMap::zero(), ChainMap::zero()],
        )
        .unwrap();
        let a = from_normalized(&bi).unwrap();
        let (sum, incl) = direct_sum_with_inclusion(&x, &a).unwrap();
        check_simplicial_identities(&sum).unwrap();
        let (f, tx, ty) = realize_map(&x, &sum, &incl).unwrap();
        let cone = crate::chain::mapping_cone(&f, &tx, &ty);
        let w = trustworthy_window(&x).min(trustworthy_window(&sum));
        for (m, h) in cone.homology() {
            if m <= w {
                assert_eq!(h, 0, "cone homology at degree {m}");
            }
        }
        for m in tx.degrees() {
            let mat = f.comp(m, &tx, &ty);
            assert_eq!(kernel_basis(&mat).basis.cols, 0);
        }
    }
}
