//! Finitely supported chain complexes of rational vector spaces.
//!
//! Indexing is homological: the differential `d_n` lowers degree from `n` to
//! `n - 1`, and `d^2 = 0` is verified at construction time. Every basis
//! element carries a name (for inspectable reports) and a weight; all stored
//! differentials must preserve weights, which is also verified at
//! construction.
//!
//! Sign conventions used by the whole crate:
//! * tensor differential: `d(x ⊗ y) = dx ⊗ y + (-1)^{|x|} x ⊗ dy`;
//! * mapping cone of `f : X → Y`: `cone(f)_n = Y_n ⊕ X_{n-1}` with
//!   `d(y, x) = (dy + f x, -dx)`;
//! * shift by `s`: `(c[s])_n = c_{n-s}` with differential scaled by `(-1)^s`.

use crate::error::Error;
use crate::linalg::{kernel_basis, rank, Matrix};
use crate::{q, Q};
use num::Zero;
use std::collections::BTreeMap;

/// Basis of one degree: parallel arrays of names and weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LevelBasis {
    pub names: Vec<String>,
    pub weights: Vec<u32>,
}

impl LevelBasis {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn plain(names: Vec<String>) -> Self {
        let weights = vec![0; names.len()];
        LevelBasis { names, weights }
    }
}

/// Betti numbers keyed by `(weight, degree)`.
pub type HomologyTable = BTreeMap<(u32, i64), usize>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainComplex {
    levels: BTreeMap<i64, LevelBasis>,
    /// `diffs[n] : level n -> level n-1`.
    diffs: BTreeMap<i64, Matrix>,
}

impl ChainComplex {
    pub fn zero() -> Self {
        ChainComplex::default()
    }

    /// One basis vector in a single degree.
    pub fn concentrated(name: &str, degree: i64, weight: u32) -> Self {
        let mut levels = BTreeMap::new();
        levels.insert(
            degree,
            LevelBasis {
                names: vec![name.to_string()],
                weights: vec![weight],
            },
        );
        ChainComplex {
            levels,
            diffs: BTreeMap::new(),
        }
    }

    pub fn new(
        levels: BTreeMap<i64, LevelBasis>,
        diffs: BTreeMap<i64, Matrix>,
    ) -> Result<Self, Error> {
        let mut levels: BTreeMap<i64, LevelBasis> = levels
            .into_iter()
            .filter(|(_, b)| b.dim() > 0)
            .collect();
        for b in levels.values_mut() {
            assert_eq!(b.names.len(), b.weights.len(), "ragged level basis");
        }
        let dim = |n: i64| levels.get(&n).map_or(0, |b| b.dim());
        let mut kept = BTreeMap::new();
        for (n, m) in diffs {
            if m.rows != dim(n - 1) || m.cols != dim(n) {
                return Err(Error::DimensionMismatch {
                    context: format!("differential at degree {n}"),
                    expected: format!("{}x{}", dim(n - 1), dim(n)),
                    found: format!("{}x{}", m.rows, m.cols),
                });
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        let cc = ChainComplex {
            levels,
            diffs: kept,
        };
        cc.verify_square_zero()?;
        cc.verify_weights()?;
        Ok(cc)
    }

    fn verify_square_zero(&self) -> Result<(), Error> {
        for (&n, d_n) in &self.diffs {
            if let Some(d_prev) = self.diffs.get(&(n - 1)) {
                let p = d_prev.mul(d_n);
                if !p.is_zero() {
                    for c in 0..p.cols {
                        if let Some((r, _)) = p.col(c).first() {
                            return Err(Error::DifferentialSquare {
                                degree: n,
                                row: *r,
                                col: c,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_weights(&self) -> Result<(), Error> {
        for (&n, d) in &self.diffs {
            let src = &self.levels[&n];
            let tgt = &self.levels[&(n - 1)];
            for c in 0..d.cols {
                for (r, _) in d.col(c) {
                    if tgt.weights[*r] != src.weights[c] {
                        return Err(Error::WeightMixing {
                            context: "chain differential".into(),
                            degree: n,
                            row: *r,
                            col: c,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self, n: i64) -> usize {
        self.levels.get(&n).map_or(0, |b| b.dim())
    }

    pub fn total_dim(&self) -> usize {
        self.levels.values().map(|b| b.dim()).sum()
    }

    pub fn level(&self, n: i64) -> Option<&LevelBasis> {
        self.levels.get(&n)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.levels.keys().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.levels.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.levels.keys().next_back().copied()
    }

    /// Differential out of degree `n` (zero matrix when absent).
    pub fn d(&self, n: i64) -> Matrix {
        match self.diffs.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.dim(n - 1), self.dim(n)),
        }
    }

    pub fn weights_at(&self, n: i64) -> Vec<u32> {
        self.levels.get(&n).map_or_else(Vec::new, |b| b.weights.clone())
    }

    /// Distinct weights present anywhere in the complex.
    pub fn weights(&self) -> Vec<u32> {
        let mut ws: Vec<u32> = self
            .levels
            .values()
            .flat_map(|b| b.weights.iter().copied())
            .collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// The weight-homogeneous subcomplex (a direct summand by construction).
    pub fn weight_part(&self, w: u32) -> ChainComplex {
        let mut levels = BTreeMap::new();
        let mut keep: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (&n, b) in &self.levels {
            let idx: Vec<usize> = (0..b.dim()).filter(|&i| b.weights[i] == w).collect();
            if !idx.is_empty() {
                levels.insert(
                    n,
                    LevelBasis {
                        names: idx.iter().map(|&i| b.names[i].clone()).collect(),
                        weights: vec![w; idx.len()],
                    },
                );
                keep.insert(n, idx);
            }
        }
        let mut diffs = BTreeMap::new();
        for (&n, d) in &self.diffs {
            let (Some(cols), Some(rows)) = (keep.get(&n), keep.get(&(n - 1))) else {
                continue;
            };
            let block = d
                .extract_block(rows, cols)
                .expect("weight structure verified at construction");
            diffs.insert(n, block);
        }
        ChainComplex { levels, diffs }
    }

    /// Betti numbers per degree, all weights together.
    pub fn homology(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &n in self.levels.keys() {
            let d_n = self.d(n);
            let d_next = self.d(n + 1);
            let h = self.dim(n) - rank(&d_n) - rank(&d_next);
            out.insert(n, h);
        }
        out.retain(|_, v| *v > 0);
        out
    }

    /// Betti numbers keyed by `(weight, degree)`; zero entries omitted.
    pub fn homology_by_weight(&self) -> HomologyTable {
        let mut out = HomologyTable::new();
        for w in self.weights() {
            let part = self.weight_part(w);
            for (n, h) in part.homology() {
                out.insert((w, n), h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.levels
            .iter()
            .map(|(&n, b)| {
                let s = b.dim() as i64;
                if n.rem_euclid(2) == 0 {
                    s
                } else {
                    -s
                }
            })
            .sum()
    }

    /// Kernel of `d_n` as a subspace of level `n`.
    pub fn cycles(&self, n: i64) -> crate::linalg::Subspace {
        kernel_basis(&self.d(n))
    }

    /// `(a ⊗ b)` with basis `(x ⊗ y)` ordered by (degree split, x index, y
    /// index); weights add.
    pub fn tensor(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
        let mut levels: BTreeMap<i64, LevelBasis> = BTreeMap::new();
        // position table: (n) -> list of (p, i, j) in basis order
        let mut index: BTreeMap<i64, Vec<(i64, usize, usize)>> = BTreeMap::new();
        for (&p, ba) in &a.levels {
            for (&qd, bb) in &b.levels {
                let n = p + qd;
                let level = levels.entry(n).or_default();
                let idx = index.entry(n).or_default();
                for i in 0..ba.dim() {
                    for j in 0..bb.dim() {
                        level
                            .names
                            .push(format!("({}⊗{})", ba.names[i], bb.names[j]));
                        level.weights.push(ba.weights[i] + bb.weights[j]);
                        idx.push((p, i, j));
                    }
                }
            }
        }
        let pos = |n: i64, p: i64, i: usize, j: usize| -> usize {
            index[&n]
                .iter()
                .position(|&(pp, ii, jj)| (pp, ii, jj) == (p, i, j))
                .expect("tensor index")
        };
        let mut diffs = BTreeMap::new();
        for (&n, idx) in &index {
            if !index.contains_key(&(n - 1)) {
                continue;
            }
            let mut triples = Vec::new();
            for (c, &(p, i, j)) in idx.iter().enumerate() {
                let qd = n - p;
                // dx ⊗ y
                let da = a.d(p);
                for (r, v) in da.col(i) {
                    triples.push((pos(n - 1, p - 1, *r, j), c, v.clone()));
                }
                // (-1)^p x ⊗ dy
                let db = b.d(qd);
                let sign = if p.rem_euclid(2) == 0 { q(1) } else { q(-1) };
                for (r, v) in db.col(j) {
                    triples.push((pos(n - 1, p, i, *r), c, &sign * v));
                }
            }
            let rows = index[&(n - 1)].len();
            diffs.insert(n, Matrix::from_triples(rows, idx.len(), &triples));
        }
        ChainComplex::new(levels, diffs).expect("tensor differential squares to zero")
    }

    pub fn shift(&self, s: i64) -> ChainComplex {
        let levels = self
            .levels
            .iter()
            .map(|(&n, b)| (n + s, b.clone()))
            .collect();
        let sign = if s.rem_euclid(2) == 0 { q(1) } else { q(-1) };
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, m)| (n + s, m.scale(&sign)))
            .collect();
        ChainComplex { levels, diffs }
    }

    pub fn direct_sum(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
        let mut levels: BTreeMap<i64, LevelBasis> = BTreeMap::new();
        let degrees: Vec<i64> = a
            .levels
            .keys()
            .chain(b.levels.keys())
            .copied()
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        for &n in &degrees {
            let mut names = Vec::new();
            let mut weights = Vec::new();
            if let Some(x) = a.levels.get(&n) {
                names.extend(x.names.iter().map(|s| format!("l:{s}")));
                weights.extend(x.weights.iter().copied());
            }
            if let Some(x) = b.levels.get(&n) {
                names.extend(x.names.iter().map(|s| format!("r:{s}")));
                weights.extend(x.weights.iter().copied());
            }
            levels.insert(n, LevelBasis { names, weights });
        }
        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            let da = a.d(n);
            let db = b.d(n);
            if da.is_zero() && db.is_zero() {
                continue;
            }
            diffs.insert(n, Matrix::block_diag(&[&da, &db]));
        }
        ChainComplex::new(levels, diffs).expect("direct sum of complexes")
    }
}

/// Degree-zero chain map stored as one matrix per degree (missing = zero).
/// Source and target are passed in on verification so maps stay lightweight.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainMap {
    pub comps: BTreeMap<i64, Matrix>,
}

impl ChainMap {
    pub fn zero() -> Self {
        ChainMap::default()
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let comps = c
            .degrees()
            .map(|n| (n, Matrix::identity(c.dim(n))))
            .collect();
        ChainMap { comps }
    }

    pub fn from_comps(comps: BTreeMap<i64, Matrix>) -> Self {
        let comps = comps.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        ChainMap { comps }
    }

    pub fn comp(&self, n: i64, src: &ChainComplex, tgt: &ChainComplex) -> Matrix {
        match self.comps.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(tgt.dim(n), src.dim(n)),
        }
    }

    /// Shape compatibility and commutation with the differentials.
    pub fn verify(&self, src: &ChainComplex, tgt: &ChainComplex) -> Result<(), Error> {
        for (&n, m) in &self.comps {
            if m.rows != tgt.dim(n) || m.cols != src.dim(n) {
                return Err(Error::DimensionMismatch {
                    context: format!("chain map component at degree {n}"),
                    expected: format!("{}x{}", tgt.dim(n), src.dim(n)),
                    found: format!("{}x{}", m.rows, m.cols),
                });
            }
        }
        let degrees: std::collections::BTreeSet<i64> = src.degrees().collect();
        for &n in &degrees {
            let lhs = tgt.d(n).mul(&self.comp(n, src, tgt));
            let rhs = self.comp(n - 1, src, tgt).mul(&src.d(n));
            if lhs != rhs {
                return Err(Error::NotChainMap {
                    degree: n,
                    context: "f d != d f".into(),
                });
            }
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(
        &self,
        other: &ChainMap,
        other_src: &ChainComplex,
        mid: &ChainComplex,
        tgt: &ChainComplex,
    ) -> ChainMap {
        let mut comps = BTreeMap::new();
        let degrees: std::collections::BTreeSet<i64> = other_src.degrees().collect();
        for &n in &degrees {
            let m = self.comp(n, mid, tgt).mul(&other.comp(n, other_src, mid));
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        ChainMap { comps }
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        let mut comps = self.comps.clone();
        for (&n, m) in &other.comps {
            match comps.get_mut(&n) {
                Some(x) => {
                    let s = x.add(m);
                    if s.is_zero() {
                        comps.remove(&n);
                    } else {
                        *x = s;
                    }
                }
                None => {
                    comps.insert(n, m.clone());
                }
            }
        }
        ChainMap { comps }
    }

    pub fn scale(&self, s: &Q) -> ChainMap {
        if s.is_zero() {
            return ChainMap::zero();
        }
        ChainMap {
            comps: self.comps.iter().map(|(&n, m)| (n, m.scale(s))).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_zero())
    }
}

/// `cone(f)_n = Y_n ⊕ X_{n-1}`, `d(y, x) = (dy + f x, -dx)`.
/// Acyclic exactly when `f` is a quasi-isomorphism.
pub fn mapping_cone(f: &ChainMap, src: &ChainComplex, tgt: &ChainComplex) -> ChainComplex {
    let degrees: std::collections::BTreeSet<i64> = tgt
        .degrees()
        .chain(src.degrees().map(|n| n + 1))
        .collect();
    let mut levels: BTreeMap<i64, LevelBasis> = BTreeMap::new();
    for &n in &degrees {
        let mut names = Vec::new();
        let mut weights = Vec::new();
        if let Some(b) = tgt.level(n) {
            names.extend(b.names.iter().map(|s| format!("t:{s}")));
            weights.extend(b.weights.iter().copied());
        }
        if let Some(b) = src.level(n - 1) {
            names.extend(b.names.iter().map(|s| format!("s:{s}")));
            weights.extend(b.weights.iter().copied());
        }
        if !names.is_empty() {
            levels.insert(n, LevelBasis { names, weights });
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        let ty = tgt.dim(n);
        let sx = src.dim(n - 1);
        let ty1 = tgt.dim(n - 1);
        let sx1 = src.dim(n - 2);
        if ty + sx == 0 || ty1 + sx1 == 0 {
            continue;
        }
        let dy = tgt.d(n);
        let fx = f.comp(n - 1, src, tgt);
        let dx = src.d(n - 1).neg();
        let top = dy.hstack(&fx);
        let bottom = Matrix::zero(sx1, ty).hstack(&dx);
        diffs.insert(n, top.vstack(&bottom));
    }
    ChainComplex::new(levels, diffs).expect("mapping cone differential squares to zero")
}

/// Quasi-isomorphism test by acyclicity of the mapping cone.
pub fn is_quasi_iso(f: &ChainMap, src: &ChainComplex, tgt: &ChainComplex) -> bool {
    mapping_cone(f, src, tgt).is_acyclic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn interval() -> ChainComplex {
        // Q --1--> Q in degrees 1 -> 0 (acyclic)
        let mut levels = BTreeMap::new();
        levels.insert(0, LevelBasis::plain(vec!["e0".into()]));
        levels.insert(1, LevelBasis::plain(vec!["e1".into()]));
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::from_dense(&[vec![q(1)]]));
        ChainComplex::new(levels, diffs).unwrap()
    }

    fn circle() -> ChainComplex {
        // simplicial circle: two vertices, two edges
        let mut levels = BTreeMap::new();
        levels.insert(0, LevelBasis::plain(vec!["v0".into(), "v1".into()]));
        levels.insert(1, LevelBasis::plain(vec!["a".into(), "b".into()]));
        let mut diffs = BTreeMap::new();
        diffs.insert(
            1,
            Matrix::from_dense(&[vec![q(-1), q(-1)], vec![q(1), q(1)]]),
        );
        ChainComplex::new(levels, diffs).unwrap()
    }

    #[test]
    fn square_nonzero_is_rejected() {
        let mut levels = BTreeMap::new();
        for n in 0..3 {
            levels.insert(n, LevelBasis::plain(vec![format!("x{n}")]));
        }
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::from_dense(&[vec![q(1)]]));
        diffs.insert(2, Matrix::from_dense(&[vec![q(1)]]));
        assert!(matches!(
            ChainComplex::new(levels, diffs),
            Err(Error::DifferentialSquare { .. })
        ));
    }

    #[test]
    fn homology_of_circle_and_interval() {
        let c = circle();
        let h = c.homology();
        assert_eq!(h.get(&0), Some(&1));
        assert_eq!(h.get(&1), Some(&1));
        assert!(interval().is_acyclic());
    }

    #[test]
    fn tensor_koszul_sign_gives_square_zero_and_acyclicity() {
        let i = interval();
        let t = ChainComplex::tensor(&i, &i);
        assert_eq!(t.dim(0), 1);
        assert_eq!(t.dim(1), 2);
        assert_eq!(t.dim(2), 1);
        assert!(t.is_acyclic());

        let c = circle();
        let torus_like = ChainComplex::tensor(&c, &c);
        let h = torus_like.homology();
        assert_eq!(h.get(&0), Some(&1));
        assert_eq!(h.get(&1), Some(&2));
        assert_eq!(h.get(&2), Some(&1));
        // Euler characteristic is multiplicative
        assert_eq!(
            torus_like.euler_characteristic(),
            c.euler_characteristic() * c.euler_characteristic()
        );
    }

    #[test]
    fn cone_detects_quasi_isomorphisms() {
        let c = circle();
        let id = ChainMap::identity(&c);
        assert!(is_quasi_iso(&id, &c, &c));

        let zero_to_c = ChainMap::zero();
        let z = ChainComplex::zero();
        assert!(!is_quasi_iso(&zero_to_c, &z, &c));
        // cone of zero map out of zero complex is the target itself
        let cone = mapping_cone(&zero_to_c, &z, &c);
        assert_eq!(cone.homology(), c.homology());
    }

    #[test]
    fn shift_moves_degrees_and_flips_sign() {
        let i = interval();
        let s = i.shift(3);
        assert_eq!(s.dim(3), 1);
        assert_eq!(s.dim(4), 1);
        assert_eq!(s.d(4), Matrix::from_dense(&[vec![q(-1)]]));
        assert!(s.is_acyclic());
        // homology of shifted circle moves accordingly
        let c = circle().shift(2);
        let h = c.homology();
        assert_eq!(h.get(&2), Some(&1));
        assert_eq!(h.get(&3), Some(&1));
    }

    #[test]
    fn direct_sum_adds_homology() {
        let c = circle();
        let s = ChainComplex::direct_sum(&c, &c);
        let h = s.homology();
        assert_eq!(h.get(&0), Some(&2));
        assert_eq!(h.get(&1), Some(&2));
    }

    #[test]
    fn weights_split_homology() {
        let mut levels = BTreeMap::new();
        levels.insert(
            0,
            LevelBasis {
                names: vec!["a".into(), "b".into()],
                weights: vec![1, 2],
            },
        );
        levels.insert(
            1,
            LevelBasis {
                names: vec!["c".into()],
                weights: vec![2],
            },
        );
        let mut diffs = BTreeMap::new();
        diffs.insert(
            1,
            Matrix::from_dense(&[vec![q(0)], vec![q(1)]]),
        );
        let cc = ChainComplex::new(levels, diffs).unwrap();
        let by_w = cc.homology_by_weight();
        assert_eq!(by_w.get(&(1, 0)), Some(&1));
        assert_eq!(by_w.get(&(2, 0)), None);
        assert_eq!(by_w.get(&(2, 1)), None);

        // weight-mixing differential is rejected
        let mut levels = BTreeMap::new();
        levels.insert(
            0,
            LevelBasis {
                names: vec!["a".into()],
                weights: vec![1],
            },
        );
        levels.insert(
            1,
            LevelBasis {
                names: vec!["c".into()],
                weights: vec![2],
            },
        );
        let mut diffs = BTreeMap::new();
        diffs.insert(1, Matrix::from_dense(&[vec![q(1)]]));
        assert!(matches!(
            ChainComplex::new(levels, diffs),
            Err(Error::WeightMixing { .. })
        ));
    }

    #[test]
    fn chain_map_verification() {
        let i = interval();
        let c = circle();
        // fold map interval -> circle: e1 -> a, e0 -> v1 - ... must commute.
        // d(a) = v1 - v0, f(e0) must equal f(d e1) = v1 - v0... choose
        // f(e0) = v1 - v0, f(e1) = a.
        let mut comps = BTreeMap::new();
        comps.insert(0, Matrix::from_dense(&[vec![q(-1)], vec![q(1)]]));
        comps.insert(1, Matrix::from_dense(&[vec![q(1)], vec![q(0)]]));
        let f = ChainMap::from_comps(comps);
        f.verify(&i, &c).unwrap();

        let mut bad = BTreeMap::new();
        bad.insert(0, Matrix::from_dense(&[vec![q(1)], vec![q(1)]]));
        bad.insert(1, Matrix::from_dense(&[vec![q(1)], vec![q(0)]]));
        let g = ChainMap::from_comps(bad);
        assert!(g.verify(&i, &c).is_err());
    }
}
