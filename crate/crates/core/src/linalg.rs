//! Sparse exact linear algebra over the rationals.
//!
//! Matrices are stored column-major as sorted `(row, coefficient)` lists with
//! no explicit zeros. All eliminations are exact; there is no pivot-size
//! heuristic beyond taking the smallest available row, which keeps results
//! deterministic for a given input.

use crate::error::Error;
use crate::{q, Q};
use num::Zero;
use std::collections::BTreeMap;

/// Sparse column: sorted by row index, zero coefficients never stored.
pub type Col = Vec<(usize, Q)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Col>,
}

/// `a + s * b` for sorted sparse columns.
pub fn col_add_scaled(a: &Col, b: &Col, s: &Q) -> Col {
    if s.is_zero() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, s * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + s * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, q(1))]).collect();
        Matrix {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Build from `(row, col, coeff)` triples; repeated positions accumulate.
    pub fn from_triples(rows: usize, cols: usize, triples: &[(usize, usize, Q)]) -> Self {
        let mut maps: Vec<BTreeMap<usize, Q>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triples {
            assert!(*r < rows && *c < cols, "triple out of bounds");
            let e = maps[*c].entry(*r).or_insert_with(Q::zero);
            *e += v;
        }
        let data = maps
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Matrix { rows, cols, data }
    }

    pub fn from_cols(rows: usize, cols: Vec<Col>) -> Self {
        for c in &cols {
            debug_assert!(c.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(c.iter().all(|(r, v)| *r < rows && !v.is_zero()));
        }
        Matrix {
            rows,
            cols: cols.len(),
            data: cols,
        }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = vec![Vec::new(); c];
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    data[j].push((i, v.clone()));
                }
            }
        }
        Matrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn col(&self, j: usize) -> &Col {
        &self.data[j]
    }

    pub fn set_col(&mut self, j: usize, col: Col) {
        debug_assert!(col.iter().all(|(r, v)| *r < self.rows && !v.is_zero()));
        self.data[j] = col;
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        match self.data[c].binary_search_by_key(&r, |(i, _)| *i) {
            Ok(k) => self.data[c][k].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_empty())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&q(-1))
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        if s.is_zero() {
            return Matrix::zero(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|c| c.iter().map(|(r, v)| (*r, s * v)).collect())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let one = q(1);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| col_add_scaled(a, b, &one))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let minus = q(-1);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| col_add_scaled(a, b, &minus))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let data = other
            .data
            .iter()
            .map(|bcol| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, bv) in bcol {
                    for (r, av) in &self.data[*k] {
                        let e = acc.entry(*r).or_insert_with(Q::zero);
                        *e += av * bv;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn apply(&self, v: &Col) -> Col {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (k, bv) in v {
            for (r, av) in &self.data[*k] {
                let e = acc.entry(*r).or_insert_with(Q::zero);
                *e += av * bv;
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![Vec::new(); self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                data[*r].push((j, v.clone()));
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        }
    }

    /// `[self; other]` stacked vertically.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| {
                let mut col = a.clone();
                col.extend(b.iter().map(|(r, v)| (r + self.rows, v.clone())));
                col
            })
            .collect();
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(cols);
        let mut roff = 0;
        for b in blocks {
            for col in &b.data {
                data.push(col.iter().map(|(r, v)| (r + roff, v.clone())).collect());
            }
            roff += b.rows;
        }
        Matrix { rows, cols, data }
    }

    /// Kronecker product with row index `ia * b.rows + ib` and column index
    /// `ja * b.cols + jb`.
    pub fn kron(&self, b: &Matrix) -> Matrix {
        let rows = self.rows * b.rows;
        let cols = self.cols * b.cols;
        let mut data = Vec::with_capacity(cols);
        for ja in 0..self.cols {
            for jb in 0..b.cols {
                let mut col = Vec::new();
                for (ra, va) in &self.data[ja] {
                    for (rb, vb) in &b.data[jb] {
                        col.push((ra * b.rows + rb, va * vb));
                    }
                }
                col.sort_by_key(|(r, _)| *r);
                data.push(col);
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn select_cols(&self, indices: &[usize]) -> Matrix {
        let data = indices.iter().map(|&j| self.data[j].clone()).collect();
        Matrix {
            rows: self.rows,
            cols: indices.len(),
            data,
        }
    }

    /// Restrict to the given sorted row/column subsets. Fails with the
    /// offending entry if a kept column has support outside the kept rows.
    pub fn extract_block(
        &self,
        rows_keep: &[usize],
        cols_keep: &[usize],
    ) -> Result<Matrix, (usize, usize)> {
        let rmap: BTreeMap<usize, usize> = rows_keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let mut data = Vec::with_capacity(cols_keep.len());
        for &j in cols_keep {
            let mut col = Vec::new();
            for (r, v) in &self.data[j] {
                match rmap.get(r) {
                    Some(&nr) => col.push((nr, v.clone())),
                    None => return Err((*r, j)),
                }
            }
            data.push(col);
        }
        Ok(Matrix {
            rows: rows_keep.len(),
            cols: cols_keep.len(),
            data,
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols]; self.rows];
        for (j, col) in self.data.iter().enumerate() {
            for (r, v) in col {
                out[*r][j] = v.clone();
            }
        }
        out
    }
}

/// Column-echelon eliminator with combination tracking.
///
/// Feeding columns one at a time builds an echelon basis of their span; each
/// echelon column remembers how it arises from the fed columns, which gives
/// kernels and solutions of linear systems without a second pass.
struct Eliminator {
    rows: usize,
    /// pivot row -> (echelon column with leading coefficient 1, combination)
    pivots: BTreeMap<usize, (Col, Col)>,
    fed: usize,
}

impl Eliminator {
    fn new(rows: usize) -> Self {
        Eliminator {
            rows,
            pivots: BTreeMap::new(),
            fed: 0,
        }
    }

    /// Reduce `col` against the current pivots. Returns the residual and the
    /// coefficients of the pivots used, as a column over the fed indices.
    fn reduce(&self, col: &Col) -> (Col, Col) {
        let mut cur = col.clone();
        let mut combo: Col = Vec::new();
        loop {
            let lead = match cur.first() {
                Some((r, _)) => *r,
                None => break,
            };
            match self.pivots.get(&lead) {
                Some((pcol, pcombo)) => {
                    let c = cur[0].1.clone();
                    let minus = -c;
                    cur = col_add_scaled(&cur, pcol, &minus);
                    combo = col_add_scaled(&combo, pcombo, &minus);
                }
                None => break,
            }
        }
        (cur, combo)
    }

    /// Feed one column. Returns `Some(kernel_combo)` when the column is a
    /// combination of earlier ones (the combo includes the fed column itself
    /// with coefficient 1), `None` when it created a new pivot.
    fn feed(&mut self, col: &Col) -> Option<Col> {
        let idx = self.fed;
        self.fed += 1;
        let (residual, combo) = self.reduce(col);
        let selfterm = vec![(idx, q(1))];
        let combo = col_add_scaled(&combo, &selfterm, &q(1));
        match residual.first() {
            None => Some(combo),
            Some((lead, lv)) => {
                let lead = *lead;
                debug_assert!(lead < self.rows);
                let inv = q(1) / lv.clone();
                let normal = residual.iter().map(|(r, v)| (*r, &inv * v)).collect();
                let ncombo = combo.iter().map(|(r, v)| (*r, &inv * v)).collect();
                self.pivots.insert(lead, (normal, ncombo));
                None
            }
        }
    }
}

pub fn rank(m: &Matrix) -> usize {
    let mut e = Eliminator::new(m.rows);
    let mut rank = 0;
    for j in 0..m.cols {
        if e.feed(m.col(j)).is_none() {
            rank += 1;
        }
    }
    rank
}

/// Basis of `ker m` as a subspace of `Q^cols`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let mut e = Eliminator::new(m.rows);
    let mut kernel: Vec<Col> = Vec::new();
    for j in 0..m.cols {
        if let Some(combo) = e.feed(m.col(j)) {
            kernel.push(combo);
        }
    }
    Subspace {
        ambient: m.cols,
        basis: Matrix::from_cols(m.cols, kernel),
    }
}

/// Indices of a maximal independent set of columns, in increasing order.
pub fn pivot_columns(m: &Matrix) -> Vec<usize> {
    let mut e = Eliminator::new(m.rows);
    let mut out = Vec::new();
    for j in 0..m.cols {
        if e.feed(m.col(j)).is_none() {
            out.push(j);
        }
    }
    out
}

/// Basis of the column space.
pub fn image_basis(m: &Matrix) -> Subspace {
    let cols = pivot_columns(m);
    Subspace {
        ambient: m.rows,
        basis: m.select_cols(&cols),
    }
}

/// Solve `a * x = b` for all columns of `b` simultaneously.
/// Returns `None` when some column is inconsistent.
pub fn solve(a: &Matrix, b: &Matrix) -> Option<Matrix> {
    assert_eq!(a.rows, b.rows, "solve: row mismatch");
    let mut e = Eliminator::new(a.rows);
    for j in 0..a.cols {
        e.feed(a.col(j));
    }
    let mut xcols = Vec::with_capacity(b.cols);
    for j in 0..b.cols {
        let (residual, combo) = e.reduce(b.col(j));
        if !residual.is_empty() {
            return None;
        }
        // b_j = -combo over a's columns.
        let x: Col = combo.iter().map(|(r, v)| (*r, -v.clone())).collect();
        xcols.push(x);
    }
    Some(Matrix::from_cols(a.cols, xcols))
}

/// A subspace of `Q^ambient` presented by an independent-column basis matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Matrix,
}

impl Subspace {
    /// Wrap a basis matrix, verifying independence of its columns.
    pub fn new(ambient: usize, basis: Matrix) -> Result<Self, Error> {
        assert_eq!(basis.rows, ambient);
        if rank(&basis) != basis.cols {
            return Err(Error::invalid(
                "Subspace::new",
                "basis columns are linearly dependent",
            ));
        }
        Ok(Subspace { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zero(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    pub fn contains(&self, v: &Col) -> bool {
        let b = Matrix::from_cols(self.ambient, vec![v.clone()]);
        solve(&self.basis, &b).is_some()
    }
}

/// `dim(total) - dim(sub)` after verifying `sub ⊆ total`.
pub fn quotient_dim(sub: &Subspace, total: &Subspace) -> Result<usize, Error> {
    if sub.ambient != total.ambient {
        return Err(Error::DimensionMismatch {
            context: "quotient_dim".into(),
            expected: total.ambient.to_string(),
            found: sub.ambient.to_string(),
        });
    }
    if solve(&total.basis, &sub.basis).is_none() {
        // locate a generator outside `total` for the report
        for j in 0..sub.basis.cols {
            let one = Matrix::from_cols(sub.ambient, vec![sub.basis.col(j).clone()]);
            if solve(&total.basis, &one).is_none() {
                return Err(Error::ContainmentViolation {
                    context: "quotient_dim".into(),
                    index: j,
                });
            }
        }
        unreachable!("containment failed but every generator is inside");
    }
    Ok(total.dim() - sub.dim())
}

/// Image of an idempotent `p` together with a section `s` (ambient x d) and a
/// retraction `r` (d x ambient) satisfying `r s = 1` and `s r = p`.
pub fn projector_image(p: &Matrix) -> Result<(Subspace, Matrix, Matrix), Error> {
    assert_eq!(p.rows, p.cols, "projector must be square");
    let p2 = p.mul(p);
    if p2 != *p {
        let bad = (0..p.cols)
            .find(|&j| p2.col(j) != p.col(j))
            .unwrap_or(0);
        return Err(Error::NotIdempotent { col: bad });
    }
    let cols = pivot_columns(p);
    let section = p.select_cols(&cols);
    let retraction = solve(&section, p).ok_or(Error::Unsolvable {
        context: "projector_image retraction".into(),
        col: 0,
    })?;
    debug_assert_eq!(retraction.mul(&section), Matrix::identity(cols.len()));
    let image = Subspace {
        ambient: p.rows,
        basis: section.clone(),
    };
    Ok((image, section, retraction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qr;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent dense elimination used as an oracle: textbook row
    /// reduction with partial (first nonzero) pivoting, no sparsity tricks.
    fn dense_rank(rows: &[Vec<Q>]) -> usize {
        let mut m: Vec<Vec<Q>> = rows.to_vec();
        let nr = m.len();
        let nc = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        let mut row = 0;
        for col in 0..nc {
            let mut piv = None;
            for r in row..nr {
                if !m[r][col].is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => continue,
            };
            m.swap(row, piv);
            let lead = m[row][col].clone();
            for c in col..nc {
                let v = m[row][c].clone() / lead.clone();
                m[row][c] = v;
            }
            for r in 0..nr {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..nc {
                        let v = m[r][c].clone() - f.clone() * m[row][c].clone();
                        m[r][c] = v;
                    }
                }
            }
            row += 1;
            rank += 1;
            if row == nr {
                break;
            }
        }
        rank
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let mut triples = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(0.4) {
                    let num = rng.gen_range(-4i64..=4);
                    let den = rng.gen_range(1i64..=3);
                    if num != 0 {
                        triples.push((r, c, qr(num, den)));
                    }
                }
            }
        }
        Matrix::from_triples(rows, cols, &triples)
    }

    #[test]
    fn rank_matches_dense_oracle_and_nullity_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let rows = rng.gen_range(0..=7);
            let cols = rng.gen_range(0..=7);
            let m = random_matrix(&mut rng, rows, cols);
            let r = rank(&m);
            assert_eq!(r, dense_rank(&m.to_dense()));
            let k = kernel_basis(&m);
            assert_eq!(r + k.dim(), cols, "rank-nullity");
            // kernel columns are killed by m
            assert!(m.mul(&k.basis).is_zero());
            // and independent
            assert_eq!(rank(&k.basis), k.dim());
        }
    }

    #[test]
    fn solve_roundtrip_and_inconsistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=6);
            let inner = rng.gen_range(0..=5);
            let cols = rng.gen_range(0..=5);
            let a = random_matrix(&mut rng, rows, inner);
            let x = random_matrix(&mut rng, inner, cols);
            let b = a.mul(&x);
            let sol = solve(&a, &b).expect("consistent by construction");
            assert_eq!(a.mul(&sol), b);
        }
        // x + y = 1, x + y = 2 is inconsistent
        let a = Matrix::from_dense(&[vec![q(1)], vec![q(1)]]);
        let b = Matrix::from_dense(&[vec![q(1)], vec![q(2)]]);
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn projector_image_contract() {
        // projection onto the line spanned by (1, 1) along (1, -1)
        let half = qr(1, 2);
        let p = Matrix::from_dense(&[
            vec![half.clone(), half.clone()],
            vec![half.clone(), half.clone()],
        ]);
        let (im, s, r) = projector_image(&p).unwrap();
        assert_eq!(im.dim(), 1);
        assert_eq!(r.mul(&s), Matrix::identity(1));
        assert_eq!(s.mul(&r), p);

        // non-idempotent input is rejected
        let m = Matrix::from_dense(&[vec![q(1), q(1)], vec![q(0), q(1)]]);
        assert!(matches!(
            projector_image(&m),
            Err(Error::NotIdempotent { .. })
        ));

        // idempotents of every rank on a 3-dim space via s r construction
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let d = rng.gen_range(0..=3);
            // random full-rank 3x3 change of basis
            let mut basis;
            loop {
                basis = random_matrix(&mut rng, 3, 3);
                if rank(&basis) == 3 {
                    break;
                }
            }
            let sec = basis.select_cols(&(0..d).collect::<Vec<_>>());
            let ret = solve(&sec, &Matrix::identity(3));
            // sec has a left inverse iff d <= 3 and columns independent: use
            // pseudo-style retraction built from solve on [sec | complement]
            if let Some(full_inv) = solve(&basis, &Matrix::identity(3)) {
                let ret = ret.unwrap_or_else(|| {
                    full_inv.extract_block(&(0..d).collect::<Vec<_>>(), &(0..3).collect::<Vec<_>>())
                        .unwrap_or_else(|_| {
                            Matrix::from_cols(
                                d,
                                (0..3).map(|j| {
                                    full_inv.col(j).iter().filter(|(r, _)| *r < d).cloned().collect()
                                }).collect(),
                            )
                        })
                });
                let p = sec.mul(&ret);
                if p.mul(&p) == p {
                    let (im, s2, r2) = projector_image(&p).unwrap();
                    assert_eq!(im.dim(), rank(&p));
                    assert_eq!(r2.mul(&s2), Matrix::identity(im.dim()));
                    assert_eq!(s2.mul(&r2), p);
                }
            }
        }
    }

    #[test]
    fn quotient_dim_checks_containment() {
        let total = Subspace::new(
            3,
            Matrix::from_dense(&[vec![q(1), q(0)], vec![q(0), q(1)], vec![q(0), q(0)]]),
        )
        .unwrap();
        let sub = Subspace::new(3, Matrix::from_dense(&[vec![q(1)], vec![q(1)], vec![q(0)]]))
            .unwrap();
        assert_eq!(quotient_dim(&sub, &total).unwrap(), 1);

        let outside =
            Subspace::new(3, Matrix::from_dense(&[vec![q(0)], vec![q(0)], vec![q(1)]])).unwrap();
        assert!(matches!(
            quotient_dim(&outside, &total),
            Err(Error::ContainmentViolation { .. })
        ));
    }

    #[test]
    fn kron_and_stack_shapes() {
        let a = Matrix::from_dense(&[vec![q(1), q(2)], vec![q(0), q(1)]]);
        let b = Matrix::from_dense(&[vec![q(3)]]);
        let k = a.kron(&b);
        assert_eq!((k.rows, k.cols), (2, 2));
        assert_eq!(k.get(0, 1), q(6));
        let h = a.hstack(&a);
        assert_eq!((h.rows, h.cols), (2, 4));
        let v = a.vstack(&a);
        assert_eq!((v.rows, v.cols), (4, 2));
        let d = Matrix::block_diag(&[&a, &b]);
        assert_eq!((d.rows, d.cols), (3, 3));
        assert_eq!(d.get(2, 2), q(3));
    }

    #[test]
    fn empty_matrices_are_legal() {
        let e = Matrix::zero(0, 3);
        assert_eq!(rank(&e), 0);
        assert_eq!(kernel_basis(&e).dim(), 3);
        let f = Matrix::zero(3, 0);
        assert_eq!(rank(&f), 0);
        assert_eq!(kernel_basis(&f).dim(), 0);
        let p = Matrix::zero(0, 0);
        let (im, _, _) = projector_image(&p).unwrap();
        assert_eq!(im.dim(), 0);
    }
}
