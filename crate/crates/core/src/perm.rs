//! Permutations in one-line notation, adjacent-transposition words, and
//! Koszul signs.
//!
//! A `Perm` of size `n` is a bijection of `{0, .., n-1}`; `word[i]` is the
//! image of `i`. Composition is function composition: `(a * b)(i) = a(b(i))`.
//!
//! Group actions throughout the crate are left actions, and arbitrary
//! permutations act through a factorization into adjacent transpositions
//! `s_i = (i, i+1)`. That factorization is only consistent because the
//! generators' Coxeter relations hold for the stored actions, which the
//! symmetric-sequence layer checks explicitly.

use crate::{q, Q};
use num::One;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    word: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            word: (0..n).collect(),
        }
    }

    /// One-line notation; panics unless `word` is a bijection.
    pub fn from_word(word: Vec<usize>) -> Self {
        let n = word.len();
        let mut seen = vec![false; n];
        for &v in &word {
            assert!(v < n && !seen[v], "not a permutation: {word:?}");
            seen[v] = true;
        }
        Perm { word }
    }

    /// Adjacent transposition `s_i = (i, i+1)` in the symmetric group on
    /// `n` letters. Requires `i + 1 < n`.
    pub fn adjacent(n: usize, i: usize) -> Self {
        assert!(i + 1 < n);
        let mut word: Vec<usize> = (0..n).collect();
        word.swap(i, i + 1);
        Perm { word }
    }

    pub fn size(&self) -> usize {
        self.word.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.word[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.word
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.size(), other.size());
        Perm {
            word: other.word.iter().map(|&i| self.word[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut word = vec![0; self.size()];
        for (i, &v) in self.word.iter().enumerate() {
            word[v] = i;
        }
        Perm { word }
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Indices `i` with a descent-style factorization: returns generators
    /// `g_1, .., g_m` (as adjacent positions) with
    /// `self = s_{g_1} ∘ s_{g_2} ∘ .. ∘ s_{g_m}`.
    ///
    /// Obtained by bubble-sorting the one-line word back to the identity:
    /// each swap of positions `(i, i+1)` in the sorting pass contributes a
    /// generator, and the sorted swaps applied in reverse rebuild `self`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut w = self.word.clone();
        let n = w.len();
        let mut gens = Vec::new();
        loop {
            let mut swapped = false;
            for i in 0..n.saturating_sub(1) {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    gens.push(i);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        // s_{g_m} .. s_{g_1} sorts self to id, so self = s_{g_1}^{-1} ..
        // applied reversed; adjacent transpositions are involutions.
        gens.reverse();
        gens
    }

    /// Number of inversions; `(-1)^inversions` is the ordinary sign.
    pub fn inversions(&self) -> usize {
        let mut count = 0;
        for i in 0..self.size() {
            for j in i + 1..self.size() {
                if self.word[i] > self.word[j] {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn sign(&self) -> Q {
        if self.inversions() % 2 == 0 {
            q(1)
        } else {
            q(-1)
        }
    }

    /// All permutations of size `n` in lexicographic one-line order.
    pub fn enumerate(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut word: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm { word: word.clone() });
            if !next_lex(&mut word) {
                break;
            }
        }
        out
    }
}

fn next_lex(w: &mut [usize]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Koszul sign of permuting homogeneous factors: the element in slot `i`
/// (of degree `degs[i]`) moves to slot `perm(i)`, and each transposition of
/// odd-degree neighbours contributes `-1`. Equals the parity of
/// `sum over i < j with perm(i) > perm(j) of degs[i] * degs[j]`.
pub fn koszul_sign(perm: &Perm, degs: &[i64]) -> Q {
    assert_eq!(perm.size(), degs.len());
    let mut exp: i64 = 0;
    for i in 0..degs.len() {
        for j in i + 1..degs.len() {
            if perm.apply(i) > perm.apply(j) {
                exp += degs[i] * degs[j];
            }
        }
    }
    if exp.rem_euclid(2) == 0 {
        q(1)
    } else {
        q(-1)
    }
}

/// The permutation of `r = sum sizes` letters that permutes consecutive
/// blocks of the given sizes according to `perm` (block `b` moves, intact and
/// in order, to the slot `perm(b)`).
pub fn block_perm(perm: &Perm, sizes: &[usize]) -> Perm {
    assert_eq!(perm.size(), sizes.len());
    let t = sizes.len();
    let mut start = vec![0usize; t];
    for b in 1..t {
        start[b] = start[b - 1] + sizes[b - 1];
    }
    // destination offsets: sizes in target order are sizes[perm^{-1}(slot)]
    let inv = perm.inverse();
    let mut dest_start = vec![0usize; t];
    let mut acc = 0;
    for slot in 0..t {
        dest_start[slot] = acc;
        acc += sizes[inv.apply(slot)];
    }
    let r: usize = sizes.iter().sum();
    let mut word = vec![0usize; r];
    for b in 0..t {
        let slot = perm.apply(b);
        for k in 0..sizes[b] {
            word[start[b] + k] = dest_start[slot] + k;
        }
    }
    let _ = r;
    Perm::from_word(word)
}

/// Multiply a scalar by `-1` when `flag` is odd. Convenience for sign
/// accumulation loops.
pub fn sign_pow(mut s: Q, flag: i64) -> Q {
    if flag.rem_euclid(2) == 1 {
        s = -s;
    }
    s
}

/// Product of Koszul signs along an adjacent word, tracking degree
/// positions. Returns the same sign as `koszul_sign` but exercises the
/// generator path; used by tests as a cross-check.
pub fn koszul_sign_via_word(perm: &Perm, degs: &[i64]) -> Q {
    let mut s = Q::one();
    let mut cur: Vec<i64> = degs.to_vec();
    // apply generators right-to-left: perm = s_{g1} .. s_{gm}
    let word = perm.adjacent_word();
    for &g in word.iter().rev() {
        // swapping slots g, g+1 of the current arrangement
        if cur[g].rem_euclid(2) == 1 && cur[g + 1].rem_euclid(2) == 1 {
            s = -s;
        }
        cur.swap(g, g + 1);
    }
    // cur should now be degs permuted into target slots
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_inverse_identity() {
        let a = Perm::from_word(vec![2, 0, 1]);
        let b = Perm::from_word(vec![1, 2, 0]);
        assert_eq!(a.compose(&b), Perm::identity(3));
        assert_eq!(a.inverse(), b);
        assert_eq!(a.compose(&a.inverse()), Perm::identity(3));
        // (a b)(i) = a(b(i))
        let c = Perm::from_word(vec![1, 0, 2]);
        let ab = a.compose(&c);
        for i in 0..3 {
            assert_eq!(ab.apply(i), a.apply(c.apply(i)));
        }
    }

    #[test]
    fn adjacent_word_rebuilds_permutation() {
        for p in Perm::enumerate(5) {
            let mut rebuilt = Perm::identity(5);
            for &g in &p.adjacent_word() {
                rebuilt = rebuilt.compose(&Perm::adjacent(5, g));
            }
            assert_eq!(rebuilt, p, "word failed for {:?}", p.as_slice());
            assert_eq!(p.adjacent_word().len() % 2, p.inversions() % 2);
        }
    }

    #[test]
    fn enumerate_is_lexicographic_and_complete() {
        let all = Perm::enumerate(4);
        assert_eq!(all.len(), 24);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        assert_eq!(all[0], Perm::identity(4));
    }

    #[test]
    fn koszul_sign_examples() {
        // swapping two odd-degree elements costs a sign
        let swap = Perm::from_word(vec![1, 0]);
        assert_eq!(koszul_sign(&swap, &[1, 1]), q(-1));
        assert_eq!(koszul_sign(&swap, &[1, 2]), q(1));
        assert_eq!(koszul_sign(&swap, &[0, 1]), q(1));
        // cyclic move of three odd elements: two transpositions of odd pairs
        let cyc = Perm::from_word(vec![1, 2, 0]);
        assert_eq!(koszul_sign(&cyc, &[1, 1, 1]), q(1));
        // on all-degree-1 elements the Koszul sign is the ordinary sign
        for p in Perm::enumerate(4) {
            assert_eq!(koszul_sign(&p, &[1; 4]), p.sign());
            assert_eq!(koszul_sign(&p, &[2; 4]), q(1));
        }
    }

    #[test]
    fn koszul_sign_is_multiplicative() {
        // sign(ab; degs) = sign(a; degs permuted by b) * sign(b; degs)
        let degs = [1, 2, 1, 3];
        for a in Perm::enumerate(4) {
            for b in Perm::enumerate(4).iter().take(8) {
                let ab = a.compose(b);
                // after b acts, slot s holds the element from b^{-1}(s)
                let binv = b.inverse();
                let permuted: Vec<i64> = (0..4).map(|s| degs[binv.apply(s)]).collect();
                assert_eq!(
                    koszul_sign(&ab, &degs),
                    koszul_sign(&a, &permuted) * koszul_sign(b, &degs)
                );
            }
        }
    }

    #[test]
    fn koszul_sign_word_path_agrees() {
        let degs = [1, 0, 3, 2, 1];
        for p in Perm::enumerate(5).iter().step_by(7) {
            assert_eq!(koszul_sign(p, &degs), koszul_sign_via_word(p, &degs));
        }
    }

    #[test]
    fn block_perm_moves_blocks_intact() {
        // two blocks of sizes 2, 1 swapped: (0 1)(2) -> (2)(0 1)
        let swap = Perm::from_word(vec![1, 0]);
        let bp = block_perm(&swap, &[2, 1]);
        assert_eq!(bp.as_slice(), &[1, 2, 0]);
        // identity blocks stay put
        let id = Perm::identity(3);
        assert_eq!(block_perm(&id, &[2, 3, 1]), Perm::identity(6));
        // block permutation is a homomorphism
        let a = Perm::from_word(vec![2, 0, 1]);
        let b = Perm::from_word(vec![1, 2, 0]);
        let sizes = [2, 1, 3];
        // sizes seen by a after b has rearranged the blocks
        let binv = b.inverse();
        let sizes_after_b: Vec<usize> = (0..3).map(|s| sizes[binv.apply(s)]).collect();
        let lhs = block_perm(&a.compose(&b), &sizes);
        let rhs = block_perm(&a, &sizes_after_b).compose(&block_perm(&b, &sizes));
        assert_eq!(lhs, rhs);
    }
}
