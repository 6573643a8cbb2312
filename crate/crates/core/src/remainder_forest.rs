//! Accumulating remainder tree over `O_K` and its forest variant.
//!
//! Given a row vector `V`, matrices `A_0, ..., A_{b-1}` and moduli
//! `m_0, ..., m_{b-1}`, computes every `C_n = V A_0 ... A_{n-1} mod m_n`
//! in quasi-linear time. The forest splits the index range into `2^kappa`
//! consecutive blocks and threads the accumulated vector from block to
//! block, reduced modulo the product of all moduli still to come.

use rug::Integer;

use crate::quad_ring::{QuadDisc, QuadInt};
use crate::{Error, Result};

/// Square matrix over `O_K`, stored as the two integer component matrices
/// (row-major): the entry is `c0[i] + c1[i] alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub r: usize,
    pub c0: Vec<Integer>,
    pub c1: Vec<Integer>,
}

impl QMat {
    pub fn zero(r: usize) -> Self {
        QMat { r, c0: vec![Integer::new(); r * r], c1: vec![Integer::new(); r * r] }
    }

    pub fn identity(r: usize) -> Self {
        let mut m = Self::zero(r);
        for i in 0..r {
            m.c0[i * r + i] = Integer::from(1);
        }
        m
    }

    pub fn from_entries(r: usize, e: &[QuadInt]) -> Self {
        assert_eq!(e.len(), r * r);
        QMat { r, c0: e.iter().map(|x| x.c0.clone()).collect(), c1: e.iter().map(|x| x.c1.clone()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> QuadInt {
        QuadInt { c0: self.c0[i * self.r + j].clone(), c1: self.c1[i * self.r + j].clone() }
    }

    pub fn set(&mut self, i: usize, j: usize, v: QuadInt) {
        self.c0[i * self.r + j] = v.c0;
        self.c1[i * self.r + j] = v.c1;
    }

    pub fn is_identity(&self) -> bool {
        let r = self.r;
        self.c1.iter().all(|x| *x == 0)
            && self.c0.iter().enumerate().all(|(k, x)| if k / r == k % r { *x == 1 } else { *x == 0 })
    }

    pub fn reduce(&self, m: &Integer) -> Self {
        QMat { r: self.r, c0: reduce_all(&self.c0, m), c1: reduce_all(&self.c1, m) }
    }

    /// Largest component size in bits.
    pub fn bits(&self) -> u32 {
        self.c0.iter().chain(&self.c1).map(|x| x.significant_bits()).max().unwrap_or(0)
    }
}

/// Row vector over `O_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QVec {
    pub c0: Vec<Integer>,
    pub c1: Vec<Integer>,
}

impl QVec {
    pub fn zero(r: usize) -> Self {
        QVec { c0: vec![Integer::new(); r], c1: vec![Integer::new(); r] }
    }

    pub fn from_entries(e: &[QuadInt]) -> Self {
        QVec { c0: e.iter().map(|x| x.c0.clone()).collect(), c1: e.iter().map(|x| x.c1.clone()).collect() }
    }

    pub fn len(&self) -> usize {
        self.c0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c0.is_empty()
    }

    pub fn get(&self, i: usize) -> QuadInt {
        QuadInt { c0: self.c0[i].clone(), c1: self.c1[i].clone() }
    }

    pub fn reduce(&self, m: &Integer) -> Self {
        QVec { c0: reduce_all(&self.c0, m), c1: reduce_all(&self.c1, m) }
    }
}

fn reduce_all(v: &[Integer], m: &Integer) -> Vec<Integer> {
    v.iter()
        .map(|x| {
            if x.cmp0().is_ge() && x < m {
                x.clone()
            } else {
                let mut r = Integer::from(x % m);
                if r < 0 {
                    r += m;
                }
                r
            }
        })
        .collect()
}

// a (rows x inner) times b (inner x cols), row-major, skipping zeros
fn imat_mul(a: &[Integer], b: &[Integer], rows: usize, inner: usize, cols: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let x = &a[i * inner + k];
            if *x == 0 {
                continue;
            }
            for j in 0..cols {
                let y = &b[k * cols + j];
                if *y != 0 {
                    out[i * cols + j] += x * y;
                }
            }
        }
    }
    out
}

fn add_all(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    a.iter().zip(b).map(|(x, y)| Integer::from(x + y)).collect()
}

/// Product of `(R0 + R1 a)(S0 + S1 a)` with three integer products:
/// `R0 S0`, `R1 S1` and `(R0 + R1)(S0 + S1)`.
fn component_product(
    r0: &[Integer],
    r1: &[Integer],
    s0: &[Integer],
    s1: &[Integer],
    dims: (usize, usize, usize),
    d: QuadDisc,
) -> (Vec<Integer>, Vec<Integer>) {
    let (rows, inner, cols) = dims;
    let r_rational = r1.iter().all(|x| *x == 0);
    let s_rational = s1.iter().all(|x| *x == 0);
    if r_rational && s_rational {
        return (imat_mul(r0, s0, rows, inner, cols), vec![Integer::new(); rows * cols]);
    }
    if r_rational {
        return (imat_mul(r0, s0, rows, inner, cols), imat_mul(r0, s1, rows, inner, cols));
    }
    if s_rational {
        return (imat_mul(r0, s0, rows, inner, cols), imat_mul(r1, s0, rows, inner, cols));
    }
    let p0 = imat_mul(r0, s0, rows, inner, cols);
    let p1 = imat_mul(r1, s1, rows, inner, cols);
    let p2 = imat_mul(&add_all(r0, r1), &add_all(s0, s1), rows, inner, cols);
    let mut c0 = p0;
    let mut c1 = p2;
    if d.one_mod_four() {
        let q = d.q();
        for k in 0..c0.len() {
            c1[k] -= &c0[k];
            c0[k] += &p1[k] * q;
        }
    } else {
        let dd = d.d();
        for k in 0..c0.len() {
            c1[k] -= &c0[k];
            c1[k] -= &p1[k];
            c0[k] += &p1[k] * dd;
        }
    }
    (c0, c1)
}

/// Exact product of two matrices over `O_K`.
pub fn qmat_mul(r: &QMat, s: &QMat, d: QuadDisc) -> QMat {
    assert_eq!(r.r, s.r);
    if r.is_identity() {
        return s.clone();
    }
    if s.is_identity() {
        return r.clone();
    }
    let n = r.r;
    let (c0, c1) = component_product(&r.c0, &r.c1, &s.c0, &s.c1, (n, n, n), d);
    QMat { r: n, c0, c1 }
}

/// Exact product of a row vector and a matrix over `O_K`.
pub fn qvec_mul(v: &QVec, s: &QMat, d: QuadDisc) -> QVec {
    assert_eq!(v.len(), s.r);
    if s.is_identity() {
        return v.clone();
    }
    let n = s.r;
    let (c0, c1) = component_product(&v.c0, &v.c1, &s.c0, &s.c1, (1, n, n), d);
    QVec { c0, c1 }
}

/// Supplies the leaves of a tree: matrices `A_j` and moduli `m_j`.
pub trait LeafSource: Sync {
    fn disc(&self) -> QuadDisc;
    fn dim(&self) -> usize;
    /// Number of leaves `b`, a power of two.
    fn len(&self) -> usize;
    fn matrix(&self, j: usize) -> QMat;
    fn modulus(&self, j: usize) -> u64;
}

/// Explicit tree input.
#[derive(Clone, Debug)]
pub struct TreeInput {
    pub disc: QuadDisc,
    pub v: QVec,
    pub a: Vec<QMat>,
    pub m: Vec<u64>,
}

impl LeafSource for TreeInput {
    fn disc(&self) -> QuadDisc {
        self.disc
    }
    fn dim(&self) -> usize {
        self.v.len()
    }
    fn len(&self) -> usize {
        self.a.len()
    }
    fn matrix(&self, j: usize) -> QMat {
        self.a[j].clone()
    }
    fn modulus(&self, j: usize) -> u64 {
        self.m[j]
    }
}

/// `C_n` for every leaf, `None` standing for the zero vector when `m_n = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeOutput {
    pub dim: usize,
    pub c: Vec<Option<QVec>>,
}

impl TreeOutput {
    pub fn get(&self, n: usize) -> QVec {
        self.c[n].clone().unwrap_or_else(|| QVec::zero(self.dim))
    }
}

fn product(ms: &[u64]) -> Integer {
    match ms.len() {
        0 => Integer::from(1),
        1 => Integer::from(ms[0]),
        n => product(&ms[..n / 2]) * product(&ms[n / 2..]),
    }
}

/// Accumulating remainder tree (the forest with a single block).
pub fn remainder_tree<S: LeafSource>(src: &S, v: &QVec) -> TreeOutput {
    remainder_forest(src, v, 0).expect("kappa = 0 is always in range")
}

/// Remainder forest with `2^kappa` blocks; output identical to
/// [`remainder_tree`] for every admissible `kappa`.
pub fn remainder_forest<S: LeafSource>(src: &S, v: &QVec, kappa: u32) -> Result<TreeOutput> {
    let b = src.len();
    assert!(b.is_power_of_two(), "leaf count must be a power of two");
    let ell = b.trailing_zeros();
    if kappa > ell {
        return Err(Error::KappaRange { kappa, max: ell });
    }
    let d = src.disc();
    let blocks = 1usize << kappa;
    let bs = b >> kappa;
    let moduli: Vec<u64> = (0..b).map(|j| src.modulus(j)).collect();
    let mut suffix = vec![Integer::from(1); blocks + 1];
    for t in (0..blocks).rev() {
        suffix[t] = product(&moduli[t * bs..(t + 1) * bs]) * &suffix[t + 1];
    }
    let mut out = TreeOutput { dim: src.dim(), c: vec![None; b] };
    let mut w = v.reduce(&suffix[0]);
    for t in 0..blocks {
        let carry = t + 1 < blocks && suffix[t + 1] != 1;
        let root = block_tree(src, t * bs, bs, &moduli[t * bs..(t + 1) * bs], &w, carry, &mut out.c);
        if let Some(root) = root {
            let next = &suffix[t + 1];
            w = qvec_mul(&w.reduce(next), &root, d).reduce(next);
        }
        log::trace!("forest block {t}/{blocks} done");
    }
    Ok(out)
}

/// One accumulating remainder tree on leaves `start..start + n`. Writes the
/// leaf outputs and returns the product of all block matrices when asked.
fn block_tree<S: LeafSource>(
    src: &S,
    start: usize,
    n: usize,
    moduli: &[u64],
    v: &QVec,
    want_root: bool,
    out: &mut [Option<QVec>],
) -> Option<QMat> {
    let d = src.disc();
    let depth = n.trailing_zeros() as usize;
    // moduli products per level; level `depth` holds the leaves
    let mut mods: Vec<Vec<Integer>> = vec![Vec::new(); depth + 1];
    mods[depth] = moduli.iter().map(|&m| Integer::from(m)).collect();
    for i in (0..depth).rev() {
        let below = &mods[i + 1];
        mods[i] = below.chunks(2).map(|c| Integer::from(&c[0] * &c[1])).collect();
    }
    if !want_root && mods[0][0] == 1 {
        return None;
    }

    // Up pass. A left child A_{i,2j} is kept only if its right sibling has a
    // nontrivial modulus; right children are dropped once multiplied in.
    let mut kept: Vec<Vec<Option<QMat>>> = vec![Vec::new(); depth + 1];
    let mut level: Vec<QMat> = (0..n).map(|j| src.matrix(start + j)).collect();
    for i in (1..=depth).rev() {
        let mut parents = Vec::with_capacity(level.len() / 2);
        let mut keep = Vec::with_capacity(level.len());
        let mut it = level.into_iter();
        let mut j = 0;
        while let (Some(l), Some(r)) = (it.next(), it.next()) {
            // the parent product is needed if an ancestor-level left sibling
            // or the root is needed; cheap enough to always form it
            let parent = qmat_mul(&l, &r, d);
            keep.push(if mods[i][2 * j + 1] != 1 { Some(l) } else { None });
            keep.push(None);
            parents.push(parent);
            j += 1;
        }
        kept[i] = keep;
        level = parents;
    }
    let root = level.pop();

    // Down pass.
    let mut cur: Vec<Option<QVec>> = vec![(mods[0][0] != 1).then(|| v.reduce(&mods[0][0]))];
    for i in 1..=depth {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for (jp, parent) in cur.iter().enumerate() {
            for j in [2 * jp, 2 * jp + 1] {
                let m = &mods[i][j];
                if *m == 1 {
                    next.push(None);
                    continue;
                }
                let parent = parent.as_ref().expect("parent modulus is a multiple of the child's");
                let c = parent.reduce(m);
                let c = if j % 2 == 0 {
                    c
                } else {
                    let a = kept[i][j - 1].as_ref().expect("left sibling kept");
                    qvec_mul(&c, &a.reduce(m), d).reduce(m)
                };
                next.push(Some(c));
            }
        }
        kept[i].clear();
        cur = next;
    }
    for (j, c) in cur.into_iter().enumerate() {
        out[start + j] = c;
    }
    if want_root {
        root
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad_ring::QuadInt;

    fn disc(d: i64) -> QuadDisc {
        QuadDisc::new(d).unwrap()
    }

    #[test]
    fn single_leaf_example() {
        let d = disc(-1);
        let input = TreeInput {
            disc: d,
            v: QVec::from_entries(&[QuadInt::from_int(3)]),
            a: vec![QMat::from_entries(1, &[QuadInt::from_int(4)]), QMat::identity(1)],
            m: vec![1, 5],
        };
        let out = remainder_tree(&input, &input.v);
        assert_eq!(out.get(1), QVec::from_entries(&[QuadInt::from_int(2)]));
        assert_eq!(out.c[0], None);
    }

    #[test]
    fn identity_leaves() {
        let d = disc(5);
        let v = QVec::from_entries(&[QuadInt::new(17, -4), QuadInt::new(-9, 23)]);
        let m = vec![1, 7, 12, 1, 9, 30, 1, 4];
        let input = TreeInput { disc: d, v: v.clone(), a: vec![QMat::identity(2); 8], m: m.clone() };
        for kappa in 0..=3 {
            let out = remainder_forest(&input, &v, kappa).unwrap();
            for (n, &mn) in m.iter().enumerate() {
                assert_eq!(out.get(n), if mn == 1 { QVec::zero(2) } else { v.reduce(&Integer::from(mn)) });
            }
        }
        assert!(matches!(remainder_forest(&input, &v, 4), Err(Error::KappaRange { .. })));
    }

    #[test]
    fn scalar_matrix_product_matches_ring() {
        for dd in [-1, -3, 2, 5] {
            let d = disc(dd);
            let a = QuadInt::new(7, -3);
            let b = QuadInt::new(-2, 11);
            let p = qmat_mul(&QMat::from_entries(1, &[a.clone()]), &QMat::from_entries(1, &[b.clone()]), d);
            assert_eq!(p.get(0, 0), a.mul(&b, d));
        }
        let d = disc(-1);
        let al = QMat::from_entries(1, &[QuadInt::alpha()]);
        assert_eq!(qmat_mul(&al, &al, d).get(0, 0), QuadInt::from_int(-1));
        let i3 = QMat::identity(3);
        assert_eq!(qmat_mul(&i3, &i3, d), i3);
    }
}
