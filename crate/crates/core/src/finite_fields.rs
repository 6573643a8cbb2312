//! Finite fields `F_p`, `F_{p^2}`, `F_{p^3}` and dense polynomials over them.
//!
//! Fields are context objects implementing [`Field`]; elements are plain
//! `Copy` values (`u64` for `F_p`, coordinate arrays for extensions).

use std::fmt;
use std::hash::Hash;

use crate::arith::{jacobi, mul_mod, smallest_nonresidue, sqrt_mod_p};

pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Copy + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn p(&self) -> u64;
    fn degree(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Embedding of a residue `a < p` of the prime field.
    fn from_u64(&self, a: u64) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn frobenius(&self, a: Self::Elem) -> Self::Elem;
    /// Coordinates in the power basis, zero padded.
    fn coords(&self, a: Self::Elem) -> [u64; 3];
    fn from_coords(&self, c: &[u64]) -> Self::Elem;

    fn order(&self) -> u128 {
        (self.p() as u128).pow(self.degree())
    }

    fn from_i64(&self, a: i64) -> Self::Elem {
        self.from_u64((a as i128).rem_euclid(self.p() as i128) as u64)
    }

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    fn square(&self, a: Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow(&self, a: Self::Elem, mut e: u128) -> Self::Elem {
        let mut r = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(b, b);
            }
        }
        r
    }

    fn inv(&self, a: Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            None
        } else {
            Some(self.pow(a, self.order() - 2))
        }
    }

    /// Quadratic character, with `chi(0) = 0`.
    fn chi(&self, a: Self::Elem) -> i32 {
        if self.is_zero(a) {
            return 0;
        }
        if self.pow(a, (self.order() - 1) / 2) == self.one() {
            1
        } else {
            -1
        }
    }

    /// The element with base-`p` digits `idx`; enumerates the field.
    fn element(&self, mut idx: u128) -> Self::Elem {
        let p = self.p() as u128;
        let mut c = [0u64; 3];
        for x in c.iter_mut().take(self.degree() as usize) {
            *x = (idx % p) as u64;
            idx /= p;
        }
        self.from_coords(&c[..self.degree() as usize])
    }

    /// The element of `F_p` equal to `a`, if `a` lies in the prime field.
    fn in_prime_field(&self, a: Self::Elem) -> Option<u64> {
        let c = self.coords(a);
        if c[1] == 0 && c[2] == 0 {
            Some(c[0])
        } else {
            None
        }
    }

    /// Square root by Tonelli-Shanks; of the two roots, the one whose
    /// coordinate vector is lexicographically smaller.
    fn sqrt(&self, a: Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(a);
        }
        if self.chi(a) != 1 {
            return None;
        }
        let q = self.order();
        let mut t = q - 1;
        let mut s = 0u32;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        // in even degree every element of F_p is a square, so start past them
        let start = if self.degree() > 1 { self.p() as u128 } else { 1 };
        let z = (start..q)
            .map(|i| self.element(i))
            .find(|&z| self.chi(z) == -1)
            .expect("field has a non-residue");
        let mut m = s;
        let mut c = self.pow(z, t);
        let mut tt = self.pow(a, t);
        let mut r = self.pow(a, (t + 1) / 2);
        let one = self.one();
        while tt != one {
            let mut i = 0;
            let mut x = tt;
            while x != one {
                x = self.square(x);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(b);
            }
            m = i;
            c = self.square(b);
            tt = self.mul(tt, c);
            r = self.mul(r, b);
        }
        let nr = self.neg(r);
        Some(if self.coords(nr) < self.coords(r) { nr } else { r })
    }
}

/// The prime field `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u64,
    // floor((2^64 - 1)/p) when p < 2^32, else 0
    barrett: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(p >= 2);
        let barrett = if p < 1 << 32 { u64::MAX / p } else { 0 };
        Fp { p, barrett }
    }

    #[inline(always)]
    pub fn mulr(&self, a: u64, b: u64) -> u64 {
        if self.barrett != 0 {
            let x = a * b;
            let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
            let r = x - q * self.p;
            if r >= self.p {
                r - self.p
            } else {
                r
            }
        } else {
            mul_mod(a, b, self.p)
        }
    }

    #[inline(always)]
    pub fn addr(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn subr(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn negr(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    /// Inverse by the extended Euclidean algorithm; `a` must be nonzero.
    pub fn invr(&self, a: u64) -> u64 {
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "inverse of zero");
        if t0 < 0 {
            (t0 + self.p as i64) as u64
        } else {
            t0 as u64
        }
    }
}

impl Field for Fp {
    type Elem = u64;

    fn p(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> u32 {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_u64(&self, a: u64) -> u64 {
        a % self.p
    }
    fn add(&self, a: u64, b: u64) -> u64 {
        self.addr(a, b)
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        self.subr(a, b)
    }
    fn neg(&self, a: u64) -> u64 {
        self.negr(a)
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.mulr(a, b)
    }
    fn frobenius(&self, a: u64) -> u64 {
        a
    }
    fn coords(&self, a: u64) -> [u64; 3] {
        [a, 0, 0]
    }
    fn from_coords(&self, c: &[u64]) -> u64 {
        c.first().copied().unwrap_or(0) % self.p
    }
    fn inv(&self, a: u64) -> Option<u64> {
        (a != 0).then(|| self.invr(a))
    }
    fn chi(&self, a: u64) -> i32 {
        jacobi(a as i128, self.p)
    }
    fn sqrt(&self, a: u64) -> Option<u64> {
        sqrt_mod_p(a, self.p)
    }
}

/// `F_p[t]/(m(t))` for a monic irreducible `m` of degree `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpExt<const K: usize> {
    base: Fp,
    // t^K = sum red[i] t^i
    red: [u64; K],
    // frob[i] = (t^i)^p
    frob: [[u64; K]; K],
}

pub type Fp2 = FpExt<2>;
pub type Fp3 = FpExt<3>;

impl<const K: usize> FpExt<K> {
    /// Field with modulus `t^K + sum m[i] t^i`; irreducibility is the
    /// caller's responsibility.
    pub fn new(p: u64, m: [u64; K]) -> Self {
        let base = Fp::new(p);
        let red = m.map(|c| base.negr(c % p));
        let mut f = FpExt { base, red, frob: [[0; K]; K] };
        let mut t = [0u64; K];
        if K > 1 {
            t[1] = 1;
        } else {
            t[0] = red[0];
        }
        let tp = f.pow(t, p as u128);
        let mut acc = f.one();
        for i in 0..K {
            f.frob[i] = acc;
            acc = f.mul(acc, tp);
        }
        f
    }

    pub fn base(&self) -> &Fp {
        &self.base
    }

    /// Low coefficients of the monic modulus.
    pub fn modulus(&self) -> [u64; K] {
        self.red.map(|c| self.base.negr(c))
    }
}

impl Fp2 {
    /// `F_p[t]/(t^2 - s)` with `s` the smallest positive non-residue.
    pub fn quadratic(p: u64) -> Self {
        let s = smallest_nonresidue(p);
        Self::new(p, [p - s, 0])
    }

    /// The constant `s` with `t^2 = s` (for fields built by [`Fp2::quadratic`]).
    pub fn nonresidue(&self) -> u64 {
        self.red[0]
    }
}

impl Fp3 {
    /// `F_p[t]/(t^3 + c1 t + c0)` with `(c0, c1)` the lexicographically
    /// smallest pair giving an irreducible cubic.
    pub fn cubic(p: u64) -> Self {
        let k = Fp::new(p);
        for c0 in 1..p {
            for c1 in 0..p {
                let m = [c0, c1, 0, 1];
                if poly_roots(&k, &m).is_empty() {
                    return Self::new(p, [c0, c1, 0]);
                }
            }
        }
        unreachable!("an irreducible cubic exists over every prime field")
    }
}

impl<const K: usize> Field for FpExt<K> {
    type Elem = [u64; K];

    fn p(&self) -> u64 {
        self.base.p
    }
    fn degree(&self) -> u32 {
        K as u32
    }
    fn zero(&self) -> [u64; K] {
        [0; K]
    }
    fn one(&self) -> [u64; K] {
        let mut e = [0; K];
        e[0] = 1;
        e
    }
    fn from_u64(&self, a: u64) -> [u64; K] {
        let mut e = [0; K];
        e[0] = a % self.base.p;
        e
    }
    fn add(&self, a: [u64; K], b: [u64; K]) -> [u64; K] {
        std::array::from_fn(|i| self.base.addr(a[i], b[i]))
    }
    fn sub(&self, a: [u64; K], b: [u64; K]) -> [u64; K] {
        std::array::from_fn(|i| self.base.subr(a[i], b[i]))
    }
    fn neg(&self, a: [u64; K]) -> [u64; K] {
        a.map(|x| self.base.negr(x))
    }
    fn mul(&self, a: [u64; K], b: [u64; K]) -> [u64; K] {
        let f = &self.base;
        // schoolbook into 2K-1 slots, then fold the high part down
        let mut prod = [0u64; 6];
        for i in 0..K {
            if a[i] == 0 {
                continue;
            }
            for j in 0..K {
                prod[i + j] = f.addr(prod[i + j], f.mulr(a[i], b[j]));
            }
        }
        for d in (K..2 * K - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..K {
                prod[d - K + i] = f.addr(prod[d - K + i], f.mulr(c, self.red[i]));
            }
        }
        std::array::from_fn(|i| prod[i])
    }
    fn frobenius(&self, a: [u64; K]) -> [u64; K] {
        let mut r = [0u64; K];
        for i in 0..K {
            if a[i] == 0 {
                continue;
            }
            for j in 0..K {
                r[j] = self.base.addr(r[j], self.base.mulr(a[i], self.frob[i][j]));
            }
        }
        r
    }
    fn coords(&self, a: [u64; K]) -> [u64; 3] {
        let mut c = [0; 3];
        c[..K].copy_from_slice(&a);
        c
    }
    fn from_coords(&self, c: &[u64]) -> [u64; K] {
        std::array::from_fn(|i| c.get(i).copied().unwrap_or(0) % self.base.p)
    }
}

/// Dense polynomial over a field: `v[i]` multiplies `x^i`, no trailing zeros.
pub type FqPoly<F> = Vec<<F as Field>::Elem>;

pub fn poly_trim<F: Field>(k: &F, a: &mut FqPoly<F>) {
    while a.last().is_some_and(|&c| k.is_zero(c)) {
        a.pop();
    }
}

pub fn poly_from<F: Field>(k: &F, c: &[u64]) -> FqPoly<F> {
    let mut v: FqPoly<F> = c.iter().map(|&x| k.from_u64(x % k.p())).collect();
    poly_trim(k, &mut v);
    v
}

pub fn poly_add<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> FqPoly<F> {
    let n = a.len().max(b.len());
    let mut r: FqPoly<F> = (0..n)
        .map(|i| k.add(a.get(i).copied().unwrap_or(k.zero()), b.get(i).copied().unwrap_or(k.zero())))
        .collect();
    poly_trim(k, &mut r);
    r
}

pub fn poly_sub<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> FqPoly<F> {
    let n = a.len().max(b.len());
    let mut r: FqPoly<F> = (0..n)
        .map(|i| k.sub(a.get(i).copied().unwrap_or(k.zero()), b.get(i).copied().unwrap_or(k.zero())))
        .collect();
    poly_trim(k, &mut r);
    r
}

pub fn poly_mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> FqPoly<F> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![k.zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = k.add(r[i + j], k.mul(x, y));
        }
    }
    poly_trim(k, &mut r);
    r
}

pub fn poly_scale<F: Field>(k: &F, a: &[F::Elem], c: F::Elem) -> FqPoly<F> {
    let mut r: FqPoly<F> = a.iter().map(|&x| k.mul(x, c)).collect();
    poly_trim(k, &mut r);
    r
}

/// Quotient and remainder; panics on division by zero.
pub fn poly_divrem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> (FqPoly<F>, FqPoly<F>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut r = a.to_vec();
    poly_trim(k, &mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let li = k.inv(*b.last().unwrap()).unwrap();
    let mut q = vec![k.zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = k.mul(r[i + b.len() - 1], li);
        q[i] = c;
        if k.is_zero(c) {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = k.sub(r[i + j], k.mul(c, y));
        }
    }
    r.truncate(b.len() - 1);
    poly_trim(k, &mut r);
    poly_trim(k, &mut q);
    (q, r)
}

pub fn poly_rem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> FqPoly<F> {
    poly_divrem(k, a, b).1
}

pub fn poly_monic<F: Field>(k: &F, a: &[F::Elem]) -> FqPoly<F> {
    match a.last() {
        None => Vec::new(),
        Some(&l) => poly_scale(k, a, k.inv(l).unwrap()),
    }
}

/// Monic gcd (zero when both inputs are zero).
pub fn poly_gcd<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> FqPoly<F> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    poly_trim(k, &mut a);
    poly_trim(k, &mut b);
    while !b.is_empty() {
        let r = poly_rem(k, &a, &b);
        a = b;
        b = r;
    }
    poly_monic(k, &a)
}

pub fn poly_eval<F: Field>(k: &F, a: &[F::Elem], x: F::Elem) -> F::Elem {
    a.iter().rev().fold(k.zero(), |acc, &c| k.add(k.mul(acc, x), c))
}

pub fn poly_derivative<F: Field>(k: &F, a: &[F::Elem]) -> FqPoly<F> {
    let mut r: FqPoly<F> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| k.mul(c, k.from_u64(i as u64 % k.p())))
        .collect();
    poly_trim(k, &mut r);
    r
}

/// `base^e mod m`.
pub fn poly_powmod<F: Field>(k: &F, base: &[F::Elem], mut e: u128, m: &[F::Elem]) -> FqPoly<F> {
    let mut r = poly_rem(k, &[k.one()], m);
    let mut b = poly_rem(k, base, m);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_rem(k, &poly_mul(k, &r, &b), m);
        }
        e >>= 1;
        if e > 0 {
            b = poly_rem(k, &poly_mul(k, &b, &b), m);
        }
    }
    r
}

/// Squarefree test (`gcd(f, f') = 1`); constants count as squarefree.
pub fn poly_is_squarefree<F: Field>(k: &F, f: &[F::Elem]) -> bool {
    assert!(!f.is_empty(), "squarefree test of the zero polynomial");
    if f.len() <= 2 {
        return true;
    }
    let d = poly_derivative(k, f);
    if d.is_empty() {
        return false;
    }
    poly_gcd(k, f, &d).len() == 1
}

/// Distinct roots in the base field, sorted by coordinates.
///
/// Cantor-Zassenhaus splitting with the deterministic shifts
/// `x + element(0), x + element(1), ...`.
pub fn poly_roots<F: Field>(k: &F, f: &[F::Elem]) -> Vec<F::Elem> {
    assert!(!f.is_empty(), "roots of the zero polynomial");
    let f = poly_monic(k, f);
    if f.len() <= 1 {
        return Vec::new();
    }
    let x = vec![k.zero(), k.one()];
    let xq = poly_powmod(k, &x, k.order(), &f);
    let g = poly_gcd(k, &f, &poly_sub(k, &xq, &x));
    let mut out = Vec::new();
    split_roots(k, g, &mut out);
    out.sort_by_key(|&r| k.coords(r));
    out
}

fn split_roots<F: Field>(k: &F, g: FqPoly<F>, out: &mut Vec<F::Elem>) {
    match g.len() {
        0 | 1 => return,
        2 => {
            out.push(k.neg(g[0]));
            return;
        }
        _ => {}
    }
    let half = (k.order() - 1) / 2;
    for i in 0.. {
        let shift = vec![k.element(i), k.one()];
        let t = poly_powmod(k, &shift, half, &g);
        let h = poly_gcd(k, &g, &poly_sub(k, &t, &[k.one()]));
        if h.len() > 1 && h.len() < g.len() {
            let (q, _) = poly_divrem(k, &g, &h);
            split_roots(k, h, out);
            split_roots(k, poly_monic(k, &q), out);
            return;
        }
    }
}

/// `h mod u` is not a square in `F_p[x]/(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotSquare;

/// Square root of `h` modulo a monic irreducible `u` of degree 1..=3 over
/// `F_p`. Of the two roots, returns the one with the lexicographically
/// smaller coefficient vector (constant term first).
pub fn poly_sqrt_mod(k: &Fp, h: &[u64], u: &[u64]) -> Result<Vec<u64>, NotSquare> {
    let d = u.len() - 1;
    assert!((1..=3).contains(&d) && u[d] == 1, "u must be monic of degree 1..=3");
    let r = poly_rem(k, h, u);
    let mut v = match d {
        1 => {
            let x = poly_eval(k, &r, k.neg(u[0]));
            vec![k.sqrt(x).ok_or(NotSquare)?]
        }
        2 => {
            let f = Fp2::new(k.p(), [u[0], u[1]]);
            f.sqrt(f.from_coords(&r)).ok_or(NotSquare)?.to_vec()
        }
        _ => {
            let f = Fp3::new(k.p(), [u[0], u[1], u[2]]);
            f.sqrt(f.from_coords(&r)).ok_or(NotSquare)?.to_vec()
        }
    };
    poly_trim(k, &mut v);
    Ok(v)
}
