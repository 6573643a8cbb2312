//! Exact arithmetic in `O_K = Z[alpha]` for `K = Q(sqrt D)`, and the
//! reduction maps to `F_p` (split primes) and `F_{p^2}` (inert primes).
//!
//! `alpha = sqrt D` when `D = 2, 3 mod 4` and `alpha = (1 + sqrt D)/2` when
//! `D = 1 mod 4`; an element is the pair `c0 + c1*alpha`.

use std::fmt;

use rug::{Complete, Integer};

use crate::arith::{int_mod, inv_mod, jacobi, mul_mod, sqrt_mod_p, add_mod};
use crate::finite_fields::{Field, Fp, Fp2};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadDisc {
    d: i64,
}

impl QuadDisc {
    pub fn new(d: i64) -> Result<Self> {
        let is_square = d >= 0 && {
            let r = (d as f64).sqrt() as i64;
            (r.saturating_sub(1)..=r + 1).any(|s| s >= 0 && s.checked_mul(s) == Some(d))
        };
        if is_square || d.rem_euclid(4) == 0 {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(QuadDisc { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// `D mod 4`, one of 1, 2, 3.
    pub fn residue_class(&self) -> u8 {
        self.d.rem_euclid(4) as u8
    }

    pub fn one_mod_four(&self) -> bool {
        self.residue_class() == 1
    }

    /// `(D - 1)/4`, the constant in `alpha^2 = alpha + q` when `D = 1 mod 4`.
    pub fn q(&self) -> i64 {
        debug_assert!(self.one_mod_four());
        (self.d - 1).div_euclid(4)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub c0: Integer,
    pub c1: Integer,
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.c1.cmp0(), self.c0.cmp0()) {
            (std::cmp::Ordering::Equal, _) => write!(f, "{}", self.c0),
            (_, std::cmp::Ordering::Equal) => write!(f, "{}a", self.c1),
            (std::cmp::Ordering::Less, _) => write!(f, "{}{}a", self.c0, self.c1),
            _ => write!(f, "{}+{}a", self.c0, self.c1),
        }
    }
}

impl QuadInt {
    pub fn new(c0: impl Into<Integer>, c1: impl Into<Integer>) -> Self {
        QuadInt { c0: c0.into(), c1: c1.into() }
    }

    pub fn from_int(c0: impl Into<Integer>) -> Self {
        QuadInt { c0: c0.into(), c1: Integer::new() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn alpha() -> Self {
        Self::new(0, 1)
    }

    /// The element `sqrt D` written in the `alpha` basis.
    pub fn sqrt_d(d: QuadDisc) -> Self {
        if d.one_mod_four() {
            Self::new(-1, 2)
        } else {
            Self::alpha()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_rational(&self) -> bool {
        self.c1 == 0
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadInt { c0: (&self.c0 + &o.c0).complete(), c1: (&self.c1 + &o.c1).complete() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadInt { c0: (&self.c0 - &o.c0).complete(), c1: (&self.c1 - &o.c1).complete() }
    }

    pub fn neg(&self) -> Self {
        QuadInt { c0: (-&self.c0).complete(), c1: (-&self.c1).complete() }
    }

    pub fn scale(&self, k: &Integer) -> Self {
        QuadInt { c0: (&self.c0 * k).complete(), c1: (&self.c1 * k).complete() }
    }

    pub fn mul(&self, o: &Self, d: QuadDisc) -> Self {
        let mut c0 = (&self.c0 * &o.c0).complete();
        let mut c1 = (&self.c0 * &o.c1).complete();
        c1 += &self.c1 * &o.c0;
        let t = (&self.c1 * &o.c1).complete();
        if d.one_mod_four() {
            c0 += &t * d.q();
            c1 += t;
        } else {
            c0 += t * d.d();
        }
        QuadInt { c0, c1 }
    }

    pub fn pow(&self, mut e: u64, d: QuadDisc) -> Self {
        let mut r = Self::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, d);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, d);
            }
        }
        r
    }

    /// Galois conjugate.
    pub fn conj(&self, d: QuadDisc) -> Self {
        if d.one_mod_four() {
            QuadInt { c0: (&self.c0 + &self.c1).complete(), c1: (-&self.c1).complete() }
        } else {
            QuadInt { c0: self.c0.clone(), c1: (-&self.c1).complete() }
        }
    }

    /// Field norm `a * conj(a)`.
    pub fn norm(&self, d: QuadDisc) -> Integer {
        let mut n = self.c0.clone().square();
        if d.one_mod_four() {
            n += &self.c0 * &self.c1;
            n -= self.c1.clone().square() * d.q();
        } else {
            n -= self.c1.clone().square() * d.d();
        }
        n
    }

    /// Exact quotient in `O_K`, or `None` when `o` does not divide `self`.
    pub fn div_exact(&self, o: &Self, d: QuadDisc) -> Option<Self> {
        let n = o.norm(d);
        if n == 0 {
            return None;
        }
        let t = self.mul(&o.conj(d), d);
        if !t.c0.is_divisible(&n) || !t.c1.is_divisible(&n) {
            return None;
        }
        Some(QuadInt { c0: t.c0.div_exact(&n), c1: t.c1.div_exact(&n) })
    }

    /// Content: gcd of both coordinates.
    pub fn content(&self) -> Integer {
        self.c0.clone().gcd(&self.c1)
    }
}

pub fn qi_mul(a: &QuadInt, b: &QuadInt, d: QuadDisc) -> QuadInt {
    a.mul(b, d)
}

pub fn qi_norm(a: &QuadInt, d: QuadDisc) -> Integer {
    a.norm(d)
}

/// Polynomial over `O_K`; `coeffs[i]` multiplies `x^i`, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuadIntPoly {
    pub coeffs: Vec<QuadInt>,
}

impl QuadIntPoly {
    pub fn new(mut coeffs: Vec<QuadInt>) -> Self {
        while coeffs.last().is_some_and(QuadInt::is_zero) {
            coeffs.pop();
        }
        QuadIntPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| QuadInt::from_int(x)).collect())
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> QuadInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn lead(&self) -> QuadInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn mul(&self, o: &Self, d: QuadDisc) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::default();
        }
        let mut out = vec![QuadInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b, d));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &QuadInt, d: QuadDisc) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c, d)).collect())
    }

    pub fn eval(&self, x: &QuadInt, d: QuadDisc) -> QuadInt {
        self.coeffs.iter().rev().fold(QuadInt::zero(), |acc, c| acc.mul(x, d).add(c))
    }

    pub fn eval_int(&self, x: i64) -> QuadInt {
        let x = Integer::from(x);
        self.coeffs.iter().rev().fold(QuadInt::zero(), |acc, c| acc.scale(&x).add(c))
    }

    /// `h(x + beta)` by repeated synthetic division.
    pub fn shift(&self, beta: i64) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        let b = Integer::from(beta);
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1].scale(&b);
                c[j] = c[j].add(&t);
            }
        }
        Self::new(c)
    }

    /// `x^n h(1/x)`.
    pub fn reverse(&self, n: usize) -> Self {
        let mut c = vec![QuadInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            assert!(i <= n, "reversal degree below polynomial degree");
            c[n - i] = a.clone();
        }
        Self::new(c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a.scale(&Integer::from(i)))
                .collect(),
        )
    }

    /// Discriminant `(-1)^{n(n-1)/2} Res(h, h') / lc(h)`.
    pub fn discriminant(&self, d: QuadDisc) -> QuadInt {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return QuadInt::zero(),
        };
        let res = resultant(self, &self.derivative(), d);
        let r = res.div_exact(&self.lead(), d).expect("leading coefficient divides the resultant");
        if (n * (n - 1) / 2) % 2 == 1 {
            r.neg()
        } else {
            r
        }
    }
}

/// Resultant via the Sylvester matrix and fraction-free (Bareiss) elimination.
pub fn resultant(a: &QuadIntPoly, b: &QuadIntPoly, d: QuadDisc) -> QuadInt {
    let (m, n) = match (a.degree(), b.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return QuadInt::zero(),
    };
    let size = m + n;
    if size == 0 {
        return QuadInt::one();
    }
    let mut s = vec![vec![QuadInt::zero(); size]; size];
    for i in 0..n {
        for (k, c) in a.coeffs.iter().rev().enumerate() {
            s[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in b.coeffs.iter().rev().enumerate() {
            s[n + i][i + k] = c.clone();
        }
    }
    bareiss_det(s, d)
}

fn bareiss_det(mut a: Vec<Vec<QuadInt>>, d: QuadDisc) -> QuadInt {
    let n = a.len();
    let mut sign = false;
    let mut prev = QuadInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = !sign;
                }
                None => return QuadInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[k][k].mul(&a[i][j], d).sub(&a[i][k].mul(&a[k][j], d));
                a[i][j] = t.div_exact(&prev, d).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        det.neg()
    } else {
        det
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitType {
    Split,
    Inert,
    Ramified,
}

pub fn split_type(d: QuadDisc, p: u64) -> SplitType {
    match jacobi(d.d() as i128, p) {
        1 => SplitType::Split,
        -1 => SplitType::Inert,
        _ => SplitType::Ramified,
    }
}

/// A residue field `O_K / P` together with the reduction map.
pub trait PrimeReduction: Sync {
    type F: Field;

    fn field(&self) -> &Self::F;

    /// Image of `alpha`.
    fn alpha(&self) -> <Self::F as Field>::Elem;

    /// Image of `c0 + c1*alpha` for residues already reduced mod `p`.
    fn reduce_residues(&self, c0: u64, c1: u64) -> <Self::F as Field>::Elem {
        let k = self.field();
        k.add(k.from_u64(c0), k.mul(k.from_u64(c1), self.alpha()))
    }

    fn reduce(&self, a: &QuadInt) -> <Self::F as Field>::Elem {
        let p = self.field().p();
        self.reduce_residues(int_mod(&a.c0, p), int_mod(&a.c1, p))
    }
}

/// The degree-one prime `(p, gamma - sqrt D)` above a split `p`.
#[derive(Clone, Debug)]
pub struct SplitPrime {
    pub gamma: u64,
    field: Fp,
    alpha: u64,
}

impl SplitPrime {
    /// Uses the smaller square root of `D` mod `p`.
    pub fn new(d: QuadDisc, p: u64) -> Option<Self> {
        if split_type(d, p) != SplitType::Split {
            return None;
        }
        let dm = (d.d() as i128).rem_euclid(p as i128) as u64;
        let gamma = sqrt_mod_p(dm, p)?;
        Some(Self::with_gamma(d, p, gamma))
    }

    pub fn with_gamma(d: QuadDisc, p: u64, gamma: u64) -> Self {
        let alpha = if d.one_mod_four() {
            mul_mod(add_mod(1, gamma, p), inv_mod(2, p).expect("odd p"), p)
        } else {
            gamma
        };
        SplitPrime { gamma, field: Fp::new(p), alpha }
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }
}

impl PrimeReduction for SplitPrime {
    type F = Fp;

    fn field(&self) -> &Fp {
        &self.field
    }

    fn alpha(&self) -> u64 {
        self.alpha
    }
}

pub fn reduce_split(a: &QuadInt, d: QuadDisc, p: u64, gamma: u64) -> u64 {
    SplitPrime::with_gamma(d, p, gamma).reduce(a)
}

/// `O_K / (p)` for inert `p`, identified with `F_p[t]/(t^2 - s)`.
///
/// `sqrt D` goes to `r t` with `r^2 s = D` and `r` the smaller root.
#[derive(Clone, Debug)]
pub struct InertPrime {
    field: Fp2,
    alpha: [u64; 2],
}

impl InertPrime {
    pub fn new(d: QuadDisc, p: u64) -> Option<Self> {
        if split_type(d, p) != SplitType::Inert {
            return None;
        }
        let field = Fp2::quadratic(p);
        let s = field.nonresidue();
        let dm = (d.d() as i128).rem_euclid(p as i128) as u64;
        let r = sqrt_mod_p(mul_mod(dm, inv_mod(s, p)?, p), p)?;
        let alpha = if d.one_mod_four() {
            let h = inv_mod(2, p)?;
            [h, mul_mod(r, h, p)]
        } else {
            [0, r]
        };
        Some(InertPrime { field, alpha })
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }
}

impl PrimeReduction for InertPrime {
    type F = Fp2;

    fn field(&self) -> &Fp2 {
        &self.field
    }

    fn alpha(&self) -> [u64; 2] {
        self.alpha
    }
}

pub fn reduce_inert(a: &QuadInt, d: QuadDisc, p: u64) -> Option<[u64; 2]> {
    InertPrime::new(d, p).map(|k| k.reduce(a))
}
