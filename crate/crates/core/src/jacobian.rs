//! Arithmetic in `Jac(C)(F_p)` for genus-3 hyperelliptic curves over `F_p`.
//!
//! Two model kinds:
//!
//! * odd: `y^2 = h(x)`, `h` monic of degree 7, one point at infinity;
//!   classes are reduced Mumford pairs `[u, v]` (Cantor's algorithm).
//! * balanced: `h` monic of degree 8, two rational points `inf+`, `inf-`
//!   at infinity. A class is `[u, v, n]`, standing for
//!   `div(u, v) + n inf+ + m inf- - D_inf` with `m = 3 - deg u - n` and
//!   `D_inf = 2 inf+ + inf-`. Reduced means `deg u <= 3`, `n >= 0`,
//!   `m >= 0`; the identity is `[1, 0, 2]`.
//!
//! Reduction in the balanced model uses the functions `y - w(x)` where
//! `w = v mod u` is adjusted to agree with `+V` or `-V`, `V` being the
//! polynomial part of `sqrt h` at `inf+`.

use std::cell::Cell;
use std::collections::HashMap;

use rand::Rng;

use crate::arith::{factor, int_mod, smallest_nonresidue};
use crate::finite_fields::{
    poly_divrem, poly_eval, poly_is_squarefree, poly_monic, poly_mul, poly_powmod, poly_rem,
    poly_roots, poly_sqrt_mod, poly_sub, poly_trim, Field, Fp,
};
use crate::model_builder::{monomials, ConicQuartic, AUX_LINES};
use crate::quad_ring::{PrimeReduction, QuadIntPoly, SplitPrime};
use crate::{Error, Result};

type Poly = Vec<u64>;

thread_local! {
    static GROUP_OPS: Cell<u64> = const { Cell::new(0) };
}

/// Group operations performed on this thread since the last reset.
pub fn group_ops() -> u64 {
    GROUP_OPS.with(|c| c.get())
}

pub fn reset_group_ops() {
    GROUP_OPS.with(|c| c.set(0));
}

fn count_op() {
    GROUP_OPS.with(|c| c.set(c.get() + 1));
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Odd,
    Balanced,
}

#[derive(Clone, Debug)]
pub struct CurveFp {
    k: Fp,
    h: Poly,
    kind: ModelKind,
    // balanced only: V with deg(h - V^2) <= 3, and ord_{inf+}(y - V)
    vinf: Poly,
    ord_v: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JacElement {
    pub u: Poly,
    pub v: Poly,
    /// Weight at `inf+`; always 0 in the odd model.
    pub n: u8,
}

fn deg(a: &[u64]) -> i32 {
    a.len() as i32 - 1
}

impl CurveFp {
    /// `y^2 = h` with `h` monic, squarefree, of degree 7 or 8.
    pub fn new(p: u64, h: &[u64]) -> Result<Self> {
        let k = Fp::new(p);
        let mut h: Poly = h.iter().map(|&c| c % p).collect();
        poly_trim(&k, &mut h);
        let kind = match h.len() {
            8 => ModelKind::Odd,
            9 => ModelKind::Balanced,
            _ => return Err(Error::BadReduction(p)),
        };
        if *h.last().unwrap() != 1 || !poly_is_squarefree(&k, &h) {
            return Err(Error::BadReduction(p));
        }
        let (vinf, ord_v) = match kind {
            ModelKind::Odd => (Vec::new(), 0),
            ModelKind::Balanced => {
                let v = sqrt_at_infinity(&k, &h);
                let r = poly_sub(&k, &h, &poly_mul(&k, &v, &v));
                (v, 4 - deg(&r))
            }
        };
        Ok(CurveFp { k, h, kind, vinf, ord_v })
    }

    pub fn p(&self) -> u64 {
        self.k.p()
    }

    pub fn field(&self) -> &Fp {
        &self.k
    }

    pub fn h(&self) -> &[u64] {
        &self.h
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn identity(&self) -> JacElement {
        JacElement {
            u: vec![1],
            v: Vec::new(),
            n: match self.kind {
                ModelKind::Odd => 0,
                ModelKind::Balanced => 2,
            },
        }
    }

    /// Checks `u` monic of degree at most 3, `deg v < deg u`,
    /// `u | v^2 - h`, and the balancing range.
    pub fn is_valid(&self, a: &JacElement) -> bool {
        let k = &self.k;
        if a.u.is_empty() || *a.u.last().unwrap() != 1 || a.u.len() > 4 || a.v.len() >= a.u.len() {
            return false;
        }
        let r = poly_rem(k, &poly_sub(k, &poly_mul(k, &a.v, &a.v), &self.h), &a.u);
        let n_ok = match self.kind {
            ModelKind::Odd => a.n == 0,
            ModelKind::Balanced => (a.n as i32) <= 3 - deg(&a.u),
        };
        r.is_empty() && n_ok
    }

    // Cantor composition: (u, v) and the degree of the removed gcd
    fn compose(&self, a: &JacElement, b: &JacElement) -> (Poly, Poly, i32) {
        let k = &self.k;
        let (d1, e1, e2) = xgcd(k, &a.u, &b.u);
        let (d, s1, s2, s3) = if d1.len() == 1 {
            (d1, e1, e2, Vec::new())
        } else {
            let (d, c1, c2) = xgcd(k, &d1, &add(k, &a.v, &b.v));
            (d, poly_mul(k, &c1, &e1), poly_mul(k, &c1, &e2), c2)
        };
        let mut u = poly_mul(k, &a.u, &b.u);
        if d.len() > 1 {
            u = exact_div(k, &u, &poly_mul(k, &d, &d));
        }
        let mut num = add(k, &poly_mul(k, &poly_mul(k, &s1, &a.u), &b.v), &poly_mul(k, &poly_mul(k, &s2, &b.u), &a.v));
        if !s3.is_empty() {
            let t = add(k, &poly_mul(k, &a.v, &b.v), &self.h);
            num = add(k, &num, &poly_mul(k, &s3, &t));
        }
        let v = if d.len() > 1 { exact_div(k, &num, &d) } else { num };
        let v = poly_rem(k, &v, &u);
        (u, v, deg(&d))
    }

    /// `(u', v', ord_{inf+}(y - w))` for one step with `y - w`.
    fn step(&self, u: &[u64], w: &[u64]) -> (Poly, Poly, i32) {
        let k = &self.k;
        let num = poly_sub(k, &self.h, &poly_mul(k, w, w));
        let u2 = poly_monic(k, &exact_div(k, &num, u));
        let v2 = poly_rem(k, &neg(k, w), &u2);
        let ord = if self.kind == ModelKind::Balanced {
            let diff = poly_sub(k, &self.vinf, w);
            if diff.is_empty() {
                self.ord_v
            } else {
                -deg(&diff)
            }
        } else {
            0
        };
        (u2, v2, ord)
    }

    fn reduce(&self, mut u: Poly, mut v: Poly, mut n: i32) -> JacElement {
        let k = &self.k;
        match self.kind {
            ModelKind::Odd => {
                while u.len() > 4 {
                    let (u2, v2, _) = self.step(&u, &v);
                    u = u2;
                    v = v2;
                }
                JacElement { u: poly_monic(k, &u), v: poly_rem(k, &v, &u), n: 0 }
            }
            ModelKind::Balanced => {
                loop {
                    let du = deg(&u);
                    let m = 3 - du - n;
                    let sign = if du > 3 {
                        if n >= m {
                            1
                        } else {
                            -1
                        }
                    } else if n < 0 {
                        -1
                    } else if m < 0 {
                        1
                    } else {
                        break;
                    };
                    // w = sV - ((sV - v) mod u)
                    let sv = if sign == 1 { self.vinf.clone() } else { neg(k, &self.vinf) };
                    let r = poly_rem(k, &poly_sub(k, &sv, &v), &u);
                    let w = poly_sub(k, &sv, &r);
                    let (u2, v2, ord) = self.step(&u, &w);
                    n = n - deg(&u2) - ord;
                    u = u2;
                    v = v2;
                }
                let u = poly_monic(k, &u);
                let v = poly_rem(k, &v, &u);
                JacElement { u, v, n: n as u8 }
            }
        }
    }

    pub fn add(&self, a: &JacElement, b: &JacElement) -> JacElement {
        count_op();
        let (u, v, dd) = self.compose(a, b);
        let n = a.n as i32 + b.n as i32 + dd - 2;
        self.reduce(u, v, n)
    }

    pub fn neg(&self, a: &JacElement) -> JacElement {
        let k = &self.k;
        let v = neg(k, &a.v);
        match self.kind {
            ModelKind::Odd => JacElement { u: a.u.clone(), v, n: 0 },
            ModelKind::Balanced => {
                let n = 4 - deg(&a.u) - a.n as i32;
                self.reduce(a.u.clone(), v, n)
            }
        }
    }

    /// `e * a` by double-and-add.
    pub fn mul(&self, e: u128, a: &JacElement) -> JacElement {
        let mut r = self.identity();
        if e == 0 {
            return r;
        }
        for i in (0..128 - e.leading_zeros()).rev() {
            r = self.add(&r, &r);
            if (e >> i) & 1 == 1 {
                r = self.add(&r, a);
            }
        }
        r
    }

    /// A random class: `u` monic irreducible of degree `d` (chosen with
    /// weight `1/d`), `v` a square root of `h` modulo `u` with random sign,
    /// and a random balancing weight.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> JacElement {
        let k = &self.k;
        let p = k.p();
        loop {
            let d = match rng.gen_range(0..11) {
                0..=5 => 1,
                6..=8 => 2,
                _ => 3,
            };
            let mut u: Poly = (0..d).map(|_| rng.gen_range(0..p)).collect();
            u.push(1);
            if d > 1 && !is_irreducible_small(k, &u) {
                continue;
            }
            let Ok(mut v) = poly_sqrt_mod(k, &self.h, &u) else {
                continue;
            };
            if rng.gen::<bool>() {
                v = neg(k, &v);
            }
            let n = match self.kind {
                ModelKind::Odd => 0,
                ModelKind::Balanced => rng.gen_range(0..=(3 - d as u8)),
            };
            return JacElement { u, v, n };
        }
    }

    /// Least `j < count` with `(c + j step) a = 0`, by baby steps and
    /// giant steps.
    pub fn bsgs_annihilator(&self, a: &JacElement, c: u128, step: u128, count: u64) -> Option<u64> {
        if count == 0 {
            return None;
        }
        let baby = ((count as f64).sqrt().ceil() as u64).max(1);
        BabySteps::new(self, a, step, baby).search(c, count)
    }

    /// Exact order of `a` given a multiple `m`.
    pub fn order_from_multiple(&self, a: &JacElement, m: u128) -> Result<OrderResult> {
        if m == 0 || self.mul(m, a) != self.identity() {
            return Err(Error::NotMultiple);
        }
        let factors = factor(m);
        let mut order = m;
        for &(q, _) in &factors {
            while order % q == 0 && self.mul(order / q, a) == self.identity() {
                order /= q;
            }
        }
        Ok(OrderResult { order, multiple: m, factors })
    }
}

/// Baby-step table `{-i s a : i < size}` for the step `s`, reusable for
/// any number of progressions `c + j s` over the same element.
pub struct BabySteps<'a> {
    curve: &'a CurveFp,
    a: JacElement,
    table: HashMap<JacElement, u64>,
    size: u64,
    // size * s * a
    giant: JacElement,
}

impl<'a> BabySteps<'a> {
    pub fn new(curve: &'a CurveFp, a: &JacElement, step: u128, size: u64) -> Self {
        let size = size.max(1);
        let s = curve.mul(step, a);
        let ms = curve.neg(&s);
        let mut table = HashMap::with_capacity(size as usize);
        let mut x = curve.identity();
        for i in 0..size {
            table.entry(x.clone()).or_insert(i);
            x = curve.add(&x, &ms);
        }
        BabySteps { curve, a: a.clone(), table, size, giant: curve.neg(&x) }
    }

    /// Least `j < count` with `(c + j s) a = 0`.
    pub fn search(&self, c: u128, count: u64) -> Option<u64> {
        let mut y = self.curve.mul(c, &self.a);
        let mut base = 0u64;
        while base < count {
            if let Some(&i) = self.table.get(&y) {
                let j = base + i;
                return (j < count).then_some(j);
            }
            y = self.curve.add(&y, &self.giant);
            base += self.size;
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderResult {
    pub order: u128,
    pub multiple: u128,
    pub factors: Vec<(u128, u32)>,
}

fn add(k: &Fp, a: &[u64], b: &[u64]) -> Poly {
    crate::finite_fields::poly_add(k, a, b)
}

fn neg(k: &Fp, a: &[u64]) -> Poly {
    a.iter().map(|&c| k.negr(c)).collect()
}

fn exact_div(k: &Fp, a: &[u64], b: &[u64]) -> Poly {
    let (q, r) = poly_divrem(k, a, b);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

/// Monic gcd `g` with `s a + t b = g`.
fn xgcd(k: &Fp, a: &[u64], b: &[u64]) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    poly_trim(k, &mut r0);
    poly_trim(k, &mut r1);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(k, &r0, &r1);
        let s = poly_sub(k, &s0, &poly_mul(k, &q, &s1));
        let t = poly_sub(k, &t0, &poly_mul(k, &q, &t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(&l) => {
            let li = k.invr(l);
            let sc = |x: &[u64]| crate::finite_fields::poly_scale(k, x, li);
            (sc(&r0), sc(&s0), sc(&t0))
        }
    }
}

/// `V` monic of degree 4 with `deg(h - V^2) <= 3`, for monic `h` of degree 8.
fn sqrt_at_infinity(k: &Fp, h: &[u64]) -> Poly {
    let mut c = [0u64; 5];
    c[4] = 1;
    let half = k.invr(2);
    for i in (0..4).rev() {
        let mut s = 0;
        for j in i + 1..=4 {
            let l = 4 + i - j;
            if l > i && l <= 4 {
                s = k.addr(s, k.mulr(c[j], c[l]));
            }
        }
        c[i] = k.mulr(k.subr(h[4 + i], s), half);
    }
    c.to_vec()
}

/// Irreducibility for degree 2 and 3 (no roots).
fn is_irreducible_small(k: &Fp, u: &[u64]) -> bool {
    let x = vec![0, 1];
    let xp = poly_powmod(k, &x, k.p() as u128, u);
    let g = crate::finite_fields::poly_gcd(k, u, &poly_sub(k, &xp, &x));
    g.len() == 1
}

fn shift(k: &Fp, h: &[u64], x0: u64) -> Poly {
    // h(x + x0) by repeated synthetic division
    let mut c = h.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            c[j] = k.addr(c[j], k.mulr(x0, c[j + 1]));
        }
    }
    c
}

/// Monic genus-3 model over `F_p` from any squarefree binary octic
/// `h(x)` (degree 7 or 8). A rational root moves to infinity and gives the
/// odd model; otherwise a point with square `y^2` at infinity gives the
/// balanced model.
pub fn normalize_fp(p: u64, h: &[u64]) -> Result<CurveFp> {
    let k = Fp::new(p);
    let mut h: Poly = h.iter().map(|&c| c % p).collect();
    poly_trim(&k, &mut h);
    if h.len() < 8 || h.len() > 9 || !poly_is_squarefree(&k, &h) {
        return Err(Error::BadReduction(p));
    }
    let odd = |g: &[u64]| -> Result<CurveFp> {
        // y^2 = sum g_i x^i, deg 7, lead c: x = s/c, y = Y/c^3
        let c = g[7];
        let ci = k.invr(c);
        let out: Poly = (0..8).map(|i| k.mulr(g[i], k.pow(if i <= 6 { c } else { ci }, (6i64 - i as i64).unsigned_abs() as u128))).collect();
        CurveFp::new(p, &out)
    };
    if h.len() == 8 {
        return odd(&h);
    }
    let roots = poly_roots(&k, &h);
    if let Some(&r) = roots.first() {
        let mut rev: Poly = shift(&k, &h, r).into_iter().rev().collect();
        poly_trim(&k, &mut rev);
        return odd(&rev);
    }
    let monic = |g: &[u64]| CurveFp::new(p, &crate::finite_fields::poly_monic(&k, g));
    if k.chi(h[8]) == 1 {
        return monic(&h);
    }
    for x0 in 0..p {
        if k.chi(poly_eval(&k, &h, x0)) == 1 {
            let s = shift(&k, &h, x0);
            let rev: Poly = s.iter().rev().copied().collect();
            return monic(&rev);
        }
    }
    Err(Error::BadReduction(p))
}

/// Quadratic twist `y^2 = d h(x)` with `d` the smallest non-residue.
pub fn twist_model(c: &CurveFp) -> Result<CurveFp> {
    let k = &c.k;
    let d = smallest_nonresidue(k.p());
    let h: Poly = c.h.iter().map(|&x| k.mulr(x, d)).collect();
    normalize_fp(k.p(), &h)
}

/// Model at a split prime from the reduction of `h` modulo `red`.
pub fn fp_model_split(h: &QuadIntPoly, red: &SplitPrime) -> Result<CurveFp> {
    let raw: Poly = h.coeffs.iter().map(|c| red.reduce(c)).collect();
    normalize_fp(red.p(), &raw)
}

/// A point on `g = 0` over `F_p`: `X = 1`, `Y` scanned, `Z` from the
/// quadratic, with `X = 0` tried first.
pub fn conic_point(g: &[u64; 6], k: &Fp) -> Option<[u64; 3]> {
    let p = k.p();
    // g = a X^2 + b XY + c XZ + d Y^2 + e YZ + f Z^2
    let [a, b, c, d, e, f] = *g;
    for x in [0u64, 1] {
        for y in 0..p {
            if x == 0 && y > 1 {
                break;
            }
            // f Z^2 + (c x + e y) Z + (a x^2 + b x y + d y^2)
            let lin = k.addr(k.mulr(c, x), k.mulr(e, y));
            let cst = k.addr(k.addr(k.mulr(a, x * x % p), k.mulr(b, x * y % p)), k.mulr(d, k.mulr(y, y)));
            let z = if f == 0 {
                if lin == 0 {
                    (cst == 0).then_some(0)
                } else {
                    Some(k.mulr(k.negr(cst), k.invr(lin)))
                }
            } else {
                let disc = k.subr(k.mulr(lin, lin), k.mulr(4 % p, k.mulr(f, cst)));
                k.sqrt(disc).map(|s| k.mulr(k.subr(s, lin), k.invr(k.mulr(2, f))))
            };
            if let Some(z) = z {
                if x != 0 || y != 0 || z != 0 {
                    return Some([x, y, z]);
                }
            }
        }
    }
    None
}

/// Model over `F_p` from the conic and quartic: rational point, projection
/// onto an auxiliary line, pullback, normalization.
pub fn fp_model_conic(cq: &ConicQuartic, p: u64) -> Result<CurveFp> {
    let k = Fp::new(p);
    let g: [u64; 6] = std::array::from_fn(|i| int_mod(&cq.g[i], p));
    let f: Vec<u64> = cq.f.iter().map(|c| int_mod(c, p)).collect();
    let p0 = conic_point(&g, &k).ok_or(Error::BadReduction(p))?;
    let gram = [
        [k.mulr(2, g[0]), g[1], g[2]],
        [g[1], k.mulr(2, g[3]), g[4]],
        [g[2], g[4], k.mulr(2, g[5])],
    ];
    let bil = |a: [u64; 3], b: [u64; 3]| {
        let mut s = 0;
        for i in 0..3 {
            for j in 0..3 {
                s = k.addr(s, k.mulr(gram[i][j], k.mulr(a[i], b[j])));
            }
        }
        s
    };
    let aux = AUX_LINES
        .iter()
        .find(|l| {
            let nrm = l.normal();
            (0..3).fold(0, |s, i| k.addr(s, k.mulr(k.from_i64(nrm[i]), p0[i]))) != 0
        })
        .ok_or(Error::BadReduction(p))?;
    let r1 = aux.r1.map(|x| k.from_i64(x));
    let r2 = aux.r2.map(|x| k.from_i64(x));
    let half = k.invr(2);
    // g(Q) = g(r1) + x B(r1, r2) + x^2 g(r2) and B(p0, Q) = B(p0, r1) + x B(p0, r2)
    let gq = [k.mulr(half, bil(r1, r1)), bil(r1, r2), k.mulr(half, bil(r2, r2))];
    let bq = [bil(p0, r1), bil(p0, r2)];
    let psi: Vec<Poly> = (0..3)
        .map(|i| {
            let lhs: Poly = gq.iter().map(|&c| k.mulr(c, p0[i])).collect();
            let rhs = poly_mul(&k, &bq, &[r1[i], r2[i]]);
            let mut out = poly_sub(&k, &lhs, &rhs);
            poly_trim(&k, &mut out);
            out
        })
        .collect();
    let mut h: Poly = Vec::new();
    for (c, m) in f.iter().zip(monomials(4)) {
        if *c == 0 {
            continue;
        }
        let mut t = vec![*c];
        for j in 0..3 {
            for _ in 0..m[j] {
                t = poly_mul(&k, &t, &psi[j]);
            }
        }
        h = add(&k, &h, &t);
    }
    normalize_fp(p, &h)
}
