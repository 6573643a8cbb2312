//! From a conic `g = 0` and quartic `f` over `Z` to a hyperelliptic model
//! `y^2 = h(x)` over `O_K`, `K = Q(sqrt D)`.
//!
//! A rational line meets the conic in a pair of conjugate points over `K`;
//! projecting from one of them parametrizes the conic over `K`, and pulling
//! `f` back along the parametrization gives `h`.

use rug::ops::Pow;
use rug::{Complete, Integer};

use crate::arith::factor;
use crate::quad_ring::{QuadDisc, QuadInt, QuadIntPoly};
use crate::{Error, Result};

/// Exponents of `X^2, XY, XZ, Y^2, YZ, Z^2`.
pub const CONIC_MONOMIALS: [[u32; 3]; 6] = [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]];

/// Exponents of the degree-`deg` monomials in lexicographic order `X > Y > Z`.
pub fn monomials(deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in (0..=deg).rev() {
        for j in (0..=deg - i).rev() {
            out.push([i, j, deg - i - j]);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicQuartic {
    /// Coefficients of `g` on [`CONIC_MONOMIALS`].
    pub g: [Integer; 6],
    /// Coefficients of `f` on `monomials(4)`.
    pub f: [Integer; 15],
}

impl ConicQuartic {
    pub fn new(g: [i64; 6], f: [i64; 15]) -> Self {
        ConicQuartic { g: g.map(Integer::from), f: f.map(Integer::from) }
    }

    /// Matrix `G` with `g(P) = P^T G P / 2`.
    pub fn gram(&self) -> [[Integer; 3]; 3] {
        let [a, b, c, d, e, f] = &self.g;
        [
            [Integer::from(a * 2), b.clone(), c.clone()],
            [b.clone(), Integer::from(d * 2), e.clone()],
            [c.clone(), e.clone(), Integer::from(f * 2)],
        ]
    }

    pub fn gram_det(&self) -> Integer {
        let m = self.gram();
        let t = |a: &Integer, b: &Integer, c: &Integer, d: &Integer| (a * d).complete() - (b * c).complete();
        Integer::from(&m[0][0] * &t(&m[1][1], &m[1][2], &m[2][1], &m[2][2]))
            - Integer::from(&m[0][1] * &t(&m[1][0], &m[1][2], &m[2][0], &m[2][2]))
            + Integer::from(&m[0][2] * &t(&m[1][0], &m[1][1], &m[2][0], &m[2][1]))
    }

    pub fn eval_g(&self, pt: &[Integer; 3]) -> Integer {
        eval_form(&self.g, &CONIC_MONOMIALS, pt)
    }
}

fn eval_form(coeffs: &[Integer], mons: &[[u32; 3]], pt: &[Integer; 3]) -> Integer {
    let mut s = Integer::new();
    for (c, m) in coeffs.iter().zip(mons) {
        let mut t = c.clone();
        for k in 0..3 {
            t *= pt[k].clone().pow(m[k]);
        }
        s += t;
    }
    s
}

/// A rational line in `P^2`, given by two points spanning it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    pub r1: [i64; 3],
    pub r2: [i64; 3],
}

impl Line {
    /// Normal vector `r1 x r2`.
    pub fn normal(&self) -> [i64; 3] {
        let (a, b) = (self.r1, self.r2);
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }
}

/// Lines tried for the base point: `X=0, Y=0, Z=0, X+-Y=0, X+-Z=0, Y+-Z=0`.
pub const SCAN_LINES: [Line; 9] = [
    Line { r1: [0, 1, 0], r2: [0, 0, 1] },
    Line { r1: [1, 0, 0], r2: [0, 0, 1] },
    Line { r1: [1, 0, 0], r2: [0, 1, 0] },
    Line { r1: [1, -1, 0], r2: [0, 0, 1] },
    Line { r1: [1, 1, 0], r2: [0, 0, 1] },
    Line { r1: [1, 0, -1], r2: [0, 1, 0] },
    Line { r1: [1, 0, 1], r2: [0, 1, 0] },
    Line { r1: [0, 1, -1], r2: [1, 0, 0] },
    Line { r1: [0, 1, 1], r2: [1, 0, 0] },
];

/// Auxiliary lines `Z=0, Y=0, X=0`, parametrized as `r1 + x r2`.
pub const AUX_LINES: [Line; 3] = [
    Line { r1: [1, 0, 0], r2: [0, 1, 0] },
    Line { r1: [1, 0, 0], r2: [0, 0, 1] },
    Line { r1: [0, 1, 0], r2: [0, 0, 1] },
];

fn ints(v: [i64; 3]) -> [Integer; 3] {
    v.map(Integer::from)
}

fn bilinear(gram: &[[Integer; 3]; 3], a: &[Integer; 3], b: &[Integer; 3]) -> Integer {
    let mut s = Integer::new();
    for i in 0..3 {
        for j in 0..3 {
            s += Integer::from(&gram[i][j] * &a[i]) * &b[j];
        }
    }
    s
}

/// Writes `n = s^2 * D` with `D` squarefree (sign kept on `D`).
pub fn squarefree_decomposition(n: &Integer) -> Result<(Integer, Integer)> {
    assert!(*n != 0);
    let mut m = n.clone().abs();
    let mut s = Integer::from(1);
    let mut d = Integer::from(n.signum_ref());
    let mut q = 2u32;
    while q <= 1_000_000 && Integer::from(q).square() <= m {
        let mut e = 0;
        while m.is_divisible_u(q) {
            m.div_exact_u_mut(q);
            e += 1;
        }
        s *= Integer::from(q).pow(e / 2);
        if e % 2 == 1 {
            d *= q;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if m > 1 {
        if m.is_perfect_square() {
            s *= m.sqrt();
        } else if let Some(small) = m.to_u128() {
            for (r, e) in factor(small) {
                s *= Integer::from(r).pow(e / 2);
                if e % 2 == 1 {
                    d *= r;
                }
            }
        } else if m.is_probably_prime(30) != rug::integer::IsPrime::No {
            d *= m;
        } else {
            return Err(Error::DiscriminantRange(n.to_string()));
        }
    }
    Ok((s, d))
}

/// One of the two points where `line` meets the conic, over `K = Q(sqrt D)`.
pub fn intersect_line(cq: &ConicQuartic, line: &Line) -> Result<(QuadDisc, [QuadInt; 3])> {
    let gram = cq.gram();
    let (r1, r2) = (ints(line.r1), ints(line.r2));
    let a = cq.eval_g(&r1);
    let b = bilinear(&gram, &r1, &r2);
    let c = cq.eval_g(&r2);
    if a == 0 && b == 0 && c == 0 {
        return Err(Error::DegenerateLine);
    }
    let delta = Integer::from(b.square_ref()) - Integer::from(&a * &c) * 4u32;
    if delta == 0 {
        return Err(Error::DegenerateLine);
    }
    let (s, d) = squarefree_decomposition(&delta)?;
    if d == 1 {
        return Err(Error::SquareDiscriminant);
    }
    let d = d.to_i64().ok_or_else(|| Error::DiscriminantRange(d.to_string()))?;
    let disc = QuadDisc::new(d)?;
    // s/t = (-b + s sqrt D) / 2a
    let coef1 = QuadInt::sqrt_d(disc).scale(&s).sub(&QuadInt::from_int(b));
    let coef2 = Integer::from(&a * 2u32);
    let mut pt: [QuadInt; 3] = std::array::from_fn(|i| {
        coef1.scale(&r1[i]).add(&QuadInt::from_int(Integer::from(&coef2 * &r2[i])))
    });
    let content = pt.iter().fold(Integer::new(), |g, x| g.gcd(&x.content()));
    if content > 1 {
        for x in pt.iter_mut() {
            x.c0.div_exact_mut(&content);
            x.c1.div_exact_mut(&content);
        }
    }
    Ok((disc, pt))
}

/// Projection from `p0`: for `Q(x) = r1 + x r2` on the auxiliary line,
/// the second intersection is `g(Q) p0 - (p0^T G Q) Q`.
pub fn parametrize(cq: &ConicQuartic, disc: QuadDisc, p0: &[QuadInt; 3], aux: &Line) -> Result<[QuadIntPoly; 3]> {
    let normal = aux.normal();
    let on_line = (0..3).fold(QuadInt::zero(), |s, i| s.add(&p0[i].scale(&Integer::from(normal[i]))));
    if on_line.is_zero() {
        return Err(Error::PointOnLine);
    }
    let gram = cq.gram();
    // Q(x) coordinates as integer linear polynomials
    let q: [QuadIntPoly; 3] = std::array::from_fn(|i| QuadIntPoly::from_ints(&[aux.r1[i], aux.r2[i]]));
    // g(Q) = g(r1) + x B(r1, r2) + x^2 g(r2)
    let (r1, r2) = (ints(aux.r1), ints(aux.r2));
    let gq = QuadIntPoly::new(vec![
        QuadInt::from_int(cq.eval_g(&r1)),
        QuadInt::from_int(bilinear(&gram, &r1, &r2)),
        QuadInt::from_int(cq.eval_g(&r2)),
    ]);
    // p0^T G Q(x), linear in x
    let mut bq = QuadIntPoly::default();
    for i in 0..3 {
        for j in 0..3 {
            let c = p0[i].scale(&gram[i][j]);
            bq = bq.add(&q[j].scale(&c, disc));
        }
    }
    let mut psi: [QuadIntPoly; 3] = std::array::from_fn(|i| {
        let lhs = gq.scale(&p0[i], disc);
        lhs.sub(&bq.mul(&q[i], disc))
    });
    let content = psi
        .iter()
        .flat_map(|p| p.coeffs.iter())
        .fold(Integer::new(), |g, x| g.gcd(&x.content()));
    if content > 1 {
        for p in psi.iter_mut() {
            for x in p.coeffs.iter_mut() {
                x.c0.div_exact_mut(&content);
                x.c1.div_exact_mut(&content);
            }
        }
    }
    Ok(psi)
}

/// `f(psi1, psi2, psi3)`.
pub fn pullback(f: &[Integer; 15], psi: &[QuadIntPoly; 3], disc: QuadDisc) -> QuadIntPoly {
    let powers: Vec<Vec<QuadIntPoly>> = psi
        .iter()
        .map(|p| {
            let mut v = vec![QuadIntPoly::from_ints(&[1])];
            for k in 1..=4 {
                let next = v[k - 1].mul(p, disc);
                v.push(next);
            }
            v
        })
        .collect();
    let mut h = QuadIntPoly::default();
    for (c, m) in f.iter().zip(monomials(4)) {
        if *c == 0 {
            continue;
        }
        let t = powers[0][m[0] as usize]
            .mul(&powers[1][m[1] as usize], disc)
            .mul(&powers[2][m[2] as usize], disc);
        h = h.add(&t.scale(&QuadInt::from_int(c.clone()), disc));
    }
    h
}

/// `0, 1, -1, 2, -2, ...`
pub fn scan_order() -> impl Iterator<Item = i64> {
    (0i64..).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 })
}

/// Brings a squarefree `h` of degree 7 or 8 to degree 8 with `h(0) != 0`.
pub fn normalize(h: &QuadIntPoly, disc: QuadDisc) -> Result<QuadIntPoly> {
    let deg = h.degree().unwrap_or(0);
    if h.is_zero() || deg < 7 {
        return Err(Error::NotGenus3(format!("degree {deg} below 7")));
    }
    if deg > 8 {
        return Err(Error::NotGenus3(format!("degree {deg} above 8")));
    }
    if h.discriminant(disc).is_zero() {
        return Err(Error::NotGenus3("h is not squarefree".into()));
    }
    let translate = |h: &QuadIntPoly| {
        let c = scan_order().find(|&c| !h.eval_int(-c).is_zero()).unwrap();
        h.shift(-c)
    };
    let h = if deg == 7 { translate(h).reverse(8) } else { h.clone() };
    Ok(translate(&h))
}

/// The first three `beta >= 0` with `h(beta) != 0`.
pub fn choose_translates(h: &QuadIntPoly) -> [i64; 3] {
    let v: Vec<i64> = (0..).filter(|&b| !h.eval_int(b).is_zero()).take(3).collect();
    [v[0], v[1], v[2]]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperModel {
    pub disc: QuadDisc,
    pub h: QuadIntPoly,
    /// Parametrization used to build `h`, when known.
    pub psi: Option<[QuadIntPoly; 3]>,
    pub translates: [i64; 3],
}

impl HyperModel {
    /// Validates an explicitly given model.
    pub fn new(disc: QuadDisc, h: QuadIntPoly, translates: [i64; 3]) -> Result<Self> {
        if h.degree() != Some(8) {
            return Err(Error::NotGenus3(format!("model degree {:?} is not 8", h.degree())));
        }
        if h.coeff(0).is_zero() {
            return Err(Error::NotGenus3("h(0) = 0".into()));
        }
        if h.discriminant(disc).is_zero() {
            return Err(Error::NotGenus3("h is not squarefree".into()));
        }
        let [a, b, c] = translates;
        if a == b || b == c || a == c {
            return Err(Error::Config("translates must be distinct".into()));
        }
        if translates.iter().any(|&t| h.eval_int(t).is_zero()) {
            return Err(Error::Config("h vanishes at a translate".into()));
        }
        Ok(HyperModel { disc, h, psi: None, translates })
    }

    pub fn discriminant(&self) -> QuadInt {
        self.h.discriminant(self.disc)
    }
}

/// Full construction: scan lines for a base point, project, pull back,
/// normalize, and choose translates.
pub fn build_model(cq: &ConicQuartic) -> Result<HyperModel> {
    if cq.gram_det() == 0 {
        return Err(Error::DegenerateConic);
    }
    let mut last_err = Error::DegenerateLine;
    for line in &SCAN_LINES {
        let (disc, p0) = match intersect_line(cq, line) {
            Ok(x) => x,
            Err(e @ (Error::SquareDiscriminant | Error::DegenerateLine)) => {
                if matches!(e, Error::SquareDiscriminant) || !matches!(last_err, Error::SquareDiscriminant) {
                    last_err = e;
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let psi = AUX_LINES
            .iter()
            .find_map(|aux| parametrize(cq, disc, &p0, aux).ok())
            .ok_or(Error::PointOnLine)?;
        let h = pullback(&cq.f, &psi, disc);
        let h = normalize(&h, disc)?;
        let translates = choose_translates(&h);
        log::debug!("model over Q(sqrt {}), h = {:?}", disc.d(), h.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        return Ok(HyperModel { disc, h, psi: Some(psi), translates });
    }
    Err(last_err)
}
