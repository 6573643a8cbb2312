//! Brute-force references: point counts, direct expansion of
//! `h(x+beta)^{(p-1)/2}`, and plain left-to-right matrix chains.
//!
//! Used by the tests and by the small-prime path of the driver.

use num_complex::Complex64;
use rug::Integer;

use crate::arith::int_mod;
use crate::finite_fields::{poly_eval, Field, Fp, Fp2, Fp3, FpExt};
use crate::model_builder::{monomials, ConicQuartic, CONIC_MONOMIALS};
use crate::quad_ring::{PrimeReduction, QuadDisc, QuadIntPoly};
use crate::remainder_forest::{qvec_mul, QVec, TreeInput};
use crate::{Error, Result};

/// Largest field size `p^k` accepted by the counters.
pub const COUNT_GUARD: u128 = 100_000_000;
pub const UP_GUARD: u64 = 2000;
pub const CHAIN_GUARD: usize = 256;

/// `chi(v)` for every `v` in `F_p`.
fn legendre_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..=p / 2 {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Horner evaluation followed by a difference table along `x0, x0+1, ...`;
/// returns `sum chi(h(x0 + i))` for `i` in `0..p`.
fn coset_chi_sum<const K: usize>(
    field: &FpExt<K>,
    h: &[[u64; K]],
    x0: [u64; K],
    norm: &impl Fn(&[u64; K]) -> u64,
    table: &[i8],
) -> i64 {
    let p = field.p();
    let deg = h.len() - 1;
    let one = field.one();
    let mut diffs: Vec<[u64; K]> = Vec::with_capacity(deg + 1);
    let mut x = x0;
    for _ in 0..=deg {
        diffs.push(poly_eval(field, h, x));
        x = field.add(x, one);
    }
    for j in 1..=deg {
        for i in (j..=deg).rev() {
            diffs[i] = field.sub(diffs[i], diffs[i - 1]);
        }
    }
    let f = field.base();
    let mut s = 0i64;
    for _ in 0..p {
        s += table[norm(&diffs[0]) as usize] as i64;
        for i in 0..deg {
            let next = diffs[i + 1];
            for c in 0..K {
                diffs[i][c] = f.addr(diffs[i][c], next[c]);
            }
        }
    }
    s
}

fn guard(p: u64, k: u32) -> Result<()> {
    if (p as u128).pow(k) > COUNT_GUARD {
        return Err(Error::Guard(format!("field of size {p}^{k} too large for naive counting")));
    }
    Ok(())
}

/// Sum of `chi(h(x))` over `F_{p^k}` for `h` with coefficients in `F_p`.
pub fn char_sum(h: &[u64], p: u64, k: u32) -> Result<i64> {
    guard(p, k)?;
    let table = legendre_table(p);
    let fp = Fp::new(p);
    Ok(match k {
        1 => {
            let field = FpExt::<1>::new(p, [0]);
            let hk: Vec<[u64; 1]> = h.iter().map(|&c| [c % p]).collect();
            coset_chi_sum(&field, &hk, [0], &|a: &[u64; 1]| a[0], &table)
        }
        2 => {
            let field = Fp2::quadratic(p);
            let [m0, m1] = field.modulus();
            let hk: Vec<[u64; 2]> = h.iter().map(|&c| field.from_u64(c)).collect();
            // N(a0 + a1 t) = a0^2 - m1 a0 a1 + m0 a1^2
            let norm = |a: &[u64; 2]| {
                let t = fp.subr(fp.mulr(a[0], a[0]), fp.mulr(m1, fp.mulr(a[0], a[1])));
                fp.addr(t, fp.mulr(m0, fp.mulr(a[1], a[1])))
            };
            (0..p).map(|y| coset_chi_sum(&field, &hk, [0, y], &norm, &table)).sum()
        }
        3 => {
            let field = Fp3::cubic(p);
            let [m0, m1, m2] = field.modulus();
            let hk: Vec<[u64; 3]> = h.iter().map(|&c| field.from_u64(c)).collect();
            // times t: (x0, x1, x2) -> (-m0 x2, x0 - m1 x2, x1 - m2 x2)
            let times_t = |x: [u64; 3]| {
                [
                    fp.negr(fp.mulr(m0, x[2])),
                    fp.subr(x[0], fp.mulr(m1, x[2])),
                    fp.subr(x[1], fp.mulr(m2, x[2])),
                ]
            };
            let norm = |a: &[u64; 3]| {
                let b = times_t(*a);
                let c = times_t(b);
                let minor = |i: usize, j: usize| fp.subr(fp.mulr(b[i], c[j]), fp.mulr(b[j], c[i]));
                let d = fp.addr(fp.mulr(a[0], minor(1, 2)), fp.mulr(a[2], minor(0, 1)));
                fp.subr(d, fp.mulr(a[1], minor(0, 2)))
            };
            let mut s = 0;
            for y1 in 0..p {
                for y2 in 0..p {
                    s += coset_chi_sum(&field, &hk, [0, y1, y2], &norm, &table);
                }
            }
            s
        }
        _ => return Err(Error::Guard(format!("extension degree {k} not supported"))),
    })
}

/// `#C(F_{p^k})` for the smooth model of `y^2 = h(x)`, `deg h` in {7, 8}.
pub fn naive_count(h: &[u64], p: u64, k: u32) -> Result<u64> {
    let deg = h.len() - 1;
    let q = (p as i128).pow(k);
    let s = char_sum(h, p, k)? as i128;
    let infinity = match deg {
        7 => 1,
        8 => {
            let lead = crate::arith::jacobi(h[8] as i128, p) as i128;
            1 + lead.pow(k)
        }
        _ => return Err(Error::NotGenus3(format!("degree {deg} model"))),
    };
    Ok((q + s + infinity) as u64)
}

/// `(a1, a2, a3)` from `N_1, N_2, N_3` by Newton's identities.
pub fn a_from_counts(p: u64, n: [u64; 3]) -> [i64; 3] {
    let p = p as i128;
    let s: Vec<i128> = (1..=3).map(|k| p.pow(k as u32) + 1 - n[k - 1] as i128).collect();
    let a1 = -s[0];
    let a2 = (s[0] * s[0] - s[1]) / 2;
    let a3 = -(s[0].pow(3) - 3 * s[0] * s[1] + 2 * s[2]) / 6;
    [a1 as i64, a2 as i64, a3 as i64]
}

/// Full `L_p` coefficients by counting over `F_p`, `F_{p^2}`, `F_{p^3}`.
pub fn naive_lpoly(h: &[u64], p: u64) -> Result<[i64; 3]> {
    Ok(a_from_counts(p, [naive_count(h, p, 1)?, naive_count(h, p, 2)?, naive_count(h, p, 3)?]))
}

/// `(a1, a2)` from `N_1, N_2` only.
pub fn naive_a1a2(h: &[u64], p: u64) -> Result<[i64; 2]> {
    let [a1, a2, _] = a_from_counts(p, [naive_count(h, p, 1)?, naive_count(h, p, 2)?, 0]);
    Ok([a1, a2])
}

fn reduce_form<F: Field>(k: &F, c: &[Integer]) -> Vec<F::Elem> {
    c.iter().map(|x| k.from_u64(int_mod(x, k.p()))).collect()
}

fn eval_form<F: Field>(k: &F, c: &[F::Elem], mons: &[[u32; 3]], pt: [F::Elem; 3]) -> F::Elem {
    let mut s = k.zero();
    for (&ci, m) in c.iter().zip(mons) {
        let mut t = ci;
        for j in 0..3 {
            t = k.mul(t, k.pow(pt[j], m[j] as u128));
        }
        s = k.add(s, t);
    }
    s
}

/// `#C(F_q)` directly from the conic model: every projective point `P` on
/// `g = 0` contributes `1 + chi(f(P))`.
pub fn conic_count<F: Field>(k: &F, cq: &ConicQuartic) -> Result<u64> {
    if k.order() * k.order() > COUNT_GUARD {
        return Err(Error::Guard("conic enumeration too large".into()));
    }
    let g = reduce_form(k, &cq.g);
    let f = reduce_form(k, &cq.f);
    let quartic = monomials(4);
    let q = k.order();
    let mut total = 0u64;
    let mut visit = |pt: [F::Elem; 3]| {
        if k.is_zero(eval_form(k, &g, &CONIC_MONOMIALS, pt)) {
            total += (1 + k.chi(eval_form(k, &f, &quartic, pt))) as u64;
        }
    };
    for i in 0..q {
        for j in 0..q {
            visit([k.element(i), k.element(j), k.one()]);
        }
    }
    for i in 0..q {
        visit([k.element(i), k.one(), k.zero()]);
    }
    visit([k.one(), k.zero(), k.zero()]);
    Ok(total)
}

/// Coefficients of `x^{p-1}, x^{p-2}, x^{p-3}` in `h(x+beta)^{(p-1)/2}`
/// modulo the prime `red`, by repeated multiplication.
pub fn naive_up<R: PrimeReduction>(h: &QuadIntPoly, beta: i64, red: &R) -> Result<[<R::F as Field>::Elem; 3]> {
    let k = red.field();
    let p = k.p();
    if p > UP_GUARD {
        return Err(Error::Guard(format!("direct expansion at p = {p}")));
    }
    let hb: Vec<_> = h.shift(beta).coeffs.iter().map(|c| red.reduce(c)).collect();
    let mut acc = vec![k.one()];
    for _ in 0..(p - 1) / 2 {
        let mut next = vec![k.zero(); acc.len() + hb.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, &b) in hb.iter().enumerate() {
                next[i + j] = k.add(next[i + j], k.mul(a, b));
            }
        }
        acc = next;
    }
    let coeff = |i: i64| if i >= 0 { acc.get(i as usize).copied().unwrap_or(k.zero()) } else { k.zero() };
    let p = p as i64;
    Ok([coeff(p - 1), coeff(p - 2), coeff(p - 3)])
}

/// `V A_0 ... A_{n-1} mod m_n`, computed exactly and reduced at the end.
pub fn naive_chain(input: &TreeInput, n: usize) -> Result<QVec> {
    if input.a.len() > CHAIN_GUARD {
        return Err(Error::Guard(format!("chain of length {}", input.a.len())));
    }
    let d: QuadDisc = input.disc;
    let mut v = input.v.clone();
    for a in &input.a[..n] {
        v = qvec_mul(&v, a, d);
    }
    Ok(v.reduce(&Integer::from(input.m[n])))
}

/// Reciprocal roots of `L_p(T) = 1 + a1 T + a2 T^2 + a3 T^3 + p a2 T^4 +
/// p^2 a1 T^5 + p^3 T^6`.
///
/// Solves the real Weil polynomial `z^3 + a1 z^2 + (a2 - 3p) z + a3 - 2p a1`
/// for `z = X + p/X`, then `X^2 - z X + p = 0`.
pub fn reciprocal_roots(p: u64, a: [i64; 3]) -> Vec<Complex64> {
    let pf = p as f64;
    let c = [(a[2] as f64) - 2.0 * pf * a[0] as f64, a[1] as f64 - 3.0 * pf, a[0] as f64];
    let zs = cubic_roots(c);
    let mut out = Vec::with_capacity(6);
    for z in zs {
        let disc = (z * z - 4.0 * pf).sqrt();
        out.push((z + disc) / 2.0);
        out.push((z - disc) / 2.0);
    }
    out
}

/// Roots of the monic cubic `z^3 + c2 z^2 + c1 z + c0` (Durand-Kerner,
/// then Newton polishing).
fn cubic_roots(c: [f64; 3]) -> [Complex64; 3] {
    let f = |z: Complex64| ((z + c[2]) * z + c[1]) * z + c[0];
    let df = |z: Complex64| (z * 3.0 + 2.0 * c[2]) * z + c[1];
    let scale = 1.0 + c.iter().fold(0.0f64, |m, x| m.max(x.abs().powf(1.0 / 3.0).max(x.abs().sqrt())));
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [seed * scale, seed.powu(2) * scale, seed.powu(3) * scale];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = f(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-15 * scale {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = df(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = f(*zi) / d;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Largest `| |X| - sqrt p | / sqrt p` over the reciprocal roots.
pub fn root_deviation(p: u64, a: [i64; 3]) -> f64 {
    let r = (p as f64).sqrt();
    reciprocal_roots(p, a).iter().map(|x| (x.norm() - r).abs() / r).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_below;
    use crate::quad_ring::{QuadInt, SplitPrime};
    use crate::remainder_forest::QMat;

    #[test]
    fn odd_degree_formula_sanity() {
        // y^2 = x: sum chi(x) = 0, so one point per x plus infinity
        for p in [5u64, 7, 11] {
            assert_eq!(char_sum(&[0, 1], p, 1).unwrap(), 0);
        }
    }

    #[test]
    fn counts_by_difference_table_match_direct() {
        let h = [3u64, 1, 4, 1, 5, 9, 2, 6, 5];
        for p in [11u64, 13, 17] {
            for k in 1..=3u32 {
                let s = char_sum(&h, p, k).unwrap();
                let direct: i64 = match k {
                    1 => {
                        let f = Fp::new(p);
                        let hp: Vec<u64> = h.iter().map(|c| c % p).collect();
                        (0..p).map(|x| f.chi(poly_eval(&f, &hp, x)) as i64).sum()
                    }
                    2 => {
                        let f = Fp2::quadratic(p);
                        let hp: Vec<_> = h.iter().map(|&c| f.from_u64(c)).collect();
                        (0..(p * p) as u128).map(|i| f.chi(poly_eval(&f, &hp, f.element(i))) as i64).sum()
                    }
                    _ => {
                        let f = Fp3::cubic(p);
                        let hp: Vec<_> = h.iter().map(|&c| f.from_u64(c)).collect();
                        (0..(p * p * p) as u128).map(|i| f.chi(poly_eval(&f, &hp, f.element(i))) as i64).sum()
                    }
                };
                assert_eq!(s, direct, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn nonresidue_lead_has_no_points_at_infinity() {
        let p = 7;
        let h = [1u64, 0, 0, 0, 0, 0, 0, 0, 3];
        let s = char_sum(&h, p, 1).unwrap();
        assert_eq!(naive_count(&h, p, 1).unwrap() as i64, 7 + s);
    }

    #[test]
    fn newton_identities() {
        let p = 13;
        assert_eq!(a_from_counts(p, [14, 170, 2198]), [0, 0, 0]);
        let [a1, _, _] = a_from_counts(p, [p, 0, 0]);
        assert_eq!(a1, -1);
    }

    #[test]
    fn weil_bounds_on_counts() {
        let h = [1u64, 2, 0, 5, 0, 1, 3, 0, 1];
        for p in primes_below(60).into_iter().skip(4) {
            let a = naive_lpoly(&h, p).unwrap();
            let pf = p as f64;
            assert!((a[0] as f64).abs() <= 6.0 * pf.sqrt());
            assert!((a[1] as f64).abs() <= 15.0 * pf);
            assert!((a[2] as f64).abs() <= 20.0 * pf.powf(1.5));
            assert!(root_deviation(p, a) < 1e-6, "p={p} a={a:?}");
        }
    }

    #[test]
    fn up_small_examples() {
        let d = QuadDisc::new(-1).unwrap();
        let h = QuadIntPoly::from_ints(&[3, 1, 0, 0, 0, 0, 0, 0, 1]);
        let red = SplitPrime::new(d, 5).unwrap();
        assert_eq!(naive_up(&h, 0, &red).unwrap(), [0, 0, 1]);
        // p = 3: the coefficients of x^2, x, 1 of h itself
        let h = QuadIntPoly::from_ints(&[2, 1, 1, 0, 0, 0, 0, 0, 1]);
        let red = crate::quad_ring::InertPrime::new(d, 3).unwrap();
        let k = red.field();
        assert_eq!(naive_up(&h, 0, &red).unwrap(), [k.from_u64(1), k.from_u64(1), k.from_u64(2)]);
    }

    #[test]
    fn chain_conventions() {
        let d = QuadDisc::new(5).unwrap();
        let input = TreeInput {
            disc: d,
            v: QVec::from_entries(&[QuadInt::new(3, 1)]),
            a: vec![QMat::from_entries(1, &[QuadInt::new(2, 1)]), QMat::identity(1)],
            m: vec![1, 7],
        };
        assert_eq!(naive_chain(&input, 0).unwrap(), QVec::zero(1));
        // (3 + a)(2 + a) = 6 + 5a + a^2 = 7 + 6a with a^2 = a + 1
        assert_eq!(naive_chain(&input, 1).unwrap(), QVec::from_entries(&[QuadInt::new(0, 6)]));
    }

    #[test]
    fn conic_side_counts_agree_with_sphere_model() {
        let cq = ConicQuartic::new([1, 0, 0, 1, 0, 1], [1, 0, -1, -2, -2, -1, 0, -1, -1, 1, -2, -1, -1, 0, 1]);
        for p in [13u64, 17, 19] {
            let n = conic_count(&Fp::new(p), &cq).unwrap() as i64;
            assert!((n - p as i64 - 1).abs() as f64 <= 6.0 * (p as f64).sqrt());
        }
    }
}
