//! Recovery of `L_p(T)` over `Z` from its reduction modulo `p`.
//!
//! The Weil bounds leave finitely many lifts `(a1, a2, a3)`. For each, the
//! group orders `L_p(1) = #J(F_p)` and `L_p(-1) = #J~(F_p)` (the quadratic
//! twist) run through arithmetic progressions in `a3`; random elements of
//! both Jacobians cut the progressions down until one lift remains.

use rand::Rng;
use rug::Integer;

use crate::arith::{isqrt, sqrt_mod_p};
use crate::finite_fields::{poly_roots, Fp};
use crate::jacobian::{BabySteps, CurveFp, JacElement};
use crate::oracle;
use crate::{Error, Result};

/// `L_p(T) mod p`: `(a1, a2, a3)` at split primes, `(b1, b2, b3)` at
/// inert ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModP {
    Split([u64; 3]),
    Inert([u64; 3]),
}

/// One `(a1, a2)` lift with its `a3` progression `a3_start + j p`,
/// `0 <= j < a3_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub a1: i64,
    pub a2: i64,
    pub a3_start: i64,
    pub a3_count: u64,
}

impl Candidate {
    pub fn a3(&self, j: u64, p: u64) -> i64 {
        self.a3_start + (j * p) as i64
    }

    pub fn coeffs(&self, j: u64, p: u64) -> [i64; 3] {
        [self.a1, self.a2, self.a3(j, p)]
    }

    pub fn a3_range(&self, p: u64) -> Option<(i64, i64)> {
        (self.a3_count > 0).then(|| (self.a3_start, self.a3(self.a3_count - 1, p)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub p: u64,
    pub cands: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.cands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cands.is_empty()
    }

    /// Total number of `(a1, a2, a3)` triples.
    pub fn triples(&self) -> u64 {
        self.cands.iter().map(|c| c.a3_count).sum()
    }

    pub fn contains(&self, a: [i64; 3]) -> bool {
        let p = self.p as i64;
        self.cands.iter().any(|c| {
            c.a1 == a[0] && c.a2 == a[1] && {
                let d = a[2] - c.a3_start;
                d >= 0 && d % p == 0 && ((d / p) as u64) < c.a3_count
            }
        })
    }

    /// Drops lifts that cannot come from a real Weil polynomial with all
    /// roots in `[-2 sqrt p, 2 sqrt p]` and narrows the `a3` progressions
    /// accordingly.
    pub fn refine(&self) -> CandidateSet {
        let p = self.p;
        let cands = self
            .cands
            .iter()
            .filter_map(|c| {
                let (lo, hi) = a3_window(p, c.a1, c.a2)?;
                let (s, e) = c.a3_range(p)?;
                let pi = p as i64;
                let lo = lo.max(s);
                let hi = hi.min(e);
                let first = s + (lo - s + pi - 1).div_euclid(pi) * pi;
                (first <= hi).then(|| Candidate {
                    a1: c.a1,
                    a2: c.a2,
                    a3_start: first,
                    a3_count: ((hi - first) / pi + 1) as u64,
                })
            })
            .collect();
        CandidateSet { p, cands }
    }
}

/// `|a_i| <= C(6, i) p^{i/2}`.
pub fn weil_ok(p: u64, a: [i64; 3]) -> bool {
    let p = p as i128;
    let [a1, a2, a3] = a.map(|x| x as i128);
    a1 * a1 <= 36 * p && a2.abs() <= 15 * p && a3 * a3 <= 400 * p * p * p
}

/// `L_p(1)` and `L_p(-1)`.
pub fn l_at_pm1(p: u64, a: [i64; 3]) -> (i128, i128) {
    let p = p as i128;
    let [a1, a2, a3] = a.map(|x| x as i128);
    let base = p * p * p + 1;
    let plus = base + (p * p + 1) * a1 + (p + 1) * a2 + a3;
    let minus = base - (p * p + 1) * a1 + (p + 1) * a2 - a3;
    (plus, minus)
}

/// Lifts `r mod p` into the open interval `(-bound, bound)`; the bounds
/// used here are irrational, so the endpoints never occur.
fn lifts(r: u64, p: u64, inside: impl Fn(i128) -> bool) -> Vec<i64> {
    // every bound used is below 16p
    let p = p as i128;
    (-16..=16).map(|t| r as i128 + t * p).filter(|&x| inside(x)).map(|x| x as i64).collect()
}

fn a3_progression(r: u64, p: u64) -> (i64, u64) {
    let bound = isqrt(400 * (p as u128).pow(3)) as i64;
    let pi = p as i64;
    let r = r as i64;
    let start = r + (-bound - r + pi - 1).div_euclid(pi) * pi;
    let count = if start > bound { 0 } else { ((bound - start) / pi + 1) as u64 };
    (start, count)
}

fn candidates_from_residues(p: u64, residues: &[[u64; 3]]) -> CandidateSet {
    let pi = p as i128;
    let mut cands = Vec::new();
    for r in residues {
        let a3 = a3_progression(r[2], p);
        for a1 in lifts(r[0], p, |x| x * x < 36 * pi) {
            for a2 in lifts(r[1], p, |x| x.abs() < 15 * pi) {
                cands.push(Candidate { a1, a2, a3_start: a3.0, a3_count: a3.1 });
            }
        }
    }
    CandidateSet { p, cands }
}

/// All Weil-box lifts of `(a1, a2, a3) mod p`.
pub fn enumerate_split(a: [u64; 3], p: u64) -> CandidateSet {
    candidates_from_residues(p, &[a.map(|x| x % p)])
}

/// All Weil-box lifts of the residue triples compatible with
/// `(b1, b2, b3) mod p`.
pub fn enumerate_inert(b: [u64; 3], p: u64) -> Result<CandidateSet> {
    let residues = inert_residues(b, p);
    if residues.is_empty() {
        return Err(Error::NoCandidates(p));
    }
    Ok(candidates_from_residues(p, &residues))
}

/// Residue triples `(a1, a2, a3) mod p` with the given `b`'s.
pub fn inert_residues(b: [u64; 3], p: u64) -> Vec<[u64; 3]> {
    let k = Fp::new(p);
    let [b1, b2, b3] = b.map(|x| x % p);
    let Some(s) = sqrt_mod_p(k.negr(b3), p) else {
        return Vec::new();
    };
    let mut roots3 = vec![s];
    if s != 0 {
        roots3.push(p - s);
    }
    let half = k.invr(2);
    let mut out = Vec::new();
    for a3 in roots3 {
        // (x^2 + b1)^2 - 8 a3 x - 4 b2
        let quartic = vec![
            k.subr(k.mulr(b1, b1), k.mulr(4, b2)),
            k.negr(k.mulr(8, a3)),
            k.mulr(2, b1),
            0,
            1,
        ];
        for a1 in poly_roots(&k, &quartic) {
            let a2 = k.mulr(k.addr(k.mulr(a1, a1), b1), half);
            out.push([a1, a2, a3]);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Admissible `a3` for `(a1, a2)`: the real Weil polynomial
/// `z^3 + a1 z^2 + (a2 - 3p) z + (a3 - 2p a1)` must have three roots in
/// `[-2 sqrt p, 2 sqrt p]`. Returns a slightly widened window, or `None`
/// when no `a3` works.
pub fn a3_window(p: u64, a1: i64, a2: i64) -> Option<(i64, i64)> {
    let (pi, a1i, a2i) = (p as i128, a1 as i128, a2 as i128);
    // sum z_i^2 = a1^2 - 2 e2 lies in [a1^2 / 3, 12 p]
    if 2 * a2i < a1i * a1i - 6 * pi || 3 * a2i > a1i * a1i + 9 * pi {
        return None;
    }
    let disc = 4 * a1i * a1i - 12 * (a2i - 3 * pi);
    if disc < 0 {
        return None;
    }
    let (pf, a1f, e2) = (p as f64, a1 as f64, (a2i - 3 * pi) as f64);
    let r = 2.0 * pf.sqrt();
    let sd = (disc as f64).sqrt();
    let (zm, zp) = ((-2.0 * a1f - sd) / 6.0, (-2.0 * a1f + sd) / 6.0);
    let eps = 1e-9 * (r + 1.0);
    if zm < -r - eps || zp > r + eps {
        return None;
    }
    let q = |z: f64| ((z + a1f) * z + e2) * z;
    let margin = 1e-6 * pf.powf(1.5) + 8.0;
    let lo = (-q(zm)).max(-q(r)) - margin;
    let hi = (-q(zp)).min(-q(-r)) + margin;
    if lo > hi {
        return None;
    }
    let shift = 2 * p as i64 * a1;
    Some((lo.floor() as i64 + shift, hi.ceil() as i64 + shift))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStatus {
    Ok,
    /// More than one lift survived the element budget.
    Ambiguous,
    /// No lift is consistent with the group data.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPoly {
    pub p: u64,
    pub a: [i64; 3],
    pub status: LiftStatus,
}

impl LPoly {
    pub fn ok(p: u64, a: [i64; 3]) -> Self {
        LPoly { p, a, status: LiftStatus::Ok }
    }

    /// Coefficients of `L_p(T)` from `T^0` to `T^6`.
    pub fn coefficients(&self) -> [i128; 7] {
        let p = self.p as i128;
        let [a1, a2, a3] = self.a.map(|x| x as i128);
        [1, a1, a2, a3, p * a2, p * p * a1, p * p * p]
    }
}

/// Random elements sampled per Jacobian before giving up.
pub const ELEMENT_BUDGET: usize = 48;

/// Exact `L_p` by point counting.
pub fn naive_lift(h: &[u64], p: u64) -> Result<LPoly> {
    Ok(LPoly::ok(p, oracle::naive_lpoly(h, p)?))
}

// j ≡ r (mod m), as Integers since the moduli grow to about p^3
#[derive(Clone, Debug)]
struct Residue {
    r: Integer,
    m: Integer,
}

/// Solutions of `a j ≡ b (mod n)`.
fn solve_linear(a: &Integer, b: &Integer, n: &Integer) -> Option<Residue> {
    let g = Integer::from(a.gcd_ref(n));
    if !b.is_divisible(&g) {
        return None;
    }
    let m = Integer::from(n / &g);
    let ag = Integer::from(a / &g).modulo(&m);
    let bg = Integer::from(b / &g).modulo(&m);
    let r = if m == 1 { Integer::new() } else { (bg * ag.invert(&m).ok()?).modulo(&m) };
    Some(Residue { r, m })
}

fn crt(x: &Residue, y: &Residue) -> Option<Residue> {
    let g = Integer::from(x.m.gcd_ref(&y.m));
    let diff = Integer::from(&y.r - &x.r);
    if !diff.is_divisible(&g) {
        return None;
    }
    let mg = Integer::from(&y.m / &g);
    let xm = Integer::from(&x.m / &g).modulo(&mg);
    let t = if mg == 1 { Integer::new() } else { (diff / &g * xm.invert(&mg).ok()?).modulo(&mg) };
    let m = Integer::from(&x.m * &mg);
    let r = (Integer::from(&x.m * &t) + &x.r).modulo(&m);
    Some(Residue { r, m })
}

struct Track<'a> {
    p: u64,
    cand: &'a Candidate,
    plus0: i128,
    minus0: i128,
    // admissible j, or None once the candidate is ruled out
    res: Option<Residue>,
}

impl Track<'_> {
    fn survivors(&self) -> u64 {
        let Some(res) = &self.res else { return 0 };
        let count = Integer::from(self.cand.a3_count);
        if res.r >= count {
            return 0;
        }
        let n = (count - 1u32 - &res.r) / &res.m + 1u32;
        n.to_u64().unwrap_or(u64::MAX)
    }

    fn update(&mut self, n_plus: &Integer, n_minus: &Integer) {
        let pj = Integer::from(self.p);
        let plus = solve_linear(&pj, &Integer::from(-self.plus0), n_plus);
        let minus = solve_linear(&pj, &Integer::from(self.minus0), n_minus);
        self.res = match (plus, minus) {
            (Some(x), Some(y)) => crt(&x, &y),
            _ => None,
        };
    }

    // L(1) values as (start, step, count), or L(-1) values in increasing order
    fn progression(&self, twist: bool) -> Option<(u128, u128, u64)> {
        let res = self.res.as_ref()?;
        let n = self.survivors();
        if n == 0 {
            return None;
        }
        let r = res.r.to_i128()?;
        let p = self.p as i128;
        let step = if n == 1 { p } else { res.m.to_i128()?.checked_mul(p)? };
        let (start, step) = if twist {
            (self.minus0 - r * p - (n as i128 - 1) * step, step)
        } else {
            (self.plus0 + r * p, step)
        };
        // group orders are positive; an earlier value that is not cannot
        // be the true one, but keep the progression shape simple
        if start <= 0 {
            return None;
        }
        Some((start as u128, step as u128, n))
    }
}

/// `L_p` from its candidate lifts, using random elements of `curve` and
/// of its quadratic `twist`.
///
/// Each element's order is found from a baby-step giant-step hit in one
/// of the surviving `L_p(1)` (or `L_p(-1)`) progressions, and the
/// accumulated exponent divisors `n`, `n~` discard every lift with
/// `n ∤ L_p(1)` or `n~ ∤ L_p(-1)`. Sampling alternates between the two
/// Jacobians until one lift is left or each has used [`ELEMENT_BUDGET`]
/// elements. The survivor is then checked against one fresh element on
/// each side.
pub fn lift_one<R: Rng>(cands: &CandidateSet, curve: &CurveFp, twist: &CurveFp, rng: &mut R) -> LPoly {
    let p = cands.p;
    let refined = cands.refine();
    let mut tracks: Vec<Track> = refined
        .cands
        .iter()
        .map(|c| {
            let (plus0, minus0) = l_at_pm1(p, c.coeffs(0, p));
            Track { p, cand: c, plus0, minus0, res: Some(Residue { r: Integer::new(), m: Integer::from(1) }) }
        })
        .collect();
    let mut n = [Integer::from(1), Integer::from(1)];
    let mut used = [0usize; 2];
    let unresolved = |status| LPoly { p, a: [0; 3], status };

    let mut side = 0;
    loop {
        let total: u64 = tracks.iter().map(|t| t.survivors()).fold(0, u64::saturating_add);
        if total == 0 {
            return unresolved(LiftStatus::Inconsistent);
        }
        if total == 1 {
            break;
        }
        if used[side] >= ELEMENT_BUDGET {
            side ^= 1;
            if used[side] >= ELEMENT_BUDGET {
                return unresolved(LiftStatus::Ambiguous);
            }
        }
        let jac = if side == 0 { curve } else { twist };
        let x = jac.random_element(rng);
        used[side] += 1;
        let Some(m) = first_hit(jac, &x, &tracks, side == 1) else {
            return unresolved(LiftStatus::Inconsistent);
        };
        let Ok(ord) = jac.order_from_multiple(&x, m) else {
            return unresolved(LiftStatus::Inconsistent);
        };
        n[side].lcm_mut(&Integer::from(ord.order));
        for t in tracks.iter_mut() {
            t.update(&n[0], &n[1]);
        }
        side ^= 1;
    }

    let t = tracks.iter().find(|t| t.survivors() == 1).expect("one survivor");
    let j = t.res.as_ref().and_then(|r| r.r.to_u64()).expect("survivor index");
    let a = t.cand.coeffs(j, p);
    let (lp, lm) = l_at_pm1(p, a);
    // recover a2, a3 from L(1) and L(-1) as a cross-check of the bookkeeping
    let pi = p as i128;
    let a2 = (lp + lm - 2 * (pi * pi * pi + 1)) / (2 * (pi + 1));
    let a3 = (lp - lm) / 2 - (pi * pi + 1) * a[0] as i128;
    debug_assert_eq!((a2, a3), (a[1] as i128, a[2] as i128));
    let mut fresh_ok = |jac: &CurveFp, order: i128| {
        let x = jac.random_element(rng);
        order > 0 && jac.mul(order as u128, &x) == jac.identity()
    };
    if !fresh_ok(curve, lp) || !fresh_ok(twist, lm) || !weil_ok(p, a) {
        return unresolved(LiftStatus::Inconsistent);
    }
    LPoly::ok(p, a)
}

/// First multiple of the order of `x` found in the surviving
/// progressions, scanning lifts in order.
fn first_hit(jac: &CurveFp, x: &JacElement, tracks: &[Track], twist: bool) -> Option<u128> {
    let progs: Vec<(u128, u128, u64)> = tracks.iter().filter_map(|t| t.progression(twist)).collect();
    let mut steps: Vec<u128> = progs.iter().map(|g| g.1).collect();
    steps.sort_unstable();
    steps.dedup();
    let tables: Vec<(u128, BabySteps)> = steps
        .iter()
        .map(|&s| {
            let total: u64 = progs.iter().filter(|g| g.1 == s).map(|g| g.2).sum();
            (s, BabySteps::new(jac, x, s, (total as f64).sqrt().ceil() as u64))
        })
        .collect();
    progs.iter().find_map(|&(c, s, count)| {
        let table = &tables.iter().find(|t| t.0 == s)?.1;
        table.search(c, count).map(|j| c + j as u128 * s)
    })
}

/// Split-prime consistency of a lift with `L_p mod p`.
pub fn matches_split(a: [i64; 3], md: [u64; 3], p: u64) -> bool {
    a.iter().zip(md).all(|(&x, r)| x.rem_euclid(p as i64) as u64 == r % p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::{normalize_fp, twist_model};
    use crate::lpoly_modp::b_relations;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residues(a: [i64; 3], p: u64) -> [u64; 3] {
        a.map(|x| x.rem_euclid(p as i64) as u64)
    }

    #[test]
    fn unique_a1_from_149() {
        let c = enumerate_split([0, 0, 0], 149);
        assert!(c.cands.iter().all(|c| c.a1 == 0));
        for p in [149u64, 151, 1009] {
            for r in 0..p {
                let n = lifts(r, p, |x| x * x < 36 * p as i128).len();
                assert!(n <= 1, "p={p} r={r}");
            }
        }
    }

    #[test]
    fn a2_lifts_strict() {
        let c = enumerate_split([0, 0, 0], 151);
        let a2: Vec<i64> = c.cands.iter().map(|c| c.a2).collect();
        assert_eq!(a2.len(), 29);
        assert!(a2.iter().all(|x| x % 151 == 0 && x.abs() < 15 * 151));
        for r in 1..151 {
            assert!(enumerate_split([0, r, 0], 151).len() <= 30);
        }
    }

    #[test]
    fn a3_progression_length() {
        for p in [149u64, 151, 1009, 65521] {
            for r in [0, 1, p / 2, p - 1] {
                let (s, n) = a3_progression(r, p);
                assert!(n <= (40.0 * (p as f64).sqrt()).ceil() as u64 + 1);
                assert!(weil_ok(p, [0, 0, s]));
                assert!(!weil_ok(p, [0, 0, s - p as i64]));
                assert!(weil_ok(p, [0, 0, s + ((n - 1) * p) as i64]));
            }
        }
    }

    #[test]
    fn inert_zero() {
        let r = inert_residues([0, 0, 0], 101);
        assert_eq!(r, vec![[0, 0, 0]]);
        assert!(enumerate_inert([0, 0, 0], 151).unwrap().contains([0, 0, 0]));
    }

    #[test]
    fn inert_round_trip_example() {
        let b = b_relations([1, 2, 3], 101);
        assert_eq!(b, [3, 99, 92]);
        let r = inert_residues(b, 101);
        assert!(r.len() <= 8);
        assert!(r.contains(&[1, 2, 3]));
    }

    #[test]
    fn inert_without_square_root() {
        // -b3 must be a square
        assert!(enumerate_inert([0, 0, 2], 7).is_err());
    }

    #[test]
    fn l_values() {
        let (lp, lm) = l_at_pm1(101, [0, 0, 0]);
        assert_eq!(lp, 101i128.pow(3) + 1);
        assert_eq!(lm, lp);
        let l = LPoly::ok(11, [1, 2, 3]);
        let c = l.coefficients();
        assert_eq!(c.iter().sum::<i128>(), l_at_pm1(11, [1, 2, 3]).0);
    }

    #[test]
    fn linear_congruences() {
        let r = solve_linear(&Integer::from(6), &Integer::from(4), &Integer::from(10)).unwrap();
        assert_eq!((r.r, r.m), (Integer::from(4), Integer::from(5)));
        assert!(solve_linear(&Integer::from(6), &Integer::from(3), &Integer::from(10)).is_none());
        let x = Residue { r: 2.into(), m: 4.into() };
        let y = Residue { r: 4.into(), m: 6.into() };
        let z = crt(&x, &y).unwrap();
        assert_eq!((z.r, z.m), (Integer::from(10), Integer::from(12)));
        assert!(crt(&x, &Residue { r: 1.into(), m: 6.into() }).is_none());
    }

    fn curve_for(p: u64, seed: u64) -> CurveFp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let h: Vec<u64> = (0..9).map(|_| rng.gen_range(0..p)).collect();
            if let Ok(c) = normalize_fp(p, &h) {
                return c;
            }
        }
    }

    #[test]
    fn refine_keeps_truth() {
        for (p, seed) in [(37u64, 1), (41, 2), (43, 3), (53, 4), (59, 5), (61, 6)] {
            let c = curve_for(p, seed);
            let a = oracle::naive_lpoly(c.h(), p).unwrap();
            let set = enumerate_split(residues(a, p), p);
            assert!(set.contains(a));
            let r = set.refine();
            assert!(r.contains(a), "p={p} a={a:?}");
            assert!(r.triples() < set.triples());
        }
    }

    #[test]
    fn lift_matches_naive_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (i, p) in [37u64, 41, 53, 67, 79, 97, 101, 103].into_iter().enumerate() {
            let c = curve_for(p, 100 + i as u64);
            let t = twist_model(&c).unwrap();
            let a = oracle::naive_lpoly(c.h(), p).unwrap();
            let l = lift_one(&enumerate_split(residues(a, p), p), &c, &t, &mut rng);
            assert_eq!(l.status, LiftStatus::Ok, "p={p}");
            assert_eq!(l.a, a, "p={p}");
        }
    }

    #[test]
    fn lift_matches_naive_inert() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (i, p) in [43u64, 59, 71, 89].into_iter().enumerate() {
            let c = curve_for(p, 200 + i as u64);
            let t = twist_model(&c).unwrap();
            let a = oracle::naive_lpoly(c.h(), p).unwrap();
            let set = enumerate_inert(b_relations(a, p), p).unwrap();
            assert!(set.contains(a));
            let l = lift_one(&set, &c, &t, &mut rng);
            assert_eq!(l.status, LiftStatus::Ok, "p={p}");
            assert_eq!(l.a, a, "p={p}");
        }
    }

    #[test]
    fn missing_truth_is_not_ok() {
        let p = 53;
        let c = curve_for(p, 9);
        let t = twist_model(&c).unwrap();
        let a = oracle::naive_lpoly(c.h(), p).unwrap();
        let wrong = residues([a[0], a[1] + 1, a[2]], p);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = lift_one(&enumerate_split(wrong, p), &c, &t, &mut rng);
        assert_ne!(l.status, LiftStatus::Ok);
    }

    #[test]
    fn naive_lift_examples() {
        let c = curve_for(11, 3);
        let l = naive_lift(c.h(), 11).unwrap();
        assert_eq!(l.status, LiftStatus::Ok);
        assert!(weil_ok(11, l.a));
    }

    proptest! {
        #[test]
        fn inert_round_trip(a1 in -60i64..60, a2 in -1500i64..1500, a3 in -20000i64..20000) {
            let p = 101;
            let r = inert_residues(b_relations([a1, a2, a3], p), p);
            prop_assert!(r.len() <= 8);
            prop_assert!(r.contains(&residues([a1, a2, a3], p)));
        }

        #[test]
        fn window_contains_weil_polys(z in prop::array::uniform3(-1.0f64..1.0), pi in 0usize..4) {
            // integer roots give an exact real Weil polynomial
            let p = [149u64, 1009, 10007, 65521][pi];
            let r = 2.0 * (p as f64).sqrt();
            let zs = z.map(|t| (t * r).trunc() as i64);
            let a1 = -zs.iter().sum::<i64>();
            let e2 = zs[0] * zs[1] + zs[0] * zs[2] + zs[1] * zs[2];
            let e3 = zs[0] * zs[1] * zs[2];
            let a2 = e2 + 3 * p as i64;
            let a3 = -e3 + 2 * p as i64 * a1;
            prop_assert!(weil_ok(p, [a1, a2, a3]));
            let (lo, hi) = a3_window(p, a1, a2).expect("feasible");
            prop_assert!(lo <= a3 && a3 <= hi);
        }
    }
}
