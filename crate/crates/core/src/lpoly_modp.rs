//! `L_p(T) mod p` from the Hasse-Witt matrix.
//!
//! Split primes give `L_p(T) = det(I - T W) mod p` directly. At inert
//! primes `W` lives over `F_{p^2}` and `det(I - T W W^(p))` is
//! `L_p(T) L_p(-T)` in the variable `T^2`.

use crate::finite_fields::{Field, Fp, Fp2};
use crate::hasse_witt::{mat_mul, Mat3};
use crate::{Error, Result};

/// Coefficients of `T, T^2, T^3` in `det(I - T M)`.
pub fn charpoly3<F: Field>(k: &F, m: &Mat3<F::Elem>) -> [F::Elem; 3] {
    let tr = k.add(k.add(m[0][0], m[1][1]), m[2][2]);
    let minor = |i: usize, j: usize| k.sub(k.mul(m[i][i], m[j][j]), k.mul(m[i][j], m[j][i]));
    let e2 = k.add(k.add(minor(0, 1), minor(0, 2)), minor(1, 2));
    let cof = |a: usize, b: usize, c: usize, d: usize| k.sub(k.mul(m[1][a], m[2][b]), k.mul(m[1][c], m[2][d]));
    let det = k.add(
        k.sub(k.mul(m[0][0], cof(1, 2, 2, 1)), k.mul(m[0][1], cof(0, 2, 2, 0))),
        k.mul(m[0][2], cof(0, 1, 1, 0)),
    );
    [k.neg(tr), e2, k.neg(det)]
}

/// `(a1, a2, a3) mod p` at a split prime.
pub fn lpoly_split(k: &Fp, w: &Mat3<u64>) -> [u64; 3] {
    charpoly3(k, w)
}

/// `(b1, b2, b3) mod p` at an inert prime: the `T^2, T^4, T^6`
/// coefficients of `L_p(T) L_p(-T)`.
pub fn lpoly_inert(k: &Fp2, w: &Mat3<[u64; 2]>) -> Result<[u64; 3]> {
    let wf: Mat3<[u64; 2]> = w.map(|row| row.map(|e| k.frobenius(e)));
    let m = mat_mul(k, w, &wf);
    let c = charpoly3(k, &m);
    let mut out = [0u64; 3];
    for i in 0..3 {
        out[i] = k.in_prime_field(c[i]).ok_or(Error::NotRational(k.p()))?;
    }
    Ok(out)
}

/// `b1 = 2a2 - a1^2`, `b2 = a2^2 - 2a1a3`, `b3 = -a3^2`, all mod `p`.
pub fn b_relations(a: [i64; 3], p: u64) -> [u64; 3] {
    let p = p as i128;
    let [a1, a2, a3] = a.map(|x| x as i128 % p);
    [2 * a2 - a1 * a1, a2 * a2 - 2 * a1 * a3, -a3 * a3].map(|x| x.rem_euclid(p) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_examples() {
        let k = Fp::new(101);
        assert_eq!(lpoly_split(&k, &[[0; 3]; 3]), [0, 0, 0]);
        let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(lpoly_split(&k, &id), [98, 3, 100]);
        let d = [[1, 0, 0], [0, 2, 0], [0, 0, 3]];
        assert_eq!(lpoly_split(&k, &d), [95, 11, 95]);
    }

    #[test]
    fn inert_examples() {
        let k = Fp2::new(7, [1, 0]);
        let (z, o) = ([0, 0], [1, 0]);
        assert_eq!(lpoly_inert(&k, &[[z; 3]; 3]).unwrap(), [0, 0, 0]);
        let id = [[o, z, z], [z, o, z], [z, z, o]];
        assert_eq!(lpoly_inert(&k, &id).unwrap(), [4, 3, 6]);
        let w = [[[0, 1], z, z], [z, o, z], [z, z, o]];
        assert_eq!(lpoly_inert(&k, &w).unwrap(), [4, 3, 6]);
    }

    #[test]
    fn relation_examples() {
        assert_eq!(b_relations([0, 0, 0], 101), [0, 0, 0]);
        assert_eq!(b_relations([1, 2, 3], 101), [3, 99, 92]);
    }

    // coefficients of T^2, T^4, T^6 in L(T) L(-T) for the full degree-6 L
    fn symbolic_b(a: [i64; 3], p: i64) -> [i128; 3] {
        let l = [1, a[0], a[1], a[2], p * a[1], p * p * a[0], p * p * p].map(|x| x as i128);
        let lm: Vec<i128> = l.iter().enumerate().map(|(i, &c)| if i % 2 == 1 { -c } else { c }).collect();
        let mut prod = [0i128; 13];
        for i in 0..7 {
            for j in 0..7 {
                prod[i + j] += l[i] * lm[j];
            }
        }
        [prod[2], prod[4], prod[6]]
    }

    proptest! {
        #[test]
        fn relations_match_expansion(a1 in -60i64..60, a2 in -1500i64..1500, a3 in -20000i64..20000) {
            let p = 101;
            let want = symbolic_b([a1, a2, a3], p as i64).map(|x| x.rem_euclid(p as i128) as u64);
            prop_assert_eq!(b_relations([a1, a2, a3], p), want);
        }

        #[test]
        fn split_matrices_satisfy_relations(c in prop::array::uniform9(0u64..101)) {
            // a Hasse-Witt matrix over F_p viewed over F_{p^2} has M = W^2
            let k = Fp::new(101);
            let w: Mat3<u64> = std::array::from_fn(|i| std::array::from_fn(|j| c[3 * i + j]));
            let a = lpoly_split(&k, &w).map(|x| x as i64);
            let k2 = Fp2::quadratic(101);
            let w2 = w.map(|r| r.map(|e| k2.from_u64(e)));
            prop_assert_eq!(lpoly_inert(&k2, &w2).unwrap(), b_relations(a, 101));
        }
    }
}
