//! From tree outputs to the Hasse-Witt matrix.
//!
//! The tree yields `U_p(beta) = (h^{(p-1)/2}_{p-1}, h_{p-2}, h_{p-3})` for
//! the translate `h(x + beta)`. Since `W(beta) = T(beta) W T(-beta)`, the
//! first rows for three distinct translates determine `W`.

use crate::arith::int_mod;
use crate::finite_fields::Field;
use crate::quad_ring::{PrimeReduction, QuadDisc, QuadInt};
use crate::remainder_forest::QVec;
use crate::{Error, Result};

pub type Mat3<E> = [[E; 3]; 3];

/// `U_p` from `C_{(p-1)/2} = V_0 M_1 ... M_{p-1} mod p`.
///
/// Scales by `-h_0^{-(p-1)/2}` and reads entries 8, 7, 6 in that order.
pub fn compute_up<R: PrimeReduction>(
    c: &QVec,
    h0: &QuadInt,
    disc: QuadDisc,
    red: &R,
) -> Result<[<R::F as Field>::Elem; 3]> {
    let k = red.field();
    let p = k.p();
    if int_mod(&h0.norm(disc), p) == 0 {
        return Err(Error::BadH0(p));
    }
    let h0p = red.reduce(h0);
    let scale = k.neg(k.inv(k.pow(h0p, ((p - 1) / 2) as u128)).expect("h0 is a unit"));
    let entry = |i: usize| {
        let e = red.reduce_residues(int_mod(&c.c0[i], p), int_mod(&c.c1[i], p));
        k.mul(scale, e)
    };
    Ok([entry(7), entry(6), entry(5)])
}

/// `T(beta) = [[1, beta, beta^2], [0, 1, 2 beta], [0, 0, 1]]`.
pub fn t_matrix<F: Field>(k: &F, beta: i64) -> Mat3<F::Elem> {
    let b = k.from_i64(beta);
    let (z, o) = (k.zero(), k.one());
    [[o, b, k.mul(b, b)], [z, o, k.add(b, b)], [z, z, o]]
}

pub fn mat_mul<F: Field>(k: &F, a: &Mat3<F::Elem>, b: &Mat3<F::Elem>) -> Mat3<F::Elem> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).fold(k.zero(), |s, t| k.add(s, k.mul(a[i][t], b[t][j]))))
    })
}

fn row_times<F: Field>(k: &F, r: &[F::Elem; 3], m: &Mat3<F::Elem>) -> [F::Elem; 3] {
    std::array::from_fn(|j| (0..3).fold(k.zero(), |s, t| k.add(s, k.mul(r[t], m[t][j]))))
}

/// First row of `T(beta) W T(-beta)`: the `U_p` that `W` predicts.
pub fn forward<F: Field>(k: &F, w: &Mat3<F::Elem>, beta: i64) -> [F::Elem; 3] {
    let m = mat_mul(k, &mat_mul(k, &t_matrix(k, beta), w), &t_matrix(k, -beta));
    m[0]
}

/// Solves `A X = B` for invertible `A` by Gaussian elimination.
fn solve3<F: Field>(k: &F, mut a: Mat3<F::Elem>, mut b: Mat3<F::Elem>) -> Option<Mat3<F::Elem>> {
    for col in 0..3 {
        let piv = (col..3).find(|&r| !k.is_zero(a[r][col]))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = k.inv(a[col][col])?;
        for j in 0..3 {
            a[col][j] = k.mul(a[col][j], inv);
            b[col][j] = k.mul(b[col][j], inv);
        }
        for r in 0..3 {
            if r == col || k.is_zero(a[r][col]) {
                continue;
            }
            let f = a[r][col];
            for j in 0..3 {
                a[r][j] = k.sub(a[r][j], k.mul(f, a[col][j]));
                b[r][j] = k.sub(b[r][j], k.mul(f, b[col][j]));
            }
        }
    }
    Some(b)
}

/// Hasse-Witt matrix from the first rows for three translates.
///
/// `U(beta) T(beta) = (1, beta, beta^2) W`, so `W` solves a Vandermonde
/// system.
pub fn assemble_w<F: Field>(k: &F, ups: &[[F::Elem; 3]; 3], betas: [i64; 3]) -> Result<Mat3<F::Elem>> {
    let p = k.p();
    for i in 0..3 {
        for j in i + 1..3 {
            if (betas[i] - betas[j]).rem_euclid(p as i64) == 0 {
                return Err(Error::TranslatesCollide(p));
            }
        }
    }
    let vand: Mat3<F::Elem> = std::array::from_fn(|i| {
        let b = k.from_i64(betas[i]);
        [k.one(), b, k.mul(b, b)]
    });
    let rhs: Mat3<F::Elem> = std::array::from_fn(|i| row_times(k, &ups[i], &t_matrix(k, betas[i])));
    Ok(solve3(k, vand, rhs).expect("Vandermonde matrix with distinct nodes is invertible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_fields::{Fp, Fp2};
    use proptest::prelude::*;

    #[test]
    fn matrix_unit_round_trip() {
        let k = Fp::new(101);
        let mut w = [[0u64; 3]; 3];
        w[0][0] = 1;
        let betas = [0, 1, 2];
        let ups: [[u64; 3]; 3] = std::array::from_fn(|i| forward(&k, &w, betas[i]));
        for (i, &b) in betas.iter().enumerate() {
            assert_eq!(ups[i], [1, k.from_i64(-b), k.from_i64(b * b)]);
        }
        assert_eq!(assemble_w(&k, &ups, betas).unwrap(), w);
    }

    #[test]
    fn collision_detected() {
        let k = Fp::new(3);
        let ups = [[0u64; 3]; 3];
        assert!(matches!(assemble_w(&k, &ups, [0, 1, 3]), Err(Error::TranslatesCollide(3))));
    }

    #[test]
    fn t_group_law() {
        let k = Fp::new(31);
        for b1 in 0..31 {
            assert_eq!(t_matrix(&k, 0), mat_mul(&k, &t_matrix(&k, b1), &t_matrix(&k, -b1)));
            for b2 in [0, 5, 17] {
                assert_eq!(mat_mul(&k, &t_matrix(&k, b1), &t_matrix(&k, b2)), t_matrix(&k, b1 + b2));
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip_prime_field(c in prop::array::uniform9(0u64..101), b in prop::sample::subsequence((0i64..101).collect::<Vec<_>>(), 3)) {
            let k = Fp::new(101);
            let w: Mat3<u64> = std::array::from_fn(|i| std::array::from_fn(|j| c[3 * i + j]));
            let betas = [b[0], b[1], b[2]];
            let ups: [[u64; 3]; 3] = std::array::from_fn(|i| forward(&k, &w, betas[i]));
            let back = assemble_w(&k, &ups, betas).unwrap();
            prop_assert_eq!(back, w);
            prop_assert_eq!(back[0], forward(&k, &w, 0));
        }

        #[test]
        fn round_trip_quadratic_field(c in prop::array::uniform18(0u64..47), shift in 0i64..40) {
            let k = Fp2::quadratic(47);
            let w: Mat3<[u64; 2]> = std::array::from_fn(|i| std::array::from_fn(|j| [c[6 * i + 2 * j], c[6 * i + 2 * j + 1]]));
            let betas = [shift, shift + 3, shift + 7];
            let ups: [[[u64; 2]; 3]; 3] = std::array::from_fn(|i| forward(&k, &w, betas[i]));
            prop_assert_eq!(assemble_w(&k, &ups, betas).unwrap(), w);
        }
    }
}
