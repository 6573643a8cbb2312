//! Step matrices for the coefficients of `h^k`, paired into tree leaves.
//!
//! With `v_k = [h^{(p-1)/2}_{k-7}, ..., h^{(p-1)/2}_k]` the coefficients
//! satisfy `2k h_0 v_k = v_{k-1} M_k` modulo `p`, and `M_k` has only the
//! subdiagonal and the last column populated.

use crate::arith::primes_below;
use crate::quad_ring::{QuadDisc, QuadInt, QuadIntPoly};
use crate::remainder_forest::{LeafSource, QMat, QVec};

pub const DIM: usize = 8;

/// `M_k` for a degree-8 `h`.
pub fn build_mk(h: &QuadIntPoly, k: u64) -> QMat {
    assert_eq!(h.degree(), Some(8), "step matrices need deg h = 8");
    let k = k as i64;
    let mut m = QMat::zero(DIM);
    let h0 = h.coeff(0);
    for r in 0..DIM - 1 {
        m.set(r + 1, r, h0.scale(&(2 * k).into()));
    }
    for r in 0..DIM {
        let c = 8 - r as i64 - 2 * k;
        m.set(r, DIM - 1, h.coeff(8 - r).scale(&c.into()));
    }
    m
}

/// `V_0 = e_8`.
pub fn init_vector() -> QVec {
    let mut v = QVec::zero(DIM);
    v.c0[DIM - 1] = 1.into();
    v
}

/// Products of coefficients reused by every `A_j`.
#[derive(Clone, Debug)]
pub struct PairedSteps {
    disc: QuadDisc,
    h0h0: QuadInt,
    // h0 * h_i and h1 * h_i for i = 0..=8
    h0h: Vec<QuadInt>,
    h1h: Vec<QuadInt>,
}

impl PairedSteps {
    pub fn new(h: &QuadIntPoly, disc: QuadDisc) -> Self {
        assert_eq!(h.degree(), Some(8), "step matrices need deg h = 8");
        let h0 = h.coeff(0);
        let h1 = h.coeff(1);
        PairedSteps {
            disc,
            h0h0: h0.mul(&h0, disc),
            h0h: (0..=8).map(|i| h0.mul(&h.coeff(i), disc)).collect(),
            h1h: (0..=8).map(|i| h1.mul(&h.coeff(i), disc)).collect(),
        }
    }

    pub fn disc(&self) -> QuadDisc {
        self.disc
    }

    /// `A_j = M_{2j+1} M_{2j+2}` in closed form.
    ///
    /// With `k = 2j+1`: entry `(r, r-2)` is `4k(k+1) h0^2`, column 6 gets
    /// `2(k+1)(8-r-2k) h0 h_{8-r}` and column 7 gets
    /// `2k(7-r-2k) h0 h_{9-r} - (8-r-2k)(2k+1) h1 h_{8-r}` (rows from 0).
    pub fn a(&self, j: u64) -> QMat {
        let k = 2 * j as i64 + 1;
        let mut m = QMat::zero(DIM);
        let sub = self.h0h0.scale(&(4 * k * (k + 1)).into());
        for r in 2..DIM {
            m.set(r, r - 2, sub.clone());
        }
        for r in 0..DIM {
            let e = 8 - r as i64 - 2 * k;
            let col6 = self.h0h[8 - r].scale(&(2 * (k + 1) * e).into());
            let mut col7 = self.h1h[8 - r].scale(&(-e * (2 * k + 1)).into());
            if r >= 1 {
                col7 = col7.add(&self.h0h[9 - r].scale(&(2 * k * (7 - r as i64 - 2 * k)).into()));
            }
            m.set(r, 6, col6);
            m.set(r, 7, col7);
        }
        m
    }
}

/// `A_j` for a degree-8 `h`.
pub fn build_aj(h: &QuadIntPoly, disc: QuadDisc, j: u64) -> QMat {
    PairedSteps::new(h, disc).a(j)
}

/// Tree width and moduli for the bound `N`.
///
/// `b` is the smallest power of two at least `N/2`; `m_n = 2n+1` when that
/// is a prime below `N`, else 1.
pub fn build_moduli(n_bound: u64) -> (usize, Vec<u64>) {
    assert!(n_bound >= 5, "bound must be at least 5");
    let half = (n_bound / 2) as usize;
    let b = half.next_power_of_two();
    let mut m = vec![1u64; b];
    for p in primes_below(n_bound).into_iter().skip(1) {
        m[((p - 1) / 2) as usize] = p;
    }
    (b, m)
}

/// Tree leaves for one translate, generated on demand.
#[derive(Clone, Debug)]
pub struct RecurrenceSource {
    steps: PairedSteps,
    moduli: Vec<u64>,
    active: usize,
}

impl RecurrenceSource {
    pub fn new(h: &QuadIntPoly, disc: QuadDisc, n_bound: u64) -> Self {
        let (b, moduli) = build_moduli(n_bound);
        let active = ((n_bound / 2) as usize).min(b - 1);
        RecurrenceSource { steps: PairedSteps::new(h, disc), moduli, active }
    }
}

impl LeafSource for RecurrenceSource {
    fn disc(&self) -> QuadDisc {
        self.steps.disc
    }
    fn dim(&self) -> usize {
        DIM
    }
    fn len(&self) -> usize {
        self.moduli.len()
    }
    fn matrix(&self, j: usize) -> QMat {
        if j >= self.active {
            QMat::identity(DIM)
        } else {
            self.steps.a(j as u64)
        }
    }
    fn modulus(&self, j: usize) -> u64 {
        self.moduli[j]
    }
}
