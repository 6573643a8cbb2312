//! Word-size number theory: modular arithmetic, primality, sieving,
//! factoring and square roots modulo primes.

use rug::Integer;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (if s >= m as u128 { s - m as u128 } else { s }) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        (a as u128 + m as u128 - b as u128) as u64
    }
}

pub fn pow_mod(mut a: u64, mut e: u128, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    a %= m;
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `x mod p` for an arbitrary-precision `x`, result in `[0, p)`.
pub fn int_mod(x: &Integer, p: u64) -> u64 {
    if let Ok(p32) = u32::try_from(p) {
        // mod_u is the floor remainder for a positive divisor
        return x.mod_u(p32) as u64;
    }
    let r = Integer::from(x % p);
    let r = if r < 0 { r + p } else { r };
    r.to_u64().expect("reduced residue fits")
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i32 {
    assert!(n % 2 == 1, "jacobi symbol needs odd modulus");
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Smallest positive quadratic non-residue modulo the odd prime `p`.
pub fn smallest_nonresidue(p: u64) -> u64 {
    (2..p).find(|&s| jacobi(s as i128, p) == -1).expect("odd prime has a non-residue")
}

/// Square root of `a` modulo the odd prime `p` (Tonelli-Shanks).
///
/// Returns the smaller of the two roots, or `None` for a non-residue.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if jacobi(a as i128, p) != 1 {
        return None;
    }
    let r = if p % 4 == 3 {
        pow_mod(a, ((p + 1) / 4) as u128, p)
    } else {
        let mut q = p - 1;
        let mut s = 0;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = smallest_nonresidue(p);
        let mut m = s;
        let mut c = pow_mod(z, q as u128, p);
        let mut t = pow_mod(a, q as u128, p);
        let mut r = pow_mod(a, ((q + 1) / 2) as u128, p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let b = pow_mod(c, 1u128 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Some(r.min(p - r))
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return ((a % m) * (b % m)) % m;
    }
    let (a, b) = (a % m, b % m);
    if m < 1 << 111 {
        // 16 bits of b at a time: r < 2^111, so r << 16 and a * chunk fit
        let mut r = 0u128;
        for i in (0..8).rev() {
            let chunk = (b >> (16 * i)) & 0xffff;
            r = ((r << 16) % m + a * chunk) % m;
        }
        return r;
    }
    // operands below 2^127 here, so doubling never overflows
    let (mut a, mut b) = (a, b);
    let mut r = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            r = (r + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    r
}

fn pow_mod_u128(mut a: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1u128 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u128(r, a, m);
        }
        a = mul_mod_u128(a, a, m);
        e >>= 1;
    }
    r
}

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller-Rabin; deterministic below 3.3e24, overwhelmingly reliable above.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'bases: for &b in &MR_BASES {
        let mut x = pow_mod_u128(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// All primes below `n`.
pub fn primes_below(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

const TRIAL_LIMIT: u64 = 1 << 12;

/// Prime factorisation, sorted by prime.
///
/// Trial division up to 4096, then Brent's variant of Pollard rho on the
/// remaining cofactor.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let push = |q: u128, out: &mut Vec<(u128, u32)>| match out.iter_mut().find(|(r, _)| *r == q) {
        Some(e) => e.1 += 1,
        None => out.push((q, 1)),
    };
    let mut q = 2u64;
    while q <= TRIAL_LIMIT && (q as u128) * (q as u128) <= n {
        let rem = if n <= u64::MAX as u128 { (n as u64 % q) as u128 } else { n % q as u128 };
        if rem == 0 {
            n /= q as u128;
            push(q as u128, &mut out);
            continue;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if m <= (TRIAL_LIMIT as u128).pow(2) || is_prime(m) {
                push(m, &mut out);
                continue;
            }
            let s = isqrt(m);
            if s * s == m {
                stack.push(s);
                stack.push(s);
                continue;
            }
            let d = rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    out.sort_unstable();
    out
}

fn rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u128.. {
        let f = |x: u128| (mul_mod_u128(x, x, n) + c) % n;
        let (mut y, mut g, mut r, mut q) = (2u128, 1u128, 1u64, 1u128);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod_u128(q, x.abs_diff(y), n);
                }
                g = gcd_u128(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u128(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}
