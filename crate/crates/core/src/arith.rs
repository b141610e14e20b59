//! Integer helpers: primality, modular inverses, subspace counts.

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r == 1 {
        Some(old_s.rem_euclid(m))
    } else {
        None
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// True when `n` is `p^e` for some `e >= 0`.
pub fn is_power_of(mut n: u128, p: u128) -> bool {
    if n == 0 {
        return false;
    }
    while n.is_multiple_of(p) {
        n /= p;
    }
    n == 1
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow(n - i) - 1;
        den *= q.pow(i + 1) - 1;
        let g = gcd_u128(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `|GL_k(F_p)|`, or `None` when it does not fit in a `u128`.
pub fn gl_order(k: u32, p: u64) -> Option<u128> {
    let p = p as u128;
    let pk = p.checked_pow(k)?;
    (0..k).try_fold(1u128, |acc, i| acc.checked_mul(pk - p.pow(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomials_small() {
        assert_eq!(gaussian_binomial(3, 1, 2), 7);
        assert_eq!(gaussian_binomial(8, 4, 2), 200787);
        let total: u128 = (0..=3).map(|k| gaussian_binomial(3, k, 2)).sum();
        assert_eq!(total, 16);
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(0, 5), Some(1));
        assert_eq!(gl_order(1, 3), Some(2));
        assert_eq!(gl_order(3, 2), Some(168));
        assert_eq!(gl_order(8, 5), None);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
        assert_eq!(inv_mod(-1, 4), Some(3));
    }
}
