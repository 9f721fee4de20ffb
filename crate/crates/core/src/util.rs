//! Small numeric helpers used across modules.

/// Binomial coefficient as an exact `u64` (0 when `k > n`).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Möbius function of `m ≥ 1`.
pub fn moebius(mut m: u64) -> i64 {
    let mut primes = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            primes += 1;
        }
        p += 1;
    }
    if m > 1 {
        primes += 1;
    }
    if primes % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler totient of `m ≥ 1`.
pub fn euler_phi(m: u64) -> u64 {
    let mut result = m;
    let mut m = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Divisors of `k` in increasing order.
pub fn divisors(k: u64) -> Vec<u64> {
    let mut ds = Vec::new();
    for d in 1..=k {
        if k % d == 0 {
            ds.push(d);
        }
    }
    ds
}
