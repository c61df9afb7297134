//! Dense polynomials and truncated power series over a prime field F_p.
//!
//! Coefficients are stored little-endian as `u32` residues in `[0, p)`.
//! Polynomials are kept trimmed (no trailing zero coefficients); truncated
//! series have a fixed length and may end with zeros.

pub(crate) fn mod_inv(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a as u64 % p as u64, (p - 2) as u64, p as u64) as u32
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

pub(crate) fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Index of the first nonzero coefficient, `None` for the zero polynomial.
pub(crate) fn ord(v: &[u32]) -> Option<usize> {
    v.iter().position(|&c| c != 0)
}

pub(crate) fn add(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0) as u64 + b.get(i).copied().unwrap_or(0) as u64;
        out.push((x % p as u64) as u32);
    }
    trim(&mut out);
    out
}

pub(crate) fn neg(a: &[u32], p: u32) -> Vec<u32> {
    a.iter().map(|&c| if c == 0 { 0 } else { p - c }).collect()
}

pub(crate) fn scale(a: &[u32], c: u32, p: u32) -> Vec<u32> {
    let mut out: Vec<u32> = a.iter().map(|&x| (x as u64 * c as u64 % p as u64) as u32).collect();
    trim(&mut out);
    out
}

/// Full product; the result is trimmed.
pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = mul_trunc(a, b, a.len() + b.len() - 1, p);
    trim(&mut out);
    out
}

/// First `n` coefficients of `a * b`. Always returns exactly `n` entries.
pub(crate) fn mul_trunc(a: &[u32], b: &[u32], n: usize, p: u32) -> Vec<u32> {
    let pm = p as u64;
    // p < 2^16 so every product fits in 32 bits; flush the accumulator
    // well before it can overflow.
    let mut acc = vec![0u64; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0 {
            continue;
        }
        let x = x as u64;
        for (j, &y) in b.iter().enumerate().take(n - i) {
            let slot = &mut acc[i + j];
            *slot += x * y as u64;
            if *slot >= 1 << 62 {
                *slot %= pm;
            }
        }
    }
    acc.into_iter().map(|c| (c % pm) as u32).collect()
}

/// First `n` coefficients of `a / b` as power series; requires `b[0] != 0`.
pub(crate) fn div_trunc(a: &[u32], b: &[u32], n: usize, p: u32) -> Vec<u32> {
    debug_assert!(b.first().copied().unwrap_or(0) != 0);
    let pm = p as u64;
    let inv_b0 = mod_inv(b[0], p) as u64;
    let mut q = vec![0u32; n];
    for i in 0..n {
        let mut s = a.get(i).copied().unwrap_or(0) as u64;
        let mut sub_acc = 0u64;
        let upper = i.min(b.len().saturating_sub(1));
        for j in 1..=upper {
            sub_acc += b[j] as u64 * q[i - j] as u64;
            if sub_acc >= 1 << 62 {
                sub_acc %= pm;
            }
        }
        sub_acc %= pm;
        s = (s + pm - sub_acc) % pm;
        q[i] = (s * inv_b0 % pm) as u32;
    }
    q
}

/// Euclidean division `a = q*b + r` with `deg r < deg b`; `b` must be nonzero.
pub(crate) fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p) as u64;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; r.len() - db];
    let pm = p as u64;
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (*r.last().unwrap() as u64 * lead_inv) % pm;
        q[shift] = c as u32;
        for (j, &bj) in b.iter().enumerate() {
            let t = (c * bj as u64) % pm;
            let slot = &mut r[shift + j];
            *slot = ((*slot as u64 + pm - t) % pm) as u32;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub(crate) fn monic(a: &[u32], p: u32) -> Vec<u32> {
    match a.last() {
        None => Vec::new(),
        Some(&lead) => scale(a, mod_inv(lead, p), p),
    }
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}
