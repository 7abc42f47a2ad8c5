//! Standalone SHA-256/SHA-512 written from the FIPS 180-4 definitions. The
//! round constants and initial hash values are recomputed from the primes
//! with exact integer roots instead of being copied from a table.

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut k = 2u64;
    while out.len() < n {
        if out.iter().all(|p| k % p != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Little-endian multi-limb product.
fn mul(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        let mut carry = 0u128;
        for (j, &y) in b.iter().enumerate() {
            let t = u128::from(out[i + j]) + u128::from(x) * u128::from(y) + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        out[i + b.len()] = carry as u64;
    }
    out
}

fn le(a: &[u64], b: &[u64]) -> bool {
    let n = a.len().max(b.len());
    for i in (0..n).rev() {
        let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        if x != y {
            return x < y;
        }
    }
    true
}

/// First 64 fractional bits of `p^(1/k)`: the largest `x` with
/// `x^k <= p * 2^(64k)`, truncated to its low 64 bits.
fn frac_root(p: u64, k: usize) -> u64 {
    let mut target = vec![0u64; k + 1];
    target[k] = p;
    let (mut lo, mut hi) = (0u128, 1u128 << 72);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let limbs = [mid as u64, (mid >> 64) as u64];
        let mut pow = limbs.to_vec();
        for _ in 1..k {
            pow = mul(&pow, &limbs);
        }
        if le(&pow, &target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as u64
}

fn pad(message: &[u8], block: usize) -> Vec<u8> {
    let mut m = message.to_vec();
    m.push(0x80);
    let len_bytes = block / 8;
    while m.len() % block != block - len_bytes {
        m.push(0);
    }
    let bits = (message.len() as u128) * 8;
    m.extend_from_slice(&bits.to_be_bytes()[16 - len_bytes..]);
    m
}

fn hex(bytes: impl IntoIterator<Item = u8>) -> String {
    bytes.into_iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256(message: &[u8]) -> String {
    let ps = primes(64);
    let k: Vec<u32> = ps.iter().map(|&p| (frac_root(p, 3) >> 32) as u32).collect();
    let mut h: Vec<u32> = ps[..8].iter().map(|&p| (frac_root(p, 2) >> 32) as u32).collect();
    for chunk in pad(message, 64).chunks(64) {
        let mut w = [0u32; 64];
        for t in 0..16 {
            w[t] = u32::from_be_bytes(chunk[4 * t..4 * t + 4].try_into().unwrap());
        }
        for t in 16..64 {
            let s0 = w[t - 15].rotate_right(7) ^ w[t - 15].rotate_right(18) ^ (w[t - 15] >> 3);
            let s1 = w[t - 2].rotate_right(17) ^ w[t - 2].rotate_right(19) ^ (w[t - 2] >> 10);
            w[t] = w[t - 16].wrapping_add(s0).wrapping_add(w[t - 7]).wrapping_add(s1);
        }
        let mut v: [u32; 8] = h.clone().try_into().unwrap();
        for t in 0..64 {
            let [a, b, c, d, e, f, g, hh] = v;
            let big1 = e.rotate_right(6) ^ e.rotate_right(11) ^ e.rotate_right(25);
            let ch = (e & f) ^ (!e & g);
            let t1 = hh.wrapping_add(big1).wrapping_add(ch).wrapping_add(k[t]).wrapping_add(w[t]);
            let big0 = a.rotate_right(2) ^ a.rotate_right(13) ^ a.rotate_right(22);
            let maj = (a & b) ^ (a & c) ^ (b & c);
            let t2 = big0.wrapping_add(maj);
            v = [t1.wrapping_add(t2), a, b, c, d.wrapping_add(t1), e, f, g];
        }
        for (x, y) in h.iter_mut().zip(v) {
            *x = x.wrapping_add(y);
        }
    }
    hex(h.iter().flat_map(|x| x.to_be_bytes()))
}

pub fn sha512(message: &[u8]) -> String {
    let ps = primes(80);
    let k: Vec<u64> = ps.iter().map(|&p| frac_root(p, 3)).collect();
    let mut h: Vec<u64> = ps[..8].iter().map(|&p| frac_root(p, 2)).collect();
    for chunk in pad(message, 128).chunks(128) {
        let mut w = [0u64; 80];
        for t in 0..16 {
            w[t] = u64::from_be_bytes(chunk[8 * t..8 * t + 8].try_into().unwrap());
        }
        for t in 16..80 {
            let s0 = w[t - 15].rotate_right(1) ^ w[t - 15].rotate_right(8) ^ (w[t - 15] >> 7);
            let s1 = w[t - 2].rotate_right(19) ^ w[t - 2].rotate_right(61) ^ (w[t - 2] >> 6);
            w[t] = w[t - 16].wrapping_add(s0).wrapping_add(w[t - 7]).wrapping_add(s1);
        }
        let mut v: [u64; 8] = h.clone().try_into().unwrap();
        for t in 0..80 {
            let [a, b, c, d, e, f, g, hh] = v;
            let big1 = e.rotate_right(14) ^ e.rotate_right(18) ^ e.rotate_right(41);
            let ch = (e & f) ^ (!e & g);
            let t1 = hh.wrapping_add(big1).wrapping_add(ch).wrapping_add(k[t]).wrapping_add(w[t]);
            let big0 = a.rotate_right(28) ^ a.rotate_right(34) ^ a.rotate_right(39);
            let maj = (a & b) ^ (a & c) ^ (b & c);
            let t2 = big0.wrapping_add(maj);
            v = [t1.wrapping_add(t2), a, b, c, d.wrapping_add(t1), e, f, g];
        }
        for (x, y) in h.iter_mut().zip(v) {
            *x = x.wrapping_add(y);
        }
    }
    hex(h.iter().flat_map(|x| x.to_be_bytes()))
}

/// Published test vectors: (message, SHA-256, SHA-512).
pub fn published_vectors() -> Vec<(Vec<u8>, &'static str, &'static str)> {
    vec![
        (
            Vec::new(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
            "cf83e1357eefb8bdf1542850d66d8007d620e4050b5715dc83f4a921d36ce9ce\
             47d0d13c5d85f2b0ff8318d2877eec2f63b931bd47417a81a538327af927da3e",
        ),
        (
            b"abc".to_vec(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
            "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a\
             2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f",
        ),
        (
            vec![b'a'; 1_000_000],
            "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0",
            "e718483d0ce769644e2e42c7bc15b4638e1f98b13b2044285632a803afa973eb\
             de0ff244877ea60a4cb0432ce577c31beb009c5c2c49aa2e4eadb217ad8cc09b",
        ),
    ]
}
