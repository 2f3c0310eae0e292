//! Primality testing and random prime generation for the modular pipeline.

use rand::Rng;

use super::field::{mul_mod, pow_mod, PrimeField};

// Deterministic Miller-Rabin witness set for all n < 3.3 * 10^24.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller-Rabin primality test; exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform random prime with exactly `bits` bits (`33 <= bits <= 63`).
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> PrimeField {
    assert!((33..=63).contains(&bits), "prime size must be 33..=63 bits");
    let lo = 1u64 << (bits - 1);
    loop {
        let candidate = rng.gen_range(lo..2 * lo) | 1;
        if is_prime(candidate) {
            return PrimeField::new(candidate).expect("range checked above");
        }
    }
}

/// `count` distinct random primes of the given size.
pub fn random_primes<R: Rng + ?Sized>(rng: &mut R, count: usize, bits: u32) -> Vec<PrimeField> {
    let mut out: Vec<PrimeField> = Vec::with_capacity(count);
    while out.len() < count {
        let p = random_prime(rng, bits);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_values_against_sieve() {
        let limit = 5000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for j in (i * i..limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (n, &expected) in sieve.iter().enumerate() {
            assert_eq!(is_prime(n as u64), expected, "n = {n}");
        }
    }

    #[test]
    fn known_large_values() {
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime((1u64 << 62) - 1));
        // strong pseudoprime to bases 2..=11
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn random_primes_have_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in random_primes(&mut rng, 4, 62) {
            assert_eq!(64 - p.modulus().leading_zeros(), 62);
        }
    }
}
