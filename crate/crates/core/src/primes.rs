//! Small-scale prime utilities.

/// Largest sieve bound accepted by [`primes_up_to`].
pub const SIEVE_LIMIT: u64 = 2_000_000;

/// Primes ≤ `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit.min(SIEVE_LIMIT) as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
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

/// Prime factorisation as `(p, exponent)` pairs in increasing order of p.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Ω(n): prime factors counted with multiplicity.
pub fn big_omega(n: u64) -> u32 {
    factorize(n).iter().map(|&(_, e)| e).sum()
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Every prime divides n at least twice; 1 counts as squarefull.
pub fn is_squarefull(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e >= 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_agrees_with_trial_division() {
        let ps = primes_up_to(1000);
        assert_eq!(ps.len(), 168);
        for n in 0..=1000u64 {
            assert_eq!(ps.binary_search(&n).is_ok(), is_prime(n), "{n}");
        }
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(big_omega(360), 6);
        assert!(is_squarefree(30) && !is_squarefree(12));
        assert!(is_squarefull(1) && is_squarefull(72) && !is_squarefull(12));
        for n in 1..500u64 {
            let prod: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n);
        }
    }
}
