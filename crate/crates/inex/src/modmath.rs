//! Modular arithmetic helpers shared by every other module.
//!
//! All routines are exact. Intermediate products are widened to 128 bits, so
//! the functions are safe for any arguments they accept; callers working with
//! a [`Triple`] additionally get the guarantee that residues modulo `pq` and
//! indices below `pqr` fit comfortably in an `i64`.

use crate::{Error, Result, Triple};

/// Greatest common divisor by Euclid's algorithm.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least nonnegative residue of `n` modulo `m`.
///
/// Defined for every `n`, including negative values: the result always lies
/// in `[0, m)`.
///
/// # Panics
///
/// Panics if `m == 0`.
pub fn lnr(n: i128, m: u64) -> u64 {
    assert!(m > 0, "modulus must be positive");
    let m = m as i128;
    let rem = n % m;
    if rem < 0 {
        (rem + m) as u64
    } else {
        rem as u64
    }
}

/// `a * b mod m` without overflow.
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by binary exponentiation.
pub(crate) fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of `a` modulo `m`, as a least nonnegative residue.
///
/// # Errors
///
/// Returns [`Error::NonInvertible`] when `gcd(a, m) != 1`.
///
/// # Panics
///
/// Panics if `m == 0`.
pub fn mod_inverse(a: i128, m: u64) -> Result<u64> {
    assert!(m > 0, "modulus must be positive");
    let (mut old_r, mut r) = (lnr(a, m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    // old_r is the gcd, old_s its Bezout coefficient for the reduced a.
    if old_r != 1 {
        return Err(Error::NonInvertible {
            value: a,
            modulus: m,
        });
    }
    Ok(lnr(old_s, m))
}

/// Bases making Miller-Rabin deterministic over the whole `u64` range.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in MR_WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Candidate budget for progression searches. Far beyond what Dirichlet
/// density requires for any modulus this crate produces.
pub const DEFAULT_PROGRESSION_CAP: u64 = 10_000_000;

/// Smallest prime `> lower` congruent to `residue` modulo `modulus`, with the
/// default candidate budget of [`DEFAULT_PROGRESSION_CAP`].
pub fn next_prime_in_progression(residue: u64, modulus: u64, lower: u64) -> Result<u64> {
    next_prime_in_progression_capped(residue, modulus, lower, DEFAULT_PROGRESSION_CAP)
}

/// Smallest prime `> lower` congruent to `residue` modulo `modulus`,
/// examining at most `cap` candidates.
///
/// # Errors
///
/// [`Error::EmptyProgression`] when `gcd(residue, modulus) != 1`, since such
/// a progression contains at most one prime. [`Error::SearchExhausted`] when
/// the budget runs out or the candidates leave the `u64` range.
pub fn next_prime_in_progression_capped(
    residue: u64,
    modulus: u64,
    lower: u64,
    cap: u64,
) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::BadInput("progression modulus must be positive".into()));
    }
    if gcd(lnr(residue as i128, modulus), modulus) != 1 {
        return Err(Error::EmptyProgression { residue, modulus });
    }
    let first = lower as i128 + 1;
    let mut candidate = u64::try_from(first + lnr(residue as i128 - first, modulus) as i128)
        .map_err(|_| {
            Error::SearchExhausted(format!(
                "progression {residue} mod {modulus} left the u64 range"
            ))
        })?;
    for _ in 0..cap {
        if is_prime(candidate) {
            return Ok(candidate);
        }
        candidate = candidate.checked_add(modulus).ok_or_else(|| {
            Error::SearchExhausted(format!(
                "progression {residue} mod {modulus} left the u64 range"
            ))
        })?;
    }
    Err(Error::SearchExhausted(format!(
        "no prime {residue} mod {modulus} above {lower} within {cap} candidates"
    )))
}

/// Coordinates of `n` in the mixed basis `(qr, pr, pq, pqr)`.
///
/// Every integer `n` has a unique representation
/// `n = x*qr + y*pr + z*pq + delta*pqr` with `0 <= x < p`, `0 <= y < q` and
/// `0 <= z < r`. Nonnegative `n < pqr` is a nonnegative combination of `qr`,
/// `pr` and `pq` exactly when `delta == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtDecomposition {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub delta: i64,
}

/// Splits `n` into its [`CrtDecomposition`] coordinates for the triple `t`.
pub fn crt_decompose(n: i64, t: &Triple) -> CrtDecomposition {
    let (p, q, r) = (t.p(), t.q(), t.r());
    let n = n as i128;
    // Pairwise coprimality makes each inverse exist.
    let inv_qr = mod_inverse(q as i128 * r as i128, p).expect("gcd(qr, p) = 1");
    let inv_pr = mod_inverse(p as i128 * r as i128, q).expect("gcd(pr, q) = 1");
    let inv_pq = mod_inverse(p as i128 * q as i128, r).expect("gcd(pq, r) = 1");
    let x = lnr(n * inv_qr as i128, p);
    let y = lnr(n * inv_pr as i128, q);
    let z = lnr(n * inv_pq as i128, r);
    let combined = x as i128 * (q * r) as i128 + y as i128 * (p * r) as i128 + z as i128 * (p * q) as i128;
    let pqr = t.pqr() as i128;
    debug_assert_eq!((n - combined).rem_euclid(pqr), 0);
    let delta = (n - combined) / pqr;
    CrtDecomposition {
        x,
        y,
        z,
        delta: delta as i64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_small_cases() {
        assert_eq!(gcd(0, 0), 0);
        assert_eq!(gcd(0, 9), 9);
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(35, 64), 1);
    }

    #[test]
    fn lnr_covers_negatives() {
        assert_eq!(lnr(7, 3), 1);
        assert_eq!(lnr(-1, 5), 4);
        assert_eq!(lnr(-10, 5), 0);
        assert_eq!(lnr(0, 1), 0);
        assert_eq!(lnr(i128::MIN, 7), lnr((i128::MIN % 7) + 7, 7));
    }

    #[test]
    #[should_panic(expected = "modulus must be positive")]
    fn lnr_rejects_zero_modulus() {
        lnr(5, 0);
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(2, 185).unwrap(), 93);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert_eq!(mod_inverse(1, 1).unwrap(), 0);
        assert!(matches!(
            mod_inverse(4, 8),
            Err(Error::NonInvertible { value: 4, modulus: 8 })
        ));
    }

    #[test]
    fn is_prime_matches_trial_division_below_10000() {
        let trial = |n: u64| {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        };
        for n in 0..10_000 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn is_prime_near_word_boundary() {
        // Largest primes below 2^64 and 2^63, plus neighbors.
        assert!(is_prime(u64::MAX - 58));
        assert!(!is_prime(u64::MAX));
        assert!(is_prime((1 << 63) - 25));
        assert!(!is_prime((1 << 63) - 24));
        // Strong pseudoprime to many small bases.
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn progression_search_examples() {
        assert_eq!(next_prime_in_progression(2, 5, 25).unwrap(), 37);
        assert_eq!(next_prime_in_progression(1, 2, 2).unwrap(), 3);
        assert_eq!(next_prime_in_progression(4, 7, 49).unwrap(), 53);
    }

    #[test]
    fn progression_search_rejects_shared_factors() {
        assert!(matches!(
            next_prime_in_progression(6, 9, 0),
            Err(Error::EmptyProgression { residue: 6, modulus: 9 })
        ));
        assert!(matches!(
            next_prime_in_progression(0, 5, 0),
            Err(Error::EmptyProgression { .. })
        ));
    }

    #[test]
    fn progression_search_respects_cap() {
        assert!(matches!(
            next_prime_in_progression_capped(1, 2, 2, 0),
            Err(Error::SearchExhausted(_))
        ));
    }

    #[test]
    fn crt_decompose_unit_example() {
        let t = Triple::new(3, 5, 7).unwrap();
        let d = crt_decompose(1, &t);
        assert_eq!(
            d,
            CrtDecomposition {
                x: 2,
                y: 1,
                z: 1,
                delta: -1
            }
        );
    }

    #[test]
    fn crt_decompose_recombines() {
        let t = Triple::new(4, 9, 35).unwrap();
        for n in [-500i64, -1, 0, 1, 2, 629, 1259, 1260, 5000] {
            let d = crt_decompose(n, &t);
            assert!(d.x < 4 && d.y < 9 && d.z < 35);
            let back = d.x as i64 * 315 + d.y as i64 * 140 + d.z as i64 * 36 + d.delta * 1260;
            assert_eq!(back, n, "n = {n}");
        }
    }
}
