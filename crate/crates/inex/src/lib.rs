//! Exact arithmetic for ternary inclusion-exclusion polynomials.
//!
//! For pairwise coprime integers `p, q, r >= 3`, the polynomial
//!
//! ```text
//!             (x^pqr - 1) (x^p - 1) (x^q - 1) (x^r - 1)
//! Q_{p,q,r} = ------------------------------------------
//!             (x^pq - 1) (x^qr - 1) (x^rp - 1) (x - 1)
//! ```
//!
//! has integer coefficients and degree `(p-1)(q-1)(r-1)`. When p, q and r are
//! distinct primes it equals the cyclotomic polynomial of index `pqr`. The
//! coefficients of such a polynomial form a contiguous block of integers
//! `{A^-, ..., A^+}`; the height `max(A^+, -A^-)` and the diameter `A^+ - A^-`
//! are the quantities of interest here.
//!
//! The crate computes coefficients exactly by two independent routes, predicts
//! `(A^-, A^+)` in closed form for a conforming family of triples, searches
//! constructively for triples realizing a requested height or diameter, and
//! cross-checks the window identities that underpin the closed forms.
//!
//! Module map:
//!
//! - [`modmath`]: primality testing, modular inverses, primes in progressions
//!   and CRT coordinate splitting.
//! - [`poly`]: dense coefficient oracle working directly on the quotient of
//!   products above.
//! - [`chi`]: streaming coefficient engine with memory independent of the
//!   degree.
//! - [`predict`]: conformance checking and closed-form coefficient bounds.
//! - [`solve`]: constructive witnesses for target heights and diameters.
//! - [`audit`]: empirical verification of the supporting window identities on
//!   concrete triples.

pub mod audit;
pub mod chi;
pub mod modmath;
pub mod poly;
pub mod predict;
pub mod solve;

use thiserror::Error;

pub use audit::{
    applicable, audit_lemma, check_l1, count_window_multiples, s_sum, AuditId, AuditReport,
};
pub use chi::{chi_via_delta, coeff_stream, profile_stream, ChiContext, CoeffStream};
pub use poly::{profile_from_coeffs, q_poly_coeffs, CoeffVector, HeightProfile};
pub use predict::{check_conforming, classify_case, derive_params, predict_profile};
pub use solve::{
    achievable_diameters, find_p_for_odd_diameter, solve_diameter_for_p, solve_height,
    verify_witness, SolveOptions, Witness,
};

/// Errors reported by fallible operations in this crate.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// The integers do not form a valid triple (size, coprimality or range).
    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    /// A modular inverse was requested for a non-coprime pair.
    #[error("{value} is not invertible modulo {modulus}")]
    NonInvertible { value: i128, modulus: u64 },

    /// An arithmetic progression contains no integer coprime to its modulus,
    /// hence no prime beyond the modulus itself.
    #[error("progression {residue} mod {modulus} contains at most one prime")]
    EmptyProgression { residue: u64, modulus: u64 },

    /// A bounded search ran out of candidates before finding an answer.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    /// A computation would exceed the configured degree cap.
    #[error("degree {degree} exceeds cap {cap}")]
    DegreeCapExceeded { degree: u64, cap: u64 },

    /// Parameters fail the conformance conditions; each violated clause is
    /// listed separately.
    #[error("parameters do not conform: {}", .0.join("; "))]
    NotConforming(Vec<String>),

    /// A computed profile contradicts its prediction or target.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    /// An argument is outside the domain of the operation.
    #[error("bad input: {0}")]
    BadInput(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Largest admissible product `p*q*r`.
///
/// Keeping the product below `2^62` guarantees that every intermediate
/// quantity handled by the streaming engine (indices, least nonnegative
/// residues modulo `pq` and sums of two of them) fits in an `i64`, and that
/// products with one more 64-bit factor fit in an `i128`.
pub const MAX_TRIPLE_PRODUCT: u64 = 1 << 62;

/// An unordered triple of pairwise coprime integers, each at least 3.
///
/// The constructor validates the defining conditions once; the accessors are
/// then infallible. The three members keep the roles they were given, so
/// `Triple::new(3, 5, 7)` and `Triple::new(7, 5, 3)` are distinct values
/// describing the same polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    p: u64,
    q: u64,
    r: u64,
}

impl Triple {
    /// Validates and builds a triple.
    ///
    /// # Errors
    ///
    /// Returns [`Error::InvalidTriple`] if any member is below 3, if two
    /// members share a factor, or if the product reaches
    /// [`MAX_TRIPLE_PRODUCT`].
    pub fn new(p: u64, q: u64, r: u64) -> Result<Self> {
        for v in [p, q, r] {
            if v < 3 {
                return Err(Error::InvalidTriple(format!("{v} < 3")));
            }
        }
        for (a, b) in [(p, q), (q, r), (r, p)] {
            let g = modmath::gcd(a, b);
            if g != 1 {
                return Err(Error::InvalidTriple(format!(
                    "gcd({a}, {b}) = {g}, members must be pairwise coprime"
                )));
            }
        }
        let product = (p as u128) * (q as u128) * (r as u128);
        if product >= MAX_TRIPLE_PRODUCT as u128 {
            return Err(Error::InvalidTriple(format!(
                "product {product} reaches 2^62"
            )));
        }
        Ok(Self { p, q, r })
    }

    /// First member.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Second member.
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Third member.
    pub fn r(&self) -> u64 {
        self.r
    }

    /// Product of the three members.
    pub fn pqr(&self) -> u64 {
        self.p * self.q * self.r
    }

    /// Degree of the associated polynomial, `(p-1)(q-1)(r-1)`.
    pub fn phi(&self) -> u64 {
        (self.p - 1) * (self.q - 1) * (self.r - 1)
    }

    /// Smallest member. Bounds the diameter of the coefficient set.
    pub fn min(&self) -> u64 {
        self.p.min(self.q).min(self.r)
    }
}

impl std::fmt::Display for Triple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.p, self.q, self.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_accepts_pairwise_coprime_members() {
        let t = Triple::new(3, 5, 7).unwrap();
        assert_eq!((t.p(), t.q(), t.r()), (3, 5, 7));
        assert_eq!(t.pqr(), 105);
        assert_eq!(t.phi(), 48);
        assert_eq!(t.min(), 3);
    }

    #[test]
    fn triple_keeps_member_roles() {
        let t = Triple::new(93, 5, 37).unwrap();
        assert_eq!((t.p(), t.q(), t.r()), (93, 5, 37));
        assert_eq!(t.min(), 5);
    }

    #[test]
    fn triple_rejects_small_members() {
        assert!(Triple::new(2, 5, 7).is_err());
        assert!(Triple::new(3, 1, 7).is_err());
        assert!(Triple::new(3, 5, 0).is_err());
    }

    #[test]
    fn triple_rejects_shared_factors() {
        assert!(Triple::new(3, 5, 6).is_err());
        assert!(Triple::new(3, 5, 5).is_err());
        assert!(Triple::new(15, 25, 7).is_err());
    }

    #[test]
    fn triple_rejects_oversized_products() {
        // 2^21 - 1, 2^21 + 1 and 2^20 + 1 are odd and pairwise coprime, with
        // product just above 2^62.
        let a = (1u64 << 21) - 1;
        let b = (1u64 << 21) + 1;
        let c = (1u64 << 20) + 1;
        assert!(Triple::new(a, b, c).is_err());
        assert!(Triple::new(3, 5, u64::MAX / 16).is_err());
    }

    #[test]
    fn errors_render_their_context() {
        let e = Triple::new(3, 5, 6).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("gcd(5, 6)") || msg.contains("gcd(6,"), "{msg}");
    }
}
