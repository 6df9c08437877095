//! Dense coefficient oracle.
//!
//! Works straight off the defining quotient: the four numerator factors are
//! expanded into a sparse signed sum of 16 monomials, and the result is
//! divided in place by each denominator factor `x^d - 1` in turn. Each of
//! those divisions is exact, so a nonzero remainder can only mean a broken
//! invariant and is treated as a panic rather than an error.
//!
//! The oracle materializes roughly `p*q*r` coefficients, so its memory use
//! grows with the product rather than with the degree. The streaming engine
//! in [`crate::chi`] is the route for degrees where that is too costly; this
//! module is the simple reference the engine is checked against.

use crate::{Error, Result, Triple};

/// Default bound on the polynomial degree the oracle will materialize.
pub const DEFAULT_DEGREE_CAP: u64 = 10_000_000;

/// Exact coefficient vector of a `Q_{p,q,r}`, indexed by exponent.
///
/// Invariants checked at construction: the constant and leading coefficients
/// are 1, the vector is self-reciprocal and the coefficients sum to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    coeffs: Vec<i64>,
}

impl CoeffVector {
    fn new(coeffs: Vec<i64>) -> Self {
        let n = coeffs.len() - 1;
        assert_eq!(coeffs[0], 1, "constant coefficient must be 1");
        assert_eq!(coeffs[n], 1, "leading coefficient must be 1");
        assert_eq!(coeffs.iter().sum::<i64>(), 1, "coefficients must sum to 1");
        for m in 0..=n / 2 {
            assert_eq!(coeffs[m], coeffs[n - m], "vector must be self-reciprocal");
        }
        Self { coeffs }
    }

    /// Degree of the polynomial.
    pub fn degree(&self) -> u64 {
        (self.coeffs.len() - 1) as u64
    }

    /// All coefficients, from exponent 0 to the degree.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Coefficient of `x^m`, zero outside `[0, degree]`.
    pub fn get(&self, m: i64) -> i64 {
        usize::try_from(m)
            .ok()
            .and_then(|i| self.coeffs.get(i))
            .copied()
            .unwrap_or(0)
    }

    /// Summary of the coefficient set. See [`profile_from_coeffs`].
    pub fn profile(&self) -> HeightProfile {
        profile_from_coeffs(&self.coeffs)
    }
}

/// Divides in place by `x^d - 1`, shrinking the vector to the quotient.
///
/// Division runs from the top down, so each source coefficient is final when
/// read. The remainder occupies the lowest `d` slots and must vanish.
fn divide_by_cyclic(a: &mut Vec<i64>, d: usize) {
    let n = a.len() - 1;
    debug_assert!(d <= n);
    for i in (d..=n).rev() {
        a[i - d] += a[i];
    }
    assert!(
        a[..d].iter().all(|&c| c == 0),
        "division by x^{d} - 1 left a remainder"
    );
    a.drain(..d);
}

/// Exact coefficients of `Q_{p,q,r}` with the default degree cap.
pub fn q_poly_coeffs(t: &Triple) -> Result<CoeffVector> {
    q_poly_coeffs_capped(t, DEFAULT_DEGREE_CAP)
}

/// Exact coefficients of `Q_{p,q,r}`, refusing degrees above `cap`.
///
/// # Errors
///
/// Returns [`Error::DegreeCapExceeded`] when `(p-1)(q-1)(r-1) > cap`.
pub fn q_poly_coeffs_capped(t: &Triple, cap: u64) -> Result<CoeffVector> {
    let degree = t.phi();
    if degree > cap {
        return Err(Error::DegreeCapExceeded { degree, cap });
    }
    let (p, q, r) = (t.p() as usize, t.q() as usize, t.r() as usize);
    let pqr = p * q * r;

    // (x^pqr - 1)(x^p - 1)(x^q - 1)(x^r - 1): one monomial per subset, the
    // sign flipping with each omitted factor.
    let mut a = vec![0i64; pqr + p + q + r + 1];
    for mask in 0u32..16 {
        let mut e = 0usize;
        for (bit, term) in [(1, pqr), (2, p), (4, q), (8, r)] {
            if mask & bit != 0 {
                e += term;
            }
        }
        a[e] += if mask.count_ones() % 2 == 0 { 1 } else { -1 };
    }

    for d in [p * q, q * r, r * p, 1] {
        divide_by_cyclic(&mut a, d);
    }
    debug_assert_eq!(a.len() as u64, degree + 1);
    Ok(CoeffVector::new(a))
}

/// Height and diameter summary of a coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightProfile {
    /// Degree of the underlying polynomial.
    pub degree: u64,
    /// Largest coefficient.
    pub a_plus: i64,
    /// Smallest coefficient.
    pub a_minus: i64,
    /// `max(a_plus, -a_minus)`.
    pub height: i64,
    /// `a_plus - a_minus`.
    pub diameter: i64,
    /// Every value the coefficients take, in increasing order.
    pub coeff_set: Vec<i64>,
}

/// Builds a [`HeightProfile`] from raw coefficients.
///
/// The distinct coefficient values are recomputed from scratch and compared
/// against the full integer interval `[min, max]`.
///
/// # Panics
///
/// Panics if `coeffs` is empty or if the value set has gaps; the coefficient
/// set of one of these polynomials is always a contiguous run of integers, so
/// a gap is treated as a broken invariant rather than a reportable error.
pub fn profile_from_coeffs(coeffs: &[i64]) -> HeightProfile {
    assert!(!coeffs.is_empty(), "need at least one coefficient");
    let mut seen: Vec<i64> = coeffs.to_vec();
    seen.sort_unstable();
    seen.dedup();
    let a_minus = seen[0];
    let a_plus = seen[seen.len() - 1];
    let interval: Vec<i64> = (a_minus..=a_plus).collect();
    assert_eq!(
        seen, interval,
        "coefficient set must fill the interval [{a_minus}, {a_plus}]"
    );
    HeightProfile {
        degree: (coeffs.len() - 1) as u64,
        a_plus,
        a_minus,
        height: a_plus.max(-a_minus),
        diameter: a_plus - a_minus,
        coeff_set: interval,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(p: u64, q: u64, r: u64) -> CoeffVector {
        q_poly_coeffs(&Triple::new(p, q, r).unwrap()).unwrap()
    }

    #[test]
    fn smallest_cyclotomic_case_matches_the_classic_expansion() {
        // Phi_105, the first cyclotomic polynomial with a coefficient
        // outside {-1, 0, 1}.
        let v = coeffs(3, 5, 7);
        assert_eq!(v.degree(), 48);
        assert_eq!(v.get(0), 1);
        assert_eq!(v.get(7), -2);
        assert_eq!(v.get(41), -2);
        assert_eq!(v.get(48), 1);
        let prof = v.profile();
        assert_eq!(prof.coeff_set, vec![-2, -1, 0, 1]);
        assert_eq!(prof.height, 2);
        assert_eq!(prof.diameter, 3);
    }

    #[test]
    fn composite_members_are_supported() {
        let v = coeffs(5, 37, 93);
        assert_eq!(v.degree(), 13_248);
        let prof = v.profile();
        assert_eq!(prof.a_plus, 2);
        assert_eq!(prof.a_minus, -3);
    }

    #[test]
    fn oracle_is_symmetric_in_the_member_roles() {
        let base = coeffs(3, 5, 7);
        for (p, q, r) in [(3, 7, 5), (5, 3, 7), (5, 7, 3), (7, 3, 5), (7, 5, 3)] {
            assert_eq!(coeffs(p, q, r), base);
        }
    }

    #[test]
    fn degree_cap_is_enforced() {
        let t = Triple::new(3, 5, 7).unwrap();
        assert!(matches!(
            q_poly_coeffs_capped(&t, 47),
            Err(Error::DegreeCapExceeded { degree: 48, cap: 47 })
        ));
        assert!(q_poly_coeffs_capped(&t, 48).is_ok());
    }

    #[test]
    fn profile_handles_single_valued_input() {
        let prof = profile_from_coeffs(&[1, 1]);
        assert_eq!(prof.a_plus, 1);
        assert_eq!(prof.a_minus, 1);
        assert_eq!(prof.diameter, 0);
        assert_eq!(prof.height, 1);
        assert_eq!(prof.coeff_set, vec![1]);
    }

    #[test]
    #[should_panic(expected = "fill the interval")]
    fn profile_rejects_gapped_sets() {
        profile_from_coeffs(&[1, 3, 1]);
    }

    #[test]
    fn division_helper_agrees_with_hand_division() {
        // (x^6 - 1) / (x^2 - 1) = x^4 + x^2 + 1.
        let mut a = vec![-1, 0, 0, 0, 0, 0, 1];
        divide_by_cyclic(&mut a, 2);
        assert_eq!(a, vec![1, 0, 1, 0, 1]);
    }
}
