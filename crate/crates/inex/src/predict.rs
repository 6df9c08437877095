//! Conformance checking and closed-form coefficient bounds.
//!
//! A triple is conforming when, with `t` the residue of `q` modulo `p`,
//!
//! ```text
//! r > q,    q > p^2,    q = t (mod p),    r t = +/-1 (mod pq).
//! ```
//!
//! For such triples the coefficient extremes `(A^-, A^+)` depend only on `p`
//! and `t`, through the inverse `s` of `t` modulo `p` and the folded values
//! `ut = min(t, p-t)` and `us = min(s, p-s)`. The four closed-form cases are
//! implemented by [`classify_case`]; [`predict_profile`] glues conformance
//! checking, classification and the sign flip for the `rt = -1` branch
//! together.
//!
//! The `q > p^2` requirement is what the closed forms were established
//! under. Relaxing it sometimes still yields correct predictions (the
//! smallest interesting triples violate it), so the check treats it as a
//! warning in non-strict mode and callers are expected to verify such
//! predictions against a computed profile.

use crate::modmath::{gcd, mod_inverse};
use crate::{Error, Result};

/// Derived parameters of a conforming pair `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TernaryParams {
    pub p: u64,
    pub q: u64,
    /// Residue of `q` modulo `p`.
    pub t: u64,
    /// Inverse of `t` modulo `p`, in `[1, p-1]`.
    pub s: u64,
    /// Quotient in `q = theta * p + t`.
    pub theta: u64,
    /// Quotient in `s * t = eta * p + 1`.
    pub eta: u64,
    /// `min(t, p - t)`.
    pub ut: u64,
    /// `min(s, p - s)`.
    pub us: u64,
}

/// Computes [`TernaryParams`] for a pair with `gcd(p, q) = 1` and `q > p`.
///
/// # Errors
///
/// [`Error::BadInput`] if `p < 3`, `q <= p` or the pair shares a factor.
pub fn derive_params(p: u64, q: u64) -> Result<TernaryParams> {
    if p < 3 {
        return Err(Error::BadInput(format!("p = {p} must be at least 3")));
    }
    if q <= p {
        return Err(Error::BadInput(format!("q = {q} must exceed p = {p}")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::BadInput(format!("p = {p} and q = {q} share a factor")));
    }
    let t = q % p;
    let s = mod_inverse(t as i128, p).expect("gcd(t, p) = 1");
    let eta = (s * t - 1) / p;
    debug_assert_eq!(s * t, eta * p + 1);
    Ok(TernaryParams {
        p,
        q,
        t,
        s,
        theta: (q - t) / p,
        eta,
        ut: t.min(p - t),
        us: s.min(p - s),
    })
}

/// Verdict of a conformance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConformanceKind {
    /// `rt = 1 (mod pq)`; predictions apply as computed.
    Direct,
    /// `rt = -1 (mod pq)`; predictions apply with both extremes negated.
    Mirror,
    /// At least one required clause fails.
    NotConforming,
}

impl std::fmt::Display for ConformanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConformanceKind::Direct => "direct",
            ConformanceKind::Mirror => "mirror",
            ConformanceKind::NotConforming => "not-conforming",
        })
    }
}

/// Outcome of [`check_conforming`]: a verdict plus every clause that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conformance {
    pub kind: ConformanceKind,
    /// Failed clauses, empty exactly when the verdict is not `NotConforming`.
    pub violations: Vec<String>,
    /// Satisfied only loosely; currently just `q <= p^2` in non-strict mode.
    pub warnings: Vec<String>,
}

impl Conformance {
    /// True when no required clause failed.
    pub fn is_conforming(&self) -> bool {
        self.kind != ConformanceKind::NotConforming
    }
}

/// Checks every conformance clause, reporting all failures at once.
///
/// Never errors: malformed inputs surface as violations. With `strict` unset
/// the clause `q > p^2` downgrades to a warning.
pub fn check_conforming(p: u64, t: u64, q: u64, r: u64, strict: bool) -> Conformance {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();

    if p < 3 {
        violations.push(format!("p = {p} must be at least 3"));
    }
    if t == 0 || (p >= 3 && t >= p) {
        violations.push(format!("t = {t} must lie in [1, p - 1]"));
    } else if p >= 3 && gcd(t, p) != 1 {
        violations.push(format!("t = {t} must be coprime to p = {p}"));
    }
    if r <= q {
        violations.push(format!("r = {r} must exceed q = {q}"));
    }
    let q_big = q as u128;
    if q_big <= (p as u128) * (p as u128) {
        let clause = format!("q = {q} must exceed p^2 = {}", (p as u128) * (p as u128));
        if strict {
            violations.push(clause);
        } else {
            warnings.push(clause);
        }
    }
    if p >= 3 && q % p != t % p {
        violations.push(format!("q = {q} must be congruent to t = {t} modulo p = {p}"));
    }

    let pq = p as u128 * q as u128;
    let kind = if pq == 0 {
        violations.push("p and q must be positive".into());
        ConformanceKind::NotConforming
    } else {
        let rt = (r as u128 % pq) * (t as u128 % pq) % pq;
        if rt == 1 % pq {
            ConformanceKind::Direct
        } else if rt == (pq - 1) % pq {
            ConformanceKind::Mirror
        } else {
            violations.push(format!(
                "r * t = {rt} (mod pq) must be 1 or pq - 1 = {}",
                pq - 1
            ));
            ConformanceKind::NotConforming
        }
    };

    let kind = if violations.is_empty() {
        kind
    } else {
        ConformanceKind::NotConforming
    };
    Conformance {
        kind,
        violations,
        warnings,
    }
}

/// The four closed-form cases, split by `t` and the folded pair `(ut, us)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    I,
    II,
    III,
    IV,
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseId::I => "i",
            CaseId::II => "ii",
            CaseId::III => "iii",
            CaseId::IV => "iv",
        })
    }
}

/// Closed-form prediction for a conforming triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CaseClassification {
    pub case_id: CaseId,
    pub predicted_a_minus: i64,
    pub predicted_a_plus: i64,
    pub predicted_height: i64,
    pub predicted_diameter: i64,
    /// Set when the `rt = -1 (mod pq)` sign flip has been applied.
    pub mirrored: bool,
}

/// Classifies `(p, t)` into one of the four closed-form cases.
///
/// The returned extremes are for the direct orientation; [`predict_profile`]
/// negates them for mirrored triples.
///
/// # Errors
///
/// [`Error::BadInput`] unless `p >= 3`, `1 <= t < p` and `gcd(t, p) = 1`.
pub fn classify_case(p: u64, t: u64) -> Result<CaseClassification> {
    if p < 3 {
        return Err(Error::BadInput(format!("p = {p} must be at least 3")));
    }
    if t == 0 || t >= p {
        return Err(Error::BadInput(format!("t = {t} must lie in [1, p - 1]")));
    }
    if gcd(t, p) != 1 {
        return Err(Error::BadInput(format!("t = {t} must be coprime to p = {p}")));
    }
    let s = mod_inverse(t as i128, p).expect("gcd(t, p) = 1");
    let ut = t.min(p - t);
    let us = s.min(p - s) as i64;

    let (case_id, a_minus, a_plus);
    if t == 1 {
        debug_assert_eq!(s, 1, "t and s can only be 1 together");
        (case_id, a_minus, a_plus) = (CaseId::I, -1, 1);
    } else if (us as u64) < ut {
        (case_id, a_minus, a_plus) = (CaseId::II, -us - 1, us + 1);
    } else {
        let coherent = (ut, us as u64) == (t, s) || (ut, us as u64) == (p - t, p - s);
        let crossed = (ut, us as u64) == (t, p - s) || (ut, us as u64) == (p - t, s);
        assert!(
            coherent != crossed,
            "folded pair must resolve to exactly one case"
        );
        if coherent {
            (case_id, a_minus, a_plus) = (CaseId::III, -us, us + 1);
        } else {
            (case_id, a_minus, a_plus) = (CaseId::IV, -us - 1, us);
        }
    }
    Ok(CaseClassification {
        case_id,
        predicted_a_minus: a_minus,
        predicted_a_plus: a_plus,
        predicted_height: a_plus.max(-a_minus),
        predicted_diameter: a_plus - a_minus,
        mirrored: false,
    })
}

/// Conformance check plus classification for a concrete triple.
///
/// For mirrored triples the extremes come back negated and swapped, which
/// leaves height and diameter unchanged.
///
/// # Errors
///
/// [`Error::NotConforming`] carrying every violated clause, or
/// [`Error::BadInput`] when `p < 3` makes the residue `t` meaningless.
pub fn predict_profile(p: u64, q: u64, r: u64, strict: bool) -> Result<CaseClassification> {
    if p < 3 {
        return Err(Error::BadInput(format!("p = {p} must be at least 3")));
    }
    let t = q % p;
    let conf = check_conforming(p, t, q, r, strict);
    if !conf.is_conforming() {
        return Err(Error::NotConforming(conf.violations));
    }
    let direct = classify_case(p, t)?;
    Ok(match conf.kind {
        ConformanceKind::Direct => direct,
        ConformanceKind::Mirror => CaseClassification {
            predicted_a_minus: -direct.predicted_a_plus,
            predicted_a_plus: -direct.predicted_a_minus,
            mirrored: true,
            ..direct
        },
        ConformanceKind::NotConforming => unreachable!("checked above"),
    })
}
