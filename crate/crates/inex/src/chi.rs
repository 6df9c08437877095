//! Streaming coefficient engine.
//!
//! The engine never materializes the polynomial. It rests on two facts about
//! `Q_{p,q,r}`. First, an integer `n` in `[0, pqr)` is a nonnegative linear
//! combination of `qr`, `pr` and `pq` exactly when its canonical combination
//! value `f(n) = x q + y p`, built from the digits `x = <n (qr)^-1>_p` and
//! `y = <n (pr)^-1>_q`, is at most `floor(n / r)`; `chi(n)` is the indicator
//! of that event. The two digits must be kept separate: reducing `f(n)`
//! modulo `pq` would conflate values in `[pq, 2pq)` with representable ones.
//! Second, the coefficient of `x^m` equals the sum of
//! `chi(n) - chi(n-q) - chi(n-r) + chi(n-q-r)` over the window
//! `m-p < n <= m`, which turns consecutive coefficients into a running sum
//! over a sliding window of width `p`.
//!
//! [`CoeffStream`] advances one exponent per step. Each of the four window
//! corners keeps the two rolling digits and a rolling residue modulo `r`
//! with its floor counter, so a step costs a handful of adds, compares and
//! two small multiplications, and no division. Memory is a ring of `p`
//! window increments plus constants, independent of the degree.

use crate::modmath::{lnr, mod_inverse};
use crate::poly::HeightProfile;
use crate::Triple;

/// Precomputed context for pointwise `chi` evaluation.
#[derive(Debug, Clone)]
pub struct ChiContext {
    triple: Triple,
    qr_inv_p: u64,
    pr_inv_q: u64,
}

impl ChiContext {
    /// Prepares the digit inverses `(qr)^-1 mod p` and `(pr)^-1 mod q`.
    pub fn new(t: &Triple) -> Self {
        let qr_inv_p =
            mod_inverse(t.q() as i128 * t.r() as i128, t.p()).expect("gcd(qr, p) = 1");
        let pr_inv_q =
            mod_inverse(t.p() as i128 * t.r() as i128, t.q()).expect("gcd(pr, q) = 1");
        Self {
            triple: *t,
            qr_inv_p,
            pr_inv_q,
        }
    }

    /// The triple this context was built for.
    pub fn triple(&self) -> &Triple {
        &self.triple
    }

    /// Indicator that `n` is a nonnegative combination of `qr`, `pr`, `pq`.
    ///
    /// Negative arguments return 0 by convention; they occur naturally in the
    /// window sums near the low end of the coefficient range.
    ///
    /// # Panics
    ///
    /// Panics if `n >= pqr`, where the combination criterion no longer
    /// matches the digit test.
    pub fn chi(&self, n: i64) -> i64 {
        if n < 0 {
            return 0;
        }
        assert!(
            (n as u64) < self.triple.pqr(),
            "chi is only defined below pqr"
        );
        let x = lnr(n as i128 * self.qr_inv_p as i128, self.triple.p());
        let y = lnr(n as i128 * self.pr_inv_q as i128, self.triple.q());
        let f = x * self.triple.q() + y * self.triple.p();
        (f as i64 <= n / self.triple.r() as i64) as i64
    }
}

/// Indicator of representability computed from the CRT coordinates.
///
/// Independent of [`ChiContext::chi`]: this route splits `n` into the mixed
/// basis `(qr, pr, pq, pqr)` and inspects the `pqr` coordinate.
///
/// # Panics
///
/// Panics unless `0 <= n < pqr`.
pub fn chi_via_delta(n: i64, t: &Triple) -> i64 {
    assert!(
        n >= 0 && (n as u64) < t.pqr(),
        "chi_via_delta is only defined on [0, pqr)"
    );
    (crate::modmath::crt_decompose(n, t).delta == 0) as i64
}

/// One corner of the sliding window: the `chi` argument `v` together with
/// its rolling digits, residue and floor counter.
#[derive(Debug, Clone, Copy)]
struct Corner {
    v: i64,
    x: i64,
    y: i64,
    res_r: i64,
    floor_r: i64,
}

impl Corner {
    fn at(v: i64, ctx: &ChiContext) -> Self {
        let r = ctx.triple.r();
        let res_r = lnr(v as i128, r) as i64;
        Self {
            v,
            x: lnr(v as i128 * ctx.qr_inv_p as i128, ctx.triple.p()) as i64,
            y: lnr(v as i128 * ctx.pr_inv_q as i128, ctx.triple.q()) as i64,
            res_r,
            floor_r: (v - res_r) / r as i64,
        }
    }
}

/// Iterator over `(m, a_m)` for `m = 0 ..= degree`, in order.
///
/// Produced by [`coeff_stream`]. The full coefficient vector is streamed,
/// with no shortcut through the self-reciprocal symmetry, so the output is
/// usable as an independent check of the dense oracle.
#[derive(Debug, Clone)]
pub struct CoeffStream {
    phi: u64,
    next_m: u64,
    acc: i64,
    ring: Vec<i8>,
    ring_pos: usize,
    corners: [Corner; 4],
    p: i64,
    q: i64,
    r: i64,
    /// Digit steps of `n -> n + 1`: `<(qr)^-1>_p` and `<(pr)^-1>_q`.
    x_step: i64,
    y_step: i64,
}

/// Starts the streaming engine for a triple.
pub fn coeff_stream(t: &Triple) -> CoeffStream {
    let (p, q, r) = (t.p(), t.q(), t.r());
    let ctx = ChiContext::new(t);
    // Corners one step before the m = 0 position of each window argument.
    let start = |offset: i64| Corner::at(offset - 1, &ctx);
    CoeffStream {
        phi: t.phi(),
        next_m: 0,
        acc: 0,
        ring: vec![0; p as usize],
        ring_pos: 0,
        corners: [
            start(0),
            start(-(q as i64)),
            start(-(r as i64)),
            start(-(q as i64) - r as i64),
        ],
        p: p as i64,
        q: q as i64,
        r: r as i64,
        x_step: ctx.qr_inv_p as i64,
        y_step: ctx.pr_inv_q as i64,
    }
}

impl CoeffStream {
    /// Degree of the polynomial being streamed.
    pub fn degree(&self) -> u64 {
        self.phi
    }

    /// Bytes of working state, counting the heap-backed ring buffer.
    ///
    /// Depends on `p` only, so two streams with the same smallest member
    /// report the same size no matter how large their degrees are.
    pub fn state_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.ring.len() * std::mem::size_of::<i8>()
    }

    /// Advances one corner and reports its `chi` value.
    #[inline]
    fn step_corner(corner: &mut Corner, p: i64, q: i64, r: i64, x_step: i64, y_step: i64) -> i64 {
        corner.v += 1;
        corner.x += x_step;
        if corner.x >= p {
            corner.x -= p;
        }
        corner.y += y_step;
        if corner.y >= q {
            corner.y -= q;
        }
        corner.res_r += 1;
        if corner.res_r == r {
            corner.res_r = 0;
            corner.floor_r += 1;
        }
        (corner.v >= 0 && corner.x * q + corner.y * p <= corner.floor_r) as i64
    }
}

impl Iterator for CoeffStream {
    type Item = (u64, i64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_m > self.phi {
            return None;
        }
        let m = self.next_m;
        self.next_m += 1;
        let (p, q, r) = (self.p, self.q, self.r);
        let (xs, ys) = (self.x_step, self.y_step);
        let g = Self::step_corner(&mut self.corners[0], p, q, r, xs, ys)
            - Self::step_corner(&mut self.corners[1], p, q, r, xs, ys)
            - Self::step_corner(&mut self.corners[2], p, q, r, xs, ys)
            + Self::step_corner(&mut self.corners[3], p, q, r, xs, ys);
        // The window increment g(m - p) retires as g(m) enters.
        self.acc += g - self.ring[self.ring_pos] as i64;
        self.ring[self.ring_pos] = g as i8;
        self.ring_pos += 1;
        if self.ring_pos == self.ring.len() {
            self.ring_pos = 0;
        }
        Some((m, self.acc))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.phi + 1 - self.next_m;
        let left = usize::try_from(left).ok();
        (left.unwrap_or(usize::MAX), left)
    }
}

/// Streams the whole coefficient vector and summarizes it.
///
/// Memory use is a presence table of `min(p, q, r) + 1` flags plus the
/// stream state; the degree never enters. Distinct coefficient values are at
/// most one more than the diameter bound `min(p, q, r)` apart, so indexing
/// the table by value modulo its length cannot collide.
///
/// # Panics
///
/// Panics if the observed coefficient set has a gap; the coefficient set of
/// one of these polynomials is always a contiguous run of integers.
pub fn profile_stream(t: &Triple) -> HeightProfile {
    let table_len = t.min() + 1;
    let mut present = vec![false; table_len as usize];
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for (_, a) in coeff_stream(t) {
        present[lnr(a as i128, table_len) as usize] = true;
        lo = lo.min(a);
        hi = hi.max(a);
    }
    for v in lo..=hi {
        assert!(
            present[lnr(v as i128, table_len) as usize],
            "coefficient set must fill the interval [{lo}, {hi}], missing {v}"
        );
    }
    HeightProfile {
        degree: t.phi(),
        a_plus: hi,
        a_minus: lo,
        height: hi.max(-lo),
        diameter: hi - lo,
        coeff_set: (lo..=hi).collect(),
    }
}
