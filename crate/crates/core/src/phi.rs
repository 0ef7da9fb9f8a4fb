//! Piecewise weight functions `φ(t) = c t^α (1 + |ln t|)^β` and the class `G_p`.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::ext::{sign_tol, ExtReal};

const LN2: f64 = std::f64::consts::LN_2;
const CONT_TOL: f64 = 1e-9;
const SLOPE_TOL: f64 = 1e-12;
const SAMPLE_SLACK: f64 = 1e-12;
const MAX_VIOLATIONS: usize = 64;

/// One piece `coef · t^pow · (1 + |ln t|)^logpow` on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(deserialize_with = "de_lo")]
    pub lo: f64,
    pub hi: ExtReal,
    pub coef: f64,
    pub pow: f64,
    pub logpow: f64,
}

fn de_lo<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    match ExtReal::deserialize(d)? {
        ExtReal::Finite(x) => Ok(x),
        ExtReal::Inf => Err(serde::de::Error::custom("lower end of a segment cannot be inf")),
    }
}

impl Segment {
    pub fn new(lo: f64, hi: ExtReal, coef: f64, pow: f64, logpow: f64) -> Self {
        Segment { lo, hi, coef, pow, logpow }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.coef * pow(t, self.pow);
        if self.logpow != 0.0 {
            v *= (1.0 + t.ln().abs()).powf(self.logpow);
        }
        v
    }

    fn ln_eval_log(&self, lt: f64) -> f64 {
        self.coef.ln() + self.pow * lt + self.logpow * (1.0 + lt.abs()).ln()
    }

    fn is_constant(&self) -> bool {
        self.pow == 0.0 && self.logpow == 0.0
    }

    /// Range of `sign(ln t)/(1 + |ln t|)` over the part of the segment on one side of 1.
    fn g_ranges(&self) -> Vec<(f64, f64, f64, f64)> {
        let hi = self.hi.to_f64();
        let g = |t: f64| -> f64 {
            if t == 0.0 || t == f64::INFINITY {
                0.0
            } else if t < 1.0 {
                -1.0 / (1.0 - t.ln())
            } else {
                1.0 / (1.0 + t.ln())
            }
        };
        let mut out = Vec::new();
        if self.lo < 1.0 {
            let b = hi.min(1.0);
            let gb = if b >= 1.0 { -1.0 } else { g(b) };
            out.push((self.lo, b, gb, g(self.lo)));
        }
        if hi > 1.0 {
            let a = self.lo.max(1.0);
            let ga = if a <= 1.0 { 1.0 } else { g(a) };
            out.push((a, hi, g(hi), ga));
        }
        out
    }

    /// Smallest and largest value of the logarithmic derivative of `φ · t^{-shift}` on each side of 1.
    fn slope_bounds(&self, shift: f64) -> Vec<(f64, f64, f64, f64)> {
        self.g_ranges()
            .into_iter()
            .map(|(a, b, gmin, gmax)| {
                let x = self.pow - shift + self.logpow * gmin;
                let y = self.pow - shift + self.logpow * gmax;
                (a, b, x.min(y), x.max(y))
            })
            .collect()
    }
}

fn pow(t: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else if a == 1.0 {
        t
    } else if a == 0.5 {
        t.sqrt()
    } else if a == 2.0 {
        t * t
    } else {
        t.powf(a)
    }
}

/// A validated weight function on `(0, ∞)` in dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhi")]
pub struct PhiSpec {
    dim: usize,
    pieces: Vec<Segment>,
}

#[derive(Deserialize)]
struct RawPhi {
    dim: usize,
    pieces: Vec<Segment>,
}

impl TryFrom<RawPhi> for PhiSpec {
    type Error = Error;
    fn try_from(r: RawPhi) -> Result<Self> {
        PhiSpec::new(r.dim, r.pieces)
    }
}

/// Exponent pair `(α, β)` with coefficient governing one end of `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPair {
    pub alpha: f64,
    pub beta: f64,
    pub coef: f64,
}

impl PhiSpec {
    pub fn new(dim: usize, mut pieces: Vec<Segment>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPhi("dimension must be at least 1".into()));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidPhi("no segments".into()));
        }
        if pieces[0].lo != 0.0 {
            return Err(Error::InvalidPhi("first segment must start at 0".into()));
        }
        if !pieces.last().unwrap().hi.is_inf() {
            return Err(Error::InvalidPhi("last segment must end at inf".into()));
        }
        for (i, s) in pieces.iter().enumerate() {
            let finite = [s.lo, s.coef, s.pow, s.logpow].iter().all(|x| x.is_finite());
            if !finite || s.coef <= 0.0 || s.lo < 0.0 {
                return Err(Error::InvalidPhi(format!("segment {i} has invalid parameters")));
            }
            if s.hi.to_f64() <= s.lo {
                return Err(Error::InvalidPhi(format!("segment {i} is empty")));
            }
        }
        for i in 0..pieces.len() - 1 {
            let b = pieces[i].hi.to_f64();
            let next = pieces[i + 1].lo;
            if (b - next).abs() > 1e-12 * b.max(next) {
                return Err(Error::InvalidPhi(format!("gap or overlap after segment {i}")));
            }
            pieces[i].hi = ExtReal::Finite(next);
            let left = pieces[i].eval(next);
            let right = pieces[i + 1].eval(next);
            if (left - right).abs() > CONT_TOL * left.abs().max(right.abs()) {
                return Err(Error::InvalidPhi(format!("discontinuous at t = {next}: {left} vs {right}")));
            }
        }
        let phi = PhiSpec { dim, pieces };
        let one = phi.eval(1.0);
        if !(one.is_finite() && (one - 1.0).abs() <= CONT_TOL) {
            return Err(Error::InvalidPhi(format!("phi(1) = {one}, expected 1")));
        }
        Ok(phi)
    }

    /// `t^α` on `(0, ∞)`.
    pub fn power(dim: usize, alpha: f64) -> Result<Self> {
        Self::power_log(dim, alpha, 0.0)
    }

    /// `t^α (1 + |ln t|)^β` on `(0, ∞)`.
    pub fn power_log(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(dim, vec![Segment::new(0.0, ExtReal::Inf, 1.0, alpha, beta)])
    }

    /// `t^{a0}` on `(0, 1)` and `t^{a1}` on `[1, ∞)`.
    pub fn two_sided(dim: usize, a0: f64, a1: f64) -> Result<Self> {
        Self::new(
            dim,
            vec![
                Segment::new(0.0, ExtReal::Finite(1.0), 1.0, a0, 0.0),
                Segment::new(1.0, ExtReal::Inf, 1.0, a1, 0.0),
            ],
        )
    }

    /// `φ_{u,v}(t) = t^{d/u}` for `t ≤ 1` and `t^{d/v}` for `t > 1`.
    pub fn phi_uv(dim: usize, u: ExtReal, v: ExtReal) -> Result<Self> {
        let d = dim as f64;
        Self::two_sided(dim, d * u.recip(), d * v.recip())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Segment] {
        &self.pieces
    }

    fn segment_index(&self, t: f64) -> usize {
        self.pieces.partition_point(|s| s.lo <= t).saturating_sub(1)
    }

    /// `φ(t)` for `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[self.segment_index(t)].eval(t)
    }

    /// `ln φ(2^e)`, valid far outside the range of `f64` arguments.
    pub fn ln_eval_pow2(&self, e: i64) -> f64 {
        if e.abs() <= 1000 {
            return self.eval((e as f64).exp2()).ln();
        }
        let lt = e as f64 * LN2;
        let idx = self.pieces.partition_point(|s| s.lo == 0.0 || s.lo.ln() <= lt).saturating_sub(1);
        self.pieces[idx].ln_eval_log(lt)
    }

    pub fn at_zero(&self) -> ExpPair {
        let s = &self.pieces[0];
        ExpPair { alpha: s.pow, beta: s.logpow, coef: s.coef }
    }

    pub fn at_infinity(&self) -> ExpPair {
        let s = self.pieces.last().unwrap();
        ExpPair { alpha: s.pow, beta: s.logpow, coef: s.coef }
    }

    /// `sup{t > 0 : φ(t) ≤ y}` for nondecreasing `φ`; `None` when the set is empty.
    pub fn sup_level(&self, y: f64) -> Option<ExtReal> {
        let sup = limit_at_infinity(self.at_infinity(), 0.0);
        if let ExtReal::Finite(s) = sup {
            if s <= y {
                return Some(ExtReal::Inf);
            }
        }
        let f = |lt: f64| self.eval(lt.exp());
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        if f(0.0) <= y {
            hi = 1.0;
            while f(hi) <= y {
                lo = hi;
                hi *= 2.0;
                if hi > 700.0 {
                    return Some(ExtReal::Inf);
                }
            }
        } else {
            lo = -1.0;
            while f(lo) > y {
                hi = lo;
                lo *= 2.0;
                if lo < -700.0 {
                    return None;
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if f(mid) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(ExtReal::Finite(lo.exp()))
    }
}

/// `φ(t)`, rejecting non-positive arguments.
pub fn phi_eval(phi: &PhiSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveArgument(t));
    }
    Ok(phi.eval(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `φ(r) < φ(t)` for some `t < r`.
    PhiDecreasing,
    /// `φ(r) r^{-d/p} > φ(t) t^{-d/p}` for some `t < r`.
    ScaledIncreasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpViolation {
    pub t: f64,
    pub r: f64,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpReport {
    pub is_member: bool,
    pub p: f64,
    pub violations: Vec<GpViolation>,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidP(p))
    }
}

/// Decides `φ ∈ G_p`: `φ` nondecreasing and `φ(t) t^{-d/p}` nonincreasing.
pub fn check_gp(phi: &PhiSpec, p: f64) -> Result<GpReport> {
    check_p(p)?;
    let dp = phi.dim as f64 / p;
    let mut violations = Vec::new();
    let push = |v: GpViolation, list: &mut Vec<GpViolation>| {
        if list.len() < MAX_VIOLATIONS {
            list.push(v);
        }
    };

    // Dyadic sampling on t = 2^{k/8}.
    let grid: Vec<f64> = (-240..=240).map(|k| (k as f64 / 8.0).exp2()).collect();
    let mut sampled = [false, false];
    for w in grid.windows(2) {
        let (t, r) = (w[0], w[1]);
        let (ft, fr) = (phi.eval(t), phi.eval(r));
        if fr < ft * (1.0 - SAMPLE_SLACK) {
            sampled[0] = true;
            push(GpViolation { t, r, kind: ViolationKind::PhiDecreasing }, &mut violations);
        }
        if fr / ft > (r / t).powf(dp) * (1.0 + SAMPLE_SLACK) {
            sampled[1] = true;
            push(GpViolation { t, r, kind: ViolationKind::ScaledIncreasing }, &mut violations);
        }
    }

    // Across breakpoints.
    let step = (1.0f64 / 8.0).exp2();
    for s in &phi.pieces[1..] {
        let (t, r) = (s.lo / step, s.lo * step);
        let ratio = phi.eval(r) / phi.eval(t);
        if ratio < 1.0 - CONT_TOL {
            push(GpViolation { t, r, kind: ViolationKind::PhiDecreasing }, &mut violations);
        }
        if ratio > (r / t).powf(dp) * (1.0 + CONT_TOL) {
            push(GpViolation { t, r, kind: ViolationKind::ScaledIncreasing }, &mut violations);
        }
    }

    // Sign of the logarithmic derivative on every smooth piece.
    for s in &phi.pieces {
        for (a, b, min_slope, _) in s.slope_bounds(0.0) {
            if min_slope < -SLOPE_TOL && !sampled[0] {
                let t = interior_point(a, b);
                push(
                    GpViolation { t, r: t * (1.0 + 1e-6), kind: ViolationKind::PhiDecreasing },
                    &mut violations,
                );
            }
        }
        for (a, b, _, max_slope) in s.slope_bounds(dp) {
            if max_slope > SLOPE_TOL && !sampled[1] {
                let t = interior_point(a, b);
                push(
                    GpViolation { t, r: t * (1.0 + 1e-6), kind: ViolationKind::ScaledIncreasing },
                    &mut violations,
                );
            }
        }
    }

    Ok(GpReport { is_member: violations.is_empty(), p, violations })
}

fn interior_point(a: f64, b: f64) -> f64 {
    match (a == 0.0, b == f64::INFINITY) {
        (true, true) => 1.0,
        (true, false) => b / 2.0,
        (false, true) => a * 2.0,
        (false, false) => (a * b).sqrt(),
    }
}

/// Fails with [`Error::NotGp`] unless `φ ∈ G_p`.
pub fn require_gp(phi: &PhiSpec, p: f64) -> Result<()> {
    let report = check_gp(phi, p)?;
    if report.is_member {
        Ok(())
    } else {
        Err(Error::NotGp(Box::new(report)))
    }
}

/// Limits of `φ` and `φ(t) t^{-d/p}` at both ends of `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub lim0_phi: ExtReal,
    pub lim0_scaled: ExtReal,
    pub lim_inf_phi: ExtReal,
    pub lim_inf_scaled: ExtReal,
    pub at_zero: ExpPair,
    pub at_infinity: ExpPair,
}

fn limit_at_zero(e: ExpPair, shift: f64) -> ExtReal {
    match (sign_tol(e.alpha - shift), sign_tol(e.beta)) {
        (1, _) | (0, -1) => ExtReal::ZERO,
        (-1, _) | (0, 1) => ExtReal::Inf,
        _ => ExtReal::Finite(e.coef),
    }
}

fn limit_at_infinity(e: ExpPair, shift: f64) -> ExtReal {
    match (sign_tol(e.alpha - shift), sign_tol(e.beta)) {
        (-1, _) | (0, -1) => ExtReal::ZERO,
        (1, _) | (0, 1) => ExtReal::Inf,
        _ => ExtReal::Finite(e.coef),
    }
}

pub fn phi_asymptotics(phi: &PhiSpec, p: f64) -> Result<Asymptotics> {
    check_p(p)?;
    let dp = phi.dim as f64 / p;
    let (z, i) = (phi.at_zero(), phi.at_infinity());
    Ok(Asymptotics {
        lim0_phi: limit_at_zero(z, 0.0),
        lim0_scaled: limit_at_zero(z, dp),
        lim_inf_phi: limit_at_infinity(i, 0.0),
        lim_inf_scaled: limit_at_infinity(i, dp),
        at_zero: z,
        at_infinity: i,
    })
}

/// The `t` with `φ(t) = y`, or `∞` when `y` exceeds `sup φ`.
pub fn phi_inverse(phi: &PhiSpec, y: f64) -> Result<ExtReal> {
    if !(y > 0.0) {
        return Err(Error::NonPositiveArgument(y));
    }
    let sup = limit_at_infinity(phi.at_infinity(), 0.0);
    if let ExtReal::Finite(s) = sup {
        let last = phi.pieces.last().unwrap();
        if last.is_constant() && (y - s).abs() <= CONT_TOL * s {
            return Err(Error::NotInvertible(y));
        }
        if y >= s {
            return Ok(ExtReal::Inf);
        }
    }
    let inf = limit_at_zero(phi.at_zero(), 0.0).to_f64();
    if y < inf {
        return Err(Error::BelowRange(y));
    }
    for s in &phi.pieces {
        let lo_val = if s.lo == 0.0 { inf } else { s.eval(s.lo) };
        let hi_val = match s.hi {
            ExtReal::Inf => sup.to_f64(),
            ExtReal::Finite(h) => s.eval(h),
        };
        if y > hi_val {
            continue;
        }
        if s.is_constant() {
            if (y - s.coef).abs() <= CONT_TOL * s.coef {
                return Err(Error::NotInvertible(y));
            }
            continue;
        }
        if y < lo_val * (1.0 - CONT_TOL) {
            break;
        }
        if s.slope_bounds(0.0).iter().any(|b| b.2 < -SLOPE_TOL) {
            return Err(Error::NotInvertible(y));
        }
        return Ok(ExtReal::Finite(solve_segment(s, y)));
    }
    Err(Error::NotInvertible(y))
}

fn solve_segment(s: &Segment, y: f64) -> f64 {
    if s.logpow == 0.0 {
        let t = (y / s.coef).powf(1.0 / s.pow);
        let hi = s.hi.to_f64();
        return t.clamp(s.lo, hi);
    }
    let target = y.ln();
    let mut lo = if s.lo > 0.0 { s.lo.ln() } else { -1.0 };
    while s.lo == 0.0 && s.ln_eval_log(lo) > target {
        lo *= 2.0;
    }
    let mut hi = match s.hi {
        ExtReal::Finite(h) => h.ln(),
        ExtReal::Inf => {
            let mut h = lo.abs().max(1.0);
            while s.ln_eval_log(h) < target {
                h *= 2.0;
            }
            h
        }
    };
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if s.ln_eval_log(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}
