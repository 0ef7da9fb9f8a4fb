//! Extremal families: spread-out simple functions, flat translates and coefficient witnesses.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::phi::{phi_asymptotics, require_gp, PhiSpec};
use crate::rearrangement::{rational_from_f64, DyadicCube, GeneralCube, SimpleFunction};
use crate::seq_decide::{conjugate, lq_membership, SeqAsym};
use crate::seq_space::{CoeffArray, MAX_LEVEL};

const LN2: f64 = std::f64::consts::LN_2;

/// Largest number of cubes or coefficients a construction may emit.
pub const MAX_PIECES: u64 = 1_000_000;

/// How level `j` of the input is split: `m` cubes of side `tau` and volume `|A_j|/m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadLevel {
    pub value: f64,
    pub measure: f64,
    pub t_max: ExtReal,
    pub count: u64,
    pub tau: f64,
    /// Position (1-based) of the first cube of this level along the first axis.
    pub first: u64,
}

/// Layout of a spread-out function: cube `k` is centred at `(k · spacing, 0, …, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadPlan {
    pub levels: Vec<SpreadLevel>,
    pub spacing: f64,
    pub total: u64,
}

impl SpreadPlan {
    pub fn center(&self, k: u64, dim: usize) -> Vec<f64> {
        let mut c = vec![0.0; dim];
        c[0] = k as f64 * self.spacing;
        c
    }

    /// Re-checks `τ_j ≤ t_j`, `m_j τ_j^d = |A_j|`, `a_j φ(τ_j) ≤ 1` and gaps above 2.
    pub fn verify(&self, phi: &PhiSpec) -> Result<()> {
        let d = phi.dim() as i32;
        let max_tau = self.levels.iter().map(|l| l.tau).fold(0.0, f64::max);
        if self.spacing - max_tau < 2.0 {
            return Err(Error::HypothesisViolated("cubes closer than 2".into()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if l.tau > l.t_max.to_f64() {
                return Err(Error::HypothesisViolated(format!("level {i}: tau above t_j")));
            }
            let vol = l.count as f64 * l.tau.powi(d);
            if (vol - l.measure).abs() > 1e-12 * l.measure {
                return Err(Error::HypothesisViolated(format!("level {i}: measure not preserved")));
            }
            if l.value * phi.eval(l.tau) > 1.0 + 1e-9 {
                return Err(Error::HypothesisViolated(format!("level {i}: a_j phi(tau_j) > 1")));
            }
        }
        Ok(())
    }
}

/// Splits `Σ a_j χ_{A_j}` (with `Σ a_j^p |A_j| = 1`) into far-apart small cubes
/// so that the result has the same rearrangement and Morrey norm at most 1.
pub fn spread_simple_function(
    levels: &[(f64, f64)],
    phi: &PhiSpec,
    p: f64,
) -> Result<(SimpleFunction, SpreadPlan)> {
    require_gp(phi, p)?;
    let asym = phi_asymptotics(phi, p)?;
    if !asym.lim0_phi.is_zero() {
        return Err(Error::HypothesisViolated("phi does not vanish at 0".into()));
    }
    if levels.is_empty() {
        return Err(Error::NotNormalized(0.0));
    }
    for (i, &(a, m)) in levels.iter().enumerate() {
        if !(a > 0.0 && a.is_finite() && m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidFunction(format!("level {i} is degenerate")));
        }
        if i > 0 && levels[i - 1].0 <= a {
            return Err(Error::InvalidFunction("values must decrease strictly".into()));
        }
    }
    let total: f64 = levels.iter().map(|&(a, m)| a.powf(p) * m).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let d = phi.dim();
    let mut plan_levels = Vec::with_capacity(levels.len());
    let mut next = 1u64;
    let mut volumes = Vec::with_capacity(levels.len());
    for &(a, measure) in levels {
        let t_max = phi
            .sup_level(1.0 / a)
            .ok_or_else(|| Error::HypothesisViolated("a_j phi(t) > 1 for all t".into()))?;
        let count = match t_max {
            ExtReal::Inf => 2,
            ExtReal::Finite(t) => {
                let td = t.powi(d as i32);
                if td >= measure {
                    2
                } else {
                    let r = measure / td;
                    if r > MAX_PIECES as f64 {
                        return Err(Error::BudgetExceeded(format!("{r:.3e} cubes for one level")));
                    }
                    let mut m = r.ceil() as u64 + 1;
                    while m > 2 && (m - 2) as f64 * td >= measure {
                        m -= 1;
                    }
                    while ((m - 1) as f64) * td < measure {
                        m += 1;
                    }
                    m
                }
            }
        };
        let vol = rational_from_f64(measure)? / BigRational::from_integer(BigInt::from(count));
        let probe = GeneralCube::with_volume(vec![0.0; d], vol.clone());
        plan_levels.push(SpreadLevel { value: a, measure, t_max, count, tau: probe.side, first: next });
        volumes.push(vol);
        next += count;
        if next - 1 > MAX_PIECES {
            return Err(Error::BudgetExceeded(format!("more than {MAX_PIECES} cubes")));
        }
    }
    let max_measure = levels.iter().map(|l| l.1).fold(0.0, f64::max);
    let max_tau = plan_levels.iter().map(|l| l.tau).fold(0.0, f64::max);
    let spacing = (2.0 + max_measure.max(max_tau)).ceil() + 1.0;
    let plan = SpreadPlan { levels: plan_levels, spacing, total: next - 1 };
    let mut parts = Vec::with_capacity(plan.total as usize);
    for (l, vol) in plan.levels.iter().zip(volumes) {
        for k in l.first..l.first + l.count {
            parts.push((l.value, GeneralCube::with_volume(plan.center(k, d), vol.clone())));
        }
    }
    let f = SimpleFunction::general(d, parts)?;
    Ok((f, plan))
}

/// Placement of translated copies in a flat family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapRule {
    /// Copies at integers `m_k` on the first axis with
    /// `m_k = 2 max_{1 ≤ i < k} (m_{k-i} + n_{i+1} + 1)`, `m_1 = 0`.
    Recursion,
    /// Copies at the first points of the lattice `2^g {0, …, 2^k - 1}^d`.
    Lattice,
}

/// Smallest `n > prev` with `ln φ(2^n) - n d ln2/p ≤ bound`, searched over exponents.
fn min_exponent(phi: &PhiSpec, p: f64, prev: i64, bound: f64) -> Result<i64> {
    let d = phi.dim() as f64;
    let ok = |n: i64| phi.ln_eval_pow2(n) - n as f64 * d * LN2 / p <= bound + 1e-12;
    let mut lo = prev;
    let mut step = 1i64;
    let mut hi = prev + 1;
    while !ok(hi) {
        lo = hi;
        step *= 2;
        hi = prev + step;
        if step > 1 << 24 {
            return Err(Error::BudgetExceeded("copy spacing exponent too large".into()));
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `n_1 = 1` and `n_k` the least integer above `n_{k-1}` with `n_k^{-d/p} φ(n_k) ≤ k^{-1/p}`.
fn n_sequence(phi: &PhiSpec, p: f64, count: usize) -> Result<Vec<u64>> {
    let d = phi.dim() as f64;
    let mut out = vec![1u64];
    for k in 2..=count {
        let bound = -(k as f64).ln() / p;
        let ok = |n: u64| {
            let t = n as f64;
            phi.eval(t).ln() - d / p * t.ln() <= bound + 1e-12
        };
        let prev = *out.last().unwrap();
        let (mut lo, mut hi) = (prev, prev + 1);
        while !ok(hi) {
            lo = hi;
            hi = hi
                .checked_mul(2)
                .filter(|&h| h < 1 << 52)
                .ok_or_else(|| Error::BudgetExceeded("copy spacing beyond 2^52".into()))?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(hi);
    }
    Ok(out)
}

/// Gap recursion positions `m_1, …, m_count`.
pub fn gap_positions(phi: &PhiSpec, p: f64, count: usize) -> Result<Vec<BigInt>> {
    let n = n_sequence(phi, p, count)?;
    let mut m: Vec<BigInt> = vec![BigInt::from(0)];
    for k in 2..=count {
        let best = (1..k).map(|i| &m[k - i - 1] + BigInt::from(n[i]) + 1).max().unwrap();
        m.push(best * 2);
    }
    Ok(m)
}

/// Minimal `g` such that `2^{dk}` copies on the lattice `2^g Z^d` keep norm 1:
/// `φ(2^{g+k}) 2^{-(g+k)d/p} ≤ 2^{-kd/p}`.
pub fn lattice_gap(phi: &PhiSpec, p: f64, k: u32) -> Result<u32> {
    let d = phi.dim() as f64;
    if k == 0 {
        return Ok(0);
    }
    let bound = -(k as f64) * d * LN2 / p;
    let n = min_exponent(phi, p, k as i64 - 1, bound)?;
    Ok((n - k as i64).max(0) as u32)
}

/// `φ(2^{-j})^{-1} χ` on level-`j` cubes placed at `2^{dk}` lattice points of spacing `2^g`,
/// with the Morrey norm computed from the number of copies per dyadic cube.
pub fn lattice_flat_norm(phi: &PhiSpec, p: f64, j: u32, k: u32, g: u32) -> Result<f64> {
    require_gp(phi, p)?;
    let d = phi.dim() as f64;
    let ln_v = -phi.ln_eval_pow2(-(j as i64));
    let mut best = f64::NEG_INFINITY;
    let lowest = -((g + k) as i64);
    let mut nu = j as i64;
    while nu >= lowest {
        let coarse = (-nu - g as i64).max(0).min(k as i64);
        let ln_count = coarse as f64 * d * LN2;
        let ln_mass = ln_count + p * ln_v - j as f64 * d * LN2;
        let term = phi.ln_eval_pow2(-nu) + (nu as f64 * d * LN2 + ln_mass) / p;
        best = best.max(term);
        nu -= 1;
    }
    Ok(best.exp())
}

/// `Σ_k φ(2^{-j})^{-1} χ_{Q_{j,0} + x_k}` with `copies` translates placed by `gaps`.
pub fn build_flat_family(
    phi: &PhiSpec,
    p: f64,
    j: u32,
    copies: usize,
    gaps: GapRule,
) -> Result<SimpleFunction> {
    require_gp(phi, p)?;
    if copies == 0 {
        return Err(Error::InvalidFunction("at least one copy required".into()));
    }
    if copies as u64 > MAX_PIECES {
        return Err(Error::BudgetExceeded(format!("{copies} copies")));
    }
    let asym = phi_asymptotics(phi, p)?;
    if copies > 1 && !asym.lim_inf_scaled.is_zero() {
        return Err(Error::HypothesisViolated("phi(t) t^{-d/p} does not vanish at infinity".into()));
    }
    let d = phi.dim();
    let value = 1.0 / phi.eval((-(j as f64)).exp2());
    let scale = |x: BigInt| x << j as usize;
    let indices: Vec<Vec<BigInt>> = match gaps {
        GapRule::Recursion => gap_positions(phi, p, copies)?
            .into_iter()
            .map(|m| {
                let mut idx = vec![BigInt::from(0); d];
                idx[0] = scale(m);
                idx
            })
            .collect(),
        GapRule::Lattice => {
            let mut k = 0u32;
            while (1u128 << (d as u32 * k)) < copies as u128 {
                k += 1;
            }
            let g = lattice_gap(phi, p, k)?;
            let side = 1u64 << k;
            (0..copies as u64)
                .map(|mut n| {
                    (0..d)
                        .map(|_| {
                            let c = n % side;
                            n /= side;
                            scale(BigInt::from(c) << g as usize)
                        })
                        .collect()
                })
                .collect()
        }
    };
    let parts = indices.into_iter().map(|idx| (value, DyadicCube::new(j as i32, idx))).collect();
    SimpleFunction::dyadic(d, parts)
}

fn check_level(j: u32) -> Result<()> {
    if j >= MAX_LEVEL {
        return Err(Error::MalformedIndex(format!("level {j} is not below {MAX_LEVEL}")));
    }
    Ok(())
}

/// Coefficients `λ_j = v_j 2^{-js} φ(2^{-j})^{-1}` on nested cubes, repeated at
/// offsets `(2^{n_ℓ}, 0, …)`, `ℓ = 1..=copies`, for `j = 0..=j_max`.
///
/// The array has quasi-norm at most 1 while `Σ_j λ_j` is unbounded in `j_max`.
pub fn build_infinite_witness(
    s: f64,
    p: f64,
    q: ExtReal,
    phi: &PhiSpec,
    j_max: u32,
    copies: usize,
) -> Result<CoeffArray> {
    require_gp(phi, p)?;
    check_level(j_max)?;
    let asym = phi_asymptotics(phi, p)?;
    if !asym.lim_inf_scaled.is_zero() {
        return Err(Error::HypothesisViolated("phi(t) t^{-d/p} does not vanish at infinity".into()));
    }
    let seq = SeqAsym::from_phi(phi, -s, -1.0, "2^{-js} phi(2^{-j})^{-1}");
    if lq_membership(&seq, conjugate(q))?.is_in() {
        return Err(Error::HypothesisViolated("2^{-js} phi(2^{-j})^{-1} lies in l_{q'}".into()));
    }
    if copies == 0 || copies as u64 * (j_max as u64 + 1) > MAX_PIECES {
        return Err(Error::BudgetExceeded(format!("{copies} copies")));
    }
    let ln_a: Vec<f64> = (0..=j_max).map(|j| -(j as f64) * s * LN2 - phi.ln_eval_pow2(-(j as i64))).collect();
    let ln_v: Vec<f64> = match q {
        ExtReal::Inf => vec![0.0; ln_a.len()],
        ExtReal::Finite(qq) if qq <= 1.0 => {
            let top = (0..ln_a.len()).max_by(|&a, &b| ln_a[a].total_cmp(&ln_a[b])).unwrap();
            (0..ln_a.len()).map(|j| if j == top { 0.0 } else { f64::NEG_INFINITY }).collect()
        }
        ExtReal::Finite(qq) => {
            let qc = conjugate(q).to_f64();
            let raw: Vec<f64> = ln_a.iter().map(|a| (qc - 1.0) * a).collect();
            let norm = raw.iter().fold(f64::NEG_INFINITY, |acc, &x| crate::morrey::log_add(acc, qq * x)) / qq;
            raw.iter().map(|x| x - norm).collect()
        }
    };
    let d = phi.dim();
    let mut out = CoeffArray::new(s, p, q, d)?;
    let mut n_prev = -1i64;
    for l in 1..=copies {
        let n = if l == 1 { 0 } else { min_exponent(phi, p, n_prev, -(l as f64).ln() / p)? };
        n_prev = n;
        for j in 0..=j_max {
            let ln_val = ln_v[j as usize] + ln_a[j as usize];
            if ln_val == f64::NEG_INFINITY {
                continue;
            }
            let mut idx = vec![BigInt::from(0); d];
            idx[0] = BigInt::one() << (n as usize + j as usize);
            out.insert(j, idx, ln_val.exp())?;
        }
    }
    Ok(out)
}

/// `k_j = ⌊2^{dj} φ(2^{-j})^p⌋`.
pub fn case_count(phi: &PhiSpec, p: f64, j: u32) -> Result<u64> {
    let d = phi.dim() as f64;
    let x = (j as f64 * d * LN2 + p * phi.ln_eval_pow2(-(j as i64))).exp();
    if x > MAX_PIECES as f64 {
        return Err(Error::BudgetExceeded(format!("k_j = {x:.3e}")));
    }
    let r = x.round();
    Ok(if (x - r).abs() <= 1e-9 * r.max(1.0) { r as u64 } else { x.floor() as u64 })
}

fn case_family(phi: &PhiSpec, s: f64, p: f64, q: ExtReal, j: u32) -> Result<CoeffArray> {
    check_level(j)?;
    let d = phi.dim();
    let k = case_count(phi, p, j)?;
    let value = (-(j as f64) * s * LN2 - phi.ln_eval_pow2(-(j as i64))).exp();
    let mut out = CoeffArray::new(s, p, q, d)?;
    for i in 1..=k {
        let mut idx = vec![BigInt::from(0); d];
        idx[0] = BigInt::one() << (2 * i as usize);
        out.insert(j, idx, value)?;
    }
    Ok(out)
}

/// `k_j` coefficients `φ(2^{-j})^{-1}` at `(4^k, 0, …)` on level `j`, smoothness 0.
pub fn build_case3_family(phi: &PhiSpec, p: f64, q: ExtReal, j: u32) -> Result<CoeffArray> {
    require_gp(phi, p)?;
    if !phi_asymptotics(phi, p)?.lim0_phi.is_zero() {
        return Err(Error::HypothesisViolated("phi does not vanish at 0".into()));
    }
    case_family(phi, 0.0, p, q, j)
}

/// `k_j` coefficients `2^{-js} φ(2^{-j})^{-1}` at `(4^k, 0, …)` on level `j`.
pub fn build_case4_family(phi: &PhiSpec, s: f64, p: f64, q: ExtReal, j: u32) -> Result<CoeffArray> {
    require_gp(phi, p)?;
    let a = phi_asymptotics(phi, p)?;
    if !a.lim0_phi.is_zero() || a.lim_inf_scaled.is_zero() || !a.lim0_scaled.is_inf() {
        return Err(Error::HypothesisViolated(
            "needs phi -> 0 at 0, phi t^{-d/p} -> inf at 0 and not -> 0 at inf".into(),
        ));
    }
    case_family(phi, s, p, q, j)
}
