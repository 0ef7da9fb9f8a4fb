//! Numerical growth-envelope lower bounds for `M_{φ,p}` and the envelope-index functional.

use std::fmt;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classifier::{classify_morrey_envelope, EnvelopeClass, EnvelopeKind};
use crate::constructions::{
    build_flat_family, lattice_flat_norm, lattice_gap, spread_simple_function, GapRule,
};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::morrey::{log_add, morrey_lower_bound, morrey_norm_dyadic};
use crate::phi::{phi_asymptotics, require_gp, PhiSpec};
use crate::rearrangement::{ln_ratio, StepRearrangement};

const LN2: f64 = std::f64::consts::LN_2;

/// Steps per octave of the spread grid.
const SPREAD_STEPS_PER_OCTAVE: f64 = 8.0;
/// The spread grid reaches `SPREAD_REACH · max t`.
const SPREAD_REACH: f64 = 1e4;
const LATTICE_MAX_K: u32 = 60;

/// A unit-ball candidate `g` with `g*(t) = height / norm` for `t < width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyMember {
    /// Spread-out copy of `s^{-1/p} χ_A`, `|A| = s`; `norm` is the certified bound 1.
    Spread { s: f64, cubes: u64, norm: f64 },
    /// `φ(2^{-j})^{-1} χ_{Q_{j,0}}` with its exact dyadic norm.
    Flat { j: u32, norm: f64 },
    /// `2^{dk}` copies of the flat function on the lattice `2^g Z^d`, exact norm.
    Lattice { j: u32, k: u32, g: u32, norm: f64 },
}

impl fmt::Display for FamilyMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyMember::Spread { s, .. } => write!(f, "spread(s={s:e})"),
            FamilyMember::Flat { j, .. } => write!(f, "flat(j={j})"),
            FamilyMember::Lattice { j, k, g, .. } => write!(f, "lattice(j={j},k={k},g={g})"),
        }
    }
}

impl FamilyMember {
    fn norm(&self) -> f64 {
        match self {
            FamilyMember::Spread { norm, .. }
            | FamilyMember::Flat { norm, .. }
            | FamilyMember::Lattice { norm, .. } => *norm,
        }
    }

    fn ln_height(&self, phi: &PhiSpec, p: f64) -> f64 {
        match self {
            FamilyMember::Spread { s, .. } => -s.ln() / p,
            FamilyMember::Flat { j, .. } | FamilyMember::Lattice { j, .. } => -phi.ln_eval_pow2(-(*j as i64)),
        }
    }

    fn ln_width(&self, d: usize) -> f64 {
        let d = d as f64;
        match self {
            FamilyMember::Spread { s, .. } => s.ln(),
            FamilyMember::Flat { j, .. } => -(*j as f64) * d * LN2,
            FamilyMember::Lattice { j, k, .. } => (*k as f64 - *j as f64) * d * LN2,
        }
    }

    /// `g*(t) / ‖g‖`.
    pub fn value_at(&self, t: f64, phi: &PhiSpec, p: f64) -> f64 {
        if t.ln() < self.ln_width(phi.dim()) {
            (self.ln_height(phi, p)).exp() / self.norm()
        } else {
            0.0
        }
    }

    /// Rebuilds the member and recomputes its norm; spread members also get a
    /// numeric lower bound on their Morrey norm, which must not exceed 1.
    pub fn recertify(&self, phi: &PhiSpec, p: f64) -> Result<f64> {
        match *self {
            FamilyMember::Spread { s, .. } => {
                let (g, plan) = spread_simple_function(&[(s.powf(-1.0 / p), s)], phi, p)?;
                plan.verify(phi)?;
                let lb = morrey_lower_bound(&g, phi, p)?;
                if lb > 1.0 + 1e-9 {
                    return Err(Error::HypothesisViolated(format!("{self}: norm at least {lb}")));
                }
                Ok(1.0)
            }
            FamilyMember::Flat { j, .. } => {
                morrey_norm_dyadic(&build_flat_family(phi, p, j, 1, GapRule::Recursion)?, phi, p)
            }
            FamilyMember::Lattice { j, k, g, .. } => lattice_flat_norm(phi, p, j, k, g),
        }
    }
}

/// Per-grid-point lower bounds for `E_G M_{φ,p}` together with the classified prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeEstimate {
    pub t_grid: Vec<f64>,
    pub lower_bounds: Vec<f64>,
    pub predicted: Vec<ExtReal>,
    pub family_log: Vec<Option<FamilyMember>>,
    pub class: EnvelopeClass,
    /// `max lower/predicted` over points with a finite prediction.
    pub constant: Option<f64>,
}

impl EnvelopeEstimate {
    pub fn predicted_kind(&self) -> &'static str {
        match self.class.kind {
            EnvelopeKind::Bounded => "Bounded",
            EnvelopeKind::LpLike { .. } => "LpLike",
            EnvelopeKind::Infinite => "Infinite",
            _ => "Unknown",
        }
    }
}

fn spread_grid(t_min: f64, t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 1;
    loop {
        let s = t_min * (i as f64 / SPREAD_STEPS_PER_OCTAVE).exp2();
        if s > SPREAD_REACH * t_max {
            break;
        }
        out.push(s);
        i += 1;
    }
    out
}

/// Best `g*(t)` over the spread, flat and lattice families at every grid point.
/// `budget` is the largest level `j` used by the flat and lattice families.
pub fn estimate_morrey_envelope(
    phi: &PhiSpec,
    p: f64,
    t_grid: &[f64],
    budget: u32,
) -> Result<EnvelopeEstimate> {
    require_gp(phi, p)?;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::NonPositiveArgument(
            t_grid.iter().copied().find(|t| !(*t > 0.0)).unwrap_or(f64::NAN),
        ));
    }
    if budget > 62 {
        return Err(Error::BudgetExceeded(format!("budget {budget} above 62")));
    }
    let class = classify_morrey_envelope(phi, p)?;
    let asym = phi_asymptotics(phi, p)?;
    let d = phi.dim();
    let t_min = t_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);

    let mut members = Vec::new();
    if asym.lim0_phi.is_zero() {
        for s in spread_grid(t_min, t_max) {
            let (_, plan) = spread_simple_function(&[(s.powf(-1.0 / p), s)], phi, p)?;
            plan.verify(phi)?;
            members.push(FamilyMember::Spread { s, cubes: plan.total, norm: 1.0 });
        }
    }
    for j in 0..=budget {
        let f = build_flat_family(phi, p, j, 1, GapRule::Recursion)?;
        members.push(FamilyMember::Flat { j, norm: morrey_norm_dyadic(&f, phi, p)? });
    }
    if asym.lim_inf_scaled.is_zero() {
        let mut ks: Vec<i64> = t_grid.iter().map(|t| (t.log2() / d as f64).floor() as i64 + 1).collect();
        ks.sort_unstable();
        ks.dedup();
        for j in 0..=budget {
            for &shift in &ks {
                let k = (j as i64 + shift).max(1);
                if k > LATTICE_MAX_K as i64 || d as i64 * k > 62 {
                    continue;
                }
                let k = k as u32;
                let g = lattice_gap(phi, p, k)?;
                let norm = lattice_flat_norm(phi, p, j, k, g)?;
                members.push(FamilyMember::Lattice { j, k, g, norm });
            }
        }
    }

    let mut lower_bounds = Vec::with_capacity(t_grid.len());
    let mut family_log = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let best = members
            .iter()
            .map(|m| (m.value_at(t, phi, p), m))
            .filter(|(v, _)| *v > 0.0)
            .max_by(|a, b| a.0.total_cmp(&b.0));
        lower_bounds.push(best.map_or(0.0, |b| b.0));
        family_log.push(best.map(|b| b.1.clone()));
    }
    let predicted: Vec<ExtReal> = t_grid
        .iter()
        .map(|&t| match class.kind {
            EnvelopeKind::Bounded => ExtReal::Finite(asym.lim0_phi.to_f64().recip()),
            EnvelopeKind::LpLike { exponent } => ExtReal::Finite(t.powf(-exponent)),
            _ => ExtReal::Inf,
        })
        .collect();
    let constant = predicted
        .iter()
        .zip(&lower_bounds)
        .filter_map(|(pr, lb)| match pr {
            ExtReal::Finite(x) => Some(lb / x),
            ExtReal::Inf => None,
        })
        .reduce(f64::max);
    Ok(EnvelopeEstimate { t_grid: t_grid.to_vec(), lower_bounds, predicted, family_log, class, constant })
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `t,predicted_kind,predicted_value,lower_bound,family` rows.
pub fn write_csv<W: Write>(est: &EnvelopeEstimate, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "predicted_kind", "predicted_value", "lower_bound", "family"]).map_err(io)?;
    for i in 0..est.t_grid.len() {
        let pred = match est.predicted[i] {
            ExtReal::Inf => "inf".to_string(),
            ExtReal::Finite(x) => fmt_num(x),
        };
        let fam = est.family_log[i].as_ref().map_or("none".to_string(), |m| m.to_string());
        w.write_record([
            fmt_num(est.t_grid[i]),
            est.predicted_kind().to_string(),
            pred,
            fmt_num(est.lower_bounds[i]),
            fam,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn export_csv(est: &EnvelopeEstimate, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(est, std::io::BufWriter::new(file)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_v(v: ExtReal) -> Result<()> {
    match v {
        ExtReal::Finite(x) if !(x > 0.0) => Err(Error::InvalidV(x.to_string())),
        _ => Ok(()),
    }
}

fn check_index_args(v: ExtReal, p: f64, eps: f64) -> Result<()> {
    check_v(v)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidP(p));
    }
    if !(eps > 0.0) {
        return Err(Error::NonPositiveArgument(eps));
    }
    Ok(())
}

/// Step of `f*` given by `ln` of its height and its exact width.
#[derive(Debug, Clone, PartialEq)]
pub struct LogStep {
    pub ln_height: f64,
    pub width: BigRational,
}

/// `((1/p) ∫_0^ε (t^{1/p} f*(t))^v dt/t)^{1/v}`, or `sup_{t<ε} t^{1/p} f*(t)` for `v = ∞`.
pub fn envelope_index_functional(fstar: &StepRearrangement, v: ExtReal, p: f64, eps: f64) -> Result<f64> {
    let steps: Vec<LogStep> =
        fstar.steps().iter().map(|s| LogStep { ln_height: s.height.ln(), width: s.width.clone() }).collect();
    envelope_index_functional_log(&steps, v, p, eps)
}

/// Log-domain version of [`envelope_index_functional`] for very tall or thin steps.
pub fn envelope_index_functional_log(steps: &[LogStep], v: ExtReal, p: f64, eps: f64) -> Result<f64> {
    check_index_args(v, p, eps)?;
    for (i, s) in steps.iter().enumerate() {
        if !s.width.is_positive() || s.ln_height.is_nan() || s.ln_height == f64::INFINITY {
            return Err(Error::InvalidFunction(format!("step {i} is degenerate")));
        }
        if i > 0 && steps[i - 1].ln_height < s.ln_height {
            return Err(Error::InvalidFunction("heights must not increase".into()));
        }
    }
    let ln_eps = eps.ln();
    let mut acc = BigRational::zero();
    let mut ln_lo = f64::NEG_INFINITY;
    let mut total = f64::NEG_INFINITY;
    for s in steps {
        if ln_lo >= ln_eps {
            break;
        }
        acc += &s.width;
        let ln_hi = ln_ratio(&acc).min(ln_eps);
        let term = match v {
            ExtReal::Inf => s.ln_height + ln_hi / p,
            ExtReal::Finite(v) => {
                // c^v (1/v) (T_hi^{v/p} - T_lo^{v/p})
                let a = v / p;
                let diff = a * ln_hi + (-(a * (ln_lo - ln_hi)).exp()).ln_1p();
                v * s.ln_height - v.ln() + diff
            }
        };
        total = match v {
            ExtReal::Inf => total.max(term),
            ExtReal::Finite(_) => log_add(total, term),
        };
        ln_lo = ln_hi;
    }
    Ok(match v {
        ExtReal::Inf => total.exp(),
        ExtReal::Finite(v) => (total / v).exp(),
    })
}

/// Rearranged staircase `Σ_j b_j 2^{j d/p} ‖b‖_p^{-1} χ_{A_j}`, `|A_j| = 2^{-jd}`,
/// for `j = j0, j0 + 1, …`; zero entries of `b` are skipped.
pub fn staircase_steps(b: &[f64], j0: u32, p: f64, d: usize) -> Result<Vec<LogStep>> {
    if b.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidFunction("coefficients must be finite and nonnegative".into()));
    }
    let ln_norm =
        b.iter().filter(|x| **x > 0.0).fold(f64::NEG_INFINITY, |acc, x| log_add(acc, p * x.ln())) / p;
    if ln_norm == f64::NEG_INFINITY {
        return Err(Error::InvalidFunction("all coefficients vanish".into()));
    }
    let mut raw: Vec<(f64, u64)> = b
        .iter()
        .enumerate()
        .filter(|(_, x)| **x > 0.0)
        .map(|(i, x)| {
            let j = j0 as u64 + i as u64;
            (x.ln() + j as f64 * d as f64 * LN2 / p - ln_norm, j * d as u64)
        })
        .collect();
    raw.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<LogStep> = Vec::with_capacity(raw.len());
    for (h, e) in raw {
        let w = BigRational::new(BigInt::one(), BigInt::one() << e as usize);
        match out.last_mut() {
            Some(last) if last.ln_height == h => last.width += w,
            _ => out.push(LogStep { ln_height: h, width: w }),
        }
    }
    Ok(out)
}
