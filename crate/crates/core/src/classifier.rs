//! Decision procedures for embeddings, regularity and growth-envelope classes.
//!
//! Every verdict is read off exponent pairs `(α, β)` of `t^α (1 + |ln t|)^β`
//! at the two ends of `(0, ∞)`; nothing is decided by sampling alone.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::ext::{sign_tol, ExtReal};
use crate::phi::{phi_asymptotics, require_gp, PhiSpec};
use crate::seq_decide::{conjugate, lq_membership, q_star, SeqAsym, DEFAULT_SAMPLES};

const LN2: f64 = std::f64::consts::LN_2;

/// Parameters `(s, p, q, φ)` of a Besov-Morrey space; `d` is the dimension of `φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
    pub q: ExtReal,
    pub phi: PhiSpec,
}

impl SpaceParams {
    pub fn new(s: f64, p: f64, q: ExtReal, phi: PhiSpec) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::HypothesisViolated(format!("smoothness {s} is not finite")));
        }
        match q {
            ExtReal::Finite(x) if !(x > 0.0) => return Err(Error::InvalidQ(x.to_string())),
            _ => {}
        }
        require_gp(&phi, p)?;
        Ok(SpaceParams { s, p, q, phi })
    }

    pub fn d(&self) -> usize {
        self.phi.dim()
    }

    /// `d (1/p - 1)_+`.
    pub fn sigma_p(&self) -> f64 {
        self.d() as f64 * (1.0 / self.p - 1.0).max(0.0)
    }

    fn summary(&self) -> serde_json::Value {
        json!({ "s": self.s, "p": self.p, "q": self.q, "d": self.d() })
    }
}

/// Growth shape near `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Form {
    Constant,
    /// `t^{-exponent}`.
    Power {
        exponent: f64,
    },
    /// `|log t|^{exponent}`.
    Log {
        exponent: f64,
    },
    /// `t^{-1/p} φ^{-1}(t^{1/p})^s`.
    PhiInverse {
        s: f64,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EnvelopeKind {
    Bounded,
    /// `t^{-exponent}` with `exponent = 1/p`.
    LpLike {
        exponent: f64,
    },
    Infinite,
    /// `t^{-exponent}` with `exponent = 1/p - s/d`.
    BesovSubcritical {
        exponent: f64,
    },
    /// `|log t|^{log_exponent}` with `log_exponent = 1/q'`.
    BesovCritical {
        log_exponent: f64,
    },
    /// `t^{-1/p} φ^{-1}(t^{1/p})^s`; `exponent` is the resulting power `1/p - s/(pα)`.
    SharpPhiInverse {
        s: f64,
        p: f64,
        exponent: f64,
    },
    /// Between `|log t|^{lo}` and `|log t|^{hi}`.
    LogWindow {
        lo: f64,
        hi: f64,
    },
    BoundsOnly {
        upper: Form,
        lower: Form,
    },
    Unknown {
        reason: String,
    },
}

/// Growth key `(power, log)` ordered lexicographically; `None` stands for `∞`.
type Growth = Option<(f64, f64)>;

fn form_growth(f: &Form, alpha0: Option<f64>) -> Option<Growth> {
    Some(Some(match f {
        Form::Constant => (0.0, 0.0),
        Form::Power { exponent } => (*exponent, 0.0),
        Form::Log { exponent } => (0.0, *exponent),
        Form::PhiInverse { s, p } => (1.0 / p - s / (p * alpha0?), 0.0),
    }))
}

fn growth_le(a: Growth, b: Growth) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x.0 < y.0 - 1e-12 || ((x.0 - y.0).abs() <= 1e-12 && x.1 <= y.1 + 1e-12),
    }
}

impl EnvelopeKind {
    /// `[lower, upper]` growth keys; `None` when nothing is known.
    fn growth_range(&self, alpha0: Option<f64>) -> Option<(Growth, Growth)> {
        let pt = |g: (f64, f64)| Some((Some(g), Some(g)));
        match self {
            EnvelopeKind::Bounded => pt((0.0, 0.0)),
            EnvelopeKind::LpLike { exponent } | EnvelopeKind::BesovSubcritical { exponent } => {
                pt((*exponent, 0.0))
            }
            EnvelopeKind::SharpPhiInverse { exponent, .. } => pt((*exponent, 0.0)),
            EnvelopeKind::BesovCritical { log_exponent } => pt((0.0, *log_exponent)),
            EnvelopeKind::Infinite => Some((None, None)),
            EnvelopeKind::LogWindow { lo, hi } => Some((Some((0.0, *lo)), Some((0.0, *hi)))),
            EnvelopeKind::BoundsOnly { upper, lower } => {
                Some((form_growth(lower, alpha0)?, form_growth(upper, alpha0)?))
            }
            EnvelopeKind::Unknown { .. } => None,
        }
    }
}

/// Classified growth envelope together with its parameters and supporting results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeClass {
    #[serde(flatten)]
    pub kind: EnvelopeKind,
    #[serde(rename = "index_uG")]
    pub index_ug: Option<f64>,
    pub params: serde_json::Value,
    pub citations: Vec<String>,
    #[serde(skip)]
    alpha0: Option<f64>,
}

impl EnvelopeClass {
    fn new(kind: EnvelopeKind, params: serde_json::Value, citations: &[&str]) -> Self {
        EnvelopeClass {
            kind,
            index_ug: None,
            params,
            citations: citations.iter().map(|c| c.to_string()).collect(),
            alpha0: None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.kind == EnvelopeKind::Bounded
    }

    /// Whether `E_a ≤ C E_b` is compatible with the two classes (necessary for `a ↪ b`).
    /// `None` when either side is unknown.
    pub fn compatible_with_embedding(&self, target: &EnvelopeClass) -> Option<bool> {
        let (a_lo, _) = self.kind.growth_range(self.alpha0)?;
        let (_, b_hi) = target.kind.growth_range(target.alpha0)?;
        Some(growth_le(a_lo, b_hi))
    }
}

fn vanishes_at_zero(e: (f64, f64)) -> bool {
    sign_tol(e.0) > 0 || (sign_tol(e.0) == 0 && sign_tol(e.1) < 0)
}

fn vanishes_at_infinity(e: (f64, f64)) -> bool {
    sign_tol(e.0) < 0 || (sign_tol(e.0) == 0 && sign_tol(e.1) < 0)
}

fn bounded_at_infinity(e: (f64, f64)) -> bool {
    sign_tol(e.0) < 0 || (sign_tol(e.0) == 0 && sign_tol(e.1) <= 0)
}

/// `sup_t φ(t) min(t^{-d/p}, 1) < ∞`.
pub fn morrey_nontrivial(phi: &PhiSpec, p: f64) -> Result<bool> {
    let a = phi_asymptotics(phi, p)?;
    Ok(a.lim0_phi.is_finite() && a.lim_inf_scaled.is_finite())
}

/// `M_{φ₁,p₁} ↪ M_{φ₂,p₂}` for `p₂ ≤ p₁`: `inf_t φ₁(t)/φ₂(t) > 0`.
pub fn morrey_embedding(phi1: &PhiSpec, p1: f64, phi2: &PhiSpec, p2: f64) -> Result<bool> {
    require_gp(phi1, p1)?;
    require_gp(phi2, p2)?;
    if phi1.dim() != phi2.dim() {
        return Err(Error::DimensionMismatch(phi1.dim(), phi2.dim()));
    }
    if p2 > p1 {
        return Err(Error::OutOfScope(format!("p2 = {p2} exceeds p1 = {p1}")));
    }
    let (z1, z2) = (phi1.at_zero(), phi2.at_zero());
    let (i1, i2) = (phi1.at_infinity(), phi2.at_infinity());
    let at0 = (z1.alpha - z2.alpha, z1.beta - z2.beta);
    let at_inf = (i1.alpha - i2.alpha, i1.beta - i2.beta);
    Ok(!vanishes_at_zero(at0) && !vanishes_at_infinity(at_inf))
}

/// `(M_{φ,p} ↪ L_∞, L_∞ ↪ M_{φ,p})`.
pub fn morrey_linfty(phi: &PhiSpec, p: f64) -> Result<(bool, bool)> {
    require_gp(phi, p)?;
    let a = phi_asymptotics(phi, p)?;
    Ok((!a.lim0_phi.is_zero(), a.lim_inf_phi.is_finite()))
}

/// Growth envelope of `M_{φ,p}` from `lim_{t→0} φ(t)` and `lim_{t→∞} φ(t) t^{-d/p}`.
pub fn classify_morrey_envelope(phi: &PhiSpec, p: f64) -> Result<EnvelopeClass> {
    require_gp(phi, p)?;
    if !morrey_nontrivial(phi, p)? {
        return Err(Error::HypothesisViolated("the space is trivial".into()));
    }
    let a = phi_asymptotics(phi, p)?;
    let params = json!({ "p": p, "d": phi.dim() });
    Ok(if !a.lim0_phi.is_zero() {
        EnvelopeClass::new(EnvelopeKind::Bounded, params, &["morrey-bounded"])
    } else if !a.lim_inf_scaled.is_zero() {
        let mut c = EnvelopeClass::new(
            EnvelopeKind::LpLike { exponent: 1.0 / p },
            params,
            &["morrey-envelope-lp", "morrey-envelope-index"],
        );
        c.index_ug = Some(p);
        c
    } else {
        EnvelopeClass::new(EnvelopeKind::Infinite, params, &["morrey-envelope-infinite"])
    })
}

/// Outcome of the embedding test between two Besov-Morrey spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingVerdict {
    pub holds: bool,
    pub rho: f64,
    pub cond0: bool,
    pub cond2: bool,
    pub q_star: ExtReal,
    /// `2^{j(s₂-s₁)} α_j φ₁(2^{-j})^{ρ-1}`.
    pub sequence: SeqAsym,
}

/// `N^{s₁}_{φ₁,p₁,q₁} ↪ N^{s₂}_{φ₂,p₂,q₂}`.
pub fn nb_embedding(a: &SpaceParams, b: &SpaceParams) -> Result<EmbeddingVerdict> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch(a.d(), b.d()));
    }
    let rho = (a.p / b.p).min(1.0);
    let (z1, z2) = (a.phi.at_zero(), b.phi.at_zero());
    let (i1, i2) = (a.phi.at_infinity(), b.phi.at_infinity());
    // r(t) = φ₂(t) / φ₁(t)^ρ.
    let r_inf = (i2.alpha - rho * i1.alpha, i2.beta - rho * i1.beta);
    let cond0 = bounded_at_infinity(r_inf);
    let r0 = (z2.alpha - rho * z1.alpha, z2.beta - rho * z1.beta);
    let grows = sign_tol(r0.0) < 0 || (sign_tol(r0.0) == 0 && sign_tol(r0.1) > 0);
    let alpha_class = if grows { r0 } else { (0.0, 0.0) };
    let geo = alpha_class.0 - (b.s - a.s) + (rho - 1.0) * z1.alpha;
    let poly = alpha_class.1 + (rho - 1.0) * z1.beta;
    let ln_r = |nu: i64| b.phi.ln_eval_pow2(-nu) - rho * a.phi.ln_eval_pow2(-nu);
    let mut ln_alpha = (-256..=0).map(ln_r).fold(f64::NEG_INFINITY, f64::max);
    let samples = (0..DEFAULT_SAMPLES as i64)
        .map(|j| {
            ln_alpha = ln_alpha.max(ln_r(j));
            let ln = j as f64 * (b.s - a.s) * LN2 + ln_alpha + (rho - 1.0) * a.phi.ln_eval_pow2(-j);
            ln.exp()
        })
        .collect();
    let sequence = SeqAsym::new(geo, poly, samples, "2^{j(s2-s1)} alpha_j phi1(2^{-j})^{rho-1}");
    let qs = q_star(a.q, b.q);
    let cond2 = lq_membership(&sequence, qs)?.is_in();
    Ok(EmbeddingVerdict { holds: cond0 && cond2, rho, cond0, cond2, q_star: qs, sequence })
}

/// `N^s_{φ,p,q} ↪ L_∞` iff `{2^{-js} φ(2^{-j})^{-1}} ∈ ℓ_{q'}`.
pub fn nb_linfty(sp: &SpaceParams) -> Result<bool> {
    let seq = SeqAsym::from_phi(&sp.phi, -sp.s, -1.0, "2^{-js} phi(2^{-j})^{-1}");
    Ok(lq_membership(&seq, conjugate(sp.q))?.is_in())
}

/// `δ ∈ N^s_{φ,p,q}` iff `{2^{j(s+d)} φ(2^{-j})} ∈ ℓ_q`.
pub fn delta_in_nb(sp: &SpaceParams) -> Result<bool> {
    let seq = SeqAsym::from_phi(&sp.phi, sp.s + sp.d() as f64, 1.0, "2^{j(s+d)} phi(2^{-j})");
    Ok(lq_membership(&seq, sp.q)?.is_in())
}

/// Verdict on `N^s_{φ,p,q} ⊂ L_1^{loc}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum L1Loc {
    Yes,
    No,
    /// The known sufficient condition holds.
    SufficientHolds,
    /// The sufficient condition fails; no necessary condition is available.
    Unknown,
}

fn q_at_most(q: ExtReal, bound: f64) -> bool {
    match q {
        ExtReal::Inf => false,
        ExtReal::Finite(x) => x <= bound * (1.0 + 1e-12),
    }
}

pub fn nb_l1loc(sp: &SpaceParams) -> Result<L1Loc> {
    let a = phi_asymptotics(&sp.phi, sp.p)?;
    let s = sign_tol(sp.s);
    let yes_no = |cap: f64| {
        if s > 0 || (s == 0 && q_at_most(sp.q, cap)) {
            L1Loc::Yes
        } else {
            L1Loc::No
        }
    };
    Ok(if !a.lim0_phi.is_zero() {
        yes_no(2.0)
    } else if sp.p >= 1.0 {
        yes_no(sp.p.min(2.0))
    } else {
        let seq = SeqAsym::from_phi(&sp.phi, -sp.s, sp.p - 1.0, "2^{-js} phi(2^{-j})^{p-1}");
        if lq_membership(&seq, conjugate(sp.q))?.is_in() {
            L1Loc::SufficientHolds
        } else {
            L1Loc::Unknown
        }
    })
}

/// Growth envelope of `N^s_{φ,p,q}`; requires the space to consist of regular distributions.
pub fn classify_nb_envelope(sp: &SpaceParams) -> Result<EnvelopeClass> {
    let params = sp.summary();
    let unknown = |reason: &str, cites: &[&str]| {
        Ok(EnvelopeClass::new(EnvelopeKind::Unknown { reason: reason.into() }, params.clone(), cites))
    };
    // A space inside L_∞ consists of regular distributions.
    if nb_linfty(sp)? {
        return Ok(EnvelopeClass::new(EnvelopeKind::Bounded, params, &["nb-linfty"]));
    }
    match nb_l1loc(sp)? {
        L1Loc::No => return Err(Error::NotRegular),
        L1Loc::Unknown => {
            return unknown("regularity of the space is undecided", &["nb-regularity-sufficient"])
        }
        L1Loc::Yes | L1Loc::SufficientHolds => {}
    }
    let a = phi_asymptotics(&sp.phi, sp.p)?;
    let d = sp.d() as f64;
    let dp = d / sp.p;
    let s_sign = sign_tol(sp.s);
    let qc = conjugate(sp.q);
    let mk = |kind, cites: &[&str]| Ok(EnvelopeClass::new(kind, params.clone(), cites));

    if a.lim_inf_scaled.is_zero() {
        return mk(EnvelopeKind::Infinite, &["nb-envelope-infinite"]);
    }
    if a.lim0_scaled.is_finite() {
        if sign_tol(sp.s - sp.sigma_p()) >= 0 && sign_tol(sp.s - dp) < 0 {
            return mk(
                EnvelopeKind::BesovSubcritical { exponent: 1.0 / sp.p - sp.s / d },
                &["nb-envelope-besov"],
            );
        }
        if sign_tol(sp.s - dp) == 0 && !q_at_most(sp.q, 1.0) {
            return mk(EnvelopeKind::BesovCritical { log_exponent: qc.recip() }, &["nb-envelope-besov"]);
        }
        return unknown("outside the Besov ranges", &["nb-envelope-besov"]);
    }
    if s_sign == 0 {
        if a.lim0_phi.is_zero() {
            if sp.p >= 1.0 && q_at_most(sp.q, sp.p.min(2.0)) {
                return mk(EnvelopeKind::LpLike { exponent: 1.0 / sp.p }, &["nb-envelope-s0-vanishing"]);
            }
            return unknown("needs p >= 1 and q <= min(p, 2)", &["nb-envelope-s0-vanishing"]);
        }
        if !q_at_most(sp.q, 1.0) && q_at_most(sp.q, 2.0) {
            let lo = qc.recip();
            return mk(EnvelopeKind::LogWindow { lo, hi: 2.0 * lo }, &["nb-envelope-s0-positive"]);
        }
        return unknown("needs 1 < q <= 2", &["nb-envelope-s0-positive"]);
    }
    if s_sign < 0 || !a.lim0_phi.is_zero() {
        return unknown("no result for this sign pattern", &["nb-envelope-s-positive"]);
    }

    let z = a.at_zero;
    let alpha = z.alpha;
    let p = sp.p;
    if sign_tol(z.beta) == 0 && sign_tol(alpha) > 0 {
        let lower_s = alpha * (1.0 - p).max(0.0);
        let q_ok = match sp.q {
            ExtReal::Inf => false,
            ExtReal::Finite(q) => 1.0 / q >= 0.5_f64.max((1.0 - sp.s / alpha) / p) * (1.0 - 1e-12),
        };
        if q_ok && sign_tol(sp.s - lower_s) >= 0 && sign_tol(sp.s - alpha) < 0 {
            let mut c = EnvelopeClass::new(
                EnvelopeKind::SharpPhiInverse { s: sp.s, p, exponent: 1.0 / p - sp.s / (p * alpha) },
                params,
                &["nb-envelope-sharp"],
            );
            c.alpha0 = Some(alpha);
            return Ok(c);
        }
    }
    let upper_ok = sign_tol(sp.s - sp.sigma_p()) > 0
        || (p < 1.0 && sign_tol(sp.s - d * (1.0 / p - 1.0)) == 0 && q_at_most(sp.q, 2.0));
    if !upper_ok {
        return unknown("upper estimate hypotheses fail", &["nb-envelope-upper"]);
    }
    let upper = match sign_tol(sp.s - dp) {
        -1 => Form::Power { exponent: 1.0 / p - sp.s / d },
        0 if !q_at_most(sp.q, 1.0) => Form::Log { exponent: qc.recip() },
        _ => return unknown("no upper estimate", &["nb-envelope-upper"]),
    };
    // B^{d/p}_{p,q} ↪ N^s_{φ,p,q} iff {2^{js} φ(2^{-j})} is bounded.
    let weight = SeqAsym::from_phi(&sp.phi, sp.s, 1.0, "2^{js} phi(2^{-j})");
    let critical_embeds = lq_membership(&weight, ExtReal::Inf)?.is_in();
    let (lower, lower_cite) = if !q_at_most(sp.q, 1.0) && critical_embeds && sign_tol(weight.geo) == 0 {
        (Form::Log { exponent: qc.recip() }, "nb-envelope-lower-embedding")
    } else {
        (Form::PhiInverse { s: sp.s, p }, "nb-envelope-lower")
    };
    let mut c = EnvelopeClass::new(
        EnvelopeKind::BoundsOnly { upper, lower },
        params,
        &["nb-envelope-upper", lower_cite],
    );
    if sign_tol(z.beta) == 0 && alpha > 0.0 {
        c.alpha0 = Some(alpha);
    }
    Ok(c)
}
