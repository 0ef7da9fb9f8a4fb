//! Membership of sequences `a_j ≍ 2^{-jσ} j^τ` in `ℓ_q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{sign_tol, ExtReal};
use crate::phi::PhiSpec;

/// Default number of numeric samples attached to a derived sequence.
pub const DEFAULT_SAMPLES: usize = 64;

/// Asymptotic class `a_j ≍ 2^{-j·geo} j^{poly}` plus numeric samples `a_0, a_1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqAsym {
    pub geo: f64,
    pub poly: f64,
    pub samples: Vec<f64>,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    In,
    Out,
}

impl Membership {
    pub fn is_in(self) -> bool {
        self == Membership::In
    }
}

impl SeqAsym {
    pub fn new(geo: f64, poly: f64, samples: Vec<f64>, source: impl Into<String>) -> Self {
        SeqAsym { geo, poly, samples, source: source.into() }
    }

    /// `a_j = 2^{j·two_exp} φ(2^{-j})^{phi_exp}`.
    pub fn from_phi(phi: &PhiSpec, two_exp: f64, phi_exp: f64, source: impl Into<String>) -> Self {
        let z = phi.at_zero();
        let samples = (0..DEFAULT_SAMPLES as i64)
            .map(|j| {
                let ln = j as f64 * two_exp * std::f64::consts::LN_2 + phi_exp * phi.ln_eval_pow2(-j);
                ln.exp()
            })
            .collect();
        SeqAsym::new(z.alpha * phi_exp - two_exp, z.beta * phi_exp, samples, source)
    }

    /// Checks `a_{j+1}/a_j ≈ 2^{-geo}` on the last sample pair within `tol` (relative).
    pub fn consistent(&self, tol: f64) -> bool {
        let n = self.samples.len();
        if n < 2 {
            return true;
        }
        let (a, b) = (self.samples[n - 2], self.samples[n - 1]);
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return false;
        }
        let expected = (-self.geo).exp2() * ((n as f64) / (n as f64 - 1.0)).powf(self.poly);
        ((b / a) / expected - 1.0).abs() <= tol
    }
}

fn check_q(q: ExtReal) -> Result<()> {
    match q {
        ExtReal::Finite(x) if !(x > 0.0) => Err(Error::InvalidQ(x.to_string())),
        _ => Ok(()),
    }
}

/// `{a_j} ∈ ℓ_q` decided from the asymptotic class.
pub fn lq_membership(seq: &SeqAsym, q: ExtReal) -> Result<Membership> {
    check_q(q)?;
    let inside = match sign_tol(seq.geo) {
        1 => true,
        -1 => false,
        _ => match q {
            ExtReal::Inf => sign_tol(seq.poly) <= 0,
            ExtReal::Finite(q) => sign_tol(seq.poly * q + 1.0) < 0,
        },
    };
    Ok(if inside { Membership::In } else { Membership::Out })
}

/// `(Σ_{j ≤ J} a_j^q)^{1/q}`, or `max_{j ≤ J} a_j` for `q = ∞`.
pub fn lq_partial_norm(seq: &SeqAsym, q: ExtReal, j_max: usize) -> Result<f64> {
    check_q(q)?;
    if j_max >= seq.samples.len() {
        return Err(Error::TooFewSamples { have: seq.samples.len(), need: j_max + 1 });
    }
    let xs = seq.samples[..=j_max].iter().map(|a| a.abs());
    Ok(match q {
        ExtReal::Inf => xs.fold(0.0, f64::max),
        ExtReal::Finite(q) => xs.map(|a| a.powf(q)).sum::<f64>().powf(1.0 / q),
    })
}

/// Conjugate index: `1/q' = (1 - 1/q)_+`.
pub fn conjugate(q: ExtReal) -> ExtReal {
    let r = 1.0 - q.recip();
    if r <= 0.0 {
        ExtReal::Inf
    } else {
        ExtReal::Finite(1.0 / r)
    }
}

/// `1/q* = (1/q₂ - 1/q₁)_+`.
pub fn q_star(q1: ExtReal, q2: ExtReal) -> ExtReal {
    let r = q2.recip() - q1.recip();
    if r <= 0.0 {
        ExtReal::Inf
    } else {
        ExtReal::Finite(1.0 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(geo: f64, poly: f64, n: usize) -> SeqAsym {
        let samples = (0..n).map(|j| (-(j as f64) * geo).exp2() * (1.0 + j as f64).powf(poly)).collect();
        SeqAsym::new(geo, poly, samples, "test")
    }

    #[test]
    fn geometric_partial_sum() {
        let s = seq(1.0, 0.0, 64);
        let v = lq_partial_norm(&s, ExtReal::Finite(1.0), 10).unwrap();
        assert!((v - (2.0 - (-10f64).exp2())).abs() < 1e-15);
        assert_eq!(lq_membership(&s, ExtReal::Finite(1.0)).unwrap(), Membership::In);
    }

    #[test]
    fn harmonic_sequence() {
        let s = seq(0.0, -1.0, 1001);
        assert_eq!(lq_membership(&s, ExtReal::Finite(1.0)).unwrap(), Membership::Out);
        assert_eq!(lq_membership(&s, ExtReal::Finite(2.0)).unwrap(), Membership::In);
        let v = lq_partial_norm(&s, ExtReal::Finite(2.0), 1000).unwrap();
        assert!(v * v <= std::f64::consts::PI.powi(2) / 6.0);
    }

    #[test]
    fn tie_is_outside() {
        let s = seq(0.0, -0.5, 8);
        assert_eq!(lq_membership(&s, ExtReal::Finite(2.0)).unwrap(), Membership::Out);
        assert_eq!(lq_membership(&s, ExtReal::Inf).unwrap(), Membership::In);
        let c = seq(0.0, 0.0, 8);
        assert_eq!(lq_membership(&c, ExtReal::Inf).unwrap(), Membership::In);
        assert!(lq_membership(&c, ExtReal::Finite(0.0)).is_err());
        assert!(lq_partial_norm(&c, ExtReal::Finite(1.0), 8).is_err());
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(ExtReal::Finite(2.0)), ExtReal::Finite(2.0));
        assert_eq!(conjugate(ExtReal::Finite(0.5)), ExtReal::Inf);
        assert_eq!(conjugate(ExtReal::Inf), ExtReal::Finite(1.0));
        assert_eq!(q_star(ExtReal::Finite(1.0), ExtReal::Finite(2.0)), ExtReal::Inf);
        assert_eq!(q_star(ExtReal::Finite(2.0), ExtReal::Finite(1.0)), ExtReal::Finite(2.0));
    }

    #[test]
    fn from_phi_is_consistent() {
        let phi = PhiSpec::phi_uv(1, ExtReal::Finite(2.0), ExtReal::Finite(1.0)).unwrap();
        let s = SeqAsym::from_phi(&phi, 0.0, -1.0, "phi^-1");
        assert_eq!(s.geo, -0.5);
        assert!(s.consistent(1e-9));
        let lg = PhiSpec::power_log(1, 0.5, -0.25).unwrap();
        let s = SeqAsym::from_phi(&lg, 0.5, 1.0, "mixed");
        assert!(s.geo.abs() < 1e-15);
        assert!(s.consistent(0.02));
    }

    proptest! {
        #[test]
        fn monotone_in_q(geo in -1.0f64..1.0, poly in -3.0f64..3.0, q1 in 0.1f64..10.0, dq in 0.0f64..10.0) {
            let s = seq(geo, poly, 4);
            let a = lq_membership(&s, ExtReal::Finite(q1)).unwrap();
            let b = lq_membership(&s, ExtReal::Finite(q1 + dq)).unwrap();
            let c = lq_membership(&s, ExtReal::Inf).unwrap();
            prop_assert!(!a.is_in() || b.is_in());
            prop_assert!(!b.is_in() || c.is_in());
        }

        #[test]
        fn partial_sums_match_verdict(geo in prop_oneof![Just(0.0), -0.25f64..0.25], poly in -3.0f64..1.0, q in 0.5f64..4.0) {
            let s = seq(geo, poly, 4001);
            let q = ExtReal::Finite(q);
            let n1 = lq_partial_norm(&s, q, 1000).unwrap();
            let n2 = lq_partial_norm(&s, q, 4000).unwrap();
            prop_assert!(n2 >= n1);
            let verdict = lq_membership(&s, q).unwrap();
            // Clear-cut classes only: geometric or polynomial with margin.
            let margin = if sign_tol(geo) != 0 { geo.abs() } else { (poly * q.to_f64() + 1.0).abs() };
            prop_assume!(margin > 0.2);
            if verdict.is_in() {
                prop_assert!(n2 / n1 < 1.0 + 0.2, "convergent sums should stabilise: {n1} {n2}");
            } else {
                prop_assert!(n2 / n1 > 1.01, "divergent sums should keep growing: {n1} {n2}");
            }
        }
    }
}
