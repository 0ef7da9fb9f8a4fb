//! Coefficient arrays `λ = {λ_{j,m}}` and the sequence-space quasi-norm
//!
//! `‖λ‖ = ‖{2^{js} sup_{ν ≤ j, k} φ(2^{-ν}) 2^{(ν-j)d/p} (Σ_{Q_{j,m} ⊂ Q_{ν,k}} |λ_{j,m}|^p)^{1/p}}_j‖_{ℓ_q}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::morrey::{dyadic_sup_log, log_add};
use crate::phi::{require_gp, PhiSpec};
use crate::rearrangement::{DyadicCube, JsonInt, SimpleFunction};

const LN2: f64 = std::f64::consts::LN_2;

/// Largest admissible level (exclusive).
pub const MAX_LEVEL: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffArray {
    pub s: f64,
    pub p: f64,
    pub q: ExtReal,
    dim: usize,
    entries: BTreeMap<(u32, Vec<BigInt>), f64>,
}

impl CoeffArray {
    pub fn new(s: f64, p: f64, q: ExtReal, dim: usize) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidP(p));
        }
        if let ExtReal::Finite(x) = q {
            if !(x > 0.0) {
                return Err(Error::InvalidQ(x.to_string()));
            }
        }
        if !s.is_finite() {
            return Err(Error::Parse(format!("smoothness {s} is not finite")));
        }
        if dim == 0 {
            return Err(Error::MalformedIndex("dimension must be at least 1".into()));
        }
        Ok(CoeffArray { s, p, q, dim, entries: BTreeMap::new() })
    }

    /// Sets `λ_{j,m}`; a zero value removes the entry.
    pub fn insert(&mut self, j: u32, m: Vec<BigInt>, value: f64) -> Result<()> {
        if j >= MAX_LEVEL {
            return Err(Error::MalformedIndex(format!("level {j} is not below {MAX_LEVEL}")));
        }
        if m.len() != self.dim {
            return Err(Error::MalformedIndex(format!(
                "index of length {} in dimension {}",
                m.len(),
                self.dim
            )));
        }
        if !value.is_finite() {
            return Err(Error::MalformedIndex(format!("value {value} is not finite")));
        }
        if value == 0.0 {
            self.entries.remove(&(j, m));
        } else {
            self.entries.insert((j, m), value);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, j: u32, m: &[BigInt]) -> Option<f64> {
        self.entries.get(&(j, m.to_vec())).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, &[BigInt], f64)> {
        self.entries.iter().map(|((j, m), v)| (*j, m.as_slice(), *v))
    }

    /// The same coefficients measured with other parameters.
    pub fn with_params(&self, s: f64, p: f64, q: ExtReal) -> Result<Self> {
        let mut c = CoeffArray::new(s, p, q, self.dim)?;
        c.entries = self.entries.clone();
        Ok(c)
    }

    /// `Σ |λ_{j,m}| χ_{Q_{j,m}}`; requires disjoint supports.
    pub fn to_simple_function(&self) -> Result<SimpleFunction> {
        let parts =
            self.entries.iter().map(|((j, m), v)| (v.abs(), DyadicCube::new(*j as i32, m.clone()))).collect();
        SimpleFunction::dyadic(self.dim, parts)
    }
}

/// Sequence-space quasi-norm of `λ` with weight `φ ∈ G_p`.
pub fn n_norm(lambda: &CoeffArray, phi: &PhiSpec) -> Result<f64> {
    let p = lambda.p;
    require_gp(phi, p)?;
    if phi.dim() != lambda.dim {
        return Err(Error::DimensionMismatch(lambda.dim, phi.dim()));
    }
    let d = lambda.dim as f64;
    let mut by_level: BTreeMap<u32, Vec<(i32, Vec<BigInt>, f64)>> = BTreeMap::new();
    for ((j, m), v) in &lambda.entries {
        let ln_mass = p * v.abs().ln() - *j as f64 * d * LN2;
        by_level.entry(*j).or_default().push((*j as i32, m.clone(), ln_mass));
    }
    let mut total = f64::NEG_INFINITY;
    for (j, items) in by_level {
        let ln_level = j as f64 * lambda.s * LN2 + dyadic_sup_log(phi, p, lambda.dim, items, |_| 0.0);
        total = match lambda.q {
            ExtReal::Inf => total.max(ln_level),
            ExtReal::Finite(q) => log_add(total, q * ln_level),
        };
    }
    Ok(match lambda.q {
        ExtReal::Inf => total.exp(),
        ExtReal::Finite(q) => (total / q).exp(),
    })
}

/// Integer written as a JSON string.
struct StrInt(BigInt);

impl Serialize for StrInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for StrInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(StrInt(JsonInt::deserialize(d)?.0))
    }
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    j: u32,
    m: Vec<StrInt>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCoeffs {
    s: f64,
    p: f64,
    q: ExtReal,
    dim: usize,
    entries: Vec<RawEntry>,
}

impl Serialize for CoeffArray {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|((j, m), v)| RawEntry { j: *j, m: m.iter().cloned().map(StrInt).collect(), value: *v })
            .collect();
        RawCoeffs { s: self.s, p: self.p, q: self.q, dim: self.dim, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffArray {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawCoeffs::deserialize(d)?;
        let mut c = CoeffArray::new(raw.s, raw.p, raw.q, raw.dim).map_err(D::Error::custom)?;
        for e in raw.entries {
            let m = e.m.into_iter().map(|k| k.0).collect();
            c.insert(e.j, m, e.value).map_err(D::Error::custom)?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(k: i64) -> BigInt {
        BigInt::from(k)
    }

    /// Brute force with `i128` indices and explicit levels `lo..=j`.
    fn oracle(lambda: &CoeffArray, phi: &PhiSpec, extra_coarse: i32) -> f64 {
        let (p, d) = (lambda.p, lambda.dim() as i32);
        let mut levels: BTreeMap<u32, Vec<(Vec<i128>, f64)>> = BTreeMap::new();
        for (j, m, v) in lambda.entries() {
            let idx = m.iter().map(|x| x.to_string().parse::<i128>().unwrap()).collect();
            levels.entry(j).or_default().push((idx, v.abs()));
        }
        let mut parts = Vec::new();
        for (j, items) in levels {
            let j = j as i32;
            let mut best = 0.0f64;
            let mut nu = j;
            loop {
                let mut groups: BTreeMap<Vec<i128>, f64> = BTreeMap::new();
                for (m, v) in &items {
                    let k: Vec<i128> = m.iter().map(|x| x.div_euclid(1i128 << (j - nu))).collect();
                    *groups.entry(k).or_insert(0.0) += v.powf(p);
                }
                let mass = groups.values().copied().fold(0.0, f64::max);
                let t = ((-nu) as f64).exp2();
                let term = phi.eval(t) * (((nu - j) * d) as f64 / p).exp2() * mass.powf(1.0 / p);
                best = best.max(term);
                if nu <= -extra_coarse {
                    break;
                }
                nu -= 1;
            }
            parts.push((j as f64 * lambda.s).exp2() * best);
        }
        match lambda.q {
            ExtReal::Inf => parts.into_iter().fold(0.0, f64::max),
            ExtReal::Finite(q) => parts.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q),
        }
    }

    fn arb_coeffs(d: usize) -> impl Strategy<Value = CoeffArray> {
        (
            -1.0f64..2.0,
            prop_oneof![Just(ExtReal::Inf), (0.5f64..4.0).prop_map(ExtReal::Finite)],
            prop::collection::vec((0u32..6, prop::collection::vec(0i64..40, d), 0.1f64..3.0), 1..12),
        )
            .prop_map(move |(s, q, raw)| {
                let mut c = CoeffArray::new(s, 2.0, q, d).unwrap();
                for (j, m, v) in raw {
                    c.insert(j, m.into_iter().map(big).collect(), v).unwrap();
                }
                c
            })
    }

    #[test]
    fn json_shape() {
        let mut c = CoeffArray::new(0.5, 2.0, ExtReal::Inf, 2).unwrap();
        c.insert(3, vec![big(1) << 70usize, big(-2)], 1.25).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(
            s,
            r#"{"s":0.5,"p":2.0,"q":"inf","dim":2,"entries":[{"j":3,"m":["1180591620717411303424","-2"],"value":1.25}]}"#
        );
        let back: CoeffArray = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"s":0,"p":1,"q":1,"dim":1,"entries":[{"j":70,"m":["0"],"value":1}]}"#;
        assert!(serde_json::from_str::<CoeffArray>(bad).is_err());
        let bad = r#"{"s":0,"p":1,"q":1,"dim":2,"entries":[{"j":1,"m":["0"],"value":1}]}"#;
        assert!(serde_json::from_str::<CoeffArray>(bad).is_err());
    }

    #[test]
    fn single_coefficient() {
        let phi = PhiSpec::phi_uv(1, ExtReal::Finite(4.0), ExtReal::Finite(2.0)).unwrap();
        let mut c = CoeffArray::new(0.0, 2.0, ExtReal::Finite(1.0), 1).unwrap();
        c.insert(4, vec![big(0)], 1.0 / phi.eval(1.0 / 16.0)).unwrap();
        assert!((n_norm(&c, &phi).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn far_apart_positions() {
        let phi = PhiSpec::phi_uv(1, ExtReal::Finite(4.0), ExtReal::Finite(2.0)).unwrap();
        let mut c = CoeffArray::new(0.0, 2.0, ExtReal::Inf, 1).unwrap();
        for k in 1..=40u32 {
            c.insert(2, vec![big(1) << (2 * k as usize)], 1.0).unwrap();
        }
        let v = n_norm(&c, &phi).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_oracle_with_coarser_levels(c in arb_coeffs(1), u in 2.0f64..6.0) {
            let phi = PhiSpec::phi_uv(1, ExtReal::Finite(u), ExtReal::Finite(2.0)).unwrap();
            let a = n_norm(&c, &phi).unwrap();
            let b = oracle(&c, &phi, 16);
            prop_assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }

        #[test]
        fn reduces_to_besov(c in arb_coeffs(2)) {
            let phi = PhiSpec::power(2, 1.0).unwrap();
            let a = n_norm(&c, &phi).unwrap();
            let mut per_level: BTreeMap<u32, f64> = BTreeMap::new();
            for (j, _, v) in c.entries() {
                *per_level.entry(j).or_insert(0.0) += v * v;
            }
            let terms: Vec<f64> = per_level
                .iter()
                .map(|(j, m2)| (*j as f64 * (c.s - 1.0)).exp2() * m2.sqrt())
                .collect();
            let b = match c.q {
                ExtReal::Inf => terms.into_iter().fold(0.0, f64::max),
                ExtReal::Finite(q) => terms.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q),
            };
            prop_assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
        }

        #[test]
        fn max_split_for_plus_weight(c in arb_coeffs(1)) {
            // φ⁺ = max(t^{d/p}, 1): compare with max of the Besov part and the local part.
            let phi = PhiSpec::two_sided(1, 0.0, 0.5).unwrap();
            let n = n_norm(&c, &phi).unwrap();
            let besov = n_norm(&c, &PhiSpec::power(1, 0.5).unwrap()).unwrap();
            let local = {
                let mut acc = Vec::new();
                let mut levels: BTreeMap<u32, Vec<(i64, f64)>> = BTreeMap::new();
                for (j, m, v) in c.entries() {
                    levels.entry(j).or_default().push((m[0].to_string().parse().unwrap(), v));
                }
                for (j, items) in levels {
                    let mut best = 0.0f64;
                    for nu in 0..=j {
                        let mut g: BTreeMap<i64, f64> = BTreeMap::new();
                        for (m, v) in &items {
                            *g.entry(m >> (j - nu)).or_insert(0.0) += v * v;
                        }
                        let mass = g.values().copied().fold(0.0, f64::max);
                        best = best.max(((nu as f64 - j as f64) / 2.0).exp2() * mass.sqrt());
                    }
                    acc.push((j as f64 * c.s).exp2() * best);
                }
                match c.q {
                    ExtReal::Inf => acc.into_iter().fold(0.0, f64::max),
                    ExtReal::Finite(q) => acc.iter().map(|x| x.powf(q)).sum::<f64>().powf(1.0 / q),
                }
            };
            let m = besov.max(local);
            prop_assert!(n >= m * (1.0 - 1e-12) && n <= 4.0 * m, "{n} vs {m}");
        }
    }
}
