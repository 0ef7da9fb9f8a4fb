//! Simple functions on cubes, distribution functions and decreasing rearrangements.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Absolute overlap tolerance for general cubes.
pub const GAP_TOL: f64 = 1e-9;

/// `Q_{j,k} = 2^{-j}([0,1)^d + k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub level: i32,
    pub index: Vec<BigInt>,
}

impl DyadicCube {
    pub fn new(level: i32, index: Vec<BigInt>) -> Self {
        DyadicCube { level, index }
    }

    pub fn from_i64(level: i32, index: &[i64]) -> Self {
        DyadicCube { level, index: index.iter().map(|&k| BigInt::from(k)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// `|Q| = 2^{-jd}` as an exact rational.
    pub fn volume(&self) -> BigRational {
        pow2_rational(-(self.level as i64) * self.dim() as i64)
    }

    /// The unique cube of level `level ≤ self.level` containing `self`.
    pub fn ancestor(&self, level: i32) -> DyadicCube {
        let shift = (self.level - level) as usize;
        DyadicCube { level, index: self.index.iter().map(|k| k >> shift).collect() }
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        other.level >= self.level && other.ancestor(self.level) == *self
    }

    /// Sign pattern of the index; dyadic cubes never cross coordinate hyperplanes.
    pub fn orthant(&self) -> Vec<bool> {
        self.index.iter().map(|k| k.is_negative()).collect()
    }

    pub fn to_general(&self) -> GeneralCube {
        let side = self.side();
        let center = self.index.iter().map(|k| (big_to_f64(k) + 0.5) * side).collect();
        GeneralCube { center, side, volume: self.volume() }
    }
}

/// Axis-parallel cube with centre and side; the volume is carried exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralCube {
    pub center: Vec<f64>,
    pub side: f64,
    volume: BigRational,
}

impl GeneralCube {
    pub fn new(center: Vec<f64>, side: f64) -> Result<Self> {
        let d = center.len() as i32;
        let volume = rational_from_f64(side.powi(d))?;
        Ok(GeneralCube { center, side, volume })
    }

    /// Cube whose volume is the given rational; the side is its `d`-th root.
    pub fn with_volume(center: Vec<f64>, volume: BigRational) -> Self {
        let d = center.len() as f64;
        let side = ratio_to_f64(&volume).powf(1.0 / d);
        GeneralCube { center, side, volume }
    }

    pub fn volume(&self) -> &BigRational {
        &self.volume
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Volume of the intersection, computed from centre differences.
    pub fn overlap(&self, other: &GeneralCube) -> f64 {
        let mut v = 1.0;
        for (a, b) in self.center.iter().zip(&other.center) {
            let len = interval_overlap(b - a, self.side, other.side);
            if len <= 0.0 {
                return 0.0;
            }
            v *= len;
        }
        v
    }
}

/// Length of `[-s1/2, s1/2) ∩ [δ - s2/2, δ + s2/2)`.
pub(crate) fn interval_overlap(delta: f64, s1: f64, s2: f64) -> f64 {
    let hi = (0.5 * s1).min(delta + 0.5 * s2);
    let lo = (-0.5 * s1).max(delta - 0.5 * s2);
    (hi - lo).max(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cube {
    Dyadic(DyadicCube),
    General(GeneralCube),
}

impl Cube {
    pub fn volume(&self) -> BigRational {
        match self {
            Cube::Dyadic(c) => c.volume(),
            Cube::General(c) => c.volume.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cube::Dyadic(c) => c.dim(),
            Cube::General(c) => c.dim(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub value: f64,
    pub cube: Cube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dyadic,
    General,
}

/// `Σ a_i χ_{Q_i}` with positive values on pairwise disjoint cubes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    dim: usize,
    mode: Mode,
    parts: Vec<Part>,
}

impl SimpleFunction {
    pub fn new(dim: usize, mode: Mode, parts: Vec<Part>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFunction("dimension must be at least 1".into()));
        }
        for (i, p) in parts.iter().enumerate() {
            if !(p.value > 0.0 && p.value.is_finite()) {
                return Err(Error::InvalidFunction(format!("part {i} has value {}", p.value)));
            }
            if p.cube.dim() != dim {
                return Err(Error::DimensionMismatch(p.cube.dim(), dim));
            }
            match (&p.cube, mode) {
                (Cube::Dyadic(_), Mode::Dyadic) => {}
                (Cube::General(c), Mode::General) => {
                    if !(c.side > 0.0 && c.side.is_finite()) || c.center.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidFunction(format!("part {i} has a bad cube")));
                    }
                }
                _ => return Err(Error::InvalidFunction(format!("part {i} has the wrong mode"))),
            }
        }
        let f = SimpleFunction { dim, mode, parts };
        match mode {
            Mode::Dyadic => f.check_dyadic_disjoint()?,
            Mode::General => f.check_general_disjoint()?,
        }
        Ok(f)
    }

    pub fn dyadic(dim: usize, parts: Vec<(f64, DyadicCube)>) -> Result<Self> {
        let parts = parts.into_iter().map(|(value, c)| Part { value, cube: Cube::Dyadic(c) });
        Self::new(dim, Mode::Dyadic, parts.collect())
    }

    pub fn general(dim: usize, parts: Vec<(f64, GeneralCube)>) -> Result<Self> {
        let parts = parts.into_iter().map(|(value, c)| Part { value, cube: Cube::General(c) });
        Self::new(dim, Mode::General, parts.collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    /// The same function described by general cubes.
    pub fn to_general(&self) -> SimpleFunction {
        let parts = self
            .parts
            .iter()
            .map(|p| Part {
                value: p.value,
                cube: match &p.cube {
                    Cube::Dyadic(c) => Cube::General(c.to_general()),
                    Cube::General(c) => Cube::General(c.clone()),
                },
            })
            .collect();
        SimpleFunction { dim: self.dim, mode: Mode::General, parts }
    }

    fn check_dyadic_disjoint(&self) -> Result<()> {
        let cubes: Vec<&DyadicCube> = self
            .parts
            .iter()
            .map(|p| match &p.cube {
                Cube::Dyadic(c) => c,
                Cube::General(_) => unreachable!("mode checked"),
            })
            .collect();
        let mut seen: HashSet<&DyadicCube> = HashSet::new();
        let mut levels: Vec<i32> = Vec::new();
        for c in &cubes {
            if !seen.insert(c) {
                return Err(Error::InvalidFunction(format!("cube at level {} repeated", c.level)));
            }
            levels.push(c.level);
        }
        levels.sort_unstable();
        levels.dedup();
        for c in &cubes {
            for &l in levels.iter().take_while(|&&l| l < c.level) {
                if seen.contains(&c.ancestor(l)) {
                    return Err(Error::InvalidFunction(format!(
                        "cube at level {} lies inside a cube at level {l}",
                        c.level
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_general_disjoint(&self) -> Result<()> {
        let cubes: Vec<&GeneralCube> = self
            .parts
            .iter()
            .map(|p| match &p.cube {
                Cube::General(c) => c,
                Cube::Dyadic(_) => unreachable!("mode checked"),
            })
            .collect();
        let mut order: Vec<usize> = (0..cubes.len()).collect();
        let lo = |i: usize| cubes[i].center[0] - 0.5 * cubes[i].side;
        order.sort_by(|&a, &b| lo(a).total_cmp(&lo(b)));
        for (n, &i) in order.iter().enumerate() {
            let hi = cubes[i].center[0] + 0.5 * cubes[i].side;
            for &k in &order[n + 1..] {
                if lo(k) >= hi - GAP_TOL {
                    break;
                }
                let overlapping = cubes[i]
                    .center
                    .iter()
                    .zip(&cubes[k].center)
                    .all(|(a, b)| interval_overlap(b - a, cubes[i].side, cubes[k].side) > GAP_TOL);
                if overlapping {
                    return Err(Error::InvalidFunction(format!("parts {i} and {k} overlap")));
                }
            }
        }
        Ok(())
    }
}

/// One level of a decreasing step function: `height` on an interval of length `width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub height: f64,
    #[serde(serialize_with = "ser_ratio", deserialize_with = "de_ratio")]
    pub width: BigRational,
}

/// `f*` as a finite decreasing step function on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRearrangement {
    steps: Vec<Step>,
}

impl StepRearrangement {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        for (i, s) in steps.iter().enumerate() {
            if !(s.height > 0.0 && s.height.is_finite()) || !s.width.is_positive() {
                return Err(Error::InvalidFunction(format!("step {i} is degenerate")));
            }
            if i > 0 && steps[i - 1].height <= s.height {
                return Err(Error::InvalidFunction("heights must decrease strictly".into()));
            }
        }
        Ok(StepRearrangement { steps })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn total_width(&self) -> BigRational {
        self.steps.iter().fold(BigRational::zero(), |acc, s| acc + &s.width)
    }

    /// `f*(t)` at an exact rational point.
    pub fn eval_exact(&self, t: &BigRational) -> f64 {
        let mut acc = BigRational::zero();
        for s in &self.steps {
            acc += &s.width;
            if *t < acc {
                return s.height;
            }
        }
        0.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for s in &self.steps {
            acc += ratio_to_f64(&s.width);
            if t < acc {
                return s.height;
            }
        }
        0.0
    }
}

/// `‖f‖_p`, with `p = ∞` giving the largest value.
pub fn lp_norm(f: &SimpleFunction, p: ExtReal) -> Result<f64> {
    match p {
        ExtReal::Inf => Ok(f.parts.iter().map(|q| q.value).fold(0.0, f64::max)),
        ExtReal::Finite(p) if p > 0.0 => {
            let s: f64 = f.parts.iter().map(|q| q.value.powf(p) * ratio_to_f64(&q.cube.volume())).sum();
            Ok(s.powf(1.0 / p))
        }
        ExtReal::Finite(p) => Err(Error::InvalidP(p)),
    }
}

/// `μ(f, σ) = |{x : |f(x)| > σ}|`.
pub fn distribution(f: &SimpleFunction, sigma: f64) -> BigRational {
    f.parts.iter().filter(|q| q.value > sigma).fold(BigRational::zero(), |acc, q| acc + q.cube.volume())
}

/// `f*(t) = inf{σ ≥ 0 : μ(f, σ) ≤ t}` as a step function.
pub fn rearrange(f: &SimpleFunction) -> StepRearrangement {
    let mut by_value: Vec<(f64, BigRational)> = f.parts.iter().map(|q| (q.value, q.cube.volume())).collect();
    by_value.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut steps: Vec<Step> = Vec::new();
    for (v, w) in by_value {
        match steps.last_mut() {
            Some(s) if s.height == v => s.width += w,
            _ => steps.push(Step { height: v, width: w }),
        }
    }
    StepRearrangement { steps }
}

pub(crate) fn pow2_rational(e: i64) -> BigRational {
    let two_e = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(two_e)
    } else {
        BigRational::new(BigInt::one(), two_e)
    }
}

pub(crate) fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidFunction(format!("{x} is not finite")))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| ln_ratio(r).exp())
}

pub(crate) fn big_to_f64(k: &BigInt) -> f64 {
    k.to_f64().unwrap_or(f64::NAN)
}

/// `ln |n|` for integers of any size.
pub(crate) fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return big_to_f64(n).abs().ln();
    }
    let shift = bits - 64;
    big_to_f64(&(n.abs() >> shift as usize)).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln r` for positive rationals of any size.
pub fn ln_ratio(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
    let s = String::deserialize(d)?;
    s.parse::<BigRational>().map_err(serde::de::Error::custom)
}

/// Integer that reads from a JSON number or string and writes a number when it fits.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::Number(n) => {
                n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from))
            }
            serde_json::Value::String(s) => s.trim().parse::<BigInt>().ok(),
            _ => None,
        };
        parsed.map(JsonInt).ok_or_else(|| serde::de::Error::custom(format!("bad integer {v}")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPart {
    Dyadic {
        value: f64,
        level: i32,
        index: Vec<JsonInt>,
    },
    General {
        value: f64,
        center: Vec<f64>,
        side: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        volume: Option<String>,
    },
}

#[derive(Serialize, Deserialize)]
struct RawFunction {
    dim: usize,
    mode: Mode,
    parts: Vec<RawPart>,
}

impl Serialize for SimpleFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts = self
            .parts
            .iter()
            .map(|p| match &p.cube {
                Cube::Dyadic(c) => RawPart::Dyadic {
                    value: p.value,
                    level: c.level,
                    index: c.index.iter().cloned().map(JsonInt).collect(),
                },
                Cube::General(c) => RawPart::General {
                    value: p.value,
                    center: c.center.clone(),
                    side: c.side,
                    volume: Some(c.volume.to_string()),
                },
            })
            .collect();
        RawFunction { dim: self.dim, mode: self.mode, parts }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimpleFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawFunction::deserialize(d)?;
        let mut parts = Vec::with_capacity(raw.parts.len());
        for p in raw.parts {
            parts.push(match p {
                RawPart::Dyadic { value, level, index } => Part {
                    value,
                    cube: Cube::Dyadic(DyadicCube::new(level, index.into_iter().map(|k| k.0).collect())),
                },
                RawPart::General { value, center, side, volume } => {
                    let cube = match volume {
                        Some(v) => {
                            let vol: BigRational = v.parse().map_err(D::Error::custom)?;
                            let mut c = GeneralCube::with_volume(center, vol);
                            c.side = side;
                            c
                        }
                        None => GeneralCube::new(center, side).map_err(D::Error::custom)?,
                    };
                    Part { value, cube: Cube::General(cube) }
                }
            });
        }
        SimpleFunction::new(raw.dim, raw.mode, parts).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(level: i32, k: &[i64]) -> DyadicCube {
        DyadicCube::from_i64(level, k)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn two_level_example() {
        // 3 on [0, 1/4) and 1 on [1, 2).
        let f = SimpleFunction::dyadic(1, vec![(3.0, q(2, &[0])), (1.0, q(0, &[1]))]).unwrap();
        let fs = rearrange(&f);
        assert_eq!(fs.steps().len(), 2);
        assert_eq!(fs.steps()[0], Step { height: 3.0, width: r(1, 4) });
        assert_eq!(fs.steps()[1], Step { height: 1.0, width: r(1, 1) });
        assert_eq!(distribution(&f, 2.0), r(1, 4));
        assert_eq!(distribution(&f, 0.5), r(5, 4));
        assert_eq!(fs.eval_exact(&r(1, 4)), 1.0);
        assert_eq!(fs.eval_exact(&r(5, 4)), 0.0);
    }

    #[test]
    fn lp_of_half_interval() {
        let f = SimpleFunction::dyadic(1, vec![(2.0, q(1, &[0]))]).unwrap();
        assert_eq!(lp_norm(&f, ExtReal::Finite(1.0)).unwrap(), 1.0);
        assert_eq!(lp_norm(&f, ExtReal::Inf).unwrap(), 2.0);
    }

    #[test]
    fn shifts_round_down() {
        let c = q(3, &[-1, 5, -8]);
        assert_eq!(c.ancestor(2), q(2, &[-1, 2, -4]));
        assert_eq!(c.ancestor(0), q(0, &[-1, 0, -1]));
        assert!(q(-1, &[-1, 0, -1]).contains(&c));
    }

    #[test]
    fn rejects_overlaps() {
        assert!(SimpleFunction::dyadic(1, vec![(1.0, q(0, &[0])), (1.0, q(2, &[1]))]).is_err());
        assert!(SimpleFunction::dyadic(1, vec![(1.0, q(1, &[1])), (2.0, q(1, &[1]))]).is_err());
        let a = GeneralCube::new(vec![0.0, 0.0], 1.0).unwrap();
        let b = GeneralCube::new(vec![0.5, 0.5], 1.0).unwrap();
        let c = GeneralCube::new(vec![1.0, 0.0], 1.0).unwrap();
        assert!(SimpleFunction::general(2, vec![(1.0, a.clone()), (1.0, b)]).is_err());
        assert!(SimpleFunction::general(2, vec![(1.0, a), (1.0, c)]).is_ok());
        assert!(SimpleFunction::dyadic(1, vec![(0.0, q(0, &[0]))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let big: BigInt = BigInt::from(1u8) << 80usize;
        let f = SimpleFunction::dyadic(
            2,
            vec![(1.5, q(3, &[1, -2])), (0.5, DyadicCube::new(0, vec![big, 0.into()]))],
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"mode\":\"dyadic\""));
        assert!(s.contains("\"1208925819614629174706176\""));
        let back: SimpleFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let g = f.to_general();
        let back: SimpleFunction = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(rearrange(&back), rearrange(&f));
        let plain: SimpleFunction = serde_json::from_str(
            r#"{"dim":1,"mode":"general","parts":[{"value":2,"center":[0.5],"side":0.25}]}"#,
        )
        .unwrap();
        assert_eq!(distribution(&plain, 1.0), r(1, 4));
    }

    fn random_general(rng: &mut ChaCha8Rng, d: usize, n: usize) -> SimpleFunction {
        // Cubes on a coarse lattice of unit cells, so disjointness holds by construction.
        let mut used = HashSet::new();
        let mut parts = Vec::new();
        while parts.len() < n {
            let cell: Vec<i64> = (0..d).map(|_| rng.gen_range(0..4)).collect();
            if !used.insert(cell.clone()) {
                continue;
            }
            let side = rng.gen_range(0.2..0.9);
            let center = cell.iter().map(|&c| c as f64 + 0.5).collect();
            let value = (rng.gen_range(1..8) as f64) * 0.5;
            parts.push((value, GeneralCube::new(center, side).unwrap()));
        }
        SimpleFunction::general(d, parts).unwrap()
    }

    #[test]
    fn monte_carlo_lp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=2 {
            let f = random_general(&mut rng, d, 3);
            let exact = lp_norm(&f, ExtReal::Finite(2.0)).unwrap().powi(2);
            let n = 400_000;
            let (mut acc, mut acc2) = (0.0, 0.0);
            for _ in 0..n {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..4.0)).collect();
                for p in f.parts() {
                    let Cube::General(c) = &p.cube else { unreachable!() };
                    if x.iter().zip(&c.center).all(|(xi, ci)| (xi - ci).abs() < 0.5 * c.side) {
                        acc += p.value * p.value;
                        acc2 += p.value.powi(4);
                    }
                }
            }
            let vol = 4f64.powi(d as i32);
            let mean = acc / n as f64;
            let stderr = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt() * vol;
            let estimate = mean * vol;
            assert!((estimate - exact).abs() < 5.0 * stderr, "{estimate} vs {exact} ({stderr})");
        }
    }

    fn arb_dyadic() -> impl Strategy<Value = SimpleFunction> {
        prop::collection::vec((1u8..6, 0i32..4, -8i64..8), 1..8).prop_filter_map("overlapping cubes", |raw| {
            let parts = raw.into_iter().map(|(v, l, k)| (v as f64 * 0.75, q(l, &[k]))).collect();
            SimpleFunction::dyadic(1, parts).ok()
        })
    }

    proptest! {
        #[test]
        fn rearrangement_is_equimeasurable(f in arb_dyadic(), sigma in 0.0f64..5.0) {
            let fs = rearrange(&f);
            let mu_star: BigRational = fs
                .steps()
                .iter()
                .filter(|s| s.height > sigma)
                .fold(BigRational::zero(), |a, s| a + &s.width);
            prop_assert_eq!(mu_star, distribution(&f, sigma));
            let hs: Vec<f64> = fs.steps().iter().map(|s| s.height).collect();
            prop_assert!(hs.windows(2).all(|w| w[0] > w[1]));
        }

        #[test]
        fn rearrangement_matches_inf_scan(f in arb_dyadic(), num in 0i64..200) {
            // f*(t) = inf{σ : μ(f, σ) ≤ t}, scanning σ over the value set and 0.
            let t = r(num, 16);
            let fs = rearrange(&f);
            let mut values: Vec<f64> = f.parts().iter().map(|p| p.value).collect();
            values.push(0.0);
            values.sort_by(f64::total_cmp);
            let scan = values.into_iter().find(|&s| distribution(&f, s) <= t).unwrap();
            prop_assert_eq!(fs.eval_exact(&t), scan);
        }
    }
}
