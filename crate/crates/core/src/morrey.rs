//! Morrey norms `sup_Q φ(ℓ(Q)) (|Q|^{-1} ∫_Q |f|^p)^{1/p}` of simple functions.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::phi::{require_gp, PhiSpec};
use crate::rearrangement::{interval_overlap, ratio_to_f64, Cube, GeneralCube, Mode, SimpleFunction};

const LN2: f64 = std::f64::consts::LN_2;

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Supremum over dyadic cubes of `ln φ(2^{-ν}) + (ν d ln 2 + ln mass_ν)/p`.
///
/// `items` are `(level, index, ln mass)` of disjoint dyadic cubes; `shift`
/// is added to every level term. Cubes inside an item are dominated by the
/// item itself, and coarsening stops once each orthant has merged into one
/// cube, beyond which `φ(t) t^{-d/p}` is nonincreasing.
pub(crate) fn dyadic_sup_log(
    phi: &PhiSpec,
    p: f64,
    dim: usize,
    mut items: Vec<(i32, Vec<BigInt>, f64)>,
    shift: impl Fn(i32) -> f64,
) -> f64 {
    if items.is_empty() {
        return f64::NEG_INFINITY;
    }
    let d = dim as f64;
    items.sort_by_key(|it| std::cmp::Reverse(it.0));
    let orthants: HashSet<Vec<bool>> = items
        .iter()
        .map(|(_, k, _)| k.iter().map(|x| x.sign() == num_bigint::Sign::Minus).collect())
        .collect();
    let mut groups: HashMap<Vec<BigInt>, f64> = HashMap::new();
    let mut next = 0;
    let mut nu = items[0].0;
    let mut best = f64::NEG_INFINITY;
    loop {
        while next < items.len() && items[next].0 == nu {
            let (_, k, m) = std::mem::take(&mut items[next]);
            let e = groups.entry(k).or_insert(f64::NEG_INFINITY);
            *e = log_add(*e, m);
            next += 1;
        }
        if let Some(m) = groups.values().copied().reduce(f64::max) {
            let term = phi.ln_eval_pow2(-(nu as i64)) + (nu as f64 * d * LN2 + m) / p + shift(nu);
            best = best.max(term);
        }
        if next == items.len() && groups.len() == orthants.len() {
            return best;
        }
        let mut coarse: HashMap<Vec<BigInt>, f64> = HashMap::with_capacity(groups.len());
        for (k, m) in groups {
            let parent: Vec<BigInt> = k.iter().map(|x| x >> 1usize).collect();
            let e = coarse.entry(parent).or_insert(f64::NEG_INFINITY);
            *e = log_add(*e, m);
        }
        groups = coarse;
        nu -= 1;
    }
}

fn check_dims(f: &SimpleFunction, phi: &PhiSpec) -> Result<()> {
    if f.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(f.dim(), phi.dim()));
    }
    Ok(())
}

/// Exact `‖f‖_{M_{φ,p}}` over dyadic cubes for a dyadic simple function.
pub fn morrey_norm_dyadic(f: &SimpleFunction, phi: &PhiSpec, p: f64) -> Result<f64> {
    require_gp(phi, p)?;
    check_dims(f, phi)?;
    if f.mode() != Mode::Dyadic {
        return Err(Error::WrongMode { expected: "dyadic" });
    }
    let d = f.dim() as f64;
    let items = f
        .parts()
        .iter()
        .map(|part| match &part.cube {
            Cube::Dyadic(c) => (c.level, c.index.clone(), p * part.value.ln() - c.level as f64 * d * LN2),
            Cube::General(_) => unreachable!("mode checked"),
        })
        .collect();
    Ok(dyadic_sup_log(phi, p, f.dim(), items, |_| 0.0).exp())
}

/// Spatial index of general cubes sorted by their lower edge on the first axis.
struct CubeIndex {
    cubes: Vec<(GeneralCube, f64)>,
    lo0: Vec<f64>,
    prefix: Vec<f64>,
    max_side: f64,
    bbox: Vec<(f64, f64)>,
}

impl CubeIndex {
    fn new(f: &SimpleFunction, p: f64) -> Self {
        let mut cubes: Vec<(GeneralCube, f64)> = f
            .parts()
            .iter()
            .map(|part| {
                let c = match &part.cube {
                    Cube::General(c) => c.clone(),
                    Cube::Dyadic(c) => c.to_general(),
                };
                (c, part.value.powf(p))
            })
            .collect();
        cubes.sort_by(|a, b| {
            let la = a.0.center[0] - 0.5 * a.0.side;
            let lb = b.0.center[0] - 0.5 * b.0.side;
            la.total_cmp(&lb)
        });
        let lo0: Vec<f64> = cubes.iter().map(|(c, _)| c.center[0] - 0.5 * c.side).collect();
        let mut prefix = vec![0.0];
        for (c, w) in &cubes {
            prefix.push(prefix.last().unwrap() + w * ratio_to_f64(c.volume()));
        }
        let max_side = cubes.iter().map(|(c, _)| c.side).fold(0.0, f64::max);
        let bbox = (0..f.dim())
            .map(|k| {
                cubes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (c, _)| {
                    (lo.min(c.center[k] - 0.5 * c.side), hi.max(c.center[k] + 0.5 * c.side))
                })
            })
            .collect();
        CubeIndex { cubes, lo0, prefix, max_side, bbox }
    }

    fn overlap_mass(&self, i: usize, center: &[f64], side: f64) -> f64 {
        let (c, w) = &self.cubes[i];
        let mut v = *w;
        for (a, b) in center.iter().zip(&c.center) {
            let len = interval_overlap(b - a, side, c.side);
            if len <= 0.0 {
                return 0.0;
            }
            v *= len;
        }
        v
    }

    /// `∫_Q |f|^p` for the cube with the given centre and side.
    fn mass(&self, center: &[f64], side: f64) -> f64 {
        let (qlo, qhi) = (center[0] - 0.5 * side, center[0] + 0.5 * side);
        let start = self.lo0.partition_point(|&x| x < qlo - self.max_side);
        let covers_rest = self.bbox[1..]
            .iter()
            .zip(&center[1..])
            .all(|(&(lo, hi), &c)| c - 0.5 * side <= lo && c + 0.5 * side >= hi);
        let mut total = 0.0;
        let mut i = start;
        if covers_rest {
            while i < self.lo0.len() && self.lo0[i] < qlo {
                total += self.overlap_mass(i, center, side);
                i += 1;
            }
            let inner_end = self.lo0.partition_point(|&x| x <= qhi - self.max_side).max(i);
            total += self.prefix[inner_end] - self.prefix[i];
            i = inner_end;
        }
        while i < self.lo0.len() && self.lo0[i] < qhi {
            total += self.overlap_mass(i, center, side);
            i += 1;
        }
        total
    }

    fn term(&self, phi: &PhiSpec, p: f64, center: &[f64], side: f64) -> f64 {
        let d = center.len() as i32;
        let m = self.mass(center, side);
        if m <= 0.0 {
            return 0.0;
        }
        phi.eval(side) * (m / side.powi(d)).powf(1.0 / p)
    }
}

/// `φ(ℓ) (ℓ^{-d} ∫_Q |f|^p)^{1/p}` for one cube `Q` with centre and side `ℓ`.
pub fn cube_term(f: &SimpleFunction, phi: &PhiSpec, p: f64, center: &[f64], side: f64) -> Result<f64> {
    check_dims(f, phi)?;
    if center.len() != f.dim() {
        return Err(Error::DimensionMismatch(center.len(), f.dim()));
    }
    if !(side > 0.0) {
        return Err(Error::NonPositiveArgument(side));
    }
    if f.parts().is_empty() {
        return Ok(0.0);
    }
    Ok(CubeIndex::new(f, p).term(phi, p, center, side))
}

/// Lower bound for `‖f‖_{M_{φ,p}}` from the constituent cubes, their dilations
/// by `2^k` (`k = -3..=20`) and the bounding cube of every pair.
pub fn morrey_lower_bound(f: &SimpleFunction, phi: &PhiSpec, p: f64) -> Result<f64> {
    require_gp(phi, p)?;
    check_dims(f, phi)?;
    if f.parts().is_empty() {
        return Ok(0.0);
    }
    let idx = CubeIndex::new(f, p);
    let mut best = 0.0f64;
    for (c, _) in &idx.cubes {
        for k in -3..=20 {
            let side = c.side * (k as f64).exp2();
            best = best.max(idx.term(phi, p, &c.center, side));
        }
    }
    let n = idx.cubes.len();
    let d = f.dim();
    let mut center = vec![0.0; d];
    for i in 0..n {
        for k in i + 1..n {
            let (a, b) = (&idx.cubes[i].0, &idx.cubes[k].0);
            let mut side = 0.0f64;
            for (ax, mid) in center.iter_mut().enumerate() {
                let lo = (a.center[ax] - 0.5 * a.side).min(b.center[ax] - 0.5 * b.side);
                let hi = (a.center[ax] + 0.5 * a.side).max(b.center[ax] + 0.5 * b.side);
                *mid = 0.5 * (lo + hi);
                side = side.max(hi - lo);
            }
            best = best.max(idx.term(phi, p, &center, side));
        }
    }
    Ok(best)
}
