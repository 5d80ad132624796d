//! Fat point schemes, their Hilbert functions, and the graded Betti numbers
//! of the first two modules of the minimal free resolution.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::{anticanonical_nef, NegSet, PointConfiguration};
use crate::cones::{h0, h1, reduce};
use crate::error::{Error, Result};
use crate::lattice::DivisorClass;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FatPointScheme {
    pub config: PointConfiguration,
    #[serde(skip)]
    neg: NegSet,
    pub multiplicities: [i64; 6],
}

impl FatPointScheme {
    pub fn new(config: PointConfiguration, multiplicities: [i64; 6]) -> Result<Self> {
        if let Some(m) = multiplicities.iter().find(|&&m| m < 0) {
            return Err(Error::InvalidConfig(format!("negative multiplicity {m}")));
        }
        let neg = config.neg()?;
        Ok(FatPointScheme { config, neg, multiplicities })
    }

    pub fn neg(&self) -> &NegSet {
        &self.neg
    }

    /// `t*E0 - m1*E1 - ... - m6*E6`.
    pub fn class_at(&self, t: i64) -> DivisorClass {
        DivisorClass::fat(t, &self.multiplicities)
    }

    pub fn h(&self, t: i64) -> i64 {
        if t < 0 {
            0
        } else {
            h0(self.class_at(t), &self.neg)
        }
    }

    fn supported(&self) -> Result<()> {
        if self.config.is_distinct() || anticanonical_nef(&self.neg) {
            Ok(())
        } else {
            Err(Error::Unsupported(
                "infinitely near points whose anticanonical class is not nef".into(),
            ))
        }
    }
}

/// Subtracts degree-0 negative classes meeting `-(m1*E1 + ... + m6*E6)`
/// negatively, which changes the multiplicities but not the ideal.
pub fn proximity_normalize(z: &FatPointScheme) -> FatPointScheme {
    let mut f = z.class_at(0);
    let vertical: Vec<DivisorClass> = z.neg.classes().iter().copied().filter(|c| c.degree() == 0).collect();
    while let Some(&c) = vertical.iter().find(|c| f.dot(c) < 0) {
        f = f - c;
    }
    let mut m = [0; 6];
    m.copy_from_slice(&f.coeffs()[1..]);
    FatPointScheme { config: z.config.clone(), neg: z.neg.clone(), multiplicities: m }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertProfile {
    pub values: BTreeMap<i64, i64>,
    pub alpha: i64,
    pub tau: i64,
    pub sigma: i64,
}

impl HilbertProfile {
    pub fn get(&self, t: i64) -> i64 {
        if t < 0 {
            0
        } else {
            self.values[&t]
        }
    }
}

const DEGREE_LIMIT: i64 = 100_000;

/// Hilbert function on `0..=max(t_max, tau + 2)` with `alpha`, `tau`, `sigma`.
pub fn hilbert(z: &FatPointScheme, t_max: i64) -> Result<HilbertProfile> {
    let mut values = BTreeMap::new();
    let mut h1s = Vec::new();
    let mut tau = None;
    let mut t = 0;
    while tau.is_none() || t <= t_max.max(tau.unwrap_or(0) + 2) {
        if t > DEGREE_LIMIT {
            return Err(Error::Internal("Hilbert function did not stabilize".into()));
        }
        let f = z.class_at(t);
        values.insert(t, h0(f, &z.neg));
        h1s.push(h1(f, &z.neg)?);
        let n = h1s.len();
        if tau.is_none() && n >= 3 && h1s[n - 3..].iter().all(|&v| v == 0) {
            tau = Some(t - 2);
        }
        t += 1;
    }
    let tau = tau.expect("loop exits only after tau is found");
    if let Some(bad) = (tau..t).find(|&s| h1s[s as usize] != 0) {
        return Err(Error::Internal(format!("h1 returned to nonzero in degree {bad}")));
    }
    let alpha = *values
        .iter()
        .find(|(_, &v)| v > 0)
        .map(|(k, _)| k)
        .ok_or_else(|| Error::Internal("no degree with a nonzero form".into()))?;
    let seq: Vec<i64> = values.values().copied().collect();
    if seq.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Internal("Hilbert function decreased".into()));
    }
    Ok(HilbertProfile { values, alpha, tau, sigma: tau + 1 })
}

/// Dimension of the cokernel of `I(Z)_i (x) R_1 -> I(Z)_{i+1}`, assuming the
/// multiplication map of the nef part of `F(Z,i)` has maximal rank.
pub fn mu_cokernel(z: &FatPointScheme, i: i64) -> Result<i64> {
    z.supported()?;
    let h_i = z.h(i);
    let h_next = z.h(i + 1);
    if h_i == 0 {
        return Ok(h_next);
    }
    let r = reduce(z.class_at(i), &z.neg);
    let m = r.nef_part;
    let hm = h0(m, &z.neg);
    let hm_next = h0(m + DivisorClass::basis(0), &z.neg);
    Ok((hm_next - 3 * hm).max(0) + (h_next - hm_next))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub t: BTreeMap<i64, u64>,
    pub s: BTreeMap<i64, u64>,
}

fn delta3(h: &HilbertProfile, i: i64) -> i64 {
    h.get(i) - 3 * h.get(i - 1) + 3 * h.get(i - 2) - h.get(i - 3)
}

pub fn betti(z: &FatPointScheme) -> Result<BettiTable> {
    betti_with_profile(z).map(|(b, _)| b)
}

pub fn betti_with_profile(z: &FatPointScheme) -> Result<(BettiTable, HilbertProfile)> {
    z.supported()?;
    let prof = hilbert(z, 0)?;
    let (alpha, sigma) = (prof.alpha, prof.sigma);
    let prof = if prof.values.contains_key(&(sigma + 3)) { prof } else { hilbert(z, sigma + 3)? };
    let mut t = BTreeMap::new();
    t.insert(alpha, prof.get(alpha) as u64);
    for i in alpha..sigma {
        let c = mu_cokernel(z, i)?;
        if c > 0 {
            t.insert(i + 1, c as u64);
        }
    }
    let mut s = BTreeMap::new();
    for i in 0..=sigma + 3 {
        let v = *t.get(&i).unwrap_or(&0) as i64 - delta3(&prof, i);
        if v < 0 {
            return Err(Error::Internal(format!("negative syzygy count {v} in degree {i}")));
        }
        if v > 0 {
            s.insert(i, v as u64);
        }
    }
    let total = t.values().sum::<u64>() as i64 - s.values().sum::<u64>() as i64;
    if total != 1 {
        return Err(Error::Internal(format!("generator and syzygy ranks differ by {total}")));
    }
    Ok((BettiTable { t, s }, prof))
}

/// Renders a graded free module, e.g. `R[-6] + R[-8]^3`.
pub fn shift_notation(ranks: &BTreeMap<i64, u64>) -> String {
    if ranks.is_empty() {
        return "0".into();
    }
    ranks
        .iter()
        .map(|(&d, &k)| {
            let base = if d == 0 { "R".to_string() } else { format!("R[{}]", -d) };
            if k == 1 {
                base
            } else {
                format!("{base}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DistinctSpec;

    fn distinct(case: &str, m: [i64; 6]) -> FatPointScheme {
        let cfg = PointConfiguration::distinct(DistinctSpec::case(case).unwrap()).unwrap();
        FatPointScheme::new(cfg, m).unwrap()
    }

    fn example() -> FatPointScheme {
        distinct("iv", [2, 2, 6, 2, 2, 2])
    }

    #[test]
    fn example_hilbert() {
        let p = hilbert(&example(), 10).unwrap();
        let got: Vec<i64> = (5..=10).map(|t| p.get(t)).collect();
        assert_eq!(got, vec![0, 1, 4, 11, 19, 30]);
        assert_eq!((p.alpha, p.sigma), (6, 10));
    }

    #[test]
    fn example_cokernels() {
        let z = example();
        assert_eq!(mu_cokernel(&z, 7).unwrap(), 3);
        assert_eq!(mu_cokernel(&z, 6).unwrap(), 1);
        assert_eq!(mu_cokernel(&z, 9).unwrap(), 2);
        assert_eq!(mu_cokernel(&z, 8).unwrap(), 0);
    }

    #[test]
    fn example_betti() {
        let b = betti(&example()).unwrap();
        assert_eq!(b.t, BTreeMap::from([(6, 1), (7, 1), (8, 3), (10, 2)]));
        assert_eq!(b.s, BTreeMap::from([(8, 1), (9, 3), (11, 2)]));
        assert_eq!(shift_notation(&b.t), "R[-6] + R[-7] + R[-8]^3 + R[-10]^2");
        assert_eq!(shift_notation(&b.s), "R[-8] + R[-9]^3 + R[-11]^2");
    }

    #[test]
    fn small_schemes() {
        let one = distinct("general", [1, 0, 0, 0, 0, 0]);
        let p = hilbert(&one, 2).unwrap();
        assert_eq!((p.get(0), p.get(1), p.get(2)), (0, 2, 5));
        let b = betti(&one).unwrap();
        assert_eq!(b.t, BTreeMap::from([(1, 2)]));
        assert_eq!(b.s, BTreeMap::from([(2, 1)]));

        let zero = distinct("general", [0; 6]);
        let p = hilbert(&zero, 5).unwrap();
        assert_eq!(p.alpha, 0);
        assert!((0..=5).all(|t| p.get(t) == (t + 2) * (t + 1) / 2));
        let b = betti(&zero).unwrap();
        assert_eq!(b.t, BTreeMap::from([(0, 1)]));
        assert!(b.s.is_empty());
        assert_eq!(shift_notation(&b.t), "R");
    }

    #[test]
    fn normalization() {
        let z = distinct("iv", [3, 0, 1, 0, 2, 5]);
        assert_eq!(proximity_normalize(&z).multiplicities, z.multiplicities);
        let e = DivisorClass::basis;
        let a1 = PointConfiguration::nodal(vec![e(1) - e(2)]).unwrap();
        let z = FatPointScheme::new(a1.clone(), [1, 2, 0, 0, 0, 0]).unwrap();
        let n = proximity_normalize(&z);
        assert_eq!(n.multiplicities, [2, 1, 0, 0, 0, 0]);
        assert_eq!(proximity_normalize(&n), n);
        let zero = FatPointScheme::new(a1, [0; 6]).unwrap();
        assert_eq!(proximity_normalize(&zero).multiplicities, [0; 6]);
        for t in 0..8 {
            assert_eq!(z.h(t), n.h(t));
        }
    }

    #[test]
    fn negative_multiplicities_are_rejected() {
        let cfg = PointConfiguration::distinct(DistinctSpec::general()).unwrap();
        assert!(FatPointScheme::new(cfg, [1, -1, 0, 0, 0, 0]).is_err());
    }
}
