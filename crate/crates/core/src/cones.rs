//! Nefness, fixed-part reduction, h0/h1, and nef cone generators.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{anticanonical_nef, NegSet};
use crate::error::{Error, Result};
use crate::lattice::{chi, DivisorClass};
use crate::weyl::w6g;

/// Hard bound on reduction steps; far above anything a class of moderate
/// degree can need.
pub const MAX_REDUCTION_STEPS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reduction {
    pub nef_part: DivisorClass,
    pub fixed_part: BTreeMap<DivisorClass, u64>,
    pub effective: bool,
    pub trace: Vec<DivisorClass>,
}

impl Reduction {
    pub fn fixed_sum(&self) -> DivisorClass {
        self.fixed_part.iter().map(|(c, &k)| k as i64 * *c).sum()
    }
}

pub fn is_nef(f: DivisorClass, neg: &NegSet) -> bool {
    neg.is_nef(f)
}

/// Subtracts the first class of `neg` (in sorted order) meeting the current
/// class negatively until the class is nef or its degree drops below zero.
pub fn reduce(f: DivisorClass, neg: &NegSet) -> Reduction {
    reduce_in_order(f, neg.classes())
}

pub(crate) fn reduce_in_order(f: DivisorClass, order: &[DivisorClass]) -> Reduction {
    let mut cur = f;
    let mut fixed: BTreeMap<DivisorClass, u64> = BTreeMap::new();
    let mut trace = Vec::new();
    for _ in 0..MAX_REDUCTION_STEPS {
        if cur.degree() < 0 {
            return Reduction { nef_part: cur, fixed_part: fixed, effective: false, trace };
        }
        match order.iter().find(|c| cur.dot(c) < 0) {
            Some(&c) => {
                cur = cur - c;
                *fixed.entry(c).or_default() += 1;
                trace.push(c);
            }
            None => return Reduction { nef_part: cur, fixed_part: fixed, effective: true, trace },
        }
    }
    panic!("reduction of {f} did not terminate within {MAX_REDUCTION_STEPS} steps");
}

fn nef_part(f: DivisorClass, neg: &NegSet) -> Option<DivisorClass> {
    let mut cur = f;
    for _ in 0..MAX_REDUCTION_STEPS {
        if cur.degree() < 0 {
            return None;
        }
        match neg.classes().iter().find(|c| cur.dot(c) < 0) {
            Some(&c) => cur = cur - c,
            None => return Some(cur),
        }
    }
    panic!("reduction of {f} did not terminate within {MAX_REDUCTION_STEPS} steps");
}

pub fn h0(f: DivisorClass, neg: &NegSet) -> i64 {
    nef_part(f, neg).map_or(0, chi)
}

/// `h0 - chi`, valid when `h2` vanishes (degree at least -2).
pub fn h1(f: DivisorClass, neg: &NegSet) -> Result<i64> {
    if f.degree() < -2 {
        return Err(Error::DegreeTooLow(f));
    }
    let v = h0(f, neg) - chi(f);
    if v < 0 {
        return Err(Error::Internal(format!("negative h1 for {f}")));
    }
    Ok(v)
}

/// Memoizing wrapper around [`h0`] for repeated queries on one surface.
#[derive(Debug)]
pub struct H0Cache<'a> {
    neg: &'a NegSet,
    memo: HashMap<DivisorClass, i64>,
}

impl<'a> H0Cache<'a> {
    pub fn new(neg: &'a NegSet) -> Self {
        H0Cache { neg, memo: HashMap::new() }
    }

    pub fn neg(&self) -> &'a NegSet {
        self.neg
    }

    pub fn h0(&mut self, f: DivisorClass) -> i64 {
        if f.degree() < 0 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&f) {
            return v;
        }
        let v = h0(f, self.neg);
        self.memo.insert(f, v);
        v
    }

    pub fn h1(&mut self, f: DivisorClass) -> i64 {
        assert!(f.degree() >= -2, "h1 requested for {f} of degree below -2");
        self.h0(f) - chi(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSet {
    pub raw: Vec<DivisorClass>,
    pub pared: Vec<DivisorClass>,
}

/// Removes every class that is a sum of two (possibly equal) members,
/// repeating until nothing changes.
pub fn pare(raw: &[DivisorClass]) -> Vec<DivisorClass> {
    let mut cur: Vec<DivisorClass> = raw.to_vec();
    cur.sort();
    cur.dedup();
    loop {
        let members: HashSet<DivisorClass> = cur.iter().copied().collect();
        let sums: HashSet<DivisorClass> = cur
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, a)| {
                let members = &members;
                cur[i..].iter().map(move |b| *a + *b).filter(move |s| members.contains(s))
            })
            .collect();
        if sums.is_empty() {
            return cur;
        }
        cur.retain(|c| !sums.contains(c));
    }
}

/// Nef members of the 1279-element set, and the result of paring them.
pub fn nef_generators(neg: &NegSet) -> Result<GeneratorSet> {
    if !anticanonical_nef(neg) {
        return Err(Error::AnticanonicalNotNef);
    }
    let raw: Vec<DivisorClass> = w6g().par_iter().copied().filter(|f| neg.is_nef(*f)).collect();
    let pared = pare(&raw);
    Ok(GeneratorSet { raw, pared })
}

fn representable(
    target: DivisorClass,
    parts: usize,
    gens: &[DivisorClass],
    neg: &NegSet,
    memo: &mut HashMap<(DivisorClass, usize), bool>,
) -> bool {
    if parts == 0 {
        return target.is_zero();
    }
    if target.degree() < 0 || !neg.is_nef(target) || target.is_zero() {
        return false;
    }
    if parts == 1 {
        return gens.binary_search(&target).is_ok();
    }
    if let Some(&v) = memo.get(&(target, parts)) {
        return v;
    }
    let v = gens
        .iter()
        .filter(|g| g.degree() <= target.degree())
        .any(|&g| representable(target - g, parts - 1, gens, neg, memo));
    memo.insert((target, parts), v);
    v
}

/// Members of `gens.pared` that are not a sum of 2..=bound pared generators.
pub fn gamma(neg: &NegSet, gens: &GeneratorSet, bound: usize) -> Vec<DivisorClass> {
    let mut memo = HashMap::new();
    gens.pared
        .iter()
        .copied()
        .filter(|&f| !(2..=bound).any(|k| representable(f, k, &gens.pared, neg, &mut memo)))
        .collect()
}

/// `19E0 - 6E1 - 5E2 - 4E3 - 3E4 - 2E5 - E6`, strictly decreasing along every
/// reduction step by a point, an `E_i - E_j`, a line through at most four
/// points, or a conic.
pub fn termination_weight() -> DivisorClass {
    DivisorClass::new([19, 6, 5, 4, 3, 2, 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{neg_from_distinct, neg_from_nodal, DistinctSpec};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn case_iv() -> NegSet {
        neg_from_distinct(&DistinctSpec::case("iv").unwrap()).unwrap()
    }

    fn z(t: i64) -> DivisorClass {
        DivisorClass::fat(t, &[2, 2, 6, 2, 2, 2])
    }

    #[test]
    fn example_nefness() {
        let neg = case_iv();
        assert!(is_nef(DivisorClass::basis(0), &neg));
        assert!(is_nef(DivisorClass::ZERO, &neg));
        assert!(!is_nef(z(7), &neg));
        assert!(z(7).dot(&DivisorClass::plane(1, &[3, 4])) < 0);
    }

    #[test]
    fn example_reduction() {
        let neg = case_iv();
        let r = reduce(z(7), &neg);
        assert!(r.effective);
        assert_eq!(r.nef_part, DivisorClass::plane(2, &[3, 4]));
        assert_eq!(r.fixed_sum(), DivisorClass::fat(5, &[2, 2, 5, 1, 2, 2]));
        let c1 = DivisorClass::plane(1, &[3, 4]);
        let c2 = DivisorClass::plane(1, &[1, 2, 3]);
        let c3 = DivisorClass::plane(1, &[3, 5, 6]);
        assert_eq!(r.fixed_part, BTreeMap::from([(c1, 1), (c2, 2), (c3, 2)]));
        assert!(!reduce(z(5), &neg).effective);
        let nef = DivisorClass::plane(3, &[1, 3, 3, 4, 5]);
        let r = reduce(nef, &neg);
        assert!(r.fixed_part.is_empty() && r.nef_part == nef);
    }

    #[test]
    fn example_hilbert_values() {
        let neg = case_iv();
        assert_eq!(h0(z(8), &neg), 11);
        assert_eq!(h0(z(10), &neg), 30);
        assert_eq!(h0(DivisorClass::ZERO, &neg), 1);
        assert!(h1(z(8), &neg).unwrap() > 0);
        assert_eq!(h1(z(9), &neg).unwrap(), 0);
        assert!(h1(DivisorClass::fat(-3, &[0; 6]), &neg).is_err());
    }

    #[test]
    fn case_iv_generators() {
        let g = nef_generators(&case_iv()).unwrap();
        assert_eq!(g.raw.len(), 212);
        assert_eq!(g.pared.len(), 39);
        assert!(g.pared.contains(&DivisorClass::basis(0)));
        let gam = gamma(&case_iv(), &g, 3);
        assert!(gam.iter().all(|c| g.pared.contains(c)));
        assert!(!gam.contains(&(2 * DivisorClass::basis(0))));
    }

    #[test]
    fn general_position_keeps_everything() {
        let g = nef_generators(&neg_from_nodal(&[]).unwrap()).unwrap();
        assert_eq!(g.raw.len(), 1279);
    }

    #[test]
    fn generators_require_nef_anticanonical() {
        let neg = neg_from_distinct(&DistinctSpec::new(vec![vec![1, 2, 3, 4]], false).unwrap()).unwrap();
        assert_eq!(nef_generators(&neg), Err(Error::AnticanonicalNotNef));
    }

    #[test]
    fn termination_weight_on_supported_shapes() {
        let a = termination_weight();
        let mut shapes = Vec::new();
        for i in 1..=6 {
            shapes.push(DivisorClass::basis(i));
            for j in i + 1..=6 {
                shapes.push(DivisorClass::basis(i) - DivisorClass::basis(j));
            }
        }
        for mask in 0u32..64 {
            let pts: Vec<usize> = (1..=6).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            if (2..=4).contains(&pts.len()) {
                shapes.push(DivisorClass::plane(1, &pts));
            }
            if pts.len() >= 5 {
                shapes.push(DivisorClass::plane(2, &pts));
            }
        }
        assert!(shapes.iter().all(|c| a.dot(c) >= 1));
        assert!(a.dot(&DivisorClass::plane(1, &[1, 2, 3, 4, 5])) < 1);
    }

    fn configurations() -> Vec<NegSet> {
        let mut out: Vec<NegSet> = ["i", "ii", "iii", "iv", "general", "conic"]
            .iter()
            .map(|c| neg_from_distinct(&DistinctSpec::case(c).unwrap()).unwrap())
            .collect();
        out.push(neg_from_nodal(&[DivisorClass::basis(1) - DivisorClass::basis(2)]).unwrap());
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduction_is_order_independent(
            t in 0i64..14,
            m in prop::array::uniform6(0i64..6),
            seed in any::<u64>(),
            which in 0usize..7,
        ) {
            let neg = &configurations()[which];
            let f = DivisorClass::fat(t, &m);
            let a = reduce(f, neg);
            let mut order = neg.classes().to_vec();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = reduce_in_order(f, &order);
            prop_assert_eq!(a.effective, b.effective);
            if a.effective {
                prop_assert_eq!(a.nef_part, b.nef_part);
                prop_assert_eq!(a.fixed_part, b.fixed_part);
            }
        }

        #[test]
        fn reduction_preserves_h0(t in 0i64..14, m in prop::array::uniform6(0i64..6), which in 0usize..7) {
            let neg = &configurations()[which];
            let r = reduce(DivisorClass::fat(t, &m), neg);
            let mut cur = DivisorClass::fat(t, &m);
            let base = h0(cur, neg);
            for c in r.trace {
                cur = cur - c;
                prop_assert_eq!(h0(cur, neg), base);
            }
        }

        #[test]
        fn h0_is_monotone_in_degree(t in -2i64..12, m in prop::array::uniform6(0i64..6), which in 0usize..7) {
            let neg = &configurations()[which];
            let f = DivisorClass::fat(t, &m);
            prop_assert!(h0(f + DivisorClass::basis(0), neg) >= h0(f, neg));
            prop_assert!(h1(f, neg).unwrap() >= 0);
        }

        #[test]
        fn nef_classes_have_no_h1(idx in 0usize..1279, which in 0usize..7) {
            let neg = &configurations()[which];
            let f = w6g()[idx];
            if neg.is_nef(f) {
                prop_assert_eq!(h0(f, neg), chi(f));
                prop_assert_eq!(h1(f, neg).unwrap(), 0);
            }
        }
    }
}
