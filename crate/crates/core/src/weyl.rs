//! The Weyl group W(E6) acting on the class lattice by reflections in the
//! six simple roots.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{canonical_class, DivisorClass};

pub const DEFAULT_ORBIT_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Root {
    pub class: DivisorClass,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootList {
    pub roots: Vec<Root>,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn classes(&self) -> Vec<DivisorClass> {
        self.roots.iter().map(|r| r.class).collect()
    }

    pub fn positive(&self) -> Vec<DivisorClass> {
        self.roots.iter().filter(|r| r.positive).map(|r| r.class).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSet {
    pub seed: DivisorClass,
    pub elements: Vec<DivisorClass>,
}

impl OrbitSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, c: &DivisorClass) -> bool {
        self.elements.binary_search(c).is_ok()
    }
}

const SIMPLE: [DivisorClass; 6] = [
    DivisorClass::new([1, 1, 1, 1, 0, 0, 0]),
    DivisorClass::new([0, -1, 1, 0, 0, 0, 0]),
    DivisorClass::new([0, 0, -1, 1, 0, 0, 0]),
    DivisorClass::new([0, 0, 0, -1, 1, 0, 0]),
    DivisorClass::new([0, 0, 0, 0, -1, 1, 0]),
    DivisorClass::new([0, 0, 0, 0, 0, -1, 1]),
];

/// `r0 = E0-E1-E2-E3` and `r_i = E_i - E_{i+1}`.
pub fn simple_roots() -> RootList {
    RootList {
        roots: SIMPLE.iter().map(|&class| Root { class, positive: true }).collect(),
    }
}

fn reflect_unchecked(x: DivisorClass, i: usize) -> DivisorClass {
    let r = SIMPLE[i];
    x + x.dot(&r) * r
}

/// `s_i(x) = x + (x.r_i) r_i`.
pub fn reflect(x: DivisorClass, i: usize) -> Result<DivisorClass> {
    if i >= SIMPLE.len() {
        return Err(Error::RootIndex(i));
    }
    Ok(reflect_unchecked(x, i))
}

pub fn orbit(seed: DivisorClass) -> Result<OrbitSet> {
    orbit_with_cap(seed, DEFAULT_ORBIT_CAP)
}

/// Breadth-first closure of `{seed}` under the six reflections.
pub fn orbit_with_cap(seed: DivisorClass, cap: usize) -> Result<OrbitSet> {
    let mut seen = HashSet::from([seed]);
    let mut frontier = vec![seed];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in frontier {
            for i in 0..SIMPLE.len() {
                let y = reflect_unchecked(x, i);
                if seen.insert(y) {
                    if seen.len() > cap {
                        return Err(Error::OrbitCap { seed, cap });
                    }
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    let mut elements: Vec<_> = seen.into_iter().collect();
    elements.sort();
    Ok(OrbitSet { seed, elements })
}

/// Coordinates of a class of `K^perp` in the simple-root basis, or `None`
/// when the class is not an integral combination of simple roots.
pub fn simple_root_coordinates(x: DivisorClass) -> Option<[i64; 6]> {
    let a = x.coeffs();
    let c0 = a[0];
    let c1 = c0 - a[1];
    let c2 = c0 + c1 - a[2];
    let c3 = c0 + c2 - a[3];
    let c4 = c3 - a[4];
    let c5 = c4 - a[5];
    if a[6] != c5 {
        return None;
    }
    Some([c0, c1, c2, c3, c4, c5])
}

pub fn is_positive_root(x: DivisorClass) -> bool {
    x.square() == -2
        && x.dot(&canonical_class()) == 0
        && simple_root_coordinates(x).is_some_and(|c| c.iter().all(|&v| v >= 0))
}

/// All 72 classes with `C^2 = -2`, `C.K = 0`, tagged by sign.
pub fn all_roots() -> RootList {
    static CACHE: OnceLock<RootList> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            let orb = orbit(SIMPLE[0]).expect("root orbit is finite");
            RootList {
                roots: orb
                    .elements
                    .into_iter()
                    .map(|class| Root { class, positive: is_positive_root(class) })
                    .collect(),
            }
        })
        .clone()
}

/// The 27 classes with `C^2 = -1`, `C.K = -1`.
pub fn exceptional_classes() -> &'static [DivisorClass] {
    static CACHE: OnceLock<Vec<DivisorClass>> = OnceLock::new();
    CACHE.get_or_init(|| {
        orbit(DivisorClass::basis(1))
            .expect("exceptional orbit is finite")
            .elements
    })
}

/// The seven seeds `E0, E0-E1, 2E0-E1-E2, 3E0-E1-E2-E3, 3E0-E1-..-E4,
/// 3E0-E1-..-E5, -K`.
pub fn g_seeds() -> [DivisorClass; 7] {
    [
        DivisorClass::plane(1, &[]),
        DivisorClass::plane(1, &[1]),
        DivisorClass::plane(2, &[1, 2]),
        DivisorClass::plane(3, &[1, 2, 3]),
        DivisorClass::plane(3, &[1, 2, 3, 4]),
        DivisorClass::plane(3, &[1, 2, 3, 4, 5]),
        DivisorClass::plane(3, &[1, 2, 3, 4, 5, 6]),
    ]
}

/// The W6-orbits of the seeds, in seed order.
pub fn g_orbits() -> &'static [OrbitSet] {
    static CACHE: OnceLock<Vec<OrbitSet>> = OnceLock::new();
    CACHE.get_or_init(|| {
        g_seeds()
            .iter()
            .map(|&g| orbit(g).expect("seed orbits are finite"))
            .collect()
    })
}

/// The sorted union of the seed orbits (1279 classes).
pub fn w6g() -> &'static [DivisorClass] {
    static CACHE: OnceLock<Vec<DivisorClass>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let set: BTreeSet<DivisorClass> = g_orbits()
            .iter()
            .flat_map(|o| o.elements.iter().copied())
            .collect();
        set.into_iter().collect()
    })
}

/// The 72 classes `H` with `H^2 = 1`, `-K.H = 3`.
pub fn plane_models() -> &'static [DivisorClass] {
    &g_orbits()[0].elements
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::intersect;
    use proptest::prelude::*;

    fn cls(d: i64, pts: &[usize]) -> DivisorClass {
        DivisorClass::plane(d, pts)
    }

    #[test]
    fn simple_root_list() {
        let s = simple_roots().classes();
        assert_eq!(s[0], cls(1, &[1, 2, 3]));
        assert_eq!(s[3], DivisorClass::basis(3) - DivisorClass::basis(4));
        assert!(s.iter().all(|r| r.square() == -2));
    }

    #[test]
    fn worked_reflections() {
        let e = DivisorClass::basis;
        assert_eq!(reflect(e(1), 0).unwrap(), cls(1, &[2, 3]));
        let x = reflect(reflect(e(3) - e(4), 0).unwrap(), 3).unwrap();
        assert_eq!(x, cls(1, &[1, 2, 3]));
        for i in 0..6 {
            assert_eq!(reflect(canonical_class(), i).unwrap(), canonical_class());
        }
        assert_eq!(reflect(e(0), 6), Err(Error::RootIndex(6)));
    }

    #[test]
    fn orbit_sizes() {
        let sizes: Vec<usize> = g_orbits().iter().map(|o| o.len()).collect();
        assert_eq!(sizes, vec![72, 27, 216, 720, 216, 27, 1]);
        assert_eq!(w6g().len(), 1279);
        assert_eq!(orbit(-canonical_class()).unwrap().elements, vec![-canonical_class()]);
    }

    #[test]
    fn orbit_cap_is_enforced() {
        let err = orbit_with_cap(DivisorClass::basis(0), 10).unwrap_err();
        assert!(matches!(err, Error::OrbitCap { cap: 10, .. }));
    }

    #[test]
    fn roots_and_lines() {
        let roots = all_roots();
        assert_eq!(roots.len(), 72);
        assert_eq!(roots.positive().len(), 36);
        assert!(is_positive_root(cls(1, &[1, 2, 3])));
        let ex = exceptional_classes();
        assert_eq!(ex.len(), 27);
        assert!(ex.contains(&cls(1, &[1, 2])));
        assert!(ex.iter().all(|c| c.dot(&-canonical_class()) == 1));
    }

    fn small_class() -> impl Strategy<Value = DivisorClass> {
        prop::array::uniform7(-6i64..=6).prop_map(DivisorClass::new)
    }

    proptest! {
        #[test]
        fn reflections_are_involutions(x in small_class(), i in 0usize..6) {
            prop_assert_eq!(reflect(reflect(x, i).unwrap(), i).unwrap(), x);
        }

        #[test]
        fn reflections_are_isometries(x in small_class(), y in small_class(), i in 0usize..6) {
            let (a, b) = (reflect(x, i).unwrap(), reflect(y, i).unwrap());
            prop_assert_eq!(intersect(a, b), intersect(x, y));
            prop_assert_eq!(a.dot(&canonical_class()), x.dot(&canonical_class()));
        }

        #[test]
        fn simple_reflections_permute_other_positive_roots(idx in 0usize..36, i in 0usize..6) {
            let r = all_roots().positive()[idx];
            prop_assume!(r != SIMPLE[i]);
            prop_assert!(is_positive_root(reflect(r, i).unwrap()));
        }
    }

    #[test]
    fn orbits_preserve_invariants() {
        for o in g_orbits() {
            let (sq, kd) = (o.seed.square(), o.seed.dot(&canonical_class()));
            assert!(o.elements.iter().all(|c| c.square() == sq && c.dot(&canonical_class()) == kd));
            assert!(o.contains(&o.seed));
        }
    }
}
