//! Point configurations, their negative curves, and the Dynkin catalog.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{anticanonical_class, canonical_class, DivisorClass};
use crate::weyl::{exceptional_classes, is_positive_root, reflect};

/// Six distinct points described by their maximal collinear subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctSpec {
    pub collinear: Vec<Vec<usize>>,
    #[serde(default)]
    pub six_on_conic: bool,
}

impl DistinctSpec {
    pub fn new(collinear: Vec<Vec<usize>>, six_on_conic: bool) -> Result<Self> {
        let spec = DistinctSpec { collinear, six_on_conic };
        spec.validate()?;
        Ok(spec)
    }

    pub fn general() -> Self {
        DistinctSpec { collinear: Vec::new(), six_on_conic: false }
    }

    /// The configurations with three collinear points on one to four lines.
    pub fn case(name: &str) -> Result<Self> {
        let lines: &[&[usize]] = match name {
            "i" => &[&[1, 2, 3]],
            "ii" => &[&[1, 2, 3], &[1, 4, 5]],
            "iii" => &[&[1, 2, 3], &[1, 4, 5], &[3, 5, 6]],
            "iv" => &[&[1, 2, 3], &[1, 4, 5], &[3, 5, 6], &[2, 4, 6]],
            "general" => &[],
            "conic" => return DistinctSpec::new(Vec::new(), true),
            other => return Err(Error::InvalidConfig(format!("unknown case {other:?}"))),
        };
        DistinctSpec::new(lines.iter().map(|l| l.to_vec()).collect(), false)
    }

    pub fn validate(&self) -> Result<()> {
        let mut sets = Vec::new();
        for line in &self.collinear {
            let set: BTreeSet<usize> = line.iter().copied().collect();
            if set.len() != line.len() {
                return Err(Error::InvalidConfig(format!("collinear subset {line:?} repeats a point")));
            }
            if let Some(bad) = set.iter().find(|&&i| !(1..=6).contains(&i)) {
                return Err(Error::InvalidConfig(format!("point index {bad} outside 1..6")));
            }
            if set.len() < 3 {
                return Err(Error::InvalidConfig(format!(
                    "collinear subset {line:?} has fewer than 3 points"
                )));
            }
            if set.len() >= 5 {
                return Err(Error::InvalidConfig(format!(
                    "collinear subset {line:?} has 5 or more points"
                )));
            }
            sets.push(set);
        }
        for (a, sa) in sets.iter().enumerate() {
            for sb in &sets[a + 1..] {
                let shared = sa.intersection(sb).count();
                if shared >= 2 {
                    let word = |s: &BTreeSet<usize>| if s.len() == 3 { "triples" } else { "subsets" };
                    let kind = if word(sa) == word(sb) { word(sa) } else { "subsets" };
                    return Err(Error::InvalidConfig(format!(
                        "two collinear {kind} share {shared} points: {sa:?} and {sb:?}"
                    )));
                }
            }
        }
        if self.six_on_conic && !self.collinear.is_empty() {
            return Err(Error::InvalidConfig(
                "six points on an irreducible conic cannot have three collinear".into(),
            ));
        }
        Ok(())
    }

    fn on_common_line(&self, pts: &[usize]) -> bool {
        self.collinear.iter().any(|l| pts.iter().all(|p| l.contains(p)))
    }
}

/// Finite set of classes of prime divisors of negative self-intersection,
/// kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct NegSet {
    classes: Vec<DivisorClass>,
}

fn in_standard_shapes(c: DivisorClass) -> bool {
    let a = c.coeffs();
    let ones = a[1..].iter().filter(|&&x| x == 1).count();
    let zeros = a[1..].iter().filter(|&&x| x == 0).count();
    let minus = a[1..].iter().filter(|&&x| x == -1).count();
    match a[0] {
        0 => {
            if minus != 1 || ones + zeros + minus != 6 {
                return false;
            }
            let lead = a[1..].iter().position(|&x| x == -1).unwrap();
            a[1..=lead].iter().all(|&x| x != 1)
        }
        1 => ones >= 2 && ones + zeros == 6,
        2 => ones >= 5 && ones + zeros == 6,
        _ => false,
    }
}

impl NegSet {
    /// Validates the structural invariants: negative square, degree 0..=2,
    /// membership in the shapes `E_i`, `E_i - E_j - ...`, lines and conics,
    /// and nonnegative pairwise intersections.
    pub fn new(classes: impl IntoIterator<Item = DivisorClass>) -> Result<Self> {
        let set: BTreeSet<DivisorClass> = classes.into_iter().collect();
        let classes: Vec<DivisorClass> = set.into_iter().collect();
        for c in &classes {
            if c.square() >= 0 {
                return Err(Error::InvalidConfig(format!("{c} has nonnegative square")));
            }
            if !in_standard_shapes(*c) {
                return Err(Error::InvalidConfig(format!("{c} is not a point, vertical, line or conic class")));
            }
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if a.dot(b) < 0 {
                    return Err(Error::InvalidConfig(format!("{a} and {b} meet negatively")));
                }
            }
        }
        Ok(NegSet { classes })
    }

    pub fn classes(&self) -> &[DivisorClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn contains(&self, c: &DivisorClass) -> bool {
        self.classes.binary_search(c).is_ok()
    }

    pub fn nodal(&self) -> Vec<DivisorClass> {
        self.classes.iter().copied().filter(|c| c.square() == -2).collect()
    }

    pub fn exceptional(&self) -> Vec<DivisorClass> {
        self.classes.iter().copied().filter(|c| c.square() == -1).collect()
    }

    pub fn is_nef(&self, f: DivisorClass) -> bool {
        self.classes.iter().all(|c| f.dot(c) >= 0)
    }
}

pub fn neg_from_distinct(spec: &DistinctSpec) -> Result<NegSet> {
    spec.validate()?;
    let mut out: Vec<DivisorClass> = (1..=6).map(DivisorClass::basis).collect();
    for line in &spec.collinear {
        out.push(DivisorClass::plane(1, line));
    }
    for i in 1..=6 {
        for j in i + 1..=6 {
            if !spec.on_common_line(&[i, j]) {
                out.push(DivisorClass::plane(1, &[i, j]));
            }
        }
    }
    if spec.six_on_conic {
        out.push(DivisorClass::plane(2, &[1, 2, 3, 4, 5, 6]));
    } else {
        for skip in (1..=6).rev() {
            let t: Vec<usize> = (1..=6).filter(|&i| i != skip).collect();
            let has_triple = spec
                .collinear
                .iter()
                .any(|l| l.iter().filter(|p| t.contains(p)).count() >= 3);
            if !has_triple {
                out.push(DivisorClass::plane(2, &t));
            }
        }
    }
    NegSet::new(out)
}

fn validate_nodal(nodal: &[DivisorClass]) -> Result<()> {
    let k = canonical_class();
    for c in nodal {
        if c.square() != -2 || c.dot(&k) != 0 {
            return Err(Error::InvalidConfig(format!("{c} is not a root")));
        }
    }
    for (i, a) in nodal.iter().enumerate() {
        for b in &nodal[i + 1..] {
            if a == b {
                return Err(Error::InvalidConfig(format!("{a} listed twice")));
            }
            if a.dot(b) < 0 {
                return Err(Error::InvalidConfig(format!("{a} and {b} meet negatively")));
            }
        }
    }
    Ok(())
}

/// Nodal roots together with every exceptional class meeting them all
/// nonnegatively.
pub fn neg_from_nodal(nodal: &[DivisorClass]) -> Result<NegSet> {
    validate_nodal(nodal)?;
    let mut out = nodal.to_vec();
    out.extend(
        exceptional_classes()
            .iter()
            .copied()
            .filter(|e| nodal.iter().all(|n| e.dot(n) >= 0)),
    );
    NegSet::new(out)
}

pub fn anticanonical_nef(neg: &NegSet) -> bool {
    neg.is_nef(anticanonical_class())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub roots: Vec<DivisorClass>,
}

const CATALOG: [(&str, &[&str]); 20] = [
    ("A1", &["Q"]),
    ("2A1", &["Q", "E1-E2"]),
    ("A2", &["E0-E1-E2-E3", "E0-E4-E5-E6"]),
    ("3A1", &["Q", "E1-E2", "E3-E4"]),
    ("A1A2", &["Q", "E1-E2", "E2-E3"]),
    ("A3", &["E0-E1-E2-E3", "E0-E1-E4-E5", "E1-E6"]),
    ("4A1", &["Q", "E1-E2", "E3-E4", "E5-E6"]),
    ("2A1A2", &["Q", "E1-E2", "E3-E4", "E4-E5"]),
    ("A1A3", &["Q", "E1-E2", "E2-E3", "E3-E4"]),
    ("2A2", &["E0-E1-E2-E3", "E0-E4-E5-E6", "E1-E2", "E2-E3"]),
    ("A4", &["E0-E1-E2-E3", "E0-E1-E4-E5", "E1-E2", "E2-E6"]),
    ("D4", &["E0-E1-E3-E5", "E1-E2", "E3-E4", "E5-E6"]),
    ("A12A2", &["Q", "E1-E2", "E2-E3", "E4-E5", "E5-E6"]),
    ("2A1A3", &["Q", "E1-E2", "E3-E4", "E4-E5", "E5-E6"]),
    ("A1A4", &["Q", "E1-E2", "E2-E3", "E3-E4", "E4-E5"]),
    ("A5", &["E0-E1-E2-E3", "E0-E1-E4-E5", "E1-E2", "E2-E3", "E3-E6"]),
    ("D5", &["E0-E1-E3-E4", "E1-E2", "E3-E4", "E4-E5", "E5-E6"]),
    ("3A2", &["E0-E1-E2-E3", "E0-E4-E5-E6", "E1-E2", "E2-E3", "E4-E5", "E5-E6"]),
    ("A1A5", &["Q", "E1-E2", "E2-E3", "E3-E4", "E4-E5", "E5-E6"]),
    ("E6", &["E0-E1-E2-E3", "E1-E2", "E2-E3", "E3-E4", "E4-E5", "E5-E6"]),
];

fn catalog_class(s: &str) -> DivisorClass {
    if s == "Q" {
        DivisorClass::plane(2, &[1, 2, 3, 4, 5, 6])
    } else {
        s.parse().expect("catalog classes are well formed")
    }
}

/// The twenty types with their canonical nodal roots, in catalog order.
pub fn dynkin_catalog() -> Vec<CatalogEntry> {
    CATALOG
        .iter()
        .map(|(name, roots)| CatalogEntry {
            name,
            roots: roots.iter().map(|s| catalog_class(s)).collect(),
        })
        .collect()
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry> {
    dynkin_catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownType(name.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Component {
    A(usize),
    D(usize),
    E(usize),
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::A(n) => write!(f, "A{n}"),
            Component::D(n) => write!(f, "D{n}"),
            Component::E(n) => write!(f, "E{n}"),
        }
    }
}

fn classify_component(nodes: &[usize], adj: &[Vec<usize>]) -> Result<Component> {
    let n = nodes.len();
    let edges: usize = nodes.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges + 1 != n {
        return Err(Error::InvalidConfig("intersection graph contains a cycle".into()));
    }
    let branch: Vec<usize> = nodes.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
    if nodes.iter().any(|&v| adj[v].len() > 3) || branch.len() > 1 {
        return Err(Error::InvalidConfig("intersection graph is not of type A, D or E".into()));
    }
    let Some(&center) = branch.first() else {
        return Ok(Component::A(n));
    };
    let mut arms: Vec<usize> = adj[center]
        .iter()
        .map(|&start| {
            let (mut prev, mut cur, mut len) = (center, start, 1);
            while let Some(&next) = adj[cur].iter().find(|&&w| w != prev) {
                prev = cur;
                cur = next;
                len += 1;
            }
            len
        })
        .collect();
    arms.sort_unstable();
    match arms.as_slice() {
        [1, 1, _] => Ok(Component::D(n)),
        [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Ok(Component::E(n)),
        _ => Err(Error::InvalidConfig("intersection graph is not of type A, D or E".into())),
    }
}

/// Names the Dynkin type of a set of nodal roots, e.g. `2A1A3`.
pub fn dynkin_classify(nodal: &[DivisorClass]) -> Result<String> {
    validate_nodal(nodal)?;
    let n = nodal.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            match nodal[i].dot(&nodal[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                }
                v => {
                    return Err(Error::InvalidConfig(format!(
                        "{} and {} meet with multiplicity {v}",
                        nodal[i], nodal[j]
                    )))
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut counts: BTreeMap<Component, usize> = BTreeMap::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        *counts.entry(classify_component(&comp, &adj)?).or_default() += 1;
    }
    let mut name = String::new();
    for (c, k) in counts {
        if k > 1 {
            name.push_str(&k.to_string());
        }
        name.push_str(&c.to_string());
    }
    Ok(name)
}

fn sorted_tuple(v: &[DivisorClass]) -> Vec<DivisorClass> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Whether two root sets lie in the same W6-orbit (as sets).
pub fn w6_equivalent(a: &[DivisorClass], b: &[DivisorClass]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let target = sorted_tuple(b);
    let start = sorted_tuple(a);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            return true;
        }
        for i in 0..6 {
            let img: Vec<DivisorClass> = cur.iter().map(|&c| reflect(c, i).expect("index in range")).collect();
            let img = sorted_tuple(&img);
            if seen.insert(img.clone()) {
                queue.push_back(img);
            }
        }
    }
    false
}

/// Checks an explicit nodal list against the catalog and returns its type.
pub fn recognize_nodal(nodal: &[DivisorClass]) -> Result<String> {
    if let Some(c) = nodal.iter().find(|c| !is_positive_root(**c)) {
        return Err(Error::InvalidConfig(format!("{c} is not a positive root")));
    }
    let name = dynkin_classify(nodal)?;
    let entry = catalog_entry(&name)
        .map_err(|_| Error::InvalidConfig(format!("type {name} is not in the catalog")))?;
    if !w6_equivalent(nodal, &entry.roots) {
        return Err(Error::InvalidConfig(format!(
            "nodal roots of type {name} are not equivalent to the catalog configuration"
        )));
    }
    Ok(name)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PointConfiguration {
    Distinct(DistinctSpec),
    Dynkin { type_name: String, nodal: Vec<DivisorClass> },
}

impl PointConfiguration {
    pub fn distinct(spec: DistinctSpec) -> Result<Self> {
        spec.validate()?;
        Ok(PointConfiguration::Distinct(spec))
    }

    pub fn dynkin(type_name: &str) -> Result<Self> {
        let entry = catalog_entry(type_name)?;
        Ok(PointConfiguration::Dynkin {
            type_name: entry.name.to_string(),
            nodal: entry.roots,
        })
    }

    pub fn nodal(roots: Vec<DivisorClass>) -> Result<Self> {
        let type_name = recognize_nodal(&roots)?;
        Ok(PointConfiguration::Dynkin { type_name, nodal: roots })
    }

    pub fn neg(&self) -> Result<NegSet> {
        match self {
            PointConfiguration::Distinct(spec) => neg_from_distinct(spec),
            PointConfiguration::Dynkin { nodal, .. } => neg_from_nodal(nodal),
        }
    }

    pub fn is_distinct(&self) -> bool {
        matches!(self, PointConfiguration::Distinct(_))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("malformed config: {e}")))?;
        file.into_configuration()
    }
}

/// On-disk configuration schema.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConfigFile {
    Distinct {
        collinear: Vec<Vec<usize>>,
        #[serde(default)]
        six_on_conic: bool,
    },
    Dynkin {
        #[serde(rename = "type")]
        type_name: String,
    },
    Nodal {
        roots: Vec<DivisorClass>,
    },
}

impl ConfigFile {
    pub fn into_configuration(self) -> Result<PointConfiguration> {
        match self {
            ConfigFile::Distinct { collinear, six_on_conic } => {
                PointConfiguration::distinct(DistinctSpec { collinear, six_on_conic })
            }
            ConfigFile::Dynkin { type_name } => PointConfiguration::dynkin(&type_name),
            ConfigFile::Nodal { roots } => PointConfiguration::nodal(roots),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(d: i64, p: &[usize]) -> DivisorClass {
        DivisorClass::plane(d, p)
    }

    fn case_iv_roots() -> Vec<DivisorClass> {
        vec![cls(1, &[1, 2, 3]), cls(1, &[1, 4, 5]), cls(1, &[3, 5, 6]), cls(1, &[2, 4, 6])]
    }

    #[test]
    fn case_iv_neg() {
        let neg = neg_from_distinct(&DistinctSpec::case("iv").unwrap()).unwrap();
        let mut expected = case_iv_roots();
        expected.extend((1..=6).map(DivisorClass::basis));
        expected.extend([cls(1, &[3, 4]), cls(1, &[2, 5]), cls(1, &[1, 6])]);
        expected.sort();
        assert_eq!(neg.classes(), expected.as_slice());
        assert_eq!(neg_from_nodal(&case_iv_roots()).unwrap(), neg);
    }

    #[test]
    fn nodal_parts_of_distinct_cases() {
        let expect: [(&str, Vec<DivisorClass>); 4] = [
            ("i", vec![cls(1, &[1, 2, 3])]),
            ("ii", vec![cls(1, &[1, 2, 3]), cls(1, &[1, 4, 5])]),
            ("iii", vec![cls(1, &[1, 2, 3]), cls(1, &[1, 4, 5]), cls(1, &[3, 5, 6])]),
            ("iv", case_iv_roots()),
        ];
        for (name, mut roots) in expect {
            let neg = neg_from_distinct(&DistinctSpec::case(name).unwrap()).unwrap();
            roots.sort();
            assert_eq!(neg.nodal(), roots, "case {name}");
            assert_eq!(neg_from_nodal(&roots).unwrap(), neg, "case {name}");
        }
    }

    #[test]
    fn general_position_is_the_27_lines() {
        let neg = neg_from_distinct(&DistinctSpec::general()).unwrap();
        assert_eq!(neg.classes(), exceptional_classes());
        assert_eq!(neg_from_nodal(&[]).unwrap(), neg);
        assert!(anticanonical_nef(&neg));
    }

    #[test]
    fn vertical_a1_drops_e1() {
        let n = DivisorClass::basis(1) - DivisorClass::basis(2);
        let neg = neg_from_nodal(&[n]).unwrap();
        assert!(!neg.contains(&DivisorClass::basis(1)));
        let expected = exceptional_classes().iter().filter(|e| e.dot(&n) >= 0).count() + 1;
        assert_eq!(neg.len(), expected);
    }

    #[test]
    fn spec_validation_messages() {
        let err = DistinctSpec::new(vec![vec![1, 2, 3], vec![1, 2, 4]], false).unwrap_err();
        assert!(err.to_string().contains("two collinear triples share 2 points"));
        assert!(DistinctSpec::new(vec![vec![1, 2]], false).is_err());
        assert!(DistinctSpec::new(vec![vec![1, 2, 7]], false).is_err());
        assert!(DistinctSpec::new(vec![vec![1, 2, 3]], true).is_err());
        assert!(DistinctSpec::new(vec![vec![1, 2, 3, 4, 5]], false).is_err());
    }

    #[test]
    fn four_collinear_is_not_anticanonically_nef() {
        let neg = neg_from_distinct(&DistinctSpec::new(vec![vec![1, 2, 3, 4]], false).unwrap()).unwrap();
        assert!(neg.contains(&cls(1, &[1, 2, 3, 4])));
        assert!(!anticanonical_nef(&neg));
    }

    #[test]
    fn catalog_round_trip() {
        let cat = dynkin_catalog();
        assert_eq!(cat.len(), 20);
        for e in &cat {
            assert_eq!(dynkin_classify(&e.roots).unwrap(), e.name);
            assert!(anticanonical_nef(&neg_from_nodal(&e.roots).unwrap()), "{}", e.name);
        }
        let e6 = catalog_entry("E6").unwrap();
        assert_eq!(e6.roots[0], cls(1, &[1, 2, 3]));
        assert_eq!(catalog_entry("4A1").unwrap().roots[0], cls(2, &[1, 2, 3, 4, 5, 6]));
        assert!(catalog_entry("E7").is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(dynkin_classify(&case_iv_roots()).unwrap(), "4A1");
        assert_eq!(dynkin_classify(&[cls(1, &[1, 2, 3]), cls(1, &[4, 5, 6])]).unwrap(), "A2");
        assert_eq!(dynkin_classify(&[]).unwrap(), "");
    }

    #[test]
    fn explicit_nodal_lists() {
        let e = DivisorClass::basis;
        let cfg = PointConfiguration::nodal(vec![e(1) - e(2)]).unwrap();
        assert!(matches!(cfg, PointConfiguration::Dynkin { ref type_name, .. } if type_name == "A1"));
        assert!(PointConfiguration::nodal(vec![e(2) - e(1)]).is_err());
        assert_eq!(recognize_nodal(&case_iv_roots()).unwrap(), "4A1");
    }

    #[test]
    fn json_configs() {
        let cfg = PointConfiguration::from_json(
            r#"{"kind":"distinct","collinear":[[1,2,3],[1,4,5],[3,5,6],[2,4,6]],"six_on_conic":false}"#,
        )
        .unwrap();
        assert_eq!(cfg.neg().unwrap().len(), 13);
        let cfg = PointConfiguration::from_json(r#"{"kind":"dynkin","type":"4A1"}"#).unwrap();
        assert_eq!(cfg.neg().unwrap().nodal().len(), 4);
        let cfg = PointConfiguration::from_json(r#"{"kind":"nodal","roots":[[1,-1,-1,-1,0,0,0]]}"#).unwrap();
        assert!(matches!(cfg, PointConfiguration::Dynkin { ref type_name, .. } if type_name == "A1"));
        let err = PointConfiguration::from_json(r#"{"kind":"distinct","collinear":[[1,2,3],[2,3,4]]}"#).unwrap_err();
        assert!(err.to_string().contains("share 2 points"));
    }
}
