//! Maximal-rank certificates for the multiplication maps
//! `H0(F) (x) H0(E0) -> H0(F + E0)` on nef classes, the chains of classes
//! that escape the cheap certificates, and the change of plane model.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{anticanonical_nef, NegSet};
use crate::cones::{h0, h1, nef_generators, reduce, GeneratorSet};
use crate::error::{Error, Result};
use crate::lattice::{chi, DivisorClass};
use crate::oracle::{mu_rank_direct, mu_rank_exact, realize, realizes, Realization, DEFAULT_SEED};
use crate::weyl::{exceptional_classes, plane_models, w6g};

pub const DEFAULT_DEPTH: usize = 6;
pub const REALIZATION_ATTEMPTS: usize = 20;

fn e(i: usize) -> DivisorClass {
    DivisorClass::basis(i)
}

/// Least index among the points of largest multiplicity.
pub fn index_rule(f: DivisorClass) -> usize {
    let c = f.coeffs();
    let mut best = 1;
    for i in 2..=6 {
        if c[i] > c[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuBounds {
    pub index: usize,
    pub q: i64,
    pub l: i64,
    pub q_star: i64,
    pub l_star: i64,
    pub h: i64,
    pub h_next: i64,
    pub expected_ker: i64,
    pub expected_cok: i64,
}

fn bounds_at(f: DivisorClass, j: usize, neg: &NegSet) -> MuBounds {
    let a = f - e(j);
    let b = f - (e(0) - e(j));
    let (q, l) = (h0(a, neg), h0(b, neg));
    let h = h0(f, neg);
    let h_next = h0(f + e(0), neg);
    MuBounds {
        index: j,
        q,
        l,
        q_star: q - chi(a),
        l_star: l - chi(b),
        h,
        h_next,
        expected_ker: (3 * h - h_next).max(0),
        expected_cok: (h_next - 3 * h).max(0),
    }
}

/// `q = h0(F - E_j)`, `l = h0(F - (E0 - E_j))` and the matching `h1`
/// values, with `j` from [`index_rule`] or `j = 1`.
pub fn ql_bounds(f: DivisorClass, neg: &NegSet, e0_index_rule: bool) -> Result<MuBounds> {
    if h0(f, neg) == 0 {
        return Err(Error::NotEffective(f));
    }
    let j = if e0_index_rule { index_rule(f) } else { 1 };
    Ok(bounds_at(f, j, neg))
}

/// Whether some `q`, `l` vanishes or some `q*`, `l*` is positive.
pub fn fails_cheap_test(f: DivisorClass, neg: &NegSet) -> bool {
    let b = bounds_at(f, index_rule(f), neg);
    b.q == 0 || b.l == 0 || b.q_star > 0 || b.l_star > 0
}

/// Points of the plane model, i.e. `j` with no `E_i - E_j` effective.
pub fn proper_points(neg: &NegSet) -> Vec<usize> {
    (1..=6)
        .filter(|&j| (1..=6).all(|i| i == j || h0(e(i) - e(j), neg) == 0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Surjective,
    Injective,
    MaximalRank,
    Inconclusive,
}

impl Status {
    pub fn is_surjective(self) -> bool {
        matches!(self, Status::Surjective | Status::MaximalRank)
    }

    pub fn is_injective(self) -> bool {
        matches!(self, Status::Injective | Status::MaximalRank)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Surjective => "surjective",
            Status::Injective => "injective",
            Status::MaximalRank => "maximal-rank",
            Status::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Reason {
    ZeroClass,
    /// `q* + l* = 0` bounds the cokernel by zero.
    CokernelBound { point: usize },
    /// `q + l = 0` bounds the kernel by zero.
    KernelBound { point: usize },
    /// A nef summand passing the cheap test forces surjectivity of the sum.
    GoodSummand { good: DivisorClass, rest: DivisorClass },
    /// Adding a smooth rational curve `C` with `C^2 >= 0` and
    /// `(F + C).C >= max(C.E_j, C.(E0 - E_j))` to a surjective class.
    CurveStep { base: DivisorClass, curve: DivisorClass, point: usize },
    /// Adding a smooth rational curve of degree at most 2 with
    /// `(F + C).C >= 0`; the restriction of linear forms to such a curve is
    /// complete, so the restricted multiplication map is onto.
    RestrictedCurveStep { base: DivisorClass, curve: DivisorClass },
    /// All six points lie on a conic, where surjectivity on nef classes is
    /// a known external result.
    PointsOnConic,
    /// Direct rank computation on an explicit realization of the surface.
    Oracle { ker: usize, cok: usize },
    None,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::ZeroClass => write!(f, "zero class"),
            Reason::CokernelBound { point } => write!(f, "qstar+lstar=0 (j={point})"),
            Reason::KernelBound { point } => write!(f, "l=q=0 (j={point})"),
            Reason::GoodSummand { good, rest } => {
                write!(f, "good summand {} + {}", good.algebraic(), rest.algebraic())
            }
            Reason::CurveStep { base, curve, point } => write!(
                f,
                "curve step from {} along {} (j={point})",
                base.algebraic(),
                curve.algebraic()
            ),
            Reason::RestrictedCurveStep { base, curve } => write!(
                f,
                "restricted curve step from {} along {}",
                base.algebraic(),
                curve.algebraic()
            ),
            Reason::PointsOnConic => write!(f, "points on a conic (external)"),
            Reason::Oracle { ker, cok } => write!(f, "oracle (ker {ker}, cok {cok})"),
            Reason::None => write!(f, "no certificate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub class: DivisorClass,
    pub status: Status,
    pub reason: Reason,
}

impl Certificate {
    pub fn is_conclusive(&self) -> bool {
        self.status != Status::Inconclusive
    }

    /// Whether the certificate rests on the restricted curve step somewhere
    /// in its derivation is tracked by the verifier; this only looks at the
    /// last step.
    pub fn uses_restricted_step(&self) -> bool {
        matches!(self.reason, Reason::RestrictedCurveStep { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SChain {
    /// `levels[0]` is the first level.
    pub levels: Vec<Vec<DivisorClass>>,
}

impl SChain {
    pub fn level(&self, i: usize) -> &[DivisorClass] {
        &self.levels[i - 1]
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilization {
    pub j: usize,
    pub k: usize,
    pub witness: BTreeMap<DivisorClass, DivisorClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub j: usize,
    pub k: usize,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationSearch {
    pub found: Option<Stabilization>,
    pub attempts: Vec<Attempt>,
}

/// Checks the stabilization hypotheses at one `(j, k)`: each `F` in level `j`
/// has exactly one `C` in level 1 with `F + kC` in level `j + k`; the
/// resulting families fill levels `j + 1..=j + k` exactly and stay inside
/// every computed level.
pub fn check_stabilization(chain: &SChain, j: usize, k: usize) -> std::result::Result<Stabilization, String> {
    if j == 0 || k == 0 || j + k + 1 > chain.depth() {
        return Err(format!("chain depth {} too small", chain.depth()));
    }
    let sets: Vec<BTreeSet<DivisorClass>> =
        chain.levels.iter().map(|l| l.iter().copied().collect()).collect();
    let level = |i: usize| &sets[i - 1];
    let mut witness = BTreeMap::new();
    for &f in chain.level(j) {
        let cands: Vec<DivisorClass> = chain
            .level(1)
            .iter()
            .copied()
            .filter(|&c| level(j + k).contains(&(f + k as i64 * c)))
            .collect();
        if cands.len() != 1 {
            return Err(format!("{} has {} candidate curves", f.algebraic(), cands.len()));
        }
        witness.insert(f, cands[0]);
    }
    for i in 1..=chain.depth() - j {
        let fam: BTreeSet<DivisorClass> = witness.iter().map(|(&f, &c)| f + i as i64 * c).collect();
        if !fam.is_subset(level(j + i)) {
            return Err(format!("family leaves level {}", j + i));
        }
        if i <= k && &fam != level(j + i) {
            return Err(format!(
                "level {} has {} classes but the families give {}",
                j + i,
                level(j + i).len(),
                fam.len()
            ));
        }
    }
    Ok(Stabilization { j, k, witness })
}

/// Tries `j = 1..=3`, `k = 1..=2` in that order.
pub fn find_stabilization(chain: &SChain) -> StabilizationSearch {
    let mut attempts = Vec::new();
    for j in 1..=3 {
        for k in 1..=2 {
            match check_stabilization(chain, j, k) {
                Ok(s) => {
                    attempts.push(Attempt { j, k, outcome: "ok".into() });
                    return StabilizationSearch { found: Some(s), attempts };
                }
                Err(why) => attempts.push(Attempt { j, k, outcome: why }),
            }
        }
    }
    StabilizationSearch { found: None, attempts }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FamilyReason {
    /// `q*` and `l*` stay zero: the fixed parts of `F + iC - E_j` and
    /// `F + iC - (E0 - E_j)` are orthogonal to `C`.
    CokernelBound { point: usize },
    /// A good summand of one member is a good summand of every later one.
    GoodSummand { good: DivisorClass },
    /// `F + iC` surjective for all larger `i` by repeated curve steps; the
    /// inequality only improves since `C^2 >= 0`.
    CurveInduction { point: usize },
    RestrictedCurveInduction,
    PointsOnConic,
    /// `C^2 = 0` and `C` meets `F - E_j` and `F - (E0 - E_j)` negatively, so
    /// `q` and `l` vanish along the whole family.
    KernelBound { point: usize },
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyCertificate {
    pub base: DivisorClass,
    pub step: DivisorClass,
    /// Members `base + i*step` with `i >= from` are covered.
    pub from: usize,
    pub status: Status,
    pub reason: FamilyReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub neg: Vec<DivisorClass>,
    pub proper_points: Vec<usize>,
    pub raw_generators: usize,
    pub generators: Vec<Certificate>,
    pub chain_sizes: Vec<usize>,
    pub members: Vec<(usize, Certificate)>,
    pub stabilization: StabilizationSearch,
    pub families: Vec<FamilyCertificate>,
    /// Classes whose certificate depends on a restricted curve step.
    pub restricted_steps: usize,
    /// Classes and families settled only by the conic fallback.
    pub external: usize,
    /// Classes settled by direct computation on an explicit realization.
    pub oracle: usize,
}

impl VerificationReport {
    pub fn inconclusive(&self) -> usize {
        let g = self.generators.iter().filter(|c| !c.is_conclusive()).count();
        let m = self.members.iter().filter(|(_, c)| !c.is_conclusive()).count();
        let f = self.families.iter().filter(|c| c.status == Status::Inconclusive).count();
        g + m + f + usize::from(self.stabilization.found.is_none())
    }

    pub fn is_verified(&self) -> bool {
        self.inconclusive() == 0
    }
}

/// Certification engine for one surface in one plane model.
#[derive(Debug)]
pub struct Verifier {
    neg: NegSet,
    gens: GeneratorSet,
    proper: Vec<usize>,
    curves: Vec<DivisorClass>,
    restricted_curves: Vec<DivisorClass>,
    certs: HashMap<DivisorClass, Option<Certificate>>,
    restricted: HashMap<DivisorClass, bool>,
    on_conic: bool,
    realization: Option<Option<Realization>>,
}

impl Verifier {
    pub fn new(neg: NegSet) -> Result<Self> {
        if !anticanonical_nef(&neg) {
            return Err(Error::AnticanonicalNotNef);
        }
        let gens = nef_generators(&neg)?;
        let proper = proper_points(&neg);
        let curves: Vec<DivisorClass> =
            w6g().iter().copied().filter(|c| c.genus() == 0 && neg.is_nef(*c)).collect();
        let mut restricted_curves: Vec<DivisorClass> =
            curves.iter().copied().filter(|c| c.degree() <= 2).collect();
        restricted_curves.extend(neg.classes().iter().copied());
        let on_conic = h0(DivisorClass::plane(2, &[1, 2, 3, 4, 5, 6]), &neg) > 0;
        Ok(Verifier {
            realization: None,
            on_conic,
            neg,
            gens,
            proper,
            curves,
            restricted_curves,
            certs: HashMap::new(),
            restricted: HashMap::new(),
        })
    }

    pub fn neg(&self) -> &NegSet {
        &self.neg
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn proper_points(&self) -> &[usize] {
        &self.proper
    }

    pub fn points_on_conic(&self) -> bool {
        self.on_conic
    }

    /// Uses `r` for the oracle fallback instead of searching for one.
    pub fn with_realization(mut self, r: Realization) -> Result<Self> {
        if !realizes(&r, &self.neg) {
            return Err(Error::InvalidConfig("realization does not have these negative curves".into()));
        }
        self.realization = Some(Some(r));
        Ok(self)
    }

    pub fn realization(&mut self) -> Option<&Realization> {
        if self.realization.is_none() {
            self.realization = Some(realize(&self.neg, DEFAULT_SEED, REALIZATION_ATTEMPTS));
        }
        self.realization.as_ref().and_then(Option::as_ref)
    }

    fn oracle(&mut self, f: DivisorClass) -> Option<Certificate> {
        let (h, h_next) = (h0(f, &self.neg), h0(f + e(0), &self.neg));
        let r = self.realization()?;
        let k = f.coeffs();
        let m: [i64; 6] = std::array::from_fn(|i| k[i + 1]);
        let mut mu = mu_rank_direct(r, &m, k[0]);
        if mu.dim as i64 != h || mu.dim_next as i64 != h_next {
            mu = mu_rank_exact(r, &m, k[0]);
        }
        let status = match (mu.ker, mu.cok) {
            (0, 0) => Status::MaximalRank,
            (_, 0) => Status::Surjective,
            (0, _) => Status::Injective,
            _ => Status::Inconclusive,
        };
        Some(Certificate { class: f, status, reason: Reason::Oracle { ker: mu.ker, cok: mu.cok } })
    }

    pub fn bounds(&self, f: DivisorClass, j: usize) -> MuBounds {
        bounds_at(f, j, &self.neg)
    }

    pub fn s_chain(&self, depth: usize) -> SChain {
        let neg = &self.neg;
        let first: Vec<DivisorClass> =
            self.gens.pared.par_iter().copied().filter(|f| fails_cheap_test(*f, neg)).collect();
        let mut levels = vec![first];
        while levels.len() < depth {
            let last = levels.last().expect("at least one level");
            let sums: BTreeSet<DivisorClass> =
                last.iter().flat_map(|&a| levels[0].iter().map(move |&b| a + b)).collect();
            let sums: Vec<DivisorClass> = sums.into_iter().collect();
            let next: Vec<DivisorClass> =
                sums.par_iter().copied().filter(|f| fails_cheap_test(*f, neg)).collect();
            levels.push(next);
        }
        SChain { levels }
    }

    fn cheap(&self, f: DivisorClass) -> Option<Certificate> {
        let first = index_rule(f);
        let mut points = vec![first];
        points.extend(self.proper.iter().copied().filter(|&p| p != first));
        let mut injective = None;
        for j in points {
            let b = self.bounds(f, j);
            if b.q_star + b.l_star == 0 {
                return Some(Certificate { class: f, status: Status::Surjective, reason: Reason::CokernelBound { point: j } });
            }
            if b.q + b.l == 0 && injective.is_none() {
                injective = Some(Certificate { class: f, status: Status::Injective, reason: Reason::KernelBound { point: j } });
            }
        }
        injective
    }

    fn curve_step_point(&self, f: DivisorClass, c: DivisorClass) -> Option<usize> {
        let lhs = f.dot(&c);
        self.proper
            .iter()
            .copied()
            .find(|&j| lhs >= c.dot(&e(j)).max(c.dot(&(e(0) - e(j)))))
    }

    fn surjective_base(&mut self, base: DivisorClass) -> bool {
        base.degree() >= 0
            && self.neg.is_nef(base)
            && matches!(self.certify(base), Ok(c) if c.status.is_surjective())
    }

    /// Certificate search: cheap bounds, a good nef summand, a curve step,
    /// then a restricted curve step.
    pub fn certify(&mut self, f: DivisorClass) -> Result<Certificate> {
        if !self.neg.is_nef(f) {
            return Err(Error::NotNef(f));
        }
        if let Some(hit) = self.certs.get(&f) {
            return Ok(hit.clone().unwrap_or(Certificate { class: f, status: Status::Inconclusive, reason: Reason::None }));
        }
        self.certs.insert(f, None);
        let cert = self.search(f);
        let restricted = match &cert.reason {
            Reason::RestrictedCurveStep { .. } => true,
            Reason::CurveStep { base, .. } => self.restricted.get(base).copied().unwrap_or(false),
            _ => false,
        };
        self.restricted.insert(f, restricted);
        let keep = if cert.is_conclusive() { Some(cert.clone()) } else { None };
        self.certs.insert(f, keep);
        Ok(cert)
    }

    /// Whether the stored certificate of `f` relies on a restricted step.
    pub fn relies_on_restricted_step(&self, f: DivisorClass) -> bool {
        self.restricted.get(&f).copied().unwrap_or(false)
    }

    fn search(&mut self, f: DivisorClass) -> Certificate {
        if f.is_zero() {
            return Certificate { class: f, status: Status::Injective, reason: Reason::ZeroClass };
        }
        let cheap = self.cheap(f);
        if let Some(c) = &cheap {
            if c.status == Status::Surjective {
                return c.clone();
            }
        }
        for i in 0..self.gens.pared.len() {
            let p = self.gens.pared[i];
            let rest = f - p;
            if rest.degree() < 0 || !self.neg.is_nef(rest) {
                continue;
            }
            for (good, other) in [(p, rest), (rest, p)] {
                if !good.is_zero() && !fails_cheap_test(good, &self.neg) {
                    return Certificate {
                        class: f,
                        status: Status::Surjective,
                        reason: Reason::GoodSummand { good, rest: other },
                    };
                }
            }
        }
        for i in 0..self.curves.len() {
            let c = self.curves[i];
            if let Some(point) = self.curve_step_point(f, c) {
                let base = f - c;
                if self.surjective_base(base) {
                    return Certificate { class: f, status: Status::Surjective, reason: Reason::CurveStep { base, curve: c, point } };
                }
            }
        }
        for i in 0..self.restricted_curves.len() {
            let c = self.restricted_curves[i];
            if f.dot(&c) >= 0 {
                let base = f - c;
                if self.surjective_base(base) {
                    return Certificate {
                        class: f,
                        status: Status::Surjective,
                        reason: Reason::RestrictedCurveStep { base, curve: c },
                    };
                }
            }
        }
        if let Some(c) = cheap {
            return c;
        }
        if self.on_conic {
            return Certificate { class: f, status: Status::Surjective, reason: Reason::PointsOnConic };
        }
        if let Some(c) = self.oracle(f) {
            return c;
        }
        Certificate { class: f, status: Status::Inconclusive, reason: Reason::None }
    }

    fn certify_family(&mut self, base: DivisorClass, step: DivisorClass, from: usize) -> FamilyCertificate {
        let last = base + (from as i64 - 1) * step;
        let first_new = last + step;
        let last_cert = self.certify(last).ok();
        let surjective_last = matches!(&last_cert, Some(c) if c.status.is_surjective());
        let mk = |status, reason| FamilyCertificate { base, step, from, status, reason };
        if let Some(Certificate { reason: Reason::GoodSummand { good, .. }, .. }) = last_cert {
            return mk(Status::Surjective, FamilyReason::GoodSummand { good });
        }
        if self.neg.is_nef(step) && step.square() >= 0 {
            let point = self.proper.iter().copied().find(|&j| {
                h1_vanishes_along(first_new - e(j), step, &self.neg)
                    && h1_vanishes_along(first_new - (e(0) - e(j)), step, &self.neg)
            });
            if let Some(point) = point {
                return mk(Status::Surjective, FamilyReason::CokernelBound { point });
            }
        }
        if surjective_last && step.genus() == 0 && self.neg.is_nef(step) {
            if let Some(point) = self.curve_step_point(first_new, step) {
                return mk(Status::Surjective, FamilyReason::CurveInduction { point });
            }
            if step.degree() <= 2 && first_new.dot(&step) >= 0 {
                return mk(Status::Surjective, FamilyReason::RestrictedCurveInduction);
            }
        }
        if step.square() == 0 && self.neg.is_nef(step) {
            let point = self.proper.iter().copied().find(|&j| {
                (base - e(j)).dot(&step) < 0 && (base - (e(0) - e(j))).dot(&step) < 0
            });
            if let Some(point) = point {
                return mk(Status::Injective, FamilyReason::KernelBound { point });
            }
        }
        if self.on_conic {
            return mk(Status::Surjective, FamilyReason::PointsOnConic);
        }
        mk(Status::Inconclusive, FamilyReason::None)
    }
}

/// Whether `h1(G + iC) = 0` for every `i >= 0`, for nef `C` with `C^2 >= 0`.
/// Holds when `h1(G) = 0` and either `G` reduces with a fixed part
/// orthogonal to `C`, or `C^2 = 0`, `G.C < 0` and `chi` is constant.
pub fn h1_vanishes_along(g: DivisorClass, c: DivisorClass, neg: &NegSet) -> bool {
    if g.degree() < -2 || !neg.is_nef(c) || c.square() < 0 || (h1(g, neg) != Ok(0)) {
        return false;
    }
    if g.dot(&c) < 0 {
        return c.square() == 0 && chi(g + c) == chi(g);
    }
    let r = reduce(g, neg);
    r.effective && r.fixed_part.keys().all(|n| n.dot(&c) == 0)
}

impl Verifier {
    /// Certifies every pared generator, every chain member, and every
    /// stabilized family beyond the computed depth.
    pub fn verify(&mut self, depth: usize) -> Result<VerificationReport> {
        let chain = self.s_chain(depth);
        let mut generators = Vec::new();
        for g in self.gens.pared.clone() {
            generators.push(self.certify(g)?);
        }
        let mut members = Vec::new();
        for (i, level) in chain.levels.iter().enumerate() {
            for &f in level {
                members.push((i + 1, self.certify(f)?));
            }
        }
        let stabilization = find_stabilization(&chain);
        let mut families = Vec::new();
        if let Some(s) = &stabilization.found {
            let from = chain.depth() - s.j + 1;
            for (&f, &c) in &s.witness {
                families.push(self.certify_family(f, c, from));
            }
        }
        let restricted_steps = generators
            .iter()
            .map(|c| c.class)
            .chain(members.iter().map(|(_, c)| c.class))
            .filter(|f| self.relies_on_restricted_step(*f))
            .count()
            + families
                .iter()
                .filter(|f| f.reason == FamilyReason::RestrictedCurveInduction)
                .count();
        let external = generators
            .iter()
            .chain(members.iter().map(|(_, c)| c))
            .filter(|c| c.reason == Reason::PointsOnConic)
            .count()
            + families.iter().filter(|f| f.reason == FamilyReason::PointsOnConic).count();
        let oracle = generators
            .iter()
            .chain(members.iter().map(|(_, c)| c))
            .filter(|c| matches!(c.reason, Reason::Oracle { .. }))
            .count();
        Ok(VerificationReport {
            oracle,
            external,
            neg: self.neg.classes().to_vec(),
            proper_points: self.proper.clone(),
            raw_generators: self.gens.raw.len(),
            generators,
            chain_sizes: chain.sizes(),
            members,
            stabilization,
            families,
            restricted_steps,
        })
    }
}

pub fn certify(f: DivisorClass, neg: &NegSet) -> Result<Certificate> {
    Verifier::new(neg.clone())?.certify(f)
}

pub fn s_chain(neg: &NegSet, depth: usize) -> Result<SChain> {
    Ok(Verifier::new(neg.clone())?.s_chain(depth))
}

/// Finds `(j, k)` and certifies the configuration; the boolean is true when
/// nothing is left inconclusive.
pub fn verify_stabilization(
    chain: &SChain,
    neg: &NegSet,
) -> Result<(bool, Option<Stabilization>, VerificationReport)> {
    let mut v = Verifier::new(neg.clone())?;
    let report = v.verify(chain.depth())?;
    if report.chain_sizes != chain.sizes() {
        return Err(Error::Internal("chain does not belong to this configuration".into()));
    }
    Ok((report.is_verified(), report.stabilization.found.clone(), report))
}

/// Nef classes `H` with `H^2 = 1` and `-K.H = 3`.
pub fn e0_classes(neg: &NegSet) -> Vec<DivisorClass> {
    plane_models().iter().copied().filter(|h| neg.is_nef(*h)).collect()
}

/// The exceptional configuration `[E0'', E1'', ..., E6'']` attached to `h`,
/// ordered so that `E_i'' - E_j''` effective forces `i < j`, ties broken by
/// ascending stored coefficients.
pub fn exceptional_configuration(h: DivisorClass, neg: &NegSet) -> Result<[DivisorClass; 7]> {
    if !plane_models().contains(&h) || !neg.is_nef(h) {
        return Err(Error::NotPlaneModel(h));
    }
    let cands: Vec<DivisorClass> = exceptional_classes().iter().copied().filter(|c| c.dot(&h) == 0).collect();
    if cands.len() != 6 || cands.iter().enumerate().any(|(i, a)| cands[i + 1..].iter().any(|b| a.dot(b) != 0)) {
        return Err(Error::Internal(format!("no exceptional configuration for {h}")));
    }
    let n = cands.len();
    let before: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && h0(cands[i] - cands[j], neg) > 0).collect())
        .collect();
    let mut placed = vec![false; n];
    let mut out = [h; 7];
    for slot in out.iter_mut().skip(1) {
        let next = (0..n)
            .filter(|&j| !placed[j] && (0..n).all(|i| placed[i] || !before[i][j]))
            .min_by_key(|&j| cands[j])
            .ok_or_else(|| Error::Internal("effectiveness relation has a cycle".into()))?;
        placed[next] = true;
        *slot = cands[next];
    }
    Ok(out)
}

/// Coordinates with respect to another exceptional configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub basis: [DivisorClass; 7],
}

impl Frame {
    pub fn new(h: DivisorClass, neg: &NegSet) -> Result<Self> {
        Ok(Frame { basis: exceptional_configuration(h, neg)? })
    }

    pub fn coordinates(&self, x: DivisorClass) -> DivisorClass {
        let mut c = [0; 7];
        for (slot, b) in c.iter_mut().zip(self.basis.iter()) {
            *slot = x.dot(b);
        }
        DivisorClass::new(c)
    }

    pub fn transform(&self, neg: &NegSet) -> Result<NegSet> {
        NegSet::new(neg.classes().iter().map(|&c| self.coordinates(c)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub h: DivisorClass,
    pub neg_in_frame: Vec<DivisorClass>,
    pub chain_sizes: Vec<usize>,
    pub stabilization: Option<(usize, usize)>,
    pub inconclusive: usize,
    pub restricted_steps: usize,
    pub external: usize,
    pub oracle: usize,
    pub certified: usize,
}

/// Runs the verification in every plane model of the surface. Models giving
/// the same negative classes in their own coordinates share one run.
pub fn verify_all_frames(neg: &NegSet, depth: usize) -> Result<Vec<FrameReport>> {
    let hs = e0_classes(neg);
    let frames: Vec<(DivisorClass, NegSet)> = hs
        .iter()
        .map(|&h| Ok((h, Frame::new(h, neg)?.transform(neg)?)))
        .collect::<Result<_>>()?;
    let distinct: BTreeSet<Vec<DivisorClass>> = frames.iter().map(|(_, n)| n.classes().to_vec()).collect();
    let runs: Vec<(Vec<DivisorClass>, VerificationReport)> = distinct
        .into_par_iter()
        .map(|classes| {
            let report = Verifier::new(NegSet::new(classes.clone())?)?.verify(depth)?;
            Ok((classes, report))
        })
        .collect::<Result<_>>()?;
    let runs: HashMap<Vec<DivisorClass>, VerificationReport> = runs.into_iter().collect();
    Ok(frames
        .into_iter()
        .map(|(h, n)| {
            let r = &runs[n.classes()];
            FrameReport {
                h,
                neg_in_frame: n.classes().to_vec(),
                chain_sizes: r.chain_sizes.clone(),
                stabilization: r.stabilization.found.as_ref().map(|s| (s.j, s.k)),
                inconclusive: r.inconclusive(),
                restricted_steps: r.restricted_steps,
                external: r.external,
                oracle: r.oracle,
                certified: r.generators.len() + r.members.len() + r.families.len(),
            }
        })
        .collect())
}

/// Whether `f` is, up to permuting the points, one of the classes whose
/// multiplication map can be injective.
pub fn injectivity_class(f: DivisorClass) -> bool {
    let c = f.coeffs();
    let d = c[0];
    let mut m: Vec<i64> = c[1..].to_vec();
    m.sort_unstable_by(|a, b| b.cmp(a));
    let fixed: [(i64, [i64; 6]); 5] = [
        (4, [2, 2, 2, 1, 1, 1]),
        (5, [2, 2, 2, 2, 2, 2]),
        (6, [3, 3, 2, 2, 2, 2]),
        (8, [4, 3, 3, 3, 3, 3]),
        (10, [4, 4, 4, 4, 4, 4]),
    ];
    if fixed.iter().any(|(dd, mm)| *dd == d && m == mm) {
        return true;
    }
    if d < 0 {
        return false;
    }
    if d % 2 == 0 {
        let k = d / 2;
        if m == [k, k, k, k, 0, 0] {
            return true;
        }
    }
    if d % 3 == 0 {
        let k = d / 3;
        if m == [2 * k, k, k, k, k, k] {
            return true;
        }
    }
    false
}

/// Generators of the cone of nef classes with decreasing multiplicities on
/// six general points.
pub fn monotone_generators() -> Vec<DivisorClass> {
    let rows: [[i64; 7]; 19] = [
        [1, 0, 0, 0, 0, 0, 0],
        [2, -1, -1, -1, 0, 0, 0],
        [3, -2, -1, -1, -1, -1, 0],
        [4, -2, -2, -2, -1, -1, -1],
        [5, -2, -2, -2, -2, -2, -2],
        [1, -1, 0, 0, 0, 0, 0],
        [2, -1, -1, -1, -1, 0, 0],
        [3, -2, -1, -1, -1, -1, -1],
        [2, -1, -1, 0, 0, 0, 0],
        [4, -2, -2, -2, -1, -1, 0],
        [6, -3, -3, -2, -2, -2, -2],
        [6, -3, -3, -2, -2, -2, 0],
        [4, -2, -2, -1, -1, -1, 0],
        [5, -2, -2, -2, -2, -2, 0],
        [6, -3, -3, -2, -2, -2, -1],
        [3, -1, -1, -1, -1, -1, 0],
        [4, -2, -2, -1, -1, -1, -1],
        [5, -2, -2, -2, -2, -2, -1],
        [3, -1, -1, -1, -1, -1, -1],
    ];
    rows.iter().map(|r| DivisorClass::from_display(*r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{neg_from_distinct, neg_from_nodal, DistinctSpec};

    fn case_iv() -> NegSet {
        neg_from_distinct(&DistinctSpec::case("iv").unwrap()).unwrap()
    }

    #[test]
    fn index_rule_prefers_first_maximum() {
        assert_eq!(index_rule(DivisorClass::plane(3, &[1, 3, 3, 4, 5])), 3);
        assert_eq!(index_rule(e(0)), 1);
        assert_eq!(index_rule(DivisorClass::fat(5, &[1, 2, 2, 0, 0, 2])), 2);
    }

    #[test]
    fn worked_bounds() {
        let f = DivisorClass::plane(3, &[1, 3, 3, 4, 5]);
        let b = ql_bounds(f, &case_iv(), true).unwrap();
        assert_eq!((b.index, b.q, b.q_star), (3, 1, 0));
        let b = ql_bounds(e(0), &case_iv(), true).unwrap();
        assert_eq!((b.q, b.l), (2, 1));
        assert!(ql_bounds(-e(0), &case_iv(), true).is_err());
    }

    #[test]
    fn zero_class_certificate() {
        let c = certify(DivisorClass::ZERO, &case_iv()).unwrap();
        assert_eq!((c.status, c.reason), (Status::Injective, Reason::ZeroClass));
        assert!(certify(DivisorClass::fat(7, &[2, 2, 6, 2, 2, 2]), &case_iv()).is_err());
    }

    #[test]
    fn plane_models_of_general_surface() {
        let neg = neg_from_nodal(&[]).unwrap();
        assert_eq!(e0_classes(&neg).len(), 72);
        let std = exceptional_configuration(e(0), &neg).unwrap();
        assert_eq!(std, [e(0), e(1), e(2), e(3), e(4), e(5), e(6)]);
        let h = DivisorClass::plane(2, &[1, 2, 3]);
        let conf = exceptional_configuration(h, &neg).unwrap();
        for c in [DivisorClass::plane(1, &[2, 3]), DivisorClass::plane(1, &[1, 3]), DivisorClass::plane(1, &[1, 2]), e(4), e(5), e(6)] {
            assert!(conf[1..].contains(&c));
        }
        assert!(exceptional_configuration(DivisorClass::plane(1, &[1]), &neg).is_err());
    }

    #[test]
    fn frame_change_preserves_the_form() {
        let neg = neg_from_nodal(&[e(1) - e(2)]).unwrap();
        for h in e0_classes(&neg) {
            let fr = Frame::new(h, &neg).unwrap();
            assert_eq!(fr.coordinates(h), e(0));
            for (a, b) in [(e(0), e(3)), (h, h), (e(1) - e(2), e(0))] {
                assert_eq!(fr.coordinates(a).dot(&fr.coordinates(b)), a.dot(&b));
            }
            let moved = fr.transform(&neg).unwrap();
            assert!(anticanonical_nef(&moved));
        }
    }

    #[test]
    fn injectivity_list() {
        assert!(injectivity_class(DivisorClass::plane(5, &[1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6])));
        assert!(injectivity_class(DivisorClass::fat(4, &[2, 2, 1, 2, 1, 1])));
        assert!(!injectivity_class(e(0)));
        assert!(injectivity_class(DivisorClass::ZERO));
        assert!(injectivity_class(DivisorClass::fat(6, &[3, 0, 3, 3, 0, 3])));
        assert!(injectivity_class(DivisorClass::fat(9, &[3, 3, 6, 3, 3, 3])));
        assert!(!injectivity_class(DivisorClass::fat(2, &[1, 1, 1, 0, 0, 0])));
    }

    #[test]
    fn nineteen_monotone_generators() {
        let g = monotone_generators();
        assert_eq!(g.len(), 19);
        let set: BTreeSet<_> = g.iter().collect();
        assert_eq!(set.len(), 19);
        let neg = neg_from_nodal(&[]).unwrap();
        assert!(g.iter().all(|c| neg.is_nef(*c)));
        assert!(g.iter().all(|c| c.coeffs()[1..].windows(2).all(|w| w[0] >= w[1])));
    }

    fn display_set(rows: &[[i64; 7]]) -> BTreeSet<DivisorClass> {
        rows.iter().map(|r| DivisorClass::from_display(*r)).collect()
    }

    #[test]
    fn case_iv_chain_stabilizes_immediately() {
        let neg = case_iv();
        let chain = s_chain(&neg, 4).unwrap();
        assert_eq!(chain.sizes(), vec![9, 9, 9, 9]);
        let expected = display_set(&[
            [1, -1, 0, 0, 0, 0, 0],
            [1, 0, -1, 0, 0, 0, 0],
            [1, 0, 0, -1, 0, 0, 0],
            [1, 0, 0, 0, -1, 0, 0],
            [1, 0, 0, 0, 0, -1, 0],
            [1, 0, 0, 0, 0, 0, -1],
            [2, 0, -1, -1, -1, -1, 0],
            [2, -1, -1, 0, 0, -1, -1],
            [2, -1, 0, -1, -1, 0, -1],
        ]);
        assert_eq!(chain.level(1).iter().copied().collect::<BTreeSet<_>>(), expected);
        let s = find_stabilization(&chain).found.unwrap();
        assert_eq!((s.j, s.k), (1, 1));
        assert!(s.witness.iter().all(|(f, c)| f == c));
    }

    #[test]
    fn stabilization_rejects_bad_pairs() {
        let neg = neg_from_nodal(&[e(1) - e(2)]).unwrap();
        let chain = s_chain(&neg, 6).unwrap();
        assert_eq!(chain.sizes(), vec![58, 140, 150, 150, 150, 150]);
        let err = check_stabilization(&chain, 2, 2).unwrap_err();
        assert!(err.contains("candidate"), "{err}");
        assert!(check_stabilization(&chain, 3, 2).is_ok());
        assert!(check_stabilization(&chain, 5, 2).is_err());
    }

    #[test]
    fn double_of_the_quintic_class() {
        let neg = neg_from_nodal(&[e(1) - e(2)]).unwrap();
        let mut v = Verifier::new(neg).unwrap();
        let h = DivisorClass::fat(5, &[2; 6]);
        let c = v.certify(2 * h).unwrap();
        assert!(c.uses_restricted_step(), "{}", c.reason);
        assert!(c.status.is_surjective());
        let c3 = v.certify(3 * h).unwrap();
        assert!(matches!(c3.reason, Reason::CurveStep { curve, .. } if curve == h));
        assert!(v.relies_on_restricted_step(3 * h));
    }

    #[test]
    fn families_beyond_the_chain() {
        let neg = neg_from_distinct(&DistinctSpec::general()).unwrap();
        let mut v = Verifier::new(neg.clone()).unwrap();
        let f = DivisorClass::from_display([7, -2, -2, -2, -2, -2, -5]);
        let c = DivisorClass::from_display([3, -1, -1, -1, -1, -1, -2]);
        let fam = v.certify_family(f, c, 4);
        assert_eq!(fam.status, Status::Surjective);
        assert!(h1_vanishes_along(f - e(6), c, &neg));
        let conic = DivisorClass::plane(2, &[1, 2, 3, 4]);
        let fam = v.certify_family(conic, conic, 3);
        assert!(fam.status != Status::Inconclusive);
    }
}

