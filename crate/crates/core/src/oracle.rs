//! Independent linear algebra on explicit plane configurations: dimensions of
//! the graded pieces of fat point ideals and ranks of the multiplication maps
//! by the three coordinate forms.
//!
//! A configuration is a list of arcs. An arc is a base point of the plane
//! together with a polynomial germ `w = phi(s)` in an affine chart centred at
//! it; its points are the base point followed by the successive infinitely
//! near points along the germ. Distinct points are arcs of length one.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::NegSet;
use crate::cones::h0;
use crate::error::{Error, Result};
use crate::lattice::DivisorClass;
use crate::resolution::{hilbert, mu_cokernel, FatPointScheme};
use crate::weyl::{all_roots, exceptional_classes, w6g};

pub const PRIME_A: u64 = 1_000_003;
pub const PRIME_B: u64 = 1_000_033;
pub const DEFAULT_SEED: u64 = 0x5eed;

pub trait Scalar: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;
}

/// Residues modulo `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    fn pow(self, mut e: u64) -> Self {
        let (mut b, mut r) = (self.0, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        Fp(r)
    }
}

impl<const P: u64> Scalar for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn from_i64(v: i64) -> Self {
        Fp(v.rem_euclid(P as i64) as u64)
    }
    fn add(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
    fn sub(&self, o: &Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
    fn mul(&self, o: &Self) -> Self {
        Fp(self.0 * o.0 % P)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        self.pow(P - 2)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref<S: Scalar>(rows: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for v in rows[r].iter_mut() {
            *v = v.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// A basis of `{v : rows * v = 0}`.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); ncols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = S::zero().sub(&m[r][f]);
            }
            v
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PlanePoint(pub [i64; 3]);

impl PlanePoint {
    pub fn is_valid(&self) -> bool {
        self.0.iter().any(|&c| c != 0)
    }
}

fn cross(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn det3(a: [i64; 3], b: [i64; 3], c: [i64; 3]) -> i64 {
    let x = cross(b, c);
    a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub base: PlanePoint,
    pub tangent: [i64; 3],
    pub normal: [i64; 3],
    /// Coefficients of `s^2, s^3, ...` in `phi`.
    pub phi: Vec<i64>,
    /// Point indices (1-based) along the arc, base point first.
    pub labels: Vec<usize>,
}

impl Arc {
    pub fn point(base: PlanePoint, label: usize) -> Self {
        let b = base.0;
        let (tangent, normal) = if b[2] != 0 {
            ([1, 0, 0], [0, 1, 0])
        } else if b[1] != 0 {
            ([1, 0, 0], [0, 0, 1])
        } else {
            ([0, 1, 0], [0, 0, 1])
        };
        Arc { base, tangent, normal, phi: Vec::new(), labels: vec![label] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Realization {
    pub arcs: Vec<Arc>,
}

impl Realization {
    pub fn distinct(points: &[PlanePoint; 6]) -> Result<Self> {
        let r = Realization { arcs: points.iter().enumerate().map(|(i, &p)| Arc::point(p, i + 1)).collect() };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let mut labels: Vec<usize> = self.arcs.iter().flat_map(|a| a.labels.iter().copied()).collect();
        labels.sort_unstable();
        if labels != [1, 2, 3, 4, 5, 6] {
            return Err(Error::InvalidConfig(format!("arc labels {labels:?} are not 1..6")));
        }
        for a in &self.arcs {
            if det3(a.base.0, a.tangent, a.normal) == 0 {
                return Err(Error::InvalidConfig(format!("degenerate chart at {:?}", a.base.0)));
            }
        }
        for (i, a) in self.arcs.iter().enumerate() {
            for b in &self.arcs[i + 1..] {
                if cross(a.base.0, b.base.0) == [0, 0, 0] {
                    return Err(Error::InvalidConfig(format!("arcs share the base point {:?}", a.base.0)));
                }
            }
        }
        Ok(())
    }

    pub fn is_distinct(&self) -> bool {
        self.arcs.iter().all(|a| a.labels.len() == 1)
    }

    pub fn points(&self) -> Vec<PlanePoint> {
        self.arcs.iter().map(|a| a.base).collect()
    }
}

/// Coordinates realizing the named distinct-point case.
pub fn fixture_points(case: &str) -> Result<[PlanePoint; 6]> {
    let p = |x, y, z| PlanePoint([x, y, z]);
    match case {
        "iv" => Ok([p(0, 0, 1), p(0, 1, -1), p(0, 1, 0), p(1, 0, -1), p(1, 0, 0), p(1, -1, 0)]),
        "conic" => Ok(std::array::from_fn(|i| {
            let t = i as i64 + 1;
            p(1, t, t * t)
        })),
        "i" | "ii" | "iii" | "general" => {
            let lines: &[[usize; 3]] = match case {
                "i" => &[[1, 2, 3]],
                "ii" => &[[1, 2, 3], [1, 4, 5]],
                "iii" => &[[1, 2, 3], [1, 4, 5], [3, 5, 6]],
                _ => &[],
            };
            let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
            loop {
                if let Some(pts) = place_points(lines, &mut rng) {
                    if collinear_triples(&pts) == lines && !on_conic(&pts) {
                        return Ok(pts.map(PlanePoint));
                    }
                }
            }
        }
        _ => Err(Error::InvalidConfig(format!("unknown fixture case {case}"))),
    }
}

pub fn fixture(case: &str) -> Result<Realization> {
    Realization::distinct(&fixture_points(case)?)
}

fn random_vec(rng: &mut ChaCha8Rng, range: i64) -> [i64; 3] {
    loop {
        let v = [rng.gen_range(-range..=range), rng.gen_range(-range..=range), rng.gen_range(-range..=range)];
        if v != [0, 0, 0] {
            return v;
        }
    }
}

fn random_nonzero(rng: &mut ChaCha8Rng, range: i64) -> i64 {
    loop {
        let v = rng.gen_range(-range..=range);
        if v != 0 {
            return v;
        }
    }
}

/// Places points in index order, putting each on the lines through pairs
/// already placed.
fn place_points(lines: &[[usize; 3]], rng: &mut ChaCha8Rng) -> Option<[[i64; 3]; 6]> {
    place_subset(lines, &[1, 2, 3, 4, 5, 6], rng).map(|m| std::array::from_fn(|i| m[&(i + 1)]))
}

fn place_subset(lines: &[[usize; 3]], order: &[usize], rng: &mut ChaCha8Rng) -> Option<BTreeMap<usize, [i64; 3]>> {
    let mut placed: BTreeMap<usize, [i64; 3]> = BTreeMap::new();
    for &i in order {
        let through: Vec<[i64; 3]> = lines
            .iter()
            .filter(|l| l.contains(&i))
            .filter_map(|l| {
                let others: Vec<usize> = l.iter().copied().filter(|&j| j != i).collect();
                match (placed.get(&others[0]), placed.get(&others[1])) {
                    (Some(&a), Some(&b)) => Some(cross(a, b)),
                    _ => None,
                }
            })
            .collect();
        let pt = match through.as_slice() {
            [] => random_vec(rng, 9),
            [l] => {
                let d = random_vec(rng, 9);
                let pt = cross(*l, d);
                if pt == [0, 0, 0] {
                    return None;
                }
                pt
            }
            [l, m, ..] => cross(*l, *m),
        };
        if pt == [0, 0, 0] || pt.iter().any(|c| c.abs() > 1_000_000) {
            return None;
        }
        let g = pt.iter().fold(0i64, |g, &c| gcd(g, c));
        placed.insert(i, pt.map(|c| c / g));
    }
    Some(placed)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn collinear_triples(pts: &[[i64; 3]; 6]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                if det3(pts[a], pts[b], pts[c]) == 0 {
                    out.push([a + 1, b + 1, c + 1]);
                }
            }
        }
    }
    out
}

fn on_conic(pts: &[[i64; 3]; 6]) -> bool {
    let rows: Vec<Vec<BigRational>> = pts
        .iter()
        .map(|p| {
            let [x, y, z] = *p;
            [x * x, x * y, x * z, y * y, y * z, z * z].iter().map(|&v| BigRational::from_i64(v)).collect()
        })
        .collect();
    rank(&rows, 6) < 6
}

/// Exponents `(i, j, k)` of `x^i y^j z^k` of degree `t`, in a fixed order.
pub fn monomials(t: i64) -> Vec<[usize; 3]> {
    if t < 0 {
        return Vec::new();
    }
    let t = t as usize;
    let mut out = Vec::with_capacity((t + 1) * (t + 2) / 2);
    for i in (0..=t).rev() {
        for j in (0..=t - i).rev() {
            out.push([i, j, t - i - j]);
        }
    }
    out
}

/// Truncated polynomial in `(s, v)` on the box `s^a v^b`, `a < na`, `b < nb`.
#[derive(Clone)]
struct Bivariate<S> {
    na: usize,
    nb: usize,
    c: Vec<S>,
}

impl<S: Scalar> Bivariate<S> {
    fn constant(na: usize, nb: usize, v: S) -> Self {
        let mut c = vec![S::zero(); na * nb];
        c[0] = v;
        Bivariate { na, nb, c }
    }

    fn get(&self, a: usize, b: usize) -> &S {
        &self.c[a * self.nb + b]
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = vec![S::zero(); self.na * self.nb];
        for a1 in 0..self.na {
            for b1 in 0..self.nb {
                let x = self.get(a1, b1);
                if x.is_zero() {
                    continue;
                }
                for a2 in 0..self.na - a1 {
                    for b2 in 0..self.nb - b1 {
                        let y = o.get(a2, b2);
                        if !y.is_zero() {
                            let idx = (a1 + a2) * self.nb + b1 + b2;
                            out[idx] = out[idx].add(&x.mul(y));
                        }
                    }
                }
            }
        }
        Bivariate { na: self.na, nb: self.nb, c: out }
    }
}

/// The conditions `(a, b)` on the coefficient of `s^a v^b` imposed by an arc
/// with multiplicities `m` along it.
fn arc_conditions(m: &[i64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut total = 0;
    let mut seen = std::collections::BTreeSet::new();
    for (k0, &mk) in m.iter().enumerate() {
        total += mk;
        let k = k0 as i64 + 1;
        let mut b = 0;
        while k * b < total {
            for a in 0..total - k * b {
                if seen.insert((a as usize, b as usize)) {
                    out.push((a as usize, b as usize));
                }
            }
            b += 1;
        }
    }
    out
}

/// Rows of linear conditions on the degree-`t` coefficients for
/// `I_t` of the scheme with multiplicities `m` (indexed by point label).
pub fn conditions_matrix<S: Scalar>(r: &Realization, m: &[i64; 6], t: i64) -> Vec<Vec<S>> {
    let monos = monomials(t);
    let mut rows = Vec::new();
    for arc in &r.arcs {
        let mults: Vec<i64> = arc.labels.iter().map(|&l| m[l - 1]).collect();
        let conds = arc_conditions(&mults);
        if conds.is_empty() {
            continue;
        }
        let na = conds.iter().map(|c| c.0).max().unwrap_or(0) + 1;
        let nb = conds.iter().map(|c| c.1).max().unwrap_or(0) + 1;
        let linear: Vec<Bivariate<S>> = (0..3)
            .map(|c| {
                let mut p = Bivariate::constant(na, nb, S::from_i64(arc.base.0[c]));
                if na > 1 {
                    p.c[nb] = p.c[nb].add(&S::from_i64(arc.tangent[c]));
                }
                if nb > 1 {
                    p.c[1] = p.c[1].add(&S::from_i64(arc.normal[c]));
                }
                for (e, &coef) in arc.phi.iter().enumerate() {
                    let a = e + 2;
                    if a < na {
                        p.c[a * nb] = p.c[a * nb].add(&S::from_i64(coef * arc.normal[c]));
                    }
                }
                p
            })
            .collect();
        let t = t as usize;
        let powers: Vec<Vec<Bivariate<S>>> = linear
            .iter()
            .map(|l| {
                let mut v = vec![Bivariate::constant(na, nb, S::one())];
                for e in 1..=t {
                    let next = v[e - 1].mul(l);
                    v.push(next);
                }
                v
            })
            .collect();
        let evaluated: Vec<Bivariate<S>> = monos
            .iter()
            .map(|&[i, j, k]| powers[0][i].mul(&powers[1][j]).mul(&powers[2][k]))
            .collect();
        for &(a, b) in &conds {
            rows.push(evaluated.iter().map(|p| p.get(a, b).clone()).collect());
        }
    }
    rows
}

fn ideal_basis<S: Scalar>(r: &Realization, m: &[i64; 6], t: i64) -> Vec<Vec<S>> {
    let n = monomials(t).len();
    if n == 0 {
        return Vec::new();
    }
    let rows = conditions_matrix::<S>(r, m, t);
    if rows.is_empty() {
        return (0..n)
            .map(|i| {
                let mut v = vec![S::zero(); n];
                v[i] = S::one();
                v
            })
            .collect();
    }
    nullspace(&rows, n)
}

fn ideal_dim_in<S: Scalar>(r: &Realization, m: &[i64; 6], t: i64) -> usize {
    let n = monomials(t).len();
    if n == 0 {
        return 0;
    }
    let rows = conditions_matrix::<S>(r, m, t);
    n - rank(&rows, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuRank {
    pub dim: usize,
    pub dim_next: usize,
    pub rank: usize,
    pub ker: usize,
    pub cok: usize,
}

fn mu_rank_in<S: Scalar>(r: &Realization, m: &[i64; 6], t: i64) -> MuRank {
    let basis = ideal_basis::<S>(r, m, t);
    let dim_next = ideal_dim_in::<S>(r, m, t + 1);
    let dim = basis.len();
    if dim == 0 {
        return MuRank { dim, dim_next, rank: 0, ker: 0, cok: dim_next };
    }
    let monos = monomials(t);
    let next: HashMap<[usize; 3], usize> = monomials(t + 1).into_iter().enumerate().map(|(i, e)| (e, i)).collect();
    let width = next.len();
    let mut rows = Vec::with_capacity(3 * dim);
    for v in &basis {
        for var in 0..3 {
            let mut row = vec![S::zero(); width];
            for (coef, e) in v.iter().zip(&monos) {
                if !coef.is_zero() {
                    let mut e2 = *e;
                    e2[var] += 1;
                    row[next[&e2]] = coef.clone();
                }
            }
            rows.push(row);
        }
    }
    let rk = rank(&rows, width);
    MuRank { dim, dim_next, rank: rk, ker: 3 * dim - rk, cok: dim_next - rk }
}

/// `dim I(Z)_t`; two prime fields, with exact recomputation when they differ.
pub fn ideal_dim(r: &Realization, m: &[i64; 6], t: i64) -> usize {
    let a = ideal_dim_in::<Fp<PRIME_A>>(r, m, t);
    let b = ideal_dim_in::<Fp<PRIME_B>>(r, m, t);
    if a == b {
        a
    } else {
        ideal_dim_exact(r, m, t)
    }
}

pub fn ideal_dim_exact(r: &Realization, m: &[i64; 6], t: i64) -> usize {
    ideal_dim_in::<BigRational>(r, m, t)
}

/// Kernel and cokernel of `I(Z)_t (x) <x, y, z> -> I(Z)_{t+1}`; two prime
/// fields, with exact recomputation when they differ.
pub fn mu_rank_direct(r: &Realization, m: &[i64; 6], t: i64) -> MuRank {
    let a = mu_rank_in::<Fp<PRIME_A>>(r, m, t);
    let b = mu_rank_in::<Fp<PRIME_B>>(r, m, t);
    if a == b {
        a
    } else {
        mu_rank_exact(r, m, t)
    }
}

pub fn mu_rank_exact(r: &Realization, m: &[i64; 6], t: i64) -> MuRank {
    mu_rank_in::<BigRational>(r, m, t)
}

fn class_data(c: DivisorClass) -> (i64, [i64; 6]) {
    let k = c.coeffs();
    (k[0], std::array::from_fn(|i| k[i + 1]))
}

/// `h0` of a class on the realized surface.
pub fn class_dim(r: &Realization, c: DivisorClass) -> usize {
    let (t, m) = class_data(c);
    ideal_dim(r, &m, t)
}

/// Whether the realization has the given negative curves: `h0` agrees with
/// the lattice on every positive root, every exceptional class and every
/// class of degree at most 3 in the seed orbits.
pub fn realizes(r: &Realization, neg: &NegSet) -> bool {
    if r.validate().is_err() {
        return false;
    }
    let mut classes: Vec<DivisorClass> = all_roots().positive();
    classes.extend(exceptional_classes().iter().copied());
    classes.extend(w6g().iter().copied().filter(|c| c.degree() <= 3));
    classes.into_iter().all(|c| class_dim(r, c) as i64 == h0(c, neg))
}

/// Random explicit configuration with the given negative curves, found by a
/// seeded search. Handles chains of free infinitely near points and lines or
/// a conic through points of the plane.
pub fn realize(neg: &NegSet, seed: u64, attempts: usize) -> Option<Realization> {
    let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
    let mut pred: BTreeMap<usize, usize> = BTreeMap::new();
    let mut lines: Vec<[usize; 3]> = Vec::new();
    let mut conic = false;
    for n in neg.nodal() {
        let k = n.coeffs();
        let pts: Vec<usize> = (1..=6).filter(|&i| k[i] != 0).collect();
        match k[0] {
            0 => {
                let (i, j) = match pts.as_slice() {
                    [i, j] if k[*i] == -1 && k[*j] == 1 => (*i, *j),
                    _ => return None,
                };
                if succ.insert(i, j).is_some() || pred.insert(j, i).is_some() {
                    return None;
                }
            }
            1 if pts.len() == 3 => lines.push([pts[0], pts[1], pts[2]]),
            2 if pts.len() == 6 => conic = true,
            _ => return None,
        }
    }
    let heads: Vec<usize> = (1..=6).filter(|i| !pred.contains_key(i)).collect();
    if lines.iter().flatten().any(|i| pred.contains_key(i)) || (conic && heads.len() < 6) {
        return None;
    }
    let chains: Vec<Vec<usize>> = heads
        .iter()
        .map(|&h| {
            let mut c = vec![h];
            while let Some(&n) = succ.get(c.last().expect("nonempty")) {
                c.push(n);
            }
            c
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let bases: BTreeMap<usize, [i64; 3]> = if conic {
            let mut ts: Vec<i64> = Vec::new();
            while ts.len() < 6 {
                let t = rng.gen_range(-12..=12);
                if !ts.contains(&t) {
                    ts.push(t);
                }
            }
            heads.iter().zip(ts).map(|(&h, t)| (h, [1, t, t * t])).collect()
        } else {
            match place_subset(&lines, &heads, &mut rng) {
                Some(b) => b,
                None => continue,
            }
        };
        let arcs = chains
            .iter()
            .map(|c| {
                let base = PlanePoint(bases[&c[0]]);
                if c.len() == 1 {
                    return Arc::point(base, c[0]);
                }
                Arc {
                    base,
                    tangent: random_vec(&mut rng, 5),
                    normal: random_vec(&mut rng, 5),
                    phi: (2..=c.len()).map(|_| random_nonzero(&mut rng, 5)).collect(),
                    labels: c.clone(),
                }
            })
            .collect();
        let r = Realization { arcs };
        if realizes(&r, neg) {
            return Some(r);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeComparison {
    pub t: i64,
    pub h_pipeline: i64,
    pub h_oracle: usize,
    pub nef: bool,
    /// `(ker, cok)` predicted by maximal rank, for nef `F(Z,t)`.
    pub predicted: Option<(usize, usize)>,
    pub cok_pipeline: i64,
    pub mu: MuRank,
}

impl DegreeComparison {
    pub fn agrees(&self) -> bool {
        self.h_pipeline == self.h_oracle as i64
            && self.cok_pipeline == self.mu.cok as i64
            && self.predicted.is_none_or(|p| p == (self.mu.ker, self.mu.cok))
    }
}

/// Compares Hilbert function and multiplication ranks of `z` with direct
/// computation on `r`, for `0 <= t <= max(t_max, sigma + 1)`.
pub fn compare(z: &FatPointScheme, r: &Realization, t_max: i64) -> Result<Vec<DegreeComparison>> {
    let prof = hilbert(z, t_max)?;
    let top = t_max.max(prof.sigma + 1);
    let m = z.multiplicities;
    (0..=top)
        .map(|t| {
            let f = z.class_at(t);
            let nef = z.neg().is_nef(f);
            let h = z.h(t);
            let hn = z.h(t + 1);
            let predicted = nef.then(|| ((3 * h - hn).max(0) as usize, (hn - 3 * h).max(0) as usize));
            Ok(DegreeComparison {
                t,
                h_pipeline: h,
                h_oracle: ideal_dim(r, &m, t),
                nef,
                predicted,
                cok_pipeline: mu_cokernel(z, t)?,
                mu: mu_rank_direct(r, &m, t),
            })
        })
        .collect()
}
