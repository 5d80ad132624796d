//! The rank-7 class lattice of the blow-up of the plane at six points.
//!
//! A [`DivisorClass`] stores `(a0, a1, ..., a6)` and stands for
//! `a0*E0 - a1*E1 - ... - a6*E6`. The sign convention makes fat point
//! multiplicities read off positively: the class `E1` itself is stored as
//! `(0, -1, 0, 0, 0, 0, 0)`.
//!
//! Text and JSON forms use the display convention instead, listing the actual
//! coefficient of each basis class, so `3E0 - E1 - 2E3 - E4 - E5` prints as
//! `3 -1 0 -2 -1 -1 0`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const RANK: usize = 7;

pub type IntersectionValue = i64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DivisorClass([i64; RANK]);

fn checked(v: Option<i64>) -> i64 {
    v.expect("divisor class arithmetic overflowed i64")
}

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass([0; RANK]);

    /// Builds a class from stored coefficients (subtracted multiplicities).
    pub const fn new(coeffs: [i64; RANK]) -> Self {
        DivisorClass(coeffs)
    }

    /// Builds a class from display coefficients, e.g. `[1, -1, -1, -1, 0, 0, 0]`.
    pub fn from_display(row: [i64; RANK]) -> Self {
        let mut c = row;
        for x in c.iter_mut().skip(1) {
            *x = checked(x.checked_neg());
        }
        DivisorClass(c)
    }

    pub fn to_display(&self) -> [i64; RANK] {
        let mut c = self.0;
        for x in c.iter_mut().skip(1) {
            *x = checked(x.checked_neg());
        }
        c
    }

    /// The basis class `E_i`.
    pub fn basis(i: usize) -> Self {
        assert!(i < RANK, "basis index {i} out of range");
        let mut c = [0; RANK];
        c[i] = if i == 0 { 1 } else { -1 };
        DivisorClass(c)
    }

    /// `d*E0 - sum of E_i over the listed 1-based indices`.
    pub fn plane(d: i64, points: &[usize]) -> Self {
        let mut c = [0; RANK];
        c[0] = d;
        for &i in points {
            assert!((1..RANK).contains(&i), "point index {i} out of range");
            c[i] = checked(c[i].checked_add(1));
        }
        DivisorClass(c)
    }

    /// `t*E0 - m1*E1 - ... - m6*E6`, the class F(Z, t).
    pub fn fat(t: i64, m: &[i64; 6]) -> Self {
        let mut c = [0; RANK];
        c[0] = t;
        c[1..].copy_from_slice(m);
        DivisorClass(c)
    }

    pub fn coeffs(&self) -> [i64; RANK] {
        self.0
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn dot(&self, other: &DivisorClass) -> IntersectionValue {
        intersect(*self, *other)
    }

    pub fn square(&self) -> i64 {
        intersect(*self, *self)
    }

    pub fn degree(&self) -> i64 {
        self.0[0]
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; RANK]
    }

    /// Arithmetic genus `(F^2 + K.F)/2 + 1`.
    pub fn genus(&self) -> i64 {
        let n = checked(self.square().checked_add(canonical_class().dot(self)));
        assert!(n % 2 == 0, "F^2 + K.F is odd for {self}");
        n / 2 + 1
    }

    /// Algebraic rendering such as `3E0-E1-2E3-E4-E5`.
    pub fn algebraic(&self) -> String {
        let d = self.to_display();
        let mut out = String::new();
        for (i, &c) in d.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if c.abs() != 1 {
                out.push_str(&c.abs().to_string());
            }
            out.push_str(&format!("E{i}"));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// `a0*b0 - sum a_i*b_i` in stored coefficients.
pub fn intersect(a: DivisorClass, b: DivisorClass) -> IntersectionValue {
    let mut s = checked(a.0[0].checked_mul(b.0[0]));
    for i in 1..RANK {
        s = checked(s.checked_sub(checked(a.0[i].checked_mul(b.0[i]))));
    }
    s
}

/// `K = -3E0 + E1 + ... + E6`.
pub fn canonical_class() -> DivisorClass {
    DivisorClass([-3, -1, -1, -1, -1, -1, -1])
}

pub fn anticanonical_class() -> DivisorClass {
    -canonical_class()
}

/// Riemann-Roch: `(F^2 - K.F)/2 + 1`.
pub fn chi(f: DivisorClass) -> i64 {
    let n = checked(f.square().checked_sub(canonical_class().dot(&f)));
    assert!(n % 2 == 0, "F^2 - K.F is odd for {f}");
    n / 2 + 1
}

pub fn degree(f: DivisorClass) -> i64 {
    f.degree()
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: DivisorClass) -> DivisorClass {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0) {
            *x = checked(x.checked_add(y));
        }
        DivisorClass(c)
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: DivisorClass) -> DivisorClass {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0) {
            *x = checked(x.checked_sub(y));
        }
        DivisorClass(c)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        let mut c = self.0;
        for x in c.iter_mut() {
            *x = checked(x.checked_neg());
        }
        DivisorClass(c)
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        let mut c = rhs.0;
        for x in c.iter_mut() {
            *x = checked(x.checked_mul(self));
        }
        DivisorClass(c)
    }
}

impl std::iter::Sum for DivisorClass {
    fn sum<I: Iterator<Item = DivisorClass>>(iter: I) -> Self {
        iter.fold(DivisorClass::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.to_display();
        let parts: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.algebraic())
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_display().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let row = <[i64; RANK]>::deserialize(d)?;
        Ok(DivisorClass::from_display(row))
    }
}

fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn parse_algebraic(s: &str) -> Result<DivisorClass, Error> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    let bytes = compact.as_bytes();
    let mut row = [0i64; RANK];
    let mut pos = 0;
    if compact.is_empty() {
        return Err(parse_error(s, "empty input"));
    }
    while pos < bytes.len() {
        let mut sign = 1;
        if bytes[pos] == b'+' || bytes[pos] == b'-' {
            if bytes[pos] == b'-' {
                sign = -1;
            }
            pos += 1;
        } else if pos != 0 {
            return Err(parse_error(s, "expected + or - between terms"));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let coef: i64 = if start == pos {
            1
        } else {
            compact[start..pos]
                .parse()
                .map_err(|_| parse_error(s, "coefficient out of range"))?
        };
        if pos >= bytes.len() || !(bytes[pos] == b'E' || bytes[pos] == b'e') {
            return Err(parse_error(s, "expected a basis class E0..E6"));
        }
        pos += 1;
        let istart = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        let idx: usize = compact[istart..pos]
            .parse()
            .map_err(|_| parse_error(s, "missing basis index"))?;
        if idx >= RANK {
            return Err(parse_error(s, format!("basis index {idx} out of range")));
        }
        row[idx] = row[idx]
            .checked_add(sign * coef)
            .ok_or_else(|| parse_error(s, "coefficient overflow"))?;
    }
    Ok(DivisorClass::from_display(row))
}

impl FromStr for DivisorClass {
    type Err = Error;

    /// Accepts a display row (`3 -1 0 -2 -1 -1 0`, commas and brackets
    /// allowed) or an algebraic expression (`3E0-E1-2E3-E4-E5`).
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.contains(['E', 'e']) {
            return parse_algebraic(s);
        }
        let cleaned = s.replace(['[', ']', '(', ')', ','], " ");
        let nums: Vec<i64> = cleaned
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| parse_error(s, format!("bad integer {t:?}"))))
            .collect::<Result<_, _>>()?;
        let row: [i64; RANK] = nums
            .try_into()
            .map_err(|v: Vec<i64>| parse_error(s, format!("expected 7 integers, found {}", v.len())))?;
        Ok(DivisorClass::from_display(row))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> DivisorClass {
        DivisorClass::basis(i)
    }

    #[test]
    fn basis_pairings() {
        assert_eq!(intersect(e(0), e(0)), 1);
        for i in 1..RANK {
            assert_eq!(intersect(e(i), e(i)), -1);
            assert_eq!(intersect(e(0), e(i)), 0);
            for j in 1..RANK {
                if i != j {
                    assert_eq!(intersect(e(i), e(j)), 0);
                }
            }
        }
    }

    #[test]
    fn anticanonical_square_and_degree() {
        let k = canonical_class();
        assert_eq!(anticanonical_class().square(), 3);
        assert_eq!(k.square(), 3);
        assert_eq!(anticanonical_class().dot(&e(0)), 3);
        assert_eq!(anticanonical_class().dot(&e(1)), 1);
    }

    #[test]
    fn worked_pairing() {
        let f = DivisorClass::plane(3, &[1, 3, 3, 4, 5]);
        let r0 = DivisorClass::plane(1, &[1, 2, 3]);
        assert_eq!(intersect(f, r0), 0);
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(chi(DivisorClass::ZERO), 1);
        assert_eq!(chi(e(0)), 3);
        assert_eq!(chi(anticanonical_class()), 4);
    }

    #[test]
    fn degrees() {
        assert_eq!(degree(e(0)), 1);
        assert_eq!(degree(e(1)), 0);
        assert_eq!(degree(DivisorClass::fat(7, &[2, 2, 6, 2, 2, 2])), 7);
    }

    #[test]
    fn display_round_trip() {
        let f = DivisorClass::plane(3, &[1, 3, 3, 4, 5]);
        assert_eq!(f.to_string(), "3 -1 0 -2 -1 -1 0");
        assert_eq!("3 -1 0 -2 -1 -1 0".parse::<DivisorClass>().unwrap(), f);
        assert_eq!("[3,-1,0,-2,-1,-1,0]".parse::<DivisorClass>().unwrap(), f);
        assert_eq!("3E0-E1-2E3-E4-E5".parse::<DivisorClass>().unwrap(), f);
        assert_eq!(f.algebraic(), "3E0-E1-2E3-E4-E5");
        assert_eq!("E1".parse::<DivisorClass>().unwrap(), e(1));
        assert!("E7".parse::<DivisorClass>().is_err());
        assert!("1 2 3".parse::<DivisorClass>().is_err());
    }

    #[test]
    fn json_uses_display_rows() {
        let f = DivisorClass::plane(1, &[1, 2, 3]);
        assert_eq!(serde_json::to_string(&f).unwrap(), "[1,-1,-1,-1,0,0,0]");
        let back: DivisorClass = serde_json::from_str("[1,-1,-1,-1,0,0,0]").unwrap();
        assert_eq!(back, f);
    }

    #[test]
    #[should_panic(expected = "overflowed")]
    fn overflow_is_loud() {
        let big = DivisorClass::new([i64::MAX, 0, 0, 0, 0, 0, 0]);
        let _ = big + e(0);
    }

    #[test]
    fn genus_of_small_classes() {
        assert_eq!(e(0).genus(), 0);
        assert_eq!(anticanonical_class().genus(), 1);
        assert_eq!(DivisorClass::plane(1, &[1]).genus(), 0);
    }
}
