//! Rational slopes, continued fractions and two-bridge link normal forms.
//!
//! Continued fractions use the reciprocal convention
//! `[b1, ..., bn] = 1 / (b1 + 1 / (b2 + ... + 1 / bn))`, so `[n]` is `1/n`.
//! Values are assembled from the integer matrices `((b, 1), (1, 0))`, which
//! keeps zero entries and infinite partial quotients well defined.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error("malformed slope {0:?}: expected \"p/q\" or an integer")]
    MalformedSlope(String),
    #[error("malformed continued fraction {0:?}: expected \"[b1,...,bn]\"")]
    MalformedContinuedFraction(String),
    #[error("0/0 is not a slope")]
    ZeroOverZero,
    #[error("denominator 0 requires numerator \u{b1}1, got {0}")]
    InvalidInfinity(i64),
    #[error("continued fraction must have at least one entry")]
    EmptyContinuedFraction,
    #[error("integer overflow while evaluating")]
    Overflow,
    #[error("slope {0} has no expansion: denominator must be at least 1")]
    InfiniteSlope(Slope),
    #[error("slope {0} is an integer; it has no positive expansion in (0, 1)")]
    IntegerSlope(Slope),
    #[error("{0} has odd denominator: it names a knot, not a two-component link")]
    OddDenominator(Slope),
    #[error("{0} has denominator below 2 and names no two-bridge link")]
    DegenerateLink(Slope),
}

/// A reduced rational `p/q` with `q >= 0`; `1/0` is the meridian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };

    /// Reduces and sign-normalizes `p/q`.
    pub fn new(p: i64, q: i64) -> Result<Self, NotationError> {
        if q == 0 {
            return match p {
                0 => Err(NotationError::ZeroOverZero),
                1 | -1 => Ok(Self::INFINITY),
                other => Err(NotationError::InvalidInfinity(other)),
            };
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 {
            p = p.checked_neg().ok_or(NotationError::Overflow)?;
            q = q.checked_neg().ok_or(NotationError::Overflow)?;
        }
        Ok(Self { p, q })
    }

    pub const fn integer(n: i64) -> Self {
        Self { p: n, q: 1 }
    }

    pub const fn numerator(&self) -> i64 {
        self.p
    }

    pub const fn denominator(&self) -> i64 {
        self.q
    }

    pub const fn is_infinite(&self) -> bool {
        self.q == 0
    }

    pub const fn is_integer(&self) -> bool {
        self.q == 1
    }

    /// The integer value, when the slope is an integer.
    pub const fn as_integer(&self) -> Option<i64> {
        if self.q == 1 {
            Some(self.p)
        } else {
            None
        }
    }
}

/// Negation; `1/0` is fixed.
impl std::ops::Neg for Slope {
    type Output = Slope;

    fn neg(self) -> Slope {
        if self.q == 0 {
            self
        } else {
            Slope {
                p: -self.p,
                q: self.q,
            }
        }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Ord for Slope {
    /// Numeric order with `1/0` above every finite slope.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.q, other.q) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            _ => (i128::from(self.p) * i128::from(other.q))
                .cmp(&(i128::from(other.p) * i128::from(self.q))),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Slope {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_slope(s)
    }
}

/// Parses `"p/q"` or a bare integer.
pub fn parse_slope(text: &str) -> Result<Slope, NotationError> {
    let malformed = || NotationError::MalformedSlope(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let p = parse_int(num).ok_or_else(malformed)?;
    let q = parse_int(den).ok_or_else(malformed)?;
    Slope::new(p, q)
}

fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// A non-empty integer sequence `[b1, ..., bn]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    entries: Vec<i64>,
}

impl ContinuedFraction {
    pub fn new(entries: Vec<i64>) -> Result<Self, NotationError> {
        if entries.is_empty() {
            return Err(NotationError::EmptyContinuedFraction);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self) -> Result<Slope, NotationError> {
        cf_to_slope(self)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, b) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for ContinuedFraction {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_continued_fraction(s)
    }
}

/// Parses `"[b1,b2,...,bn]"`; whitespace around entries is ignored.
pub fn parse_continued_fraction(text: &str) -> Result<ContinuedFraction, NotationError> {
    let malformed = || NotationError::MalformedContinuedFraction(text.to_string());
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(malformed)?;
    if inner.trim().is_empty() {
        return Err(NotationError::EmptyContinuedFraction);
    }
    let entries = inner
        .split(',')
        .map(|item| parse_int(item.trim()).ok_or_else(malformed))
        .collect::<Result<Vec<_>, _>>()?;
    ContinuedFraction::new(entries)
}

/// Evaluates `[b1, ..., bn]` through the product of `((b_i, 1), (1, 0))`.
///
/// The product `((a, b), (c, d))` represents `b1 + 1/(b2 + ...) = a / c`, so
/// the value is `c / a`. Its determinant is `(-1)^n`, which makes `c` and `a`
/// coprime without any reduction step.
pub fn cf_to_slope(cf: &ContinuedFraction) -> Result<Slope, NotationError> {
    let (top, bottom) = convergent(cf.entries())?;
    Slope::new(bottom, top)
}

/// Returns `(a, c)`, the first column of the matrix product.
pub(crate) fn convergent(entries: &[i64]) -> Result<(i64, i64), NotationError> {
    if entries.is_empty() {
        return Err(NotationError::EmptyContinuedFraction);
    }
    // [a b; c d] <- [a b; c d] * [b_i 1; 1 0]
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    for &entry in entries {
        let na = a
            .checked_mul(entry)
            .and_then(|x| x.checked_add(b))
            .ok_or(NotationError::Overflow)?;
        let nc = c
            .checked_mul(entry)
            .and_then(|x| x.checked_add(d))
            .ok_or(NotationError::Overflow)?;
        (a, b, c, d) = (na, a, nc, c);
    }
    Ok((a, c))
}

/// Canonical all-positive expansion of `s` reduced into `(0, 1)`, with the
/// last entry at least 2.
pub fn slope_to_cf(s: Slope) -> Result<ContinuedFraction, NotationError> {
    if s.is_infinite() {
        return Err(NotationError::InfiniteSlope(s));
    }
    let q = s.denominator();
    let p = s.numerator().rem_euclid(q);
    if p == 0 {
        return Err(NotationError::IntegerSlope(s));
    }
    // Euclid on q/p: each quotient is one entry.
    let mut entries = Vec::new();
    let (mut num, mut den) = (q, p);
    while den != 0 {
        let (quot, rem) = num.div_rem(&den);
        entries.push(quot);
        (num, den) = (den, rem);
    }
    ContinuedFraction::new(entries)
}

/// A two-component two-bridge link `L_{p/q}` with `0 < p < q` and `q` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalLink {
    // Field order gives the (q, p) sort used by census output.
    q: i64,
    p: i64,
}

impl CanonicalLink {
    pub const fn numerator(&self) -> i64 {
        self.p
    }

    pub const fn denominator(&self) -> i64 {
        self.q
    }

    pub fn slope(&self) -> Slope {
        Slope {
            p: self.p,
            q: self.q,
        }
    }

    /// `p^{-1} mod q`, the numerator of the other normal form of this link.
    pub fn inverse(&self) -> CanonicalLink {
        CanonicalLink {
            q: self.q,
            p: mod_inverse(self.p, self.q),
        }
    }

    /// The representative of the equivalence class with smallest numerator.
    pub fn class_representative(&self) -> CanonicalLink {
        let inv = self.inverse();
        if inv.p < self.p {
            inv
        } else {
            *self
        }
    }

    pub fn mirror(&self) -> CanonicalLink {
        mirror_link(*self)
    }

    pub fn is_hyperbolic(&self) -> bool {
        is_hyperbolic(*self)
    }

    pub fn is_equivalent(&self, other: &CanonicalLink) -> bool {
        equivalent_links(*self, *other)
    }
}

impl fmt::Display for CanonicalLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn mod_inverse(p: i64, q: i64) -> i64 {
    let egcd = p.extended_gcd(&q);
    debug_assert_eq!(egcd.gcd, 1);
    egcd.x.rem_euclid(q)
}

/// Reduces the numerator into `(0, q)`; odd or tiny denominators are rejected.
pub fn canonicalize_link(s: Slope) -> Result<CanonicalLink, NotationError> {
    let q = s.denominator();
    if q < 2 {
        return Err(NotationError::DegenerateLink(s));
    }
    if q.is_odd() {
        return Err(NotationError::OddDenominator(s));
    }
    Ok(CanonicalLink {
        q,
        p: s.numerator().rem_euclid(q),
    })
}

/// Schubert's classification: same `q`, and `p' = p` or `p p' = 1 (mod q)`.
pub fn equivalent_links(a: CanonicalLink, b: CanonicalLink) -> bool {
    if a.q != b.q {
        return false;
    }
    let prod = (i128::from(a.p) * i128::from(b.p)).rem_euclid(i128::from(a.q));
    a.p == b.p || prod == 1
}

pub fn mirror_link(a: CanonicalLink) -> CanonicalLink {
    CanonicalLink {
        q: a.q,
        p: a.q - a.p,
    }
}

/// `L_{p/q}` is hyperbolic unless `p = ±1 (mod q)`, the torus links `L_{1/n}`.
pub fn is_hyperbolic(a: CanonicalLink) -> bool {
    a.p != 1 && a.p != a.q - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn cf(entries: &[i64]) -> ContinuedFraction {
        ContinuedFraction::new(entries.to_vec()).unwrap()
    }

    fn link(p: i64, q: i64) -> CanonicalLink {
        canonicalize_link(s(p, q)).unwrap()
    }

    #[test]
    fn parse_slope_examples() {
        assert_eq!(parse_slope("3/8").unwrap(), s(3, 8));
        assert_eq!(parse_slope("6/4").unwrap(), s(3, 2));
        assert_eq!(parse_slope("-5/-12").unwrap(), s(5, 12));
        assert_eq!(parse_slope("-6").unwrap(), Slope::integer(-6));
        assert_eq!(parse_slope(" +7 / 3 ").unwrap(), s(7, 3));
        assert_eq!(parse_slope("1/0").unwrap(), Slope::INFINITY);
        assert_eq!(parse_slope("-1/0").unwrap(), Slope::INFINITY);
    }

    #[test]
    fn parse_slope_errors() {
        assert_eq!(parse_slope("0/0"), Err(NotationError::ZeroOverZero));
        assert_eq!(parse_slope("2/0"), Err(NotationError::InvalidInfinity(2)));
        for bad in ["", "/", "3/", "a/2", "1/2/3", "--1", "1.5", "[2]"] {
            assert!(
                matches!(parse_slope(bad), Err(NotationError::MalformedSlope(_))),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn parse_cf_grammar() {
        assert_eq!(
            parse_continued_fraction("[2,3,-2]").unwrap(),
            cf(&[2, 3, -2])
        );
        assert_eq!(
            parse_continued_fraction(" [ 6, 3 ,6 ] ").unwrap(),
            cf(&[6, 3, 6])
        );
        assert_eq!(
            parse_continued_fraction("[]"),
            Err(NotationError::EmptyContinuedFraction)
        );
        assert!(parse_continued_fraction("2,3").is_err());
        assert!(parse_continued_fraction("[2,,3]").is_err());
        assert_eq!(
            ContinuedFraction::new(vec![]),
            Err(NotationError::EmptyContinuedFraction)
        );
    }

    #[test]
    fn cf_values() {
        for n in [-7, -1, 1, 2, 9] {
            assert_eq!(cf_to_slope(&cf(&[n])).unwrap(), s(1, n));
        }
        assert_eq!(cf_to_slope(&cf(&[2, 3, -2])).unwrap(), s(5, 12));
        assert_eq!(cf_to_slope(&cf(&[6, 3, 6])).unwrap(), s(19, 120));
        assert_eq!(cf_to_slope(&cf(&[2, 1, 2])).unwrap(), s(3, 8));
    }

    #[test]
    fn cf_zero_entries_and_infinity() {
        assert_eq!(cf_to_slope(&cf(&[0])).unwrap(), Slope::INFINITY);
        // 2 + 1/(0 + 1/2) = 4
        assert_eq!(cf_to_slope(&cf(&[2, 0, 2])).unwrap(), s(1, 4));
        // [-1, 1]: -1 + 1/1 = 0, reciprocal is 1/0
        assert_eq!(cf_to_slope(&cf(&[-1, 1])).unwrap(), Slope::INFINITY);
        assert_eq!(
            cf_to_slope(&cf(&[i64::MAX, 2, 2])),
            Err(NotationError::Overflow)
        );
    }

    #[test]
    fn slope_to_cf_examples() {
        assert_eq!(slope_to_cf(s(1, 2)).unwrap(), cf(&[2]));
        assert_eq!(slope_to_cf(s(3, 8)).unwrap(), cf(&[2, 1, 2]));
        assert_eq!(slope_to_cf(s(5, 12)).unwrap(), cf(&[2, 2, 2]));
        // reduced mod 1 first
        assert_eq!(slope_to_cf(s(11, 8)).unwrap(), cf(&[2, 1, 2]));
        assert!(matches!(
            slope_to_cf(Slope::INFINITY),
            Err(NotationError::InfiniteSlope(_))
        ));
        assert!(matches!(
            slope_to_cf(Slope::integer(3)),
            Err(NotationError::IntegerSlope(_))
        ));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(link(5, 4).slope(), s(1, 4));
        assert_eq!(link(3, 8).slope(), s(3, 8));
        assert_eq!(link(-3, 8).slope(), s(5, 8));
        assert!(matches!(
            canonicalize_link(s(1, 3)),
            Err(NotationError::OddDenominator(_))
        ));
        assert!(matches!(
            canonicalize_link(Slope::integer(2)),
            Err(NotationError::DegenerateLink(_))
        ));
        assert!(matches!(
            canonicalize_link(Slope::INFINITY),
            Err(NotationError::DegenerateLink(_))
        ));
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent_links(link(5, 12), link(5, 12)));
        assert!(equivalent_links(link(7, 10), link(3, 10)));
        assert!(!equivalent_links(link(5, 16), link(7, 16)));
        assert!(!equivalent_links(link(3, 8), link(3, 10)));
        assert_eq!(link(13, 16).class_representative(), link(5, 16));
    }

    #[test]
    fn mirror_and_hyperbolicity() {
        assert_eq!(mirror_link(link(3, 8)), link(5, 8));
        assert_eq!(mirror_link(link(5, 12)), link(7, 12));
        assert!(!is_hyperbolic(link(1, 2)));
        assert!(is_hyperbolic(link(5, 12)));
        assert!(!is_hyperbolic(link(11, 12)));
        assert!(!is_hyperbolic(link(1, 4)));
    }

    #[test]
    fn slope_ordering() {
        let mut v = vec![
            Slope::INFINITY,
            s(1, 2),
            Slope::integer(-3),
            s(-1, 3),
            Slope::integer(0),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                Slope::integer(-3),
                s(-1, 3),
                Slope::integer(0),
                s(1, 2),
                Slope::INFINITY
            ]
        );
    }

    #[test]
    fn equivalence_is_an_equivalence_relation() {
        for q in (2..=100).step_by(2) {
            let links: Vec<_> = (1..q)
                .filter(|p| p.gcd(&q) == 1)
                .map(|p| link(p, q))
                .collect();
            for &a in &links {
                assert!(equivalent_links(a, a));
                for &b in &links {
                    let ab = equivalent_links(a, b);
                    assert_eq!(ab, equivalent_links(b, a));
                    if !ab {
                        continue;
                    }
                    for &c in &links {
                        if equivalent_links(b, c) {
                            assert!(equivalent_links(a, c), "{a} {b} {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn round_trip_up_to_200() {
        for q in 2..=200i64 {
            for p in (1..q).filter(|p| p.gcd(&q) == 1) {
                let expansion = slope_to_cf(s(p, q)).unwrap();
                assert!(expansion.entries().iter().all(|&b| b > 0));
                if expansion.len() >= 2 {
                    assert!(*expansion.entries().last().unwrap() >= 2);
                }
                assert_eq!(cf_to_slope(&expansion).unwrap(), s(p, q));
            }
        }
    }

    proptest! {
        #[test]
        fn negation_commutes_with_evaluation(entries in prop::collection::vec(-6i64..=6, 1..=4)) {
            let plus = cf_to_slope(&cf(&entries)).unwrap();
            let negated: Vec<i64> = entries.iter().map(|b| -b).collect();
            let minus = cf_to_slope(&cf(&negated)).unwrap();
            prop_assert_eq!(minus, -plus);
        }

        #[test]
        fn matrix_value_is_coprime(entries in prop::collection::vec(-50i64..=50, 1..=6)) {
            let (top, bottom) = convergent(&entries).unwrap();
            prop_assert_eq!(top.gcd(&bottom), 1);
        }

        #[test]
        fn hyperbolicity_is_mirror_invariant(q in 1i64..=200, p in 1i64..400) {
            let q = 2 * q;
            let p = p % q;
            prop_assume!(p != 0 && p.gcd(&q) == 1);
            let l = link(p, q);
            prop_assert_eq!(is_hyperbolic(l), is_hyperbolic(mirror_link(l)));
            prop_assert_eq!(mirror_link(mirror_link(l)), l);
        }

        #[test]
        fn parse_display_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let slope = s(p, q);
            prop_assert_eq!(parse_slope(&slope.to_string()).unwrap(), slope);
        }
    }
}
