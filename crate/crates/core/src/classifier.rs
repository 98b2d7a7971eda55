//! Exceptional surgery classification on one component of a hyperbolic
//! two-bridge link.
//!
//! A filling `L(r)` is toroidal exactly when `L ~ L_[2w,v,2u]` and `r = -w-u`
//! under one of three parameter conditions, and small Seifert fibered exactly
//! when `L` and `r` fall into one of four two-term families. Every other
//! filling (including every non-integral slope) is hyperbolic. Each family is
//! listed once up to mirror image, so every query is matched twice: as given,
//! and as `(mirror(L), -r)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::notation::{
    canonicalize_link, convergent, equivalent_links, mirror_link, CanonicalLink, ContinuedFraction,
    NotationError, Slope,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("L_{0} is not hyperbolic: it is equivalent to a torus link L_1/n")]
    NotHyperbolic(CanonicalLink),
    #[error("slope 1/0 is the trivial (meridional) filling")]
    MeridionalSlope,
    #[error(transparent)]
    Notation(#[from] NotationError),
    #[error("invalid {family} witness: {reason}")]
    InvalidWitness { family: Family, reason: String },
    #[error("{family} witness reconstructs {slope}, which is not a hyperbolic two-component link")]
    ConstraintGap { family: Family, slope: Slope },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    T2a,
    T2b,
    T2c,
    S3a,
    S3b,
    S3c,
    S3d,
}

impl Family {
    /// Fixed matching order.
    pub const ALL: [Family; 7] = [
        Family::T2a,
        Family::T2b,
        Family::T2c,
        Family::S3a,
        Family::S3b,
        Family::S3c,
        Family::S3d,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Family::T2a => "T2a",
            Family::T2b => "T2b",
            Family::T2c => "T2c",
            Family::S3a => "S3a",
            Family::S3b => "S3b",
            Family::S3c => "S3c",
            Family::S3d => "S3d",
        }
    }

    pub const fn is_toroidal(self) -> bool {
        matches!(self, Family::T2a | Family::T2b | Family::T2c)
    }

    /// Toroidal fillings in the first two families are graph manifolds.
    pub const fn is_graph_manifold(self) -> bool {
        matches!(self, Family::T2a | Family::T2b)
    }

    /// Which toroidal condition `(w, v, u)` satisfies, if any.
    pub fn toroidal_for(w: i64, v: i64, u: i64) -> Option<Family> {
        if w == 1 && u == -1 && v.abs() >= 2 {
            Some(Family::T2a)
        } else if w >= 2 && u.abs() >= 2 && v.abs() == 1 {
            Some(Family::T2b)
        } else if w >= 2 && u.abs() >= 2 && v.abs() >= 2 {
            Some(Family::T2c)
        } else {
            None
        }
    }

    /// `(w, v, u)` presence for this family.
    const fn parameters(self) -> (bool, bool, bool) {
        match self {
            Family::T2a | Family::T2b | Family::T2c => (true, true, true),
            Family::S3a => (false, false, true),
            Family::S3b => (true, false, false),
            Family::S3c => (false, false, false),
            Family::S3d => (true, false, true),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// A family together with the parameters placing `(L, r)` in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyWitness {
    pub family: Family,
    pub w: Option<i64>,
    pub v: Option<i64>,
    pub u: Option<i64>,
    /// Matched through `(mirror(L), -r)`.
    pub mirrored: bool,
}

impl FamilyWitness {
    pub fn toroidal(w: i64, v: i64, u: i64) -> Option<Self> {
        Family::toroidal_for(w, v, u).map(|family| Self {
            family,
            w: Some(w),
            v: Some(v),
            u: Some(u),
            mirrored: false,
        })
    }

    pub fn s3a(u: i64) -> Self {
        Self::bare(Family::S3a, None, Some(u))
    }

    pub fn s3b(w: i64) -> Self {
        Self::bare(Family::S3b, Some(w), None)
    }

    pub fn s3c() -> Self {
        Self::bare(Family::S3c, None, None)
    }

    pub fn s3d(w: i64, u: i64) -> Self {
        Self::bare(Family::S3d, Some(w), Some(u))
    }

    const fn bare(family: Family, w: Option<i64>, u: Option<i64>) -> Self {
        Self {
            family,
            w,
            v: None,
            u,
            mirrored: false,
        }
    }

    pub fn mirrored(self) -> Self {
        Self {
            mirrored: !self.mirrored,
            ..self
        }
    }

    /// Total order used to pick a canonical witness among several.
    pub fn sort_key(&self) -> (bool, Family, i64, i64, i64) {
        (
            self.mirrored,
            self.family,
            self.w.unwrap_or(0),
            self.v.unwrap_or(0),
            self.u.unwrap_or(0),
        )
    }

    /// Checks parameter presence and the family's constraints.
    pub fn validate(&self) -> Result<(), ClassifyError> {
        let invalid = |reason: &str| ClassifyError::InvalidWitness {
            family: self.family,
            reason: reason.to_string(),
        };
        let (has_w, has_v, has_u) = self.family.parameters();
        if has_w != self.w.is_some() || has_v != self.v.is_some() || has_u != self.u.is_some() {
            return Err(invalid("parameter set does not match the family"));
        }
        let u_ok = |u: i64| u != 0 && u != -1;
        match (self.family, self.w, self.v, self.u) {
            (Family::T2a | Family::T2b | Family::T2c, Some(w), Some(v), Some(u)) => {
                if Family::toroidal_for(w, v, u) != Some(self.family) {
                    return Err(invalid("(w, v, u) violates the family condition"));
                }
            }
            (Family::S3a, None, None, Some(u)) if !u_ok(u) => {
                return Err(invalid("u must not be 0 or -1"))
            }
            (Family::S3b, Some(w), None, None) if w < 1 => {
                return Err(invalid("w must be at least 1"))
            }
            (Family::S3d, Some(w), None, Some(u)) => {
                if w < 1 {
                    return Err(invalid("w must be at least 1"));
                }
                if !u_ok(u) {
                    return Err(invalid("u must not be 0 or -1"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The continued fraction of the family link (before mirroring).
    pub fn continued_fraction(&self) -> ContinuedFraction {
        let entries = family_entries(
            self.family,
            self.w.unwrap_or(0),
            self.v.unwrap_or(0),
            self.u.unwrap_or(0),
        );
        ContinuedFraction::new(entries.to_vec()).expect("family entries are non-empty")
    }

    /// The integral surgery slope from the family's formula (before mirroring).
    pub fn slope_value(&self) -> i64 {
        family_slope(self.family, self.w.unwrap_or(0), self.u.unwrap_or(0))
    }
}

impl fmt::Display for FamilyWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        let params: Vec<String> = [("w", self.w), ("v", self.v), ("u", self.u)]
            .into_iter()
            .filter_map(|(name, value)| value.map(|x| format!("{name}={x}")))
            .collect();
        if !params.is_empty() {
            write!(f, "({})", params.join(","))?;
        }
        if self.mirrored {
            f.write_str(" mirrored")?;
        }
        Ok(())
    }
}

/// Continued-fraction entries of a family link; unused parameters ignored.
fn family_entries(family: Family, w: i64, v: i64, u: i64) -> Vec<i64> {
    match family {
        Family::T2a | Family::T2b | Family::T2c => vec![2 * w, v, 2 * u],
        Family::S3a => vec![3, 2 * u + 1],
        Family::S3b => vec![2 * w + 1, 3],
        Family::S3c => vec![3, -3],
        Family::S3d => vec![2 * w + 1, 2 * u + 1],
    }
}

pub(crate) fn family_slope(family: Family, w: i64, u: i64) -> i64 {
    match family {
        Family::T2a | Family::T2b | Family::T2c => -w - u,
        Family::S3a => u,
        Family::S3b => -w - 1,
        Family::S3c => -1,
        Family::S3d => -w + u,
    }
}

/// Value of the family continued fraction as an unreduced-mod-1 pair
/// `(numerator, denominator)` with positive denominator, or `None` for `1/0`.
pub(crate) fn family_value(family: Family, w: i64, v: i64, u: i64) -> Option<(i64, i64)> {
    let entries = match family {
        Family::T2a | Family::T2b | Family::T2c => [2 * w, v, 2 * u],
        Family::S3a => [3, 2 * u + 1, 0],
        Family::S3b => [2 * w + 1, 3, 0],
        Family::S3c => [3, -3, 0],
        Family::S3d => [2 * w + 1, 2 * u + 1, 0],
    };
    let len = if family.is_toroidal() { 3 } else { 2 };
    let (top, bottom) = convergent(&entries[..len]).ok()?;
    match top.signum() {
        0 => None,
        1 => Some((bottom, top)),
        _ => Some((-bottom, -top)),
    }
}

/// The canonical family link, when the value has an even denominator >= 2.
pub(crate) fn family_link(family: Family, w: i64, v: i64, u: i64) -> Option<CanonicalLink> {
    let (p, q) = family_value(family, w, v, u)?;
    canonicalize_link(Slope::new(p, q).ok()?).ok()
}

/// Outcome of a surgery on one component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurgeryClass {
    Hyperbolic,
    Toroidal {
        graph_manifold: bool,
        witness: FamilyWitness,
    },
    SmallSeifert {
        witness: FamilyWitness,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Hyperbolic,
    Toroidal,
    SmallSeifert,
}

impl Kind {
    pub const fn as_str(self) -> &'static str {
        match self {
            Kind::Hyperbolic => "hyperbolic",
            Kind::Toroidal => "toroidal",
            Kind::SmallSeifert => "small_seifert",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl SurgeryClass {
    pub fn from_witness(witness: FamilyWitness) -> Self {
        if witness.family.is_toroidal() {
            SurgeryClass::Toroidal {
                graph_manifold: witness.family.is_graph_manifold(),
                witness,
            }
        } else {
            SurgeryClass::SmallSeifert { witness }
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            SurgeryClass::Hyperbolic => Kind::Hyperbolic,
            SurgeryClass::Toroidal { .. } => Kind::Toroidal,
            SurgeryClass::SmallSeifert { .. } => Kind::SmallSeifert,
        }
    }

    /// Defined only for toroidal fillings.
    pub fn graph_manifold(&self) -> Option<bool> {
        match self {
            SurgeryClass::Toroidal { graph_manifold, .. } => Some(*graph_manifold),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&FamilyWitness> {
        match self {
            SurgeryClass::Hyperbolic => None,
            SurgeryClass::Toroidal { witness, .. } | SurgeryClass::SmallSeifert { witness } => {
                Some(witness)
            }
        }
    }

    pub fn is_exceptional(&self) -> bool {
        !matches!(self, SurgeryClass::Hyperbolic)
    }

    /// `(kind, graph flag)`, ignoring which witness was found.
    pub fn outcome(&self) -> (Kind, Option<bool>) {
        (self.kind(), self.graph_manifold())
    }
}

/// Reconstructs `(L, r)` from a witness, mirrored when flagged.
pub fn family_instance(witness: &FamilyWitness) -> Result<(CanonicalLink, Slope), ClassifyError> {
    witness.validate()?;
    let value = witness.continued_fraction().value()?;
    let gap = || ClassifyError::ConstraintGap {
        family: witness.family,
        slope: value,
    };
    let link = canonicalize_link(value).map_err(|_| gap())?;
    if !link.is_hyperbolic() {
        return Err(gap());
    }
    let slope = Slope::integer(witness.slope_value());
    if witness.mirrored {
        Ok((mirror_link(link), -slope))
    } else {
        Ok((link, slope))
    }
}

fn realizes(link: CanonicalLink, family: Family, w: i64, v: i64, u: i64) -> bool {
    family_link(family, w, v, u).is_some_and(|c| c.is_hyperbolic() && equivalent_links(c, link))
}

/// Toroidal match of `(link, r)` as given (no mirroring), searching
/// `|w|, |u|, |v| <= q`.
pub fn match_toroidal(link: CanonicalLink, r: Slope) -> Option<FamilyWitness> {
    let r = r.as_integer()?;
    let bound = link.denominator();
    let found = |w: i64, v: i64, u: i64| {
        realizes(link, Family::toroidal_for(w, v, u)?, w, v, u)
            .then(|| FamilyWitness::toroidal(w, v, u))
            .flatten()
    };
    // T2a: w = 1, u = -1 forces r = 0.
    if r == 0 {
        let hit = (-bound..=bound)
            .filter(|v| v.abs() >= 2)
            .find_map(|v| found(1, v, -1));
        if hit.is_some() {
            return hit;
        }
    }
    let by_w = |v_ok: &dyn Fn(i64) -> bool| {
        (2..=bound).find_map(|w| {
            let u = -r - w;
            if u.abs() < 2 || u.abs() > bound {
                return None;
            }
            (-bound..=bound)
                .filter(|&v| v_ok(v))
                .find_map(|v| found(w, v, u))
        })
    };
    by_w(&|v| v.abs() == 1).or_else(|| by_w(&|v| v.abs() >= 2))
}

/// Small Seifert match of `(link, r)` as given, families in order a, b, c, d,
/// with parameters bounded by `q`.
pub fn match_small_sfs(link: CanonicalLink, r: Slope) -> Option<FamilyWitness> {
    let r = r.as_integer()?;
    let bound = link.denominator();
    let u_ok = |u: i64| u != 0 && u != -1 && u.abs() <= bound;

    if u_ok(r) && realizes(link, Family::S3a, 0, 0, r) {
        return Some(FamilyWitness::s3a(r));
    }
    let w = -r - 1;
    if (1..=bound).contains(&w) && realizes(link, Family::S3b, w, 0, 0) {
        return Some(FamilyWitness::s3b(w));
    }
    if r == -1 && realizes(link, Family::S3c, 0, 0, 0) {
        return Some(FamilyWitness::s3c());
    }
    (1..=bound).find_map(|w| {
        let u = r + w;
        (u_ok(u) && realizes(link, Family::S3d, w, 0, u)).then(|| FamilyWitness::s3d(w, u))
    })
}

fn match_direct(link: CanonicalLink, r: Slope) -> Option<FamilyWitness> {
    match_toroidal(link, r).or_else(|| match_small_sfs(link, r))
}

/// Classifies the filling of `link` along `r`.
pub fn classify(link: CanonicalLink, r: Slope) -> Result<SurgeryClass, ClassifyError> {
    if !link.is_hyperbolic() {
        return Err(ClassifyError::NotHyperbolic(link));
    }
    if r.is_infinite() {
        return Err(ClassifyError::MeridionalSlope);
    }
    let witness = match_direct(link, r)
        .or_else(|| match_direct(mirror_link(link), -r).map(FamilyWitness::mirrored));
    Ok(witness.map_or(SurgeryClass::Hyperbolic, SurgeryClass::from_witness))
}

/// `classify` on an arbitrary slope label; odd denominators are rejected.
pub fn classify_slope(link: Slope, r: Slope) -> Result<SurgeryClass, ClassifyError> {
    classify(canonicalize_link(link)?, r)
}
