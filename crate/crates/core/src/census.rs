//! Enumeration of exceptional pairs, family audits, and an independent
//! brute-force classifier used to cross-check the matchers.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::classifier::{
    classify, family_instance, family_link, family_slope, family_value, ClassifyError, Family,
    FamilyWitness, Kind, SurgeryClass,
};
use crate::notation::{
    canonicalize_link, cf_to_slope, mirror_link, CanonicalLink, ContinuedFraction, Slope,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("census bound must be even and at least 8, got {0}")]
    BadBound(i64),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("family {family} produced ({link}, {slope}) but classify returned {found:?}")]
    Inconsistent {
        family: Family,
        link: CanonicalLink,
        slope: Slope,
        found: SurgeryClass,
    },
    #[error("ambiguous match for ({link}, {slope}): {witnesses:?}")]
    Ambiguous {
        link: CanonicalLink,
        slope: Slope,
        witnesses: Vec<FamilyWitness>,
    },
}

/// One exceptional filling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusEntry {
    /// Class representative with the smallest numerator.
    pub link: CanonicalLink,
    pub slope: Slope,
    pub class: SurgeryClass,
}

/// A family witness together with the `(L, r)` it reconstructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyInstance {
    pub witness: FamilyWitness,
    pub link: CanonicalLink,
    pub slope: Slope,
}

/// Every valid witness with all parameters in `[-bound, bound]`, unmirrored.
pub fn family_witnesses(param_bound: i64) -> Vec<FamilyWitness> {
    let b = param_bound;
    let mut out = Vec::new();
    for w in 1..=b {
        for v in -b..=b {
            for u in -b..=b {
                out.extend(FamilyWitness::toroidal(w, v, u));
            }
        }
    }
    out.extend(
        (-b..=b)
            .filter(|&u| u != 0 && u != -1)
            .map(FamilyWitness::s3a),
    );
    out.extend((1..=b).map(FamilyWitness::s3b));
    out.push(FamilyWitness::s3c());
    for w in 1..=b {
        out.extend(
            (-b..=b)
                .filter(|&u| u != 0 && u != -1)
                .map(|u| FamilyWitness::s3d(w, u)),
        );
    }
    out
}

/// Instances of every witness within `param_bound`, in both orientations.
pub fn family_instances(param_bound: i64) -> Result<Vec<FamilyInstance>, ClassifyError> {
    let mut out = Vec::new();
    for witness in family_witnesses(param_bound) {
        for w in [witness, witness.mirrored()] {
            let (link, slope) = family_instance(&w)?;
            out.push(FamilyInstance {
                witness: w,
                link,
                slope,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collision {
    pub link: CanonicalLink,
    pub slope: Slope,
    pub families: BTreeSet<Family>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointnessReport {
    pub instances: usize,
    pub collisions: Vec<Collision>,
}

impl DisjointnessReport {
    pub fn holds(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Groups instances by `(link class, slope)` and reports every key reached by
/// more than one family.
pub fn audit_disjointness(instances: &[FamilyInstance]) -> DisjointnessReport {
    let mut seen: BTreeMap<(CanonicalLink, Slope), BTreeSet<Family>> = BTreeMap::new();
    for inst in instances {
        seen.entry((inst.link.class_representative(), inst.slope))
            .or_default()
            .insert(inst.witness.family);
    }
    let collisions = seen
        .into_iter()
        .filter(|(_, families)| families.len() > 1)
        .map(|((link, slope), families)| Collision {
            link,
            slope,
            families,
        })
        .collect();
    DisjointnessReport {
        instances: instances.len(),
        collisions,
    }
}

pub fn check_disjointness(param_bound: i64) -> Result<DisjointnessReport, ClassifyError> {
    Ok(audit_disjointness(&family_instances(param_bound)?))
}

/// All exceptional pairs with link denominator at most `max_q`, sorted by
/// `(q, p, slope)`.
pub fn enumerate_census(max_q: i64) -> Result<Vec<CensusEntry>, CensusError> {
    enumerate_census_with_bound(max_q, max_q)
}

/// As [`enumerate_census`], generating candidates from parameters up to
/// `param_bound`. Any `param_bound >= max_q` covers every family member
/// with denominator at most `max_q`.
pub fn enumerate_census_with_bound(
    max_q: i64,
    param_bound: i64,
) -> Result<Vec<CensusEntry>, CensusError> {
    if max_q < 8 || max_q % 2 != 0 {
        return Err(CensusError::BadBound(max_q));
    }
    let mut keys: BTreeMap<(CanonicalLink, Slope), Family> = BTreeMap::new();
    for witness in family_witnesses(param_bound) {
        let (w, v, u) = (
            witness.w.unwrap_or(0),
            witness.v.unwrap_or(0),
            witness.u.unwrap_or(0),
        );
        let Some(link) = family_link(witness.family, w, v, u) else {
            continue;
        };
        if link.denominator() > max_q {
            continue;
        }
        let slope = Slope::integer(family_slope(witness.family, w, u));
        keys.entry((link.class_representative(), slope))
            .or_insert(witness.family);
        keys.entry((mirror_link(link).class_representative(), -slope))
            .or_insert(witness.family);
    }
    let mut entries = Vec::with_capacity(keys.len());
    for ((link, slope), family) in keys {
        let class = classify(link, slope)?;
        let consistent =
            class.kind() == kind_of(family) && class.graph_manifold() == graph_of(family);
        if !consistent {
            return Err(CensusError::Inconsistent {
                family,
                link,
                slope,
                found: class,
            });
        }
        entries.push(CensusEntry { link, slope, class });
    }
    Ok(entries)
}

fn kind_of(family: Family) -> Kind {
    if family.is_toroidal() {
        Kind::Toroidal
    } else {
        Kind::SmallSeifert
    }
}

fn graph_of(family: Family) -> Option<bool> {
    family.is_toroidal().then_some(family.is_graph_manifold())
}

/// Values `v` with `|c v + s| <= limit`, for `c != 0`.
fn solutions_within(c: i64, s: i64, limit: i64) -> std::ops::RangeInclusive<i64> {
    let (c, s) = if c < 0 { (-c, -s) } else { (c, s) };
    let lo = (-limit - s).div_euclid(c) + i64::from((-limit - s).rem_euclid(c) != 0);
    let hi = (limit - s).div_euclid(c);
    lo..=hi
}

/// Independent classifier: enumerates every family member (both
/// orientations) whose continued fraction has denominator exactly `q`, with
/// parameters up to `widen * (q + 2)`, and collects all that reproduce
/// `(link, r)`. More than one distinct outcome is an error.
pub fn brute_force_classify(
    link: CanonicalLink,
    r: Slope,
    widen: i64,
) -> Result<SurgeryClass, CensusError> {
    if !link.is_hyperbolic() {
        return Err(ClassifyError::NotHyperbolic(link).into());
    }
    if r.is_infinite() {
        return Err(ClassifyError::MeridionalSlope.into());
    }
    let Some(r) = r.as_integer() else {
        return Ok(SurgeryClass::Hyperbolic);
    };
    let q = link.denominator();
    let bound = widen.max(1) * (q + 2);
    let mirror = mirror_link(link);
    let mut matches = Vec::new();
    let mut consider = |family: Family, w: i64, v: i64, u: i64, witness: FamilyWitness| {
        let Some((p, den)) = family_value(family, w, v, u) else {
            return;
        };
        if den != q {
            return;
        }
        let Ok(candidate) = canonicalize_link(Slope::new(p, den).expect("coprime")) else {
            return;
        };
        if !candidate.is_hyperbolic() {
            return;
        }
        let slope = family_slope(family, w, u);
        if candidate.is_equivalent(&link) && slope == r {
            matches.push(witness);
        }
        if candidate.is_equivalent(&mirror) && slope == -r {
            matches.push(witness.mirrored());
        }
    };

    // Toroidal: |den| / 2 = |2uw v + (w + u)| >= 2|u|w - |w + u| once v != 0,
    // which grows with w for fixed u.
    for u in (-bound..=bound).filter(|&u| u != 0) {
        for w in 1..=bound {
            if 2 * u.abs() * w - (w + u).abs() > q / 2 {
                break;
            }
            for v in solutions_within(2 * u * w, w + u, q / 2) {
                if v == 0 || v.abs() > bound {
                    continue;
                }
                if let Some(witness) = FamilyWitness::toroidal(w, v, u) {
                    consider(witness.family, w, v, u, witness);
                }
            }
        }
    }
    for u in (-bound..=bound).filter(|&u| u != 0 && u != -1) {
        consider(Family::S3a, 0, 0, u, FamilyWitness::s3a(u));
    }
    for w in 1..=bound {
        consider(Family::S3b, w, 0, 0, FamilyWitness::s3b(w));
    }
    consider(Family::S3c, 0, 0, 0, FamilyWitness::s3c());
    // |den| >= (2w + 1)|2u + 1| - 1.
    for u in (-bound..=bound).filter(|&u| u != 0 && u != -1) {
        let odd = (2 * u + 1).abs();
        for w in 1..=bound {
            if (2 * w + 1) * odd - 1 > q {
                break;
            }
            consider(Family::S3d, w, 0, u, FamilyWitness::s3d(w, u));
        }
    }

    let outcomes: BTreeSet<_> = matches
        .iter()
        .map(|w| SurgeryClass::from_witness(*w).outcome())
        .collect();
    if outcomes.len() > 1 {
        return Err(CensusError::Ambiguous {
            link,
            slope: Slope::integer(r),
            witnesses: matches,
        });
    }
    Ok(matches
        .into_iter()
        .min_by_key(FamilyWitness::sort_key)
        .map_or(SurgeryClass::Hyperbolic, SurgeryClass::from_witness))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteFailure {
    pub w: i64,
    pub u: i64,
    pub toroidal_value: Option<Slope>,
    pub seifert_value: Option<Slope>,
    pub toroidal_slope: i64,
    pub seifert_slope: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteReport {
    pub bound: i64,
    pub checked: usize,
    pub failures: Vec<NoteFailure>,
}

impl NoteReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn cf_value(entries: Vec<i64>) -> Option<Slope> {
    cf_to_slope(&ContinuedFraction::new(entries).ok()?).ok()
}

/// `[2w, 1, 2u] = [2w + 1, -2u - 1]` and `-w - u = -w' + u' + 1` with
/// `(w', u') = (w, -u - 1)`, for all nonzero `|w|, |u| <= bound`.
pub fn note_identity_check(bound: i64) -> NoteReport {
    let nonzero = || (-bound..=bound).filter(|&x| x != 0);
    let mut checked = 0;
    let mut failures = Vec::new();
    for w in nonzero() {
        for u in nonzero() {
            checked += 1;
            let toroidal_value = cf_value(vec![2 * w, 1, 2 * u]);
            let seifert_value = cf_value(vec![2 * w + 1, -2 * u - 1]);
            let (w2, u2) = (w, -u - 1);
            let toroidal_slope = -w - u;
            let seifert_slope = -w2 + u2 + 1;
            if toroidal_value.is_none()
                || toroidal_value != seifert_value
                || toroidal_slope != seifert_slope
            {
                failures.push(NoteFailure {
                    w,
                    u,
                    toroidal_value,
                    seifert_value,
                    toroidal_slope,
                    seifert_slope,
                });
            }
        }
    }
    NoteReport {
        bound,
        checked,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(p: i64, q: i64) -> CanonicalLink {
        canonicalize_link(Slope::new(p, q).unwrap()).unwrap()
    }

    fn int(n: i64) -> Slope {
        Slope::integer(n)
    }

    fn has(
        entries: &[CensusEntry],
        l: CanonicalLink,
        r: i64,
        kind: Kind,
        graph: Option<bool>,
    ) -> bool {
        entries.iter().any(|e| {
            e.link == l.class_representative()
                && e.slope == int(r)
                && e.class.outcome() == (kind, graph)
        })
    }

    #[test]
    fn census_examples() {
        let c12 = enumerate_census(12).unwrap();
        assert!(has(&c12, link(5, 12), 0, Kind::Toroidal, Some(true)));
        let c8 = enumerate_census(8).unwrap();
        assert!(has(&c8, link(3, 8), 0, Kind::Toroidal, Some(true)));
        let c24 = enumerate_census(24).unwrap();
        assert!(has(&c24, link(5, 24), -4, Kind::Toroidal, Some(true)));
        assert!(has(&c24, link(5, 24), -5, Kind::SmallSeifert, None));
        assert!(enumerate_census(10).is_ok());
        assert_eq!(enumerate_census(7), Err(CensusError::BadBound(7)));
        assert_eq!(enumerate_census(6), Err(CensusError::BadBound(6)));
    }

    #[test]
    fn census_is_sorted_and_unique() {
        let entries = enumerate_census(40).unwrap();
        for pair in entries.windows(2) {
            assert!((pair[0].link, pair[0].slope) < (pair[1].link, pair[1].slope));
        }
        for e in &entries {
            assert!(e.class.is_exceptional());
            assert_eq!(e.link, e.link.class_representative());
            assert_eq!(classify(e.link, e.slope).unwrap(), e.class);
        }
    }

    #[test]
    fn census_is_stable_under_doubled_bounds() {
        for max_q in [8, 24, 40] {
            assert_eq!(
                enumerate_census(max_q).unwrap(),
                enumerate_census_with_bound(max_q, 2 * max_q).unwrap()
            );
        }
    }

    #[test]
    fn census_mirror_symmetry() {
        let entries = enumerate_census(40).unwrap();
        for e in &entries {
            let m = classify(mirror_link(e.link), -e.slope).unwrap();
            assert_eq!(m.outcome(), e.class.outcome(), "{} {}", e.link, e.slope);
        }
    }

    #[test]
    fn disjointness() {
        assert!(check_disjointness(6).unwrap().holds());
        assert!(check_disjointness(10).unwrap().holds());
    }

    #[test]
    fn disjointness_detects_seeded_collision() {
        let mut instances = family_instances(4).unwrap();
        let original = instances[0];
        // Same (link, slope) relabelled as the first small Seifert family.
        instances.push(FamilyInstance {
            witness: FamilyWitness::s3c(),
            ..original
        });
        let report = audit_disjointness(&instances);
        assert!(!report.holds());
        assert_eq!(report.collisions.len(), 1);
        assert_eq!(
            report.collisions[0].link,
            original.link.class_representative()
        );
    }

    #[test]
    fn oracle_examples() {
        let l = link(5, 12);
        assert_eq!(
            brute_force_classify(l, int(0), 3).unwrap().outcome(),
            (Kind::Toroidal, Some(true))
        );
        assert_eq!(
            brute_force_classify(l, int(7), 3).unwrap(),
            SurgeryClass::Hyperbolic
        );
        assert_eq!(
            brute_force_classify(l, Slope::new(1, 2).unwrap(), 1).unwrap(),
            SurgeryClass::Hyperbolic
        );
        assert!(matches!(
            brute_force_classify(link(1, 2), int(0), 1),
            Err(CensusError::Classify(ClassifyError::NotHyperbolic(_)))
        ));
    }

    #[test]
    fn oracle_agrees_with_classifier_small() {
        for q in (4..=40).step_by(2) {
            for p in 1..q {
                let Ok(l) = canonicalize_link(Slope::new(p, q).unwrap()) else {
                    continue;
                };
                if l.numerator() != p || !l.is_hyperbolic() || num_integer::gcd(p, q) != 1 {
                    continue;
                }
                for r in -20..=20 {
                    let fast = classify(l, int(r)).unwrap();
                    let slow = brute_force_classify(l, int(r), 1).unwrap();
                    assert_eq!(fast.outcome(), slow.outcome(), "{l} {r}");
                }
            }
        }
    }

    #[test]
    fn solutions_within_brackets_exactly() {
        for c in [-7i64, -2, -1, 1, 3, 8] {
            for s in -10..=10 {
                for limit in 0..=12 {
                    let expected: Vec<i64> =
                        (-50..=50).filter(|v| (c * v + s).abs() <= limit).collect();
                    let got: Vec<i64> = solutions_within(c, s, limit).collect();
                    assert_eq!(got, expected, "c={c} s={s} limit={limit}");
                }
            }
        }
    }

    #[test]
    fn note_identity() {
        let tor = cf_value(vec![4, 1, 4]).unwrap();
        assert_eq!(tor, Slope::new(5, 24).unwrap());
        assert_eq!(cf_value(vec![5, -5]).unwrap(), tor);
        assert_eq!(
            cf_value(vec![4, 1, -4]).unwrap(),
            Slope::new(3, 16).unwrap()
        );
        assert_eq!(cf_value(vec![5, 3]).unwrap(), Slope::new(3, 16).unwrap());
        let report = note_identity_check(20);
        assert!(report.holds(), "{:?}", report.failures);
        assert_eq!(report.checked, 40 * 40);
    }
}
