//! Edge-path combinatorics for the D-labeled edges of the two-bridge link
//! diagram.
//!
//! Vertices are reduced slopes. A D-edge joins two slopes with even
//! denominators (`0` counts as even) whose cross determinant is `±2`.
//! Searches run over a finite window of denominators and numerators, so every
//! distance reported here is relative to a `denominator_bound`.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_integer::Integer;
use thiserror::Error;

use crate::notation::{
    canonicalize_link, cf_to_slope, equivalent_links, is_hyperbolic, mirror_link, CanonicalLink,
    ContinuedFraction, Slope,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("{0} has odd denominator and is not a vertex for D-edges")]
    OddVertex(Slope),
    #[error("denominator bound {bound} is below endpoint denominator {needed}")]
    BoundTooSmall { bound: i64, needed: i64 },
    #[error("edge-paths of length {0} are not supported (only 1 or 2)")]
    UnsupportedLength(usize),
    #[error("lemma check needs n_bound >= 2, got {0}")]
    LemmaBound(i64),
}

fn cross(a: Slope, b: Slope) -> i128 {
    i128::from(a.numerator()) * i128::from(b.denominator())
        - i128::from(b.numerator()) * i128::from(a.denominator())
}

/// Classical Farey edge: `|p_a q_b - p_b q_a| = 1`.
pub fn is_farey_edge(a: Slope, b: Slope) -> bool {
    cross(a, b).abs() == 1
}

pub fn is_d_edge(a: Slope, b: Slope) -> bool {
    a.denominator().is_even() && b.denominator().is_even() && cross(a, b).abs() == 2
}

/// A chain of vertices joined by D-edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DPath {
    vertices: Vec<Slope>,
}

impl DPath {
    /// Returns `None` unless every consecutive pair is a D-edge.
    pub fn new(vertices: Vec<Slope>) -> Option<Self> {
        if vertices.is_empty() || vertices.windows(2).any(|w| !is_d_edge(w[0], w[1])) {
            return None;
        }
        Some(Self { vertices })
    }

    pub fn vertices(&self) -> &[Slope] {
        &self.vertices
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> Slope {
        self.vertices[0]
    }

    pub fn end(&self) -> Slope {
        self.vertices[self.vertices.len() - 1]
    }

    /// The endpoint as a link `L_{p/q}`, numerator reduced mod `q`.
    pub fn canonical_end(&self) -> Option<CanonicalLink> {
        canonicalize_link(self.end()).ok()
    }
}

/// The finite vertex window a search is allowed to visit.
#[derive(Debug, Clone, Copy)]
struct Window {
    max_den: i64,
    max_num: i64,
}

impl Window {
    /// All D-neighbours of `v` inside the window.
    fn neighbours(&self, v: Slope) -> Vec<Slope> {
        let (p, q) = (v.numerator(), v.denominator());
        let mut out = Vec::new();
        if q == 0 {
            // |k| = 2: every odd m / 2.
            if self.max_den >= 2 {
                let start = -self.max_num;
                let first_odd = if start.is_odd() { start } else { start + 1 };
                out.extend(
                    (first_odd..=self.max_num)
                        .step_by(2)
                        .map(|m| Slope::new(m, 2).expect("odd over two is reduced")),
                );
            }
            return out;
        }
        if q == 2 {
            out.push(Slope::INFINITY);
        }
        for k in (2..=self.max_den).step_by(2) {
            for delta in [-2i64, 2] {
                // p k - q m = delta
                let rhs = p * k - delta;
                if rhs % q != 0 {
                    continue;
                }
                let m = rhs / q;
                if m.abs() > self.max_num || m.gcd(&k) != 1 {
                    continue;
                }
                out.push(Slope::new(m, k).expect("coprime pair"));
            }
        }
        out
    }
}

fn check_vertex(v: Slope, bound: i64) -> Result<(), DiagramError> {
    if v.denominator().is_odd() {
        return Err(DiagramError::OddVertex(v));
    }
    if v.denominator() > bound {
        return Err(DiagramError::BoundTooSmall {
            bound,
            needed: v.denominator(),
        });
    }
    Ok(())
}

/// Breadth-first distances from `source` to every reachable vertex of the
/// window `denominator <= bound`, `|numerator| <= bound + extra_numerator`.
pub fn d_distances_from(
    source: Slope,
    denominator_bound: i64,
    extra_numerator: i64,
) -> Result<HashMap<Slope, u32>, DiagramError> {
    check_vertex(source, denominator_bound)?;
    let window = Window {
        max_den: denominator_bound,
        max_num: denominator_bound + extra_numerator.max(source.numerator().abs()),
    };
    let mut dist = HashMap::from([(source, 0u32)]);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let next = dist[&v] + 1;
        for w in window.neighbours(v) {
            dist.entry(w).or_insert_with(|| {
                queue.push_back(w);
                next
            });
        }
    }
    Ok(dist)
}

/// Length of a shortest D-edge path from `a` to `b` inside the window
/// `denominator <= bound`, `|numerator| <= bound + max(|p_a|, |p_b|)`;
/// `None` when `b` is unreachable there.
pub fn d_distance(a: Slope, b: Slope, denominator_bound: i64) -> Result<Option<u32>, DiagramError> {
    check_vertex(a, denominator_bound)?;
    check_vertex(b, denominator_bound)?;
    if a == b {
        return Ok(Some(0));
    }
    let window = Window {
        max_den: denominator_bound,
        max_num: denominator_bound + a.numerator().abs().max(b.numerator().abs()),
    };
    let mut dist = HashMap::from([(a, 0u32)]);
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        let next = dist[&v] + 1;
        for w in window.neighbours(v) {
            if w == b {
                return Ok(Some(next));
            }
            if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(w) {
                slot.insert(next);
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

/// Every non-backtracking D-path of exactly `length` edges starting at `1/0`,
/// with all vertices in the window `denominator <= bound`,
/// `|numerator| <= bound + 1`. Only lengths 1 and 2 are supported.
pub fn enumerate_d_paths(
    length: usize,
    denominator_bound: i64,
) -> Result<Vec<DPath>, DiagramError> {
    if !(1..=2).contains(&length) {
        return Err(DiagramError::UnsupportedLength(length));
    }
    if denominator_bound < 2 {
        return Err(DiagramError::BoundTooSmall {
            bound: denominator_bound,
            needed: 2,
        });
    }
    let window = Window {
        max_den: denominator_bound,
        max_num: denominator_bound + 1,
    };
    let mut paths: Vec<Vec<Slope>> = vec![vec![Slope::INFINITY]];
    for _ in 0..length {
        paths = paths
            .into_iter()
            .flat_map(|path| {
                let last = *path.last().expect("paths are non-empty");
                window
                    .neighbours(last)
                    .into_iter()
                    .filter(|w| !path.contains(w))
                    .map(|w| {
                        let mut extended = path.clone();
                        extended.push(w);
                        extended
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out: Vec<DPath> = paths
        .into_iter()
        .map(|vertices| DPath::new(vertices).expect("built from D-edges"))
        .collect();
    out.sort();
    Ok(out)
}

/// Canonical link forms of the endpoints of `enumerate_d_paths(length, bound)`.
pub fn d_path_endpoints(
    length: usize,
    denominator_bound: i64,
) -> Result<BTreeSet<CanonicalLink>, DiagramError> {
    Ok(enumerate_d_paths(length, denominator_bound)?
        .iter()
        .filter_map(DPath::canonical_end)
        .collect())
}

/// The canonical link of `[2, n, -2]`, i.e. `(2n - 1) / 4n` reduced mod 1.
pub fn lemma_family_link(n: i64) -> Option<CanonicalLink> {
    let cf = ContinuedFraction::new(vec![2, n, -2]).ok()?;
    canonicalize_link(cf_to_slope(&cf).ok()?).ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n_bound: i64,
    /// Hyperbolic endpoints of length-2 D-paths from `1/0`.
    pub path_endpoints: BTreeSet<CanonicalLink>,
    /// `[2, n, -2]` for `2 <= |n| <= n_bound`, with mirrors.
    pub family: BTreeSet<CanonicalLink>,
    pub only_in_paths: Vec<CanonicalLink>,
    pub only_in_family: Vec<CanonicalLink>,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.only_in_paths.is_empty() && self.only_in_family.is_empty()
    }
}

/// Compares the hyperbolic length-2 D-path endpoints (denominators up to
/// `4 n_bound`) against the family `[2, n, -2]`, `2 <= |n| <= n_bound`, up to
/// link equivalence.
pub fn lemma_family_check(n_bound: i64) -> Result<LemmaReport, DiagramError> {
    if n_bound < 2 {
        return Err(DiagramError::LemmaBound(n_bound));
    }
    let path_endpoints: BTreeSet<CanonicalLink> = d_path_endpoints(2, 4 * n_bound)?
        .into_iter()
        .filter(|l| is_hyperbolic(*l))
        .collect();
    let family: BTreeSet<CanonicalLink> = (2..=n_bound)
        .flat_map(|n| [n, -n])
        .filter_map(lemma_family_link)
        .flat_map(|l| [l, mirror_link(l)])
        .collect();
    let missing_from = |needle: &CanonicalLink, hay: &BTreeSet<CanonicalLink>| {
        !hay.iter().any(|h| equivalent_links(*needle, *h))
    };
    let only_in_paths = path_endpoints
        .iter()
        .filter(|l| missing_from(l, &family))
        .copied()
        .collect();
    let only_in_family = family
        .iter()
        .filter(|l| missing_from(l, &path_endpoints))
        .copied()
        .collect();
    Ok(LemmaReport {
        n_bound,
        path_endpoints,
        family,
        only_in_paths,
        only_in_family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::Slope;
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    fn links(pairs: &[(i64, i64)]) -> BTreeSet<CanonicalLink> {
        pairs
            .iter()
            .map(|&(p, q)| canonicalize_link(s(p, q)).unwrap())
            .collect()
    }

    #[test]
    fn edge_predicates() {
        assert!(is_farey_edge(s(1, 2), s(1, 3)));
        assert!(is_farey_edge(s(3, 8), s(1, 3)));
        assert!(!is_farey_edge(s(1, 2), s(3, 8)));
        assert!(is_d_edge(Slope::INFINITY, s(1, 2)));
        assert!(is_d_edge(s(1, 2), s(3, 8)));
        assert!(!is_d_edge(s(1, 2), s(1, 3)));
        assert!(!is_d_edge(s(1, 3), s(1, 5)));
    }

    #[test]
    fn distances() {
        let inf = Slope::INFINITY;
        assert_eq!(d_distance(inf, inf, 8).unwrap(), Some(0));
        assert_eq!(d_distance(inf, s(1, 2), 8).unwrap(), Some(1));
        assert_eq!(d_distance(inf, s(3, 8), 16).unwrap(), Some(2));
        assert_eq!(d_distance(s(3, 8), inf, 16).unwrap(), Some(2));
        // 1/0 -> 1/2 -> 1/4 is the only way to a quarter within denominators <= 4.
        assert_eq!(d_distance(inf, s(1, 4), 4).unwrap(), Some(2));
    }

    #[test]
    fn distance_errors() {
        assert_eq!(
            d_distance(Slope::INFINITY, s(1, 3), 8),
            Err(DiagramError::OddVertex(s(1, 3)))
        );
        assert_eq!(
            d_distance(Slope::INFINITY, s(3, 8), 4),
            Err(DiagramError::BoundTooSmall {
                bound: 4,
                needed: 8
            })
        );
    }

    #[test]
    fn distances_in_small_windows() {
        // 1/2 -> 3/8 needs denominator 8.
        assert_eq!(d_distance(s(1, 2), s(3, 8), 8).unwrap(), Some(1));
        // 3/8 and 1/4 are not adjacent; with bound 8 they connect through 1/2.
        assert_eq!(d_distance(s(3, 8), s(1, 4), 8).unwrap(), Some(2));
        // A window of denominators <= 2 only holds 1/0 and the halves.
        assert_eq!(d_distance(s(1, 2), s(3, 2), 2).unwrap(), Some(2));
    }

    #[test]
    fn path_enumeration() {
        let one = enumerate_d_paths(1, 2).unwrap();
        assert!(one
            .iter()
            .all(|p| p.end().denominator() == 2 && p.len() == 1));
        assert_eq!(d_path_endpoints(1, 2).unwrap(), links(&[(1, 2)]));
        assert_eq!(
            d_path_endpoints(2, 16).unwrap(),
            links(&[
                (1, 4),
                (3, 4),
                (3, 8),
                (5, 8),
                (5, 12),
                (7, 12),
                (7, 16),
                (9, 16)
            ])
        );
        assert_eq!(
            d_path_endpoints(2, 8).unwrap(),
            links(&[(1, 4), (3, 4), (3, 8), (5, 8)])
        );
        for path in enumerate_d_paths(2, 16).unwrap() {
            assert_eq!(path.start(), Slope::INFINITY);
            assert_eq!(path.len(), 2);
        }
        assert_eq!(
            enumerate_d_paths(3, 16),
            Err(DiagramError::UnsupportedLength(3))
        );
        assert_eq!(
            enumerate_d_paths(0, 16),
            Err(DiagramError::UnsupportedLength(0))
        );
    }

    #[test]
    fn path_construction_checks_edges() {
        assert!(DPath::new(vec![Slope::INFINITY, s(1, 2), s(3, 8)]).is_some());
        assert!(DPath::new(vec![Slope::INFINITY, s(3, 8)]).is_none());
        assert!(DPath::new(vec![]).is_none());
        assert!(DPath::new(vec![s(1, 2)]).unwrap().is_empty());
    }

    #[test]
    fn lemma_examples() {
        let r4 = lemma_family_check(4).unwrap();
        assert!(r4.holds());
        let expected = links(&[(3, 8), (5, 8), (5, 12), (7, 12), (7, 16), (9, 16)]);
        assert_eq!(r4.path_endpoints, expected);
        assert_eq!(r4.family, expected);

        let r2 = lemma_family_check(2).unwrap();
        assert!(r2.holds());
        assert_eq!(r2.family, links(&[(3, 8), (5, 8)]));

        assert!(lemma_family_check(10).unwrap().holds());
        assert_eq!(lemma_family_check(1), Err(DiagramError::LemmaBound(1)));
    }

    #[test]
    fn lemma_family_sits_at_distance_two() {
        for n in (2..=20).flat_map(|n| [n, -n]) {
            let l = lemma_family_link(n).unwrap();
            assert_eq!(
                d_distance(Slope::INFINITY, l.slope(), 4 * n.abs()).unwrap(),
                Some(2),
                "n = {n}"
            );
        }
    }

    #[test]
    fn hyperbolic_endpoints_closed_under_mirror() {
        let ends: BTreeSet<_> = d_path_endpoints(2, 40)
            .unwrap()
            .into_iter()
            .filter(|l| is_hyperbolic(*l))
            .collect();
        for l in &ends {
            assert!(ends.contains(&mirror_link(*l)), "{l}");
        }
    }

    #[test]
    fn even_denominators_never_span_farey_edges() {
        let evens: Vec<Slope> = std::iter::once(Slope::INFINITY)
            .chain((2..=30).step_by(2).flat_map(|q| {
                (-q..=2 * q)
                    .filter(move |p| p.gcd(&q) == 1)
                    .map(move |p| s(p, q))
            }))
            .collect();
        for &a in &evens {
            for &b in &evens {
                assert!(!is_farey_edge(a, b), "{a} {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn edge_predicates_are_symmetric(pa in -60i64..60, qa in 0i64..60, pb in -60i64..60, qb in 0i64..60) {
            let (Ok(a), Ok(b)) = (Slope::new(pa, qa), Slope::new(pb, qb)) else {
                return Ok(());
            };
            prop_assert_eq!(is_farey_edge(a, b), is_farey_edge(b, a));
            prop_assert_eq!(is_d_edge(a, b), is_d_edge(b, a));
        }
    }
}
