//! Non-adaptive localization: observation vectors, candidate targets and
//! resolving sets.
//!
//! Everything here is generic over [`QueryOracle`], so the same search code
//! computes the metric dimension of a graph and the query complexity of a
//! binary matrix.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{distance_matrix, Graph};
use crate::oracle::QueryOracle;

/// Ordered list of distinct queries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct QuerySet(Vec<usize>);

impl QuerySet {
    /// Validates that `nodes` are distinct and below `query_count`.
    pub fn new(nodes: Vec<usize>, query_count: usize) -> Result<Self> {
        let mut seen = vec![false; query_count];
        for &w in &nodes {
            if w >= query_count {
                return Err(Error::IndexOutOfRange {
                    index: w,
                    len: query_count,
                });
            }
            if std::mem::replace(&mut seen[w], true) {
                return Err(Error::InvalidArgument(format!("query {w} repeated")));
            }
        }
        Ok(Self(nodes))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, w: usize) -> bool {
        self.0.contains(&w)
    }

    pub(crate) fn push_unchecked(&mut self, w: usize) {
        debug_assert!(!self.0.contains(&w));
        self.0.push(w);
    }
}

/// `d(R, v)`: the answers of every query in `r` for target `v`.
pub fn observation_vector<O: QueryOracle + ?Sized>(o: &O, r: &QuerySet, v: usize) -> Vec<u32> {
    r.nodes().iter().map(|&w| o.answer(w, v)).collect()
}

/// Targets whose observation vector equals `obs`, in increasing order.
pub fn candidate_targets<O: QueryOracle + ?Sized>(
    o: &O,
    r: &QuerySet,
    obs: &[u32],
) -> Result<Vec<usize>> {
    if obs.len() != r.len() {
        return Err(Error::LengthMismatch {
            expected: r.len(),
            got: obs.len(),
        });
    }
    Ok((0..o.target_count())
        .filter(|&v| r.nodes().iter().zip(obs).all(|(&w, &l)| o.answer(w, v) == l))
        .collect())
}

/// True iff no two targets share an observation vector.
pub fn is_resolving<O: QueryOracle + ?Sized>(o: &O, r: &QuerySet) -> bool {
    let mut vectors: Vec<Vec<u32>> = (0..o.target_count())
        .map(|v| observation_vector(o, r, v))
        .collect();
    vectors.sort_unstable();
    vectors.windows(2).all(|w| w[0] != w[1])
}

/// Smallest resolving set with at most `cap` queries.
///
/// Subsets are enumerated by increasing size and, within a size, in
/// lexicographic order, so the witness is the lexicographically first
/// minimum resolving set. A branch is cut when some still-unseparated pair
/// has no separating query left among the higher indices, or when the
/// largest class cannot be split fully with the remaining queries.
pub fn min_resolving_set<O: QueryOracle + ?Sized>(o: &O, cap: usize) -> Result<QuerySet> {
    o.check_playable()?;
    let t = o.target_count();
    let q = o.query_count();

    // last_separator[u * t + v]: largest query index with different answers
    // for u and v, or None.
    let mut last_separator = vec![None; t * t];
    for u in 0..t {
        for v in u + 1..t {
            last_separator[u * t + v] = (0..q).rev().find(|&w| o.answer(w, u) != o.answer(w, v));
        }
    }

    let search = ExactSearch {
        o,
        t,
        q,
        labels: o.label_bound().max(2),
        last_separator,
    };
    for k in 0..=cap.min(q) {
        let mut chosen = Vec::with_capacity(k);
        if search.extend(&vec![0; t], 0, k, &mut chosen) {
            return Ok(QuerySet(chosen));
        }
    }
    Err(Error::CapExceeded(cap))
}

struct ExactSearch<'a, O: ?Sized> {
    o: &'a O,
    t: usize,
    q: usize,
    labels: usize,
    last_separator: Vec<Option<usize>>,
}

impl<O: QueryOracle + ?Sized> ExactSearch<'_, O> {
    fn extend(&self, class: &[usize], start: usize, k: usize, chosen: &mut Vec<usize>) -> bool {
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for &c in class {
            *sizes.entry(c).or_default() += 1;
        }
        let largest = sizes.values().copied().max().unwrap_or(0);
        if largest <= 1 {
            return true;
        }
        let remaining = k - chosen.len();
        if remaining == 0 || start + remaining > self.q {
            return false;
        }
        // Each query splits a class into at most `labels` cells.
        if (self.labels as f64).powi(remaining as i32) < largest as f64 {
            return false;
        }
        for u in 0..self.t {
            for v in u + 1..self.t {
                if class[u] == class[v] {
                    match self.last_separator[u * self.t + v] {
                        Some(w) if w >= start => {}
                        _ => return false,
                    }
                }
            }
        }
        for w in start..self.q {
            let refined = refine(self.o, class, w);
            chosen.push(w);
            if self.extend(&refined, w + 1, k, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Splits every class of `class` by the answers to query `w`. Class ids are
/// renumbered in order of first appearance.
fn refine<O: QueryOracle + ?Sized>(o: &O, class: &[usize], w: usize) -> Vec<usize> {
    let mut ids: HashMap<(usize, u32), usize> = HashMap::new();
    class
        .iter()
        .enumerate()
        .map(|(v, &c)| {
            let next = ids.len();
            *ids.entry((c, o.answer(w, v))).or_insert(next)
        })
        .collect()
}

/// Greedy resolving set by partition refinement.
///
/// Each round adds the query leaving the fewest unseparated target pairs;
/// ties go to the smaller largest class, then to the lower index. The result
/// always resolves but need not be minimum.
pub fn greedy_resolving_set<O: QueryOracle + ?Sized>(o: &O) -> Result<QuerySet> {
    o.check_playable()?;
    let t = o.target_count();
    let q = o.query_count();
    let labels = o.label_bound().max(1);

    let mut class = vec![0usize; t];
    let mut used = vec![false; q];
    let mut chosen = QuerySet::empty();
    let mut active: Vec<usize> = if t > 1 { (0..t).collect() } else { Vec::new() };
    let mut counts: Vec<u32> = Vec::new();

    while !active.is_empty() {
        // Compact ids for the classes that still hold two or more targets.
        let mut compact: HashMap<usize, usize> = HashMap::new();
        let keys: Vec<usize> = active
            .iter()
            .map(|&v| {
                let next = compact.len();
                *compact.entry(class[v]).or_insert(next) * labels
            })
            .collect();
        counts.clear();
        counts.resize(compact.len() * labels, 0);

        let mut best: Option<(u64, u32, usize)> = None;
        for w in (0..q).filter(|&w| !used[w]) {
            let bound = best.map_or(u64::MAX, |b| b.0);
            let mut pairs = 0u64;
            let mut largest = 0u32;
            let mut processed = 0;
            for (&v, &base) in active.iter().zip(&keys) {
                let slot = &mut counts[base + o.answer(w, v) as usize];
                pairs += u64::from(*slot);
                *slot += 1;
                largest = largest.max(*slot);
                processed += 1;
                if pairs > bound {
                    break;
                }
            }
            for (&v, &base) in active.iter().zip(&keys).take(processed) {
                counts[base + o.answer(w, v) as usize] = 0;
            }
            let candidate = (pairs, largest, w);
            if processed == active.len() && best.is_none_or(|b| candidate < b) {
                best = Some(candidate);
            }
        }

        let unseparated = unseparated_pairs(&class, &active);
        let (w, _) = match best {
            Some((pairs, _, w)) if pairs < unseparated => (w, pairs),
            _ => return Err(Error::Undefined),
        };
        used[w] = true;
        chosen.push_unchecked(w);
        class = refine(o, &class, w);
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for &v in &active {
            *sizes.entry(class[v]).or_default() += 1;
        }
        active.retain(|&v| sizes[&class[v]] > 1);
    }
    Ok(chosen)
}

fn unseparated_pairs(class: &[usize], members: &[usize]) -> u64 {
    let mut sizes: HashMap<usize, u64> = HashMap::new();
    for &v in members {
        *sizes.entry(class[v]).or_default() += 1;
    }
    sizes.values().map(|&s| s * (s - 1) / 2).sum()
}

/// Metric dimension by exhaustive search: size and lexicographically first
/// witness. Intended for graphs of about twenty nodes or fewer.
pub fn md_exact(g: &Graph, cap: usize) -> Result<(usize, QuerySet)> {
    let dm = distance_matrix(g);
    let r = min_resolving_set(&dm, cap)?;
    Ok((r.len(), r))
}

/// Resolving set from the greedy refinement heuristic.
pub fn md_greedy(g: &Graph) -> Result<QuerySet> {
    greedy_resolving_set(&distance_matrix(g))
}
