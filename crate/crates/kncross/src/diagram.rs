//! Brute-force diagram enumeration and the predicates every generating
//! function is checked against.
//!
//! Vertices are 1-based. Arcs are pairs (i, j) with i < j, sorted by left
//! endpoint.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: usize = 18;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcClassTally {
    pub s: usize,
    pub u1: usize,
    pub u2: usize,
    pub u3: usize,
    pub u4: usize,
}

fn crosses(a: (usize, usize), b: (usize, usize)) -> bool {
    (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
}

impl Diagram {
    pub fn new(n: usize, mut arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut used = vec![false; n + 1];
        for &(i, j) in &arcs {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidParameter(format!("arc ({i},{j}) outside 1..={n}")));
            }
            for v in [i, j] {
                if std::mem::replace(&mut used[v], true) {
                    return Err(Error::InvalidParameter(format!("vertex {v} is in two arcs")));
                }
            }
        }
        arcs.sort_unstable();
        Ok(Self { n, arcs })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, arcs: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// partner[v] for v in 1..=n, 0 when v is isolated.
    pub fn partners(&self) -> Vec<usize> {
        let mut p = vec![0; self.n + 1];
        for &(i, j) in &self.arcs {
            p[i] = j;
            p[j] = i;
        }
        p
    }

    pub fn mirror(&self) -> Self {
        let m = |v: usize| self.n + 1 - v;
        let arcs = self.arcs.iter().map(|&(i, j)| (m(j), m(i))).collect();
        Self::new(self.n, arcs).expect("mirror of a valid diagram")
    }

    pub fn is_matching(&self) -> bool {
        2 * self.arcs.len() == self.n
    }

    /// No k arcs pairwise cross.
    pub fn is_k_noncrossing(&self, k: usize) -> bool {
        if k < 2 {
            return self.arcs.is_empty();
        }
        fn extend(arcs: &[(usize, usize)], from: usize, chosen: &mut Vec<(usize, usize)>, k: usize) -> bool {
            if chosen.len() == k {
                return true;
            }
            for idx in from..arcs.len() {
                let a = arcs[idx];
                if let Some(&(_, first_right)) = chosen.first() {
                    // lefts increase, so once a left passes j_1 nothing later fits
                    if a.0 > first_right {
                        break;
                    }
                    if a.1 <= chosen.last().unwrap().1 {
                        continue;
                    }
                }
                chosen.push(a);
                if extend(arcs, idx + 1, chosen, k) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        !extend(&self.arcs, 0, &mut Vec::with_capacity(k), k)
    }

    /// Lengths of all maximal stacks (i,j),(i+1,j-1),..., outermost arc first.
    pub fn stacks(&self) -> Vec<((usize, usize), usize)> {
        let p = self.partners();
        let is_arc = |i: usize, j: usize| i >= 1 && j <= self.n && p[i] == j && i < j;
        let mut out = Vec::new();
        for &(i, j) in &self.arcs {
            if i > 1 && is_arc(i - 1, j + 1) {
                continue;
            }
            let mut len = 1;
            while j > i + 2 * len && is_arc(i + len, j - len) {
                len += 1;
            }
            out.push(((i, j), len));
        }
        out
    }

    /// Every stack has length at least τ.
    pub fn is_canonical(&self, tau: usize) -> bool {
        self.stacks().iter().all(|&(_, l)| l >= tau)
    }

    pub fn min_arc_length(&self) -> Option<usize> {
        self.arcs.iter().map(|&(i, j)| j - i).min()
    }

    /// k-noncrossing, 2-canonical, arc length ≥ 4.
    pub fn is_modular(&self, k: usize) -> bool {
        self.min_arc_length().map_or(true, |l| l >= 4) && self.is_canonical(2) && self.is_k_noncrossing(k)
    }

    /// No cut point ℓ leaves a nonempty arc set entirely left of ℓ and a
    /// nonempty arc set entirely right of it.
    pub fn is_irreducible(&self) -> bool {
        let mut max_right = 0;
        for (idx, &(_, j)) in self.arcs.iter().enumerate() {
            max_right = max_right.max(j);
            if let Some(&(next_left, _)) = self.arcs.get(idx + 1) {
                if max_right < next_left {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the crossing graph on the arcs is connected.
    pub fn dependency_graph_connected(&self) -> bool {
        let m = self.arcs.len();
        if m <= 1 {
            return true;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(a) = stack.pop() {
            for b in 0..m {
                if !seen[b] && crosses(self.arcs[a], self.arcs[b]) {
                    seen[b] = true;
                    count += 1;
                    stack.push(b);
                }
            }
        }
        count == m
    }

    /// Matching with at least two arcs and a connected dependency graph.
    pub fn is_skeleton_matching(&self) -> bool {
        self.arcs.len() >= 2 && self.is_matching() && self.dependency_graph_connected()
    }

    /// Canonical skeleton diagram at stem level: 3-noncrossing, stacks ≥ 3,
    /// arcs of length ≥ 4, vertices 1 and n paired, and the core is a
    /// skeleton matching.
    pub fn is_canonical_skeleton(&self) -> bool {
        self.canonical_skeleton_frame() && self.core().is_skeleton_matching()
    }

    /// Same frame, but the dependency graph is taken on the diagram's own arcs.
    pub fn is_canonical_skeleton_arc_level(&self) -> bool {
        self.canonical_skeleton_frame() && self.arcs.len() >= 2 && self.dependency_graph_connected()
    }

    fn canonical_skeleton_frame(&self) -> bool {
        let p = self.partners();
        self.n >= 2
            && p[1] != 0
            && p[self.n] != 0
            && self.min_arc_length().map_or(false, |l| l >= 4)
            && self.is_canonical(3)
            && self.is_k_noncrossing(3)
    }

    fn drop_isolated(&self) -> Self {
        let p = self.partners();
        let mut label = vec![0; self.n + 1];
        let mut next = 0;
        for v in 1..=self.n {
            if p[v] != 0 {
                next += 1;
                label[v] = next;
            }
        }
        let arcs = self.arcs.iter().map(|&(i, j)| (label[i], label[j])).collect();
        Self { n: next, arcs }
    }

    /// Repeatedly removes isolated vertices and collapses every stack to its
    /// outermost arc until nothing changes.
    pub fn core(&self) -> Self {
        let mut d = self.drop_isolated();
        loop {
            let p = d.partners();
            let arcs: Vec<(usize, usize)> = d
                .arcs
                .iter()
                .copied()
                .filter(|&(i, j)| !(i > 1 && j < d.n && p[i - 1] == j + 1))
                .collect();
            if arcs.len() == d.arcs.len() {
                return d;
            }
            d = Self { n: d.n, arcs }.drop_isolated();
        }
    }

    /// V_k-shape projection; identical to [`Diagram::core`].
    pub fn shape(&self) -> Self {
        self.core()
    }

    pub fn is_shape(&self) -> bool {
        self.is_matching() && self.stacks().iter().all(|&(_, l)| l == 1)
    }

    /// C1–C4 tally of a shape.
    pub fn classify_arcs(&self) -> Result<ArcClassTally> {
        if !self.is_shape() {
            return Err(Error::NotAShape);
        }
        let p = self.partners();
        let mut t = ArcClassTally { s: self.arcs.len(), ..Default::default() };
        let two_arc = |i: usize| i + 2 <= self.n && p[i] == i + 2;
        for &(i, j) in &self.arcs {
            match j - i {
                1 => t.u1 += 1,
                2 => {
                    if two_arc(i + 1) {
                        t.u2 += 1;
                    }
                }
                _ => {
                    // a 2-arc crossing (i,j) has its midpoint at i or at j
                    let left = i >= 2 && two_arc(i - 1);
                    let right = two_arc(j - 1);
                    match (left as u8) + (right as u8) {
                        1 => t.u3 += 1,
                        2 => t.u4 += 1,
                        _ => {}
                    }
                }
            }
        }
        Ok(t)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.n)?;
        for (i, j) in &self.arcs {
            write!(f, " ({i},{j})")?;
        }
        Ok(())
    }
}

impl FromStr for Diagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad diagram {s:?}"));
        let (n, rest) = s.split_once(';').ok_or_else(bad)?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let mut arcs = Vec::new();
        for tok in rest.split_whitespace() {
            let inner = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
            let (i, j) = inner.split_once(',').ok_or_else(bad)?;
            arcs.push((i.trim().parse().map_err(|_| bad())?, j.trim().parse().map_err(|_| bad())?));
        }
        Self::new(n, arcs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extra {
    None,
    Irreducible,
    SkeletonMatching,
    CanonicalSkeleton,
    CanonicalSkeletonArcLevel,
}

/// Enumeration filter. The structural fields drive pruning; `accepts` is
/// still evaluated in full on every completed diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Query {
    /// Forbid k-crossings (None: no bound).
    pub k: Option<usize>,
    pub perfect: bool,
    pub min_arc_len: usize,
    pub min_stack: usize,
    pub max_stack: Option<usize>,
    pub extra: Extra,
}

impl Query {
    pub fn all() -> Self {
        Self { k: None, perfect: false, min_arc_len: 1, min_stack: 1, max_stack: None, extra: Extra::None }
    }

    pub fn matching(k: usize) -> Self {
        Self { k: Some(k), perfect: true, ..Self::all() }
    }

    pub fn modular(k: usize) -> Self {
        Self { k: Some(k), min_arc_len: 4, min_stack: 2, ..Self::all() }
    }

    /// Noncrossing diagrams with every arc of length ≥ min_len.
    pub fn secondary(min_len: usize) -> Self {
        Self { k: Some(2), min_arc_len: min_len.max(1), ..Self::all() }
    }

    pub fn shape(k: usize) -> Self {
        Self { k: Some(k), perfect: true, max_stack: Some(1), ..Self::all() }
    }

    pub fn irreducible(k: usize) -> Self {
        Self { extra: Extra::Irreducible, ..Self::matching(k) }
    }

    pub fn skeleton_matching(k: usize) -> Self {
        Self { extra: Extra::SkeletonMatching, ..Self::matching(k) }
    }

    pub fn canonical_skeleton() -> Self {
        Self { k: Some(3), min_arc_len: 4, min_stack: 3, extra: Extra::CanonicalSkeleton, ..Self::all() }
    }

    pub fn canonical_skeleton_arc_level() -> Self {
        Self { extra: Extra::CanonicalSkeletonArcLevel, ..Self::canonical_skeleton() }
    }

    pub fn accepts(&self, d: &Diagram) -> bool {
        if self.perfect && !d.is_matching() {
            return false;
        }
        if let Some(k) = self.k {
            if !d.is_k_noncrossing(k) {
                return false;
            }
        }
        if d.min_arc_length().is_some_and(|l| l < self.min_arc_len) {
            return false;
        }
        let stacks = d.stacks();
        if stacks.iter().any(|&(_, l)| l < self.min_stack || self.max_stack.is_some_and(|m| l > m)) {
            return false;
        }
        match self.extra {
            Extra::None => true,
            Extra::Irreducible => d.is_irreducible(),
            Extra::SkeletonMatching => d.is_skeleton_matching(),
            Extra::CanonicalSkeleton => d.is_canonical_skeleton(),
            Extra::CanonicalSkeletonArcLevel => d.is_canonical_skeleton_arc_level(),
        }
    }
}

struct Search<'q> {
    n: usize,
    q: &'q Query,
    partner: Vec<usize>,
}

impl Search<'_> {
    fn k_crossing_with(&self, v: usize, w: usize) -> bool {
        let Some(k) = self.q.k else { return false };
        if k < 2 {
            return true;
        }
        // placed arcs (u, r) with u < v < r < w, in left order; the new arc
        // closes a k-crossing iff their rights contain an increasing run of k-1
        let mut tails: Vec<usize> = Vec::new();
        for u in 1..v {
            let r = self.partner[u];
            if r > v && r < w {
                let pos = tails.partition_point(|&t| t < r);
                if pos == tails.len() {
                    tails.push(r);
                    if tails.len() + 1 >= k {
                        return true;
                    }
                } else {
                    tails[pos] = r;
                }
            }
        }
        false
    }

    fn stack_len_above(&self, v: usize) -> usize {
        let mut len = 1;
        let mut i = v;
        let mut j = self.partner[v];
        while i > 1 && j < self.n && self.partner[i - 1] == j + 1 {
            len += 1;
            i -= 1;
            j += 1;
        }
        len
    }

    fn run<A>(&mut self, v: usize, acc: &mut A, visit: &(impl Fn(&mut A, &Diagram) + Sync)) {
        if v > self.n {
            let arcs = (1..=self.n).filter(|&i| self.partner[i] > i).map(|i| (i, self.partner[i])).collect();
            let d = Diagram { n: self.n, arcs };
            if self.q.accepts(&d) {
                visit(acc, &d);
            }
            return;
        }
        // stack forced to continue inward
        let mut forced = None;
        if v > 1 {
            let p = self.partner[v - 1];
            if p > v && self.stack_len_above(v - 1) < self.q.min_stack {
                forced = Some(p - 1);
            }
        }
        if self.partner[v] != 0 {
            if forced.is_none() {
                self.run(v + 1, acc, visit);
            }
            return;
        }
        if forced.is_none() && !self.q.perfect {
            self.run(v + 1, acc, visit);
        }
        let lo = v + self.q.min_arc_len;
        let range = match forced {
            Some(w) => w..=w,
            None => lo..=self.n,
        };
        for w in range {
            if w < lo || w > self.n || self.partner[w] != 0 {
                continue;
            }
            if self.q.max_stack == Some(1) && v > 1 && w < self.n && self.partner[v - 1] == w + 1 {
                continue;
            }
            if self.k_crossing_with(v, w) {
                continue;
            }
            self.partner[v] = w;
            self.partner[w] = v;
            self.run(v + 1, acc, visit);
            self.partner[v] = 0;
            self.partner[w] = 0;
        }
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OracleLimit { n, limit });
    }
    Ok(())
}

/// Folds every accepted diagram on [n] into an accumulator. Branches on
/// vertex 1 run in parallel and are merged in a fixed order.
pub fn enumerate_fold<A, I, V, M>(n: usize, q: &Query, limit: usize, identity: I, visit: V, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &Diagram) + Sync,
    M: Fn(A, A) -> A,
{
    check_limit(n, limit)?;
    if n == 0 {
        let mut acc = identity();
        let d = Diagram::empty(0);
        if q.accepts(&d) {
            visit(&mut acc, &d);
        }
        return Ok(acc);
    }
    // branch 0: vertex 1 isolated; branch w: vertex 1 paired with w
    let mut branches: Vec<usize> = if q.perfect { Vec::new() } else { vec![0] };
    branches.extend(1 + q.min_arc_len..=n);
    let parts: Vec<A> = branches
        .par_iter()
        .map(|&w| {
            let mut s = Search { n, q, partner: vec![0; n + 2] };
            let mut acc = identity();
            if w != 0 {
                s.partner[1] = w;
                s.partner[w] = 1;
            }
            s.run(2, &mut acc, &visit);
            acc
        })
        .collect();
    let mut out = identity();
    for p in parts {
        out = merge(out, p);
    }
    Ok(out)
}

pub fn enumerate_count(n: usize, q: &Query) -> Result<u64> {
    enumerate_count_with_limit(n, q, DEFAULT_LIMIT)
}

pub fn enumerate_count_with_limit(n: usize, q: &Query, limit: usize) -> Result<u64> {
    enumerate_fold(n, q, limit, || 0u64, |c, _| *c += 1, |a, b| a + b)
}

/// Accepted diagrams in lexicographic order of their partner sequences.
pub fn enumerate_list(n: usize, q: &Query, limit: usize) -> Result<Vec<Diagram>> {
    enumerate_fold(n, q, limit, Vec::new, |v, d| v.push(d.clone()), |mut a, mut b| {
        a.append(&mut b);
        a
    })
}

/// Counts of accepted diagrams grouped by `key`.
pub fn histogram<K, F>(n: usize, q: &Query, limit: usize, key: F) -> Result<BTreeMap<K, u64>>
where
    K: Ord + Send,
    F: Fn(&Diagram) -> K + Sync,
{
    enumerate_fold(
        n,
        q,
        limit,
        BTreeMap::new,
        |m, d| *m.entry(key(d)).or_insert(0) += 1,
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        },
    )
}

/// `n,count` rows for n = 0..=n_max.
pub fn counts_csv(n_max: usize, q: &Query, limit: usize) -> Result<String> {
    let mut s = String::from("n,count\n");
    for n in 0..=n_max {
        s.push_str(&format!("{n},{}\n", enumerate_count_with_limit(n, q, limit)?));
    }
    Ok(s)
}
