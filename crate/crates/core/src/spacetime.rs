//! Minkowski geometry in 1+1 dimensions.
//!
//! Events live in a fixed lab frame with natural units (c = 1). The causal
//! machinery here — intervals, light-cone classification, boosts, surface
//! sides and the causal partial order — drives every collapse ordering in
//! the rest of the crate.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A point in 1+1 Minkowski spacetime, lab-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn new(t: f64, x: f64) -> Self {
        Event { t, x }
    }
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.t, self.x)
    }
}

/// Causal relation of `e2` as seen from `e1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalRelation {
    TimelikePast,
    LightlikePast,
    Spacelike,
    LightlikeFuture,
    TimelikeFuture,
    Coincident,
}

impl CausalRelation {
    /// True if `e2` is in the causal past of `e1` (timelike or lightlike).
    pub fn is_past(self) -> bool {
        matches!(self, CausalRelation::TimelikePast | CausalRelation::LightlikePast)
    }

    /// True if `e2` is in the causal future of `e1` (timelike or lightlike).
    pub fn is_future(self) -> bool {
        matches!(self, CausalRelation::TimelikeFuture | CausalRelation::LightlikeFuture)
    }
}

/// Squared invariant interval (Δt)² − (Δx)².
pub fn interval(e1: Event, e2: Event) -> f64 {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    dt * dt - dx * dx
}

/// Classify `e2` relative to `e1` by the sign of the interval and of Δt.
pub fn causal_relation(e1: Event, e2: Event) -> CausalRelation {
    if e1 == e2 {
        return CausalRelation::Coincident;
    }
    let s = interval(e1, e2);
    let dt = e2.t - e1.t;
    if s > 0.0 {
        if dt > 0.0 {
            CausalRelation::TimelikeFuture
        } else {
            CausalRelation::TimelikePast
        }
    } else if s < 0.0 {
        CausalRelation::Spacelike
    } else if dt > 0.0 {
        CausalRelation::LightlikeFuture
    } else {
        CausalRelation::LightlikePast
    }
}

/// Active Lorentz boost with rapidity `phi`:
/// (t,x) ↦ (t·coshφ − x·sinhφ, x·coshφ − t·sinhφ).
pub fn boost(e: Event, rapidity: f64) -> Event {
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    Event {
        t: e.t * ch - e.x * sh,
        x: e.x * ch - e.t * sh,
    }
}

/// A surface usable for state assignment.
///
/// Light cones are admitted as limiting cases of space-like surfaces. The
/// union-of-backward-cones surface is read as lying immediately *after* the
/// union, so cone boundaries count as before it.
#[derive(Debug, Clone, PartialEq)]
pub enum CausalSurface {
    /// Constant-time surface t = t0 in the frame reached by `rapidity`.
    Flat { t0: f64, rapidity: f64 },
    /// σ(P): backward light cone with vertex P.
    BackwardCone(Event),
    /// η(P): forward light cone with vertex P.
    ForwardCone(Event),
    /// σ(P₁,…,Pₙ): surface immediately after the union of the backward cones.
    UnionBackwardCones(Vec<Event>),
}

impl CausalSurface {
    pub fn flat(t0: f64, rapidity: f64) -> Self {
        CausalSurface::Flat { t0, rapidity }
    }

    /// Builds the union surface, deduplicating vertices.
    pub fn union_backward_cones(vertices: Vec<Event>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Geometry("union surface needs at least one vertex".into()));
        }
        let mut dedup: Vec<Event> = Vec::new();
        for v in vertices {
            if !dedup.contains(&v) {
                dedup.push(v);
            }
        }
        Ok(CausalSurface::UnionBackwardCones(dedup))
    }

    pub fn side_of(&self, e: Event) -> SurfaceSide {
        side_of_surface(e, self)
    }
}

impl std::fmt::Display for CausalSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CausalSurface::Flat { t0, rapidity } => write!(f, "flat({t0},{rapidity})"),
            CausalSurface::BackwardCone(v) => write!(f, "sigma({v})"),
            CausalSurface::ForwardCone(v) => write!(f, "eta({v})"),
            CausalSurface::UnionBackwardCones(vs) => {
                write!(f, "sigma(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Which side of a surface an event lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceSide {
    Before,
    After,
    On,
}

/// Classifies an event against a surface.
///
/// Boundary conventions: the lightlike past of a cone vertex counts as
/// *before* σ(P) (the cone surface belongs to the collapsed side), while the
/// lightlike future of P counts as *not before* η(P). Only the vertex itself
/// is `On` a cone surface.
pub fn side_of_surface(e: Event, s: &CausalSurface) -> SurfaceSide {
    match s {
        CausalSurface::Flat { t0, rapidity } => {
            let tb = boost(e, *rapidity).t;
            if tb < *t0 {
                SurfaceSide::Before
            } else if tb > *t0 {
                SurfaceSide::After
            } else {
                SurfaceSide::On
            }
        }
        CausalSurface::BackwardCone(p) => {
            let rel = causal_relation(*p, e);
            if rel == CausalRelation::Coincident {
                SurfaceSide::On
            } else if rel.is_past() {
                SurfaceSide::Before
            } else {
                SurfaceSide::After
            }
        }
        CausalSurface::ForwardCone(p) => {
            let rel = causal_relation(*p, e);
            if rel == CausalRelation::Coincident {
                SurfaceSide::On
            } else if rel.is_future() {
                SurfaceSide::After
            } else {
                SurfaceSide::Before
            }
        }
        CausalSurface::UnionBackwardCones(vs) => {
            for v in vs {
                if side_of_surface(e, &CausalSurface::BackwardCone(*v)) == SurfaceSide::Before {
                    return SurfaceSide::Before;
                }
            }
            if vs.contains(&e) {
                SurfaceSide::On
            } else {
                SurfaceSide::After
            }
        }
    }
}

/// A strict causal partial order over an indexed event set.
#[derive(Debug, Clone)]
pub struct PartialOrder {
    n: usize,
    pairs: BTreeSet<(usize, usize)>,
}

impl PartialOrder {
    /// Builds an order from explicit pairs, taking the transitive closure.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut set: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        // Warshall closure; n is small everywhere this is used.
        loop {
            let mut added = false;
            let snapshot: Vec<_> = set.iter().copied().collect();
            for &(a, b) in &snapshot {
                for &(c, d) in &snapshot {
                    if b == c && set.insert((a, d)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        PartialOrder { n, pairs: set }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// True if the given total order lists every index once and never places
    /// a successor before its predecessor.
    pub fn respects(&self, lin: &[usize]) -> bool {
        if lin.len() != self.n {
            return false;
        }
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in lin.iter().enumerate() {
            if i >= self.n || pos[i] != usize::MAX {
                return false;
            }
            pos[i] = k;
        }
        self.pairs.iter().all(|&(i, j)| pos[i] < pos[j])
    }

    /// The lexicographically smallest linearization (Kahn, min index first).
    pub fn min_linearization(&self) -> Result<Vec<usize>> {
        self.linearization_by_key(|i| i)
    }

    /// Kahn's algorithm choosing the available node with the smallest key.
    /// Always yields a valid linearization; errors on cycles.
    pub fn linearization_by_key<K: Ord>(&self, key: impl Fn(usize) -> K) -> Result<Vec<usize>> {
        let mut remaining: BTreeSet<usize> = (0..self.n).collect();
        let mut out = Vec::with_capacity(self.n);
        while !remaining.is_empty() {
            let next = remaining
                .iter()
                .copied()
                .filter(|&j| !remaining.iter().any(|&i| i != j && self.precedes(i, j)))
                .min_by(|&a, &b| key(a).cmp(&key(b)).then(a.cmp(&b)));
            match next {
                Some(j) => {
                    remaining.remove(&j);
                    out.push(j);
                }
                None => return Err(Error::Geometry("cycle detected in causal order".into())),
            }
        }
        Ok(out)
    }
}

/// The causal partial order of a set of pairwise distinct events:
/// i ≺ j iff eᵢ is in the causal past of eⱼ.
pub fn causal_partial_order(events: &[Event]) -> Result<PartialOrder> {
    for (i, a) in events.iter().enumerate() {
        for b in events.iter().skip(i + 1) {
            if a == b {
                return Err(Error::Geometry(format!("duplicate event {a}")));
            }
        }
    }
    let mut pairs = BTreeSet::new();
    for (i, a) in events.iter().enumerate() {
        for (j, b) in events.iter().enumerate() {
            if i != j && causal_relation(*b, *a).is_past() {
                pairs.insert((i, j));
            }
        }
    }
    Ok(PartialOrder { n: events.len(), pairs })
}

/// All topological sorts of `order`, or a deterministic prefix of them when
/// `cap` is given (DFS in ascending index order).
pub fn linearizations(order: &PartialOrder, cap: Option<usize>) -> Result<Vec<Vec<usize>>> {
    // Cycle check up front so callers get an error rather than an empty list.
    order.min_linearization()?;
    let n = order.len();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn dfs(
        order: &PartialOrder,
        used: &mut [bool],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: Option<usize>,
    ) {
        if let Some(c) = cap {
            if out.len() >= c {
                return;
            }
        }
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for j in 0..n {
            if used[j] {
                continue;
            }
            if (0..n).any(|i| !used[i] && order.precedes(i, j)) {
                continue;
            }
            used[j] = true;
            prefix.push(j);
            dfs(order, used, prefix, out, cap);
            prefix.pop();
            used[j] = false;
        }
    }
    dfs(order, &mut used, &mut prefix, &mut out, cap);
    Ok(out)
}
