//! Graded Bratteli diagrams, morphisms between them, path enumeration,
//! telescoping, simplicity and unique path lifting.
//!
//! A diagram stores its declared levels `1..=L`. A stationary diagram repeats
//! level `L` forever, so every level query past `L` resolves to the stored
//! block and the diagram has no depth limit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub range: usize,
}

impl Edge {
    pub fn new(source: usize, range: usize) -> Self {
        Self { source, range }
    }
}

/// A finite edge sequence: `edges[j]` is an edge of level `start_level + 1 + j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub start_level: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn new(start_level: usize, edges: Vec<usize>) -> Self {
        Self { start_level, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end_level(&self) -> usize {
        self.start_level + self.edges.len()
    }

    /// Level of the `j`-th edge.
    pub fn level_of(&self, j: usize) -> usize {
        self.start_level + 1 + j
    }

    /// The sub-path from level `from` to level `to`.
    pub fn segment(&self, from: usize, to: usize) -> Path {
        let a = from - self.start_level;
        let b = to - self.start_level;
        Path::new(from, self.edges[a..b].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    RootSize { size: usize },
    EmptyLevel { level: usize },
    SourceOutOfRange { level: usize, edge: usize, source: usize },
    RangeOutOfRange { level: usize, edge: usize, range: usize },
    NoIncoming { level: usize, vertex: usize },
    NoOutgoing { level: usize, vertex: usize },
    StationaryShape { level: usize, below: usize, above: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootSize { size } => write!(f, "level 0 has {size} vertices, expected 1"),
            Violation::EmptyLevel { level } => write!(f, "level {level} has no vertices"),
            Violation::SourceOutOfRange { level, edge, source } => {
                write!(f, "level {level} edge {edge}: source {source} out of range")
            }
            Violation::RangeOutOfRange { level, edge, range } => {
                write!(f, "level {level} edge {edge}: range {range} out of range")
            }
            Violation::NoIncoming { level, vertex } => {
                write!(f, "level {level} vertex {vertex}: r^-1(v) empty")
            }
            Violation::NoOutgoing { level, vertex } => {
                write!(f, "level {level} vertex {vertex}: s^-1(v) empty")
            }
            Violation::StationaryShape { level, below, above } => write!(
                f,
                "stationary block at level {level} maps {below} vertices to {above}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of a simplicity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Simplicity {
    /// Every vertex of `V_n` reaches every vertex of `V_{n+gap}`, for all tested `n`.
    /// `exact` is set when the verdict covers every level.
    Simple { gap: usize, exact: bool },
    NotEstablished { max_gap: usize, depth: usize },
    Refuted,
}

impl Simplicity {
    pub fn gap(&self) -> Option<usize> {
        match self {
            Simplicity::Simple { gap, .. } => Some(*gap),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    level_sizes: Vec<usize>,
    edges: Vec<Vec<Edge>>,
    stationary: bool,
    incoming: Vec<Vec<Vec<usize>>>,
    outgoing: Vec<Vec<Vec<usize>>>,
}

impl BratteliDiagram {
    /// Builds a diagram without validating it. `edges[k]` lists the edges of level
    /// `k + 1`; endpoints out of range are kept and reported by [`validate`](Self::validate).
    pub fn from_levels(mut level_sizes: Vec<usize>, edges: Vec<Vec<Edge>>, stationary: bool) -> Self {
        level_sizes.resize(edges.len() + 1, 0);
        let mut all = Vec::with_capacity(edges.len() + 1);
        all.push(Vec::new());
        all.extend(edges);
        let mut d = Self {
            level_sizes,
            edges: all,
            stationary,
            incoming: Vec::new(),
            outgoing: Vec::new(),
        };
        d.rebuild_caches();
        d
    }

    /// Builds and validates a diagram.
    pub fn new(level_sizes: Vec<usize>, edges: Vec<Vec<Edge>>, stationary: bool) -> Result<Self> {
        let d = Self::from_levels(level_sizes, edges, stationary);
        let report = d.validate();
        match report.violations.first() {
            None => Ok(d),
            Some(v) => Err(Error::Argument(v.to_string())),
        }
    }

    fn rebuild_caches(&mut self) {
        let depth = self.edges.len() - 1;
        self.incoming = vec![Vec::new()];
        self.outgoing = vec![Vec::new()];
        for n in 1..=depth {
            let mut inc = vec![Vec::new(); self.level_sizes[n]];
            let mut out = vec![Vec::new(); self.level_sizes[n - 1]];
            for (i, e) in self.edges[n].iter().enumerate() {
                if let Some(list) = inc.get_mut(e.range) {
                    list.push(i);
                }
                if let Some(list) = out.get_mut(e.source) {
                    list.push(i);
                }
            }
            self.incoming.push(inc);
            self.outgoing.push(out);
        }
    }

    /// The odometer with `k` parallel edges per level.
    pub fn odometer(k: usize) -> Result<Self> {
        Self::new(vec![1, 1], vec![vec![Edge::new(0, 0); k]], true)
    }

    pub fn declared_depth(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// `None` for stationary diagrams, which extend indefinitely.
    pub fn depth_limit(&self) -> Option<usize> {
        if self.stationary {
            None
        } else {
            Some(self.declared_depth())
        }
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.stationary || n <= self.declared_depth()
    }

    pub fn require_level(&self, n: usize) -> Result<()> {
        if self.has_level(n) {
            Ok(())
        } else {
            Err(Error::Depth {
                requested: n,
                materialized: self.declared_depth(),
            })
        }
    }

    /// Index of the stored level that level `n` resolves to.
    #[inline]
    pub fn block(&self, n: usize) -> usize {
        let depth = self.declared_depth();
        if n <= depth {
            n
        } else {
            assert!(self.stationary, "level {n} beyond finite depth {depth}");
            depth
        }
    }

    pub fn level_size(&self, n: usize) -> usize {
        self.level_sizes[self.block(n)]
    }

    /// Vertex counts of the declared levels `0..=L`.
    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn edges(&self, n: usize) -> &[Edge] {
        &self.edges[self.block(n)]
    }

    #[inline]
    pub fn edge(&self, n: usize, e: usize) -> Edge {
        self.edges[self.block(n)][e]
    }

    /// Edges of level `n` ranging at `v`, in declaration order.
    pub fn incoming(&self, n: usize, v: usize) -> &[usize] {
        &self.incoming[self.block(n)][v]
    }

    /// Edges of level `n + 1` whose source is vertex `v` of level `n`.
    pub fn outgoing(&self, n: usize, v: usize) -> &[usize] {
        &self.outgoing[self.block(n + 1)][v]
    }

    /// `M[s][r]` counts the edges of level `n` from `s ∈ V_{n-1}` to `r ∈ V_n`.
    pub fn incidence(&self, n: usize) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.level_size(n)]; self.level_size(n - 1)];
        for e in self.edges(n) {
            m[e.source][e.range] += 1;
        }
        m
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.level_sizes[0] != 1 {
            violations.push(Violation::RootSize {
                size: self.level_sizes[0],
            });
        }
        let depth = self.declared_depth();
        for n in 1..=depth {
            if self.level_sizes[n] == 0 {
                violations.push(Violation::EmptyLevel { level: n });
            }
            for (i, e) in self.edges[n].iter().enumerate() {
                if e.source >= self.level_sizes[n - 1] {
                    violations.push(Violation::SourceOutOfRange {
                        level: n,
                        edge: i,
                        source: e.source,
                    });
                }
                if e.range >= self.level_sizes[n] {
                    violations.push(Violation::RangeOutOfRange {
                        level: n,
                        edge: i,
                        range: e.range,
                    });
                }
            }
            for v in 0..self.level_sizes[n] {
                if self.incoming[n][v].is_empty() {
                    violations.push(Violation::NoIncoming { level: n, vertex: v });
                }
            }
        }
        for n in 0..depth {
            for v in 0..self.level_sizes[n] {
                if self.outgoing[n + 1].get(v).is_none_or(|o| o.is_empty()) {
                    violations.push(Violation::NoOutgoing { level: n, vertex: v });
                }
            }
        }
        if self.stationary && depth >= 1 {
            for v in 0..self.level_sizes[depth] {
                if self.outgoing[depth].get(v).is_none_or(|o| o.is_empty()) {
                    violations.push(Violation::NoOutgoing { level: depth, vertex: v });
                }
            }
        }
        if self.stationary && depth >= 1 && self.level_sizes[depth] != self.level_sizes[depth - 1] {
            violations.push(Violation::StationaryShape {
                level: depth,
                below: self.level_sizes[depth - 1],
                above: self.level_sizes[depth],
            });
        }
        if self.stationary && depth == 0 {
            violations.push(Violation::EmptyLevel { level: 1 });
        }
        ValidationReport { violations }
    }

    /// A finite copy holding levels `0..=depth`.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        self.require_level(depth)?;
        let sizes = (0..=depth).map(|n| self.level_size(n)).collect();
        let edges = (1..=depth).map(|n| self.edges(n).to_vec()).collect();
        Ok(Self::from_levels(sizes, edges, false))
    }

    /// Checks that `p` is a path of this diagram.
    pub fn check_path(&self, p: &Path) -> Result<()> {
        for (j, &e) in p.edges.iter().enumerate() {
            let n = p.level_of(j);
            self.require_level(n)?;
            if e >= self.edges(n).len() {
                return Err(Error::Argument(format!("level {n} has no edge {e}")));
            }
            if j > 0 && self.edge(n, e).source != self.edge(n - 1, p.edges[j - 1]).range {
                return Err(Error::Argument(format!(
                    "edge {e} at level {n} does not continue the path"
                )));
            }
        }
        Ok(())
    }

    pub fn path_source(&self, p: &Path) -> Option<usize> {
        p.edges.first().map(|&e| self.edge(p.start_level + 1, e).source)
    }

    pub fn path_range(&self, p: &Path) -> Option<usize> {
        p.edges.last().map(|&e| self.edge(p.end_level(), e).range)
    }

    /// Number of paths from any vertex of level `from` to vertex `v` of level `m`,
    /// saturating at `u128::MAX`.
    pub fn path_count(&self, from: usize, m: usize, v: usize) -> u128 {
        if m == from {
            return 1;
        }
        let mut counts = vec![1u128; self.level_size(from)];
        for n in from + 1..=m {
            let mut next = vec![0u128; self.level_size(n)];
            for e in self.edges(n) {
                next[e.range] = next[e.range].saturating_add(counts[e.source]);
            }
            counts = next;
        }
        counts[v]
    }

    /// Tower heights `h(v)` = number of root-to-`v` paths, for every vertex of level `m`.
    pub fn heights(&self, m: usize) -> Vec<u128> {
        let mut counts = vec![1u128];
        for n in 1..=m {
            let mut next = vec![0u128; self.level_size(n)];
            for e in self.edges(n) {
                next[e.range] = next[e.range].saturating_add(counts[e.source]);
            }
            counts = next;
        }
        counts
    }

    /// All paths from level `from` to vertex `v` of level `m`, sorted with the
    /// highest-level edge most significant and declaration order on each `r⁻¹`.
    pub fn enumerate_paths(&self, from: usize, m: usize, v: usize) -> Result<Vec<Path>> {
        self.require_level(m)?;
        if from >= m {
            return Err(Error::Argument(format!("from_level {from} must be below level {m}")));
        }
        if v >= self.level_size(m) {
            return Err(Error::Argument(format!("level {m} has no vertex {v}")));
        }
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(m - from);
        self.collect_paths(from, m, v, &mut stack, &mut out);
        Ok(out)
    }

    fn collect_paths(&self, from: usize, n: usize, v: usize, stack: &mut Vec<usize>, out: &mut Vec<Path>) {
        if n == from {
            let mut edges = stack.clone();
            edges.reverse();
            out.push(Path::new(from, edges));
            return;
        }
        for &e in self.incoming(n, v) {
            stack.push(e);
            self.collect_paths(from, n - 1, self.edge(n, e).source, stack, out);
            stack.pop();
        }
    }

    /// Contracts the diagram to the levels in `cuts`; new edges are the paths between
    /// consecutive cut levels, grouped by range vertex.
    pub fn telescope(&self, cuts: &[usize]) -> Result<Telescoping> {
        if cuts.first() != Some(&0) {
            return Err(Error::Argument("telescoping cuts must start at level 0".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("telescoping cuts must be strictly increasing".into()));
        }
        self.require_level(*cuts.last().unwrap())?;
        let mut sizes = vec![1];
        let mut edges = Vec::new();
        let mut paths = vec![Vec::new()];
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            sizes.push(self.level_size(hi));
            let mut level_edges = Vec::new();
            let mut level_paths = Vec::new();
            for v in 0..self.level_size(hi) {
                for p in self.enumerate_paths(lo, hi, v)? {
                    level_edges.push(Edge::new(self.path_source(&p).unwrap(), v));
                    level_paths.push(p);
                }
            }
            edges.push(level_edges);
            paths.push(level_paths);
        }
        Ok(Telescoping {
            diagram: Self::from_levels(sizes, edges, false),
            cuts: cuts.to_vec(),
            paths,
        })
    }

    /// Simplicity: exact for stationary diagrams, bounded by the declared depth otherwise.
    pub fn check_simple(&self, max_gap: usize) -> Simplicity {
        if self.stationary {
            self.check_simple_exact()
        } else {
            self.check_simple_bounded(max_gap, self.declared_depth())
        }
    }

    /// Bounded verdict over levels `0..=depth`: the least `g ≤ max_gap` that connects
    /// `V_n` fully to `V_{n+g}` for every `n ≤ depth - max_gap`.
    pub fn check_simple_bounded(&self, max_gap: usize, depth: usize) -> Simplicity {
        let not_established = Simplicity::NotEstablished { max_gap, depth };
        if max_gap == 0 || !self.has_level(depth) || depth == 0 {
            return not_established;
        }
        let last_start = depth.saturating_sub(max_gap);
        let mut gap = 0;
        for n in 0..=last_start {
            match self.connection_gap(n, max_gap.min(depth - n)) {
                Some(g) => gap = gap.max(g),
                None => return not_established,
            }
        }
        Simplicity::Simple { gap, exact: false }
    }

    fn check_simple_exact(&self) -> Simplicity {
        let depth = self.declared_depth();
        let block = self.incidence(depth);
        let size = block.len();
        let wielandt = (size - 1) * (size - 1) + 1;
        let exponent = match primitive_exponent(&block, wielandt) {
            Some(e) => e,
            None => return Simplicity::Refuted,
        };
        let mut gap = exponent;
        for n in 0..depth.saturating_sub(1) {
            match self.connection_gap(n, depth - n + exponent) {
                Some(g) => gap = gap.max(g),
                None => return Simplicity::Refuted,
            }
        }
        Simplicity::Simple { gap, exact: true }
    }

    /// Least `g ≤ cap` such that every vertex of `V_n` reaches every vertex of `V_{n+g}`.
    fn connection_gap(&self, n: usize, cap: usize) -> Option<usize> {
        let rows = self.level_size(n);
        let mut reach: Vec<Vec<bool>> = (0..rows)
            .map(|i| (0..rows).map(|j| i == j).collect())
            .collect();
        for g in 1..=cap {
            let level = n + g;
            let mut next = vec![vec![false; self.level_size(level)]; rows];
            for e in self.edges(level) {
                for (row, next_row) in reach.iter().zip(next.iter_mut()) {
                    if row[e.source] {
                        next_row[e.range] = true;
                    }
                }
            }
            reach = next;
            if reach.iter().all(|row| row.iter().all(|&x| x)) {
                return Some(g);
            }
        }
        None
    }

    pub fn identity_morphism(&self) -> DiagramMorphism {
        let depth = self.declared_depth();
        DiagramMorphism {
            vertex_map: (0..=depth).map(|n| (0..self.level_sizes[n]).collect()).collect(),
            edge_map: (0..=depth).map(|n| (0..self.edges[n].len()).collect()).collect(),
            stationary: self.stationary,
        }
    }
}

/// Least `k ≤ bound` with `M^k` entrywise positive.
pub fn primitive_exponent(m: &[Vec<u64>], bound: usize) -> Option<usize> {
    let n = m.len();
    let base: Vec<Vec<bool>> = m.iter().map(|r| r.iter().map(|&x| x > 0).collect()).collect();
    let mut power = base.clone();
    for k in 1..=bound {
        if power.iter().all(|r| r.iter().all(|&x| x)) {
            return Some(k);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for l in 0..n {
                if power[i][l] {
                    for j in 0..n {
                        if base[l][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    None
}

#[derive(Debug, Clone)]
pub struct Telescoping {
    pub diagram: BratteliDiagram,
    pub cuts: Vec<usize>,
    /// `paths[k][e]` is the path of the input underlying edge `e` of new level `k`.
    pub paths: Vec<Vec<Path>>,
}

/// Grading-preserving vertex and edge maps. Stationary morphisms repeat their
/// last level, like stationary diagrams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramMorphism {
    pub vertex_map: Vec<Vec<usize>>,
    pub edge_map: Vec<Vec<usize>>,
    pub stationary: bool,
}

impl DiagramMorphism {
    pub fn declared_depth(&self) -> usize {
        self.vertex_map.len() - 1
    }

    fn block(&self, n: usize) -> usize {
        let depth = self.declared_depth();
        if n <= depth {
            n
        } else {
            assert!(self.stationary, "morphism level {n} beyond finite depth {depth}");
            depth
        }
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.stationary || n <= self.declared_depth()
    }

    #[inline]
    pub fn vertex(&self, n: usize, v: usize) -> usize {
        self.vertex_map[self.block(n)][v]
    }

    #[inline]
    pub fn edge(&self, n: usize, e: usize) -> usize {
        self.edge_map[self.block(n)][e]
    }

    pub fn map_path(&self, p: &Path) -> Path {
        Path::new(
            p.start_level,
            p.edges.iter().enumerate().map(|(j, &e)| self.edge(p.level_of(j), e)).collect(),
        )
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &DiagramMorphism) -> DiagramMorphism {
        let stationary = self.stationary && other.stationary;
        let depth = match (self.stationary, other.stationary) {
            (true, true) => self.declared_depth().max(other.declared_depth()),
            (true, false) => other.declared_depth(),
            (false, true) => self.declared_depth(),
            (false, false) => self.declared_depth().min(other.declared_depth()),
        };
        let size = |n: usize| self.vertex_map[self.block(n)].len();
        let esize = |n: usize| self.edge_map[self.block(n)].len();
        DiagramMorphism {
            vertex_map: (0..=depth)
                .map(|n| (0..size(n)).map(|v| other.vertex(n, self.vertex(n, v))).collect())
                .collect(),
            edge_map: (0..=depth)
                .map(|n| (0..esize(n)).map(|e| other.edge(n, self.edge(n, e))).collect())
                .collect(),
            stationary,
        }
    }

    /// Levels a check must cover so that every stored level, and the first
    /// repetition of stationary blocks, is seen.
    pub fn check_depth(&self, src: &BratteliDiagram, dst: &BratteliDiagram) -> usize {
        let mut depth = self.declared_depth().max(src.declared_depth()).max(dst.declared_depth());
        if self.stationary && src.is_stationary() && dst.is_stationary() {
            depth += 1;
        }
        depth
    }

    /// Verifies grading, index ranges and `r(f(e)) = f(r(e))`, `s(f(e)) = f(s(e))`
    /// on levels `0..=depth`.
    pub fn check(&self, src: &BratteliDiagram, dst: &BratteliDiagram, depth: usize) -> Result<()> {
        for n in 0..=depth {
            if !src.has_level(n) || !dst.has_level(n) || !self.has_level(n) {
                return Err(Error::Depth {
                    requested: n,
                    materialized: src.declared_depth().min(dst.declared_depth()),
                });
            }
            let vm = &self.vertex_map[self.block(n)];
            if vm.len() != src.level_size(n) {
                return Err(Error::Morphism(format!(
                    "vertex map at level {n} has {} entries for {} vertices",
                    vm.len(),
                    src.level_size(n)
                )));
            }
            if let Some(v) = vm.iter().position(|&w| w >= dst.level_size(n)) {
                return Err(Error::Morphism(format!("vertex {v} at level {n} maps out of range")));
            }
            if n == 0 {
                continue;
            }
            let em = &self.edge_map[self.block(n)];
            if em.len() != src.edges(n).len() {
                return Err(Error::Morphism(format!(
                    "edge map at level {n} has {} entries for {} edges",
                    em.len(),
                    src.edges(n).len()
                )));
            }
            for (i, (&img, e)) in em.iter().zip(src.edges(n)).enumerate() {
                let f = *dst
                    .edges(n)
                    .get(img)
                    .ok_or_else(|| Error::Morphism(format!("edge {i} at level {n} maps out of range")))?;
                if f.range != self.vertex(n, e.range) {
                    return Err(Error::Morphism(format!("range not intertwined at level {n}, edge {i}")));
                }
                if f.source != self.vertex(n - 1, e.source) {
                    return Err(Error::Morphism(format!("source not intertwined at level {n}, edge {i}")));
                }
            }
        }
        Ok(())
    }

    /// Whether the vertex and edge maps are bijections on every level `0..=depth`.
    pub fn is_bijective(&self, src: &BratteliDiagram, dst: &BratteliDiagram, depth: usize) -> bool {
        (0..=depth).all(|n| {
            let vm = &self.vertex_map[self.block(n)];
            let em = &self.edge_map[self.block(n)];
            is_permutation_of(vm, dst.level_size(n)) && (n == 0 || is_permutation_of(em, dst.edges(n).len()))
                && vm.len() == src.level_size(n)
        })
    }

    /// Unique path lifting to `depth`, via the equivalent local condition: for every
    /// upstairs vertex `x`, the map restricts to a bijection `r⁻¹(x) → r⁻¹(f(x))`.
    pub fn check_unique_path_lifting(
        &self,
        up: &BratteliDiagram,
        down: &BratteliDiagram,
        depth: usize,
    ) -> LiftingVerdict {
        for n in 1..=depth {
            for x in 0..up.level_size(n) {
                let fx = self.vertex(n, x);
                for &d in down.incoming(n, fx) {
                    let lifts: Vec<usize> = up
                        .incoming(n, x)
                        .iter()
                        .copied()
                        .filter(|&e| self.edge(n, e) == d)
                        .collect();
                    if lifts.len() != 1 {
                        return LiftingVerdict::Fails(LiftFailure {
                            level: n,
                            upstairs_vertex: x,
                            downstairs_edge: d,
                            lifts,
                        });
                    }
                }
                // every upstairs edge maps into r⁻¹(f(x)) if the morphism is valid, so
                // the counts line up once each downstairs edge has one lift
            }
        }
        LiftingVerdict::Holds { depth }
    }

    /// The unique upstairs path over `path` ranging at `target`.
    pub fn lift_path(
        &self,
        up: &BratteliDiagram,
        down: &BratteliDiagram,
        path: &Path,
        target: usize,
    ) -> Result<Path> {
        down.check_path(path)?;
        let top = path.end_level();
        if let Some(r) = down.path_range(path) {
            if self.vertex(top, target) != r {
                return Err(Error::Argument(format!(
                    "target {target} does not lie over the path's range {r}"
                )));
            }
        }
        let mut lifted = vec![0; path.len()];
        let mut x = target;
        for j in (0..path.len()).rev() {
            let n = path.level_of(j);
            let lifts: Vec<usize> = up
                .incoming(n, x)
                .iter()
                .copied()
                .filter(|&e| self.edge(n, e) == path.edges[j])
                .collect();
            match lifts.len() {
                0 => return Err(Error::NoLift { level: n, vertex: x, edge: path.edges[j] }),
                1 => {
                    lifted[j] = lifts[0];
                    x = up.edge(n, lifts[0]).source;
                }
                count => {
                    return Err(Error::AmbiguousLift {
                        level: n,
                        vertex: x,
                        edge: path.edges[j],
                        count,
                    })
                }
            }
        }
        Ok(Path::new(path.start_level, lifted))
    }
}

fn is_permutation_of(map: &[usize], size: usize) -> bool {
    if map.len() != size {
        return false;
    }
    let mut seen = vec![false; size];
    for &x in map {
        if x >= size || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftFailure {
    pub level: usize,
    pub upstairs_vertex: usize,
    pub downstairs_edge: usize,
    /// Upstairs edges into `upstairs_vertex` over `downstairs_edge`; empty for a missing lift.
    pub lifts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LiftingVerdict {
    Holds { depth: usize },
    Fails(LiftFailure),
}

impl LiftingVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LiftingVerdict::Holds { .. })
    }
}
