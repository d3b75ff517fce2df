//! Linear orders on incoming edges, the lexicographic path order, the Vershik
//! successor, proper-ordering checks and tower traces.
//!
//! Paths are compared with the highest-level edge most significant. Floors of a
//! tower are identified by the lexicographic rank of their root path, counted
//! from 0 at the minimal path.

use std::cmp::Ordering;

use serde::Serialize;

use crate::diagram::{BratteliDiagram, DiagramMorphism, Path, Simplicity, Telescoping};
use crate::error::{Error, Result};

/// Largest tower trace [`OrderedBratteliDiagram::tower_trace`] will materialize.
pub const MAX_TRACE_LENGTH: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "step", content = "path", rename_all = "kebab-case")]
pub enum Step {
    Next(Path),
    Maximal,
}

impl Step {
    pub fn next(self) -> Option<Path> {
        match self {
            Step::Next(p) => Some(p),
            Step::Maximal => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extremal {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProperMode {
    /// Decides exactly from the stationary block.
    ExactStationary,
    /// Counts the distinct truncations of extremal paths ending at this level.
    Bounded(usize),
}

/// Vertex sequence of the infinite extremal path: `prefix[n]` at level `n`, then
/// `tail` at every later level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Spine {
    pub prefix: Vec<usize>,
    pub tail: Option<usize>,
}

impl Spine {
    pub fn vertex(&self, level: usize) -> Option<usize> {
        self.prefix.get(level).copied().or(self.tail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProperOrdering {
    pub exact: bool,
    pub depth: Option<usize>,
    pub simplicity: Simplicity,
    /// Number of infinite all-maximal paths (exact) or of distinct truncations (bounded).
    pub max_paths: usize,
    pub min_paths: usize,
    pub max_spine: Option<Spine>,
    pub min_spine: Option<Spine>,
}

impl ProperOrdering {
    pub fn is_proper(&self) -> bool {
        matches!(self.simplicity, Simplicity::Simple { .. }) && self.max_paths == 1 && self.min_paths == 1
    }
}

/// One floor of a tower: the level-`n` vertex and the rank of the root path within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Floor {
    pub vertex: usize,
    pub rank: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TowerRun {
    pub vertex: usize,
    pub start: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerTrace {
    pub top_level: usize,
    pub top_vertex: usize,
    pub base_level: usize,
    pub floors: Vec<Floor>,
    #[serde(skip)]
    heights: Vec<u128>,
}

impl TowerTrace {
    /// Splits the trace into complete level-`n` towers, each bottom floor to top.
    /// `None` if the floors are not such a concatenation.
    pub fn runs(&self) -> Option<Vec<TowerRun>> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.floors.len() {
            let w = self.floors[i].vertex;
            let h = self.heights[w] as usize;
            if i + h > self.floors.len() {
                return None;
            }
            for (r, f) in self.floors[i..i + h].iter().enumerate() {
                if f.vertex != w || f.rank != r as u128 {
                    return None;
                }
            }
            runs.push(TowerRun {
                vertex: w,
                start: i,
                height: h,
            });
            i += h;
        }
        Some(runs)
    }

    /// Level-`n` towers in the order the trace passes through them.
    pub fn tower_sequence(&self) -> Option<Vec<usize>> {
        self.runs().map(|r| r.iter().map(|t| t.vertex).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedBratteliDiagram {
    diagram: BratteliDiagram,
    order: Vec<Vec<Vec<usize>>>,
    rank: Vec<Vec<usize>>,
}

impl OrderedBratteliDiagram {
    /// `order[k][v]` lists the edges of level `k + 1` ranging at `v`, smallest first;
    /// each list must be a permutation of that vertex's incoming edges.
    pub fn new(diagram: BratteliDiagram, order: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let depth = diagram.declared_depth();
        if order.len() != depth {
            return Err(Error::Argument(format!(
                "order given for {} levels of a depth-{depth} diagram",
                order.len()
            )));
        }
        let mut all = vec![Vec::new()];
        let mut rank = vec![Vec::new()];
        for (k, level) in order.into_iter().enumerate() {
            let n = k + 1;
            if level.len() != diagram.level_size(n) {
                return Err(Error::Argument(format!("order at level {n} covers {} vertices", level.len())));
            }
            let mut r = vec![usize::MAX; diagram.edges(n).len()];
            for (v, list) in level.iter().enumerate() {
                let mut sorted = list.clone();
                sorted.sort_unstable();
                if sorted != diagram.incoming(n, v) {
                    return Err(Error::NotAPermutation { level: n, vertex: v });
                }
                for (i, &e) in list.iter().enumerate() {
                    r[e] = i;
                }
            }
            all.push(level);
            rank.push(r);
        }
        Ok(Self {
            diagram,
            order: all,
            rank,
        })
    }

    /// Orders each `r⁻¹(v)` by edge declaration order.
    pub fn by_declaration(diagram: BratteliDiagram) -> Self {
        let depth = diagram.declared_depth();
        let order = (1..=depth)
            .map(|n| (0..diagram.level_size(n)).map(|v| diagram.incoming(n, v).to_vec()).collect())
            .collect();
        Self::new(diagram, order).expect("declaration order is a permutation")
    }

    /// Builds the order from per-edge ranks: `ranks[k][e]` is the position of edge `e`
    /// of level `k + 1` within its `r⁻¹`.
    pub fn with_ranks(diagram: BratteliDiagram, ranks: Vec<Vec<usize>>) -> Result<Self> {
        let depth = diagram.declared_depth();
        if ranks.len() != depth {
            return Err(Error::Argument("ranks must cover every declared level".into()));
        }
        let mut order = Vec::with_capacity(depth);
        for (k, r) in ranks.iter().enumerate() {
            let n = k + 1;
            if r.len() != diagram.edges(n).len() {
                return Err(Error::Argument(format!("ranks at level {n} cover {} edges", r.len())));
            }
            let mut level = Vec::with_capacity(diagram.level_size(n));
            for v in 0..diagram.level_size(n) {
                let inc = diagram.incoming(n, v);
                let mut list = vec![usize::MAX; inc.len()];
                for &e in inc {
                    match list.get_mut(r[e]) {
                        Some(slot) if *slot == usize::MAX => *slot = e,
                        _ => return Err(Error::NotAPermutation { level: n, vertex: v }),
                    }
                }
                level.push(list);
            }
            order.push(level);
        }
        Self::new(diagram, order)
    }

    pub fn diagram(&self) -> &BratteliDiagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> BratteliDiagram {
        self.diagram
    }

    /// Per-edge ranks of the declared levels `1..=L`.
    pub fn ranks(&self) -> &[Vec<usize>] {
        &self.rank[1..]
    }

    #[inline]
    pub fn rank(&self, n: usize, e: usize) -> usize {
        self.rank[self.diagram.block(n)][e]
    }

    /// `r⁻¹(v)` at level `n`, smallest edge first.
    pub fn ordered_incoming(&self, n: usize, v: usize) -> &[usize] {
        &self.order[self.diagram.block(n)][v]
    }

    pub fn extremal_edge(&self, n: usize, v: usize, which: Extremal) -> usize {
        let list = self.ordered_incoming(n, v);
        match which {
            Extremal::Min => list[0],
            Extremal::Max => list[list.len() - 1],
        }
    }

    pub fn is_maximal(&self, n: usize, e: usize) -> bool {
        let r = self.diagram.edge(n, e).range;
        self.rank(n, e) + 1 == self.ordered_incoming(n, r).len()
    }

    pub fn is_minimal(&self, n: usize, e: usize) -> bool {
        self.rank(n, e) == 0
    }

    /// The next edge in the same `r⁻¹`, if any.
    pub fn edge_successor(&self, n: usize, e: usize) -> Option<usize> {
        let r = self.diagram.edge(n, e).range;
        self.ordered_incoming(n, r).get(self.rank(n, e) + 1).copied()
    }

    /// Lexicographic comparison of two paths with the same start level and range.
    pub fn compare_paths(&self, a: &Path, b: &Path) -> Ordering {
        for j in (0..a.len().min(b.len())).rev() {
            let n = a.level_of(j);
            match self.rank(n, a.edges[j]).cmp(&self.rank(n, b.edges[j])) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        a.len().cmp(&b.len())
    }

    /// The all-maximal or all-minimal path from level `from` to vertex `v` of level `m`.
    pub fn extremal_path(&self, from: usize, m: usize, v: usize, which: Extremal) -> Path {
        let mut edges = vec![0; m - from];
        let mut x = v;
        for n in (from + 1..=m).rev() {
            let e = self.extremal_edge(n, x, which);
            edges[n - from - 1] = e;
            x = self.diagram.edge(n, e).source;
        }
        Path::new(from, edges)
    }

    /// The immediate successor of `p` among the paths from its start level to its range.
    pub fn successor_path(&self, p: &Path) -> Result<Step> {
        if p.is_empty() {
            return Err(Error::Argument("successor of an empty path".into()));
        }
        self.diagram.check_path(p)?;
        let Some(j) = (0..p.len()).find(|&j| !self.is_maximal(p.level_of(j), p.edges[j])) else {
            return Ok(Step::Maximal);
        };
        let n = p.level_of(j);
        let f = self.edge_successor(n, p.edges[j]).expect("non-maximal edge has a successor");
        let mut edges = self
            .extremal_path(p.start_level, n - 1, self.diagram.edge(n, f).source, Extremal::Min)
            .edges;
        edges.push(f);
        edges.extend_from_slice(&p.edges[j + 1..]);
        Ok(Step::Next(Path::new(p.start_level, edges)))
    }

    /// The Vershik successor of a root path; never wraps.
    pub fn vershik_step(&self, p: &Path) -> Result<Step> {
        if p.start_level != 0 {
            return Err(Error::Argument("vershik_step needs a path from the root".into()));
        }
        self.successor_path(p)
    }

    /// As [`vershik_step`](Self::vershik_step), but an all-maximal path wraps to the
    /// truncation of the infinite minimal path when `proper` certifies the order.
    pub fn vershik_step_wrapping(&self, p: &Path, proper: &ProperOrdering) -> Result<Step> {
        match self.vershik_step(p)? {
            Step::Maximal => {
                let m = p.end_level();
                match proper.min_spine.as_ref().and_then(|s| s.vertex(m)) {
                    Some(w) if proper.is_proper() => Ok(Step::Next(self.extremal_path(0, m, w, Extremal::Min))),
                    _ => Ok(Step::Maximal),
                }
            }
            step => Ok(step),
        }
    }

    pub fn check_properly_ordered(&self, mode: ProperMode) -> Result<ProperOrdering> {
        match mode {
            ProperMode::ExactStationary => self.proper_exact(),
            ProperMode::Bounded(depth) => self.proper_bounded(depth),
        }
    }

    fn proper_exact(&self) -> Result<ProperOrdering> {
        if !self.diagram.is_stationary() {
            return Err(Error::Mode("exact proper-ordering check needs a stationary diagram".into()));
        }
        let depth = self.diagram.declared_depth();
        let spine = |which| {
            let size = self.diagram.level_size(depth);
            let map: Vec<usize> = (0..size)
                .map(|v| self.diagram.edge(depth, self.extremal_edge(depth, v, which)).source)
                .collect();
            let periodic: Vec<usize> = (0..size)
                .filter(|&v| {
                    let mut x = map[v];
                    for _ in 0..size {
                        if x == v {
                            return true;
                        }
                        x = map[x];
                    }
                    false
                })
                .collect();
            let spine = (periodic.len() == 1).then(|| {
                let p = periodic[0];
                let top = depth - 1;
                let mut prefix = vec![0; top + 1];
                prefix[top] = p;
                for n in (1..=top).rev() {
                    prefix[n - 1] = self.diagram.edge(n, self.extremal_edge(n, prefix[n], which)).source;
                }
                Spine { prefix, tail: Some(p) }
            });
            (periodic.len(), spine)
        };
        let (max_paths, max_spine) = spine(Extremal::Max);
        let (min_paths, min_spine) = spine(Extremal::Min);
        Ok(ProperOrdering {
            exact: true,
            depth: None,
            simplicity: self.diagram.check_simple(0),
            max_paths,
            min_paths,
            max_spine,
            min_spine,
        })
    }

    fn proper_bounded(&self, depth: usize) -> Result<ProperOrdering> {
        self.diagram.require_level(depth)?;
        if depth < 2 {
            return Err(Error::Argument("bounded proper-ordering check needs depth at least 2".into()));
        }
        let h = depth / 2;
        let spine = |which| {
            let mut ends: Vec<usize> = (0..self.diagram.level_size(depth))
                .map(|v| {
                    let mut x = v;
                    for n in (h + 1..=depth).rev() {
                        x = self.diagram.edge(n, self.extremal_edge(n, x, which)).source;
                    }
                    x
                })
                .collect();
            ends.sort_unstable();
            ends.dedup();
            let spine = (ends.len() == 1).then(|| {
                let mut prefix = vec![0; h + 1];
                prefix[h] = ends[0];
                for n in (1..=h).rev() {
                    prefix[n - 1] = self.diagram.edge(n, self.extremal_edge(n, prefix[n], which)).source;
                }
                Spine { prefix, tail: None }
            });
            (ends.len(), spine)
        };
        let (max_paths, max_spine) = spine(Extremal::Max);
        let (min_paths, min_spine) = spine(Extremal::Min);
        Ok(ProperOrdering {
            exact: false,
            depth: Some(depth),
            simplicity: self.diagram.check_simple_bounded(h.max(1), depth),
            max_paths,
            min_paths,
            max_spine,
            min_spine,
        })
    }

    /// Rank of the root path `p` within the tower of its range.
    pub fn floor_rank(&self, p: &Path) -> u128 {
        let mut heights = vec![1u128];
        let mut rank = 0u128;
        for (j, &e) in p.edges.iter().enumerate() {
            let n = p.level_of(j);
            let v = self.diagram.edge(n, e).range;
            for &f in &self.ordered_incoming(n, v)[..self.rank(n, e)] {
                rank += heights[self.diagram.edge(n, f).source];
            }
            let mut next = vec![0u128; self.diagram.level_size(n)];
            for edge in self.diagram.edges(n) {
                next[edge.range] = next[edge.range].saturating_add(heights[edge.source]);
            }
            heights = next;
        }
        rank
    }

    /// The level-`n` floors visited by the tower of `v` at level `m`, bottom to top.
    pub fn tower_trace(&self, m: usize, v: usize, n: usize) -> Result<TowerTrace> {
        self.diagram.require_level(m)?;
        if n == 0 || n > m {
            return Err(Error::Argument(format!("base level {n} must lie in 1..={m}")));
        }
        if v >= self.diagram.level_size(m) {
            return Err(Error::Argument(format!("level {m} has no vertex {v}")));
        }
        let heights = self.diagram.heights(n);
        let total: u128 = self.diagram.heights(m)[v];
        if total > MAX_TRACE_LENGTH {
            return Err(Error::Capacity {
                what: "tower trace length",
                requested: total.min(usize::MAX as u128) as usize,
                max: MAX_TRACE_LENGTH as usize,
            });
        }
        let mut floors = Vec::with_capacity(total as usize);
        self.collect_trace(m, v, n, &heights, &mut floors);
        Ok(TowerTrace {
            top_level: m,
            top_vertex: v,
            base_level: n,
            floors,
            heights,
        })
    }

    fn collect_trace(&self, m: usize, v: usize, n: usize, heights: &[u128], out: &mut Vec<Floor>) {
        if m == n {
            out.extend((0..heights[v]).map(|rank| Floor { vertex: v, rank }));
            return;
        }
        for &e in self.ordered_incoming(m, v) {
            self.collect_trace(m - 1, self.diagram.edge(m, e).source, n, heights, out);
        }
    }

    /// Telescoping with new edges ordered lexicographically.
    pub fn telescope(&self, cuts: &[usize]) -> Result<(OrderedBratteliDiagram, Telescoping)> {
        let t = self.diagram.telescope(cuts)?;
        let mut ranks = Vec::with_capacity(cuts.len() - 1);
        for k in 1..cuts.len() {
            let paths = &t.paths[k];
            let mut r = vec![0; paths.len()];
            for v in 0..t.diagram.level_size(k) {
                let mut inc = t.diagram.incoming(k, v).to_vec();
                inc.sort_by(|&a, &b| self.compare_paths(&paths[a], &paths[b]));
                for (i, e) in inc.into_iter().enumerate() {
                    r[e] = i;
                }
            }
            ranks.push(r);
        }
        let ordered = Self::with_ranks(t.diagram.clone(), ranks)?;
        Ok((ordered, t))
    }

    /// Whether `m` carries the order of `self` onto the order of `target`.
    pub fn preserves_order(&self, m: &DiagramMorphism, target: &OrderedBratteliDiagram, depth: usize) -> bool {
        (1..=depth).all(|n| {
            (0..self.diagram.edges(n).len()).all(|e| self.rank(n, e) == target.rank(n, m.edge(n, e)))
        })
    }

    /// Extends a level-wise vertex bijection to an ordered isomorphism onto `other` by
    /// matching each `r⁻¹` rank for rank, and checks that sources correspond.
    pub fn isomorphism_from_vertices(
        &self,
        other: &OrderedBratteliDiagram,
        vertex_map: &[Vec<usize>],
    ) -> Result<DiagramMorphism> {
        let depth = vertex_map.len() - 1;
        let mut edge_map = vec![Vec::new()];
        for n in 0..=depth {
            let size = self.diagram.level_size(n);
            let mut seen = vec![false; other.diagram.level_size(n)];
            if vertex_map[n].len() != size || size != seen.len() {
                return Err(Error::Morphism(format!("level {n} sizes differ")));
            }
            for &w in &vertex_map[n] {
                if w >= seen.len() || std::mem::replace(&mut seen[w], true) {
                    return Err(Error::Morphism(format!("vertex map at level {n} is not a bijection")));
                }
            }
            if n == 0 {
                continue;
            }
            let mut map = vec![usize::MAX; self.diagram.edges(n).len()];
            for x in 0..size {
                let mine = self.ordered_incoming(n, x);
                let theirs = other.ordered_incoming(n, vertex_map[n][x]);
                if mine.len() != theirs.len() {
                    return Err(Error::Morphism(format!("vertex {x} at level {n}: in-degrees differ")));
                }
                for (&e, &f) in mine.iter().zip(theirs) {
                    if vertex_map[n - 1][self.diagram.edge(n, e).source] != other.diagram.edge(n, f).source {
                        return Err(Error::Morphism(format!("edge {e} at level {n}: sources do not correspond")));
                    }
                    map[e] = f;
                }
            }
            edge_map.push(map);
        }
        Ok(DiagramMorphism {
            vertex_map: vertex_map.to_vec(),
            edge_map,
            stationary: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Edge;

    fn xxy() -> OrderedBratteliDiagram {
        let d = BratteliDiagram::new(
            vec![1, 2, 2],
            vec![
                vec![Edge::new(0, 0), Edge::new(0, 1)],
                vec![
                    Edge::new(0, 0),
                    Edge::new(0, 0),
                    Edge::new(1, 0),
                    Edge::new(0, 1),
                    Edge::new(1, 1),
                    Edge::new(1, 1),
                ],
            ],
            true,
        )
        .unwrap();
        OrderedBratteliDiagram::by_declaration(d)
    }

    #[test]
    fn order_must_be_a_permutation() {
        let d = xxy().into_diagram();
        let bad = vec![vec![vec![0], vec![1]], vec![vec![0, 0, 1], vec![3, 4, 5]]];
        assert_eq!(
            OrderedBratteliDiagram::new(d, bad),
            Err(Error::NotAPermutation { level: 2, vertex: 0 })
        );
    }

    #[test]
    fn successors() {
        let o = xxy();
        assert_eq!(o.successor_path(&Path::new(1, vec![0])).unwrap(), Step::Next(Path::new(1, vec![1])));
        assert_eq!(o.successor_path(&Path::new(1, vec![2])).unwrap(), Step::Maximal);
        let max = o.extremal_path(0, 2, 0, Extremal::Max);
        assert_eq!(max, Path::new(0, vec![1, 2]));
        assert_eq!(o.successor_path(&max).unwrap(), Step::Maximal);
        assert!(o.successor_path(&Path::new(0, vec![])).is_err());
        assert!(o.successor_path(&Path::new(0, vec![1, 0])).is_err());
    }

    #[test]
    fn odometer_counts_in_binary() {
        let o = OrderedBratteliDiagram::by_declaration(BratteliDiagram::odometer(2).unwrap());
        let mut p = o.extremal_path(0, 3, 0, Extremal::Min);
        for value in 1..8u32 {
            p = o.vershik_step(&p).unwrap().next().unwrap();
            let bits: u32 = p.edges.iter().enumerate().map(|(i, &e)| (e as u32) << i).sum();
            assert_eq!(bits, value);
        }
        assert_eq!(o.vershik_step(&p).unwrap(), Step::Maximal);
        let proper = o.check_properly_ordered(ProperMode::ExactStationary).unwrap();
        assert!(proper.is_proper());
        assert_eq!(
            o.vershik_step_wrapping(&p, &proper).unwrap(),
            Step::Next(o.extremal_path(0, 3, 0, Extremal::Min))
        );
    }

    #[test]
    fn proper_orderings() {
        let o = xxy();
        let verdict = o.check_properly_ordered(ProperMode::ExactStationary).unwrap();
        assert!(verdict.is_proper());
        assert_eq!(verdict.max_spine.unwrap().vertex(9), Some(1));
        assert_eq!(verdict.min_spine.unwrap().vertex(9), Some(0));
        let bounded = o.check_properly_ordered(ProperMode::Bounded(8)).unwrap();
        assert!(bounded.is_proper());

        // both maximal edges are self-loops
        let d = BratteliDiagram::new(
            vec![1, 2, 2],
            vec![
                vec![Edge::new(0, 0), Edge::new(0, 1)],
                vec![Edge::new(1, 0), Edge::new(0, 0), Edge::new(0, 1), Edge::new(1, 1)],
            ],
            true,
        )
        .unwrap();
        let o = OrderedBratteliDiagram::by_declaration(d);
        let verdict = o.check_properly_ordered(ProperMode::ExactStationary).unwrap();
        assert_eq!(verdict.max_paths, 2);
        assert!(!verdict.is_proper());
        let p = o.extremal_path(0, 3, 0, Extremal::Max);
        assert_eq!(o.vershik_step_wrapping(&p, &verdict).unwrap(), Step::Maximal);

        let finite = OrderedBratteliDiagram::by_declaration(xxy().diagram().truncate(3).unwrap());
        assert!(matches!(
            finite.check_properly_ordered(ProperMode::ExactStationary),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn tower_traces() {
        let o = xxy();
        let t = o.tower_trace(3, 0, 2).unwrap();
        assert_eq!(t.tower_sequence().unwrap(), vec![0, 0, 1]);
        assert_eq!(t.floors.len() as u128, o.diagram().path_count(0, 3, 0));
        let own = o.tower_trace(2, 1, 2).unwrap();
        assert_eq!(own.floors.iter().map(|f| f.rank).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(o.tower_trace(3, 0, 0).is_err());
    }

    #[test]
    fn floor_ranks_follow_vershik_order() {
        let o = xxy();
        let mut p = o.extremal_path(0, 4, 1, Extremal::Min);
        let mut rank = 0;
        loop {
            assert_eq!(o.floor_rank(&p), rank);
            match o.vershik_step(&p).unwrap() {
                Step::Next(q) => p = q,
                Step::Maximal => break,
            }
            rank += 1;
        }
        assert_eq!(rank + 1, o.diagram().path_count(0, 4, 1));
    }

    #[test]
    fn ordered_telescoping_keeps_lexicographic_order() {
        let o = xxy();
        let (t, tel) = o.telescope(&[0, 1, 3]).unwrap();
        for v in 0..2 {
            let paths: Vec<&Path> = t.ordered_incoming(2, v).iter().map(|&e| &tel.paths[2][e]).collect();
            for w in paths.windows(2) {
                assert_eq!(o.successor_path(w[0]).unwrap(), Step::Next(w[1].clone()));
            }
        }
    }

    #[test]
    fn isomorphism_from_vertices() {
        let o = xxy();
        let id: Vec<Vec<usize>> = vec![vec![0], vec![0, 1], vec![0, 1], vec![0, 1]];
        let m = o.isomorphism_from_vertices(&o, &id).unwrap();
        assert!(o.preserves_order(&m, &o, 3));
        let swapped: Vec<Vec<usize>> = vec![vec![0], vec![1, 0], vec![1, 0], vec![1, 0]];
        assert!(o.isomorphism_from_vertices(&o, &swapped).is_err());
    }
}
