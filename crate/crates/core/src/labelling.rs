//! Group-valued edge labellings, the skew-product diagram `B(λ)`, path labels,
//! coboundaries, cohomology and the loops-lift-to-loops checker.
//!
//! In `B(λ)` the vertex `(v, g)` has index `v·|G| + g` and the edge `(e, g)` has
//! index `e·|G| + g`, with `r(e, g) = (r(e), g)` and `s(e, g) = (s(e), g·λ(e))`.

use std::collections::HashMap;

use serde::Serialize;

use crate::diagram::{BratteliDiagram, DiagramMorphism, Edge, Path, Telescoping};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, SharedGroup};
use crate::ordering::{Extremal, OrderedBratteliDiagram, Step};

/// A group element per vertex, indexed like the diagram's declared levels `0..=L`.
pub type VertexAssignment = Vec<Vec<GroupElement>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelling {
    group: SharedGroup,
    values: Vec<Vec<GroupElement>>,
    stationary: bool,
}

impl Labelling {
    /// `values[k][e]` labels edge `e` of level `k + 1`.
    pub fn new(diagram: &BratteliDiagram, group: SharedGroup, values: Vec<Vec<GroupElement>>) -> Result<Self> {
        let depth = diagram.declared_depth();
        for n in 1..=depth {
            let level = values.get(n - 1).map_or(&[][..], |v| v.as_slice());
            if level.len() < diagram.edges(n).len() {
                return Err(Error::LabellingIncomplete {
                    level: n,
                    edge: level.len(),
                });
            }
            for &g in level {
                group.element(g.0)?;
            }
        }
        if values.len() > depth {
            return Err(Error::Argument(format!("labels given beyond level {depth}")));
        }
        let mut all = vec![Vec::new()];
        all.extend(values);
        Ok(Self {
            group,
            values: all,
            stationary: diagram.is_stationary(),
        })
    }

    pub fn from_fn(
        diagram: &BratteliDiagram,
        group: SharedGroup,
        mut f: impl FnMut(usize, usize) -> GroupElement,
    ) -> Result<Self> {
        let values = (1..=diagram.declared_depth())
            .map(|n| (0..diagram.edges(n).len()).map(|e| f(n, e)).collect())
            .collect();
        Self::new(diagram, group, values)
    }

    pub fn trivial(diagram: &BratteliDiagram, group: SharedGroup) -> Self {
        let id = group.identity();
        Self::from_fn(diagram, group, |_, _| id).expect("trivial labelling is total")
    }

    pub fn group(&self) -> &SharedGroup {
        &self.group
    }

    pub fn declared_depth(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_stationary(&self) -> bool {
        self.stationary
    }

    /// Labels of the declared levels `1..=L`.
    pub fn values(&self) -> &[Vec<GroupElement>] {
        &self.values[1..]
    }

    #[inline]
    pub fn label(&self, n: usize, e: usize) -> GroupElement {
        let depth = self.declared_depth();
        let block = if n <= depth {
            n
        } else {
            assert!(self.stationary, "label requested at level {n} beyond depth {depth}");
            depth
        };
        self.values[block][e]
    }

    /// `λ(e_n, …, e_m) = λ(e_m)·λ(e_{m−1})⋯λ(e_n)`.
    pub fn path_label(&self, p: &Path) -> GroupElement {
        p.edges
            .iter()
            .enumerate()
            .fold(self.group.identity(), |acc, (j, &e)| self.group.op(self.label(p.level_of(j), e), acc))
    }

    /// Labels of a telescoped diagram, each new edge carrying its path's label.
    pub fn telescope(&self, t: &Telescoping) -> Result<Labelling> {
        let values = t.paths[1..]
            .iter()
            .map(|level| level.iter().map(|p| self.path_label(p)).collect())
            .collect();
        Self::new(&t.diagram, self.group.clone(), values)
    }

    /// `λ ∘ f` for a morphism `f` into the labelled diagram.
    pub fn pull_back(&self, diagram: &BratteliDiagram, f: &DiagramMorphism) -> Result<Labelling> {
        Self::from_fn(diagram, self.group.clone(), |n, e| self.label(n, f.edge(n, e)))
    }
}

/// `λ(e) = β(r(e))⁻¹·β(s(e))`. Stationary diagrams need `β` to agree on the
/// two levels spanned by the repeated block.
pub fn coboundary_labelling(
    diagram: &BratteliDiagram,
    group: SharedGroup,
    beta: &VertexAssignment,
) -> Result<Labelling> {
    let depth = diagram.declared_depth();
    if beta.len() != depth + 1 {
        return Err(Error::Argument(format!("β must cover levels 0..={depth}")));
    }
    for (n, level) in beta.iter().enumerate() {
        if level.len() != diagram.level_size(n) {
            return Err(Error::Argument(format!("β at level {n} covers {} vertices", level.len())));
        }
    }
    if diagram.is_stationary() && depth >= 1 && beta[depth] != beta[depth - 1] {
        return Err(Error::Argument("stationary coboundary needs β to repeat on the stationary block".into()));
    }
    let g = group.clone();
    Labelling::from_fn(diagram, group, |n, e| {
        let edge = diagram.edge(n, e);
        g.op(g.inv(beta[n][edge.range]), beta[n - 1][edge.source])
    })
}

#[derive(Debug, Clone)]
pub struct SkewProduct {
    pub total: OrderedBratteliDiagram,
    pub projection: DiagramMorphism,
    pub group: SharedGroup,
}

impl SkewProduct {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Index of `(v, g)` at a level `n ≥ 1`.
    pub fn vertex_index(&self, v: usize, g: GroupElement) -> usize {
        v * self.order() + g.0
    }

    /// `(v, g)` for a vertex index at a level `n ≥ 1`.
    pub fn split(&self, x: usize) -> (usize, GroupElement) {
        (x / self.order(), GroupElement(x % self.order()))
    }

    /// `γ_g(v, h) = (v, gh)` and `γ_g(e, h) = (e, gh)`; the root is fixed.
    pub fn apply_action(&self, g: GroupElement) -> DiagramMorphism {
        let d = self.total.diagram();
        let k = self.order();
        let depth = d.declared_depth();
        let shift = |x: usize| (x / k) * k + self.group.op(g, GroupElement(x % k)).0;
        DiagramMorphism {
            vertex_map: (0..=depth)
                .map(|n| {
                    if n == 0 {
                        vec![0]
                    } else {
                        (0..d.level_size(n)).map(shift).collect()
                    }
                })
                .collect(),
            edge_map: (0..=depth).map(|n| (0..d.edges(n).len()).map(shift).collect()).collect(),
            stationary: d.is_stationary(),
        }
    }
}

/// Builds `B(λ)` with the order pulled back through the projection.
pub fn skew_product(base: &OrderedBratteliDiagram, labels: &Labelling) -> Result<SkewProduct> {
    let d = base.diagram();
    let depth = d.declared_depth();
    if labels.declared_depth() != depth || labels.is_stationary() != d.is_stationary() {
        return Err(Error::Argument("labelling does not match the diagram's levels".into()));
    }
    let group = labels.group().clone();
    let k = group.order();
    let levels = if d.is_stationary() { depth.max(2) } else { depth };
    let mut sizes = vec![1];
    let mut edges = Vec::with_capacity(levels);
    let mut ranks = Vec::with_capacity(levels);
    let mut vertex_map = vec![vec![0]];
    let mut edge_map = vec![Vec::new()];
    for n in 1..=levels {
        sizes.push(d.level_size(n) * k);
        vertex_map.push((0..d.level_size(n) * k).map(|x| x / k).collect());
        let mut level = Vec::with_capacity(d.edges(n).len() * k);
        let mut r = Vec::with_capacity(d.edges(n).len() * k);
        for (i, e) in d.edges(n).iter().enumerate() {
            let lam = labels.label(n, i);
            for g in group.elements() {
                let source = if n == 1 { 0 } else { e.source * k + group.op(g, lam).0 };
                level.push(Edge::new(source, e.range * k + g.0));
                r.push(base.rank(n, i));
            }
        }
        edge_map.push((0..level.len()).map(|x| x / k).collect());
        edges.push(level);
        ranks.push(r);
    }
    let total = BratteliDiagram::new(sizes, edges, d.is_stationary())?;
    Ok(SkewProduct {
        total: OrderedBratteliDiagram::with_ranks(total, ranks)?,
        projection: DiagramMorphism {
            vertex_map,
            edge_map,
            stationary: d.is_stationary(),
        },
        group,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum CohomologyVerdict {
    Verified { beta: VertexAssignment, depth: usize },
    NotFound { depth: usize },
    Fails { level: usize, edge: usize },
}

/// Checks `β(r(e))·μ(e) = λ(e)·β(s(e))` on levels `1..=depth`, either for the given
/// `β` or by forcing `β` level by level from each possible root value.
pub fn check_cohomologous(
    diagram: &BratteliDiagram,
    lambda: &Labelling,
    mu: &Labelling,
    beta: Option<&VertexAssignment>,
    depth: usize,
) -> Result<CohomologyVerdict> {
    diagram.require_level(depth)?;
    let g = lambda.group();
    if g != mu.group() {
        return Err(Error::Argument("labellings take values in different groups".into()));
    }
    if let Some(beta) = beta {
        if beta.len() <= depth {
            return Err(Error::Argument(format!("β must cover levels 0..={depth}")));
        }
        for n in 1..=depth {
            for (i, e) in diagram.edges(n).iter().enumerate() {
                let lhs = g.op(beta[n][e.range], mu.label(n, i));
                let rhs = g.op(lambda.label(n, i), beta[n - 1][e.source]);
                if lhs != rhs {
                    return Ok(CohomologyVerdict::Fails { level: n, edge: i });
                }
            }
        }
        return Ok(CohomologyVerdict::Verified {
            beta: beta[..=depth].to_vec(),
            depth,
        });
    }
    'root: for root in g.elements() {
        let mut beta = vec![vec![root]];
        for n in 1..=depth {
            let mut level: Vec<Option<GroupElement>> = vec![None; diagram.level_size(n)];
            for (i, e) in diagram.edges(n).iter().enumerate() {
                let forced = g.op(g.op(lambda.label(n, i), beta[n - 1][e.source]), g.inv(mu.label(n, i)));
                match level[e.range] {
                    None => level[e.range] = Some(forced),
                    Some(x) if x == forced => {}
                    Some(_) => continue 'root,
                }
            }
            beta.push(level.into_iter().map(|x| x.expect("every vertex has an incoming edge")).collect());
        }
        return Ok(CohomologyVerdict::Verified { beta, depth });
    }
    Ok(CohomologyVerdict::NotFound { depth })
}

/// `Φ_β: B(λ) → B(μ)`, `(v, g) ↦ (v, g·β(v))`, `(e, g) ↦ (e, g·β(r(e)))`, on levels `0..=depth`.
pub fn apply_cohomology(
    base: &BratteliDiagram,
    lambda: &Labelling,
    mu: &Labelling,
    beta: &VertexAssignment,
    depth: usize,
) -> Result<DiagramMorphism> {
    match check_cohomologous(base, lambda, mu, Some(beta), depth)? {
        CohomologyVerdict::Fails { level, edge } => return Err(Error::Cohomology { level, edge }),
        CohomologyVerdict::Verified { .. } => {}
        CohomologyVerdict::NotFound { .. } => unreachable!("explicit β is verified, not searched"),
    }
    let g = lambda.group();
    let k = g.order();
    let mut vertex_map = vec![vec![0]];
    let mut edge_map = vec![Vec::new()];
    for (n, b) in beta.iter().enumerate().take(depth + 1).skip(1) {
        vertex_map.push(
            (0..base.level_size(n) * k)
                .map(|x| (x / k) * k + g.op(GroupElement(x % k), b[x / k]).0)
                .collect(),
        );
        edge_map.push(
            (0..base.edges(n).len() * k)
                .map(|x| {
                    let r = base.edge(n, x / k).range;
                    (x / k) * k + g.op(GroupElement(x % k), b[r]).0
                })
                .collect(),
        );
    }
    Ok(DiagramMorphism {
        vertex_map,
        edge_map,
        stationary: false,
    })
}

/// A configuration where the lifts of two matched successor pairs share the
/// source of `β` and `δ` but not the source of `α` and `γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopWitness {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    /// Range of `α′`, `β′` at level `m` and of `γ′`, `δ′` at level `n`.
    pub u: usize,
    pub v: usize,
    pub alpha: Path,
    pub beta: Path,
    pub gamma: Path,
    pub delta: Path,
    /// Upstairs vertices the lifts range at.
    pub u_up: usize,
    pub v_up: usize,
    /// Upstairs sources at level `k`.
    pub source_alpha: usize,
    pub source_beta: usize,
    pub source_gamma: usize,
    pub source_delta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LoopsVerdict {
    HoldsToDepth { depth: usize, pairs: u64 },
    Fails(Box<LoopWitness>),
}

impl LoopsVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LoopsVerdict::HoldsToDepth { .. })
    }

    pub fn witness(&self) -> Option<&LoopWitness> {
        match self {
            LoopsVerdict::Fails(w) => Some(w),
            _ => None,
        }
    }
}

/// A lexicographic successor pair `β′ → α′` of paths from `V_k` into `u`.
#[derive(Debug, Clone)]
struct SuccessorPair {
    m: usize,
    u: usize,
    before: Path,
    after: Path,
}

/// Visits every successor pair of paths from `V_k` into `V_m`, `k < m ≤ depth`, in a
/// fixed order.
fn for_each_successor_pair(
    base: &OrderedBratteliDiagram,
    k: usize,
    depth: usize,
    mut visit: impl FnMut(SuccessorPair) -> bool,
) -> Result<bool> {
    let d = base.diagram();
    for m in k + 1..=depth {
        for u in 0..d.level_size(m) {
            let mut p = base.extremal_path(k, m, u, Extremal::Min);
            while let Step::Next(q) = base.successor_path(&p)? {
                let pair = SuccessorPair {
                    m,
                    u,
                    before: p,
                    after: q.clone(),
                };
                if !visit(pair) {
                    return Ok(false);
                }
                p = q;
            }
        }
    }
    Ok(true)
}

/// Depth used for stationary labellings when none is given: `|V₁|·|G| + 2`.
pub fn default_loops_depth(base: &BratteliDiagram, labels: &Labelling) -> usize {
    base.level_size(1) * labels.group().order() + 2
}

/// Loops-lift-to-loops for `π: B(λ) → B` on levels up to `depth`.
///
/// For successor pairs `β′ → α′` and `δ′ → γ′` from `V_k` with matching sources, the
/// lifts at `(u, h)` and `(v, g)` share the `β/δ` source iff `hλ(β′) = gλ(δ′)`; the
/// conclusion then holds iff `λ(β′)⁻¹λ(α′) = λ(δ′)⁻¹λ(γ′)`. So the property holds iff
/// that quotient is constant on each class of pairs with equal sources.
pub fn check_loops_lift(base: &OrderedBratteliDiagram, labels: &Labelling, depth: usize) -> Result<LoopsVerdict> {
    let d = base.diagram();
    d.require_level(depth)?;
    let g = labels.group().clone();
    let order = g.order();
    let mut pairs = 0u64;
    for k in 1..depth {
        let mut classes: HashMap<(usize, usize), (SuccessorPair, GroupElement)> = HashMap::new();
        let mut witness = None;
        for_each_successor_pair(base, k, depth, |pair| {
            pairs += 1;
            let lb = labels.path_label(&pair.before);
            let la = labels.path_label(&pair.after);
            let c = g.op(g.inv(lb), la);
            let key = (d.path_source(&pair.before).unwrap(), d.path_source(&pair.after).unwrap());
            match classes.get(&key) {
                None => {
                    classes.insert(key, (pair, c));
                    true
                }
                Some((_, c0)) if *c0 == c => true,
                Some((first, _)) => {
                    let ld = lb;
                    let lg = la;
                    let lbeta = labels.path_label(&first.before);
                    let lalpha = labels.path_label(&first.after);
                    // h = identity over u, and g chosen so the β and δ lifts share a source
                    let gv = g.op(lbeta, g.inv(ld));
                    witness = Some(LoopWitness {
                        k,
                        m: first.m,
                        n: pair.m,
                        u: first.u,
                        v: pair.u,
                        source_alpha: key.1 * order + lalpha.0,
                        source_beta: key.0 * order + lbeta.0,
                        source_gamma: key.1 * order + g.op(gv, lg).0,
                        source_delta: key.0 * order + g.op(gv, ld).0,
                        alpha: first.after.clone(),
                        beta: first.before.clone(),
                        gamma: pair.after,
                        delta: pair.before,
                        u_up: first.u * order,
                        v_up: pair.u * order + gv.0,
                    });
                    false
                }
            }
        })?;
        if let Some(w) = witness {
            return Ok(LoopsVerdict::Fails(Box::new(w)));
        }
    }
    Ok(LoopsVerdict::HoldsToDepth { depth, pairs })
}

/// Loops-lift-to-loops for an arbitrary morphism `f: up → down` with unique path
/// lifting, by explicitly lifting every configuration.
pub fn check_loops_lift_morphism(
    up: &BratteliDiagram,
    down: &OrderedBratteliDiagram,
    f: &DiagramMorphism,
    depth: usize,
) -> Result<LoopsVerdict> {
    let d = down.diagram();
    d.require_level(depth)?;
    up.require_level(depth)?;
    let fibres: Vec<Vec<Vec<usize>>> = (0..=depth)
        .map(|n| {
            let mut fib = vec![Vec::new(); d.level_size(n)];
            for x in 0..up.level_size(n) {
                fib[f.vertex(n, x)].push(x);
            }
            fib
        })
        .collect();
    let mut pairs = 0u64;
    for k in 1..depth {
        let mut classes: HashMap<(usize, usize), Vec<SuccessorPair>> = HashMap::new();
        for_each_successor_pair(down, k, depth, |pair| {
            let key = (d.path_source(&pair.before).unwrap(), d.path_source(&pair.after).unwrap());
            classes.entry(key).or_default().push(pair);
            true
        })?;
        let mut keys: Vec<_> = classes.keys().copied().collect();
        keys.sort_unstable();
        for key in keys {
            let class = &classes[&key];
            for first in class {
                for second in class {
                    pairs += 1;
                    for &u_up in &fibres[first.m][first.u] {
                        let alpha = f.lift_path(up, d, &first.after, u_up)?;
                        let beta = f.lift_path(up, d, &first.before, u_up)?;
                        for &v_up in &fibres[second.m][second.u] {
                            let gamma = f.lift_path(up, d, &second.after, v_up)?;
                            let delta = f.lift_path(up, d, &second.before, v_up)?;
                            let sources = [&alpha, &beta, &gamma, &delta].map(|p| up.path_source(p).unwrap());
                            if sources[1] == sources[3] && sources[0] != sources[2] {
                                return Ok(LoopsVerdict::Fails(Box::new(LoopWitness {
                                    k,
                                    m: first.m,
                                    n: second.m,
                                    u: first.u,
                                    v: second.u,
                                    alpha: first.after.clone(),
                                    beta: first.before.clone(),
                                    gamma: second.after.clone(),
                                    delta: second.before.clone(),
                                    u_up,
                                    v_up,
                                    source_alpha: sources[0],
                                    source_beta: sources[1],
                                    source_gamma: sources[2],
                                    source_delta: sources[3],
                                })));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(LoopsVerdict::HoldsToDepth { depth, pairs })
}
