//! The tripling construction, quotients by free group actions, the commuting
//! square relating a skew product to the quotient of its tripling, and the
//! quotient cocycle.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use serde_json::{json, Value};

use crate::diagram::{BratteliDiagram, DiagramMorphism, Edge, LiftingVerdict, Simplicity};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, SharedGroup};
use crate::labelling::{check_loops_lift, skew_product, Labelling, LoopsVerdict, SkewProduct};
use crate::ordering::{Extremal, OrderedBratteliDiagram};
use crate::substitution::Triple;

/// Steps allowed when iterating tower summaries of a stationary diagram.
const MAX_SUMMARY_STEPS: usize = 100_000;

/// The level-`n` tower word of a higher tower, reduced to what concatenation needs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Summary {
    head: Vec<usize>,
    tail: Vec<usize>,
    len: usize,
    triples: BTreeSet<Triple>,
}

impl Summary {
    fn letter(v: usize) -> Self {
        Self {
            head: vec![v],
            tail: vec![v],
            len: 1,
            triples: BTreeSet::new(),
        }
    }

    fn append(&mut self, other: &Summary) {
        let mut seam = self.tail.clone();
        seam.extend_from_slice(&other.head);
        self.triples.extend(seam.windows(3).map(|w| [w[0], w[1], w[2]]));
        self.triples.extend(other.triples.iter().copied());
        if self.len < 2 {
            self.head.extend(other.head.iter().take(2 - self.len));
        }
        if other.len >= 2 {
            self.tail = other.tail.clone();
        } else {
            self.tail = seam[seam.len().saturating_sub(2)..].to_vec();
        }
        self.len = (self.len + other.len).min(4);
    }
}

#[derive(Debug, Clone)]
pub struct TripledDiagram {
    pub diagram: OrderedBratteliDiagram,
    /// `triples[n][i]` is the base vertex triple behind vertex `i` of level `n`.
    pub triples: Vec<Vec<Triple>>,
    /// `edges[n][j] = (u, e, w)` behind edge `j` of level `n`.
    pub edges: Vec<Vec<(usize, usize, usize)>>,
    pub projection: DiagramMorphism,
    /// Set for non-stationary input, whose witnesses were searched to a bound.
    pub bounded: bool,
}

impl TripledDiagram {
    pub fn vertex_index(&self, n: usize, t: &Triple) -> Option<usize> {
        let b = self.diagram.diagram().block(n);
        self.triples[b].binary_search(t).ok()
    }

    /// `(u, v, w) ↦ (γu, γv, γw)` and `(u, e, w) ↦ (γu, γe, γw)` for an order-preserving
    /// automorphism `γ` of the base.
    pub fn lift_automorphism(&self, gamma: &DiagramMorphism) -> Result<DiagramMorphism> {
        let depth = self.triples.len() - 1;
        let mut vertex_map = Vec::with_capacity(depth + 1);
        let mut edge_map = vec![Vec::new()];
        for n in 0..=depth {
            let image = |t: &Triple| {
                if n == 0 {
                    Some(0)
                } else {
                    let i = [gamma.vertex(n, t[0]), gamma.vertex(n, t[1]), gamma.vertex(n, t[2])];
                    self.vertex_index(n, &i)
                }
            };
            vertex_map.push(
                self.triples[n]
                    .iter()
                    .map(|t| image(t).ok_or_else(|| Error::Tripling(format!("image of {t:?} at level {n} is not a witnessed triple"))))
                    .collect::<Result<Vec<_>>>()?,
            );
            if n == 0 {
                continue;
            }
            let index: HashMap<(usize, usize, usize), usize> =
                self.edges[n].iter().enumerate().map(|(j, &x)| (x, j)).collect();
            edge_map.push(
                self.edges[n]
                    .iter()
                    .map(|&(u, e, w)| {
                        let key = (gamma.vertex(n, u), gamma.edge(n, e), gamma.vertex(n, w));
                        index
                            .get(&key)
                            .copied()
                            .ok_or_else(|| Error::Tripling(format!("image of edge {key:?} at level {n} is missing")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(DiagramMorphism {
            vertex_map,
            edge_map,
            stationary: self.diagram.diagram().is_stationary(),
        })
    }
}

/// Witnessed consecutive triples at level `n`, from the tower words at levels
/// `n + 1 ..= top`; a stationary diagram is iterated until its summaries recur.
fn witnessed_triples(base: &OrderedBratteliDiagram, n: usize, top: Option<usize>) -> Result<BTreeSet<Triple>> {
    let d = base.diagram();
    let mut state: Vec<Summary> = (0..d.level_size(n)).map(Summary::letter).collect();
    let mut found = BTreeSet::new();
    let mut seen: HashMap<Vec<Summary>, usize> = HashMap::new();
    let mut m = n;
    loop {
        m += 1;
        if let Some(t) = top {
            if m > t {
                return Ok(found);
            }
        }
        state = (0..d.level_size(m))
            .map(|y| {
                let inc = base.ordered_incoming(m, y);
                let mut s = state[d.edge(m, inc[0]).source].clone();
                for &e in &inc[1..] {
                    s.append(&state[d.edge(m, e).source]);
                }
                s
            })
            .collect();
        for s in &state {
            found.extend(s.triples.iter().copied());
        }
        if top.is_none() && m > d.declared_depth() {
            if seen.insert(state.clone(), m).is_some() {
                return Ok(found);
            }
            if m - n > MAX_SUMMARY_STEPS {
                return Err(Error::Tripling("tower summaries did not recur".into()));
            }
        }
    }
}

/// Builds the tripled diagram. Stationary input is exact; otherwise witnesses come
/// from levels up to `min(witness_depth, L)` and the top tripled level is `L − 1`,
/// keeping only triples that feed an edge of the level above.
pub fn triple_diagram(base: &OrderedBratteliDiagram, witness_depth: usize) -> Result<TripledDiagram> {
    let d = base.diagram();
    let stationary = d.is_stationary();
    let depth = d.declared_depth();
    let (levels, top) = if stationary {
        (depth.max(2), None)
    } else {
        let w = witness_depth.min(depth);
        if w < 2 {
            return Err(Error::Tripling("tripling a finite diagram needs at least two levels".into()));
        }
        (w - 1, Some(w))
    };
    let mut sets: Vec<Vec<Triple>> = vec![vec![[0, 0, 0]]];
    for n in 1..=levels {
        sets.push(witnessed_triples(base, n, top)?.into_iter().collect());
    }
    if stationary && sets[levels] != sets[levels - 1] {
        return Err(Error::Tripling("triple sets differ across the stationary block".into()));
    }

    let source_triple = |n: usize, [u, v, w]: Triple, i: usize| -> Triple {
        let inc = base.ordered_incoming(n, v);
        let src = |e: usize| d.edge(n, e).source;
        if n == 1 {
            return [0, 0, 0];
        }
        let prev = if i > 0 { src(inc[i - 1]) } else { src(base.extremal_edge(n, u, Extremal::Max)) };
        let next = if i + 1 < inc.len() { src(inc[i + 1]) } else { src(base.extremal_edge(n, w, Extremal::Min)) };
        [prev, src(inc[i]), next]
    };

    if !stationary {
        for n in (1..levels).rev() {
            let mut used = BTreeSet::new();
            for &t in &sets[n + 1] {
                for i in 0..base.ordered_incoming(n + 1, t[1]).len() {
                    used.insert(source_triple(n + 1, t, i));
                }
            }
            sets[n].retain(|t| used.contains(t));
        }
    }

    let mut edges_out = Vec::with_capacity(levels);
    let mut ranks = Vec::with_capacity(levels);
    let mut triple_edges = vec![Vec::new()];
    let mut vertex_map = vec![vec![0]];
    let mut edge_map = vec![Vec::new()];
    for n in 1..=levels {
        let mut level = Vec::new();
        let mut r = Vec::new();
        let mut names = Vec::new();
        let mut em = Vec::new();
        for (x, &t) in sets[n].iter().enumerate() {
            for (i, &e) in base.ordered_incoming(n, t[1]).iter().enumerate() {
                let s = source_triple(n, t, i);
                let source = sets[n - 1].binary_search(&s).map_err(|_| {
                    Error::Tripling(format!("source triple {s:?} of level {n} is not witnessed"))
                })?;
                level.push(Edge::new(source, x));
                r.push(i);
                names.push((t[0], e, t[2]));
                em.push(e);
            }
        }
        vertex_map.push(sets[n].iter().map(|t| t[1]).collect());
        edge_map.push(em);
        edges_out.push(level);
        ranks.push(r);
        triple_edges.push(names);
    }
    let sizes = sets.iter().map(Vec::len).collect();
    let diagram = BratteliDiagram::new(sizes, edges_out, stationary)?;
    Ok(TripledDiagram {
        diagram: OrderedBratteliDiagram::with_ranks(diagram, ranks)?,
        triples: sets,
        edges: triple_edges,
        projection: DiagramMorphism {
            vertex_map,
            edge_map,
            stationary,
        },
        bounded: !stationary,
    })
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub diagram: OrderedBratteliDiagram,
    pub projection: DiagramMorphism,
    /// Least member of each vertex orbit, per level.
    pub vertex_reps: Vec<Vec<usize>>,
    pub edge_reps: Vec<Vec<usize>>,
}

/// Quotient by a free action given as one order-preserving automorphism per group
/// element. The action is verified up to the first repetition of a stationary block.
pub fn quotient_by_action(
    diagram: &OrderedBratteliDiagram,
    group: &SharedGroup,
    action: &[DiagramMorphism],
) -> Result<Quotient> {
    let d = diagram.diagram();
    if action.len() != group.order() {
        return Err(Error::Argument(format!(
            "{} automorphisms for a group of order {}",
            action.len(),
            group.order()
        )));
    }
    let depth = d.declared_depth();
    let check_depth = if d.is_stationary() { depth + 1 } else { depth };
    for (g, gamma) in action.iter().enumerate() {
        gamma.check(d, d, check_depth)?;
        if !gamma.is_bijective(d, d, check_depth) {
            return Err(Error::Morphism(format!("action of element {g} is not bijective")));
        }
        if !diagram.preserves_order(gamma, diagram, check_depth) {
            return Err(Error::Morphism(format!("action of element {g} does not preserve the order")));
        }
    }
    for n in 0..=check_depth {
        for x in 0..d.level_size(n) {
            if action[group.identity().0].vertex(n, x) != x {
                return Err(Error::Morphism("the identity does not act trivially".into()));
            }
        }
    }
    for a in group.elements() {
        for b in group.elements() {
            let ab = group.op(a, b).0;
            for n in 1..=check_depth {
                let ok_v = (0..d.level_size(n))
                    .all(|x| action[a.0].vertex(n, action[b.0].vertex(n, x)) == action[ab].vertex(n, x));
                let ok_e = (0..d.edges(n).len())
                    .all(|e| action[a.0].edge(n, action[b.0].edge(n, e)) == action[ab].edge(n, e));
                if !ok_v || !ok_e {
                    return Err(Error::Morphism(format!("action is not a homomorphism at level {n}")));
                }
            }
        }
    }
    for g in group.elements().filter(|&g| g != group.identity()) {
        for n in 1..=check_depth {
            if let Some(x) = (0..d.level_size(n)).find(|&x| action[g.0].vertex(n, x) == x) {
                return Err(Error::NotFree { element: g.0, kind: "vertex", level: n, index: x });
            }
            if let Some(e) = (0..d.edges(n).len()).find(|&e| action[g.0].edge(n, e) == e) {
                return Err(Error::NotFree { element: g.0, kind: "edge", level: n, index: e });
            }
        }
    }

    let mut vertex_reps = Vec::with_capacity(depth + 1);
    let mut edge_reps = vec![Vec::new()];
    let mut vertex_map = Vec::with_capacity(depth + 1);
    let mut edge_map = vec![Vec::new()];
    let mut edges = Vec::with_capacity(depth);
    let mut ranks = Vec::with_capacity(depth);
    for n in 0..=depth {
        let rep_of = |x: usize| action.iter().map(|a| a.vertex(n, x)).min().unwrap();
        let reps: Vec<usize> = (0..d.level_size(n)).filter(|&x| rep_of(x) == x).collect();
        let map: Vec<usize> = (0..d.level_size(n)).map(|x| reps.binary_search(&rep_of(x)).unwrap()).collect();
        vertex_reps.push(reps);
        vertex_map.push(map);
        if n == 0 {
            continue;
        }
        let erep_of = |e: usize| action.iter().map(|a| a.edge(n, e)).min().unwrap();
        let ereps: Vec<usize> = (0..d.edges(n).len()).filter(|&e| erep_of(e) == e).collect();
        let emap: Vec<usize> = (0..d.edges(n).len()).map(|e| ereps.binary_search(&erep_of(e)).unwrap()).collect();
        for e in 0..d.edges(n).len() {
            if diagram.rank(n, e) != diagram.rank(n, erep_of(e)) {
                return Err(Error::OrderDescent { level: n, edge: e });
            }
        }
        let level: Vec<Edge> = ereps
            .iter()
            .map(|&e| {
                let edge = d.edge(n, e);
                Edge::new(vertex_map[n - 1][edge.source], vertex_map[n][edge.range])
            })
            .collect();
        ranks.push(ereps.iter().map(|&e| diagram.rank(n, e)).collect());
        edges.push(level);
        edge_reps.push(ereps);
        edge_map.push(emap);
    }
    let sizes = vertex_reps.iter().map(Vec::len).collect();
    let qd = BratteliDiagram::new(sizes, edges, d.is_stationary())?;
    let ordered = OrderedBratteliDiagram::with_ranks(qd, ranks).map_err(|e| match e {
        Error::NotAPermutation { level, vertex } => Error::OrderDescent { level, edge: vertex },
        other => other,
    })?;
    Ok(Quotient {
        diagram: ordered,
        projection: DiagramMorphism {
            vertex_map,
            edge_map,
            stationary: d.is_stationary(),
        },
        vertex_reps,
        edge_reps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseStatus {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub status: ClauseStatus,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// The square `B^Q(λ) → B(λ) → B` over `B̃_μ → B̃ → B`, with its verification report.
#[derive(Debug, Clone)]
pub struct TheoremSquare {
    pub depth: usize,
    pub base: OrderedBratteliDiagram,
    pub labels: Labelling,
    pub skew: SkewProduct,
    pub tripled: TripledDiagram,
    /// The G-action on `B^Q(λ)`, lifted from `B(λ)`.
    pub tripled_action: Vec<DiagramMorphism>,
    pub quotient: Quotient,
    /// `ρ: B̃ → B`.
    pub rho: DiagramMorphism,
    pub mu: Labelling,
    pub skew_mu: SkewProduct,
    /// `Φ: B^Q(λ) → B̃_μ`.
    pub phi: DiagramMorphism,
    pub clauses: Vec<ClauseResult>,
}

impl TheoremSquare {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.status != ClauseStatus::Fail)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == name)
    }

    pub fn group(&self) -> &SharedGroup {
        self.labels.group()
    }

    /// `(g₁, g₂, g₃)` of a vertex `[(u, g₁), (v, g₂), (w, g₃)]` of `B^Q(λ)` at level `n ≥ 1`.
    pub fn group_parts(&self, n: usize, x: usize) -> [GroupElement; 3] {
        let k = self.group().order();
        let b = self.tripled.diagram.diagram().block(n);
        self.tripled.triples[b][x].map(|i| GroupElement(i % k))
    }

    /// Vertices of `B^Q(λ)` in the orbit of quotient vertex `q` at level `n`.
    pub fn orbit(&self, n: usize, q: usize) -> Vec<usize> {
        let b = self.tripled.diagram.diagram().block(n);
        let rep = self.quotient.vertex_reps[b][q];
        let mut members: Vec<usize> = self.tripled_action.iter().map(|a| a.vertex(n, rep)).collect();
        members.sort_unstable();
        members
    }
}

fn pass_or_fail(clause: &str, depth: usize, ok: bool, witness: Option<Value>) -> ClauseResult {
    ClauseResult {
        clause: clause.into(),
        status: if ok { ClauseStatus::Pass } else { ClauseStatus::Fail },
        depth,
        witness: if ok { None } else { witness },
    }
}

fn lifting_clause(clause: &str, depth: usize, verdict: LiftingVerdict) -> ClauseResult {
    let ok = verdict.holds();
    pass_or_fail(clause, depth, ok, serde_json::to_value(&verdict).ok())
}

fn loops_clause(clause: &str, depth: usize, verdict: &LoopsVerdict, informational: bool) -> ClauseResult {
    let mut c = pass_or_fail(clause, depth, verdict.holds(), serde_json::to_value(verdict).ok());
    if informational {
        c.status = ClauseStatus::Info;
        c.witness = Some(serde_json::to_value(verdict).unwrap_or(Value::Null));
    }
    c
}

/// First level and index where two morphisms differ on vertices or edges.
fn first_difference(a: &DiagramMorphism, b: &DiagramMorphism, up: &BratteliDiagram, depth: usize) -> Option<Value> {
    for n in 0..=depth {
        if let Some(x) = (0..up.level_size(n)).find(|&x| a.vertex(n, x) != b.vertex(n, x)) {
            return Some(json!({"level": n, "vertex": x}));
        }
        if n > 0 {
            if let Some(e) = (0..up.edges(n).len()).find(|&e| a.edge(n, e) != b.edge(n, e)) {
                return Some(json!({"level": n, "edge": e}));
            }
        }
    }
    None
}

/// Builds every object of the square for `(base, λ)` and verifies each clause to `depth`.
pub fn theorem_square(base: &OrderedBratteliDiagram, labels: &Labelling, depth: usize) -> Result<TheoremSquare> {
    let d = base.diagram();
    let group = labels.group().clone();
    let k = group.order();
    let mut clauses = Vec::new();

    let simple = d.check_simple(depth.max(1));
    clauses.push(ClauseResult {
        clause: "base-simple".into(),
        status: if matches!(simple, Simplicity::Simple { .. }) { ClauseStatus::Pass } else { ClauseStatus::Fail },
        depth,
        witness: Some(serde_json::to_value(simple).unwrap_or(Value::Null)),
    });

    let skew = skew_product(base, labels)?;
    let tripled = triple_diagram(&skew.total, depth + 2)?;
    let tq = tripled.diagram.diagram();
    if !tq.has_level(depth) {
        return Err(Error::Depth {
            requested: depth,
            materialized: tq.declared_depth(),
        });
    }
    let tripled_action = group
        .elements()
        .map(|g| tripled.lift_automorphism(&skew.apply_action(g)))
        .collect::<Result<Vec<_>>>()?;
    let quotient = quotient_by_action(&tripled.diagram, &group, &tripled_action)?;
    let qd = quotient.diagram.diagram();
    let levels = qd.declared_depth();

    // ρ: orbit → representative → middle coordinate → base
    let rho = DiagramMorphism {
        vertex_map: (0..=levels)
            .map(|n| {
                quotient.vertex_reps[n]
                    .iter()
                    .map(|&x| skew.projection.vertex(n, tripled.projection.vertex(n, x)))
                    .collect()
            })
            .collect(),
        edge_map: (0..=levels)
            .map(|n| {
                quotient.edge_reps[n]
                    .iter()
                    .map(|&e| skew.projection.edge(n, tripled.projection.edge(n, e)))
                    .collect()
            })
            .collect(),
        stationary: qd.is_stationary(),
    };
    let mu = labels.pull_back(qd, &rho)?;
    let skew_mu = skew_product(&quotient.diagram, &mu)?;

    // Φ(x) = (orbit(x), g₂)
    let phi = DiagramMorphism {
        vertex_map: (0..=levels)
            .map(|n| {
                (0..tq.level_size(n))
                    .map(|x| {
                        if n == 0 {
                            0
                        } else {
                            quotient.projection.vertex(n, x) * k + tripled.triples[n][x][1] % k
                        }
                    })
                    .collect()
            })
            .collect(),
        edge_map: (0..=levels)
            .map(|n| {
                (0..tq.edges(n).len())
                    .map(|e| quotient.projection.edge(n, e) * k + tripled.edges[n][e].1 % k)
                    .collect()
            })
            .collect(),
        stationary: tq.is_stationary(),
    };

    let sd = skew.total.diagram();
    let md = skew_mu.total.diagram();
    let phi_ok = phi.check(tq, md, depth);
    let bijective = phi.is_bijective(tq, md, depth);
    let order = tripled.diagram.preserves_order(&phi, &skew_mu.total, depth);
    clauses.push(pass_or_fail(
        "phi-isomorphism",
        depth,
        phi_ok.is_ok() && bijective && order,
        Some(json!({
            "morphism": phi_ok.err().map(|e| e.to_string()),
            "bijective": bijective,
            "order-preserving": order,
        })),
    ));

    let mut mu_witness = None;
    'mu: for n in 1..=depth {
        for e in 0..tq.edges(n).len() {
            let down = skew.projection.edge(n, tripled.projection.edge(n, e));
            if mu.label(n, quotient.projection.edge(n, e)) != labels.label(n, down) {
                mu_witness = Some(json!({"level": n, "edge": e}));
                break 'mu;
            }
        }
    }
    clauses.push(pass_or_fail("mu-equals-lambda-rho", depth, mu_witness.is_none(), mu_witness));

    let mut equivariance = None;
    for g in group.elements() {
        let lhs = tripled_action[g.0].then(&tripled.projection);
        let rhs = tripled.projection.then(&skew.apply_action(g));
        if let Some(w) = first_difference(&lhs, &rhs, tq, depth) {
            equivariance = Some(json!({"element": group.name(g), "at": w}));
            break;
        }
    }
    clauses.push(pass_or_fail("rho-prime-equivariant", depth, equivariance.is_none(), equivariance));

    let top = tripled.projection.then(&skew.projection);
    let bottom = phi.then(&skew_mu.projection).then(&rho);
    let square = first_difference(&top, &bottom, tq, depth);
    clauses.push(pass_or_fail("square-commutes", depth, square.is_none(), square));

    clauses.push(lifting_clause(
        "pi-unique-path-lifting",
        depth,
        skew.projection.check_unique_path_lifting(sd, d, depth),
    ));
    clauses.push(lifting_clause("rho-unique-path-lifting", depth, rho.check_unique_path_lifting(qd, d, depth)));
    clauses.push(lifting_clause(
        "rho-prime-unique-path-lifting",
        depth,
        tripled.projection.check_unique_path_lifting(tq, sd, depth),
    ));
    clauses.push(lifting_clause(
        "pi-tilde-unique-path-lifting",
        depth,
        skew_mu.projection.check_unique_path_lifting(md, qd, depth),
    ));

    let transported = group.elements().find_map(|h| {
        let lhs = tripled_action[h.0].then(&phi);
        let rhs = phi.then(&skew_mu.apply_action(h));
        first_difference(&lhs, &rhs, tq, depth).map(|w| json!({"element": group.name(h), "at": w}))
    });
    clauses.push(pass_or_fail("phi-transports-action", depth, transported.is_none(), transported));

    let tilde = check_loops_lift(&quotient.diagram, &mu, depth)?;
    clauses.push(loops_clause("pi-tilde-loops-lift", depth, &tilde, false));
    let original = check_loops_lift(base, labels, depth)?;
    clauses.push(loops_clause("pi-loops-lift", depth, &original, true));

    Ok(TheoremSquare {
        depth,
        base: base.clone(),
        labels: labels.clone(),
        skew,
        tripled,
        tripled_action,
        quotient,
        rho,
        mu,
        skew_mu,
        phi,
        clauses,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CocycleTower {
    pub vertex: usize,
    pub height: u128,
    /// `c_n` on the bottom floor; every other floor carries the identity.
    pub bottom: GroupElement,
    pub representative_independent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientCocycle {
    pub level: usize,
    pub identity: GroupElement,
    pub towers: Vec<CocycleTower>,
}

impl QuotientCocycle {
    pub fn value(&self, vertex: usize, rank: u128) -> GroupElement {
        if rank == 0 {
            self.towers[vertex].bottom
        } else {
            self.identity
        }
    }

    pub fn representative_independent(&self) -> bool {
        self.towers.iter().all(|t| t.representative_independent)
    }
}

/// `c_n(y) = g₁⁻¹g₂` on the bottom floor of the tower of the orbit of
/// `[(u, g₁), (v, g₂), (w, g₃)]`, identity on every other floor.
pub fn cocycle_from_square(square: &TheoremSquare, n: usize) -> Result<QuotientCocycle> {
    let qd = square.quotient.diagram.diagram();
    qd.require_level(n)?;
    if n == 0 {
        return Err(Error::Argument("the cocycle is defined on levels n ≥ 1".into()));
    }
    let g = square.group();
    let heights = qd.heights(n);
    let towers = (0..qd.level_size(n))
        .map(|q| {
            let values: Vec<GroupElement> = square
                .orbit(n, q)
                .into_iter()
                .map(|x| {
                    let [g1, g2, _] = square.group_parts(n, x);
                    g.op(g.inv(g1), g2)
                })
                .collect();
            CocycleTower {
                vertex: q,
                height: heights[q],
                bottom: values[0],
                representative_independent: values.iter().all(|&v| v == values[0]),
            }
        })
        .collect();
    Ok(QuotientCocycle {
        level: n,
        identity: g.identity(),
        towers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::substitution::{diagram_from_substitution, triple_substitution, Substitution};
    use std::sync::Arc;

    fn xxy() -> (Substitution, OrderedBratteliDiagram) {
        let s = Substitution::from_rules(&["X -> X X Y", "Y -> X Y Y"]).unwrap();
        let d = diagram_from_substitution(&s);
        (s, d)
    }

    #[test]
    fn summary_concatenation_matches_words() {
        let words = [vec![0], vec![1, 2], vec![3], vec![4, 5, 6], vec![7]];
        let mut s = Summary::letter(words[0][0]);
        for w in &words[1..] {
            let mut piece = Summary::letter(w[0]);
            for &x in &w[1..] {
                piece.append(&Summary::letter(x));
            }
            s.append(&piece);
        }
        let flat: Vec<usize> = words.concat();
        let expected: BTreeSet<Triple> = flat.windows(3).map(|w| [w[0], w[1], w[2]]).collect();
        assert_eq!(s.triples, expected);
        assert_eq!(s.head, vec![0, 1]);
        assert_eq!(s.tail, vec![6, 7]);
    }

    #[test]
    fn tripling_the_odometer() {
        let o = OrderedBratteliDiagram::by_declaration(BratteliDiagram::odometer(2).unwrap());
        let t = triple_diagram(&o, 4).unwrap();
        let d = t.diagram.diagram();
        for n in 1..5 {
            assert_eq!(d.level_size(n), 1);
            assert_eq!(d.edges(n).len(), 2);
        }
        assert!(t.projection.check_unique_path_lifting(d, o.diagram(), 5).holds());
    }

    #[test]
    fn tripling_matches_the_triple_substitution() {
        let (s, o) = xxy();
        let t = triple_diagram(&o, 4).unwrap();
        let ts = triple_substitution(&s).unwrap();
        assert_eq!(t.triples[1], ts.triples);
        assert_eq!(t.triples[2], ts.triples);
        let via_sub = diagram_from_substitution(&ts.substitution);
        let vm: Vec<Vec<usize>> = (0..=4).map(|n| (0..t.diagram.diagram().level_size(n)).collect()).collect();
        t.diagram.isomorphism_from_vertices(&via_sub, &vm).unwrap();
        assert!(t.projection.check_unique_path_lifting(t.diagram.diagram(), o.diagram(), 5).holds());
    }

    #[test]
    fn finite_tripling_is_valid_and_bounded() {
        let (_, o) = xxy();
        let finite = OrderedBratteliDiagram::by_declaration(o.diagram().truncate(5).unwrap());
        let t = triple_diagram(&finite, 5).unwrap();
        assert!(t.bounded);
        assert_eq!(t.diagram.diagram().declared_depth(), 4);
        assert!(t.diagram.diagram().validate().is_valid());
    }

    #[test]
    fn quotient_rejects_non_free_actions() {
        let (_, o) = xxy();
        let z2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let id = o.diagram().identity_morphism();
        let err = quotient_by_action(&o, &z2, &[id.clone(), id]).unwrap_err();
        assert!(matches!(err, Error::NotFree { element: 1, kind: "vertex", .. }));
    }

    #[test]
    fn quotient_of_the_z2_example() {
        let (_, o) = xxy();
        let z2 = Arc::new(FiniteGroup::cyclic(2).unwrap());
        let labels = Labelling::from_fn(o.diagram(), z2, |n, e| GroupElement(usize::from(n == 2 && e == 4))).unwrap();
        let sq = theorem_square(&o, &labels, 4).unwrap();
        assert_eq!(sq.tripled.triples[1].len(), 20);
        assert_eq!(sq.quotient.diagram.diagram().level_size(3), 10);
        for c in &sq.clauses {
            assert_ne!(c.status, ClauseStatus::Fail, "{c:?}");
        }
        let c = cocycle_from_square(&sq, 3).unwrap();
        assert!(c.representative_independent());
        assert_eq!(c.value(0, 1), GroupElement(0));
    }
}
