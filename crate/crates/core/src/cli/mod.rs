//! The `.bspec` text format, command dispatch and deterministic DOT/JSON output.
//!
//! A spec declares either a diagram (`levels`, `vertices`, `edge`, `order`, `label`,
//! `stationary`) or a substitution (`alphabet`, `sub`, `label-stationary`), plus an
//! optional `group` and command defaults (`depth`, `window`, `bound`, `seed`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::diagram::{BratteliDiagram, Edge, Simplicity};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupElement, SharedGroup};
use crate::labelling::{
    check_cohomologous, check_loops_lift, default_loops_depth, skew_product, CohomologyVerdict, Labelling,
};
use crate::ordering::{Extremal, OrderedBratteliDiagram, ProperMode, Step};
use crate::substitution::{
    diagram_from_substitution, fixed_point_window, skew_substitution, toeplitz_window_check, triple_substitution,
    StationaryLabelling, Substitution,
};
use crate::tripling::{cocycle_from_square, quotient_by_action, theorem_square, triple_diagram};

pub const TOOL_VERSION: &str = concat!("bratteli ", env!("CARGO_PKG_VERSION"));

pub const DEFAULT_SQUARE_DEPTH: usize = 4;
pub const DEFAULT_WINDOW: usize = 2000;
pub const DEFAULT_BOUND: usize = 81;
pub const DEFAULT_MAX_GAP: usize = 32;
pub const DEFAULT_VERSHIK_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Diagram(OrderedBratteliDiagram),
    Substitution(Substitution),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Labels {
    None,
    Edges(Labelling),
    Stationary(StationaryLabelling),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecDocument {
    pub group: Option<SharedGroup>,
    pub source: Source,
    pub labels: Labels,
    pub depth: Option<usize>,
    pub window: Option<usize>,
    pub bound: Option<usize>,
    pub seed: Option<String>,
    pub digest: String,
}

impl SpecDocument {
    pub fn ordered(&self) -> OrderedBratteliDiagram {
        match &self.source {
            Source::Diagram(d) => d.clone(),
            Source::Substitution(s) => diagram_from_substitution(s),
        }
    }

    pub fn substitution(&self) -> Option<&Substitution> {
        match &self.source {
            Source::Substitution(s) => Some(s),
            Source::Diagram(_) => None,
        }
    }

    pub fn has_labels(&self) -> bool {
        !matches!(self.labels, Labels::None)
    }

    /// The declared labelling, or the trivial one when only a group is declared.
    pub fn labelling(&self) -> Result<Labelling> {
        match &self.labels {
            Labels::Edges(l) => Ok(l.clone()),
            Labels::Stationary(l) => Ok(l.to_labelling(self.substitution().expect("stationary labels"))),
            Labels::None => {
                let g = self.require_group()?;
                Ok(Labelling::trivial(self.ordered().diagram(), g.clone()))
            }
        }
    }

    pub fn stationary_labels(&self) -> Result<StationaryLabelling> {
        let sigma = self
            .substitution()
            .ok_or_else(|| Error::Argument("command needs a substitution".into()))?;
        match &self.labels {
            Labels::Stationary(l) => Ok(l.clone()),
            _ => Ok(StationaryLabelling::trivial(sigma, self.require_group()?.clone())),
        }
    }

    pub fn require_group(&self) -> Result<&SharedGroup> {
        self.group
            .as_ref()
            .ok_or_else(|| Error::Argument("command needs a group declaration".into()))
    }
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, token: Option<&str>, what: &str) -> Result<usize> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found '{token}'")))
}

fn parse_group(line: usize, args: &[&str]) -> Result<FiniteGroup> {
    let wrap = |e: Error| parse_err(line, e.to_string());
    let arg = |i: usize, what: &str| number(line, args.get(i).copied(), what);
    match args.first().copied() {
        Some("cyclic") => FiniteGroup::cyclic(arg(1, "group order")?).map_err(wrap),
        Some("symmetric") => FiniteGroup::symmetric(arg(1, "degree")?).map_err(wrap),
        Some("dihedral") => FiniteGroup::dihedral(arg(1, "polygon size")?).map_err(wrap),
        Some("quaternion") => FiniteGroup::quaternion().map_err(wrap),
        Some("table") => {
            let n = arg(1, "group order")?;
            let table = args[2..]
                .iter()
                .map(|t| number(line, Some(t), "table entry"))
                .collect::<Result<Vec<_>>>()?;
            FiniteGroup::from_table(n, table, None).map_err(wrap)
        }
        Some(other) => Err(parse_err(line, format!("unknown group kind '{other}'"))),
        None => Err(parse_err(line, "missing group kind")),
    }
}

#[derive(Default)]
struct Raw<'a> {
    group: Option<(usize, FiniteGroup)>,
    alphabet: Option<(usize, Vec<String>)>,
    subs: Vec<(usize, &'a str, Vec<&'a str>)>,
    stationary_labels: Vec<(usize, &'a str, usize, &'a str)>,
    levels: Option<(usize, usize)>,
    vertices: BTreeMap<usize, (usize, usize)>,
    edges: Vec<(usize, usize, usize, usize)>,
    orders: Vec<(usize, usize, usize, Vec<usize>)>,
    labels: Vec<(usize, usize, usize, &'a str)>,
    stationary: bool,
    depth: Option<usize>,
    window: Option<usize>,
    bound: Option<usize>,
    seed: Option<String>,
}

/// Splits a rule image, allowing `XXY` shorthand when every letter is one character.
fn image_tokens<'a>(tokens: &[&'a str], alphabet: &[String]) -> Vec<&'a str> {
    let single = alphabet.iter().all(|a| a.chars().count() == 1);
    let mut out = Vec::new();
    for &t in tokens {
        if single && !alphabet.iter().any(|a| a == t) && t.chars().count() > 1 {
            out.extend(t.char_indices().map(|(i, c)| &t[i..i + c.len_utf8()]));
        } else {
            out.push(t);
        }
    }
    out
}

pub fn parse_spec(text: &str) -> Result<SpecDocument> {
    let mut raw = Raw::default();
    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = full.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, args)) = tokens.split_first() else {
            continue;
        };
        match head {
            "group" => {
                if raw.group.is_some() {
                    return Err(parse_err(line, "group declared twice"));
                }
                raw.group = Some((line, parse_group(line, args)?));
            }
            "alphabet" => {
                if args.is_empty() {
                    return Err(parse_err(line, "empty alphabet"));
                }
                raw.alphabet = Some((line, args.iter().map(|s| s.to_string()).collect()));
            }
            "sub" => {
                let arrow = args
                    .iter()
                    .position(|&t| t == "->")
                    .ok_or_else(|| parse_err(line, "expected 'sub <letter> -> <image>'"))?;
                if arrow != 1 || args.len() < 3 {
                    return Err(parse_err(line, "expected 'sub <letter> -> <image>'"));
                }
                raw.subs.push((line, args[0], args[2..].to_vec()));
            }
            "label-stationary" => {
                if args.len() != 3 {
                    return Err(parse_err(line, "expected 'label-stationary <letter> <position> <element>'"));
                }
                let k = number(line, Some(args[1]), "position")?;
                raw.stationary_labels.push((line, args[0], k, args[2]));
            }
            "levels" => raw.levels = Some((line, number(line, args.first().copied(), "level count")?)),
            "vertices" => {
                let n = number(line, args.first().copied(), "level")?;
                let c = number(line, args.get(1).copied(), "vertex count")?;
                raw.vertices.insert(n, (line, c));
            }
            "edge" => {
                let n = number(line, args.first().copied(), "level")?;
                let s = number(line, args.get(1).copied(), "source")?;
                let r = number(line, args.get(2).copied(), "range")?;
                raw.edges.push((line, n, s, r));
            }
            "order" => {
                let n = number(line, args.first().copied(), "level")?;
                let v = number(line, args.get(1).copied(), "vertex")?;
                let rest = args.get(2..).unwrap_or(&[]).join(" ");
                let perm = rest
                    .replace(['(', ')', ','], " ")
                    .split_whitespace()
                    .map(|t| number(line, Some(t), "edge index"))
                    .collect::<Result<Vec<_>>>()?;
                raw.orders.push((line, n, v, perm));
            }
            "label" => {
                let n = number(line, args.first().copied(), "level")?;
                let e = number(line, args.get(1).copied(), "edge")?;
                let g = args.get(2).copied().ok_or_else(|| parse_err(line, "missing group element"))?;
                raw.labels.push((line, n, e, g));
            }
            "stationary" => raw.stationary = true,
            "depth" => raw.depth = Some(number(line, args.first().copied(), "depth")?),
            "window" => raw.window = Some(number(line, args.first().copied(), "window")?),
            "bound" => raw.bound = Some(number(line, args.first().copied(), "bound")?),
            "seed" => {
                raw.seed = Some(
                    args.first()
                        .ok_or_else(|| parse_err(line, "missing seed letter"))?
                        .to_string(),
                )
            }
            other => return Err(parse_err(line, format!("unknown directive '{other}'"))),
        }
    }
    resolve(raw, text)
}

fn resolve(raw: Raw<'_>, text: &str) -> Result<SpecDocument> {
    let group: Option<SharedGroup> = raw.group.map(|(_, g)| Arc::new(g));
    let element = |line: usize, token: &str| -> Result<GroupElement> {
        let g = group
            .as_ref()
            .ok_or_else(|| parse_err(line, "labels need a group declaration"))?;
        g.parse_element(token).map_err(|e| parse_err(line, e.to_string()))
    };
    let has_sub = raw.alphabet.is_some() || !raw.subs.is_empty();
    let has_diagram = raw.levels.is_some() || !raw.edges.is_empty() || !raw.vertices.is_empty();
    if has_sub && has_diagram {
        return Err(parse_err(1, "declare either a diagram or a substitution, not both"));
    }
    let (source, labels) = if has_sub {
        if let Some(&(line, ..)) = raw.orders.first().or(None) {
            return Err(parse_err(line, "order lines apply to diagrams; a substitution fixes its order"));
        }
        if let Some(&(line, ..)) = raw.labels.first() {
            return Err(parse_err(line, "use label-stationary with a substitution"));
        }
        let (aline, alphabet) = raw.alphabet.ok_or_else(|| parse_err(1, "substitution without an alphabet"))?;
        let index = |line: usize, name: &str| {
            alphabet
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| parse_err(line, format!("undeclared letter '{name}'")))
        };
        let mut images: Vec<Option<Vec<usize>>> = vec![None; alphabet.len()];
        for (line, letter, image) in &raw.subs {
            let a = index(*line, letter)?;
            if images[a].is_some() {
                return Err(parse_err(*line, format!("letter '{letter}' has two rules")));
            }
            images[a] = Some(
                image_tokens(image, &alphabet)
                    .into_iter()
                    .map(|t| index(*line, t))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(a, im)| im.ok_or_else(|| parse_err(aline, format!("letter '{}' has no rule", alphabet[a]))))
            .collect::<Result<Vec<_>>>()?;
        let sigma = Substitution::new(alphabet.clone(), images).map_err(|e| parse_err(aline, e.to_string()))?;
        let labels = if raw.stationary_labels.is_empty() {
            Labels::None
        } else {
            let g = group.clone().ok_or_else(|| parse_err(raw.stationary_labels[0].0, "labels need a group declaration"))?;
            let mut values: Vec<Vec<GroupElement>> =
                sigma.images().iter().map(|w| vec![g.identity(); w.len()]).collect();
            for &(line, letter, k, token) in &raw.stationary_labels {
                let b = index(line, letter)?;
                if k == 0 || k > values[b].len() {
                    return Err(parse_err(line, format!("position {k} is outside the image of '{letter}'")));
                }
                values[b][k - 1] = element(line, token)?;
            }
            Labels::Stationary(StationaryLabelling::new(&sigma, g, values).map_err(|e| parse_err(aline, e.to_string()))?)
        };
        (Source::Substitution(sigma), labels)
    } else if has_diagram {
        if let Some(&(line, ..)) = raw.stationary_labels.first() {
            return Err(parse_err(line, "label-stationary applies to substitutions"));
        }
        let (lline, depth) = raw.levels.ok_or_else(|| parse_err(1, "diagram without a 'levels' line"))?;
        if depth == 0 {
            return Err(parse_err(lline, "a diagram needs at least one level"));
        }
        let mut sizes = vec![1];
        for n in 1..=depth {
            let &(_, c) = raw
                .vertices
                .get(&n)
                .ok_or_else(|| parse_err(lline, format!("no 'vertices {n}' line")))?;
            sizes.push(c);
        }
        if let Some((&n, &(line, c))) = raw.vertices.iter().find(|(&n, &(_, c))| n > depth || (n == 0 && c != 1)) {
            return Err(parse_err(line, format!("level {n} with {c} vertices is not declarable here")));
        }
        let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); depth];
        for &(line, n, s, r) in &raw.edges {
            if n == 0 || n > depth {
                return Err(parse_err(line, format!("edge level {n} outside 1..={depth}")));
            }
            edges[n - 1].push(Edge::new(s, r));
        }
        let diagram = BratteliDiagram::new(sizes, edges, raw.stationary).map_err(|e| parse_err(lline, e.to_string()))?;
        let mut order: Vec<Vec<Vec<usize>>> = (1..=depth)
            .map(|n| (0..diagram.level_size(n)).map(|v| diagram.incoming(n, v).to_vec()).collect())
            .collect();
        for (line, n, v, perm) in &raw.orders {
            if *n == 0 || *n > depth || *v >= diagram.level_size(*n) {
                return Err(parse_err(*line, format!("no vertex {v} at level {n}")));
            }
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            if sorted != diagram.incoming(*n, *v) {
                return Err(parse_err(*line, "not a permutation of the edges into the vertex"));
            }
            order[n - 1][*v] = perm.clone();
        }
        let ordered = OrderedBratteliDiagram::new(diagram, order).map_err(|e| parse_err(lline, e.to_string()))?;
        let labels = if raw.labels.is_empty() {
            Labels::None
        } else {
            let g = group.clone().ok_or_else(|| parse_err(raw.labels[0].0, "labels need a group declaration"))?;
            let d = ordered.diagram();
            let mut values: Vec<Vec<Option<GroupElement>>> = (1..=depth).map(|n| vec![None; d.edges(n).len()]).collect();
            for &(line, n, e, token) in &raw.labels {
                if n == 0 || n > depth || e >= d.edges(n).len() {
                    return Err(parse_err(line, format!("no edge {e} at level {n}")));
                }
                values[n - 1][e] = Some(element(line, token)?);
            }
            let last = raw.labels.last().map_or(lline, |l| l.0);
            let values = values
                .into_iter()
                .enumerate()
                .map(|(k, level)| {
                    level
                        .into_iter()
                        .enumerate()
                        .map(|(e, x)| match x {
                            Some(x) => Ok(x),
                            None if k == 0 => Ok(g.identity()),
                            None => Err(parse_err(last, format!("missing label for edge {e} at level {}", k + 1))),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Labels::Edges(Labelling::new(d, g, values).map_err(|e| parse_err(last, e.to_string()))?)
        };
        (Source::Diagram(ordered), labels)
    } else {
        return Err(parse_err(1, "no diagram or substitution declared"));
    };
    Ok(SpecDocument {
        group,
        source,
        labels,
        depth: raw.depth,
        window: raw.window,
        bound: raw.bound,
        seed: raw.seed,
        digest: digest(text),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Validate,
    Simple,
    Vershik,
    Trace,
    Skew,
    Triple,
    Quotient,
    Square,
    Loops,
    Cohomology,
    Toeplitz,
    EmitDot,
    EmitJson,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Simple => "simple",
            Command::Vershik => "vershik",
            Command::Trace => "trace",
            Command::Skew => "skew",
            Command::Triple => "triple",
            Command::Quotient => "quotient",
            Command::Square => "square",
            Command::Loops => "loops",
            Command::Cohomology => "cohomology",
            Command::Toeplitz => "toeplitz",
            Command::EmitDot => "emit-dot",
            Command::EmitJson => "emit-json",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Dot,
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub depth: Option<usize>,
    pub level: Option<usize>,
    pub vertex: Option<usize>,
    pub window: Option<usize>,
    pub bound: Option<usize>,
    pub format: Option<Format>,
    /// Run `simple`, `triple` and `toeplitz` on the unlabelled base.
    pub base: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Verified,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: String,
    pub status: Outcome,
    pub result: Value,
    pub tool_version: String,
    #[serde(skip)]
    pub dot: Option<String>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Outcome::Verified => 0,
            Outcome::Refuted => 1,
        }
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("value serializes") + "\n"
    }

    /// The DOT text for graph output, otherwise the JSON report.
    pub fn render(&self) -> String {
        self.dot.clone().unwrap_or_else(|| self.to_json())
    }
}

/// Vertex names and labels to annotate a diagram in DOT and JSON output.
struct Annotated<'a> {
    diagram: &'a OrderedBratteliDiagram,
    labels: Option<&'a Labelling>,
    names: Option<Vec<Vec<String>>>,
}

fn emit_levels(d: &BratteliDiagram, level: Option<usize>) -> Result<usize> {
    let top = level.unwrap_or(d.declared_depth().max(if d.is_stationary() { 2 } else { 1 }));
    d.require_level(top)?;
    Ok(top)
}

fn to_dot(a: &Annotated<'_>, top: usize) -> String {
    let d = a.diagram.diagram();
    let mut out = String::from("digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n");
    for n in 0..=top {
        let _ = writeln!(out, "  subgraph cluster_level_{n} {{\n    label=\"level {n}\";");
        for v in 0..d.level_size(n) {
            let name = a
                .names
                .as_ref()
                .and_then(|names| names.get(d.block(n)).and_then(|l| l.get(v)).cloned())
                .unwrap_or_else(|| v.to_string());
            let _ = writeln!(out, "    \"{n}:{v}\" [label={}];", quote(&name));
        }
        out.push_str("  }\n");
    }
    for n in 1..=top {
        for (e, edge) in d.edges(n).iter().enumerate() {
            let _ = write!(
                out,
                "  \"{}:{}\" -> \"{n}:{}\" [rank={}",
                n - 1,
                edge.source,
                edge.range,
                a.diagram.rank(n, e)
            );
            if let Some(l) = a.labels {
                let _ = write!(out, ", g={}", quote(l.group().name(l.label(n, e))));
            }
            out.push_str("];\n");
        }
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDocument {
    pub label: String,
    pub order: usize,
    pub names: Vec<String>,
    pub table: Vec<usize>,
}

impl GroupDocument {
    pub fn new(g: &FiniteGroup) -> Self {
        Self {
            label: g.label().to_string(),
            order: g.order(),
            names: g.names().to_vec(),
            table: g.table().to_vec(),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        Ok(FiniteGroup::from_table(self.order, self.table.clone(), Some(self.names.clone()))?.with_label(&self.label))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDocument {
    pub levels: Vec<usize>,
    /// `edges[k]` lists `[source, range]` for level `k + 1`.
    pub edges: Vec<Vec<[usize; 2]>>,
    pub ranks: Vec<Vec<usize>>,
    pub stationary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<Vec<String>>>,
}

impl DiagramDocument {
    fn new(a: &Annotated<'_>) -> Self {
        let d = a.diagram.diagram();
        let depth = d.declared_depth();
        Self {
            levels: d.level_sizes().to_vec(),
            edges: (1..=depth)
                .map(|n| d.edges(n).iter().map(|e| [e.source, e.range]).collect())
                .collect(),
            ranks: a.diagram.ranks().to_vec(),
            stationary: d.is_stationary(),
            labels: a.labels.map(|l| {
                l.values()
                    .iter()
                    .map(|level| level.iter().map(|&g| l.group().name(g).to_string()).collect())
                    .collect()
            }),
            names: a.names.clone(),
        }
    }

    pub fn build(&self) -> Result<OrderedBratteliDiagram> {
        let edges = self
            .edges
            .iter()
            .map(|level| level.iter().map(|&[s, r]| Edge::new(s, r)).collect())
            .collect();
        let d = BratteliDiagram::new(self.levels.clone(), edges, self.stationary)?;
        OrderedBratteliDiagram::with_ranks(d, self.ranks.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionDocument {
    pub alphabet: Vec<String>,
    pub images: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

/// The JSON form of a [`SpecDocument`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagram: Option<DiagramDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<SubstitutionDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

pub fn to_spec_json(doc: &SpecDocument) -> SpecJson {
    let (diagram, substitution) = match &doc.source {
        Source::Diagram(d) => {
            let labels = match &doc.labels {
                Labels::Edges(l) => Some(l),
                _ => None,
            };
            let a = Annotated {
                diagram: d,
                labels,
                names: None,
            };
            (Some(DiagramDocument::new(&a)), None)
        }
        Source::Substitution(s) => {
            let labels = match &doc.labels {
                Labels::Stationary(l) => Some(
                    l.values
                        .iter()
                        .map(|w| w.iter().map(|&g| l.group.name(g).to_string()).collect())
                        .collect(),
                ),
                _ => None,
            };
            let images = s
                .images()
                .iter()
                .map(|w| w.iter().map(|&a| s.name(a).to_string()).collect())
                .collect();
            (
                None,
                Some(SubstitutionDocument {
                    alphabet: s.names().to_vec(),
                    images,
                    labels,
                }),
            )
        }
    };
    SpecJson {
        group: doc.group.as_deref().map(GroupDocument::new),
        diagram,
        substitution,
        depth: doc.depth,
        window: doc.window,
        bound: doc.bound,
        seed: doc.seed.clone(),
    }
}

/// Rebuilds a document from the output of `emit-json`.
/// Accepts a bare spec object or an `emit-json` report wrapping one in `result`.
pub fn parse_spec_json(text: &str) -> Result<SpecDocument> {
    let json_error = |e: serde_json::Error| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    };
    let mut value: Value = serde_json::from_str(text).map_err(json_error)?;
    if value.get("command").is_some() {
        if let Some(inner) = value.get_mut("result") {
            value = inner.take();
        }
    }
    let spec: SpecJson = serde_json::from_value(value).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    from_spec_json(&spec, digest(text))
}

pub fn from_spec_json(spec: &SpecJson, digest: String) -> Result<SpecDocument> {
    let group = spec.group.as_ref().map(GroupDocument::build).transpose()?.map(Arc::new);
    let parse_names = |g: &SharedGroup, levels: &[Vec<String>]| -> Result<Vec<Vec<GroupElement>>> {
        levels
            .iter()
            .map(|l| l.iter().map(|t| g.parse_element(t)).collect())
            .collect()
    };
    let need_group = || group.clone().ok_or_else(|| Error::Argument("labels need a group".into()));
    let (source, labels) = match (&spec.diagram, &spec.substitution) {
        (Some(d), None) => {
            let ordered = d.build()?;
            let labels = match &d.labels {
                Some(l) => {
                    let g = need_group()?;
                    Labels::Edges(Labelling::new(ordered.diagram(), g.clone(), parse_names(&g, l)?)?)
                }
                None => Labels::None,
            };
            (Source::Diagram(ordered), labels)
        }
        (None, Some(s)) => {
            let images = s
                .images
                .iter()
                .map(|w| {
                    w.iter()
                        .map(|x| {
                            s.alphabet
                                .iter()
                                .position(|a| a == x)
                                .ok_or_else(|| Error::InvalidSubstitution(format!("undeclared letter '{x}'")))
                        })
                        .collect()
                })
                .collect::<Result<Vec<_>>>()?;
            let sigma = Substitution::new(s.alphabet.clone(), images)?;
            let labels = match &s.labels {
                Some(l) => {
                    let g = need_group()?;
                    Labels::Stationary(StationaryLabelling::new(&sigma, g.clone(), parse_names(&g, l)?)?)
                }
                None => Labels::None,
            };
            (Source::Substitution(sigma), labels)
        }
        _ => return Err(Error::Argument("expected exactly one of 'diagram' and 'substitution'".into())),
    };
    Ok(SpecDocument {
        group,
        source,
        labels,
        depth: spec.depth,
        window: spec.window,
        bound: spec.bound,
        seed: spec.seed.clone(),
        digest,
    })
}

fn skew_names(sigma_names: Option<&[String]>, base: &BratteliDiagram, g: &FiniteGroup, depth: usize) -> Vec<Vec<String>> {
    let k = g.order();
    (0..=depth)
        .map(|n| {
            if n == 0 {
                return vec!["root".to_string()];
            }
            (0..base.level_size(n) * k)
                .map(|x| {
                    let v = match sigma_names {
                        Some(names) => names[x / k].clone(),
                        None => (x / k).to_string(),
                    };
                    format!("({},{})", v, g.name(GroupElement(x % k)))
                })
                .collect()
        })
        .collect()
}

fn triple_name(names: &[String], t: &[usize; 3]) -> String {
    format!("[{},{},{}]", names[t[0]], names[t[1]], names[t[2]])
}

fn letter_names(doc: &SpecDocument, d: &BratteliDiagram, depth: usize) -> Vec<Vec<String>> {
    (0..=depth)
        .map(|n| {
            (0..d.level_size(n))
                .map(|v| match (n, doc.substitution()) {
                    (0, _) => "root".to_string(),
                    (_, Some(s)) => s.name(v).to_string(),
                    _ => v.to_string(),
                })
                .collect()
        })
        .collect()
}

fn substitution_json(s: &Substitution) -> Value {
    json!({"alphabet": s.names(), "rules": s.table()})
}

fn report(doc: &SpecDocument, command: Command, ok: bool, result: Value) -> RunReport {
    RunReport {
        command: command.name().into(),
        input_digest: doc.digest.clone(),
        status: if ok { Outcome::Verified } else { Outcome::Refuted },
        result,
        tool_version: TOOL_VERSION.into(),
        dot: None,
    }
}

fn graph_output(
    doc: &SpecDocument,
    command: Command,
    opts: &Options,
    a: &Annotated<'_>,
    mut extra: serde_json::Map<String, Value>,
) -> Result<RunReport> {
    let d = a.diagram.diagram();
    let top = emit_levels(d, opts.level)?;
    let mut r = report(doc, command, true, Value::Null);
    match opts.format.unwrap_or(Format::Json) {
        Format::Dot => r.dot = Some(to_dot(a, top)),
        Format::Json => {
            extra.insert("diagram".into(), serde_json::to_value(DiagramDocument::new(a)).expect("serializes"));
            r.result = Value::Object(extra);
        }
    }
    Ok(r)
}

fn object(v: Value) -> serde_json::Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => serde_json::Map::new(),
    }
}

pub fn run_command(doc: &SpecDocument, command: Command, opts: &Options) -> Result<RunReport> {
    let depth_or = |default: usize| opts.depth.or(doc.depth).unwrap_or(default);
    let base = doc.ordered();
    let d = base.diagram();
    match command {
        Command::Validate => {
            let v = d.validate();
            let mut result = json!({
                "levels": d.level_sizes(),
                "stationary": d.is_stationary(),
                "violations": v,
            });
            if let Some(s) = doc.substitution() {
                result["primitive"] = json!(s.check_primitive());
                result["proper"] = json!(s.check_proper());
            }
            Ok(report(doc, command, v.is_valid(), result))
        }
        Command::Simple => {
            let max_gap = depth_or(DEFAULT_MAX_GAP);
            let (target, verdict) = if doc.has_labels() && !opts.base {
                let skew = skew_product(&base, &doc.labelling()?)?;
                ("skew", skew.total.diagram().check_simple(max_gap))
            } else {
                ("base", d.check_simple(max_gap))
            };
            let ok = matches!(verdict, Simplicity::Simple { .. });
            Ok(report(doc, command, ok, json!({"target": target, "max_gap": max_gap, "simplicity": verdict})))
        }
        Command::Vershik => {
            let m = opts.level.unwrap_or(d.declared_depth().max(1));
            d.require_level(m)?;
            let v = opts.vertex.unwrap_or(0);
            if v >= d.level_size(m) {
                return Err(Error::Argument(format!("no vertex {v} at level {m}")));
            }
            let steps = opts.window.unwrap_or(DEFAULT_VERSHIK_STEPS);
            let mut path = base.extremal_path(0, m, v, Extremal::Min);
            let mut paths = vec![path.edges.clone()];
            let mut maximal = false;
            while paths.len() < steps {
                match base.vershik_step(&path)? {
                    Step::Next(p) => {
                        paths.push(p.edges.clone());
                        path = p;
                    }
                    Step::Maximal => {
                        maximal = true;
                        break;
                    }
                }
            }
            if !maximal && paths.len() == steps {
                maximal = base.vershik_step(&path)? == Step::Maximal;
            }
            let mut result = json!({
                "level": m,
                "vertex": v,
                "height": d.path_count(0, m, v).to_string(),
                "paths": paths,
                "reached_maximal": maximal,
            });
            if d.is_stationary() {
                if let Ok(p) = base.check_properly_ordered(ProperMode::ExactStationary) {
                    result["properly_ordered"] = json!(p.is_proper());
                }
            }
            Ok(report(doc, command, true, result))
        }
        Command::Trace => {
            let m = opts.level.unwrap_or(d.declared_depth().max(1));
            let v = opts.vertex.unwrap_or(0);
            let n = opts.depth.unwrap_or(1);
            let trace = base.tower_trace(m, v, n)?;
            let runs = trace.runs();
            Ok(report(doc, command, true, json!({"trace": trace, "runs": runs})))
        }
        Command::Skew => {
            let labels = doc.labelling()?;
            if let (Some(sigma), None) = (doc.substitution(), opts.format) {
                let skew = skew_substitution(sigma, &doc.stationary_labels()?);
                return Ok(report(doc, command, true, json!({"substitution": substitution_json(&skew)})));
            }
            let skew = skew_product(&base, &labels)?;
            let top = skew.total.diagram().declared_depth();
            let names = skew_names(doc.substitution().map(|s| s.names()), d, labels.group(), top);
            let a = Annotated {
                diagram: &skew.total,
                labels: None,
                names: Some(names),
            };
            graph_output(doc, command, opts, &a, serde_json::Map::new())
        }
        Command::Triple => {
            if let (Some(sigma), None) = (doc.substitution(), opts.format) {
                let target = if doc.has_labels() && !opts.base {
                    skew_substitution(sigma, &doc.stationary_labels()?)
                } else {
                    sigma.clone()
                };
                let t = triple_substitution(&target)?;
                return Ok(report(
                    doc,
                    command,
                    true,
                    json!({
                        "size": t.triples.len(),
                        "degenerate": t.degenerate,
                        "substitution": substitution_json(&t.substitution),
                    }),
                ));
            }
            let (target, names) = if doc.has_labels() && !opts.base {
                let labels = doc.labelling()?;
                let skew = skew_product(&base, &labels)?;
                let top = skew.total.diagram().declared_depth();
                let names = skew_names(doc.substitution().map(|s| s.names()), d, labels.group(), top);
                (skew.total, names)
            } else {
                (base.clone(), letter_names(doc, d, d.declared_depth()))
            };
            let t = triple_diagram(&target, depth_or(target.diagram().declared_depth().max(2)))?;
            let tnames: Vec<Vec<String>> = t
                .triples
                .iter()
                .enumerate()
                .map(|(n, level)| {
                    level
                        .iter()
                        .map(|x| if n == 0 { "root".into() } else { triple_name(&names[target.diagram().block(n)], x) })
                        .collect()
                })
                .collect();
            let a = Annotated {
                diagram: &t.diagram,
                labels: None,
                names: Some(tnames),
            };
            let extra = object(json!({"bounded": t.bounded, "sizes": t.diagram.diagram().level_sizes()}));
            graph_output(doc, command, opts, &a, extra)
        }
        Command::Quotient => {
            let labels = doc.labelling()?;
            let group = labels.group().clone();
            let skew = skew_product(&base, &labels)?;
            let t = triple_diagram(&skew.total, depth_or(skew.total.diagram().declared_depth().max(2)))?;
            let action = group
                .elements()
                .map(|g| t.lift_automorphism(&skew.apply_action(g)))
                .collect::<Result<Vec<_>>>()?;
            let q = quotient_by_action(&t.diagram, &group, &action)?;
            let qd = q.diagram.diagram();
            let top = qd.declared_depth();
            let names = skew_names(doc.substitution().map(|s| s.names()), d, &group, skew.total.diagram().declared_depth());
            let orbit_names: Vec<Vec<String>> = (0..=top)
                .map(|n| {
                    if n == 0 {
                        return vec!["root".to_string()];
                    }
                    q.vertex_reps[n]
                        .iter()
                        .map(|&rep| {
                            let mut members: Vec<usize> = action.iter().map(|a| a.vertex(n, rep)).collect();
                            members.sort_unstable();
                            let parts: Vec<String> =
                                members.iter().map(|&x| triple_name(&names[n], &t.triples[n][x])).collect();
                            format!("{{{}}}", parts.join(" "))
                        })
                        .collect()
                })
                .collect();
            let a = Annotated {
                diagram: &q.diagram,
                labels: None,
                names: Some(orbit_names.clone()),
            };
            let extra = object(json!({
                "orbits": qd.level_size(top),
                "sizes": qd.level_sizes(),
                "orbit_names": orbit_names[top],
            }));
            graph_output(doc, command, opts, &a, extra)
        }
        Command::Square => {
            let depth = depth_or(DEFAULT_SQUARE_DEPTH);
            let labels = doc.labelling()?;
            let sq = theorem_square(&base, &labels, depth)?;
            let qd = sq.quotient.diagram.diagram();
            let cocycle = cocycle_from_square(&sq, 1.max(qd.declared_depth().min(depth)))?;
            let ok = sq.all_pass();
            Ok(report(
                doc,
                command,
                ok,
                json!({
                    "depth": depth,
                    "all_pass": ok,
                    "clauses": sq.clauses,
                    "quotient_sizes": qd.level_sizes(),
                    "quotient_size": qd.level_size(qd.declared_depth()),
                    "cocycle": cocycle,
                }),
            ))
        }
        Command::Loops => {
            let labels = doc.labelling()?;
            let depth = depth_or(default_loops_depth(d, &labels));
            let verdict = check_loops_lift(&base, &labels, depth)?;
            Ok(report(doc, command, verdict.holds(), json!({"depth": depth, "loops": verdict})))
        }
        Command::Cohomology => {
            let labels = doc.labelling()?;
            let depth = depth_or(DEFAULT_SQUARE_DEPTH);
            let trivial = Labelling::trivial(d, labels.group().clone());
            let verdict = check_cohomologous(d, &labels, &trivial, None, depth)?;
            let ok = matches!(verdict, CohomologyVerdict::Verified { .. });
            Ok(report(doc, command, ok, json!({"depth": depth, "against": "trivial", "cohomology": verdict})))
        }
        Command::Toeplitz => {
            let sigma = doc
                .substitution()
                .ok_or_else(|| Error::Argument("toeplitz needs a substitution".into()))?;
            let target = if doc.has_labels() && !opts.base {
                skew_substitution(sigma, &doc.stationary_labels()?)
            } else {
                sigma.clone()
            };
            let seed = match &doc.seed {
                Some(name) => {
                    let lifted = match (&doc.group, target.len() == sigma.len()) {
                        (Some(g), false) => sigma.letter(name).map(|a| a * g.order() + g.identity().0),
                        _ => None,
                    };
                    target
                        .letter(name)
                        .or(lifted)
                        .ok_or_else(|| Error::Seed(format!("unknown seed letter '{name}'")))?
                }
                None => target
                    .default_seed()
                    .ok_or_else(|| Error::Seed("no letter is periodic under the first-letter map".into()))?,
            };
            let window = opts.window.or(doc.window).unwrap_or(DEFAULT_WINDOW);
            let bound = opts.bound.or(doc.bound).unwrap_or(DEFAULT_BOUND);
            let seq = fixed_point_window(&target, seed, window)?;
            let r = toeplitz_window_check(&seq, bound)?;
            let all_periodic = r.aperiodic_positions == 0;
            Ok(report(
                doc,
                command,
                all_periodic,
                json!({
                    "seed": target.name(seed),
                    "length": r.length,
                    "bound": r.bound,
                    "aperiodic_positions": r.aperiodic_positions,
                    "first_aperiodic": r.first_aperiodic,
                    "global_period": r.global_period,
                    "toeplitz_consistent": r.toeplitz_consistent(),
                    "prefix": target.format_word(&seq[..seq.len().min(64)]),
                }),
            ))
        }
        Command::EmitDot | Command::EmitJson => {
            let format = opts.format.unwrap_or(if command == Command::EmitDot { Format::Dot } else { Format::Json });
            if format == Format::Json {
                let value = serde_json::to_value(to_spec_json(doc)).expect("serializes");
                return Ok(report(doc, command, true, value));
            }
            let labels = match &doc.labels {
                Labels::None => None,
                _ => Some(doc.labelling()?),
            };
            let top = emit_levels(d, opts.level)?;
            let a = Annotated {
                diagram: &base,
                labels: labels.as_ref(),
                names: Some(letter_names(doc, d, d.declared_depth())),
            };
            let mut r = report(doc, command, true, Value::Null);
            r.dot = Some(to_dot(&a, top));
            Ok(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "alphabet X Y\nsub X -> X X Y\nsub Y -> X Y Y\ngroup cyclic 2\nlabel-stationary Y 2 1\n";

    #[test]
    fn empty_input_is_rejected() {
        let err = parse_spec("# nothing\n\n").unwrap_err();
        assert!(err.to_string().contains("no diagram or substitution declared"));
    }

    #[test]
    fn order_must_be_a_permutation() {
        let text = "levels 2\nvertices 1 1\nvertices 2 1\nedge 1 0 0\nedge 2 0 0\nedge 2 0 0\nedge 2 0 0\norder 2 0 (0 0 1)\n";
        let err = parse_spec(text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 8, .. }), "{err}");
        assert!(err.to_string().contains("not a permutation"));
    }

    #[test]
    fn unknown_directive_and_letter() {
        assert!(parse_spec("frobnicate 3\n").unwrap_err().to_string().contains("unknown directive"));
        let err = parse_spec("alphabet X\nsub X -> X Z\n").unwrap_err();
        assert!(err.to_string().contains("undeclared letter"));
    }

    #[test]
    fn missing_label_is_reported() {
        let text = "group cyclic 2\nlevels 2\nvertices 1 1\nvertices 2 1\nedge 1 0 0\nedge 2 0 0\nedge 2 0 0\nlabel 2 0 1\n";
        let err = parse_spec(text).unwrap_err();
        assert!(err.to_string().contains("missing label"), "{err}");
    }

    #[test]
    fn example_skew_table() {
        let doc = parse_spec(EXAMPLE).unwrap();
        let r = run_command(&doc, Command::Skew, &Options::default()).unwrap();
        let rules: Vec<String> = serde_json::from_value(r.result["substitution"]["rules"].clone()).unwrap();
        assert_eq!(
            rules,
            [
                "(X,0) -> (X,0) (X,0) (Y,0)",
                "(X,1) -> (X,1) (X,1) (Y,1)",
                "(Y,0) -> (X,0) (Y,1) (Y,0)",
                "(Y,1) -> (X,1) (Y,0) (Y,1)",
            ]
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let doc = parse_spec(EXAMPLE).unwrap();
        let a = run_command(&doc, Command::Loops, &Options::default()).unwrap().to_json();
        let b = run_command(&parse_spec(EXAMPLE).unwrap(), Command::Loops, &Options::default())
            .unwrap()
            .to_json();
        assert_eq!(a, b);
        assert!(a.find("\"command\"").unwrap() < a.find("\"input_digest\"").unwrap());
    }

    #[test]
    fn json_round_trip() {
        let doc = parse_spec(EXAMPLE).unwrap();
        let r = run_command(&doc, Command::EmitJson, &Options::default()).unwrap();
        let text = serde_json::to_string(&r.result).unwrap();
        let back = parse_spec_json(&text).unwrap();
        assert_eq!(back.source, doc.source);
        assert_eq!(back.labels, doc.labels);
        assert_eq!(back.group, doc.group);
    }

    #[test]
    fn dot_has_one_cluster_per_level() {
        let doc = parse_spec(EXAMPLE).unwrap();
        let opts = Options {
            level: Some(2),
            ..Options::default()
        };
        let r = run_command(&doc, Command::EmitDot, &opts).unwrap();
        let dot = r.dot.unwrap();
        assert_eq!(dot.matches("subgraph cluster_level_").count(), 3);
        assert!(dot.contains("[rank=1, g=\"1\"]"));
    }
}
