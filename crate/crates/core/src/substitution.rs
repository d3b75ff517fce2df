//! Substitutions, their stationary ordered diagrams, skew substitutions, the
//! triple substitution and finite-window Toeplitz checks.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::diagram::{primitive_exponent, BratteliDiagram, Edge};
use crate::error::{Error, Result};
use crate::groups::{GroupElement, SharedGroup};
use crate::labelling::Labelling;
use crate::ordering::OrderedBratteliDiagram;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Substitution {
    names: Vec<String>,
    images: Vec<Vec<usize>>,
}

impl Substitution {
    /// Letters are indices into `names`; every image must be non-empty and every
    /// letter must occur in some image.
    pub fn new(names: Vec<String>, images: Vec<Vec<usize>>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidSubstitution("empty alphabet".into()));
        }
        if images.len() != names.len() {
            return Err(Error::InvalidSubstitution(format!(
                "{} images for {} letters",
                images.len(),
                names.len()
            )));
        }
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != names.len() {
            return Err(Error::InvalidSubstitution("duplicate letter".into()));
        }
        let mut occurs = vec![false; names.len()];
        for (b, image) in images.iter().enumerate() {
            if image.is_empty() {
                return Err(Error::InvalidSubstitution(format!("empty image for {}", names[b])));
            }
            for &a in image {
                *occurs
                    .get_mut(a)
                    .ok_or_else(|| Error::InvalidSubstitution(format!("letter {a} out of range")))? = true;
            }
        }
        if let Some(a) = occurs.iter().position(|&o| !o) {
            return Err(Error::InvalidSubstitution(format!("letter {} occurs in no image", names[a])));
        }
        Ok(Self { names, images })
    }

    /// Parses rules such as `"X -> X X Y"`; letters are whitespace separated and the
    /// alphabet is ordered by first appearance on a left-hand side.
    pub fn from_rules(rules: &[&str]) -> Result<Self> {
        let mut names = Vec::new();
        let mut rhs = Vec::new();
        for rule in rules {
            let (l, r) = rule
                .split_once("->")
                .ok_or_else(|| Error::InvalidSubstitution(format!("rule '{rule}' has no '->'")))?;
            names.push(l.trim().to_string());
            rhs.push(r.split_whitespace().map(str::to_string).collect::<Vec<_>>());
        }
        let images = rhs
            .iter()
            .map(|word| {
                word.iter()
                    .map(|x| {
                        names
                            .iter()
                            .position(|n| n == x)
                            .ok_or_else(|| Error::InvalidSubstitution(format!("undeclared letter '{x}'")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, images)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn images(&self) -> &[Vec<usize>] {
        &self.images
    }

    pub fn image(&self, a: usize) -> &[usize] {
        &self.images[a]
    }

    pub fn apply(&self, word: &[usize]) -> Vec<usize> {
        word.iter().flat_map(|&a| self.images[a].iter().copied()).collect()
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        word.iter().map(|&a| self.names[a].as_str()).collect::<Vec<_>>().join(" ")
    }

    /// One line per letter, `b -> σ(b)`, in alphabet order.
    pub fn table(&self) -> Vec<String> {
        (0..self.len())
            .map(|b| format!("{} -> {}", self.names[b], self.format_word(&self.images[b])))
            .collect()
    }

    /// `M[a][b]` counts the occurrences of `a` in `σ(b)`.
    pub fn incidence(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.len()]; self.len()];
        for (b, image) in self.images.iter().enumerate() {
            for &a in image {
                m[a][b] += 1;
            }
        }
        m
    }

    pub fn check_primitive(&self) -> bool {
        let n = self.len();
        primitive_exponent(&self.incidence(), (n - 1) * (n - 1) + 1).is_some()
    }

    /// Whether the first-letter and last-letter maps each become constant under iteration.
    pub fn check_proper(&self) -> bool {
        let first: Vec<usize> = self.images.iter().map(|w| w[0]).collect();
        let last: Vec<usize> = self.images.iter().map(|w| w[w.len() - 1]).collect();
        eventually_constant(&first) && eventually_constant(&last)
    }

    pub fn constant_length(&self) -> Option<usize> {
        let n = self.images[0].len();
        self.images.iter().all(|w| w.len() == n).then_some(n)
    }

    /// The least letter that is periodic under the first-letter map.
    pub fn default_seed(&self) -> Option<usize> {
        (0..self.len()).find(|&a| self.first_letter_period(a).is_some())
    }

    fn first_letter_period(&self, seed: usize) -> Option<usize> {
        let mut x = seed;
        for p in 1..=self.len() {
            x = self.images[x][0];
            if x == seed {
                return Some(p);
            }
        }
        None
    }
}

fn eventually_constant(map: &[usize]) -> bool {
    let n = map.len();
    let mut image: Vec<usize> = (0..n).collect();
    for _ in 0..n {
        image = image.iter().map(|&x| map[x]).collect();
    }
    image.iter().all(|&x| x == image[0])
}

/// The stationary ordered diagram: one root edge per letter, then at each level the
/// edge `(a, k, b)` from `a` to `b` for the `k`-th letter `a` of `σ(b)`, ranked `k − 1`.
/// Edges into `b` are numbered consecutively in letter order.
pub fn diagram_from_substitution(sigma: &Substitution) -> OrderedBratteliDiagram {
    let n = sigma.len();
    let root_edges = (0..n).map(|a| Edge::new(0, a)).collect();
    let block = (0..n)
        .flat_map(|b| sigma.image(b).iter().map(move |&a| Edge::new(a, b)))
        .collect();
    let d = BratteliDiagram::new(vec![1, n, n], vec![root_edges, block], true).expect("substitution diagram is valid");
    OrderedBratteliDiagram::by_declaration(d)
}

/// Index of the edge `(a, k, b)` (1-based `k`) in [`diagram_from_substitution`].
pub fn substitution_edge(sigma: &Substitution, b: usize, k: usize) -> usize {
    sigma.images()[..b].iter().map(Vec::len).sum::<usize>() + k - 1
}

/// A label per (range letter `b`, position `k`), stored 0-based in `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StationaryLabelling {
    pub group: SharedGroup,
    pub values: Vec<Vec<GroupElement>>,
}

impl StationaryLabelling {
    pub fn new(sigma: &Substitution, group: SharedGroup, values: Vec<Vec<GroupElement>>) -> Result<Self> {
        if values.len() != sigma.len() {
            return Err(Error::Argument("stationary labels must cover every letter".into()));
        }
        for (b, v) in values.iter().enumerate() {
            if v.len() != sigma.image(b).len() {
                return Err(Error::LabellingIncomplete { level: 2, edge: b });
            }
            for g in v {
                group.element(g.0)?;
            }
        }
        Ok(Self { group, values })
    }

    pub fn trivial(sigma: &Substitution, group: SharedGroup) -> Self {
        let id = group.identity();
        let values = sigma.images().iter().map(|w| vec![id; w.len()]).collect();
        Self { group, values }
    }

    /// The Toeplitz labelling: `z^i` on the `i`-th position (1-based).
    pub fn toeplitz(sigma: &Substitution, group: SharedGroup, z: GroupElement) -> Self {
        let values = sigma
            .images()
            .iter()
            .map(|w| {
                let mut acc = group.identity();
                (0..w.len())
                    .map(|_| {
                        acc = group.op(acc, z);
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { group, values }
    }

    pub fn label(&self, b: usize, k: usize) -> GroupElement {
        self.values[b][k - 1]
    }

    /// The edge labelling of [`diagram_from_substitution`]; root edges get the identity.
    pub fn to_labelling(&self, sigma: &Substitution) -> Labelling {
        let base = diagram_from_substitution(sigma);
        let d = base.diagram();
        let id = self.group.identity();
        let level2 = self.values.iter().flatten().copied().collect();
        Labelling::new(d, self.group.clone(), vec![vec![id; sigma.len()], level2]).expect("labels cover the block")
    }
}

/// `σ_λ` on `A × G`: the `k`-th letter of `σ_λ(b, h)` is `(a, h·λ(a, k, b))` where
/// `a` is the `k`-th letter of `σ(b)`. `(a, g)` has index `a·|G| + g`.
pub fn skew_substitution(sigma: &Substitution, labels: &StationaryLabelling) -> Substitution {
    let g = &labels.group;
    let k = g.order();
    let mut names = Vec::with_capacity(sigma.len() * k);
    let mut images = Vec::with_capacity(sigma.len() * k);
    for b in 0..sigma.len() {
        for h in g.elements() {
            names.push(format!("({},{})", sigma.name(b), g.name(h)));
            images.push(
                sigma
                    .image(b)
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| a * k + g.op(h, labels.values[b][i]).0)
                    .collect(),
            );
        }
    }
    Substitution::new(names, images).expect("skew substitution is valid")
}

pub type Triple = [usize; 3];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripleSubstitution {
    pub substitution: Substitution,
    /// `triples[i]` is the letter triple behind letter `i`, in lexicographic order.
    pub triples: Vec<Triple>,
    /// Set when some image has length 1, so the degenerate image rule was used.
    pub degenerate: bool,
}

/// Length-2 and length-3 factors of `σʲ(d)` over all letters `d` and all `j ≥ 1`.
pub fn factor_closure(sigma: &Substitution) -> (BTreeSet<[usize; 2]>, BTreeSet<Triple>) {
    let mut f2 = BTreeSet::new();
    let mut f3 = BTreeSet::new();
    for w in sigma.images() {
        f2.extend(w.windows(2).map(|x| [x[0], x[1]]));
        f3.extend(w.windows(3).map(|x| [x[0], x[1], x[2]]));
    }
    loop {
        let mut grew = false;
        let pairs: Vec<[usize; 2]> = f2.iter().copied().collect();
        for [a, b] in pairs {
            let (wa, wb) = (sigma.image(a), sigma.image(b));
            grew |= f2.insert([wa[wa.len() - 1], wb[0]]);
            if wa.len() >= 2 {
                grew |= f3.insert([wa[wa.len() - 2], wa[wa.len() - 1], wb[0]]);
            }
            if wb.len() >= 2 {
                grew |= f3.insert([wa[wa.len() - 1], wb[0], wb[1]]);
            }
        }
        let triples: Vec<Triple> = f3.iter().copied().collect();
        for [a, b, c] in triples {
            if sigma.image(b).len() == 1 {
                let (wa, wc) = (sigma.image(a), sigma.image(c));
                grew |= f3.insert([wa[wa.len() - 1], sigma.image(b)[0], wc[0]]);
            }
        }
        if !grew {
            return (f2, f3);
        }
    }
}

/// The image of `(a, b, c)`: `(a_last, b₁, b₂)(b₁, b₂, b₃)⋯(b_{n−1}, b_n, c₁)`, or the
/// single triple `(a_last, b₁, c₁)` when `|σ(b)| = 1`.
pub fn triple_image(sigma: &Substitution, [a, b, c]: Triple) -> Vec<Triple> {
    let wa = sigma.image(a);
    let wb = sigma.image(b);
    let wc = sigma.image(c);
    let mut ext = Vec::with_capacity(wb.len() + 2);
    ext.push(wa[wa.len() - 1]);
    ext.extend_from_slice(wb);
    ext.push(wc[0]);
    ext.windows(3).map(|x| [x[0], x[1], x[2]]).collect()
}

pub fn triple_substitution(sigma: &Substitution) -> Result<TripleSubstitution> {
    let (_, f3) = factor_closure(sigma);
    if f3.is_empty() {
        return Err(Error::Tripling("the substitution has no factors of length 3".into()));
    }
    let triples: Vec<Triple> = f3.into_iter().collect();
    let index = |t: &Triple| triples.binary_search(t).ok();
    let mut images = Vec::with_capacity(triples.len());
    for &t in &triples {
        let image = triple_image(sigma, t)
            .iter()
            .map(|x| {
                index(x).ok_or_else(|| {
                    Error::Tripling(format!("image triple {:?} lies outside the closure", x))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(image);
    }
    let names = triples
        .iter()
        .map(|t| format!("[{},{},{}]", sigma.name(t[0]), sigma.name(t[1]), sigma.name(t[2])))
        .collect();
    Ok(TripleSubstitution {
        substitution: Substitution::new(names, images)?,
        triples,
        degenerate: sigma.images().iter().any(|w| w.len() == 1),
    })
}

/// The first `length` letters of the one-sided fixed point grown from `seed`, using
/// `σ^p` where `p` is the period of `seed` under the first-letter map.
pub fn fixed_point_window(sigma: &Substitution, seed: usize, length: usize) -> Result<Vec<usize>> {
    if seed >= sigma.len() {
        return Err(Error::Seed(format!("letter {seed} is not in the alphabet")));
    }
    if length == 0 {
        return Ok(Vec::new());
    }
    let p = sigma
        .first_letter_period(seed)
        .ok_or_else(|| Error::Seed(format!("no power of σ maps {} to a word starting with it", sigma.name(seed))))?;
    let mut word = vec![seed];
    while word.len() < length {
        let mut next = word.clone();
        for _ in 0..p {
            next = grow(sigma, &next, length);
        }
        if next.len() <= word.len() {
            return Err(Error::Seed(format!("the iterates of {} do not grow", sigma.name(seed))));
        }
        word = next;
    }
    word.truncate(length);
    Ok(word)
}

/// `σ(word)` truncated to `cap` letters.
fn grow(sigma: &Substitution, word: &[usize], cap: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(cap);
    for &a in word {
        if out.len() >= cap {
            break;
        }
        out.extend_from_slice(sigma.image(a));
    }
    out.truncate(cap);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToeplitzReport {
    pub length: usize,
    pub bound: usize,
    /// Least in-window period of each position, if one is at most `bound`.
    pub periods: Vec<Option<usize>>,
    /// Least `p ≤ bound` that is a period of the whole window.
    pub global_period: Option<usize>,
    pub aperiodic_positions: usize,
    pub first_aperiodic: Option<usize>,
}

impl ToeplitzReport {
    /// Every position is periodic within the bound and the window itself is not.
    pub fn toeplitz_consistent(&self) -> bool {
        self.aperiodic_positions == 0 && self.global_period.is_none()
    }
}

/// For each position `m`, the least `p ≤ bound` such that every in-window position
/// congruent to `m` mod `p` carries the same symbol.
pub fn toeplitz_window_check<T: Eq>(sequence: &[T], bound: usize) -> Result<ToeplitzReport> {
    let length = sequence.len();
    if bound == 0 || length < 2 * bound {
        return Err(Error::Argument(format!(
            "window of length {length} is too short for period bound {bound}"
        )));
    }
    let mut periods = vec![None; length];
    let mut global_period = None;
    for p in 1..=bound {
        let mut constant = vec![true; p];
        for i in p..length {
            if sequence[i] != sequence[i - p] {
                constant[i % p] = false;
            }
        }
        if global_period.is_none() && constant.iter().all(|&c| c) {
            global_period = Some(p);
        }
        for (m, slot) in periods.iter_mut().enumerate() {
            if slot.is_none() && constant[m % p] {
                *slot = Some(p);
            }
        }
    }
    let aperiodic_positions = periods.iter().filter(|p| p.is_none()).count();
    Ok(ToeplitzReport {
        length,
        bound,
        first_aperiodic: periods.iter().position(|p| p.is_none()),
        periods,
        global_period,
        aperiodic_positions,
    })
}
