#![allow(dead_code)]

use std::io::Write;
use std::sync::Arc;

use bratteli::groups::{FiniteGroup, GroupElement, SharedGroup};
use bratteli::labelling::{Labelling, VertexAssignment};
use bratteli::substitution::{diagram_from_substitution, StationaryLabelling, Substitution};
use bratteli::{BratteliDiagram, Edge, OrderedBratteliDiagram, Path};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Writes a result line past the test harness capture.
pub fn verdict(label: &str, ok: bool, detail: &str) {
    let mark = if ok { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{label}: {mark} - {detail}");
    let _ = out.flush();
}

pub fn xxy() -> Substitution {
    Substitution::from_rules(&["X -> X X Y", "Y -> X Y Y"]).unwrap()
}

pub fn z2() -> SharedGroup {
    Arc::new(FiniteGroup::cyclic(2).unwrap())
}

pub fn s3() -> SharedGroup {
    Arc::new(FiniteGroup::symmetric(3).unwrap())
}

/// λ(e²_YY) = 1 on the second edge into Y.
pub fn example_labels(sigma: &Substitution) -> StationaryLabelling {
    let g = z2();
    let mut values: Vec<Vec<GroupElement>> = sigma.images().iter().map(|w| vec![g.identity(); w.len()]).collect();
    values[1][1] = GroupElement(1);
    StationaryLabelling::new(sigma, g, values).unwrap()
}

pub fn odometer_sub() -> Substitution {
    Substitution::from_rules(&["a -> a a"]).unwrap()
}

pub fn s3_odometer_labels(sigma: &Substitution) -> StationaryLabelling {
    let g = s3();
    let s = g.parse_element("(12)").unwrap();
    let t = g.parse_element("(123)").unwrap();
    StationaryLabelling::new(sigma, g, vec![vec![s, t]]).unwrap()
}

/// A β on the XXY diagram, stationary on levels 1 and 2.
pub fn example_coboundary(d: &BratteliDiagram) -> (VertexAssignment, Labelling) {
    let beta = vec![
        vec![GroupElement(0)],
        vec![GroupElement(1), GroupElement(0)],
        vec![GroupElement(1), GroupElement(0)],
    ];
    let lam = bratteli::labelling::coboundary_labelling(d, z2(), &beta).unwrap();
    (beta, lam)
}

/// Every corpus labelling with its base: the Z2 XXY λ, trivial, a coboundary, the S₃ odometer.
pub fn corpus() -> Vec<(&'static str, OrderedBratteliDiagram, Labelling)> {
    let sigma = xxy();
    let base = diagram_from_substitution(&sigma);
    let lam = example_labels(&sigma).to_labelling(&sigma);
    let trivial = Labelling::trivial(base.diagram(), z2());
    let (_, cob) = example_coboundary(base.diagram());
    let odo = odometer_sub();
    let obase = diagram_from_substitution(&odo);
    let olab = s3_odometer_labels(&odo).to_labelling(&odo);
    vec![
        ("XXY over Z2", base.clone(), lam),
        ("trivial", base.clone(), trivial),
        ("coboundary", base, cob),
        ("S3 odometer", obase, olab),
    ]
}

/// A random finite ordered diagram: `sizes` per level, at most `mult` parallel edges.
pub fn random_diagram(rng: &mut ChaCha8Rng, depth: usize, max_vertices: usize, mult: usize) -> OrderedBratteliDiagram {
    let mut sizes = vec![1];
    for _ in 0..depth {
        sizes.push(rng.gen_range(1..=max_vertices));
    }
    let mut edges = Vec::with_capacity(depth);
    for n in 1..=depth {
        let (a, b) = (sizes[n - 1], sizes[n]);
        let mut count = vec![vec![0usize; b]; a];
        for row in count.iter_mut() {
            for c in row.iter_mut() {
                if rng.gen_bool(0.45) {
                    *c = rng.gen_range(1..=mult);
                }
            }
        }
        for r in 0..b {
            if count.iter().all(|row| row[r] == 0) {
                count[rng.gen_range(0..a)][r] = 1;
            }
        }
        for row in count.iter_mut() {
            if row.iter().all(|&c| c == 0) {
                row[rng.gen_range(0..b)] = 1;
            }
        }
        let mut level = Vec::new();
        for (s, row) in count.iter().enumerate() {
            for (r, &c) in row.iter().enumerate() {
                level.extend(std::iter::repeat_n(Edge::new(s, r), c));
            }
        }
        level.shuffle(rng);
        edges.push(level);
    }
    let d = BratteliDiagram::new(sizes, edges, false).unwrap();
    let order = (1..=depth)
        .map(|n| {
            (0..d.level_size(n))
                .map(|v| {
                    let mut inc = d.incoming(n, v).to_vec();
                    inc.shuffle(rng);
                    inc
                })
                .collect()
        })
        .collect();
    OrderedBratteliDiagram::new(d, order).unwrap()
}

/// All paths from level `from` to vertex `v` of level `m`, by exhaustive search over
/// edge tuples, sorted with the top edge most significant.
pub fn brute_force_paths(o: &OrderedBratteliDiagram, from: usize, m: usize, v: usize) -> Vec<Path> {
    let d = o.diagram();
    let mut partial: Vec<(usize, Vec<usize>)> = (0..d.level_size(from)).map(|x| (x, Vec::new())).collect();
    for n in from + 1..=m {
        let mut next = Vec::new();
        for (end, edges) in &partial {
            for (e, edge) in d.edges(n).iter().enumerate() {
                if edge.source == *end {
                    let mut p = edges.clone();
                    p.push(e);
                    next.push((edge.range, p));
                }
            }
        }
        partial = next;
    }
    let mut paths: Vec<Path> = partial
        .into_iter()
        .filter(|(end, _)| *end == v)
        .map(|(_, edges)| Path::new(from, edges))
        .collect();
    let key = |p: &Path| -> Vec<usize> {
        p.edges
            .iter()
            .enumerate()
            .rev()
            .map(|(j, &e)| o.rank(from + 1 + j, e))
            .collect()
    };
    paths.sort_by_key(key);
    paths
}

/// Group product by explicit permutation composition, right factor applied first.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}
