//! Finite groups as explicit operation tables.
//!
//! Every group compiles to a dense `order × order` table of element indices.
//! Named constructions (cyclic, symmetric, dihedral, quaternion, direct and
//! semidirect products) all produce such a table, so every check downstream can
//! enumerate the group exhaustively.
//!
//! Permutations compose right factor first: `op(a, b)` is the permutation
//! `i ↦ a(b(i))`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`FiniteGroup::symmetric`]; `7!² ≈ 2.5·10⁷` table entries is
/// already past what the exhaustive checkers can use.
pub const MAX_SYMMETRIC_DEGREE: usize = 6;

/// Associativity is verified on every triple up to this order and sampled above it.
const EXHAUSTIVE_ASSOCIATIVITY_ORDER: usize = 64;

/// Index of an element in its owning [`FiniteGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub usize);

impl GroupElement {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite group given by its operation table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
    label: String,
}

pub type SharedGroup = Arc<FiniteGroup>;

impl FiniteGroup {
    /// Builds a group from a row-major table `table[a * order + b] = a·b`.
    ///
    /// Validates closure, a two-sided identity, inverses and associativity.
    pub fn from_table(order: usize, table: Vec<usize>, names: Option<Vec<String>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if table.len() != order * order {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, found {}",
                order * order,
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x >= order) {
            return Err(Error::ElementOutOfRange { index: *bad, order });
        }
        let op = |a: usize, b: usize| table[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| op(e, x) == x && op(x, e) == x))
            .ok_or_else(|| Error::InvalidTable("no two-sided identity".into()))?;
        let mut inverse = Vec::with_capacity(order);
        for a in 0..order {
            let inv = (0..order)
                .find(|&b| op(a, b) == identity && op(b, a) == identity)
                .ok_or_else(|| Error::InvalidTable(format!("element {a} has no inverse")))?;
            inverse.push(inv);
        }
        if order <= EXHAUSTIVE_ASSOCIATIVITY_ORDER {
            for a in 0..order {
                for b in 0..order {
                    let ab = op(a, b);
                    for c in 0..order {
                        if op(ab, c) != op(a, op(b, c)) {
                            return Err(Error::InvalidTable(format!(
                                "associativity fails on ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = SplitMix64(0x005e_ed0f_9a9e ^ order as u64);
            for _ in 0..10 * order * order {
                let a = rng.below(order);
                let b = rng.below(order);
                let c = rng.below(order);
                if op(op(a, b), c) != op(a, op(b, c)) {
                    return Err(Error::InvalidTable(format!(
                        "associativity fails on ({a}, {b}, {c})"
                    )));
                }
            }
        }
        let names = match names {
            Some(n) if n.len() == order => n,
            Some(n) => {
                return Err(Error::InvalidTable(format!(
                    "{} names given for {} elements",
                    n.len(),
                    order
                )))
            }
            None => (0..order).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            order,
            table,
            identity,
            inverse,
            names,
            label: format!("table({order})"),
        })
    }

    /// The cyclic group ℤₙ with `op(i, j) = (i + j) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        let mut g = Self::from_table(n, table, None)?;
        g.label = format!("Z{n}");
        Ok(g)
    }

    /// The symmetric group Sₙ. Elements are listed in lexicographic order of their
    /// image tuples (identity first) and named in cycle notation on `1..=n`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if n > MAX_SYMMETRIC_DEGREE {
            return Err(Error::Capacity {
                what: "symmetric group degree",
                requested: n,
                max: MAX_SYMMETRIC_DEGREE,
            });
        }
        let perms = permutations(n);
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        let mut g = Self::from_permutations(&perms, Some(names))?;
        g.label = format!("S{n}");
        Ok(g)
    }

    /// The dihedral group of order `2n`: elements `r^i s^j`, encoded as `i + n·j`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let order = 2 * n;
        let mut table = vec![0; order * order];
        let mut names = Vec::with_capacity(order);
        for a in 0..order {
            let (i, j) = (a % n, a / n);
            names.push(match (i, j) {
                (0, 0) => "e".to_string(),
                (i, 0) => format!("r{i}"),
                (0, _) => "s".to_string(),
                (i, _) => format!("r{i}s"),
            });
            for b in 0..order {
                let (k, l) = (b % n, b / n);
                // r^i s^j · r^k s^l = r^(i ± k) s^(j + l)
                let rot = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                table[a * order + b] = rot + n * ((j + l) % 2);
            }
        }
        let mut g = Self::from_table(order, table, Some(names))?;
        g.label = format!("D{n}");
        Ok(g)
    }

    /// The quaternion group Q₈ ordered as `1, -1, i, -i, j, -j, k, -k`.
    pub fn quaternion() -> Result<Self> {
        // unit index u in {1, i, j, k} -> 0..4, sign bit s; element = 2u + s
        const UNIT_PRODUCT: [[(usize, bool); 4]; 4] = [
            [(0, false), (1, false), (2, false), (3, false)],
            [(1, false), (0, true), (3, false), (2, true)],
            [(2, false), (3, true), (0, true), (1, false)],
            [(3, false), (2, false), (1, true), (0, true)],
        ];
        let mut table = vec![0; 64];
        for a in 0..8 {
            for b in 0..8 {
                let (u, neg) = UNIT_PRODUCT[a / 2][b / 2];
                let sign = (a % 2 == 1) ^ (b % 2 == 1) ^ neg;
                table[a * 8 + b] = 2 * u + usize::from(sign);
            }
        }
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut g = Self::from_table(8, table, Some(names))?;
        g.label = "Q8".into();
        Ok(g)
    }

    /// `G × H`, element `(g, h)` encoded as `g · |H| + h`.
    pub fn direct_product(left: &Self, right: &Self) -> Result<Self> {
        let (m, n) = (left.order, right.order);
        let order = m * n;
        let mut table = vec![0; order * order];
        let mut names = Vec::with_capacity(order);
        for a in 0..order {
            names.push(format!("({},{})", left.names[a / n], right.names[a % n]));
            for b in 0..order {
                let g = left.op_index(a / n, b / n);
                let h = right.op_index(a % n, b % n);
                table[a * order + b] = g * n + h;
            }
        }
        let mut g = Self::from_table(order, table, Some(names))?;
        g.label = format!("{}x{}", left.label, right.label);
        Ok(g)
    }

    /// `N ⋊ H` for an explicit action: `action[h]` is the automorphism of `N` by
    /// which `h` acts, as a permutation of element indices. Multiplication is
    /// `(n₁, h₁)(n₂, h₂) = (n₁ · action[h₁](n₂), h₁h₂)`; `(n, h)` is encoded as
    /// `n · |H| + h`.
    pub fn semidirect_product(normal: &Self, acting: &Self, action: &[Vec<usize>]) -> Result<Self> {
        let (m, n) = (normal.order, acting.order);
        if action.len() != n || action.iter().any(|p| p.len() != m) {
            return Err(Error::InvalidTable("action must give one permutation of N per element of H".into()));
        }
        for (h, phi) in action.iter().enumerate() {
            for x in 0..m {
                for y in 0..m {
                    if phi[normal.op_index(x, y)] != normal.op_index(phi[x], phi[y]) {
                        return Err(Error::InvalidTable(format!(
                            "action of element {h} is not a homomorphism"
                        )));
                    }
                }
            }
        }
        for h1 in 0..n {
            for h2 in 0..n {
                let composed: Vec<usize> = (0..m).map(|x| action[h1][action[h2][x]]).collect();
                if composed != action[acting.op_index(h1, h2)] {
                    return Err(Error::InvalidTable("action is not a homomorphism H -> Aut(N)".into()));
                }
            }
        }
        let order = m * n;
        let mut table = vec![0; order * order];
        let mut names = Vec::with_capacity(order);
        for a in 0..order {
            let (n1, h1) = (a / n, a % n);
            names.push(format!("({},{})", normal.names[n1], acting.names[h1]));
            for b in 0..order {
                let (n2, h2) = (b / n, b % n);
                let nn = normal.op_index(n1, action[h1][n2]);
                table[a * order + b] = nn * n + acting.op_index(h1, h2);
            }
        }
        let mut g = Self::from_table(order, table, Some(names))?;
        g.label = format!("{}:{}", normal.label, acting.label);
        Ok(g)
    }

    /// Builds the group generated by a closed set of permutations, in the order given.
    pub fn from_permutations(perms: &[Vec<usize>], names: Option<Vec<String>>) -> Result<Self> {
        let order = perms.len();
        if order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        let index: std::collections::HashMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let mut table = vec![0; order * order];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                let composed: Vec<usize> = pb.iter().map(|&x| pa[x]).collect();
                table[a * order + b] = *index
                    .get(composed.as_slice())
                    .ok_or_else(|| Error::InvalidTable("permutations not closed under composition".into()))?;
            }
        }
        Self::from_table(order, table, names)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(self.identity)
    }

    /// Short description such as `Z2` or `S3`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(GroupElement)
    }

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        if index < self.order {
            Ok(GroupElement(index))
        } else {
            Err(Error::ElementOutOfRange {
                index,
                order: self.order,
            })
        }
    }

    /// Resolves a token that is either an element name or a decimal index.
    pub fn parse_element(&self, token: &str) -> Result<GroupElement> {
        if let Some(i) = self.names.iter().position(|n| n == token) {
            return Ok(GroupElement(i));
        }
        match token.parse::<usize>() {
            Ok(i) => self.element(i),
            Err(_) => Err(Error::Argument(format!("unknown group element '{token}'"))),
        }
    }

    pub fn name(&self, g: GroupElement) -> &str {
        &self.names[g.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Row-major operation table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    fn op_index(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn op(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        GroupElement(self.op_index(a.0, b.0))
    }

    #[inline]
    pub fn inv(&self, a: GroupElement) -> GroupElement {
        GroupElement(self.inverse[a.0])
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.op_index(a, b) == self.op_index(b, a)))
    }

    /// Left-to-right product `w₁·w₂⋯wₖ`; the empty word is the identity.
    pub fn evaluate_word(&self, word: &[GroupElement]) -> Result<GroupElement> {
        word.iter().try_fold(self.identity(), |acc, &g| {
            self.element(g.0)?;
            Ok(self.op(acc, g))
        })
    }

    /// Whether `s·t⁻¹·s⁻¹ = t·s⁻¹·t⁻¹`, the group condition that the loops-lift
    /// property reduces to on the 2-adic odometer labelled by `s` (minimal edges)
    /// and `t` (maximal edges).
    pub fn check_odometer_relation(&self, s: GroupElement, t: GroupElement) -> bool {
        let lhs = self.op(self.op(s, self.inv(t)), self.inv(s));
        let rhs = self.op(self.op(t, self.inv(s)), self.inv(t));
        lhs == rhs
    }

    /// The subgroup generated by `gens`, as a sorted list.
    pub fn generated_subgroup(&self, gens: &[GroupElement]) -> Vec<GroupElement> {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut stack = vec![self.identity()];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.op(x, g);
                if !seen[y.0] {
                    seen[y.0] = true;
                    stack.push(y);
                }
            }
        }
        self.elements().filter(|g| seen[g.0]).collect()
    }
}

/// One representative of each isomorphism class of groups of order at most 8.
pub fn small_group_catalog() -> Vec<FiniteGroup> {
    let z = |n| FiniteGroup::cyclic(n).expect("cyclic");
    vec![
        z(1),
        z(2),
        z(3),
        z(4),
        FiniteGroup::direct_product(&z(2), &z(2)).expect("V4"),
        z(5),
        z(6),
        FiniteGroup::symmetric(3).expect("S3"),
        z(7),
        z(8),
        FiniteGroup::direct_product(&z(4), &z(2)).expect("Z4xZ2"),
        FiniteGroup::direct_product(&FiniteGroup::direct_product(&z(2), &z(2)).expect("V4"), &z(2))
            .expect("Z2^3"),
        FiniteGroup::dihedral(4).expect("D4"),
        FiniteGroup::quaternion().expect("Q8"),
    ]
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// Deterministic sampler for the associativity spot-check on large tables.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composes permutations of `0..n` directly, right factor first.
    fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
        b.iter().map(|&x| a[x]).collect()
    }

    fn perm_of(g: &FiniteGroup, name: &str) -> Vec<usize> {
        // recover the permutation behind a cycle-notation name
        let mut p: Vec<usize> = (0..3).collect();
        if name != "e" {
            for cycle in name.trim_matches(|c| c == '(' || c == ')').split(")(") {
                let pts: Vec<usize> = cycle.chars().map(|c| c.to_digit(10).unwrap() as usize - 1).collect();
                for i in 0..pts.len() {
                    p[pts[i]] = pts[(i + 1) % pts.len()];
                }
            }
        }
        assert!(g.names().iter().any(|n| n == name));
        p
    }

    #[test]
    fn cyclic_groups() {
        let z1 = FiniteGroup::cyclic(1).unwrap();
        assert_eq!(z1.order(), 1);
        assert_eq!(z1.identity(), GroupElement(0));
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(z2.op(GroupElement(1), GroupElement(1)), GroupElement(0));
        let z4 = FiniteGroup::cyclic(4).unwrap();
        assert_eq!(z4.op(GroupElement(3), GroupElement(2)), GroupElement(1));
        assert_eq!(FiniteGroup::cyclic(0), Err(Error::InvalidOrder(0)));
    }

    #[test]
    fn symmetric_groups() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert_eq!(FiniteGroup::symmetric(1).unwrap().order(), 1);
        assert!(matches!(FiniteGroup::symmetric(7), Err(Error::Capacity { .. })));

        let s = s3.parse_element("(12)").unwrap();
        let t = s3.parse_element("(123)").unwrap();
        let st = s3.op(s, t);
        let oracle = compose(&perm_of(&s3, "(12)"), &perm_of(&s3, "(123)"));
        assert_eq!(perm_of(&s3, s3.name(st)), oracle);
        // a transposition fixes exactly one of three points
        assert_eq!(oracle.iter().enumerate().filter(|(i, &x)| *i == x).count(), 1);
        assert_eq!(s3.name(st), "(23)");
    }

    #[test]
    fn words() {
        let z2 = FiniteGroup::cyclic(2).unwrap();
        assert_eq!(z2.evaluate_word(&[]).unwrap(), z2.identity());
        let one = GroupElement(1);
        assert_eq!(z2.evaluate_word(&[one, one, one]).unwrap(), one);
        assert!(matches!(
            z2.evaluate_word(&[GroupElement(5)]),
            Err(Error::ElementOutOfRange { index: 5, order: 2 })
        ));

        let s3 = FiniteGroup::symmetric(3).unwrap();
        let s = s3.parse_element("(12)").unwrap();
        let t = s3.parse_element("(123)").unwrap();
        let value = s3.evaluate_word(&[s, t, s]).unwrap();
        let (ps, pt) = (perm_of(&s3, "(12)"), perm_of(&s3, "(123)"));
        let oracle = compose(&compose(&ps, &pt), &ps);
        assert_eq!(perm_of(&s3, s3.name(value)), oracle);
    }

    #[test]
    fn odometer_relation() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let s = s3.parse_element("(12)").unwrap();
        let t = s3.parse_element("(123)").unwrap();
        assert!(!s3.check_odometer_relation(s, t));
        let lhs = s3.op(s3.op(s, s3.inv(t)), s3.inv(s));
        let rhs = s3.op(s3.op(t, s3.inv(s)), s3.inv(t));
        assert_eq!(s3.name(lhs), "(123)");
        assert_eq!(s3.name(rhs), "(23)");
        for g in s3.elements() {
            assert!(s3.check_odometer_relation(g, g));
        }
    }

    #[test]
    fn odometer_relation_is_symmetric() {
        for g in [FiniteGroup::symmetric(3).unwrap(), FiniteGroup::cyclic(6).unwrap()] {
            for s in g.elements() {
                for t in g.elements() {
                    assert_eq!(g.check_odometer_relation(s, t), g.check_odometer_relation(t, s));
                }
            }
        }
    }

    #[test]
    fn cyclic_groups_satisfy_relation_only_on_the_diagonal() {
        for n in 1..=8 {
            let g = FiniteGroup::cyclic(n).unwrap();
            for s in g.elements() {
                for t in g.elements() {
                    assert_eq!(g.check_odometer_relation(s, t), s == t);
                }
            }
        }
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert!(s3
            .elements()
            .any(|s| s3.elements().any(|t| !s3.check_odometer_relation(s, t))));
    }

    #[test]
    fn right_cancellation_in_catalog() {
        let mut all = small_group_catalog();
        all.push(FiniteGroup::symmetric(4).unwrap());
        for g in &all {
            for a in g.elements() {
                for b in g.elements() {
                    assert_eq!(g.op(g.op(a, b), g.inv(b)), a, "{}", g.label());
                }
            }
        }
        let orders: Vec<usize> = small_group_catalog().iter().map(|g| g.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 4, 4, 5, 6, 6, 7, 8, 8, 8, 8, 8]);
    }

    #[test]
    fn nonabelian_catalog_members() {
        let labels: Vec<String> = small_group_catalog()
            .into_iter()
            .filter(|g| !g.is_abelian())
            .map(|g| g.label().to_string())
            .collect();
        assert_eq!(labels, vec!["S3", "D4", "Q8"]);
    }

    #[test]
    fn semidirect_product_of_z7_by_z3() {
        let z7 = FiniteGroup::cyclic(7).unwrap();
        let z3 = FiniteGroup::cyclic(3).unwrap();
        // h acts by x ↦ 2^h x
        let action: Vec<Vec<usize>> = (0..3)
            .map(|h| (0..7).map(|x| (x * 2usize.pow(h as u32)) % 7).collect())
            .collect();
        let g = FiniteGroup::semidirect_product(&z7, &z3, &action).unwrap();
        assert_eq!(g.order(), 21);
        assert!(!g.is_abelian());
        let bad: Vec<Vec<usize>> = (0..3).map(|_| (0..7).map(|x| (x + 1) % 7).collect()).collect();
        assert!(FiniteGroup::semidirect_product(&z7, &z3, &bad).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(2, vec![0, 1, 1, 1], None).is_err());
        assert!(FiniteGroup::from_table(2, vec![0, 1, 1], None).is_err());
        assert!(matches!(
            FiniteGroup::from_table(2, vec![0, 1, 1, 2], None),
            Err(Error::ElementOutOfRange { .. })
        ));
        let g = FiniteGroup::from_table(2, vec![0, 1, 1, 0], None).unwrap();
        assert_eq!(g.parse_element("1").unwrap(), GroupElement(1));
    }

    #[test]
    fn sampled_associativity_for_large_tables() {
        let s5 = FiniteGroup::symmetric(5).unwrap();
        assert_eq!(s5.order(), 120);
        let z = FiniteGroup::cyclic(70).unwrap();
        let mut broken = z.table().to_vec();
        // swap two rows' worth of products: keeps a Latin square but breaks associativity
        for b in 0..70 {
            broken.swap(70 + b, 2 * 70 + b);
        }
        assert!(FiniteGroup::from_table(70, broken, None).is_err());
    }
}
