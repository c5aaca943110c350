//! Reduced crystallographic root systems of the simple Cartan types A–G.
//!
//! Roots are integer vectors in the simple-root basis (Bourbaki numbering).
//! The canonical order lists positive roots first, sorted by height and then
//! by descending coefficient vector (so the simple roots appear as
//! `α_1, …, α_r`), followed by the negatives in the same order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    family: Family,
    rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(Error::InvalidCartanType(format!("{family:?}{rank}")))
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Squared lengths `(α_i, α_i)` and the edges of the Dynkin diagram.
    fn dynkin_data(&self) -> (Vec<i64>, Vec<(usize, usize)>) {
        let r = self.rank;
        let chain = |n: usize| (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
        match self.family {
            Family::A => (vec![2; r], chain(r)),
            Family::B => {
                let mut len = vec![4; r];
                len[r - 1] = 2;
                (len, chain(r))
            }
            Family::C => {
                let mut len = vec![2; r];
                len[r - 1] = 4;
                (len, chain(r))
            }
            Family::D => {
                let mut edges = chain(r - 1);
                edges.push((r - 3, r - 1));
                (vec![2; r], edges)
            }
            Family::E => {
                // Bourbaki: α2 hangs off α4, the chain is α1-α3-α4-α5-…
                let mut edges = vec![(0, 2), (1, 3), (2, 3)];
                edges.extend((3..r - 1).map(|i| (i, i + 1)));
                (vec![2; r], edges)
            }
            Family::F => (vec![4, 4, 2, 2], chain(4)),
            Family::G => (vec![2, 6], chain(2)),
        }
    }

    /// Gram matrix `(α_i, α_j)` of the simple roots, normalised so the
    /// shortest roots have squared length 2.
    pub fn gram_matrix(&self) -> Vec<Vec<i64>> {
        let (len, edges) = self.dynkin_data();
        let r = self.rank;
        let mut gram = vec![vec![0i64; r]; r];
        for i in 0..r {
            gram[i][i] = len[i];
        }
        for &(i, j) in &edges {
            let v = -len[i].max(len[j]) / 2;
            gram[i][j] = v;
            gram[j][i] = v;
        }
        gram
    }

    /// Cartan matrix with `A_ij = ⟨α_j, α_i^∨⟩ = 2(α_i, α_j)/(α_i, α_i)`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let gram = self.gram_matrix();
        (0..self.rank).map(|i| (0..self.rank).map(|j| 2 * gram[i][j] / gram[i][i]).collect()).collect()
    }

    /// Exponent of the fundamental group (center of the simply-connected form).
    pub fn fundamental_group_exponent(&self) -> u64 {
        match self.family {
            Family::A => self.rank as u64 + 1,
            Family::B | Family::C => 2,
            Family::D => {
                if self.rank.is_multiple_of(2) {
                    2
                } else {
                    4
                }
            }
            Family::E => match self.rank {
                6 => 3,
                7 => 2,
                _ => 1,
            },
            Family::F | Family::G => 1,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::InvalidCartanType(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::InvalidCartanType(s.to_string()))?;
        CartanType::new(family, rank)
    }
}

impl Serialize for CartanType {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CartanType {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A root written in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(pub Vec<i64>);

impl Root {
    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && self.0.iter().any(|&c| c > 0)
    }

    pub fn neg(&self) -> Root {
        Root(self.0.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled_add(&self, k: i64, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect())
    }
}

/// Cocharacter given by its pairings `x_j = ⟨α_j, λ⟩` with the simple roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CocharVec(pub Vec<i64>);

impl CocharVec {
    pub fn fundamental(rank: usize, j: usize) -> Self {
        let mut x = vec![0; rank];
        x[j] = 1;
        CocharVec(x)
    }

    pub fn pairings(&self) -> &[i64] {
        &self.0
    }
}

/// Height of a root: the sum of its simple-root coefficients.
pub fn height(r: &Root) -> i64 {
    r.height()
}

/// `⟨α, λ⟩ = Σ n_i x_i`.
pub fn pairing(r: &Root, lambda: &CocharVec) -> Result<i64> {
    if r.0.len() != lambda.0.len() {
        return Err(Error::RankMismatch { expected: r.0.len(), got: lambda.0.len() });
    }
    Ok(r.0.iter().zip(&lambda.0).map(|(n, x)| n * x).sum())
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    cartan_type: CartanType,
    cartan_matrix: Vec<Vec<i64>>,
    gram: Vec<Vec<i64>>,
    roots: Vec<Root>,
    coroot_coords: Vec<Vec<i64>>,
    index: HashMap<Root, usize>,
    num_positive: usize,
    highest: usize,
}

/// Builds the root system by the root-string rule, height by height:
/// for a positive root `β` and simple `α_i`, `β + α_i` is a root iff
/// `p - ⟨β, α_i^∨⟩ > 0`, where `p` is the length of the downward `α_i`-string.
pub fn build_root_system(t: CartanType) -> RootSystem {
    let r = t.rank();
    let a = t.cartan_matrix();
    let gram = t.gram_matrix();

    let simple: Vec<Root> = (0..r)
        .map(|i| {
            let mut v = vec![0; r];
            v[i] = 1;
            Root(v)
        })
        .collect();

    let mut positive: Vec<Root> = simple.clone();
    let mut known: std::collections::HashSet<Root> = positive.iter().cloned().collect();
    let mut layer = simple.clone();
    while !layer.is_empty() {
        let mut next: Vec<Root> = Vec::new();
        for beta in &layer {
            for i in 0..r {
                // ⟨β, α_i^∨⟩ = Σ_j n_j A_ij
                let pair: i64 = (0..r).map(|j| beta.0[j] * a[i][j]).sum();
                let mut p = 0;
                let mut down = beta.sub(&simple[i]);
                while known.contains(&down) {
                    p += 1;
                    down = down.sub(&simple[i]);
                }
                if p - pair > 0 {
                    let up = beta.add(&simple[i]);
                    if known.insert(up.clone()) {
                        next.push(up);
                    }
                }
            }
        }
        positive.extend(next.iter().cloned());
        layer = next;
    }

    positive.sort_by(|x, y| x.height().cmp(&y.height()).then_with(|| y.0.cmp(&x.0)));
    let num_positive = positive.len();
    let mut roots = positive.clone();
    roots.extend(positive.iter().map(Root::neg));

    let index = roots.iter().cloned().enumerate().map(|(i, rt)| (rt, i)).collect();

    // α^∨ = Σ n_i (α_i, α_i)/(α, α) α_i^∨
    let coroot_coords = roots
        .iter()
        .map(|rt| {
            let norm = quad_form(&gram, &rt.0);
            (0..r)
                .map(|i| {
                    let num = rt.0[i] * gram[i][i];
                    debug_assert_eq!(num % norm, 0);
                    num / norm
                })
                .collect()
        })
        .collect();

    RootSystem {
        cartan_type: t,
        cartan_matrix: a,
        gram,
        roots,
        coroot_coords,
        index,
        num_positive,
        highest: num_positive - 1,
    }
}

fn quad_form(gram: &[Vec<i64>], v: &[i64]) -> i64 {
    let r = v.len();
    let mut s = 0;
    for i in 0..r {
        for j in 0..r {
            s += v[i] * gram[i][j] * v[j];
        }
    }
    s
}

impl RootSystem {
    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank()
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan_matrix
    }

    pub fn gram_matrix(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.roots[i]
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn num_positive(&self) -> usize {
        self.num_positive
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.num_positive]
    }

    pub fn index_of(&self, r: &Root) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn contains(&self, r: &Root) -> bool {
        self.index.contains_key(r)
    }

    /// Index of `-α` in the canonical order.
    pub fn negative_index(&self, i: usize) -> usize {
        if i < self.num_positive {
            i + self.num_positive
        } else {
            i - self.num_positive
        }
    }

    pub fn simple_root_index(&self, i: usize) -> usize {
        debug_assert!(i < self.rank());
        i
    }

    pub fn highest_root(&self) -> &Root {
        &self.roots[self.highest]
    }

    pub fn highest_root_index(&self) -> usize {
        self.highest
    }

    pub fn coroot_coords(&self, i: usize) -> &[i64] {
        &self.coroot_coords[i]
    }

    /// `(α, β)` under the normalised invariant form.
    pub fn inner_product(&self, x: &Root, y: &Root) -> i64 {
        let r = self.rank();
        let mut s = 0;
        for i in 0..r {
            for j in 0..r {
                s += x.0[i] * self.gram[i][j] * y.0[j];
            }
        }
        s
    }

    pub fn norm(&self, x: &Root) -> i64 {
        self.inner_product(x, x)
    }

    /// `⟨α, β^∨⟩ = 2(α, β)/(β, β)`.
    pub fn cartan_integer(&self, alpha: &Root, beta: &Root) -> i64 {
        2 * self.inner_product(alpha, beta) / self.norm(beta)
    }

    /// `⟨α, α_i^∨⟩`, i.e. `α(H_{α_i})`.
    pub fn simple_cartan_integer(&self, alpha: &Root, i: usize) -> i64 {
        (0..self.rank()).map(|j| alpha.0[j] * self.cartan_matrix[i][j]).sum()
    }

    /// `s_β(α) = α − ⟨α, β^∨⟩ β`.
    pub fn reflect(&self, alpha: &Root, beta: &Root) -> Root {
        alpha.scaled_add(-self.cartan_integer(alpha, beta), beta)
    }

    pub fn cartan_determinant(&self) -> i64 {
        integer_determinant(&self.cartan_matrix)
    }

    /// Largest `p` with `β − pα ∈ Φ`.
    pub fn string_down(&self, alpha: &Root, beta: &Root) -> i64 {
        let mut p = 0;
        let mut cur = beta.sub(alpha);
        while self.contains(&cur) {
            p += 1;
            cur = cur.sub(alpha);
        }
        p
    }

    pub fn highest_root_coeffs(&self) -> Vec<i64> {
        highest_root_coeffs(self)
    }

    pub fn coxeter_number(&self) -> u64 {
        coxeter_number(self)
    }

    pub fn coxeter_element_order(&self) -> u64 {
        coxeter_element_order(self)
    }

    pub fn to_json(&self) -> RootSystemJson {
        RootSystemJson {
            cartan_type: self.cartan_type,
            cartan_matrix: self.cartan_matrix.clone(),
            roots: self.roots.clone(),
            highest_root: self.highest_root().clone(),
        }
    }
}

/// Serialized form `{type, cartan_matrix, roots, highest_root}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemJson {
    #[serde(rename = "type")]
    pub cartan_type: CartanType,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub roots: Vec<Root>,
    pub highest_root: Root,
}

pub fn highest_root_coeffs(rs: &RootSystem) -> Vec<i64> {
    rs.highest_root().0.clone()
}

pub fn coxeter_number(rs: &RootSystem) -> u64 {
    rs.highest_root().height() as u64 + 1
}

/// Order of `w_{α_1} ⋯ w_{α_r}` as a permutation of the root list.
pub fn coxeter_element_order(rs: &RootSystem) -> u64 {
    let n = rs.len();
    let perm: Vec<usize> = (0..n)
        .map(|k| {
            // rightmost reflection acts first
            let mut v = rs.root(k).clone();
            for i in (0..rs.rank()).rev() {
                v = rs.reflect(&v, rs.root(i));
            }
            rs.index_of(&v).expect("Weyl group preserves the root system")
        })
        .collect();
    permutation_order(&perm)
}

pub(crate) fn permutation_order(perm: &[usize]) -> u64 {
    let mut seen = vec![false; perm.len()];
    let mut order = 1u64;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        order = crate::modp::lcm(order, len);
    }
    order
}

/// Fraction-free (Bareiss) determinant.
pub(crate) fn integer_determinant(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|row| row.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        build_root_system(s.parse().unwrap())
    }

    #[test]
    fn parse_types() {
        assert_eq!("a1".parse::<CartanType>().unwrap().to_string(), "A1");
        assert_eq!("G2".parse::<CartanType>().unwrap().rank(), 2);
        for bad in ["B1", "D3", "E9", "F3", "G3", "A0", "X2", "", "A"] {
            assert!(bad.parse::<CartanType>().is_err(), "{bad}");
        }
    }

    #[test]
    fn small_systems() {
        let a1 = rs("A1");
        assert_eq!(a1.len(), 2);
        assert_eq!(a1.roots(), &[Root(vec![1]), Root(vec![-1])]);

        let g2 = rs("G2");
        assert_eq!(g2.len(), 12);
        assert_eq!(g2.highest_root(), &Root(vec![3, 2]));
        assert_eq!(g2.highest_root().height(), 5);

        assert_eq!(rs("B2").len(), 8);
        assert_eq!(rs("A2").highest_root_coeffs(), vec![1, 1]);
    }

    #[test]
    fn canonical_order() {
        let a3 = rs("A3");
        assert_eq!(a3.root(0), &Root(vec![1, 0, 0]));
        assert_eq!(a3.root(1), &Root(vec![0, 1, 0]));
        assert_eq!(a3.root(2), &Root(vec![0, 0, 1]));
        assert_eq!(a3.root(3), &Root(vec![1, 1, 0]));
        assert_eq!(a3.root(4), &Root(vec![0, 1, 1]));
        for i in 0..a3.len() {
            assert_eq!(a3.root(a3.negative_index(i)), &a3.root(i).neg());
        }
    }

    #[test]
    fn heights_and_pairings() {
        let g2 = rs("G2");
        assert_eq!(height(g2.root(0)), 1);
        assert_eq!(height(&g2.root(0).neg()), -1);
        let lam = CocharVec(vec![3, 5]);
        assert_eq!(pairing(g2.highest_root(), &lam).unwrap(), 19);
        assert!(pairing(g2.root(0), &CocharVec(vec![1])).is_err());
        for i in 0..2 {
            for j in 0..2 {
                let v = pairing(g2.root(i), &CocharVec::fundamental(2, j)).unwrap();
                assert_eq!(v, (i == j) as i64);
            }
        }
    }

    #[test]
    fn cartan_conventions() {
        let b2 = "B2".parse::<CartanType>().unwrap();
        assert_eq!(b2.cartan_matrix(), vec![vec![2, -1], vec![-2, 2]]);
        let g2 = "G2".parse::<CartanType>().unwrap();
        assert_eq!(g2.cartan_matrix(), vec![vec![2, -3], vec![-1, 2]]);
        let dets = [
            ("A1", 2),
            ("A3", 4),
            ("B3", 2),
            ("C3", 2),
            ("D4", 4),
            ("D5", 4),
            ("E6", 3),
            ("E7", 2),
            ("E8", 1),
            ("F4", 1),
            ("G2", 1),
        ];
        for (t, d) in dets {
            assert_eq!(rs(t).cartan_determinant(), d, "{t}");
        }
    }

    #[test]
    fn highest_roots_bourbaki() {
        assert_eq!(rs("B3").highest_root_coeffs(), vec![1, 2, 2]);
        assert_eq!(rs("C3").highest_root_coeffs(), vec![2, 2, 1]);
        assert_eq!(rs("D4").highest_root_coeffs(), vec![1, 2, 1, 1]);
        assert_eq!(rs("F4").highest_root_coeffs(), vec![2, 3, 4, 2]);
        assert_eq!(rs("E6").highest_root_coeffs(), vec![1, 2, 2, 3, 2, 1]);
        assert_eq!(rs("E8").highest_root_coeffs(), vec![2, 3, 4, 6, 5, 4, 3, 2]);
    }

    #[test]
    fn coxeter_data() {
        assert_eq!(rs("A1").coxeter_number(), 2);
        assert_eq!(rs("A1").coxeter_element_order(), 2);
        assert_eq!(rs("A3").coxeter_element_order(), 4);
        assert_eq!(rs("G2").coxeter_number(), 6);
        assert_eq!(rs("G2").coxeter_element_order(), 6);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(rs("A2").to_json()).unwrap();
        assert_eq!(v["type"], "A2");
        assert_eq!(v["highest_root"], serde_json::json!([1, 1]));
        assert_eq!(v["roots"].as_array().unwrap().len(), 6);
    }
}
