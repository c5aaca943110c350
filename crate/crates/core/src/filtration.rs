//! `F_p`-subspaces of `g` and the bracket-generated filtration
//! `W_1 = span(seeds)`, `W_k = Σ_{l+m=k} [W_l, W_m]`.
//!
//! No inclusion `W_k ⊆ W_{k+1}` is assumed: every level is built from
//! brackets of lower levels only, so a passing root-height check is a proof
//! from the bracket containment alone.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chevalley::{cochar_to_toral, max_structure_constant, ChevalleyBasis, LieElement};
use crate::error::{Error, Result};
use crate::modp;
use crate::rootsys::{CocharVec, Root};

/// Subspace of `F_p^{ambient_dim}` held in reduced row-echelon form, so equal
/// subspaces have identical `basis`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "SubspaceRepr", try_from = "SubspaceRepr")]
pub struct Subspace {
    p: u64,
    ambient_dim: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    p: u64,
    ambient_dim: usize,
    basis: Vec<Vec<u64>>,
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr { p: s.p, ambient_dim: s.ambient_dim, basis: s.basis }
    }
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        if !modp::is_prime(r.p) {
            return Err(Error::NotPrime(r.p));
        }
        Subspace::span_raw(r.p, r.ambient_dim, r.basis)
    }
}

impl Subspace {
    pub fn zero(p: u64, ambient_dim: usize) -> Self {
        Self { p, ambient_dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u64, ambient_dim: usize) -> Self {
        let basis = (0..ambient_dim)
            .map(|i| {
                let mut v = vec![0; ambient_dim];
                v[i] = 1;
                v
            })
            .collect();
        Self { p, ambient_dim, basis, pivots: (0..ambient_dim).collect() }
    }

    pub fn span(p: u64, ambient_dim: usize, vectors: &[LieElement]) -> Result<Self> {
        let mut s = Self::zero(p, ambient_dim);
        for v in vectors {
            s.insert_element(v)?;
        }
        Ok(s)
    }

    pub fn span_raw(p: u64, ambient_dim: usize, vectors: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let mut s = Self::zero(p, ambient_dim);
        for v in vectors {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    fn element_to_raw(&self, x: &LieElement) -> Result<Vec<u64>> {
        if x.modulus != self.p {
            return Err(Error::ModulusMismatch { left: self.p, right: x.modulus });
        }
        if x.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { left: self.ambient_dim, right: x.dim() });
        }
        Ok(x.coeffs.iter().map(|&c| modp::reduce(c, self.p)).collect())
    }

    pub fn basis_elements(&self, rank: usize) -> Vec<LieElement> {
        self.basis
            .iter()
            .map(|row| LieElement::from_coeffs(rank, row.iter().map(|&c| c as i64).collect(), self.p))
            .collect()
    }

    /// Reduce `v` against the current basis; the result is zero iff `v` lies
    /// in the subspace.
    fn residue(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.p;
        for (row, &col) in self.basis.iter().zip(&self.pivots) {
            let f = v[col];
            if f == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                if r != 0 {
                    *x = (*x + p - modp::mul(f, r, p)) % p;
                }
            }
        }
        v
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<u64>) -> Result<bool> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch { left: self.ambient_dim, right: v.len() });
        }
        let p = self.p;
        let mut v = self.residue(v.into_iter().map(|c| c % p).collect());
        let Some(col) = v.iter().position(|&c| c != 0) else {
            return Ok(false);
        };
        let inv = modp::inv(v[col], p).expect("p is prime");
        for x in v.iter_mut() {
            *x = modp::mul(*x, inv, p);
        }
        for row in self.basis.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for (x, &r) in row.iter_mut().zip(&v) {
                if r != 0 {
                    *x = (*x + p - modp::mul(f, r, p)) % p;
                }
            }
        }
        let pos = self.pivots.partition_point(|&c| c < col);
        self.pivots.insert(pos, col);
        self.basis.insert(pos, v);
        Ok(true)
    }

    pub fn insert_element(&mut self, x: &LieElement) -> Result<bool> {
        let v = self.element_to_raw(x)?;
        self.insert(v)
    }

    pub fn contains(&self, x: &LieElement) -> Result<bool> {
        let v = self.element_to_raw(x)?;
        Ok(self.contains_raw(&v))
    }

    pub fn contains_raw(&self, v: &[u64]) -> bool {
        self.residue(v.iter().map(|c| c % self.p).collect()).iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch { left: self.p, right: other.p });
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch { left: self.ambient_dim, right: other.ambient_dim });
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.basis.iter().all(|v| other.contains_raw(v)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for v in &other.basis {
            out.insert(v.clone())?;
        }
        Ok(out)
    }
}

/// Span of all `[v_i, w_j]` over basis vectors of `v` and `w`.
pub fn bracket_space(cb: &ChevalleyBasis, v: &Subspace, w: &Subspace) -> Result<Subspace> {
    v.check_compatible(w)?;
    if v.ambient_dim != cb.dim() {
        return Err(Error::DimensionMismatch { left: cb.dim(), right: v.ambient_dim });
    }
    let mut out = Subspace::zero(v.p, v.ambient_dim);
    let (ve, we) = (v.basis_elements(cb.rank()), w.basis_elements(cb.rank()));
    for x in &ve {
        for y in &we {
            out.insert_element(&cb.bracket(x, y)?)?;
            if out.is_full() {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// One bracket that enlarged a level: `[W_l basis row left, W_m basis row right]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketWitness {
    pub l: usize,
    pub m: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationTrace {
    pub p: u64,
    pub depth: usize,
    pub dims: Vec<usize>,
    pub levels: Vec<Subspace>,
    pub provenance: Vec<Vec<BracketWitness>>,
}

impl FiltrationTrace {
    /// `W_k` for `k ≥ 1`.
    pub fn level(&self, k: usize) -> &Subspace {
        &self.levels[k - 1]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClosureOptions {
    /// Permit `p ≤ n_max` for exploratory runs; results are then recorded but
    /// never asserted.
    pub allow_small_prime: bool,
}

fn check_prime(cb: &ChevalleyBasis, p: u64, opts: ClosureOptions) -> Result<()> {
    if !modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n_max = max_structure_constant(cb.root_system());
    if p <= n_max && !opts.allow_small_prime {
        return Err(Error::StructureConstantsVanish { p, n_max });
    }
    Ok(())
}

pub fn closure_filtration(
    cb: &ChevalleyBasis,
    seeds: &[LieElement],
    p: u64,
    depth: usize,
    opts: ClosureOptions,
) -> Result<FiltrationTrace> {
    if depth == 0 {
        return Err(Error::InvalidArgument("filtration depth must be at least 1".into()));
    }
    check_prime(cb, p, opts)?;
    let dim = cb.dim();
    let rank = cb.rank();

    let mut levels = vec![Subspace::span(p, dim, seeds)?];
    let mut provenance = vec![Vec::new()];
    for k in 2..=depth {
        let mut wk = Subspace::zero(p, dim);
        let mut witnesses = Vec::new();
        'pairs: for l in 1..=k / 2 {
            let m = k - l;
            let left = levels[l - 1].basis_elements(rank);
            let right = levels[m - 1].basis_elements(rank);
            for (i, x) in left.iter().enumerate() {
                for (j, y) in right.iter().enumerate() {
                    if wk.insert_element(&cb.bracket(x, y)?)? {
                        witnesses.push(BracketWitness { l, m, left: i, right: j });
                        if wk.is_full() {
                            break 'pairs;
                        }
                    }
                }
            }
        }
        levels.push(wk);
        provenance.push(witnesses);
    }
    Ok(FiltrationTrace { p, depth, dims: levels.iter().map(Subspace::dim).collect(), levels, provenance })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisViolation {
    pub root_index: usize,
    pub root: Root,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaAssertion {
    pub label: String,
    pub statement: String,
    pub passed: bool,
    /// Basis elements that were expected but missing, e.g. `X[3]` or `H[5]`.
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootHeightReport {
    pub p: u64,
    pub exploratory: bool,
    pub hypothesis_violation: Option<HypothesisViolation>,
    pub assertions: Vec<LemmaAssertion>,
    /// Whether no even-height `X_α` already lies in `W_1`.
    pub even_height_enter_at_w2: bool,
    pub trace: Option<FiltrationTrace>,
}

impl RootHeightReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypothesis_violation.is_none()
    }

    pub fn passed(&self) -> bool {
        self.hypotheses_hold() && !self.assertions.is_empty() && self.assertions.iter().all(|a| a.passed)
    }
}

fn assertion(label: &str, statement: &str, missing: Vec<String>) -> LemmaAssertion {
    LemmaAssertion { label: label.into(), statement: statement.into(), passed: missing.is_empty(), missing }
}

/// Runs the closure with seeds `{H} ∪ {X_α : ht(α) odd}` and checks that
/// (a) every even-height `X_α` lies in `W_2`, (b) every `X_α` lies in `W_3`
/// and `W_4`, (c) every `H_α` lies in `W_4`, (d) `W_4` is all of `g^der`.
pub fn check_root_height_lemma(
    cb: &ChevalleyBasis,
    p: u64,
    h: &LieElement,
    opts: ClosureOptions,
) -> Result<RootHeightReport> {
    check_prime(cb, p, opts)?;
    let rs = cb.root_system();
    if h.modulus != p {
        return Err(Error::ModulusMismatch { left: p, right: h.modulus });
    }
    if !h.is_toral() || h.dim() != cb.dim() {
        return Err(Error::InvalidArgument("H must be a toral element of g".into()));
    }
    let exploratory = p <= max_structure_constant(rs);

    if let Some(a) = (0..rs.len()).find(|&a| cb.root_value(h, a) == 0) {
        return Ok(RootHeightReport {
            p,
            exploratory,
            hypothesis_violation: Some(HypothesisViolation { root_index: a, root: rs.root(a).clone() }),
            assertions: Vec::new(),
            even_height_enter_at_w2: false,
            trace: None,
        });
    }

    let mut seeds = vec![h.clone()];
    seeds.extend((0..rs.len()).filter(|&a| rs.root(a).height() % 2 != 0).map(|a| cb.x(a, p)));
    let trace = closure_filtration(cb, &seeds, p, 4, opts)?;

    let missing_x = |k: usize, pred: &dyn Fn(usize) -> bool| -> Result<Vec<String>> {
        let mut out = Vec::new();
        for a in (0..rs.len()).filter(|&a| pred(a)) {
            if !trace.level(k).contains(&cb.x(a, p))? {
                out.push(format!("X[{a}]"));
            }
        }
        Ok(out)
    };
    let even = |a: usize| rs.root(a).height() % 2 == 0;
    let all = |_: usize| true;

    let a = missing_x(2, &even)?;
    let mut b = missing_x(3, &all)?;
    b.extend(missing_x(4, &all)?.into_iter().map(|s| format!("{s}@W4")));
    let mut c = Vec::new();
    for a in 0..rs.len() {
        if !trace.level(4).contains(&cb.h_root(a, p))? {
            c.push(format!("H[{a}]"));
        }
    }
    let d = if trace.level(4).is_full() {
        Vec::new()
    } else {
        vec![format!("dim W4 = {} < {}", trace.level(4).dim(), cb.dim())]
    };

    let mut even_absent = true;
    for a in (0..rs.len()).filter(|&a| even(a)) {
        if trace.level(1).contains(&cb.x(a, p))? {
            even_absent = false;
        }
    }

    Ok(RootHeightReport {
        p,
        exploratory,
        hypothesis_violation: None,
        assertions: vec![
            assertion("a", "X_alpha in W2 for every even-height root", a),
            assertion("b", "X_alpha in W3 and W4 for every root", b),
            assertion("c", "H_alpha in W4 for every root", c),
            assertion("d", "g^der contained in W4", d),
        ],
        even_height_enter_at_w2: even_absent,
        trace: Some(trace),
    })
}

/// Draws pairings uniformly from `[1, p−1]^r` until `α(H) ≠ 0` for every root.
/// Returns `Ok(None)` when no such `H` exists over `F_p` at all.
pub fn random_regular_toral<R: Rng>(
    cb: &ChevalleyBasis,
    p: u64,
    rng: &mut R,
) -> Result<Option<(CocharVec, LieElement)>> {
    let rs = cb.root_system();
    let r = rs.rank();
    let regular = |x: &[i64]| {
        rs.positive_roots()
            .iter()
            .all(|root| root.coeffs().iter().zip(x).map(|(n, v)| n * v).sum::<i64>().rem_euclid(p as i64) != 0)
    };
    const TRIES: usize = 4096;
    for _ in 0..TRIES {
        let x: Vec<i64> = (0..r).map(|_| rng.gen_range(1..p) as i64).collect();
        if regular(&x) {
            let lambda = CocharVec(x);
            let h = cochar_to_toral(cb, &lambda, p)?;
            return Ok(Some((lambda, h)));
        }
    }
    // Rejection kept failing: settle existence exhaustively.
    let total = (p - 1).checked_pow(r as u32).unwrap_or(u64::MAX);
    if total > 10_000_000 {
        return Err(Error::InvalidArgument(format!("no regular toral element found after {TRIES} draws")));
    }
    let mut found = Vec::new();
    for code in 0..total {
        let mut c = code;
        let x: Vec<i64> = (0..r)
            .map(|_| {
                let v = c % (p - 1) + 1;
                c /= p - 1;
                v as i64
            })
            .collect();
        if regular(&x) {
            found.push(x);
        }
    }
    if found.is_empty() {
        return Ok(None);
    }
    let lambda = CocharVec(found[rng.gen_range(0..found.len())].clone());
    let h = cochar_to_toral(cb, &lambda, p)?;
    Ok(Some((lambda, h)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_chevalley_basis;
    use crate::rootsys::build_root_system;
    use rand::SeedableRng;

    fn cb(s: &str) -> ChevalleyBasis {
        build_chevalley_basis(&build_root_system(s.parse().unwrap()))
    }

    #[test]
    fn subspace_basics() {
        let z = Subspace::span(5, 3, &[]).unwrap();
        assert_eq!(z.dim(), 0);
        let a1 = cb("A1");
        let v = Subspace::span(5, 3, &[a1.x(0, 5), a1.h(0, 5)]).unwrap();
        assert_eq!(v.sum(&v).unwrap(), v);
        assert!(v.contains(&a1.x(0, 5).scale(3)).unwrap());
        assert!(!v.contains(&a1.x(1, 5)).unwrap());
        let w = Subspace::span(5, 3, &[a1.h(0, 5), a1.x(0, 5)]).unwrap();
        assert_eq!(v, w);
        assert!(Subspace::span(7, 3, &[a1.x(0, 5)]).is_err());
        assert!(v.sum(&Subspace::zero(7, 3)).is_err());
    }

    #[test]
    fn a1_bracket_space() {
        let b = cb("A1");
        let xa = Subspace::span(5, 3, &[b.x(0, 5)]).unwrap();
        let xm = Subspace::span(5, 3, &[b.x(1, 5)]).unwrap();
        let hs = Subspace::span(5, 3, &[b.h(0, 5)]).unwrap();
        assert_eq!(bracket_space(&b, &xa, &xm).unwrap(), hs);
        assert_eq!(bracket_space(&b, &xm, &xa).unwrap(), hs);
    }

    #[test]
    fn closure_examples() {
        let b = cb("A1");
        let t = closure_filtration(&b, &[], 5, 4, ClosureOptions::default()).unwrap();
        assert!(t.dims.iter().all(|&d| d == 0));

        let t = closure_filtration(&b, &[b.x(0, 5), b.x(1, 5)], 5, 3, ClosureOptions::default()).unwrap();
        assert!(t.level(2).contains(&b.h(0, 5)).unwrap());
        assert_eq!(t.dims, vec![2, 1, 2]);

        let a2 = cb("A2");
        let h = cochar_to_toral(&a2, &CocharVec(vec![1, 2]), 7).unwrap();
        let seeds: Vec<_> = [0, 1, 3, 4].iter().map(|&a| a2.x(a, 7)).chain([h]).collect();
        let t = closure_filtration(&a2, &seeds, 7, 4, ClosureOptions::default()).unwrap();
        assert_eq!(t.level(4).dim(), 8);
    }

    #[test]
    fn small_prime_needs_override() {
        let g2 = cb("G2");
        assert!(matches!(
            closure_filtration(&g2, &[], 3, 2, ClosureOptions::default()),
            Err(Error::StructureConstantsVanish { .. })
        ));
        assert!(closure_filtration(&g2, &[], 3, 2, ClosureOptions { allow_small_prime: true }).is_ok());
        assert!(closure_filtration(&g2, &[], 15, 2, ClosureOptions::default()).is_err());
        assert!(closure_filtration(&g2, &[], 7, 0, ClosureOptions::default()).is_err());
    }

    #[test]
    fn lemma_a1() {
        let b = cb("A1");
        let rep = check_root_height_lemma(&b, 5, &b.h(0, 5), ClosureOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn lemma_hypothesis_violation() {
        let a2 = cb("A2");
        let h = cochar_to_toral(&a2, &CocharVec(vec![0, 1]), 7).unwrap();
        let rep = check_root_height_lemma(&a2, 7, &h, ClosureOptions::default()).unwrap();
        assert_eq!(rep.hypothesis_violation.as_ref().unwrap().root_index, 0);
        assert!(rep.trace.is_none());
        assert!(!rep.passed());
    }

    #[test]
    fn lemma_g2() {
        let g2 = cb("G2");
        // ⟨2α1+α2, (3,5)⟩ = 11, so λ = (3,5) is singular at p = 11
        let h = cochar_to_toral(&g2, &CocharVec(vec![3, 5]), 11).unwrap();
        let rep = check_root_height_lemma(&g2, 11, &h, ClosureOptions::default()).unwrap();
        assert_eq!(rep.hypothesis_violation.unwrap().root, Root(vec![2, 1]));

        let h = cochar_to_toral(&g2, &CocharVec(vec![3, 5]), 13).unwrap();
        let rep = check_root_height_lemma(&g2, 13, &h, ClosureOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(rep.even_height_enter_at_w2);
    }

    #[test]
    fn regular_sampling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a2 = cb("A2");
        let (lam, h) = random_regular_toral(&a2, 7, &mut rng).unwrap().unwrap();
        for a in 0..6 {
            assert_ne!(a2.root_value(&h, a), 0);
        }
        assert!(lam.0.iter().all(|&x| (1..7).contains(&x)));
        // sl_4 has no regular semisimple element over F_3
        assert!(random_regular_toral(&cb("A3"), 3, &mut rng).unwrap().is_none());
    }

    #[test]
    fn subspace_json_round_trip() {
        let b = cb("A1");
        let v = Subspace::span(5, 3, &[b.x(0, 5), b.h(0, 5)]).unwrap();
        let back: Subspace = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
        assert!(back.contains(&b.x(0, 5)).unwrap());
    }
}
