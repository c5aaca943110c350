//! Chevalley basis `{H_{α_i}} ∪ {X_α}` and the Lie bracket over `Z` or `F_p`.
//!
//! Basis vectors are laid out as `H_{α_1}, …, H_{α_r}` followed by `X_α` for
//! every root in canonical order, so a [`LieElement`] is a flat coefficient
//! vector of length `r + |Φ|`.
//!
//! Signs are fixed by the extraspecial-pair convention: for every non-simple
//! positive root `ξ` the special pair `(α, β)`, `α + β = ξ`, with `α` earliest
//! in canonical order gets `N_{α,β} = +(p_{α,β} + 1)`. Every other constant
//! follows from antisymmetry, `N_{-α,-β} = -N_{α,β}`, the three-term rule
//! `N_{α,β}/(γ,γ) = N_{β,γ}/(α,α) = N_{γ,α}/(β,β)` when `α+β+γ = 0`, and the
//! four-term rule for quadruples summing to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp;
use crate::rootsys::{CocharVec, RootSystem};

pub const SIGN_CONVENTION: &str = "extraspecial-pairs (positive roots by height, then descending coefficients)";

/// Element of `g ⊗ Z` (`modulus == 0`) or `g ⊗ F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LieElement {
    pub modulus: u64,
    pub rank: usize,
    pub coeffs: Vec<i64>,
}

impl LieElement {
    pub fn zero(rank: usize, num_roots: usize, modulus: u64) -> Self {
        Self { modulus, rank, coeffs: vec![0; rank + num_roots] }
    }

    pub fn from_coeffs(rank: usize, coeffs: Vec<i64>, modulus: u64) -> Self {
        let mut e = Self { modulus, rank, coeffs };
        e.normalize();
        e
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients on `H_{α_1}, …, H_{α_r}`.
    pub fn toral(&self) -> &[i64] {
        &self.coeffs[..self.rank]
    }

    /// Coefficient of each `X_α` in canonical root order.
    pub fn root_part(&self) -> &[i64] {
        &self.coeffs[self.rank..]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_toral(&self) -> bool {
        self.root_part().iter().all(|&c| c == 0)
    }

    fn normalize(&mut self) {
        if self.modulus != 0 {
            let m = self.modulus;
            for c in &mut self.coeffs {
                *c = modp::reduce(*c, m) as i64;
            }
        }
    }

    pub fn reduce_mod(&self, p: u64) -> LieElement {
        LieElement::from_coeffs(self.rank, self.coeffs.clone(), p)
    }

    fn check_compatible(&self, other: &LieElement) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch { left: self.modulus, right: other.modulus });
        }
        if self.dim() != other.dim() || self.rank != other.rank {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(LieElement::from_coeffs(self.rank, coeffs, self.modulus))
    }

    pub fn scale(&self, k: i64) -> LieElement {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| match self.modulus {
                0 => a * k,
                m => modp::reduce_i128(a as i128 * k as i128, m) as i64,
            })
            .collect();
        LieElement::from_coeffs(self.rank, coeffs, self.modulus)
    }
}

#[derive(Debug, Clone)]
pub struct ChevalleyBasis {
    rs: RootSystem,
    /// `cartan_integers[a][i] = α_a(H_{α_i})`.
    cartan_integers: Vec<Vec<i64>>,
    /// Dense `N_{α,β}` table, zero where `α + β ∉ Φ`.
    struct_consts: Vec<Vec<i64>>,
    /// `root_sum[a][b]` = index of `α_a + α_b` when it is a root.
    root_sum: Vec<Vec<Option<usize>>>,
    /// Sparse bracket of basis vectors: `table[i * dim + j]`.
    table: Vec<Vec<(usize, i64)>>,
}

pub fn build_chevalley_basis(rs: &RootSystem) -> ChevalleyBasis {
    let n = rs.len();
    let r = rs.rank();
    let npos = rs.num_positive();

    let root_sum: Vec<Vec<Option<usize>>> =
        (0..n).map(|a| (0..n).map(|b| rs.index_of(&rs.root(a).add(rs.root(b)))).collect()).collect();

    let mut special = vec![vec![0i64; npos]; npos];
    for xi in r..npos {
        let pairs: Vec<(usize, usize)> = (0..xi)
            .flat_map(|a| (a + 1..xi).map(move |b| (a, b)))
            .filter(|&(a, b)| root_sum[a][b] == Some(xi))
            .collect();
        let (ea, eb) = pairs[0];
        special[ea][eb] = rs.string_down(rs.root(ea), rs.root(eb)) + 1;
        for &(c, d) in &pairs[1..] {
            special[c][d] = derived_special(rs, &root_sum, &special, (ea, eb), (c, d), xi);
        }
    }

    let mut struct_consts = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in 0..n {
            if root_sum[a][b].is_some() {
                struct_consts[a][b] = n_from_special(rs, &root_sum, &special, a, b);
            }
        }
    }

    let cartan_integers: Vec<Vec<i64>> =
        (0..n).map(|a| (0..r).map(|i| rs.simple_cartan_integer(rs.root(a), i)).collect()).collect();

    let dim = r + n;
    let mut table = vec![Vec::new(); dim * dim];
    for i in 0..r {
        for a in 0..n {
            let c = cartan_integers[a][i];
            if c != 0 {
                table[i * dim + r + a] = vec![(r + a, c)];
                table[(r + a) * dim + i] = vec![(r + a, -c)];
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let entry = if b == rs.negative_index(a) {
                // [X_α, X_{-α}] = H_α
                rs.coroot_coords(a).iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect()
            } else if let Some(s) = root_sum[a][b] {
                vec![(r + s, struct_consts[a][b])]
            } else {
                Vec::new()
            };
            table[(r + a) * dim + r + b] = entry;
        }
    }

    ChevalleyBasis { rs: rs.clone(), cartan_integers, struct_consts, root_sum, table }
}

/// `N_{a,b}` for a pair whose sum is a root, reduced to positive special pairs.
fn n_from_special(rs: &RootSystem, root_sum: &[Vec<Option<usize>>], special: &[Vec<i64>], a: usize, b: usize) -> i64 {
    let npos = rs.num_positive();
    let pos = |i: usize| i < npos;
    match (pos(a), pos(b)) {
        (true, true) => {
            if a < b {
                debug_assert_ne!(special[a][b], 0, "missing special pair");
                special[a][b]
            } else {
                -special[b][a]
            }
        }
        (false, false) => -n_from_special(rs, root_sum, special, rs.negative_index(a), rs.negative_index(b)),
        _ => {
            let s = root_sum[a][b].expect("sum is a root");
            let c = rs.negative_index(s);
            let (na, nb, nc) = (rs.norm(rs.root(a)), rs.norm(rs.root(b)), rs.norm(rs.root(c)));
            if pos(b) == pos(c) {
                let v = nc * n_from_special(rs, root_sum, special, b, c);
                debug_assert_eq!(v % na, 0);
                v / na
            } else {
                let v = nc * n_from_special(rs, root_sum, special, c, a);
                debug_assert_eq!(v % nb, 0);
                v / nb
            }
        }
    }
}

/// Non-extraspecial special pair `(γ, δ)` of `ξ` from the four-term rule
/// applied to `(α, β, −γ, −δ)`.
fn derived_special(
    rs: &RootSystem,
    root_sum: &[Vec<Option<usize>>],
    special: &[Vec<i64>],
    (alpha, beta): (usize, usize),
    (gamma, delta): (usize, usize),
    xi: usize,
) -> i64 {
    let neg = |i: usize| rs.negative_index(i);
    let nn = |a: usize, b: usize| -> i64 {
        if root_sum[a][b].is_some() {
            n_from_special(rs, root_sum, special, a, b)
        } else {
            0
        }
    };
    let n_ab = special[alpha][beta];
    let xi_norm = rs.norm(rs.root(xi));

    // term over (β − γ, β − γ): N_{β,−γ} N_{α,−δ}
    let (t1_num, t1_den) = match root_sum[beta][neg(gamma)] {
        Some(s) => (nn(beta, neg(gamma)) * nn(alpha, neg(delta)), rs.norm(rs.root(s))),
        None => (0, 1),
    };
    // term over (α − γ, α − γ): N_{−γ,α} N_{β,−δ}
    let (t2_num, t2_den) = match root_sum[alpha][neg(gamma)] {
        Some(s) => (nn(neg(gamma), alpha) * nn(beta, neg(delta)), rs.norm(rs.root(s))),
        None => (0, 1),
    };
    let num = xi_norm * (t1_num * t2_den + t2_num * t1_den);
    let den = n_ab * t1_den * t2_den;
    debug_assert_eq!(num % den, 0, "non-integral structure constant");
    num / den
}

impl ChevalleyBasis {
    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn dim(&self) -> usize {
        self.rs.rank() + self.rs.len()
    }

    /// Basis index of `X_α` for root index `a`.
    pub fn x_index(&self, a: usize) -> usize {
        self.rank() + a
    }

    /// `N_{α_a, α_b}`, zero when `α_a + α_b ∉ Φ`.
    pub fn structure_constant(&self, a: usize, b: usize) -> i64 {
        self.struct_consts[a][b]
    }

    pub fn root_sum(&self, a: usize, b: usize) -> Option<usize> {
        self.root_sum[a][b]
    }

    /// `α_a(H_{α_i})`.
    pub fn cartan_integer(&self, a: usize, i: usize) -> i64 {
        self.cartan_integers[a][i]
    }

    /// Coordinates of `H_α` in `{H_{α_i}}`.
    pub fn coroot_expansion(&self, a: usize) -> &[i64] {
        self.rs.coroot_coords(a)
    }

    pub fn max_abs_structure_constant(&self) -> u64 {
        self.struct_consts.iter().flatten().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn zero(&self, modulus: u64) -> LieElement {
        LieElement::zero(self.rank(), self.rs.len(), modulus)
    }

    pub fn basis_vector(&self, i: usize, modulus: u64) -> LieElement {
        let mut e = self.zero(modulus);
        e.coeffs[i] = 1;
        e
    }

    pub fn h(&self, i: usize, modulus: u64) -> LieElement {
        self.basis_vector(i, modulus)
    }

    pub fn x(&self, a: usize, modulus: u64) -> LieElement {
        self.basis_vector(self.x_index(a), modulus)
    }

    /// `H_α` as an element (integral combination of the simple `H_{α_i}`).
    pub fn h_root(&self, a: usize, modulus: u64) -> LieElement {
        let mut coeffs = vec![0; self.dim()];
        coeffs[..self.rank()].copy_from_slice(self.coroot_expansion(a));
        LieElement::from_coeffs(self.rank(), coeffs, modulus)
    }

    /// Bracket of basis vectors `[e_i, e_j]` as sparse `(index, coefficient)` pairs.
    pub fn basis_bracket(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.table[i * self.dim() + j]
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        x.check_compatible(y)?;
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch { left: x.dim(), right: self.dim() });
        }
        let dim = self.dim();
        let mut out = vec![0i128; dim];
        for (i, &xi) in x.coeffs.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.coeffs.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let w = xi as i128 * yj as i128;
                for &(k, c) in self.basis_bracket(i, j) {
                    out[k] += w * c as i128;
                }
            }
        }
        let coeffs = match x.modulus {
            0 => out.into_iter().map(|v| v as i64).collect(),
            m => out.into_iter().map(|v| modp::reduce_i128(v, m) as i64).collect(),
        };
        Ok(LieElement { modulus: x.modulus, rank: x.rank, coeffs })
    }

    /// `α_a(H)` for toral `H`, over the element's modulus.
    pub fn root_value(&self, h: &LieElement, a: usize) -> i64 {
        let v: i128 = h.toral().iter().enumerate().map(|(i, &c)| c as i128 * self.cartan_integers[a][i] as i128).sum();
        match h.modulus {
            0 => v as i64,
            m => modp::reduce_i128(v, m) as i64,
        }
    }

    /// Rows `alpha,beta,N` (root indices in canonical order) for every pair
    /// with `α + β ∈ Φ`.
    pub fn structure_constants_csv(&self) -> String {
        let mut out = String::from("alpha,beta,N\n");
        let n = self.rs.len();
        for a in 0..n {
            for b in 0..n {
                if self.root_sum[a][b].is_some() {
                    out.push_str(&format!("{a},{b},{}\n", self.struct_consts[a][b]));
                }
            }
        }
        out
    }
}

/// `max |N_{α,β}| = max (p_{α,β} + 1)` from root strings alone. Rank one has
/// no pairs with `α + β ∈ Φ`; the value is then 1, as for every simply-laced type.
pub fn max_structure_constant(rs: &RootSystem) -> u64 {
    let mut best = 1;
    for a in rs.roots() {
        for b in rs.roots() {
            if rs.contains(&a.add(b)) {
                best = best.max(rs.string_down(a, b) as u64 + 1);
            }
        }
    }
    best
}

/// Toral `H` with `α_i(H) ≡ x_i (mod p)` for every simple root.
pub fn cochar_to_toral(cb: &ChevalleyBasis, lambda: &CocharVec, p: u64) -> Result<LieElement> {
    let rs = cb.root_system();
    let r = rs.rank();
    if lambda.0.len() != r {
        return Err(Error::RankMismatch { expected: r, got: lambda.0.len() });
    }
    let det = rs.cartan_determinant();
    if det.rem_euclid(p as i64) == 0 {
        return Err(Error::DegenerateCartanPairing { p, det });
    }
    // α_i(H) = Σ_j h_j A_ji, so solve Aᵀ h = x.
    let a = rs.cartan_matrix();
    let system: Vec<Vec<u64>> = (0..r).map(|i| (0..r).map(|j| modp::reduce(a[j][i], p)).collect()).collect();
    let rhs: Vec<u64> = lambda.0.iter().map(|&x| modp::reduce(x, p)).collect();
    let h = crate::linalg::solve_square(&system, &rhs, p).ok_or(Error::DegenerateCartanPairing { p, det })?;
    let mut coeffs = vec![0; cb.dim()];
    for (c, v) in coeffs.iter_mut().zip(h) {
        *c = v as i64;
    }
    Ok(LieElement::from_coeffs(r, coeffs, p))
}
