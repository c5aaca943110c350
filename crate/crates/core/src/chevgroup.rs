//! Finite-level adjoint Chevalley groups `G(Z/p^k)` as matrices acting on
//! `g ⊗ Z/p^k`, the exponential layer isomorphism, exact subgroup
//! enumeration, the layers `Φ_m`, and Tits-style lifts of Coxeter elements.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chevalley::{max_structure_constant, ChevalleyBasis, LieElement};
use crate::error::{Error, Result};
use crate::filtration::{bracket_space, Subspace};
use crate::modp;
use crate::rootsys::Family;

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

/// Matrix in the adjoint representation with entries mod `p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    p: u64,
    k: u32,
    d: usize,
    entries: Vec<u32>,
}

fn modulus_for(p: u64, k: u32) -> Result<u64> {
    match p.checked_pow(k) {
        Some(q) if q < u32::MAX as u64 && k >= 1 => Ok(q),
        _ => Err(Error::LevelBounds(format!("p^k = {p}^{k} out of range"))),
    }
}

impl GroupElement {
    pub fn identity(p: u64, k: u32, d: usize) -> Result<Self> {
        modulus_for(p, k)?;
        let mut entries = vec![0; d * d];
        for i in 0..d {
            entries[i * d + i] = 1;
        }
        Ok(Self { p, k, d, entries })
    }

    pub fn from_integer_matrix(p: u64, k: u32, d: usize, m: &[i64]) -> Result<Self> {
        let q = modulus_for(p, k)?;
        Ok(Self { p, k, d, entries: m.iter().map(|&x| modp::reduce(x, q) as u32).collect() })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.d + j] as u64
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!((self.p, self.k, self.d), (other.p, other.k, other.d));
        let d = self.d;
        let q = self.modulus();
        let mut out = vec![0u32; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc: u64 = 0;
                for l in 0..d {
                    acc += self.entries[i * d + l] as u64 * other.entries[l * d + j] as u64 % q;
                }
                out[i * d + j] = (acc % q) as u32;
            }
        }
        GroupElement { p: self.p, k: self.k, d, entries: out }
    }

    pub fn reduce_to(&self, level: u32) -> Result<GroupElement> {
        if level == 0 || level > self.k {
            return Err(Error::LevelBounds(format!("cannot reduce level {} to {level}", self.k)));
        }
        let q = modulus_for(self.p, level)?;
        Ok(GroupElement {
            p: self.p,
            k: level,
            d: self.d,
            entries: self.entries.iter().map(|&x| (x as u64 % q) as u32).collect(),
        })
    }

    /// Whether `g ≡ I (mod p^m)`.
    pub fn is_congruent_identity(&self, m: u32) -> bool {
        let q = self.p.pow(m.min(self.k));
        let d = self.d;
        (0..d * d).all(|idx| {
            let want = u64::from(idx / d == idx % d);
            (self.entries[idx] as u64 + q - want).is_multiple_of(q)
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_congruent_identity(self.k)
    }

    pub fn order(&self, limit: u64) -> Option<u64> {
        let mut cur = self.clone();
        for n in 1..=limit {
            if cur.is_identity() {
                return Some(n);
            }
            cur = cur.mul(self);
        }
        None
    }
}

/// `ad(v)` over `Z`, row-major: column `j` holds the coordinates of `[v, e_j]`.
pub fn ad_matrix(cb: &ChevalleyBasis, v: &LieElement) -> Vec<i64> {
    let d = cb.dim();
    let mut m = vec![0i64; d * d];
    for (i, &vi) in v.coeffs.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..d {
            for &(row, c) in cb.basis_bracket(i, j) {
                m[row * d + j] += vi * c;
            }
        }
    }
    m
}

fn int_mat_mul(a: &[i64], b: &[i64], d: usize) -> Vec<i64> {
    let mut out = vec![0i64; d * d];
    for i in 0..d {
        for l in 0..d {
            let x = a[i * d + l];
            if x == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[l * d + j];
            }
        }
    }
    out
}

fn int_identity(d: usize) -> Vec<i64> {
    let mut m = vec![0i64; d * d];
    for i in 0..d {
        m[i * d + i] = 1;
    }
    m
}

/// `exp(t · ad X_α) = Σ_n t^n (ad X_α)^n / n!` over `Z`; the series stops
/// because `ad X_α` is nilpotent, and every `(ad X_α)^n / n!` is integral.
pub fn root_exponential(cb: &ChevalleyBasis, a: usize, t: i64) -> Vec<i64> {
    let d = cb.dim();
    let ad = ad_matrix(cb, &cb.x(a, 0));
    let mut out = int_identity(d);
    let mut power = int_identity(d);
    let mut fact: i64 = 1;
    let mut tn: i64 = 1;
    for n in 1..=d as i64 {
        power = int_mat_mul(&power, &ad, d);
        if power.iter().all(|&x| x == 0) {
            break;
        }
        fact *= n;
        tn *= t;
        for (o, &pw) in out.iter_mut().zip(&power) {
            debug_assert_eq!(pw % fact, 0, "divided powers of ad X_α are integral");
            *o += tn * (pw / fact);
        }
    }
    out
}

fn check_group_prime(cb: &ChevalleyBasis, p: u64) -> Result<()> {
    if !modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n_max = max_structure_constant(cb.root_system());
    if p <= n_max {
        return Err(Error::StructureConstantsVanish { p, n_max });
    }
    Ok(())
}

/// `x_α(t)` at level `k`.
pub fn root_element(cb: &ChevalleyBasis, a: usize, t: i64, p: u64, k: u32) -> Result<GroupElement> {
    GroupElement::from_integer_matrix(p, k, cb.dim(), &root_exponential(cb, a, t))
}

/// `x_α(1)` for `α ∈ ±Δ`, ordered `x_{α_1}, x_{−α_1}, …`.
pub fn chevalley_generators(cb: &ChevalleyBasis, p: u64, k: u32) -> Result<Vec<GroupElement>> {
    check_group_prime(cb, p)?;
    let rs = cb.root_system();
    let mut gens = Vec::with_capacity(2 * rs.rank());
    for i in 0..rs.rank() {
        gens.push(root_element(cb, i, 1, p, k)?);
        gens.push(root_element(cb, rs.negative_index(i), 1, p, k)?);
    }
    Ok(gens)
}

/// Image of `h_α(s) = diag(s, s^{-1})`-type torus element in the adjoint
/// representation: acts on `X_β` by `s^{⟨β, α^∨⟩}` and trivially on `t`.
pub fn torus_element(cb: &ChevalleyBasis, simple: usize, s: u64, p: u64, k: u32) -> Result<GroupElement> {
    let q = modulus_for(p, k)?;
    let s_inv = modp::inv(s, q).ok_or_else(|| Error::InvalidArgument(format!("{s} is not a unit mod {q}")))?;
    let rs = cb.root_system();
    let r = rs.rank();
    let d = cb.dim();
    let mut g = GroupElement::identity(p, k, d)?;
    for a in 0..rs.len() {
        let e = rs.cartan_integer(rs.root(a), rs.root(simple));
        let v = if e >= 0 { modp::pow(s, e as u64, q) } else { modp::pow(s_inv, (-e) as u64, q) };
        g.entries[(r + a) * d + r + a] = v as u32;
    }
    Ok(g)
}

/// `exp(p^m · ad v)` at level `k`, using the lift of `v` with coefficients in
/// `[0, p)`. At `k = m + 1` this is exactly `I + p^m ad(v)`.
pub fn exp_layer(cb: &ChevalleyBasis, v: &LieElement, m: u32, k: u32) -> Result<GroupElement> {
    let p = v.modulus;
    if !modp::is_prime(p) || p < 3 {
        return Err(Error::LevelBounds(format!("exponential layers need an odd prime modulus, got {p}")));
    }
    if m < 1 || k <= m {
        return Err(Error::LevelBounds(format!("need 1 <= m < k, got m={m}, k={k}")));
    }
    if v.dim() != cb.dim() {
        return Err(Error::DimensionMismatch { left: cb.dim(), right: v.dim() });
    }
    let q = modulus_for(p, k)?;
    let d = cb.dim();
    let ad: Vec<u64> = ad_matrix(cb, v).into_iter().map(|x| modp::reduce(x, q)).collect();

    let mut out: Vec<u64> = int_identity(d).into_iter().map(|x| x as u64).collect();
    let mut power: Vec<u64> = out.clone();
    let mut fact_unit: u64 = 1;
    let mut fact_val: u32 = 0;
    for n in 1u32.. {
        // term = p^{mn - v_p(n!)} · (n!/p^{v_p(n!)})^{-1} · ad^n
        let mut nn = n as u64;
        while nn.is_multiple_of(p) {
            nn /= p;
            fact_val += 1;
        }
        fact_unit = modp::mul(fact_unit, nn % q, q);
        let shift = m * n - fact_val;
        // m·n − v_p(n!) ≥ n(m − 1/(p−1)) grows, so once past k it stays past k
        if shift >= k && (m as f64 - 1.0 / (p as f64 - 1.0)) * n as f64 >= k as f64 {
            break;
        }
        power = mat_mul_mod(&power, &ad, d, q);
        if shift >= k {
            continue;
        }
        let scale = modp::mul(modp::pow(p, shift as u64, q), modp::inv(fact_unit, q).expect("unit"), q);
        for (o, &pw) in out.iter_mut().zip(&power) {
            *o = (*o + modp::mul(scale, pw, q)) % q;
        }
    }
    Ok(GroupElement { p, k, d, entries: out.into_iter().map(|x| x as u32).collect() })
}

fn mat_mul_mod(a: &[u64], b: &[u64], d: usize, q: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for l in 0..d {
            let x = a[i * d + l];
            if x == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = (out[i * d + j] + modp::mul(x, b[l * d + j], q)) % q;
            }
        }
    }
    out
}

/// Inverse of `v ↦ ad(v) mod p`, restricted to `d` independent matrix entries.
struct LayerCodec {
    p: u64,
    d: usize,
    rank: usize,
    ad_basis: Vec<Vec<u64>>,
    rows: Vec<usize>,
    inverse: Vec<Vec<u64>>,
}

impl LayerCodec {
    fn new(cb: &ChevalleyBasis, p: u64) -> Result<Self> {
        let d = cb.dim();
        let ad_basis: Vec<Vec<u64>> = (0..d)
            .map(|j| ad_matrix(cb, &cb.basis_vector(j, 0)).into_iter().map(|x| modp::reduce(x, p)).collect())
            .collect();
        // choose d matrix positions whose coefficient rows are independent
        let mut rows = Vec::with_capacity(d);
        let mut span = Subspace::zero(p, d);
        for pos in 0..d * d {
            let row: Vec<u64> = (0..d).map(|j| ad_basis[j][pos]).collect();
            if span.insert(row)? {
                rows.push(pos);
                if rows.len() == d {
                    break;
                }
            }
        }
        if rows.len() != d {
            return Err(Error::NotInLayer(format!("ad is not injective on g mod {p}")));
        }
        // invert the d×d system  A v = entries, A[i][j] = ad(e_j)[rows[i]]
        let a: Vec<Vec<u64>> = rows.iter().map(|&pos| (0..d).map(|j| ad_basis[j][pos]).collect()).collect();
        let mut inverse = vec![vec![0u64; d]; d];
        for col in 0..d {
            let mut rhs = vec![0u64; d];
            rhs[col] = 1;
            let x = crate::linalg::solve_square(&a, &rhs, p).expect("selected rows are independent");
            for (row, v) in inverse.iter_mut().zip(x) {
                row[col] = v;
            }
        }
        Ok(Self { p, d, rank: cb.rank(), ad_basis, rows, inverse })
    }

    /// `v` with `ad(v) ≡ m (mod p)`, checked on every entry.
    fn decode(&self, m: &[u64]) -> Result<Vec<u64>> {
        let p = self.p;
        let d = self.d;
        let picked: Vec<u64> = self.rows.iter().map(|&pos| m[pos] % p).collect();
        let v: Vec<u64> =
            (0..d).map(|i| (0..d).fold(0, |acc, j| (acc + modp::mul(self.inverse[i][j], picked[j], p)) % p)).collect();
        for pos in 0..d * d {
            let want = (0..d).fold(0, |acc, j| (acc + modp::mul(v[j], self.ad_basis[j][pos], p)) % p);
            if want != m[pos] % p {
                return Err(Error::NotInLayer("matrix is not ad of a Lie algebra element".into()));
            }
        }
        Ok(v)
    }

    fn decode_element(&self, g: &GroupElement, m: u32) -> Result<Vec<u64>> {
        let q = self.p.pow(m);
        let d = self.d;
        let mut layer = vec![0u64; d * d];
        for i in 0..d {
            for j in 0..d {
                let x = g.entry(i, j) % (q * self.p);
                let x = (x + q * self.p - u64::from(i == j)) % (q * self.p);
                if !x.is_multiple_of(q) {
                    return Err(Error::NotInLayer(format!("element is not congruent to I mod p^{m}")));
                }
                layer[i * d + j] = x / q;
            }
        }
        self.decode(&layer)
    }
}

/// Inverse of [`exp_layer`] on the kernel of reduction to level `m`: reads
/// `(g − I)/p^m mod p` as `ad(v)`.
pub fn log_layer(cb: &ChevalleyBasis, g: &GroupElement, m: u32) -> Result<LieElement> {
    if m < 1 || g.level() <= m {
        return Err(Error::LevelBounds(format!("need 1 <= m < level, got m={m}, level={}", g.level())));
    }
    if g.dim() != cb.dim() {
        return Err(Error::DimensionMismatch { left: cb.dim(), right: g.dim() });
    }
    let codec = LayerCodec::new(cb, g.p())?;
    let v = codec.decode_element(g, m)?;
    Ok(LieElement::from_coeffs(codec.rank, v.into_iter().map(|c| c as i64).collect(), g.p()))
}

/// Exact element set of a finitely generated subgroup of `G(Z/p^k)`.
#[derive(Debug, Clone)]
pub struct Subgroup {
    p: u64,
    k: u32,
    d: usize,
    elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of elements congruent to the identity mod `p^m`.
    pub fn kernel_size(&self, m: u32) -> usize {
        self.elements.iter().filter(|g| g.is_congruent_identity(m)).count()
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// Breadth-first closure of `gens` under right multiplication.
pub fn enumerate_subgroup(gens: &[GroupElement], cap: usize) -> Result<Subgroup> {
    let first = gens.first().ok_or_else(|| Error::InvalidArgument("at least one generator is required".into()))?;
    let (p, k, d) = (first.p, first.k, first.d);
    if gens.iter().any(|g| (g.p, g.k, g.d) != (p, k, d)) {
        return Err(Error::InvalidArgument("generators must share p, level and dimension".into()));
    }
    let id = GroupElement::identity(p, k, d)?;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(id.entries.clone());
    queue.push_back(elements.len());
    elements.push(id);
    while let Some(idx) = queue.pop_front() {
        for g in gens {
            let next = elements[idx].mul(g);
            if seen.insert(next.entries.clone()) {
                if elements.len() >= cap {
                    return Err(Error::CapExceeded { cap });
                }
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    Ok(Subgroup { p, k, d, elements })
}

/// `Φ_m`: logs of the subgroup elements that are `≡ I (mod p^m)`, read at
/// level `m + 1`, as an `F_p`-subspace of `g`.
pub fn phi_m(cb: &ChevalleyBasis, subgroup: &Subgroup, m: u32) -> Result<Subspace> {
    if m < 1 || subgroup.k < m + 1 {
        return Err(Error::LevelBounds(format!("Φ_{m} needs level >= {}, have {}", m + 1, subgroup.k)));
    }
    let codec = LayerCodec::new(cb, subgroup.p)?;
    let mut space = Subspace::zero(subgroup.p, cb.dim());
    for g in subgroup.elements.iter().filter(|g| g.is_congruent_identity(m)) {
        space.insert(codec.decode_element(g, m)?)?;
        if space.is_full() {
            break;
        }
    }
    Ok(space)
}

/// Whether `[Φ_l, Φ_m] ⊆ Φ_{l+m}` for the enumerated subgroup.
pub fn verify_bracket_containment(cb: &ChevalleyBasis, subgroup: &Subgroup, l: u32, m: u32) -> Result<bool> {
    if subgroup.k < l + m + 1 {
        return Err(Error::LevelBounds(format!("need level >= {}, have {}", l + m + 1, subgroup.k)));
    }
    let phi_l = phi_m(cb, subgroup, l)?;
    let phi_mm = phi_m(cb, subgroup, m)?;
    let phi_lm = phi_m(cb, subgroup, l + m)?;
    bracket_space(cb, &phi_l, &phi_mm)?.is_subspace_of(&phi_lm)
}

/// Random generator set for exercising the layer filtration: root elements
/// `x_{±α}(u p^j)` and torus elements, `count` of them.
pub fn random_generator_set<R: Rng>(
    cb: &ChevalleyBasis,
    p: u64,
    k: u32,
    count: usize,
    rng: &mut R,
) -> Result<Vec<GroupElement>> {
    check_group_prime(cb, p)?;
    let rs = cb.root_system();
    let q = modulus_for(p, k)?;
    let mut gens = Vec::with_capacity(count);
    while gens.len() < count {
        let unit = loop {
            let u = rng.gen_range(1..q);
            if u % p != 0 {
                break u;
            }
        };
        let g = match rng.gen_range(0..3) {
            0 | 1 => {
                let a = if rng.gen_bool(0.5) {
                    rng.gen_range(0..rs.rank())
                } else {
                    rs.negative_index(rng.gen_range(0..rs.rank()))
                };
                let j = rng.gen_range(0..k);
                let t = modp::mul(unit, p.pow(j), q);
                root_element(cb, a, t as i64, p, k)?
            }
            _ => torus_element(cb, rng.gen_range(0..rs.rank()), unit, p, k)?,
        };
        gens.push(g);
    }
    Ok(gens)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitsLift {
    /// Order of `w̃ = n_{α_1} ⋯ n_{α_r}` in the adjoint representation.
    pub order_adjoint: u64,
    /// Exponent of the fundamental group.
    pub center_exponent: u64,
    /// `order_adjoint · center_exponent`, an upper bound in the simply-connected form.
    pub sc_order_bound: u64,
    /// Exact simply-connected order when it is determined: via the defining
    /// representation of `SL_{r+1}`, or when the fundamental group is trivial.
    pub sc_order: Option<u64>,
}

/// `n_α = x_α(1) x_{−α}(−1) x_α(1)` and `w̃ = n_{α_1} ⋯ n_{α_r}` over `Z`.
pub fn tits_lift_order(cb: &ChevalleyBasis) -> TitsLift {
    let rs = cb.root_system();
    let d = cb.dim();
    let mut w = int_identity(d);
    for i in 0..rs.rank() {
        let xa = root_exponential(cb, i, 1);
        let xm = root_exponential(cb, rs.negative_index(i), -1);
        let n = int_mat_mul(&int_mat_mul(&xa, &xm, d), &xa, d);
        w = int_mat_mul(&w, &n, d);
    }
    let order_adjoint = integer_matrix_order(&w, d, 10_000).expect("lift of a Coxeter element has finite order");
    let t = rs.cartan_type();
    let center_exponent = t.fundamental_group_exponent();
    let sc_order = match t.family() {
        Family::A => Some(sl_defining_lift_order(t.rank())),
        _ if center_exponent == 1 => Some(order_adjoint),
        _ => None,
    };
    TitsLift { order_adjoint, center_exponent, sc_order_bound: order_adjoint * center_exponent, sc_order }
}

/// Same product in the defining representation of `SL_{r+1}`.
pub fn sl_defining_lift_order(rank: usize) -> u64 {
    let n = rank + 1;
    let mut w = int_identity(n);
    for i in 0..rank {
        let mut xa = int_identity(n);
        xa[i * n + i + 1] = 1;
        let mut xm = int_identity(n);
        xm[(i + 1) * n + i] = -1;
        let ni = int_mat_mul(&int_mat_mul(&xa, &xm, n), &xa, n);
        w = int_mat_mul(&w, &ni, n);
    }
    integer_matrix_order(&w, n, 10_000).expect("finite order")
}

fn integer_matrix_order(m: &[i64], d: usize, limit: u64) -> Option<u64> {
    let id = int_identity(d);
    let mut cur = m.to_vec();
    for n in 1..=limit {
        if cur == id {
            return Some(n);
        }
        cur = int_mat_mul(&cur, m, d);
    }
    None
}

/// Per-level summary of a simulated filtration for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationSimulation {
    pub cartan_type: String,
    pub p: u64,
    pub level: u32,
    pub group_order: usize,
    /// `|ker(G(Z/p^k) → G(Z/p^{k−1}))|` within the subgroup.
    pub top_kernel_size: usize,
    pub phi_dims: Vec<usize>,
    /// `(l, m, holds)` for every `l ≤ m` with `l + m < level`.
    pub containments: Vec<(u32, u32, bool)>,
}

pub fn simulate_filtration(cb: &ChevalleyBasis, subgroup: &Subgroup) -> Result<FiltrationSimulation> {
    let k = subgroup.k;
    let phis: Vec<Subspace> = (1..k).map(|m| phi_m(cb, subgroup, m)).collect::<Result<_>>()?;
    let mut containments = Vec::new();
    for l in 1..k {
        for m in l..k {
            if l + m < k {
                let br = bracket_space(cb, &phis[l as usize - 1], &phis[m as usize - 1])?;
                containments.push((l, m, br.is_subspace_of(&phis[(l + m) as usize - 1])?));
            }
        }
    }
    Ok(FiltrationSimulation {
        cartan_type: cb.root_system().cartan_type().to_string(),
        p: subgroup.p,
        level: k,
        group_order: subgroup.order(),
        top_kernel_size: if k >= 2 { subgroup.kernel_size(k - 1) } else { subgroup.order() },
        phi_dims: phis.iter().map(Subspace::dim).collect(),
        containments,
    })
}
