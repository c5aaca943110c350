//! The `N_k` sequence, the five-condition checker for a cocharacter `λ`,
//! the arithmetic-progression selector, one-prime certificates, and the
//! effective lower bound for `p`.

use serde::{Deserialize, Serialize};

use crate::chevalley::{build_chevalley_basis, cochar_to_toral, max_structure_constant, ChevalleyBasis};
use crate::chevgroup::tits_lift_order;
use crate::error::{Error, Result};
use crate::filtration::{check_root_height_lemma, ClosureOptions, RootHeightReport};
use crate::irregular::{eigenspace_is_zero, index_of_irregularity, EigenVerdict, IrregularData};
use crate::modp;
use crate::rootsys::{build_root_system, pairing, CartanType, CocharVec, Root, RootSystem};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const C_G_NOTE: &str = "c_G from external reference, not computable here";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSequence {
    pub cartan_type: CartanType,
    pub coeffs: Vec<i64>,
    pub values: Vec<u128>,
    pub starred: Vec<u128>,
}

impl NSequence {
    pub fn n(&self, k: usize) -> u128 {
        self.values[k]
    }

    pub fn n_star(&self, k: usize) -> u128 {
        self.starred[k]
    }
}

fn star(n: u128) -> u128 {
    if n % 2 == 1 {
        n
    } else {
        n + 1
    }
}

/// `N_0 = 1`, `N_{k+1} = Σ_i c_i (N_k* + 2i)` through `N_upto`.
pub fn n_sequence(rs: &RootSystem, upto: usize) -> Result<NSequence> {
    if upto < 1 {
        return Err(Error::InvalidArgument("n_sequence needs upto >= 1".into()));
    }
    let coeffs = rs.highest_root_coeffs();
    let mut values = vec![1u128];
    for _ in 0..upto {
        let s = star(*values.last().unwrap());
        let mut next: u128 = 0;
        for (i, &c) in coeffs.iter().enumerate() {
            let term = (s + 2 * (i as u128 + 1))
                .checked_mul(c as u128)
                .and_then(|t| next.checked_add(t))
                .ok_or_else(|| Error::InvalidArgument("N_k overflows 128 bits".into()))?;
            next = term;
        }
        values.push(next);
    }
    let starred = values.iter().map(|&n| star(n)).collect();
    Ok(NSequence { cartan_type: rs.cartan_type(), coeffs, values, starred })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionWitness {
    StructureConstant { n_max: u64 },
    Pairing { root: Root, pairing: i64 },
    Collision { root: Root, other: Root, residue: u64 },
    TrivialCharacter { root: Root, residue: u64 },
    Eigenspace { root: Root, sign: i8, pairing: i64, exponent: u64, verdict: EigenVerdict },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: u8,
    pub passed: bool,
    pub witness: Option<ConditionWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub p: u64,
    pub lambda: CocharVec,
    pub conditions: Vec<ConditionVerdict>,
    pub passed: bool,
    pub vandiver_assumed: bool,
}

impl CheckReport {
    pub fn first_failure(&self) -> Option<&ConditionVerdict> {
        self.conditions.iter().find(|c| !c.passed)
    }
}

fn verdict(condition: u8, witness: Option<ConditionWitness>) -> ConditionVerdict {
    ConditionVerdict { condition, passed: witness.is_none(), witness }
}

/// Evaluates conditions (1)–(5) for `λ` at `p`.
pub fn check_theorem_conditions(
    rs: &RootSystem,
    p: u64,
    lambda: &CocharVec,
    irr: &IrregularData,
) -> Result<CheckReport> {
    if irr.p != p {
        return Err(Error::ModulusMismatch { left: p, right: irr.p });
    }
    if lambda.0.len() != rs.rank() {
        return Err(Error::RankMismatch { expected: rs.rank(), got: lambda.0.len() });
    }
    let m = p - 1;
    let pairings: Vec<i64> = rs.roots().iter().map(|a| pairing(a, lambda)).collect::<Result<_>>()?;

    let n_max = max_structure_constant(rs);
    let c1 = (p <= n_max).then_some(ConditionWitness::StructureConstant { n_max });

    let c2 = rs.roots().iter().zip(&pairings).find_map(|(a, &s)| {
        (s == 0 || s.unsigned_abs() >= m).then(|| ConditionWitness::Pairing { root: a.clone(), pairing: s })
    });

    let c3 = (0..rs.rank()).find_map(|i| {
        let s = pairings[rs.simple_root_index(i)];
        (s.rem_euclid(2) == 0)
            .then(|| ConditionWitness::Pairing { root: rs.root(rs.simple_root_index(i)).clone(), pairing: s })
    });

    let residues: Vec<u64> = pairings.iter().map(|&s| modp::reduce(s, m)).collect();
    let mut c4 = None;
    'outer: for (i, &r) in residues.iter().enumerate() {
        if r == 1 {
            c4 = Some(ConditionWitness::TrivialCharacter { root: rs.root(i).clone(), residue: r });
            break;
        }
        for j in 0..i {
            if residues[j] == r {
                c4 = Some(ConditionWitness::Collision {
                    root: rs.root(j).clone(),
                    other: rs.root(i).clone(),
                    residue: r,
                });
                break 'outer;
            }
        }
    }

    let mut c5 = None;
    'roots: for i in 0..rs.num_positive() {
        for sign in [1i8, -1] {
            let s = pairings[i] * sign as i64;
            let exponent = modp::reduce(p as i64 - s, m);
            let v = eigenspace_is_zero(irr, exponent as i64);
            if !v.is_zero() {
                c5 = Some(ConditionWitness::Eigenspace {
                    root: rs.root(i).clone(),
                    sign,
                    pairing: s,
                    exponent,
                    verdict: v,
                });
                break 'roots;
            }
        }
    }

    let conditions = vec![verdict(1, c1), verdict(2, c2), verdict(3, c3), verdict(4, c4), verdict(5, c5)];
    let passed = conditions.iter().all(|c| c.passed);
    Ok(CheckReport { p, lambda: lambda.clone(), conditions, passed, vandiver_assumed: irr.vandiver_assumed })
}

/// `λ = Σ_j (N_i* + 2j) λ_j`.
pub fn candidate(nseq: &NSequence, base_index: usize, rank: usize) -> CocharVec {
    let s = nseq.n_star(base_index) as i64;
    CocharVec((1..=rank as i64).map(|j| s + 2 * j).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateAttempt {
    pub base_index: usize,
    pub lambda: CocharVec,
    pub first_failure: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Selection {
    Found { lambda: CocharVec, base_index: usize, report: CheckReport },
    NotFound { attempts: Vec<CandidateAttempt> },
}

/// Tries bases `i = 0, …, e` in order and returns the first `λ` passing all
/// five conditions.
pub fn select_cocharacter(rs: &RootSystem, p: u64, e: usize, irr: &IrregularData) -> Result<Selection> {
    let nseq = n_sequence(rs, e + 1)?;
    let mut attempts = Vec::new();
    for i in 0..=e {
        let lambda = candidate(&nseq, i, rs.rank());
        let report = check_theorem_conditions(rs, p, &lambda, irr)?;
        if report.passed {
            return Ok(Selection::Found { lambda, base_index: i, report });
        }
        attempts.push(CandidateAttempt {
            base_index: i,
            lambda,
            first_failure: report.first_failure().map(|c| c.condition),
        });
    }
    Ok(Selection::NotFound { attempts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectionCode {
    StructureConstants,
    PrimeBound,
    Irregularity,
    DegenerateCartan,
    /// No candidate passed although every hypothesis holds.
    SelectionFailed,
    /// The bracket filtration of the selected `λ` does not reach `g^der`.
    FiltrationFailed,
}

impl RejectionCode {
    /// Outcomes that contradict the theorem rather than its hypotheses.
    pub fn is_invariant_violation(self) -> bool {
        matches!(self, RejectionCode::SelectionFailed | RejectionCode::FiltrationFailed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub cartan_type: CartanType,
    pub p: u64,
    pub e: usize,
    pub code: RejectionCode,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub root: Root,
    pub pairing: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub schema_version: u32,
    pub tool_version: String,
    pub cartan_type: CartanType,
    pub p: u64,
    pub e: usize,
    pub lambda: CocharVec,
    pub base_index: usize,
    /// `S = {⟨α, λ⟩ : α > 0}`, sorted.
    pub s_values: Vec<i64>,
    pub pairings: Vec<PairingEntry>,
    pub toral_element: Vec<i64>,
    pub check_report: CheckReport,
    pub filtration: RootHeightReport,
    /// `N_0, …, N_{e+1}`; all below `p`.
    pub n_sequence: Vec<u64>,
    pub irregular: IrregularData,
    pub vandiver_assumed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    Certified(Box<WitnessCertificate>),
    Rejected(Rejection),
}

/// Checks the one-prime hypotheses, selects `λ`, runs the bracket filtration
/// on `H = cochar_to_toral(λ)`, and assembles the certificate.
pub fn certify_one_prime(cb: &ChevalleyBasis, p: u64, e: usize, irr: &IrregularData) -> Result<Certification> {
    let rs = cb.root_system();
    if !modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::PrimeTooSmall { p, min: 5 });
    }
    if irr.p != p {
        return Err(Error::ModulusMismatch { left: p, right: irr.p });
    }
    let t = rs.cartan_type();
    let reject = |code, reason: String| Ok(Certification::Rejected(Rejection { cartan_type: t, p, e, code, reason }));

    let n_max = max_structure_constant(rs);
    if p <= n_max {
        return reject(RejectionCode::StructureConstants, format!("p ≤ n_max = {n_max}"));
    }
    let nseq = n_sequence(rs, e + 1)?;
    let bound = 1 + 2 * nseq.n(e + 1);
    if (p as u128) <= bound {
        return reject(RejectionCode::PrimeBound, format!("p ≤ 1+2N_{} = {bound}", e + 1));
    }
    if irr.e_p > e {
        return reject(RejectionCode::Irregularity, format!("e_p={} > e={e}", irr.e_p));
    }

    let (lambda, base_index, report) = match select_cocharacter(rs, p, e, irr)? {
        Selection::Found { lambda, base_index, report } => (lambda, base_index, report),
        Selection::NotFound { attempts } => {
            let summary: Vec<String> = attempts
                .iter()
                .map(|a| format!("base {}: condition ({})", a.base_index, a.first_failure.unwrap_or(0)))
                .collect();
            return reject(RejectionCode::SelectionFailed, format!("no candidate passed: {}", summary.join(", ")));
        }
    };

    let h = match cochar_to_toral(cb, &lambda, p) {
        Ok(h) => h,
        Err(Error::DegenerateCartanPairing { det, .. }) => {
            return reject(RejectionCode::DegenerateCartan, format!("p divides det(Cartan) = {det}"));
        }
        Err(err) => return Err(err),
    };
    let filtration = check_root_height_lemma(cb, p, &h, ClosureOptions::default())?;
    if !filtration.passed() {
        return reject(RejectionCode::FiltrationFailed, "bracket filtration does not reach g^der by W_4".into());
    }

    let pairings: Vec<PairingEntry> = rs
        .positive_roots()
        .iter()
        .map(|a| Ok(PairingEntry { root: a.clone(), pairing: pairing(a, &lambda)? }))
        .collect::<Result<_>>()?;
    let mut s_values: Vec<i64> = pairings.iter().map(|e| e.pairing).collect();
    s_values.sort_unstable();
    s_values.dedup();

    Ok(Certification::Certified(Box::new(WitnessCertificate {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        cartan_type: t,
        p,
        e,
        lambda,
        base_index,
        s_values,
        pairings,
        toral_element: h.coeffs,
        check_report: report,
        filtration,
        n_sequence: nseq.values.iter().map(|&n| n as u64).collect(),
        irregular: irr.clone(),
        vandiver_assumed: irr.vandiver_assumed,
    })))
}

/// Re-derives the certificate from its recorded `(type, p, e)` and returns
/// the names of fields that disagree; empty means valid.
pub fn validate_certificate(cert: &WitnessCertificate) -> Result<Vec<String>> {
    let mut mismatches = Vec::new();
    if cert.schema_version != SCHEMA_VERSION {
        mismatches.push("schema_version".to_string());
    }
    let irr = index_of_irregularity(cert.p)?;
    if irr != cert.irregular {
        mismatches.push("irregular".to_string());
    }
    let cb = build_chevalley_basis(&build_root_system(cert.cartan_type));
    let fresh = match certify_one_prime(&cb, cert.p, cert.e, &irr)? {
        Certification::Certified(c) => c,
        Certification::Rejected(r) => {
            mismatches.push(format!("rejected on re-run: {}", r.reason));
            return Ok(mismatches);
        }
    };
    let ours = serde_json::to_value(cert).expect("certificate serializes");
    let theirs = serde_json::to_value(&*fresh).expect("certificate serializes");
    if let (Some(a), Some(b)) = (ours.as_object(), theirs.as_object()) {
        for (key, value) in a {
            if key != "tool_version" && b.get(key) != Some(value) {
                mismatches.push(key.clone());
            }
        }
    }
    mismatches.sort();
    mismatches.dedup();
    Ok(mismatches)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorBound {
    pub cartan_type: CartanType,
    pub coxeter_number: u64,
    pub two_h_minus_2: u64,
    pub tilde_h_adjoint: u64,
    pub tilde_h_sc: Option<u64>,
    /// Modulus used for the prime search: the exact simply-connected order
    /// when known, otherwise the center-exponent bound.
    pub tilde_h_used: u64,
    pub tilde_h_is_bound: bool,
    pub least_prime: u64,
    /// `2^{φ(h̃)+1} − 1`.
    pub analytic_bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub factors: Vec<FactorBound>,
    /// `c(h̃_1, …, h̃_n)`: least `max p_i` over distinct odd primes `p_i ≡ 1 (mod h̃_i)`.
    pub c: u64,
    pub assignment: Vec<u64>,
    pub analytic_max: u128,
    pub max_two_h_minus_2: u64,
    pub max_tilde_h: u64,
    /// Maximum of the computable constants; `c_G` is excluded.
    pub bound_excluding_c_g: u64,
    pub c_g: String,
}

fn augment(f: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &q in &adj[f] {
        if !seen[q] {
            seen[q] = true;
            if owner[q].is_none_or(|g| augment(g, adj, owner, seen)) {
                owner[q] = Some(f);
                return true;
            }
        }
    }
    false
}

/// Smallest `B` such that distinct odd primes `p_i ≤ B` with `p_i ≡ 1 (mod m_i)`
/// exist, and one such assignment.
pub fn least_distinct_primes(moduli: &[u64], ceiling: u64) -> Result<(u64, Vec<u64>)> {
    if moduli.is_empty() || moduli.contains(&0) {
        return Err(Error::InvalidArgument("moduli must be nonempty and positive".into()));
    }
    let primes = modp::primes_in(3, ceiling);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); moduli.len()];
    let mut owner: Vec<Option<usize>> = vec![None; primes.len()];
    let mut matched = 0;
    for (qi, &q) in primes.iter().enumerate() {
        for (f, &m) in moduli.iter().enumerate() {
            if (q - 1) % m == 0 {
                adj[f].push(qi);
            }
        }
        // a new prime can raise the matching size by at most one
        for f in 0..moduli.len() {
            if owner.contains(&Some(f)) {
                continue;
            }
            let mut seen = vec![false; primes.len()];
            if augment(f, &adj, &mut owner, &mut seen) {
                matched += 1;
                break;
            }
        }
        if matched == moduli.len() {
            let mut assignment = vec![0; moduli.len()];
            for (qi, o) in owner.iter().enumerate() {
                if let Some(f) = o {
                    assignment[*f] = primes[qi];
                }
            }
            return Ok((q, assignment));
        }
    }
    Err(Error::PrimeSearchCeiling { ceiling })
}

pub fn effective_bound(types: &[CartanType], ceiling: u64) -> Result<BoundReport> {
    if types.is_empty() {
        return Err(Error::InvalidArgument("at least one Cartan type is required".into()));
    }
    let mut factors = Vec::new();
    for &t in types {
        let rs = build_root_system(t);
        let cb = build_chevalley_basis(&rs);
        let lift = tits_lift_order(&cb);
        let h = rs.coxeter_number();
        let used = lift.sc_order.unwrap_or(lift.sc_order_bound);
        let (least, _) = least_distinct_primes(&[used], ceiling)?;
        let phi = modp::euler_phi(used);
        let analytic_bound =
            1u128.checked_shl(phi as u32 + 1).filter(|_| phi < 127).map(|x| x - 1).unwrap_or(u128::MAX);
        factors.push(FactorBound {
            cartan_type: t,
            coxeter_number: h,
            two_h_minus_2: 2 * h - 2,
            tilde_h_adjoint: lift.order_adjoint,
            tilde_h_sc: lift.sc_order,
            tilde_h_used: used,
            tilde_h_is_bound: lift.sc_order.is_none(),
            least_prime: least,
            analytic_bound,
        });
    }
    let moduli: Vec<u64> = factors.iter().map(|f| f.tilde_h_used).collect();
    let (c, assignment) = least_distinct_primes(&moduli, ceiling)?;
    let max_two_h_minus_2 = factors.iter().map(|f| f.two_h_minus_2).max().unwrap();
    let max_tilde_h = factors.iter().map(|f| f.tilde_h_used).max().unwrap();
    Ok(BoundReport {
        analytic_max: factors.iter().map(|f| f.analytic_bound).max().unwrap(),
        factors,
        c,
        assignment,
        max_two_h_minus_2,
        max_tilde_h,
        bound_excluding_c_g: max_two_h_minus_2.max(max_tilde_h).max(c),
        c_g: C_G_NOTE.to_string(),
    })
}
