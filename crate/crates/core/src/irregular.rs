//! Bernoulli numbers mod p, Kummer's index of irregularity, eigenspace
//! verdicts for the p-part of the class group of `Q(μ_p)`, and the bad set.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modp;

pub const CACHE_ENV: &str = "CHEVCERT_CACHE_DIR";
pub const CACHE_FILE: &str = "irregular-v1.jsonl";

fn check_prime(p: u64) -> Result<()> {
    if !modp::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p < 5 {
        return Err(Error::PrimeTooSmall { p, min: 5 });
    }
    Ok(())
}

/// `B_k mod p` for even `k ∈ [2, p−3]`, from the inverse of `(e^t − 1)/t`.
pub fn bernoulli_mod_p(p: u64) -> Result<BTreeMap<u64, u64>> {
    check_prime(p)?;
    let n = (p - 3) as usize;
    // inv_fact[i] = 1/i! mod p for i ≤ p−1
    let mut fact = vec![1u64; n + 3];
    for i in 1..fact.len() {
        fact[i] = fact[i - 1] * i as u64 % p;
    }
    let inv_fact: Vec<u64> = fact.iter().map(|&f| modp::inv(f, p).expect("i! is a unit for i < p")).collect();
    // f_i = 1/(i+1)!, b = 1/f
    let f: Vec<u64> = (0..=n).map(|i| inv_fact[i + 1]).collect();
    let mut b = vec![0u64; n + 1];
    b[0] = 1;
    for m in 1..=n {
        let mut acc = 0u64;
        for i in 1..=m {
            if b[m - i] != 0 {
                acc = (acc + f[i] * b[m - i]) % p;
            }
        }
        b[m] = (p - acc) % p;
    }
    Ok((2..=n).step_by(2).map(|k| (k as u64, b[k] * fact[k] % p)).collect())
}

/// `B_0, …, B_max` as exact rationals via `Σ_{j≤m} C(m+1, j) B_j = 0`.
pub fn exact_bernoulli_oracle(max_index: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(max_index + 1);
    out.push(BigRational::one());
    let mut binom_row: Vec<BigInt> = vec![BigInt::one(), BigInt::one()];
    for m in 1..=max_index {
        // row m+1 of Pascal's triangle
        let mut next = vec![BigInt::one(); m + 2];
        for j in 1..=m {
            next[j] = &binom_row[j - 1] + &binom_row[j];
        }
        binom_row = next;
        if m > 1 && m % 2 == 1 {
            out.push(BigRational::zero());
            continue;
        }
        let mut acc = BigRational::zero();
        for (j, bj) in out.iter().enumerate() {
            if !bj.is_zero() {
                acc += bj * BigRational::from_integer(binom_row[j].clone());
            }
        }
        out.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    out
}

/// Reduces a rational whose denominator is prime to `p`.
pub fn rational_mod_p(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = (x.denom() % &pb).to_u64()?;
    let num = x.numer() % &pb;
    let num = if num.is_negative() { num + &pb } else { num };
    let num = num.to_u64()?;
    Some(modp::mul(num, modp::inv(den, p)?, p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularData {
    pub p: u64,
    pub irregular_indices: Vec<u64>,
    pub e_p: usize,
    pub vandiver_assumed: bool,
}

impl IrregularData {
    pub fn from_indices(p: u64, mut irregular_indices: Vec<u64>) -> Result<Self> {
        check_prime(p)?;
        irregular_indices.sort_unstable();
        irregular_indices.dedup();
        if irregular_indices.iter().any(|&k| k % 2 == 1 || k < 2 || k > p - 3) {
            return Err(Error::InvalidArgument(format!("irregular indices out of range for p={p}")));
        }
        Ok(Self { p, e_p: irregular_indices.len(), irregular_indices, vandiver_assumed: true })
    }
}

pub fn index_of_irregularity(p: u64) -> Result<IrregularData> {
    let b = bernoulli_mod_p(p)?;
    IrregularData::from_indices(p, b.into_iter().filter(|&(_, v)| v == 0).map(|(k, _)| k).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenVerdict {
    ProvablyZero,
    NonzeroOdd,
    AssumedZeroVandiver,
}

impl EigenVerdict {
    pub fn is_zero(self) -> bool {
        self != EigenVerdict::NonzeroOdd
    }
}

/// Verdict for the `χ̄^j` eigenspace, `j` read mod `p − 1`.
pub fn eigenspace_is_zero(irr: &IrregularData, j: i64) -> EigenVerdict {
    let p = irr.p;
    let j = modp::reduce(j, p - 1);
    if j == 0 || j == 1 {
        EigenVerdict::ProvablyZero
    } else if j % 2 == 1 {
        if irr.irregular_indices.binary_search(&(p - j)).is_ok() {
            EigenVerdict::NonzeroOdd
        } else {
            EigenVerdict::ProvablyZero
        }
    } else {
        EigenVerdict::AssumedZeroVandiver
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSet {
    pub p: u64,
    pub members: BTreeSet<u64>,
    pub vandiver_assumed: bool,
}

impl BadSet {
    pub fn contains(&self, n: i64) -> bool {
        self.members.contains(&modp::reduce(n, self.p - 1))
    }
}

pub fn bad_set(irr: &IrregularData) -> BadSet {
    let p = irr.p;
    let members = (0..p - 1)
        .filter(|&n| {
            let n = n as i64;
            !eigenspace_is_zero(irr, 1 + n).is_zero() || !eigenspace_is_zero(irr, 1 - n).is_zero()
        })
        .collect();
    BadSet { p, members, vandiver_assumed: irr.vandiver_assumed }
}

/// `(e^{−1/2}/(2^r r!), 1 − e^{−1/2}/2^r)`.
pub fn irregularity_density_estimate(r: u32) -> (f64, f64) {
    let base = (-0.5f64).exp() / 2f64.powi(r as i32);
    let fact: f64 = (1..=r).map(f64::from).product();
    (base / fact, 1.0 - base)
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheRecord {
    p: u64,
    indices: Vec<u64>,
}

/// Persistent JSON-lines table of irregular indices, one record per prime.
#[derive(Debug, Clone)]
pub struct IrregularCache {
    path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanStats {
    pub computed: usize,
    pub cached: usize,
    pub quarantined: usize,
}

impl IrregularCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Self { path: dir.as_ref().join(CACHE_FILE) }
    }

    /// Directory from the environment, else `./.chevcert-cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".chevcert-cache")))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Valid records and the raw text of lines that failed validation.
    fn read(&self) -> Result<(BTreeMap<u64, IrregularData>, Vec<String>)> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Default::default()),
            Err(e) => return Err(Error::Cache(e.to_string())),
        };
        let mut records = BTreeMap::new();
        let mut bad = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<CacheRecord>(line)
                .ok()
                .and_then(|r| IrregularData::from_indices(r.p, r.indices).ok())
            {
                Some(d) => {
                    records.insert(d.p, d);
                }
                None => bad.push(line.to_string()),
            }
        }
        Ok((records, bad))
    }

    pub fn load(&self) -> Result<BTreeMap<u64, IrregularData>> {
        Ok(self.read()?.0)
    }

    fn write(&self, records: &BTreeMap<u64, IrregularData>) -> Result<()> {
        let dir = self.path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = self.path.with_extension("jsonl.tmp");
        let mut f = fs::File::create(&tmp).map_err(|e| Error::Cache(e.to_string()))?;
        for d in records.values() {
            let rec = CacheRecord { p: d.p, indices: d.irregular_indices.clone() };
            writeln!(f, "{}", serde_json::to_string(&rec).expect("record serializes"))
                .map_err(|e| Error::Cache(e.to_string()))?;
        }
        f.sync_all().map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, &self.path).map_err(|e| Error::Cache(e.to_string()))
    }

    fn quarantine(&self, lines: &[String]) -> Result<()> {
        let qpath = self.path.with_extension("jsonl.quarantine");
        let mut f =
            fs::OpenOptions::new().create(true).append(true).open(&qpath).map_err(|e| Error::Cache(e.to_string()))?;
        for line in lines {
            log::warn!("quarantined corrupt cache line: {line}");
            writeln!(f, "{line}").map_err(|e| Error::Cache(e.to_string()))?;
        }
        Ok(())
    }

    /// Ensures records for every prime `5 ≤ p ≤ pmax, p ≥ pmin`, computing
    /// the missing ones on up to `jobs` threads.
    pub fn scan(&self, pmin: u64, pmax: u64, jobs: usize) -> Result<(Vec<IrregularData>, ScanStats)> {
        let (mut records, bad) = self.read()?;
        let mut stats = ScanStats { quarantined: bad.len(), ..Default::default() };
        if !bad.is_empty() {
            self.quarantine(&bad)?;
        }
        let primes = modp::primes_in(pmin.max(5), pmax);
        let missing: Vec<u64> = primes.iter().copied().filter(|p| !records.contains_key(p)).collect();
        stats.cached = primes.len() - missing.len();
        stats.computed = missing.len();
        if !missing.is_empty() {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let fresh: Vec<IrregularData> =
                pool.install(|| missing.par_iter().map(|&p| index_of_irregularity(p)).collect::<Result<_>>())?;
            for d in fresh {
                records.insert(d.p, d);
            }
        }
        if !missing.is_empty() || !bad.is_empty() {
            self.write(&records)?;
        }
        Ok((primes.iter().map(|p| records[p].clone()).collect(), stats))
    }

    /// Cached record for `p`, computing and storing it if absent.
    pub fn get(&self, p: u64) -> Result<IrregularData> {
        check_prime(p)?;
        let (mut data, _) = self.scan(p, p, 1)?;
        Ok(data.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn oracle_values() {
        let b = exact_bernoulli_oracle(12);
        assert_eq!(b[0], q(1, 1));
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[12], q(-691, 2730));
        assert!(b[3].is_zero() && b[11].is_zero());
    }

    #[test]
    fn residues() {
        assert_eq!(bernoulli_mod_p(7).unwrap()[&2], 6);
        assert_eq!(bernoulli_mod_p(37).unwrap()[&32], 0);
        assert!(bernoulli_mod_p(11).unwrap().values().all(|&v| v != 0));
        assert!(matches!(bernoulli_mod_p(3), Err(Error::PrimeTooSmall { .. })));
        assert!(bernoulli_mod_p(9).is_err());
    }

    #[test]
    fn indices_and_verdicts() {
        assert_eq!(index_of_irregularity(11).unwrap().e_p, 0);
        let d = index_of_irregularity(37).unwrap();
        assert_eq!(d.irregular_indices, vec![32]);
        assert!(d.vandiver_assumed);
        assert_eq!(index_of_irregularity(157).unwrap().irregular_indices, vec![62, 110]);
        assert_eq!(eigenspace_is_zero(&d, 0), EigenVerdict::ProvablyZero);
        assert_eq!(eigenspace_is_zero(&d, 1), EigenVerdict::ProvablyZero);
        assert_eq!(eigenspace_is_zero(&d, 5), EigenVerdict::NonzeroOdd);
        assert_eq!(eigenspace_is_zero(&d, 5 + 36), EigenVerdict::NonzeroOdd);
        assert_eq!(eigenspace_is_zero(&d, 4), EigenVerdict::AssumedZeroVandiver);
        assert_eq!(eigenspace_is_zero(&d, 7), EigenVerdict::ProvablyZero);
    }

    #[test]
    fn bad_sets() {
        assert!(bad_set(&index_of_irregularity(11).unwrap()).members.is_empty());
        let a = bad_set(&index_of_irregularity(37).unwrap());
        assert_eq!(a.members.iter().copied().collect::<Vec<_>>(), vec![4, 32]);
        assert!(a.contains(-4));
        let a = bad_set(&index_of_irregularity(67).unwrap());
        assert_eq!(a.members.iter().copied().collect::<Vec<_>>(), vec![8, 58]);
    }

    #[test]
    fn density() {
        let (pt, cum) = irregularity_density_estimate(0);
        assert!((pt - 0.6065).abs() < 5e-5);
        assert!((cum - 0.3935).abs() < 5e-5);
        assert!(irregularity_density_estimate(40).1 > 1.0 - 1e-12);
    }

    #[test]
    fn rational_reduction() {
        assert_eq!(rational_mod_p(&q(1, 6), 7), Some(6));
        assert_eq!(rational_mod_p(&q(-1, 2), 5), Some(2));
        assert_eq!(rational_mod_p(&q(1, 5), 5), None);
    }
}
