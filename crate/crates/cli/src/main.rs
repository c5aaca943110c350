//! `chevcert` command-line tool.
//!
//! Exit codes: 0 success, 1 negative verdict (a hypothesis fails), 2 usage
//! error, 3 internal invariant violation.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chevcert::chevalley::{build_chevalley_basis, ChevalleyBasis};
use chevcert::chevgroup::{
    chevalley_generators, enumerate_subgroup, random_generator_set, simulate_filtration, DEFAULT_ENUMERATION_CAP,
};
use chevcert::filtration::{check_root_height_lemma, random_regular_toral, ClosureOptions, RootHeightReport};
use chevcert::irregular::{irregularity_density_estimate, IrregularCache};
use chevcert::rootsys::{build_root_system, CartanType, CocharVec};
use chevcert::witness::{
    certify_one_prime, effective_bound, select_cocharacter, validate_certificate, Certification, Selection,
    WitnessCertificate,
};
use chevcert::Error;
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "chevcert", version, about = "Chevalley algebra checks and one-prime witness certificates")]
struct Cli {
    /// Directory holding the irregular-prime cache (overrides CHEVCERT_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Root system as JSON.
    RootData { cartan_type: CartanType },
    /// Structure constants N_{α,β} as CSV.
    StructConsts { cartan_type: CartanType },
    /// Root-height lemma on random regular toral elements.
    CheckLemma {
        cartan_type: CartanType,
        p: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run even when p ≤ n_max; results are exploratory.
        #[arg(long)]
        allow_small_prime: bool,
    },
    /// Populate the cache for primes in [PMIN, PMAX] and print e_p.
    ScanIrregular {
        pmin: u64,
        pmax: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Choose a cocharacter λ or report why every candidate fails.
    SelectCochar { cartan_type: CartanType, p: u64, e: usize },
    /// One-prime witness certificate as JSON.
    Certify { cartan_type: CartanType, p: u64, e: usize },
    /// Re-run every check recorded in a certificate file.
    Validate { certificate: PathBuf },
    /// Φ_m report for a subgroup of the adjoint group over Z/p^K.
    SimulateFiltration {
        cartan_type: CartanType,
        p: u64,
        k: u32,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        /// Use this many random generators instead of the standard x_{±α_i}(1).
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower bound for p over a product of simple factors, e.g. A1,A1.
    EffectiveBound {
        #[arg(value_delimiter = ',', required = true)]
        types: Vec<CartanType>,
        #[arg(long, default_value_t = 1_000_000)]
        ceiling: u64,
    },
    /// Density heuristic for primes of index r.
    Density { r: u32 },
}

enum Failure {
    Negative(String),
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DegenerateCartanPairing { .. } | Error::StructureConstantsVanish { .. } => {
                Failure::Negative(e.to_string())
            }
            Error::NotInLayer(_) | Error::DimensionMismatch { .. } | Error::ModulusMismatch { .. } => {
                Failure::Invariant(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Report text plus the verdict it carries.
struct Emit {
    text: String,
    failure: Option<Failure>,
}

impl Emit {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cache(cli: &Cli) -> IrregularCache {
    match &cli.cache_dir {
        Some(dir) => IrregularCache::new(dir),
        None => IrregularCache::from_env(),
    }
}

fn basis(t: CartanType) -> ChevalleyBasis {
    build_chevalley_basis(&build_root_system(t))
}

#[derive(Serialize)]
struct LemmaSuite {
    cartan_type: CartanType,
    p: u64,
    trials: usize,
    seed: u64,
    passed: usize,
    failed: Vec<FailedTrial>,
    exploratory: bool,
}

#[derive(Serialize)]
struct FailedTrial {
    lambda: CocharVec,
    report: RootHeightReport,
}

#[derive(Serialize)]
struct Validation {
    valid: bool,
    mismatches: Vec<String>,
}

fn run(cli: &Cli) -> Result<Emit, Failure> {
    match &cli.command {
        Command::RootData { cartan_type } => Ok(Emit::ok(json(&build_root_system(*cartan_type).to_json()))),
        Command::StructConsts { cartan_type } => Ok(Emit::ok(basis(*cartan_type).structure_constants_csv())),
        Command::CheckLemma { cartan_type, p, trials, seed, allow_small_prime } => {
            let cb = basis(*cartan_type);
            let opts = ClosureOptions { allow_small_prime: *allow_small_prime };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut suite = LemmaSuite {
                cartan_type: *cartan_type,
                p: *p,
                trials: *trials,
                seed: *seed,
                passed: 0,
                failed: Vec::new(),
                exploratory: false,
            };
            for _ in 0..*trials {
                let Some((lambda, h)) = random_regular_toral(&cb, *p, &mut rng)? else {
                    return Err(Failure::Negative(format!("no regular toral element exists over F_{p}")));
                };
                let report = check_root_height_lemma(&cb, *p, &h, opts)?;
                suite.exploratory |= report.exploratory;
                if report.passed() {
                    suite.passed += 1;
                } else {
                    suite.failed.push(FailedTrial { lambda, report });
                }
            }
            let failure = match (suite.failed.is_empty(), suite.exploratory) {
                (true, _) => None,
                (false, true) => Some(Failure::Negative(format!("{} exploratory trials failed", suite.failed.len()))),
                (false, false) => Some(Failure::Invariant(format!("{} trials failed the lemma", suite.failed.len()))),
            };
            Ok(Emit { text: json(&suite), failure })
        }
        Command::ScanIrregular { pmin, pmax, jobs } => {
            if pmin > pmax {
                return Err(Failure::Usage(format!("empty range [{pmin}, {pmax}]")));
            }
            let (records, stats) = cache(cli).scan(*pmin, *pmax, *jobs)?;
            eprintln!(
                "scanned {} primes: {} computed, {} cached, {} quarantined",
                records.len(),
                stats.computed,
                stats.cached,
                stats.quarantined
            );
            let mut text = String::from("p\te_p\tindices\n");
            for d in &records {
                let idx: Vec<String> = d.irregular_indices.iter().map(u64::to_string).collect();
                text.push_str(&format!("{}\t{}\t{}\n", d.p, d.e_p, idx.join(",")));
            }
            Ok(Emit::ok(text))
        }
        Command::SelectCochar { cartan_type, p, e } => {
            let rs = build_root_system(*cartan_type);
            let irr = cache(cli).get(*p)?;
            let selection = select_cocharacter(&rs, *p, *e, &irr)?;
            let failure = match &selection {
                Selection::Found { .. } => None,
                Selection::NotFound { .. } => Some(Failure::Negative("no candidate cocharacter passes".into())),
            };
            Ok(Emit { text: json(&selection), failure })
        }
        Command::Certify { cartan_type, p, e } => {
            let cb = basis(*cartan_type);
            let irr = cache(cli).get(*p)?;
            let outcome = certify_one_prime(&cb, *p, *e, &irr)?;
            let failure = match &outcome {
                Certification::Certified(_) => None,
                Certification::Rejected(r) if r.code.is_invariant_violation() => {
                    Some(Failure::Invariant(r.reason.clone()))
                }
                Certification::Rejected(r) => Some(Failure::Negative(r.reason.clone())),
            };
            Ok(Emit { text: json(&outcome), failure })
        }
        Command::Validate { certificate } => {
            let text = fs::read_to_string(certificate)
                .map_err(|e| Failure::Usage(format!("{}: {e}", certificate.display())))?;
            let cert: WitnessCertificate = match serde_json::from_str::<Certification>(&text) {
                Ok(Certification::Certified(c)) => *c,
                Ok(Certification::Rejected(_)) => {
                    return Err(Failure::Usage("file holds a rejection, not a certificate".into()))
                }
                Err(_) => serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("not a certificate: {e}")))?,
            };
            let mismatches = validate_certificate(&cert)?;
            let failure = (!mismatches.is_empty())
                .then(|| Failure::Negative(format!("mismatched fields: {}", mismatches.join(", "))));
            Ok(Emit { text: json(&Validation { valid: mismatches.is_empty(), mismatches }), failure })
        }
        Command::SimulateFiltration { cartan_type, p, k, cap, random, seed } => {
            if *k < 2 {
                return Err(Failure::Usage("K must be at least 2".into()));
            }
            let cb = basis(*cartan_type);
            let gens = match random {
                Some(n) => random_generator_set(&cb, *p, *k, *n, &mut ChaCha8Rng::seed_from_u64(*seed))?,
                None => chevalley_generators(&cb, *p, *k)?,
            };
            let group = enumerate_subgroup(&gens, *cap)?;
            let sim = simulate_filtration(&cb, &group)?;
            let failure = sim
                .containments
                .iter()
                .find(|c| !c.2)
                .map(|(l, m, _)| Failure::Invariant(format!("[Φ_{l}, Φ_{m}] is not contained in Φ_{}", l + m)));
            Ok(Emit { text: json(&sim), failure })
        }
        Command::EffectiveBound { types, ceiling } => Ok(Emit::ok(json(&effective_bound(types, *ceiling)?))),
        Command::Density { r } => {
            let (point, cumulative) = irregularity_density_estimate(*r);
            Ok(Emit::ok(format!("point {point:.4}\ncumulative_lower {cumulative:.4}\n")))
        }
    }
}

fn write_out(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = run(&cli).and_then(|emit| {
        write_out(&cli, &emit.text)?;
        emit.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            eprintln!("verdict: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(3)
        }
    }
}
