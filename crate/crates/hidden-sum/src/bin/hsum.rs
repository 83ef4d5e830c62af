//! Command-line front end.  Every subcommand is a thin wrapper over the
//! library; see the crate examples for the same operations in code.
//!
//! Output convention: results (reports, tables, blocks, product files) go
//! to stdout so they can be redirected as-is; exactly one machine-readable
//! `#SUMMARY key=value ...` line goes to stderr.  `serve` prints
//! `LISTENING <addr>` on stdout once the socket is bound.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use hidden_sum::attack::{
    cost_report, recover_affine, AttackOptions, AttackVariant, LocalOracle, DEFAULT_QUERY_BUDGET,
};
use hidden_sum::diff::{
    ddt, delta_uniformity, fact1_scan, parallel_map, search_permutation_with_delta,
    verify_theorem_bound, GroupOp, PermutationTable, ScanMode,
};
use hidden_sum::error::{Error, Result};
use hidden_sum::gf2::BitVector;
use hidden_sum::oracle::{serve, OracleClient, ServerConfig};
use hidden_sum::ring::{enumerate_products, CoordinateTable, EnumerationMode, RingProduct};
use hidden_sum::toy::{
    block_from_hex, block_to_hex, convention_search, substitute_sbox_search, trapdoor_check,
    FieldConvention, SessionKey, ToyCipherSpec, DEFAULT_ROUNDS,
};

#[derive(Parser)]
#[command(
    name = "hsum",
    version,
    about = "workbench for hidden sums, differential uniformity and the trapdoored toy cipher"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hidden-sum products: enumerate, inspect, construct.
    #[command(subcommand)]
    Hs(HsCmd),
    /// Difference distribution tables and structural scans.
    #[command(subcommand)]
    Diff(DiffCmd),
    /// The trapdoored toy cipher.
    #[command(subcommand)]
    Toy(ToyCmd),
    /// Run the trapdoor attack against a local or remote oracle.
    #[command(subcommand)]
    Attack(AttackCmd),
    /// Serve an encryption oracle over TCP.
    Serve(ServeArgs),
}

// ---------------------------------------------------------------------------
// hs
// ---------------------------------------------------------------------------

/// Scan strategy shared by the enumeration and verification commands.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand)]
enum HsCmd {
    /// List valid products at a width (product file format, blank-line
    /// separated).
    Enumerate {
        #[arg(long)]
        width: u8,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Seed for sampled mode (mandatory there, so runs are replayable).
        #[arg(long, required_if_eq("mode", "sampled"))]
        seed: Option<u64>,
        /// Number of draws in sampled mode.
        #[arg(long, default_value_t = 5)]
        limit: usize,
        /// Allow exhaustive walks beyond width 4 (slow).
        #[arg(long)]
        force: bool,
    },
    /// Validate a product file and describe its structure.
    Validate {
        #[arg(long)]
        product: PathBuf,
    },
    /// Dimension and basis of U = {a : x circ a = x + a for all x}.
    #[command(name = "u-space")]
    USpace {
        #[arg(long)]
        product: PathBuf,
    },
    /// Individual coordinates of the hidden sum (x as a combination of a
    /// basis under circ).
    Coords {
        #[arg(long)]
        product: PathBuf,
    },
    /// Print the exterior-algebra product on k generators (width 2^k - 1).
    Exterior {
        #[arg(long)]
        generators: u8,
    },
}

fn run_hs(cmd: HsCmd) -> Result<()> {
    match cmd {
        HsCmd::Enumerate { width, mode, seed, limit, force } => {
            let mode = match mode {
                ModeArg::Sampled => {
                    EnumerationMode::Sampled { seed: seed.expect("clap requires --seed"), limit }
                }
                ModeArg::Exhaustive => EnumerationMode::Exhaustive { force },
            };
            let tag = match mode {
                EnumerationMode::Sampled { .. } => "sampled",
                EnumerationMode::Exhaustive { .. } => "exhaustive",
            };
            let mut count = 0u64;
            for product in enumerate_products(width, mode)? {
                println!("{product}");
                count += 1;
            }
            eprintln!("#SUMMARY command=hs.enumerate width={width} mode={tag} count={count}");
        }
        HsCmd::Validate { product } => {
            let product = load_product(&product)?;
            let width = product.width();
            println!("valid product, width {width}");
            for (i, j, v) in product.entries() {
                println!("  e{} * e{} = {v}", i + 1, j + 1);
            }
            let u = product.u_space();
            println!("dim U = {} (basis: {})", u.len(), join_vectors(&u));
            let min_ann = BitVector::all(width)
                .filter(|a| !a.is_zero())
                .map(|a| 1u64 << product.annihilator(a).len())
                .min()
                .expect("width >= 1");
            println!("min |Ann(a)| over a != 0 = {min_ann}");
            // The check tabulates the full operation; skip it where the
            // table would be gigabytes.
            let std_translations = if width <= 10 {
                product.contains_std_translations().to_string()
            } else {
                "skipped".to_string()
            };
            println!("standard translations affine over the product: {std_translations}");
            eprintln!(
                "#SUMMARY command=hs.validate width={width} dim_u={} min_ann={min_ann} std_translations={std_translations}",
                u.len()
            );
        }
        HsCmd::USpace { product } => {
            let product = load_product(&product)?;
            let u = product.u_space();
            println!("dim U = {}", u.len());
            for v in &u {
                println!("  {v}");
            }
            eprintln!(
                "#SUMMARY command=hs.u-space width={} dim_u={} basis={}",
                product.width(),
                u.len(),
                if u.is_empty() { "-".to_string() } else { join_vectors(&u).replace(", ", ",") }
            );
        }
        HsCmd::Coords { product } => {
            let product = load_product(&product)?;
            let (table, basis_tag) = match CoordinateTable::standard(&product) {
                Ok(table) => (table, "standard"),
                // The standard basis need not be one for circ; fall back to
                // a greedily grown basis and say so.
                Err(Error::NotABasis) => (CoordinateTable::auto(&product), "auto"),
                Err(e) => return Err(e),
            };
            println!("basis ({basis_tag}): {}", join_vectors(table.basis()));
            for x in BitVector::all(product.width()) {
                println!("  {x} -> {}", table.coordinates(x));
            }
            eprintln!(
                "#SUMMARY command=hs.coords width={} basis={basis_tag}",
                product.width()
            );
        }
        HsCmd::Exterior { generators } => {
            if !(1..=4).contains(&generators) {
                return Err(Error::Invalid(format!(
                    "exterior algebra supports 1..=4 generators, got {generators}"
                )));
            }
            let product = RingProduct::exterior_algebra(generators);
            println!("{product}");
            eprintln!(
                "#SUMMARY command=hs.exterior generators={generators} width={}",
                product.width()
            );
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum DiffCmd {
    /// Difference distribution table of a permutation (CSV rows).
    Ddt(DdtArgs),
    /// Differential uniformity only.
    Delta(DdtArgs),
    /// Check the lower bound on maps affine over a hidden sum.
    #[command(name = "verify-bounds")]
    VerifyBounds {
        #[arg(long)]
        product: PathBuf,
        /// Sampling is mandatory beyond width 4.
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Seed for sampled mode (mandatory there, so runs are replayable).
        #[arg(long, required_if_eq("mode", "sampled"))]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
    },
    /// Two-sweep minimum-delta scan at widths 3..=5.
    Fact1 {
        /// Width of the scanned maps.
        #[arg(long)]
        n: u8,
        /// Exhaustive is immediate at n=3; n=4 needs --long; n=5 refuses.
        #[arg(long, value_enum, default_value = "sampled")]
        mode: ModeArg,
        /// Seed for sampled mode (mandatory there, so runs are replayable).
        #[arg(long, required_if_eq("mode", "sampled"))]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        /// Opt in to the long-running n=4 exhaustive walk (hours of CPU).
        #[arg(long)]
        long: bool,
    },
    /// Differential uniformity of the parallel composition f x g.
    Parallel {
        #[arg(long)]
        perm: PathBuf,
        /// Second factor; defaults to the first.
        #[arg(long)]
        with: Option<PathBuf>,
        /// Also print the composed permutation table.
        #[arg(long)]
        table: bool,
    },
    /// Search for a permutation with a given differential uniformity.
    Search {
        #[arg(long)]
        width: u8,
        #[arg(long, default_value_t = 4)]
        target: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        tries: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OpArg {
    /// Bitwise XOR, the standard sum.
    Plus,
    /// The hidden sum of the product supplied via --product.
    Circ,
}

#[derive(Args)]
struct DdtArgs {
    #[arg(long)]
    perm: PathBuf,
    /// Which operation to take differences with.
    #[arg(long, value_enum, default_value = "plus")]
    op: OpArg,
    /// Product file defining the hidden sum (mandatory with --op circ).
    #[arg(long, required_if_eq("op", "circ"))]
    product: Option<PathBuf>,
}

fn run_diff(cmd: DiffCmd) -> Result<()> {
    match cmd {
        DiffCmd::Ddt(args) => {
            let f = load_perm(&args.perm)?;
            let op = load_op(f.width(), args.op, args.product.as_deref())?;
            let table = ddt(&f, &op);
            eprintln!("ddt of {} (width {}) wrt {}:", args.perm.display(), f.width(), op.tag());
            print!("{}", table.to_csv());
            eprintln!(
                "#SUMMARY command=diff.ddt width={} op={} delta={}",
                f.width(),
                op.tag(),
                table.max_nontrivial()
            );
        }
        DiffCmd::Delta(args) => {
            let f = load_perm(&args.perm)?;
            let op = load_op(f.width(), args.op, args.product.as_deref())?;
            let delta = delta_uniformity(&f, &op);
            println!("{delta}");
            eprintln!(
                "#SUMMARY command=diff.delta width={} op={} delta={delta}",
                f.width(),
                op.tag()
            );
        }
        DiffCmd::VerifyBounds { product, mode, seed, budget } => {
            let product = load_product(&product)?;
            let mode = scan_mode(mode, seed, budget);
            let report = verify_theorem_bound(&product, mode)?;
            println!("{report}");
            eprintln!(
                "#SUMMARY command=diff.verify-bounds width={} dim_u={} bound={} mode={} scanned={} min_delta={} ok=true",
                report.width, report.dim_u, report.bound, report.mode, report.scanned,
                report.min_delta
            );
        }
        DiffCmd::Fact1 { n, mode, seed, budget, long } => {
            if n == 4 && mode == ModeArg::Exhaustive && !long {
                return Err(Error::Invalid(
                    "the n=4 exhaustive walk covers 36M+ pairs; pass --long to opt in, \
                     or use --mode sampled"
                        .to_string(),
                ));
            }
            let mode = scan_mode(mode, seed, budget);
            let report = fact1_scan(n, mode)?;
            println!("{report}");
            // fact1_scan errors out on any violation, so reaching this
            // point means a clean scan.
            println!("OK 0 violations");
            eprintln!(
                "#SUMMARY command=diff.fact1 n={n} mode={} pairs_a={} pairs_b={} min_delta={} bound={} violations=0",
                report.mode,
                report.sweep_a.pairs,
                report.sweep_b.pairs,
                report.min_delta(),
                1u32 << (n - 1)
            );
        }
        DiffCmd::Parallel { perm, with, table } => {
            let f = load_perm(&perm)?;
            let g = match with {
                Some(path) => load_perm(&path)?,
                None => f.clone(),
            };
            let h = parallel_map(&f, &g);
            let delta = delta_uniformity(&h, &GroupOp::plus(h.width()));
            if table {
                print!("{h}");
            }
            println!("parallel composition: width {}, delta {delta}", h.width());
            eprintln!("#SUMMARY command=diff.parallel width={} delta={delta}", h.width());
        }
        DiffCmd::Search { width, target, seed, tries } => {
            let f = search_permutation_with_delta(width, target, seed, tries)?;
            print!("{f}");
            eprintln!("#SUMMARY command=diff.search width={width} target={target} found=true");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// toy
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum ToyCmd {
    /// Try all twelve conventions; report trapdoor verdicts.
    #[command(name = "convention-search")]
    ConventionSearch {
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: u32,
    },
    /// Check a cipher spec against the designed hidden sum.
    CheckTrapdoor {
        /// Cipher spec file; defaults to the standard instance.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Encrypt one block.
    Encrypt(CryptArgs),
    /// Decrypt one block.
    Decrypt(CryptArgs),
    /// Generate a session key.
    Keygen {
        /// Seed for reproducible keys; omit for an OS-random key.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the cipher spec file.
    WriteSpec {
        #[arg(long, default_value_t = DEFAULT_ROUNDS)]
        rounds: u32,
        /// Convention id; defaults to the standard one.
        #[arg(long)]
        convention: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan all 3-bit S-boxes for trapdoor-preserving substitutes.
    SearchSboxes {
        /// How many survivors to list.
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
}

#[derive(Args)]
struct CryptArgs {
    /// Session key, two hex digits.
    #[arg(long)]
    key: String,
    /// Input block, two hex digits.
    #[arg(long = "in")]
    input: String,
    /// Cipher spec file; defaults to the standard instance.
    #[arg(long)]
    spec: Option<PathBuf>,
}

fn run_toy(cmd: ToyCmd) -> Result<()> {
    match cmd {
        ToyCmd::ConventionSearch { rounds } => {
            let report = convention_search(rounds);
            println!("{report}");
            let passing = report.rows.iter().filter(|r| r.report.passes()).count();
            eprintln!(
                "#SUMMARY command=toy.convention-search passing={passing} chosen={}",
                report.chosen.as_deref().unwrap_or("none")
            );
        }
        ToyCmd::CheckTrapdoor { spec } => {
            let spec = load_spec(spec.as_deref())?;
            let report = trapdoor_check(&spec);
            println!("{report}");
            eprintln!(
                "#SUMMARY command=toy.check-trapdoor convention={} passes={}",
                spec.convention_id(),
                report.passes()
            );
        }
        ToyCmd::Encrypt(args) => run_crypt(args, true)?,
        ToyCmd::Decrypt(args) => run_crypt(args, false)?,
        ToyCmd::Keygen { seed } => {
            let key = match seed {
                Some(seed) => SessionKey::random(&mut ChaCha12Rng::seed_from_u64(seed)),
                None => SessionKey::random(&mut rand::thread_rng()),
            };
            println!("{key}");
            eprintln!("#SUMMARY command=toy.keygen key={key}");
        }
        ToyCmd::WriteSpec { rounds, convention, out } => {
            let spec = match convention {
                Some(id) => {
                    ToyCipherSpec::with_convention(&FieldConvention::parse(&id)?, rounds)?
                }
                None => {
                    let standard = ToyCipherSpec::standard();
                    let convention = FieldConvention::parse(standard.convention_id())?;
                    ToyCipherSpec::with_convention(&convention, rounds)?
                }
            };
            match &out {
                Some(path) => fs::write(path, spec.to_string())?,
                None => print!("{spec}"),
            }
            eprintln!(
                "#SUMMARY command=toy.write-spec convention={} rounds={rounds}",
                spec.convention_id()
            );
        }
        ToyCmd::SearchSboxes { limit } => {
            let report = substitute_sbox_search(limit);
            println!("{report}");
            eprintln!(
                "#SUMMARY command=toy.search-sboxes scanned={} delta4={} trapdoor={}",
                report.scanned, report.delta4, report.trapdoor
            );
        }
    }
    Ok(())
}

fn run_crypt(args: CryptArgs, encrypt: bool) -> Result<()> {
    let spec = load_spec(args.spec.as_deref())?;
    let key = SessionKey::from_hex(&args.key)?;
    let block = block_from_hex(&args.input)?;
    let (direction, result) = if encrypt {
        ("enc", spec.encrypt(block, &key))
    } else {
        ("dec", spec.decrypt(block, &key))
    };
    println!("{}", block_to_hex(result));
    eprintln!(
        "#SUMMARY command=toy.{direction} block={} result={}",
        block_to_hex(block),
        block_to_hex(result)
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

#[derive(Subcommand)]
enum AttackCmd {
    /// Recover the affine description of an oracle through the trapdoor.
    Run(AttackArgs),
}

#[derive(Args)]
struct AttackArgs {
    /// Attack an in-process oracle under this key (two hex digits).
    #[arg(long, conflicts_with = "target", required_unless_present = "target")]
    local_key: Option<String>,
    /// Attack a remote oracle, e.g. tcp://127.0.0.1:4000.
    #[arg(long)]
    target: Option<String>,
    /// 1 = encryptions only; 2 = encryptions and decryptions.
    #[arg(long, default_value = "1")]
    variant: AttackVariant,
    /// Spend extra queries to spot-check the recovered map.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 4)]
    spot_points: u16,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cipher spec for the local oracle; defaults to the standard instance.
    #[arg(long)]
    spec: Option<PathBuf>,
}

fn run_attack(cmd: AttackCmd) -> Result<()> {
    let AttackCmd::Run(args) = cmd;
    let options =
        AttackOptions { strict: args.strict, spot_points: args.spot_points, seed: args.seed };
    let (transcript, target) = match (&args.local_key, &args.target) {
        (Some(key), None) => {
            let spec = load_spec(args.spec.as_deref())?;
            let key = SessionKey::from_hex(key)?;
            let mut oracle = LocalOracle::new(spec, key);
            (recover_affine(&mut oracle, args.variant, &options)?, "local".to_string())
        }
        (None, Some(addr)) => {
            let addr = addr.strip_prefix("tcp://").unwrap_or(addr);
            let mut oracle = OracleClient::connect(addr)?;
            let transcript = recover_affine(&mut oracle, args.variant, &options)?;
            oracle.quit()?;
            (transcript, "remote".to_string())
        }
        _ => unreachable!("clap enforces exactly one of --local-key/--target"),
    };
    println!("{transcript}");
    let report = cost_report(&transcript);
    println!("{report}");
    eprintln!(
        "#SUMMARY command=attack.run variant={} target={target} enc={} dec={} success={}",
        report.variant, report.queries_enc, report.queries_dec, report.succeeded
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// serve
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ServeArgs {
    /// Address to bind, e.g. 127.0.0.1:0 for an ephemeral port.
    #[arg(long, default_value = "127.0.0.1:0")]
    listen: String,
    /// Session key, two hex digits.
    #[arg(long)]
    key: String,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    rounds: u32,
    #[arg(long, default_value_t = DEFAULT_QUERY_BUDGET)]
    enc_budget: u64,
    #[arg(long, default_value_t = DEFAULT_QUERY_BUDGET)]
    dec_budget: u64,
    /// Cipher spec file; defaults to the standard instance at --rounds.
    #[arg(long)]
    spec: Option<PathBuf>,
}

fn run_serve(args: ServeArgs) -> Result<()> {
    let spec = match &args.spec {
        Some(path) => load_spec(Some(path))?,
        None => {
            let standard = ToyCipherSpec::standard();
            let convention = FieldConvention::parse(standard.convention_id())?;
            ToyCipherSpec::with_convention(&convention, args.rounds)?
        }
    };
    let key = SessionKey::from_hex(&args.key)?;
    let config = ServerConfig {
        spec,
        key,
        enc_budget: args.enc_budget,
        dec_budget: args.dec_budget,
    };
    let handle = serve(config, args.listen.as_str())?;
    println!("LISTENING {}", handle.local_addr());
    io::stdout().flush()?;
    // Serve until killed.
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

fn load_product(path: &std::path::Path) -> Result<RingProduct> {
    fs::read_to_string(path)?.parse()
}

fn load_perm(path: &std::path::Path) -> Result<PermutationTable> {
    fs::read_to_string(path)?.parse()
}

fn load_spec(path: Option<&std::path::Path>) -> Result<ToyCipherSpec> {
    match path {
        Some(path) => fs::read_to_string(path)?.parse(),
        None => Ok(ToyCipherSpec::standard()),
    }
}

fn load_op(width: u8, op: OpArg, product: Option<&std::path::Path>) -> Result<GroupOp> {
    match op {
        OpArg::Plus => Ok(GroupOp::plus(width)),
        OpArg::Circ => {
            let path = product.expect("clap requires --product with --op circ");
            let product = load_product(path)?;
            if product.width() != width {
                return Err(Error::Invalid(format!(
                    "product width {} does not match permutation width {width}",
                    product.width()
                )));
            }
            Ok(GroupOp::circ(product))
        }
    }
}

fn scan_mode(mode: ModeArg, seed: Option<u64>, budget: u64) -> ScanMode {
    match mode {
        ModeArg::Exhaustive => ScanMode::Exhaustive,
        ModeArg::Sampled => {
            ScanMode::Sampled { seed: seed.expect("clap requires --seed"), budget }
        }
    }
}

fn join_vectors(vs: &[BitVector]) -> String {
    if vs.is_empty() {
        return "-".to_string();
    }
    vs.iter().map(BitVector::to_string).collect::<Vec<_>>().join(", ")
}

/// Restore the default SIGPIPE disposition so piping into `head` ends the
/// process quietly instead of panicking on a closed stdout.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Hs(cmd) => run_hs(cmd),
        Command::Diff(cmd) => run_diff(cmd),
        Command::Toy(cmd) => run_toy(cmd),
        Command::Attack(cmd) => run_attack(cmd),
        Command::Serve(args) => run_serve(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
