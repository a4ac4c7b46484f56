//! Command-line front end: dealer setup, share files, recovery, refresh and
//! verification for the hash scheme, plus drivers for the polynomial
//! baseline and the herding demos.
//!
//! Exit codes: 0 success; 1 failed verification or failed search; 2 invalid
//! structure or usage; 3 bad secret length; 4 I/O failure; 5 unauthorized
//! subset; 6 version mismatch; 7 malformed files; 8 commitments absent.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use herdshare::access::{
    AccessStructureBasis, CompartmentSpec, HierarchicalMode, HierarchicalSpec, Subset,
};
use herdshare::herding::{
    build_diamond, build_multicollision, find_collision, herd_prefix, TruncatedIterativeHash,
};
use herdshare::hss::{
    commit_shares, recover, reduce_to_basis, refresh, setup, verify_share, HashAlgorithm,
    HashSpec, HssError, PublicControlArea, SecretSource, Share,
};
use herdshare::shamir::{
    apply_renewal, feldman_commit, feldman_verify, proactive_renew, shamir_recover, shamir_split,
    FeldmanParams, PrimeField, ShamirPolynomial, ShamirShare,
};
use herdshare::storage::{new_scheme_id, ControlAreaFile, ShareFile};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_INVALID_STRUCTURE: u8 = 2;
const EXIT_BAD_SECRET: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_UNAUTHORIZED: u8 = 5;
const EXIT_VERSION_MISMATCH: u8 = 6;
const EXIT_MALFORMED: u8 = 7;
const EXIT_NO_COMMITMENTS: u8 = 8;

#[derive(Parser)]
#[command(
    name = "herdshare",
    version,
    about = "Hash-based secret sharing with a public control area",
    after_help = "Share and secret buffers are zeroized after use (best effort)."
)]
struct Cli {
    /// Emit machine-readable JSON instead of the human summary.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for deterministic runs; omit to use system entropy.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Hash function backing the scheme.
    #[arg(long, global = true, value_enum, default_value_t = HashChoice::Sha256)]
    hash: HashChoice,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum HashChoice {
    #[value(name = "sha-256")]
    Sha256,
    #[value(name = "sha-512")]
    Sha512,
}

impl HashChoice {
    fn algorithm(self) -> HashAlgorithm {
        match self {
            HashChoice::Sha256 => HashAlgorithm::Sha256,
            HashChoice::Sha512 => HashAlgorithm::Sha512,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Deal shares and write the public control area.
    Setup(SetupArgs),
    /// Recover the secret from share files and the control area.
    Recover(RecoverArgs),
    /// Re-deal fresh shares around the unchanged secret.
    Refresh(RefreshArgs),
    /// Check one share file against its published commitment.
    Verify(VerifyArgs),
    /// Polynomial baseline: Shamir split/recover, renewal, Feldman.
    Baseline {
        #[command(subcommand)]
        command: BaselineCommand,
    },
    /// Truncated-hash demos: collisions, multicollisions, diamonds, herding.
    Demo {
        #[command(subcommand)]
        command: DemoCommand,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("structure")
    .required(true)
    .args(["threshold", "hierarchical", "compartment", "basis_file"]))]
struct SetupArgs {
    /// Threshold structure as "t+1,n", e.g. "2,3".
    #[arg(long)]
    threshold: Option<String>,

    /// Hierarchical levels as "1,2|3,4|5,6" (requires --k).
    #[arg(long)]
    hierarchical: Option<String>,

    /// Strictly increasing level thresholds, e.g. "1,2,3".
    #[arg(long)]
    k: Option<String>,

    /// Satisfy any one cumulative level threshold instead of all of them.
    #[arg(long)]
    disjunctive: bool,

    /// Compartments as "1,2|3,4|5,6" (requires --ti and --t).
    #[arg(long)]
    compartment: Option<String>,

    /// Per-compartment thresholds, e.g. "1,1,1".
    #[arg(long)]
    ti: Option<String>,

    /// Overall threshold across all compartments.
    #[arg(long)]
    t: Option<u16>,

    /// JSON file holding an explicit basis: an array of arrays of indices.
    #[arg(long)]
    basis_file: Option<PathBuf>,

    /// Participant count for --basis-file; defaults to the largest index.
    #[arg(long)]
    n: Option<u16>,

    /// Truncate the digest to this many bits (demo-scale schemes only).
    #[arg(long)]
    truncate_bits: Option<u32>,

    /// Fixed secret as lowercase hex of exactly digest length.
    #[arg(long, conflicts_with = "secret_passphrase")]
    secret_hex: Option<String>,

    /// Fixed secret derived by hashing this passphrase to digest length.
    #[arg(long)]
    secret_passphrase: Option<String>,

    /// Skip publishing share commitments.
    #[arg(long)]
    no_commitments: bool,

    /// Print the dealt secret to standard output.
    #[arg(long)]
    print_secret: bool,

    /// Directory for the control area and share files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RecoverArgs {
    /// Path to the public control area file.
    #[arg(long)]
    control_area: PathBuf,

    /// Write the secret to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Share files of the recovering participants.
    #[arg(required = true)]
    shares: Vec<PathBuf>,
}

#[derive(Args)]
struct RefreshArgs {
    /// Path to the public control area file (rewritten atomically).
    #[arg(long)]
    control_area: PathBuf,

    /// Directory for the fresh share files; defaults to the control area's.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Share files of an authorized recovering subset.
    #[arg(required = true)]
    shares: Vec<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to the public control area file.
    #[arg(long)]
    control_area: PathBuf,

    /// Share file to verify.
    share: PathBuf,
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Split a secret into n Shamir shares with threshold t+1.
    Split {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: u16,
        #[arg(long)]
        n: u16,
        #[arg(long)]
        secret: u64,
    },
    /// Interpolate a secret from shares given as "x,y" pairs.
    Recover {
        #[arg(long)]
        q: u64,
        #[arg(long = "share", required = true)]
        shares: Vec<String>,
    },
    /// Renew shares without changing the secret.
    Renew {
        #[arg(long)]
        q: u64,
        /// Dealer polynomial coefficients, constant term first.
        #[arg(long)]
        coeffs: String,
        #[arg(long)]
        n: u16,
    },
    /// Publish Feldman commitments for a polynomial.
    Commit {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        coeffs: String,
    },
    /// Verify one share against Feldman commitments.
    Verify {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        g: u64,
        #[arg(long)]
        commitments: String,
        /// Share as "x,y".
        #[arg(long)]
        share: String,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Birthday-search one compression collision.
    Collide {
        #[arg(long, default_value_t = 16)]
        u: u32,
        /// Chaining value to collide from; defaults to the IV.
        #[arg(long)]
        chain_in: Option<u32>,
    },
    /// Chain b collisions into 2^b equal-hash messages.
    Multicollision {
        #[arg(long, default_value_t = 16)]
        u: u32,
        #[arg(long, default_value_t = 3)]
        b: u32,
    },
    /// Build a w-wide diamond committed to one final hash.
    Diamond {
        #[arg(long, default_value_t = 16)]
        u: u32,
        #[arg(long, default_value_t = 4)]
        w: usize,
    },
    /// Build a diamond, then herd a prefix to its committed hash.
    Herd {
        #[arg(long, default_value_t = 16)]
        u: u32,
        #[arg(long, default_value_t = 4)]
        w: usize,
        /// File whose bytes form the prefix.
        #[arg(long)]
        prefix_file: PathBuf,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(context: &str, err: std::io::Error) -> CliError {
    CliError::new(EXIT_IO, format!("{context}: {err}"))
}

fn structure_err(message: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_INVALID_STRUCTURE, format!("invalid structure: {message}"))
}

fn malformed_err(path: &Path, message: impl std::fmt::Display) -> CliError {
    CliError::new(
        EXIT_MALFORMED,
        format!("{}: {message}", path.display()),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rng = match cli.seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_os_rng(),
    };
    let result = match &cli.command {
        Command::Setup(args) => cmd_setup(&cli, args, &mut rng),
        Command::Recover(args) => cmd_recover(&cli, args),
        Command::Refresh(args) => cmd_refresh(&cli, args, &mut rng),
        Command::Verify(args) => cmd_verify(&cli, args),
        Command::Baseline { command } => cmd_baseline(&cli, command, &mut rng),
        Command::Demo { command } => cmd_demo(&cli, command, &mut rng),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

// ---------------------------------------------------------------------------
// argument parsing helpers

fn parse_u16_list(text: &str, what: &str) -> CliResult<Vec<u16>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u16>()
                .map_err(|_| structure_err(format!("bad {what} entry {part:?}")))
        })
        .collect()
}

fn parse_u64_list(text: &str, what: &str) -> CliResult<Vec<u64>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| structure_err(format!("bad {what} entry {part:?}")))
        })
        .collect()
}

fn parse_partition(text: &str, what: &str) -> CliResult<Vec<Vec<u16>>> {
    text.split('|')
        .map(|group| {
            if group.trim().is_empty() {
                Ok(Vec::new())
            } else {
                parse_u16_list(group, what)
            }
        })
        .collect()
}

fn parse_share_pair(text: &str) -> CliResult<ShamirShare> {
    let parts = parse_u64_list(text, "share")?;
    if parts.len() != 2 {
        return Err(structure_err(format!("share {text:?} must be \"x,y\"")));
    }
    Ok(ShamirShare {
        x: parts[0],
        y: parts[1],
    })
}

fn build_basis(args: &SetupArgs) -> CliResult<(AccessStructureBasis, Vec<String>)> {
    let mut warnings = Vec::new();
    let basis = if let Some(spec) = &args.threshold {
        let parts = parse_u16_list(spec, "threshold")?;
        if parts.len() != 2 {
            return Err(structure_err("--threshold takes \"t+1,n\""));
        }
        AccessStructureBasis::threshold(parts[0], parts[1]).map_err(structure_err)?
    } else if let Some(levels) = &args.hierarchical {
        let levels = parse_partition(levels, "level")?;
        let k = args
            .k
            .as_deref()
            .ok_or_else(|| structure_err("--hierarchical requires --k"))?;
        let thresholds = parse_u16_list(k, "threshold")?;
        let n = levels.iter().flatten().copied().max().unwrap_or(0);
        let mode = if args.disjunctive {
            HierarchicalMode::Disjunctive
        } else {
            HierarchicalMode::Conjunctive
        };
        let spec = HierarchicalSpec::new(n, levels, thresholds, mode).map_err(structure_err)?;
        warnings.extend(spec.warnings());
        AccessStructureBasis::hierarchical(&spec).map_err(structure_err)?
    } else if let Some(compartments) = &args.compartment {
        let compartments = parse_partition(compartments, "compartment")?;
        let ti = args
            .ti
            .as_deref()
            .ok_or_else(|| structure_err("--compartment requires --ti"))?;
        let per = parse_u16_list(ti, "compartment threshold")?;
        let overall = args
            .t
            .ok_or_else(|| structure_err("--compartment requires --t"))?;
        let n = compartments.iter().flatten().copied().max().unwrap_or(0);
        let spec = CompartmentSpec::new(n, compartments, per, overall).map_err(structure_err)?;
        AccessStructureBasis::compartment(&spec).map_err(structure_err)?
    } else if let Some(path) = &args.basis_file {
        let text = fs::read_to_string(path).map_err(|e| io_err("reading basis file", e))?;
        let rows: Vec<Vec<u16>> =
            serde_json::from_str(&text).map_err(|e| structure_err(format!("basis file: {e}")))?;
        let subsets = rows
            .into_iter()
            .map(Subset::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(structure_err)?;
        let n = args.n.unwrap_or_else(|| {
            subsets.iter().map(|s| s.max_id()).max().unwrap_or(0)
        });
        AccessStructureBasis::new(n, subsets).map_err(structure_err)?
    } else {
        unreachable!("clap group requires one structure argument");
    };
    Ok((basis, warnings))
}

// ---------------------------------------------------------------------------
// scheme commands

fn cmd_setup(cli: &Cli, args: &SetupArgs, rng: &mut ChaCha20Rng) -> CliResult<()> {
    let (basis, warnings) = build_basis(args)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }

    let hash = match args.truncate_bits {
        Some(bits) => HashSpec::truncated(cli.hash.algorithm(), bits).map_err(structure_err)?,
        None => HashSpec::new(cli.hash.algorithm()),
    };

    let secret_bytes: Option<Vec<u8>> = if let Some(hex_secret) = &args.secret_hex {
        Some(hex::decode(hex_secret).map_err(|e| {
            CliError::new(EXIT_BAD_SECRET, format!("bad --secret-hex: {e}"))
        })?)
    } else {
        args.secret_passphrase
            .as_ref()
            .map(|phrase| hash.digest(phrase.as_bytes()))
    };

    let out = setup(&basis, &hash, secret_bytes.as_deref(), rng).map_err(|e| match e {
        HssError::BadSecretLength { .. } => CliError::new(EXIT_BAD_SECRET, e.to_string()),
        other => structure_err(other),
    })?;
    let mut public = out.public().clone();
    if !args.no_commitments {
        let map = commit_shares(out.shares(), &hash).map_err(structure_err)?;
        public.attach_commitments(map).map_err(structure_err)?;
    }

    if out.secret_source() == SecretSource::DerivedFromFirstSubset {
        let first = basis.minimal_subsets()[0].clone();
        eprintln!(
            "warning: no fixed secret supplied; the secret is the digest of subset {first} \
             and that subset's control value is all zeros"
        );
    }

    let scheme_id = new_scheme_id(rng);
    fs::create_dir_all(&args.out_dir).map_err(|e| io_err("creating output directory", e))?;
    let ca_path = args.out_dir.join("control_area.json");
    let ca_file = ControlAreaFile::from_public(&public, &scheme_id);
    write_atomic(&ca_path, ca_file.emit().as_bytes())?;
    let mut share_paths = Vec::new();
    for share in out.shares() {
        let path = args
            .out_dir
            .join(format!("share_{}.json", share.participant()));
        let file = ShareFile::from_share(share, public.version(), &scheme_id);
        write_atomic(&path, file.emit().as_bytes())?;
        share_paths.push(path);
    }

    if cli.json {
        let mut report = json!({
            "control_area": ca_path,
            "shares": share_paths,
            "entries": public.basis().len(),
            "version": public.version(),
            "scheme_id": scheme_id,
            "digest_len": public.digest_len(),
            "secret_source": match out.secret_source() {
                SecretSource::Fixed => "fixed",
                SecretSource::DerivedFromFirstSubset => "derived-from-first-subset",
            },
            "warnings": warnings,
        });
        if args.print_secret {
            report["secret"] = json!(out.secret().to_hex());
        }
        println!("{}", serde_json::to_string_pretty(&report).expect("report"));
    } else {
        println!(
            "wrote {} ({} entries, version {})",
            ca_path.display(),
            public.basis().len(),
            public.version()
        );
        for path in &share_paths {
            println!("wrote {}", path.display());
        }
        if args.print_secret {
            println!("secret: {}", out.secret().to_hex());
        }
    }
    Ok(())
}

struct LoadedScheme {
    file: ControlAreaFile,
    public: PublicControlArea,
}

fn load_control_area(path: &Path) -> CliResult<LoadedScheme> {
    let text = fs::read_to_string(path).map_err(|e| io_err("reading control area", e))?;
    let file = ControlAreaFile::parse(&text).map_err(|e| malformed_err(path, e))?;
    let public = file.to_public().map_err(|e| malformed_err(path, e))?;
    Ok(LoadedScheme { file, public })
}

/// Loads share files and gates them against the control area: matching
/// scheme id (exit 7) and matching version (exit 6).
fn load_shares(paths: &[PathBuf], scheme: &LoadedScheme) -> CliResult<Vec<Share>> {
    let mut shares = Vec::with_capacity(paths.len());
    for path in paths {
        let text = fs::read_to_string(path).map_err(|e| io_err("reading share file", e))?;
        let file = ShareFile::parse(&text).map_err(|e| malformed_err(path, e))?;
        if file.scheme_id != scheme.file.scheme_id {
            return Err(malformed_err(
                path,
                format!(
                    "share belongs to scheme {}, control area is scheme {}",
                    file.scheme_id, scheme.file.scheme_id
                ),
            ));
        }
        if file.version != scheme.public.version() {
            return Err(CliError::new(
                EXIT_VERSION_MISMATCH,
                format!(
                    "{}: share version {} does not match control area version {}",
                    path.display(),
                    file.version,
                    scheme.public.version()
                ),
            ));
        }
        if file.participant == 0 || file.participant > scheme.public.n() {
            return Err(malformed_err(
                path,
                format!(
                    "participant {} out of range 1..={}",
                    file.participant,
                    scheme.public.n()
                ),
            ));
        }
        shares.push(
            file.to_share(scheme.public.digest_len())
                .map_err(|e| malformed_err(path, e))?,
        );
    }
    Ok(shares)
}

/// Reduces the supplied shares to an exact minimal authorized subset,
/// reporting the reduction on the diagnostic stream.
fn reduce_shares(
    shares: Vec<Share>,
    public: &PublicControlArea,
) -> CliResult<(Vec<Share>, Subset)> {
    let ids: Vec<u16> = shares.iter().map(|s| s.participant().index()).collect();
    let supplied = Subset::new(ids).map_err(|e| {
        CliError::new(EXIT_MALFORMED, format!("supplied shares: {e}"))
    })?;
    let target = reduce_to_basis(&supplied, public.basis()).map_err(|_| {
        CliError::new(
            EXIT_UNAUTHORIZED,
            format!("subset {supplied} is not authorized"),
        )
    })?;
    if target != supplied {
        eprintln!("note: reduced {supplied} to minimal authorized subset {target}");
    }
    let reduced: Vec<Share> = shares
        .into_iter()
        .filter(|s| target.contains(s.participant()))
        .collect();
    Ok((reduced, target))
}

fn cmd_recover(cli: &Cli, args: &RecoverArgs) -> CliResult<()> {
    let scheme = load_control_area(&args.control_area)?;
    let shares = load_shares(&args.shares, &scheme)?;
    let (shares, subset) = reduce_shares(shares, &scheme.public)?;
    let secret = recover(&shares, &subset, &scheme.public)
        .map_err(|e| CliError::new(EXIT_MALFORMED, e.to_string()))?;
    let hex_secret = secret.to_hex();
    if let Some(path) = &args.out {
        fs::write(path, format!("{hex_secret}\n")).map_err(|e| io_err("writing secret", e))?;
        eprintln!("note: secret written to {}", path.display());
    } else if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "subset": subset.key(),
                "secret": hex_secret,
            }))
            .expect("report")
        );
    } else {
        println!("{hex_secret}");
    }
    Ok(())
}

fn cmd_refresh(cli: &Cli, args: &RefreshArgs, rng: &mut ChaCha20Rng) -> CliResult<()> {
    let scheme = load_control_area(&args.control_area)?;
    let shares = load_shares(&args.shares, &scheme)?;
    let (shares, subset) = reduce_shares(shares, &scheme.public)?;
    let out = refresh(&scheme.public, &shares, &subset, rng)
        .map_err(|e| CliError::new(EXIT_MALFORMED, e.to_string()))?;

    let out_dir = match &args.out_dir {
        Some(dir) => dir.clone(),
        None => args
            .control_area
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    fs::create_dir_all(&out_dir).map_err(|e| io_err("creating output directory", e))?;

    // same scheme id: the version field is what separates generations
    let ca_file = ControlAreaFile::from_public(out.public(), &scheme.file.scheme_id);
    write_atomic(&args.control_area, ca_file.emit().as_bytes())?;
    let mut share_paths = Vec::new();
    for share in out.shares() {
        let path = out_dir.join(format!("share_{}.json", share.participant()));
        let file = ShareFile::from_share(share, out.public().version(), &scheme.file.scheme_id);
        write_atomic(&path, file.emit().as_bytes())?;
        share_paths.push(path);
    }

    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "control_area": args.control_area,
                "shares": share_paths,
                "version": out.public().version(),
            }))
            .expect("report")
        );
    } else {
        println!(
            "refreshed {} to version {}",
            args.control_area.display(),
            out.public().version()
        );
        for path in &share_paths {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> CliResult<()> {
    let scheme = load_control_area(&args.control_area)?;
    if scheme.public.commitments().is_none() {
        return Err(CliError::new(
            EXIT_NO_COMMITMENTS,
            "control area carries no commitments; re-run setup without --no-commitments",
        ));
    }
    let shares = load_shares(std::slice::from_ref(&args.share), &scheme)?;
    let ok = verify_share(&shares[0], &scheme.public)
        .map_err(|e| CliError::new(EXIT_MALFORMED, e.to_string()))?;
    let participant = shares[0].participant();
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "participant": participant.index(),
                "verified": ok,
            }))
            .expect("report")
        );
    }
    if ok {
        if !cli.json {
            println!("share {participant} verifies against its commitment");
        }
        Ok(())
    } else {
        Err(CliError::new(
            EXIT_VERIFY_FAILED,
            format!("share {participant} does NOT match its commitment"),
        ))
    }
}

// ---------------------------------------------------------------------------
// baseline commands

fn shamir_err(err: herdshare::shamir::ShamirError) -> CliError {
    structure_err(err)
}

fn cmd_baseline(
    cli: &Cli,
    command: &BaselineCommand,
    rng: &mut ChaCha20Rng,
) -> CliResult<()> {
    match command {
        BaselineCommand::Split { q, t, n, secret } => {
            let field = PrimeField::new(*q).map_err(shamir_err)?;
            let (poly, shares) = shamir_split(*secret, *t, *n, &field, rng).map_err(shamir_err)?;
            print_pretty(&json!({
                "q": q,
                "t": t,
                "n": n,
                "polynomial": poly.coefficients(),
                "shares": share_pairs(&shares),
            }));
        }
        BaselineCommand::Recover { q, shares } => {
            let field = PrimeField::new(*q).map_err(shamir_err)?;
            let shares = shares
                .iter()
                .map(|s| parse_share_pair(s))
                .collect::<CliResult<Vec<_>>>()?;
            let secret = shamir_recover(&shares, &field).map_err(shamir_err)?;
            if cli.json {
                print_pretty(&json!({ "secret": secret }));
            } else {
                println!("{secret}");
            }
        }
        BaselineCommand::Renew { q, coeffs, n } => {
            let field = PrimeField::new(*q).map_err(shamir_err)?;
            let coefficients = parse_u64_list(coeffs, "coefficient")?;
            let poly =
                ShamirPolynomial::from_coefficients(field, coefficients).map_err(shamir_err)?;
            let (renewed, shares) = proactive_renew(&poly, *n, rng).map_err(shamir_err)?;
            debug_assert_eq!(
                apply_renewal(&poly, &zero_mask(&field, poly.degree_bound()))
                    .map(|p| p.secret()),
                Ok(poly.secret())
            );
            print_pretty(&json!({
                "q": q,
                "polynomial": renewed.coefficients(),
                "shares": share_pairs(&shares),
            }));
        }
        BaselineCommand::Commit { p, q, g, coeffs } => {
            let params = FeldmanParams::new(*p, *q, *g).map_err(shamir_err)?;
            let field = PrimeField::new(*q).map_err(shamir_err)?;
            let coefficients = parse_u64_list(coeffs, "coefficient")?;
            let poly =
                ShamirPolynomial::from_coefficients(field, coefficients).map_err(shamir_err)?;
            let commitments = feldman_commit(&poly, &params).map_err(shamir_err)?;
            print_pretty(&json!({ "commitments": commitments }));
        }
        BaselineCommand::Verify {
            p,
            q,
            g,
            commitments,
            share,
        } => {
            let params = FeldmanParams::new(*p, *q, *g).map_err(shamir_err)?;
            let commitments = parse_u64_list(commitments, "commitment")?;
            let share = parse_share_pair(share)?;
            let ok = feldman_verify(&share, &commitments, &params).map_err(shamir_err)?;
            if cli.json {
                print_pretty(&json!({ "valid": ok }));
            } else {
                println!("{}", if ok { "valid" } else { "invalid" });
            }
            if !ok {
                return Err(CliError::new(
                    EXIT_VERIFY_FAILED,
                    format!("share ({},{}) fails Feldman verification", share.x, share.y),
                ));
            }
        }
    }
    Ok(())
}

fn zero_mask(field: &PrimeField, degree_bound: usize) -> ShamirPolynomial {
    ShamirPolynomial::from_coefficients(*field, vec![0; degree_bound + 1])
        .expect("zero polynomial is valid")
}

fn share_pairs(shares: &[ShamirShare]) -> Vec<[u64; 2]> {
    shares.iter().map(|s| [s.x, s.y]).collect()
}

fn print_pretty(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("report"));
}

// ---------------------------------------------------------------------------
// demo commands

fn demo_hash(cli: &Cli, u: u32) -> CliResult<TruncatedIterativeHash> {
    TruncatedIterativeHash::new(HashSpec::new(cli.hash.algorithm()), u, 0)
        .map_err(structure_err)
}

fn demo_err(err: herdshare::herding::HerdingError) -> CliError {
    match err {
        herdshare::herding::HerdingError::BudgetExceeded { .. } => {
            CliError::new(EXIT_VERIFY_FAILED, err.to_string())
        }
        other => structure_err(other),
    }
}

fn chain_hex(u: u32, value: u32) -> String {
    format!("{:#0width$x}", value, width = (u as usize).div_ceil(4) + 2)
}

fn block_hex(block: u64) -> String {
    format!("{block:#018x}")
}

fn cmd_demo(cli: &Cli, command: &DemoCommand, rng: &mut ChaCha20Rng) -> CliResult<()> {
    match command {
        DemoCommand::Collide { u, chain_in } => {
            let hash = demo_hash(cli, *u)?;
            let start = chain_in.unwrap_or_else(|| hash.iv());
            if u64::from(start) > u64::from(hash.max_value()) {
                return Err(structure_err(format!(
                    "--chain-in {start:#x} does not fit in {u} bits"
                )));
            }
            let (pair, calls) = find_collision(start, &hash, rng).map_err(demo_err)?;
            let verified = pair.verify(&hash);
            let report = json!({
                "u": u,
                "chaining_in": chain_hex(*u, pair.chaining_in),
                "block_a": block_hex(pair.block_a),
                "block_b": block_hex(pair.block_b),
                "chaining_out": chain_hex(*u, pair.chaining_out),
                "compression_calls": calls,
                "verified": verified,
            });
            if cli.json {
                print_pretty(&report);
            } else {
                println!(
                    "collision from {}: blocks {} and {} both reach {}",
                    chain_hex(*u, pair.chaining_in),
                    block_hex(pair.block_a),
                    block_hex(pair.block_b),
                    chain_hex(*u, pair.chaining_out)
                );
                println!("compression calls: {calls}");
                println!("re-verified by direct evaluation: {}", yes_no(verified));
            }
        }
        DemoCommand::Multicollision { u, b } => {
            let hash = demo_hash(cli, *u)?;
            let multi = build_multicollision(*b, &hash, rng).map_err(demo_err)?;
            let verified = multi
                .enumerate()
                .all(|m| hash.hash_blocks(&m) == multi.final_hash());
            // full listings stay readable only for small b
            let listed: Option<Vec<Vec<String>>> = (*b <= 10).then(|| {
                multi
                    .enumerate()
                    .map(|m| m.iter().map(|block| block_hex(*block)).collect())
                    .collect()
            });
            let mut report = json!({
                "u": u,
                "b": b,
                "message_count": multi.message_count(),
                "final_hash": chain_hex(*u, multi.final_hash()),
                "compression_calls": multi.compression_calls(),
                "verified": verified,
            });
            if let Some(messages) = &listed {
                report["messages"] = json!(messages);
            }
            if cli.json {
                print_pretty(&report);
            } else {
                println!(
                    "{} colliding messages, all hashing to {}",
                    multi.message_count(),
                    chain_hex(*u, multi.final_hash())
                );
                if let Some(messages) = &listed {
                    for (i, blocks) in messages.iter().enumerate() {
                        println!("  message {i}: {}", blocks.join(" "));
                    }
                }
                println!("compression calls: {}", multi.compression_calls());
                println!("all messages re-verified: {}", yes_no(verified));
            }
        }
        DemoCommand::Diamond { u, w } => {
            let hash = demo_hash(cli, *u)?;
            let diamond = build_diamond(*w, &hash, rng).map_err(demo_err)?;
            let verified = diamond.verify(&hash);
            let report = json!({
                "u": u,
                "w": w,
                "levels": diamond
                    .levels()
                    .iter()
                    .map(|level| level.iter().map(|h| chain_hex(*u, *h)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "linking_blocks": diamond
                    .linking_blocks()
                    .iter()
                    .map(|level| level.iter().map(|m| block_hex(*m)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "final_hash": chain_hex(*u, diamond.final_hash()),
                "compression_calls": diamond.compression_calls(),
                "verified": verified,
            });
            if cli.json {
                print_pretty(&report);
            } else {
                println!(
                    "diamond of width {w}: {} levels, committed hash {}",
                    diamond.level_count(),
                    chain_hex(*u, diamond.final_hash())
                );
                println!("compression calls: {}", diamond.compression_calls());
                println!("all leaf-to-root paths re-verified: {}", yes_no(verified));
            }
        }
        DemoCommand::Herd { u, w, prefix_file } => {
            let hash = demo_hash(cli, *u)?;
            let prefix =
                fs::read(prefix_file).map_err(|e| io_err("reading prefix file", e))?;
            let diamond = build_diamond(*w, &hash, rng).map_err(demo_err)?;
            let committed = diamond.final_hash();
            let build_calls = diamond.compression_calls();
            let (message, linking_calls) =
                herd_prefix(&prefix, &diamond, &hash, rng).map_err(demo_err)?;
            let verified = message.verify(&hash, committed);
            let report = json!({
                "u": u,
                "w": w,
                "prefix_bytes": prefix.len(),
                "committed_hash": chain_hex(*u, committed),
                "linking_block": block_hex(message.linking_block),
                "suffix": message
                    .suffix
                    .iter()
                    .map(|m| block_hex(*m))
                    .collect::<Vec<_>>(),
                "diamond_compression_calls": build_calls,
                "linking_trials": linking_calls,
                "expected_linking_trials": (1u64 << u) / *w as u64,
                "verified": verified,
            });
            if cli.json {
                print_pretty(&report);
            } else {
                println!("committed hash: {}", chain_hex(*u, committed));
                println!(
                    "herded {}-byte prefix via linking block {} and {} suffix blocks",
                    prefix.len(),
                    block_hex(message.linking_block),
                    message.suffix.len()
                );
                println!(
                    "linking trials: {} (expected about {})",
                    linking_calls,
                    (1u64 << u) / *w as u64
                );
                println!("full message re-hashes to commitment: {}", yes_no(verified));
            }
            if !verified {
                return Err(CliError::new(
                    EXIT_VERIFY_FAILED,
                    "herded message failed re-verification",
                ));
            }
        }
    }
    Ok(())
}

fn yes_no(value: bool) -> &'static str {
    if value {
        "yes"
    } else {
        "no"
    }
}

// ---------------------------------------------------------------------------

/// Writes via a temporary file in the same directory plus rename, so a crash
/// cannot leave a half-written or mixed-version file behind.
fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, contents).map_err(|e| io_err("writing file", e))?;
    fs::rename(&tmp, path).map_err(|e| io_err("renaming file", e))?;
    Ok(())
}
