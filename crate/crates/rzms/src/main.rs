//! Operator CLI: parameter/size reporting, key management, local
//! multi-party signing, verification, protocol simulation, benchmarks.
//!
//! Exit codes: 0 success, 1 verification/protocol failure, 2 usage/IO error.
//! The RZMS_PARAMS environment variable ("production" or "toy") selects the
//! parameter set. Results go to stdout, diagnostics to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use rzms::codec;
use rzms::error::Error;
use rzms::params::{Params, SEED_LEN};
use rzms::protocol::{self, keygen, ms_verify, multi_sign_local, setup};
use rzms::sampling::{hash_h, Seed};
use rzms::simnet::{self, build_mock_tx, count_messages, FaultKind, FaultSpec, SimConfig, Verdict};

#[derive(Parser)]
#[command(
    name = "rzms",
    version,
    about = "One-round lattice multi-signature toolkit"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the active parameter set, derived constants, and wire sizes.
    Params,
    /// Generate the shared public parameter rho.
    Setup {
        /// 64 hex chars; fixes the output for deterministic operation.
        #[arg(long)]
        seed: Option<String>,
        /// File to write the 32-byte rho to.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate one signer's key pair.
    Keygen {
        /// File holding the 32-byte shared rho.
        #[arg(long)]
        rho: PathBuf,
        /// Signer seed, 64 hex chars; fixed seed gives a fixed key pair.
        #[arg(long)]
        seed: String,
        /// Output prefix; writes <prefix>.pk and <prefix>.sk.
        #[arg(long)]
        out: String,
    },
    /// Run the full multi-party signing protocol locally (all keys given).
    Sign {
        /// Secret key files, one per signer, same order as --pks.
        #[arg(long = "sk", num_args = 1.., required = true)]
        sk: Vec<PathBuf>,
        /// Public key files, one per signer.
        #[arg(long = "pks", num_args = 1.., required = true)]
        pks: Vec<PathBuf>,
        /// File with the message to sign.
        #[arg(long)]
        msg: PathBuf,
        /// Output signature file.
        #[arg(long)]
        out: PathBuf,
        /// Signing randomness, 64 hex chars; omitted means fresh entropy.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Verify a signature file against a message and rho.
    Verify {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        msg: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Run a deterministic multi-party session on the simulated network.
    Simulate {
        /// Total number of key holders.
        #[arg(long)]
        signers: usize,
        /// Comma-separated participant indices, e.g. "0,2".
        #[arg(long)]
        participants: String,
        /// Master seed, 64 hex chars.
        #[arg(long)]
        seed: Option<String>,
        /// Comma-separated faults: drop@IDX, tamper@IDX:OFFSET, wrongkey@IDX.
        #[arg(long)]
        faults: Option<String>,
        /// Write the JSON-lines transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Measure keygen/sign/verify throughput and the rejection rate.
    Bench {
        #[arg(long, default_value_t = 10)]
        iters: u32,
    },
}

/// Errors that should exit with code 2 (usage/IO) vs 1 (protocol).
enum CliError {
    Usage(String),
    Protocol(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Codec(_) => CliError::Usage(format!("{e}")),
            other => CliError::Protocol(format!("{other}")),
        }
    }
}

fn active_params() -> Result<Params, CliError> {
    let name = std::env::var("RZMS_PARAMS").unwrap_or_else(|_| "production".into());
    Params::by_name(&name).map_err(|e| CliError::Usage(format!("{e}")))
}

fn parse_seed(hexstr: &str) -> Result<Seed, CliError> {
    let bytes = hex::decode(hexstr)
        .map_err(|_| CliError::Usage("seed must be 64 hex characters".into()))?;
    let arr: Seed = bytes
        .try_into()
        .map_err(|_| CliError::Usage("seed must be exactly 32 bytes of hex".into()))?;
    Ok(arr)
}

fn read_seed_file(path: &Path) -> Result<Seed, CliError> {
    let bytes = std::fs::read(path)?;
    let arr: Seed = bytes
        .try_into()
        .map_err(|_| CliError::Usage(format!("{} is not a 32-byte seed file", path.display())))?;
    Ok(arr)
}

fn params_name(p: &Params) -> &'static str {
    if *p == Params::production() {
        "production"
    } else if *p == Params::toy() {
        "toy"
    } else {
        "custom"
    }
}

fn cmd_params(p: &Params) {
    let sizes = codec::wire_sizes(p);
    let accept = p.analytic_acceptance();
    println!("parameter set: {}", params_name(p));
    println!("  n       = {}", p.n);
    println!("  q       = {}", p.q);
    println!("  (k, l)  = ({}, {})", p.k, p.l);
    println!("  gamma1  = {}", p.gamma1);
    println!("  gamma2  = {}", p.gamma2);
    println!("  tau     = {}", p.tau);
    println!("  eta     = {}", p.eta);
    println!("  beta    = {} (tau * eta)", p.beta);
    println!("derived:");
    println!("  alpha   = {} (2 * gamma2)", p.alpha);
    println!("  m_high  = {} ((q - 1) / alpha)", p.m_high);
    println!("signing loop:");
    println!("  per-attempt acceptance = {accept:.6} (analytic)");
    println!(
        "  expected attempts \u{2248} {:.0} (1 / acceptance)",
        1.0 / accept
    );
    println!("  retry limit = {}", p.retry_limit);
    println!(
        "sizes (bytes, body without the {}-byte frame):",
        sizes.frame
    );
    println!("  |pk|    = {} (rho 32 + b {})", sizes.pk_body, sizes.apk);
    println!(
        "  |APK| = {} bytes (aggregate public key b alone)",
        sizes.apk
    );
    println!("  |sk|    = {}", sizes.sk_body);
    println!("  |share| = {}", sizes.share_body);
    println!(
        "  |sig|   = {} (z+c {} + b {})",
        sizes.sig_body, sizes.z_and_c, sizes.apk
    );
    println!("  |(z,c)| = {}", sizes.z_and_c);
    if sizes.z_and_c != 2214 && *p == Params::production() {
        println!(
            "note: the scheme's advertised compressed-signature figure is 2214 bytes \
             for (z,c); the tightest packing constructible from the declared bounds \
             measures {} bytes. Documented discrepancy, not reconciled.",
            sizes.z_and_c
        );
    }
}

fn cmd_setup(p: &Params, seed: Option<String>, out: &Path) -> Result<(), CliError> {
    let _ = p;
    let seed = seed.as_deref().map(parse_seed).transpose()?;
    let rho = setup(128, seed.as_ref())?;
    std::fs::write(out, rho)?;
    println!("rho = {}", hex::encode(rho));
    eprintln!("wrote {} (32 bytes)", out.display());
    Ok(())
}

fn cmd_keygen(p: &Params, rho_path: &Path, seed: &str, prefix: &str) -> Result<(), CliError> {
    let rho = read_seed_file(rho_path)?;
    let signer_seed = parse_seed(seed)?;
    let (pk, sk) = keygen(&rho, &signer_seed, p);
    let pk_bytes = codec::encode_pk(&pk, p);
    let sk_bytes = codec::encode_sk(&sk, p).map_err(Error::from)?;
    let pk_path = format!("{prefix}.pk");
    let sk_path = format!("{prefix}.sk");
    std::fs::write(&pk_path, &pk_bytes)?;
    std::fs::write(&sk_path, &sk_bytes)?;
    println!("pk = {}", hex::encode(hash_h(&pk_bytes)));
    eprintln!("wrote {pk_path} ({} bytes)", pk_bytes.len());
    eprintln!("wrote {sk_path} ({} bytes)", sk_bytes.len());
    Ok(())
}

fn cmd_sign(
    p: &Params,
    sk_paths: &[PathBuf],
    pk_paths: &[PathBuf],
    msg_path: &Path,
    out: &Path,
    seed: Option<String>,
) -> Result<(), CliError> {
    if sk_paths.len() != pk_paths.len() {
        return Err(CliError::Usage(
            "--sk and --pks must list the same number of files".into(),
        ));
    }
    let msg = std::fs::read(msg_path)?;
    let mut keys = Vec::with_capacity(sk_paths.len());
    for (skp, pkp) in sk_paths.iter().zip(pk_paths) {
        let pk = codec::decode_pk(&std::fs::read(pkp)?, p).map_err(Error::from)?;
        let sk = codec::decode_sk(&std::fs::read(skp)?, p).map_err(Error::from)?;
        keys.push((pk, sk));
    }
    let rng = match seed {
        Some(s) => parse_seed(&s)?,
        None => setup(128, None)?,
    };
    let sig = multi_sign_local(&keys, &msg, &rng, p)?;
    let bytes = codec::encode_sig(&sig, p).map_err(Error::from)?;
    std::fs::write(out, &bytes)?;
    println!("sig = {}", hex::encode(hash_h(&bytes)));
    eprintln!("wrote {} ({} bytes)", out.display(), bytes.len());
    Ok(())
}

fn cmd_verify(
    p: &Params,
    rho_path: &Path,
    msg_path: &Path,
    sig_path: &Path,
) -> Result<(), CliError> {
    let rho = read_seed_file(rho_path)?;
    let msg = std::fs::read(msg_path)?;
    let sig = codec::decode_sig(&std::fs::read(sig_path)?, p)
        .map_err(|e| CliError::Protocol(format!("signature rejected: {e}")))?;
    if ms_verify(&rho, &msg, &sig, p) {
        println!("OK");
        Ok(())
    } else {
        println!("FAIL");
        Err(CliError::Protocol("signature verification failed".into()))
    }
}

fn parse_faults(spec: &str) -> Result<Vec<FaultSpec>, CliError> {
    let mut out = Vec::new();
    for item in spec.split(',').filter(|s| !s.is_empty()) {
        let (kind, rest) = item
            .split_once('@')
            .ok_or_else(|| CliError::Usage(format!("bad fault spec '{item}'")))?;
        let fault = match kind {
            "drop" => FaultSpec {
                message_index: rest
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad fault index in '{item}'")))?,
                kind: FaultKind::Drop,
            },
            "wrongkey" => FaultSpec {
                message_index: rest
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad fault index in '{item}'")))?,
                kind: FaultKind::WrongKey,
            },
            "tamper" => {
                let (idx, off) = rest.split_once(':').ok_or_else(|| {
                    CliError::Usage(format!("tamper needs IDX:OFFSET in '{item}'"))
                })?;
                FaultSpec {
                    message_index: idx
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad fault index in '{item}'")))?,
                    kind: FaultKind::Tamper {
                        offset: off.parse().map_err(|_| {
                            CliError::Usage(format!("bad tamper offset in '{item}'"))
                        })?,
                    },
                }
            }
            other => return Err(CliError::Usage(format!("unknown fault kind '{other}'"))),
        };
        out.push(fault);
    }
    Ok(out)
}

fn cmd_simulate(
    p: &Params,
    signers: usize,
    participants: &str,
    seed: Option<String>,
    faults: Option<String>,
    transcript_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let participants: Vec<usize> = participants
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage("participants must be comma-separated indices".into()))?;
    if participants.is_empty() || participants.iter().any(|&i| i >= signers) {
        return Err(CliError::Usage(
            "participants must be a non-empty subset of 0..signers".into(),
        ));
    }
    let master_seed = match seed {
        Some(s) => parse_seed(&s)?,
        None => setup(128, None)?,
    };
    let faults = match faults {
        Some(s) => parse_faults(&s)?,
        None => Vec::new(),
    };
    let sender_names: Vec<String> = participants.iter().map(|i| format!("BS{i}")).collect();
    let sender_refs: Vec<&str> = sender_names.iter().map(String::as_str).collect();
    let message = build_mock_tx(&sender_refs, "BR", 100_000)?;
    let cfg = SimConfig {
        n_signers: signers,
        participants,
        master_seed,
        faults,
        message,
        params: p.clone(),
    };
    let t = simnet::run_session(&cfg);
    let jsonl = t.to_jsonl();
    if let Some(path) = transcript_path {
        std::fs::write(&path, &jsonl)?;
        eprintln!("wrote {} ({} events)", path.display(), t.events.len());
    } else {
        print!("{jsonl}");
    }
    let counts = count_messages(&t);
    eprintln!(
        "messages: setup {} keygen {} sign {} verify {}",
        counts.setup, counts.keygen, counts.sign, counts.verify
    );
    match &t.verdict {
        Verdict::Accepted => {
            println!("verdict: accepted (ledger length {})", t.ledger.len());
            Ok(())
        }
        Verdict::Rejected { reason } => {
            println!("verdict: rejected({reason})");
            Err(CliError::Protocol(format!("session rejected: {reason}")))
        }
    }
}

fn cmd_bench(p: &Params, iters: u32) -> Result<(), CliError> {
    let rho = setup(128, Some(&[1u8; SEED_LEN]))?;
    let mut signer_seed = [2u8; SEED_LEN];

    let t0 = Instant::now();
    let mut pairs = Vec::new();
    for i in 0..iters {
        signer_seed[0] = i as u8;
        signer_seed[1] = (i >> 8) as u8;
        pairs.push(keygen(&rho, &signer_seed, p));
    }
    let keygen_time = t0.elapsed();

    let (pk, sk) = pairs[0].clone();
    let msg = b"bench message";
    let mut attempts_total = 0u64;
    let mut rng = [3u8; SEED_LEN];
    let t0 = Instant::now();
    let mut outputs = Vec::new();
    for i in 0..iters {
        rng[0] = i as u8;
        rng[1] = (i >> 8) as u8;
        let out = protocol::sign_share(&sk, &pk, &[], msg, &rng, p)?;
        attempts_total += out.attempts as u64;
        outputs.push(out);
    }
    let sign_time = t0.elapsed();

    let a = rzms::sampling::expand_a(&rho, p).to_ntt(p);
    let mut sigs = Vec::new();
    for out in &outputs {
        sigs.push(protocol::aggregate(
            &out.nonce,
            &out.own_t,
            &[],
            msg,
            &a,
            p,
        )?);
    }
    let t0 = Instant::now();
    let mut ok = 0u32;
    for sig in &sigs {
        if ms_verify(&rho, msg, sig, p) {
            ok += 1;
        }
    }
    let verify_time = t0.elapsed();
    if ok != iters {
        return Err(CliError::Protocol(
            "bench signatures failed to verify".into(),
        ));
    }

    let per = |d: std::time::Duration| d.as_secs_f64() / iters as f64 * 1e3;
    println!("iterations: {iters}");
    println!("keygen: {:.3} ms/op", per(keygen_time));
    println!(
        "sign:   {:.3} ms/op ({:.1} attempts/signature measured, {:.1} expected)",
        per(sign_time),
        attempts_total as f64 / iters as f64,
        1.0 / p.analytic_acceptance()
    );
    println!(
        "        per-attempt acceptance {:.5} measured vs {:.5} analytic",
        iters as f64 / attempts_total as f64,
        p.analytic_acceptance()
    );
    println!("verify: {:.3} ms/op", per(verify_time));
    Ok(())
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let p = active_params()?;
    match cli.cmd {
        Cmd::Params => {
            cmd_params(&p);
            Ok(())
        }
        Cmd::Setup { seed, out } => cmd_setup(&p, seed, &out),
        Cmd::Keygen { rho, seed, out } => cmd_keygen(&p, &rho, &seed, &out),
        Cmd::Sign {
            sk,
            pks,
            msg,
            out,
            seed,
        } => cmd_sign(&p, &sk, &pks, &msg, &out, seed),
        Cmd::Verify { rho, msg, sig } => cmd_verify(&p, &rho, &msg, &sig),
        Cmd::Simulate {
            signers,
            participants,
            seed,
            faults,
            transcript,
        } => cmd_simulate(&p, signers, &participants, seed, faults, transcript),
        Cmd::Bench { iters } => cmd_bench(&p, iters),
    }
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`rzms params | head`) like other Unix
    // tools instead of panicking in the stdout machinery.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Protocol(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
