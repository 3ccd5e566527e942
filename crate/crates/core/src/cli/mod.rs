//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 mismatch or failed check, 2 usage, 3 file I/O,
//! 4 network, 5 protocol.

pub mod demo;
pub mod keyfile;

use std::ffi::OsString;
use std::io::Write;
use std::net::TcpListener;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use crate::arith::Rng;
use crate::dghv::{self, DghvCiphertext, DghvSecretKey};
use crate::nk::{self, NkCiphertext, NkSecretKey};
use crate::properties::{check_algebraic_laws, check_identities, check_identities_dghv, IdentityReport};
use crate::protocol::{
    client_finish_dghv, client_prepare_dghv, client_roundtrip_fixed, client_roundtrip_nk, serve_listener,
    Function, NkOutcome, ProtocolError, Session, TcpClient,
};
use keyfile::{KeyFile, KeyFileError, SecretKey};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_NET: i32 = 4;
pub const EXIT_PROTOCOL: i32 = 5;

/// Timestamp written into seeded key files so they are byte-identical.
pub const SEEDED_CREATED: &str = "1970-01-01T00:00:00Z";

#[derive(Parser, Debug)]
#[command(
    name = "intfhe",
    version,
    about = "Somewhat-homomorphic encryption over the integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Dghv,
    Nk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FnArg {
    Add,
    Mul,
}

impl From<FnArg> for Function {
    fn from(f: FnArg) -> Self {
        match f {
            FnArg::Add => Function::Add,
            FnArg::Mul => Function::Mul,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a secret key file.
    Keygen {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Bit length of the secret modulus; inferred from --p when given.
        #[arg(long)]
        lambda: Option<u64>,
        /// Public prime (nk only).
        #[arg(long = "Q")]
        q_pub: Option<BigUint>,
        /// Use this odd modulus instead of drawing one.
        #[arg(long)]
        p: Option<BigUint>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt one message (a bit for dghv, an element of Z_Q for nk).
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        m: BigUint,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt one ciphertext.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        c: BigUint,
    },
    /// Reproduce a worked example and check it against the expected values.
    Demo {
        #[arg(value_parser = demo::NAMES)]
        name: String,
    },
    /// Randomized check of the homomorphic identities.
    Check {
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        lambda: u64,
        #[arg(long = "Q")]
        q_pub: Option<BigUint>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the keyless evaluation server.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7919")]
        addr: String,
    },
    /// Encrypt two operands, have a server evaluate them, decrypt the answer.
    Request {
        #[arg(long)]
        addr: String,
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "fn", value_enum, default_value = "add")]
        function: FnArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// nk only: encode operands as fixed-point decimals at this scale
        /// instead of through the ASCII table.
        #[arg(long)]
        fixed_point: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

impl From<KeyFileError> for Failure {
    fn from(e: KeyFileError) -> Self {
        let code = match e {
            KeyFileError::Read { .. } | KeyFileError::Write { .. } => EXIT_IO,
            KeyFileError::Invalid(_) => EXIT_USAGE,
        };
        Failure::new(code, e)
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        let code = if e.is_network() { EXIT_NET } else { EXIT_PROTOCOL };
        Failure::new(code, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_IO, e)
    }
}

fn rng_for(seed: Option<u64>) -> Rng {
    Rng::from_seed(seed.unwrap_or_else(rand::random))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Keygen {
            scheme,
            lambda,
            q_pub,
            p,
            seed,
            out: path,
        } => cmd_keygen(scheme, lambda, q_pub, p, seed, &path, out),
        Command::Encrypt { key, m, seed } => cmd_encrypt(&key, &m, seed, out),
        Command::Decrypt { key, c } => cmd_decrypt(&key, c, out),
        Command::Demo { name } => cmd_demo(&name, out),
        Command::Check {
            scheme,
            lambda,
            q_pub,
            trials,
            seed,
        } => cmd_check(scheme, lambda, q_pub, trials, seed, out),
        Command::Serve { addr } => cmd_serve(&addr, out),
        Command::Request {
            addr,
            key,
            function,
            a,
            b,
            fixed_point,
            seed,
        } => cmd_request(&addr, &key, function.into(), &a, &b, fixed_point, seed, out),
    }
}

fn usage(message: impl ToString) -> Failure {
    Failure::new(EXIT_USAGE, message)
}

fn cmd_keygen(
    scheme: SchemeArg,
    lambda: Option<u64>,
    q_pub: Option<BigUint>,
    p: Option<BigUint>,
    seed: Option<u64>,
    path: &std::path::Path,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if let (Some(l), Some(p)) = (lambda, &p) {
        if p.bits() != l {
            return Err(usage(format!("--p {p} is not a {l}-bit value")));
        }
    }
    let mut rng = rng_for(seed);
    let key = match (scheme, q_pub) {
        (SchemeArg::Dghv, Some(_)) => return Err(usage("--Q is only valid for nk")),
        (SchemeArg::Dghv, None) => SecretKey::Dghv(match (p, lambda) {
            (Some(p), _) => DghvSecretKey::from_modulus(p).map_err(usage)?,
            (None, Some(l)) => dghv::keygen(l, &mut rng).map_err(usage)?,
            (None, None) => return Err(usage("--lambda or --p is required")),
        }),
        (SchemeArg::Nk, None) => return Err(usage("--Q is required for nk")),
        (SchemeArg::Nk, Some(q)) => SecretKey::Nk(match (p, lambda) {
            (Some(p), _) => NkSecretKey::from_parts(p, q).map_err(usage)?,
            (None, Some(l)) => nk::keygen(l, &q, &mut rng).map_err(usage)?,
            (None, None) => return Err(usage("--lambda or --p is required")),
        }),
    };
    let created = match seed {
        Some(_) => SEEDED_CREATED.to_string(),
        None => chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    KeyFile::from_key(&key, created).save(path)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(EXIT_OK)
}

fn cmd_encrypt(
    path: &std::path::Path,
    m: &BigUint,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut rng = rng_for(seed);
    let c = match KeyFile::load(path)? {
        SecretKey::Dghv(key) => {
            let bit = u8::try_from(m).map_err(|_| usage(format!("message {m} is not a bit")))?;
            dghv::encrypt_bit(&key, bit, &mut rng)
                .map_err(usage)?
                .into_value()
        }
        SecretKey::Nk(key) => nk::encrypt(&key, m, &mut rng).map_err(usage)?.into_value(),
    };
    writeln!(out, "{c}")?;
    Ok(EXIT_OK)
}

fn cmd_decrypt(path: &std::path::Path, c: BigUint, out: &mut dyn Write) -> Result<i32, Failure> {
    let m = match KeyFile::load(path)? {
        SecretKey::Dghv(key) => BigUint::from(dghv::decrypt_bit(&key, &DghvCiphertext::from_value(c))),
        SecretKey::Nk(key) => nk::decrypt(&key, &NkCiphertext::from_value(c)),
    };
    writeln!(out, "{m}")?;
    Ok(EXIT_OK)
}

fn cmd_demo(name: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let report = demo::run(name).ok_or_else(|| usage(format!("unknown demo {name:?}")))?;
    write!(out, "{report}")?;
    Ok(if report.reproduced() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

fn print_report(report: &IdentityReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "passed: {}", report.passed)?;
    writeln!(out, "failed: {}", report.failed.len())?;
    const SHOWN: usize = 5;
    for w in report.failed.iter().take(SHOWN) {
        writeln!(out, "  {w}")?;
    }
    if report.failed.len() > SHOWN {
        writeln!(out, "  ... {} more", report.failed.len() - SHOWN)?;
    }
    Ok(())
}

fn cmd_check(
    scheme: SchemeArg,
    lambda: u64,
    q_pub: Option<BigUint>,
    trials: u64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let mut rng = Rng::from_seed(seed);
    let report = match (scheme, q_pub) {
        (SchemeArg::Dghv, Some(_)) => return Err(usage("--Q is only valid for nk")),
        (SchemeArg::Dghv, None) => {
            let key = dghv::keygen(lambda, &mut rng).map_err(usage)?;
            writeln!(out, "scheme: dghv lambda={lambda} p={}", key.modulus())?;
            check_identities_dghv(&key, trials, &mut rng).map_err(usage)?
        }
        (SchemeArg::Nk, None) => return Err(usage("--Q is required for nk")),
        (SchemeArg::Nk, Some(q)) => {
            let key = nk::keygen(lambda, &q, &mut rng).map_err(usage)?;
            writeln!(out, "scheme: nk lambda={lambda} p={} Q={q}", key.modulus())?;
            let identities = check_identities(&key, trials, &mut rng).map_err(usage)?;
            let laws = check_algebraic_laws(&key, trials, &mut rng).map_err(usage)?;
            writeln!(
                out,
                "algebraic laws: {} passed, {} failed",
                laws.passed,
                laws.failed.len()
            )?;
            identities.merge(laws)
        }
    };
    writeln!(out, "trials: {trials}")?;
    print_report(&report, out)?;
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_serve(addr: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let listener = TcpListener::bind(addr).map_err(|source| ProtocolError::Bind {
        addr: addr.to_string(),
        source,
    })?;
    writeln!(out, "listening on {}", listener.local_addr()?)?;
    out.flush()?;
    match serve_listener(listener) {
        Ok(never) => match never {},
        Err(e) => Err(e.into()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_request(
    addr: &str,
    key_path: &std::path::Path,
    function: Function,
    a: &str,
    b: &str,
    fixed_point: Option<u32>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let key = KeyFile::load(key_path)?;
    let mut rng = rng_for(seed);
    // validate operands before touching the network
    if let SecretKey::Dghv(_) = key {
        if fixed_point.is_some() {
            return Err(usage("--fixed-point is only valid for nk"));
        }
    }
    let parse = |s: &str| {
        s.parse::<BigUint>()
            .map_err(|_| usage(format!("{s:?} is not a nonnegative integer")))
    };
    let dghv_operands = match key {
        SecretKey::Dghv(_) => Some((parse(a)?, parse(b)?)),
        SecretKey::Nk(_) => None,
    };
    let mut session = Session::new(TcpClient::connect(addr)?);
    match key {
        SecretKey::Dghv(key) => {
            let (a, b) = dghv_operands.expect("parsed above");
            let req = client_prepare_dghv(&key, &a, &b, function, &mut rng);
            let resp = session.exchange(&req)?;
            let outcome = client_finish_dghv(&key, &resp)?;
            writeln!(out, "{}", outcome.value)?;
        }
        SecretKey::Nk(key) => {
            let run = match fixed_point {
                Some(scale) => client_roundtrip_fixed(&mut session, &key, function, a, b, scale, &mut rng)?,
                None => client_roundtrip_nk(&mut session, &key, function, a, b, &mut rng)?,
            };
            match run.outcome {
                NkOutcome::Decoded(text) => writeln!(out, "{text}")?,
                NkOutcome::DecodeFailure(bytes) => writeln!(out, "decode failure: bytes {bytes}")?,
            }
        }
    }
    Ok(EXIT_OK)
}
