//! Command-line front end.
//!
//! Exit codes: 0 when every report is PASS or MEASURED, 1 when any report
//! fails, 2 on usage or input errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fock::Weight;
use crate::report::Report;
use crate::series::parse_weight;
use crate::suite::{self, Params};
use crate::text::parse_state;
use crate::window::Sector;

#[derive(Parser, Debug)]
#[command(name = "chiralflow", version, about = "Exact checks for the bc-beta-gamma system, its N=2 currents and spectral flow")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GlobalOpts {
    /// Number of bc-beta-gamma pairs [default: 1]
    #[arg(long, global = true)]
    pub rank: Option<u32>,
    /// Weight bound of the window, an exact rational [default: 2]
    #[arg(long, global = true)]
    pub hmax: Option<String>,
    /// Largest |k| of z-power coefficients and of E+ orders [default: 3]
    #[arg(long, global = true)]
    pub kmax: Option<i64>,
    /// Largest |m| of probed modes [default: 2]
    #[arg(long, global = true)]
    pub mode_range: Option<i64>,
    /// fermionic, full or full:<gamma degree> [default: fermionic]
    #[arg(long, global = true)]
    pub sector: Option<String>,
    /// Flow power for character checks [default: 1]
    #[arg(short = 'n', global = true, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// Central-charge offset of traces [default: 3 * rank]
    #[arg(long = "central-charge", global = true)]
    pub c: Option<String>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum, conflicts_with = "text")]
    pub format: Option<Format>,
    /// Shorthand for --format json
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Shorthand for --format text
    #[arg(long, global = true)]
    pub text: bool,
    /// Omit timing so identical runs are byte-identical
    #[arg(long, global = true)]
    pub stable: bool,
    /// key=value file of defaults (rank, hmax, kmax, mode_range, sector, n,
    /// central_charge, format)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Vertex-algebra identities
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// The spectral-flow operators
    Flow {
        #[command(subcommand)]
        what: FlowCmd,
    },
    /// Singular OPE coefficients of two states
    Ope { a: String, b: String },
    /// Graded dimensions, traces and the character identity
    Character {
        #[command(subcommand)]
        what: CharacterCmd,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum VerifyCmd {
    /// N=2 closure of the free-field currents
    N2,
    /// The volume states and their relations with J, Q, G
    Omega,
    /// The commutator formula for generator and current modes
    Borcherds,
    /// The topologically twisted Virasoro vectors
    Twist,
    /// Every verify suite
    All,
}

#[derive(Subcommand, Debug, Clone)]
pub enum FlowCmd {
    /// sigma and tau have no nonconstant z-power coefficients
    Constancy,
    /// tau sigma = sigma tau = id
    Inverse,
    /// Measured conjugation of the N=2 modes by sigma
    Intertwine,
    /// sigma commutes with beta/gamma modes
    Transparency,
    /// Commutation law of the exponential operators
    Locality,
    /// Applies sigma (or tau) to a state
    Apply {
        state: String,
        /// Apply tau instead of sigma
        #[arg(long)]
        tau: bool,
        /// z-power coefficient to extract
        #[arg(short = 'k', default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum CharacterCmd {
    Dims,
    Trace,
    Ellipticity,
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {}", path.display(), e)))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            column: 1,
            message: "expected key=value".into(),
        })?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_int<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value '{}' for {}", v, key)))
}

/// Resolves defaults, then the config file, then flags.
pub fn resolve(opts: &GlobalOpts) -> Result<(Params, Format)> {
    let mut p = Params::default();
    let mut format = Format::Json;
    if let Some(path) = &opts.config {
        for (k, v) in read_config(path)? {
            match k.as_str() {
                "rank" => p.rank = parse_int(&k, &v)?,
                "hmax" => p.hmax = parse_weight(&v)?,
                "kmax" => p.kmax = parse_int(&k, &v)?,
                "mode_range" => p.mode_range = parse_int(&k, &v)?,
                "sector" => p.sector = v.parse()?,
                "n" => p.n = parse_int(&k, &v)?,
                "central_charge" | "c" => p.c = Some(parse_weight(&v)?),
                "format" => {
                    format = Format::from_str(&v, true)
                        .map_err(|_| Error::InvalidArgument(format!("bad format '{}'", v)))?
                }
                other => return Err(Error::InvalidArgument(format!("unknown config key '{}'", other))),
            }
        }
    }
    if let Some(r) = opts.rank {
        p.rank = r;
    }
    if let Some(h) = &opts.hmax {
        p.hmax = parse_weight(h)?;
    }
    if let Some(k) = opts.kmax {
        p.kmax = k;
    }
    if let Some(m) = opts.mode_range {
        p.mode_range = m;
    }
    if let Some(s) = &opts.sector {
        p.sector = s.parse::<Sector>()?;
    }
    if let Some(n) = opts.n {
        p.n = n;
    }
    if let Some(c) = &opts.c {
        p.c = Some(parse_weight(c)?);
    }
    if let Some(f) = opts.format {
        format = f;
    }
    if opts.json {
        format = Format::Json;
    }
    if opts.text {
        format = Format::Text;
    }
    if p.rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if p.hmax < Weight::from_integer(0) || p.kmax < 0 || p.mode_range < 0 {
        return Err(Error::InvalidArgument("window bounds must be non-negative".into()));
    }
    Ok((p, format))
}

/// Runs one parsed command and returns its reports in schedule order.
pub fn execute(command: &Command, p: &Params) -> Result<Vec<Report>> {
    Ok(match command {
        Command::Verify { what } => match what {
            VerifyCmd::N2 => vec![suite::verify_n2(p)?],
            VerifyCmd::Omega => vec![suite::verify_omega(p)?],
            VerifyCmd::Borcherds => vec![suite::verify_borcherds(p)?],
            VerifyCmd::Twist => vec![suite::verify_twist_report(p)?],
            VerifyCmd::All => vec![
                suite::verify_n2(p)?,
                suite::verify_omega(p)?,
                suite::verify_twist_report(p)?,
                suite::verify_borcherds(p)?,
            ],
        },
        Command::Flow { what } => match what {
            FlowCmd::Constancy => vec![suite::flow_constancy(p)?],
            FlowCmd::Inverse => vec![suite::flow_inverse(p)?],
            FlowCmd::Intertwine => vec![suite::flow_intertwine(p)?],
            FlowCmd::Transparency => vec![suite::flow_transparency(p)?],
            FlowCmd::Locality => vec![suite::flow_locality(p)?],
            FlowCmd::Apply { state, tau, k } => {
                let s = parse_state(state)?;
                s.check_rank(p.rank)?;
                vec![suite::flow_apply_report(p, &s, *tau, *k)?]
            }
        },
        Command::Ope { a, b } => {
            vec![suite::ope_report(p, &parse_state(a)?, &parse_state(b)?)?]
        }
        Command::Character { what } => match what {
            CharacterCmd::Dims => vec![suite::character_dims(p)?],
            CharacterCmd::Trace => vec![suite::character_trace(p)?],
            CharacterCmd::Ellipticity => vec![suite::character_ellipticity(p)?],
        },
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var("CHIRALFLOW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses arguments, runs, writes reports to `out` and errors to `err`,
/// and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    configure_threads();
    let (p, format) = match resolve(&cli.opts) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return 2;
        }
    };
    let reports = match execute(&cli.command, &p) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return 2;
        }
    };
    let mut failed = false;
    for mut r in reports {
        if cli.opts.stable {
            r.elapsed_ms = None;
        }
        failed |= r.is_failure();
        let line = match format {
            Format::Json => r.to_json(),
            Format::Text => r.to_text(),
        };
        let _ = writeln!(out, "{}", line);
    }
    i32::from(failed)
}
