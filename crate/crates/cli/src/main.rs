//! Command-line front end: ingest chain specs, build the exact objects,
//! run verification suites, emit matrices and structured reports.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fmatrix_core::chain::{check_bc_families_commute, check_d_diagonal, check_rtt, ChainSpec};
use fmatrix_core::dump::{poly_dump, MatrixDump};
use fmatrix_core::fba::{check_reconstruction, check_separated_algebra, spectrum};
use fmatrix_core::perm::SitePermutation;
use fmatrix_core::report::{CheckResult, CheckStatus};
use fmatrix_core::rmatrix::{
    check_intertwining, check_unitarity, check_word_independence, generalized_r, higher_spin_r,
};
use fmatrix_core::sampling::random_rational_pairs;
use fmatrix_core::scalar::Rat;
use fmatrix_core::twist::{check_cocycle, check_conjugation, check_factorization, f_matrix, q_factor_left};
use fmatrix_core::{monodromy, tilde_ops, Error};

#[derive(Parser)]
#[command(
    name = "fmatrix",
    version,
    about = "Exact monodromy, R-matrix and factorizing F-matrix toolkit for inhomogeneous XXX chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the per-site spectra and the disjointness verdict
    Spectrum {
        /// Chain spec JSON file
        #[arg(long)]
        spec: PathBuf,
        /// Exit nonzero when the spectra are not pairwise disjoint
        #[arg(long)]
        strict: bool,
        /// Also write the result as JSON
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an object and dump it as JSON
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        object: BuildObject,
        /// Refuse chains whose total dimension exceeds this
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
        /// Write the dump here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exit status 0 iff every check passes
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 4096)]
        max_dim: usize,
        /// Write the structured JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat skipped checks as failures
        #[arg(long)]
        strict: bool,
        /// Test hook: corrupt one R-matrix entry before checking
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BuildObject {
    Monodromy,
    Tilde,
    F,
    #[value(name = "f-inverse")]
    FInverse,
    R,
    Q,
    /// Separated-variable coordinates and ladders
    Separated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Rtt,
    Ybe,
    Twist,
    Cocycle,
    Fba,
    All,
}

#[derive(Serialize)]
struct SpectrumReport {
    spec: ChainSpec,
    lattices: Vec<Vec<Rat>>,
    disjoint: bool,
}

#[derive(Serialize)]
struct RunReport {
    version: String,
    spec: ChainSpec,
    checks: Vec<CheckResult>,
    overall: String,
}

fn load_spec(path: &PathBuf) -> anyhow::Result<ChainSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    ChainSpec::from_json(&text).map_err(|e| anyhow!("{e}"))
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_spectrum(spec_path: PathBuf, strict: bool, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let spec = load_spec(&spec_path)?;
    let s = spectrum(&spec);
    // ascending per-site values for display
    let mut ascending = s.lattices.clone();
    for lat in &mut ascending {
        lat.reverse();
    }
    for (i, lat) in ascending.iter().enumerate() {
        let values: Vec<String> = lat.iter().map(Rat::to_string).collect();
        println!("Lambda_{} = {{{}}}", i + 1, values.join(", "));
    }
    println!("disjoint: {}", s.disjoint);
    if !s.disjoint {
        if let Err(Error::NonGeneric { factor }) = spec.validate_generic() {
            println!("non-generic: {factor}");
        }
    }
    if let Some(path) = out {
        let report = SpectrumReport {
            spec,
            lattices: ascending,
            disjoint: s.disjoint,
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        fs::write(&path, text)?;
    }
    Ok(if strict && !s.disjoint {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn guard_dim(spec: &ChainSpec, max_dim: usize) -> anyhow::Result<()> {
    let dim = spec.total_dim();
    if dim > max_dim {
        bail!(
            "chain dimension {dim} exceeds --max-dim {max_dim}; refusing (raise the limit to proceed)"
        );
    }
    Ok(())
}

fn cmd_build(
    spec_path: PathBuf,
    object: BuildObject,
    max_dim: usize,
    out: Option<PathBuf>,
) -> anyhow::Result<ExitCode> {
    let spec = load_spec(&spec_path)?;
    guard_dim(&spec, max_dim)?;

    #[derive(Serialize)]
    struct PolyBuild {
        object: &'static str,
        spec: ChainSpec,
        a: Vec<MatrixDump>,
        b: Vec<MatrixDump>,
        c: Vec<MatrixDump>,
        d: Vec<MatrixDump>,
    }
    #[derive(Serialize)]
    struct MatrixBuild {
        object: &'static str,
        spec: ChainSpec,
        matrix: MatrixDump,
    }

    let text = match object {
        BuildObject::Monodromy => {
            let t = monodromy(&spec, &SitePermutation::identity(spec.num_sites()))
                .map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&PolyBuild {
                object: "monodromy",
                spec: spec.clone(),
                a: poly_dump(&t.a),
                b: poly_dump(&t.b),
                c: poly_dump(&t.c),
                d: poly_dump(&t.d),
            })?
        }
        BuildObject::Tilde => {
            let t = tilde_ops(&spec).map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&PolyBuild {
                object: "tilde",
                spec: spec.clone(),
                a: poly_dump(&t.a),
                b: poly_dump(&t.b),
                c: poly_dump(&t.c),
                d: poly_dump(&t.d),
            })?
        }
        BuildObject::F => {
            let f = f_matrix(&spec).map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&MatrixBuild {
                object: "f",
                spec: spec.clone(),
                matrix: MatrixDump::from(&f.op),
            })?
        }
        BuildObject::FInverse => {
            let f = f_matrix(&spec).map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&MatrixBuild {
                object: "f-inverse",
                spec: spec.clone(),
                matrix: MatrixDump::from(&f.inverse),
            })?
        }
        BuildObject::R => {
            if spec.num_sites() != 2 {
                bail!("object r needs a chain with exactly 2 sites");
            }
            let s = spec.sites();
            let r = higher_spin_r(s[0].two_l, &s[0].delta, s[1].two_l, &s[1].delta, spec.eta())
                .map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&MatrixBuild {
                object: "r",
                spec: spec.clone(),
                matrix: MatrixDump::from(&r.op),
            })?
        }
        BuildObject::Q => {
            let q = q_factor_left(&spec).map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&MatrixBuild {
                object: "q",
                spec: spec.clone(),
                matrix: MatrixDump::from(&q),
            })?
        }
        BuildObject::Separated => {
            #[derive(Serialize)]
            struct SeparatedBuild {
                object: &'static str,
                spec: ChainSpec,
                x_hat: Vec<MatrixDump>,
                x_plus: Vec<MatrixDump>,
                x_minus: Vec<MatrixDump>,
            }
            let ops =
                fmatrix_core::fba::separated_operators(&spec).map_err(|e| anyhow!("{e}"))?;
            serde_json::to_string_pretty(&SeparatedBuild {
                object: "separated",
                spec: spec.clone(),
                x_hat: ops.x_hat.iter().map(MatrixDump::from).collect(),
                x_plus: ops.x_plus.iter().map(MatrixDump::from).collect(),
                x_minus: ops.x_minus.iter().map(MatrixDump::from).collect(),
            })?
        }
    };
    write_or_print(&out, &format!("{text}\n"))?;
    Ok(ExitCode::SUCCESS)
}

/// At most this many sites get the full permutation-group sweep.
const FULL_SWEEP_SITES: usize = 4;

fn sweep_permutations(n: usize) -> Vec<SitePermutation> {
    if n <= FULL_SWEEP_SITES {
        SitePermutation::all(n)
    } else {
        let mut perms = vec![SitePermutation::identity(n)];
        perms.extend((0..n - 1).map(|i| SitePermutation::transposition(n, i)));
        perms
    }
}

/// Folds a family of instance results into a single report entry, so
/// every enabled check appears exactly once. The first failing instance
/// supplies the recorded detail.
fn aggregate(
    name: &str,
    equation: &str,
    instances: Vec<Result<CheckResult, Error>>,
) -> CheckResult {
    let count = instances.len();
    for inst in instances {
        match inst {
            Ok(r) if r.passed() => continue,
            Ok(mut r) => {
                r.check = name.to_string();
                r.equation = equation.to_string();
                return r;
            }
            Err(e) => return CheckResult::fail(name, equation, e.to_string()),
        }
    }
    CheckResult::pass(name, equation).with_detail(format!("{count} instance(s)"))
}

fn run_suite(spec: &ChainSpec, suite: Suite, corrupt: bool) -> Vec<CheckResult> {
    let mut checks = Vec::new();
    let genericity_needed = !matches!(suite, Suite::Rtt);
    if genericity_needed {
        if let Err(Error::NonGeneric { factor }) = spec.validate_generic() {
            checks.push(CheckResult::fail(
                "genericity",
                "pairwise disjoint site spectra",
                factor,
            ));
            return checks;
        }
    }
    let n = spec.num_sites();
    fn absorb(checks: &mut Vec<CheckResult>, res: Result<Vec<CheckResult>, Error>, name: &str) {
        match res {
            Ok(mut rs) => checks.append(&mut rs),
            Err(e) => checks.push(CheckResult::fail(name, "construction", e.to_string())),
        }
    }

    if matches!(suite, Suite::Rtt | Suite::All) {
        let pairs = random_rational_pairs(0xFACADE, 5, spec.eta());
        checks.push(aggregate(
            "rtt",
            "R(u-v) (T(u) x Id) (Id x T(v)) = (Id x T(v)) (T(u) x Id) R(u-v)",
            pairs.iter().map(|(u, v)| check_rtt(spec, u, v)).collect(),
        ));
        absorb(
            &mut checks,
            check_bc_families_commute(spec).map(|r| vec![r]),
            "bc-commute",
        );
        absorb(&mut checks, check_d_diagonal(spec).map(|r| vec![r]), "d-diagonal");
    }

    if matches!(suite, Suite::Ybe | Suite::All) {
        let sweep = sweep_permutations(n);
        checks.push(aggregate(
            "ybe-word-independence",
            "R^sigma independent of the reduced word (Yang-Baxter)",
            sweep
                .iter()
                .map(|sigma| check_word_independence(spec, sigma))
                .collect(),
        ));
        checks.push(aggregate(
            "r-intertwining",
            "R^sigma T(u) = T_sigma(u) R^sigma",
            sweep
                .iter()
                .map(|sigma| check_intertwining(spec, sigma))
                .collect(),
        ));
        if n >= 2 {
            checks.push(aggregate(
                "r-unitarity",
                "sigma(R_{21}(z2,z1)) R_{12}(z1,z2) = Id",
                (0..n - 1)
                    .map(|i| {
                        let a = spec.site(i);
                        let b = spec.site(i + 1);
                        check_unitarity(a.two_l, &a.delta, b.two_l, &b.delta, spec.eta())
                    })
                    .collect(),
            ));
        }
        if corrupt && n >= 2 {
            let sigma = SitePermutation::transposition(n, 0);
            match generalized_r(spec, &sigma) {
                Ok(reference) => {
                    let mut corrupted = reference.clone();
                    corrupted.set(0, 0, corrupted.get(0, 0) + &Rat::one());
                    checks.push(CheckResult::compare(
                        "ybe-corrupted-control",
                        "corrupted R^sigma must differ from the rebuilt one",
                        &corrupted,
                        &reference,
                    ));
                }
                Err(e) => checks.push(CheckResult::fail(
                    "ybe-corrupted-control",
                    "construction",
                    e.to_string(),
                )),
            }
        }
    }

    if matches!(suite, Suite::Twist | Suite::All) {
        absorb(&mut checks, check_conjugation(spec), "twist-conjugation");
        checks.push(aggregate(
            "twist-factorization",
            "(F_sigma) R^sigma = F",
            sweep_permutations(n)
                .iter()
                .map(|sigma| check_factorization(spec, sigma))
                .collect(),
        ));
    }

    if matches!(suite, Suite::Cocycle | Suite::All) {
        absorb(&mut checks, check_cocycle(spec), "cocycle");
    }

    if matches!(suite, Suite::Fba | Suite::All) {
        absorb(&mut checks, check_separated_algebra(spec), "fba-algebra");
        absorb(&mut checks, check_reconstruction(spec), "fba-reconstruction");
    }

    checks
}

fn cmd_verify(
    spec_path: PathBuf,
    suite: Suite,
    max_dim: usize,
    out: Option<PathBuf>,
    strict: bool,
    corrupt: bool,
) -> anyhow::Result<ExitCode> {
    let spec = load_spec(&spec_path)?;
    guard_dim(&spec, max_dim)?;
    let checks = run_suite(&spec, suite, corrupt);
    let mut ok = true;
    for c in &checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skipped",
        };
        match (&c.detail, &c.first_discrepancy) {
            (_, Some(d)) => println!(
                "{}: {} at ({}, {}): found {}, expected {}",
                c.check, status, d.row, d.col, d.found, d.expected
            ),
            (Some(detail), None) => println!("{}: {} ({})", c.check, status, detail),
            (None, None) => println!("{}: {}", c.check, status),
        }
        match c.status {
            CheckStatus::Fail => ok = false,
            CheckStatus::Skipped if strict => ok = false,
            _ => {}
        }
    }
    let overall = if ok { "pass" } else { "fail" };
    println!("overall: {overall}");
    if let Some(path) = out {
        let report = RunReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec,
            checks,
            overall: overall.to_string(),
        };
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        fs::write(&path, text)?;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spectrum { spec, strict, out } => cmd_spectrum(spec, strict, out),
        Command::Build {
            spec,
            object,
            max_dim,
            out,
        } => cmd_build(spec, object, max_dim, out),
        Command::Verify {
            spec,
            suite,
            max_dim,
            out,
            strict,
            corrupt,
        } => cmd_verify(spec, suite, max_dim, out, strict, corrupt),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
