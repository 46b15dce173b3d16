//! Argument parsing and subcommand dispatch for the `bframe` binary.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use bframe_core::badjoint::{
    b_adjoint_from_basis, solve_b_adjoint, solve_reverse, v_star_norm_check, Uniqueness,
};
use bframe_core::stability::{douglas_transfer, omega_from_bases, sum_family, transformed_family};
use bframe_core::{
    Bounds, Domain, Error, FrameFamily, OperatorOnB, OperatorOnZ, StabilityReport, Vector,
};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, InstanceError, SpaceTag};
use crate::report::{Check, Report};
use crate::suite;

pub const DEFAULT_SEED: u64 = 0xBF4A7E;

#[derive(Debug, Parser)]
#[command(
    name = "bframe",
    version,
    about = "Verify b-frames and K-b-frames of finite-dimensional bilinear maps"
)]
pub struct Cli {
    /// Absolute tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Also write a JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Seed for sampled checks; decimal or 0x-prefixed hex.
    #[arg(long, global = true, default_value = "0xBF4A7E", value_parser = parse_seed)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.replace('_', "");
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Instance file.
    pub instance: PathBuf,
    /// Family name in the instance.
    #[arg(long)]
    pub family: String,
    /// Operator on Z; omitted means the identity.
    #[arg(long = "K", value_name = "NAME")]
    pub k: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Full,
    Range,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify frame bounds A <= B.
    Check {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long = "A")]
        a: f64,
        #[arg(long = "B")]
        b: f64,
        /// Where the lower inequality is tested.
        #[arg(long, value_enum, default_value = "full")]
        domain: DomainArg,
    },
    /// Optimal frame bounds.
    Bounds {
        #[command(flatten)]
        fam: FamilyArgs,
    },
    /// Reconstruct a given z, or random samples (from range(K) when K is given).
    Reconstruct {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Comma-separated coordinates of z.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        z: Option<Vec<f64>>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// b-adjoint of U, or the reverse problem for V.
    #[command(group(ArgGroup::new("mode").required(true).args(["u", "solve_u"])))]
    Badjoint {
        instance: PathBuf,
        /// Operator on B.
        #[arg(long = "U", value_name = "NAME")]
        u: Option<String>,
        /// b-orthonormal spanning family for the explicit formula.
        #[arg(long, requires = "u")]
        basis: Option<String>,
        /// Look for U with the given b-adjoint V.
        #[arg(long, requires = "v")]
        solve_u: bool,
        #[arg(long = "V", value_name = "NAME")]
        v: Option<String>,
    },
    /// Stability of frame properties under perturbations.
    #[command(group(ArgGroup::new("op").required(true).args(["sum", "douglas", "omega", "transform"])))]
    Stability {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Add this family termwise.
        #[arg(long, value_name = "FAMILY")]
        sum: Option<String>,
        /// Move bounds to this operator on Z.
        #[arg(long, value_name = "NAME", requires_all = ["a", "b"])]
        douglas: Option<String>,
        /// b-orthonormal basis defining Omega.
        #[arg(long, value_name = "FAMILY")]
        omega: Option<String>,
        /// Operator on B applied to the family.
        #[arg(long, value_name = "NAME")]
        transform: Option<String>,
        #[arg(long = "A")]
        a: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
    },
    /// Run every built-in example check.
    PaperSuite,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Instance(InstanceError::Math(e))
    }
}

impl CliError {
    /// 1 for a failed mathematical hypothesis, 2 for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Instance(InstanceError::Math(e)) => math_exit_code(e),
            _ => 2,
        }
    }
}

fn math_exit_code(e: &Error) -> i32 {
    match e {
        Error::NotPsd { .. }
        | Error::NotComplete
        | Error::NotBOrthonormal { .. }
        | Error::NotSpanning
        | Error::NotKFrame
        | Error::SingularOnRange
        | Error::NotSurjectiveOnRange
        | Error::RangeNotIncluded { .. } => 1,
        _ => 2,
    }
}

struct Loaded {
    inst: Instance,
    bm: bframe_core::BilinearMap,
}

impl Loaded {
    fn open(path: &Path) -> Result<Self, CliError> {
        let inst = Instance::parse_file(path)?;
        let bm = inst.bilinear()?;
        Ok(Loaded { inst, bm })
    }

    fn frame(&self, fam: &FamilyArgs) -> Result<FrameFamily<'_>, CliError> {
        let ff = FrameFamily::new(&self.bm, self.inst.family(&fam.family)?)?;
        Ok(match &fam.k {
            Some(k) => ff.with_k(self.inst.operator(k, SpaceTag::Z)?)?,
            None => ff,
        })
    }
}

/// Parses `argv`, runs the command, prints the report and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    print!("{}", report.human());
    if let Command::Badjoint { solve_u: true, .. } = cli.command {
        let c = &report.checks[0];
        let verdict = if c.passed { "FEASIBLE" } else { "INFEASIBLE" };
        println!(
            "{verdict} residual={}",
            crate::report::fmt_num(c.values["residual"].as_f64().unwrap_or(f64::NAN))
        );
    }
    if let Some(path) = &cli.json {
        if let Err(e) = report.write_json(path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if report.passed {
        0
    } else {
        1
    }
}

/// Runs a parsed command and returns its report without printing.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let name_of = |p: &PathBuf| Some(p.display().to_string());
    match &cli.command {
        Command::Check { fam, a, b, domain } => {
            let l = Loaded::open(&fam.instance)?;
            let ff = l.frame(fam)?;
            let dom = match domain {
                DomainArg::Full => Domain::FullSpace,
                DomainArg::Range => Domain::RangeOfK,
            };
            let rep = ff.verify_k_frame_on(*a, *b, dom)?;
            let mut r = Report::new("check", name_of(&fam.instance), cli.seed, tol);
            let label = if fam.k.is_some() {
                "K-b-frame"
            } else {
                "b-frame"
            };
            r.push(
                Check::new(label, rep.is_k_frame)
                    .value("A", *a)
                    .value("B", *b)
                    .value("lower_margin", rep.lower_margin)
                    .value("upper_margin", rep.upper_margin)
                    .flag("bessel", rep.is_bessel)
                    .flag("tight", rep.is_tight)
                    .flag("parseval", rep.is_parseval),
            );
            Ok(r)
        }
        Command::Bounds { fam } => {
            let l = Loaded::open(&fam.instance)?;
            let ff = l.frame(fam)?;
            let b = ff.optimal_bounds();
            let lower = match fam.k {
                Some(_) => ff.optimal_k_lower_bound()?,
                None => b.lower,
            };
            let mut r = Report::new("bounds", name_of(&fam.instance), cli.seed, tol);
            r.push(
                Check::new("bounds", true)
                    .value("A_opt", lower)
                    .value("B_opt", b.upper)
                    .flag("frame", lower > 0.0),
            );
            Ok(r)
        }
        Command::Reconstruct { fam, z, samples } => {
            let l = Loaded::open(&fam.instance)?;
            let ff = l.frame(fam)?;
            let mut r = Report::new("reconstruct", name_of(&fam.instance), cli.seed, tol);
            match z {
                Some(z) => {
                    let z = Vector::from_slice(z);
                    let rec = ff.reconstruct(&z)?;
                    r.push(
                        Check::new("reconstruct", rec.relative_residual <= tol)
                            .vector("z_hat", rec.z_hat.as_slice())
                            .value("relative_residual", rec.relative_residual),
                    );
                }
                None => {
                    let k = ff.k_or_identity();
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let mut worst: f64 = 0.0;
                    for _ in 0..*samples {
                        let w: Vector = (0..l.bm.dim_z())
                            .map(|_| rng.random_range(-1.0..1.0))
                            .collect();
                        worst = worst.max(ff.reconstruct(&k.mul_vec(&w))?.relative_residual);
                    }
                    r.push(
                        Check::new("reconstruct", worst <= tol)
                            .value("samples", *samples as f64)
                            .value("max_relative_residual", worst),
                    );
                }
            }
            Ok(r)
        }
        Command::Badjoint {
            instance,
            u,
            basis,
            v,
            ..
        } => {
            let l = Loaded::open(instance)?;
            let nb = l.bm.dim_b();
            let nz = l.bm.dim_z();
            let mut r = Report::new("badjoint", name_of(instance), cli.seed, tol);
            if let Some(u) = u {
                let u = OperatorOnB::new(l.inst.operator(u, SpaceTag::B)?, nb)?;
                let sol = solve_b_adjoint(&l.bm, &u, tol)?;
                let mut c = Check::new("b-adjoint", sol.feasible)
                    .matrix("V", sol.v.matrix())
                    .value("residual", sol.residual)
                    .flag("unique", sol.uniqueness == Uniqueness::Unique);
                if let Some(basis) = basis {
                    let fam = l.inst.family(basis)?;
                    let explicit = b_adjoint_from_basis(&l.bm, &fam, &u)?;
                    let diff = explicit.matrix().max_abs_diff(sol.v.matrix());
                    let norm = v_star_norm_check(&l.bm, &fam, &u)?;
                    c = c
                        .value("basis_formula_diff", diff)
                        .value("v_star_norm_lhs", norm.lhs)
                        .value("v_star_norm_rhs", norm.rhs);
                    c.passed &= diff <= tol * sol.v.matrix().max_abs().max(1.0) && norm.holds;
                }
                r.push(c);
            } else {
                let name = v.as_deref().expect("clap requires --V");
                let v = OperatorOnZ::new(l.inst.operator(name, SpaceTag::Z)?, nz)?;
                let sol = solve_reverse(&l.bm, &v, tol)?;
                r.push(
                    Check::new("reverse", sol.feasible)
                        .matrix("U", sol.u.matrix())
                        .value("residual", sol.residual)
                        .flag("unique", sol.uniqueness == Uniqueness::Unique),
                );
            }
            Ok(r)
        }
        Command::Stability {
            fam,
            sum,
            douglas,
            omega,
            transform,
            a,
            b,
        } => {
            let l = Loaded::open(&fam.instance)?;
            let ff = l.frame(fam)?;
            let given = match (a, b) {
                (Some(a), Some(b)) => Some(Bounds::new(*a, *b)),
                (None, None) => None,
                _ => return Err(CliError::Usage("--A and --B go together".into())),
            };
            let k = match &fam.k {
                Some(k) => Some(l.inst.operator(k, SpaceTag::Z)?),
                None => None,
            };
            let (label, rep) = if let Some(y) = sum {
                let mut fy = FrameFamily::new(&l.bm, l.inst.family(y)?)?;
                if let Some(k) = &k {
                    fy = fy.with_k(k.clone())?;
                }
                ("sum", sum_family(&ff, &fy, cli.seed)?)
            } else if let Some(q) = douglas {
                let q = l.inst.operator(q, SpaceTag::Z)?;
                (
                    "douglas",
                    douglas_transfer(&ff, &q, given.expect("clap requires bounds"))?,
                )
            } else if let Some(y) = omega {
                let y = l.inst.family(y)?;
                (
                    "omega",
                    omega_from_bases(&l.bm, &y, ff.family(), k.as_ref())?,
                )
            } else {
                let name = transform.as_deref().expect("clap requires one operation");
                let u = OperatorOnB::new(l.inst.operator(name, SpaceTag::B)?, l.bm.dim_b())?;
                let basis = ff.family().clone();
                (
                    "transform",
                    transformed_family(&l.bm, &basis, &u, k.as_ref(), given, cli.seed)?,
                )
            };
            let mut r = Report::new("stability", name_of(&fam.instance), cli.seed, tol);
            r.push(stability_check(label, &rep));
            Ok(r)
        }
        Command::PaperSuite => {
            let mut r = Report::new("paper-suite", None, cli.seed, tol);
            for c in suite::run_all(cli.seed) {
                r.push(c);
            }
            Ok(r)
        }
    }
}

fn stability_check(label: &str, rep: &StabilityReport) -> Check {
    let mut c = Check::new(label, rep.claim_holds)
        .value("claimed_A", rep.claimed.lower)
        .value("claimed_B", rep.claimed.upper)
        .value("measured_A", rep.measured.lower)
        .value("measured_B", rep.measured.upper)
        .flag("frame_retained", rep.frame_retained);
    for (k, v) in &rep.metrics {
        c = c.value(k, *v);
    }
    if let Some(op) = &rep.operator {
        c = c.matrix("operator", op);
    }
    for n in &rep.notes {
        c = c.note(n.clone());
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_accept_hex() {
        assert_eq!(parse_seed("0xBF4A7E"), Ok(DEFAULT_SEED));
        assert_eq!(parse_seed("0xB_F4A7E"), Ok(DEFAULT_SEED));
        assert_eq!(parse_seed("12"), Ok(12));
        assert!(parse_seed("zz").is_err());
    }

    #[test]
    fn default_seed_and_tol() {
        let cli = Cli::try_parse_from(["bframe", "paper-suite"]).unwrap();
        assert_eq!(cli.seed, DEFAULT_SEED);
        assert_eq!(cli.tol, 1e-8);
    }

    #[test]
    fn input_errors_exit_two() {
        assert_eq!(
            math_exit_code(&Error::InvalidBounds {
                lower: 2.0,
                upper: 1.0
            }),
            2
        );
        assert_eq!(math_exit_code(&Error::NotSpanning), 1);
        assert_eq!(run_command(["bframe", "bounds"]), 2);
        assert_eq!(
            run_command(["bframe", "bounds", "/nonexistent.json", "--family", "y"]),
            2
        );
    }

    #[test]
    fn badjoint_needs_a_mode() {
        assert!(Cli::try_parse_from(["bframe", "badjoint", "x.json"]).is_err());
        assert!(Cli::try_parse_from(["bframe", "badjoint", "x.json", "--solve-u"]).is_err());
        assert!(
            Cli::try_parse_from(["bframe", "badjoint", "x.json", "--solve-u", "--V", "V"]).is_ok()
        );
    }
}
