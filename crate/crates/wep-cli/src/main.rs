//! Command-line front end: loads matrices and weights from text files, runs
//! the pseudoinverse/factorization/EP analyses and prints structured
//! `key = value` reports (prose only in trailing `#` comments).
//!
//! Exit codes: `ep-check` uses 0 = consistent and EP, 1 = consistent and not
//! EP, 2 = the statement suites disagree with the direct verdict (the
//! characterizations are provably equivalent, so 2 means a library bug);
//! `fuzz` uses 0/2 the same way. Usage
//! misuse exits 64, runtime failures (unreadable files, invalid weights,
//! undecidable sampled verdicts) exit 70.

mod matfile;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matfile::{read_matrix, write_matrix};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use wep_core::epcheck::{
    self, cstar_congruence_check, ep_statement_suite_bc, ep_statement_suite_sa,
    generate_instance, generate_instance_aligned, is_weighted_ep, weight_swap_suite, EpReport,
};
use wep_core::factor::{
    canonical_ep_decomposition, ep_block_decomposition, factor_parts_wmp, full_rank_factorize,
    reverse_order_wmp,
};
use wep_core::hermitian::{
    is_hermitian, is_hermitian_weighted, numerical_range, positivity_violation,
    sampled_isometry_defect,
};
use wep_core::matcore::{rank, rel_diff, rel_residual};
use wep_core::wmp::{mp_inverse, wmp_inverse, WmpVerdict};
use wep_core::{CMatrix, Error, NormContext, NormKind, Tolerance, Weight};

#[derive(Parser)]
#[command(name = "wep", version, about = "weighted EP analysis of complex matrices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Moore-Penrose inverse with the four-condition residual report
    Pinv(PinvArgs),
    /// Weighted Moore-Penrose inverse for a positive weight pair
    Wpinv(WpinvArgs),
    /// Direct weighted-EP verdict plus every equivalent statement family
    EpCheck(EpCheckArgs),
    /// Full-rank, block or canonical corner factorization
    Factorize(FactorizeArgs),
    /// Hermitian/positive verdicts for an algebra element
    HermitianCheck(HermArgs),
    /// Randomized cross-verification of the statement suites
    Fuzz(RunConfig),
}

#[derive(Args)]
struct PinvArgs {
    /// Input matrix file
    #[arg(short, long)]
    input: PathBuf,
    /// Write the pseudoinverse here
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Override the relative residual tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct WpinvArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Codomain weight file
    #[arg(short = 'E', long = "weight-e")]
    weight_e: PathBuf,
    /// Domain weight file
    #[arg(short = 'F', long = "weight-f")]
    weight_f: PathBuf,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EpCheckArgs {
    /// Input matrix file (omit when synthesizing)
    #[arg(short, long, conflicts_with = "synthesize")]
    input: Option<PathBuf>,
    #[arg(short = 'E', long = "weight-e", conflicts_with = "synthesize")]
    weight_e: Option<PathBuf>,
    #[arg(short = 'F', long = "weight-f", conflicts_with = "synthesize")]
    weight_f: Option<PathBuf>,
    /// Generate the instance instead of reading files
    #[arg(long, value_enum)]
    synthesize: Option<Class>,
    /// Dimension of a synthesized instance
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Rank of a synthesized instance (default: half the dimension)
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct FactorizeArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short = 'E', long = "weight-e")]
    weight_e: Option<PathBuf>,
    #[arg(short = 'F', long = "weight-f")]
    weight_f: Option<PathBuf>,
    /// Third weight for the factor-inverse chain (outer domain)
    #[arg(short = 'H', long = "weight-h")]
    weight_h: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Fullrank)]
    mode: Mode,
    /// Prefix for emitted factor files (<prefix>.b.mat, ...)
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct HermArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Optional weight: also test hermitianness in the weighted algebra
    #[arg(short = 'E', long = "weight-e")]
    weight_e: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long)]
    tol: Option<f64>,
    /// Also print this many numerical-range samples
    #[arg(long, default_value_t = 0)]
    range_samples: usize,
}

#[derive(Args)]
struct RunConfig {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 6)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = Norm::L2)]
    norm: Norm,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    fn context(self) -> NormContext {
        match self {
            Norm::L1 => NormContext::l1(),
            Norm::L2 => NormContext::l2(),
            Norm::Linf => NormContext::linf(),
        }
    }
    fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Fullrank,
    Block,
    Canonical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Class {
    Ep,
    #[value(name = "non-ep")]
    NonEp,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

type CmdResult = Result<u8, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(msg: impl Into<String>) -> Failure {
    Failure::Runtime(msg.into())
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Report accumulator: stable `key = value` lines, prose kept to a trailing
/// comment block.
struct Report {
    lines: Vec<String>,
    comments: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            lines: vec![format!("command = {command}")],
            comments: Vec::new(),
        }
    }
    fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }
    fn residual(&mut self, key: &str, value: f64) {
        self.lines.push(format!("{key} = {value:.3e}"));
    }
    fn comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }
    fn tolerances(&mut self, tol: &Tolerance) {
        self.field("tol_rank_rel", format!("{:e}", tol.rank_rel));
        self.field("tol_residual_rel", format!("{:e}", tol.residual_rel));
        self.field("tol_herm_abs", format!("{:e}", tol.herm_abs));
    }
    fn print(self) {
        for l in self.lines {
            println!("{l}");
        }
        if !self.comments.is_empty() {
            println!("# comments:");
            for c in self.comments {
                println!("# {c}");
            }
        }
    }
}

/// Effective tolerance: defaults, then the WEP_TOL environment variable,
/// then the --tol flag (flags win). The override sets the residual bound.
fn effective_tolerance(flag: Option<f64>) -> Result<Tolerance, Failure> {
    let base = Tolerance::default();
    let mut residual = base.residual_rel;
    if let Ok(env) = std::env::var("WEP_TOL") {
        residual = env
            .parse()
            .map_err(|_| usage(format!("WEP_TOL: cannot parse `{env}` as a float")))?;
    }
    if let Some(x) = flag {
        residual = x;
    }
    Tolerance::new(base.rank_rel, residual, base.herm_abs)
        .map_err(|e| usage(format!("invalid tolerance: {e}")))
}

fn load_weight(path: &Path, ctx: &NormContext, tol: &Tolerance) -> Result<Weight, Failure> {
    let m = read_matrix(path).map_err(runtime)?;
    Weight::new(m, ctx, tol)
        .map_err(|e| runtime(format!("{}: weight validation failed: {e}", path.display())))
}

fn write_output(report: &mut Report, key: &str, path: &Path, m: &CMatrix) -> Result<(), Failure> {
    write_matrix(path, m).map_err(runtime)?;
    report.field(&format!("wrote.{key}"), path.display());
    Ok(())
}

fn suffixed(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(format!(".{suffix}.mat"));
    PathBuf::from(s)
}

fn cmd_pinv(args: &PinvArgs) -> CmdResult {
    let tol = effective_tolerance(args.tol)?;
    let a = read_matrix(&args.input).map_err(runtime)?;
    let x = mp_inverse(&a, &tol);
    let mut rep = Report::new("pinv");
    rep.field("input", args.input.display());
    rep.tolerances(&tol);
    rep.field("rows", a.rows());
    rep.field("cols", a.cols());
    let axa = &(&a * &x) * &a;
    let xax = &(&x * &a) * &x;
    let ax = &a * &x;
    let xa = &x * &a;
    rep.residual("res_axa", rel_diff(&axa, &a));
    rep.residual("res_xax", rel_diff(&xax, &x));
    rep.residual("res_ax_hermitian", rel_diff(&ax.adjoint(), &ax));
    rep.residual("res_xa_hermitian", rel_diff(&xa.adjoint(), &xa));
    if let Some(out) = &args.output {
        write_output(&mut rep, "pinv", out, &x)?;
    }
    rep.print();
    Ok(0)
}

fn cmd_wpinv(args: &WpinvArgs) -> CmdResult {
    let tol = effective_tolerance(args.tol)?;
    let ctx = args.norm.context();
    let a = read_matrix(&args.input).map_err(runtime)?;
    let e = load_weight(&args.weight_e, &ctx, &tol)?;
    let f = load_weight(&args.weight_f, &ctx, &tol)?;
    let res = wmp_inverse(&a, &e, &f, &ctx, &tol)?;
    let mut rep = Report::new("wpinv");
    rep.field("input", args.input.display());
    rep.field("norm", args.norm.name());
    rep.tolerances(&tol);
    rep.field("weight_e_valid", true);
    rep.field("weight_f_valid", true);
    rep.field(
        "verdict",
        match res.verdict {
            WmpVerdict::Verified => "verified",
            WmpVerdict::FailedVerification => "failed",
            WmpVerdict::Undetermined => "undetermined",
        },
    );
    rep.residual("res_asa", res.res_aba);
    rep.residual("res_sas", res.res_bab);
    rep.residual("herm_left_deviation", res.herm_left_dev);
    rep.residual("herm_right_deviation", res.herm_right_dev);
    if res.verdict == WmpVerdict::Undetermined {
        rep.comment("equations hold; hermitianness could not be certified by sampling");
    }
    if let Some(out) = &args.output {
        write_output(&mut rep, "wpinv", out, &res.pinv)?;
    }
    rep.print();
    match res.verdict {
        WmpVerdict::FailedVerification => Ok(2),
        _ => Ok(0),
    }
}

fn push_suite(rep: &mut Report, prefix: &str, suite: &EpReport) {
    rep.field(&format!("{prefix}.direct"), suite.direct);
    rep.residual(&format!("{prefix}.direct_residual"), suite.direct_residual);
    for s in &suite.statements {
        rep.field(&format!("{prefix}.{}.verdict", s.id), s.verdict);
        rep.residual(&format!("{prefix}.{}.residual", s.id), s.residual);
    }
    rep.field(&format!("{prefix}.consistent"), suite.consistent);
}

fn cmd_ep_check(args: &EpCheckArgs) -> CmdResult {
    let tol = effective_tolerance(args.tol)?;
    let ctx = args.norm.context();
    let (a, e, f) = match args.synthesize {
        Some(class) => {
            if args.norm != Norm::L2 {
                return Err(usage("--synthesize generates l2 instances; use --norm l2"));
            }
            if args.dim == 0 {
                return Err(usage("--dim must be at least 1"));
            }
            let rank = args.rank.unwrap_or(args.dim.div_ceil(2));
            if rank > args.dim {
                return Err(usage(format!(
                    "--rank {rank} exceeds --dim {}",
                    args.dim
                )));
            }
            generate_instance(args.dim, rank, class == Class::Ep, args.seed)
        }
        None => {
            let input = args
                .input
                .as_ref()
                .ok_or_else(|| usage("either --input or --synthesize is required"))?;
            let we = args
                .weight_e
                .as_ref()
                .ok_or_else(|| usage("-E is required when reading from files"))?;
            let wf = args
                .weight_f
                .as_ref()
                .ok_or_else(|| usage("-F is required when reading from files"))?;
            let a = read_matrix(input).map_err(runtime)?;
            if !a.is_square() {
                return Err(runtime(format!(
                    "{}: ep-check needs a square matrix, got {}x{}",
                    input.display(),
                    a.rows(),
                    a.cols()
                )));
            }
            (a, load_weight(we, &ctx, &tol)?, load_weight(wf, &ctx, &tol)?)
        }
    };

    let mut rep = Report::new("ep-check");
    rep.field("norm", args.norm.name());
    rep.tolerances(&tol);
    rep.field("dim", a.rows());

    let (direct, direct_residual) = is_weighted_ep(&a, &e, &f, &ctx, &tol)?;
    rep.field("direct", direct);
    rep.residual("direct_residual", direct_residual);

    let fr = full_rank_factorize(&a, &tol);
    rep.field("rank", fr.r);
    let inner = Weight::identity(fr.r);
    let bc = ep_statement_suite_bc(&a, &fr, &e, &inner, &f, &ctx, &tol)?;
    let sa = ep_statement_suite_sa(&a, &e, &f, &ctx, &tol)?;
    let swap = weight_swap_suite(&a, &e, &f, &ctx, &tol)?;
    push_suite(&mut rep, "bc", &bc);
    push_suite(&mut rep, "sa", &sa);
    push_suite(&mut rep, "swap", &swap);

    let mut consistent = bc.consistent && sa.consistent && swap.consistent;
    if args.norm == Norm::L2 {
        match cstar_congruence_check(&a, &e, &f, &ctx, &tol) {
            Ok(v) => {
                rep.field("congruence.verdict", v);
                consistent = consistent && v == direct;
            }
            Err(Error::NotWeightedEp { .. }) => {
                rep.field("congruence.rejected_non_ep", true);
                consistent = consistent && !direct;
            }
            Err(e) => return Err(e.into()),
        }
    }
    rep.field("consistent", consistent);
    let code = if !consistent {
        rep.comment("statement suites disagree with the direct verdict: library invariant broken");
        2
    } else if direct {
        0
    } else {
        1
    };
    rep.field("exit_code", code);
    rep.print();
    Ok(code)
}

fn cmd_factorize(args: &FactorizeArgs) -> CmdResult {
    let tol = effective_tolerance(args.tol)?;
    let ctx = args.norm.context();
    let a = read_matrix(&args.input).map_err(runtime)?;
    let mut rep = Report::new("factorize");
    rep.field("input", args.input.display());
    rep.field("norm", args.norm.name());
    rep.tolerances(&tol);

    let weight = |p: &Option<PathBuf>, name: &str| -> Result<Option<Weight>, Failure> {
        match p {
            Some(p) => Ok(Some(load_weight(p, &ctx, &tol)?)),
            None if args.mode != Mode::Fullrank => {
                Err(usage(format!("--mode {} requires {name}", mode_name(args.mode))))
            }
            None => Ok(None),
        }
    };

    match args.mode {
        Mode::Fullrank => {
            rep.field("mode", "fullrank");
            let fr = full_rank_factorize(&a, &tol);
            rep.field("rank", fr.r);
            rep.field("degenerate", fr.is_degenerate());
            rep.residual("recon_residual", rel_diff(&(&fr.b * &fr.c), &a));
            if let (Some(e), Some(f), Some(h)) = (
                weight(&args.weight_e, "-E")?,
                args.weight_f
                    .as_ref()
                    .map(|p| load_weight(p, &ctx, &tol))
                    .transpose()?,
                args.weight_h
                    .as_ref()
                    .map(|p| load_weight(p, &ctx, &tol))
                    .transpose()?,
            ) {
                let (b_dag, c_dag) = factor_parts_wmp(&a, &fr, &e, &f, &h, &ctx, &tol)?;
                let ident = CMatrix::identity(fr.r);
                rep.residual(
                    "left_inverse_residual",
                    rel_diff(&(&b_dag * &fr.b), &ident),
                );
                rep.residual(
                    "right_inverse_residual",
                    rel_diff(&(&fr.c * &c_dag), &ident),
                );
                let rol = reverse_order_wmp(&a, &fr, &b_dag, &c_dag, &e, &h, &ctx, &tol)?;
                let direct = wmp_inverse(&a, &e, &h, &ctx, &tol)?;
                rep.residual("reverse_order_residual", rel_diff(&rol, &direct.pinv));
                if let Some(out) = &args.output {
                    write_output(&mut rep, "bdag", &suffixed(out, "bdag"), &b_dag)?;
                    write_output(&mut rep, "cdag", &suffixed(out, "cdag"), &c_dag)?;
                }
            }
            if let Some(out) = &args.output {
                write_output(&mut rep, "b", &suffixed(out, "b"), &fr.b)?;
                write_output(&mut rep, "c", &suffixed(out, "c"), &fr.c)?;
            }
        }
        Mode::Block => {
            rep.field("mode", "block");
            let e = weight(&args.weight_e, "-E")?.expect("checked");
            let f = weight(&args.weight_f, "-F")?.expect("checked");
            let d = ep_block_decomposition(&a, &e, &f, &ctx, &tol).map_err(|err| match err {
                Error::NotWeightedEp { residual } => runtime(format!(
                    "input is not weighted EP (commutator residual {residual:.3e}); \
                     block form needs an EP element"
                )),
                other => other.into(),
            })?;
            let n = a.rows();
            let r = d.t1.rows();
            rep.field("rank", r);
            let j_inv = wep_core::matcore::inverse(&d.j)?;
            let zero = CMatrix::zeros(n - r, n - r);
            let recon = &(&d.j * &CMatrix::block_diag(&[&d.t1, &zero])) * &j_inv;
            rep.residual("recon_residual", rel_diff(&recon, &a));
            rep.field("t1_invertible", r == 0 || rank(&d.t1, &tol) == r);
            let ident_r = CMatrix::identity(r);
            let ident_c = CMatrix::identity(n - r);
            let zero_r = CMatrix::zeros(r, r);
            let q1 = &(&d.j * &CMatrix::block_diag(&[&ident_r, &zero])) * &j_inv;
            let q2 = &(&d.j * &CMatrix::block_diag(&[&zero_r, &ident_c])) * &j_inv;
            rep.residual(
                "range_idempotent_herm_deviation",
                is_hermitian_weighted(&q1, &e, &ctx, &tol).deviation,
            );
            rep.residual(
                "null_idempotent_herm_deviation",
                is_hermitian_weighted(&q2, &f, &ctx, &tol).deviation,
            );
            if let Some(out) = &args.output {
                write_output(&mut rep, "t1", &suffixed(out, "t1"), &d.t1)?;
                write_output(&mut rep, "j", &suffixed(out, "j"), &d.j)?;
                write_output(&mut rep, "x1", &suffixed(out, "x1"), &d.x1_basis)?;
                write_output(&mut rep, "x2", &suffixed(out, "x2"), &d.x2_basis)?;
            }
        }
        Mode::Canonical => {
            rep.field("mode", "canonical");
            let e = weight(&args.weight_e, "-E")?.expect("checked");
            let f = weight(&args.weight_f, "-F")?.expect("checked");
            let d = canonical_ep_decomposition(&a, &e, &f, &ctx, &tol).map_err(|err| match err {
                Error::NotWeightedEp { residual } => runtime(format!(
                    "input is not weighted EP (commutator residual {residual:.3e}); \
                     canonical form needs an EP element"
                )),
                other => other.into(),
            })?;
            rep.field("degenerate", d.degenerate);
            rep.residual("recon_residual", rel_diff(&d.core, &a));
            rep.residual(
                "idempotent_residual",
                rel_residual(&(&(&d.p * &d.p) - &d.p), d.p.fro_norm()),
            );
            if let Some(out) = &args.output {
                write_output(&mut rep, "c", &suffixed(out, "c"), &d.c)?;
                write_output(&mut rep, "p", &suffixed(out, "p"), &d.p)?;
                write_output(&mut rep, "core", &suffixed(out, "core"), &d.core)?;
            }
        }
    }
    rep.print();
    Ok(0)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Fullrank => "fullrank",
        Mode::Block => "block",
        Mode::Canonical => "canonical",
    }
}

fn cmd_hermitian_check(args: &HermArgs) -> CmdResult {
    let tol = effective_tolerance(args.tol)?;
    let ctx = args.norm.context();
    let a = read_matrix(&args.input).map_err(runtime)?;
    if !a.is_square() {
        return Err(runtime(format!(
            "{}: hermitian-check needs a square matrix",
            args.input.display()
        )));
    }
    let mut rep = Report::new("hermitian-check");
    rep.field("input", args.input.display());
    rep.field("norm", args.norm.name());
    rep.tolerances(&tol);
    let check = is_hermitian(&a, &ctx, &tol);
    rep.field("hermitian", check.hermitian);
    rep.residual("deviation", check.deviation);
    rep.field(
        "criterion",
        if ctx.kind() == NormKind::L2 {
            "exact_adjoint"
        } else {
            "sampled_isometry"
        },
    );
    rep.residual("sampled_defect", sampled_isometry_defect(&a, &ctx));
    match positivity_violation(&a, &ctx, &tol) {
        None => rep.field("positive", true),
        Some(why) => {
            rep.field("positive", false);
            rep.comment(format!("positivity fails: {why}"));
        }
    }
    if let Some(wp) = &args.weight_e {
        let e = load_weight(wp, &ctx, &tol)?;
        let wc = is_hermitian_weighted(&a, &e, &ctx, &tol);
        rep.field("weighted_hermitian", wc.hermitian);
        rep.residual("weighted_deviation", wc.deviation);
    }
    if args.range_samples > 0 {
        let pts = numerical_range(&a, args.range_samples)?;
        for (k, z) in pts.iter().enumerate() {
            rep.field(&format!("range.{k}"), format!("{:.6e} {:.6e}", z.re, z.im));
        }
    }
    rep.print();
    Ok(0)
}

struct TrialOutcome {
    class: &'static str,
    rank: usize,
    direct: Option<bool>,
    consistent: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    dim: usize,
    rank_req: usize,
    ep: bool,
    seed: u64,
    norm: Norm,
    ctx: &NormContext,
    tol: &Tolerance,
    worst_true: &mut f64,
    min_false: &mut f64,
) -> Result<TrialOutcome, Failure> {
    let class = if ep { "ep" } else { "non-ep" };
    let (a, e, f) = if norm == Norm::L2 {
        generate_instance(dim, rank_req, ep, seed)
    } else {
        generate_instance_aligned(dim, rank_req, ep, seed, ctx)
    };
    let direct = match is_weighted_ep(&a, &e, &f, ctx, tol) {
        Ok((v, _)) => v,
        Err(_) if norm != Norm::L2 => {
            // sampled contexts cannot always certify; count, do not judge
            return Ok(TrialOutcome {
                class,
                rank: rank_req,
                direct: None,
                consistent: None,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let fr = full_rank_factorize(&a, tol);
    let inner = if norm == Norm::L2 {
        epcheck::random_weight(fr.r, seed ^ 0x77ee_1155)
    } else {
        Weight::identity(fr.r)
    };
    let bc = ep_statement_suite_bc(&a, &fr, &e, &inner, &f, ctx, tol)?;
    let sa = ep_statement_suite_sa(&a, &e, &f, ctx, tol)?;
    let swap = weight_swap_suite(&a, &e, &f, ctx, tol)?;
    let mut consistent = bc.consistent && sa.consistent && swap.consistent;
    if norm == Norm::L2 {
        match cstar_congruence_check(&a, &e, &f, ctx, tol) {
            Ok(v) => consistent = consistent && v == direct,
            Err(Error::NotWeightedEp { .. }) => consistent = consistent && !direct,
            Err(e) => return Err(e.into()),
        }
    }
    for suite in [&bc, &sa, &swap] {
        for s in &suite.statements {
            if s.verdict {
                *worst_true = worst_true.max(s.residual);
            } else {
                *min_false = min_false.min(s.residual);
            }
        }
    }
    Ok(TrialOutcome {
        class,
        rank: fr.r,
        direct: Some(direct),
        consistent: Some(consistent),
    })
}

fn cmd_fuzz(cfg: &RunConfig) -> CmdResult {
    if cfg.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if cfg.dim == 0 {
        return Err(usage("--dim must be at least 1"));
    }
    let tol = effective_tolerance(cfg.tol)?;
    let ctx = cfg.norm.context();
    let mut rep = Report::new("fuzz");
    rep.field("norm", cfg.norm.name());
    rep.field("seed", cfg.seed);
    rep.field("trials", cfg.trials);
    rep.field("dim", cfg.dim);
    rep.tolerances(&tol);

    let mut ep_trials = 0usize;
    let mut non_ep_trials = 0usize;
    let mut undetermined = 0usize;
    let mut inconsistencies = 0usize;
    let mut worst_true = 0.0f64;
    let mut min_false = f64::INFINITY;

    for k in 0..cfg.trials {
        let ep = k % 2 == 0;
        let rank_req = if ep {
            (k / 2) % (cfg.dim + 1)
        } else if cfg.dim >= 2 {
            1 + (k / 2) % (cfg.dim - 1).max(1)
        } else {
            1
        };
        let outcome = run_trial(
            cfg.dim,
            rank_req,
            ep,
            cfg.seed.wrapping_add(k as u64),
            cfg.norm,
            &ctx,
            &tol,
            &mut worst_true,
            &mut min_false,
        )?;
        let (direct_s, consistent_s) = match (outcome.direct, outcome.consistent) {
            (Some(d), Some(c)) => {
                if d {
                    ep_trials += 1;
                } else {
                    non_ep_trials += 1;
                }
                if !c {
                    inconsistencies += 1;
                }
                (d.to_string(), if c { "yes" } else { "no" }.to_string())
            }
            _ => {
                undetermined += 1;
                ("undetermined".to_string(), "skipped".to_string())
            }
        };
        rep.field(
            &format!("trial.{k}"),
            format!(
                "class={} rank={} direct={} consistent={}",
                outcome.class, outcome.rank, direct_s, consistent_s
            ),
        );
    }
    rep.field("ep_trials", ep_trials);
    rep.field("non_ep_trials", non_ep_trials);
    rep.field("undetermined_trials", undetermined);
    rep.field("inconsistencies", inconsistencies);
    rep.residual("worst_true_statement_residual", worst_true);
    if min_false.is_finite() {
        rep.residual("min_false_statement_residual", min_false);
    }
    let code = if inconsistencies > 0 { 2 } else { 0 };
    rep.field("exit_code", code);
    if code != 0 {
        rep.comment("some statement suite disagreed with the direct verdict");
    }
    rep.print();
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Pinv(a) => cmd_pinv(a),
        Cmd::Wpinv(a) => cmd_wpinv(a),
        Cmd::EpCheck(a) => cmd_ep_check(a),
        Cmd::Factorize(a) => cmd_factorize(a),
        Cmd::HermitianCheck(a) => cmd_hermitian_check(a),
        Cmd::Fuzz(a) => cmd_fuzz(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(70)
        }
    }
}
