//! Command-line front end. `run` parses arguments, dispatches, writes to the
//! given streams and returns the process exit code.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::catalog::OpSpec;
use crate::chern::{inverse_todd_of_operation, todd_of_operation, evaluate_genus, Bundle, BundleJson, Genus};
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::expr::{parse, polynomial_coefficients, resolve_operation, EvalContext, Expr, Value};
use crate::operations::{
    apply_operation, apply_to_thom, bockstein, bockstein_supported, graded_piece, graded_piece_supported,
    involves_weight_unit,
};
use crate::pushforward::{compose_pushforward, pushforward_supported, ProperMap};
use crate::ring::{Bidegree, Elem, ElemJson, Monomial};
use crate::series::Series;
use crate::spaces::{CoefficientMode, Space, SpaceDescriptor, ThomModule};
use crate::verify::{reverify, run_instance, verify_all, Check, Instance, Report, SuiteReport};
use crate::workspace::{Workspace, WORKSPACE_ENV};

/// JSON Schema for every `--format json` output.
pub const OUTPUT_SCHEMA: &str = include_str!("../schemas/charcalc-output.schema.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "charcalc", version, about = "Characteristic classes, operations and pushforwards over F_l")]
struct Cli {
    /// Coefficient prime l (defaults to the workspace setting).
    #[arg(long, global = true)]
    prime: Option<u32>,
    /// Work in the l = p regime (the characteristic equals the coefficient prime).
    #[arg(long, global = true)]
    char_p: bool,
    /// Adjoin the weight unit theta to every ring.
    #[arg(long, global = true)]
    weight_unit: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Workspace file (defaults to $CHARCALC_WORKSPACE, then the built-in workspace).
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect spaces.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Inspect bundles.
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Evaluate multiplicative genera.
    #[command(subcommand)]
    Genus(GenusCmd),
    /// Apply ring operations.
    #[command(subcommand)]
    Op(OpCmd),
    /// Push a class forward along a named map.
    Push(PushArgs),
    /// Run theorem checkers.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Create, show or normalize workspace files.
    #[command(subcommand)]
    Workspace(WorkspaceCmd),
    /// Print the JSON Schema of the `--format json` outputs.
    Schema,
}

#[derive(Debug, Subcommand)]
enum SpaceCmd {
    /// Generators, relations and the per-bidegree basis table.
    Show { name: String },
    List,
}

#[derive(Debug, Subcommand)]
enum BundleCmd {
    /// Chern classes of a bundle (`NAME` or `SPACE:NAME` for a stored bundle).
    Show { name: String },
    List,
}

#[derive(Debug, Subcommand)]
enum GenusCmd {
    Eval(GenusArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenusKind {
    Itd,
    Td,
}

#[derive(Debug, Args)]
struct GenusArgs {
    /// Operation whose (inverse) Todd genus is evaluated.
    #[arg(long, conflicts_with = "series", required_unless_present = "series")]
    op: Option<String>,
    /// One-variable series g(u), e.g. "1 + u".
    #[arg(long)]
    series: Option<String>,
    #[arg(long, value_enum, default_value_t = GenusKind::Itd)]
    kind: GenusKind,
    #[arg(long)]
    bundle: String,
    /// Print the evaluated class instead of the universal polynomial.
    #[arg(long)]
    evaluate: bool,
}

#[derive(Debug, Subcommand)]
enum OpCmd {
    Apply(OpArgs),
}

#[derive(Debug, Args)]
struct OpArgs {
    #[arg(long)]
    op: String,
    #[arg(long, required_unless_present = "embedding")]
    space: Option<String>,
    /// Evaluate in the Thom module of this embedding (`tau` in scope).
    #[arg(long, conflicts_with = "space")]
    embedding: Option<String>,
    #[arg(long)]
    expr: String,
    /// Bundle for td(..)/itd(..) inside the expression.
    #[arg(long)]
    bundle: Option<String>,
    /// Keep only the s-th graded piece.
    #[arg(long)]
    piece: Option<u32>,
    /// Apply the Bockstein to the result.
    #[arg(long)]
    bockstein: bool,
}

#[derive(Debug, Args)]
struct PushArgs {
    #[arg(long)]
    map: String,
    #[arg(long)]
    expr: String,
}

#[derive(Debug, Subcommand)]
enum VerifyCmd {
    Wu {
        #[arg(long)]
        embedding: String,
        #[arg(long)]
        op: String,
        #[arg(long, default_value = "1")]
        expr: String,
    },
    Grr {
        #[arg(long)]
        map: String,
        #[arg(long)]
        op: String,
        #[arg(long, default_value = "1")]
        expr: String,
    },
    Vanishing {
        #[arg(long)]
        embedding: String,
        #[arg(long)]
        op: String,
        #[arg(long)]
        s: u32,
    },
    Transfer {
        #[arg(long)]
        map: String,
        #[arg(long)]
        op: String,
    },
    Degree {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        s: u32,
    },
    Bockstein {
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "1")]
        expr: String,
    },
    /// The full suite for one prime.
    All {
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        /// Print every report, not only failures.
        #[arg(long)]
        verbose: bool,
    },
    /// Re-run the instances recorded in a JSON report or suite and compare bytes.
    Replay { file: PathBuf },
}

#[derive(Debug, Subcommand)]
enum WorkspaceCmd {
    /// Write the built-in workspace to the workspace path.
    Init {
        #[arg(long)]
        force: bool,
    },
    Show,
    /// Rewrite the workspace file in canonical form.
    Normalize,
}

/// Output of `space show`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceShow {
    pub name: String,
    pub descriptor: SpaceDescriptor,
    pub dim: usize,
    pub generators: Vec<GeneratorShow>,
    pub relations: Vec<String>,
    pub basis: Vec<BasisRow>,
    pub tangent: Option<BundleJson>,
    pub bundles: Vec<BundleJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GeneratorShow {
    pub name: String,
    pub bidegree: Bidegree,
    pub integral: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BasisRow {
    pub bidegree: Bidegree,
    pub monomials: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BundleShow {
    pub space: String,
    #[serde(flatten)]
    pub bundle: BundleJson,
    pub total: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GenusEval {
    pub genus: String,
    pub series: String,
    pub bundle: String,
    pub rank: usize,
    pub universal: String,
    pub value: String,
    pub value_terms: ElemJson,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpApply {
    pub op: String,
    pub space: String,
    pub input: String,
    pub result: String,
    pub supported: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PushResult {
    pub map: String,
    pub input: String,
    pub result: String,
    pub supported: bool,
    pub shift: Bidegree,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Replay {
    pub reports: usize,
    pub identical: bool,
    pub passed: bool,
    pub mismatches: Vec<String>,
}

struct Session {
    workspace: Workspace,
    workspace_path: Option<PathBuf>,
    prime: Prime,
    mode: CoefficientMode,
    char_p: bool,
}

struct Emit {
    text: String,
    json: String,
    code: i32,
}

impl Emit {
    fn new<T: Serialize>(text: String, value: &T, code: i32) -> Emit {
        let mut json = serde_json::to_string_pretty(value).expect("output serializes");
        json.push('\n');
        Emit { text, json, code }
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(e) => {
            let body = match format {
                Format::Text => e.text,
                Format::Json => e.json,
            };
            let _ = write!(out, "{body}");
            if !body.ends_with('\n') {
                let _ = writeln!(out);
            }
            e.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Usage-type errors exit with 2, mathematical obstructions with 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Syntax { .. } | Error::Io(_) | Error::Json(_) | Error::NotPrime(_) => EXIT_USAGE,
        Error::NotWellDefined { .. }
        | Error::NotInvertible
        | Error::ContractViolation(_)
        | Error::Presentation(_) => EXIT_FAIL,
    }
}

fn workspace_path(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(WORKSPACE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn dispatch(cli: Cli) -> Result<Emit> {
    let path = workspace_path(cli.workspace);
    if let Command::Workspace(WorkspaceCmd::Init { force }) = &cli.command {
        return workspace_init(path.as_deref(), *force);
    }
    let workspace = match &path {
        Some(p) => Workspace::load(p)
            .map_err(|e| Error::usage(format!("cannot load workspace {}: {e}", p.display())))?,
        None => Workspace::builtin(),
    };
    let prime = Prime::new(cli.prime.unwrap_or(workspace.prime))?;
    let mode = if cli.weight_unit {
        CoefficientMode::WeightUnit
    } else {
        workspace.mode
    };
    let s = Session {
        workspace,
        workspace_path: path,
        prime,
        mode,
        // Naming the mod-p preset selects the l = p regime without --char-p.
        char_p: cli.char_p || format!("{:?}", cli.command).contains("qmodp"),
    };
    match cli.command {
        Command::Space(SpaceCmd::Show { name }) => s.space_show(&name),
        Command::Space(SpaceCmd::List) => {
            let names: Vec<&String> = s.workspace.spaces.keys().collect();
            Ok(Emit::new(join_lines(&names), &names, EXIT_OK))
        }
        Command::Bundle(BundleCmd::Show { name }) => s.bundle_show(&name),
        Command::Bundle(BundleCmd::List) => {
            let names: Vec<&String> = s.workspace.bundles.keys().collect();
            Ok(Emit::new(join_lines(&names), &names, EXIT_OK))
        }
        Command::Genus(GenusCmd::Eval(a)) => s.genus_eval(&a),
        Command::Op(OpCmd::Apply(a)) => s.op_apply(&a),
        Command::Push(a) => s.push(&a),
        Command::Verify(v) => s.verify(v),
        Command::Workspace(WorkspaceCmd::Show) => {
            let json = s.workspace.to_json();
            Ok(Emit {
                text: json.clone(),
                json,
                code: EXIT_OK,
            })
        }
        Command::Workspace(WorkspaceCmd::Normalize) => {
            let p = s
                .workspace_path
                .as_ref()
                .ok_or_else(|| Error::usage("no workspace file given (use --workspace or CHARCALC_WORKSPACE)"))?;
            s.workspace.save(p)?;
            let msg = format!("normalized {}", p.display());
            Ok(Emit::new(msg.clone(), &serde_json::json!({ "normalized": p }), EXIT_OK))
        }
        Command::Workspace(WorkspaceCmd::Init { .. }) => unreachable!("handled above"),
        Command::Schema => Ok(Emit {
            text: OUTPUT_SCHEMA.to_string(),
            json: OUTPUT_SCHEMA.to_string(),
            code: EXIT_OK,
        }),
    }
}

fn join_lines<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
}

fn workspace_init(path: Option<&Path>, force: bool) -> Result<Emit> {
    let p = path.ok_or_else(|| Error::usage("no workspace file given (use --workspace or CHARCALC_WORKSPACE)"))?;
    if p.exists() && !force {
        return Err(Error::usage(format!("{} exists; pass --force to overwrite", p.display())));
    }
    Workspace::builtin().save(p)?;
    let msg = format!("wrote {}", p.display());
    Ok(Emit::new(msg, &serde_json::json!({ "written": p }), EXIT_OK))
}

fn contains_tau(e: &Expr) -> bool {
    match e {
        Expr::Tau => true,
        Expr::Neg(x) | Expr::Pow(x, _) => contains_tau(x),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => contains_tau(a) || contains_tau(b),
        _ => false,
    }
}

fn format_relation(space: &Space, exps_terms: &[(i64, Vec<u32>)]) -> String {
    let ring = space.ring();
    let p = space.prime();
    let mut parts = Vec::new();
    for (c, e) in exps_terms {
        let c = p.reduce_signed(*c);
        if c == 0 {
            continue;
        }
        let mut e = e.clone();
        e.resize(ring.ngens(), 0);
        let m = ring.format_monomial(&Monomial(e));
        parts.push(match (c, m.as_str()) {
            (c, "1") => c.to_string(),
            (1, m) => m.to_string(),
            (c, m) => format!("{c}*{m}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl Session {
    fn op(&self, name: &str) -> Result<crate::operations::Operation> {
        resolve_operation(name, self.prime, self.char_p)
    }

    fn op_spec(&self, name: &str) -> Result<OpSpec> {
        Ok(OpSpec::of(&self.op(name)?))
    }

    /// `NAME` for a workspace bundle, `SPACE:NAME` for a bundle stored on a space.
    fn resolve_bundle(&self, name: &str) -> Result<(Arc<Space>, Bundle)> {
        if let Some((space, b)) = name.split_once(':') {
            let sp = self.workspace.space(space, self.prime, self.mode)?;
            let bundle = if b == "T" {
                sp.tangent().cloned()
            } else {
                sp.bundle(b).cloned()
            }
            .or_else(|| {
                self.workspace
                    .bundles_on(space, &sp)
                    .ok()?
                    .into_iter()
                    .find(|x| x.name() == b)
            })
            .ok_or_else(|| Error::usage(format!("space `{space}` carries no bundle `{b}`")))?;
            return Ok((sp, bundle.renamed(name)));
        }
        self.workspace.bundle(name, self.prime, self.mode)
    }

    fn space_show(&self, name: &str) -> Result<Emit> {
        let sp = self.workspace.space(name, self.prime, self.mode)?;
        let ring = sp.ring();
        let pres = ring.presentation();
        let generators: Vec<GeneratorShow> = ring
            .generators()
            .iter()
            .map(|g| GeneratorShow {
                name: g.name.clone(),
                bidegree: g.bidegree,
                integral: g.integral,
            })
            .collect();
        let relations: Vec<String> = pres.relations.iter().map(|r| format_relation(&sp, &r.0)).collect();
        let basis: Vec<BasisRow> = ring
            .basis_table()
            .into_iter()
            .map(|(d, ms)| BasisRow {
                bidegree: d,
                monomials: ms.iter().map(|m| ring.format_monomial(m)).collect(),
            })
            .collect();
        let mut bundles: Vec<BundleJson> = sp.bundles().iter().map(|b| b.to_json_value()).collect();
        bundles.extend(self.workspace.bundles_on(name, &sp)?.iter().map(|b| b.to_json_value()));
        let show = SpaceShow {
            name: name.to_string(),
            descriptor: sp.descriptor(),
            dim: sp.dim(),
            generators,
            relations,
            basis,
            tangent: sp.tangent().map(|t| t.to_json_value()),
            bundles,
        };
        let mut text = format!("{name} = {}  (dim {}, F_{})\n", crate::catalog::kind_label(sp.kind()), sp.dim(), self.prime);
        text += "generators:";
        for g in &show.generators {
            text += &format!(" {} {}", g.name, g.bidegree);
        }
        text += "\nrelations:";
        if show.relations.is_empty() {
            text += " none";
        }
        for r in &show.relations {
            text += &format!("\n  {r} = 0");
        }
        text += "\nbasis:";
        for row in &show.basis {
            text += &format!("\n  {:<8} {}", row.bidegree.to_string(), row.monomials.join(", "));
        }
        if let Some(t) = sp.tangent() {
            text += &format!("\ntangent: c(T) = {}", t.total());
        }
        for b in &show.bundles {
            text += &format!("\nbundle {} (rank {})", b.name, b.rank);
        }
        Ok(Emit::new(text, &show, EXIT_OK))
    }

    fn bundle_show(&self, name: &str) -> Result<Emit> {
        let (sp, b) = self.resolve_bundle(name)?;
        let show = BundleShow {
            space: sp.name().to_string(),
            bundle: b.to_json_value(),
            total: b.total().to_string(),
        };
        let mut text = format!("{name} on {} (rank {})\nc({name}) = {}", sp.name(), b.rank(), b.total());
        for (i, c) in show.bundle.chern_classes.iter().enumerate() {
            text += &format!("\nc{}({name}) = {c}", i + 1);
        }
        Ok(Emit::new(text, &show, EXIT_OK))
    }

    fn genus_eval(&self, a: &GenusArgs) -> Result<Emit> {
        let (_, b) = self.resolve_bundle(&a.bundle)?;
        let top = b.ring().top_weight();
        let genus = match (&a.op, &a.series) {
            (Some(op), _) => {
                let op = self.op(op)?;
                match a.kind {
                    GenusKind::Itd => inverse_todd_of_operation(&op, top as usize)?,
                    GenusKind::Td => todd_of_operation(&op, top as usize)?,
                }
            }
            (None, Some(text)) => {
                let coeffs = polynomial_coefficients(&parse(text)?, "u")?;
                Genus::new(text, Series::new("u", self.prime, &coeffs, top as usize))
            }
            (None, None) => unreachable!("clap requires --op or --series"),
        };
        let universal = genus.format_universal(b.rank(), top, &a.bundle);
        let value = evaluate_genus(&genus, &b)?;
        let out = GenusEval {
            genus: genus.label.clone(),
            series: genus.series.to_string(),
            bundle: a.bundle.clone(),
            rank: b.rank(),
            universal: universal.clone(),
            value: value.to_string(),
            value_terms: value.to_json_value(),
        };
        let text = if a.evaluate { value.to_string() } else { universal };
        Ok(Emit::new(text, &out, EXIT_OK))
    }

    fn op_apply(&self, a: &OpArgs) -> Result<Emit> {
        let op = self.op(&a.op)?;
        let expr = parse(&a.expr)?;
        let (space_label, ring, thom, mut bundles, default_genus): (String, _, Option<Arc<ThomModule>>, Vec<Bundle>, Option<Bundle>) =
            match (&a.space, &a.embedding) {
                (_, Some(e)) => {
                    let m = self.workspace.embedding(e, self.prime, self.mode)?;
                    let src = m.source().clone();
                    let mut bundles: Vec<Bundle> = src.bundles().to_vec();
                    bundles.push(m.normal().clone());
                    (e.clone(), src.ring().clone(), Some(m.clone()), bundles, Some(m.normal().clone()))
                }
                (Some(s), None) => {
                    let sp = self.workspace.space(s, self.prime, self.mode)?;
                    let mut bundles: Vec<Bundle> = sp.bundles().to_vec();
                    bundles.extend(self.workspace.bundles_on(s, &sp)?);
                    if let Some(t) = sp.tangent() {
                        bundles.push(t.clone());
                    }
                    (s.clone(), sp.ring().clone(), None, bundles, sp.tangent().cloned())
                }
                (None, None) => unreachable!("clap requires --space or --embedding"),
            };
        let explicit = match &a.bundle {
            Some(name) => Some(
                bundles
                    .iter()
                    .find(|b| b.name() == name)
                    .cloned()
                    .ok_or_else(|| Error::usage(format!("bundle `{name}` is not on {space_label}")))?,
            ),
            None => None,
        };
        bundles.retain(|b| crate::ring::same_ring(b.ring(), &ring));
        let genus_bundle = explicit.or(default_genus);
        let mut ctx = EvalContext::new(&ring);
        ctx.bundles = bundles.iter().map(|b| (b.name().to_string(), b)).collect();
        ctx.thom = thom;
        ctx.genus_bundle = genus_bundle.as_ref();
        ctx.char_equals_l = self.char_p;
        let mut warnings = Vec::new();
        let (input, result, supported) = match ctx.eval(&expr)? {
            Value::Plain(x) => {
                let mut y = apply_operation(&op, &x)?;
                if let Some(s) = a.piece {
                    let d = x
                        .homogeneous_bidegree()
                        .ok_or_else(|| Error::usage("--piece needs a homogeneous input"))?;
                    y = graded_piece(&y, d, s, self.prime);
                }
                if a.bockstein {
                    y = bockstein(&y)?.0;
                }
                if involves_weight_unit(&x) {
                    warnings.push("theta is fixed by the operation by convention".to_string());
                }
                (x.to_string(), y.to_string(), false)
            }
            Value::Supported(t) => {
                let mut y = apply_to_thom(&op, &t)?;
                if let Some(s) = a.piece {
                    let d = t
                        .bidegree()
                        .ok_or_else(|| Error::usage("--piece needs a homogeneous input"))?;
                    y = graded_piece_supported(&y, d, s, self.prime);
                }
                if a.bockstein {
                    y = bockstein_supported(&y)?.0;
                }
                (t.to_string(), y.to_string(), true)
            }
            Value::Scalar(_) => unreachable!("eval places scalars in the ring"),
        };
        let out = OpApply {
            op: op.label(),
            space: space_label,
            input,
            result: result.clone(),
            supported,
            warnings,
        };
        Ok(Emit::new(result, &out, EXIT_OK))
    }

    fn push(&self, a: &PushArgs) -> Result<Emit> {
        let f = self.workspace.map(&a.map, self.prime, self.mode)?;
        let expr = parse(&a.expr)?;
        let (input, result, supported) = if contains_tau(&expr) {
            let sd = f
                .supports()
                .ok_or_else(|| Error::usage(format!("map `{}` has no declared supports; tau is not in scope", a.map)))?;
            let m = sd.source.clone();
            let mut ctx = EvalContext::new(m.source().ring());
            ctx.thom = Some(m.clone());
            let normal = m.normal().clone();
            ctx.bundles.insert("N".into(), &normal);
            match ctx.eval(&expr)? {
                Value::Supported(t) => {
                    let y = pushforward_supported(&f, &t)?;
                    (t.to_string(), y.to_string(), true)
                }
                _ => return Err(Error::usage("expression with tau did not evaluate to a supported class")),
            }
        } else {
            let x = self.eval_on_source(&f, &expr)?;
            (x.to_string(), compose_pushforward(&f, &x)?.to_string(), false)
        };
        let out = PushResult {
            map: a.map.clone(),
            input,
            result: result.clone(),
            supported,
            shift: f.shift(),
        };
        Ok(Emit::new(result, &out, EXIT_OK))
    }

    fn eval_on_source(&self, f: &ProperMap, expr: &Expr) -> Result<Elem> {
        let src = f.source();
        let mut ctx = EvalContext::new(src.ring());
        let bundles: Vec<Bundle> = src.bundles().iter().cloned().chain(src.tangent().cloned()).collect();
        ctx.bundles = bundles.iter().map(|b| (b.name().to_string(), b)).collect();
        ctx.genus_bundle = src.tangent();
        ctx.char_equals_l = self.char_p;
        match ctx.eval(expr)? {
            Value::Plain(x) => Ok(x),
            _ => Err(Error::usage("expected a class on the source space")),
        }
    }

    fn elem_on(&self, ring_space: &Arc<Space>, text: &str, extra: Option<&Bundle>) -> Result<ElemJson> {
        let mut ctx = EvalContext::new(ring_space.ring());
        let mut bundles: Vec<Bundle> = ring_space.bundles().to_vec();
        bundles.extend(ring_space.tangent().cloned());
        bundles.extend(extra.cloned());
        ctx.bundles = bundles.iter().map(|b| (b.name().to_string(), b)).collect();
        ctx.genus_bundle = extra.or(ring_space.tangent());
        ctx.char_equals_l = self.char_p;
        match ctx.eval(&parse(text)?)? {
            Value::Plain(x) => Ok(x.to_json_value()),
            _ => Err(Error::usage("the checked class must be an ordinary ring element")),
        }
    }

    fn instance(&self, check: Check) -> Instance {
        Instance {
            prime: self.prime.get(),
            mode: self.mode,
            check,
        }
    }

    fn report(&self, r: Report) -> Emit {
        let code = if r.passed() { EXIT_OK } else { EXIT_FAIL };
        Emit::new(r.to_string(), &r, code)
    }

    fn verify(&self, cmd: VerifyCmd) -> Result<Emit> {
        let ws = &self.workspace;
        let check = match cmd {
            VerifyCmd::Wu { embedding, op, expr } => {
                let m = ws.embedding(&embedding, self.prime, self.mode)?;
                Check::Wu {
                    a: self.elem_on(m.source(), &expr, Some(m.normal()))?,
                    embedding: ws.embedding_spec(&embedding)?.clone(),
                    op: self.op_spec(&op)?,
                }
            }
            VerifyCmd::Grr { map, op, expr } => {
                let f = ws.map(&map, self.prime, self.mode)?;
                Check::Grr {
                    a: self.elem_on(f.source(), &expr, None)?,
                    map: ws.map_spec(&map)?.clone(),
                    op: self.op_spec(&op)?,
                }
            }
            VerifyCmd::Vanishing { embedding, op, s } => Check::Vanishing {
                embedding: ws.embedding_spec(&embedding)?.clone(),
                op: self.op_spec(&op)?,
                s,
            },
            VerifyCmd::Transfer { map, op } => Check::Transfer {
                map: ws.map_spec(&map)?.clone(),
                op: self.op_spec(&op)?,
            },
            VerifyCmd::Degree { n, s } => Check::Degree { n, s },
            VerifyCmd::Bockstein { map, expr } => {
                let f = ws.map(&map, self.prime, self.mode)?;
                Check::Bockstein {
                    a: self.elem_on(f.source(), &expr, None)?,
                    map: ws.map_spec(&map)?.clone(),
                }
            }
            VerifyCmd::All { max_dim, verbose } => return self.verify_all(max_dim, verbose),
            VerifyCmd::Replay { file } => return self.replay(&file),
        };
        Ok(self.report(run_instance(&self.instance(check))?))
    }

    fn verify_all(&self, max_dim: usize, verbose: bool) -> Result<Emit> {
        let suite = verify_all(self.prime, max_dim)?;
        let mut text = String::new();
        for r in &suite.reports {
            if verbose || !r.passed() {
                text += &r.to_string();
            }
        }
        for o in &suite.obstructions {
            let tag = if o.expected { "expected" } else { "ERROR" };
            text += &format!("{tag}: {} ({})\n", o.error, check_name(&o.instance.check));
        }
        text += &suite.summary();
        let code = if suite.all_passed() { EXIT_OK } else { EXIT_FAIL };
        Ok(Emit::new(text, &suite, code))
    }

    fn replay(&self, file: &Path) -> Result<Emit> {
        let raw = std::fs::read_to_string(file)?;
        let value: serde_json::Value = serde_json::from_str(&raw)?;
        let reports: Vec<Report> = if value.get("reports").is_some() {
            serde_json::from_value::<SuiteReport>(value)?.reports
        } else {
            vec![serde_json::from_value::<Report>(value)?]
        };
        let mut mismatches = Vec::new();
        let mut passed = true;
        for r in &reports {
            let again = reverify(r)?;
            passed &= again.passed();
            if again.to_json() != r.to_json() {
                mismatches.push(format!("{} [{}]", r.identity, r.parameters));
            }
        }
        let out = Replay {
            reports: reports.len(),
            identical: mismatches.is_empty(),
            passed,
            mismatches,
        };
        let mut text = format!(
            "replayed {} report(s): {}",
            out.reports,
            if out.identical { "identical" } else { "MISMATCH" }
        );
        for m in &out.mismatches {
            text += &format!("\n  differs: {m}");
        }
        let code = if out.identical && out.passed { EXIT_OK } else { EXIT_FAIL };
        Ok(Emit::new(text, &out, code))
    }
}

fn check_name(c: &Check) -> &'static str {
    match c {
        Check::Wu { .. } => "wu",
        Check::Grr { .. } => "grr",
        Check::Vanishing { .. } => "vanishing",
        Check::Transfer { .. } => "transfer",
        Check::Degree { .. } => "degree",
        Check::Bockstein { .. } => "bockstein",
    }
}
