//! Theorem checkers. Each produces a [`Report`] with both sides of the
//! identity, a verdict and a trace; reports carry a serializable instance so
//! they can be rebuilt and re-run.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{EmbeddingSpec, MapSpec, OpSpec};
use crate::chern::{evaluate_genus, inverse_todd_of_operation, itd_discrepancy, todd_of_operation};
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::operations::{
    apply_operation, apply_to_thom, bockstein, bockstein_supported, graded_piece_supported,
    involves_weight_unit, odd_degrees_vanish, twisted_operation, OpMode, Operation,
};
use crate::pushforward::{compose_pushforward, embed_pushforward, proj_pushforward, pushforward_supported, ProperMap};
use crate::ring::{Elem, ElemJson};
use crate::spaces::{grassmannian, point, CoefficientMode, SupportedElem, ThomModule};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// What was checked, in a form that can be rebuilt.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    Wu {
        embedding: EmbeddingSpec,
        op: OpSpec,
        a: ElemJson,
    },
    Grr {
        map: MapSpec,
        op: OpSpec,
        a: ElemJson,
    },
    Vanishing {
        embedding: EmbeddingSpec,
        op: OpSpec,
        s: u32,
    },
    Transfer {
        map: MapSpec,
        op: OpSpec,
    },
    Degree {
        n: u32,
        s: u32,
    },
    Bockstein {
        map: MapSpec,
        a: ElemJson,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub prime: u32,
    pub mode: CoefficientMode,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub identity: String,
    pub instance: Option<Instance>,
    /// Human-readable parameters.
    pub parameters: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
    pub trace: Vec<String>,
}

impl Report {
    fn new(identity: &str, parameters: String, lhs: String, rhs: String, pass: bool) -> Report {
        Report {
            identity: identity.to_string(),
            instance: None,
            parameters,
            lhs,
            rhs,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            warnings: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report> {
        Ok(serde_json::from_str(s)?)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        writeln!(f, "{v} {} [{}]", self.identity, self.parameters)?;
        writeln!(f, "  lhs = {}", self.lhs)?;
        writeln!(f, "  rhs = {}", self.rhs)?;
        for t in &self.trace {
            writeln!(f, "  trace: {t}")?;
        }
        for w in &self.warnings {
            writeln!(f, "  warning: {w}")?;
        }
        Ok(())
    }
}

const THETA_NOTE: &str = "the weight unit theta occurs; operations act on it as the identity by convention";

/// `φ(i_!(a))` against `i_!(φ(a)·itd_φ(N))`.
pub fn check_wu(m: &Arc<ThomModule>, op: &Operation, a: &Elem) -> Result<Report> {
    let src = m.source().ring();
    let itd = inverse_todd_of_operation(op, src.top_weight() as usize)?;
    let itd_n = evaluate_genus(&itd, m.normal())?;
    let lhs = apply_operation(op, &embed_pushforward(m, a)?)?;
    let phi_a = apply_operation(op, a)?;
    let rhs = embed_pushforward(m, &phi_a.checked_mul(&itd_n)?)?;
    let mut r = Report::new(
        "wu",
        format!("{}, {}, a = {a}", m.name(), op.label()),
        lhs.to_string(),
        rhs.to_string(),
        lhs == rhs,
    );
    r.trace.push(format!("i_!(a) = {}", embed_pushforward(m, a)?));
    r.trace.push(format!("phi(a) = {phi_a}"));
    r.trace.push(format!("itd(N) = {itd_n}   [series {}]", itd.series));
    if op.mode() == OpMode::QmodP {
        let top = m.normal().top_chern_class().pow(op.prime().get() - 1);
        r.trace.push(format!("c_top(N)^(p-1) = {top}"));
        if top != itd_n {
            r.warnings.push(format!(
                "itd(N) = {itd_n} differs from c_top(N)^(p-1) = {top}"
            ));
        }
    }
    if let Some(d) = itd_discrepancy(op, m.normal())? {
        let alt = embed_pushforward(m, &phi_a.checked_mul(&d.product_form)?)?;
        r.warnings.push(format!(
            "inverse Todd class: definition gives {}, the product form c(N)^(l-1) gives {}; \
             with the product form the right-hand side would be {alt}{}",
            d.definitional,
            d.product_form,
            if alt == lhs { " (still equal)" } else { " (not equal to the left-hand side)" }
        ));
    }
    if involves_weight_unit(a) {
        r.warnings.push(THETA_NOTE.into());
    }
    Ok(r)
}

/// `φ(f_!(a))·td_φ(TP′)` against `f_!(φ(a)·td_φ(TP))`.
pub fn check_grr(f: &ProperMap, op: &Operation, a: &Elem) -> Result<Report> {
    let (p, q) = (f.source(), f.target());
    let tp = p
        .tangent()
        .ok_or_else(|| Error::usage(format!("{p} has no stored tangent bundle")))?;
    let tq = q
        .tangent()
        .ok_or_else(|| Error::usage(format!("{q} has no stored tangent bundle")))?;
    let td_p = evaluate_genus(&todd_of_operation(op, p.ring().top_weight() as usize)?, tp)?;
    let td_q = evaluate_genus(&todd_of_operation(op, q.ring().top_weight() as usize)?, tq)?;
    let pushed = compose_pushforward(f, a)?;
    let lhs = apply_operation(op, &pushed)?.checked_mul(&td_q)?;
    let phi_a = apply_operation(op, a)?;
    let rhs = compose_pushforward(f, &phi_a.checked_mul(&td_p)?)?;
    let mut r = Report::new(
        "grr",
        format!("{}, {}, a = {a}", f.name, op.label()),
        lhs.to_string(),
        rhs.to_string(),
        lhs == rhs,
    );
    r.trace.push(format!("f_!(a) = {pushed}"));
    r.trace.push(format!("phi(a) = {phi_a}"));
    r.trace.push(format!("td(T{p}) = {td_p}"));
    r.trace.push(format!("td(T{q}) = {td_q}"));
    if involves_weight_unit(a) {
        r.warnings.push(THETA_NOTE.into());
    }
    Ok(r)
}

/// Structural reason for the vanishing: odd degrees of the classifying model
/// `Gr(c, 2c)` of rank-`c` bundles are empty (a point when `c = 0`).
pub fn classifying_model_is_even(c: usize, prime: Prime) -> Result<(String, bool)> {
    if c == 0 {
        let pt = point(prime, CoefficientMode::PurePoint)?;
        return Ok(("pt".into(), odd_degrees_vanish(pt.ring())));
    }
    let g = grassmannian(c, 2 * c, prime, CoefficientMode::PurePoint)?;
    Ok((g.name().to_string(), odd_degrees_vanish(g.ring())))
}

/// `β(Q^s(τ)) = 0`, together with the evenness of the classifying model.
pub fn check_vanishing_on_thom(m: &Arc<ThomModule>, op: &Operation, s: u32) -> Result<Report> {
    let tau = SupportedElem::tau(m);
    let total = apply_to_thom(op, &tau)?;
    let piece = graded_piece_supported(&total, m.tau_bidegree(), s, op.prime());
    let (b, trace) = bockstein_supported(&piece)?;
    let (model, even) = classifying_model_is_even(m.codim(), op.prime())?;
    let ambient_even = odd_degrees_vanish(m.target().ring()) && odd_degrees_vanish(m.source().ring());
    let mut r = Report::new(
        "vanishing",
        format!("{}, {}, s = {s}", m.name(), op.label()),
        b.to_string(),
        "0".into(),
        b.is_zero() && even && ambient_even,
    );
    r.trace.push(format!("phi(tau) = {total}"));
    r.trace.push(format!("piece s={s}: {piece}"));
    for t in &trace.terms {
        r.trace.push(format!("beta({}) -> {} vanishes: {:?}", t.factor, t.target, t.reason));
    }
    r.trace.push(format!(
        "odd first degrees of {model}: {}",
        if even { "all zero-dimensional" } else { "NONZERO" }
    ));
    r.trace.push(format!(
        "odd first degrees of {} and {}: {}",
        m.source(),
        m.target(),
        if ambient_even { "all zero-dimensional" } else { "NONZERO" }
    ));
    Ok(r)
}

/// `βU(τ′) = deg⁻¹·f_!(βU(τ))` for a map with declared supports.
pub fn check_resolution_transfer(f: &ProperMap, op: &Operation) -> Result<Report> {
    let sd = f
        .supports()
        .ok_or_else(|| Error::usage(format!("map `{}` has no declared supports", f.name)))?;
    let u_src = twisted_operation(op, f.source())?;
    let u_tgt = twisted_operation(op, f.target())?;
    let prime = op.prime();
    let tau = SupportedElem::tau(&sd.source);
    let tau_img = SupportedElem::tau(&sd.image);

    let u_tau = u_src.apply_supported(&tau)?;
    let (beta_u_tau, trace_src) = bockstein_supported(&u_tau)?;
    let pushed_tau = pushforward_supported(f, &tau)?;
    let pushed = pushforward_supported(f, &beta_u_tau)?;
    let (lhs, trace_tgt) = bockstein_supported(&u_tgt.apply_supported(&tau_img)?)?;

    let deg = prime.reduce(f.degree());
    let inv = prime.inv(deg);
    let rhs = inv.map(|i| pushed.scale(i as i64));
    let ambient_lhs = compose_pushforward(f, &tau.forget_support()?)?;
    let ambient_rhs = pushed_tau.forget_support()?;
    let consistent = ambient_lhs == ambient_rhs;

    let pass = matches!(&rhs, Some(r) if *r == lhs) && consistent;
    let mut r = Report::new(
        "transfer",
        format!("{}, degree {}, {}", f.name, f.degree(), op.label()),
        lhs.to_string(),
        rhs.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "undefined".into()),
        pass,
    );
    r.trace.push(format!("td(T{}) = {}", f.source(), u_src.todd_class()));
    r.trace.push(format!("U(tau) = {u_tau}"));
    r.trace.push(format!("beta U(tau) = {beta_u_tau} ({} Leibniz terms, all zero)", trace_src.terms.len()));
    r.trace.push(format!("f_!(tau) = {pushed_tau}  (deg = {} = {deg} mod {prime})", f.degree()));
    r.trace.push(format!(
        "ambient check: f_!([X]) = {ambient_lhs}, [X'] scaled = {ambient_rhs}"
    ));
    match inv {
        Some(i) => r.trace.push(format!("deg is a unit, inverse {i}: tau' = {i}*f_!(tau)")),
        None => r.warnings.push(format!(
            "deg(f) = {} vanishes mod {prime}; tau' is not recovered from f_!(tau)",
            f.degree()
        )),
    }
    r.trace.push(format!(
        "beta U'(tau') = {lhs} ({} Leibniz terms, all zero)",
        trace_tgt.terms.len()
    ));
    if !consistent {
        r.warnings.push("supported pushforward disagrees with the ambient pushforward".into());
    }
    Ok(r)
}

/// `βP_s` on a class of `H_{2n}(X, n)` lands in simplicial index −1.
pub fn check_degree_reasons(n: u32, s: u32, prime: Prime) -> Result<Report> {
    if s == 0 {
        return Err(Error::usage("degree-reasons check needs s >= 1"));
    }
    let k = (s * (prime.get() - 1)) as i64;
    let n = n as i64;
    let i = 2 * n - 2 * k - 1;
    let j = n - k;
    let index = i - 2 * j;
    let mut r = Report::new(
        "degree",
        format!("n = {n}, s = {s}, l = {prime}"),
        format!("simplicial index {index}"),
        "< 0".into(),
        index < 0,
    );
    r.trace.push(format!("source H_{}({}) weight {n}", 2 * n, n));
    r.trace.push(format!("beta P_s target H_{i}(X, {j})"));
    r.trace.push(format!(
        "index = ({} - 1) - {} = {index}",
        2 * n - 2 * k,
        2 * j
    ));
    Ok(r)
}

/// `f_!(β(a))` against `β(f_!(a))`, recording the Leibniz terms of both steps.
pub fn check_bockstein_pushforward(f: &ProperMap, a: &Elem) -> Result<Report> {
    let (beta_a, trace_a) = bockstein(a)?;
    let lhs = compose_pushforward(f, &beta_a)?;
    let up = embed_pushforward(f.embedding(), a)?;
    let pushed = proj_pushforward(f.projection_data(), &up)?;
    let (rhs, trace_push) = bockstein(&pushed)?;
    let (_, trace_tau) = bockstein_supported(&SupportedElem::new(f.embedding(), a.clone())?)?;
    let (_, trace_up) = bockstein(&up)?;
    let mut r = Report::new(
        "bockstein",
        format!("{}, a = {a}", f.name),
        lhs.to_string(),
        rhs.to_string(),
        lhs == rhs,
    );
    let show = |t: &crate::operations::BocksteinTrace| {
        t.terms
            .iter()
            .map(|x| format!("{}:{:?}", x.factor, x.reason))
            .collect::<Vec<_>>()
            .join(", ")
    };
    r.trace.push(format!("beta(a): [{}]", show(&trace_a)));
    r.trace.push(format!(
        "embedding: beta(tau*a) = beta(tau)*a + tau*beta(a): [{}]",
        show(&trace_tau)
    ));
    r.trace.push(format!("projection: beta(i_!(a)) = beta({up}): [{}]", show(&trace_up)));
    r.trace.push(format!("beta(f_!(a)) = beta({pushed}): [{}]", show(&trace_push)));
    Ok(r)
}

/// Rebuilds the objects named by `inst` and runs the check.
pub fn run_instance(inst: &Instance) -> Result<Report> {
    let prime = Prime::new(inst.prime)?;
    let mode = inst.mode;
    let mut r = match &inst.check {
        Check::Wu { embedding, op, a } => {
            let m = embedding.build(prime, mode)?;
            let a = Elem::from_json_value(m.source().ring(), a)?;
            check_wu(&m, &op.build(prime)?, &a)?
        }
        Check::Grr { map, op, a } => {
            let f = map.build(prime, mode)?;
            let a = Elem::from_json_value(f.source().ring(), a)?;
            check_grr(&f, &op.build(prime)?, &a)?
        }
        Check::Vanishing { embedding, op, s } => {
            check_vanishing_on_thom(&embedding.build(prime, mode)?, &op.build(prime)?, *s)?
        }
        Check::Transfer { map, op } => check_resolution_transfer(&map.build(prime, mode)?, &op.build(prime)?)?,
        Check::Degree { n, s } => check_degree_reasons(*n, *s, prime)?,
        Check::Bockstein { map, a } => {
            let f = map.build(prime, mode)?;
            let a = Elem::from_json_value(f.source().ring(), a)?;
            check_bockstein_pushforward(&f, &a)?
        }
    };
    r.instance = Some(inst.clone());
    Ok(r)
}

/// Re-runs the instance recorded in a report.
pub fn reverify(report: &Report) -> Result<Report> {
    let inst = report
        .instance
        .as_ref()
        .ok_or_else(|| Error::usage("report carries no instance"))?;
    run_instance(inst)
}

/// A check that stopped with an error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    pub instance: Instance,
    pub error: String,
    /// `NotWellDefined` for an operation without a Todd genus is an expected outcome.
    pub expected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub prime: u32,
    pub max_dim: usize,
    pub passed: usize,
    pub failed: usize,
    pub expected_obstructions: usize,
    pub unexpected_errors: usize,
    pub reports: Vec<Report>,
    pub obstructions: Vec<Obstruction>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.unexpected_errors == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "verify all: l = {}, max-dim = {}: {} passed, {} failed, {} expected obstructions, {} errors",
            self.prime,
            self.max_dim,
            self.passed,
            self.failed,
            self.expected_obstructions,
            self.unexpected_errors
        )
    }
}

fn basis_of_source(inst_prime: Prime, mode: CoefficientMode, spec: &EmbeddingSpec) -> Result<Vec<ElemJson>> {
    let m = spec.build(inst_prime, mode)?;
    Ok(basis_jsons(m.source().ring()))
}

fn basis_jsons(ring: &Arc<crate::ring::RingCtx>) -> Vec<ElemJson> {
    ring.basis_table()
        .into_iter()
        .flat_map(|(_, b)| b)
        .map(|m| Elem::from_terms(ring, [(m, 1)]).to_json_value())
        .collect()
}

/// Every instance of the suite for one prime, in a fixed order.
pub fn suite_instances(prime: Prime, max_dim: usize) -> Result<Vec<Instance>> {
    let mode = CoefficientMode::PurePoint;
    let inst = |check| Instance {
        prime: prime.get(),
        mode,
        check,
    };
    let wu_ops = [
        OpSpec::preset(OpMode::QmodL, false),
        OpSpec::preset(OpMode::Pmotivic, false),
        OpSpec::preset(OpMode::QmodP, true),
    ];
    let grr_ops = [
        OpSpec::preset(OpMode::QmodL, false),
        OpSpec::preset(OpMode::Pmotivic, false),
        OpSpec::preset(OpMode::Identity, false),
    ];
    let mut embeddings = Vec::new();
    for n in 1..=max_dim {
        for m in 0..n {
            embeddings.push(EmbeddingSpec::Linear { m, n });
        }
    }
    for m in 1..=max_dim {
        for n in m..=max_dim.saturating_sub(m) {
            embeddings.push(EmbeddingSpec::GraphOfLinear { m, n });
        }
    }
    embeddings.push(EmbeddingSpec::Identity {
        space: crate::spaces::SpaceKind::Proj { n: max_dim.min(2) },
    });

    let mut maps = Vec::new();
    for n in 1..=max_dim {
        maps.push(MapSpec::ToPoint { m: n, via: n });
    }
    for n in 2..=max_dim {
        maps.push(MapSpec::ToPoint { m: 1, via: n });
    }
    for base in 1..=max_dim {
        for fibre in 1..=max_dim - base {
            maps.push(MapSpec::Projection { base, fibre });
        }
    }

    let mut out = Vec::new();
    for e in &embeddings {
        let basis = basis_of_source(prime, mode, e)?;
        for op in &wu_ops {
            for a in &basis {
                out.push(inst(Check::Wu {
                    embedding: e.clone(),
                    op: op.clone(),
                    a: a.clone(),
                }));
            }
        }
    }
    for f in &maps {
        let map = f.build(prime, mode)?;
        let basis = basis_jsons(map.source().ring());
        for op in &grr_ops {
            for a in &basis {
                out.push(inst(Check::Grr {
                    map: f.clone(),
                    op: op.clone(),
                    a: a.clone(),
                }));
            }
        }
        for a in &basis {
            out.push(inst(Check::Bockstein {
                map: f.clone(),
                a: a.clone(),
            }));
        }
    }
    out.push(inst(Check::Grr {
        map: MapSpec::ToPoint { m: 1, via: 1 },
        op: OpSpec::preset(OpMode::QmodP, true),
        a: basis_jsons(projective_ring(prime, 1)?.ring())[0].clone(),
    }));
    for e in &embeddings {
        let dim = match e {
            EmbeddingSpec::Linear { m, .. } | EmbeddingSpec::GraphOfLinear { m, .. } => *m,
            _ => max_dim.min(2),
        };
        for op in [OpSpec::preset(OpMode::QmodL, false), OpSpec::preset(OpMode::QmodP, true)] {
            for s in 0..=(dim as u32 + 1) {
                out.push(inst(Check::Vanishing {
                    embedding: e.clone(),
                    op: op.clone(),
                    s,
                }));
            }
        }
    }
    let other = (2..).find(|&p| crate::coeff::is_prime(p) && p != prime.get()).expect("primes");
    for d in [1, other, other * other] {
        out.push(inst(Check::Transfer {
            map: MapSpec::PowerGraph { d },
            op: OpSpec::preset(OpMode::QmodL, false),
        }));
    }
    out.push(inst(Check::Transfer {
        map: MapSpec::PowerGraph { d: 1 },
        op: OpSpec::preset(OpMode::QmodP, true),
    }));
    for n in 1..=max_dim as u32 {
        for s in 1..=4 {
            out.push(inst(Check::Degree { n, s }));
        }
    }
    Ok(out)
}

fn projective_ring(prime: Prime, n: usize) -> Result<Arc<crate::spaces::Space>> {
    crate::spaces::projective_space(n, prime, CoefficientMode::PurePoint)
}

/// Runs the full suite for one prime.
pub fn verify_all(prime: Prime, max_dim: usize) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    let mut obstructions = Vec::new();
    for inst in suite_instances(prime, max_dim)? {
        match run_instance(&inst) {
            Ok(r) => reports.push(r),
            Err(e) => obstructions.push(Obstruction {
                expected: matches!(e, Error::NotWellDefined { .. }),
                error: e.to_string(),
                instance: inst,
            }),
        }
    }
    let passed = reports.iter().filter(|r| r.passed()).count();
    let expected = obstructions.iter().filter(|o| o.expected).count();
    Ok(SuiteReport {
        prime: prime.get(),
        max_dim,
        passed,
        failed: reports.len() - passed,
        expected_obstructions: expected,
        unexpected_errors: obstructions.len() - expected,
        reports,
        obstructions,
    })
}
