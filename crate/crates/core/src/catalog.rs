//! Serializable recipes for embeddings, maps and operations, so that
//! verification instances can be stored and rebuilt.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chern::Bundle;
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::expr::{parse, EvalContext, Value};
use crate::operations::{steenrod_total, OpMode, Operation};
use crate::pushforward::{Projection, ProperMap};
use crate::ring::{Elem, RingCtx};
use crate::spaces::{
    graph_of_linear, graph_of_power_map, identity_embedding, linear_embedding, product,
    projective_space, thom_module, CoefficientMode, EmbeddingData, Space, SpaceDescriptor,
    SpaceKind, ThomModule,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpSpec {
    pub mode: OpMode,
    pub char_equals_l: bool,
    /// Coefficients of `φ(u)` for custom operations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<i64>>,
}

impl OpSpec {
    pub fn preset(mode: OpMode, char_equals_l: bool) -> OpSpec {
        OpSpec {
            mode,
            char_equals_l,
            coefficients: None,
        }
    }

    pub fn of(op: &Operation) -> OpSpec {
        let coefficients = (op.mode() == OpMode::Custom).then(|| {
            let n = op.series(64).coeffs().iter().rposition(|&c| c != 0).unwrap_or(1);
            (0..=n).map(|k| op.coefficient(k) as i64).collect()
        });
        OpSpec {
            mode: op.mode(),
            char_equals_l: op.char_equals_l(),
            coefficients,
        }
    }

    pub fn build(&self, prime: Prime) -> Result<Operation> {
        match (&self.coefficients, self.mode) {
            (Some(c), OpMode::Custom) => Operation::custom(prime, c, self.char_equals_l),
            (None, mode) => steenrod_total(mode, prime, self.char_equals_l),
            _ => Err(Error::usage("only custom operations carry coefficients")),
        }
    }
}

/// A user-declared embedding, with classes written as expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDescriptor {
    pub source: SpaceKind,
    pub target: SpaceKind,
    /// Image of each generator of the target (excluding `θ`), in the source ring.
    pub images: Vec<String>,
    pub normal_rank: usize,
    /// Total Chern class of the normal bundle, in the source ring.
    pub normal: String,
    /// `[X]`, in the target ring.
    pub fundamental_class: String,
}

fn eval_in(ring: &Arc<RingCtx>, text: &str) -> Result<Elem> {
    match EvalContext::new(ring).eval(&parse(text)?)? {
        Value::Plain(x) => Ok(x),
        other => Err(Error::usage(format!("`{text}` evaluates to {other}, not a ring element"))),
    }
}

impl EmbeddingDescriptor {
    pub fn to_data(&self, name: &str, prime: Prime, mode: CoefficientMode) -> Result<EmbeddingData> {
        let build = |kind: &SpaceKind| {
            Space::from_descriptor(&SpaceDescriptor {
                kind: kind.clone(),
                prime: prime.get(),
                mode,
            })
        };
        let source = build(&self.source)?;
        let target = build(&self.target)?;
        if self.images.len() != target.core_ngens() {
            return Err(Error::usage(format!(
                "embedding `{name}`: {} images declared, {target} has {} generators",
                self.images.len(),
                target.core_ngens()
            )));
        }
        let mut images = self
            .images
            .iter()
            .map(|s| eval_in(source.ring(), s))
            .collect::<Result<Vec<_>>>()?;
        if let Some(t) = source.theta() {
            images.push(t);
        }
        Ok(EmbeddingData {
            name: name.to_string(),
            normal: Bundle::new("N", self.normal_rank, eval_in(source.ring(), &self.normal)?)?,
            fundamental_class: eval_in(target.ring(), &self.fundamental_class)?,
            source,
            target,
            images,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingSpec {
    /// Linear `Pᵐ ↪ Pⁿ`.
    Linear { m: usize, n: usize },
    Identity { space: SpaceKind },
    /// Graph of the linear `Pᵐ → Pⁿ` in `Pᵐ × Pⁿ`.
    GraphOfLinear { m: usize, n: usize },
    /// Graph of a degree-`d` self-map of `P¹` in `P¹ × P¹`.
    GraphOfPower { d: u32 },
    Custom {
        name: String,
        descriptor: EmbeddingDescriptor,
    },
}

impl EmbeddingSpec {
    pub fn label(&self) -> String {
        match self {
            EmbeddingSpec::Linear { m, n } => format!("P{m}->P{n}"),
            EmbeddingSpec::Identity { space } => format!("id({})", kind_label(space)),
            EmbeddingSpec::GraphOfLinear { m, n } => format!("graph(P{m}->P{n})"),
            EmbeddingSpec::GraphOfPower { d } => format!("graph(x^{d})"),
            EmbeddingSpec::Custom { name, .. } => name.clone(),
        }
    }

    pub fn data(&self, prime: Prime, mode: CoefficientMode) -> Result<EmbeddingData> {
        let pn = |n| projective_space(n, prime, mode);
        match self {
            EmbeddingSpec::Linear { m, n } => linear_embedding(&pn(*m)?, &pn(*n)?),
            EmbeddingSpec::Identity { space } => Ok(identity_embedding(&build_space(space, prime, mode)?)),
            EmbeddingSpec::GraphOfLinear { m, n } => {
                let src = pn(*m)?;
                graph_of_linear(&src, &product(&src, &pn(*n)?)?)
            }
            EmbeddingSpec::GraphOfPower { d } => graph_of_power_map(*d, &product(&pn(1)?, &pn(1)?)?),
            EmbeddingSpec::Custom { name, descriptor } => descriptor.to_data(name, prime, mode),
        }
    }

    pub fn build(&self, prime: Prime, mode: CoefficientMode) -> Result<Arc<ThomModule>> {
        thom_module(self.data(prime, mode)?)
    }
}

pub fn build_space(kind: &SpaceKind, prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
    Space::from_descriptor(&SpaceDescriptor {
        kind: kind.clone(),
        prime: prime.get(),
        mode,
    })
}

pub fn kind_label(kind: &SpaceKind) -> String {
    match kind {
        SpaceKind::Point => "pt".into(),
        SpaceKind::Proj { n } => format!("P{n}"),
        SpaceKind::Grassmannian { k, n } => format!("Gr({k},{n})"),
        SpaceKind::Product { factors } => factors.iter().map(kind_label).collect::<Vec<_>>().join(" x "),
        SpaceKind::ProjBundle { base, rank, .. } => format!("P(E{rank} on {})", kind_label(base)),
    }
}

/// A user-declared proper map `source ↪ target × Pⁿ → target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub source: SpaceKind,
    pub target: SpaceKind,
    pub n: usize,
    /// Images of the generators of `target × Pⁿ`, in the source ring.
    pub images: Vec<String>,
    pub normal_rank: usize,
    pub normal: String,
    pub fundamental_class: String,
    pub degree: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSpec {
    /// `Pᵐ → pt` through a linear `Pᵐ ↪ Pⁿ`.
    ToPoint { m: usize, via: usize },
    /// `Pᵐ × Pⁿ → Pᵐ`.
    Projection { base: usize, fibre: usize },
    Identity { space: SpaceKind },
    /// `P¹ × P¹ → P¹` with the graph of a degree-`d` self-map as support,
    /// mapping onto the target with degree `d`.
    PowerGraph { d: u32 },
    Custom { name: String, descriptor: MapDescriptor },
}

impl MapSpec {
    pub fn label(&self) -> String {
        match self {
            MapSpec::ToPoint { m, via } => format!("P{m}->pt via P{via}"),
            MapSpec::Projection { base, fibre } => format!("P{base} x P{fibre}->P{base}"),
            MapSpec::Identity { space } => format!("id({})", kind_label(space)),
            MapSpec::PowerGraph { d } => format!("graph(x^{d})->P1"),
            MapSpec::Custom { name, .. } => name.clone(),
        }
    }

    pub fn build(&self, prime: Prime, mode: CoefficientMode) -> Result<ProperMap> {
        let pn = |n| projective_space(n, prime, mode);
        let mut map = match self {
            MapSpec::ToPoint { m, via } => ProperMap::to_point_via(*m, *via, prime, mode)?,
            MapSpec::Projection { base, fibre } => ProperMap::projection(&pn(*base)?, *fibre)?,
            MapSpec::Identity { space } => ProperMap::identity(&build_space(space, prime, mode)?)?,
            MapSpec::PowerGraph { d } => {
                let p1 = pn(1)?;
                let map = ProperMap::projection(&p1, 1)?.with_degree(*d as u64);
                let support = thom_module(graph_of_power_map(*d, map.source())?)?;
                let image = thom_module(identity_embedding(&p1))?;
                map.with_supports(support, image)?
            }
            MapSpec::Custom { name, descriptor } => {
                let target = build_space(&descriptor.target, prime, mode)?;
                let pr = Projection::new(&target, descriptor.n)?;
                let emb = EmbeddingDescriptor {
                    source: descriptor.source.clone(),
                    target: pr.total_space().kind().clone(),
                    images: descriptor.images.clone(),
                    normal_rank: descriptor.normal_rank,
                    normal: descriptor.normal.clone(),
                    fundamental_class: descriptor.fundamental_class.clone(),
                };
                let mut data = emb.to_data(name, prime, mode)?;
                // Use the projection's own copy of the total space so that
                // ring identity is structural on both sides.
                data.target = pr.total_space().clone();
                ProperMap::new(name, thom_module(data)?, pr, descriptor.degree)?
            }
        };
        map.name = self.label();
        Ok(map)
    }
}
