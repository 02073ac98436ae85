//! Proper pushforwards: closed embeddings, projections `Y × Pⁿ → Y`, and
//! their composites.

use std::sync::Arc;

use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::ring::{same_ring, Bidegree, Elem, Monomial};
use crate::spaces::{
    identity_embedding, linear_embedding, product, projective_space, thom_module, Space,
    SupportedElem, ThomModule,
};

/// The projection `Y × Pⁿ → Y`; the `Pⁿ` generator `t` is the last non-`θ`
/// generator of the product ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    y: Arc<Space>,
    middle: Arc<Space>,
    n: usize,
}

impl Projection {
    pub fn new(y: &Arc<Space>, n: usize) -> Result<Projection> {
        let pn = projective_space(n, y.prime(), y.mode())?;
        Ok(Projection {
            y: y.clone(),
            middle: product(y, &pn)?,
            n,
        })
    }

    pub fn base(&self) -> &Arc<Space> {
        &self.y
    }

    /// `Y × Pⁿ`.
    pub fn total_space(&self) -> &Arc<Space> {
        &self.middle
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// `π_!`: the coefficient of `tⁿ` in the basis `{tⁱ}` over `A(Y)`.
pub fn proj_pushforward(pr: &Projection, x: &Elem) -> Result<Elem> {
    let mid = pr.middle.ring();
    if !same_ring(x.ring(), mid) {
        return Err(Error::usage(format!(
            "element does not belong to {}",
            pr.middle
        )));
    }
    if pr.n == 0 {
        return Ok(Elem::from_terms(
            pr.y.ring(),
            x.terms().map(|(m, c)| (m.clone(), c.value() as i64)),
        ));
    }
    let ny = pr.y.core_ngens();
    let t = ny;
    let terms = x
        .terms()
        .filter(|(m, _)| m.0[t] as usize == pr.n)
        .map(|(m, c)| {
            let mut e = m.0[..ny].to_vec();
            e.extend_from_slice(&m.0[ny + 1..]);
            (Monomial(e), c.value() as i64)
        });
    Ok(Elem::from_terms(pr.y.ring(), terms))
}

/// `i_!(a)`: the image of `τ·a` with supports forgotten.
pub fn embed_pushforward(m: &ThomModule, a: &Elem) -> Result<Elem> {
    m.forget_support(a)
}

/// Supported classes attached to a proper map: `X ⊂ P` and its image `X′ ⊂ P′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportData {
    pub source: Arc<ThomModule>,
    pub image: Arc<ThomModule>,
}

/// A projective morphism `P → P′` presented as `P ↪ P′ × Pⁿ → P′`, with a
/// declared generic degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperMap {
    pub name: String,
    embedding: Arc<ThomModule>,
    projection: Projection,
    degree: u64,
    supports: Option<SupportData>,
}

impl ProperMap {
    pub fn new(
        name: &str,
        embedding: Arc<ThomModule>,
        projection: Projection,
        degree: u64,
    ) -> Result<ProperMap> {
        if !same_ring(embedding.target().ring(), projection.middle.ring()) {
            return Err(Error::usage(format!(
                "map `{name}`: the embedding does not land in {}",
                projection.middle
            )));
        }
        Ok(ProperMap {
            name: name.to_string(),
            embedding,
            projection,
            degree,
            supports: None,
        })
    }

    pub fn with_degree(mut self, degree: u64) -> ProperMap {
        self.degree = degree;
        self
    }

    /// Declares `X ⊂ P` and its image `X′ ⊂ P′` for supported pushforwards.
    pub fn with_supports(mut self, source: Arc<ThomModule>, image: Arc<ThomModule>) -> Result<ProperMap> {
        if !same_ring(source.target().ring(), self.source().ring()) {
            return Err(Error::usage(format!(
                "map `{}`: source support is not inside {}",
                self.name,
                self.source()
            )));
        }
        if !same_ring(image.target().ring(), self.target().ring()) {
            return Err(Error::usage(format!(
                "map `{}`: image support is not inside {}",
                self.name,
                self.target()
            )));
        }
        if source.source().dim() != image.source().dim() {
            return Err(Error::usage(format!(
                "map `{}`: the support and its image have different dimensions",
                self.name
            )));
        }
        self.supports = Some(SupportData { source, image });
        Ok(self)
    }

    pub fn identity(x: &Arc<Space>) -> Result<ProperMap> {
        let m = thom_module(identity_embedding(x))?;
        ProperMap::new(&format!("id_{x}"), m, Projection::new(x, 0)?, 1)
    }

    /// `Y × Pⁿ → Y`.
    pub fn projection(y: &Arc<Space>, n: usize) -> Result<ProperMap> {
        let pr = Projection::new(y, n)?;
        let m = thom_module(identity_embedding(&pr.middle))?;
        ProperMap::new(&format!("{} -> {y}", pr.middle), m, pr, 1)
    }

    /// `Pᵐ → pt` factored through a linear `Pᵐ ↪ Pⁿ`.
    pub fn to_point_via(m: usize, n: usize, prime: Prime, mode: crate::spaces::CoefficientMode) -> Result<ProperMap> {
        let pt = crate::spaces::point(prime, mode)?;
        let pr = Projection::new(&pt, n)?;
        let pm = projective_space(m, prime, mode)?;
        let e = thom_module(linear_embedding(&pm, &pr.middle)?)?;
        ProperMap::new(&format!("P{m} -> pt via P{n}"), e, pr, 1)
    }

    pub fn source(&self) -> &Arc<Space> {
        self.embedding.source()
    }

    pub fn target(&self) -> &Arc<Space> {
        self.projection.base()
    }

    pub fn embedding(&self) -> &Arc<ThomModule> {
        &self.embedding
    }

    pub fn projection_data(&self) -> &Projection {
        &self.projection
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn supports(&self) -> Option<&SupportData> {
        self.supports.as_ref()
    }

    /// `d′ = dim target − dim source`.
    pub fn relative_dim(&self) -> isize {
        self.target().dim() as isize - self.source().dim() as isize
    }

    /// `(2d′, d′)`.
    pub fn shift(&self) -> Bidegree {
        let d = self.relative_dim() as i32;
        Bidegree(2 * d, d)
    }
}

/// `f_! = π_! ∘ i_!`.
pub fn compose_pushforward(f: &ProperMap, a: &Elem) -> Result<Elem> {
    let up = embed_pushforward(&f.embedding, a)?;
    proj_pushforward(&f.projection, &up)
}

/// `f_!` on the `τ`-line: `τ·c ↦ deg(f)·c·τ′` for a scalar `c`.
///
/// Only the line spanned by the fundamental class is modeled on the image
/// side; coefficients of positive degree are rejected.
pub fn pushforward_supported(f: &ProperMap, t: &SupportedElem) -> Result<SupportedElem> {
    let sd = f.supports.as_ref().ok_or_else(|| {
        Error::usage(format!("map `{}` has no declared image support", f.name))
    })?;
    if t.module() != &sd.source {
        return Err(Error::usage(format!(
            "supported element is not over the declared support of `{}`",
            f.name
        )));
    }
    let coeff = t.coeff();
    let scalar = coeff.component(Bidegree::ZERO);
    if &scalar != coeff {
        return Err(Error::usage(
            "only multiples of the fundamental class push forward to the image support",
        ));
    }
    let c = scalar.coefficient(&Monomial::one(scalar.ring().ngens())) as u64;
    let prime = f.source().prime();
    let value = prime.mul(prime.reduce(c), prime.reduce(f.degree));
    SupportedElem::new(
        &sd.image,
        Elem::constant(sd.image.source().ring(), value as i64),
    )
}
