//! Catalog of cohomology-ring models: point, projective spaces, products,
//! Grassmannians and projective bundles, with closed embeddings and the free
//! Thom modules they carry.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chern::{whitney_sum, Bundle};
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::linalg::analyse_map;
use crate::ring::{
    same_ring, Bidegree, Elem, ElemJson, GenRole, Generator, Monomial, Poly, Presentation, RingCtx,
};

/// How the coefficients of a point are modeled.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientMode {
    /// `ℤ/ℓ` in bidegree `(0,0)` only.
    PurePoint,
    /// An invertible `θ` of bidegree `(0,1)` is adjoined.
    WeightUnit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    Point,
    Proj {
        n: usize,
    },
    Grassmannian {
        k: usize,
        n: usize,
    },
    Product {
        factors: Vec<SpaceKind>,
    },
    /// Projectivization of a bundle on `base` with the given total Chern class.
    ProjBundle {
        base: Box<SpaceKind>,
        rank: usize,
        chern: ElemJson,
    },
}

/// Serializable recipe for a catalog space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub prime: u32,
    pub mode: CoefficientMode,
}

/// A block of generators contributed by one non-product factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub kind: SpaceKind,
    /// Index of the first generator of this factor in the product ring.
    pub offset: usize,
    /// Number of generators, not counting `θ`.
    pub ngens: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    name: String,
    kind: SpaceKind,
    ring: Arc<RingCtx>,
    mode: CoefficientMode,
    dim: usize,
    tangent: Option<Bundle>,
    factors: Vec<Factor>,
    bundles: Vec<Bundle>,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

impl Space {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn ring(&self) -> &Arc<RingCtx> {
        &self.ring
    }

    pub fn prime(&self) -> Prime {
        self.ring.prime()
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tangent(&self) -> Option<&Bundle> {
        self.tangent.as_ref()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Named bundles carried by the space (tautological bundles, `O(1)`).
    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, name: &str) -> Option<&Bundle> {
        self.bundles.iter().find(|b| b.name() == name)
    }

    /// Number of generators other than `θ`.
    pub fn core_ngens(&self) -> usize {
        self.ring.presentation().generators.len()
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            kind: self.kind.clone(),
            prime: self.prime().get(),
            mode: self.mode,
        }
    }

    pub fn from_descriptor(d: &SpaceDescriptor) -> Result<Arc<Space>> {
        let prime = Prime::new(d.prime)?;
        build_kind(&d.kind, prime, d.mode)
    }

    pub fn with_name(&self, name: &str) -> Arc<Space> {
        let mut s = self.clone();
        s.name = name.to_string();
        Arc::new(s)
    }

    /// `θ`, when the space is in weight-unit mode.
    pub fn theta(&self) -> Option<Elem> {
        self.ring
            .theta_index()
            .map(|t| Elem::generator_at(&self.ring, t))
    }
}

fn build_kind(kind: &SpaceKind, prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
    match kind {
        SpaceKind::Point => point(prime, mode),
        SpaceKind::Proj { n } => projective_space(*n, prime, mode),
        SpaceKind::Grassmannian { k, n } => grassmannian(*k, *n, prime, mode),
        SpaceKind::Product { factors } => {
            let mut acc = point(prime, mode)?;
            for f in factors {
                acc = product(&acc, &build_kind(f, prime, mode)?)?;
            }
            Ok(acc)
        }
        SpaceKind::ProjBundle { base, rank, chern } => {
            let b = build_kind(base, prime, mode)?;
            let total = Elem::from_json_value(b.ring(), chern)?;
            let e = Bundle::new("E", *rank, total)?;
            projective_bundle(&b, &e)
        }
    }
}

fn make_ring(
    prime: Prime,
    mode: CoefficientMode,
    top: u32,
    generators: Vec<Generator>,
    relations: Vec<Poly>,
) -> Result<Arc<RingCtx>> {
    RingCtx::new(Presentation {
        prime,
        top_degree: top,
        weight_unit: mode == CoefficientMode::WeightUnit,
        generators,
        relations,
    })
}

pub fn point(prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
    let ring = make_ring(prime, mode, 0, vec![], vec![])?;
    Ok(Arc::new(Space {
        name: "pt".into(),
        kind: SpaceKind::Point,
        tangent: Some(Bundle::trivial(&ring, 0).renamed("T")),
        ring,
        mode,
        dim: 0,
        factors: vec![Factor {
            kind: SpaceKind::Point,
            offset: 0,
            ngens: 0,
        }],
        bundles: vec![],
    }))
}

/// `Pⁿ`: one generator `u:(2,1)`, relation `u^{n+1}`, tangent class `(1+u)^{n+1}`.
pub fn projective_space(n: usize, prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
    if n == 0 {
        let pt = point(prime, mode)?;
        let mut s = (*pt).clone();
        s.name = "P0".into();
        s.kind = SpaceKind::Proj { n: 0 };
        s.factors[0].kind = s.kind.clone();
        return Ok(Arc::new(s));
    }
    let ring = make_ring(
        prime,
        mode,
        2 * n as u32,
        vec![Generator::line("u")],
        vec![Poly::new().term(1, vec![n as u32 + 1])],
    )?;
    let u = Elem::generator(&ring, "u")?;
    let h = &Elem::one(&ring) + &u;
    let tangent = Bundle::new("T", n, h.pow(n as u32 + 1))?;
    let kind = SpaceKind::Proj { n };
    Ok(Arc::new(Space {
        name: format!("P{n}"),
        kind: kind.clone(),
        tangent: Some(tangent),
        bundles: vec![Bundle::line("O(1)", &u)?],
        ring,
        mode,
        dim: n,
        factors: vec![Factor {
            kind,
            offset: 0,
            ngens: 1,
        }],
    }))
}

/// `Gr(k,N)`: Chern classes `c_i` of the tautological subbundle `S` and `d_j`
/// of the quotient `Q`, modulo the graded pieces of `c(S)·c(Q) = 1`.
pub fn grassmannian(k: usize, n: usize, prime: Prime, mode: CoefficientMode) -> Result<Arc<Space>> {
    if k == 0 || k >= n {
        return Err(Error::usage(format!("Gr({k},{n}) needs 0 < k < N")));
    }
    let q = n - k;
    let gens: Vec<Generator> = (1..=k)
        .map(|i| Generator::chern(&format!("c{i}"), "S", i, k))
        .collect();
    // h_m = [c(S)^{-1}]_m = c_m(Q), via h_m = -Σ_{i≥1} c_i h_{m-i}.
    let mut h: Vec<BTreeMap<Vec<u32>, u32>> = vec![BTreeMap::from([(vec![0u32; k], 1)])];
    for m in 1..=n {
        let mut acc: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for i in 1..=m.min(k) {
            for (e, &c) in &h[m - i] {
                let mut e = e.clone();
                e[i - 1] += 1;
                let slot = acc.entry(e).or_insert(0);
                *slot = prime.sub(*slot, c);
            }
        }
        acc.retain(|_, c| *c != 0);
        h.push(acc);
    }
    let to_poly = |p: &BTreeMap<Vec<u32>, u32>| {
        p.iter()
            .fold(Poly::new(), |acc, (e, &c)| acc.term(c as i64, e.clone()))
    };
    let relations: Vec<Poly> = h[q + 1..=n].iter().map(to_poly).collect();
    let ring = make_ring(prime, mode, 2 * (k * q) as u32, gens, relations)?;
    let theta_pad = |e: &Vec<u32>| {
        let mut e = e.clone();
        e.resize(ring.ngens(), 0);
        Monomial(e)
    };
    let s_classes = (1..=k)
        .map(|i| Elem::generator(&ring, &format!("c{i}")))
        .collect::<Result<Vec<_>>>()?;
    let q_classes: Vec<Elem> = h[1..=q]
        .iter()
        .map(|p| Elem::from_terms(&ring, p.iter().map(|(e, &c)| (theta_pad(e), c as i64))))
        .collect();
    let s = Bundle::from_classes("S", &ring, &s_classes)?;
    let qb = Bundle::from_classes("Q", &ring, &q_classes)?;
    let kind = SpaceKind::Grassmannian { k, n };
    Ok(Arc::new(Space {
        name: format!("Gr({k},{n})"),
        kind: kind.clone(),
        tangent: None,
        bundles: vec![s, qb],
        ring,
        mode,
        dim: k * q,
        factors: vec![Factor {
            kind,
            offset: 0,
            ngens: k,
        }],
    }))
}

const LINE_NAMES: [&str; 6] = ["u", "v", "w", "x", "y", "z"];

/// Renames the generators of `incoming` so they avoid `taken`. Line generators
/// take the next free letter; Chern families get a common `_k` suffix.
fn rename_generators(incoming: &[Generator], taken: &BTreeSet<String>) -> Vec<Generator> {
    let mut used = taken.clone();
    let mut family_suffix: HashMap<String, String> = HashMap::new();
    let mut out = Vec::new();
    for g in incoming {
        let mut g = g.clone();
        if used.contains(&g.name) {
            match &mut g.role {
                GenRole::Chern { family, .. } => {
                    let suffix = family_suffix
                        .entry(family.clone())
                        .or_insert_with(|| {
                            let members: Vec<&Generator> = incoming
                                .iter()
                                .filter(|h| matches!(&h.role, GenRole::Chern { family: f, .. } if f == family))
                                .collect();
                            (2..)
                                .map(|k| format!("_{k}"))
                                .find(|s| {
                                    members
                                        .iter()
                                        .all(|h| !used.contains(&format!("{}{s}", h.name)))
                                })
                                .expect("unbounded search")
                        })
                        .clone();
                    *family = format!("{family}{suffix}");
                    g.name = format!("{}{suffix}", g.name);
                }
                _ => {
                    g.name = LINE_NAMES
                        .iter()
                        .map(|s| s.to_string())
                        .chain((2..).map(|k| format!("{}{k}", g.name)))
                        .find(|s| !used.contains(s))
                        .expect("unbounded search");
                }
            }
        } else if let GenRole::Chern { family, .. } = &mut g.role {
            if let Some(s) = family_suffix.get(family.as_str()) {
                let s = s.clone();
                *family = format!("{family}{s}");
            }
        }
        used.insert(g.name.clone());
        out.push(g);
    }
    out
}

/// Ring morphism images embedding a factor's generators into a product ring.
fn factor_images(factor_ring: &Arc<RingCtx>, target: &Arc<RingCtx>, offset: usize) -> Vec<Elem> {
    let n = factor_ring.presentation().generators.len();
    let mut images: Vec<Elem> = (0..n).map(|k| Elem::generator_at(target, offset + k)).collect();
    if factor_ring.theta_index().is_some() {
        let t = target.theta_index().expect("same mode");
        images.push(Elem::generator_at(target, t));
    }
    images
}

fn shift_poly(p: &Poly, offset: usize, width: usize) -> Poly {
    Poly(
        p.0.iter()
            .map(|(c, e)| {
                let mut v = vec![0u32; width];
                v[offset..offset + e.len()].copy_from_slice(e);
                (*c, v)
            })
            .collect(),
    )
}

/// `X × Y`. Generators of `Y` are renamed on clashes; `θ` is shared.
pub fn product(x: &Arc<Space>, y: &Arc<Space>) -> Result<Arc<Space>> {
    if x.prime() != y.prime() || x.mode != y.mode {
        return Err(Error::usage(format!(
            "cannot form {x} x {y}: coefficient prime or mode differ"
        )));
    }
    if matches!(y.kind, SpaceKind::Point) {
        return Ok(x.clone());
    }
    if matches!(x.kind, SpaceKind::Point) {
        return Ok(y.clone());
    }
    let xp = x.ring.presentation();
    let yp = y.ring.presentation();
    let nx = xp.generators.len();
    let taken: BTreeSet<String> = xp.generators.iter().map(|g| g.name.clone()).collect();
    let ygens = rename_generators(&yp.generators, &taken);
    let mut gens = xp.generators.clone();
    gens.extend(ygens);
    let width = gens.len();
    let relations = xp
        .relations
        .iter()
        .map(|r| shift_poly(r, 0, width))
        .chain(yp.relations.iter().map(|r| shift_poly(r, nx, width)))
        .collect();
    let ring = make_ring(x.prime(), x.mode, xp.top_degree + yp.top_degree, gens, relations)?;
    let ix = factor_images(&x.ring, &ring, 0);
    let iy = factor_images(&y.ring, &ring, nx);

    let tangent = match (&x.tangent, &y.tangent) {
        (Some(tx), Some(ty)) => Some(
            whitney_sum(&tx.pullback(&ring, &ix)?, &ty.pullback(&ring, &iy)?)?.renamed("T"),
        ),
        _ => None,
    };
    let mut bundles = Vec::new();
    let mut names = BTreeSet::new();
    for (b, images) in x
        .bundles
        .iter()
        .map(|b| (b, &ix))
        .chain(y.bundles.iter().map(|b| (b, &iy)))
    {
        let mut name = b.name().to_string();
        let mut k = 2;
        while names.contains(&name) {
            name = format!("{}_{k}", b.name());
            k += 1;
        }
        names.insert(name.clone());
        bundles.push(b.pullback(&ring, images)?.renamed(&name));
    }
    let mut factors = x.factors.clone();
    factors.extend(y.factors.iter().map(|f| Factor {
        kind: f.kind.clone(),
        offset: f.offset + nx,
        ngens: f.ngens,
    }));
    let kind = SpaceKind::Product {
        factors: factors.iter().map(|f| f.kind.clone()).collect(),
    };
    Ok(Arc::new(Space {
        name: format!("{x} x {y}"),
        kind,
        ring,
        mode: x.mode,
        dim: x.dim + y.dim,
        tangent,
        factors,
        bundles,
    }))
}

/// Projectivization `P(E)`: adjoins `ζ` with `Σ_i c_i(E) ζ^{r−i} = 0`.
/// A tangent bundle is stored only when `E` is trivial.
pub fn projective_bundle(base: &Arc<Space>, e: &Bundle) -> Result<Arc<Space>> {
    if !same_ring(base.ring(), e.ring()) {
        return Err(Error::usage("bundle does not live on the given base"));
    }
    let r = e.rank();
    if r < 2 {
        return Err(Error::usage("projective bundles need rank at least 2"));
    }
    let bp = base.ring.presentation();
    let nb = bp.generators.len();
    let taken: BTreeSet<String> = bp.generators.iter().map(|g| g.name.clone()).collect();
    let zeta = rename_generators(&[Generator::line("zeta")], &taken).remove(0);
    let mut gens = bp.generators.clone();
    gens.push(zeta.clone());
    let width = nb + 1;
    let mut relations: Vec<Poly> = bp.relations.iter().map(|p| shift_poly(p, 0, width)).collect();
    let mut bundle_rel = Poly::new();
    for i in 0..=r {
        for (m, c) in e.chern_class(i).terms() {
            let mut v = m.0[..nb].to_vec();
            v.push((r - i) as u32);
            bundle_rel = bundle_rel.term(c.value() as i64, v);
        }
    }
    relations.push(bundle_rel);
    let ring = make_ring(
        base.prime(),
        base.mode,
        bp.top_degree + 2 * (r as u32 - 1),
        gens,
        relations,
    )?;
    let images = factor_images(&base.ring, &ring, 0);
    let z = Elem::generator(&ring, &zeta.name)?;
    let trivial = e.total() == &Elem::one(e.ring());
    let tangent = match (&base.tangent, trivial) {
        (Some(t), true) => {
            let fibre = Bundle::new("T_rel", r - 1, (&Elem::one(&ring) + &z).pow(r as u32))?;
            Some(whitney_sum(&t.pullback(&ring, &images)?, &fibre)?.renamed("T"))
        }
        _ => None,
    };
    let mut bundles = Vec::new();
    for b in &base.bundles {
        bundles.push(b.pullback(&ring, &images)?);
    }
    bundles.push(Bundle::line("O(1)", &z)?);
    let kind = SpaceKind::ProjBundle {
        base: Box::new(base.kind.clone()),
        rank: r,
        chern: e.total().to_json_value(),
    };
    let mut factors = base.factors.clone();
    factors.push(Factor {
        kind: kind.clone(),
        offset: nb,
        ngens: 1,
    });
    Ok(Arc::new(Space {
        name: format!("P({})", e.name()),
        kind,
        ring,
        mode: base.mode,
        dim: base.dim + r - 1,
        tangent,
        factors,
        bundles,
    }))
}

/// A closed embedding `X ↪ P` described by its restriction morphism, normal
/// bundle and fundamental class `[X] ∈ A^{2c,c}(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingData {
    pub name: String,
    pub source: Arc<Space>,
    pub target: Arc<Space>,
    /// Image in `A(X)` of each generator of `A(P)`, `θ` included.
    pub images: Vec<Elem>,
    pub normal: Bundle,
    pub fundamental_class: Elem,
}

impl EmbeddingData {
    pub fn codim(&self) -> isize {
        self.target.dim() as isize - self.source.dim() as isize
    }

    pub fn restrict(&self, x: &Elem) -> Result<Elem> {
        restrict(x, self)
    }
}

/// `i^*`: applies the declared restriction morphism `A(P) → A(X)`.
pub fn restrict(x: &Elem, e: &EmbeddingData) -> Result<Elem> {
    if !same_ring(x.ring(), e.target.ring()) {
        return Err(Error::usage(format!(
            "element does not belong to the ambient space {} of `{}`",
            e.target, e.name
        )));
    }
    if e.images.len() != e.target.ring().ngens() {
        return Err(Error::usage(format!(
            "embedding `{}` declares {} generator images, ambient ring has {}",
            e.name,
            e.images.len(),
            e.target.ring().ngens()
        )));
    }
    x.substitute(e.source.ring(), &e.images)
}

/// The free module `τ·A(X)` modeling cohomology of `P` with supports in `X`.
#[derive(Debug)]
pub struct ThomModule {
    data: EmbeddingData,
    codim: usize,
    /// A preimage under restriction of every θ-free basis monomial of `A(X)`.
    lifts: HashMap<Monomial, Elem>,
}

impl PartialEq for ThomModule {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.data == other.data
    }
}

impl Eq for ThomModule {}

/// Validates embedding data and builds its Thom module.
///
/// Besides the rank check this requires: generator images of the right
/// bidegrees satisfying the ambient relations, `[X]` in bidegree `(2c,c)`,
/// `i^*[X] = c_top(N)`, a surjective restriction map, and `ker(i^*)·[X] = 0`
/// (so `i_!(a) = lift(a)·[X]` is independent of the lift).
pub fn thom_module(data: EmbeddingData) -> Result<Arc<ThomModule>> {
    let name = &data.name;
    let src = data.source.ring();
    let tgt = data.target.ring();
    let codim = data.codim();
    if codim < 0 {
        return Err(Error::usage(format!(
            "embedding `{name}`: source has larger dimension than target"
        )));
    }
    let codim = codim as usize;
    if data.normal.rank() != codim {
        return Err(Error::usage(format!(
            "embedding `{name}`: normal bundle rank {} differs from codimension {codim}",
            data.normal.rank()
        )));
    }
    if src.prime() != tgt.prime() || data.source.mode() != data.target.mode() {
        return Err(Error::usage(format!(
            "embedding `{name}`: source and target coefficients differ"
        )));
    }
    if !same_ring(data.normal.ring(), src) {
        return Err(Error::usage(format!(
            "embedding `{name}`: normal bundle is not over the source"
        )));
    }
    if data.images.len() != tgt.ngens() {
        return Err(Error::usage(format!(
            "embedding `{name}`: expected {} generator images, got {}",
            tgt.ngens(),
            data.images.len()
        )));
    }
    for (img, g) in data.images.iter().zip(tgt.generators()) {
        if !same_ring(img.ring(), src) {
            return Err(Error::usage(format!(
                "embedding `{name}`: image of `{}` is not in the source ring",
                g.name
            )));
        }
        if g.role == GenRole::WeightUnit {
            if Some(img) != data.source.theta().as_ref() {
                return Err(Error::usage(format!("embedding `{name}`: theta must map to theta")));
            }
        } else if !(img.is_zero() || img.homogeneous_bidegree() == Some(g.bidegree)) {
            return Err(Error::usage(format!(
                "embedding `{name}`: image of `{}` is not homogeneous of bidegree {}",
                g.name, g.bidegree
            )));
        }
    }
    let core = tgt.presentation().generators.len();
    for (k, rel) in tgt.presentation().relations.iter().enumerate() {
        let mut acc = Elem::zero(src);
        for (c, exps) in &rel.0 {
            let mut t = Elem::constant(src, *c);
            for (img, &e) in data.images[..core].iter().zip(exps) {
                if e > 0 {
                    t = &t * &img.pow(e);
                }
            }
            acc = &acc + &t;
        }
        if !acc.is_zero() {
            return Err(Error::usage(format!(
                "embedding `{name}`: ambient relation {k} does not restrict to zero"
            )));
        }
    }
    let fc = &data.fundamental_class;
    if !same_ring(fc.ring(), tgt) {
        return Err(Error::usage(format!(
            "embedding `{name}`: fundamental class is not in the target ring"
        )));
    }
    if fc.homogeneous_bidegree() != Some(Bidegree::chern(codim as i32)) {
        return Err(Error::usage(format!(
            "embedding `{name}`: fundamental class must be nonzero of bidegree {}",
            Bidegree::chern(codim as i32)
        )));
    }
    if restrict(fc, &data)? != data.normal.top_chern_class() {
        return Err(Error::usage(format!(
            "embedding `{name}`: restriction of the fundamental class is not c_top(N)"
        )));
    }

    let mut lifts = HashMap::new();
    for d in src.stored_bidegrees().collect::<Vec<_>>() {
        let xs = src.core_basis(d);
        if xs.is_empty() {
            continue;
        }
        let ps: Vec<Monomial> = tgt.core_basis(d).to_vec();
        let images: Vec<Vec<u32>> = ps
            .iter()
            .map(|m| {
                let img = restrict(&Elem::from_terms(tgt, [(m.clone(), 1)]), &data)?;
                Ok(xs.iter().map(|x| img.coefficient(x)).collect())
            })
            .collect::<Result<_>>()?;
        let analysis = analyse_map(src.prime(), &images, xs.len());
        let to_elem = |coords: &[u32]| {
            Elem::from_terms(
                tgt,
                ps.iter()
                    .zip(coords)
                    .map(|(m, c)| (m.clone(), *c as i64)),
            )
        };
        for (x, pre) in xs.iter().zip(&analysis.preimages) {
            let Some(pre) = pre else {
                return Err(Error::usage(format!(
                    "embedding `{name}`: restriction is not surjective onto {} in bidegree {d}",
                    src.format_monomial(x)
                )));
            };
            lifts.insert(x.clone(), to_elem(pre));
        }
        for k in &analysis.kernel {
            if !(&to_elem(k) * fc).is_zero() {
                return Err(Error::usage(format!(
                    "embedding `{name}`: the kernel of restriction does not annihilate [X] in bidegree {d}"
                )));
            }
        }
    }
    Ok(Arc::new(ThomModule { data, codim, lifts }))
}

impl ThomModule {
    pub fn data(&self) -> &EmbeddingData {
        &self.data
    }

    pub fn name(&self) -> &str {
        &self.data.name
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn source(&self) -> &Arc<Space> {
        &self.data.source
    }

    pub fn target(&self) -> &Arc<Space> {
        &self.data.target
    }

    pub fn normal(&self) -> &Bundle {
        &self.data.normal
    }

    /// Bidegree of `τ`.
    pub fn tau_bidegree(&self) -> Bidegree {
        Bidegree::chern(self.codim as i32)
    }

    /// A preimage of `a` under restriction.
    pub fn lift(&self, a: &Elem) -> Result<Elem> {
        let src = self.data.source.ring();
        let tgt = self.data.target.ring();
        if !same_ring(a.ring(), src) {
            return Err(Error::usage(format!(
                "element is not in the source ring of `{}`",
                self.data.name
            )));
        }
        let theta_src = src.theta_index();
        let theta_tgt = tgt.theta_index().map(|t| Elem::generator_at(tgt, t));
        let mut acc = Elem::zero(tgt);
        for (m, c) in a.terms() {
            let mut core = m.clone();
            let mut shift = 0;
            if let Some(t) = theta_src {
                shift = core.0[t];
                core.0[t] = 0;
            }
            let mut l = self.lifts.get(&core).cloned().ok_or_else(|| {
                Error::ContractViolation(format!("no lift recorded for {}", src.format_monomial(&core)))
            })?;
            if shift > 0 {
                l = &l * &theta_tgt.as_ref().expect("same mode").pow(shift);
            }
            acc = &acc + &l.scale(c.value() as i64);
        }
        Ok(acc)
    }

    /// Image of `τ·a` in `A(P)`: `lift(a)·[X]`.
    pub fn forget_support(&self, a: &Elem) -> Result<Elem> {
        Ok(&self.lift(a)? * &self.data.fundamental_class)
    }
}

/// `τ·a` with `a ∈ A(X)`.
#[derive(Clone, Debug)]
pub struct SupportedElem {
    module: Arc<ThomModule>,
    coeff: Elem,
}

impl PartialEq for SupportedElem {
    fn eq(&self, other: &Self) -> bool {
        self.module == other.module && self.coeff == other.coeff
    }
}

impl Eq for SupportedElem {}

impl SupportedElem {
    pub fn new(module: &Arc<ThomModule>, coeff: Elem) -> Result<SupportedElem> {
        if !same_ring(coeff.ring(), module.source().ring()) {
            return Err(Error::usage(format!(
                "coefficient is not in the source ring of `{}`",
                module.name()
            )));
        }
        Ok(SupportedElem {
            module: module.clone(),
            coeff,
        })
    }

    pub fn tau(module: &Arc<ThomModule>) -> SupportedElem {
        SupportedElem {
            module: module.clone(),
            coeff: Elem::one(module.source().ring()),
        }
    }

    pub fn module(&self) -> &Arc<ThomModule> {
        &self.module
    }

    pub fn coeff(&self) -> &Elem {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn bidegree(&self) -> Option<Bidegree> {
        self.coeff
            .homogeneous_bidegree()
            .map(|d| d + self.module.tau_bidegree())
    }

    fn same_module(&self, other: &SupportedElem) -> Result<()> {
        if self.module == other.module {
            Ok(())
        } else {
            Err(Error::usage("supported elements live in different Thom modules"))
        }
    }

    pub fn checked_add(&self, other: &SupportedElem) -> Result<SupportedElem> {
        self.same_module(other)?;
        Ok(SupportedElem {
            module: self.module.clone(),
            coeff: self.coeff.checked_add(&other.coeff)?,
        })
    }

    pub fn checked_sub(&self, other: &SupportedElem) -> Result<SupportedElem> {
        self.checked_add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> SupportedElem {
        SupportedElem {
            module: self.module.clone(),
            coeff: self.coeff.scale(c),
        }
    }

    /// Multiplication by `a ∈ A(X)`.
    pub fn mul_base(&self, a: &Elem) -> Result<SupportedElem> {
        Ok(SupportedElem {
            module: self.module.clone(),
            coeff: self.coeff.checked_mul(a)?,
        })
    }

    /// The `A(P)`-action: restrict, then multiply.
    pub fn act(&self, b: &Elem) -> Result<SupportedElem> {
        self.mul_base(&restrict(b, self.module.data())?)
    }

    /// Image in `A(P)`.
    pub fn forget_support(&self) -> Result<Elem> {
        self.module.forget_support(&self.coeff)
    }

    /// Component `τ·a_d` with `a_d` the part of the coefficient in bidegree `d`.
    pub fn component(&self, d: Bidegree) -> SupportedElem {
        SupportedElem {
            module: self.module.clone(),
            coeff: self.coeff.component(d),
        }
    }
}

impl fmt::Display for SupportedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "0");
        }
        if self.coeff == Elem::one(self.coeff.ring()) {
            return write!(f, "tau");
        }
        if self.coeff.len() == 1 {
            return write!(f, "tau*{}", self.coeff);
        }
        write!(f, "tau*({})", self.coeff)
    }
}

fn single_line_generator(s: &Space) -> Result<Option<Elem>> {
    let gens = &s.ring.presentation().generators;
    match gens.as_slice() {
        [] => Ok(None),
        [g] if g.role == GenRole::Line => Ok(Some(Elem::generator_at(&s.ring, 0))),
        _ => Err(Error::usage(format!(
            "{s} is not a projective space with a single hyperplane class"
        ))),
    }
}

fn theta_tail(source: &Space, target: &Space) -> Vec<Elem> {
    match (target.ring.theta_index(), source.theta()) {
        (Some(_), Some(t)) => vec![t],
        _ => vec![],
    }
}

/// Linear `Pᵐ ↪ Pⁿ`: `u ↦ u`, `N = O(1)^{⊕(n−m)}`, `[X] = u^{n−m}`.
pub fn linear_embedding(source: &Arc<Space>, target: &Arc<Space>) -> Result<EmbeddingData> {
    let (m, n) = (source.dim(), target.dim());
    if m > n {
        return Err(Error::usage(format!("cannot embed {source} linearly into {target}")));
    }
    let h_src = single_line_generator(source)?;
    let h_tgt = single_line_generator(target)?;
    let c = (n - m) as u32;
    let src_ring = source.ring();
    let mut images = Vec::new();
    if h_tgt.is_some() {
        images.push(h_src.clone().unwrap_or_else(|| Elem::zero(src_ring)));
    }
    images.extend(theta_tail(source, target));
    let h = h_src.unwrap_or_else(|| Elem::zero(src_ring));
    let normal = Bundle::new("N", c as usize, (&Elem::one(src_ring) + &h).pow(c))?;
    let fundamental_class = match &h_tgt {
        Some(u) => u.pow(c),
        None => Elem::one(target.ring()),
    };
    Ok(EmbeddingData {
        name: format!("{source}->{target}"),
        source: source.clone(),
        target: target.clone(),
        images,
        normal,
        fundamental_class,
    })
}

pub fn identity_embedding(x: &Arc<Space>) -> EmbeddingData {
    let ring = x.ring();
    EmbeddingData {
        name: format!("id_{x}"),
        source: x.clone(),
        target: x.clone(),
        images: (0..ring.ngens()).map(|k| Elem::generator_at(ring, k)).collect(),
        normal: Bundle::trivial(ring, 0).renamed("N"),
        fundamental_class: Elem::one(ring),
    }
}

/// Graph of the linear map `Pᵐ → Pⁿ` inside `Pᵐ × Pⁿ`:
/// `[Γ] = Σ_{i ≤ m} a^i b^{n−i}`, normal bundle the pulled-back tangent of `Pⁿ`.
pub fn graph_of_linear(source: &Arc<Space>, ambient: &Arc<Space>) -> Result<EmbeddingData> {
    let m = source.dim();
    let [fa, fb] = ambient.factors() else {
        return Err(Error::usage(format!("{ambient} is not a product of two factors")));
    };
    let (SpaceKind::Proj { n: ma }, SpaceKind::Proj { n }) = (&fa.kind, &fb.kind) else {
        return Err(Error::usage(format!("{ambient} is not a product of projective spaces")));
    };
    let n = *n;
    if *ma != m || m > n || m == 0 {
        return Err(Error::usage(format!(
            "graph of a linear map needs {source} = first factor of {ambient} and m ≤ n"
        )));
    }
    let h = single_line_generator(source)?.expect("m > 0");
    let ring = ambient.ring();
    let a = Elem::generator_at(ring, fa.offset);
    let b = Elem::generator_at(ring, fb.offset);
    let mut images = vec![h.clone(), h.clone()];
    images.extend(theta_tail(source, ambient));
    let mut fc = Elem::zero(ring);
    for i in 0..=m {
        fc = &fc + &(&a.pow(i as u32) * &b.pow((n - i) as u32));
    }
    let normal = Bundle::new(
        "N",
        n,
        (&Elem::one(source.ring()) + &h).pow(n as u32 + 1),
    )?;
    Ok(EmbeddingData {
        name: format!("graph({source}->P{n})"),
        source: source.clone(),
        target: ambient.clone(),
        images,
        normal,
        fundamental_class: fc,
    })
}

/// Graph of a degree-`d` self-map of `P¹` inside `P¹ × P¹`, with the target
/// factor first: `u ↦ d·h`, `v ↦ h`, `[Γ] = u + d·v`, `c_1(N) = 2d·h`.
pub fn graph_of_power_map(d: u32, ambient: &Arc<Space>) -> Result<EmbeddingData> {
    let [fa, fb] = ambient.factors() else {
        return Err(Error::usage(format!("{ambient} is not P1 x P1")));
    };
    if fa.kind != (SpaceKind::Proj { n: 1 }) || fb.kind != (SpaceKind::Proj { n: 1 }) {
        return Err(Error::usage(format!("{ambient} is not P1 x P1")));
    }
    let source = projective_space(1, ambient.prime(), ambient.mode())?;
    let h = Elem::generator(source.ring(), "u")?;
    let ring = ambient.ring();
    let u = Elem::generator_at(ring, fa.offset);
    let v = Elem::generator_at(ring, fb.offset);
    let mut images = vec![h.scale(d as i64), h.clone()];
    images.extend(theta_tail(&source, ambient));
    let normal = Bundle::line("N", &h.scale(2 * d as i64))?;
    Ok(EmbeddingData {
        name: format!("graph(x^{d})"),
        source,
        target: ambient.clone(),
        images,
        normal,
        fundamental_class: &u + &v.scale(d as i64),
    })
}
