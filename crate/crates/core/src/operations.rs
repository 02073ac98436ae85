//! Ring operations given by characteristic series, the Bockstein, twisted
//! operations and their homological duals.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chern::{evaluate_genus, inverse_todd_of_operation, todd_of_operation};
use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::ring::{same_ring, Bidegree, Elem, GenRole, RingCtx};
use crate::series::Series;
use crate::spaces::{Space, SupportedElem, ThomModule};
use crate::symmetric::reduce_to_elementary;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpMode {
    /// `u ↦ u + u^ℓ`, coefficients prime to the characteristic.
    QmodL,
    /// `u ↦ u^p`, coefficients mod the characteristic.
    QmodP,
    /// `u ↦ u + u^ℓ` for the motivic reduced powers, any ℓ.
    Pmotivic,
    Identity,
    Custom,
}

impl OpMode {
    pub fn name(self) -> &'static str {
        match self {
            OpMode::QmodL => "qmodl",
            OpMode::QmodP => "qmodp",
            OpMode::Pmotivic => "pmotivic",
            OpMode::Identity => "identity",
            OpMode::Custom => "custom",
        }
    }
}

/// A total ring operation determined by `φ(u)`, the image of a first Chern class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    mode: OpMode,
    prime: Prime,
    /// Whether the coefficient prime equals the ambient characteristic.
    char_equals_l: bool,
    /// `φ_k` for `k = 0, 1, …`; `φ_0 = 0`.
    phi: Vec<u32>,
}

/// The preset total operations.
pub fn steenrod_total(mode: OpMode, prime: Prime, char_equals_l: bool) -> Result<Operation> {
    let l = prime.get() as usize;
    let mut phi = vec![0u32; l + 1];
    match mode {
        OpMode::QmodL if char_equals_l => {
            return Err(Error::usage(
                "qmodl describes coefficients prime to the characteristic; drop --char-p",
            ))
        }
        OpMode::QmodP if !char_equals_l => {
            return Err(Error::usage(
                "qmodp describes coefficients mod the characteristic; pass --char-p",
            ))
        }
        OpMode::QmodL | OpMode::Pmotivic => {
            phi[1] = 1;
            phi[l] = prime.add(phi[l], 1);
        }
        OpMode::QmodP => phi[l] = 1,
        OpMode::Identity => phi[1] = 1,
        OpMode::Custom => {
            return Err(Error::usage("custom operations need an explicit series"));
        }
    }
    Ok(Operation::from_parts(mode, prime, char_equals_l, phi))
}

impl Operation {
    fn from_parts(mode: OpMode, prime: Prime, char_equals_l: bool, mut phi: Vec<u32>) -> Operation {
        while phi.len() > 2 && phi.last() == Some(&0) {
            phi.pop();
        }
        Operation {
            mode,
            prime,
            char_equals_l,
            phi,
        }
    }

    /// `φ(u) = Σ coeffs[k] u^k`; the constant term must vanish.
    pub fn custom(prime: Prime, coeffs: &[i64], char_equals_l: bool) -> Result<Operation> {
        let phi: Vec<u32> = coeffs.iter().map(|&c| prime.reduce_signed(c)).collect();
        if phi.first().copied().unwrap_or(0) != 0 {
            return Err(Error::ContractViolation(
                "the series of an operation must be divisible by u".into(),
            ));
        }
        let mut phi = phi;
        phi.resize(phi.len().max(2), 0);
        Ok(Operation::from_parts(OpMode::Custom, prime, char_equals_l, phi))
    }

    pub fn mode(&self) -> OpMode {
        self.mode
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn char_equals_l(&self) -> bool {
        self.char_equals_l
    }

    pub fn coefficient(&self, k: usize) -> u32 {
        self.phi.get(k).copied().unwrap_or(0)
    }

    pub fn label(&self) -> String {
        match self.mode {
            OpMode::Custom => format!("custom:{}", self.series(self.phi.len() - 1)),
            m => format!("{} mod {}", m.name(), self.prime),
        }
    }

    /// `φ(u)` truncated at `order`.
    pub fn series(&self, order: usize) -> Series {
        let c: Vec<i64> = self.phi.iter().map(|&x| x as i64).collect();
        Series::new("u", self.prime, &c, order)
    }

    /// Exponent `q` in the weight law of the dual homology operations:
    /// `ℓ` for the power operations, 1 for the identity.
    pub fn weight_base(&self) -> i32 {
        match self.mode {
            OpMode::Identity => 1,
            _ => self.prime.get() as i32,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn check_prime(op: &Operation, ring: &RingCtx) -> Result<()> {
    if op.prime != ring.prime() {
        return Err(Error::usage(format!(
            "operation over F_{} applied to a ring over F_{}",
            op.prime,
            ring.prime()
        )));
    }
    Ok(())
}

/// `Σ_k φ_k x^k`, truncated by the ring.
fn phi_of(op: &Operation, x: &Elem) -> Elem {
    let ring = x.ring();
    let mut acc = Elem::zero(ring);
    let mut power = Elem::one(ring);
    for (k, &c) in op.phi.iter().enumerate() {
        if k > 0 {
            power = &power * x;
            if power.is_zero() {
                break;
            }
        }
        if c != 0 {
            acc = &acc + &power.scale(c as i64);
        }
    }
    acc
}

/// `e_i(φ(t_1), …, φ(t_n))` in terms of the Chern classes `classes = [c_1..c_n]`.
fn phi_of_chern_class(op: &Operation, i: usize, classes: &[Elem], ring: &Arc<RingCtx>) -> Elem {
    let n = classes.len();
    let p = op.prime;
    let subsets: Vec<Vec<bool>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == i)
        .map(|m| (0..n).map(|j| m & (1 << j) != 0).collect())
        .collect();
    let poly = reduce_to_elementary(p, n, ring.top_weight(), |lambda| {
        subsets.iter().fold(0, |acc, s| {
            let term = lambda.iter().zip(s).fold(1, |t, (&l, &inside)| {
                if inside {
                    p.mul(t, op.coefficient(l as usize))
                } else {
                    p.mul(t, u32::from(l == 0))
                }
            });
            p.add(acc, term)
        })
    });
    let mut acc = Elem::zero(ring);
    for (beta, c) in poly {
        let mut term = Elem::constant(ring, c as i64);
        for (k, &b) in beta.iter().enumerate() {
            if b > 0 {
                term = &term * &classes[k].pow(b);
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// Images of all generators of `ring` under `op`.
pub fn generator_images(op: &Operation, ring: &Arc<RingCtx>) -> Result<Vec<Elem>> {
    check_prime(op, ring)?;
    let gens = ring.generators();
    let mut images = Vec::with_capacity(gens.len());
    for (k, g) in gens.iter().enumerate() {
        let x = Elem::generator_at(ring, k);
        let img = match &g.role {
            GenRole::Line => phi_of(op, &x),
            GenRole::WeightUnit => x,
            GenRole::Chern {
                family,
                index,
                rank,
            } => {
                let classes: Vec<Elem> = (1..=*rank)
                    .map(|i| {
                        gens.iter()
                            .position(|h| {
                                matches!(&h.role, GenRole::Chern { family: f, index: j, .. } if f == family && *j == i)
                            })
                            .map(|idx| Elem::generator_at(ring, idx))
                            .ok_or_else(|| {
                                Error::presentation(format!(
                                    "Chern family `{family}` has no class of index {i}"
                                ))
                            })
                    })
                    .collect::<Result<_>>()?;
                phi_of_chern_class(op, *index, &classes, ring)
            }
            GenRole::Opaque => {
                return Err(Error::usage(format!(
                    "generator `{}` has no declared action of {}",
                    g.name,
                    op.label()
                )))
            }
        };
        images.push(img);
    }
    Ok(images)
}

/// `φ(x)`: the ring endomorphism determined by `φ` on generators.
pub fn apply_operation(op: &Operation, x: &Elem) -> Result<Elem> {
    let images = generator_images(op, x.ring())?;
    x.substitute(x.ring(), &images)
}

/// Whether any term of `x` carries the weight unit.
pub fn involves_weight_unit(x: &Elem) -> bool {
    match x.ring().theta_index() {
        None => false,
        Some(t) => x.terms().any(|(m, _)| m.0[t] > 0),
    }
}

/// Bidegree shift of the `s`-th graded piece: `(2s(ℓ−1), s(ℓ−1))`.
pub fn piece_shift(s: u32, prime: Prime) -> Bidegree {
    let k = (s * (prime.get() - 1)) as i32;
    Bidegree(2 * k, k)
}

/// The `s`-th graded piece of `total = φ(x)` for `x` homogeneous of bidegree `source`.
pub fn graded_piece(total: &Elem, source: Bidegree, s: u32, prime: Prime) -> Elem {
    total.component(source + piece_shift(s, prime))
}

/// The `s`-th piece of a supported total, relative to a source of bidegree `source`.
pub fn graded_piece_supported(total: &SupportedElem, source: Bidegree, s: u32, prime: Prime) -> SupportedElem {
    let tau = total.module().tau_bidegree();
    total.component(source + piece_shift(s, prime) - tau)
}

/// `φ(τ·a) = τ·(itd_φ(N)·φ(a))`.
pub fn apply_to_thom(op: &Operation, t: &SupportedElem) -> Result<SupportedElem> {
    let module = t.module();
    let ring = module.source().ring();
    let itd = inverse_todd_of_operation(op, ring.top_weight() as usize)?;
    let itd_n = evaluate_genus(&itd, module.normal())?;
    let image = apply_operation(op, t.coeff())?;
    SupportedElem::new(module, itd_n.checked_mul(&image)?)
}

/// Why a Leibniz term of the Bockstein vanishes.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanishingReason {
    /// The generator carries an integral lift.
    Integral,
    /// The target bidegree `(i+1, j)` has no classes.
    OddBidegreeEmpty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizTerm {
    /// The factor the derivation hits (a generator name or `tau`).
    pub factor: String,
    pub target: Bidegree,
    pub reason: VanishingReason,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BocksteinTrace {
    pub input: String,
    pub terms: Vec<LeibnizTerm>,
    pub result: String,
}

fn bockstein_on_generator(ring: &RingCtx, k: usize) -> Result<LeibnizTerm> {
    let g = &ring.generators()[k];
    let target = g.bidegree + Bidegree(1, 0);
    let reason = if g.integral {
        VanishingReason::Integral
    } else if ring.dimension(target) == 0 {
        VanishingReason::OddBidegreeEmpty
    } else {
        return Err(Error::ContractViolation(format!(
            "no Bockstein value declared for generator `{}`",
            g.name
        )));
    };
    Ok(LeibnizTerm {
        factor: g.name.clone(),
        target,
        reason,
    })
}

/// `β(x)` by the Leibniz rule on the generators occurring in `x`.
///
/// Every generator either carries an integral lift or lands in an empty
/// odd bidegree, so each term, and the result, is zero.
pub fn bockstein(x: &Elem) -> Result<(Elem, BocksteinTrace)> {
    let ring = x.ring();
    let mut used = vec![false; ring.ngens()];
    for (m, _) in x.terms() {
        for (k, &e) in m.0.iter().enumerate() {
            used[k] |= e > 0;
        }
    }
    let mut terms = Vec::new();
    for (k, _) in used.iter().enumerate().filter(|(_, u)| **u) {
        terms.push(bockstein_on_generator(ring, k)?);
    }
    let result = Elem::zero(ring);
    Ok((
        result.clone(),
        BocksteinTrace {
            input: x.to_string(),
            terms,
            result: result.to_string(),
        },
    ))
}

/// `β(τ·a) = β(τ)·a + τ·β(a)`, with `β(τ) = 0` for the integral Thom class.
pub fn bockstein_supported(t: &SupportedElem) -> Result<(SupportedElem, BocksteinTrace)> {
    let (ba, inner) = bockstein(t.coeff())?;
    let mut terms = Vec::new();
    if !t.is_zero() {
        terms.push(LeibnizTerm {
            factor: "tau".into(),
            target: t.module().tau_bidegree() + Bidegree(1, 0),
            reason: VanishingReason::Integral,
        });
    }
    terms.extend(inner.terms);
    let result = SupportedElem::new(t.module(), ba)?;
    Ok((
        result.clone(),
        BocksteinTrace {
            input: t.to_string(),
            terms,
            result: result.to_string(),
        },
    ))
}

/// Every odd first degree of `ring` is zero-dimensional, in every stored weight.
pub fn odd_degrees_vanish(ring: &RingCtx) -> bool {
    let top = ring.top_degree() as i32;
    (0..=top)
        .filter(|i| i % 2 == 1)
        .all(|i| (0..=top).all(|j| ring.dimension(Bidegree(i, j)) == 0))
}

/// `U(α) = φ(α)·td_φ(TP)` on an ambient space `P`.
#[derive(Clone, Debug)]
pub struct TwistedOperation {
    op: Operation,
    ambient: Arc<Space>,
    td_tangent: Elem,
}

pub fn twisted_operation(op: &Operation, ambient: &Arc<Space>) -> Result<TwistedOperation> {
    let tangent = ambient
        .tangent()
        .ok_or_else(|| Error::usage(format!("{ambient} has no stored tangent bundle")))?;
    let td = todd_of_operation(op, ambient.ring().top_weight() as usize)?;
    Ok(TwistedOperation {
        op: op.clone(),
        ambient: ambient.clone(),
        td_tangent: evaluate_genus(&td, tangent)?,
    })
}

impl TwistedOperation {
    pub fn operation(&self) -> &Operation {
        &self.op
    }

    /// `td_φ(TP)`.
    pub fn todd_class(&self) -> &Elem {
        &self.td_tangent
    }

    pub fn apply(&self, x: &Elem) -> Result<Elem> {
        apply_operation(&self.op, x)?.checked_mul(&self.td_tangent)
    }

    pub fn apply_supported(&self, t: &SupportedElem) -> Result<SupportedElem> {
        if !same_ring(t.module().target().ring(), self.ambient.ring()) {
            return Err(Error::usage(format!(
                "supported element does not live on {}",
                self.ambient
            )));
        }
        apply_to_thom(&self.op, t)?.act(&self.td_tangent)
    }
}

/// A class in `H_i(X, j)`, represented by its avatar in `A_X(P)` with
/// `H_i(X,j) ↔ A^{2d−i, d−j}_X(P)`, `d = dim P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub avatar: SupportedElem,
    pub degree: (i32, i32),
    pub ambient_dim: usize,
    /// Difference between the declared weight and the weight read off the
    /// avatar; a power of the weight unit in the mod-ℓ≠p picture.
    pub weight_twist: i32,
}

impl HomologyClass {
    /// `[X]`, dual to `τ`.
    pub fn fundamental(module: &Arc<ThomModule>) -> HomologyClass {
        let x = module.source().dim() as i32;
        HomologyClass {
            avatar: SupportedElem::tau(module),
            degree: (2 * x, x),
            ambient_dim: module.target().dim(),
            weight_twist: 0,
        }
    }

    /// Homological bidegree read off an avatar of cohomological bidegree `d`.
    pub fn dual_degree(ambient_dim: usize, d: Bidegree) -> (i32, i32) {
        let a = ambient_dim as i32;
        (2 * a - d.0, a - d.1)
    }

    pub fn is_zero(&self) -> bool {
        self.avatar.is_zero()
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in H_{}(X,{})", self.avatar, self.degree.0, self.degree.1)
    }
}

/// `Q_s` on homology: `H_i(X,j) → H_{i−2s(q−1)}(X, qj − d(q−1))`, computed on
/// the avatar. A negative target degree gives the zero class.
pub fn dual_homology_operation(op: &Operation, h: &HomologyClass, s: u32) -> Result<HomologyClass> {
    let q = op.weight_base();
    let d = h.ambient_dim as i32;
    let (i, j) = h.degree;
    let target = (i - 2 * s as i32 * (q - 1), q * j - d * (q - 1));
    let module = h.avatar.module();
    if target.0 < 0 {
        return Ok(HomologyClass {
            avatar: SupportedElem::new(module, Elem::zero(module.source().ring()))?,
            degree: target,
            ambient_dim: h.ambient_dim,
            weight_twist: 0,
        });
    }
    let source = Bidegree(2 * d - i, d - j);
    let total = apply_to_thom(op, &h.avatar)?;
    let shift = if op.mode() == OpMode::Identity {
        Bidegree::ZERO
    } else {
        piece_shift(s, op.prime())
    };
    let piece = if op.mode() == OpMode::Identity && s > 0 {
        SupportedElem::new(module, Elem::zero(module.source().ring()))?
    } else {
        total.component(source + shift - module.tau_bidegree())
    };
    let read_off = HomologyClass::dual_degree(h.ambient_dim, source + shift);
    Ok(HomologyClass {
        avatar: piece,
        degree: target,
        ambient_dim: h.ambient_dim,
        weight_twist: target.1 - read_off.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{linear_embedding, projective_space, thom_module, CoefficientMode};

    fn f(p: u32) -> Prime {
        Prime::new(p).unwrap()
    }

    const PP: CoefficientMode = CoefficientMode::PurePoint;

    #[test]
    fn presets() {
        let q = steenrod_total(OpMode::QmodL, f(3), false).unwrap();
        assert_eq!(q.series(4).to_string(), "u + u^3");
        let qp = steenrod_total(OpMode::QmodP, f(2), true).unwrap();
        assert_eq!(qp.series(4).to_string(), "u^2");
        let id = steenrod_total(OpMode::Identity, f(5), false).unwrap();
        assert_eq!(id.series(4).to_string(), "u");
        assert!(steenrod_total(OpMode::QmodP, f(2), false).is_err());
        assert!(steenrod_total(OpMode::QmodL, f(2), true).is_err());
        // ℓ = 2: u + u^2.
        let q2 = steenrod_total(OpMode::QmodL, f(2), false).unwrap();
        assert_eq!(q2.series(4).to_string(), "u + u^2");
    }

    #[test]
    fn apply_on_projective_space() {
        let p2 = projective_space(2, f(3), PP).unwrap();
        let u = Elem::generator(p2.ring(), "u").unwrap();
        let q = steenrod_total(OpMode::QmodL, f(3), false).unwrap();
        assert_eq!(apply_operation(&q, &u).unwrap(), u);
        let p2b = projective_space(2, f(2), PP).unwrap();
        let ub = Elem::generator(p2b.ring(), "u").unwrap();
        let qp = steenrod_total(OpMode::QmodP, f(2), true).unwrap();
        assert_eq!(apply_operation(&qp, &ub).unwrap(), ub.pow(2));
        let one = Elem::one(p2.ring());
        assert_eq!(apply_operation(&q, &one).unwrap(), one);
    }

    #[test]
    fn graded_pieces_of_u_in_p4() {
        let p4 = projective_space(4, f(3), PP).unwrap();
        let u = Elem::generator(p4.ring(), "u").unwrap();
        let q = steenrod_total(OpMode::QmodL, f(3), false).unwrap();
        let total = apply_operation(&q, &u).unwrap();
        let src = Bidegree(2, 1);
        assert_eq!(graded_piece(&total, src, 0, f(3)), u);
        assert_eq!(graded_piece(&total, src, 1, f(3)), u.pow(3));
        assert!(graded_piece(&total, src, 2, f(3)).is_zero());
    }

    #[test]
    fn thom_action_of_p1_in_p2() {
        let p1 = projective_space(1, f(3), PP).unwrap();
        let p2 = projective_space(2, f(3), PP).unwrap();
        let m = thom_module(linear_embedding(&p1, &p2).unwrap()).unwrap();
        let q = steenrod_total(OpMode::QmodL, f(3), false).unwrap();
        let tau = SupportedElem::tau(&m);
        assert_eq!(apply_to_thom(&q, &tau).unwrap(), tau);
    }

    #[test]
    fn bockstein_is_zero_with_trace() {
        let p2 = projective_space(2, f(2), PP).unwrap();
        let u = Elem::generator(p2.ring(), "u").unwrap();
        let (b, trace) = bockstein(&u).unwrap();
        assert!(b.is_zero());
        assert_eq!(trace.terms.len(), 1);
        assert_eq!(trace.terms[0].reason, VanishingReason::Integral);
        let (b1, t1) = bockstein(&Elem::one(p2.ring())).unwrap();
        assert!(b1.is_zero() && t1.terms.is_empty());
        assert!(odd_degrees_vanish(p2.ring()));
    }

    #[test]
    fn twisted_td_of_p2_mod_two() {
        let p2 = projective_space(2, f(2), PP).unwrap();
        let q = steenrod_total(OpMode::QmodL, f(2), false).unwrap();
        let t = twisted_operation(&q, &p2).unwrap();
        assert_eq!(t.todd_class().to_string(), "1 + u");
        let qp = steenrod_total(OpMode::QmodP, f(2), true).unwrap();
        assert!(matches!(
            twisted_operation(&qp, &p2),
            Err(Error::NotWellDefined { .. })
        ));
    }

    #[test]
    fn dual_operations() {
        let p1 = projective_space(1, f(3), PP).unwrap();
        let p2 = projective_space(2, f(3), PP).unwrap();
        let m = thom_module(linear_embedding(&p1, &p2).unwrap()).unwrap();
        let q = steenrod_total(OpMode::QmodL, f(3), false).unwrap();
        let fc = HomologyClass::fundamental(&m);
        assert_eq!(fc.degree, (2, 1));
        let q0 = dual_homology_operation(&q, &fc, 0).unwrap();
        assert_eq!(q0.avatar, SupportedElem::tau(&m));
        let q1 = dual_homology_operation(&q, &fc, 1).unwrap();
        assert_eq!(q1.degree, (-2, -1));
        assert!(q1.is_zero());
        let id = steenrod_total(OpMode::Identity, f(3), false).unwrap();
        let same = dual_homology_operation(&id, &fc, 0).unwrap();
        assert_eq!(same, fc);
    }
}
