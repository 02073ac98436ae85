//! Formal vector bundles and multiplicative genera evaluated through the
//! splitting principle.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coeff::Prime;
use crate::error::{Error, Result};
use crate::operations::{OpMode, Operation};
use crate::ring::{same_ring, Bidegree, Elem, RingCtx};
use crate::series::Series;
use crate::symmetric::{format_elementary, reduce_to_elementary, ElementaryPoly};

/// A formal bundle: a rank and a total Chern class `1 + c_1 + … + c_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    name: String,
    rank: usize,
    total: Elem,
}

impl Bundle {
    /// Validates that `total` has `c_0 = 1` and only Chern-bidegree parts up to the rank.
    pub fn new(name: &str, rank: usize, total: Elem) -> Result<Bundle> {
        for (d, _) in total.components() {
            let ok = d.0 >= 0 && d == Bidegree::chern(d.0 / 2) && (d.0 / 2) as usize <= rank;
            if !ok {
                return Err(Error::usage(format!(
                    "bundle `{name}` of rank {rank} has a Chern component in bidegree {d}"
                )));
            }
        }
        if total.component(Bidegree::ZERO) != Elem::one(total.ring()) {
            return Err(Error::usage(format!("bundle `{name}` must have c0 = 1")));
        }
        Ok(Bundle {
            name: name.to_string(),
            rank,
            total,
        })
    }

    /// Bundle with Chern classes `c_1, …, c_n` given in order.
    pub fn from_classes(name: &str, ring: &Arc<RingCtx>, classes: &[Elem]) -> Result<Bundle> {
        let mut total = Elem::one(ring);
        for c in classes {
            total = total.checked_add(c)?;
        }
        Bundle::new(name, classes.len(), total)
    }

    pub fn trivial(ring: &Arc<RingCtx>, rank: usize) -> Bundle {
        Bundle {
            name: format!("O^{rank}"),
            rank,
            total: Elem::one(ring),
        }
    }

    /// Line bundle with first Chern class `c1`.
    pub fn line(name: &str, c1: &Elem) -> Result<Bundle> {
        Bundle::from_classes(name, c1.ring(), std::slice::from_ref(c1))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: &str) -> Bundle {
        self.name = name.to_string();
        self
    }

    pub fn ring(&self) -> &Arc<RingCtx> {
        self.total.ring()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn total(&self) -> &Elem {
        &self.total
    }

    /// `c_i`; zero above the rank, one for `i = 0`.
    pub fn chern_class(&self, i: usize) -> Elem {
        self.total.component(Bidegree::chern(i as i32))
    }

    pub fn top_chern_class(&self) -> Elem {
        self.chern_class(self.rank)
    }

    /// Pullback along the ring morphism sending generator `k` to `images[k]`.
    pub fn pullback(&self, target: &Arc<RingCtx>, images: &[Elem]) -> Result<Bundle> {
        Bundle::new(&self.name, self.rank, self.total.substitute(target, images)?)
    }

    pub fn to_json_value(&self) -> BundleJson {
        BundleJson {
            name: self.name.clone(),
            rank: self.rank,
            chern_classes: (1..=self.rank)
                .map(|i| self.chern_class(i).to_string())
                .collect(),
        }
    }
}

/// Descriptor for output: rank plus printed Chern classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub name: String,
    pub rank: usize,
    pub chern_classes: Vec<String>,
}

pub fn whitney_sum(e: &Bundle, f: &Bundle) -> Result<Bundle> {
    if !same_ring(e.ring(), f.ring()) {
        return Err(Error::usage(format!(
            "cannot add bundles `{}` and `{}` over different bases",
            e.name, f.name
        )));
    }
    Ok(Bundle {
        name: format!("{}+{}", e.name, f.name),
        rank: e.rank + f.rank,
        total: e.total.checked_mul(&f.total)?,
    })
}

/// A multiplicative genus given by its characteristic series `g(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genus {
    pub label: String,
    pub series: Series,
}

impl Genus {
    pub fn new(label: &str, series: Series) -> Genus {
        Genus {
            label: label.to_string(),
            series,
        }
    }

    /// `∏ g(t_i)` over `rank` formal roots, in elementary symmetric polynomials,
    /// truncated at Chern weight `max_weight`.
    pub fn universal(&self, rank: usize, max_weight: u32) -> ElementaryPoly {
        let s = &self.series;
        reduce_to_elementary(s.prime(), rank, max_weight, |lambda| {
            let p = s.prime();
            lambda
                .iter()
                .fold(1, |acc, &k| p.mul(acc, s.coeff(k as usize)))
        })
    }

    /// The universal polynomial written in the Chern classes of a bundle named `bundle`.
    pub fn format_universal(&self, rank: usize, max_weight: u32, bundle: &str) -> String {
        format_elementary(&self.universal(rank, max_weight), |k| format!("c{k}({bundle})"))
    }
}

/// Evaluates `g` on `e`: `∏ g(t_i)` rewritten through `σ_i ↦ c_i(E)` and normalized.
pub fn evaluate_genus(g: &Genus, e: &Bundle) -> Result<Elem> {
    let ring = e.ring();
    if g.series.prime() != ring.prime() {
        return Err(Error::usage(format!(
            "genus `{}` is over F_{} but the base ring is over F_{}",
            g.label,
            g.series.prime(),
            ring.prime()
        )));
    }
    let top = ring.top_weight();
    if (g.series.order() as u32) < top {
        return Err(Error::usage(format!(
            "genus `{}` is truncated at order {}, below the top weight {top}",
            g.label,
            g.series.order()
        )));
    }
    let classes: Vec<Elem> = (1..=e.rank).map(|i| e.chern_class(i)).collect();
    let mut acc = Elem::zero(ring);
    for (beta, c) in g.universal(e.rank, top) {
        let mut term = Elem::constant(ring, c as i64);
        for (k, &b) in beta.iter().enumerate() {
            if b > 0 {
                term = &term * &classes[k].pow(b);
            }
        }
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `itd_φ(u) = φ(u)/u`, truncated at `order`.
pub fn inverse_todd_of_operation(op: &Operation, order: usize) -> Result<Genus> {
    let itd = op.series(order + 1).divide_by_var()?;
    Ok(Genus::new(&format!("itd of {}", op.label()), itd))
}

/// `td_φ = 1/itd_φ`; fails with `NotWellDefined` when `itd_φ(0)` is not a unit.
pub fn todd_of_operation(op: &Operation, order: usize) -> Result<Genus> {
    let itd = inverse_todd_of_operation(op, order)?;
    match itd.series.invert() {
        Ok(td) => Ok(Genus::new(&format!("td of {}", op.label()), td)),
        Err(Error::NotInvertible) => Err(Error::NotWellDefined {
            op: op.label().to_string(),
        }),
        Err(e) => Err(e),
    }
}

pub fn has_well_defined_todd_genus(op: &Operation) -> bool {
    op.prime().inv(op.coefficient(1)).is_some()
}

/// The closed form `c(E)^{ℓ−1}` that a product formula `∏(1+α_i)^{ℓ−1}` gives for
/// the inverse Todd class of `u + u^ℓ`.
pub fn itd_product_form(e: &Bundle, prime: Prime) -> Elem {
    e.total().pow(prime.get() - 1)
}

/// Both candidate inverse Todd classes of a bundle when they disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItdDiscrepancy {
    pub definitional: Elem,
    pub product_form: Elem,
}

/// For the `u + u^ℓ` presets, compares the definitional inverse Todd class of `e`
/// with [`itd_product_form`]. Returns `None` when they agree or when the
/// comparison does not apply to `op`.
pub fn itd_discrepancy(op: &Operation, e: &Bundle) -> Result<Option<ItdDiscrepancy>> {
    if !matches!(op.mode(), OpMode::QmodL | OpMode::Pmotivic) {
        return Ok(None);
    }
    let g = inverse_todd_of_operation(op, e.ring().top_weight() as usize)?;
    let definitional = evaluate_genus(&g, e)?;
    let product_form = itd_product_form(e, op.prime());
    Ok((definitional != product_form).then_some(ItdDiscrepancy {
        definitional,
        product_form,
    }))
}
