//! Worked instances with hand-computed expected values.

mod common;

use charcalc::chern::{
    evaluate_genus, has_well_defined_todd_genus, inverse_todd_of_operation, todd_of_operation, whitney_sum, Bundle,
    Genus,
};
use charcalc::operations::{
    apply_operation, apply_to_thom, bockstein, bockstein_supported, dual_homology_operation, graded_piece,
    odd_degrees_vanish, steenrod_total, twisted_operation, HomologyClass, OpMode, Operation,
};
use charcalc::pushforward::{
    compose_pushforward, embed_pushforward, proj_pushforward, pushforward_supported, Projection, ProperMap,
};
use charcalc::spaces::{
    grassmannian, graph_of_power_map, identity_embedding, linear_embedding, point, product, projective_space,
    restrict, thom_module, CoefficientMode, SupportedElem,
};
use charcalc::{Bidegree, Elem, Error, Generator, Poly, Presentation, RingCtx, Series};
use common::prime;

const PP: CoefficientMode = CoefficientMode::PurePoint;

fn gen(ring: &std::sync::Arc<RingCtx>, name: &str) -> Elem {
    Elem::generator(ring, name).unwrap()
}

fn op(mode: OpMode, l: u32) -> Operation {
    steenrod_total(mode, prime(l), mode == OpMode::QmodP).unwrap()
}

// ---- rings ----

#[test]
fn truncated_polynomial_ring_mod_five() {
    let ring = RingCtx::new(Presentation {
        prime: prime(5),
        top_degree: 4,
        weight_unit: false,
        generators: vec![Generator::line("u")],
        relations: vec![Poly::new().term(1, vec![3])],
    })
    .unwrap();
    let names = |d| -> Vec<String> { ring.basis(d).iter().map(|m| ring.format_monomial(m)).collect() };
    assert_eq!(names(Bidegree(0, 0)), ["1"]);
    assert_eq!(names(Bidegree(2, 1)), ["u"]);
    assert_eq!(names(Bidegree(4, 2)), ["u^2"]);
    assert_eq!(ring.dimension(Bidegree(6, 3)), 0);
}

#[test]
fn point_ring_and_characteristic_two() {
    let pt = point(prime(3), PP).unwrap();
    assert_eq!(pt.ring().basis_table().len(), 1);
    assert_eq!(pt.ring().total_core_dimension(), 1);
    let p2 = projective_space(2, prime(2), PP).unwrap();
    let one = Elem::one(p2.ring());
    assert!((&one + &one).is_zero());
}

#[test]
fn whitney_presentation_of_gr24() {
    let chern = |n: &str, fam: &str, i| Generator::chern(n, fam, i, 2);
    let e = |c: usize, d: usize| {
        let mut v = vec![0u32; 4];
        if c > 0 {
            v[c - 1] = 1;
        }
        if d > 0 {
            v[1 + d] = 1;
        }
        v
    };
    let mut relations = Vec::new();
    for m in 1..=4usize {
        let mut r = Poly::new();
        for a in 0..=m.min(2) {
            if m - a <= 2 {
                r = r.term(1, e(a, m - a));
            }
        }
        relations.push(r);
    }
    let ring = RingCtx::new(Presentation {
        prime: prime(2),
        top_degree: 8,
        weight_unit: false,
        generators: vec![chern("c1", "S", 1), chern("c2", "S", 2), chern("d1", "Q", 1), chern("d2", "Q", 2)],
        relations,
    })
    .unwrap();
    assert_eq!(ring.total_core_dimension(), 6);
    let x = &(&(&gen(&ring, "c1") * &gen(&ring, "d1")) + &gen(&ring, "c2")) + &gen(&ring, "d2");
    assert!(x.is_zero());
}

#[test]
fn products_and_truncation() {
    let p3 = projective_space(3, prime(3), PP).unwrap();
    let u = gen(p3.ring(), "u");
    assert_eq!(&u * &u.pow(2), u.pow(3));
    assert!(!u.pow(3).is_zero());
    let p2 = projective_space(2, prime(3), PP).unwrap();
    let v = gen(p2.ring(), "u");
    assert!((&v * &v.pow(2)).is_zero());
    let q2 = projective_space(2, prime(2), PP).unwrap();
    let w = &Elem::one(q2.ring()) + &gen(q2.ring(), "u");
    assert_eq!((&w * &w).to_string(), "1 + u^2");
    assert!(matches!(u.checked_mul(&v), Err(Error::Usage(_))));
}

#[test]
fn bad_presentations_are_rejected() {
    let inhomogeneous = RingCtx::new(Presentation {
        prime: prime(3),
        top_degree: 4,
        weight_unit: false,
        generators: vec![Generator::line("u")],
        relations: vec![Poly::new().term(1, vec![2]).term(1, vec![1])],
    });
    assert!(matches!(inhomogeneous, Err(Error::Presentation(_))));
    assert!(matches!(charcalc::Prime::new(6), Err(Error::NotPrime(6))));
}

#[test]
fn series_inversion() {
    let f = prime(3);
    let s = Series::new("u", f, &[1, 0, 1], 6);
    let inv = s.invert().unwrap();
    assert_eq!(inv.coeffs(), &[1, 0, 2, 0, 1, 0, 2]);
    assert!(s.mul(&inv).unwrap().is_one());
    assert!(Series::one("u", f, 6).invert().unwrap().is_one());
    assert!(matches!(Series::new("u", f, &[0, 1], 6).invert(), Err(Error::NotInvertible)));
}

// ---- spaces ----

#[test]
fn projective_space_data() {
    let p2 = projective_space(2, prime(3), PP).unwrap();
    let degrees: Vec<Bidegree> = p2.ring().stored_bidegrees().filter(|d| p2.ring().dimension(*d) > 0).collect();
    assert_eq!(degrees, [Bidegree(0, 0), Bidegree(2, 1), Bidegree(4, 2)]);
    for d in degrees {
        assert_eq!(p2.ring().dimension(d), 1);
    }
    assert_eq!(projective_space(0, prime(3), PP).unwrap().ring().total_core_dimension(), 1);
    let p1 = projective_space(1, prime(2), PP).unwrap();
    assert_eq!(p1.tangent().unwrap().total(), &Elem::one(p1.ring()));
}

#[test]
fn grassmannians_of_lines_are_projective_spaces() {
    for n in 1..=4 {
        let g = grassmannian(1, n + 1, prime(3), PP).unwrap();
        let p = projective_space(n, prime(3), PP).unwrap();
        for w in 0..=n as i32 + 1 {
            let d = Bidegree::chern(w);
            assert_eq!(g.ring().dimension(d), p.ring().dimension(d), "n = {n}, w = {w}");
        }
    }
}

#[test]
fn gr24_pieri_and_whitney() {
    let g = grassmannian(2, 4, prime(2), PP).unwrap();
    let (s, q) = (g.bundle("S").unwrap(), g.bundle("Q").unwrap());
    let c1 = s.chern_class(1);
    assert_eq!(&c1 * &c1, &s.chern_class(2) + &q.chern_class(2));
    assert_eq!(s.total() * q.total(), Elem::one(g.ring()));
    assert!(odd_degrees_vanish(g.ring()));
}

#[test]
fn product_bases() {
    let p1 = projective_space(1, prime(2), PP).unwrap();
    let pp = product(&p1, &p1).unwrap();
    let mut all: Vec<String> = pp
        .ring()
        .basis_table()
        .into_iter()
        .flat_map(|(_, ms)| ms.into_iter().map(|m| pp.ring().format_monomial(&m)).collect::<Vec<_>>())
        .collect();
    all.sort();
    assert_eq!(all, ["1", "u", "u*v", "v"]);
    let pt = point(prime(2), PP).unwrap();
    assert_eq!(product(&p1, &pt).unwrap().ring(), p1.ring());
    let p2 = projective_space(2, prime(2), PP).unwrap();
    assert_eq!(product(&p1, &p2).unwrap().ring().total_core_dimension(), 6);
}

#[test]
fn thom_modules() {
    let f = prime(3);
    let (pt, p1, p2, p3) = (
        projective_space(0, f, PP).unwrap(),
        projective_space(1, f, PP).unwrap(),
        projective_space(2, f, PP).unwrap(),
        projective_space(3, f, PP).unwrap(),
    );
    let point_in_line = thom_module(linear_embedding(&pt, &p1).unwrap()).unwrap();
    assert_eq!(point_in_line.tau_bidegree(), Bidegree(2, 1));
    assert_eq!(embed_pushforward(&point_in_line, &Elem::one(pt.ring())).unwrap(), gen(p1.ring(), "u"));

    let id = thom_module(identity_embedding(&p2)).unwrap();
    assert_eq!(id.tau_bidegree(), Bidegree(0, 0));
    let x = &gen(p2.ring(), "u") + &Elem::one(p2.ring());
    assert_eq!(embed_pushforward(&id, &x).unwrap(), x);

    let line = thom_module(linear_embedding(&p1, &p2).unwrap()).unwrap();
    let u = gen(p1.ring(), "u");
    assert_eq!(embed_pushforward(&line, &Elem::one(p1.ring())).unwrap(), gen(p2.ring(), "u"));
    assert_eq!(embed_pushforward(&line, &u).unwrap(), gen(p2.ring(), "u").pow(2));
    assert_eq!(restrict(&gen(p2.ring(), "u"), line.data()).unwrap(), u);
    assert_eq!(restrict(&Elem::one(p2.ring()), line.data()).unwrap(), Elem::one(p1.ring()));
    let in_p3 = linear_embedding(&p1, &p3).unwrap();
    assert!(restrict(&gen(p3.ring(), "u").pow(2), &in_p3).unwrap().is_zero());

    let mut bad = linear_embedding(&p1, &p3).unwrap();
    bad.normal = Bundle::line("N", &u).unwrap();
    assert!(matches!(thom_module(bad), Err(Error::Usage(_))));
}

// ---- bundles and genera ----

#[test]
fn whitney_sums() {
    let p2 = projective_space(2, prime(2), PP).unwrap();
    let o1 = p2.bundle("O(1)").unwrap();
    let sum = whitney_sum(o1, o1).unwrap();
    assert_eq!(sum.rank(), 2);
    assert_eq!(sum.total().to_string(), "1 + u^2");
    let zero = Bundle::trivial(p2.ring(), 0);
    assert_eq!(whitney_sum(o1, &zero).unwrap().total(), o1.total());

    let f = prime(5);
    let (p1, p4) = (projective_space(1, f, PP).unwrap(), projective_space(4, f, PP).unwrap());
    let normal = linear_embedding(&p1, &p4).unwrap().normal;
    let o = p1.bundle("O(1)").unwrap();
    let triple = whitney_sum(&whitney_sum(o, o).unwrap(), o).unwrap();
    assert_eq!(triple.total(), normal.total());
    assert_eq!(triple.rank(), normal.rank());
}

#[test]
fn inverse_todd_series_of_presets() {
    for l in [2, 3, 5] {
        let itd = inverse_todd_of_operation(&op(OpMode::QmodL, l), 8).unwrap();
        let mut want = vec![0u32; 9];
        want[0] = 1;
        want[(l - 1) as usize] += 1;
        assert_eq!(itd.series.coeffs(), &want[..]);
        let itd_p = inverse_todd_of_operation(&op(OpMode::QmodP, l), 8).unwrap();
        let mut want = vec![0u32; 9];
        want[(l - 1) as usize] = 1;
        assert_eq!(itd_p.series.coeffs(), &want[..]);
        assert!(inverse_todd_of_operation(&op(OpMode::Identity, l), 8).unwrap().series.is_one());
    }
}

#[test]
fn todd_series_and_well_definedness() {
    let td = todd_of_operation(&op(OpMode::QmodL, 3), 6).unwrap();
    assert_eq!(td.series.coeffs(), &[1, 0, 2, 0, 1, 0, 2]);
    assert!(matches!(todd_of_operation(&op(OpMode::QmodP, 3), 6), Err(Error::NotWellDefined { .. })));
    assert!(todd_of_operation(&op(OpMode::Identity, 3), 6).unwrap().series.is_one());
    assert!(has_well_defined_todd_genus(&op(OpMode::QmodL, 3)));
    assert!(!has_well_defined_todd_genus(&op(OpMode::QmodP, 3)));
    assert!(has_well_defined_todd_genus(&op(OpMode::Identity, 3)));
}

#[test]
fn genus_evaluations() {
    let f = prime(5);
    let p4 = projective_space(4, f, PP).unwrap();
    let u = gen(p4.ring(), "u");
    let line = Bundle::line("L", &u.scale(2)).unwrap();
    let itd = inverse_todd_of_operation(&op(OpMode::QmodL, 5), 4).unwrap();
    assert_eq!(evaluate_genus(&itd, &line).unwrap(), &Elem::one(p4.ring()) + &u.scale(2).pow(4));
    let g = grassmannian(2, 5, f, PP).unwrap();
    let s = g.bundle("S").unwrap();
    let itd_p = inverse_todd_of_operation(&op(OpMode::QmodP, 5), 6).unwrap();
    assert_eq!(evaluate_genus(&itd_p, s).unwrap(), s.chern_class(2).pow(4));
    let one = Genus::new("1", Series::one("u", f, 6));
    assert_eq!(evaluate_genus(&one, s).unwrap(), Elem::one(g.ring()));
    let short = Genus::new("short", Series::one("u", f, 2));
    assert!(matches!(evaluate_genus(&short, s), Err(Error::Usage(_))));
}

// ---- operations ----

#[test]
fn preset_series() {
    assert_eq!(op(OpMode::QmodL, 3).series(4).to_string(), "u + u^3");
    assert_eq!(op(OpMode::QmodP, 2).series(4).to_string(), "u^2");
    assert_eq!(op(OpMode::Identity, 7).series(4).to_string(), "u");
    assert!(matches!(steenrod_total(OpMode::QmodP, prime(3), false), Err(Error::Usage(_))));
}

#[test]
fn operations_on_projective_plane() {
    let p2 = projective_space(2, prime(3), PP).unwrap();
    let u = gen(p2.ring(), "u");
    assert_eq!(apply_operation(&op(OpMode::QmodL, 3), &u).unwrap(), u);
    let q2 = projective_space(2, prime(2), PP).unwrap();
    let v = gen(q2.ring(), "u");
    assert_eq!(apply_operation(&op(OpMode::QmodP, 2), &v).unwrap(), v.pow(2));
    for mode in [OpMode::QmodL, OpMode::QmodP, OpMode::Pmotivic, OpMode::Identity] {
        let one = Elem::one(p2.ring());
        assert_eq!(apply_operation(&op(mode, 3), &one).unwrap(), one);
    }
}

#[test]
fn graded_pieces_in_p4() {
    let f = prime(3);
    let p4 = projective_space(4, f, PP).unwrap();
    let u = gen(p4.ring(), "u");
    let total = apply_operation(&op(OpMode::QmodL, 3), &u).unwrap();
    let d = Bidegree(2, 1);
    assert_eq!(graded_piece(&total, d, 0, f), u);
    assert_eq!(graded_piece(&total, d, 1, f), u.pow(3));
    assert!(graded_piece(&total, d, 5, f).is_zero());
    let sum = (0..4).fold(Elem::zero(p4.ring()), |acc, s| &acc + &graded_piece(&total, d, s, f));
    assert_eq!(sum, total);
}

#[test]
fn relations_and_products_are_respected() {
    for l in [2, 3, 5] {
        let g = grassmannian(2, 5, prime(l), PP).unwrap();
        let phi = op(OpMode::QmodL, l);
        let (s, q) = (g.bundle("S").unwrap(), g.bundle("Q").unwrap());
        let lhs = &apply_operation(&phi, s.total()).unwrap() * &apply_operation(&phi, q.total()).unwrap();
        assert_eq!(lhs, Elem::one(g.ring()));

        let p1 = projective_space(1, prime(l), PP).unwrap();
        let p2 = projective_space(2, prime(l), PP).unwrap();
        let pp = product(&p1, &p2).unwrap();
        let (u, v) = (gen(pp.ring(), "u"), gen(pp.ring(), "v"));
        let x = &u + &Elem::one(pp.ring());
        let y = &v.pow(2) + &v.scale(2);
        let cross = apply_operation(&phi, &(&x * &y)).unwrap();
        assert_eq!(cross, &apply_operation(&phi, &x).unwrap() * &apply_operation(&phi, &y).unwrap());
        for (d, c) in cross.components() {
            assert_eq!(d.0 % 2, 0, "{c}");
        }
    }
}

#[test]
fn thom_action_and_bockstein() {
    let f = prime(3);
    let (p1, p2) = (projective_space(1, f, PP).unwrap(), projective_space(2, f, PP).unwrap());
    let m = thom_module(linear_embedding(&p1, &p2).unwrap()).unwrap();
    let tau = SupportedElem::tau(&m);
    assert_eq!(apply_to_thom(&op(OpMode::QmodL, 3), &tau).unwrap(), tau);
    assert_eq!(apply_to_thom(&op(OpMode::Identity, 3), &tau).unwrap(), tau);
    let id = thom_module(identity_embedding(&p2)).unwrap();
    let u = gen(p2.ring(), "u");
    let t = SupportedElem::new(&id, u.clone()).unwrap();
    let phi = op(OpMode::QmodL, 3);
    assert_eq!(apply_to_thom(&phi, &t).unwrap().coeff(), &apply_operation(&phi, &u).unwrap());

    assert!(bockstein(&u).unwrap().0.is_zero());
    assert!(bockstein(&Elem::one(p2.ring())).unwrap().0.is_zero());
    let tu = SupportedElem::new(&m, gen(p1.ring(), "u")).unwrap();
    let (b, trace) = bockstein_supported(&tu).unwrap();
    assert!(b.is_zero());
    assert_eq!(trace.terms.len(), 2);
}

#[test]
fn twisted_operations() {
    let p2 = projective_space(2, prime(2), PP).unwrap();
    let u = gen(p2.ring(), "u");
    let tw = twisted_operation(&op(OpMode::QmodL, 2), &p2).unwrap();
    assert_eq!(tw.todd_class(), &(&Elem::one(p2.ring()) + &u));
    let id = twisted_operation(&op(OpMode::Identity, 2), &p2).unwrap();
    assert_eq!(id.apply(&u).unwrap(), u);
    assert!(matches!(twisted_operation(&op(OpMode::QmodP, 2), &p2), Err(Error::NotWellDefined { .. })));
}

#[test]
fn dual_homology_operations() {
    let f = prime(3);
    let (p1, p2) = (projective_space(1, f, PP).unwrap(), projective_space(2, f, PP).unwrap());
    let m = thom_module(linear_embedding(&p1, &p2).unwrap()).unwrap();
    let fund = HomologyClass::fundamental(&m);
    assert_eq!(fund.degree, (2, 1));
    let q0 = dual_homology_operation(&op(OpMode::QmodL, 3), &fund, 0).unwrap();
    assert_eq!(q0.avatar, SupportedElem::tau(&m));
    let q1 = dual_homology_operation(&op(OpMode::QmodL, 3), &fund, 1).unwrap();
    assert_eq!(q1.degree, (-2, -1));
    assert!(q1.is_zero());
    let same = dual_homology_operation(&op(OpMode::Identity, 3), &fund, 0).unwrap();
    assert_eq!((same.avatar, same.degree), (fund.avatar.clone(), fund.degree));
}

// ---- pushforwards ----

#[test]
fn projections_extract_the_top_coefficient() {
    let f = prime(3);
    let pt = point(f, PP).unwrap();
    let pr = Projection::new(&pt, 2).unwrap();
    let u = gen(pr.total_space().ring(), "u");
    assert_eq!(proj_pushforward(&pr, &u.pow(2)).unwrap(), Elem::one(pt.ring()));
    assert!(proj_pushforward(&pr, &u).unwrap().is_zero());
    let p1 = projective_space(1, f, PP).unwrap();
    let pr = Projection::new(&p1, 2).unwrap();
    let r = pr.total_space().ring();
    let a = &gen(r, "u") + &Elem::one(r);
    let a_base = &gen(p1.ring(), "u") + &Elem::one(p1.ring());
    assert_eq!(proj_pushforward(&pr, &(&a * &gen(r, "v").pow(2))).unwrap(), a_base);
}

#[test]
fn composite_pushforwards_and_shifts() {
    let f = prime(5);
    let to_pt = ProperMap::to_point_via(1, 1, f, PP).unwrap();
    let u = gen(to_pt.source().ring(), "u");
    assert_eq!(compose_pushforward(&to_pt, &u).unwrap(), Elem::one(to_pt.target().ring()));
    assert!(compose_pushforward(&to_pt, &Elem::one(to_pt.source().ring())).unwrap().is_zero());
    let p2 = projective_space(2, f, PP).unwrap();
    let id = ProperMap::identity(&p2).unwrap();
    let x = gen(p2.ring(), "u").scale(3);
    assert_eq!(compose_pushforward(&id, &x).unwrap(), x);

    // Homogeneous classes move by (2d', d').
    let pr = ProperMap::projection(&p2, 2).unwrap();
    let shift = pr.shift();
    assert_eq!(shift, Bidegree(-4, -2));
    let basis = pr.source().ring().basis_table();
    for (d, monos) in basis {
        for m in monos {
            let a = Elem::from_terms(pr.source().ring(), [(m, 1)]);
            let img = compose_pushforward(&pr, &a).unwrap();
            if !img.is_zero() {
                assert_eq!(img.homogeneous_bidegree(), Some(d + shift));
            }
        }
    }
}

#[test]
fn supported_pushforwards_scale_by_degree() {
    for (l, d, want) in [(3u32, 1u32, 1i64), (3, 2, 2), (5, 4, 4), (2, 2, 0), (3, 9, 0)] {
        let f = prime(l);
        let p1 = projective_space(1, f, PP).unwrap();
        let map = ProperMap::projection(&p1, 1).unwrap().with_degree(d as u64);
        let support = thom_module(graph_of_power_map(d, map.source()).unwrap()).unwrap();
        let image = thom_module(identity_embedding(&p1)).unwrap();
        let map = map.with_supports(support.clone(), image).unwrap();
        let pushed = pushforward_supported(&map, &SupportedElem::tau(&support)).unwrap();
        assert_eq!(pushed.coeff(), &Elem::constant(p1.ring(), want), "l = {l}, d = {d}");
    }
    let p1 = projective_space(1, prime(3), PP).unwrap();
    let bare = ProperMap::projection(&p1, 1).unwrap();
    let m = thom_module(identity_embedding(bare.source())).unwrap();
    assert!(matches!(pushforward_supported(&bare, &SupportedElem::tau(&m)), Err(Error::Usage(_))));
}
