//! Shared fixtures: catalog spaces and seeded random classes.

#![allow(dead_code)]

use std::sync::Arc;

use charcalc::chern::Bundle;
use charcalc::spaces::{
    grassmannian, product, projective_bundle, projective_space, CoefficientMode, Space,
};
use charcalc::{Bidegree, Elem, Prime};
use rand::Rng;

pub const PRIMES: [u32; 3] = [2, 3, 5];

pub fn prime(p: u32) -> Prime {
    Prime::new(p).unwrap()
}

/// The spaces every property is checked on.
pub fn catalog(p: u32, mode: CoefficientMode) -> Vec<Arc<Space>> {
    let f = prime(p);
    let pn = |n| projective_space(n, f, mode).unwrap();
    let p1 = pn(1);
    let twisted = Bundle::new("E", 2, &Elem::one(p1.ring()) + &Elem::generator(p1.ring(), "u").unwrap()).unwrap();
    vec![
        pn(1),
        pn(2),
        pn(3),
        pn(4),
        grassmannian(2, 4, f, mode).unwrap(),
        grassmannian(2, 5, f, mode).unwrap(),
        product(&pn(1), &pn(2)).unwrap(),
        product(&pn(1), &pn(1)).unwrap(),
        projective_bundle(&p1, &twisted).unwrap(),
    ]
}

/// A class with uniformly random coordinates in every stored bidegree.
pub fn random_elem(space: &Space, rng: &mut impl Rng) -> Elem {
    let ring = space.ring();
    let p = ring.prime().get();
    let mut acc = Elem::zero(ring);
    let degrees: Vec<Bidegree> = ring.stored_bidegrees().collect();
    for d in degrees {
        let dim = ring.dimension(d);
        let coords: Vec<u32> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
        acc = &acc + &Elem::from_coordinates(ring, d, &coords);
    }
    if let Some(theta) = space.theta() {
        if rng.gen_bool(0.5) {
            acc = &acc * &theta.pow(rng.gen_range(1..3));
        }
    }
    acc
}

/// A random homogeneous class of Chern bidegree `(2i, i)`.
pub fn random_homogeneous(space: &Space, i: i32, rng: &mut impl Rng) -> Elem {
    let ring = space.ring();
    let p = ring.prime().get();
    let d = Bidegree::chern(i);
    let coords: Vec<u32> = (0..ring.dimension(d)).map(|_| rng.gen_range(0..p)).collect();
    Elem::from_coordinates(ring, d, &coords)
}

/// A bundle of the given rank with random Chern classes.
pub fn random_bundle(space: &Space, rank: usize, rng: &mut impl Rng) -> Bundle {
    let ring = space.ring();
    let mut total = Elem::one(ring);
    for i in 1..=rank.min(space.dim()) {
        total = &total + &random_homogeneous(space, i as i32, rng);
    }
    Bundle::new("E", rank, total).unwrap()
}
