//! The ten acceptance criteria, one PASS/FAIL line each.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use charcalc::catalog::{EmbeddingSpec, MapSpec};
use charcalc::chern::{
    evaluate_genus, has_well_defined_todd_genus, inverse_todd_of_operation, todd_of_operation, Bundle,
};
use charcalc::operations::{apply_operation, bockstein, steenrod_total, OpMode, Operation};
use charcalc::pushforward::{compose_pushforward, embed_pushforward, Projection, ProperMap};
use charcalc::spaces::{
    graph_of_linear, grassmannian, linear_embedding, projective_space, restrict, thom_module, CoefficientMode,
    SpaceKind, ThomModule,
};
use charcalc::verify::{
    check_degree_reasons, check_grr, check_resolution_transfer, check_vanishing_on_thom, check_wu, reverify,
    SuiteReport,
};
use charcalc::{Bidegree, Elem, Error, Generator, Presentation, Prime, RingCtx};
use common::{catalog, prime, random_bundle, random_elem, PRIMES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PP: CoefficientMode = CoefficientMode::PurePoint;
const INSTANCES: usize = 100;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn preset(mode: OpMode, l: u32) -> Operation {
    steenrod_total(mode, prime(l), mode == OpMode::QmodP).unwrap()
}

fn basis_classes(ring: &Arc<RingCtx>) -> Vec<Elem> {
    ring.basis_table()
        .into_iter()
        .flat_map(|(_, ms)| ms)
        .map(|m| Elem::from_terms(ring, [(m, 1)]))
        .collect()
}

/// Universal rank-`n` bundle over a ring free on `c1..cn` below the top degree.
fn universal_bundle(n: usize, f: Prime, top_weight: i32) -> Bundle {
    let ring = RingCtx::new(Presentation {
        prime: f,
        top_degree: 2 * top_weight as u32,
        weight_unit: false,
        generators: (1..=n).map(|i| Generator::chern(&format!("c{i}"), "E", i, n)).collect(),
        relations: vec![],
    })
    .unwrap();
    let classes: Vec<Elem> = (1..=n).map(|i| Elem::generator_at(&ring, i - 1)).collect();
    Bundle::from_classes("E", &ring, &classes).unwrap()
}

fn criterion_1() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        let op = preset(OpMode::QmodP, l);
        for n in 1..=4 {
            let w = (n * (l as usize - 1)) as i32;
            let e = universal_bundle(n, prime(l), w);
            let itd = inverse_todd_of_operation(&op, w as usize).map_err(err)?;
            let got = evaluate_genus(&itd, &e).map_err(err)?;
            let want = e.top_chern_class().pow(l - 1);
            ensure(!want.is_zero() && got == want, || format!("l = {l}, n = {n}: {got} != {want}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} (prime, rank) pairs give c_n^(p-1)"))
}

fn criterion_2() -> Outcome {
    for l in PRIMES {
        ensure(has_well_defined_todd_genus(&preset(OpMode::QmodL, l)), || format!("qmodl mod {l}"))?;
        ensure(!has_well_defined_todd_genus(&preset(OpMode::QmodP, l)), || format!("qmodp mod {l}"))?;
        match todd_of_operation(&preset(OpMode::QmodP, l), 6) {
            Err(Error::NotWellDefined { .. }) => {}
            other => return Err(format!("qmodp mod {l}: {other:?}")),
        }
    }
    Ok("u+u^l has a Todd genus, u^p does not".into())
}

fn criterion_3() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        for mode in [OpMode::QmodL, OpMode::QmodP] {
            let op = preset(mode, l);
            for n in 1..=4 {
                for m in 0..n {
                    let e = thom_module(
                        linear_embedding(&projective_space(m, prime(l), PP).unwrap(), &projective_space(n, prime(l), PP).unwrap())
                            .unwrap(),
                    )
                    .unwrap();
                    for a in basis_classes(e.source().ring()) {
                        let r = check_wu(&e, &op, &a).map_err(err)?;
                        ensure(r.passed(), || r.to_string())?;
                        count += 1;
                    }
                }
            }
        }
    }
    let e = thom_module(
        linear_embedding(&projective_space(1, prime(3), PP).unwrap(), &projective_space(2, prime(3), PP).unwrap()).unwrap(),
    )
    .unwrap();
    let r = check_wu(&e, &preset(OpMode::QmodL, 3), &Elem::one(e.source().ring())).map_err(err)?;
    ensure(r.lhs == "u" && r.rhs == "u", || format!("l = 3 trace: {r}"))?;
    ensure(r.warnings.iter().any(|w| w.contains("product form")), || format!("no discrepancy warning: {r}"))?;
    Ok(format!("{count} instances; l = 3 P1 -> P2 gives u = u with the discrepancy warning"))
}

fn criterion_4() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        let f = prime(l);
        let mut maps = Vec::new();
        for n in 1..=4 {
            maps.push(ProperMap::to_point_via(n, n, f, PP).map_err(err)?);
            for m in 0..=(4 - n) {
                maps.push(ProperMap::projection(&projective_space(m, f, PP).unwrap(), n).map_err(err)?);
            }
        }
        for op in [preset(OpMode::QmodL, l), preset(OpMode::Pmotivic, l)] {
            for map in &maps {
                for a in basis_classes(map.source().ring()) {
                    let r = check_grr(map, &op, &a).map_err(err)?;
                    ensure(r.passed(), || r.to_string())?;
                    count += 1;
                }
            }
        }
    }
    let f = ProperMap::to_point_via(2, 2, prime(2), PP).unwrap();
    let op = preset(OpMode::QmodL, 2);
    let u = Elem::generator(f.source().ring(), "u").unwrap();
    let r1 = check_grr(&f, &op, &u).map_err(err)?;
    let r2 = check_grr(&f, &op, &u.pow(2)).map_err(err)?;
    ensure(r1.trace.iter().any(|t| t.ends_with("= 1 + u") && t.starts_with("td(TP2)")), || r1.to_string())?;
    ensure((r1.lhs.as_str(), r1.rhs.as_str()) == ("0", "0"), || r1.to_string())?;
    ensure((r2.lhs.as_str(), r2.rhs.as_str()) == ("1", "1"), || r2.to_string())?;
    Ok(format!("{count} instances; P2 -> pt mod 2: td = 1 + u, a=u gives 0 = 0, a=u^2 gives 1 = 1"))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        for n in 2..=6 {
            for k in 1..n {
                let g = grassmannian(k, n, prime(l), PP).map_err(err)?;
                let ring = g.ring();
                let mut total = 0;
                for d in ring.stored_bidegrees().collect::<Vec<Bidegree>>() {
                    if d.0 % 2 != 0 {
                        ensure(ring.dimension(d) == 0, || format!("Gr({k},{n}) has odd classes in {d:?}"))?;
                    }
                    total += ring.dimension(d) as u64;
                }
                for i in (1..=2 * g.dim() as i32).step_by(2) {
                    for j in 0..=g.dim() as i32 {
                        ensure(ring.dimension(Bidegree(i, j)) == 0, || format!("Gr({k},{n}) ({i},{j})"))?;
                    }
                }
                let want = binomial(n as u64, k as u64);
                ensure(total == want, || format!("Gr({k},{n}) mod {l}: {total} != {want}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} Grassmannians even with binomial total rank"))
}

fn catalog_embeddings() -> Vec<EmbeddingSpec> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for m in 0..n {
            out.push(EmbeddingSpec::Linear { m, n });
        }
        out.push(EmbeddingSpec::Identity { space: SpaceKind::Proj { n } });
    }
    for (m, n) in [(1, 1), (1, 2), (1, 3), (2, 2)] {
        out.push(EmbeddingSpec::GraphOfLinear { m, n });
    }
    for d in 1..=3 {
        out.push(EmbeddingSpec::GraphOfPower { d });
    }
    out.push(EmbeddingSpec::Identity { space: SpaceKind::Grassmannian { k: 2, n: 4 } });
    out
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        for spec in catalog_embeddings() {
            let e = spec.build(prime(l), PP).map_err(err)?;
            for mode in [OpMode::QmodL, OpMode::QmodP] {
                for s in 0..=6 {
                    let r = check_vanishing_on_thom(&e, &preset(mode, l), s).map_err(err)?;
                    ensure(r.passed(), || r.to_string())?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances of beta Q^s(tau) = 0"))
}

fn criterion_7() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        for n in 0..=6 {
            for s in 1..=4 {
                let r = check_degree_reasons(n, s, prime(l)).map_err(err)?;
                ensure(r.passed() && r.lhs == "simplicial index -1", || r.to_string())?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} instances land in simplicial index -1"))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for l in PRIMES {
        let f = prime(l);
        let p = PRIMES.into_iter().find(|&p| p != l).unwrap();
        let op = preset(OpMode::QmodL, l);
        for d in [1, p, p * p] {
            let map = MapSpec::PowerGraph { d }.build(f, PP).map_err(err)?;
            let r = check_resolution_transfer(&map, &op).map_err(err)?;
            ensure(r.passed(), || r.to_string())?;
            count += 1;
        }
        for d in [1, p] {
            let map = MapSpec::PowerGraph { d }.build(f, PP).map_err(err)?;
            match check_resolution_transfer(&map, &preset(OpMode::QmodP, l)) {
                Err(Error::NotWellDefined { .. }) => count += 1,
                other => return Err(format!("mod-p preset, l = {l}, d = {d}: {other:?}")),
            }
        }
    }
    Ok(format!("{count} instances; mod-p preset is NotWellDefined"))
}

fn laws_on_space(s: &charcalc::spaces::Space, l: u32, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let ring = s.ring();
    let ops = [preset(OpMode::QmodL, l), preset(OpMode::QmodP, l), preset(OpMode::Pmotivic, l)];
    for i in 0..INSTANCES {
        let (x, y, z) = (random_elem(s, rng), random_elem(s, rng), random_elem(s, rng));
        ensure(&(&x * &y) * &z == &x * &(&y * &z), || format!("{s}: associativity"))?;
        ensure(&x * &y == &y * &x, || format!("{s}: commutativity"))?;
        ensure(&x * &(&y + &z) == &(&x * &y) + &(&x * &z), || format!("{s}: distributivity"))?;
        ensure(&x * &Elem::one(ring) == x, || format!("{s}: unit"))?;

        let op = &ops[i % ops.len()];
        let phi = |e: &Elem| apply_operation(op, e).unwrap();
        ensure(phi(&(&x * &y)) == &phi(&x) * &phi(&y), || format!("{s}: {} not multiplicative", op.label()))?;
        ensure(phi(&(&x + &y)) == &phi(&x) + &phi(&y), || format!("{s}: {} not additive", op.label()))?;

        let b = |e: &Elem| bockstein(e).unwrap().0;
        ensure(b(&(&x * &y)) == &(&b(&x) * &y) + &(&x * &b(&y)), || format!("{s}: Leibniz"))?;
        ensure(b(&b(&x)).is_zero(), || format!("{s}: beta^2"))?;

        let todd_op = if i % 2 == 0 { &ops[0] } else { &ops[2] };
        let order = ring.top_weight() as usize;
        let e = random_bundle(s, rng.gen_range(1..=4), rng);
        let td = evaluate_genus(&todd_of_operation(todd_op, order).unwrap(), &e).unwrap();
        let itd = evaluate_genus(&inverse_todd_of_operation(todd_op, order).unwrap(), &e).unwrap();
        ensure(&td * &itd == Elem::one(ring), || format!("{s}: td * itd"))?;
    }
    Ok(())
}

fn laws_on_embedding(m: &Arc<ThomModule>, rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..INSTANCES {
        let a = random_elem(m.source(), rng);
        let b = random_elem(m.target(), rng);
        let lhs = embed_pushforward(m, &(&restrict(&b, m.data()).unwrap() * &a)).unwrap();
        ensure(lhs == &b * &embed_pushforward(m, &a).unwrap(), || format!("{}: projection formula", m.name()))?;
        let back = restrict(&embed_pushforward(m, &a).unwrap(), m.data()).unwrap();
        ensure(back == &a * &m.normal().top_chern_class(), || format!("{}: self-intersection", m.name()))?;
    }
    Ok(())
}

fn factorization_independence(l: u32, rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let f = prime(l);
    let mut count = 0;
    for m in 1..=2 {
        let via: Vec<ProperMap> = (m..=4).map(|n| ProperMap::to_point_via(m, n, f, PP).unwrap()).collect();
        for _ in 0..INSTANCES {
            let a = random_elem(via[0].source(), rng);
            let first = compose_pushforward(&via[0], &a).unwrap().to_json();
            for g in &via[1..] {
                let a2 = Elem::from_json_value(g.source().ring(), &a.to_json_value()).unwrap();
                ensure(compose_pushforward(g, &a2).unwrap().to_json() == first, || g.name.clone())?;
                count += 1;
            }
        }
    }
    let p1 = projective_space(1, f, PP).unwrap();
    let through: Vec<ProperMap> = (1..=2)
        .map(|n| {
            let pr = Projection::new(&p1, n).unwrap();
            let g = thom_module(graph_of_linear(&p1, pr.total_space()).unwrap()).unwrap();
            ProperMap::new("graph", g, pr, 1).unwrap()
        })
        .collect();
    for _ in 0..INSTANCES {
        let a = random_elem(&p1, rng);
        for g in &through {
            ensure(compose_pushforward(g, &a).unwrap() == a, || "identity of P1 through its graph".into())?;
            count += 1;
        }
    }
    Ok(count)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut spaces, mut embeddings, mut factorizations) = (0, 0, 0);
    for l in PRIMES {
        for s in catalog(l, PP) {
            laws_on_space(&s, l, &mut rng)?;
            spaces += 1;
        }
        for spec in catalog_embeddings() {
            laws_on_embedding(&spec.build(prime(l), PP).map_err(err)?, &mut rng)?;
            embeddings += 1;
        }
        factorizations += factorization_independence(l, &mut rng)?;
    }
    Ok(format!(
        "{INSTANCES} instances per space ({spaces} spaces) and per embedding ({embeddings}); \
         {factorizations} factorization comparisons"
    ))
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_charcalc");
    let out = Command::new(bin)
        .args(["--format", "json", "verify", "all", "--prime", "3", "--max-dim", "3"])
        .env_remove(charcalc::workspace::WORKSPACE_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let suite: SuiteReport = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    ensure(suite.all_passed(), || suite.summary())?;
    for r in &suite.reports {
        let again = reverify(r).map_err(err)?;
        ensure(again.to_json() == r.to_json(), || format!("report differs on reload: {}", r.parameters))?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("suite.json");
    std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    let replay = Command::new(bin)
        .args(["verify", "replay"])
        .arg(&path)
        .env_remove(charcalc::workspace::WORKSPACE_ENV)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(replay.status.code() == Some(0), || String::from_utf8_lossy(&replay.stdout).into_owned())?;
    Ok(format!("exit 0, {}; {} reports re-verify bit-identically", suite.summary(), suite.reports.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("itd of the mod-p preset is c_n^(p-1)", criterion_1),
        ("Todd well-definedness", criterion_2),
        ("relative Wu formula", criterion_3),
        ("Riemann-Roch formula", criterion_4),
        ("Grassmannian evenness", criterion_5),
        ("vanishing on Thom classes", criterion_6),
        ("degree-reasons vanishing", criterion_7),
        ("transfer along alterations", criterion_8),
        ("property suites", criterion_9),
        ("CLI verify all and replay", criterion_10),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
