//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{m, random_bundle, random_tuple_instance, upper_killing, FLAG_TYPES};
use gkmkit::admissible_tuples::{is_ti_compatible, su3_example, BlockAuto};
use gkmkit::automorphisms::{decompose, enumerate_autos, reassemble, GkmAutomorphism};
use gkmkit::exact_lattice::{IntMatrix, LatticeAuto};
use gkmkit::fibrations_bundles::{
    assemble_total_graph, check_fiberwise_signed, check_gkm_fiber_bundle, check_gkm_fibration, decide, fibration_predicates, twist,
    BundleVerdict, Decision, PolygonBundle,
};
use gkmkit::fixtures::{cube_swap, hexagon_swap, su3_bundle, triple_edge};
use gkmkit::flag_builder::{build_flag_graph, left_mult_automorphism, type2_automorphism, FlagGraph};
use gkmkit::gkm_graph::{check_connection_compatibility, GkmGraph};
use gkmkit::graph_cohomology::{compute_h2, edge_restriction_injectivity, induced_map_auto};
use gkmkit::root_weyl::{dynkin_automorphisms, root_system};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FLAG_LIMIT: Duration = Duration::from_secs(1);
const AUTO_LIMIT_PER_FIXTURE: Duration = Duration::from_secs(10);
const DECISION_LIMIT: Duration = Duration::from_secs(30);
const RANDOM_BUNDLES: usize = 100;
const TUPLE_INSTANCES: usize = 200;
const SEED: u64 = 20_241_016;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<String, String> {
    let t = start.elapsed();
    check(t < limit, || format!("{what} took {t:.2?}, limit {limit:?}"))?;
    Ok(format!("{t:.2?} < {limit:?}"))
}

fn flag(desc: &str) -> FlagGraph {
    build_flag_graph(&root_system(desc).unwrap()).unwrap()
}

/// Brute-force isomorphism test against `{0,1}^3` with Hamming-one adjacency.
fn is_cube(g: &GkmGraph) -> bool {
    fn extend(g: &GkmGraph, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let v = map.len();
        if v == 8 {
            return true;
        }
        for c in 0..8 {
            if used[c] {
                continue;
            }
            let ok = (0..v).all(|u| g.star(u).iter().any(|&d| g.target(d) == v) == ((map[u] ^ c).count_ones() == 1));
            if ok {
                used[c] = true;
                map.push(c);
                if extend(g, map, used) {
                    return true;
                }
                map.pop();
                used[c] = false;
            }
        }
        false
    }
    g.vertex_count() == 8 && g.edge_darts().count() == 12 && extend(g, &mut Vec::new(), &mut [false; 8])
}

fn flag_construction() -> Outcome {
    let start = Instant::now();
    let cube = flag("A1xA1xA1");
    let g = &cube.graph;
    check((0..8).all(|v| g.star(v).len() == 3), || "cube is not 3-regular".into())?;
    check(is_cube(g), || "A1xA1xA1 is not the cube".into())?;
    // three classes of four pairwise disjoint edges
    let labels: BTreeSet<_> = g.edge_darts().map(|d| g.label(d).clone()).collect();
    check(labels.len() == 3, || format!("{} label classes", labels.len()))?;
    for l in &labels {
        let class: Vec<usize> = g.edge_darts().filter(|&d| g.label(d) == l).collect();
        let ends: BTreeSet<usize> = class.iter().flat_map(|&d| [g.source(d), g.target(d)]).collect();
        check(class.len() == 4 && ends.len() == 8, || format!("label class {l:?} is not a perfect matching"))?;
    }

    let a2 = flag("A2");
    check(a2.graph.vertex_count() == 6, || "A2 vertex count".into())?;
    check(a2.graph.edge_darts().count() == 9, || "A2 edge count".into())?;
    let report = check_connection_compatibility(&a2.graph, &a2.canonical, Some(&a2.signed)).map_err(|e| e.to_string())?;
    check(report.is_compatible(), || "A2 canonical connection incompatible".into())?;
    for t in &report.triples {
        let (a, b) = (a2.signed.get(t.e), a2.signed.get(t.f));
        let expected = BigRational::new(BigInt::from(-2) * a2.rs.pairing(b, a), a2.rs.pairing(a, a));
        let (eps, c) = t.solution.clone().ok_or("unsolved triple")?;
        check(eps == BigRational::from_integer(1.into()) && c == expected, || format!("coefficient {c} expected {expected}"))?;
    }
    let timing = within(start, FLAG_LIMIT, "flag construction")?;
    Ok(format!("cube and A2 exact, {} coefficients checked; {timing}", report.triples.len()))
}

fn automorphism_classification() -> Outcome {
    let mut notes = Vec::new();
    for (desc, expected) in [("A2", 12), ("A1xA1xA1", 48)] {
        let start = Instant::now();
        let fg = flag(desc);
        let autos = enumerate_autos(&fg, true).map_err(|e| e.to_string())?;
        check(autos.len() == expected, || format!("{desc}: {} automorphisms, expected {expected}", autos.len()))?;
        let dynkin: Vec<LatticeAuto> = dynkin_automorphisms(&fg.rs).into_iter().map(|d| d.matrix).collect();
        for phi in &autos {
            let dec = decompose(&fg, phi).map_err(|e| e.to_string())?;
            check(&reassemble(&fg, &dec) == phi, || format!("{desc}: reassembly differs"))?;
            let residual = left_mult_automorphism(&fg, &dec.w_element).inverse().compose(phi);
            check(dynkin.contains(&residual.psi) && residual.psi == dec.outer.matrix, || {
                format!("{desc}: residual psi not a diagram map")
            })?;
        }
        notes.push(format!("{desc} {} in {}", autos.len(), within(start, AUTO_LIMIT_PER_FIXTURE, desc)?));
    }
    Ok(notes.join("; "))
}

fn type_maps_on_cohomology() -> Outcome {
    let mut counted = (0, 0);
    for desc in ["A2", "A1xA1xA1"] {
        let fg = flag(desc);
        let h = compute_h2(&fg.graph);
        let id = IntMatrix::identity(h.ordinary_rank);
        let autos: Vec<GkmAutomorphism> = enumerate_autos(&fg, true).map_err(|e| e.to_string())?;
        for phi in &autos {
            if decompose(&fg, phi).map_err(|e| e.to_string())?.outer.is_identity() {
                let mat = induced_map_auto(&fg.graph, &h, phi).map_err(|e| e.to_string())?;
                check(mat == id, || format!("{desc}: Type 1 map acts nontrivially"))?;
                counted.0 += 1;
            }
        }
        for d in dynkin_automorphisms(&fg.rs).into_iter().filter(|d| !d.is_identity()) {
            let mat = induced_map_auto(&fg.graph, &h, &type2_automorphism(&fg, &d)).map_err(|e| e.to_string())?;
            check(mat != id, || format!("{desc}: Type 2 map {:?} acts trivially", d.perm))?;
            counted.1 += 1;
        }
    }
    Ok(format!("{} Type 1 maps act as the identity, {} Type 2 maps do not", counted.0, counted.1))
}

fn edge_restriction() -> Outcome {
    let mut graphs: Vec<(String, GkmGraph)> = FLAG_TYPES.iter().map(|(d, _)| (d.to_string(), flag(d).graph)).collect();
    graphs.push(("hexagon-swap".into(), hexagon_swap().total));
    graphs.push(("triple-edge".into(), triple_edge().total));
    graphs.push(("cube-swap".into(), assemble_total_graph(&cube_swap()).map_err(|e| e.to_string())?.graph().clone()));
    let builders = graphs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..RANDOM_BUNDLES {
        let (name, pb) = random_bundle(&mut rng, i);
        graphs.push((name, assemble_total_graph(&pb).map_err(|e| e.to_string())?.graph().clone()));
    }
    for (name, g) in &graphs {
        check(edge_restriction_injectivity(g), || format!("{name}: restriction not injective"))?;
    }
    Ok(format!("{builders} builder graphs and {RANDOM_BUNDLES} random bundles"))
}

fn realizability_decisions() -> Outcome {
    let start = Instant::now();
    let d = decide(&cube_swap(), true).map_err(|e| e.to_string())?;
    match &d {
        Decision::NotRealizable { residual, h2_surjective: Some(false) } if !residual.is_empty() => {}
        other => return Err(format!("cube-swap: {other}")),
    }
    let mut count = 0;
    for b in -3..=3 {
        for n in 4..=6 {
            for l in 2..=n - 2 {
                let pb = su3_bundle(b, n, l, 0).map_err(|e| format!("su3 b={b} n={n} l={l}: {e}"))?;
                let d = decide(&pb, true).map_err(|e| e.to_string())?;
                check(matches!(d, Decision::Realizable { .. }), || format!("su3 b={b} n={n} l={l}: {d}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("cube-swap: {d}; {count} su3 bundles Realizable; {}", within(start, DECISION_LIMIT, "decisions")?))
}

fn admissible_tuples() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    for i in 0..TUPLE_INSTANCES {
        let (mm, n) = (rng.gen_range(2..=5), rng.gen_range(3..=8));
        let inst = random_tuple_instance(&mut rng, mm, n, 3);
        let t = inst.complete();
        check(t.product() == inst.target, || format!("instance {i}: product differs"))?;
        check(t.is_admissible(&inst.kernel_vectors), || format!("instance {i}: incompatible block"))?;
        check(t.psis == inst.blocks, || format!("instance {i}: completion is not the planted one"))?;
    }
    for i in 0..TUPLE_INSTANCES {
        let (mm, n) = (rng.gen_range(3..=5), rng.gen_range(3..=8));
        let inst = random_tuple_instance(&mut rng, mm, n, 3);
        let mut t = inst.complete();
        let k = n - 1 - usize::from(rng.gen_bool(0.5));
        let delta = upper_killing(&inst.kernel_vectors[k], &common::nonzero_vec(&mut rng, mm - 2, 3));
        t.psis[k] = BlockAuto::new(t.psis[k].b.add(&delta), t.psis[k].a.clone()).map_err(|e| e.to_string())?;
        check(is_ti_compatible(&t.psis[k], &inst.kernel_vectors[k]), || format!("perturbation {i} is not compatible"))?;
        check(t.product() != inst.target, || format!("perturbation {i} keeps the product"))?;
    }
    Ok(format!("{TUPLE_INSTANCES} completions, {TUPLE_INSTANCES} perturbations"))
}

fn su3_arithmetic() -> Outcome {
    for b in -10i64..=10 {
        let expected = m(&[&[-3 * b + 1, 3 * b * b - 3 * b + 1], &[-3, 3 * b - 2]]);
        let ex = su3_example(b, 4, 2).map_err(|e| e.to_string())?;
        let a = &ex.a_list;
        check(a[3].mul(&a[2]).mul(&a[1]) == expected, || format!("b={b}: corner product differs"))?;
    }
    Ok("b in [-10, 10]".into())
}

fn counterexample_diagnostics() -> Outcome {
    let hex = hexagon_swap();
    check(check_gkm_fibration(&hex).passes(), || "hexagon-swap is not a GKM fibration".into())?;
    let hv = check_gkm_fiber_bundle(&hex);
    check(matches!(hv, BundleVerdict::NotGraphIso { .. }), || format!("hexagon-swap: {hv}"))?;

    let tri = triple_edge();
    check(check_gkm_fibration(&tri).passes(), || "triple-edge is not a GKM fibration".into())?;
    let preds = fibration_predicates(&tri);
    check(preds.p2_everywhere(), || "triple-edge: P2 fails".into())?;
    for name in ["c", "d"] {
        let v = tri.total.vertices().iter().position(|x| x == name).unwrap();
        let p = preds.at(v).ok_or("missing vertex")?;
        check(!p.p3a && !p.p3b, || format!("triple-edge: P3a/P3b hold at {name}"))?;
    }
    let tv = check_gkm_fiber_bundle(&tri);
    let BundleVerdict::NoLatticeAuto { source_rank, target_rank, .. } = &tv else {
        return Err(format!("triple-edge: {tv}"));
    };
    let mut ranks = [*source_rank, *target_rank];
    ranks.sort();
    check(ranks == [2, 3], || format!("span ranks {ranks:?}"))?;
    Ok(format!("hexagon-swap {hv}; triple-edge span ranks 2 vs 3"))
}

/// `Ψ_1` negated, with the closing map pinned to the original twist.
fn sign_broken(pb: &PolygonBundle) -> Result<PolygonBundle, String> {
    let tw = twist(pb).map_err(|e| e.to_string())?;
    let mut neg = IntMatrix::identity(pb.rank());
    for i in 0..pb.rank() {
        neg.set(i, i, (-1).into());
    }
    let mut bad = pb.clone();
    bad.edge_isos[0] = LatticeAuto::new(pb.edge_isos[0].matrix().mul(&neg)).map_err(|e| e.to_string())?;
    bad.gluing = Some(tw.vertex_map);
    Ok(bad)
}

fn fiberwise_signed() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    for i in 0..RANDOM_BUNDLES {
        let (name, pb) = random_bundle(&mut rng, i);
        let d = decide(&pb, false).map_err(|e| e.to_string())?;
        check(matches!(d, Decision::Realizable { .. }), || format!("{name}: twist is not Type 1 ({d})"))?;
        check(check_fiberwise_signed(&pb).map_err(|e| e.to_string())?, || format!("{name}: propagation does not close"))?;
        check(!check_fiberwise_signed(&sign_broken(&pb)?).unwrap_or(false), || format!("{name}: broken sign still closes"))?;
    }
    Ok(format!("{RANDOM_BUNDLES} bundles close, their sign-broken variants do not"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("flag construction", flag_construction),
        ("automorphism classification", automorphism_classification),
        ("Type 1 and Type 2 maps on H^2", type_maps_on_cohomology),
        ("edge-restriction injectivity", edge_restriction),
        ("realizability decisions", realizability_decisions),
        ("admissible-tuple completion", admissible_tuples),
        ("SU(3)-block corner product", su3_arithmetic),
        ("fibration counterexamples", counterexample_diagnostics),
        ("fiberwise-signed propagation", fiberwise_signed),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
