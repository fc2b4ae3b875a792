//! Acceptance suite: one PASS/FAIL line per criterion.

mod oracle;

use num_traits::{One, Zero};
use oracle::{audit_flow, brute_min_cut, brute_sparsest, ek_min_cut, int, lp_congestion, pendant_random, R};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use vsparse::cut_sparsifier::{build_cut_sparsifier, build_cut_sparsifier_unit};
use vsparse::flow::sparsest::{sparsest_cut_by_partitions, sparsest_cut_by_vectors};
use vsparse::flow::{max_flow, min_congestion_routing, sparsest_cut_exact, DemandSet, RoutingMethod, RoutingOptions};
use vsparse::flow_sparsifier::witness::fixtures;
use vsparse::flow_sparsifier::{
    balanced_cut_refine, build_flow_sparsifier, build_flow_sparsifier_unit, contract_procedure, is_good_router,
    recheck_certificate, witness_to_flow, BuildReport, FlowParams, FlowSparsifier, RouterCertificate,
};
use vsparse::flow_sparsifier::search::{find_contractible_or_witness, RefineTrace, SearchOutcome, SearchTrace};
use vsparse::gen::{generate, Family, GenSpec};
use vsparse::verifier::{recheck_router_certificates, verify_cut_quality, verify_sparsifier, Claim, VerifyOptions};
use vsparse::wl::{strong_decompose, weak_alpha, weak_decompose, DecompOptions};
use vsparse::{Graph, Scalar, VertexId};

const UNIT_BUDGET: u32 = 26;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cycle with k pendant terminals spread evenly.
fn pendant_cycle(len: usize, k: usize) -> Graph<R> {
    let mut g = Graph::new(len + k);
    for i in 0..len {
        g.add_edge(i, (i + 1) % len, int(1)).unwrap();
    }
    for t in 0..k {
        g.add_edge(len + t, t * len / k, int(1)).unwrap();
        g.add_terminal(len + t).unwrap();
    }
    g
}

fn unit_cut_instances() -> Vec<Graph<R>> {
    let mut out = Vec::new();
    for seed in 0..170u64 {
        let mut r = rng(1000 + seed);
        let k = r.gen_range(2..=8);
        let size = r.gen_range(k + 2..=30);
        let param = [6, 10, 16][seed as usize % 3];
        out.push(generate(&GenSpec { family: Family::Random, k, size, param, max_cap: 1, seed }).unwrap());
    }
    for seed in 0..10u64 {
        for (family, size, param) in [(Family::Dumbbell, 4, 0), (Family::Grid, 4, 0), (Family::Regular, 10, 3)] {
            let k = 3 + (seed as usize % 6);
            out.push(generate(&GenSpec { family, k, size, param, max_cap: 1, seed }).unwrap());
        }
    }
    out
}

fn c1_c9_cut(c1: &mut Outcome, c9: &mut Vec<String>) -> bool {
    let inst = unit_cut_instances();
    let opts = VerifyOptions::default();
    let decomp = DecompOptions { budget_exp: UNIT_BUDGET, ..Default::default() };
    let mut fails = Vec::new();
    let mut refused = 0;
    let mut qmax = R::zero();
    let mut size_fail = 0;
    let mut oracle_checks = 0;
    let mut r = rng(7);
    for (i, g) in inst.iter().enumerate() {
        let sp = match build_cut_sparsifier_unit(g, &decomp) {
            Ok(sp) => sp,
            Err(e) => {
                refused += 1;
                fails.push(format!("instance {i}: {e}"));
                continue;
            }
        };
        let (rep, q) = verify_cut_quality(g, &sp.h, Some(&int(3)), &opts).unwrap();
        if !rep.exhaustive || !rep.passed() || q < R::one() || q > int(3) {
            fails.push(format!("instance {i}: q = {q}, violations {:?}", rep.violations.first()));
        }
        if q > qmax {
            qmax = q;
        }
        // independent max-flow on a few bipartitions
        let k = g.k();
        for _ in 0..2 {
            let m: u64 = r.gen_range(1..1u64 << (k - 1));
            let side = |gr: &Graph<R>, want: bool| -> Vec<VertexId> {
                (0..k).filter(|&j| (m >> j & 1 == 1) == want).map(|j| gr.terminals()[j]).collect()
            };
            let gv = ek_min_cut(g, &side(g, true), &side(g, false));
            let hv = ek_min_cut(&sp.h, &side(&sp.h, true), &side(&sp.h, false));
            oracle_checks += 1;
            if hv < gv || hv > gv.clone() * int(3) {
                fails.push(format!("instance {i}: oracle cut G {gv} H {hv}"));
            }
        }
        let steiner = sp.h.n() - sp.h.k();
        if steiner > 3 * k * k * k {
            size_fail += 1;
        }
    }
    *c1 = outcome(
        fails.is_empty() && inst.len() - refused >= 200,
        format!(
            "{} instances (exponential budget 2^{UNIT_BUDGET}), {} budget refusals, max q_observed = {qmax}, {oracle_checks} bipartitions re-solved by an independent max-flow{}",
            inst.len(),
            refused,
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    );
    c9.push(format!("cut: {} runs, {size_fail} above 3k^3", inst.len() - refused));
    size_fail == 0
}

fn c2() -> Outcome {
    let opts = VerifyOptions::default();
    let mut n = 0;
    let mut fails = Vec::new();
    let mut worst = String::new();
    let mut worst_gap = R::from_int(-100);
    for seed in 0..20u64 {
        let mut r = rng(2000 + seed);
        let k = r.gen_range(3..=6);
        let inner = r.gen_range(4..=12);
        let g = if seed % 2 == 0 {
            pendant_random(inner, k, 25, 4, seed)
        } else {
            generate(&GenSpec { family: Family::Random, k, size: inner + k, param: 20, max_cap: 4, seed }).unwrap()
        };
        for eps in [R::from_frac(3, 10), R::from_frac(6, 10), R::one()] {
            n += 1;
            let sp = match build_cut_sparsifier(&g, &eps, &DecompOptions::default()) {
                Ok(sp) => sp,
                Err(e) => {
                    fails.push(format!("seed {seed} eps {eps}: {e}"));
                    continue;
                }
            };
            let bound = int(3) + eps.clone();
            let (rep, q) = verify_cut_quality(&g, &sp.h, Some(&bound), &opts).unwrap();
            if !rep.passed() || q > bound {
                fails.push(format!("seed {seed} eps {eps}: q = {q}"));
            }
            if q.clone() - bound.clone() > worst_gap {
                worst_gap = q.clone() - bound;
                worst = format!("q = {q} at eps' = {eps}");
            }
        }
    }
    outcome(
        fails.is_empty() && n >= 50,
        format!("{n} runs, closest to the bound: {worst}{}", fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()),
    )
}

fn decomposition_sets(count: u64, z_cap: i64) -> Vec<(Graph<R>, Vec<VertexId>)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while (out.len() as u64) < count {
        seed += 1;
        let mut r = rng(3000 + seed);
        let inner = r.gen_range(3..=10);
        let k = r.gen_range(2..=6);
        let g = pendant_random(inner, k, 30, 1 + (seed % 3) as i64, seed);
        let set: Vec<VertexId> = (0..inner).collect();
        let z: i64 = g.out_capacity(&g.mask_of(&set)).to_i64_exact().unwrap();
        if z <= z_cap {
            out.push((g, set));
        }
    }
    out
}

fn c3() -> Outcome {
    let sets = decomposition_sets(80, 12);
    let mut fails = Vec::new();
    let mut clusters = 0;
    let mut oracle_used = 0;
    let third = R::from_frac(1, 3);
    for (i, (g, set)) in sets.iter().enumerate() {
        let d = strong_decompose(g, set, &DecompOptions::default()).unwrap();
        let z = d.z;
        if d.sum_out() > 3 * z * z * z {
            fails.push(format!("run {i}: sum out {} > 3z^3", d.sum_out()));
        }
        for (lvl, &cnt) in d.level_counts().iter().enumerate() {
            let bound = 1usize << (3 * (lvl + 1) + 3);
            if cnt > bound {
                fails.push(format!("run {i}: level {} holds {cnt} > {bound}", lvl + 1));
            }
        }
        for c in &d.clusters {
            clusters += 1;
            let sd = g.subdivide_boundary(c).unwrap();
            let sigma = if sd.graph.n() - sd.graph.k() + z as usize <= 22 {
                oracle_used += 1;
                brute_sparsest(&sd.graph)
            } else {
                sparsest_cut_exact(&sd.graph, 22).unwrap().cut.map(|c| c.sparsity)
            };
            if let Some(s) = sigma {
                if s < third && sd.graph.n() - sd.graph.k() > 1 {
                    fails.push(format!("run {i}: cluster of size {} has sparsity {s}", c.len()));
                }
            }
        }
    }
    outcome(
        fails.is_empty(),
        format!(
            "{} runs with z <= 12, {clusters} clusters ({oracle_used} re-certified by brute force){}",
            sets.len(),
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

/// Two cliques with heavy pendants joined by a thin bridge.
fn heavy_dumbbell(side: usize, weight: i64, bridge: i64) -> (Graph<R>, Vec<VertexId>) {
    let n = 2 * side;
    let mut g = Graph::new(2 * n);
    for base in [0, side] {
        for i in 0..side {
            for j in i + 1..side {
                g.add_edge(base + i, base + j, int(weight)).unwrap();
            }
        }
    }
    g.add_edge(0, side, int(bridge)).unwrap();
    for v in 0..n {
        g.add_edge(v, n + v, int(weight)).unwrap();
        g.add_terminal(n + v).unwrap();
    }
    (g, (0..n).collect())
}

fn c4() -> Outcome {
    let mut runs: Vec<(Graph<R>, Vec<VertexId>)> = decomposition_sets(40, 40);
    for (side, w, b) in [(3, 600, 1), (4, 500, 1), (4, 500, 2), (3, 900, 3), (5, 300, 1)] {
        runs.push(heavy_dumbbell(side, w, b));
    }
    let mut fails = Vec::new();
    let mut split_count = 0;
    for (i, (g, set)) in runs.iter().enumerate() {
        let d = match weak_decompose(g, set, &DecompOptions::default()) {
            Ok(d) => d,
            Err(e) => {
                fails.push(format!("run {i}: {e}"));
                continue;
            }
        };
        let z = d.z;
        if 10 * d.sum_out() > 12 * z {
            fails.push(format!("run {i}: sum out {} > 1.2 z = {}", d.sum_out(), 1.2 * z as f64));
        }
        for s in d.splits.iter().filter(|s| !s.component_split) {
            split_count += 1;
            // sparsity * 128 * log2 z < 1, checked with the exact sparsity
            let lhs = s.sparsity.to_f64() * 128.0 * (z as f64).log2().max(1.0);
            if lhs >= 1.0 || s.sparsity.to_f64() >= weak_alpha(z, 128) {
                fails.push(format!("run {i}: split sparsity {} not below the threshold", s.sparsity));
            }
            if 100 * s.out_lighter > 51 * s.parent_out {
                fails.push(format!("run {i}: lighter side {} > 0.51 * {}", s.out_lighter, s.parent_out));
            }
        }
    }
    outcome(
        fails.is_empty() && split_count > 0,
        format!("{} runs, {split_count} executed sparse-cut splits{}", runs.len(), fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()),
    )
}

fn flow_instances() -> Vec<Graph<R>> {
    let mut out = Vec::new();
    for seed in 0..8u64 {
        let k = 4 + (seed as usize % 5);
        out.push(generate(&GenSpec { family: Family::Dumbbell, k, size: 3 + (seed as usize % 3), param: 0, max_cap: 1, seed }).unwrap());
        out.push(generate(&GenSpec { family: Family::Grid, k, size: 3 + (seed as usize % 2), param: 0, max_cap: 1, seed }).unwrap());
        out.push(generate(&GenSpec { family: Family::Regular, k, size: 8, param: 3, max_cap: 1, seed }).unwrap());
        out.push(pendant_random(6 + seed as usize, k, 20, 1, 4000 + seed));
    }
    out
}

fn capacitated_flow_instances() -> Vec<Graph<R>> {
    (0..4u64).map(|s| pendant_random(6, 4 + s as usize, 25, 3, 5000 + s)).collect()
}

struct FlowRuns {
    unit: Vec<(Graph<R>, FlowSparsifier<R>)>,
    cap: Vec<(Graph<R>, FlowSparsifier<R>)>,
    errors: Vec<String>,
}

fn flow_runs() -> FlowRuns {
    let p = FlowParams::aggressive();
    let mut runs = FlowRuns { unit: Vec::new(), cap: Vec::new(), errors: Vec::new() };
    for (i, g) in flow_instances().into_iter().enumerate() {
        match build_flow_sparsifier_unit(&g, &p) {
            Ok(sp) => runs.unit.push((g, sp)),
            Err(e) => runs.errors.push(format!("unit instance {i}: {e}")),
        }
    }
    for (i, g) in capacitated_flow_instances().into_iter().enumerate() {
        match build_flow_sparsifier(&g, &R::from_frac(1, 2), &p) {
            Ok(sp) => runs.cap.push((g, sp)),
            Err(e) => runs.errors.push(format!("capacitated instance {i}: {e}")),
        }
    }
    runs
}

fn audit_cert(base: &Graph<R>, cert: &RouterCertificate<R>) -> Vec<String> {
    let (local, _) = vsparse::flow_sparsifier::router::local_graph(base, &cert.members);
    let (mut issues, cong) = audit_flow(&local, &cert.flow);
    let bc = if cert.z <= 1 { R::zero() } else { R::new((2 * (cert.z - 1)).into(), cert.z.into()) };
    let total = if cong > bc { cong } else { bc };
    if total != cert.congestion {
        issues.push(format!("stored congestion {} vs audited {total}", cert.congestion));
    }
    if total > int(34) {
        issues.push(format!("congestion {total} > 34"));
    }
    issues
}

fn c5(runs: &FlowRuns) -> Outcome {
    let mut fails = Vec::new();
    let mut certs = 0;
    let mut max = R::zero();
    let mut sanitized = 0;
    for (_, sp) in runs.unit.iter().chain(&runs.cap) {
        sanitized += sp.report.sanitized;
        for cert in &sp.certs {
            certs += 1;
            fails.extend(audit_cert(&sp.router_graph, cert));
            fails.extend(recheck_certificate(&sp.router_graph, cert, 34));
            if cert.congestion > max {
                max = cert.congestion.clone();
            }
        }
    }
    // single vertex with 4 pendants, and a 2-path with one pendant per end
    let p = FlowParams::aggressive();
    let mut star = Graph::<R>::new(5);
    for t in 1..5 {
        star.add_edge(0, t, int(1)).unwrap();
        star.add_terminal(t).unwrap();
    }
    let (_, sc) = is_good_router(&star, &[0], &p).unwrap();
    let sc = sc.unwrap();
    let mut path = Graph::<R>::new(4);
    path.add_edge(0, 1, int(1)).unwrap();
    path.add_edge(2, 0, int(1)).unwrap();
    path.add_edge(3, 1, int(1)).unwrap();
    path.set_terminals(&[2, 3]).unwrap();
    let (_, pc) = is_good_router(&path, &[0, 1], &p).unwrap();
    let pc = pc.unwrap();
    let small_ok = sc.congestion < int(2) && pc.congestion == int(1);
    outcome(
        fails.is_empty() && small_ok && certs > 0 && runs.errors.is_empty(),
        format!(
            "{certs} certificates audited, max congestion {max}, {sanitized} clusters split after a failed certificate; single vertex {} (< 2), 2-path {} (= 1){}{}",
            sc.congestion,
            pc.congestion,
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default(),
            runs.errors.first().map(|f| format!("; build error: {f}")).unwrap_or_default()
        ),
    )
}

fn c6(runs: &FlowRuns) -> Outcome {
    let opts = VerifyOptions { samples: 80, adversarial_steps: 20, delta: 1e-6, ..Default::default() };
    let mut fails = Vec::new();
    let mut premise_flags = 0;
    let mut demands = 0;
    let mut min_per = usize::MAX;
    let mut qmax: f64 = 1.0;
    let mut reroute_ratio: f64 = 0.0;
    let mut instances = 0;
    for (i, (g, sp)) in runs.unit.iter().chain(&runs.cap).enumerate() {
        instances += 1;
        let rc = recheck_router_certificates(&sp.router_graph, &sp.clusters, &sp.certs, 34, 22);
        fails.extend(rc.violations.iter().map(|v| format!("instance {i}: {v}")));
        premise_flags += rc.budget_flags.len();
        let rep = verify_sparsifier(g, &sp.h, &Claim::of_flow(sp), Some(&sp.certs), &opts).unwrap();
        fails.extend(rep.violations.iter().map(|v| format!("instance {i}: {v}")));
        let q_bound = sp.quality.to_f64();
        for t in &rep.tests {
            if t.g_value > 68.0f64.max(q_bound) * t.h_value * (1.0 + 2.0 * opts.delta) {
                fails.push(format!("instance {i}: test {} ratio {}", t.id, t.ratio));
            }
            match t.reroute {
                Some(c) => reroute_ratio = reroute_ratio.max(c / t.h_value),
                None => fails.push(format!("instance {i}: test {} has no reroute", t.id)),
            }
        }
        demands += rep.tests.len();
        min_per = min_per.min(rep.tests.len());
        qmax = qmax.max(rep.q_observed);
    }
    outcome(
        fails.is_empty() && instances >= 30 && min_per >= 100,
        format!(
            "{instances} instances, {demands} demand sets (min {min_per} per instance), max observed eta_G/eta_H = {qmax:.4}, max reroute/eta_H = {reroute_ratio:.3} (bound 68), {premise_flags} well-linkedness checks over budget{}",
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn c7() -> Outcome {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    let ro = RoutingOptions::default();
    let cases: Vec<(u8, usize, usize, usize)> = vec![(1, 6, 3, 4), (1, 8, 3, 5), (1, 5, 4, 3), (2, 8, 3, 5), (2, 12, 3, 4), (2, 16, 4, 3)];
    for (kind, k, r, m) in cases {
        let (g, w) = if kind == 1 { fixtures::type1::<R>(k, r, m) } else { fixtures::type2::<R>(k, r, m) };
        let f = match witness_to_flow(&g, &w, &ro) {
            Ok(f) => f,
            Err(e) => {
                fails.push(format!("type {kind} k={k}: {e}"));
                continue;
            }
        };
        let (issues, cong) = audit_flow(&g, &f);
        fails.extend(issues.into_iter().map(|s| format!("type {kind} k={k}: {s}")));
        let bound = if kind == 1 { int(10) } else { int(34) };
        if cong > bound {
            fails.push(format!("type {kind} k={k}: congestion {cong} > {bound}"));
        }
        let want = R::new(1.into(), (k as i64).into());
        let mut pairs = std::collections::BTreeMap::new();
        for c in &f.commodities {
            let key = (c.a.min(c.b), c.a.max(c.b));
            let e = pairs.entry(key).or_insert_with(R::zero);
            *e = e.clone() + c.demand.clone();
        }
        let ts = g.terminals();
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let key = (ts[i].min(ts[j]), ts[i].max(ts[j]));
                if pairs.get(&key) != Some(&want) {
                    fails.push(format!("type {kind} k={k}: pair {key:?} exchanges {:?}", pairs.get(&key)));
                }
            }
        }
        detail.push(format!("type{kind}(k={k}) {cong}"));
    }
    outcome(fails.is_empty(), format!("congestion: {}{}", detail.join(", "), fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()))
}

fn c8(runs: &FlowRuns) -> Outcome {
    let mut fails = Vec::new();
    // builder runs (aggressive)
    let mut calls = 0;
    let mut fired = 0;
    let mut stalls = 0;
    let mut refines = 0;
    let mut balanced = 0;
    let mut check_refine = |t: &RefineTrace, fails: &mut Vec<String>| {
        refines += 1;
        if t.cuts.windows(2).any(|w| w[1] >= w[0]) {
            fails.push(format!("refine cuts not strictly decreasing: {:?}", t.cuts));
        }
        if let Some((x, y)) = t.final_sizes {
            balanced += 1;
            if 4 * x < t.set_size || 4 * y < t.set_size {
                fails.push(format!("unbalanced partition {x}/{y} of {}", t.set_size));
            }
            if t.cuts.last().map_or(false, |&c| c > t.bound) {
                fails.push(format!("final cut {:?} above r k = {}", t.cuts.last(), t.bound));
            }
        }
    };
    for (_, sp) in runs.unit.iter().chain(&runs.cap) {
        for c in &sp.report.contractions {
            calls += 1;
            if c.fired {
                fired += 1;
                if c.v_after >= c.v_before {
                    fails.push("fired contraction did not shrink".into());
                }
            } else {
                stalls += 1;
            }
        }
        for s in &sp.report.searches {
            for t in &s.refines {
                check_refine(t, &mut fails);
            }
        }
    }
    // search-and-contract loops on graphs that are not routers
    let mut direct_calls = 0;
    let mut direct_fired = 0;
    for seed in 0..12u64 {
        let g = if seed % 2 == 0 { pendant_cycle(24 + 2 * seed as usize, 8) } else { generate(&GenSpec { family: Family::Grid, k: 8, size: 5, param: 0, max_cap: 1, seed }).unwrap() };
        let p = FlowParams::aggressive();
        let mut clusters: Vec<Vec<VertexId>> = Vec::new();
        for _ in 0..40 {
            let c = g.contract(&clusters).unwrap();
            let mut tr = SearchTrace::default();
            let set = match find_contractible_or_witness(&c.graph, &p, &mut tr).unwrap() {
                SearchOutcome::Contractible(s) => s,
                _ => break,
            };
            let mut rep = BuildReport::default();
            let next = contract_procedure(&g, &clusters, &c, &set, &p, &mut rep).unwrap();
            for rec in &rep.contractions {
                direct_calls += 1;
                if rec.v_after >= rec.v_before {
                    fails.push(format!("aggressive contraction {} -> {}", rec.v_before, rec.v_after));
                } else {
                    direct_fired += 1;
                }
            }
            match next {
                Some(n) => clusters = n,
                None => break,
            }
        }
    }
    // direct refinement runs on random sets
    let p = FlowParams::aggressive();
    for seed in 0..30u64 {
        let g = pendant_random(10 + (seed as usize % 10), 8, 25, 1, 6000 + seed);
        let set: Vec<VertexId> = (0..g.n()).filter(|&v| !g.is_terminal(v)).collect();
        let mut t = RefineTrace::default();
        let _ = balanced_cut_refine(&g, &set, &p, &mut t).unwrap();
        check_refine(&t, &mut fails);
    }
    // theoretical profile: direct contraction calls on whole inner parts
    let mut theo_calls = 0;
    let mut theo_fired = 0;
    for seed in 0..20u64 {
        let g = pendant_random(8 + (seed as usize % 6), 5 + (seed as usize % 4), 30, 1, 7000 + seed);
        let tp = FlowParams::theoretical(g.k());
        let c = g.contract(&[]).unwrap();
        let set: Vec<VertexId> = (0..g.n()).filter(|&v| !g.is_terminal(v)).map(|v| c.vertex_map[v]).collect();
        let mut rep = BuildReport::default();
        match contract_procedure(&g, &[], &c, &set, &tp, &mut rep) {
            Ok(_) => {}
            Err(e) => fails.push(format!("theoretical contraction seed {seed}: {e}")),
        }
        for rec in &rep.contractions {
            theo_calls += 1;
            if rec.fired {
                theo_fired += 1;
            }
            if rec.v_after >= rec.v_before {
                fails.push(format!("theoretical contraction {} -> {}", rec.v_before, rec.v_after));
            }
            if !rec.ledger_ok {
                fails.push(format!("ledger {} > {}", rec.sum_f, rec.ledger_bound));
            }
        }
    }
    outcome(
        fails.is_empty() && direct_fired > 0 && theo_fired > 0,
        format!(
            "aggressive builds: {calls} contraction calls ({fired} shrank, {stalls} stalled and fell back); aggressive search loops: {direct_calls} calls, {direct_fired} shrank; theoretical: {theo_calls} calls, {theo_fired} shrank, ledger held; {refines} refinement runs ({balanced} balanced){}",
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn c9_flow(runs: &FlowRuns, lines: &mut Vec<String>) -> bool {
    let p = FlowParams::aggressive();
    let mut total = 0;
    let mut over_run = 0;
    let mut over_h = 0;
    for (g, sp) in &runs.unit {
        let steiner = sp.h.n() - sp.h.k();
        if steiner as f64 > p.f(g.k()) {
            over_h += 1;
        }
        for r in &sp.report.runs {
            total += 1;
            if !r.size_bound_met {
                over_run += 1;
            }
        }
    }
    lines.push(format!(
        "flow (aggressive): {total} well-linked runs, {over_run} above F(k); whole H above F(k) in {over_h} of {} builds",
        runs.unit.len()
    ));
    over_run == 0
}

type Corruption = (String, Box<dyn Fn(&mut Graph<R>, &mut Claim<R>, &mut Vec<RouterCertificate<R>>)>);

fn rebuild(h: &Graph<R>, f: impl Fn(usize, &vsparse::Edge<R>) -> Option<(VertexId, VertexId, R)>) -> Graph<R> {
    let mut out = Graph::new(h.n());
    for (i, e) in h.edges().iter().enumerate() {
        if let Some((u, v, c)) = f(i, e) {
            out.add_edge(u, v, c).unwrap();
        }
    }
    out.set_terminals(h.terminals()).unwrap();
    out
}

fn corruptions() -> Vec<Corruption> {
    let mut v: Vec<Corruption> = Vec::new();
    for i in 0..3usize {
        v.push((format!("delete H edge {i}"), Box::new(move |h, _, _| *h = rebuild(h, |j, e| (j != i).then(|| (e.u, e.v, e.cap.clone()))))));
        v.push((format!("raise H edge {i}"), Box::new(move |h, _, _| *h = rebuild(h, |j, e| Some((e.u, e.v, if j == i { e.cap.clone() + int(1) } else { e.cap.clone() }))))));
        v.push((format!("halve H edge {i}"), Box::new(move |h, _, _| *h = rebuild(h, |j, e| Some((e.u, e.v, if j == i { e.cap.clone() / int(2) } else { e.cap.clone() }))))));
    }
    v.push(("add terminal-terminal H edge".into(), Box::new(|h, _, _| {
        let (a, b) = (h.terminals()[0], h.terminals()[1]);
        h.add_edge(a, b, int(1)).unwrap();
    })));
    v.push(("reattach an H edge".into(), Box::new(|h, _, _| {
        let n = h.n();
        *h = rebuild(h, |j, e| {
            let mut w = (e.v + 1) % n;
            if w == e.u {
                w = (w + 1) % n;
            }
            Some(if j == 0 { (e.u, w, e.cap.clone()) } else { (e.u, e.v, e.cap.clone()) })
        });
    })));
    v.push(("drop a vertex from a cluster".into(), Box::new(|_, c, _| {
        if let Some(cl) = c.clusters.iter_mut().find(|x| x.len() > 1) {
            cl.pop();
        } else {
            c.clusters[0].push(usize::MAX / 2);
        }
    })));
    v.push(("put a terminal in a cluster".into(), Box::new(|h, c, _| {
        let _ = h;
        c.clusters[0].push(0);
    })));
    v.push(("duplicate a vertex across clusters".into(), Box::new(|_, c, _| {
        let x = c.clusters[0][0];
        c.clusters.push(vec![x]);
    })));
    v.push(("merge two clusters".into(), Box::new(|_, c, _| {
        if c.clusters.len() > 1 {
            let last = c.clusters.pop().unwrap();
            c.clusters[0].extend(last);
        } else {
            c.clusters.push(vec![]);
        }
    })));
    v.push(("claim quality 1/2".into(), Box::new(|_, c, _| c.quality = R::new(1.into(), 2.into()))));
    v.push(("swap two H terminals".into(), Box::new(|h, _, _| {
        let mut ts = h.terminals().to_vec();
        ts.swap(0, 1);
        h.set_terminals(&ts).unwrap();
    })));
    v.push(("double every H capacity".into(), Box::new(|h, _, _| *h = rebuild(h, |_, e| Some((e.u, e.v, e.cap.clone() * int(2)))))));
    v
}

fn cert_corruptions() -> Vec<Corruption> {
    let mut v: Vec<Corruption> = Vec::new();
    let with_paths = |certs: &mut Vec<RouterCertificate<R>>| certs.iter_mut().position(|c| c.flow.commodities.iter().any(|m| !m.paths.is_empty()));
    v.push(("path amount +1".into(), Box::new(move |_, _, certs| {
        let i = with_paths(certs).unwrap();
        let p = certs[i].flow.commodities.iter_mut().find(|m| !m.paths.is_empty()).unwrap();
        p.paths[0].amount = p.paths[0].amount.clone() + int(1);
    })));
    v.push(("commodity demand doubled".into(), Box::new(move |_, _, certs| {
        let i = with_paths(certs).unwrap();
        let c = &mut certs[i].flow.commodities[0];
        c.demand = c.demand.clone() * int(2);
    })));
    v.push(("path dropped".into(), Box::new(move |_, _, certs| {
        let i = with_paths(certs).unwrap();
        let p = certs[i].flow.commodities.iter_mut().find(|m| !m.paths.is_empty()).unwrap();
        p.paths.remove(0);
    })));
    v.push(("stored congestion lowered".into(), Box::new(|_, _, certs| {
        certs[0].congestion = certs[0].congestion.clone() / int(2);
    })));
    v.push(("stored z changed".into(), Box::new(|_, _, certs| certs[0].z += 1)));
    v.push(("member removed".into(), Box::new(|_, _, certs| {
        let c = certs.iter_mut().find(|c| c.members.len() > 1);
        match c {
            Some(c) => {
                c.members.pop();
            }
            None => certs[0].members.push(usize::MAX / 2),
        }
    })));
    v.push(("path edge replaced".into(), Box::new(move |_, _, certs| {
        let i = with_paths(certs).unwrap();
        let nloc = certs[i].internal_edges.len();
        let p = certs[i].flow.commodities.iter_mut().find(|m| !m.paths.is_empty()).unwrap();
        let e = &mut p.paths[0].edges[0];
        *e = (*e + 1) % nloc.max(2);
    })));
    v.push(("commodity endpoints swapped to one group".into(), Box::new(move |_, _, certs| {
        let i = with_paths(certs).unwrap();
        let c = &mut certs[i].flow.commodities[0];
        c.b = c.a;
    })));
    v.push(("certificate removed".into(), Box::new(|_, _, certs| {
        certs.pop();
    })));
    v.push(("internal edge list truncated".into(), Box::new(|_, _, certs| {
        let c = certs.iter_mut().find(|c| !c.internal_edges.is_empty()).unwrap();
        c.internal_edges.pop();
    })));
    v
}

fn c10() -> Outcome {
    let opts = VerifyOptions { samples: 6, adversarial_steps: 4, ..Default::default() };
    let mut total = 0;
    let mut missed = Vec::new();
    // cut sparsifiers, unit and capacitated
    let g1 = pendant_random(8, 6, 30, 1, 8001);
    let g2 = pendant_random(7, 5, 30, 3, 8002);
    let cut_cases = vec![
        (g1.clone(), build_cut_sparsifier_unit(&g1, &DecompOptions::default()).unwrap()),
        (g2.clone(), build_cut_sparsifier(&g2, &R::from_frac(1, 2), &DecompOptions::default()).unwrap()),
    ];
    for (gi, (g, sp)) in cut_cases.iter().enumerate() {
        let base_claim = Claim::of_cut(sp);
        let clean = verify_sparsifier(g, &sp.h, &base_claim, None, &opts).unwrap();
        assert!(clean.passed(), "clean cut sparsifier must pass: {:?}", clean.violations);
        for (name, f) in corruptions() {
            if name == "claim quality 1/2" && clean.q_observed <= 0.5 {
                continue;
            }
            total += 1;
            let (mut h, mut claim, mut certs) = (sp.h.clone(), base_claim.clone(), Vec::new());
            f(&mut h, &mut claim, &mut certs);
            let flagged = match verify_sparsifier(g, &h, &claim, None, &opts) {
                Ok(r) => !r.passed(),
                Err(_) => true,
            };
            if !flagged {
                missed.push(format!("cut {gi}: {name}"));
            }
        }
    }
    // flow sparsifier with a nontrivial cluster
    let g3 = generate::<R>(&GenSpec { family: Family::WellLinked, k: 6, size: 5, param: 0, max_cap: 1, seed: 0 }).unwrap();
    let sp = build_flow_sparsifier_unit(&g3, &FlowParams::aggressive()).unwrap();
    let base_claim = Claim::of_flow(&sp);
    let clean = verify_sparsifier(&g3, &sp.h, &base_claim, Some(&sp.certs), &opts).unwrap();
    assert!(clean.passed(), "clean flow sparsifier must pass: {:?}", clean.violations);
    for (name, f) in corruptions().into_iter().chain(cert_corruptions()) {
        if name == "claim quality 1/2" && clean.q_observed <= 0.5 {
            continue;
        }
        total += 1;
        let (mut h, mut claim, mut certs) = (sp.h.clone(), base_claim.clone(), sp.certs.clone());
        f(&mut h, &mut claim, &mut certs);
        let flagged = match verify_sparsifier(&g3, &h, &claim, Some(&certs), &opts) {
            Ok(r) => !r.passed(),
            Err(_) => true,
        };
        if !flagged {
            missed.push(format!("flow: {name}"));
        }
    }
    outcome(
        missed.is_empty() && total >= 30,
        format!("{total} corruptions, {} flagged{}", total - missed.len(), missed.first().map(|_| format!("; missed: {}", missed.join(", "))).unwrap_or_default()),
    )
}

fn c11() -> Outcome {
    let mut fails = Vec::new();
    let mut r = rng(11);
    // max flow against exhaustive bipartitions
    let mut mf = 0;
    for seed in 0..150u64 {
        let n = r.gen_range(4..=12);
        let g = pendant_random(n - 2, 2, 35, 5, 9000 + seed);
        let mut vs: Vec<VertexId> = (0..g.n()).collect();
        vs.shuffle(&mut r);
        let a = vs[..2].to_vec();
        let b = vs[2..4].to_vec();
        let got = max_flow(&g, &a, &b).unwrap().value;
        let want = brute_min_cut(&g, &a, &b);
        mf += 1;
        if got != want {
            fails.push(format!("max flow {got} vs oracle {want}"));
        }
    }
    // sparsest cut against exhaustive unit bipartitions
    let mut sc = 0;
    for seed in 0..120u64 {
        let inner = r.gen_range(2..=8);
        let k = r.gen_range(2..=(14 - inner).min(8));
        let mut g = pendant_random(inner, k, 40, 2, 9500 + seed);
        // pendants of weight 1 or 2
        let ts: Vec<VertexId> = g.terminals().to_vec();
        let mut h = Graph::new(g.n());
        for e in g.edges() {
            let c = if g.is_terminal(e.u) || g.is_terminal(e.v) { int(1 + (e.u + e.v) as i64 % 2) } else { e.cap.clone() };
            h.add_edge(e.u, e.v, c).unwrap();
        }
        h.set_terminals(&ts).unwrap();
        g = h;
        let units: i64 = g.terminals().iter().map(|&t| g.degree_cap(t).to_i64_exact().unwrap()).sum();
        if inner as i64 + units > 22 {
            continue;
        }
        sc += 1;
        let got = sparsest_cut_exact(&g, 30).unwrap();
        let want = brute_sparsest(&g);
        if got.cut.map(|c| c.sparsity) != want {
            fails.push(format!("sparsest cut differs on seed {seed}"));
        }
        let v = sparsest_cut_by_vectors(&g).unwrap().cut.map(|c| c.sparsity);
        let p = sparsest_cut_by_partitions(&g).unwrap().cut.map(|c| c.sparsity);
        if v != want || p != want {
            fails.push(format!("route disagreement on seed {seed}: vectors {v:?}, bipartitions {p:?}, oracle {want:?}"));
        }
    }
    // routing against a per-pair arc LP
    let mut rt = 0;
    let mut max_gap: f64 = 0.0;
    for seed in 0..60u64 {
        let inner = r.gen_range(3..=5);
        let g = pendant_random(inner, 3, 40, 3, 9800 + seed);
        let ts = g.terminals().to_vec();
        let pairs: Vec<(VertexId, VertexId, R)> =
            vec![(ts[0], ts[1], int(r.gen_range(1..=3))), (ts[1], ts[2], int(r.gen_range(1..=3))), (ts[0], ts[2], R::new(1.into(), 2.into()))];
        let vars = 2 * g.m() * pairs.len() + 1;
        if vars > 200 {
            continue;
        }
        rt += 1;
        let want = lp_congestion(&g, &pairs).unwrap();
        let mut d = DemandSet::new();
        for (a, b, x) in &pairs {
            d.add(*a, *b, x.clone()).unwrap();
        }
        let exact = min_congestion_routing(&g, &d, &RoutingOptions { method: RoutingMethod::Exact, ..Default::default() }).unwrap();
        if exact.eta.as_ref() != Some(&want) {
            fails.push(format!("exact routing {:?} vs LP {want}", exact.eta));
        }
        let (issues, cong) = audit_flow(&g, &exact.flow);
        if !issues.is_empty() || cong != want {
            fails.push(format!("exact routing paths audit: {issues:?}, congestion {cong}"));
        }
        let gf = g.to_f64();
        let lp = min_congestion_routing(&gf, &d.convert::<f64>(), &RoutingOptions { method: RoutingMethod::Lp, ..Default::default() }).unwrap();
        let gap = (lp.eta.unwrap() - want.to_f64()).abs() / want.to_f64();
        max_gap = max_gap.max(gap);
        if gap > 1e-6 {
            fails.push(format!("float routing {} vs LP {want}", lp.eta.unwrap()));
        }
    }
    outcome(
        fails.is_empty() && mf > 0 && sc > 0 && rt > 0,
        format!(
            "{mf} max-flow, {sc} sparsest-cut, {rt} routing comparisons; float routing relative gap {max_gap:.2e}{}",
            fails.first().map(|f| format!("; first failure: {f}")).unwrap_or_default()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut c1 = outcome(false, "");
    let mut size_lines = Vec::new();
    let cut_sizes_ok = c1_c9_cut(&mut c1, &mut size_lines);
    results.push((1, "cut quality, unit", c1));
    results.push((2, "cut quality, capacitated", c2()));
    results.push((3, "strong decomposition", c3()));
    results.push((4, "weak decomposition", c4()));
    let runs = flow_runs();
    results.push((5, "good-router constant", c5(&runs)));
    results.push((6, "flow quality", c6(&runs)));
    results.push((7, "witness flows", c7()));
    results.push((8, "progress and ledgers", c8(&runs)));
    let flow_sizes_ok = c9_flow(&runs, &mut size_lines);
    results.push((9, "size bounds", outcome(cut_sizes_ok && flow_sizes_ok, size_lines.join("; "))));
    results.push((10, "sabotage corpus", c10()));
    results.push((11, "oracle cross-checks", c11()));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, o) in &results {
        if !o.pass {
            failed += 1;
        }
        println!("criterion {n:>2} {:<4} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria pass ({:.1}s)", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
