//! `vsparse`: build, verify, generate and inspect vertex sparsifiers.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error, 3 budget refusal.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vsparse::cut_sparsifier::{build_cut_sparsifier, build_cut_sparsifier_unit};
use vsparse::flow_sparsifier::{
    build_flow_sparsifier, build_flow_sparsifier_unit, theoretical_r, FlowParams, FlowSparsifier, Profile,
};
use vsparse::gen::{generate, Family, GenSpec};
use vsparse::graph::{read_graph, write_graph};
use vsparse::sparsifier_io::{read_sparsifier, write_sparsifier, SparsifierFile};
use vsparse::verifier::{check_stored_etas, verify_cut_quality, verify_flow_quality, verify_sparsifier, Claim, Mode, VerifyOptions};
use vsparse::wl::DecompOptions;
use vsparse::{Error, Graph, Rational, Scalar};

#[derive(Parser, Debug)]
#[command(name = "vsparse", version, about = "Vertex cut and flow sparsifiers with Steiner nodes")]
struct Cli {
    #[command(flatten)]
    cfg: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// cut or flow
    #[arg(long, global = true, env = "VSPARSE_MODE", default_value = "cut")]
    mode: String,
    /// Accuracy for capacitated inputs (omit for the unit builders).
    #[arg(long, global = true, env = "VSPARSE_EPS")]
    eps: Option<String>,
    /// theoretical or aggressive
    #[arg(long, global = true, env = "VSPARSE_PROFILE", default_value = "aggressive")]
    profile: String,
    #[arg(long, global = true, env = "VSPARSE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "VSPARSE_OUT")]
    out: Option<PathBuf>,
    /// Exact sparsest cut is used while its cost stays below 2^budget-exp.
    #[arg(long, global = true, env = "VSPARSE_BUDGET_EXP", default_value_t = 22)]
    budget_exp: u32,
    /// Exhaustive cut verification up to this many terminals.
    #[arg(long, global = true, env = "VSPARSE_BUDGET_ENUM", default_value_t = 16)]
    budget_enum: usize,
    #[arg(long, global = true, env = "VSPARSE_DELTA", default_value_t = 1e-6)]
    delta: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "VSPARSE_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, env = "VSPARSE_C_BETA")]
    c_beta: Option<f64>,
    #[arg(long, global = true, env = "VSPARSE_C_F")]
    c_f: Option<f64>,
    #[arg(long, global = true, env = "VSPARSE_R")]
    r: Option<u64>,
    /// Random matchings per flow verification.
    #[arg(long, global = true, env = "VSPARSE_SAMPLES", default_value_t = 100)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a sparsifier of a graph file.
    Build { input: PathBuf },
    /// Check H against G; H may be a sparsifier file or a plain graph.
    Verify { g: PathBuf, h: PathBuf },
    /// Generate a seeded instance.
    Gen {
        /// dumbbell, grid, regular, welllinked or random
        family: String,
        #[arg(long, env = "VSPARSE_K", default_value_t = 6)]
        k: usize,
        #[arg(long, env = "VSPARSE_SIZE", default_value_t = 6)]
        size: usize,
        /// Degree (regular) or edge percentage (random).
        #[arg(long, env = "VSPARSE_PARAM", default_value_t = 3)]
        param: usize,
        #[arg(long, env = "VSPARSE_MAX_CAP", default_value_t = 1)]
        max_cap: i64,
    },
    /// Summarize a graph or sparsifier file.
    Inspect { file: PathBuf },
}

struct Failure {
    code: u8,
    err: Error,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Budget { .. } => 3,
            Error::Internal(_) => 1,
            _ => 2,
        };
        Failure { code, err }
    }
}

type Out<T> = Result<T, Failure>;

fn read_file(p: &Path) -> Out<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())).into())
}

fn write_file(p: &Path, s: &str) -> Out<()> {
    std::fs::write(p, s).map_err(|e| Error::Input(format!("{}: {e}", p.display())).into())
}

fn parse_eps(c: &Common) -> Out<Option<Rational>> {
    match &c.eps {
        None => Ok(None),
        Some(s) => Rational::parse_scalar(s).map(Some).ok_or_else(|| Error::Input(format!("bad eps '{s}'")).into()),
    }
}

fn flow_params(c: &Common, k: usize) -> Out<FlowParams> {
    let profile: Profile = c.profile.parse()?;
    let mut p = FlowParams::for_profile(profile, k);
    if let Some(cb) = c.c_beta {
        p.c_beta = cb;
        if profile == Profile::Theoretical {
            p.r = theoretical_r(k, cb);
        }
    }
    if let Some(cf) = c.c_f {
        p.c_f = cf;
    }
    if let Some(r) = c.r {
        p.r = r;
    }
    p.budget_exp = c.budget_exp;
    Ok(p)
}

/// Parameters echoed at the top of every output.
fn header(c: &Common, k: Option<usize>) -> Value {
    let mut h = json!({
        "mode": c.mode,
        "profile": c.profile,
        "seed": c.seed,
        "eta_star": 34,
        "beta_rule": format!("max(1, {} log2 k)", c.c_beta.unwrap_or(1.0)),
        "budget_exp": c.budget_exp,
        "budget_enum": c.budget_enum,
        "delta": c.delta,
        "workers": c.workers.unwrap_or_else(rayon::current_num_threads),
    });
    if let Some(e) = &c.eps {
        h["eps"] = json!(e);
    }
    if let Some(k) = k {
        if let Ok(p) = flow_params(c, k) {
            h["r"] = json!(p.r);
            h["c_f"] = json!(p.c_f);
        }
    }
    h
}

fn default_out(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    input.with_file_name(format!("{stem}.{suffix}"))
}

fn cert_json(sp: &FlowSparsifier<Rational>) -> Value {
    let certs: Vec<Value> = sp
        .certs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let comms: Vec<Value> = c
                .flow
                .commodities
                .iter()
                .map(|cm| {
                    let paths: Vec<Value> = cm
                        .paths
                        .iter()
                        .map(|p| {
                            let edges: Vec<usize> = p.edges.iter().map(|&e| c.internal_edges[e] + 1).collect();
                            json!({"amount": p.amount.to_string(), "edges": edges})
                        })
                        .collect();
                    json!({"a": c.members[cm.a] + 1, "b": c.members[cm.b] + 1, "demand": cm.demand.to_string(), "paths": paths})
                })
                .collect();
            json!({
                "cluster": i + 1,
                "members": c.members.iter().map(|v| v + 1).collect::<Vec<_>>(),
                "z": c.z,
                "congestion": c.congestion.to_string(),
                "boundary_congestion": c.boundary_congestion.to_string(),
                "well_linked": format!("{:?}", c.well_linked),
                "commodities": comms,
            })
        })
        .collect();
    json!({ "certificates": certs })
}

fn cmd_build(c: &Common, input: &Path) -> Out<(Value, bool)> {
    let g: Graph<Rational> = read_graph(&read_file(input)?)?;
    let mode: Mode = c.mode.parse()?;
    let eps = parse_eps(c)?;
    let mut hdr: BTreeMap<String, String> = BTreeMap::new();
    hdr.insert("mode".into(), c.mode.clone());
    hdr.insert("seed".into(), c.seed.to_string());
    if let Some(e) = &eps {
        hdr.insert("eps".into(), e.to_string());
    }
    let out = c.out.clone().unwrap_or_else(|| default_out(input, "h.vsp"));
    let mut summary = json!({"header": header(c, Some(g.k())), "input": input.display().to_string(), "output": out.display().to_string()});
    let file = match mode {
        Mode::Cut => {
            let opts = DecompOptions { budget_exp: c.budget_exp, ..Default::default() };
            let sp = match &eps {
                Some(e) => build_cut_sparsifier(&g, e, &opts)?,
                None => build_cut_sparsifier_unit(&g, &opts)?,
            };
            hdr.insert("q".into(), sp.quality.to_string());
            summary["claimed_q"] = json!(sp.quality.to_string());
            summary["clusters"] = json!(sp.clusters.len());
            summary["h_vertices"] = json!(sp.h.n());
            summary["h_edges"] = json!(sp.h.m());
            summary["steiner"] = json!(sp.h.n() - sp.h.k());
            SparsifierFile { h: sp.h, clusters: sp.clusters, supernodes: sp.supernodes, certs: vec![], header: hdr }
        }
        Mode::Flow => {
            let params = flow_params(c, g.k())?;
            let sp = match &eps {
                Some(e) => build_flow_sparsifier(&g, e, &params)?,
                None => build_flow_sparsifier_unit(&g, &params)?,
            };
            hdr.insert("q".into(), sp.quality.to_string());
            hdr.insert("profile".into(), c.profile.clone());
            hdr.insert("r".into(), sp.r.to_string());
            hdr.insert("eta_star".into(), sp.eta_star.to_string());
            let cert_path = out.with_extension("certs.json");
            write_file(&cert_path, &serde_json::to_string_pretty(&cert_json(&sp)).expect("json"))?;
            summary["certificates"] = json!(cert_path.display().to_string());
            summary["claimed_q"] = json!(sp.quality.to_string());
            summary["clusters"] = json!(sp.clusters.len());
            summary["h_vertices"] = json!(sp.h.n());
            summary["h_edges"] = json!(sp.h.m());
            summary["steiner"] = json!(sp.h.n() - sp.h.k());
            summary["contractions"] = json!(sp.report.contractions.len());
            summary["witnesses"] = json!(sp.report.witnesses.len());
            summary["sanitized"] = json!(sp.report.sanitized);
            let certs = sp.certs.iter().enumerate().map(|(i, x)| (i, x.congestion.clone())).collect();
            SparsifierFile { h: sp.h, clusters: sp.clusters, supernodes: sp.supernodes, certs, header: hdr }
        }
    };
    write_file(&out, &write_sparsifier(&file))?;
    Ok((summary, true))
}

fn verify_opts(c: &Common) -> VerifyOptions {
    VerifyOptions {
        budget_enum: c.budget_enum,
        samples: c.samples,
        delta: c.delta,
        seed: c.seed,
        budget_exp: c.budget_exp,
        ..Default::default()
    }
}

fn cmd_verify(c: &Common, gp: &Path, hp: &Path) -> Out<(Value, bool)> {
    let g: Graph<Rational> = read_graph(&read_file(gp)?)?;
    let f: SparsifierFile<Rational> = read_sparsifier(&read_file(hp)?)?;
    let mode: Mode = f.header.get("mode").unwrap_or(&c.mode).parse()?;
    let opts = verify_opts(c);
    let parse = |key: &str| -> Out<Option<Rational>> {
        match f.header.get(key) {
            None => Ok(None),
            Some(s) => Rational::parse_scalar(s).map(Some).ok_or_else(|| Error::Input(format!("bad header value {key}={s}")).into()),
        }
    };
    let q = parse("q")?;
    let claimed = f.header.contains_key("mode") || !f.clusters.is_empty();
    let rep = if claimed {
        let eta_star = f.header.get("eta_star").and_then(|s| s.parse().ok()).unwrap_or(34);
        let quality = q.ok_or_else(|| Error::Input("sparsifier header lacks q".into()))?;
        let claim = Claim { mode, clusters: f.clusters.clone(), eps: parse("eps")?, quality, eta_star };
        let mut rep = verify_sparsifier(&g, &f.h, &claim, None, &opts)?;
        if f.supernodes.windows(2).any(|w| w[0] >= w[1]) {
            rep.violations.push("structure: supernode ids are not increasing".into());
        }
        if mode == Mode::Flow {
            let (base, _) = vsparse::verifier::expected_base(&g, &claim)?;
            let params = FlowParams { eta_star, budget_exp: c.budget_exp, ..FlowParams::aggressive() };
            let certs: Result<Vec<_>, Error> = claim
                .clusters
                .iter()
                .map(|cl| vsparse::flow_sparsifier::uniform_router_check(&base, cl, &params))
                .collect();
            match certs {
                Ok(certs) => rep.violations.extend(check_stored_etas(&certs, &f.certs).into_iter().map(|s| format!("certificate: {s}"))),
                Err(e) => rep.violations.push(format!("certificate: {e}")),
            }
        }
        rep
    } else {
        match mode {
            Mode::Cut => verify_cut_quality(&g, &f.h, q.as_ref(), &opts)?.0,
            Mode::Flow => verify_flow_quality(&g, &f.h, q.as_ref().map(|x| x.to_f64()), None, &opts)?,
        }
    };
    let ok = rep.passed();
    let mut v = serde_json::to_value(&rep).expect("json");
    v["header"] = header(c, Some(g.k()));
    v["verified"] = json!(ok);
    Ok((v, ok))
}

fn cmd_gen(c: &Common, family: &str, k: usize, size: usize, param: usize, max_cap: i64) -> Out<(Value, bool)> {
    let fam: Family = family.parse()?;
    let spec = GenSpec { family: fam, k, size, param, max_cap, seed: c.seed };
    let g: Graph<Rational> = generate(&spec)?;
    let text = format!(
        "# vsparse gen {family} k {k} size {size} param {param} max_cap {max_cap} seed {}\n{}",
        c.seed,
        write_graph(&g)
    );
    let mut v = json!({"header": header(c, Some(k)), "family": family, "n": g.n(), "m": g.m(), "k": g.k()});
    match &c.out {
        Some(p) => {
            write_file(p, &text)?;
            v["output"] = json!(p.display().to_string());
        }
        None => {
            print!("{text}");
            return Ok((Value::Null, true));
        }
    }
    Ok((v, true))
}

fn cmd_inspect(c: &Common, p: &Path) -> Out<(Value, bool)> {
    let f: SparsifierFile<Rational> = read_sparsifier(&read_file(p)?)?;
    let h = &f.h;
    let total: Rational = h.edges().iter().fold(Rational::from_int(0), |a, e| a + e.cap.clone());
    let sizes: Vec<usize> = f.clusters.iter().map(Vec::len).collect();
    let v = json!({
        "header": header(c, Some(h.k())),
        "file_header": f.header,
        "n": h.n(),
        "m": h.m(),
        "k": h.k(),
        "steiner": h.n() - h.k(),
        "total_capacity": total.to_string(),
        "integral": h.is_integral(),
        "terminals_single_edge": h.terminals_have_single_edge(),
        "components": h.components().len(),
        "clusters": f.clusters.len(),
        "cluster_sizes": sizes,
        "certificates": f.certs.iter().map(|(i, e)| json!({"cluster": i + 1, "eta": e.to_string()})).collect::<Vec<_>>(),
    });
    Ok((v, true))
}

fn run(cli: &Cli) -> Out<(Value, bool)> {
    let c = &cli.cfg;
    if let Some(w) = c.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build_global()
            .map_err(|e| Error::Input(format!("worker pool: {e}")))?;
    }
    match &cli.cmd {
        Cmd::Build { input } => cmd_build(c, input),
        Cmd::Verify { g, h } => cmd_verify(c, g, h),
        Cmd::Gen { family, k, size, param, max_cap } => cmd_gen(c, family, *k, *size, *param, *max_cap),
        Cmd::Inspect { file } => cmd_inspect(c, file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, ok)) => {
            if !v.is_null() {
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(f) => {
            let v = json!({"header": header(&cli.cfg, None), "error": f.err.kind(), "message": f.err.to_string()});
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::from(f.code)
        }
    }
}
