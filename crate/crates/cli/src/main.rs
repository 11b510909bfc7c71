use std::io::{Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gkmkit::admissible_tuples::{
    build_realizable_bundle, complete_tuple, enumerate_factorizations, su3_example, CompletionJson, FactorizationJson, TupleJson,
};
use gkmkit::automorphisms::{decompose, enumerate_autos, preserves_signed, reassemble, AutoJson};
use gkmkit::exact_lattice::{IntMatrix, IntVector, LatticeAuto};
use gkmkit::fibrations_bundles::{
    assemble_total_graph, check_fiberwise_signed, check_gkm_fiber_bundle, check_gkm_fibration, decide, decompose_graph_map,
    fibration_predicates, twist, BundleJson, BundleVerdict, Decision, Fibration, FibrationJson, PolygonBundle,
};
use gkmkit::fixtures::{self, FixtureData, FIXTURE_NAMES};
use gkmkit::flag_builder::build_flag_graph;
use gkmkit::gkm_graph::{check_connection_compatibility, to_dot, validate_graph, GraphData, GraphJson};
use gkmkit::graph_cohomology::{compute_h2, edge_restriction_injectivity};
use gkmkit::root_weyl::root_system;

#[derive(Parser)]
#[command(name = "gkmkit", version, about = "GKM graphs, fibrations and bundles over polygons")]
struct Cli {
    /// Emit machine-readable JSON verdicts.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Verb {
    /// Flag graphs of root systems such as `A2` or `A1xB2`.
    #[command(subcommand)]
    Flag(FlagCmd),
    /// Validation and rendering of graph JSON files.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Automorphisms of flag graphs.
    #[command(subcommand)]
    Auto(AutoCmd),
    /// Fibrations and polygon bundles.
    #[command(subcommand)]
    Bundle(BundleCmd),
    /// Admissible tuples of block lattice maps.
    #[command(subcommand)]
    Tuple(TupleCmd),
    /// Degree-2 graph cohomology.
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    /// Built-in examples.
    #[command(subcommand)]
    Fixture(FixtureCmd),
}

#[derive(Subcommand)]
enum FlagCmd {
    /// Flag graph with its signed structure and canonical connection.
    Build {
        desc: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Structural checks plus connection compatibility when a connection is present.
    Validate {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Graphviz rendering.
    Dot {
        #[arg(default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand)]
enum AutoCmd {
    /// Connection-preserving automorphisms, each split as L_w . diagram map when signed.
    List {
        desc: String,
        /// Only automorphisms preserving the signed structure.
        #[arg(long)]
        signed: bool,
    },
    /// Splits an automorphism JSON into its Weyl and diagram parts.
    Decompose {
        desc: String,
        #[arg(default_value = "-")]
        auto: String,
    },
}

#[derive(Subcommand)]
enum BundleCmd {
    /// Fibration and fiber-bundle checks. INPUT is a bundle JSON, a fibration JSON,
    /// `fixture:NAME` or `-`.
    Check {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Twist automorphism of the fiber over the first base vertex.
    Twist {
        #[arg(default_value = "-")]
        input: String,
    },
    /// Realizability decision; exits 1 when not realizable.
    Realizable {
        #[arg(default_value = "-")]
        input: String,
        /// Also compute the H² surjectivity certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// Total graph of a polygon bundle.
    Assemble {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Whether the signed labels carried around the polygon close up.
    Signed {
        #[arg(default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand)]
enum TupleCmd {
    /// Completes corner blocks and the first n-2 upper blocks to a tuple.
    Complete {
        #[arg(default_value = "-")]
        input: String,
    },
    /// All factorizations of a 2x2 matrix into compatible corner blocks.
    Enumerate {
        #[arg(default_value = "-")]
        input: String,
        #[arg(long)]
        bound: i64,
    },
    /// The SU(3)-block tuple with parameters b, n, l.
    Su3 {
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bundle JSON realizing a tuple.
    BuildBundle {
        #[arg(default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand)]
enum CohomologyCmd {
    /// Ranks, torsion and edge-restriction injectivity of H² for a graph JSON.
    H2 {
        #[arg(default_value = "-")]
        input: String,
    },
}

#[derive(Subcommand)]
enum FixtureCmd {
    /// Names of the built-in fixtures.
    List,
    /// Prints the fixture as bundle or fibration JSON.
    Show { name: String },
}

/// Exit codes: 0 on success, 1 on a negative verdict, 2 when input cannot be read or
/// interpreted or the computation cannot be carried out.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn parse<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = read_input(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {path}"))
}

/// Writes to stdout; a reader that went away (`| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    emit(&(serde_json::to_string_pretty(v)? + "\n"))
}

enum Input {
    Fibration(Box<Fibration>),
    Bundle(Box<PolygonBundle>),
}

fn load_input(path: &str) -> Result<Input> {
    if let Some(name) = path.strip_prefix("fixture:") {
        return match fixtures::load(name)? {
            FixtureData::Fibration(f) => Ok(Input::Fibration(f)),
            FixtureData::Bundle(b) => Ok(Input::Bundle(b)),
        };
    }
    let value: Value = parse(path)?;
    if value.get("total").is_some() {
        let fj: FibrationJson = serde_json::from_value(value)?;
        Ok(Input::Fibration(Box::new(fj.to_fibration()?)))
    } else if value.get("base_weights").is_some() {
        let bj: BundleJson = serde_json::from_value(value)?;
        Ok(Input::Bundle(Box::new(bj.to_bundle()?)))
    } else {
        Err(anyhow!("{path}: expected a bundle (base_weights) or a fibration (total, base, projection)"))
    }
}

fn load_bundle(path: &str) -> Result<PolygonBundle> {
    match load_input(path)? {
        Input::Bundle(b) => Ok(*b),
        Input::Fibration(_) => Err(anyhow!("{path}: this verb needs a polygon bundle, not a fibration")),
    }
}

fn rows(m: &IntMatrix) -> Vec<IntVector> {
    m.row_vectors()
}

/// Rows in the vector notation, e.g. `[(1,0) (0,1)]`.
fn mat_str(m: &IntMatrix) -> String {
    format!("[{}]", m.row_vectors().iter().map(|r| format!("{r:?}")).collect::<Vec<_>>().join(" "))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.verb {
        Verb::Flag(FlagCmd::Build { desc, format }) => {
            let rs = root_system(desc)?;
            let fg = build_flag_graph(&rs)?;
            match format {
                Format::Dot => emit(&to_dot(&fg.graph, Some(&fg.signed), desc))?,
                Format::Json => print_json(&fg.data().to_json())?,
            }
            Ok(true)
        }
        Verb::Graph(GraphCmd::Validate { input }) => {
            let gj: GraphJson = parse(input)?;
            let data = GraphData::from_json(&gj)?;
            let report = validate_graph(&data.graph);
            let compat = match &data.connection {
                Some(c) => Some(check_connection_compatibility(&data.graph, c, data.signed.as_ref())?),
                None => None,
            };
            let ok = report.is_valid() && compat.as_ref().is_none_or(|c| c.is_compatible());
            let violations: Vec<String> = report.violations.iter().map(|v| format!("{v:?}")).collect();
            let conn_violations: Vec<String> = compat.iter().flat_map(|c| c.violations.iter().map(|v| format!("{v:?}"))).collect();
            if cli.json {
                print_json(&json!({
                    "valid": ok,
                    "graph_violations": violations,
                    "connection_checked": compat.is_some(),
                    "connection_violations": conn_violations,
                }))?;
            } else {
                println!("{}", if ok { "valid" } else { "invalid" });
                for v in violations.iter().chain(&conn_violations) {
                    println!("  {v}");
                }
            }
            Ok(ok)
        }
        Verb::Graph(GraphCmd::Dot { input }) => {
            let gj: GraphJson = parse(input)?;
            let data = GraphData::from_json(&gj)?;
            emit(&to_dot(&data.graph, data.signed.as_ref(), "G"))?;
            Ok(true)
        }
        Verb::Auto(AutoCmd::List { desc, signed }) => {
            let rs = root_system(desc)?;
            let fg = build_flag_graph(&rs)?;
            let autos = enumerate_autos(&fg, *signed)?;
            let mut items = Vec::new();
            // only the signed subgroup splits as Weyl times diagram maps
            for phi in &autos {
                let dec = if preserves_signed(&fg, phi) { Some(decompose(&fg, phi)?) } else { None };
                let parts = dec.map(|d| (d.w_element.word_string(), d.outer.describe(&fg.rs)));
                items.push((parts, mat_str(phi.psi.matrix()), AutoJson::from_auto(&fg.graph, phi)));
            }
            if cli.json {
                let list: Vec<Value> = items
                    .iter()
                    .map(|(parts, _, a)| match parts {
                        Some((w, o)) => json!({"w": w, "outer": o, "auto": a}),
                        None => json!({"w": null, "outer": null, "auto": a}),
                    })
                    .collect();
                print_json(&json!({"count": autos.len(), "automorphisms": list}))?;
            } else {
                println!("{} automorphisms", autos.len());
                for (parts, psi, _) in &items {
                    match parts {
                        Some((w, o)) => println!("  L_{w} . {o}"),
                        None => println!("  unsigned, psi = {psi}"),
                    }
                }
            }
            Ok(true)
        }
        Verb::Auto(AutoCmd::Decompose { desc, auto }) => {
            let rs = root_system(desc)?;
            let fg = build_flag_graph(&rs)?;
            let aj: AutoJson = parse(auto)?;
            let phi = aj.to_auto(&fg.graph, &fg.canonical, None)?;
            let dec = decompose(&fg, &phi)?;
            let round_trip = reassemble(&fg, &dec).same_graph_map(&phi);
            let (w, outer) = (dec.w_element.word_string(), dec.outer.describe(&fg.rs));
            if cli.json {
                print_json(&json!({"w": w, "outer": outer, "reassembles": round_trip}))?;
            } else {
                println!("L_{w} . {outer}");
            }
            Ok(round_trip)
        }
        Verb::Bundle(cmd) => run_bundle(cli, cmd),
        Verb::Tuple(cmd) => run_tuple(cli, cmd),
        Verb::Cohomology(CohomologyCmd::H2 { input }) => {
            let gj: GraphJson = parse(input)?;
            let data = GraphData::from_json(&gj)?;
            let h = compute_h2(&data.graph);
            let injective = edge_restriction_injectivity(&data.graph);
            let torsion: Vec<String> = h.ordinary_torsion.iter().map(|t| t.to_string()).collect();
            if cli.json {
                print_json(&json!({
                    "equivariant_rank": h.equivariant_basis.len(),
                    "constants_rank": h.constants_rank,
                    "ordinary_rank": h.ordinary_rank,
                    "ordinary_torsion": torsion,
                    "edge_restriction_injective": injective,
                }))?;
            } else {
                println!("equivariant H2 rank {}", h.equivariant_basis.len());
                println!("ordinary H2 rank {} torsion [{}]", h.ordinary_rank, torsion.join(", "));
                println!("edge restriction injective: {injective}");
            }
            Ok(true)
        }
        Verb::Fixture(FixtureCmd::List) => {
            for n in FIXTURE_NAMES {
                println!("{n}");
            }
            Ok(true)
        }
        Verb::Fixture(FixtureCmd::Show { name }) => {
            match fixtures::load(name)? {
                FixtureData::Fibration(f) => print_json(&FibrationJson::from_fibration(&f))?,
                FixtureData::Bundle(b) => print_json(&BundleJson::from_bundle(&b))?,
            }
            Ok(true)
        }
    }
}

fn verdict_json(fib: &Fibration, v: &BundleVerdict) -> Value {
    match v {
        BundleVerdict::Bundle(ts) => json!({
            "verdict": "Bundle",
            "transports": ts.iter().map(|t| json!({
                "base_dart": fib.base.dart(t.base_dart).id,
                "psi": rows(t.psi.matrix()),
                "alternates": t.alternates.iter().map(|&(a, b)| [fib.total.dart(a).id.clone(), fib.total.dart(b).id.clone()]).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
        BundleVerdict::NotGraphIso { base_dart, dart } => {
            json!({"verdict": "NotGraphIso", "base_dart": base_dart, "dart": dart})
        }
        BundleVerdict::NoLatticeAuto { base_dart, subset, source_rank, target_rank } => json!({
            "verdict": "NoLatticeAuto", "base_dart": base_dart, "subset": subset,
            "source_rank": source_rank, "target_rank": target_rank,
        }),
    }
}

fn check_fibration(cli: &Cli, fib: &Fibration) -> Result<bool> {
    let report = check_gkm_fibration(fib);
    let verdict = check_gkm_fiber_bundle(fib);
    let preds = fibration_predicates(fib);
    let is_bundle = matches!(verdict, BundleVerdict::Bundle(_));
    let failing = |f: fn(&gkmkit::fibrations_bundles::VertexPredicates) -> bool| -> Vec<String> {
        preds.per_vertex.iter().filter(|p| !f(p)).map(|p| fib.total.vertices()[p.vertex].clone()).collect()
    };
    let (p2, p3a, p3b) = (failing(|p| p.p2), failing(|p| p.p3a), failing(|p| p.p3b));
    if cli.json {
        print_json(&json!({
            "gkm_fibration": report.passes(),
            "fiber_bundle": verdict_json(fib, &verdict),
            "p2_fails_at": p2, "p3a_fails_at": p3a, "p3b_fails_at": p3b,
        }))?;
    } else {
        println!("GKM fibration: {}", if report.passes() { "yes" } else { "no" });
        println!("fiber bundle: {verdict}");
        println!("P2 fails at: [{}]", p2.join(", "));
        println!("P3a fails at: [{}]", p3a.join(", "));
        println!("P3b fails at: [{}]", p3b.join(", "));
    }
    Ok(report.passes() && is_bundle)
}

fn run_bundle(cli: &Cli, cmd: &BundleCmd) -> Result<bool> {
    match cmd {
        BundleCmd::Check { input } => match load_input(input)? {
            Input::Fibration(f) => check_fibration(cli, &f),
            Input::Bundle(pb) => {
                let tg = assemble_total_graph(&pb)?;
                let valid = validate_graph(tg.graph()).is_valid();
                Ok(check_fibration(cli, &tg.fibration)? && valid)
            }
        },
        BundleCmd::Twist { input } => {
            let pb = load_bundle(input)?;
            let phi = twist(&pb)?;
            let g = pb.first_fiber();
            let dec =
                pb.fiber.flag.as_ref().and_then(|fg| decompose_graph_map(fg, &phi).map(|d| (d.w.word_string(), d.outer.describe(&fg.rs))));
            if cli.json {
                print_json(&json!({
                    "twist": AutoJson::from_auto(&g, &phi),
                    "w": dec.as_ref().map(|d| d.0.clone()),
                    "outer": dec.as_ref().map(|d| d.1.clone()),
                }))?;
            } else {
                match &dec {
                    Some((w, o)) => println!("twist = L_{w} . {o}"),
                    None => println!("twist is not a composite of the standard automorphisms"),
                }
                println!("psi = {}", mat_str(phi.psi.matrix()));
            }
            Ok(true)
        }
        BundleCmd::Realizable { input, certificate } => {
            let pb = load_bundle(input)?;
            let d = decide(&pb, *certificate)?;
            if cli.json {
                let v = match &d {
                    Decision::Realizable { w } => json!({"decision": "Realizable", "w": w}),
                    Decision::NotRealizable { residual, h2_surjective } => {
                        json!({"decision": "NotRealizable", "residual": residual, "h2_surjective": h2_surjective})
                    }
                    Decision::Inapplicable { reason } => {
                        json!({"decision": "Inapplicable", "reason": reason})
                    }
                };
                print_json(&v)?;
            } else {
                println!("{d}");
                if let Decision::NotRealizable { h2_surjective: Some(s), .. } = &d {
                    println!("fiber inclusion onto H2: {}", if *s { "surjective" } else { "not surjective" });
                }
            }
            Ok(matches!(d, Decision::Realizable { .. }))
        }
        BundleCmd::Assemble { input, format } => {
            let pb = load_bundle(input)?;
            let tg = assemble_total_graph(&pb)?;
            match format {
                Format::Dot => emit(&to_dot(tg.graph(), Some(&tg.signed), "total"))?,
                Format::Json => print_json(&FibrationJson::from_fibration(&tg.fibration))?,
            }
            Ok(true)
        }
        BundleCmd::Signed { input } => {
            let pb = load_bundle(input)?;
            let closes = check_fiberwise_signed(&pb)?;
            if cli.json {
                print_json(&json!({"closes": closes}))?;
            } else {
                println!("signed propagation {}", if closes { "closes" } else { "does not close" });
            }
            Ok(closes)
        }
    }
}

fn square(rows: &[IntVector], what: &str) -> Result<IntMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("{what} must be square");
    }
    Ok(IntMatrix::from_rows(rows, n))
}

fn run_tuple(cli: &Cli, cmd: &TupleCmd) -> Result<bool> {
    match cmd {
        TupleCmd::Complete { input } => {
            let cj: CompletionJson = parse(input)?;
            let ad_w = LatticeAuto::new(square(&cj.ad_w, "ad_w")?)?;
            let m = ad_w.rank();
            let a: Vec<IntMatrix> = cj.a_list.iter().map(|r| square(r, "corner block")).collect::<Result<_>>()?;
            let b: Vec<IntMatrix> = if cj.b_list.is_empty() && m == 2 {
                vec![IntMatrix::zeros(0, 2); a.len().saturating_sub(2)]
            } else {
                cj.b_list.iter().map(|r| IntMatrix::from_rows(r, 2)).collect()
            };
            let t = complete_tuple(&a, &b, &ad_w)?;
            let psis: Vec<Vec<IntVector>> = t.psis.iter().map(|p| rows(p.full().matrix())).collect();
            print_json(&json!({"ad_w": rows(t.target.matrix()), "psis": psis}))?;
            Ok(true)
        }
        TupleCmd::Enumerate { input, bound } => {
            let fj: FactorizationJson = parse(input)?;
            let a = square(&fj.a, "a")?;
            let found = enumerate_factorizations(&a, &fj.kernel_vectors, *bound)?;
            if cli.json {
                let list: Vec<Vec<Vec<IntVector>>> = found.iter().map(|f| f.iter().map(rows).collect()).collect();
                print_json(&json!({"count": found.len(), "factorizations": list}))?;
            } else {
                println!("{} factorizations", found.len());
                for f in &found {
                    println!("  {}", f.iter().map(mat_str).collect::<Vec<_>>().join(" "));
                }
            }
            Ok(!found.is_empty())
        }
        TupleCmd::Su3 { b, n, l, seed } => {
            let ex = su3_example(*b, *n, *l)?;
            let t = ex.tuple()?;
            print_json(&TupleJson::from_tuple(&t, "A2", &ex.base_weights, *seed))?;
            Ok(true)
        }
        TupleCmd::BuildBundle { input } => {
            let tj: TupleJson = parse(input)?;
            let t = tj.to_tuple()?;
            let pb = build_realizable_bundle(&t, &tj.base_weights, &tj.fiber, tj.label_seed)?;
            print_json(&BundleJson::from_bundle(&pb))?;
            Ok(true)
        }
    }
}
