//! `picbv` — norms, variation factors, homeomorphism decisions, mosaic
//! maintenance and reports for PIC sets described by JSON spec files.
//!
//! Exit codes: 0 success, 1 negative decision (e.g. not homeomorphic,
//! invalid mosaic), 2 input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use picbv::curve::pvar;
use picbv::mosaic::{is_simple_projectable, partition_at, refine_simple, validate};
use picbv::picgraph::{build_homeo, extract_graph, is_homeomorphic, match_subdivisions};
use picbv::picnorm::{bv_bracket_with_hints, equivalence_constants, pic_norm};
use picbv::specfile::{
    builtin_fixtures, load_spec, read_spec_file, spec_of_picset, write_spec_file, LoadedSpec,
};
use picbv::variation::vf_exact;
use picbv::{PlaneFunction, Poly2, SearchBudget};

#[derive(Parser)]
#[command(name = "picbv", version, about = "PIC norms and homeomorphism transport")]
struct Cli {
    /// Emit machine-readable JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SetArgs {
    /// Spec file describing the PIC set.
    #[arg(long = "set")]
    set: PathBuf,
    /// Samples per curve when the spec does not pin a count.
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Args)]
struct SearchArgs {
    /// Seed for the variation search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum point-list length explored by the variation search.
    #[arg(long = "max-list-len", default_value_t = 8)]
    max_list_len: usize,
}

#[derive(Subcommand)]
enum Command {
    /// PIC norm, BV bracket and equivalence constants for a named function.
    Norm {
        #[command(flatten)]
        set: SetArgs,
        /// Function name from the spec file.
        #[arg(long = "fn")]
        function: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Exact variation factor of a named point list.
    Vf {
        #[command(flatten)]
        set: SetArgs,
        /// List name from the spec file.
        #[arg(long)]
        list: String,
    },
    /// Decide whether two PIC sets are homeomorphic.
    Homeo {
        /// First spec file.
        #[arg(long)]
        a: PathBuf,
        /// Second spec file.
        #[arg(long)]
        b: PathBuf,
        /// Samples per curve when the specs do not pin a count.
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Also build the homeomorphism and check norm transport.
        #[arg(long = "build-map")]
        build_map: bool,
    },
    /// Validate or refine the polygonal mosaic of a PIC set.
    Mosaic {
        #[command(subcommand)]
        action: MosaicAction,
    },
    /// Split one polygon of the mosaic at a point of its curve.
    Partition {
        #[command(flatten)]
        set: SetArgs,
        /// Curve (and polygon) index.
        #[arg(long)]
        curve: usize,
        /// Arc-length fraction along the curve for the cut point.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
    },
    /// Everything at once: validation, constants, norms, lists, graph.
    Report {
        #[command(flatten)]
        set: SetArgs,
        /// Restrict the norm section to one function.
        #[arg(long = "fn")]
        function: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Write the bundled example spec files to a directory.
    Fixtures {
        /// Output directory.
        #[arg(long, default_value = "fixtures")]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum MosaicAction {
    /// Check the mosaic and curve/polygon pairing.
    Validate {
        #[command(flatten)]
        set: SetArgs,
    },
    /// Refine to a simple mosaic with projectable curves.
    Refine {
        #[command(flatten)]
        set: SetArgs,
        /// Write the refined set as a spec file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a subcommand: a report plus the decision it encodes.
struct Outcome {
    report: Value,
    negative: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(out) => {
            print_report(&out.report, cli.json);
            if out.negative {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load(set: &SetArgs) -> Result<LoadedSpec, picbv::Error> {
    let spec = read_spec_file(&set.set)?;
    load_spec(&spec, set.samples)
}

fn load_path(path: &Path, samples: usize) -> Result<LoadedSpec, picbv::Error> {
    let spec = read_spec_file(path)?;
    load_spec(&spec, samples)
}

fn budget(search: &SearchArgs) -> SearchBudget {
    SearchBudget {
        max_len: search.max_list_len,
        seed: search.seed,
        ..SearchBudget::default()
    }
}

fn run(cmd: &Command) -> Result<Outcome, picbv::Error> {
    match cmd {
        Command::Norm { set, function, search } => {
            let loaded = load(set)?;
            Ok(Outcome { report: norm_report(&loaded, function, &budget(search))?, negative: false })
        }
        Command::Vf { set, list } => {
            let loaded = load(set)?;
            let pl = loaded.lists.get(list).ok_or_else(|| {
                picbv::Error::SpecFile(format!("no list named {list:?} in {}", loaded.name))
            })?;
            let (vf, line) = vf_exact(pl);
            Ok(Outcome {
                report: json!({
                    "set": loaded.name,
                    "list": list,
                    "points": pl.len(),
                    "vf": vf,
                    "witness_line": { "u": [line.u.x, line.u.y], "v": [line.v.x, line.v.y] },
                }),
                negative: false,
            })
        }
        Command::Homeo { a, b, samples, build_map } => {
            let la = load_path(a, *samples)?;
            let lb = load_path(b, *samples)?;
            let ga = extract_graph(&la.picset)?;
            let gb = extract_graph(&lb.picset)?;
            let (homeo, _) = is_homeomorphic(&ga, &gb);
            let mut report = json!({
                "a": la.name,
                "b": lb.name,
                "a_graph": { "vertices": ga.vertices().len(), "edges": ga.edges().len() },
                "b_graph": { "vertices": gb.vertices().len(), "edges": gb.edges().len() },
                "homeomorphic": homeo,
            });
            if *build_map && homeo {
                let matched = match_subdivisions(&la.picset, &lb.picset)?;
                let hm = build_homeo(&matched)?;
                let f = PlaneFunction::poly(Poly2::new(vec![
                    (1, 0, Complex64::new(1.0, 0.0)),
                    (0, 1, Complex64::new(0.0, 1.0)),
                ]));
                let n = pic_norm(&f, &hm.matched.sigma)?;
                let residual = picbv::picnorm::transport_norm_check(&hm, &f)?;
                report["transport"] = json!({
                    "matched_curves": hm.matched.pairs.len(),
                    "test_function": "z = x + iy",
                    "pic_norm_sigma": n,
                    "residual": residual,
                });
            }
            Ok(Outcome { report, negative: !homeo })
        }
        Command::Mosaic { action } => match action {
            MosaicAction::Validate { set } => {
                let loaded = load(set)?;
                let report = validate(&loaded.picset);
                let ok = report.ok();
                Ok(Outcome {
                    report: json!({
                        "set": loaded.name,
                        "valid": ok,
                        "violations": report.violations,
                    }),
                    negative: !ok,
                })
            }
            MosaicAction::Refine { set, out } => {
                let loaded = load(set)?;
                let refined = refine_simple(&loaded.picset)?;
                let simple = is_simple_projectable(&refined)?;
                if let Some(path) = out {
                    let name = format!("{}_refined", loaded.name);
                    write_spec_file(&spec_of_picset(&name, &refined), path)?;
                }
                Ok(Outcome {
                    report: json!({
                        "set": loaded.name,
                        "curves_before": loaded.picset.curves().len(),
                        "curves_after": refined.curves().len(),
                        "simple_projectable": simple,
                        "written": out.as_ref().map(|p| p.display().to_string()),
                    }),
                    negative: false,
                })
            }
        },
        Command::Partition { set, curve, fraction } => {
            let loaded = load(set)?;
            let ps = &loaded.picset;
            let c = ps.curves().get(*curve).ok_or_else(|| {
                picbv::Error::SpecFile(format!("curve index {curve} out of range"))
            })?;
            if !(0.0 < *fraction && *fraction < 1.0) {
                return Err(picbv::Error::InvalidParameter(
                    "--fraction must be strictly between 0 and 1".into(),
                ));
            }
            // The cut point must be an interior grid sample of the curve.
            let want = c.point_at_arc_fraction(*fraction);
            let v = c.samples()[1..c.samples().len() - 1]
                .iter()
                .copied()
                .min_by(|a, b| a.dist(want).total_cmp(&b.dist(want)))
                .ok_or_else(|| picbv::Error::InvalidParameter("curve has no interior samples".into()))?;
            let poly = &ps.mosaic().polygons()[*curve];
            match partition_at(poly, c, v) {
                Ok((p1, p2)) => Ok(Outcome {
                    report: json!({
                        "set": loaded.name,
                        "curve": curve,
                        "cut_point": [v.x, v.y],
                        "pieces": [poly_json(&p1), poly_json(&p2)],
                        "area_gap": (poly.area() - p1.area() - p2.area()).abs(),
                    }),
                    negative: false,
                }),
                Err(picbv::Error::Partition(msg)) => Ok(Outcome {
                    report: json!({
                        "set": loaded.name,
                        "curve": curve,
                        "partitioned": false,
                        "reason": msg,
                    }),
                    negative: true,
                }),
                Err(e) => Err(e),
            }
        }
        Command::Report { set, function, search } => {
            let loaded = load(set)?;
            let ps = &loaded.picset;
            let v = validate(ps);
            let constants = equivalence_constants(ps)?;
            let mut norms = Vec::new();
            for (name, f) in &loaded.functions {
                if function.as_ref().is_some_and(|want| want != name) {
                    continue;
                }
                norms.push(norm_for(&loaded, name, f, &budget(search))?);
            }
            if let Some(want) = function {
                if !loaded.functions.contains_key(want) {
                    return Err(picbv::Error::SpecFile(format!(
                        "no function named {want:?} in {}",
                        loaded.name
                    )));
                }
            }
            let mut lists = Vec::new();
            for (name, pl) in &loaded.lists {
                let (vf, _) = vf_exact(pl);
                lists.push(json!({ "list": name, "points": pl.len(), "vf": vf }));
            }
            let g = extract_graph(ps)?;
            Ok(Outcome {
                report: json!({
                    "set": loaded.name,
                    "valid": v.ok(),
                    "violations": v.violations,
                    "curves": ps.curves().len(),
                    "polygons": ps.mosaic().len(),
                    "constants": {
                        "m": constants.m,
                        "s": constants.s,
                        "k_sigma": constants.k_sigma,
                        "upper_factor": constants.upper_factor,
                    },
                    "graph": {
                        "vertices": g.vertices().len(),
                        "edges": g.edges().len(),
                        "degree_sequence": g.degree_sequence(),
                    },
                    "norms": norms,
                    "lists": lists,
                }),
                negative: false,
            })
        }
        Command::Fixtures { out } => {
            std::fs::create_dir_all(out)
                .map_err(|e| picbv::Error::SpecFile(format!("{}: {e}", out.display())))?;
            let mut written = Vec::new();
            for spec in builtin_fixtures() {
                let path = out.join(format!("{}.json", spec.name));
                write_spec_file(&spec, &path)?;
                written.push(path.display().to_string());
            }
            Ok(Outcome { report: json!({ "written": written }), negative: false })
        }
    }
}

fn norm_report(loaded: &LoadedSpec, name: &str, budget: &SearchBudget) -> Result<Value, picbv::Error> {
    let f = loaded.functions.get(name).ok_or_else(|| {
        picbv::Error::SpecFile(format!("no function named {name:?} in {}", loaded.name))
    })?;
    norm_for(loaded, name, f, budget)
}

fn norm_for(
    loaded: &LoadedSpec,
    name: &str,
    f: &PlaneFunction,
    budget: &SearchBudget,
) -> Result<Value, picbv::Error> {
    let ps = &loaded.picset;
    let n = pic_norm(f, ps)?;
    let hints: Vec<_> = loaded.lists.values().cloned().collect();
    let bracket = bv_bracket_with_hints(f, ps, budget, &hints)?;
    let constants = equivalence_constants(ps)?;
    let per_curve: Vec<f64> =
        ps.curves().iter().map(|c| pvar(f, c)).collect::<Result<_, _>>()?;
    Ok(json!({
        "set": loaded.name,
        "function": name,
        "pic_norm": n,
        "pvar_per_curve": per_curve,
        "bv_lower": bracket.lower,
        "bv_upper": bracket.upper,
        "bv_upper_provenance": bracket.upper_provenance,
        "bv_witness": bracket
            .lower_witness
            .as_ref()
            .map(|w| w.points().iter().map(|p| vec![p.x, p.y]).collect::<Vec<_>>()),
        "k_sigma": constants.k_sigma,
        "m": constants.m,
        "s": constants.s,
    }))
}

fn poly_json(p: &picbv::ConvexPolygon) -> Value {
    json!(p.vertices().iter().map(|v| vec![v.x, v.y]).collect::<Vec<_>>())
}

/// Aligned-column text rendering of a JSON report; numbers keep their
/// round-trip-exact JSON form.
fn print_report(report: &Value, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(report).expect("report is serializable"));
        return;
    }
    let mut rows = Vec::new();
    flatten("", report, &mut rows);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, rows);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, rows);
            }
        }
        other => rows.push((prefix.to_string(), serde_json::to_string(other).expect("scalar"))),
    }
}
