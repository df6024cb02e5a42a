//! Command handlers. Each returns the text to emit.

use std::path::Path;
use std::sync::Arc;

use graph_wishart::bayes::{mle, posterior_update, summarize, GaussianSample};
use graph_wishart::cone::{complete, logdet_hat, phi, precision_of, IncompleteMatrix};
use graph_wishart::dist::{Family, Point, WishartSpec};
use graph_wishart::graph::{
    distinct_shape_orders, enumerate_perfect_orders, homogeneous_structure, DecomposableGraph, Homogeneity, NodeRole,
};
use graph_wishart::rng::RngStream;
use graph_wishart::shape::log_h;
use graph_wishart::verify::{
    a4_closed_form, check_factorization, check_mean_identity, log_gamma_reference, mc_normalizer, mellin_2x2, Kind,
    McEstimate,
};
use graph_wishart::Error;
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::formats::{
    self, dense_rows, load_incomplete, load_sparse, masked_rows, matrix_json, read_csv, read_json, shape_json,
    shape_labels, vertex_labels, GraphFile, MatrixFile, PriorFile, ShapeFile,
};
use crate::{BayesCmd, Cli, CliError, Command, ConeCmd, DistCmd, GraphCmd, KindArg, SpecArgs, VerifyCmd};

/// Perfect orders are enumerated up to this many cliques.
const ORDER_LIMIT: usize = 8;

/// Monte Carlo verdicts pass within this many standard errors.
const MC_Z: f64 = 3.0;

/// Verdict for the expectation identity, which takes a maximum over entries.
const MEAN_IDENTITY_Z: f64 = 4.0;

/// Verdict for deterministic identities.
const ALGEBRAIC_TOL: f64 = 1e-10;

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let seed = cli.seed;
    let value = match &cli.command {
        Command::Graph(GraphCmd::Analyze(a)) => graph_analyze(load_graph(&a.graph)?.as_ref())?,
        Command::Graph(GraphCmd::Hasse(a)) => graph_hasse(load_graph(&a.graph)?.as_ref())?,
        Command::Cone(ConeCmd::Complete(m)) => {
            let g = optional_graph(m.graph.as_deref())?;
            let x = load_incomplete(&read_json(&m.matrix)?, g.as_ref())?;
            let full = complete(&x)?;
            let kn = GraphFile { n: full.nrows(), edges: complete_edges(full.nrows()) };
            json!({ "completion": { "graph": kn, "matrix": dense_rows(&full) }, "logdet": logdet_hat(&x)? })
        }
        Command::Cone(ConeCmd::Phi { m, inverse }) => {
            let g = optional_graph(m.graph.as_deref())?;
            let file: MatrixFile = read_json(&m.matrix)?;
            if *inverse {
                let x = load_incomplete(&file, g.as_ref())?;
                let y = precision_of(&x)?;
                json!({ "map": "x -> inverse completion", "result": matrix_json(y.graph(), y.values()) })
            } else {
                let y = load_sparse(&file, g.as_ref())?;
                let x = phi(&y)?;
                json!({ "map": "y -> projected inverse", "result": matrix_json(x.graph(), x.values()) })
            }
        }
        Command::Dist(DistCmd::Logpdf { spec, matrix }) => {
            let s = build_spec(spec)?;
            let file: MatrixFile = read_json(matrix)?;
            let point = if s.family().on_qg() {
                Point::Q(load_incomplete(&file, Some(s.graph()))?)
            } else {
                Point::P(load_sparse(&file, Some(s.graph()))?)
            };
            json!({ "family": s.family().name(), "logpdf": s.logpdf(&point)?, "log_gamma": s.log_gamma() })
        }
        Command::Dist(DistCmd::Sample { spec, n }) => return dist_sample(&build_spec(spec)?, *n, seed),
        Command::Dist(DistCmd::Mean { spec }) => {
            let s = build_spec(spec)?;
            let m = s.mean()?;
            json!({ "family": s.family().name(), "mean": matrix_json(s.graph(), m.values()) })
        }
        Command::Bayes(BayesCmd::Fit { graph, data, prior, n, center }) => {
            bayes_fit(&load_graph(graph)?, data, prior, *n, *center, seed)?
        }
        Command::Verify(v) => verify(v, seed)?,
    };
    Ok(finish(value, seed))
}

fn finish(mut value: Value, seed: u64) -> String {
    value["seed"] = json!(seed);
    let mut text = formats::to_string(&value);
    text.push('\n');
    text
}

fn load_graph(path: &Path) -> Result<Arc<DecomposableGraph>, CliError> {
    read_json::<GraphFile>(path)?.build()
}

fn optional_graph(path: Option<&Path>) -> Result<Option<Arc<DecomposableGraph>>, CliError> {
    path.map(load_graph).transpose()
}

fn complete_edges(n: usize) -> Vec<[usize; 2]> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| [i, j])).collect()
}

fn set_label(vs: &[usize]) -> String {
    let inner: Vec<String> = vertex_labels(vs).iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn graph_analyze(g: &DecomposableGraph) -> Result<Value, CliError> {
    let ord = g.canonical();
    let k = ord.k();
    let cliques: Vec<Vec<usize>> = ord.cliques().iter().map(|c| vertex_labels(c)).collect();
    let separators: Vec<Vec<usize>> = (1..k).map(|j| vertex_labels(ord.separator(j))).collect();
    let distinct: Vec<Value> = ord
        .distinct_separators()
        .iter()
        .enumerate()
        .map(|(id, d)| {
            json!({
                "vertices": vertex_labels(&d.vertices),
                "multiplicity": d.multiplicity,
                "positions": ord.occurrences(id).iter().map(|j| j + 1).collect::<Vec<_>>(),
            })
        })
        .collect();
    let histories: Vec<Vec<usize>> = (0..k).map(|j| vertex_labels(&ord.history(j))).collect();
    let residuals: Vec<Vec<usize>> = (0..k).map(|j| vertex_labels(&ord.residual(j))).collect();
    let (orders, distinct_shapes) = match enumerate_perfect_orders(g, ORDER_LIMIT) {
        Ok(all) => {
            let ids: Vec<Vec<usize>> = all.iter().map(|o| o.clique_ids().iter().map(|c| c + 1).collect()).collect();
            (json!(ids), json!(distinct_shape_orders(&all).len()))
        }
        Err(Error::TooManyCliques { .. }) => (Value::Null, Value::Null),
        Err(e) => return Err(e.into()),
    };
    let (homogeneous, induced_path) = match homogeneous_structure(g)? {
        Homogeneity::Homogeneous(_) => (true, Value::Null),
        Homogeneity::NotHomogeneous { induced_path } => (false, json!(vertex_labels(&induced_path))),
    };
    Ok(json!({
        "graph": GraphFile::of(g),
        "cliques": cliques,
        "separators": separators,
        "distinct_separators": distinct,
        "histories": histories,
        "residuals": residuals,
        "perfect_orders": orders,
        "distinct_shape_orders": distinct_shapes,
        "homogeneous": homogeneous,
        "induced_path": induced_path,
        "shape_labels": shape_labels(g),
    }))
}

fn graph_hasse(g: &DecomposableGraph) -> Result<Value, CliError> {
    let tree = match homogeneous_structure(g)? {
        Homogeneity::Homogeneous(t) => t,
        Homogeneity::NotHomogeneous { induced_path } => {
            return Err(CliError::new(
                Error::HasseRequired.code(),
                "graph is not homogeneous; it has an induced path on four vertices",
                json!({ "induced_path": vertex_labels(&induced_path) }),
            ))
        }
    };
    let ord = g.canonical();
    let mut nu = serde_json::Map::new();
    let nodes: Vec<Value> = tree
        .nodes
        .iter()
        .enumerate()
        .map(|(u, node)| {
            let role = match node.role {
                NodeRole::Clique(c) => json!({ "clique": vertex_labels(ord.clique(c)) }),
                NodeRole::Separator { id, nu: m } => {
                    let sep = &ord.distinct_separators()[id].vertices;
                    nu.insert(set_label(sep), json!(m));
                    json!({ "separator": vertex_labels(sep), "nu": m })
                }
            };
            json!({
                "vertices": vertex_labels(&node.vertices),
                "parent": node.parent,
                "children": node.children,
                "weight": tree.weight(u),
                "m": tree.m(u),
                "role": role,
            })
        })
        .collect();
    Ok(json!({ "graph": GraphFile::of(g), "nodes": nodes, "nu": nu }))
}

fn family(name: &str) -> Result<Family, CliError> {
    Family::from_name(name)
        .ok_or_else(|| CliError::usage(format!("unknown family {name:?}; expected typeI, typeII, invTypeI or invTypeII")))
}

fn load_shape_scale(
    shape: &Path,
    scale: &Path,
    graph: Option<&Path>,
) -> Result<(graph_wishart::shape::ShapeParam, IncompleteMatrix), CliError> {
    let g = optional_graph(graph)?;
    let scale = load_incomplete(&read_json(scale)?, g.as_ref())?;
    let shape = read_json::<ShapeFile>(shape)?.build(scale.graph())?;
    Ok((shape, scale))
}

fn build_spec(a: &SpecArgs) -> Result<WishartSpec, CliError> {
    let fam = family(&a.family)?;
    let (shape, scale) = load_shape_scale(&a.shape, &a.scale, a.graph.as_deref())?;
    Ok(match a.order {
        Some(i) => {
            let orders = enumerate_perfect_orders(scale.graph(), ORDER_LIMIT)?;
            let count = orders.len();
            let ord = orders.into_iter().nth(i).ok_or_else(|| {
                CliError::new(
                    "IndexMismatch",
                    format!("order {i} is out of range; the graph has {count} perfect orders"),
                    json!({ "order": i, "count": count }),
                )
            })?;
            WishartSpec::with_order(fam, shape, scale, ord)?
        }
        None => WishartSpec::new(fam, shape, scale)?,
    })
}

fn dist_sample(spec: &WishartSpec, n: usize, seed: u64) -> Result<String, CliError> {
    let g = GraphFile::of(spec.graph());
    let mut out = String::new();
    for (i, p) in spec.sample(&RngStream::new(seed), n)?.iter().enumerate() {
        let line = json!({
            "seed": seed,
            "draw": i,
            "family": spec.family().name(),
            "graph": g,
            "matrix": masked_rows(spec.graph(), p.values()),
        });
        out.push_str(&formats::to_string(&line));
        out.push('\n');
    }
    Ok(out)
}

fn bayes_fit(
    g: &Arc<DecomposableGraph>,
    data: &Path,
    prior: &Path,
    draws: usize,
    center: bool,
    seed: u64,
) -> Result<Value, CliError> {
    let prior: PriorFile = read_json(prior)?;
    let scale = load_incomplete(&prior.scale, Some(g))?;
    let shape = prior.shape.build(g)?;
    let prior = WishartSpec::new(Family::InvTypeII, shape, scale)?;
    let sample = GaussianSample::from_rows(g.clone(), &read_csv(data)?, center)?;
    let mle = match mle(&sample) {
        Ok((sigma, _)) => matrix_json(g, sigma.values()),
        Err(_) => Value::Null,
    };
    let post = posterior_update(&prior, &sample)?;
    let summary = summarize(&post, draws, &RngStream::new(seed))?;
    let id = &summary.identity;
    Ok(json!({
        "n": sample.n(),
        "centered": center,
        "convention": summary.convention,
        "posterior": {
            "family": post.family().name(),
            "shape": shape_json(post.shape()),
            "scale": matrix_json(g, post.scale().values()),
        },
        "shape_labels": shape_labels(g),
        "scale_precision_mean": matrix_json(g, summary.scale_precision_mean.values()),
        "precision_mean": matrix_json(g, summary.precision_mean.values()),
        "sigma_mean": matrix_json(g, summary.sigma_mean.values()),
        "sigma_mean_se": matrix_json(g, &summary.sigma_mean_se),
        "sigma_mle": mle,
        "draws": summary.draws,
        "identity_check": {
            "max_residual": id.max_residual,
            "max_residual_se": id.max_residual_se,
            "max_z": id.max_z,
            "pass": id.max_z < MEAN_IDENTITY_Z,
        },
    }))
}

fn kind(k: KindArg) -> Kind {
    match k {
        KindArg::I => Kind::I,
        KindArg::II => Kind::II,
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::I => "I",
        Kind::II => "II",
    }
}

fn mc_json(e: &McEstimate) -> Value {
    json!({ "estimate": e.mean, "se": e.se, "n": e.n })
}

fn verify(cmd: &VerifyCmd, seed: u64) -> Result<Value, CliError> {
    let stream = RngStream::new(seed);
    Ok(match cmd {
        VerifyCmd::Normalizer { kind: k, shape, scale, graph, n, proposal } => {
            let k = kind(*k);
            let (s, scale) = load_shape_scale(shape, scale, graph.as_deref())?;
            let r = mc_normalizer(k, &s, &scale, *n, &stream, *proposal)?;
            let reference = log_gamma_reference(k, &s, scale.graph()).ok();
            let z = reference.map(|lg| r.ratio.z(lg.exp()));
            json!({
                "check": "normalizer",
                "kind": kind_name(k),
                "ratio": mc_json(&r.ratio),
                "log_estimate": r.ratio.mean.ln(),
                "proposal": { "kind": kind_name(r.proposal.kind), "param": r.proposal.param },
                "log_gamma_closed_form": reference,
                "z": z,
                "tolerance_se": MC_Z,
                "pass": z.map(|z| z < MC_Z),
            })
        }
        VerifyCmd::A4 { kind: k, shape, scale, graph } => {
            let k = kind(*k);
            let (s, scale) = load_shape_scale(shape, scale, graph.as_deref())?;
            let integral = a4_closed_form(k, &s, &scale)?;
            let ratio = integral - log_h(&s, &scale)?;
            let reference = log_gamma_reference(k, &s, scale.graph()).ok();
            let diff = reference.map(|lg| (ratio - lg).abs() / (1.0 + lg.abs()));
            json!({
                "check": "a4",
                "kind": kind_name(k),
                "log_integral": integral,
                "log_ratio": ratio,
                "log_gamma_closed_form": reference,
                "relative_difference": diff,
                "tolerance": ALGEBRAIC_TOL,
                "pass": diff.map(|d| d < ALGEBRAIC_TOL),
            })
        }
        VerifyCmd::Mellin { p, a1, a2, matrix, n } => {
            let c = dense_matrix(&read_json(matrix)?)?;
            let r = mellin_2x2(*p, *a1, *a2, &c, *n, &stream)?;
            let z = r.mc.z(r.closed_form);
            json!({
                "check": "mellin",
                "closed_form": r.closed_form,
                "mc": mc_json(&r.mc),
                "z": z,
                "tolerance_se": MC_Z,
                "pass": z < MC_Z,
            })
        }
        VerifyCmd::Factorization { family: f, shape, scale, graph, n } => {
            let fam = family(f)?;
            let (s, scale) = load_shape_scale(shape, scale, graph.as_deref())?;
            let spec = WishartSpec::new(fam, s, scale)?;
            let mut worst: f64 = 0.0;
            for p in spec.sample(&stream, *n)? {
                let x = p.as_q().ok_or_else(|| Error::OutOfDomain(format!("no block factorisation for {f}")))?;
                worst = worst.max(check_factorization(&spec, x)?);
            }
            json!({
                "check": "factorization",
                "family": fam.name(),
                "points": n,
                "max_residual": worst,
                "tolerance": ALGEBRAIC_TOL,
                "pass": worst < ALGEBRAIC_TOL,
            })
        }
        VerifyCmd::MeanIdentity { shape, scale, graph, n } => {
            let (s, scale) = load_shape_scale(shape, scale, graph.as_deref())?;
            let spec = WishartSpec::new(Family::TypeII, s, scale)?;
            let r = check_mean_identity(&spec, *n, &stream)?;
            let entries: Vec<Value> = r
                .entries
                .iter()
                .map(|e| json!({ "i": e.i + 1, "j": e.j + 1, "residual": e.residual, "se": e.se }))
                .collect();
            json!({
                "check": "mean_identity",
                "draws": n,
                "entries": entries,
                "max_residual": r.max_residual,
                "max_residual_se": r.max_residual_se,
                "max_z": r.max_z,
                "max_z_opposite_sign": r.max_z_flipped,
                "tolerance_se": MEAN_IDENTITY_Z,
                "pass": r.max_z < MEAN_IDENTITY_Z,
            })
        }
    })
}

/// A matrix file without nulls, as a dense matrix.
fn dense_matrix(m: &MatrixFile) -> Result<DMatrix<f64>, CliError> {
    let r = m.matrix.len();
    let mut out = DMatrix::zeros(r, r);
    for (i, row) in m.matrix.iter().enumerate() {
        if row.len() != r {
            return Err(Error::DimensionMismatch { expected: r, got: row.len() }.into());
        }
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = v.ok_or_else(|| Error::MalformedInput(format!("entry ({}, {}) is null", i + 1, j + 1)))?;
        }
    }
    Ok(out)
}
