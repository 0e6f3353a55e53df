//! `analyze` and its themed variants.

use std::fs;

use anyhow::Context;
use heatgraph::curvature::{
    bakry_emery_curvature, cd_check, curvature_sc_test, edge_curvatures, laplacian_comparison_check,
    sphere_curvatures, CurvatureReport, DecayReport, OllivierMethod,
};
use heatgraph::heat::{heat_loss_profile, HeatVerdict};
use heatgraph::metric::{
    combinatorial_volume_test, grigoryan_test, verify_intrinsic, volume_growth, CubicVolumeReport,
    GrigoryanReport, PseudoMetric, VolumeTable,
};
use heatgraph::numeric::fmt_sig;
use heatgraph::radial::{
    completeness_label, radial_heat_loss, radial_lambda_harmonic, radial_reduction, sc_series, Boundedness,
    RadialProfile,
};
use heatgraph::series::SeriesClass;
use heatgraph::{Error, VertexId, WeightedGraph};
use rayon::prelude::*;

use crate::report::Report;
use crate::{AnalyzeArgs, CurvatureScope, MethodArg, MetricArg};

/// Grid size for volume radii of non-combinatorial metrics.
const VOLUME_GRID: usize = 32;

enum Input {
    Graph {
        graph: WeightedGraph,
        root: VertexId,
        outer: Option<usize>,
    },
    Profile(RadialProfile),
}

fn pre(msg: impl Into<String>) -> anyhow::Error {
    Error::Precondition(msg.into()).into()
}

/// Value of a `# key value` comment line.
fn comment_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('#')?.trim();
        rest.strip_prefix(key)?.strip_prefix(' ').map(str::trim)
    })
}

fn load(args: &AnalyzeArgs) -> anyhow::Result<Input> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    if args.input.extension().is_some_and(|e| e == "profile") {
        return Ok(Input::Profile(RadialProfile::parse(&text)?));
    }
    let graph = WeightedGraph::parse(&text)?;
    if graph.is_empty() {
        return Err(pre("graph has no vertices"));
    }
    let root = match args.root.as_deref().or_else(|| comment_value(&text, "root")) {
        Some(name) => graph.vertex(name)?,
        None => VertexId(0),
    };
    let outer = match args.outer_radius {
        Some(r) => Some(r),
        None => comment_value(&text, "radius").and_then(|r| r.parse().ok()),
    };
    Ok(Input::Graph { graph, root, outer })
}

fn eccentricity(graph: &WeightedGraph, root: VertexId) -> usize {
    graph.bfs(root).into_iter().flatten().max().unwrap_or(0)
}

fn method(args: &AnalyzeArgs) -> OllivierMethod {
    match args.method {
        MethodArg::DualLp => OllivierMethod::DualLp,
        MethodArg::Cyclefree => OllivierMethod::CycleFree,
        MethodArg::Birthdeath => OllivierMethod::BirthDeath,
        MethodArg::Epsilon => OllivierMethod::Epsilon(args.eps),
    }
}

fn metric(graph: &WeightedGraph, kind: MetricArg) -> PseudoMetric {
    match kind {
        MetricArg::Combinatorial => PseudoMetric::combinatorial(graph),
        MetricArg::Sigma => PseudoMetric::sigma(graph),
        MetricArg::Sigma1 => PseudoMetric::sigma1(graph),
    }
}

/// `t=<time> R=<r1,r2,...>`, tokens separated by spaces or given separately.
fn parse_heatloss(tokens: &[String]) -> anyhow::Result<(f64, Option<Vec<usize>>)> {
    let mut t = None;
    let mut radii = None;
    for token in tokens.iter().flat_map(|s| s.split_whitespace()) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| pre(format!("--heatloss expects key=value, got `{token}`")))?;
        match key {
            "t" => {
                t = Some(
                    value
                        .parse::<f64>()
                        .map_err(|_| pre(format!("--heatloss: bad time `{value}`")))?,
                )
            }
            "R" => {
                let list = value
                    .split(',')
                    .map(|r| r.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| pre(format!("--heatloss: bad radius list `{value}`")))?;
                radii = Some(list);
            }
            _ => return Err(pre(format!("--heatloss: unknown key `{key}`"))),
        }
    }
    let t = t.ok_or_else(|| pre("--heatloss needs t=<time>"))?;
    Ok((t, radii))
}

fn decay_lines(report: &mut Report, decay: &DecayReport) {
    report.kv("curvature.log_decay.C", fmt_sig(decay.c));
    report.kv("curvature.log_decay.delta", fmt_sig(decay.delta));
    report.kv(
        "curvature.log_decay.verdict",
        format!("{} ({})", decay.verdict.label(), DecayReport::policy()),
    );
}

fn curvature_ops(
    args: &AnalyzeArgs,
    report: &mut Report,
    graph: &WeightedGraph,
    root: VertexId,
    outer: Option<usize>,
) -> anyhow::Result<()> {
    let Some(scope) = args.curvature else {
        return Ok(());
    };
    report.section("curvature");
    let mut table = CurvatureReport::default();
    if matches!(scope, CurvatureScope::All | CurvatureScope::Edges) {
        let m = method(args);
        let edges = edge_curvatures(graph, m, outer.map(|o| (root, o)))?;
        report.kv("curvature.edges", edges.len());
        report.kv("curvature.edge_method", m.name());
        if let Some(min) = edges.iter().map(|e| e.value).reduce(f64::min) {
            report.kv("curvature.edge_min", fmt_sig(min));
            report.kv("curvature.edge_max", fmt_sig(edges.iter().map(|e| e.value).fold(min, f64::max)));
        }
        report.kv("curvature.edges_boundary_contaminated", edges.iter().filter(|e| e.contaminated).count());
        table.push_edges(graph, &edges, m);
    }
    if matches!(scope, CurvatureScope::All | CurvatureScope::Vertices) {
        let vertices: Vec<VertexId> = graph.vertices().collect();
        let be = vertices
            .par_iter()
            .map(|&x| bakry_emery_curvature(graph, x))
            .collect::<heatgraph::Result<Vec<_>>>()?;
        for (&x, b) in vertices.iter().zip(&be) {
            table.push_vertex(graph, x, b);
        }
        if let Some(min) = be.iter().map(|b| b.kappa).reduce(f64::min) {
            report.kv("curvature.bakry_emery_min", fmt_sig(min));
        }
    }
    if matches!(scope, CurvatureScope::All | CurvatureScope::Spheres) {
        let radius = args.radius.unwrap_or_else(|| eccentricity(graph, root));
        let kappa = sphere_curvatures(graph, root, radius)?;
        report.kv("curvature.sphere_root", graph.name(root));
        report.kv("curvature.sphere_radius", radius);
        table.push_spheres(graph, root, &kappa, outer);
        if kappa.len() >= 11 {
            // drop radii whose neighbourhoods reach the truncation boundary
            let clean = match outer {
                Some(o) => &kappa[..kappa.len().min(o.saturating_sub(1))],
                None => &kappa[..],
            };
            if clean.len() >= 11 {
                let decay = curvature_sc_test(clean)?;
                decay_lines(report, &decay);
                table.decay = Some(decay);
            } else {
                report.kv("curvature.log_decay", "skipped (fewer than 10 uncontaminated radii)");
            }
        } else {
            report.kv("curvature.log_decay", "skipped (needs R >= 10)");
        }
    }
    report.table("curvature.csv", table.to_csv());
    Ok(())
}

fn graph_only_ops(
    args: &AnalyzeArgs,
    report: &mut Report,
    graph: &WeightedGraph,
    root: VertexId,
) -> anyhow::Result<()> {
    if let Some(k) = args.cd {
        report.section("cd");
        let vertices: Vec<VertexId> = graph.vertices().collect();
        let ok = vertices
            .par_iter()
            .map(|&x| cd_check(graph, x, k))
            .collect::<heatgraph::Result<Vec<bool>>>()?;
        let failing: Vec<&str> = vertices
            .iter()
            .zip(&ok)
            .filter(|(_, &o)| !o)
            .map(|(&x, _)| graph.name(x))
            .collect();
        report.kv("cd.K", fmt_sig(k));
        report.kv("cd.holds", failing.is_empty());
        report.kv("cd.failing_vertices", failing.len());
        if let Some(first) = failing.first() {
            report.kv("cd.first_failing", first);
        }
    }
    if let Some(radius) = args.comparison {
        report.section("comparison");
        let cmp = laplacian_comparison_check(graph, root, radius)?;
        report.kv("comparison.root", graph.name(root));
        report.kv("comparison.radius", radius);
        report.kv("comparison.holds", cmp.holds());
        report.kv("comparison.max_violation", fmt_sig(cmp.max_violation));
        match cmp.chain_equality {
            Some(eq) => report.kv("comparison.chain_equality", eq),
            None => report.kv("comparison.chain_equality", "n/a (not a chain rooted at the root)"),
        }
        let mut csv = String::from("vertex,radius_laplacian,bound\n");
        for &(x, lhs, rhs) in &cmp.rows {
            csv.push_str(&format!("{},{},{}\n", graph.name(x), fmt_sig(lhs), fmt_sig(rhs)));
        }
        report.table("comparison.csv", csv);
    }
    if args.intrinsic {
        report.section("intrinsic");
        let rho = metric(graph, args.metric);
        let rep = verify_intrinsic(graph, &rho)?;
        report.kv("intrinsic.metric", rho.describe());
        report.kv("intrinsic.intrinsic", rep.intrinsic());
        report.kv("intrinsic.min_slack", fmt_sig(rep.min_slack.1));
        report.kv("intrinsic.min_slack_vertex", graph.name(rep.min_slack.0));
        report.kv("intrinsic.adapted", rep.adapted());
        report.kv("intrinsic.min_adapted_slack", fmt_sig(rep.min_adapted_slack.1));
    }
    Ok(())
}

fn heat_ops(args: &AnalyzeArgs, report: &mut Report, input: &Input) -> anyhow::Result<()> {
    let Some(tokens) = &args.heatloss else {
        return Ok(());
    };
    let (t, radii) = parse_heatloss(tokens)?;
    report.section("heatloss");
    report.kv("heatloss.t", fmt_sig(t));
    match input {
        Input::Graph { graph, root, .. } => {
            let radii = radii.unwrap_or_else(|| vec![eccentricity(graph, *root)]);
            let prof = heat_loss_profile(graph, *root, t, &radii)?;
            report.kv("heatloss.center", graph.name(*root));
            report.kv("heatloss.last_defect", fmt_sig(prof.last_defect()));
            report.kv("heatloss.verdict", prof.verdict.describe());
            report.table("heatloss.csv", prof.to_csv());
        }
        Input::Profile(profile) => {
            let radii = radii.unwrap_or_else(|| vec![profile.radius().saturating_sub(1)]);
            if let Some(&r) = radii.iter().find(|&&r| r >= profile.radius()) {
                return Err(pre(format!(
                    "--heatloss R={r} needs sphere {} beyond the ball as killing boundary; the profile ends at radius {}",
                    r + 1,
                    profile.radius()
                )));
            }
            let defects = radii
                .iter()
                .map(|&r| radial_heat_loss(profile, t, r))
                .collect::<heatgraph::Result<Vec<f64>>>()?;
            let verdict = HeatVerdict::classify(&defects);
            report.kv("heatloss.center", "sphere 0");
            report.kv("heatloss.last_defect", fmt_sig(*defects.last().expect("nonempty")));
            report.kv("heatloss.verdict", verdict.describe());
            let mut csv = String::from("radius,defect\n");
            for (r, d) in radii.iter().zip(&defects) {
                csv.push_str(&format!("{r},{}\n", fmt_sig(*d)));
            }
            csv.push_str(&format!("# verdict: {}\n", verdict.describe()));
            report.table("heatloss.csv", csv);
        }
    }
    Ok(())
}

fn radial_ops(args: &AnalyzeArgs, report: &mut Report, input: &Input) -> anyhow::Result<()> {
    if !args.sc_series && args.lambda.is_none() {
        return Ok(());
    }
    let profile = match input {
        Input::Profile(p) => p.clone(),
        Input::Graph { graph, root, .. } => {
            let p = radial_reduction(graph, *root)?;
            report.section("radial");
            report.kv("radial.root", graph.name(*root));
            report.kv("radial.weakly_spherically_symmetric", true);
            report.kv("radial.radius", p.radius());
            report.table("radial.profile", p.to_text());
            p
        }
    };
    let radius = args.radius.unwrap_or(profile.radius()).min(profile.radius());
    if args.sc_series {
        report.section("sc_series");
        let series = sc_series(&profile, radius)?;
        report.block(&series.summary("sc_series"));
        report.kv(
            "sc_series.verdict",
            format!(
                "{} (series {}; {})",
                completeness_label(series.class),
                series.class.label(),
                SeriesClass::policy()
            ),
        );
        let mut csv = String::from("r,term,partial_sum\n");
        for (r, (t, s)) in series.terms.iter().zip(&series.partial_sums).enumerate() {
            csv.push_str(&format!("{r},{},{}\n", fmt_sig(*t), fmt_sig(*s)));
        }
        report.table("sc_series.csv", csv);
    }
    if let Some(lambda) = args.lambda {
        report.section("lambda_harmonic");
        let lh = radial_lambda_harmonic(&profile, lambda, radius)?;
        report.kv("lambda.lambda", fmt_sig(lambda));
        report.kv("lambda.radius", lh.values.len().saturating_sub(1));
        report.kv("lambda.truncated", lh.truncated);
        report.kv(
            "lambda.last_value",
            fmt_sig(lh.values.last().copied().unwrap_or(f64::NAN)),
        );
        report.kv(
            "lambda.verdict",
            format!("{} ({})", lh.verdict.label(), Boundedness::policy()),
        );
        report.kv("lambda.completeness", lh.completeness_label());
        if let Some(inc) = &lh.increments {
            report.block(&inc.summary("lambda.increments"));
        }
        let mut csv = String::from("r,v\n");
        for (r, v) in lh.values.iter().enumerate() {
            csv.push_str(&format!("{r},{}\n", fmt_sig(*v)));
        }
        report.table("lambda.csv", csv);
    }
    Ok(())
}

fn default_radii(graph: &WeightedGraph, root: VertexId, rho: &PseudoMetric, kind: MetricArg) -> anyhow::Result<Vec<f64>> {
    if kind == MetricArg::Combinatorial {
        return Ok((0..=eccentricity(graph, root)).map(|r| r as f64).collect());
    }
    let far = rho
        .distances_from(root)?
        .into_iter()
        .flatten()
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max);
    if far <= 0.0 {
        return Ok(vec![0.0]);
    }
    Ok((0..=VOLUME_GRID).map(|i| far * i as f64 / VOLUME_GRID as f64).collect())
}

fn volume_ops(args: &AnalyzeArgs, report: &mut Report, input: &Input) -> anyhow::Result<()> {
    if !(args.volume || args.grigoryan || args.cubic) {
        return Ok(());
    }
    report.section("volume");
    let table = match input {
        Input::Graph { graph, root, .. } => {
            let rho = metric(graph, args.metric);
            let radii = match &args.radii {
                Some(r) => r.clone(),
                None => default_radii(graph, *root, &rho, args.metric)?,
            };
            report.kv("volume.center", graph.name(*root));
            volume_growth(graph, *root, &rho, &radii)?
        }
        Input::Profile(profile) => {
            if args.metric != MetricArg::Combinatorial {
                return Err(pre("profiles only carry the combinatorial metric"));
            }
            report.kv("volume.center", "sphere 0");
            report.kv("volume.assumption", "profile input read with standard weights and counting measure");
            VolumeTable::from_profile(profile, true)
        }
    };
    report.kv("volume.metric", &table.metric);
    report.kv("volume.radii", table.radii.len());
    report.kv("volume.finite_ball_suspect", table.finite_ball_suspect);
    report.table("volume.csv", table.to_csv());
    if args.grigoryan {
        let g = grigoryan_test(&table)?;
        report.kv("grigoryan.partial_integral", fmt_sig(g.partial_integral));
        report.kv("grigoryan.beta", fmt_sig(g.beta));
        report.kv("grigoryan.adapted_statistic", fmt_sig(g.adapted_statistic));
        report.kv("grigoryan.detail", &g.detail);
        report.kv(
            "grigoryan.verdict",
            format!("{} ({})", g.verdict.label(), GrigoryanReport::policy()),
        );
    }
    if args.cubic {
        let c = combinatorial_volume_test(&table)?;
        report.kv("cubic.alpha", fmt_sig(c.alpha));
        report.kv("cubic.c_hat", fmt_sig(c.c_hat));
        report.kv("cubic.bound_holds", c.bound_holds);
        report.kv("cubic.detail", &c.detail);
        report.kv(
            "cubic.verdict",
            format!("{} ({})", c.verdict.label(), CubicVolumeReport::policy()),
        );
    }
    Ok(())
}

pub fn run(args: &AnalyzeArgs) -> anyhow::Result<()> {
    if !args.has_operation() {
        return Err(pre("no analysis requested"));
    }
    let input = load(args)?;
    let mut report = Report::default();
    let name = args
        .input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    report.kv("input", name);
    match &input {
        Input::Graph { graph, root, outer } => {
            report.kv("input.kind", "graph");
            report.kv("input.vertices", graph.len());
            report.kv("input.edges", graph.edge_count());
            report.kv("input.sha256", graph.canonical_hash());
            report.kv("input.root", graph.name(*root));
            if let Some(o) = outer {
                report.kv("input.outer_radius", o);
            }
        }
        Input::Profile(p) => {
            report.kv("input.kind", "profile");
            report.kv("input.radius", p.radius());
        }
    }
    if let Input::Graph { graph, root, outer } = &input {
        curvature_ops(args, &mut report, graph, *root, *outer)?;
        graph_only_ops(args, &mut report, graph, *root)?;
    } else if args.curvature.is_some() || args.cd.is_some() || args.comparison.is_some() || args.intrinsic {
        return Err(pre("curvature, CD, comparison and intrinsic checks need a graph input"));
    }
    radial_ops(args, &mut report, &input)?;
    heat_ops(args, &mut report, &input)?;
    volume_ops(args, &mut report, &input)?;
    for path in report.write(&args.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
