use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use bilzh_core::cliques::{classify_max_clique, rebuild, verify_ekr, CliqueForm, FamilyFile, FormTag};
use bilzh_core::codes::{
    clique_cover_complement, color_graph, independent_set_from_code, verify_distance, CodeFile, RankCode, PAIR_BUDGET,
};
use bilzh_core::graph::{
    check_connectivity, check_vertex_transitivity, exact_numbers, materialize, sandwich_for, ConnectivityReport, GraphSpec,
    RankTable, SandwichReport, TransitivityReport, EXACT_BUDGET, TABLE_BUDGET, VERTEX_BUDGET,
};
use bilzh_core::matrix::{random_invertible_with, random_matrix, seeded_rng, Mat, MatrixJson};
use bilzh_core::oracle::{
    exact_clique, exact_mis, inner_rank_by_factorization, omega_via_minors, orbit_by_group_action, SimpleGraph,
    EXACT_VERTEX_BUDGET, FACTORIZATION_BUDGET,
};
use bilzh_core::orbits::{
    census_by_enumeration, enumerate_orbit_labels, expected_label_count, verify_orbit_product, CENSUS_BUDGET,
};
use bilzh_core::ring::Ring;
use bilzh_core::selftest;
use bilzh_core::smith::{inner_rank, rank_via_projections, snf, InvariantFactorArray};

use crate::output::{render, table, CmdResult, Failure};
use crate::{Cli, Command, Format, GraphArgs, MatrixArgs, OracleCommand};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("cannot parse {}: {e}", path.display())))
}

fn read_matrix(path: &Path, h: u64) -> Result<Mat, Failure> {
    let j: MatrixJson = read_json(path)?;
    if j.h != h {
        return Err(Failure::usage(format!("{} is over Z_{}, not Z_{h}", path.display(), j.h)));
    }
    Ok(Mat::try_from(j)?)
}

fn write_or_return(text: String, out: Option<&Path>) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn graph_spec(g: &GraphArgs) -> Result<GraphSpec, Failure> {
    Ok(GraphSpec::from_h(g.h, g.m, g.n, g.r)?)
}

fn read_family(path: &Path, spec: &GraphSpec) -> Result<Vec<Mat>, Failure> {
    let f: FamilyFile = read_json(path)?;
    if (f.h, f.m, f.n) != (spec.h(), spec.m(), spec.n()) {
        return Err(Failure::usage(format!(
            "family is {}x{} over Z_{}, expected {}x{} over Z_{}",
            f.m,
            f.n,
            f.h,
            spec.m(),
            spec.n(),
            spec.h()
        )));
    }
    Ok(f.members)
}

fn seed(cli: &Cli) -> u64 {
    cli.seed.unwrap_or_else(|| {
        eprintln!("notice: no --seed given, using seed 0");
        0
    })
}

pub fn run(cli: &Cli) -> CmdResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Snf(args) => snf_cmd(args, fmt),
        Command::Rank(args) => rank_cmd(args, fmt),
        Command::Orbits { h, m, n, verify_product } => {
            orbits_cmd(*h, *m, *n, *verify_product, cli.budget.unwrap_or(CENSUS_BUDGET), fmt)
        }
        Command::GraphStats { graph, exact, connectivity, transitivity_samples } => {
            graph_stats(cli, graph, *exact, *connectivity, *transitivity_samples)
        }
        Command::BuildClique { graph, alpha, s, t, b0, random, out } => {
            build_clique(cli, graph, alpha, [s.as_deref(), t.as_deref(), b0.as_deref()], *random, out.as_deref())
        }
        Command::ClassifyClique { graph, family } => {
            let spec = graph_spec(graph)?;
            let form = classify_max_clique(&spec, &read_family(family, &spec)?)?;
            Ok(render(&form, fmt))
        }
        Command::VerifyEkr { graph, family } => {
            let spec = graph_spec(graph)?;
            let rep = verify_ekr(&spec, &read_family(family, &spec)?)?;
            let text = render(&rep, fmt);
            if rep.within_bound {
                Ok(text)
            } else {
                Err(Failure::verification("intersecting family exceeds h^{nr}", text))
            }
        }
        Command::BuildMrd { graph, out } => {
            let spec = graph_spec(graph)?;
            let code = independent_set_from_code(&spec)?;
            let d = verify_distance(spec.ring(), &code, cli.budget.unwrap_or(PAIR_BUDGET))?;
            let file = CodeFile {
                h: code.h,
                m: code.m,
                n: code.n,
                size: code.len(),
                verified_min_distance: d,
                linear: code.linear,
                members: code.members,
            };
            write_or_return(render(&file, Format::Json), out.as_deref())
        }
        Command::VerifyCode { family, d } => verify_code(family, *d, cli.budget.unwrap_or(PAIR_BUDGET), fmt),
        Command::Color { graph, complement } => color(graph, *complement, cli.budget.unwrap_or(VERTEX_BUDGET), fmt),
        Command::CoverComplement { graph } => {
            let spec = graph_spec(graph)?;
            let cover = clique_cover_complement(&spec, cli.budget.unwrap_or(VERTEX_BUDGET))?;
            let text = render(&cover, fmt);
            if cover.holds() {
                Ok(text)
            } else {
                Err(Failure::verification("translates do not partition the vertices into cliques", text))
            }
        }
        Command::Oracle { command } => oracle(command, cli.budget, fmt),
        Command::Selftest { level, criterion } => selftest_cmd(level, *criterion, fmt),
    }
}

#[derive(Serialize)]
struct SnfOut {
    h: u64,
    omega: InvariantFactorArray,
    label: String,
    inner_rank: usize,
    s: Mat,
    d: Mat,
    t: Mat,
}

fn snf_cmd(args: &MatrixArgs, fmt: Format) -> CmdResult {
    let ring = Ring::new(args.h)?;
    let a = read_matrix(&args.matrix, args.h)?;
    let f = snf(&ring, &a)?;
    let out = SnfOut {
        h: args.h,
        label: f.omega.label(),
        inner_rank: f.omega.inner_rank(&ring),
        omega: f.omega,
        s: f.s,
        d: f.d,
        t: f.t,
    };
    Ok(match fmt {
        Format::Json => render(&out, fmt),
        Format::Csv => table(&["omega_label", "inner_rank"], &[vec![out.label, out.inner_rank.to_string()]]),
    })
}

#[derive(Serialize)]
struct RankOut {
    inner_rank: usize,
    via_pi: usize,
    via_theta: usize,
}

fn rank_cmd(args: &MatrixArgs, fmt: Format) -> CmdResult {
    let ring = Ring::new(args.h)?;
    let a = read_matrix(&args.matrix, args.h)?;
    let (via_pi, via_theta) = rank_via_projections(&ring, &a)?;
    Ok(render(
        &RankOut {
            inner_rank: inner_rank(&ring, &a)?,
            via_pi,
            via_theta,
        },
        fmt,
    ))
}

#[derive(Serialize)]
struct OrbitSummary {
    label_count: usize,
    expected_label_count: u64,
    total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    product_holds: Option<bool>,
}

#[derive(Serialize)]
struct OrbitRow {
    omega_label: String,
    length: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_lengths: Option<Vec<u64>>,
}

#[derive(Serialize)]
struct OrbitsOut {
    orbits: Vec<OrbitRow>,
    summary: OrbitSummary,
}

fn orbits_cmd(h: u64, m: usize, n: usize, verify_product: bool, budget: u64, fmt: Format) -> CmdResult {
    let ring = Ring::new(h)?;
    let census = census_by_enumeration(&ring, m, n, budget)?;
    let product = verify_product
        .then(|| verify_orbit_product(&ring, m, n, budget))
        .transpose()?;
    let orbits: Vec<OrbitRow> = census
        .entries
        .iter()
        .enumerate()
        .map(|(k, e)| OrbitRow {
            omega_label: e.label.label(),
            length: e.length,
            local_lengths: product.as_ref().map(|p| p.rows[k].local_lengths.clone()),
        })
        .collect();
    let summary = OrbitSummary {
        label_count: census.entries.len(),
        expected_label_count: expected_label_count(&ring, m, n),
        total: census.total,
        product_holds: product.as_ref().map(|p| p.holds),
    };
    let labels_ok = census.entries.len() == enumerate_orbit_labels(&ring, m, n).len();
    let text = match fmt {
        Format::Json => render(&OrbitsOut { orbits, summary }, fmt),
        Format::Csv => {
            let rows: Vec<Vec<String>> = orbits
                .iter()
                .map(|o| vec![o.omega_label.clone(), o.length.to_string()])
                .collect();
            format!(
                "{}{}\n",
                table(&["omega_label", "length"], &rows),
                serde_json::to_string(&summary).unwrap()
            )
        }
    };
    if !labels_ok || product.as_ref().is_some_and(|p| !p.holds) {
        return Err(Failure::verification("orbit census check failed", text));
    }
    Ok(text)
}

#[derive(Serialize)]
struct Certificates {
    sandwich: SandwichReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring_colors: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coloring_proper: Option<bool>,
}

#[derive(Serialize)]
struct GraphStats {
    vertices: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    clique_number_formula: Option<u64>,
    independence_number_formula: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    connectivity: Option<ConnectivityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transitivity: Option<TransitivityReport>,
    chi_certificates: Certificates,
}

fn graph_stats(cli: &Cli, g: &GraphArgs, exact: bool, connectivity: bool, samples: Option<usize>) -> CmdResult {
    let spec = graph_spec(g)?;
    let vertices = spec.vertex_count();
    let within = |budget: u64| vertices.is_some_and(|v| v <= budget);
    let degree = if within(TABLE_BUDGET) {
        Some(RankTable::new(&spec, TABLE_BUDGET)?.connection_set().len())
    } else {
        None
    };
    let (omega, alpha) = if exact {
        let ex = exact_numbers(&spec, cli.budget.unwrap_or(EXACT_BUDGET))?;
        (Some(ex.omega), Some(ex.alpha))
    } else {
        (None, None)
    };
    let connectivity = connectivity
        .then(|| check_connectivity(&spec, cli.budget.unwrap_or(TABLE_BUDGET)))
        .transpose()?;
    let transitivity = match samples {
        Some(k) => Some(check_vertex_transitivity(&spec, k, seed(cli))?),
        None => None,
    };
    let coloring = if within(cli.budget.unwrap_or(VERTEX_BUDGET)) {
        Some(color_graph(&spec, cli.budget.unwrap_or(VERTEX_BUDGET))?)
    } else {
        None
    };
    let stats = GraphStats {
        vertices,
        degree,
        clique_number_formula: spec.clique_size(),
        independence_number_formula: spec.independent_size(),
        omega,
        alpha,
        connectivity,
        transitivity,
        chi_certificates: Certificates {
            sandwich: sandwich_for(&spec)?,
            coloring_colors: coloring.as_ref().map(|c| c.color_count),
            coloring_proper: coloring.as_ref().map(|c| c.proper),
        },
    };
    let failed = stats.omega.is_some_and(|w| Some(w as u64) != spec.clique_size())
        || stats.alpha.is_some_and(|a| Some(a as u64) != spec.independent_size())
        || stats.connectivity.as_ref().is_some_and(|c| !c.connected)
        || stats.transitivity.as_ref().is_some_and(|t| !t.holds())
        || stats.chi_certificates.coloring_proper == Some(false);
    let text = render(&stats, cli.format);
    if failed {
        Err(Failure::verification("a graph check failed", text))
    } else {
        Ok(text)
    }
}

fn build_clique(
    cli: &Cli,
    g: &GraphArgs,
    alpha: &[u32],
    files: [Option<&Path>; 3],
    random: bool,
    out: Option<&Path>,
) -> CmdResult {
    let spec = graph_spec(g)?;
    let ring = spec.ring();
    let alpha = if alpha.is_empty() { vec![0; ring.t()] } else { alpha.to_vec() };
    let row = alpha.iter().all(|&a| a == 0);
    let col = alpha.iter().zip(ring.components()).all(|(&a, pp)| a == pp.s);
    let [s_file, t_file, b0_file] = files;
    let (s, t, b0) = if random {
        let mut rng = seeded_rng(seed(cli));
        (
            (!col).then(|| random_invertible_with(ring, spec.m(), &mut rng)),
            (!row).then(|| random_invertible_with(ring, spec.n(), &mut rng)),
            random_matrix(ring, spec.m(), spec.n(), &mut rng),
        )
    } else {
        (
            s_file.map(|p| read_matrix(p, g.h)).transpose()?,
            t_file.map(|p| read_matrix(p, g.h)).transpose()?,
            b0_file
                .map(|p| read_matrix(p, g.h))
                .transpose()?
                .unwrap_or_else(|| Mat::zeros(g.h, g.m, g.n)),
        )
    };
    for (m, k) in [(&s, g.m), (&t, g.n)] {
        if let Some(m) = m {
            if !bilzh_core::matrix::is_invertible(ring, m)? || m.rows() != k {
                return Err(Failure::usage(format!("S and T must be invertible of sizes {} and {}", g.m, g.n)));
            }
        }
    }
    let form = CliqueForm {
        tag: if row {
            FormTag::RowForm
        } else if col {
            FormTag::ColForm
        } else {
            FormTag::MixedForm
        },
        s,
        t,
        alpha,
        b0,
    };
    let members = rebuild(&spec, &form)?;
    let file = FamilyFile {
        h: g.h,
        m: g.m,
        n: g.n,
        members,
    };
    write_or_return(render(&file, Format::Json), out)
}

#[derive(Serialize)]
struct CodeCheck {
    size: usize,
    min_distance: Option<usize>,
    required: usize,
    meets: bool,
}

fn verify_code(path: &Path, d: usize, budget: u64, fmt: Format) -> CmdResult {
    let f: FamilyFile = read_json(path)?;
    let ring = Ring::new(f.h)?;
    let code = RankCode::from_members(f.h, f.m, f.n, f.members, d)?;
    let min = verify_distance(&ring, &code, budget)?;
    let out = CodeCheck {
        size: code.len(),
        min_distance: min,
        required: d,
        meets: min.is_none_or(|m| m >= d),
    };
    let text = render(&out, fmt);
    if out.meets {
        Ok(text)
    } else {
        Err(Failure::verification(format!("minimum distance below {d}"), text))
    }
}

#[derive(Serialize)]
struct ColorOut {
    vertices: usize,
    colors: usize,
    proper: bool,
}

fn color(g: &GraphArgs, complement: bool, budget: u64, fmt: Format) -> CmdResult {
    let spec = graph_spec(g)?;
    let out = if complement {
        let cover = clique_cover_complement(&spec, budget)?;
        ColorOut {
            vertices: cover.parts.iter().map(Vec::len).sum(),
            colors: cover.parts.len(),
            proper: cover.holds(),
        }
    } else {
        let c = color_graph(&spec, budget)?;
        ColorOut {
            vertices: c.colors.len(),
            colors: c.color_count,
            proper: c.proper,
        }
    };
    let text = render(&out, fmt);
    if out.proper {
        Ok(text)
    } else {
        Err(Failure::verification("coloring is not proper", text))
    }
}

#[derive(Serialize)]
struct OracleCliqueOut {
    omega: usize,
    alpha: usize,
    max_clique: Vec<usize>,
    max_independent_set: Vec<usize>,
}

fn oracle(cmd: &OracleCommand, budget: Option<u64>, fmt: Format) -> CmdResult {
    match cmd {
        OracleCommand::Minors(args) => {
            let ring = Ring::new(args.h)?;
            let omega = omega_via_minors(&ring, &read_matrix(&args.matrix, args.h)?)?;
            Ok(render(&serde_json::json!({ "omega": omega, "label": omega.label() }), fmt))
        }
        OracleCommand::Rank(args) => {
            let a = read_matrix(&args.matrix, args.h)?;
            let r = inner_rank_by_factorization(&a, budget.map_or(FACTORIZATION_BUDGET, u128::from))?;
            Ok(render(&serde_json::json!({ "inner_rank": r }), fmt))
        }
        OracleCommand::Orbit(args) => {
            let a = read_matrix(&args.matrix, args.h)?;
            let orbit = orbit_by_group_action(&a, budget.map_or(1 << 16, u128::from))?;
            Ok(render(&serde_json::json!({ "orbit_size": orbit.len() }), fmt))
        }
        OracleCommand::Clique(g) => {
            let spec = graph_spec(g)?;
            let cap = budget.unwrap_or(EXACT_VERTEX_BUDGET as u64);
            let graph = materialize(&spec, cap)?;
            let simple = SimpleGraph::from_fn(graph.vertex_count(), |u, v| graph.rows()[u].contains(v));
            let clique = exact_clique(&simple, cap as usize)?;
            let mis = exact_mis(&simple, cap as usize)?;
            Ok(render(
                &OracleCliqueOut {
                    omega: clique.len(),
                    alpha: mis.len(),
                    max_clique: clique,
                    max_independent_set: mis,
                },
                fmt,
            ))
        }
    }
}

fn selftest_cmd(level: &str, criterion: Option<u8>, fmt: Format) -> CmdResult {
    if level != "desk" {
        return Err(Failure::usage(format!("unknown level {level:?}; only \"desk\" is available")));
    }
    let outcomes = match criterion {
        Some(id) if (1..=10).contains(&id) => vec![selftest::run(id)],
        Some(id) => return Err(Failure::usage(format!("no criterion {id}"))),
        None => selftest::run_all(),
    };
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let text = match fmt {
        Format::Json => render(&outcomes, fmt),
        Format::Csv => table(
            &["id", "name", "passed", "detail"],
            &outcomes
                .iter()
                .map(|o| vec![o.id.to_string(), o.name.to_string(), o.passed.to_string(), o.detail.clone()])
                .collect::<Vec<_>>(),
        ),
    };
    if failed == 0 {
        Ok(text)
    } else {
        Err(Failure::verification(format!("{failed} criteria failed"), text))
    }
}
