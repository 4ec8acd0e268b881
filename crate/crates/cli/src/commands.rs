use std::collections::BTreeMap;
use std::fmt::Write;

use hyperell::analytic::{
    bost_integral, j_norm, log_petersson_delta_norm, t_from_delta, t_invariant,
    theta as theta_value, theta_gradient, theta_norm,
};
use hyperell::arith::{display_rational, rat};
use hyperell::cluster::{build_tree, compute_e, path_phi_sum, residual_divisor};
use hyperell::fiber::{
    node_count, ord_xi, phi_divisor, phi_self_intersection, sum_phi_squares, verify_local_identity,
};
use hyperell::height::{bost_bound, deg_lambda, faltings_lower_bound, slope_constant};
use hyperell::hyperelliptic::{ord_lambda, CurvePoint};
use hyperell::schema::*;
use hyperell::{Error, Result};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::Format;

const SYMMETRY_EPS: f64 = 1e-10;

pub struct Options {
    pub format: Format,
    pub tol: f64,
    pub seed: u64,
    pub override_assumptions: bool,
}

pub fn check_version(text: &str) -> Result<()> {
    let v: serde_json::Value = parse_json(text)?;
    match v.get("schema_version") {
        None => Ok(()),
        Some(s) if s.as_u64() == Some(SCHEMA_VERSION as u64) => Ok(()),
        Some(s) => Err(Error::Parse(format!(
            "input has schema_version {s}, expected {SCHEMA_VERSION}"
        ))),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Internal(e.to_string()))
}

fn emit<T: Serialize>(opts: &Options, value: &T, text: impl FnOnce() -> String) -> Result<String> {
    match opts.format {
        Format::Json => json(value),
        Format::Text => Ok(text()),
        Format::Dot => Err(Error::Parse(
            "dot output is only available for `tree`".into(),
        )),
    }
}

fn warn_assumptions(a: &AssumptionJson) {
    for m in &a.messages {
        eprintln!("warning: {m}");
    }
}

fn assumption_lines(out: &mut String, a: &AssumptionJson) {
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    writeln!(
        out,
        "assumptions: evenness {}, residues {}, odd residue characteristic {}",
        flag(a.evenness_ok),
        flag(a.residues_ok),
        flag(a.odd_residue_char)
    )
    .unwrap();
    for m in &a.messages {
        writeln!(out, "  {m}").unwrap();
    }
}

pub fn tree(text: &str, opts: &Options) -> Result<String> {
    let config = parse_json::<RootConfigJson>(text)?.to_config()?;
    let tree = build_tree(&config)?;
    let e = compute_e(&tree)?;
    let assumptions = AssumptionJson::from(&tree.report);
    warn_assumptions(&assumptions);
    if opts.format == Format::Dot {
        return Ok(tree.to_dot());
    }
    let vertices = tree
        .vertices
        .iter()
        .map(|v| {
            Ok(VertexJson {
                name: v.name(),
                level: v.level,
                phi: v.phi(),
                parity: v.parity(),
                members: v.members.clone(),
                parent: v.parent.map(|p| format!("V{p}")),
                path_phi_sum: path_phi_sum(&tree, v.id)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = TreeOutput {
        schema_version: SCHEMA_VERSION,
        command: "tree".into(),
        g: config.g,
        p: config.p,
        vertices,
        e: e.clone().into(),
        assumptions,
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(s, "cluster tree: g = {}, p = {}", out.g, out.p).unwrap();
        writeln!(
            s,
            "{:<8}{:>6}{:>6}{:>4}  {:<8}{:>10}  members",
            "vertex", "level", "phi", "C", "parent", "path-phi"
        )
        .unwrap();
        for v in &out.vertices {
            let members: Vec<String> = v.members.iter().map(usize::to_string).collect();
            writeln!(
                s,
                "{:<8}{:>6}{:>6}{:>4}  {:<8}{:>10}  {}",
                v.name,
                v.level,
                v.phi,
                v.parity,
                v.parent.as_deref().unwrap_or("-"),
                v.path_phi_sum,
                members.join(" ")
            )
            .unwrap();
        }
        writeln!(s, "e = {}", display_rational(&e)).unwrap();
        assumption_lines(&mut s, &out.assumptions);
        s
    })
}

pub fn residual(text: &str, opts: &Options) -> Result<String> {
    let config = parse_json::<RootConfigJson>(text)?.to_config()?;
    let tree = build_tree(&config)?;
    let assumptions = AssumptionJson::from(&tree.report);
    warn_assumptions(&assumptions);
    let mult = residual_divisor(&tree, opts.override_assumptions)?;
    let e = compute_e(&tree)?;
    let ord = ord_lambda(&config, &tree)?;
    let multiplicities: BTreeMap<String, Rat> = mult
        .into_iter()
        .map(|(id, m)| (format!("V{id}"), m.into()))
        .collect();
    let out = ResidualOutput {
        schema_version: SCHEMA_VERSION,
        command: "residual".into(),
        e: e.into(),
        multiplicities,
        ord_lambda: ord,
        assumptions,
        overridden: opts.override_assumptions && !tree.report.all_ok(),
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(s, "e = {}", display_rational(&out.e.0)).unwrap();
        writeln!(s, "ord Lambda = {}", out.ord_lambda).unwrap();
        writeln!(s, "residual divisor:").unwrap();
        for (v, m) in &out.multiplicities {
            writeln!(s, "  {:<6}{:>8}", v, display_rational(&m.0)).unwrap();
        }
        assumption_lines(&mut s, &out.assumptions);
        if out.overridden {
            writeln!(s, "assumptions overridden").unwrap();
        }
        s
    })
}

fn divisor_map(d: &hyperell::fiber::VerticalQDivisor) -> BTreeMap<String, Rat> {
    d.to_map().into_iter().map(|(k, v)| (k, v.into())).collect()
}

pub fn phi(text: &str, opts: &Options) -> Result<String> {
    let fiber: FiberJson = parse_json(text)?;
    let (graph, sections) = fiber.to_graph()?;
    let e = fiber.residual_divisor(&graph)?;
    let rows = sections
        .iter()
        .map(|p| {
            let d = phi_divisor(&graph, p)?;
            Ok(SectionPhiJson {
                name: p.name.clone(),
                meets: p.meets.clone(),
                phi: divisor_map(&d),
                phi_display: d.to_string(),
                self_intersection: phi_self_intersection(&graph, p)?.into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let omega_degrees = graph
        .components
        .iter()
        .zip(graph.omega_degrees())
        .map(|(c, &w)| (c.name.clone(), w))
        .collect();
    let out = PhiOutput {
        schema_version: SCHEMA_VERSION,
        command: "phi".into(),
        sections: rows,
        sum_phi_sq: sum_phi_squares(&graph, &sections)?.into(),
        node_count: node_count(&graph),
        omega_degrees,
        e_omega_degree: hyperell::fiber::omega_degree(&graph, &e)?.into(),
        ord_xi: match fiber.residual {
            Some(_) => Some(ord_xi(&graph, &sections, &e)?.into()),
            None => None,
        },
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(
            s,
            "{:<8}{:<8}{:<16}{:>8}",
            "section", "meets", "Phi", "Phi^2"
        )
        .unwrap();
        for r in &out.sections {
            writeln!(
                s,
                "{:<8}{:<8}{:<16}{:>8}",
                r.name,
                r.meets,
                r.phi_display,
                display_rational(&r.self_intersection.0)
            )
            .unwrap();
        }
        writeln!(s, "sum Phi^2 = {}", display_rational(&out.sum_phi_sq.0)).unwrap();
        writeln!(s, "nodes (ord Delta) = {}", out.node_count).unwrap();
        let degs: Vec<String> = out
            .omega_degrees
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        writeln!(s, "omega degrees: {}", degs.join(" ")).unwrap();
        writeln!(
            s,
            "deg omega|E = {}",
            display_rational(&out.e_omega_degree.0)
        )
        .unwrap();
        if let Some(x) = &out.ord_xi {
            writeln!(s, "ord xi = {}", display_rational(&x.0)).unwrap();
        }
        s
    })
}

pub fn verify_local(text: &str, ord_override: Option<i64>, opts: &Options) -> Result<String> {
    let fiber: FiberJson = parse_json(text)?;
    let ord = ord_override.or(fiber.ord_lambda).ok_or_else(|| {
        Error::Parse("ord Lambda missing: pass --ord-lambda or set \"ord_lambda\"".into())
    })?;
    let (graph, sections) = fiber.to_graph()?;
    let e = fiber.residual_divisor(&graph)?;
    let id = verify_local_identity(&graph, &sections, &e, ord)?;
    let out = VerifyOutput {
        schema_version: SCHEMA_VERSION,
        command: "verify-local".into(),
        g: graph.g,
        ord_lambda: ord,
        holds: id.holds(),
        sum_phi_sq: id.sum_phi_sq.into(),
        ord_delta: id.ord_delta,
        e_omega_degree: id.e_omega_degree.into(),
        lhs: id.lhs.into(),
        rhs: id.rhs.into(),
        residual: id.residual.into(),
    };
    emit(opts, &out, || {
        let g = out.g as i64;
        let d = display_rational;
        let mut s = String::new();
        writeln!(s, "ord Lambda = {}", out.ord_lambda).unwrap();
        writeln!(s, "sum Phi^2 = {}", d(&out.sum_phi_sq.0)).unwrap();
        writeln!(s, "ord Delta = {}", out.ord_delta).unwrap();
        writeln!(s, "deg omega|E = {}", d(&out.e_omega_degree.0)).unwrap();
        writeln!(
            s,
            "lhs = {}*{} = {}",
            3 * g - 1,
            out.ord_lambda,
            d(&out.lhs.0)
        )
        .unwrap();
        writeln!(
            s,
            "rhs = {} + {}*{} + 4*{} = {}",
            d(&(-&out.sum_phi_sq.0 / rat(2))),
            (2 * g - 1) * (g + 1),
            out.ord_delta,
            d(&out.e_omega_degree.0),
            d(&out.rhs.0)
        )
        .unwrap();
        writeln!(s, "residual = {}", d(&out.residual.0)).unwrap();
        writeln!(s, "identity {}", if out.holds { "holds" } else { "FAILS" }).unwrap();
        s
    })
}

fn point_name(p: &CurvePoint) -> String {
    match p {
        CurvePoint::Finite(x) => display_rational(x),
        CurvePoint::Infinity => "inf".into(),
    }
}

pub fn wronskian(text: &str, opts: &Options) -> Result<String> {
    let spec: CurveJson = parse_json(text)?;
    let curve = spec.to_equation()?;
    let g = spec.g;
    let precision = spec.precision.unwrap_or(20);
    let points: Vec<_> = match &spec.points {
        Some(p) => p.iter().map(|r| r.0.clone()).collect(),
        None => (0..64i64)
            .map(rat)
            .filter(|x| {
                let x = curve.field().element(x).expect("integers are integral");
                !curve.is_branch_point(&CurvePoint::Finite(x.clone()))
            })
            .take(3)
            .collect(),
    };
    let checks = points
        .iter()
        .map(|x| {
            Ok(PointCheckJson {
                x0: x.clone().into(),
                holds: curve.wronskian_check(x, precision)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let gap_orders = curve
        .rational_branch_points()?
        .iter()
        .map(|p| {
            Ok(GapOrderJson {
                point: point_name(p),
                order: curve.weierstrass_gap_order(p, precision)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = WronskianOutput {
        schema_version: SCHEMA_VERSION,
        command: "wronskian".into(),
        g,
        field: spec.field.clone(),
        precision,
        discriminant: curve.discriminant()?.into(),
        weierstrass_total: gap_orders.iter().map(|o| o.order).sum(),
        checks,
        gap_orders,
        expected_total: g * g * g - g,
    };
    emit(opts, &out, || {
        let field = match out.field.0 {
            FieldJson::Q => "Q".to_string(),
            FieldJson::Fp(p) => format!("F_{p}"),
        };
        let mut s = String::new();
        writeln!(
            s,
            "genus {} over {}, precision {}",
            out.g, field, out.precision
        )
        .unwrap();
        writeln!(
            s,
            "discriminant = {}",
            display_rational(&out.discriminant.0)
        )
        .unwrap();
        for c in &out.checks {
            let verdict = if c.holds { "holds" } else { "FAILS" };
            writeln!(
                s,
                "identity at x0 = {}: {verdict}",
                display_rational(&c.x0.0)
            )
            .unwrap();
        }
        for o in &out.gap_orders {
            writeln!(s, "vanishing order at x = {}: {}", o.point, o.order).unwrap();
        }
        writeln!(
            s,
            "total over rational branch points = {} (generic degree {})",
            out.weierstrass_total, out.expected_total
        )
        .unwrap();
        s
    })
}

fn fmt_c(c: &ComplexJson) -> String {
    format!("{:.15e} {:+.15e}i", c[0], c[1])
}

pub fn theta(text: &str, opts: &Options) -> Result<String> {
    let spec: ThetaJson = parse_json(text)?;
    let tau = spec.period_matrix(SYMMETRY_EPS)?;
    let z: Vec<_> = spec.z.iter().map(to_complex).collect();
    let value = theta_value(&z, &tau, opts.tol)?;
    let gradient = theta_gradient(&z, &tau, opts.tol)?;
    let j = match &spec.w {
        Some(ws) => {
            let ws: Vec<Vec<_>> = ws
                .iter()
                .map(|w| w.iter().map(to_complex).collect())
                .collect();
            Some(j_norm(&ws, &tau, opts.tol)?)
        }
        None => None,
    };
    let out = ThetaOutput {
        schema_version: SCHEMA_VERSION,
        command: "theta".into(),
        theta: from_complex(value),
        theta_norm: theta_norm(&z, &tau, opts.tol)?,
        gradient: gradient.into_iter().map(from_complex).collect(),
        j_norm: j,
        tol: opts.tol,
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(s, "theta      = {}", fmt_c(&out.theta)).unwrap();
        writeln!(s, "|theta|    = {:.15e}", out.theta_norm).unwrap();
        for (i, d) in out.gradient.iter().enumerate() {
            writeln!(s, "d/dz{}      = {}", i + 1, fmt_c(d)).unwrap();
        }
        if let Some(j) = out.j_norm {
            writeln!(s, "|J|        = {j:.15e}").unwrap();
        }
        writeln!(s, "tolerance  = {:e}", out.tol).unwrap();
        s
    })
}

struct TStats {
    logs: Vec<f64>,
    mean: f64,
    spread: f64,
}

fn t_samples(
    curve: &dyn hyperell::analytic::AnalyticCurve,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<TStats> {
    if n == 0 {
        return Err(Error::Parse("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut logs = Vec::with_capacity(n);
    for _ in 0..n {
        logs.push(t_invariant(curve, &mut rng, tol)?.log_value);
    }
    let values: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(TStats {
        logs,
        mean,
        spread: (max - min) / mean.abs(),
    })
}

fn tau_rows(tau: &hyperell::analytic::PeriodMatrix) -> Vec<Vec<ComplexJson>> {
    let t = tau.tau();
    (0..t.nrows())
        .map(|i| (0..t.ncols()).map(|j| from_complex(t[(i, j)])).collect())
        .collect()
}

pub fn tinv(text: &str, opts: &Options) -> Result<String> {
    let spec: TinvJson = parse_json(text)?;
    let built = spec.curve.build(opts.tol)?;
    let curve = built.as_dyn();
    let stats = t_samples(curve, spec.samples, opts.seed, opts.tol)?;
    let g = curve.genus();
    let closed_form = if g == 1 {
        let t = curve.period_matrix().tau()[(0, 0)];
        Some(t_from_delta(1, log_petersson_delta_norm(t, opts.tol)?))
    } else {
        None
    };
    let out = TinvOutput {
        schema_version: SCHEMA_VERSION,
        command: "tinv".into(),
        g,
        seed: opts.seed,
        tau: tau_rows(curve.period_matrix()),
        samples: stats.logs.iter().map(|l| l.exp()).collect(),
        mean: stats.mean,
        relative_spread: stats.spread,
        closed_form,
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(s, "genus {}, seed {}", out.g, out.seed).unwrap();
        for row in &out.tau {
            let cells: Vec<String> = row.iter().map(fmt_c).collect();
            writeln!(s, "tau | {}", cells.join(" | ")).unwrap();
        }
        for (i, t) in out.samples.iter().enumerate() {
            writeln!(s, "sample {:<3} T = {t:.15e}", i + 1).unwrap();
        }
        writeln!(s, "mean T = {:.15e}", out.mean).unwrap();
        writeln!(s, "relative spread = {:.3e}", out.relative_spread).unwrap();
        if let Some(c) = out.closed_form {
            writeln!(s, "closed form = {c:.15e}").unwrap();
        }
        s
    })
}

pub fn height(text: &str, opts: &Options) -> Result<String> {
    let ledger: LedgerJson = parse_json(text)?;
    let input = ledger.to_input();
    let r = deg_lambda(&input)?;
    let local_coefficients = r
        .local_coefficients
        .iter()
        .map(|(place, c)| Ok((place.clone(), Rat(hyperell::arith::parse_rational(c)?))))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let out = HeightOutput {
        schema_version: SCHEMA_VERSION,
        command: "height".into(),
        g: ledger.g,
        degree_k: ledger.degree_k,
        heights_term: r.heights_term,
        local_term: r.local_term,
        local_coefficients,
        arch_term: r.arch_term,
        combination: r.combination,
        deg_lambda: r.deg_lambda,
        faltings_height: r.faltings_height,
        lower_bound: r.lower_bound,
        rounding_error: r.rounding_error,
        slope_constant: slope_constant(ledger.g)?.into(),
    };
    emit(opts, &out, || {
        let mut s = String::new();
        let row = |s: &mut String, k: &str, v: f64| writeln!(s, "{k:<18}{v:>24.15e}").unwrap();
        row(&mut s, "heights term", out.heights_term);
        row(&mut s, "local term", out.local_term);
        row(&mut s, "archimedean term", out.arch_term);
        row(&mut s, "combination", out.combination);
        row(&mut s, "deg lambda", out.deg_lambda);
        row(&mut s, "Faltings height", out.faltings_height);
        row(&mut s, "T lower bound", out.lower_bound);
        row(&mut s, "rounding error", out.rounding_error);
        for (place, c) in &out.local_coefficients {
            writeln!(s, "local coefficient {place}: {}", display_rational(&c.0)).unwrap();
        }
        writeln!(
            s,
            "slope constant = {}",
            display_rational(&out.slope_constant.0)
        )
        .unwrap();
        s
    })
}

pub fn report(text: &str, opts: &Options) -> Result<String> {
    let spec: ReportJson = parse_json(text)?;
    let mut rows = Vec::with_capacity(spec.embeddings.len());
    for (i, emb) in spec.embeddings.iter().enumerate() {
        let built = emb.curve.build(opts.tol)?;
        let curve = built.as_dyn();
        if curve.genus() != spec.g {
            return Err(Error::InvalidInput(format!(
                "embedding {} has genus {}, expected {}",
                emb.embedding,
                curve.genus(),
                spec.g
            )));
        }
        let seed = opts.seed.wrapping_add(i as u64);
        let stats = t_samples(curve, spec.t_samples, seed, opts.tol)?;
        let log_t = stats.logs.iter().sum::<f64>() / stats.logs.len() as f64;
        let bost = bost_integral(curve.period_matrix(), seed, spec.bost_samples, opts.tol)?;
        rows.push(EmbeddingReportJson {
            embedding: emb.embedding.clone(),
            log_t,
            bost_mean: bost.mean,
            bost_standard_error: bost.standard_error,
        });
    }
    let logs: Vec<f64> = rows.iter().map(|r| r.log_t).collect();
    let integrals: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.bost_mean, r.bost_standard_error))
        .collect();
    let (bost, bost_err) = bost_bound(spec.g, spec.degree_k, &integrals)?;
    let out = ReportOutput {
        schema_version: SCHEMA_VERSION,
        command: "report".into(),
        g: spec.g,
        degree_k: spec.degree_k,
        seed: opts.seed,
        t_lower_bound: faltings_lower_bound(spec.g, spec.degree_k, &logs)?,
        embeddings: rows,
        bost_bound: bost,
        bost_bound_error: bost_err,
    };
    emit(opts, &out, || {
        let mut s = String::new();
        writeln!(
            s,
            "{:<12}{:>24}{:>24}{:>16}",
            "embedding", "log T", "theta integral", "std error"
        )
        .unwrap();
        for r in &out.embeddings {
            writeln!(
                s,
                "{:<12}{:>24.15e}{:>24.15e}{:>16.3e}",
                r.embedding, r.log_t, r.bost_mean, r.bost_standard_error
            )
            .unwrap();
        }
        writeln!(
            s,
            "{:<36}{:>24.15e}",
            "lower bound from T", out.t_lower_bound
        )
        .unwrap();
        writeln!(
            s,
            "{:<36}{:>24.15e} +- {:.3e}",
            "lower bound from theta integral", out.bost_bound, out.bost_bound_error
        )
        .unwrap();
        s
    })
}
