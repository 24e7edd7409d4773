use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jacstab::curve::{DualGraph, Subcurve};
use jacstab::enumeration::{
    count_jh_classes_with, enumerate_with, spanning_tree_count, Budget, EnumerationOptions, EnumerationResult,
};
use jacstab::fixtures::{random_graph, random_polarization, random_sheaf, seeded};
use jacstab::io;
use jacstab::jordan_holder::{build_quasistable, gr, jh_filtration, jh_filtration_with, PieceChoice};
use jacstab::reduction::{semistable_reduce, sigma_reduce, TwistTrace};
use jacstab::sheaf::CombSheaf;
use jacstab::stability::{evaluate, seshadri_convert, Polarization, Predicate, StabilityReport};
use jacstab::{Error, Rational};

#[derive(Parser)]
#[command(name = "jacstab", version, about = "Stability of rank-one sheaves on nodal curves, computed on dual graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args)]
struct Common {
    /// Dual graph document.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every stability predicate on a sheaf.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        pol: PathBuf,
        /// Exit with status 1 unless this predicate holds, e.g. `stable` or `w-quasistable(u)`.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Jordan-Hölder filtration and graded class.
    Jh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        pol: PathBuf,
    },
    /// Glue a part system into a sheaf quasistable at a component.
    Construct {
        #[command(flatten)]
        common: Common,
        /// JSON array of stable pieces, each with a `support`.
        #[arg(long)]
        parts: PathBuf,
        #[arg(long)]
        pol: PathBuf,
        /// Component id.
        #[arg(long)]
        component: String,
    },
    /// Twist a sheaf to a semistable one, then optionally to the quasistable
    /// representative at a marked point.
    Reduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        pol: PathBuf,
        /// Marking id, written `sigma` or `mark=sigma`.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// List the classes satisfying a predicate.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: Scan,
        #[arg(long = "pred")]
        predicate: String,
        /// Component id for `w-quasistable`.
        #[arg(long)]
        component: Option<String>,
        /// Marking id for `sigma-quasistable`.
        #[arg(long)]
        mark: Option<String>,
    },
    /// Count classes for each predicate, and graded classes among semistable ones.
    Count {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: Scan,
    },
    /// Turn Seshadri weights into a polarization.
    Convert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        weights: PathBuf,
    },
    /// Minimum number of separating nodes and spanning tree count.
    Oracle {
        #[command(flatten)]
        common: Common,
    },
    /// Randomized consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

#[derive(Args)]
struct Scan {
    #[arg(long)]
    pol: PathBuf,
    /// Only scan invertible classes.
    #[arg(long)]
    invertible: bool,
    /// Worker threads for the scan.
    #[arg(long)]
    jobs: Option<usize>,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: if e.is_internal() { 3 } else { 2 }, message: e.to_string() }
    }
}

fn input(what: &str, path: &Path, e: Error) -> Failure {
    let code = if e.is_internal() { 3 } else { 2 };
    Failure { code, message: format!("{what} `{}`: {e}", path.display()) }
}

/// Names the sheaf and polarization files in a diagnostic.
fn against(f: Failure, sheaf: &Path, pol: &Path) -> Failure {
    Failure { code: f.code, message: format!("sheaf `{}` with polarization `{}`: {}", sheaf.display(), pol.display(), f.message) }
}

fn read(what: &str, path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: 2, message: format!("{what} `{}`: {e}", path.display()) })
}

fn load_graph(path: &Path) -> Result<DualGraph, Failure> {
    io::parse_graph(&read("graph", path)?).map_err(|e| input("graph", path, e))
}

fn load_sheaf(g: &DualGraph, path: &Path) -> Result<CombSheaf, Failure> {
    io::parse_sheaf(g, &read("sheaf", path)?).map_err(|e| input("sheaf", path, e))
}

fn load_pol(g: &DualGraph, path: &Path) -> Result<Polarization, Failure> {
    io::parse_polarization(g, &read("polarization", path)?).map_err(|e| input("polarization", path, e))
}

struct Output {
    json: Value,
    table: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match &cli.command {
        Command::Check { common, .. }
        | Command::Jh { common, .. }
        | Command::Construct { common, .. }
        | Command::Reduce { common, .. }
        | Command::Enumerate { common, .. }
        | Command::Count { common, .. }
        | Command::Convert { common, .. }
        | Command::Oracle { common } => common.format,
        Command::Selftest { .. } => Format::Table,
    };
    match run(cli.command) {
        Ok(out) => {
            match format {
                Format::Json => print!("{}", io::to_pretty(&out.json)),
                Format::Table => print!("{}", out.table),
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Check { common, sheaf, pol, expect } => {
            let g = load_graph(&common.graph)?;
            let i = load_sheaf(&g, &sheaf)?;
            let p = load_pol(&g, &pol)?;
            check(&g, &i, &p, expect.as_deref()).map_err(|f| against(f, &sheaf, &pol))
        }
        Command::Jh { common, sheaf, pol } => {
            let g = load_graph(&common.graph)?;
            let i = load_sheaf(&g, &sheaf)?;
            let p = load_pol(&g, &pol)?;
            let f = jh_filtration(&g, &i, &p).map_err(|e| against(e.into(), &sheaf, &pol))?;
            let mut table = String::new();
            for (k, st) in f.steps.iter().enumerate() {
                table += &format!(
                    "step {k}: support {} peel {} piece {}\n",
                    g.describe(st.support),
                    g.describe(st.peeled),
                    show_sheaf(&g, &st.piece)
                );
            }
            table += &format!("graded: {}\n", f.class().pieces().iter().map(|c| show_sheaf(&g, c)).collect::<Vec<_>>().join(" + "));
            Ok(Output { json: io::filtration_to_value(&g, &f), table, code: 0 })
        }
        Command::Construct { common, parts, pol, component } => {
            let g = load_graph(&common.graph)?;
            let p = load_pol(&g, &pol)?;
            let pieces = io::parse_parts(&g, &read("part system", &parts)?).map_err(|e| input("part system", &parts, e))?;
            let w = g.vertex_index(&component)?;
            let built = build_quasistable(&g, &pieces, w, &p)?;
            let class = gr(&g, &built, &p)?;
            let json = json!({
                "component": component,
                "sheaf": io::sheaf_to_value(&g, &built),
                "graded": io::jh_class_to_value(&g, &class),
            });
            let table = format!("{}-quasistable: {}\n", component, show_sheaf(&g, &built));
            Ok(Output { json, table, code: 0 })
        }
        Command::Reduce { common, sheaf, pol, sigma } => {
            let g = load_graph(&common.graph)?;
            let i = load_sheaf(&g, &sheaf)?;
            let p = load_pol(&g, &pol)?;
            reduce(&g, &i, &p, sigma.as_deref()).map_err(|f| against(f, &sheaf, &pol))
        }
        Command::Enumerate { common, scan, predicate, component, mark } => {
            let g = load_graph(&common.graph)?;
            let p = load_pol(&g, &scan.pol)?;
            let pred = parse_predicate(&g, &predicate, component.as_deref(), mark.as_deref())?;
            let opts = options(scan.invertible)?;
            let res = with_jobs(scan.jobs, || Ok(enumerate_with(&g, &p, p.target(), pred, &opts)?))?;
            Ok(Output { json: io::enumeration_to_value(&g, &res)?, table: enumeration_table(&g, &res)?, code: 0 })
        }
        Command::Count { common, scan } => {
            let g = load_graph(&common.graph)?;
            let p = load_pol(&g, &scan.pol)?;
            count(&g, &p, &scan)
        }
        Command::Convert { common, weights } => {
            let g = load_graph(&common.graph)?;
            let (a, chi) = io::parse_seshadri(&g, &read("weights", &weights)?).map_err(|e| input("weights", &weights, e))?;
            let p = seshadri_convert(&a, chi)?;
            let table = (0..g.num_vertices())
                .map(|v| format!("{} weight {} slope {}\n", g.vertex(v).id, p.weights()[v], p.slope(v)))
                .collect::<String>()
                + &format!("rank {} chi {}\n", p.rank(), p.target());
            Ok(Output { json: io::polarization_to_value(&g, &p), table, code: 0 })
        }
        Command::Oracle { common } => {
            let g = load_graph(&common.graph)?;
            let cut = g.min_cut();
            let trees = spanning_tree_count(&g)?;
            let json = json!({
                "min_cut": cut.to_string(),
                "spanning_trees": trees.to_string(),
                "arithmetic_genus": g.arithmetic_genus(),
            });
            let table = format!("min cut {cut}\nspanning trees {trees}\narithmetic genus {}\n", g.arithmetic_genus());
            Ok(Output { json, table, code: 0 })
        }
        Command::Selftest { seed, cases } => selftest(seed, cases),
    }
}

fn options(invertible: bool) -> Result<EnumerationOptions, Failure> {
    Ok(EnumerationOptions { invertible_only: invertible, budget: Budget::from_env()? })
}

fn with_jobs<T>(jobs: Option<usize>, f: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure>
where
    T: Send,
{
    match jobs {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure { code: 2, message: format!("--jobs {n}: {e}") })?;
            pool.install(f)
        }
    }
}

fn show_sheaf(g: &DualGraph, i: &CombSheaf) -> String {
    let degrees: Vec<String> = i.ambient().vertices().map(|v| format!("{}:{}", g.vertex(v).id, i.degree(v))).collect();
    let nodes: Vec<String> = i.nonfree().edges().map(|e| g.describe_edge(e)).collect();
    format!("[{}] S={{{}}}", degrees.join(" "), nodes.join(","))
}

fn show_rational(q: Rational) -> String {
    io::rational_to_string(q)
}

fn parse_predicate(g: &DualGraph, name: &str, component: Option<&str>, mark: Option<&str>) -> Result<Predicate, Failure> {
    let need = |what: &str| Failure { code: 2, message: format!("predicate `{name}` needs --{what}") };
    Ok(match name {
        "semistable" => Predicate::Semistable,
        "stable" => Predicate::Stable,
        "quasistable" => Predicate::Quasistable,
        "simple-semistable" => Predicate::SimpleSemistable,
        "w-quasistable" => Predicate::WQuasistable(g.vertex_index(component.ok_or_else(|| need("component"))?)?),
        "sigma-quasistable" => Predicate::SigmaQuasistable(g.marked_vertex(mark.ok_or_else(|| need("mark"))?)?),
        other => return Err(Error::UnknownPredicate(other.to_string()).into()),
    })
}

fn check(g: &DualGraph, i: &CombSheaf, pol: &Polarization, expect: Option<&str>) -> Result<Output, Failure> {
    let mut rows: Vec<(String, StabilityReport)> = Vec::new();
    for p in [Predicate::Semistable, Predicate::Stable, Predicate::Quasistable, Predicate::SimpleSemistable] {
        rows.push((p.name().to_string(), evaluate(g, i, pol, p)?));
    }
    for w in i.ambient().vertices() {
        rows.push((format!("w-quasistable({})", g.vertex(w).id), evaluate(g, i, pol, Predicate::WQuasistable(w))?));
    }
    for m in g.markings() {
        if i.ambient().contains(m.vertex) {
            let report = evaluate(g, i, pol, Predicate::SigmaQuasistable(m.vertex))?;
            rows.push((format!("sigma-quasistable({})", m.id), report));
        }
    }
    let code = match expect {
        None => 0,
        Some(want) => match rows.iter().find(|(label, _)| label == want) {
            Some((_, r)) => u8::from(!r.holds),
            None => {
                let known: Vec<&str> = rows.iter().map(|(l, _)| l.as_str()).collect();
                return Err(Failure {
                    code: 2,
                    message: format!("--expect `{want}` is not one of: {}", known.join(", ")),
                });
            }
        },
    };
    let mut table = format!("chi {}  target {}\n", i.euler_char(g), show_rational(pol.target_on(i.ambient())));
    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    for (label, r) in &rows {
        let witness = r
            .witness
            .as_ref()
            .map(|w| format!("  min beta {} on {}", show_rational(w.beta), g.describe(w.subcurve)))
            .unwrap_or_default();
        table += &format!("{label:width$}  {}{witness}\n", r.holds);
    }
    let reports: serde_json::Map<String, Value> =
        rows.iter().map(|(label, r)| (label.clone(), io::report_to_value(g, r))).collect();
    let json = json!({
        "chi": i.euler_char(g),
        "target": show_rational(pol.target_on(i.ambient())),
        "reports": reports,
    });
    Ok(Output { json, table, code })
}

fn reduce(g: &DualGraph, i: &CombSheaf, pol: &Polarization, sigma: Option<&str>) -> Result<Output, Failure> {
    let first = semistable_reduce(g, i, pol)?;
    let mut json = json!({ "semistable": io::trace_to_value(g, &first) });
    let mut table = trace_table(g, "semistable", &first);
    let mut last = first.result.clone();
    if let Some(arg) = sigma {
        let mark = arg.strip_prefix("mark=").unwrap_or(arg);
        let w = g.marked_vertex(mark)?;
        let second = sigma_reduce(g, &first.result, pol, w)?;
        json["sigma"] = io::trace_to_value(g, &second);
        json["mark"] = json!(mark);
        table += &trace_table(g, &format!("sigma-quasistable({mark})"), &second);
        last = second.result;
    }
    json["final"] = io::sheaf_to_value(g, &last);
    table += &format!("final {}\n", show_sheaf(g, &last));
    Ok(Output { json, table, code: 0 })
}

fn trace_table(g: &DualGraph, phase: &str, t: &TwistTrace) -> String {
    let mut s = format!("{phase}: start {}\n", show_sheaf(g, &t.start));
    for (k, st) in t.steps.iter().enumerate() {
        s += &format!("  {k}: fire {} (min beta {})\n", g.describe(st.fired), show_rational(st.beta_min));
    }
    s += &format!("  -> {} after {} twists\n", show_sheaf(g, &t.result), t.iterations());
    s
}

fn enumeration_table(g: &DualGraph, res: &EnumerationResult) -> Result<String, Failure> {
    let mut s = format!(
        "predicate {}  chi {}  count {}  graded classes {}\n",
        res.predicate.label(g),
        res.chi,
        res.len(),
        res.jh_classes
    );
    for (k, n) in &res.strata {
        s += &format!("  |S|={k}: {n}\n");
    }
    for c in &res.classes {
        let witness = io::beta_min_witness(g, c, &res.polarization)?
            .map(|w| format!("{} {}", g.describe(w.subcurve), show_rational(w.beta)))
            .unwrap_or_else(|| "-".into());
        s += &format!("{}  {}  min beta {}\n", c.nonfree().len(), show_sheaf(g, c), witness);
    }
    Ok(s)
}

fn count(g: &DualGraph, pol: &Polarization, scan: &Scan) -> Result<Output, Failure> {
    let opts = options(scan.invertible)?;
    let chi = pol.target();
    let preds = [Predicate::Semistable, Predicate::Stable, Predicate::Quasistable, Predicate::SimpleSemistable];
    let (counts, graded) = with_jobs(scan.jobs, || {
        let mut counts = Vec::new();
        for p in preds {
            counts.push((p.name(), enumerate_with(g, pol, chi, p, &opts)?.len()));
        }
        Ok((counts, count_jh_classes_with(g, pol, chi, &opts)?))
    })?;
    let mut table = format!("chi {chi}{}\n", if scan.invertible { "  (invertible only)" } else { "" });
    for (name, n) in &counts {
        table += &format!("{name} {n}\n");
    }
    table += &format!("graded classes {graded}\n");
    let map: serde_json::Map<String, Value> = counts.iter().map(|(n, c)| (n.to_string(), json!(c))).collect();
    let json = json!({ "chi": chi, "invertible_only": scan.invertible, "counts": map, "jh_classes": graded });
    Ok(Output { json, table, code: 0 })
}

fn selftest(seed: u64, cases: usize) -> Result<Output, Failure> {
    let mut rng = seeded(seed);
    let breach = |what: String| Failure { code: 3, message: format!("selftest seed {seed}: {what}") };
    let mut reduced = 0;
    let mut filtered = 0;
    for case in 0..cases {
        let g = random_graph(&mut rng, 5, 7, 1);
        let i = random_sheaf(&mut rng, &g, 4, 0.25);
        let pol = random_polarization(&mut rng, &g, i.euler_char(&g), 3);
        if i.is_simple(&g) {
            let t = semistable_reduce(&g, &i, &pol)?;
            if !evaluate(&g, &t.result, &pol, Predicate::Semistable)?.holds || t.replay(&g)? != t.result {
                return Err(breach(format!("case {case}: semistable reduction")));
            }
            for w in g.full().vertices() {
                let s = sigma_reduce(&g, &t.result, &pol, w)?;
                if !evaluate(&g, &s.result, &pol, Predicate::WQuasistable(w))?.holds {
                    return Err(breach(format!("case {case}: quasistable reduction at {}", g.vertex(w).id)));
                }
            }
            reduced += 1;
        }
        if evaluate(&g, &i, &pol, Predicate::Semistable)?.holds {
            let a = jh_filtration_with(&g, &i, &pol, PieceChoice::LexFirst)?.class();
            let b = jh_filtration_with(&g, &i, &pol, PieceChoice::LexLast)?.class();
            if a != b {
                return Err(breach(format!("case {case}: graded class depends on tie-breaks")));
            }
            let parts = a.pieces().to_vec();
            let w = parts[0].ambient().first().unwrap_or(0);
            let built = build_quasistable(&g, &parts, w, &pol)?;
            if gr(&g, &built, &pol)? != a || built.ambient() != Subcurve::full(g.num_vertices()) {
                return Err(breach(format!("case {case}: gluing round trip")));
            }
            filtered += 1;
        }
    }
    let table = format!("seed {seed}: {cases} cases, {reduced} reductions, {filtered} filtrations, all consistent\n");
    let json = json!({ "seed": seed, "cases": cases, "reductions": reduced, "filtrations": filtered });
    Ok(Output { json, table, code: 0 })
}
