use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tautring4::calculus::{boundary_map, forget_pullback_many, multiply};
use tautring4::expr::{degree_monomials, essential_basis, format_q, Monomial, Space, TautExpr, TensorExpr};
use tautring4::graph::{aut_count, canonical_key, enumerate, Family, StableGraph};
use tautring4::io::{ExprFile, ExprTerm, GraphJson};
use tautring4::relations::{catalog_with_order, tensor_normal_form, CATALOG_ENV};
use tautring4::verify::blocks::{block_rank_report, Lemma};
use tautring4::verify::m32::rederive_m32;
use tautring4::verify::suite;
use tautring4::Marking;

#[derive(Parser)]
#[command(name = "tautring4", version, about = "Degree-two tautological classes on moduli spaces of pointed stable curves")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    format: Format,
    /// Relation data file, overriding the built-in table.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
    /// Family names only (graphs).
    Names,
}

#[derive(Args)]
struct Ambient {
    #[arg(long)]
    genus: u32,
    /// Comma-separated marking labels.
    #[arg(long, default_value = "")]
    markings: String,
}

impl Ambient {
    fn space(&self) -> Result<Space> {
        Ok(Space::new(self.genus, &parse_markings(&self.markings)?)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Stable graphs of a given codimension, one per isomorphism class.
    Graphs {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long, default_value_t = 1)]
        codim: usize,
    },
    /// Automorphism count and canonical form of each graph in a file.
    Aut { file: PathBuf },
    /// Monomials of a cohomological degree; essential ones in degree 4.
    Basis {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Marking order used by the essential basis.
        #[arg(long)]
        order: Option<String>,
        /// Only the essential classes that survive the known relations.
        #[arg(long)]
        reduced: bool,
    },
    /// Canonical form of an expression.
    Normalize {
        file: PathBuf,
        /// Write coefficients as plain pushforwards.
        #[arg(long)]
        raw: bool,
    },
    /// Product of two expressions.
    Mul {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        raw: bool,
    },
    /// Pullback along a boundary divisor (`irr` or `a:A`) or a forgetful map.
    Pull {
        file: PathBuf,
        #[arg(long, conflicts_with = "forget", required_unless_present = "forget")]
        boundary: Option<String>,
        /// Comma-separated markings to add.
        #[arg(long)]
        forget: Option<String>,
        #[arg(long)]
        raw: bool,
    },
    /// Pullback along a separating divisor projected to H2 (x) H2, in normal form.
    Project {
        file: PathBuf,
        #[arg(long)]
        factor: String,
    },
    /// Known relations in degree two.
    Relations {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        order: Option<String>,
    },
    /// Coordinates of a degree-two class on the reduced basis.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        order: Option<String>,
    },
    /// Re-derive the relation on M(3,{a,b}) from boundary pullbacks.
    RederiveM32,
    /// Rank of a pullback map on essential classes, block by block.
    RankReport {
        #[command(flatten)]
        ambient: Ambient,
        #[arg(long)]
        lemma: Option<String>,
        /// Write the matrix as (row, col, "p/q") triplets.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        #[arg(long, default_value = "paper")]
        suite: String,
        /// Run only this check.
        #[arg(long)]
        check: Option<usize>,
    },
}

fn parse_markings(s: &str) -> Result<Vec<Marking>> {
    let s = s.trim().trim_start_matches('{').trim_end_matches('}');
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| Marking::parse(x).ok_or_else(|| anyhow!("bad marking {x:?}")))
        .collect()
}

fn read_expr(path: &Path) -> Result<TautExpr> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ExprFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    file.to_expr().with_context(|| format!("in {}", path.display()))
}

fn ambient_json(sp: &Space) -> Value {
    json!([sp.genus, sp.markings.iter().map(|m| m.to_string()).collect::<Vec<_>>()])
}

fn monomial_json(m: &Monomial) -> Value {
    serde_json::to_value(ExprTerm::from_monomial(m, &tautring4::Q::from_integer(1.into()))).expect("serializable")
}

fn tensor_json(t: &TensorExpr, raw: bool) -> Value {
    let terms: Vec<Value> = t
        .terms
        .iter()
        .map(|(ms, c)| {
            let c = if raw { c * tautring4::Q::from_integer(ms.iter().map(|m| m.aut() as i64).product::<i64>().into()) } else { c.clone() };
            json!({"coeff": format_q(&c), "factors": ms.iter().map(monomial_json).collect::<Vec<_>>()})
        })
        .collect();
    json!({"factors": t.factors.iter().map(ambient_json).collect::<Vec<_>>(), "terms": terms, "raw": raw})
}

fn print_expr(e: &TautExpr, format: Format, raw: bool) {
    match format {
        Format::Json => println!("{}", ExprFile::from_expr(e, raw).to_json()),
        _ => println!("{e}"),
    }
}

fn print_tensor(t: &TensorExpr, format: Format, raw: bool) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&tensor_json(t, raw)).expect("serializable")),
        _ => println!("{t}"),
    }
}

fn order_of(sp: &Space, order: &Option<String>) -> Result<Vec<Marking>> {
    match order {
        Some(o) => parse_markings(o),
        None => Ok(sp.markings.clone()),
    }
}

/// `a:A` as a separating divisor, `A` on the genus-a side.
fn separating(sp: &Space, spec: &str) -> Result<StableGraph> {
    let (a, side) = spec.split_once(':').ok_or_else(|| anyhow!("expected a:A, got {spec:?}"))?;
    let a: u32 = a.trim().parse().with_context(|| format!("bad genus in {spec:?}"))?;
    Ok(Family::Sep { a, side: parse_markings(side)? }.build(sp.genus, &sp.markings)?)
}

fn graphs(ambient: &Ambient, codim: usize, format: Format) -> Result<()> {
    let sp = ambient.space()?;
    for ng in enumerate(sp.genus, &sp.markings, codim)? {
        let g = serde_json::to_string(&GraphJson::from_graph(&ng.graph))?;
        match format {
            Format::Json => println!("{g}"),
            Format::Names => println!("{}", ng.family),
            Format::Pretty => println!("{:<28} |Aut| = {:<3} {g}", ng.family.to_string(), aut_count(&ng.graph)),
        }
    }
    Ok(())
}

fn aut(file: &Path, format: Format) -> Result<()> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let gj: GraphJson = serde_json::from_str(line).with_context(|| format!("bad graph {line}"))?;
        let g = gj.to_graph()?;
        let canon = GraphJson::from_graph(&canonical_key(&g).graph());
        let family = Family::classify(&g).map(|f| f.to_string());
        match format {
            Format::Json => println!("{}", json!({"aut": aut_count(&g), "canonical": canon, "family": family})),
            _ => println!(
                "|Aut| = {}  {}  {}",
                aut_count(&g),
                family.unwrap_or_else(|| "-".into()),
                serde_json::to_string(&canon)?
            ),
        }
    }
    Ok(())
}

fn basis(ambient: &Ambient, degree: usize, order: &Option<String>, reduced: bool, format: Format) -> Result<()> {
    let sp = ambient.space()?;
    if degree % 2 == 1 {
        bail!("tautological classes have even cohomological degree");
    }
    let order = order_of(&sp, order)?;
    let ms = match (degree, reduced) {
        (4, true) => catalog_with_order(&sp, &order)?.reduced_basis(),
        (4, false) => essential_basis(&sp, Some(&order))?,
        (_, true) => bail!("--reduced applies to degree 4"),
        (d, false) => degree_monomials(&sp, d / 2)?,
    };
    match format {
        Format::Json => {
            let v: Vec<Value> = ms.iter().map(monomial_json).collect();
            println!("{}", serde_json::to_string_pretty(&json!({"ambient": ambient_json(&sp), "basis": v}))?);
        }
        _ => {
            for m in &ms {
                println!("{}", m.name());
            }
            println!("# {} classes", ms.len());
        }
    }
    Ok(())
}

fn pull(file: &Path, boundary: &Option<String>, forget: &Option<String>, raw: bool, format: Format) -> Result<()> {
    let e = read_expr(file)?;
    if let Some(xs) = forget {
        let out = forget_pullback_many(&e, &parse_markings(xs)?)?.pruned();
        print_expr(&out, format, raw);
        return Ok(());
    }
    let b = boundary.as_deref().expect("clap requires one of the two");
    let divisor = if b == "irr" { Family::Irr.build(e.space.genus, &e.space.markings)? } else { separating(&e.space, b)? };
    let t = boundary_map(&e.space, &divisor)?.pullback(&e)?.pruned();
    print_tensor(&t, format, raw);
    Ok(())
}

fn project(file: &Path, factor: &str, format: Format) -> Result<()> {
    let e = read_expr(file)?;
    let divisor = separating(&e.space, factor)?;
    let t = tensor_normal_form(&boundary_map(&e.space, &divisor)?.restrict(&e, &[1, 1])?)?.pruned();
    print_tensor(&t, format, false);
    Ok(())
}

fn relations(ambient: &Ambient, order: &Option<String>, format: Format) -> Result<()> {
    let sp = ambient.space()?;
    let cat = catalog_with_order(&sp, &order_of(&sp, order)?)?;
    match format {
        Format::Json => {
            let rels: Vec<Value> = cat
                .relations
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(ExprFile::from_expr(&r.expr, false)).expect("serializable");
                    v["source"] = json!(r.source.to_string());
                    v
                })
                .collect();
            let out = json!({
                "ambient": ambient_json(&sp),
                "rank": cat.rank(),
                "essential": cat.essential().len(),
                "reduced_basis": cat.reduced_basis().iter().map(|m| m.name()).collect::<Vec<_>>(),
                "unexplained": cat.unexplained().iter().map(|m| m.name()).collect::<Vec<_>>(),
                "relations": rels,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => {
            for r in &cat.relations {
                println!("[{}] {} = 0", r.source, r.expr);
            }
            println!(
                "# {} independent relations on {} degree-two classes; {} of {} essential classes remain",
                cat.rank(),
                cat.columns().len(),
                cat.reduced_basis().len(),
                cat.essential().len()
            );
            let open = cat.unexplained();
            if !open.is_empty() {
                println!("# not essential and not eliminated: {}", open.iter().map(|m| m.name()).collect::<Vec<_>>().join(", "));
            }
        }
    }
    Ok(())
}

fn reduce(file: &Path, order: &Option<String>, format: Format) -> Result<()> {
    let e = read_expr(file)?;
    let cat = catalog_with_order(&e.space, &order_of(&e.space, order)?)?;
    let r = cat.reduce(&e)?;
    let basis = cat.reduced_basis();
    let vector: Vec<String> = basis
        .iter()
        .map(|m| r.coords.iter().find(|(x, _)| x == m).map(|(_, c)| format_q(c)).unwrap_or_else(|| "0".into()))
        .collect();
    match format {
        Format::Json => {
            let out = json!({
                "ambient": ambient_json(&e.space),
                "basis": basis.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "vector": vector,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => {
            if r.is_zero() {
                println!("0");
            }
            for (m, c) in &r.coords {
                println!("{:>12}  {}", format_q(c), m.name());
            }
        }
    }
    Ok(())
}

fn rederive(format: Format) -> Result<()> {
    let rep = rederive_m32()?;
    let coeffs = |cs: &[tautring4::verify::m32::Coefficient]| -> Vec<Value> {
        cs.iter()
            .map(|c| json!({"class": c.class, "derived": format_q(&c.derived), "printed": format_q(&c.printed), "agree": c.ok()}))
            .collect()
    };
    match format {
        Format::Json => {
            let out = json!({
                "unknowns": rep.unknowns,
                "maps": rep.maps,
                "kernel_dim": rep.kernel_dim,
                "relation": rep.relation.as_ref().map(|r| serde_json::to_value(ExprFile::from_expr(r, false)).expect("serializable")),
                "table": coeffs(&rep.table),
                "display": coeffs(&rep.display),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => {
            println!("{} unknowns, pullbacks along {}", rep.unknowns, rep.maps.join(", "));
            println!("solution space of dimension {}", rep.kernel_dim);
            if let Some(r) = &rep.relation {
                println!("relation: {r} = 0");
            }
            println!("constraint table:");
            for c in &rep.table {
                println!("  {c}");
            }
            println!("display:");
            for c in &rep.display {
                println!("  {c}");
            }
        }
    }
    Ok(())
}

fn rank_report(ambient: &Ambient, lemma: &Option<String>, dump: &Option<PathBuf>, format: Format) -> Result<()> {
    let sp = ambient.space()?;
    let lemma: Option<Lemma> = lemma.as_deref().map(str::parse).transpose()?;
    let rep = block_rank_report(&sp, lemma)?;
    if let Some(path) = dump {
        let mut text = String::new();
        for (r, c, x) in rep.matrix.triplets() {
            text.push_str(&format!("({r}, {c}, \"{}\")\n", format_q(&x)));
        }
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => {
            let blocks: Vec<Value> = rep
                .blocks
                .iter()
                .map(|b| json!({"name": b.name, "sources": b.sources, "targets": b.targets, "rank": b.rank, "maximal": b.maximal()}))
                .collect();
            let out = json!({
                "lemma": rep.lemma,
                "ambient": ambient_json(&rep.space),
                "map": rep.map,
                "source": rep.source.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "target": rep.target,
                "rank": rep.rank,
                "injective": rep.injective(),
                "blocks": blocks,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        _ => print!("{rep}"),
    }
    Ok(())
}

/// Returns whether every check passed.
fn verify(name: &str, check: Option<usize>, format: Format) -> Result<bool> {
    if name != "paper" {
        bail!("unknown suite {name:?}");
    }
    let ids: Vec<usize> = match check {
        Some(id) => vec![id],
        None => suite::CHECKS.iter().map(|c| c.0).collect(),
    };
    let mut all = true;
    let mut out = Vec::new();
    for id in ids {
        let c = suite::run(id)?;
        all &= c.pass;
        match format {
            Format::Json => out.push(json!({"id": c.id, "name": c.name, "pass": c.pass, "details": c.lines})),
            _ => println!("{c}"),
        }
    }
    if format == Format::Json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let f = cli.format;
    match &cli.command {
        Command::Graphs { ambient, codim } => graphs(ambient, *codim, f)?,
        Command::Aut { file } => aut(file, f)?,
        Command::Basis { ambient, degree, order, reduced } => basis(ambient, *degree, order, *reduced, f)?,
        Command::Normalize { file, raw } => print_expr(&read_expr(file)?.pruned(), f, *raw),
        Command::Mul { left, right, raw } => print_expr(&multiply(&read_expr(left)?, &read_expr(right)?)?.pruned(), f, *raw),
        Command::Pull { file, boundary, forget, raw } => pull(file, boundary, forget, *raw, f)?,
        Command::Project { file, factor } => project(file, factor, f)?,
        Command::Relations { ambient, order } => relations(ambient, order, f)?,
        Command::Reduce { file, order } => reduce(file, order, f)?,
        Command::RederiveM32 => rederive(f)?,
        Command::RankReport { ambient, lemma, dump } => rank_report(ambient, lemma, dump, f)?,
        Command::Verify { suite, check } => {
            if !verify(suite, *check, f)? {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(path) = &cli.catalog {
        std::env::set_var(CATALOG_ENV, path);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if let Some(tautring4::Error::RelationCandidate { residual, .. }) = e.downcast_ref::<tautring4::Error>() {
                eprintln!("relation candidate: {residual}");
                return ExitCode::from(2);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
