use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tfg::expansivity::{cayley_ball, separation_check, LabeledCover, Separation};
use tfg::expr::Value;
use tfg::fullgroup::Element;
use tfg::generators::{bounded_membership, generating_set_with, Membership, OrbitCheck, Packing};
use tfg::homology0::h0_z2;
use tfg::presentation::Presentation;
use tfg::quasicrystal::{self as qc, CutProjectParams, LocalRule, PointSample, Repetitivity, ZPhi};
use tfg::{Error, Result};

mod report;
mod verify;

use report::{Report, Verdict};

/// Topological full groups of étale groupoids over Cantor sequence spaces.
///
/// Every command prints one line per check and ends with a verdict. Exit
/// codes: 0 pass, 1 fail, 2 inconclusive or error.
#[derive(Parser)]
#[command(name = "tfg", version)]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PresentationArg {
    /// Presentation file, or the name of a bundled presentation
    /// (example7, shift2..shift5, golden_mean, bratteli, odometer).
    #[arg(long, short)]
    presentation: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluates element expressions: `g*h^-1`, `[g,h]`, `tau(F)`, `{11:id:12}`;
    /// statements `a == b` pass or fail.
    Algebra {
        #[command(flatten)]
        p: PresentationArg,
        #[arg(required = true)]
        exprs: Vec<String>,
    },
    /// Loads a presentation and validates its named multisections.
    Validate {
        #[command(flatten)]
        p: PresentationArg,
    },
    /// Builds the finite generating set of the alternating full group.
    Gens {
        #[command(flatten)]
        p: PresentationArg,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = PackingArg::PerCell)]
        packing: PackingArg,
        /// Writes the generators as JSON for `member`.
        #[arg(long)]
        emit: Option<String>,
    },
    /// Searches for a word in emitted generators equal to an element.
    Member {
        /// Overrides the presentation recorded in the generator file.
        #[arg(long, short)]
        presentation: Option<String>,
        #[arg(long)]
        element: String,
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
    },
    /// Checks whether sources of products of a cover separate cylinders.
    Expansive {
        #[command(flatten)]
        p: PresentationArg,
        #[arg(long)]
        cover: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        len: usize,
        /// Writes the Cayley ball at `--at` in DOT format.
        #[arg(long, requires = "at")]
        dot: Option<String>,
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
    /// Approximates H0 with Z/2 coefficients.
    H0 {
        #[command(flatten)]
        p: PresentationArg,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        products: usize,
        #[arg(long, default_value = "z2")]
        coeff: String,
    },
    /// Cut-and-project point sets.
    Qc {
        #[command(subcommand)]
        command: QcCommand,
    },
    /// Replays the checkable identities of the worked examples.
    Verify {
        /// Runs only the checks whose name contains this string.
        #[arg(long)]
        only: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PackingArg {
    PerCell,
    Greedy,
}

#[derive(Args)]
struct QcArgs {
    /// Parameter file, or `fibonacci`.
    #[arg(long, default_value = "fibonacci")]
    params: String,
    /// Box `a,b` with exact endpoints such as `0,200` or `0,10+phi`.
    #[arg(long = "box", default_value = "0,200")]
    bounds: String,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
}

#[derive(Subcommand)]
enum QcCommand {
    /// Prints the sample as CSV.
    Generate {
        #[command(flatten)]
        q: QcArgs,
        #[arg(long)]
        csv: Option<String>,
    },
    /// Delaunay bounds, repetitivity, Rips complex and an optional local rule.
    Check {
        #[command(flatten)]
        q: QcArgs,
        #[arg(long, default_value_t = 0.99)]
        delta: f64,
        #[arg(long)]
        margin: Option<f64>,
        /// Local rule file, or `fibonacci`.
        #[arg(long)]
        rule: Option<String>,
    },
    /// Patch classes of radius R as canonical JSON.
    Patches {
        #[command(flatten)]
        q: QcArgs,
    },
    /// Generating set through the gap-word presentation.
    Gens {
        #[command(flatten)]
        q: QcArgs,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
}

#[derive(Serialize, Deserialize)]
struct GeneratorFile {
    version: u32,
    presentation: String,
    depth: usize,
    generators: Vec<GeneratorEntry>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorEntry {
    name: String,
    table: String,
}

pub fn load_presentation(arg: &str) -> Result<Presentation> {
    if !Path::new(arg).exists() {
        if let Ok(p) = Presentation::bundled(arg) {
            return Ok(p);
        }
    }
    Presentation::load(arg)
}

fn parse_box(s: &str) -> Result<(ZPhi, ZPhi)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("box `{s}` is not of the form a,b")))?;
    Ok((a.parse()?, b.parse()?))
}

fn sample(q: &QcArgs) -> Result<PointSample> {
    let params = CutProjectParams::load(&q.params)?;
    let (lo, hi) = parse_box(&q.bounds)?;
    qc::cut_and_project(&params, lo, hi)
}

fn write_file(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Load {
        path: path.into(),
        reason: e.to_string(),
    })
}

fn algebra(p: &str, exprs: &[String]) -> Result<Report> {
    let pres = load_presentation(p)?;
    let mut r = Report::new("algebra");
    let mut values = Vec::new();
    for e in exprs {
        match pres.eval(e)? {
            Value::Bool(b) => {
                r.pass_if(e, b, "");
                values.push(json!({ "expr": e, "value": b }));
            }
            Value::Element(x) => {
                r.line(format!("{e} =\n{}", x.table().display()));
                values.push(json!({ "expr": e, "table": x.table().compact() }));
            }
        }
    }
    r.data = json!(values);
    Ok(r)
}

fn validate(p: &str) -> Result<Report> {
    let pres = load_presentation(p)?;
    let mut r = Report::new("validate");
    r.pass_if(
        "load",
        true,
        format!(
            "{} bisections, {} elements, {} covers",
            pres.bisections.len(),
            pres.elements.len(),
            pres.covers.len()
        ),
    );
    for (name, m) in &pres.multisections {
        match m.validate()? {
            None => r.pass_if(name, true, format!("degree {}", m.degree())),
            Some(v) => r.pass_if(name, false, v.to_string()),
        }
    }
    Ok(r)
}

fn gens(p: &str, depth: usize, packing: PackingArg, emit: Option<&str>) -> Result<Report> {
    let pres = load_presentation(p)?;
    let packing = match packing {
        PackingArg::PerCell => Packing::PerCell,
        PackingArg::Greedy => Packing::Greedy,
    };
    let g = &pres.groupoid;
    let rep = generating_set_with(g, &pres.basic, depth, packing)?;
    let mut r = Report::new("gens");
    let cells: Vec<String> = rep.partition.cells().iter().map(|w| g.space().format_word(w)).collect();
    r.line(format!("partition: {}", cells.join(" ")));
    for a in &rep.augmented {
        r.line(format!("augmented: {} = {}", a.name, a.bisection.compact()));
    }
    r.line(format!(
        "cover {}, T {}, multisections {}, generators {}",
        rep.cover.len(),
        rep.t.len(),
        rep.m.len(),
        rep.generators.len()
    ));
    match &rep.orbits {
        OrbitCheck::Verified { samples } => {
            r.pass_if("orbits", true, format!("{samples} samples meet at least five cells"))
        }
        OrbitCheck::Undetermined { sample, cells } => r.check(
            "orbits",
            Verdict::Inconclusive,
            format!("{} meets {cells} cells", g.space().format_word(sample)),
        ),
    }
    let mut bad = 0;
    for m in &rep.m {
        if m.validate()?.is_some() {
            bad += 1;
        }
    }
    r.pass_if("multisections", bad == 0, format!("{} of {} valid", rep.m.len() - bad, rep.m.len()));
    let file = GeneratorFile {
        version: 1,
        presentation: p.to_string(),
        depth,
        generators: rep
            .generators
            .iter()
            .map(|x| GeneratorEntry {
                name: x.name.clone(),
                table: x.element.table().compact(),
            })
            .collect(),
    };
    if let Some(path) = emit {
        write_file(path, &(serde_json::to_string_pretty(&file).expect("serializes") + "\n"))?;
        r.line(format!("wrote {path}"));
    }
    r.data = json!({ "partition": cells, "multisections": rep.m.len(), "generators": file.generators });
    Ok(r)
}

fn member(presentation: Option<&str>, element: &str, gens: &str, max_len: usize, max_states: usize) -> Result<Report> {
    let text = std::fs::read_to_string(gens).map_err(|e| Error::Load {
        path: gens.into(),
        reason: e.to_string(),
    })?;
    let file: GeneratorFile = serde_json::from_str(&text).map_err(|e| Error::Load {
        path: gens.into(),
        reason: e.to_string(),
    })?;
    let pres = load_presentation(presentation.unwrap_or(&file.presentation))?;
    let target = pres.element(element)?;
    let elements = file
        .generators
        .iter()
        .map(|x| Element::parse(&pres.groupoid, &x.table))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = file.generators.iter().map(|x| x.name.clone()).collect();
    let mut r = Report::new("member");
    match bounded_membership(&target, &elements, max_len, max_states)? {
        Membership::Found(w) => {
            r.pass_if(element, true, format!("length {}: {}", w.len(), w.format(&names)));
            r.data = json!({ "length": w.len(), "word": w.format(&names) });
        }
        Membership::Inconclusive { length, searched } => r.check(
            element,
            Verdict::Inconclusive,
            format!("no word of length <= {length} among {searched} searched"),
        ),
    }
    Ok(r)
}

fn expansive(p: &str, cover: &str, n: usize, m: usize, dot: Option<&str>, at: Option<&str>, radius: usize) -> Result<Report> {
    let pres = load_presentation(p)?;
    let cover = LabeledCover::new(pres.cover(cover)?.to_vec())?;
    let mut r = Report::new("expansive");
    let name = format!("separation n={n} m={m}");
    match separation_check(&cover, n, m)? {
        Separation::Expansive { n, m } => {
            r.pass_if(name, true, format!("expansive at ({n},{m})"));
            r.data = json!({ "result": "expansive", "n": n, "m": m });
        }
        Separation::Refuted { m, atoms } => {
            r.pass_if(name, false, format!("refuted: sources stabilise at length {m} with {atoms} atoms"));
            r.data = json!({ "result": "refuted", "m": m, "atoms": atoms });
        }
        Separation::Undetermined { n, m } => {
            r.check(name, Verdict::Inconclusive, format!("undetermined at ({n},{m})"));
            r.data = json!({ "result": "undetermined", "n": n, "m": m });
        }
    }
    if let (Some(path), Some(at)) = (dot, at) {
        let x = pres.space().parse_word(at)?;
        let ball = cayley_ball(&cover, &x, radius)?;
        write_file(path, &ball.to_dot(&cover))?;
        r.line(format!(
            "wrote {path}: ball of radius {radius} at {at}, {} vertices, {} edges",
            ball.vertices.len(),
            ball.edges.len()
        ));
    }
    Ok(r)
}

fn h0(p: &str, depth: usize, products: usize, coeff: &str) -> Result<Report> {
    if coeff != "z2" {
        return Err(Error::Parse(format!("unsupported coefficients `{coeff}`; only z2")));
    }
    let pres = load_presentation(p)?;
    let h = h0_z2(&pres.groupoid, &pres.basic, depth, products)?;
    let mut r = Report::new("h0");
    r.line(format!(
        "H0 at depth {depth}, products <= {products}: {h} (working depth {}, {} products, {} arrows, total rank {})",
        h.working_depth, h.products, h.arrows, h.total_rank
    ));
    r.data = json!({
        "rank": h.rank,
        "group": h.to_string(),
        "working_depth": h.working_depth,
        "total_rank": h.total_rank,
    });
    Ok(r)
}

fn qc_generate(q: &QcArgs, csv: Option<&str>) -> Result<Report> {
    let ps = sample(q)?;
    let mut r = Report::new("qc generate");
    match csv {
        Some(path) => {
            write_file(path, &ps.to_csv())?;
            r.line(format!("wrote {} points to {path}", ps.len()));
        }
        None => r.text.push_str(&ps.to_csv()),
    }
    match ps.period() {
        Some(v) => r.line(format!("periodic: Q + {v} = Q on the sample")),
        None => r.line("no period found"),
    }
    if ps.dimension == 1 {
        r.line(format!("gap word: {}", ps.gap_word()));
    }
    r.data = json!({
        "points": ps.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "period": ps.period().map(|v| v.to_string()),
    });
    Ok(r)
}

fn qc_check(q: &QcArgs, delta: f64, margin: Option<f64>, rule: Option<&str>) -> Result<Report> {
    let ps = sample(q)?;
    let margin = margin.unwrap_or(q.radius);
    let mut r = Report::new("qc check");
    let d = qc::check_delaunay(&ps, q.radius, delta, margin)?;
    let detail = format!(
        "margin {margin}, min distance {:.6}, covering radius {:.6}",
        d.min_distance, d.covering_radius
    );
    match &d.violation {
        None => r.pass_if("delaunay", true, detail),
        Some(v) => r.pass_if("delaunay", false, format!("{detail}; {v:?}")),
    }
    match qc::repetitivity_radius(&ps, q.radius) {
        Repetitivity::Verified { d, classes } => {
            r.pass_if("repetitivity", true, format!("{classes} classes within every ball of radius {d:.6}"))
        }
        Repetitivity::Unverified { reason } => r.check("repetitivity", Verdict::Inconclusive, reason),
    }
    let rips = qc::rips_h1_z2(&ps, q.radius);
    r.pass_if(
        "rips",
        rips.connected() && rips.beta1 == 0,
        format!(
            "{} vertices, {} edges, {} triangles, {} components, beta1 {}",
            rips.vertices, rips.edges, rips.triangles, rips.components, rips.beta1
        ),
    );
    if let Some(path) = rule {
        let rule = LocalRule::load(path)?;
        let perm = qc::local_rule_permutation(&ps, &rule)?;
        let lengths: Vec<String> = perm.orbit_lengths.iter().map(|(l, c)| format!("{c}x{l}")).collect();
        r.pass_if(
            "local rule",
            true,
            format!(
                "orbits {} ({} open at the boundary)",
                lengths.join(" "),
                perm.open_orbits
            ),
        );
    }
    Ok(r)
}

fn qc_patches(q: &QcArgs) -> Result<Report> {
    let ps = sample(q)?;
    let classes = qc::hull_patches(&ps, q.radius);
    let mut r = Report::new("qc patches");
    let data: Vec<_> = classes
        .iter()
        .map(|(c, n)| json!({ "offsets": c.offsets, "count": n }))
        .collect();
    r.data = json!({ "radius": q.radius, "classes": data });
    r.line(serde_json::to_string(&r.data).expect("serializes"));
    Ok(r)
}

fn qc_gens(q: &QcArgs, depth: usize) -> Result<Report> {
    let ps = sample(q)?;
    let (model, cover) = qc::translation_bisections(&ps, q.radius)?;
    let mut r = Report::new("qc gens");
    r.line(format!(
        "{}-block gap-word model, {} translation pieces of length <= {}",
        model.block,
        cover.len() / 2,
        q.radius
    ));
    let mut overlapping = 0;
    for b in cover.members() {
        if !b.bisection.source().is_disjoint(&b.bisection.range())? {
            overlapping += 1;
        }
    }
    r.pass_if("translations", overlapping == 0, format!("{} pieces, {overlapping} overlapping", cover.len()));
    let sym = qc::symbolic_presentation(&ps)?;
    let rep = generating_set_with(sym.groupoid(), &sym.presentation.basic, depth, Packing::PerCell)?;
    let mut bad = 0;
    for m in &rep.m {
        if m.validate()?.is_some() {
            bad += 1;
        }
    }
    r.pass_if(
        "generating set",
        !rep.generators.is_empty() && bad == 0,
        format!("{} generators from {} multisections, {bad} invalid", rep.generators.len(), rep.m.len()),
    );
    Ok(r)
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Algebra { p, exprs } => algebra(&p.presentation, exprs),
        Command::Validate { p } => validate(&p.presentation),
        Command::Gens { p, depth, packing, emit } => gens(&p.presentation, *depth, *packing, emit.as_deref()),
        Command::Member {
            presentation,
            element,
            gens,
            max_len,
            max_states,
        } => member(presentation.as_deref(), element, gens, *max_len, *max_states),
        Command::Expansive {
            p,
            cover,
            depth,
            len,
            dot,
            at,
            radius,
        } => expansive(&p.presentation, cover, *depth, *len, dot.as_deref(), at.as_deref(), *radius),
        Command::H0 { p, depth, products, coeff } => h0(&p.presentation, *depth, *products, coeff),
        Command::Qc { command } => match command {
            QcCommand::Generate { q, csv } => qc_generate(q, csv.as_deref()),
            QcCommand::Check { q, delta, margin, rule } => qc_check(q, *delta, *margin, rule.as_deref()),
            QcCommand::Patches { q } => qc_patches(q),
            QcCommand::Gens { q, depth } => qc_gens(q, *depth),
        },
        Command::Verify { only } => verify::run(only.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            print!("{}", r.render(cli.json));
            ExitCode::from(r.verdict.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "verdict": "error", "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
