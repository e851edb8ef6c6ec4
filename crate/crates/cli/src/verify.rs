//! The replay suite behind `tfg verify`.

use tfg::expansivity::{separation_check, LabeledCover, Separation};
use tfg::expr::Value;
use tfg::fullgroup::Element;
use tfg::generators::{bounded_conjugator, bounded_membership, generating_set, Membership};
use tfg::homology0::h0_z2;
use tfg::perm::{closure_order, Perm};
use tfg::presentation::Presentation;
use tfg::quasicrystal::{self as qc, CutProjectParams, LocalRule, ZPhi};
use tfg::Result;

use crate::report::{Report, Verdict};

type CheckFn = fn(&mut Report) -> Result<()>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("example7 identities", example7_identities),
    ("example7 conjugacy", example7_conjugacy),
    ("A5 cube closure", a5_closure),
    ("full shift expansive", shift_expansive),
    ("AF not expansive", af_refuted),
    ("h0 parity", h0_parity),
    ("h0 example7", h0_example7),
    ("fibonacci pipeline", fibonacci),
    ("example7 gh membership", example7_membership),
];

pub fn run(only: Option<&str>) -> Result<Report> {
    let mut r = Report::new("verify");
    for (name, f) in CHECKS {
        if only.is_some_and(|o| !name.contains(o)) {
            continue;
        }
        let before = r.checks.len();
        if let Err(e) = f(&mut r) {
            r.check(*name, Verdict::Inconclusive, format!("error: {e}"));
        }
        if r.checks.len() == before {
            r.check(*name, Verdict::Inconclusive, "no result");
        }
    }
    Ok(r)
}

fn statement(r: &mut Report, p: &Presentation, s: &str) -> Result<()> {
    let ok = matches!(p.eval(s)?, Value::Bool(true));
    r.pass_if(format!("example7: {s}"), ok, "");
    Ok(())
}

fn example7_identities(r: &mut Report) -> Result<()> {
    let p = Presentation::bundled("example7")?;
    for s in ["g == g_split", "g*h^-1 == gh", "tau(F) == gh", "gh*gh == id"] {
        statement(r, &p, s)?;
    }
    let support = p.element("gh")?.support();
    r.pass_if(
        "example7: support of gh",
        support.to_strings() == ["11", "12"],
        support.display(),
    );
    Ok(())
}

fn example7_conjugacy(r: &mut Report) -> Result<()> {
    let p = Presentation::bundled("example7")?;
    let taus: Vec<Element> = p
        .basic
        .iter()
        .filter_map(|b| Element::tau(&b.bisection).ok())
        .collect();
    let (g, h) = (p.element("g")?, p.element("h")?);
    match bounded_conjugator(&g, &h, &taus, 4, 200_000)? {
        Some((w, _)) => r.pass_if("example7: g conjugate to h", true, format!("conjugator of length {}", w.len())),
        None => r.check(
            "example7: g conjugate to h",
            Verdict::Inconclusive,
            "no conjugator of length <= 4",
        ),
    }
    Ok(())
}

fn a5_closure(r: &mut Report) -> Result<()> {
    let id = Perm::identity(5);
    let mut gens = Vec::new();
    for pi in Perm::alternating(5) {
        gens.push(vec![pi.clone(), pi.clone(), id.clone()]);
        gens.push(vec![id.clone(), pi.clone(), pi]);
    }
    let order = closure_order(&gens);
    r.pass_if("A5 cube closure", order == 216_000, format!("order {order}"));
    Ok(())
}

fn shift_expansive(r: &mut Report) -> Result<()> {
    let p = Presentation::bundled("shift2")?;
    let cover = LabeledCover::new(p.cover("shift")?.to_vec())?;
    for n in 1..=6 {
        let s = separation_check(&cover, n, n)?;
        r.pass_if(
            format!("shift2 expansive at ({n},{n})"),
            s == Separation::Expansive { n, m: n },
            format!("{s:?}"),
        );
    }
    Ok(())
}

fn af_refuted(r: &mut Report) -> Result<()> {
    for (name, cover) in [("bratteli", "tails"), ("odometer", "tree")] {
        let p = Presentation::bundled(name)?;
        let cover = LabeledCover::new(p.cover(cover)?.to_vec())?;
        let s = separation_check(&cover, 3, 8)?;
        r.pass_if(
            format!("{name} refuted"),
            matches!(s, Separation::Refuted { .. }),
            format!("{s:?}"),
        );
    }
    Ok(())
}

fn h0_parity(r: &mut Report) -> Result<()> {
    for k in 2..=5 {
        let p = Presentation::bundled(&format!("shift{k}"))?;
        let mut ranks = Vec::new();
        for depth in 1..=4 {
            ranks.push(h0_z2(&p.groupoid, &p.basic, depth, 3)?.rank);
        }
        r.pass_if(
            format!("h0 of the {k}-letter shift"),
            ranks.iter().all(|x| *x == k % 2),
            format!("ranks at depths 1..4: {ranks:?}"),
        );
    }
    Ok(())
}

fn h0_example7(r: &mut Report) -> Result<()> {
    let p = Presentation::bundled("example7")?;
    let h = h0_z2(&p.groupoid, &p.basic, 1, 3)?;
    r.pass_if("h0 example7 is Z/2", h.rank == 1, h.to_string());
    Ok(())
}

fn fibonacci(r: &mut Report) -> Result<()> {
    let ps = qc::cut_and_project(&CutProjectParams::fibonacci(), ZPhi::ZERO, ZPhi::int(200))?;
    let d = qc::check_delaunay(&ps, 1.62, 0.99, 2.0)?;
    r.pass_if("fibonacci delaunay", d.ok(), format!("covering radius {:.4}", d.covering_radius));
    let w = ps.gap_word();
    r.pass_if(
        "fibonacci gap word",
        w.len() >= 100 && w[..100] == qc::fibonacci_word(100),
        format!("{} gaps", w.len()),
    );
    let rips = qc::rips_h1_z2(&ps, qc::PHI);
    r.pass_if(
        "fibonacci rips",
        rips.connected() && rips.beta1 == 0,
        format!("{} components, beta1 {}", rips.components, rips.beta1),
    );
    let perm = qc::local_rule_permutation(&ps, &LocalRule::fibonacci())?;
    r.pass_if(
        "fibonacci 3-cycle rule",
        perm.orbit_lengths.keys().all(|l| *l == 1 || *l == 3),
        format!("{:?}", perm.orbit_lengths),
    );
    let sym = qc::symbolic_presentation(&ps)?;
    let rep = generating_set(sym.groupoid(), &sym.presentation.basic, 1)?;
    let valid = rep.m.iter().all(|m| matches!(m.validate(), Ok(None)));
    r.pass_if(
        "fibonacci generating set",
        !rep.generators.is_empty() && valid,
        format!("{} generators", rep.generators.len()),
    );
    Ok(())
}

fn example7_membership(r: &mut Report) -> Result<()> {
    let p = Presentation::bundled("example7")?;
    let rep = generating_set(&p.groupoid, &p.basic, 1)?;
    let gens: Vec<Element> = rep.generators.iter().map(|x| x.element.clone()).collect();
    match bounded_membership(&p.element("gh")?, &gens, 4, 3_000_000)? {
        Membership::Found(w) => r.pass_if(
            "example7: gh in the generated group",
            true,
            format!("witness of length {} over {} generators", w.len(), gens.len()),
        ),
        Membership::Inconclusive { length, .. } => r.check(
            "example7: gh in the generated group",
            Verdict::Inconclusive,
            format!("nothing up to length {length}"),
        ),
    }
    Ok(())
}
