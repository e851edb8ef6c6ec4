mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use tfg::bisection::{Bisection, Groupoid};
use tfg::cylinder::{ClopenSet, SequenceSpace, Word};
use tfg::fullgroup::Element;
use tfg::generators::{bounded_membership, Membership};
use tfg::multisection::{Multisection, Violation};
use tfg::perm::Perm;

use common::{action, example7, random_set, rng};

fn five() -> Arc<Groupoid> {
    Groupoid::plain(SequenceSpace::full_shift(&["1", "2", "3", "4", "5"]).unwrap())
}

fn spokes(g: &Arc<Groupoid>, from: &str, to: &[&str]) -> Vec<Bisection> {
    to.iter()
        .map(|w| Bisection::parse(g, &format!("{from}:id:{w}")).unwrap())
        .collect()
}

fn whole_on(g: &Arc<Groupoid>, from: &str, to: &[&str]) -> Multisection {
    let w = ClopenSet::parse(g.space(), &[from]).unwrap();
    Multisection::from_spokes(&spokes(g, from, to), &w).unwrap()
}

/// A degree-`d` multisection on the example7 groupoid: `d` distinct depth-2
/// cylinders, spokes labelled by random germs, `W` a random subset of the
/// first.
fn random_multisection(seed: u64, d: usize) -> Multisection {
    let g = example7().groupoid;
    let mut r = rng(seed);
    let mut cells = g.space().words_of_length(2);
    cells.shuffle(&mut r);
    let cells = &cells[..d];
    let labels = ["id", "a", "a^-1"];
    let hs: Vec<Bisection> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let label = if i == 0 { "id" } else { labels[r.gen_range(0..3)] };
            let s = format!(
                "{}:{label}:{}",
                g.space().format_word(&cells[0]),
                g.space().format_word(c)
            );
            Bisection::parse(&g, &s).unwrap()
        })
        .collect();
    let inside = random_set(g.space(), &mut r, 3);
    let w = ClopenSet::canonicalize(
        g.space(),
        inside.words().iter().map(|x| cells[0].concat(x)).collect(),
    );
    Multisection::from_spokes(&hs, &w).unwrap()
}

#[test]
fn degree_three_from_spokes() {
    let g = Groupoid::plain(SequenceSpace::full_shift(&["0", "1"]).unwrap());
    let m = whole_on(&g, "00", &["00", "01", "10"]);
    assert_eq!(m.validate().unwrap(), None);
    let comps: Vec<_> = m.components().iter().map(|c| c.to_strings()).collect();
    assert_eq!(comps, [vec!["00"], vec!["01"], vec!["10"]]);
    // pointwise at depth 4: F[i][j] sends cell i to cell j keeping the tail
    for i in 0..3 {
        for j in 0..3 {
            let e = m.entry(i, j);
            for w in g.space().words_of_length(4) {
                let Some(rest) = w.strip_prefix(&m.component(i).words()[0]) else {
                    continue;
                };
                let a = e.arrows().iter().find(|a| a.dom.is_prefix_of(&w)).unwrap();
                let img = a.ran.concat(&g.apply(a.germ, &w.strip_prefix(&a.dom).unwrap()));
                assert_eq!(img, m.component(j).words()[0].concat(&rest));
            }
        }
    }
}

#[test]
fn validation_failures() {
    let g = five();
    let m = whole_on(&g, "1", &["1", "2", "3"]);
    let mut grid = m.grid().to_vec();
    grid[0][2] = Bisection::parse(&g, "1:id:4").unwrap();
    assert_eq!(
        Multisection::unchecked(grid).validate().unwrap(),
        Some(Violation::Cocycle(0, 1, 2))
    );
    let mut grid = m.grid().to_vec();
    grid[1][1] = Bisection::parse(&g, "2:id:3").unwrap();
    assert!(Multisection::unchecked(grid).validate().unwrap().is_some());
    let w = ClopenSet::parse(g.space(), &["1"]).unwrap();
    assert!(Multisection::from_spokes(&spokes(&g, "1", &["1", "2", "2"]), &w).is_err());
    assert!(Multisection::from_spokes(&spokes(&g, "1", &["2", "1"]), &w).is_err());
    let big = ClopenSet::parse(g.space(), &["1", "2"]).unwrap();
    assert!(Multisection::from_spokes(&spokes(&g, "1", &["1", "2"]), &big).is_err());
}

#[test]
fn embedding_of_degree_four() {
    let g = five();
    let m = whole_on(&g, "1", &["1", "2", "3", "4"]);
    let all = Perm::all(4);
    assert!(m.embed(&Perm::identity(4)).unwrap().is_identity());
    for p in &all {
        let e = m.embed(p).unwrap();
        assert!(m.embed(&p.inverse()).unwrap().equals(&e.invert().unwrap()).unwrap());
        for q in &all {
            let lhs = m.embed(&p.then(q)).unwrap();
            let rhs = e.multiply(&m.embed(q).unwrap()).unwrap();
            assert!(lhs.equals(&rhs).unwrap());
        }
        // the letter cylinders are permuted as p says
        let moved = action(&e, 1);
        for i in 0..4 {
            let letter = g.space().format_word(&Word::from_letters(moved[i].letters()[..1].to_vec()));
            assert_eq!(letter, (p.image(i) + 1).to_string());
        }
    }
}

#[test]
fn alternating_generators_realize_a5() {
    let g = five();
    let m = whole_on(&g, "1", &["1", "2", "3", "4", "5"]);
    let gens = m.alternating_generators().unwrap();
    assert_eq!(gens.len(), 3);
    // closure on the five letter cylinders
    let perm_of = |e: &Element| -> Vec<u8> {
        action(e, 1).iter().map(|w| w.letters()[0] as u8).collect()
    };
    let gp: Vec<Vec<Perm>> = gens
        .iter()
        .map(|e| vec![Perm::from_images(perm_of(e)).unwrap()])
        .collect();
    assert_eq!(tfg::perm::closure_order(&gp), 60);
    let w = bounded_membership(&gens[1], &gens, 1, 1000).unwrap();
    assert!(matches!(w, Membership::Found(ref x) if x.len() == 1));
    assert!(whole_on(&g, "1", &["1", "2"]).alternating_generators().unwrap().is_empty());
}

#[test]
fn restriction() {
    let g = five();
    let m = whole_on(&g, "1", &["1", "2", "3"]);
    assert_eq!(m.restrict(&m.component(0), 0).unwrap(), m);
    assert!(m.restrict(&ClopenSet::empty(g.space()), 0).unwrap().is_empty());
    let u = ClopenSet::parse(g.space(), &["21", "24"]).unwrap();
    let r = m.restrict(&u, 1).unwrap();
    assert_eq!(r.validate().unwrap(), None);
    let comps: Vec<_> = r.components().iter().map(|c| c.to_strings()).collect();
    assert_eq!(comps, [vec!["11", "14"], vec!["21", "24"], vec!["31", "34"]]);
    assert!(m.restrict(&ClopenSet::parse(g.space(), &["4"]).unwrap(), 0).is_err());
}

#[test]
fn split_by_cover() {
    let g = five();
    let m = whole_on(&g, "1", &["1", "2", "3", "4", "5"]);
    let s = g.space();
    let f1 = m.restrict(&ClopenSet::parse(s, &["11", "12", "13"]).unwrap(), 0).unwrap();
    let f2 = m.restrict(&ClopenSet::parse(s, &["13", "14", "15"]).unwrap(), 0).unwrap();
    let (p, d1, d2) = m.split_by_cover(&f1, &f2).unwrap();
    assert_eq!(p.component(0).to_strings(), ["13"]);
    assert_eq!(d1.component(0).to_strings(), ["11", "12"]);
    assert_eq!(d2.component(0).to_strings(), ["14", "15"]);
    for i in 0..5 {
        for j in 0..5 {
            let u = p.entry(i, j).disjoint_union(d1.entry(i, j)).unwrap();
            let u = u.disjoint_union(d2.entry(i, j)).unwrap();
            assert!(u.equals(m.entry(i, j)).unwrap());
        }
    }
    let parts: Vec<Element> = [&p, &d1, &d2]
        .iter()
        .flat_map(|x| x.alternating_generators().unwrap())
        .collect();
    for target in m.alternating_generators().unwrap() {
        let w = bounded_membership(&target, &parts, 12, 200_000).unwrap();
        assert!(w.witness().is_some_and(|x| x.len() <= 3));
    }

    let (p, d1, d2) = m.split_by_cover(&m, &m).unwrap();
    assert_eq!(p, m);
    assert!(d1.is_empty() && d2.is_empty());
    let a = m.restrict(&ClopenSet::parse(s, &["11", "12"]).unwrap(), 0).unwrap();
    let b = m.restrict(&ClopenSet::parse(s, &["13", "14", "15"]).unwrap(), 0).unwrap();
    assert!(m.split_by_cover(&a, &b).unwrap().0.is_empty());
    assert!(m.split_by_cover(&a, &a).is_err());
}

#[test]
fn gluing() {
    let g = five();
    let a = whole_on(&g, "1", &["1", "2", "3"]);
    let h = whole_on(&g, "11", &["11", "41", "51"]);
    let glued = Multisection::glue(&a, &h).unwrap();
    assert_eq!(glued.degree(), 5);
    let r = a.restrict(&ClopenSet::parse(g.space(), &["11"]).unwrap(), 0).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert!(glued.entry(i, j).equals(r.entry(i, j)).unwrap());
        }
    }
    let comps: Vec<_> = glued.components().iter().map(|c| c.to_strings()).collect();
    assert_eq!(comps, [["11"], ["21"], ["31"], ["41"], ["51"]]);
    let clash = whole_on(&g, "11", &["11", "21", "51"]);
    assert!(Multisection::glue(&a, &clash).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn random_spokes_validate(seed in any::<u64>(), d in 3usize..=5) {
        let m = random_multisection(seed, d);
        prop_assert_eq!(m.validate().unwrap(), None);
        for i in 0..d {
            for j in 0..d {
                prop_assert!(m.entry(j, i).equals(&m.entry(i, j).inverse().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn embedding_is_a_homomorphism(seed in any::<u64>(), d in 3usize..=5) {
        let m = random_multisection(seed, d);
        let mut r = rng(seed ^ 7);
        let all = Perm::all(d);
        for _ in 0..4 {
            let p = all.choose(&mut r).unwrap();
            let q = all.choose(&mut r).unwrap();
            let lhs = m.embed(&p.then(q)).unwrap();
            let rhs = m.embed(p).unwrap().multiply(&m.embed(q).unwrap()).unwrap();
            prop_assert!(lhs.equals(&rhs).unwrap());
            prop_assert_eq!(action(&lhs, 4), action(&rhs, 4));
        }
    }

    #[test]
    fn restriction_commutes_with_embedding(seed in any::<u64>(), d in 3usize..=5) {
        let m = random_multisection(seed, d);
        let mut r = rng(seed ^ 11);
        let i = r.gen_range(0..d);
        let c = m.component(i);
        let sub = random_set(c.space(), &mut r, 2);
        let u = c.intersect(&ClopenSet::canonicalize(
            c.space(),
            c.words().iter().flat_map(|w| sub.words().iter().map(move |x| w.concat(x))).collect(),
        )).unwrap();
        let rm = m.restrict(&u, i).unwrap();
        prop_assert_eq!(rm.validate().unwrap(), None);
        let pi = Perm::all(d).choose(&mut r).unwrap().clone();
        let whole = m.embed(&pi).unwrap();
        let cut = whole.table().restrict(&rm.domain().unwrap()).unwrap();
        let expect = Element::extend_by_identity(&cut).unwrap();
        prop_assert!(rm.embed(&pi).unwrap().equals(&expect).unwrap());
    }
}
