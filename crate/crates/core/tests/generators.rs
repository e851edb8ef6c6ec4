use tfg::bisection::Bisection;
use tfg::cylinder::ClopenSet;
use tfg::fullgroup::Element;
use tfg::generators::{
    bounded_membership, build_cover, build_m, build_t, choose_partition, generating_set, uncovered, GenWord,
    Membership, OrbitCheck, Partition,
};
use tfg::multisection::Multisection;
use tfg::perm::{closure_order, Perm};
use tfg::presentation::Presentation;

fn cells(p: &Presentation, part: &Partition) -> Vec<String> {
    part.cells().iter().map(|w| p.space().format_word(w)).collect()
}

#[test]
fn partitions() {
    let p = Presentation::bundled("shift5").unwrap();
    let r = choose_partition(&p.groupoid, &p.basic, 1).unwrap();
    assert_eq!(cells(&p, &r.partition), ["1", "2", "3", "4", "5"]);
    assert!(matches!(r.orbits, OrbitCheck::Verified { .. }));
    assert!(r.augmented.is_empty());

    let p = Presentation::bundled("shift2").unwrap();
    let r = choose_partition(&p.groupoid, &p.basic, 3).unwrap();
    assert_eq!(r.partition.len(), 8);
    assert!(matches!(r.orbits, OrbitCheck::Verified { .. }));

    let p = Presentation::bundled("golden_mean").unwrap();
    let r = choose_partition(&p.groupoid, &p.basic, 4).unwrap();
    assert!(matches!(r.orbits, OrbitCheck::Verified { .. }));
    let sets = r.partition.sets(&p.groupoid);
    let mut union = ClopenSet::empty(p.space());
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            assert!(a.is_disjoint(b).unwrap());
        }
        union = union.union(a).unwrap();
    }
    assert!(union.is_whole());
    // no basic germ stays inside one cell
    for b in &p.basic {
        for a in b.bisection.arrows() {
            let from = r.partition.part_of(&a.dom);
            assert!(from.is_none() || from != r.partition.part_of(&a.ran), "{}", b.name);
        }
    }
}

#[test]
fn t_separates_parts() {
    let p = Presentation::bundled("shift5").unwrap();
    let r = choose_partition(&p.groupoid, &p.basic, 1).unwrap();
    assert!(build_t(&[], &r.partition).unwrap().is_empty());
    let cover = build_cover(&p.groupoid, &p.basic, &r).unwrap();
    let t = build_t(&cover, &r.partition).unwrap();
    let sets = r.partition.sets(&p.groupoid);
    for b in &t {
        assert!(b.source().is_disjoint(&b.range()).unwrap());
        let from = sets.iter().position(|s| b.source().is_subset(s).unwrap());
        let to = sets.iter().position(|s| b.range().is_subset(s).unwrap());
        assert!(from.is_some() && to.is_some() && from != to);
    }
    // the letter exchanges themselves are products of at most three cover pieces
    for (x, y) in [("1", "2"), ("3", "5"), ("4", "1")] {
        let e = Bisection::parse(&p.groupoid, &format!("{x}:id:{y}")).unwrap();
        let mut rest = e.clone();
        for b in &t {
            rest = rest.minus(&rest.intersect(b).unwrap()).unwrap();
        }
        assert!(rest.is_empty(), "{x} -> {y}");
    }
}

#[test]
fn multisections_cover_t() {
    let p = Presentation::bundled("shift5").unwrap();
    let r = choose_partition(&p.groupoid, &p.basic, 1).unwrap();
    let cover = build_cover(&p.groupoid, &p.basic, &r).unwrap();
    let t = build_t(&cover, &r.partition).unwrap();
    let m = build_m(&t, &cover, &r.partition).unwrap();
    assert!(build_m(&[], &cover, &r.partition).unwrap().is_empty());
    for x in &m {
        assert_eq!(x.degree(), 5);
        assert_eq!(x.validate().unwrap(), None);
        let mut parts: Vec<_> = x
            .components()
            .iter()
            .map(|c| r.partition.sets(&p.groupoid).iter().position(|s| c.is_subset(s).unwrap()))
            .collect();
        assert!(parts.iter().all(Option::is_some));
        parts.sort();
        parts.dedup();
        assert_eq!(parts.len(), 5);
    }
    assert!(uncovered(&t, &m, &r.partition).unwrap().is_none());
    let truncated: Vec<Multisection> = m[..m.len() / 2].to_vec();
    let missing = uncovered(&t, &truncated, &r.partition).unwrap().expect("a missing cell");
    assert!(t.contains(&missing));
}

/// The permutation of the letter cylinders, if `e` permutes them.
fn letter_perm(p: &Presentation, e: &Element) -> Option<Perm> {
    let letters = p.space().words_of_length(1);
    let mut images = Vec::new();
    for w in &letters {
        let img = e.table().image(&ClopenSet::canonicalize(p.space(), vec![w.clone()])).unwrap();
        let k = letters.iter().position(|v| img.words() == [v.clone()])?;
        images.push(k as u8);
    }
    Perm::from_images(images)
}

#[test]
fn five_letter_generators() {
    let p = Presentation::bundled("shift5").unwrap();
    let rep = generating_set(&p.groupoid, &p.basic, 1).unwrap();
    assert_eq!(rep.generators.len(), 3 * rep.m.len());
    let perms: Vec<Vec<Perm>> = rep
        .generators
        .iter()
        .filter_map(|g| letter_perm(&p, &g.element))
        .map(|x| vec![x])
        .collect();
    assert!(perms.iter().all(|x| x[0].is_even()));
    assert_eq!(closure_order(&perms), 60);
}

#[test]
fn membership() {
    let p = Presentation::bundled("shift5").unwrap();
    let m = {
        let w = p.clopen(&["1"]).unwrap();
        let spokes: Vec<Bisection> = ["1", "2", "3", "4", "5"]
            .iter()
            .map(|y| Bisection::parse(&p.groupoid, &format!("1:id:{y}")).unwrap())
            .collect();
        Multisection::from_spokes(&spokes, &w).unwrap()
    };
    let gens = m.alternating_generators().unwrap();
    let id = Element::identity(&p.groupoid);
    assert_eq!(bounded_membership(&id, &gens, 3, 1000).unwrap(), Membership::Found(GenWord::default()));
    for (i, g) in gens.iter().enumerate() {
        let w = bounded_membership(g, &gens, 3, 1000).unwrap();
        assert_eq!(w, Membership::Found(GenWord(vec![(i, false)])));
    }
    // (1 3)(2 4) needs two 3-cycles
    let target = m.embed(&Perm::from_images(vec![2, 3, 0, 1, 4]).unwrap()).unwrap();
    let Membership::Found(w) = bounded_membership(&target, &gens, 4, 100_000).unwrap() else {
        panic!("no witness");
    };
    assert!(w.evaluate(&gens, &id).unwrap().equals(&target).unwrap());
    assert!(w.len() >= 2);
    // an odd permutation is out of reach; the answer stays inconclusive
    let odd = m.embed(&Perm::from_images(vec![1, 0, 2, 3, 4]).unwrap()).unwrap();
    assert!(matches!(
        bounded_membership(&odd, &gens, 4, 100_000).unwrap(),
        Membership::Inconclusive { .. }
    ));
}
