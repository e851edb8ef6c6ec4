use tfg::bisection::Bisection;
use tfg::cylinder::ClopenSet;
use tfg::fullgroup::Element;
use tfg::generators::bounded_membership;
use tfg::homology0::{h0_z2, to_quotient_rep};
use tfg::multisection::Multisection;
use tfg::presentation::Presentation;

#[test]
fn parity_of_full_shifts() {
    for k in 2..=5 {
        let p = Presentation::bundled(&format!("shift{k}")).unwrap();
        // every letter class equals c, and 1 = k·c = c forces (k-1)·c = 0
        let expect = if (k - 1) % 2 == 0 { 1 } else { 0 };
        for depth in 1..=4 {
            let h = h0_z2(&p.groupoid, &p.basic, depth, 3).unwrap();
            assert_eq!(h.rank, expect, "k={k} depth={depth}");
            assert_eq!((h.depth, h.product_bound), (depth, 3));
        }
    }
}

#[test]
fn no_relations_without_bisections() {
    let p = Presentation::bundled("shift3").unwrap();
    for depth in 1..=3 {
        let h = h0_z2(&p.groupoid, &[], depth, 3).unwrap();
        assert_eq!(h.rank, 3usize.pow(depth as u32));
    }
}

#[test]
fn classes() {
    let p = Presentation::bundled("example7").unwrap();
    let h = h0_z2(&p.groupoid, &p.basic, 2, 3).unwrap();
    assert_eq!(h.rank, 1);
    let s = p.space();
    assert!(h.class_of(&ClopenSet::empty(s)).unwrap().is_zero());
    let whole = h.class_of(&ClopenSet::whole(s)).unwrap();
    assert!(!whole.is_zero());
    for words in [&["1"][..], &["12", "3"], &["21", "22", "23", "31"]] {
        let u = p.clopen(words).unwrap();
        let sum = h.class_of(&u).unwrap().add(&h.class_of(&u.complement()).unwrap());
        assert_eq!(sum, whole);
        let twice = h.class_of(&u).unwrap().add(&h.class_of(&u).unwrap());
        assert!(twice.is_zero());
    }
    for b in &p.basic {
        let f = &b.bisection;
        assert_eq!(h.class_of(&f.source()).unwrap(), h.class_of(&f.range()).unwrap(), "{}", b.name);
    }
    let other = Presentation::bundled("shift3").unwrap();
    assert!(h.class_of(&ClopenSet::whole(other.space())).is_err());
}

#[test]
fn quotient_representatives() {
    let p = Presentation::bundled("example7").unwrap();
    let g = &p.groupoid;
    let rep = to_quotient_rep(g, &p.basic, &p.clopen(&["11"]).unwrap(), 4).unwrap();
    assert!(rep.element.equals(&p.element("gh").unwrap()).unwrap());
    assert_eq!(rep.bisection.source().to_strings(), ["11"]);
    assert!(rep.element.multiply(&rep.element).unwrap().is_identity());
    let empty = to_quotient_rep(g, &p.basic, &ClopenSet::empty(p.space()), 4).unwrap();
    assert!(empty.element.is_identity());
    assert!(to_quotient_rep(g, &[], &p.clopen(&["11"]).unwrap(), 4).is_err());
}

#[test]
fn two_choices_differ_by_an_alternating_element() {
    let p = Presentation::bundled("example7").unwrap();
    let g = &p.groupoid;
    let f1 = Bisection::parse(g, "11:id:12").unwrap();
    let f2 = Bisection::parse(g, "11:id:13").unwrap();
    assert!(f1.range().is_disjoint(&f2.range()).unwrap());
    let (t1, t2) = (Element::tau(&f1).unwrap(), Element::tau(&f2).unwrap());
    let target = t1.multiply(&t2.invert().unwrap()).unwrap();
    let w = p.clopen(&["11"]).unwrap();
    let m = Multisection::from_spokes(&[Bisection::identity_on(g, &w), f1, f2], &w).unwrap();
    let gens = m.alternating_generators().unwrap();
    let found = bounded_membership(&target, &gens, 2, 1000).unwrap();
    assert!(found.witness().is_some());
}

#[test]
fn disjoint_involutions_commute() {
    let p = Presentation::bundled("example7").unwrap();
    let g = &p.groupoid;
    let t1 = Element::tau(&Bisection::parse(g, "11:id:12").unwrap()).unwrap();
    let t2 = Element::tau(&Bisection::parse(g, "2:a:31").unwrap()).unwrap();
    let t3 = Element::tau(&Bisection::parse(g, "12:id:2").unwrap()).unwrap();
    assert!(t1.multiply(&t2).unwrap().equals(&t2.multiply(&t1).unwrap()).unwrap());
    assert!(!t1.multiply(&t3).unwrap().equals(&t3.multiply(&t1).unwrap()).unwrap());
}
