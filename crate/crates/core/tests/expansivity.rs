use tfg::cylinder::{ClopenSet, Word};
use tfg::expansivity::{ball_isomorphic, cayley_ball, separation_check, u_n, LabeledCover, Separation};
use tfg::presentation::Presentation;
use tfg::Error;

fn cover(name: &str, cover: &str) -> (Presentation, LabeledCover) {
    let p = Presentation::bundled(name).unwrap();
    let c = LabeledCover::new(p.cover(cover).unwrap().to_vec()).unwrap();
    (p, c)
}

fn word(p: &Presentation, s: &str) -> Word {
    p.space().parse_word(s).unwrap()
}

#[test]
fn inverses_are_added() {
    let (_, c) = cover("shift2", "shift");
    assert_eq!(c.len(), 4);
    for i in 0..c.len() {
        let j = c.inverse_of(i);
        assert_eq!(c.inverse_of(j), i);
        assert_eq!(c.bisection(j), &c.bisection(i).inverse().unwrap());
    }
    assert_eq!(c.name(2), "S0^-1");
}

#[test]
fn balls_on_the_full_shift() {
    let (p, c) = cover("shift2", "shift");
    let x = word(&p, "01");
    let b0 = cayley_ball(&c, &x, 0).unwrap();
    assert_eq!(b0.vertices.len(), 1);
    assert!(b0.edges.is_empty());
    // one edge per label whose source contains the root
    let b1 = cayley_ball(&c, &x, 1).unwrap();
    let root = ClopenSet::cylinder(p.space(), x.clone());
    let expected: Vec<usize> = (0..c.len())
        .filter(|&l| root.is_subset(&c.bisection(l).source()).unwrap())
        .collect();
    let mut labels: Vec<usize> = b1.edges.iter().filter(|e| e.0 == 0).map(|e| e.1).collect();
    labels.sort();
    assert_eq!(labels, expected);
    assert_eq!(b1.vertices.len(), 1 + expected.len());
    assert!(b1.to_dot(&c).starts_with("digraph"));
    assert!(matches!(cayley_ball(&c, &x, 3), Err(Error::InsufficientPrecision(_))));
}

#[test]
fn at_most_one_edge_per_label() {
    let (p, c) = cover("shift2", "shift");
    let b = cayley_ball(&c, &word(&p, "01101"), 4).unwrap();
    for v in 0..b.vertices.len() {
        for l in 0..c.len() {
            assert!(b.edges.iter().filter(|e| e.0 == v && e.1 == l).count() <= 1);
            assert!(b.edges.iter().filter(|e| e.2 == v && e.1 == l).count() <= 1);
        }
    }
}

#[test]
fn af_balls_stabilize() {
    let (p, c) = cover("bratteli", "tails");
    for x in p.space().words_of_length(4) {
        let sizes: Vec<usize> = (2..=5).map(|r| cayley_ball(&c, &x, r).unwrap().vertices.len()).collect();
        assert!(sizes.windows(2).all(|w| w[0] == w[1]), "{sizes:?}");
    }
    assert!(ball_isomorphic(&c, &word(&p, "accc"), &word(&p, "accd"), 3).unwrap().isomorphic);
}

#[test]
fn neighbourhoods_shrink_to_cylinders() {
    let (p, c) = cover("shift2", "shift");
    for x in p.space().words_of_length(5) {
        assert!(u_n(&c, &x, 0).unwrap().is_whole());
        let mut prev = ClopenSet::whole(p.space());
        for n in 1..=4 {
            let u = u_n(&c, &x, n).unwrap();
            assert!(u.is_subset(&prev).unwrap());
            let prefix = Word::from_letters(x.letters()[..n].to_vec());
            assert_eq!(u, ClopenSet::cylinder(p.space(), prefix));
            prev = u;
        }
    }
}

#[test]
fn distinct_roots_have_distinct_balls() {
    let (p, c) = cover("shift2", "shift");
    for n in 1..=4 {
        let words = p.space().words_of_length(n);
        for (i, x) in words.iter().enumerate() {
            assert!(ball_isomorphic(&c, x, x, n).unwrap().isomorphic);
            for y in &words[i + 1..] {
                let cmp = ball_isomorphic(&c, x, y, n).unwrap();
                assert!(!cmp.isomorphic);
                assert!(cmp.witness.is_some_and(|w| w.len() <= n));
            }
        }
    }
}

#[test]
fn separation_verdicts() {
    let (_, c) = cover("shift2", "shift");
    for n in 1..=5 {
        assert_eq!(separation_check(&c, n, n).unwrap(), Separation::Expansive { n, m: n });
        assert_eq!(separation_check(&c, n, n + 2).unwrap(), Separation::Expansive { n, m: n });
    }
    assert!(matches!(separation_check(&c, 4, 2).unwrap(), Separation::Undetermined { .. }));
    for (name, cov) in [("bratteli", "tails"), ("odometer", "tree")] {
        let (_, c) = cover(name, cov);
        assert!(matches!(separation_check(&c, 3, 8).unwrap(), Separation::Refuted { .. }), "{name}");
    }
}
