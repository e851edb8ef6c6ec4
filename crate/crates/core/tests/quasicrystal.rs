use proptest::prelude::*;
use tfg::quasicrystal::{
    self as qc, check_delaunay, cut_and_project, hull_patches, local_complexity, local_rule_permutation,
    patch_occurrences, repetitivity_radius, rips_h1_z2, CutProjectParams, DelaunayViolation, LocalRule, PointSample,
    Pt, Repetitivity, Rule, Slope, ZPhi,
};

fn fib(lo: i64, hi: i64) -> PointSample {
    cut_and_project(&CutProjectParams::fibonacci(), ZPhi::int(lo), ZPhi::int(hi)).unwrap()
}

fn z(s: &str) -> ZPhi {
    s.parse().unwrap()
}

/// b -> ba, a -> b, iterated from "b", with gaps a = 1 and b = φ.
fn substitution_word(n: usize) -> String {
    let mut w = String::from("b");
    while w.len() < n {
        w = w.chars().map(|c| if c == 'b' { "ba" } else { "b" }).collect();
    }
    w.truncate(n);
    w
}

#[test]
fn golden_integers() {
    assert_eq!(ZPhi::PHI * ZPhi::PHI, ZPhi::PHI + ZPhi::ONE);
    assert_eq!(z("2-phi").to_string(), "2-φ");
    assert_eq!(z("3 - 2*phi"), ZPhi::new(3, -2));
    assert_eq!(z("-1+φ"), ZPhi::new(-1, 1));
    assert!(z("phi") > z("1") && z("2 - phi") < z("1"));
    assert!(ZPhi::new(-1, 1) * ZPhi::PHI == ZPhi::ONE);
    assert!("1+".parse::<ZPhi>().is_err());
    assert_eq!("1,phi".parse::<Pt>().unwrap(), Pt(ZPhi::ONE, ZPhi::PHI));
}

#[test]
fn fibonacci_sample() {
    let ps = fib(0, 20);
    assert_eq!(ps.gap_alphabet(), [ZPhi::ONE, ZPhi::PHI]);
    let w = ps.gap_word();
    assert_eq!(w, &substitution_word(w.len())[..]);
    assert_eq!(qc::fibonacci_word(40), substitution_word(40));
    assert!(ps.period().is_none());
    let csv = ps.to_csv();
    assert_eq!(csv.lines().count(), ps.len() + 1);

    let empty = CutProjectParams {
        window: [ZPhi::ONE, ZPhi::ONE],
        ..CutProjectParams::fibonacci()
    };
    assert!(cut_and_project(&empty, ZPhi::ZERO, ZPhi::int(20)).unwrap().is_empty());
    let lattice = CutProjectParams {
        slope: Slope::Integer,
        ..CutProjectParams::fibonacci()
    };
    let ps = cut_and_project(&lattice, ZPhi::ZERO, ZPhi::int(20)).unwrap();
    assert_eq!(ps.len(), 21);
    assert_eq!(ps.period(), Some(ZPhi::ONE));
}

#[test]
fn bundled_parameters_load() {
    assert_eq!(CutProjectParams::load("fibonacci").unwrap(), CutProjectParams::fibonacci());
    let err = CutProjectParams::load("/nonexistent/params.json").unwrap_err();
    assert!(err.to_string().contains("/nonexistent/params.json"));
    assert_eq!(LocalRule::fibonacci().rules.len(), 3);
}

#[test]
fn delaunay_bounds() {
    let ps = fib(0, 200);
    let ok = check_delaunay(&ps, 1.62, 0.99, 2.0).unwrap();
    assert!(ok.ok());
    assert_eq!(ok.min_distance, 1.0);
    assert!((ok.covering_radius - qc::PHI / 2.0).abs() < 1e-9);
    let bad = check_delaunay(&ps, 1.62, 1.5, 2.0).unwrap();
    assert!(matches!(bad.violation, Some(DelaunayViolation::TooClose { distance, .. }) if distance == 1.0));
    let holey = check_delaunay(&ps, 0.5, 0.5, 2.0).unwrap();
    assert!(matches!(holey.violation, Some(DelaunayViolation::Hole { .. })));
    let one = PointSample::new(1, ZPhi::ZERO, ZPhi::int(2), vec![Pt::x(ZPhi::ONE)]).unwrap();
    assert!(check_delaunay(&one, 5.0, 0.5, 0.0).unwrap().ok());
}

#[test]
fn patches() {
    let ps = fib(0, 200);
    assert_eq!(local_complexity(&ps, 0.5).len(), 1);
    let classes = local_complexity(&ps, 1.1);
    // a point has a left gap and a right gap; only aa is forbidden
    assert_eq!(classes.len(), 3);
    assert!(classes.iter().all(|c| c.contains(Pt::x(ZPhi::ZERO))));
    let hull = hull_patches(&ps, 2.0);
    let counted: usize = hull.iter().map(|(_, n)| n).sum();
    assert_eq!(counted, ps.interior(2.0).len());
    assert!(matches!(repetitivity_radius(&ps, 2.0), Repetitivity::Verified { .. }));
    let tiny = fib(0, 3);
    assert!(matches!(repetitivity_radius(&tiny, 5.0), Repetitivity::Unverified { .. }));

    let lattice = CutProjectParams {
        slope: Slope::Integer,
        ..CutProjectParams::fibonacci()
    };
    let periodic = cut_and_project(&lattice, ZPhi::ZERO, ZPhi::int(50)).unwrap();
    for r in [1.0, 2.5, 7.0] {
        assert_eq!(local_complexity(&periodic, r).len(), 1);
    }
}

#[test]
fn local_rules() {
    let ps = fib(0, 200);
    let perm = local_rule_permutation(&ps, &LocalRule::fibonacci()).unwrap();
    assert!(perm.orbit_lengths.keys().all(|l| *l == 1 || *l == 3));
    assert!(perm.orbit_lengths.get(&3).is_some_and(|n| *n > 0));
    // equal patches receive equal offsets
    let offsets: std::collections::HashMap<Pt, Pt> = perm.moves.iter().map(|(q, a)| (*q, *a - *q)).collect();
    for (_, centres) in patch_occurrences(&ps, perm.radius) {
        let first = offsets[&centres[0]];
        assert!(centres.iter().all(|c| offsets[c] == first));
    }

    let zero = LocalRule { radius: 2.0, rules: vec![] };
    let id = local_rule_permutation(&ps, &zero).unwrap();
    assert_eq!(id.orbit_lengths.keys().copied().collect::<Vec<_>>(), [1]);
    assert_eq!(id.open_orbits, 0);

    let shift = |offset: &str| LocalRule {
        radius: 2.0,
        rules: vec![Rule {
            contains: vec![],
            excludes: vec![],
            offset: offset.parse().unwrap(),
        }],
    };
    // every point to the one φ to the right: misses the sample or collides
    assert!(local_rule_permutation(&ps, &shift("phi")).is_err());
    assert!(local_rule_permutation(&ps, &shift("3")).is_err());
    let collide = LocalRule {
        radius: 2.0,
        rules: vec![Rule {
            contains: vec![Pt::x(ZPhi::ONE)],
            excludes: vec![],
            offset: Pt::x(ZPhi::ONE),
        }],
    };
    assert!(local_rule_permutation(&ps, &collide).is_err());
}

#[test]
fn rips_complexes() {
    let ps = fib(0, 60);
    let r = rips_h1_z2(&ps, qc::PHI);
    assert!(r.connected() && r.beta1 == 0);
    let r = rips_h1_z2(&ps, 0.9);
    assert_eq!(r.components, ps.len());
    let tri = PointSample::new(1, ZPhi::ZERO, ZPhi::int(2), (0..3).map(|i| Pt::x(ZPhi::int(i))).collect()).unwrap();
    let r = rips_h1_z2(&tri, 2.0);
    assert_eq!((r.edges, r.triangles, r.beta1), (3, 1, 0));
    // a unit square: a hollow cycle until the diagonals join
    let sq: Vec<Pt> = [(0, 0), (0, 1), (1, 0), (1, 1)]
        .iter()
        .map(|&(a, b)| Pt(ZPhi::int(a), ZPhi::int(b)))
        .collect();
    let sq = PointSample::new(2, ZPhi::ZERO, ZPhi::ONE, sq).unwrap();
    assert_eq!(rips_h1_z2(&sq, 1.0).beta1, 1);
    assert_eq!(rips_h1_z2(&sq, 1.5).beta1, 0);
    assert_eq!(qc::rips_sweep(&ps, &[0.5, 1.0, 1.7, 2.0]), Some(1.7));
}

#[test]
fn translation_cover_is_principal() {
    let ps = fib(0, 120);
    let (model, cover) = qc::translation_bisections(&ps, 2.7).unwrap();
    assert!(!cover.is_empty());
    assert!(model.word.len() >= 50);
    for i in 0..cover.len() {
        let b = cover.bisection(i);
        assert!(b.source().is_disjoint(&b.range()).unwrap(), "{}", cover.name(i));
    }
    let sym = qc::symbolic_presentation(&ps).unwrap();
    assert!(!sym.presentation.basic.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn order_matches_floats(a in -100_000i64..100_000, b in -100_000i64..100_000,
                            c in -100_000i64..100_000, d in -100_000i64..100_000) {
        let (x, y) = (ZPhi::new(a, b), ZPhi::new(c, d));
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-6 {
            prop_assert_eq!(x < y, fx < fy);
        }
        prop_assert_eq!(x == y, (a, b) == (c, d));
        prop_assert_eq!((x - y).signum() == 0, x == y);
    }

    #[test]
    fn ring_laws(a in -1000i64..1000, b in -1000i64..1000, c in -1000i64..1000,
                 d in -1000i64..1000, e in -1000i64..1000, f in -1000i64..1000) {
        let (x, y, w) = (ZPhi::new(a, b), ZPhi::new(c, d), ZPhi::new(e, f));
        prop_assert_eq!((x * y) * w, x * (y * w));
        prop_assert_eq!(x * (y + w), x * y + x * w);
        prop_assert_eq!((x * y).conj(), x.conj() * y.conj());
        prop_assert!(((x * y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-6 * (1.0 + (x.to_f64() * y.to_f64()).abs()));
        prop_assert_eq!(x.to_string().parse::<ZPhi>().unwrap(), x);
    }

    #[test]
    fn fibonacci_boxes(lo in -200i64..200, len in 10i64..80) {
        let ps = fib(lo, lo + len);
        let gaps = ps.gaps();
        prop_assert!(gaps.iter().all(|g| *g == ZPhi::ONE || *g == ZPhi::PHI));
        // a factor of the fixed point: no aa, no bbb
        let w: String = gaps.iter().map(|g| if *g == ZPhi::ONE { 'a' } else { 'b' }).collect();
        prop_assert!(!w.contains("aa") && !w.contains("bbb"));
        prop_assert!(substitution_word(400).contains(&w[..w.len().min(20)]));
    }

    #[test]
    fn complexity_is_monotone(lo in -100i64..100, r1 in 0.5f64..4.0, dr in 0.0f64..3.0) {
        let ps = fib(lo, lo + 150);
        // compare on the same centres: those inside the larger margin
        let r2 = r1 + dr;
        let centres = ps.interior(r2);
        let classes = |r: f64| {
            let mut s = std::collections::BTreeSet::new();
            for q in &centres {
                let patch: Vec<Pt> = ps.points.iter().map(|p| *p - *q).filter(|d| d.norm() <= r).collect();
                s.insert(patch);
            }
            s.len()
        };
        prop_assert!(classes(r1) <= classes(r2));
        prop_assert!(local_complexity(&ps, r1).len() >= 1);
    }
}
