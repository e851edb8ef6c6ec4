//! Labeled Cayley graphs of a groupoid at finite precision, the source
//! partition test for expansive covers, and rooted ball comparison.
//!
//! A point is always handled through a cylinder `x`. Two label-words give
//! the same vertex of the ball at `x` when their products agree as
//! bisections on the whole cylinder of `x`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use crate::bisection::Bisection;
use crate::cylinder::{refine, ClopenSet, Word};
use crate::error::{Error, Result};
use crate::generators::NamedBisection;

/// A finite cover closed under inverses. `inverse[i]` is the label of the
/// inverse of member `i`.
#[derive(Clone, Debug)]
pub struct LabeledCover {
    members: Vec<NamedBisection>,
    inverse: Vec<usize>,
}

impl LabeledCover {
    /// Adds `name^-1` for every member whose inverse is not already present.
    pub fn new(members: Vec<NamedBisection>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidBisection("empty cover".into()));
        }
        let mut all = members;
        let n = all.len();
        let mut inverse = vec![usize::MAX; n];
        for i in 0..n {
            let inv = all[i].bisection.inverse()?;
            if let Some(j) = all.iter().position(|c| c.bisection == inv) {
                inverse[i] = j;
                continue;
            }
            inverse[i] = all.len();
            all.push(NamedBisection::new(format!("{}^-1", all[i].name), inv));
            inverse.push(i);
        }
        let g = all[0].bisection.groupoid().clone();
        if all.iter().any(|m| !std::sync::Arc::ptr_eq(m.bisection.groupoid(), &g)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(LabeledCover {
            members: all,
            inverse,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[NamedBisection] {
        &self.members
    }

    pub fn name(&self, i: usize) -> &str {
        &self.members[i].name
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn bisection(&self, i: usize) -> &Bisection {
        &self.members[i].bisection
    }

    fn format_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .rev()
            .map(|l| self.name(*l))
            .collect::<Vec<_>>()
            .join("*")
    }

    fn root(&self, x: &Word) -> ClopenSet {
        ClopenSet::cylinder(self.members[0].bisection.space(), x.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// Labels in the order they are applied.
    pub word: Vec<usize>,
    pub product: Bisection,
    pub distance: usize,
}

#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub root: Word,
    pub radius: usize,
    pub vertices: Vec<Vertex>,
    /// `(from, label, to)`.
    pub edges: Vec<(usize, usize, usize)>,
    out: Vec<HashMap<usize, usize>>,
}

impl CayleyBall {
    pub fn successor(&self, v: usize, label: usize) -> Option<usize> {
        self.out[v].get(&label).copied()
    }

    pub fn to_dot(&self, cover: &LabeledCover) -> String {
        let mut s = String::from("digraph cayley {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let shape = if i == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(
                s,
                "  v{i} [shape={shape}, label=\"{}\"];",
                cover.format_word(&v.word)
            );
        }
        for (a, l, b) in &self.edges {
            let _ = writeln!(s, "  v{a} -> v{b} [label=\"{}\"];", cover.name(*l));
        }
        s.push_str("}\n");
        s
    }
}

/// Whether the cylinder lies inside `s`, outside it, or straddles it.
fn side(c: &ClopenSet, s: &ClopenSet) -> Result<Option<bool>> {
    if c.is_subset(s)? {
        Ok(Some(true))
    } else if c.is_disjoint(s)? {
        Ok(Some(false))
    } else {
        Ok(None)
    }
}

/// The labeled Cayley graph at the cylinder `x`, up to distance `radius`.
pub fn cayley_ball(cover: &LabeledCover, x: &Word, radius: usize) -> Result<CayleyBall> {
    let root = cover.root(x);
    let g = cover.bisection(0).groupoid();
    let start = Bisection::identity_on(g, &root);
    let mut ball = CayleyBall {
        root: x.clone(),
        radius,
        vertices: vec![Vertex {
            word: vec![],
            product: start,
            distance: 0,
        }],
        edges: vec![],
        out: vec![HashMap::new()],
    };
    let mut by_range: HashMap<ClopenSet, Vec<usize>> = HashMap::new();
    by_range.insert(root.clone(), vec![0]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if ball.vertices[v].distance >= radius {
            continue;
        }
        let range = ball.vertices[v].product.range();
        for l in 0..cover.len() {
            let s = cover.bisection(l);
            match side(&range, &s.source())? {
                Some(false) => continue,
                None => {
                    return Err(Error::InsufficientPrecision(format!(
                        "membership in the source of {} after {} is not determined by {}",
                        cover.name(l),
                        cover.format_word(&ball.vertices[v].word),
                        s.space().format_word(x)
                    )))
                }
                Some(true) => {}
            }
            let p = s.compose(&ball.vertices[v].product)?;
            let r = p.range();
            let mut found = None;
            for &u in by_range.get(&r).map(Vec::as_slice).unwrap_or(&[]) {
                if ball.vertices[u].product.equals(&p)? {
                    found = Some(u);
                    break;
                }
            }
            let u = match found {
                Some(u) => u,
                None => {
                    let mut word = ball.vertices[v].word.clone();
                    word.push(l);
                    let u = ball.vertices.len();
                    ball.vertices.push(Vertex {
                        word,
                        product: p,
                        distance: ball.vertices[v].distance + 1,
                    });
                    ball.out.push(HashMap::new());
                    by_range.entry(r).or_default().push(u);
                    queue.push_back(u);
                    u
                }
            };
            ball.out[v].insert(l, u);
            ball.edges.push((v, l, u));
        }
    }
    Ok(ball)
}

/// Outcome of comparing two rooted balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallComparison {
    pub isomorphic: bool,
    /// A label-word (in application order) along which the balls differ.
    pub witness: Option<Vec<String>>,
}

/// Rooted labeled isomorphism of the balls at `x` and `y`. Labels leave at
/// most one candidate morphism, which is built by walking both balls in step.
pub fn ball_isomorphic(cover: &LabeledCover, x: &Word, y: &Word, radius: usize) -> Result<BallComparison> {
    let bx = cayley_ball(cover, x, radius)?;
    let by = cayley_ball(cover, y, radius)?;
    Ok(compare_balls(cover, &bx, &by))
}

pub fn compare_balls(cover: &LabeledCover, bx: &CayleyBall, by: &CayleyBall) -> BallComparison {
    let mut map: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut back: HashMap<usize, usize> = HashMap::from([(0, 0)]);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let differ = |word: &[usize], l: usize| {
        let mut w: Vec<String> = word.iter().map(|i| cover.name(*i).to_string()).collect();
        w.push(cover.name(l).to_string());
        BallComparison {
            isomorphic: false,
            witness: Some(w),
        }
    };
    while let Some((a, b)) = queue.pop_front() {
        for l in 0..cover.len() {
            match (bx.successor(a, l), by.successor(b, l)) {
                (None, None) => {}
                (Some(a2), Some(b2)) => {
                    let fwd = *map.entry(a2).or_insert(b2);
                    let bwd = *back.entry(b2).or_insert(a2);
                    if fwd != b2 || bwd != a2 {
                        return differ(&bx.vertices[a].word, l);
                    }
                    if bx.vertices[a2].distance > bx.vertices[a].distance
                        && !queue.contains(&(a2, b2))
                    {
                        queue.push_back((a2, b2));
                    }
                }
                _ => return differ(&bx.vertices[a].word, l),
            }
        }
    }
    BallComparison {
        isomorphic: bx.vertices.len() == by.vertices.len(),
        witness: None,
    }
}

/// Sources of the products of at most `n` cover elements whose source
/// contains the cylinder of `x`, intersected.
pub fn u_n(cover: &LabeledCover, x: &Word, n: usize) -> Result<ClopenSet> {
    let root = cover.root(x);
    let g = cover.bisection(0).groupoid();
    let mut acc = ClopenSet::whole(root.space());
    let mut frontier = vec![(Bisection::identity(g), None::<usize>)];
    for _ in 0..n {
        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for (p, last) in &frontier {
            for l in 0..cover.len() {
                if *last == Some(cover.inverse_of(l)) {
                    continue;
                }
                let q = cover.bisection(l).compose(p)?;
                match side(&root, &q.source())? {
                    Some(false) => continue,
                    None => {
                        return Err(Error::InsufficientPrecision(format!(
                            "{} does not decide a product source",
                            root.display()
                        )))
                    }
                    Some(true) => {}
                }
                acc = acc.intersect(&q.source())?;
                if seen.insert(q.clone()) {
                    next.push((q, Some(l)));
                }
            }
        }
        frontier = next;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// Sources of products of at most `m` elements separate all depth-`n`
    /// cylinders.
    Expansive { n: usize, m: usize },
    /// The sources of all products form a finite family, fixed from length
    /// `m` on, whose atoms do not refine the depth-`n` cylinders.
    Refuted { m: usize, atoms: usize },
    Undetermined { n: usize, m: usize },
}

/// Checks whether the partition generated by sources of products of at most
/// `m` cover elements refines the depth-`n` cylinder partition.
pub fn separation_check(cover: &LabeledCover, n: usize, m: usize) -> Result<Separation> {
    let space = cover.bisection(0).space().clone();
    let mut sources: HashSet<ClopenSet> = HashSet::new();
    let mut layer: Vec<ClopenSet> = Vec::new();
    for i in 0..cover.len() {
        let s = cover.bisection(i).source();
        if !s.is_empty() && sources.insert(s.clone()) {
            layer.push(s);
        }
    }
    let inverses: Vec<Bisection> = (0..cover.len())
        .map(|i| cover.bisection(i).inverse())
        .collect::<Result<_>>()?;
    for k in 1..=m {
        let mut all: Vec<ClopenSet> = sources.iter().cloned().collect();
        all.sort_by_key(ClopenSet::display);
        let atoms = refine(&space, &all)?;
        if atoms.iter().all(|a| within_cylinder(a, n)) {
            return Ok(Separation::Expansive { n, m: k });
        }
        // s(P∘S) = S⁻¹(s(P) ∩ r(S))
        let mut next = Vec::new();
        for x in &layer {
            for inv in &inverses {
                let y = inv.image(x)?;
                if !y.is_empty() && sources.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            return Ok(Separation::Refuted {
                m: k,
                atoms: atoms.len(),
            });
        }
        layer = next;
    }
    Ok(Separation::Undetermined { n, m })
}

fn within_cylinder(a: &ClopenSet, n: usize) -> bool {
    let words = a.words();
    match words.first() {
        None => true,
        Some(w0) => words
            .iter()
            .all(|w| w.len() >= n && w.prefix(n) == w0.prefix(n)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::Groupoid;
    use crate::cylinder::SequenceSpace;

    fn shift_cover() -> LabeledCover {
        let s = SequenceSpace::full_shift(&["0", "1"]).unwrap();
        let g = Groupoid::plain(s);
        LabeledCover::new(vec![
            NamedBisection::new("s0", Bisection::parse(&g, "0:id:").unwrap()),
            NamedBisection::new("s1", Bisection::parse(&g, "1:id:").unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn inverses_are_added() {
        let c = shift_cover();
        assert_eq!(c.len(), 4);
        assert_eq!(c.name(2), "s0^-1");
        assert_eq!(c.inverse_of(0), 2);
        assert_eq!(c.inverse_of(3), 1);
    }

    #[test]
    fn radius_zero_ball() {
        let c = shift_cover();
        let x = c.bisection(0).space().parse_word("01").unwrap();
        let b = cayley_ball(&c, &x, 0).unwrap();
        assert_eq!(b.vertices.len(), 1);
        assert!(b.edges.is_empty());
    }

    #[test]
    fn shift_partition() {
        let c = shift_cover();
        for n in 1..=4 {
            assert_eq!(
                separation_check(&c, n, n).unwrap(),
                Separation::Expansive { n, m: n }
            );
        }
        assert_eq!(
            separation_check(&c, 3, 2).unwrap(),
            Separation::Undetermined { n: 3, m: 2 }
        );
    }
}
