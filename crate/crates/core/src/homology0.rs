//! H₀(𝔊, ℤ/2) through its presentation by indicators of clopen sets, cut
//! off at a finite working depth, and the map `1_{s(F)} ↦ τ_F`.
//!
//! Generators are the cylinders of length at most the working depth. Each
//! arrow `(v, q, u)` of a product of basic bisections identifies `1_{v·t}`
//! with `1_{u·q(t)}` for every extension `t` that stays within the working
//! depth, and every cylinder above the bottom level equals the sum of its
//! children. The depth-`d` group is the span of the depth-`d` cylinders in
//! the resulting quotient.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::bisection::{Arrow, Bisection, Groupoid, Semantics};
use crate::cylinder::{ClopenSet, SequenceSpace, Word};
use crate::error::{Error, Result};
use crate::fullgroup::Element;
use crate::generators::NamedBisection;
use crate::gf2::{BitVec, Basis};

#[derive(Clone, Debug)]
pub struct H0Approximation {
    pub depth: usize,
    pub working_depth: usize,
    pub product_bound: usize,
    /// Distinct products of basic bisections that imposed relations.
    pub products: usize,
    pub arrows: usize,
    /// Dimension over ℤ/2 of the span of depth-`depth` cylinders.
    pub rank: usize,
    /// Dimension over ℤ/2 of the whole truncated quotient.
    pub total_rank: usize,
    space: Arc<SequenceSpace>,
    column: HashMap<Word, usize>,
    classes: usize,
    relations: Basis,
}

/// An element of the approximation, reduced to normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct H0Class(BitVec);

impl H0Class {
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &H0Class) -> H0Class {
        let mut v = self.0.clone();
        v.xor(&other.0);
        H0Class(v)
    }
}

impl fmt::Display for H0Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rank {
            0 => write!(f, "0"),
            1 => write!(f, "Z/2"),
            r => write!(f, "(Z/2)^{r}"),
        }
    }
}

fn arrow_image(g: &Groupoid, a: &Arrow, w: &Word) -> Word {
    match g.semantics() {
        Semantics::Germs => {
            let rest = w.strip_prefix(&a.dom).expect("extension of the domain word");
            a.ran.concat(&g.apply(a.germ, &rest))
        }
        Semantics::Action => g.apply(a.germ, w),
    }
}

fn factors(basic: &[NamedBisection]) -> Result<Vec<Bisection>> {
    let mut out: Vec<Bisection> = Vec::new();
    for b in basic {
        for f in [b.bisection.clone(), b.bisection.inverse()?] {
            if !f.is_empty() && !out.contains(&f) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

/// All distinct non-empty products of 1..=`bound` factors.
fn products(factors: &[Bisection], bound: usize) -> Result<Vec<Bisection>> {
    let mut seen: HashSet<Bisection> = factors.iter().cloned().collect();
    let mut all: Vec<Bisection> = factors.to_vec();
    let mut layer: Vec<Bisection> = factors.to_vec();
    for _ in 1..bound {
        let mut next = Vec::new();
        for p in &layer {
            for f in factors {
                let q = f.compose(p)?;
                if !q.is_empty() && seen.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    Ok(all)
}

pub fn h0_z2(
    g: &Arc<Groupoid>,
    basic: &[NamedBisection],
    depth: usize,
    product_bound: usize,
) -> Result<H0Approximation> {
    let space = g.space().clone();
    let prods = products(&factors(basic)?, product_bound)?;
    let mut arrows: Vec<Arrow> = prods
        .iter()
        .flat_map(|p| p.arrows().iter().cloned())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    arrows.sort();
    let working_depth = arrows
        .iter()
        .map(|a| a.dom.len().max(a.ran.len()))
        .max()
        .unwrap_or(0)
        .max(depth);

    let mut nodes: Vec<Word> = Vec::new();
    for n in 0..=working_depth {
        nodes.extend(space.words_of_length(n));
    }
    let index: HashMap<Word, usize> = nodes.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut uf: UnionFind<usize> = UnionFind::new(nodes.len());
    for a in &arrows {
        let mut stack = vec![a.dom.clone()];
        while let Some(w) = stack.pop() {
            let img = arrow_image(g, a, &w);
            if w.len() > working_depth || img.len() > working_depth {
                continue;
            }
            uf.union(index[&w], index[&img]);
            stack.extend(space.children(&w));
        }
    }

    let mut class_ix: HashMap<usize, usize> = HashMap::new();
    for i in 0..nodes.len() {
        let r = uf.find(i);
        let next = class_ix.len();
        class_ix.entry(r).or_insert(next);
    }
    let classes = class_ix.len();
    let column: HashMap<Word, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), class_ix[&uf.find(i)]))
        .collect();

    let mut relations = Basis::new(classes);
    for w in &nodes {
        if w.len() == working_depth {
            continue;
        }
        let mut v = BitVec::zeros(classes);
        v.flip(column[w]);
        for c in space.children(w) {
            v.flip(column[&c]);
        }
        relations.insert(v);
    }

    let mut approx = H0Approximation {
        depth,
        working_depth,
        product_bound,
        products: prods.len(),
        arrows: arrows.len(),
        rank: 0,
        total_rank: classes - relations.rank(),
        space,
        column,
        classes,
        relations,
    };
    let mut span = Basis::new(classes);
    for w in approx.space.words_of_length(depth) {
        let c = approx.class_of_word(&w)?;
        span.insert(c.0);
    }
    approx.rank = span.rank();
    Ok(approx)
}

impl H0Approximation {
    fn class_of_word(&self, w: &Word) -> Result<H0Class> {
        let c = *self.column.get(w).ok_or_else(|| {
            Error::InsufficientPrecision(format!(
                "{} is deeper than the working depth {}",
                self.space.format_word(w),
                self.working_depth
            ))
        })?;
        let mut v = BitVec::zeros(self.classes);
        v.flip(c);
        self.relations.reduce(&mut v);
        Ok(H0Class(v))
    }

    /// The class of `1_U`.
    pub fn class_of(&self, u: &ClopenSet) -> Result<H0Class> {
        if !SequenceSpace::same(&self.space, u.space()) {
            return Err(Error::SpaceMismatch);
        }
        let mut v = BitVec::zeros(self.classes);
        for w in u.words() {
            let c = self.class_of_word(w)?;
            v.xor(&c.0);
        }
        Ok(H0Class(v))
    }

    pub fn zero(&self) -> H0Class {
        H0Class(BitVec::zeros(self.classes))
    }
}

/// A bisection `F` with source `U` and `s(F) ∩ r(F) = ∅`, with `τ_F`.
#[derive(Clone, Debug)]
pub struct QuotientRep {
    pub bisection: Bisection,
    pub element: Element,
    /// Number of basic factors in the product `F` was cut from.
    pub length: usize,
}

fn locality(b: &Bisection) -> usize {
    let words: Vec<&Word> = b.arrows().iter().flat_map(|a| [&a.dom, &a.ran]).collect();
    let Some(first) = words.first() else {
        return usize::MAX;
    };
    let mut n = first.len();
    for w in &words[1..] {
        n = n.min(
            first
                .letters()
                .iter()
                .zip(w.letters())
                .take_while(|(a, b)| a == b)
                .count(),
        );
    }
    n
}

/// Searches products of at most `max_len` basic bisections (and inverses)
/// restricted to `U` for one moving `U` off itself. Among the candidates
/// the one acting inside the longest common prefix wins, then the one with
/// fewest non-trivial germ labels, then the shortest product, then the
/// first in table order.
pub fn to_quotient_rep(
    g: &Arc<Groupoid>,
    basic: &[NamedBisection],
    u: &ClopenSet,
    max_len: usize,
) -> Result<QuotientRep> {
    if u.is_empty() {
        return Ok(QuotientRep {
            bisection: Bisection::empty(g),
            element: Element::identity(g),
            length: 0,
        });
    }
    let fs = factors(basic)?;
    let start = Bisection::identity_on(g, u);
    let mut seen: HashSet<Bisection> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut best: Option<((usize, usize, usize, String), Bisection)> = None;
    while let Some((f, len)) = queue.pop_front() {
        if len > 0 && f.source().is_disjoint(&f.range())? {
            let labelled = f.arrows().iter().filter(|a| !a.germ.is_identity()).count();
            let key = (usize::MAX - locality(&f), labelled, len, f.compact());
            if best.as_ref().is_none_or(|b| b.0 > key) {
                best = Some((key, f.clone()));
            }
        }
        if len == max_len {
            continue;
        }
        let r = f.range();
        for b in &fs {
            if !r.is_subset(&b.source())? {
                continue;
            }
            let next = b.compose(&f)?;
            if seen.insert(next.clone()) {
                queue.push_back((next, len + 1));
            }
        }
    }
    let ((_, _, length, _), bisection) = best.ok_or_else(|| {
        Error::Undetermined(format!(
            "no product of at most {max_len} basic bisections moves {} off itself",
            u.display()
        ))
    })?;
    let element = Element::tau(&bisection)?;
    Ok(QuotientRep {
        bisection,
        element,
        length,
    })
}
