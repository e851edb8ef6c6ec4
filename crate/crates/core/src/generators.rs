//! The finite generating set of the alternating full group built from an
//! expansive cover, and a bounded membership search.
//!
//! The pipeline is: a partition `P` into cylinders meeting every sampled
//! orbit in at least five cells, the cover `S` cut into pieces running
//! between different cells, the products `T` of at most three pieces, and
//! degree-5 multisections whose off-diagonal entries cover every cell of `T`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use crate::bisection::{refine_arrow, Arrow, Bisection, Groupoid, Semantics};
use crate::cylinder::{ClopenSet, Word};
use crate::error::{Error, Result};
use crate::fullgroup::Element;
use crate::germcalc::Germ;
use crate::multisection::Multisection;

/// Extra depth the partition may gain over the requested one.
const MAX_EXTRA_DEPTH: usize = 6;
/// Radius and size of the arrow search used to sample orbits.
const ORBIT_RADIUS: usize = 6;
const ORBIT_STATES: usize = 4000;
/// Cap on the number of sample words per check.
const MAX_SAMPLES: usize = 512;
/// Path length of the spoke search.
const SPOKE_RADIUS: usize = 4;
/// Parts a multisection needs.
const DEGREE: usize = 5;

#[derive(Clone, Debug)]
pub struct NamedBisection {
    pub name: String,
    pub bisection: Bisection,
}

impl NamedBisection {
    pub fn new(name: impl Into<String>, bisection: Bisection) -> Self {
        NamedBisection {
            name: name.into(),
            bisection,
        }
    }
}

/// A partition of the unit space into cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Word>,
}

impl Partition {
    pub fn cylinders(g: &Groupoid, depth: usize) -> Self {
        Partition {
            cells: g.space().words_of_length(depth),
        }
    }

    pub fn cells(&self) -> &[Word] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.cells.iter().map(Word::len).max().unwrap_or(0)
    }

    /// The cell containing the cylinder of `w`, if `w` is long enough.
    pub fn part_of(&self, w: &Word) -> Option<usize> {
        self.cells.iter().position(|c| c.is_prefix_of(w))
    }

    pub fn sets(&self, g: &Groupoid) -> Vec<ClopenSet> {
        self.cells
            .iter()
            .map(|c| ClopenSet::cylinder(g.space(), c.clone()))
            .collect()
    }

    fn split(&mut self, g: &Groupoid, i: usize) {
        let c = self.cells.remove(i);
        let kids = g.space().children(&c);
        for (k, w) in kids.into_iter().enumerate() {
            self.cells.insert(i + k, w);
        }
    }

    /// Splits the last of the shortest cells.
    fn split_shortest(&mut self, g: &Groupoid) {
        let min = self.cells.iter().map(Word::len).min().unwrap_or(0);
        let i = self.cells.iter().rposition(|c| c.len() == min).unwrap_or(0);
        self.split(g, i);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitCheck {
    /// Every sample reached at least five cells.
    Verified { samples: usize },
    Undetermined { sample: Word, cells: usize },
}

#[derive(Clone, Debug)]
pub struct PartitionReport {
    pub partition: Partition,
    pub orbits: OrbitCheck,
    /// Bisections added so that every point has four neighbours in other cells.
    pub augmented: Vec<NamedBisection>,
}

#[derive(Clone, Debug)]
pub struct GeneratingSetReport {
    pub partition: Partition,
    pub orbits: OrbitCheck,
    pub augmented: Vec<NamedBisection>,
    pub cover: Vec<NamedBisection>,
    pub t: Vec<Bisection>,
    pub m: Vec<Multisection>,
    pub generators: Vec<NamedElement>,
}

#[derive(Clone, Debug)]
pub struct NamedElement {
    pub name: String,
    pub element: Element,
}

fn with_inverses(basic: &[NamedBisection]) -> Result<Vec<NamedBisection>> {
    let mut out = Vec::with_capacity(2 * basic.len());
    for b in basic {
        out.push(b.clone());
    }
    for b in basic {
        let inv = b.bisection.inverse()?;
        if basic.iter().any(|c| c.bisection == inv) {
            continue;
        }
        out.push(NamedBisection::new(format!("{}^-1", b.name), inv));
    }
    Ok(out)
}

fn arrow_image(g: &Groupoid, a: &Arrow, w: &Word) -> Option<Word> {
    let rest = w.strip_prefix(&a.dom)?;
    Some(match g.semantics() {
        Semantics::Germs => {
            let t = g.germs();
            a.ran.concat(&t.apply(a.germ, &rest))
        }
        Semantics::Action => g.apply(a.germ, w),
    })
}

fn samples(g: &Groupoid, depth: usize) -> Vec<Word> {
    let all = g.space().words_of_length(depth);
    if all.len() <= MAX_SAMPLES {
        return all;
    }
    let step = all.len() as f64 / MAX_SAMPLES as f64;
    (0..MAX_SAMPLES)
        .map(|i| all[(i as f64 * step) as usize].clone())
        .collect()
}

// Number of cells met by the arrow-orbit of `v`, stopping early at `want`.
fn orbit_cells(g: &Groupoid, moves: &[NamedBisection], p: &Partition, v: &Word, want: usize) -> usize {
    let mut seen = HashSet::from([v.clone()]);
    let mut cells = HashSet::new();
    cells.extend(p.part_of(v));
    let mut queue = VecDeque::from([(v.clone(), 0)]);
    while let Some((w, r)) = queue.pop_front() {
        if cells.len() >= want || r == ORBIT_RADIUS {
            continue;
        }
        for m in moves {
            for a in m.bisection.arrows() {
                if let Some(u) = arrow_image(g, a, &w) {
                    if seen.len() < ORBIT_STATES && seen.insert(u.clone()) {
                        cells.extend(p.part_of(&u));
                        queue.push_back((u, r + 1));
                    }
                }
            }
        }
    }
    cells.len()
}

/// Cells reached from the cell of `v` by a single cover piece.
fn neighbour_cells(pieces: &[NamedBisection], p: &Partition, v: &Word) -> HashSet<usize> {
    let here = p.part_of(v);
    let mut out = HashSet::new();
    for s in pieces {
        for a in s.bisection.arrows() {
            if a.dom.is_prefix_of(v) {
                if let Some(q) = p.part_of(&a.ran) {
                    if Some(q) != here {
                        out.insert(q);
                    }
                }
            }
        }
    }
    out
}

/// Cuts `b` into pieces with source inside one cell and range inside
/// another. Returns `Err(i)` when some germ stays inside cell `i`.
fn cut(b: &Bisection, sets: &[ClopenSet]) -> Result<std::result::Result<Vec<(usize, usize, Bisection)>, usize>> {
    let mut out = Vec::new();
    for (i, si) in sets.iter().enumerate() {
        let r = b.restrict(si)?;
        if r.is_empty() {
            continue;
        }
        for (j, sj) in sets.iter().enumerate() {
            let piece = r.corestrict(sj)?;
            if piece.is_empty() {
                continue;
            }
            if i == j {
                return Ok(Err(i));
            }
            out.push((i, j, piece));
        }
    }
    Ok(Ok(out))
}

/// Chooses the partition: cylinders of the given depth, refined until every
/// sampled orbit meets five cells and no basic bisection keeps a germ inside
/// one cell; then adds prefix exchanges where a point has fewer than four
/// neighbours in other cells.
pub fn choose_partition(g: &Arc<Groupoid>, basic: &[NamedBisection], depth: usize) -> Result<PartitionReport> {
    let moves = with_inverses(basic)?;
    let mut p = Partition::cylinders(g, depth);
    let limit = depth + MAX_EXTRA_DEPTH;
    let orbits = loop {
        let probe = samples(g, p.max_depth() + 1);
        let bad = probe
            .iter()
            .map(|v| (v, orbit_cells(g, &moves, &p, v, DEGREE)))
            .find(|(_, n)| *n < DEGREE);
        match bad {
            None => {
                break OrbitCheck::Verified {
                    samples: probe.len(),
                }
            }
            Some((v, n)) => {
                if p.max_depth() >= limit {
                    break OrbitCheck::Undetermined {
                        sample: v.clone(),
                        cells: n,
                    };
                }
                p.split_shortest(g);
            }
        }
    };
    if let OrbitCheck::Undetermined { sample, cells } = &orbits {
        return Err(Error::Undetermined(format!(
            "the orbit of {} meets only {} cells up to depth {}",
            g.space().format_word(sample),
            cells,
            limit
        )));
    }
    'separate: loop {
        let sets = p.sets(g);
        for m in &moves {
            if let Err(i) = cut(&m.bisection, &sets)? {
                if p.cells[i].len() >= limit {
                    return Err(Error::Undetermined(format!(
                        "{} keeps germs inside a cell at depth {}",
                        m.name, limit
                    )));
                }
                p.split(g, i);
                continue 'separate;
            }
        }
        break;
    }
    let mut augmented = Vec::new();
    let mut pieces = cover_pieces(g, &moves, &p)?;
    for v in samples(g, p.max_depth() + 1) {
        let here = p.part_of(&v).expect("samples are deeper than the partition");
        let mut reached = neighbour_cells(&pieces, &p, &v);
        if reached.len() >= DEGREE - 1 {
            continue;
        }
        for q in 0..p.len() {
            if reached.len() >= DEGREE - 1 {
                break;
            }
            if q == here || reached.contains(&q) {
                continue;
            }
            if g.semantics() == Semantics::Action {
                continue;
            }
            let Some((u, w)) = exchange(g, &v, p.cells[here].len(), &p.cells[q]) else {
                continue;
            };
            let x = Bisection::new(
                g,
                vec![Arrow {
                    dom: u.clone(),
                    germ: Germ::ID,
                    ran: w.clone(),
                }],
            )?;
            let name = format!("x[{}>{}]", g.space().format_word(&u), g.space().format_word(&w));
            augmented.push(NamedBisection::new(name, x));
            reached.insert(q);
        }
        if reached.len() < DEGREE - 1 {
            return Err(Error::Undetermined(format!(
                "{} has only {} neighbours in other cells",
                g.space().format_word(&v),
                reached.len()
            )));
        }
        let extra = with_inverses(&augmented)?;
        let mut all = moves.clone();
        all.extend(extra);
        pieces = cover_pieces(g, &all, &p)?;
    }
    Ok(PartitionReport {
        partition: p,
        orbits,
        augmented,
    })
}

/// A prefix `u` of `v`, at least `min` long, and an extension `w` of `cell`
/// with the same tail class, preferring short words.
fn exchange(g: &Groupoid, v: &Word, min: usize, cell: &Word) -> Option<(Word, Word)> {
    let space = g.space();
    for k in min..=v.len() {
        let u = v.prefix(k);
        let class = space.tail_class(&u);
        let mut layer = vec![cell.clone()];
        for _ in 0..=MAX_EXTRA_DEPTH {
            if let Some(w) = layer.iter().find(|w| space.tail_class(w) == class) {
                return Some((u, w.clone()));
            }
            layer = layer.iter().flat_map(|w| space.children(w)).collect();
        }
    }
    None
}

fn cover_pieces(g: &Arc<Groupoid>, moves: &[NamedBisection], p: &Partition) -> Result<Vec<NamedBisection>> {
    let sets = p.sets(g);
    let space = g.space();
    let mut out: Vec<NamedBisection> = Vec::new();
    for m in moves {
        match cut(&m.bisection, &sets)? {
            Ok(parts) => {
                for (i, j, b) in parts {
                    if out.iter().any(|o| o.bisection == b) {
                        continue;
                    }
                    let name = format!(
                        "{}[{}>{}]",
                        m.name,
                        space.format_word(&p.cells[i]),
                        space.format_word(&p.cells[j])
                    );
                    out.push(NamedBisection::new(name, b));
                }
            }
            Err(i) => {
                return Err(Error::Undetermined(format!(
                    "{} keeps germs inside cell {}",
                    m.name,
                    space.format_word(&p.cells[i])
                )))
            }
        }
    }
    Ok(out)
}

/// The symmetric cover: basic and augmenting bisections with their
/// inverses, cut along the partition.
pub fn build_cover(g: &Arc<Groupoid>, basic: &[NamedBisection], report: &PartitionReport) -> Result<Vec<NamedBisection>> {
    let mut all = basic.to_vec();
    all.extend(report.augmented.iter().cloned());
    cover_pieces(g, &with_inverses(&all)?, &report.partition)
}

/// Products of at most three cover pieces, cut to pairs of different cells.
pub fn build_t(cover: &[NamedBisection], p: &Partition) -> Result<Vec<Bisection>> {
    let Some(first) = cover.first() else {
        return Ok(Vec::new());
    };
    let g = first.bisection.groupoid().clone();
    let sets = p.sets(&g);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut keep = |b: Bisection, out: &mut Vec<Bisection>| -> Result<()> {
        for (i, si) in sets.iter().enumerate() {
            let r = b.restrict(si)?;
            if r.is_empty() {
                continue;
            }
            for (j, sj) in sets.iter().enumerate() {
                if i == j {
                    continue;
                }
                let piece = r.corestrict(sj)?;
                if !piece.is_empty() && seen.insert(piece.clone()) {
                    out.push(piece);
                }
            }
        }
        Ok(())
    };
    let mut layer: Vec<Bisection> = cover.iter().map(|c| c.bisection.clone()).collect();
    for b in &layer {
        keep(b.clone(), &mut out)?;
    }
    for _ in 1..3 {
        let mut next = Vec::new();
        let mut fresh = HashSet::new();
        for b in &layer {
            let r = b.range();
            for s in cover {
                if r.is_disjoint(&s.bisection.source())? {
                    continue;
                }
                let prod = s.bisection.compose(b)?;
                if !prod.is_empty() && fresh.insert(prod.clone()) {
                    next.push(prod);
                }
            }
        }
        for b in &next {
            keep(b.clone(), &mut out)?;
        }
        layer = next;
    }
    Ok(out)
}

/// The spoke `u ↦ c·u` from `w` into the cell `c`, when every such prefix
/// exchange is an arrow of the groupoid.
fn prefix_spoke(g: &Arc<Groupoid>, w: &ClopenSet, c: &Word) -> Option<Bisection> {
    if g.semantics() == Semantics::Action {
        return None;
    }
    let space = g.space();
    let mut arrows = Vec::new();
    for u in w.words() {
        let ran = c.concat(u);
        if !space.is_valid(&ran) || space.tail_class(&ran) != space.tail_class(u) {
            return None;
        }
        arrows.push(Arrow {
            dom: u.clone(),
            germ: Germ::ID,
            ran,
        });
    }
    Bisection::new(g, arrows).ok()
}

/// Spokes from `w` into `count` cells other than `avoid`: products of cover
/// pieces found by a breadth-first search, then prefix exchanges.
fn find_spokes(
    cover: &[NamedBisection],
    p: &Partition,
    w: &ClopenSet,
    avoid: &[usize],
    count: usize,
) -> Result<Vec<Bisection>> {
    let g = cover[0].bisection.groupoid();
    let mut found: Vec<(usize, Bisection)> = Vec::new();
    let start = Bisection::identity_on(g, w);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((b, r)) = queue.pop_front() {
        if found.len() >= count || r == SPOKE_RADIUS {
            continue;
        }
        let range = b.range();
        for s in cover {
            if !range.is_subset(&s.bisection.source())? {
                continue;
            }
            let next = s.bisection.compose(&b)?;
            if !seen.insert(next.clone()) {
                continue;
            }
            let cells: HashSet<Option<usize>> = next.arrows().iter().map(|a| p.part_of(&a.ran)).collect();
            if cells.len() == 1 {
                if let Some(Some(q)) = cells.into_iter().next() {
                    if !avoid.contains(&q) && !found.iter().any(|(c, _)| *c == q) && found.len() < count {
                        found.push((q, next.clone()));
                    }
                }
            }
            queue.push_back((next, r + 1));
        }
    }
    for (q, c) in p.cells.iter().enumerate() {
        if found.len() >= count {
            break;
        }
        if avoid.contains(&q) || found.iter().any(|(x, _)| *x == q) {
            continue;
        }
        if let Some(b) = prefix_spoke(g, w, c) {
            found.push((q, b));
        }
    }
    if found.len() < count {
        return Err(Error::Undetermined(format!(
            "spoke search from {} found {} of {} spokes",
            w.display(),
            found.len(),
            count
        )));
    }
    Ok(found.into_iter().map(|(_, b)| b).collect())
}

// The cell holding each component, if every component sits in one cell.
fn component_cells(m: &Multisection, p: &Partition) -> Option<Vec<usize>> {
    m.components()
        .iter()
        .map(|c| {
            let mut cells = c.words().iter().map(|w| p.part_of(w));
            let first = cells.next()??;
            cells.all(|x| x == Some(first)).then_some(first)
        })
        .collect()
}

fn covers(m: &Multisection, cells: &[usize], piece: &Bisection, from: usize, to: usize) -> Result<bool> {
    let (Some(i), Some(j)) = (
        cells.iter().position(|&c| c == from),
        cells.iter().position(|&c| c == to),
    ) else {
        return Ok(false);
    };
    let src = piece.source();
    if !src.is_subset(&m.component(i))? {
        return Ok(false);
    }
    m.entry(i, j).restrict(&src)?.equals(piece)
}

fn piece_cells(b: &Bisection, p: &Partition) -> Option<(usize, usize)> {
    let from = p.part_of(&b.arrows().first()?.dom)?;
    let to = p.part_of(&b.arrows().first()?.ran)?;
    b.arrows()
        .iter()
        .all(|a| p.part_of(&a.dom) == Some(from) && p.part_of(&a.ran) == Some(to))
        .then_some((from, to))
}

// What is left of `piece` after removing germs lying in an off-diagonal
// entry of some multisection.
fn remainder(piece: &Bisection, ms: &[(Multisection, Vec<usize>)], from: usize, to: usize) -> Result<Bisection> {
    let mut rest = piece.clone();
    for (m, cells) in ms {
        let (Some(i), Some(j)) = (
            cells.iter().position(|&c| c == from),
            cells.iter().position(|&c| c == to),
        ) else {
            continue;
        };
        if rest.source().is_disjoint(&m.component(i))? {
            continue;
        }
        let common = rest.intersect(m.entry(i, j))?;
        if !common.is_empty() {
            rest = rest.minus(&common)?;
            if rest.is_empty() {
                break;
            }
        }
    }
    Ok(rest)
}

/// The germs of `T`, each cut down to cylinders of one common depth.
struct GermCells {
    depth: usize,
    at: BTreeMap<Word, Vec<Arrow>>,
    open: HashSet<Arrow>,
}

impl GermCells {
    fn new(t: &[Bisection], p: &Partition) -> Self {
        let depth = t
            .iter()
            .flat_map(|b| b.arrows().iter().map(|a| a.dom.len()))
            .chain([p.max_depth()])
            .max()
            .unwrap_or(0);
        let mut at: BTreeMap<Word, Vec<Arrow>> = BTreeMap::new();
        let mut open = HashSet::new();
        for b in t {
            let g = b.groupoid();
            for a in b.arrows() {
                for u in g.space().extend_to(&a.dom, depth) {
                    let r = refine_arrow(g, a, &u);
                    if open.insert(r.clone()) {
                        at.entry(u).or_default().push(r);
                    }
                }
            }
        }
        GermCells { depth, at, open }
    }

    /// Closes every germ lying in an off-diagonal entry of `m`.
    fn close(&mut self, m: &Multisection) {
        let g = m.groupoid().clone();
        let d = m.degree();
        for i in 0..d {
            for j in 0..d {
                if i == j {
                    continue;
                }
                for e in m.entry(i, j).arrows() {
                    if e.dom.len() > self.depth {
                        continue;
                    }
                    for u in g.space().extend_to(&e.dom, self.depth) {
                        self.open.remove(&refine_arrow(&g, e, &u));
                    }
                }
            }
        }
    }
}

struct Plan {
    score: usize,
    source: usize,
    targets: Vec<usize>,
    rows: Vec<(Word, Vec<Arrow>)>,
}

/// Germs at cells of the common depth lying in `b ∘ a⁻¹`, cached per pair.
struct Derived {
    g: Arc<Groupoid>,
    depth: usize,
    cache: HashMap<(Arrow, Arrow), Vec<Arrow>>,
}

impl Derived {
    fn get(&mut self, a: &Arrow, b: &Arrow) -> Result<&[Arrow]> {
        let key = (a.clone(), b.clone());
        if !self.cache.contains_key(&key) {
            let g = &self.g;
            let fa = Bisection::from_trusted(g, vec![a.clone()])?;
            let fb = Bisection::from_trusted(g, vec![b.clone()])?;
            let mut out = Vec::new();
            for e in fb.compose(&fa.inverse()?)?.arrows() {
                if e.dom.len() > self.depth {
                    continue;
                }
                for u in g.space().extend_to(&e.dom, self.depth) {
                    out.push(refine_arrow(g, e, &u));
                }
            }
            self.cache.insert(key.clone(), out);
        }
        Ok(&self.cache[&key])
    }
}

// The open germs closed by a row of spokes: the spokes themselves and the
// entries between them.
fn row_gain(gc: &GermCells, dv: &mut Derived, row: &[&Arrow]) -> Result<HashSet<Arrow>> {
    let mut closed = HashSet::new();
    for (k, a) in row.iter().enumerate() {
        if gc.open.contains(*a) {
            closed.insert((*a).clone());
        }
        for prev in &row[..k] {
            for (x, y) in [(*prev, *a), (*a, *prev)] {
                for z in dv.get(x, y)? {
                    if gc.open.contains(z) {
                        closed.insert(z.clone());
                    }
                }
            }
        }
    }
    Ok(closed)
}

// Spokes from the cells of `source` into `targets`, one germ per target and
// cell, with ranges kept disjoint. Each spoke is chosen greedily to close as
// many open germs as possible, counting the entries between the targets.
fn plan(gc: &GermCells, dv: &mut Derived, p: &Partition, source: usize, targets: &[usize]) -> Result<Plan> {
    let mut taken: Vec<Vec<Word>> = vec![Vec::new(); targets.len()];
    let mut out = Plan {
        score: 0,
        source,
        targets: targets.to_vec(),
        rows: Vec::new(),
    };
    for (u, arrows) in &gc.at {
        if p.part_of(u) != Some(source) {
            continue;
        }
        // expanding germs get covered through the inverse entries
        let choices: Vec<Vec<&Arrow>> = targets
            .iter()
            .enumerate()
            .map(|(k, &q)| {
                arrows
                    .iter()
                    .filter(|a| {
                        a.ran.len() >= a.dom.len()
                            && p.part_of(&a.ran) == Some(q)
                            && !taken[k].iter().any(|r| r.comparable(&a.ran))
                    })
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut row: Vec<&Arrow> = Vec::new();
        for c in &choices {
            let mut pick: Option<(&Arrow, usize)> = None;
            for a in c {
                row.push(a);
                let n = row_gain(gc, dv, &row)?.len();
                row.pop();
                if pick.is_none_or(|(_, m)| n > m) {
                    pick = Some((a, n));
                }
            }
            row.push(pick.expect("choices are non-empty").0);
        }
        let gain = row_gain(gc, dv, &row)?;
        if gain.is_empty() {
            continue;
        }
        for (k, a) in row.iter().enumerate() {
            taken[k].push(a.ran.clone());
        }
        out.score += gain.len();
        out.rows.push((u.clone(), row.into_iter().cloned().collect()));
    }
    Ok(out)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = subsets(&items[1..], k);
    for mut rest in subsets(&items[1..], k - 1) {
        rest.insert(0, items[0]);
        out.push(rest);
    }
    out
}

fn realize(g: &Arc<Groupoid>, plan: &Plan) -> Result<Multisection> {
    let space = g.space();
    let w = ClopenSet::canonicalize(space, plan.rows.iter().map(|(u, _)| u.clone()).collect());
    let mut spokes = vec![Bisection::identity_on(g, &w)];
    for k in 0..plan.targets.len() {
        let arrows = plan.rows.iter().map(|(_, row)| row[k].clone()).collect();
        spokes.push(Bisection::new(g, arrows)?);
    }
    Multisection::from_spokes(&spokes, &w)
}

/// How the multisections covering `T` are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Packing {
    /// One multisection per cell of `T` not yet covered, with `W` the cell.
    #[default]
    PerCell,
    /// Greedy set cover over whole cells of the partition.
    Greedy,
}

/// Degree-5 multisections whose off-diagonal entries cover every cell of
/// `T`; relabelling components does not change the alternating subgroup,
/// so any off-diagonal entry may do the covering. Each cell not yet covered
/// becomes the first spoke of a new multisection on its domain, the other
/// spokes being the first products of cover pieces reaching new cells.
pub fn build_m(t: &[Bisection], cover: &[NamedBisection], p: &Partition) -> Result<Vec<Multisection>> {
    build_m_with(t, cover, p, Packing::PerCell)
}

pub fn build_m_with(t: &[Bisection], cover: &[NamedBisection], p: &Partition, packing: Packing) -> Result<Vec<Multisection>> {
    match packing {
        Packing::PerCell => per_cell(t, cover, p),
        Packing::Greedy => packed(t, cover, p),
    }
}

fn per_cell(t: &[Bisection], cover: &[NamedBisection], p: &Partition) -> Result<Vec<Multisection>> {
    let mut out: Vec<(Multisection, Vec<usize>)> = Vec::new();
    let mut done = HashSet::new();
    for b in t {
        let g = b.groupoid();
        for a in b.arrows() {
            if !done.insert(a.clone()) {
                continue;
            }
            let (Some(from), Some(to)) = (p.part_of(&a.dom), p.part_of(&a.ran)) else {
                return Err(Error::Undetermined("a cell of T straddles the partition".into()));
            };
            let cell = Bisection::from_trusted(g, vec![a.clone()])?;
            let mut hit = false;
            for (m, cells) in &out {
                if covers(m, cells, &cell, from, to)? {
                    hit = true;
                    break;
                }
            }
            if hit {
                continue;
            }
            let w = cell.source();
            let mut spokes = vec![Bisection::identity_on(g, &w), cell];
            spokes.extend(find_spokes(cover, p, &w, &[from, to], DEGREE - 2)?);
            let m = Multisection::from_spokes(&spokes, &w)?;
            let cells = component_cells(&m, p).expect("spokes land in single cells");
            out.push((m, cells));
        }
    }
    Ok(out.into_iter().map(|(m, _)| m).collect())
}

/// Multisections are chosen greedily: each round takes the source cell and
/// four target cells whose spokes, assembled cylinder by cylinder from germs
/// of `T`, cover the most germs not yet covered. Whatever is left is covered
/// piece by piece, and those multisections over the same cells with
/// disjoint domains are united.
fn packed(t: &[Bisection], cover: &[NamedBisection], p: &Partition) -> Result<Vec<Multisection>> {
    let mut order: Vec<(&Bisection, usize, usize)> = Vec::with_capacity(t.len());
    for b in t {
        let Some((from, to)) = piece_cells(b, p) else {
            return Err(Error::Undetermined("an element of T straddles the partition".into()));
        };
        order.push((b, from, to));
    }
    let Some(g) = t.first().map(|b| b.groupoid().clone()) else {
        return Ok(Vec::new());
    };
    let mut out: Vec<(Multisection, Vec<usize>)> = Vec::new();
    let mut gc = GermCells::new(t, p);
    let mut dv = Derived {
        g: g.clone(),
        depth: gc.depth,
        cache: HashMap::new(),
    };
    let cells: Vec<usize> = (0..p.len()).collect();
    loop {
        let mut best: Option<Plan> = None;
        for &s in &cells {
            let others: Vec<usize> = cells.iter().copied().filter(|&c| c != s).collect();
            for targets in subsets(&others, DEGREE - 1) {
                let pl = plan(&gc, &mut dv, p, s, &targets)?;
                if pl.score > best.as_ref().map_or(0, |b| b.score) {
                    best = Some(pl);
                }
            }
        }
        let Some(pl) = best else { break };
        let m = realize(&g, &pl)?;
        gc.close(&m);
        let mut c = vec![pl.source];
        c.extend(&pl.targets);
        out.push((m, c));
    }
    let planned = out.len();
    order.sort_by_key(|(b, _, _)| (b.arrows().iter().map(|a| a.dom.len()).min(), b.arrows().len()));
    for &(b, from, to) in &order {
        let rest = remainder(b, &out, from, to)?;
        if rest.is_empty() {
            continue;
        }
        let w = rest.source();
        let mut spokes = vec![Bisection::identity_on(&g, &w), rest];
        let mut used = vec![from, to];
        // spokes still uncovered on `w` first, then any element of `T`
        for fresh in [true, false] {
            for &(c, cf, q) in &order {
                if used.len() == DEGREE {
                    break;
                }
                if used.contains(&q) || !w.is_subset(&c.source())? {
                    continue;
                }
                let spoke = c.restrict(&w)?;
                if fresh && remainder(&spoke, &out, cf, q)?.is_empty() {
                    continue;
                }
                spokes.push(spoke);
                used.push(q);
            }
        }
        if used.len() < DEGREE {
            spokes.extend(find_spokes(cover, p, &w, &used, DEGREE - used.len())?);
        }
        let m = Multisection::from_spokes(&spokes, &w)?;
        let cells = component_cells(&m, p).expect("spokes land in single cells");
        out.push((m, cells));
    }
    let rest = out.split_off(planned);
    let mut ms: Vec<Multisection> = out.into_iter().map(|(m, _)| m).collect();
    ms.extend(merge(rest)?);
    Ok(ms)
}

fn merge(ms: Vec<(Multisection, Vec<usize>)>) -> Result<Vec<Multisection>> {
    let mut groups: Vec<(Vec<usize>, Multisection)> = Vec::new();
    'next: for (m, cells) in ms {
        // reorder components by cell
        let mut idx: Vec<usize> = (0..cells.len()).collect();
        idx.sort_by_key(|&i| cells[i]);
        let key: Vec<usize> = idx.iter().map(|&i| cells[i]).collect();
        let grid: Vec<Vec<Bisection>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| m.entry(i, j).clone()).collect())
            .collect();
        let m = Multisection::unchecked(grid);
        for (k, acc) in groups.iter_mut() {
            if *k != key || !acc.domain()?.is_disjoint(&m.domain()?)? {
                continue;
            }
            let d = m.degree();
            let grid = (0..d)
                .map(|i| (0..d).map(|j| acc.entry(i, j).disjoint_union(m.entry(i, j))).collect())
                .collect::<Result<Vec<Vec<_>>>>()?;
            *acc = Multisection::unchecked(grid);
            continue 'next;
        }
        groups.push((key, m));
    }
    Ok(groups.into_iter().map(|(_, m)| m).collect())
}

/// The first element of `t` not covered by an off-diagonal entry of `m`.
pub fn uncovered(t: &[Bisection], m: &[Multisection], p: &Partition) -> Result<Option<Bisection>> {
    let cells: Vec<Option<Vec<usize>>> = m.iter().map(|x| component_cells(x, p)).collect();
    'pieces: for b in t {
        let Some((from, to)) = piece_cells(b, p) else {
            return Ok(Some(b.clone()));
        };
        // a piece may be spread over several multisections
        let mut rest = b.clone();
        for (x, c) in m.iter().zip(&cells) {
            let Some(c) = c else { continue };
            let (Some(i), Some(j)) = (c.iter().position(|&q| q == from), c.iter().position(|&q| q == to)) else {
                continue;
            };
            let common = rest.intersect(x.entry(i, j))?;
            if !common.is_empty() {
                rest = rest.minus(&common)?;
            }
            if rest.is_empty() {
                continue 'pieces;
            }
        }
        return Ok(Some(b.clone()));
    }
    Ok(None)
}

pub fn generating_set(g: &Arc<Groupoid>, basic: &[NamedBisection], depth: usize) -> Result<GeneratingSetReport> {
    generating_set_with(g, basic, depth, Packing::PerCell)
}

pub fn generating_set_with(
    g: &Arc<Groupoid>,
    basic: &[NamedBisection],
    depth: usize,
    packing: Packing,
) -> Result<GeneratingSetReport> {
    let pr = choose_partition(g, basic, depth)?;
    let cover = build_cover(g, basic, &pr)?;
    let t = build_t(&cover, &pr.partition)?;
    let m = build_m_with(&t, &cover, &pr.partition, packing)?;
    let mut generators = Vec::new();
    for (i, x) in m.iter().enumerate() {
        for (k, e) in x.alternating_generators()?.into_iter().enumerate() {
            generators.push(NamedElement {
                name: format!("m{}.{}", i + 1, k + 1),
                element: e,
            });
        }
    }
    Ok(GeneratingSetReport {
        partition: pr.partition,
        orbits: pr.orbits,
        augmented: pr.augmented,
        cover,
        t,
        m,
        generators,
    })
}

/// A word in the generators and their inverses, read as a product whose
/// rightmost letter acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenWord(pub Vec<(usize, bool)>);

impl GenWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GenWord {
        GenWord(self.0.iter().rev().map(|&(i, inv)| (i, !inv)).collect())
    }

    pub fn evaluate(&self, gens: &[Element], identity: &Element) -> Result<Element> {
        let mut acc = identity.clone();
        for &(i, inv) in &self.0 {
            let s = if inv { gens[i].invert()? } else { gens[i].clone() };
            acc = acc.multiply(&s)?;
        }
        Ok(acc)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(i, inv)| {
                if inv {
                    format!("{}^-1", names[i])
                } else {
                    names[i].clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for GenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.0.iter().map(|x| x.0).max().unwrap_or(0))
            .map(|i| format!("g{}", i + 1))
            .collect();
        write!(f, "{}", self.format(&names))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Found(GenWord),
    /// Nothing found; `searched` words of length up to `length` were tried.
    Inconclusive { length: usize, searched: usize },
}

impl Membership {
    pub fn witness(&self) -> Option<&GenWord> {
        match self {
            Membership::Found(w) => Some(w),
            Membership::Inconclusive { .. } => None,
        }
    }
}

/// Breadth-first search for `k` with `k⁻¹ g k = h`, `k` a product of at most
/// `max_len` generators and inverses. `None` means nothing was found within
/// the bounds.
pub fn bounded_conjugator(
    g: &Element,
    h: &Element,
    gens: &[Element],
    max_len: usize,
    max_states: usize,
) -> Result<Option<(GenWord, Element)>> {
    let id = Element::identity(g.groupoid());
    let mut letters = Vec::with_capacity(2 * gens.len());
    for (i, x) in gens.iter().enumerate() {
        letters.push(((i, false), x.clone()));
        let inv = x.invert()?;
        if !inv.equals(x)? {
            letters.push(((i, true), inv));
        }
    }
    let mut seen: HashSet<Element> = HashSet::from([id.clone()]);
    let mut layer = vec![(GenWord::default(), id)];
    for len in 0..=max_len {
        for (w, k) in &layer {
            if g.conjugate(k)?.equals(h)? {
                return Ok(Some((w.clone(), k.clone())));
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for (w, k) in &layer {
            for (l, x) in &letters {
                let kx = k.multiply(x)?;
                if seen.len() < max_states && seen.insert(kx.clone()) {
                    let mut w2 = w.clone();
                    w2.0.push(*l);
                    next.push((w2, kx));
                }
            }
        }
        layer = next;
    }
    Ok(None)
}

fn fingerprint(e: &Element) -> u64 {
    let mut h = DefaultHasher::new();
    e.hash(&mut h);
    h.finish()
}

fn cancels(w: &[(usize, bool)], letter: (usize, bool)) -> bool {
    matches!(w.last(), Some(&(j, inv)) if j == letter.0 && inv != letter.1)
}

// Calls `visit` on every reduced word of length `n` with its product
// `start · word`, depth first; stops early when `visit` returns true.
fn walk(
    start: &Element,
    letters: &[((usize, bool), Element)],
    n: usize,
    visit: &mut dyn FnMut(&Element, &GenWord) -> Result<bool>,
) -> Result<bool> {
    if n == 0 {
        return visit(start, &GenWord::default());
    }
    let mut stack: Vec<(Element, GenWord, usize)> = vec![(start.clone(), GenWord::default(), 0)];
    while let Some((e, w, next)) = stack.pop() {
        let Some(((l, s), k)) = letters[next..].iter().zip(next..).find(|((l, _), _)| !cancels(&w.0, *l)) else {
            continue;
        };
        stack.push((e.clone(), w.clone(), k + 1));
        let x = e.multiply(s)?;
        let mut wx = w;
        wx.0.push(*l);
        if wx.len() == n {
            if visit(&x, &wx)? {
                return Ok(true);
            }
        } else {
            stack.push((x, wx, 0));
        }
    }
    Ok(false)
}

/// Searches for `target` as a word of length at most `max_len` in
/// `gens ∪ gens⁻¹`. Products of up to half the length are tabulated by
/// fingerprint; the other half is enumerated and looked up, so a witness
/// `u·v⁻¹` is found from `target·v = u`. Every witness is checked by
/// evaluation. The search gives up before forming more than `max_states`
/// products.
pub fn bounded_membership(target: &Element, gens: &[Element], max_len: usize, max_states: usize) -> Result<Membership> {
    let id = Element::identity(target.groupoid());
    if target.is_identity() {
        return Ok(Membership::Found(GenWord::default()));
    }
    let mut letters = Vec::with_capacity(2 * gens.len());
    for (i, x) in gens.iter().enumerate() {
        letters.push(((i, false), x.clone()));
        letters.push(((i, true), x.invert()?));
    }
    // reduced words of length n: 1, 2k, 2k(2k-1), ...
    let count = |n: usize| -> usize {
        let k = letters.len();
        (0..n).fold(1usize, |acc, i| acc.saturating_mul(if i == 0 { k } else { k.saturating_sub(1) }))
    };
    let goal = fingerprint(target);
    let mut table: HashMap<u64, GenWord> = HashMap::from([(fingerprint(&id), GenWord::default())]);
    let mut radius = 0;
    let mut searched = 0usize;
    for len in 1..=max_len {
        let want = len.div_ceil(2);
        let grow = radius < want;
        let back = len - if grow { want } else { radius };
        let cost = if grow { count(want) } else { 0 } + count(back);
        if searched.saturating_add(cost) > max_states {
            return Ok(Membership::Inconclusive {
                length: len - 1,
                searched,
            });
        }
        if grow {
            let mut found = None;
            walk(&id, &letters, want, &mut |x, w| {
                searched += 1;
                let h = fingerprint(x);
                if h == goal {
                    if let Some(word) = check(target, w, &GenWord::default(), gens, &id)? {
                        found = Some(word);
                        return Ok(true);
                    }
                }
                table.entry(h).or_insert_with(|| w.clone());
                Ok(false)
            })?;
            if let Some(word) = found {
                return Ok(Membership::Found(word));
            }
            radius = want;
        }
        if back == 0 {
            continue;
        }
        let mut found = None;
        walk(target, &letters, back, &mut |x, v| {
            searched += 1;
            if let Some(u) = table.get(&fingerprint(x)) {
                if let Some(word) = check(target, u, v, gens, &id)? {
                    found = Some(word);
                    return Ok(true);
                }
            }
            Ok(false)
        })?;
        if let Some(word) = found {
            return Ok(Membership::Found(word));
        }
    }
    Ok(Membership::Inconclusive {
        length: max_len,
        searched,
    })
}

// `u · v⁻¹` when it evaluates to `target`.
fn check(target: &Element, u: &GenWord, v: &GenWord, gens: &[Element], id: &Element) -> Result<Option<GenWord>> {
    let mut word = u.0.clone();
    word.extend(v.inverse().0);
    let word = GenWord(word);
    Ok(word.evaluate(gens, id)?.equals(target)?.then_some(word))
}
