//! Sequence spaces and their clopen subsets.
//!
//! A space is described by an initial letter set and per-stage successor
//! lists; stage `n` governs which letter may follow the letter at position
//! `n`. The last stage repeats forever, which covers full shifts (one stage,
//! everything allowed), one-step SFTs (one stage) and stationary-tailed
//! Bratteli path spaces (one stage per level).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u8;

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    FullShift,
    Sft,
    Bratteli,
}

#[derive(Debug)]
pub struct SequenceSpace {
    id: u64,
    kind: SpaceKind,
    names: Vec<String>,
    initial: Vec<Letter>,
    // succ[stage][letter]
    succ: Vec<Vec<Vec<Letter>>>,
    compact_names: bool,
    // tail class of (clamped position, letter); ROOT_CLASS for the empty word
    tail: Vec<Vec<u32>>,
    root_tail: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDesc {
    FullShift {
        alphabet: Vec<String>,
    },
    Sft {
        alphabet: Vec<String>,
        allowed: Vec<(String, String)>,
    },
    Bratteli {
        levels: Vec<Vec<String>>,
        edges: Vec<Vec<BratteliEdge>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BratteliEdge {
    Plain(String, String),
    Named(String, String, String),
}

impl BratteliEdge {
    fn ends(&self) -> (&str, &str) {
        match self {
            BratteliEdge::Plain(s, t) | BratteliEdge::Named(s, t, _) => (s, t),
        }
    }
}

impl SequenceSpace {
    pub fn full_shift<S: AsRef<str>>(alphabet: &[S]) -> Result<Arc<Self>> {
        let names: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let all: Vec<Letter> = (0..names.len() as Letter).collect();
        let succ = vec![vec![all.clone(); names.len()]];
        Self::build(SpaceKind::FullShift, names, all, succ)
    }

    pub fn sft<S: AsRef<str>>(alphabet: &[S], allowed: &[(S, S)]) -> Result<Arc<Self>> {
        let names: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let index = name_index(&names)?;
        let mut succ = vec![Vec::new(); names.len()];
        for (x, y) in allowed {
            let x = lookup(&index, x.as_ref())?;
            let y = lookup(&index, y.as_ref())?;
            succ[x as usize].push(y);
        }
        for s in &mut succ {
            s.sort_unstable();
            s.dedup();
        }
        // letters that start no infinite path are pruned from the initial set
        let all: Vec<Letter> = (0..names.len() as Letter).collect();
        let live = live_letters(&succ);
        let initial: Vec<Letter> = all.into_iter().filter(|x| live[*x as usize]).collect();
        for s in &mut succ {
            s.retain(|y| live[*y as usize]);
        }
        Self::build(SpaceKind::Sft, names, initial, vec![succ])
    }

    /// `levels[n]` are the vertex names of level `n`; `edges[n]` connect level
    /// `n` to level `n + 1`. The final edge level repeats, so the last vertex
    /// level must carry the same names as the one before it.
    pub fn bratteli(levels: &[Vec<String>], edges: &[Vec<BratteliEdge>]) -> Result<Arc<Self>> {
        if edges.is_empty() || levels.len() != edges.len() + 1 {
            return Err(Error::InvalidSpace(
                "bratteli data needs levels.len() == edges.len() + 1 >= 2".into(),
            ));
        }
        let last = levels.len() - 1;
        if levels[last] != levels[last - 1] {
            return Err(Error::InvalidSpace(
                "the last two vertex levels must coincide (stationary tail)".into(),
            ));
        }
        let mut names = Vec::new();
        let mut ends: Vec<(usize, usize)> = Vec::new();
        let mut per_stage: Vec<Vec<Letter>> = Vec::new();
        for (n, level_edges) in edges.iter().enumerate() {
            let src_ix = name_index(&levels[n])?;
            let dst_ix = name_index(&levels[n + 1])?;
            let mut stage = Vec::new();
            for (i, e) in level_edges.iter().enumerate() {
                let (s, t) = e.ends();
                let s = lookup(&src_ix, s)? as usize;
                let t = lookup(&dst_ix, t)? as usize;
                let name = match e {
                    BratteliEdge::Named(_, _, name) => name.clone(),
                    BratteliEdge::Plain(..) => format!("e{n}_{i}"),
                };
                if names.len() >= Letter::MAX as usize {
                    return Err(Error::InvalidSpace("too many edges".into()));
                }
                stage.push(names.len() as Letter);
                names.push(name);
                ends.push((s, t));
            }
            // surjectivity of source and range maps
            for v in 0..levels[n + 1].len() {
                if !stage.iter().any(|e| ends[*e as usize].1 == v) {
                    return Err(Error::InvalidSpace(format!(
                        "vertex {} of level {} has no incoming edge",
                        levels[n + 1][v],
                        n + 1
                    )));
                }
            }
            for v in 0..levels[n].len() {
                if !stage.iter().any(|e| ends[*e as usize].0 == v) {
                    return Err(Error::InvalidSpace(format!(
                        "vertex {} of level {} has no outgoing edge",
                        levels[n][v], n
                    )));
                }
            }
            per_stage.push(stage);
        }
        name_index(&names)?;
        let stages = per_stage.len();
        let mut succ = vec![vec![Vec::new(); names.len()]; stages];
        for n in 0..stages {
            let next = per_stage[(n + 1).min(stages - 1)].clone();
            for &e in &per_stage[n] {
                let t = ends[e as usize].1;
                succ[n][e as usize] = next
                    .iter()
                    .copied()
                    .filter(|f| ends[*f as usize].0 == t)
                    .collect();
            }
        }
        Self::build(SpaceKind::Bratteli, names, per_stage[0].clone(), succ)
    }

    pub fn from_desc(desc: &SpaceDesc) -> Result<Arc<Self>> {
        match desc {
            SpaceDesc::FullShift { alphabet } => Self::full_shift(alphabet),
            SpaceDesc::Sft { alphabet, allowed } => {
                let pairs: Vec<(String, String)> = allowed.clone();
                Self::sft(alphabet, &pairs)
            }
            SpaceDesc::Bratteli { levels, edges } => Self::bratteli(levels, edges),
        }
    }

    fn build(
        kind: SpaceKind,
        names: Vec<String>,
        initial: Vec<Letter>,
        succ: Vec<Vec<Vec<Letter>>>,
    ) -> Result<Arc<Self>> {
        if names.is_empty() || initial.is_empty() {
            return Err(Error::InvalidSpace("the space is empty".into()));
        }
        if names.len() > Letter::MAX as usize {
            return Err(Error::InvalidSpace("alphabet too large".into()));
        }
        name_index(&names)?;
        for (n, stage) in succ.iter().enumerate() {
            let reachable: BTreeSet<Letter> = if n == 0 {
                initial.iter().copied().collect()
            } else {
                succ[n - 1].iter().flatten().copied().collect()
            };
            for x in reachable {
                if stage[x as usize].is_empty() {
                    return Err(Error::InvalidSpace(format!(
                        "letter {} is a dead end at stage {}",
                        names[x as usize], n
                    )));
                }
            }
        }
        let compact_names = names
            .iter()
            .all(|n| n.chars().count() == 1 && n != "." && n != "ε");
        let (tail, root_tail) = tail_classes(&initial, &succ, names.len());
        Ok(Arc::new(SequenceSpace {
            id: NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed),
            kind,
            names,
            initial,
            succ,
            compact_names,
            tail,
            root_tail,
        }))
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn alphabet_size(&self) -> usize {
        self.names.len()
    }

    pub fn letter_name(&self, x: Letter) -> &str {
        &self.names[x as usize]
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as Letter)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn stages(&self) -> usize {
        self.succ.len()
    }

    /// Letters allowed right after `w`.
    pub fn extensions(&self, w: &Word) -> &[Letter] {
        match w.last() {
            None => &self.initial,
            Some(x) => {
                let stage = (w.len() - 1).min(self.succ.len() - 1);
                &self.succ[stage][x as usize]
            }
        }
    }

    /// Two words with equal tail class have identical follower sets.
    pub fn tail_class(&self, w: &Word) -> u32 {
        match w.last() {
            None => self.root_tail,
            Some(x) => {
                let stage = (w.len() - 1).min(self.succ.len() - 1);
                self.tail[stage][x as usize]
            }
        }
    }

    pub fn is_valid(&self, w: &Word) -> bool {
        let mut prefix = Word::empty();
        for &x in w.letters() {
            if !self.extensions(&prefix).contains(&x) {
                return false;
            }
            prefix.push(x);
        }
        true
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::empty());
        }
        let letters: Vec<Letter> = if self.compact_names {
            s.chars()
                .map(|c| self.letter(&c.to_string()))
                .collect::<Result<_>>()?
        } else {
            s.split('.')
                .map(|p| self.letter(p))
                .collect::<Result<_>>()?
        };
        let w = Word(letters);
        if !self.is_valid(&w) {
            return Err(Error::InvalidWord {
                word: s.to_string(),
                reason: "violates the transition relation".into(),
            });
        }
        Ok(w)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let parts: Vec<&str> = w.letters().iter().map(|x| self.letter_name(*x)).collect();
        if self.compact_names {
            parts.concat()
        } else {
            parts.join(".")
        }
    }

    /// All allowed words of length `n`, in lexicographic order.
    pub fn words_of_length(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut w = Word::empty();
        self.collect_words(&mut w, n, &mut out);
        out
    }

    fn collect_words(&self, w: &mut Word, n: usize, out: &mut Vec<Word>) {
        if w.len() == n {
            out.push(w.clone());
            return;
        }
        let ext = self.extensions(w).to_vec();
        for x in ext {
            w.push(x);
            self.collect_words(w, n, out);
            w.pop();
        }
    }

    /// Descendants of `w` of total length `n` (or `w` itself if already longer).
    pub fn extend_to(&self, w: &Word, n: usize) -> Vec<Word> {
        if w.len() >= n {
            return vec![w.clone()];
        }
        let mut out = Vec::new();
        let mut v = w.clone();
        self.collect_words(&mut v, n, &mut out);
        out
    }

    pub fn children(&self, w: &Word) -> Vec<Word> {
        self.extensions(w).iter().map(|x| w.child(*x)).collect()
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        a.id == b.id
    }
}

fn name_index(names: &[String]) -> Result<HashMap<&str, Letter>> {
    let mut ix = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() {
            return Err(Error::InvalidSpace("empty letter name".into()));
        }
        if ix.insert(n.as_str(), i as Letter).is_some() {
            return Err(Error::InvalidSpace(format!("duplicate name {n}")));
        }
    }
    Ok(ix)
}

fn lookup(ix: &HashMap<&str, Letter>, name: &str) -> Result<Letter> {
    ix.get(name)
        .copied()
        .ok_or_else(|| Error::UnknownLetter(name.to_string()))
}

fn live_letters(succ: &[Vec<Letter>]) -> Vec<bool> {
    let mut live = vec![true; succ.len()];
    loop {
        let mut changed = false;
        for x in 0..succ.len() {
            if live[x] && !succ[x].iter().any(|y| live[*y as usize]) {
                live[x] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}

// Moore partition refinement on the follower-set automaton.
fn tail_classes(initial: &[Letter], succ: &[Vec<Vec<Letter>>], k: usize) -> (Vec<Vec<u32>>, u32) {
    let stages = succ.len();
    let node = |stage: usize, x: usize| stage * k + x;
    let root = stages * k;
    let count = root + 1;
    let edges = |v: usize| -> Vec<(Letter, usize)> {
        if v == root {
            initial.iter().map(|y| (*y, node(0, *y as usize))).collect()
        } else {
            let (s, x) = (v / k, v % k);
            let next = (s + 1).min(stages - 1);
            succ[s][x].iter().map(|y| (*y, node(next, *y as usize))).collect()
        }
    };
    let mut class: Vec<u32> = {
        let mut ids: HashMap<Vec<Letter>, u32> = HashMap::new();
        (0..count)
            .map(|v| {
                let sig: Vec<Letter> = edges(v).iter().map(|e| e.0).collect();
                let n = ids.len() as u32;
                *ids.entry(sig).or_insert(n)
            })
            .collect()
    };
    loop {
        let mut ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let next: Vec<u32> = (0..count)
            .map(|v| {
                let sig: Vec<u32> = edges(v).iter().map(|e| class[e.1]).collect();
                let n = ids.len() as u32;
                *ids.entry((class[v], sig)).or_insert(n)
            })
            .collect();
        let stable = ids.len() == class.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if stable {
            break;
        }
    }
    let table = (0..stages)
        .map(|s| (0..k).map(|x| class[node(s, x)]).collect())
        .collect();
    (table, class[root])
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn push(&mut self, x: Letter) {
        self.0.push(x);
    }

    pub fn pop(&mut self) -> Option<Letter> {
        self.0.pop()
    }

    pub fn child(&self, x: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(x);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self = prefix · rest` gives `rest`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Word(s.to_vec()))
    }

    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for x in &self.0 {
            write!(f, "[{x}]")?;
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct ClopenSet {
    space: Arc<SequenceSpace>,
    words: Vec<Word>,
}

impl PartialEq for ClopenSet {
    fn eq(&self, other: &Self) -> bool {
        SequenceSpace::same(&self.space, &other.space) && self.words == other.words
    }
}

impl Eq for ClopenSet {}

impl std::hash::Hash for ClopenSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.space.id.hash(state);
        self.words.hash(state);
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl ClopenSet {
    pub fn empty(space: &Arc<SequenceSpace>) -> Self {
        ClopenSet {
            space: space.clone(),
            words: Vec::new(),
        }
    }

    pub fn whole(space: &Arc<SequenceSpace>) -> Self {
        ClopenSet {
            space: space.clone(),
            words: vec![Word::empty()],
        }
    }

    pub fn cylinder(space: &Arc<SequenceSpace>, w: Word) -> Self {
        Self::canonicalize(space, vec![w])
    }

    pub fn parse(space: &Arc<SequenceSpace>, words: &[&str]) -> Result<Self> {
        let words = words
            .iter()
            .map(|w| space.parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::canonicalize(space, words))
    }

    pub fn canonicalize(space: &Arc<SequenceSpace>, mut words: Vec<Word>) -> Self {
        words.sort();
        words.dedup();
        // sorted order puts a prefix directly before its extensions
        let mut kept: Vec<Word> = Vec::with_capacity(words.len());
        for w in words {
            if kept.last().is_some_and(|p| p.is_prefix_of(&w)) {
                continue;
            }
            kept.push(w);
        }
        let max_len = kept.iter().map(Word::len).max().unwrap_or(0);
        let mut by_len: BTreeMap<usize, Vec<Word>> = BTreeMap::new();
        for w in kept {
            by_len.entry(w.len()).or_default().push(w);
        }
        let mut out = Vec::new();
        for len in (0..=max_len).rev() {
            let mut bucket = by_len.remove(&len).unwrap_or_default();
            if len == 0 {
                out.append(&mut bucket);
                break;
            }
            bucket.sort();
            let mut i = 0;
            while i < bucket.len() {
                let parent = bucket[i].parent().unwrap();
                let mut j = i;
                while j < bucket.len() && parent.is_prefix_of(&bucket[j]) {
                    j += 1;
                }
                let ext = space.extensions(&parent);
                let complete = j - i == ext.len()
                    && bucket[i..j]
                        .iter()
                        .zip(ext.iter())
                        .all(|(w, x)| w.last() == Some(*x));
                if complete {
                    by_len.entry(len - 1).or_default().push(parent);
                } else {
                    out.extend_from_slice(&bucket[i..j]);
                }
                i = j;
            }
        }
        out.sort();
        ClopenSet {
            space: space.clone(),
            words: out,
        }
    }

    pub fn space(&self) -> &Arc<SequenceSpace> {
        &self.space
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.words.len() == 1 && self.words[0].is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    fn check(&self, other: &ClopenSet) -> Result<()> {
        if SequenceSpace::same(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    /// Whether the cylinder of `w` lies inside the set.
    pub fn contains_cylinder(&self, w: &Word) -> bool {
        self.words.iter().any(|p| p.is_prefix_of(w))
    }

    /// Whether the cylinder of `w` meets the set.
    pub fn meets_cylinder(&self, w: &Word) -> bool {
        self.words.iter().any(|p| p.comparable(w))
    }

    pub fn union(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check(other)?;
        let mut words = self.words.clone();
        words.extend_from_slice(&other.words);
        Ok(Self::canonicalize(&self.space, words))
    }

    pub fn intersect(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check(other)?;
        let mut words = Vec::new();
        for a in &self.words {
            for b in &other.words {
                if a.is_prefix_of(b) {
                    words.push(b.clone());
                } else if b.is_prefix_of(a) {
                    words.push(a.clone());
                }
            }
        }
        Ok(Self::canonicalize(&self.space, words))
    }

    pub fn complement(&self) -> ClopenSet {
        let mut out = Vec::new();
        self.complement_below(&Word::empty(), &mut out);
        Self::canonicalize(&self.space, out)
    }

    fn complement_below(&self, w: &Word, out: &mut Vec<Word>) {
        if self.contains_cylinder(w) {
            return;
        }
        if !self.words.iter().any(|p| w.is_prefix_of(p)) {
            out.push(w.clone());
            return;
        }
        for c in self.space.children(w) {
            self.complement_below(&c, out);
        }
    }

    pub fn difference(&self, other: &ClopenSet) -> Result<ClopenSet> {
        self.check(other)?;
        self.intersect(&other.complement())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> Result<bool> {
        self.check(other)?;
        Ok(!self
            .words
            .iter()
            .any(|a| other.words.iter().any(|b| a.comparable(b))))
    }

    pub fn is_subset(&self, other: &ClopenSet) -> Result<bool> {
        self.check(other)?;
        Ok(self.words.iter().all(|w| other.contains_cylinder(w)))
    }

    /// The set written as an antichain of words of length exactly `n`
    /// (words already longer are kept).
    pub fn expand_to(&self, n: usize) -> Vec<Word> {
        self.words
            .iter()
            .flat_map(|w| self.space.extend_to(w, n))
            .collect()
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self.words.iter().map(|w| self.space.format_word(w)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| self.space.format_word(w)).collect()
    }
}

/// The coarsest partition of the space refining every input set and its
/// complement. Cells are returned in order of their least word.
pub fn refine(space: &Arc<SequenceSpace>, sets: &[ClopenSet]) -> Result<Vec<ClopenSet>> {
    let mut cells = vec![ClopenSet::whole(space)];
    for s in sets {
        if !SequenceSpace::same(space, &s.space) {
            return Err(Error::SpaceMismatch);
        }
        let outside = s.complement();
        let mut next = Vec::with_capacity(cells.len() * 2);
        for c in &cells {
            for part in [c.intersect(s)?, c.intersect(&outside)?] {
                if !part.is_empty() {
                    next.push(part);
                }
            }
        }
        cells = next;
    }
    cells.sort_by(|a, b| a.words.cmp(&b.words));
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin() -> Arc<SequenceSpace> {
        SequenceSpace::full_shift(&["0", "1"]).unwrap()
    }

    fn set(s: &Arc<SequenceSpace>, w: &[&str]) -> ClopenSet {
        ClopenSet::parse(s, w).unwrap()
    }

    #[test]
    fn sibling_merge_and_absorption() {
        let s = bin();
        assert!(set(&s, &["0", "1"]).is_whole());
        assert_eq!(set(&s, &["01", "0"]), set(&s, &["0"]));
        assert_eq!(set(&s, &["00", "01", "10"]).to_strings(), vec!["0", "10"]);
    }

    #[test]
    fn boolean_ops() {
        let s = bin();
        let u = set(&s, &["01"]);
        assert_eq!(u.complement().complement(), u);
        assert!(set(&s, &["0"]).intersect(&set(&s, &["1"])).unwrap().is_empty());
        assert!(set(&s, &["0"]).union(&set(&s, &["1"])).unwrap().is_whole());
        assert_eq!(u.complement().to_strings(), vec!["00", "1"]);
    }

    #[test]
    fn refine_examples() {
        let s = bin();
        let cells = refine(&s, &[set(&s, &["0"])]).unwrap();
        assert_eq!(cells, vec![set(&s, &["0"]), set(&s, &["1"])]);
        let cells = refine(&s, &[set(&s, &["0"]), set(&s, &["00", "10"])]).unwrap();
        let got: Vec<Vec<String>> = cells.iter().map(|c| c.to_strings()).collect();
        assert_eq!(got, vec![vec!["00"], vec!["01"], vec!["10"], vec!["11"]]);
        assert_eq!(refine(&s, &[]).unwrap(), vec![ClopenSet::whole(&s)]);
    }

    #[test]
    fn golden_mean_sft() {
        let s = SequenceSpace::sft(&["0", "1"], &[("0", "0"), ("0", "1"), ("1", "0")]).unwrap();
        assert!(s.parse_word("11").is_err());
        // after "1" only "0" may follow, so {"10"} is the whole cylinder "1"
        assert_eq!(set(&s, &["10"]).to_strings(), vec!["1"]);
        assert_eq!(s.words_of_length(3).len(), 5);
        assert_eq!(s.tail_class(&s.parse_word("0").unwrap()), s.root_tail);
    }

    #[test]
    fn bratteli_space() {
        let levels = vec![
            vec!["r".to_string()],
            vec!["a".to_string(), "b".to_string()],
            vec!["a".to_string(), "b".to_string()],
        ];
        let e = |s: &str, t: &str, n: &str| BratteliEdge::Named(s.into(), t.into(), n.into());
        let edges = vec![
            vec![e("r", "a", "p"), e("r", "b", "q")],
            vec![e("a", "a", "x"), e("a", "b", "y"), e("b", "a", "z")],
        ];
        let s = SequenceSpace::bratteli(&levels, &edges).unwrap();
        assert_eq!(s.words_of_length(1).len(), 2);
        assert_eq!(s.words_of_length(2).len(), 3);
        assert!(s.parse_word("qy").is_err());
        assert!(s.parse_word("pyz").is_ok());
    }

    #[test]
    fn space_mismatch() {
        let a = bin();
        let b = bin();
        assert_eq!(
            ClopenSet::whole(&a).union(&ClopenSet::whole(&b)),
            Err(Error::SpaceMismatch)
        );
    }

    #[test]
    fn dead_end_rejected() {
        let r = SequenceSpace::bratteli(
            &[vec!["r".into()], vec!["a".into()], vec!["b".into()]],
            &[
                vec![BratteliEdge::Plain("r".into(), "a".into())],
                vec![BratteliEdge::Plain("a".into(), "b".into())],
            ],
        );
        assert!(r.is_err());
    }
}
