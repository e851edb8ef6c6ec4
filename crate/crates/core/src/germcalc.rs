//! Germ labels as states of a minimal invertible Mealy automaton over a full
//! shift. The table is kept minimal at all times, so two labels define the
//! same transformation exactly when their ids coincide. Products and inverses
//! are added lazily and the table refuses to grow beyond its state bound.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cylinder::{Letter, SequenceSpace, Word};
use crate::error::{Error, Result};

pub const DEFAULT_STATE_BOUND: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ(pub u32);

impl Germ {
    pub const ID: Germ = Germ(0);

    pub fn is_identity(self) -> bool {
        self == Germ::ID
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonState {
    pub name: String,
    pub transitions: Vec<Transition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub on: String,
    pub out: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    out: Vec<Letter>,
    next: Vec<Germ>,
}

#[derive(Debug, Clone)]
pub struct GermTable {
    k: usize,
    rows: Vec<Row>,
    names: Vec<String>,
    aliases: HashMap<String, Germ>,
    row_index: HashMap<Row, Germ>,
    base: usize,
    compose_memo: HashMap<(Germ, Germ), Germ>,
    inverse_memo: HashMap<Germ, Germ>,
    bound: usize,
}

// A not-yet-minimised node: either an existing state or a new one.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    Old(Germ),
    New(usize),
}

impl GermTable {
    /// Table holding only the identity germ, for an alphabet of `k` letters.
    pub fn trivial(k: usize) -> Self {
        let id = Row {
            out: (0..k as Letter).collect(),
            next: vec![Germ::ID; k],
        };
        let mut row_index = HashMap::new();
        row_index.insert(id.clone(), Germ::ID);
        let mut aliases = HashMap::new();
        aliases.insert("id".to_string(), Germ::ID);
        aliases.insert("1".to_string(), Germ::ID);
        let mut inverse_memo = HashMap::new();
        inverse_memo.insert(Germ::ID, Germ::ID);
        GermTable {
            k,
            rows: vec![id],
            names: vec!["id".to_string()],
            aliases,
            row_index,
            base: 1,
            compose_memo: HashMap::new(),
            inverse_memo,
            bound: DEFAULT_STATE_BOUND,
        }
    }

    /// Loads an automaton over a full shift. Inverses of all states are added
    /// and the resulting closed set becomes the base set of the table.
    pub fn from_automaton(
        space: &SequenceSpace,
        states: &[AutomatonState],
        bound: usize,
    ) -> Result<Self> {
        let k = space.alphabet_size();
        let mut table = GermTable::trivial(k);
        table.bound = bound;
        if states.iter().all(|s| s.name == "id") {
            return Ok(table);
        }
        if space.kind() != crate::cylinder::SpaceKind::FullShift {
            return Err(Error::InvalidAutomaton(
                "automaton germs are supported over full shifts only".into(),
            ));
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        let listed: Vec<&AutomatonState> = states.iter().filter(|s| s.name != "id").collect();
        for (i, s) in listed.iter().enumerate() {
            if s.name.is_empty() || s.name == "1" || s.name.contains(['^', '*', '(', ')']) {
                return Err(Error::InvalidAutomaton(format!("bad state name `{}`", s.name)));
            }
            if index.insert(s.name.as_str(), i).is_some() {
                return Err(Error::InvalidAutomaton(format!("duplicate state `{}`", s.name)));
            }
        }
        let mut new_rows: Vec<(Vec<Letter>, Vec<Node>)> = Vec::new();
        for s in &listed {
            let mut out = vec![Letter::MAX; k];
            let mut next = vec![Node::Old(Germ::ID); k];
            let mut seen = vec![false; k];
            for t in &s.transitions {
                let x = space.letter(&t.on)? as usize;
                let y = space.letter(&t.out)?;
                if seen[x] {
                    return Err(Error::InvalidAutomaton(format!(
                        "state `{}` has two transitions on `{}`",
                        s.name, t.on
                    )));
                }
                seen[x] = true;
                out[x] = y;
                next[x] = match t.to.as_str() {
                    "id" | "1" => Node::Old(Germ::ID),
                    other => Node::New(*index.get(other).ok_or_else(|| {
                        Error::InvalidAutomaton(format!("unknown target state `{other}`"))
                    })?),
                };
            }
            if seen.iter().any(|b| !b) {
                return Err(Error::InvalidAutomaton(format!(
                    "state `{}` is not defined on every letter",
                    s.name
                )));
            }
            let mut perm = out.clone();
            perm.sort_unstable();
            perm.dedup();
            if perm.len() != k {
                return Err(Error::InvalidAutomaton(format!(
                    "state `{}` does not permute the alphabet",
                    s.name
                )));
            }
            new_rows.push((out, next));
        }
        let names: Vec<String> = listed.iter().map(|s| s.name.clone()).collect();
        let ids = table.absorb(new_rows, names.clone())?;
        for (name, g) in names.iter().zip(&ids) {
            table.aliases.insert(name.clone(), *g);
        }
        let all: Vec<Germ> = (0..table.rows.len() as u32).map(Germ).collect();
        for g in all {
            table.inverse(g)?;
        }
        table.base = table.rows.len();
        Ok(table)
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn set_bound(&mut self, bound: usize) {
        self.bound = bound;
    }

    /// States loaded with the automaton (plus their inverses).
    pub fn is_base(&self, g: Germ) -> bool {
        (g.0 as usize) < self.base
    }

    pub fn base_states(&self) -> Vec<Germ> {
        (0..self.base as u32).map(Germ).collect()
    }

    pub fn name(&self, g: Germ) -> &str {
        &self.names[g.0 as usize]
    }

    pub fn output(&self, g: Germ, x: Letter) -> Letter {
        self.rows[g.0 as usize].out[x as usize]
    }

    pub fn next(&self, g: Germ, x: Letter) -> Germ {
        self.rows[g.0 as usize].next[x as usize]
    }

    /// The base state with the given output letters and residuals, if any.
    pub fn base_with_row(&self, out: &[Letter], next: &[Germ]) -> Option<Germ> {
        let row = Row {
            out: out.to_vec(),
            next: next.to_vec(),
        };
        self.row_index.get(&row).copied().filter(|g| self.is_base(*g))
    }

    pub fn apply(&self, g: Germ, w: &Word) -> Word {
        let mut state = g;
        let mut out = Vec::with_capacity(w.len());
        for &x in w.letters() {
            if state.is_identity() {
                out.extend_from_slice(&w.letters()[out.len()..]);
                break;
            }
            let row = &self.rows[state.0 as usize];
            out.push(row.out[x as usize]);
            state = row.next[x as usize];
        }
        Word::from_letters(out)
    }

    pub fn residual(&self, g: Germ, w: &Word) -> Germ {
        let mut state = g;
        for &x in w.letters() {
            if state.is_identity() {
                break;
            }
            state = self.rows[state.0 as usize].next[x as usize];
        }
        state
    }

    /// The label acting as `w ↦ g1(g2(w))`.
    pub fn compose(&mut self, g1: Germ, g2: Germ) -> Result<Germ> {
        if g1.is_identity() {
            return Ok(g2);
        }
        if g2.is_identity() {
            return Ok(g1);
        }
        if let Some(g) = self.compose_memo.get(&(g1, g2)) {
            return Ok(*g);
        }
        let mut pairs: Vec<(Germ, Germ)> = vec![(g1, g2)];
        let mut ix: HashMap<(Germ, Germ), usize> = HashMap::new();
        ix.insert((g1, g2), 0);
        let mut rows: Vec<(Vec<Letter>, Vec<Node>)> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let mut out = Vec::with_capacity(self.k);
            let mut next = Vec::with_capacity(self.k);
            for x in 0..self.k {
                let y = self.rows[q.0 as usize].out[x];
                out.push(self.rows[p.0 as usize].out[y as usize]);
                let np = self.rows[p.0 as usize].next[y as usize];
                let nq = self.rows[q.0 as usize].next[x];
                let node = if np.is_identity() {
                    Node::Old(nq)
                } else if nq.is_identity() {
                    Node::Old(np)
                } else if let Some(g) = self.compose_memo.get(&(np, nq)) {
                    Node::Old(*g)
                } else {
                    let n = pairs.len();
                    let j = *ix.entry((np, nq)).or_insert(n);
                    if j == n {
                        pairs.push((np, nq));
                    }
                    Node::New(j)
                };
                next.push(node);
            }
            rows.push((out, next));
            i += 1;
        }
        let names = pairs
            .iter()
            .map(|(p, q)| product_name(self.name(*p), self.name(*q)))
            .collect();
        let ids = self.absorb(rows, names)?;
        for (pair, g) in pairs.iter().zip(&ids) {
            self.compose_memo.insert(*pair, *g);
        }
        Ok(ids[0])
    }

    pub fn inverse(&mut self, g: Germ) -> Result<Germ> {
        if let Some(h) = self.inverse_memo.get(&g) {
            return Ok(*h);
        }
        // every state reachable from g needs an inverse node
        let mut order = vec![g];
        let mut ix: HashMap<Germ, usize> = HashMap::new();
        ix.insert(g, 0);
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for x in 0..self.k {
                let t = self.rows[s.0 as usize].next[x];
                if !self.inverse_memo.contains_key(&t) && !ix.contains_key(&t) {
                    ix.insert(t, order.len());
                    order.push(t);
                }
            }
            i += 1;
        }
        let mut rows = Vec::with_capacity(order.len());
        for s in &order {
            let row = &self.rows[s.0 as usize];
            let mut out = vec![0; self.k];
            let mut next = vec![Node::Old(Germ::ID); self.k];
            for x in 0..self.k {
                let y = row.out[x] as usize;
                out[y] = x as Letter;
                let t = row.next[x];
                next[y] = match self.inverse_memo.get(&t) {
                    Some(h) => Node::Old(*h),
                    None => Node::New(ix[&t]),
                };
            }
            rows.push((out, next));
        }
        let names = order.iter().map(|s| inverse_name(self.name(*s))).collect();
        let ids = self.absorb(rows, names)?;
        for (s, h) in order.iter().zip(&ids) {
            self.inverse_memo.insert(*s, *h);
            self.inverse_memo.insert(*h, *s);
        }
        Ok(ids[0])
    }

    pub fn power(&mut self, g: Germ, n: i64) -> Result<Germ> {
        let base = if n < 0 { self.inverse(g)? } else { g };
        let mut acc = Germ::ID;
        for _ in 0..n.unsigned_abs() {
            acc = self.compose(base, acc)?;
        }
        Ok(acc)
    }

    pub fn equal_germ(&self, g1: Germ, g2: Germ) -> bool {
        g1 == g2
    }

    /// A shortest word on which the two labels act differently.
    pub fn separating_word(&self, g1: Germ, g2: Germ) -> Option<Word> {
        if g1 == g2 {
            return None;
        }
        let mut seen: HashSet<(Germ, Germ)> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((g1, g2));
        queue.push_back((g1, g2, Word::empty()));
        while let Some((p, q, w)) = queue.pop_front() {
            for x in 0..self.k as Letter {
                let w2 = w.child(x);
                if self.output(p, x) != self.output(q, x) {
                    return Some(w2);
                }
                let pair = (self.next(p, x), self.next(q, x));
                if pair.0 != pair.1 && seen.insert(pair) {
                    queue.push_back((pair.0, pair.1, w2));
                }
            }
        }
        None
    }

    /// Parses `id`, `1`, a state name, `name^n`, and `*`-products of these.
    pub fn parse_label(&mut self, s: &str) -> Result<Germ> {
        let s = s.trim();
        let mut acc = Germ::ID;
        for factor in s.split('*') {
            let factor = factor.trim();
            let (head, exp) = match factor.split_once('^') {
                Some((h, e)) => {
                    let e: i64 = e
                        .trim()
                        .parse()
                        .map_err(|_| Error::UnknownGerm(s.to_string()))?;
                    (h.trim(), e)
                }
                None => (factor, 1),
            };
            let g = *self
                .aliases
                .get(head)
                .ok_or_else(|| Error::UnknownGerm(s.to_string()))?;
            let g = self.power(g, exp)?;
            acc = self.compose(acc, g)?;
        }
        Ok(acc)
    }

    // Merges new nodes into the table, keeping it minimal. Returns the id
    // assigned to each new node.
    fn absorb(&mut self, rows: Vec<(Vec<Letter>, Vec<Node>)>, names: Vec<String>) -> Result<Vec<Germ>> {
        let old = self.rows.len();
        let total = old + rows.len();
        let node_ix = |n: Node| match n {
            Node::Old(g) => g.0 as usize,
            Node::New(i) => old + i,
        };
        let out_of = |v: usize| -> &Vec<Letter> {
            if v < old {
                &self.rows[v].out
            } else {
                &rows[v - old].0
            }
        };
        let next_of = |v: usize, x: usize| -> usize {
            if v < old {
                self.rows[v].next[x].0 as usize
            } else {
                node_ix(rows[v - old].1[x])
            }
        };
        let mut class: Vec<usize> = {
            let mut ids: HashMap<&Vec<Letter>, usize> = HashMap::new();
            (0..total)
                .map(|v| {
                    let n = ids.len();
                    *ids.entry(out_of(v)).or_insert(n)
                })
                .collect()
        };
        let mut count = class.iter().copied().max().map_or(0, |m| m + 1);
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..total)
                .map(|v| {
                    let sig: Vec<usize> = (0..self.k).map(|x| class[next_of(v, x)]).collect();
                    let n = ids.len();
                    *ids.entry((class[v], sig)).or_insert(n)
                })
                .collect();
            let stable = ids.len() == count;
            count = ids.len();
            class = next;
            if stable {
                break;
            }
        }
        let mut rep: HashMap<usize, Germ> = HashMap::new();
        for v in 0..old {
            rep.insert(class[v], Germ(v as u32));
        }
        let fresh: Vec<usize> = {
            let mut seen = HashSet::new();
            (old..total)
                .filter(|v| !rep.contains_key(&class[*v]) && seen.insert(class[*v]))
                .collect()
        };
        if old + fresh.len() > self.bound {
            return Err(Error::StateBound { bound: self.bound });
        }
        for (i, v) in fresh.iter().enumerate() {
            rep.insert(class[*v], Germ((old + i) as u32));
        }
        let built: Vec<(Row, Germ, String)> = fresh
            .iter()
            .map(|v| {
                let out = out_of(*v).clone();
                let next: Vec<Germ> = (0..self.k).map(|x| rep[&class[next_of(*v, x)]]).collect();
                (Row { out, next }, rep[&class[*v]], names[*v - old].clone())
            })
            .collect();
        for (row, g, name) in built {
            self.row_index.insert(row.clone(), g);
            self.rows.push(row);
            self.names.push(name);
        }
        Ok((old..total).map(|v| rep[&class[v]]).collect())
    }
}

fn split_power(name: &str) -> (&str, i64) {
    if let Some((h, e)) = name.rsplit_once('^') {
        if !h.contains(['*', '(']) {
            if let Ok(e) = e.parse() {
                return (h, e);
            }
        }
    }
    (name, 1)
}

fn power_name(base: &str, e: i64) -> String {
    match e {
        0 => "id".to_string(),
        1 => base.to_string(),
        _ => format!("{base}^{e}"),
    }
}

fn product_name(a: &str, b: &str) -> String {
    if a == "id" {
        return b.to_string();
    }
    if b == "id" {
        return a.to_string();
    }
    let (ha, ea) = split_power(a);
    let (hb, eb) = split_power(b);
    if ha == hb && !ha.contains('*') {
        return power_name(ha, ea + eb);
    }
    format!("{a}*{b}")
}

fn inverse_name(a: &str) -> String {
    if a == "id" {
        return a.to_string();
    }
    let (h, e) = split_power(a);
    if !h.contains('*') {
        return power_name(h, -e);
    }
    format!("({a})^-1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    pub(crate) fn rule(on: &str, out: &str, to: &str) -> Transition {
        Transition {
            on: on.into(),
            out: out.into(),
            to: to.into(),
        }
    }

    fn setup() -> (Arc<SequenceSpace>, GermTable, Germ) {
        let space = SequenceSpace::full_shift(&["1", "2", "3"]).unwrap();
        let a = AutomatonState {
            name: "a".into(),
            transitions: vec![rule("1", "2", "id"), rule("2", "1", "a"), rule("3", "3", "id")],
        };
        let mut t = GermTable::from_automaton(&space, &[a], 64).unwrap();
        let g = t.parse_label("a").unwrap();
        (space, t, g)
    }

    #[test]
    fn apply_and_residual() {
        let (s, t, a) = setup();
        let w = s.parse_word("2221").unwrap();
        assert_eq!(s.format_word(&t.apply(a, &w)), "1112");
        let w = s.parse_word("3123").unwrap();
        assert_eq!(t.apply(a, &w), w);
        assert_eq!(t.residual(a, &s.parse_word("1").unwrap()), Germ::ID);
        assert_eq!(t.residual(a, &s.parse_word("2").unwrap()), a);
    }

    #[test]
    fn inverse_and_powers() {
        let (s, mut t, a) = setup();
        let ai = t.inverse(a).unwrap();
        assert_eq!(t.name(ai), "a^-1");
        assert_eq!(t.compose(a, ai).unwrap(), Germ::ID);
        let a2 = t.parse_label("a^2").unwrap();
        assert_eq!(t.name(a2), "a^2");
        for w in s.words_of_length(6) {
            assert_eq!(t.apply(a2, &w), t.apply(a, &t.apply(a, &w)));
        }
        assert_eq!(t.parse_label("a^-1").unwrap(), ai);
        assert_eq!(t.parse_label("a*a^-1").unwrap(), Germ::ID);
    }

    #[test]
    fn separating_words() {
        let (s, t, a) = setup();
        let w = t.separating_word(a, Germ::ID).unwrap();
        assert_eq!(s.format_word(&w), "1");
        assert!(t.separating_word(a, a).is_none());
    }

    #[test]
    fn state_bound_is_enforced() {
        let space = SequenceSpace::full_shift(&["0", "1"]).unwrap();
        // binary odometer: its powers need ever more states
        let a = AutomatonState {
            name: "a".into(),
            transitions: vec![rule("0", "1", "id"), rule("1", "0", "a")],
        };
        let mut t = GermTable::from_automaton(&space, &[a], 6).unwrap();
        let a = t.parse_label("a").unwrap();
        assert!(matches!(t.power(a, 300), Err(Error::StateBound { bound: 6 })));
    }

    #[test]
    fn bad_automata() {
        let space = SequenceSpace::full_shift(&["1", "2"]).unwrap();
        let noperm = AutomatonState {
            name: "b".into(),
            transitions: vec![rule("1", "1", "id"), rule("2", "1", "id")],
        };
        assert!(GermTable::from_automaton(&space, &[noperm], 64).is_err());
        let dangling = AutomatonState {
            name: "b".into(),
            transitions: vec![rule("1", "2", "c"), rule("2", "1", "id")],
        };
        assert!(GermTable::from_automaton(&space, &[dangling], 64).is_err());
    }
}
