//! Small permutations of `0..d`, composed right to left: `(p * q)(i) = p(q(i))`.

use std::collections::{HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(d: usize) -> Self {
        Perm((0..d as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x as usize >= images.len() || std::mem::replace(&mut seen[x as usize], true) {
                return None;
            }
        }
        Some(Perm(images))
    }

    /// The cycle `c[0] → c[1] → … → c[0]` on `d` points.
    pub fn cycle(d: usize, c: &[usize]) -> Self {
        let mut p = Self::identity(d);
        for (i, &x) in c.iter().enumerate() {
            p.0[x] = c[(i + 1) % c.len()] as u8;
        }
        p
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, x)| i == *x as usize)
    }

    pub fn then(&self, first: &Perm) -> Perm {
        Perm(first.0.iter().map(|x| self.0[*x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut r = vec![0; self.0.len()];
        for (i, x) in self.0.iter().enumerate() {
            r[*x as usize] = i as u8;
        }
        Perm(r)
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        let mut transpositions = 0;
        for i in 0..self.0.len() {
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j] as usize;
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }

    /// Cycle lengths, including fixed points, in ascending order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j] as usize;
                len += 1;
            }
            if len > 0 {
                out.push(len);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn all(d: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (0..d as u8).collect();
        heap_permutations(d, &mut cur, &mut out);
        out.sort();
        out
    }

    pub fn alternating(d: usize) -> Vec<Perm> {
        Self::all(d).into_iter().filter(Perm::is_even).collect()
    }

    /// The 3-cycles `(0 1 k)` for `k = 2..d`, which generate `A_d`.
    pub fn alternating_generators(d: usize) -> Vec<Perm> {
        (2..d).map(|k| Self::cycle(d, &[0, 1, k])).collect()
    }
}

fn heap_permutations(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Perm>) {
    if k <= 1 {
        out.push(Perm(cur.clone()));
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(k - 1, cur, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
    heap_permutations(k - 1, cur, out);
}

/// Order of the subgroup of `S_d^n` generated by the given tuples, by BFS.
pub fn closure_order(gens: &[Vec<Perm>]) -> usize {
    let Some(first) = gens.first() else {
        return 1;
    };
    let start: Vec<Perm> = first.iter().map(|p| Perm::identity(p.degree())).collect();
    let mut seen: HashSet<Vec<Perm>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<Perm> = g.iter().zip(&x).map(|(a, b)| a.then(b)).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}
