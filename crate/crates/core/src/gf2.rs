//! Row reduction over GF(2) with packed bit vectors.

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(n: usize) -> Self {
        BitVec {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// A fully reduced row basis: each pivot column is zero in every other row.
#[derive(Clone, Debug)]
pub struct Basis {
    n: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<Option<usize>>,
}

impl Basis {
    pub fn new(n: usize) -> Self {
        Basis {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![None; n],
        }
    }

    pub fn columns(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &mut BitVec) {
        let hits: Vec<usize> = v.ones().filter(|c| self.pivot_row[*c].is_some()).collect();
        for c in hits {
            if v.get(c) {
                v.xor(&self.rows[self.pivot_row[c].unwrap()]);
            }
        }
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, mut v: BitVec) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for r in &mut self.rows {
            if r.get(p) {
                r.xor(&v);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: usize, ones: &[usize]) -> BitVec {
        let mut b = BitVec::zeros(n);
        for i in ones {
            b.flip(*i);
        }
        b
    }

    #[test]
    fn rank_of_cycle_boundary() {
        // boundary of a triangle's edges: rank 2
        let mut b = Basis::new(3);
        assert!(b.insert(v(3, &[0, 1])));
        assert!(b.insert(v(3, &[1, 2])));
        assert!(!b.insert(v(3, &[0, 2])));
        assert_eq!(b.rank(), 2);
        let mut x = v(3, &[0, 2]);
        b.reduce(&mut x);
        assert!(x.is_zero());
    }

    #[test]
    fn wide_vectors() {
        let mut b = Basis::new(200);
        assert!(b.insert(v(200, &[3, 130])));
        assert!(b.insert(v(200, &[130, 199])));
        let mut x = v(200, &[3, 199]);
        b.reduce(&mut x);
        assert!(x.is_zero());
        assert_eq!(v(200, &[5, 70, 199]).ones().collect::<Vec<_>>(), vec![5, 70, 199]);
    }
}
