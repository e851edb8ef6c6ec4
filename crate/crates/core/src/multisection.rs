//! Multisections: `d × d` grids of bisections with `F[j][k] ∘ F[i][j] = F[i][k]`
//! and identity diagonal blocks on disjoint components. Indices are 0-based.

use std::sync::Arc;

use crate::bisection::{Bisection, Groupoid};
use crate::cylinder::ClopenSet;
use crate::error::{Error, Result};
use crate::fullgroup::Element;
use crate::perm::Perm;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multisection {
    grid: Vec<Vec<Bisection>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `F[j][k] ∘ F[i][j] ≠ F[i][k]`.
    Cocycle(usize, usize, usize),
    NotUnit(usize),
    Overlap(usize, usize),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Cocycle(i, j, k) => write!(
                f,
                "F({j},{k})F({i},{j}) != F({i},{k})",
                i = i + 1,
                j = j + 1,
                k = k + 1
            ),
            Violation::NotUnit(i) => write!(f, "F({0},{0}) is not a unit bisection", i + 1),
            Violation::Overlap(i, j) => {
                write!(f, "components {} and {} intersect", i + 1, j + 1)
            }
        }
    }
}

impl Multisection {
    /// Builds and validates a grid.
    pub fn new(grid: Vec<Vec<Bisection>>) -> Result<Self> {
        let d = grid.len();
        if d == 0 || grid.iter().any(|row| row.len() != d) {
            return Err(Error::Multisection("the grid must be square and non-empty".into()));
        }
        let m = Multisection { grid };
        match m.validate()? {
            None => Ok(m),
            Some(v) => Err(Error::Multisection(v.to_string())),
        }
    }

    /// A grid taken as is; call [`Multisection::validate`] to check it.
    pub fn unchecked(grid: Vec<Vec<Bisection>>) -> Self {
        Multisection { grid }
    }

    pub fn degree(&self) -> usize {
        self.grid.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Bisection {
        &self.grid[i][j]
    }

    pub fn grid(&self) -> &[Vec<Bisection>] {
        &self.grid
    }

    pub fn groupoid(&self) -> &Arc<Groupoid> {
        self.grid[0][0].groupoid()
    }

    pub fn component(&self, i: usize) -> ClopenSet {
        self.grid[i][i].source()
    }

    pub fn components(&self) -> Vec<ClopenSet> {
        (0..self.degree()).map(|i| self.component(i)).collect()
    }

    pub fn domain(&self) -> Result<ClopenSet> {
        let mut u = ClopenSet::empty(self.groupoid().space());
        for c in self.components() {
            u = u.union(&c)?;
        }
        Ok(u)
    }

    pub fn is_empty(&self) -> bool {
        self.grid.iter().flatten().all(Bisection::is_empty)
    }

    /// `None` when both axioms hold, otherwise the first violation found.
    pub fn validate(&self) -> Result<Option<Violation>> {
        let d = self.degree();
        for i in 0..d {
            if !self.grid[i][i].is_identity() {
                return Ok(Some(Violation::NotUnit(i)));
            }
        }
        let comps = self.components();
        for i in 0..d {
            for j in i + 1..d {
                if !comps[i].is_disjoint(&comps[j])? {
                    return Ok(Some(Violation::Overlap(i, j)));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let lhs = self.grid[j][k].compose(&self.grid[i][j])?;
                    if !lhs.equals(&self.grid[i][k])? {
                        return Ok(Some(Violation::Cocycle(i, j, k)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// `F[i][j] = (H_j W)(H_i W)⁻¹`.
    pub fn from_spokes(spokes: &[Bisection], w: &ClopenSet) -> Result<Self> {
        if spokes.is_empty() {
            return Err(Error::Multisection("no spokes given".into()));
        }
        let mut restricted = Vec::with_capacity(spokes.len());
        for (i, h) in spokes.iter().enumerate() {
            if !w.is_subset(&h.source())? {
                return Err(Error::Multisection(format!(
                    "W is not inside the source of spoke {}",
                    i + 1
                )));
            }
            restricted.push(h.restrict(w)?);
        }
        if !restricted[0].is_identity() {
            return Err(Error::Multisection("the first spoke is not the identity on W".into()));
        }
        let ranges: Vec<ClopenSet> = restricted.iter().map(Bisection::range).collect();
        for i in 0..ranges.len() {
            for j in i + 1..ranges.len() {
                if !ranges[i].is_disjoint(&ranges[j])? {
                    return Err(Error::Multisection(format!(
                        "spoke ranges {} and {} overlap",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Self::from_restricted_spokes(&restricted)
    }

    fn from_restricted_spokes(spokes: &[Bisection]) -> Result<Self> {
        let inverses = spokes
            .iter()
            .map(Bisection::inverse)
            .collect::<Result<Vec<_>>>()?;
        let grid = (0..spokes.len())
            .map(|i| {
                (0..spokes.len())
                    .map(|j| spokes[j].compose(&inverses[i]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Multisection { grid })
    }

    /// `⋃ F[i][π(i)]`, extended by the identity outside the domain.
    pub fn embed(&self, pi: &Perm) -> Result<Element> {
        if pi.degree() != self.degree() {
            return Err(Error::Multisection("permutation degree mismatch".into()));
        }
        let g = self.groupoid();
        let mut table = Bisection::identity_on(g, &self.domain()?.complement());
        for i in 0..self.degree() {
            table = table.disjoint_union(&self.grid[i][pi.image(i)])?;
        }
        Element::new(table)
    }

    /// Images of the 3-cycles `(1 2 k)`, `k = 3..d`.
    pub fn alternating_generators(&self) -> Result<Vec<Element>> {
        Perm::alternating_generators(self.degree())
            .iter()
            .map(|p| self.embed(p))
            .collect()
    }

    /// The restriction to `U ⊆ F[i][i]`.
    pub fn restrict(&self, u: &ClopenSet, i: usize) -> Result<Self> {
        if !u.is_subset(&self.component(i))? {
            return Err(Error::Multisection(format!(
                "the set is not inside component {}",
                i + 1
            )));
        }
        let spokes = (0..self.degree())
            .map(|j| self.grid[i][j].restrict(u))
            .collect::<Result<Vec<_>>>()?;
        Self::from_restricted_spokes(&spokes)
    }

    /// Entrywise intersection and differences of two multisections covering
    /// this one: returns `(P, D1, D2)`.
    pub fn split_by_cover(&self, f1: &Multisection, f2: &Multisection) -> Result<(Self, Self, Self)> {
        let d = self.degree();
        if f1.degree() != d || f2.degree() != d {
            return Err(Error::Multisection("cover degree mismatch".into()));
        }
        for i in 0..d {
            for j in 0..d {
                let a = &f1.grid[i][j];
                let b = &f2.grid[i][j];
                let together = a.minus(b)?.disjoint_union(b)?;
                if !together.equals(&self.grid[i][j])? {
                    return Err(Error::Multisection(format!(
                        "the cover does not unite to entry ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let build = |op: &dyn Fn(&Bisection, &Bisection) -> Result<Bisection>| -> Result<Self> {
            let grid = (0..d)
                .map(|i| (0..d).map(|j| op(&f1.grid[i][j], &f2.grid[i][j])).collect())
                .collect::<Result<Vec<Vec<_>>>>()?;
            Self::new(grid)
        };
        let p = build(&|a, b| a.intersect(b))?;
        let d1 = build(&|a, b| a.minus(b))?;
        let d2 = build(&|a, b| b.minus(a))?;
        Ok((p, d1, d2))
    }

    /// Glues `G` and `H` along `U = G[0][0] ∩ H[0][0]`: the result has the
    /// restricted components of `G` followed by those of `H` other than `U`.
    pub fn glue(g: &Multisection, h: &Multisection) -> Result<Self> {
        if g.degree() < 3 || h.degree() < 3 {
            return Err(Error::Multisection("gluing needs degrees at least 3".into()));
        }
        let u = g.component(0).intersect(&h.component(0))?;
        if g.domain()?.intersect(&h.domain()?)? != u {
            return Err(Error::Multisection(
                "the domains meet outside the first components".into(),
            ));
        }
        let gr = g.restrict(&u, 0)?;
        let hr = h.restrict(&u, 0)?;
        let mut spokes: Vec<Bisection> = (0..gr.degree()).map(|j| gr.grid[0][j].clone()).collect();
        spokes.extend((1..hr.degree()).map(|j| hr.grid[0][j].clone()));
        let m = Self::from_restricted_spokes(&spokes)?;
        match m.validate()? {
            None => Ok(m),
            Some(v) => Err(Error::Multisection(v.to_string())),
        }
    }
}
