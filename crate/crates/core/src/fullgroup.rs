//! Elements of the topological full group: bisections whose source and
//! range are the whole unit space.

use std::fmt;
use std::sync::Arc;

use crate::bisection::{restrict_arrow, Arrow, Bisection, Groupoid, Semantics};
use crate::cylinder::{ClopenSet, Word};
use crate::error::{Error, Result};
use crate::germcalc::Germ;

/// Splitting depth used when locating fixed germs inside a cell.
const SUPPORT_DEPTH: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    table: Bisection,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.table.compact())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.table.display())
    }
}

impl Element {
    pub fn new(table: Bisection) -> Result<Self> {
        if !table.source().is_whole() {
            return Err(Error::NotFull(format!(
                "source is {}",
                table.source().display()
            )));
        }
        if !table.range().is_whole() {
            return Err(Error::NotFull(format!("range is {}", table.range().display())));
        }
        Ok(Element { table })
    }

    pub fn identity(g: &Arc<Groupoid>) -> Self {
        Element {
            table: Bisection::identity(g),
        }
    }

    pub fn parse(g: &Arc<Groupoid>, s: &str) -> Result<Self> {
        Self::new(Bisection::parse(g, s)?)
    }

    /// Extends a bisection `F` with `s(F) = r(F)` by the identity outside `s(F)`.
    pub fn extend_by_identity(f: &Bisection) -> Result<Self> {
        let s = f.source();
        if s != f.range() {
            return Err(Error::NotFull("source and range differ".into()));
        }
        let rest = Bisection::identity_on(f.groupoid(), &s.complement());
        Self::new(f.disjoint_union(&rest)?)
    }

    /// The element moving the cylinder `words[i]` onto `words[perm[i]]` by
    /// plain prefix replacement and fixing everything else.
    pub fn permuting(g: &Arc<Groupoid>, words: &[Word], perm: &[usize]) -> Result<Self> {
        if words.len() != perm.len() {
            return Err(Error::InvalidBisection("permutation length mismatch".into()));
        }
        let arrows = words
            .iter()
            .zip(perm)
            .map(|(w, p)| Arrow {
                dom: w.clone(),
                germ: Germ::ID,
                ran: words[*p].clone(),
            })
            .collect();
        let f = Bisection::new(g, arrows)?;
        Self::extend_by_identity(&f)
    }

    pub fn table(&self) -> &Bisection {
        &self.table
    }

    pub fn groupoid(&self) -> &Arc<Groupoid> {
        self.table.groupoid()
    }

    /// `self · other`, applying `other` first.
    pub fn multiply(&self, other: &Element) -> Result<Element> {
        Ok(Element {
            table: self.table.compose(&other.table)?,
        })
    }

    pub fn invert(&self) -> Result<Element> {
        Ok(Element {
            table: self.table.inverse()?,
        })
    }

    pub fn power(&self, n: i64) -> Result<Element> {
        let base = if n < 0 { self.invert()? } else { self.clone() };
        let mut acc = Element::identity(self.groupoid());
        for _ in 0..n.unsigned_abs() {
            acc = base.multiply(&acc)?;
        }
        Ok(acc)
    }

    /// `[g, h] = g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, h: &Element) -> Result<Element> {
        self.invert()?
            .multiply(&h.invert()?)?
            .multiply(self)?
            .multiply(h)
    }

    /// `k⁻¹ g k`.
    pub fn conjugate(&self, k: &Element) -> Result<Element> {
        k.invert()?.multiply(self)?.multiply(k)
    }

    pub fn is_identity(&self) -> bool {
        self.table.is_identity()
    }

    pub fn equals(&self, other: &Element) -> Result<bool> {
        self.table.equals(&other.table)
    }

    /// The closure of the set of points whose germ is not a unit.
    pub fn support(&self) -> ClopenSet {
        let g = self.groupoid();
        let mut cells = Vec::new();
        for a in self.table.arrows() {
            moved_cells(g, a, 0, &mut cells);
        }
        ClopenSet::canonicalize(g.space(), cells)
    }

    /// `τ_F = F ∪ F⁻¹ ∪ id` on the rest, for `F` with disjoint source and range.
    pub fn tau(f: &Bisection) -> Result<Element> {
        let s = f.source();
        let r = f.range();
        if !s.is_disjoint(&r)? {
            return Err(Error::Overlap);
        }
        let rest = s.union(&r)?.complement();
        let table = f
            .disjoint_union(&f.inverse()?)?
            .disjoint_union(&Bisection::identity_on(f.groupoid(), &rest))?;
        Element::new(table)
    }
}

fn moved_cells(g: &Groupoid, a: &Arrow, depth: usize, out: &mut Vec<Word>) {
    if !a.dom.comparable(&a.ran) {
        out.push(a.dom.clone());
        return;
    }
    if a.dom == a.ran && a.germ.is_identity() {
        return;
    }
    if g.semantics() == Semantics::Action || depth >= SUPPORT_DEPTH {
        out.push(a.dom.clone());
        return;
    }
    for x in g.space().extensions(&a.dom).to_vec() {
        let s = Word::from_letters(vec![x]);
        moved_cells(g, &restrict_arrow(g, a, &s), depth + 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisection::Semantics;
    use crate::cylinder::SequenceSpace;
    use crate::germcalc::{AutomatonState, Transition};

    fn example() -> Arc<Groupoid> {
        let space = SequenceSpace::full_shift(&["1", "2", "3"]).unwrap();
        let r = |on: &str, out: &str, to: &str| Transition {
            on: on.into(),
            out: out.into(),
            to: to.into(),
        };
        let a = AutomatonState {
            name: "a".into(),
            transitions: vec![r("1", "2", "id"), r("2", "1", "a"), r("3", "3", "id")],
        };
        Groupoid::new(space, &[a], Semantics::Germs, 64).unwrap()
    }

    #[test]
    fn group_laws_on_example_elements() {
        let g = example();
        let x = Element::parse(&g, "1:a:1, 2:a^-1:2, 3:id:3").unwrap();
        assert!(x.multiply(&x.invert().unwrap()).unwrap().is_identity());
        let k = Element::parse(&g, "1:id:2, 2:id:1, 3:id:3").unwrap();
        let c = x.conjugate(&k).unwrap();
        let direct = k.invert().unwrap().multiply(&x).unwrap().multiply(&k).unwrap();
        assert_eq!(c, direct);
        assert!(x.commutator(&Element::identity(&g)).unwrap().is_identity());
    }

    #[test]
    fn partial_tables_rejected() {
        let g = example();
        assert!(matches!(Element::parse(&g, "1:id:2, 2:id:1"), Err(Error::NotFull(_))));
    }

    #[test]
    fn supports() {
        let g = example();
        assert!(Element::identity(&g).support().is_empty());
        let gh = Element::parse(&g, "11:id:12, 12:id:11, 13:id:13, 2:id:2, 3:id:3").unwrap();
        assert_eq!(gh.support().to_strings(), vec!["11", "12"]);
        let a = Element::parse(&g, ":a:").unwrap();
        assert_eq!(a.support().to_strings(), vec!["1", "2"]);
    }

    #[test]
    fn tau_construction() {
        let g = example();
        let f = Bisection::parse(&g, "11:id:12").unwrap();
        let t = Element::tau(&f).unwrap();
        assert_eq!(t.table().compact(), "11:id:12, 12:id:11, 13:id:13, 2:id:2, 3:id:3");
        assert!(t.multiply(&t).unwrap().is_identity());
        assert_eq!(t.support(), f.source().union(&f.range()).unwrap());
        assert!(Element::tau(&Bisection::empty(&g)).unwrap().is_identity());
        let bad = Bisection::parse(&g, ":a:").unwrap();
        assert_eq!(Element::tau(&bad), Err(Error::Overlap));
    }
}
