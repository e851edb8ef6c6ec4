#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tfg::bisection::{Arrow, Bisection, Groupoid};
use tfg::cylinder::{ClopenSet, SequenceSpace, Word};
use tfg::fullgroup::Element;
use tfg::presentation::Presentation;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn example7() -> Presentation {
    Presentation::bundled("example7").unwrap()
}

pub fn binary() -> Arc<SequenceSpace> {
    SequenceSpace::full_shift(&["0", "1"]).unwrap()
}

pub fn set(space: &Arc<SequenceSpace>, words: &[&str]) -> ClopenSet {
    ClopenSet::parse(space, words).unwrap()
}

/// A random complete prefix code: leaves of a tree grown by `splits`
/// random splits of leaves shorter than `depth`.
pub fn random_code(space: &SequenceSpace, r: &mut impl Rng, depth: usize, splits: usize) -> Vec<Word> {
    let mut leaves = vec![Word::empty()];
    for _ in 0..splits {
        let open: Vec<usize> = (0..leaves.len()).filter(|i| leaves[*i].len() < depth).collect();
        let Some(&i) = open.choose(r) else { break };
        let w = leaves.remove(i);
        leaves.extend(space.children(&w));
    }
    leaves.sort();
    leaves
}

/// Any clopen set: a random subset of a random code.
pub fn random_set(space: &Arc<SequenceSpace>, r: &mut impl Rng, depth: usize) -> ClopenSet {
    let splits = r.gen_range(0..6);
    let code = random_code(space, r, depth, splits);
    let words = code.into_iter().filter(|_| r.gen_bool(0.5)).collect();
    ClopenSet::canonicalize(space, words)
}

/// A random element: a permutation of a random code, each arrow labelled by
/// one of `labels`.
pub fn random_element(g: &Arc<Groupoid>, r: &mut impl Rng, depth: usize, labels: &[&str]) -> Element {
    let space = g.space();
    let splits = r.gen_range(0..5);
    let dom = random_code(space, r, depth, splits);
    let mut ran = dom.clone();
    ran.shuffle(r);
    // a second code of the same size gives mixed-depth tables
    let other = random_code(space, r, depth, splits);
    if other.len() == dom.len() && r.gen_bool(0.5) {
        ran = other;
        ran.shuffle(r);
    }
    let arrows = dom
        .into_iter()
        .zip(ran)
        .map(|(d, u)| Arrow {
            dom: d,
            germ: g.parse_label(labels.choose(r).unwrap()).unwrap(),
            ran: u,
        })
        .collect();
    Element::new(Bisection::new(g, arrows).unwrap()).unwrap()
}

/// A random bisection: some arrows of a random element.
pub fn random_bisection(g: &Arc<Groupoid>, r: &mut impl Rng, depth: usize, labels: &[&str]) -> Bisection {
    let e = random_element(g, r, depth, labels);
    let arrows: Vec<Arrow> = e.table().arrows().iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
    Bisection::new(g, arrows).unwrap()
}

/// Membership of every depth-`n` cylinder, the oracle for set equality.
pub fn profile(u: &ClopenSet, n: usize) -> Vec<bool> {
    u.space()
        .words_of_length(n)
        .iter()
        .map(|w| u.contains_cylinder(w))
        .collect()
}

/// Pointwise action of an element on the words of length `n`, each
/// followed by a fixed tail so that deeper tables still decide the image.
/// Full shifts only.
pub fn action(g: &Element, n: usize) -> Vec<Word> {
    let gr = g.groupoid();
    sample_points(gr.space(), n)
        .iter()
        .map(|w| {
            let a = g
                .table()
                .arrows()
                .iter()
                .find(|a| a.dom.is_prefix_of(&w))
                .expect("table deeper than the sample");
            let rest = w.strip_prefix(&a.dom).unwrap();
            a.ran.concat(&gr.apply(a.germ, &rest))
        })
        .collect()
}

/// The words of length `n`, each followed by the same 12-letter tail.
pub fn sample_points(space: &SequenceSpace, n: usize) -> Vec<Word> {
    let tail = space
        .words_of_length(1)
        .iter()
        .cycle()
        .take(12)
        .fold(Word::empty(), |acc, x| acc.concat(x));
    space.words_of_length(n).iter().map(|w| w.concat(&tail)).collect()
}
