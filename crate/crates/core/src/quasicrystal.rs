//! Cut-and-project point sets over ℤ[φ], their Delaunay, local complexity
//! and repetitivity statistics, local-rule permutations, Rips complexes,
//! and the gap-word presentation of 1D samples.
//!
//! Coordinates are exact elements of ℤ[φ]. User radii are `f64` and are
//! compared against exact squared distances converted to `f64`; patch
//! classes are compared exactly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::bisection::{Bisection, Groupoid};
use crate::cylinder::SequenceSpace;
use crate::error::{Error, Result};
use crate::expansivity::LabeledCover;
use crate::generators::NamedBisection;
use crate::gf2::{BitVec, Basis};
use crate::presentation::Presentation;

pub const PHI: f64 = 1.618_033_988_749_895;

/// `a + bφ` with `φ² = φ + 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ZPhi {
    pub a: i64,
    pub b: i64,
}

impl ZPhi {
    pub const ZERO: ZPhi = ZPhi { a: 0, b: 0 };
    pub const ONE: ZPhi = ZPhi { a: 1, b: 0 };
    pub const PHI: ZPhi = ZPhi { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        ZPhi { a, b }
    }

    pub fn int(a: i64) -> Self {
        ZPhi { a, b: 0 }
    }

    /// The Galois conjugate, `φ ↦ 1 − φ`.
    pub fn conj(self) -> Self {
        ZPhi {
            a: self.a + self.b,
            b: -self.b,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * PHI
    }

    pub fn signum(self) -> i32 {
        // a + bφ = (p + q√5)/2 with p = 2a + b, q = b
        let p = 2 * self.a as i128 + self.b as i128;
        let q = self.b as i128;
        let s = |x: i128| x.signum() as i32;
        if p >= 0 && q >= 0 || p <= 0 && q <= 0 {
            return if p == 0 && q == 0 { 0 } else { s(p + q) };
        }
        match (p * p).cmp(&(5 * q * q)) {
            Ordering::Greater => s(p),
            Ordering::Less => s(q),
            Ordering::Equal => 0,
        }
    }

    pub fn abs(self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self
        }
    }
}

impl Ord for ZPhi {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl PartialOrd for ZPhi {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ZPhi {
    type Output = ZPhi;
    fn add(self, o: ZPhi) -> ZPhi {
        ZPhi::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for ZPhi {
    type Output = ZPhi;
    fn sub(self, o: ZPhi) -> ZPhi {
        ZPhi::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for ZPhi {
    type Output = ZPhi;
    fn neg(self) -> ZPhi {
        ZPhi::new(-self.a, -self.b)
    }
}

impl Mul for ZPhi {
    type Output = ZPhi;
    fn mul(self, o: ZPhi) -> ZPhi {
        let bd = self.b * o.b;
        ZPhi::new(self.a * o.a + bd, self.a * o.b + self.b * o.a + bd)
    }
}

impl fmt::Display for ZPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi = |b: i64| match b {
            1 => "φ".to_string(),
            -1 => "-φ".to_string(),
            b => format!("{b}φ"),
        };
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, b) => write!(f, "{}", phi(b)),
            (a, b) if b > 0 => write!(f, "{a}+{}", phi(b)),
            (a, b) => write!(f, "{a}{}", phi(b)),
        }
    }
}

impl FromStr for ZPhi {
    type Err = Error;

    /// Sums of integers and integer multiples of `phi` (or `φ`), e.g.
    /// `"-1+phi"`, `"2φ"`, `"3 - 2*phi"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("`{s}` is not of the form a+bφ"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let t = t.replace("phi", "φ").replace('*', "");
        if t.is_empty() {
            return Err(bad());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (i, c) in t.chars().enumerate() {
            if (c == '+' || c == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        let mut z = ZPhi::ZERO;
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (-1, b.to_string()),
                None => (1, term.trim_start_matches('+').to_string()),
            };
            if let Some(coef) = body.strip_suffix('φ') {
                let c: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| bad())? };
                z.b += sign * c;
            } else {
                let c: i64 = body.parse().map_err(|_| bad())?;
                z.a += sign * c;
            }
        }
        Ok(z)
    }
}

impl TryFrom<String> for ZPhi {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ZPhi> for String {
    fn from(z: ZPhi) -> String {
        z.to_string()
    }
}

/// A point of the plane with exact coordinates; 1D samples use `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Pt(pub ZPhi, pub ZPhi);

impl Pt {
    pub fn x(x: ZPhi) -> Self {
        Pt(x, ZPhi::ZERO)
    }

    pub fn norm2(self) -> ZPhi {
        self.0 * self.0 + self.1 * self.1
    }

    pub fn norm(self) -> f64 {
        self.norm2().to_f64().max(0.0).sqrt()
    }
}

impl Add for Pt {
    type Output = Pt;
    fn add(self, o: Pt) -> Pt {
        Pt(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Pt {
    type Output = Pt;
    fn sub(self, o: Pt) -> Pt {
        Pt(self.0 - o.0, self.1 - o.1)
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 == ZPhi::ZERO {
            write!(f, "{}", self.0)
        } else {
            write!(f, "{},{}", self.0, self.1)
        }
    }
}

impl FromStr for Pt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(',') {
            Some((x, y)) => Ok(Pt(x.parse()?, y.parse()?)),
            None => Ok(Pt::x(s.parse()?)),
        }
    }
}

impl TryFrom<String> for Pt {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Pt> for String {
    fn from(p: Pt) -> String {
        p.to_string()
    }
}

fn within(d: Pt, r: f64) -> bool {
    d.norm2().to_f64() <= r * r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slope {
    /// Physical coordinate `m + nφ`, internal coordinate `m + nφ'`.
    Golden,
    /// The strip is parallel to a lattice line: every integer is selected
    /// when the window contains 0.
    Integer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutProjectParams {
    #[serde(default = "one")]
    pub dimension: usize,
    pub slope: Slope,
    /// Half-open window `[lo, hi)` in internal space.
    pub window: [ZPhi; 2],
}

fn one() -> usize {
    1
}

impl CutProjectParams {
    pub fn fibonacci() -> Self {
        CutProjectParams {
            dimension: 1,
            slope: Slope::Golden,
            window: [ZPhi::int(-1), ZPhi::new(-1, 1)],
        }
    }

    /// Reads a JSON file, or the bundled `fibonacci` parameters by name.
    pub fn load(path: &str) -> Result<Self> {
        let text = if path == "fibonacci" {
            FIBONACCI_PARAMS.to_string()
        } else {
            read(path)?
        };
        serde_json::from_str(&text).map_err(|e| Error::Load {
            path: path.into(),
            reason: e.to_string(),
        })
    }
}

const FIBONACCI_PARAMS: &str = include_str!("../presentations/fibonacci_params.json");
const FIBONACCI_RULE: &str = include_str!("../presentations/fibonacci_rule.json");

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Load {
        path: path.into(),
        reason: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSample {
    pub dimension: usize,
    /// The box is `[lo, hi]` in every coordinate.
    pub lo: ZPhi,
    pub hi: ZPhi,
    pub points: Vec<Pt>,
    pub params: Option<CutProjectParams>,
}

impl PointSample {
    pub fn new(dimension: usize, lo: ZPhi, hi: ZPhi, mut points: Vec<Pt>) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::Quasicrystal("dimension must be 1 or 2".into()));
        }
        points.sort();
        points.dedup();
        for p in &points {
            let coords = if dimension == 1 { vec![p.0] } else { vec![p.0, p.1] };
            if dimension == 1 && p.1 != ZPhi::ZERO {
                return Err(Error::Quasicrystal(format!("point {p} is not on the line")));
            }
            if coords.iter().any(|c| *c < lo || *c > hi) {
                return Err(Error::Quasicrystal(format!("point {p} lies outside the box")));
            }
        }
        Ok(PointSample {
            dimension,
            lo,
            hi,
            points,
            params: None,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn inside(&self, p: Pt, margin: f64) -> bool {
        let lo = self.lo.to_f64() + margin;
        let hi = self.hi.to_f64() - margin;
        let ok = |c: ZPhi| {
            let c = c.to_f64();
            c >= lo - 1e-12 && c <= hi + 1e-12
        };
        ok(p.0) && (self.dimension == 1 || ok(p.1))
    }

    /// Points whose `r`-ball lies inside the box.
    pub fn interior(&self, r: f64) -> Vec<Pt> {
        self.points.iter().copied().filter(|p| self.inside(*p, r)).collect()
    }

    /// Consecutive differences of a 1D sample.
    pub fn gaps(&self) -> Vec<ZPhi> {
        self.points.windows(2).map(|w| w[1].0 - w[0].0).collect()
    }

    /// Distinct gap lengths in increasing order; gap letters are `a`, `b`, …
    /// in this order.
    pub fn gap_alphabet(&self) -> Vec<ZPhi> {
        let set: BTreeSet<ZPhi> = self.gaps().into_iter().collect();
        set.into_iter().collect()
    }

    pub fn gap_word(&self) -> String {
        let alphabet = self.gap_alphabet();
        self.gaps()
            .iter()
            .map(|g| (b'a' + alphabet.iter().position(|x| x == g).unwrap() as u8) as char)
            .collect()
    }

    /// A translation `v > 0` with `Q + v = Q` on the sample, ignoring the
    /// last `v` of the box; only vectors up to a third of the box are tried.
    pub fn period(&self) -> Option<ZPhi> {
        if self.dimension != 1 || self.points.len() < 3 {
            return None;
        }
        let set: HashSet<ZPhi> = self.points.iter().map(|p| p.0).collect();
        let p0 = self.points[0].0;
        let limit = (self.hi - self.lo).to_f64() / 3.0;
        for q in &self.points[1..] {
            let v = q.0 - p0;
            if v.to_f64() > limit {
                break;
            }
            let ok = self
                .points
                .iter()
                .filter(|p| p.0 + v <= self.hi)
                .all(|p| set.contains(&(p.0 + v)));
            if ok {
                return Some(v);
            }
        }
        None
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.dimension == 1 { "x,exact\n" } else { "x,y,exact\n" });
        for p in &self.points {
            if self.dimension == 1 {
                s.push_str(&format!("{:.12},{}\n", p.0.to_f64(), p.0));
            } else {
                s.push_str(&format!("{:.12},{:.12},{}\n", p.0.to_f64(), p.1.to_f64(), p));
            }
        }
        s
    }
}

fn line_points(params: &CutProjectParams, lo: ZPhi, hi: ZPhi) -> Vec<ZPhi> {
    let [wlo, whi] = params.window;
    if wlo >= whi {
        return vec![];
    }
    match params.slope {
        Slope::Integer => {
            if !(wlo <= ZPhi::ZERO && ZPhi::ZERO < whi) {
                return vec![];
            }
            let a = lo.to_f64().floor() as i64 - 1;
            let b = hi.to_f64().ceil() as i64 + 1;
            (a..=b).map(ZPhi::int).filter(|x| *x >= lo && *x <= hi).collect()
        }
        Slope::Golden => {
            // x − x* = n√5
            let s5 = 5f64.sqrt();
            let n0 = ((lo - whi).to_f64() / s5).floor() as i64 - 1;
            let n1 = ((hi - wlo).to_f64() / s5).ceil() as i64 + 1;
            let mut out = Vec::new();
            for n in n0..=n1 {
                let m0 = (lo.to_f64() - n as f64 * PHI).floor() as i64 - 1;
                let m1 = (hi.to_f64() - n as f64 * PHI).ceil() as i64 + 1;
                for m in m0..=m1 {
                    let x = ZPhi::new(m, n);
                    let xs = x.conj();
                    if x >= lo && x <= hi && wlo <= xs && xs < whi {
                        out.push(x);
                    }
                }
            }
            out.sort();
            out
        }
    }
}

/// Points of the projected strip inside the box `[lo, hi]^dimension`. In
/// dimension 2 the set is the product of two copies of the line set.
pub fn cut_and_project(params: &CutProjectParams, lo: ZPhi, hi: ZPhi) -> Result<PointSample> {
    let xs = line_points(params, lo, hi);
    let points: Vec<Pt> = match params.dimension {
        1 => xs.iter().map(|x| Pt::x(*x)).collect(),
        2 => xs.iter().flat_map(|x| xs.iter().map(move |y| Pt(*x, *y))).collect(),
        d => return Err(Error::Quasicrystal(format!("unsupported dimension {d}"))),
    };
    let mut ps = PointSample::new(params.dimension, lo, hi, points)?;
    ps.params = Some(params.clone());
    Ok(ps)
}

/// Fixed point of `b ↦ ba`, `a ↦ b` (long gap `b`, short gap `a`).
pub fn fibonacci_word(n: usize) -> String {
    let mut w = String::from("b");
    while w.len() < n {
        w = w
            .chars()
            .map(|c| if c == 'b' { "ba" } else { "b" })
            .collect();
    }
    w.truncate(n);
    w
}

#[derive(Clone, Debug, PartialEq)]
pub enum DelaunayViolation {
    TooClose { p: Pt, q: Pt, distance: f64 },
    /// A point of the interior farther than `R` from the sample.
    Hole { at: Vec<f64>, distance: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelaunayReport {
    pub margin: f64,
    pub min_distance: f64,
    /// Upper bound on the covering radius of the interior.
    pub covering_radius: f64,
    pub violation: Option<DelaunayViolation>,
}

impl DelaunayReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `‖q₁ − q₂‖ > δ` for all sample pairs and that every point of the
/// box shrunk by `margin` lies within `R` of the sample.
pub fn check_delaunay(ps: &PointSample, r: f64, delta: f64, margin: f64) -> Result<DelaunayReport> {
    let mut min_distance = f64::INFINITY;
    let mut close = None;
    for (i, p) in ps.points.iter().enumerate() {
        for q in &ps.points[i + 1..] {
            let dx = (q.0 - p.0).to_f64();
            if ps.dimension == 1 && dx > min_distance.max(delta) {
                break;
            }
            let d = (*q - *p).norm();
            if d < min_distance {
                min_distance = d;
            }
            if d <= delta && close.is_none() {
                close = Some(DelaunayViolation::TooClose { p: *p, q: *q, distance: d });
            }
        }
    }
    let lo = ps.lo.to_f64() + margin;
    let hi = ps.hi.to_f64() - margin;
    if lo > hi {
        return Err(Error::Quasicrystal("the margin leaves no interior".into()));
    }
    let (covering_radius, hole) = if ps.dimension == 1 {
        covering_1d(ps, lo, hi)
    } else {
        covering_2d(ps, lo, hi, r)
    };
    let violation = close.or_else(|| {
        (covering_radius > r).then(|| DelaunayViolation::Hole {
            at: hole,
            distance: covering_radius,
        })
    });
    Ok(DelaunayReport {
        margin,
        min_distance,
        covering_radius,
        violation,
    })
}

fn covering_1d(ps: &PointSample, lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let xs: Vec<f64> = ps.points.iter().map(|p| p.0.to_f64()).collect();
    if xs.is_empty() {
        return (f64::INFINITY, vec![lo]);
    }
    let dist = |x: f64| xs.iter().map(|p| (p - x).abs()).fold(f64::INFINITY, f64::min);
    // the farthest point is an interval end or a midpoint between neighbours
    let mut cands = vec![lo, hi];
    for w in xs.windows(2) {
        let m = (w[0] + w[1]) / 2.0;
        if m >= lo && m <= hi {
            cands.push(m);
        }
    }
    let mut best = (0.0, vec![lo]);
    for c in cands {
        let d = dist(c);
        if d > best.0 {
            best = (d, vec![c]);
        }
    }
    best
}

fn covering_2d(ps: &PointSample, lo: f64, hi: f64, r: f64) -> (f64, Vec<f64>) {
    let pts: Vec<(f64, f64)> = ps.points.iter().map(|p| (p.0.to_f64(), p.1.to_f64())).collect();
    if pts.is_empty() {
        return (f64::INFINITY, vec![lo, lo]);
    }
    let steps = (((hi - lo) / (r / 8.0)).ceil() as usize).max(1);
    let h = (hi - lo) / steps as f64;
    let mut best = (0.0, vec![lo, lo]);
    for i in 0..=steps {
        for j in 0..=steps {
            let (x, y) = (lo + i as f64 * h, lo + j as f64 * h);
            let d = pts
                .iter()
                .map(|(px, py)| ((px - x).powi(2) + (py - y).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            if d > best.0 {
                best = (d, vec![x, y]);
            }
        }
    }
    // every point of the box is within h/√2 of a grid point
    (best.0 + h / 2f64.sqrt(), best.1)
}

/// `B_R(q) ∩ Q − q`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatchClass {
    pub offsets: Vec<Pt>,
}

impl PatchClass {
    pub fn contains(&self, v: Pt) -> bool {
        self.offsets.binary_search(&v).is_ok()
    }
}

fn patch_at(ps: &PointSample, q: Pt, r: f64) -> PatchClass {
    let offsets: Vec<Pt> = ps
        .points
        .iter()
        .map(|p| *p - q)
        .filter(|d| within(*d, r))
        .collect();
    PatchClass { offsets }
}

/// Patch classes of interior centres with their centres.
pub fn patch_occurrences(ps: &PointSample, r: f64) -> BTreeMap<PatchClass, Vec<Pt>> {
    let mut out: BTreeMap<PatchClass, Vec<Pt>> = BTreeMap::new();
    for q in ps.interior(r) {
        out.entry(patch_at(ps, q, r)).or_default().push(q);
    }
    out
}

pub fn local_complexity(ps: &PointSample, r: f64) -> Vec<PatchClass> {
    patch_occurrences(ps, r).into_keys().collect()
}

/// Patch classes with their number of occurrences: the cylinders of the
/// hull known to precision `R`.
pub fn hull_patches(ps: &PointSample, r: f64) -> Vec<(PatchClass, usize)> {
    patch_occurrences(ps, r)
        .into_iter()
        .map(|(c, v)| (c, v.len()))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Repetitivity {
    /// Every ball of radius `D` centred in the region of patch centres
    /// (shrunk by `D`) contains a centre of every class.
    Verified { d: f64, classes: usize },
    Unverified { reason: String },
}

pub fn repetitivity_radius(ps: &PointSample, r: f64) -> Repetitivity {
    let occ = patch_occurrences(ps, r);
    if occ.is_empty() {
        return Repetitivity::Unverified {
            reason: "no interior patch centres".into(),
        };
    }
    let lo = ps.lo.to_f64() + r;
    let hi = ps.hi.to_f64() - r;
    let d = if ps.dimension == 1 {
        occ.values()
            .map(|v| {
                let xs: Vec<f64> = v.iter().map(|p| p.0.to_f64()).collect();
                let mut d = ((xs[0] - lo) / 2.0).max((hi - xs[xs.len() - 1]) / 2.0);
                for w in xs.windows(2) {
                    d = d.max((w[1] - w[0]) / 2.0);
                }
                d
            })
            .fold(0.0, f64::max)
    } else {
        let steps = (((hi - lo) / (r / 4.0).max(0.25)).ceil() as usize).max(1);
        let h = (hi - lo) / steps as f64;
        let mut d: f64 = 0.0;
        for v in occ.values() {
            let pts: Vec<(f64, f64)> = v.iter().map(|p| (p.0.to_f64(), p.1.to_f64())).collect();
            for i in 0..=steps {
                for j in 0..=steps {
                    let (x, y) = (lo + i as f64 * h, lo + j as f64 * h);
                    let m = pts
                        .iter()
                        .map(|(px, py)| ((px - x).powi(2) + (py - y).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min);
                    d = d.max(m);
                }
            }
        }
        d + h / 2f64.sqrt()
    };
    if lo + d > hi - d {
        return Repetitivity::Unverified {
            reason: format!("the box is too small for D = {d:.3}"),
        };
    }
    Repetitivity::Verified {
        d,
        classes: occ.len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    #[serde(default)]
    pub contains: Vec<Pt>,
    #[serde(default)]
    pub excludes: Vec<Pt>,
    pub offset: Pt,
}

/// `α(q) − q = W(B_R(q) ∩ Q − q)`: the first rule whose pattern matches the
/// patch gives the offset, and the offset is 0 when none does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalRule {
    pub radius: f64,
    pub rules: Vec<Rule>,
}

impl LocalRule {
    /// Reads a JSON file, or the bundled `fibonacci` 3-cycle rule by name.
    pub fn load(path: &str) -> Result<Self> {
        let text = if path == "fibonacci" {
            FIBONACCI_RULE.to_string()
        } else {
            read(path)?
        };
        serde_json::from_str(&text).map_err(|e| Error::Load {
            path: path.into(),
            reason: e.to_string(),
        })
    }

    /// Cycles the three points of every `LL` pair of the Fibonacci set.
    pub fn fibonacci() -> Self {
        Self::load("fibonacci").expect("bundled rule")
    }

    pub fn offset(&self, patch: &PatchClass) -> Pt {
        self.rules
            .iter()
            .find(|r| {
                r.contains.iter().all(|v| patch.contains(*v))
                    && !r.excludes.iter().any(|v| patch.contains(*v))
            })
            .map(|r| r.offset)
            .unwrap_or(Pt(ZPhi::ZERO, ZPhi::ZERO))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalRulePermutation {
    pub radius: f64,
    /// Offsets by patch class, for the classes seen in the interior.
    pub table: Vec<(PatchClass, Pt)>,
    /// `(q, α(q))` for interior points.
    pub moves: Vec<(Pt, Pt)>,
    /// Orbit length ↦ number of orbits, for orbits inside the interior.
    pub orbit_lengths: BTreeMap<usize, usize>,
    /// Orbits that leave the interior and so cannot be closed.
    pub open_orbits: usize,
}

pub fn local_rule_permutation(ps: &PointSample, rule: &LocalRule) -> Result<LocalRulePermutation> {
    let r = rule.radius;
    for x in &rule.rules {
        for v in x.contains.iter().chain(&x.excludes).chain([&x.offset]) {
            if !within(*v, r) {
                return Err(Error::Quasicrystal(format!(
                    "rule offset {v} lies outside the patch radius {r}"
                )));
            }
        }
    }
    let points: HashSet<Pt> = ps.points.iter().copied().collect();
    let mut table = BTreeMap::new();
    let mut alpha: HashMap<Pt, Pt> = HashMap::new();
    let mut moves = Vec::new();
    for q in ps.interior(r) {
        let patch = patch_at(ps, q, r);
        let w = rule.offset(&patch);
        table.insert(patch, w);
        let image = q + w;
        if !points.contains(&image) {
            return Err(Error::Quasicrystal(format!(
                "the rule moves {q} to {image}, which is not a sample point"
            )));
        }
        alpha.insert(q, image);
        moves.push((q, image));
    }
    let mut seen: HashMap<Pt, Pt> = HashMap::new();
    for (q, img) in &moves {
        if let Some(p) = seen.insert(*img, *q) {
            return Err(Error::Quasicrystal(format!(
                "the rule is not injective: {p} and {q} both go to {img}"
            )));
        }
    }
    let mut orbit_lengths = BTreeMap::new();
    let mut open_orbits = 0;
    let mut done: HashSet<Pt> = HashSet::new();
    for (q, _) in &moves {
        if done.contains(q) {
            continue;
        }
        let mut orbit = vec![*q];
        let mut cur = alpha[q];
        let closed = loop {
            if cur == *q {
                break true;
            }
            match alpha.get(&cur) {
                Some(next) if orbit.len() <= moves.len() => {
                    orbit.push(cur);
                    cur = *next;
                }
                _ => break false,
            }
        };
        done.extend(orbit.iter().copied());
        if closed {
            *orbit_lengths.entry(orbit.len()).or_insert(0) += 1;
        } else {
            open_orbits += 1;
        }
    }
    Ok(LocalRulePermutation {
        radius: r,
        table: table.into_iter().collect(),
        moves,
        orbit_lengths,
        open_orbits,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RipsReport {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub components: usize,
    /// First Betti number over ℤ/2.
    pub beta1: usize,
}

impl RipsReport {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// β₁ over ℤ/2 of the Rips complex with simplices of diameter ≤ `R`.
pub fn rips_h1_z2(ps: &PointSample, r: f64) -> RipsReport {
    let n = ps.points.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = ps.points[j] - ps.points[i];
            if ps.dimension == 1 && d.0.to_f64() > r {
                break;
            }
            if within(d, r) {
                adj[i].push(j);
                edges.push((i, j));
            }
        }
    }
    let edge_ix: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let mut uf: UnionFind<usize> = UnionFind::new(n);
    for (i, j) in &edges {
        uf.union(*i, *j);
    }
    let components = (0..n).map(|i| uf.find(i)).collect::<HashSet<_>>().len();
    let mut boundary = Basis::new(edges.len());
    let mut triangles = 0;
    for i in 0..n {
        for (a, &j) in adj[i].iter().enumerate() {
            for &k in &adj[i][a + 1..] {
                if let Some(jk) = edge_ix.get(&(j.min(k), j.max(k))) {
                    triangles += 1;
                    let mut v = BitVec::zeros(edges.len());
                    v.flip(edge_ix[&(i, j)]);
                    v.flip(edge_ix[&(i, k)]);
                    v.flip(*jk);
                    boundary.insert(v);
                }
            }
        }
    }
    let rank1 = n - components;
    RipsReport {
        vertices: n,
        edges: edges.len(),
        triangles,
        components,
        beta1: edges.len() - rank1 - boundary.rank(),
    }
}

/// The smallest radius in `radii` giving a connected complex with β₁ = 0.
pub fn rips_sweep(ps: &PointSample, radii: &[f64]) -> Option<f64> {
    radii.iter().copied().find(|r| {
        let rep = rips_h1_z2(ps, *r);
        rep.connected() && rep.beta1 == 0
    })
}

/// The gap-word model of a 1D sample: a one-sided subshift of finite type
/// on `block`-letter windows of the gap word, whose shift map is the
/// translation to the next point.
#[derive(Clone, Debug)]
pub struct SymbolicModel {
    pub block: usize,
    /// Gap lengths of the gap letters `a`, `b`, ….
    pub gaps: Vec<ZPhi>,
    pub presentation: Presentation,
    /// Gap word of the sample.
    pub word: String,
}

impl SymbolicModel {
    pub fn groupoid(&self) -> &Arc<Groupoid> {
        &self.presentation.groupoid
    }

    fn length_of(&self, gaps: &str) -> ZPhi {
        gaps.bytes()
            .map(|c| self.gaps[(c - b'a') as usize])
            .fold(ZPhi::ZERO, |a, b| a + b)
    }
}

fn block_graph(word: &[u8], n: usize) -> (Vec<String>, Vec<(String, String)>) {
    let blocks: BTreeSet<&[u8]> = word.windows(n).collect();
    let edges: BTreeSet<(&[u8], &[u8])> = word
        .windows(n + 1)
        .map(|w| (&w[..n], &w[1..]))
        .collect();
    let s = |b: &[u8]| String::from_utf8(b.to_vec()).unwrap();
    (
        blocks.into_iter().map(s).collect(),
        edges.into_iter().map(|(a, b)| (s(a), s(b))).collect(),
    )
}

fn shortest_cycle(vertices: &[String], edges: &[(String, String)]) -> Option<usize> {
    let ix: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut succ = vec![Vec::new(); vertices.len()];
    for (a, b) in edges {
        succ[ix[a.as_str()]].push(ix[b.as_str()]);
    }
    let mut best: Option<usize> = None;
    for s in 0..vertices.len() {
        let mut dist = vec![usize::MAX; vertices.len()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &succ[v] {
                if w == s {
                    let c = dist[v] + 1;
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
    }
    best
}

/// The gap-word presentation with the smallest block length whose block
/// graph has no cycle of length at most `girth`; basic bisections are the
/// one-step translations `x·y ↦ y`.
pub fn symbolic_presentation_with(ps: &PointSample, girth: usize) -> Result<SymbolicModel> {
    if ps.dimension != 1 {
        return Err(Error::Quasicrystal("symbolic presentations are 1D only".into()));
    }
    let word = ps.gap_word();
    let gaps = ps.gap_alphabet();
    if word.len() < 4 {
        return Err(Error::Quasicrystal("the sample is too short".into()));
    }
    let bytes = word.as_bytes();
    for n in 1..word.len() / 2 {
        let (blocks, edges) = block_graph(bytes, n);
        match shortest_cycle(&blocks, &edges) {
            None => break,
            Some(c) if c <= girth => continue,
            Some(_) => {}
        }
        let pairs: Vec<(String, String)> = edges.clone();
        let space = SequenceSpace::sft(&blocks, &pairs)?;
        let g = Groupoid::plain(space);
        let mut bisections = BTreeMap::new();
        let mut basic = Vec::new();
        let sep = if n == 1 { "" } else { "." };
        for (x, y) in &edges {
            let w = format!("{x}{sep}{y}");
            // pruned dead ends at the ends of the sample
            if g.space().parse_word(&w).is_err() {
                continue;
            }
            let name = format!("t[{x}>{y}]");
            let b = Bisection::parse(&g, &format!("{w}:id:{y}"))?;
            bisections.insert(name.clone(), b.clone());
            basic.push(NamedBisection::new(name, b));
        }
        let presentation = Presentation {
            name: "gap word".into(),
            description: format!("{n}-block gap-word subshift of a 1D sample"),
            groupoid: g,
            bisections,
            basic,
            elements: BTreeMap::new(),
            multisections: BTreeMap::new(),
            covers: BTreeMap::new(),
        };
        return Ok(SymbolicModel {
            block: n,
            gaps,
            presentation,
            word,
        });
    }
    Err(Error::Quasicrystal(format!(
        "no block length separates cycles of length {girth} within the sample"
    )))
}

pub fn symbolic_presentation(ps: &PointSample) -> Result<SymbolicModel> {
    symbolic_presentation_with(ps, 2)
}

/// Translations `T_v`, `0 < v ≤ R`, restricted to the patch cylinders of
/// the gap-word model: for every observed run of `k` gaps of total length
/// `v`, the bisection moving the origin `k` points to the right.
pub fn translation_bisections(ps: &PointSample, r: f64) -> Result<(SymbolicModel, LabeledCover)> {
    let gaps = ps.gap_alphabet();
    let shortest = gaps
        .first()
        .ok_or_else(|| Error::Quasicrystal("the sample has fewer than two points".into()))?
        .to_f64();
    let k_max = (r / shortest).floor() as usize;
    if k_max == 0 {
        return Err(Error::Quasicrystal(format!("no translation is shorter than {r}")));
    }
    let model = symbolic_presentation_with(ps, k_max)?;
    let g = model.groupoid().clone();
    let n = model.block;
    let bytes = model.word.as_bytes();
    let mut members = Vec::new();
    let mut seen = HashSet::new();
    for k in 1..=k_max {
        for i in 0..bytes.len().saturating_sub(n + k - 1) {
            let run = &model.word[i..i + k];
            let v = model.length_of(run);
            if v.to_f64() > r + 1e-12 {
                continue;
            }
            let path: Vec<&str> = (0..=k).map(|j| &model.word[i + j..i + j + n]).collect();
            if !seen.insert(path.clone()) {
                continue;
            }
            let dom = path.join(if n == 1 { "" } else { "." });
            if g.space().parse_word(&dom).is_err() {
                continue;
            }
            let b = Bisection::parse(&g, &format!("{dom}:id:{}", path[k]))?;
            members.push(NamedBisection::new(format!("T[{v}]@{dom}"), b));
        }
    }
    let cover = LabeledCover::new(members)?;
    Ok((model, cover))
}
