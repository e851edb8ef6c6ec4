//! Presentation files: a sequence space, an optional automaton, and named
//! bisections, elements, multisections and covers.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bisection::{Bisection, Groupoid, Semantics, TableLiteral};
use crate::cylinder::{ClopenSet, SequenceSpace, SpaceDesc};
use crate::error::{Error, Result};
use crate::expr::{self, Scope};
use crate::fullgroup::Element;
use crate::generators::NamedBisection;
use crate::germcalc::{AutomatonState, DEFAULT_STATE_BOUND};
use crate::multisection::Multisection;

pub const SCHEMA_VERSION: u32 = 1;

/// Presentations shipped with the crate, by file stem.
pub const BUNDLED: &[(&str, &str)] = &[
    ("example7", include_str!("../presentations/example7.json")),
    ("shift2", include_str!("../presentations/shift2.json")),
    ("shift3", include_str!("../presentations/shift3.json")),
    ("shift4", include_str!("../presentations/shift4.json")),
    ("shift5", include_str!("../presentations/shift5.json")),
    ("golden_mean", include_str!("../presentations/golden_mean.json")),
    ("bratteli", include_str!("../presentations/bratteli.json")),
    ("odometer", include_str!("../presentations/odometer.json")),
];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableValue {
    Short(String),
    Literal(TableLiteral),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementValue {
    Expr { expr: String },
    Table(TableValue),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultisectionValue {
    Spokes { spokes: Vec<String>, on: Vec<String> },
    Grid(Vec<Vec<TableValue>>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub space: SpaceDesc,
    #[serde(default = "default_semantics")]
    pub semantics: String,
    #[serde(default)]
    pub state_bound: Option<usize>,
    #[serde(default)]
    pub automaton: Vec<AutomatonState>,
    #[serde(default)]
    pub bisections: BTreeMap<String, TableValue>,
    /// Names of the basic bisections; all bisections when absent.
    #[serde(default)]
    pub basic: Option<Vec<String>>,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementValue>,
    #[serde(default)]
    pub multisections: BTreeMap<String, MultisectionValue>,
    #[serde(default)]
    pub covers: BTreeMap<String, Vec<String>>,
}

fn default_semantics() -> String {
    "germs".into()
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub description: String,
    pub groupoid: Arc<Groupoid>,
    pub bisections: BTreeMap<String, Bisection>,
    pub basic: Vec<NamedBisection>,
    pub elements: BTreeMap<String, Element>,
    pub multisections: BTreeMap<String, Multisection>,
    pub covers: BTreeMap<String, Vec<NamedBisection>>,
}

impl Presentation {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let wrap = |reason: String| Error::Load {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| wrap(e.to_string()))?;
        Self::from_json(&text).map_err(|e| wrap(e.to_string()))
    }

    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Unresolved(name.to_string()))?;
        Self::from_json(text).map_err(|e| Error::Load {
            path: format!("<bundled {name}>"),
            reason: e.to_string(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PresentationFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &PresentationFile) -> Result<Self> {
        if file.version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.version
            )));
        }
        let space = SequenceSpace::from_desc(&file.space)?;
        let semantics = match file.semantics.as_str() {
            "germs" => Semantics::Germs,
            "action" => Semantics::Action,
            s => return Err(Error::Parse(format!("unknown semantics `{s}`"))),
        };
        let g = Groupoid::new(
            space,
            &file.automaton,
            semantics,
            file.state_bound.unwrap_or(DEFAULT_STATE_BOUND),
        )?;

        let mut bisections = BTreeMap::new();
        for (name, t) in &file.bisections {
            let b = table(&g, t).map_err(|e| in_item("bisection", name, e))?;
            bisections.insert(name.clone(), b);
        }
        let lookup = |n: &str| -> Result<NamedBisection> {
            bisections
                .get(n)
                .map(|b| NamedBisection::new(n, b.clone()))
                .ok_or_else(|| Error::Unresolved(n.to_string()))
        };
        let basic = match &file.basic {
            Some(names) => names.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?,
            None => bisections
                .iter()
                .map(|(n, b)| NamedBisection::new(n.clone(), b.clone()))
                .collect(),
        };
        let mut covers = BTreeMap::new();
        for (name, members) in &file.covers {
            let c = members
                .iter()
                .map(|n| lookup(n))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| in_item("cover", name, e))?;
            covers.insert(name.clone(), c);
        }

        let mut p = Presentation {
            name: file.name.clone(),
            description: file.description.clone(),
            groupoid: g.clone(),
            bisections,
            basic,
            elements: BTreeMap::new(),
            multisections: BTreeMap::new(),
            covers,
        };

        // expressions may refer to other elements, so resolve on demand
        let mut visiting = HashSet::new();
        for name in file.elements.keys() {
            resolve_element(&mut p, &file.elements, name, &mut visiting)?;
        }

        for (name, m) in &file.multisections {
            let ms = multisection(&p, m).map_err(|e| in_item("multisection", name, e))?;
            p.multisections.insert(name.clone(), ms);
        }
        Ok(p)
    }

    pub fn space(&self) -> &Arc<SequenceSpace> {
        self.groupoid.space()
    }

    /// Evaluates an element expression against the named bindings.
    pub fn element(&self, expr: &str) -> Result<Element> {
        expr::eval_expr(&expr::parse_expr(expr)?, self)
    }

    pub fn eval(&self, statement: &str) -> Result<expr::Value> {
        expr::eval(&expr::parse(statement)?, self)
    }

    pub fn cover(&self, name: &str) -> Result<&[NamedBisection]> {
        self.covers
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Unresolved(name.to_string()))
    }

    pub fn clopen(&self, words: &[&str]) -> Result<ClopenSet> {
        ClopenSet::parse(self.space(), words)
    }
}

impl Scope for Presentation {
    fn groupoid(&self) -> &Arc<Groupoid> {
        &self.groupoid
    }

    fn element(&self, name: &str) -> Option<Element> {
        self.elements.get(name).cloned()
    }

    fn bisection(&self, name: &str) -> Option<Bisection> {
        self.bisections.get(name).cloned()
    }
}

fn in_item(kind: &str, name: &str, e: Error) -> Error {
    match e {
        Error::Unresolved(_) => e,
        e => Error::Parse(format!("{kind} `{name}`: {e}")),
    }
}

fn table(g: &Arc<Groupoid>, t: &TableValue) -> Result<Bisection> {
    match t {
        TableValue::Short(s) => Bisection::parse(g, s),
        TableValue::Literal(l) => Bisection::from_literal(g, l),
    }
}

fn resolve_element(
    p: &mut Presentation,
    values: &BTreeMap<String, ElementValue>,
    name: &str,
    visiting: &mut HashSet<String>,
) -> Result<()> {
    if p.elements.contains_key(name) {
        return Ok(());
    }
    let v = values
        .get(name)
        .ok_or_else(|| Error::Unresolved(name.to_string()))?;
    if !visiting.insert(name.to_string()) {
        return Err(Error::Parse(format!("element `{name}` is defined in terms of itself")));
    }
    let e = match v {
        ElementValue::Table(t) => {
            Element::new(table(&p.groupoid, t).map_err(|e| in_item("element", name, e))?)
                .map_err(|e| in_item("element", name, e))?
        }
        ElementValue::Expr { expr } => {
            let parsed = expr::parse_expr(expr).map_err(|e| in_item("element", name, e))?;
            for dep in names_in(&parsed) {
                if values.contains_key(&dep) {
                    resolve_element(p, values, &dep, visiting)?;
                }
            }
            expr::eval_expr(&parsed, p).map_err(|e| in_item("element", name, e))?
        }
    };
    visiting.remove(name);
    p.elements.insert(name.to_string(), e);
    Ok(())
}

fn names_in(e: &expr::Expr) -> Vec<String> {
    use expr::Expr::*;
    match e {
        Name(n) => vec![n.clone()],
        Product(a, b) | Commutator(a, b) => {
            let mut v = names_in(a);
            v.extend(names_in(b));
            v
        }
        Power(a, _) => names_in(a),
        Identity | Table(_) | Tau(_) => vec![],
    }
}

fn multisection(p: &Presentation, m: &MultisectionValue) -> Result<Multisection> {
    match m {
        MultisectionValue::Grid(rows) => {
            let grid = rows
                .iter()
                .map(|row| row.iter().map(|t| table(&p.groupoid, t)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Multisection::new(grid)
        }
        MultisectionValue::Spokes { spokes, on } => {
            let hs = spokes
                .iter()
                .map(|s| match p.bisections.get(s) {
                    Some(b) => Ok(b.clone()),
                    None if s.contains(':') => Bisection::parse(&p.groupoid, s),
                    None => Err(Error::Unresolved(s.clone())),
                })
                .collect::<Result<Vec<_>>>()?;
            let on: Vec<&str> = on.iter().map(String::as_str).collect();
            Multisection::from_spokes(&hs, &p.clopen(&on)?)
        }
    }
}
