//! Resolution and validation of a parsed site file.
//!
//! Names share one namespace and must be declared before use. Groups,
//! actions, maps, equivariant maps, covers, stacks, and objects are checked
//! on load. Bundles load as candidate projections and descent data with
//! typing checks only, so that `check-bundle` and `glue-object` can report
//! their failures as verified witnesses.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use descent_core::bundle::{equivariant_projection, is_principal_bundle};
use descent_core::descent::restrict_to_datum;
use descent_core::finset::{product, terminal};
use descent_core::group::{check_action, check_equivariant, check_group, product_action};
use descent_core::stack::{check_qs_morphism, check_qs_object, restrict, restrict_morphism};
use descent_core::{
    Atom, CoveringFamily, DescentDatum, EquivariantMap, FinGroup, FinMap, FinSet, GAction,
    QSMorphism, QSObject, QuotientStack,
};
use thiserror::Error;

use crate::syntax::{parse, Decl, Document, Pos, SyntaxError, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: unresolved reference `{name}` in declaration `{decl}`")]
    UnresolvedReference {
        name: String,
        decl: String,
        pos: Pos,
    },
    #[error("{pos}: invalid declaration `{decl}`: {violation}: {message}")]
    Validation {
        decl: String,
        pos: Pos,
        violation: String,
        message: String,
    },
}

impl LoadError {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => "IoError",
            LoadError::Syntax(_) => "SyntaxError",
            LoadError::UnresolvedReference { .. } => "UnresolvedReference",
            LoadError::Validation { .. } => "ValidationError",
        }
    }
}

/// Name of the innermost error variant, read off its `Debug` form.
pub fn violation_name(e: &impl fmt::Debug) -> String {
    let s = format!("{e:?}");
    let mut rest = s.as_str();
    for wrapper in ["Stack(", "Bundle(", "Action(", "Fin("] {
        if let Some(inner) = rest.strip_prefix(wrapper) {
            rest = inner;
        }
    }
    rest.split(|c: char| !c.is_alphanumeric() && c != '_')
        .next()
        .unwrap_or_default()
        .to_string()
}

/// A declared projection not yet certified as a principal bundle.
#[derive(Debug, Clone)]
pub struct CandidateBundle {
    pub total: GAction,
    pub proj: FinMap,
}

#[derive(Debug, Clone)]
pub struct StackDecl {
    pub stack: QuotientStack,
    pub max_base: usize,
}

#[derive(Debug, Clone)]
pub struct Gluing {
    pub cover: CoveringFamily,
    pub src: QSObject,
    pub dst: QSObject,
    pub locals: Vec<QSMorphism>,
}

#[derive(Debug, Clone)]
pub enum Entity {
    Set(FinSet),
    Group(Arc<FinGroup>),
    Action(GAction),
    Map(FinMap),
    Equivariant(EquivariantMap),
    Bundle(CandidateBundle),
    Cover(CoveringFamily),
    Stack(StackDecl),
    Object(QSObject),
    Datum(DescentDatum),
    Gluing(Gluing),
}

impl Entity {
    fn kind(&self) -> &'static str {
        match self {
            Entity::Set(_) => "set",
            Entity::Group(_) => "group",
            Entity::Action(_) => "action",
            Entity::Map(_) => "map",
            Entity::Equivariant(_) => "equivariant",
            Entity::Bundle(_) => "bundle",
            Entity::Cover(_) => "cover",
            Entity::Stack(_) => "stack",
            Entity::Object(_) => "object",
            Entity::Datum(_) => "datum",
            Entity::Gluing(_) => "gluing",
        }
    }
}

/// A loaded site file: the document and its resolved declarations in order.
#[derive(Debug, Clone)]
pub struct SiteFile {
    pub document: Document,
    pub entities: Vec<(String, Entity)>,
}

impl SiteFile {
    pub fn of_kind<'a, T: 'a>(
        &'a self,
        pick: impl Fn(&'a Entity) -> Option<T> + 'a,
    ) -> impl Iterator<Item = (&'a str, T)> + 'a {
        self.entities
            .iter()
            .filter_map(move |(n, e)| pick(e).map(|t| (n.as_str(), t)))
    }

    pub fn get(&self, name: &str) -> Option<&Entity> {
        self.entities
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }
}

pub fn parse_site(path: &std::path::Path) -> Result<SiteFile, LoadError> {
    let src = std::fs::read_to_string(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_str(&src)
}

pub fn load_str(src: &str) -> Result<SiteFile, LoadError> {
    load(parse(src)?)
}

pub fn load(document: Document) -> Result<SiteFile, LoadError> {
    let mut loader = Loader {
        entities: Vec::new(),
        index: HashMap::new(),
    };
    for decl in &document.decls {
        let entity = loader.decl(decl)?;
        if loader.index.contains_key(&decl.name) {
            return Err(invalid(
                decl,
                decl.pos,
                "DuplicateName",
                "name already declared",
            ));
        }
        loader
            .index
            .insert(decl.name.clone(), loader.entities.len());
        loader.entities.push((decl.name.clone(), entity));
    }
    Ok(SiteFile {
        document,
        entities: loader.entities,
    })
}

fn invalid(decl: &Decl, pos: Pos, violation: &str, message: impl Into<String>) -> LoadError {
    LoadError::Validation {
        decl: decl.name.clone(),
        pos,
        violation: violation.to_string(),
        message: message.into(),
    }
}

fn invalid_from(decl: &Decl, pos: Pos, e: &(impl fmt::Debug + fmt::Display)) -> LoadError {
    invalid(decl, pos, &violation_name(e), e.to_string())
}

struct Loader {
    entities: Vec<(String, Entity)>,
    index: HashMap<String, usize>,
}

impl Loader {
    fn field<'d>(&self, decl: &'d Decl, key: &str) -> Result<&'d Value, LoadError> {
        decl.field(key).map(|f| &f.value).ok_or_else(|| {
            invalid(
                decl,
                decl.pos,
                "MissingField",
                format!("missing field `{key}`"),
            )
        })
    }

    fn entity(&self, decl: &Decl, v: &Value) -> Result<&Entity, LoadError> {
        let name = v.as_name().ok_or_else(|| {
            invalid(
                decl,
                v.pos,
                "ExpectedName",
                format!("expected a name, found {v}"),
            )
        })?;
        self.index
            .get(name)
            .map(|&i| &self.entities[i].1)
            .ok_or_else(|| LoadError::UnresolvedReference {
                name: name.to_string(),
                decl: decl.name.clone(),
                pos: v.pos,
            })
    }

    fn wrong_kind(decl: &Decl, v: &Value, e: &Entity, wanted: &str) -> LoadError {
        invalid(
            decl,
            v.pos,
            "WrongKind",
            format!("`{v}` is a {}, expected {wanted}", e.kind()),
        )
    }

    /// A set, or the space of an action, or the carrier of a group.
    fn set(&self, decl: &Decl, key: &str) -> Result<FinSet, LoadError> {
        let v = self.field(decl, key)?;
        self.set_value(decl, v)
    }

    fn set_value(&self, decl: &Decl, v: &Value) -> Result<FinSet, LoadError> {
        match self.entity(decl, v)? {
            Entity::Set(s) => Ok(s.clone()),
            Entity::Action(a) => Ok(a.space().clone()),
            Entity::Group(g) => Ok(g.carrier().clone()),
            e => Err(Self::wrong_kind(decl, v, e, "a set")),
        }
    }

    fn group(&self, decl: &Decl, key: &str) -> Result<Arc<FinGroup>, LoadError> {
        let v = self.field(decl, key)?;
        match self.entity(decl, v)? {
            Entity::Group(g) => Ok(g.clone()),
            e => Err(Self::wrong_kind(decl, v, e, "a group")),
        }
    }

    fn action(&self, decl: &Decl, key: &str) -> Result<GAction, LoadError> {
        let v = self.field(decl, key)?;
        match self.entity(decl, v)? {
            Entity::Action(a) => Ok(a.clone()),
            e => Err(Self::wrong_kind(decl, v, e, "an action")),
        }
    }

    fn map_value(&self, decl: &Decl, v: &Value) -> Result<FinMap, LoadError> {
        match self.entity(decl, v)? {
            Entity::Map(m) => Ok(m.clone()),
            Entity::Equivariant(m) => Ok(m.map().clone()),
            e => Err(Self::wrong_kind(decl, v, e, "a map")),
        }
    }

    fn map(&self, decl: &Decl, key: &str) -> Result<FinMap, LoadError> {
        let v = self.field(decl, key)?;
        self.map_value(decl, v)
    }

    fn cover(&self, decl: &Decl, key: &str) -> Result<CoveringFamily, LoadError> {
        let v = self.field(decl, key)?;
        match self.entity(decl, v)? {
            Entity::Cover(c) => Ok(c.clone()),
            e => Err(Self::wrong_kind(decl, v, e, "a cover")),
        }
    }

    fn stack(&self, decl: &Decl, key: &str) -> Result<QuotientStack, LoadError> {
        let v = self.field(decl, key)?;
        match self.entity(decl, v)? {
            Entity::Stack(s) => Ok(s.stack.clone()),
            e => Err(Self::wrong_kind(decl, v, e, "a stack")),
        }
    }

    fn object_value(&self, decl: &Decl, v: &Value) -> Result<QSObject, LoadError> {
        match self.entity(decl, v)? {
            Entity::Object(o) => Ok(o.clone()),
            e => Err(Self::wrong_kind(decl, v, e, "an object")),
        }
    }

    fn object(&self, decl: &Decl, key: &str) -> Result<QSObject, LoadError> {
        let v = self.field(decl, key)?;
        self.object_value(decl, v)
    }

    fn list<'d>(&self, decl: &Decl, v: &'d Value) -> Result<&'d [Value], LoadError> {
        v.as_list().ok_or_else(|| {
            invalid(
                decl,
                v.pos,
                "ExpectedList",
                format!("expected a list, found {v}"),
            )
        })
    }

    fn mapping<'d>(&self, decl: &Decl, v: &'d Value) -> Result<&'d [(Value, Value)], LoadError> {
        v.as_map().ok_or_else(|| {
            invalid(
                decl,
                v.pos,
                "ExpectedMapping",
                format!("expected a mapping, found {v}"),
            )
        })
    }

    fn atom<'d>(&self, decl: &Decl, v: &'d Value) -> Result<&'d Atom, LoadError> {
        v.as_atom().ok_or_else(|| {
            invalid(
                decl,
                v.pos,
                "ExpectedAtom",
                format!("expected an atom, found {v}"),
            )
        })
    }

    fn index_in(&self, decl: &Decl, v: &Value, set: &FinSet) -> Result<usize, LoadError> {
        let a = self.atom(decl, v)?;
        set.index_of(a)
            .ok_or_else(|| invalid(decl, v.pos, "UnknownAtom", format!("{a} is not in {set}")))
    }

    fn usize_field(&self, decl: &Decl, key: &str, default: usize) -> Result<usize, LoadError> {
        let Some(f) = decl.field(key) else {
            return Ok(default);
        };
        match f.value.as_atom() {
            Some(Atom::Int(n)) if *n >= 0 => Ok(*n as usize),
            _ => Err(invalid(
                decl,
                f.pos,
                "ExpectedCount",
                format!("`{key}` must be a non-negative integer"),
            )),
        }
    }

    fn decl(&self, decl: &Decl) -> Result<Entity, LoadError> {
        match decl.kind.as_str() {
            "set" => self.load_set(decl),
            "group" => self.load_group(decl),
            "action" => self.load_action(decl),
            "map" => self.load_map(decl),
            "equivariant" => self.load_equivariant(decl),
            "bundle" => self.load_bundle(decl),
            "cover" => self.load_cover(decl),
            "stack" => self.load_stack(decl),
            "object" => self.load_object(decl),
            "datum" => self.load_datum(decl),
            "gluing" => self.load_gluing(decl),
            other => Err(invalid(
                decl,
                decl.pos,
                "UnknownDeclaration",
                format!("unknown declaration kind `{other}`"),
            )),
        }
    }

    fn load_set(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let v = self.field(decl, "atoms")?;
        let atoms = self
            .list(decl, v)?
            .iter()
            .map(|a| self.atom(decl, a).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        FinSet::new(atoms)
            .map(Entity::Set)
            .map_err(|e| invalid_from(decl, v.pos, &e))
    }

    fn load_group(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let cv = self.field(decl, "carrier")?;
        let listed = self
            .list(decl, cv)?
            .iter()
            .map(|a| self.atom(decl, a).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        let carrier = FinSet::new(listed.clone()).map_err(|e| invalid_from(decl, cv.pos, &e))?;
        let tv = self.field(decl, "table")?;
        let rows = self.list(decl, tv)?;
        if rows.len() != listed.len() {
            return Err(invalid(
                decl,
                tv.pos,
                "Malformed",
                "table needs one row per carrier element",
            ));
        }
        // rows follow the listed order; the group indexes by sorted order
        let mut table = vec![Vec::new(); listed.len()];
        for (a, row) in listed.iter().zip(rows) {
            let cells = self.list(decl, row)?;
            if cells.len() != listed.len() {
                return Err(invalid(
                    decl,
                    row.pos,
                    "Malformed",
                    "table rows need one entry per carrier element",
                ));
            }
            let mut sorted_row = vec![0; listed.len()];
            for (b, cell) in listed.iter().zip(cells) {
                sorted_row[carrier.index_of(b).expect("listed")] =
                    self.index_in(decl, cell, &carrier)?;
            }
            table[carrier.index_of(a).expect("listed")] = sorted_row;
        }
        check_group(&carrier, &table)
            .map(|g| Entity::Group(Arc::new(g)))
            .map_err(|e| invalid_from(decl, tv.pos, &e))
    }

    fn load_action(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let group = self.group(decl, "group")?;
        if let Some(k) = decl.field("kind") {
            return match k.value.as_name() {
                Some("regular") => Ok(Entity::Action(GAction::regular(&group))),
                Some("trivial") => Ok(Entity::Action(GAction::trivial(
                    &group,
                    &self.set(decl, "space")?,
                ))),
                Some("product") => Ok(Entity::Action(product_action(
                    &group,
                    &self.set(decl, "over")?,
                ))),
                _ => Err(invalid(
                    decl,
                    k.pos,
                    "UnknownKind",
                    "action kind is one of regular, trivial, product",
                )),
            };
        }
        let space = self.set(decl, "space")?;
        let tv = self.field(decl, "table")?;
        let prod = product(group.carrier(), &space);
        let mut table = vec![usize::MAX; prod.apex.len()];
        for (g, row) in self.mapping(decl, tv)? {
            let gi = self.index_in(decl, g, group.carrier())?;
            for (x, y) in self.mapping(decl, row)? {
                let (xi, yi) = (
                    self.index_in(decl, x, &space)?,
                    self.index_in(decl, y, &space)?,
                );
                table[prod.index(gi, xi)] = yi;
            }
        }
        if let Some(k) = table.iter().position(|&y| y == usize::MAX) {
            return Err(invalid(
                decl,
                tv.pos,
                "Unassigned",
                format!("no value at {}", prod.apex.atom(k)),
            ));
        }
        let act = FinMap::from_table(prod.apex.clone(), space.clone(), table).expect("in range");
        check_action(&group, &space, &act)
            .map(Entity::Action)
            .map_err(|e| invalid_from(decl, tv.pos, &e))
    }

    fn load_map(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let src = self.set(decl, "src")?;
        let dst = self.set(decl, "dst")?;
        let tv = self.field(decl, "table")?;
        let pairs = self
            .mapping(decl, tv)?
            .iter()
            .map(|(a, b)| Ok((self.atom(decl, a)?.clone(), self.atom(decl, b)?.clone())))
            .collect::<Result<Vec<_>, LoadError>>()?;
        FinMap::from_pairs(src, dst, pairs)
            .map(Entity::Map)
            .map_err(|e| invalid_from(decl, tv.pos, &e))
    }

    fn load_equivariant(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let f = self.map(decl, "map")?;
        let a = self.action(decl, "src")?;
        let b = self.action(decl, "dst")?;
        check_equivariant(&f, &a, &b)
            .map(Entity::Equivariant)
            .map_err(|e| invalid_from(decl, decl.pos, &e))
    }

    fn load_bundle(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let total = self.action(decl, "total")?;
        let base = self.set(decl, "base")?;
        let proj = self.map(decl, "proj")?;
        if proj.src() != total.space() || *proj.dst() != base {
            return Err(invalid(
                decl,
                decl.pos,
                "Shape",
                "projection must map the total space to the base",
            ));
        }
        Ok(Entity::Bundle(CandidateBundle { total, proj }))
    }

    fn load_cover(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let target = self.set(decl, "target")?;
        let lv = self.field(decl, "legs")?;
        let legs = self
            .list(decl, lv)?
            .iter()
            .map(|l| self.map_value(decl, l))
            .collect::<Result<Vec<_>, _>>()?;
        CoveringFamily::new(target, legs)
            .map(Entity::Cover)
            .map_err(|e| invalid_from(decl, lv.pos, &e))
    }

    fn load_stack(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let stack = if decl.field("action").is_some() {
            QuotientStack::new(self.action(decl, "action")?)
        } else {
            let group = self.group(decl, "group")?;
            QuotientStack::new(GAction::trivial(&group, &terminal()))
        };
        Ok(Entity::Stack(StackDecl {
            stack,
            max_base: self.usize_field(decl, "max_base", 2)?,
        }))
    }

    fn load_object(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let stack = self.stack(decl, "stack")?;
        let bv = self.field(decl, "bundle")?;
        let candidate = match self.entity(decl, bv)? {
            Entity::Bundle(b) => b.clone(),
            e => return Err(Self::wrong_kind(decl, bv, e, "a bundle")),
        };
        let proj = equivariant_projection(&candidate.total, &candidate.proj)
            .map_err(|e| invalid_from(decl, bv.pos, &e))?;
        let bundle = is_principal_bundle(&proj)
            .map_err(|e| invalid(decl, bv.pos, "NotBundle", e.to_string()))?;
        let alpha = self.map(decl, "alpha")?;
        check_qs_object(&stack, &bundle, &alpha)
            .map(Entity::Object)
            .map_err(|e| invalid_from(decl, decl.pos, &e))
    }

    fn load_datum(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let cover = self.cover(decl, "cover")?;
        if decl.field("object").is_some() {
            let obj = self.object(decl, "object")?;
            return restrict_to_datum(&obj, &cover)
                .map(Entity::Datum)
                .map_err(|e| invalid_from(decl, decl.pos, &e));
        }
        let stack = self.stack(decl, "stack")?;
        let ov = self.field(decl, "objects")?;
        let objects = self
            .list(decl, ov)?
            .iter()
            .map(|o| self.object_value(decl, o))
            .collect::<Result<Vec<_>, _>>()?;
        if objects.len() != cover.len() {
            return Err(invalid(
                decl,
                ov.pos,
                "Malformed",
                "one object per cover leg",
            ));
        }
        // (i, j, a, b, p) ↦ q, by indices
        let mut given: HashMap<(usize, usize, usize, usize, usize), usize> = HashMap::new();
        if let Some(f) = decl.field("overlaps") {
            for (ij, per_point) in self.mapping(decl, &f.value)? {
                let (i, j) = self.leg_pair(decl, ij, cover.len())?;
                let (ui, uj) = (cover.legs()[i].src(), cover.legs()[j].src());
                for (ab, fiber) in self.mapping(decl, per_point)? {
                    let (a, b) = match self.atom(decl, ab)?.as_pair() {
                        Some((a, b)) => (a.clone(), b.clone()),
                        None => {
                            return Err(invalid(
                                decl,
                                ab.pos,
                                "Malformed",
                                "overlap points are pairs (a, b)",
                            ))
                        }
                    };
                    let a = ui.index_of(&a).ok_or_else(|| {
                        invalid(
                            decl,
                            ab.pos,
                            "UnknownAtom",
                            format!("{a} is not in leg {i}"),
                        )
                    })?;
                    let b = uj.index_of(&b).ok_or_else(|| {
                        invalid(
                            decl,
                            ab.pos,
                            "UnknownAtom",
                            format!("{b} is not in leg {j}"),
                        )
                    })?;
                    if cover.legs()[i].at(a) != cover.legs()[j].at(b) {
                        return Err(invalid(
                            decl,
                            ab.pos,
                            "NotOverlap",
                            format!("{ab} is not in the overlap of legs {i} and {j}"),
                        ));
                    }
                    for (p, q) in self.mapping(decl, fiber)? {
                        let p = self.index_in(decl, p, objects[i].total_space())?;
                        let q = self.index_in(decl, q, objects[j].total_space())?;
                        given.insert((i, j, a, b, p), q);
                    }
                }
            }
        }
        let mut missing = None;
        let datum = DescentDatum::from_fibers(&stack, &cover, objects, |i, j, a, b, p| match given
            .get(&(i, j, a, b, p))
        {
            Some(&q) => q,
            None if i == j && a == b => p,
            None => {
                missing.get_or_insert((i, j, a, b));
                usize::MAX
            }
        });
        if let Some((i, j, a, b)) = missing {
            let point = Atom::pair(
                cover.legs()[i].src().atom(a).clone(),
                cover.legs()[j].src().atom(b).clone(),
            );
            return Err(invalid(
                decl,
                decl.pos,
                "MissingOverlap",
                format!("overlap ({i}, {j}) is not given at {point}"),
            ));
        }
        datum
            .map(Entity::Datum)
            .map_err(|e| invalid_from(decl, decl.pos, &e))
    }

    fn leg_pair(&self, decl: &Decl, v: &Value, legs: usize) -> Result<(usize, usize), LoadError> {
        let bad = || {
            invalid(
                decl,
                v.pos,
                "Malformed",
                format!("expected a pair of leg indices below {legs}, found {v}"),
            )
        };
        let (i, j) = self.atom(decl, v)?.as_pair().ok_or_else(bad)?;
        match (i, j) {
            (Atom::Int(i), Atom::Int(j))
                if (0..legs as i64).contains(i) && (0..legs as i64).contains(j) =>
            {
                Ok((*i as usize, *j as usize))
            }
            _ => Err(bad()),
        }
    }

    fn load_gluing(&self, decl: &Decl) -> Result<Entity, LoadError> {
        let cover = self.cover(decl, "cover")?;
        let src = self.object(decl, "src")?;
        let dst = self.object(decl, "dst")?;
        if src.base() != cover.target() || dst.base() != cover.target() {
            return Err(invalid(
                decl,
                decl.pos,
                "BaseMismatch",
                "objects must live over the cover target",
            ));
        }
        let wrap = |e: descent_core::stack::StackError| invalid_from(decl, decl.pos, &e);
        if decl.field("global").is_some() {
            let m = self.map(decl, "global")?;
            let m = check_qs_morphism(&src, &dst, &m).map_err(wrap)?;
            let locals = cover
                .legs()
                .iter()
                .map(|f| restrict_morphism(&m, f))
                .collect::<Result<Vec<_>, _>>()
                .map_err(wrap)?;
            return Ok(Entity::Gluing(Gluing {
                cover,
                src,
                dst,
                locals,
            }));
        }
        let lv = self.field(decl, "locals")?;
        let tables = self.list(decl, lv)?;
        if tables.len() != cover.len() {
            return Err(invalid(
                decl,
                lv.pos,
                "Malformed",
                "one local morphism per cover leg",
            ));
        }
        let mut locals = Vec::with_capacity(cover.len());
        for ((f, local), i) in cover.legs().iter().zip(tables).zip(0..) {
            let rs = restrict(&src, f).map_err(wrap)?;
            let rd = restrict(&dst, f).map_err(wrap)?;
            // u ↦ { p ↦ q } sends (p, u) to (q, u)
            let mut table = vec![usize::MAX; rs.object.total_space().len()];
            for (u, fiber) in self.mapping(decl, local)? {
                let ui = self.index_in(decl, u, f.src())?;
                for (p, q) in self.mapping(decl, fiber)? {
                    let pi = self.index_in(decl, p, src.total_space())?;
                    let qi = self.index_in(decl, q, dst.total_space())?;
                    let (Some(e), Some(t)) = (rs.cert.index(pi, ui), rd.cert.index(qi, ui)) else {
                        return Err(invalid(
                            decl,
                            p.pos,
                            "NotOverFiber",
                            format!("{p} ↦ {q} does not lie over {u}"),
                        ));
                    };
                    table[e] = t;
                }
            }
            if let Some(e) = table.iter().position(|&t| t == usize::MAX) {
                return Err(invalid(
                    decl,
                    local.pos,
                    "Unassigned",
                    format!(
                        "local {i} has no value at {}",
                        rs.object.total_space().atom(e)
                    ),
                ));
            }
            let m = FinMap::from_table(
                rs.object.total_space().clone(),
                rd.object.total_space().clone(),
                table,
            )
            .expect("in range");
            locals.push(check_qs_morphism(&rs.object, &rd.object, &m).map_err(wrap)?);
        }
        Ok(Entity::Gluing(Gluing {
            cover,
            src,
            dst,
            locals,
        }))
    }
}
