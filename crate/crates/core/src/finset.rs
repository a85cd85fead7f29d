//! The ambient category: finite sets and total functions between them,
//! together with the limits and colimits the bundle constructions consume.
//!
//! Every derived object is built in a normal form (see [`Atom`]) so that
//! structural equality is exact. Maps store their table by index into the
//! canonical (sorted) order of the source and target sets.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::atom::Atom;
use crate::partition::DisjointSets;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinError {
    #[error("duplicate atom {0} in set literal")]
    DuplicateAtom(Atom),
    #[error("atom {0} is not an element of the set")]
    UnknownAtom(Atom),
    #[error("atom {0} has no assigned image")]
    Unassigned(Atom),
    #[error("atom {0} is assigned twice")]
    DoublyAssigned(Atom),
    #[error("table has {found} entries but source has {expected} atoms")]
    TableLength { expected: usize, found: usize },
    #[error("table entry {0} is out of range for the target")]
    IndexOutOfRange(usize),
    #[error("cannot compose: target of the first map differs from source of the second")]
    SrcDstMismatch,
    #[error("cospan legs have different codomains")]
    CodomainMismatch,
    #[error("maps have different sources")]
    SrcMismatch,
    #[error("square does not commute at {0}")]
    SquareNotCommuting(Atom),
    #[error("parallel pair must share source and target")]
    ShapeMismatch,
    #[error("map does not coequalize the pair: {0} and {1} are identified but sent apart")]
    NotCoequalized(Atom, Atom),
    #[error("diagram arrow {0} references a missing object")]
    DanglingArrow(usize),
}

/// A finite set of distinct atoms kept in canonical (sorted) order.
#[derive(Clone)]
pub struct FinSet {
    elems: Arc<[Atom]>,
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.elems, &other.elems) || self.elems == other.elems
    }
}

impl Eq for FinSet {}

impl std::hash::Hash for FinSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.elems.hash(state)
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl FinSet {
    pub fn new<I, A>(atoms: I) -> Result<FinSet, FinError>
    where
        I: IntoIterator<Item = A>,
        A: Into<Atom>,
    {
        let mut v: Vec<Atom> = atoms.into_iter().map(Into::into).collect();
        v.sort();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(FinError::DuplicateAtom(w[0].clone()));
        }
        Ok(FinSet { elems: v.into() })
    }

    /// Caller guarantees `atoms` is strictly increasing.
    pub(crate) fn from_sorted(atoms: Vec<Atom>) -> FinSet {
        debug_assert!(atoms.windows(2).all(|w| w[0] < w[1]));
        FinSet {
            elems: atoms.into(),
        }
    }

    /// `{0, 1, …, n-1}`.
    pub fn range(n: usize) -> FinSet {
        FinSet::from_sorted((0..n).map(Atom::from).collect())
    }

    pub fn empty() -> FinSet {
        FinSet::from_sorted(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.elems
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.elems[i]
    }

    pub fn index_of(&self, a: &Atom) -> Option<usize> {
        self.elems.binary_search(a).ok()
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.index_of(a).is_some()
    }

    /// Subset of the atoms at the given (increasing) indices.
    pub(crate) fn restrict_to(&self, indices: &[usize]) -> FinSet {
        FinSet::from_sorted(indices.iter().map(|&i| self.elems[i].clone()).collect())
    }
}

/// The terminal object `{*}`.
pub fn terminal() -> FinSet {
    FinSet::from_sorted(vec![Atom::Star])
}

/// The unique map `A → {*}`.
pub fn bang(a: &FinSet) -> FinMap {
    FinMap {
        src: a.clone(),
        dst: terminal(),
        table: vec![0; a.len()],
    }
}

/// A total function between finite sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMap {
    src: FinSet,
    dst: FinSet,
    table: Vec<usize>,
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, &j) in self.table.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} ↦ {}", self.src.atom(i), self.dst.atom(j))?;
        }
        f.write_str("}")
    }
}

impl FinMap {
    pub fn from_table(src: FinSet, dst: FinSet, table: Vec<usize>) -> Result<FinMap, FinError> {
        if table.len() != src.len() {
            return Err(FinError::TableLength {
                expected: src.len(),
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&j| j >= dst.len()) {
            return Err(FinError::IndexOutOfRange(bad));
        }
        Ok(FinMap { src, dst, table })
    }

    pub(crate) fn from_table_unchecked(src: FinSet, dst: FinSet, table: Vec<usize>) -> FinMap {
        debug_assert_eq!(table.len(), src.len());
        debug_assert!(table.iter().all(|&j| j < dst.len()));
        FinMap { src, dst, table }
    }

    /// Builds a map from explicit `(source atom, target atom)` assignments.
    pub fn from_pairs<I>(src: FinSet, dst: FinSet, pairs: I) -> Result<FinMap, FinError>
    where
        I: IntoIterator<Item = (Atom, Atom)>,
    {
        let mut table = vec![usize::MAX; src.len()];
        for (a, b) in pairs {
            let i = src
                .index_of(&a)
                .ok_or_else(|| FinError::UnknownAtom(a.clone()))?;
            let j = dst.index_of(&b).ok_or(FinError::UnknownAtom(b))?;
            if table[i] != usize::MAX {
                return Err(FinError::DoublyAssigned(a));
            }
            table[i] = j;
        }
        if let Some(i) = table.iter().position(|&j| j == usize::MAX) {
            return Err(FinError::Unassigned(src.atom(i).clone()));
        }
        Ok(FinMap { src, dst, table })
    }

    /// Builds a map by evaluating `f` on every source atom.
    pub fn from_fn<F>(src: FinSet, dst: FinSet, mut f: F) -> Result<FinMap, FinError>
    where
        F: FnMut(&Atom) -> Atom,
    {
        let table = src
            .atoms()
            .iter()
            .map(|a| {
                let b = f(a);
                dst.index_of(&b).ok_or(FinError::UnknownAtom(b))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FinMap { src, dst, table })
    }

    pub fn identity(a: &FinSet) -> FinMap {
        FinMap {
            src: a.clone(),
            dst: a.clone(),
            table: (0..a.len()).collect(),
        }
    }

    pub fn constant(src: &FinSet, dst: &FinSet, target: usize) -> FinMap {
        assert!(target < dst.len() || src.is_empty());
        FinMap {
            src: src.clone(),
            dst: dst.clone(),
            table: vec![target; src.len()],
        }
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn dst(&self) -> &FinSet {
        &self.dst
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at(&self, i: usize) -> usize {
        self.table[i]
    }

    pub fn apply(&self, a: &Atom) -> Option<&Atom> {
        self.src.index_of(a).map(|i| self.dst.atom(self.table[i]))
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.table.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.len()];
        self.table
            .iter()
            .all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.dst.len()];
        for &j in &self.table {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_bijective(&self) -> bool {
        self.src.len() == self.dst.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.table.len()];
        for (i, &j) in self.table.iter().enumerate() {
            inv[j] = i;
        }
        Some(FinMap {
            src: self.dst.clone(),
            dst: self.src.clone(),
            table: inv,
        })
    }

    /// Indices of the source lying over target index `j`.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        (0..self.table.len())
            .filter(|&i| self.table[i] == j)
            .collect()
    }

    /// All fibers, indexed by target position.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.dst.len()];
        for (i, &j) in self.table.iter().enumerate() {
            out[j].push(i);
        }
        out
    }
}

/// `g ∘ f`.
pub fn compose(g: &FinMap, f: &FinMap) -> Result<FinMap, FinError> {
    if f.dst != g.src {
        return Err(FinError::SrcDstMismatch);
    }
    Ok(FinMap {
        src: f.src.clone(),
        dst: g.dst.clone(),
        table: f.table.iter().map(|&j| g.table[j]).collect(),
    })
}

/// Mono, epi and iso, which in finite sets are injective, surjective and
/// bijective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MorphismPredicates {
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
}

pub fn morphism_predicates(f: &FinMap) -> MorphismPredicates {
    MorphismPredicates {
        mono: f.is_injective(),
        epi: f.is_surjective(),
        iso: f.is_bijective(),
    }
}

/// Binary product `A × B` with atoms `(a,b)` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Product {
    pub apex: FinSet,
    pub proj1: FinMap,
    pub proj2: FinMap,
}

impl Product {
    /// Index of `(a_i, b_j)` in the apex.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.proj2.dst.len() + j
    }

    /// The pairing `⟨u, v⟩` into the product.
    pub fn pair(&self, u: &FinMap, v: &FinMap) -> Result<FinMap, FinError> {
        if u.src != v.src {
            return Err(FinError::SrcMismatch);
        }
        if u.dst != *self.proj1.dst() || v.dst != *self.proj2.dst() {
            return Err(FinError::SrcDstMismatch);
        }
        let table = u
            .table
            .iter()
            .zip(&v.table)
            .map(|(&i, &j)| self.index(i, j))
            .collect();
        Ok(FinMap {
            src: u.src.clone(),
            dst: self.apex.clone(),
            table,
        })
    }
}

pub fn product(a: &FinSet, b: &FinSet) -> Product {
    let mut atoms = Vec::with_capacity(a.len() * b.len());
    let mut p1 = Vec::with_capacity(a.len() * b.len());
    let mut p2 = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.atoms().iter().enumerate() {
        for (j, y) in b.atoms().iter().enumerate() {
            atoms.push(Atom::pair(x.clone(), y.clone()));
            p1.push(i);
            p2.push(j);
        }
    }
    let apex = FinSet::from_sorted(atoms);
    Product {
        proj1: FinMap::from_table_unchecked(apex.clone(), a.clone(), p1),
        proj2: FinMap::from_table_unchecked(apex.clone(), b.clone(), p2),
        apex,
    }
}

/// `f × g : A × B → C × D`.
pub fn product_of_maps(f: &FinMap, g: &FinMap) -> FinMap {
    let src = product(&f.src, &g.src);
    let dst = product(&f.dst, &g.dst);
    let mut table = Vec::with_capacity(src.apex.len());
    for &i in &f.table {
        for &j in &g.table {
            table.push(dst.index(i, j));
        }
    }
    FinMap::from_table_unchecked(src.apex, dst.apex, table)
}

/// Coproduct `∐ parts` with atoms `i·a`.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub apex: FinSet,
    pub injections: Vec<FinMap>,
    offsets: Vec<usize>,
}

impl Coproduct {
    pub fn offset(&self, part: usize) -> usize {
        self.offsets[part]
    }

    /// `(part, index within part)` of an apex index.
    pub fn locate(&self, k: usize) -> (usize, usize) {
        let part = self.offsets.partition_point(|&o| o <= k) - 1;
        (part, k - self.offsets[part])
    }

    /// The copairing `[m_0, …, m_n]` out of the coproduct.
    pub fn copair(&self, maps: &[FinMap]) -> Result<FinMap, FinError> {
        if maps.len() != self.injections.len() {
            return Err(FinError::ShapeMismatch);
        }
        let dst = match maps.first() {
            Some(m) => m.dst.clone(),
            None => return Err(FinError::ShapeMismatch),
        };
        let mut table = Vec::with_capacity(self.apex.len());
        for (m, inj) in maps.iter().zip(&self.injections) {
            if m.src != inj.src {
                return Err(FinError::SrcMismatch);
            }
            if m.dst != dst {
                return Err(FinError::CodomainMismatch);
            }
            table.extend_from_slice(&m.table);
        }
        Ok(FinMap::from_table_unchecked(self.apex.clone(), dst, table))
    }

    /// Copairing into an explicit target; also defined for zero parts.
    pub fn copair_into(&self, dst: &FinSet, maps: &[FinMap]) -> Result<FinMap, FinError> {
        if maps.is_empty() && self.injections.is_empty() {
            return Ok(FinMap::from_table_unchecked(
                self.apex.clone(),
                dst.clone(),
                Vec::new(),
            ));
        }
        let m = self.copair(maps)?;
        if m.dst != *dst {
            return Err(FinError::CodomainMismatch);
        }
        Ok(m)
    }
}

pub fn coproduct(parts: &[FinSet]) -> Coproduct {
    let mut atoms = Vec::new();
    let mut offsets = Vec::with_capacity(parts.len());
    for (i, p) in parts.iter().enumerate() {
        offsets.push(atoms.len());
        atoms.extend(p.atoms().iter().map(|a| Atom::tag(i, a.clone())));
    }
    let apex = FinSet::from_sorted(atoms);
    let injections = parts
        .iter()
        .zip(&offsets)
        .map(|(p, &o)| {
            FinMap::from_table_unchecked(p.clone(), apex.clone(), (o..o + p.len()).collect())
        })
        .collect();
    Coproduct {
        apex,
        injections,
        offsets,
    }
}

/// `f × g : ∐ A_i → ∐ B_i` for maps `f_i : A_i → B_i` between coproducts.
pub fn coproduct_of_maps(maps: &[FinMap]) -> (Coproduct, Coproduct, FinMap) {
    let src = coproduct(&maps.iter().map(|m| m.src.clone()).collect::<Vec<_>>());
    let dst = coproduct(&maps.iter().map(|m| m.dst.clone()).collect::<Vec<_>>());
    let mut table = Vec::with_capacity(src.apex.len());
    for (i, m) in maps.iter().enumerate() {
        table.extend(m.table.iter().map(|&j| dst.offset(i) + j));
    }
    let map = FinMap::from_table_unchecked(src.apex.clone(), dst.apex.clone(), table);
    (src, dst, map)
}

/// A pullback square `P ×_Y Z` of the cospan `f: P → Y ← Z: g`.
#[derive(Debug, Clone)]
pub struct PullbackCert {
    pub apex: FinSet,
    pub proj1: FinMap,
    pub proj2: FinMap,
    pub f: FinMap,
    pub g: FinMap,
    index: HashMap<(usize, usize), usize>,
}

impl PullbackCert {
    /// Apex index of the pair `(a_i, b_j)`, if `f(a_i) = g(b_j)`.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        self.index.get(&(i, j)).copied()
    }
}

pub fn pullback(f: &FinMap, g: &FinMap) -> Result<PullbackCert, FinError> {
    if f.dst != g.dst {
        return Err(FinError::CodomainMismatch);
    }
    let g_fibers = g.fibers();
    let mut atoms = Vec::new();
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut index = HashMap::new();
    for (i, &y) in f.table.iter().enumerate() {
        for &j in &g_fibers[y] {
            index.insert((i, j), atoms.len());
            atoms.push(Atom::pair(f.src.atom(i).clone(), g.src.atom(j).clone()));
            p1.push(i);
            p2.push(j);
        }
    }
    let apex = FinSet::from_sorted(atoms);
    Ok(PullbackCert {
        proj1: FinMap::from_table_unchecked(apex.clone(), f.src.clone(), p1),
        proj2: FinMap::from_table_unchecked(apex.clone(), g.src.clone(), p2),
        apex,
        f: f.clone(),
        g: g.clone(),
        index,
    })
}

/// The unique `t` with `proj1 ∘ t = u` and `proj2 ∘ t = v`.
pub fn mediate_pullback(cert: &PullbackCert, u: &FinMap, v: &FinMap) -> Result<FinMap, FinError> {
    if u.src != v.src {
        return Err(FinError::SrcMismatch);
    }
    if u.dst != cert.f.src || v.dst != cert.g.src {
        return Err(FinError::SrcDstMismatch);
    }
    let mut table = Vec::with_capacity(u.src.len());
    for (k, (&i, &j)) in u.table.iter().zip(&v.table).enumerate() {
        match cert.index(i, j) {
            Some(t) => table.push(t),
            None => return Err(FinError::SquareNotCommuting(u.src.atom(k).clone())),
        }
    }
    Ok(FinMap::from_table_unchecked(
        u.src.clone(),
        cert.apex.clone(),
        table,
    ))
}

/// Coequalizer of a parallel pair, classes named by their least atom.
#[derive(Debug, Clone)]
pub struct CoequalizerCert {
    pub gamma1: FinMap,
    pub gamma2: FinMap,
    pub quotient: FinSet,
    pub proj: FinMap,
}

pub fn coequalizer(gamma1: &FinMap, gamma2: &FinMap) -> Result<CoequalizerCert, FinError> {
    if gamma1.src != gamma2.src || gamma1.dst != gamma2.dst {
        return Err(FinError::ShapeMismatch);
    }
    let n = gamma1.dst.len();
    let mut ds = DisjointSets::new(n);
    for (&a, &b) in gamma1.table.iter().zip(&gamma2.table) {
        ds.union(a, b);
    }
    let least = ds.least_representatives();
    let reps: Vec<usize> = (0..n).filter(|&i| least[i] == i).collect();
    let mut slot = vec![0; n];
    for (q, &r) in reps.iter().enumerate() {
        slot[r] = q;
    }
    let quotient = gamma1.dst.restrict_to(&reps);
    let proj = FinMap::from_table_unchecked(
        gamma1.dst.clone(),
        quotient.clone(),
        least.iter().map(|&r| slot[r]).collect(),
    );
    Ok(CoequalizerCert {
        gamma1: gamma1.clone(),
        gamma2: gamma2.clone(),
        quotient,
        proj,
    })
}

/// The unique `m` with `m ∘ proj = d`.
pub fn mediate_coequalizer(cert: &CoequalizerCert, d: &FinMap) -> Result<FinMap, FinError> {
    if d.src != cert.gamma1.dst {
        return Err(FinError::SrcMismatch);
    }
    for (&a, &b) in cert.gamma1.table.iter().zip(&cert.gamma2.table) {
        if d.table[a] != d.table[b] {
            return Err(FinError::NotCoequalized(
                d.src.atom(a).clone(),
                d.src.atom(b).clone(),
            ));
        }
    }
    let mut table = vec![usize::MAX; cert.quotient.len()];
    for (i, &q) in cert.proj.table.iter().enumerate() {
        if table[q] == usize::MAX {
            table[q] = d.table[i];
        } else if table[q] != d.table[i] {
            // unreachable when the pair generates the class relation
            return Err(FinError::NotCoequalized(
                cert.quotient.atom(q).clone(),
                d.src.atom(i).clone(),
            ));
        }
    }
    Ok(FinMap::from_table_unchecked(
        cert.quotient.clone(),
        d.dst.clone(),
        table,
    ))
}

#[derive(Debug, Clone)]
pub struct DiagramArrow {
    pub src: usize,
    pub dst: usize,
    pub map: FinMap,
}

#[derive(Debug, Clone)]
pub struct Colimit {
    pub apex: FinSet,
    pub cocone: Vec<FinMap>,
}

/// Colimit of a finite diagram as the coequalizer of
/// `∐ (arrow sources) ⇉ ∐ objects`.
pub fn colimit_of_diagram(
    objects: &[FinSet],
    arrows: &[DiagramArrow],
) -> Result<Colimit, FinError> {
    for (k, a) in arrows.iter().enumerate() {
        if a.src >= objects.len() || a.dst >= objects.len() {
            return Err(FinError::DanglingArrow(k));
        }
        if *a.map.src() != objects[a.src] || *a.map.dst() != objects[a.dst] {
            return Err(FinError::DanglingArrow(k));
        }
    }
    let objs = coproduct(objects);
    let sources = coproduct(&arrows.iter().map(|a| a.map.src.clone()).collect::<Vec<_>>());
    let mut left = Vec::with_capacity(sources.apex.len());
    let mut right = Vec::with_capacity(sources.apex.len());
    for a in arrows {
        for (x, &y) in a.map.table.iter().enumerate() {
            left.push(objs.offset(a.src) + x);
            right.push(objs.offset(a.dst) + y);
        }
    }
    let g1 = FinMap::from_table_unchecked(sources.apex.clone(), objs.apex.clone(), left);
    let g2 = FinMap::from_table_unchecked(sources.apex, objs.apex.clone(), right);
    let cq = coequalizer(&g1, &g2)?;
    let cocone = objs
        .injections
        .iter()
        .map(|inj| compose(&cq.proj, inj))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Colimit {
        apex: cq.quotient,
        cocone,
    })
}

/// Every map `src → dst`, in lexicographic order of tables.
pub fn all_maps(src: &FinSet, dst: &FinSet) -> AllMaps {
    let done = !src.is_empty() && dst.is_empty();
    AllMaps {
        src: src.clone(),
        dst: dst.clone(),
        next: (!done).then(|| vec![0; src.len()]),
    }
}

pub struct AllMaps {
    src: FinSet,
    dst: FinSet,
    next: Option<Vec<usize>>,
}

impl Iterator for AllMaps {
    type Item = FinMap;

    fn next(&mut self) -> Option<FinMap> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let n = self.dst.len();
        let mut k = succ.len();
        let mut carried = true;
        while carried && k > 0 {
            k -= 1;
            succ[k] += 1;
            if succ[k] == n {
                succ[k] = 0;
            } else {
                carried = false;
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(FinMap::from_table_unchecked(
            self.src.clone(),
            self.dst.clone(),
            cur,
        ))
    }
}

/// `|dst|^|src|`, saturating.
pub fn count_maps(src: usize, dst: usize) -> usize {
    (0..src).fold(1usize, |acc, _| acc.saturating_mul(dst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> FinSet {
        FinSet::range(n)
    }

    fn map(src: usize, dst: usize, t: &[usize]) -> FinMap {
        FinMap::from_table(set(src), set(dst), t.to_vec()).unwrap()
    }

    #[test]
    fn sets_are_canonical() {
        let a = FinSet::new([2, 0, 1]).unwrap();
        assert_eq!(a, set(3));
        assert_eq!(FinSet::new([1, 1]), Err(FinError::DuplicateAtom(1.into())));
    }

    #[test]
    fn compose_examples() {
        let id = FinMap::identity(&set(2));
        assert_eq!(compose(&id, &id).unwrap(), id);
        let f = map(2, 3, &[1, 2]);
        let g = FinMap::constant(&set(3), &set(1), 0);
        assert_eq!(
            compose(&g, &f).unwrap(),
            FinMap::constant(&set(2), &set(1), 0)
        );
        let swap = map(2, 2, &[1, 0]);
        // evaluate both entries: swap(swap(0)) = 0, swap(swap(1)) = 1
        assert_eq!(compose(&swap, &swap).unwrap().table(), &[0, 1]);
        assert_eq!(compose(&f, &f), Err(FinError::SrcDstMismatch));
    }

    #[test]
    fn product_examples() {
        let p = product(&terminal(), &set(2));
        assert_eq!(p.apex.len(), 2);
        assert!(p.proj2.is_bijective());
        assert_eq!(product(&set(2), &set(2)).apex.len(), 4);
        assert!(product(&FinSet::empty(), &set(3)).apex.is_empty());
    }

    #[test]
    fn terminal_examples() {
        assert_eq!(bang(&set(2)).table(), &[0, 0]);
        assert!(bang(&FinSet::empty()).table().is_empty());
        assert!(bang(&terminal()).is_identity());
        // uniqueness: exactly one map into {*}
        assert_eq!(all_maps(&set(2), &terminal()).count(), 1);
        assert_eq!(all_maps(&FinSet::empty(), &terminal()).count(), 1);
    }

    #[test]
    fn coproduct_examples() {
        let c = coproduct(&[set(1), set(1)]);
        assert_eq!(c.apex.len(), 2);
        assert_eq!(c.apex.atom(1).to_string(), "1·0");
        assert!(coproduct(&[]).apex.is_empty());
        let c = coproduct(&[set(2), set(3)]);
        assert_eq!(c.apex.len(), 5);
        assert_eq!(c.locate(3), (1, 1));
        let joint: Vec<usize> = c
            .injections
            .iter()
            .flat_map(|m| m.table().to_vec())
            .collect();
        assert_eq!(joint, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn pullback_examples() {
        let t = terminal();
        let pb = pullback(&bang(&set(2)), &bang(&set(2))).unwrap();
        assert_eq!(pb.apex.len(), 4);
        let id = FinMap::identity(&set(2));
        assert_eq!(pullback(&id, &id).unwrap().apex.len(), 2);

        let f = map(3, 2, &[0, 0, 1]);
        let g = map(2, 2, &[1, 0]);
        let pb = pullback(&f, &g).unwrap();
        // oracle: enumerate all pairs with f(a) = g(b)
        let mut expected = Vec::new();
        for a in 0..3 {
            for b in 0..2 {
                if f.at(a) == g.at(b) {
                    expected.push(Atom::pair(a.into(), b.into()));
                }
            }
        }
        assert_eq!(pb.apex.atoms(), expected.as_slice());
        assert_eq!(pb.apex.to_string(), "{(0,1), (1,1), (2,0)}");

        assert_eq!(
            pullback(&bang(&set(2)), &id).unwrap_err(),
            FinError::CodomainMismatch
        );
        let _ = t;
    }

    #[test]
    fn mediate_pullback_examples() {
        let f = map(3, 2, &[0, 0, 1]);
        let g = map(2, 2, &[1, 0]);
        let pb = pullback(&f, &g).unwrap();
        let t = mediate_pullback(&pb, &pb.proj1, &pb.proj2).unwrap();
        assert!(t.is_identity());

        let pb = pullback(&bang(&set(2)), &bang(&set(2))).unwrap();
        let u = FinMap::constant(&terminal(), &set(2), 0);
        let v = FinMap::constant(&terminal(), &set(2), 1);
        let t = mediate_pullback(&pb, &u, &v).unwrap();
        assert_eq!(pb.apex.atom(t.at(0)).to_string(), "(0,1)");

        let id = FinMap::identity(&set(2));
        let diag = pullback(&id, &id).unwrap();
        assert_eq!(
            mediate_pullback(&diag, &u, &v),
            Err(FinError::SquareNotCommuting(Atom::Star))
        );
    }

    #[test]
    fn coequalizer_examples() {
        let g = map(2, 3, &[0, 2]);
        let c = coequalizer(&g, &g).unwrap();
        assert_eq!(c.quotient, set(3));
        assert!(c.proj.is_bijective());

        let c = coequalizer(&map(2, 3, &[0, 1]), &map(2, 3, &[1, 2])).unwrap();
        assert_eq!(c.quotient.len(), 1);

        let e = FinMap::from_table(FinSet::empty(), set(3), vec![]).unwrap();
        assert_eq!(coequalizer(&e, &e).unwrap().quotient, set(3));

        assert_eq!(
            coequalizer(&map(2, 3, &[0, 1]), &map(2, 2, &[0, 1])).unwrap_err(),
            FinError::ShapeMismatch
        );
    }

    #[test]
    fn mediate_coequalizer_examples() {
        let c = coequalizer(&map(1, 3, &[0]), &map(1, 3, &[1])).unwrap();
        assert!(mediate_coequalizer(&c, &c.proj).unwrap().is_identity());
        let k = FinMap::constant(&set(3), &set(4), 2);
        let m = mediate_coequalizer(&c, &k).unwrap();
        assert!(m.table().iter().all(|&j| j == 2));
        let d = FinMap::identity(&set(3));
        assert!(matches!(
            mediate_coequalizer(&c, &d),
            Err(FinError::NotCoequalized(_, _))
        ));
    }

    #[test]
    fn predicate_examples() {
        let p = morphism_predicates(&map(2, 2, &[1, 0]));
        assert!(p.mono && p.epi && p.iso);
        // constant {0,1} → {0,1}: 0 and 1 collide, 1 is missed
        let p = morphism_predicates(&map(2, 2, &[0, 0]));
        assert!(!p.mono && !p.epi && !p.iso);
        let p = morphism_predicates(&map(1, 2, &[0]));
        assert!(p.mono && !p.epi && !p.iso);
    }

    #[test]
    fn colimit_examples() {
        let c = colimit_of_diagram(&[set(3)], &[]).unwrap();
        assert_eq!(c.apex.len(), 3);
        assert!(c.cocone[0].is_bijective());

        let c = colimit_of_diagram(&[set(2), set(1)], &[]).unwrap();
        assert_eq!(c.apex.len(), 3);

        let id = FinMap::identity(&set(1));
        let arrows = [
            DiagramArrow {
                src: 2,
                dst: 0,
                map: id.clone(),
            },
            DiagramArrow {
                src: 2,
                dst: 1,
                map: id,
            },
        ];
        let c = colimit_of_diagram(&[set(1), set(1), set(1)], &arrows).unwrap();
        assert_eq!(c.apex.len(), 1);

        let bad = [DiagramArrow {
            src: 0,
            dst: 5,
            map: FinMap::identity(&set(1)),
        }];
        assert_eq!(
            colimit_of_diagram(&[set(1)], &bad).unwrap_err(),
            FinError::DanglingArrow(0)
        );
    }

    #[test]
    fn all_maps_counts() {
        assert_eq!(all_maps(&set(3), &set(2)).count(), 8);
        assert_eq!(all_maps(&set(0), &set(0)).count(), 1);
        assert_eq!(all_maps(&set(2), &set(0)).count(), 0);
        assert_eq!(count_maps(3, 2), 8);
    }
}
