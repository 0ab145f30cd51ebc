//! Relation types, nested values and databases.
//!
//! Atoms and relation types are interned for the lifetime of the process, so
//! both are `Copy` and compare by pointer. Relations are immutable and always
//! held in canonical form: tuples sorted by the total value order, without
//! duplicates, at every nesting level. A relation of arity `k` stores its tuples
//! as one flat row-major buffer of `k * len` values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid atom symbol `{0}`: atoms are non-empty strings over [A-Za-z0-9_]")]
    InvalidAtom(String),
    #[error("tuple type must have at least one component")]
    EmptyTupleType,
    #[error("expected a value of type {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("tuple of arity {found} in a relation of arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("type 0 has no relations; a relation type is required")]
    AtomTypeNotRelation,
    #[error("the domain must be non-empty")]
    EmptyDomain,
    #[error("atom `{atom}` in relation `{relation}` is not in the domain")]
    AtomOutsideDomain { relation: String, atom: String },
    #[error("relation `{0}` has the atom type 0")]
    AtomTypedRelation(String),
    #[error("invalid relation name `{0}`")]
    InvalidName(String),
    #[error("relation count 2^{0} is too large to represent")]
    CountOverflow(BigUint),
}

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

fn atom_table() -> &'static Mutex<HashSet<&'static String>> {
    static TABLE: OnceLock<Mutex<HashSet<&'static String>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

/// An uninterpreted domain element.
#[derive(Clone, Copy)]
pub struct Atom(&'static String);

impl Atom {
    pub fn new(symbol: &str) -> Result<Atom, ModelError> {
        if !is_symbol(symbol) {
            return Err(ModelError::InvalidAtom(symbol.to_string()));
        }
        let mut table = atom_table().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(interned) = table.get(&symbol.to_string()) {
            return Ok(Atom(interned));
        }
        let interned: &'static String = Box::leak(Box::new(symbol.to_string()));
        table.insert(interned);
        Ok(Atom(interned))
    }

    pub fn as_str(&self) -> &'static str {
        self.0.as_str()
    }
}

pub(crate) fn is_symbol(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for Atom {}

impl Hash for Atom {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        if std::ptr::eq(self.0, other.0) {
            Ordering::Equal
        } else {
            self.0.as_str().cmp(other.0.as_str())
        }
    }
}
impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

// ---------------------------------------------------------------------------
// Relation types
// ---------------------------------------------------------------------------

#[derive(PartialEq, Eq, Hash)]
enum TypeNode {
    Atom,
    Tuple(Box<[RelationType]>),
}

fn type_table() -> &'static Mutex<HashMap<&'static TypeNode, ()>> {
    static TABLE: OnceLock<Mutex<HashMap<&'static TypeNode, ()>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

fn intern_type(node: TypeNode) -> RelationType {
    let mut table = type_table().lock().unwrap_or_else(|e| e.into_inner());
    if let Some((interned, _)) = table.get_key_value(&node) {
        return RelationType(interned);
    }
    let interned: &'static TypeNode = Box::leak(Box::new(node));
    table.insert(interned, ());
    RelationType(interned)
}

/// Either the atom type `0` or a tuple type `(t1,...,tk)` with `k >= 1`.
#[derive(Clone, Copy)]
pub struct RelationType(&'static TypeNode);

impl RelationType {
    pub fn atom() -> RelationType {
        static ATOM: OnceLock<RelationType> = OnceLock::new();
        *ATOM.get_or_init(|| intern_type(TypeNode::Atom))
    }

    pub fn tuple(components: Vec<RelationType>) -> Result<RelationType, ModelError> {
        if components.is_empty() {
            return Err(ModelError::EmptyTupleType);
        }
        Ok(intern_type(TypeNode::Tuple(components.into_boxed_slice())))
    }

    /// The flat type `(0,...,0)` of the given arity.
    pub fn flat(arity: usize) -> Result<RelationType, ModelError> {
        RelationType::tuple(vec![RelationType::atom(); arity])
    }

    pub fn is_atom(&self) -> bool {
        matches!(self.0, TypeNode::Atom)
    }

    /// Tuple components, or `None` for the atom type.
    pub fn components(&self) -> Option<&'static [RelationType]> {
        match self.0 {
            TypeNode::Atom => None,
            TypeNode::Tuple(c) => Some(c),
        }
    }

    /// Tuple arity; 0 for the atom type.
    pub fn arity(&self) -> usize {
        self.components().map_or(0, <[_]>::len)
    }

    pub fn component(&self, index: usize) -> Option<RelationType> {
        self.components().and_then(|c| c.get(index).copied())
    }

    pub fn is_flat(&self) -> bool {
        self.components()
            .is_some_and(|c| c.iter().all(RelationType::is_atom))
    }

    /// Nesting depth: 0 for atoms, 1 for flat types.
    pub fn depth(&self) -> usize {
        match self.components() {
            None => 0,
            Some(c) => 1 + c.iter().map(RelationType::depth).max().unwrap_or(0),
        }
    }

    /// The type `(self ++ other)` of a cartesian product.
    pub fn concat(&self, other: &RelationType) -> Result<RelationType, ModelError> {
        let (a, b) = match (self.components(), other.components()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(ModelError::AtomTypeNotRelation),
        };
        RelationType::tuple(a.iter().chain(b).copied().collect())
    }
}

impl PartialEq for RelationType {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}
impl Eq for RelationType {}

impl Hash for RelationType {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const TypeNode as usize).hash(state)
    }
}

impl Ord for RelationType {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (self.components(), other.components()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp(b),
        }
    }
}
impl PartialOrd for RelationType {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.components() {
            None => f.write_str("0"),
            Some(c) => {
                f.write_str("(")?;
                for (i, t) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}
impl fmt::Debug for RelationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

/// An atom or a canonical nested relation.
///
/// The derived order is the total value order: atoms by symbol, relations by
/// their canonically sorted tuple lists, tuples componentwise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Atom(Atom),
    Relation(Relation),
}

impl Value {
    pub fn atom(symbol: &str) -> Result<Value, ModelError> {
        Atom::new(symbol).map(Value::Atom)
    }

    pub fn ty(&self) -> RelationType {
        match self {
            Value::Atom(_) => RelationType::atom(),
            Value::Relation(r) => r.ty(),
        }
    }

    /// Space units: 1 per atom occurrence plus 1 per tuple, recursively.
    pub fn size(&self) -> u64 {
        match self {
            Value::Atom(_) => 1,
            Value::Relation(r) => r.size(),
        }
    }

    pub fn as_relation(&self) -> Option<&Relation> {
        match self {
            Value::Relation(r) => Some(r),
            Value::Atom(_) => None,
        }
    }

    pub fn as_atom(&self) -> Option<Atom> {
        match self {
            Value::Atom(a) => Some(*a),
            Value::Relation(_) => None,
        }
    }

    /// Applies an atom renaming at every nesting depth.
    pub fn map_atoms(&self, f: &impl Fn(Atom) -> Atom) -> Value {
        match self {
            Value::Atom(a) => Value::Atom(f(*a)),
            Value::Relation(r) => Value::Relation(r.map_atoms(f)),
        }
    }

    /// Calls `f` on every atom occurrence.
    pub fn for_each_atom(&self, f: &mut impl FnMut(Atom)) {
        match self {
            Value::Atom(a) => f(*a),
            Value::Relation(r) => r.values().iter().for_each(|v| v.for_each_atom(f)),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => write!(f, "{a}"),
            Value::Relation(r) => write!(f, "{r:?}"),
        }
    }
}

impl From<Relation> for Value {
    fn from(r: Relation) -> Self {
        Value::Relation(r)
    }
}

/// A canonical finite set of equal-typed tuples.
#[derive(Clone)]
pub struct Relation(Arc<RelationData>);

struct RelationData {
    ty: RelationType,
    size: u64,
    data: Box<[Value]>,
}

impl Relation {
    pub fn empty(ty: RelationType) -> Relation {
        debug_assert!(!ty.is_atom());
        Relation(Arc::new(RelationData {
            ty,
            size: 0,
            data: Box::new([]),
        }))
    }

    /// Builds a relation from checked rows, canonicalizing the tuple list.
    pub fn from_tuples(ty: RelationType, rows: Vec<Vec<Value>>) -> Result<Relation, ModelError> {
        let comps = ty.components().ok_or(ModelError::AtomTypeNotRelation)?;
        for row in &rows {
            if row.len() != comps.len() {
                return Err(ModelError::ArityMismatch {
                    expected: comps.len(),
                    found: row.len(),
                });
            }
            for (v, t) in row.iter().zip(comps) {
                if v.ty() != *t {
                    return Err(ModelError::TypeMismatch {
                        expected: t.to_string(),
                        found: v.ty().to_string(),
                    });
                }
            }
        }
        Ok(Relation::from_flat(ty, rows.into_iter().flatten().collect()))
    }

    /// Canonicalizes a row-major buffer whose components are already typed.
    pub(crate) fn from_flat(ty: RelationType, flat: Vec<Value>) -> Relation {
        let arity = ty.arity();
        debug_assert!(arity > 0 && flat.len().is_multiple_of(arity));
        let rows = flat.len() / arity;
        let sorted = (1..rows).all(|i| flat[(i - 1) * arity..i * arity] < flat[i * arity..(i + 1) * arity]);
        if sorted {
            return Relation::from_sorted(ty, flat);
        }
        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_unstable_by(|&a, &b| flat[a * arity..(a + 1) * arity].cmp(&flat[b * arity..(b + 1) * arity]));
        order.dedup_by(|a, b| flat[*a * arity..(*a + 1) * arity] == flat[*b * arity..(*b + 1) * arity]);
        let mut out = Vec::with_capacity(order.len() * arity);
        for r in order {
            out.extend_from_slice(&flat[r * arity..(r + 1) * arity]);
        }
        Relation::from_sorted(ty, out)
    }

    /// Wraps a buffer that is already strictly ascending by tuple.
    pub(crate) fn from_sorted(ty: RelationType, flat: Vec<Value>) -> Relation {
        let arity = ty.arity();
        debug_assert!(flat.len().is_multiple_of(arity));
        debug_assert!(flat
            .chunks_exact(arity)
            .zip(flat.chunks_exact(arity).skip(1))
            .all(|(a, b)| a < b));
        let size = (flat.len() / arity) as u64 + flat.iter().map(Value::size).sum::<u64>();
        Relation(Arc::new(RelationData {
            ty,
            size,
            data: flat.into_boxed_slice(),
        }))
    }

    pub fn ty(&self) -> RelationType {
        self.0.ty
    }

    pub fn arity(&self) -> usize {
        self.0.ty.arity()
    }

    pub fn len(&self) -> usize {
        self.0.data.len() / self.arity()
    }

    pub fn is_empty(&self) -> bool {
        self.0.data.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    /// Tuples in canonical order.
    pub fn tuples(&self) -> std::slice::ChunksExact<'_, Value> {
        self.0.data.chunks_exact(self.arity())
    }

    pub fn tuple(&self, index: usize) -> &[Value] {
        let k = self.arity();
        &self.0.data[index * k..(index + 1) * k]
    }

    /// The row-major value buffer.
    pub fn values(&self) -> &[Value] {
        &self.0.data
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        let k = self.arity();
        let data = self.values();
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match data[mid * k..(mid + 1) * k].cmp(tuple) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.tuples().all(|t| other.contains(t))
    }

    pub fn map_atoms(&self, f: &impl Fn(Atom) -> Atom) -> Relation {
        Relation::from_flat(self.ty(), self.values().iter().map(|v| v.map_atoms(f)).collect())
    }

    /// Converts back to an uncanonicalized raw value.
    pub fn to_raw(&self) -> RawValue {
        RawValue::Set(
            self.tuples()
                .map(|t| t.iter().map(Value::to_raw).collect())
                .collect(),
        )
    }
}

impl Value {
    pub fn to_raw(&self) -> RawValue {
        match self {
            Value::Atom(a) => RawValue::Atom(a.as_str().to_string()),
            Value::Relation(r) => r.to_raw(),
        }
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.ty() == other.ty() && self.values() == other.values())
    }
}
impl Eq for Relation {}

impl Hash for Relation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ty().hash(state);
        self.values().hash(state);
    }
}

impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        // With a common arity, comparing the row-major buffers is the same as
        // comparing the tuple lists lexicographically.
        self.values()
            .cmp(other.values())
            .then_with(|| self.ty().cmp(&other.ty()))
    }
}
impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.tuples().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("(")?;
            for (j, v) in t.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v:?}")?;
            }
            f.write_str(")")?;
        }
        f.write_str("}")
    }
}

/// An uncanonicalized value: tuples may repeat or appear in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawValue {
    Atom(String),
    Set(Vec<Vec<RawValue>>),
}

/// Produces the canonical representative of `raw` read at type `ty`.
pub fn canonicalize(raw: &RawValue, ty: RelationType) -> Result<Value, ModelError> {
    match (raw, ty.components()) {
        (RawValue::Atom(s), None) => Value::atom(s),
        (RawValue::Set(rows), Some(comps)) => {
            let mut flat = Vec::with_capacity(rows.len() * comps.len());
            for row in rows {
                if row.len() != comps.len() {
                    return Err(ModelError::ArityMismatch {
                        expected: comps.len(),
                        found: row.len(),
                    });
                }
                for (v, t) in row.iter().zip(comps) {
                    flat.push(canonicalize(v, *t)?);
                }
            }
            Ok(Value::Relation(Relation::from_flat(ty, flat)))
        }
        (RawValue::Atom(_), Some(_)) => Err(ModelError::TypeMismatch {
            expected: ty.to_string(),
            found: "0".into(),
        }),
        (RawValue::Set(_), None) => Err(ModelError::TypeMismatch {
            expected: "0".into(),
            found: "a relation".into(),
        }),
    }
}

/// Set equality of nested values of the same type.
pub fn deep_equal(a: &Value, b: &Value) -> Result<bool, ModelError> {
    if a.ty() != b.ty() {
        return Err(ModelError::TypeMismatch {
            expected: a.ty().to_string(),
            found: b.ty().to_string(),
        });
    }
    Ok(a == b)
}

// ---------------------------------------------------------------------------
// Counting and enumerating relations
// ---------------------------------------------------------------------------

/// Number of distinct tuples of relation type `ty` over `n` atoms.
pub fn tuple_universe_size(ty: RelationType, n: usize) -> Result<BigUint, ModelError> {
    let comps = ty.components().ok_or(ModelError::AtomTypeNotRelation)?;
    let mut total = BigUint::one();
    for c in comps {
        let factor = if c.is_atom() {
            BigUint::from(n)
        } else {
            count_relations(*c, n)?
        };
        total *= factor;
    }
    Ok(total)
}

/// `2^(number of possible tuples)`: the number of relations of type `ty` over
/// a domain of `n` atoms.
pub fn count_relations(ty: RelationType, n: usize) -> Result<BigUint, ModelError> {
    let exponent = tuple_universe_size(ty, n)?;
    // Past 2^32 bits the count no longer fits in memory.
    match exponent.to_u32() {
        Some(e) => Ok(BigUint::one() << e),
        None => Err(ModelError::CountOverflow(exponent)),
    }
}

/// All tuples of a relation type over a domain, in canonical order.
#[derive(Debug, Clone)]
pub struct TupleUniverse {
    ty: RelationType,
    rows: Vec<Value>,
}

impl TupleUniverse {
    /// Materializes the universe. Callers are expected to have checked its size.
    pub fn new(ty: RelationType, domain: &[Atom]) -> Result<TupleUniverse, ModelError> {
        let comps = ty.components().ok_or(ModelError::AtomTypeNotRelation)?;
        let mut sorted_domain = domain.to_vec();
        sorted_domain.sort();
        sorted_domain.dedup();
        let columns = comps
            .iter()
            .map(|c| {
                if c.is_atom() {
                    Ok(sorted_domain.iter().copied().map(Value::Atom).collect())
                } else {
                    // Subsets come out by counter, not in canonical order.
                    let mut all: Vec<Value> = enumerate_relations(*c, &sorted_domain)?
                        .map(Value::Relation)
                        .collect();
                    all.sort();
                    Ok(all)
                }
            })
            .collect::<Result<Vec<Vec<Value>>, ModelError>>()?;
        let mut rows = Vec::new();
        if columns.iter().all(|c| !c.is_empty()) {
            let mut idx = vec![0usize; columns.len()];
            loop {
                rows.extend(idx.iter().zip(&columns).map(|(&i, col)| col[i].clone()));
                // odometer, rightmost column fastest
                let mut pos = columns.len();
                loop {
                    if pos == 0 {
                        return Ok(TupleUniverse { ty, rows });
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < columns[pos].len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        Ok(TupleUniverse { ty, rows })
    }

    pub fn ty(&self) -> RelationType {
        self.ty
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.ty.arity()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn tuple(&self, index: usize) -> &[Value] {
        let k = self.ty.arity();
        &self.rows[index * k..(index + 1) * k]
    }

    /// The relation holding the tuples at the given ascending indices.
    pub fn subset(&self, indices: impl IntoIterator<Item = usize>) -> Relation {
        let mut flat = Vec::new();
        for i in indices {
            flat.extend_from_slice(self.tuple(i));
        }
        Relation::from_sorted(self.ty, flat)
    }

    /// The relation selected by the low `len()` bits of `mask`.
    pub fn subset_from_mask(&self, mask: u64) -> Relation {
        debug_assert!(self.len() <= 64);
        self.subset((0..self.len()).filter(|i| mask >> i & 1 == 1))
    }
}

/// Lazily yields every relation of type `ty` over `domain` exactly once.
///
/// Tuple `i` of the canonical universe corresponds to bit `i` of a binary
/// counter; the stream starts at the empty relation.
pub fn enumerate_relations(ty: RelationType, domain: &[Atom]) -> Result<RelationStream, ModelError> {
    let universe = TupleUniverse::new(ty, domain)?;
    let words = universe.len().div_ceil(64).max(1);
    Ok(RelationStream {
        universe,
        counter: vec![0; words],
        done: false,
    })
}

pub struct RelationStream {
    universe: TupleUniverse,
    counter: Vec<u64>,
    done: bool,
}

impl RelationStream {
    pub fn universe(&self) -> &TupleUniverse {
        &self.universe
    }
}

impl Iterator for RelationStream {
    type Item = Relation;

    fn next(&mut self) -> Option<Relation> {
        if self.done {
            return None;
        }
        let n = self.universe.len();
        let current = self
            .universe
            .subset((0..n).filter(|i| self.counter[i / 64] >> (i % 64) & 1 == 1));
        // increment; finished once bit n is reached
        let mut carry = true;
        for (w, word) in self.counter.iter_mut().enumerate() {
            if !carry {
                break;
            }
            let bits_here = n.saturating_sub(w * 64).min(64);
            if bits_here == 0 {
                break;
            }
            let limit_mask = if bits_here == 64 { u64::MAX } else { (1u64 << bits_here) - 1 };
            if *word == limit_mask {
                *word = 0;
            } else {
                *word += 1;
                carry = false;
            }
        }
        if carry {
            self.done = true;
        }
        Some(current)
    }
}

// ---------------------------------------------------------------------------
// Databases
// ---------------------------------------------------------------------------

/// A non-empty finite domain together with named relations.
#[derive(Clone, PartialEq, Eq)]
pub struct Database {
    domain: Vec<Atom>,
    relations: BTreeMap<String, Relation>,
}

impl Database {
    pub fn new(
        domain: impl IntoIterator<Item = Atom>,
        relations: impl IntoIterator<Item = (String, Relation)>,
    ) -> Result<Database, ModelError> {
        let mut domain: Vec<Atom> = domain.into_iter().collect();
        domain.sort();
        domain.dedup();
        if domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut map = BTreeMap::new();
        for (name, rel) in relations {
            if !is_name(&name) {
                return Err(ModelError::InvalidName(name));
            }
            let mut outside = None;
            rel.values().iter().for_each(|v| {
                v.for_each_atom(&mut |a| {
                    if outside.is_none() && domain.binary_search(&a).is_err() {
                        outside = Some(a);
                    }
                })
            });
            if let Some(a) = outside {
                return Err(ModelError::AtomOutsideDomain {
                    relation: name,
                    atom: a.to_string(),
                });
            }
            map.insert(name, rel);
        }
        Ok(Database {
            domain,
            relations: map,
        })
    }

    /// A database with the given domain and no relations.
    pub fn with_domain(domain: impl IntoIterator<Item = Atom>) -> Result<Database, ModelError> {
        Database::new(domain, std::iter::empty())
    }

    /// Domain atoms in canonical order.
    pub fn domain(&self) -> &[Atom] {
        &self.domain
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// A copy with one relation added or replaced.
    pub fn with_relation(&self, name: &str, rel: Relation) -> Result<Database, ModelError> {
        let mut rels: Vec<(String, Relation)> = self
            .relations
            .iter()
            .filter(|(k, _)| k.as_str() != name)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        rels.push((name.to_string(), rel));
        Database::new(self.domain.iter().copied(), rels)
    }

    /// Renames atoms everywhere; `f` should be a bijection on the domain.
    pub fn map_atoms(&self, f: &impl Fn(Atom) -> Atom) -> Result<Database, ModelError> {
        Database::new(
            self.domain.iter().map(|a| f(*a)),
            self.relations.iter().map(|(k, v)| (k.clone(), v.map_atoms(f))),
        )
    }

    pub fn size(&self) -> u64 {
        self.relations.values().map(Relation::size).sum()
    }
}

impl fmt::Debug for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Database")
            .field("domain", &self.domain)
            .field("relations", &self.relations)
            .finish()
    }
}

pub(crate) fn is_name(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Atoms `x1..xn`.
pub fn numbered_domain(n: usize) -> Vec<Atom> {
    (1..=n)
        .map(|i| Atom::new(&format!("x{i}")).expect("valid symbol"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn atoms(names: &[&str]) -> Vec<Atom> {
        names.iter().map(|s| Atom::new(s).unwrap()).collect()
    }

    fn ty(s: &str) -> RelationType {
        crate::parser::parse_type(s).unwrap()
    }

    fn raw_atoms(rows: &[&[&str]]) -> RawValue {
        RawValue::Set(
            rows.iter()
                .map(|r| r.iter().map(|a| RawValue::Atom(a.to_string())).collect())
                .collect(),
        )
    }

    #[test]
    fn canonicalize_dedups_and_sorts() {
        let v = canonicalize(&raw_atoms(&[&["b"], &["a"], &["a"]]), ty("(0)")).unwrap();
        assert_eq!(v, canonicalize(&raw_atoms(&[&["a"], &["b"]]), ty("(0)")).unwrap());
        let r = v.as_relation().unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.tuple(0)[0], Value::atom("a").unwrap());
    }

    #[test]
    fn canonicalize_empty() {
        let v = canonicalize(&RawValue::Set(vec![]), ty("(0,0)")).unwrap();
        assert!(v.as_relation().unwrap().is_empty());
    }

    #[test]
    fn canonicalize_sorts_nested_levels() {
        // {({(b),(a)})} -> {({(a),(b)})}
        let raw = RawValue::Set(vec![vec![raw_atoms(&[&["b"], &["a"]])]]);
        let v = canonicalize(&raw, ty("((0))")).unwrap();
        let inner = v.as_relation().unwrap().tuple(0)[0].clone();
        let expected = canonicalize(&raw_atoms(&[&["a"], &["b"]]), ty("(0)")).unwrap();
        assert_eq!(inner, expected);
    }

    #[test]
    fn canonicalize_rejects_heterogeneous_tuples() {
        let raw = RawValue::Set(vec![
            vec![RawValue::Atom("a".into())],
            vec![RawValue::Atom("a".into()), RawValue::Atom("b".into())],
        ]);
        assert!(matches!(
            canonicalize(&raw, ty("(0)")),
            Err(ModelError::ArityMismatch { .. })
        ));
        let raw = RawValue::Set(vec![vec![RawValue::Set(vec![])]]);
        assert!(matches!(
            canonicalize(&raw, ty("(0)")),
            Err(ModelError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn deep_equal_cases() {
        let ab = canonicalize(&raw_atoms(&[&["a"], &["b"]]), ty("(0)")).unwrap();
        let ba = canonicalize(&raw_atoms(&[&["b"], &["a"]]), ty("(0)")).unwrap();
        assert!(deep_equal(&ab, &ba).unwrap());

        let sa = RawValue::Set(vec![vec![raw_atoms(&[&["a"]])]]);
        let sb = RawValue::Set(vec![vec![raw_atoms(&[&["b"]])]]);
        let (sa, sb) = (canonicalize(&sa, ty("((0))")).unwrap(), canonicalize(&sb, ty("((0))")).unwrap());
        assert!(!deep_equal(&sa, &sb).unwrap());

        let e = Value::Relation(Relation::empty(ty("(0)")));
        assert!(deep_equal(&e, &e.clone()).unwrap());
        assert!(deep_equal(&e, &sa).is_err());
    }

    #[test]
    fn count_relations_examples() {
        assert_eq!(count_relations(ty("(0,0)"), 2).unwrap(), BigUint::from(16u32));
        assert_eq!(count_relations(ty("((0))"), 2).unwrap(), BigUint::from(16u32));
        assert_eq!(count_relations(ty("(0)"), 3).unwrap(), BigUint::from(8u32));
        assert_eq!(count_relations(RelationType::atom(), 3), Err(ModelError::AtomTypeNotRelation));
        assert!(matches!(
            count_relations(ty("((((0))))"), 3),
            Err(ModelError::CountOverflow(_))
        ));
    }

    #[test]
    fn enumerate_unary_over_two_atoms() {
        let all: Vec<Relation> = enumerate_relations(ty("(0)"), &atoms(&["a", "b"])).unwrap().collect();
        let shown: Vec<String> = all.iter().map(|r| format!("{r:?}")).collect();
        assert_eq!(shown, ["{}", "{(a)}", "{(b)}", "{(a),(b)}"]);
    }

    #[test]
    fn enumerate_binary_matches_count() {
        let all: Vec<Relation> = enumerate_relations(ty("(0,0)"), &atoms(&["a", "b"])).unwrap().collect();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn enumerate_nested_over_one_atom() {
        let all: Vec<Relation> = enumerate_relations(ty("((0))"), &atoms(&["a"])).unwrap().collect();
        let shown: Vec<String> = all.iter().map(|r| format!("{r:?}")).collect();
        assert_eq!(shown, ["{}", "{({})}", "{({(a)})}", "{({}),({(a)})}"]);
    }

    #[test]
    fn database_invariants() {
        assert_eq!(Database::with_domain(vec![]).unwrap_err(), ModelError::EmptyDomain);
        let r = canonicalize(&raw_atoms(&[&["a", "c"]]), ty("(0,0)")).unwrap();
        let err = Database::new(atoms(&["a", "b"]), [("R".to_string(), r.as_relation().unwrap().clone())]);
        assert!(matches!(err, Err(ModelError::AtomOutsideDomain { .. })));
    }

    #[test]
    fn type_properties() {
        assert!(ty("(0,0)").is_flat());
        assert!(!ty("((0))").is_flat());
        assert!(!RelationType::atom().is_flat());
        assert_eq!(ty("(0,(0,(0)))").depth(), 3);
        assert_eq!(RelationType::tuple(vec![]), Err(ModelError::EmptyTupleType));
        assert_eq!(ty("(0,(0))").to_string(), "(0,(0))");
    }

    pub(crate) fn arb_type(depth: u32) -> BoxedStrategy<RelationType> {
        let leaf = (1usize..=2).prop_map(|k| RelationType::flat(k).unwrap());
        leaf.prop_recursive(depth, 6, 2, |inner| {
            prop::collection::vec(prop_oneof![Just(RelationType::atom()), inner], 1..=2)
                .prop_map(|c| RelationType::tuple(c).unwrap())
        })
        .boxed()
    }

    fn arb_raw(ty: RelationType, n: usize) -> BoxedStrategy<RawValue> {
        match ty.components() {
            None => (0..n).prop_map(|i| RawValue::Atom(format!("a{i}"))).boxed(),
            Some(comps) => {
                let row: Vec<BoxedStrategy<RawValue>> = comps.iter().map(|c| arb_raw(*c, n)).collect();
                prop::collection::vec(row, 0..4).prop_map(RawValue::Set).boxed()
            }
        }
    }

    fn arb_typed_raw() -> impl Strategy<Value = (RelationType, RawValue)> {
        (arb_type(3), 1usize..=4).prop_flat_map(|(t, n)| arb_raw(t, n).prop_map(move |r| (t, r)))
    }

    fn arb_typed_triple() -> impl Strategy<Value = (RelationType, RawValue, RawValue, RawValue)> {
        (arb_type(3), 1usize..=4).prop_flat_map(|(t, n)| {
            (arb_raw(t, n), arb_raw(t, n), arb_raw(t, n)).prop_map(move |(a, b, c)| (t, a, b, c))
        })
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent((t, raw) in arb_typed_raw()) {
            let once = canonicalize(&raw, t).unwrap();
            let twice = canonicalize(&once.to_raw(), t).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(once.to_raw(), twice.to_raw());
        }

        #[test]
        fn equality_is_canonical_identity((t, a) in arb_typed_raw(), seed in any::<u64>()) {
            // shuffling the raw tuple order never changes the canonical value
            let va = canonicalize(&a, t).unwrap();
            let shuffled = match &a {
                RawValue::Set(rows) => {
                    let mut rows = rows.clone();
                    let len = rows.len();
                    if len > 1 { rows.rotate_left((seed as usize) % len); rows.push(rows[0].clone()); }
                    RawValue::Set(rows)
                }
                other => other.clone(),
            };
            let vb = canonicalize(&shuffled, t).unwrap();
            prop_assert!(deep_equal(&va, &vb).unwrap());
            prop_assert_eq!(va.to_raw(), vb.to_raw());
        }

        #[test]
        fn value_order_is_strict_total((t, a, b, c) in arb_typed_triple()) {
            let (a, b, c) = (canonicalize(&a, t).unwrap(), canonicalize(&b, t).unwrap(), canonicalize(&c, t).unwrap());
            prop_assert!(a.cmp(&a) == Ordering::Equal);
            prop_assert_eq!(a == b, a.cmp(&b) == Ordering::Equal);
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a < b && b < c { prop_assert!(a < c); }
            if a > b && b > c { prop_assert!(a > c); }
        }

        #[test]
        fn enumeration_matches_count(t in arb_type(2), n in 1usize..=3) {
            let count = count_relations(t, n);
            prop_assume!(matches!(&count, Ok(c) if *c <= BigUint::from(1u32 << 12)));
            let count = count.unwrap();
            let all: Vec<Relation> = enumerate_relations(t, &numbered_domain(n)).unwrap().collect();
            prop_assert_eq!(BigUint::from(all.len()), count);
            let distinct: HashSet<&Relation> = all.iter().collect();
            prop_assert_eq!(distinct.len(), all.len());
        }
    }
}
