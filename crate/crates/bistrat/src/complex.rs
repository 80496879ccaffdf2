//! Finite abstract simplicial complexes and their face posets.
//!
//! A [`Complex`] stores the face closure of a set of maximal simplices,
//! sorted lexicographically by vertex list, together with the covering
//! (codimension-1) relations of its face poset. Simplices are addressed by
//! their index in that sorted order, which makes every downstream structure
//! deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("no maximal simplices given")]
    EmptyInput,
    #[error("simplex has a repeated vertex: {0:?}")]
    DuplicateVertex(Vec<u32>),
    #[error("simplex has no vertices")]
    EmptySimplex,
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("simplex {0} is not in the mask")]
    NotInMask(Simplex),
    #[error("mask length {found} does not match complex size {expected}")]
    MaskSize { expected: usize, found: usize },
}

/// A simplex, keyed by its strictly increasing vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<u32>,
}

impl Simplex {
    /// Sorts the vertices and rejects empty or repeated input.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        let raw = vertices.clone();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::DuplicateVertex(raw));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// True iff `self` is a face of `other` (possibly equal).
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.vertices.len() > other.vertices.len() {
            return false;
        }
        let mut it = other.vertices.iter();
        self.vertices
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }
}

impl fmt::Display for Simplex {
    /// Comma-joined vertex list, e.g. `0,1,2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// A finite simplicial complex: the face closure of its maximal simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    simplices: Vec<Simplex>,
    index: HashMap<Vec<u32>, usize>,
    /// Covering relations (face, coface) with codimension exactly 1,
    /// sorted by index pair.
    covering: Vec<(usize, usize)>,
    covering_index: HashMap<(usize, usize), usize>,
    /// Covering cofaces per simplex, ascending.
    up: Vec<Vec<usize>>,
    /// Covering faces per simplex, ascending.
    down: Vec<Vec<usize>>,
}

impl Complex {
    /// The empty complex (dimension -1 by convention).
    pub fn empty() -> Self {
        Self {
            simplices: Vec::new(),
            index: HashMap::new(),
            covering: Vec::new(),
            covering_index: HashMap::new(),
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    /// Face closure of the given maximal simplices, deduplicated.
    pub fn build(maximal: &[Vec<u32>]) -> Result<Self, ComplexError> {
        if maximal.is_empty() {
            return Err(ComplexError::EmptyInput);
        }
        let mut closure: BTreeSet<Simplex> = BTreeSet::new();
        for verts in maximal {
            let top = Simplex::new(verts.clone())?;
            // every nonempty subset of the vertex set
            let n = top.vertices.len();
            for mask in 1u64..(1 << n) {
                let sub: Vec<u32> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| top.vertices[i])
                    .collect();
                closure.insert(Simplex { vertices: sub });
            }
        }
        let simplices: Vec<Simplex> = closure.into_iter().collect();
        let index: HashMap<Vec<u32>, usize> = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertices.clone(), i))
            .collect();
        let mut covering = Vec::new();
        let mut up = vec![Vec::new(); simplices.len()];
        let mut down = vec![Vec::new(); simplices.len()];
        for (ci, coface) in simplices.iter().enumerate() {
            if coface.vertices.len() == 1 {
                continue;
            }
            for drop in 0..coface.vertices.len() {
                let mut sub = coface.vertices.clone();
                sub.remove(drop);
                let fi = index[&sub];
                covering.push((fi, ci));
                up[fi].push(ci);
                down[ci].push(fi);
            }
        }
        covering.sort_unstable();
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }
        let covering_index = covering
            .iter()
            .enumerate()
            .map(|(k, &pair)| (pair, k))
            .collect();
        Ok(Self {
            simplices,
            index,
            covering,
            covering_index,
            up,
            down,
        })
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Dimension of the complex; -1 for the empty complex.
    pub fn dimension(&self) -> isize {
        self.simplices
            .iter()
            .map(|s| s.dimension() as isize)
            .max()
            .unwrap_or(-1)
    }

    /// All simplices in lexicographic order.
    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, idx: usize) -> &Simplex {
        &self.simplices[idx]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(&s.vertices).copied()
    }

    /// Covering relations (face, coface) of codimension 1, sorted.
    pub fn covering_relations(&self) -> &[(usize, usize)] {
        &self.covering
    }

    pub fn covering_index(&self, face: usize, coface: usize) -> Option<usize> {
        self.covering_index.get(&(face, coface)).copied()
    }

    /// Covering cofaces of a simplex, ascending.
    pub fn covering_cofaces(&self, idx: usize) -> &[usize] {
        &self.up[idx]
    }

    /// Covering faces of a simplex, ascending.
    pub fn covering_faces(&self, idx: usize) -> &[usize] {
        &self.down[idx]
    }

    /// True iff `face` is a strict face of `coface`.
    pub fn is_strict_face(&self, face: usize, coface: usize) -> bool {
        face != coface && self.simplices[face].is_face_of(&self.simplices[coface])
    }

    /// All strict face relations (sigma, tau) with sigma < tau, as index
    /// pairs in ascending order. This is the transitive closure of the
    /// covering relations.
    pub fn face_relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in 0..self.len() {
            for c in 0..self.len() {
                if self.is_strict_face(f, c) {
                    out.push((f, c));
                }
            }
        }
        out
    }

    /// Open star of `s` within `mask`: every masked simplex having `s` as a
    /// face, including `s` itself. Result ascending by index.
    pub fn open_star(&self, mask: &SubcomplexMask, s: usize) -> Result<Vec<usize>, ComplexError> {
        mask.check_len(self)?;
        if !mask.contains(s) {
            return Err(ComplexError::NotInMask(self.simplices[s].clone()));
        }
        Ok((0..self.len())
            .filter(|&t| mask.contains(t) && (t == s || self.is_strict_face(s, t)))
            .collect())
    }

    /// Connected components of `members` under face comparability restricted
    /// to `members` (two simplices are adjacent when one is a strict face of
    /// the other). Components are returned sorted, each sorted ascending.
    pub fn components_of(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut comps = Vec::new();
        for &start in &set {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = vec![start];
            let mut queue = vec![start];
            seen.insert(start);
            while let Some(x) = queue.pop() {
                for &y in &set {
                    if !seen.contains(&y)
                        && (self.is_strict_face(x, y) || self.is_strict_face(y, x))
                    {
                        seen.insert(y);
                        comp.push(y);
                        queue.push(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps.sort();
        comps
    }
}

/// A boolean membership mask over the simplices of a parent complex.
///
/// Masks are plain value types; they are not required to be face-closed in
/// general (differences of filtration levels are not), but the filtration
/// levels produced by the stratification sweep always are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcomplexMask {
    bits: Vec<bool>,
}

impl SubcomplexMask {
    pub fn full(c: &Complex) -> Self {
        Self {
            bits: vec![true; c.len()],
        }
    }

    pub fn empty(c: &Complex) -> Self {
        Self {
            bits: vec![false; c.len()],
        }
    }

    pub fn from_members(c: &Complex, members: &[usize]) -> Self {
        let mut m = Self::empty(c);
        for &i in members {
            m.bits[i] = true;
        }
        m
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits.get(idx).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, idx: usize) {
        self.bits[idx] = true;
    }

    pub fn remove(&mut self, idx: usize) {
        self.bits[idx] = false;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits.len() == other.bits.len()
            && self
                .bits
                .iter()
                .zip(&other.bits)
                .all(|(&a, &b)| !a || b)
    }

    /// True iff every face of every member is also a member.
    pub fn is_face_closed(&self, c: &Complex) -> bool {
        self.bits.len() == c.len()
            && (0..c.len()).all(|i| {
                !self.bits[i] || c.covering_faces(i).iter().all(|&f| self.bits[f])
            })
    }

    fn check_len(&self, c: &Complex) -> Result<(), ComplexError> {
        if self.bits.len() == c.len() {
            Ok(())
        } else {
            Err(ComplexError::MaskSize {
                expected: c.len(),
                found: self.bits.len(),
            })
        }
    }
}
