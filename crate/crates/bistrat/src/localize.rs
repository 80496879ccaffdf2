//! Zigzag witnesses and transport along them.
//!
//! A morphism in the localized face poset is witnessed by an alternating
//! zigzag `sigma <= tau_0 >= sigma_0 <= ... <= tau` in which only relations
//! of the transport set (or equalities) may point backwards. Searching the
//! undirected graph of transport relations produces such a witness whenever
//! two simplices are isomorphic in the localization, which is how the
//! stratification sweep's union-find is cross-checked.
//!
//! Transporting a bisheaf along a witness composes the restriction maps
//! forwards and the inverses of backward ones (dually for extensions),
//! yielding a pair of isomorphisms that commute with the vertical maps.

use thiserror::Error;

use crate::bisheaf::Bisheaf;
use crate::complex::Complex;
use crate::field::FieldMatrix;
use crate::stratify::{RelationRole, RelationSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalizeError {
    #[error("simplex index {0} is out of range")]
    UnknownSimplex(usize),
    #[error("consecutive simplices {0} and {1} are not comparable")]
    NotComparable(usize, usize),
    #[error("backward relation ({0}, {1}) is outside the transport set")]
    BackwardOutsideSet(usize, usize),
    #[error("witness step ({face}, {coface}) is not invertible on both sides")]
    NonInvertibleStep { face: usize, coface: usize },
    #[error("loop endpoints differ: {0} vs {1}")]
    EndpointsDiffer(usize, usize),
    #[error("cannot concatenate: first witness ends at {0}, second starts at {1}")]
    ConcatMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The left simplex is a face of the right one (or they are equal).
    Forward,
    /// The right simplex is a face of the left one (or they are equal).
    Backward,
}

/// An alternating zigzag between two simplices, normalized so the step
/// directions run forward, backward, forward, ..., forward (equalities are
/// inserted where the underlying walk does not alternate). Backward steps
/// are guaranteed to lie in the relation set the witness was built against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZigzagWitness {
    simplices: Vec<usize>,
    directions: Vec<Direction>,
    role: RelationRole,
}

fn step_between(c: &Complex, a: usize, b: usize) -> Result<Option<Direction>, LocalizeError> {
    if a.max(b) >= c.len() {
        return Err(LocalizeError::UnknownSimplex(a.max(b)));
    }
    if a == b {
        Ok(None)
    } else if c.is_strict_face(a, b) {
        Ok(Some(Direction::Forward))
    } else if c.is_strict_face(b, a) {
        Ok(Some(Direction::Backward))
    } else {
        Err(LocalizeError::NotComparable(a, b))
    }
}

impl ZigzagWitness {
    /// The trivial witness at a simplex, representing its identity morphism.
    pub fn trivial(role: RelationRole, s: usize) -> Self {
        Self {
            simplices: vec![s, s],
            directions: vec![Direction::Forward],
            role,
        }
    }

    /// Normalizes a walk of comparable simplices into alternating form.
    /// Every strictly backward step must lie in `set`; forward steps may be
    /// arbitrary face relations.
    pub fn from_path(
        c: &Complex,
        set: &RelationSet,
        path: &[usize],
    ) -> Result<Self, LocalizeError> {
        let &start = path.first().expect("witness path must be nonempty");
        if start >= c.len() {
            return Err(LocalizeError::UnknownSimplex(start));
        }
        let mut strict: Vec<(usize, usize, Direction)> = Vec::new();
        for pair in path.windows(2) {
            match step_between(c, pair[0], pair[1])? {
                None => {}
                Some(Direction::Forward) => {
                    strict.push((pair[0], pair[1], Direction::Forward));
                }
                Some(Direction::Backward) => {
                    if !set.contains(pair[1], pair[0]) {
                        return Err(LocalizeError::BackwardOutsideSet(pair[1], pair[0]));
                    }
                    strict.push((pair[0], pair[1], Direction::Backward));
                }
            }
        }
        Ok(Self::normalize(start, &strict, set.role()))
    }

    /// Inserts equality steps so directions alternate, starting and ending
    /// forward. Equalities are identities, so transport is unaffected.
    fn normalize(start: usize, strict: &[(usize, usize, Direction)], role: RelationRole) -> Self {
        if strict.is_empty() {
            return Self::trivial(role, start);
        }
        let mut simplices = vec![start];
        let mut directions = Vec::new();
        let mut expected = Direction::Forward;
        for &(a, b, dir) in strict {
            if dir != expected {
                simplices.push(a);
                directions.push(expected);
            }
            simplices.push(b);
            directions.push(dir);
            expected = match dir {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            };
        }
        if directions.len() % 2 == 0 {
            let &last = simplices.last().unwrap();
            simplices.push(last);
            directions.push(Direction::Forward);
        }
        Self {
            simplices,
            directions,
            role,
        }
    }

    pub fn simplices(&self) -> &[usize] {
        &self.simplices
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn from(&self) -> usize {
        self.simplices[0]
    }

    pub fn to(&self) -> usize {
        *self.simplices.last().unwrap()
    }

    /// Which relation set the witness is valid against.
    pub fn role(&self) -> RelationRole {
        self.role
    }

    pub fn is_trivial(&self) -> bool {
        self.simplices.windows(2).all(|w| w[0] == w[1])
    }

    /// Concatenation: a witness from `self.from()` to `other.to()`,
    /// renormalized. The roles must refer to the same relation set.
    pub fn concat(&self, other: &Self) -> Result<Self, LocalizeError> {
        if self.to() != other.from() {
            return Err(LocalizeError::ConcatMismatch(self.to(), other.from()));
        }
        let mut strict: Vec<(usize, usize, Direction)> = Vec::new();
        for w in [self, other] {
            for (pair, &dir) in w.simplices.windows(2).zip(&w.directions) {
                if pair[0] != pair[1] {
                    strict.push((pair[0], pair[1], dir));
                }
            }
        }
        Ok(Self::normalize(self.from(), &strict, self.role))
    }

    /// Renders the witness like `0,1 <= 0,1,2 >= 1,2 <= 1,2`.
    pub fn describe(&self, c: &Complex) -> String {
        let mut out = c.simplex(self.simplices[0]).to_string();
        for (i, &dir) in self.directions.iter().enumerate() {
            let arrow = match dir {
                Direction::Forward => "<=",
                Direction::Backward => ">=",
            };
            out.push_str(&format!(" {arrow} {}", c.simplex(self.simplices[i + 1])));
        }
        out
    }
}

/// Stalk and costalk transport along a witness: `phi` maps the stalk of the
/// start to the stalk of the end, `psi` maps the costalk of the end back to
/// the costalk of the start. Both are invertible and fit into a commuting
/// square with the vertical maps at the endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transport {
    pub phi: FieldMatrix,
    pub psi: FieldMatrix,
}

/// A shortest witness connecting two simplices through the undirected graph
/// of the given relation set, or `None` when they sit in different
/// components. Ties are broken towards lexicographically smaller simplices,
/// so the result is deterministic.
pub fn find_zigzag(
    c: &Complex,
    set: &RelationSet,
    from: usize,
    to: usize,
) -> Result<Option<ZigzagWitness>, LocalizeError> {
    if from.max(to) >= c.len() {
        return Err(LocalizeError::UnknownSimplex(from.max(to)));
    }
    if from == to {
        return Ok(Some(ZigzagWitness::trivial(set.role(), from)));
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    for &(a, b) in set.pairs() {
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    let mut parent: Vec<Option<usize>> = vec![None; c.len()];
    let mut seen = vec![false; c.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in &adjacency[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    if !seen[to] {
        return Ok(None);
    }
    let mut path = vec![to];
    while let Some(prev) = parent[*path.last().unwrap()] {
        path.push(prev);
    }
    path.reverse();
    Ok(Some(ZigzagWitness::from_path(c, set, &path)?))
}

/// Composes the bisheaf maps along a witness. Every strict step must carry
/// invertible restriction and extension maps (backward steps are inverted).
pub fn transport(b: &Bisheaf, witness: &ZigzagWitness) -> Result<Transport, LocalizeError> {
    let p = b.modulus();
    let start = witness.from();
    let mut phi = FieldMatrix::identity(p, b.stalk_dim(start)).expect("prime modulus");
    let mut psi = FieldMatrix::identity(p, b.costalk_dim(start)).expect("prime modulus");
    for (pair, &dir) in witness.simplices.windows(2).zip(&witness.directions) {
        let (x, y) = (pair[0], pair[1]);
        if x == y {
            continue;
        }
        let (face, coface) = match dir {
            Direction::Forward => (x, y),
            Direction::Backward => (y, x),
        };
        let restriction = b
            .derived_restriction(face, coface)
            .map_err(|_| LocalizeError::NotComparable(x, y))?;
        let extension = b
            .derived_extension(face, coface)
            .map_err(|_| LocalizeError::NotComparable(x, y))?;
        if !restriction.is_isomorphism() || !extension.is_isomorphism() {
            return Err(LocalizeError::NonInvertibleStep { face, coface });
        }
        match dir {
            Direction::Forward => {
                phi = restriction.multiply(&phi).expect("chained shapes");
                psi = psi.multiply(&extension).expect("chained shapes");
            }
            Direction::Backward => {
                let r_inv = restriction.inverse().expect("checked invertible");
                let e_inv = extension.inverse().expect("checked invertible");
                phi = r_inv.multiply(&phi).expect("chained shapes");
                psi = psi.multiply(&e_inv).expect("chained shapes");
            }
        }
    }
    Ok(Transport { phi, psi })
}

/// Transport along a closed loop; `phi` is then an automorphism of the
/// stalk at the base simplex.
pub fn monodromy(b: &Bisheaf, witness: &ZigzagWitness) -> Result<Transport, LocalizeError> {
    if witness.from() != witness.to() {
        return Err(LocalizeError::EndpointsDiffer(witness.from(), witness.to()));
    }
    transport(b, witness)
}
