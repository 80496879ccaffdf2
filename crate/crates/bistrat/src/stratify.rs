//! The canonical stratification of a complex along a bisheaf.
//!
//! The construction runs top-down. First the set of *invertible relations*
//! is computed: all strict face relations whose derived restriction and
//! extension are both isomorphisms. Then, sweeping the dimension `d` from
//! the top down to zero, each level collects the simplices whose entire
//! remaining open star is invertible, adds the star relations emanating from
//! them to an accumulating set of *transport relations*, and merges the
//! endpoints of every new relation in a union-find. Every merged component
//! that contains a `d`-simplex of the current level becomes one `d`-stratum
//! and is removed before the next level runs.
//!
//! Undirected connectivity over transport relations is exactly isomorphism
//! in the localized face poset: each transport relation is invertible there
//! by construction, and conversely membership in a stratum forces a zigzag
//! of transport relations. The zigzag machinery in [`crate::localize`]
//! cross-checks this equivalence on small inputs.
//!
//! The sweep maintains an internal invariant: a component claimed at level
//! `d` never contains a simplex removed at an earlier level. Its failure is
//! reported as the distinct fatal error
//! [`StratifyError::ComponentContainsRemoved`] since it can only indicate an
//! implementation bug, never bad input.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::bisheaf::{Bisheaf, Violation};
use crate::complex::{Complex, SubcomplexMask};
use crate::union_find::UnionFind;

#[derive(Debug, Error)]
pub enum StratifyError {
    #[error("bisheaf fails validation with {} violation(s)", .0.len())]
    InvalidBisheaf(Vec<Violation>),
    #[error("mask at level {level} is not face-closed")]
    MaskNotFaceClosed { level: usize },
    #[error("stratifications are over different complexes")]
    ComplexMismatch,
    #[error("malformed stratification: {0}")]
    Malformed(String),
    #[error(
        "internal invariant violated at level {level}: component of simplex {kept} \
         contains previously removed simplex {removed}"
    )]
    ComponentContainsRemoved {
        level: usize,
        kept: usize,
        removed: usize,
    },
    #[error("internal invariant violated: frontier pair ({lower}, {upper}) is not graded")]
    UngradedFrontier { lower: usize, upper: usize },
}

/// What a set of face relations is playing the role of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelationRole {
    /// Relations carried to isomorphisms on both the sheaf and cosheaf side.
    Invertible,
    /// The accumulated transport relations of a sweep level.
    Transport(usize),
}

/// A set of strict face relations, stored as ascending index pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    role: RelationRole,
    pairs: BTreeSet<(usize, usize)>,
}

impl RelationSet {
    pub fn new(role: RelationRole, pairs: BTreeSet<(usize, usize)>) -> Self {
        Self { role, pairs }
    }

    pub fn empty(role: RelationRole) -> Self {
        Self {
            role,
            pairs: BTreeSet::new(),
        }
    }

    pub fn role(&self) -> RelationRole {
        self.role
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn contains(&self, face: usize, coface: usize) -> bool {
        self.pairs.contains(&(face, coface))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// True iff the set is closed under composition of face relations:
    /// (a <= b) and (b <= c) present implies (a <= c) present.
    pub fn is_composition_closed(&self) -> bool {
        self.pairs.iter().all(|&(a, b)| {
            self.pairs
                .iter()
                .filter(|&&(b2, _)| b2 == b)
                .all(|&(_, c)| self.pairs.contains(&(a, c)))
        })
    }
}

/// One stratum: a set of simplices with its assigned dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub dimension: usize,
    /// Member simplex indices, ascending.
    pub simplices: Vec<usize>,
}

/// A stratification: a filtration by subcomplex masks together with the
/// strata partitioning each successive difference, the per-simplex stratum
/// assignment, and the transitively closed frontier order on strata.
///
/// Strata are sorted by descending dimension, then by least member simplex;
/// their position is their id. The filtration holds one mask per level from
/// -1 up to the complex dimension (entry `i` is level `i - 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    complex: Arc<Complex>,
    filtration: Vec<SubcomplexMask>,
    strata: Vec<Stratum>,
    stratum_of: Vec<usize>,
    frontier: BTreeSet<(usize, usize)>,
}

impl Stratification {
    /// Assembles a stratification from labeled parts. Each part is a
    /// `(dimension, member indices)` pair; the parts must partition the
    /// complex and their labels must not exceed the complex dimension.
    ///
    /// Only structural consistency is enforced here. Whether the result
    /// satisfies the stratification axioms is the business of
    /// [`verify_stratification`], which reports breaches as data.
    pub fn from_parts(
        complex: &Arc<Complex>,
        parts: Vec<(usize, Vec<usize>)>,
    ) -> Result<Self, StratifyError> {
        let n = complex.len();
        let m = complex.dimension();
        let mut stratum_of = vec![usize::MAX; n];
        let mut strata: Vec<Stratum> = Vec::with_capacity(parts.len());
        for (dimension, mut simplices) in parts {
            if simplices.is_empty() {
                return Err(StratifyError::Malformed("empty stratum".into()));
            }
            if dimension as isize > m {
                return Err(StratifyError::Malformed(format!(
                    "stratum dimension {dimension} exceeds complex dimension {m}"
                )));
            }
            simplices.sort_unstable();
            simplices.dedup();
            strata.push(Stratum {
                dimension,
                simplices,
            });
        }
        strata.sort_by(|a, b| {
            b.dimension
                .cmp(&a.dimension)
                .then(a.simplices[0].cmp(&b.simplices[0]))
        });
        for (id, stratum) in strata.iter().enumerate() {
            for &s in &stratum.simplices {
                if s >= n {
                    return Err(StratifyError::Malformed(format!(
                        "simplex index {s} out of range"
                    )));
                }
                if stratum_of[s] != usize::MAX {
                    return Err(StratifyError::Malformed(format!(
                        "simplex {s} belongs to two strata"
                    )));
                }
                stratum_of[s] = id;
            }
        }
        if stratum_of.contains(&usize::MAX) {
            return Err(StratifyError::Malformed(
                "strata do not cover the complex".into(),
            ));
        }

        // level d mask is the union of all strata of dimension <= d
        let levels = (m + 2).max(1) as usize;
        let mut filtration = vec![SubcomplexMask::empty(complex); levels];
        for stratum in &strata {
            for level in (stratum.dimension as isize)..=m {
                for &s in &stratum.simplices {
                    filtration[(level + 1) as usize].insert(s);
                }
            }
        }

        // frontier: transitive closure of the generating relation
        let k = strata.len();
        let mut reach = vec![vec![false; k]; k];
        for (f, t) in complex.face_relations() {
            let (a, b) = (stratum_of[f], stratum_of[t]);
            if a != b {
                reach[a][b] = true;
            }
        }
        for mid in 0..k {
            for a in 0..k {
                if reach[a][mid] {
                    let via = reach[mid].clone();
                    for (b, &through) in via.iter().enumerate() {
                        if through {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        let frontier = (0..k)
            .flat_map(|a| (0..k).filter(move |&b| a != b).map(move |b| (a, b)))
            .filter(|&(a, b)| reach[a][b])
            .collect();

        Ok(Self {
            complex: Arc::clone(complex),
            filtration,
            strata,
            stratum_of,
            frontier,
        })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_of(&self, simplex: usize) -> usize {
        self.stratum_of[simplex]
    }

    /// Filtration masks; entry `i` is the level `i - 1` subcomplex.
    pub fn filtration(&self) -> &[SubcomplexMask] {
        &self.filtration
    }

    /// The mask at a given level, from -1 up to the complex dimension.
    pub fn mask_at_level(&self, level: isize) -> &SubcomplexMask {
        &self.filtration[(level + 1) as usize]
    }

    /// The frontier partial order as ordered stratum id pairs, transitively
    /// closed, reflexive pairs omitted.
    pub fn frontier(&self) -> &BTreeSet<(usize, usize)> {
        &self.frontier
    }

    /// Strata as comparable value sets, ignoring ids.
    pub fn strata_as_sets(&self) -> BTreeSet<(usize, Vec<usize>)> {
        self.strata
            .iter()
            .map(|s| (s.dimension, s.simplices.clone()))
            .collect()
    }

    /// Same strata with the same dimensions, over the same complex.
    pub fn same_strata(&self, other: &Self) -> bool {
        self.complex == other.complex && self.strata_as_sets() == other.strata_as_sets()
    }
}

/// The skeletal stratification: every simplex is its own stratum.
pub fn skeletal_stratification(complex: &Arc<Complex>) -> Stratification {
    let parts = (0..complex.len())
        .map(|s| (complex.simplex(s).dimension(), vec![s]))
        .collect();
    Stratification::from_parts(complex, parts).expect("singleton parts always partition")
}

fn invertible_flags(b: &Bisheaf, relations: &[(usize, usize)]) -> Vec<bool> {
    let check = |&(f, t): &(usize, usize)| -> bool {
        b.derived_restriction(f, t)
            .expect("face relation")
            .is_isomorphism()
            && b.derived_extension(f, t)
                .expect("face relation")
                .is_isomorphism()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        // coarse chunks: a single rank check is far cheaper than a task spawn
        relations.par_iter().with_min_len(32).map(check).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        relations.iter().map(check).collect()
    }
}

fn invertible_relations_unchecked(b: &Bisheaf) -> RelationSet {
    let relations = b.complex().face_relations();
    let flags = invertible_flags(b, &relations);
    let pairs = relations
        .into_iter()
        .zip(flags)
        .filter_map(|(rel, ok)| ok.then_some(rel))
        .collect();
    RelationSet::new(RelationRole::Invertible, pairs)
}

/// All strict face relations whose derived restriction and derived extension
/// are both isomorphisms. Requires a valid bisheaf (the derived maps are
/// only well-defined then).
pub fn invertible_relations(b: &Bisheaf) -> Result<RelationSet, StratifyError> {
    let violations = b.validate();
    if !violations.is_empty() {
        return Err(StratifyError::InvalidBisheaf(violations));
    }
    Ok(invertible_relations_unchecked(b))
}

/// The output of one sweep level.
#[derive(Debug, Clone)]
pub struct LevelRelations {
    /// Simplices of the mask whose entire open star within the mask is
    /// invertible, ascending.
    pub star_invertible: Vec<usize>,
    /// The previous transport relations plus all star relations emanating
    /// from the star-invertible simplices.
    pub transport: RelationSet,
}

/// Computes the star-invertible simplices of a face-closed mask and extends
/// the transport relations accordingly. `previous` is the transport set of
/// the level above (empty at the top level).
pub fn level_relations(
    c: &Complex,
    mask: &SubcomplexMask,
    invertible: &RelationSet,
    previous: &RelationSet,
    level: usize,
) -> Result<LevelRelations, StratifyError> {
    if !mask.is_face_closed(c) {
        return Err(StratifyError::MaskNotFaceClosed { level });
    }
    let members = mask.members();
    let star_invertible: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&s| {
            members
                .iter()
                .all(|&t| !c.is_strict_face(s, t) || invertible.contains(s, t))
        })
        .collect();
    let mut pairs = previous.pairs().clone();
    for &s in &star_invertible {
        for &t in &members {
            if c.is_strict_face(s, t) {
                pairs.insert((s, t));
            }
        }
    }
    Ok(LevelRelations {
        star_invertible,
        transport: RelationSet::new(RelationRole::Transport(level), pairs),
    })
}

/// Everything the sweep produces: the stratification plus the relation sets
/// it was built from, kept around for transport searches and cross-checks.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub stratification: Stratification,
    /// The invertible relations of the bisheaf.
    pub invertible: RelationSet,
    /// Transport relations per level; entry `d` is the set accumulated once
    /// level `d` has run. They grow as the level decreases.
    pub transport_levels: Vec<RelationSet>,
}

/// Runs the full top-down sweep. See the module documentation.
pub fn canonical_sweep(b: &Bisheaf) -> Result<Sweep, StratifyError> {
    let violations = b.validate();
    if !violations.is_empty() {
        return Err(StratifyError::InvalidBisheaf(violations));
    }
    let c = b.complex();
    let n = c.len();
    let m = c.dimension();
    let invertible = invertible_relations_unchecked(b);

    let mut uf = UnionFind::new(n);
    let mut mask = SubcomplexMask::full(c);
    let mut transport = RelationSet::empty(RelationRole::Transport(m.max(0) as usize));
    let mut transport_levels_rev: Vec<RelationSet> = Vec::new();
    let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();

    for level in (0..=m).rev() {
        let level = level as usize;
        let front = level_relations(c, &mask, &invertible, &transport, level)?;
        for &(a, b2) in front.transport.pairs().difference(transport.pairs()) {
            uf.union(a, b2);
        }
        transport = front.transport.clone();
        transport_levels_rev.push(front.transport);

        let members = mask.members();
        let claimed: BTreeSet<usize> = members
            .iter()
            .filter(|&&s| c.simplex(s).dimension() == level)
            .map(|&s| uf.find(s))
            .collect();
        for s in 0..n {
            if !mask.contains(s) && claimed.contains(&uf.find(s)) {
                let kept = members
                    .iter()
                    .copied()
                    .find(|&t| uf.find(t) == uf.find(s))
                    .unwrap_or(s);
                return Err(StratifyError::ComponentContainsRemoved {
                    level,
                    kept,
                    removed: s,
                });
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &s in &members {
            let root = uf.find(s);
            if claimed.contains(&root) {
                groups.entry(root).or_default().push(s);
            }
        }
        for (_, group) in groups {
            for &s in &group {
                mask.remove(s);
            }
            parts.push((level, group));
        }
    }
    if mask.count() != 0 {
        // every remaining vertex forms its own component at level 0, so a
        // nonempty residue can only be a bug
        let leftover = mask.members()[0];
        return Err(StratifyError::ComponentContainsRemoved {
            level: 0,
            kept: leftover,
            removed: leftover,
        });
    }

    let stratification = Stratification::from_parts(c, parts)?;
    for &(a, b2) in stratification.frontier() {
        let (da, db) = (
            stratification.strata[a].dimension,
            stratification.strata[b2].dimension,
        );
        if da >= db {
            return Err(StratifyError::UngradedFrontier {
                lower: a,
                upper: b2,
            });
        }
    }
    transport_levels_rev.reverse();
    Ok(Sweep {
        stratification,
        invertible,
        transport_levels: transport_levels_rev,
    })
}

/// The canonical stratification of the complex along the bisheaf: the
/// coarsest one satisfying the dimension, frontier and constructibility
/// axioms. Every other stratification refines it.
pub fn canonical_stratification(b: &Bisheaf) -> Result<Stratification, StratifyError> {
    canonical_sweep(b).map(|sweep| sweep.stratification)
}

/// A breached stratification axiom, reported as data.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxiomViolation {
    /// A filtration mask contains a simplex but misses one of its faces.
    MaskNotFaceClosed { level: isize, simplex: usize },
    /// A filtration mask contains a simplex of dimension above its level.
    MaskDimension { level: isize, simplex: usize },
    /// A stratum is not connected under face comparability.
    StratumNotConnected { stratum: usize },
    /// The strata of one dimension are not exactly the connected components
    /// of the corresponding filtration difference.
    StrataNotComponents { dimension: usize },
    /// The maximum simplex dimension in a stratum differs from its label.
    Dimension {
        stratum: usize,
        expected: usize,
        found: usize,
    },
    /// A frontier pair between distinct strata fails to increase dimension.
    Frontier { lower: usize, upper: usize },
    /// Two simplices of one stratum are related by a non-invertible relation.
    Constructibility { face: usize, coface: usize },
}

/// Checks a candidate stratification against all axioms the canonical one
/// satisfies by construction: face-closed filtration masks of bounded
/// dimension, strata equal to the connected components of the filtration
/// differences, exact dimension labels, a graded frontier order, and
/// invertibility of every in-stratum relation. Returns all breaches, sorted.
pub fn verify_stratification(
    b: &Bisheaf,
    s: &Stratification,
) -> Result<Vec<AxiomViolation>, StratifyError> {
    if **b.complex() != **s.complex() {
        return Err(StratifyError::ComplexMismatch);
    }
    let violations = b.validate();
    if !violations.is_empty() {
        return Err(StratifyError::InvalidBisheaf(violations));
    }
    let invertible = invertible_relations_unchecked(b);
    Ok(verify_with_invertible(b, &invertible, s))
}

/// Axiom checks against a precomputed invertible-relation set; used when the
/// same bisheaf is verified against many candidates.
pub(crate) fn verify_with_invertible(
    b: &Bisheaf,
    invertible: &RelationSet,
    s: &Stratification,
) -> Vec<AxiomViolation> {
    let c = b.complex();
    let m = c.dimension();
    let mut out = Vec::new();

    for level in -1..=m {
        let mask = s.mask_at_level(level);
        for &t in &mask.members() {
            if c.simplex(t).dimension() as isize > level {
                out.push(AxiomViolation::MaskDimension { level, simplex: t });
            }
            for &f in c.covering_faces(t) {
                if !mask.contains(f) {
                    out.push(AxiomViolation::MaskNotFaceClosed { level, simplex: t });
                    break;
                }
            }
        }
    }

    for d in 0..=m.max(0) as usize {
        let members: Vec<usize> = (0..c.len())
            .filter(|&i| s.strata[s.stratum_of(i)].dimension == d)
            .collect();
        if members.is_empty() {
            continue;
        }
        let components = c.components_of(&members);
        let strata_sets: Vec<&Vec<usize>> = s
            .strata
            .iter()
            .filter(|st| st.dimension == d)
            .map(|st| &st.simplices)
            .collect();
        if components.iter().collect::<BTreeSet<_>>()
            != strata_sets.iter().copied().collect::<BTreeSet<_>>()
        {
            out.push(AxiomViolation::StrataNotComponents { dimension: d });
            for (id, st) in s.strata.iter().enumerate() {
                if st.dimension == d && !components.contains(&st.simplices) {
                    let inside_one = components.iter().any(|comp| {
                        st.simplices.iter().all(|x| comp.contains(x))
                    });
                    if !inside_one {
                        out.push(AxiomViolation::StratumNotConnected { stratum: id });
                    }
                }
            }
        }
    }

    for (id, st) in s.strata.iter().enumerate() {
        let found = st
            .simplices
            .iter()
            .map(|&x| c.simplex(x).dimension())
            .max()
            .expect("strata are nonempty");
        if found != st.dimension {
            out.push(AxiomViolation::Dimension {
                stratum: id,
                expected: st.dimension,
                found,
            });
        }
    }

    for &(a, b2) in s.frontier() {
        if s.strata[a].dimension >= s.strata[b2].dimension {
            out.push(AxiomViolation::Frontier {
                lower: a,
                upper: b2,
            });
        }
    }

    for (f, t) in c.face_relations() {
        if s.stratum_of(f) == s.stratum_of(t) && !invertible.contains(f, t) {
            out.push(AxiomViolation::Constructibility { face: f, coface: t });
        }
    }

    out.sort();
    out.dedup();
    out
}

/// True iff every stratum of `fine` is contained in some stratum of
/// `coarse`. Both must live over the same complex.
pub fn refines(fine: &Stratification, coarse: &Stratification) -> Result<bool, StratifyError> {
    if **fine.complex() != **coarse.complex() {
        return Err(StratifyError::ComplexMismatch);
    }
    Ok(fine.strata.iter().all(|st| {
        let target = coarse.stratum_of(st.simplices[0]);
        st.simplices.iter().all(|&x| coarse.stratum_of(x) == target)
    }))
}
