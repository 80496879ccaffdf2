//! Brute-force certification on tiny inputs.
//!
//! Enumerates every stratification of a small complex that satisfies the
//! axioms and checks two things against the sweep's output: the canonical
//! stratification appears in the enumeration, and every enumerated
//! stratification refines it. Partitions are generated as restricted growth
//! strings; each part's dimension label is forced to its maximum simplex
//! dimension, so only genuinely distinct candidates reach the validator.

use thiserror::Error;

use crate::bisheaf::Bisheaf;
use crate::stratify::{
    canonical_stratification, refines, verify_with_invertible, invertible_relations,
    Stratification, StratifyError,
};

pub const DEFAULT_LIMIT: usize = 8;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("complex has {size} simplices, above the enumeration limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Stratify(#[from] StratifyError),
}

/// Outcome of a certification run.
#[derive(Debug, Clone)]
pub struct OracleReport {
    /// Number of stratifications satisfying all axioms.
    pub valid_count: usize,
    /// The canonical stratification appeared among them.
    pub canonical_found: bool,
    /// Every valid stratification refines the canonical one.
    pub all_refine_canonical: bool,
    /// First valid stratification that fails to refine, if any.
    pub counterexample: Option<Stratification>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.canonical_found && self.all_refine_canonical
    }
}

/// All part assignments of `n` elements, as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, max_used: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for part in 0..=max_used + 1 {
            prefix.push(part);
            extend(prefix, max_used.max(part), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    extend(&mut vec![0], 0, n, &mut out);
    out
}

fn candidate(b: &Bisheaf, assignment: &[usize]) -> Option<Stratification> {
    let c = b.complex();
    let nparts = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); nparts];
    for (s, &part) in assignment.iter().enumerate() {
        parts[part].push(s);
    }
    // connectivity prunes most partitions before the full validator runs
    for part in &parts {
        if c.components_of(part).len() != 1 {
            return None;
        }
    }
    let labeled = parts
        .into_iter()
        .map(|members| {
            let dim = members
                .iter()
                .map(|&s| c.simplex(s).dimension())
                .max()
                .expect("parts are nonempty");
            (dim, members)
        })
        .collect();
    Stratification::from_parts(c, labeled).ok()
}

/// Every stratification of the complex that satisfies all axioms, in a
/// deterministic order. Refuses complexes larger than `limit`.
pub fn enumerate_stratifications(
    b: &Bisheaf,
    limit: usize,
) -> Result<Vec<Stratification>, OracleError> {
    let c = b.complex();
    if c.len() > limit {
        return Err(OracleError::TooLarge {
            size: c.len(),
            limit,
        });
    }
    let invertible = invertible_relations(b)?;
    let assignments = set_partitions(c.len());

    let keep = |assignment: &Vec<usize>| -> Option<Stratification> {
        let s = candidate(b, assignment)?;
        verify_with_invertible(b, &invertible, &s)
            .is_empty()
            .then_some(s)
    };

    #[cfg(feature = "parallel")]
    let valid: Vec<Stratification> = {
        use rayon::prelude::*;
        assignments
            .par_iter()
            .with_min_len(16)
            .filter_map(keep)
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let valid: Vec<Stratification> = assignments.iter().filter_map(keep).collect();

    Ok(valid)
}

/// Computes the canonical stratification, enumerates every valid one, and
/// checks that the canonical is present and refined by all of them.
pub fn certify_canonical(b: &Bisheaf, limit: usize) -> Result<OracleReport, OracleError> {
    let canonical = canonical_stratification(b)?;
    let valid = enumerate_stratifications(b, limit)?;
    let canonical_found = valid.iter().any(|s| s.same_strata(&canonical));
    let mut counterexample = None;
    for s in &valid {
        if !refines(s, &canonical)? {
            counterexample = Some(s.clone());
            break;
        }
    }
    Ok(OracleReport {
        valid_count: valid.len(),
        canonical_found,
        all_refine_canonical: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::stratify::skeletal_stratification;
    use crate::testutil::path_zero_restriction;
    use std::sync::Arc;

    #[test]
    fn partition_counts_are_bell_numbers() {
        assert_eq!(set_partitions(1).len(), 1);
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(5).len(), 52);
        assert_eq!(set_partitions(6).len(), 203);
    }

    #[test]
    fn single_vertex_has_one_stratification() {
        let c = Arc::new(Complex::build(&[vec![0]]).unwrap());
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        let all = enumerate_stratifications(&b, DEFAULT_LIMIT).unwrap();
        assert_eq!(all.len(), 1);
        let report = certify_canonical(&b, DEFAULT_LIMIT).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn constant_edge_enumeration() {
        let c = Arc::new(Complex::build(&[vec![0, 1]]).unwrap());
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        let all = enumerate_stratifications(&b, DEFAULT_LIMIT).unwrap();
        // skeletal, the whole complex, and the two vertex/edge pairings
        assert_eq!(all.len(), 4);
        let skeletal = skeletal_stratification(&c);
        assert!(all.iter().any(|s| s.same_strata(&skeletal)));
        assert!(all.iter().any(|s| s.strata().len() == 1));

        let report = certify_canonical(&b, DEFAULT_LIMIT).unwrap();
        assert!(report.passed());
        assert_eq!(report.valid_count, 4);
    }

    #[test]
    fn path_fixture_certifies() {
        let b = path_zero_restriction();
        let report = certify_canonical(&b, DEFAULT_LIMIT).unwrap();
        assert!(report.passed(), "{report:?}");
        let canonical = canonical_stratification(&b).unwrap();
        let all = enumerate_stratifications(&b, DEFAULT_LIMIT).unwrap();
        assert!(all.iter().any(|s| s.same_strata(&canonical)));
        // nothing valid is strictly coarser than the canonical one
        for s in &all {
            if refines(&canonical, s).unwrap() {
                assert!(s.same_strata(&canonical));
            }
        }
    }

    #[test]
    fn skeletal_is_always_enumerated() {
        let c = Arc::new(Complex::build(&[vec![0, 1], vec![1, 2]]).unwrap());
        for seed in 0..10 {
            let b = Bisheaf::random(&c, 2, 2, seed).unwrap();
            let all = enumerate_stratifications(&b, DEFAULT_LIMIT).unwrap();
            let skeletal = skeletal_stratification(&c);
            assert!(all.iter().any(|s| s.same_strata(&skeletal)), "seed {seed}");
        }
    }

    #[test]
    fn refuses_large_complexes() {
        let c = Arc::new(Complex::build(&[vec![0, 1, 2], vec![2, 3]]).unwrap());
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        assert!(matches!(
            enumerate_stratifications(&b, 6),
            Err(OracleError::TooLarge { size: 9, limit: 6 })
        ));
        assert!(certify_canonical(&b, 9).unwrap().passed());
    }
}
