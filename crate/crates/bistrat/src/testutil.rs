//! Shared hand-built instances used across module tests.

use std::sync::Arc;

use crate::bisheaf::Bisheaf;
use crate::complex::{Complex, Simplex};
use crate::field::FieldMatrix;

pub(crate) fn idx(c: &Complex, v: &[u32]) -> usize {
    c.index_of(&Simplex::new(v.to_vec()).unwrap()).unwrap()
}

/// Path complex [[0,1],[1,2]] over GF(2): restriction({1} < {0,1}) is the
/// zero map, every other restriction and every extension is the identity,
/// and the verticals are the unique choice making the squares commute
/// (identity over {0} and {0,1}, zero elsewhere).
pub(crate) fn path_zero_restriction() -> Bisheaf {
    let c = Arc::new(Complex::build(&[vec![0, 1], vec![1, 2]]).unwrap());
    let p = 2;
    let id = FieldMatrix::identity(p, 1).unwrap();
    let zero = FieldMatrix::zeros(p, 1, 1).unwrap();
    let mut restrictions = Vec::new();
    for &(f, cf) in c.covering_relations() {
        if f == idx(&c, &[1]) && cf == idx(&c, &[0, 1]) {
            restrictions.push(zero.clone());
        } else {
            restrictions.push(id.clone());
        }
    }
    let extensions = vec![id.clone(); c.covering_relations().len()];
    let mut verticals = vec![zero; c.len()];
    verticals[idx(&c, &[0])] = id.clone();
    verticals[idx(&c, &[0, 1])] = id;
    Bisheaf::new(
        Arc::clone(&c),
        p,
        vec![1; c.len()],
        vec![1; c.len()],
        restrictions,
        extensions,
        verticals,
    )
    .unwrap()
}

/// Triangle closure with 2-dimensional stalks over GF(2). The restrictions
/// {0} < {0,1}, {1} < {0,1} and {0,1} < {0,1,2} are the swap matrix and all
/// other horizontal maps are identities; verticals are zero. Every derived
/// map is invertible.
pub(crate) fn swap_triangle() -> Bisheaf {
    let c = Arc::new(Complex::build(&[vec![0, 1, 2]]).unwrap());
    let p = 2;
    let id = FieldMatrix::identity(p, 2).unwrap();
    let swap = FieldMatrix::from_rows(p, &[vec![0, 1], vec![1, 0]]).unwrap();
    let swapped: Vec<(usize, usize)> = vec![
        (idx(&c, &[0]), idx(&c, &[0, 1])),
        (idx(&c, &[1]), idx(&c, &[0, 1])),
        (idx(&c, &[0, 1]), idx(&c, &[0, 1, 2])),
    ];
    let restrictions: Vec<FieldMatrix> = c
        .covering_relations()
        .iter()
        .map(|pair| {
            if swapped.contains(pair) {
                swap.clone()
            } else {
                id.clone()
            }
        })
        .collect();
    let extensions = vec![id; c.covering_relations().len()];
    let verticals = vec![FieldMatrix::zeros(p, 2, 2).unwrap(); c.len()];
    Bisheaf::new(
        Arc::clone(&c),
        p,
        vec![2; c.len()],
        vec![2; c.len()],
        restrictions,
        extensions,
        verticals,
    )
    .unwrap()
}

/// A rank-one local system on a triangulated circle over GF(3): the
/// restriction {0} < {0,1} is multiplication by 2, every other horizontal
/// map is the identity, verticals are zero. Going once around the circle
/// multiplies the stalk by 2.
pub(crate) fn circle_local_system() -> Bisheaf {
    let c = Arc::new(Complex::build(&[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap());
    let p = 3;
    let id = FieldMatrix::identity(p, 1).unwrap();
    let twist = FieldMatrix::from_rows(p, &[vec![2]]).unwrap();
    let restrictions: Vec<FieldMatrix> = c
        .covering_relations()
        .iter()
        .map(|&(f, cf)| {
            if f == idx(&c, &[0]) && cf == idx(&c, &[0, 1]) {
                twist.clone()
            } else {
                id.clone()
            }
        })
        .collect();
    let extensions = vec![id; c.covering_relations().len()];
    let verticals = vec![FieldMatrix::zeros(p, 1, 1).unwrap(); c.len()];
    Bisheaf::new(
        Arc::clone(&c),
        p,
        vec![1; c.len()],
        vec![1; c.len()],
        restrictions,
        extensions,
        verticals,
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert_eq!(path_zero_restriction().validate(), vec![]);
        assert_eq!(swap_triangle().validate(), vec![]);
        assert_eq!(circle_local_system().validate(), vec![]);
    }
}
