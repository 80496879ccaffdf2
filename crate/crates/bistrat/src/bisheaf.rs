//! The bisheaf data model: a sheaf, a cosheaf, and vertical maps tying them
//! together.
//!
//! A bisheaf assigns to every simplex a stalk (sheaf side), a costalk
//! (cosheaf side) and a vertical map between them, and to every covering face
//! relation a restriction map (running up) and an extension map (running
//! down). Maps along longer face relations are derived by composing covering
//! maps; diamond functoriality makes the composite independent of the chosen
//! chain. For every face relation the square
//!
//! ```text
//!   stalk(face) --restriction--> stalk(coface)
//!        |                            |
//!     vertical                     vertical
//!        v                            v
//!   costalk(face) <--extension-- costalk(coface)
//! ```
//!
//! must commute. [`Bisheaf::validate`] reports every violated square and
//! every violated diamond as data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::{Complex, Simplex};
use crate::field::{is_prime, FieldMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BisheafError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("{what}: expected {expected} entries, found {found}")]
    WrongCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} at {at} has shape {found_rows}x{found_cols}, expected {rows}x{cols}")]
    ShapeMismatch {
        what: &'static str,
        at: String,
        rows: usize,
        cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("{what} at {at} is over GF({found}), expected GF({expected})")]
    ModulusMismatch {
        what: &'static str,
        at: String,
        expected: u64,
        found: u64,
    },
    #[error("{0} is not a face of {1}")]
    NotFaceRelation(Simplex, Simplex),
}

/// A violated bisheaf axiom, reported as data. Simplices are referenced by
/// index into the underlying complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The square over a covering relation does not commute:
    /// `extension * vertical(coface) * restriction != vertical(face)`.
    Square {
        face: usize,
        coface: usize,
        found: FieldMatrix,
        expected: FieldMatrix,
    },
    /// Two composite restrictions around a diamond disagree.
    RestrictionDiamond {
        bottom: usize,
        top: usize,
        via_low: usize,
        via_high: usize,
        through_low: FieldMatrix,
        through_high: FieldMatrix,
    },
    /// Two composite extensions around a diamond disagree.
    ExtensionDiamond {
        bottom: usize,
        top: usize,
        via_low: usize,
        via_high: usize,
        through_low: FieldMatrix,
        through_high: FieldMatrix,
    },
}

impl Violation {
    /// Sort key: relation endpoints first, then kind.
    fn key(&self) -> (usize, usize, u8) {
        match self {
            Violation::Square { face, coface, .. } => (*face, *coface, 0),
            Violation::RestrictionDiamond { bottom, top, .. } => (*bottom, *top, 1),
            Violation::ExtensionDiamond { bottom, top, .. } => (*bottom, *top, 2),
        }
    }

    pub fn describe(&self, c: &Complex) -> String {
        match self {
            Violation::Square {
                face,
                coface,
                found,
                expected,
            } => format!(
                "square at ({} < {}): extension*vertical*restriction = {found}, vertical(face) = {expected}",
                c.simplex(*face),
                c.simplex(*coface),
            ),
            Violation::RestrictionDiamond {
                bottom,
                top,
                via_low,
                via_high,
                through_low,
                through_high,
            } => format!(
                "restriction diamond at ({} < {}): via {} gives {through_low}, via {} gives {through_high}",
                c.simplex(*bottom),
                c.simplex(*top),
                c.simplex(*via_low),
                c.simplex(*via_high),
            ),
            Violation::ExtensionDiamond {
                bottom,
                top,
                via_low,
                via_high,
                through_low,
                through_high,
            } => format!(
                "extension diamond at ({} < {}): via {} gives {through_low}, via {} gives {through_high}",
                c.simplex(*bottom),
                c.simplex(*top),
                c.simplex(*via_low),
                c.simplex(*via_high),
            ),
        }
    }
}

/// A bisheaf of GF(p) vector spaces over a simplicial complex.
///
/// Stalk and costalk dimensions are independent; vertical maps need not be
/// square or invertible. Restriction and extension matrices are stored on
/// covering relations only, aligned with
/// [`Complex::covering_relations`]; longer relations are derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisheaf {
    complex: Arc<Complex>,
    p: u64,
    stalk_dims: Vec<usize>,
    costalk_dims: Vec<usize>,
    restrictions: Vec<FieldMatrix>,
    extensions: Vec<FieldMatrix>,
    verticals: Vec<FieldMatrix>,
}

impl Bisheaf {
    /// Assembles a bisheaf and checks completeness and matrix shapes.
    /// Algebraic laws (squares, diamonds) are checked by [`Self::validate`].
    pub fn new(
        complex: Arc<Complex>,
        p: u64,
        stalk_dims: Vec<usize>,
        costalk_dims: Vec<usize>,
        restrictions: Vec<FieldMatrix>,
        extensions: Vec<FieldMatrix>,
        verticals: Vec<FieldMatrix>,
    ) -> Result<Self, BisheafError> {
        if !is_prime(p) {
            return Err(BisheafError::NotPrime(p));
        }
        let n = complex.len();
        let ncov = complex.covering_relations().len();
        let counts = [
            ("stalk dimensions", stalk_dims.len(), n),
            ("costalk dimensions", costalk_dims.len(), n),
            ("vertical maps", verticals.len(), n),
            ("restriction maps", restrictions.len(), ncov),
            ("extension maps", extensions.len(), ncov),
        ];
        for (what, found, expected) in counts {
            if found != expected {
                return Err(BisheafError::WrongCount {
                    what,
                    expected,
                    found,
                });
            }
        }
        let check = |what: &'static str,
                     at: String,
                     m: &FieldMatrix,
                     rows: usize,
                     cols: usize|
         -> Result<(), BisheafError> {
            if m.modulus() != p {
                return Err(BisheafError::ModulusMismatch {
                    what,
                    at,
                    expected: p,
                    found: m.modulus(),
                });
            }
            if m.rows() != rows || m.cols() != cols {
                return Err(BisheafError::ShapeMismatch {
                    what,
                    at,
                    rows,
                    cols,
                    found_rows: m.rows(),
                    found_cols: m.cols(),
                });
            }
            Ok(())
        };
        for (i, v) in verticals.iter().enumerate() {
            check(
                "vertical",
                complex.simplex(i).to_string(),
                v,
                costalk_dims[i],
                stalk_dims[i],
            )?;
        }
        for (k, &(f, c)) in complex.covering_relations().iter().enumerate() {
            let at = format!("{} < {}", complex.simplex(f), complex.simplex(c));
            check(
                "restriction",
                at.clone(),
                &restrictions[k],
                stalk_dims[c],
                stalk_dims[f],
            )?;
            check(
                "extension",
                at,
                &extensions[k],
                costalk_dims[f],
                costalk_dims[c],
            )?;
        }
        Ok(Self {
            complex,
            p,
            stalk_dims,
            costalk_dims,
            restrictions,
            extensions,
            verticals,
        })
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn stalk_dim(&self, idx: usize) -> usize {
        self.stalk_dims[idx]
    }

    pub fn costalk_dim(&self, idx: usize) -> usize {
        self.costalk_dims[idx]
    }

    pub fn vertical(&self, idx: usize) -> &FieldMatrix {
        &self.verticals[idx]
    }

    /// Restriction matrix of a covering relation, by covering index.
    pub fn restriction(&self, covering_idx: usize) -> &FieldMatrix {
        &self.restrictions[covering_idx]
    }

    /// Extension matrix of a covering relation, by covering index.
    pub fn extension(&self, covering_idx: usize) -> &FieldMatrix {
        &self.extensions[covering_idx]
    }

    /// A saturated chain `face = x0 < x1 < ... < xk = coface` of covering
    /// steps, chosen deterministically (drop the largest extra vertex first).
    fn saturated_chain(&self, face: usize, coface: usize) -> Result<Vec<usize>, BisheafError> {
        let c = &self.complex;
        if face == coface {
            return Ok(vec![face]);
        }
        if !c.is_strict_face(face, coface) {
            return Err(BisheafError::NotFaceRelation(
                c.simplex(face).clone(),
                c.simplex(coface).clone(),
            ));
        }
        let target: Vec<u32> = c.simplex(face).vertices().to_vec();
        let mut chain = vec![coface];
        let mut current = c.simplex(coface).vertices().to_vec();
        while current != target {
            let &drop = current
                .iter()
                .rev()
                .find(|v| !target.contains(v))
                .expect("strict face leaves extra vertices");
            current.retain(|&v| v != drop);
            let idx = c
                .index_of(&Simplex::new(current.clone()).expect("chain simplex"))
                .expect("face closure contains every subset");
            chain.push(idx);
        }
        chain.reverse();
        Ok(chain)
    }

    /// Composite restriction along the relation `face <= coface`; the
    /// identity when the two coincide. Well-defined for valid bisheaves by
    /// diamond functoriality.
    pub fn derived_restriction(
        &self,
        face: usize,
        coface: usize,
    ) -> Result<FieldMatrix, BisheafError> {
        let chain = self.saturated_chain(face, coface)?;
        let mut acc = FieldMatrix::identity(self.p, self.stalk_dims[face]).expect("prime modulus");
        for step in chain.windows(2) {
            let k = self
                .complex
                .covering_index(step[0], step[1])
                .expect("chain steps are coverings");
            acc = self.restrictions[k]
                .multiply(&acc)
                .expect("shapes checked at construction");
        }
        Ok(acc)
    }

    /// Composite extension along `face <= coface`, mapping the costalk of
    /// the coface down to the costalk of the face.
    pub fn derived_extension(
        &self,
        face: usize,
        coface: usize,
    ) -> Result<FieldMatrix, BisheafError> {
        let chain = self.saturated_chain(face, coface)?;
        let mut acc =
            FieldMatrix::identity(self.p, self.costalk_dims[face]).expect("prime modulus");
        for step in chain.windows(2) {
            let k = self
                .complex
                .covering_index(step[0], step[1])
                .expect("chain steps are coverings");
            acc = acc
                .multiply(&self.extensions[k])
                .expect("shapes checked at construction");
        }
        Ok(acc)
    }

    /// Codimension-2 diamonds `(bottom, via_low, via_high, top)`.
    fn diamonds(&self) -> Vec<(usize, usize, usize, usize)> {
        let c = &self.complex;
        let mut out = Vec::new();
        for bottom in 0..c.len() {
            for top in 0..c.len() {
                if c.simplex(top).vertices().len() != c.simplex(bottom).vertices().len() + 2
                    || !c.is_strict_face(bottom, top)
                {
                    continue;
                }
                let extra: Vec<u32> = c
                    .simplex(top)
                    .vertices()
                    .iter()
                    .filter(|v| !c.simplex(bottom).vertices().contains(v))
                    .copied()
                    .collect();
                let with = |v: u32| {
                    let mut verts = c.simplex(bottom).vertices().to_vec();
                    verts.push(v);
                    c.index_of(&Simplex::new(verts).unwrap()).unwrap()
                };
                out.push((bottom, with(extra[0]), with(extra[1]), top));
            }
        }
        out
    }

    fn check_square(&self, covering_idx: usize) -> Option<Violation> {
        let (f, c) = self.complex.covering_relations()[covering_idx];
        let found = self.extensions[covering_idx]
            .multiply(&self.verticals[c])
            .and_then(|m| m.multiply(&self.restrictions[covering_idx]))
            .expect("shapes checked at construction");
        (found != self.verticals[f]).then(|| Violation::Square {
            face: f,
            coface: c,
            found,
            expected: self.verticals[f].clone(),
        })
    }

    fn check_diamond(&self, d: (usize, usize, usize, usize)) -> Vec<Violation> {
        let (bottom, via_low, via_high, top) = d;
        let cov = |f, c| self.complex.covering_index(f, c).unwrap();
        let mut out = Vec::new();
        let r_low = self.restrictions[cov(via_low, top)]
            .multiply(&self.restrictions[cov(bottom, via_low)])
            .expect("shapes checked at construction");
        let r_high = self.restrictions[cov(via_high, top)]
            .multiply(&self.restrictions[cov(bottom, via_high)])
            .expect("shapes checked at construction");
        if r_low != r_high {
            out.push(Violation::RestrictionDiamond {
                bottom,
                top,
                via_low,
                via_high,
                through_low: r_low,
                through_high: r_high,
            });
        }
        let e_low = self.extensions[cov(bottom, via_low)]
            .multiply(&self.extensions[cov(via_low, top)])
            .expect("shapes checked at construction");
        let e_high = self.extensions[cov(bottom, via_high)]
            .multiply(&self.extensions[cov(via_high, top)])
            .expect("shapes checked at construction");
        if e_low != e_high {
            out.push(Violation::ExtensionDiamond {
                bottom,
                top,
                via_low,
                via_high,
                through_low: e_low,
                through_high: e_high,
            });
        }
        out
    }

    /// Checks every commuting square and every diamond; returns the
    /// violations sorted by relation. Empty iff the bisheaf is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let ncov = self.complex.covering_relations().len();
        let diamonds = self.diamonds();

        #[cfg(feature = "parallel")]
        let mut out: Vec<Violation> = {
            use rayon::prelude::*;
            let squares: Vec<Violation> = (0..ncov)
                .into_par_iter()
                .with_min_len(32)
                .filter_map(|k| self.check_square(k))
                .collect();
            let diag: Vec<Violation> = diamonds
                .par_iter()
                .with_min_len(32)
                .flat_map_iter(|&d| self.check_diamond(d))
                .collect();
            squares.into_iter().chain(diag).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let mut out: Vec<Violation> = (0..ncov)
            .filter_map(|k| self.check_square(k))
            .chain(diamonds.iter().flat_map(|&d| self.check_diamond(d)))
            .collect();

        out.sort_by_key(Violation::key);
        out
    }

    /// The constant bisheaf: every stalk and costalk has dimension `n` and
    /// every map is the identity.
    pub fn constant(complex: &Arc<Complex>, p: u64, n: usize) -> Result<Self, BisheafError> {
        if !is_prime(p) {
            return Err(BisheafError::NotPrime(p));
        }
        let id = FieldMatrix::identity(p, n).expect("prime modulus");
        let ncov = complex.covering_relations().len();
        Self::new(
            Arc::clone(complex),
            p,
            vec![n; complex.len()],
            vec![n; complex.len()],
            vec![id.clone(); ncov],
            vec![id.clone(); ncov],
            vec![id; complex.len()],
        )
    }

    /// A pseudorandom bisheaf that is valid by construction and
    /// deterministic in `seed`. Stalk and costalk dimensions never exceed
    /// `max_dim`.
    ///
    /// The sheaf and cosheaf are built as direct sums of indicator pieces
    /// supported on upward-closed regions (open stars, the whole complex) or
    /// downward-closed regions (face closures); vertical maps get a random
    /// scalar per piece pair wherever the commuting squares allow one. The
    /// whole thing is then conjugated by a random isomorphism at every
    /// simplex, which scrambles the matrices without changing which derived
    /// maps are invertible.
    pub fn random(
        complex: &Arc<Complex>,
        p: u64,
        max_dim: usize,
        seed: u64,
    ) -> Result<Self, BisheafError> {
        if !is_prime(p) {
            return Err(BisheafError::NotPrime(p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = complex.len();
        if n == 0 {
            return Self::new(
                Arc::clone(complex),
                p,
                vec![],
                vec![],
                vec![],
                vec![],
                vec![],
            );
        }

        let random_piece = |rng: &mut ChaCha8Rng| -> Vec<bool> {
            match rng.random_range(0..3u8) {
                0 => vec![true; n],
                1 => {
                    // open star: upward closed
                    let s = rng.random_range(0..n);
                    (0..n)
                        .map(|t| t == s || complex.is_strict_face(s, t))
                        .collect()
                }
                _ => {
                    // face closure: downward closed
                    let s = rng.random_range(0..n);
                    (0..n)
                        .map(|t| t == s || complex.is_strict_face(t, s))
                        .collect()
                }
            }
        };

        let k_sheaf = rng.random_range(0..=max_dim);
        let k_cosheaf = rng.random_range(0..=max_dim);
        let sheaf_pieces: Vec<Vec<bool>> = (0..k_sheaf).map(|_| random_piece(&mut rng)).collect();
        let cosheaf_pieces: Vec<Vec<bool>> =
            (0..k_cosheaf).map(|_| random_piece(&mut rng)).collect();

        let stalk_dims: Vec<usize> = (0..n)
            .map(|s| sheaf_pieces.iter().filter(|piece| piece[s]).count())
            .collect();
        let costalk_dims: Vec<usize> = (0..n)
            .map(|s| cosheaf_pieces.iter().filter(|piece| piece[s]).count())
            .collect();

        // One scalar per (cosheaf piece, sheaf piece) pair. The squares force
        // the scalar to zero unless the joint support is upward closed.
        let vertical_scalar: Vec<Vec<u64>> = cosheaf_pieces
            .iter()
            .map(|bj| {
                sheaf_pieces
                    .iter()
                    .map(|ai| {
                        let upward_closed = (0..n).all(|s| {
                            !(ai[s] && bj[s])
                                || complex
                                    .covering_cofaces(s)
                                    .iter()
                                    .all(|&t| ai[t] && bj[t])
                        });
                        if upward_closed {
                            rng.random_range(0..p)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();

        // positions of the pieces alive at a simplex
        let live = |pieces: &[Vec<bool>], s: usize| -> Vec<usize> {
            (0..pieces.len()).filter(|&i| pieces[i][s]).collect()
        };

        let mut base_restrictions = Vec::new();
        let mut base_extensions = Vec::new();
        for &(f, c) in complex.covering_relations() {
            let rows = live(&sheaf_pieces, c);
            let cols = live(&sheaf_pieces, f);
            let mut r = vec![0i64; rows.len() * cols.len()];
            for (ri, &pi) in rows.iter().enumerate() {
                if let Some(ci) = cols.iter().position(|&pj| pj == pi) {
                    r[ri * cols.len() + ci] = 1;
                }
            }
            base_restrictions
                .push(FieldMatrix::from_entries(p, rows.len(), cols.len(), &r).unwrap());

            let rows = live(&cosheaf_pieces, f);
            let cols = live(&cosheaf_pieces, c);
            let mut e = vec![0i64; rows.len() * cols.len()];
            for (ri, &pi) in rows.iter().enumerate() {
                if let Some(ci) = cols.iter().position(|&pj| pj == pi) {
                    e[ri * cols.len() + ci] = 1;
                }
            }
            base_extensions
                .push(FieldMatrix::from_entries(p, rows.len(), cols.len(), &e).unwrap());
        }

        let mut base_verticals = Vec::new();
        for s in 0..n {
            let rows = live(&cosheaf_pieces, s);
            let cols = live(&sheaf_pieces, s);
            let mut v = vec![0i64; rows.len() * cols.len()];
            for (ri, &j) in rows.iter().enumerate() {
                for (ci, &i) in cols.iter().enumerate() {
                    v[ri * cols.len() + ci] = vertical_scalar[j][i] as i64;
                }
            }
            base_verticals.push(FieldMatrix::from_entries(p, rows.len(), cols.len(), &v).unwrap());
        }

        let random_invertible = |rng: &mut ChaCha8Rng, dim: usize| -> FieldMatrix {
            loop {
                let entries: Vec<i64> = (0..dim * dim)
                    .map(|_| rng.random_range(0..p) as i64)
                    .collect();
                let m = FieldMatrix::from_entries(p, dim, dim, &entries).unwrap();
                if m.is_isomorphism() {
                    return m;
                }
            }
        };

        let stalk_conj: Vec<FieldMatrix> = (0..n)
            .map(|s| random_invertible(&mut rng, stalk_dims[s]))
            .collect();
        let costalk_conj: Vec<FieldMatrix> = (0..n)
            .map(|s| random_invertible(&mut rng, costalk_dims[s]))
            .collect();

        let restrictions: Vec<FieldMatrix> = complex
            .covering_relations()
            .iter()
            .zip(&base_restrictions)
            .map(|(&(f, c), base)| {
                stalk_conj[c]
                    .multiply(base)
                    .and_then(|m| m.multiply(&stalk_conj[f].inverse().unwrap()))
                    .unwrap()
            })
            .collect();
        let extensions: Vec<FieldMatrix> = complex
            .covering_relations()
            .iter()
            .zip(&base_extensions)
            .map(|(&(f, c), base)| {
                costalk_conj[f]
                    .multiply(base)
                    .and_then(|m| m.multiply(&costalk_conj[c].inverse().unwrap()))
                    .unwrap()
            })
            .collect();
        let verticals: Vec<FieldMatrix> = (0..n)
            .map(|s| {
                costalk_conj[s]
                    .multiply(&base_verticals[s])
                    .and_then(|m| m.multiply(&stalk_conj[s].inverse().unwrap()))
                    .unwrap()
            })
            .collect();

        Self::new(
            Arc::clone(complex),
            p,
            stalk_dims,
            costalk_dims,
            restrictions,
            extensions,
            verticals,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Arc<Complex> {
        Arc::new(Complex::build(&[vec![0, 1, 2]]).unwrap())
    }

    fn path() -> Arc<Complex> {
        Arc::new(Complex::build(&[vec![0, 1], vec![1, 2]]).unwrap())
    }

    use crate::testutil::{idx, path_zero_restriction};

    #[test]
    fn constant_validates() {
        let c = triangle();
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        assert_eq!(b.validate(), vec![]);
        assert_eq!(c.len(), 7);
        assert!((0..c.len()).all(|i| b.stalk_dim(i) == 1));
    }

    #[test]
    fn zero_bisheaf_validates() {
        let b = Bisheaf::constant(&path(), 5, 0).unwrap();
        assert_eq!(b.validate(), vec![]);
    }

    #[test]
    fn constant_gf3_dim2() {
        let b = Bisheaf::constant(&path(), 3, 2).unwrap();
        assert_eq!(b.validate(), vec![]);
        let k = 0;
        assert!(b.restriction(k).is_identity());
        assert_eq!(b.restriction(k).modulus(), 3);
    }

    #[test]
    fn derived_identity_on_equal() {
        let c = triangle();
        let b = Bisheaf::constant(&c, 2, 3).unwrap();
        for i in 0..c.len() {
            assert!(b.derived_restriction(i, i).unwrap().is_identity());
            assert!(b.derived_extension(i, i).unwrap().is_identity());
        }
    }

    #[test]
    fn derived_constant_is_identity() {
        let c = triangle();
        let b = Bisheaf::constant(&c, 2, 2).unwrap();
        for (f, cf) in c.face_relations() {
            assert!(b.derived_restriction(f, cf).unwrap().is_identity());
            assert!(b.derived_extension(f, cf).unwrap().is_identity());
        }
    }

    #[test]
    fn derived_single_step() {
        let b = path_zero_restriction();
        let c = b.complex();
        let m = b
            .derived_restriction(idx(c, &[1]), idx(c, &[0, 1]))
            .unwrap();
        assert_eq!(m, FieldMatrix::zeros(2, 1, 1).unwrap());
    }

    #[test]
    fn derived_extension_composes_contravariantly() {
        // two-step chain {0} < {0,1} < {0,1,2} with extensions A, B
        // must compose to A * B
        let c = triangle();
        let p = 5;
        let a = FieldMatrix::from_rows(p, &[vec![1, 2], vec![0, 1]]).unwrap();
        let bmat = FieldMatrix::from_rows(p, &[vec![1, 0], vec![3, 1]]).unwrap();
        let id = FieldMatrix::identity(p, 2).unwrap();
        let mut extensions = Vec::new();
        for &(f, cf) in c.covering_relations() {
            if f == idx(&c, &[0]) && cf == idx(&c, &[0, 1]) {
                extensions.push(a.clone());
            } else if f == idx(&c, &[0, 1]) && cf == idx(&c, &[0, 1, 2]) {
                extensions.push(bmat.clone());
            } else {
                extensions.push(id.clone());
            }
        }
        let restrictions = vec![id.clone(); c.covering_relations().len()];
        let verticals = vec![FieldMatrix::zeros(p, 2, 2).unwrap(); c.len()];
        let b = Bisheaf::new(
            Arc::clone(&c),
            p,
            vec![2; c.len()],
            vec![2; c.len()],
            restrictions,
            extensions,
            verticals,
        )
        .unwrap();
        let got = b
            .derived_extension(idx(&c, &[0]), idx(&c, &[0, 1, 2]))
            .unwrap();
        assert_eq!(got, a.multiply(&bmat).unwrap());
    }

    #[test]
    fn validate_reports_broken_square() {
        let c = triangle();
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        let mut broken = b.clone();
        let target = c
            .covering_relations()
            .iter()
            .position(|&(f, cf)| f == idx(&c, &[0]) && cf == idx(&c, &[0, 1]))
            .unwrap();
        broken.extensions[target] = FieldMatrix::zeros(2, 1, 1).unwrap();
        let violations = broken.validate();
        let squares: Vec<&Violation> = violations
            .iter()
            .filter(|v| matches!(v, Violation::Square { .. }))
            .collect();
        assert_eq!(squares.len(), 1);
        assert!(matches!(
            squares[0],
            Violation::Square { face, coface, .. }
                if *face == idx(&c, &[0]) && *coface == idx(&c, &[0, 1])
        ));
    }

    #[test]
    fn validate_soundness_on_path() {
        // the path complex has no diamonds, so a single corrupted extension
        // yields exactly one violation: the square at that covering
        let c = path();
        let b = Bisheaf::constant(&c, 3, 1).unwrap();
        let mut broken = b.clone();
        broken.extensions[0] = FieldMatrix::zeros(3, 1, 1).unwrap();
        let violations = broken.validate();
        assert_eq!(violations.len(), 1);
        let (f, cf) = c.covering_relations()[0];
        assert!(matches!(
            &violations[0],
            Violation::Square { face, coface, .. } if *face == f && *coface == cf
        ));
    }

    #[test]
    fn validate_reports_diamond() {
        // 1-dimensional stalks; the two restriction paths from {0} to
        // {0,1,2} disagree (one goes through a zero map)
        let c = triangle();
        let p = 2;
        let id = FieldMatrix::identity(p, 1).unwrap();
        let mut restrictions = Vec::new();
        for &(f, cf) in c.covering_relations() {
            if f == idx(&c, &[0, 2]) && cf == idx(&c, &[0, 1, 2]) {
                restrictions.push(FieldMatrix::zeros(p, 1, 1).unwrap());
            } else {
                restrictions.push(id.clone());
            }
        }
        let extensions = vec![id; c.covering_relations().len()];
        let verticals = vec![FieldMatrix::zeros(p, 1, 1).unwrap(); c.len()];
        let b = Bisheaf::new(
            Arc::clone(&c),
            p,
            vec![1; c.len()],
            vec![1; c.len()],
            restrictions,
            extensions,
            verticals,
        )
        .unwrap();
        let violations = b.validate();
        let diamonds: Vec<&Violation> = violations
            .iter()
            .filter(|v| matches!(v, Violation::RestrictionDiamond { .. }))
            .collect();
        // the zero map breaks the diamonds under {0} and {2}
        assert!(!diamonds.is_empty());
        assert!(diamonds.iter().any(|v| matches!(
            v,
            Violation::RestrictionDiamond { bottom, top, .. }
                if *bottom == idx(&c, &[0]) && *top == idx(&c, &[0, 1, 2])
        )));
    }

    #[test]
    fn path_fixture_is_valid() {
        assert_eq!(path_zero_restriction().validate(), vec![]);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        let c = Arc::new(Complex::build(&[vec![0, 1, 2], vec![2, 3]]).unwrap());
        for seed in 0..20 {
            let a = Bisheaf::random(&c, 2, 3, seed).unwrap();
            let b = Bisheaf::random(&c, 2, 3, seed).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.validate(), vec![], "seed {seed}");
            assert!((0..c.len()).all(|i| a.stalk_dim(i) <= 3 && a.costalk_dim(i) <= 3));
        }
        for seed in 0..10 {
            let a = Bisheaf::random(&c, 3, 2, seed).unwrap();
            assert_eq!(a.validate(), vec![], "GF(3) seed {seed}");
        }
    }

    /// Every saturated chain between two comparable simplices composes to
    /// the same derived map (exhaustive over a solid tetrahedron).
    #[test]
    fn derived_maps_are_path_independent() {
        let c = Arc::new(Complex::build(&[vec![0, 1, 2, 3]]).unwrap());
        let b = Bisheaf::random(&c, 3, 3, 11).unwrap();
        assert_eq!(b.validate(), vec![]);

        fn chains(c: &Complex, from: usize, to: usize) -> Vec<Vec<usize>> {
            if from == to {
                return vec![vec![to]];
            }
            let mut out = Vec::new();
            for &mid in c.covering_cofaces(from) {
                if mid == to || c.is_strict_face(mid, to) {
                    for mut rest in chains(c, mid, to) {
                        rest.insert(0, from);
                        out.push(rest);
                    }
                }
            }
            out
        }

        for (f, t) in c.face_relations() {
            let all = chains(&c, f, t);
            assert!(!all.is_empty());
            let expected_r = b.derived_restriction(f, t).unwrap();
            let expected_e = b.derived_extension(f, t).unwrap();
            for chain in all {
                let mut r = FieldMatrix::identity(3, b.stalk_dim(f)).unwrap();
                let mut e = FieldMatrix::identity(3, b.costalk_dim(f)).unwrap();
                for step in chain.windows(2) {
                    let k = c.covering_index(step[0], step[1]).unwrap();
                    r = b.restriction(k).multiply(&r).unwrap();
                    e = e.multiply(b.extension(k)).unwrap();
                }
                assert_eq!(r, expected_r);
                assert_eq!(e, expected_e);
            }
        }
    }

    /// The covering-level squares propagate to every strict face relation.
    #[test]
    fn generalized_square_holds_on_derived_maps() {
        let c = Arc::new(Complex::build(&[vec![0, 1, 2], vec![2, 3], vec![4]]).unwrap());
        for seed in 0..10 {
            let b = Bisheaf::random(&c, 2, 3, seed).unwrap();
            for (f, t) in c.face_relations() {
                let lhs = b
                    .derived_extension(f, t)
                    .unwrap()
                    .multiply(b.vertical(t))
                    .unwrap()
                    .multiply(&b.derived_restriction(f, t).unwrap())
                    .unwrap();
                assert_eq!(&lhs, b.vertical(f), "seed {seed} at ({f},{t})");
            }
        }
    }

    #[test]
    fn derived_errors_on_non_relation() {
        let c = path();
        let b = Bisheaf::constant(&c, 2, 1).unwrap();
        let (v0, v2) = (idx(&c, &[0]), idx(&c, &[2]));
        assert!(matches!(
            b.derived_restriction(v2, v0),
            Err(BisheafError::NotFaceRelation(..))
        ));
    }

    #[test]
    fn new_rejects_bad_shapes() {
        let c = path();
        let id = FieldMatrix::identity(2, 1).unwrap();
        let bad = Bisheaf::new(
            Arc::clone(&c),
            2,
            vec![1; c.len()],
            vec![2; c.len()], // verticals below are 1x1, should be 2x1
            vec![id.clone(); c.covering_relations().len()],
            vec![id.clone(); c.covering_relations().len()],
            vec![id; c.len()],
        );
        assert!(matches!(bad, Err(BisheafError::ShapeMismatch { .. })));
        assert!(matches!(
            Bisheaf::constant(&c, 6, 1),
            Err(BisheafError::NotPrime(6))
        ));
    }
}
