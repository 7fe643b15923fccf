//! Spin-l representation matrices and the one-site quantum L-operator.
//!
//! The generators use the non-symmetric gauge in which the raising
//! operator carries superdiagonal entries `2l, 2l-1, ..., 1` and the
//! lowering operator subdiagonal entries `1, 2, ..., 2l`. Both the chain
//! operators and the diagonalizing-basis formulas live in this one gauge.

use crate::error::{Error, Result};
use crate::poly::OperatorPolynomial;
use crate::scalar::Rat;
use crate::tensor::{tensor_embed, TensorOperator, TensorShape};

/// The three generators of an irreducible spin-(l = two_l/2)
/// representation, with the basis ordered by descending weight.
#[derive(Clone, Debug)]
pub struct SpinTriple {
    pub two_l: u32,
    pub sz: Vec<Vec<Rat>>,
    pub splus: Vec<Vec<Rat>>,
    pub sminus: Vec<Vec<Rat>>,
}

impl SpinTriple {
    pub fn dim(&self) -> usize {
        self.two_l as usize + 1
    }
}

/// Builds the spin matrices for doubled spin `two_l`:
/// `Sz = diag(l, l-1, ..., -l)`, superdiagonal of `S+` reading
/// `2l, 2l-1, ..., 1`, subdiagonal of `S-` reading `1, 2, ..., 2l`.
pub fn spin_matrices(two_l: u32) -> SpinTriple {
    let r = two_l as usize;
    let d = r + 1;
    let zero_row = || vec![Rat::zero(); d];
    let mut sz = vec![zero_row(); d];
    let mut splus = vec![zero_row(); d];
    let mut sminus = vec![zero_row(); d];
    for j in 0..d {
        // weight of basis vector j is l - j
        sz[j][j] = Rat::half(two_l as i64 - 2 * j as i64);
    }
    for j in 1..d {
        splus[j - 1][j] = Rat::from_int((r - j + 1) as i64);
    }
    for j in 0..d - 1 {
        sminus[j + 1][j] = Rat::from_int(j as i64 + 1);
    }
    SpinTriple {
        two_l,
        sz,
        splus,
        sminus,
    }
}

/// One site of a chain: doubled spin and inhomogeneity.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SiteSpec {
    pub two_l: u32,
    pub delta: Rat,
}

impl SiteSpec {
    pub fn new(two_l: u32, delta: Rat) -> Self {
        SiteSpec { two_l, delta }
    }

    pub fn dim(&self) -> usize {
        self.two_l as usize + 1
    }

    /// l as an exact rational.
    pub fn spin(&self) -> Rat {
        Rat::half(self.two_l as i64)
    }

    /// Weight of local basis vector `idx` (descending order).
    pub fn weight(&self, idx: usize) -> Rat {
        Rat::half(self.two_l as i64 - 2 * idx as i64)
    }

    /// The lattice `delta + eta k`, `k = -l..l`, top value first.
    pub fn lattice(&self, eta: &Rat) -> Vec<Rat> {
        (0..self.dim())
            .map(|idx| &self.delta + &(eta * &self.weight(idx)))
            .collect()
    }
}

/// The quantum L-operator at one site as a 2x2 auxiliary-space matrix of
/// single-site operator polynomials:
///
/// ```text
/// L(u) = [ u - delta + eta Sz     eta S-              ]
///        [ eta S+                 u - delta - eta Sz  ]
/// ```
pub fn l_operator(site: &SiteSpec, eta: &Rat) -> Result<[[OperatorPolynomial; 2]; 2]> {
    l_operator_on(&TensorShape::single(site.dim()), 0, site, eta)
}

/// Same L-operator with the quantum entries embedded at tensor slot
/// `site_index` of a larger chain.
pub fn l_operator_on(
    shape: &TensorShape,
    site_index: usize,
    site: &SiteSpec,
    eta: &Rat,
) -> Result<[[OperatorPolynomial; 2]; 2]> {
    if eta.is_zero() {
        return Err(Error::ZeroEta);
    }
    let triple = spin_matrices(site.two_l);
    let sz = tensor_embed(&triple.sz, site_index, shape)?;
    let splus = tensor_embed(&triple.splus, site_index, shape)?;
    let sminus = tensor_embed(&triple.sminus, site_index, shape)?;
    let id = TensorOperator::identity(shape.clone());
    let delta_id = id.scale(&site.delta);

    let diag_plus = OperatorPolynomial::from_coeffs(
        shape.clone(),
        vec![&sz.scale(eta) - &delta_id, id.clone()],
    );
    let diag_minus = OperatorPolynomial::from_coeffs(
        shape.clone(),
        vec![&sz.scale(&-eta.clone()) - &delta_id, id.clone()],
    );
    Ok([
        [diag_plus, OperatorPolynomial::constant(sminus.scale(eta))],
        [OperatorPolynomial::constant(splus.scale(eta)), diag_minus],
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_op(m: &[Vec<Rat>]) -> TensorOperator {
        let shape = TensorShape::single(m.len());
        TensorOperator::from_rows(shape, m.to_vec())
    }

    fn check_algebra(two_l: u32) {
        let t = spin_matrices(two_l);
        let (sz, sp, sm) = (to_op(&t.sz), to_op(&t.splus), to_op(&t.sminus));
        // [S+, S-] = 2 Sz
        assert_eq!(sp.commutator(&sm), sz.scale(&Rat::from_int(2)), "two_l={two_l}");
        // [Sz, S+-] = +-S+-
        assert_eq!(sz.commutator(&sp), sp, "two_l={two_l}");
        assert_eq!(sz.commutator(&sm), sm.neg(), "two_l={two_l}");
        // Casimir = l(l+1)
        let l = Rat::half(two_l as i64);
        let casimir = &(&sp.matmul(&sm) + &sm.matmul(&sp)).scale(&Rat::half(1))
            + &sz.matmul(&sz);
        let expected = TensorOperator::scalar(
            TensorShape::single(two_l as usize + 1),
            &l * &(&l + &Rat::one()),
        );
        assert_eq!(casimir, expected, "two_l={two_l}");
        // triangularity as stated
        assert!(sz.is_diagonal());
        assert!(sp.is_lower_triangular() == (two_l == 0));
        assert!(sm.is_lower_triangular());
    }

    #[test]
    fn spin_half_matrices() {
        let t = spin_matrices(1);
        assert_eq!(t.sz[0][0], Rat::half(1));
        assert_eq!(t.sz[1][1], Rat::half(-1));
        assert_eq!(t.splus[0][1], Rat::one());
        assert_eq!(t.sminus[1][0], Rat::one());
        assert!(t.splus[1][0].is_zero() && t.sminus[0][1].is_zero());
    }

    #[test]
    fn spin_one_superdiagonal_pattern() {
        let t = spin_matrices(2);
        assert_eq!(t.splus[0][1], Rat::from_int(2));
        assert_eq!(t.splus[1][2], Rat::one());
        assert_eq!(t.sminus[1][0], Rat::one());
        assert_eq!(t.sminus[2][1], Rat::from_int(2));
    }

    #[test]
    fn spin_zero_degenerates() {
        let t = spin_matrices(0);
        assert!(t.sz[0][0].is_zero());
        assert!(t.splus[0][0].is_zero());
        assert!(t.sminus[0][0].is_zero());
    }

    #[test]
    fn algebra_holds_up_to_spin_six() {
        for two_l in 0..=12 {
            check_algebra(two_l);
        }
    }

    #[test]
    fn l_operator_rejects_zero_eta() {
        let site = SiteSpec::new(1, Rat::zero());
        assert!(l_operator(&site, &Rat::zero()).is_err());
    }

    #[test]
    fn l_operator_spin_zero() {
        // all spin operators vanish: L(u) = (u - 3) Id in the aux space
        let site = SiteSpec::new(0, Rat::from_int(3));
        let l = l_operator(&site, &Rat::one()).unwrap();
        let at = |p: &OperatorPolynomial, u: i64| p.eval(&Rat::from_int(u)).get(0, 0).clone();
        assert_eq!(at(&l[0][0], 7), Rat::from_int(4));
        assert_eq!(at(&l[1][1], 7), Rat::from_int(4));
        assert!(at(&l[0][1], 7).is_zero());
        assert!(at(&l[1][0], 7).is_zero());
    }

    #[test]
    fn l_operator_spin_half_at_origin() {
        let site = SiteSpec::new(1, Rat::zero());
        let l = l_operator(&site, &Rat::one()).unwrap();
        let t = spin_matrices(1);
        let u0 = Rat::zero();
        assert_eq!(l[0][0].eval(&u0).diag(), vec![Rat::half(1), Rat::half(-1)]);
        assert_eq!(l[1][1].eval(&u0).diag(), vec![Rat::half(-1), Rat::half(1)]);
        assert_eq!(l[0][1].eval(&u0), to_op(&t.sminus));
        assert_eq!(l[1][0].eval(&u0), to_op(&t.splus));
    }

    #[test]
    fn off_diagonal_entries_u_independent() {
        let site = SiteSpec::new(2, Rat::ratio(5, 3));
        let eta = Rat::ratio(-2, 7);
        let l = l_operator(&site, &eta).unwrap();
        assert_eq!(l[0][1].degree(), Some(0));
        assert_eq!(l[1][0].degree(), Some(0));
        let t = spin_matrices(2);
        assert_eq!(l[0][1].coeff(0), to_op(&t.sminus).scale(&eta));
        // diagonal entries are monic of degree one
        assert_eq!(l[0][0].degree(), Some(1));
        assert!(l[0][0].coeff(1).is_identity());
    }
}
