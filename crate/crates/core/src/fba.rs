//! Separated variables in the diagonalizing basis: the joint spectrum of
//! the operator roots of D(u), the shift operators acting on it, their
//! commutation algebra, and the interpolation that rebuilds B(u) and
//! C(u) from them.

use crate::chain::{quantum_determinant, ChainSpec};
use crate::error::{Error, Result};
use crate::poly::OperatorPolynomial;
use crate::report::CheckResult;
use crate::scalar::Rat;
use crate::tensor::TensorOperator;

/// Per-site value lists `Lambda_i = { delta_i + eta k, k = -l_i..l_i }`
/// together with the pairwise-disjointness verdict.
#[derive(Clone, Debug)]
pub struct SpectrumLattice {
    pub lattices: Vec<Vec<Rat>>,
    pub disjoint: bool,
}

/// Computes the per-site spectra. Disjointness is reported, not
/// enforced; downstream constructions require it.
pub fn spectrum(spec: &ChainSpec) -> SpectrumLattice {
    let lattices: Vec<Vec<Rat>> = spec
        .sites()
        .iter()
        .map(|s| s.lattice(spec.eta()))
        .collect();
    SpectrumLattice {
        disjoint: spec.is_generic(),
        lattices,
    }
}

/// The commuting diagonal coordinates `x_n = delta_n + eta Sz_n` and the
/// ladder operators
/// `X_n(+-) = eta prod_{i!=n} (delta_n - delta_i + eta Sz_n +- eta l_i) S_n(+-)`,
/// all embedded on the full chain.
#[derive(Clone, Debug)]
pub struct SeparatedOperators {
    pub x_hat: Vec<TensorOperator>,
    pub x_plus: Vec<TensorOperator>,
    pub x_minus: Vec<TensorOperator>,
}

pub fn separated_operators(spec: &ChainSpec) -> Result<SeparatedOperators> {
    spec.validate_generic()?;
    let n = spec.num_sites();
    let shape = spec.shape();
    let eta = spec.eta().clone();
    let mut x_hat = Vec::with_capacity(n);
    let mut x_plus = Vec::with_capacity(n);
    let mut x_minus = Vec::with_capacity(n);
    for site in 0..n {
        let sz = spec.sz_embedded(site);
        x_hat.push(
            &TensorOperator::scalar(shape.clone(), spec.site(site).delta.clone())
                + &sz.scale(&eta),
        );
        let mut prefactor_plus = TensorOperator::scalar(shape.clone(), eta.clone());
        let mut prefactor_minus = TensorOperator::scalar(shape.clone(), eta.clone());
        for i in 0..n {
            if i == site {
                continue;
            }
            let gap = &spec.site(site).delta - &spec.site(i).delta;
            let base = &TensorOperator::scalar(shape.clone(), gap) + &sz.scale(&eta);
            let li_eta = TensorOperator::scalar(shape.clone(), &spec.site(i).spin() * &eta);
            prefactor_plus = prefactor_plus.matmul(&(&base + &li_eta));
            prefactor_minus = prefactor_minus.matmul(&(&base - &li_eta));
        }
        let (sp, sm) = spec.ladder_embedded(site);
        x_plus.push(prefactor_plus.matmul(&sp));
        x_minus.push(prefactor_minus.matmul(&sm));
    }
    Ok(SeparatedOperators {
        x_hat,
        x_plus,
        x_minus,
    })
}

/// Verifies the full commutation algebra of the separated operators:
/// commuting coordinates, commuting like ladders, cross-site
/// independence, the shift relation
/// `X_m(+-) x_n = (x_n -+ eta delta_{mn}) X_m(+-)`, and the quantum
/// determinant products `X_n(-+) X_n(+-) = -Delta(x_n +- eta/2)`.
pub fn check_separated_algebra(spec: &ChainSpec) -> Result<Vec<CheckResult>> {
    let ops = separated_operators(spec)?;
    Ok(check_separated_algebra_ops(spec, &ops))
}

/// Same checks against caller-supplied operators (negative controls).
pub fn check_separated_algebra_ops(
    spec: &ChainSpec,
    ops: &SeparatedOperators,
) -> Vec<CheckResult> {
    let n = spec.num_sites();
    let eta = spec.eta().clone();
    let mut results = Vec::new();

    let mut coords = CheckResult::pass("fba-coordinates-commute", "[x_m, x_n] = 0");
    'coords: for m in 0..n {
        for k in 0..n {
            if !ops.x_hat[m].commutator(&ops.x_hat[k]).is_zero() {
                coords = CheckResult::fail(
                    "fba-coordinates-commute",
                    "[x_m, x_n] = 0",
                    format!("[x_{}, x_{}] != 0", m + 1, k + 1),
                );
                break 'coords;
            }
        }
    }
    results.push(coords);

    let mut ladders = CheckResult::pass(
        "fba-ladders-commute",
        "[X_m^s, X_n^s] = 0; [X_m^+, X_n^-] = 0 for m != n",
    );
    'ladders: for m in 0..n {
        for k in 0..n {
            let same_plus = ops.x_plus[m].commutator(&ops.x_plus[k]);
            let same_minus = ops.x_minus[m].commutator(&ops.x_minus[k]);
            if !same_plus.is_zero() || !same_minus.is_zero() {
                ladders = CheckResult::fail(
                    "fba-ladders-commute",
                    "[X_m^s, X_n^s] = 0; [X_m^+, X_n^-] = 0 for m != n",
                    format!("like-sign commutator at sites ({}, {})", m + 1, k + 1),
                );
                break 'ladders;
            }
            if m != k && !ops.x_plus[m].commutator(&ops.x_minus[k]).is_zero() {
                ladders = CheckResult::fail(
                    "fba-ladders-commute",
                    "[X_m^s, X_n^s] = 0; [X_m^+, X_n^-] = 0 for m != n",
                    format!("[X_{}^+, X_{}^-] != 0", m + 1, k + 1),
                );
                break 'ladders;
            }
        }
    }
    results.push(ladders);

    let mut shift = CheckResult::pass("fba-shift-relation", "X_m^s x_n = (x_n -+ eta d_mn) X_m^s");
    'shift: for m in 0..n {
        for k in 0..n {
            for (sign, ladder) in [(1i64, &ops.x_plus[m]), (-1, &ops.x_minus[m])] {
                let lhs = ladder.matmul(&ops.x_hat[k]);
                let shifted = if m == k {
                    let delta = eta.scale_int(-sign);
                    &ops.x_hat[k] + &TensorOperator::scalar(ladder.shape().clone(), delta)
                } else {
                    ops.x_hat[k].clone()
                };
                let rhs = shifted.matmul(ladder);
                if let Some((row, col, _, _)) = lhs.first_discrepancy(&rhs) {
                    shift = CheckResult::fail(
                        "fba-shift-relation",
                        "X_m^s x_n = (x_n -+ eta d_mn) X_m^s",
                        format!(
                            "m = {}, n = {}, sign {} fails at ({row},{col})",
                            m + 1,
                            k + 1,
                            if sign > 0 { "+" } else { "-" }
                        ),
                    );
                    break 'shift;
                }
            }
        }
    }
    results.push(shift);

    let qdet = quantum_determinant(spec);
    let half_eta = &eta * &Rat::half(1);
    let mut dets = CheckResult::pass("fba-determinant", "X_n^-+ X_n^+- = -Delta(x_n +- eta/2)");
    'dets: for site in 0..n {
        for (plus_first, shift_sign) in [(true, 1i64), (false, -1)] {
            let product = if plus_first {
                ops.x_minus[site].matmul(&ops.x_plus[site])
            } else {
                ops.x_plus[site].matmul(&ops.x_minus[site])
            };
            let arg = &ops.x_hat[site]
                + &TensorOperator::scalar(
                    product.shape().clone(),
                    half_eta.scale_int(shift_sign),
                );
            let expected = qdet.eval_operator(&arg).neg();
            if let Some((row, col, _, _)) = product.first_discrepancy(&expected) {
                dets = CheckResult::fail(
                    "fba-determinant",
                    "X_n^-+ X_n^+- = -Delta(x_n +- eta/2)",
                    format!(
                        "site {}, {} branch fails at ({row},{col})",
                        site + 1,
                        if plus_first { "upper" } else { "lower" }
                    ),
                );
                break 'dets;
            }
        }
    }
    results.push(dets);

    results
}

/// Interpolation and root-property checks: the operator roots annihilate
/// `D~` under left substitution, left substitution into `B~`, `C~` gives
/// the ladders, the interpolation rebuild matches coefficient-wise, and
/// the product of linear root factors is `D~`.
pub fn check_reconstruction(spec: &ChainSpec) -> Result<Vec<CheckResult>> {
    let ops = separated_operators(spec)?;
    let tilde = crate::twist::tilde_ops(spec)?;
    let mut results = Vec::new();

    let mut roots = CheckResult::pass("fba-operator-roots", "[D~(u)]_{u=x_n} = 0");
    for site in 0..spec.num_sites() {
        if !tilde.d.left_substitute(&ops.x_hat[site])?.is_zero() {
            roots = CheckResult::fail(
                "fba-operator-roots",
                "[D~(u)]_{u=x_n} = 0",
                format!("substitution of x_{} does not vanish", site + 1),
            );
            break;
        }
    }
    results.push(roots);

    let mut subst = CheckResult::pass(
        "fba-left-substitution",
        "[B~(u)]_{u=x_n} = X_n^-, [C~(u)]_{u=x_n} = X_n^+",
    );
    for site in 0..spec.num_sites() {
        if tilde.b.left_substitute(&ops.x_hat[site])? != ops.x_minus[site]
            || tilde.c.left_substitute(&ops.x_hat[site])? != ops.x_plus[site]
        {
            subst = CheckResult::fail(
                "fba-left-substitution",
                "[B~(u)]_{u=x_n} = X_n^-, [C~(u)]_{u=x_n} = X_n^+",
                format!("site {}", site + 1),
            );
            break;
        }
    }
    results.push(subst);

    let (b, c) = reconstruct_bc(spec)?;
    results.push(if b == tilde.b && c == tilde.c {
        CheckResult::pass(
            "fba-interpolation",
            "sum_n { prod_{i!=n} (u - x_i)/(x_n - x_i) } X_n^-+ rebuilds B~, C~",
        )
    } else {
        CheckResult::fail(
            "fba-interpolation",
            "sum_n { prod_{i!=n} (u - x_i)/(x_n - x_i) } X_n^-+ rebuilds B~, C~",
            "coefficient mismatch".into(),
        )
    });

    let mut product = OperatorPolynomial::constant(TensorOperator::identity(spec.shape()));
    for x in &ops.x_hat {
        product = product.mul(&OperatorPolynomial::linear(x.clone()));
    }
    results.push(if product == tilde.d {
        CheckResult::pass("fba-root-product", "prod_n (u - x_n) = D~(u)")
    } else {
        CheckResult::fail(
            "fba-root-product",
            "prod_n (u - x_n) = D~(u)",
            "coefficient mismatch".into(),
        )
    });

    Ok(results)
}

/// Rebuilds `B(u)` and `C(u)` in the diagonalizing basis by polynomial
/// interpolation over the operator roots,
/// `sum_n { prod_{i!=n} (u - x_i)(x_n - x_i)^{-1} } X_n(-+)`,
/// with every coefficient strictly to the left of the ladder operator.
pub fn reconstruct_bc(spec: &ChainSpec) -> Result<(OperatorPolynomial, OperatorPolynomial)> {
    let ops = separated_operators(spec)?;
    let n = spec.num_sites();
    let shape = spec.shape();
    let mut b = OperatorPolynomial::zero(shape.clone());
    let mut c = OperatorPolynomial::zero(shape.clone());
    for site in 0..n {
        let mut numerator = OperatorPolynomial::constant(TensorOperator::identity(shape.clone()));
        let mut denominator = TensorOperator::identity(shape.clone());
        for i in 0..n {
            if i == site {
                continue;
            }
            numerator = numerator.mul(&OperatorPolynomial::linear(ops.x_hat[i].clone()));
            denominator = denominator.matmul(&(&ops.x_hat[site] - &ops.x_hat[i]));
        }
        let denom_inv = denominator.invert_diagonal().map_err(|_| Error::NonGeneric {
            factor: format!("x_{} - x_i has a zero eigenvalue", site + 1),
        })?;
        let lagrange = numerator.mul_op_right(&denom_inv);
        b = b.add(&lagrange.mul_op_right(&ops.x_minus[site]));
        c = c.add(&lagrange.mul_op_right(&ops.x_plus[site]));
    }
    Ok((b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::OperatorPolynomial;
    use crate::twist::tilde_ops;

    fn rat(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn chain_half() -> ChainSpec {
        ChainSpec::from_parts(&[(1, rat(0))], Rat::one()).unwrap()
    }

    fn chain_half_one() -> ChainSpec {
        ChainSpec::from_parts(&[(1, rat(0)), (2, rat(3))], Rat::one()).unwrap()
    }

    #[test]
    fn spectrum_single_spin_half() {
        let s = spectrum(&chain_half());
        assert_eq!(s.lattices, vec![vec![Rat::half(1), Rat::half(-1)]]);
        assert!(s.disjoint);
    }

    #[test]
    fn spectrum_mixed_chain() {
        let s = spectrum(&chain_half_one());
        assert_eq!(
            s.lattices,
            vec![
                vec![Rat::half(1), Rat::half(-1)],
                vec![rat(4), rat(3), rat(2)],
            ]
        );
        assert!(s.disjoint);
    }

    #[test]
    fn overlapping_spectrum_reported() {
        let spec = ChainSpec::from_parts(&[(1, rat(0)), (1, rat(0))], Rat::one()).unwrap();
        let s = spectrum(&spec);
        assert!(!s.disjoint);
        assert_eq!(s.lattices[0], s.lattices[1]);
    }

    #[test]
    fn single_site_ladders_are_bare() {
        let spec = chain_half();
        let ops = separated_operators(&spec).unwrap();
        let (sp, sm) = spec.ladder_embedded(0);
        assert_eq!(ops.x_plus[0], sp);
        assert_eq!(ops.x_minus[0], sm);
    }

    #[test]
    fn coordinates_read_off_spectrum() {
        let spec = chain_half_one();
        let ops = separated_operators(&spec).unwrap();
        let s = spectrum(&spec);
        let shape = spec.shape();
        for (site, x) in ops.x_hat.iter().enumerate() {
            assert!(x.is_diagonal());
            for (flat, value) in x.diag().into_iter().enumerate() {
                let local = shape.decompose(flat)[site];
                assert_eq!(value, s.lattices[site][local], "site {site}, index {flat}");
            }
        }
    }

    #[test]
    fn algebra_single_site() {
        let spec = chain_half();
        assert!(check_separated_algebra(&spec)
            .unwrap()
            .iter()
            .all(CheckResult::passed));
    }

    #[test]
    fn algebra_two_sites() {
        let spec = chain_half_one();
        assert!(check_separated_algebra(&spec)
            .unwrap()
            .iter()
            .all(CheckResult::passed));
    }

    #[test]
    fn corrupted_ladders_fail_with_indices() {
        let spec = chain_half_one();
        // flipped shift direction: X+ and X- exchanged at site 1
        let mut ops = separated_operators(&spec).unwrap();
        std::mem::swap(&mut ops.x_plus[0], &mut ops.x_minus[0]);
        let results = check_separated_algebra_ops(&spec, &ops);
        let shift = results
            .iter()
            .find(|r| r.check == "fba-shift-relation")
            .unwrap();
        assert!(!shift.passed());
        assert!(shift.detail.as_deref().unwrap().contains("m = 1"));

        // plain sign flip: the determinant product comes out negated
        let mut ops = separated_operators(&spec).unwrap();
        ops.x_plus[0] = ops.x_plus[0].neg();
        let results = check_separated_algebra_ops(&spec, &ops);
        let det = results.iter().find(|r| r.check == "fba-determinant").unwrap();
        assert!(!det.passed());
        assert!(det.detail.as_deref().unwrap().contains("site 1"));
    }

    #[test]
    fn reconstruction_single_site() {
        let spec = chain_half();
        let (b, _) = reconstruct_bc(&spec).unwrap();
        let (_, sm) = spec.ladder_embedded(0);
        assert_eq!(b, OperatorPolynomial::constant(sm));
    }

    #[test]
    fn reconstruction_matches_tilde_ops() {
        let spec = chain_half_one();
        let (b, c) = reconstruct_bc(&spec).unwrap();
        let tilde = tilde_ops(&spec).unwrap();
        assert_eq!(b, tilde.b);
        assert_eq!(c, tilde.c);
    }

    #[test]
    fn product_of_roots_is_d_tilde() {
        let spec = chain_half_one();
        let ops = separated_operators(&spec).unwrap();
        let mut product =
            OperatorPolynomial::constant(TensorOperator::identity(spec.shape()));
        for x in &ops.x_hat {
            product = product.mul(&OperatorPolynomial::linear(x.clone()));
        }
        let tilde = tilde_ops(&spec).unwrap();
        assert_eq!(product, tilde.d);
    }

    #[test]
    fn left_substitution_consistency() {
        // roots annihilate D~, and substitution into B~, C~ yields the ladders
        let spec = chain_half_one();
        let ops = separated_operators(&spec).unwrap();
        let tilde = tilde_ops(&spec).unwrap();
        for site in 0..spec.num_sites() {
            let root = tilde.d.left_substitute(&ops.x_hat[site]).unwrap();
            assert!(root.is_zero(), "site {site}");
            assert_eq!(
                tilde.b.left_substitute(&ops.x_hat[site]).unwrap(),
                ops.x_minus[site]
            );
            assert_eq!(
                tilde.c.left_substitute(&ops.x_hat[site]).unwrap(),
                ops.x_plus[site]
            );
        }
    }
}
