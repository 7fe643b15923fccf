//! R-matrices: the fundamental rational one, higher-spin pair R-matrices
//! assembled from their Gauss decomposition `R = R+ R0 R-`, and the
//! generalized R-matrix attached to an arbitrary site permutation.

use crate::chain::{monodromy, ChainSpec};
use crate::error::{Error, Result};
use crate::perm::SitePermutation;
use crate::products::{factorial, RatioProduct};
#[cfg(test)]
use crate::products::telescoped_ratio;
use crate::report::CheckResult;
use crate::scalar::Rat;
use crate::spin::spin_matrices;
use crate::tensor::{embed_pair, permute_tensor_factors, tensor_embed, TensorOperator, TensorShape};

/// Fundamental rational R-matrix on two spin-1/2 spaces:
/// `diag-block [[1], [[b, c], [c, b]], [1]]` with `b = u/(u+eta)`,
/// `c = eta/(u+eta)`.
pub fn fundamental_r(u: &Rat, eta: &Rat) -> Result<TensorOperator> {
    let den = u + eta;
    if den.is_zero() {
        return Err(Error::Pole(format!("u = -eta (u = {u})")));
    }
    let b = u / &den;
    let c = eta / &den;
    let shape = TensorShape::new(vec![2, 2]);
    let mut r = TensorOperator::zeros(shape);
    r.set(0, 0, Rat::one());
    r.set(3, 3, Rat::one());
    r.set(1, 1, b.clone());
    r.set(2, 2, b);
    r.set(1, 2, c.clone());
    r.set(2, 1, c);
    Ok(r)
}

/// Pair R-matrix on `V_{r1}(z1) (x) V_{r2}(z2)` together with its
/// construction parameters.
#[derive(Clone, Debug)]
pub struct RMatrix {
    pub op: TensorOperator,
    pub params: (u32, Rat, u32, Rat, Rat),
}

/// Weight pair `(s1, s2)` of a flat index on the two-site space.
fn pair_weights(r1: u32, r2: u32, flat: usize) -> (Rat, Rat) {
    let d2 = r2 as usize + 1;
    let i1 = flat / d2;
    let i2 = flat % d2;
    (
        Rat::half(r1 as i64 - 2 * i1 as i64),
        Rat::half(r2 as i64 - 2 * i2 as i64),
    )
}

/// Higher-spin R-matrix built as the product `R+ R0 R-`:
/// the triangular parts are the truncating ladder sums
/// `sum_k [k! prod_{j=1..k} (lambda + S1z - S2z + j)]^{-1}` against
/// `(S1+)^k (S2-)^k` resp. `(S1-)^k (S2+)^k`, and the diagonal part is
/// the telescoped value of the convergent ratio product, evaluated per
/// weight vector. Here `lambda = (z1 - z2)/eta`.
pub fn higher_spin_r(r1: u32, z1: &Rat, r2: u32, z2: &Rat, eta: &Rat) -> Result<RMatrix> {
    if eta.is_zero() {
        return Err(Error::ZeroEta);
    }
    let lambda = &(z1 - z2) / eta;
    let shape = TensorShape::new(vec![r1 as usize + 1, r2 as usize + 1]);
    let n = shape.total_dim();
    let t1 = spin_matrices(r1);
    let t2 = spin_matrices(r2);
    let s1p = tensor_embed(&t1.splus, 0, &shape)?;
    let s1m = tensor_embed(&t1.sminus, 0, &shape)?;
    let s2p = tensor_embed(&t2.splus, 1, &shape)?;
    let s2m = tensor_embed(&t2.sminus, 1, &shape)?;
    let k_max = r1.min(r2) as usize;

    // ladder factor k! prod_{j=1..k} (lambda + s1 - s2 + j) at a given state
    let ladder_factor = |flat: usize, k: usize| -> Result<Rat> {
        let (s1, s2) = pair_weights(r1, r2, flat);
        let base = &lambda + &(&s1 - &s2);
        let mut f = factorial(k);
        for j in 1..=k {
            let factor = &base + &Rat::from_int(j as i64);
            if factor.is_zero() {
                return Err(Error::NonGeneric {
                    factor: format!(
                        "(z1 - z2)/eta + s1 - s2 + j = 0 at weights ({s1}, {s2}), j = {j}"
                    ),
                });
            }
            f *= factor;
        }
        Ok(f)
    };

    let mut r_minus = TensorOperator::identity(shape.clone());
    let mut r_plus = TensorOperator::identity(shape.clone());
    for k in 1..=k_max {
        // R-: diagonal factor to the left of (S1-)^k (S2+)^k, so it is
        // evaluated on row states; divide only rows the ladder reaches.
        let ladder = s1m.pow(k).matmul(&s2p.pow(k));
        let mut term = TensorOperator::zeros(shape.clone());
        for row in 0..n {
            if (0..n).all(|c| ladder.get(row, c).is_zero()) {
                continue;
            }
            let inv = ladder_factor(row, k)?.recip().map_err(|_| Error::DivisionByZero)?;
            for c in 0..n {
                let v = ladder.get(row, c);
                if !v.is_zero() {
                    term.set(row, c, v * &inv);
                }
            }
        }
        r_minus = &r_minus + &term;

        // R+: diagonal factor to the right of (S1+)^k (S2-)^k, evaluated
        // on column states.
        let ladder = s1p.pow(k).matmul(&s2m.pow(k));
        let mut term = TensorOperator::zeros(shape.clone());
        for col in 0..n {
            if (0..n).all(|r| ladder.get(r, col).is_zero()) {
                continue;
            }
            let inv = ladder_factor(col, k)?.recip().map_err(|_| Error::DivisionByZero)?;
            for r in 0..n {
                let v = ladder.get(r, col);
                if !v.is_zero() {
                    term.set(r, col, v * &inv);
                }
            }
        }
        r_plus = &r_plus + &term;
    }

    // R0: per weight vector, the convergent product telescopes pairwise.
    // The four factor families are paired so that every surviving factor
    // is a difference of two spectrum values; factors that appear once in
    // a numerator and once in a denominator cancel exactly.
    let d2 = r2 as usize + 1;
    let mut diag = Vec::with_capacity(n);
    for flat in 0..n {
        let i1 = flat / d2;
        let i2 = flat % d2;
        diag.push(r_zero_eigenvalue(&lambda, r1, r2, i1, i2)?);
    }
    let r_zero = TensorOperator::diagonal(shape.clone(), diag);

    Ok(RMatrix {
        op: r_plus.matmul(&r_zero).matmul(&r_minus),
        params: (r1, z1.clone(), r2, z2.clone(), eta.clone()),
    })
}

/// Raw factor of the infinite product defining `R0`, exposed for the
/// truncation oracle in tests.
pub fn r_zero_raw_factor(lambda: &Rat, l1: &Rat, l2: &Rat, s1: &Rat, s2: &Rat, k: i64) -> Rat {
    let kq = Rat::from_int(k);
    let kq1 = Rat::from_int(k + 1);
    let num = (lambda + &(s1 - s2) + &kq)
        * (lambda - &(l1 + l2) + &kq)
        * (lambda + &(s1 - s2) + &kq1)
        * (lambda + &(l1 + l2) + &kq1);
    let den = (lambda - &(l1 + s2) + &kq)
        * (lambda + &(s1 - l2) + &kq)
        * (lambda + &(l1 - s2) + &kq1)
        * (lambda + &(s1 + l2) + &kq1);
    num / den
}

/// Closed-form `R0` eigenvalue at a weight pair: the product of the four
/// telescoped factor-family pairs, with matched factors cancelled.
pub fn r_zero_eigenvalue(lambda: &Rat, r1: u32, r2: u32, i1: usize, i2: usize) -> Result<Rat> {
    let l1 = Rat::half(r1 as i64);
    let l2 = Rat::half(r2 as i64);
    let s1 = Rat::half(r1 as i64 - 2 * i1 as i64);
    let s2 = Rat::half(r2 as i64 - 2 * i2 as i64);
    let one = Rat::one();
    let mut product = RatioProduct::new();
    product.push_telescoped(&(lambda + &(&s1 - &s2)), -(i2 as i64), "lambda + s1 - s2");
    product.push_telescoped(&(lambda - &(&l1 + &l2)), i2 as i64, "lambda - l1 - l2");
    product.push_telescoped(
        &(&(lambda + &(&s1 - &s2)) + &one),
        i1 as i64,
        "lambda + s1 - s2 + 1",
    );
    product.push_telescoped(
        &(&(lambda + &(&l1 + &l2)) + &one),
        -(i1 as i64),
        "lambda + l1 + l2 + 1",
    );
    product.value()
}

/// Elementary step of the generalized R-matrix: with the chain currently
/// arranged by `arrangement`, exchanges the neighbours at positions
/// `(j, j+1)` of the arranged product. Acts on the original sites
/// `(arrangement(j), arrangement(j+1))` of the full space.
fn elementary_r_at(
    spec: &ChainSpec,
    arrangement: &SitePermutation,
    j: usize,
) -> Result<TensorOperator> {
    let a = arrangement.apply(j);
    let b = arrangement.apply(j + 1);
    let sa = spec.site(a);
    let sb = spec.site(b);
    let r = higher_spin_r(sa.two_l, &sa.delta, sb.two_l, &sb.delta, spec.eta())?;
    embed_pair(&r.op, a, b, &spec.shape())
}

/// Generalized R-matrix for a word in adjacent transpositions (rightmost
/// letter applied first). The composition law makes each letter act at
/// the slots the running arrangement assigns to it.
pub fn generalized_r_via_word(spec: &ChainSpec, word: &[usize]) -> Result<TensorOperator> {
    let n = spec.num_sites();
    let mut acc = TensorOperator::identity(spec.shape());
    let mut arrangement = SitePermutation::identity(n);
    for &j in word {
        if j + 1 >= n {
            return Err(Error::Spec(format!("word letter {j} out of range")));
        }
        let step = elementary_r_at(spec, &arrangement, j)?;
        acc = step.matmul(&acc);
        arrangement = arrangement.compose(&SitePermutation::transposition(n, j));
    }
    Ok(acc)
}

/// Generalized R-matrix `R^sigma`, built along one reduced word of
/// `sigma`. Any reduced word gives the same operator (the Yang-Baxter
/// and unitarity relations), which is what `check_word_independence`
/// verifies.
pub fn generalized_r(spec: &ChainSpec, sigma: &SitePermutation) -> Result<TensorOperator> {
    if sigma.len() != spec.num_sites() {
        return Err(Error::PermutationLengthMismatch {
            sites: spec.num_sites(),
            perm_len: sigma.len(),
        });
    }
    generalized_r_via_word(spec, &sigma.reduced_word())
}

/// All reduced words of `sigma` produce the same `R^sigma`.
pub fn check_word_independence(spec: &ChainSpec, sigma: &SitePermutation) -> Result<CheckResult> {
    let equation = "R^sigma independent of the reduced word (Yang-Baxter)";
    let words = sigma.all_reduced_words();
    let reference = generalized_r_via_word(spec, &words[0])?;
    for word in &words[1..] {
        let other = generalized_r_via_word(spec, word)?;
        if let Some((row, col, f, e)) = other.first_discrepancy(&reference) {
            return Ok(CheckResult::fail(
                "ybe-word-independence",
                equation,
                format!(
                    "words {:?} and {:?} disagree at ({row},{col}): {f} vs {e} for sigma = {:?}",
                    words[0], word, sigma
                ),
            ));
        }
    }
    Ok(CheckResult::pass("ybe-word-independence", equation)
        .with_detail(format!("sigma = {:?}, {} reduced word(s)", sigma, words.len())))
}

/// `sigma(R_{r2 r1}(z2, z1)) . R_{r1 r2}(z1, z2) = Id` for the swap.
pub fn check_unitarity(r1: u32, z1: &Rat, r2: u32, z2: &Rat, eta: &Rat) -> Result<CheckResult> {
    let equation = "sigma(R_{21}(z2,z1)) R_{12}(z1,z2) = Id";
    let r12 = higher_spin_r(r1, z1, r2, z2, eta)?;
    let r21 = higher_spin_r(r2, z2, r1, z1, eta)?;
    let swap = SitePermutation::transposition(2, 0);
    let r21_moved = permute_tensor_factors(&r21.op, &swap)?;
    let product = r21_moved.matmul(&r12.op);
    let id = TensorOperator::identity(product.shape().clone());
    Ok(CheckResult::compare("r-unitarity", equation, &product, &id)
        .with_detail(format!("spins ({r1}, {r2}), z = ({z1}, {z2})")))
}

/// Exchange relation with the monodromy matrix:
/// `R^sigma T(u) = T_sigma(u) R^sigma` as polynomial identities in all
/// four auxiliary entries.
pub fn check_intertwining(spec: &ChainSpec, sigma: &SitePermutation) -> Result<CheckResult> {
    let equation = "R^sigma T(u) = T_sigma(u) R^sigma";
    let r = generalized_r(spec, sigma)?;
    let t = monodromy(spec, &SitePermutation::identity(spec.num_sites()))?;
    let t_sigma = monodromy(spec, sigma)?;
    for (name, p, q) in [
        ("A", &t.a, &t_sigma.a),
        ("B", &t.b, &t_sigma.b),
        ("C", &t.c, &t_sigma.c),
        ("D", &t.d, &t_sigma.d),
    ] {
        let deg = p.degree().unwrap_or(0).max(q.degree().unwrap_or(0));
        for k in 0..=deg {
            let lhs = r.matmul(&p.coeff(k));
            let rhs = q.coeff(k).matmul(&r);
            if let Some((row, col, f, e)) = lhs.first_discrepancy(&rhs) {
                return Ok(CheckResult::fail(
                    "r-intertwining",
                    equation,
                    format!(
                        "entry {name}, coefficient u^{k}, position ({row},{col}): {f} vs {e}, sigma = {:?}",
                        sigma
                    ),
                ));
            }
        }
    }
    Ok(CheckResult::pass("r-intertwining", equation)
        .with_detail(format!("sigma = {:?}", sigma)))
}
