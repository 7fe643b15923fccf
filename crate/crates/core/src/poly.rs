//! Polynomials in the spectral parameter with scalar or operator
//! coefficients. Coefficients are stored lowest power first and equality
//! is always decided coefficient-wise.

use crate::error::{Error, Result};
use crate::scalar::Rat;
use crate::tensor::{TensorOperator, TensorShape};

/// Polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarPoly {
    coeffs: Vec<Rat>, // lowest first, trailing zeros trimmed
}

impl ScalarPoly {
    pub fn zero() -> Self {
        ScalarPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        ScalarPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        ScalarPoly { coeffs }
    }

    /// `u - root`
    pub fn linear_root(root: &Rat) -> Self {
        ScalarPoly::from_coeffs(vec![-root, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &ScalarPoly) -> ScalarPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        ScalarPoly::from_coeffs((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }

    pub fn mul(&self, rhs: &ScalarPoly) -> ScalarPoly {
        if self.is_zero() || rhs.is_zero() {
            return ScalarPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ScalarPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, s: &Rat) -> ScalarPoly {
        ScalarPoly::from_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn eval(&self, u: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    /// Horner evaluation at an operator argument (powers of the operator
    /// multiply scalar coefficients; ordering is immaterial here).
    pub fn eval_operator(&self, x: &TensorOperator) -> TensorOperator {
        let mut acc = TensorOperator::zeros(x.shape().clone());
        for c in self.coeffs.iter().rev() {
            acc = &acc.matmul(x) + &TensorOperator::scalar(x.shape().clone(), c.clone());
        }
        acc
    }

    /// `p(u + c)`
    pub fn compose_shift(&self, c: &Rat) -> ScalarPoly {
        let mut out = ScalarPoly::zero();
        // accumulate (u + c)^i iteratively
        let mut pow = ScalarPoly::constant(Rat::one());
        let shift = ScalarPoly::from_coeffs(vec![c.clone(), Rat::one()]);
        for a in &self.coeffs {
            out = out.add(&pow.scale(a));
            pow = pow.mul(&shift);
        }
        out
    }
}

/// Polynomial whose coefficients are dense tensor operators of a common
/// shape. Products keep the left factor's coefficients on the left, so
/// noncommutative coefficients are handled correctly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorPolynomial {
    shape: TensorShape,
    coeffs: Vec<TensorOperator>, // lowest first, trailing zeros trimmed
}

impl OperatorPolynomial {
    pub fn zero(shape: TensorShape) -> Self {
        OperatorPolynomial {
            shape,
            coeffs: vec![],
        }
    }

    pub fn constant(op: TensorOperator) -> Self {
        let shape = op.shape().clone();
        OperatorPolynomial::from_coeffs(shape, vec![op])
    }

    /// `u^k * op`
    pub fn monomial(op: TensorOperator, k: usize) -> Self {
        let shape = op.shape().clone();
        let mut coeffs = vec![TensorOperator::zeros(shape.clone()); k];
        coeffs.push(op);
        OperatorPolynomial::from_coeffs(shape, coeffs)
    }

    /// `u * Id - root`
    pub fn linear(root: TensorOperator) -> Self {
        let shape = root.shape().clone();
        OperatorPolynomial::from_coeffs(
            shape.clone(),
            vec![root.neg(), TensorOperator::identity(shape)],
        )
    }

    pub fn from_scalar_poly(shape: TensorShape, p: &ScalarPoly) -> Self {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| TensorOperator::scalar(shape.clone(), c.clone()))
            .collect();
        OperatorPolynomial::from_coeffs(shape, coeffs)
    }

    pub fn from_coeffs(shape: TensorShape, mut coeffs: Vec<TensorOperator>) -> Self {
        for c in &coeffs {
            assert_eq!(c.shape(), &shape, "coefficient shape mismatch");
        }
        while coeffs.last().is_some_and(TensorOperator::is_zero) {
            coeffs.pop();
        }
        OperatorPolynomial { shape, coeffs }
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn coeffs(&self) -> &[TensorOperator] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> TensorOperator {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| TensorOperator::zeros(self.shape.clone()))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &OperatorPolynomial) -> OperatorPolynomial {
        assert_eq!(self.shape, rhs.shape);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        OperatorPolynomial::from_coeffs(
            self.shape.clone(),
            (0..len).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect(),
        )
    }

    pub fn sub(&self, rhs: &OperatorPolynomial) -> OperatorPolynomial {
        assert_eq!(self.shape, rhs.shape);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        OperatorPolynomial::from_coeffs(
            self.shape.clone(),
            (0..len).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect(),
        )
    }

    /// Product with `self`'s coefficients to the left of `rhs`'s.
    pub fn mul(&self, rhs: &OperatorPolynomial) -> OperatorPolynomial {
        assert_eq!(self.shape, rhs.shape);
        if self.is_zero() || rhs.is_zero() {
            return OperatorPolynomial::zero(self.shape.clone());
        }
        let mut coeffs =
            vec![TensorOperator::zeros(self.shape.clone()); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &a.matmul(b);
            }
        }
        OperatorPolynomial::from_coeffs(self.shape.clone(), coeffs)
    }

    /// Multiplies every coefficient by `op` from the left.
    pub fn mul_op_left(&self, op: &TensorOperator) -> OperatorPolynomial {
        OperatorPolynomial::from_coeffs(
            self.shape.clone(),
            self.coeffs.iter().map(|c| op.matmul(c)).collect(),
        )
    }

    /// Multiplies every coefficient by `op` from the right.
    pub fn mul_op_right(&self, op: &TensorOperator) -> OperatorPolynomial {
        OperatorPolynomial::from_coeffs(
            self.shape.clone(),
            self.coeffs.iter().map(|c| c.matmul(op)).collect(),
        )
    }

    pub fn scale(&self, s: &Rat) -> OperatorPolynomial {
        OperatorPolynomial::from_coeffs(
            self.shape.clone(),
            self.coeffs.iter().map(|c| c.scale(s)).collect(),
        )
    }

    /// Evaluation at a scalar point.
    pub fn eval(&self, u: &Rat) -> TensorOperator {
        let mut acc = TensorOperator::zeros(self.shape.clone());
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(u) + c;
        }
        acc
    }

    /// Substitution "from the left": powers of `x` stand strictly to the
    /// left of each coefficient, `sum_p x^p C_p`.
    pub fn left_substitute(&self, x: &TensorOperator) -> Result<TensorOperator> {
        if x.shape() != &self.shape {
            return Err(Error::ShapeMismatch(format!(
                "substituted operator acts on {:?}, polynomial on {:?}",
                x.shape().local_dims(),
                self.shape.local_dims()
            )));
        }
        let mut acc = TensorOperator::zeros(self.shape.clone());
        let mut x_pow = TensorOperator::identity(self.shape.clone());
        for (p, c) in self.coeffs.iter().enumerate() {
            if p > 0 {
                x_pow = x_pow.matmul(x);
            }
            if !c.is_zero() {
                acc = &acc + &x_pow.matmul(c);
            }
        }
        Ok(acc)
    }

    /// `p(u + c)`
    pub fn compose_shift(&self, c: &Rat) -> OperatorPolynomial {
        let mut out = OperatorPolynomial::zero(self.shape.clone());
        let mut pow = ScalarPoly::constant(Rat::one());
        let shift = ScalarPoly::from_coeffs(vec![c.clone(), Rat::one()]);
        for a in &self.coeffs {
            let term = OperatorPolynomial::from_coeffs(
                self.shape.clone(),
                pow.coeffs().iter().map(|s| a.scale(s)).collect(),
            );
            out = out.add(&term);
            pow = pow.mul(&shift);
        }
        out
    }

    /// Exact left division by a monic divisor: returns `q` with
    /// `m . q == self`, erroring if the division leaves a remainder.
    /// The divisor's leading coefficient must be the identity.
    pub fn div_left_exact(&self, m: &OperatorPolynomial) -> Result<OperatorPolynomial> {
        assert_eq!(self.shape, m.shape);
        let dm = m.degree().expect("divisor must be nonzero");
        assert!(
            m.coeff(dm).is_identity(),
            "left division requires a monic divisor"
        );
        if self.is_zero() {
            return Ok(OperatorPolynomial::zero(self.shape.clone()));
        }
        let dp = self.degree().unwrap();
        if dp < dm {
            return Err(Error::ShapeMismatch(
                "left division leaves a remainder".into(),
            ));
        }
        let mut rem: Vec<TensorOperator> = (0..=dp).map(|k| self.coeff(k)).collect();
        let dq = dp - dm;
        let mut q = vec![TensorOperator::zeros(self.shape.clone()); dq + 1];
        for k in (0..=dq).rev() {
            let qk = rem[dm + k].clone();
            for i in 0..=dm {
                let t = m.coeff(i).matmul(&qk);
                rem[i + k] = &rem[i + k] - &t;
            }
            q[k] = qk;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return Err(Error::ShapeMismatch(
                "left division leaves a remainder".into(),
            ));
        }
        Ok(OperatorPolynomial::from_coeffs(self.shape.clone(), q))
    }
}
