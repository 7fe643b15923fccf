//! Closed forms for the convergent ratio products that appear in the
//! diagonal normalization factors.

use crate::error::{Error, Result};
use crate::scalar::Rat;

/// Exact value of `prod_{k>=0} (x + k) / (x + d + k)` for integer `d`.
///
/// Numerator and denominator walk the same arithmetic progression offset
/// by `d` steps, so the product telescopes to the `|d|` boundary factors:
/// `prod_{t=0}^{d-1} (x + t)` for `d >= 0`, and the reciprocal of
/// `prod_{t=0}^{-d-1} (x + d + t)` for `d < 0`. Errors if a factor that
/// ends up in the denominator vanishes; a zero in the numerator is
/// reported too, since these products are only ever used where they must
/// be invertible.
pub fn telescoped_ratio(x: &Rat, d: i64) -> Result<Rat> {
    let mut acc = Rat::one();
    if d >= 0 {
        for t in 0..d {
            let f = x + &Rat::from_int(t);
            if f.is_zero() {
                return Err(Error::NonGeneric {
                    factor: format!("factor {} + {} vanishes in a telescoped product", x, t),
                });
            }
            acc *= f;
        }
        Ok(acc)
    } else {
        for t in 0..-d {
            let f = x + &Rat::from_int(d + t);
            if f.is_zero() {
                return Err(Error::NonGeneric {
                    factor: format!(
                        "factor {} + {} vanishes in a telescoped product",
                        x,
                        d + t
                    ),
                });
            }
            acc *= f;
        }
        acc.recip().map_err(|_| Error::DivisionByZero)
    }
}

/// A ratio of factor lists, evaluated after cancelling matched factors.
///
/// Regrouped convergent products can place a vanishing factor in one
/// pair's numerator and another pair's denominator even though the full
/// product is regular. All factors here are monic linear forms of the
/// same variable, so numerically equal factors are identical forms and
/// cancelling them is polynomial cancellation, not a limit argument.
#[derive(Default)]
pub struct RatioProduct {
    nums: Vec<(Rat, String)>,
    dens: Vec<(Rat, String)>,
}

impl RatioProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the factors of `prod_{k>=0} (x + k) / (x + d + k)`:
    /// `d` numerator factors for `d >= 0`, `|d|` denominator factors
    /// otherwise. `label` names the factor family for error reporting.
    pub fn push_telescoped(&mut self, x: &Rat, d: i64, label: &str) {
        if d >= 0 {
            for t in 0..d {
                self.nums
                    .push((x + &Rat::from_int(t), format!("{label} + {t}")));
            }
        } else {
            for t in 0..-d {
                self.dens
                    .push((x + &Rat::from_int(d + t), format!("{label} + {}", d + t)));
            }
        }
    }

    /// Cancels matched numerator/denominator factors and evaluates.
    /// Errors if a zero survives in the denominator.
    pub fn value(mut self) -> Result<Rat> {
        let mut kept_dens = Vec::new();
        'dens: while let Some((dv, dl)) = self.dens.pop() {
            for i in 0..self.nums.len() {
                if self.nums[i].0 == dv {
                    self.nums.swap_remove(i);
                    continue 'dens;
                }
            }
            kept_dens.push((dv, dl));
        }
        let mut acc = Rat::one();
        for (dv, dl) in kept_dens {
            if dv.is_zero() {
                return Err(Error::NonGeneric {
                    factor: format!("{dl} = 0 survives cancellation"),
                });
            }
            acc = acc / dv;
        }
        for (nv, _) in self.nums {
            acc *= nv;
        }
        Ok(acc)
    }
}

pub fn factorial(k: usize) -> Rat {
    let mut acc = Rat::one();
    for t in 2..=k {
        acc *= Rat::from_int(t as i64);
    }
    acc
}
