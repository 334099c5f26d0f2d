//! Positive reals at tower scale.
//!
//! A [`TowerReal`] stores `exp^depth(core)` for an [`ExtReal`] core. Depth 0
//! is an ordinary positive value; each extra level survives one more
//! exponentiation, so iterated powers like `m^(m^(m^...))` stay representable
//! long after even their logarithms overflow any fixed-exponent float.
//!
//! Precision semantics are those of iterated-logarithm arithmetic: the core
//! carries P significant bits, so a value is known "to P bits at its depth".
//! Operations round correctly at that granularity; in particular adding a
//! term that is astronomically smaller than the other operand returns the
//! larger operand, which is the correctly rounded sum.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Signed;

use super::extreal::{log_sum_accumulate, ln2, ExtReal};

/// Lower a level only while `|core| < 2^NORMAL_LOWER_LOG2`; keeps exponent
/// fields comfortably small in canonical form.
const NORMAL_LOWER_LOG2: i64 = 21;

/// Raise to depth 1 when a depth-0 exponent field exceeds 2^RAISE_LOG2.
const RAISE_LOG2: i64 = 22;

#[derive(Debug, Clone)]
pub struct TowerReal {
    depth: u32,
    core: ExtReal,
}

impl TowerReal {
    /// Wrap a positive ExtReal, raising to depth 1 if its exponent field is
    /// outside the canonical window.
    pub fn from_extreal(x: ExtReal) -> Self {
        assert!(x.is_positive(), "TowerReal must be positive");
        if x.exponent().abs() > BigInt::from(1i64 << RAISE_LOG2) {
            TowerReal {
                depth: 1,
                core: x.ln(),
            }
        } else {
            TowerReal { depth: 0, core: x }
        }
    }

    pub fn from_biguint(n: &BigUint, prec: u32) -> Self {
        Self::from_extreal(ExtReal::from_biguint(n, prec))
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        Self::from_extreal(ExtReal::from_u64(n, prec))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        assert!(r.is_positive());
        Self::from_extreal(ExtReal::from_rational(r, prec))
    }

    /// Build `exp(ln_value)` from a tower holding the natural logarithm.
    pub fn exp_of(ln_value: &TowerReal) -> Self {
        TowerReal {
            depth: ln_value.depth + 1,
            core: ln_value.core.clone(),
        }
        .canonicalized()
    }

    fn canonicalized(mut self) -> Self {
        while self.depth >= 1 {
            let small = self.core.is_zero()
                || self.core.exponent() <= &BigInt::from(NORMAL_LOWER_LOG2);
            if !small {
                break;
            }
            self.core = self.core.exp().expect("gated exponent");
            self.depth -= 1;
        }
        self
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Depth-0 view, lowering as far as the hard `exp` range allows.
    fn hard_lowered(&self) -> (u32, ExtReal) {
        let mut depth = self.depth;
        let mut core = self.core.clone();
        while depth >= 1 {
            match core.exp() {
                Some(e) => {
                    core = e;
                    depth -= 1;
                }
                None => break,
            }
        }
        (depth, core)
    }

    /// The value as a plain ExtReal if it fits the extended-exponent range.
    pub fn as_extreal(&self) -> Option<ExtReal> {
        let (d, c) = self.hard_lowered();
        if d == 0 {
            Some(c)
        } else {
            None
        }
    }

    /// Natural logarithm; the value must exceed 1.
    pub fn ln_strict(&self) -> TowerReal {
        if self.depth >= 1 {
            return TowerReal {
                depth: self.depth - 1,
                core: self.core.clone(),
            }
            .canonicalized();
        }
        assert!(
            self.core > ExtReal::one(self.core.precision()),
            "ln_strict needs a value > 1"
        );
        TowerReal::from_extreal(self.core.ln())
    }

    pub fn add(&self, other: &Self) -> Self {
        let (da, ca) = self.hard_lowered();
        let (db, cb) = other.hard_lowered();
        if da == 0 && db == 0 {
            return Self::from_extreal(ca.add(&cb));
        }
        if da == db && da == 1 {
            // exp(x) + exp(y) = exp(logsumexp(x, y))
            let s = log_sum_accumulate(Some(&ca), &cb);
            return Self::exp_of(&Self::from_extreal_signed_ln(s));
        }
        // scales separated by more than the significand can express
        if self.cmp(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Wrap a signed ExtReal that is known to be a logarithm of a huge value.
    fn from_extreal_signed_ln(x: ExtReal) -> Self {
        // logs of huge values are large and positive
        assert!(x.is_positive(), "logarithm of a tower value must be positive");
        Self::from_extreal(x)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (da, ca) = self.hard_lowered();
        let (db, cb) = other.hard_lowered();
        if da == 0 && db == 0 {
            let prod = ca.mul(&cb);
            return Self::from_extreal(prod);
        }
        // at least one factor is huge; work on logarithms
        let (big, small_core, small_depth) = if da >= 1 {
            (self, cb, db)
        } else {
            (other, ca, da)
        };
        if small_depth == 0 {
            return big.mul_extreal(&small_core);
        }
        let la = self.ln_strict();
        let lb = other.ln_strict();
        Self::exp_of(&la.add(&lb))
    }

    /// Multiply by a positive ExtReal-sized scalar.
    pub fn mul_extreal(&self, s: &ExtReal) -> Self {
        assert!(s.is_positive(), "scalar must be positive");
        let (d, c) = self.hard_lowered();
        if d == 0 {
            return Self::from_extreal(c.mul(s));
        }
        let ln_self = self.ln_strict();
        let (ld, lc) = ln_self.hard_lowered();
        if ld == 0 {
            let ln_res = lc.add(&s.ln());
            return Self::exp_of(&Self::from_extreal_signed_ln(ln_res));
        }
        // ln(s) is below the granularity of the deeper logarithm
        self.clone()
    }

    pub fn mul_rational(&self, r: &BigRational, prec: u32) -> Self {
        self.mul_extreal(&ExtReal::from_rational(r, prec))
    }

    pub fn to_f64(&self) -> f64 {
        match self.as_extreal() {
            Some(x) => x.to_f64(),
            None => {
                if self.core.is_negative() && self.depth == 1 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `self / other` as an f64, saturating to 0 or infinity when the ratio
    /// is outside machine range.
    pub fn ratio_f64(&self, other: &Self) -> f64 {
        let (dn, cn) = self.hard_lowered();
        let (dd, cd) = other.hard_lowered();
        match (dn, dd) {
            (0, 0) => cn.div(&cd).to_f64(),
            (a, b) if a == b && a == 1 => {
                let d = cn.sub(&cd).to_f64();
                d.exp()
            }
            (a, b) if a == b => match cn.cmp(&cd) {
                Ordering::Equal => 1.0,
                Ordering::Less => 0.0,
                Ordering::Greater => f64::INFINITY,
            },
            _ => match self.cmp(other) {
                Ordering::Equal => 1.0,
                Ordering::Less => 0.0,
                Ordering::Greater => f64::INFINITY,
            },
        }
    }

    /// log2 of the value, rendered for reports. Negative for values < 1.
    pub fn log2_string(&self) -> String {
        match self.as_extreal() {
            Some(x) => x.ln().div(&ln2(x.precision())).to_sci(),
            None => {
                let l = self.ln_strict();
                // dividing a deep logarithm by ln 2 is below its granularity
                match l.as_extreal() {
                    Some(x) => x.div(&ln2(x.precision())).to_sci(),
                    None => l.to_sci(),
                }
            }
        }
    }

    /// Canonical rendering: a decimal scientific literal while the value fits
    /// the extended-exponent range, `exp(...)` wrappers beyond.
    pub fn to_sci(&self) -> String {
        match self.as_extreal() {
            Some(x) => x.to_sci(),
            None => format!("exp({})", self.ln_strict().to_sci()),
        }
    }
}

impl PartialEq for TowerReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TowerReal {}

impl PartialOrd for TowerReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TowerReal {
    /// Strip logarithms from both sides simultaneously until both are plain
    /// ExtReals; ln is strictly monotone, so order is preserved at each step.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = (self.depth, self.core.clone());
        let mut b = (other.depth, other.core.clone());
        loop {
            if a.0 == 0 && b.0 == 0 {
                return a.1.cmp(&b.1);
            }
            let strip = |t: &(u32, ExtReal)| -> Option<(u32, ExtReal)> {
                if t.0 >= 1 {
                    Some((t.0 - 1, t.1.clone()))
                } else if t.1.is_positive() {
                    Some((0, t.1.ln()))
                } else {
                    None
                }
            };
            match (strip(&a), strip(&b)) {
                (Some(x), Some(y)) => {
                    a = x;
                    b = y;
                }
                // a side that bottoms out at a non-positive real is smaller
                // than anything still carrying exponentials
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (None, None) => unreachable!("both depth 0 handled above"),
            }
        }
    }
}

impl std::fmt::Display for TowerReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_sci())
    }
}
