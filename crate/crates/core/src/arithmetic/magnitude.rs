//! Magnitudes: non-negative integers that are exact while small and tracked
//! through their (possibly iterated) natural logarithm once their bit length
//! crosses a configurable promotion threshold.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::extreal::{ln_u64, ExtReal};
use super::tower::TowerReal;
use crate::{Error, Result};

/// Arithmetic configuration: significand precision and the bit-length
/// threshold beyond which exact integers are promoted to log form.
#[derive(Debug, Clone, Copy)]
pub struct ArithCtx {
    pub precision: u32,
    pub threshold_bits: u64,
}

impl Default for ArithCtx {
    fn default() -> Self {
        ArithCtx {
            precision: 256,
            threshold_bits: 1 << 20,
        }
    }
}

impl ArithCtx {
    pub fn new(precision: u32, threshold_bits: u64) -> Self {
        ArithCtx {
            precision,
            threshold_bits,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Magnitude {
    /// Exact non-negative integer; kept while bit length <= threshold.
    Exact(BigUint),
    /// Value held as a tower; always a value strictly above the threshold.
    Big(TowerReal),
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude::Exact(BigUint::zero())
    }

    pub fn one() -> Self {
        Magnitude::Exact(BigUint::one())
    }

    pub fn from_u64(n: u64) -> Self {
        Magnitude::Exact(BigUint::from(n))
    }

    /// Wrap an integer, promoting to log form above the threshold.
    pub fn from_biguint(n: BigUint, ctx: &ArithCtx) -> Self {
        if n.bits() <= ctx.threshold_bits.max(1) {
            Magnitude::Exact(n)
        } else {
            Magnitude::Big(TowerReal::from_biguint(&n, ctx.precision))
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Magnitude::Exact(n) if n.is_zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            Magnitude::Exact(n) => Some(n),
            Magnitude::Big(_) => None,
        }
    }

    /// The value as a tower; `None` for zero.
    pub fn to_tower(&self, prec: u32) -> Option<TowerReal> {
        match self {
            Magnitude::Exact(n) => {
                if n.is_zero() {
                    None
                } else {
                    Some(TowerReal::from_biguint(n, prec))
                }
            }
            Magnitude::Big(t) => Some(t.clone()),
        }
    }

    /// Natural log as a tower; requires value > 1.
    pub fn ln_tower(&self, prec: u32) -> TowerReal {
        self.to_tower(prec)
            .expect("ln of zero magnitude")
            .ln_strict()
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a.cmp(b),
            _ => {
                if self.is_zero() {
                    return Ordering::Less;
                }
                if other.is_zero() {
                    return Ordering::Greater;
                }
                let prec = 96;
                self.to_tower(prec)
                    .unwrap()
                    .cmp(&other.to_tower(prec).unwrap())
            }
        }
    }

    /// Decimal digits while exact, `log2~X` once in log form.
    pub fn repr(&self) -> String {
        match self {
            Magnitude::Exact(n) => n.to_string(),
            Magnitude::Big(t) => format!("log2~{}", t.log2_string()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(n) => n.to_f64().unwrap_or(f64::INFINITY),
            Magnitude::Big(t) => t.to_f64(),
        }
    }
}

impl std::fmt::Display for Magnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.repr())
    }
}

/// `floor(alpha * x)` on the exact path; `alpha * x` (floor dropped) on the
/// log path, where the relative error of the substitution is below
/// `1/(alpha*x)`. Callers on the log path account for that bound; see
/// [`floor_drop_error_ln`].
pub fn floor_mul(alpha: &BigRational, x: &Magnitude, ctx: &ArithCtx) -> Result<Magnitude> {
    check_unit_interval(alpha)?;
    if alpha.is_zero() || x.is_zero() {
        return Ok(Magnitude::zero());
    }
    match x {
        Magnitude::Exact(n) => {
            let p = alpha.numer().magnitude();
            let q = alpha.denom().magnitude();
            Ok(Magnitude::from_biguint((p * n).div_floor(q), ctx))
        }
        Magnitude::Big(t) => Ok(Magnitude::Big(t.mul_rational(alpha, ctx.precision))),
    }
}

/// Natural log of the relative error bound incurred by dropping the floor in
/// `floor_mul(alpha, x)`: `ln(1/(alpha*x)) = -(ln alpha + ln x)`.
/// `None` when the bound is below the representable range (absorbed).
pub fn floor_drop_error_ln(alpha: &BigRational, x: &Magnitude, ctx: &ArithCtx) -> Option<ExtReal> {
    if alpha.is_zero() || x.is_zero() {
        return None;
    }
    let prec = ctx.precision;
    let ln_x = x.to_tower(prec)?.ln_strict();
    let ln_x = ln_x.as_extreal()?;
    let ln_alpha = ExtReal::from_rational(alpha, prec).ln();
    Some(ln_alpha.add(&ln_x).neg())
}

/// `base^exp`; exact iff `exp` is exact and the result fits the promotion
/// threshold. `base^0 = 1` serves degenerate layers.
pub fn mag_pow(base: u64, exp: &Magnitude, ctx: &ArithCtx) -> Result<Magnitude> {
    if base < 2 {
        return Err(Error::Domain(format!(
            "power base must be at least 2, got {base}"
        )));
    }
    if exp.is_zero() {
        return Ok(Magnitude::one());
    }
    let ln_base = ln_u64(base, ctx.precision);
    match exp {
        Magnitude::Exact(e) => {
            let fits = e.to_u64().map_or(false, |ev| {
                ev <= u32::MAX as u64 && (ev as f64) * (base as f64).log2() <= ctx.threshold_bits as f64
            });
            if fits {
                let p = BigUint::from(base).pow(e.to_u64().unwrap() as u32);
                Ok(Magnitude::from_biguint(p, ctx))
            } else {
                let ln = TowerReal::from_biguint(e, ctx.precision).mul_extreal(&ln_base);
                Ok(Magnitude::Big(TowerReal::exp_of(&ln)))
            }
        }
        Magnitude::Big(t) => {
            let ln = t.mul_extreal(&ln_base);
            Ok(Magnitude::Big(TowerReal::exp_of(&ln)))
        }
    }
}

/// Product of two magnitudes with promotion.
pub fn mag_mul(a: &Magnitude, b: &Magnitude, ctx: &ArithCtx) -> Magnitude {
    if a.is_zero() || b.is_zero() {
        return Magnitude::zero();
    }
    match (a, b) {
        (Magnitude::Exact(x), Magnitude::Exact(y)) => {
            if x.bits() + y.bits() <= ctx.threshold_bits + 1 {
                Magnitude::from_biguint(x * y, ctx)
            } else {
                let t = TowerReal::from_biguint(x, ctx.precision)
                    .mul(&TowerReal::from_biguint(y, ctx.precision));
                Magnitude::Big(t)
            }
        }
        _ => {
            let t = a
                .to_tower(ctx.precision)
                .unwrap()
                .mul(&b.to_tower(ctx.precision).unwrap());
            Magnitude::Big(t)
        }
    }
}

/// `mtilde - e` for `e <= mtilde`. Exact big-integer subtraction on the
/// exact path; on the log path `ln(mtilde - e) = ln(mtilde) + ln(1 - e/mtilde)`
/// with the ratio obtained as `exp(ln e - ln mtilde)`, which is stable while
/// the ratio stays away from 1.
pub fn mag_sub_exponent(mtilde: &Magnitude, e: &Magnitude, ctx: &ArithCtx) -> Result<Magnitude> {
    match e.cmp_value(mtilde) {
        Ordering::Greater => {
            return Err(Error::Inconsistency(format!(
                "subtrahend exceeds the total: {} > {}",
                e.repr(),
                mtilde.repr()
            )))
        }
        Ordering::Equal => return Ok(Magnitude::zero()),
        Ordering::Less => {}
    }
    if e.is_zero() {
        return Ok(mtilde.clone());
    }
    if let (Magnitude::Exact(m), Magnitude::Exact(x)) = (mtilde, e) {
        return Ok(Magnitude::from_biguint(m - x, ctx));
    }
    let prec = ctx.precision;
    let ln_m = mtilde.ln_tower(prec);
    let ln_e = e.ln_tower(prec);
    match (ln_m.as_extreal(), ln_e.as_extreal()) {
        (Some(lm), Some(le)) => {
            let d = le.sub(&lm); // <= 0
            if d.to_f64() < -((prec as f64) + 64.0) {
                // e/mtilde below one ulp of the significand
                return Ok(mtilde.clone());
            }
            let ratio = d.exp().expect("bounded ratio exponent");
            let one = ExtReal::one(prec);
            let rest = one.sub(&ratio);
            if !rest.is_positive() {
                return Err(Error::Inconsistency(
                    "operands indistinguishable at this precision".into(),
                ));
            }
            let ln_res = lm.add(&rest.ln());
            Ok(Magnitude::Big(TowerReal::exp_of(&TowerReal::from_extreal(
                ln_res,
            ))))
        }
        _ => {
            // logarithms beyond ExtReal range: any strict difference dwarfs
            // the significand, so the subtrahend is absorbed
            if ln_e.cmp(&ln_m) == Ordering::Less {
                Ok(mtilde.clone())
            } else {
                Err(Error::Inconsistency(
                    "operands indistinguishable at this precision".into(),
                ))
            }
        }
    }
}

fn check_unit_interval(alpha: &BigRational) -> Result<()> {
    if alpha.is_negative() || alpha > &BigRational::one() {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ctx() -> ArithCtx {
        ArithCtx::default()
    }

    fn half() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(2))
    }

    fn third() -> BigRational {
        BigRational::new(BigInt::from(1), BigInt::from(3))
    }

    #[test]
    fn floor_mul_exact_cases() {
        let c = ctx();
        let r = floor_mul(&half(), &Magnitude::from_u64(5), &c).unwrap();
        assert_eq!(r.as_exact().unwrap(), &BigUint::from(2u32));
        let r = floor_mul(&third(), &Magnitude::from_u64(2), &c).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn floor_mul_rejects_out_of_range_alpha() {
        let c = ctx();
        let bad = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert!(matches!(
            floor_mul(&bad, &Magnitude::from_u64(5), &c),
            Err(Error::Domain(_))
        ));
        let neg = BigRational::new(BigInt::from(-1), BigInt::from(2));
        assert!(floor_mul(&neg, &Magnitude::from_u64(5), &c).is_err());
    }

    #[test]
    fn floor_mul_exact_vs_log_agree_below_threshold() {
        let c = ctx();
        let x = Magnitude::from_u64(4096);
        let exact = floor_mul(&half(), &x, &c).unwrap();
        assert_eq!(exact.as_exact().unwrap(), &BigUint::from(2048u32));
        let forced = Magnitude::Big(TowerReal::from_u64(4096, c.precision));
        let logged = floor_mul(&half(), &forced, &c).unwrap();
        let got = logged.ln_tower(c.precision).as_extreal().unwrap();
        let want = ExtReal::from_u64(2048, c.precision).ln();
        let rel = got.sub(&want).div(&want).to_f64().abs();
        assert!(rel < 2f64.powi(-250), "rel={rel:e}");
    }

    #[test]
    fn mag_pow_cases() {
        let c = ctx();
        let r = mag_pow(2, &Magnitude::from_u64(4), &c).unwrap();
        assert_eq!(r.as_exact().unwrap(), &BigUint::from(16u32));
        assert!(mag_pow(1, &Magnitude::from_u64(4), &c).is_err());

        // 5^3125 against the direct big-integer oracle
        let r = mag_pow(5, &Magnitude::from_u64(3125), &c).unwrap();
        let oracle = BigUint::from(5u32).pow(3125);
        assert_eq!(oracle.to_string().len(), 2185);
        assert_eq!(r.as_exact().unwrap(), &oracle);

        // base 2 with a logged exponent: ln(result) = 65536 * ln 2
        let e = Magnitude::Big(TowerReal::from_u64(65536, c.precision));
        let r = mag_pow(2, &e, &c).unwrap();
        let got = r.ln_tower(c.precision).as_extreal().unwrap();
        let want = super::super::extreal::ln2(c.precision).mul(&ExtReal::from_u64(65536, c.precision));
        let rel = got.sub(&want).div(&want).to_f64().abs();
        assert!(rel < 1e-60);
    }

    #[test]
    fn mag_pow_zero_exponent_is_one() {
        let c = ctx();
        let r = mag_pow(7, &Magnitude::zero(), &c).unwrap();
        assert_eq!(r.as_exact().unwrap(), &BigUint::one());
    }

    #[test]
    fn mag_pow_promotes_beyond_threshold() {
        let c = ArithCtx::new(128, 1000);
        let r = mag_pow(2, &Magnitude::from_u64(5000), &c).unwrap();
        assert!(!r.is_exact());
        let got = r.ln_tower(c.precision).as_extreal().unwrap();
        let want = super::super::extreal::ln2(c.precision).mul(&ExtReal::from_u64(5000, c.precision));
        assert!(got.sub(&want).div(&want).to_f64().abs() < 1e-30);
    }

    #[test]
    fn mag_sub_exact_cases() {
        let c = ctx();
        let r = mag_sub_exponent(&Magnitude::from_u64(16), &Magnitude::from_u64(8), &c).unwrap();
        assert_eq!(r.as_exact().unwrap(), &BigUint::from(8u32));
        let r = mag_sub_exponent(&Magnitude::from_u64(4), &Magnitude::from_u64(2), &c).unwrap();
        assert_eq!(r.as_exact().unwrap(), &BigUint::from(2u32));
        assert!(matches!(
            mag_sub_exponent(&Magnitude::from_u64(2), &Magnitude::from_u64(4), &c),
            Err(Error::Inconsistency(_))
        ));
    }

    #[test]
    fn mag_sub_log_path_halving() {
        // mtilde with ln = 10^6 * ln 2, e = mtilde/2; result ln must be
        // ln(mtilde) + ln(1/2) within 2^-(P-8)
        let c = ctx();
        let p = c.precision;
        let lm = super::super::extreal::ln2(p).mul(&ExtReal::from_u64(1_000_000, p));
        let mt = Magnitude::Big(TowerReal::exp_of(&TowerReal::from_extreal(lm.clone())));
        let le = lm.add(&half_ln(p));
        let e = Magnitude::Big(TowerReal::exp_of(&TowerReal::from_extreal(le.clone())));
        let r = mag_sub_exponent(&mt, &e, &c).unwrap();
        let got = r.ln_tower(p).as_extreal().unwrap();
        let rel = got.sub(&le).div(&le).to_f64().abs();
        assert!(rel < 2f64.powi(-(p as i32 - 8)), "rel={rel:e}");
    }

    fn half_ln(p: u32) -> ExtReal {
        super::super::extreal::ln2(p).neg()
    }

    #[test]
    fn pow_additivity_in_log_value() {
        // 3^x * 3^y == 3^(x+y) exactly on the exact path
        let c = ctx();
        let a = mag_pow(3, &Magnitude::from_u64(20), &c).unwrap();
        let b = mag_pow(3, &Magnitude::from_u64(13), &c).unwrap();
        let ab = mag_mul(&a, &b, &c);
        let direct = mag_pow(3, &Magnitude::from_u64(33), &c).unwrap();
        assert_eq!(ab.as_exact(), direct.as_exact());
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;
        use std::cmp::Ordering;

        proptest! {
            #[test]
            fn floor_mul_monotone(
                p in 1u64..=9,
                q in 2u64..=10,
                x in 0u64..1_000_000,
                y in 0u64..1_000_000,
            ) {
                prop_assume!(p <= q);
                let alpha = BigRational::new(BigInt::from(p), BigInt::from(q));
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                let c = ArithCtx::default();
                let a = floor_mul(&alpha, &Magnitude::from_u64(lo), &c).unwrap();
                let b = floor_mul(&alpha, &Magnitude::from_u64(hi), &c).unwrap();
                prop_assert!(a.cmp_value(&b) != Ordering::Greater);
            }

            #[test]
            fn pow_additivity_log_path(b in 2u64..=6, x in 1u64..=5000, y in 1u64..=5000) {
                // tiny threshold keeps everything on the log path
                let c = ArithCtx::new(128, 4);
                let px = mag_pow(b, &Magnitude::from_u64(x), &c).unwrap();
                let py = mag_pow(b, &Magnitude::from_u64(y), &c).unwrap();
                let prod = mag_mul(&px, &py, &c);
                let direct = mag_pow(b, &Magnitude::from_u64(x + y), &c).unwrap();
                let lp = prod.ln_tower(c.precision).as_extreal().unwrap();
                let ld = direct.ln_tower(c.precision).as_extreal().unwrap();
                let rel = lp.sub(&ld).div(&ld).to_f64().abs();
                prop_assert!(rel < 2f64.powi(-(c.precision as i32 - 16)));
            }
        }
    }

    #[test]
    fn repr_forms() {
        let c = ctx();
        assert_eq!(Magnitude::from_u64(65536).repr(), "65536");
        let big = mag_pow(2, &Magnitude::Big(TowerReal::from_u64(65536, c.precision)), &c).unwrap();
        assert!(big.repr().starts_with("log2~"), "{}", big.repr());
    }
}
