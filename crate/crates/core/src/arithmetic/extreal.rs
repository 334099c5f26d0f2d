//! Extended-range binary floating point.
//!
//! An [`ExtReal`] is `sign * mant * 2^(exp - prec)` with a `prec`-bit
//! normalized significand and an arbitrary-size exponent, so a value like
//! `2^(10^6)` is as cheap as `2.0`. This is the carrier for logarithms of
//! quantities far outside machine-float range; `ln`, `exp` and stable
//! log-sum accumulation are provided at full working precision.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Smallest supported significand width in bits.
pub const MIN_PRECISION: u32 = 64;

/// Guard bits used internally by the transcendental kernels.
const GUARD_BITS: u32 = 64;

/// `exp()` refuses arguments with |x| >= 2^EXP_ARG_LIMIT_LOG2: beyond that
/// the integer part of x/ln2 is not determined by the input precision.
pub(crate) const EXP_ARG_LIMIT_LOG2: i64 = 24;

#[derive(Debug, Clone)]
pub struct ExtReal {
    sign: i8,
    mant: BigUint,
    exp: BigInt,
    prec: u32,
}

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal {
            sign: 0,
            mant: BigUint::zero(),
            exp: BigInt::zero(),
            prec: prec.max(MIN_PRECISION),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_u64(1, prec)
    }

    /// Normalize `sign * raw_mant * 2^(raw_exp)` (raw_exp scales the least
    /// significant bit) into canonical form, rounding to `prec` bits.
    fn normalize(sign: i8, mut mant: BigUint, mut lsb_exp: BigInt, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if mant.is_zero() || sign == 0 {
            return Self::zero(prec);
        }
        let bits = mant.bits();
        let p = prec as u64;
        if bits > p {
            let drop = (bits - p) as u64;
            // round half away from zero on the dropped bits
            let keep_plus_one = &mant >> (drop - 1);
            let round_up = (&keep_plus_one & BigUint::from(1u32)) == BigUint::from(1u32);
            mant = keep_plus_one >> 1u32;
            lsb_exp += BigInt::from(drop);
            if round_up {
                mant += 1u32;
                if mant.bits() > p {
                    mant >>= 1u32;
                    lsb_exp += 1;
                }
            }
        } else if bits < p {
            let up = p - bits;
            mant <<= up;
            lsb_exp -= BigInt::from(up);
        }
        ExtReal {
            sign,
            mant,
            exp: lsb_exp + BigInt::from(prec),
            prec,
        }
    }

    pub fn from_biguint(n: &BigUint, prec: u32) -> Self {
        Self::normalize(1, n.clone(), BigInt::zero(), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        let sign = match n.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        };
        Self::normalize(sign, n.magnitude().clone(), BigInt::zero(), prec)
    }

    pub fn from_u64(n: u64, prec: u32) -> Self {
        Self::from_biguint(&BigUint::from(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(n), prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = Self::from_bigint(r.numer(), prec + GUARD_BITS);
        let den = Self::from_bigint(r.denom(), prec + GUARD_BITS);
        num.div(&den).with_prec(prec)
    }

    /// Exact conversion; every ExtReal is a dyadic rational.
    pub fn to_rational(&self) -> BigRational {
        if self.sign == 0 {
            return BigRational::zero();
        }
        let m = BigInt::from(self.mant.clone()) * BigInt::from(self.sign);
        let shift = &self.exp - BigInt::from(self.prec);
        if shift.is_negative() {
            let s = (-&shift).to_u64().expect("denominator shift fits u64");
            BigRational::new(m, BigInt::from(1u8) << s)
        } else {
            let s = shift.to_u64().expect("numerator shift fits u64");
            BigRational::from(m << s)
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    /// Binary exponent: `2^(exp-1) <= |v| < 2^exp` for nonzero values.
    pub fn exponent(&self) -> &BigInt {
        &self.exp
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        if self.sign == 0 {
            return Self::zero(prec);
        }
        Self::normalize(
            self.sign,
            self.mant.clone(),
            &self.exp - BigInt::from(self.prec),
            prec,
        )
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        r.sign = -r.sign;
        r
    }

    pub fn abs(&self) -> Self {
        let mut r = self.clone();
        r.sign = r.sign.abs();
        r
    }

    fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.exp.cmp(&other.exp) {
            Ordering::Equal => {}
            o => return o,
        }
        // align mantissas if precisions differ
        if self.prec == other.prec {
            self.mant.cmp(&other.mant)
        } else if self.prec > other.prec {
            let b = &other.mant << (self.prec - other.prec);
            self.mant.cmp(&b)
        } else {
            let a = &self.mant << (other.prec - self.prec);
            a.cmp(&other.mant)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return other.clone();
        }
        if other.sign == 0 {
            return self.clone();
        }
        let prec = self.prec.max(other.prec);
        let sa = self.with_prec(prec);
        let sb = other.with_prec(prec);
        // `a` is the operand of larger magnitude
        let (a, b) = if sa.cmp_abs(&sb) == Ordering::Less {
            (&sb, &sa)
        } else {
            (&sa, &sb)
        };
        let d = &a.exp - &b.exp;
        if d > BigInt::from(prec + 2) {
            return a.clone();
        }
        let shift = d.to_u64().expect("aligned shift fits u64");
        // one guard word keeps the dropped tail of b below 1/2^64 ulp
        let g = 64u64;
        let av = &a.mant << (g + shift);
        let bv = &b.mant << g;
        let lsb = &a.exp - BigInt::from(prec as u64 + g + shift);
        if a.sign == b.sign {
            Self::normalize(a.sign, av + bv, lsb, prec)
        } else {
            match av.cmp(&bv) {
                Ordering::Equal => Self::zero(prec),
                Ordering::Greater => Self::normalize(a.sign, av - bv, lsb, prec),
                Ordering::Less => Self::normalize(b.sign, bv - av, lsb, prec),
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero(self.prec.max(other.prec));
        }
        let prec = self.prec.max(other.prec);
        let mant = &self.mant * &other.mant;
        let lsb = &self.exp - BigInt::from(self.prec) + &other.exp - BigInt::from(other.prec);
        Self::normalize(self.sign * other.sign, mant, lsb, prec)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(other.sign != 0, "division by zero ExtReal");
        if self.sign == 0 {
            return Self::zero(self.prec.max(other.prec));
        }
        let prec = self.prec.max(other.prec);
        let s = prec as u64 + 64;
        let q = (&self.mant << s) / &other.mant;
        let lsb =
            &self.exp - BigInt::from(self.prec as u64 + s) - (&other.exp - BigInt::from(other.prec));
        Self::normalize(self.sign * other.sign, q, lsb, prec)
    }

    pub fn mul_i64(&self, k: i64, prec: u32) -> Self {
        self.mul(&Self::from_i64(k, prec))
    }

    /// Exact scaling by `2^k`.
    pub fn shl_exp(&self, k: &BigInt) -> Self {
        if self.sign == 0 {
            return self.clone();
        }
        let mut r = self.clone();
        r.exp += k;
        r
    }

    /// Nearest integer, half away from zero.
    pub fn round_to_bigint(&self) -> BigInt {
        if self.sign == 0 {
            return BigInt::zero();
        }
        let shift = &self.exp - BigInt::from(self.prec);
        let mag = if shift.is_negative() {
            let s = (-&shift).to_u64().expect("round shift fits u64");
            if s > self.prec as u64 {
                if s == self.prec as u64 + 1 {
                    // |v| in [1/4, 1/2): rounds to 0; exactly 1/2 handled below
                    BigUint::zero()
                } else {
                    BigUint::zero()
                }
            } else {
                let keep_plus_one = &self.mant >> (s - 1);
                let round_up = (&keep_plus_one & BigUint::from(1u8)) == BigUint::from(1u8);
                let mut k = keep_plus_one >> 1u8;
                if round_up {
                    k += 1u8;
                }
                k
            }
        } else {
            &self.mant << shift.to_u64().expect("round shift fits u64")
        };
        BigInt::from(mag) * BigInt::from(self.sign)
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let e = match self.exp.to_i64() {
            Some(e) => e,
            None => {
                return if self.exp.is_negative() {
                    0.0
                } else {
                    f64::INFINITY * self.sign as f64
                }
            }
        };
        if e > 1060 {
            return f64::INFINITY * self.sign as f64;
        }
        if e < -1060 {
            return 0.0;
        }
        let top = if self.prec > 96 {
            (&self.mant >> (self.prec - 96)).to_u128().unwrap()
        } else {
            self.mant.to_u128().unwrap() << (96 - self.prec)
        };
        let f = top as f64 / 79228162514264337593543950336.0; // 2^96
        self.sign as f64 * f * exp2i(e)
    }

    /// Natural logarithm. Panics on non-positive input.
    pub fn ln(&self) -> Self {
        assert!(self.sign > 0, "ln of non-positive ExtReal");
        let prec = self.prec;
        let w = prec + GUARD_BITS;
        // x = f * 2^k with f in [1, 2)
        let k = &self.exp - 1;
        let f = ExtReal {
            sign: 1,
            mant: self.mant.clone(),
            exp: BigInt::from(1),
            prec,
        }
        .with_prec(w);
        let ln_f = ln_near_one(&f, w);
        let kterm = Self::from_bigint(&k, w).mul(&ln2(w));
        ln_f.add(&kterm).with_prec(prec)
    }

    /// `ln(1 + self)` for small non-negative `self`, cancellation-safe.
    pub fn ln_1p(&self) -> Self {
        if self.sign == 0 {
            return Self::zero(self.prec);
        }
        assert!(self.sign > 0, "ln_1p expects non-negative input");
        let prec = self.prec;
        if self.exp < BigInt::from(-((prec as i64) / 2)) {
            // y - y^2/2 suffices: the y^3 term is below the rounding level
            let half_sq = self.mul(self).shl_exp(&BigInt::from(-1));
            return self.sub(&half_sq);
        }
        Self::one(prec).add(self).ln()
    }

    /// `e^self`, or `None` when the argument is too large in magnitude for
    /// the fractional part to be meaningful at this precision.
    pub fn exp(&self) -> Option<Self> {
        let prec = self.prec;
        if self.sign == 0 {
            return Some(Self::one(prec));
        }
        if self.exp > BigInt::from(EXP_ARG_LIMIT_LOG2) {
            return None;
        }
        let w = prec + GUARD_BITS;
        let x = self.with_prec(w);
        let l2 = ln2(w);
        let k = x.div(&l2).round_to_bigint();
        let r = x.sub(&Self::from_bigint(&k, w).mul(&l2));
        // |r| <= ln2/2 + rounding
        let mut term = Self::one(w);
        let mut sum = Self::one(w);
        let mut j = 1i64;
        loop {
            term = term.mul(&r).div(&Self::from_i64(j, w));
            if term.sign == 0 || term.exp < BigInt::from(-((w as i64) + 2)) {
                break;
            }
            sum = sum.add(&term);
            j += 1;
        }
        Some(sum.shl_exp(&k).with_prec(prec))
    }

    /// Decimal scientific rendering, deterministic for fixed bits.
    pub fn to_sci(&self) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        let e = self
            .exp
            .to_f64()
            .expect("exponents beyond f64 range are not printed directly");
        let top = if self.prec > 64 {
            (&self.mant >> (self.prec - 64)).to_u64().unwrap()
        } else {
            self.mant.to_u64().unwrap() << (64 - self.prec)
        };
        let log2m = (top as f64).log2() - 64.0;
        let l10 = (e + log2m) * std::f64::consts::LOG10_2;
        if l10.abs() < 15.0 {
            let v = self.to_f64();
            return format!("{v}");
        }
        let mut d10 = l10.floor() as i64;
        let w = self.prec.max(96) + GUARD_BITS;
        let ln10 = ln_u64(10, w);
        let mut mant10 = self
            .abs()
            .with_prec(w)
            .ln()
            .sub(&ExtReal::from_i64(d10, w).mul(&ln10))
            .exp()
            .expect("scaled mantissa is in exp range");
        let ten = ExtReal::from_u64(10, w);
        while mant10.cmp_abs(&ten) != Ordering::Less {
            mant10 = mant10.div(&ten);
            d10 += 1;
        }
        while mant10.cmp_abs(&ExtReal::one(w)) == Ordering::Less {
            mant10 = mant10.mul(&ten);
            d10 -= 1;
        }
        let m = mant10.to_f64();
        let sign = if self.sign < 0 { "-" } else { "" };
        if d10 >= 0 {
            format!("{sign}{m}e+{d10}")
        } else {
            format!("{sign}{m}e{d10}")
        }
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            o => return o,
        }
        if self.sign == 0 {
            return Ordering::Equal;
        }
        let mag = self.cmp_abs(other);
        if self.sign > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl std::fmt::Display for ExtReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_sci())
    }
}

fn exp2i(e: i64) -> f64 {
    // 2^e for |e| <= ~1100, split to stay inside powi's exponent range
    if e >= 0 {
        let h = e / 2;
        2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
    } else {
        let h = e / 2;
        2f64.powi(h as i32) * 2f64.powi((e - h) as i32)
    }
}

/// ln(f) for f in [1, 2) via the atanh series at working precision `w`.
fn ln_near_one(f: &ExtReal, w: u32) -> ExtReal {
    let one = ExtReal::one(w);
    let num = f.sub(&one);
    if num.is_zero() {
        return ExtReal::zero(w);
    }
    let den = f.add(&one);
    let t = num.div(&den);
    let t2 = t.mul(&t);
    let mut term = t.clone();
    let mut sum = t.clone();
    let mut j = 1i64;
    loop {
        term = term.mul(&t2);
        let contrib = term.div(&ExtReal::from_i64(2 * j + 1, w));
        if contrib.is_zero() || contrib.exponent() < &BigInt::from(-((w as i64) + 2)) {
            break;
        }
        sum = sum.add(&contrib);
        j += 1;
    }
    sum.shl_exp(&BigInt::from(1))
}

static LN_CACHE: OnceLock<Mutex<HashMap<(u64, u32), ExtReal>>> = OnceLock::new();

/// ln(n) for a small integer constant, cached per (n, precision).
pub fn ln_u64(n: u64, prec: u32) -> ExtReal {
    let prec = prec.max(MIN_PRECISION);
    let cache = LN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(n, prec)) {
        return v.clone();
    }
    let v = ExtReal::from_u64(n, prec).ln();
    cache.lock().unwrap().insert((n, prec), v.clone());
    v
}

/// ln(2) at the requested precision.
pub fn ln2(prec: u32) -> ExtReal {
    let prec = prec.max(MIN_PRECISION);
    let cache = LN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(2, prec)) {
        return v.clone();
    }
    // ln 2 = 2 atanh(1/3); direct series rather than ln() to avoid recursion
    let w = prec + GUARD_BITS;
    let t = ExtReal::one(w).div(&ExtReal::from_u64(3, w));
    let t2 = t.mul(&t);
    let mut term = t.clone();
    let mut sum = t.clone();
    let mut j = 1i64;
    loop {
        term = term.mul(&t2);
        let contrib = term.div(&ExtReal::from_i64(2 * j + 1, w));
        if contrib.is_zero() || contrib.exponent() < &BigInt::from(-((w as i64) + 2)) {
            break;
        }
        sum = sum.add(&contrib);
        j += 1;
    }
    let v = sum.shl_exp(&BigInt::from(1)).with_prec(prec);
    cache.lock().unwrap().insert((2, prec), v.clone());
    v
}

/// `ln(e^acc + e^term)` computed as `max + ln(1 + e^(min-max))`.
/// `None` for the accumulator means an empty sum (log of zero).
pub fn log_sum_accumulate(acc: Option<&ExtReal>, term: &ExtReal) -> ExtReal {
    let acc = match acc {
        None => return term.clone(),
        Some(a) => a,
    };
    let prec = acc.precision().max(term.precision());
    let (hi, lo) = if acc >= term { (acc, term) } else { (term, acc) };
    let d = lo.sub(hi); // <= 0
    if d.is_zero() {
        return hi.add(&ln2(prec));
    }
    let df = d.to_f64();
    if df < -((prec as f64) + 64.0) {
        return hi.with_prec(prec);
    }
    let t = d.exp().expect("bounded logsumexp correction");
    hi.add(&t.ln_1p())
}
