//! Specification of the sequence of finite transitive permutation groups and
//! the "good sequence" condition.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;

use crate::arithmetic::ExtReal;
use crate::permgroup::{enumerate_group, PermGroup, Permutation, DEFAULT_ENUM_CAP};
use crate::{Error, Result};

/// Largest degree for which groups are materialized or factorials expanded.
pub const MAX_MATERIALIZED_DEGREE: usize = 1 << 20;

/// Horizon verdicts call a scanned sequence good while every log-order ratio
/// stays below this constant.
pub const GOODNESS_A_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Symmetric,
    Alternating,
    Cyclic,
    Custom,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "sym" | "symmetric" => Ok(Family::Symmetric),
            "alt" | "alternating" => Ok(Family::Alternating),
            "cyc" | "cyclic" => Ok(Family::Cyclic),
            "custom" => Ok(Family::Custom),
            other => Err(Error::Validation(format!("unknown family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Symmetric => "sym",
            Family::Alternating => "alt",
            Family::Cyclic => "cyc",
            Family::Custom => "custom",
        }
    }
}

/// One level of the sequence: a transitive permutation group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroupSpec {
    pub family: Family,
    pub degree: usize,
    /// cycle-notation generators; custom family only
    pub generators: Vec<String>,
}

impl PermGroupSpec {
    pub fn symmetric(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Validation("symmetric groups need degree >= 2".into()));
        }
        Ok(PermGroupSpec {
            family: Family::Symmetric,
            degree,
            generators: Vec::new(),
        })
    }

    pub fn alternating(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(Error::Validation(
                "alternating groups need degree >= 3 to act transitively".into(),
            ));
        }
        Ok(PermGroupSpec {
            family: Family::Alternating,
            degree,
            generators: Vec::new(),
        })
    }

    pub fn cyclic(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Validation("cyclic groups need degree >= 2".into()));
        }
        Ok(PermGroupSpec {
            family: Family::Cyclic,
            degree,
            generators: Vec::new(),
        })
    }

    pub fn custom(degree: usize, generators: Vec<String>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::Validation("custom groups need degree >= 2".into()));
        }
        let spec = PermGroupSpec {
            family: Family::Custom,
            degree,
            generators,
        };
        // parse and check transitivity eagerly
        standard_generators(&spec)?;
        Ok(spec)
    }

    pub fn describe(&self) -> String {
        format!("{}({})", self.family.name(), self.degree)
    }
}

/// Concrete generators for a level.
///
/// * symmetric m: `(1 2)` and `(1 2 ... m)`
/// * alternating m: `(1 2 3)` and `(1 2 ... m)` for odd m, `(2 3 ... m)` for even m
/// * cyclic m: `(1 2 ... m)`
/// * custom: the stated cycles, which must generate a transitive group
pub fn standard_generators(spec: &PermGroupSpec) -> Result<PermGroup> {
    let m = spec.degree;
    if m > MAX_MATERIALIZED_DEGREE {
        return Err(Error::Capacity(format!(
            "degree {m} too large to materialize generators"
        )));
    }
    let full_cycle = |from: usize| -> Permutation {
        let mut images: Vec<u32> = (0..m as u32).collect();
        for i in from..m {
            images[i] = if i + 1 < m { i as u32 + 1 } else { from as u32 };
        }
        Permutation::from_images(images).expect("cycle is a bijection")
    };
    let mut gens: Vec<Permutation> = Vec::new();
    let push_unique = |g: Permutation, gens: &mut Vec<Permutation>| {
        if !gens.contains(&g) {
            gens.push(g);
        }
    };
    match spec.family {
        Family::Symmetric => {
            push_unique(Permutation::parse_cycles("(1 2)", m)?, &mut gens);
            push_unique(full_cycle(0), &mut gens);
        }
        Family::Alternating => {
            push_unique(Permutation::parse_cycles("(1 2 3)", m)?, &mut gens);
            let long = if m % 2 == 1 { full_cycle(0) } else { full_cycle(1) };
            push_unique(long, &mut gens);
        }
        Family::Cyclic => {
            gens.push(full_cycle(0));
        }
        Family::Custom => {
            for text in &spec.generators {
                gens.push(Permutation::parse_cycles(text, m)?);
            }
        }
    }
    let group = PermGroup::new(m, gens)?;
    if !group.is_transitive() {
        return Err(Error::Validation(format!(
            "{} is not transitive on {m} points",
            spec.describe()
        )));
    }
    Ok(group)
}

fn factorial(n: u64) -> BigUint {
    fn range_product(lo: u64, hi: u64) -> BigUint {
        if hi - lo <= 8 {
            let mut p = BigUint::one();
            for k in lo..=hi {
                p *= BigUint::from(k);
            }
            p
        } else {
            let mid = lo + (hi - lo) / 2;
            range_product(lo, mid) * range_product(mid + 1, hi)
        }
    }
    if n < 2 {
        BigUint::one()
    } else {
        range_product(2, n)
    }
}

/// Exact group order.
pub fn group_order(spec: &PermGroupSpec) -> Result<BigUint> {
    match spec.family {
        Family::Symmetric => {
            cap_degree(spec.degree)?;
            Ok(factorial(spec.degree as u64))
        }
        Family::Alternating => {
            cap_degree(spec.degree)?;
            Ok(factorial(spec.degree as u64) / BigUint::from(2u8))
        }
        Family::Cyclic => Ok(BigUint::from(spec.degree)),
        Family::Custom => {
            let g = standard_generators(spec)?;
            let elems = enumerate_group(g.generators(), spec.degree, DEFAULT_ENUM_CAP)?;
            Ok(BigUint::from(elems.len()))
        }
    }
}

fn cap_degree(degree: usize) -> Result<()> {
    if degree > MAX_MATERIALIZED_DEGREE {
        return Err(Error::Capacity(format!(
            "degree {degree} too large for factorial order computation"
        )));
    }
    Ok(())
}

/// Natural log of the group order.
pub fn log_order(spec: &PermGroupSpec, prec: u32) -> Result<ExtReal> {
    let order = group_order(spec)?;
    Ok(ExtReal::from_biguint(&order, prec).ln())
}

/// Tail rule continuing the sequence beyond the explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule {
    /// repeat the last prefix level forever
    RepeatLast,
    /// named family with degree given by an affine formula in the level k
    Family { family: Family, formula: DegreeFormula },
}

/// Affine degree formula `slope*k + offset`, written `k+2`, `2*k`, `3*k+1`
/// or a plain constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeFormula {
    pub slope: i64,
    pub offset: i64,
}

impl DegreeFormula {
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_int = |t: &str| -> Result<i64> {
            t.parse()
                .map_err(|_| Error::Validation(format!("invalid number '{t}' in degree formula")))
        };
        if let Some(kpos) = s.find('k') {
            let slope = match &s[..kpos] {
                "" => 1,
                coef => {
                    let coef = coef.strip_suffix('*').ok_or_else(|| {
                        Error::Validation(format!("expected '<int>*k' in formula '{text}'"))
                    })?;
                    parse_int(coef)?
                }
            };
            let rest = &s[kpos + 1..];
            let offset = match rest {
                "" => 0,
                r if r.starts_with('+') => parse_int(&r[1..])?,
                r if r.starts_with('-') => -parse_int(&r[1..])?,
                r => {
                    return Err(Error::Validation(format!(
                        "unexpected '{r}' after 'k' in degree formula"
                    )))
                }
            };
            Ok(DegreeFormula { slope, offset })
        } else {
            Ok(DegreeFormula {
                slope: 0,
                offset: parse_int(&s)?,
            })
        }
    }

    pub fn eval(&self, k: usize) -> Result<usize> {
        let v = self
            .slope
            .checked_mul(k as i64)
            .and_then(|x| x.checked_add(self.offset))
            .ok_or_else(|| Error::Validation("degree formula overflows".into()))?;
        if v < 2 {
            return Err(Error::Validation(format!(
                "degree formula yields {v} < 2 at level {k}"
            )));
        }
        Ok(v as usize)
    }
}

impl std::fmt::Display for DegreeFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.slope, self.offset) {
            (0, b) => write!(f, "{b}"),
            (1, 0) => write!(f, "k"),
            (1, b) if b > 0 => write!(f, "k+{b}"),
            (1, b) => write!(f, "k{b}"),
            (a, 0) => write!(f, "{a}*k"),
            (a, b) if b > 0 => write!(f, "{a}*k+{b}"),
            (a, b) => write!(f, "{a}*k{b}"),
        }
    }
}

/// The full sequence: an explicit prefix plus a tail rule.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    prefix: Vec<PermGroupSpec>,
    tail: TailRule,
}

impl SequenceSpec {
    pub fn new(prefix: Vec<PermGroupSpec>, tail: TailRule) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Validation("sequence prefix must be non-empty".into()));
        }
        match &tail {
            TailRule::RepeatLast => {}
            TailRule::Family { family, formula } => {
                if *family == Family::Custom {
                    return Err(Error::Validation(
                        "formula tails must use a named family".into(),
                    ));
                }
                if formula.slope < 0 {
                    return Err(Error::Validation(
                        "degree formula must be non-decreasing; its degrees eventually drop below 2"
                            .into(),
                    ));
                }
                let first_tail = prefix.len() + 1;
                let d = formula.eval(first_tail)?;
                if *family == Family::Alternating && d < 3 {
                    return Err(Error::Validation(
                        "alternating tails need degree >= 3".into(),
                    ));
                }
            }
        }
        Ok(SequenceSpec { prefix, tail })
    }

    /// Constant sequence repeating one group.
    pub fn constant(spec: PermGroupSpec) -> Result<Self> {
        Self::new(vec![spec], TailRule::RepeatLast)
    }

    /// Named family with degrees from a formula, starting at level 1.
    pub fn family(family: Family, formula: DegreeFormula) -> Result<Self> {
        let first = formula.eval(1)?;
        let first_spec = match family {
            Family::Symmetric => PermGroupSpec::symmetric(first)?,
            Family::Alternating => PermGroupSpec::alternating(first)?,
            Family::Cyclic => PermGroupSpec::cyclic(first)?,
            Family::Custom => {
                return Err(Error::Validation(
                    "formula tails must use a named family".into(),
                ))
            }
        };
        Self::new(vec![first_spec], TailRule::Family { family, formula })
    }

    pub fn prefix(&self) -> &[PermGroupSpec] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// The group spec at 1-based level `k`.
    pub fn spec_at(&self, k: usize) -> Result<PermGroupSpec> {
        assert!(k >= 1, "levels are 1-based");
        if k <= self.prefix.len() {
            return Ok(self.prefix[k - 1].clone());
        }
        match &self.tail {
            TailRule::RepeatLast => Ok(self.prefix.last().unwrap().clone()),
            TailRule::Family { family, formula } => {
                let d = formula.eval(k)?;
                match family {
                    Family::Symmetric => PermGroupSpec::symmetric(d),
                    Family::Alternating => PermGroupSpec::alternating(d),
                    Family::Cyclic => PermGroupSpec::cyclic(d),
                    Family::Custom => unreachable!("rejected at construction"),
                }
            }
        }
    }

    pub fn degree_at(&self, k: usize) -> Result<usize> {
        Ok(self.spec_at(k)?.degree)
    }

    /// True when levels 1..=n all name the same group.
    pub fn is_constant_through(&self, n: usize) -> bool {
        let first = match self.spec_at(1) {
            Ok(s) => s,
            Err(_) => return false,
        };
        (2..=n).all(|k| self.spec_at(k).map_or(false, |s| s == first))
    }

    pub fn describe(&self) -> String {
        let prefix: Vec<String> = self.prefix.iter().map(|s| s.describe()).collect();
        match &self.tail {
            TailRule::RepeatLast => format!("[{}] repeating", prefix.join(", ")),
            TailRule::Family { family, formula } => {
                format!("[{}] then {}({})", prefix.join(", "), family.name(), formula)
            }
        }
    }

    /// Parse the TOML sequence-spec document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text)
            .map_err(|e| Error::Validation(format!("sequence spec parse error: {e}")))?;
        let mut prefix = Vec::new();
        for lvl in raw.levels {
            let family = Family::parse(&lvl.family)?;
            let spec = match family {
                Family::Symmetric => PermGroupSpec::symmetric(lvl.degree)?,
                Family::Alternating => PermGroupSpec::alternating(lvl.degree)?,
                Family::Cyclic => PermGroupSpec::cyclic(lvl.degree)?,
                Family::Custom => {
                    PermGroupSpec::custom(lvl.degree, lvl.generators.unwrap_or_default())?
                }
            };
            prefix.push(spec);
        }
        let tail = match raw.tail {
            None => TailRule::RepeatLast,
            Some(t) => match t.rule.as_str() {
                "repeat-last" => TailRule::RepeatLast,
                "family" => {
                    let family = Family::parse(&t.family.ok_or_else(|| {
                        Error::Validation("tail rule 'family' needs a family".into())
                    })?)?;
                    let formula = DegreeFormula::parse(&t.degree_formula.ok_or_else(|| {
                        Error::Validation("tail rule 'family' needs a degree_formula".into())
                    })?)?;
                    TailRule::Family { family, formula }
                }
                other => {
                    return Err(Error::Validation(format!(
                        "unknown tail rule '{other}' (expected 'repeat-last' or 'family')"
                    )))
                }
            },
        };
        SequenceSpec::new(prefix, tail)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }
}

#[derive(Deserialize)]
struct RawSpec {
    levels: Vec<RawLevel>,
    tail: Option<RawTail>,
}

#[derive(Deserialize)]
struct RawLevel {
    family: String,
    degree: usize,
    generators: Option<Vec<String>>,
}

#[derive(Deserialize)]
struct RawTail {
    rule: String,
    family: Option<String>,
    degree_formula: Option<String>,
}

/// Result of the good-sequence check.
#[derive(Debug, Clone)]
pub struct GoodnessReport {
    /// verdict over the checked horizon: all log-order ratios stayed under
    /// [`GOODNESS_A_CAP`]
    pub is_good: bool,
    /// analytic verdict from the tail rule, independent of the horizon
    pub analytic: Option<bool>,
    /// minimal feasible constant over the horizon (max of the ratios, at
    /// least 1), as an exact dyadic rational
    pub a_constant: BigRational,
    pub m0: usize,
    /// 1-based level of the worst ratio when the horizon verdict fails
    pub counterexample: Option<usize>,
    /// true when the scan did not reach the stable tail
    pub horizon_limited: bool,
    pub horizon: usize,
}

impl GoodnessReport {
    pub fn a_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a_constant.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Scan `log|S_k| <= A log|S_(k+1)|` over levels below the horizon and
/// combine with the analytic verdict for the tail rule.
///
/// Constant tails and non-decreasing named families are analytically good
/// (A = 1 beyond the prefix); the numeric `a_constant` additionally covers
/// every junction inside the prefix.
pub fn goodness_check(seq: &SequenceSpec, horizon: usize) -> Result<GoodnessReport> {
    if horizon < 2 {
        return Err(Error::Domain("goodness horizon must be at least 2".into()));
    }
    let prec = 96u32;
    let mut logs = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        logs.push(log_order(&seq.spec_at(k)?, prec)?);
    }
    let one = BigRational::one();
    let mut a = one.clone();
    let mut worst: Option<usize> = None;
    let cap = BigRational::from_integer(GOODNESS_A_CAP.into());
    let mut is_good = true;
    for k in 0..horizon - 1 {
        let ratio = logs[k].div(&logs[k + 1]).to_rational();
        if ratio > a {
            a = ratio.clone();
            worst = Some(k + 1);
        }
        if ratio > cap {
            is_good = false;
        }
    }
    // valid tails are analytically good: beyond the prefix the ratios are
    // identically 1 (repeat-last) or at most 1 (non-decreasing family)
    let analytic = Some(true);
    let horizon_limited = horizon < seq.prefix().len() + 1;
    Ok(GoodnessReport {
        is_good,
        analytic,
        a_constant: a,
        m0: 1,
        counterexample: if is_good { None } else { worst },
        horizon_limited,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn standard_generator_orders() {
        let a5 = standard_generators(&PermGroupSpec::alternating(5).unwrap()).unwrap();
        assert_eq!(enumerate_group(a5.generators(), 5, 1000).unwrap().len(), 60);
        let s2 = standard_generators(&PermGroupSpec::symmetric(2).unwrap()).unwrap();
        assert_eq!(enumerate_group(s2.generators(), 2, 10).unwrap().len(), 2);
        assert_eq!(s2.generators().len(), 1); // duplicate generator collapsed

        let c5 = PermGroupSpec::custom(5, vec!["(1 2 3 4 5)".into()]).unwrap();
        let g = standard_generators(&c5).unwrap();
        assert!(g.is_transitive());
        assert_eq!(enumerate_group(g.generators(), 5, 100).unwrap().len(), 5);
    }

    #[test]
    fn alternating_even_degree() {
        let a4 = standard_generators(&PermGroupSpec::alternating(4).unwrap()).unwrap();
        assert_eq!(enumerate_group(a4.generators(), 4, 100).unwrap().len(), 12);
        let a6 = standard_generators(&PermGroupSpec::alternating(6).unwrap()).unwrap();
        assert_eq!(
            enumerate_group(a6.generators(), 6, 1000).unwrap().len(),
            360
        );
    }

    #[test]
    fn non_transitive_custom_rejected() {
        let r = PermGroupSpec::custom(4, vec!["(1 2)".into()]);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn log_orders() {
        let p = 128;
        let alt5 = log_order(&PermGroupSpec::alternating(5).unwrap(), p).unwrap();
        assert!((alt5.to_f64() - 60f64.ln()).abs() < 1e-12);
        let sym2 = log_order(&PermGroupSpec::symmetric(2).unwrap(), p).unwrap();
        assert!((sym2.to_f64() - 2f64.ln()).abs() < 1e-12);
        // factorial oracle: |Sym(10)| = 3628800
        let sym10 = log_order(&PermGroupSpec::symmetric(10).unwrap(), p).unwrap();
        assert!((sym10.to_f64() - 3628800f64.ln()).abs() < 1e-10);
        assert_eq!(
            group_order(&PermGroupSpec::symmetric(10).unwrap()).unwrap(),
            BigUint::from(3628800u64)
        );
    }

    #[test]
    fn order_matches_enumeration_through_degree_8() {
        let mut specs = Vec::new();
        for d in 2..=8usize {
            specs.push(PermGroupSpec::symmetric(d).unwrap());
            specs.push(PermGroupSpec::cyclic(d).unwrap());
            if d >= 3 {
                specs.push(PermGroupSpec::alternating(d).unwrap());
            }
        }
        for spec in specs {
            let order = group_order(&spec).unwrap();
            let elems = enumerate_group(
                standard_generators(&spec).unwrap().generators(),
                spec.degree,
                DEFAULT_ENUM_CAP,
            )
            .unwrap();
            assert_eq!(order, BigUint::from(elems.len()), "{}", spec.describe());
        }
    }

    #[test]
    fn degree_formula_parsing() {
        let f = DegreeFormula::parse("k+2").unwrap();
        assert_eq!((f.slope, f.offset), (1, 2));
        assert_eq!(f.eval(3).unwrap(), 5);
        let f = DegreeFormula::parse("2*k").unwrap();
        assert_eq!(f.eval(4).unwrap(), 8);
        let f = DegreeFormula::parse("7").unwrap();
        assert_eq!(f.eval(100).unwrap(), 7);
        assert!(DegreeFormula::parse("k^2").is_err());
        assert!(DegreeFormula::parse("").is_err());
        // too small somewhere
        let f = DegreeFormula::parse("k-5").unwrap();
        assert!(f.eval(3).is_err());
    }

    #[test]
    fn sequence_resolution() {
        let seq = SequenceSpec::constant(PermGroupSpec::symmetric(2).unwrap()).unwrap();
        assert_eq!(seq.spec_at(10).unwrap().degree, 2);
        assert!(seq.is_constant_through(50));

        let fam =
            SequenceSpec::family(Family::Symmetric, DegreeFormula::parse("k+2").unwrap()).unwrap();
        assert_eq!(fam.degree_at(1).unwrap(), 3);
        assert_eq!(fam.degree_at(8).unwrap(), 10);
        assert!(!fam.is_constant_through(3));
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            [[levels]]
            family = "sym"
            degree = 50

            [[levels]]
            family = "custom"
            degree = 5
            generators = ["(1 2 3 4 5)"]

            [tail]
            rule = "repeat-last"
        "#;
        let seq = SequenceSpec::from_toml_str(text).unwrap();
        assert_eq!(seq.prefix().len(), 2);
        assert_eq!(seq.spec_at(2).unwrap().family, Family::Custom);
        assert_eq!(seq.spec_at(9).unwrap().degree, 5);

        let fam = r#"
            [[levels]]
            family = "alternating"
            degree = 5

            [tail]
            rule = "family"
            family = "alt"
            degree_formula = "k+4"
        "#;
        let seq = SequenceSpec::from_toml_str(fam).unwrap();
        assert_eq!(seq.degree_at(3).unwrap(), 7);

        assert!(SequenceSpec::from_toml_str("levels = []").is_err());
    }

    #[test]
    fn goodness_constant_and_family() {
        let seq = SequenceSpec::constant(PermGroupSpec::alternating(5).unwrap()).unwrap();
        let rep = goodness_check(&seq, 10).unwrap();
        assert!(rep.is_good);
        assert_eq!(rep.analytic, Some(true));
        assert_eq!(rep.a_constant, BigRational::one());
        assert_eq!(rep.m0, 1);
        assert!(!rep.horizon_limited);

        let fam =
            SequenceSpec::family(Family::Symmetric, DegreeFormula::parse("k+2").unwrap()).unwrap();
        let rep = goodness_check(&fam, 10).unwrap();
        assert!(rep.is_good);
        assert_eq!(rep.a_constant, BigRational::one());
    }

    #[test]
    fn goodness_junction_ratio() {
        // prefix [Sym(50), Sym(2)] repeating: A = ln(50!)/ln 2 at the junction
        let seq = SequenceSpec::new(
            vec![
                PermGroupSpec::symmetric(50).unwrap(),
                PermGroupSpec::symmetric(2).unwrap(),
            ],
            TailRule::RepeatLast,
        )
        .unwrap();
        let rep = goodness_check(&seq, 6).unwrap();
        assert!(rep.is_good);
        let expect = {
            let f50 = factorial(50).to_f64().unwrap().ln();
            f50 / 2f64.ln()
        };
        assert!((rep.a_f64() - expect).abs() / expect < 1e-12);
        assert_eq!(rep.m0, 1);
    }

    #[test]
    fn goodness_cap_violation() {
        // ln(100000!)/ln(2) > 10^6: the horizon verdict fails even though the
        // constant tail is analytically good
        let seq = SequenceSpec::new(
            vec![
                PermGroupSpec::symmetric(100_000).unwrap(),
                PermGroupSpec::cyclic(2).unwrap(),
            ],
            TailRule::RepeatLast,
        )
        .unwrap();
        let rep = goodness_check(&seq, 4).unwrap();
        assert!(!rep.is_good);
        assert_eq!(rep.counterexample, Some(1));
        assert_eq!(rep.analytic, Some(true));
        assert!(rep.a_f64() > 1.0e6);
    }
}
