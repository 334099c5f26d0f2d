//! Dimension quotients, their residuals, and convergence diagnostics.
//!
//! With `a'_n = mtilde_(n-1) * ln|S_n|` and `b_n = e_n * ln|S_n|`, the
//! quotient at level n is `D_n = (sum of b_k, k=2..n) / (sum of a'_k,
//! k=1..n)`. The residual `alpha - D_n` is evaluated structurally as
//! `U_n / A_n`, where `U_n = alpha*a'_1 + sum of delta_k * ln|S_k|` collects
//! the exact floor deficits: the two huge sums cancel to a telescoped small
//! numerator, so the residual survives long after `D_n` itself rounds to
//! `alpha` at any fixed significand width.

use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arithmetic::{ln2, ArithCtx, ExtReal, Magnitude, TowerReal};
use crate::construction::LayerParams;
use crate::sequences::SequenceSpec;
use crate::{Error, Result};

/// One level of the dimension trace.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub level: usize,
    pub degree: usize,
    pub mtilde_prev: Magnitude,
    pub c: Magnitude,
    pub o: Magnitude,
    pub e: Option<Magnitude>,
    /// a'_n = mtilde_(n-1) * ln|S_n|
    pub a_term: TowerReal,
    /// b_n; `None` while e_n = 0 (and at level 1)
    pub b_term: Option<TowerReal>,
    /// sum of a'_k for k <= n
    pub sum_a: TowerReal,
    /// sum of a'_k for 2 <= k <= n
    pub sum_a_from2: Option<TowerReal>,
    /// sum of b_k for 2 <= k <= n
    pub sum_b: Option<TowerReal>,
    /// U_n = alpha * (sum of a'_k) - (sum of b_k), assembled from exact
    /// floor deficits
    pub deficit: ExtReal,
    pub d_value: f64,
    /// exact rational quotient, available on the all-exact prefix of a
    /// constant sequence where the common log-order cancels
    pub d_exact: Option<BigRational>,
    pub residual: f64,
    pub floor_error_ln: Option<ExtReal>,
}

#[derive(Debug)]
pub struct DimensionTrace {
    pub alpha: BigRational,
    pub sequence: String,
    pub rows: Vec<TraceRow>,
}

impl DimensionTrace {
    pub fn final_row(&self) -> &TraceRow {
        self.rows.last().expect("trace has at least one level")
    }
}

/// Evaluate the trace over recursion layers.
pub fn dimension_trace(
    layers: &[LayerParams],
    seq: &SequenceSpec,
    alpha: &BigRational,
    ctx: &ArithCtx,
) -> Result<DimensionTrace> {
    if layers.is_empty() {
        return Err(Error::Domain("empty layer list".into()));
    }
    let prec = ctx.precision;
    let alpha_f = alpha.to_f64().unwrap_or(f64::NAN);
    let alpha_zero = alpha.is_zero();

    let mut rows: Vec<TraceRow> = Vec::with_capacity(layers.len());
    let mut sum_a: Option<TowerReal> = None;
    let mut sum_a2: Option<TowerReal> = None;
    let mut sum_b: Option<TowerReal> = None;
    let mut deficit = ExtReal::zero(prec);
    // exact exponent sums for the rational quotient of constant sequences
    let mut exact_sums: Option<(BigUint, BigUint)> = Some((BigUint::zero(), BigUint::zero()));

    for layer in layers {
        let n = layer.level;
        let l_n = TowerReal::from_extreal(layer.log_order.clone());
        let a_term = layer
            .mtilde_prev
            .to_tower(prec)
            .expect("domain sizes are positive")
            .mul(&l_n);
        let b_term = layer
            .e
            .as_ref()
            .and_then(|e| e.to_tower(prec))
            .map(|t| t.mul(&l_n));
        sum_a = Some(match &sum_a {
            None => a_term.clone(),
            Some(s) => s.add(&a_term),
        });
        if n >= 2 {
            sum_a2 = Some(match &sum_a2 {
                None => a_term.clone(),
                Some(s) => s.add(&a_term),
            });
            if let Some(b) = &b_term {
                sum_b = Some(match &sum_b {
                    None => b.clone(),
                    Some(s) => s.add(b),
                });
            }
        }

        // structural numerator of alpha - D_n
        if n == 1 {
            if !alpha_zero {
                deficit = ExtReal::from_rational(alpha, prec).mul(&layer.log_order);
            }
        } else if let Some(delta) = &layer.delta {
            if !delta.is_zero() {
                deficit = deficit.add(&ExtReal::from_rational(delta, prec).mul(&layer.log_order));
            }
        }

        // exact rational quotient while everything is exact and the
        // sequence is constant so far
        exact_sums = exact_sums.take().and_then(|(es, ms)| {
            let m_prev = layer.mtilde_prev.as_exact()?;
            let e_val = if n == 1 {
                BigUint::zero()
            } else {
                layer.e.as_ref()?.as_exact()?.clone()
            };
            Some((es + e_val, ms + m_prev))
        });
        if !seq.is_constant_through(n) {
            exact_sums = None;
        }
        let d_exact = exact_sums.as_ref().map(|(es, ms)| {
            BigRational::new(es.clone().into(), ms.clone().into())
        });

        let (residual, d_value) = if alpha_zero {
            (0.0, 0.0)
        } else {
            let r = TowerReal::from_extreal(deficit.clone())
                .ratio_f64(sum_a.as_ref().unwrap());
            (r, (alpha_f - r).clamp(0.0, 1.0))
        };

        rows.push(TraceRow {
            level: n,
            degree: layer.degree,
            mtilde_prev: layer.mtilde_prev.clone(),
            c: layer.c.clone(),
            o: layer.o.clone(),
            e: layer.e.clone(),
            a_term,
            b_term,
            sum_a: sum_a.clone().unwrap(),
            sum_a_from2: sum_a2.clone(),
            sum_b: sum_b.clone(),
            deficit: deficit.clone(),
            d_value,
            d_exact,
            residual,
            floor_error_ln: layer.floor_error_ln.clone(),
        });
    }
    Ok(DimensionTrace {
        alpha: alpha.clone(),
        sequence: seq.describe(),
        rows,
    })
}

/// First level n with `floor(alpha c_n) >= 1`, i.e. the level before the
/// first layer with a nonzero support.
pub fn first_effective_level(layers: &[LayerParams]) -> Option<usize> {
    layers
        .iter()
        .find(|l| l.e.as_ref().map_or(false, |e| !e.is_zero()))
        .map(|l| l.level - 1)
}

/// Strict decrease of the residual for every consecutive pair of levels from
/// `from_level` on, decided by exact cross-multiplication of the stored
/// fractions `U_n / A_n` in tower arithmetic.
pub fn residual_strictly_decreasing(trace: &DimensionTrace, from_level: usize) -> bool {
    let rows: Vec<&TraceRow> = trace
        .rows
        .iter()
        .filter(|r| r.level >= from_level)
        .collect();
    rows.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        if a.deficit.is_zero() || b.deficit.is_zero() {
            return false;
        }
        // U_a * A_b > U_b * A_a  <=>  res_a > res_b
        let lhs = TowerReal::from_extreal(a.deficit.clone()).mul(&b.sum_a);
        let rhs = TowerReal::from_extreal(b.deficit.clone()).mul(&a.sum_a);
        lhs > rhs
    })
}

/// CSV export. `repr` columns print decimal digits while exact and
/// `log2~X` once promoted; the error bound prints as a power of two.
pub fn write_csv<W: Write>(trace: &DimensionTrace, out: &mut W) -> Result<()> {
    writeln!(
        out,
        "n,m_n,mtilde_prev,c_n,o_n,floor_term,log2_b_n,log2_a_n,D_n,residual,error_bound"
    )?;
    for r in &trace.rows {
        let floor_term = r.e.as_ref().map_or(String::new(), |e| e.repr());
        let log2_b = r
            .b_term
            .as_ref()
            .map_or(String::new(), |b| b.log2_string());
        let log2_a = r.a_term.log2_string();
        let err = match &r.floor_error_ln {
            None => "0".to_string(),
            Some(ln) => {
                let l2 = ln.div(&ln2(ln.precision()));
                format!("2^{}", l2.to_sci())
            }
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.level,
            r.degree,
            r.mtilde_prev.repr(),
            r.c.repr(),
            r.o.repr(),
            floor_term,
            log2_b,
            log2_a,
            r.d_value,
            r.residual,
            err
        )?;
    }
    Ok(())
}

/// Growth facts about the domain-size sequence.
#[derive(Debug)]
pub struct GrowthReport {
    /// (n, mtilde_(n-1)/mtilde_n) for n >= 2, saturating to 0 below f64 range
    pub ratios: Vec<(usize, f64)>,
    /// (C, least M with C*mtilde_(n-1) <= mtilde_n for all computed n >= M)
    pub thresholds: Vec<(u64, usize)>,
}

/// Verify `mtilde_n >= n` at every level and compute the shrink ratios and
/// the M(C) thresholds over the computed horizon.
pub fn growth_diagnostics(layers: &[LayerParams], c_list: &[u64]) -> Result<GrowthReport> {
    for l in layers {
        if l.mtilde.cmp_value(&Magnitude::from_u64(l.level as u64)) == std::cmp::Ordering::Less {
            return Err(Error::Inconsistency(format!(
                "domain size at level {} dropped below the level index",
                l.level
            )));
        }
    }
    let prec = 96;
    let mut ratios = Vec::new();
    for l in layers.iter().filter(|l| l.level >= 2) {
        let num = l.mtilde_prev.to_tower(prec).unwrap();
        let den = l.mtilde.to_tower(prec).unwrap();
        ratios.push((l.level, num.ratio_f64(&den)));
    }
    let mut thresholds = Vec::new();
    let ctx = ArithCtx::new(prec, 1 << 20);
    for &c in c_list {
        let mut last_bad = 1usize;
        for l in layers.iter().filter(|l| l.level >= 2) {
            let scaled = crate::arithmetic::mag_mul(
                &Magnitude::from_u64(c),
                &l.mtilde_prev,
                &ctx,
            );
            if scaled.cmp_value(&l.mtilde) == std::cmp::Ordering::Greater {
                last_bad = l.level;
            }
        }
        thresholds.push((c, (last_bad + 1).max(2)));
    }
    Ok(GrowthReport { ratios, thresholds })
}

/// Per-level convergence diagnostics.
#[derive(Debug, Clone, Default)]
pub struct ClaimRow {
    pub level: usize,
    /// selected fraction e_(n+1)/mtilde_n of the next level; tends to alpha
    pub support_ratio: Option<f64>,
    /// exact value of the selected fraction while the floor is exact
    pub support_ratio_exact: Option<BigRational>,
    /// (sum of a'_k, 2..n) / a'_n; tends to 1
    pub sum_a_ratio: Option<f64>,
    /// (sum of b_k, 2..n) / b_n; tends to 1
    pub sum_b_ratio: Option<f64>,
    /// a'_(n-1)/a'_n; tends to 0
    pub head_ratio: Option<f64>,
    /// 2 a'_(n-1) <= a'_n
    pub doubling_ok: Option<bool>,
    /// sum of a'_k for M(2) <= k <= n stays within 2 a'_n (for n >= M(2))
    pub tail_sum_ok: Option<bool>,
    /// sum of a'_k for 2 <= k <= n stays within 3 a'_n (for n >= M-hat)
    pub full_sum_ok: Option<bool>,
}

#[derive(Debug)]
pub struct ClaimsReport {
    pub rows: Vec<ClaimRow>,
    /// least M with 2 a'_(k-1) <= a'_k for all computed k >= M
    pub m2: usize,
    /// max(M(2)+1, M(M(2)))
    pub m_hat: usize,
    /// requested (C, M(C)) on the a'-sequence
    pub thresholds: Vec<(u64, usize)>,
}

/// Evaluate the growth claims and limit sequences over the computed horizon.
/// All comparisons run in tower arithmetic; reported f64 ratios saturate.
pub fn claim_diagnostics(
    layers: &[LayerParams],
    alpha: &BigRational,
    c_list: &[u64],
    ctx: &ArithCtx,
) -> Result<ClaimsReport> {
    let prec = ctx.precision;
    let n_levels = layers.len();
    let a: Vec<TowerReal> = layers
        .iter()
        .map(|l| {
            l.mtilde_prev
                .to_tower(prec)
                .unwrap()
                .mul(&TowerReal::from_extreal(l.log_order.clone()))
        })
        .collect();
    let b: Vec<Option<TowerReal>> = layers
        .iter()
        .map(|l| {
            l.e.as_ref()
                .and_then(|e| e.to_tower(prec))
                .map(|t| t.mul(&TowerReal::from_extreal(l.log_order.clone())))
        })
        .collect();

    let threshold_for = |c: u64| -> usize {
        let cf = ExtReal::from_u64(c, prec);
        let mut last_bad = 1usize;
        for k in 1..n_levels {
            if a[k - 1].mul_extreal(&cf) > a[k] {
                last_bad = k + 1; // level index of a[k]
            }
        }
        (last_bad + 1).max(2)
    };
    let m2 = threshold_for(2);
    let m_hat = (m2 + 1).max(threshold_for(m2 as u64));
    let thresholds: Vec<(u64, usize)> = c_list.iter().map(|&c| (c, threshold_for(c))).collect();

    let two = ExtReal::from_u64(2, prec);
    let three = ExtReal::from_u64(3, prec);
    let mut rows = Vec::with_capacity(n_levels);
    let mut sum_a2: Option<TowerReal> = None;
    let mut sum_b: Option<TowerReal> = None;
    let mut sum_tail: Option<TowerReal> = None; // from level M(2)
    for (i, layer) in layers.iter().enumerate() {
        let n = layer.level;
        let mut row = ClaimRow {
            level: n,
            ..Default::default()
        };
        if n >= 2 {
            sum_a2 = Some(match &sum_a2 {
                None => a[i].clone(),
                Some(s) => s.add(&a[i]),
            });
            if let Some(bt) = &b[i] {
                sum_b = Some(match &sum_b {
                    None => bt.clone(),
                    Some(s) => s.add(bt),
                });
            }
            row.sum_a_ratio = sum_a2.as_ref().map(|s| s.ratio_f64(&a[i]));
            row.sum_b_ratio = match (&sum_b, &b[i]) {
                (Some(s), Some(bt)) => Some(s.ratio_f64(bt)),
                _ => None,
            };
            row.head_ratio = Some(a[i - 1].ratio_f64(&a[i]));
            row.doubling_ok = Some(!(a[i - 1].mul_extreal(&two) > a[i]));
        }
        if n >= m2 {
            sum_tail = Some(match &sum_tail {
                None => a[i].clone(),
                Some(s) => s.add(&a[i]),
            });
            row.tail_sum_ok = sum_tail
                .as_ref()
                .map(|s| !(s.clone() > a[i].mul_extreal(&two)));
        }
        if n >= m_hat {
            row.full_sum_ok = sum_a2
                .as_ref()
                .map(|s| !(s.clone() > a[i].mul_extreal(&three)));
        }
        // selected fraction of the next level
        if i + 1 < n_levels {
            let next = &layers[i + 1];
            if let Some(e_next) = &next.e {
                if let Some(delta) = &next.delta {
                    if let Some(m_exact) = layer.mtilde.as_exact() {
                        let m_rat = BigRational::from_integer(m_exact.clone().into());
                        let exact = alpha - delta / &m_rat;
                        row.support_ratio = exact.to_f64();
                        row.support_ratio_exact = Some(exact);
                    }
                } else if e_next.is_zero() {
                    row.support_ratio = Some(0.0);
                    row.support_ratio_exact = Some(BigRational::zero());
                } else {
                    // floor dropped: the modeled fraction is exactly alpha
                    row.support_ratio = alpha.to_f64();
                    row.support_ratio_exact = Some(alpha.clone());
                }
            }
        }
        rows.push(row);
    }
    Ok(ClaimsReport {
        rows,
        m2,
        m_hat,
        thresholds,
    })
}
