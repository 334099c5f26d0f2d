//! The layer engine: the `(c_n, o_n)` orbit-parameter recursion at any
//! scale, and explicit base-product subgroups with invariant orbit selection
//! at small scale.
//!
//! Level by level, the base subgroup `K_n` is the product of coordinate
//! copies of `S_n` supported on the points selected at level `n-1`, and
//! `H_n = H_(n-1) * K_n` adds the lift of the previous group acting on
//! coordinates. `K_n` has equally sized orbits; their number `c_n` and size
//! `o_n` satisfy `c_n * o_n = |domain|`, and the next support is an
//! invariant union of a prescribed number of orbits.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arithmetic::{
    floor_drop_error_ln, floor_mul, log_sum_accumulate, mag_mul, mag_pow, mag_sub_exponent,
    ArithCtx, ExtReal, Magnitude, TowerReal,
};
use crate::permgroup::{
    coordinate_subgroup_generators, enumerate_group, is_invariant, orbits, top_action_generators,
    OrbitPartition, PermGroup, Permutation, ProductDomain,
};
use crate::sequences::{group_order, log_order, standard_generators, SequenceSpec};
use crate::{Error, Result};

/// Parameters of one level of the recursion.
#[derive(Debug, Clone)]
pub struct LayerParams {
    /// 1-based level n
    pub level: usize,
    /// degree m_n of the level group
    pub degree: usize,
    /// ln|S_n|
    pub log_order: ExtReal,
    /// domain size of the previous level (1 at level 1)
    pub mtilde_prev: Magnitude,
    /// domain size at this level
    pub mtilde: Magnitude,
    /// support size e_n = floor(alpha c_(n-1)) o_(n-1); absent at level 1
    pub e: Option<Magnitude>,
    /// orbit count of K_n
    pub c: Magnitude,
    /// common orbit size of K_n
    pub o: Magnitude,
    /// every quantity of this level is on the exact integer path
    pub exact: bool,
    /// exact floor deficit `alpha*mtilde_prev - e_n` when the floor was taken
    /// exactly; `None` on floor-dropped levels (the deficit is zero in the
    /// dropped model)
    pub delta: Option<BigRational>,
    /// ln of the accumulated relative error bound from dropped floors
    pub floor_error_ln: Option<ExtReal>,
}

fn check_alpha(alpha: &BigRational) -> Result<()> {
    if alpha.is_negative() || alpha > &BigRational::one() {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Run the orbit-parameter recursion for `levels` levels.
///
/// Seed: `c_1 = m_1`, `o_1 = 1`. Step: `e_(n+1) = floor(alpha c_n) o_n`,
/// `c_(n+1) = m_(n+1)^(mtilde_n - e_(n+1))`, `o_(n+1) = m_(n+1)^(e_(n+1))`.
///
/// Floors are taken exactly while `c_n` and `o_n` are exact. Once either is
/// promoted, the floor is dropped (`e = alpha*c*o`) and the complementary
/// exponent is formed as `(1-alpha)*c*o`, which keeps both exponents
/// consistent at any tower depth; the relative error bound of each drop, at
/// most `1/(alpha*c_n)`, accumulates into `floor_error_ln`.
pub fn layer_recursion(
    seq: &SequenceSpec,
    alpha: &BigRational,
    levels: usize,
    ctx: &ArithCtx,
) -> Result<Vec<LayerParams>> {
    check_alpha(alpha)?;
    if levels < 1 {
        return Err(Error::Domain("need at least one level".into()));
    }
    let prec = ctx.precision;
    let mut layers: Vec<LayerParams> = Vec::with_capacity(levels);

    let m1 = seq.degree_at(1)?;
    let l1 = log_order(&seq.spec_at(1)?, prec)?;
    let c1 = Magnitude::from_biguint(BigUint::from(m1), ctx);
    layers.push(LayerParams {
        level: 1,
        degree: m1,
        log_order: l1,
        mtilde_prev: Magnitude::one(),
        mtilde: c1.clone(),
        e: None,
        c: c1,
        o: Magnitude::one(),
        exact: true,
        delta: None,
        floor_error_ln: None,
    });

    let one = BigRational::one();
    for n in 2..=levels {
        let prev = layers.last().unwrap();
        let m_n = seq.degree_at(n)?;
        let l_n = log_order(&seq.spec_at(n)?, prec)?;
        let c_prev = prev.c.clone();
        let o_prev = prev.o.clone();
        let mtilde_prev = prev.mtilde.clone();
        let mut floor_error = prev.floor_error_ln.clone();

        let honest = c_prev.is_exact() && o_prev.is_exact();
        let (e_n, gap, delta) = if honest {
            let fl = floor_mul(alpha, &c_prev, ctx)?;
            let e = mag_mul(&fl, &o_prev, ctx);
            let gap = mag_sub_exponent(&mtilde_prev, &e, ctx)?;
            // delta = frac(alpha * c_prev) * o_prev, exactly
            let c_rat = BigRational::from_integer(c_prev.as_exact().unwrap().clone().into());
            let o_rat = BigRational::from_integer(o_prev.as_exact().unwrap().clone().into());
            let ac = alpha * &c_rat;
            let frac = &ac - ac.floor();
            (e, gap, Some(frac * o_rat))
        } else {
            let co = mag_mul(&c_prev, &o_prev, ctx);
            let e = floor_mul(alpha, &co, ctx)?;
            let gap = scale_big(&(&one - alpha), &co, ctx);
            if !alpha.is_zero() && alpha != &one {
                // bound terms beyond the representable range are absorbed;
                // the stored bound keeps its leading term
                if let Some(term) = floor_drop_error_ln(alpha, &c_prev, ctx) {
                    floor_error = Some(log_sum_accumulate(floor_error.as_ref(), &term));
                }
            }
            (e, gap, None)
        };

        let c_n = mag_pow(m_n as u64, &gap, ctx)?;
        let o_n = mag_pow(m_n as u64, &e_n, ctx)?;
        let mtilde_n = mag_pow(m_n as u64, &mtilde_prev, ctx)?;
        let exact =
            honest && e_n.is_exact() && c_n.is_exact() && o_n.is_exact() && mtilde_prev.is_exact();
        layers.push(LayerParams {
            level: n,
            degree: m_n,
            log_order: l_n,
            mtilde_prev,
            mtilde: mtilde_n,
            e: Some(e_n),
            c: c_n,
            o: o_n,
            exact,
            delta,
            floor_error_ln: floor_error,
        });
    }
    Ok(layers)
}

/// `r * x` for a magnitude on the promoted path.
fn scale_big(r: &BigRational, x: &Magnitude, ctx: &ArithCtx) -> Magnitude {
    if r.is_zero() || x.is_zero() {
        return Magnitude::zero();
    }
    if r.is_one() {
        return x.clone();
    }
    match x {
        Magnitude::Big(t) => Magnitude::Big(t.mul_rational(r, ctx.precision)),
        Magnitude::Exact(n) => Magnitude::Big(
            TowerReal::from_biguint(n, ctx.precision).mul_rational(r, ctx.precision),
        ),
    }
}

/// One explicitly constructed level.
#[derive(Debug, Clone)]
pub struct ExplicitLayer {
    /// level n >= 2
    pub level: usize,
    pub domain: ProductDomain,
    /// coordinate positions supporting K_n (the previous level's selection)
    pub k_support: Vec<u32>,
    pub k_generators: Vec<Permutation>,
    /// lifts of the previous level's generators followed by `k_generators`
    pub h_generators: Vec<Permutation>,
    /// orbits of K_n on the domain
    pub partition: OrbitPartition,
    /// indices of the selected orbits, ascending
    pub selected_orbits: Vec<usize>,
    /// union of the selected orbits, sorted ascending
    pub selected_points: Vec<u32>,
}

impl ExplicitLayer {
    pub fn orbit_count(&self) -> usize {
        self.partition.orbits.len()
    }

    /// Text export: generators in cycle notation plus orbits and selection.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "level {}: domain {}^{} = {} points\n",
            self.level,
            self.domain.alphabet(),
            self.domain.coords(),
            self.domain.points()
        ));
        s.push_str(&format!("k_support: {:?}\n", self.k_support));
        for (i, g) in self.k_generators.iter().enumerate() {
            s.push_str(&format!("k_gen {i}: {}\n", g.to_cycles()));
        }
        for (i, g) in self.h_generators.iter().enumerate() {
            s.push_str(&format!("h_gen {i}: {}\n", g.to_cycles()));
        }
        s.push_str(&self.partition.to_text());
        s.push_str(&format!("selected orbits: {:?}\n", self.selected_orbits));
        s
    }
}

/// Result of the explicit construction: the levels that fit under the point
/// cap, plus a truncation marker naming the first level that did not fit.
#[derive(Debug)]
pub struct ExplicitBuild {
    pub layers: Vec<ExplicitLayer>,
    pub truncated_at: Option<usize>,
}

/// Build levels 2.. explicitly while the product domain fits `max_points`
/// and the level count stays within `max_levels`.
pub fn explicit_layers(
    seq: &SequenceSpec,
    alpha: &BigRational,
    max_points: usize,
    max_levels: usize,
) -> Result<ExplicitBuild> {
    check_alpha(alpha)?;
    let m1 = seq.degree_at(1)?;
    // level-1 selection: the first floor(alpha*m_1) points
    let count1 = floor_of_ratio(alpha, m1);
    let mut support: Vec<u32> = (0..count1 as u32).collect();
    let mut prev_points = m1;
    let mut prev_h: Vec<Permutation> = Vec::new();
    let mut layers = Vec::new();
    let mut truncated_at = None;

    for n in 2..=max_levels {
        let m_n = seq.degree_at(n)?;
        let domain = match ProductDomain::new(m_n, prev_points, max_points) {
            Ok(d) => d,
            Err(Error::Capacity(_)) => {
                truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        };
        let s_n = standard_generators(&seq.spec_at(n)?)?;
        let mut k_gens = Vec::new();
        for &p in &support {
            k_gens.extend(coordinate_subgroup_generators(&s_n, p as usize, &domain)?);
        }
        let prev_group = PermGroup::new(prev_points, prev_h.clone())?;
        let mut h_gens = top_action_generators(&prev_group, &domain)?;
        h_gens.extend(k_gens.iter().cloned());

        let partition = orbits(&k_gens, domain.points());
        let count = floor_of_ratio(alpha, partition.orbits.len());
        let selected_orbits = select_invariant_orbit_union(&partition, count, &h_gens)?;
        let mut selected_points: Vec<u32> = selected_orbits
            .iter()
            .flat_map(|&i| partition.orbits[i].points.iter().copied())
            .collect();
        selected_points.sort_unstable();

        prev_points = domain.points();
        prev_h = h_gens.clone();
        let layer = ExplicitLayer {
            level: n,
            domain,
            k_support: support,
            k_generators: k_gens,
            h_generators: h_gens,
            partition,
            selected_orbits,
            selected_points,
        };
        support = layer.selected_points.clone();
        layers.push(layer);
    }
    Ok(ExplicitBuild {
        layers,
        truncated_at,
    })
}

fn floor_of_ratio(alpha: &BigRational, n: usize) -> usize {
    let v = alpha * BigRational::from_integer(n.into());
    v.floor().to_integer().to_usize().expect("count fits usize")
}

/// Pick a union of exactly `count` orbits that is invariant under all
/// `h_generators`.
///
/// The generators induce a permutation action on orbit labels; its orbits
/// ("blocks") are the atoms of any invariant union. Blocks are taken
/// greedily in ascending order of their minimal point, backtracking as
/// needed to reach `count` exactly; the first solution in that order is the
/// canonical one.
pub fn select_invariant_orbit_union(
    partition: &OrbitPartition,
    count: usize,
    h_generators: &[Permutation],
) -> Result<Vec<usize>> {
    let n_orbits = partition.orbits.len();
    if count > n_orbits {
        return Err(Error::Domain(format!(
            "cannot select {count} orbits out of {n_orbits}"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    // induced action on labels, checked to be well defined
    let mut label_perms = Vec::with_capacity(h_generators.len());
    for g in h_generators {
        let mut img = vec![u32::MAX; n_orbits];
        for p in 0..partition.degree() {
            let a = partition.orbit_of[p] as usize;
            let b = partition.orbit_of[g.apply(p)];
            if img[a] == u32::MAX {
                img[a] = b;
            } else if img[a] != b {
                return Err(Error::Inconsistency(
                    "generator does not permute the orbit partition".into(),
                ));
            }
        }
        label_perms.push(
            Permutation::from_images(img)
                .map_err(|_| Error::Inconsistency("induced label map is not a permutation".into()))?,
        );
    }
    // blocks come out ordered by minimal label, which is minimal-point order
    let blocks = orbits(&label_perms, n_orbits);
    let sizes: Vec<usize> = blocks.orbits.iter().map(|b| b.len()).collect();
    let mut suffix = vec![0usize; sizes.len() + 1];
    for i in (0..sizes.len()).rev() {
        suffix[i] = suffix[i + 1] + sizes[i];
    }

    fn search(
        sizes: &[usize],
        suffix: &[usize],
        i: usize,
        remaining: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if remaining == 0 {
            return true;
        }
        if i >= sizes.len() || suffix[i] < remaining {
            return false;
        }
        if sizes[i] <= remaining {
            chosen.push(i);
            if search(sizes, suffix, i + 1, remaining - sizes[i], chosen) {
                return true;
            }
            chosen.pop();
        }
        search(sizes, suffix, i + 1, remaining, chosen)
    }

    let mut chosen = Vec::new();
    if !search(&sizes, &suffix, 0, count, &mut chosen) {
        let mut block_sizes = sizes;
        block_sizes.sort_unstable();
        return Err(Error::SelectionInfeasible {
            wanted: count,
            block_sizes,
        });
    }
    let mut selected: Vec<usize> = chosen
        .iter()
        .flat_map(|&b| blocks.orbits[b].points.iter().map(|&l| l as usize))
        .collect();
    selected.sort_unstable();
    Ok(selected)
}

/// One named check of a verification report.
#[derive(Debug, Clone)]
pub struct LayerCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Verification report for one explicit level.
#[derive(Debug, Clone)]
pub struct LayerReport {
    pub level: usize,
    pub checks: Vec<LayerCheck>,
}

impl LayerReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Caps for the optional order check inside [`verify_layer`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub enum_cap: usize,
    /// skip enumeration when order * degree exceeds this many table cells
    pub max_enum_cells: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            enum_cap: crate::permgroup::DEFAULT_ENUM_CAP,
            max_enum_cells: 50_000_000,
        }
    }
}

/// Check an explicit layer against the recursion parameters: orbit count and
/// common size, the product identity with the domain size, invariance of the
/// selected union, the group order by closure enumeration where feasible,
/// and normalization of the base by the full generator set.
pub fn verify_layer(
    explicit: &ExplicitLayer,
    params: &[LayerParams],
    seq: &SequenceSpec,
    opts: &VerifyOptions,
) -> Result<LayerReport> {
    let n = explicit.level;
    let layer = params
        .iter()
        .find(|l| l.level == n)
        .ok_or_else(|| Error::Domain(format!("no recursion parameters for level {n}")))?;
    let mut checks = Vec::new();

    // (a) orbit count and common orbit size
    let c_explicit = Magnitude::from_u64(explicit.orbit_count() as u64);
    let count_ok = layer.c.cmp_value(&c_explicit) == std::cmp::Ordering::Equal;
    let common = explicit.partition.orbits[0].len();
    let sizes_equal = explicit.partition.orbits.iter().all(|o| o.len() == common);
    let size_ok = sizes_equal
        && layer.o.cmp_value(&Magnitude::from_u64(common as u64)) == std::cmp::Ordering::Equal;
    checks.push(LayerCheck {
        name: "orbit-count".into(),
        pass: count_ok,
        detail: format!("{} orbits, expected {}", explicit.orbit_count(), layer.c),
    });
    checks.push(LayerCheck {
        name: "orbit-size".into(),
        pass: size_ok,
        detail: format!("common size {common}, expected {}", layer.o),
    });

    // (b) count * size = domain size
    let prod_ok = explicit.orbit_count() * common == explicit.domain.points();
    checks.push(LayerCheck {
        name: "count-times-size".into(),
        pass: prod_ok,
        detail: format!(
            "{} * {common} vs {} points",
            explicit.orbit_count(),
            explicit.domain.points()
        ),
    });

    // (c) invariance of the selected union under every generator
    let inv_ok = is_invariant(
        &explicit.selected_points,
        explicit.domain.points(),
        &explicit.h_generators,
    );
    checks.push(LayerCheck {
        name: "selection-invariant".into(),
        pass: inv_ok,
        detail: format!(
            "{} selected orbits, {} points",
            explicit.selected_orbits.len(),
            explicit.selected_points.len()
        ),
    });

    // group order: |H_n| = prod |S_j|^(e_j), enumerated when small enough
    let mut expected_order = BigUint::one();
    let mut have_exact_order = true;
    for l in params.iter().filter(|l| l.level >= 2 && l.level <= n) {
        match l.e.as_ref().and_then(|e| e.as_exact()).and_then(|e| e.to_u32()) {
            Some(exp) => {
                let s_order = group_order(&seq.spec_at(l.level)?)?;
                expected_order *= s_order.pow(exp);
            }
            None => have_exact_order = false,
        }
    }
    if have_exact_order {
        let small_enough = expected_order
            .to_usize()
            .map(|ord| {
                ord <= opts.enum_cap
                    && ord.saturating_mul(explicit.domain.points()) <= opts.max_enum_cells
            })
            .unwrap_or(false);
        if small_enough {
            let elems = enumerate_group(
                &explicit.h_generators,
                explicit.domain.points(),
                opts.enum_cap,
            )?;
            let pass = BigUint::from(elems.len()) == expected_order;
            checks.push(LayerCheck {
                name: "group-order".into(),
                pass,
                detail: format!("enumerated {}, expected {expected_order}", elems.len()),
            });
        }
    }

    // normalization: conjugates of base generators stay supported on the
    // base coordinates
    let mut norm_ok = true;
    let mut witness = String::new();
    let mut in_support = vec![false; explicit.domain.coords()];
    for &p in &explicit.k_support {
        in_support[p as usize] = true;
    }
    'outer: for h in &explicit.h_generators {
        let hinv = h.inverse();
        for k in &explicit.k_generators {
            let conj = hinv.compose(k).compose(h);
            for r in 0..explicit.domain.points() {
                let s = conj.apply(r);
                if s == r {
                    continue;
                }
                for coord in 0..explicit.domain.coords() {
                    if explicit.domain.digit(r, coord) != explicit.domain.digit(s, coord)
                        && !in_support[coord]
                    {
                        norm_ok = false;
                        witness =
                            format!("conjugate moves coordinate {coord} outside the support");
                        break 'outer;
                    }
                }
            }
        }
    }
    checks.push(LayerCheck {
        name: "base-normalized".into(),
        pass: norm_ok,
        detail: if norm_ok {
            "conjugated base generators stay on the support".into()
        } else {
            witness
        },
    });

    Ok(LayerReport { level: n, checks })
}
