//! Explicit permutations, product-action machinery, orbit computation and
//! invariance checks on small domains.
//!
//! Conventions, fixed once for the whole crate:
//! * points are 0-based internally; cycle notation is 1-based;
//! * all actions are right actions, and `g.compose(h)` is "apply `g`, then
//!   `h`": `apply(x, g*h) = apply(apply(x, g), h)`;
//! * tuples over a product domain are ranked lexicographically with
//!   coordinate 0 most significant.

use std::collections::HashSet;

use crate::{Error, Result};

/// Default cap on product-domain size for the explicit engine.
pub const DEFAULT_MAX_POINTS: usize = 1 << 20;

/// Default cap on brute-force group enumeration.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Build from an image table, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &img in &images {
            let i = img as usize;
            if i >= n || seen[i] {
                return Err(Error::Validation(
                    "image table is not a bijection".into(),
                ));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self * other`: apply `self` first, then `other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&m| other.images[m as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &m) in self.images.iter().enumerate() {
            inv[m as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &m)| i as u32 == m)
    }

    /// Parse 1-based cycle notation such as `(1 2 3)(4 5)`; `()` is the
    /// identity. A point may appear in at most one cycle.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(Error::Validation("empty cycle expression".into()));
        }
        while !rest.is_empty() {
            let open = rest.find('(').ok_or_else(|| {
                Error::Validation(format!("expected '(' in cycle notation near '{rest}'"))
            })?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::Validation(format!(
                    "unexpected text '{}' outside cycles",
                    &rest[..open]
                )));
            }
            let close = rest.find(')').ok_or_else(|| {
                Error::Validation("unbalanced parenthesis in cycle notation".into())
            })?;
            if close < open {
                return Err(Error::Validation("unbalanced parenthesis".into()));
            }
            let body = &rest[open + 1..close];
            rest = rest[close + 1..].trim_start();
            let mut cycle = Vec::new();
            for tok in body.split_whitespace() {
                let p: usize = tok
                    .parse()
                    .map_err(|_| Error::Validation(format!("invalid point '{tok}' in cycle")))?;
                if p == 0 || p > degree {
                    return Err(Error::Validation(format!(
                        "point {p} out of range 1..={degree}"
                    )));
                }
                let p0 = p - 1;
                if used[p0] {
                    return Err(Error::Validation(format!(
                        "point {p} appears twice; cycles must be disjoint"
                    )));
                }
                used[p0] = true;
                cycle.push(p0);
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p] = cycle[(i + 1) % cycle.len()] as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Canonical 1-based cycle notation; identity prints as `()`.
    pub fn to_cycles(&self) -> String {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            out.push('(');
            let mut p = start;
            let mut first = true;
            loop {
                seen[p] = true;
                if !first {
                    out.push(' ');
                }
                out.push_str(&(p + 1).to_string());
                first = false;
                p = self.apply(p);
                if p == start {
                    break;
                }
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_cycles())
    }
}

/// A permutation group given by degree and generators.
#[derive(Debug, Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::Validation(format!(
                    "generator degree {} does not match group degree {degree}",
                    g.degree()
                )));
            }
        }
        Ok(PermGroup { degree, generators })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Single orbit reaching every point, by BFS from point 0.
    pub fn is_transitive(&self) -> bool {
        if self.degree <= 1 {
            return true;
        }
        let part = orbits(&self.generators, self.degree);
        part.orbits.len() == 1
    }
}

/// Tuples `alphabet^coords` addressed by lexicographic rank.
#[derive(Debug, Clone)]
pub struct ProductDomain {
    alphabet: usize,
    coords: usize,
    points: usize,
    /// weight of coordinate i: alphabet^(coords-1-i)
    weights: Vec<usize>,
}

impl ProductDomain {
    pub fn new(alphabet: usize, coords: usize, max_points: usize) -> Result<Self> {
        if alphabet < 2 || coords == 0 {
            return Err(Error::Domain(format!(
                "product domain needs alphabet >= 2 and coords >= 1, got {alphabet}^{coords}"
            )));
        }
        let mut points: usize = 1;
        for _ in 0..coords {
            points = points
                .checked_mul(alphabet)
                .filter(|&p| p <= max_points)
                .ok_or_else(|| {
                    Error::Capacity(format!(
                        "product domain {alphabet}^{coords} exceeds the cap of {max_points} points"
                    ))
                })?;
        }
        let mut weights = vec![1usize; coords];
        for i in (0..coords.saturating_sub(1)).rev() {
            weights[i] = weights[i + 1] * alphabet;
        }
        Ok(ProductDomain {
            alphabet,
            coords,
            points,
            weights,
        })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn coords(&self) -> usize {
        self.coords
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn digit(&self, rank: usize, coord: usize) -> usize {
        (rank / self.weights[coord]) % self.alphabet
    }

    pub fn unrank(&self, rank: usize, out: &mut Vec<usize>) {
        out.clear();
        for c in 0..self.coords {
            out.push(self.digit(rank, c));
        }
    }

    pub fn rank(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.weights).map(|(&d, &w)| d * w).sum()
    }
}

/// Generators of the coordinate copy of `group` at `position`: each generator
/// acts on the chosen coordinate of every tuple and fixes the others.
pub fn coordinate_subgroup_generators(
    group: &PermGroup,
    position: usize,
    domain: &ProductDomain,
) -> Result<Vec<Permutation>> {
    if group.degree() != domain.alphabet() {
        return Err(Error::Domain(format!(
            "group degree {} does not match alphabet {}",
            group.degree(),
            domain.alphabet()
        )));
    }
    if position >= domain.coords() {
        return Err(Error::Domain(format!(
            "coordinate {position} out of range for {} coordinates",
            domain.coords()
        )));
    }
    let w = domain.weights[position];
    let m = domain.alphabet();
    let mut out = Vec::with_capacity(group.generators().len());
    for g in group.generators() {
        let mut images = vec![0u32; domain.points()];
        for (r, img) in images.iter_mut().enumerate() {
            let v = (r / w) % m;
            *img = (r - v * w + g.apply(v) * w) as u32;
        }
        out.push(Permutation { images });
    }
    Ok(out)
}

/// Generators of the top group permuting coordinates: a tuple `x` maps to the
/// tuple `y` with `y[i*h] = x[i]`, i.e. `y[j] = x[j * h^-1]`.
pub fn top_action_generators(
    coord_group: &PermGroup,
    domain: &ProductDomain,
) -> Result<Vec<Permutation>> {
    if coord_group.degree() != domain.coords() {
        return Err(Error::Domain(format!(
            "coordinate group degree {} does not match {} coordinates",
            coord_group.degree(),
            domain.coords()
        )));
    }
    let d = domain.coords();
    let mut out = Vec::with_capacity(coord_group.generators().len());
    let mut digits = Vec::with_capacity(d);
    for h in coord_group.generators() {
        let hinv = h.inverse();
        let mut images = vec![0u32; domain.points()];
        for (r, img) in images.iter_mut().enumerate() {
            domain.unrank(r, &mut digits);
            let mut y = 0usize;
            for (j, w) in domain.weights.iter().enumerate() {
                y += digits[hinv.apply(j)] * w;
            }
            *img = y as u32;
        }
        out.push(Permutation { images });
    }
    Ok(out)
}

/// One orbit: points sorted ascending, so `points[0]` is the minimal point.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub points: Vec<u32>,
}

impl Orbit {
    pub fn min_point(&self) -> u32 {
        self.points[0]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Orbits of a generator set, sorted by minimal point ascending.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    /// orbit index of every point
    pub orbit_of: Vec<u32>,
    pub orbits: Vec<Orbit>,
}

impl OrbitPartition {
    pub fn degree(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, orb) in self.orbits.iter().enumerate() {
            s.push_str(&format!(
                "orbit {i}: size {} min {} {{",
                orb.len(),
                orb.min_point()
            ));
            for (k, p) in orb.points.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(&p.to_string());
            }
            s.push_str("}\n");
        }
        s
    }
}

/// Breadth-first orbit computation. Scanning start points in ascending order
/// yields orbits already sorted by minimal point.
pub fn orbits(generators: &[Permutation], degree: usize) -> OrbitPartition {
    let mut orbit_of = vec![u32::MAX; degree];
    let mut orbits = Vec::new();
    let mut queue = Vec::new();
    for start in 0..degree {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        let id = orbits.len() as u32;
        orbit_of[start] = id;
        queue.clear();
        queue.push(start as u32);
        let mut head = 0;
        while head < queue.len() {
            let p = queue[head] as usize;
            head += 1;
            for g in generators {
                let q = g.apply(p);
                if orbit_of[q] == u32::MAX {
                    orbit_of[q] = id;
                    queue.push(q as u32);
                }
            }
        }
        let mut points = queue.clone();
        points.sort_unstable();
        orbits.push(Orbit { points });
    }
    OrbitPartition { orbit_of, orbits }
}

/// True iff every generator maps the set into itself.
pub fn is_invariant(points: &[u32], degree: usize, generators: &[Permutation]) -> bool {
    let mut member = vec![false; degree];
    for &p in points {
        member[p as usize] = true;
    }
    generators
        .iter()
        .all(|g| points.iter().all(|&p| member[g.apply(p as usize)]))
}

/// A set and its complement are invariant together; exposed as an executable
/// property.
pub fn complement_invariance_agrees(
    points: &[u32],
    degree: usize,
    generators: &[Permutation],
) -> bool {
    let mut member = vec![false; degree];
    for &p in points {
        member[p as usize] = true;
    }
    let complement: Vec<u32> = (0..degree as u32)
        .filter(|&p| !member[p as usize])
        .collect();
    is_invariant(points, degree, generators) == is_invariant(&complement, degree, generators)
}

/// Closure of the generators under composition, by breadth-first search on
/// words. Errors out once more than `cap` elements appear.
pub fn enumerate_group(
    generators: &[Permutation],
    degree: usize,
    cap: usize,
) -> Result<Vec<Permutation>> {
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut elements = Vec::new();
    let id = Permutation::identity(degree);
    seen.insert(id.clone());
    elements.push(id);
    let mut head = 0;
    while head < elements.len() {
        let current = elements[head].clone();
        head += 1;
        for g in generators {
            let next = current.compose(g);
            if !seen.contains(&next) {
                if elements.len() >= cap {
                    return Err(Error::Capacity(format!(
                        "group enumeration exceeded the cap of {cap} elements"
                    )));
                }
                seen.insert(next.clone());
                elements.push(next);
            }
        }
    }
    Ok(elements)
}
