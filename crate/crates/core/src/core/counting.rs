use crate::core::{Graph, Rational, ThreeGraph, VertexSet};
use crate::{Error, Result};

/// Count of ordered pairs `(a,b) in x×y` with `ab` an edge.
pub(crate) fn ordered_pair_count(g: &Graph, x: &VertexSet, y: &VertexSet) -> usize {
    let rows = g.rows();
    x.iter().map(|a| rows[a].intersect_count(y)).sum()
}

/// Ordered-pair edge density `d(x, y)` over `x × y`.
pub fn density2(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<Rational> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::domain("empty side".to_string()));
    }
    if !x.within_range(g.n()) || !y.within_range(g.n()) {
        return Err(Error::domain("density side outside vertex range".to_string()));
    }
    let e = ordered_pair_count(g, x, y);
    Ok(&Rational::from(e) / &Rational::from(x.len() * y.len()))
}

/// Count of ordered triples `(a,b,c) in x×y×z` forming an edge.
pub(crate) fn ordered_triple_count(
    h: &ThreeGraph,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
) -> usize {
    let sets = [x, y, z];
    let mut total = 0usize;
    for e in h.edges() {
        // membership matrix: m[i][j] = edge vertex i lies in side j
        let mut m = [[false; 3]; 3];
        let mut any = false;
        for (i, &v) in e.iter().enumerate() {
            for (j, s) in sets.iter().enumerate() {
                m[i][j] = s.contains(v);
                any |= m[i][j];
            }
        }
        if !any {
            continue;
        }
        // ordered assignments of the 3 distinct endpoints to the 3 sides
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for p in PERMS {
            if m[p[0]][0] && m[p[1]][1] && m[p[2]][2] {
                total += 1;
            }
        }
    }
    total
}

/// Ordered-triple edge density `d(x, y, z)` over `x × y × z`.
pub fn density3(h: &ThreeGraph, x: &VertexSet, y: &VertexSet, z: &VertexSet) -> Result<Rational> {
    if x.is_empty() || y.is_empty() || z.is_empty() {
        return Err(Error::domain("empty side".to_string()));
    }
    if !x.within_range(h.n()) || !y.within_range(h.n()) || !z.within_range(h.n()) {
        return Err(Error::domain("density side outside vertex range".to_string()));
    }
    let e = ordered_triple_count(h, x, y, z);
    Ok(&Rational::from(e) / &Rational::from(x.len() * y.len() * z.len()))
}

fn sym_diff_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut d) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                d += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                d += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    d + (a.len() - i) + (b.len() - j)
}

/// Normalized symmetric difference of ordered edge sets, `|Ē₁ Δ Ē₂| / n²`.
pub fn delta_close_graphs(g1: &Graph, g2: &Graph) -> Result<Rational> {
    if g1.n() != g2.n() {
        return Err(Error::domain(format!(
            "vertex count mismatch: {} vs {}",
            g1.n(),
            g2.n()
        )));
    }
    if g1.n() == 0 {
        return Ok(Rational::zero());
    }
    let diff = 2 * sym_diff_len(g1.edges(), g2.edges());
    Ok(&Rational::from(diff) / &Rational::from(g1.n() * g1.n()))
}

/// Normalized symmetric difference of ordered edge sets, `|Ē₁ Δ Ē₂| / n³`.
pub fn delta_close_threegraphs(h1: &ThreeGraph, h2: &ThreeGraph) -> Result<Rational> {
    if h1.n() != h2.n() {
        return Err(Error::domain(format!(
            "vertex count mismatch: {} vs {}",
            h1.n(),
            h2.n()
        )));
    }
    if h1.n() == 0 {
        return Ok(Rational::zero());
    }
    let diff = 6 * sym_diff_len(h1.edges(), h2.edges());
    Ok(&Rational::from(diff) / &Rational::from(h1.n() * h1.n() * h1.n()))
}

/// The averaging split: given `a ⊆ host` with `|a| >= (1 - a_frac*b_frac)|host|`
/// and a partition of `host`, returns the parts `Y` with
/// `|a ∩ Y| >= (1 - a_frac)|Y|`. The returned parts always cover at least a
/// `(1 - b_frac)` fraction of `host`; this is asserted in test builds.
pub fn averaging_split(
    a: &VertexSet,
    host: &VertexSet,
    parts: &[VertexSet],
    a_frac: &Rational,
    b_frac: &Rational,
) -> Result<Vec<VertexSet>> {
    if !a.is_subset_of(host) {
        return Err(Error::contract("averaging split: a is not a subset of host".to_string()));
    }
    let mut covered = 0usize;
    for (i, p) in parts.iter().enumerate() {
        if p.is_empty() {
            return Err(Error::domain(format!("averaging split: part {i} empty")));
        }
        if !p.is_subset_of(host) {
            return Err(Error::domain(format!("averaging split: part {i} outside host")));
        }
        for q in &parts[..i] {
            if !p.is_disjoint(q) {
                return Err(Error::domain("averaging split: parts overlap".to_string()));
            }
        }
        covered += p.len();
    }
    if covered != host.len() {
        return Err(Error::domain("averaging split: parts do not cover host".to_string()));
    }
    let eps = a_frac * b_frac;
    let need = &(&Rational::one() - &eps) * &Rational::from(host.len());
    if Rational::from(a.len()) < need {
        return Err(Error::contract(format!(
            "averaging split precondition violated: |a| = {} < (1 - {eps}) * |host|",
            a.len(),
        )));
    }
    let keep: Vec<VertexSet> = parts
        .iter()
        .filter(|y| {
            let need = &(&Rational::one() - a_frac) * &Rational::from(y.len());
            Rational::from(a.intersect_count(y)) >= need
        })
        .cloned()
        .collect();
    let kept_mass: usize = keep.iter().map(|y| y.len()).sum();
    debug_assert!(
        Rational::from(kept_mass) >= &(&Rational::one() - b_frac) * &Rational::from(host.len()),
        "averaging split conclusion failed: kept {kept_mass} of {}",
        host.len()
    );
    Ok(keep)
}
