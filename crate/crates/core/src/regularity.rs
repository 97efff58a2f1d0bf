//! Exact and heuristic verdicts for ε-regular and ε-homogeneous pairs,
//! triples and partitions, with explicit witnesses.
//!
//! A pair `(x, y)` is ε-regular when every subset pair `x' ⊆ x`, `y' ⊆ y`
//! with `|x'| >= ε|x|` and `|y'| >= ε|y|` has density within ε of the full
//! cell's density; triples analogously. The exact checkers decide this by
//! enumerating the smaller side(s) and picking the density-extremal subset
//! of the remaining side by degree order, which attains the exact maximal
//! gap. Witness selection is deterministic: subsets are scanned in ascending
//! bitmask order over the sorted vertex list, extremal selections break
//! degree ties by vertex index, and among equal maximal gaps the first
//! candidate found is kept.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core::{density2, density3, Graph, Partition, Rational, ThreeGraph, VertexSet};
use crate::{Error, Result};

/// Enumeration budgets for the exact checkers.
#[derive(Clone, Debug)]
pub struct Budget {
    /// Cap on `2^(enumerated sides) * other side` work units.
    pub max_steps: u64,
    /// Cap on each side of an exact pair check.
    pub max_side: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 1 << 25,
            max_side: 20,
        }
    }
}

pub use crate::core::Threshold;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Regular,
    Irregular,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Heuristic,
}

/// A violating subset tuple: the densities of the full cell and of the
/// subsets, and their gap (strictly above the threshold).
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub subsets: Vec<Vec<usize>>,
    pub density_inside: Rational,
    pub density_outside: Rational,
    pub gap: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityVerdict {
    pub status: Status,
    pub mode: Mode,
    pub density: Rational,
    pub witness: Option<Witness>,
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        self.status == Status::Regular
    }

    fn regular(mode: Mode, density: Rational) -> Self {
        RegularityVerdict {
            status: Status::Regular,
            mode,
            density,
            witness: None,
        }
    }

    fn irregular(mode: Mode, density: Rational, witness: Witness) -> Self {
        RegularityVerdict {
            status: Status::Irregular,
            mode,
            density,
            witness: Some(witness),
        }
    }
}

fn check_sides_pair(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<()> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::domain("empty side".to_string()));
    }
    if !x.within_range(g.n()) || !y.within_range(g.n()) {
        return Err(Error::domain("side outside vertex range".to_string()));
    }
    Ok(())
}

/// Sum of the `m` largest (`top = true`) or smallest values, ties broken by
/// index; returns the chosen indices.
fn extremal_selection(deg: &[usize], m: usize, top: bool) -> (usize, Vec<usize>) {
    let mut idx: Vec<usize> = (0..deg.len()).collect();
    if top {
        idx.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
    } else {
        idx.sort_by(|&a, &b| deg[a].cmp(&deg[b]).then(a.cmp(&b)));
    }
    idx.truncate(m);
    let sum = idx.iter().map(|&i| deg[i]).sum();
    (sum, idx)
}

struct PairGapScan {
    gap: Rational,
    enum_subset: Vec<usize>,
    other_subset: Vec<usize>,
    density_inside: Rational,
}

/// Exact maximal density gap over admissible subset pairs. `enum_verts` is
/// the enumerated side; the other side is chosen extremally.
fn pair_gap_scan(
    g: &Graph,
    enum_verts: &[usize],
    other_verts: &[usize],
    m0_enum: usize,
    m0_other: usize,
    d: &Rational,
) -> Option<PairGapScan> {
    let s = enum_verts.len();
    let t = other_verts.len();
    let mut adj = vec![false; s * t];
    for (i, &a) in enum_verts.iter().enumerate() {
        for (j, &b) in other_verts.iter().enumerate() {
            adj[i * t + j] = g.has_edge(a, b);
        }
    }
    let mut best: Option<PairGapScan> = None;
    let mut deg = vec![0usize; t];
    let mut chosen: Vec<usize> = Vec::with_capacity(s);
    // DFS over positions, exclude-first, which scans subsets in ascending
    // bitmask order over the sorted vertex list.
    fn rec(
        pos: usize,
        s: usize,
        t: usize,
        adj: &[bool],
        deg: &mut Vec<usize>,
        chosen: &mut Vec<usize>,
        m0_enum: usize,
        m0_other: usize,
        d: &Rational,
        enum_verts: &[usize],
        other_verts: &[usize],
        best: &mut Option<PairGapScan>,
    ) {
        if pos == s {
            let sx = chosen.len();
            if sx < m0_enum {
                return;
            }
            let denom = Rational::from(sx * m0_other);
            let (hi_sum, hi_idx) = extremal_selection(deg, m0_other, true);
            let (lo_sum, lo_idx) = extremal_selection(deg, m0_other, false);
            let d_hi = &Rational::from(hi_sum) / &denom;
            let d_lo = &Rational::from(lo_sum) / &denom;
            for (d_in, idx) in [(d_hi, hi_idx), (d_lo, lo_idx)] {
                let gap = (&d_in - d).abs();
                let better = match best {
                    None => true,
                    Some(b) => gap > b.gap,
                };
                if better {
                    *best = Some(PairGapScan {
                        gap,
                        enum_subset: chosen.iter().map(|&i| enum_verts[i]).collect(),
                        other_subset: {
                            let mut v: Vec<usize> =
                                idx.iter().map(|&j| other_verts[j]).collect();
                            v.sort_unstable();
                            v
                        },
                        density_inside: d_in,
                    });
                }
            }
            return;
        }
        // remaining positions cannot reach the minimum size
        if chosen.len() + (s - pos) < m0_enum {
            return;
        }
        rec(
            pos + 1, s, t, adj, deg, chosen, m0_enum, m0_other, d, enum_verts, other_verts, best,
        );
        chosen.push(pos);
        for j in 0..t {
            if adj[pos * t + j] {
                deg[j] += 1;
            }
        }
        rec(
            pos + 1, s, t, adj, deg, chosen, m0_enum, m0_other, d, enum_verts, other_verts, best,
        );
        for j in 0..t {
            if adj[pos * t + j] {
                deg[j] -= 1;
            }
        }
        chosen.pop();
    }
    rec(
        0, s, t, &adj, &mut deg, &mut chosen, m0_enum, m0_other, d, enum_verts, other_verts,
        &mut best,
    );
    best
}

/// Exact ε-regularity check of the pair `(x, y)`.
pub fn check_pair_exact(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    eps: &Threshold,
    budget: &Budget,
) -> Result<RegularityVerdict> {
    check_sides_pair(g, x, y)?;
    let d = density2(g, x, y)?;
    // density 0 or 1 forces every subset density to coincide
    if d.is_zero() || d.is_one() {
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    // threshold at or above 1: every gap qualifies
    if eps.cmp_rational(&Rational::one()) != Ordering::Greater {
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    let m0x = eps.min_subset_size(x.len());
    let m0y = eps.min_subset_size(y.len());
    if m0x > x.len() || m0y > y.len() || m0x == 0 || m0y == 0 {
        // no admissible subsets (or a zero threshold side, which cannot
        // happen for positive eps)
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    if x.len() > budget.max_side || y.len() > budget.max_side {
        return Err(Error::capacity(format!(
            "exact pair check sides {} and {} exceed the side cap {}; use heuristic mode",
            x.len(),
            y.len(),
            budget.max_side
        )));
    }
    let xs = x.to_vec();
    let ys = y.to_vec();
    let enum_is_x = xs.len() <= ys.len();
    let (ev, ov, m0e, m0o) = if enum_is_x {
        (&xs, &ys, m0x, m0y)
    } else {
        (&ys, &xs, m0y, m0x)
    };
    let steps = (1u128 << ev.len().min(127)) * (ov.len() as u128);
    if steps > budget.max_steps as u128 {
        return Err(Error::capacity(format!(
            "exact pair check needs ~{steps} enumeration steps over the {} budget; use heuristic mode",
            budget.max_steps
        )));
    }
    let scan = pair_gap_scan(g, ev, ov, m0e, m0o, &d).expect("admissible subsets exist");
    if eps.lt(&scan.gap) {
        let (xw, yw) = if enum_is_x {
            (scan.enum_subset, scan.other_subset)
        } else {
            (scan.other_subset, scan.enum_subset)
        };
        Ok(RegularityVerdict::irregular(
            Mode::Exact,
            d.clone(),
            Witness {
                subsets: vec![xw, yw],
                density_inside: scan.density_inside,
                density_outside: d,
                gap: scan.gap,
            },
        ))
    } else {
        Ok(RegularityVerdict::regular(Mode::Exact, d))
    }
}

fn check_sides_triple(h: &ThreeGraph, sides: [&VertexSet; 3]) -> Result<()> {
    for s in sides {
        if s.is_empty() {
            return Err(Error::domain("empty side".to_string()));
        }
        if !s.within_range(h.n()) {
            return Err(Error::domain("side outside vertex range".to_string()));
        }
    }
    Ok(())
}

/// Exact ε-regularity check of the triple `(x, y, z)`.
pub fn check_triple_exact(
    h: &ThreeGraph,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
    eps: &Threshold,
    budget: &Budget,
) -> Result<RegularityVerdict> {
    check_sides_triple(h, [x, y, z])?;
    let d = density3(h, x, y, z)?;
    if d.is_zero() || d.is_one() {
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    if eps.cmp_rational(&Rational::one()) != Ordering::Greater {
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    let sides = [x, y, z];
    let m0: Vec<usize> = sides.iter().map(|s| eps.min_subset_size(s.len())).collect();
    if m0.iter().zip(sides.iter()).any(|(&m, s)| m > s.len() || m == 0) {
        return Ok(RegularityVerdict::regular(Mode::Exact, d));
    }
    // order roles so the two smallest sides are enumerated
    let mut order = [0usize, 1, 2];
    order.sort_by_key(|&i| sides[i].len());
    let a: Vec<usize> = sides[order[0]].to_vec();
    let b: Vec<usize> = sides[order[1]].to_vec();
    let c: Vec<usize> = sides[order[2]].to_vec();
    let (m0a, m0b, m0c) = (m0[order[0]], m0[order[1]], m0[order[2]]);
    let steps = (1u128 << (a.len() + b.len()).min(127)) * (c.len() as u128);
    if steps > budget.max_steps as u128 {
        return Err(Error::capacity(format!(
            "exact triple check needs ~{steps} enumeration steps over the {} budget; use heuristic mode",
            budget.max_steps
        )));
    }
    let (sa, sb, sc) = (a.len(), b.len(), c.len());
    // adjacency of local triples; count_ab[b][c] tracks edges into the
    // current A'
    let mut adj = vec![false; sa * sb * sc];
    for (i, &p) in a.iter().enumerate() {
        for (j, &q) in b.iter().enumerate() {
            for (k, &r) in c.iter().enumerate() {
                adj[(i * sb + j) * sc + k] = h.has_edge(p, q, r);
            }
        }
    }
    struct Best {
        gap: Rational,
        a_sub: Vec<usize>,
        b_sub: Vec<usize>,
        c_sub: Vec<usize>,
        density_inside: Rational,
    }
    let mut best: Option<Best> = None;

    let mut cnt_bc = vec![0usize; sb * sc];
    let mut cnt_c = vec![0usize; sc];
    let mut a_chosen: Vec<usize> = Vec::new();
    let mut b_chosen: Vec<usize> = Vec::new();

    // enumerate A' then B' with incremental counts; extremal C' by
    // completion-degree order
    fn rec_b(
        pos: usize,
        sb: usize,
        sc: usize,
        cnt_bc: &[usize],
        cnt_c: &mut Vec<usize>,
        a_chosen: &[usize],
        b_chosen: &mut Vec<usize>,
        m0b: usize,
        m0c: usize,
        d: &Rational,
        ctx: (&[usize], &[usize], &[usize]),
        best: &mut Option<Best>,
    ) {
        let (a_verts, b_verts, c_verts) = ctx;
        if pos == sb {
            if b_chosen.len() < m0b {
                return;
            }
            let denom = Rational::from(a_chosen.len() * b_chosen.len() * m0c);
            let (hi, hi_idx) = extremal_selection(cnt_c, m0c, true);
            let (lo, lo_idx) = extremal_selection(cnt_c, m0c, false);
            for (sum, idx) in [(hi, hi_idx), (lo, lo_idx)] {
                let d_in = &Rational::from(sum) / &denom;
                let gap = (&d_in - d).abs();
                let better = match best {
                    None => true,
                    Some(b) => gap > b.gap,
                };
                if better {
                    *best = Some(Best {
                        gap,
                        a_sub: a_chosen.iter().map(|&i| a_verts[i]).collect(),
                        b_sub: b_chosen.iter().map(|&j| b_verts[j]).collect(),
                        c_sub: {
                            let mut v: Vec<usize> = idx.iter().map(|&k| c_verts[k]).collect();
                            v.sort_unstable();
                            v
                        },
                        density_inside: d_in,
                    });
                }
            }
            return;
        }
        if b_chosen.len() + (sb - pos) < m0b {
            return;
        }
        rec_b(
            pos + 1, sb, sc, cnt_bc, cnt_c, a_chosen, b_chosen, m0b, m0c, d, ctx, best,
        );
        b_chosen.push(pos);
        for k in 0..sc {
            cnt_c[k] += cnt_bc[pos * sc + k];
        }
        rec_b(
            pos + 1, sb, sc, cnt_bc, cnt_c, a_chosen, b_chosen, m0b, m0c, d, ctx, best,
        );
        for k in 0..sc {
            cnt_c[k] -= cnt_bc[pos * sc + k];
        }
        b_chosen.pop();
    }

    #[allow(clippy::too_many_arguments)]
    fn rec_a(
        pos: usize,
        sa: usize,
        sb: usize,
        sc: usize,
        adj: &[bool],
        cnt_bc: &mut Vec<usize>,
        cnt_c: &mut Vec<usize>,
        a_chosen: &mut Vec<usize>,
        b_chosen: &mut Vec<usize>,
        m0a: usize,
        m0b: usize,
        m0c: usize,
        d: &Rational,
        ctx: (&[usize], &[usize], &[usize]),
        best: &mut Option<Best>,
    ) {
        if pos == sa {
            if a_chosen.len() < m0a {
                return;
            }
            rec_b(
                0, sb, sc, cnt_bc, cnt_c, a_chosen, b_chosen, m0b, m0c, d, ctx, best,
            );
            return;
        }
        if a_chosen.len() + (sa - pos) < m0a {
            return;
        }
        rec_a(
            pos + 1, sa, sb, sc, adj, cnt_bc, cnt_c, a_chosen, b_chosen, m0a, m0b, m0c, d, ctx,
            best,
        );
        a_chosen.push(pos);
        for j in 0..sb {
            for k in 0..sc {
                if adj[(pos * sb + j) * sc + k] {
                    cnt_bc[j * sc + k] += 1;
                }
            }
        }
        rec_a(
            pos + 1, sa, sb, sc, adj, cnt_bc, cnt_c, a_chosen, b_chosen, m0a, m0b, m0c, d, ctx,
            best,
        );
        for j in 0..sb {
            for k in 0..sc {
                if adj[(pos * sb + j) * sc + k] {
                    cnt_bc[j * sc + k] -= 1;
                }
            }
        }
        a_chosen.pop();
    }

    rec_a(
        0,
        sa,
        sb,
        sc,
        &adj,
        &mut cnt_bc,
        &mut cnt_c,
        &mut a_chosen,
        &mut b_chosen,
        m0a,
        m0b,
        m0c,
        &d,
        (&a, &b, &c),
        &mut best,
    );
    let best = best.expect("admissible subsets exist");
    if eps.lt(&best.gap) {
        // map the sorted roles back to (x, y, z) positions
        let mut subsets = vec![Vec::new(), Vec::new(), Vec::new()];
        subsets[order[0]] = best.a_sub;
        subsets[order[1]] = best.b_sub;
        subsets[order[2]] = best.c_sub;
        Ok(RegularityVerdict::irregular(
            Mode::Exact,
            d.clone(),
            Witness {
                subsets,
                density_inside: best.density_inside,
                density_outside: d,
                gap: best.gap,
            },
        ))
    } else {
        Ok(RegularityVerdict::regular(Mode::Exact, d))
    }
}

/// Homogeneity verdict of a cell: density in `[0, ε) ∪ (1-ε, 1]`.
#[derive(Clone, Debug, Serialize)]
pub struct HomVerdict {
    pub homogeneous: bool,
    pub density: Rational,
}

fn density_is_homogeneous(d: &Rational, eps: &Threshold) -> bool {
    // d < eps  or  d > 1 - eps (the latter iff 1 - d < eps)
    let low = eps.cmp_rational(d) == Ordering::Less;
    let one_minus = &Rational::one() - d;
    let high = eps.cmp_rational(&one_minus) == Ordering::Less;
    low || high
}

pub fn check_hom_pair(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    eps: &Threshold,
) -> Result<HomVerdict> {
    check_sides_pair(g, x, y)?;
    let d = density2(g, x, y)?;
    Ok(HomVerdict {
        homogeneous: density_is_homogeneous(&d, eps),
        density: d,
    })
}

pub fn check_hom_triple(
    h: &ThreeGraph,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
    eps: &Threshold,
) -> Result<HomVerdict> {
    check_sides_triple(h, [x, y, z])?;
    let d = density3(h, x, y, z)?;
    Ok(HomVerdict {
        homogeneous: density_is_homogeneous(&d, eps),
        density: d,
    })
}

/// What a partition check certifies per cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    Regular,
    Hom,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellRecord {
    /// Canonical part indices of the cell (sorted).
    pub parts: Vec<usize>,
    pub ok: bool,
    pub density: Rational,
}

/// Partition-level verdict: the fraction of ordered vertex tuples lying in
/// good cells, and whether it reaches `1 - ε`.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionVerdict {
    pub pass: bool,
    pub covered_mass: Rational,
    pub kind: PartitionKind,
    pub cells: Vec<CellRecord>,
}

/// Checks a partition of a graph: an ordered pair `(a, b) ∈ V²` (diagonal
/// and same-part pairs included) is covered when its cell
/// `(part(a), part(b))` is good; pass iff covered mass `>= (1-ε)n²`.
pub fn check_partition_graph(
    g: &Graph,
    p: &Partition,
    eps: &Threshold,
    kind: PartitionKind,
    budget: &Budget,
) -> Result<PartitionVerdict> {
    if p.n() != g.n() {
        return Err(Error::domain(format!(
            "partition of {} vertices against a graph on {}",
            p.n(),
            g.n()
        )));
    }
    let t = p.len();
    let mut memo: HashMap<(usize, usize), (bool, Rational)> = HashMap::new();
    let mut cells = Vec::new();
    let mut covered = 0u128;
    for i in 0..t {
        for j in 0..t {
            let key = (i.min(j), i.max(j));
            let entry = match memo.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let (xi, xj) = (&p.parts()[key.0], &p.parts()[key.1]);
                    let v = match kind {
                        PartitionKind::Regular => {
                            let verdict = check_pair_exact(g, xi, xj, eps, budget)?;
                            (verdict.is_regular(), verdict.density)
                        }
                        PartitionKind::Hom => {
                            let verdict = check_hom_pair(g, xi, xj, eps)?;
                            (verdict.homogeneous, verdict.density)
                        }
                    };
                    memo.insert(key, v.clone());
                    cells.push(CellRecord {
                        parts: vec![key.0, key.1],
                        ok: v.0,
                        density: v.1.clone(),
                    });
                    v
                }
            };
            if entry.0 {
                covered += (p.parts()[i].len() * p.parts()[j].len()) as u128;
            }
        }
    }
    let n2 = (g.n() as u128) * (g.n() as u128);
    let covered_mass = &Rational::from(covered as usize) / &Rational::from(n2 as usize);
    let uncovered = &Rational::one() - &covered_mass;
    // pass iff 1 - coverage <= eps
    let pass = eps.cmp_rational(&uncovered) != Ordering::Greater;
    Ok(PartitionVerdict {
        pass,
        covered_mass,
        kind,
        cells,
    })
}

/// 3-graph analogue of [`check_partition_graph`] over ordered triples.
pub fn check_partition_threegraph(
    h: &ThreeGraph,
    p: &Partition,
    eps: &Threshold,
    kind: PartitionKind,
    budget: &Budget,
) -> Result<PartitionVerdict> {
    if p.n() != h.n() {
        return Err(Error::domain(format!(
            "partition of {} vertices against a 3-graph on {}",
            p.n(),
            h.n()
        )));
    }
    let t = p.len();
    let mut memo: HashMap<(usize, usize, usize), (bool, Rational)> = HashMap::new();
    let mut cells = Vec::new();
    let mut covered = 0u128;
    for i in 0..t {
        for j in 0..t {
            for k in 0..t {
                let mut key = [i, j, k];
                key.sort_unstable();
                let key = (key[0], key[1], key[2]);
                let entry = match memo.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let (xa, xb, xc) = (
                            &p.parts()[key.0],
                            &p.parts()[key.1],
                            &p.parts()[key.2],
                        );
                        let v = match kind {
                            PartitionKind::Regular => {
                                let verdict = check_triple_exact(h, xa, xb, xc, eps, budget)?;
                                (verdict.is_regular(), verdict.density)
                            }
                            PartitionKind::Hom => {
                                let verdict = check_hom_triple(h, xa, xb, xc, eps)?;
                                (verdict.homogeneous, verdict.density)
                            }
                        };
                        memo.insert(key, v.clone());
                        cells.push(CellRecord {
                            parts: vec![key.0, key.1, key.2],
                            ok: v.0,
                            density: v.1.clone(),
                        });
                        v
                    }
                };
                if entry.0 {
                    covered += (p.parts()[i].len() * p.parts()[j].len() * p.parts()[k].len())
                        as u128;
                }
            }
        }
    }
    let n = h.n() as u128;
    let n3 = n * n * n;
    let covered_mass = &Rational::from(covered as usize) / &Rational::from(n3 as usize);
    let uncovered = &Rational::one() - &covered_mass;
    let pass = eps.cmp_rational(&uncovered) != Ordering::Greater;
    Ok(PartitionVerdict {
        pass,
        covered_mass,
        kind,
        cells,
    })
}

/// The cell fed to the heuristic witness search.
pub enum Cell<'a> {
    Pair(&'a Graph, &'a VertexSet, &'a VertexSet),
    Triple(&'a ThreeGraph, &'a VertexSet, &'a VertexSet, &'a VertexSet),
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Seeded refutation search: samples candidate subsets (degree-sorted
/// prefixes, neighborhood traces, random subsets at the minimum admissible
/// size and at half size) on one side and completes them extremally on the
/// other sides. Returns an irregularity witness if a gap above `eps` is
/// found, otherwise `Unknown`; never certifies regularity. Deterministic for
/// a fixed seed: each trial's candidate derives solely from `(seed, trial)`.
pub fn witness_search_heuristic(
    cell: Cell<'_>,
    eps: &Threshold,
    trials: u64,
    seed: u64,
) -> Result<RegularityVerdict> {
    if trials == 0 {
        return Err(Error::domain("heuristic search needs trials >= 1".to_string()));
    }
    match cell {
        Cell::Pair(g, x, y) => heuristic_pair(g, x, y, eps, trials, seed),
        Cell::Triple(h, x, y, z) => heuristic_triple(h, x, y, z, eps, trials, seed),
    }
}

fn subset_candidate(
    rng: &mut ChaCha8Rng,
    kind: u64,
    verts: &[usize],
    by_degree: &[usize],
    m0: usize,
) -> Vec<usize> {
    let n = verts.len();
    let half = (n / 2).max(m0);
    match kind {
        // degree-ascending prefix at minimum size
        0 => by_degree[..m0].to_vec(),
        // degree-descending prefix at minimum size
        1 => by_degree[n - m0..].to_vec(),
        // degree-ascending prefix at half size
        2 => by_degree[..half].to_vec(),
        // degree-descending prefix at half size
        3 => by_degree[n - half..].to_vec(),
        // random subset at minimum or half size
        _ => {
            let size = if kind % 2 == 0 { m0 } else { half };
            let mut pool: Vec<usize> = verts.to_vec();
            pool.shuffle(rng);
            pool.truncate(size);
            pool.sort_unstable();
            pool
        }
    }
}

fn heuristic_pair(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    eps: &Threshold,
    trials: u64,
    seed: u64,
) -> Result<RegularityVerdict> {
    check_sides_pair(g, x, y)?;
    let d = density2(g, x, y)?;
    let unknown = RegularityVerdict {
        status: Status::Unknown,
        mode: Mode::Heuristic,
        density: d.clone(),
        witness: None,
    };
    if d.is_zero() || d.is_one() {
        return Ok(unknown);
    }
    let m0x = eps.min_subset_size(x.len());
    let m0y = eps.min_subset_size(y.len());
    if m0x > x.len() || m0y > y.len() {
        return Ok(unknown);
    }
    let xs = x.to_vec();
    let ys = y.to_vec();
    let rows = g.rows();
    // degree of each x-vertex into y and vice versa, ascending, ties by index
    let mut x_by_deg = xs.clone();
    x_by_deg.sort_by_key(|&a| (rows[a].intersect_count(y), a));
    let mut y_by_deg = ys.clone();
    y_by_deg.sort_by_key(|&b| (rows[b].intersect_count(x), b));

    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let from_x = trial % 2 == 0;
        let (side_verts, side_by_deg, m0_side, other_verts, m0_other) = if from_x {
            (&xs, &x_by_deg, m0x, &ys, m0y)
        } else {
            (&ys, &y_by_deg, m0y, &xs, m0x)
        };
        let kind = (trial / 2) % 6;
        let cand = if kind == 5 {
            // neighborhood trace of a sampled opposite vertex
            let w = other_verts[rng.gen_range(0..other_verts.len())];
            let mut c: Vec<usize> = side_verts
                .iter()
                .copied()
                .filter(|&v| g.has_edge(v, w))
                .collect();
            if c.len() < m0_side {
                continue;
            }
            c.sort_unstable();
            c
        } else {
            subset_candidate(&mut rng, kind, side_verts, side_by_deg, m0_side)
        };
        if cand.len() < m0_side || cand.is_empty() {
            continue;
        }
        // extremal completion on the other side
        let mut deg = vec![0usize; other_verts.len()];
        for (j, &b) in other_verts.iter().enumerate() {
            deg[j] = cand.iter().filter(|&&a| g.has_edge(a, b)).count();
        }
        let denom = Rational::from(cand.len() * m0_other);
        for top in [false, true] {
            let (sum, idx) = extremal_selection(&deg, m0_other, top);
            let d_in = &Rational::from(sum) / &denom;
            let gap = (&d_in - &d).abs();
            if eps.lt(&gap) {
                let mut other_sub: Vec<usize> = idx.iter().map(|&j| other_verts[j]).collect();
                other_sub.sort_unstable();
                let (xw, yw) = if from_x {
                    (cand.clone(), other_sub)
                } else {
                    (other_sub, cand.clone())
                };
                return Ok(RegularityVerdict::irregular(
                    Mode::Heuristic,
                    d.clone(),
                    Witness {
                        subsets: vec![xw, yw],
                        density_inside: d_in,
                        density_outside: d.clone(),
                        gap,
                    },
                ));
            }
        }
    }
    Ok(unknown)
}

fn heuristic_triple(
    h: &ThreeGraph,
    x: &VertexSet,
    y: &VertexSet,
    z: &VertexSet,
    eps: &Threshold,
    trials: u64,
    seed: u64,
) -> Result<RegularityVerdict> {
    check_sides_triple(h, [x, y, z])?;
    let d = density3(h, x, y, z)?;
    let unknown = RegularityVerdict {
        status: Status::Unknown,
        mode: Mode::Heuristic,
        density: d.clone(),
        witness: None,
    };
    if d.is_zero() || d.is_one() {
        return Ok(unknown);
    }
    let sides = [x.to_vec(), y.to_vec(), z.to_vec()];
    let m0: Vec<usize> = [x, y, z]
        .iter()
        .map(|s| eps.min_subset_size(s.len()))
        .collect();
    if m0.iter().zip([x, y, z]).any(|(&m, s)| m > s.len()) {
        return Ok(unknown);
    }
    for trial in 0..trials {
        let mut rng = trial_rng(seed, !trial);
        // the extremal side rotates; the other two get sampled subsets
        let free = (trial % 3) as usize;
        let (i1, i2) = match free {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let pick = |rng: &mut ChaCha8Rng, side: usize, kind: u64| -> Vec<usize> {
            let verts = &sides[side];
            let size = if kind % 2 == 0 {
                m0[side]
            } else {
                (verts.len() / 2).max(m0[side])
            };
            let mut pool = verts.clone();
            pool.shuffle(rng);
            pool.truncate(size);
            pool.sort_unstable();
            pool
        };
        let kind = trial / 3;
        let s1 = pick(&mut rng, i1, kind);
        let s2 = pick(&mut rng, i2, kind + 1);
        if s1.is_empty() || s2.is_empty() {
            continue;
        }
        let free_verts = &sides[free];
        let mut deg = vec![0usize; free_verts.len()];
        for (j, &c) in free_verts.iter().enumerate() {
            let mut count = 0usize;
            for &a in &s1 {
                for &b in &s2 {
                    if h.has_edge(a, b, c) {
                        count += 1;
                    }
                }
            }
            deg[j] = count;
        }
        let denom = Rational::from(s1.len() * s2.len() * m0[free]);
        for top in [false, true] {
            let (sum, idx) = extremal_selection(&deg, m0[free], top);
            let d_in = &Rational::from(sum) / &denom;
            let gap = (&d_in - &d).abs();
            if eps.lt(&gap) {
                let mut free_sub: Vec<usize> = idx.iter().map(|&j| free_verts[j]).collect();
                free_sub.sort_unstable();
                let mut subsets = vec![Vec::new(), Vec::new(), Vec::new()];
                subsets[i1] = s1.clone();
                subsets[i2] = s2.clone();
                subsets[free] = free_sub;
                return Ok(RegularityVerdict::irregular(
                    Mode::Heuristic,
                    d.clone(),
                    Witness {
                        subsets,
                        density_inside: d_in,
                        density_outside: d.clone(),
                        gap,
                    },
                ));
            }
        }
    }
    Ok(unknown)
}

/// Report of the slicing expectation: a subpair of an exactly ε-regular
/// pair, taken at fraction γ, is checked `2γ⁻¹ε`-regular and its density
/// checked inside the open window `(d-ε, d+ε)`.
#[derive(Clone, Debug, Serialize)]
pub struct SlicingReport {
    pub eps_prime: Rational,
    pub subpair_regular: bool,
    pub density_in_window: bool,
    pub cell_density: Rational,
    pub subpair_density: Rational,
}

pub fn slicing_expectation(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    xp: &VertexSet,
    yp: &VertexSet,
    eps: &Rational,
    gamma: &Rational,
    budget: &Budget,
) -> Result<SlicingReport> {
    if gamma < eps {
        return Err(Error::contract(format!("gamma = {gamma} below eps = {eps}")));
    }
    if !xp.is_subset_of(x) || !yp.is_subset_of(y) {
        return Err(Error::contract("subsets leave the cell".to_string()));
    }
    let gx = gamma * &Rational::from(x.len());
    let gy = gamma * &Rational::from(y.len());
    if Rational::from(xp.len()) < gx || Rational::from(yp.len()) < gy {
        return Err(Error::contract(format!(
            "subset sizes {} and {} below the gamma = {gamma} fractions",
            xp.len(),
            yp.len()
        )));
    }
    let base = check_pair_exact(g, x, y, &Threshold::exact(eps.clone()), budget)?;
    if !base.is_regular() {
        return Err(Error::contract(format!(
            "cell is not eps = {eps} regular; slicing precondition unmet"
        )));
    }
    slicing_subpair_report(g, x, y, xp, yp, eps, gamma, &base.density, budget)
}

/// Inner slicing check with the cell already verified regular (used by the
/// full-sweep drivers to avoid re-verifying the cell per subpair).
#[allow(clippy::too_many_arguments)]
pub fn slicing_subpair_report(
    g: &Graph,
    _x: &VertexSet,
    _y: &VertexSet,
    xp: &VertexSet,
    yp: &VertexSet,
    eps: &Rational,
    gamma: &Rational,
    cell_density: &Rational,
    budget: &Budget,
) -> Result<SlicingReport> {
    let eps_prime = &(&Rational::from(2usize) / gamma) * eps;
    let sub = check_pair_exact(g, xp, yp, &Threshold::exact(eps_prime.clone()), budget)?;
    let d_sub = sub.density.clone();
    let lo = cell_density - eps;
    let hi = cell_density + eps;
    let density_in_window = d_sub > lo && d_sub < hi;
    Ok(SlicingReport {
        eps_prime,
        subpair_regular: sub.is_regular(),
        density_in_window,
        cell_density: cell_density.clone(),
        subpair_density: d_sub,
    })
}
