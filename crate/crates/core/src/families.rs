//! Generators for the named graph and 3-graph families, each returning a
//! labeled instance, plus the structure checkers (blow-up recognition,
//! prescribed-copy validation, irreducible-pattern membership).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::core::{Graph, ThreeGraph, VertexSet};
use crate::{Error, Result};

/// Family tag carried by generated instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Uk,
    Hk,
    Mk,
    MbarK,
    Bip,
    Trip,
    Otimes,
    Ghat,
    Uhat,
    Blowup,
    Hkn,
    UkBlowupLb,
    GhatBlowup,
    Custom,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::Uk => "U_k",
            FamilyTag::Hk => "H_k",
            FamilyTag::Mk => "M_k",
            FamilyTag::MbarK => "Mbar_k",
            FamilyTag::Bip => "Bip",
            FamilyTag::Trip => "Trip",
            FamilyTag::Otimes => "Otimes",
            FamilyTag::Ghat => "Ghat",
            FamilyTag::Uhat => "Uhat",
            FamilyTag::Blowup => "Blowup",
            FamilyTag::Hkn => "Hkn",
            FamilyTag::UkBlowupLb => "UkBlowupLB",
            FamilyTag::GhatBlowup => "GhatBlowup",
            FamilyTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Either host structure of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Host {
    Graph(Graph),
    Three(ThreeGraph),
}

impl Host {
    pub fn n(&self) -> usize {
        match self {
            Host::Graph(g) => g.n(),
            Host::Three(h) => h.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Host::Graph(_) => "graph",
            Host::Three(_) => "3graph",
        }
    }
}

/// A generated construction together with its named vertex classes.
///
/// Label keys are stable strings: `"a_1"`, `"b_{1,2}"`, `"U_3"`, `"W_{}"`,
/// plus whole-side keys such as `"U"`, `"V"`, `"W"`. Values are sorted vertex
/// lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInstance {
    pub host: Host,
    pub labels: BTreeMap<String, Vec<usize>>,
    pub family: FamilyTag,
}

impl FamilyInstance {
    pub fn new(host: Host, family: FamilyTag) -> FamilyInstance {
        FamilyInstance {
            host,
            labels: BTreeMap::new(),
            family,
        }
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn graph(&self) -> Result<&Graph> {
        match &self.host {
            Host::Graph(g) => Ok(g),
            Host::Three(_) => Err(Error::domain("expected a graph, found a 3-graph".to_string())),
        }
    }

    pub fn threegraph(&self) -> Result<&ThreeGraph> {
        match &self.host {
            Host::Three(h) => Ok(h),
            Host::Graph(_) => Err(Error::domain("expected a 3-graph, found a graph".to_string())),
        }
    }

    pub fn label(&self, key: &str) -> Result<VertexSet> {
        self.labels
            .get(key)
            .map(|v| VertexSet::from_iter(v.iter().copied()))
            .ok_or_else(|| Error::domain(format!("instance has no label {key:?}")))
    }

    pub fn has_label(&self, key: &str) -> bool {
        self.labels.contains_key(key)
    }

    pub fn set_label(&mut self, key: impl Into<String>, vs: impl IntoIterator<Item = usize>) {
        let mut v: Vec<usize> = vs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        self.labels.insert(key.into(), v);
    }
}

/// Renders `S ⊆ [k]` given as a bitmask into the stable label form
/// `{1,3,4}` (1-based, `{}` for the empty set).
pub fn subset_label(mask: usize) -> String {
    let mut parts = Vec::new();
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros() as usize;
        parts.push((b + 1).to_string());
        m &= m - 1;
    }
    format!("{{{}}}", parts.join(","))
}

/// The power-set bipartite graph on `a_1..a_k` and `b_S` for `S ⊆ [k]`,
/// with `a_i b_S` an edge exactly when `i ∈ S`.
pub fn gen_powerset_graph(k: usize) -> Result<FamilyInstance> {
    if k == 0 || k > 20 {
        return Err(Error::size_guard(format!(
            "powerset graph k = {k} outside 1..=20 (vertex count k + 2^k)"
        )));
    }
    let masks = 1usize << k;
    let n = k + masks;
    let mut edges = Vec::new();
    for mask in 0..masks {
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            edges.push((i, k + mask));
            m &= m - 1;
        }
    }
    let g = Graph::new(n, edges)?;
    let mut inst = FamilyInstance::new(Host::Graph(g), FamilyTag::Uk);
    for i in 0..k {
        inst.set_label(format!("a_{}", i + 1), [i]);
    }
    for mask in 0..masks {
        inst.set_label(format!("b_{}", subset_label(mask)), [k + mask]);
    }
    inst.set_label("a-side", 0..k);
    inst.set_label("b-side", k..n);
    inst.set_label("U", 0..k);
    inst.set_label("V", k..n);
    Ok(inst)
}

/// The three canonical bipartite patterns on `a_1..a_k, b_1..b_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Half,
    Matching,
    Comatching,
}

impl PatternKind {
    pub const ALL: [PatternKind; 3] = [
        PatternKind::Half,
        PatternKind::Matching,
        PatternKind::Comatching,
    ];

    /// Whether `a_i b_j` is an edge of the pattern (1-based `i`, `j`).
    pub fn cross_edge(self, i: usize, j: usize) -> bool {
        match self {
            PatternKind::Half => i <= j,
            PatternKind::Matching => i == j,
            PatternKind::Comatching => i != j,
        }
    }

    /// The required trace `{i : a_i b_j ∈ E}` of `b_j` as a bitmask
    /// (bit `i-1` set for `i ∈ trace`).
    pub fn trace_mask(self, j: usize, k: usize) -> usize {
        let mut m = 0usize;
        for i in 1..=k {
            if self.cross_edge(i, j) {
                m |= 1 << (i - 1);
            }
        }
        m
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternKind::Half => "half",
            PatternKind::Matching => "matching",
            PatternKind::Comatching => "comatching",
        })
    }
}

fn gen_pattern(k: usize, kind: PatternKind) -> Result<FamilyInstance> {
    if k == 0 || k > 5000 {
        return Err(Error::size_guard(format!("pattern size k = {k} outside 1..=5000")));
    }
    let mut edges = Vec::new();
    for i in 1..=k {
        for j in 1..=k {
            if kind.cross_edge(i, j) {
                edges.push((i - 1, k + j - 1));
            }
        }
    }
    let g = Graph::new(2 * k, edges)?;
    let tag = match kind {
        PatternKind::Half => FamilyTag::Hk,
        PatternKind::Matching => FamilyTag::Mk,
        PatternKind::Comatching => FamilyTag::MbarK,
    };
    let mut inst = FamilyInstance::new(Host::Graph(g), tag);
    for i in 1..=k {
        inst.set_label(format!("a_{i}"), [i - 1]);
        inst.set_label(format!("b_{i}"), [k + i - 1]);
    }
    inst.set_label("a-side", 0..k);
    inst.set_label("b-side", k..2 * k);
    inst.set_label("U", 0..k);
    inst.set_label("V", k..2 * k);
    Ok(inst)
}

/// Half-graph `H(k)`: `a_i b_j` an edge iff `i <= j`.
pub fn gen_halfgraph(k: usize) -> Result<FamilyInstance> {
    gen_pattern(k, PatternKind::Half)
}

/// Matching `M(k)`: `a_i b_j` an edge iff `i = j`.
pub fn gen_matching(k: usize) -> Result<FamilyInstance> {
    gen_pattern(k, PatternKind::Matching)
}

/// Co-matching `M̄(k)`: `a_i b_j` an edge iff `i ≠ j`.
pub fn gen_comatching(k: usize) -> Result<FamilyInstance> {
    gen_pattern(k, PatternKind::Comatching)
}

/// Which of the three irreducible patterns the ordered vertex lists realize
/// across `a × b` pairs. Within-side edges are unconstrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IrrTag {
    Half,
    Matching,
    Comatching,
    None,
}

pub fn is_irr_member(g: &Graph, a_order: &[usize], b_order: &[usize]) -> Result<IrrTag> {
    if a_order.len() != b_order.len() {
        return Err(Error::domain(format!(
            "ordered lists have unequal lengths {} and {}",
            a_order.len(),
            b_order.len()
        )));
    }
    let k = a_order.len();
    if k == 0 {
        return Err(Error::domain("empty vertex lists".to_string()));
    }
    let mut seen = VertexSet::new();
    for &v in a_order.iter().chain(b_order.iter()) {
        if v >= g.n() {
            return Err(Error::domain(format!("vertex {v} out of range")));
        }
        if seen.contains(v) {
            return Err(Error::domain(format!("vertex {v} repeated across the lists")));
        }
        seen.insert(v);
    }
    'pattern: for kind in PatternKind::ALL {
        for i in 1..=k {
            for j in 1..=k {
                if g.has_edge(a_order[i - 1], b_order[j - 1]) != kind.cross_edge(i, j) {
                    continue 'pattern;
                }
            }
        }
        return Ok(match kind {
            PatternKind::Half => IrrTag::Half,
            PatternKind::Matching => IrrTag::Matching,
            PatternKind::Comatching => IrrTag::Comatching,
        });
    }
    Ok(IrrTag::None)
}

/// Bipartite double: vertices `u_v` and `w_v` for each vertex `v`, with
/// `u_v w_{v'}` an edge for every edge `vv'`.
pub fn bip_double(g: &Graph) -> FamilyInstance {
    let n = g.n();
    let mut edges = Vec::with_capacity(2 * g.edge_count());
    for &[a, b] in g.edges() {
        edges.push((a, n + b));
        edges.push((b, n + a));
    }
    let bg = Graph::new(2 * n, edges).expect("double is well formed");
    let mut inst = FamilyInstance::new(Host::Graph(bg), FamilyTag::Bip);
    for v in 0..n {
        inst.set_label(format!("u_{v}"), [v]);
        inst.set_label(format!("w_{v}"), [n + v]);
    }
    inst.set_label("u-side", 0..n);
    inst.set_label("w-side", n..2 * n);
    inst.set_label("U", 0..n);
    inst.set_label("V", n..2 * n);
    inst
}

/// Tripartite triple: vertices `x_v, y_v, z_v`, one edge per ordered
/// assignment of an edge's endpoints to the three sides (6 per base edge).
pub fn trip_triple(h: &ThreeGraph) -> FamilyInstance {
    let n = h.n();
    let mut edges = Vec::with_capacity(6 * h.edge_count());
    for &[a, b, c] in h.edges() {
        for (p, q, r) in [
            (a, b, c),
            (a, c, b),
            (b, a, c),
            (b, c, a),
            (c, a, b),
            (c, b, a),
        ] {
            edges.push((p, n + q, 2 * n + r));
        }
    }
    let th = ThreeGraph::new(3 * n, edges).expect("triple is well formed");
    let mut inst = FamilyInstance::new(Host::Three(th), FamilyTag::Trip);
    for v in 0..n {
        inst.set_label(format!("x_{v}"), [v]);
        inst.set_label(format!("y_{v}"), [n + v]);
        inst.set_label(format!("z_{v}"), [2 * n + v]);
    }
    inst.set_label("x-side", 0..n);
    inst.set_label("y-side", n..2 * n);
    inst.set_label("z-side", 2 * n..3 * n);
    inst
}

/// Reads and validates the `U`/`V` bipartition labels of a graph instance.
pub fn bipartition_of(g: &FamilyInstance) -> Result<(VertexSet, VertexSet)> {
    let u = g
        .label("U")
        .map_err(|_| Error::domain("instance carries no bipartition labels U/V".to_string()))?;
    let v = g.label("V")?;
    let graph = g.graph()?;
    if !u.is_disjoint(&v) || u.len() + v.len() != graph.n() {
        return Err(Error::domain("labels U/V do not bipartition the vertex range".to_string()));
    }
    for &[a, b] in graph.edges() {
        let cross = (u.contains(a) && v.contains(b)) || (u.contains(b) && v.contains(a));
        if !cross {
            return Err(Error::domain(format!(
                "edge ({a},{b}) is not a cross edge of the declared bipartition"
            )));
        }
    }
    Ok((u, v))
}

/// The 3-graph `n ⊗ G`: adjoins apex vertices `c_1..c_n` over the edges of a
/// bipartite graph, with edges `c_i u w` for every edge `uw` and every `i`.
/// The vertex set is `U ∪ V ∪ {c_1..c_n}`.
pub fn otimes(n: usize, g: &FamilyInstance) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(Error::domain("otimes needs n >= 1".to_string()));
    }
    let (u, v) = bipartition_of(g)?;
    let graph = g.graph()?;
    let base_n = graph.n();
    let mut edges = Vec::with_capacity(n * graph.edge_count());
    for &[a, b] in graph.edges() {
        for i in 0..n {
            edges.push((base_n + i, a, b));
        }
    }
    let h = ThreeGraph::new(base_n + n, edges)?;
    let mut inst = FamilyInstance::new(Host::Three(h), FamilyTag::Otimes);
    for (key, val) in &g.labels {
        inst.labels.insert(key.clone(), val.clone());
    }
    for i in 1..=n {
        inst.set_label(format!("c_{i}"), [base_n + i - 1]);
    }
    inst.set_label("U", u.iter());
    inst.set_label("V", v.iter());
    inst.set_label("C", base_n..base_n + n);
    Ok(inst)
}

/// The 3-graph doubling the `V` side of a bipartite graph: vertices `a_u`,
/// `b_v`, `c_v`, edges `a_u b_v c_v` for every edge `uv`.
pub fn ghat(g: &FamilyInstance) -> Result<FamilyInstance> {
    let (u, v) = bipartition_of(g)?;
    let graph = g.graph()?;
    let us = u.to_vec();
    let vs = v.to_vec();
    let pos_u: BTreeMap<usize, usize> = us.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let pos_v: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let nu = us.len();
    let nv = vs.len();
    let mut edges = Vec::with_capacity(graph.edge_count());
    for &[a, b] in graph.edges() {
        let (uv, vv) = if u.contains(a) { (a, b) } else { (b, a) };
        let ai = pos_u[&uv];
        let vi = pos_v[&vv];
        edges.push((ai, nu + vi, nu + nv + vi));
    }
    let h = ThreeGraph::new(nu + 2 * nv, edges)?;
    let mut inst = FamilyInstance::new(Host::Three(h), FamilyTag::Ghat);
    for (i, &orig) in us.iter().enumerate() {
        inst.set_label(format!("a_{orig}"), [i]);
    }
    for (i, &orig) in vs.iter().enumerate() {
        inst.set_label(format!("b_{orig}"), [nu + i]);
        inst.set_label(format!("c_{orig}"), [nu + nv + i]);
    }
    inst.set_label("A", 0..nu);
    inst.set_label("B", nu..nu + nv);
    inst.set_label("C", nu + nv..nu + 2 * nv);
    Ok(inst)
}

/// `Û(k)`: the power-set 3-graph with the doubled `a` side — vertices
/// `a_1..a_k, c_1..c_k, b_S`, edges `a_i c_i b_S` for `i ∈ S`. [`ghat`] of
/// the power-set graph doubles the `b` side instead; both variants are
/// exposed.
pub fn uhat(k: usize) -> Result<FamilyInstance> {
    if k == 0 || k > 20 {
        return Err(Error::size_guard(format!(
            "uhat k = {k} outside 1..=20 (vertex count 2k + 2^k)"
        )));
    }
    let masks = 1usize << k;
    let n = 2 * k + masks;
    let mut edges = Vec::new();
    for mask in 0..masks {
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            edges.push((i, k + i, 2 * k + mask));
            m &= m - 1;
        }
    }
    let h = ThreeGraph::new(n, edges)?;
    let mut inst = FamilyInstance::new(Host::Three(h), FamilyTag::Uhat);
    for i in 1..=k {
        inst.set_label(format!("a_{i}"), [i - 1]);
        inst.set_label(format!("c_{i}"), [k + i - 1]);
    }
    for mask in 0..masks {
        inst.set_label(format!("b_{}", subset_label(mask)), [2 * k + mask]);
    }
    inst.set_label("A", 0..k);
    inst.set_label("C", k..2 * k);
    inst.set_label("B", 2 * k..n);
    Ok(inst)
}

fn class_blocks(sizes: &[usize]) -> Result<Vec<(usize, usize)>> {
    if sizes.iter().any(|&s| s == 0) {
        return Err(Error::domain("blow-up sizes must all be >= 1".to_string()));
    }
    let mut blocks = Vec::with_capacity(sizes.len());
    let mut off = 0usize;
    for &s in sizes {
        blocks.push((off, off + s));
        off += s;
    }
    Ok(blocks)
}

fn blowup_class_labels(inst: &mut FamilyInstance, blocks: &[(usize, usize)]) {
    for (u, &(lo, hi)) in blocks.iter().enumerate() {
        inst.set_label(format!("V_{u}"), lo..hi);
    }
}

/// Blow-up of a graph: vertex `u` becomes a class of `sizes[u]` vertices;
/// cross cells between distinct classes follow base adjacency. With
/// `simple`, the edge set is exactly the cross cells over base edges;
/// otherwise the unconstrained within-class pairs are taken from `fill`
/// (absent `fill`, they stay empty).
pub fn blowup_graph(
    base: &Graph,
    sizes: &[usize],
    simple: bool,
    fill: Option<&dyn Fn(usize, usize) -> bool>,
) -> Result<FamilyInstance> {
    if sizes.len() != base.n() {
        return Err(Error::domain(format!(
            "got {} sizes for {} base vertices",
            sizes.len(),
            base.n()
        )));
    }
    let blocks = class_blocks(sizes)?;
    let n: usize = sizes.iter().sum();
    let mut edges = Vec::new();
    for &[u, v] in base.edges() {
        for a in blocks[u].0..blocks[u].1 {
            for b in blocks[v].0..blocks[v].1 {
                edges.push((a, b));
            }
        }
    }
    if !simple {
        if let Some(f) = fill {
            for &(lo, hi) in &blocks {
                for a in lo..hi {
                    for b in a + 1..hi {
                        if f(a, b) {
                            edges.push((a, b));
                        }
                    }
                }
            }
        }
    }
    let g = Graph::new(n, edges)?;
    let mut inst = FamilyInstance::new(Host::Graph(g), FamilyTag::Blowup);
    blowup_class_labels(&mut inst, &blocks);
    Ok(inst)
}

/// Blow-up of a 3-graph; triples meeting three distinct classes follow base
/// adjacency, and with `simple` the edge set is exactly those. Unconstrained
/// triples (two or more vertices in one class) come from `fill`.
pub fn blowup_threegraph(
    base: &ThreeGraph,
    sizes: &[usize],
    simple: bool,
    fill: Option<&dyn Fn(usize, usize, usize) -> bool>,
) -> Result<FamilyInstance> {
    if sizes.len() != base.n() {
        return Err(Error::domain(format!(
            "got {} sizes for {} base vertices",
            sizes.len(),
            base.n()
        )));
    }
    let blocks = class_blocks(sizes)?;
    let n: usize = sizes.iter().sum();
    let mut edges = Vec::new();
    for &[u, v, w] in base.edges() {
        for a in blocks[u].0..blocks[u].1 {
            for b in blocks[v].0..blocks[v].1 {
                for c in blocks[w].0..blocks[w].1 {
                    edges.push((a, b, c));
                }
            }
        }
    }
    if !simple {
        if let Some(f) = fill {
            let class_of = |x: usize| blocks.iter().position(|&(lo, hi)| x >= lo && x < hi);
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        let (ca, cb, cc) = (class_of(a), class_of(b), class_of(c));
                        let distinct = ca != cb && cb != cc && ca != cc;
                        if !distinct && f(a, b, c) {
                            edges.push((a, b, c));
                        }
                    }
                }
            }
        }
    }
    let h = ThreeGraph::new(n, edges)?;
    let mut inst = FamilyInstance::new(Host::Three(h), FamilyTag::Blowup);
    blowup_class_labels(&mut inst, &blocks);
    Ok(inst)
}

/// Whether `g` is a blow-up of `base` along `classes` (one part per base
/// vertex, in base-vertex order): every cross cell between distinct classes
/// is full or empty according to base adjacency.
pub fn is_blowup_of_graph(g: &Graph, base: &Graph, classes: &[VertexSet]) -> Result<bool> {
    if classes.len() != base.n() {
        return Err(Error::domain(format!(
            "got {} classes for {} base vertices",
            classes.len(),
            base.n()
        )));
    }
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() || !c.within_range(g.n()) {
            return Err(Error::domain(format!("class {i} empty or out of range")));
        }
    }
    let rows = g.rows();
    for u in 0..base.n() {
        for v in u + 1..base.n() {
            if !classes[u].is_disjoint(&classes[v]) {
                return Err(Error::domain(format!("classes {u} and {v} overlap")));
            }
            let want = base.has_edge(u, v);
            let count: usize = classes[u]
                .iter()
                .map(|a| rows[a].intersect_count(&classes[v]))
                .sum();
            let full = classes[u].len() * classes[v].len();
            if (want && count != full) || (!want && count != 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// 3-graph analogue of [`is_blowup_of_graph`]: checks the cells spanning
/// three distinct classes.
pub fn is_blowup_of_threegraph(
    h: &ThreeGraph,
    base: &ThreeGraph,
    classes: &[VertexSet],
) -> Result<bool> {
    if classes.len() != base.n() {
        return Err(Error::domain(format!(
            "got {} classes for {} base vertices",
            classes.len(),
            base.n()
        )));
    }
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() || !c.within_range(h.n()) {
            return Err(Error::domain(format!("class {i} empty or out of range")));
        }
        for (j, d) in classes.iter().enumerate().skip(i + 1) {
            if !c.is_disjoint(d) {
                return Err(Error::domain(format!("classes {i} and {j} overlap")));
            }
        }
    }
    for u in 0..base.n() {
        for v in u + 1..base.n() {
            for w in v + 1..base.n() {
                let want = base.has_edge(u, v, w);
                let mut count = 0usize;
                for a in classes[u].iter() {
                    for b in classes[v].iter() {
                        for c in classes[w].iter() {
                            if h.has_edge(a, b, c) {
                                count += 1;
                            }
                        }
                    }
                }
                let full = classes[u].len() * classes[v].len() * classes[w].len();
                if (want && count != full) || (!want && count != 0) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether the ordered lists realize a prescribed-position induced copy of
/// the pattern: `a_i b_j` adjacency across the lists matches the pattern
/// exactly. The `2k` listed vertices must be pairwise distinct.
pub fn is_uv_copy(
    g: &Graph,
    pattern: PatternKind,
    a_list: &[usize],
    b_list: &[usize],
) -> Result<bool> {
    if a_list.len() != b_list.len() || a_list.is_empty() {
        return Err(Error::domain(
            "copy lists must be nonempty and of equal length".to_string(),
        ));
    }
    let mut seen = VertexSet::new();
    for &v in a_list.iter().chain(b_list.iter()) {
        if v >= g.n() {
            return Err(Error::domain(format!("vertex {v} out of range")));
        }
        if seen.contains(v) {
            return Ok(false);
        }
        seen.insert(v);
    }
    let k = a_list.len();
    for i in 1..=k {
        for j in 1..=k {
            if g.has_edge(a_list[i - 1], b_list[j - 1]) != pattern.cross_edge(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `H(k,n)`: the 3-partite 3-graph with classes `U_i`, `V_i` (`i ∈ [k]`) and
/// `W_S` (`S ⊆ [k]`), each of size `n`, and edges `K_3[U_i, V_i, W_S]` for
/// every `i ∈ S`. This is the simple `n`-blow-up of [`uhat`]`(k)`.
pub fn gen_hkn(k: usize, n: usize) -> Result<FamilyInstance> {
    if k == 0 || k > 4 {
        return Err(Error::size_guard(format!(
            "hkn k = {k} outside 1..=4 (vertex count (2k + 2^k) * n)"
        )));
    }
    if n == 0 {
        return Err(Error::domain("hkn needs n >= 1".to_string()));
    }
    let base = uhat(k)?;
    let base_h = base.threegraph()?;
    let sizes = vec![n; base_h.n()];
    let blown = blowup_threegraph(base_h, &sizes, true, None)?;
    let masks = 1usize << k;
    let mut inst = FamilyInstance::new(blown.host, FamilyTag::Hkn);
    // base vertex order in uhat: a_1..a_k, c_1..c_k, b_S; the blocks become
    // U_i (from a_i), V_i (from c_i), W_S (from b_S)
    for i in 1..=k {
        inst.set_label(format!("U_{i}"), (i - 1) * n..i * n);
        inst.set_label(format!("V_{i}"), (k + i - 1) * n..(k + i) * n);
    }
    for mask in 0..masks {
        let lo = (2 * k + mask) * n;
        inst.set_label(format!("W_{}", subset_label(mask)), lo..lo + n);
    }
    inst.set_label("U", 0..k * n);
    inst.set_label("V", k * n..2 * k * n);
    inst.set_label("W", 2 * k * n..(2 * k + masks) * n);
    Ok(inst)
}

/// The blow-up lower-bound pair: `Γ`, a simple `N`-blow-up of the power-set
/// graph `U(K)` with `N = 2^K n / K` (so both sides of the induced graph
/// balance at `2^K n`), and the induced subgraph `G` on all of the `a`-side
/// classes `V_i` together with a `small_side`-subset `U_S` of each `W_S`.
pub struct UkBlowupLb {
    pub gamma: FamilyInstance,
    pub g: FamilyInstance,
}

pub fn gen_uk_blowup_lb(big_k: usize, n: usize, small_side: usize) -> Result<UkBlowupLb> {
    if big_k == 0 || big_k > 4 {
        return Err(Error::size_guard(format!("uk blow-up K = {big_k} outside 1..=4")));
    }
    if n == 0 {
        return Err(Error::domain("uk blow-up needs n >= 1".to_string()));
    }
    let masks = 1usize << big_k;
    if (masks * n) % big_k != 0 {
        return Err(Error::domain(format!(
            "balanced sides need K | 2^K * n; got K = {big_k}, n = {n}"
        )));
    }
    let big_n = masks * n / big_k;
    if small_side == 0 || small_side > big_n {
        return Err(Error::domain(format!(
            "small side {small_side} outside 1..=N = {big_n}"
        )));
    }
    let uk = gen_powerset_graph(big_k)?;
    let base = uk.graph()?;
    let sizes = vec![big_n; base.n()];
    let blown = blowup_graph(base, &sizes, true, None)?;
    let mut gamma = FamilyInstance::new(blown.host, FamilyTag::UkBlowupLb);
    // base order in U(K): a_1..a_K then the b_S blocks
    for i in 1..=big_k {
        gamma.set_label(format!("V_{i}"), (i - 1) * big_n..i * big_n);
    }
    for mask in 0..masks {
        let lo = (big_k + mask) * big_n;
        gamma.set_label(format!("W_{}", subset_label(mask)), lo..lo + big_n);
    }
    gamma.set_label("V", 0..big_k * big_n);
    gamma.set_label("W", big_k * big_n..(big_k + masks) * big_n);

    // induced subgraph: keep all of V, shrink each W_S to its first
    // small_side vertices
    let mut keep = VertexSet::from_iter(0..big_k * big_n);
    for mask in 0..masks {
        let lo = (big_k + mask) * big_n;
        for v in lo..lo + small_side {
            keep.insert(v);
        }
    }
    let (sub, _map) = gamma.graph()?.induced(&keep)?;
    let mut g = FamilyInstance::new(Host::Graph(sub), FamilyTag::UkBlowupLb);
    for i in 1..=big_k {
        g.set_label(format!("V_{i}"), (i - 1) * big_n..i * big_n);
    }
    let v_total = big_k * big_n;
    for mask in 0..masks {
        let lo = v_total + mask * small_side;
        g.set_label(format!("U_{}", subset_label(mask)), lo..lo + small_side);
    }
    g.set_label("V", 0..v_total);
    g.set_label("U", v_total..v_total + masks * small_side);
    Ok(UkBlowupLb { gamma, g })
}

/// Simple `n`-blow-up of `ghat(g)` with class labels `A_u`, `B_v`, `C_v`
/// keyed by the base bipartite graph's vertices.
pub fn ghat_blowup(g: &FamilyInstance, n: usize) -> Result<FamilyInstance> {
    if n == 0 {
        return Err(Error::domain("blow-up size must be >= 1".to_string()));
    }
    let (u, v) = bipartition_of(g)?;
    let hat = ghat(g)?;
    let hat_h = hat.threegraph()?;
    let sizes = vec![n; hat_h.n()];
    let blown = blowup_threegraph(hat_h, &sizes, true, None)?;
    let mut inst = FamilyInstance::new(blown.host, FamilyTag::GhatBlowup);
    let us = u.to_vec();
    let vs = v.to_vec();
    let nu = us.len();
    let nv = vs.len();
    for (i, &orig) in us.iter().enumerate() {
        inst.set_label(format!("A_{orig}"), i * n..(i + 1) * n);
    }
    for (i, &orig) in vs.iter().enumerate() {
        inst.set_label(format!("B_{orig}"), (nu + i) * n..(nu + i + 1) * n);
        inst.set_label(format!("C_{orig}"), (nu + nv + i) * n..(nu + nv + i + 1) * n);
    }
    inst.set_label("A", 0..nu * n);
    inst.set_label("B", nu * n..(nu + nv) * n);
    inst.set_label("C", (nu + nv) * n..(nu + 2 * nv) * n);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bip_instance(g: Graph, u: &[usize], v: &[usize]) -> FamilyInstance {
        let mut inst = FamilyInstance::new(Host::Graph(g), FamilyTag::Custom);
        inst.set_label("U", u.iter().copied());
        inst.set_label("V", v.iter().copied());
        inst
    }

    #[test]
    fn powerset_graph_counts() {
        // k=1: 3 vertices, single edge a1-b_{1}
        let u1 = gen_powerset_graph(1).unwrap();
        assert_eq!(u1.n(), 3);
        assert_eq!(u1.graph().unwrap().edge_count(), 1);
        let a1 = u1.label("a_1").unwrap().to_vec();
        let b1 = u1.label("b_{1}").unwrap().to_vec();
        assert!(u1.graph().unwrap().has_edge(a1[0], b1[0]));

        // k=2: 6 vertices, 4 edges
        let u2 = gen_powerset_graph(2).unwrap();
        assert_eq!(u2.n(), 6);
        assert_eq!(u2.graph().unwrap().edge_count(), 4);

        // k=3: 11 vertices, 12 edges
        let u3 = gen_powerset_graph(3).unwrap();
        assert_eq!(u3.n(), 11);
        assert_eq!(u3.graph().unwrap().edge_count(), 12);

        // closed forms k + 2^k and k * 2^(k-1) for k <= 6
        for k in 1..=6 {
            let u = gen_powerset_graph(k).unwrap();
            assert_eq!(u.n(), k + (1 << k));
            assert_eq!(u.graph().unwrap().edge_count(), k * (1 << (k - 1)));
        }
        assert!(gen_powerset_graph(0).is_err());
        assert!(gen_powerset_graph(21).is_err());
    }

    #[test]
    fn pattern_generators() {
        let h2 = gen_halfgraph(2).unwrap();
        assert_eq!(h2.graph().unwrap().edge_count(), 3);
        let m3 = gen_matching(3).unwrap();
        assert_eq!(m3.graph().unwrap().edge_count(), 3);
        let mb2 = gen_comatching(2).unwrap();
        assert_eq!(mb2.graph().unwrap().edge_count(), 2);
        let g = mb2.graph().unwrap();
        assert!(g.has_edge(0, 3) && g.has_edge(1, 2));
        assert!(!g.has_edge(0, 2) && !g.has_edge(1, 3));
    }

    #[test]
    fn irr_membership() {
        let h3 = gen_halfgraph(3).unwrap();
        assert_eq!(
            is_irr_member(h3.graph().unwrap(), &[0, 1, 2], &[3, 4, 5]).unwrap(),
            IrrTag::Half
        );
        let m2 = gen_matching(2).unwrap();
        assert_eq!(
            is_irr_member(m2.graph().unwrap(), &[0, 1], &[2, 3]).unwrap(),
            IrrTag::Matching
        );
        // complete bipartite K_{2,2} fails all three patterns
        let k22 = Graph::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(is_irr_member(&k22, &[0, 1], &[2, 3]).unwrap(), IrrTag::None);
        assert!(is_irr_member(&k22, &[0], &[1, 2]).is_err());
        assert!(is_irr_member(&k22, &[0, 1], &[1, 2]).is_err());
    }

    #[test]
    fn bip_double_counts() {
        let single = Graph::new(2, [(0, 1)]).unwrap();
        let b = bip_double(&single);
        assert_eq!(b.n(), 4);
        assert_eq!(b.graph().unwrap().edge_count(), 2);

        let b = bip_double(&Graph::edgeless(3));
        assert_eq!(b.n(), 6);
        assert_eq!(b.graph().unwrap().edge_count(), 0);

        let b = bip_double(&Graph::complete(3));
        assert_eq!(b.graph().unwrap().edge_count(), 6);
    }

    #[test]
    fn trip_triple_counts() {
        let single = ThreeGraph::new(3, [(0, 1, 2)]).unwrap();
        let t = trip_triple(&single);
        assert_eq!(t.n(), 9);
        assert_eq!(t.threegraph().unwrap().edge_count(), 6);

        let t = trip_triple(&ThreeGraph::edgeless(2));
        assert_eq!(t.threegraph().unwrap().edge_count(), 0);

        let two = ThreeGraph::new(4, [(0, 1, 2), (0, 1, 3)]).unwrap();
        assert_eq!(trip_triple(&two).threegraph().unwrap().edge_count(), 12);
    }

    #[test]
    fn otimes_counts() {
        // single-edge bipartite graph, n=2: 4 vertices, 2 edges
        let g = bip_instance(Graph::new(2, [(0, 1)]).unwrap(), &[0], &[1]);
        let h = otimes(2, &g).unwrap();
        assert_eq!(h.n(), 4);
        assert_eq!(h.threegraph().unwrap().edge_count(), 2);

        let e = bip_instance(Graph::edgeless(3), &[0, 1], &[2]);
        assert_eq!(otimes(5, &e).unwrap().threegraph().unwrap().edge_count(), 0);

        let u1 = gen_powerset_graph(1).unwrap();
        assert_eq!(otimes(3, &u1).unwrap().threegraph().unwrap().edge_count(), 3);

        // missing bipartition labels
        let bad = FamilyInstance::new(Host::Graph(Graph::new(2, [(0, 1)]).unwrap()), FamilyTag::Custom);
        assert!(otimes(1, &bad).is_err());
    }

    #[test]
    fn ghat_and_uhat() {
        let g = bip_instance(Graph::new(2, [(0, 1)]).unwrap(), &[0], &[1]);
        let h = ghat(&g).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.threegraph().unwrap().edge_count(), 1);

        let u1 = uhat(1).unwrap();
        assert_eq!(u1.n(), 4);
        assert_eq!(u1.threegraph().unwrap().edge_count(), 1);
        let a = u1.label("a_1").unwrap().to_vec()[0];
        let c = u1.label("c_1").unwrap().to_vec()[0];
        let b = u1.label("b_{1}").unwrap().to_vec()[0];
        assert!(u1.threegraph().unwrap().has_edge(a, c, b));

        let e = bip_instance(Graph::edgeless(2), &[0], &[1]);
        assert_eq!(ghat(&e).unwrap().threegraph().unwrap().edge_count(), 0);

        // uhat(2) doubles the a side, ghat(U(2)) doubles the b side
        let u2 = gen_powerset_graph(2).unwrap();
        assert_eq!(uhat(2).unwrap().n(), 2 * 2 + 4);
        assert_eq!(ghat(&u2).unwrap().n(), 2 + 2 * 4);
    }

    #[test]
    fn blowups() {
        let single = Graph::new(2, [(0, 1)]).unwrap();
        let b = blowup_graph(&single, &[2, 2], true, None).unwrap();
        assert_eq!(b.graph().unwrap().edge_count(), 4); // K_{2,2}

        // identity blow-up
        let base = gen_halfgraph(2).unwrap();
        let id = blowup_graph(base.graph().unwrap(), &[1, 1, 1, 1], true, None).unwrap();
        assert_eq!(id.graph().unwrap().edges(), base.graph().unwrap().edges());

        let t = ThreeGraph::new(3, [(0, 1, 2)]).unwrap();
        let tb = blowup_threegraph(&t, &[2, 2, 2], true, None).unwrap();
        assert_eq!(tb.threegraph().unwrap().edge_count(), 8);

        // non-simple fill adds only unconstrained cells
        let filled = blowup_graph(&single, &[2, 2], false, Some(&|_a, _b| true)).unwrap();
        assert_eq!(filled.graph().unwrap().edge_count(), 4 + 1 + 1);
        let classes = vec![VertexSet::from_iter([0, 1]), VertexSet::from_iter([2, 3])];
        assert!(is_blowup_of_graph(filled.graph().unwrap(), &single, &classes).unwrap());
    }

    #[test]
    fn blowup_recognition() {
        let single = Graph::new(2, [(0, 1)]).unwrap();
        let k22 = Graph::new(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let classes = vec![VertexSet::from_iter([0, 1]), VertexSet::from_iter([2, 3])];
        assert!(is_blowup_of_graph(&k22, &single, &classes).unwrap());
        // within-class pairs are unconstrained, so K4 still qualifies
        assert!(is_blowup_of_graph(&Graph::complete(4), &single, &classes).unwrap());
        // a missing cross edge disqualifies
        let missing = Graph::new(4, [(0, 2), (0, 3), (1, 2)]).unwrap();
        assert!(!is_blowup_of_graph(&missing, &single, &classes).unwrap());
        // an off-pattern cross edge between non-adjacent base vertices disqualifies
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let classes3 = vec![
            VertexSet::from_iter([0, 1]),
            VertexSet::from_iter([2, 3]),
            VertexSet::from_iter([4, 5]),
        ];
        assert!(!is_blowup_of_graph(&Graph::complete(6), &path, &classes3).unwrap());
        let good = blowup_graph(&path, &[2, 2, 2], true, None).unwrap();
        assert!(is_blowup_of_graph(good.graph().unwrap(), &path, &classes3).unwrap());

        let m2 = gen_matching(2).unwrap();
        let blown = blowup_graph(m2.graph().unwrap(), &[3, 3, 3, 3], true, None).unwrap();
        let classes: Vec<VertexSet> = (0..4)
            .map(|u| blown.label(&format!("V_{u}")).unwrap())
            .collect();
        assert!(is_blowup_of_graph(blown.graph().unwrap(), m2.graph().unwrap(), &classes).unwrap());

        let t = ThreeGraph::new(3, [(0, 1, 2)]).unwrap();
        let tb = blowup_threegraph(&t, &[2, 1, 2], true, None).unwrap();
        let classes: Vec<VertexSet> = (0..3)
            .map(|u| tb.label(&format!("V_{u}")).unwrap())
            .collect();
        assert!(is_blowup_of_threegraph(tb.threegraph().unwrap(), &t, &classes).unwrap());
    }

    #[test]
    fn uv_copy_checks() {
        let h3 = gen_halfgraph(3).unwrap();
        let g = h3.graph().unwrap();
        assert!(is_uv_copy(g, PatternKind::Half, &[0, 1, 2], &[3, 4, 5]).unwrap());
        // reversed a-list turns the pattern into i >= j
        assert!(!is_uv_copy(g, PatternKind::Half, &[2, 1, 0], &[3, 4, 5]).unwrap());
        // k=1 matching is a single adjacent pair
        assert!(is_uv_copy(g, PatternKind::Matching, &[0], &[3]).unwrap());
    }

    #[test]
    fn hkn_counts() {
        let h11 = gen_hkn(1, 1).unwrap();
        assert_eq!(h11.n(), 4); // U_1, V_1, W_{}, W_{1}
        assert_eq!(h11.threegraph().unwrap().edge_count(), 1);

        let h21 = gen_hkn(2, 1).unwrap();
        assert_eq!(h21.n(), 8);
        assert_eq!(h21.threegraph().unwrap().edge_count(), 4);

        let h22 = gen_hkn(2, 2).unwrap();
        assert_eq!(h22.n(), 16);
        // sum over S of |S| unit cells, each with 2^3 triples
        assert_eq!(h22.threegraph().unwrap().edge_count(), 4 * 8);
        assert!(gen_hkn(5, 1).is_err());
    }

    #[test]
    fn uk_blowup_lb_balance() {
        let lb = gen_uk_blowup_lb(2, 1, 1).unwrap();
        let v = lb.g.label("V").unwrap();
        let u = lb.g.label("U").unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(u.len(), 4);
        assert_eq!(lb.g.n(), 8);
        // gamma keeps full W classes of size N = 2
        assert_eq!(lb.gamma.n(), 2 * 2 + 4 * 2);
        assert!(gen_uk_blowup_lb(3, 1, 1).is_err()); // 3 does not divide 8
        assert!(gen_uk_blowup_lb(2, 1, 3).is_err()); // small side > N
    }

    #[test]
    fn ghat_blowup_structure() {
        let g = bip_instance(Graph::new(2, [(0, 1)]).unwrap(), &[0], &[1]);
        let big = ghat_blowup(&g, 2).unwrap();
        assert_eq!(big.n(), 6);
        assert_eq!(big.threegraph().unwrap().edge_count(), 8);
        assert_eq!(big.label("A_0").unwrap().len(), 2);
        assert_eq!(big.label("B_1").unwrap().len(), 2);
        assert_eq!(big.label("C_1").unwrap().len(), 2);
    }
}
