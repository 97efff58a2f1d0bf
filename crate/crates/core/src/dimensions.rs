//! Exact VC dimension for graphs and 3-graphs, slice graphs, and slicewise
//! VC dimension.
//!
//! The graph VC dimension is the largest `k` admitting vertices
//! `a_1..a_k` and `b_S` (`S ⊆ [k]`), all `k + 2^k` pairwise distinct, with
//! `a_i b_S` an edge exactly when `i ∈ S`. The 3-graph variant shatters with
//! pairs: `a_i b_i c_S` an edge exactly when `i ∈ S`. Searches enumerate
//! candidate tuples in lexicographic order and match each required trace to
//! its least realizing vertex, so certificates are deterministic.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::core::{Graph, ThreeGraph, VertexSet};
use crate::families::subset_label;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertKind {
    GraphVc,
    ThreegraphVc,
    Slicewise,
}

/// A verified shattering witness.
#[derive(Clone, Debug, Serialize)]
pub struct ShatterCertificate {
    pub kind: CertKind,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_vertices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_pairs: Option<Vec<[usize; 2]>>,
    /// Subset label (e.g. `"{1,3}"`) to shattered vertex.
    pub b_vertices: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice_vertex: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VcResult {
    pub k: usize,
    /// False when the search stopped at `k_max` with a certificate, so the
    /// true dimension is only known to be at least `k`.
    pub exact: bool,
    pub certificate: Option<ShatterCertificate>,
}

const K_MAX_GUARD: usize = 5;
const N_GUARD: usize = 512;

fn guard(n: usize, k_max: usize) -> Result<()> {
    if k_max > K_MAX_GUARD {
        return Err(Error::capacity(format!(
            "vc search k_max = {k_max} above the guard {K_MAX_GUARD}"
        )));
    }
    if n > N_GUARD {
        return Err(Error::capacity(format!(
            "vc search on {n} vertices above the guard {N_GUARD}"
        )));
    }
    Ok(())
}

/// Largest `k` with `k + 2^k <= n`.
fn vertex_budget_cap(n: usize) -> usize {
    let mut k = 0usize;
    while k + 1 + (1usize << (k + 1)) <= n {
        k += 1;
    }
    k
}

/// Lexicographic combinations visitor; yields sorted index tuples.
fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k == 0 || k > n {
        return;
    }
    loop {
        if visit(&idx) {
            return;
        }
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn graph_cert_at(g: &Graph, k: usize) -> Option<ShatterCertificate> {
    let n = g.n();
    let masks = 1usize << k;
    let rows = g.rows();
    let mut found: Option<ShatterCertificate> = None;
    combinations(n, k, |a| {
        // trace every other vertex over the candidate a-tuple
        let mut rep: Vec<Option<usize>> = vec![None; masks];
        let mut covered = 0usize;
        for v in 0..n {
            if a.contains(&v) {
                continue;
            }
            let mut mask = 0usize;
            for (i, &ai) in a.iter().enumerate() {
                if rows[ai].contains(v) {
                    mask |= 1 << i;
                }
            }
            if rep[mask].is_none() {
                rep[mask] = Some(v);
                covered += 1;
                if covered == masks {
                    break;
                }
            }
        }
        if covered == masks {
            let mut b_vertices = BTreeMap::new();
            for (mask, v) in rep.iter().enumerate() {
                b_vertices.insert(subset_label(mask), v.unwrap());
            }
            found = Some(ShatterCertificate {
                kind: CertKind::GraphVc,
                k,
                a_vertices: Some(a.to_vec()),
                a_pairs: None,
                b_vertices,
                slice_vertex: None,
            });
            true
        } else {
            false
        }
    });
    found
}

/// Exact VC dimension of a graph, searched up to `k_max`.
pub fn vc_graph(g: &Graph, k_max: usize) -> Result<VcResult> {
    guard(g.n(), k_max)?;
    let cap = vertex_budget_cap(g.n()).min(k_max);
    for k in (1..=cap).rev() {
        if let Some(cert) = graph_cert_at(g, k) {
            // exact unless the search was cut off by k_max below the vertex
            // budget (a larger certificate could then exist)
            let exact = k < k_max || k_max >= vertex_budget_cap(g.n());
            return Ok(VcResult {
                k,
                exact,
                certificate: Some(cert),
            });
        }
    }
    Ok(VcResult {
        k: 0,
        exact: true,
        certificate: None,
    })
}

fn threegraph_cert_at(h: &ThreeGraph, k: usize) -> Option<ShatterCertificate> {
    let n = h.n();
    let masks = 1usize << k;
    // only pairs appearing in at least one edge can be shattered (the
    // singleton subset {i} needs an edge through pair i)
    let mut pair_set = std::collections::BTreeSet::new();
    for &[a, b, c] in h.edges() {
        pair_set.insert([a, b]);
        pair_set.insert([a, c]);
        pair_set.insert([b, c]);
    }
    let pairs: Vec<[usize; 2]> = pair_set.into_iter().collect();
    if pairs.len() < k {
        return None;
    }
    let mut found: Option<ShatterCertificate> = None;
    combinations(pairs.len(), k, |sel| {
        let chosen: Vec<[usize; 2]> = sel.iter().map(|&i| pairs[i]).collect();
        // pairwise disjoint pairs
        let mut used = VertexSet::new();
        for &[a, b] in &chosen {
            if used.contains(a) || used.contains(b) {
                return false;
            }
            used.insert(a);
            used.insert(b);
        }
        let mut rep: Vec<Option<usize>> = vec![None; masks];
        let mut covered = 0usize;
        for v in 0..n {
            if used.contains(v) {
                continue;
            }
            let mut mask = 0usize;
            for (i, &[a, b]) in chosen.iter().enumerate() {
                if h.has_edge(a, b, v) {
                    mask |= 1 << i;
                }
            }
            if rep[mask].is_none() {
                rep[mask] = Some(v);
                covered += 1;
                if covered == masks {
                    break;
                }
            }
        }
        if covered == masks {
            let mut b_vertices = BTreeMap::new();
            for (mask, v) in rep.iter().enumerate() {
                b_vertices.insert(subset_label(mask), v.unwrap());
            }
            found = Some(ShatterCertificate {
                kind: CertKind::ThreegraphVc,
                k,
                a_vertices: None,
                a_pairs: Some(chosen),
                b_vertices,
                slice_vertex: None,
            });
            true
        } else {
            false
        }
    });
    found
}

/// Largest `k` with `2k + 2^k <= n`.
fn vertex_budget_cap_pairs(n: usize) -> usize {
    let mut k = 0usize;
    while 2 * (k + 1) + (1usize << (k + 1)) <= n {
        k += 1;
    }
    k
}

/// Exact 3-graph VC dimension (pair-based shattering), up to `k_max`.
pub fn vc_threegraph(h: &ThreeGraph, k_max: usize) -> Result<VcResult> {
    guard(h.n(), k_max)?;
    if k_max > 3 {
        // pair-tuple enumeration grows with C(#pairs, k)
        return Err(Error::capacity(format!(
            "3-graph vc search k_max = {k_max} above the pair-search guard 3"
        )));
    }
    let cap = vertex_budget_cap_pairs(h.n()).min(k_max);
    for k in (1..=cap).rev() {
        if let Some(cert) = threegraph_cert_at(h, k) {
            let exact = k < k_max || k_max >= vertex_budget_cap_pairs(h.n());
            return Ok(VcResult {
                k,
                exact,
                certificate: Some(cert),
            });
        }
    }
    Ok(VcResult {
        k: 0,
        exact: true,
        certificate: None,
    })
}

/// The slice graph at `x`: same vertex range, edges `{yz : xyz ∈ E}`.
/// `x` itself is isolated by construction.
pub fn slice_graph(h: &ThreeGraph, x: usize) -> Result<Graph> {
    if x >= h.n() {
        return Err(Error::domain(format!("slice vertex {x} out of range 0..{}", h.n())));
    }
    Graph::new(h.n(), h.links()[x].iter().map(|&[a, b]| (a, b)))
}

/// Slicewise VC dimension: the maximum of `vc_graph` over all slice graphs,
/// together with the least achieving slice vertex.
pub fn svc(h: &ThreeGraph, k_max: usize) -> Result<VcResult> {
    guard(h.n(), k_max)?;
    let mut best = VcResult {
        k: 0,
        exact: true,
        certificate: None,
    };
    for x in 0..h.n() {
        let g = slice_graph(h, x)?;
        let res = vc_graph(&g, k_max)?;
        if res.k > best.k {
            let mut cert = res.certificate;
            if let Some(c) = cert.as_mut() {
                c.kind = CertKind::Slicewise;
                c.slice_vertex = Some(x);
            }
            best = VcResult {
                k: res.k,
                exact: res.exact,
                certificate: cert,
            };
        }
        best.exact &= res.exact;
    }
    Ok(best)
}

/// Re-verifies a graph shattering certificate against the host.
pub fn verify_graph_certificate(g: &Graph, cert: &ShatterCertificate) -> bool {
    let a = match &cert.a_vertices {
        Some(a) => a,
        None => return false,
    };
    if a.len() != cert.k || cert.b_vertices.len() != 1 << cert.k {
        return false;
    }
    let mut seen = VertexSet::new();
    for &v in a.iter().chain(cert.b_vertices.values()) {
        if v >= g.n() || seen.contains(v) {
            return false;
        }
        seen.insert(v);
    }
    for mask in 0..(1usize << cert.k) {
        let b = match cert.b_vertices.get(&subset_label(mask)) {
            Some(&b) => b,
            None => return false,
        };
        for (i, &ai) in a.iter().enumerate() {
            if g.has_edge(ai, b) != ((mask >> i) & 1 == 1) {
                return false;
            }
        }
    }
    true
}

/// Re-verifies a 3-graph (pair-shattering) certificate against the host.
pub fn verify_threegraph_certificate(h: &ThreeGraph, cert: &ShatterCertificate) -> bool {
    let pairs = match &cert.a_pairs {
        Some(p) => p,
        None => return false,
    };
    if pairs.len() != cert.k || cert.b_vertices.len() != 1 << cert.k {
        return false;
    }
    let mut seen = VertexSet::new();
    for &[a, b] in pairs {
        if a >= h.n() || b >= h.n() || seen.contains(a) || seen.contains(b) {
            return false;
        }
        seen.insert(a);
        seen.insert(b);
    }
    for &v in cert.b_vertices.values() {
        if v >= h.n() || seen.contains(v) {
            return false;
        }
        seen.insert(v);
    }
    for mask in 0..(1usize << cert.k) {
        let c = match cert.b_vertices.get(&subset_label(mask)) {
            Some(&c) => c,
            None => return false,
        };
        for (i, &[a, b]) in pairs.iter().enumerate() {
            if h.has_edge(a, b, c) != ((mask >> i) & 1 == 1) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_hkn, gen_powerset_graph, otimes, uhat};

    #[test]
    fn vc_of_powerset_graphs() {
        assert_eq!(vc_graph(&Graph::edgeless(5), 3).unwrap().k, 0);
        for k in 1..=3 {
            let u = gen_powerset_graph(k).unwrap();
            let res = vc_graph(u.graph().unwrap(), 3).unwrap();
            assert_eq!(res.k, k, "vc(U({k})) = {k}");
            // U(k) has k + 2^k vertices, so k+1 is refuted by the vertex
            // budget and the result is exact
            assert!(res.exact);
            assert!(verify_graph_certificate(
                u.graph().unwrap(),
                res.certificate.as_ref().unwrap()
            ));
        }
    }

    #[test]
    fn vc_single_edge_plus_isolated() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        let res = vc_graph(&g, 3).unwrap();
        assert_eq!(res.k, 1);
        let cert = res.certificate.unwrap();
        assert!(verify_graph_certificate(&g, &cert));
        // canonical least certificate: a = 0, b_{1} = 1, b_{} = 2
        assert_eq!(cert.a_vertices, Some(vec![0]));
        assert_eq!(cert.b_vertices.get("{1}"), Some(&1));
        assert_eq!(cert.b_vertices.get("{}"), Some(&2));
    }

    #[test]
    fn vc_monotone_under_induced() {
        let u2 = gen_powerset_graph(2).unwrap();
        let g = u2.graph().unwrap();
        let (sub, _) = g.induced(&VertexSet::from_iter(0..4)).unwrap();
        let vc_sub = vc_graph(&sub, 3).unwrap().k;
        let vc_full = vc_graph(g, 3).unwrap().k;
        assert!(vc_sub <= vc_full);
    }

    #[test]
    fn threegraph_vc() {
        assert_eq!(vc_threegraph(&ThreeGraph::edgeless(6), 2).unwrap().k, 0);

        // single edge on 4 vertices: pair (0,1), c_{1} = 2, c_{} = 3
        let h = ThreeGraph::new(4, [(0, 1, 2)]).unwrap();
        let res = vc_threegraph(&h, 2).unwrap();
        assert_eq!(res.k, 1);
        assert!(verify_threegraph_certificate(&h, res.certificate.as_ref().unwrap()));

        // uhat(2) shatters with pairs (a_i, c_i) and vertices b_S
        let u = uhat(2).unwrap();
        let res = vc_threegraph(u.threegraph().unwrap(), 2).unwrap();
        assert_eq!(res.k, 2);
        assert!(verify_threegraph_certificate(
            u.threegraph().unwrap(),
            res.certificate.as_ref().unwrap()
        ));
    }

    #[test]
    fn slice_graphs() {
        let h = ThreeGraph::new(3, [(0, 1, 2)]).unwrap();
        let s = slice_graph(&h, 0).unwrap();
        assert_eq!(s.edges(), &[[1, 2]]);
        assert!(slice_graph(&ThreeGraph::edgeless(4), 1).unwrap().edges().is_empty());
        assert!(slice_graph(&h, 5).is_err());

        // hkn(2,1): slicing at the W_{1,2} vertex exposes the U_i V_i pairs
        let inst = gen_hkn(2, 1).unwrap();
        let w12 = inst.label("W_{1,2}").unwrap().to_vec()[0];
        let s = slice_graph(inst.threegraph().unwrap(), w12).unwrap();
        let u1 = inst.label("U_1").unwrap().to_vec()[0];
        let v1 = inst.label("V_1").unwrap().to_vec()[0];
        let u2 = inst.label("U_2").unwrap().to_vec()[0];
        let v2 = inst.label("V_2").unwrap().to_vec()[0];
        assert!(s.has_edge(u1, v1) && s.has_edge(u2, v2));
        assert!(!s.has_edge(u1, v2));
    }

    #[test]
    fn svc_examples() {
        assert_eq!(svc(&ThreeGraph::edgeless(5), 2).unwrap().k, 0);

        let h = ThreeGraph::new(3, [(0, 1, 2)]).unwrap();
        let res = svc(&h, 2).unwrap();
        assert_eq!(res.k, 1);

        // svc(1 ⊗ U(2)) = 2: the slice at the apex is U(2)
        let u2 = gen_powerset_graph(2).unwrap();
        let h = otimes(1, &u2).unwrap();
        let res = svc(h.threegraph().unwrap(), 3).unwrap();
        assert_eq!(res.k, 2);
        let cert = res.certificate.unwrap();
        assert_eq!(cert.slice_vertex, Some(6)); // the apex c_1
        assert_eq!(cert.kind, CertKind::Slicewise);
    }

    #[test]
    fn vc_at_most_svc_on_small_seeded_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..30 {
            let n = rng.gen_range(4..=8);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    for c in b + 1..n {
                        if rng.gen_bool(0.4) {
                            edges.push((a, b, c));
                        }
                    }
                }
            }
            let h = ThreeGraph::new(n, edges).unwrap();
            let vc = vc_threegraph(&h, 2).unwrap().k;
            let sv = svc(&h, 2).unwrap().k;
            assert!(vc <= sv, "vc {vc} > svc {sv} on n = {n}");
        }
    }
}
