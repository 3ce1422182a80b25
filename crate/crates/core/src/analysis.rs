//! Classification of a locality graph by which encodings it admits.

use serde::Serialize;

use crate::graph::{has_eight_shape, is_tree, max_eight_size, LocalityGraph, SearchConfig, SearchMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphClass {
    Tree,
    SingleOrDisjointCycles,
    OverlappingCycles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VacuumClass {
    Product,
    Entangled,
}

/// 1-based rendering of the 8-shape attaining the reported size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateView {
    pub paths: [Vec<usize>; 3],
    pub prefix_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub graph_class: GraphClass,
    pub local_encoding_possible: bool,
    pub block_encoding_possible: bool,
    pub vacuum_state_class: VacuumClass,
    pub max_eight_size: Option<usize>,
    pub depth_lower_bound: Option<usize>,
    /// Whether `max_eight_size` is exact or a certified lower bound.
    pub size_exact: bool,
    pub search_mode: Option<SearchMode>,
    pub certificate: Option<CertificateView>,
}

pub fn analyze(g: &LocalityGraph, config: &SearchConfig) -> AnalysisReport {
    let tree = is_tree(g);
    let overlapping = !tree && has_eight_shape(g);
    let graph_class = match (tree, overlapping) {
        (true, _) => GraphClass::Tree,
        (false, false) => GraphClass::SingleOrDisjointCycles,
        (false, true) => GraphClass::OverlappingCycles,
    };
    let search = overlapping.then(|| max_eight_size(g, config));
    let size = search.as_ref().and_then(|s| s.size);
    let certificate = search.as_ref().and_then(|s| s.certificate.as_ref()).map(|c| CertificateView {
        paths: c.shape.paths().clone().map(|p| p.iter().map(|v| v + 1).collect()),
        prefix_len: c.prefix_len,
    });
    AnalysisReport {
        n_vertices: g.n_vertices(),
        n_edges: g.n_edges(),
        graph_class,
        local_encoding_possible: tree,
        block_encoding_possible: true,
        vacuum_state_class: if overlapping { VacuumClass::Entangled } else { VacuumClass::Product },
        max_eight_size: size,
        depth_lower_bound: size,
        size_exact: search.as_ref().is_none_or(|s| s.exact),
        search_mode: search.as_ref().map(|s| s.mode),
        certificate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{from_spec, theta};

    #[test]
    fn table_rows() {
        let cfg = SearchConfig::default();
        let p = analyze(&from_spec("path:8").unwrap(), &cfg);
        assert_eq!(p.graph_class, GraphClass::Tree);
        assert!(p.local_encoding_possible && p.block_encoding_possible);
        assert_eq!((p.vacuum_state_class, p.depth_lower_bound), (VacuumClass::Product, None));
        let r = analyze(&from_spec("ring:8").unwrap(), &cfg);
        assert_eq!(r.graph_class, GraphClass::SingleOrDisjointCycles);
        assert!(!r.local_encoding_possible);
        assert_eq!((r.vacuum_state_class, r.depth_lower_bound), (VacuumClass::Product, None));
        let t = analyze(&theta(2, 2, 2).unwrap(), &cfg);
        assert_eq!(t.graph_class, GraphClass::OverlappingCycles);
        assert_eq!(t.vacuum_state_class, VacuumClass::Entangled);
        assert_eq!(t.max_eight_size, Some(0));
        assert_eq!(t.depth_lower_bound, t.max_eight_size);
        assert!(t.size_exact);
    }
}
