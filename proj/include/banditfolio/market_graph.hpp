#pragma once

#include <string>
#include <vector>

#include "banditfolio/ingest.hpp"
#include "banditfolio/linalg.hpp"

namespace banditfolio {

/// Symmetric, unit-diagonal Pearson correlation grid.
struct CorrelationMatrix {
    Matrix values;
    int size() const { return values.rows; }
};

/// Symmetric, zero-diagonal distances in [0, 2]: d = sqrt(2 (1 - rho)).
struct DistanceMatrix {
    Matrix values;
    int size() const { return values.rows; }
};

struct TreeEdge {
    int i = 0;
    int j = 0;
    double weight = 0.0;
};

/// Minimum spanning tree over asset vertices: n-1 edges plus per-vertex
/// degree counts.
struct SpanningTree {
    std::vector<std::string> vertex_ids;
    std::vector<TreeEdge> edges;
    std::vector<int> degrees;

    int size() const { return static_cast<int>(vertex_ids.size()); }
};

/// Pearson correlation of each asset pair over the given window.
/// Requires >= 2 columns; rejects zero-variance assets by id.
CorrelationMatrix correlation_matrix(const ReturnMatrix& h);

/// Elementwise sqrt(2 (1 - rho)); monotone decreasing in rho.
DistanceMatrix distance_matrix(const CorrelationMatrix& c);

/// Kruskal MST with edges ordered by (weight, min index, max index) so
/// degenerate weight ties resolve deterministically. Requires n >= 2.
SpanningTree minimum_spanning_tree(const DistanceMatrix& d, const std::vector<std::string>& ids);

/// The k most peripheral vertices: ascending degree, ties broken by
/// descending total incident edge weight, then ascending asset id.
std::vector<std::string> select_peripheral(const SpanningTree& t, int k);

/// Sample covariance (rows = assets) over the window.
Matrix sample_covariance(const ReturnMatrix& h);

/// Eigenvalues of the sample covariance matrix, descending; values in
/// [-1e-10, 0) are clamped to 0.
std::vector<double> covariance_eigenvalues(const ReturnMatrix& h);

/// JSON text of the tree (vertices, edges with weights, degrees) for
/// external visualization.
std::string tree_to_json(const SpanningTree& t);

} // namespace banditfolio
