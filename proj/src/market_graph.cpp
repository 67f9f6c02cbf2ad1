#include "banditfolio/market_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace banditfolio {

CorrelationMatrix correlation_matrix(const ReturnMatrix& h) {
    const int n = h.returns.rows;
    const int m = h.returns.cols;
    if (m < 2) throw std::invalid_argument("correlation_matrix: need at least 2 columns");

    std::vector<double> mean(n, 0.0), var(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int t = 0; t < m; ++t) s += h.returns(i, t);
        mean[i] = s / m;
        double v = 0.0;
        for (int t = 0; t < m; ++t) {
            const double d = h.returns(i, t) - mean[i];
            v += d * d;
        }
        var[i] = v;
        if (v <= 0.0) {
            throw std::runtime_error("correlation_matrix: asset '" + h.asset_ids[i] +
                                     "' has zero sample variance; correlation undefined");
        }
    }

    CorrelationMatrix c;
    c.values = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        c.values(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            double cov = 0.0;
            for (int t = 0; t < m; ++t) {
                cov += (h.returns(i, t) - mean[i]) * (h.returns(j, t) - mean[j]);
            }
            double rho = cov / std::sqrt(var[i] * var[j]);
            rho = std::clamp(rho, -1.0, 1.0);
            c.values(i, j) = rho;
            c.values(j, i) = rho;
        }
    }
    return c;
}

DistanceMatrix distance_matrix(const CorrelationMatrix& c) {
    const int n = c.size();
    DistanceMatrix d;
    d.values = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d.values(i, j) = std::sqrt(std::max(0.0, 2.0 * (1.0 - c.values(i, j))));
        }
    }
    return d;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

} // namespace

SpanningTree minimum_spanning_tree(const DistanceMatrix& d, const std::vector<std::string>& ids) {
    const int n = d.size();
    if (n < 2) throw std::invalid_argument("minimum_spanning_tree: need at least 2 vertices");
    if (static_cast<int>(ids.size()) != n) {
        throw std::invalid_argument("minimum_spanning_tree: id count does not match matrix size");
    }

    std::vector<TreeEdge> all;
    all.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) all.push_back({i, j, d.values(i, j)});
    }
    std::sort(all.begin(), all.end(), [](const TreeEdge& a, const TreeEdge& b) {
        if (a.weight != b.weight) return a.weight < b.weight;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    SpanningTree t;
    t.vertex_ids = ids;
    t.degrees.assign(n, 0);
    UnionFind uf(n);
    for (const auto& e : all) {
        if (!uf.unite(e.i, e.j)) continue;
        t.edges.push_back(e);
        ++t.degrees[e.i];
        ++t.degrees[e.j];
        if (static_cast<int>(t.edges.size()) == n - 1) break;
    }
    if (static_cast<int>(t.edges.size()) != n - 1) {
        throw std::runtime_error("minimum_spanning_tree: graph is not connected");
    }
    return t;
}

std::vector<std::string> select_peripheral(const SpanningTree& t, int k) {
    const int n = t.size();
    if (k < 1 || k > n) {
        throw std::invalid_argument("select_peripheral: k = " + std::to_string(k) +
                                    " out of range for " + std::to_string(n) + " vertices");
    }
    std::vector<double> incident(n, 0.0);
    for (const auto& e : t.edges) {
        incident[e.i] += e.weight;
        incident[e.j] += e.weight;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (t.degrees[a] != t.degrees[b]) return t.degrees[a] < t.degrees[b];
        if (incident[a] != incident[b]) return incident[a] > incident[b];
        return t.vertex_ids[a] < t.vertex_ids[b];
    });
    std::vector<std::string> out;
    out.reserve(k);
    for (int r = 0; r < k; ++r) out.push_back(t.vertex_ids[order[r]]);
    return out;
}

Matrix sample_covariance(const ReturnMatrix& h) {
    const int n = h.returns.rows;
    const int m = h.returns.cols;
    if (m < 2) throw std::invalid_argument("sample_covariance: need at least 2 columns");
    std::vector<double> mean(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int t = 0; t < m; ++t) s += h.returns(i, t);
        mean[i] = s / m;
    }
    Matrix cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int t = 0; t < m; ++t) {
                s += (h.returns(i, t) - mean[i]) * (h.returns(j, t) - mean[j]);
            }
            cov(i, j) = s / (m - 1);
            cov(j, i) = cov(i, j);
        }
    }
    return cov;
}

std::vector<double> covariance_eigenvalues(const ReturnMatrix& h) {
    auto eig = jacobi_eigenvalues(sample_covariance(h));
    for (auto& v : eig) {
        if (v < 0.0 && v >= -1e-10) v = 0.0;
    }
    return eig;
}

std::string tree_to_json(const SpanningTree& t) {
    nlohmann::ordered_json j;
    j["vertices"] = t.vertex_ids;
    j["degrees"] = t.degrees;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : t.edges) {
        edges.push_back({{"i", t.vertex_ids[e.i]}, {"j", t.vertex_ids[e.j]}, {"weight", e.weight}});
    }
    j["edges"] = edges;
    return j.dump(2);
}

} // namespace banditfolio
