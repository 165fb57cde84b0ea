#pragma once

#include "startrace/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace startrace {

// Vertices are numbered bulk 0..n-1, boundary n..n+m-1, white n+m..n+m+w-1.
struct Edge {
    int src = 0;
    int tgt = 0;
    auto operator<=>(const Edge&) const = default;
};

enum class VertexKind { Bulk, Boundary, White };

struct AdmissibleGraph {
    std::vector<int> k;  // out-degrees of the bulk vertices
    int m = 0;
    int w = 0;
    std::vector<Edge> edges;

    int n() const { return static_cast<int>(k.size()); }
    int vertex_count() const { return n() + m + w; }
    VertexKind kind(int v) const;
    // throws std::invalid_argument naming the violated rule
    void validate() const;
    // edges leaving bulk vertex i in slot order: bulk targets, boundary targets, then whites
    std::vector<Edge> slots(int i) const;
};

struct CanonicalForm {
    std::vector<std::uint8_t> bytes;
    auto operator<=>(const CanonicalForm&) const = default;
    std::string hex() const;
};

CanonicalForm canonical_form(const AdmissibleGraph& g);
// complete and duplicate-free, ordered by canonical form
std::vector<AdmissibleGraph> enumerate(const std::vector<int>& k, int m, int max_white);

// j cycle vertices i -> i+1 mod j and a center vertex j with a spoke to each of them
AdmissibleGraph wheel(int j);

// Contracts every edge i -> v of the i-th multivector slot against a derivative on the content of v.
// Free slots on edges into white vertices become theta factors, ordered by source vertex and slot.
MultiVector evaluate_VGamma(const AdmissibleGraph& g, const std::vector<MultiVector>& xi,
                            const std::vector<GradedSeries>& a);

std::string to_dot(const AdmissibleGraph& g);

}  // namespace startrace
