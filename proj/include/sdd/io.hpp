#pragma once

#include <iosfwd>
#include <string>

#include "sdd/graph.hpp"
#include "sdd/solver.hpp"

namespace sdd {

// Parse failure with a line number, distinct from filesystem errors.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Edge list: whitespace-separated "u v w" lines, 0-based ids, positive
// weights; '#' starts a comment. Duplicate pairs are summed.
WeightedGraph read_edge_list(const std::string& path);
WeightedGraph read_edge_list_stream(std::istream& in, const std::string& name);
void write_edge_list(const std::string& path, const WeightedGraph& g,
                     const std::string& trailer = "");

// Matrix Market coordinate format, real or integer entries, symmetric or
// general kind (general input must be symmetric); pattern is rejected.
// Duplicate entries are summed.
SparseSymMatrix read_matrix_market(const std::string& path);
SparseSymMatrix read_matrix_market_stream(std::istream& in, const std::string& name);

// Dispatch by extension: .mtx -> matrix market, anything else -> edge list
// interpreted as a Laplacian.
SparseSymMatrix read_matrix(const std::string& path);

// One value per line.
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& x);

// Key-sorted JSON serialization of a solve report; stable and lossless.
std::string report_to_json(const SolveReport& r, bool with_timings = true);
SolveReport report_from_json(const std::string& text);

// Instance generators for the benchmark harness and tests.
WeightedGraph gen_grid2d(int side);
WeightedGraph gen_path(int n);
WeightedGraph gen_random_regular(int n, int degree, std::uint64_t seed);
WeightedGraph gen_random_weighted(int n, int extra_edges, std::uint64_t seed);

}  // namespace sdd
