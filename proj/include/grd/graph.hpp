#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace grd {

// Simple undirected graph: symmetric binary adjacency with zero diagonal,
// stored as a packed upper-triangle bitset. Designed for dense work up to
// n ~ 2e4.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(int n);

  int n() const { return n_; }
  bool at(int i, int j) const;
  void set(int i, int j, bool value);
  std::uint64_t edge_count() const;

  // 2 * edges / (n (n-1)).
  double density() const;

  // Number of triangles, via transient row bitsets.
  std::uint64_t triangle_count() const;

  Eigen::MatrixXd to_dense() const;

  std::vector<int> degrees() const;

 private:
  std::size_t bit_index(int i, int j) const;
  int n_;
  std::vector<std::uint64_t> bits_;
};

// Whitespace-separated edge list: header `# n=<count>`, one `i j` pair per
// line, 0-based, i < j, sorted.
void save_edge_list(const AdjacencyMatrix& a, const std::string& path);

struct EdgeListWarnings {
  int duplicate_edges = 0;
  int self_loops = 0;
};

// Tolerant reader: comments (#), blank lines, either endpoint order;
// self-loops dropped and duplicates deduplicated, both counted. Errors
// carry line numbers. When no `# n=` header is present, n is inferred as
// max id + 1.
AdjacencyMatrix parse_edge_list(const std::string& path,
                                EdgeListWarnings* warnings = nullptr);

double estimate_density(const AdjacencyMatrix& a);

}  // namespace grd
