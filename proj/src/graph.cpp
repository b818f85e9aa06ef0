#include "grd/graph.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "grd/errors.hpp"

namespace grd {

AdjacencyMatrix::AdjacencyMatrix(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("AdjacencyMatrix: n must be >= 1");
  const std::size_t pairs =
      static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) - 1) / 2;
  bits_.assign((pairs + 63) / 64, 0);
}

std::size_t AdjacencyMatrix::bit_index(int i, int j) const {
  // Upper triangle, row-major: pairs (0,1), (0,2), ..., (i, i+1), ...
  const std::size_t row = static_cast<std::size_t>(i);
  return row * n_ - row * (row + 1) / 2 + (j - i - 1);
}

bool AdjacencyMatrix::at(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  const std::size_t b = bit_index(i, j);
  return (bits_[b >> 6] >> (b & 63)) & 1u;
}

void AdjacencyMatrix::set(int i, int j, bool value) {
  if (i == j) throw std::invalid_argument("AdjacencyMatrix: no self loops");
  if (i > j) std::swap(i, j);
  const std::size_t b = bit_index(i, j);
  if (value)
    bits_[b >> 6] |= (std::uint64_t{1} << (b & 63));
  else
    bits_[b >> 6] &= ~(std::uint64_t{1} << (b & 63));
}

std::uint64_t AdjacencyMatrix::edge_count() const {
  std::uint64_t c = 0;
  for (const auto w : bits_) c += std::popcount(w);
  return c;
}

double AdjacencyMatrix::density() const {
  if (n_ < 2) return 0.0;
  const double pairs = 0.5 * n_ * (n_ - 1.0);
  return static_cast<double>(edge_count()) / pairs;
}

std::uint64_t AdjacencyMatrix::triangle_count() const {
  const int words = (n_ + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n_) * words, 0);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (at(i, j)) {
        rows[static_cast<std::size_t>(i) * words + (j >> 6)] |=
            (std::uint64_t{1} << (j & 63));
        rows[static_cast<std::size_t>(j) * words + (i >> 6)] |=
            (std::uint64_t{1} << (i & 63));
      }
    }
  }
  // For each edge (i, j), common neighbours above j close a triangle once.
  std::uint64_t triangles = 0;
  for (int i = 0; i < n_; ++i) {
    const std::uint64_t* ri = &rows[static_cast<std::size_t>(i) * words];
    for (int j = i + 1; j < n_; ++j) {
      if (!at(i, j)) continue;
      const std::uint64_t* rj = &rows[static_cast<std::size_t>(j) * words];
      for (int w = j >> 6; w < words; ++w) {
        std::uint64_t common = ri[w] & rj[w];
        if (w == (j >> 6)) common &= ~((std::uint64_t{2} << (j & 63)) - 1);
        triangles += std::popcount(common);
      }
    }
  }
  return triangles;
}

Eigen::MatrixXd AdjacencyMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (at(i, j)) m(i, j) = m(j, i) = 1.0;
    }
  }
  return m;
}

std::vector<int> AdjacencyMatrix::degrees() const {
  std::vector<int> d(n_, 0);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (at(i, j)) {
        ++d[i];
        ++d[j];
      }
    }
  }
  return d;
}

void save_edge_list(const AdjacencyMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "# n=" << a.n() << "\n";
  for (int i = 0; i < a.n(); ++i) {
    for (int j = i + 1; j < a.n(); ++j) {
      if (a.at(i, j)) out << i << " " << j << "\n";
    }
  }
}

AdjacencyMatrix parse_edge_list(const std::string& path,
                                EdgeListWarnings* warnings) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::string line;
  int lineno = 0;
  long declared_n = -1;
  std::vector<std::pair<int, int>> edges;
  int max_id = -1;
  EdgeListWarnings warn;

  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      const auto eq = line.find("n=");
      if (eq != std::string::npos) {
        try {
          declared_n = std::stol(line.substr(eq + 2));
        } catch (const std::exception&) {
          throw DataError(path + ":" + std::to_string(lineno) +
                          ": bad n= header");
        }
      }
      continue;
    }
    std::istringstream ss(line.substr(start));
    long i, j;
    std::string extra;
    if (!(ss >> i >> j) || (ss >> extra && !extra.empty() && extra[0] != '#'))
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected two integer node ids");
    if (i < 0 || j < 0)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": negative node id");
    if (declared_n >= 0 && (i >= declared_n || j >= declared_n))
      throw DataError(path + ":" + std::to_string(lineno) + ": node id " +
                      std::to_string(std::max(i, j)) + " out of range for n=" +
                      std::to_string(declared_n));
    if (i == j) {
      ++warn.self_loops;
      continue;
    }
    if (i > j) std::swap(i, j);
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    max_id = std::max(max_id, static_cast<int>(j));
  }
  const int n = declared_n >= 0 ? static_cast<int>(declared_n) : max_id + 1;
  if (n < 1)
    throw DataError(path + ": no nodes (empty file without n= header)");
  AdjacencyMatrix a(n);
  for (const auto& [i, j] : edges) {
    if (a.at(i, j))
      ++warn.duplicate_edges;
    else
      a.set(i, j, true);
  }
  if (warnings) *warnings = warn;
  return a;
}

double estimate_density(const AdjacencyMatrix& a) {
  if (a.n() < 2) throw std::invalid_argument("estimate_density: n must be >= 2");
  return a.density();
}

}  // namespace grd
