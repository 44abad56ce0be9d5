#pragma once

// Dyadic grids t_j = r + (j / 2^n)(s - r) and addressing of interior nodes.
//
// Interior node addresses are (level, odd_index): the node first appears at
// `level` and sits at r + (odd_index / 2^level)(s - r). Noise vectors store
// nodes in level order (level 1, then level 2 left to right, ...), so the
// noise for depth n is a prefix of the noise for depth n + 1.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "lippath/error.hpp"

namespace lippath {

inline constexpr int kMaxDepth = 30;

inline void check_depth(int depth) {
  if (depth < 0) throw Error(Errc::invalid_domain, "depth must be nonnegative");
  if (depth > kMaxDepth) {
    std::ostringstream os;
    os << "depth " << depth << " exceeds the maximum " << kMaxDepth;
    throw Error(Errc::depth_overflow, os.str());
  }
}

/// 2^depth - 1: dimension of the noise cube at this depth.
inline std::size_t interior_node_count(int depth) {
  check_depth(depth);
  return (std::size_t{1} << depth) - 1;
}

class DyadicGrid {
 public:
  DyadicGrid(double r, double s, int depth) : r_(r), s_(s), depth_(depth) {
    if (!(r < s) || !std::isfinite(r) || !std::isfinite(s)) {
      throw Error(Errc::invalid_domain, "grid needs finite r < s");
    }
    check_depth(depth);
  }

  double r() const noexcept { return r_; }
  double s() const noexcept { return s_; }
  int depth() const noexcept { return depth_; }
  std::size_t cells() const noexcept { return std::size_t{1} << depth_; }
  std::size_t size() const noexcept { return cells() + 1; }
  double spacing() const noexcept { return std::ldexp(s_ - r_, -depth_); }

  // Closed form only: t_{n+1,2j} == t_{n,j} holds bitwise this way.
  double time(std::size_t j) const noexcept {
    return r_ + std::ldexp(static_cast<double>(j), -depth_) * (s_ - r_);
  }

  std::vector<double> times() const {
    std::vector<double> out(size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = time(j);
    return out;
  }

  friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;

 private:
  double r_;
  double s_;
  int depth_;
};

inline std::vector<double> times(const DyadicGrid& grid) { return grid.times(); }

struct NodeId {
  int level = 1;
  std::uint64_t odd_index = 1;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

inline bool valid(const NodeId& node) noexcept {
  return node.level >= 1 && node.level <= kMaxDepth && (node.odd_index & 1u) == 1u &&
         node.odd_index < (std::uint64_t{1} << node.level);
}

inline void check_node(const NodeId& node) {
  if (!valid(node)) {
    std::ostringstream os;
    os << "invalid node (level=" << node.level << ", odd_index=" << node.odd_index << ")";
    throw Error(Errc::invalid_domain, os.str());
  }
}

/// Position of the node in level-order noise storage.
inline std::size_t flat_index(const NodeId& node) noexcept {
  return ((std::size_t{1} << (node.level - 1)) - 1) + static_cast<std::size_t>(node.odd_index >> 1);
}

inline NodeId node_at_flat_index(std::size_t index) noexcept {
  int level = 1;
  while (index + 1 >= (std::size_t{1} << level)) ++level;
  const std::size_t offset = (std::size_t{1} << (level - 1)) - 1;
  return NodeId{level, 2 * static_cast<std::uint64_t>(index - offset) + 1};
}

/// Grid position of the node on a depth-`depth` grid (depth >= node.level).
inline std::size_t grid_index(const NodeId& node, int depth) noexcept {
  return static_cast<std::size_t>(node.odd_index) << (depth - node.level);
}

/// Node address of an interior grid position 0 < j < 2^depth.
inline NodeId node_at_grid_index(std::size_t j, int depth) noexcept {
  int level = depth;
  while ((j & 1u) == 0u) {
    j >>= 1;
    --level;
  }
  return NodeId{level, static_cast<std::uint64_t>(j)};
}

inline double node_time(const NodeId& node, double r, double s) noexcept {
  return r + std::ldexp(static_cast<double>(node.odd_index), -node.level) * (s - r);
}

enum class Boundary { left, right };

using GridPoint = std::variant<Boundary, NodeId>;

/// The two level-(m-1) points bracketing node (m, k).
inline std::pair<GridPoint, GridPoint> parent_endpoints(const NodeId& node) {
  check_node(node);
  const int parent_level = node.level - 1;
  const std::uint64_t last = std::uint64_t{1} << parent_level;
  auto point = [&](std::uint64_t position) -> GridPoint {
    if (position == 0) return Boundary::left;
    if (position == last) return Boundary::right;
    return node_at_grid_index(static_cast<std::size_t>(position), parent_level);
  };
  return {point((node.odd_index - 1) / 2), point((node.odd_index + 1) / 2)};
}

}  // namespace lippath
