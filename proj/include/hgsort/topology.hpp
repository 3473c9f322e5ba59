#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hgsort {

/// Identifies a tree node. Leaves are ids [0, n); cells follow in layer order,
/// so the root is always the last id.
using NodeId = std::uint32_t;

struct TreeNode {
  std::size_t layer = 0;                 // 0 for leaves
  std::size_t position = 0;              // index within its layer
  std::optional<NodeId> left;            // cells only
  std::optional<NodeId> right;           // absent on padding cells
  std::optional<NodeId> child;           // absent on the root
  bool is_left_of_child = true;
};

/// Layered reduction tree from n leaves to a single root cell. Layer k holds
/// ceil(n / 2^k) nodes; node j of layer k reads nodes 2j and 2j+1 of layer
/// k-1. A cell whose right parent falls off the end is kept with only a left
/// parent, so every leaf is exactly `depth` cells from the sink.
class TreeTopology {
 public:
  TreeTopology() = default;
  TreeTopology(std::size_t n, std::vector<std::size_t> layer_sizes, std::vector<TreeNode> nodes);

  [[nodiscard]] std::size_t leaf_count() const { return n_; }
  [[nodiscard]] std::size_t cell_count() const { return nodes_.size() - n_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] std::size_t depth() const { return layer_sizes_.empty() ? 0 : layer_sizes_.size() - 1; }
  [[nodiscard]] const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }
  [[nodiscard]] const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] NodeId root() const { return static_cast<NodeId>(nodes_.size() - 1); }
  [[nodiscard]] bool is_leaf(NodeId id) const { return id < n_; }
  /// Cell ordinal (0-based over cells only), as used in traces.
  [[nodiscard]] std::size_t cell_index(NodeId id) const { return id - n_; }

  /// For tests that need to corrupt a topology.
  [[nodiscard]] std::vector<TreeNode>& mutable_nodes() { return nodes_; }
  [[nodiscard]] std::vector<std::size_t>& mutable_layer_sizes() { return layer_sizes_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> layer_sizes_;
  std::vector<TreeNode> nodes_;
};

/// ceil(log2 n) for n >= 2; 1 for n == 1, where a single buffer cell is used.
[[nodiscard]] std::size_t depth_of(std::size_t n);

/// Throws std::invalid_argument on n == 0.
[[nodiscard]] TreeTopology build_tree(std::size_t n);

/// Empty iff every structural invariant holds. Each entry names the node and
/// the broken rule.
[[nodiscard]] std::vector<std::string> validate_topology(const TreeTopology& t);

/// One line per node: `id layer=<k> pos=<j> left=<id|-> right=<id|->`.
void dump_topology(const TreeTopology& t, std::ostream& os);

}  // namespace hgsort
