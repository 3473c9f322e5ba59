#include "hgsort/topology.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hgsort {

TreeTopology::TreeTopology(std::size_t n, std::vector<std::size_t> layer_sizes,
                           std::vector<TreeNode> nodes)
    : n_(n), layer_sizes_(std::move(layer_sizes)), nodes_(std::move(nodes)) {}

std::size_t depth_of(std::size_t n) {
  if (n <= 1) {
    return 1;
  }
  return static_cast<std::size_t>(std::bit_width(n - 1));
}

namespace {

std::vector<std::size_t> expected_layer_sizes(std::size_t n) {
  std::vector<std::size_t> sizes{n};
  const std::size_t depth = depth_of(n);
  for (std::size_t k = 1; k <= depth; ++k) {
    sizes.push_back((sizes.back() + 1) / 2);
  }
  return sizes;
}

}  // namespace

TreeTopology build_tree(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("build_tree: n must be >= 1");
  }
  auto sizes = expected_layer_sizes(n);
  std::vector<TreeNode> nodes;
  std::size_t total = 0;
  for (auto s : sizes) total += s;
  nodes.reserve(total);

  std::size_t prev_begin = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const std::size_t begin = nodes.size();
    for (std::size_t j = 0; j < sizes[k]; ++j) {
      TreeNode node;
      node.layer = k;
      node.position = j;
      if (k > 0) {
        const auto l = static_cast<NodeId>(prev_begin + 2 * j);
        node.left = l;
        nodes[l].child = static_cast<NodeId>(begin + j);
        nodes[l].is_left_of_child = true;
        if (2 * j + 1 < sizes[k - 1]) {
          const auto r = static_cast<NodeId>(l + 1);
          node.right = r;
          nodes[r].child = static_cast<NodeId>(begin + j);
          nodes[r].is_left_of_child = false;
        }
      }
      nodes.push_back(node);
    }
    prev_begin = begin;
  }
  return TreeTopology(n, std::move(sizes), std::move(nodes));
}

std::vector<std::string> validate_topology(const TreeTopology& t) {
  std::vector<std::string> out;
  auto report = [&out](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out.push_back(os.str());
  };

  const std::size_t n = t.leaf_count();
  if (n == 0) {
    report("tree: no leaves");
    return out;
  }
  const auto expected = expected_layer_sizes(n);
  const auto& sizes = t.layer_sizes();
  const auto& nodes = t.nodes();

  if (sizes.size() != expected.size()) {
    report("tree: depth ", sizes.size() - 1, " but ", n, " leaves need depth ", expected.size() - 1);
  }

  // Count what is actually stored per layer; this catches removed nodes even
  // when the recorded layer sizes were patched to match.
  std::vector<std::size_t> found(std::max(sizes.size(), expected.size()), 0);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (nodes[id].layer >= found.size()) {
      report("node ", id, ": layer ", nodes[id].layer, " beyond tree depth");
      return out;
    }
    ++found[nodes[id].layer];
  }
  bool shape_ok = out.empty();
  for (std::size_t k = 0; k < expected.size(); ++k) {
    for (std::size_t j = found[k]; j < expected[k]; ++j) {
      report("layer ", k, " position ", j, ": missing node (layer needs ", expected[k], ")");
      shape_ok = false;
    }
    for (std::size_t j = expected[k]; j < found[k]; ++j) {
      report("layer ", k, " position ", j, ": extra node (layer holds ", expected[k], ")");
      shape_ok = false;
    }
  }
  if (!shape_ok) {
    // Edge checks would only cascade from the shape error.
    return out;
  }

  std::vector<std::size_t> begin(expected.size(), 0);
  for (std::size_t k = 1; k < expected.size(); ++k) begin[k] = begin[k - 1] + expected[k - 1];

  std::vector<std::size_t> feeds(nodes.size(), 0);
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const TreeNode& node = nodes[id];
    const std::size_t k = node.layer;
    if (id < begin[k] || id >= begin[k] + expected[k] || node.position != id - begin[k]) {
      report("node ", id, ": out of layer order");
      continue;
    }
    if (k == 0) {
      if (node.left || node.right) report("leaf ", id, ": has parents");
      continue;
    }
    const std::size_t j = node.position;
    const NodeId want_left = static_cast<NodeId>(begin[k - 1] + 2 * j);
    const bool has_right_slot = 2 * j + 1 < expected[k - 1];
    if (!node.left) {
      report("cell ", id, " (layer ", k, "): no left parent");
    } else {
      if (*node.left != want_left) report("cell ", id, ": left parent ", *node.left, ", expected ", want_left);
      if (*node.left < nodes.size()) ++feeds[*node.left];
    }
    if (node.right) {
      if (!has_right_slot) {
        report("cell ", id, ": right parent present but layer ", k - 1, " has no node there");
      } else if (*node.right != want_left + 1) {
        report("cell ", id, ": right parent ", *node.right, ", expected ", want_left + 1);
      }
      if (*node.right < nodes.size()) ++feeds[*node.right];
    } else if (has_right_slot) {
      report("cell ", id, ": missing right parent");
    }
  }
  for (std::size_t id = 0; id + 1 < nodes.size(); ++id) {
    if (feeds[id] != 1) {
      report("node ", id, ": feeds ", feeds[id], " cells (expected exactly 1)");
    }
  }
  if (expected.back() != 1 || nodes.empty() || nodes.back().layer != expected.size() - 1) {
    report("tree: last layer is not a single root");
  } else if (feeds.back() != 0) {
    report("root: feeds another cell");
  }
  return out;
}

void dump_topology(const TreeTopology& t, std::ostream& os) {
  auto id_or_dash = [](const std::optional<NodeId>& id) {
    return id ? std::to_string(*id) : std::string("-");
  };
  for (std::size_t id = 0; id < t.node_count(); ++id) {
    const TreeNode& node = t.nodes()[id];
    os << id << " layer=" << node.layer << " pos=" << node.position
       << " left=" << id_or_dash(node.left) << " right=" << id_or_dash(node.right) << '\n';
  }
}

}  // namespace hgsort
