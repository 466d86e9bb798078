#include "coloc/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace coloc {

namespace {

constexpr double kKmhToMs = 1.0 / 3.6;

std::string node_label(NodeId i) { return "node " + std::to_string(i); }

Vec random_unit(int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  do {
    for (int d = 0; d < dim; ++d) v[d] = gauss(rng);
  } while (v.norm() < 1e-12);
  return v.normalized();
}

}  // namespace

std::vector<NodeId> Network::anchors() const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < size(); ++i) {
    if (is_anchor(i)) out.push_back(i);
  }
  return out;
}

int Network::anchor_count() const {
  return static_cast<int>(std::count(anchor_flags.begin(), anchor_flags.end(), char{1}));
}

std::size_t Network::edge_count() const {
  std::size_t total = 0;
  for (const auto& nb : neighbors) total += nb.size();
  return total / 2;
}

int Network::max_degree() const {
  std::size_t best = 0;
  for (const auto& nb : neighbors) best = std::max(best, nb.size());
  return static_cast<int>(best);
}

int Network::slot_of(NodeId i, NodeId j) const {
  const auto& nb = neighbors[i];
  auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return -1;
  return static_cast<int>(it - nb.begin());
}

double Network::range(NodeId i, NodeId j) const {
  const int k = slot_of(i, j);
  if (k < 0) {
    throw NetworkError(node_label(j) + " is not a neighbor of " + node_label(i));
  }
  return ranges[i][k];
}

void Network::validate() const {
  const int n = size();
  if (dim != 2 && dim != 3) throw NetworkError("dimension must be 2 or 3");
  if (static_cast<int>(anchor_flags.size()) != n || static_cast<int>(neighbors.size()) != n ||
      static_cast<int>(ranges.size()) != n) {
    throw NetworkError("per-node arrays disagree in length");
  }
  for (NodeId i = 0; i < n; ++i) {
    if (positions[i].size() != dim) {
      throw NetworkError(node_label(i) + " has wrong coordinate count");
    }
    const auto& nb = neighbors[i];
    if (nb.empty()) throw NetworkError(node_label(i) + " is isolated");
    if (ranges[i].size() != nb.size()) {
      throw NetworkError(node_label(i) + " has a ranging count mismatch");
    }
    if (!std::is_sorted(nb.begin(), nb.end()) ||
        std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw NetworkError(node_label(i) + " has unsorted or duplicate neighbors");
    }
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId j = nb[k];
      if (j < 0 || j >= n || j == i) {
        throw NetworkError(node_label(i) + " has invalid neighbor " + std::to_string(j));
      }
      const int back = slot_of(j, i);
      if (back < 0) {
        throw NetworkError("asymmetric adjacency between " + node_label(i) + " and " +
                           node_label(j));
      }
      if (ranges[j][back] != ranges[i][k]) {
        throw NetworkError("asymmetric ranging between " + node_label(i) + " and " +
                           node_label(j));
      }
      if (!(ranges[i][k] >= 0.0) || !std::isfinite(ranges[i][k])) {
        throw NetworkError("invalid ranging between " + node_label(i) + " and " + node_label(j));
      }
    }
  }
}

bool operator==(const Network& a, const Network& b) {
  if (a.dim != b.dim || a.area_side != b.area_side || a.size() != b.size()) return false;
  for (NodeId i = 0; i < a.size(); ++i) {
    if (a.positions[i] != b.positions[i]) return false;
  }
  return a.anchor_flags == b.anchor_flags && a.neighbors == b.neighbors && a.ranges == b.ranges;
}

void ScenarioConfig::validate() const {
  if (dim != 2 && dim != 3) throw NetworkError("dim must be 2 or 3");
  if (node_count < 2) throw NetworkError("node_count must be at least 2");
  if (anchor_count < 0 || anchor_count > node_count) {
    throw NetworkError("anchor_count must lie in [0, node_count]");
  }
  if (!(area_side > 0.0)) throw NetworkError("area side must be positive");
  if (!(radius > 0.0)) throw NetworkError("radius must be positive");
  if (!(sigma >= 0.0)) throw NetworkError("sigma must be non-negative");
  if (min_rangings < 0) throw NetworkError("min_rangings must be non-negative");
}

void MobilityConfig::validate() const {
  if (!(area_side > 0.0)) throw NetworkError("mobility area side must be positive");
  if (!(step_period_s > 0.0)) throw NetworkError("step period must be positive");
  if (mean_speed_kmh < 0.0 || speed_std_kmh < 0.0 || mean_speed_kmh > max_speed_kmh) {
    throw NetworkError("speeds must satisfy 0 <= mean <= max and std >= 0");
  }
  if (heading_change_prob < 0.0 || heading_change_prob > 1.0) {
    throw NetworkError("heading change probability must lie in [0, 1]");
  }
}

Network build_network(std::vector<Position> positions, std::vector<char> anchor_flags,
                      const ScenarioConfig& links, Rng& rng) {
  Network net;
  net.dim = links.dim;
  net.area_side = links.area_side;
  net.positions = std::move(positions);
  net.anchor_flags = std::move(anchor_flags);
  const int n = net.size();
  net.neighbors.assign(n, {});

  const double r_plain = links.radius;
  const double r_anchor = links.effective_anchor_radius();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double d = (net.positions[i] - net.positions[j]).norm();
      const double limit = (net.is_anchor(i) || net.is_anchor(j)) ? r_anchor : r_plain;
      if (d <= limit) {
        net.neighbors[i].push_back(j);
        net.neighbors[j].push_back(i);
      }
    }
  }

  if (links.min_rangings > 0) {
    const int want = std::min(links.min_rangings, n - 1);
    std::vector<NodeId> order(n);
    for (NodeId i = 0; i < n; ++i) {
      if (static_cast<int>(net.neighbors[i].size()) >= want) continue;
      ++net.extended_nodes;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        const double da = (net.positions[a] - net.positions[i]).squaredNorm();
        const double db = (net.positions[b] - net.positions[i]).squaredNorm();
        return da != db ? da < db : a < b;
      });
      for (NodeId j : order) {
        if (static_cast<int>(net.neighbors[i].size()) >= want) break;
        if (j == i) continue;
        auto& nb = net.neighbors[i];
        if (std::find(nb.begin(), nb.end(), j) != nb.end()) continue;
        nb.push_back(j);
        net.neighbors[j].push_back(i);
      }
    }
  }

  for (auto& nb : net.neighbors) std::sort(nb.begin(), nb.end());
  for (NodeId i = 0; i < n; ++i) {
    if (net.neighbors[i].empty()) {
      throw NetworkError(node_label(i) + " is isolated (no node within link radius)");
    }
  }

  net.ranges.assign(n, {});
  for (NodeId i = 0; i < n; ++i) net.ranges[i].assign(net.neighbors[i].size(), 0.0);
  return redraw_rangings(net, links.sigma, rng);
}

Network generate_network(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> uniform(0.0, cfg.area_side);
  std::vector<Position> positions(cfg.node_count, Position(cfg.dim));
  for (auto& p : positions) {
    for (int d = 0; d < cfg.dim; ++d) p[d] = uniform(rng);
  }
  std::vector<char> flags(cfg.node_count, 0);
  std::fill_n(flags.begin(), cfg.anchor_count, char{1});
  return build_network(std::move(positions), std::move(flags), cfg, rng);
}

Network redraw_rangings(const Network& net, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw NetworkError("sigma must be non-negative");
  Network out = net;
  std::normal_distribution<double> noise(0.0, 1.0);
  const int n = out.size();
  for (NodeId i = 0; i < n; ++i) {
    const auto& nb = out.neighbors[i];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const NodeId j = nb[k];
      if (j < i) continue;
      const double d = (out.positions[i] - out.positions[j]).norm();
      const double w = sigma > 0.0 ? sigma * noise(rng) : 0.0;
      const double r = std::max(0.0, d + w);
      out.ranges[i][k] = r;
      out.ranges[j][out.slot_of(j, i)] = r;
    }
  }
  return out;
}

MobilityState init_mobility(const Network& net, Rng& rng) {
  MobilityState state;
  state.headings.reserve(net.size());
  for (NodeId i = 0; i < net.size(); ++i) state.headings.push_back(random_unit(net.dim, rng));
  return state;
}

Network mobility_step(const Network& net, const ScenarioConfig& links, const MobilityConfig& cfg,
                      MobilityState& state, Rng& rng) {
  cfg.validate();
  if (static_cast<int>(state.headings.size()) != net.size()) state = init_mobility(net, rng);

  std::normal_distribution<double> speed_draw(cfg.mean_speed_kmh, cfg.speed_std_kmh);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double side = cfg.area_side;

  std::vector<Position> moved = net.positions;
  for (NodeId i = 0; i < net.size(); ++i) {
    if (net.is_anchor(i) && !cfg.anchors_move) continue;
    if (coin(rng) < cfg.heading_change_prob) state.headings[i] = random_unit(net.dim, rng);
    const double kmh =
        cfg.speed_std_kmh > 0.0 ? speed_draw(rng) : cfg.mean_speed_kmh;
    const double speed = std::clamp(kmh, 0.0, cfg.max_speed_kmh) * kKmhToMs;
    Position& p = moved[i];
    Vec& heading = state.headings[i];
    p += heading * (speed * cfg.step_period_s);
    for (int d = 0; d < net.dim; ++d) {
      // Mirror back into [0, side]; repeat for steps longer than the side.
      while (p[d] < 0.0 || p[d] > side) {
        if (p[d] < 0.0) p[d] = -p[d];
        if (p[d] > side) p[d] = 2.0 * side - p[d];
        heading[d] = -heading[d];
      }
    }
  }

  ScenarioConfig rebuilt = links;
  rebuilt.dim = net.dim;
  rebuilt.area_side = side;
  return build_network(std::move(moved), net.anchor_flags, rebuilt, rng);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw NetworkError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

Network read_network(std::istream& in) {
  Network net;
  bool have_header = false;
  bool have_area = false;
  int declared_anchors = 0;
  std::vector<char> seen_node;
  std::string raw;
  int line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream line(raw);
    std::string key;
    if (!(line >> key) || key[0] == '#') continue;

    auto need_header = [&] {
      if (!have_header) parse_fail(line_no, "'" + key + "' before 'dim' header");
    };
    auto node_id = [&](const char* what) {
      long long id = 0;
      if (!(line >> id)) parse_fail(line_no, std::string("expected ") + what);
      if (id < 0 || id >= net.size()) {
        parse_fail(line_no, std::string(what) + " " + std::to_string(id) + " out of range");
      }
      return static_cast<NodeId>(id);
    };

    if (key == "dim") {
      if (have_header) parse_fail(line_no, "duplicate 'dim' header");
      int n = 0;
      long long count = 0;
      if (!(line >> n >> count >> declared_anchors)) parse_fail(line_no, "malformed header");
      if (n != 2 && n != 3) parse_fail(line_no, "dimension must be 2 or 3");
      if (count < 1 || declared_anchors < 0 || declared_anchors > count) {
        parse_fail(line_no, "invalid node/anchor counts");
      }
      net.dim = n;
      net.positions.assign(count, Position::Zero(n));
      net.anchor_flags.assign(count, 0);
      net.neighbors.assign(count, {});
      net.ranges.assign(count, {});
      seen_node.assign(count, 0);
      have_header = true;
    } else if (key == "area") {
      need_header();
      if (!(line >> net.area_side) || !(net.area_side > 0.0)) parse_fail(line_no, "bad area");
      have_area = true;
    } else if (key == "node") {
      need_header();
      const NodeId id = node_id("node id");
      if (seen_node[id]) parse_fail(line_no, "duplicate node " + std::to_string(id));
      for (int d = 0; d < net.dim; ++d) {
        if (!(line >> net.positions[id][d])) parse_fail(line_no, "missing coordinate");
      }
      seen_node[id] = 1;
    } else if (key == "anchor") {
      need_header();
      const NodeId id = node_id("anchor id");
      if (net.anchor_flags[id]) parse_fail(line_no, "duplicate anchor " + std::to_string(id));
      net.anchor_flags[id] = 1;
    } else if (key == "edge") {
      need_header();
      const NodeId i = node_id("edge endpoint");
      const NodeId j = node_id("edge endpoint");
      double r = 0.0;
      if (!(line >> r)) parse_fail(line_no, "missing ranging");
      if (i == j) parse_fail(line_no, "self edge");
      if (!(r >= 0.0) || !std::isfinite(r)) parse_fail(line_no, "ranging must be finite and >= 0");
      auto& nb = net.neighbors[i];
      auto found = std::find(nb.begin(), nb.end(), j);
      if (found != nb.end()) {
        // A repeated pair is accepted only as an identical restatement.
        if (net.ranges[i][found - nb.begin()] != r) {
          parse_fail(line_no, "asymmetric ranging for pair " + std::to_string(i) + "-" +
                                  std::to_string(j));
        }
        continue;
      }
      nb.push_back(j);
      net.ranges[i].push_back(r);
      net.neighbors[j].push_back(i);
      net.ranges[j].push_back(r);
    } else {
      parse_fail(line_no, "unknown record '" + key + "'");
    }
    std::string extra;
    if (line >> extra) parse_fail(line_no, "trailing token '" + extra + "'");
  }

  if (!have_header) throw NetworkError("missing 'dim' header");
  for (NodeId i = 0; i < net.size(); ++i) {
    if (!seen_node[i]) throw NetworkError("node " + std::to_string(i) + " has no coordinates");
  }
  if (net.anchor_count() != declared_anchors) {
    throw NetworkError("header declares " + std::to_string(declared_anchors) + " anchors, found " +
                       std::to_string(net.anchor_count()));
  }
  for (NodeId i = 0; i < net.size(); ++i) {
    std::vector<std::size_t> idx(net.neighbors[i].size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return net.neighbors[i][a] < net.neighbors[i][b]; });
    std::vector<NodeId> nb;
    std::vector<double> rg;
    for (auto k : idx) {
      nb.push_back(net.neighbors[i][k]);
      rg.push_back(net.ranges[i][k]);
    }
    net.neighbors[i] = std::move(nb);
    net.ranges[i] = std::move(rg);
  }
  if (!have_area) {
    double extent = 0.0;
    for (const auto& p : net.positions) extent = std::max(extent, p.cwiseAbs().maxCoeff());
    net.area_side = extent > 0.0 ? extent : 1.0;
  }
  net.validate();
  return net;
}

void write_network(std::ostream& out, const Network& net) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "dim " << net.dim << ' ' << net.size() << ' ' << net.anchor_count() << '\n';
  out << "area " << net.area_side << '\n';
  for (NodeId i = 0; i < net.size(); ++i) {
    out << "node " << i;
    for (int d = 0; d < net.dim; ++d) out << ' ' << net.positions[i][d];
    out << '\n';
  }
  for (NodeId i : net.anchors()) out << "anchor " << i << '\n';
  for (NodeId i = 0; i < net.size(); ++i) {
    for (std::size_t k = 0; k < net.neighbors[i].size(); ++k) {
      const NodeId j = net.neighbors[i][k];
      if (j > i) out << "edge " << i << ' ' << j << ' ' << net.ranges[i][k] << '\n';
    }
  }
  out.precision(old_precision);
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NetworkError("cannot open " + path.string());
  try {
    return read_network(in);
  } catch (const NetworkError& e) {
    throw NetworkError(path.string() + ": " + e.what());
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw NetworkError("cannot write " + path.string());
    write_network(out, net);
    if (!out) throw NetworkError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace coloc
