#include "tklu/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tklu {

namespace {

using nlohmann::ordered_json;

const double kFullMesh = std::sqrt(2.0);
constexpr double kFieldRange = 0.5;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used, 0);
    if (used != v.size() || v.empty() || v[0] == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, key + ": not an unsigned integer: '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, key + ": not a number: '" + v + "'");
  }
}

std::string member_list(const std::vector<MemberId>& ms) {
  std::string out;
  for (auto m : ms) {
    if (!out.empty()) out += ' ';
    out += "M" + std::to_string(m + 1);
  }
  return out;
}

std::string config_line(const ExperimentConfig& cfg) {
  std::string kv = cfg.to_kv();
  std::replace(kv.begin(), kv.end(), '\n', ';');
  if (!kv.empty() && kv.back() == ';') kv.pop_back();
  return "# config: " + kv + "\n";
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j = ordered_json::object();
  std::istringstream in(cfg.to_kv());
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

std::string verdict(bool ok) { return ok ? "OK" : "FAIL"; }

struct Mark {
  double time;
  std::uint64_t messages;
  std::uint64_t links;
};

Mark mark(Network& net) {
  return {net.scheduler().now(), net.link().messages(), net.scheduler().trace().link_transmissions};
}

std::vector<std::pair<NodeId, NodeId>> multi_hop_pairs(const Topology& topo) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < topo.size(); ++a) {
    const auto d = topo.hop_distances(a);
    for (NodeId b = a + 1; b < topo.size(); ++b) {
      if (d[b] >= 2) out.emplace_back(a, b);
    }
  }
  return out;
}

std::pair<NodeId, NodeId> most_distant(const Topology& topo) {
  std::pair<NodeId, NodeId> best{0, 1};
  std::pair<std::size_t, double> best_score{0, -1};
  for (NodeId a = 0; a < topo.size(); ++a) {
    const auto d = topo.hop_distances(a);
    for (NodeId b = a + 1; b < topo.size(); ++b) {
      const auto& pa = topo.positions()[a];
      const auto& pb = topo.positions()[b];
      const std::pair<std::size_t, double> score{d[b], std::hypot(pa.x - pb.x, pa.y - pb.y)};
      if (score > best_score) {
        best_score = score;
        best = {a, b};
      }
    }
  }
  return best;
}

}  // namespace

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
  if (nodes < 1 || nodes > 64) bad("nodes must be in [1, 64]");
  if (range_lo < 2 || range_hi > 64 || range_lo > range_hi) bad("range must satisfy 2 <= lo <= hi <= 64");
  if (key_bits < 2 || key_bits > 62) bad("key_bits must be in [2, 62]");
  if (group_size < 1) bad("group_size must be at least 1");
  if (radio_range && (!(*radio_range > 0) || *radio_range > kFullMesh)) bad("radio_range must be in (0, sqrt(2)]");
  if (victim && *victim >= nodes) bad("victim must be below nodes");
  LatencyModel::preset(latency);
  resolve_curve(curve);
}

std::string ExperimentConfig::to_kv() const {
  std::ostringstream o;
  o << "nodes=" << nodes << '\n'
    << "range=" << range_lo << ".." << range_hi << '\n'
    << "key_bits=" << key_bits << '\n'
    << "curve=" << curve << '\n'
    << "group_size=" << group_size << '\n'
    << "radio_range=" << (radio_range ? fixed6(*radio_range) : std::string("auto")) << '\n'
    << "seed_topology=" << seed_topology << '\n'
    << "seed_protocol=" << seed_protocol << '\n'
    << "latency=" << latency << '\n'
    << "format=" << (format == OutputFormat::Csv ? "csv" : "json") << '\n'
    << "victim=" << (victim ? std::to_string(*victim) : std::string("auto")) << '\n';
  return o.str();
}

DeploymentParams ExperimentConfig::deployment(std::size_t n, double default_range) const {
  DeploymentParams p;
  p.nodes = n;
  p.key_bound = std::uint64_t{1} << key_bits;
  p.curve = resolve_curve(curve);
  p.radio_range = radio_range_or(default_range);
  p.seed_topology = seed_topology;
  p.seed_protocol = seed_protocol;
  p.latency = LatencyModel::preset(latency);
  return p;
}

void set_config_value(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "nodes") {
    cfg.nodes = parse_u64(key, value);
  } else if (key == "range") {
    auto sep = value.find("..");
    std::size_t skip = 2;
    if (sep == std::string::npos) {
      sep = value.find(':');
      skip = 1;
    }
    if (sep == std::string::npos) {
      cfg.range_lo = cfg.range_hi = parse_u64(key, value);
    } else {
      cfg.range_lo = parse_u64(key, value.substr(0, sep));
      cfg.range_hi = parse_u64(key, value.substr(sep + skip));
    }
  } else if (key == "key_bits") {
    cfg.key_bits = static_cast<unsigned>(parse_u64(key, value));
  } else if (key == "curve") {
    cfg.curve = value;
  } else if (key == "group_size") {
    cfg.group_size = parse_u64(key, value);
  } else if (key == "radio_range") {
    if (value == "auto") {
      cfg.radio_range.reset();
    } else {
      cfg.radio_range = parse_double(key, value);
    }
  } else if (key == "seed_topology") {
    cfg.seed_topology = parse_u64(key, value);
  } else if (key == "seed_protocol") {
    cfg.seed_protocol = parse_u64(key, value);
  } else if (key == "latency" || key == "latency_preset") {
    cfg.latency = value;
  } else if (key == "format") {
    if (value == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (value == "json") {
      cfg.format = OutputFormat::Json;
    } else {
      throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
    }
  } else if (key == "victim") {
    if (value == "auto") {
      cfg.victim.reset();
    } else {
      cfg.victim = static_cast<NodeId>(parse_u64(key, value));
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + raw_key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::string norm = text;
  std::replace(norm.begin(), norm.end(), ';', '\n');
  std::istringstream in(norm);
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected key=value: '" + line + "'");
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

CurveParams resolve_curve(const std::string& name_or_path) {
  const auto names = curve_preset_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return curve_preset(name_or_path);
  std::ifstream probe(name_or_path);
  if (!probe) throw Error(ErrorCode::InvalidArgument, "unknown curve '" + name_or_path + "'");
  return load_curve_config(name_or_path);
}

std::vector<std::vector<NodeId>> partition_groups(const Topology& topo, std::size_t group_size) {
  if (group_size == 0) throw Error(ErrorCode::InvalidArgument, "group size must be positive");
  std::vector<NodeId> order(topo.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return topo.positions()[a].x < topo.positions()[b].x; });
  std::vector<std::vector<NodeId>> out;
  for (std::size_t i = 0; i < order.size(); i += group_size) {
    std::vector<NodeId> g(order.begin() + static_cast<std::ptrdiff_t>(i),
                          order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + group_size)));
    std::sort(g.begin(), g.end());
    out.push_back(std::move(g));
  }
  return out;
}

SweepRow sweep_one(const ExperimentConfig& cfg, std::size_t n) {
  auto net = Network::create(cfg.deployment(n, kFullMesh));
  SweepRow row;
  row.nodes = n;
  row.edges = net->topology().edge_count();

  auto m0 = mark(*net);
  net->establish_all_pairwise();
  auto m1 = mark(*net);
  row.pairwise_total_time = m1.time - m0.time;
  row.pairwise_messages = m1.messages - m0.messages;
  row.pairwise_link_transmissions = m1.links - m0.links;

  auto pairs = multi_hop_pairs(net->topology());
  if (pairs.empty()) {
    pairs.push_back(most_distant(net->topology()));
  } else if (pairs.size() > 10) {
    Rng pick(cfg.seed_protocol);
    std::shuffle(pairs.begin(), pairs.end(), pick);
    pairs.resize(10);
    std::sort(pairs.begin(), pairs.end());
  }
  for (auto [a, b] : pairs) net->establish_path(a, b);
  auto m2 = mark(*net);
  row.path_pairs = pairs.size();
  row.path_avg_time = (m2.time - m1.time) / static_cast<double>(pairs.size());
  row.path_messages = m2.messages - m1.messages;
  row.path_link_transmissions = m2.links - m1.links;

  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), NodeId{0});
  const auto gid = net->establish_group(all);
  auto m3 = mark(*net);
  row.group_total_time = m3.time - m2.time;
  row.group_messages = m3.messages - m2.messages;
  row.group_link_transmissions = m3.links - m2.links;
  row.group_rounds = net->groups().at(gid).height();
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;
  for (std::size_t n = cfg.range_lo; n <= cfg.range_hi; ++n) rows.push_back(sweep_one(cfg, n));
  return rows;
}

CommandResult cmd_sweep(const ExperimentConfig& cfg) {
  const auto rows = run_sweep(cfg);
  bool ok = true;
  std::vector<std::string> notes;
  // trend is only meaningful when every node hears every other
  const bool full_mesh = cfg.radio_range_or(kFullMesh) >= kFullMesh;
  if (!full_mesh) notes.push_back("pairwise trend not checked below full radio range");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.pairwise_messages != 3 * r.edges) {
      ok = false;
      notes.push_back("pairwise message count off at n=" + std::to_string(r.nodes));
    }
    if (r.path_messages != 3 * r.path_pairs) {
      ok = false;
      notes.push_back("path message count off at n=" + std::to_string(r.nodes));
    }
    if (r.group_rounds != ceil_log2(r.nodes)) {
      ok = false;
      notes.push_back("group rounds off at n=" + std::to_string(r.nodes));
    }
    if (full_mesh && r.edges != r.nodes * (r.nodes - 1) / 2) {
      ok = false;
      notes.push_back("full-range field is not a full mesh at n=" + std::to_string(r.nodes));
    }
    if (full_mesh && i > 0 && r.pairwise_total_time < rows[i - 1].pairwise_total_time) {
      ok = false;
      notes.push_back("pairwise time decreased at n=" + std::to_string(r.nodes));
    }
  }

  std::ostringstream o;
  if (cfg.format == OutputFormat::Csv) {
    o << config_line(cfg);
    o << "nodes,edges,pairwise_total_time,path_avg_time,group_total_time,pairwise_messages,pairwise_link_transmissions,"
         "path_pairs,path_messages,path_link_transmissions,group_messages,group_link_transmissions,group_rounds,"
         "seed_topology,seed_protocol,latency,curve,key_bits,radio_range\n";
    const std::string tail = "," + std::to_string(cfg.seed_topology) + "," + std::to_string(cfg.seed_protocol) + "," +
                             cfg.latency + "," + cfg.curve + "," + std::to_string(cfg.key_bits) + "," +
                             fixed6(cfg.radio_range_or(kFullMesh));
    for (const auto& r : rows) {
      o << r.nodes << ',' << r.edges << ',' << fixed6(r.pairwise_total_time) << ',' << fixed6(r.path_avg_time) << ','
        << fixed6(r.group_total_time) << ',' << r.pairwise_messages << ',' << r.pairwise_link_transmissions << ','
        << r.path_pairs << ',' << r.path_messages << ',' << r.path_link_transmissions << ',' << r.group_messages << ','
        << r.group_link_transmissions << ',' << r.group_rounds << tail << '\n';
    }
    for (const auto& n : notes) o << "# " << n << '\n';
    o << "# verdict: " << verdict(ok) << '\n';
  } else {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"nodes", r.nodes},
                           {"edges", r.edges},
                           {"pairwise_total_time", fixed6(r.pairwise_total_time)},
                           {"path_avg_time", fixed6(r.path_avg_time)},
                           {"group_total_time", fixed6(r.group_total_time)},
                           {"pairwise_messages", r.pairwise_messages},
                           {"pairwise_link_transmissions", r.pairwise_link_transmissions},
                           {"path_pairs", r.path_pairs},
                           {"path_messages", r.path_messages},
                           {"path_link_transmissions", r.path_link_transmissions},
                           {"group_messages", r.group_messages},
                           {"group_link_transmissions", r.group_link_transmissions},
                           {"group_rounds", r.group_rounds}});
    }
    j["notes"] = notes;
    j["verdict"] = verdict(ok);
    o << j.dump(2) << '\n';
  }
  return {o.str(), ok};
}

CommandResult cmd_group_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.nodes;
  auto net = Network::create(cfg.deployment(n, kFullMesh));
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), NodeId{0});
  const auto gid = net->establish_group(all);
  const KeyTree& tree = net->groups().at(gid);

  bool agree = true;
  const auto key = tree.group_key();
  const auto pub = tree.public_view();
  for (auto m : tree.members()) {
    if (member_compute_key(tree.curve(), pub, m, tree.leaf_secret(m)) != key) agree = false;
  }
  const bool rounds_ok = tree.height() == ceil_log2(n);

  std::optional<bool> shape_ok;
  if (n == 6) {
    const std::vector<std::vector<std::pair<std::string, std::vector<MemberId>>>> expect = {
        {{"T11", {0, 1}}, {"T12", {2, 3}}, {"T13", {4, 5}}},
        {{"T21", {0, 1, 2, 3}}, {"T22", {4, 5}}},
        {{"T31", {0, 1, 2, 3, 4, 5}}}};
    bool same = tree.rounds().size() == expect.size();
    for (std::size_t r = 0; same && r < expect.size(); ++r) {
      same = tree.rounds()[r].size() == expect[r].size();
      for (std::size_t g = 0; same && g < expect[r].size(); ++g) {
        same = tree.rounds()[r][g].label.str() == expect[r][g].first && tree.rounds()[r][g].members == expect[r][g].second;
      }
    }
    shape_ok = same;
  }
  const bool ok = agree && rounds_ok && shape_ok.value_or(true);

  std::ostringstream o;
  if (cfg.format == OutputFormat::Csv) {
    o << config_line(cfg);
    o << "round,label,members\n";
    for (std::size_t r = 0; r < tree.rounds().size(); ++r) {
      for (const auto& g : tree.rounds()[r]) o << r + 1 << ',' << g.label.str() << ',' << member_list(g.members) << '\n';
    }
    o << "# group_key: " << to_hex(key.bytes) << '\n';
    o << "# rounds: " << tree.height() << " (" << verdict(rounds_ok) << ")\n";
    o << "# key_agreement: " << verdict(agree) << '\n';
    if (shape_ok) o << "# tree_shape: " << verdict(*shape_ok) << '\n';
    o << "# verdict: " << verdict(ok) << '\n';
  } else {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["rounds"] = ordered_json::array();
    for (const auto& round : tree.rounds()) {
      ordered_json jr = ordered_json::array();
      for (const auto& g : round) jr.push_back({{"label", g.label.str()}, {"members", member_list(g.members)}});
      j["rounds"].push_back(jr);
    }
    j["group_key"] = to_hex(key.bytes);
    j["height"] = tree.height();
    j["key_agreement"] = verdict(agree);
    if (shape_ok) j["tree_shape"] = verdict(*shape_ok);
    j["verdict"] = verdict(ok);
    o << j.dump(2) << '\n';
  }
  return {o.str(), ok};
}

CommandResult cmd_memory_report(const ExperimentConfig& cfg) {
  cfg.validate();
  auto net = Network::create(cfg.deployment(cfg.nodes, kFieldRange));
  net->establish_all_pairwise();
  for (const auto& g : partition_groups(net->topology(), cfg.group_size)) net->establish_group(g);
  const auto rows = memory_report(*net);

  bool ok = true;
  for (const auto& r : rows) ok = ok && r.actual() == r.prediction;
  const auto headline = predicted_keys(40, 80);
  ok = ok && headline == 47;

  auto status = [](const MemoryRow& r) {
    return r.actual() == r.prediction ? "OK" : (r.exceeds() ? "EXCEEDS" : "BELOW");
  };
  std::ostringstream o;
  if (cfg.format == OutputFormat::Csv) {
    o << config_line(cfg);
    o << "kind,node,degree,pairwise,group,path,group_size,prediction,actual,status\n";
    for (const auto& r : rows) {
      o << "node," << r.node << ',' << r.degree << ',' << r.pairwise << ',' << r.group << ',' << r.path << ','
        << r.group_size << ',' << r.prediction << ',' << r.actual() << ',' << status(r) << '\n';
    }
    o << "formula,,40,,,,80," << headline << ",,\n";
    o << "# verdict: " << verdict(ok) << '\n';
  } else {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"node", r.node},
                           {"degree", r.degree},
                           {"pairwise", r.pairwise},
                           {"group", r.group},
                           {"path", r.path},
                           {"group_size", r.group_size},
                           {"prediction", r.prediction},
                           {"actual", r.actual()},
                           {"status", status(r)}});
    }
    j["formula"] = {{"k", 40}, {"group_size", 80}, {"prediction", headline}};
    j["verdict"] = verdict(ok);
    o << j.dump(2) << '\n';
  }
  return {o.str(), ok};
}

StoreSnapshot snapshot_stores(const Network& net) {
  StoreSnapshot s;
  for (const auto& st : net.stores()) s.push_back(st.entries());
  return s;
}

std::vector<std::string> audit_revocation(const StoreSnapshot& before, const Network& after, NodeId v,
                                          const std::vector<std::uint32_t>& affected) {
  std::vector<std::string> bad;
  const std::set<std::uint32_t> hit(affected.begin(), affected.end());
  auto refs = [v](const StoredKey& k) { return std::find(k.peers.begin(), k.peers.end(), v) != k.peers.end(); };
  auto where = [](NodeId u, const StoreKey& k) {
    return "node " + std::to_string(u) + " " + to_string(k.kind) + " " + std::to_string(k.subject) + "/" +
           std::to_string(k.level);
  };
  for (NodeId u = 0; u < after.size(); ++u) {
    const auto& now = after.store(u).entries();
    if (u == v) {
      if (!now.empty()) bad.push_back("revoked node still holds keys");
      continue;
    }
    for (const auto& [k, val] : now) {
      if (refs(val)) bad.push_back(where(u, k) + " still references the revoked node");
    }
    for (const auto& [k, val] : before[u]) {
      const bool grouped = k.kind == KeyKind::Group && hit.count(k.subject);
      if (grouped || refs(val)) continue;
      auto it = now.find(k);
      if (it == now.end()) {
        bad.push_back(where(u, k) + " vanished");
      } else if (it->second != val) {
        bad.push_back(where(u, k) + " changed");
      }
    }
    for (const auto& [k, val] : now) {
      const bool grouped = k.kind == KeyKind::Group && hit.count(k.subject);
      if (!grouped && !before[u].count(k)) bad.push_back(where(u, k) + " appeared");
    }
    for (auto gid : hit) {
      std::optional<StoredKey> old_top;
      std::uint32_t old_level = 0;
      for (const auto& [k, val] : before[u]) {
        if (k.kind == KeyKind::Group && k.subject == gid && k.level >= old_level) {
          old_level = k.level;
          old_top = val;
        }
      }
      if (!old_top) continue;
      std::optional<StoredKey> new_top;
      std::uint32_t new_level = 0;
      for (const auto& [k, val] : now) {
        if (k.kind == KeyKind::Group && k.subject == gid && k.level >= new_level) {
          new_level = k.level;
          new_top = val;
        }
      }
      if (!new_top) continue;  // the group shrank to this node alone
      if (new_top->bytes == old_top->bytes) bad.push_back(where(u, {KeyKind::Group, gid, new_level}) + " key unchanged");
      if (new_top->epoch <= old_top->epoch) bad.push_back(where(u, {KeyKind::Group, gid, new_level}) + " epoch unchanged");
    }
  }
  return bad;
}

CommandResult cmd_revoke_demo(const ExperimentConfig& cfg) {
  cfg.validate();
  auto net = Network::create(cfg.deployment(cfg.nodes, kFieldRange));
  const NodeId v = cfg.victim.value_or(0);
  net->establish_all_pairwise();
  for (const auto& g : partition_groups(net->topology(), cfg.group_size)) net->establish_group(g);
  {
    const auto dv = net->topology().hop_distances(v);
    std::size_t with_v = 0;
    for (NodeId u = 0; u < net->size() && with_v < 2; ++u) {
      if (dv[u] >= 2 && dv[u] != SIZE_MAX) {
        net->establish_path(u, v);
        ++with_v;
      }
    }
    std::size_t others = 0;
    for (auto [a, b] : multi_hop_pairs(net->topology())) {
      if (others == 4) break;
      if (a == v || b == v) continue;
      net->establish_path(a, b);
      ++others;
    }
  }

  const auto before = snapshot_stores(*net);
  std::size_t expect_pw = 0, expect_path = 0;
  for (NodeId u = 0; u < net->size(); ++u) {
    if (u == v) continue;
    for (const auto& [k, val] : before[u]) {
      if (std::find(val.peers.begin(), val.peers.end(), v) == val.peers.end()) continue;
      if (k.kind == KeyKind::Pairwise) ++expect_pw;
      if (k.kind == KeyKind::Path) ++expect_path;
    }
  }
  std::vector<std::uint32_t> affected;
  std::size_t expect_rekeyed = 0;
  for (const auto& [id, tree] : net->groups()) {
    if (tree.contains(v)) {
      affected.push_back(id);
      if (tree.size() > 1) ++expect_rekeyed;
    }
  }

  const auto rep = revoke(*net, v);
  const auto violations = audit_revocation(before, *net, v, affected);
  const bool counts_ok = rep.pairwise_removed == expect_pw && rep.path_removed == expect_path &&
                         rep.groups_rekeyed.size() == expect_rekeyed && rep.audit_removed == 0;
  const bool reach_ok = rep.broadcast_reached == net->size() - 1;
  const bool ok = violations.empty() && counts_ok && reach_ok;

  std::string epochs;
  for (auto e : rep.groups_rekeyed) epochs += (epochs.empty() ? "" : " ") + std::to_string(e);

  std::ostringstream o;
  if (cfg.format == OutputFormat::Csv) {
    o << config_line(cfg);
    o << "field,value\n";
    o << "revoked," << rep.revoked << '\n'
      << "degree," << net->topology().degree(v) << '\n'
      << "pairwise_removed," << rep.pairwise_removed << '\n'
      << "path_removed," << rep.path_removed << '\n'
      << "groups_rekeyed," << rep.groups_rekeyed.size() << '\n'
      << "rekey_epochs," << epochs << '\n'
      << "groups_dissolved," << rep.groups_dissolved << '\n'
      << "broadcast_reached," << rep.broadcast_reached << '\n'
      << "audit_removed," << rep.audit_removed << '\n'
      << "own_entries_cleared," << rep.own_entries_cleared << '\n'
      << "report_counts," << verdict(counts_ok) << '\n'
      << "broadcast_coverage," << verdict(reach_ok) << '\n'
      << "purity_audit," << verdict(violations.empty()) << '\n';
    for (const auto& s : violations) o << "# " << s << '\n';
    o << "# verdict: " << verdict(ok) << '\n';
  } else {
    ordered_json j;
    j["config"] = config_json(cfg);
    j["report"] = {{"revoked", rep.revoked},
                   {"degree", net->topology().degree(v)},
                   {"pairwise_removed", rep.pairwise_removed},
                   {"path_removed", rep.path_removed},
                   {"groups_rekeyed", rep.groups_rekeyed},
                   {"groups_dissolved", rep.groups_dissolved},
                   {"broadcast_reached", rep.broadcast_reached},
                   {"audit_removed", rep.audit_removed},
                   {"own_entries_cleared", rep.own_entries_cleared}};
    j["report_counts"] = verdict(counts_ok);
    j["broadcast_coverage"] = verdict(reach_ok);
    j["purity_audit"] = verdict(violations.empty());
    j["violations"] = violations;
    j["verdict"] = verdict(ok);
    o << j.dump(2) << '\n';
  }
  return {o.str(), ok};
}

}  // namespace tklu
