#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tklu/deployment.hpp"
#include "tklu/revocation.hpp"

namespace tklu {

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  std::size_t nodes = 12;
  std::size_t range_lo = 2;
  std::size_t range_hi = 20;
  unsigned key_bits = 30;  // q = smallest prime above 2^key_bits
  std::string curve = "test64";  // preset name or curve file path
  std::size_t group_size = 4;
  std::optional<double> radio_range;  // sweep and group-demo default to sqrt(2), others to 0.5
  std::uint64_t seed_topology = 1;
  std::uint64_t seed_protocol = 1;
  std::string latency = "mica2";
  OutputFormat format = OutputFormat::Csv;
  std::optional<NodeId> victim;

  /// Throws InvalidArgument on out-of-range values or unknown presets.
  void validate() const;
  /// Canonical key=value form, one pair per line, every field present.
  std::string to_kv() const;
  double radio_range_or(double fallback) const { return radio_range.value_or(fallback); }
  DeploymentParams deployment(std::size_t n, double default_range) const;
};

/// Applies key=value lines (# comments, blank lines allowed) on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
/// Sets one field by key name; throws InvalidArgument on unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

CurveParams resolve_curve(const std::string& name_or_path);

struct CommandResult {
  std::string output;
  bool ok = true;
};

struct SweepRow {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double pairwise_total_time = 0;
  double path_avg_time = 0;
  double group_total_time = 0;
  std::uint64_t pairwise_messages = 0;
  std::uint64_t pairwise_link_transmissions = 0;
  std::size_t path_pairs = 0;
  std::uint64_t path_messages = 0;
  std::uint64_t path_link_transmissions = 0;
  std::uint64_t group_messages = 0;
  std::uint64_t group_link_transmissions = 0;
  std::uint32_t group_rounds = 0;
};

SweepRow sweep_one(const ExperimentConfig& cfg, std::size_t n);
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

CommandResult cmd_sweep(const ExperimentConfig& cfg);
CommandResult cmd_group_demo(const ExperimentConfig& cfg);
CommandResult cmd_memory_report(const ExperimentConfig& cfg);
CommandResult cmd_revoke_demo(const ExperimentConfig& cfg);

/// Consecutive blocks of `group_size` nodes in order of x coordinate.
std::vector<std::vector<NodeId>> partition_groups(const Topology& topo, std::size_t group_size);

using StoreSnapshot = std::vector<std::map<StoreKey, StoredKey>>;
StoreSnapshot snapshot_stores(const Network& net);

/// Checks purity and non-disturbance after revoke(v). `affected` lists the
/// group ids that contained v. Returns one line per violation.
std::vector<std::string> audit_revocation(const StoreSnapshot& before, const Network& after, NodeId v,
                                          const std::vector<std::uint32_t>& affected);

}  // namespace tklu
