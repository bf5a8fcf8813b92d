#include <fstream>
#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "tklu/harness.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::string out;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "key=value config file");
  const std::pair<const char*, const char*> opts[] = {
      {"nodes", "node count (group-demo, memory-report, revoke-demo)"},
      {"range", "node counts to sweep: lo..hi, lo:hi or n"},
      {"key-bits", "q is the smallest prime above 2^bits"},
      {"curve", "curve preset (toy19, test64, secp256k1) or curve file"},
      {"group-size", "members per group in memory-report and revoke-demo"},
      {"radio-range", "radio range in the unit square, or auto"},
      {"seed-topology", "topology seed"},
      {"seed-protocol", "key pool and protocol randomness seed"},
      {"latency-preset", "zero, mica2 or radio"},
      {"format", "csv or json"},
      {"victim", "node to revoke in revoke-demo"},
  };
  for (const auto& [key, help] : opts) {
    sub->add_option_function<std::string>(
        std::string("--") + key, [&f, key = key](const std::string& v) { f.values[key] = v; }, help);
  }
  sub->add_option("--out", f.out, "write output here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LU key predistribution and group key simulator"};
  app.require_subcommand(1);
  Flags flags;
  struct Cmd {
    const char* name;
    const char* help;
    tklu::CommandResult (*run)(const tklu::ExperimentConfig&);
  };
  const Cmd cmds[] = {
      {"sweep", "time and message counts for n in --range", tklu::cmd_sweep},
      {"group-demo", "build one group over --nodes members and print the tree", tklu::cmd_group_demo},
      {"memory-report", "per-node key counts against k + ceil(log2 group size)", tklu::cmd_memory_report},
      {"revoke-demo", "establish keys, revoke --victim, audit the stores", tklu::cmd_revoke_demo},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : cmds) {
    subs.push_back(app.add_subcommand(c.name, c.help));
    add_common(subs.back(), flags);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    tklu::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = tklu::load_config(flags.config_path);
    for (const auto& [k, v] : flags.values) tklu::set_config_value(cfg, k, v);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto res = cmds[i].run(cfg);
      if (flags.out.empty()) {
        std::cout << res.output;
      } else {
        std::ofstream f(flags.out);
        if (!f) {
          std::cerr << "cannot write " << flags.out << '\n';
          return 2;
        }
        f << res.output;
      }
      return res.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
