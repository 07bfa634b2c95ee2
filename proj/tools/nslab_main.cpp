// nslab: seeded experiment runner for the one-bit null-space learning
// library. Subcommands reproduce the headline experiments as CSV files
// under results/<command>/<tag>/.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nslab/experiment.hpp"

namespace {

std::string default_tag() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

nslab::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return nslab::ExperimentConfig{};
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  f >> j;
  return nslab::config_from_json(j);
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "results";
  std::string tag;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> eta;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory root");
  cmd->add_option("--tag", o.tag, "run tag (default: UTC timestamp)");
  cmd->add_option("--seed", o.seed, "campaign seed");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials");
  cmd->add_option("--eta", o.eta, "line-search accuracy");
  cmd->add_option("--jobs", o.jobs, "parallel trial workers");
}

nslab::ExperimentConfig resolve(const CommonOpts& o) {
  nslab::ExperimentConfig cfg = load_config(o.config_path);
  if (o.seed) cfg.sweep.seed = *o.seed;
  if (o.trials) cfg.sweep.trials = *o.trials;
  if (o.eta) {
    cfg.learning.eta = *o.eta;
    cfg.sweep.etas = {*o.eta};
  }
  if (o.jobs) cfg.sweep.jobs = *o.jobs;
  return cfg;
}

int run_csv_command(const std::string& name, const CommonOpts& opts,
                    nslab::CsvTable (*fn)(const nslab::ExperimentConfig&)) {
  const nslab::ExperimentConfig cfg = resolve(opts);
  const nslab::CsvTable table = fn(cfg);
  const std::string tag = opts.tag.empty() ? default_tag() : opts.tag;
  const auto dir =
      nslab::write_outputs(opts.out_dir, name, tag, table.str(), cfg);
  std::cout << (dir / "data.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-bit blind null-space learning experiment runner"};
  app.require_subcommand(1);

  CommonOpts conv_opts, dop_opts, quant_opts, bench_opts;
  CLI::App* conv = app.add_subcommand(
      "convergence", "ideal-feedback convergence vs analytic bounds");
  add_common(conv, conv_opts);
  CLI::App* dop = app.add_subcommand(
      "doppler_sweep", "interference reduction vs link Doppler spread");
  add_common(dop, dop_opts);
  std::string dop_target;
  dop->add_option("--target", dop_target, "swept link: ps or pp");
  CLI::App* quant = app.add_subcommand(
      "quantization_sweep", "interference reduction vs SINR quantization bits");
  add_common(quant, quant_opts);
  CLI::App* bench = app.add_subcommand(
      "unit_bench", "property-suite pass counts and TC budgets (JSON)");
  add_common(bench, bench_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed())
      return run_csv_command("convergence", conv_opts, nslab::cmd_convergence);
    if (dop->parsed()) {
      nslab::ExperimentConfig cfg = resolve(dop_opts);
      if (!dop_target.empty()) cfg.sweep.target = dop_target;
      const nslab::CsvTable table = nslab::cmd_doppler_sweep(cfg);
      const std::string tag =
          dop_opts.tag.empty() ? default_tag() : dop_opts.tag;
      const auto dir = nslab::write_outputs(dop_opts.out_dir, "doppler_sweep",
                                            tag, table.str(), cfg);
      std::cout << (dir / "data.csv").string() << "\n";
      return 0;
    }
    if (quant->parsed())
      return run_csv_command("quantization_sweep", quant_opts,
                             nslab::cmd_quantization_sweep);
    if (bench->parsed()) {
      const nslab::ExperimentConfig cfg = resolve(bench_opts);
      const nlohmann::json j = nslab::cmd_unit_bench(cfg);
      const std::string tag =
          bench_opts.tag.empty() ? default_tag() : bench_opts.tag;
      const auto dir = nslab::write_outputs(bench_opts.out_dir, "unit_bench",
                                            tag, j.dump(2) + "\n", cfg);
      // unit_bench emits JSON; keep the file name meaningful
      std::filesystem::rename(dir / "data.csv", dir / "summary.json");
      std::cout << (dir / "summary.json").string() << "\n";
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
