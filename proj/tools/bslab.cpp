#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "bslab/config.hpp"
#include "bslab/error.hpp"
#include "bslab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Percolation, contact-process and random-walk probes on graph truncations and their local limits"};
  app.set_version_flag("--version", bslab::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 0;
  std::vector<std::string> overrides;
  bool list_keys = false;

  app.add_flag("--keys", list_keys, "list every config key with its default and exit");
  for (const char* name :
       {"generate", "bslimit", "theta", "pc", "pu", "tau", "clusters", "contact", "walk", "question"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_option("overrides", overrides, "extra key=value settings applied after the config file");
  }
  if (argc == 2 && std::string(argv[1]) == "--keys") {
    for (const auto& k : bslab::config_keys())
      std::printf("%-20s %-16s %s\n", k.name.c_str(), k.default_value.empty() ? "(empty)" : k.default_value.c_str(),
                  k.doc.c_str());
    return 0;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    bslab::ExperimentConfig cfg = config_path.empty() ? bslab::ExperimentConfig{}
                                                      : bslab::ExperimentConfig::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw bslab::Error(bslab::ErrorCode::config_invalid, "expected key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const std::string name = app.get_subcommands().front()->get_name();
    cfg.set("experiment", name);
    for (CLI::App* sub : app.get_subcommands()) {
      if (sub->count("--seed")) cfg.set("seed", std::to_string(seed));
      if (sub->count("--out")) cfg.set("out", out);
      if (sub->count("--threads")) cfg.set("threads", std::to_string(threads));
    }
    const bslab::RunResult r = bslab::run_experiment(cfg);
    for (const auto& f : r.files) std::printf("%s/%s  %s\n", r.out_dir.c_str(), f.name.c_str(), f.digest.c_str());
    std::printf("%s\n", r.manifest.c_str());
    return 0;
  } catch (const bslab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
