#include <CLI11.hpp>

#include <iostream>

#include "wavetank/config.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/output.hpp"
#include "wavetank/runner.hpp"

using namespace wavetank;

int main(int argc, char** argv) {
  CLI::App app{"wavetank: chess billiards, corner exponents and internal-wave resolvents"};
  app.require_subcommand(1);

  std::string config_path, out_dir, domain_kind;
  std::vector<double> lambdas;
  int workers = 1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario file (.toml, or .json)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--domain", domain_kind, "Domain type with default parameters");
    sub->add_option("--lambda", lambdas, "Frequencies in (0, 1)");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run the tasks listed in the config");
  add_common(run_cmd);
  for (const std::string& t : task_names()) add_common(app.add_subcommand(t, "Run the " + t + " task"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ScenarioConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    nlohmann::json j = cfg.echo();
    if (!domain_kind.empty()) j["domain"] = {{"type", domain_kind}};
    if (!lambdas.empty()) j["lambda"] = lambdas;
    if (!out_dir.empty()) j["out"] = out_dir;
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub != "run") j["tasks"] = {sub};
    cfg = config_from_json(j);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  try {
    const RunManifest m = run(cfg, RunOptions{workers});
    for (const TaskRecord& t : m.tasks)
      std::cout << (t.ok ? "ok     " : "FAILED ") << t.name << (t.ok ? "" : ": " + t.error) << '\n';
    std::cout << "manifest: " << (cfg.out / "manifest.json").string() << '\n';
    return m.exit_code();
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
