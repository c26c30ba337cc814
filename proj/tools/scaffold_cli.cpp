// Command-line entry point. Exit codes: 0 success, 1 domain failure,
// 2 usage or IO failure.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "scaffold/analysis.hpp"
#include "scaffold/service.hpp"

namespace {

using namespace scaffold;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kUsage = 2;

int cmd_validate(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return kUsage;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  const auto check = check_recipe_document(ss.str());
  for (const auto& f : check.report.errors) std::cout << "error   " << f.code << " " << f.path << ": " << f.message << "\n";
  for (const auto& f : check.report.warnings)
    std::cout << "warning " << f.code << " " << f.path << ": " << f.message << "\n";
  if (check.syntax_failure) return kUsage;
  if (!check.report.ok()) return kDomain;
  std::cout << "ok: " << path << " (" << check.report.warnings.size() << " warnings)\n";
  return kOk;
}

struct RunOptions {
  std::string config;
  bool mock = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string correction = "holm";
};

stats::Correction parse_correction(const std::string& s) {
  if (s == "bonferroni") return stats::Correction::bonferroni;
  if (s == "none") return stats::Correction::none;
  return stats::Correction::holm;
}

void print_failures(const std::vector<FailureRecord>& failures) {
  std::cerr << failures.size() << " cell(s) failed:\n";
  std::cerr << "  model | condition | scenario | stage | error\n";
  std::size_t shown = 0;
  for (const auto& f : failures) {
    if (++shown > 20) {
      std::cerr << "  ... " << failures.size() - 20 << " more in failures.csv\n";
      break;
    }
    std::cerr << "  " << f.model << " | " << condition_label(f.condition, f.variant) << " | " << f.scenario_id << " | "
              << f.stage << " | " << f.error << "\n";
  }
}

int cmd_run(const RunOptions& o, bool ablation) {
  RunConfig config;
  try {
    config = load_run_config(o.config);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (o.mock) force_mock(config);
  if (o.seed) {
    config.seed = o.seed;
    config.seed_source = "cli";
  }
  if (!o.out.empty()) config.out_dir = o.out;

  RunArtifacts art;
  try {
    art = ablation ? run_ablation(config) : run_experiment(config);
    write_run_artifacts(art, config.out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  std::cout << "run " << art.run_id << " seed " << art.seed << "\n";
  std::cout << art.turns.size() << " turn rows, " << art.scores.size() << " score rows -> " << config.out_dir.string()
            << "\n";

  int rc = kOk;
  try {
    const auto report = analyze(art.turns, art.scores, *load_recipe_or_default(config.recipe_path),
                                parse_correction(o.correction));
    emit_report(report, config.out_dir);
    std::cout << "report: " << (config.out_dir / "report.md").string() << "\n";
  } catch (const InsufficientData& e) {
    std::cerr << "analysis skipped: " << e.what() << "\n";
    rc = kDomain;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (!art.failures.empty()) {
    print_failures(art.failures);
    rc = kDomain;
  }
  return rc;
}

int cmd_scenarios(std::uint64_t seed, int count, const std::string& out) {
  ScenarioSetSpec spec;
  spec.seed = seed;
  spec.total = count;
  spec.per_subject.clear();
  const int subjects = static_cast<int>(kSubjects.size());
  for (int i = 0; i < subjects; ++i)
    spec.per_subject[std::string(kSubjects[i])] = count / subjects + (i < count % subjects ? 1 : 0);
  try {
    const auto set = generate_set(spec, default_recipe());
    save_set(set, out);
    std::cout << set.size() << " scenarios -> " << out << "\n";
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

int cmd_report(const std::string& dir, const std::string& correction) {
  try {
    report_from_run_dir(dir, parse_correction(correction));
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const csv::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InsufficientData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  std::cout << "report: " << (std::filesystem::path(dir) / "report.md").string() << "\n";
  return kOk;
}

Service* g_service = nullptr;

int cmd_serve(const std::string& host, int port) {
  Service svc;
  const int bound = svc.bind(host, port);
  if (bound <= 0) {
    std::cerr << "error: cannot bind " << host << ":" << port << "\n";
    return kUsage;
  }
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  g_service = &svc;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  svc.listen_after_bind();
  g_service = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaffolded tutoring prompts: recipes, runs, ablations and reports"};
  app.require_subcommand(1);

  std::string recipe_path;
  auto* validate = app.add_subcommand("validate", "Validate a scaffolding recipe");
  validate->add_option("recipe", recipe_path, "Recipe JSON file")->required();

  RunOptions run_opts;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", run_opts.config, "Run configuration JSON")->required();
    cmd->add_flag("--mock", run_opts.mock, "Use the deterministic mock for every provider");
    cmd->add_option("--seed", run_opts.seed, "Run seed (overrides the config)");
    cmd->add_option("--out", run_opts.out, "Output directory (overrides the config)");
    cmd->add_option("--correction", run_opts.correction, "Multiple-comparison correction")
        ->check(CLI::IsMember({"holm", "bonferroni", "none"}));
  };
  auto* run = app.add_subcommand("run", "Run all conditions and analyze");
  add_run_flags(run);
  auto* ablate = app.add_subcommand("ablate", "Run the full / prompt-only / scaffold-only ablation");
  add_run_flags(ablate);

  std::uint64_t scen_seed = 42;
  int scen_count = 200;
  std::string scen_out;
  auto* scenarios = app.add_subcommand("scenarios", "Generate a scenario set");
  scenarios->add_option("--seed", scen_seed, "Generation seed");
  scenarios->add_option("--count", scen_count, "Number of scenarios")->check(CLI::PositiveNumber);
  scenarios->add_option("--out", scen_out, "Output JSONL file")->required();

  std::string report_in;
  std::string report_corr = "holm";
  auto* report = app.add_subcommand("report", "Rebuild report.md from a run directory");
  report->add_option("--in", report_in, "Run directory")->required();
  report->add_option("--correction", report_corr, "Multiple-comparison correction")
      ->check(CLI::IsMember({"holm", "bonferroni", "none"}));

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Start the HTTP API");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  if (*validate) return cmd_validate(recipe_path);
  if (*run) return cmd_run(run_opts, false);
  if (*ablate) return cmd_run(run_opts, true);
  if (*scenarios) return cmd_scenarios(scen_seed, scen_count, scen_out);
  if (*report) return cmd_report(report_in, report_corr);
  if (*serve) return cmd_serve(host, port);
  return kUsage;
}
