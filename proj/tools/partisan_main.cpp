#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "partisan/common/error.hpp"
#include "partisan/pipeline/config.hpp"
#include "partisan/pipeline/run.hpp"
#include "partisan/pipeline/synth.hpp"

namespace {

namespace fs = std::filesystem;

void log_line(const std::string& message) {
  std::fprintf(stderr, "%s\n", message.c_str());
}

// Flags shared by every analysis subcommand; explicit flags override the
// values loaded from --config.
struct Common {
  std::string config;
  uint64_t seed = 0;
  std::string out;
  std::vector<int> k;
  bool exclude_self = false;
  int swing_window = 2012;

  CLI::Option* o_config = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_exclude = nullptr;
  CLI::Option* o_swing = nullptr;

  void attach(CLI::App* cmd) {
    o_config = cmd->add_option("--config", config, "run configuration file");
    o_seed = cmd->add_option("--seed", seed, "override the run seed");
    o_out = cmd->add_option("--out", out, "override the output directory");
    o_k = cmd->add_option("--k", k, "override the k-NN sweep, e.g. 5,7,10")
              ->delimiter(',');
    o_exclude = cmd->add_flag("--exclude-self", exclude_self,
                              "also emit self-loop-free exposure tables");
    o_swing = cmd->add_option("--swing-window", swing_window,
                              "swing-county window start, 2012 or 2008")
                  ->check(CLI::IsMember({2012, 2008}));
  }

  partisan::pipeline::RunConfig resolve() const {
    if (!o_config->count())
      throw partisan::Error(partisan::ErrorCode::Validation, "--config is required");
    auto cfg = partisan::pipeline::load_run_config(config);
    if (o_seed->count()) cfg.seed = seed;
    if (o_out->count()) cfg.out = out;
    if (o_k->count()) {
      if (k.empty())
        throw partisan::Error(partisan::ErrorCode::Validation,
                              "--k needs at least one value");
      for (int v : k)
        if (v < 1)
          throw partisan::Error(partisan::ErrorCode::Validation,
                                "--k values must be positive");
      cfg.k_sweep = k;
    }
    if (o_exclude->count()) cfg.exclude_self = true;
    if (o_swing->count()) cfg.swing_window = swing_window;
    return cfg;
  }
};

void run_stages(const partisan::pipeline::RunConfig& cfg,
                const std::vector<std::string>& stages) {
  fs::create_directories(cfg.out);
  auto state = partisan::pipeline::prepare(cfg, log_line);
  for (const auto& stage : stages)
    for (const auto& artifact : partisan::pipeline::run_stage(state, stage, cfg.out))
      std::printf("%s\n", (cfg.out / artifact).string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"county-level partisan exposure and segregation analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", partisan::pipeline::kToolkitVersion);

  struct StageCommand {
    const char* name;
    const char* help;
    std::vector<std::string> stages;
  };
  const std::vector<StageCommand> stage_commands = {
      {"ingest", "load, align, and label the input tables", {"ingest", "normal_vote"}},
      {"exposure", "exposure, segregation, diversity, extroversion tables", {"exposure"}},
      {"stats", "t-test battery and VIF diagnostics", {"stats"}},
      {"fit-ols", "per-dimension OLS fits for every scope", {"fit_ols"}},
      {"fit-sar", "per-dimension spatial lag fits over the k sweep", {"fit_sar"}},
      {"dominance", "dominance analysis per party and scope", {"dominance"}},
      {"elasticnet", "cross-validated elastic net per party", {"elasticnet"}},
      {"gbm-shap", "gradient boosting plus exact Shapley values", {"gbm_shap"}},
      {"run", "full pipeline: every stage plus manifest", {}},
  };

  std::vector<Common> commons(stage_commands.size());
  for (size_t i = 0; i < stage_commands.size(); ++i) {
    const auto& sc = stage_commands[i];
    auto* cmd = app.add_subcommand(sc.name, sc.help);
    commons[i].attach(cmd);
    Common* common = &commons[i];
    if (sc.stages.empty()) {
      cmd->callback([common] {
        auto manifest = partisan::pipeline::run_pipeline(common->resolve(), log_line);
        std::printf("%s\n", manifest.string().c_str());
      });
    } else {
      const std::vector<std::string>* stages = &sc.stages;
      cmd->callback([common, stages] { run_stages(common->resolve(), *stages); });
    }
  }

  auto* synth = app.add_subcommand("synth", "write the bundled synthetic fixture");
  std::string synth_out;
  uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "fixture directory")->required();
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->callback([&] {
    partisan::pipeline::write_fixture(synth_out, synth_seed);
    std::printf("%s\n", (fs::path(synth_out) / "config.ini").string().c_str());
  });

  auto* report = app.add_subcommand("report", "summarize a completed run directory");
  Common report_common;
  report_common.attach(report);
  report->callback([&] {
    fs::path dir;
    if (report_common.o_out->count())
      dir = report_common.out;
    else if (report_common.o_config->count())
      dir = partisan::pipeline::load_run_config(report_common.config).out;
    else
      throw partisan::Error(partisan::ErrorCode::Validation,
                            "report needs --out or --config");
    partisan::pipeline::emit_report(dir, log_line);
    std::printf("%s\n", (dir / "summary.json").string().c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const partisan::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
