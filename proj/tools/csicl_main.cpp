#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "csicl/runner/config.hpp"
#include "csicl/runner/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
  std::optional<std::size_t> limit;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the configured seed");
  cmd->add_flag("--dry-run", args.dry_run, "Print digests without calling any model or writing results");
  cmd->add_option("--limit", args.limit, "Stop after this many new queries")->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual in-context learning evaluation harness"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string which;
  for (const char* name : {"gen-demos", "run", "score", "stats", "report"}) {
    static const std::map<std::string, std::string> help{
        {"gen-demos", "Generate and cache code-switching ladders and paraphrases"},
        {"run", "Query every model on every setting, resuming from existing records"},
        {"score", "Re-extract and rescore stored responses"},
        {"stats", "Paired bootstrap of the target setting against every baseline"},
        {"report", "Render tables from records and bootstrap results"}};
    CLI::App* cmd = app.add_subcommand(name, help.at(name));
    add_common(cmd, args);
    cmd->callback([&which, name] { which = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    csicl::RunConfig cfg = csicl::load_config(args.config);
    if (args.seed) cfg.seed = *args.seed;
    csicl::PipelineHooks hooks;
    hooks.dry_run = args.dry_run;
    hooks.limit = args.limit;
    csicl::Pipeline pipeline(std::move(cfg), std::move(hooks));
    if (which == "gen-demos") return pipeline.gen_demos();
    if (which == "run") return pipeline.run();
    if (which == "score") return pipeline.score();
    if (which == "stats") return pipeline.stats();
    return pipeline.report();
  } catch (const std::exception& e) {
    std::cerr << which << ": " << e.what() << "\n";
    return csicl::kExitError;
  }
}
