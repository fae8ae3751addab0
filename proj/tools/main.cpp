#include "aniso/cli.hpp"

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"aniso: modality gap diagnostics and anisotropic alignment"};
  app.require_subcommand(1);
  aniso::cli::CliOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  for (const std::string& name : aniso::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " stage");
    sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "top-level seed");
    sub->add_option("--threads", threads, "worker cap (default: ANISO_THREADS, then all cores)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (sub->count("--config")) opts.config = config;
  if (sub->count("--out")) opts.out = out;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--threads")) opts.threads = threads;
  return aniso::cli::run(opts);
}
