// Command-line front end: ODE benchmark, the three experiments, and the
// corrector-weight sweep. Exit codes: 0 success, 1 runtime failure, 2 bad
// flags.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "heunflow/experiments.hpp"

namespace {

struct FlagState {
  std::uint64_t seed = 1;
  std::string out_dir = "run_out";
  std::string data_dir;
  std::string config_path;
  std::string family = "heun";
  int epochs = -1;
  int batch_size = -1;
  int hidden = -1;
  int depth = 2;
  int sine_points = 512;
  double alpha = 0.8;
  double lr = -1.0;
  std::string optimizer;
  double momentum = 0.9;
  long long subset_size = -1;
  double t_end = 4.0;
  std::vector<double> h_list;
  std::vector<double> sweep_alphas;
  bool parallel = false;
  bool wall_clock = false;
};

void add_common(CLI::App* sub, FlagState& fs) {
  sub->add_option("--seed", fs.seed, "RNG seed for the run");
  sub->add_option("--out-dir", fs.out_dir, "directory for metrics.csv, config.json, plot.svg");
  sub->add_option("--epochs", fs.epochs, "epochs (iterations for sine/alpha-sweep)");
  sub->add_option("--batch-size", fs.batch_size, "mini-batch size");
  sub->add_option("--family", fs.family, "block family")
      ->check(CLI::IsMember({"plain", "resnet", "heun", "extheun"}));
  sub->add_option("--alpha", fs.alpha, "corrector weight (family extheun / alpha-sweep)")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--hidden", fs.hidden, "hidden width");
  sub->add_option("--lr", fs.lr, "learning rate");
  sub->add_option("--optimizer", fs.optimizer, "adam or sgd (task default otherwise)")
      ->check(CLI::IsMember({"adam", "sgd"}));
  sub->add_option("--momentum", fs.momentum, "sgd momentum");
  sub->add_option("--subset-size", fs.subset_size, "training subset size (eval uses 1/5)");
  sub->add_option("--depth", fs.depth, "number of stacked blocks");
  sub->add_option("--data-dir", fs.data_dir,
                  "dataset root (default: HEUNFLOW_DATA_DIR environment variable)");
  sub->add_option("--config", fs.config_path, "JSON config to start from; flags override");
  sub->add_flag("--wall-clock", fs.wall_clock, "record measured wall time in metrics.csv");
}

int fail_flags(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictor-corrector residual networks: solvers, blocks, and experiments"};
  app.require_subcommand(1);
  FlagState fs;

  CLI::App* ode = app.add_subcommand("ode-bench", "convergence order of the integrators");
  add_common(ode, fs);
  ode->add_option("--t-end", fs.t_end, "integration horizon");
  ode->add_option("--h-list", fs.h_list, "step sizes to test");

  CLI::App* mnist = app.add_subcommand("mnist", "digit classification at desk scale");
  add_common(mnist, fs);

  CLI::App* ecg = app.add_subcommand("ecg", "heartbeat classification at desk scale");
  add_common(ecg, fs);

  CLI::App* sine = app.add_subcommand("sine", "sine-wave generation vs a plain LSTM");
  add_common(sine, fs);
  sine->add_option("--sine-points", fs.sine_points, "samples over the 16*pi wave");

  CLI::App* sweep = app.add_subcommand("alpha-sweep", "sine task across corrector weights");
  add_common(sweep, fs);
  sweep->add_option("--sine-points", fs.sine_points, "samples over the 16*pi wave");
  sweep->add_option("--alphas", fs.sweep_alphas, "corrector weights to sweep");
  sweep->add_flag("--parallel", fs.parallel, "run the sweep values concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();

  heunflow::RunConfig cfg;
  if (sub->count("--config")) {
    try {
      cfg = heunflow::load_config(fs.config_path);
    } catch (const std::exception& e) {
      return fail_flags(std::string("--config: ") + e.what());
    }
  }
  cfg.task = sub->get_name();
  if (sub->count("--seed")) cfg.seed = fs.seed;
  if (sub->count("--out-dir") || cfg.out_dir.empty()) cfg.out_dir = fs.out_dir;
  if (sub->count("--data-dir")) cfg.data_dir = fs.data_dir;
  if (sub->count("--epochs")) cfg.epochs = fs.epochs;
  if (sub->count("--batch-size")) cfg.batch_size = fs.batch_size;
  if (sub->count("--family")) cfg.family = fs.family;
  if (sub->count("--alpha")) cfg.alpha = fs.alpha;
  if (sub->count("--hidden")) cfg.hidden = fs.hidden;
  if (sub->count("--lr")) cfg.lr = fs.lr;
  if (sub->count("--optimizer")) cfg.optimizer = fs.optimizer;
  if (sub->count("--momentum")) cfg.momentum = fs.momentum;
  if (sub->count("--subset-size")) cfg.subset_size = fs.subset_size;
  if (sub->count("--depth")) cfg.depth = fs.depth;
  if (sub->count("--wall-clock")) cfg.wall_clock = fs.wall_clock;
  if (sub == ode) {
    if (sub->count("--t-end")) cfg.ode_t_end = fs.t_end;
    if (sub->count("--h-list")) cfg.ode_h = fs.h_list;
  }
  if (sub == sine || sub == sweep) {
    if (sub->count("--sine-points")) cfg.sine_points = fs.sine_points;
  }
  if (sub == sweep) {
    if (sub->count("--alphas")) cfg.sweep_alphas = fs.sweep_alphas;
    if (sub->count("--parallel")) cfg.parallel = fs.parallel;
  }

  if (sub->count("--alpha") && cfg.task != "alpha-sweep" && cfg.family != "extheun")
    return fail_flags("--alpha is only valid with --family extheun or the alpha-sweep subcommand");

  try {
    heunflow::run_task(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
