// nsmooth: synthetic scaling, robust logistic regression, bound reports and
// trace runs. Exit status is 0 only when every certificate passes; 2 on bad
// input, 3 on numerical failure.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nsmooth/errors.hpp"
#include "nsmooth/experiments.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> dims;
  std::optional<double> eps;
  std::optional<std::string> sampler;
  std::optional<std::uint64_t> steps;
  std::optional<double> step_size;
  std::optional<double> velocity_scale;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> chains;
  std::string dataset;
};

nsmooth::ExperimentConfig build_config(const Overrides& o, const std::string& command) {
  nsmooth::ExperimentConfig c = o.config.empty() ? nsmooth::ExperimentConfig{} : nsmooth::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.dims.empty()) c.dims = o.dims;
  if (o.eps) c.epsilon = *o.eps;
  if (o.sampler) c.sampler = nsmooth::parse_sampler_kind(*o.sampler);
  if (o.step_size) {
    c.step_size = *o.step_size;
    c.logistic.step_size = *o.step_size;
  }
  if (o.velocity_scale) c.velocity_scale = *o.velocity_scale;
  if (o.repeats) c.repeats = *o.repeats;
  if (!o.dataset.empty()) c.logistic.dataset = o.dataset;
  if (o.chains) {
    c.scaling.chains = *o.chains;
    c.logistic.chains = *o.chains;
  }
  if (o.steps) {
    // --steps is the run length of the chosen subcommand
    if (command == "synthetic") {
      c.scaling.max_iterations = *o.steps;
      c.scaling.reference_steps = std::max(c.scaling.reference_steps, 10 * *o.steps);
    } else if (command == "logistic") {
      c.logistic.burn_in = *o.steps;
    } else if (command == "trace") {
      c.trace.steps = *o.steps;
    }
  }
  c.validate();
  return c;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw nsmooth::InvalidInput("cannot write " + path.string());
  f << text;
}

template <class Writer>
void write_csv(const fs::path& path, Writer&& w) {
  std::ofstream f(path);
  if (!f) throw nsmooth::InvalidInput("cannot write " + path.string());
  w(f);
}

int finish(const fs::path& out, const std::string& command, const std::vector<nsmooth::Certificate>& certs,
           const std::vector<std::string>& warnings, json extra = json::object()) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  json doc = extra;
  doc["command"] = command;
  doc["certificates"] = nsmooth::to_json(std::span<const nsmooth::Certificate>(certs));
  doc["pass"] = nsmooth::all_pass(certs);
  doc["warnings"] = warnings;
  write_text(out / ("certificates_" + command + ".json"), doc.dump(2) + "\n");
  for (const auto& c : certs)
    std::cout << (c.pass ? "ok   " : "FAIL ") << c.metric << " value=" << c.value << " bound=" << c.bound << '\n';
  return nsmooth::all_pass(certs) ? 0 : 1;
}

int run(const std::string& command, const Overrides& o) {
  const nsmooth::ExperimentConfig cfg = build_config(o, command);
  const fs::path out = o.out;
  fs::create_directories(out);
  const std::string hash = nsmooth::config_hash(cfg);
  write_text(out / ("config_" + command + ".json"), nsmooth::to_json(cfg).dump(2) + "\n");

  if (command == "synthetic") {
    const auto r = nsmooth::run_synthetic_scaling(cfg);
    write_csv(out / "scaling.csv", [&](std::ostream& f) { nsmooth::write_scaling_csv(f, r.records, hash); });
    std::cout << "exponent " << r.fit.slope << " [" << r.fit.ci_low << ", " << r.fit.ci_high << "], censored "
              << r.fit.censored << '\n';
    return finish(out, command, r.certificates, r.warnings,
                  json{{"config_hash", hash}, {"fit", nsmooth::to_json(r.fit)}});
  }
  if (command == "logistic") {
    const auto r = nsmooth::run_robust_logistic(cfg);
    write_csv(out / "logistic.csv", [&](std::ostream& f) { nsmooth::write_logistic_csv(f, r.records, hash); });
    return finish(out, command, r.certificates, r.warnings, json{{"config_hash", hash}, {"beta", r.beta}});
  }
  if (command == "trace") {
    const auto r = nsmooth::run_trace(cfg);
    write_csv(out / "trace.csv", [&](std::ostream& f) { nsmooth::write_trace_csv(f, r.records, hash); });
    return finish(out, command, r.certificates, {}, json{{"config_hash", hash}});
  }
  const auto r = nsmooth::emit_bound_report(cfg);
  json report = r.report;
  report["certificates"] = nsmooth::to_json(std::span<const nsmooth::Certificate>(r.certificates));
  write_text(out / "bounds.json", report.dump(2) + "\n");
  return finish(out, command, r.certificates, {}, json{{"config_hash", hash}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling from non-smooth max-structure potentials via smoothing"};
  app.require_subcommand(1);
  Overrides o;
  std::string command;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Base RNG seed");
    sub->add_option("--dims", o.dims, "Dimension list")->delimiter(',');
    sub->add_option("--eps", o.eps, "Target accuracy epsilon");
    sub->add_option("--sampler", o.sampler, "lmc or klmc-rm")->check(CLI::IsMember({"lmc", "klmc-rm"}));
    sub->add_option("--steps", o.steps, "Run length (max iterations, burn-in or trace length)");
    sub->add_option("--step-size", o.step_size, "Sampler step size");
    sub->add_option("--velocity-scale", o.velocity_scale, "KLMC velocity scale u");
    sub->add_option("--repeats", o.repeats, "Number of seeds");
    sub->add_option("--chains", o.chains, "Parallel chains");
    sub->callback([&, sub] { command = sub->get_name(); });
  };
  add_common(app.add_subcommand("synthetic", "Iterations-to-tolerance versus dimension"));
  auto* logistic = app.add_subcommand("logistic", "Nominal versus worst-case posterior under test noise");
  add_common(logistic);
  logistic->add_option("--dataset", o.dataset, "CSV with label first, features after")->check(CLI::ExistingFile);
  add_common(app.add_subcommand("bounds", "Iteration-count calculators (no sampling)"));
  add_common(app.add_subcommand("trace", "First-coordinate traces of both samplers"));

  CLI11_PARSE(app, argc, argv);
  try {
    return run(command, o);
  } catch (const nsmooth::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nsmooth::RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
