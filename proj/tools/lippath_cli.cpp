// lippath: sample, estimate, integrate, invert and validate Lipschitz path measures.
//
// Exit codes: 0 ok, 1 check failure, 2 usage or configuration error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "lippath/bridge.hpp"
#include "lippath/error.hpp"
#include "lippath/extensions.hpp"
#include "lippath/io.hpp"
#include "lippath/measure.hpp"
#include "lippath/validate.hpp"

#ifndef LIPPATH_VERSION
#define LIPPATH_VERSION "unknown"
#endif

namespace {

using lippath::Errc;
using lippath::Error;
using lippath::io::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string command;
  std::string domain = "bridge";
  double r = 0.0;
  double s = 1.0;
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;
  int depth = 4;
  int horizon = 3;
  std::uint64_t n = 1000;
  std::uint64_t seed = 0;
  std::uint64_t points = 64;
  unsigned threads = 0;
  double scale = 1.0;
  std::string event;
  std::string in;
  std::string out;
  std::string format = "csv";
  std::string fault;
};

lippath::Domain domain_from_config(const RunConfig& cfg) {
  json params{{"r", cfg.r}, {"s", cfg.s}, {"a", cfg.a}, {"b", cfg.b}, {"c", cfg.c}, {"horizon", cfg.horizon}};
  return lippath::io::domain_from_json(cfg.domain, params);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to --out, or stdout when no file is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error(Errc::invalid_domain, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

json config_echo(const RunConfig& cfg) {
  return json{{"command", cfg.command}, {"depth", cfg.depth}, {"n", cfg.n}, {"seed", cfg.seed}, {"event", cfg.event}};
}

int cmd_sample(const RunConfig& cfg) {
  const lippath::Domain domain = domain_from_config(cfg);
  const auto format = cfg.format == "jsonl" ? lippath::io::PathFormat::jsonl : lippath::io::PathFormat::csv;
  std::ostringstream buffer;
  lippath::io::write_samples(buffer, domain, cfg.depth, cfg.n, cfg.seed, format);
  Output out(cfg.out);
  out.stream() << buffer.str();
  return kExitOk;
}

int cmd_estimate(const RunConfig& cfg) {
  if (cfg.event.empty()) throw Error(Errc::parse_error, "estimate needs --event <file>");
  const auto file = lippath::io::parse_event_file(read_file(cfg.event));
  const bool probability = lippath::is_probability_domain(file.domain);
  const lippath::Estimate est =
      probability ? lippath::mc_probability(file.domain, file.event, cfg.n, cfg.depth, cfg.seed, cfg.threads)
                  : lippath::lebesgue_cylinder(file.domain, file.event, cfg.n, cfg.depth, cfg.seed, cfg.threads);
  json doc = lippath::io::to_json(est);
  doc["measure"] = probability ? "probability" : "lebesgue";
  doc["domain"] = std::string(lippath::domain_name(file.domain));
  doc["params"] = lippath::io::domain_params(file.domain);
  doc["config"] = config_echo(cfg);
  doc["version"] = LIPPATH_VERSION;
  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg) {
  if (cfg.event.empty()) throw Error(Errc::parse_error, "oracle needs --event <file>");
  const auto file = lippath::io::parse_event_file(read_file(cfg.event));
  const auto* bridge = std::get_if<lippath::BridgeDomain>(&file.domain);
  if (bridge == nullptr) throw Error(Errc::invalid_domain, "the quadrature oracle covers the bridge domain only");
  const lippath::OracleResult res = lippath::oracle_probability(bridge->spec, file.event, cfg.depth, cfg.points);
  json doc = lippath::io::to_json(res);
  doc["depth"] = cfg.depth;
  doc["params"] = lippath::io::domain_params(file.domain);
  doc["version"] = LIPPATH_VERSION;
  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  return kExitOk;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) worst = std::max(worst, std::abs(x[j] - y[j]));
  return worst;
}

// One JSONL record per input path: the recovered noise and the largest
// deviation of the rebuilt path from the input.
json invert_one(const std::string& domain, const json& line) {
  using namespace lippath;
  if (domain == "halfline" || domain == "free_halfline") {
    const HalfLinePath path = io::halfline_path_from_json(line);
    const HalfLineNoise noise = invert_halfline(path);
    const double a = path.segments.front().front();
    const HalfLinePath rebuilt = build_halfline(a, path.r, path.c, noise, path.horizon, path.depth());
    double err = 0.0;
    for (std::size_t k = 0; k < path.segments.size(); ++k) {
      err = std::max(err, max_abs_diff(path.segments[k].values, rebuilt.segments[k].values));
    }
    json doc{{"noise", io::to_json(noise)}, {"max_rebuild_error", err}};
    if (domain == "free_halfline") doc["initial"] = a;
    return doc;
  }
  const GridPath path = io::grid_path_from_json(line);
  const double r = path.grid.r();
  const double s = path.grid.s();
  if (domain == "bridge") {
    const BridgeSpec spec{r, s, path.front(), path.back(), path.c};
    const NoiseVector noise = invert_bridge(path, spec);
    return {{"noise", io::to_json(noise)},
            {"max_rebuild_error", max_abs_diff(path.values, build_bridge(spec, noise).values)}};
  }
  if (domain == "pinned_left" || domain == "free_segment") {
    const EndpointNoise noise = invert_pinned_left(path);
    const GridPath rebuilt = build_pinned_left(path.front(), r, s, path.c, noise, path.depth());
    json doc{{"noise", io::to_json(noise)}, {"max_rebuild_error", max_abs_diff(path.values, rebuilt.values)}};
    if (domain == "free_segment") doc["initial"] = IdentityInitialSelector{}.invert(path.front());
    return doc;
  }
  if (domain == "pinned_right") {
    const EndpointNoise noise = invert_pinned_right(path);
    const GridPath rebuilt = build_pinned_right(path.back(), r, s, path.c, noise, path.depth());
    return {{"noise", io::to_json(noise)}, {"max_rebuild_error", max_abs_diff(path.values, rebuilt.values)}};
  }
  throw Error(Errc::parse_error, "unknown domain '" + domain + "'");
}

int cmd_invert(const RunConfig& cfg) {
  if (cfg.in.empty()) throw Error(Errc::parse_error, "invert needs --in <jsonl file>");
  std::istringstream lines(read_file(cfg.in));
  std::ostringstream buffer;
  double worst = 0.0;
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json parsed;
    try {
      parsed = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::parse_error, "line " + std::to_string(count + 1) + ": " + e.what());
    }
    json doc = invert_one(cfg.domain, parsed);
    worst = std::max(worst, doc["max_rebuild_error"].get<double>());
    buffer << doc.dump() << '\n';
    ++count;
  }
  Output out(cfg.out);
  out.stream() << buffer.str();
  if (worst > 1e-12) {
    std::cerr << "lippath: rebuild from recovered noise deviates by " << worst << " (> 1e-12)\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  lippath::validate::Options opt;
  opt.seed = cfg.seed == 0 ? opt.seed : cfg.seed;
  opt.scale = cfg.scale;
  opt.fault = cfg.fault;
  opt.threads = cfg.threads;
  const auto report = lippath::validate::run_all(opt);
  json doc = lippath::validate::to_json(report);
  doc["seed"] = opt.seed;
  doc["scale"] = opt.scale;
  doc["version"] = LIPPATH_VERSION;
  Output out(cfg.out);
  out.stream() << doc.dump(2) << '\n';
  for (const auto& c : report.checks) {
    std::cerr << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << ' ' << c.name << ": " << c.detail << '\n';
  }
  return report.all_passed() ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--domain", cfg.domain, "bridge | pinned_left | pinned_right | halfline | free_segment | free_halfline")
      ->check(CLI::IsMember({"bridge", "pinned_left", "pinned_right", "halfline", "free_segment", "free_halfline"}));
  sub->add_option("--r", cfg.r, "left end of the time interval");
  sub->add_option("--s", cfg.s, "right end of the time interval");
  sub->add_option("--a", cfg.a, "value at r");
  sub->add_option("--b", cfg.b, "value at s");
  sub->add_option("--c", cfg.c, "Lipschitz constant");
  sub->add_option("--depth", cfg.depth, "dyadic depth per segment")->check(CLI::Range(0, lippath::kMaxDepth));
  sub->add_option("--horizon", cfg.horizon, "integer horizon K of half-line domains");
  sub->add_option("--n", cfg.n, "number of samples");
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--threads", cfg.threads, "worker threads for Monte Carlo (0 = all cores)");
  sub->add_option("--out", cfg.out, "output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform measures on spaces of Lipschitz paths"};
  app.set_version_flag("--version", LIPPATH_VERSION);
  app.require_subcommand(1);
  RunConfig cfg;

  auto* sample = app.add_subcommand("sample", "draw paths and write CSV or JSONL");
  add_common(sample, cfg);
  sample->add_option("--format", cfg.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo measure of a cylinder event");
  add_common(estimate, cfg);
  estimate->add_option("--event", cfg.event, "event file (JSON)")->required();

  auto* oracle = app.add_subcommand("oracle", "quadrature over the noise cube (bridge, depth <= 4)");
  add_common(oracle, cfg);
  oracle->add_option("--event", cfg.event, "event file (JSON)")->required();
  oracle->add_option("--points", cfg.points, "midpoint-rule points per dimension (even)");

  auto* invert = app.add_subcommand("invert", "recover noise from JSONL paths");
  add_common(invert, cfg);
  invert->add_option("--in", cfg.in, "JSONL file of paths, as written by `sample --format jsonl`")->required();

  auto* validate = app.add_subcommand("validate", "run the invariant suite");
  add_common(validate, cfg);
  validate->add_option("--scale", cfg.scale, "multiplier on sample counts (1 = full size)")
      ->check(CLI::PositiveNumber);
#ifdef LIPPATH_FAULT_HOOKS
  validate->add_option("--inject-fault", cfg.fault, "corrupt the data of one check (test builds only)");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lippath: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sample->parsed()) return cfg.command = "sample", cmd_sample(cfg);
    if (estimate->parsed()) return cfg.command = "estimate", cmd_estimate(cfg);
    if (oracle->parsed()) return cfg.command = "oracle", cmd_oracle(cfg);
    if (invert->parsed()) return cfg.command = "invert", cmd_invert(cfg);
    if (validate->parsed()) return cfg.command = "validate", cmd_validate(cfg);
  } catch (const Error& e) {
    std::cerr << "lippath: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "lippath: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
