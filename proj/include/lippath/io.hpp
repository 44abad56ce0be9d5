#pragma once

// JSON and CSV encodings of paths, noise, events and estimates.
//
//   GridPath      {"r", "s", "c", "depth", "values": [...]}
//   HalfLinePath  {"r", "c", "horizon", "depth", "segments": [GridPath, ...]}
//   event file    {"domain": name, "params": {...}, "constraints": [{"t", "lo", "hi"}, ...]}
//   Estimate      {"mean", "std_error", "n_samples", "seed", "depth"}
//
// Doubles are written in the shortest form that parses back to the same bits.
// A missing or null constraint bound is unbounded on that side.

#include <charconv>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <system_error>

#include "json.hpp"
#include "lippath/bridge.hpp"
#include "lippath/error.hpp"
#include "lippath/extensions.hpp"
#include "lippath/measure.hpp"

namespace lippath::io {

using nlohmann::json;

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

struct EventFile {
  Domain domain;
  CylinderEvent event;
};

namespace detail {

template <class F>
auto parsing(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

inline double number(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::parse_error, std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw Error(Errc::parse_error, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline int integer(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::parse_error, std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw Error(Errc::parse_error, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

inline double bound(const json& j, const char* key, double unbounded) {
  if (!j.contains(key) || j.at(key).is_null()) return unbounded;
  return number(j, key);
}

}  // namespace detail

inline json to_json(const GridPath& p) {
  return json{{"r", p.grid.r()}, {"s", p.grid.s()}, {"c", p.c}, {"depth", p.depth()}, {"values", p.values}};
}

inline GridPath grid_path_from_json(const json& j) {
  return detail::parsing([&] {
    GridPath p{DyadicGrid(detail::number(j, "r"), detail::number(j, "s"), detail::integer(j, "depth")),
               detail::number(j, "c"), j.at("values").get<std::vector<double>>()};
    check_shape(p);
    return p;
  });
}

inline json to_json(const HalfLinePath& p) {
  json segs = json::array();
  for (const auto& s : p.segments) segs.push_back(to_json(s));
  return json{{"r", p.r}, {"c", p.c}, {"horizon", p.horizon}, {"depth", p.depth()}, {"segments", segs}};
}

inline HalfLinePath halfline_path_from_json(const json& j) {
  return detail::parsing([&] {
    HalfLinePath p{detail::number(j, "r"), detail::number(j, "c"), detail::integer(j, "horizon"), {}};
    const int depth = detail::integer(j, "depth");
    for (const auto& s : j.at("segments")) {
      p.segments.push_back(grid_path_from_json(s));
      if (p.segments.back().depth() != depth) throw Error(Errc::depth_mismatch, "segment depth differs from 'depth'");
    }
    return p;
  });
}

inline json to_json(const NoiseVector& n) {
  return json{{"depth", n.depth()}, {"values", std::vector<double>(n.values().begin(), n.values().end())}};
}

inline NoiseVector noise_from_json(const json& j) {
  return detail::parsing(
      [&] { return NoiseVector(detail::integer(j, "depth"), j.at("values").get<std::vector<double>>()); });
}

inline json to_json(const EndpointNoise& n) { return json{{"endpoint", n.endpoint}, {"interior", to_json(n.interior)}}; }

inline EndpointNoise endpoint_noise_from_json(const json& j) {
  return detail::parsing([&] {
    EndpointNoise n{detail::number(j, "endpoint"), noise_from_json(j.at("interior"))};
    check_unit(n.endpoint);
    return n;
  });
}

inline json to_json(const HalfLineNoise& n) {
  json segs = json::array();
  for (const auto& s : n.segments) segs.push_back(to_json(s));
  return json{{"segments", segs}};
}

inline HalfLineNoise halfline_noise_from_json(const json& j) {
  return detail::parsing([&] {
    HalfLineNoise n;
    for (const auto& s : j.at("segments")) n.segments.push_back(endpoint_noise_from_json(s));
    return n;
  });
}

inline json to_json(const Estimate& e) {
  return json{{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"seed", e.seed},
              {"depth", e.depth}};
}

inline json to_json(const OracleResult& o) {
  return json{{"value", o.value},
              {"grid_points_per_dim", o.grid_points_per_dim},
              {"error_indicator", o.error_indicator},
              {"coarse_value", o.coarse_value}};
}

inline json domain_params(const Domain& d) {
  return std::visit(
      overloaded{
          [](const BridgeDomain& x) {
            return json{{"r", x.spec.r}, {"s", x.spec.s}, {"a", x.spec.a}, {"b", x.spec.b}, {"c", x.spec.c}};
          },
          [](const PinnedLeftDomain& x) { return json{{"a", x.a}, {"r", x.r}, {"s", x.s}, {"c", x.c}}; },
          [](const PinnedRightDomain& x) { return json{{"b", x.b}, {"r", x.r}, {"s", x.s}, {"c", x.c}}; },
          [](const HalfLineDomain& x) { return json{{"a", x.a}, {"r", x.r}, {"c", x.c}, {"horizon", x.horizon}}; },
          [](const FreeSegmentDomain& x) { return json{{"r", x.r}, {"s", x.s}, {"c", x.c}}; },
          [](const FreeHalfLineDomain& x) { return json{{"r", x.r}, {"c", x.c}, {"horizon", x.horizon}}; }},
      d);
}

inline Domain domain_from_json(const std::string& name, const json& p) {
  using detail::integer;
  using detail::number;
  if (name == "bridge") return BridgeDomain{{number(p, "r"), number(p, "s"), number(p, "a"), number(p, "b"), number(p, "c")}};
  if (name == "pinned_left") return PinnedLeftDomain{number(p, "a"), number(p, "r"), number(p, "s"), number(p, "c")};
  if (name == "pinned_right") return PinnedRightDomain{number(p, "b"), number(p, "r"), number(p, "s"), number(p, "c")};
  if (name == "halfline") return HalfLineDomain{number(p, "a"), number(p, "r"), number(p, "c"), integer(p, "horizon")};
  if (name == "free_segment") return FreeSegmentDomain{number(p, "r"), number(p, "s"), number(p, "c")};
  if (name == "free_halfline") return FreeHalfLineDomain{number(p, "r"), number(p, "c"), integer(p, "horizon")};
  throw Error(Errc::parse_error, "unknown domain '" + name + "'");
}

inline json to_json(const EventFile& f) {
  json cs = json::array();
  for (const auto& c : f.event.constraints) {
    json item{{"t", c.t}};
    item["lo"] = std::isfinite(c.lo) ? json(c.lo) : json(nullptr);
    item["hi"] = std::isfinite(c.hi) ? json(c.hi) : json(nullptr);
    cs.push_back(item);
  }
  return json{{"domain", std::string(domain_name(f.domain))}, {"params", domain_params(f.domain)}, {"constraints", cs}};
}

inline EventFile event_file_from_json(const json& j) {
  return detail::parsing([&] {
    if (!j.is_object()) throw Error(Errc::parse_error, "event file must be a JSON object");
    EventFile f{domain_from_json(j.at("domain").get<std::string>(), j.at("params")), {}};
    for (const auto& c : j.at("constraints")) {
      f.event.constraints.push_back({detail::number(c, "t"),
                                     detail::bound(c, "lo", -std::numeric_limits<double>::infinity()),
                                     detail::bound(c, "hi", std::numeric_limits<double>::infinity())});
    }
    return f;
  });
}

inline EventFile parse_event_file(const std::string& text) {
  return detail::parsing([&] { return event_file_from_json(json::parse(text)); });
}

/// Long-format CSV rows "sample_id,t,value".
inline void write_csv_header(std::ostream& os) { os << "sample_id,t,value\n"; }

inline void write_csv_rows(std::ostream& os, std::uint64_t sample_id, const PathPoints& pts) {
  for (std::size_t i = 0; i < pts.times.size(); ++i) {
    os << sample_id << ',' << format_double(pts.times[i]) << ',' << format_double(pts.values[i]) << '\n';
  }
}

enum class PathFormat { csv, jsonl };

/// Draws `n` paths of `domain` and writes them in `format`. Output is a pure
/// function of the arguments.
inline void write_samples(std::ostream& os, const Domain& domain, int depth, std::uint64_t n, std::uint64_t seed,
                          PathFormat format) {
  if (!is_probability_domain(domain)) {
    throw Error(Errc::non_probability_measure,
                std::string(domain_name(domain)) +
                    " has no probability law to sample; sample pinned_left or halfline with a fixed initial value");
  }
  if (format == PathFormat::csv) write_csv_header(os);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (const auto* h = std::get_if<HalfLineDomain>(&domain)) {
      const HalfLinePath p = sample_halfline_path(*h, depth, seed, i);
      if (format == PathFormat::csv) write_csv_rows(os, i, flatten(p));
      else os << to_json(p).dump() << '\n';
    } else {
      const GridPath p = sample_path(domain, depth, seed, i);
      if (format == PathFormat::csv) write_csv_rows(os, i, flatten(p));
      else os << to_json(p).dump() << '\n';
    }
  }
}

}  // namespace lippath::io
