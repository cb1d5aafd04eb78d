#include "mixsens/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mixsens/graph.hpp"
#include "mixsens/result_table.hpp"

namespace mixsens {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string path, std::string source) : j_(j), path_(std::move(path)), src_(std::move(source)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& where, const std::string& msg) const {
    throw Error(src_ + ": " + (where.empty() ? "/" : where) + ": " + msg);
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    const std::string where = path_ + "/" + key;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(where, "expected a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(where, "expected a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail(where, "expected an integer");
        if (std::is_unsigned_v<T> && v.get<long long>() < 0) fail(where, "expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail(where, "expected a number");
      } else {
        if (!v.is_array()) fail(where, "expected an array");
        for (std::size_t i = 0; i < v.size(); ++i) {
          using E = typename T::value_type;
          const bool ok = std::is_integral_v<E> ? v[i].is_number_integer() : v[i].is_number();
          if (!ok) fail(where + "/" + std::to_string(i), "expected a number");
        }
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(where, e.what());
    }
  }

  Reader sub(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : empty, path_ + "/" + key, src_);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(path_ + "/" + k, "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::string src_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& src, const std::string& where, const std::string& msg) {
  if (!ok) throw Error(src + ": " + where + ": " + msg);
}

}  // namespace

std::string ExperimentConfig::canonical() const {
  json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  j["caps"] = {{"max_vertices", caps.max_vertices}, {"max_memory_mb", caps.max_memory_mb}};
  const auto& s = separation;
  j["separation"] = {{"schedule", s.schedule},
                     {"us", s.us},
                     {"eps", s.eps},
                     {"clique_mult", s.clique_mult},
                     {"perturbation", s.perturbation},
                     {"delta", s.delta},
                     {"kernel", s.kernel},
                     {"coupling_trials", s.coupling_trials},
                     {"quantile", s.quantile},
                     {"confidence", s.confidence},
                     {"lower_trials", s.lower_trials},
                     {"grid_lo", s.grid_lo},
                     {"grid_hi", s.grid_hi},
                     {"grid_factor", s.grid_factor},
                     {"traversal_trials", s.traversal_trials},
                     {"exit_trials", s.exit_trials}};
  j["sweep"] = {{"schedule", sweep.schedule}, {"u", sweep.u},         {"eps", sweep.eps},
                {"clique_mult", sweep.clique_mult}, {"deltas", sweep.deltas}, {"trials", sweep.trials}};
  j["clock"] = {{"m", clock.m},
                {"starts", clock.starts},
                {"hitting_trials", clock.hitting_trials},
                {"p_even_trials", clock.p_even_trials},
                {"swap_boosts", clock.swap_boosts},
                {"smoke_steps", clock.smoke_steps}};
  const auto& v = verify;
  j["verify"] = {{"path_ns", v.path_ns},
                 {"split_graphs", v.split_graphs},
                 {"tree_functions", v.tree_functions},
                 {"tree_depth", v.tree_depth},
                 {"cheeger_graphs", v.cheeger_graphs},
                 {"compare_pairs", v.compare_pairs},
                 {"exit_times", v.exit_times},
                 {"corrupt_conductance", v.corrupt_conductance}};
  return j.dump();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(source + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  ExperimentConfig c;
  Reader r(doc, "", source);
  r.get("scenario", c.scenario);
  r.get("seed", c.seed);
  r.get("out_dir", c.out_dir);
  {
    Reader s = r.sub("caps");
    s.get("max_vertices", c.caps.max_vertices);
    s.get("max_memory_mb", c.caps.max_memory_mb);
    s.finish();
  }
  {
    auto& x = c.separation;
    Reader s = r.sub("separation");
    s.get("schedule", x.schedule);
    s.get("us", x.us);
    s.get("eps", x.eps);
    s.get("clique_mult", x.clique_mult);
    s.get("perturbation", x.perturbation);
    s.get("delta", x.delta);
    s.get("kernel", x.kernel);
    s.get("coupling_trials", x.coupling_trials);
    s.get("quantile", x.quantile);
    s.get("confidence", x.confidence);
    s.get("lower_trials", x.lower_trials);
    s.get("grid_lo", x.grid_lo);
    s.get("grid_hi", x.grid_hi);
    s.get("grid_factor", x.grid_factor);
    s.get("traversal_trials", x.traversal_trials);
    s.get("exit_trials", x.exit_trials);
    s.finish();
    const std::string p = "/separation";
    check(x.perturbation == "bridges" || x.perturbation == "weights" || x.perturbation == "none", source,
          p + "/perturbation", "expected bridges, weights or none");
    check(x.kernel == "reduced" || x.kernel == "literal", source, p + "/kernel", "expected reduced or literal");
    check(x.quantile > 0 && x.quantile < 1, source, p + "/quantile", "must lie in (0, 1)");
    check(x.confidence > 0 && x.confidence < 1, source, p + "/confidence", "must lie in (0, 1)");
    check(x.grid_factor > 1, source, p + "/grid_factor", "must exceed 1");
    check(x.grid_lo > 0 && x.grid_hi > x.grid_lo, source, p + "/grid_lo", "need 0 < grid_lo < grid_hi");
    check(!x.us.empty(), source, p + "/us", "must not be empty");
    check(x.delta >= 0, source, p + "/delta", "must be non-negative");
  }
  {
    auto& x = c.sweep;
    Reader s = r.sub("sweep");
    s.get("schedule", x.schedule);
    s.get("u", x.u);
    s.get("eps", x.eps);
    s.get("clique_mult", x.clique_mult);
    s.get("deltas", x.deltas);
    s.get("trials", x.trials);
    s.finish();
    for (double d : x.deltas) check(d >= 0, source, "/sweep/deltas", "entries must be non-negative");
  }
  {
    auto& x = c.clock;
    Reader s = r.sub("clock");
    s.get("m", x.m);
    s.get("starts", x.starts);
    s.get("hitting_trials", x.hitting_trials);
    s.get("p_even_trials", x.p_even_trials);
    s.get("swap_boosts", x.swap_boosts);
    s.get("smoke_steps", x.smoke_steps);
    s.finish();
    check(x.m >= 1 && x.m <= 3, source, "/clock/m", "must lie in [1, 3]");
    for (double b : x.swap_boosts) check(b > 0, source, "/clock/swap_boosts", "entries must be positive");
  }
  {
    auto& x = c.verify;
    Reader s = r.sub("verify");
    s.get("path_ns", x.path_ns);
    s.get("split_graphs", x.split_graphs);
    s.get("tree_functions", x.tree_functions);
    s.get("tree_depth", x.tree_depth);
    s.get("cheeger_graphs", x.cheeger_graphs);
    s.get("compare_pairs", x.compare_pairs);
    s.get("exit_times", x.exit_times);
    s.get("corrupt_conductance", x.corrupt_conductance);
    s.finish();
    check(x.tree_depth >= 2, source, "/verify/tree_depth", "must be at least 2");
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace mixsens
