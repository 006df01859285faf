#include "kndirac/cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kndirac/tortoise_inverter.hpp"
#include "kndirac/verification.hpp"

namespace kn::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::pair<Task, const char*> task_names[] = {
    {Task::horizons, "horizons"}, {Task::tetrad_check, "tetrad-check"}, {Task::dirac_verify, "dirac-verify"},
    {Task::angular, "angular"},   {Task::radial, "radial"},             {Task::asymptotics, "asymptotics"}};

}  // namespace

const char* to_string(Task t) {
  for (auto& [task, name] : task_names)
    if (task == t) return name;
  return "?";
}

Task task_from_string(const std::string& s) {
  for (auto& [task, name] : task_names)
    if (s == name) return task;
  throw ConfigError("task: unknown task '" + s + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- config

namespace {

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
  return v;
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

void expect_object(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

cplx get_complex(const json& j, const std::string& path) {
  if (j.is_number()) return get_number(j, path);
  if (!j.is_array() || j.size() != 2) throw ConfigError(path + ": expected a number or [re, im]");
  return {get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]")};
}

ModeParams get_mode(const json& j, const std::string& path, ModeParams m) {
  expect_object(j, path, {"omega", "k", "mass", "xi"});
  if (j.contains("omega")) m.omega = get_number(j["omega"], path + ".omega");
  if (j.contains("k")) m.k = get_number(j["k"], path + ".k");
  if (j.contains("mass")) m.mass = get_number(j["mass"], path + ".mass");
  if (j.contains("xi")) m.xi = get_number(j["xi"], path + ".xi");
  return m;
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  expect_object(j, "config",
                {"task", "params", "mode", "modes", "seed", "tol", "out", "branch", "rstar", "verify", "angular",
                 "asymptotics", "x0", "threads"});
  if (j.contains("task")) c.task = task_from_string(get_string(j["task"], "task"));
  if (j.contains("params")) {
    const json& p = j["params"];
    expect_object(p, "params", {"M", "a", "Q"});
    if (p.contains("M")) c.params.M = get_number(p["M"], "params.M");
    if (p.contains("a")) c.params.a = get_number(p["a"], "params.a");
    if (p.contains("Q")) c.params.Q = get_number(p["Q"], "params.Q");
  }
  if (j.contains("mode") && j.contains("modes")) throw ConfigError("mode: give either mode or modes");
  if (j.contains("mode")) c.modes = {get_mode(j["mode"], "mode", ModeParams{0.45, 0.5, 0.2, 1.0})};
  if (j.contains("modes")) {
    const json& ms = j["modes"];
    if (!ms.is_array() || ms.empty()) throw ConfigError("modes: expected a non-empty array");
    c.modes.clear();
    for (size_t i = 0; i < ms.size(); ++i)
      c.modes.push_back(get_mode(ms[i], "modes[" + std::to_string(i) + "]", ModeParams{0.45, 0.5, 0.2, 1.0}));
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tol")) c.tol = get_number(j["tol"], "tol");
  if (j.contains("out")) c.out = get_string(j["out"], "out");
  if (j.contains("branch")) {
    try {
      c.branch = branch_from_string(get_string(j["branch"], "branch"));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("branch: ") + e.what());
    }
  }
  if (j.contains("rstar")) {
    const json& r = j["rstar"];
    expect_object(r, "rstar", {"min", "max", "step", "direction"});
    if (r.contains("min")) c.rstar_min = get_number(r["min"], "rstar.min");
    if (r.contains("max")) c.rstar_max = get_number(r["max"], "rstar.max");
    if (r.contains("step")) c.rstar_step = get_number(r["step"], "rstar.step");
    if (r.contains("direction")) {
      std::string d = get_string(r["direction"], "rstar.direction");
      if (d != "inward" && d != "outward") throw ConfigError("rstar.direction: expected inward or outward");
      c.inward = d == "inward";
    }
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    expect_object(v, "verify", {"points", "param_sets"});
    if (v.contains("points")) c.points = get_int(v["points"], "verify.points");
    if (v.contains("param_sets")) c.param_sets = get_int(v["param_sets"], "verify.param_sets");
  }
  if (j.contains("angular")) {
    const json& a = j["angular"];
    expect_object(a, "angular", {"N", "count"});
    if (a.contains("N")) c.N = get_int(a["N"], "angular.N");
    if (a.contains("count")) c.count = get_int(a["count"], "angular.count");
  }
  if (j.contains("asymptotics")) {
    const json& a = j["asymptotics"];
    expect_object(a, "asymptotics", {"per_decade"});
    if (a.contains("per_decade")) c.per_decade = get_int(a["per_decade"], "asymptotics.per_decade");
  }
  if (j.contains("x0")) {
    const json& x = j["x0"];
    if (!x.is_array() || x.size() != 2) throw ConfigError("x0: expected two components");
    c.x0 = Vec2c(get_complex(x[0], "x0[0]"), get_complex(x[1], "x0[1]"));
  }
  if (j.contains("threads")) {
    if (!j["threads"].is_number_unsigned()) throw ConfigError("threads: expected a non-negative integer");
    c.threads = j["threads"].get<unsigned>();
  }
  return c;
}

void validate(const RunConfig& c) {
  try {
    validate(c.params);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  for (size_t i = 0; i < c.modes.size(); ++i) {
    try {
      validate(c.modes[i]);
    } catch (const DomainError& e) {
      throw ConfigError("modes[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (!(c.tol >= 1e-13 && c.tol <= 1e-6)) throw ConfigError("tol: must lie in [1e-13, 1e-6]");
  if (c.out.empty()) throw ConfigError("out: empty output directory");
  if (c.points < 1 || c.points > 100000) throw ConfigError("verify.points: must lie in [1, 100000]");
  if (c.param_sets < 1 || c.param_sets > 1000) throw ConfigError("verify.param_sets: must lie in [1, 1000]");
  if (c.N < 8 || c.N > 1024) throw ConfigError("angular.N: must lie in [8, 1024]");
  if (c.count < 1 || c.count > c.N) throw ConfigError("angular.count: must lie in [1, N]");
  if (c.per_decade < 2 || c.per_decade > 1000) throw ConfigError("asymptotics.per_decade: must lie in [2, 1000]");
  if (c.rstar_step < 0.0) throw ConfigError("rstar.step: must be positive");
  if (c.rstar_min && c.rstar_max && !(*c.rstar_min < *c.rstar_max))
    throw ConfigError("rstar: need min < max");
  if (c.x0.norm() == 0.0) throw ConfigError("x0: must be non-zero");
  auto h = horizons(c.params);
  bool needs_interior = (c.task == Task::radial || c.task == Task::asymptotics) && c.branch == Branch::interior;
  if (needs_interior && h.r_minus == 0.0) throw ConfigError("params: the interior branch needs a^2 + Q^2 > 0");
  if (c.task == Task::asymptotics && c.branch == Branch::exterior) {
    for (size_t i = 0; i < c.modes.size(); ++i)
      if (!(std::abs(c.modes[i].omega) > c.modes[i].mass))
        throw ConfigError("modes[" + std::to_string(i) + "]: the large-u fit needs |omega| > mass");
    double hi = c.rstar_max.value_or(2e6), lo = c.rstar_min.value_or(1e3);
    if (hi < 1e4) throw ConfigError("rstar.max: the large-u fit needs rstar.max >= 1e4");
    if (!(lo > 0.0 && lo <= hi / 100)) throw ConfigError("rstar.min: need 0 < min <= max / 100");
  }
}

// ---------------------------------------------------------------- output

namespace {

void emit(const json& j, std::string& out, int depth) {
  auto pad = [&](int d) { out.append(2 * d, ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        pad(depth + 1);
        out += json(it.key()).dump() + ": ";
        emit(it.value(), out, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      pad(depth);
      out += "}";
      return;
    }
    case json::value_t::array: {
      bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], out, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        pad(depth + 1);
        emit(j[i], out, depth + 1);
        out += i + 1 < j.size() ? ",\n" : "\n";
      }
      pad(depth);
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string to_text(const json& j) {
  std::string s;
  emit(j, s, 0);
  s += "\n";
  return s;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }
json vjson(const Vec2c& v) { return json::array({cjson(v(0)), cjson(v(1))}); }

json params_json(const SpacetimeParams& p) { return {{"M", p.M}, {"a", p.a}, {"Q", p.Q}}; }

json mode_json(const ModeParams& m) {
  return {{"omega", m.omega}, {"k", m.k}, {"mass", m.mass}, {"xi", m.xi}};
}

json check_json(const verify::Check& c) {
  json j{{"name", c.name}, {"value", c.value}};
  if (std::isfinite(c.lo)) j["min"] = c.lo;
  if (std::isfinite(c.hi)) j["max"] = c.hi;
  j["pass"] = c.pass;
  return j;
}

json report_json(const verify::Report& r) {
  json checks = json::array();
  for (auto& c : r.checks) checks.push_back(check_json(c));
  return {{"suite", r.name}, {"pass", r.pass()}, {"checks", checks}};
}

json stats_json(const IntegratorStats& s) {
  return {{"steps", s.steps}, {"rejected", s.rejected}, {"tol", s.tol}, {"abs_tol", s.abs_tol}};
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Csv {
 public:
  explicit Csv(const std::string& header) : text_(header + "\n") {}
  Csv& operator<<(double v) {
    sep();
    text_ += format_double(v);
    return *this;
  }
  Csv& operator<<(int v) {
    sep();
    text_ += std::to_string(v);
    return *this;
  }
  Csv& operator<<(size_t v) {
    sep();
    text_ += std::to_string(v);
    return *this;
  }
  Csv& operator<<(cplx z) { return *this << z.real() << z.imag(); }
  void end() {
    text_ += "\n";
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  void sep() {
    if (!fresh_) text_ += ",";
    fresh_ = false;
  }
  std::string text_;
  bool fresh_ = true;
};

struct TaskOutput {
  json record;
  std::vector<std::pair<std::string, std::string>> tables;  // file name, CSV text
  std::vector<verify::Report> reports;
};

// f(i) for i < n on a small pool; results land in caller-owned slots, the
// lowest-index failure is rethrown so errors do not depend on scheduling
template <class F>
void for_each_index(size_t n, unsigned threads, F&& f) {
  unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  t = static_cast<unsigned>(std::min<size_t>(t, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (size_t i = 0; i < n; ++i)
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const DomainError& e) {
        throw DomainError("mode " + std::to_string(i) + ": " + e.what());
      } catch (const NumericalError& e) {
        throw NumericalError("mode " + std::to_string(i) + ": " + e.what());
      }
    }
}

json base_record(const RunConfig& c) {
  return {{"task", to_string(c.task)}, {"params", params_json(c.params)}};
}

// ---------------------------------------------------------------- tasks

TaskOutput task_horizons(const RunConfig& c) {
  TaskOutput o;
  o.record = base_record(c);
  auto h = horizons(c.params);
  o.record["r_minus"] = h.r_minus;
  o.record["r_plus"] = h.r_plus;
  if (h.r_minus > 0.0) {
    o.record["cauchy_decay_rate"] = horizon_alpha(c.params);
    o.record["omega_minus"] = horizon_omega_minus(c.params);
  }
  return o;
}

TaskOutput task_tetrad(const RunConfig& c) {
  TaskOutput o;
  o.record = base_record(c);
  o.record.erase("params");
  o.record["seed"] = c.seed;
  o.record["points"] = c.points;
  o.reports.push_back(verify::tetrad(c.seed, c.points));
  o.reports.push_back(verify::temporal(c.seed + 1, c.param_sets));
  return o;
}

TaskOutput task_dirac(const RunConfig& c) {
  TaskOutput o;
  o.record = base_record(c);
  o.record.erase("params");
  o.record["seed"] = c.seed;
  o.record["points"] = c.points;
  o.reports.push_back(verify::clifford(c.seed, c.points));
  o.reports.push_back(verify::spin_connection(c.seed + 1, c.points));
  o.reports.push_back(verify::transformed_operator(c.seed + 2, c.points));
  o.reports.push_back(verify::separation(c.seed + 3, c.points));
  return o;
}

TaskOutput task_angular(const RunConfig& c) {
  struct Slot {
    std::vector<AngularEigenpair> pairs;
    verify::Report report;
  };
  std::vector<Slot> slots(c.modes.size());
  for_each_index(c.modes.size(), c.threads, [&](size_t i) {
    const auto& mode = c.modes[i];
    auto pairs = angular_eigenpairs(mode, c.params, {c.N}, c.count);
    auto fine = angular_eigenpairs(mode, c.params, {2 * c.N}, c.count);
    double imag = 0.0, conv = 0.0, gap = verify::unbounded;
    for (size_t j = 0; j < pairs.size(); ++j) {
      imag = std::max(imag, pairs[j].imag_residual);
      conv = std::max(conv, std::abs(pairs[j].xi - fine[j].xi));
      if (j) gap = std::min(gap, pairs[j].xi - pairs[j - 1].xi);
    }
    verify::Report r{"angular mode " + std::to_string(i),
                     {verify::below("max_imag_part", imag, 1e-8),
                      verify::below("gram_deviation", verify::gram_deviation(pairs), 1e-8),
                      verify::below("self_convergence_N_2N", conv, 1e-8)}};
    if (pairs.size() > 1) r.checks.push_back(verify::above("min_gap", gap, 1e-6));
    slots[i] = {std::move(pairs), std::move(r)};
  });
  TaskOutput o;
  o.record = base_record(c);
  o.record["N"] = c.N;
  Csv spec("mode,n,xi,imag_residual");
  Csv eig("mode,n,theta,re_y1,im_y1,re_y2,im_y2");
  json modes = json::array();
  for (size_t i = 0; i < slots.size(); ++i) {
    json xi = json::array(), ns = json::array();
    for (const auto& e : slots[i].pairs) {
      xi.push_back(e.xi);
      ns.push_back(e.n);
      spec << i << e.n << e.xi << e.imag_residual;
      spec.end();
      for (size_t t = 0; t < e.theta.size(); ++t) {
        eig << i << e.n << e.theta[t] << e.Y[t](0) << e.Y[t](1);
        eig.end();
      }
    }
    modes.push_back({{"mode", mode_json(c.modes[i])}, {"n", ns}, {"xi", xi}});
    o.reports.push_back(slots[i].report);
  }
  o.record["modes"] = modes;
  o.tables = {{"angular_spectrum.csv", spec.text()}, {"angular_eigenfunctions.csv", eig.text()}};
  return o;
}

std::vector<double> radial_grid(const RunConfig& c) {
  double lo, hi;
  if (c.branch == Branch::exterior) {
    lo = c.rstar_min.value_or(-50.0);
    hi = c.rstar_max.value_or(500.0);
  } else {
    TortoiseInverter inv(c.params, Branch::interior);
    lo = c.rstar_min.value_or(inv.rstar_mid());
    hi = c.rstar_max.value_or(horizon_span_end(c.params));
  }
  if (!(lo < hi)) throw ConfigError("rstar: need min < max");
  double step = c.rstar_step > 0.0 ? c.rstar_step : (hi - lo) / 2000.0;
  if ((hi - lo) / step > 1e7) throw ConfigError("rstar.step: more than 1e7 samples");
  return c.inward ? linear_samples(hi, lo, step) : linear_samples(lo, hi, step);
}

TaskOutput task_radial(const RunConfig& c) {
  auto grid = radial_grid(c);
  std::vector<FundamentalTrajectory> slots(c.modes.size());
  for_each_index(c.modes.size(), c.threads, [&](size_t i) {
    slots[i] = integrate_fundamental(c.modes[i], c.params, c.branch, grid, Mat2c::Identity(), c.tol);
  });
  TaskOutput o;
  o.record = base_record(c);
  o.record["branch"] = to_string(c.branch);
  o.record["tol"] = c.tol;
  o.record["x0"] = vjson(c.x0);
  o.record["rstar_start"] = grid.front();
  o.record["rstar_end"] = grid.back();
  o.record["samples"] = grid.size();
  Csv tab("mode,rstar,r,re_x1,im_x1,re_x2,im_x2");
  json modes = json::array();
  for (size_t i = 0; i < slots.size(); ++i) {
    auto X = verify::combine(slots[i], c.x0);
    for (size_t t = 0; t < X.X.size(); ++t) {
      tab << i << X.rstar[t] << X.r[t] << X.X[t](0) << X.X[t](1);
      tab.end();
    }
    modes.push_back({{"mode", mode_json(c.modes[i])},
                     {"rotating_frame", slots[i].rotating},
                     {"stats", stats_json(slots[i].stats)},
                     {"abel_drift", slots[i].abel_drift},
                     {"x_end", vjson(X.X.back())}});
    o.reports.push_back(
        {"radial mode " + std::to_string(i), {verify::below("abel_drift", slots[i].abel_drift, 10 * c.tol)}});
  }
  o.record["modes"] = modes;
  o.tables = {{"radial_trajectory.csv", tab.text()}};
  return o;
}

bool is_real(const Vec2c& v) {
  return std::abs(v(0).imag()) <= 1e-8 * v.norm() && std::abs(v(1).imag()) <= 1e-8 * v.norm();
}

TaskOutput task_asymptotics(const RunConfig& c) {
  TaskOutput o;
  o.record = base_record(c);
  o.record["branch"] = to_string(c.branch);
  o.record["tol"] = c.tol;
  o.record["x0"] = vjson(c.x0);
  json modes = json::array();
  if (c.branch == Branch::exterior) {
    verify::InfinityCheckOptions opt;
    opt.u_start = c.rstar_max.value_or(2e6);
    opt.u_end = c.rstar_min.value_or(1e3);
    opt.per_decade = c.per_decade;
    opt.tol = c.tol;
    opt.fit.window_lo = opt.u_end;
    opt.fit.window_hi = opt.u_start / 2;
    std::vector<verify::InfinityCheck> slots(c.modes.size());
    for_each_index(c.modes.size(), c.threads,
                   [&](size_t i) { slots[i] = verify::infinity_check(c.modes[i], c.params, c.x0, opt); });
    o.record["u_start"] = opt.u_start;
    o.record["u_end"] = opt.u_end;
    Csv tab("mode,u,residual,residual_without_log_phase");
    for (size_t i = 0; i < slots.size(); ++i) {
      const auto& f = slots[i].fit;
      for (size_t t = 0; t < f.u.size(); ++t) {
        tab << i << f.u[t] << f.residual[t] << f.residual_ablated[t];
        tab.end();
      }
      modes.push_back({{"mode", mode_json(c.modes[i])},
                       {"w1", cjson(f.w.w1)},
                       {"theta", cjson(f.boost.Theta)},
                       {"f_inf", vjson(f.f_inf)},
                       {"f_inf_real", is_real(f.f_inf)},
                       {"f_inf_without_log_phase", vjson(f.f_inf_ablated)},
                       {"slope", f.slope},
                       {"slope_without_log_phase", f.slope_ablated},
                       {"c", f.c},
                       {"f_tail_variation", f.f_tail_variation},
                       {"window", json::array({f.window_lo, f.window_hi})},
                       {"abel_drift", slots[i].fundamental.abel_drift},
                       {"stats", stats_json(slots[i].fundamental.stats)}});
      auto r = slots[i].report;
      r.name = "asymptotics mode " + std::to_string(i);
      o.reports.push_back(r);
    }
    o.tables = {{"asymptotics_infinity.csv", tab.text()}};
  } else {
    std::vector<verify::HorizonCheck> slots(c.modes.size());
    for_each_index(c.modes.size(), c.threads,
                   [&](size_t i) { slots[i] = verify::horizon_check(c.modes[i], c.params, c.x0, c.tol); });
    Csv tab("mode,u,error");
    for (size_t i = 0; i < slots.size(); ++i) {
      const auto& f = slots[i].fit;
      for (size_t t = 0; t < f.u.size(); ++t) {
        tab << i << f.u[t] << f.error[t];
        tab.end();
      }
      modes.push_back({{"mode", mode_json(c.modes[i])},
                       {"h", vjson(f.h)},
                       {"h_real", is_real(f.h)},
                       {"alpha", f.alpha},
                       {"omega_minus", f.omega_minus},
                       {"phase_rate", f.phase_rate},
                       {"rate", f.rate},
                       {"window", json::array({f.window_lo, f.window_hi})},
                       {"cauchy_shift", f.cauchy_shift},
                       {"cauchy_rate", f.cauchy_rate},
                       {"abel_drift", slots[i].fundamental.abel_drift},
                       {"stats", stats_json(slots[i].fundamental.stats)}});
      auto r = slots[i].report;
      r.name = "asymptotics mode " + std::to_string(i);
      o.reports.push_back(r);
    }
    o.tables = {{"asymptotics_horizon.csv", tab.text()}};
  }
  o.record["modes"] = modes;
  return o;
}

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
  std::string tag = to_string(c.task);
  try {
    validate(c);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return exit_config;
  }
  TaskOutput o;
  try {
    switch (c.task) {
      case Task::horizons: o = task_horizons(c); break;
      case Task::tetrad_check: o = task_tetrad(c); break;
      case Task::dirac_verify: o = task_dirac(c); break;
      case Task::angular: o = task_angular(c); break;
      case Task::radial: o = task_radial(c); break;
      case Task::asymptotics: o = task_asymptotics(c); break;
    }
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    log << tag << ": numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }

  bool pass = true;
  json reports = json::array();
  for (const auto& r : o.reports) {
    pass = pass && r.pass();
    reports.push_back(report_json(r));
    for (const auto& ch : r.checks) {
      log << (ch.pass ? "PASS " : "FAIL ") << r.name << ": " << ch.name << " = " << format_double(ch.value);
      if (std::isfinite(ch.lo) && std::isfinite(ch.hi))
        log << " in [" << format_double(ch.lo) << ", " << format_double(ch.hi) << "]";
      else if (std::isfinite(ch.hi))
        log << " < " << format_double(ch.hi);
      else
        log << " > " << format_double(ch.lo);
      log << "\n";
    }
  }
  if (!o.reports.empty()) {
    o.record["verifications"] = reports;
    o.record["pass"] = pass;
  }

  try {
    fs::path dir(c.out);
    fs::create_directories(dir);
    write_atomic(dir / (tag + ".json"), to_text(o.record));
    for (const auto& [name, text] : o.tables) write_atomic(dir / name, text);
  } catch (const std::exception& e) {
    log << "configuration error: out: " << e.what() << "\n";
    return exit_config;
  }
  log << "wrote " << (fs::path(c.out) / (tag + ".json")).string();
  for (const auto& t : o.tables) log << ", " << t.first;
  log << "\n";
  return pass ? exit_ok : exit_verification;
}

int main(int argc, char** argv) {
  CLI::App app{"Dirac modes on Kerr-Newman: verification suites, angular spectra, radial asymptotics"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out, branch;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, omega, k, mass, xi, M, a, Q, rmin, rmax;
  for (auto& [task, name] : task_names) {
    (void)task;
    auto* sc = app.add_subcommand(name);
    sc->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sc->add_option("--out", out, "output directory");
    sc->add_option("--seed", seed, "seed for sampled points and modes");
    sc->add_option("--tol", tol, "integrator relative tolerance");
    sc->add_option("--omega", omega);
    sc->add_option("--k", k);
    sc->add_option("--mass", mass);
    sc->add_option("--xi", xi);
    sc->add_option("--M", M);
    sc->add_option("--a", a);
    sc->add_option("--Q", Q);
    sc->add_option("--rstar-min", rmin);
    sc->add_option("--rstar-max", rmax);
    sc->add_option("--branch", branch)->check(CLI::IsMember({"exterior", "interior"}));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      c = parse_config(ss.str());
    }
    c.task = task_from_string(app.get_subcommands().front()->get_name());
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return exit_config;
  }
  if (out) c.out = *out;
  if (seed) c.seed = *seed;
  if (tol) c.tol = *tol;
  if (M) c.params.M = *M;
  if (a) c.params.a = *a;
  if (Q) c.params.Q = *Q;
  if (rmin) c.rstar_min = *rmin;
  if (rmax) c.rstar_max = *rmax;
  if (branch) c.branch = branch_from_string(*branch);
  for (auto& m : c.modes) {
    if (omega) m.omega = *omega;
    if (k) m.k = *k;
    if (mass) m.mass = *mass;
    if (xi) m.xi = *xi;
  }
  return run(c, std::cout);
}

}  // namespace kn::cli
