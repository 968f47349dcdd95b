#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace geoline {

using Json = nlohmann::ordered_json;

// ---- seeding: trial k of seed s is reproducible on its own
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + k);
}

using Rng = std::mt19937_64;

// ---- worker count
inline int worker_count() {
  int hw = int(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* e = std::getenv("GEOLINE_THREADS")) {
    int v = std::atoi(e);
    if (v > 0) return std::min(v, 256);
  }
  return hw;
}

// runs fn(i) for i in [0,count); results land by index so reductions do not depend on scheduling
template <class R>
std::vector<R> parallel_map(int count, const std::function<R(int)>& fn, int threads = 0) {
  std::vector<R> out(count);
  if (threads <= 0) threads = worker_count();
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---- checks
struct Check {
  std::string name;
  double value = 0;
  double tol = 0;
  bool at_least = false;  // value >= tol instead of value <= tol
  bool gated = true;
  bool pass = false;
};

class CheckList {
 public:
  explicit CheckList(const std::map<std::string, double>& overrides = {}) : overrides_(overrides) {}

  // full name first ("n2_c1.scalar_max"), then the bare metric name ("scalar_max")
  double tol(const std::string& name, double def) const {
    auto it = overrides_.find(name);
    if (it != overrides_.end()) return it->second;
    auto dot = name.rfind('.');
    if (dot != std::string::npos) {
      it = overrides_.find(name.substr(dot + 1));
      if (it != overrides_.end()) return it->second;
    }
    return def;
  }
  bool at_most(const std::string& name, double value, double def, bool gated = true) {
    return add(name, value, tol(name, def), false, gated);
  }
  bool at_least(const std::string& name, double value, double def, bool gated = true) {
    return add(name, value, tol(name, def), true, gated);
  }
  bool pass() const {
    for (const auto& c : checks_)
      if (c.gated && !c.pass) return false;
    return true;
  }
  const std::vector<Check>& checks() const { return checks_; }
  Json to_json() const {
    Json a = Json::array();
    for (const auto& c : checks_)
      a.push_back(Json{{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"relation", c.at_least ? ">=" : "<="},
                       {"gated", c.gated}, {"pass", c.pass}});
    return a;
  }

 private:
  bool add(const std::string& name, double value, double t, bool at_least, bool gated) {
    bool ok = std::isfinite(value) && (at_least ? value >= t : value <= t);
    checks_.push_back({name, value, t, at_least, gated, ok});
    return ok;
  }
  std::map<std::string, double> overrides_;
  std::vector<Check> checks_;
};

// ---- JSON text with 17 significant digits for every float
namespace detail {

inline void escape_into(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

inline void dump_json(std::string& out, const Json& j, int indent, int level) {
  auto nl = [&](int lv) {
    out += '\n';
    out.append(std::size_t(lv * indent), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        nl(level + 1);
        escape_into(out, it.key());
        out += ": ";
        dump_json(out, it.value(), indent, level + 1);
      }
      nl(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        nl(level + 1);
        dump_json(out, v, indent, level + 1);
      }
      nl(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      // keep it a float on re-read
      if (std::string(buf).find_first_of(".eEn") == std::string::npos) out += ".0";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_report(const Json& j) {
  std::string s;
  detail::dump_json(s, j, 2, 0);
  s += '\n';
  return s;
}

// everything except the timestamp
inline Json strip_volatile(Json j) {
  if (j.is_object()) {
    j.erase("timestamp");
    for (auto& [k, v] : j.items()) v = strip_volatile(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_volatile(v);
  }
  return j;
}

inline std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
  return a;
}

}  // namespace geoline
