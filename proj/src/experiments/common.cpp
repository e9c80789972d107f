#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Core>

#include "common.hpp"
#include "kef/functionals.hpp"

namespace kef::exp {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  int w = std::max(1, std::min<int>(workers, int(n)));
  if (w == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double relative_residual(double x, double y, double scale) {
  double d = std::abs(x - y);
  double s = std::max({std::abs(x), std::abs(y), std::abs(scale)});
  if (s == 0.0) return d == 0.0 ? 0.0 : INFINITY;
  return d / s;
}

double continuity_t1(int n) {
  double t1 = 0.0;
  for (int j = 1; j <= n - 1; ++j) {
    double coef = (n - 1) * binom(n - 1, j);
    if (coef < n) continue;
    t1 = std::max(t1, 1.0 - std::pow(double(n) / coef, 1.0 / j));
  }
  return t1;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"identity", "inequality", "mto",
                                                 "continuity", "witness", "futaki"};
  return names;
}

SuiteReport run_suite(const SuiteConfig& c) {
  validate(c);
  if (c.suite == "identity") return identity_suite(c);
  if (c.suite == "inequality") return inequality_suite(c);
  if (c.suite == "mto") return mto_suite(c);
  if (c.suite == "continuity") return continuity_suite(c);
  if (c.suite == "witness") return witness_suite(c);
  if (c.suite == "futaki") return futaki_suite(c);
  throw ConfigError("config key 'run.suite': unknown suite '" + c.suite + "'");
}

namespace detail {

std::vector<CaseRecord> run_cases(std::size_t n, int workers,
                                  const std::function<std::string(std::size_t)>& id,
                                  const std::function<void(std::size_t, CaseRecord&)>& fn) {
  std::vector<CaseRecord> out(n);
  parallel_for(n, resolve_workers(workers), [&](std::size_t i) {
    out[i].id = id(i);
    try {
      fn(i, out[i]);
    } catch (const Error& e) {
      out[i].diagnostic = e.what();
    }
  });
  return out;
}

SuiteReport start_report(const SuiteConfig& c, const std::string& suite) {
  SuiteReport r;
  r.suite = suite;
  r.config = config_to_json(c);
  return r;
}

void finish_report(SuiteReport& r, const SuiteConfig& c, const SuiteClock& clock) {
  r.environment["compiler"] = __VERSION__;
  r.environment["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION);
#ifdef KEF_BUILD_TYPE
  r.environment["build_type"] = KEF_BUILD_TYPE;
#endif
  r.environment["workers"] = resolve_workers(c.workers);
  r.environment["hardware_concurrency"] = std::thread::hardware_concurrency();
  r.timing["wall_seconds"] = clock.seconds();
}

std::string case_id(const char* prefix, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, i);
  return buf;
}

}  // namespace detail
}  // namespace kef::exp
