#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "kef/experiments.hpp"

namespace kef::exp::detail {

// Fills records[i] through fn; a kef::Error thrown by fn becomes the
// diagnostic of that record.
std::vector<CaseRecord> run_cases(std::size_t n, int workers,
                                  const std::function<std::string(std::size_t)>& id,
                                  const std::function<void(std::size_t, CaseRecord&)>& fn);

class SuiteClock {
 public:
  SuiteClock() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

SuiteReport start_report(const SuiteConfig& c, const std::string& suite);
void finish_report(SuiteReport& r, const SuiteConfig& c, const SuiteClock& clock);

std::string case_id(const char* prefix, std::size_t i);

}  // namespace kef::exp::detail
