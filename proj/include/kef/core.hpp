#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kef {

// Error taxonomy shared by every module. The CLI maps ConfigError to exit 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct InconsistencyError : Error {
  using Error::Error;
};
struct TruncationError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};

using Values = std::vector<double>;

// Fixed-order pairwise summation; the split points depend only on the length,
// so the result is independent of how the caller schedules work.
double pairwise_sum(std::span<const double> x);
double weighted_sum(std::span<const double> w, std::span<const double> x);
double weighted_sum(std::span<const double> w, std::span<const double> x,
                    std::span<const double> y);

// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

double max_abs(std::span<const double> x);
double min_value(std::span<const double> x);

Values axpby(double a, const Values& x, double b, const Values& y);
Values hadamard(const Values& x, const Values& y);

// Log of a pointwise positive quantity; throws DomainError below the guard.
Values guarded_log(const Values& x, double guard, const char* what);
Values exp_values(const Values& x);

}  // namespace kef
