#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace elastmix {

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;

/// Symmetric n x n tensors are stored as full Eigen matrices; symmetry is
/// checked where it matters (constitutive maps), not enforced by the type.
template <int Dim>
using SymTensor = Eigen::Matrix<double, Dim, Dim>;

template <int Dim>
using MultiIndex = std::array<int, Dim>;

/// Thrown for invalid arguments (bad grid, bad material, wrong sizes, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine cannot deliver its contract.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Number of unordered axis pairs (i < j) in Dim dimensions.
constexpr int num_pairs(int dim) { return dim * (dim - 1) / 2; }

/// Index of pair (i, j), i < j, in lexicographic order (0,1), (0,2), ..., (1,2), ...
constexpr int pair_index(int dim, int i, int j) {
  int p = 0;
  for (int a = 0; a < i; ++a) p += dim - 1 - a;
  return p + (j - i - 1);
}

template <int Dim>
constexpr std::array<std::array<int, 2>, num_pairs(Dim)> axis_pairs() {
  std::array<std::array<int, 2>, num_pairs(Dim)> out{};
  int p = 0;
  for (int i = 0; i < Dim; ++i)
    for (int j = i + 1; j < Dim; ++j) out[p++] = {i, j};
  return out;
}

/// Pairwise (cascade) summation. The split points depend only on the length
/// of the input, so results are reproducible regardless of threading.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

namespace parallel {

/// Worker count: ELASTMIX_THREADS if set and positive, else hardware concurrency.
inline unsigned num_threads() {
  if (const char* env = std::getenv("ELASTMIX_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into at most num_threads() contiguous chunks and calls
/// fn(chunk, begin, end) for each, concurrently. Chunk boundaries are a pure
/// function of n and the thread count.
template <class Fn>
void for_chunks(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(num_threads(), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  const std::size_t step = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t c = 0; c < workers; ++c) {
      const std::size_t b = std::min(n, c * step);
      const std::size_t e = std::min(n, b + step);
      pool.emplace_back([&fn, &errors, c, b, e] {
        try {
          fn(c, b, e);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

/// Number of chunks for_chunks(n, ...) will use.
inline std::size_t num_chunks(std::size_t n) {
  return std::min<std::size_t>(num_threads(), std::max<std::size_t>(n, 1));
}

}  // namespace parallel
}  // namespace elastmix
