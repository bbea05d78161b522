#pragma once

#include <gmpxx.h>

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dgmf {

inline constexpr const char* kVersion = "0.1.0";

using BigInt = mpz_class;
using Rational = mpq_class;

/// Error taxonomy shared by the whole engine. `kind` maps onto process exit
/// codes in the CLI: usage -> 1, infeasible -> 2, violation -> 3.
class Error : public std::runtime_error {
 public:
  enum class Kind { usage = 1, infeasible = 2, violation = 3 };

  Error(Kind kind, const std::string& message, std::string payload = "{}")
      : std::runtime_error(message), kind_(kind), payload_(std::move(payload)) {}

  Kind kind() const { return kind_; }
  /// JSON text describing the failing instance (counterexample, cap, ...).
  const std::string& payload() const { return payload_; }

 private:
  Kind kind_;
  std::string payload_;
};

[[noreturn]] inline void throw_usage(const std::string& msg, std::string payload = "{}") {
  throw Error(Error::Kind::usage, msg, std::move(payload));
}
[[noreturn]] inline void throw_infeasible(const std::string& msg, std::string payload = "{}") {
  throw Error(Error::Kind::infeasible, msg, std::move(payload));
}
[[noreturn]] inline void throw_violation(const std::string& msg, std::string payload = "{}") {
  throw Error(Error::Kind::violation, msg, std::move(payload));
}

inline void check(bool ok, const std::string& msg, Error::Kind kind = Error::Kind::violation) {
  if (!ok) throw Error(kind, msg);
}

/// Resource ceilings. Sweeps that merely count may touch `state_cap` states;
/// anything stored in memory is bounded by `materialize_cap`; character-grid
/// evaluations (commuting-pair tuples) by `char_grid_cap`.
struct Caps {
  long long state_cap = 100000000;     // 1e8
  long long materialize_cap = 1000000; // 1e6
  long long char_grid_cap = 10000000;  // 1e7
  int group_order_cap = 2000;
};

inline std::uint64_t fnv1a64(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;

inline std::string hex64(std::uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = d[v & 15];
  return s;
}

// ---- deterministic parallelism ------------------------------------------
//
// Work on [0, n) is split into chunks whose boundaries depend only on n, never
// on the worker count; callers merge per-chunk results in chunk order, so any
// --threads value produces byte-identical output.

inline std::atomic<int>& worker_count_atomic() {
  static std::atomic<int> n{1};
  return n;
}
inline void set_worker_count(int n) { worker_count_atomic().store(n < 1 ? 1 : n); }
inline int worker_count() { return worker_count_atomic().load(); }

inline std::uint64_t chunk_size_for(std::uint64_t n, std::uint64_t min_chunk) {
  std::uint64_t size = (n + 255) / 256;
  if (size < min_chunk) size = min_chunk;
  return size ? size : 1;
}
inline std::uint64_t chunk_count_for(std::uint64_t n, std::uint64_t min_chunk) {
  if (n == 0) return 0;
  std::uint64_t size = chunk_size_for(n, min_chunk);
  return (n + size - 1) / size;
}

/// body(chunk_index, begin, end) is invoked once per chunk, possibly from
/// several threads, each chunk exactly once. Exceptions are rethrown.
template <class Body>
void for_chunks(std::uint64_t n, std::uint64_t min_chunk, Body&& body) {
  if (n == 0) return;
  const std::uint64_t size = chunk_size_for(n, min_chunk);
  const std::uint64_t chunks = (n + size - 1) / size;
  auto run_chunk = [&](std::uint64_t c) {
    std::uint64_t lo = c * size;
    std::uint64_t hi = lo + size < n ? lo + size : n;
    body(c, lo, hi);
  };
  int workers = worker_count();
  if (workers > static_cast<int>(chunks)) workers = static_cast<int>(chunks);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// ---- misc numeric helpers -------------------------------------------------

inline BigInt bigint_pow(const BigInt& base, unsigned long e) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

/// q^e for possibly negative e; q must be nonzero when e < 0.
inline Rational rational_pow(const Rational& q, long e) {
  if (e == 0) return Rational(1);
  BigInt num = q.get_num(), den = q.get_den();
  if (e < 0) {
    check(num != 0, "rational_pow: zero base with negative exponent");
    std::swap(num, den);
    e = -e;
  }
  Rational r(bigint_pow(num, static_cast<unsigned long>(e)),
             bigint_pow(den, static_cast<unsigned long>(e)));
  r.canonicalize();
  return r;
}

/// num/den in lowest terms.  mpq_class(a, b) does not reduce on its own, and
/// GMP comparisons and arithmetic require canonical operands.
inline Rational fraction(long long num, long long den) {
  Rational r(static_cast<long>(num), static_cast<long>(den));
  r.canonicalize();
  return r;
}

inline bool fits_u64_pow(std::uint64_t base, int exp, std::uint64_t limit) {
  std::uint64_t acc = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && acc > limit / base) return false;
    acc *= base;
  }
  return acc <= limit;
}

inline std::uint64_t u64_pow(std::uint64_t base, int exp) {
  std::uint64_t acc = 1;
  while (exp-- > 0) acc *= base;
  return acc;
}

}  // namespace dgmf
