#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace abmceg {

// Assignment of outcome indices to variables along a path prefix.  Indexed by
// variable position in the spec's declared order.  kUnset marks a variable
// that is non-applicable on the path or not yet realized.
using Context = std::vector<int>;

inline constexpr int kUnset = -1;

// Structural or semantic error in a model document or derived object.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid trajectory data.  Carries the offending 1-based data row.
class DataError : public std::runtime_error {
 public:
  DataError(long long row, const std::string& what)
      : std::runtime_error("row " + std::to_string(row) + ": " + what),
        row_(row) {}
  long long row() const { return row_; }

 private:
  long long row_;
};

// One finding of validate_partition: a reachable applicable context that is
// matched by zero clauses or by more than one.
struct Diagnostic {
  enum class Kind { kUncoveredContext, kDoublyCoveredContext };
  Kind kind;
  std::string variable;
  Context context;
  std::vector<int> clauses;  // matching clause indices; empty when uncovered
  std::string message;
};

// Kernel execution policy.  Parallel kernels are bit-identical to their
// serial references; kParallel is the default everywhere.
enum class Execution { kSerial, kParallel };

}  // namespace abmceg
