#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace dcshift::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

std::string to_string(Status status);

/// Nonbasic variables sit at a bound (or at zero when free).
enum class BasisStatus : std::uint8_t { basic, at_lower, at_upper, free_nonbasic };

struct Entry {
  int index = 0;
  double value = 0.0;
};

/// min c'x  s.t.  row_lower <= A x <= row_upper,  col_lower <= x <= col_upper.
class Model {
 public:
  int add_column(double cost, double lower, double upper);
  /// Duplicate column entries are summed; zeros are dropped.
  int add_row(double lower, double upper, std::vector<Entry> entries);

  void set_cost(int col, double cost) { cost_[col] = cost; }
  void set_column_bounds(int col, double lower, double upper);
  void set_row_bounds(int row, double lower, double upper);

  int num_columns() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  double cost(int col) const { return cost_[col]; }
  double col_lower(int col) const { return col_lower_[col]; }
  double col_upper(int col) const { return col_upper_[col]; }
  double row_lower(int row) const { return row_lower_[row]; }
  double row_upper(int row) const { return row_upper_[row]; }
  const std::vector<Entry>& row(int r) const { return rows_[r]; }

 private:
  std::vector<double> cost_, col_lower_, col_upper_;
  std::vector<double> row_lower_, row_upper_;
  std::vector<std::vector<Entry>> rows_;
};

struct Options {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int max_iterations = 100000;
  int refactor_interval = 64;
};

struct Result {
  Status status = Status::numerical_failure;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> row_activity;
  /// d(objective)/d(row bound) for the active bound of each row.
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  std::vector<BasisStatus> col_status;
  std::vector<BasisStatus> row_status;
  int iterations = 0;
};

/// Bounded-variable primal simplex on a dense basis inverse. Deterministic:
/// the same model always yields the same vertex.
Result solve(const Model& model, const Options& options = {});

}  // namespace dcshift::lp
