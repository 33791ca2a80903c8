#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "dcshift/lp.hpp"

namespace dcshift::lp {

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
    case Status::iteration_limit:
      return "iteration_limit";
    case Status::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

int Model::add_column(double cost, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  cost_.push_back(cost);
  col_lower_.push_back(lower);
  col_upper_.push_back(upper);
  return num_columns() - 1;
}

int Model::add_row(double lower, double upper, std::vector<Entry> entries) {
  if (lower > upper) throw std::invalid_argument("row lower bound exceeds upper bound");
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  std::vector<Entry> merged;
  for (const auto& e : entries) {
    if (e.index < 0 || e.index >= num_columns())
      throw std::out_of_range("row entry references unknown column");
    if (!merged.empty() && merged.back().index == e.index)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const Entry& e) { return e.value == 0.0; });
  rows_.push_back(std::move(merged));
  row_lower_.push_back(lower);
  row_upper_.push_back(upper);
  return num_rows() - 1;
}

void Model::set_column_bounds(int col, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("column lower bound exceeds upper bound");
  col_lower_[col] = lower;
  col_upper_[col] = upper;
}

void Model::set_row_bounds(int row, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("row lower bound exceeds upper bound");
  row_lower_[row] = lower;
  row_upper_[row] = upper;
}

namespace {

// Computational form: [A  -I  S] z = 0 with structurals, one logical per row
// (its value is the row activity) and one artificial per row for phase 1.
class Simplex {
 public:
  Simplex(const Model& model, const Options& options)
      : model_(model), opt_(options), n_(model.num_columns()), m_(model.num_rows()) {}

  Result run();

 private:
  enum class Outcome { optimal, unbounded, iteration_limit, singular };

  int logical(int r) const { return n_ + r; }
  int artificial(int r) const { return n_ + m_ + r; }
  bool is_artificial(int v) const { return v >= n_ + m_; }
  bool fixed(int v) const { return lo_[v] == up_[v]; }
  double* binv_row(int k) { return binv_.data() + static_cast<std::size_t>(k) * m_; }

  void initialise();
  Outcome iterate(const std::vector<double>& cost);
  bool refactor();
  void compute_duals(const std::vector<double>& cost, std::vector<double>& y);
  double reduced_cost(int v, const std::vector<double>& cost, const std::vector<double>& y) const;
  void column(int v, std::vector<double>& alpha);
  // Returns the leaving position (or -1 for a bound flip / m_ for unbounded).
  int ratio_test(int q, int dir, const std::vector<double>& alpha, double& step, bool bland);
  void apply_step(int q, int dir, double step, const std::vector<double>& alpha);
  void pivot(int q, int r, const std::vector<double>& alpha);
  void drive_out_artificials();
  void pivot_in_free_columns(const std::vector<double>& cost);

  const Model& model_;
  Options opt_;
  int n_, m_;
  std::vector<std::vector<Entry>> cols_;
  std::vector<double> lo_, up_, x_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_, pos_;
  std::vector<double> binv_;
  int since_refactor_ = 0;
  int iterations_ = 0;
};

void Simplex::initialise() {
  const int total = n_ + 2 * m_;
  cols_.assign(total, {});
  lo_.assign(total, 0.0);
  up_.assign(total, 0.0);
  x_.assign(total, 0.0);
  status_.assign(total, BasisStatus::at_lower);
  head_.assign(m_, -1);
  pos_.assign(total, -1);
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);

  for (int r = 0; r < m_; ++r)
    for (const auto& e : model_.row(r)) cols_[e.index].push_back({r, e.value});

  for (int j = 0; j < n_; ++j) {
    lo_[j] = model_.col_lower(j);
    up_[j] = model_.col_upper(j);
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      status_[j] = BasisStatus::at_lower;
    } else if (std::isfinite(up_[j])) {
      x_[j] = up_[j];
      status_[j] = BasisStatus::at_upper;
    } else {
      x_[j] = 0.0;
      status_[j] = BasisStatus::free_nonbasic;
    }
  }

  for (int r = 0; r < m_; ++r) {
    double activity = 0.0;
    for (const auto& e : model_.row(r)) activity += e.value * x_[e.index];
    const int w = logical(r), a = artificial(r);
    lo_[w] = model_.row_lower(r);
    up_[w] = model_.row_upper(r);
    cols_[w] = {{r, -1.0}};
    const double tol = opt_.primal_tolerance * (1.0 + std::abs(activity));
    if (activity >= lo_[w] - tol && activity <= up_[w] + tol) {
      x_[w] = activity;
      status_[w] = BasisStatus::basic;
      head_[r] = w;
      pos_[w] = r;
      binv_row(r)[r] = -1.0;
      cols_[a] = {{r, 1.0}};
      lo_[a] = up_[a] = x_[a] = 0.0;
      status_[a] = BasisStatus::at_lower;
    } else {
      const bool below = activity < lo_[w];
      const double bound = below ? lo_[w] : up_[w];
      x_[w] = bound;
      status_[w] = below ? BasisStatus::at_lower : BasisStatus::at_upper;
      const double sigma = bound - activity > 0.0 ? 1.0 : -1.0;
      cols_[a] = {{r, sigma}};
      lo_[a] = 0.0;
      up_[a] = kInf;
      x_[a] = std::abs(bound - activity);
      status_[a] = BasisStatus::basic;
      head_[r] = a;
      pos_[a] = r;
      binv_row(r)[r] = sigma;
    }
  }
}

bool Simplex::refactor() {
  since_refactor_ = 0;
  if (m_ == 0) return true;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m_, m_);
  for (int k = 0; k < m_; ++k)
    for (const auto& e : cols_[head_[k]]) basis(e.index, k) = e.value;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= 1e-12 * std::max(1.0, diag.maxCoeff())) return false;
  Eigen::MatrixXd inv = lu.inverse();
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i) binv_row(k)[i] = inv(k, i);

  std::vector<double> rhs(m_, 0.0);
  for (int v = 0; v < static_cast<int>(x_.size()); ++v) {
    if (pos_[v] >= 0 || x_[v] == 0.0) continue;
    for (const auto& e : cols_[v]) rhs[e.index] -= e.value * x_[v];
  }
  for (int k = 0; k < m_; ++k) {
    const double* row = binv_row(k);
    double value = 0.0;
    for (int i = 0; i < m_; ++i) value += row[i] * rhs[i];
    x_[head_[k]] = value;
  }
  return true;
}

void Simplex::compute_duals(const std::vector<double>& cost, std::vector<double>& y) {
  y.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    const double cb = cost[head_[k]];
    if (cb == 0.0) continue;
    const double* row = binv_row(k);
    for (int i = 0; i < m_; ++i) y[i] += cb * row[i];
  }
}

double Simplex::reduced_cost(int v, const std::vector<double>& cost,
                             const std::vector<double>& y) const {
  double d = cost[v];
  for (const auto& e : cols_[v]) d -= y[e.index] * e.value;
  return d;
}

void Simplex::column(int v, std::vector<double>& alpha) {
  alpha.assign(m_, 0.0);
  for (const auto& e : cols_[v]) {
    for (int k = 0; k < m_; ++k) alpha[k] += binv_row(k)[e.index] * e.value;
  }
}

int Simplex::ratio_test(int q, int dir, const std::vector<double>& alpha, double& step,
                        bool bland) {
  const double ftol = opt_.primal_tolerance;
  const double ptol = opt_.pivot_tolerance;
  double relaxed = kInf;
  for (int k = 0; k < m_; ++k) {
    const double rate = alpha[k] * dir;  // basic value moves by -rate * step
    const int v = head_[k];
    if (rate > ptol && std::isfinite(lo_[v]))
      relaxed = std::min(relaxed, (x_[v] - lo_[v] + ftol) / rate);
    else if (rate < -ptol && std::isfinite(up_[v]))
      relaxed = std::min(relaxed, (up_[v] - x_[v] + ftol) / -rate);
  }
  const double flip = std::isfinite(lo_[q]) && std::isfinite(up_[q]) ? up_[q] - lo_[q] : kInf;
  if (!std::isfinite(relaxed) && !std::isfinite(flip)) return m_;

  int leave = -1;
  double best = 0.0;
  double chosen = kInf;
  for (int k = 0; k < m_; ++k) {
    const double rate = alpha[k] * dir;
    const int v = head_[k];
    double ratio;
    if (rate > ptol && std::isfinite(lo_[v]))
      ratio = (x_[v] - lo_[v]) / rate;
    else if (rate < -ptol && std::isfinite(up_[v]))
      ratio = (up_[v] - x_[v]) / -rate;
    else
      continue;
    ratio = std::max(ratio, 0.0);
    if (bland) {
      if (ratio < chosen - 1e-12 || (ratio <= chosen + 1e-12 && leave >= 0 && v < head_[leave])) {
        chosen = ratio;
        leave = k;
      }
    } else if (ratio <= relaxed && std::abs(rate) > best) {
      best = std::abs(rate);
      chosen = ratio;
      leave = k;
    }
  }
  if (leave < 0 || flip <= chosen) {
    step = flip;
    return -1;
  }
  step = chosen;
  return leave;
}

void Simplex::apply_step(int q, int dir, double step, const std::vector<double>& alpha) {
  if (step == 0.0) return;
  x_[q] += dir * step;
  for (int k = 0; k < m_; ++k) x_[head_[k]] -= alpha[k] * dir * step;
}

void Simplex::pivot(int q, int r, const std::vector<double>& alpha) {
  const int leaving = head_[r];
  pos_[leaving] = -1;
  head_[r] = q;
  pos_[q] = r;
  status_[q] = BasisStatus::basic;

  const double pr = alpha[r];
  double* row_r = binv_row(r);
  for (int i = 0; i < m_; ++i) row_r[i] /= pr;
  for (int k = 0; k < m_; ++k) {
    if (k == r || alpha[k] == 0.0) continue;
    const double f = alpha[k];
    double* row_k = binv_row(k);
    for (int i = 0; i < m_; ++i) row_k[i] -= f * row_r[i];
  }
  ++since_refactor_;
}

Simplex::Outcome Simplex::iterate(const std::vector<double>& cost) {
  std::vector<double> y, alpha;
  int degenerate = 0;
  bool bland = false;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return Outcome::iteration_limit;
    if (since_refactor_ >= opt_.refactor_interval && !refactor()) return Outcome::singular;
    compute_duals(cost, y);

    int q = -1, dir = 0;
    double best = 0.0;
    for (int v = 0; v < static_cast<int>(x_.size()); ++v) {
      if (pos_[v] >= 0 || fixed(v)) continue;
      const double d = reduced_cost(v, cost, y);
      int want = 0;
      switch (status_[v]) {
        case BasisStatus::at_lower:
          if (d < -opt_.dual_tolerance) want = 1;
          break;
        case BasisStatus::at_upper:
          if (d > opt_.dual_tolerance) want = -1;
          break;
        case BasisStatus::free_nonbasic:
          if (std::abs(d) > opt_.dual_tolerance) want = d < 0.0 ? 1 : -1;
          break;
        case BasisStatus::basic:
          break;
      }
      if (!want) continue;
      if (bland) {
        q = v;
        dir = want;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = v;
        dir = want;
      }
    }
    if (q < 0) return Outcome::optimal;

    column(q, alpha);
    double step = 0.0;
    const int r = ratio_test(q, dir, alpha, step, bland);
    if (r == m_) return Outcome::unbounded;
    ++iterations_;
    apply_step(q, dir, step, alpha);
    if (r < 0) {
      status_[q] = dir > 0 ? BasisStatus::at_upper : BasisStatus::at_lower;
      x_[q] = dir > 0 ? up_[q] : lo_[q];
    } else {
      const int leaving = head_[r];
      const bool to_lower = alpha[r] * dir > 0.0;
      pivot(q, r, alpha);
      status_[leaving] = to_lower ? BasisStatus::at_lower : BasisStatus::at_upper;
      x_[leaving] = to_lower ? lo_[leaving] : up_[leaving];
    }

    if (step <= 1e-12) {
      if (++degenerate > 50) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

void Simplex::drive_out_artificials() {
  std::vector<double> alpha;
  for (int k = 0; k < m_; ++k) {
    if (!is_artificial(head_[k])) continue;
    const double* row = binv_row(k);
    int best_v = -1;
    double best = 1e-7;
    for (int v = 0; v < n_ + m_; ++v) {
      if (pos_[v] >= 0) continue;
      double a = 0.0;
      for (const auto& e : cols_[v]) a += row[e.index] * e.value;
      if (std::abs(a) > best) {
        best = std::abs(a);
        best_v = v;
      }
    }
    if (best_v < 0) continue;  // redundant row; the artificial stays basic at zero
    const int art = head_[k];
    column(best_v, alpha);
    pivot(best_v, k, alpha);
    status_[art] = BasisStatus::at_lower;
    x_[art] = 0.0;
  }
}

void Simplex::pivot_in_free_columns(const std::vector<double>& cost) {
  std::vector<double> alpha;
  for (int j = 0; j < n_; ++j) {
    if (status_[j] != BasisStatus::free_nonbasic) continue;
    column(j, alpha);
    int r = -1;
    double best = 1e-7;
    for (int k = 0; k < m_; ++k) {
      const int v = head_[k];
      const bool at_bound = std::abs(x_[v] - lo_[v]) <= opt_.primal_tolerance ||
                            std::abs(x_[v] - up_[v]) <= opt_.primal_tolerance;
      if (at_bound && std::abs(alpha[k]) > best) {
        best = std::abs(alpha[k]);
        r = k;
      }
    }
    if (r >= 0) {
      const int leaving = head_[r];
      const bool to_lower = std::abs(x_[leaving] - lo_[leaving]) <= opt_.primal_tolerance;
      pivot(j, r, alpha);
      status_[leaving] = to_lower ? BasisStatus::at_lower : BasisStatus::at_upper;
      x_[leaving] = to_lower ? lo_[leaving] : up_[leaving];
      continue;
    }
    // No degenerate swap: slide along the zero-cost direction until a basic
    // variable reaches a bound.
    for (int dir : {1, -1}) {
      double step = 0.0;
      const int leave = ratio_test(j, dir, alpha, step, false);
      if (leave == m_ || leave < 0) continue;
      apply_step(j, dir, step, alpha);
      const int leaving = head_[leave];
      const bool to_lower = alpha[leave] * dir > 0.0;
      pivot(j, leave, alpha);
      status_[leaving] = to_lower ? BasisStatus::at_lower : BasisStatus::at_upper;
      x_[leaving] = to_lower ? lo_[leaving] : up_[leaving];
      break;
    }
  }
  (void)cost;
}

Result Simplex::run() {
  Result result;
  initialise();

  double scale = 1.0;
  for (int r = 0; r < m_; ++r) {
    if (std::isfinite(lo_[logical(r)])) scale = std::max(scale, std::abs(lo_[logical(r)]));
    if (std::isfinite(up_[logical(r)])) scale = std::max(scale, std::abs(up_[logical(r)]));
  }

  std::vector<double> cost(x_.size(), 0.0);
  bool need_phase1 = false;
  for (int r = 0; r < m_; ++r) {
    cost[artificial(r)] = 1.0;
    if (pos_[artificial(r)] >= 0) need_phase1 = true;
  }

  auto finish = [&](Status status) {
    result.status = status;
    result.iterations = iterations_;
    return result;
  };

  if (need_phase1) {
    const Outcome phase1 = iterate(cost);
    if (phase1 == Outcome::iteration_limit) return finish(Status::iteration_limit);
    if (phase1 == Outcome::singular || !refactor()) return finish(Status::numerical_failure);
    double infeasibility = 0.0;
    for (int r = 0; r < m_; ++r) infeasibility += std::max(0.0, x_[artificial(r)]);
    if (infeasibility > 1e-7 * scale) return finish(Status::infeasible);
  }
  for (int r = 0; r < m_; ++r) {
    const int a = artificial(r);
    up_[a] = 0.0;
    if (pos_[a] < 0) x_[a] = 0.0;
  }
  drive_out_artificials();
  if (!refactor()) return finish(Status::numerical_failure);

  std::fill(cost.begin(), cost.end(), 0.0);
  for (int j = 0; j < n_; ++j) cost[j] = model_.cost(j);
  Outcome phase2 = iterate(cost);
  if (phase2 == Outcome::iteration_limit) return finish(Status::iteration_limit);
  if (phase2 == Outcome::unbounded) return finish(Status::unbounded);
  if (phase2 == Outcome::singular || !refactor()) return finish(Status::numerical_failure);

  pivot_in_free_columns(cost);
  if (!refactor()) return finish(Status::numerical_failure);
  // Sliding along zero-cost directions can expose tiny reduced costs.
  phase2 = iterate(cost);
  if (phase2 != Outcome::optimal || !refactor()) return finish(Status::numerical_failure);

  std::vector<double> y;
  compute_duals(cost, y);
  result.x.assign(x_.begin(), x_.begin() + n_);
  result.reduced_cost.resize(n_);
  result.col_status.resize(n_);
  result.objective = 0.0;
  for (int j = 0; j < n_; ++j) {
    result.reduced_cost[j] = pos_[j] >= 0 ? 0.0 : reduced_cost(j, cost, y);
    result.col_status[j] = status_[j];
    result.objective += model_.cost(j) * x_[j];
  }
  result.row_activity.resize(m_);
  result.row_status.resize(m_);
  result.row_dual = y;
  for (int r = 0; r < m_; ++r) {
    result.row_activity[r] = x_[logical(r)];
    result.row_status[r] = status_[logical(r)];
  }
  return finish(Status::optimal);
}

}  // namespace

Result solve(const Model& model, const Options& options) {
  Simplex simplex(model, options);
  return simplex.run();
}

}  // namespace dcshift::lp
