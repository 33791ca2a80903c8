#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcshift/grid.hpp"
#include "dcshift/opf.hpp"

namespace dcshift {

enum class MetricKind { lmp, co2_marginal, average, excess };

std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view text);

/// One value per bus (index bus id - 1). Units: $/MWh for lmp, t/MWh for
/// co2_marginal and average, -MW for excess. Finite-difference vectors may
/// leave buses absent.
struct MetricVector {
  MetricKind kind = MetricKind::lmp;
  std::vector<std::optional<double>> values;
  int hour = -1;
  std::string source;
  std::vector<std::string> warnings;

  std::optional<double> at(int bus_id) const { return values.at(bus_id - 1); }
};

std::string metric_to_csv(const MetricVector& metric);
std::string metric_to_json(const MetricVector& metric);

class DegenerateBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reject a basis whose reciprocal condition estimate falls below this.
inline constexpr double kMinReciprocalCondition = 1e-10;

/// Square system of active constraints at a vertex, over x = [theta, p_g].
/// Rows: every balance row, the reference angle, then the selected binding
/// inequalities. `generation_response` is the |G| x |N| block of the
/// inverse mapping a load change at each bus to generator changes.
struct SensitivityBasis {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  Eigen::MatrixXd inverse;
  Eigen::MatrixXd generation_response;
  std::vector<ConstraintId> rows;
  double condition_estimate = 0.0;  // reciprocal, 1-norm
};

SensitivityBasis build_sensitivity_basis(const Network& network, const DispatchSolution& solution);

MetricVector lambda_co2(const Network& network, const DispatchSolution& solution,
                        const SensitivityBasis& basis);

/// Emission change per MW from re-solving with +delta_mw at each listed bus.
/// `objective` must be the one the base solution was cleared with.
MetricVector lambda_co2_finite_difference(const Network& network, const DispatchSolution& solution,
                                          std::span<const int> buses, double delta_mw,
                                          const ObjectiveSpec& objective = {});

MetricVector lambda_lmp(const DispatchSolution& solution);
MetricVector lambda_average(const Network& network, const DispatchSolution& solution);
MetricVector lambda_excess(const Network& network, const DispatchSolution& solution);

/// Linearised effect of one extra MW at a bus on emissions, generation cost
/// and curtailment. Built from the basis when it is usable, otherwise from
/// finite differences at the data-center buses only.
struct MarginalResponse {
  std::vector<std::optional<double>> co2;
  std::vector<std::optional<double>> cost;
  std::vector<std::optional<double>> curtailment;
  bool finite_difference = false;
  std::string note;
};

inline constexpr double kFallbackDeltaMw = 0.1;

MarginalResponse marginal_response(const Network& network, const DispatchSolution& solution,
                                   const ObjectiveSpec& objective);

/// lambda_co2 through the basis, falling back to finite differences at the
/// data-center buses when the basis is degenerate.
MetricVector co2_metric(const Network& network, const DispatchSolution& solution,
                        const MarginalResponse& response);

}  // namespace dcshift
