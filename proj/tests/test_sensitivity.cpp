#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "dcshift/sensitivity.hpp"
#include "dcshift/synthetic.hpp"
#include "fixtures.hpp"

using namespace dcshift;

namespace {

Network one_bus(std::vector<Generator> gens, double demand) {
  Network n;
  n.buses = {{1, "b1", "A", true}};
  n.generators = std::move(gens);
  n.loads = {fixtures::load(1, 1, demand)};
  rebuild_regions(n);
  return n;
}

}  // namespace

TEST_CASE("basis for the congested two-bus case") {
  const Network n = fixtures::two_bus(50.0);
  const DispatchSolution s = solve_dcopf(n, {});
  const SensitivityBasis basis = build_sensitivity_basis(n, s);
  REQUIRE(basis.matrix.rows() == 4);
  REQUIRE(basis.rows.size() == 4);
  CHECK(basis.rows[3].kind == ConstraintKind::line_upper);

  // Hand-built rows over [theta1, theta2, p1, p2] with k = 1000.
  Eigen::MatrixXd a(4, 4);
  a << -1000, 1000, 1, 0,
        1000, -1000, 0, 1,
        1, 0, 0, 0,
        1000, -1000, 0, 0;
  const Eigen::MatrixXd inv = a.inverse();
  const Eigen::MatrixXd b = inv.block(2, 0, 2, 2);
  CHECK((basis.generation_response - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b(0, 0) == doctest::Approx(1.0));
  CHECK(b(1, 1) == doctest::Approx(1.0));
  CHECK(basis.condition_estimate >= kMinReciprocalCondition);
  const Eigen::MatrixXd eye = basis.matrix * basis.inverse;
  CHECK((eye - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-8);

  const MetricVector co2 = lambda_co2(n, s, basis);
  CHECK(co2.kind == MetricKind::co2_marginal);
  CHECK(co2.at(1).value() == doctest::Approx(0.5));
  CHECK(co2.at(2).value() == doctest::Approx(1.0));
  const std::vector<int> buses{1, 2};
  const MetricVector fd = lambda_co2_finite_difference(n, s, buses, 1.0);
  CHECK(std::abs(*fd.at(1) - *co2.at(1)) < 1e-6);
  CHECK(std::abs(*fd.at(2) - *co2.at(2)) < 1e-6);
}

TEST_CASE("uncongested basis charges both buses to the cheap unit") {
  const Network n = fixtures::two_bus();
  const DispatchSolution s = solve_dcopf(n, {});
  const MetricVector co2 = lambda_co2(n, s, build_sensitivity_basis(n, s));
  CHECK(co2.at(1).value() == doctest::Approx(0.5));
  CHECK(co2.at(2).value() == doctest::Approx(0.5));
}

TEST_CASE("minimal and trivial systems") {
  const Network n = one_bus({fixtures::gen(1, 1, 12.0, 0.8, 100.0)}, 40.0);
  const DispatchSolution s = solve_dcopf(n, {});
  const SensitivityBasis basis = build_sensitivity_basis(n, s);
  CHECK(basis.matrix.rows() == 2);
  CHECK(lambda_co2(n, s, basis).at(1).value() == doctest::Approx(0.8));

  const Network clean = fixtures::two_bus(50.0, 30.0, 0.0, 0.0);
  const DispatchSolution c = solve_dcopf(clean, {});
  const MetricVector zero = lambda_co2(clean, c, build_sensitivity_basis(clean, c));
  for (const auto& v : zero.values) CHECK(*v == doctest::Approx(0.0));
}

TEST_CASE("a non-vertex optimum is rejected as degenerate") {
  // Identical costs leave a face of optima; a split point on that face has
  // too few active constraints to pin down a basis.
  const Network n = one_bus({fixtures::gen(1, 1, 20.0, 0.5, 100.0),
                             fixtures::gen(2, 1, 20.0, 0.9, 100.0)}, 50.0);
  DispatchSolution s = solve_dcopf(n, {});
  REQUIRE(s.optimal());
  CHECK_NOTHROW(build_sensitivity_basis(n, s));
  s.p_g = {25.0, 25.0};
  s.binding_set = binding_set_of(n, s.p_g, s.line_flow);
  CHECK_THROWS_AS(build_sensitivity_basis(n, s), DegenerateBasisError);

  Network with_dc = n;
  with_dc.loads.push_back(fixtures::load(2, 1, 10.0, true));
  DispatchSolution d = solve_dcopf(with_dc, {});
  d.p_g = {30.0, 30.0};
  d.total_emissions = emissions_of(with_dc, d.p_g);
  d.total_cost = cost_of(with_dc, d.p_g);
  d.binding_set = binding_set_of(with_dc, d.p_g, d.line_flow);
  const MarginalResponse r = marginal_response(with_dc, d, {});
  CHECK(r.finite_difference);
  const MetricVector m = co2_metric(with_dc, d, r);
  CHECK(m.source == "finite-difference");
  CHECK_FALSE(m.warnings.empty());
  CHECK(m.at(1).has_value());
}

TEST_CASE("finite differences") {
  const Network n = fixtures::two_bus(105.0);
  const DispatchSolution s = solve_dcopf(n, {});
  const MetricVector none = lambda_co2_finite_difference(n, s, std::vector<int>{}, 0.1);
  REQUIRE(none.values.size() == 2);
  CHECK_FALSE(none.at(1).has_value());
  CHECK_FALSE(none.at(2).has_value());

  // A 10 MW step crosses the 105 MW line limit: half the step falls to gen 2.
  const MetricVector basis = lambda_co2(n, s, build_sensitivity_basis(n, s));
  const MetricVector big = lambda_co2_finite_difference(n, s, std::vector<int>{2}, 10.0);
  CHECK(basis.at(2).value() == doctest::Approx(0.5));
  CHECK(big.at(2).value() == doctest::Approx(0.75));
  CHECK_FALSE(big.at(1).has_value());

  const MetricVector fail = lambda_co2_finite_difference(n, s, std::vector<int>{2}, 500.0);
  CHECK_FALSE(fail.at(2).has_value());
  CHECK(fail.warnings.size() == 1);
  CHECK_THROWS(lambda_co2_finite_difference(n, s, std::vector<int>{1}, 0.0));
}

TEST_CASE("lmp vector and carbon-only duals") {
  const Network n = fixtures::two_bus(50.0);
  const MetricVector lmp = lambda_lmp(solve_dcopf(n, {}));
  CHECK(lmp.at(1).value() == doctest::Approx(10.0));
  CHECK(lmp.at(2).value() == doctest::Approx(30.0));

  const DispatchSolution carbon = solve_dcopf(n, ObjectiveSpec{0.0});
  const MetricVector co2 = lambda_co2(n, carbon, build_sensitivity_basis(n, carbon));
  const MetricVector duals = lambda_lmp(carbon);
  for (int b = 1; b <= 2; ++b) CHECK(std::abs(*duals.at(b) - *co2.at(b)) < 1e-6);
}

TEST_CASE("regional average intensity") {
  const Network n = fixtures::two_bus(50.0);
  const MetricVector avg = lambda_average(n, solve_dcopf(n, {}));
  CHECK(avg.at(1).value() == doctest::Approx(0.75));
  CHECK(avg.at(2).value() == doctest::Approx(0.75));

  const Network single = one_bus({fixtures::gen(1, 1, 5.0, 0.2, 300.0)}, 100.0);
  CHECK(lambda_average(single, solve_dcopf(single, {})).at(1).value() == doctest::Approx(0.2));

  Network idle = fixtures::three_bus();
  idle.generators[2].p_max = 0.0;
  const MetricVector z = lambda_average(idle, solve_dcopf(idle, {}));
  CHECK(z.at(3).value() == 0.0);
  CHECK(z.warnings.size() == 1);
}

TEST_CASE("regional excess low-carbon headroom") {
  const Network n = one_bus({fixtures::gen(1, 1, 1.0, 0.0, 50.0, FuelClass::wind),
                             fixtures::gen(2, 1, 5.0, 0.0, 30.0, FuelClass::hydro),
                             fixtures::gen(3, 1, 20.0, 0.9, 100.0, FuelClass::coal)},
                            30.0);
  CHECK(lambda_excess(n, solve_dcopf(n, {})).at(1).value() == doctest::Approx(-50.0));

  const Network t = fixtures::three_bus();
  const MetricVector e = lambda_excess(t, solve_dcopf(t, {}));
  CHECK(e.at(3).value() == 0.0);  // wind fully used
  CHECK(e.at(1).value() == 0.0);  // fossil slack excluded
  CHECK(e.at(1) == e.at(2));
}

TEST_CASE("properties on synthetic networks") {
  int fd_checks = 0, remark_checks = 0, response_checks = 0, degenerate = 0;
  for (int seed = 1; seed <= 30; ++seed) {
    const SyntheticCase sc = gen_synthetic_case(3 + seed % 4, 2, 100 + seed, 4);
    for (const auto& hour : sc.hours) {
      const Network n = apply_scenario(sc.network, hour);
      const DispatchSolution s = solve_dcopf(n, {});
      REQUIRE(s.optimal());
      SensitivityBasis basis;
      try {
        basis = build_sensitivity_basis(n, s);
      } catch (const DegenerateBasisError&) {
        ++degenerate;
        continue;
      }
      const int dim = static_cast<int>(basis.matrix.rows());
      CHECK(dim == n.bus_count() + static_cast<int>(n.generators.size()));
      const Eigen::MatrixXd eye = basis.matrix * basis.inverse;
      CHECK((eye - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-8);

      const MetricVector co2 = lambda_co2(n, s, basis);
      for (int b = 1; b <= n.bus_count(); ++b) {
        std::vector<double> extra(n.bus_count(), 0.0);
        extra[b - 1] = 0.1;
        const DispatchSolution p = solve_dcopf(n, {}, extra);
        if (!p.optimal() || !p.binding_set.same_constraints(s.binding_set)) continue;
        const MetricVector fd = lambda_co2_finite_difference(n, s, std::vector<int>{b}, 0.1);
        CHECK(std::abs(*fd.at(b) - *co2.at(b)) <= 1e-4);
        for (std::size_t g = 0; g < n.generators.size(); ++g)
          CHECK(std::abs(p.p_g[g] - s.p_g[g] - 0.1 * basis.generation_response(g, b - 1)) < 1e-7);
        ++fd_checks;
        ++response_checks;
      }

      for (const auto& [label, members] : n.regions) {
        const MetricVector avg = lambda_average(n, s);
        const MetricVector exc = lambda_excess(n, s);
        double lo = 1e300, hi = -1e300;
        for (std::size_t g = 0; g < n.generators.size(); ++g) {
          const auto& gen = n.generators[g];
          if (n.buses[gen.bus - 1].region != label || s.p_g[g] <= 1e-9) continue;
          lo = std::min(lo, gen.carbon_intensity);
          hi = std::max(hi, gen.carbon_intensity);
        }
        for (int bus : members) {
          CHECK(*exc.at(bus) <= 0.0);
          CHECK(*exc.at(bus) == *exc.at(members.front()));
          if (lo <= hi) {
            CHECK(*avg.at(bus) >= lo - 1e-12);
            CHECK(*avg.at(bus) <= hi + 1e-12);
          }
        }
      }

      const DispatchSolution c = solve_dcopf(n, ObjectiveSpec{0.0});
      try {
        const MetricVector carbon = lambda_co2(n, c, build_sensitivity_basis(n, c));
        for (int b = 1; b <= n.bus_count(); ++b)
          CHECK(std::abs(c.nodal_duals[b - 1] - *carbon.at(b)) < 1e-6);
        ++remark_checks;
      } catch (const DegenerateBasisError&) {
      }
    }
  }
  CHECK(fd_checks > 100);
  CHECK(remark_checks > 50);
  CHECK(response_checks > 100);
  MESSAGE("degenerate bases: " << degenerate);
}

TEST_CASE("metric names and serialization") {
  CHECK(parse_metric_kind("co2") == MetricKind::co2_marginal);
  CHECK(parse_metric_kind("average") == MetricKind::average);
  CHECK(to_string(MetricKind::excess) == "excess");
  CHECK_THROWS(parse_metric_kind("nope"));

  MetricVector m;
  m.kind = MetricKind::co2_marginal;
  m.values = {0.5, std::nullopt, 1.0};
  m.hour = 3;
  m.source = "basis";
  CHECK(metric_to_csv(m) == "bus_id,value\n1,0.5\n2,\n3,1\n");
  const auto doc = nlohmann::json::parse(metric_to_json(m));
  CHECK(doc["kind"] == "co2_marginal");
  CHECK(doc["hour"] == 3);
  CHECK(doc["values"][1].is_null());
  CHECK(doc["values"][2] == 1.0);
}
