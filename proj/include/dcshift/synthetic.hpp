#pragma once

#include <cstdint>
#include <vector>

#include "dcshift/grid.hpp"

namespace dcshift {

struct SyntheticCase {
  Network network;
  std::vector<HourlyScenario> hours;
};

/// Small connected test network with mixed fuels, `data_centers`
/// data-center loads and an hourly series in which every hour clears.
/// Deterministic under `seed` on every platform.
SyntheticCase gen_synthetic_case(int buses, int data_centers, std::uint64_t seed, int hours = 24);

}  // namespace dcshift
