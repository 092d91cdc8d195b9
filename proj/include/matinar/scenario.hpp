#pragma once

#include <string>

#include "matinar/process.hpp"

namespace matinar {

/// Built-in 2×2 lag-1 benchmark: A = Ã/‖Ã‖_F with Ã = [[.2,.4],[.4,.2]],
/// B = [[.5,.3],[.3,.5]], Lambda all ones. Companion radius ≈ 0.7589.
ModelParams scenario_a();

/// Registry lookup: "A" is defined; the other named slots ("B", "C", "E",
/// "F") throw std::invalid_argument("scenario definition unavailable").
ModelParams scenario_by_name(const std::string& name);

/// Random-coefficient truth for order-selection studies: A_l and B_l
/// entries drawn U(0,1), each A_l normalized to unit Frobenius norm, the
/// whole draw rejected and resampled until the companion radius is < 1.
ModelParams random_scenario(Eigen::Index m, Eigen::Index n, int p,
                            const Matrix& lambda, RngStream& rng);

}  // namespace matinar
