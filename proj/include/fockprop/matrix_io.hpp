#pragma once

#include <json.hpp>

#include "fockprop/fock.hpp"

namespace fockprop {

/// {"modes": d, "max_quanta": M, "size": n, "states": [[n_1..n_d], ...]}
nlohmann::json basis_to_json(const FockBasis& basis);

/// {"schema": "fockprop-matrix/1", "basis": {...}, "rows": n, "cols": n,
///  "data": [re_00, im_00, re_01, im_01, ...]} in row-major order.
nlohmann::json operator_to_json(const OperatorMatrix& op);

/// Rebuilds an operator over `basis`; throws DimensionError when the stored
/// basis description (modes, cutoff, state list) disagrees with it.
OperatorMatrix operator_from_json(const nlohmann::json& doc, const BasisPtr& basis);

}  // namespace fockprop
