#include "fockprop/matrix_io.hpp"

#include <string>

#include "fockprop/errors.hpp"

namespace fockprop {

nlohmann::json basis_to_json(const FockBasis& basis) {
  return {{"modes", basis.modes()},
          {"max_quanta", basis.max_quanta()},
          {"size", basis.size()},
          {"states", basis.states()}};
}

nlohmann::json operator_to_json(const OperatorMatrix& op) {
  const Eigen::MatrixXcd& m = op.entries();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(2 * m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c).real());
      data.push_back(m(r, c).imag());
    }
  }
  return {{"schema", "fockprop-matrix/1"},
          {"basis", basis_to_json(*op.basis())},
          {"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::move(data)}};
}

OperatorMatrix operator_from_json(const nlohmann::json& doc, const BasisPtr& basis) {
  if (doc.value("schema", "") != "fockprop-matrix/1") throw std::invalid_argument("not a fockprop matrix document");
  const auto& stored = doc.at("basis");
  if (stored.at("modes").get<std::size_t>() != basis->modes() ||
      stored.at("max_quanta").get<int>() != basis->max_quanta() ||
      stored.at("states").get<std::vector<Occupation>>() != basis->states()) {
    throw DimensionError("stored matrix was built on a different basis");
  }
  const auto rows = doc.at("rows").get<Eigen::Index>();
  const auto cols = doc.at("cols").get<Eigen::Index>();
  const auto& data = doc.at("data");
  if (static_cast<Eigen::Index>(data.size()) != 2 * rows * cols) {
    throw DimensionError("matrix data length does not match its shape");
  }
  Eigen::MatrixXcd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, k += 2) {
      m(r, c) = Complex(data[k].get<double>(), data[k + 1].get<double>());
    }
  }
  return {basis, std::move(m)};
}

}  // namespace fockprop
