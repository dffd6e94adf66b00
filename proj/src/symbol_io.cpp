#include "fockprop/symbol_io.hpp"

#include <cstdio>
#include <stdexcept>

#include "fockprop/errors.hpp"

namespace fockprop {

nlohmann::json symbol_to_json(const PolySymbol& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [index, value] : s.terms()) {
    out.push_back({{"kstar", index.kstar}, {"k", index.k}, {"re", value.real()}, {"im", value.imag()}});
  }
  return out;
}

PolySymbol symbol_from_json(const nlohmann::json& literal, std::optional<std::size_t> modes) {
  if (!literal.is_array()) throw std::invalid_argument("symbol literal must be a JSON array");
  std::vector<std::pair<MultiIndexPair, Complex>> terms;
  for (std::size_t t = 0; t < literal.size(); ++t) {
    const auto& term = literal[t];
    const std::string where = "term " + std::to_string(t);
    if (!term.is_object()) throw std::invalid_argument(where + " is not an object");
    for (const char* key : {"kstar", "k", "re"}) {
      if (!term.contains(key)) throw std::invalid_argument(where + " lacks \"" + key + "\"");
    }
    MultiIndexPair index{term.at("kstar").get<std::vector<int>>(), term.at("k").get<std::vector<int>>()};
    if (index.kstar.size() != index.k.size()) {
      throw DimensionError(where + ": kstar and k lengths differ");
    }
    if (!modes) modes = index.k.size();
    if (index.k.size() != *modes) {
      throw DimensionError(where + " has " + std::to_string(index.k.size()) + " modes, expected " +
                           std::to_string(*modes));
    }
    const double re = term.at("re").get<double>();
    const double im = term.contains("im") ? term.at("im").get<double>() : 0.0;
    terms.emplace_back(std::move(index), Complex(re, im));
  }
  if (!modes) throw std::invalid_argument("empty symbol literal needs an explicit mode count");
  return PolySymbol(*modes, terms);
}

std::uint64_t symbol_hash(const PolySymbol& s) {
  const std::string text = std::to_string(s.modes()) + ":" + symbol_to_json(s).dump();
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string symbol_hash_hex(const PolySymbol& s) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(symbol_hash(s)));
  return buffer;
}

}  // namespace fockprop
