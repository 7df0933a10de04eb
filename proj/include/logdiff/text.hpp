#pragma once

// Text grammars and JSON documents.
//
//   element   3*x[2,0] + 1*x[0,1]
//   operator  1*x[0] d[2] + 3*x[1] d[0,1]      (flat basis: db[...])
//   pparts    1*x[0] * E[2]                    (tensor factors: E[1;0])
//   omega     1*x[1] * wedge
//
// Printers emit one monomial per term in normal order, so parse . print and
// print . parse are identities on printed forms.

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"

#include "logdiff/dmod.hpp"
#include "logdiff/omega.hpp"

namespace logdiff {

MultiIndex parse_multi_index(std::string_view src);
AlgElem parse_element(std::string_view src, const Chart& chart);
DiffOp parse_operator(std::string_view src, const BasisPtr& basis);
FlatOp parse_flat(std::string_view src, const BasisPtr& basis);
PPartsElem parse_pparts(std::string_view src, const Chart& chart, const std::vector<int>& orders);
OmegaElement parse_omega(std::string_view src, const BasisPtr& basis);

nlohmann::json chart_to_json(const Chart& chart);
ChartPtr chart_from_json(const nlohmann::json& j, const std::string& pointer = "");

nlohmann::json table_to_json(const StratTable& table);
StratTable table_from_json(const nlohmann::json& j, const ChartPtr& chart, const std::string& pointer = "");

using Value = std::variant<AlgElem, DiffOp, OmegaElement, PPartsElem>;

std::string value_kind(const Value& v);
std::string value_text(const Value& v);

// A chart plus named values over its canonical basis.
class Session {
 public:
  explicit Session(ChartPtr chart);

  const ChartPtr& chart() const noexcept { return chart_; }
  const BasisPtr& basis() const noexcept { return basis_; }
  const std::map<std::string, Value>& bindings() const noexcept { return bindings_; }

  void bind(const std::string& name, Value v);
  const Value& lookup(const std::string& name) const;
  bool has(const std::string& name) const { return bindings_.count(name) > 0; }

  nlohmann::json to_json() const;
  static Session from_json(const nlohmann::json& j);

  std::string serialize() const { return to_json().dump(); }
  static Session load(const std::string& path);
  void save(const std::string& path) const;

 private:
  ChartPtr chart_;
  BasisPtr basis_;
  std::map<std::string, Value> bindings_;
};

}  // namespace logdiff
