#pragma once

#include "ellcert/certify.hpp"
#include "ellcert/constants.hpp"
#include "ellcert/problem.hpp"
#include "ellcert/solver.hpp"
#include "ellcert/transform.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ellcert::report {

using Json = nlohmann::ordered_json;

/// Finite numbers as-is, infinities and NaN as null.
Json number(double value);

Json problem_summary(const ProblemSpec& spec, const std::string& source);
Json grid_summary(const Grid& grid);
Json solve_stats(const SolveStats& stats);
Json constants(const ConstantReport& report);
Json transform(const TransformResult& result);
Json certificate(const Certificate& cert);
Json estimates(const EstimateReport& report);
Json stabilized(const StabilizedEstimates& est);

/// Two-column aligned text table.
class Table {
public:
  explicit Table(std::string title) : title_(std::move(title)) {}
  void row(std::string key, std::string value);
  void row(std::string key, double value);
  void print(std::ostream& out) const;

private:
  std::string title_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

/// Six significant digits, "inf" for infinity.
std::string short_number(double value);

}  // namespace ellcert::report
