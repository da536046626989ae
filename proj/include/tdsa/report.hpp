#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tdsa {

enum class ReportShape { Table2, Table3, Table4, Table5, Table6, FigDist };

std::optional<ReportShape> report_shape_from_name(std::string_view name);

struct Report {
  std::string text;  // fixed-width grid for the terminal
  std::string json;  // machine-readable mirror
};

// Builds one of the paper-shaped summaries from stored record JSONs. Records
// whose kind does not feed the requested shape are ignored; ordering is
// deterministic.
Report report(const std::vector<std::string>& record_jsons, ReportShape shape);

}  // namespace tdsa
