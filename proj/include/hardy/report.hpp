#pragma once

#include "hardy/hardy_solver.hpp"
#include "hardy/shape_derivative.hpp"
#include "hardy/stability.hpp"

#include <json.hpp>

#include <string>

namespace hardy {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// JSON text with every floating-point number written with 17 significant
/// digits; NaN and infinities become null.
std::string dump_json(const Json& j, int indent = 2);

/// Writes `text` to a temporary file next to `path` and renames it.
void write_atomic(const std::string& path, const std::string& text);

Json to_json(const HardyResult& r);
Json to_json(const DerivativeReport& r);
Json to_json(const StabilityTable& t);
Json to_json(const StabilityReport& r);
Json to_json(const TOperatorReport& r);
Json to_json(const MeshParams& m);

std::string to_csv(const StabilityTable& t);
std::string to_csv(const StabilityReport& r);
std::string to_csv(const std::vector<FamilyRow>& rows);

/// Number formatting used by CSV and JSON.
std::string format_number(double x);

}  // namespace hardy
