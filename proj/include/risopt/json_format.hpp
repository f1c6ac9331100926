#pragma once

#include <string>

#include <json.hpp>

namespace risopt {

/// "%.17g" rendering; non-finite values become "nan", "inf" or "-inf".
std::string format_double17(double v);

/// Serializes JSON like nlohmann::json::dump but renders every floating-point
/// number with 17 significant digits. Non-finite floats are emitted as null.
std::string dump_json17(const nlohmann::json& j, int indent = -1);

}  // namespace risopt
