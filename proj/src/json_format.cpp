#include "risopt/json_format.hpp"

#include <cmath>
#include <cstdio>

namespace risopt {
namespace {

void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out.push_back('\n');
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void write(const nlohmann::json& j, std::string& out, int indent, int depth) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(out, indent, depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(it.value(), out, indent, depth + 1);
      }
      newline(out, indent, depth);
      out.push_back('}');
      return;
    }
    case value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& item : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(out, indent, depth + 1);
        write(item, out, indent, depth + 1);
      }
      newline(out, indent, depth);
      out.push_back(']');
      return;
    }
    case value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // Keep a marker so integral values still read back as floats.
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json17(const nlohmann::json& j, int indent) {
  std::string out;
  write(j, out, indent, 0);
  return out;
}

}  // namespace risopt
