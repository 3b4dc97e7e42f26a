#include <cmath>
#include <cstdio>
#include <sstream>

#include "degreelab/cli.hpp"

namespace degreelab::cli {

namespace {

void write(const Json& v, std::ostringstream& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      // nlohmann objects are std::map-backed, so iteration is key-sorted.
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad << Json(it.key()).dump() << ": ";
        write(it.value(), out, depth + 1);
      }
      out << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ",\n";
        out << pad;
        write(v[i], out, depth + 1);
      }
      out << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        out << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << buf;
      return;
    }
    default:
      out << v.dump();
  }
}

}  // namespace

std::string dump_json(const Json& value) {
  std::ostringstream out;
  write(value, out, 0);
  out << "\n";
  return out.str();
}

std::string model_hash(const Json& model) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump_json(model)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace degreelab::cli
