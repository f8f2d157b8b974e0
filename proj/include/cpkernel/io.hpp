#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cpkernel/errors.hpp"
#include "cpkernel/kernel_algebra.hpp"
#include "cpkernel/l1_fode.hpp"
#include "cpkernel/mesh.hpp"

namespace cpkernel {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_shortest(double x) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, end);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  // skip leading spaces; from_chars is strict
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) throw IoError(context + ": empty number");
  std::size_t e = s.find_last_not_of(" \t\r");
  auto [ptr, ec] = std::from_chars(s.data() + b, s.data() + e + 1, v);
  if (ec != std::errc() || ptr != s.data() + e + 1) {
    throw IoError(context + ": cannot parse '" + std::string(s) + "' as a number");
  }
  return v;
}

/// Kernel file: line n carries the n row values (a_{n-1}^n, ..., a_0^n),
/// comma separated.
inline void write_kernel_csv(std::ostream& out, const TriKernel& k) {
  for (std::size_t n = 1; n <= k.rows(); ++n) {
    auto r = k.row(n);
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << format_shortest(r[i]);
    }
    out << '\n';
  }
}

inline void write_kernel_csv(const std::string& path, const TriKernel& k) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  write_kernel_csv(f, k);
}

inline TriKernel read_kernel_csv(std::istream& in, const std::string& name = "kernel") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string_view field(line.data() + pos,
                                   (comma == std::string::npos ? line.size() : comma) - pos);
      row.push_back(parse_double(field, name + " line " + std::to_string(lineno)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (row.size() != rows.size() + 1) {
      throw IoError(name + " line " + std::to_string(lineno) + ": expected " +
                    std::to_string(rows.size() + 1) + " values, got " +
                    std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(name + ": no rows");
  TriKernel k(rows.size());
  for (std::size_t n = 1; n <= rows.size(); ++n) {
    std::copy(rows[n - 1].begin(), rows[n - 1].end(), k.row(n).begin());
  }
  if (!k.all_finite()) throw IoError(name + ": non-finite entry");
  return k;
}

inline TriKernel read_kernel_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  return read_kernel_csv(f, path);
}

/// Mesh file: one time value per line, ascending from 0.
inline void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  for (double t : mesh.points()) f << format_shortest(t) << '\n';
}

inline std::vector<double> read_value_per_line(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    values.push_back(parse_double(line, path + " line " + std::to_string(lineno)));
  }
  return values;
}

inline Mesh read_mesh_file(const std::string& path) {
  return validate_mesh(read_value_per_line(path));
}

/// Trajectory: header then one row per time, columns t,u_1,...,u_m.
inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  const std::size_t dim = traj.states[0].size();
  f << 't';
  if (dim == 1) {
    f << ",u";
  } else {
    for (std::size_t i = 1; i <= dim; ++i) f << ",u_" << i;
  }
  f << '\n';
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    f << format_shortest(traj.mesh.t(n));
    for (double v : traj.states[n]) f << ',' << format_shortest(v);
    f << '\n';
  }
}

// ---------------------------------------------------------------------------
// Report writer
// ---------------------------------------------------------------------------

/// Tiny JSON emitter for machine-readable reports.  Keys keep insertion
/// order, doubles are printed with 17 significant digits, and the output is
/// byte-deterministic for a fixed sequence of calls.
class JsonWriter {
public:
  std::string str() const { return out_; }

  JsonWriter& begin_object() { return token("{"); }
  JsonWriter& end_object() { close("}"); return *this; }
  JsonWriter& begin_array() { return token("["); }
  JsonWriter& end_array() { close("]"); return *this; }

  JsonWriter& key(std::string_view k) {
    comma();
    quote(k);
    out_ += ':';
    fresh_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    comma();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ += buf;
    return *this;
  }
  JsonWriter& value(long long v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(std::size_t v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(int v) { comma(); out_ += std::to_string(v); return *this; }
  JsonWriter& value(bool v) { comma(); out_ += v ? "true" : "false"; return *this; }
  JsonWriter& value(std::string_view v) { comma(); quote(v); return *this; }
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }

private:
  JsonWriter& token(const char* t) {
    comma();
    out_ += t;
    fresh_ = true;
    return *this;
  }
  void close(const char* t) {
    out_ += t;
    fresh_ = false;
  }
  void comma() {
    if (!fresh_ && !out_.empty()) {
      const char c = out_.back();
      if (c != '{' && c != '[' && c != ':') out_ += ',';
    }
    fresh_ = false;
  }
  void quote(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        default: out_ += c;
      }
    }
    out_ += '"';
  }

  std::string out_;
  bool fresh_ = true;
};

}  // namespace cpkernel
