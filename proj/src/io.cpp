#include "fhadmm/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fhadmm/errors.hpp"

namespace fhadmm {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return bits;
}

std::string header_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(std::string("field header truncated before ") + what);
  return line;
}

template <class T>
T header_value(std::istream& in, const std::string& name) {
  const std::string line = header_line(in, name.c_str());
  std::istringstream s(line);
  std::string key;
  T value{};
  if (!(s >> key) || key != name || !(s >> value)) throw IoError("field header: expected '" + name + " <value>', got '" + line + "'");
  std::string extra;
  if (s >> extra) throw IoError("field header: trailing text in '" + line + "'");
  return value;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& f) {
  const Grid& g = f.grid();
  out << field_magic << '\n'
      << "dim " << g.dim() << '\n'
      << "n " << g.n() << '\n'
      << "length " << fmt(g.length()) << '\n'
      << "encoding f64le\n"
      << "end\n";
  std::vector<std::uint64_t> raw(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) raw[i] = to_little(std::bit_cast<std::uint64_t>(f[i]));
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (!out) throw IoError("failed to write field payload");
}

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_field(out, f);
  out.close();
  if (!out) throw IoError("failed to write " + path.string());
}

ScalarField read_field(std::istream& in) {
  if (header_line(in, "magic") != field_magic) throw IoError("not a field file (bad magic)");
  const int dim = header_value<int>(in, "dim");
  const int n = header_value<int>(in, "n");
  const double length = header_value<double>(in, "length");
  const std::string encoding = header_value<std::string>(in, "encoding");
  if (encoding != "f64le") throw IoError("unsupported encoding '" + encoding + "'");
  if (header_line(in, "end") != "end") throw IoError("field header: missing end marker");

  Grid g = [&] {
    try {
      return Grid(dim, n, length);
    } catch (const ConfigError& e) {
      throw IoError(std::string("field header describes an invalid grid: ") + e.what());
    }
  }();
  std::vector<std::uint64_t> raw(g.size());
  const auto bytes = static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t));
  in.read(reinterpret_cast<char*>(raw.data()), bytes);
  if (in.gcount() != bytes)
    throw IoError("field payload holds " + std::to_string(in.gcount()) + " bytes, header requires " +
                  std::to_string(bytes));
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("field payload is longer than the header requires");
  ScalarField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::bit_cast<double>(to_little(raw[i]));
  return f;
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_field(in);
}

void write_field_csv(std::ostream& out, const ScalarField& f) {
  const Grid& g = f.grid();
  const bool three = g.dim() == 3;
  out << (three ? "i,j,k,x,y,z,u\n" : "i,j,x,y,u\n");
  const int nz = three ? g.n() : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        out << i << ',' << j << ',';
        if (three) out << k << ',';
        out << fmt(g.center(i)) << ',' << fmt(g.center(j)) << ',';
        if (three) out << fmt(g.center(k)) << ',';
        out << fmt(f.at(i, j, k)) << '\n';
      }
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_field_csv(out, f);
  out.close();
  if (!out) throw IoError("failed to write " + path.string());
}

void write_diagnostics_header(std::ostream& out) { out << diagnostics_header << '\n'; }

void write_diagnostics_row(std::ostream& out, const StepReport& r) {
  out << r.step_index << ',' << fmt(r.time) << ',' << r.admm_iterations << ',' << fmt(r.energy) << ','
      << fmt(r.mass) << ',' << fmt(r.mass_drift) << ',' << fmt(r.one_minus_max) << ',' << fmt(r.one_plus_min) << ','
      << fmt(r.criterion) << '\n';
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << convergence_header << '\n';
  for (const ConvergenceRow& r : rows)
    out << fmt(r.h_coarse) << ',' << fmt(r.h_fine) << ',' << fmt(r.delta_l2) << ','
        << (std::isnan(r.rate) ? std::string() : fmt(r.rate)) << '\n';
}

std::string render_convergence_table(const std::vector<ConvergenceRow>& rows) {
  std::string s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%8s %8s %14s %14s %12s %8s\n", "N_coarse", "N_fine", "h_coarse", "h_fine",
                "delta_l2", "rate");
  s += buf;
  for (const ConvergenceRow& r : rows) {
    char rate[32] = "-";
    if (!std::isnan(r.rate)) std::snprintf(rate, sizeof rate, "%.3f", r.rate);
    std::snprintf(buf, sizeof buf, "%8d %8d %14.6g %14.6g %12.3e %8s\n", r.n_coarse, r.n_fine, r.h_coarse, r.h_fine,
                  r.delta_l2, rate);
    s += buf;
  }
  return s;
}

}  // namespace fhadmm
