#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "kfp/phase_space.hpp"

namespace kfp {
namespace {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InputError("field file truncated in header");
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InputError("field file truncated in header");
  return v;
}

}  // namespace

void write_field_binary(const Field& f, std::ostream& out) {
  const PhaseGrid& g = f.grid();
  put_u64(out, static_cast<std::uint64_t>(g.dim()));
  for (const Axis& ax : g.axes()) {
    put_u64(out, ax.points);
    put_f64(out, ax.half_width);
  }
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!out) throw InputError("failed writing field payload");
}

Field read_field_binary(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  if (n < 1 || n > 3) throw InputError("field file: dimension must be 1..3, got " + std::to_string(n));
  std::vector<Axis> axes;
  for (std::uint64_t a = 0; a < 2 * n; ++a) {
    Axis ax;
    ax.points = get_u64(in);
    ax.half_width = get_f64(in);
    axes.push_back(ax);
  }
  PhaseGrid grid(static_cast<int>(n), std::move(axes));
  std::vector<cplx> values(grid.cell_count());
  if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)))) {
    throw InputError("field file: payload shorter than the header implies");
  }
  bool real = true;
  for (const cplx& v : values) real = real && v.imag() == 0.0;
  return Field(std::move(grid), std::move(values), real);
}

void write_field_binary(const Field& f, const std::string& path) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    write_field_binary(f, out);
  }
  std::filesystem::rename(tmp, target);
}

Field read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return read_field_binary(in);
}

void write_field_csv(const Field& f, std::ostream& out) {
  const PhaseGrid& g = f.grid();
  if (g.dim() != 1) throw CapabilityError("CSV field export supports n = 1 only");
  out << "x,v,re,im\n" << std::setprecision(17);
  const Axis& ax = g.x_axis(0);
  const Axis& av = g.v_axis(0);
  for (std::size_t i = 0; i < ax.points; ++i) {
    for (std::size_t j = 0; j < av.points; ++j) {
      const cplx z = f[i * av.points + j];
      out << ax.coord(i) << ',' << av.coord(j) << ',' << z.real() << ',' << z.imag() << '\n';
    }
  }
}

}  // namespace kfp
