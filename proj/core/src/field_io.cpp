#include "stokpp/field_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>

#include "stokpp/errors.hpp"

namespace stokpp {
namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  auto bits = std::bit_cast<std::uint64_t>(value);
  std::array<char, 8> bytes{};
  for (auto& b : bytes) {
    b = static_cast<char>(bits & 0xffu);
    bits >>= 8;
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("snapshot: truncated input");
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | bytes[static_cast<std::size_t>(i)];
  return std::bit_cast<T>(bits);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_csv_row(std::ostream& out, std::span<const std::string> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(cells[i]);
  }
  out << '\n';
}

void write_field_csv(std::ostream& out, const Field& field) {
  out << "x,value\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << format_double(field.x(i)) << ',' << format_double(field.values[i]) << '\n';
  }
}

void write_snapshot(std::ostream& out, const Field& field) {
  put_le(out, field.grid.x0);
  put_le(out, field.grid.dx);
  put_le(out, static_cast<std::int64_t>(field.grid.n));
  put_le(out, field.grid.frame_offset);
  put_le(out, field.time);
  for (double v : field.values) put_le(out, v);
}

Field read_snapshot(std::istream& in) {
  Field f;
  f.grid.x0 = get_le<double>(in);
  f.grid.dx = get_le<double>(in);
  const auto n = get_le<std::int64_t>(in);
  if (n < 3 || n > (std::int64_t{1} << 32)) throw ConfigError("snapshot: implausible node count");
  f.grid.n = static_cast<std::size_t>(n);
  f.grid.frame_offset = get_le<double>(in);
  f.time = get_le<double>(in);
  f.values.resize(f.grid.n);
  for (auto& v : f.values) v = get_le<double>(in);
  f.grid.validate();
  return f;
}

}  // namespace stokpp
