#include "oarseg/data/npy.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace oarseg::npy {
namespace {

static_assert(std::endian::native == std::endian::little, "npy support assumes a little-endian host");

constexpr char kMagic[] = "\x93NUMPY";

struct Header {
  char kind = 'f';  // f, i, u, b
  std::size_t item_size = 4;
  Shape3 shape;
};

std::string dict_value(const std::string& dict, const std::string& key, const std::filesystem::path& path) {
  const auto k = dict.find("'" + key + "'");
  if (k == std::string::npos) throw FormatError(path.string() + ": npy header lacks '" + key + "'");
  const auto colon = dict.find(':', k);
  auto start = dict.find_first_not_of(' ', colon + 1);
  std::size_t end;
  if (dict[start] == '(') {
    end = dict.find(')', start) + 1;
  } else if (dict[start] == '\'') {
    end = dict.find('\'', start + 1) + 1;
  } else {
    end = dict.find_first_of(",}", start);
  }
  return dict.substr(start, end - start);
}

Header parse_header(std::istream& in, const std::filesystem::path& path) {
  char magic[6];
  in.read(magic, 6);
  if (!in || std::memcmp(magic, kMagic, 6) != 0) throw FormatError(path.string() + ": not an npy file");
  unsigned char version[2];
  in.read(reinterpret_cast<char*>(version), 2);
  std::uint32_t header_len = 0;
  if (version[0] == 1) {
    std::uint16_t len16 = 0;
    in.read(reinterpret_cast<char*>(&len16), 2);
    header_len = len16;
  } else if (version[0] == 2 || version[0] == 3) {
    in.read(reinterpret_cast<char*>(&header_len), 4);
  } else {
    throw FormatError(path.string() + ": unsupported npy version " + std::to_string(version[0]));
  }
  std::string dict(header_len, '\0');
  in.read(dict.data(), header_len);
  if (!in) throw FormatError(path.string() + ": truncated npy header");

  Header h;
  const auto descr = dict_value(dict, "descr", path);  // e.g. '<f4'
  if (descr.size() < 4) throw FormatError(path.string() + ": bad dtype " + descr);
  const char order = descr[1];
  h.kind = descr[2];
  h.item_size = static_cast<std::size_t>(std::stoul(descr.substr(3, descr.size() - 4)));
  if (order == '>' && h.item_size > 1) throw FormatError(path.string() + ": big-endian arrays are not supported");
  if (h.kind != 'f' && h.kind != 'i' && h.kind != 'u' && h.kind != 'b') {
    throw FormatError(path.string() + ": unsupported dtype " + descr);
  }
  if (dict_value(dict, "fortran_order", path) != "False") {
    throw FormatError(path.string() + ": Fortran-ordered arrays are not supported");
  }
  auto shape_str = dict_value(dict, "shape", path);
  std::vector<std::int64_t> dims;
  std::stringstream ss(shape_str.substr(1, shape_str.size() - 2));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.find_first_not_of(' ') == std::string::npos) continue;
    dims.push_back(std::stoll(tok));
  }
  if (dims.size() != 3) {
    throw FormatError(path.string() + ": expected 3 axes, found " + std::to_string(dims.size()));
  }
  h.shape = {dims[0], dims[1], dims[2]};
  if (!h.shape.valid()) throw FormatError(path.string() + ": empty axis in " + to_string(h.shape));
  return h;
}

template <typename Src, typename Dst>
void convert(const std::vector<char>& raw, std::vector<Dst>& out) {
  const auto n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    Src v;
    std::memcpy(&v, raw.data() + i * sizeof(Src), sizeof(Src));
    out[i] = static_cast<Dst>(v);
  }
}

template <typename Dst>
std::vector<Dst> read_values(const std::filesystem::path& path, Shape3& shape) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  const auto h = parse_header(in, path);
  shape = h.shape;
  const auto n = static_cast<std::size_t>(h.shape.volume());
  std::vector<char> raw(n * h.item_size);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw FormatError(path.string() + ": truncated npy payload");
  }
  std::vector<Dst> out(n);
  switch (h.kind) {
    case 'f':
      if (h.item_size == 4) convert<float>(raw, out);
      else if (h.item_size == 8) convert<double>(raw, out);
      else throw FormatError(path.string() + ": unsupported float width");
      break;
    case 'b':
    case 'u':
      if (h.item_size == 1) convert<std::uint8_t>(raw, out);
      else if (h.item_size == 2) convert<std::uint16_t>(raw, out);
      else if (h.item_size == 4) convert<std::uint32_t>(raw, out);
      else if (h.item_size == 8) convert<std::uint64_t>(raw, out);
      else throw FormatError(path.string() + ": unsupported integer width");
      break;
    case 'i':
      if (h.item_size == 1) convert<std::int8_t>(raw, out);
      else if (h.item_size == 2) convert<std::int16_t>(raw, out);
      else if (h.item_size == 4) convert<std::int32_t>(raw, out);
      else if (h.item_size == 8) convert<std::int64_t>(raw, out);
      else throw FormatError(path.string() + ": unsupported integer width");
      break;
  }
  return out;
}

void write_raw(const std::filesystem::path& path, const Shape3& shape, const char* descr, const void* data,
               std::size_t bytes) {
  std::string dict = std::string("{'descr': '") + descr + "', 'fortran_order': False, 'shape': (" +
                     std::to_string(shape.d) + ", " + std::to_string(shape.h) + ", " + std::to_string(shape.w) +
                     "), }";
  // Pad so that magic + version + length + dict + newline is a multiple of 64.
  const std::size_t unpadded = 6 + 2 + 2 + dict.size() + 1;
  dict.append((64 - unpadded % 64) % 64, ' ');
  dict.push_back('\n');
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kMagic, 6);
  const char version[2] = {1, 0};
  out.write(version, 2);
  const auto len = static_cast<std::uint16_t>(dict.size());
  out.write(reinterpret_cast<const char*>(&len), 2);
  out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace

Grid3<float> read_float(const std::filesystem::path& path) {
  Shape3 shape;
  auto values = read_values<float>(path, shape);
  return Grid3<float>(shape, std::move(values));
}

Grid3<std::uint8_t> read_u8(const std::filesystem::path& path) {
  Shape3 shape;
  auto values = read_values<double>(path, shape);
  std::vector<std::uint8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v < 0.0 || v > 255.0 || v != std::floor(v)) {
      throw FormatError(path.string() + ": value " + std::to_string(v) + " is not a valid label");
    }
    out[i] = static_cast<std::uint8_t>(v);
  }
  return Grid3<std::uint8_t>(shape, std::move(out));
}

void write(const std::filesystem::path& path, const Grid3<float>& g) {
  write_raw(path, g.shape(), "<f4", g.data(), g.size() * sizeof(float));
}

void write(const std::filesystem::path& path, const Grid3<std::uint8_t>& g) {
  write_raw(path, g.shape(), "|u1", g.data(), g.size());
}

}  // namespace oarseg::npy
