#include "tvcert/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace tvcert {

namespace {

std::string describe(std::string_view source, std::size_t offset, std::string_view message) {
  std::ostringstream os;
  os << source << ": byte " << offset << ": " << message;
  return os.str();
}

/// Cursor over a header made of whitespace-separated ASCII tokens.
class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::string_view source) : bytes_(bytes), source_(source) {}

  [[noreturn]] void fail(std::string_view message) const { throw FormatError(source_, pos_, message); }

  void skip_space(bool comments) {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (comments && c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(std::string_view word) {
    if (bytes_.substr(pos_, word.size()) != word) fail("expected '" + std::string(word) + "'");
    pos_ += word.size();
  }

  long long integer(std::string_view what, long long lo, long long hi, bool comments) {
    skip_space(comments);
    const std::size_t start = pos_;
    long long v = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > hi) {
        pos_ = start;
        fail(std::string(what) + " out of range");
      }
      ++pos_;
    }
    if (pos_ == start) fail("expected " + std::string(what));
    if (v < lo) {
      pos_ = start;
      fail(std::string(what) + " out of range");
    }
    return v;
  }

  /// Exactly one whitespace byte ends the header.
  void single_space(char required) {
    if (pos_ >= bytes_.size()) fail("unexpected end of header");
    const char c = bytes_[pos_];
    const bool ok = required ? c == required : (c == ' ' || c == '\t' || c == '\n' || c == '\r');
    if (!ok) fail(required == '\n' ? "expected newline after header" : "expected whitespace after header");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

double load_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<double>(bits);
}

void store_le(double v, char* p) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    p[b] = static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
}

constexpr long long kMaxSide = 1 << 16;

}  // namespace

FormatError::FormatError(std::string_view source, std::size_t offset, std::string_view message)
    : std::runtime_error(describe(source, offset, message)), offset_(offset) {}

Raster parse_fld(std::string_view bytes, std::string_view source) {
  HeaderReader r(bytes, source);
  r.expect("FLD");
  Raster out;
  out.height = static_cast<int>(r.integer("height", 1, kMaxSide, false));
  out.width = static_cast<int>(r.integer("width", 1, kMaxSide, false));
  out.channels = static_cast<int>(r.integer("channel count", 1, 64, false));
  r.single_space('\n');
  const std::size_t count = static_cast<std::size_t>(out.height) * out.width * out.channels;
  const std::size_t start = r.pos();
  const std::size_t need = count * 8;
  if (bytes.size() - start < need)
    throw FormatError(source, bytes.size(),
                      "payload truncated: expected " + std::to_string(need) + " bytes, found " +
                          std::to_string(bytes.size() - start));
  if (bytes.size() - start > need)
    throw FormatError(source, start + need, "trailing bytes after payload");
  out.data.resize(count);
  for (std::size_t k = 0; k < count; ++k) out.data[k] = load_le(bytes.data() + start + 8 * k);
  return out;
}

std::string serialize_fld(const Raster& raster) {
  const std::size_t count = static_cast<std::size_t>(raster.height) * raster.width * raster.channels;
  if (raster.height <= 0 || raster.width <= 0 || raster.channels <= 0 || raster.data.size() != count)
    throw std::invalid_argument("raster dimensions do not match its data");
  std::string out = "FLD " + std::to_string(raster.height) + " " + std::to_string(raster.width) + " " +
                    std::to_string(raster.channels) + "\n";
  const std::size_t start = out.size();
  out.resize(start + 8 * count);
  for (std::size_t k = 0; k < count; ++k) store_le(raster.data[k], out.data() + start + 8 * k);
  return out;
}

Raster parse_pgm(std::string_view bytes, std::string_view source) {
  HeaderReader r(bytes, source);
  r.expect("P5");
  Raster out;
  out.width = static_cast<int>(r.integer("width", 1, kMaxSide, true));
  out.height = static_cast<int>(r.integer("height", 1, kMaxSide, true));
  const long long maxval = r.integer("maxval", 1, 65535, true);
  r.single_space(0);
  out.channels = 1;
  const std::size_t count = static_cast<std::size_t>(out.height) * out.width;
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t start = r.pos();
  if (bytes.size() - start < count * bpp)
    throw FormatError(source, bytes.size(),
                      "payload truncated: expected " + std::to_string(count * bpp) + " bytes, found " +
                          std::to_string(bytes.size() - start));
  out.data.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  for (std::size_t k = 0; k < count; ++k) {
    const unsigned v = bpp == 2 ? (unsigned{p[2 * k]} << 8) | p[2 * k + 1] : p[k];
    if (v > maxval) throw FormatError(source, start + k * bpp, "sample exceeds maxval");
    out.data[k] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return out;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

Raster read_raster(const std::filesystem::path& path) {
  const std::string bytes = read_bytes(path);
  const std::string name = path.string();
  if (bytes.starts_with("P5")) return parse_pgm(bytes, name);
  return parse_fld(bytes, name);
}

void write_fld(const std::filesystem::path& path, const Raster& raster) {
  write_bytes(path, serialize_fld(raster));
}

DomainPtr domain_of(const Raster& raster, double spacing) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(raster.height) * raster.width);
  for (std::size_t k = 0; k < mask.size(); ++k)
    mask[k] = std::isnan(raster.data[k * raster.channels]) ? 0 : 1;
  return make_domain(raster.height, raster.width, spacing, std::move(mask));
}

ScalarField channel(const Raster& raster, int c, const DomainPtr& domain) {
  if (c < 0 || c >= raster.channels) throw std::invalid_argument("channel index out of range");
  if (domain->height() != raster.height || domain->width() != raster.width)
    throw std::invalid_argument("raster and domain sizes differ");
  ScalarField u(domain);
  const auto mask = domain->mask();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double v = raster.data[k * raster.channels + c];
    if (!mask[k]) continue;
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite value at pixel " + std::to_string(k) + " of channel " +
                                  std::to_string(c));
    u[k] = v;
  }
  return u;
}

VectorField channel_pair(const Raster& raster, int cx, int cy, const DomainPtr& domain) {
  const ScalarField x = channel(raster, cx, domain);
  const ScalarField y = channel(raster, cy, domain);
  return VectorField(domain, std::vector<double>(x.values().begin(), x.values().end()),
                     std::vector<double>(y.values().begin(), y.values().end()));
}

Raster pack(const GridDomain& domain, const std::vector<std::span<const double>>& planes) {
  Raster out;
  out.height = domain.height();
  out.width = domain.width();
  out.channels = static_cast<int>(planes.size());
  if (planes.empty()) throw std::invalid_argument("nothing to pack");
  out.data.resize(domain.size() * planes.size());
  const auto mask = domain.mask();
  for (std::size_t k = 0; k < domain.size(); ++k)
    for (std::size_t c = 0; c < planes.size(); ++c) {
      if (planes[c].size() != domain.size()) throw std::invalid_argument("plane size mismatch");
      out.data[k * planes.size() + c] = mask[k] ? planes[c][k] : std::numeric_limits<double>::quiet_NaN();
    }
  return out;
}

Raster pack(const ScalarField& u) { return pack(u.domain(), {u.values()}); }

Raster pack(const VectorField& g) { return pack(g.domain(), {g.x(), g.y()}); }

}  // namespace tvcert
