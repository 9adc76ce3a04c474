#pragma once
// Field files (FLD, PGM) and the mapping between multi-channel rasters and
// grid fields. Pixels outside the mask are stored as NaN.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tvcert/grid.hpp"

namespace tvcert {

/// Malformed input; `offset` is the byte position of the first bad token.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string_view source, std::size_t offset, std::string_view message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Row-major, channel-minor raster.
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  double at(int row, int col, int channel) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
  bool operator==(const Raster&) const = default;
};

/// "FLD <H> <W> <C>\n" followed by H*W*C little-endian binary64 values.
Raster parse_fld(std::string_view bytes, std::string_view source = "<memory>");
std::string serialize_fld(const Raster& raster);

/// Binary PGM (P5), maxval up to 65535, rescaled to [0, 1]; one channel.
Raster parse_pgm(std::string_view bytes, std::string_view source = "<memory>");

std::string read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, std::string_view bytes);

/// Dispatches on the magic: "FLD" or "P5".
Raster read_raster(const std::filesystem::path& path);
void write_fld(const std::filesystem::path& path, const Raster& raster);

/// Mask = pixels whose channel 0 is not NaN.
DomainPtr domain_of(const Raster& raster, double spacing);
ScalarField channel(const Raster& raster, int c, const DomainPtr& domain);
VectorField channel_pair(const Raster& raster, int cx, int cy, const DomainPtr& domain);

/// Packs equally sized planes; NaN outside the mask.
Raster pack(const GridDomain& domain, const std::vector<std::span<const double>>& planes);
Raster pack(const ScalarField& u);
Raster pack(const VectorField& g);

}  // namespace tvcert
