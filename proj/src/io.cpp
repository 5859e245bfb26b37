#include "kden/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

namespace kden {

namespace {

// Header tokenizer for netpbm: whitespace separated, '#' comments to EOL.
class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::string magic() {
    if (bytes_.size() < 2) throw IoError("netpbm: truncated header");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  long integer(const char* what) {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ == start || pos_ - start > 9) {
      throw IoError(std::string("netpbm: bad header field '") + what + "'");
    }
    return std::stol(bytes_.substr(start, pos_ - start));
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw IoError("netpbm: missing separator before raster");
    }
    return pos_ + 1;
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void check_dims(long w, long h) {
  if (w < 1 || h < 1 || w > 65536 || h > 65536) throw IoError("netpbm: invalid dimensions");
}

std::string header(const char* magic, int w, int h, int maxval) {
  std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
  if (maxval > 0) s += std::to_string(maxval) + "\n";
  return s;
}

}  // namespace

PgmData decode_pgm(const std::string& bytes) {
  HeaderReader hr(bytes);
  if (hr.magic() != "P5") throw IoError("pgm: expected binary P5 magic");
  const long w = hr.integer("width");
  const long h = hr.integer("height");
  const long maxval = hr.integer("maxval");
  check_dims(w, h);
  if (maxval < 1 || maxval > 65535) throw IoError("pgm: maxval out of range");
  const std::size_t start = hr.raster_start();
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() < start + n * bpp) throw IoError("pgm: truncated raster");

  PgmData out{ImageGray(static_cast<int>(w), static_cast<int>(h)), static_cast<int>(maxval)};
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bpp == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    if (static_cast<long>(v) > maxval) throw IoError("pgm: sample exceeds maxval");
    out.image.samples[i] = static_cast<double>(v);
  }
  return out;
}

std::string encode_pgm8(const ImageGray& img) {
  std::string s = header("P5", img.width, img.height, 255);
  s.reserve(s.size() + img.size());
  for (double v : img.samples) s.push_back(static_cast<char>(quantize_8bit(v)));
  return s;
}

std::string encode_pgm16(const ImageGray& img) {
  std::string s = header("P5", img.width, img.height, 65535);
  s.reserve(s.size() + 2 * img.size());
  for (double v : img.samples) {
    const double r = std::isnan(v) ? 0.0 : std::clamp(std::round(v), 0.0, 65535.0);
    const auto u = static_cast<std::uint16_t>(r);
    s.push_back(static_cast<char>(u >> 8));
    s.push_back(static_cast<char>(u & 0xff));
  }
  return s;
}

HoleMask decode_pbm(const std::string& bytes) {
  HeaderReader hr(bytes);
  if (hr.magic() != "P4") throw IoError("pbm: expected binary P4 magic");
  const long w = hr.integer("width");
  const long h = hr.integer("height");
  check_dims(w, h);
  const std::size_t start = hr.raster_start();
  const std::size_t stride = (static_cast<std::size_t>(w) + 7) / 8;
  if (bytes.size() < start + stride * static_cast<std::size_t>(h)) throw IoError("pbm: truncated raster");

  HoleMask mask(static_cast<int>(w), static_cast<int>(h));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const unsigned char byte = p[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x) / 8];
      mask.set(x, y, (byte >> (7 - x % 8)) & 1);
    }
  }
  return mask;
}

std::string encode_pbm(const HoleMask& mask) {
  std::string s = header("P4", mask.width, mask.height, 0);
  const std::size_t stride = (static_cast<std::size_t>(mask.width) + 7) / 8;
  for (int y = 0; y < mask.height; ++y) {
    std::string row(stride, '\0');
    for (int x = 0; x < mask.width; ++x) {
      if (mask.hole(x, y)) row[static_cast<std::size_t>(x) / 8] |= static_cast<char>(0x80 >> (x % 8));
    }
    s += row;
  }
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

PgmData read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

HoleMask read_pbm(const std::filesystem::path& path) {
  try {
    return decode_pbm(read_file(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

AtomicWriter::~AtomicWriter() {
  for (const auto& p : pending_) {
    std::error_code ec;
    std::filesystem::remove(p.tmp, ec);
  }
}

void AtomicWriter::stage(const std::filesystem::path& target, const std::string& bytes) {
  std::filesystem::path tmp = target;
  tmp += ".tmp" + std::to_string(pending_.size());
  // Registered before writing so a failed write is still cleaned up.
  pending_.push_back({tmp, target});
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + tmp.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError("error writing " + tmp.string());
}

void AtomicWriter::commit() {
  for (std::size_t k = 0; k < pending_.size(); ++k) {
    std::error_code ec;
    std::filesystem::rename(pending_[k].tmp, pending_[k].target, ec);
    if (ec) {
      // Roll back the files already moved so no partial output set remains.
      for (std::size_t j = 0; j < k; ++j) std::filesystem::remove(pending_[j].target, ec);
      throw IoError("cannot rename " + pending_[k].tmp.string() + " to " +
                    pending_[k].target.string());
    }
  }
  pending_.clear();
}

}  // namespace kden
