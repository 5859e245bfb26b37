#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kden/image.hpp"

namespace kden {

// Binary netpbm: P5 (8- or 16-bit gray, big-endian for maxval > 255) and P4
// (1 = hole). All readers throw IoError on malformed input.

struct PgmData {
  ImageGray image;  // raw stored integers as doubles
  int maxval = 255;
};

PgmData decode_pgm(const std::string& bytes);
std::string encode_pgm8(const ImageGray& img);
std::string encode_pgm16(const ImageGray& img);  // values rounded and clamped to [0, 65535]
HoleMask decode_pbm(const std::string& bytes);
std::string encode_pbm(const HoleMask& mask);

std::string read_file(const std::filesystem::path& path);

PgmData read_pgm(const std::filesystem::path& path);
HoleMask read_pbm(const std::filesystem::path& path);

// Stages several files as temporaries next to their targets and renames them
// into place on commit(). Anything not committed is removed on destruction.
class AtomicWriter {
 public:
  AtomicWriter() = default;
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;
  ~AtomicWriter();

  void stage(const std::filesystem::path& target, const std::string& bytes);
  void commit();

 private:
  struct Pending {
    std::filesystem::path tmp;
    std::filesystem::path target;
  };
  std::vector<Pending> pending_;
};

}  // namespace kden
