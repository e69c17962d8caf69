#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tea::serial {

// CRC-64/XZ (ECMA-182 polynomial, reflected, init/xorout all-ones).
class Crc64 {
 public:
  Crc64() = default;
  void update(const void* data, std::size_t n);
  std::uint64_t value() const { return crc_ ^ 0xFFFFFFFFFFFFFFFFull; }

 private:
  std::uint64_t crc_ = 0xFFFFFFFFFFFFFFFFull;
};

std::uint64_t crc64(const void* data, std::size_t n);
std::uint64_t crc64_file(const std::filesystem::path& path);

// Little-endian writer that checksums everything it emits. All on-disk
// formats in this project go through these two classes; byte layouts are
// documented in docs/FORMATS.md.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  ~Writer();

  void bytes(const void* data, std::size_t n);
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64_array(std::span<const double> v);
  void magic(const char (&m)[9]) { bytes(m, 8); }

  std::uint64_t crc() const { return crc_.value(); }
  // Appends the running CRC64 (not itself checksummed) and closes the file.
  void finish_with_crc();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  Crc64 crc_;
  bool finished_ = false;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  void bytes(void* data, std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  void f64_array(std::span<double> v);
  void expect_magic(const char (&m)[9]);

  // Reads the trailing CRC64 and verifies it against everything consumed so
  // far; throws std::runtime_error on mismatch or trailing garbage.
  void verify_crc_trailer();
  bool at_eof();

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  Crc64 crc_;
};

}  // namespace tea::serial
