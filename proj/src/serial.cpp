#include "tea/serial.hpp"

#include <array>
#include <bit>

namespace tea::serial {
namespace {

constexpr std::uint64_t kPoly = 0xC96C5795D7870F42ull;  // ECMA-182 reflected

std::array<std::uint64_t, 256> make_table() {
  std::array<std::uint64_t, 256> table{};
  for (std::uint64_t b = 0; b < 256; ++b) {
    std::uint64_t crc = b;
    for (int i = 0; i < 8; ++i) {
      crc = (crc & 1) ? (crc >> 1) ^ kPoly : crc >> 1;
    }
    table[b] = crc;
  }
  return table;
}

const std::array<std::uint64_t, 256>& table() {
  static const auto t = make_table();
  return t;
}

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

}  // namespace

void Crc64::update(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  const auto& t = table();
  for (std::size_t i = 0; i < n; ++i) {
    crc_ = t[(crc_ ^ p[i]) & 0xFF] ^ (crc_ >> 8);
  }
}

std::uint64_t crc64(const void* data, std::size_t n) {
  Crc64 c;
  c.update(data, n);
  return c.value();
}

std::uint64_t crc64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for checksum: " + path.string());
  Crc64 c;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    c.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return c.value();
}

Writer::Writer(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
}

Writer::~Writer() = default;

void Writer::bytes(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
  crc_.update(data, n);
}

void Writer::u32(std::uint32_t v) { bytes(&v, 4); }
void Writer::u64(std::uint64_t v) { bytes(&v, 8); }
void Writer::f64(double v) { bytes(&v, 8); }

void Writer::f64_array(std::span<const double> v) {
  if (!v.empty()) bytes(v.data(), v.size() * sizeof(double));
}

void Writer::finish_with_crc() {
  const std::uint64_t c = crc_.value();
  out_.write(reinterpret_cast<const char*>(&c), 8);
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
  out_.close();
  finished_ = true;
}

Reader::Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
  if (!in_) throw std::runtime_error("cannot open for reading: " + path.string());
}

void Reader::bytes(void* data, std::size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw std::runtime_error("truncated file: " + path_.string());
  }
  crc_.update(data, n);
}

std::uint8_t Reader::u8() {
  std::uint8_t v;
  bytes(&v, 1);
  return v;
}

std::uint32_t Reader::u32() {
  std::uint32_t v;
  bytes(&v, 4);
  return v;
}

std::uint64_t Reader::u64() {
  std::uint64_t v;
  bytes(&v, 8);
  return v;
}

double Reader::f64() {
  double v;
  bytes(&v, 8);
  return v;
}

void Reader::f64_array(std::span<double> v) {
  if (!v.empty()) bytes(v.data(), v.size() * sizeof(double));
}

void Reader::expect_magic(const char (&m)[9]) {
  char got[8];
  bytes(got, 8);
  if (std::memcmp(got, m, 8) != 0) {
    throw std::runtime_error("bad magic in " + path_.string() + " (expected " +
                             std::string(m, 8) + ")");
  }
}

void Reader::verify_crc_trailer() {
  const std::uint64_t expect = crc_.value();
  std::uint64_t stored;
  in_.read(reinterpret_cast<char*>(&stored), 8);
  if (in_.gcount() != 8) throw std::runtime_error("truncated file: " + path_.string());
  if (stored != expect) throw std::runtime_error("checksum mismatch: " + path_.string());
  if (!at_eof()) throw std::runtime_error("trailing bytes after checksum: " + path_.string());
}

bool Reader::at_eof() {
  return in_.peek() == std::ifstream::traits_type::eof();
}

}  // namespace tea::serial
