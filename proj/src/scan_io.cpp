#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "radar_odom/error.hpp"
#include "radar_odom/io.hpp"

namespace radar_odom {
namespace {

constexpr std::array<char, 8> kMagic = {'R', 'O', 'D', 'S', 'C', 'A', 'N', '1'};

template <typename Word>
void put_le(std::ostream& out, Word word) {
  std::array<char, sizeof(Word)> bytes{};
  for (std::size_t i = 0; i < sizeof(Word); ++i) bytes[i] = static_cast<char>((word >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename Word>
Word get_le(std::istream& in) {
  std::array<unsigned char, sizeof(Word)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw_error(ErrorCode::kIo, "scan file truncated");
  Word word = 0;
  for (std::size_t i = 0; i < sizeof(Word); ++i) word |= static_cast<Word>(bytes[i]) << (8 * i);
  return word;
}

void put_double(std::ostream& out, double value) { put_le(out, std::bit_cast<std::uint64_t>(value)); }
double get_double(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_scan(const PolarScan& scan, std::ostream& out) {
  const SensorMeta& meta = scan.meta();
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint32_t>(meta.num_azimuths));
  put_le(out, static_cast<std::uint32_t>(meta.num_range_bins));
  put_double(out, meta.range_resolution);
  put_double(out, meta.scan_period);
  put_double(out, scan.timestamp());
  const Grid& power = scan.power();
  for (Eigen::Index i = 0; i < power.size(); ++i) put_double(out, power.data()[i]);
  if (!out) throw_error(ErrorCode::kIo, "failed writing scan");
}

PolarScan read_scan(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw_error(ErrorCode::kIo, "not a scan file (bad magic)");
  SensorMeta meta;
  const auto m = get_le<std::uint32_t>(in);
  const auto n = get_le<std::uint32_t>(in);
  if (m < 2 || n < 2 || m > (1U << 16) || n > (1U << 20)) throw_error(ErrorCode::kIo, "scan header has bad shape");
  meta.num_azimuths = static_cast<int>(m);
  meta.num_range_bins = static_cast<int>(n);
  meta.range_resolution = get_double(in);
  meta.scan_period = get_double(in);
  const double timestamp = get_double(in);
  Grid power(meta.num_azimuths, meta.num_range_bins);
  for (Eigen::Index i = 0; i < power.size(); ++i) power.data()[i] = get_double(in);
  try {
    return PolarScan(meta, std::move(power), timestamp);
  } catch (const Error& error) {
    throw_error(ErrorCode::kIo, std::string("invalid scan contents: ") + error.what());
  }
}

void write_scan_file(const PolarScan& scan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_scan(scan, out);
}

PolarScan read_scan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kIo, "cannot open " + path.string());
  return read_scan(in);
}

}  // namespace radar_odom
