#include "lhr/model/lss_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lhr/error.hpp"

namespace lhr::model {
namespace {

constexpr char kMagic[8] = {'L', 'H', 'R', 'L', 'S', 'S', '\0', '\n'};
constexpr std::uint64_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return true;
}

}  // namespace

void write_lss(std::ostream& out, const std::vector<LssRecord>& records, LssFormat format) {
  const std::size_t dim = records.empty() ? 0 : records.front().values.size();
  for (const auto& r : records) {
    if (r.values.size() != dim) throw InvalidInput("LSS records must share one vector length");
  }
  if (format == LssFormat::binary) {
    out.write(kMagic, sizeof kMagic);
    put_u64(out, kVersion);
    put_u64(out, dim);
    for (const auto& r : records) {
      put_u64(out, r.sentence);
      put_u64(out, r.token);
      for (double v : r.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
    return;
  }
  char buf[32];
  for (const auto& r : records) {
    out << r.sentence << '\t' << r.token << '\t';
    for (std::size_t k = 0; k < r.values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", r.values[k]);
      out << (k ? " " : "") << buf;
    }
    out << '\n';
  }
}

std::vector<LssRecord> read_lss(std::istream& in, LssFormat format) {
  std::vector<LssRecord> out;
  if (format == LssFormat::binary) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
      throw FormatError("not a binary LSS file");
    }
    std::uint64_t version = 0, dim = 0;
    if (!get_u64(in, version) || version != kVersion) throw FormatError("unsupported LSS version");
    if (!get_u64(in, dim)) throw FormatError("LSS header truncated");
    LssRecord r;
    while (get_u64(in, r.sentence)) {
      if (!get_u64(in, r.token)) throw FormatError("LSS record truncated");
      r.values.resize(dim);
      for (double& v : r.values) {
        std::uint64_t bits = 0;
        if (!get_u64(in, bits)) throw FormatError("LSS record truncated");
        v = std::bit_cast<double>(bits);
      }
      out.push_back(r);
    }
    return out;
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    LssRecord r;
    if (!(fields >> r.sentence >> r.token)) throw FormatError("LSS line " + std::to_string(lineno) + ": bad ids");
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw FormatError("LSS line " + std::to_string(lineno) + ": bad value '" + tok + "'");
      }
      r.values.push_back(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_lss(const std::filesystem::path& path, const std::vector<LssRecord>& records, LssFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_lss(out, records, format);
}

std::vector<LssRecord> read_lss(const std::filesystem::path& path, LssFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_lss(in, format);
}

}  // namespace lhr::model
