#pragma once

// Export format for latent syntactic structures: one record per token holding
// the sentence id, the token index (both 1-based) and [c_i; h_i].
//
// Text: one line per record, "sent<TAB>token<TAB>v1 v2 ... vd", values printed
// with 17 significant digits so they parse back bit-exactly.
// Binary: magic "LHRLSS\0\n", u64 version, u64 d, then per record u64 sent,
// u64 token and d IEEE-754 doubles; all integers and doubles little-endian.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace lhr::model {

struct LssRecord {
  std::uint64_t sentence = 0;
  std::uint64_t token = 0;
  std::vector<double> values;

  friend bool operator==(const LssRecord&, const LssRecord&) = default;
};

enum class LssFormat { text, binary };

void write_lss(std::ostream& out, const std::vector<LssRecord>& records, LssFormat format);
std::vector<LssRecord> read_lss(std::istream& in, LssFormat format);

void write_lss(const std::filesystem::path& path, const std::vector<LssRecord>& records, LssFormat format);
std::vector<LssRecord> read_lss(const std::filesystem::path& path, LssFormat format);

}  // namespace lhr::model
