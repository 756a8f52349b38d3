#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "opnav/error.hpp"
#include "opnav/search/index.hpp"

namespace opnav {

namespace {

constexpr char kMagic[8] = {'O', 'P', 'N', 'V', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_ += s;
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  const std::string& bytes() const { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  bool u64(std::uint64_t& v) {
    if (pos_ + 8 > data_.size()) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return true;
  }
  bool f64(double& v) {
    std::uint64_t bits;
    if (!u64(bits)) return false;
    v = std::bit_cast<double>(bits);
    return true;
  }
  bool str(std::string& s) {
    std::uint64_t n;
    if (!u64(n) || n > data_.size() - pos_) return false;
    s.assign(data_, pos_, n);
    pos_ += n;
    return true;
  }
  bool raw(char* p, std::size_t n) {
    if (pos_ + n > data_.size()) return false;
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
    return true;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_index_cache(const SearchIndex& index, const std::string& path) {
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u64(kFormatVersion);
  w.u64(index.corpus_version);
  w.f64(index.keyword_boost);
  w.f64(index.avg_doc_len);
  w.u64(index.doc_count);
  w.u64(index.doc_stats.size());
  for (const auto& [id, len] : index.doc_stats) {
    w.str(id);
    w.u64(len);
  }
  w.u64(index.postings.size());
  for (const auto& [term, list] : index.postings) {
    w.str(term);
    w.u64(list.size());
    for (const auto& p : list) {
      w.str(p.node_id);
      w.f64(p.term_frequency);
    }
  }

  auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write index cache '" + tmp + "'");
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to index cache '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::IoError, "cannot move index cache into place at '" + path + "'");
  }
}

std::optional<SearchIndex> load_index_cache(const std::string& path, std::uint64_t expected_corpus_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  Reader r(buf.str());

  char magic[sizeof kMagic];
  std::uint64_t format = 0, version = 0, n = 0;
  if (!r.raw(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) return std::nullopt;
  if (!r.u64(format) || format != kFormatVersion) return std::nullopt;
  if (!r.u64(version) || version != expected_corpus_version) return std::nullopt;

  SearchIndex index;
  index.corpus_version = version;
  std::uint64_t doc_count = 0;
  if (!r.f64(index.keyword_boost) || !r.f64(index.avg_doc_len) || !r.u64(doc_count) || !r.u64(n)) return std::nullopt;
  index.doc_count = doc_count;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string id;
    std::uint64_t len;
    if (!r.str(id) || !r.u64(len)) return std::nullopt;
    index.doc_stats[id] = len;
  }
  if (!r.u64(n)) return std::nullopt;
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string term;
    std::uint64_t count;
    if (!r.str(term) || !r.u64(count)) return std::nullopt;
    auto& list = index.postings[term];
    for (std::uint64_t j = 0; j < count; ++j) {
      Posting p;
      if (!r.str(p.node_id) || !r.f64(p.term_frequency)) return std::nullopt;
      index.doc_terms[p.node_id].push_back(term);
      list.push_back(std::move(p));
    }
  }
  if (!r.done() || index.doc_stats.size() != index.doc_count) return std::nullopt;
  return index;
}

}  // namespace opnav
