#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "utilrank/corpus.hpp"
#include "utilrank/ingest.hpp"

namespace testing {

inline std::filesystem::path fixture_dir() { return UTILRANK_FIXTURE_DIR; }

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "utilrank-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline utilrank::Segment make_segment(std::string id, std::string text) {
  utilrank::Segment s;
  s.doc_id = id.substr(0, id.find('#'));
  s.segment_id = std::move(id);
  s.text = std::move(text);
  s.char_span = {0, s.text.size()};
  return s;
}

inline std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "revenue", "margin",   "leverage", "debt",    "cash",   "liquidity", "covenant", "equity",  "growth",
      "ratio",   "interest", "coverage", "capital", "budget", "board",     "outlook",  "segment", "risk",
      "the",     "of",       "and",      "with",    "is",     "credit",    "营收",     "增长",    "dividend"};
  return words;
}

inline std::string random_sentence(std::mt19937_64& rng, std::size_t min_words = 3, std::size_t max_words = 12) {
  const auto& v = vocabulary();
  std::string out;
  const std::size_t n = min_words + below(rng, max_words - min_words + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    if (below(rng, 8) == 0) {
      out += std::to_string(below(rng, 1000));
    } else {
      out += v[below(rng, v.size())];
    }
  }
  return out + ".";
}

/// Random markdown body: optional preamble, headed sections, occasional pipe
/// or HTML tables and page markers.
inline std::string random_markdown(std::mt19937_64& rng) {
  std::string body;
  int page = 1;
  if (below(rng, 2)) body += random_sentence(rng) + "\n\n";
  const std::size_t sections = 1 + below(rng, 5);
  for (std::size_t s = 0; s < sections; ++s) {
    if (below(rng, 3) == 0) body += "<!-- page: " + std::to_string(++page) + " -->\n\n";
    body += std::string(1 + below(rng, 3), '#') + " " + random_sentence(rng, 1, 3) + "\n\n";
    const std::size_t paragraphs = below(rng, 3);
    for (std::size_t p = 0; p < paragraphs; ++p) body += random_sentence(rng) + " " + random_sentence(rng) + "\n\n";
    switch (below(rng, 4)) {
      case 0:
        body += "| Item | FY2023 |\n|---|---|\n| " + random_sentence(rng, 1, 2) + " | " +
                std::to_string(below(rng, 999)) + " |\n\n";
        break;
      case 1:
        body += "<table><tr><th rowspan=\"2\">Item</th><th>A</th></tr><tr><th>B</th></tr><tr><td>" +
                random_sentence(rng, 1, 2) + "</td><td>" + std::to_string(below(rng, 99)) + "</td></tr></table>\n\n";
        break;
      default:
        break;
    }
  }
  if (body.find_first_not_of(" \n") == std::string::npos || body.find('#') == std::string::npos) {
    body += "# Notes\n\nnothing.\n";
  }
  return body;
}

inline utilrank::Corpus random_corpus(std::mt19937_64& rng, std::size_t n_docs) {
  utilrank::Corpus corpus;
  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::string id = "doc" + std::to_string(d);
    corpus.add(utilrank::parse_document(random_markdown(rng), utilrank::DocumentMeta{id, "Document " + id, id + ".md"}));
  }
  return corpus;
}

}  // namespace testing
