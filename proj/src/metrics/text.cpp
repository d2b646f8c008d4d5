#include "refgame/metrics/text.hpp"

#include "refgame/resources.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace refgame::metrics {

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = [] {
    std::set<std::string> out;
    std::istringstream in{std::string(resources::stopwords_en())};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
      if (!line.empty()) out.insert(line);
    }
    return out;
  }();
  return words;
}

std::vector<std::string> content_tokens(std::string_view text) {
  auto tokens = word_tokens(text);
  const auto& stop = stopwords();
  std::erase_if(tokens, [&](const std::string& t) { return stop.count(t) > 0; });
  return tokens;
}

TokenMultiset tokenize_content(std::string_view text) {
  TokenMultiset out;
  for (auto& t : content_tokens(text)) ++out[t];
  return out;
}

int size(const TokenMultiset& tokens) {
  int n = 0;
  for (const auto& [_, count] : tokens) n += count;
  return n;
}

double rlo(const TokenMultiset& prev, const TokenMultiset& curr) {
  const int denom = size(curr);
  if (denom == 0) throw EmptyInput("current referring expression has no content words");
  int shared = 0;
  for (const auto& [token, count] : curr) {
    auto it = prev.find(token);
    if (it != prev.end()) shared += std::min(count, it->second);
  }
  return static_cast<double>(shared) / denom;
}

double rlo(std::string_view prev, std::string_view curr) {
  return rlo(tokenize_content(prev), tokenize_content(curr));
}

double jaccard(const TokenMultiset& prev, const TokenMultiset& curr) {
  int inter = 0;
  int uni = static_cast<int>(prev.size());
  for (const auto& [token, _] : curr) {
    if (prev.count(token)) {
      ++inter;
    } else {
      ++uni;
    }
  }
  if (uni == 0) throw EmptyInput("both referring expressions have no content words");
  return static_cast<double>(inter) / uni;
}

double jaccard(std::string_view prev, std::string_view curr) {
  return jaccard(tokenize_content(prev), tokenize_content(curr));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (const auto& x : a) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = x == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

RougeL rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& candidate) {
  RougeL out;
  if (reference.empty() || candidate.empty()) return out;
  const double lcs = static_cast<double>(lcs_length(reference, candidate));
  if (lcs == 0.0) return out;
  out.precision = lcs / static_cast<double>(candidate.size());
  out.recall = lcs / static_cast<double>(reference.size());
  out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

double rouge_l_f1(const std::vector<std::string>& reference, const std::vector<std::string>& candidate) {
  return rouge_l(reference, candidate).f1;
}

double rouge_l_f1(std::string_view reference, std::string_view candidate) {
  return rouge_l_f1(word_tokens(reference), word_tokens(candidate));
}

}  // namespace refgame::metrics
