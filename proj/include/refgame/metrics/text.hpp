#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace refgame::metrics {

/// Lowercased alphanumeric runs of `text`, in order. Stopwords are kept.
std::vector<std::string> word_tokens(std::string_view text);

/// The shipped English stopword list.
const std::set<std::string>& stopwords();

/// Content words of `text` in order: word_tokens minus stopwords.
std::vector<std::string> content_tokens(std::string_view text);

/// Content words as a multiset (token -> count).
using TokenMultiset = std::map<std::string, int>;
TokenMultiset tokenize_content(std::string_view text);
int size(const TokenMultiset& tokens);

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multiset overlap of the two REs' content words, normalised by the
/// current RE's length. Throws EmptyInput when `curr` has no content words.
double rlo(std::string_view prev, std::string_view curr);
double rlo(const TokenMultiset& prev, const TokenMultiset& curr);

/// Set overlap of content words. Throws EmptyInput when both are empty.
double jaccard(std::string_view prev, std::string_view curr);
double jaccard(const TokenMultiset& prev, const TokenMultiset& curr);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Recall and precision of `candidate` against `reference` on their longest
/// common subsequence, and the harmonic mean of the two.
struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};
RougeL rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);

/// ROUGE-L F1 on word_tokens (stopwords kept). 0 when either side is empty.
double rouge_l_f1(std::string_view reference, std::string_view candidate);
double rouge_l_f1(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);

}  // namespace refgame::metrics
