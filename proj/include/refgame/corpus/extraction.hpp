#pragma once

#include "refgame/agents/provider.hpp"
#include "refgame/agents/replies.hpp"
#include "refgame/corpus/dialogue.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace refgame::corpus {

/// Basket id -> the director's referring expression in one round. Several
/// phrases for one basket are joined with "; ".
using ReSet = std::map<std::string, std::string>;

inline constexpr std::string_view kPhraseSeparator = "; ";

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact REs from the inline tags of scripted directors, one entry per
/// target. Throws ExtractionError when the director never tagged anything.
ReSet extract_res_tagged(const Dialogue& dialogue);

/// "Director: ..." / "Matcher: ..." lines in chat order.
std::string transcript_text(const Dialogue& dialogue);

/// The extraction prompt filled with `n_objects` and the transcript.
std::string extraction_prompt(const Dialogue& dialogue, int n_objects);

/// Parses an {"object_#k": "..."} reply; object k is the basket at grid
/// position k. Throws agents::ReplyError (Malformed) on anything else.
ReSet parse_extraction_reply(std::string_view raw, const Dialogue& dialogue, int n_objects);

/// Extraction through a completion provider, retrying rejected replies up to
/// `max_attempts` in total. Throws agents::RetriesExhausted.
ReSet extract_res_llm(const Dialogue& dialogue, int n_objects, agents::CompletionProvider& provider,
                      const std::string& model_id = "extractor", int max_attempts = 3);

/// Stand-in extractor that reads the scripted director templates back out
/// of the prompt's transcript. It reproduces extract_res_tagged exactly on
/// scripted dialogues.
class ScriptedExtractionProvider final : public agents::CompletionProvider {
 public:
  std::string complete(const agents::CompletionRequest& request) override;
};

/// Mean ROUGE-L F1 over baskets between predicted and gold REs. Throws
/// ExtractionError when the key sets differ.
double validate_extraction(const ReSet& predicted, const ReSet& gold);

/// RE sets of a corpus, keyed like its dialogues.
struct ReRecord {
  std::string pair_id;
  int round_index = 0;
  ReSet res;
  bool operator==(const ReRecord&) const = default;
};

void export_res_jsonl(const std::filesystem::path& path, std::span<const ReRecord> records);
std::vector<ReRecord> import_res_jsonl(const std::filesystem::path& path);

}  // namespace refgame::corpus
