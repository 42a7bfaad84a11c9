#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace medse {

struct EntityMention {
  std::string entity_id;
  std::string surface;
  int start = 0;  // token index, inclusive
  int end = 0;    // token index, exclusive
};

struct Sentence {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  int word_count = 0;
  // Dictionary-resolved mentions, cached by partition().
  std::vector<EntityMention> mentions;
};

struct DictionaryEntry {
  std::string canonical_name;
  std::string definition;
};

// Maps entity ids to definition sentences plus the surface forms used for
// matching. Surfaces are matched case-insensitively on token sequences.
class DefinitionDictionary {
 public:
  void add_entry(const std::string& id, const std::string& canonical_name,
                 const std::vector<std::string>& surfaces, const std::string& definition);

  bool contains(const std::string& id) const { return entries_.count(id) > 0; }
  const DictionaryEntry& entry(const std::string& id) const;
  const std::map<std::string, DictionaryEntry>& entries() const { return entries_; }
  const std::map<std::string, std::string>& surface_forms() const { return surface_forms_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, DictionaryEntry> entries_;       // id -> entry
  std::map<std::string, std::string> surface_forms_;     // lowercase surface -> id
};

struct CorpusSplit {
  std::vector<Sentence> s_all;
  std::vector<Sentence> s_ent;   // >= 1 dictionary mention, mentions cached
  std::vector<Sentence> s_none;  // zero mentions of any kind
};

struct EntityStats {
  int unique_count = 0;
  long long total_occurrences = 0;
  double top_decile_share = 0.0;
  double per_sentence_mean = 0.0;
  double per_sentence_std = 0.0;
};

// Splits text into word tokens (runs of alphanumerics, bytes >= 0x80 kept
// inside words) and single-character punctuation tokens; whitespace dropped.
std::vector<std::string> tokenize(const std::string& text);

std::string to_lower(const std::string& s);

// Whitespace-delimited word count of the raw text.
int count_words(const std::string& text);

// Sentence segmentation on terminal punctuation followed by whitespace,
// then the minimum-length filter.
std::vector<Sentence> segment_and_filter(const std::vector<std::string>& raw_documents,
                                         int min_words = 10);

// Pluggable mention source. The default implementation matches dictionary
// surface forms; a real NER can be dropped in behind this interface.
class EntityAnnotator {
 public:
  virtual ~EntityAnnotator() = default;
  virtual std::vector<EntityMention> annotate(const Sentence& sentence) const = 0;
};

// Case-insensitive longest-match, non-overlapping, left-to-right greedy
// matching of dictionary surface forms against token spans.
class DictionaryAnnotator : public EntityAnnotator {
 public:
  explicit DictionaryAnnotator(const DefinitionDictionary& dict);
  std::vector<EntityMention> annotate(const Sentence& sentence) const override;

 private:
  std::unordered_map<std::string, std::pair<std::string, int>> index_;  // key -> (id, n_tokens)
  int max_surface_tokens_ = 0;
};

std::vector<EntityMention> annotate_entities(const Sentence& sentence,
                                             const DefinitionDictionary& dict);

CorpusSplit partition(const std::vector<Sentence>& sentences, const DefinitionDictionary& dict);
CorpusSplit partition(const std::vector<Sentence>& sentences, const DefinitionDictionary& dict,
                      const EntityAnnotator& annotator);

// Samples round(total*ent_fraction) sentences from s_ent and the rest from
// s_none, without replacement, shuffled deterministically under rng_seed.
std::vector<Sentence> mix_split(const CorpusSplit& split, double ent_fraction, int total,
                                uint64_t rng_seed);

EntityStats entity_statistics(const CorpusSplit& split);

}  // namespace medse
