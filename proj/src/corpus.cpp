#include "medse/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "medse/rng.hpp"

namespace medse {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80 || c == '\''; }

std::string span_key(const std::vector<std::string>& tokens, int start, int end) {
  std::string key;
  for (int i = start; i < end; ++i) {
    if (i > start) key += '\x1f';
    key += to_lower(tokens[i]);
  }
  return key;
}

}  // namespace

std::string to_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isspace(c)) {
      ++i;
    } else if (is_word_byte(c)) {
      std::size_t j = i;
      while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
      tokens.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      tokens.emplace_back(1, text[i]);
      ++i;
    }
  }
  return tokens;
}

int count_words(const std::string& text) {
  int count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<Sentence> segment_and_filter(const std::vector<std::string>& raw_documents,
                                         int min_words) {
  if (min_words < 1) throw std::invalid_argument("segment_and_filter: min_words must be >= 1");
  std::vector<Sentence> out;
  for (std::size_t d = 0; d < raw_documents.size(); ++d) {
    const std::string& doc = raw_documents[d];
    std::size_t start = 0;
    int sent_idx = 0;
    auto flush = [&](std::size_t end_pos) {
      std::size_t b = start, e = end_pos;
      while (b < e && std::isspace(static_cast<unsigned char>(doc[b]))) ++b;
      while (e > b && std::isspace(static_cast<unsigned char>(doc[e - 1]))) --e;
      start = end_pos;
      if (b >= e) return;
      std::string text = doc.substr(b, e - b);
      int words = count_words(text);
      if (words < min_words) {
        ++sent_idx;
        return;
      }
      Sentence s;
      s.id = "d" + std::to_string(d) + "_s" + std::to_string(sent_idx++);
      s.text = std::move(text);
      s.tokens = tokenize(s.text);
      s.word_count = words;
      out.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < doc.size(); ++i) {
      char c = doc[i];
      if ((c == '.' || c == '!' || c == '?') &&
          (i + 1 == doc.size() || std::isspace(static_cast<unsigned char>(doc[i + 1])))) {
        flush(i + 1);
      }
    }
    flush(doc.size());
  }
  return out;
}

void DefinitionDictionary::add_entry(const std::string& id, const std::string& canonical_name,
                                     const std::vector<std::string>& surfaces,
                                     const std::string& definition) {
  if (id.empty()) throw std::invalid_argument("dictionary entry has empty id");
  if (definition.empty())
    throw std::invalid_argument("dictionary entry '" + id + "' has empty definition");
  entries_[id] = DictionaryEntry{canonical_name, definition};
  for (const std::string& s : surfaces) {
    if (s.empty()) continue;
    surface_forms_[to_lower(s)] = id;
  }
}

const DictionaryEntry& DefinitionDictionary::entry(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw std::out_of_range("unknown entity id: " + id);
  return it->second;
}

DictionaryAnnotator::DictionaryAnnotator(const DefinitionDictionary& dict) {
  for (const auto& [surface, id] : dict.surface_forms()) {
    std::vector<std::string> toks = tokenize(surface);
    if (toks.empty()) continue;
    std::string key;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) key += '\x1f';
      key += toks[i];  // surfaces stored lowercase already
    }
    index_[key] = {id, int(toks.size())};
    max_surface_tokens_ = std::max(max_surface_tokens_, int(toks.size()));
  }
}

std::vector<EntityMention> DictionaryAnnotator::annotate(const Sentence& sentence) const {
  std::vector<EntityMention> mentions;
  const int n = int(sentence.tokens.size());
  int i = 0;
  while (i < n) {
    int best_len = 0;
    const std::string* best_id = nullptr;
    const int max_len = std::min(max_surface_tokens_, n - i);
    for (int len = max_len; len >= 1; --len) {
      auto it = index_.find(span_key(sentence.tokens, i, i + len));
      if (it != index_.end()) {
        best_len = len;
        best_id = &it->second.first;
        break;
      }
    }
    if (best_id) {
      EntityMention m;
      m.entity_id = *best_id;
      m.start = i;
      m.end = i + best_len;
      for (int t = i; t < i + best_len; ++t) {
        if (t > i) m.surface += ' ';
        m.surface += sentence.tokens[t];
      }
      mentions.push_back(std::move(m));
      i += best_len;
    } else {
      ++i;
    }
  }
  return mentions;
}

std::vector<EntityMention> annotate_entities(const Sentence& sentence,
                                             const DefinitionDictionary& dict) {
  return DictionaryAnnotator(dict).annotate(sentence);
}

CorpusSplit partition(const std::vector<Sentence>& sentences, const DefinitionDictionary& dict) {
  DictionaryAnnotator annotator(dict);
  return partition(sentences, dict, annotator);
}

CorpusSplit partition(const std::vector<Sentence>& sentences, const DefinitionDictionary& dict,
                      const EntityAnnotator& annotator) {
  CorpusSplit split;
  for (const Sentence& s : sentences) {
    std::vector<EntityMention> all = annotator.annotate(s);
    std::vector<EntityMention> in_dict;
    for (const EntityMention& m : all)
      if (dict.contains(m.entity_id)) in_dict.push_back(m);

    Sentence copy = s;
    copy.mentions = in_dict;
    split.s_all.push_back(copy);
    if (!in_dict.empty()) {
      split.s_ent.push_back(copy);
    } else if (all.empty()) {
      copy.mentions.clear();
      split.s_none.push_back(copy);
    }
    // Mentions outside the dictionary leave the sentence in s_all only.
  }
  return split;
}

std::vector<Sentence> mix_split(const CorpusSplit& split, double ent_fraction, int total,
                                uint64_t rng_seed) {
  if (ent_fraction < 0.0 || ent_fraction > 1.0)
    throw std::invalid_argument("mix_split: ent_fraction must lie in [0,1]");
  if (total < 0) throw std::invalid_argument("mix_split: total must be >= 0");
  const int n_ent = int(std::llround(double(total) * ent_fraction));
  const int n_none = total - n_ent;
  if (n_ent > int(split.s_ent.size()))
    throw std::runtime_error("mix_split: not enough sentences in s_ent (need " +
                             std::to_string(n_ent) + ", have " +
                             std::to_string(split.s_ent.size()) + ")");
  if (n_none > int(split.s_none.size()))
    throw std::runtime_error("mix_split: not enough sentences in s_none (need " +
                             std::to_string(n_none) + ", have " +
                             std::to_string(split.s_none.size()) + ")");

  Rng rng(Rng::mix({rng_seed, 0x6d69785fULL}));
  std::vector<int> ent_idx(split.s_ent.size()), none_idx(split.s_none.size());
  std::iota(ent_idx.begin(), ent_idx.end(), 0);
  std::iota(none_idx.begin(), none_idx.end(), 0);
  rng.shuffle(ent_idx.begin(), ent_idx.end());
  rng.shuffle(none_idx.begin(), none_idx.end());

  std::vector<Sentence> out;
  out.reserve(total);
  for (int i = 0; i < n_ent; ++i) out.push_back(split.s_ent[ent_idx[i]]);
  for (int i = 0; i < n_none; ++i) out.push_back(split.s_none[none_idx[i]]);
  rng.shuffle(out.begin(), out.end());
  return out;
}

EntityStats entity_statistics(const CorpusSplit& split) {
  EntityStats stats;
  if (split.s_ent.empty()) return stats;

  std::map<std::string, long long> counts;
  double sum = 0.0, sum_sq = 0.0;
  for (const Sentence& s : split.s_ent) {
    for (const EntityMention& m : s.mentions) counts[m.entity_id]++;
    double k = double(s.mentions.size());
    sum += k;
    sum_sq += k * k;
  }
  stats.unique_count = int(counts.size());
  for (const auto& [id, c] : counts) stats.total_occurrences += c;

  std::vector<long long> freq;
  freq.reserve(counts.size());
  for (const auto& [id, c] : counts) freq.push_back(c);
  std::sort(freq.begin(), freq.end(), std::greater<>());
  const int top = int(std::ceil(0.1 * double(stats.unique_count)));
  long long top_total = 0;
  for (int i = 0; i < top && i < int(freq.size()); ++i) top_total += freq[i];
  stats.top_decile_share = double(top_total) / double(stats.total_occurrences);

  const double n = double(split.s_ent.size());
  stats.per_sentence_mean = sum / n;
  double var = sum_sq / n - stats.per_sentence_mean * stats.per_sentence_mean;
  stats.per_sentence_std = std::sqrt(std::max(0.0, var));
  return stats;
}

}  // namespace medse
