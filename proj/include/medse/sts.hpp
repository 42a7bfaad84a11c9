#pragma once

#include <string>
#include <vector>

namespace medse {

// One gold-scored sentence pair; scores live in [0, 5].
struct STSPair {
  std::string sentence1;
  std::string sentence2;
  double gold = 0.0;
};

// Tab-separated `sentence1 TAB sentence2 TAB score`.
std::vector<STSPair> read_sts_tsv(const std::string& path);
void write_sts_tsv(const std::string& path, const std::vector<STSPair>& pairs);

}  // namespace medse
