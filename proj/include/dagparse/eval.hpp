#pragma once

#include <map>
#include <string>
#include <vector>

#include "dagparse/graph.hpp"

namespace dagparse {

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  long matched = 0;
  long predicted = 0;
  long gold = 0;
  bool degenerate = false;  // an empty denominator was scored as 0
};

struct Scores {
  Prf primary;
  Prf remote;
  double average_f1() const { return (primary.f1 + remote.f1) / 2.0; }
};

// Edges are matched by (terminal yield of the child, label when labeled,
// remote flag); P/R/F1 per remote partition. Empty denominators score 0 with
// the degenerate flag, except both-empty which scores 1. Throws DataError on
// token mismatch.
Scores score(const UnifiedGraph& pred, const UnifiedGraph& gold, bool labeled);

// Micro-average over sentences paired by graph id: counts are pooled.
Scores corpus_score(const std::vector<UnifiedGraph>& pred, const std::vector<UnifiedGraph>& gold,
                    bool labeled);

// L1 distance between word distributions, in [0, 2].
double l1_distance(const std::vector<std::vector<Token>>& corpus_a,
                   const std::vector<std::vector<Token>>& corpus_b, bool lowercase = false);

// Unlabeled overlap between two corpora over the same sentences: X scored as
// the prediction against Y.
Scores scheme_overlap(const std::vector<UnifiedGraph>& x, const std::vector<UnifiedGraph>& y);

std::string scores_to_json(const Scores& s);
std::string scores_to_table(const Scores& s);

}  // namespace dagparse
