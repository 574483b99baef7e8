#pragma once

#include <cstddef>
#include <vector>

#include "autojournal/embedding.hpp"
#include "autojournal/journal.hpp"

namespace autojournal::eval {

// Two similarities closer than this count as tied; ties go to the lowest index.
inline constexpr double kTieEpsilon = 1e-12;

// Rows are ground-truth events, columns predicted events.
class SimilarityMatrix {
 public:
  // Cells must lie in [-1, 1] (values within 1e-9 outside are clamped).
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return scores_[i * cols_ + j]; }
  SimilarityMatrix transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> scores_;
};

// Zero-based best partners: j_star[i] for each ground-truth row,
// i_star[j] for each predicted column.
struct MatchAssignment {
  std::vector<std::size_t> j_star;
  std::vector<std::size_t> i_star;
};

struct EventScores {
  double score_t = 0.0;  // mean of row maxima (ground-truth side)
  double score_p = 0.0;  // mean of column maxima (prediction side)
  MatchAssignment assignment;
};

struct FeelingScores {
  double score_t = 0.0;
  double score_p = 0.0;
};

struct OverallScore {
  double value = 0.0;
  bool warning = false;  // an input was <= 0, value forced to 0
};

struct EvalScores {
  double event_t = 0.0;
  double event_p = 0.0;
  double feeling_t = 0.0;
  double feeling_p = 0.0;
  double event_overall = 0.0;
  double feeling_overall = 0.0;
  bool event_warning = false;
  bool feeling_warning = false;
};

SimilarityMatrix similarity_matrix(const journal::Journal& truth, const journal::Journal& pred,
                                   Embedder& embedder);

EventScores event_scores(const SimilarityMatrix& matrix);

FeelingScores feeling_scores(const journal::Journal& truth, const journal::Journal& pred,
                             const MatchAssignment& assignment, Embedder& embedder);

// Harmonic mean of the two sides; 0 with a warning when either is <= 0.
OverallScore overall_score(double score_t, double score_p);

EvalScores evaluate_pair(const journal::Journal& truth, const journal::Journal& pred, Embedder& embedder);

}  // namespace autojournal::eval
