#include "autojournal/evaluator.hpp"

#include <algorithm>
#include <cmath>

#include "autojournal/error.hpp"

namespace autojournal::eval {

using journal::Journal;

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores)
    : rows_(rows), cols_(cols), scores_(std::move(scores)) {
  if (rows == 0 || cols == 0) throw Error(ErrorCode::EmptyJournal, "similarity matrix needs rows and columns");
  if (scores_.size() != rows * cols) throw Error(ErrorCode::InvalidArgument, "score count != rows * cols");
  for (double& s : scores_) {
    if (!std::isfinite(s) || s < -1.0 - 1e-9 || s > 1.0 + 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "similarity outside [-1, 1]: " + std::to_string(s));
    }
    s = std::clamp(s, -1.0, 1.0);
  }
}

SimilarityMatrix SimilarityMatrix::transposed() const {
  std::vector<double> t(scores_.size());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = at(i, j);
  return SimilarityMatrix(cols_, rows_, std::move(t));
}

namespace {

std::vector<std::string> events_of(const Journal& j) {
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j.entries) out.push_back(e.event);
  return out;
}

std::vector<std::string> feelings_of(const Journal& j) {
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j.entries) out.push_back(e.feelings);
  return out;
}

}  // namespace

SimilarityMatrix similarity_matrix(const Journal& truth, const Journal& pred, Embedder& embedder) {
  if (truth.entries.empty()) throw Error(ErrorCode::EmptyJournal, "ground truth");
  if (pred.entries.empty()) throw Error(ErrorCode::EmptyJournal, "prediction");
  const auto t = embedder.embed(events_of(truth));
  const auto p = embedder.embed(events_of(pred));
  std::vector<double> scores(t.size() * p.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) scores[i * p.size() + j] = cosine(t[i], p[j]);
  return SimilarityMatrix(t.size(), p.size(), std::move(scores));
}

EventScores event_scores(const SimilarityMatrix& m) {
  EventScores out;
  out.assignment.j_star.assign(m.rows(), 0);
  out.assignment.i_star.assign(m.cols(), 0);

  double row_sum = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < m.cols(); ++j) {
      if (m.at(i, j) > m.at(i, arg) + kTieEpsilon) arg = j;
    }
    out.assignment.j_star[i] = arg;
    row_sum += m.at(i, arg);
  }
  double col_sum = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < m.rows(); ++i) {
      if (m.at(i, j) > m.at(arg, j) + kTieEpsilon) arg = i;
    }
    out.assignment.i_star[j] = arg;
    col_sum += m.at(arg, j);
  }
  out.score_t = row_sum / static_cast<double>(m.rows());
  out.score_p = col_sum / static_cast<double>(m.cols());
  return out;
}

FeelingScores feeling_scores(const Journal& truth, const Journal& pred, const MatchAssignment& assignment,
                             Embedder& embedder) {
  const std::size_t n = truth.size();
  const std::size_t m = pred.size();
  if (n == 0) throw Error(ErrorCode::EmptyJournal, "ground truth");
  if (m == 0) throw Error(ErrorCode::EmptyJournal, "prediction");
  if (assignment.j_star.size() != n || assignment.i_star.size() != m ||
      std::any_of(assignment.j_star.begin(), assignment.j_star.end(), [m](std::size_t j) { return j >= m; }) ||
      std::any_of(assignment.i_star.begin(), assignment.i_star.end(), [n](std::size_t i) { return i >= n; })) {
    throw Error(ErrorCode::AssignmentMismatch, "assignment does not fit a " + std::to_string(n) + "x" +
                                                   std::to_string(m) + " journal pair");
  }
  const auto tf = embedder.embed(feelings_of(truth));
  const auto pf = embedder.embed(feelings_of(pred));
  FeelingScores out;
  for (std::size_t i = 0; i < n; ++i) out.score_t += cosine(tf[i], pf[assignment.j_star[i]]);
  for (std::size_t j = 0; j < m; ++j) out.score_p += cosine(tf[assignment.i_star[j]], pf[j]);
  out.score_t /= static_cast<double>(n);
  out.score_p /= static_cast<double>(m);
  return out;
}

OverallScore overall_score(double score_t, double score_p) {
  if (!(score_t > 0.0) || !(score_p > 0.0)) return {0.0, true};
  return {2.0 * (score_t * score_p) / (score_t + score_p), false};
}

EvalScores evaluate_pair(const Journal& truth, const Journal& pred, Embedder& embedder) {
  if (!truth.participant.empty() && !pred.participant.empty() &&
      (truth.participant != pred.participant || truth.date != pred.date)) {
    throw Error(ErrorCode::InvalidArgument, "journals belong to different participant/date: " +
                                                truth.participant + "/" + truth.date + " vs " +
                                                pred.participant + "/" + pred.date);
  }
  const auto matrix = similarity_matrix(truth, pred, embedder);
  const auto events = event_scores(matrix);
  const auto feelings = feeling_scores(truth, pred, events.assignment, embedder);
  const auto event_overall = overall_score(events.score_t, events.score_p);
  const auto feeling_overall = overall_score(feelings.score_t, feelings.score_p);
  return EvalScores{events.score_t,         events.score_p,         feelings.score_t,
                    feelings.score_p,       event_overall.value,    feeling_overall.value,
                    event_overall.warning,  feeling_overall.warning};
}

}  // namespace autojournal::eval
