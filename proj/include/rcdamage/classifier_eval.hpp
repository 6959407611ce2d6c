#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcdamage/error.hpp"

namespace rcdamage {

/// Rows are ground truth, columns are predictions, both in `classes` order.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> normalized;
  std::vector<bool> zero_support; // rows with no ground-truth samples

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto &row : counts)
      for (std::size_t v : row)
        n += v;
    return n;
  }
  std::size_t row_total(std::size_t i) const {
    std::size_t n = 0;
    for (std::size_t v : counts[i])
      n += v;
    return n;
  }
};

inline const std::vector<std::string> &damage_state_classes() {
  static const std::vector<std::string> c{"DS0", "DS1", "DS2", "DS3"};
  return c;
}

inline const std::vector<std::string> &collapse_classes() {
  static const std::vector<std::string> c{"collapse", "no-collapse"};
  return c;
}

inline ConfusionMatrix confusion(const std::vector<std::string> &preds,
                                 const std::vector<std::string> &truths,
                                 const std::vector<std::string> &classes) {
  if (preds.size() != truths.size())
    throw input_error("confusion: " + std::to_string(preds.size()) + " predictions vs " +
                      std::to_string(truths.size()) + " labels");
  if (classes.empty())
    throw input_error("confusion: class list is empty");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (!index.emplace(classes[i], i).second)
      throw input_error("confusion: duplicate class '" + classes[i] + "'");
  }
  auto lookup = [&](const std::string &label, const char *what, std::size_t k) {
    auto it = index.find(label);
    if (it == index.end())
      throw input_error(std::string("confusion: unknown ") + what + " label '" + label +
                        "' at position " + std::to_string(k));
    return it->second;
  };

  const std::size_t n = classes.size();
  ConfusionMatrix m;
  m.classes = classes;
  m.counts.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const std::size_t t = lookup(truths[k], "truth", k);
    const std::size_t p = lookup(preds[k], "prediction", k);
    ++m.counts[t][p];
  }
  m.normalized.assign(n, std::vector<double>(n, 0.0));
  m.zero_support.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t support = m.row_total(i);
    if (support == 0) {
      m.zero_support[i] = true;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j)
      m.normalized[i][j] = static_cast<double>(m.counts[i][j]) / static_cast<double>(support);
  }
  return m;
}

inline double accuracy(const ConfusionMatrix &m) {
  const std::size_t total = m.total();
  if (total == 0)
    throw input_error("accuracy: confusion matrix is empty");
  std::size_t diag = 0;
  for (std::size_t i = 0; i < m.counts.size(); ++i)
    diag += m.counts[i][i];
  return static_cast<double>(diag) / static_cast<double>(total);
}

} // namespace rcdamage
