#include <map>
#include <stdexcept>
#include <string>

#include "csicl/metrics/metrics.hpp"
#include "csicl/util/unicode.hpp"

namespace csicl {

void ChrfParams::validate() const {
  if (max_n < 1) throw std::invalid_argument("chrf: max_n must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("chrf: beta must be > 0");
}

namespace {

std::u32string strip_spaces(std::string_view text) {
  std::u32string out;
  for (char32_t cp : unicode::decode(text))
    if (!unicode::is_space(cp)) out.push_back(cp);
  return out;
}

std::map<std::u32string, std::size_t> ngrams(const std::u32string& s, std::size_t n) {
  std::map<std::u32string, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

double chrf(std::string_view hypothesis, std::string_view reference, const ChrfParams& params) {
  params.validate();
  const std::u32string hyp = strip_spaces(hypothesis);
  const std::u32string ref = strip_spaces(reference);
  if (hyp.empty() && ref.empty()) return 100.0;

  double precision = 0.0;
  double recall = 0.0;
  int used = 0;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(params.max_n); ++n) {
    if (hyp.size() < n || ref.size() < n) continue;
    const auto h = ngrams(hyp, n);
    const auto r = ngrams(ref, n);
    std::size_t matches = 0;
    for (const auto& [gram, count] : h)
      if (auto it = r.find(gram); it != r.end()) matches += std::min(count, it->second);
    precision += static_cast<double>(matches) / static_cast<double>(hyp.size() - n + 1);
    recall += static_cast<double>(matches) / static_cast<double>(ref.size() - n + 1);
    ++used;
  }
  if (used == 0) return 0.0;
  precision /= used;
  recall /= used;
  if (precision + recall == 0.0) return 0.0;
  const double b2 = params.beta * params.beta;
  return 100.0 * (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

}  // namespace csicl
