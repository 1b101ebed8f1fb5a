#include "sessium/corpus.hpp"

#include <algorithm>
#include <stdexcept>

#include "embedded.hpp"

namespace sessium {

const std::vector<CorpusSource>& corpus_sources() {
  static const std::vector<CorpusSource> sources = [] {
    std::vector<CorpusSource> v{
        {"deadlock", embedded::deadlock},
        {"example1_server", embedded::example1_server},
        {"example2_nonviable", embedded::example2_nonviable},
        {"example3_ext", embedded::example3_ext},
        {"example4_inputs", embedded::example4_inputs},
        {"multiparty_prime", embedded::multiparty_prime},
        {"seller_buyers", embedded::seller_buyers},
    };
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return v;
  }();
  return sources;
}

std::string_view corpus_text(std::string_view name) {
  for (const auto& s : corpus_sources()) {
    if (s.name == name) return s.text;
  }
  throw std::out_of_range("no corpus source named '" + std::string(name) + "'");
}

}  // namespace sessium
