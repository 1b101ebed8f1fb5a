#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sessium {

/// A process source shipped with the library.
struct CorpusSource {
  std::string name;  // file stem, e.g. seller_buyers
  std::string_view text;
};

/// Shipped process sources, sorted by name.
const std::vector<CorpusSource>& corpus_sources();

/// Text of a shipped source; throws std::out_of_range for an unknown name.
std::string_view corpus_text(std::string_view name);

}  // namespace sessium
