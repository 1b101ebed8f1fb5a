#pragma once

#include <string>
#include <vector>

#include "sessium/session_type.hpp"

namespace sessium {

enum class Tag { Yes, No, Unknown };
const char* tag_name(Tag t);

/// Three-valued analysis result. Yes carries the applied laws, No carries a
/// tester (and for strong subsession the choice context), Unknown says
/// which bound ran out.
struct Verdict {
  Tag tag = Tag::Unknown;
  std::vector<std::string> derivation;
  Type witness = nullptr;  // tester
  Type context = nullptr;  // choice context, strong subsession only
  std::string note;

  static Verdict yes(std::vector<std::string> derivation, Type witness = nullptr);
  static Verdict no(Type witness, Type context = nullptr, std::string note = {});
  static Verdict unknown(std::string note);

  bool is_yes() const { return tag == Tag::Yes; }
  bool is_no() const { return tag == Tag::No; }
  bool definite() const { return tag != Tag::Unknown; }
};

/// Conjunction: No dominates, then Unknown.
Verdict conjoin(const Verdict& a, const Verdict& b);

}  // namespace sessium
