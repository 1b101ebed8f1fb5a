#include "sessium/verdict.hpp"

namespace sessium {

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Yes: return "Yes";
    case Tag::No: return "No";
    case Tag::Unknown: return "Unknown";
  }
  return "Unknown";
}

Verdict Verdict::yes(std::vector<std::string> derivation, Type witness) {
  Verdict v;
  v.tag = Tag::Yes;
  v.derivation = std::move(derivation);
  v.witness = witness;
  return v;
}

Verdict Verdict::no(Type witness, Type context, std::string note) {
  Verdict v;
  v.tag = Tag::No;
  v.witness = witness;
  v.context = context;
  v.note = std::move(note);
  return v;
}

Verdict Verdict::unknown(std::string note) {
  Verdict v;
  v.tag = Tag::Unknown;
  v.note = std::move(note);
  return v;
}

Verdict conjoin(const Verdict& a, const Verdict& b) {
  if (a.is_no()) return a;
  if (b.is_no()) return b;
  if (!a.definite()) return a;
  if (!b.definite()) return b;
  Verdict out = a;
  out.derivation.insert(out.derivation.end(), b.derivation.begin(), b.derivation.end());
  return out;
}

}  // namespace sessium
