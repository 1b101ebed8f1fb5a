#pragma once

#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sessium/session_type.hpp"

namespace sessium {

struct TypeLabel {
  enum class Kind : std::uint8_t { Success, InCell, OutCell, InCh, OutCh };
  Kind kind = Kind::Success;
  unsigned cell = 0;
  Type payload = nullptr;

  bool operator==(const TypeLabel& o) const { return kind == o.kind && cell == o.cell && payload == o.payload; }
  std::string str(const TypeUniverse& u) const;
};

/// Answer to `sent ⪯ expected` for a delegation synchronization.
enum class PayloadRelation { Sub, NotSub, Unknown };
using PayloadOracle = std::function<PayloadRelation(Type sent, Type expected)>;

/// Raised when a delegation synchronization needs a subsession answer that
/// the oracle cannot give.
class UndecidedSideCondition : public std::runtime_error {
 public:
  UndecidedSideCondition(Type sent, Type expected)
      : std::runtime_error("undecided side condition: " + to_string(sent) + " <= " + to_string(expected)),
        sent_(sent),
        expected_(expected) {}
  Type sent() const { return sent_; }
  Type expected() const { return expected_; }

 private:
  Type sent_;
  Type expected_;
};

class StateLimitExceeded : public std::runtime_error {
 public:
  explicit StateLimitExceeded(std::size_t limit)
      : std::runtime_error("state graph exceeds " + std::to_string(limit) + " nodes") {}
};

struct TypeStateGraph {
  Type root = nullptr;
  std::vector<Type> nodes;                       // nodes[0] is the root
  std::vector<std::vector<std::size_t>> edges;   // internal successors
  std::vector<bool> success_enabled;

  std::size_t edge_count() const;
};

/// Oracle that only relates syntactically equal payloads.
PayloadOracle syntactic_payload_oracle();

/// Transition relation of closed session types over a universe. Results are
/// memoized per instance; instances are safe to share between threads.
class TypeLts {
 public:
  TypeLts(const TypeUniverse& u, PayloadOracle oracle, std::size_t max_nodes = 200000);

  const TypeUniverse& universe() const { return u_; }

  std::vector<Type> step_internal(Type s);
  std::vector<std::pair<TypeLabel, Type>> step_visible(Type s);
  bool success_enabled(Type s);

  /// States reachable from `root` by internal steps. With `context_closed`,
  /// non-✓ visible steps count as internal too.
  TypeStateGraph build_graph(Type root, bool context_closed = false);
  bool is_complete(Type s);

 private:
  using Visible = std::vector<std::pair<TypeLabel, Type>>;
  const std::vector<Type>& internal_cached(Type s);
  const Visible& visible_cached(Type s);
  std::vector<Type> compute_internal(Type s);
  Visible compute_visible(Type s);

  const TypeUniverse& u_;
  PayloadOracle oracle_;
  std::size_t max_nodes_;
  std::recursive_mutex mu_;
  std::unordered_map<Type, std::vector<Type>> internal_;
  std::unordered_map<Type, Visible> visible_;
  std::unordered_map<Type, bool> complete_;
};

}  // namespace sessium
