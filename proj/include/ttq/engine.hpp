#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ttq/ast.hpp"
#include "ttq/errors.hpp"
#include "ttq/model.hpp"

namespace ttq {

/// A node pinned to the document it lives in, so bindings can point
/// into secondary sources as well as the primary one.
struct NodeRef {
  Document* doc = nullptr;
  NodeId id = kNoNode;

  explicit operator bool() const { return doc != nullptr && id != kNoNode; }
  bool operator==(const NodeRef&) const = default;
};

/// The documents loaded for one run. The first one is the primary
/// document: the one whose nodes are bound to C in turn.
class SourceSet {
 public:
  void add(std::shared_ptr<Document> doc, std::optional<std::string> alias);
  Document* primary() const;
  Document* by_alias(const std::string& alias) const;
  std::size_t size() const { return docs_.size(); }
  Document* at(std::size_t i) const { return docs_[i].get(); }
  const std::vector<std::shared_ptr<Document>>& docs() const { return docs_; }
  void clear();

 private:
  std::vector<std::shared_ptr<Document>> docs_;
  std::vector<std::optional<std::string>> aliases_;
};

struct EngineOptions {
  std::optional<std::string> default_thread;
};

/// Everything a condition or action needs to resolve addresses for one
/// candidate node: the current binding, the active tree (base or thread
/// view), and the aliases captured so far.
struct MatchContext {
  SourceSet* sources = nullptr;
  Document* doc = nullptr;
  int sentence = 0;  // 0-based
  NodeRef current;
  const ThreadTreeView* view = nullptr;
  const EngineOptions* options = nullptr;
  std::map<std::string, std::vector<NodeRef>> bindings;

  /// Tree to navigate from `node`: the thread view when the node lies in
  /// the primary sentence under an active TT directive, otherwise base.
  TreeHandle tree_for(const NodeRef& node) const;
};

struct MatchResult {
  bool matched = false;
  MatchContext context;
};

/// Result of resolving a value expression outside a comparison: either a
/// list of nodes (bare address) or a piece of text.
struct Value {
  std::vector<NodeRef> nodes;
  std::optional<std::string> text;
  bool is_text() const { return text.has_value(); }
};

/// Thrown internally when a value expression needs exactly one node but
/// an address matched none; callers usually turn it into a warning.
class AbsentNodeError : public EvalError {
 public:
  explicit AbsentNodeError(const std::string& term)
      : EvalError("no matching node for '" + term + "'"), term_(term) {}
  const std::string& term() const { return term_; }

 private:
  std::string term_;
};

bool eval_condition(const ConditionExpr& cond, MatchContext& ctx);
bool eval_comparison(const Comparison& cmp, MatchContext& ctx);

/// Anchored glob comparison; `~` / `!~` treat the right side as a
/// pattern where `*` spans any run and `?` one character.
bool compare_text(CompareOp op, const std::string& lhs, const std::string& rhs);
bool glob_match(const std::string& pattern, const std::string& text);

/// Member text for a node; absent members read as "".
std::string member_text(const MatchContext& ctx, const NodeRef& node,
                        MemberSym member, const std::string* attr_key);

/// Resolves an address in selection mode: wildcards keep every
/// candidate, `?`/`.` take the first/last, ranges slice.
std::vector<NodeRef> resolve_address(const NodeAddress& address, MatchContext& ctx,
                                     int depth = 0);

/// Resolves a full value expression in selection mode. Concatenations
/// and member reads produce text; a bare address produces nodes.
/// Throws AbsentNodeError / EvalError when a text context needs exactly
/// one node and gets zero / several.
Value resolve_value(const ValueExpr& value, MatchContext& ctx, int depth = 0);

using MatchCallback = std::function<void(const MatchResult&)>;
using SentenceCallback = std::function<void(int sentence_idx)>;

/// Runs the condition of `ast` over every node of the primary document,
/// sentence by sentence in order, nodes in pre-order of the active tree.
/// Calls `on_match` once per matching node and `after_sentence` after
/// each sentence has been fully scanned.
void run_query(const QueryAst& ast, SourceSet& sources, const EngineOptions& options,
               const MatchCallback& on_match,
               const SentenceCallback& after_sentence = {});

}  // namespace ttq
