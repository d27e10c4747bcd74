#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ttq/ast.hpp"
#include "ttq/engine.hpp"

namespace ttq {

/// One emitted result. `text` is the raw rendering and `xml` the markup
/// fragment; both are captured when the record is made, so later
/// mutations cannot change what an earlier query reported.
struct ResultRecord {
  enum class Kind { Text, Node, Sentence, Warning };
  Kind kind = Kind::Text;
  std::string label;
  std::string text;
  std::string xml;  // empty for plain text records
};

/// Mutations queued during a sentence scan and applied afterwards, so
/// matching always sees the sentence as it was when the scan started.
class MutationPlan {
 public:
  struct SetMember {
    NodeRef target;
    MemberSym member = MemberSym::Lex;
    std::string attr_key;  // only for MemberSym::Attr
    std::string value;
  };
  struct Move {
    NodeRef source;
    NodeRef dest_parent;
    int position = -1;  // child slot, -1 = append
  };
  struct Insert {
    NodeRef dest_parent;
    std::string tag;
    int position = -1;
  };
  struct Delete {
    NodeRef target;
  };
  using Mutation = std::variant<SetMember, Move, Insert, Delete>;

  std::vector<Mutation> items;
  bool empty() const { return items.empty(); }
  void clear() { items.clear(); }
};

/// Structural edits. All throw TransformError on sentence roots;
/// move_node throws CycleError when the destination lies inside the
/// moved subtree.
void move_node(Document& doc, NodeId source, NodeId dest_parent, int position);
NodeId insert_node(Document& doc, NodeId dest_parent, const std::string& tag,
                   int position);
/// Removes the subtree and reports a warning record for every thread
/// elsewhere in the document left pointing at a removed node.
std::vector<ResultRecord> delete_node(Document& doc, NodeId target);

/// Resolves the actions of one match: emits records immediately and
/// queues mutations on `plan`.
std::vector<ResultRecord> apply_actions(const std::vector<ActionExpr>& actions,
                                        MatchContext& ctx, MutationPlan& plan);

/// Applies queued mutations in order; returns how many were applied.
/// Cyclic moves are skipped with a warning pushed to `warnings`. With
/// `guard_base_text` the touched documents are snapshotted first and
/// restored (then GuardViolation is thrown) if any sentence's base text
/// changed.
std::size_t apply_plan(MutationPlan& plan, bool guard_base_text,
                       std::vector<ResultRecord>* warnings);

using CommandFn = std::function<std::vector<ResultRecord>(Document&)>;

class CommandRegistry {
 public:
  CommandRegistry();  // registers the built-in commands
  void register_command(const std::string& name, CommandFn fn);
  bool has(const std::string& name) const;
  std::vector<ResultRecord> execute(const std::string& name, Document& doc) const;

 private:
  std::map<std::string, CommandFn> commands_;
};

struct RunOptions {
  std::optional<std::string> default_thread;
  bool guard_base_text = false;
};

struct RunOutput {
  std::vector<ResultRecord> records;
  std::size_t match_count = 0;
  std::size_t mutation_count = 0;
  bool mutated = false;  // document changed (mutation or command)
};

/// Full pipeline for one parsed query: scan, act, apply per-sentence
/// plans, then run the conditional command once if anything matched.
RunOutput run_program(const QueryAst& ast, SourceSet& sources,
                      const CommandRegistry& registry, const RunOptions& options);

}  // namespace ttq
