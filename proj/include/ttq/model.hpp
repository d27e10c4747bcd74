#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ttq {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

/// One tree node. `tag` and `lex` are stored apart from the attribute
/// list; `name` lives inside `attrs` like any other attribute but is
/// reserved (it is the target of thread references).
struct Node {
  std::string tag;
  std::optional<std::string> lex;
  std::vector<std::pair<std::string, std::string>> attrs;  // insertion order
  std::vector<NodeId> children;
  NodeId parent = kNoNode;
  bool alive = true;

  const std::string* attr(const std::string& key) const;
  void set_attr(const std::string& key, std::string value);
  bool remove_attr(const std::string& key);
  const std::string* name() const { return attr("name"); }
  bool is_leaf() const { return children.empty(); }
};

struct Sentence {
  NodeId root = kNoNode;
  int index = 0;  // 1-based position within the document
};

/// A typed thread stored in an attribute as `label ':' target_name`.
/// The label must not contain a colon.
struct ThreadRef {
  std::string type;
  std::string label;
  std::string target_name;

  static std::optional<ThreadRef> parse(const std::string& type,
                                        const std::string& value);
  std::string value() const { return label + ":" + target_name; }
};

/// Tree induced over one sentence by the threads of a single type.
/// Nodes that carry the attribute point at their referred node; nodes
/// that are referred to but carry no thread themselves are roots.
struct ThreadTreeView {
  std::string thread_type;
  std::vector<NodeId> roots;  // document order
  std::map<NodeId, NodeId> parent_of;
  std::map<NodeId, std::vector<NodeId>> children_of;  // document order
  std::vector<NodeId> order;  // pre-order over the view tree(s)

  bool contains(NodeId n) const;
  std::vector<NodeId> children(NodeId n) const;
  NodeId parent(NodeId n) const;  // kNoNode for roots
};

/// Arena-owned forest of sentences. Node ids are stable for the life
/// of the document; deleted nodes stay in the arena marked dead.
class Document {
 public:
  NodeId create_node(std::string tag);
  Node& node(NodeId id) { return nodes_[id]; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  bool valid(NodeId id) const { return id < nodes_.size() && nodes_[id].alive; }

  /// Appends `child` to `parent`'s children, or at `position` (0-based)
  /// when given.
  void attach(NodeId child, NodeId parent, int position = -1);
  void detach(NodeId child);

  int add_sentence(NodeId root);  // returns the 0-based sentence index
  const std::vector<Sentence>& sentences() const { return sentences_; }
  int sentence_count() const { return static_cast<int>(sentences_.size()); }

  std::vector<NodeId> pre_order(int sentence_idx) const;
  std::vector<NodeId> subtree(NodeId root) const;  // root included, pre-order
  std::vector<NodeId> find_by_name(const std::string& name) const;
  int sentence_of(NodeId id) const;  // 0-based, -1 when detached
  std::size_t node_count() const;   // alive nodes only
  std::size_t arena_size() const { return nodes_.size(); }

  /// Kills `root` and its whole subtree and detaches it from its parent.
  void remove_subtree(NodeId root);

  const std::optional<std::string>& origin() const { return origin_; }
  void set_origin(std::string o) { origin_ = std::move(o); }

 private:
  std::vector<Node> nodes_;
  std::vector<Sentence> sentences_;
  std::optional<std::string> origin_;
};

enum class Axis { P, N, Pr, Nx, A, D };

/// D enumerates direct children for positional access and all proper
/// descendants when quantified.
enum class DepthMode { Children, Descendants };

/// Where navigation happens: the base tree of one sentence, or the view
/// induced by a thread type when one is set.
struct TreeHandle {
  const Document* doc = nullptr;
  int sentence = 0;  // 0-based
  const ThreadTreeView* view = nullptr;
};

/// Candidates for an axis from `ctx`, nearest first for P/N/Pr/Nx/A and
/// left-to-right (or pre-order, for descendants) for D.
std::vector<NodeId> axis_candidates(const TreeHandle& tree, NodeId ctx,
                                    Axis axis,
                                    DepthMode d_mode = DepthMode::Children);

/// Pre-order node sequence of the handle's tree (view order under TT).
std::vector<NodeId> order_in(const TreeHandle& tree);

/// Level of `n`: distance from the root of the handle's tree, root = 0.
int level_in(const TreeHandle& tree, NodeId n);

/// Leaf test relative to the handle's tree.
bool leaf_in(const TreeHandle& tree, NodeId n);

/// Follows `n`'s thread of the given type. Empty when the attribute is
/// absent; throws ThreadError when the target name is dangling or not
/// unique.
std::optional<NodeId> referred_node(const Document& doc, NodeId n,
                                    const std::string& thread_type);

/// All nodes whose thread of the given type targets `n`, in document
/// pre-order.
std::vector<NodeId> referring_nodes(const Document& doc, NodeId n,
                                    const std::string& thread_type);

/// Builds the view for one sentence. Throws CyclicThreadError when the
/// threads of that type form a cycle.
ThreadTreeView extract_thread_tree(const Document& doc, int sentence_idx,
                                   const std::string& thread_type);

/// Gives every alive node a document-unique name (n1, n2, ... in
/// document pre-order) and rewrites thread targets so resolution is
/// preserved. Returns the number of nodes whose name changed.
std::size_t reallocate_names(Document& doc);

/// Lexical data of the sentence's leaves in pre-order, space separated.
/// Leaves with no (or empty) lex contribute nothing.
std::string base_text(const Document& doc, int sentence_idx);
std::string base_text_subtree(const Document& doc, NodeId root);

/// Fresh node name not yet used in the document (n1, n2, ... scheme).
std::string fresh_name(const Document& doc);

}  // namespace ttq
