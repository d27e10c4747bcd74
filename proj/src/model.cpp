#include "ttq/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "ttq/errors.hpp"

namespace ttq {

const std::string* Node::attr(const std::string& key) const {
  for (const auto& [k, v] : attrs)
    if (k == key) return &v;
  return nullptr;
}

void Node::set_attr(const std::string& key, std::string value) {
  for (auto& [k, v] : attrs) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attrs.emplace_back(key, std::move(value));
}

bool Node::remove_attr(const std::string& key) {
  for (auto it = attrs.begin(); it != attrs.end(); ++it) {
    if (it->first == key) {
      attrs.erase(it);
      return true;
    }
  }
  return false;
}

std::optional<ThreadRef> ThreadRef::parse(const std::string& type,
                                          const std::string& value) {
  auto colon = value.find(':');
  if (colon == std::string::npos) return std::nullopt;
  if (value.find(':', colon + 1) != std::string::npos) return std::nullopt;
  if (colon == 0 || colon + 1 == value.size()) return std::nullopt;
  return ThreadRef{type, value.substr(0, colon), value.substr(colon + 1)};
}

bool ThreadTreeView::contains(NodeId n) const {
  return parent_of.count(n) > 0 ||
         std::find(roots.begin(), roots.end(), n) != roots.end();
}

std::vector<NodeId> ThreadTreeView::children(NodeId n) const {
  auto it = children_of.find(n);
  return it == children_of.end() ? std::vector<NodeId>{} : it->second;
}

NodeId ThreadTreeView::parent(NodeId n) const {
  auto it = parent_of.find(n);
  return it == parent_of.end() ? kNoNode : it->second;
}

NodeId Document::create_node(std::string tag) {
  Node n;
  n.tag = std::move(tag);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Document::attach(NodeId child, NodeId parent, int position) {
  Node& p = nodes_[parent];
  if (position < 0 || position >= static_cast<int>(p.children.size()))
    p.children.push_back(child);
  else
    p.children.insert(p.children.begin() + position, child);
  nodes_[child].parent = parent;
}

void Document::detach(NodeId child) {
  NodeId parent = nodes_[child].parent;
  if (parent == kNoNode) return;
  auto& kids = nodes_[parent].children;
  kids.erase(std::remove(kids.begin(), kids.end(), child), kids.end());
  nodes_[child].parent = kNoNode;
}

int Document::add_sentence(NodeId root) {
  sentences_.push_back({root, static_cast<int>(sentences_.size()) + 1});
  return static_cast<int>(sentences_.size()) - 1;
}

static void walk_pre_order(const Document& d, NodeId n,
                           std::vector<NodeId>& out) {
  if (!d.valid(n)) return;
  out.push_back(n);
  for (NodeId c : d.node(n).children) walk_pre_order(d, c, out);
}

std::vector<NodeId> Document::pre_order(int sentence_idx) const {
  std::vector<NodeId> out;
  if (sentence_idx >= 0 && sentence_idx < sentence_count())
    walk_pre_order(*this, sentences_[sentence_idx].root, out);
  return out;
}

std::vector<NodeId> Document::subtree(NodeId root) const {
  std::vector<NodeId> out;
  walk_pre_order(*this, root, out);
  return out;
}

std::vector<NodeId> Document::find_by_name(const std::string& name) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    const std::string* n = nodes_[i].name();
    if (n && *n == name) out.push_back(i);
  }
  return out;
}

int Document::sentence_of(NodeId id) const {
  NodeId n = id;
  while (valid(n) && nodes_[n].parent != kNoNode) n = nodes_[n].parent;
  for (int s = 0; s < sentence_count(); ++s)
    if (sentences_[s].root == n) return s;
  return -1;
}

std::size_t Document::node_count() const {
  std::size_t c = 0;
  for (const auto& n : nodes_)
    if (n.alive) ++c;
  return c;
}

void Document::remove_subtree(NodeId root) {
  detach(root);
  for (NodeId n : subtree(root)) nodes_[n].alive = false;
}

std::vector<NodeId> order_in(const TreeHandle& tree) {
  if (tree.view) return tree.view->order;
  return tree.doc->pre_order(tree.sentence);
}

static std::vector<NodeId> children_in(const TreeHandle& tree, NodeId n) {
  if (tree.view) return tree.view->children(n);
  return tree.doc->node(n).children;
}

static NodeId parent_in(const TreeHandle& tree, NodeId n) {
  if (tree.view) return tree.view->parent(n);
  return tree.doc->node(n).parent;
}

static void collect_descendants(const TreeHandle& tree, NodeId n,
                                std::vector<NodeId>& out) {
  for (NodeId c : children_in(tree, n)) {
    out.push_back(c);
    collect_descendants(tree, c, out);
  }
}

std::vector<NodeId> axis_candidates(const TreeHandle& tree, NodeId ctx,
                                    Axis axis, DepthMode d_mode) {
  std::vector<NodeId> out;
  switch (axis) {
    case Axis::P:
    case Axis::N: {
      std::vector<NodeId> seq = order_in(tree);
      auto it = std::find(seq.begin(), seq.end(), ctx);
      if (it == seq.end()) return out;
      if (axis == Axis::P) {
        // nearest first: walk backwards from ctx
        for (auto r = std::make_reverse_iterator(it); r != seq.rend(); ++r)
          out.push_back(*r);
      } else {
        for (auto f = it + 1; f != seq.end(); ++f) out.push_back(*f);
      }
      return out;
    }
    case Axis::Pr:
    case Axis::Nx: {
      NodeId parent = parent_in(tree, ctx);
      if (parent == kNoNode) return out;
      std::vector<NodeId> sibs = children_in(tree, parent);
      auto it = std::find(sibs.begin(), sibs.end(), ctx);
      if (it == sibs.end()) return out;
      if (axis == Axis::Pr) {
        for (auto r = std::make_reverse_iterator(it); r != sibs.rend(); ++r)
          out.push_back(*r);
      } else {
        for (auto f = it + 1; f != sibs.end(); ++f) out.push_back(*f);
      }
      return out;
    }
    case Axis::A: {
      for (NodeId p = parent_in(tree, ctx); p != kNoNode;
           p = parent_in(tree, p))
        out.push_back(p);
      return out;
    }
    case Axis::D: {
      if (d_mode == DepthMode::Children) return children_in(tree, ctx);
      collect_descendants(tree, ctx, out);
      return out;
    }
  }
  return out;
}

int level_in(const TreeHandle& tree, NodeId n) {
  int level = 0;
  for (NodeId p = parent_in(tree, n); p != kNoNode; p = parent_in(tree, p))
    ++level;
  return level;
}

bool leaf_in(const TreeHandle& tree, NodeId n) {
  return children_in(tree, n).empty();
}

std::optional<NodeId> referred_node(const Document& doc, NodeId n,
                                    const std::string& thread_type) {
  const std::string* raw = doc.node(n).attr(thread_type);
  if (!raw) return std::nullopt;
  auto thread = ThreadRef::parse(thread_type, *raw);
  if (!thread) return std::nullopt;
  std::vector<NodeId> targets = doc.find_by_name(thread->target_name);
  if (targets.empty())
    throw ThreadError("thread '" + thread_type + "' targets unknown name '" +
                          thread->target_name + "'",
                      thread->target_name);
  if (targets.size() > 1)
    throw ThreadError("thread '" + thread_type + "' target name '" +
                          thread->target_name + "' is not unique",
                      thread->target_name);
  return targets.front();
}

std::vector<NodeId> referring_nodes(const Document& doc, NodeId n,
                                    const std::string& thread_type) {
  std::vector<NodeId> out;
  const std::string* target = doc.node(n).name();
  if (!target) return out;
  for (int s = 0; s < doc.sentence_count(); ++s) {
    for (NodeId m : doc.pre_order(s)) {
      const std::string* raw = doc.node(m).attr(thread_type);
      if (!raw) continue;
      auto thread = ThreadRef::parse(thread_type, *raw);
      if (thread && thread->target_name == *target) out.push_back(m);
    }
  }
  return out;
}

static void collect_view_order(const ThreadTreeView& view, NodeId n,
                               std::vector<NodeId>& out) {
  for (NodeId c : view.children(n)) {
    out.push_back(c);
    collect_view_order(view, c, out);
  }
}

ThreadTreeView extract_thread_tree(const Document& doc, int sentence_idx,
                                   const std::string& thread_type) {
  ThreadTreeView view;
  view.thread_type = thread_type;

  std::vector<NodeId> nodes = doc.pre_order(sentence_idx);
  std::set<NodeId> in_sentence(nodes.begin(), nodes.end());

  for (NodeId n : nodes) {
    const std::string* raw = doc.node(n).attr(thread_type);
    if (!raw) continue;
    auto thread = ThreadRef::parse(thread_type, *raw);
    if (!thread) continue;
    std::optional<NodeId> target = referred_node(doc, n, thread_type);
    if (target && in_sentence.count(*target)) {
      view.parent_of[n] = *target;
      view.children_of[*target].push_back(n);
    } else {
      // target outside this sentence: the referring node becomes a root
      view.parent_of[n] = kNoNode;
    }
  }

  // roots: referred-to nodes without a thread of their own, plus nodes
  // whose target lies outside the sentence
  for (NodeId n : nodes) {
    bool participates =
        view.parent_of.count(n) > 0 || view.children_of.count(n) > 0;
    if (!participates) continue;
    auto it = view.parent_of.find(n);
    if (it == view.parent_of.end() || it->second == kNoNode)
      view.roots.push_back(n);
  }
  for (auto it = view.parent_of.begin(); it != view.parent_of.end();) {
    if (it->second == kNoNode)
      it = view.parent_of.erase(it);
    else
      ++it;
  }

  // cycle check: follow parents with a visited mark
  for (NodeId n : nodes) {
    if (!view.contains(n)) continue;
    std::set<NodeId> seen;
    NodeId cur = n;
    while (cur != kNoNode) {
      if (!seen.insert(cur).second) {
        const std::string* name = doc.node(cur).name();
        throw CyclicThreadError(
            "threads of type '" + thread_type + "' form a cycle",
            name ? *name : ("#" + std::to_string(cur)));
      }
      cur = view.parent(cur);
    }
  }

  for (NodeId r : view.roots) {
    view.order.push_back(r);
    collect_view_order(view, r, view.order);
  }
  return view;
}

std::string fresh_name(const Document& doc) {
  std::set<std::string> used;
  for (NodeId i = 0; i < doc.arena_size(); ++i) {
    if (!doc.valid(i)) continue;
    if (const std::string* n = doc.node(i).name()) used.insert(*n);
  }
  for (std::size_t k = 1;; ++k) {
    std::string candidate = "n" + std::to_string(k);
    if (!used.count(candidate)) return candidate;
  }
}

std::size_t reallocate_names(Document& doc) {
  // resolve every thread to its node under the old names first
  struct ThreadSlot {
    NodeId holder;
    std::string key;
    std::string label;
    NodeId target;
  };
  std::vector<ThreadSlot> threads;
  std::vector<NodeId> all;
  for (int s = 0; s < doc.sentence_count(); ++s)
    for (NodeId n : doc.pre_order(s)) all.push_back(n);

  for (NodeId n : all) {
    for (const auto& [k, v] : doc.node(n).attrs) {
      if (k == "name" || k == "tag" || k == "lex") continue;
      auto thread = ThreadRef::parse(k, v);
      if (!thread) continue;
      std::vector<NodeId> targets = doc.find_by_name(thread->target_name);
      if (targets.size() == 1)
        threads.push_back({n, k, thread->label, targets.front()});
    }
  }

  std::unordered_map<NodeId, std::string> assigned;
  std::size_t counter = 0;
  for (NodeId n : all) assigned[n] = "n" + std::to_string(++counter);

  std::size_t renamed = 0;
  for (NodeId n : all) {
    const std::string* old = doc.node(n).name();
    if (!old || *old != assigned[n]) {
      doc.node(n).set_attr("name", assigned[n]);
      ++renamed;
    }
  }
  for (const auto& t : threads)
    doc.node(t.holder).set_attr(t.key, t.label + ":" + assigned[t.target]);
  return renamed;
}

std::string base_text(const Document& doc, int sentence_idx) {
  if (sentence_idx < 0 || sentence_idx >= doc.sentence_count()) return "";
  return base_text_subtree(doc, doc.sentences()[sentence_idx].root);
}

std::string base_text_subtree(const Document& doc, NodeId root) {
  std::string out;
  if (!doc.valid(root)) return out;
  for (NodeId n : doc.subtree(root)) {
    const Node& node = doc.node(n);
    if (!node.is_leaf() || !node.lex || node.lex->empty()) continue;
    if (!out.empty()) out += ' ';
    out += *node.lex;
  }
  return out;
}

}  // namespace ttq
