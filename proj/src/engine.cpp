#include "ttq/engine.hpp"

#include <algorithm>

#include "ttq/parser.hpp"

namespace ttq {

void SourceSet::add(std::shared_ptr<Document> doc, std::optional<std::string> alias) {
  docs_.push_back(std::move(doc));
  aliases_.push_back(std::move(alias));
}

Document* SourceSet::primary() const {
  return docs_.empty() ? nullptr : docs_.front().get();
}

Document* SourceSet::by_alias(const std::string& alias) const {
  for (std::size_t i = 0; i < docs_.size(); ++i)
    if (aliases_[i] && *aliases_[i] == alias) return docs_[i].get();
  return nullptr;
}

void SourceSet::clear() {
  docs_.clear();
  aliases_.clear();
}

TreeHandle MatchContext::tree_for(const NodeRef& node) const {
  TreeHandle h;
  h.doc = node.doc;
  h.sentence = node.doc->sentence_of(node.id);
  if (view && node.doc == doc && h.sentence == sentence && view->contains(node.id))
    h.view = view;
  return h;
}

bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

bool compare_text(CompareOp op, const std::string& lhs, const std::string& rhs) {
  switch (op) {
    case CompareOp::Eq: return lhs == rhs;
    case CompareOp::Ne: return lhs != rhs;
    case CompareOp::Like: return glob_match(rhs, lhs);
    case CompareOp::NotLike: return !glob_match(rhs, lhs);
  }
  return false;
}

std::string member_text(const MatchContext& ctx, const NodeRef& node,
                        MemberSym member, const std::string* attr_key) {
  const Node& n = node.doc->node(node.id);
  switch (member) {
    case MemberSym::Lex: return n.lex.value_or("");
    case MemberSym::Tag: return n.tag;
    case MemberSym::Attr: {
      const std::string* v = attr_key ? n.attr(*attr_key) : nullptr;
      return v ? *v : "";
    }
    case MemberSym::Level:
      return std::to_string(level_in(ctx.tree_for(node), node.id));
    case MemberSym::Leaf:
      return leaf_in(ctx.tree_for(node), node.id) ? "t" : "f";
  }
  return "";
}

namespace {

Axis axis_of(ObjectSym o) {
  switch (o) {
    case ObjectSym::P: return Axis::P;
    case ObjectSym::N: return Axis::N;
    case ObjectSym::Pr: return Axis::Pr;
    case ObjectSym::Nx: return Axis::Nx;
    case ObjectSym::A: return Axis::A;
    default: return Axis::D;
  }
}

bool quantifier_kind(IndexPart::Kind k) {
  switch (k) {
    case IndexPart::Kind::Any:
    case IndexPart::Kind::All:
    case IndexPart::Kind::First:
    case IndexPart::Kind::LastMatch:
    case IndexPart::Kind::None:
      return true;
    default:
      return false;
  }
}

std::vector<NodeRef> slice_range(const std::vector<NodeRef>& v, const IndexPart& r) {
  if (v.empty()) return {};
  long lo = 1, hi = static_cast<long>(v.size());
  if (r.lo) lo = r.lo->last ? static_cast<long>(v.size()) : r.lo->position;
  if (r.hi) hi = r.hi->last ? static_cast<long>(v.size()) : r.hi->position;
  lo = std::max(lo, 1L);
  hi = std::min(hi, static_cast<long>(v.size()));
  if (lo > hi) return {};
  return {v.begin() + (lo - 1), v.begin() + hi};
}

/// Maps the current primary node into another source: same sentence,
/// same pre-order position. Empty when the other document runs short.
NodeRef corresponding_node(const MatchContext& ctx, const std::string& alias) {
  Document* other = ctx.sources ? ctx.sources->by_alias(alias) : nullptr;
  if (!other) throw EvalError("unknown source alias '" + alias + "'");
  if (ctx.sentence >= other->sentence_count()) return {};
  std::vector<NodeId> base = ctx.doc->pre_order(ctx.sentence);
  auto it = std::find(base.begin(), base.end(), ctx.current.id);
  if (it == base.end()) return {};
  std::size_t pos = static_cast<std::size_t>(it - base.begin());
  std::vector<NodeId> target = other->pre_order(ctx.sentence);
  if (pos >= target.size()) return {};
  return NodeRef{other, target[pos]};
}

std::string resolve_thread_key(const IndexSpec* index, MatchContext& ctx, int depth) {
  if (index && !index->parts.empty() &&
      index->parts[0].kind == IndexPart::Kind::Key) {
    Value v = resolve_value(*index->parts[0].key, ctx, depth + 1);
    if (!v.is_text()) throw EvalError("a thread key must resolve to text");
    return *v.text;
  }
  if (ctx.options && ctx.options->default_thread) return *ctx.options->default_thread;
  throw EvalError("no thread type given and no default thread type is set");
}

/// Candidate list plus the selector to lift or select with, for the
/// enumerating objects (M, R, T and the six axes).
struct SegmentPlan {
  std::vector<NodeRef> cands;
  IndexPart selector;
};

SegmentPlan plan_segment(const AddressSegment& seg, NodeRef cur, MatchContext& ctx,
                         int depth) {
  SegmentPlan plan;
  plan.selector.kind = IndexPart::Kind::Pick;
  plan.selector.pick = IndexBound{false, 1};
  const IndexSpec* idx = seg.index ? &*seg.index : nullptr;

  switch (seg.object) {
    case ObjectSym::M: {
      const std::string& name = idx->parts[0].alias;
      auto it = ctx.bindings.find(name);
      if (it == ctx.bindings.end())
        throw EvalError("alias '" + name + "' is unbound here");
      plan.cands = it->second;
      if (idx->parts.size() == 2)
        plan.selector = idx->parts[1];
      else
        plan.selector.kind = IndexPart::Kind::Any;  // the whole bound list
      return plan;
    }
    case ObjectSym::R: {
      std::string key = resolve_thread_key(idx, ctx, depth);
      std::optional<NodeId> target = referred_node(*cur.doc, cur.id, key);
      if (target) plan.cands.push_back(NodeRef{cur.doc, *target});
      return plan;
    }
    case ObjectSym::T: {
      std::string key = resolve_thread_key(idx, ctx, depth);
      for (NodeId n : referring_nodes(*cur.doc, cur.id, key))
        plan.cands.push_back(NodeRef{cur.doc, n});
      if (idx && !idx->parts.empty()) {
        if (idx->parts[0].kind == IndexPart::Kind::Key) {
          if (idx->parts.size() == 2) plan.selector = idx->parts[1];
        } else {
          plan.selector = idx->parts[0];
        }
      }
      return plan;
    }
    default: {  // axes
      TreeHandle tree = ctx.tree_for(cur);
      DepthMode mode = DepthMode::Children;
      if (seg.object == ObjectSym::D && idx && !idx->parts.empty() &&
          quantifier_kind(idx->parts[0].kind))
        mode = DepthMode::Descendants;
      std::vector<NodeId> ids =
          axis_candidates(tree, cur.id, axis_of(seg.object), mode);
      plan.cands.reserve(ids.size());
      for (NodeId n : ids) plan.cands.push_back(NodeRef{cur.doc, n});
      if (idx && !idx->parts.empty()) {
        if (idx->parts.size() == 2) {
          // part one enumerates (a range slices), part two selects
          if (idx->parts[0].kind == IndexPart::Kind::Range)
            plan.cands = slice_range(plan.cands, idx->parts[0]);
          plan.selector = idx->parts[1];
        } else {
          plan.selector = idx->parts[0];
        }
      }
      return plan;
    }
  }
}

/// Branch-and-bind evaluator for one comparison: atoms left to right,
/// quantified index parts as branch points over the continuation.
class ComparisonEval {
 public:
  ComparisonEval(const Comparison& cmp, MatchContext& ctx) : cmp_(cmp), ctx_(ctx) {
    for (std::size_t i = 0; i < cmp.lhs.atoms.size(); ++i)
      slots_.push_back({&cmp.lhs.atoms[i], 0, static_cast<int>(i)});
    for (std::size_t i = 0; i < cmp.rhs.atoms.size(); ++i)
      slots_.push_back({&cmp.rhs.atoms[i], 1, static_cast<int>(i)});
    pins_.resize(slots_.size());
    if (cmp.alias) {
      for (std::size_t k = 0; k < slots_.size(); ++k)
        if (slots_[k].side == cmp.alias_side && slots_[k].index == cmp.alias_atom)
          aliased_ = static_cast<int>(k);
      if (aliased_ >= 0 && !slots_[aliased_].atom->is_literal())
        for (const AddressSegment& seg : slots_[aliased_].atom->address.segments)
          if (seg.index)
            for (const IndexPart& p : seg.index->parts)
              if (p.kind == IndexPart::Kind::LastMatch) trim_to_last_ = true;
    }
  }

  bool run() {
    bool ok = eval_from(0);
    if (ok && cmp_.alias) {
      if (collected_.empty() && aliased_ >= 0 && slots_[aliased_].atom->is_literal())
        collected_.push_back(ctx_.current);
      if (trim_to_last_ && collected_.size() > 1)
        collected_ = {collected_.back()};
      ctx_.bindings[*cmp_.alias] = collected_;
    }
    return ok;
  }

 private:
  struct Slot {
    const ValueAtom* atom;
    int side;
    int index;
  };
  struct Pin {
    NodeRef node;  // empty for literal slots
  };

  bool eval_from(std::size_t k) {
    if (k == slots_.size()) return compare_pins();
    const ValueAtom& a = *slots_[k].atom;
    if (a.is_literal()) return eval_from(k + 1);
    return walk(k, 0, ctx_.current);
  }

  bool walk(std::size_t k, std::size_t si, NodeRef cur) {
    const auto& segs = slots_[k].atom->address.segments;
    if (si == segs.size()) {
      pins_[k].node = cur;
      bool ok = eval_from(k + 1);
      if (ok && static_cast<int>(k) == aliased_) collect(cur);
      return ok;
    }
    if (!cur) return false;
    const AddressSegment& seg = segs[si];
    switch (seg.object) {
      case ObjectSym::C:
        return walk(k, si + 1, cur);
      case ObjectSym::S:
        throw EvalError("S cannot be used inside a comparison");
      case ObjectSym::F: {
        NodeRef mapped = corresponding_node(ctx_, seg.index->parts[0].alias);
        return mapped ? walk(k, si + 1, mapped) : false;
      }
      default: {
        SegmentPlan plan = plan_segment(seg, cur, ctx_, 0);
        return apply_lift(k, si, plan.cands, plan.selector);
      }
    }
  }

  bool apply_lift(std::size_t k, std::size_t si, const std::vector<NodeRef>& cands,
                  const IndexPart& sel) {
    const bool exhaustive = static_cast<int>(k) == aliased_;
    const std::size_t mark = collected_.size();
    auto cont = [&](NodeRef c) { return walk(k, si + 1, c); };
    auto fail = [&]() {
      collected_.resize(mark);
      return false;
    };
    switch (sel.kind) {
      case IndexPart::Kind::Pick: {
        long pos = sel.pick.last ? static_cast<long>(cands.size()) : sel.pick.position;
        if (pos < 1 || pos > static_cast<long>(cands.size())) return fail();
        return cont(cands[pos - 1]) ? true : fail();
      }
      case IndexPart::Kind::First: {
        for (const NodeRef& c : cands)
          if (cont(c)) return true;
        return fail();
      }
      case IndexPart::Kind::LastMatch: {
        bool any = false;
        for (const NodeRef& c : cands)
          if (cont(c)) any = true;
        return any ? true : fail();
      }
      case IndexPart::Kind::Any: {
        bool any = false;
        for (const NodeRef& c : cands) {
          if (cont(c)) {
            any = true;
            if (!exhaustive) return true;
          }
        }
        return any ? true : fail();
      }
      case IndexPart::Kind::Range: {
        std::vector<NodeRef> sliced = slice_range(cands, sel);
        bool any = false;
        for (const NodeRef& c : sliced) {
          if (cont(c)) {
            any = true;
            if (!exhaustive) return true;
          }
        }
        return any ? true : fail();
      }
      case IndexPart::Kind::All: {
        for (const NodeRef& c : cands)
          if (!cont(c)) return fail();
        return true;  // vacuously true on an empty list
      }
      case IndexPart::Kind::None: {
        for (const NodeRef& c : cands)
          if (cont(c)) return fail();
        return true;
      }
      default:
        throw EvalError("key or alias index cannot quantify here");
    }
  }

  void collect(NodeRef n) {
    if (std::find(collected_.begin(), collected_.end(), n) == collected_.end())
      collected_.push_back(n);
  }

  bool compare_pins() {
    struct Side {
      bool bare = false;
      NodeRef node;
      std::string text;
    };
    Side sides[2];
    for (int s = 0; s < 2; ++s) {
      const ValueExpr& ve = s == 0 ? cmp_.lhs : cmp_.rhs;
      if (ve.atoms.size() == 1 && !ve.atoms[0].is_literal() &&
          !ve.atoms[0].member) {
        sides[s].bare = true;
        sides[s].node = pin(s, 0).node;
        continue;
      }
      std::string text;
      for (std::size_t i = 0; i < ve.atoms.size(); ++i) {
        const ValueAtom& a = ve.atoms[i];
        if (a.is_literal()) {
          text += *a.literal;
          continue;
        }
        if (!a.member)
          throw EvalError(
              "a bare node cannot join a text comparison; read one of its members");
        std::string key;
        const std::string* keyp = nullptr;
        if (*a.member == MemberSym::Attr) {
          Value kv = resolve_value(*a.attr_key, ctx_, 1);
          if (!kv.is_text()) throw EvalError("an attribute key must resolve to text");
          key = *kv.text;
          keyp = &key;
        }
        text += member_text(ctx_, pin(s, i).node, *a.member, keyp);
      }
      sides[s].text = std::move(text);
    }
    if (sides[0].bare && sides[1].bare) {
      switch (cmp_.op) {
        case CompareOp::Eq: return sides[0].node == sides[1].node;
        case CompareOp::Ne: return !(sides[0].node == sides[1].node);
        default:
          throw EvalError("'~' and '!~' need text operands, not nodes");
      }
    }
    if (sides[0].bare || sides[1].bare)
      throw EvalError("cannot compare a node with text");
    return compare_text(cmp_.op, sides[0].text, sides[1].text);
  }

  const Pin& pin(int side, std::size_t index) const {
    std::size_t base = side == 0 ? 0 : cmp_.lhs.atoms.size();
    return pins_[base + index];
  }

  const Comparison& cmp_;
  MatchContext& ctx_;
  std::vector<Slot> slots_;
  std::vector<Pin> pins_;
  std::vector<NodeRef> collected_;
  int aliased_ = -1;
  bool trim_to_last_ = false;
};

}  // namespace

bool eval_comparison(const Comparison& cmp, MatchContext& ctx) {
  ComparisonEval ev(cmp, ctx);
  return ev.run();
}

bool eval_condition(const ConditionExpr& cond, MatchContext& ctx) {
  switch (cond.kind) {
    case ConditionExpr::Kind::Leaf:
      return eval_comparison(*cond.cmp, ctx);
    case ConditionExpr::Kind::And:
      for (const ConditionExpr& ch : cond.children)
        if (!eval_condition(ch, ctx)) return false;
      return true;
    case ConditionExpr::Kind::Or:
      for (const ConditionExpr& ch : cond.children)
        if (eval_condition(ch, ctx)) return true;
      return false;
    case ConditionExpr::Kind::Not: {
      auto saved = ctx.bindings;
      bool inner = eval_condition(cond.children[0], ctx);
      ctx.bindings = std::move(saved);
      return !inner;
    }
  }
  return false;
}

std::vector<NodeRef> resolve_address(const NodeAddress& address, MatchContext& ctx,
                                     int depth) {
  if (depth > 8) throw EvalError("value evaluation nested too deeply");
  std::vector<NodeRef> cur = {ctx.current};
  for (const AddressSegment& seg : address.segments) {
    std::vector<NodeRef> next;
    auto add = [&](NodeRef r) {
      if (r && std::find(next.begin(), next.end(), r) == next.end())
        next.push_back(r);
    };
    switch (seg.object) {
      case ObjectSym::C:
        next = cur;
        break;
      case ObjectSym::S:
        throw EvalError("S stands for the whole sentence and cannot be navigated");
      case ObjectSym::F:
        add(corresponding_node(ctx, seg.index->parts[0].alias));
        break;
      default: {
        for (const NodeRef& c : cur) {
          SegmentPlan plan = plan_segment(seg, c, ctx, depth);
          switch (plan.selector.kind) {
            case IndexPart::Kind::Pick: {
              long pos = plan.selector.pick.last
                             ? static_cast<long>(plan.cands.size())
                             : plan.selector.pick.position;
              if (pos >= 1 && pos <= static_cast<long>(plan.cands.size()))
                add(plan.cands[pos - 1]);
              break;
            }
            case IndexPart::Kind::First:
              if (!plan.cands.empty()) add(plan.cands.front());
              break;
            case IndexPart::Kind::LastMatch:
              if (!plan.cands.empty()) add(plan.cands.back());
              break;
            case IndexPart::Kind::Any:
            case IndexPart::Kind::All:
              for (const NodeRef& r : plan.cands) add(r);
              break;
            case IndexPart::Kind::None:
              break;
            case IndexPart::Kind::Range:
              for (const NodeRef& r : slice_range(plan.cands, plan.selector)) add(r);
              break;
            default:
              throw EvalError("key or alias index cannot select here");
          }
          if (seg.object == ObjectSym::M) break;  // bindings do not depend on c
        }
        break;
      }
    }
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return cur;
}

Value resolve_value(const ValueExpr& value, MatchContext& ctx, int depth) {
  if (depth > 8) throw EvalError("value evaluation nested too deeply");
  if (value.atoms.size() == 1 && !value.atoms[0].is_literal() &&
      !value.atoms[0].member) {
    Value out;
    out.nodes = resolve_address(value.atoms[0].address, ctx, depth);
    return out;
  }
  std::string text;
  for (const ValueAtom& atom : value.atoms) {
    if (atom.is_literal()) {
      text += *atom.literal;
      continue;
    }
    std::vector<NodeRef> nodes = resolve_address(atom.address, ctx, depth);
    if (nodes.size() > 1)
      throw EvalError("'" + format_atom(atom) + "' resolves to " +
                      std::to_string(nodes.size()) + " nodes where one is needed");
    if (!atom.member)
      throw EvalError("a bare node cannot join a text value; read one of its members");
    if (nodes.empty()) continue;  // a missing node's members read as empty
    std::string key;
    const std::string* keyp = nullptr;
    if (*atom.member == MemberSym::Attr) {
      Value kv = resolve_value(*atom.attr_key, ctx, depth + 1);
      if (!kv.is_text()) throw EvalError("an attribute key must resolve to text");
      key = *kv.text;
      keyp = &key;
    }
    text += member_text(ctx, nodes[0], *atom.member, keyp);
  }
  Value out;
  out.text = std::move(text);
  return out;
}

void run_query(const QueryAst& ast, SourceSet& sources, const EngineOptions& options,
               const MatchCallback& on_match, const SentenceCallback& after_sentence) {
  Document* primary = sources.primary();
  if (!primary) throw EvalError("no source document is loaded");
  if (!ast.condition) {
    if (after_sentence)
      for (int s = 0; s < primary->sentence_count(); ++s) after_sentence(s);
    return;
  }
  for (int s = 0; s < primary->sentence_count(); ++s) {
    std::optional<ThreadTreeView> view;
    if (ast.tt_directive)
      view = extract_thread_tree(*primary, s, *ast.tt_directive);
    std::vector<NodeId> order = view ? view->order : primary->pre_order(s);
    for (NodeId n : order) {
      MatchContext ctx;
      ctx.sources = &sources;
      ctx.doc = primary;
      ctx.sentence = s;
      ctx.current = NodeRef{primary, n};
      ctx.view = view ? &*view : nullptr;
      ctx.options = &options;
      if (eval_condition(*ast.condition, ctx)) {
        MatchResult res;
        res.matched = true;
        res.context = std::move(ctx);
        on_match(res);
      }
    }
    if (after_sentence) after_sentence(s);
  }
}

}  // namespace ttq
