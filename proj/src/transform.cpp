#include "ttq/transform.hpp"

#include <algorithm>
#include <set>

#include "ttq/io.hpp"
#include "ttq/parser.hpp"

namespace ttq {

namespace {

ResultRecord warning_record(const std::string& text) {
  ResultRecord r;
  r.kind = ResultRecord::Kind::Warning;
  r.label = "warning";
  r.text = text;
  return r;
}

ResultRecord node_record(std::string label, const NodeRef& node) {
  ResultRecord r;
  r.kind = ResultRecord::Kind::Node;
  r.label = std::move(label);
  r.text = base_text_subtree(*node.doc, node.id);
  r.xml = xml_node_fragment(*node.doc, node.id);
  return r;
}

ResultRecord sentence_record(std::string label, const Document& doc, int sentence) {
  ResultRecord r;
  r.kind = ResultRecord::Kind::Sentence;
  r.label = std::move(label);
  r.text = base_text(doc, sentence);
  r.xml = xml_sentence_fragment(doc, sentence);
  return r;
}

bool is_sentence_return(const ValueExpr& v) {
  return v.atoms.size() == 1 && !v.atoms[0].is_literal() && !v.atoms[0].member &&
         v.atoms[0].address.segments.size() == 1 &&
         v.atoms[0].address.segments[0].object == ObjectSym::S;
}

/// Text of a value that must resolve to text (assignment sources, keys).
std::string text_of(const ValueExpr& v, MatchContext& ctx) {
  Value val = resolve_value(v, ctx);
  if (!val.is_text())
    throw EvalError("'" + format_value(v) +
                    "' names a node where text is needed; read one of its members");
  return *val.text;
}

/// Splits a node-assign operand into its address prefix and trailing D
/// segment; `position` receives the requested child slot (-1 = append).
bool split_trailing_d(const NodeAddress& addr, NodeAddress& prefix, int& position) {
  if (addr.segments.empty()) return false;
  const AddressSegment& last = addr.segments.back();
  if (last.object != ObjectSym::D) return false;
  position = -1;
  if (last.index) {
    if (last.index->parts.size() != 1 ||
        last.index->parts[0].kind != IndexPart::Kind::Pick)
      return false;
    const IndexBound& b = last.index->parts[0].pick;
    position = b.last ? -1 : b.position - 1;
  }
  prefix.segments.assign(addr.segments.begin(), addr.segments.end() - 1);
  return true;
}

/// Resolves an address that must produce exactly one node; zero nodes
/// raise AbsentNodeError (callers warn), several an arity error.
NodeRef resolve_single(const NodeAddress& addr, MatchContext& ctx,
                       const std::string& term) {
  std::vector<NodeRef> nodes =
      addr.segments.empty() ? std::vector<NodeRef>{ctx.current}
                            : resolve_address(addr, ctx);
  if (nodes.empty()) throw AbsentNodeError(term);
  if (nodes.size() > 1)
    throw EvalError("'" + term + "' resolves to " + std::to_string(nodes.size()) +
                    " nodes where one is needed");
  return nodes[0];
}

void apply_return(const ActionExpr& action, MatchContext& ctx,
                  std::vector<ResultRecord>& records) {
  std::string label = action.alias ? *action.alias : format_value(action.value);
  if (is_sentence_return(action.value)) {
    records.push_back(sentence_record(std::move(label), *ctx.doc, ctx.sentence));
    return;
  }
  const bool single_address = action.value.atoms.size() == 1 &&
                              !action.value.atoms[0].is_literal();
  try {
    if (single_address) {
      // One record per selected node: the node itself, or one member of it.
      const ValueAtom& atom = action.value.atoms[0];
      std::vector<NodeRef> nodes = resolve_address(atom.address, ctx);
      if (nodes.empty()) throw AbsentNodeError(format_value(action.value));
      std::string key;
      if (atom.member && *atom.member == MemberSym::Attr) {
        Value kv = resolve_value(*atom.attr_key, ctx, 1);
        if (!kv.is_text()) throw EvalError("an attribute key must resolve to text");
        key = *kv.text;
      }
      for (const NodeRef& n : nodes) {
        if (!atom.member) {
          records.push_back(node_record(label, n));
        } else {
          ResultRecord r;
          r.kind = ResultRecord::Kind::Text;
          r.label = label;
          r.text = member_text(ctx, n, *atom.member,
                               atom.attr_key ? &key : nullptr);
          records.push_back(r);
        }
      }
      return;
    }
    Value v = resolve_value(action.value, ctx);
    ResultRecord r;
    r.kind = ResultRecord::Kind::Text;
    r.label = std::move(label);
    r.text = *v.text;
    records.push_back(r);
  } catch (const AbsentNodeError& e) {
    records.push_back(warning_record(e.term() + ": no matching node"));
  }
}

void apply_member_assign(const ActionExpr& action, MatchContext& ctx,
                         MutationPlan& plan, std::vector<ResultRecord>& records) {
  if (action.target.member == MemberSym::Level ||
      action.target.member == MemberSym::Leaf)
    throw TransformError("members v and f are read-only");
  std::string term = format_atom(action.target);
  try {
    std::vector<NodeRef> targets =
        resolve_address(action.target.address, ctx);
    if (targets.empty()) throw AbsentNodeError(term);
    std::string key;
    if (*action.target.member == MemberSym::Attr) {
      Value kv = resolve_value(*action.target.attr_key, ctx);
      if (!kv.is_text()) throw EvalError("an attribute key must resolve to text");
      key = *kv.text;
    }
    std::string value = text_of(action.value, ctx);
    for (const NodeRef& t : targets) {
      MutationPlan::SetMember m;
      m.target = t;
      m.member = *action.target.member;
      m.attr_key = key;
      m.value = value;
      plan.items.push_back(m);
    }
  } catch (const AbsentNodeError& e) {
    records.push_back(warning_record(e.term() + ": no matching node"));
  }
}

void apply_node_assign(const ActionExpr& action, MatchContext& ctx,
                       MutationPlan& plan, std::vector<ResultRecord>& records) {
  const ValueExpr& source = action.value;
  const NodeAddress& target = action.target.address;
  const bool source_is_literal =
      source.atoms.size() == 1 && source.atoms[0].is_literal();

  try {
    if (source_is_literal) {
      const std::string& lit = *source.atoms[0].literal;
      if (lit.empty()) {
        // deletion: assign '' to the target
        std::vector<NodeRef> victims = resolve_address(target, ctx);
        if (victims.empty()) throw AbsentNodeError(format_atom(action.target));
        for (const NodeRef& v : victims) {
          MutationPlan::Delete d;
          d.target = v;
          plan.items.push_back(d);
        }
        return;
      }
      // insertion: the target names the children list to extend
      NodeAddress prefix;
      int position = -1;
      if (!split_trailing_d(target, prefix, position))
        throw TransformError(
            "inserting a node needs a target ending in .D (optionally .D[k])");
      NodeRef parent = resolve_single(prefix, ctx, format_atom(action.target));
      MutationPlan::Insert ins;
      ins.dest_parent = parent;
      ins.tag = lit;
      ins.position = position;
      plan.items.push_back(ins);
      return;
    }

    if (source.atoms.size() != 1 || source.atoms[0].is_literal() ||
        source.atoms[0].member)
      throw TransformError("a node assignment needs a node address on both sides");
    const NodeAddress& src_addr = source.atoms[0].address;

    // The side that ends in .D names the destination children list; the
    // other side names the node to move.
    NodeAddress dest_prefix, moved_addr;
    int position = -1;
    std::string moved_term, dest_term;
    if (split_trailing_d(src_addr, dest_prefix, position)) {
      moved_addr = target;
      moved_term = format_atom(action.target);
      dest_term = format_value(source);
    } else if (split_trailing_d(target, dest_prefix, position)) {
      moved_addr = src_addr;
      moved_term = format_value(source);
      dest_term = format_atom(action.target);
    } else {
      throw TransformError(
          "a node-to-node assignment needs one side ending in .D to name the "
          "destination");
    }
    NodeRef moved = resolve_single(moved_addr, ctx, moved_term);
    NodeRef dest = resolve_single(dest_prefix, ctx, dest_term);
    if (moved.doc != dest.doc)
      throw TransformError("cannot move a node between documents");
    MutationPlan::Move mv;
    mv.source = moved;
    mv.dest_parent = dest;
    mv.position = position;
    plan.items.push_back(mv);
  } catch (const AbsentNodeError& e) {
    records.push_back(warning_record(e.term() + ": no matching node"));
  }
}

}  // namespace

std::vector<ResultRecord> apply_actions(const std::vector<ActionExpr>& actions,
                                        MatchContext& ctx, MutationPlan& plan) {
  std::vector<ResultRecord> records;
  for (const ActionExpr& action : actions) {
    switch (action.kind) {
      case ActionExpr::Kind::Return:
        apply_return(action, ctx, records);
        break;
      case ActionExpr::Kind::MemberAssign:
        apply_member_assign(action, ctx, plan, records);
        break;
      case ActionExpr::Kind::NodeAssign:
        apply_node_assign(action, ctx, plan, records);
        break;
    }
  }
  return records;
}

void move_node(Document& doc, NodeId source, NodeId dest_parent, int position) {
  if (!doc.valid(source) || !doc.valid(dest_parent))
    throw TransformError("move target no longer exists");
  if (doc.node(source).parent == kNoNode)
    throw TransformError("cannot move a sentence root");
  std::vector<NodeId> sub = doc.subtree(source);
  if (std::find(sub.begin(), sub.end(), dest_parent) != sub.end())
    throw CycleError("cannot move a node underneath its own subtree");
  doc.detach(source);
  doc.attach(source, dest_parent, position);
}

NodeId insert_node(Document& doc, NodeId dest_parent, const std::string& tag,
                   int position) {
  if (!doc.valid(dest_parent))
    throw TransformError("insertion parent no longer exists");
  NodeId id = doc.create_node(tag);
  doc.node(id).set_attr("name", fresh_name(doc));
  doc.attach(id, dest_parent, position);
  return id;
}

std::vector<ResultRecord> delete_node(Document& doc, NodeId target) {
  if (!doc.valid(target)) throw TransformError("deletion target no longer exists");
  if (doc.node(target).parent == kNoNode)
    throw TransformError("cannot delete a sentence root");

  std::set<std::string> removed_names;
  for (NodeId n : doc.subtree(target))
    if (const std::string* name = doc.node(n).name()) removed_names.insert(*name);
  std::vector<NodeId> removed_ids = doc.subtree(target);
  doc.remove_subtree(target);

  std::vector<ResultRecord> warnings;
  if (removed_names.empty()) return warnings;
  for (int s = 0; s < doc.sentence_count(); ++s) {
    for (NodeId n : doc.pre_order(s)) {
      for (const auto& [key, value] : doc.node(n).attrs) {
        if (key == "name") continue;
        auto thread = ThreadRef::parse(key, value);
        if (!thread || !removed_names.count(thread->target_name)) continue;
        if (!doc.find_by_name(thread->target_name).empty()) continue;
        const std::string* holder = doc.node(n).name();
        warnings.push_back(warning_record(
            "thread '" + key + "' on node " +
            (holder ? "'" + *holder + "'" : "#" + std::to_string(n)) +
            " dangles: target '" + thread->target_name + "' was removed"));
      }
    }
  }
  return warnings;
}

std::size_t apply_plan(MutationPlan& plan, bool guard_base_text,
                       std::vector<ResultRecord>* warnings) {
  if (plan.empty()) return 0;

  std::vector<Document*> docs;
  auto doc_of = [&](const NodeRef& r) {
    if (r.doc && std::find(docs.begin(), docs.end(), r.doc) == docs.end())
      docs.push_back(r.doc);
  };
  for (const auto& item : plan.items) {
    if (const auto* m = std::get_if<MutationPlan::SetMember>(&item)) doc_of(m->target);
    if (const auto* m = std::get_if<MutationPlan::Move>(&item)) {
      doc_of(m->source);
      doc_of(m->dest_parent);
    }
    if (const auto* m = std::get_if<MutationPlan::Insert>(&item)) doc_of(m->dest_parent);
    if (const auto* m = std::get_if<MutationPlan::Delete>(&item)) doc_of(m->target);
  }

  std::vector<Document> snapshots;
  std::vector<std::vector<std::string>> before_texts;
  if (guard_base_text) {
    for (Document* d : docs) {
      snapshots.push_back(*d);
      std::vector<std::string> texts;
      for (int s = 0; s < d->sentence_count(); ++s) texts.push_back(base_text(*d, s));
      before_texts.push_back(std::move(texts));
    }
  }

  auto warn = [&](const std::string& text) {
    if (warnings) warnings->push_back(warning_record(text));
  };

  std::size_t applied = 0;
  for (const auto& item : plan.items) {
    if (const auto* m = std::get_if<MutationPlan::SetMember>(&item)) {
      if (!m->target.doc->valid(m->target.id)) {
        warn("assignment target was removed earlier in this plan");
        continue;
      }
      Node& n = m->target.doc->node(m->target.id);
      switch (m->member) {
        case MemberSym::Lex: n.lex = m->value; break;
        case MemberSym::Tag: n.tag = m->value; break;
        case MemberSym::Attr: n.set_attr(m->attr_key, m->value); break;
        default: throw TransformError("members v and f are read-only");
      }
      ++applied;
    } else if (const auto* m = std::get_if<MutationPlan::Move>(&item)) {
      try {
        move_node(*m->source.doc, m->source.id, m->dest_parent.id, m->position);
        ++applied;
      } catch (const CycleError& e) {
        warn(std::string(e.what()) + "; move skipped");
      }
    } else if (const auto* m = std::get_if<MutationPlan::Insert>(&item)) {
      insert_node(*m->dest_parent.doc, m->dest_parent.id, m->tag, m->position);
      ++applied;
    } else if (const auto* m = std::get_if<MutationPlan::Delete>(&item)) {
      if (!m->target.doc->valid(m->target.id)) continue;  // removed with an earlier subtree
      std::vector<ResultRecord> dangling = delete_node(*m->target.doc, m->target.id);
      if (warnings)
        warnings->insert(warnings->end(), dangling.begin(), dangling.end());
      ++applied;
    }
  }

  if (guard_base_text) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (int s = 0; s < docs[i]->sentence_count(); ++s) {
        std::string after = base_text(*docs[i], s);
        std::string before =
            s < static_cast<int>(before_texts[i].size()) ? before_texts[i][s] : "";
        if (after != before) {
          for (std::size_t j = 0; j < docs.size(); ++j) *docs[j] = snapshots[j];
          throw GuardViolation(s + 1, before, after);
        }
      }
    }
  }
  plan.clear();
  return applied;
}

CommandRegistry::CommandRegistry() {
  register_command("reallocateNames", [](Document& doc) {
    std::size_t renamed = reallocate_names(doc);
    ResultRecord r;
    r.kind = ResultRecord::Kind::Text;
    r.label = "reallocateNames";
    r.text = "renamed " + std::to_string(renamed) + " node(s)";
    return std::vector<ResultRecord>{r};
  });
}

void CommandRegistry::register_command(const std::string& name, CommandFn fn) {
  commands_[name] = std::move(fn);
}

bool CommandRegistry::has(const std::string& name) const {
  return commands_.count(name) > 0;
}

std::vector<ResultRecord> CommandRegistry::execute(const std::string& name,
                                                   Document& doc) const {
  auto it = commands_.find(name);
  if (it == commands_.end()) throw CommandError("unknown command '" + name + "'");
  return it->second(doc);
}

RunOutput run_program(const QueryAst& ast, SourceSet& sources,
                      const CommandRegistry& registry, const RunOptions& options) {
  RunOutput out;
  Document* primary = sources.primary();
  if (!primary) throw EvalError("no source document is loaded");

  if (ast.command && !ast.condition) {
    std::vector<ResultRecord> recs = registry.execute(ast.command->name, *primary);
    out.records.insert(out.records.end(), recs.begin(), recs.end());
    out.mutated = true;
    return out;
  }

  // A bare condition with no right-hand side returns the matching node.
  std::vector<ActionExpr> actions = ast.actions;
  if (actions.empty() && !ast.command) {
    ActionExpr ret;
    ret.kind = ActionExpr::Kind::Return;
    ValueAtom c;
    c.address.segments.push_back(AddressSegment{ObjectSym::C, std::nullopt});
    ret.value.atoms.push_back(std::move(c));
    actions.push_back(std::move(ret));
  }

  EngineOptions eopts;
  eopts.default_thread = options.default_thread;
  bool any_match = false;
  MutationPlan plan;
  run_query(
      ast, sources, eopts,
      [&](const MatchResult& m) {
        ++out.match_count;
        any_match = true;
        if (ast.command) return;
        MatchContext ctx = m.context;
        std::vector<ResultRecord> recs = apply_actions(actions, ctx, plan);
        out.records.insert(out.records.end(), recs.begin(), recs.end());
      },
      [&](int) {
        std::vector<ResultRecord> warns;
        out.mutation_count += apply_plan(plan, options.guard_base_text, &warns);
        out.records.insert(out.records.end(), warns.begin(), warns.end());
      });

  if (out.mutation_count > 0) out.mutated = true;
  if (ast.command && any_match) {
    std::vector<ResultRecord> recs = registry.execute(ast.command->name, *primary);
    out.records.insert(out.records.end(), recs.begin(), recs.end());
    out.mutated = true;
  }
  return out;
}

}  // namespace ttq
