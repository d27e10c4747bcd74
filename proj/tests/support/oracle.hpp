#pragma once

// Naive reference evaluation of the comparison queries, used to
// cross-check the engine. Everything here recomputes results with
// direct tree walks and local helpers, independently of the engine's
// branch-and-bind evaluator.

#include <algorithm>
#include <string>
#include <vector>

#include "ttq/model.hpp"

namespace ttq::test::oracle {

inline void pre_walk(const Document& d, NodeId id, std::vector<NodeId>& out) {
  out.push_back(id);
  for (NodeId k : d.node(id).children) pre_walk(d, k, out);
}

inline std::vector<NodeId> pre(const Document& d, int s) {
  std::vector<NodeId> out;
  pre_walk(d, d.sentences()[s].root, out);
  return out;
}

inline std::string tag_of(const Document& d, NodeId id) { return d.node(id).tag; }

inline std::string lex_of(const Document& d, NodeId id) {
  return d.node(id).lex ? *d.node(id).lex : "";
}

inline std::string attr_of(const Document& d, NodeId id, const std::string& key) {
  const std::string* v = d.node(id).attr(key);
  return v ? *v : "";
}

// Nearest first.
inline std::vector<NodeId> ancestors(const Document& d, NodeId id) {
  std::vector<NodeId> out;
  for (NodeId p = d.node(id).parent; p != kNoNode; p = d.node(p).parent)
    out.push_back(p);
  return out;
}

// Nodes before/after `id` in its sentence's pre-order walk, nearest first.
inline std::vector<NodeId> preceding(const Document& d, int s, NodeId id) {
  std::vector<NodeId> order = pre(d, s);
  auto it = std::find(order.begin(), order.end(), id);
  std::vector<NodeId> out(order.begin(), it);
  std::reverse(out.begin(), out.end());
  return out;
}

inline std::vector<NodeId> following(const Document& d, int s, NodeId id) {
  std::vector<NodeId> order = pre(d, s);
  auto it = std::find(order.begin(), order.end(), id);
  return std::vector<NodeId>(it + 1, order.end());
}

// Proper descendants in pre-order.
inline std::vector<NodeId> descendants(const Document& d, NodeId id) {
  std::vector<NodeId> out;
  pre_walk(d, id, out);
  out.erase(out.begin());
  return out;
}

// Anchored glob over bytes; recursive on purpose (the engine's matcher
// is iterative).
inline bool glob(const std::string& pat, const std::string& text, std::size_t pi = 0,
                 std::size_t ti = 0) {
  if (pi == pat.size()) return ti == text.size();
  if (pat[pi] == '*') {
    for (std::size_t skip = 0; ti + skip <= text.size(); ++skip)
      if (glob(pat, text, pi + 1, ti + skip)) return true;
    return false;
  }
  if (ti == text.size()) return false;
  if (pat[pi] != '?' && pat[pi] != text[ti]) return false;
  return glob(pat, text, pi + 1, ti + 1);
}

// Leaves with lexical data joined by single spaces.
inline std::string sentence_text(const Document& d, int s) {
  std::string out;
  for (NodeId id : pre(d, s)) {
    if (!d.node(id).children.empty()) continue;
    std::string l = lex_of(d, id);
    if (l.empty()) continue;
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

// --------------------------------------------------------------------------
// The seven comparison queries. Each returns the nodes C binds to, in
// sentence order then pre-order, plus whatever the query returns.

// C.l='saw' -> S
inline std::vector<NodeId> q1(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s))
      if (lex_of(d, c) == "saw") out.push_back(c);
  return out;
}

// C.v='0' AND C.D[*:0].l/p='saw' -> S
// v is the node's depth, so C is a root; the [*:0] index asks that no
// descendant satisfy the comparison.
inline std::vector<NodeId> q2(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s) {
    NodeId root = d.sentences()[s].root;
    bool has_saw = false;
    for (NodeId c : descendants(d, root))
      if (lex_of(d, c) == "saw") has_saw = true;
    if (!has_saw) out.push_back(root);
  }
  return out;
}

// C.t='NP' AND C.D[z].t='NN'
inline std::vector<NodeId> q3(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s)) {
      if (tag_of(d, c) != "NP") continue;
      const auto& kids = d.node(c).children;
      if (!kids.empty() && tag_of(d, kids.back()) == "NN") out.push_back(c);
    }
  return out;
}

// C.t='VP' AND C.D[*].t~'V*'/p AND M[p].N.t='NP' AND M[p].N[2].t='NP'
inline std::vector<NodeId> q4(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s)) {
      if (tag_of(d, c) != "VP") continue;
      std::vector<NodeId> p;
      for (NodeId b : descendants(d, c))
        if (glob("V*", tag_of(d, b))) p.push_back(b);
      if (p.empty()) continue;
      bool next_np = false, next2_np = false;
      for (NodeId b : p) {
        std::vector<NodeId> after = following(d, s, b);
        if (after.size() >= 1 && tag_of(d, after[0]) == "NP") next_np = true;
        if (after.size() >= 2 && tag_of(d, after[1]) == "NP") next2_np = true;
      }
      if (next_np && next2_np) out.push_back(c);
    }
  return out;
}

// P[*].t/p='NP' and C.t='VP' AND M[p:@].A[*]=C.A[*]/q -> M[q:1]
struct Q5Match {
  NodeId c;
  NodeId first_common;  // what M[q:1] returns
};

inline std::vector<Q5Match> q5(const Document& d) {
  std::vector<Q5Match> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s)) {
      if (tag_of(d, c) != "VP") continue;
      std::vector<NodeId> p;
      for (NodeId b : preceding(d, s, c))
        if (tag_of(d, b) == "NP") p.push_back(b);
      if (p.empty()) continue;
      std::vector<NodeId> c_anc = ancestors(d, c);
      std::vector<NodeId> q;
      bool all_share = true;
      for (NodeId pb : p) {
        NodeId found = kNoNode;
        for (NodeId a : ancestors(d, pb))
          if (std::find(c_anc.begin(), c_anc.end(), a) != c_anc.end()) {
            found = a;
            break;
          }
        if (found == kNoNode) {
          all_share = false;
          break;
        }
        if (std::find(q.begin(), q.end(), found) == q.end()) q.push_back(found);
      }
      if (!all_share) continue;
      out.push_back({c, q.front()});
    }
  return out;
}

// C.t='NP' AND C.D[*].l='dark'/p AND M[p:1].A[*].a['tone']='LTone'
inline std::vector<NodeId> q6(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s)) {
      if (tag_of(d, c) != "NP") continue;
      std::vector<NodeId> p;
      for (NodeId b : descendants(d, c))
        if (lex_of(d, b) == "dark") p.push_back(b);
      if (p.empty()) continue;
      bool toned = false;
      for (NodeId a : ancestors(d, p.front()))
        if (attr_of(d, a, "tone") == "LTone") toned = true;
      if (toned) out.push_back(c);
    }
  return out;
}

// C.t='NP' AND C.A[*].t='VP'
inline std::vector<NodeId> q7(const Document& d) {
  std::vector<NodeId> out;
  for (int s = 0; s < d.sentence_count(); ++s)
    for (NodeId c : pre(d, s)) {
      if (tag_of(d, c) != "NP") continue;
      for (NodeId a : ancestors(d, c))
        if (tag_of(d, a) == "VP") {
          out.push_back(c);
          break;
        }
    }
  return out;
}

}  // namespace ttq::test::oracle
