#pragma once

// Shared fixtures and run helpers for the test binaries.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ttq/engine.hpp"
#include "ttq/model.hpp"
#include "ttq/parser.hpp"
#include "ttq/transform.hpp"

namespace ttq::test {

// ---------------------------------------------------------------------------
// Declarative tree building

struct TB {
  std::string tag;
  std::string lex;  // empty = no lexical data
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<TB> kids;
};

inline TB leaf(std::string tag, std::string lex,
               std::vector<std::pair<std::string, std::string>> attrs = {}) {
  return TB{std::move(tag), std::move(lex), std::move(attrs), {}};
}

inline TB n(std::string tag, std::vector<TB> kids,
            std::vector<std::pair<std::string, std::string>> attrs = {}) {
  return TB{std::move(tag), "", std::move(attrs), std::move(kids)};
}

inline NodeId add_tree(Document& d, const TB& t, NodeId parent = kNoNode) {
  NodeId id = d.create_node(t.tag);
  if (!t.lex.empty()) d.node(id).lex = t.lex;
  for (const auto& [k, v] : t.attrs) d.node(id).set_attr(k, v);
  if (parent != kNoNode) d.attach(id, parent);
  for (const TB& kid : t.kids) add_tree(d, kid, id);
  return id;
}

inline int add_sentence(Document& d, const TB& t) {
  return d.add_sentence(add_tree(d, t));
}

inline NodeId by_name(const Document& d, const std::string& name) {
  auto v = d.find_by_name(name);
  return v.empty() ? kNoNode : v[0];
}

// ---------------------------------------------------------------------------
// Named fixtures

// "Ram reads a book": S(n1){ NP(n2){ NNP n21 }, VP(n3){ VBZ n31,
// NP(n4){ DT n41, NN n42 } } } with deprel threads n2->n3 and n4->n3.
inline std::shared_ptr<Document> fixture1(bool with_threads = true) {
  auto d = std::make_shared<Document>();
  std::vector<std::pair<std::string, std::string>> np2{{"name", "n2"}};
  std::vector<std::pair<std::string, std::string>> np4{{"name", "n4"}};
  if (with_threads) {
    np2.emplace_back("deprel", "a:n3");
    np4.emplace_back("deprel", "o:n3");
  }
  add_sentence(
      *d, n("S",
            {n("NP", {leaf("NNP", "Ram", {{"name", "n21"}})}, np2),
             n("VP",
               {leaf("VBZ", "reads", {{"name", "n31"}}),
                n("NP",
                  {leaf("DT", "a", {{"name", "n41"}}),
                   leaf("NN", "book", {{"name", "n42"}})},
                  np4)},
               {{"name", "n3"}})},
            {{"name", "n1"}}));
  return d;
}

// Flat sentence whose leaf tags read "XC XC <last_tag>".
inline std::shared_ptr<Document> fixture_xc(const std::string& last_tag) {
  auto d = std::make_shared<Document>();
  add_sentence(*d, n("S", {leaf("XC", "w1"), leaf("XC", "w2"),
                           leaf(last_tag, "w3")}));
  return d;
}

// Twenty hand-built sentences with planted instances of the syntactic
// patterns the comparison queries look for (and near misses).
inline std::shared_ptr<Document> desk_corpus() {
  auto d = std::make_shared<Document>();
  // 1: simple transitive clause containing "saw".
  add_sentence(*d, n("S", {n("NP", {leaf("NNP", "John")}),
                           n("VP", {leaf("VBD", "saw"),
                                    n("NP", {leaf("NNP", "Mary")})})}));
  // 2: no "saw"; subject NP ends in NN.
  add_sentence(*d, n("S", {n("NP", {leaf("DT", "the"), leaf("NN", "dog")}),
                           n("VP", {leaf("VBD", "barked")})}));
  // 3: "saw" twice, as verb and as noun.
  add_sentence(*d,
               n("S", {n("NP", {leaf("PRP", "she")}),
                       n("VP", {leaf("VBD", "saw"),
                                n("NP", {leaf("DT", "the"), leaf("NN", "saw")})})}));
  // 4: verb followed in order by two NP nodes (coordination).
  add_sentence(*d, n("S", {n("NP", {leaf("PRP", "he")}),
                           n("VP", {leaf("VBZ", "likes"),
                                    n("NP", {n("NP", {leaf("NN", "tea")}),
                                             leaf("CC", "and"),
                                             n("NP", {leaf("NN", "coffee")})})})}));
  // 5: "dark" under an L-toned phrase inside the subject NP.
  add_sentence(*d,
               n("S", {n("NP", {n("AP", {leaf("JJ", "dark")}, {{"tone", "LTone"}}),
                                leaf("NN", "forest")}),
                       n("VP", {leaf("VBD", "scared"),
                                n("NP", {leaf("PRP", "him")})})}));
  // 6: same shape but the wrong tone.
  add_sentence(*d,
               n("S", {n("NP", {n("AP", {leaf("JJ", "dark")}, {{"tone", "HTone"}}),
                                leaf("NN", "cave")}),
                       n("VP", {leaf("VBD", "loomed")})}));
  // 7: NP after the VP, so it is not dominated by it.
  add_sentence(*d, n("S", {n("VP", {leaf("VBG", "running")}),
                           n("NP", {leaf("NN", "water")})}));
  // 8: "saw" plus a PP inside the object NP.
  add_sentence(*d,
               n("S", {n("NP", {leaf("NNP", "Kim")}),
                       n("VP", {leaf("VBD", "saw"),
                                n("NP", {n("NP", {leaf("DT", "a"), leaf("NN", "bird")}),
                                         n("PP", {leaf("IN", "with"),
                                                  n("NP", {leaf("DT", "a"),
                                                           leaf("NN", "scope")})})})})}));
  // 9: subject NP ends in NNS, not NN.
  add_sentence(*d, n("S", {n("NP", {leaf("DT", "the"), leaf("NNS", "cats")}),
                           n("VP", {leaf("VBP", "sleep")})}));
  // 10: "saw" with a trailing adverb phrase.
  add_sentence(*d, n("S", {n("NP", {leaf("PRP", "they")}),
                           n("VP", {leaf("VBD", "saw")}),
                           n("ADVP", {leaf("RB", "yesterday")})}));
  // 11: "saw" as a plain noun subject.
  add_sentence(*d, n("S", {n("NP", {leaf("DT", "the"), leaf("NN", "saw")}),
                           n("VP", {leaf("VBZ", "cuts")})}));
  // 12: stacked VPs above a single NP.
  add_sentence(*d, n("S", {n("NP", {leaf("PRP", "she")}),
                           n("VP", {leaf("VBZ", "wants"),
                                    n("VP", {leaf("TO", "to"),
                                             n("VP", {leaf("VB", "win"),
                                                      n("NP", {leaf("NN", "gold")})})})})}));
  // 13: coordinated subject NPs before the VP.
  add_sentence(*d, n("S", {n("NP", {n("NP", {leaf("NNP", "Ann")}),
                                    leaf("CC", "and"),
                                    n("NP", {leaf("NNP", "Bob")})}),
                           n("VP", {leaf("VBP", "run")})}));
  // 14: NP/VP pair nested below a non-root phrase.
  add_sentence(*d, n("S", {n("X", {n("NP", {leaf("NN", "salt")}),
                                   n("VP", {leaf("VB", "stir")})}),
                           n("VP", {leaf("VB", "serve")})}));
  // 15: one-word clause, just "saw".
  add_sentence(*d, n("S", {n("VP", {leaf("VBD", "saw")})}));
  // 16: two NN-final NPs inside a subject, none under a VP.
  add_sentence(*d, n("S", {n("NP", {n("NP", {leaf("DT", "a"), leaf("NN", "cat")}),
                                    n("PP", {leaf("IN", "on"),
                                             n("NP", {leaf("DT", "a"),
                                                      leaf("NN", "mat")})})}),
                           n("VP", {leaf("VBZ", "sits")})}));
  // 17: the NP itself carries the L-tone.
  add_sentence(*d, n("S", {n("NP", {leaf("JJ", "dark"), leaf("NN", "night")},
                            {{"tone", "LTone"}}),
                           n("VP", {leaf("VBD", "fell")})}));
  // 18: "dark" outside any NP.
  add_sentence(*d, n("S", {n("VP", {leaf("VBD", "grew"),
                                    n("ADJP", {leaf("JJ", "dark")},
                                      {{"tone", "LTone"}})})}));
  // 19: verb with nothing after it.
  add_sentence(*d, n("S", {n("NP", {leaf("PRP", "it")}),
                           n("VP", {leaf("VBZ", "rains")})}));
  // 20: "saw" as noun, object NP, and a PP afterwards.
  add_sentence(*d,
               n("S", {n("NP", {leaf("DT", "the"), leaf("NN", "saw")}),
                       n("VP", {leaf("VBD", "cut"),
                                n("NP", {leaf("DT", "the"), leaf("NN", "wood")}),
                                n("PP", {leaf("IN", "into"),
                                         n("NP", {leaf("NNS", "planks")})})})}));
  return d;
}

// ---------------------------------------------------------------------------
// Random documents for the property suites

struct RandomDocOpts {
  int max_nodes = 30;
  bool names = true;           // give every node a name attribute
  bool drop_some_names = false;  // leave roughly a third of them unnamed
  bool threads = false;        // add rel=label:name links between nodes
};

inline std::shared_ptr<Document> random_doc(std::mt19937& rng,
                                            const RandomDocOpts& o = {}) {
  static const char* kTags[] = {"S", "NP", "VP", "NN", "VB", "JJ",
                                "XC", "PP", "DT", "AP"};
  static const char* kWords[] = {"ram", "reads", "a",   "book", "dark",
                                 "saw", "dog",   "tea", "w1",   "w2"};
  auto tag = [&] { return kTags[rng() % (sizeof(kTags) / sizeof(*kTags))]; };
  auto word = [&] { return kWords[rng() % (sizeof(kWords) / sizeof(*kWords))]; };

  auto d = std::make_shared<Document>();
  int sentences = 1 + static_cast<int>(rng() % 3);
  int budget = sentences +
               static_cast<int>(rng() % std::max(1, o.max_nodes - sentences + 1));
  std::vector<std::vector<NodeId>> per_sentence(sentences);
  for (int s = 0; s < sentences; ++s) {
    NodeId root = d->create_node(tag());
    d->add_sentence(root);
    per_sentence[s].push_back(root);
  }
  for (int i = sentences; i < budget; ++i) {
    int s = static_cast<int>(rng() % sentences);
    NodeId parent = per_sentence[s][rng() % per_sentence[s].size()];
    NodeId id = d->create_node(tag());
    d->attach(id, parent);
    per_sentence[s].push_back(id);
  }
  // Lexical data on leaves (occasionally left out).
  for (auto& ids : per_sentence)
    for (NodeId id : ids)
      if (d->node(id).children.empty() && rng() % 5 != 0) d->node(id).lex = word();
  // Names, then threads between named nodes.
  std::vector<NodeId> named;
  if (o.names) {
    int counter = 0;
    for (int s = 0; s < sentences; ++s)
      for (NodeId id : d->pre_order(s)) {
        ++counter;
        if (o.drop_some_names && rng() % 3 == 0) continue;
        d->node(id).set_attr("name", "n" + std::to_string(counter));
        named.push_back(id);
      }
  }
  if (o.threads && named.size() >= 2) {
    int links = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < links; ++i) {
      NodeId from = named[rng() % named.size()];
      NodeId to = named[rng() % named.size()];
      if (from == to) continue;
      d->node(from).set_attr("rel", "x:" + *d->node(to).name());
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Run helpers

inline SourceSet sources_of(std::shared_ptr<Document> d) {
  SourceSet s;
  s.add(std::move(d), std::nullopt);
  return s;
}

// Ids of the nodes bound to C for each match, in match order.
inline std::vector<NodeId> engine_matches(
    const std::string& query, SourceSet sources,
    std::optional<std::string> default_thread = {}) {
  QueryAst ast = parse_query(query);
  EngineOptions opts;
  opts.default_thread = std::move(default_thread);
  std::vector<NodeId> out;
  run_query(ast, sources, opts,
            [&](const MatchResult& m) { out.push_back(m.context.current.id); });
  return out;
}

inline RunOutput run_text(const std::string& query, SourceSet sources,
                          const RunOptions& opts = {}) {
  CommandRegistry registry;
  return run_program(parse_query(query), sources, registry, opts);
}

inline std::vector<std::string> record_lines(const RunOutput& out) {
  std::vector<std::string> lines;
  lines.reserve(out.records.size());
  for (const ResultRecord& r : out.records) lines.push_back(r.label + ": " + r.text);
  return lines;
}

}  // namespace ttq::test
