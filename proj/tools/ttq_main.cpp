#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ttq/engine.hpp"
#include "ttq/errors.hpp"
#include "ttq/io.hpp"
#include "ttq/parser.hpp"
#include "ttq/transform.hpp"

namespace {

struct Session {
  ttq::SourceSet docs;
  ttq::CommandRegistry registry;
  ttq::RunOptions options;
  ttq::IoSpec default_dest;

  // set by run_one for queries without their own destinations
  std::vector<ttq::ResultRecord> pending_records;
  bool pending_mutation = false;
};

int exit_code_for(const ttq::TtqError& e) {
  if (dynamic_cast<const ttq::ParseError*>(&e)) return 1;
  if (dynamic_cast<const ttq::IoError*>(&e)) return 2;
  return 3;
}

void load_sources(ttq::SourceSet& into, const std::vector<ttq::IoSpec>& specs) {
  for (const ttq::IoSpec& spec : specs)
    into.add(std::make_shared<ttq::Document>(ttq::read_document(spec)), spec.alias);
}

/// Runs one query against the session (or the query's own sources).
/// Results for queries without a `:=` section are buffered on the
/// session so the caller controls when the default destination is written.
void run_one(const std::string& text, Session& session) {
  ttq::QueryAst ast = ttq::parse_query(text);

  ttq::SourceSet local;
  ttq::SourceSet* sources = &session.docs;
  if (!ast.sources.empty()) {
    load_sources(local, ast.sources);
    sources = &local;
  } else if (session.docs.size() == 0) {
    throw ttq::IoError("no source document; pass --source or an '=:' section");
  }

  ttq::RunOutput out = ttq::run_program(ast, *sources, session.registry,
                                        session.options);

  if (!ast.destinations.empty()) {
    for (const ttq::IoSpec& dest : ast.destinations) {
      if (dest.format == ttq::IoSpec::Format::Xml && out.mutated)
        ttq::write_document(*sources->primary(), dest);
      else
        ttq::write_results(out.records, dest);
    }
    return;
  }
  session.pending_records.insert(session.pending_records.end(),
                                 out.records.begin(), out.records.end());
  if (sources == &session.docs && out.mutated) session.pending_mutation = true;
}

/// Writes buffered records (or the mutated corpus, for an xml default
/// destination) once, at the end of a batch.
void flush_pending(Session& session) {
  if (session.default_dest.format == ttq::IoSpec::Format::Xml &&
      session.pending_mutation) {
    ttq::write_document(*session.docs.primary(), session.default_dest);
  } else if (!session.pending_records.empty() ||
             session.default_dest.location != "-") {
    ttq::write_results(session.pending_records, session.default_dest);
  }
  session.pending_records.clear();
  session.pending_mutation = false;
}

int run_batch(const std::string& query, Session& session) {
  try {
    run_one(query, session);
    flush_pending(session);
  } catch (const ttq::TtqError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

/// Query files: one query per line; blank lines and lines starting with
/// '#' are skipped; a trailing backslash continues on the next line.
std::vector<std::string> read_query_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ttq::IoError("cannot open query file '" + path + "'");
  std::vector<std::string> queries;
  std::string line, pending;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string piece = line;
    if (pending.empty()) {
      std::size_t first = piece.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (piece[first] == '#') continue;
    }
    bool continues = !piece.empty() && piece.back() == '\\';
    if (continues) piece.pop_back();
    pending += piece;
    if (continues) {
      pending += ' ';
      continue;
    }
    if (!pending.empty()) queries.push_back(pending);
    pending.clear();
  }
  if (!pending.empty()) queries.push_back(pending);
  return queries;
}

int run_query_file(const std::string& path, Session& session) {
  try {
    std::vector<std::string> queries = read_query_file(path);
    for (const std::string& q : queries) run_one(q, session);
    flush_pending(session);
  } catch (const ttq::TtqError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

int run_repl(Session& session) {
  std::string line, pending;
  std::cerr << "ttq> " << std::flush;
  while (std::getline(std::cin, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool continues = !line.empty() && line.back() == '\\';
    if (continues) line.pop_back();
    pending += line;
    if (continues) {
      pending += ' ';
      std::cerr << "...> " << std::flush;
      continue;
    }
    std::string query;
    query.swap(pending);
    std::size_t first = query.find_first_not_of(" \t");
    if (first == std::string::npos) {
      std::cerr << "ttq> " << std::flush;
      continue;
    }
    try {
      if (query[first] == ':') {
        std::size_t sp = query.find_first_of(" \t", first);
        std::string word = query.substr(first, sp - first);
        std::string rest =
            sp == std::string::npos ? "" : query.substr(query.find_first_not_of(" \t", sp));
        while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t'))
          rest.pop_back();
        if (word == ":quit" || word == ":q") return 0;
        if (word == ":save") {
          if (rest.empty()) throw ttq::IoError(":save needs a destination spec");
          ttq::write_document(*session.docs.primary(), ttq::parse_io_spec(rest));
        } else if (word == ":load") {
          if (rest.empty()) throw ttq::IoError(":load needs a source spec");
          ttq::IoSpec spec = ttq::parse_io_spec(rest);
          auto doc = std::make_shared<ttq::Document>(ttq::read_document(spec));
          if (!spec.alias) session.docs.clear();
          session.docs.add(std::move(doc), spec.alias);
        } else {
          throw ttq::TtqError("unknown meta command '" + word +
                              "' (try :save, :load, :quit)");
        }
      } else {
        run_one(query, session);
        flush_pending(session);
      }
    } catch (const ttq::TtqError& e) {
      std::cerr << "error: " << e.what() << "\n";
      session.pending_records.clear();
      session.pending_mutation = false;
    }
    std::cerr << "ttq> " << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query and transform threaded-tree annotated corpora"};

  std::string query_text, query_file, dest_raw;
  std::vector<std::string> source_raw;
  std::string default_thread;
  bool guard = false, repl = false;

  app.add_option("-q,--query", query_text, "query text to run once");
  app.add_option("--query-file", query_file,
                 "file with one query per line (# comments, \\ continuations)");
  app.add_flag("--repl", repl, "interactive session");
  app.add_option("--source", source_raw,
                 "source spec format:location[:charset][/alias]; repeatable")
      ->take_all();
  app.add_option("--dest", dest_raw,
                 "destination spec for queries without a ':=' section");
  app.add_option("--default-thread", default_thread,
                 "thread type used by R/T when the query gives no key")
      ->envname("TTQ_DEFAULT_THREAD");
  app.add_flag("--guard-base-text", guard,
               "reject mutations that change any sentence's base text");

  CLI11_PARSE(app, argc, argv);

  int modes = (!query_text.empty() ? 1 : 0) + (!query_file.empty() ? 1 : 0) +
              (repl ? 1 : 0);
  if (modes != 1) {
    std::cerr << "error: exactly one of --query, --query-file, --repl is required\n";
    return 2;
  }

  Session session;
  session.options.guard_base_text = guard;
  if (!default_thread.empty()) session.options.default_thread = default_thread;
  session.default_dest.format = ttq::IoSpec::Format::Raw;
  session.default_dest.location = "-";

  try {
    if (!dest_raw.empty()) session.default_dest = ttq::parse_io_spec(dest_raw);
    std::vector<ttq::IoSpec> sources;
    for (const std::string& s : source_raw) sources.push_back(ttq::parse_io_spec(s));
    load_sources(session.docs, sources);
    if (repl && session.docs.size() == 0)
      throw ttq::IoError("the repl needs at least one --source");
  } catch (const ttq::TtqError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  if (repl) return run_repl(session);
  if (!query_file.empty()) return run_query_file(query_file, session);
  return run_batch(query_text, session);
}
