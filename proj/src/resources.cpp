#include "frameparse/resources.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "frameparse/error.hpp"
#include "frameparse/sexpr.hpp"

namespace frameparse {

namespace {

using sexpr::Node;

[[noreturn]] void bad(const Node& at, const std::string& what) {
  throw Error(ErrorCode::MalformedResource, what, at.line);
}

Concept concept_of(const Node& n) {
  if (!n.is_symbol() || !Concept::valid(n.text)) bad(n, "expected concept symbol");
  return Concept(n.text);
}

std::string symbol_of(const Node& n) {
  if (!n.is_symbol() || !valid_role(n.text)) bad(n, "expected role symbol");
  return n.text;
}

std::vector<Node> parse_resource(std::string_view text) {
  try {
    return sexpr::parse_all(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedResource, e.detail(), e.line());
  }
}

}  // namespace

ConceptGraph::ConceptGraph(const std::vector<Concept>& concepts,
                           const std::vector<std::pair<Concept, Concept>>& links) {
  std::set<std::string> unique;
  for (const auto& c : concepts) unique.insert(c.name());
  names_.assign(unique.begin(), unique.end());
  for (std::size_t i = 0; i < names_.size(); ++i) index_[names_[i]] = static_cast<int>(i);

  const auto n = names_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  std::set<std::pair<int, int>> edges;
  for (const auto& [child, parent] : links) {
    auto ci = index_.find(child.name());
    auto pi = index_.find(parent.name());
    if (ci == index_.end())
      throw Error(ErrorCode::UnknownConcept, "is-a link from undeclared concept " + child.name());
    if (pi == index_.end())
      throw Error(ErrorCode::UnknownConcept, "is-a link to undeclared concept " + parent.name());
    edges.insert({ci->second, pi->second});
  }
  for (auto [c, p] : edges) {
    parents_[c].push_back(p);
    children_[p].push_back(c);  // ids are name-ordered, so this stays sorted
  }

  // Kahn's algorithm, parents before children.
  std::vector<std::size_t> pending(n);
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = parents_[i].size();
    if (pending[i] == 0) ready.push_back(static_cast<int>(i));
  }
  ancestors_.assign(n, std::vector<bool>(n, false));
  std::size_t done = 0;
  while (!ready.empty()) {
    int c = ready.back();
    ready.pop_back();
    ++done;
    auto& row = ancestors_[c];
    row[c] = true;
    for (int p : parents_[c])
      for (std::size_t k = 0; k < n; ++k)
        if (ancestors_[p][k]) row[k] = true;
    for (int ch : children_[c])
      if (--pending[ch] == 0) ready.push_back(ch);
  }
  if (done != n) {
    for (std::size_t i = 0; i < n; ++i)
      if (pending[i] != 0)
        throw Error(ErrorCode::Cycle, "is-a cycle through " + names_[i]);
  }
}

std::size_t ConceptGraph::link_count() const {
  std::size_t total = 0;
  for (const auto& ps : parents_) total += ps.size();
  return total;
}

int ConceptGraph::id(const Concept& c) const {
  auto it = index_.find(c.name());
  if (it == index_.end()) throw Error(ErrorCode::UnknownConcept, c.name());
  return it->second;
}

bool ConceptGraph::isa(const Concept& c, const Concept& ancestor) const {
  return ancestors_[id(c)][id(ancestor)];
}

std::optional<Concept> ConceptGraph::generalize(const Concept& c, const Concept& level) const {
  const auto& row = ancestors_[id(c)];
  for (int child : children_[id(level)])
    if (row[child]) return Concept(names_[child]);
  return std::nullopt;
}

std::vector<Concept> ConceptGraph::parents(const Concept& c) const {
  std::vector<Concept> out;
  for (int p : parents_[id(c)]) out.emplace_back(names_[p]);
  return out;
}

std::vector<Concept> ConceptGraph::children(const Concept& c) const {
  std::vector<Concept> out;
  for (int ch : children_[id(c)]) out.emplace_back(names_[ch]);
  return out;
}

Lexicon parse_lexicon(std::string_view text) {
  Lexicon lexicon;
  for (const auto& form : parse_resource(text)) {
    if (!form.is_list() || form.items.size() < 3 || !form.items[0].is_keyword("word"))
      bad(form, "expected (word \"...\" (reading ...) ...)");
    const Node& w = form.items[1];
    if (!w.is_atom() || w.text.empty()) bad(w, "expected word text");
    LexEntry entry{w.text, {}};
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const Node& r = form.items[i];
      if (!r.is_list() || r.items.empty() || !r.items[0].is_keyword("reading"))
        bad(r, "expected (reading ...)");
      if (r.items.size() % 2 == 0) bad(r, "reading needs :key value pairs");
      LexReading reading;
      bool have_synt = false;
      for (std::size_t k = 1; k + 1 < r.items.size(); k += 2) {
        const Node& key = r.items[k];
        const Node& value = r.items[k + 1];
        if (key.is_keyword(":synt")) {
          reading.synt = concept_of(value);
          have_synt = true;
        } else if (key.is_keyword(":sem")) {
          reading.sem = concept_of(value);
        } else if (key.is_keyword(":lex")) {
          if (!value.is_atom()) bad(value, ":lex expects text");
          reading.lex_override = value.text;
        } else if (key.is_keyword(":forms")) {
          if (!value.is_list()) bad(value, ":forms expects a list");
          std::vector<std::string> toks;
          for (const auto& t : value.items) {
            if (!t.is_symbol()) bad(t, "form tokens are symbols");
            toks.push_back(t.text);
          }
          reading.forms = Forms::from_tokens(toks);
        } else {
          bad(key, "unknown reading key " + key.text);
        }
      }
      if (!have_synt) bad(r, "reading without :synt");
      entry.readings.push_back(std::move(reading));
    }
    if (!lexicon.emplace(entry.word, entry).second) bad(form, "duplicate word " + entry.word);
  }
  return lexicon;
}

ConceptGraph parse_kb(std::string_view text) {
  std::vector<Concept> concepts;
  std::vector<std::pair<Concept, Concept>> links;
  for (const auto& form : parse_resource(text)) {
    if (!form.is_list() || form.items.empty()) bad(form, "expected (concept ...) or (isa ...)");
    if (form.items[0].is_keyword("concept")) {
      if (form.items.size() < 2) bad(form, "empty concept declaration");
      for (std::size_t i = 1; i < form.items.size(); ++i) concepts.push_back(concept_of(form.items[i]));
    } else if (form.items[0].is_keyword("isa")) {
      if (form.items.size() != 3) bad(form, "isa takes two concepts");
      links.emplace_back(concept_of(form.items[1]), concept_of(form.items[2]));
    } else {
      bad(form, "unknown KB form " + form.items[0].text);
    }
  }
  return ConceptGraph(concepts, links);
}

SubcatTable parse_subcat(std::string_view text) {
  SubcatTable table;
  for (const auto& form : parse_resource(text)) {
    if (!form.is_list() || form.items.size() < 3 || !form.items[0].is_keyword("verb"))
      bad(form, "expected (verb SEM (pattern ...) ...)");
    SubcatEntry entry{concept_of(form.items[1]), {}};
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const Node& p = form.items[i];
      if (!p.is_list() || p.items.size() < 2 || !p.items[0].is_keyword("pattern"))
        bad(p, "expected (pattern (SYNT SEM CLASS) ...)");
      RolePattern pattern;
      for (std::size_t k = 1; k < p.items.size(); ++k) {
        const Node& slot = p.items[k];
        if (!slot.is_list() || slot.items.size() != 3) bad(slot, "slot needs (SYNT-ROLE SEM-ROLE CLASS)");
        RoleSlot rs{symbol_of(slot.items[0]), symbol_of(slot.items[1]), std::nullopt};
        if (!(slot.items[2].is_symbol() && slot.items[2].text == "*"))
          rs.sem_class = concept_of(slot.items[2]);
        pattern.push_back(std::move(rs));
      }
      entry.patterns.push_back(std::move(pattern));
    }
    if (!table.emplace(entry.verb_sem.name(), entry).second)
      bad(form, "duplicate subcat entry " + entry.verb_sem.name());
  }
  return table;
}

void validate_bundle(const ResourceBundle& bundle) {
  auto need = [&](const Concept& c, const std::string& where) {
    if (!bundle.kb.contains(c))
      throw Error(ErrorCode::UnknownConcept, c.name() + " (" + where + ") is not declared in the KB");
  };
  need(unknown_word_synt(), "unknown-word fallback");
  need(unknown_word_sem(), "unknown-word fallback");
  for (const auto& [word, entry] : bundle.lexicon) {
    for (const auto& r : entry.readings) {
      need(r.synt, "lexicon entry " + word);
      if (r.sem) need(*r.sem, "lexicon entry " + word);
    }
  }
  for (const auto& [verb, entry] : bundle.subcat) {
    need(entry.verb_sem, "subcat entry");
    for (const auto& pattern : entry.patterns)
      for (const auto& slot : pattern)
        if (slot.sem_class) need(*slot.sem_class, "subcat entry " + verb);
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ResourceBundle load_bundle(const std::filesystem::path& lexicon,
                           const std::filesystem::path& kb,
                           const std::filesystem::path& subcat) {
  ResourceBundle bundle{parse_lexicon(read_file(lexicon)), parse_kb(read_file(kb)),
                        parse_subcat(read_file(subcat))};
  validate_bundle(bundle);
  return bundle;
}

std::vector<std::string> segment(std::string_view text) {
  static const std::string kPunct = ".,;:!?()\"'";
  auto is_punct = [](char c) { return kPunct.find(c) != std::string::npos; };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view chunk = text.substr(i, j - i);
    i = j;
    if (chunk.empty()) continue;
    std::size_t lead = 0;
    while (lead < chunk.size() && is_punct(chunk[lead])) ++lead;
    for (std::size_t k = 0; k < lead; ++k) out.emplace_back(1, chunk[k]);
    chunk.remove_prefix(lead);
    std::size_t trail = 0;
    while (trail < chunk.size() && is_punct(chunk[chunk.size() - 1 - trail])) ++trail;
    if (chunk.size() > trail) out.emplace_back(chunk.substr(0, chunk.size() - trail));
    for (std::size_t k = chunk.size() - trail; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
  }
  return out;
}

WordUnit analyze(const std::string& token, int index, const Lexicon& lexicon) {
  WordUnit unit{token, Span{index, index + 1}, {}};
  auto it = lexicon.find(token);
  if (it == lexicon.end()) {
    std::string lower = token;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    it = lexicon.find(lower);
  }
  if (it == lexicon.end()) {
    Frame f;
    f.surface = token;
    f.lex = token;
    f.synt = unknown_word_synt();
    f.sem = unknown_word_sem();
    f.span = unit.span;
    f.extras["UNKNOWN"] = "TRUE";
    unit.alternatives.push_back(std::move(f));
    return unit;
  }
  for (const auto& r : it->second.readings) {
    Frame f;
    f.surface = token;
    f.lex = r.lex_override ? *r.lex_override : it->second.word;
    f.synt = r.synt;
    f.sem = r.sem;
    f.forms = r.forms;
    f.span = unit.span;
    unit.alternatives.push_back(std::move(f));
  }
  return unit;
}

std::optional<std::string> subcat_match(const ResourceBundle& bundle, const Frame& verb,
                                        const Frame& arg) {
  if (!verb.sem) return std::nullopt;
  auto it = bundle.subcat.find(verb.sem->name());
  if (it == bundle.subcat.end()) return std::nullopt;
  const bool arg_known = arg.sem && bundle.kb.contains(*arg.sem);
  for (const auto& pattern : it->second.patterns) {
    for (const auto& slot : pattern) {
      if (verb.has_role(slot.synt_role)) continue;
      if (!slot.sem_class) return slot.sem_role;
      if (arg_known && bundle.kb.contains(*slot.sem_class) && bundle.kb.isa(*arg.sem, *slot.sem_class))
        return slot.sem_role;
    }
  }
  return std::nullopt;
}

}  // namespace frameparse
