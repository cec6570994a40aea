#include "sfi/frontend.hpp"

#include "json.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace sfi {

std::string ParseError::str() const {
  std::ostringstream os;
  os << span.line << ":" << span.column << ": expected " << expected << ", found " << found;
  return os.str();
}

namespace {

enum class Tok { Word, Clinit, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::variant<std::vector<Token>, ParseError> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const SourceSpan span{line, col};
    if (word_char(c)) {
      std::size_t j = i;
      while (j < text.size() && word_char(text[j])) ++j;
      out.push_back({Tok::Word, std::string(text.substr(i, j - i)), span});
      advance(j - i);
    } else if (text.substr(i).starts_with(kClinitName)) {
      out.push_back({Tok::Clinit, std::string(kClinitName), span});
      advance(kClinitName.size());
    } else if (text.substr(i).starts_with("->")) {
      out.push_back({Tok::Punct, "->", span});
      advance(2);
    } else if (std::string_view("{}:,.=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), span});
      advance(1);
    } else {
      return ParseError{span, "a token", "'" + std::string(1, c) + "'"};
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

struct SyntaxError {
  ParseError error;
};

// References are resolved after the whole text has been read, so each
// carries the span where it appeared.
struct Reference {
  enum class What { Class, Method, Field, Label } what;
  std::string text;
  SourceSpan span;
  PointLabel label;  // for labels
  MethodId method;   // for methods
  FieldId field;     // for fields
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseOptions& options) : toks_(std::move(tokens)), opts_(options) {}

  ParseResult run() {
    try {
      parse_program();
    } catch (const SyntaxError& e) {
      return std::vector<ParseError>{e.error};
    }
    resolve();
    if (!errors_.empty()) return std::move(errors_);
    return std::move(p_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError{{peek().span, expected, describe(peek())}};
  }

  bool is_punct(std::string_view p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool is_word(std::string_view w) const { return peek().kind == Tok::Word && peek().text == w; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("'" + std::string(p) + "'");
    ++pos_;
  }

  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("'" + std::string(w) + "'");
    ++pos_;
  }

  Token ident(const std::string& what) {
    if (peek().kind != Tok::Word) fail(what);
    return toks_[pos_++];
  }

  std::pair<MethodId, SourceSpan> method_ref() {
    const Token cls = ident("class name");
    expect_punct(".");
    if (peek().kind == Tok::Clinit) {
      ++pos_;
      return {MethodId::clinit(cls.text), cls.span};
    }
    const Token m = ident("method name");
    return {MethodId{cls.text, m.text}, cls.span};
  }

  std::pair<FieldId, SourceSpan> field_ref() {
    const Token cls = ident("class name");
    expect_punct(".");
    const Token f = ident("field name");
    return {FieldId{cls.text, f.text}, cls.span};
  }

  void parse_program() {
    expect_word("entry");
    auto [entry, span] = method_ref();
    p_.entry = entry;
    refs_.push_back({Reference::What::Method, entry.str(), span, {}, entry, {}});
    while (peek().kind != Tok::End) parse_class();
  }

  void parse_class() {
    expect_word("class");
    const Token name = ident("class name");
    ClassDecl cls;
    cls.name = name.text;
    if (is_word("extends")) {
      ++pos_;
      const Token super = ident("superclass name");
      cls.superclass = super.text;
      if (super.text != kRootClass) refs_.push_back({Reference::What::Class, super.text, super.span, {}, {}, {}});
    }
    if (p_.classes.contains(cls.name)) error(name.span, "a fresh class name", "duplicate class " + cls.name);
    p_.classes[cls.name] = cls;
    expect_punct("{");
    while (!is_punct("}")) parse_member(cls.name);
    expect_punct("}");
  }

  void parse_member(const std::string& cls) {
    auto& decl = p_.classes[cls];
    if (is_word("field")) {
      ++pos_;
      const Token f = ident("field name");
      bool init = false;
      if (is_word("init")) {
        ++pos_;
        init = true;
      }
      if (decl.has_field(f.text))
        error(f.span, "a fresh field name", "duplicate field " + cls + "." + f.text);
      else
        decl.fields.push_back({f.text, init});
      return;
    }
    if (is_word("clinit")) {
      const SourceSpan span = peek().span;
      ++pos_;
      if (decl.clinit) error(span, "at most one clinit", "second clinit in class " + cls);
      decl.clinit = MethodBody{};
      parse_body(MethodId::clinit(cls));
      return;
    }
    if (is_word("method")) {
      ++pos_;
      const Token m = ident("method name");
      if (decl.methods.contains(m.text)) error(m.span, "a fresh method name", "duplicate method " + cls + "." + m.text);
      decl.methods[m.text] = MethodBody{};
      parse_body({cls, m.text});
      return;
    }
    fail("'field', 'clinit', 'method' or '}'");
  }

  void parse_body(const MethodId& m) {
    expect_punct("{");
    std::set<std::string> labels;
    while (!is_punct("}")) {
      const Token label = ident("point label");
      expect_punct(":");
      const PointLabel here{m, label.text};
      if (label.text == kEndLabel) {
        error(label.span, "a point label", "reserved label 'end'");
      } else if (!labels.insert(label.text).second) {
        error(label.span, "a fresh point label", "duplicate label " + here.str());
      } else {
        p_.body(m)->points.push_back(label.text);
      }
      parse_point(here);
    }
    expect_punct("}");
  }

  void parse_point(const PointLabel& here) {
    const Token op = ident("instruction");
    Instruction ins;
    if (op.text == "any") {
      ins = Instruction::any();
    } else if (op.text == "return") {
      ins = Instruction::ret();
    } else if (op.text == "invoke") {
      ins = Instruction::invoke();
    } else if (op.text == "put" || op.text == "get") {
      auto [f, span] = field_ref();
      refs_.push_back({Reference::What::Field, f.str(), span, {}, {}, f});
      ins = op.text == "put" ? Instruction::put(f) : Instruction::get(f);
    } else {
      --pos_;
      fail("'any', 'return', 'invoke', 'put' or 'get'");
    }
    p_.instr[here] = ins;
    if (ins.kind == InstrKind::Return) p_.flow_intra.insert({here, Program::last(here.method)});

    bool has_clinit = false;
    for (;;) {
      // The next point starts with "LABEL :".
      if (peek().kind == Tok::Word && peek(1).kind == Tok::Punct && peek(1).text == ":") return;
      if (is_word("clinit") && peek(1).kind == Tok::Punct && peek(1).text == "=") {
        const SourceSpan span = peek().span;
        pos_ += 2;
        const Token cls = ident("class name");
        if (has_clinit) error(span, "at most one clinit attribute", "second clinit attribute at " + here.str());
        has_clinit = true;
        p_.flow_clinit.insert({here, cls.text});
        refs_.push_back({Reference::What::Class, cls.text, cls.span, {}, {}, {}});
      } else if (is_punct("->")) {
        ++pos_;
        do {
          const Token target = ident("successor label");
          const PointLabel to{here.method, target.text};
          p_.flow_intra.insert({here, to});
          refs_.push_back({Reference::What::Label, to.str(), target.span, to, {}, {}});
        } while (is_punct(",") && (++pos_, true));
      } else if (is_word("calls")) {
        ++pos_;
        do {
          auto [m, span] = method_ref();
          p_.flow_inter.insert({here, m});
          refs_.push_back({Reference::What::Method, m.str(), span, {}, m, {}});
        } while (is_punct(",") && (++pos_, true));
      } else {
        return;
      }
    }
  }

  void error(SourceSpan span, std::string expected, std::string found) {
    errors_.push_back({span, std::move(expected), std::move(found)});
  }

  void resolve() {
    for (const auto& r : refs_) {
      switch (r.what) {
        case Reference::What::Class:
          if (!p_.find_class(r.text)) error(r.span, "a declared class", "'" + r.text + "'");
          break;
        case Reference::What::Method:
          if (!p_.has_method(r.method)) error(r.span, "a declared method", "'" + r.text + "'");
          break;
        case Reference::What::Field:
          if (!p_.has_field(r.field)) error(r.span, "a declared field", "'" + r.text + "'");
          break;
        case Reference::What::Label: {
          const auto* body = p_.body(r.label.method);
          const bool ok = r.label.is_last() || (body && std::find(body->points.begin(), body->points.end(),
                                                                   r.label.local) != body->points.end());
          if (!ok && !opts_.keep_dangling_labels) error(r.span, "a label of " + r.label.method.str(), "'" + r.label.local + "'");
          break;
        }
      }
    }
  }

  std::vector<Token> toks_;
  ParseOptions opts_;
  std::size_t pos_ = 0;
  Program p_;
  std::vector<Reference> refs_;
  std::vector<ParseError> errors_;
};

}  // namespace

ParseResult parse(std::string_view text, const ParseOptions& options) {
  auto toks = tokenize(text);
  if (auto* err = std::get_if<ParseError>(&toks)) return std::vector<ParseError>{*err};
  return Parser(std::move(std::get<std::vector<Token>>(toks)), options).run();
}

namespace {

void render_body(std::ostringstream& os, const Program& p, const MethodId& m, const MethodBody& body) {
  for (const auto& local : body.points) {
    const PointLabel l{m, local};
    os << "    " << local << ":";
    if (auto it = p.instr.find(l); it != p.instr.end()) os << " " << it->second.str();
    if (auto c = p.clinit_target(l)) os << " clinit=" << *c;
    const auto succ = p.intra_successors(l);
    if (!succ.empty()) {
      os << " ->";
      for (std::size_t i = 0; i < succ.size(); ++i) os << (i ? ", " : " ") << succ[i].local;
    }
    const auto targets = p.inter_targets(l);
    if (!targets.empty()) {
      os << " calls";
      for (std::size_t i = 0; i < targets.size(); ++i) os << (i ? ", " : " ") << targets[i].str();
    }
    os << "\n";
  }
}

}  // namespace

std::string render(const Program& program) {
  std::ostringstream os;
  os << "entry " << program.entry.str() << "\n";
  for (const auto& [name, cls] : program.classes) {
    os << "\nclass " << name;
    if (cls.superclass) os << " extends " << *cls.superclass;
    os << " {\n";
    for (const auto& f : cls.fields) os << "  field " << f.name << (f.has_initializer ? " init" : "") << "\n";
    if (cls.clinit) {
      os << "  clinit {\n";
      render_body(os, program, MethodId::clinit(name), *cls.clinit);
      os << "  }\n";
    }
    for (const auto& [mname, body] : cls.methods) {
      os << "  method " << mname << " {\n";
      render_body(os, program, {name, mname}, body);
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

std::string solution_to_json(const Cfg& cfg, const Solution& sol, const std::vector<Diagnostic>& warnings) {
  using nlohmann::ordered_json;
  auto triple = [&](const AbstractState& a) {
    ordered_json j;
    j["may"] = cfg.class_names(a.may);
    j["must"] = cfg.class_names(a.must);
    j["wf"] = cfg.field_names(a.wf);
    return j;
  };
  ordered_json root;
  root["points"] = ordered_json::array();
  for (PointId id = 0; id < cfg.num_points(); ++id) {
    const auto& p = cfg.point(id);
    ordered_json entry;
    entry["point"] = p.label.str();
    if (p.kind) {
      Instruction ins{*p.kind, std::nullopt};
      if (*p.kind == InstrKind::Put || *p.kind == InstrKind::Get) ins.field = cfg.field(p.field);
      entry["instr"] = ins.str();
    } else {
      entry["instr"] = nullptr;
    }
    entry["in"] = triple(sol.in.at(id));
    entry["out"] = triple(sol.out.at(id));
    root["points"].push_back(std::move(entry));
  }
  root["warnings"] = ordered_json::array();
  for (const auto& d : warnings) {
    ordered_json w;
    w["kind"] = std::string(to_string(d.kind));
    w["point"] = cfg.point(d.point).label.str();
    w["field"] = cfg.field(d.field).str();
    w["detail"] = d.detail;
    root["warnings"].push_back(std::move(w));
  }
  return root.dump(2) + "\n";
}

}  // namespace sfi
