#include "alcqm/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace alcqm {

namespace {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  Dot,
  Comma,
  Eq,     // =
  Neq,    // !=
  MEq,    // =m
  KwTbox,
  KwAbox,
  KwMbox,
  KwTop,
  KwBottom,
  KwNot,
  KwAnd,
  KwOr,
  KwAll,
  KwSome,
  KwAtLeast,
  KwAtMost,
  KwSubclassOf,
  KwFunctional,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

Tok keyword_kind(const std::string& s) {
  if (s == "TBOX") return Tok::KwTbox;
  if (s == "ABOX") return Tok::KwAbox;
  if (s == "MBOX") return Tok::KwMbox;
  if (s == "TOP") return Tok::KwTop;
  if (s == "BOTTOM") return Tok::KwBottom;
  if (s == "NOT") return Tok::KwNot;
  if (s == "AND") return Tok::KwAnd;
  if (s == "OR") return Tok::KwOr;
  if (s == "ALL") return Tok::KwAll;
  if (s == "SOME") return Tok::KwSome;
  if (s == "ATLEAST") return Tok::KwAtLeast;
  if (s == "ATMOST") return Tok::KwAtMost;
  if (s == "SUBCLASSOF") return Tok::KwSubclassOf;
  if (s == "FUNCTIONAL") return Tok::KwFunctional;
  return Tok::Ident;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class LineLexer {
 public:
  LineLexer(const std::string& line, int line_no, std::vector<Diagnostic>& errors)
      : line_(line), line_no_(line_no), errors_(errors) {
    lex();
    tokens_.push_back({Tok::End, "", {line_no_, static_cast<int>(line_.size()) + 1, 0}});
  }

  const std::vector<Token>& tokens() const { return tokens_; }
  bool had_error() const { return had_error_; }

 private:
  void lex() {
    std::size_t i = 0;
    while (i < line_.size()) {
      char c = line_[i];
      if (c == '#') return;  // comment to end of line
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      SourceSpan span{line_no_, static_cast<int>(i) + 1, 1};
      if (ident_start(c)) {
        std::size_t j = i;
        while (j < line_.size() && ident_char(line_[j])) ++j;
        std::string word = line_.substr(i, j - i);
        span.length = static_cast<int>(j - i);
        tokens_.push_back({keyword_kind(word), word, span});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < line_.size() && std::isdigit(static_cast<unsigned char>(line_[j]))) ++j;
        span.length = static_cast<int>(j - i);
        tokens_.push_back({Tok::Number, line_.substr(i, j - i), span});
        i = j;
        continue;
      }
      switch (c) {
        case '(':
          tokens_.push_back({Tok::LParen, "(", span});
          ++i;
          continue;
        case ')':
          tokens_.push_back({Tok::RParen, ")", span});
          ++i;
          continue;
        case '.':
          tokens_.push_back({Tok::Dot, ".", span});
          ++i;
          continue;
        case ',':
          tokens_.push_back({Tok::Comma, ",", span});
          ++i;
          continue;
        case '!':
          if (i + 1 < line_.size() && line_[i + 1] == '=') {
            span.length = 2;
            tokens_.push_back({Tok::Neq, "!=", span});
            i += 2;
            continue;
          }
          break;
        case '=':
          // "=m" only when the m ends the word, otherwise '=' then an
          // identifier starting with m.
          if (i + 1 < line_.size() && line_[i + 1] == 'm' &&
              (i + 2 >= line_.size() || !ident_char(line_[i + 2]))) {
            span.length = 2;
            tokens_.push_back({Tok::MEq, "=m", span});
            i += 2;
            continue;
          }
          tokens_.push_back({Tok::Eq, "=", span});
          ++i;
          continue;
        default:
          break;
      }
      errors_.push_back({"unknown token '" + std::string(1, c) + "'", "", span});
      had_error_ = true;
      return;
    }
  }

  const std::string& line_;
  int line_no_;
  std::vector<Diagnostic>& errors_;
  std::vector<Token> tokens_;
  bool had_error_ = false;
};

enum Sort { kSortConcept, kSortRole, kSortIndividual };

const char* sort_name(Sort s) {
  switch (s) {
    case kSortConcept:
      return "concept";
    case kSortRole:
      return "role";
    default:
      return "individual";
  }
}

class Parser {
 public:
  Parser(const Ontology* signature_source, const ParseOptions& opts, std::vector<Diagnostic>& errors)
      : opts_(opts), errors_(errors) {
    if (signature_source) {
      Signature sig = signature_source->signature();
      for (const auto& n : sig.concepts) sorts_[n] = kSortConcept;
      for (const auto& n : sig.roles) sorts_[n] = kSortRole;
      for (const auto& n : sig.individuals) sorts_[n] = kSortIndividual;
      closed_signature_ = true;
    }
  }

  ConceptPoolPtr pool = std::make_shared<ConceptPool>();

  void set_tokens(const std::vector<Token>* toks) {
    toks_ = toks;
    pos_ = 0;
  }

  const Token& peek(int ahead = 0) const {
    std::size_t i = pos_ + ahead;
    if (i >= toks_->size()) i = toks_->size() - 1;
    return (*toks_)[i];
  }
  const Token& advance() { return (*toks_)[pos_ < toks_->size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }

  void error(const std::string& msg, const SourceSpan& span) {
    errors_.push_back({msg, "", span});
    failed_ = true;
  }
  bool failed() const { return failed_; }
  void reset_failure() { failed_ = false; }

  std::string expect_name(Sort sort) {
    const Token& t = peek();
    if (t.kind != Tok::Ident) {
      error(std::string("expected ") + sort_name(sort) + " name", t.span);
      return "";
    }
    advance();
    return bind_name(t, sort);
  }

  std::string bind_name(const Token& t, Sort sort) {
    if (t.text.rfind("__", 0) == 0) {
      error("names starting with '__' are reserved", t.span);
      return t.text;
    }
    auto it = sorts_.find(t.text);
    if (it == sorts_.end()) {
      if (closed_signature_) {
        error("unknown name '" + t.text + "'", t.span);
        return t.text;
      }
      sorts_.emplace(t.text, sort);
      return t.text;
    }
    if (it->second != static_cast<int>(sort)) {
      error("name '" + t.text + "' already used as " + sort_name(static_cast<Sort>(it->second)) +
                ", cannot also be a " + sort_name(sort),
            t.span);
    }
    return t.text;
  }

  // or_expr := and_expr (OR and_expr)*
  ConceptId parse_or() {
    ConceptId left = parse_and();
    while (!failed_ && peek().kind == Tok::KwOr) {
      advance();
      ConceptId right = parse_and();
      left = pool->disj(left, right);
    }
    return left;
  }

  ConceptId parse_and() {
    ConceptId left = parse_unary();
    while (!failed_ && peek().kind == Tok::KwAnd) {
      advance();
      ConceptId right = parse_unary();
      left = pool->conj(left, right);
    }
    return left;
  }

  ConceptId parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwNot:
        advance();
        return pool->negation(parse_unary());
      case Tok::KwAll:
      case Tok::KwSome: {
        advance();
        RoleId r = pool->role(expect_name(kSortRole));
        expect(Tok::Dot, "'.'");
        ConceptId c = parse_or();  // dot-argument binds maximally
        return t.kind == Tok::KwAll ? pool->forall(r, c) : pool->exists(r, c);
      }
      case Tok::KwAtLeast:
      case Tok::KwAtMost: {
        advance();
        std::uint32_t n = expect_number();
        RoleId r = pool->role(expect_name(kSortRole));
        expect(Tok::Dot, "'.'");
        ConceptId c = parse_or();
        return t.kind == Tok::KwAtLeast ? pool->at_least(n, r, c) : pool->at_most(n, r, c);
      }
      default:
        return parse_primary();
    }
  }

  ConceptId parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwTop:
        advance();
        return pool->top();
      case Tok::KwBottom:
        advance();
        return pool->bottom();
      case Tok::LParen: {
        advance();
        ConceptId c = parse_or();
        expect(Tok::RParen, "')'");
        return c;
      }
      case Tok::Ident:
        advance();
        return pool->atomic(bind_name(t, kSortConcept));
      default:
        error("expected concept expression", t.span);
        return pool->top();
    }
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      error(std::string("expected ") + what, peek().span);
      return;
    }
    advance();
  }

  std::uint32_t expect_number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) {
      error("malformed number restriction: expected a non-negative integer", t.span);
      return 0;
    }
    advance();
    unsigned long v = 0;
    try {
      v = std::stoul(t.text);
    } catch (...) {
      v = opts_.max_number + 1;
    }
    if (v > opts_.max_number) {
      error("number restriction exceeds configured maximum of " + std::to_string(opts_.max_number),
            t.span);
      return 0;
    }
    return static_cast<std::uint32_t>(v);
  }

  void expect_line_end() {
    if (!failed_ && peek().kind != Tok::End) error("unexpected trailing input", peek().span);
  }

 private:
  const std::vector<Token>* toks_ = nullptr;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  std::vector<Diagnostic>& errors_;
  std::map<std::string, int> sorts_;
  bool closed_signature_ = false;
  bool failed_ = false;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

std::string wrap_compound(const ConceptPool& p, ConceptId c) {
  const auto& n = p.node(c);
  bool atom_like = n.kind == ConceptKind::Atomic || n.kind == ConceptKind::Top ||
                   n.kind == ConceptKind::Bottom;
  return atom_like ? p.text(c) : "(" + p.text(c) + ")";
}

}  // namespace

ParseResult parse(const std::string& text, const ParseOptions& opts) {
  ParseResult result;
  Parser parser(nullptr, opts, result.errors);
  Ontology onto;
  onto.pool = parser.pool;

  enum Section { kNone, kTbox, kAbox, kMbox };
  Section section = kNone;

  std::vector<std::string> lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int line_no = static_cast<int>(li) + 1;
    LineLexer lexer(lines[li], line_no, result.errors);
    if (lexer.had_error()) continue;
    const auto& toks = lexer.tokens();
    if (toks.front().kind == Tok::End) continue;  // blank or comment-only line

    parser.set_tokens(&toks);
    parser.reset_failure();

    Tok first = parser.peek().kind;
    if (first == Tok::KwTbox || first == Tok::KwAbox || first == Tok::KwMbox) {
      Section want = first == Tok::KwTbox ? kTbox : first == Tok::KwAbox ? kAbox : kMbox;
      if (static_cast<int>(want) != static_cast<int>(section) + 1) {
        parser.error("sections must appear once each, in the order TBOX, ABOX, MBOX",
                     parser.peek().span);
        continue;
      }
      section = want;
      parser.advance();
      parser.expect_line_end();
      continue;
    }

    switch (section) {
      case kNone:
        parser.error("expected TBOX section header", parser.peek().span);
        break;
      case kTbox: {
        if (parser.peek().kind == Tok::KwFunctional) {
          parser.advance();
          RoleId r = parser.pool->role(parser.expect_name(kSortRole));
          parser.expect_line_end();
          if (!parser.failed())
            onto.tbox.push_back(
                {parser.pool->top(), parser.pool->at_most(1, r, parser.pool->top())});
          break;
        }
        ConceptId lhs = parser.parse_or();
        parser.expect(Tok::KwSubclassOf, "SUBCLASSOF");
        ConceptId rhs = parser.parse_or();
        parser.expect_line_end();
        if (!parser.failed()) onto.tbox.push_back({lhs, rhs});
        break;
      }
      case kAbox: {
        // ind = ind | ind != ind | role(ind, ind) | concept(ind)
        if (parser.peek().kind == Tok::Ident &&
            (parser.peek(1).kind == Tok::Eq || parser.peek(1).kind == Tok::Neq)) {
          std::string a = parser.expect_name(kSortIndividual);
          bool eq = parser.peek().kind == Tok::Eq;
          parser.advance();
          std::string b = parser.expect_name(kSortIndividual);
          parser.expect_line_end();
          if (!parser.failed())
            onto.abox.push_back({eq ? ABoxAssertion::Kind::Equal : ABoxAssertion::Kind::Different,
                                 0, 0, a, b});
          break;
        }
        if (parser.peek().kind == Tok::Ident && parser.peek(1).kind == Tok::LParen &&
            parser.peek(2).kind == Tok::Ident && parser.peek(3).kind == Tok::Comma) {
          const Token& rt = parser.peek();
          parser.advance();
          RoleId r = parser.pool->role(parser.bind_name(rt, kSortRole));
          parser.expect(Tok::LParen, "'('");
          std::string a = parser.expect_name(kSortIndividual);
          parser.expect(Tok::Comma, "','");
          std::string b = parser.expect_name(kSortIndividual);
          parser.expect(Tok::RParen, "')'");
          parser.expect_line_end();
          if (!parser.failed()) onto.abox.push_back({ABoxAssertion::Kind::Role, 0, r, a, b});
          break;
        }
        ConceptId c = parser.parse_or();
        parser.expect(Tok::LParen, "'('");
        std::string a = parser.expect_name(kSortIndividual);
        parser.expect(Tok::RParen, "')'");
        parser.expect_line_end();
        if (!parser.failed()) onto.abox.push_back({ABoxAssertion::Kind::Concept, c, 0, a, ""});
        break;
      }
      case kMbox: {
        std::string a = parser.expect_name(kSortIndividual);
        parser.expect(Tok::MEq, "'=m'");
        const Token& t = parser.peek();
        if (t.kind != Tok::Ident) {
          parser.error("meta-modelling axiom requires an atomic concept name on the right",
                       t.span);
          break;
        }
        parser.advance();
        std::string target = parser.bind_name(t, kSortConcept);
        parser.expect_line_end();
        if (!parser.failed()) onto.mbox.push_back({a, target});
        break;
      }
    }
  }

  if (section != kMbox && result.errors.empty()) {
    SourceSpan span{static_cast<int>(lines.size()), 1, 0};
    result.errors.push_back({"missing section header(s): file must contain TBOX, ABOX and MBOX",
                             "", span});
  }

  if (result.errors.empty()) {
    for (auto& d : validate_ontology(onto)) result.errors.push_back(std::move(d));
  }
  if (result.errors.empty()) result.ontology = std::move(onto);
  return result;
}

ConceptParseResult parse_concept(const std::string& text, const Ontology& o,
                                 const ParseOptions& opts) {
  ConceptParseResult result;
  Parser parser(&o, opts, result.errors);
  parser.pool = o.pool;
  LineLexer lexer(text, 1, result.errors);
  if (lexer.had_error()) return result;
  parser.set_tokens(&lexer.tokens());
  ConceptId c = parser.parse_or();
  parser.expect_line_end();
  if (result.errors.empty()) result.expr = c;
  return result;
}

std::string serialize(const Ontology& o) {
  const auto& p = *o.pool;
  std::vector<std::string> tbox, abox, mbox;
  for (const auto& ax : o.tbox) tbox.push_back(p.text(ax.lhs) + " SUBCLASSOF " + p.text(ax.rhs));
  for (const auto& as : o.abox) {
    switch (as.kind) {
      case ABoxAssertion::Kind::Concept:
        abox.push_back(wrap_compound(p, as.expr) + "(" + as.a + ")");
        break;
      case ABoxAssertion::Kind::Role:
        abox.push_back(p.role_name(as.role) + "(" + as.a + ", " + as.b + ")");
        break;
      case ABoxAssertion::Kind::Equal:
        abox.push_back(as.a + " = " + as.b);
        break;
      case ABoxAssertion::Kind::Different:
        abox.push_back(as.a + " != " + as.b);
        break;
    }
  }
  for (const auto& m : o.mbox) mbox.push_back(m.individual + " =m " + m.concept_name);

  auto emit = [](std::ostringstream& out, const char* header, std::vector<std::string>& lines) {
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    out << header << "\n";
    for (const auto& l : lines) out << l << "\n";
  };
  std::ostringstream out;
  emit(out, "TBOX", tbox);
  emit(out, "ABOX", abox);
  emit(out, "MBOX", mbox);
  return out.str();
}

}  // namespace alcqm
