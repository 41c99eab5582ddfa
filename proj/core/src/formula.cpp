#include "typecsp/formula.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace typecsp {

Formula Formula::truth() {
    Formula f;
    f.kind_ = Kind::True;
    return f;
}

Formula Formula::falsity() {
    Formula f;
    f.kind_ = Kind::False;
    return f;
}

Formula Formula::eq(int lhs, int rhs) {
    if (lhs < 1 || rhs < 1) throw ValidationError("equality atom positions must be >= 1");
    Formula f;
    f.kind_ = Kind::Eq;
    f.lhs_ = lhs;
    f.rhs_ = rhs;
    f.width_ = std::max(lhs, rhs);
    return f;
}

Formula Formula::in_block(std::string block, int pos) {
    if (pos < 1) throw ValidationError("block atom position must be >= 1");
    if (block.empty()) throw ValidationError("block atom needs a block name");
    Formula f;
    f.kind_ = Kind::InBlock;
    f.lhs_ = pos;
    f.block_ = std::move(block);
    f.width_ = pos;
    return f;
}

Formula Formula::negation(Formula arg) {
    Formula f;
    f.kind_ = Kind::Not;
    f.width_ = arg.width_;
    f.args_.push_back(std::move(arg));
    return f;
}

Formula Formula::conjunction(std::vector<Formula> args) {
    if (args.size() < 2)
        throw ValidationError("conjunction needs at least two arguments");
    Formula f;
    f.kind_ = Kind::And;
    for (const auto& a : args) f.width_ = std::max(f.width_, a.width_);
    f.args_ = std::move(args);
    return f;
}

Formula Formula::disjunction(std::vector<Formula> args) {
    if (args.size() < 2)
        throw ValidationError("disjunction needs at least two arguments");
    Formula f;
    f.kind_ = Kind::Or;
    for (const auto& a : args) f.width_ = std::max(f.width_, a.width_);
    f.args_ = std::move(args);
    return f;
}

bool Formula::operator==(const Formula& o) const {
    if (kind_ != o.kind_) return false;
    switch (kind_) {
    case Kind::True:
    case Kind::False: return true;
    case Kind::Eq: return lhs_ == o.lhs_ && rhs_ == o.rhs_;
    case Kind::InBlock: return lhs_ == o.lhs_ && block_ == o.block_;
    case Kind::Not:
    case Kind::And:
    case Kind::Or: return args_ == o.args_;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Precedence: atoms bind tightest, then !, then &, then |.
int precedence(Formula::Kind k) {
    switch (k) {
    case Formula::Kind::Or: return 1;
    case Formula::Kind::And: return 2;
    case Formula::Kind::Not: return 3;
    default: return 4;
    }
}

void print_rec(const Formula& f, int parent_prec, std::string& out) {
    int prec = precedence(f.kind());
    bool paren = prec < parent_prec;
    if (paren) out += '(';
    switch (f.kind()) {
    case Formula::Kind::True: out += "true"; break;
    case Formula::Kind::False: out += "false"; break;
    case Formula::Kind::Eq:
        out += 'z';
        out += std::to_string(f.lhs());
        out += " = z";
        out += std::to_string(f.rhs());
        break;
    case Formula::Kind::InBlock:
        out += f.block();
        out += "(z";
        out += std::to_string(f.pos());
        out += ')';
        break;
    case Formula::Kind::Not:
        out += '!';
        print_rec(f.args()[0], precedence(Formula::Kind::Not) + 1, out);
        break;
    case Formula::Kind::And:
        for (std::size_t i = 0; i < f.args().size(); ++i) {
            if (i) out += " & ";
            print_rec(f.args()[i], prec + 1, out);
        }
        break;
    case Formula::Kind::Or:
        for (std::size_t i = 0; i < f.args().size(); ++i) {
            if (i) out += " | ";
            print_rec(f.args()[i], prec + 1, out);
        }
        break;
    }
    if (paren) out += ')';
}

} // namespace

std::string Formula::to_string() const {
    std::string out;
    print_rec(*this, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum class Type { Ident, Var, Eq, Amp, Pipe, Bang, LParen, RParen, True, False, End };
    Type type;
    std::string text;
    int var = 0;        // variable index for Var tokens
    std::size_t offset; // byte offset in the source
};

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '#' || c == '\'';
}

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::Type::End, "", 0, start};
            return;
        }
        char c = src_[pos_];
        switch (c) {
        case '=': tok_ = {Token::Type::Eq, "=", 0, start}; ++pos_; return;
        case '&': tok_ = {Token::Type::Amp, "&", 0, start}; ++pos_; return;
        case '|': tok_ = {Token::Type::Pipe, "|", 0, start}; ++pos_; return;
        case '!': tok_ = {Token::Type::Bang, "!", 0, start}; ++pos_; return;
        case '(': tok_ = {Token::Type::LParen, "(", 0, start}; ++pos_; return;
        case ')': tok_ = {Token::Type::RParen, ")", 0, start}; ++pos_; return;
        default: break;
        }
        if (!ident_start(c)) throw ParseError("unexpected character", start);
        std::size_t end = pos_;
        while (end < src_.size() && ident_char(src_[end])) ++end;
        std::string word = src_.substr(pos_, end - pos_);
        pos_ = end;
        if (word == "true") {
            tok_ = {Token::Type::True, word, 0, start};
            return;
        }
        if (word == "false") {
            tok_ = {Token::Type::False, word, 0, start};
            return;
        }
        // zK with K >= 1 is a variable; anything else is a block name.
        if (word.size() > 1 && word[0] == 'z' &&
            std::all_of(word.begin() + 1, word.end(),
                        [](char d) { return std::isdigit((unsigned char)d); })) {
            int idx = 0;
            for (std::size_t i = 1; i < word.size(); ++i) {
                idx = idx * 10 + (word[i] - '0');
                if (idx > 1'000'000) throw ParseError("variable index too large", start);
            }
            if (idx >= 1) {
                tok_ = {Token::Type::Var, word, idx, start};
                return;
            }
        }
        tok_ = {Token::Type::Ident, word, 0, start};
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(const std::string& src, const std::set<std::string>* blocks)
        : lex_(src), blocks_(blocks) {}

    Formula run() {
        Formula f = parse_or();
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End)
            throw ParseError("unexpected trailing input", t.offset);
        return f;
    }

private:
    Formula parse_or() {
        std::vector<Formula> parts;
        parts.push_back(parse_and());
        while (lex_.peek().type == Token::Type::Pipe) {
            lex_.take();
            parts.push_back(parse_and());
        }
        if (parts.size() == 1) return std::move(parts[0]);
        return Formula::disjunction(std::move(parts));
    }

    Formula parse_and() {
        std::vector<Formula> parts;
        parts.push_back(parse_not());
        while (lex_.peek().type == Token::Type::Amp) {
            lex_.take();
            parts.push_back(parse_not());
        }
        if (parts.size() == 1) return std::move(parts[0]);
        return Formula::conjunction(std::move(parts));
    }

    Formula parse_not() {
        if (lex_.peek().type == Token::Type::Bang) {
            lex_.take();
            return Formula::negation(parse_not());
        }
        return parse_atom();
    }

    Formula parse_atom() {
        Token t = lex_.take();
        switch (t.type) {
        case Token::Type::True: return Formula::truth();
        case Token::Type::False: return Formula::falsity();
        case Token::Type::LParen: {
            Formula f = parse_or();
            expect(Token::Type::RParen, "expected ')'");
            return f;
        }
        case Token::Type::Var: {
            expect(Token::Type::Eq, "expected '='");
            Token rhs = lex_.take();
            if (rhs.type != Token::Type::Var)
                throw ParseError("expected variable after '='", rhs.offset);
            return Formula::eq(t.var, rhs.var);
        }
        case Token::Type::Ident: {
            if (blocks_ && !blocks_->count(t.text))
                throw ParseError("unknown block name '" + t.text + "'", t.offset);
            expect(Token::Type::LParen, "expected '(' after block name");
            Token var = lex_.take();
            if (var.type != Token::Type::Var)
                throw ParseError("expected variable in block atom", var.offset);
            expect(Token::Type::RParen, "expected ')'");
            return Formula::in_block(t.text, var.var);
        }
        default: throw ParseError("expected formula atom", t.offset);
        }
    }

    void expect(Token::Type type, const char* msg) {
        Token t = lex_.take();
        if (t.type != type) throw ParseError(msg, t.offset);
    }

    Lexer lex_;
    const std::set<std::string>* blocks_;
};

} // namespace

Formula parse_formula(const std::string& text) {
    return Parser(text, nullptr).run();
}

Formula parse_formula(const std::string& text, const std::set<std::string>& known_blocks) {
    return Parser(text, &known_blocks).run();
}

// ---------------------------------------------------------------------------
// Semantics

bool evaluate(const Formula& phi, std::span<const Label> assignment) {
    if ((int)assignment.size() < phi.width())
        throw ValidationError("assignment covers " + std::to_string(assignment.size()) +
                              " positions but the formula has width " +
                              std::to_string(phi.width()));
    switch (phi.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Eq:
        return assignment[phi.lhs() - 1].cls == assignment[phi.rhs() - 1].cls;
    case Formula::Kind::InBlock:
        return assignment[phi.pos() - 1].block == phi.block();
    case Formula::Kind::Not: return !evaluate(phi.args()[0], assignment);
    case Formula::Kind::And:
        for (const auto& a : phi.args())
            if (!evaluate(a, assignment)) return false;
        return true;
    case Formula::Kind::Or:
        for (const auto& a : phi.args())
            if (evaluate(a, assignment)) return true;
        return false;
    }
    return false;
}

Formula reindex(const Formula& phi, std::span<const int> index_map) {
    if ((int)index_map.size() < phi.width())
        throw ValidationError("index map covers " + std::to_string(index_map.size()) +
                              " positions but the formula has width " +
                              std::to_string(phi.width()));
    for (int v : index_map)
        if (v < 1) throw ValidationError("index map values must be >= 1");
    switch (phi.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return phi;
    case Formula::Kind::Eq:
        return Formula::eq(index_map[phi.lhs() - 1], index_map[phi.rhs() - 1]);
    case Formula::Kind::InBlock:
        return Formula::in_block(phi.block(), index_map[phi.pos() - 1]);
    case Formula::Kind::Not: return Formula::negation(reindex(phi.args()[0], index_map));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> args;
        args.reserve(phi.args().size());
        for (const auto& a : phi.args()) args.push_back(reindex(a, index_map));
        return phi.kind() == Formula::Kind::And ? Formula::conjunction(std::move(args))
                                                : Formula::disjunction(std::move(args));
    }
    }
    return phi;
}

Formula replace_blocks(const Formula& phi,
                       const std::map<std::string, std::vector<std::string>>& cover) {
    switch (phi.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False:
    case Formula::Kind::Eq: return phi;
    case Formula::Kind::InBlock: {
        auto it = cover.find(phi.block());
        if (it == cover.end()) return phi;
        const auto& names = it->second;
        if (names.empty()) throw ValidationError("block cover for '" + phi.block() + "' is empty");
        if (names.size() == 1) return Formula::in_block(names[0], phi.pos());
        std::vector<Formula> parts;
        parts.reserve(names.size());
        for (const auto& n : names) parts.push_back(Formula::in_block(n, phi.pos()));
        return Formula::disjunction(std::move(parts));
    }
    case Formula::Kind::Not: return Formula::negation(replace_blocks(phi.args()[0], cover));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        std::vector<Formula> args;
        args.reserve(phi.args().size());
        for (const auto& a : phi.args()) args.push_back(replace_blocks(a, cover));
        return phi.kind() == Formula::Kind::And ? Formula::conjunction(std::move(args))
                                                : Formula::disjunction(std::move(args));
    }
    }
    return phi;
}

} // namespace typecsp
