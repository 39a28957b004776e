#include <cctype>
#include <cstdio>

#include "pfsm/error.hpp"
#include "pfsm/regex.hpp"

namespace pfsm {

RegexAst RegexAst::literal(std::uint8_t b) {
    RegexAst ast;
    ast.kind = Kind::literal;
    ast.byte = b;
    return ast;
}

RegexAst RegexAst::byte_class(const ByteClass& bytes) {
    if (bytes.none()) {
        throw Error("byte class must not be empty");
    }
    RegexAst ast;
    ast.kind = Kind::byte_class;
    ast.bytes = bytes;
    return ast;
}

namespace {

RegexAst nary(RegexAst::Kind kind, std::vector<RegexAst> children) {
    if (children.empty()) {
        return RegexAst::empty();
    }
    if (children.size() == 1) {
        return std::move(children.front());
    }
    RegexAst ast;
    ast.kind = kind;
    ast.children = std::move(children);
    return ast;
}

RegexAst unary(RegexAst::Kind kind, RegexAst child) {
    RegexAst ast;
    ast.kind = kind;
    ast.children.push_back(std::move(child));
    return ast;
}

bool is_meta(char c) {
    switch (c) {
        case '\\': case '.': case '[': case ']': case '(': case ')':
        case '|': case '*': case '+': case '?':
            return true;
        default:
            return false;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    RegexAst parse() {
        auto ast = alternation();
        if (pos_ < text_.size()) {
            // Only an unmatched ')' stops alternation() early.
            throw ParseError(pos_, "unbalanced parenthesis");
        }
        return ast;
    }

private:
    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    RegexAst alternation() {
        std::vector<RegexAst> branches;
        branches.push_back(concat());
        while (!done() && peek() == '|') {
            ++pos_;
            branches.push_back(concat());
        }
        return nary(RegexAst::Kind::alternation, std::move(branches));
    }

    RegexAst concat() {
        std::vector<RegexAst> items;
        while (!done() && peek() != '|' && peek() != ')') {
            items.push_back(repeat());
        }
        return nary(RegexAst::Kind::concat, std::move(items));
    }

    RegexAst repeat() {
        if (is_quantifier(peek())) {
            throw ParseError(pos_, "dangling quantifier");
        }
        auto ast = atom();
        while (!done() && is_quantifier(peek())) {
            const char q = peek();
            ++pos_;
            const auto kind = q == '*'   ? RegexAst::Kind::star
                              : q == '+' ? RegexAst::Kind::plus
                                         : RegexAst::Kind::optional;
            ast = unary(kind, std::move(ast));
        }
        return ast;
    }

    static bool is_quantifier(char c) { return c == '*' || c == '+' || c == '?'; }

    RegexAst atom() {
        const auto start = pos_;
        const char c = peek();
        ++pos_;
        switch (c) {
            case '(': {
                auto inner = alternation();
                if (done() || peek() != ')') {
                    throw ParseError(start, "unbalanced parenthesis");
                }
                ++pos_;
                return inner;
            }
            case '.':
                return RegexAst::byte_class(ByteClass{}.set());
            case '[':
                return byte_class(start);
            case '\\':
                return RegexAst::literal(escape(start));
            default:
                return RegexAst::literal(static_cast<std::uint8_t>(c));
        }
    }

    // Called with pos_ just past the backslash.
    std::uint8_t escape(std::size_t start) {
        if (done()) {
            throw ParseError(start, "bad escape: trailing backslash");
        }
        const char c = peek();
        ++pos_;
        switch (c) {
            case 'n': return '\n';
            case 't': return '\t';
            case 'r': return '\r';
            case 'f': return '\f';
            case 'v': return '\v';
            case '0': return 0;
            case 'x': {
                if (pos_ + 2 > text_.size() || !std::isxdigit(static_cast<unsigned char>(text_[pos_])) ||
                    !std::isxdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                    throw ParseError(start, "bad escape: \\x needs two hex digits");
                }
                const auto value = std::stoi(std::string(text_.substr(pos_, 2)), nullptr, 16);
                pos_ += 2;
                return static_cast<std::uint8_t>(value);
            }
            default:
                if (std::ispunct(static_cast<unsigned char>(c))) {
                    return static_cast<std::uint8_t>(c);
                }
                throw ParseError(start, std::string("bad escape: \\") + c);
        }
    }

    // Called with pos_ just past '['.
    RegexAst byte_class(std::size_t start) {
        ByteClass bytes;
        bool negated = false;
        if (!done() && peek() == '^') {
            negated = true;
            ++pos_;
        }
        bool closed = false;
        while (!done()) {
            if (peek() == ']') {
                ++pos_;
                closed = true;
                break;
            }
            const auto lo = class_byte();
            if (pos_ + 1 < text_.size() && peek() == '-' && text_[pos_ + 1] != ']') {
                const auto range_at = pos_;
                ++pos_;
                const auto hi = class_byte();
                if (hi < lo) {
                    throw ParseError(range_at, "invalid range in byte class");
                }
                for (unsigned b = lo; b <= hi; ++b) {
                    bytes.set(b);
                }
            } else {
                bytes.set(lo);
            }
        }
        if (!closed) {
            throw ParseError(start, "unterminated byte class");
        }
        if (negated) {
            bytes.flip();
        }
        if (bytes.none()) {
            throw ParseError(start, "empty class");
        }
        return RegexAst::byte_class(bytes);
    }

    std::uint8_t class_byte() {
        const auto at = pos_;
        const char c = peek();
        ++pos_;
        if (c == '\\') {
            return escape(at);
        }
        return static_cast<std::uint8_t>(c);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

void print_byte(std::string& out, std::uint8_t b, bool in_class) {
    const char c = static_cast<char>(b);
    if (b < 0x20 || b >= 0x7f) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "\\x%02x", b);
        out += buf;
    } else if (in_class ? (c == ']' || c == '\\' || c == '^' || c == '-' || c == '[') : is_meta(c)) {
        out += '\\';
        out += c;
    } else {
        out += c;
    }
}

void print(const RegexAst& ast, std::string& out);

void print_grouped(const RegexAst& ast, std::string& out, bool group) {
    if (group) {
        out += '(';
    }
    print(ast, out);
    if (group) {
        out += ')';
    }
}

void print(const RegexAst& ast, std::string& out) {
    using Kind = RegexAst::Kind;
    switch (ast.kind) {
        case Kind::empty:
            out += "()";
            return;
        case Kind::literal:
            print_byte(out, ast.byte, false);
            return;
        case Kind::byte_class: {
            if (ast.bytes.all()) {
                out += '.';
                return;
            }
            const bool negate = ast.bytes.count() > 128;
            const auto shown = negate ? ~ast.bytes : ast.bytes;
            out += negate ? "[^" : "[";
            for (unsigned b = 0; b < 256;) {
                if (!shown.test(b)) {
                    ++b;
                    continue;
                }
                unsigned e = b;
                while (e + 1 < 256 && shown.test(e + 1)) {
                    ++e;
                }
                print_byte(out, static_cast<std::uint8_t>(b), true);
                if (e > b) {
                    out += '-';
                    print_byte(out, static_cast<std::uint8_t>(e), true);
                }
                b = e + 1;
            }
            out += ']';
            return;
        }
        case Kind::concat:
            for (const auto& child : ast.children) {
                print_grouped(child, out, child.kind == Kind::alternation);
            }
            return;
        case Kind::alternation:
            for (std::size_t i = 0; i < ast.children.size(); ++i) {
                if (i > 0) {
                    out += '|';
                }
                print(ast.children[i], out);
            }
            return;
        case Kind::star:
        case Kind::plus:
        case Kind::optional: {
            const auto& child = ast.children.front();
            print_grouped(child, out, child.kind == Kind::concat || child.kind == Kind::alternation);
            out += ast.kind == Kind::star ? '*' : ast.kind == Kind::plus ? '+' : '?';
            return;
        }
    }
}

}  // namespace

RegexAst RegexAst::concat(std::vector<RegexAst> children) {
    return nary(Kind::concat, std::move(children));
}

RegexAst RegexAst::alternation(std::vector<RegexAst> children) {
    return nary(Kind::alternation, std::move(children));
}

RegexAst RegexAst::star(RegexAst child) { return unary(Kind::star, std::move(child)); }
RegexAst RegexAst::plus(RegexAst child) { return unary(Kind::plus, std::move(child)); }
RegexAst RegexAst::optional(RegexAst child) { return unary(Kind::optional, std::move(child)); }

RegexAst parse_regex(std::string_view pattern) { return Parser(pattern).parse(); }

std::string to_pattern(const RegexAst& ast) {
    std::string out;
    print(ast, out);
    return out;
}

bool is_nullable(const RegexAst& ast) {
    using Kind = RegexAst::Kind;
    switch (ast.kind) {
        case Kind::empty:
        case Kind::star:
        case Kind::optional:
            return true;
        case Kind::literal:
        case Kind::byte_class:
            return false;
        case Kind::plus:
            return is_nullable(ast.children.front());
        case Kind::concat:
            for (const auto& c : ast.children) {
                if (!is_nullable(c)) {
                    return false;
                }
            }
            return true;
        case Kind::alternation:
            for (const auto& c : ast.children) {
                if (is_nullable(c)) {
                    return true;
                }
            }
            return false;
    }
    return false;
}

std::vector<std::string> check_ast(const RegexAst& ast) {
    using Kind = RegexAst::Kind;
    std::vector<std::string> out;
    const auto n = ast.children.size();
    switch (ast.kind) {
        case Kind::empty:
        case Kind::literal:
            if (n != 0) out.emplace_back("leaf node with children");
            break;
        case Kind::byte_class:
            if (n != 0) out.emplace_back("leaf node with children");
            if (ast.bytes.none()) out.emplace_back("empty byte class");
            break;
        case Kind::concat:
        case Kind::alternation:
            if (n < 2) out.emplace_back("concat/alternation with fewer than two children");
            break;
        case Kind::star:
        case Kind::plus:
        case Kind::optional:
            if (n != 1) out.emplace_back("quantifier without exactly one child");
            break;
    }
    for (const auto& child : ast.children) {
        auto nested = check_ast(child);
        out.insert(out.end(), nested.begin(), nested.end());
    }
    return out;
}

std::vector<PatternSpec> parse_pattern_file(std::string_view contents) {
    std::vector<PatternSpec> out;
    std::size_t line_no = 0;
    while (!contents.empty()) {
        const auto nl = contents.find('\n');
        auto line = contents.substr(0, nl);
        contents.remove_prefix(nl == std::string_view::npos ? contents.size() : nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            out.push_back({std::string(line), std::string(line), line_no});
        } else {
            out.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)), line_no});
        }
    }
    return out;
}

}  // namespace pfsm
