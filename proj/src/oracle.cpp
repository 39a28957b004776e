#include "pfsm/oracle.hpp"

#include <algorithm>
#include <cstdint>

namespace pfsm::oracle {

namespace {

using Kind = RegexAst::Kind;

// Span interpreter. Concatenation and alternation are re-associated into
// binary nodes so that every rule below splits a span at most once.
class SpanMatcher {
public:
    SpanMatcher(const RegexAst& ast, std::string_view s) : s_(s), width_(s.size() + 1) {
        root_ = flatten(ast);
        memo_.assign(nodes_.size() * width_ * width_, -1);
    }

    // Does s[i, j) belong to the language?
    bool match(std::size_t i, std::size_t j) { return match(root_, i, j); }

private:
    struct Node {
        Kind kind;
        std::uint8_t byte = 0;
        ByteClass bytes;
        int left = -1;
        int right = -1;
    };

    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size() - 1);
    }

    int flatten(const RegexAst& ast) {
        switch (ast.kind) {
            case Kind::empty:
                return add({Kind::empty, 0, {}});
            case Kind::literal:
                return add({Kind::literal, ast.byte, {}});
            case Kind::byte_class:
                return add({Kind::byte_class, 0, ast.bytes});
            case Kind::concat:
            case Kind::alternation: {
                int right = flatten(ast.children.back());
                for (auto it = ast.children.rbegin() + 1; it != ast.children.rend(); ++it) {
                    const int left = flatten(*it);
                    right = add({ast.kind, 0, {}, left, right});
                }
                return right;
            }
            case Kind::star:
            case Kind::plus:
            case Kind::optional:
                return add({ast.kind, 0, {}, flatten(ast.children.front())});
        }
        return add({Kind::empty, 0, {}});
    }

    bool match(int id, std::size_t i, std::size_t j) {
        auto& slot = memo_[(static_cast<std::size_t>(id) * width_ + i) * width_ + j];
        if (slot != -1) {
            return slot == 1;
        }
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        bool ok = false;
        switch (n.kind) {
            case Kind::empty:
                ok = i == j;
                break;
            case Kind::literal:
                ok = j == i + 1 && static_cast<std::uint8_t>(s_[i]) == n.byte;
                break;
            case Kind::byte_class:
                ok = j == i + 1 && n.bytes.test(static_cast<std::uint8_t>(s_[i]));
                break;
            case Kind::concat:
                for (std::size_t k = i; k <= j && !ok; ++k) {
                    ok = match(n.left, i, k) && match(n.right, k, j);
                }
                break;
            case Kind::alternation:
                ok = match(n.left, i, j) || match(n.right, i, j);
                break;
            case Kind::star:
                // Non-empty first iteration, then the rest of the star.
                ok = i == j;
                for (std::size_t k = i + 1; k <= j && !ok; ++k) {
                    ok = match(n.left, i, k) && match(id, k, j);
                }
                break;
            case Kind::plus:
                ok = match(n.left, i, j);
                for (std::size_t k = i + 1; k < j && !ok; ++k) {
                    ok = match(n.left, i, k) && match(id, k, j);
                }
                break;
            case Kind::optional:
                ok = i == j || match(n.left, i, j);
                break;
        }
        slot = ok ? 1 : 0;
        return ok;
    }

    std::string_view s_;
    std::size_t width_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::int8_t> memo_;
};

// Glushkov automaton given by position sets.
class PositionSets {
public:
    explicit PositionSets(const RegexAst& ast) {
        auto info = build(ast);
        nullable_ = info.nullable;
        first_ = std::move(info.first);
        last_.assign(bytes_.size(), false);
        for (const auto p : info.last) {
            last_[p] = true;
        }
        for (auto& f : follow_) {
            std::sort(f.begin(), f.end());
            f.erase(std::unique(f.begin(), f.end()), f.end());
        }
    }

    bool nullable() const { return nullable_; }

    // Calls on_accept(j) for every j such that s[start..j] is accepted.
    template <typename F>
    void scan(std::string_view s, std::size_t start, F&& on_accept) const {
        std::vector<bool> current(bytes_.size(), false);
        std::vector<bool> next(bytes_.size(), false);
        bool at_start = true;
        for (std::size_t j = start; j < s.size(); ++j) {
            const auto c = static_cast<std::uint8_t>(s[j]);
            std::fill(next.begin(), next.end(), false);
            bool any = false;
            auto enter = [&](int p) {
                if (bytes_[p].test(c)) {
                    next[p] = true;
                    any = true;
                }
            };
            if (at_start) {
                for (const auto p : first_) {
                    enter(p);
                }
            } else {
                for (std::size_t p = 0; p < current.size(); ++p) {
                    if (current[p]) {
                        for (const auto q : follow_[p]) {
                            enter(q);
                        }
                    }
                }
            }
            at_start = false;
            current.swap(next);
            if (!any) {
                return;
            }
            for (std::size_t p = 0; p < current.size(); ++p) {
                if (current[p] && last_[p]) {
                    on_accept(j);
                    break;
                }
            }
        }
    }

private:
    struct Info {
        bool nullable = true;
        std::vector<int> first;
        std::vector<int> last;
    };

    static void append(std::vector<int>& to, const std::vector<int>& from) {
        to.insert(to.end(), from.begin(), from.end());
    }

    Info leaf(const ByteClass& bytes) {
        const int p = static_cast<int>(bytes_.size());
        bytes_.push_back(bytes);
        follow_.emplace_back();
        return {false, {p}, {p}};
    }

    void loop(const Info& info) {
        for (const auto l : info.last) {
            append(follow_[l], info.first);
        }
    }

    Info build(const RegexAst& ast) {
        switch (ast.kind) {
            case Kind::empty:
                return {};
            case Kind::literal: {
                ByteClass b;
                b.set(ast.byte);
                return leaf(b);
            }
            case Kind::byte_class:
                return leaf(ast.bytes);
            case Kind::concat: {
                Info acc = build(ast.children.front());
                for (std::size_t k = 1; k < ast.children.size(); ++k) {
                    Info next = build(ast.children[k]);
                    for (const auto l : acc.last) {
                        append(follow_[l], next.first);
                    }
                    if (acc.nullable) {
                        append(acc.first, next.first);
                    }
                    if (next.nullable) {
                        append(next.last, acc.last);
                    }
                    acc.last = std::move(next.last);
                    acc.nullable = acc.nullable && next.nullable;
                }
                return acc;
            }
            case Kind::alternation: {
                Info acc;
                acc.nullable = false;
                for (const auto& child : ast.children) {
                    const Info c = build(child);
                    acc.nullable = acc.nullable || c.nullable;
                    append(acc.first, c.first);
                    append(acc.last, c.last);
                }
                return acc;
            }
            case Kind::star:
            case Kind::plus:
            case Kind::optional: {
                Info c = build(ast.children.front());
                if (ast.kind != Kind::optional) {
                    loop(c);
                }
                if (ast.kind != Kind::plus) {
                    c.nullable = true;
                }
                return c;
            }
        }
        return {};
    }

    std::vector<ByteClass> bytes_;
    std::vector<std::vector<int>> follow_;
    std::vector<int> first_;
    std::vector<bool> last_;
    bool nullable_ = false;
};

}  // namespace

bool accepts(const RegexAst& ast, std::string_view s) { return SpanMatcher(ast, s).match(0, s.size()); }

bool accepts_positions(const RegexAst& ast, std::string_view s) {
    const PositionSets g(ast);
    if (s.empty()) {
        return g.nullable();
    }
    bool hit = false;
    g.scan(s, 0, [&](std::size_t j) { hit = hit || j + 1 == s.size(); });
    return hit;
}

std::vector<Match> all_matches(std::span<const RegexAst> patterns, std::string_view input) {
    std::vector<Match> out;
    for (std::size_t l = 0; l < patterns.size(); ++l) {
        SpanMatcher m(patterns[l], input);
        for (std::size_t i = 0; i < input.size(); ++i) {
            for (std::size_t j = i; j < input.size(); ++j) {
                if (m.match(i, j + 1)) {
                    out.push_back(make_match(static_cast<LabelId>(l), i, j));
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Match> all_matches_positions(std::span<const RegexAst> patterns, std::string_view input) {
    std::vector<Match> out;
    for (std::size_t l = 0; l < patterns.size(); ++l) {
        const PositionSets g(patterns[l]);
        for (std::size_t i = 0; i < input.size(); ++i) {
            g.scan(input, i, [&](std::size_t j) { out.push_back(make_match(static_cast<LabelId>(l), i, j)); });
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pfsm::oracle
