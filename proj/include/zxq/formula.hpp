#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "zxq/error.hpp"

namespace zxq {

/// Total or partial truth assignment to named variables.
using Valuation = std::map<std::string, bool>;

/// Immutable boolean expression over named variables.
class Formula {
public:
    enum class Op { constant, var, negate, conj, disj };

    Formula() : Formula(true) {}
    Formula(bool value) : node_(std::make_shared<Node>(Node{Op::constant, value, {}, {}})) {}

    static Formula var(std::string name) {
        return Formula(std::make_shared<Node>(Node{Op::var, false, std::move(name), {}}));
    }
    static Formula all_of(std::vector<Formula> terms) {
        if (terms.empty()) return Formula(true);
        if (terms.size() == 1) return terms.front();
        return Formula(std::make_shared<Node>(Node{Op::conj, false, {}, std::move(terms)}));
    }
    static Formula any_of(std::vector<Formula> terms) {
        if (terms.empty()) return Formula(false);
        if (terms.size() == 1) return terms.front();
        return Formula(std::make_shared<Node>(Node{Op::disj, false, {}, std::move(terms)}));
    }

    Op op() const noexcept { return node_->op; }
    bool is_const() const noexcept { return node_->op == Op::constant; }
    bool value() const noexcept { return node_->value; }
    std::string const& name() const noexcept { return node_->name; }
    std::vector<Formula> const& children() const noexcept { return node_->kids; }

    /// Unconditional in the labelling sense: the literal constant true.
    bool is_true() const noexcept { return is_const() && value(); }
    bool is_false() const noexcept { return is_const() && !value(); }

    Formula operator!() const {
        if (is_const()) return Formula(!value());
        return Formula(std::make_shared<Node>(Node{Op::negate, false, {}, {*this}}));
    }
    friend Formula operator&(Formula const& a, Formula const& b) { return all_of({a, b}); }
    friend Formula operator|(Formula const& a, Formula const& b) { return any_of({a, b}); }

    /// Exclusive or, written with the grammar's connectives.
    friend Formula operator^(Formula const& a, Formula const& b) {
        if (a.is_const()) return a.value() ? !b : b;
        if (b.is_const()) return b.value() ? !a : a;
        return (a & (!b)) | ((!a) & b);
    }

    void collect_vars(std::set<std::string>& out) const {
        if (op() == Op::var) out.insert(name());
        for (auto const& k : children()) k.collect_vars(out);
    }
    std::set<std::string> vars() const {
        std::set<std::string> out;
        collect_vars(out);
        return out;
    }

    std::string str() const { return render(0); }

    /// Structural (syntactic) identity.
    friend bool operator==(Formula const& a, Formula const& b) { return a.str() == b.str(); }

private:
    struct Node {
        Op op;
        bool value;
        std::string name;
        std::vector<Formula> kids;
    };

    explicit Formula(std::shared_ptr<Node const> n) : node_(std::move(n)) {}

    // prec: 0 = or-level, 1 = and-level, 2 = unary
    std::string render(int prec) const {
        switch (op()) {
            case Op::constant: return value() ? "1" : "0";
            case Op::var: return name();
            case Op::negate: return "!" + children()[0].render(2);
            case Op::conj:
            case Op::disj: {
                bool const is_and = op() == Op::conj;
                std::string s;
                for (std::size_t i = 0; i < children().size(); ++i) {
                    if (i) s += is_and ? "&" : "|";
                    s += children()[i].render(is_and ? 2 : 1);
                }
                int const mine = is_and ? 1 : 0;
                return prec > mine ? "(" + s + ")" : s;
            }
        }
        return {};
    }

    std::shared_ptr<Node const> node_;
};

inline bool evaluate(Formula const& f, Valuation const& v) {
    switch (f.op()) {
        case Formula::Op::constant: return f.value();
        case Formula::Op::var: {
            auto it = v.find(f.name());
            if (it == v.end()) throw Error(ErrorKind::unbound_variable, "unbound variable '" + f.name() + "'");
            return it->second;
        }
        case Formula::Op::negate: return !evaluate(f.children()[0], v);
        case Formula::Op::conj:
            return std::all_of(f.children().begin(), f.children().end(),
                               [&](Formula const& k) { return evaluate(k, v); });
        case Formula::Op::disj:
            return std::any_of(f.children().begin(), f.children().end(),
                               [&](Formula const& k) { return evaluate(k, v); });
    }
    return false;
}

inline constexpr int max_truth_table_vars = 24;

namespace detail {

// Bit-parallel evaluation: word w, bit b corresponds to assignment index 64*w + b,
// where variable i takes bit i of the assignment index.
inline std::uint64_t eval_word(Formula const& f, std::map<std::string, int> const& index, std::size_t word) {
    switch (f.op()) {
        case Formula::Op::constant: return f.value() ? ~std::uint64_t{0} : 0;
        case Formula::Op::var: {
            static constexpr std::uint64_t low_patterns[6] = {
                0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
                0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
            int const i = index.at(f.name());
            if (i < 6) return low_patterns[i];
            return ((word >> (i - 6)) & 1u) ? ~std::uint64_t{0} : 0;
        }
        case Formula::Op::negate: return ~eval_word(f.children()[0], index, word);
        case Formula::Op::conj: {
            std::uint64_t acc = ~std::uint64_t{0};
            for (auto const& k : f.children()) acc &= eval_word(k, index, word);
            return acc;
        }
        case Formula::Op::disj: {
            std::uint64_t acc = 0;
            for (auto const& k : f.children()) acc |= eval_word(k, index, word);
            return acc;
        }
    }
    return 0;
}

}  // namespace detail

/// Truth table over `vars` (variable i is bit i of the row index), packed 64 rows per word.
/// Unused high bits of the final word are cleared.
inline std::vector<std::uint64_t> truth_table(Formula const& f, std::vector<std::string> const& vars) {
    if (static_cast<int>(vars.size()) > max_truth_table_vars)
        throw Error(ErrorKind::too_many_variables,
                    "truth table over " + std::to_string(vars.size()) + " variables exceeds limit of " +
                        std::to_string(max_truth_table_vars));
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i]] = static_cast<int>(i);
    std::size_t const rows = std::size_t{1} << vars.size();
    std::size_t const words = (rows + 63) / 64;
    std::vector<std::uint64_t> table(words);
    for (std::size_t w = 0; w < words; ++w) table[w] = detail::eval_word(f, index, w);
    if (rows < 64) table[0] &= (std::uint64_t{1} << rows) - 1;
    return table;
}

inline bool equivalent(Formula const& a, Formula const& b) {
    std::set<std::string> all = a.vars();
    b.collect_vars(all);
    std::vector<std::string> const vars(all.begin(), all.end());
    return truth_table(a, vars) == truth_table(b, vars);
}

/// The constant value of `f` if it is constant-valued, otherwise nullopt.
inline std::optional<bool> constant_value(Formula const& f) {
    auto const vars_set = f.vars();
    std::vector<std::string> const vars(vars_set.begin(), vars_set.end());
    auto const table = truth_table(f, vars);
    std::size_t const rows = std::size_t{1} << vars.size();
    bool any_true = false, any_false = false;
    for (std::size_t w = 0; w < table.size(); ++w) {
        std::uint64_t const live = rows < 64 ? (std::uint64_t{1} << rows) - 1 : ~std::uint64_t{0};
        any_true |= (table[w] & live) != 0;
        any_false |= (~table[w] & live) != 0;
    }
    if (!any_false) return true;
    if (!any_true) return false;
    return std::nullopt;
}

namespace detail {

inline Formula simplify_structure(Formula const& f) {
    using Op = Formula::Op;
    switch (f.op()) {
        case Op::constant:
        case Op::var: return f;
        case Op::negate: {
            Formula const inner = simplify_structure(f.children()[0]);
            if (inner.op() == Op::negate) return inner.children()[0];
            return !inner;
        }
        case Op::conj:
        case Op::disj: {
            bool const is_and = f.op() == Op::conj;
            // absorbing element for and is false, for or is true
            bool const absorbing = !is_and;
            std::vector<Formula> terms;
            std::set<std::string> seen;
            auto push = [&](Formula const& t) {
                if (seen.insert(t.str()).second) terms.push_back(t);
            };
            for (auto const& k : f.children()) {
                Formula const s = simplify_structure(k);
                if (s.is_const()) {
                    if (s.value() == absorbing) return Formula(absorbing);
                    continue;
                }
                if (s.op() == f.op()) {
                    for (auto const& g : s.children()) push(g);
                } else {
                    push(s);
                }
            }
            for (auto const& t : terms) {
                if (seen.count((!t).str())) return Formula(absorbing);
            }
            std::sort(terms.begin(), terms.end(), [](Formula const& x, Formula const& y) { return x.str() < y.str(); });
            return is_and ? Formula::all_of(std::move(terms)) : Formula::any_of(std::move(terms));
        }
    }
    return f;
}

}  // namespace detail

/// Constant folding, flattening, idempotence, and complement laws; any
/// constant-valued formula (with at most 24 variables) is reduced to a constant.
inline Formula simplify(Formula const& f) {
    Formula s = detail::simplify_structure(f);
    if (s.is_const()) return s;
    if (static_cast<int>(s.vars().size()) <= max_truth_table_vars) {
        if (auto c = constant_value(s)) return Formula(*c);
    }
    return s;
}

namespace detail {

class FormulaParser {
public:
    FormulaParser(std::string_view text, std::set<std::string> const* known) : text_(text), known_(known) {}

    Formula parse() {
        lex();
        if (tokens_.empty()) fail("empty formula");
        Formula f = parse_or();
        if (pos_ != tokens_.size()) fail("unexpected '" + tokens_[pos_] + "'");
        return f;
    }

private:
    [[noreturn]] void fail(std::string const& why) const {
        throw Error(ErrorKind::parse, "formula '" + std::string(text_) + "': " + why);
    }

    void lex() {
        std::size_t i = 0;
        while (i < text_.size()) {
            char const c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '!' || c == '&' || c == '|' || c == '(' || c == ')' || c == '0' || c == '1') {
                tokens_.emplace_back(1, c);
                ++i;
            } else if (c >= 'a' && c <= 'z') {
                std::size_t j = i + 1;
                while (j < text_.size() && (std::islower(static_cast<unsigned char>(text_[j])) ||
                                            std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
                    ++j;
                push_identifier(text_.substr(i, j - i));
                i = j;
            } else {
                fail(std::string("unexpected character '") + c + "'");
            }
        }
    }

    // A run of letters that is not a declared variable is read as juxtaposed
    // single-letter variables ("ab" is a&b). Identifiers with digits or '_' are atomic.
    void push_identifier(std::string_view id) {
        bool const letters_only =
            std::all_of(id.begin(), id.end(), [](char c) { return c >= 'a' && c <= 'z'; });
        if (id.size() == 1 || !letters_only || (known_ && known_->count(std::string(id)))) {
            tokens_.emplace_back(id);
            return;
        }
        for (char c : id) tokens_.emplace_back(1, c);
    }

    bool at(char c) const { return pos_ < tokens_.size() && tokens_[pos_].size() == 1 && tokens_[pos_][0] == c; }

    bool starts_unary() const {
        if (pos_ >= tokens_.size()) return false;
        char const c = tokens_[pos_][0];
        return c == '!' || c == '(' || c == '0' || c == '1' || (c >= 'a' && c <= 'z');
    }

    Formula parse_or() {
        std::vector<Formula> terms{parse_and()};
        while (at('|')) {
            ++pos_;
            terms.push_back(parse_and());
        }
        return Formula::any_of(std::move(terms));
    }

    Formula parse_and() {
        std::vector<Formula> terms{parse_unary()};
        for (;;) {
            if (at('&')) {
                ++pos_;
                terms.push_back(parse_unary());
            } else if (starts_unary()) {
                terms.push_back(parse_unary());
            } else {
                break;
            }
        }
        return Formula::all_of(std::move(terms));
    }

    Formula parse_unary() {
        if (pos_ >= tokens_.size()) fail("unexpected end of input");
        if (at('!')) {
            ++pos_;
            return !parse_unary();
        }
        if (at('(')) {
            ++pos_;
            Formula f = parse_or();
            if (!at(')')) fail("missing ')'");
            ++pos_;
            return f;
        }
        if (at('0') || at('1')) return Formula(tokens_[pos_++][0] == '1');
        std::string const& tok = tokens_[pos_];
        if (tok[0] >= 'a' && tok[0] <= 'z') {
            ++pos_;
            return Formula::var(tok);
        }
        fail("unexpected '" + tok + "'");
    }

    std::string_view text_;
    std::set<std::string> const* known_;
    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the formula grammar: variables `[a-z][a-z0-9_]*`, `!`, `&`, `|`, `0`, `1`,
/// parentheses, and juxtaposition for conjunction. `known` lists multi-letter
/// variable names that must not be split into single letters.
inline Formula parse_formula(std::string_view text, std::set<std::string> const& known = {}) {
    return detail::FormulaParser(text, &known).parse();
}

}  // namespace zxq
