#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gevrey/tseries.hpp"

namespace gevrey {

/// Expression tree over jet coordinates: space variables z_i, components u_l,
/// and their derivatives D(u_l, j). Trees are immutable and shared.
struct JetExpr;
using ExprPtr = std::shared_ptr<const JetExpr>;

struct JetExpr {
    struct Const {
        Rational value;
    };
    struct SpaceVar {
        int index;
    };
    struct Jet {
        int component;  // 0-based
        MIndex order;   // |order| = 0 means the component itself
    };
    struct Add {
        std::vector<ExprPtr> children;
    };
    struct Mul {
        std::vector<ExprPtr> children;
    };
    struct Pow {
        ExprPtr base;
        unsigned exponent;
    };
    struct Inv {
        ExprPtr child;
    };
    struct Neg {
        ExprPtr child;
    };

    using Node = std::variant<Const, SpaceVar, Jet, Add, Mul, Pow, Inv, Neg>;
    Node node;
};

inline ExprPtr make_expr(JetExpr::Node n) {
    return std::make_shared<const JetExpr>(JetExpr{std::move(n)});
}

namespace detail {

struct Token {
    enum Kind { Number, Name, Plus, Minus, Star, Caret, LParen, RParen, LBracket, RBracket, Comma, Slash, End };
    Kind kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        const std::size_t p = i_;
        if (i_ >= src_.size()) {
            tok_ = {Token::End, "", p};
            return;
        }
        const char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
            tok_ = {Token::Number, src_.substr(i_, j - i_), p};
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            tok_ = {Token::Name, src_.substr(i_, j - i_), p};
            i_ = j;
            return;
        }
        Token::Kind k;
        switch (c) {
            case '+': k = Token::Plus; break;
            case '-': k = Token::Minus; break;
            case '*': k = Token::Star; break;
            case '^': k = Token::Caret; break;
            case '(': k = Token::LParen; break;
            case ')': k = Token::RParen; break;
            case '[': k = Token::LBracket; break;
            case ']': k = Token::RBracket; break;
            case ',': k = Token::Comma; break;
            case '/': k = Token::Slash; break;
            default:
                throw parse_error(std::string("unexpected character '") + c + "'", p);
        }
        tok_ = {k, std::string(1, c), p};
        ++i_;
    }

    const std::string& src_;
    std::size_t i_ = 0;
    Token tok_{Token::End, "", 0};
};

} // namespace detail

/// Name context for the parser: which identifiers are space variables and
/// which are components.
struct NameContext {
    std::vector<std::string> space_vars;
    std::vector<std::string> components;

    int nvars() const { return static_cast<int>(space_vars.size()); }

    std::optional<int> space_index(const std::string& n) const {
        for (std::size_t i = 0; i < space_vars.size(); ++i)
            if (space_vars[i] == n) return static_cast<int>(i);
        return std::nullopt;
    }
    std::optional<int> component_index(const std::string& n) const {
        for (std::size_t i = 0; i < components.size(); ++i)
            if (components[i] == n) return static_cast<int>(i);
        return std::nullopt;
    }
};

namespace detail {

class Parser {
public:
    Parser(const std::string& src, const NameContext& ctx) : lex_(src), ctx_(ctx) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        const Token& t = lex_.peek();
        if (t.kind != Token::End) throw parse_error("trailing input '" + t.text + "'", t.pos);
        return e;
    }

private:
    // expr := term (('+'|'-') term)*
    ExprPtr expr() {
        std::vector<ExprPtr> children{term()};
        while (lex_.peek().kind == Token::Plus || lex_.peek().kind == Token::Minus) {
            const Token op = lex_.next();
            ExprPtr t = term();
            children.push_back(op.kind == Token::Minus ? make_expr(JetExpr::Neg{t}) : t);
        }
        if (children.size() == 1) return children[0];
        return make_expr(JetExpr::Add{std::move(children)});
    }

    // term := factor ('*' factor)*
    ExprPtr term() {
        std::vector<ExprPtr> children{factor()};
        while (lex_.peek().kind == Token::Star) {
            lex_.next();
            children.push_back(factor());
        }
        if (children.size() == 1) return children[0];
        return make_expr(JetExpr::Mul{std::move(children)});
    }

    // factor := atom ('^' uint)?
    ExprPtr factor() {
        ExprPtr a = atom();
        if (lex_.peek().kind == Token::Caret) {
            lex_.next();
            return make_expr(JetExpr::Pow{a, uint_lit("exponent")});
        }
        return a;
    }

    // atom := rational | name | 'D(' name ',' '[' uint (',' uint)* ']' ')'
    //       | 'inv(' expr ')' | '(' expr ')' | '-' atom
    ExprPtr atom() {
        const Token t = lex_.peek();
        switch (t.kind) {
            case Token::Minus:
                lex_.next();
                return make_expr(JetExpr::Neg{atom()});
            case Token::LParen: {
                lex_.next();
                ExprPtr e = expr();
                expect(Token::RParen, ")");
                return e;
            }
            case Token::Number:
                return rational_lit();
            case Token::Name:
                return name_atom();
            default:
                throw parse_error("expected an atom, found '" + t.text + "'", t.pos);
        }
    }

    // rational := uint ('/' uint)?   (negative literals arrive via '-' atom)
    ExprPtr rational_lit() {
        const Token num = lex_.next();
        Rational v{Integer(num.text)};
        if (lex_.peek().kind == Token::Slash) {
            lex_.next();
            const Token den = expect(Token::Number, "denominator");
            const Integer d{den.text};
            if (d == 0) throw parse_error("zero denominator", den.pos);
            v /= d;
        }
        return make_expr(JetExpr::Const{v});
    }

    ExprPtr name_atom() {
        const Token name = lex_.next();
        if (name.text == "inv" && lex_.peek().kind == Token::LParen) {
            lex_.next();
            ExprPtr e = expr();
            expect(Token::RParen, ")");
            return make_expr(JetExpr::Inv{e});
        }
        if (name.text == "D" && lex_.peek().kind == Token::LParen) {
            lex_.next();
            const Token comp = expect(Token::Name, "component name");
            const auto ci = ctx_.component_index(comp.text);
            if (!ci) throw parse_error("unknown component '" + comp.text + "'", comp.pos);
            expect(Token::Comma, ",");
            expect(Token::LBracket, "[");
            MIndex order;
            order.push_back(uint_lit("derivative order"));
            while (lex_.peek().kind == Token::Comma) {
                lex_.next();
                order.push_back(uint_lit("derivative order"));
            }
            const Token rb = expect(Token::RBracket, "]");
            expect(Token::RParen, ")");
            if (static_cast<int>(order.size()) != ctx_.nvars())
                throw parse_error("derivative multi-index has " + std::to_string(order.size()) +
                                      " entries, expected " + std::to_string(ctx_.nvars()),
                                  rb.pos);
            return make_expr(JetExpr::Jet{*ci, std::move(order)});
        }
        if (auto si = ctx_.space_index(name.text))
            return make_expr(JetExpr::SpaceVar{*si});
        if (auto ci = ctx_.component_index(name.text))
            return make_expr(JetExpr::Jet{*ci, MIndex(static_cast<std::size_t>(ctx_.nvars()), 0u)});
        throw parse_error("unknown name '" + name.text + "'", name.pos);
    }

    unsigned uint_lit(const char* what) {
        const Token t = expect(Token::Number, what);
        try {
            const unsigned long v = std::stoul(t.text);
            if (v > 1u << 20) throw std::out_of_range(t.text);
            return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            throw parse_error(std::string(what) + " out of range: " + t.text, t.pos);
        }
    }

    detail::Token expect(detail::Token::Kind k, const char* what) {
        const Token t = lex_.next();
        if (t.kind != k)
            throw parse_error(std::string("expected ") + what + ", found '" +
                                  (t.kind == Token::End ? "end of input" : t.text) + "'",
                              t.pos);
        return t;
    }

    Lexer lex_;
    const NameContext& ctx_;
};

} // namespace detail

inline ExprPtr parse_expr(const std::string& text, const NameContext& ctx) {
    return detail::Parser(text, ctx).parse();
}

/// Canonical printer; parse(print(e)) reproduces the tree.
inline std::string print_expr(const JetExpr& e, const NameContext& ctx, int parent_prec = 0);

inline std::string print_expr(const ExprPtr& e, const NameContext& ctx, int parent_prec = 0) {
    return print_expr(*e, ctx, parent_prec);
}

inline std::string print_expr(const JetExpr& e, const NameContext& ctx, int parent_prec) {
    // precedence: Add 1, Mul 2, Neg 3, Pow 4, atoms 5
    std::string out;
    int prec = 5;
    if (const auto* c = std::get_if<JetExpr::Const>(&e.node)) {
        out = to_string(c->value);
        if (c->value < 0) prec = 3;
    } else if (const auto* v = std::get_if<JetExpr::SpaceVar>(&e.node)) {
        out = ctx.space_vars[static_cast<std::size_t>(v->index)];
    } else if (const auto* j = std::get_if<JetExpr::Jet>(&e.node)) {
        if (total_degree(j->order) == 0) {
            out = ctx.components[static_cast<std::size_t>(j->component)];
        } else {
            out = "D(" + ctx.components[static_cast<std::size_t>(j->component)] + ",[";
            for (std::size_t i = 0; i < j->order.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(j->order[i]);
            }
            out += "])";
        }
    } else if (const auto* a = std::get_if<JetExpr::Add>(&e.node)) {
        prec = 1;
        for (std::size_t i = 0; i < a->children.size(); ++i) {
            const auto& ch = a->children[i];
            if (i && std::holds_alternative<JetExpr::Neg>(ch->node)) {
                out += " - " + print_expr(std::get<JetExpr::Neg>(ch->node).child, ctx, 2);
            } else {
                if (i) out += " + ";
                out += print_expr(ch, ctx, 2);
            }
        }
    } else if (const auto* m = std::get_if<JetExpr::Mul>(&e.node)) {
        prec = 2;
        for (std::size_t i = 0; i < m->children.size(); ++i) {
            if (i) out += "*";
            out += print_expr(m->children[i], ctx, 4);
        }
    } else if (const auto* p = std::get_if<JetExpr::Pow>(&e.node)) {
        prec = 4;
        out = print_expr(p->base, ctx, 5) + "^" + std::to_string(p->exponent);
    } else if (const auto* inv = std::get_if<JetExpr::Inv>(&e.node)) {
        out = "inv(" + print_expr(inv->child, ctx, 0) + ")";
    } else if (const auto* n = std::get_if<JetExpr::Neg>(&e.node)) {
        prec = 3;
        out = "-" + print_expr(n->child, ctx, 5);
    }
    if (prec < parent_prec) return "(" + out + ")";
    return out;
}

/// max |j| over Jet nodes; 0 if none occur
inline unsigned max_jet_order(const JetExpr& e) {
    unsigned m = 0;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, JetExpr::Jet>) {
                m = total_degree(n.order);
            } else if constexpr (std::is_same_v<T, JetExpr::Add> ||
                                 std::is_same_v<T, JetExpr::Mul>) {
                for (const auto& c : n.children) m = std::max(m, max_jet_order(*c));
            } else if constexpr (std::is_same_v<T, JetExpr::Pow>) {
                m = max_jet_order(*n.base);
            } else if constexpr (std::is_same_v<T, JetExpr::Inv> ||
                                 std::is_same_v<T, JetExpr::Neg>) {
                m = max_jet_order(*n.child);
            }
        },
        e.node);
    return m;
}

/// Uniform jet degree of an expression: 0 for jet-free, 1 for linear
/// homogeneous in jets, etc. nullopt if terms mix degrees or a jet sits
/// under Inv (not polynomial in jets).
inline std::optional<unsigned> jet_degree(const JetExpr& e) {
    using R = std::optional<unsigned>;
    return std::visit(
        [&](const auto& n) -> R {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, JetExpr::Const> ||
                          std::is_same_v<T, JetExpr::SpaceVar>) {
                return 0u;
            } else if constexpr (std::is_same_v<T, JetExpr::Jet>) {
                return 1u;
            } else if constexpr (std::is_same_v<T, JetExpr::Add>) {
                R d = jet_degree(*n.children[0]);
                for (std::size_t i = 1; i < n.children.size(); ++i)
                    if (jet_degree(*n.children[i]) != d) return std::nullopt;
                return d;
            } else if constexpr (std::is_same_v<T, JetExpr::Mul>) {
                unsigned sum = 0;
                for (const auto& c : n.children) {
                    R d = jet_degree(*c);
                    if (!d) return std::nullopt;
                    sum += *d;
                }
                return sum;
            } else if constexpr (std::is_same_v<T, JetExpr::Pow>) {
                R d = jet_degree(*n.base);
                if (!d) return std::nullopt;
                return *d * n.exponent;
            } else if constexpr (std::is_same_v<T, JetExpr::Inv>) {
                R d = jet_degree(*n.child);
                if (d && *d == 0) return 0u;
                return std::nullopt;
            } else {
                return jet_degree(*n.child);  // Neg
            }
        },
        e.node);
}

/// Evaluate an expression in a ring R given an environment.
/// Env must provide: R constant(Rational), R space_var(int), R jet(int, MIndex).
template <class R, class Env>
R eval_expr(const JetExpr& e, const Env& env) {
    return std::visit(
        [&](const auto& n) -> R {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, JetExpr::Const>) {
                return env.constant(n.value);
            } else if constexpr (std::is_same_v<T, JetExpr::SpaceVar>) {
                return env.space_var(n.index);
            } else if constexpr (std::is_same_v<T, JetExpr::Jet>) {
                return env.jet(n.component, n.order);
            } else if constexpr (std::is_same_v<T, JetExpr::Add>) {
                R acc = eval_expr<R>(*n.children[0], env);
                for (std::size_t i = 1; i < n.children.size(); ++i)
                    acc = add(acc, eval_expr<R>(*n.children[i], env));
                return acc;
            } else if constexpr (std::is_same_v<T, JetExpr::Mul>) {
                R acc = eval_expr<R>(*n.children[0], env);
                for (std::size_t i = 1; i < n.children.size(); ++i)
                    acc = mul(acc, eval_expr<R>(*n.children[i], env));
                return acc;
            } else if constexpr (std::is_same_v<T, JetExpr::Pow>) {
                return pow(eval_expr<R>(*n.base, env), n.exponent);
            } else if constexpr (std::is_same_v<T, JetExpr::Inv>) {
                return invert(eval_expr<R>(*n.child, env));
            } else {
                return negate(eval_expr<R>(*n.child, env));  // Neg
            }
        },
        e.node);
}

/// Environment over plain space series: jets are derivatives of the given
/// components. Requests beyond the truncation budget are an error.
struct SeriesEnv {
    const VSeries& u;

    MSeries constant(const Rational& c) const {
        return MSeries::constant(u.nvars(), u.trunc_deg(), c);
    }
    MSeries space_var(int i) const { return MSeries::variable(u.nvars(), u.trunc_deg(), i); }
    MSeries jet(int comp, const MIndex& order) const {
        if (comp < 0 || comp >= u.size()) throw structure_error("component index out of range");
        const MSeries& base = u.components[static_cast<std::size_t>(comp)];
        if (static_cast<int>(total_degree(order)) > base.trunc_deg())
            throw truncation_error("truncation budget exhausted: derivative order " +
                                   std::to_string(total_degree(order)) + " exceeds degree " +
                                   std::to_string(base.trunc_deg()));
        return derive(base, order);
    }
};

inline MSeries eval_field(const JetExpr& e, const VSeries& u) {
    return eval_expr<MSeries>(e, SeriesEnv{u});
}

inline MSeries eval_field(const ExprPtr& e, const VSeries& u) { return eval_field(*e, u); }

/// Environment carrying t formally: jets act coefficientwise on truncated
/// t-polynomials whose entries are the partial flow coefficients.
struct TScalarEnv {
    const std::vector<std::vector<MSeries>>& partial;  // [component][t-order]
    int nvars;
    int trunc_deg;  // z-truncation used for constants and space variables
    int cap;        // t-order cap for the evaluation

    TScalar constant(const Rational& c) const {
        return TScalar::from_const(MSeries::constant(nvars, trunc_deg, c), cap);
    }
    TScalar space_var(int i) const {
        return TScalar::from_const(MSeries::variable(nvars, trunc_deg, i), cap);
    }
    TScalar jet(int comp, const MIndex& order) const {
        if (comp < 0 || comp >= static_cast<int>(partial.size()))
            throw structure_error("component index out of range");
        const auto& coeffs = partial[static_cast<std::size_t>(comp)];
        std::vector<MSeries> taken;
        const int n = std::min<int>(static_cast<int>(coeffs.size()), cap + 1);
        taken.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const MSeries& base = coeffs[static_cast<std::size_t>(k)];
            if (static_cast<int>(total_degree(order)) > base.trunc_deg())
                throw truncation_error(
                    "truncation budget exhausted while differentiating flow coefficient t^" +
                    std::to_string(k));
            taken.push_back(derive(base, order));
        }
        return TScalar(std::move(taken), cap);
    }
};

} // namespace gevrey
