#include "ppf/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <functional>

namespace ppf {

std::int64_t Atom::dot(const Valuation& v) const {
    std::int64_t s = 0;
    for (const auto& [x, c] : coeffs) {
        auto it = v.find(x);
        if (it != v.end()) s += c * it->second;
    }
    return s;
}

std::int64_t Atom::coeff(const std::string& var) const {
    auto it = coeffs.find(var);
    return it == coeffs.end() ? 0 : it->second;
}

NodePtr leaf(Atom a) {
    auto n = std::make_shared<Node>();
    n->atom = std::move(a);
    return n;
}

static NodePtr binary(Node::Op op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

NodePtr make_and(NodePtr l, NodePtr r) { return binary(Node::Op::And, std::move(l), std::move(r)); }
NodePtr make_or(NodePtr l, NodePtr r) { return binary(Node::Op::Or, std::move(l), std::move(r)); }
NodePtr make_not(NodePtr n) { return binary(Node::Op::Not, std::move(n), nullptr); }

ParseError::ParseError(const std::string& what, std::size_t pos)
    : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

int bit_length(std::uint64_t v) {
    int n = 0;
    while (v) {
        ++n;
        v >>= 1;
    }
    return n;
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Formula run() {
        Formula f;
        f.root = expr();
        skip();
        if (p_ != s_.size()) fail("unexpected input");
        f.vars = vars_;
        return f;
    }

private:
    const std::string& s_;
    std::size_t p_ = 0;
    std::vector<std::string> vars_;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, p_); }

    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool peek(char c) {
        skip();
        return p_ < s_.size() && s_[p_] == c;
    }

    bool eat(char c) {
        if (!peek(c)) return false;
        ++p_;
        return true;
    }

    bool eat_word(const char* w) {
        skip();
        std::size_t n = std::char_traits<char>::length(w);
        if (s_.compare(p_, n, w) != 0) return false;
        if (p_ + n < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_ + n])) || s_[p_ + n] == '_'))
            return false;
        p_ += n;
        return true;
    }

    bool at_int() {
        skip();
        std::size_t q = p_;
        if (q < s_.size() && s_[q] == '-') ++q;
        return q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]));
    }

    bool at_ident() {
        skip();
        return p_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_');
    }

    std::int64_t integer() {
        skip();
        std::size_t start = p_;
        if (p_ < s_.size() && s_[p_] == '-') ++p_;
        std::size_t digits = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        if (p_ == digits) {
            p_ = start;
            fail("expected integer");
        }
        errno = 0;
        long long v = std::strtoll(s_.c_str() + start, nullptr, 10);
        if (errno == ERANGE) {
            p_ = start;
            fail("integer out of range");
        }
        return v;
    }

    std::string ident() {
        if (!at_ident()) fail("expected variable");
        std::size_t start = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
        std::string name = s_.substr(start, p_ - start);
        if (name == "mod") {
            p_ = start;
            fail("'mod' is reserved");
        }
        if (std::find(vars_.begin(), vars_.end(), name) == vars_.end()) vars_.push_back(name);
        return name;
    }

    NodePtr expr() {
        NodePtr n = term();
        for (;;) {
            if (eat('&'))
                n = make_and(n, term());
            else if (eat('|'))
                n = make_or(n, term());
            else
                return n;
        }
    }

    NodePtr term() {
        if (eat('!')) return make_not(term());
        if (eat('(')) {
            NodePtr n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        return leaf(atom());
    }

    void summand(Atom& a, std::int64_t sign) {
        std::int64_t c = 1;
        if (at_int()) {
            c = integer();
            if (!eat('*')) fail("expected '*'");
        }
        std::string x = ident();
        a.coeffs[x] += sign * c;
    }

    std::int64_t modulus() {
        if (!eat('(')) fail("expected '(mod'");
        if (!eat_word("mod")) fail("expected 'mod'");
        std::size_t at = p_;
        std::int64_t m = integer();
        if (m < 2) {
            p_ = at;
            fail("modulus must be at least 2");
        }
        if (!eat(')')) fail("expected ')'");
        return m;
    }

    Atom atom() {
        Atom a;
        std::int64_t sign = eat('-') ? -1 : 1;
        summand(a, sign);
        for (;;) {
            if (eat('+'))
                summand(a, 1);
            else if (eat('-')) {
                summand(a, -1);
            } else
                break;
        }
        skip();
        if (eat('=')) {
            a.kind = AtomKind::Congruent;
            a.bound = integer();
            a.modulus = modulus();
            return a;
        }
        if (!eat('>')) fail("expected relation");
        bool ge = eat('=');
        a.bound = integer();
        if (peek('(')) {
            std::size_t save = p_;
            ++p_;
            if (eat_word("mod")) {
                p_ = save;
                a.modulus = modulus();
                a.kind = AtomKind::ModAtLeast;
                if (!ge) a.bound += 1;
                return a;
            }
            p_ = save;
        }
        a.kind = AtomKind::Greater;
        if (ge) a.bound -= 1;
        return a;
    }

};

}  // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

Formula atomic(Atom a, std::vector<std::string> vars) {
    for (const auto& [x, c] : a.coeffs)
        if (std::find(vars.begin(), vars.end(), x) == vars.end()) vars.push_back(x);
    return Formula{leaf(std::move(a)), std::move(vars)};
}

bool eval_atom(const Atom& a, const Valuation& v) {
    std::int64_t s = a.dot(v);
    switch (a.kind) {
        case AtomKind::Greater: return s > a.bound;
        case AtomKind::AtLeast: return s >= a.bound;
        case AtomKind::Congruent: return floor_mod(s - a.bound, a.modulus) == 0;
        case AtomKind::ModAtLeast: return floor_mod(s, a.modulus) >= a.bound;
    }
    return false;
}

bool eval_node(const Node& n, const Valuation& v) {
    switch (n.op) {
        case Node::Op::Leaf: return eval_atom(n.atom, v);
        case Node::Op::And: return eval_node(*n.lhs, v) && eval_node(*n.rhs, v);
        case Node::Op::Or: return eval_node(*n.lhs, v) || eval_node(*n.rhs, v);
        case Node::Op::Not: return !eval_node(*n.lhs, v);
    }
    return false;
}

bool evaluate(const Formula& f, const Valuation& v) { return eval_node(*f.root, v); }

std::string to_string(const Atom& a) {
    std::string s;
    bool first = true;
    for (const auto& [x, c] : a.coeffs) {
        std::int64_t mag = c < 0 ? -c : c;
        if (first)
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        first = false;
        if (mag != 1) s += std::to_string(mag) + "*";
        s += x;
    }
    if (first) s = "0*_";
    switch (a.kind) {
        case AtomKind::Greater: return s + " > " + std::to_string(a.bound);
        case AtomKind::AtLeast: return s + " >= " + std::to_string(a.bound);
        case AtomKind::Congruent:
            return s + " = " + std::to_string(a.bound) + " (mod " + std::to_string(a.modulus) + ")";
        case AtomKind::ModAtLeast:
            return s + " >= " + std::to_string(a.bound) + " (mod " + std::to_string(a.modulus) + ")";
    }
    return s;
}

std::string to_string(const Node& n) {
    switch (n.op) {
        case Node::Op::Leaf: return to_string(n.atom);
        case Node::Op::And: return "(" + to_string(*n.lhs) + " & " + to_string(*n.rhs) + ")";
        case Node::Op::Or: return "(" + to_string(*n.lhs) + " | " + to_string(*n.rhs) + ")";
        case Node::Op::Not: return "!" + (n.lhs->op == Node::Op::Leaf ? "(" + to_string(*n.lhs) + ")" : to_string(*n.lhs));
    }
    return {};
}

std::string to_string(const Formula& f) { return to_string(*f.root); }

NormalizedThreshold normalize_threshold(const Atom& a) {
    NormalizedThreshold r;
    r.atom.kind = AtomKind::AtLeast;
    std::int64_t b = a.kind == AtomKind::AtLeast ? a.bound - 1 : a.bound;
    if (b + 1 > 0) {
        r.atom.coeffs = a.coeffs;
        r.atom.bound = b + 1;
    } else {
        // a.v > b  <=>  not(-a.v >= -b)
        for (const auto& [x, c] : a.coeffs) r.atom.coeffs[x] = -c;
        r.atom.bound = -b;
        r.negated = true;
    }
    return r;
}

Formula normalize_remainder(const Atom& a, const std::vector<std::string>& vars) {
    if (a.modulus < 2) throw std::invalid_argument("modulus must be at least 2");
    Atom base;
    base.kind = AtomKind::ModAtLeast;
    base.modulus = a.modulus;
    for (const auto& [x, c] : a.coeffs) base.coeffs[x] = floor_mod(c, a.modulus);
    std::int64_t b = floor_mod(a.bound, a.modulus);
    Formula f;
    f.vars = vars;
    if (f.vars.empty())
        for (const auto& [x, c] : a.coeffs) f.vars.push_back(x);
    if (b == 0) {
        base.bound = 1;
        f.root = make_not(leaf(base));
        return f;
    }
    base.bound = b;
    if (b + 1 == a.modulus) {
        f.root = leaf(base);
        return f;
    }
    Atom upper = base;
    upper.bound = b + 1;
    f.root = make_and(leaf(base), make_not(leaf(upper)));
    return f;
}

static NodePtr normalize_node(const NodePtr& n, const std::vector<std::string>& vars) {
    switch (n->op) {
        case Node::Op::Leaf: {
            const Atom& a = n->atom;
            if (a.kind == AtomKind::Greater || a.kind == AtomKind::AtLeast) {
                auto r = normalize_threshold(a);
                return r.negated ? make_not(leaf(r.atom)) : leaf(r.atom);
            }
            if (a.kind == AtomKind::Congruent) return normalize_remainder(a, vars).root;
            // ModAtLeast: reduce coefficients, then fold trivial bounds.
            Atom m = a;
            for (auto& [x, c] : m.coeffs) c = floor_mod(c, m.modulus);
            if (m.bound <= 0 || m.bound >= m.modulus) {
                // (a.v mod m) >= b is constant; express it through an equivalent congruence pair.
                Atom t;
                t.kind = AtomKind::ModAtLeast;
                t.modulus = m.modulus;
                t.coeffs = m.coeffs;
                t.bound = 1;
                NodePtr any = make_or(leaf(t), make_not(leaf(t)));
                return m.bound <= 0 ? any : make_not(any);
            }
            return leaf(m);
        }
        case Node::Op::And: return make_and(normalize_node(n->lhs, vars), normalize_node(n->rhs, vars));
        case Node::Op::Or: return make_or(normalize_node(n->lhs, vars), normalize_node(n->rhs, vars));
        case Node::Op::Not: return make_not(normalize_node(n->lhs, vars));
    }
    return n;
}

Formula normalize(const Formula& f) { return Formula{normalize_node(f.root, f.vars), f.vars}; }

static void collect(const Node& n, std::vector<Atom>& out) {
    if (n.op == Node::Op::Leaf) {
        out.push_back(n.atom);
        return;
    }
    collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
}

std::vector<Atom> leaves(const Node& n) {
    std::vector<Atom> out;
    collect(n, out);
    return out;
}

static int connectives(const Node& n) {
    if (n.op == Node::Op::Leaf) return 0;
    return 1 + connectives(*n.lhs) + (n.rhs ? connectives(*n.rhs) : 0);
}

Metrics metrics(const Formula& f) {
    Metrics m;
    for (const Atom& a : leaves(*f.root)) {
        ++m.atom_count;
        for (const auto& [x, c] : a.coeffs) m.norm = std::max(m.norm, c < 0 ? -c : c);
        m.norm = std::max(m.norm, a.bound < 0 ? -a.bound : a.bound);
        m.norm = std::max(m.norm, a.modulus);
    }
    m.len = connectives(*f.root);
    m.var_count = static_cast<int>(f.vars.size());
    m.bitlength = m.len + bit_length(static_cast<std::uint64_t>(m.norm)) + m.var_count;
    return m;
}

}  // namespace ppf
