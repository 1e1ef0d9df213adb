#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ppf {

using Valuation = std::map<std::string, std::int64_t>;

// Greater: a.v > b.  AtLeast: a.v >= b (normalized form).
// Congruent: a.v = b (mod m).  ModAtLeast: (a.v mod m) >= b.
enum class AtomKind { Greater, AtLeast, Congruent, ModAtLeast };

struct Atom {
    AtomKind kind = AtomKind::Greater;
    std::map<std::string, std::int64_t> coeffs;
    std::int64_t bound = 0;
    std::int64_t modulus = 0;

    bool operator==(const Atom&) const = default;
    auto operator<=>(const Atom&) const = default;

    std::int64_t dot(const Valuation& v) const;
    std::int64_t coeff(const std::string& var) const;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Op { Leaf, And, Or, Not };
    Op op = Op::Leaf;
    Atom atom;
    NodePtr lhs, rhs;
};

NodePtr leaf(Atom a);
NodePtr make_and(NodePtr l, NodePtr r);
NodePtr make_or(NodePtr l, NodePtr r);
NodePtr make_not(NodePtr n);

struct Formula {
    NodePtr root;
    std::vector<std::string> vars;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos);
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

Formula parse(const std::string& text);
Formula atomic(Atom a, std::vector<std::string> vars = {});

bool eval_atom(const Atom& a, const Valuation& v);
bool eval_node(const Node& n, const Valuation& v);
bool evaluate(const Formula& f, const Valuation& v);

std::string to_string(const Atom& a);
std::string to_string(const Node& n);
std::string to_string(const Formula& f);

struct NormalizedThreshold {
    Atom atom;  // AtLeast with bound > 0
    bool negated = false;
};

NormalizedThreshold normalize_threshold(const Atom& a);
Formula normalize_remainder(const Atom& a, const std::vector<std::string>& vars = {});

// Rewrites every atom into AtLeast (bound > 0) or ModAtLeast (0 < bound < m)
// atoms under boolean connectives.
Formula normalize(const Formula& f);

struct Metrics {
    std::int64_t norm = 0;
    int len = 0;
    int bitlength = 0;
    int var_count = 0;
    int atom_count = 0;
};

Metrics metrics(const Formula& f);

std::vector<Atom> leaves(const Node& n);
int bit_length(std::uint64_t v);
std::int64_t floor_mod(std::int64_t a, std::int64_t m);

}  // namespace ppf
