#include "ppf/fixtures.hpp"

#include <stdexcept>

namespace ppf {

namespace {

void check_n(int n) {
    if (n < 1 || n > 20) throw std::invalid_argument("fixture size n must be in 1..20");
}

}  // namespace

Protocol fixture_pn(int n) {
    check_n(n);
    const int top = 1 << n;
    Protocol p;
    p.flavor = Flavor::FullOutput;
    for (int a = 0; a <= top; ++a) p.add_state(std::to_string(a), a == top ? 1 : 0);
    p.add_var("x", p.at("1"));
    for (int a = 0; a <= top; ++a)
        for (int b = a; b <= top; ++b) {
            const int s = a + b;
            auto pre = ms_of({Sid(a), Sid(b)});
            auto post = s < top ? ms_of({0, Sid(s)}) : ms_of({Sid(top), Sid(top)});
            p.add(pre, post, "add_" + std::to_string(a) + "_" + std::to_string(b));
        }
    return p;
}

Protocol fixture_ppn(int n) {
    check_n(n);
    Protocol p;
    p.flavor = Flavor::FullOutput;
    const std::string top = std::to_string(1 << n);
    p.add_state("0", 0);
    for (int i = 0; i <= n; ++i) p.add_state(std::to_string(1 << i), i == n ? 1 : 0);
    p.add_var("x", p.at("1"));
    for (int i = 0; i < n; ++i) {
        auto v = std::to_string(1 << i);
        p.add({v, v}, {"0", std::to_string(1 << (i + 1))}, "up_" + std::to_string(i));
    }
    for (const auto& a : std::vector<std::string>(p.states))
        p.add({a, top}, {top, top}, "fill_" + a);
    return p;
}

}  // namespace ppf
