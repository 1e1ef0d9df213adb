#include "ppf/multiset.hpp"

#include <algorithm>

namespace ppf {

Multiset ms_of(std::vector<Sid> items) {
    std::sort(items.begin(), items.end());
    Multiset m;
    for (Sid s : items) {
        if (!m.empty() && m.back().first == s)
            ++m.back().second;
        else
            m.emplace_back(s, 1);
    }
    return m;
}

Multiset ms_add(const Multiset& a, const Multiset& b) {
    Multiset r;
    r.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
            r.push_back(a[i++]);
        else if (i == a.size() || b[j].first < a[i].first)
            r.push_back(b[j++]);
        else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return r;
}

Multiset ms_sub(const Multiset& a, const Multiset& b) {
    Multiset r;
    r.reserve(a.size());
    std::size_t j = 0;
    for (const auto& [s, c] : a) {
        std::uint32_t d = 0;
        if (j < b.size() && b[j].first == s) d = b[j++].second;
        if (c > d) r.emplace_back(s, c - d);
    }
    return r;
}

bool ms_leq(const Multiset& a, const Multiset& b) {
    std::size_t j = 0;
    for (const auto& [s, c] : a) {
        while (j < b.size() && b[j].first < s) ++j;
        if (j == b.size() || b[j].first != s || b[j].second < c) return false;
    }
    return true;
}

std::uint32_t ms_count(const Multiset& m, Sid s) {
    auto it = std::lower_bound(m.begin(), m.end(), s, [](const auto& p, Sid v) { return p.first < v; });
    return it != m.end() && it->first == s ? it->second : 0;
}

std::size_t ms_size(const Multiset& m) {
    std::size_t n = 0;
    for (const auto& p : m) n += p.second;
    return n;
}

void ms_insert(Multiset& m, Sid s, std::uint32_t n) {
    if (n == 0) return;
    auto it = std::lower_bound(m.begin(), m.end(), s, [](const auto& p, Sid v) { return p.first < v; });
    if (it != m.end() && it->first == s)
        it->second += n;
    else
        m.insert(it, {s, n});
}

std::vector<Sid> ms_items(const Multiset& m) {
    std::vector<Sid> v;
    for (const auto& [s, c] : m) v.insert(v.end(), c, s);
    return v;
}

std::size_t MultisetHash::operator()(const Multiset& m) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [s, c] : m) {
        h ^= (static_cast<std::uint64_t>(s) << 20) ^ c;
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

}  // namespace ppf
