#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace ppf {

using Sid = std::uint32_t;

// Sorted by state id, all counts positive.
using Multiset = std::vector<std::pair<Sid, std::uint32_t>>;
using Config = Multiset;

Multiset ms_of(std::vector<Sid> items);
Multiset ms_add(const Multiset& a, const Multiset& b);
// Requires b <= a.
Multiset ms_sub(const Multiset& a, const Multiset& b);
bool ms_leq(const Multiset& a, const Multiset& b);
std::uint32_t ms_count(const Multiset& m, Sid s);
std::size_t ms_size(const Multiset& m);
void ms_insert(Multiset& m, Sid s, std::uint32_t n = 1);
std::vector<Sid> ms_items(const Multiset& m);

struct MultisetHash {
    std::size_t operator()(const Multiset& m) const noexcept;
};

}  // namespace ppf
