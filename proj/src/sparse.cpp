#include "slogic/sparse.hpp"

#include <algorithm>

namespace slogic {

CsrBool CsrBool::from_pairs(int rows, int cols, std::vector<std::pair<EntityId, EntityId>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    CsrBool m(rows, cols);
    m.col_.reserve(pairs.size());
    std::size_t p = 0;
    for (int r = 0; r < rows; ++r) {
        while (p < pairs.size() && pairs[p].first == r) {
            m.col_.push_back(pairs[p].second);
            ++p;
        }
        m.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(m.col_.size());
    }
    return m;
}

bool CsrBool::has(int i, int j) const {
    const auto r = row(i);
    return std::binary_search(r.begin(), r.end(), static_cast<EntityId>(j));
}

CsrBool CsrBool::transpose() const {
    std::vector<std::pair<EntityId, EntityId>> pairs;
    pairs.reserve(col_.size());
    for (int r = 0; r < rows_; ++r) {
        for (EntityId c : row(r)) pairs.emplace_back(c, static_cast<EntityId>(r));
    }
    return from_pairs(cols_, rows_, std::move(pairs));
}

CsrBool CsrBool::multiply(const CsrBool& other) const {
    CsrBool out(rows_, other.cols_);
    std::vector<char> mark(static_cast<std::size_t>(other.cols_), 0);
    std::vector<EntityId> touched;
    for (int r = 0; r < rows_; ++r) {
        touched.clear();
        for (EntityId j : row(r)) {
            for (EntityId k : other.row(j)) {
                if (!mark[static_cast<std::size_t>(k)]) {
                    mark[static_cast<std::size_t>(k)] = 1;
                    touched.push_back(k);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (EntityId k : touched) {
            out.col_.push_back(k);
            mark[static_cast<std::size_t>(k)] = 0;
        }
        out.row_ptr_[static_cast<std::size_t>(r) + 1] = static_cast<std::int64_t>(out.col_.size());
    }
    return out;
}

std::int64_t CsrBool::and_count(const CsrBool& other) const {
    std::int64_t n = 0;
    for (int r = 0; r < rows_; ++r) {
        const auto a = row(r);
        const auto b = other.row(r);
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) {
                ++i;
            } else if (b[j] < a[i]) {
                ++j;
            } else {
                ++n;
                ++i;
                ++j;
            }
        }
    }
    return n;
}

std::vector<EntityId> bool_propagate(const CsrBool& adj, std::span<const EntityId> frontier, SparseScratch& scratch,
                                     EntityId masked_src, EntityId masked_dst) {
    scratch.ensure(static_cast<std::size_t>(adj.cols()));
    std::vector<EntityId> out;
    for (EntityId v : frontier) {
        for (EntityId u : adj.row(v)) {
            if (v == masked_src && u == masked_dst) continue;
            if (!scratch.mark[static_cast<std::size_t>(u)]) {
                scratch.mark[static_cast<std::size_t>(u)] = 1;
                out.push_back(u);
            }
        }
    }
    for (EntityId u : out) scratch.mark[static_cast<std::size_t>(u)] = 0;
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<EntityId, std::int64_t>> count_propagate(const CsrBool& adj,
                                                               std::span<const std::pair<EntityId, std::int64_t>> frontier,
                                                               std::int64_t cap, SparseScratch& scratch) {
    scratch.ensure(static_cast<std::size_t>(adj.cols()));
    std::vector<EntityId> touched;
    for (const auto& [v, c] : frontier) {
        for (EntityId u : adj.row(v)) {
            auto& acc = scratch.count[static_cast<std::size_t>(u)];
            if (acc == 0) touched.push_back(u);
            acc = std::min<std::int64_t>(acc + c, cap);
        }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<std::pair<EntityId, std::int64_t>> out;
    out.reserve(touched.size());
    for (EntityId u : touched) {
        out.emplace_back(u, scratch.count[static_cast<std::size_t>(u)]);
        scratch.count[static_cast<std::size_t>(u)] = 0;
    }
    return out;
}

}  // namespace slogic
