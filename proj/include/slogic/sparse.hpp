#pragma once
// Boolean sparse matrices in CSR form. Pattern-only: an entry either exists
// or it does not, which is exactly the entity-pair semantics the rule
// statistics are defined over. Walk counting uses a separate integer
// semiring on sparse vectors (see count_propagate).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "slogic/types.hpp"

namespace slogic {

class CsrBool {
public:
    CsrBool() = default;
    CsrBool(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

    // Builds from (row, col) pairs; duplicates collapse.
    static CsrBool from_pairs(int rows, int cols, std::vector<std::pair<EntityId, EntityId>> pairs);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::int64_t nnz() const { return static_cast<std::int64_t>(col_.size()); }

    std::span<const EntityId> row(int i) const {
        return {col_.data() + row_ptr_[static_cast<std::size_t>(i)],
                col_.data() + row_ptr_[static_cast<std::size_t>(i) + 1]};
    }

    bool has(int i, int j) const;

    CsrBool transpose() const;

    // Boolean product: nonzero pattern of this * other.
    CsrBool multiply(const CsrBool& other) const;

    // nnz of the elementwise conjunction with other (same shape).
    std::int64_t and_count(const CsrBool& other) const;

    bool pattern_equals(const CsrBool& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ && col_ == other.col_;
    }

    const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
    const std::vector<EntityId>& col_idx() const { return col_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::int64_t> row_ptr_{0};
    std::vector<EntityId> col_;  // sorted within each row
};

// Reusable scratch for frontier propagation, sized to the entity count.
struct SparseScratch {
    std::vector<char> mark;
    std::vector<std::int64_t> count;

    void ensure(std::size_t n) {
        if (mark.size() < n) mark.assign(n, 0);
        if (count.size() < n) count.assign(n, 0);
    }
};

// One boolean step: targets reachable from `frontier` via `adj`, excluding
// the single directed edge (masked_src, masked_dst) when masked_src >= 0.
// Output is sorted and duplicate-free.
std::vector<EntityId> bool_propagate(const CsrBool& adj, std::span<const EntityId> frontier, SparseScratch& scratch,
                                     EntityId masked_src = -1, EntityId masked_dst = -1);

// One counting step over the same structure. Entries of `frontier` are
// (entity, walk count); counts saturate at `cap`.
std::vector<std::pair<EntityId, std::int64_t>> count_propagate(const CsrBool& adj,
                                                               std::span<const std::pair<EntityId, std::int64_t>> frontier,
                                                               std::int64_t cap, SparseScratch& scratch);

}  // namespace slogic
