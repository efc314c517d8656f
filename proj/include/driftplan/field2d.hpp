#pragma once

#include <cassert>
#include <vector>

namespace driftplan {

/// Dense row-major scalar grid. Index (row, col) with row 0 at the south edge.
class Field2d {
public:
    Field2d() = default;
    Field2d(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
        assert(rows >= 0 && cols >= 0);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& operator()(int row, int col) {
        assert(row >= 0 && row < rows_ && col >= 0 && col < cols_);
        return data_[static_cast<size_t>(row) * cols_ + col];
    }
    double operator()(int row, int col) const {
        assert(row >= 0 && row < rows_ && col >= 0 && col < cols_);
        return data_[static_cast<size_t>(row) * cols_ + col];
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Field2d& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Field2d& a, const Field2d& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace driftplan
