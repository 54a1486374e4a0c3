#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eccw {

// Dense GF(2) matrix, row major. Sizes here stay small (n <= a few hundred),
// so one byte per entry beats bit packing on simplicity with no real cost.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols) : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::uint8_t& at(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
    std::uint8_t at(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

    const std::uint8_t* row(int r) const { return v_.data() + static_cast<size_t>(r) * cols_; }
    std::uint8_t* row(int r) { return v_.data() + static_cast<size_t>(r) * cols_; }

    bool operator==(const BitMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_; }

    long ones() const;
    int row_weight(int r) const;
    int col_weight(int c) const;

    BitMatrix transposed() const;

    // product over GF(2); inner dimensions must agree
    friend BitMatrix gf2_mul(const BitMatrix& a, const BitMatrix& b);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<std::uint8_t> v_;
};

int gf2_rank(const BitMatrix& m);

// y = M x over GF(2), x given as 0/1 bytes
std::vector<std::uint8_t> gf2_mat_vec(const BitMatrix& m, const std::vector<std::uint8_t>& x);

// Thrown by the file readers; message carries file name, line and reason.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// MacKay alist format. Header: "cols rows", then max column/row degree,
// the per-column and per-row degree lists, then 1-indexed position lists
// (column blocks first). Zero entries are padding and are skipped, but each
// block must contain exactly as many nonzero positions as its declared
// degree, and the column and row lists must describe the same matrix.
BitMatrix parse_alist(const std::string& text, const std::string& source_name = "alist");
std::string emit_alist(const BitMatrix& m);

// Plain text: one matrix row per line of space separated 0/1 tokens.
BitMatrix parse_pcm_text(const std::string& text, const std::string& source_name = "pcm");

// Dispatches on extension: .alist -> alist, anything else -> plain text.
BitMatrix load_pcm(const std::string& path);

} // namespace eccw
