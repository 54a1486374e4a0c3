#include "eccw/code.hpp"

#include <algorithm>

namespace eccw {

LinearCode make_code(std::string name, const BitMatrix& H, RedundantRows policy) {
    const int n = H.cols();
    const int m = H.rows();
    if (n <= 0 || m <= 0 || m >= n) throw CodeError(name + ": need 0 < rows < cols, got " +
                                                    std::to_string(m) + "x" + std::to_string(n));

    // Row-reduce a copy, remembering pivot columns and which original rows
    // survive. Row swaps track origins so dropped rows can be reported.
    BitMatrix w = H;
    std::vector<int> origin(m);
    for (int r = 0; r < m; ++r) origin[r] = r;
    std::vector<int> pivot_cols;
    int rank = 0;
    for (int c = 0; c < n && rank < m; ++c) {
        int piv = -1;
        for (int r = rank; r < m; ++r)
            if (w.at(r, c)) { piv = r; break; }
        if (piv < 0) continue;
        if (piv != rank) {
            for (int j = 0; j < n; ++j) std::swap(w.at(piv, j), w.at(rank, j));
            std::swap(origin[piv], origin[rank]);
        }
        for (int r = 0; r < m; ++r)
            if (r != rank && w.at(r, c))
                for (int j = 0; j < n; ++j) w.at(r, j) ^= w.at(rank, j);
        pivot_cols.push_back(c);
        ++rank;
    }

    if (rank < m && policy == RedundantRows::reject) {
        throw CodeError(name + ": H has rank " + std::to_string(rank) + " but " + std::to_string(m) +
                        " rows; rerun with the drop-redundant-rows option to discard dependent rows");
    }

    LinearCode code;
    code.name = std::move(name);
    code.n = n;
    code.k = n - rank;

    if (rank == m) {
        code.H = H;
    } else {
        // Keep the original rows whose images became pivots, in their
        // original order. Rows reduced to zero are the dependent ones.
        std::vector<int> keep(origin.begin(), origin.begin() + rank);
        std::sort(keep.begin(), keep.end());
        code.H = BitMatrix(rank, n);
        for (int r = 0; r < rank; ++r)
            for (int c = 0; c < n; ++c) code.H.at(r, c) = H.at(keep[r], c);
    }

    // w now holds RREF(H): identity on pivot columns. With F the free columns,
    // H is row-equivalent to [I | A] on (P, F), so G on (P, F) is [A^T | I_k].
    std::vector<std::uint8_t> is_pivot(n, 0);
    for (int c : pivot_cols) is_pivot[c] = 1;
    std::vector<int> free_cols;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);

    code.G = BitMatrix(code.k, n);
    for (int i = 0; i < code.k; ++i) {
        code.G.at(i, free_cols[i]) = 1;
        for (int r = 0; r < rank; ++r) code.G.at(i, pivot_cols[r]) = w.at(r, free_cols[i]);
    }

    code.col_perm = pivot_cols;
    code.col_perm.insert(code.col_perm.end(), free_cols.begin(), free_cols.end());

    // cheap structural self-check: every generator row must satisfy H
    for (int i = 0; i < code.k; ++i) {
        HardWord row(code.G.row(i), code.G.row(i) + n);
        if (!is_zero(syndrome(code.H, row)))
            throw CodeError(code.name + ": internal error, generator row violates H");
    }
    return code;
}

LinearCode load_code(const std::string& path, RedundantRows policy) {
    BitMatrix H = load_pcm(path);
    auto slash = path.find_last_of("/\\");
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return make_code(stem, H, policy);
}

HardWord encode(const LinearCode& code, const HardWord& message) {
    if (static_cast<int>(message.size()) != code.k)
        throw CodeError(code.name + ": message length " + std::to_string(message.size()) +
                        ", expected k=" + std::to_string(code.k));
    HardWord x(code.n, 0);
    for (int i = 0; i < code.k; ++i)
        if (message[i]) {
            const std::uint8_t* row = code.G.row(i);
            for (int c = 0; c < code.n; ++c) x[c] ^= row[c];
        }
    return x;
}

HardWord syndrome(const BitMatrix& H, const HardWord& word) {
    if (static_cast<int>(word.size()) != H.cols())
        throw CodeError("syndrome: word length " + std::to_string(word.size()) + ", expected " +
                        std::to_string(H.cols()));
    return gf2_mat_vec(H, word);
}

HardWord hard_decision(const std::vector<double>& y) {
    HardWord out(y.size());
    for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] < 0.0 ? 1 : 0;
    return out;
}

bool is_zero(const HardWord& w) {
    for (auto b : w)
        if (b) return false;
    return true;
}

} // namespace eccw
