#include "eccw/bitmatrix.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace eccw {

long BitMatrix::ones() const {
    long s = 0;
    for (auto b : v_) s += b;
    return s;
}

int BitMatrix::row_weight(int r) const {
    int s = 0;
    for (int c = 0; c < cols_; ++c) s += at(r, c);
    return s;
}

int BitMatrix::col_weight(int c) const {
    int s = 0;
    for (int r = 0; r < rows_; ++r) s += at(r, c);
    return s;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
}

BitMatrix gf2_mul(const BitMatrix& a, const BitMatrix& b) {
    BitMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k)
            if (a.at(i, k))
                for (int j = 0; j < b.cols(); ++j) out.at(i, j) ^= b.at(k, j);
    return out;
}

int gf2_rank(const BitMatrix& m) {
    BitMatrix w = m;
    int rank = 0;
    for (int c = 0; c < w.cols() && rank < w.rows(); ++c) {
        int piv = -1;
        for (int r = rank; r < w.rows(); ++r)
            if (w.at(r, c)) { piv = r; break; }
        if (piv < 0) continue;
        if (piv != rank)
            for (int j = 0; j < w.cols(); ++j) std::swap(w.at(piv, j), w.at(rank, j));
        for (int r = 0; r < w.rows(); ++r)
            if (r != rank && w.at(r, c))
                for (int j = c; j < w.cols(); ++j) w.at(r, j) ^= w.at(rank, j);
        ++rank;
    }
    return rank;
}

std::vector<std::uint8_t> gf2_mat_vec(const BitMatrix& m, const std::vector<std::uint8_t>& x) {
    std::vector<std::uint8_t> y(m.rows(), 0);
    for (int r = 0; r < m.rows(); ++r) {
        std::uint8_t acc = 0;
        const std::uint8_t* row = m.row(r);
        for (int c = 0; c < m.cols(); ++c) acc ^= static_cast<std::uint8_t>(row[c] & x[c]);
        y[r] = acc;
    }
    return y;
}

namespace {

// Token reader that remembers the line each token came from, so errors can
// point at the right place even though the grammar itself ignores layout.
class TokenReader {
public:
    TokenReader(const std::string& text, std::string name) : name_(std::move(name)) {
        std::istringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) toks_.push_back({tok, lineno});
        }
    }

    bool done() const { return pos_ >= toks_.size(); }

    long next_int(const char* what) {
        if (done()) fail(0, std::string("unexpected end of input, expected ") + what);
        auto [tok, line] = toks_[pos_++];
        try {
            size_t used = 0;
            long v = std::stol(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail(line, std::string("expected integer for ") + what + ", got '" + tok + "'");
        }
        return 0;
    }

    int last_line() const { return pos_ ? toks_[pos_ - 1].second : 0; }

    [[noreturn]] void fail(int line, const std::string& why) const {
        std::ostringstream msg;
        msg << name_;
        if (line > 0) msg << ":" << line;
        msg << ": " << why;
        throw ParseError(msg.str());
    }

private:
    std::string name_;
    std::vector<std::pair<std::string, int>> toks_;
    size_t pos_ = 0;
};

} // namespace

BitMatrix parse_alist(const std::string& text, const std::string& source_name) {
    TokenReader in(text, source_name);
    long n = in.next_int("column count");
    long m = in.next_int("row count");
    if (n <= 0 || m <= 0) in.fail(in.last_line(), "matrix dimensions must be positive");
    long cmax = in.next_int("max column degree");
    long rmax = in.next_int("max row degree");
    if (cmax < 0 || cmax > m || rmax < 0 || rmax > n)
        in.fail(in.last_line(), "max degree out of range");

    std::vector<long> cdeg(n), rdeg(m);
    for (long c = 0; c < n; ++c) {
        cdeg[c] = in.next_int("column degree");
        if (cdeg[c] < 0 || cdeg[c] > cmax)
            in.fail(in.last_line(), "column degree exceeds declared maximum");
    }
    for (long r = 0; r < m; ++r) {
        rdeg[r] = in.next_int("row degree");
        if (rdeg[r] < 0 || rdeg[r] > rmax)
            in.fail(in.last_line(), "row degree exceeds declared maximum");
    }

    BitMatrix h(static_cast<int>(m), static_cast<int>(n));

    // Column blocks: cmax tokens per column, 1-indexed row positions, 0 = pad.
    for (long c = 0; c < n; ++c) {
        long seen = 0;
        for (long i = 0; i < cmax; ++i) {
            long p = in.next_int("column entry");
            if (p == 0) continue;
            if (p < 1 || p > m) in.fail(in.last_line(), "row index out of range");
            if (h.at(static_cast<int>(p - 1), static_cast<int>(c)))
                in.fail(in.last_line(), "duplicate entry in column list");
            h.at(static_cast<int>(p - 1), static_cast<int>(c)) = 1;
            ++seen;
        }
        if (seen != cdeg[c])
            in.fail(in.last_line(), "column " + std::to_string(c + 1) + " lists " + std::to_string(seen) +
                                        " entries, degree says " + std::to_string(cdeg[c]));
    }

    // Row blocks must agree with what the column blocks already built.
    BitMatrix check(static_cast<int>(m), static_cast<int>(n));
    for (long r = 0; r < m; ++r) {
        long seen = 0;
        for (long i = 0; i < rmax; ++i) {
            long p = in.next_int("row entry");
            if (p == 0) continue;
            if (p < 1 || p > n) in.fail(in.last_line(), "column index out of range");
            if (check.at(static_cast<int>(r), static_cast<int>(p - 1)))
                in.fail(in.last_line(), "duplicate entry in row list");
            check.at(static_cast<int>(r), static_cast<int>(p - 1)) = 1;
            ++seen;
        }
        if (seen != rdeg[r])
            in.fail(in.last_line(), "row " + std::to_string(r + 1) + " lists " + std::to_string(seen) +
                                        " entries, degree says " + std::to_string(rdeg[r]));
    }
    if (!(h == check))
        in.fail(in.last_line(), "row and column lists describe different matrices");
    return h;
}

std::string emit_alist(const BitMatrix& m) {
    int rows = m.rows(), cols = m.cols();
    int cmax = 0, rmax = 0;
    for (int c = 0; c < cols; ++c) cmax = std::max(cmax, m.col_weight(c));
    for (int r = 0; r < rows; ++r) rmax = std::max(rmax, m.row_weight(r));

    std::ostringstream out;
    out << cols << " " << rows << "\n" << cmax << " " << rmax << "\n";
    for (int c = 0; c < cols; ++c) out << m.col_weight(c) << (c + 1 < cols ? " " : "\n");
    for (int r = 0; r < rows; ++r) out << m.row_weight(r) << (r + 1 < rows ? " " : "\n");
    for (int c = 0; c < cols; ++c) {
        int written = 0;
        for (int r = 0; r < rows; ++r)
            if (m.at(r, c)) out << (written++ ? " " : "") << (r + 1);
        for (int i = m.col_weight(c); i < cmax; ++i) out << (written++ ? " " : "") << 0;
        out << "\n";
    }
    for (int r = 0; r < rows; ++r) {
        int written = 0;
        for (int c = 0; c < cols; ++c)
            if (m.at(r, c)) out << (written++ ? " " : "") << (c + 1);
        for (int i = m.row_weight(r); i < rmax; ++i) out << (written++ ? " " : "") << 0;
        out << "\n";
    }
    return out.str();
}

BitMatrix parse_pcm_text(const std::string& text, const std::string& source_name) {
    std::istringstream ss(text);
    std::string line;
    std::vector<std::vector<std::uint8_t>> rows;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::uint8_t> row;
        std::string tok;
        while (ls >> tok) {
            if (tok == "0") row.push_back(0);
            else if (tok == "1") row.push_back(1);
            else throw ParseError(source_name + ":" + std::to_string(lineno) + ": expected 0 or 1, got '" + tok + "'");
        }
        if (row.empty()) continue;  // blank line
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": row length " +
                             std::to_string(row.size()) + " differs from first row " +
                             std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source_name + ": no rows found");
    BitMatrix h(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
    for (int r = 0; r < h.rows(); ++r)
        for (int c = 0; c < h.cols(); ++c) h.at(r, c) = rows[r][c];
    return h;
}

BitMatrix load_pcm(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << f.rdbuf();
    bool alist = path.size() >= 6 && path.compare(path.size() - 6, 6, ".alist") == 0;
    return alist ? parse_alist(buf.str(), path) : parse_pcm_text(buf.str(), path);
}

} // namespace eccw
