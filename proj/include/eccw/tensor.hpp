#pragma once

// Reverse-mode autodiff on 2-D arrays, sized for transformer decoders with a
// few hundred tokens. Ops evaluate eagerly and push a closure onto the tape;
// backward() replays the tape in reverse creation order, which is already a
// topological order. Gradients accumulate: calling backward twice without a
// fresh tape doubles them, and that is intentional.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace eccw {

namespace detail {

// C (m x n) += / = op(A) op(B) with optional transposes, row major.
// The plain loops vectorize well enough for the sizes used here; a BLAS
// backend can be swapped in at build time for the float path.
template <class T>
void gemm(bool ta, bool tb, int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
          int ldc, bool accumulate);

void gemm_blas(bool ta, bool tb, int m, int n, int k, const float* a, int lda, const float* b,
               int ldb, float* c, int ldc, bool accumulate);
bool gemm_blas_available();

template <class T>
void gemm(bool ta, bool tb, int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
          int ldc, bool accumulate) {
    if constexpr (std::is_same_v<T, float>) {
        if (gemm_blas_available()) {
            gemm_blas(ta, tb, m, n, k, a, lda, b, ldb, c, ldc, accumulate);
            return;
        }
    }
    if (!accumulate)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) c[static_cast<size_t>(i) * ldc + j] = T(0);
    for (int i = 0; i < m; ++i) {
        for (int p = 0; p < k; ++p) {
            T av = ta ? a[static_cast<size_t>(p) * lda + i] : a[static_cast<size_t>(i) * lda + p];
            if (av == T(0)) continue;
            const T* brow = tb ? nullptr : b + static_cast<size_t>(p) * ldb;
            T* crow = c + static_cast<size_t>(i) * ldc;
            if (tb) {
                for (int j = 0; j < n; ++j) crow[j] += av * b[static_cast<size_t>(j) * ldb + p];
            } else {
                for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
            }
        }
    }
}

} // namespace detail

template <class T>
class Tape {
public:
    using Id = int;

    struct Node {
        int rows = 0, cols = 0;
        std::vector<T> val;
        std::vector<T> grad;
        bool needs_grad = false;
        std::function<void(Tape&)> back;  // empty for leaves
    };

    int rows(Id id) const { return nodes_[id].rows; }
    int cols(Id id) const { return nodes_[id].cols; }
    size_t size(Id id) const { return nodes_[id].val.size(); }
    const std::vector<T>& value(Id id) const { return nodes_[id].val; }
    std::vector<T>& grad(Id id) { return nodes_[id].grad; }
    const std::vector<T>& grad(Id id) const { return nodes_[id].grad; }

    // ---- leaves ----

    Id input(int r, int c, const T* data) { return leaf(r, c, data, false); }
    Id input(int r, int c, const std::vector<T>& data) { return leaf(r, c, data.data(), false); }
    Id param(int r, int c, const T* data) { return leaf(r, c, data, true); }

    // ---- arithmetic ----

    Id matmul(Id a, Id b) {
        require(cols(a) == rows(b), "matmul: inner dimensions differ");
        Id out = fresh(rows(a), cols(b), needs(a) || needs(b));
        detail::gemm<T>(false, false, rows(a), cols(b), cols(a), val(a), cols(a), val(b), cols(b),
                        mval(out), cols(b), false);
        nodes_[out].back = [a, b, out](Tape& t) {
            // dA += dC B^T, dB += A^T dC
            if (t.needs(a))
                detail::gemm<T>(false, true, t.rows(a), t.cols(a), t.cols(out), t.gval(out),
                                t.cols(out), t.val(b), t.cols(b), t.gbuf(a), t.cols(a), true);
            if (t.needs(b))
                detail::gemm<T>(true, false, t.rows(b), t.cols(b), t.rows(a), t.val(a), t.cols(a),
                                t.gval(out), t.cols(out), t.gbuf(b), t.cols(b), true);
        };
        return out;
    }

    // Block-diagonal matmuls for stacked batches: both inputs hold `batch`
    // equally tall blocks and blocks never mix.
    Id bmm_nt(Id a, Id b, int batch) {  // per block: A_i B_i^T
        require(batch > 0 && rows(a) % batch == 0 && rows(b) % batch == 0, "bmm_nt: bad batch");
        require(cols(a) == cols(b), "bmm_nt: inner dimensions differ");
        const int p = rows(a) / batch, q = rows(b) / batch, d = cols(a);
        Id out = fresh(rows(a), q, needs(a) || needs(b));
        for (int i = 0; i < batch; ++i)
            detail::gemm<T>(false, true, p, q, d, val(a) + static_cast<size_t>(i) * p * d, d,
                            val(b) + static_cast<size_t>(i) * q * d, d,
                            mval(out) + static_cast<size_t>(i) * p * q, q, false);
        nodes_[out].back = [a, b, out, batch, p, q, d](Tape& t) {
            for (int i = 0; i < batch; ++i) {
                const T* gc = t.gval(out) + static_cast<size_t>(i) * p * q;
                if (t.needs(a))
                    detail::gemm<T>(false, false, p, d, q, gc, q,
                                    t.val(b) + static_cast<size_t>(i) * q * d, d,
                                    t.gbuf(a) + static_cast<size_t>(i) * p * d, d, true);
                if (t.needs(b))
                    detail::gemm<T>(true, false, q, d, p, gc, q,
                                    t.val(a) + static_cast<size_t>(i) * p * d, d,
                                    t.gbuf(b) + static_cast<size_t>(i) * q * d, d, true);
            }
        };
        return out;
    }

    Id bmm_nn(Id a, Id b, int batch) {  // per block: A_i B_i
        require(batch > 0 && rows(a) % batch == 0 && rows(b) % batch == 0, "bmm_nn: bad batch");
        const int p = rows(a) / batch, q = rows(b) / batch, d = cols(b);
        require(cols(a) == q, "bmm_nn: inner dimensions differ");
        Id out = fresh(rows(a), d, needs(a) || needs(b));
        for (int i = 0; i < batch; ++i)
            detail::gemm<T>(false, false, p, d, q, val(a) + static_cast<size_t>(i) * p * q, q,
                            val(b) + static_cast<size_t>(i) * q * d, d,
                            mval(out) + static_cast<size_t>(i) * p * d, d, false);
        nodes_[out].back = [a, b, out, batch, p, q, d](Tape& t) {
            for (int i = 0; i < batch; ++i) {
                const T* gc = t.gval(out) + static_cast<size_t>(i) * p * d;
                if (t.needs(a))
                    detail::gemm<T>(false, true, p, q, d, gc, d,
                                    t.val(b) + static_cast<size_t>(i) * q * d, d,
                                    t.gbuf(a) + static_cast<size_t>(i) * p * q, q, true);
                if (t.needs(b))
                    detail::gemm<T>(true, false, q, d, p, t.val(a) + static_cast<size_t>(i) * p * q,
                                    q, gc, d, t.gbuf(b) + static_cast<size_t>(i) * q * d, d, true);
            }
        };
        return out;
    }

    Id add(Id a, Id b) {
        require(rows(a) == rows(b) && cols(a) == cols(b), "add: shape mismatch");
        Id out = fresh(rows(a), cols(a), needs(a) || needs(b));
        const T* pa = val(a);
        const T* pb = val(b);
        T* po = mval(out);
        for (size_t i = 0; i < size(a); ++i) po[i] = pa[i] + pb[i];
        nodes_[out].back = [a, b, out](Tape& t) {
            t.axpy(out, a, T(1));
            t.axpy(out, b, T(1));
        };
        return out;
    }

    Id mul(Id a, Id b) {
        require(rows(a) == rows(b) && cols(a) == cols(b), "mul: shape mismatch");
        Id out = fresh(rows(a), cols(a), needs(a) || needs(b));
        const T* pa = val(a);
        const T* pb = val(b);
        T* po = mval(out);
        for (size_t i = 0; i < size(a); ++i) po[i] = pa[i] * pb[i];
        nodes_[out].back = [a, b, out](Tape& t) {
            if (t.needs(a)) {
                const T* g = t.gval(out);
                const T* pb2 = t.val(b);
                T* ga = t.gbuf(a);
                for (size_t i = 0; i < t.size(a); ++i) ga[i] += g[i] * pb2[i];
            }
            if (t.needs(b)) {
                const T* g = t.gval(out);
                const T* pa2 = t.val(a);
                T* gb = t.gbuf(b);
                for (size_t i = 0; i < t.size(b); ++i) gb[i] += g[i] * pa2[i];
            }
        };
        return out;
    }

    Id scale(Id a, T s) {
        Id out = fresh(rows(a), cols(a), needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (size_t i = 0; i < size(a); ++i) po[i] = pa[i] * s;
        nodes_[out].back = [a, out, s](Tape& t) { t.axpy(out, a, s); };
        return out;
    }

    Id add_rowvec(Id a, Id b) {  // b is 1 x cols(a), broadcast over rows
        require(rows(b) == 1 && cols(b) == cols(a), "add_rowvec: need 1 x cols vector");
        Id out = fresh(rows(a), cols(a), needs(a) || needs(b));
        const T* pa = val(a);
        const T* pb = val(b);
        T* po = mval(out);
        const int c = cols(a);
        for (int r = 0; r < rows(a); ++r)
            for (int j = 0; j < c; ++j) po[static_cast<size_t>(r) * c + j] = pa[static_cast<size_t>(r) * c + j] + pb[j];
        nodes_[out].back = [a, b, out, c](Tape& t) {
            if (t.needs(a)) t.axpy(out, a, T(1));
            if (t.needs(b)) {
                const T* g = t.gval(out);
                T* gb = t.gbuf(b);
                for (int r = 0; r < t.rows(a); ++r)
                    for (int j = 0; j < c; ++j) gb[j] += g[static_cast<size_t>(r) * c + j];
            }
        };
        return out;
    }

    // ---- layout ----

    Id transpose(Id a) {
        Id out = fresh(cols(a), rows(a), needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (int r = 0; r < rows(a); ++r)
            for (int c = 0; c < cols(a); ++c)
                po[static_cast<size_t>(c) * rows(a) + r] = pa[static_cast<size_t>(r) * cols(a) + c];
        nodes_[out].back = [a, out](Tape& t) {
            if (!t.needs(a)) return;
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            const int ar = t.rows(a), ac = t.cols(a);
            for (int r = 0; r < ar; ++r)
                for (int c = 0; c < ac; ++c)
                    ga[static_cast<size_t>(r) * ac + c] += g[static_cast<size_t>(c) * ar + r];
        };
        return out;
    }

    Id reshape(Id a, int r, int c) {
        require(static_cast<size_t>(r) * c == size(a), "reshape: element count differs");
        Id out = fresh(r, c, needs(a));
        std::copy(val(a), val(a) + size(a), mval(out));
        nodes_[out].back = [a, out](Tape& t) { t.axpy(out, a, T(1)); };
        return out;
    }

    Id concat_rows(Id a, Id b) {
        require(cols(a) == cols(b), "concat_rows: column counts differ");
        Id out = fresh(rows(a) + rows(b), cols(a), needs(a) || needs(b));
        std::copy(val(a), val(a) + size(a), mval(out));
        std::copy(val(b), val(b) + size(b), mval(out) + size(a));
        nodes_[out].back = [a, b, out](Tape& t) {
            const T* g = t.gval(out);
            if (t.needs(a)) {
                T* ga = t.gbuf(a);
                for (size_t i = 0; i < t.size(a); ++i) ga[i] += g[i];
            }
            if (t.needs(b)) {
                T* gb = t.gbuf(b);
                for (size_t i = 0; i < t.size(b); ++i) gb[i] += g[t.size(a) + i];
            }
        };
        return out;
    }

    Id concat_cols(Id a, Id b) {
        require(rows(a) == rows(b), "concat_cols: row counts differ");
        const int ca = cols(a), cb = cols(b);
        Id out = fresh(rows(a), ca + cb, needs(a) || needs(b));
        const T* pa = val(a);
        const T* pb = val(b);
        T* po = mval(out);
        for (int r = 0; r < rows(a); ++r) {
            std::copy(pa + static_cast<size_t>(r) * ca, pa + static_cast<size_t>(r + 1) * ca,
                      po + static_cast<size_t>(r) * (ca + cb));
            std::copy(pb + static_cast<size_t>(r) * cb, pb + static_cast<size_t>(r + 1) * cb,
                      po + static_cast<size_t>(r) * (ca + cb) + ca);
        }
        nodes_[out].back = [a, b, out, ca, cb](Tape& t) {
            const T* g = t.gval(out);
            for (int r = 0; r < t.rows(a); ++r) {
                if (t.needs(a)) {
                    T* ga = t.gbuf(a) + static_cast<size_t>(r) * ca;
                    const T* gr = g + static_cast<size_t>(r) * (ca + cb);
                    for (int j = 0; j < ca; ++j) ga[j] += gr[j];
                }
                if (t.needs(b)) {
                    T* gb = t.gbuf(b) + static_cast<size_t>(r) * cb;
                    const T* gr = g + static_cast<size_t>(r) * (ca + cb) + ca;
                    for (int j = 0; j < cb; ++j) gb[j] += gr[j];
                }
            }
        };
        return out;
    }

    Id slice_cols(Id a, int c0, int w) {
        require(c0 >= 0 && w > 0 && c0 + w <= cols(a), "slice_cols: range out of bounds");
        Id out = fresh(rows(a), w, needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (int r = 0; r < rows(a); ++r)
            std::copy(pa + static_cast<size_t>(r) * cols(a) + c0,
                      pa + static_cast<size_t>(r) * cols(a) + c0 + w, po + static_cast<size_t>(r) * w);
        nodes_[out].back = [a, out, c0, w](Tape& t) {
            if (!t.needs(a)) return;
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (int r = 0; r < t.rows(a); ++r)
                for (int j = 0; j < w; ++j)
                    ga[static_cast<size_t>(r) * t.cols(a) + c0 + j] += g[static_cast<size_t>(r) * w + j];
        };
        return out;
    }

    Id slice_rows(Id a, int r0, int h) {
        require(r0 >= 0 && h > 0 && r0 + h <= rows(a), "slice_rows: range out of bounds");
        const int c = cols(a);
        Id out = fresh(h, c, needs(a));
        std::copy(val(a) + static_cast<size_t>(r0) * c, val(a) + static_cast<size_t>(r0 + h) * c,
                  mval(out));
        nodes_[out].back = [a, out, r0, c](Tape& t) {
            if (!t.needs(a)) return;
            const T* g = t.gval(out);
            T* ga = t.gbuf(a) + static_cast<size_t>(r0) * c;
            for (size_t i = 0; i < t.size(out); ++i) ga[i] += g[i];
        };
        return out;
    }

    Id tile_rows(Id a, int times) {  // stack `times` copies of a
        require(times > 0, "tile_rows: times must be positive");
        Id out = fresh(rows(a) * times, cols(a), needs(a));
        for (int i = 0; i < times; ++i) std::copy(val(a), val(a) + size(a), mval(out) + size(a) * i);
        nodes_[out].back = [a, out, times](Tape& t) {
            if (!t.needs(a)) return;
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (int i = 0; i < times; ++i)
                for (size_t j = 0; j < t.size(a); ++j) ga[j] += g[t.size(a) * i + j];
        };
        return out;
    }

    // out[i, :] = coeffs[i] * a[i, :]; coeffs are plain numbers, not a node
    Id scale_rows(Id a, const std::vector<T>& coeffs) {
        require(static_cast<int>(coeffs.size()) == rows(a), "scale_rows: coefficient count differs");
        Id out = fresh(rows(a), cols(a), needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        const int c = cols(a);
        for (int r = 0; r < rows(a); ++r)
            for (int j = 0; j < c; ++j)
                po[static_cast<size_t>(r) * c + j] = coeffs[r] * pa[static_cast<size_t>(r) * c + j];
        nodes_[out].back = [a, out, coeffs, c](Tape& t) {
            if (!t.needs(a)) return;
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (int r = 0; r < t.rows(a); ++r)
                for (int j = 0; j < c; ++j)
                    ga[static_cast<size_t>(r) * c + j] += coeffs[r] * g[static_cast<size_t>(r) * c + j];
        };
        return out;
    }

    // ---- nonlinearities ----

    // Row softmax with an additive 0/-inf mask. The mask repeats every
    // mask_rows rows, which lets one n x m mask serve a whole stacked batch.
    // A row with no admissible entry has no valid distribution; that is a
    // modelling error, so it throws.
    Id masked_softmax_rows(Id a, const std::vector<T>& mask, int mask_rows) {
        const int r = rows(a), c = cols(a);
        require(mask_rows > 0 && r % mask_rows == 0, "masked_softmax_rows: bad mask period");
        require(mask.size() == static_cast<size_t>(mask_rows) * c, "masked_softmax_rows: mask shape");
        Id out = fresh(r, c, needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        constexpr T ninf = -std::numeric_limits<T>::infinity();
        for (int i = 0; i < r; ++i) {
            const T* mrow = mask.data() + static_cast<size_t>(i % mask_rows) * c;
            const T* x = pa + static_cast<size_t>(i) * c;
            T* o = po + static_cast<size_t>(i) * c;
            T mx = ninf;
            for (int j = 0; j < c; ++j)
                if (mrow[j] == T(0) && x[j] > mx) mx = x[j];
            if (mx == ninf)
                throw std::runtime_error("masked_softmax_rows: row " + std::to_string(i % mask_rows) +
                                         " of the mask admits no entries");
            T sum = T(0);
            for (int j = 0; j < c; ++j) {
                o[j] = mrow[j] == T(0) ? std::exp(x[j] - mx) : T(0);
                sum += o[j];
            }
            for (int j = 0; j < c; ++j) o[j] /= sum;
        }
        nodes_[out].back = [a, out, c](Tape& t) {
            if (!t.needs(a)) return;
            const T* p = t.val(out);
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (int i = 0; i < t.rows(out); ++i) {
                const T* pr = p + static_cast<size_t>(i) * c;
                const T* gr = g + static_cast<size_t>(i) * c;
                T dot = T(0);
                for (int j = 0; j < c; ++j) dot += pr[j] * gr[j];
                T* gar = ga + static_cast<size_t>(i) * c;
                for (int j = 0; j < c; ++j) gar[j] += pr[j] * (gr[j] - dot);
            }
        };
        return out;
    }

    Id layernorm(Id a, Id gain, Id bias, T eps = T(1e-5)) {
        const int r = rows(a), c = cols(a);
        require(rows(gain) == 1 && cols(gain) == c, "layernorm: gain must be 1 x cols");
        require(rows(bias) == 1 && cols(bias) == c, "layernorm: bias must be 1 x cols");
        Id out = fresh(r, c, needs(a) || needs(gain) || needs(bias));
        auto& node = nodes_[out];
        node.aux.resize(static_cast<size_t>(r) * 2);  // per row: mean, 1/std
        const T* pa = val(a);
        const T* pg = val(gain);
        const T* pb = val(bias);
        T* po = node.val.data();
        for (int i = 0; i < r; ++i) {
            const T* x = pa + static_cast<size_t>(i) * c;
            T mu = T(0);
            for (int j = 0; j < c; ++j) mu += x[j];
            mu /= T(c);
            T var = T(0);
            for (int j = 0; j < c; ++j) var += (x[j] - mu) * (x[j] - mu);
            var /= T(c);
            T inv = T(1) / std::sqrt(var + eps);
            node.aux[static_cast<size_t>(i) * 2] = mu;
            node.aux[static_cast<size_t>(i) * 2 + 1] = inv;
            T* o = po + static_cast<size_t>(i) * c;
            for (int j = 0; j < c; ++j) o[j] = (x[j] - mu) * inv * pg[j] + pb[j];
        }
        nodes_[out].back = [a, gain, bias, out, c](Tape& t) {
            const auto& aux = t.nodes_[out].aux;
            const T* pa2 = t.val(a);
            const T* pg2 = t.val(gain);
            const T* g = t.gval(out);
            for (int i = 0; i < t.rows(a); ++i) {
                const T mu = aux[static_cast<size_t>(i) * 2];
                const T inv = aux[static_cast<size_t>(i) * 2 + 1];
                const T* x = pa2 + static_cast<size_t>(i) * c;
                const T* gr = g + static_cast<size_t>(i) * c;
                if (t.needs(gain) || t.needs(bias)) {
                    T* gg = t.needs(gain) ? t.gbuf(gain) : nullptr;
                    T* gb = t.needs(bias) ? t.gbuf(bias) : nullptr;
                    for (int j = 0; j < c; ++j) {
                        if (gg) gg[j] += gr[j] * (x[j] - mu) * inv;
                        if (gb) gb[j] += gr[j];
                    }
                }
                if (t.needs(a)) {
                    // d xhat = g * gain; dx = inv*(dxhat - mean(dxhat) - xhat*mean(dxhat*xhat))
                    T s1 = T(0), s2 = T(0);
                    for (int j = 0; j < c; ++j) {
                        T dxh = gr[j] * pg2[j];
                        T xh = (x[j] - mu) * inv;
                        s1 += dxh;
                        s2 += dxh * xh;
                    }
                    s1 /= T(c);
                    s2 /= T(c);
                    T* ga = t.gbuf(a) + static_cast<size_t>(i) * c;
                    for (int j = 0; j < c; ++j) {
                        T dxh = gr[j] * pg2[j];
                        T xh = (x[j] - mu) * inv;
                        ga[j] += inv * (dxh - s1 - xh * s2);
                    }
                }
            }
        };
        return out;
    }

    Id gelu(Id a) {  // exact erf form
        Id out = fresh(rows(a), cols(a), needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (size_t i = 0; i < size(a); ++i) {
            T x = pa[i];
            po[i] = x * T(0.5) * (T(1) + std::erf(x * T(0.7071067811865475)));
        }
        nodes_[out].back = [a, out](Tape& t) {
            if (!t.needs(a)) return;
            const T* x = t.val(a);
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (size_t i = 0; i < t.size(a); ++i) {
                T phi = T(0.5) * (T(1) + std::erf(x[i] * T(0.7071067811865475)));
                T pdf = std::exp(T(-0.5) * x[i] * x[i]) * T(0.3989422804014327);
                ga[i] += g[i] * (phi + x[i] * pdf);
            }
        };
        return out;
    }

    Id sigmoid(Id a) {
        Id out = fresh(rows(a), cols(a), needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (size_t i = 0; i < size(a); ++i) {
            T x = pa[i];
            po[i] = x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
        }
        nodes_[out].back = [a, out](Tape& t) {
            if (!t.needs(a)) return;
            const T* s = t.val(out);
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (size_t i = 0; i < t.size(a); ++i) ga[i] += g[i] * s[i] * (T(1) - s[i]);
        };
        return out;
    }

    // Per-row sum of binary cross entropy with logits, stable form. Targets
    // are constants in [0,1]. Result is rows(a) x 1.
    Id bce_logits_rowsum(Id a, const std::vector<T>& targets) {
        require(targets.size() == size(a), "bce_logits_rowsum: target shape differs");
        const int r = rows(a), c = cols(a);
        Id out = fresh(r, 1, needs(a));
        const T* pa = val(a);
        T* po = mval(out);
        for (int i = 0; i < r; ++i) {
            T s = T(0);
            for (int j = 0; j < c; ++j) {
                T x = pa[static_cast<size_t>(i) * c + j];
                T t = targets[static_cast<size_t>(i) * c + j];
                s += std::max(x, T(0)) - x * t + std::log1p(std::exp(-std::abs(x)));
            }
            po[i] = s;
        }
        nodes_[out].back = [a, out, targets, c](Tape& t) {
            if (!t.needs(a)) return;
            const T* x = t.val(a);
            const T* g = t.gval(out);
            T* ga = t.gbuf(a);
            for (int i = 0; i < t.rows(a); ++i)
                for (int j = 0; j < c; ++j) {
                    size_t idx = static_cast<size_t>(i) * c + j;
                    T sig = x[idx] >= T(0) ? T(1) / (T(1) + std::exp(-x[idx]))
                                           : std::exp(x[idx]) / (T(1) + std::exp(x[idx]));
                    ga[idx] += g[i] * (sig - targets[idx]);
                }
        };
        return out;
    }

    Id mean_all(Id a) {
        Id out = fresh(1, 1, needs(a));
        const T* pa = val(a);
        T s = T(0);
        for (size_t i = 0; i < size(a); ++i) s += pa[i];
        mval(out)[0] = s / static_cast<T>(size(a));
        nodes_[out].back = [a, out](Tape& t) {
            if (!t.needs(a)) return;
            T g = t.gval(out)[0] / static_cast<T>(t.size(a));
            T* ga = t.gbuf(a);
            for (size_t i = 0; i < t.size(a); ++i) ga[i] += g;
        };
        return out;
    }

    // ---- reverse pass ----

    void backward(Id root) {
        require(size(root) == 1, "backward: root must be scalar");
        nodes_[root].grad.assign(1, T(1));
        for (Id id = root; id >= 0; --id) {
            Node& n = nodes_[id];
            if (!n.back || n.grad.empty() || !n.needs_grad) continue;
            n.back(*this);
        }
    }

    size_t node_count() const { return nodes_.size(); }

private:
    Id fresh(int r, int c, bool needs_grad) {
        NodeEx n;
        n.rows = r;
        n.cols = c;
        n.needs_grad = needs_grad;
        n.val.resize(static_cast<size_t>(r) * c);
        nodes_.push_back(std::move(n));
        return static_cast<Id>(nodes_.size() - 1);
    }

    Id leaf(int r, int c, const T* data, bool needs_grad) {
        Id id = fresh(r, c, needs_grad);
        std::copy(data, data + static_cast<size_t>(r) * c, nodes_[id].val.begin());
        return id;
    }

    bool needs(Id id) const { return nodes_[id].needs_grad; }
    const T* val(Id id) const { return nodes_[id].val.data(); }
    T* mval(Id id) { return nodes_[id].val.data(); }
    const T* gval(Id id) const { return nodes_[id].grad.data(); }

    // gradient buffer, allocated on first touch
    T* gbuf(Id id) {
        auto& g = nodes_[id].grad;
        if (g.empty()) g.assign(size(id), T(0));
        return g.data();
    }

    void axpy(Id from, Id to, T s) {
        if (!needs(to)) return;
        const T* g = gval(from);
        T* dst = gbuf(to);
        for (size_t i = 0; i < size(to); ++i) dst[i] += s * g[i];
    }

    static void require(bool ok, const char* what) {
        if (!ok) throw std::logic_error(what);
    }

    struct NodeEx : Node {
        std::vector<T> aux;  // op scratch saved for backward (layernorm stats)
    };
    std::vector<NodeEx> nodes_;
};

} // namespace eccw
