#pragma once

#include "eccw/bitmatrix.hpp"

#include <string>
#include <vector>

namespace eccw {

using HardWord = std::vector<std::uint8_t>;  // 0/1 per bit

// Rows of H that are linear combinations of earlier rows make the syndrome
// redundant and break the (n-k) x n shape contract. The loader refuses them
// unless told to drop them.
enum class RedundantRows { reject, drop };

struct LinearCode {
    std::string name;
    int n = 0;  // block length
    int k = 0;  // dimension, always n - rank(H)
    BitMatrix H;          // (n-k) x n after ingestion
    BitMatrix G;          // k x n, G H^T = 0, systematic up to col_perm
    // col_perm[i] = original column of systematization slot i; the first n-k
    // slots are the pivot columns, the trailing k carry the identity of G.
    // H itself is never reordered.
    std::vector<int> col_perm;
};

struct CodeError : std::runtime_error {
    explicit CodeError(const std::string& what) : std::runtime_error(what) {}
};

// Gaussian elimination over GF(2). Returns the systematic generator and the
// systematization permutation for the given parity-check matrix.
LinearCode make_code(std::string name, const BitMatrix& H, RedundantRows policy = RedundantRows::reject);

// load_pcm + make_code; name defaults to the file stem.
LinearCode load_code(const std::string& path, RedundantRows policy = RedundantRows::reject);

HardWord encode(const LinearCode& code, const HardWord& message);
HardWord syndrome(const BitMatrix& H, const HardWord& word);

// sign convention: values >= 0 decide bit 0, negative values decide bit 1
HardWord hard_decision(const std::vector<double>& y);

bool is_zero(const HardWord& w);

} // namespace eccw
