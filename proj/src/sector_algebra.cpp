#include "spinbath/sector_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "spinbath/errors.hpp"

namespace spinbath {

namespace {

using u128 = unsigned __int128;

constexpr int kMaxExactSpins = 120;  // C(120,60) still fits u128 headroom

// pascal row n, exact
std::vector<u128> binomial_row(int n) {
    std::vector<u128> row(static_cast<size_t>(n) + 1, 1);
    for (int i = 1; i <= n; ++i) {
        for (int j = i - 1; j >= 1; --j) row[j] += row[j - 1];
        row[i] = 1;
    }
    return row;
}

double u128_to_double(u128 v) {
    return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(v >> 64)), 64) +
           static_cast<double>(static_cast<std::uint64_t>(v));
}

u128 irrep_count_exact(int n, int two_i, const std::vector<u128>& row) {
    int k = (n - two_i) / 2;
    u128 a = row[static_cast<size_t>(k)];
    u128 b = k >= 1 ? row[static_cast<size_t>(k - 1)] : 0;
    return a - b;
}

}  // namespace

std::vector<int> allowed_two_spins(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    std::vector<int> out;
    for (int ti = n_spins; ti >= 0; ti -= 2) out.push_back(ti);
    return out;
}

std::vector<SectorCount> multiplicities(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (n_spins > 64)
        throw ResourceLimitError("multiplicities: n_spins > 64 exceeds exact 64-bit range");
    auto row = binomial_row(n_spins);
    std::vector<SectorCount> out;
    u128 total = 0;
    for (int ti : allowed_two_spins(n_spins)) {
        u128 d = irrep_count_exact(n_spins, ti, row);
        out.push_back({ti, static_cast<std::uint64_t>(d), ti + 1});
        total += d * static_cast<u128>(ti + 1);
    }
    // completeness of the decomposition: sum d_I (2I+1) = 2^n
    u128 expect = static_cast<u128>(1) << n_spins;
    if (total != expect)
        throw std::logic_error("multiplicities: dimension count mismatch");
    return out;
}

SectorWeightTable::SectorWeightTable(int n_spins, std::vector<SectorWeight> entries)
    : n_spins_(n_spins), entries_(std::move(entries)) {
    if (n_spins_ < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (entries_.empty()) throw std::invalid_argument("weight table is empty");
    double sum = 0;
    int prev = n_spins_ + 2;
    for (const auto& e : entries_) {
        if (e.two_spin < 0 || e.two_spin > n_spins_ || (n_spins_ - e.two_spin) % 2 != 0)
            throw std::invalid_argument("weight table: spin " +
                                        std::to_string(e.two_spin / 2.0) +
                                        " is not a sector of n=" + std::to_string(n_spins_));
        if (e.two_spin >= prev)
            throw std::invalid_argument("weight table: spins must strictly decrease");
        if (!(e.weight >= 0))
            throw std::invalid_argument("weight table: negative weight");
        prev = e.two_spin;
        sum += e.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("weight table: weights sum to " +
                                    std::to_string(sum) + ", not 1");
}

double SectorWeightTable::weight(int two_spin) const {
    for (const auto& e : entries_)
        if (e.two_spin == two_spin) return e.weight;
    return 0.0;
}

SectorWeightTable maximally_mixed_weights(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (n_spins > kMaxExactSpins)
        throw ResourceLimitError("maximally_mixed_weights: n_spins > 120");
    auto row = binomial_row(n_spins);
    std::vector<SectorWeight> entries;
    double norm = std::ldexp(1.0, -n_spins);
    for (int ti : allowed_two_spins(n_spins)) {
        u128 d = irrep_count_exact(n_spins, ti, row);
        double w = u128_to_double(d * static_cast<u128>(ti + 1)) * norm;
        entries.push_back({ti, w});
    }
    return SectorWeightTable(n_spins, std::move(entries));
}

SectorWeightTable gaussian_weights(int n_spins, double alpha, double truncation_eps) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
    if (!(truncation_eps >= 0 && truncation_eps < 1))
        throw std::invalid_argument("truncation_eps must lie in [0, 1)");
    auto spins = allowed_two_spins(n_spins);
    // weights relative to the smallest sector keep exp() in range for any alpha
    double i_min = spins.back() / 2.0;
    std::vector<double> raw(spins.size());
    double z = 0;
    for (size_t k = 0; k < spins.size(); ++k) {
        double i = spins[k] / 2.0;
        raw[k] = std::exp(-alpha * (i * i - i_min * i_min));
        z += raw[k];
    }
    std::vector<SectorWeight> entries;
    double kept = 0;
    for (size_t k = 0; k < spins.size(); ++k) {
        double w = raw[k] / z;
        if (w >= truncation_eps && w > 0) {
            entries.push_back({spins[k], w});
            kept += w;
        }
    }
    if (entries.empty())
        throw EmptyTableError("gaussian_weights: truncation removed every sector");
    for (auto& e : entries) e.weight /= kept;
    return SectorWeightTable(n_spins, std::move(entries));
}

}  // namespace spinbath
