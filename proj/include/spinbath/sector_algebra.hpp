#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace spinbath {

// Half-integer spins are carried as twice-spin integers (two_spin = 2I) so that
// sector identity is exact and hashable.  A bath of n spin-1/2 nuclei has total
// spins I = n/2, n/2-1, ... down to 0 (n even) or 1/2 (n odd).

/// allowed two_spin values for a bath of n_spins spin-1/2 nuclei, decreasing
std::vector<int> allowed_two_spins(int n_spins);

struct SectorCount {
    int two_spin;                  // 2I
    std::uint64_t irrep_count;     // number of spin-I multiplets d_I
    int dimension;                 // 2I + 1
};

/// multiplet count per sector; sum of irrep_count * dimension is exactly 2^n.
/// exact integer arithmetic, n_spins <= 64.
std::vector<SectorCount> multiplicities(int n_spins);

struct SectorWeight {
    int two_spin;
    double weight;
};

/// normalized bath-spin distribution {(I, lambda_I)} over the sectors of n spins
class SectorWeightTable {
public:
    /// entries must be sorted by decreasing spin, weights >= 0 summing to 1
    /// within 1e-12, every spin an allowed sector of n_spins
    SectorWeightTable(int n_spins, std::vector<SectorWeight> entries);

    int n_spins() const { return n_spins_; }
    std::span<const SectorWeight> entries() const& { return entries_; }
    std::span<const SectorWeight> entries() const&& = delete;  // would dangle
    /// 0 for sectors not present
    double weight(int two_spin) const;

private:
    int n_spins_;
    std::vector<SectorWeight> entries_;
};

/// weights of the maximally mixed bath state, lambda_I = d_I (2I+1) / 2^n.
/// exact integer arithmetic internally; n_spins <= 120.
SectorWeightTable maximally_mixed_weights(int n_spins);

/// lambda_I proportional to exp(-alpha I^2); sectors whose normalized weight
/// falls below truncation_eps are dropped and the rest renormalized.
SectorWeightTable gaussian_weights(int n_spins, double alpha,
                                   double truncation_eps = 1e-12);

}  // namespace spinbath
