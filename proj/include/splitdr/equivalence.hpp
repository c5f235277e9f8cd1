#pragma once

#include <cstdint>

#include "splitdr/solvers.hpp"

namespace splitdr {

// Seeded random-instance checks of the three reduction theorems. Each
// returns the max deviation between the two sequences over the run.

// Primal iterates of SDR and PDS coincide when PDS starts from
// v0 = Sig (Id - J_{Sig^{-1}B})(L x0 + Sig^{-1} u0).
double equiv_sdr_pds(std::uint64_t seed, int dim, int iters);

// With ran L = G and Sig = (L Ups L*)^{-1}, the SDR shadow z_n = x_n - Ups L* v_n
// follows the metric Douglas-Rachford recurrence.
double equiv_sdr_drs(std::uint64_t seed, int primal_dim, int dual_dim,
                     int iters);

// SADMM and SDR applied to the dual generate the same (Tp, q, x) sequences
// under the mappings of the reduction theorem; checks both directions.
double equiv_sadmm_sdr(std::uint64_t seed, int dim, int iters);

}  // namespace splitdr
