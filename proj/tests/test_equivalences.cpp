#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "splitdr/equivalence.hpp"

using namespace splitdr;

TEST_CASE("SDR and PDS primal iterates coincide with the mapped start") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    CHECK(equiv_sdr_pds(seed, 6, 50) <= 1e-12);
}

TEST_CASE("SDR shadow sequence follows metric Douglas-Rachford") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    CHECK(equiv_sdr_drs(seed, 4, 3, 200) <= 1e-10);
}

TEST_CASE("SADMM and dual SDR generate the same sequences, both directions") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    CHECK(equiv_sadmm_sdr(seed, 8, 100) <= 1e-10);
}

TEST_CASE("single-iteration and larger-dimension spot checks") {
  CHECK(equiv_sdr_pds(99, 12, 1) <= 1e-12);
  CHECK(equiv_sadmm_sdr(99, 12, 1) <= 1e-10);
  CHECK(equiv_sdr_drs(99, 6, 4, 1) <= 1e-10);
  CHECK(equiv_sadmm_sdr(7, 12, 60) <= 1e-10);
}
