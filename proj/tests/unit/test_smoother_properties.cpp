#include <doctest.h>

#include "support/properties.hpp"

using namespace smoothbench;

TEST_CASE("every method preserves length and constants and honours its equivariances") {
  Rng rng(2024);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 10 + uniform_index(rng, 111);
    const auto x = props::random_series(n, rng);
    const double shift = uniform_real(rng, -50, 50);
    const double scale = uniform_real(rng, 0.1, 20);
    for (MethodId id : kAllMethods) {
      const auto spec = props::random_spec(id, n, rng);
      const auto c = props::check_invariants(spec, x, shift, scale);
      INFO(c.detail, " n=", n);
      CHECK(c.ok);
    }
  }
}

TEST_CASE("smoothers are deterministic") {
  Rng rng(77);
  const auto x = props::random_series(50, rng);
  for (MethodId id : kAllMethods) {
    const auto spec = SmootherSpec::defaults(id);
    CHECK(smooth(spec, x) == smooth(spec, x));
  }
}
