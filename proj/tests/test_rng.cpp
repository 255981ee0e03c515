#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rvode/numerics.hpp"
#include "rvode/rng.hpp"

using namespace rvode;

TEST_CASE("philox 4x32-10 known-answer vectors") {
  // Random123 reference vectors
  auto r0 = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  CHECK(r0[0] == 0x6627e8d5u);
  CHECK(r0[1] == 0xe169c58du);
  CHECK(r0[2] == 0xbc57ac4cu);
  CHECK(r0[3] == 0x9b00dbd8u);

  auto r1 = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  CHECK(r1[0] == 0x408f276du);
  CHECK(r1[1] == 0x41c83b0eu);
  CHECK(r1[2] == 0xa20bc7c6u);
  CHECK(r1[3] == 0x6d5451fdu);

  auto r2 = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  CHECK(r2[0] == 0xd16cfe09u);
  CHECK(r2[1] == 0x94fdccebu);
  CHECK(r2[2] == 0x5001e420u);
  CHECK(r2[3] == 0x24126ea1u);
}

TEST_CASE("inverse normal cdf reference values") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.9599639845400545).epsilon(1e-14));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-14));
  CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-13));
  CHECK(inverse_normal_cdf(1.0 - 1e-12) == doctest::Approx(7.034486910047836).epsilon(1e-12));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("normal ccdf basics") {
  CHECK(normal_ccdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_ccdf(6.0) < 1e-8);
  // inverse relationship
  for (double x : {-2.0, -0.3, 0.7, 3.1})
    CHECK(inverse_normal_cdf(1.0 - normal_ccdf(x)) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("stream: uniforms in (0,1), addressable, reproducible") {
  NormalStream s(12345, 7);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double u = s.uniform(k);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  // random access equals sequential access
  CHECK(s.uniform(999) == NormalStream(12345, 7).uniform(999));
  // distinct (seed, path, step) triples decorrelate
  CHECK(s.uniform(1) != NormalStream(12345, 8).uniform(1));
  CHECK(s.uniform(1) != NormalStream(12346, 7).uniform(1));
}

TEST_CASE("stream normals have the right first moments") {
  NormalStream s(2024, 0);
  RunningStat st;
  const int n = 200000;
  double m3 = 0.0, m4 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = s.normal(static_cast<std::uint64_t>(k));
    st.add(z);
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  m3 /= n;
  m4 /= n;
  CHECK(std::fabs(st.mean) < 0.01);
  CHECK(st.stddev() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::fabs(m3) < 0.03);
  CHECK(m4 == doctest::Approx(3.0).epsilon(0.05));
}
