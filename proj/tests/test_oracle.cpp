#include <gtest/gtest.h>

#include "dvr/language.hpp"
#include "dvr/verifiers.hpp"
#include "oracle/fuzz.hpp"
#include "oracle/oracle.hpp"

// The fuzzer is only useful if each type sees both verdicts.
TEST(OracleFuzz, EveryTypeSeesBothOutcomes) {
  fuzz::Engine e(31);
  for (auto t : dvr::format_types()) {
    if (t == dvr::ConstraintType::language_restriction) continue;
    int pass = 0, fail = 0;
    for (int i = 0; i < 400; ++i) {
      const auto spec = fuzz::spec_for(e, t);
      (oracle::check(spec, fuzz::response_for(e, spec)).satisfied ? pass : fail)++;
    }
    EXPECT_GT(pass, 0) << dvr::type_id(t);
    EXPECT_GT(fail, 0) << dvr::type_id(t);
  }
}

TEST(OracleFuzz, VerifiersAgreeWithOracle) {
  fuzz::Engine e(77);
  for (auto t : dvr::format_types()) {
    if (t == dvr::ConstraintType::language_restriction) continue;
    for (int i = 0; i < 200; ++i) {
      const auto spec = fuzz::spec_for(e, t);
      const auto r = fuzz::response_for(e, spec);
      const auto want = oracle::check(spec, r);
      const auto got = dvr::verify(dvr::instantiate(spec), r);
      EXPECT_EQ(got.satisfied, want.satisfied) << dvr::display_name(spec) << " on " << r;
      if (want.count) {
        EXPECT_EQ(std::get<std::int64_t>(got.observed), *want.count) << dvr::display_name(spec);
      }
    }
  }
}

TEST(OracleFuzz, LanguagePoolsDetected) {
  for (const auto& [code, pool] : fuzz::language_pools()) {
    for (const auto& sentence : pool) EXPECT_EQ(dvr::detect_language(sentence + " " + sentence), code) << sentence;
  }
}

TEST(OracleFuzz, MutateKeepsValidUtf8) {
  fuzz::Engine e(5);
  for (int i = 0; i < 500; ++i) {
    const auto s = fuzz::mutate(e, fuzz::language_sample(e).text);
    std::size_t k = 0;
    while (k < s.size()) {
      const std::size_t len = oracle::utf8_length(static_cast<unsigned char>(s[k]));
      ASSERT_GT(len, 0u) << s;
      ASSERT_LE(k + len, s.size()) << s;
      for (std::size_t j = 1; j < len; ++j) ASSERT_EQ(static_cast<unsigned char>(s[k + j]) & 0xC0, 0x80) << s;
      k += len;
    }
  }
}
