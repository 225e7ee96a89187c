#include <gtest/gtest.h>

#include <set>

#include "dvr/constraint.hpp"
#include "dvr/verifiers.hpp"
#include "oracle/fuzz.hpp"

using dvr::ComparisonMode;
using dvr::ConstraintSpec;
using dvr::ConstraintType;

TEST(ConstraintType, TwentyOneFormatTypesInEightCategories) {
  const auto types = dvr::format_types();
  ASSERT_EQ(types.size(), 21u);
  std::set<std::string_view> ids;
  std::set<dvr::Category> categories;
  for (auto t : types) {
    ids.insert(dvr::type_id(t));
    categories.insert(dvr::category_of(t));
    EXPECT_EQ(dvr::type_from_id(dvr::type_id(t)), t);
  }
  EXPECT_EQ(ids.size(), 21u);
  EXPECT_EQ(categories.size(), 8u);
}

TEST(CanonicalCategory, Examples) {
  EXPECT_EQ(dvr::canonical_category("bullet points"), ConstraintType::bullet_points);
  EXPECT_EQ(dvr::canonical_category("  No Commas \n"), ConstraintType::no_commas);
  EXPECT_EQ(dvr::canonical_category("word count constraint"), ConstraintType::word_count);
  EXPECT_EQ(dvr::canonical_category("*** separator"), ConstraintType::separator_paragraphs);
  EXPECT_THROW(dvr::canonical_category("stress words limit"), dvr::UnknownCategory);
}

TEST(CanonicalCategory, RoundTripsEveryPhrase) {
  for (auto t : dvr::all_types()) EXPECT_EQ(dvr::canonical_category(dvr::category_phrase(t)), t);
}

TEST(ParseToolExpression, Examples) {
  const auto bullets = dvr::parse_tool_expression("Bullet_points(4)");
  EXPECT_EQ(bullets.spec, ConstraintSpec::exact(ConstraintType::bullet_points, 4));
  EXPECT_EQ(bullets.display_name, "Bullet_points(4)");
  const auto kw = dvr::parse_tool_expression("Keywords(\"risk-taking\")");
  EXPECT_EQ(kw.spec, ConstraintSpec::text(ConstraintType::include_keyword, "risk-taking"));
  EXPECT_THROW(dvr::parse_tool_expression("Bullet_points()"), dvr::ArityError);
  EXPECT_THROW(dvr::parse_tool_expression("Bullet_points(4"), dvr::ParseError);
  EXPECT_THROW(dvr::parse_tool_expression("Frobnicate(1)"), dvr::ParseError);
  EXPECT_EQ(dvr::parse_tool_expression("capitalwords(\"less than\", 2)").spec,
            ConstraintSpec::count(ConstraintType::capital_word_frequency, ComparisonMode::less_than, 2));
  EXPECT_EQ(dvr::parse_tool_expression("Letter_freq(\"l\", \"at least\", 7)").spec,
            ConstraintSpec::text_count(ConstraintType::letter_frequency, "l", ComparisonMode::at_least, 7));
}

TEST(ParseToolExpression, DisplayNameRoundTrips) {
  fuzz::Engine e(8);
  for (auto t : dvr::format_types()) {
    for (int i = 0; i < 20; ++i) {
      const auto spec = fuzz::spec_for(e, t);
      const auto tool = dvr::instantiate(spec);
      const auto again = dvr::parse_tool_expression(tool.display_name);
      EXPECT_EQ(again.spec, spec) << tool.display_name;
      EXPECT_TRUE(dvr::is_well_formed(again.spec));
    }
  }
}

TEST(SpecInvariants, ParametersMatchShape) {
  EXPECT_TRUE(dvr::is_well_formed(ConstraintSpec::flag(ConstraintType::no_commas)));
  EXPECT_FALSE(dvr::is_well_formed(ConstraintSpec::text(ConstraintType::no_commas, "x")));
  EXPECT_FALSE(dvr::is_well_formed(ConstraintSpec::flag(ConstraintType::include_keyword)));
  EXPECT_FALSE(dvr::is_well_formed(ConstraintSpec::count(ConstraintType::word_count, ComparisonMode::exactly, 3)));
  EXPECT_FALSE(dvr::is_well_formed(ConstraintSpec::count(ConstraintType::bullet_points, ComparisonMode::at_least, 3)));
  EXPECT_FALSE(dvr::is_well_formed(
      ConstraintSpec::text_count(ConstraintType::letter_frequency, "ab", ComparisonMode::at_least, 3)));
  EXPECT_FALSE(dvr::is_well_formed(ConstraintSpec::text(ConstraintType::language_restriction, "xx")));
  EXPECT_THROW(dvr::validate(ConstraintSpec::exact(ConstraintType::bullet_points, -1)), dvr::InvalidSpec);
}

TEST(Conflicts, Examples) {
  const auto caps = ConstraintSpec::flag(ConstraintType::all_capital);
  const auto lower = ConstraintSpec::flag(ConstraintType::all_lowercase);
  EXPECT_TRUE(dvr::conflicts(caps, lower));
  EXPECT_TRUE(dvr::conflicts(ConstraintSpec::count(ConstraintType::word_count, ComparisonMode::at_least, 50),
                             ConstraintSpec::count(ConstraintType::word_count, ComparisonMode::less_than, 40)));
  const auto bullets = ConstraintSpec::exact(ConstraintType::bullet_points, 4);
  const auto games = ConstraintSpec::text(ConstraintType::include_keyword, "games");
  EXPECT_FALSE(dvr::conflicts(bullets, games));
  // Witness that the pair is jointly satisfiable.
  const std::string witness = "* games one\n* two\n* three\n* four";
  EXPECT_TRUE(dvr::verify(dvr::instantiate(bullets), witness).satisfied);
  EXPECT_TRUE(dvr::verify(dvr::instantiate(games), witness).satisfied);
  EXPECT_TRUE(dvr::conflicts(ConstraintSpec::flag(ConstraintType::json_format), bullets));
  EXPECT_TRUE(dvr::conflicts(ConstraintSpec::flag(ConstraintType::quoted_response),
                             ConstraintSpec::text(ConstraintType::end_phrase, "Bye")));
  EXPECT_TRUE(dvr::conflicts(ConstraintSpec::text(ConstraintType::fixed_responses, "a | b"), games));
}

TEST(Conflicts, SymmetricAndSameTypeAlwaysConflicts) {
  fuzz::Engine e(21);
  const auto types = dvr::format_types();
  for (int i = 0; i < 3000; ++i) {
    const auto a = fuzz::spec_for(e, fuzz::pick(e, types));
    const auto b = fuzz::spec_for(e, fuzz::pick(e, types));
    EXPECT_EQ(dvr::conflicts(a, b), dvr::conflicts(b, a));
    if (a.type == b.type) {
      EXPECT_TRUE(dvr::conflicts(a, b));
    }
  }
}

TEST(ConstraintSpecJson, RoundTripAndSchema) {
  const auto spec = ConstraintSpec::text_count(ConstraintType::keyword_frequency, "games", ComparisonMode::less_than, 3);
  const nlohmann::json j = spec;
  EXPECT_EQ(j.dump(), R"({"comparison":"less_than","int_param":3,"text_param":"games","type":"keyword_frequency"})");
  EXPECT_EQ(j.get<ConstraintSpec>(), spec);
  EXPECT_THROW(nlohmann::json::parse(R"({"type":"nope"})").get<ConstraintSpec>(), dvr::SchemaError);
  EXPECT_THROW(nlohmann::json::parse(R"({"type":"word_count","comparison":"at_least"})").get<ConstraintSpec>(),
               dvr::SchemaError);
}
