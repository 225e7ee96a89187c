#include <gtest/gtest.h>

#include <set>

#include "dvr/synth.hpp"
#include "dvr/verifiers.hpp"

using dvr::ConstraintSpec;
using dvr::ConstraintType;

TEST(RewriteSeed, Examples) {
  EXPECT_EQ(dvr::rewrite_seed("Write a 3-paragraph essay"), "Write a 3-text essay");
  EXPECT_EQ(dvr::rewrite_seed("Write two sentences. Paragraphs help."), "Write two text. Text help.");
  EXPECT_EQ(dvr::rewrite_seed("paragraphing sentenced"), "paragraphing sentenced");
  EXPECT_EQ(dvr::rewrite_seed(""), "");
}

TEST(SampleConstraints, SizeDistinctTypesNoConflicts) {
  dvr::Rng rng(9);
  for (int level = dvr::kMinLevel; level <= dvr::kMaxLevel; ++level) {
    for (int i = 0; i < 200; ++i) {
      const auto specs = dvr::sample_constraints(level, rng);
      ASSERT_EQ(static_cast<int>(specs.size()), level);
      std::set<ConstraintType> types;
      for (std::size_t a = 0; a < specs.size(); ++a) {
        types.insert(specs[a].type);
        EXPECT_TRUE(dvr::is_well_formed(specs[a]));
        for (std::size_t b = a + 1; b < specs.size(); ++b) EXPECT_FALSE(dvr::conflicts(specs[a], specs[b]));
      }
      EXPECT_EQ(types.size(), specs.size());
      EXPECT_FALSE(types.count(ConstraintType::all_capital) && types.count(ConstraintType::all_lowercase));
    }
  }
}

TEST(SampleConstraints, RejectsOutOfRangeLevels) {
  dvr::Rng rng(0);
  EXPECT_THROW(dvr::sample_constraints(0, rng), dvr::InvalidSpec);
  EXPECT_THROW(dvr::sample_constraints(7, rng), dvr::InvalidSpec);
}

TEST(SampleConstraints, FrozenLevelSixSeedZero) {
  dvr::Rng rng(0);
  const auto specs = dvr::sample_constraints(6, rng);
  const std::vector<ConstraintSpec> want{
      ConstraintSpec::text_count(ConstraintType::keyword_frequency, "change", dvr::ComparisonMode::at_least, 6),
      ConstraintSpec::text_count(ConstraintType::letter_frequency, "p", dvr::ComparisonMode::at_least, 10),
      ConstraintSpec::count(ConstraintType::capital_word_frequency, dvr::ComparisonMode::at_least, 1),
      ConstraintSpec::flag(ConstraintType::no_commas),
      ConstraintSpec::exact(ConstraintType::separator_paragraphs, 2),
      ConstraintSpec::exact(ConstraintType::bullet_points, 4)};
  EXPECT_EQ(specs, want);
}

TEST(RenderInstruction, Examples) {
  dvr::Rng rng(1);
  const auto bullets = dvr::render_instruction("Write a paragraph about games.",
                                               {ConstraintSpec::exact(ConstraintType::bullet_points, 4)}, rng);
  EXPECT_EQ(bullets.text.rfind("Write a text about games. ", 0), 0u);
  EXPECT_NE(bullets.text.find("exactly 4 bullet"), std::string::npos);
  const auto plain = dvr::render_instruction("  Describe a city  ", {}, rng);
  EXPECT_EQ(plain.text, "Describe a city");
  EXPECT_EQ(plain.level, 0);
  bool saw_title_markup = false;
  for (int i = 0; i < 40; ++i) {
    const auto t = dvr::render_instruction("Describe a city", {ConstraintSpec::flag(ConstraintType::title_format)}, rng);
    saw_title_markup |= t.text.find("<<") != std::string::npos;
  }
  EXPECT_TRUE(saw_title_markup);
}

TEST(RenderInstruction, ParametersAppearInText) {
  dvr::Rng rng(2);
  for (int i = 0; i < 300; ++i) {
    const auto specs = dvr::sample_constraints(1 + i % 6, rng);
    const auto in = dvr::render_instruction("Write about rivers.", specs, rng);
    for (const auto& s : specs) {
      if (s.int_param) {
        EXPECT_NE(in.text.find(std::to_string(*s.int_param)), std::string::npos) << in.text;
      }
      if (s.text_param && s.type != ConstraintType::language_restriction && s.type != ConstraintType::fixed_responses) {
        EXPECT_NE(in.text.find(*s.text_param), std::string::npos) << in.text;
      }
    }
  }
}

TEST(PhrasingBank, EveryFormatTypeHasEightTemplates) {
  for (auto t : dvr::format_types()) EXPECT_GE(dvr::templates_for(t).size(), 8u) << dvr::type_id(t);
}

TEST(BuildDataset, OrderedByLevelAndDeterministic) {
  dvr::SynthConfig cfg;
  cfg.seeds = {"Write a story about a dog.", "Explain how tides work in two paragraphs."};
  cfg.per_level = 2;
  cfg.rng_seed = 7;
  const auto a = dvr::build_dataset(cfg);
  ASSERT_EQ(a.size(), 12u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].level, static_cast<int>(i / 2) + 1);
    EXPECT_TRUE(dvr::validate_instruction(a[i]).empty());
    EXPECT_EQ(a[i].text.rfind(dvr::rewrite_seed(a[i].seed), 0), 0u);
    EXPECT_EQ(dvr::rewrite_seed(a[i].seed).find("paragraphs"), std::string::npos);
  }
  EXPECT_EQ(a[0].id, "L1-0000");
  EXPECT_EQ(a[11].id, "L6-0001");
  EXPECT_EQ(dvr::to_jsonl(a), dvr::to_jsonl(dvr::build_dataset(cfg)));
  cfg.rng_seed = 8;
  EXPECT_NE(dvr::to_jsonl(a), dvr::to_jsonl(dvr::build_dataset(cfg)));
}

TEST(BuildDataset, JsonlRoundTrip) {
  dvr::SynthConfig cfg;
  cfg.seeds = {"Write a poem about snow."};
  cfg.per_level = 3;
  const auto a = dvr::build_dataset(cfg);
  const auto path = std::filesystem::temp_directory_path() / "dvr_synth_roundtrip.jsonl";
  dvr::write_dataset(a, path);
  EXPECT_EQ(dvr::read_dataset(path), a);
  std::filesystem::remove(path);
  cfg.seeds.clear();
  EXPECT_THROW(dvr::build_dataset(cfg), dvr::IOFailure);
}

TEST(ValidateInstruction, FlagsProblems) {
  dvr::Instruction in;
  in.level = 2;
  in.ground_truth = {ConstraintSpec::flag(ConstraintType::all_capital), ConstraintSpec::flag(ConstraintType::all_lowercase)};
  const auto problems = dvr::validate_instruction(in);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_EQ(problems[0], "conflict between all_capital and all_lowercase");
  in.level = 3;
  EXPECT_EQ(dvr::validate_instruction(in).size(), 2u);
}
