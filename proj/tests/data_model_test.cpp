#include "churnfuse/data_model.hpp"

#include <random>

#include "support.hpp"

namespace cf = churnfuse;
using namespace churnfuse::data;
using cf::ErrorCode;

namespace {

SchemaSpec two_features() { return SchemaSpec{{"fin_a", "crm_b"}}; }

const char* kThreeRows =
    "id,fin_a,crm_b,fl_label,audio_ref,churn\n"
    "a,0.5,-1,0.25,audio/a.wav,0\n"
    "b,1e-3,2.5,,,1\n"
    "c,3,4,1,audio/c.wav,\n";

}  // namespace

TEST(Emotion, BinaryMapping) {
  EXPECT_EQ(map_emotion_to_binary(Emotion::Happiness), 0);
  EXPECT_EQ(map_emotion_to_binary(Emotion::Neutral), 0);
  EXPECT_EQ(map_emotion_to_binary(Emotion::Sadness), 1);
  EXPECT_EQ(map_emotion_to_binary(Emotion::Anger), 1);
  EXPECT_EQ(map_emotion_to_binary("Anger"), 1);
  EXPECT_CODE(map_emotion_to_binary("Fear"), ErrorCode::UnknownLabel);
}

TEST(Emotion, NamesRoundTrip) {
  for (auto e : {Emotion::Happiness, Emotion::Neutral, Emotion::Sadness, Emotion::Anger}) {
    EXPECT_EQ(parse_emotion(emotion_name(e)), e);
  }
  for (auto r : {RiskLabel::Low, RiskLabel::Mid, RiskLabel::High}) {
    EXPECT_EQ(parse_risk_label(risk_label_name(r)), r);
  }
}

TEST(EmotionPrediction, BinaryMustMatchLabel) {
  EXPECT_NO_THROW(validate(EmotionPrediction{Emotion::Sadness, 1, 0.7}));
  EXPECT_CODE(validate(EmotionPrediction{Emotion::Sadness, 0, 0.7}), ErrorCode::ValueError);
  EXPECT_CODE(validate(EmotionPrediction{Emotion::Neutral, 0, 1.5}), ErrorCode::ValueError);
}

TEST(ModalityScores, RangeChecked) {
  ModalityScores s;
  s.fl_score = 0.4;
  s.churn_propensity = 0.9;
  EXPECT_NO_THROW(validate(s));
  s.fl_score = -0.1;
  EXPECT_CODE(validate(s), ErrorCode::ValueError);
}

TEST(ParseTable, EmptyBody) {
  const auto t = parse_customer_table("id,fin_a,crm_b,fl_label,audio_ref,churn\n", two_features());
  EXPECT_EQ(t.size(), 0u);
}

TEST(ParseTable, ThreeRows) {
  const auto t = parse_customer_table(kThreeRows, two_features());
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].id, "a");
  EXPECT_EQ(t[1].id, "b");
  EXPECT_EQ(t[2].id, "c");
  EXPECT_DOUBLE_EQ(t[1].features[0], 1e-3);
  EXPECT_FALSE(t[1].fl_label);
  EXPECT_FALSE(t[1].audio_ref);
  EXPECT_EQ(t[1].churn_outcome, 1);
  EXPECT_FALSE(t[2].churn_outcome);
  EXPECT_EQ(t.find("c"), 2u);
  EXPECT_FALSE(t.find("zz"));
}

TEST(ParseTable, ColumnOrderIsFree) {
  const auto t = parse_customer_table("churn,crm_b,id,audio_ref,fl_label,fin_a\n1,7,x,,0.5,3\n", two_features());
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].features, (std::vector<double>{3, 7}));
  EXPECT_EQ(t[0].churn_outcome, 1);
}

TEST(ParseTable, Rejections) {
  const std::string header = "id,fin_a,crm_b,fl_label,audio_ref,churn\n";
  EXPECT_CODE(parse_customer_table(header + "a,1,2,,,2\n", two_features()), ErrorCode::ValueError);
  EXPECT_CODE(parse_customer_table(header + "a,1,x,,,0\n", two_features()), ErrorCode::ValueError);
  EXPECT_CODE(parse_customer_table(header + "a,1,,,,0\n", two_features()), ErrorCode::ValueError);
  EXPECT_CODE(parse_customer_table(header + "a,1,2,1.5,,0\n", two_features()), ErrorCode::ValueError);
  EXPECT_CODE(parse_customer_table(header + "a,1,2,,,0\na,3,4,,,1\n", two_features()), ErrorCode::DuplicateId);
  EXPECT_CODE(parse_customer_table("id,fin_a,fl_label,audio_ref,churn\n", two_features()), ErrorCode::SchemaMismatch);
  EXPECT_CODE(parse_customer_table("id,fin_a,crm_c,fl_label,audio_ref,churn\n", two_features()),
              ErrorCode::SchemaMismatch);
}

TEST(ParseTable, WriteParseRoundTrip) {
  const auto t = parse_customer_table(kThreeRows, two_features());
  const auto text = write_customer_table(t);
  const auto again = parse_customer_table(text, two_features());
  ASSERT_EQ(again.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(again[i].id, t[i].id);
    EXPECT_EQ(again[i].features, t[i].features);
    EXPECT_EQ(again[i].fl_label, t[i].fl_label);
    EXPECT_EQ(again[i].audio_ref, t[i].audio_ref);
    EXPECT_EQ(again[i].churn_outcome, t[i].churn_outcome);
  }
  EXPECT_EQ(write_customer_table(again), text);
}

// Random records, some deliberately invalid: the table accepts exactly the
// ones satisfying every record invariant.
TEST(ParseTable, RandomRecordsProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto schema = two_features();
  for (int trial = 0; trial < 300; ++trial) {
    const double fl = u(rng);
    const int churn = static_cast<int>(rng() % 3);
    const double f0 = u(rng);
    const std::string row = "r," + format_double(f0) + ",1," + format_double(fl) + ",," + std::to_string(churn) + "\n";
    const bool valid = fl >= 0.0 && fl <= 1.0 && churn <= 1;
    const std::string text = "id,fin_a,crm_b,fl_label,audio_ref,churn\n" + row;
    if (valid) {
      const auto t = parse_customer_table(text, schema);
      EXPECT_EQ(t[0].features[0], f0);
      EXPECT_EQ(*t[0].fl_label, fl);
    } else {
      EXPECT_CODE(parse_customer_table(text, schema), ErrorCode::ValueError);
    }
  }
}

TEST(CustomerTable, ConstructorValidates) {
  CustomerRecord r{"a", {1.0}, std::nullopt, std::nullopt, 1};
  EXPECT_CODE(CustomerTable(two_features(), {r}), ErrorCode::SchemaMismatch);
  r.features = {1.0, 2.0};
  r.churn_outcome = 3;
  EXPECT_CODE(CustomerTable(two_features(), {r}), ErrorCode::ValueError);
}

TEST(CustomerTable, ProjectAndSubset) {
  const auto t = parse_customer_table(kThreeRows, two_features());
  EXPECT_EQ(t.project(0, {1}), std::vector<double>{-1.0});
  const auto s = t.subset({2, 0});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].id, "c");
  EXPECT_EQ(s.find("a"), 1u);
}

TEST(Schema, PrefixesAndHeader) {
  const SchemaSpec s{{"fin_1", "crm_1", "fin_2"}};
  EXPECT_EQ(s.columns_with_prefix("fin_"), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(s.columns_with_prefix("crm_"), (std::vector<std::size_t>{1}));
  EXPECT_EQ(SchemaSpec::from_header("id,fin_1,crm_1,fin_2,fl_label,audio_ref,churn"), s);
}

TEST(Record, KeyValueRoundTrip) {
  const auto schema = two_features();
  const CustomerRecord r{"cust-9", {0.125, -3.5}, 0.75, std::string("audio/x.wav"), 0};
  const auto text = format_record(r, schema);
  EXPECT_NE(text.find("fin_a = 0.125"), std::string::npos);
  const auto back = parse_record(text, schema);
  EXPECT_EQ(back.id, r.id);
  EXPECT_EQ(back.features, r.features);
  EXPECT_EQ(back.fl_label, r.fl_label);
  EXPECT_EQ(back.audio_ref, r.audio_ref);
  EXPECT_EQ(back.churn_outcome, r.churn_outcome);
}

TEST(Format, ShortestRoundTrip) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_FALSE(parse_double("1.0x"));
  EXPECT_FALSE(parse_double("nan"));
}
