#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "mamprop/data.hpp"
#include "mamprop/error.hpp"
#include "support.hpp"

using namespace mamprop;
using testing::bundled_registry;
using testing::kRecordHeader;

namespace {

std::string record_row(const std::string& material, const std::string& power,
                       const std::string& speed, const std::string& ys) {
  return material + ",PBF,L-PBF,EOS M290,XY,as-built,," + power + "," + speed + ",30,80," + ys +
         ",,,,,,,test\n";
}

}  // namespace

TEST_CASE("materials: Ti6Al4V thermal row") {
  const auto& m = bundled_registry()->at("Ti6Al4V");
  CHECK(*m.density == doctest::Approx(4.43));
  CHECK(*m.thermal_conductivity == doctest::Approx(7.1));
  CHECK(*m.melting_point == doctest::Approx(1695));
  CHECK(*m.cte == doctest::Approx(8.6));
  CHECK(*m.specific_heat == doctest::Approx(561.5));
  CHECK(m.composition.at("Ti") == doctest::Approx(90));
}

TEST_CASE("materials: implausible copper melting point is a warning, strict makes it fatal") {
  const auto& reg = *bundled_registry();
  CHECK(*reg.at("Copper").melting_point == doctest::Approx(9.6));
  const bool warned = std::any_of(reg.warnings.begin(), reg.warnings.end(), [](const Warning& w) {
    return w.column == "melting_point" && w.message.find("9.6") != std::string::npos;
  });
  CHECK(warned);
  LoadOptions strict;
  strict.strict = true;
  CHECK_THROWS_AS(load_materials(testing::source_path("data/materials.csv"), strict), ValidationError);
}

TEST_CASE("materials: empty file and duplicates") {
  const auto empty = parse_materials("", "empty.csv");
  CHECK(empty.size() == 0);
  CHECK(empty.warnings.empty());

  const std::string dup =
      "name,density,thermal_conductivity,melting_point,cte,specific_heat,Fe\n"
      "A,7.9,16,1400,16,500,100\n"
      "A,7.9,16,1400,16,500,100\n";
  CHECK_THROWS_AS(parse_materials(dup, "dup.csv"), ValidationError);

  const std::string bad =
      "name,density,thermal_conductivity,melting_point,cte,specific_heat,Fe\n"
      "A,7.9,sixteen,1400,16,500,100\n";
  try {
    parse_materials(bad, "bad.csv");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.csv:2") != std::string::npos);
    CHECK(msg.find("thermal_conductivity") != std::string::npos);
  }
}

TEST_CASE("materials: composition sum outside tolerance warns") {
  const std::string text =
      "name,density,thermal_conductivity,melting_point,cte,specific_heat,Fe,Ni\n"
      "Short,7.9,16,1400,16,500,50,40\n";
  const auto reg = parse_materials(text, "m.csv");
  REQUIRE(reg.size() == 1);
  CHECK_FALSE(reg.warnings.empty());
}

TEST_CASE("elements: Ti, duplicates and coverage") {
  const auto& table = testing::bundled_elements();
  REQUIRE(table.find("Ti") != nullptr);
  CHECK(table.find("Ti")->atomic_number == 22);
  CHECK(table.size() == 20);

  const std::string dup =
      "symbol,atomic_number,atomic_volume,ionization_energy,heat_of_fusion,electron_affinity\n"
      "Ti,22,10.6,6.8,14.15,0.08\n"
      "Ti,22,10.6,6.8,14.15,0.08\n";
  CHECK_THROWS_AS(parse_elements(dup, "e.csv"), ValidationError);

  std::string no_sc = "symbol,atomic_number,atomic_volume,ionization_energy,heat_of_fusion,electron_affinity\n";
  for (const auto& e : table.elements()) {
    if (e.symbol == "Sc") continue;
    no_sc += e.symbol + "," + std::to_string(e.atomic_number) + ",1,1,1,1\n";
  }
  try {
    parse_elements(no_sc, "e.csv", bundled_registry().get());
    FAIL("expected missing Sc");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("Sc") != std::string::npos);
  }
}

TEST_CASE("dataset: record 300 of the bundled sample") {
  const auto& ds = testing::bundled_records();
  REQUIRE(ds.size() == 1600);
  const DataRecord& r = ds.records[299];
  CHECK(r.material == "Ti6Al4V ELI");
  CHECK(r.process == Process::pbf);
  CHECK(r.subprocess == Subprocess::l_pbf);
  CHECK(r.machine == "EOS M4OO SF");
  CHECK(r.orientation == Orientation::horizontal);
  CHECK(r.post_processing.kind == PostProcessing::Kind::as_built);
  CHECK(*r.beam_power == 1000);
  CHECK(*r.layer_thickness == 30);
}

TEST_CASE("dataset: invalid rows are rejected with a reason") {
  const std::string text = kRecordHeader + record_row("Ti6Al4V", "200", "1000", "900") +
                           record_row("Ti6Al4V", "-5", "1000", "900") +
                           "Ti6Al4V,PBF,L-PBF,EOS M290,XY,as-built,,200,1000,30,80,,,,,,,,test\n";
  const auto ds = parse_dataset(text, "r.csv", bundled_registry());
  CHECK(ds.size() == 1);
  REQUIRE(ds.issues.size() == 2);
  CHECK(ds.issues[0].column == "beam_power");
  CHECK(ds.issues[0].rejected);
  CHECK(ds.issues[1].rejected);

  CHECK_THROWS_AS(parse_dataset(kRecordHeader + record_row("Unobtainium", "1", "1", "1"), "r.csv",
                                bundled_registry()),
                  ValidationError);
}

TEST_CASE("dataset: orientation and unknown post-processing levels") {
  CHECK(parse_orientation("XY") == Orientation::horizontal);
  CHECK(parse_orientation("Z") == Orientation::vertical);
  CHECK(parse_orientation("45") == Orientation::deg45);

  const std::string text = kRecordHeader +
                           "Ti6Al4V,PBF,L-PBF,EOS M290,XY,laser polished,,200,1000,30,80,900,,,,,,,t\n";
  CHECK_THROWS_AS(parse_dataset(text, "r.csv", bundled_registry()), ValidationError);
  LoadOptions lenient;
  lenient.map_unknown_to_other = true;
  const auto ds = parse_dataset(text, "r.csv", bundled_registry(), lenient);
  REQUIRE(ds.size() == 1);
  CHECK(ds.records[0].post_processing.kind == PostProcessing::Kind::other);
  CHECK(ds.records[0].post_processing.tag == "laser polished");
}

TEST_CASE("round trip: serialize(load(x)) is a fixed point") {
  const auto reg_text = serialize_materials(*bundled_registry());
  const auto reg2 = parse_materials(reg_text, "again.csv");
  CHECK(serialize_materials(reg2) == reg_text);

  const auto el_text = serialize_elements(testing::bundled_elements());
  CHECK(serialize_elements(parse_elements(el_text, "again.csv")) == el_text);

  const auto ds_text = serialize_dataset(testing::bundled_records());
  const auto ds2 = parse_dataset(ds_text, "again.csv", bundled_registry());
  CHECK(serialize_dataset(ds2) == ds_text);
  REQUIRE(ds2.size() == testing::bundled_records().size());
  CHECK(ds2.records[299].machine == "EOS M4OO SF");
}

TEST_CASE("select_complete: filter semantics, idempotence, monotonicity") {
  const std::string text = kRecordHeader + record_row("Ti6Al4V", "200", "1000", "900") +
                           record_row("IN718", "250", "", "1000") +
                           record_row("SS316L", "300", "800", "500");
  const auto ds = parse_dataset(text, "r.csv", bundled_registry());
  REQUIRE(ds.size() == 3);

  const auto with_speed = select_complete(ds, {{RequiredField::scan_speed}}, LabelKind::ys);
  REQUIRE(with_speed.size() == 2);
  CHECK(with_speed.records[0].material == "Ti6Al4V");
  CHECK(with_speed.records[1].material == "SS316L");

  CHECK(select_complete(ds, {}, LabelKind::ys).size() == 3);
  CHECK(select_complete(ds, {}, LabelKind::uts).size() == 0);

  const auto& big = testing::bundled_records();
  FeatureRequest req{{RequiredField::beam_power, RequiredField::density}};
  const auto once = select_complete(big, req, LabelKind::ys);
  const auto twice = select_complete(once, req, LabelKind::ys);
  CHECK(serialize_dataset(once) == serialize_dataset(twice));
  req.fields.push_back(RequiredField::scan_speed);
  CHECK(select_complete(big, req, LabelKind::ys).size() <= once.size());
  req.fields.push_back(RequiredField::surface_condition);
  CHECK(select_complete(big, req, LabelKind::ys).size() <= once.size());
}

TEST_CASE("summarize: counting, histograms and label totals") {
  std::string text = kRecordHeader;
  const char* subs[] = {"L-PBF", "E-PBF", "L-DED", "E-DED", "Arc-DED", "Wire-L-DED"};
  for (const char* s : subs) {
    text += std::string("Ti6Al4V,,") + s + ",M1,XY,as-built,,200,1000,30,80,900,,,,,,,t\n";
  }
  const auto ds = parse_dataset(text, "r.csv", bundled_registry());
  REQUIRE(ds.size() == 6);
  const auto stats = summarize(ds);
  for (const auto& [level, count] : stats.categories.at("subprocess")) CHECK(count == 1);
  CHECK(stats.categories.at("subprocess").size() == 6);
  const auto& power = *std::find_if(stats.histograms.begin(), stats.histograms.end(),
                                    [](const Histogram& h) { return h.quantity == "beam_power"; });
  CHECK(power.counts.size() == 20);
  CHECK(std::count_if(power.counts.begin(), power.counts.end(), [](auto c) { return c > 0; }) == 1);

  CHECK_THROWS(summarize(Dataset{bundled_registry(), {}, {}}));

  const auto full = summarize(testing::bundled_records());
  CHECK(full.label_counts.at("ys") == 1218);
  CHECK(full.label_counts.at("uts") == 1244);
  CHECK(full.label_counts.at("e_mod") == 432);
  CHECK(full.label_counts.at("elongation") == 1198);
  CHECK(full.label_counts.at("hv") == 293);
  CHECK(full.label_counts.at("hrc") == 230);
  CHECK(full.label_counts.at("rz") == 218);
  for (const auto& [axis, levels] : full.categories) {
    std::size_t total = 0;
    for (const auto& [level, count] : levels) total += count;
    CHECK_MESSAGE(total == full.n_records, axis);
  }
}
