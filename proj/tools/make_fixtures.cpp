// Regenerates tests/fixtures. Usage: make_fixtures <fixtures-dir>
//
// Valid fixtures are written with the library's own savers so they are
// canonical by construction. Negative fixtures are edited copies, each
// breaking exactly one rule; invalid/expected.csv lists the kind to load them
// as and a fragment the error message must contain.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "rcdamage/rcdamage.hpp"

namespace fs = std::filesystem;
using namespace rcdamage;
using io::json;

namespace {

ClassificationOutput probs(double p0, double p1, double p2, double p3) {
  return {{p0, p1, p2, p3}};
}

DetectionTensor case_tensor(bool with_rebar) {
  DetectionTensor t = make_tensor(26, 26, 10, 1, 416, 416, 0.0);
  for (std::size_t s = 0; s < t.num_slots(); ++s)
    t.slot(s)[ch_obj] = -8.0;
  if (with_rebar)
    t.values[t.value_index(13, 12, 0, ch_obj)] = 8.0;
  return t;
}

void write_case(const fs::path &root) {
  const fs::path dir = root / "case";
  fs::create_directories(dir / "tensors");
  fs::create_directories(dir / "detections");

  for (const char *name : {"rebar", "clean"}) {
    const bool rebar = std::string(name) == "rebar";
    io::TensorFile tf{case_tensor(rebar), std::string(name) + ".bin"};
    io::save(dir / "tensors" / (std::string(name) + ".json"), tf);
    io::BoxFile f;
    f.kind = io::BoxFile::Kind::detections;
    f.images.push_back({name, 416, 416, decode_tensor(tf.tensor, {column_rebar_anchors(), 0.5, 0.5})});
    io::save(dir / "detections" / (std::string(name) + ".json"), f);
  }

  const std::string clean = "detections/clean.json";
  const std::string rebar = "detections/rebar.json";
  auto one = [](ClassificationOutput c, io::DetectionSource d) {
    return std::vector<io::ViewRecord>{{c, std::move(d)}};
  };

  // 57 columns over three storeys: 17 DS1, 26 DS2, 14 DS3 after fusion.
  io::InventoryFile inv;
  inv.replacement_cost = 12000000.0;
  inv.collapse_probability = 0.01;
  int next = 1;
  auto id = [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%02d", next++);
    return std::string(buf);
  };
  io::GroupRecord floors[3];
  for (auto &f : floors) {
    f.fragility_id = "B1041.031a";
    f.quantity = 1.0;
  }
  // DS1: classifier DS1, no steel. One of them photographed twice.
  for (int i = 0; i < 16; ++i)
    floors[i % 3].components.push_back({id(), one(probs(0.1, 0.7, 0.15, 0.05), clean)});
  floors[0].components.push_back(
      {id(),
       {{probs(0.2, 0.6, 0.15, 0.05), clean}, {probs(0.05, 0.55, 0.35, 0.05), clean}}});
  // DS2: classifier DS2; two carry weak inline detections below threshold.
  for (int i = 0; i < 24; ++i)
    floors[i % 3].components.push_back({id(), one(probs(0.05, 0.2, 0.65, 0.1), clean)});
  for (int i = 0; i < 2; ++i) {
    BoundingBox weak{150.0, 160.0, 60.0, 40.0, 0.3, 0};
    floors[1].components.push_back(
        {id(), one(probs(0.05, 0.25, 0.6, 0.1), std::vector<BoundingBox>{weak})});
  }
  // DS3: 8 from the classifier alone, 5 classified DS2 but with exposed rebar,
  // and one with two views where only the second sees rebar.
  for (int i = 0; i < 8; ++i)
    floors[i % 3].components.push_back({id(), one(probs(0.0, 0.05, 0.15, 0.8), clean)});
  for (int i = 0; i < 5; ++i)
    floors[(i + 1) % 3].components.push_back({id(), one(probs(0.05, 0.15, 0.55, 0.25), rebar)});
  floors[2].components.push_back(
      {id(),
       {{probs(0.05, 0.2, 0.6, 0.15), clean}, {probs(0.05, 0.2, 0.5, 0.25), rebar}}});
  for (auto &f : floors)
    inv.groups.push_back(std::move(f));
  io::save(dir / "inventory.json", inv);

  // Consequence data for an RC column (FEMA P-58 B1041.031a). The quantity
  // thresholds are not published alongside the costs and are placeholders.
  auto fragility = [](bool zero_dispersion) {
    FragilityEntry e;
    e.component_id = "B1041.031a";
    e.q_min = 5.0;
    e.q_max = 20.0;
    e.note = "q_min and q_max are placeholders, not published values";
    auto beta = [&](double b) { return zero_dispersion ? 0.0 : b; };
    e.records = {{DamageState::DS0, 0.0, 0.0, 0.0, CostDistribution::lognormal},
                 {DamageState::DS1, 25704.0, 20910.0, beta(0.39), CostDistribution::lognormal},
                 {DamageState::DS2, 38978.0, 25986.0, beta(0.32), CostDistribution::lognormal},
                 {DamageState::DS3, 47978.0, 31986.0, beta(0.3), CostDistribution::lognormal}};
    FragilityDatabase db;
    db.emplace(e.component_id, e);
    return db;
  };
  io::save(dir / "fragility.json", fragility(false));
  io::save(dir / "fragility_zero.json", fragility(true));

  io::InventoryFile collapsed = inv;
  collapsed.collapse_probability = 0.99;
  fs::create_directories(root / "collapse");
  io::save(root / "collapse" / "inventory.json", collapsed);
}

void write_detector(const fs::path &root) {
  const fs::path dir = root / "detector";
  fs::create_directories(dir);
  io::BoxFile gt;
  gt.images.push_back({"img1", 100, 100,
                       {{10.0, 10.0, 20.0, 20.0, {}, 0}, {60.0, 60.0, 20.0, 20.0, {}, 0}}});
  io::save(dir / "ground_truth.json", gt);

  io::BoxFile perfect;
  perfect.kind = io::BoxFile::Kind::detections;
  perfect.images.push_back({"img1", 100, 100,
                            {{10.0, 10.0, 20.0, 20.0, 1.0, 0}, {60.0, 60.0, 20.0, 20.0, 1.0, 0}}});
  io::save(dir / "detections_perfect.json", perfect);

  io::BoxFile three;
  three.kind = io::BoxFile::Kind::detections;
  three.images.push_back({"img1", 100, 100,
                          {{10.0, 10.0, 20.0, 20.0, 0.9, 0},
                           {40.0, 10.0, 10.0, 10.0, 0.8, 0},
                           {60.0, 60.0, 20.0, 20.0, 0.7, 0}}});
  io::save(dir / "detections_three.json", three);

  io::BoxFile none;
  none.kind = io::BoxFile::Kind::detections;
  none.images.push_back({"img1", 100, 100, {}});
  io::save(dir / "detections_empty.json", none);
}

void write_classifier(const fs::path &root) {
  const fs::path dir = root / "classifier";
  fs::create_directories(dir);
  // 4-class fixture; rows truth, columns prediction:
  //   DS0: 5 1 0 0 | DS1: 1 4 1 0 | DS2: 0 1 3 1 | DS3: 0 0 1 2
  const int table[4][4] = {{5, 1, 0, 0}, {1, 4, 1, 0}, {0, 1, 3, 1}, {0, 0, 1, 2}};
  std::vector<io::LabelRow> preds, labels;
  int n = 0;
  for (int t = 0; t < 4; ++t)
    for (int p = 0; p < 4; ++p)
      for (int k = 0; k < table[t][p]; ++k) {
        const std::string id = "img" + std::to_string(++n);
        labels.push_back({id, "DS" + std::to_string(t)});
        preds.push_back({id, "DS" + std::to_string(p)});
      }
  io::write_text(dir / "ds_labels.csv", io::labels_csv(labels));
  io::write_text(dir / "ds_predictions.csv", io::labels_csv(preds));

  // Collapse set: 19 of 20 collapsed buildings recognized, 18 of 20 intact.
  preds.clear();
  labels.clear();
  for (int i = 0; i < 40; ++i) {
    const std::string id = "b" + std::to_string(i + 1);
    const bool collapsed = i < 20;
    labels.push_back({id, collapsed ? "collapse" : "no-collapse"});
    const bool wrong = i == 19 || i == 38 || i == 39;
    preds.push_back({id, (collapsed != wrong) ? "collapse" : "no-collapse"});
  }
  io::write_text(dir / "collapse_labels.csv", io::labels_csv(labels));
  io::write_text(dir / "collapse_predictions.csv", io::labels_csv(preds));
}

void write_annotations(const fs::path &root) {
  const fs::path dir = root / "annotations";
  fs::create_directories(dir);
  io::BoxFile two;
  io::ImageRecord im{"shapes", 640, 480, {}};
  for (int i = 0; i < 10; ++i) {
    im.boxes.push_back({10.0 + 20.0 * i, 10.0, 50.0, 50.0, {}, 0});
    im.boxes.push_back({10.0 + 40.0 * (i % 10), 200.0, 200.0, 100.0, {}, 0});
  }
  two.images.push_back(im);
  io::save(dir / "two_shapes.json", two);

  io::BoxFile same;
  same.images.push_back({"same", 416, 416, {}});
  for (int i = 0; i < 6; ++i)
    same.images[0].boxes.push_back({5.0 * i, 0.0, 100.0, 200.0, {}, 0});
  io::save(dir / "identical.json", same);

  // Truth matching the rebar tensor's hot cell, for the loss subcommand.
  io::BoxFile rebar;
  rebar.images.push_back({"rebar", 416, 416, {{148.0, 167.0, 104.0, 98.0, {}, 0}}});
  io::save(dir / "rebar_truth.json", rebar);
}

struct Negative {
  std::string file;
  std::string kind;
  std::string expect;
};

void write_negatives(const fs::path &root) {
  const fs::path dir = root / "invalid";
  fs::create_directories(dir);
  std::vector<Negative> list;
  auto put = [&](const std::string &name, const json &j, const std::string &kind,
                 const std::string &expect) {
    io::write_text(dir / name, io::canonical_text(j));
    list.push_back({name, kind, expect});
  };

  const json ann = io::to_json(io::load_annotations(root / "detector" / "ground_truth.json"));
  {
    json j = ann;
    j["images"][0]["boxes"][1]["x_min"] = 90.0;
    put("annotations_box_outside_image.json", j, "annotations", "$.images[0].boxes[1]: box extends outside");
  }
  {
    json j = ann;
    j["images"][0]["boxes"][0]["width"] = 0.0;
    put("annotations_zero_width.json", j, "annotations", "$.images[0].boxes[0].width: must be > 0");
  }
  {
    json j = ann;
    j["images"][0]["boxes"][0]["height"] = -3.0;
    put("annotations_negative_height.json", j, "annotations", "$.images[0].boxes[0].height: must be > 0");
  }
  {
    json j = ann;
    j["images"][0].erase("width");
    put("annotations_missing_width.json", j, "annotations", "$.images[0]: missing key 'width'");
  }
  {
    json j = ann;
    j["images"][0]["boxes"][0]["score"] = 0.5;
    put("annotations_scored_truth.json", j, "annotations", "$.images[0].boxes[0].score: ground-truth boxes carry no score");
  }
  {
    json j = ann;
    j["images"].push_back(j["images"][0]);
    put("annotations_duplicate_image.json", j, "annotations", "$.images[1].id: duplicate image id");
  }
  {
    json j = ann;
    j["images"][0]["height"] = 100.5;
    put("annotations_fractional_height.json", j, "annotations", "$.images[0].height: expected an integer");
  }
  {
    json j = ann;
    j["images"][0]["boxes"][0]["colour"] = "red";
    put("annotations_unknown_key.json", j, "annotations", "$.images[0].boxes[0]: unexpected key 'colour'");
  }
  {
    json j = ann;
    j["format"] = "rcdamage.detections/1";
    put("annotations_wrong_format.json", j, "annotations", "$.format: expected format 'rcdamage.annotations/1'");
  }

  const json det = io::to_json(io::load_detections(root / "detector" / "detections_three.json"));
  {
    json j = det;
    j["images"][0]["boxes"][2]["score"] = 1.5;
    put("detections_score_above_one.json", j, "detections", "$.images[0].boxes[2].score: must lie in [0,1]");
  }
  {
    json j = det;
    j["images"][0]["boxes"][1].erase("score");
    put("detections_missing_score.json", j, "detections", "$.images[0].boxes[1]: missing key 'score'");
  }

  const json frag = io::to_json(io::load_fragility(root / "case" / "fragility.json"));
  const std::string e = "/entries/B1041.031a";
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/3/cost_at_max_qty")] = 50000.0;
    put("fragility_diseconomy_of_scale.json", j, "fragility", "$.entries.B1041.031a.damage_states[3]: cost_at_min_qty must be >= cost_at_max_qty");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/q_max")] = 5.0;
    put("fragility_quantity_order.json", j, "fragility", "$.entries.B1041.031a: q_min must be < q_max");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/0/cost_at_min_qty")] = 10.0;
    j[json::json_pointer(e + "/damage_states/0/cost_at_max_qty")] = 10.0;
    put("fragility_ds0_nonzero.json", j, "fragility", "$.entries.B1041.031a.damage_states[0]: DS0 record must have zero costs");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/2/dispersion")] = -0.1;
    put("fragility_negative_dispersion.json", j, "fragility", "$.entries.B1041.031a.damage_states[2]: dispersion must be finite and >= 0");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/1/distribution")] = "uniform";
    put("fragility_bad_distribution.json", j, "fragility", "$.entries.B1041.031a.damage_states[1].distribution: distribution must be");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/2/ds")] = "DS1";
    put("fragility_duplicate_state.json", j, "fragility", "$.entries.B1041.031a.damage_states[2]: duplicate record for DS1");
  }
  {
    json j = frag;
    j[json::json_pointer(e + "/damage_states/1/cost_at_max_qty")] = -1.0;
    j[json::json_pointer(e + "/damage_states/1/cost_at_min_qty")] = -1.0;
    put("fragility_negative_cost.json", j, "fragility", "$.entries.B1041.031a.damage_states[1]: costs must be finite and >= 0");
  }

  const json inv = io::to_json(io::load_inventory(root / "case" / "inventory.json"));
  {
    json j = inv;
    j["groups"][0]["components"][0]["classifier_probabilities"]["DS1"] = 0.6;
    put("inventory_probabilities_not_normalized.json", j, "inventory", "$.groups[0].components[0].classifier_probabilities: probabilities sum to");
  }
  {
    json j = inv;
    j["groups"][0]["components"][0]["classifier_probabilities"]["DS0"] = -0.1;
    j["groups"][0]["components"][0]["classifier_probabilities"]["DS1"] = 0.9;
    put("inventory_negative_probability.json", j, "inventory", "$.groups[0].components[0].classifier_probabilities.DS0: probability must lie in [0,1]");
  }
  {
    json j = inv;
    j["groups"][1]["components"][0]["component_id"] = "C01";
    put("inventory_duplicate_component.json", j, "inventory", "$.groups[1].components[0].component_id: duplicate component id 'C01'");
  }
  {
    json j = inv;
    j["groups"][2]["quantity"] = 0.0;
    put("inventory_zero_quantity.json", j, "inventory", "$.groups[2].quantity: must be > 0");
  }
  {
    json j = inv;
    j["building"]["collapse_probability"] = 1.2;
    put("inventory_collapse_probability.json", j, "inventory", "$.building.collapse_probability: must lie in [0,1]");
  }
  {
    json j = inv;
    j["groups"][0]["components"][0]["views"] = json::array({j["groups"][0]["components"][1]});
    j["groups"][0]["components"][0].erase("classifier_probabilities");
    j["groups"][0]["components"][0].erase("detections");
    j["groups"][0]["components"][0]["views"][0].erase("component_id");
    put("inventory_single_view_list.json", j, "inventory", "$.groups[0].components[0].views: a views list needs at least two entries");
  }

  // Tensor headers. The short payload drops one float from 26*26*60.
  {
    io::TensorFile tf{case_tensor(false), "short.bin"};
    json h = json::object();
    h["format"] = io::tensor_tag;
    h["grid_h"] = 26;
    h["grid_w"] = 26;
    h["num_anchors"] = 10;
    h["num_classes"] = 1;
    h["image_w"] = 416;
    h["image_h"] = 416;
    h["data"] = "short.bin";
    tf.tensor.values.pop_back();
    io::write_text(dir / "short.bin", io::float32_le_bytes(tf.tensor.values));
    put("tensor_short_payload.json", h, "tensor", "holds 162236 bytes (40559 floats), expected 40560 floats");
    json z = h;
    z["grid_w"] = 0;
    put("tensor_zero_grid.json", z, "tensor", "$.grid_w: must be an integer in [1, 1000000]");
    json m = h;
    m.erase("data");
    put("tensor_missing_data.json", m, "tensor", "$: missing key 'data'");
  }

  std::string csv = "file,kind,expect\n";
  for (const auto &n : list)
    csv += n.file + "," + n.kind + "," + n.expect + "\n";
  io::write_text(dir / "expected.csv", csv);
}

} // namespace

int main(int argc, char **argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <fixtures-dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  try {
    write_case(root);
    write_detector(root);
    write_classifier(root);
    write_annotations(root);
    write_negatives(root);
  } catch (const std::exception &e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
