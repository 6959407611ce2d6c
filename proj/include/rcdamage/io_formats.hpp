#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rcdamage/cost_model.hpp"
#include "rcdamage/error.hpp"
#include "rcdamage/fusion.hpp"
#include "rcdamage/geometry.hpp"
#include "rcdamage/yolo_decode.hpp"

// File formats. docs/formats.md is the normative description; in short:
//
//  * Structured files are JSON, saved as 2-space indented text with keys in
//    schema order and a trailing newline. Reals always carry a decimal point
//    or exponent; integers never do. A canonical file is one that save()
//    reproduces byte for byte.
//  * Tensors are a JSON header plus a raw payload of little-endian float32.
//  * Anchor lists, sweeps and labels are small CSV files with a header row.
//  * Coordinates are pixels, origin top-left, y down.

namespace rcdamage::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class format_error : public input_error {
public:
  using input_error::input_error;
};

inline constexpr std::string_view annotations_tag = "rcdamage.annotations/1";
inline constexpr std::string_view detections_tag = "rcdamage.detections/1";
inline constexpr std::string_view tensor_tag = "rcdamage.tensor/1";
inline constexpr std::string_view inventory_tag = "rcdamage.inventory/1";
inline constexpr std::string_view fragility_tag = "rcdamage.fragility/1";

// ---------------------------------------------------------------------------
// text helpers

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string read_text(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw format_error(path.string() + ": cannot open for reading");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_text(const fs::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw format_error(path.string() + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw format_error(path.string() + ": write failed");
}

inline std::string canonical_text(const json &j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// located JSON access

/// A JSON node together with its location, used to build error messages of
/// the form "file: $.images[2].boxes[0].width: must be > 0".
class Node {
public:
  Node(const json &j, std::string file, std::string path = "$")
      : j_(&j), file_(std::move(file)), path_(std::move(path)) {}

  const json &value() const { return *j_; }
  const std::string &path() const { return path_; }

  [[noreturn]] void fail(const std::string &msg) const {
    throw format_error(file_ + ": " + path_ + ": " + msg);
  }

  Node at(std::string_view key) const {
    expect_object();
    auto it = j_->find(std::string(key));
    if (it == j_->end())
      Node(*j_, file_, path_).fail("missing key '" + std::string(key) + "'");
    return Node(*it, file_, path_ + "." + std::string(key));
  }
  bool has(std::string_view key) const {
    return j_->is_object() && j_->contains(std::string(key));
  }
  Node operator[](std::size_t i) const {
    return Node((*j_)[i], file_, path_ + "[" + std::to_string(i) + "]");
  }
  std::size_t size() const { return j_->size(); }

  void expect_object() const {
    if (!j_->is_object())
      fail("expected an object");
  }
  void expect_array() const {
    if (!j_->is_array())
      fail("expected an array");
  }
  void only_keys(std::initializer_list<std::string_view> allowed) const {
    expect_object();
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool ok = false;
      for (auto a : allowed)
        ok = ok || it.key() == a;
      if (!ok)
        fail("unexpected key '" + it.key() + "'");
    }
  }

  double number() const {
    if (!j_->is_number())
      fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v))
      fail("expected a finite number");
    return v;
  }
  std::int64_t integer() const {
    if (!j_->is_number_integer())
      fail("expected an integer");
    return j_->get<std::int64_t>();
  }
  std::string string() const {
    if (!j_->is_string())
      fail("expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean())
      fail("expected true or false");
    return j_->get<bool>();
  }
  void expect_tag(std::string_view tag) const {
    const std::string got = at("format").string();
    if (got != tag)
      at("format").fail("expected format '" + std::string(tag) + "', got '" + got + "'");
  }

private:
  const json *j_;
  std::string file_;
  std::string path_;
};

inline json parse_json(const std::string &text, const std::string &file) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw format_error(file + ": malformed JSON: " + e.what());
  }
}

// JSON reals are written as doubles so they keep a decimal point.
inline json real(double v) { return json(v); }

// ---------------------------------------------------------------------------
// boxes

inline BoundingBox parse_box(const Node &n, bool require_score) {
  n.only_keys({"x_min", "y_min", "width", "height", "class_id", "score"});
  BoundingBox b;
  b.x_min = n.at("x_min").number();
  b.y_min = n.at("y_min").number();
  b.width = n.at("width").number();
  b.height = n.at("height").number();
  const auto cid = n.at("class_id").integer();
  if (cid < 0 || cid > std::numeric_limits<int>::max())
    n.at("class_id").fail("must be a non-negative integer");
  b.class_id = static_cast<int>(cid);
  if (!(b.width > 0.0))
    n.at("width").fail("must be > 0");
  if (!(b.height > 0.0))
    n.at("height").fail("must be > 0");
  if (n.has("score")) {
    const double s = n.at("score").number();
    if (!(s >= 0.0 && s <= 1.0))
      n.at("score").fail("must lie in [0,1]");
    b.score = s;
  } else if (require_score) {
    n.fail("missing key 'score'");
  }
  return b;
}

inline json box_to_json(const BoundingBox &b) {
  json j = json::object();
  j["x_min"] = real(b.x_min);
  j["y_min"] = real(b.y_min);
  j["width"] = real(b.width);
  j["height"] = real(b.height);
  j["class_id"] = b.class_id.value_or(0);
  if (b.score)
    j["score"] = real(*b.score);
  return j;
}

// ---------------------------------------------------------------------------
// annotation / detection files

struct ImageRecord {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<BoundingBox> boxes;
};

/// Ground-truth boxes (kind annotations) or scored model output (kind
/// detections) for a list of images. Both share one schema.
struct BoxFile {
  enum class Kind { annotations, detections };
  Kind kind = Kind::annotations;
  std::vector<ImageRecord> images;

  const ImageRecord *find(std::string_view id) const {
    for (const auto &im : images)
      if (im.id == id)
        return &im;
    return nullptr;
  }
};

inline BoxFile parse_box_file(const json &j, const std::string &file, BoxFile::Kind kind) {
  const bool det = kind == BoxFile::Kind::detections;
  Node root(j, file);
  root.only_keys({"format", "images"});
  root.expect_tag(det ? detections_tag : annotations_tag);
  BoxFile out;
  out.kind = kind;
  Node images = root.at("images");
  images.expect_array();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < images.size(); ++i) {
    Node im = images[i];
    im.only_keys({"id", "width", "height", "boxes"});
    ImageRecord rec;
    rec.id = im.at("id").string();
    if (rec.id.empty())
      im.at("id").fail("must not be empty");
    if (!ids.insert(rec.id).second)
      im.at("id").fail("duplicate image id '" + rec.id + "'");
    const auto w = im.at("width").integer();
    const auto h = im.at("height").integer();
    if (w < 1 || w > std::numeric_limits<int>::max())
      im.at("width").fail("must be a positive integer");
    if (h < 1 || h > std::numeric_limits<int>::max())
      im.at("height").fail("must be a positive integer");
    rec.width = static_cast<int>(w);
    rec.height = static_cast<int>(h);
    Node boxes = im.at("boxes");
    boxes.expect_array();
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      Node bn = boxes[k];
      BoundingBox b = parse_box(bn, det);
      if (!det) {
        if (bn.has("score"))
          bn.at("score").fail("ground-truth boxes carry no score");
        if (b.x_min < 0.0 || b.y_min < 0.0 || b.x_max() > rec.width || b.y_max() > rec.height)
          bn.fail("box extends outside the " + std::to_string(rec.width) + "x" +
                  std::to_string(rec.height) + " image");
      }
      rec.boxes.push_back(b);
    }
    out.images.push_back(std::move(rec));
  }
  return out;
}

inline json to_json(const BoxFile &f) {
  json j = json::object();
  j["format"] = f.kind == BoxFile::Kind::detections ? detections_tag : annotations_tag;
  json images = json::array();
  for (const auto &im : f.images) {
    json ji = json::object();
    ji["id"] = im.id;
    ji["width"] = im.width;
    ji["height"] = im.height;
    json boxes = json::array();
    for (const auto &b : im.boxes)
      boxes.push_back(box_to_json(b));
    ji["boxes"] = std::move(boxes);
    images.push_back(std::move(ji));
  }
  j["images"] = std::move(images);
  return j;
}

inline BoxFile load_annotations(const fs::path &path) {
  return parse_box_file(parse_json(read_text(path), path.string()), path.string(),
                        BoxFile::Kind::annotations);
}
inline BoxFile load_detections(const fs::path &path) {
  return parse_box_file(parse_json(read_text(path), path.string()), path.string(),
                        BoxFile::Kind::detections);
}
inline void save(const fs::path &path, const BoxFile &f) {
  write_text(path, canonical_text(to_json(f)));
}

// ---------------------------------------------------------------------------
// tensor files

struct TensorFile {
  DetectionTensor tensor;
  std::string data; // payload path, relative to the header's directory
};

inline std::vector<double> read_float32_le(const fs::path &path, std::size_t expected,
                                           const std::string &header) {
  const std::string bytes = read_text(path);
  if (bytes.size() % 4 != 0 || bytes.size() / 4 != expected)
    throw format_error(header + ": $.data: payload '" + path.string() + "' holds " +
                       std::to_string(bytes.size()) + " bytes (" +
                       std::to_string(bytes.size() / 4) + " floats), expected " +
                       std::to_string(expected) + " floats (" +
                       std::to_string(4 * expected) + " bytes)");
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint32_t u = 0;
    for (int b = 3; b >= 0; --b)
      u = (u << 8) | static_cast<unsigned char>(bytes[4 * i + static_cast<std::size_t>(b)]);
    out[i] = static_cast<double>(std::bit_cast<float>(u));
  }
  return out;
}

inline std::string float32_le_bytes(const std::vector<double> &values) {
  std::string bytes(values.size() * 4, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(values[i]));
    for (int b = 0; b < 4; ++b)
      bytes[4 * i + static_cast<std::size_t>(b)] = static_cast<char>((u >> (8 * b)) & 0xffu);
  }
  return bytes;
}

inline TensorFile load_tensor(const fs::path &path) {
  const std::string file = path.string();
  const json j = parse_json(read_text(path), file);
  Node root(j, file);
  root.only_keys({"format", "grid_h", "grid_w", "num_anchors", "num_classes", "image_w",
                  "image_h", "data"});
  root.expect_tag(tensor_tag);
  auto positive = [&](std::string_view key) {
    const auto v = root.at(key).integer();
    if (v < 1 || v > 1'000'000)
      root.at(key).fail("must be an integer in [1, 1000000]");
    return static_cast<int>(v);
  };
  TensorFile tf;
  DetectionTensor &t = tf.tensor;
  t.grid_h = positive("grid_h");
  t.grid_w = positive("grid_w");
  t.num_anchors = positive("num_anchors");
  t.num_classes = positive("num_classes");
  t.image_w = positive("image_w");
  t.image_h = positive("image_h");
  tf.data = root.at("data").string();
  if (tf.data.empty())
    root.at("data").fail("must name the payload file");
  t.values = read_float32_le(path.parent_path() / tf.data, t.expected_size(), file);
  return tf;
}

/// Writes the header at `path` and the payload next to it under `tf.data`.
inline void save(const fs::path &path, const TensorFile &tf) {
  validate(tf.tensor);
  if (tf.data.empty())
    throw format_error(path.string() + ": tensor payload name is empty");
  const DetectionTensor &t = tf.tensor;
  json j = json::object();
  j["format"] = tensor_tag;
  j["grid_h"] = t.grid_h;
  j["grid_w"] = t.grid_w;
  j["num_anchors"] = t.num_anchors;
  j["num_classes"] = t.num_classes;
  j["image_w"] = t.image_w;
  j["image_h"] = t.image_h;
  j["data"] = tf.data;
  write_text(path, canonical_text(j));
  write_text(path.parent_path() / tf.data, float32_le_bytes(t.values));
}

// ---------------------------------------------------------------------------
// fragility database

inline CostDistribution parse_distribution(const Node &n) {
  const std::string s = n.string();
  if (s == "lognormal")
    return CostDistribution::lognormal;
  if (s == "normal")
    return CostDistribution::normal;
  n.fail("distribution must be 'lognormal' or 'normal', got '" + s + "'");
}

inline DamageState parse_state(const Node &n) {
  const std::string s = n.string();
  if (auto ds = parse_damage_state(s))
    return *ds;
  n.fail("unknown damage state '" + s + "' (expected DS0..DS3)");
}

inline FragilityDatabase parse_fragility(const json &j, const std::string &file) {
  Node root(j, file);
  root.only_keys({"format", "entries"});
  root.expect_tag(fragility_tag);
  Node entries = root.at("entries");
  entries.expect_object();
  FragilityDatabase db;
  for (auto it = entries.value().begin(); it != entries.value().end(); ++it) {
    Node e(it.value(), file, entries.path() + "." + it.key());
    e.only_keys({"q_min", "q_max", "note", "damage_states"});
    FragilityEntry fe;
    fe.component_id = it.key();
    fe.q_min = e.at("q_min").number();
    fe.q_max = e.at("q_max").number();
    if (e.has("note"))
      fe.note = e.at("note").string();
    Node states = e.at("damage_states");
    states.expect_array();
    for (std::size_t i = 0; i < states.size(); ++i) {
      Node s = states[i];
      s.only_keys({"ds", "cost_at_min_qty", "cost_at_max_qty", "dispersion", "distribution"});
      ConsequenceRecord r;
      r.ds = parse_state(s.at("ds"));
      r.cost_at_min_qty = s.at("cost_at_min_qty").number();
      r.cost_at_max_qty = s.at("cost_at_max_qty").number();
      r.dispersion = s.at("dispersion").number();
      r.distribution = parse_distribution(s.at("distribution"));
      fe.records.push_back(r);
    }
    try {
      validate(fe, e.path());
    } catch (const data_error &err) {
      throw format_error(file + ": " + err.what());
    }
    db.emplace(fe.component_id, std::move(fe));
  }
  return db;
}

inline json to_json(const FragilityDatabase &db) {
  json j = json::object();
  j["format"] = fragility_tag;
  json entries = json::object();
  for (const auto &[id, fe] : db) {
    json e = json::object();
    e["q_min"] = real(fe.q_min);
    e["q_max"] = real(fe.q_max);
    if (!fe.note.empty())
      e["note"] = fe.note;
    json states = json::array();
    for (const auto &r : fe.records) {
      json s = json::object();
      s["ds"] = to_string(r.ds);
      s["cost_at_min_qty"] = real(r.cost_at_min_qty);
      s["cost_at_max_qty"] = real(r.cost_at_max_qty);
      s["dispersion"] = real(r.dispersion);
      s["distribution"] = to_string(r.distribution);
      states.push_back(std::move(s));
    }
    e["damage_states"] = std::move(states);
    entries[id] = std::move(e);
  }
  j["entries"] = std::move(entries);
  return j;
}

inline FragilityDatabase load_fragility(const fs::path &path) {
  return parse_fragility(parse_json(read_text(path), path.string()), path.string());
}
inline void save(const fs::path &path, const FragilityDatabase &db) {
  write_text(path, canonical_text(to_json(db)));
}

// ---------------------------------------------------------------------------
// building inventory

/// Detections for one view: either a detection file (path relative to the
/// inventory) or an inline list.
using DetectionSource = std::variant<std::string, std::vector<BoundingBox>>;

struct ViewRecord {
  ClassificationOutput classification;
  DetectionSource detections = std::vector<BoundingBox>{};
};

struct ComponentRecord {
  std::string component_id;
  std::vector<ViewRecord> views; // one entry unless several images exist
};

struct GroupRecord {
  std::string fragility_id;
  double quantity = 1.0;
  std::vector<ComponentRecord> components;
};

struct InventoryFile {
  double replacement_cost = 0.0;
  double collapse_probability = 0.0;
  std::vector<GroupRecord> groups;
};

inline ViewRecord parse_view(const Node &n) {
  ViewRecord v;
  Node probs = n.at("classifier_probabilities");
  probs.only_keys({"DS0", "DS1", "DS2", "DS3"});
  double sum = 0.0;
  for (DamageState ds : all_damage_states) {
    Node p = probs.at(to_string(ds));
    const double x = p.number();
    if (!(x >= 0.0 && x <= 1.0))
      p.fail("probability must lie in [0,1]");
    v.classification.probabilities[index_of(ds)] = x;
    sum += x;
  }
  if (std::abs(sum - 1.0) > probability_sum_tolerance)
    probs.fail("probabilities sum to " + format_number(sum) + ", expected 1");
  Node d = n.at("detections");
  if (d.value().is_string()) {
    const std::string p = d.string();
    if (p.empty())
      d.fail("detection file path is empty");
    v.detections = p;
  } else {
    d.expect_array();
    std::vector<BoundingBox> boxes;
    for (std::size_t i = 0; i < d.size(); ++i)
      boxes.push_back(parse_box(d[i], true));
    v.detections = std::move(boxes);
  }
  return v;
}

inline void view_to_json(json &j, const ViewRecord &v) {
  json probs = json::object();
  for (DamageState ds : all_damage_states)
    probs[std::string(to_string(ds))] = real(v.classification.probabilities[index_of(ds)]);
  j["classifier_probabilities"] = std::move(probs);
  if (const auto *path = std::get_if<std::string>(&v.detections)) {
    j["detections"] = *path;
  } else {
    json boxes = json::array();
    for (const auto &b : std::get<std::vector<BoundingBox>>(v.detections))
      boxes.push_back(box_to_json(b));
    j["detections"] = std::move(boxes);
  }
}

inline InventoryFile parse_inventory(const json &j, const std::string &file) {
  Node root(j, file);
  root.only_keys({"format", "building", "groups"});
  root.expect_tag(inventory_tag);
  InventoryFile inv;
  Node b = root.at("building");
  b.only_keys({"replacement_cost", "collapse_probability"});
  inv.replacement_cost = b.at("replacement_cost").number();
  if (!(inv.replacement_cost >= 0.0))
    b.at("replacement_cost").fail("must be >= 0");
  inv.collapse_probability = b.at("collapse_probability").number();
  if (!(inv.collapse_probability >= 0.0 && inv.collapse_probability <= 1.0))
    b.at("collapse_probability").fail("must lie in [0,1]");

  Node groups = root.at("groups");
  groups.expect_array();
  std::set<std::string> ids;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Node gn = groups[g];
    gn.only_keys({"fragility_id", "quantity", "components"});
    GroupRecord gr;
    gr.fragility_id = gn.at("fragility_id").string();
    if (gr.fragility_id.empty())
      gn.at("fragility_id").fail("must not be empty");
    gr.quantity = gn.at("quantity").number();
    if (!(gr.quantity > 0.0))
      gn.at("quantity").fail("must be > 0");
    Node comps = gn.at("components");
    comps.expect_array();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      Node cn = comps[c];
      ComponentRecord cr;
      if (cn.has("views")) {
        cn.only_keys({"component_id", "views"});
        Node views = cn.at("views");
        views.expect_array();
        if (views.size() < 2)
          views.fail("a views list needs at least two entries; write a single view inline");
        for (std::size_t v = 0; v < views.size(); ++v) {
          views[v].only_keys({"classifier_probabilities", "detections"});
          cr.views.push_back(parse_view(views[v]));
        }
      } else {
        cn.only_keys({"component_id", "classifier_probabilities", "detections"});
        cr.views.push_back(parse_view(cn));
      }
      cr.component_id = cn.at("component_id").string();
      if (cr.component_id.empty())
        cn.at("component_id").fail("must not be empty");
      if (!ids.insert(cr.component_id).second)
        cn.at("component_id").fail("duplicate component id '" + cr.component_id + "'");
      gr.components.push_back(std::move(cr));
    }
    inv.groups.push_back(std::move(gr));
  }
  return inv;
}

inline json to_json(const InventoryFile &inv) {
  json j = json::object();
  j["format"] = inventory_tag;
  json b = json::object();
  b["replacement_cost"] = real(inv.replacement_cost);
  b["collapse_probability"] = real(inv.collapse_probability);
  j["building"] = std::move(b);
  json groups = json::array();
  for (const auto &g : inv.groups) {
    json gj = json::object();
    gj["fragility_id"] = g.fragility_id;
    gj["quantity"] = real(g.quantity);
    json comps = json::array();
    for (const auto &c : g.components) {
      json cj = json::object();
      cj["component_id"] = c.component_id;
      if (c.views.size() == 1) {
        view_to_json(cj, c.views.front());
      } else {
        json views = json::array();
        for (const auto &v : c.views) {
          json vj = json::object();
          view_to_json(vj, v);
          views.push_back(std::move(vj));
        }
        cj["views"] = std::move(views);
      }
      comps.push_back(std::move(cj));
    }
    gj["components"] = std::move(comps);
    groups.push_back(std::move(gj));
  }
  j["groups"] = std::move(groups);
  return j;
}

inline InventoryFile load_inventory(const fs::path &path) {
  return parse_inventory(parse_json(read_text(path), path.string()), path.string());
}
inline void save(const fs::path &path, const InventoryFile &inv) {
  write_text(path, canonical_text(to_json(inv)));
}

/// Boxes for a view; file references are read relative to `base_dir` and
/// contribute the boxes of every image they contain.
inline std::vector<BoundingBox> resolve(const DetectionSource &src, const fs::path &base_dir) {
  if (const auto *inline_boxes = std::get_if<std::vector<BoundingBox>>(&src))
    return *inline_boxes;
  const BoxFile f = load_detections(base_dir / std::get<std::string>(src));
  std::vector<BoundingBox> out;
  for (const auto &im : f.images)
    out.insert(out.end(), im.boxes.begin(), im.boxes.end());
  return out;
}

// ---------------------------------------------------------------------------
// CSV files

inline std::vector<std::vector<std::string>> read_csv(const fs::path &path,
                                                      std::vector<std::string> header) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
    const std::string where = path.string() + ": line " + std::to_string(lineno);
    if (!seen_header) {
      if (cells != header) {
        std::string want;
        for (const auto &h : header)
          want += (want.empty() ? "" : ",") + h;
        throw format_error(where + ": expected header '" + want + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size())
      throw format_error(where + ": expected " + std::to_string(header.size()) +
                         " columns, got " + std::to_string(cells.size()));
    rows.push_back(std::move(cells));
  }
  if (!seen_header)
    throw format_error(path.string() + ": empty file, expected a header row");
  return rows;
}

inline double parse_real(const std::string &cell, const std::string &where) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw format_error(where + ": '" + cell + "' is not a finite number");
  return v;
}

inline std::vector<AnchorPrior> load_anchors(const fs::path &path) {
  const auto rows = read_csv(path, {"width", "height"});
  std::vector<AnchorPrior> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = path.string() + ": row " + std::to_string(i + 1);
    AnchorPrior a{parse_real(rows[i][0], where), parse_real(rows[i][1], where)};
    if (!(a.width > 0.0) || !(a.height > 0.0))
      throw format_error(where + ": anchor width and height must be > 0");
    out.push_back(a);
  }
  if (out.empty())
    throw format_error(path.string() + ": no anchors listed");
  return out;
}

inline std::string anchors_csv(const std::vector<AnchorPrior> &anchors) {
  std::string s = "width,height\n";
  for (const auto &a : anchors)
    s += format_number(a.width) + "," + format_number(a.height) + "\n";
  return s;
}

/// `id,label` rows, e.g. classifier predictions or ground-truth labels.
struct LabelRow {
  std::string id;
  std::string label;
};

inline std::vector<LabelRow> load_labels(const fs::path &path) {
  const auto rows = read_csv(path, {"id", "label"});
  std::vector<LabelRow> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = path.string() + ": row " + std::to_string(i + 1);
    if (rows[i][0].empty() || rows[i][1].empty())
      throw format_error(where + ": id and label must not be empty");
    if (!ids.insert(rows[i][0]).second)
      throw format_error(where + ": duplicate id '" + rows[i][0] + "'");
    out.push_back({rows[i][0], rows[i][1]});
  }
  return out;
}

inline std::string labels_csv(const std::vector<LabelRow> &rows) {
  std::string s = "id,label\n";
  for (const auto &r : rows)
    s += r.id + "," + r.label + "\n";
  return s;
}

} // namespace rcdamage::io
