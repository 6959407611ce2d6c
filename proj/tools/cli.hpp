#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "rcdamage/rcdamage.hpp"

namespace rcdamage::cli {

namespace fs = std::filesystem;
using io::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_internal = 3;

inline std::string sha256_hex(const std::string &bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
  static const char *hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

/// Records what a run consumed and how it was configured. Written next to the
/// outputs, or to stderr when data goes to stdout.
class Manifest {
public:
  explicit Manifest(std::string subcommand) {
    j_["tool"] = "rcdamage";
    j_["version"] = rcdamage::version;
    j_["subcommand"] = std::move(subcommand);
    j_["options"] = json::object();
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }
  template <class T> void option(const std::string &key, const T &v) { j_["options"][key] = v; }
  void seed(std::uint64_t s) { j_["seed"] = s; }
  void input(const fs::path &p) {
    json e = json::object();
    e["path"] = p.generic_string();
    e["sha256"] = sha256_hex(io::read_text(p));
    j_["inputs"].push_back(std::move(e));
  }
  void output(const std::string &p) { j_["outputs"].push_back(p); }

  void write(const std::string &anchor, std::ostream &err) const {
    if (anchor == "-") {
      err << j_.dump() << "\n";
      return;
    }
    io::write_text(anchor + ".manifest.json", io::canonical_text(j_));
  }

private:
  json j_ = json::object();
};

class Emitter {
public:
  Emitter(std::ostream &out, Manifest &m) : out_(out), m_(m) {}
  void emit(const std::string &path, const std::string &text) {
    if (path == "-") {
      out_ << text;
      out_.flush();
    } else {
      io::write_text(path, text);
      m_.output(path);
    }
  }

private:
  std::ostream &out_;
  Manifest &m_;
};

inline std::vector<AnchorPrior> load_anchors_arg(const std::string &arg, Manifest &m) {
  if (arg == "preset:column-rebar")
    return column_rebar_anchors();
  m.input(arg);
  return io::load_anchors(arg);
}

inline std::vector<GroundTruthBox> truths_of(const io::ImageRecord &im) {
  std::vector<GroundTruthBox> out;
  for (const auto &b : im.boxes)
    out.push_back({b, b.class_id.value_or(0)});
  return out;
}

// --------------------------------------------------------------------------

struct DecodeArgs {
  std::string tensor, anchors, out, image_id;
  double score_threshold = 0.5;
  double nms_iou = 0.5;
};

inline void run_decode(const DecodeArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("decode");
  m.option("tensor", a.tensor);
  m.option("anchors", a.anchors);
  m.option("score_threshold", a.score_threshold);
  m.option("nms_iou", a.nms_iou);
  m.input(a.tensor);
  const io::TensorFile tf = io::load_tensor(a.tensor);
  m.input(fs::path(a.tensor).parent_path() / tf.data);
  DecodeConfig cfg{load_anchors_arg(a.anchors, m), a.score_threshold, a.nms_iou};
  const auto boxes = decode_tensor(tf.tensor, cfg);

  io::BoxFile f;
  f.kind = io::BoxFile::Kind::detections;
  const std::string id = a.image_id.empty() ? fs::path(a.tensor).stem().string() : a.image_id;
  m.option("image_id", id);
  f.images.push_back({id, tf.tensor.image_w, tf.tensor.image_h, boxes});
  Emitter e(out, m);
  e.emit(a.out, io::canonical_text(io::to_json(f)));
  m.write(a.out, err);
  err << "decode: " << boxes.size() << " detection(s) from " << tf.tensor.num_slots()
      << " candidates\n";
}

// --------------------------------------------------------------------------

struct ClusterArgs {
  std::string annotations, out, sweep, sweep_out;
  std::size_t k = 10;
  int restarts = 10;
  std::uint64_t seed = 0;
};

inline std::pair<std::size_t, std::size_t> parse_range(const std::string &s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos)
    throw input_error("--sweep: expected A..B, got '" + s + "'");
  try {
    std::size_t used = 0;
    const std::string lo = s.substr(0, dots), hi = s.substr(dots + 2);
    const auto a = std::stoul(lo, &used);
    if (used != lo.size())
      throw std::invalid_argument(lo);
    const auto b = std::stoul(hi, &used);
    if (used != hi.size())
      throw std::invalid_argument(hi);
    return {a, b};
  } catch (const std::logic_error &) {
    throw input_error("--sweep: expected A..B with integers, got '" + s + "'");
  }
}

inline void run_cluster(const ClusterArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("cluster-anchors");
  m.option("annotations", a.annotations);
  m.option("k", a.k);
  m.option("restarts", a.restarts);
  m.option("sweep", a.sweep);
  m.seed(a.seed);
  m.input(a.annotations);
  const io::BoxFile ann = io::load_annotations(a.annotations);
  std::vector<BoxDims> dims;
  for (const auto &im : ann.images)
    for (const auto &b : im.boxes)
      dims.push_back({b.width, b.height});

  Emitter e(out, m);
  const ClusterResult r = kmeans_iou(dims, a.k, a.seed, a.restarts);
  e.emit(a.out, io::anchors_csv(r.anchors));
  err << "cluster-anchors: k=" << a.k << " mean IoU " << io::format_number(r.mean_iou)
      << " (seed " << r.seed << ", " << r.iterations << " iterations)\n";

  if (!a.sweep.empty()) {
    const auto [k0, k1] = parse_range(a.sweep);
    std::string path = a.sweep_out;
    if (path.empty()) {
      if (a.out == "-")
        throw input_error("--sweep-out is required when --out is '-'");
      path = a.out + ".sweep.csv";
    }
    std::string csv = "k,mean_iou\n";
    for (const auto &p : sweep_k(dims, k0, k1, a.seed, a.restarts))
      csv += std::to_string(p.k) + "," + io::format_number(p.mean_iou) + "\n";
    e.emit(path, csv);
  }
  m.write(a.out, err);
}

// --------------------------------------------------------------------------

struct EvalDetArgs {
  std::string detections, ground_truth, out_prefix;
  double iou = 0.5;
  bool svg = false;
};

inline void run_evaluate_detector(const EvalDetArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("evaluate-detector");
  m.option("detections", a.detections);
  m.option("ground_truth", a.ground_truth);
  m.option("iou", a.iou);
  m.input(a.detections);
  m.input(a.ground_truth);
  if (!(a.iou > 0.0 && a.iou <= 1.0))
    throw input_error("--iou must lie in (0,1]");
  const io::BoxFile dets = io::load_detections(a.detections);
  const io::BoxFile gt = io::load_annotations(a.ground_truth);

  std::vector<std::vector<BoundingBox>> d;
  std::vector<std::vector<GroundTruthBox>> t;
  for (const auto &im : gt.images) {
    t.push_back(truths_of(im));
    const auto *di = dets.find(im.id);
    d.push_back(di ? di->boxes : std::vector<BoundingBox>{});
  }
  for (const auto &im : dets.images) {
    if (!gt.find(im.id)) {
      d.push_back(im.boxes);
      t.emplace_back();
    }
  }
  const DetectorReport rep = evaluate_detector(d, t, a.iou);

  std::string csv = "class_id,recall,precision\n";
  json summary = json::object();
  summary["iou_threshold"] = a.iou;
  json classes = json::array();
  std::vector<svg::Series> series;
  for (const auto &[cid, curve] : rep.per_class) {
    svg::Series s{"class " + std::to_string(cid) + " AP " + io::format_number(curve.ap), {}};
    for (const auto &p : curve.points) {
      csv += std::to_string(cid) + "," + io::format_number(p.recall) + "," +
             io::format_number(p.precision) + "\n";
      s.points.emplace_back(p.recall, p.precision);
    }
    series.push_back(std::move(s));
    json c = json::object();
    c["class_id"] = cid;
    c["ap"] = curve.ap;
    c["num_truths"] = curve.num_truths;
    c["num_detections"] = curve.num_detections;
    c["no_truths"] = curve.no_truths;
    classes.push_back(std::move(c));
    if (curve.no_truths)
      err << "evaluate-detector: class " << cid << " has detections but no ground truth; AP set to 0\n";
  }
  summary["classes"] = std::move(classes);
  summary["map"] = rep.map;

  Emitter e(out, m);
  e.emit(a.out_prefix + "_pr.csv", csv);
  e.emit(a.out_prefix + "_summary.json", io::canonical_text(summary));
  if (a.svg) {
    svg::PlotOptions plot{"Precision-recall", "Recall", "Precision", 0, 1, 0, 1.05, false};
    e.emit(a.out_prefix + "_pr.svg", svg::line_plot(plot, series));
  }
  m.write(a.out_prefix, err);
  err << "evaluate-detector: mAP " << io::format_number(rep.map) << "\n";
}

// --------------------------------------------------------------------------

struct EvalClsArgs {
  std::string predictions, labels, out, classes;
};

inline std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma - start));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

inline void run_evaluate_classifier(const EvalClsArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("evaluate-classifier");
  m.option("predictions", a.predictions);
  m.option("labels", a.labels);
  m.input(a.predictions);
  m.input(a.labels);
  const auto preds = io::load_labels(a.predictions);
  const auto labels = io::load_labels(a.labels);

  std::map<std::string, std::string> by_id;
  for (const auto &p : preds)
    by_id[p.id] = p.label;
  if (by_id.size() != labels.size())
    throw input_error("evaluate-classifier: " + std::to_string(preds.size()) +
                      " predictions but " + std::to_string(labels.size()) + " labels");
  std::vector<std::string> p, t;
  std::set<std::string> seen;
  for (const auto &l : labels) {
    auto it = by_id.find(l.id);
    if (it == by_id.end())
      throw input_error(a.predictions + ": no prediction for id '" + l.id + "'");
    t.push_back(l.label);
    p.push_back(it->second);
    seen.insert(l.label);
    seen.insert(it->second);
  }

  std::vector<std::string> classes;
  if (!a.classes.empty()) {
    classes = split_list(a.classes);
  } else {
    auto subset = [&](const std::vector<std::string> &set) {
      return std::all_of(seen.begin(), seen.end(), [&](const std::string &s) {
        return std::find(set.begin(), set.end(), s) != set.end();
      });
    };
    if (subset(damage_state_classes()))
      classes = damage_state_classes();
    else if (subset(collapse_classes()))
      classes = collapse_classes();
    else
      throw input_error("evaluate-classifier: labels are neither DS0..DS3 nor "
                        "collapse/no-collapse; pass --classes");
  }
  std::string joined;
  for (const auto &c : classes)
    joined += (joined.empty() ? "" : ",") + c;
  m.option("classes", joined);

  const ConfusionMatrix cm = confusion(p, t, classes);
  std::string csv = "matrix,truth," + joined + "\n";
  for (std::size_t i = 0; i < classes.size(); ++i) {
    csv += "counts," + classes[i];
    for (std::size_t v : cm.counts[i])
      csv += "," + std::to_string(v);
    csv += "\n";
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    csv += "normalized," + classes[i];
    for (double v : cm.normalized[i])
      csv += "," + io::format_number(v);
    csv += "\n";
    if (cm.zero_support[i])
      err << "evaluate-classifier: class '" << classes[i] << "' has no ground-truth samples\n";
  }
  const double acc = accuracy(cm);
  Emitter e(out, m);
  e.emit(a.out, csv);
  m.write(a.out, err);
  err << "evaluate-classifier: accuracy " << io::format_number(acc) << " over " << cm.total()
      << " samples\n";
}

// --------------------------------------------------------------------------

struct FuseArgs {
  std::string inventory, out;
  double det_threshold = 0.5;
  double collapse_threshold = 0.5;
};

inline std::string fusion_csv(const InventoryAssessment &a) {
  std::string csv = "component_id,fragility_id,classifier_state,steel_detected,final_state\n";
  if (a.building.collapsed) {
    csv += "building,,,,collapsed\n";
    return csv;
  }
  for (std::size_t i = 0; i < a.building.components.size(); ++i) {
    const auto &c = a.building.components[i];
    csv += c.component_id + "," + a.fragility_ids[i] + "," +
           std::string(to_string(c.classifier_state)) + "," +
           (c.steel_detected ? "true" : "false") + "," + std::string(to_string(c.final_state)) +
           "\n";
  }
  return csv;
}

inline void report_counts(const InventoryAssessment &a, const char *cmd, std::ostream &err) {
  if (a.building.collapsed) {
    err << cmd << ": building collapsed; replacement cost applies\n";
    return;
  }
  const auto n = a.state_counts();
  err << cmd << ": " << a.building.components.size() << " components: DS0 " << n[0] << ", DS1 "
      << n[1] << ", DS2 " << n[2] << ", DS3 " << n[3] << "\n";
}

inline void run_fuse(const FuseArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("fuse");
  m.option("inventory", a.inventory);
  m.option("det_threshold", a.det_threshold);
  m.option("collapse_threshold", a.collapse_threshold);
  m.input(a.inventory);
  const auto inv = io::load_inventory(a.inventory);
  const auto assessed = assess_inventory(inv, fs::path(a.inventory).parent_path(),
                                         {a.det_threshold, a.collapse_threshold});
  Emitter e(out, m);
  e.emit(a.out, fusion_csv(assessed));
  m.write(a.out, err);
  report_counts(assessed, "fuse", err);
}

// --------------------------------------------------------------------------

struct CostArgs {
  std::string inventory, fragility, out_prefix;
  std::size_t realizations = 10000;
  std::uint64_t seed = 0;
  bool costs_are_means = false;
  double det_threshold = 0.5;
  double collapse_threshold = 0.5;
  unsigned threads = 0;
  bool svg = false;
};

inline void run_estimate_cost(const CostArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("estimate-cost");
  m.option("inventory", a.inventory);
  m.option("fragility", a.fragility);
  m.option("realizations", a.realizations);
  m.option("costs_are_means", a.costs_are_means);
  m.option("det_threshold", a.det_threshold);
  m.option("collapse_threshold", a.collapse_threshold);
  m.seed(a.seed);
  m.input(a.inventory);
  m.input(a.fragility);
  const auto inv = io::load_inventory(a.inventory);
  const auto db = io::load_fragility(a.fragility);
  const auto assessed = assess_inventory(inv, fs::path(a.inventory).parent_path(),
                                         {a.det_threshold, a.collapse_threshold});

  SimulationOptions opt;
  opt.realizations = a.realizations;
  opt.seed = a.seed;
  opt.costs_are_means = a.costs_are_means;
  opt.threads = a.threads;
  if (assessed.building.collapsed)
    opt.replacement_cost = inv.replacement_cost;
  const LossCurve curve = simulate_total(performance_groups(inv, assessed), db, opt);

  const std::size_t n = curve.realizations.size();
  std::string csv = "cost,cumulative_probability\n";
  svg::Series s{"empirical CDF", {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double cp = static_cast<double>(i + 1) / static_cast<double>(n);
    csv += io::format_number(curve.realizations[i]) + "," + io::format_number(cp) + "\n";
    s.points.emplace_back(curve.realizations[i], cp);
  }

  json summary = json::object();
  summary["collapsed"] = curve.collapsed;
  summary["realizations"] = n;
  summary["seed"] = curve.seed;
  summary["costs_are_means"] = a.costs_are_means;
  json counts = json::object();
  const auto sc = assessed.state_counts();
  for (DamageState ds : all_damage_states)
    counts[std::string(to_string(ds))] = sc[index_of(ds)];
  summary["state_counts"] = std::move(counts);
  summary["mean"] = mean_cost(curve);
  summary["median"] = n > 1 ? quantile(curve, 0.5) : curve.realizations.front();
  summary["p10"] = n > 1 ? quantile(curve, 0.1) : curve.realizations.front();
  summary["p90"] = n > 1 ? quantile(curve, 0.9) : curve.realizations.front();
  summary["min"] = curve.realizations.front();
  summary["max"] = curve.realizations.back();
  summary["fitted_median"] = curve.fitted_median ? json(*curve.fitted_median) : json(nullptr);
  summary["fitted_dispersion"] =
      curve.fitted_dispersion ? json(*curve.fitted_dispersion) : json(nullptr);

  Emitter e(out, m);
  e.emit(a.out_prefix + "_cdf.csv", csv);
  e.emit(a.out_prefix + "_summary.json", io::canonical_text(summary));
  if (a.svg) {
    double lo = curve.realizations.front(), hi = curve.realizations.back();
    if (hi <= lo) {
      lo = lo * 0.9;
      hi = hi * 1.1 + 1.0;
    }
    svg::PlotOptions plot{"Repair cost distribution", "Total repair cost (USD)",
                       "Cumulative probability", lo, hi, 0, 1, true};
    e.emit(a.out_prefix + "_loss.svg", svg::line_plot(plot, {s}));
  }
  m.write(a.out_prefix, err);
  report_counts(assessed, "estimate-cost", err);
  err << "estimate-cost: median " << io::format_number(summary["median"].get<double>())
      << " over " << n << " realizations\n";
}

// --------------------------------------------------------------------------

struct LossArgs {
  std::string tensor, anchors, ground_truth, image_id, out;
  double lambda_coord = 5.0;
  double lambda_noobj = 0.5;
};

inline void run_loss(const LossArgs &a, std::ostream &out, std::ostream &err) {
  Manifest m("loss");
  m.option("tensor", a.tensor);
  m.option("anchors", a.anchors);
  m.option("ground_truth", a.ground_truth);
  m.option("lambda_coord", a.lambda_coord);
  m.option("lambda_noobj", a.lambda_noobj);
  m.input(a.tensor);
  m.input(a.ground_truth);
  const io::TensorFile tf = io::load_tensor(a.tensor);
  const auto anchors = load_anchors_arg(a.anchors, m);
  const io::BoxFile gt = io::load_annotations(a.ground_truth);
  const io::ImageRecord *im = nullptr;
  if (a.image_id.empty()) {
    if (gt.images.size() != 1)
      throw input_error("loss: ground truth lists " + std::to_string(gt.images.size()) +
                        " images; pick one with --image-id");
    im = &gt.images.front();
  } else {
    im = gt.find(a.image_id);
    if (!im)
      throw input_error("loss: image '" + a.image_id + "' not in " + a.ground_truth);
  }
  m.option("image_id", im->id);
  if (im->width != tf.tensor.image_w || im->height != tf.tensor.image_h)
    throw input_error("loss: image '" + im->id + "' is " + std::to_string(im->width) + "x" +
                      std::to_string(im->height) + " but the tensor covers " +
                      std::to_string(tf.tensor.image_w) + "x" +
                      std::to_string(tf.tensor.image_h));
  const auto ev = evaluate_loss(tf.tensor, anchors, truths_of(*im),
                                {a.lambda_coord, a.lambda_noobj});
  for (const auto &w : ev.responsibility.warnings)
    err << "loss: warning: " << w << "\n";
  json j = json::object();
  j["coord_xy"] = ev.breakdown.coord_xy;
  j["coord_wh"] = ev.breakdown.coord_wh;
  j["obj_conf"] = ev.breakdown.obj_conf;
  j["noobj_conf"] = ev.breakdown.noobj_conf;
  j["class_prob"] = ev.breakdown.class_prob;
  j["total"] = ev.breakdown.total;
  Emitter e(out, m);
  e.emit(a.out, io::canonical_text(j));
  m.write(a.out, err);
}

// --------------------------------------------------------------------------

struct ValidateArgs {
  std::string kind, file;
  bool rewrite = false;
};

inline void run_validate(const ValidateArgs &a, std::ostream &, std::ostream &err) {
  const fs::path p = a.file;
  if (a.kind == "annotations") {
    auto f = io::load_annotations(p);
    if (a.rewrite) io::save(p, f);
  } else if (a.kind == "detections") {
    auto f = io::load_detections(p);
    if (a.rewrite) io::save(p, f);
  } else if (a.kind == "tensor") {
    auto f = io::load_tensor(p);
    if (a.rewrite) io::save(p, f);
  } else if (a.kind == "inventory") {
    auto f = io::load_inventory(p);
    for (const auto &g : f.groups)
      for (const auto &c : g.components)
        for (const auto &v : c.views)
          (void)io::resolve(v.detections, p.parent_path());
    if (a.rewrite) io::save(p, f);
  } else if (a.kind == "fragility") {
    auto f = io::load_fragility(p);
    if (a.rewrite) io::save(p, f);
  } else if (a.kind == "anchors") {
    auto f = io::load_anchors(p);
    if (a.rewrite) io::write_text(p, io::anchors_csv(f));
  } else if (a.kind == "labels") {
    auto f = io::load_labels(p);
    if (a.rewrite) io::write_text(p, io::labels_csv(f));
  } else {
    throw input_error("validate: unknown kind '" + a.kind + "'");
  }
  err << "validate: " << a.file << " ok\n";
}

// --------------------------------------------------------------------------

inline int run(int argc, const char *const *argv, std::ostream &out = std::cout,
               std::ostream &err = std::cerr) {
  CLI::App app{"Post-earthquake RC damage assessment: detector post-processing, "
               "evaluation, damage-state fusion and repair-cost simulation"};
  app.set_version_flag("--version", std::string("rcdamage ") + rcdamage::version);
  app.require_subcommand(1);

  DecodeArgs dec;
  auto *c_dec = app.add_subcommand("decode", "Decode a raw detector tensor into scored boxes");
  c_dec->add_option("--tensor", dec.tensor, "Tensor header file")->required();
  c_dec->add_option("--anchors", dec.anchors,
                    "Anchor CSV (width,height) or preset:column-rebar")->required();
  c_dec->add_option("--score-threshold", dec.score_threshold, "Minimum box score")
      ->capture_default_str();
  c_dec->add_option("--nms-iou", dec.nms_iou, "NMS overlap threshold")->capture_default_str();
  c_dec->add_option("--image-id", dec.image_id, "Image id written to the output (default: tensor file stem)");
  c_dec->add_option("--out", dec.out, "Detection file, or - for stdout")->required();

  ClusterArgs clu;
  auto *c_clu = app.add_subcommand("cluster-anchors", "IoU k-means over annotated box sizes");
  c_clu->add_option("--annotations", clu.annotations, "Annotation file")->required();
  c_clu->add_option("--k", clu.k, "Number of anchors")->required();
  c_clu->add_option("--sweep", clu.sweep, "Also report mean IoU for k in A..B");
  c_clu->add_option("--sweep-out", clu.sweep_out, "Sweep CSV path (default: <out>.sweep.csv)");
  c_clu->add_option("--restarts", clu.restarts, "Independent restarts")->capture_default_str();
  c_clu->add_option("--seed", clu.seed, "Base seed")->capture_default_str();
  c_clu->add_option("--out", clu.out, "Anchor CSV, or - for stdout")->required();

  EvalDetArgs edet;
  auto *c_edet = app.add_subcommand("evaluate-detector", "Precision-recall, AP and mAP");
  c_edet->add_option("--detections", edet.detections, "Detection file")->required();
  c_edet->add_option("--ground-truth", edet.ground_truth, "Annotation file")->required();
  c_edet->add_option("--iou", edet.iou, "IoU needed for a true positive")->capture_default_str();
  c_edet->add_option("--out-prefix", edet.out_prefix, "Prefix for output files")->required();
  c_edet->add_flag("--svg", edet.svg, "Also write the PR curve as SVG");

  EvalClsArgs ecls;
  auto *c_ecls = app.add_subcommand("evaluate-classifier", "Confusion matrix and accuracy");
  c_ecls->add_option("--predictions", ecls.predictions, "CSV id,label of predictions")->required();
  c_ecls->add_option("--labels", ecls.labels, "CSV id,label of ground truth")->required();
  c_ecls->add_option("--classes", ecls.classes, "Comma-separated class order");
  c_ecls->add_option("--out", ecls.out, "Matrix CSV, or - for stdout")->required();

  FuseArgs fuse;
  auto *c_fuse = app.add_subcommand("fuse", "Damage state per component from classifier + detector");
  c_fuse->add_option("--inventory", fuse.inventory, "Building inventory file")->required();
  c_fuse->add_option("--det-threshold", fuse.det_threshold, "Detection score counting as exposed steel")
      ->capture_default_str();
  c_fuse->add_option("--collapse-threshold", fuse.collapse_threshold,
                     "Collapse probability treated as collapse")->capture_default_str();
  c_fuse->add_option("--out", fuse.out, "Component CSV, or - for stdout")->required();

  CostArgs cost;
  auto *c_cost = app.add_subcommand("estimate-cost", "Monte Carlo repair-cost loss curve");
  c_cost->add_option("--inventory", cost.inventory, "Building inventory file")->required();
  c_cost->add_option("--fragility", cost.fragility, "Fragility database")->required();
  c_cost->add_option("--realizations", cost.realizations, "Monte Carlo realizations")
      ->capture_default_str();
  c_cost->add_option("--seed", cost.seed, "Seed")->capture_default_str();
  c_cost->add_flag("--costs-are-means", cost.costs_are_means,
                   "Treat tabulated costs as lognormal means instead of medians");
  c_cost->add_option("--det-threshold", cost.det_threshold)->capture_default_str();
  c_cost->add_option("--collapse-threshold", cost.collapse_threshold)->capture_default_str();
  c_cost->add_option("--threads", cost.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  c_cost->add_option("--out-prefix", cost.out_prefix, "Prefix for output files")->required();
  c_cost->add_flag("--svg", cost.svg, "Also write the loss curve as SVG");

  LossArgs loss;
  auto *c_loss = app.add_subcommand("loss", "Evaluate the detection loss of a tensor against ground truth");
  c_loss->add_option("--tensor", loss.tensor, "Tensor header file")->required();
  c_loss->add_option("--anchors", loss.anchors, "Anchor CSV or preset:column-rebar")->required();
  c_loss->add_option("--ground-truth", loss.ground_truth, "Annotation file")->required();
  c_loss->add_option("--image-id", loss.image_id, "Image inside the annotation file");
  c_loss->add_option("--lambda-coord", loss.lambda_coord)->capture_default_str();
  c_loss->add_option("--lambda-noobj", loss.lambda_noobj)->capture_default_str();
  c_loss->add_option("--out", loss.out, "JSON record, or - for stdout")->required();

  ValidateArgs val;
  auto *c_val = app.add_subcommand("validate", "Check a file against its format");
  c_val->add_option("--kind", val.kind,
                    "annotations|detections|tensor|inventory|fragility|anchors|labels")
      ->required();
  c_val->add_option("--file", val.file, "File to check")->required();
  c_val->add_flag("--rewrite", val.rewrite, "Rewrite the file in canonical form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return exit_input;
  }

  try {
    if (c_dec->parsed()) run_decode(dec, out, err);
    else if (c_clu->parsed()) run_cluster(clu, out, err);
    else if (c_edet->parsed()) run_evaluate_detector(edet, out, err);
    else if (c_ecls->parsed()) run_evaluate_classifier(ecls, out, err);
    else if (c_fuse->parsed()) run_fuse(fuse, out, err);
    else if (c_cost->parsed()) run_estimate_cost(cost, out, err);
    else if (c_loss->parsed()) run_loss(loss, out, err);
    else if (c_val->parsed()) run_validate(val, out, err);
  } catch (const rcdamage::error &e) {
    err << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_ok;
}

} // namespace rcdamage::cli
