#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "report.hpp"
#include "textdct/contour_codec.hpp"
#include "textdct/dataio.hpp"
#include "textdct/dct_codec.hpp"
#include "textdct/eval.hpp"
#include "textdct/parallel.hpp"
#include "textdct/postprocess.hpp"
#include "textdct/render.hpp"
#include "textdct/sampling.hpp"
#include "textdct/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace textdct;
using textdct::cli::emit_report;
using textdct::cli::num;
using textdct::cli::Table;

namespace {

struct Common {
  int k = 64;
  int n = 300;
  double tau_a = 0.9;
  double tau_b = 0.35;
  double shrink_rate = 0.5;
  int stride = 8;
  std::string nms = "s-nms";
  double nms_iou = 0.5;
  int jobs = 1;
  std::uint64_t seed = 0;
  std::string out;

  LabelParams labels() const {
    LabelParams p;
    p.stride = stride;
    p.shrink_rate = shrink_rate;
    p.k = k;
    p.n = n;
    return p;
  }
  PostprocessConfig post() const {
    PostprocessConfig c;
    c.k = k;
    c.tau_a = tau_a;
    c.tau_b = tau_b;
    c.nms_iou = nms_iou;
    c.variant = parse_nms_variant(nms);
    return c;
  }
};

struct CorpusArgs {
  std::string path;
  std::string format = "canonical";
  std::string images;
  bool allow_self_intersecting = false;

  void add(CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--corpus", path,
                                "annotation directory (ctw1500, totaltext) or "
                                "canonical JSON-lines file");
    if (required) opt->required();
    sub->add_option("--format", format, "canonical | ctw1500 | totaltext")
        ->check(CLI::IsMember({"canonical", "ctw1500", "totaltext"}));
    sub->add_option("--images", images,
                    "image directory, used for true image sizes");
    sub->add_flag("--allow-self-intersecting", allow_self_intersecting,
                  "keep self-intersecting polygons instead of rejecting them");
  }
};

std::vector<CorpusRecord> load(const CorpusArgs& a) {
  LoadOptions opts;
  if (!a.images.empty()) opts.image_dir = fs::path(a.images);
  opts.reject_self_intersecting = !a.allow_self_intersecting;
  LoadDiagnostics diag;
  auto corpus = load_corpus(a.format, a.path, opts, diag);
  std::stable_sort(corpus.begin(), corpus.end(),
                   [](const CorpusRecord& x, const CorpusRecord& y) {
                     return x.image_id < y.image_id;
                   });
  std::cerr << "loaded " << corpus.size() << " images, " << diag.instances
            << " instances";
  if (diag.skipped_lines) std::cerr << ", " << diag.skipped_lines << " skipped lines";
  if (diag.rejected_polygons) {
    std::cerr << ", " << diag.rejected_polygons << " rejected polygons";
  }
  if (diag.inferred_sizes) {
    std::cerr << ", " << diag.inferred_sizes << " sizes inferred from annotations";
  }
  std::cerr << '\n';
  for (const auto& m : diag.messages) std::cerr << "  " << m << '\n';
  return corpus;
}

// Data output: a file, or stdout when no path is given.
class Sink {
 public:
  explicit Sink(const std::string& path, bool binary = false) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(
        path, binary ? std::ios::binary | std::ios::out : std::ios::out);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    path_ = path;
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write to '" + path_ + "' failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_ = "stdout";
};

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream f(path, binary ? std::ios::binary | std::ios::in : std::ios::in);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return f;
}

std::vector<json> read_json_lines(const std::string& path) {
  auto f = open_in(path);
  std::vector<json> out;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_report_file(const std::string& path, const json& j) {
  if (!path.empty()) cli::write_text(path, j.dump(2) + "\n");
}

BinaryMask mask_from_rows(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw DataError("mask: empty 'rows'");
  const auto height = static_cast<int>(rows.size());
  const auto width = static_cast<int>(rows[0].get<std::string>().size());
  BinaryMask m(width, height);
  for (int r = 0; r < height; ++r) {
    const auto s = rows[r].get<std::string>();
    if (static_cast<int>(s.size()) != width) throw DataError("mask: ragged rows");
    for (int c = 0; c < width; ++c) {
      if (s[c] != '0' && s[c] != '1') throw DataError("mask: rows must be 0/1 strings");
      m.set(r, c, s[c] == '1');
    }
  }
  return m;
}

json rows_from_mask(const BinaryMask& m) {
  json rows = json::array();
  for (int r = 0; r < m.height(); ++r) {
    std::string s(m.width(), '0');
    for (int c = 0; c < m.width(); ++c) s[c] = m.at(r, c) ? '1' : '0';
    rows.push_back(std::move(s));
  }
  return rows;
}

json vector_json(const std::string& id, const DctMaskVector& v) {
  return {{"id", id}, {"k", v.k}, {"n", v.n()}, {"empty", v.from_empty_mask},
          {"coeffs", v.coeffs}};
}

std::vector<ImageDetections> scored_regions(std::vector<DetectionFileEntry> entries) {
  std::vector<ImageDetections> out;
  for (auto& e : entries) {
    ImageDetections img{e.image_id, {}};
    for (auto& d : e.detections) {
      img.detections.push_back({std::move(d.contours), d.score});
    }
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<DetectionFileEntry> load_detections(const std::string& path) {
  auto f = open_in(path);
  return read_detections(f);
}

// --- encode / decode --------------------------------------------------------

void cmd_encode(const Common& c, const CorpusArgs& corpus_args,
                const std::string& masks_path) {
  std::vector<std::string> ids;
  std::vector<BinaryMask> masks;
  std::vector<Polygon> polys;
  if (!masks_path.empty()) {
    for (const auto& j : read_json_lines(masks_path)) {
      ids.push_back(j.at("id").get<std::string>());
      masks.push_back(mask_from_rows(j.at("rows")));
    }
  } else {
    int skipped = 0;
    for (const auto& rec : load(corpus_args)) {
      for (std::size_t i = 0; i < rec.instances.size(); ++i) {
        const auto& inst = rec.instances[i];
        if (inst.ignore || !inst.polygon.valid()) {
          ++skipped;
          continue;
        }
        ids.push_back(rec.image_id + "/" + std::to_string(i));
        polys.push_back(inst.polygon);
      }
    }
    if (skipped) std::cerr << "skipped " << skipped << " ignore/degenerate instances\n";
  }
  const std::size_t count = ids.size();
  std::vector<std::string> lines(count);
  parallel_for(count, c.jobs, [&](std::size_t i) {
    const DctMaskVector v = masks.empty() ? encode(polys[i], c.k, c.n)
                                          : encode(masks[i], c.k, c.n);
    lines[i] = vector_json(ids[i], v).dump();
  });
  Sink sink(c.out);
  for (const auto& l : lines) sink.stream() << l << '\n';
  sink.close();
  std::cerr << "encoded " << count << " masks at k=" << c.k << " n=" << c.n << '\n';
}

void cmd_decode(const Common& c, const std::string& in, bool values) {
  const auto inputs = read_json_lines(in);
  std::vector<std::string> lines(inputs.size());
  parallel_for(inputs.size(), c.jobs, [&](std::size_t i) {
    const json& j = inputs[i];
    DctMaskVector v;
    v.k = j.at("k").get<int>();
    v.coeffs = j.at("coeffs").get<std::vector<double>>();
    v.from_empty_mask = j.value("empty", false);
    const MaskGrid grid = decode(v);
    json o{{"id", j.value("id", std::to_string(i))},
           {"k", v.k},
           {"threshold", c.tau_b},
           {"rows", rows_from_mask(binarize(grid, c.tau_b))}};
    if (values) o["values"] = std::vector<double>(grid.values().begin(), grid.values().end());
    lines[i] = o.dump();
  });
  Sink sink(c.out);
  for (const auto& l : lines) sink.stream() << l << '\n';
  sink.close();
  std::cerr << "decoded " << lines.size() << " vectors at threshold " << c.tau_b << '\n';
}

// --- roundtrip-eval ---------------------------------------------------------

struct GridPoint {
  int k;
  int n;
  bool lossless() const { return n == k * k; }
};

std::vector<GridPoint> parse_grid(const std::string& spec) {
  std::vector<GridPoint> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw std::invalid_argument("grid entry '" + item + "' is not KxN");
    GridPoint p{std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1))};
    if (p.k <= 0 || p.n <= 0 || p.n > p.k * p.k) {
      throw std::invalid_argument("grid entry '" + item + "' needs k > 0 and 0 < n <= k*k");
    }
    out.push_back(p);
  }
  // Resolution ascending; within a resolution the uncompressed row comes first.
  std::sort(out.begin(), out.end(), [](const GridPoint& a, const GridPoint& b) {
    if (a.k != b.k) return a.k < b.k;
    if (a.lossless() != b.lossless()) return a.lossless();
    return a.n < b.n;
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const GridPoint& a, const GridPoint& b) {
                          return a.k == b.k && a.n == b.n;
                        }),
            out.end());
  return out;
}

void cmd_roundtrip(const Common& c, const CorpusArgs& corpus_args,
                   const std::string& grid_spec) {
  const auto corpus = load(corpus_args);
  std::vector<const Polygon*> polys;
  for (const auto& rec : corpus) {
    for (const auto& inst : rec.instances) {
      if (!inst.ignore && inst.polygon.valid()) polys.push_back(&inst.polygon);
    }
  }
  if (polys.empty()) throw std::runtime_error("roundtrip-eval: empty corpus");
  const auto grid = parse_grid(grid_spec);

  json rows = json::array();
  Table table({"resolution", "dim", "canonical IOU", "pixel IOU"});
  for (const auto& g : grid) {
    std::vector<double> canonical(polys.size());
    std::vector<double> pixel(polys.size());
    const DctParams params{g.k, g.n, c.tau_b};
    parallel_for(polys.size(), c.jobs, [&](std::size_t i) {
      canonical[i] = reconstruction_iou(*polys[i], g.k, g.n, c.tau_b);
      pixel[i] = pixel_reconstruction_iou(*polys[i], params);
    });
    double mc = 0.0;
    double mp = 0.0;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      mc += canonical[i];
      mp += pixel[i];
    }
    mc = 100.0 * mc / polys.size();
    mp = 100.0 * mp / polys.size();
    rows.push_back({{"k", g.k}, {"n", g.n}, {"lossless", g.lossless()},
                    {"canonical_iou", mc}, {"pixel_iou", mp}});
    const std::string res = std::to_string(g.k) + "x" + std::to_string(g.k);
    table.add({res, std::to_string(g.n) + (g.lossless() ? "*" : ""), num(mc, 2),
               num(mp, 2)});
  }
  json j{{"command", "roundtrip-eval"},
         {"threshold", c.tau_b},
         {"images", corpus.size()},
         {"instances", polys.size()},
         {"rows", rows}};
  emit_report(j, table, c.out);
  if (c.out != "-") std::cout << "* n = k*k keeps every coefficient\n";
}

// --- labels / synth ---------------------------------------------------------

struct LabelRun {
  std::vector<std::string> lines;
  std::vector<std::string> grids;
  json summary;
  Table table{{"images", "instances", "positives", "conflicts", "fallbacks"}};
};

LabelRun run_labels(const Common& c, const std::vector<CorpusRecord>& corpus,
                    const std::string& sampling, int radius, bool want_grids) {
  const LabelParams lp = c.labels();
  LabelRun run;
  run.lines.resize(corpus.size());
  if (want_grids) run.grids.resize(corpus.size());
  std::vector<LabelGrid> grids(corpus.size());
  parallel_for(corpus.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = corpus[i];
    grids[i] = sampling == "center"
                   ? generate_labels_center_sampling(rec.instances, rec.width,
                                                     rec.height, lp, radius)
                   : generate_labels(rec.instances, rec.width, rec.height, lp);
    run.lines[i] = label_line(rec.image_id, grids[i]);
    if (want_grids) {
      std::ostringstream os(std::ios::binary);
      write_grids(os, grids_from_labels(grids[i], rec.image_id, rec.width,
                                        rec.height, lp.n));
      run.grids[i] = os.str();
    }
  });
  long instances = 0;
  long positives = 0;
  long conflicts = 0;
  long fallbacks = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    instances += static_cast<long>(corpus[i].instances.size());
    positives += grids[i].positives();
    conflicts += grids[i].conflicts;
    fallbacks += grids[i].fallback_instances;
  }
  run.summary = {{"sampling", sampling}, {"stride", lp.stride},
                 {"shrink_rate", lp.shrink_rate}, {"images", corpus.size()},
                 {"instances", instances}, {"positives", positives},
                 {"conflicts", conflicts}, {"fallback_instances", fallbacks}};
  run.table.add({std::to_string(corpus.size()), std::to_string(instances),
                 std::to_string(positives), std::to_string(conflicts),
                 std::to_string(fallbacks)});
  return run;
}

void write_grid_file(const std::string& path, const std::vector<std::string>& blobs) {
  Sink sink(path, true);
  for (const auto& b : blobs) sink.stream().write(b.data(), static_cast<std::streamsize>(b.size()));
  sink.close();
}

void cmd_labels(const Common& c, const CorpusArgs& corpus_args,
                const std::string& sampling, int radius,
                const std::string& grids_path, const std::string& report) {
  const auto corpus = load(corpus_args);
  const auto run = run_labels(c, corpus, sampling, radius, !grids_path.empty());
  Sink sink(c.out);
  for (const auto& l : run.lines) sink.stream() << l << '\n';
  sink.close();
  if (!grids_path.empty()) write_grid_file(grids_path, run.grids);
  run.table.print(std::cerr);
  write_report_file(report, json{{"command", "labels"}, {"summary", run.summary}});
}

void cmd_synth(const Common& c, const SyntheticRanges& ranges, int count,
               const std::string& grids_path, const std::string& report) {
  const auto corpus = generate_synthetic_corpus(c.seed, count, ranges);
  Sink sink(c.out);
  write_canonical(sink.stream(), corpus);
  sink.close();
  long instances = 0;
  long ignored = 0;
  long challenging = 0;
  for (const auto& rec : corpus) {
    for (const auto& inst : rec.instances) {
      ++instances;
      ignored += inst.ignore;
      challenging += !inst.ignore && is_challenging(inst.polygon, rec.width, rec.height);
    }
  }
  json summary{{"seed", c.seed}, {"images", count}, {"instances", instances},
               {"ignored", ignored}, {"challenging", challenging}};
  if (!grids_path.empty()) {
    const auto run = run_labels(c, corpus, "tks", 0, true);
    write_grid_file(grids_path, run.grids);
    summary["labels"] = run.summary;
  }
  Table t({"seed", "images", "instances", "ignored", "challenging"});
  t.add({std::to_string(c.seed), std::to_string(count), std::to_string(instances),
         std::to_string(ignored), std::to_string(challenging)});
  t.print(std::cerr);
  write_report_file(report, json{{"command", "synth"}, {"summary", summary}});
}

// --- detect-post ------------------------------------------------------------

void cmd_detect_post(const Common& c, const std::string& grids_path,
                     const std::string& report) {
  auto in = open_in(grids_path, true);
  auto grids = read_grids(in);
  std::stable_sort(grids.begin(), grids.end(),
                   [](const PredictionGrids& a, const PredictionGrids& b) {
                     return a.image_id < b.image_id;
                   });
  const PostprocessConfig pc = c.post();
  std::vector<PostprocessResult> results(grids.size());
  parallel_for(grids.size(), c.jobs, [&](std::size_t i) {
    if (grids[i].n > pc.k * pc.k) {
      throw DataError("detect-post: '" + grids[i].image_id + "' carries n=" +
                      std::to_string(grids[i].n) + " > k*k for k=" + std::to_string(pc.k));
    }
    results[i] = run_postprocess(grids[i], pc);
  });

  Sink sink(c.out);
  for (const auto& r : results) sink.stream() << detection_line(r.image_id, r.detections) << '\n';
  sink.close();

  json images = json::array();
  long detections = 0;
  long candidates = 0;
  double total_ms = 0.0;
  double max_ms = 0.0;
  for (const auto& r : results) {
    detections += static_cast<long>(r.detections.size());
    candidates += r.candidates;
    total_ms += r.elapsed_ms;
    max_ms = std::max(max_ms, r.elapsed_ms);
    images.push_back({{"image_id", r.image_id}, {"candidates", r.candidates},
                      {"components", r.components}, {"after_nms", r.after_nms},
                      {"detections", r.detections.size()}, {"dropped", r.dropped},
                      {"elapsed_ms", r.elapsed_ms}});
  }
  const double mean_ms = results.empty() ? 0.0 : total_ms / results.size();
  Table t({"images", "candidates", "detections", "mean ms", "max ms"});
  t.add({std::to_string(results.size()), std::to_string(candidates),
         std::to_string(detections), num(mean_ms, 3), num(max_ms, 3)});
  t.print(std::cerr);
  write_report_file(report, json{{"command", "detect-post"},
                                 {"nms", to_string(pc.variant)},
                                 {"tau_a", pc.tau_a},
                                 {"tau_b", pc.tau_b},
                                 {"nms_iou", pc.nms_iou},
                                 {"images", images},
                                 {"mean_ms", mean_ms},
                                 {"max_ms", max_ms}});
}

// --- eval / compare ---------------------------------------------------------

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty threshold list");
  return out;
}

void cmd_eval(const Common& c, const CorpusArgs& corpus_args,
              const std::string& dets_path, const std::string& thresholds,
              bool challenging) {
  auto corpus = load(corpus_args);
  if (challenging) corpus = challenging_subset(corpus);
  std::set<std::string> ids;
  for (const auto& rec : corpus) ids.insert(rec.image_id);
  std::vector<ImageDetections> dets;
  for (auto& d : scored_regions(load_detections(dets_path))) {
    if (ids.count(d.image_id)) dets.push_back(std::move(d));
  }
  const auto thr = thresholds.empty() ? default_iou_thresholds() : parse_list(thresholds);
  const auto rep = evaluate_corpus(dets, corpus, thr, c.jobs);

  json rows = json::array();
  Table t({"IOU", "TP", "FP", "FN", "ignored", "P", "R", "F"});
  for (const auto& s : rep.thresholds) {
    rows.push_back({{"iou_threshold", s.iou_threshold}, {"tp", s.counts.tp},
                    {"fp", s.counts.fp}, {"fn", s.counts.fn},
                    {"ignored", s.counts.ignored}, {"precision", s.precision},
                    {"recall", s.recall}, {"f_measure", s.f_measure}});
    t.add({num(s.iou_threshold, 2), std::to_string(s.counts.tp),
           std::to_string(s.counts.fp), std::to_string(s.counts.fn),
           std::to_string(s.counts.ignored), num(s.precision), num(s.recall),
           num(s.f_measure)});
  }
  emit_report(json{{"command", "eval"}, {"challenging", challenging},
                   {"images", rep.images}, {"thresholds", rows}},
              t, c.out);
}

void cmd_compare(const Common& c, const CorpusArgs& corpus_args,
                 bool challenging, int m, int samples) {
  auto corpus = load(corpus_args);
  if (challenging) {
    for (auto& rec : corpus) {
      std::erase_if(rec.instances, [&](const TextInstance& t) {
        return t.ignore || !is_challenging(t.polygon, rec.width, rec.height);
      });
    }
  }
  const auto rep = codec_compare(corpus, {c.k, c.n, c.tau_b}, {m, samples}, c.jobs);
  const auto& s = rep.summary;
  Table t({"codec", "mean IOU", "hit@0.5", "hit@0.6", "hit@0.7", "hit@0.8"});
  std::vector<std::string> dct{"dct k=" + std::to_string(c.k) + " n=" + std::to_string(c.n),
                               num(100.0 * s.dct_mean, 2)};
  std::vector<std::string> dft{"dft m=" + std::to_string(s.m) + " T=" + std::to_string(s.samples),
                               num(100.0 * s.dft_mean, 2)};
  for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
    dct.push_back(num(100.0 * s.dct_hit_rate[i], 2));
    dft.push_back(num(100.0 * s.dft_hit_rate[i], 2));
  }
  t.add(dct);
  t.add(dft);
  t.add({"bounding box", num(100.0 * s.box_mean, 2)});

  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"image_id", r.image_id}, {"instance", r.instance},
                    {"dct_iou", r.dct_iou}, {"dft_iou", r.dft_iou},
                    {"box_iou", r.box_iou}});
  }
  json j{{"command", "compare"},
         {"challenging", challenging},
         {"instances", rep.rows.size()},
         {"dct", {{"k", c.k}, {"n", c.n}, {"threshold", c.tau_b},
                  {"mean_iou", s.dct_mean}, {"hit_rate", s.dct_hit_rate}}},
         {"dft", {{"m", s.m}, {"samples", s.samples}, {"mean_iou", s.dft_mean},
                  {"hit_rate", s.dft_hit_rate}}},
         {"box", {{"mean_iou", s.box_mean}}},
         {"hit_thresholds", s.thresholds},
         {"rows", rows}};
  emit_report(j, t, c.out);
}

// --- render -----------------------------------------------------------------

void cmd_render(const Common& c, const CorpusArgs& corpus_args,
                const std::string& dets_path, const std::vector<std::string>& only,
                int limit) {
  if (c.out.empty() || c.out == "-") {
    throw std::invalid_argument("render: --out must name an output directory");
  }
  auto corpus = load(corpus_args);
  if (!only.empty()) {
    const std::set<std::string> keep(only.begin(), only.end());
    std::erase_if(corpus, [&](const CorpusRecord& r) { return !keep.count(r.image_id); });
  }
  if (limit > 0 && static_cast<int>(corpus.size()) > limit) corpus.resize(limit);
  std::map<std::string, std::vector<FinalDetection>> dets;
  if (!dets_path.empty()) {
    for (auto& e : load_detections(dets_path)) dets[e.image_id] = std::move(e.detections);
  }
  fs::create_directories(c.out);
  parallel_for(corpus.size(), c.jobs, [&](std::size_t i) {
    const auto& rec = corpus[i];
    RgbImage img(rec.width, rec.height);
    for (const auto& inst : rec.instances) {
      const auto color = inst.ignore ? kIgnoreColor : kGroundTruthColor;
      img.fill_polygon(inst.polygon, color, 0.25);
      img.stroke_polygon(inst.polygon, color);
    }
    if (auto it = dets.find(rec.image_id); it != dets.end()) {
      for (const auto& d : it->second) {
        for (const auto& contour : d.contours) img.stroke_polygon(contour, kDetectionColor);
      }
    }
    img.write_png(fs::path(c.out) / (rec.image_id + ".png"));
  });
  std::cerr << "rendered " << corpus.size() << " images to " << c.out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"textdct: DCT mask codec, kernel labels, segmented NMS and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI run configuration; flags override it");

  Common c;
  app.add_option("--k", c.k, "canonical mask resolution K")->check(CLI::PositiveNumber);
  app.add_option("--n", c.n, "mask vector length N")->check(CLI::PositiveNumber);
  app.add_option("--tau-a", c.tau_a, "text score threshold")->check(CLI::Range(0.0, 1.0));
  app.add_option("--tau-b", c.tau_b, "mask binarization threshold");
  app.add_option("--shrink-rate", c.shrink_rate, "kernel shrink rate r in (0, 1]");
  app.add_option("--stride", c.stride, "label grid stride in pixels")->check(CLI::PositiveNumber);
  app.add_option("--nms", c.nms, "s-nms | nms | k-nms")
      ->check(CLI::IsMember({"s-nms", "nms", "k-nms"}));
  app.add_option("--nms-iou", c.nms_iou, "NMS suppression IOU")->check(CLI::Range(0.0, 1.0));
  app.add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--out", c.out, "output path ('-' for stdout)");

  CorpusArgs corpus_args;
  std::string report;

  auto* encode_cmd = app.add_subcommand("encode", "polygons or binary masks to DCT mask vectors");
  std::string masks_path;
  encode_cmd->add_option("--masks", masks_path, "JSON-lines of {\"id\", \"rows\": [\"0110\", ...]}");
  corpus_args.add(encode_cmd, false);

  auto* decode_cmd = app.add_subcommand("decode", "mask vectors to binary K x K masks");
  std::string vectors_path;
  bool values = false;
  decode_cmd->add_option("--in", vectors_path, "encode output")->required();
  decode_cmd->add_flag("--values", values, "also emit the continuous grid");

  auto* roundtrip_cmd = app.add_subcommand("roundtrip-eval", "mean reconstruction IOU per (K, N)");
  std::string grid = "32x1024,32x300,64x4096,64x100,64x300,64x500,128x300";
  corpus_args.add(roundtrip_cmd);
  roundtrip_cmd->add_option("--grid", grid, "comma-separated KxN pairs")->capture_default_str();

  auto* labels_cmd = app.add_subcommand("labels", "training targets per image");
  std::string sampling = "tks";
  int radius = 1;
  std::string grids_out;
  corpus_args.add(labels_cmd);
  labels_cmd->add_option("--sampling", sampling, "tks | center")
      ->check(CLI::IsMember({"tks", "center"}));
  labels_cmd->add_option("--radius", radius, "center-sampling radius in cells");
  labels_cmd->add_option("--grids", grids_out, "also write a ground-truth prediction dump");
  labels_cmd->add_option("--report", report, "JSON summary path");

  auto* detect_cmd = app.add_subcommand("detect-post", "prediction dump to detections");
  std::string grids_in;
  detect_cmd->add_option("--grids", grids_in, "prediction dump")->required();
  detect_cmd->add_option("--report", report, "JSON timing report path");

  auto* eval_cmd = app.add_subcommand("eval", "precision, recall and F-measure");
  std::string dets_path;
  std::string thresholds;
  bool challenging = false;
  corpus_args.add(eval_cmd);
  eval_cmd->add_option("--detections", dets_path, "detect-post output")->required();
  eval_cmd->add_option("--thresholds", thresholds, "comma-separated IOU thresholds");
  eval_cmd->add_flag("--challenging", challenging, "only images with challenging instances");

  auto* synth_cmd = app.add_subcommand("synth", "synthetic curved-text corpus");
  SyntheticRanges ranges;
  int count = 100;
  std::string synth_grids;
  synth_cmd->add_option("--count", count, "images")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--width", ranges.width, "image width");
  synth_cmd->add_option("--height", ranges.height, "image height");
  synth_cmd->add_option("--min-instances", ranges.min_instances);
  synth_cmd->add_option("--max-instances", ranges.max_instances);
  synth_cmd->add_option("--ignore-prob", ranges.ignore_probability)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--predictions", synth_grids,
                        "also write a ground-truth prediction dump");
  synth_cmd->add_option("--report", report, "JSON summary path");

  auto* compare_cmd = app.add_subcommand("compare", "DCT mask vs Fourier contour reconstruction");
  int dft_m = 0;
  int dft_samples = 0;
  bool compare_challenging = false;
  corpus_args.add(compare_cmd);
  compare_cmd->add_flag("--challenging", compare_challenging, "only challenging instances");
  compare_cmd->add_option("--m", dft_m, "Fourier frequency pairs (0 matches N)");
  compare_cmd->add_option("--samples", dft_samples, "contour samples T (0 picks a default)");

  auto* render_cmd = app.add_subcommand("render", "PNG overlays: ground truth green, detections red");
  std::string render_dets;
  std::vector<std::string> only;
  int limit = 0;
  corpus_args.add(render_cmd);
  render_cmd->add_option("--detections", render_dets, "detect-post output");
  render_cmd->add_option("--image-id", only, "render only these images");
  render_cmd->add_option("--limit", limit, "render at most this many images");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*encode_cmd) {
      if (masks_path.empty() == corpus_args.path.empty()) {
        throw std::invalid_argument("encode: give exactly one of --masks or --corpus");
      }
      cmd_encode(c, corpus_args, masks_path);
    } else if (*decode_cmd) {
      cmd_decode(c, vectors_path, values);
    } else if (*roundtrip_cmd) {
      cmd_roundtrip(c, corpus_args, grid);
    } else if (*labels_cmd) {
      cmd_labels(c, corpus_args, sampling, radius, grids_out, report);
    } else if (*detect_cmd) {
      cmd_detect_post(c, grids_in, report);
    } else if (*eval_cmd) {
      cmd_eval(c, corpus_args, dets_path, thresholds, challenging);
    } else if (*synth_cmd) {
      cmd_synth(c, ranges, count, synth_grids, report);
    } else if (*compare_cmd) {
      cmd_compare(c, corpus_args, compare_challenging, dft_m, dft_samples);
    } else if (*render_cmd) {
      cmd_render(c, corpus_args, render_dets, only, limit);
    }
  } catch (const std::exception& e) {
    std::cerr << "textdct: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
