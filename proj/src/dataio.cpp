#include "textdct/dataio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace textdct {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<fs::path> annotation_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("annotation directory not found: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read annotation file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Image id from an annotation filename: CTW1500 uses "1001.txt", Total-Text
// uses "poly_gt_img11.txt" or "gt_img11.txt".
std::string image_id_from(const fs::path& file) {
  std::string stem = file.stem().string();
  for (const std::string prefix : {"poly_gt_", "gt_"}) {
    if (stem.rfind(prefix, 0) == 0) return stem.substr(prefix.size());
  }
  return stem;
}

std::optional<std::pair<int, int>> find_image_size(
    const std::optional<fs::path>& image_dir, const std::string& image_id) {
  if (!image_dir) return std::nullopt;
  for (const char* ext : {".jpg", ".JPG", ".jpeg", ".png", ".PNG"}) {
    const fs::path p = *image_dir / (image_id + ext);
    if (fs::exists(p)) return read_image_size(p);
  }
  return std::nullopt;
}

struct RawInstance {
  std::vector<Point> points;
  bool ignore = false;
};

CorpusRecord build_record(const std::string& image_id,
                          std::vector<RawInstance> raw,
                          std::optional<std::pair<int, int>> size,
                          const LoadOptions& options, LoadDiagnostics& diag,
                          const std::string& where) {
  CorpusRecord rec;
  rec.image_id = image_id;
  for (auto& r : raw) {
    Polygon poly(std::move(r.points));
    if (!poly.valid()) {
      ++diag.rejected_polygons;
      diag.messages.push_back(where + ": degenerate polygon rejected");
      continue;
    }
    if (options.reject_self_intersecting && !poly.simple()) {
      ++diag.rejected_polygons;
      diag.messages.push_back(where + ": self-intersecting polygon rejected");
      continue;
    }
    rec.originals.push_back(poly);
    rec.instances.push_back({std::move(poly), r.ignore});
  }
  if (size) {
    rec.width = size->first;
    rec.height = size->second;
  } else {
    ++diag.inferred_sizes;
    double w = 1.0;
    double h = 1.0;
    for (const auto& p : rec.originals) {
      const Box b = bounding_box(p);
      w = std::max(w, b.x_max);
      h = std::max(h, b.y_max);
    }
    rec.width = static_cast<int>(std::ceil(w));
    rec.height = static_cast<int>(std::ceil(h));
  }
  for (auto& inst : rec.instances) {
    inst.polygon = clip_to_image(inst.polygon, rec.width, rec.height);
  }
  diag.instances += static_cast<int>(rec.instances.size());
  return rec;
}

std::string strip_transcription(const std::string& line, std::string& text) {
  const auto pos = line.find("####");
  if (pos == std::string::npos) {
    text.clear();
    return line;
  }
  text = line.substr(pos + 4);
  return line.substr(0, pos);
}

bool is_dont_care(const std::string& transcription) {
  const std::string t = trim(transcription);
  return t == "#" || t == "###";
}

std::vector<double> numbers_in(const std::string& s) {
  std::vector<double> out;
  static const std::regex number(R"(-?\d+(?:\.\d+)?)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number);
       it != std::sregex_iterator(); ++it) {
    out.push_back(std::stod(it->str()));
  }
  return out;
}

// "x: [[...]], y: [[...]], ornt: [u'h'], transcriptions: [u'text']"
std::optional<RawInstance> parse_totaltext_matlab(const std::string& entry) {
  static const std::regex layout(
      R"(x:\s*\[\[([^\]]*)\]\]\s*,\s*y:\s*\[\[([^\]]*)\]\](.*))");
  std::smatch m;
  if (!std::regex_search(entry, m, layout)) return std::nullopt;
  const auto xs = numbers_in(m[1].str());
  const auto ys = numbers_in(m[2].str());
  if (xs.size() != ys.size() || xs.size() < 3) return std::nullopt;
  RawInstance r;
  for (std::size_t i = 0; i < xs.size(); ++i) r.points.push_back({xs[i], ys[i]});
  static const std::regex transcription(
      R"(transcriptions:\s*\[u?['"](.*)['"]\])");
  std::smatch t;
  const std::string rest = m[3].str();
  if (std::regex_search(rest, t, transcription)) r.ignore = is_dont_care(t[1].str());
  return r;
}

std::optional<RawInstance> parse_totaltext_csv(const std::string& line) {
  const auto tokens = split(line, ',');
  std::vector<double> nums;
  std::size_t i = 0;
  for (; i < tokens.size(); ++i) {
    auto v = parse_number(tokens[i]);
    if (!v) break;
    nums.push_back(*v);
  }
  if (nums.size() < 6 || nums.size() % 2 != 0) return std::nullopt;
  RawInstance r;
  for (std::size_t k = 0; k + 1 < nums.size(); k += 2) {
    r.points.push_back({nums[k], nums[k + 1]});
  }
  std::string text;
  for (std::size_t k = i; k < tokens.size(); ++k) {
    text += (k > i ? "," : "") + tokens[k];
  }
  r.ignore = is_dont_care(text);
  return r;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff),
                              static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff),
                              static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) |
      (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

void put_floats(std::ostream& out, const std::vector<float>& values) {
  for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

void get_floats(std::istream& in, std::vector<float>& values, std::size_t n) {
  values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t bits = 0;
    if (!get_u32(in, bits)) throw DataError("grid file: truncated plane data");
    values[i] = std::bit_cast<float>(bits);
  }
}

json points_json(const Polygon& poly) {
  json pts = json::array();
  for (const auto& p : poly.vertices()) pts.push_back({p.x, p.y});
  return pts;
}

Polygon polygon_from_json(const json& pts) {
  std::vector<Point> out;
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2) {
      throw DataError("expected [x, y] point pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return Polygon(std::move(out));
}

}  // namespace

std::optional<std::pair<int, int>> read_image_size(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<unsigned char, 24> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (in.gcount() < 4) return std::nullopt;
  static constexpr std::array<unsigned char, 8> kPng{0x89, 'P', 'N', 'G',
                                                     '\r', '\n', 0x1a, '\n'};
  if (in.gcount() >= 24 && std::equal(kPng.begin(), kPng.end(), head.begin())) {
    auto be32 = [&](int off) {
      return (head[off] << 24) | (head[off + 1] << 16) | (head[off + 2] << 8) |
             head[off + 3];
    };
    return std::make_pair(be32(16), be32(20));
  }
  if (head[0] != 0xff || head[1] != 0xd8) return std::nullopt;
  // Walk JPEG markers until a start-of-frame segment.
  in.clear();
  in.seekg(2);
  while (in) {
    int byte = in.get();
    while (byte == 0xff) byte = in.get();
    if (byte == EOF) break;
    const int marker = byte;
    const int hi = in.get();
    const int lo = in.get();
    if (hi == EOF || lo == EOF) break;
    const int length = (hi << 8) | lo;
    const bool sof = marker >= 0xc0 && marker <= 0xcf && marker != 0xc4 &&
                     marker != 0xc8 && marker != 0xcc;
    if (sof) {
      std::array<unsigned char, 5> f{};
      if (!in.read(reinterpret_cast<char*>(f.data()), 5)) break;
      const int h = (f[1] << 8) | f[2];
      const int w = (f[3] << 8) | f[4];
      return std::make_pair(w, h);
    }
    in.seekg(length - 2, std::ios::cur);
  }
  return std::nullopt;
}

std::vector<CorpusRecord> load_ctw1500(const fs::path& dir,
                                       const LoadOptions& options,
                                       LoadDiagnostics& diag) {
  std::vector<CorpusRecord> out;
  for (const auto& file : annotation_files(dir)) {
    ++diag.files;
    const std::string id = image_id_from(file);
    std::vector<RawInstance> raw;
    int line_no = 0;
    for (const auto& line : read_lines(file)) {
      ++line_no;
      if (trim(line).empty()) continue;
      ++diag.lines;
      std::string text;
      const auto tokens = split(strip_transcription(line, text), ',');
      std::vector<double> nums;
      bool ok = true;
      for (const auto& t : tokens) {
        if (trim(t).empty()) continue;
        auto v = parse_number(t);
        if (!v) {
          ok = false;
          break;
        }
        nums.push_back(*v);
      }
      RawInstance r;
      r.ignore = is_dont_care(text);
      if (ok && nums.size() == 28) {
        ++diag.layouts["absolute"];
        for (std::size_t k = 0; k < 28; k += 2) {
          r.points.push_back({nums[k], nums[k + 1]});
        }
      } else if (ok && nums.size() == 32) {
        ++diag.layouts["bbox+offset"];
        for (std::size_t k = 4; k < 32; k += 2) {
          r.points.push_back({nums[0] + nums[k], nums[1] + nums[k + 1]});
        }
      } else {
        ++diag.skipped_lines;
        diag.messages.push_back(file.filename().string() + ":" +
                                std::to_string(line_no) +
                                ": expected 14 points, line skipped");
        continue;
      }
      raw.push_back(std::move(r));
    }
    out.push_back(build_record(id, std::move(raw),
                               find_image_size(options.image_dir, id), options,
                               diag, file.filename().string()));
  }
  return out;
}

std::vector<CorpusRecord> load_totaltext(const fs::path& dir,
                                         const LoadOptions& options,
                                         LoadDiagnostics& diag) {
  std::vector<CorpusRecord> out;
  for (const auto& file : annotation_files(dir)) {
    ++diag.files;
    const std::string id = image_id_from(file);
    const auto lines = read_lines(file);
    // The MATLAB-style layout may wrap one instance over several lines.
    std::vector<std::string> entries;
    for (const auto& line : lines) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.rfind("x:", 0) == 0 || entries.empty() ||
          entries.back().rfind("x:", 0) != 0) {
        entries.push_back(t);
      } else {
        entries.back() += " " + t;
      }
    }
    std::vector<RawInstance> raw;
    for (const auto& entry : entries) {
      ++diag.lines;
      auto r = entry.rfind("x:", 0) == 0 ? parse_totaltext_matlab(entry)
                                         : parse_totaltext_csv(entry);
      if (!r) {
        ++diag.skipped_lines;
        diag.messages.push_back(file.filename().string() +
                                ": unparseable entry skipped");
        continue;
      }
      raw.push_back(std::move(*r));
    }
    out.push_back(build_record(id, std::move(raw),
                               find_image_size(options.image_dir, id), options,
                               diag, file.filename().string()));
  }
  return out;
}

std::string canonical_line(const CorpusRecord& record) {
  json j;
  j["schema"] = 1;
  j["image_id"] = record.image_id;
  j["width"] = record.width;
  j["height"] = record.height;
  json instances = json::array();
  for (std::size_t i = 0; i < record.instances.size(); ++i) {
    json inst;
    inst["points"] = points_json(record.instances[i].polygon);
    inst["ignore"] = record.instances[i].ignore;
    if (i < record.originals.size() &&
        !(record.originals[i] == record.instances[i].polygon)) {
      inst["original_points"] = points_json(record.originals[i]);
    }
    instances.push_back(std::move(inst));
  }
  j["instances"] = std::move(instances);
  return j.dump();
}

void write_canonical(std::ostream& out, const std::vector<CorpusRecord>& corpus) {
  for (const auto& rec : corpus) out << canonical_line(rec) << '\n';
}

std::vector<CorpusRecord> read_canonical(std::istream& in,
                                         LoadDiagnostics& diag) {
  std::vector<CorpusRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++diag.lines;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("canonical corpus line " + std::to_string(line_no) +
                      ": " + e.what());
    }
    if (j.contains("schema") && j["schema"].get<int>() != 1) {
      throw DataError("canonical corpus line " + std::to_string(line_no) +
                      ": unsupported schema version");
    }
    CorpusRecord rec;
    try {
      rec.image_id = j.at("image_id").get<std::string>();
      rec.width = j.at("width").get<int>();
      rec.height = j.at("height").get<int>();
      for (const auto& inst : j.at("instances")) {
        Polygon poly = polygon_from_json(inst.at("points"));
        const bool ignore = inst.value("ignore", false);
        if (!poly.valid()) {
          ++diag.rejected_polygons;
          diag.messages.push_back("line " + std::to_string(line_no) +
                                  ": degenerate polygon rejected");
          continue;
        }
        Polygon original = inst.contains("original_points")
                               ? polygon_from_json(inst["original_points"])
                               : poly;
        rec.originals.push_back(std::move(original));
        rec.instances.push_back(
            {clip_to_image(poly, rec.width, rec.height), ignore});
      }
    } catch (const json::exception& e) {
      throw DataError("canonical corpus line " + std::to_string(line_no) +
                      ": " + e.what());
    }
    diag.instances += static_cast<int>(rec.instances.size());
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<CorpusRecord> load_canonical(const fs::path& path,
                                         LoadDiagnostics& diag) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read corpus file: " + path.string());
  ++diag.files;
  return read_canonical(in, diag);
}

std::vector<CorpusRecord> load_corpus(const std::string& format,
                                      const fs::path& path,
                                      const LoadOptions& options,
                                      LoadDiagnostics& diag) {
  if (format == "canonical") return load_canonical(path, diag);
  if (format == "ctw1500") return load_ctw1500(path, options, diag);
  if (format == "totaltext") return load_totaltext(path, options, diag);
  throw DataError("unknown corpus format '" + format +
                  "' (expected canonical, ctw1500 or totaltext)");
}

void write_grids(std::ostream& out, const PredictionGrids& grids) {
  grids.validate();
  out.write(kGridMagic, sizeof(kGridMagic));
  put_u32(out, kGridVersion);
  put_u32(out, static_cast<std::uint32_t>(grids.stride));
  put_u32(out, static_cast<std::uint32_t>(grids.rows));
  put_u32(out, static_cast<std::uint32_t>(grids.cols));
  put_u32(out, static_cast<std::uint32_t>(grids.n));
  put_u32(out, static_cast<std::uint32_t>(grids.image_width));
  put_u32(out, static_cast<std::uint32_t>(grids.image_height));
  put_u32(out, static_cast<std::uint32_t>(grids.image_id.size()));
  out.write(grids.image_id.data(),
            static_cast<std::streamsize>(grids.image_id.size()));
  put_floats(out, grids.scores);
  put_floats(out, grids.boxes);
  put_floats(out, grids.vectors);
}

std::vector<PredictionGrids> read_grids(std::istream& in) {
  std::vector<PredictionGrids> out;
  while (true) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() == 0) break;
    if (in.gcount() != 8 ||
        std::memcmp(magic.data(), kGridMagic, sizeof(kGridMagic)) != 0) {
      throw DataError("grid file: bad frame magic");
    }
    std::array<std::uint32_t, 8> h{};
    for (auto& v : h) {
      if (!get_u32(in, v)) throw DataError("grid file: truncated header");
    }
    if (h[0] != kGridVersion) throw DataError("grid file: unsupported version");
    constexpr std::uint32_t kMaxDim = 1u << 16;
    if (h[1] == 0 || h[2] > kMaxDim || h[3] > kMaxDim || h[4] > kMaxDim ||
        h[5] > kMaxDim * 8 || h[6] > kMaxDim * 8 || h[7] > 4096) {
      throw DataError("grid file: header values out of range");
    }
    PredictionGrids g;
    g.stride = static_cast<int>(h[1]);
    g.rows = static_cast<int>(h[2]);
    g.cols = static_cast<int>(h[3]);
    g.n = static_cast<int>(h[4]);
    g.image_width = static_cast<int>(h[5]);
    g.image_height = static_cast<int>(h[6]);
    g.image_id.resize(h[7]);
    if (!in.read(g.image_id.data(), h[7])) {
      throw DataError("grid file: truncated image id");
    }
    if (static_cast<long long>(g.rows) * g.stride < g.image_height ||
        static_cast<long long>(g.cols) * g.stride < g.image_width) {
      throw DataError("grid file: grid does not cover the image size");
    }
    const std::size_t cells = g.cell_count();
    get_floats(in, g.scores, cells);
    get_floats(in, g.boxes, 4 * cells);
    get_floats(in, g.vectors, static_cast<std::size_t>(g.n) * cells);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<PredictionGrids> load_grids(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read grid file: " + path.string());
  return read_grids(in);
}

PredictionGrids grids_from_labels(const LabelGrid& labels,
                                  const std::string& image_id, int image_width,
                                  int image_height, int n) {
  PredictionGrids g;
  g.image_id = image_id;
  g.image_width = image_width;
  g.image_height = image_height;
  g.stride = labels.stride;
  g.rows = labels.rows;
  g.cols = labels.cols;
  g.n = n;
  const std::size_t cells = labels.cell_count();
  g.scores.assign(cells, 0.0f);
  g.boxes.assign(4 * cells, 0.0f);
  g.vectors.assign(static_cast<std::size_t>(n) * cells, 0.0f);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (!labels.kernel[cell]) continue;
    g.scores[cell] = 1.0f;
    for (std::size_t ch = 0; ch < 4; ++ch) {
      g.boxes[ch * cells + cell] = labels.box_target[cell][ch];
    }
    const auto& vec = labels.vector_table[labels.assignment[cell]];
    for (int i = 0; i < n && i < vec.n(); ++i) {
      g.vectors[static_cast<std::size_t>(i) * cells + cell] =
          static_cast<float>(vec.coeffs[i]);
    }
  }
  return g;
}

std::string label_line(const std::string& image_id, const LabelGrid& labels) {
  json j;
  j["image_id"] = image_id;
  j["stride"] = labels.stride;
  j["rows"] = labels.rows;
  j["cols"] = labels.cols;
  j["positives"] = labels.positives();
  j["conflicts"] = labels.conflicts;
  j["fallback_instances"] = labels.fallback_instances;
  j["kernel"] = labels.kernel;
  j["ignore"] = labels.ignore;
  json cells = json::array();
  for (std::size_t cell = 0; cell < labels.cell_count(); ++cell) {
    if (!labels.kernel[cell]) continue;
    const auto& b = labels.box_target[cell];
    cells.push_back({{"cell", cell},
                     {"box", {b[0], b[1], b[2], b[3]}},
                     {"instance", labels.assignment[cell]}});
  }
  j["cells"] = std::move(cells);
  json vectors = json::array();
  for (const auto& v : labels.vector_table) {
    vectors.push_back({{"k", v.k}, {"coeffs", v.coeffs}});
  }
  j["vectors"] = std::move(vectors);
  return j.dump();
}

std::string detection_line(const std::string& image_id,
                           const std::vector<FinalDetection>& detections) {
  json j;
  j["image_id"] = image_id;
  json dets = json::array();
  for (const auto& d : detections) {
    json contours = json::array();
    for (const auto& c : d.contours) contours.push_back(points_json(c));
    dets.push_back({{"score", d.score},
                    {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}},
                    {"kernel_id", d.kernel_id},
                    {"source_cell", d.source_cell},
                    {"mask_pixels", d.mask.patch.count()},
                    {"contours", std::move(contours)}});
  }
  j["detections"] = std::move(dets);
  return j.dump();
}

std::vector<DetectionFileEntry> read_detections(std::istream& in) {
  std::vector<DetectionFileEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      DetectionFileEntry entry;
      entry.image_id = j.at("image_id").get<std::string>();
      for (const auto& d : j.at("detections")) {
        FinalDetection fd;
        fd.score = d.at("score").get<float>();
        const auto& b = d.at("box");
        fd.box = {b.at(0).get<double>(), b.at(1).get<double>(),
                  b.at(2).get<double>(), b.at(3).get<double>()};
        fd.kernel_id = d.value("kernel_id", 0);
        fd.source_cell = d.value("source_cell", 0);
        for (const auto& c : d.at("contours")) {
          fd.contours.push_back(polygon_from_json(c));
        }
        entry.detections.push_back(std::move(fd));
      }
      out.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw DataError("detections line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

}  // namespace textdct
