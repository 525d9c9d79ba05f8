#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "textdct/dataio.hpp"
#include "textdct/synthetic.hpp"

using namespace textdct;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("textdct_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
  }
};

// 14-point rectangle outline: 7 points along the top, 7 back along the bottom.
std::string ctw_rect_line(int x0, int y0, int x1, int y1) {
  std::ostringstream s;
  for (int i = 0; i < 7; ++i) s << (i ? "," : "") << x0 + (x1 - x0) * i / 6 << "," << y0;
  for (int i = 6; i >= 0; --i) s << "," << x0 + (x1 - x0) * i / 6 << "," << y1;
  return s.str();
}

}  // namespace

TEST(Ctw1500, AbsoluteLayout) {
  TempDir d;
  d.write("0001.txt", ctw_rect_line(10, 20, 130, 50) + ",####HELLO\n");
  d.write("0002.txt", "");
  LoadDiagnostics diag;
  const auto c = load_ctw1500(d.path, {}, diag);
  ASSERT_EQ(c.size(), 2u);
  ASSERT_EQ(c[0].instances.size(), 1u);
  EXPECT_EQ(c[0].instances[0].polygon.size(), 14u);
  EXPECT_EQ(bounding_box(c[0].instances[0].polygon), (Box{10, 20, 130, 50}));
  EXPECT_TRUE(c[1].instances.empty());
  EXPECT_EQ(diag.layouts["absolute"], 1);
  EXPECT_FALSE(c[0].instances[0].ignore);
}

TEST(Ctw1500, BboxOffsetLayoutAndDontCare) {
  TempDir d;
  std::ostringstream line;
  line << "100,200,220,230";
  for (int i = 0; i < 7; ++i) line << "," << 20 * i << ",0";
  for (int i = 6; i >= 0; --i) line << "," << 20 * i << ",30";
  d.write("1001.txt", line.str() + ",####\n" + ctw_rect_line(0, 0, 60, 10) + ",#######\n");
  LoadDiagnostics diag;
  const auto c = load_ctw1500(d.path, {}, diag);
  ASSERT_EQ(c[0].instances.size(), 2u);
  EXPECT_EQ(bounding_box(c[0].instances[0].polygon), (Box{100, 200, 220, 230}));
  EXPECT_EQ(diag.layouts["bbox+offset"], 1);
  EXPECT_TRUE(c[0].instances[1].ignore);
}

TEST(Ctw1500, MalformedLinesSkippedAndCounted) {
  TempDir d;
  d.write("a.txt", ctw_rect_line(0, 0, 60, 10) + "\n1,2,3,4\nnot,numbers\n" +
                       ctw_rect_line(0, 20, 60, 40) + "\n");
  LoadDiagnostics diag;
  const auto c = load_ctw1500(d.path, {}, diag);
  EXPECT_EQ(c[0].instances.size(), 2u);
  EXPECT_EQ(diag.skipped_lines, 2);
  EXPECT_EQ(diag.messages.size(), 2u);
}

TEST(Ctw1500, InstanceCountMatchesLineCount) {
  TempDir d;
  int lines = 0;
  for (int f = 0; f < 6; ++f) {
    std::string text;
    for (int i = 0; i <= f; ++i) {
      text += ctw_rect_line(5, 10 + 20 * i, 80 + f, 25 + 20 * i) + "\n";
    }
    d.write("img" + std::to_string(f) + ".txt", text);
  }
  // Independent count: non-empty lines across all files.
  for (const auto& e : fs::directory_iterator(d.path)) {
    std::ifstream in(e.path());
    for (std::string s; std::getline(in, s);) lines += !s.empty();
  }
  LoadDiagnostics diag;
  const auto c = load_ctw1500(d.path, {}, diag);
  int n = 0;
  for (const auto& r : c) n += static_cast<int>(r.instances.size());
  EXPECT_EQ(n, lines);
}

TEST(Ctw1500, MissingDirectoryThrows) {
  LoadDiagnostics diag;
  EXPECT_THROW(load_ctw1500("/nonexistent/textdct", {}, diag), DataError);
}

TEST(TotalText, MatlabLayout) {
  TempDir d;
  d.write("poly_gt_img11.txt",
          "x: [[115 503 494 115]], y: [[322 346 426 404]], ornt: [u'm'], "
          "transcriptions: [u'nauGHTY']\n"
          "x: [[734 1058 1061 744]], y: [[360 369 449 430]], ornt: [u'#'],\n"
          "transcriptions: [u'#']\n"
          "x: [[1 4 7 8 7 4 1]], y: [[8 6 8 11 14 12 14]], ornt: [u'c'], "
          "transcriptions: [u'x']\n");
  LoadDiagnostics diag;
  const auto c = load_totaltext(d.path, {}, diag);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].image_id, "img11");
  ASSERT_EQ(c[0].instances.size(), 3u);
  EXPECT_EQ(c[0].instances[0].polygon.size(), 4u);
  EXPECT_FALSE(c[0].instances[0].ignore);
  EXPECT_TRUE(c[0].instances[1].ignore);
  EXPECT_EQ(c[0].instances[2].polygon.size(), 7u);
}

TEST(TotalText, CsvLayoutVertexCounts) {
  TempDir d;
  d.write("gt_img5.txt", "10,10,50,10,50,30,10,30,word\n0,0,9,0,12,5,9,10,0,10,#\n");
  LoadDiagnostics diag;
  const auto c = load_totaltext(d.path, {}, diag);
  ASSERT_EQ(c[0].instances.size(), 2u);
  EXPECT_EQ(c[0].instances[0].polygon.size(), 4u);
  EXPECT_EQ(c[0].instances[1].polygon.size(), 5u);
  EXPECT_TRUE(c[0].instances[1].ignore);
}

TEST(Loaders, RejectSelfIntersecting) {
  TempDir d;
  d.write("a.txt", "0,0,10,10,10,0,0,10,bow\n");
  LoadDiagnostics diag;
  EXPECT_TRUE(load_totaltext(d.path, {}, diag)[0].instances.empty());
  EXPECT_EQ(diag.rejected_polygons, 1);
}

TEST(Loaders, ClipKeepsOriginal) {
  TempDir d;
  d.write("a.txt", ctw_rect_line(-10, 0, 50, 20) + "\n");
  std::ofstream png(d.path / "a.png", std::ios::binary);
  // Minimal PNG signature plus IHDR with width 40, height 30.
  const unsigned char head[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n', 0, 0, 0, 13,
                                'I', 'H', 'D', 'R', 0, 0, 0, 40, 0, 0, 0, 30, 8, 2, 0, 0, 0};
  png.write(reinterpret_cast<const char*>(head), sizeof head);
  png.close();
  LoadOptions opt;
  opt.image_dir = d.path;
  LoadDiagnostics diag;
  const auto c = load_ctw1500(d.path, opt, diag);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].width, 40);
  EXPECT_EQ(c[0].height, 30);
  EXPECT_EQ(bounding_box(c[0].instances[0].polygon), (Box{0, 0, 40, 20}));
  EXPECT_EQ(bounding_box(c[0].originals[0]), (Box{-10, 0, 50, 20}));
  EXPECT_EQ(diag.inferred_sizes, 0);
}

TEST(Canonical, Roundtrip) {
  auto corpus = generate_synthetic_corpus(5, 8);
  corpus[0].instances[0].ignore = true;
  std::stringstream s;
  write_canonical(s, corpus);
  LoadDiagnostics diag;
  const auto back = read_canonical(s, diag);
  ASSERT_EQ(back.size(), corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(back[i].image_id, corpus[i].image_id);
    EXPECT_EQ(back[i].width, corpus[i].width);
    ASSERT_EQ(back[i].instances.size(), corpus[i].instances.size());
    for (std::size_t j = 0; j < corpus[i].instances.size(); ++j) {
      EXPECT_EQ(back[i].instances[j].ignore, corpus[i].instances[j].ignore);
      const auto& a = back[i].instances[j].polygon;
      const auto& b = corpus[i].instances[j].polygon;
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a[k].x, b[k].x, 1e-3);
        EXPECT_NEAR(a[k].y, b[k].y, 1e-3);
      }
    }
  }
  std::stringstream again;
  write_canonical(again, back);
  s.clear();
  s.seekg(0);
  EXPECT_EQ(again.str(), s.str());
}

TEST(Canonical, BadLinesThrow) {
  LoadDiagnostics diag;
  std::stringstream bad("{\"image_id\": \"x\"\n");
  EXPECT_THROW(read_canonical(bad, diag), DataError);
  std::stringstream wrong("{\"schema\":1,\"image_id\":\"x\",\"width\":10,\"height\":10,"
                          "\"instances\":[{\"points\":[[1,2,3]],\"ignore\":false}]}\n");
  EXPECT_THROW(read_canonical(wrong, diag), DataError);
}

TEST(Grids, BinaryRoundtripTwoFrames) {
  PredictionGrids g;
  g.image_id = "frame_one";
  g.image_width = 30;
  g.image_height = 20;
  g.stride = 8;
  g.rows = 3;
  g.cols = 4;
  g.n = 2;
  for (int i = 0; i < 12; ++i) g.scores.push_back(i * 0.1f);
  for (int i = 0; i < 48; ++i) g.boxes.push_back(i * 1.5f);
  for (int i = 0; i < 24; ++i) g.vectors.push_back(-i * 0.25f);
  PredictionGrids h = g;
  h.image_id = "b";
  std::stringstream s;
  write_grids(s, g);
  write_grids(s, h);
  const auto back = read_grids(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].image_id, "frame_one");
  EXPECT_EQ(back[1].image_id, "b");
  EXPECT_EQ(back[0].scores, g.scores);
  EXPECT_EQ(back[0].boxes, g.boxes);
  EXPECT_EQ(back[0].vectors, g.vectors);
  EXPECT_EQ(back[0].rows, 3);
  EXPECT_EQ(back[0].n, 2);
}

TEST(Grids, LayoutIsLittleEndian) {
  PredictionGrids g;
  g.image_id = "z";
  g.image_width = 8;
  g.image_height = 8;
  g.stride = 8;
  g.rows = 1;
  g.cols = 1;
  g.n = 1;
  g.scores = {1.0f};
  g.boxes = {0, 0, 0, 0};
  g.vectors = {0};
  std::stringstream s;
  write_grids(s, g);
  const std::string bytes = s.str();
  // 8 magic + 8 u32 header + 1 id byte + 6 floats
  ASSERT_EQ(bytes.size(), 8u + 32u + 1u + 24u);
  EXPECT_EQ(bytes.substr(0, 8), "TDCTGRID");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);  // version, low byte first
  EXPECT_EQ(bytes[9], 0);
  // 1.0f = 0x3f800000
  EXPECT_EQ(static_cast<unsigned char>(bytes[41]), 0x00);
  EXPECT_EQ(static_cast<unsigned char>(bytes[44]), 0x3f);
}

TEST(Grids, CorruptInputThrows) {
  std::stringstream bad("NOTAGRID........");
  EXPECT_THROW(read_grids(bad), DataError);
  PredictionGrids g;
  g.image_id = "t";
  g.image_width = 16;
  g.image_height = 16;
  g.rows = 2;
  g.cols = 2;
  g.n = 1;
  g.scores.assign(4, 0);
  g.boxes.assign(16, 0);
  g.vectors.assign(4, 0);
  std::stringstream s;
  write_grids(s, g);
  std::string cut = s.str();
  cut.resize(cut.size() - 3);
  std::stringstream t(cut);
  EXPECT_THROW(read_grids(t), DataError);
}

TEST(Grids, FromLabels) {
  const Polygon p({{8, 8}, {40, 8}, {40, 40}, {8, 40}});
  LabelParams lp;
  lp.shrink_rate = 1.0;
  lp.n = 10;
  const auto labels = generate_labels({{p, false}}, 64, 64, lp);
  const auto g = grids_from_labels(labels, "x", 64, 64, 10);
  g.validate();
  int ones = 0;
  for (float s : g.scores) ones += s == 1.0f;
  EXPECT_EQ(ones, labels.positives());
  const std::size_t cell = 9;
  EXPECT_FLOAT_EQ(g.vectors[cell], static_cast<float>(labels.vector_table[0].coeffs[0]));
}

TEST(Detections, LineRoundtrip) {
  FinalDetection fd;
  fd.score = 0.875f;
  fd.box = {1, 2, 30, 40};
  fd.contours = {Polygon({{1, 2}, {30, 2}, {30, 40}})};
  std::stringstream s(detection_line("img", {fd}) + "\n");
  const auto back = read_detections(s);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].image_id, "img");
  ASSERT_EQ(back[0].detections.size(), 1u);
  EXPECT_FLOAT_EQ(back[0].detections[0].score, 0.875f);
  EXPECT_EQ(back[0].detections[0].contours[0], fd.contours[0]);
}

TEST(ImageSize, PngHeader) {
  EXPECT_FALSE(read_image_size("/nonexistent.png").has_value());
}
