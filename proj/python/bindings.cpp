#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "textdct/dataio.hpp"
#include "textdct/dct_codec.hpp"
#include "textdct/geometry.hpp"
#include "textdct/losses.hpp"
#include "textdct/postprocess.hpp"
#include "textdct/sampling.hpp"

namespace py = pybind11;
using namespace textdct;

namespace {

// Buffers that already have the wanted dtype and C layout are used in place;
// anything else of an acceptable kind is copied once by `ensure`.
template <class T>
py::array_t<T, py::array::c_style | py::array::forcecast> view(
    const py::array& a, const char* name, const char* kinds,
    std::initializer_list<py::ssize_t> shape) {
  const char kind = a.dtype().kind();
  if (std::string(kinds).find(kind) == std::string::npos) {
    throw py::type_error(std::string(name) + ": unsupported dtype " +
                         py::str(a.dtype()).cast<std::string>());
  }
  if (a.ndim() != static_cast<py::ssize_t>(shape.size())) {
    throw py::value_error(std::string(name) + ": expected " +
                          std::to_string(shape.size()) + " dimensions, got " +
                          std::to_string(a.ndim()));
  }
  int axis = 0;
  for (py::ssize_t want : shape) {
    if (want >= 0 && a.shape(axis) != want) {
      throw py::value_error(std::string(name) + ": axis " + std::to_string(axis) +
                            " has length " + std::to_string(a.shape(axis)) +
                            ", expected " + std::to_string(want));
    }
    ++axis;
  }
  auto out = py::array_t<T, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!out) throw py::error_already_set();
  return out;
}

template <class T>
std::span<const T> span_of(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}

BinaryMask to_mask(const py::array& a) {
  auto v = view<std::uint8_t>(a, "mask", "bu", {-1, -1});
  BinaryMask m(static_cast<int>(v.shape(1)), static_cast<int>(v.shape(0)));
  const auto src = span_of(v);
  auto dst = m.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 1 : 0;
  return m;
}

Polygon to_polygon(const py::array& a) {
  auto v = view<double>(a, "points", "fiu", {-1, 2});
  std::vector<Point> pts(static_cast<std::size_t>(v.shape(0)));
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {v.at(i, 0), v.at(i, 1)};
  return Polygon(std::move(pts));
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> points_array(const Polygon& p) {
  const auto& pts = p.vertices();
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    w(i, 0) = pts[i].x;
    w(i, 1) = pts[i].y;
  }
  return out;
}

py::array_t<std::int64_t> index_array(const std::vector<std::size_t>& idx) {
  py::array_t<std::int64_t> out(static_cast<py::ssize_t>(idx.size()));
  std::copy(idx.begin(), idx.end(), out.mutable_data());
  return out;
}

// --- codec ------------------------------------------------------------------

py::array_t<double> py_encode(const py::array& mask, int k, int n) {
  const BinaryMask m = to_mask(mask);
  DctMaskVector v;
  {
    py::gil_scoped_release nogil;
    v = encode(m, k, n);
  }
  return to_array(v.coeffs);
}

py::array_t<double> py_encode_polygon(const py::array& points, int k, int n) {
  const Polygon p = to_polygon(points);
  DctMaskVector v;
  {
    py::gil_scoped_release nogil;
    v = encode(p, k, n);
  }
  return to_array(v.coeffs);
}

py::array_t<double> py_decode(const py::array& coeffs, int k) {
  auto c = view<double>(coeffs, "coeffs", "fiu", {-1});
  DctMaskVector v;
  v.k = k;
  v.coeffs.assign(c.data(), c.data() + c.size());
  MaskGrid grid;
  {
    py::gil_scoped_release nogil;
    grid = decode(v);
  }
  py::array_t<double> out({static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(k)});
  std::copy(grid.values().begin(), grid.values().end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> py_binarize(const py::array& grid, double threshold) {
  auto g = view<double>(grid, "grid", "fiu", {-1, -1});
  if (g.shape(0) != g.shape(1)) throw py::value_error("grid: expected a square array");
  const int k = static_cast<int>(g.shape(0));
  if (k == 0) return py::array_t<std::uint8_t>({py::ssize_t{0}, py::ssize_t{0}});
  MaskGrid m(k, std::vector<double>(g.data(), g.data() + g.size()));
  const BinaryMask b = binarize(m, threshold);
  py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(k)});
  std::copy(b.data().begin(), b.data().end(), out.mutable_data());
  return out;
}

// --- labels -----------------------------------------------------------------

py::dict py_generate_labels(const std::vector<py::array>& polygons, int width,
                            int height, std::vector<bool> ignore,
                            int stride, double shrink_rate, int k, int n,
                            const std::string& sampling, int radius) {
  if (ignore.empty()) ignore.assign(polygons.size(), false);
  if (ignore.size() != polygons.size()) {
    throw py::value_error("ignore: length differs from the polygon list");
  }
  if (sampling != "tks" && sampling != "center") {
    throw py::value_error("sampling: expected 'tks' or 'center'");
  }
  std::vector<TextInstance> instances;
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    instances.push_back({to_polygon(polygons[i]), static_cast<bool>(ignore[i])});
  }
  LabelParams lp;
  lp.stride = stride;
  lp.shrink_rate = shrink_rate;
  lp.k = k;
  lp.n = n;
  LabelGrid g;
  {
    py::gil_scoped_release nogil;
    g = sampling == "center"
            ? generate_labels_center_sampling(instances, width, height, lp, radius)
            : generate_labels(instances, width, height, lp);
  }
  const py::ssize_t rows = g.rows;
  const py::ssize_t cols = g.cols;
  py::array_t<std::uint8_t> kernel({rows, cols});
  py::array_t<std::uint8_t> ign({rows, cols});
  py::array_t<float> box({rows, cols, py::ssize_t{4}});
  py::array_t<std::int32_t> assignment({rows, cols});
  std::copy(g.kernel.begin(), g.kernel.end(), kernel.mutable_data());
  std::copy(g.ignore.begin(), g.ignore.end(), ign.mutable_data());
  std::copy(g.assignment.begin(), g.assignment.end(), assignment.mutable_data());
  float* b = box.mutable_data();
  for (const auto& t : g.box_target) b = std::copy(t.begin(), t.end(), b);
  py::array_t<double> vectors({static_cast<py::ssize_t>(g.vector_table.size()),
                               static_cast<py::ssize_t>(n)});
  double* v = vectors.mutable_data();
  for (const auto& vec : g.vector_table) {
    // Ignored instances carry no vector; their row stays zero.
    std::fill(v, v + n, 0.0);
    std::copy(vec.coeffs.begin(), vec.coeffs.end(), v);
    v += n;
  }
  py::dict out;
  out["stride"] = g.stride;
  out["kernel"] = kernel;
  out["ignore"] = ign;
  out["box_target"] = box;
  out["assignment"] = assignment;
  out["vectors"] = vectors;
  out["positives"] = g.positives();
  out["conflicts"] = g.conflicts;
  out["fallback_instances"] = g.fallback_instances;
  return out;
}

// --- NMS --------------------------------------------------------------------

std::vector<Detection> to_detections(const py::array& boxes, const py::array& scores,
                                     const py::object& kernel_ids,
                                     const py::object& source_cells) {
  auto b = view<double>(boxes, "boxes", "fiu", {-1, 4});
  const py::ssize_t count = b.shape(0);
  auto s = view<float>(scores, "scores", "fiu", {count});
  std::vector<Detection> dets(static_cast<std::size_t>(count));
  for (py::ssize_t i = 0; i < count; ++i) {
    dets[i].box = {b.at(i, 0), b.at(i, 1), b.at(i, 2), b.at(i, 3)};
    dets[i].score = s.at(i);
    dets[i].source_cell = static_cast<int>(i);
  }
  if (!kernel_ids.is_none()) {
    auto k = view<std::int32_t>(kernel_ids.cast<py::array>(), "kernel_ids", "iu", {count});
    for (py::ssize_t i = 0; i < count; ++i) dets[i].kernel_id = k.at(i);
  }
  if (!source_cells.is_none()) {
    auto c = view<std::int32_t>(source_cells.cast<py::array>(), "source_cells", "iu", {count});
    for (py::ssize_t i = 0; i < count; ++i) dets[i].source_cell = c.at(i);
  }
  return dets;
}

template <auto Fn>
py::array_t<std::int64_t> py_nms(const py::array& boxes, const py::array& scores,
                                 const py::object& kernel_ids,
                                 const py::object& source_cells, double iou) {
  const auto dets = to_detections(boxes, scores, kernel_ids, source_cells);
  std::vector<std::size_t> keep;
  {
    py::gil_scoped_release nogil;
    keep = Fn(std::span<const Detection>(dets), iou);
  }
  return index_array(keep);
}

py::list py_postprocess(const py::array& scores, const py::array& boxes,
                        const py::array& vectors, int image_width,
                        int image_height, int stride, int k, double tau_a,
                        double tau_b, double nms_iou, const std::string& variant) {
  auto s = view<float>(scores, "scores", "f", {-1, -1});
  const py::ssize_t rows = s.shape(0);
  const py::ssize_t cols = s.shape(1);
  auto b = view<float>(boxes, "boxes", "f", {4, rows, cols});
  auto v = view<float>(vectors, "vectors", "f", {-1, rows, cols});
  PredictionGrids g;
  g.image_width = image_width;
  g.image_height = image_height;
  g.stride = stride;
  g.rows = static_cast<int>(rows);
  g.cols = static_cast<int>(cols);
  g.n = static_cast<int>(v.shape(0));
  g.scores.assign(s.data(), s.data() + s.size());
  g.boxes.assign(b.data(), b.data() + b.size());
  g.vectors.assign(v.data(), v.data() + v.size());
  PostprocessConfig pc;
  pc.k = k;
  pc.tau_a = tau_a;
  pc.tau_b = tau_b;
  pc.nms_iou = nms_iou;
  pc.variant = parse_nms_variant(variant);
  PostprocessResult r;
  {
    py::gil_scoped_release nogil;
    r = run_postprocess(g, pc);
  }
  py::list out;
  for (const auto& d : r.detections) {
    py::list contours;
    for (const auto& c : d.contours) contours.append(points_array(c));
    py::dict item;
    item["score"] = d.score;
    item["box"] = py::make_tuple(d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max);
    item["kernel_id"] = d.kernel_id;
    item["source_cell"] = d.source_cell;
    item["contours"] = contours;
    out.append(item);
  }
  return out;
}

// --- losses -----------------------------------------------------------------

py::tuple py_dice(const py::array& pred, const py::array& gt, const py::object& valid) {
  auto p = view<float>(pred, "pred", "fiu", {-1});
  auto g = view<float>(gt, "gt", "fiu", {p.shape(0)});
  py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> m;
  std::span<const std::uint8_t> mask;
  if (!valid.is_none()) {
    m = view<std::uint8_t>(valid.cast<py::array>(), "valid", "bu", {p.shape(0)});
    mask = span_of(m);
  }
  DiceResult r;
  {
    py::gil_scoped_release nogil;
    r = dice_loss(span_of(p), span_of(g), mask);
  }
  return py::make_tuple(r.loss, r.empty);
}

Box to_box(const py::array& a, const char* name) {
  auto v = view<double>(a, name, "fiu", {4});
  return {v.at(0), v.at(1), v.at(2), v.at(3)};
}

py::tuple py_giou(const py::array& a, const py::array& b) {
  const GiouResult r = giou_loss(to_box(a, "a"), to_box(b, "b"));
  return py::make_tuple(r.loss, r.degenerate);
}

double py_mask_vector_loss(const py::array& pred, const py::array& gt, bool is_text,
                           double beta) {
  auto p = view<float>(pred, "pred", "fiu", {-1});
  auto g = view<float>(gt, "gt", "fiu", {p.shape(0)});
  py::gil_scoped_release nogil;
  return mask_vector_loss(span_of(p), span_of(g), is_text, beta);
}

py::dict py_total_loss(double l_cls, double l_box, double l_mask, double lambda_box,
                       double lambda_mask) {
  const LossBreakdown r = total_loss(l_cls, l_box, l_mask, lambda_box, lambda_mask);
  py::dict out;
  out["l_cls"] = r.l_cls;
  out["l_box"] = r.l_box;
  out["l_mask"] = r.l_mask;
  out["lambda_box"] = r.lambda_box;
  out["lambda_mask"] = r.lambda_mask;
  out["total"] = r.total;
  return out;
}

}  // namespace

PYBIND11_MODULE(_textdct, m) {
  m.doc() = "Native core of the textdct package";
  m.attr("__version__") = TEXTDCT_VERSION;

  py::register_exception<CodecError>(m, "CodecError", PyExc_ValueError);
  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  using namespace py::literals;

  m.def("encode", &py_encode, "mask"_a, "k"_a = 64, "n"_a = 300);
  m.def("encode_polygon", &py_encode_polygon, "points"_a, "k"_a = 64, "n"_a = 300);
  m.def("decode", &py_decode, "coeffs"_a, "k"_a = 64);
  m.def("binarize", &py_binarize, "grid"_a, "threshold"_a = 0.35);
  m.def(
      "reconstruction_iou",
      [](const py::array& points, int k, int n, double threshold) {
        const Polygon p = to_polygon(points);
        py::gil_scoped_release nogil;
        return reconstruction_iou(p, k, n, threshold);
      },
      "points"_a, "k"_a = 64, "n"_a = 300, "threshold"_a = 0.35);

  m.def("generate_labels", &py_generate_labels, "polygons"_a, "width"_a, "height"_a,
        "ignore"_a = std::vector<bool>{}, "stride"_a = 8, "shrink_rate"_a = 0.5, "k"_a = 64,
        "n"_a = 300, "sampling"_a = "tks", "radius"_a = 1);

  m.def("s_nms", &py_nms<&s_nms_indices>, "boxes"_a, "scores"_a,
        "kernel_ids"_a = py::none(), "source_cells"_a = py::none(), "iou_threshold"_a = 0.5);
  m.def("nms", &py_nms<&nms_indices>, "boxes"_a, "scores"_a,
        "kernel_ids"_a = py::none(), "source_cells"_a = py::none(), "iou_threshold"_a = 0.5);
  m.def("k_nms", &py_nms<&k_nms_indices>, "boxes"_a, "scores"_a,
        "kernel_ids"_a = py::none(), "source_cells"_a = py::none(), "iou_threshold"_a = 0.5);
  m.def("postprocess", &py_postprocess, "scores"_a, "boxes"_a, "vectors"_a,
        "image_width"_a, "image_height"_a, "stride"_a = 8, "k"_a = 64, "tau_a"_a = 0.9,
        "tau_b"_a = 0.35, "nms_iou"_a = 0.5, "variant"_a = "s-nms");

  m.def("dice_loss", &py_dice, "pred"_a, "gt"_a, "valid"_a = py::none());
  m.def("giou_loss", &py_giou, "a"_a, "b"_a);
  m.def("smooth_l1", py::vectorize(&smooth_l1), "x"_a, "beta"_a = 1.0);
  m.def("smooth_l1_grad", py::vectorize(&smooth_l1_grad), "x"_a, "beta"_a = 1.0);
  m.def("mask_vector_loss", &py_mask_vector_loss, "pred"_a, "gt"_a, "is_text"_a,
        "beta"_a = 1.0);
  m.def("total_loss", &py_total_loss, "l_cls"_a, "l_box"_a, "l_mask"_a,
        "lambda_box"_a = 1.0, "lambda_mask"_a = 1.0);
}
