#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "textdct/corpus.hpp"
#include "textdct/postprocess.hpp"
#include "textdct/sampling.hpp"

namespace textdct {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadDiagnostics {
  int files = 0;
  int lines = 0;
  int instances = 0;
  int skipped_lines = 0;
  int rejected_polygons = 0;
  /// Records whose size came from annotation extents instead of an image.
  int inferred_sizes = 0;
  /// CTW1500 line layouts seen: "absolute" and/or "bbox+offset".
  std::map<std::string, int> layouts;
  std::vector<std::string> messages;
};

struct LoadOptions {
  /// Directory of images used only to read width/height from file headers.
  std::optional<std::filesystem::path> image_dir;
  bool reject_self_intersecting = true;
};

/// Directory of per-image .txt files, one 14-point text line per row.
/// Lines with 28 numbers are absolute points; lines with 32 are a box
/// followed by 14 offsets from its top-left corner. Anything after "####"
/// is a transcription.
std::vector<CorpusRecord> load_ctw1500(const std::filesystem::path& dir,
                                       const LoadOptions& options,
                                       LoadDiagnostics& diag);

/// Directory of Total-Text ground-truth .txt files in either the
/// "x: [[..]], y: [[..]], ornt: [..], transcriptions: [..]" layout or the
/// comma-separated "x1,y1,...,xn,yn,transcription" layout. A transcription
/// of "#" (or "###") marks the instance as ignored.
std::vector<CorpusRecord> load_totaltext(const std::filesystem::path& dir,
                                         const LoadOptions& options,
                                         LoadDiagnostics& diag);

/// Canonical JSON-lines corpus, one record per line.
std::vector<CorpusRecord> load_canonical(const std::filesystem::path& path,
                                         LoadDiagnostics& diag);
std::vector<CorpusRecord> read_canonical(std::istream& in,
                                         LoadDiagnostics& diag);
void write_canonical(std::ostream& out, const std::vector<CorpusRecord>& corpus);
std::string canonical_line(const CorpusRecord& record);

/// Dispatches on `format` ("canonical", "ctw1500", "totaltext").
std::vector<CorpusRecord> load_corpus(const std::string& format,
                                      const std::filesystem::path& path,
                                      const LoadOptions& options,
                                      LoadDiagnostics& diag);

/// Width and height from a PNG or JPEG header, without decoding pixels.
std::optional<std::pair<int, int>> read_image_size(
    const std::filesystem::path& path);

inline constexpr char kGridMagic[8] = {'T', 'D', 'C', 'T', 'G', 'R', 'I', 'D'};
inline constexpr std::uint32_t kGridVersion = 1;

/// Appends one frame in the little-endian grid container format.
void write_grids(std::ostream& out, const PredictionGrids& grids);
/// Reads every frame until end of stream. Throws DataError on a bad magic,
/// truncated planes, or header values that do not fit the payload.
std::vector<PredictionGrids> read_grids(std::istream& in);
std::vector<PredictionGrids> load_grids(const std::filesystem::path& path);

/// Prediction grids a perfect head would emit for these labels: score 1 on
/// positive cells, the box targets, and each cell's assigned vector.
PredictionGrids grids_from_labels(const LabelGrid& labels,
                                  const std::string& image_id, int image_width,
                                  int image_height, int n);

std::string label_line(const std::string& image_id, const LabelGrid& labels);
std::string detection_line(const std::string& image_id,
                           const std::vector<FinalDetection>& detections);

struct DetectionFileEntry {
  std::string image_id;
  std::vector<FinalDetection> detections;
};
/// Parses detection JSON-lines (contours, score, box); masks are not stored.
std::vector<DetectionFileEntry> read_detections(std::istream& in);

}  // namespace textdct
