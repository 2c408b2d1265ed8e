#pragma once

// Raw planar video input: Y4M (self-describing) and headerless YUV, served in
// non-overlapping groups of T' frames with chroma upsampled to full resolution.

#include "chipqa/core.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace chipqa {

enum class ChromaSubsampling { c420, c422, c444 };

struct VideoHeader {
  int width = 0;
  int height = 0;
  int fps_num = 0;
  int fps_den = 1;
  ChromaSubsampling subsampling = ChromaSubsampling::c420;
  int bit_depth = 8;                 // 8 or 10
  std::optional<long> frame_count;   // unknown for pipes/headerless streams
};

struct PlanarFrame {
  Fieldd y;    // [0,1]
  Fieldd cb;   // [0,1], full resolution after upsampling
  Fieldd cr;
  long index = 0;
};

struct FrameGroup {
  std::vector<PlanarFrame> frames;  // exactly T' frames, consecutive
  long group_index = 0;
};

// Geometry hint for headerless raw YUV streams.
struct RawFormatHint {
  int width = 0;
  int height = 0;
  ChromaSubsampling subsampling = ChromaSubsampling::c420;
  int bit_depth = 8;
};

class VideoReader {
 public:
  virtual ~VideoReader() = default;
  virtual const VideoHeader& header() const = 0;
  // Next frame with chroma upsampled to full resolution; nullopt at end of stream.
  virtual std::optional<PlanarFrame> next_frame() = 0;
};

// Opens a Y4M stream (header parsed from the stream) or raw YUV (hint required).
// Throws format_error naming the byte offset on malformed headers.
std::unique_ptr<VideoReader> open_video(const std::string& path,
                                        const std::optional<RawFormatHint>& hint = std::nullopt);
std::unique_ptr<VideoReader> open_video(std::unique_ptr<std::istream> stream,
                                        const std::optional<RawFormatHint>& hint = std::nullopt);

// Parses just a Y4M header line (exposed for tests).
VideoHeader parse_y4m_header(const std::string& line);

// Reads the next T' consecutive frames; a trailing partial group is discarded.
std::optional<FrameGroup> next_group(VideoReader& reader, int t_prime, long& next_index);

// Writes frames as Y4M 4:2:0 8-bit (test fixtures and synthetic corpora).
// Chroma planes are half resolution in [0,1]; the luma-only form writes
// neutral chroma.
void write_y4m_420(const std::string& path, const std::vector<Fieldd>& luma_frames,
                   const std::vector<Fieldd>& cb_half, const std::vector<Fieldd>& cr_half,
                   int fps_num = 30, int fps_den = 1);
void write_y4m_420(const std::string& path, const std::vector<Fieldd>& luma_frames,
                   int fps_num = 30, int fps_den = 1);

}  // namespace chipqa
