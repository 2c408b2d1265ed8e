#include "chipqa/video_io.hpp"

#include <fstream>
#include <istream>
#include <sstream>

namespace chipqa {
namespace {

ChromaSubsampling parse_colorspace(const std::string& tag, int& bit_depth, std::size_t offset) {
  // Y4M colorspace tags: C420 variants share 4:2:0 siting for our purposes.
  if (tag == "420" || tag == "420jpeg" || tag == "420mpeg2" || tag == "420paldv") {
    bit_depth = 8;
    return ChromaSubsampling::c420;
  }
  if (tag == "422") { bit_depth = 8; return ChromaSubsampling::c422; }
  if (tag == "444") { bit_depth = 8; return ChromaSubsampling::c444; }
  if (tag == "420p10") { bit_depth = 10; return ChromaSubsampling::c420; }
  if (tag == "422p10") { bit_depth = 10; return ChromaSubsampling::c422; }
  if (tag == "444p10") { bit_depth = 10; return ChromaSubsampling::c444; }
  throw format_error("unsupported Y4M colorspace 'C" + tag + "' at byte offset " +
                     std::to_string(offset));
}

struct PlaneGeometry {
  int cw, ch;  // chroma plane dims
};

PlaneGeometry chroma_dims(const VideoHeader& h) {
  switch (h.subsampling) {
    case ChromaSubsampling::c420: return {(h.width + 1) / 2, (h.height + 1) / 2};
    case ChromaSubsampling::c422: return {(h.width + 1) / 2, h.height};
    case ChromaSubsampling::c444: return {h.width, h.height};
  }
  return {h.width, h.height};
}

class StreamReader final : public VideoReader {
 public:
  StreamReader(std::unique_ptr<std::istream> stream, const std::optional<RawFormatHint>& hint)
      : stream_(std::move(stream)) {
    if (!stream_ || !*stream_) throw format_error("video stream could not be opened");
    if (hint) {
      header_.width = hint->width;
      header_.height = hint->height;
      header_.subsampling = hint->subsampling;
      header_.bit_depth = hint->bit_depth;
      y4m_ = false;
    } else {
      std::string line;
      if (!std::getline(*stream_, line)) throw format_error("empty stream: no Y4M header");
      header_ = parse_y4m_header(line);
      offset_ = line.size() + 1;
      y4m_ = true;
    }
    if (header_.width < 1 || header_.height < 1)
      throw format_error("video geometry must be positive");
    if (header_.bit_depth != 8 && header_.bit_depth != 10)
      throw format_error("bit depth must be 8 or 10");
  }

  const VideoHeader& header() const override { return header_; }

  std::optional<PlanarFrame> next_frame() override {
    if (y4m_) {
      std::string marker;
      if (!std::getline(*stream_, marker)) return std::nullopt;
      if (marker.rfind("FRAME", 0) != 0)
        throw format_error("expected FRAME marker at byte offset " + std::to_string(offset_));
      offset_ += marker.size() + 1;
    } else if (stream_->peek() == std::char_traits<char>::eof()) {
      return std::nullopt;
    }

    PlanarFrame f;
    f.index = frame_index_++;
    const auto [cw, ch] = chroma_dims(header_);
    Fieldd cb_sub(ch, cw), cr_sub(ch, cw);
    read_plane(f.y, header_.height, header_.width);
    read_plane(cb_sub, ch, cw);
    read_plane(cr_sub, ch, cw);
    f.cb = upsample(cb_sub);
    f.cr = upsample(cr_sub);
    return f;
  }

 private:
  void read_plane(Fieldd& plane, int rows, int cols) {
    plane.resize(rows, cols);
    const int bytes_per_sample = header_.bit_depth > 8 ? 2 : 1;
    const std::size_t n = static_cast<std::size_t>(rows) * cols * bytes_per_sample;
    buf_.resize(n);
    stream_->read(buf_.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(stream_->gcount()) != n)
      throw format_error("truncated frame payload at frame " + std::to_string(frame_index_ - 1) +
                         " (byte offset " + std::to_string(offset_ + stream_->gcount()) + ")");
    offset_ += n;
    // Exact division, not reciprocal multiplication: v/(2^b - 1) must be the
    // correctly rounded quotient so coded values round-trip bit-exactly.
    const double denom = (1 << header_.bit_depth) - 1;
    const auto* raw = reinterpret_cast<const unsigned char*>(buf_.data());
    double* out = plane.data();
    if (bytes_per_sample == 1) {
      for (std::size_t i = 0; i < n; ++i) out[i] = raw[i] / denom;
    } else {
      for (std::size_t i = 0; i < n / 2; ++i) {
        const unsigned v = raw[2 * i] | (unsigned(raw[2 * i + 1]) << 8);  // little-endian
        out[i] = v / denom;
      }
    }
  }

  // Nearest-neighbor chroma upsampling to full frame resolution.
  Fieldd upsample(const Fieldd& sub) const {
    if (sub.rows() == header_.height && sub.cols() == header_.width) return sub;
    Fieldd full(header_.height, header_.width);
    const int ry = header_.subsampling == ChromaSubsampling::c420 ? 2 : 1;
    for (int y = 0; y < header_.height; ++y) {
      const int sy = std::min<int>(y / ry, static_cast<int>(sub.rows()) - 1);
      for (int x = 0; x < header_.width; ++x) {
        const int sx = std::min<int>(x / 2, static_cast<int>(sub.cols()) - 1);
        full(y, x) = sub(sy, sx);
      }
    }
    return full;
  }

  std::unique_ptr<std::istream> stream_;
  VideoHeader header_;
  bool y4m_ = false;
  std::size_t offset_ = 0;
  long frame_index_ = 0;
  std::vector<char> buf_;
};

}  // namespace

VideoHeader parse_y4m_header(const std::string& line) {
  std::istringstream ss(line);
  std::string token;
  if (!(ss >> token) || token != "YUV4MPEG2")
    throw format_error("not a Y4M stream: missing YUV4MPEG2 magic at byte offset 0");

  VideoHeader h;
  bool have_w = false, have_h = false, have_f = false;
  std::size_t search_pos = token.size();
  while (ss >> token) {
    const std::size_t offset = line.find(token, search_pos);
    search_pos = offset + token.size();
    const char key = token[0];
    const std::string val = token.substr(1);
    switch (key) {
      case 'W':
        h.width = std::stoi(val);
        have_w = true;
        break;
      case 'H':
        h.height = std::stoi(val);
        have_h = true;
        break;
      case 'F': {
        const auto colon = val.find(':');
        if (colon == std::string::npos)
          throw format_error("malformed frame rate '" + token + "' at byte offset " +
                             std::to_string(offset));
        h.fps_num = std::stoi(val.substr(0, colon));
        h.fps_den = std::stoi(val.substr(colon + 1));
        have_f = true;
        break;
      }
      case 'C':
        h.subsampling = parse_colorspace(val, h.bit_depth, offset);
        break;
      case 'I':
      case 'A':
      case 'X':
        break;  // interlacing, aspect, extensions: accepted and ignored
      default:
        throw format_error("unknown Y4M parameter '" + token + "' at byte offset " +
                           std::to_string(offset));
    }
  }
  if (!have_w || !have_h)
    throw format_error("Y4M header missing mandatory W/H field (header ends at byte offset " +
                       std::to_string(line.size()) + ")");
  if (!have_f) { h.fps_num = 30; h.fps_den = 1; }
  return h;
}

std::unique_ptr<VideoReader> open_video(std::unique_ptr<std::istream> stream,
                                        const std::optional<RawFormatHint>& hint) {
  return std::make_unique<StreamReader>(std::move(stream), hint);
}

std::unique_ptr<VideoReader> open_video(const std::string& path,
                                        const std::optional<RawFormatHint>& hint) {
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw format_error("cannot open video file: " + path);
  return open_video(std::move(file), hint);
}

std::optional<FrameGroup> next_group(VideoReader& reader, int t_prime, long& next_index) {
  FrameGroup g;
  g.frames.reserve(static_cast<std::size_t>(t_prime));
  for (int i = 0; i < t_prime; ++i) {
    auto f = reader.next_frame();
    if (!f) return std::nullopt;  // trailing partial group discarded
    g.frames.push_back(std::move(*f));
  }
  g.group_index = next_index++;
  return g;
}

namespace {

void write_plane(std::ofstream& out, const Fieldd& plane) {
  const int h = static_cast<int>(plane.rows());
  const int w = static_cast<int>(plane.cols());
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const double v = std::min(1.0, std::max(0.0, plane(r, c)));
      buf[static_cast<std::size_t>(r) * w + c] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

}  // namespace

void write_y4m_420(const std::string& path, const std::vector<Fieldd>& luma_frames,
                   const std::vector<Fieldd>& cb_half, const std::vector<Fieldd>& cr_half,
                   int fps_num, int fps_den) {
  if (luma_frames.empty()) throw std::invalid_argument("write_y4m_420: no frames");
  const int h = static_cast<int>(luma_frames.front().rows());
  const int w = static_cast<int>(luma_frames.front().cols());
  if (h % 2 || w % 2) throw std::invalid_argument("write_y4m_420: dims must be even for 4:2:0");
  const bool with_chroma = !cb_half.empty();
  if (with_chroma && (cb_half.size() != luma_frames.size() || cr_half.size() != luma_frames.size()))
    throw std::invalid_argument("write_y4m_420: chroma frame count must match luma");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot open for writing: " + path);
  out << "YUV4MPEG2 W" << w << " H" << h << " F" << fps_num << ":" << fps_den << " C420\n";
  const Fieldd neutral = Fieldd::Constant(h / 2, w / 2, 128.0 / 255.0);
  for (std::size_t i = 0; i < luma_frames.size(); ++i) {
    out << "FRAME\n";
    write_plane(out, luma_frames[i]);
    const Fieldd& cb = with_chroma ? cb_half[i] : neutral;
    const Fieldd& cr = with_chroma ? cr_half[i] : neutral;
    if (cb.rows() != h / 2 || cb.cols() != w / 2 || cr.rows() != h / 2 || cr.cols() != w / 2)
      throw std::invalid_argument("write_y4m_420: chroma planes must be half resolution");
    write_plane(out, cb);
    write_plane(out, cr);
  }
}

void write_y4m_420(const std::string& path, const std::vector<Fieldd>& luma_frames, int fps_num,
                   int fps_den) {
  write_y4m_420(path, luma_frames, {}, {}, fps_num, fps_den);
}

}  // namespace chipqa
