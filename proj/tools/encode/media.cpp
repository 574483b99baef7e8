#include "media.hpp"

extern "C" {
#include <libavcodec/avcodec.h>
#include <libavformat/avformat.h>
#include <libavutil/imgutils.h>
#include <libavutil/opt.h>
#include <libswscale/swscale.h>
}

#include <memory>
#include <stdexcept>

#include "autojournal/image.hpp"

namespace autojournal::media {

namespace fs = std::filesystem;

namespace {

std::string av_error(int err) {
  char buf[AV_ERROR_MAX_STRING_SIZE] = {0};
  av_strerror(err, buf, sizeof buf);
  return buf;
}

void check(int rc, const char* what) {
  if (rc < 0) throw std::runtime_error(std::string(what) + ": " + av_error(rc));
}

struct CodecCtxDeleter {
  void operator()(AVCodecContext* c) const { avcodec_free_context(&c); }
};
struct FrameDeleter {
  void operator()(AVFrame* f) const { av_frame_free(&f); }
};
struct PacketDeleter {
  void operator()(AVPacket* p) const { av_packet_free(&p); }
};
struct SwsDeleter {
  void operator()(SwsContext* s) const { sws_freeContext(s); }
};
struct OutputDeleter {
  void operator()(AVFormatContext* f) const {
    if (f->pb != nullptr && !(f->oformat->flags & AVFMT_NOFILE)) avio_closep(&f->pb);
    avformat_free_context(f);
  }
};
struct InputDeleter {
  void operator()(AVFormatContext* f) const { avformat_close_input(&f); }
};

using CodecCtx = std::unique_ptr<AVCodecContext, CodecCtxDeleter>;
using Frame = std::unique_ptr<AVFrame, FrameDeleter>;
using Packet = std::unique_ptr<AVPacket, PacketDeleter>;
using Sws = std::unique_ptr<SwsContext, SwsDeleter>;

RgbImage load_frame(const fs::path& path) {
  auto img = decode_image(read_file_bytes(path));
  if (!img) throw std::runtime_error("cannot decode frame " + path.string());
  return std::move(*img);
}

void drain(AVCodecContext* ctx, AVFormatContext* fmt, AVStream* stream, AVPacket* pkt) {
  for (;;) {
    const int rc = avcodec_receive_packet(ctx, pkt);
    if (rc == AVERROR(EAGAIN) || rc == AVERROR_EOF) return;
    check(rc, "avcodec_receive_packet");
    if (pkt->duration == 0) pkt->duration = 1;
    av_packet_rescale_ts(pkt, ctx->time_base, stream->time_base);
    pkt->stream_index = stream->index;
    check(av_interleaved_write_frame(fmt, pkt), "av_interleaved_write_frame");
  }
}

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

void encode_frames(const std::vector<fs::path>& frames, const fs::path& out, const EncodeOptions& options) {
  if (frames.empty()) throw std::runtime_error("no frames to encode");
  if (!(options.fps > 0)) throw std::runtime_error("fps must be positive");
  av_log_set_level(AV_LOG_ERROR);

  const RgbImage first = load_frame(frames.front());
  const bool lossless = options.lossless;
  // 4:2:0 needs even dimensions; pad with black on the right/bottom.
  const int width = lossless ? first.width : (first.width + 1) & ~1;
  const int height = lossless ? first.height : (first.height + 1) & ~1;

  AVFormatContext* raw_fmt = nullptr;
  check(avformat_alloc_output_context2(&raw_fmt, nullptr, nullptr, out.c_str()), "output format");
  std::unique_ptr<AVFormatContext, OutputDeleter> fmt(raw_fmt);
  fmt->flags |= AVFMT_FLAG_BITEXACT;

  const AVCodec* codec = avcodec_find_encoder_by_name(lossless ? "libx264rgb" : "libx264");
  if (codec == nullptr) throw std::runtime_error("H.264 encoder not available in libavcodec");

  AVStream* stream = avformat_new_stream(fmt.get(), nullptr);
  if (stream == nullptr) throw std::runtime_error("avformat_new_stream failed");

  CodecCtx ctx(avcodec_alloc_context3(codec));
  const AVRational rate = av_d2q(options.fps, 1 << 16);
  ctx->width = width;
  ctx->height = height;
  ctx->time_base = av_inv_q(rate);
  ctx->framerate = rate;
  ctx->pix_fmt = lossless ? AV_PIX_FMT_RGB24 : AV_PIX_FMT_YUV420P;
  ctx->thread_count = 1;
  ctx->flags |= AV_CODEC_FLAG_BITEXACT;
  if (fmt->oformat->flags & AVFMT_GLOBALHEADER) ctx->flags |= AV_CODEC_FLAG_GLOBAL_HEADER;
  if (lossless) {
    av_opt_set(ctx->priv_data, "qp", "0", 0);
    av_opt_set(ctx->priv_data, "preset", "ultrafast", 0);
  } else {
    av_opt_set(ctx->priv_data, "crf", "18", 0);
    av_opt_set(ctx->priv_data, "preset", "medium", 0);
  }
  check(avcodec_open2(ctx.get(), codec, nullptr), "avcodec_open2");
  check(avcodec_parameters_from_context(stream->codecpar, ctx.get()), "codec parameters");
  stream->time_base = ctx->time_base;
  stream->avg_frame_rate = rate;

  if (!(fmt->oformat->flags & AVFMT_NOFILE)) {
    check(avio_open(&fmt->pb, out.c_str(), AVIO_FLAG_WRITE), "avio_open");
  }
  check(avformat_write_header(fmt.get(), nullptr), "avformat_write_header");

  Frame frame(av_frame_alloc());
  frame->format = ctx->pix_fmt;
  frame->width = width;
  frame->height = height;
  check(av_frame_get_buffer(frame.get(), 0), "av_frame_get_buffer");
  Packet pkt(av_packet_alloc());

  Sws sws;
  if (!lossless) {
    sws.reset(sws_getContext(width, height, AV_PIX_FMT_RGB24, width, height, AV_PIX_FMT_YUV420P,
                             SWS_BICUBIC | SWS_BITEXACT | SWS_ACCURATE_RND, nullptr, nullptr, nullptr));
    if (!sws) throw std::runtime_error("sws_getContext failed");
  }
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(width) * height * 3);

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RgbImage img = i == 0 ? first : load_frame(frames[i]);
    if (img.width != first.width || img.height != first.height) {
      throw std::runtime_error("frame size mismatch: " + frames[i].string());
    }
    std::fill(padded.begin(), padded.end(), 0);
    for (int y = 0; y < img.height; ++y) {
      std::copy_n(&img.pixels[static_cast<std::size_t>(y) * img.width * 3], img.width * 3,
                  &padded[static_cast<std::size_t>(y) * width * 3]);
    }
    check(av_frame_make_writable(frame.get()), "av_frame_make_writable");
    if (lossless) {
      for (int y = 0; y < height; ++y) {
        std::copy_n(&padded[static_cast<std::size_t>(y) * width * 3], width * 3,
                    frame->data[0] + static_cast<std::ptrdiff_t>(y) * frame->linesize[0]);
      }
    } else {
      const std::uint8_t* src[1] = {padded.data()};
      const int stride[1] = {width * 3};
      sws_scale(sws.get(), src, stride, 0, height, frame->data, frame->linesize);
    }
    frame->pts = static_cast<std::int64_t>(i);
    check(avcodec_send_frame(ctx.get(), frame.get()), "avcodec_send_frame");
    drain(ctx.get(), fmt.get(), stream, pkt.get());
  }
  check(avcodec_send_frame(ctx.get(), nullptr), "flush");
  drain(ctx.get(), fmt.get(), stream, pkt.get());
  check(av_write_trailer(fmt.get()), "av_write_trailer");
}

ProbeResult probe(const fs::path& path) {
  av_log_set_level(AV_LOG_ERROR);
  AVFormatContext* raw = nullptr;
  check(avformat_open_input(&raw, path.c_str(), nullptr, nullptr), "avformat_open_input");
  std::unique_ptr<AVFormatContext, InputDeleter> fmt(raw);
  check(avformat_find_stream_info(fmt.get(), nullptr), "avformat_find_stream_info");
  const int index = av_find_best_stream(fmt.get(), AVMEDIA_TYPE_VIDEO, -1, -1, nullptr, 0);
  check(index, "av_find_best_stream");
  AVStream* stream = fmt->streams[index];
  const AVCodec* decoder = avcodec_find_decoder(stream->codecpar->codec_id);
  if (!decoder) throw std::runtime_error("no decoder for " + path.string());

  CodecCtx ctx(avcodec_alloc_context3(decoder));
  check(avcodec_parameters_to_context(ctx.get(), stream->codecpar), "decoder parameters");
  ctx->thread_count = 1;
  check(avcodec_open2(ctx.get(), decoder, nullptr), "avcodec_open2");

  ProbeResult result;
  result.codec = decoder->name;
  result.width = ctx->width;
  result.height = ctx->height;
  if (stream->avg_frame_rate.den != 0) result.fps = av_q2d(stream->avg_frame_rate);
  if (stream->duration != AV_NOPTS_VALUE) {
    result.duration_s = static_cast<double>(stream->duration) * av_q2d(stream->time_base);
  } else if (fmt->duration != AV_NOPTS_VALUE) {
    result.duration_s = static_cast<double>(fmt->duration) / AV_TIME_BASE;
  }

  Packet pkt(av_packet_alloc());
  Frame frame(av_frame_alloc());
  Sws sws;
  std::vector<std::uint8_t> rgb;
  auto receive = [&] {
    for (;;) {
      const int rc = avcodec_receive_frame(ctx.get(), frame.get());
      if (rc == AVERROR(EAGAIN) || rc == AVERROR_EOF) return;
      check(rc, "avcodec_receive_frame");
      sws.reset(sws_getContext(frame->width, frame->height, static_cast<AVPixelFormat>(frame->format),
                               frame->width, frame->height, AV_PIX_FMT_RGB24,
                               SWS_POINT | SWS_BITEXACT | SWS_ACCURATE_RND, nullptr, nullptr, nullptr));
      rgb.assign(static_cast<std::size_t>(frame->width) * frame->height * 3, 0);
      std::uint8_t* dst[1] = {rgb.data()};
      const int dst_stride[1] = {frame->width * 3};
      sws_scale(sws.get(), frame->data, frame->linesize, 0, frame->height, dst, dst_stride);
      result.frame_checksums.push_back(fnv1a64(rgb.data(), rgb.size()));
      ++result.decoded_frames;
      av_frame_unref(frame.get());
    }
  };
  while (av_read_frame(fmt.get(), pkt.get()) >= 0) {
    if (pkt->stream_index == index) {
      check(avcodec_send_packet(ctx.get(), pkt.get()), "avcodec_send_packet");
      receive();
    }
    av_packet_unref(pkt.get());
  }
  check(avcodec_send_packet(ctx.get(), nullptr), "flush");
  receive();
  return result;
}

}  // namespace autojournal::media
