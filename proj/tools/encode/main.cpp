// autojournal-encode: turns an ordered list of frame images into a video.
//
//   autojournal-encode --fps 30 --frames frames.txt --output day.mp4 [--lossless]
//   autojournal-encode --probe day.mp4

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "media.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Frame-list video encoder for autojournal"};
  double fps = 30.0;
  std::string frame_list;
  std::string output;
  std::string probe_path;
  bool lossless = false;
  app.add_option("--fps", fps, "Frames per second")->check(CLI::PositiveNumber);
  app.add_option("--frames", frame_list, "File listing one frame image path per line");
  app.add_option("--output", output, "Output container path");
  app.add_flag("--lossless", lossless, "Lossless RGB encoding");
  app.add_option("--probe", probe_path, "Print JSON stats of an existing video and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!probe_path.empty()) {
      const auto r = autojournal::media::probe(probe_path);
      nlohmann::json j = {{"decoded_frames", r.decoded_frames}, {"duration_s", r.duration_s},
                          {"fps", r.fps},       {"width", r.width},
                          {"height", r.height}, {"codec", r.codec},
                          {"frame_checksums", r.frame_checksums}};
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (frame_list.empty() || output.empty()) {
      std::cerr << "--frames and --output are required\n";
      return 2;
    }
    std::ifstream list(frame_list);
    if (!list) {
      std::cerr << "cannot read frame list " << frame_list << '\n';
      return 2;
    }
    std::vector<std::filesystem::path> frames;
    for (std::string line; std::getline(list, line);) {
      if (!line.empty()) frames.emplace_back(line);
    }
    autojournal::media::encode_frames(frames, output, {fps, lossless});
  } catch (const std::exception& e) {
    std::cerr << "autojournal-encode: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
