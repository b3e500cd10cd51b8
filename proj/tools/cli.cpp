#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "lean3d/byte_io.hpp"
#include "lean3d/codec.hpp"
#include "lean3d/entropy.hpp"
#include "lean3d/error.hpp"
#include "lean3d/geometry.hpp"
#include "lean3d/hierarchy.hpp"
#include "lean3d/predictor.hpp"
#include "lean3d/streamsim.hpp"
#include "lean3d/synth.hpp"

namespace lean3d::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

/// Raised for a failed lossless check so run() can map it to its own exit code.
struct LosslessFailure {
  std::string message;
};

std::vector<std::string> point_files(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kIo, "not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (ext == ".bin" || ext == ".ply") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(ErrorKind::kIo, "no .bin or .ply files in " + dir);
  return out;
}

LogitTableModel load_model_or_empty(const std::string& path) {
  return path.empty() ? LogitTableModel{} : LogitTableModel::load(path);
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

struct CodingFlags {
  std::uint32_t pos_q = 1;
  double threshold = 0.6;
  std::optional<std::size_t> split;
  std::optional<std::size_t> depth;

  void add_to(CLI::App* app, bool with_posq = true) {
    if (with_posq) app->add_option("--posq", pos_q, "Quantization step (posQ)")->required()->check(CLI::PositiveNumber);
    app->add_option("--threshold", threshold, "Unary-fraction threshold for split selection")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--split", split, "Fixed split depth D_s (overrides the threshold rule)");
    app->add_option("--depth", depth, "Fixed hierarchy depth L");
  }

  CodecConfig config(const LogitTableModel* model) const {
    CodecConfig cfg;
    cfg.pos_q = pos_q;
    cfg.split_threshold = threshold;
    cfg.split_override = split;
    cfg.depth_override = depth;
    cfg.model = model;
    return cfg;
  }
};

int cmd_fit(const std::string& in_dir, const std::string& out_path, const CodingFlags& flags, std::ostream& out) {
  std::vector<OccupancyPyramid> pyramids;
  std::vector<std::size_t> splits;
  for (const auto& f : point_files(in_dir)) {
    const auto q = quantize(load_points(f), flags.pos_q);
    if (q.voxels.empty()) continue;
    const std::size_t depth = flags.depth.value_or(default_depth(q.voxels));
    pyramids.push_back(build_pyramid(q.voxels, depth));
    splits.push_back(effective_split(flags.split.value_or(select_split_depth(pyramids.back(), flags.threshold)), depth));
  }
  if (pyramids.empty()) fail(ErrorKind::kInput, "no non-empty frames to fit");
  const auto model = fit_table(pyramids, splits);
  model.save(out_path);
  out << "fitted " << pyramids.size() << " frames: " << model.s0_entries() << " s0 contexts, " << model.s1_entries()
      << " s1 contexts -> " << out_path << '\n';
  return kOk;
}

int cmd_encode(const std::string& in, const std::string& model_path, const std::string& out_path,
               const CodingFlags& flags, std::ostream& out) {
  const auto model = load_model_or_empty(model_path);
  const auto cloud = load_points(in);
  const auto q = quantize(cloud, flags.pos_q);
  const auto packet = encode_packet(q, flags.config(&model));
  const auto bytes = serialize_frame(packet);
  write_file(out_path, bytes);
  const auto sizes = frame_sizes(packet);
  out << in << ": " << cloud.points.size() << " points, " << packet.point_count << " voxels, " << bytes.size()
      << " bytes (shallow " << sizes.shallow << ", deep " << sizes.deep << "), L=" << packet.metadata.depths
      << " D_s=" << packet.metadata.shallow_d << '\n';
  return kOk;
}

int cmd_decode(const std::string& in, const std::string& model_path, const std::string& out_path, bool center,
               std::ostream& out) {
  const auto model = load_model_or_empty(model_path);
  const auto bytes = read_file(in);
  const auto q = decode_frame(bytes, model);
  save_points(out_path, dequantize(q.voxels, q.q, center ? Reconstruction::kCenter : Reconstruction::kCorner));
  out << in << ": " << q.voxels.size() << " voxels -> " << out_path << '\n';
  return kOk;
}

int cmd_roundtrip(const std::string& in_dir, const std::string& model_path, const CodingFlags& flags,
                  std::ostream& out) {
  const auto model = load_model_or_empty(model_path);
  const auto cfg = flags.config(&model);
  std::size_t failures = 0;
  std::size_t total_bytes = 0, total_shallow = 0, total_deep = 0;
  out << "file,voxels,bytes,base_bytes,shallow_bytes,deep_bytes,bpp,depth,split,lossless\n";
  const auto files = point_files(in_dir);
  for (const auto& f : files) {
    const auto q = quantize(load_points(f), flags.pos_q);
    if (q.voxels.empty()) {
      out << fs::path(f).filename().string() << ",0,0,0,0,0,0,0,0,skip\n";
      continue;
    }
    const auto packet = encode_packet(q, cfg);
    const auto bytes = serialize_frame(packet);
    const auto decoded = decode_frame(bytes, model);
    const bool ok = decoded.voxels == q.voxels;
    failures += ok ? 0 : 1;
    const auto s = frame_sizes(packet);
    total_bytes += s.total;
    total_shallow += s.shallow;
    total_deep += s.deep;
    out << fs::path(f).filename().string() << ',' << q.voxels.size() << ',' << s.total << ',' << s.base << ','
        << s.shallow << ',' << s.deep << ',' << std::fixed << std::setprecision(4)
        << 8.0 * static_cast<double>(s.total) / static_cast<double>(q.voxels.size()) << std::defaultfloat << ','
        << packet.metadata.depths << ',' << packet.metadata.shallow_d << ',' << (ok ? "yes" : "NO") << '\n';
  }
  out << "# frames=" << files.size() << " total_bytes=" << total_bytes << " shallow_bytes=" << total_shallow
      << " deep_bytes=" << total_deep << " failures=" << failures << '\n';
  if (failures > 0) throw LosslessFailure{std::to_string(failures) + " frame(s) did not round-trip"};
  return kOk;
}

int cmd_stats(const std::string& in, std::ostream& out) {
  const auto bytes = read_file(in);
  std::size_t offset = 0;
  std::size_t frame = 0;
  while (offset < bytes.size()) {
    std::size_t used = 0;
    const auto p = parse_frame_prefix(std::span(bytes).subspan(offset), used);
    const auto lens = p.stream_lengths();
    const auto s = frame_sizes(p);
    out << "frame " << frame << " @" << offset << ": " << used << " bytes\n";
    out << "  n_streams=" << p.stream_count() << " posQ=" << p.pos_q << " N=" << p.point_count
        << " depths=" << p.metadata.depths << " shallow_D=" << p.metadata.shallow_d
        << " fp_inv_step=" << p.metadata.fp_inv_step << " fp_B=" << p.metadata.fp_b
        << " fp_KMAX=" << p.metadata.fp_kmax << " model_id=" << std::hex << p.metadata.model_id << std::dec << '\n';
    out << "  expected_streams=" << expected_stream_count(p.metadata.depths, p.metadata.shallow_d)
        << " shallow_levels=" << p.shallow.size() << " deep_levels=" << p.deep.size() << '\n';
    out << "  header=" << s.header << " metadata=" << s.metadata << " base=" << s.base << " (n0=" << p.base.coords.size()
        << ") shallow=" << s.shallow << " deep=" << s.deep << '\n';
    std::size_t idx = 2;
    for (std::size_t i = 0; i < p.shallow.size(); ++i, idx += 2) {
      out << "  shallow level " << i + 1 << ": s0=" << lens[idx] << " s1=" << lens[idx + 1] << '\n';
    }
    for (std::size_t i = 0; i < p.deep.size(); ++i, ++idx) {
      const auto& d = p.deep[i];
      out << "  deep level " << p.metadata.shallow_d + i << ": " << lens[idx] << " bytes Nu=" << d.node_count
          << " Msplit=" << d.nonunary_count << " Llow=" << d.low_bits << " ef_high=" << d.ef_high.size()
          << " ef_low=" << d.ef_low.size() << " unary=" << d.unary_k.size() << " nonunary=" << d.nonunary_occ.size()
          << '\n';
    }
    if (p.point_count > 0) {
      out << "  bits_per_point=" << std::fixed << std::setprecision(4)
          << 8.0 * static_cast<double>(used) / static_cast<double>(p.point_count) << std::defaultfloat << '\n';
    }
    offset += used;
    ++frame;
  }
  return kOk;
}

int cmd_split_depth(const std::string& in, const CodingFlags& flags, std::ostream& out) {
  const auto q = quantize(load_points(in), flags.pos_q);
  if (q.voxels.empty()) fail(ErrorKind::kInput, "point file is empty");
  const std::size_t depth = flags.depth.value_or(default_depth(q.voxels));
  const auto pyr = build_pyramid(q.voxels, depth);
  const auto fractions = unary_fractions(pyr);
  const auto selected = select_split_depth(pyr, flags.threshold);
  out << "level,nodes,unary_fraction,branching_fraction\n";
  for (std::size_t d = 0; d < pyr.depth(); ++d) {
    out << d << ',' << pyr.levels[d].size() << ',' << std::fixed << std::setprecision(4) << fractions[d] << ','
        << 1.0 - fractions[d] << std::defaultfloat << '\n';
  }
  out << "# L=" << depth << " threshold=" << flags.threshold << " D_s=" << selected
      << " coded_D_s=" << effective_split(selected, depth) << '\n';
  return kOk;
}

std::vector<TraceRecord> capture_trace(const std::string& dir, const std::string& model_path,
                                       const CodingFlags& flags) {
  const auto model = load_model_or_empty(model_path);
  const auto cfg = flags.config(&model);
  std::vector<TraceRecord> trace;
  for (const auto& f : point_files(dir)) {
    const auto cloud = load_points(f);
    const auto t0 = Clock::now();
    const auto bytes = encode_frame(cloud, cfg);
    const auto t1 = Clock::now();
    const auto decoded = decode_frame(bytes, model);
    const auto t2 = Clock::now();
    trace.push_back({std::chrono::duration<double, std::milli>(t1 - t0).count(), bytes.size(),
                     std::chrono::duration<double, std::milli>(t2 - t1).count()});
  }
  return trace;
}

int cmd_simulate(const std::string& trace_path, const std::string& frames_dir, const std::string& model_path,
                 const CodingFlags& flags, double bandwidth_mbps, const std::vector<double>& grid,
                 double arrival_ms, const std::string& out_path, const std::string& trace_out, std::ostream& out) {
  std::vector<TraceRecord> trace;
  if (!trace_path.empty()) {
    trace = read_trace_csv_file(trace_path);
  } else if (!frames_dir.empty()) {
    trace = capture_trace(frames_dir, model_path, flags);
  } else {
    fail(ErrorKind::kUsage, "simulate needs --trace or --frames");
  }
  if (!trace_out.empty()) {
    std::ofstream t(trace_out);
    if (!t) fail(ErrorKind::kIo, "cannot create " + trace_out);
    write_trace_csv(t, trace);
  }
  std::vector<double> bandwidths = grid;
  if (bandwidths.empty()) {
    if (!(bandwidth_mbps > 0)) fail(ErrorKind::kUsage, "simulate needs --bandwidth-mbps or --grid");
    bandwidths.push_back(bandwidth_mbps);
  }
  std::vector<SimResult> results;
  for (double b : bandwidths) results.push_back(simulate(trace, b * 1e6, arrival_ms));

  std::ofstream f(out_path);
  if (!f) fail(ErrorKind::kIo, "cannot create " + out_path);
  write_results_csv(f, results);

  out << "bandwidth_mbps,mean_ms,median_ms,p95_ms,throughput_fps,backlog_slope_ms_per_frame,backlog\n";
  for (const auto& r : results) {
    const auto s = summarize(r);
    out << s.bandwidth_bytes_per_s / 1e6 << ',' << s.mean_ms << ',' << s.median_ms << ',' << s.p95_ms << ','
        << s.throughput_fps << ',' << s.backlog_slope_ms << ',' << (s.backlog ? "yes" : "no") << '\n';
  }
  return kOk;
}

int cmd_vectors(const std::string& dir, std::ostream& out) {
  fs::create_directories(dir);
  const auto path = (fs::path(dir) / "entropy_vectors.json").string();
  // one record per line keeps diffs of the golden copy readable
  const auto doc = make_entropy_vectors();
  std::string text = "{\"format\":" + doc["format"].dump() + ",\"version\":" + doc["version"].dump();
  for (const char* section : {"cdf", "rans"}) {
    text += ",\n\"" + std::string(section) + "\":[";
    const auto& records = doc[section];
    for (std::size_t i = 0; i < records.size(); ++i) text += (i ? ",\n " : "\n ") + records[i].dump();
    text += "\n]";
  }
  text += "}\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  out << "wrote " << path << '\n';
  return kOk;
}

int cmd_bench(const std::string& in_dir, const std::string& model_path, const CodingFlags& flags, int repeat,
              std::ostream& out) {
  const auto model = load_model_or_empty(model_path);
  const auto cfg = flags.config(&model);
  StageTimings enc, dec;
  std::size_t frames = 0, bytes_total = 0;
  for (const auto& f : point_files(in_dir)) {
    const auto cloud = load_points(f);
    for (int r = 0; r < repeat; ++r) {
      const auto bytes = encode_frame(cloud, cfg, &enc);
      DecodeOptions opts;
      opts.timings = &dec;
      decode_frame(bytes, model, opts);
      bytes_total += bytes.size();
      ++frames;
    }
  }
  const double n = static_cast<double>(frames);
  auto row = [&](const char* name, double e, double d) {
    out << std::left << std::setw(28) << name << std::right << std::fixed << std::setprecision(3) << std::setw(12)
        << e / n << std::setw(12) << d / n << '\n';
  };
  out << "per-frame mean over " << frames << " runs (ms); mean packet " << bytes_total / frames << " bytes\n";
  out << std::left << std::setw(28) << "stage" << std::right << std::setw(12) << "encode" << std::setw(12) << "decode"
      << '\n';
  row("quantize", enc.quantize_ms, dec.quantize_ms);
  row("pyramid build (BPA)", enc.pyramid_ms, dec.pyramid_ms);
  row("coordinate gen (BCE)", enc.expand_ms, dec.expand_ms);
  row("shallow prediction", enc.shallow_predict_ms, dec.shallow_predict_ms);
  row("shallow entropy (rANS)", enc.shallow_entropy_ms, dec.shallow_entropy_ms);
  row("deep compression", enc.deep_ms, dec.deep_ms);
  row("packet serialize/parse", enc.packet_ms, dec.packet_ms);
  row("total", enc.total_ms(), dec.total_ms());
  out << std::defaultfloat;
  return kOk;
}

int cmd_synth(const std::string& dir, std::size_t frames, std::uint64_t seed, std::size_t points, double extent,
              const std::string& format, std::ostream& out) {
  fs::create_directories(dir);
  const auto fmt = format == "ply" ? PointFormat::kPlyAscii : PointFormat::kKittiBin;
  synth::Rng rng(seed);
  for (std::size_t i = 0; i < frames; ++i) {
    const auto cloud = synth::structured_scene(rng, {extent, points});
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << i << (fmt == PointFormat::kPlyAscii ? ".ply" : ".bin");
    save_points((fs::path(dir) / name.str()).string(), cloud, fmt);
  }
  out << "wrote " << frames << " frames to " << dir << '\n';
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kParameter:
      return kUsageError;
    case ErrorKind::kIo:
    case ErrorKind::kFormat:
    case ErrorKind::kTruncation:
    case ErrorKind::kInput:
      return kIoError;
    case ErrorKind::kCorruptStream:
    case ErrorKind::kIntegrity:
    case ErrorKind::kInvariant:
      return kIntegrityError;
  }
  return kUsageError;
}

void error_line(std::ostream& err, int code, std::string_view kind, std::string_view message) {
  err << "lean3d-error code=" << code << " kind=" << kind << " message=" << std::quoted(std::string(message)) << '\n';
}

}  // namespace

nlohmann::json make_entropy_vectors(std::uint64_t seed) {
  synth::Rng rng(seed);
  std::vector<QuantizedLogits> corpus;
  corpus.push_back(QuantizedLogits{});
  for (int hot = 0; hot < kAlphabetSize; ++hot) {
    QuantizedLogits z{};
    z[hot] = 128;
    corpus.push_back(z);
  }
  {
    QuantizedLogits z{};
    z[3] = z[9] = 7;
    corpus.push_back(z);
    QuantizedLogits lo, hi;
    lo.fill(static_cast<std::int16_t>(kLogitMin));
    hi.fill(static_cast<std::int16_t>(kLogitMax));
    corpus.push_back(lo);
    corpus.push_back(hi);
    QuantizedLogits ramp{}, down{};
    for (int r = 0; r < kAlphabetSize; ++r) {
      ramp[r] = static_cast<std::int16_t>(r * 100);
      down[r] = static_cast<std::int16_t>(-r * 100);
    }
    corpus.push_back(ramp);
    corpus.push_back(down);
  }
  while (corpus.size() < 160) {
    QuantizedLogits z{};
    const bool narrow = corpus.size() % 2 == 0;  // narrow ranges produce ties
    for (auto& v : z) {
      v = narrow ? static_cast<std::int16_t>(static_cast<std::int64_t>(rng.below(7)) - 3)
                 : static_cast<std::int16_t>(static_cast<std::int64_t>(rng.below(1u << 16)) + kLogitMin);
    }
    corpus.push_back(z);
  }

  nlohmann::json doc;
  doc["format"] = "lean3d-entropy-vectors";
  doc["version"] = 1;
  doc["cdf"] = nlohmann::json::array();
  for (const auto& z : corpus) {
    const auto cdf = logits_to_cdf(z);
    doc["cdf"].push_back({{"logits", z}, {"cdf", cdf.cdf}});
  }

  doc["rans"] = nlohmann::json::array();
  for (int c = 0; c < 24; ++c) {
    const std::size_t n = c == 0 ? 0 : (c < 4 ? static_cast<std::size_t>(c) : 1 + rng.below(400));
    std::vector<QuantizedLogits> logits(n);
    std::vector<IntegerCdf> cdfs(n);
    std::vector<std::uint8_t> symbols(n);
    for (std::size_t i = 0; i < n; ++i) {
      logits[i] = corpus[rng.below(corpus.size())];
      cdfs[i] = logits_to_cdf(logits[i]);
      // draw from the template distribution for even cases, uniformly otherwise
      if (c % 2 == 0) {
        const auto u = static_cast<std::uint32_t>(rng.below(kProbScale));
        unsigned s = 0;
        while (cdfs[i].cdf[s + 1] <= u) ++s;
        symbols[i] = static_cast<std::uint8_t>(s);
      } else {
        symbols[i] = static_cast<std::uint8_t>(rng.below(kAlphabetSize));
      }
    }
    doc["rans"].push_back({{"logits", logits}, {"symbols", symbols}, {"bytes", hex(rans_encode(symbols, cdfs))}});
  }
  return doc;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lean3d: dual shallow/deep point-cloud geometry codec"};
  app.require_subcommand(1);

  std::string in, out_path, model_path, trace_path, frames_dir, trace_out, format = "bin";
  CodingFlags flags;
  bool center = false;
  double bandwidth_mbps = 0.0, arrival_ms = 0.0, extent = 4096.0;
  std::vector<double> grid;
  int repeat = 1;
  std::size_t frames = 8, points = 30000;
  std::uint64_t seed = 1;

  auto* fit = app.add_subcommand("fit", "Fit a context-table model over a directory of point files");
  fit->add_option("--in", in, "Directory of .bin/.ply frames")->required();
  fit->add_option("--out", out_path, "Output model file (.l3m)")->required();
  flags.add_to(fit);

  auto* encode = app.add_subcommand("encode", "Encode one point file into a frame packet");
  encode->add_option("--in", in, "Input point file (.bin or .ply)")->required();
  encode->add_option("--model", model_path, "Model file; omitted means the uniform model");
  encode->add_option("--out", out_path, "Output frame (.l3d)")->required();
  flags.add_to(encode);

  auto* decode = app.add_subcommand("decode", "Decode a frame packet to a point file");
  decode->add_option("--in", in, "Input frame (.l3d)")->required();
  decode->add_option("--model", model_path, "Model file used at encode time");
  decode->add_option("--out", out_path, "Output point file; format by extension")->required();
  decode->add_flag("--center", center, "Reconstruct voxel centers instead of lower corners");

  auto* roundtrip = app.add_subcommand("roundtrip", "Encode+decode every frame in a directory and verify");
  roundtrip->add_option("--in", in, "Directory of .bin/.ply frames")->required();
  roundtrip->add_option("--model", model_path, "Model file");
  flags.add_to(roundtrip);

  auto* stats = app.add_subcommand("stats", "Dump header fields and stream sizes of a frame file");
  stats->add_option("--in", in, "Frame file (.l3d), possibly several concatenated")->required();

  auto* split = app.add_subcommand("split-depth", "Per-level unary fractions and the selected split depth");
  split->add_option("--in", in, "Point file")->required();
  flags.add_to(split);

  auto* sim = app.add_subcommand("simulate", "Trace-driven FCFS encoder->link->decoder simulation");
  sim->add_option("--trace", trace_path, "Trace CSV (t_enc_ms,bytes,t_dec_ms)");
  sim->add_option("--frames", frames_dir, "Capture a trace by coding this frame directory");
  sim->add_option("--model", model_path, "Model for --frames capture");
  sim->add_option("--posq", flags.pos_q, "posQ for --frames capture")->check(CLI::PositiveNumber);
  sim->add_option("--bandwidth-mbps", bandwidth_mbps, "Link bandwidth in MB/s (10^6 bytes/s)");
  sim->add_option("--grid", grid, "Comma-separated bandwidth grid in MB/s")->delimiter(',');
  sim->add_option("--arrival-period-ms", arrival_ms, "Frame arrival period; 0 means fully backlogged");
  sim->add_option("--trace-out", trace_out, "Write the (captured) trace CSV here");
  sim->add_option("--out", out_path, "Results CSV")->required();

  auto* vectors = app.add_subcommand("vectors", "Write entropy conformance vectors");
  vectors->add_option("--out", out_path, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Per-stage timing attribution over a frame directory");
  bench->add_option("--in", in, "Directory of .bin/.ply frames")->required();
  bench->add_option("--model", model_path, "Model file");
  bench->add_option("--repeat", repeat, "Runs per frame")->check(CLI::PositiveNumber);
  flags.add_to(bench, false);
  bench->add_option("--posq", flags.pos_q, "Quantization step (posQ), default 1")->check(CLI::PositiveNumber);

  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic structured scenes");
  synth_cmd->add_option("--out", out_path, "Output directory")->required();
  synth_cmd->add_option("--frames", frames, "Number of frames");
  synth_cmd->add_option("--seed", seed, "Generator seed");
  synth_cmd->add_option("--points", points, "Points per frame");
  synth_cmd->add_option("--extent", extent, "Scene half-width");
  synth_cmd->add_option("--format", format, "bin or ply")->check(CLI::IsMember({"bin", "ply"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    error_line(err, kUsageError, "usage", e.what());
    return kUsageError;
  }

  try {
    if (fit->parsed()) return cmd_fit(in, out_path, flags, out);
    if (encode->parsed()) return cmd_encode(in, model_path, out_path, flags, out);
    if (decode->parsed()) return cmd_decode(in, model_path, out_path, center, out);
    if (roundtrip->parsed()) return cmd_roundtrip(in, model_path, flags, out);
    if (stats->parsed()) return cmd_stats(in, out);
    if (split->parsed()) return cmd_split_depth(in, flags, out);
    if (sim->parsed()) {
      return cmd_simulate(trace_path, frames_dir, model_path, flags, bandwidth_mbps, grid, arrival_ms, out_path,
                          trace_out, out);
    }
    if (vectors->parsed()) return cmd_vectors(out_path, out);
    if (bench->parsed()) return cmd_bench(in, model_path, flags, repeat, out);
    if (synth_cmd->parsed()) return cmd_synth(out_path, frames, seed, points, extent, format, out);
  } catch (const LosslessFailure& e) {
    error_line(err, kLosslessFailure, "lossless", e.message);
    return kLosslessFailure;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    error_line(err, code, to_string(e.kind()), e.what());
    return code;
  } catch (const fs::filesystem_error& e) {
    error_line(err, kIoError, "io", e.what());
    return kIoError;
  }
  return kUsageError;
}

}  // namespace lean3d::cli
