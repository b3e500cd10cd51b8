#include "lean3d/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lean3d/byte_io.hpp"
#include "lean3d/error.hpp"

namespace lean3d {
namespace {

std::int32_t floor_to_lattice(double p, double q) {
  if (!std::isfinite(p)) fail(ErrorKind::kInput, "non-finite coordinate");
  const double f = std::floor(p / q);
  if (f < static_cast<double>(std::numeric_limits<std::int32_t>::min()) ||
      f > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
    fail(ErrorKind::kInput, "quantized coordinate outside the int32 lattice");
  }
  return static_cast<std::int32_t>(f);
}

void check_step(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) fail(ErrorKind::kParameter, "quantization step must be positive and finite");
}

}  // namespace

void canonicalize(std::vector<Voxel>& voxels) {
  std::sort(voxels.begin(), voxels.end());
  voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
}

QuantizedCloud quantize(const PointCloud& cloud, double q) {
  check_step(q);
  QuantizedCloud out;
  out.q = q;
  out.voxels.reserve(cloud.points.size());
  for (const auto& p : cloud.points) {
    out.voxels.push_back({floor_to_lattice(p.x, q), floor_to_lattice(p.y, q), floor_to_lattice(p.z, q)});
  }
  canonicalize(out.voxels);
  return out;
}

PointCloud dequantize(const std::vector<Voxel>& voxels, double q, Reconstruction mode) {
  check_step(q);
  const double shift = mode == Reconstruction::kCenter ? 0.5 : 0.0;
  PointCloud out;
  out.points.reserve(voxels.size());
  for (const auto& v : voxels) {
    out.points.push_back({(v.x + shift) * q, (v.y + shift) * q, (v.z + shift) * q});
  }
  return out;
}

PointFormat format_from_path(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".bin") return PointFormat::kKittiBin;
  if (ext == ".ply") return PointFormat::kPlyAscii;
  fail(ErrorKind::kUsage, "unknown point file extension '" + ext + "' (expected .bin or .ply)");
}

PointCloud parse_kitti_bin(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t kRecord = 16;
  PointCloud cloud;
  const std::size_t whole = bytes.size() / kRecord;
  if (bytes.size() % kRecord != 0) {
    throw FormatError(ErrorKind::kFormat, "truncated KITTI record", whole * kRecord);
  }
  cloud.points.reserve(whole);
  ByteReader in(bytes);
  for (std::size_t i = 0; i < whole; ++i) {
    const float x = std::bit_cast<float>(in.u32());
    const float y = std::bit_cast<float>(in.u32());
    const float z = std::bit_cast<float>(in.u32());
    in.u32();  // intensity
    cloud.points.push_back({x, y, z});
  }
  return cloud;
}

PointCloud parse_ply_ascii(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::kFormat, "ply line " + std::to_string(line_no) + ": " + what);
  };

  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) bad("missing 'ply' magic");
  ++line_no;

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
    bool has_list = false;  // rows of list elements are skipped, never parsed
  };
  std::vector<Element> elements;
  bool ascii = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string kind;
      ls >> kind;
      if (kind != "ascii") bad("only ascii PLY is supported");
      ascii = true;
    } else if (word == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) bad("malformed element line");
      elements.push_back(std::move(e));
    } else if (word == "property") {
      if (elements.empty()) bad("property before any element");
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type;
        elements.back().has_list = true;
      }
      if (!(ls >> name)) bad("malformed property line");
      elements.back().props.push_back(name);
    }
  }
  if (!ascii) bad("missing format line");

  PointCloud cloud;
  bool have_vertex = false;
  for (const auto& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i) {
        if (!std::getline(in, line)) bad("unexpected end of element '" + e.name + "'");
        ++line_no;
      }
      continue;
    }
    have_vertex = true;
    if (e.has_list) bad("list property in vertex element");
    auto index_of = [&](const char* name) {
      auto it = std::find(e.props.begin(), e.props.end(), name);
      if (it == e.props.end()) bad(std::string("vertex element lacks property ") + name);
      return static_cast<std::size_t>(it - e.props.begin());
    };
    const std::size_t ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
    cloud.points.reserve(e.count);
    std::vector<double> vals(e.props.size());
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!std::getline(in, line)) bad("unexpected end of vertex data");
      ++line_no;
      std::istringstream ls(line);
      for (auto& v : vals) {
        if (!(ls >> v)) bad("malformed vertex row");
      }
      cloud.points.push_back({vals[ix], vals[iy], vals[iz]});
    }
  }
  if (!have_vertex) fail(ErrorKind::kFormat, "ply has no vertex element");
  return cloud;
}

PointCloud load_points(const std::string& path, PointFormat format) {
  auto bytes = read_file(path);
  if (format == PointFormat::kKittiBin) return parse_kitti_bin(bytes);
  return parse_ply_ascii(std::string(bytes.begin(), bytes.end()));
}

PointCloud load_points(const std::string& path) { return load_points(path, format_from_path(path)); }

void save_points(const std::string& path, const PointCloud& cloud, PointFormat format) {
  if (format == PointFormat::kKittiBin) {
    ByteWriter w;
    for (const auto& p : cloud.points) {
      w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(p.x)));
      w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(p.y)));
      w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(p.z)));
      w.u32(0);
    }
    write_file(path, w.buffer());
    return;
  }
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : cloud.points) out << p.x << ' ' << p.y << ' ' << p.z << '\n';
  const std::string s = out.str();
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

void save_points(const std::string& path, const PointCloud& cloud) {
  save_points(path, cloud, format_from_path(path));
}

}  // namespace lean3d
