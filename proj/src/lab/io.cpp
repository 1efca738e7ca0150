#include "bosonlab/lab/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "json.hpp"

namespace bosonlab::lab {

namespace {

using nlohmann::json;

fs::path with_ext(fs::path stem, const char* ext) { return stem.replace_extension(ext); }

void write_payload(const fs::path& path, const cplx* data, std::size_t n) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write " + path.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(cplx)));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (double part : {data[i].real(), data[i].imag()}) {
        auto bits = std::bit_cast<std::uint64_t>(part);
        bits = __builtin_bswap64(bits);
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
      }
  }
  require(static_cast<bool>(out), "short write to " + path.string());
}

std::vector<cplx> read_payload(const fs::path& path, std::size_t n) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path.string());
  require(fs::file_size(path) == n * sizeof(cplx), "payload size of " + path.string() + " does not match its sidecar");
  std::vector<cplx> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(cplx)));
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& c : v) {
      auto re = __builtin_bswap64(std::bit_cast<std::uint64_t>(c.real()));
      auto im = __builtin_bswap64(std::bit_cast<std::uint64_t>(c.imag()));
      c = {std::bit_cast<double>(re), std::bit_cast<double>(im)};
    }
  }
  return v;
}

void write_sidecar(const fs::path& path, const json& j) {
  std::ofstream out(path);
  require(static_cast<bool>(out), "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json read_sidecar(const fs::path& path, const std::string& kind, const std::string& expected_hash) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw PreconditionError("malformed sidecar " + path.string() + ": " + e.what());
  }
  require(j.value("kind", "") == kind, path.string() + " is not a " + kind + " sidecar");
  require(j.value("format", "") == "complex128-le", path.string() + ": unsupported payload format");
  const std::string hash = j.value("config_hash", "");
  require(hash == expected_hash,
          "config hash mismatch for " + path.string() + ": file has " + hash + ", run has " + expected_hash);
  return j;
}

json base_sidecar(const std::string& kind, const Grid& grid, double time, const std::string& hash) {
  return json{{"kind", kind},
              {"format", "complex128-le"},
              {"d", grid.dim()},
              {"m", grid.points_per_axis()},
              {"time", time},
              {"config_hash", hash}};
}

}  // namespace

void write_checkpoint(const fs::path& stem, const ManyBodyState& psi, const std::string& config_hash) {
  json j = base_sidecar("checkpoint", psi.grid, psi.time, config_hash);
  j["n"] = psi.particles;
  j["shape"] = std::vector<std::size_t>(static_cast<std::size_t>(psi.particles * psi.grid.dim()),
                                        static_cast<std::size_t>(psi.grid.points_per_axis()));
  write_payload(with_ext(stem, ".bin"), psi.values.data(), psi.values.size());
  write_sidecar(with_ext(stem, ".json"), j);
}

ManyBodyState read_checkpoint(const fs::path& stem, const std::string& expected_hash) {
  const json j = read_sidecar(with_ext(stem, ".json"), "checkpoint", expected_hash);
  ManyBodyState psi;
  psi.grid = make_grid(j.at("d").get<int>(), j.at("m").get<int>());
  psi.particles = j.at("n").get<int>();
  psi.time = j.at("time").get<double>();
  std::size_t n = 1;
  for (int i = 0; i < psi.particles; ++i) n *= psi.grid.size();
  psi.values = read_payload(with_ext(stem, ".bin"), n);
  return psi;
}

void write_kernel(const fs::path& stem, const DensityMatrixK& gamma, const std::string& config_hash) {
  json j = base_sidecar("kernel", gamma.grid, gamma.time, config_hash);
  j["k"] = gamma.k;
  j["shape"] = {gamma.kernel.rows(), gamma.kernel.cols()};
  j["layout"] = "column-major, entry (x, x') at x + rows * x'";
  write_payload(with_ext(stem, ".bin"), gamma.kernel.data(), static_cast<std::size_t>(gamma.kernel.size()));
  write_sidecar(with_ext(stem, ".json"), j);
}

DensityMatrixK read_kernel(const fs::path& stem, const std::string& expected_hash) {
  const json j = read_sidecar(with_ext(stem, ".json"), "kernel", expected_hash);
  DensityMatrixK g;
  g.grid = make_grid(j.at("d").get<int>(), j.at("m").get<int>());
  g.k = j.at("k").get<int>();
  g.time = j.at("time").get<double>();
  const auto shape = j.at("shape").get<std::vector<Eigen::Index>>();
  require(shape.size() == 2 && shape[0] == shape[1], "kernel sidecar shape must be square");
  const auto v = read_payload(with_ext(stem, ".bin"), static_cast<std::size_t>(shape[0] * shape[1]));
  g.kernel = Eigen::Map<const KernelMatrix>(v.data(), shape[0], shape[1]);
  return g;
}

void write_field_trajectory(const fs::path& stem, const std::vector<FieldState>& snapshots,
                            const std::string& config_hash) {
  require(!snapshots.empty(), "trajectory export needs at least one snapshot");
  const Grid& grid = snapshots.front().grid();
  json j = base_sidecar("gp_trajectory", grid, snapshots.back().time, config_hash);
  std::vector<double> times;
  std::vector<cplx> all;
  all.reserve(snapshots.size() * grid.size());
  for (const auto& s : snapshots) {
    require(s.grid() == grid, "trajectory snapshots must share one grid");
    times.push_back(s.time);
    all.insert(all.end(), s.phi.values.begin(), s.phi.values.end());
  }
  j["times"] = times;
  j["shape"] = {snapshots.size(), grid.size()};
  write_payload(with_ext(stem, ".bin"), all.data(), all.size());
  write_sidecar(with_ext(stem, ".json"), j);
}

std::vector<FieldState> read_field_trajectory(const fs::path& stem, const std::string& expected_hash) {
  const json j = read_sidecar(with_ext(stem, ".json"), "gp_trajectory", expected_hash);
  const Grid grid = make_grid(j.at("d").get<int>(), j.at("m").get<int>());
  const auto times = j.at("times").get<std::vector<double>>();
  const auto v = read_payload(with_ext(stem, ".bin"), times.size() * grid.size());
  std::vector<FieldState> out;
  for (std::size_t s = 0; s < times.size(); ++s) {
    FieldState f;
    f.phi = GridFunction(grid, std::vector<cplx>(v.begin() + static_cast<std::ptrdiff_t>(s * grid.size()),
                                                 v.begin() + static_cast<std::ptrdiff_t>((s + 1) * grid.size())));
    f.time = times[s];
    out.push_back(std::move(f));
  }
  return out;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) : columns_(header.size()) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path);
  require(static_cast<bool>(out_), "cannot write " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == columns_, "CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  out_.flush();
}

std::string CsvWriter::number(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, r.ptr};
}

}  // namespace bosonlab::lab
