#pragma once

// On-disk artifacts. Binary payloads are raw little-endian complex128
// (re, im interleaved); each has a JSON sidecar next to it with the same stem.
//
//   <stem>.bin   payload
//   <stem>.json  {"kind", "shape", "time", "config_hash", ...}

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bosonlab/field_state.hpp"
#include "bosonlab/manybody.hpp"
#include "bosonlab/marginals.hpp"

namespace bosonlab::lab {

namespace fs = std::filesystem;

void write_checkpoint(const fs::path& stem, const ManyBodyState& psi, const std::string& config_hash);
/// Throws PreconditionError when the sidecar's hash differs from `expected_hash`.
ManyBodyState read_checkpoint(const fs::path& stem, const std::string& expected_hash);

void write_kernel(const fs::path& stem, const DensityMatrixK& gamma, const std::string& config_hash);
DensityMatrixK read_kernel(const fs::path& stem, const std::string& expected_hash);

/// All snapshots in one payload, sidecar lists the times.
void write_field_trajectory(const fs::path& stem, const std::vector<FieldState>& snapshots,
                            const std::string& config_hash);
std::vector<FieldState> read_field_trajectory(const fs::path& stem, const std::string& expected_hash);

/// Minimal CSV writer; every row is flushed so an aborted run keeps what it
/// already produced. Numbers use shortest round-trip formatting.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  static std::string number(double x);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace bosonlab::lab
