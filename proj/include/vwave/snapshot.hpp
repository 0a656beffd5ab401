#ifndef VWAVE_SNAPSHOT_HPP
#define VWAVE_SNAPSHOT_HPP

#include <string>
#include <vector>

#include "vwave/field.hpp"

namespace vwave {

// Snapshot binary (.vcgr): 16-byte header (magic "VCGR", u32 nx, u32 ny,
// u32 field-count) followed by row-major 64-bit little-endian floats per
// field. Field names live in the run metadata, not in the binary.
void write_vcgr(const std::string& path, const std::vector<const Field2D*>& fields);
std::vector<Field2D> read_vcgr(const std::string& path);
Field2D read_vcgr_single(const std::string& path);

// One cell-centered snapshot: velocities, stresses, strains and the memory
// branch tensors, all collocated at cell centers.
struct Snapshot {
  double t = 0.0;
  std::vector<std::string> names;
  std::vector<Field2D> fields;

  const Field2D& field(const std::string& name) const;
  bool has(const std::string& name) const;
  int n_branches() const;  // counts h{k}_xx fields
};

// A simulation run on disk: run_meta.txt + manifest.csv + snap_*.vcgr.
class SnapshotSet {
public:
  static SnapshotSet open(const std::string& dir);

  const Grid& grid() const { return grid_; }
  const std::vector<std::string>& field_names() const { return names_; }
  const std::vector<double>& times() const { return times_; }
  size_t size() const { return times_.size(); }
  double dt() const { return dt_; }
  Snapshot load(size_t i) const;
  size_t nearest(double t) const;
  const std::string& dir() const { return dir_; }

  // Writer side (used by wavesim::run).
  SnapshotSet() = default;
  SnapshotSet(std::string dir, Grid grid, std::vector<std::string> names,
              double dt);
  void append(double t, const std::vector<const Field2D*>& fields);
  void finalize() const;  // writes manifest + meta

private:
  std::string dir_;
  Grid grid_;
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::string> files_;
  double dt_ = 0.0;
};

} // namespace vwave

#endif
