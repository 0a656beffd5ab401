#include "vwave/snapshot.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vwave {

namespace fs = std::filesystem;

namespace {
constexpr char kMagic[4] = {'V', 'C', 'G', 'R'};
} // namespace

void write_vcgr(const std::string& path,
                const std::vector<const Field2D*>& fields) {
  if (fields.empty()) throw IoError("write_vcgr: no fields");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  uint32_t nx = static_cast<uint32_t>(fields[0]->nx);
  uint32_t ny = static_cast<uint32_t>(fields[0]->ny);
  uint32_t nf = static_cast<uint32_t>(fields.size());
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&nx), 4);
  os.write(reinterpret_cast<const char*>(&ny), 4);
  os.write(reinterpret_cast<const char*>(&nf), 4);
  for (const Field2D* f : fields) {
    if (f->nx != fields[0]->nx || f->ny != fields[0]->ny)
      throw IoError("write_vcgr: field size mismatch");
    os.write(reinterpret_cast<const char*>(f->a.data()),
             static_cast<std::streamsize>(f->a.size() * sizeof(double)));
  }
  if (!os) throw IoError("write failed: " + path);
}

std::vector<Field2D> read_vcgr(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[4];
  uint32_t nx = 0, ny = 0, nf = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&nx), 4);
  is.read(reinterpret_cast<char*>(&ny), 4);
  is.read(reinterpret_cast<char*>(&nf), 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("not a VCGR file: " + path);
  std::vector<Field2D> out;
  out.reserve(nf);
  for (uint32_t k = 0; k < nf; ++k) {
    Field2D f(static_cast<int>(nx), static_cast<int>(ny));
    is.read(reinterpret_cast<char*>(f.a.data()),
            static_cast<std::streamsize>(f.a.size() * sizeof(double)));
    if (!is) throw IoError("truncated VCGR file: " + path);
    out.push_back(std::move(f));
  }
  return out;
}

Field2D read_vcgr_single(const std::string& path) {
  std::vector<Field2D> fs = read_vcgr(path);
  if (fs.size() != 1) throw IoError("expected a single-field VCGR file: " + path);
  return std::move(fs[0]);
}

const Field2D& Snapshot::field(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return fields[i];
  throw IoError("snapshot has no field '" + name + "'");
}

bool Snapshot::has(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

int Snapshot::n_branches() const {
  int n = 0;
  while (has("h" + std::to_string(n) + "_xx")) ++n;
  return n;
}

SnapshotSet::SnapshotSet(std::string dir, Grid grid,
                         std::vector<std::string> names, double dt)
    : dir_(std::move(dir)), grid_(grid), names_(std::move(names)), dt_(dt) {
  fs::create_directories(dir_);
}

void SnapshotSet::append(double t, const std::vector<const Field2D*>& fields) {
  std::ostringstream name;
  name << "snap_" << std::setw(5) << std::setfill('0') << times_.size()
       << ".vcgr";
  write_vcgr(dir_ + "/" + name.str(), fields);
  times_.push_back(t);
  files_.push_back(name.str());
}

void SnapshotSet::finalize() const {
  {
    std::ofstream os(dir_ + "/manifest.csv", std::ios::trunc);
    if (!os) throw IoError("cannot write manifest in " + dir_);
    os << "index,time,file\n";
    os.precision(17);
    for (size_t i = 0; i < times_.size(); ++i)
      os << i << ',' << times_[i] << ',' << files_[i] << '\n';
  }
  {
    std::ofstream os(dir_ + "/run_meta.txt", std::ios::trunc);
    if (!os) throw IoError("cannot write run_meta in " + dir_);
    os.precision(17);
    os << "nx = " << grid_.nx << "\nny = " << grid_.ny << "\ndx = " << grid_.dx
       << "\ndy = " << grid_.dy << "\nx0 = " << grid_.x0
       << "\ny0 = " << grid_.y0 << "\ndt = " << dt_ << "\nfields = ";
    for (size_t i = 0; i < names_.size(); ++i)
      os << (i ? "," : "") << names_[i];
    os << "\n";
  }
}

SnapshotSet SnapshotSet::open(const std::string& dir) {
  SnapshotSet set;
  set.dir_ = dir;
  {
    std::ifstream is(dir + "/run_meta.txt");
    if (!is) throw IoError("no run_meta.txt in " + dir);
    std::string line;
    while (std::getline(is, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq);
      std::string val = line.substr(eq + 1);
      auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      key = trim(key);
      val = trim(val);
      if (key == "nx") set.grid_.nx = std::stoi(val);
      else if (key == "ny") set.grid_.ny = std::stoi(val);
      else if (key == "dx") set.grid_.dx = std::stod(val);
      else if (key == "dy") set.grid_.dy = std::stod(val);
      else if (key == "x0") set.grid_.x0 = std::stod(val);
      else if (key == "y0") set.grid_.y0 = std::stod(val);
      else if (key == "dt") set.dt_ = std::stod(val);
      else if (key == "fields") {
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) set.names_.push_back(item);
      }
    }
  }
  {
    std::ifstream is(dir + "/manifest.csv");
    if (!is) throw IoError("no manifest.csv in " + dir);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string idx, t, file;
      std::getline(ss, idx, ',');
      std::getline(ss, t, ',');
      std::getline(ss, file, ',');
      set.times_.push_back(std::stod(t));
      set.files_.push_back(file);
    }
  }
  if (set.times_.empty()) throw IoError("empty manifest in " + dir);
  return set;
}

Snapshot SnapshotSet::load(size_t i) const {
  if (i >= times_.size()) throw IoError("snapshot index out of range");
  Snapshot s;
  s.t = times_[i];
  s.names = names_;
  s.fields = read_vcgr(dir_ + "/" + files_[i]);
  if (s.fields.size() != names_.size())
    throw IoError("field count mismatch in " + files_[i]);
  return s;
}

size_t SnapshotSet::nearest(double t) const {
  size_t best = 0;
  double d = HUGE_VAL;
  for (size_t i = 0; i < times_.size(); ++i) {
    double e = std::abs(times_[i] - t);
    if (e < d) {
      d = e;
      best = i;
    }
  }
  return best;
}

} // namespace vwave
