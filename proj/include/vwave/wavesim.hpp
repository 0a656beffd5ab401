#ifndef VWAVE_WAVESIM_HPP
#define VWAVE_WAVESIM_HPP

#include <memory>
#include <string>
#include <vector>

#include "vwave/constitutive.hpp"
#include "vwave/field.hpp"
#include "vwave/snapshot.hpp"

namespace vwave {

struct InitialCondition {
  enum class Type {
    RadialV,   // compact radial velocity pulse v = A b(r/w) (x-x0)/w
    Pressure,  // compact isotropic in-plane compression strain
  };
  Type type = Type::RadialV;
  Vec2 center;
  double radius = 0.1;
  double amplitude = 1.0;
};

enum class Boundary { Clamped, Free };

struct SimConfig {
  Grid grid;
  MaterialModel::Ptr model;
  ScalarParam rho{1.0};
  double dt = 0.0;  // 0 => stable_dt
  double cfl = 0.45;
  double t_end = 1.0;
  InitialCondition ic;
  Boundary boundary = Boundary::Clamped;
  int snapshot_stride = 10;
  std::string out_dir;
  double stability_factor = 1.5;  // abort threshold on stored-energy growth
};

// CFL-limited step from the model's certified speed bound over the domain.
double stable_dt(const SimConfig& cfg);

// 2D plane-strain velocity-stress solver on a staggered grid. Normal
// stresses, strains and branch diagonals live at cell centers, shear at cell
// corners, velocities at faces. Memory branches update by the exact
// exponential recursion; stress is assembled (not incremented) each step.
class WaveSim {
public:
  explicit WaveSim(const SimConfig& cfg);

  void step();
  double time() const { return t_; }
  int steps_taken() const { return n_; }
  double dt() const { return dt_; }

  // Cell-centered collocation of the current state; velocities are
  // time-centered at the snapshot time (average of the two half steps).
  Snapshot snapshot();

  // Total stored energy e_K + e_S over the grid (same collocation as the
  // snapshot path).
  double stored_energy();

  const SimConfig& config() const { return cfg_; }
  static std::vector<std::string> field_names(const MaterialModel& m);

private:
  void update_velocity(double dt_v);
  void update_strain_stress();
  void assemble_stress();
  void centered_velocity(Field2D& vxc, Field2D& vyc) const;

  SimConfig cfg_;
  int nx_, ny_;
  double dt_;
  double t_ = 0.0;
  int n_ = 0;

  // staggered state
  Field2D vx_, vy_;          // faces (nx+1) x ny and nx x (ny+1)
  Field2D vx_prev_, vy_prev_;
  Field2D exx_, eyy_;        // centers
  Field2D exy_;              // corners (nx-1) x (ny-1)
  Field2D sxx_, syy_, szz_;  // centers
  Field2D sxy_;              // corners
  struct BranchState {
    Field2D hxx, hyy;  // centers
    Field2D hxy;       // corners
    Field2D decay_c, w_c, decay_k, w_k;
  };
  std::vector<BranchState> branches_;

  struct TermData {
    KernelTerm::Structure structure;
    Kelvin66 K;
    bool coupled = false;  // Matrix terms mixing normal and shear slots
    const AgingTable* aging = nullptr;
    Field2D sc_c, sc_k;  // coeff * weight at centers / corners
    int branch = -1;     // index into branches_, -1 for static terms
  };
  std::vector<TermData> terms_;

  Field2D rinv_x_, rinv_y_;  // 1/rho at faces
  Field2D scratch_c_, scratch_k_;
};

struct RunResult {
  std::string out_dir;
  int steps = 0;
  double dt = 0.0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double max_energy = 0.0;
};

// Steps to t_end, writing snapshots every `snapshot_stride` steps (plus the
// final state) in the binary grid format, with manifest and metadata.
RunResult run(const SimConfig& cfg);

} // namespace vwave

#endif
