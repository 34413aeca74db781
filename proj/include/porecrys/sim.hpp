#pragma once

#include "porecrys/checkpoint.hpp"
#include "porecrys/config.hpp"
#include "porecrys/diagnostics.hpp"

#include <functional>
#include <optional>

namespace porecrys {

struct SimState {
  long step = 0;
  double time = 0;
  ChemState chem;
  FlowState flow;
  bool has_flow = false;
  ScalarField<double> eps_at_solve;  // ε the current flow was solved on

  double carbonate0 = 0;  // initial CO₃ + precipitate + crystal, mol
  double inflow = 0, clipped = 0;
  long clogged = 0;
  double kappa0 = 0, kappa0_up = 0;
  std::vector<HistoryRow> history;
  std::vector<SliceRow> slices;  // ε and precipitate profiles along x at each sample
};

// Build the initial porosity from the geometry section.
PorosityField make_geometry(const RunConfig& cfg);

struct StepInfo {
  double dt = 0;
  bool solved = false;  // DBS solved this step
  int dbs_iters = 0;
  double max_deps_since_solve = 0;
  ReactionReport reaction;
  // mol added by the transport clamp: CO₃, precipitate, then Ca when it moves
  std::vector<double> advect_clipped;
};

class Simulation {
 public:
  explicit Simulation(RunConfig cfg);
  // resume; the checkpoint must come from the same configuration
  Simulation(RunConfig cfg, const Checkpoint& ck);

  StepInfo step();
  // steps until t_final or max_steps, writing outputs into cfg.output_dir.
  // A numerical failure writes a checkpoint before rethrowing.
  void run(const std::function<void(const SimState&, const StepInfo&)>& on_step = {});

  Checkpoint checkpoint() const;
  // history, slices, events, K–φ table, summary, checkpoint (and VTK if asked)
  void write_outputs(const Checkpoint* ck = nullptr) const;

  const SimState& state() const { return s_; }
  SimState& state() { return s_; }
  const RunConfig& config() const { return cfg_; }
  const Chemistry& chemistry() const { return chem_; }
  std::vector<ClogEvent> clogging_events() const;

 private:
  void init_flow_and_history();
  // solves when forced or when ε moved by at least the skip threshold
  bool ensure_flow(bool force, StepInfo* info);
  void record(double dt);
  double apply_inflow();
  double carbonate_total() const;

  RunConfig cfg_;
  Chemistry chem_;
  SimState s_;
};

}  // namespace porecrys
