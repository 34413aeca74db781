#pragma once

#include "porecrys/fields.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace porecrys {

// One history sample. Totals are in mol; the carbonate budget counts
// CO₃ + precipitate + crystal, which reactions conserve.
struct HistoryRow {
  long step = 0;
  double time = 0, dt = 0;
  double phi = 0, phi_up = 0;      // ⟨ε⟩ over the domain and the upstream quarter
  double kappa = 0, kappa_up = 0;  // m²
  int dbs_iters = 0;
  double co3 = 0, ca = 0, precip = 0, crystal = 0;
  double inflow = 0;   // cumulative carbonate set by the inflow strip
  double clipped = 0;  // cumulative moles added by negativity clamps
  double budget = 0;   // |Δtotal − inflow − clipped| / total
  long clogged = 0;    // cumulative full-clog cell events
  double A_s = 0;
};

std::vector<std::string> history_header();
std::vector<double> history_values(const HistoryRow& r);
HistoryRow history_row(const std::vector<double>& values);
void write_history(const std::filesystem::path& path, const std::vector<HistoryRow>& rows);
std::vector<HistoryRow> read_history(const std::filesystem::path& path);

struct SliceRow {
  double time = 0;
  int index = 0;
  double x = 0;
  double eps = 0;     // slab mean ε
  double precip = 0;  // slab mean C_precip, mol/m³
};

// slab means over planes normal to `axis`
std::vector<SliceRow> slice_profiles(const PorosityField& eps, const ScalarField<double>& precip, double time,
                                     int axis = 0);
void write_slices(const std::filesystem::path& path, const std::vector<SliceRow>& rows, bool append);

struct KphiRow {
  double time = 0, phi_ratio = 1, kappa_ratio = 1;
  std::optional<double> exponent;  // Δlog κ / Δlog φ from the previous sample
  double ref[4] = {1, 1, 1, 1};    // (φ/φ₀)^n for n = 2, 3, 8, 64
};
inline constexpr double kKphiReference[4] = {2, 3, 8, 64};

std::vector<KphiRow> kphi_diagram(const std::vector<double>& time, const std::vector<double>& phi,
                                  const std::vector<double>& kappa);
void write_kphi(const std::filesystem::path& path, const std::vector<KphiRow>& rows);

// least-squares slope of log κ against log φ over samples [first, last]
std::optional<double> kphi_exponent(const std::vector<double>& phi, const std::vector<double>& kappa, size_t first,
                                    size_t last);

struct ClogEvent {
  size_t first = 0, last = 0;  // sample indices of the merged detections
  double time = 0;             // time of the first detection
  double drop = 0;             // largest fractional drop seen in the event
  std::string window = "full";
};

// κ_i ≤ (1 − threshold)·max(κ over the previous window−1 samples) marks a
// detection; runs of consecutive detections form one event
std::vector<ClogEvent> detect_clogging(const std::vector<double>& time, const std::vector<double>& kappa,
                                       double threshold = 0.2, int window = 5, const std::string& label = "full");
void write_events(const std::filesystem::path& path, const std::vector<ClogEvent>& events);

}  // namespace porecrys
