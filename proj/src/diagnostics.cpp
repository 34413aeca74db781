#include "porecrys/diagnostics.hpp"

#include "porecrys/io.hpp"

#include <cmath>

namespace porecrys {

std::vector<std::string> history_header() {
  return {"step",  "time", "dt",     "phi",     "phi_up",  "kappa",  "kappa_up", "dbs_iters", "co3",
          "ca",    "precip", "crystal", "inflow", "clipped", "budget", "clogged",  "A_s"};
}

std::vector<double> history_values(const HistoryRow& r) {
  return {double(r.step), r.time,   r.dt,     r.phi,     r.phi_up,  r.kappa,  r.kappa_up,     double(r.dbs_iters), r.co3,
          r.ca,           r.precip, r.crystal, r.inflow, r.clipped, r.budget, double(r.clogged), r.A_s};
}

HistoryRow history_row(const std::vector<double>& v) {
  if (v.size() != history_header().size()) throw FormatError("history row: wrong number of values");
  HistoryRow r;
  r.step = long(v[0]);
  r.time = v[1];
  r.dt = v[2];
  r.phi = v[3];
  r.phi_up = v[4];
  r.kappa = v[5];
  r.kappa_up = v[6];
  r.dbs_iters = int(v[7]);
  r.co3 = v[8];
  r.ca = v[9];
  r.precip = v[10];
  r.crystal = v[11];
  r.inflow = v[12];
  r.clipped = v[13];
  r.budget = v[14];
  r.clogged = long(v[15]);
  r.A_s = v[16];
  return r;
}

void write_history(const std::filesystem::path& path, const std::vector<HistoryRow>& rows) {
  CsvWriter w(path);
  w.header(history_header());
  for (const auto& r : rows) w.row(history_values(r));
}

std::vector<HistoryRow> read_history(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  if (t.empty() || t[0] != history_header()) throw FormatError(path.string() + ": not a history table");
  std::vector<HistoryRow> rows;
  for (size_t i = 1; i < t.size(); ++i) {
    if (t[i].size() != t[0].size()) throw FormatError(path.string() + ": ragged row " + std::to_string(i));
    std::vector<double> v;
    try {
      for (const auto& c : t[i]) v.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": non-numeric cell in row " + std::to_string(i));
    }
    rows.push_back(history_row(v));
  }
  return rows;
}

std::vector<SliceRow> slice_profiles(const PorosityField& eps, const ScalarField<double>& precip, double time,
                                     int axis) {
  const Grid& g = eps.grid();
  if (axis < 0 || axis > 2) throw ParameterError("slice_profiles: axis must be 0, 1 or 2");
  const int n = g.dims[axis];
  std::vector<double> se(size_t(n), 0.0), sp(size_t(n), 0.0);
  for (Index m = 0; m < g.size(); ++m) {
    const int i = g.coords(m)[axis];
    se[size_t(i)] += eps[m];
    sp[size_t(i)] += precip[m];
  }
  const double per = double(g.size()) / n;
  std::vector<SliceRow> rows;
  for (int i = 0; i < n; ++i) rows.push_back({time, i, g.x(i, axis), se[size_t(i)] / per, sp[size_t(i)] / per});
  return rows;
}

void write_slices(const std::filesystem::path& path, const std::vector<SliceRow>& rows, bool append) {
  const bool fresh = !append || !std::filesystem::exists(path);
  CsvWriter w(path, !fresh);
  if (fresh) w.header({"time", "index", "x", "eps_mean", "precip_mean"});
  for (const auto& r : rows) w.row({r.time, double(r.index), r.x, r.eps, r.precip});
}

std::vector<KphiRow> kphi_diagram(const std::vector<double>& time, const std::vector<double>& phi,
                                  const std::vector<double>& kappa) {
  if (phi.size() != kappa.size() || time.size() != phi.size())
    throw ParameterError("kphi_diagram: series lengths differ");
  if (phi.size() < 2) throw ParameterError("kphi_diagram: need at least two samples");
  if (!(phi[0] > 0) || !(kappa[0] > 0)) throw ParameterError("kphi_diagram: reference phi and kappa must be > 0");
  std::vector<KphiRow> rows;
  for (size_t i = 0; i < phi.size(); ++i) {
    KphiRow r;
    r.time = time[i];
    r.phi_ratio = phi[i] / phi[0];
    r.kappa_ratio = kappa[i] / kappa[0];
    for (int n = 0; n < 4; ++n) r.ref[n] = std::pow(r.phi_ratio, kKphiReference[n]);
    if (i > 0 && phi[i] != phi[i - 1] && phi[i] > 0 && kappa[i] > 0 && kappa[i - 1] > 0)
      r.exponent = std::log(kappa[i] / kappa[i - 1]) / std::log(phi[i] / phi[i - 1]);
    rows.push_back(r);
  }
  return rows;
}

void write_kphi(const std::filesystem::path& path, const std::vector<KphiRow>& rows) {
  CsvWriter w(path);
  w.header({"time", "phi_ratio", "kappa_ratio", "exponent", "ref_n2", "ref_n3", "ref_n8", "ref_n64"});
  for (const auto& r : rows)
    w.row({CsvWriter::num(r.time), CsvWriter::num(r.phi_ratio), CsvWriter::num(r.kappa_ratio),
           r.exponent ? CsvWriter::num(*r.exponent) : std::string(), CsvWriter::num(r.ref[0]),
           CsvWriter::num(r.ref[1]), CsvWriter::num(r.ref[2]), CsvWriter::num(r.ref[3])});
}

std::optional<double> kphi_exponent(const std::vector<double>& phi, const std::vector<double>& kappa, size_t first,
                                    size_t last) {
  if (last >= phi.size() || first >= last) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(last - first + 1);
  for (size_t i = first; i <= last; ++i) {
    if (!(phi[i] > 0) || !(kappa[i] > 0)) return std::nullopt;
    const double x = std::log(phi[i]), y = std::log(kappa[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) return std::nullopt;
  return (m * sxy - sx * sy) / den;
}

std::vector<ClogEvent> detect_clogging(const std::vector<double>& time, const std::vector<double>& kappa,
                                       double threshold, int window, const std::string& label) {
  if (time.size() != kappa.size()) throw ParameterError("detect_clogging: series lengths differ");
  if (window < 2) throw ParameterError("detect_clogging: window must be >= 2");
  if (!(threshold > 0 && threshold < 1)) throw ParameterError("detect_clogging: threshold must lie in (0, 1)");
  if (kappa.size() < size_t(window)) throw ParameterError("detect_clogging: series shorter than the window");
  std::vector<ClogEvent> events;
  bool open = false;
  for (size_t i = 1; i < kappa.size(); ++i) {
    const size_t from = i >= size_t(window - 1) ? i - size_t(window - 1) : 0;
    double ref = 0;
    for (size_t j = from; j < i; ++j) ref = std::max(ref, kappa[j]);
    const double drop = ref > 0 ? 1 - kappa[i] / ref : 0;
    if (drop >= threshold) {
      if (!open) {
        events.push_back({i, i, time[i], drop, label});
        open = true;
      } else {
        events.back().last = i;
        events.back().drop = std::max(events.back().drop, drop);
      }
    } else {
      open = false;
    }
  }
  return events;
}

void write_events(const std::filesystem::path& path, const std::vector<ClogEvent>& events) {
  CsvWriter w(path);
  w.header({"time", "window", "drop", "first_sample", "last_sample"});
  for (const auto& e : events)
    w.row({CsvWriter::num(e.time), e.window, CsvWriter::num(e.drop), std::to_string(e.first), std::to_string(e.last)});
}

}  // namespace porecrys
