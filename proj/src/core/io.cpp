#include "core/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace chinpaint {

static_assert(std::endian::native == std::endian::little, "binary trajectory format assumes a little-endian host");

namespace {

struct Header {
  std::int64_t nx, ny;
  double lx, ly, dt;
  std::int64_t n_steps;
};
static_assert(sizeof(Header) == 48);

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
}

void write_raw(std::ofstream& out, const Header& h, const std::vector<Field>& frames) {
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  for (const Field& f : frames)
    out.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
}

std::vector<Field> read_raw(const std::string& path, Header& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  if (!in.read(reinterpret_cast<char*>(&h), sizeof h)) throw Error(ErrorCode::Io, path + ": truncated header");
  if (h.nx < 4 || h.ny < 4 || h.n_steps < 0 || h.nx * h.ny > (std::int64_t{1} << 30))
    throw Error(ErrorCode::Io, path + ": implausible header");
  const Grid grid = Grid::make(static_cast<int>(h.nx), static_cast<int>(h.ny), h.lx, h.ly);
  std::vector<Field> frames;
  for (std::int64_t n = 0; n <= h.n_steps; ++n) {
    Field f(grid);
    if (!in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double))))
      throw Error(ErrorCode::Io, path + ": truncated after " + std::to_string(n) + " frames");
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  if (traj.states.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  auto out = open_out(path, true);
  write_raw(out, {traj.grid.nx, traj.grid.ny, traj.grid.lx, traj.grid.ly, traj.dt, traj.n_steps()}, traj.states);
  finish(out, path);
}

Trajectory read_trajectory(const std::string& path) {
  Header h{};
  Trajectory traj;
  traj.states = read_raw(path, h);
  traj.grid = traj.states.front().grid();
  traj.dt = h.dt;
  return traj;
}

void write_field(const Field& f, const std::string& path) {
  auto out = open_out(path, true);
  write_raw(out, {f.grid().nx, f.grid().ny, f.grid().lx, f.grid().ly, 0.0, 0}, {f});
  finish(out, path);
}

Field read_field(const std::string& path) {
  Header h{};
  return read_raw(path, h).front();
}

void write_diagnostics_csv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "step,time,energy,mass,min_phi,max_phi,clamp_events\n";
  for (const StepDiagnostics& d : traj.diagnostics)
    out << d.step << ',' << csv_number(d.time) << ',' << csv_number(d.energy) << ',' << csv_number(d.mass) << ','
        << csv_number(d.min_phi) << ',' << csv_number(d.max_phi) << ',' << d.clamp_events << '\n';
  finish(out, path);
}

void write_optim_csv(const OptimReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "iter,J,stationarity,step_size,armijo_backtracks,min_lambda,max_lambda\n";
  for (const OptimIteration& it : report.history)
    out << it.iter << ',' << csv_number(it.J) << ',' << csv_number(it.stationarity) << ',' << csv_number(it.step_size)
        << ',' << it.armijo_backtracks << ',' << csv_number(it.min_lambda) << ',' << csv_number(it.max_lambda) << '\n';
  finish(out, path);
}

void write_decay_csv(const DecayReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "time,d_hminus1\n";
  for (std::size_t n = 0; n < report.times.size(); ++n)
    out << csv_number(report.times[n]) << ',' << csv_number(report.hminus1_values[n]) << '\n';
  finish(out, path);
}

void write_decay_summary_csv(const std::vector<DecayReport>& reports, const std::string& path) {
  auto out = open_out(path);
  out << "lambda0,rate,r2\n";
  for (const DecayReport& r : reports)
    out << csv_number(r.lambda0) << ',' << csv_number(r.fitted_rate) << ',' << csv_number(r.fit_r2) << '\n';
  finish(out, path);
}

void write_epsilon_scan_csv(const std::vector<EpsilonScanRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "eps,rate,r2,target_residual\n";
  for (const EpsilonScanRow& r : rows)
    out << csv_number(r.eps) << ',' << csv_number(r.fitted_rate) << ',' << csv_number(r.fit_r2) << ','
        << csv_number(r.target_residual) << '\n';
  finish(out, path);
}

}  // namespace chinpaint
